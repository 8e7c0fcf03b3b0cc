use std::fmt;
use std::str::FromStr;

use super::Phase;
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::dim(format!("qubit count {n_qubits} outside 1..={MAX_QUBITS}")));
        }
        let outside = !full_mask(n_qubits);
        if (x_mask | z_mask) & outside != 0 {
            return Err(Error::dim(format!("mask bits beyond qubit {n_qubits}")));
        }
        Ok(PauliString { n_qubits, x: x_mask, z: z_mask })
    }

    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1 && n_qubits <= MAX_QUBITS);
        PauliString { n_qubits, x: 0, z: 0 }
    }

    /// Single-qubit letter (`I`, `X`, `Y` or `Z`) on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: char) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::dim(format!("qubit {qubit} out of range for {n_qubits} qubits")));
        }
        let bit = 1u64 << qubit;
        let (x, z) = match letter {
            'I' => (0, 0),
            'X' => (bit, 0),
            'Y' => (bit, bit),
            'Z' => (0, bit),
            other => return Err(Error::dim(format!("unknown Pauli letter {other:?}"))),
        };
        PauliString::new(n_qubits, x, z)
    }

    /// Z on every qubit in `mask`.
    pub fn z_type(n_qubits: usize, mask: u64) -> Result<Self> {
        PauliString::new(n_qubits, 0, mask)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_z_type(&self) -> bool {
        self.x == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn letter(&self, qubit: usize) -> char {
        let xb = (self.x >> qubit) & 1;
        let zb = (self.z >> qubit) & 1;
        match (xb, zb) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    /// Action on a computational basis state: `P|b> = phase * |b ^ x>`.
    #[inline]
    pub fn apply_to_basis(&self, basis: usize) -> (Phase, usize) {
        let b = basis as u64;
        let sign = ((b & self.z).count_ones() % 2) as i64 * 2;
        let phase = Phase::from_exponent(self.y_count() as i64 + sign);
        (phase, (b ^ self.x) as usize)
    }

    /// Copy of this string with the listed qubits deleted and the rest compacted.
    pub(crate) fn remove_qubits(&self, removed: &[usize]) -> Result<Self> {
        let keep: Vec<usize> = (0..self.n_qubits).filter(|q| !removed.contains(q)).collect();
        let mut x = 0u64;
        let mut z = 0u64;
        for (new, &old) in keep.iter().enumerate() {
            x |= ((self.x >> old) & 1) << new;
            z |= ((self.z >> old) & 1) << new;
        }
        PauliString::new(keep.len(), x, z)
    }
}

/// Operator product `a * b = phase * product`.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<(Phase, PauliString)> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::dim(format!(
            "cannot multiply strings on {} and {} qubits",
            a.n_qubits, b.n_qubits
        )));
    }
    Ok(multiply_unchecked(a, b))
}

#[inline]
pub(crate) fn multiply_unchecked(a: &PauliString, b: &PauliString) -> (Phase, PauliString) {
    let ax = a.x & !a.z;
    let ay = a.x & a.z;
    let az = !a.x & a.z;
    let bx = b.x & !b.z;
    let by = b.x & b.z;
    let bz = !b.x & b.z;
    // XY = iZ, YZ = iX, ZX = iY and the reversed products pick up -i.
    let plus = (ax & by) | (ay & bz) | (az & bx);
    let minus = (ay & bx) | (az & by) | (ax & bz);
    let phase = Phase::from_exponent(plus.count_ones() as i64 - minus.count_ones() as i64);
    (
        phase,
        PauliString {
            n_qubits: a.n_qubits,
            x: a.x ^ b.x,
            z: a.z ^ b.z,
        },
    )
}

/// True iff the symplectic form of `a` and `b` vanishes over GF(2).
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::dim(format!(
            "cannot compare strings on {} and {} qubits",
            a.n_qubits, b.n_qubits
        )));
    }
    Ok(commutes_unchecked(a, b))
}

#[inline]
pub(crate) fn commutes_unchecked(a: &PauliString, b: &PauliString) -> bool {
    ((a.x & b.z).count_ones() + (a.z & b.x).count_ones()) % 2 == 0
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, c) in s.chars().enumerate() {
            let p = PauliString::single(n.max(1), q, c.to_ascii_uppercase())?;
            x |= p.x;
            z |= p.z;
        }
        PauliString::new(n, x, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_table() {
        assert_eq!(multiply(&p("X"), &p("Y")).unwrap(), (Phase::I, p("Z")));
        assert_eq!(multiply(&p("Y"), &p("X")).unwrap(), (Phase::MINUS_I, p("Z")));
        assert_eq!(multiply(&p("Y"), &p("Z")).unwrap(), (Phase::I, p("X")));
        assert_eq!(multiply(&p("Z"), &p("X")).unwrap(), (Phase::I, p("Y")));
        assert_eq!(multiply(&p("Z"), &p("Z")).unwrap(), (Phase::ONE, p("I")));
    }

    #[test]
    fn identity_is_neutral() {
        for s in ["XYZI", "ZZZZ", "IIII", "YXIZ"] {
            assert_eq!(multiply(&p("IIII"), &p(s)).unwrap(), (Phase::ONE, p(s)));
        }
    }

    #[test]
    fn commutation_examples() {
        assert!(!commutes(&p("XI"), &p("ZI")).unwrap());
        assert!(commutes(&p("XI"), &p("IZ")).unwrap());
        assert!(commutes(&p("XX"), &p("ZZ")).unwrap());
    }

    #[test]
    fn mismatched_sizes() {
        assert!(matches!(multiply(&p("X"), &p("XX")), Err(Error::Dimension(_))));
        assert!(matches!(commutes(&p("X"), &p("XX")), Err(Error::Dimension(_))));
    }

    #[test]
    fn masks_beyond_width_rejected() {
        assert!(PauliString::new(2, 0b100, 0).is_err());
        assert!(PauliString::new(0, 0, 0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let s = p("ZIXY");
        assert_eq!(s.z_mask(), 0b1001);
        assert_eq!(s.x_mask(), 0b1100);
        assert_eq!(s.to_string(), "ZIXY");
    }

    #[test]
    fn remove_compacts() {
        let s = p("XYZI");
        assert_eq!(s.remove_qubits(&[1]).unwrap(), p("XZI"));
        assert_eq!(s.remove_qubits(&[0, 3]).unwrap(), p("YZ"));
    }
}
