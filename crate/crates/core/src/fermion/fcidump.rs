use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array2, Array4};

use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;

/// Integrals in the FCIDUMP convention: spatial orbitals, chemist notation `(ij|kl)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FciDump {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i32,
    /// Parsed for completeness, otherwise unused.
    pub orbsym: Vec<i64>,
    pub core_energy: f64,
    pub one_body: Array2<f64>,
    pub two_body: Array4<f64>,
}

impl FciDump {
    /// Checks the one-body and 8-fold two-body symmetries.
    pub fn check_symmetry(&self) -> Result<()> {
        let n = self.norb;
        for i in 0..n {
            for j in 0..n {
                if (self.one_body[[i, j]] - self.one_body[[j, i]]).abs() > SYMMETRY_TOL {
                    return Err(Error::Consistency(format!("one-body not symmetric at ({i},{j})")));
                }
                for k in 0..n {
                    for l in 0..n {
                        let v = self.two_body[[i, j, k, l]];
                        for w in [
                            self.two_body[[j, i, k, l]],
                            self.two_body[[i, j, l, k]],
                            self.two_body[[k, l, i, j]],
                        ] {
                            if (v - w).abs() > SYMMETRY_TOL {
                                return Err(Error::Consistency(format!(
                                    "two-body symmetry broken at ({i}{j}|{k}{l})"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Writes the unique entries back in FCIDUMP form.
    pub fn to_fcidump_string(&self) -> String {
        let n = self.norb;
        let mut out = format!("&FCI NORB={},NELEC={},MS2={},\n", n, self.nelec, self.ms2);
        if !self.orbsym.is_empty() {
            let syms: Vec<String> = self.orbsym.iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, " ORBSYM={},", syms.join(","));
        }
        out.push_str(" ISYM=1,\n&END\n");
        for i in 0..n {
            for j in 0..=i {
                let ij = i * (i + 1) / 2 + j;
                for k in 0..n {
                    for l in 0..=k {
                        let kl = k * (k + 1) / 2 + l;
                        if kl > ij {
                            continue;
                        }
                        let v = self.two_body[[i, j, k, l]];
                        if v != 0.0 {
                            let _ = writeln!(out, "{v:.17e} {} {} {} {}", i + 1, j + 1, k + 1, l + 1);
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let v = self.one_body[[i, j]];
                if v != 0.0 {
                    let _ = writeln!(out, "{v:.17e} {} {} 0 0", i + 1, j + 1);
                }
            }
        }
        let _ = writeln!(out, "{:.17e} 0 0 0 0", self.core_energy);
        out
    }
}

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<FciDump> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_fcidump(&text).map_err(|e| e.in_file(path))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

#[derive(Default)]
struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: Option<i32>,
    orbsym: Vec<i64>,
}

impl Header {
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let int = |v: &str| -> Result<i64> {
            v.parse::<i64>()
                .map_err(|_| parse_err(line, format!("non-integer value {v:?} for {key}")))
        };
        match key {
            "NORB" => {
                let v = int(value)?;
                if v <= 0 {
                    return Err(parse_err(line, "NORB must be positive"));
                }
                self.norb = Some(v as usize)
            }
            "NELEC" => {
                let v = int(value)?;
                if v < 0 {
                    return Err(parse_err(line, "NELEC must be nonnegative"));
                }
                self.nelec = Some(v as usize)
            }
            "MS2" => self.ms2 = Some(int(value)? as i32),
            "ORBSYM" => self.orbsym.push(int(value)?),
            _ => {}
        }
        Ok(())
    }
}

/// Parses FCIDUMP text: a `&FCI ... &END` (or `/`) namelist followed by
/// `value i j k l` lines with 1-based orbital indices.
pub fn parse_fcidump(text: &str) -> Result<FciDump> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (first_no, first) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| parse_err(1, "empty input"))?;
    let first_trim = first.trim_start();
    if !first_trim.to_ascii_uppercase().starts_with("&FCI") {
        return Err(parse_err(first_no, "expected `&FCI` namelist header"));
    }

    let mut header = Header::default();
    let mut current_key: Option<String> = None;
    let mut body = first_trim[4..].to_string();
    let mut body_line = first_no;
    loop {
        let upper = body.to_ascii_uppercase();
        let (content, done) = match upper.find("&END").or_else(|| upper.find('/')) {
            Some(pos) => (&body[..pos], true),
            None => (&body[..], false),
        };
        for token in content.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            match token.split_once('=') {
                Some((k, v)) => {
                    let key = k.trim().to_ascii_uppercase();
                    if !v.is_empty() {
                        header.set(&key, v, body_line)?;
                    }
                    current_key = Some(key);
                }
                None => match &current_key {
                    Some(key) => header.set(key, token, body_line)?,
                    None => return Err(parse_err(body_line, format!("unexpected token {token:?} in header"))),
                },
            }
        }
        if done {
            break;
        }
        match lines.next() {
            Some((no, l)) => {
                body = l.to_string();
                body_line = no;
            }
            None => return Err(parse_err(body_line, "namelist header not terminated by &END or /")),
        }
    }

    let norb = header.norb.ok_or_else(|| parse_err(body_line, "missing NORB"))?;
    let nelec = header.nelec.ok_or_else(|| parse_err(body_line, "missing NELEC"))?;
    let ms2 = header.ms2.unwrap_or(0);

    let mut one_body = Array2::<f64>::zeros((norb, norb));
    let mut two_body = Array4::<f64>::zeros((norb, norb, norb, norb));
    let mut core_energy = 0.0;

    for (no, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(parse_err(no, format!("expected `value i j k l`, found {} fields", fields.len())));
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| parse_err(no, format!("non-numeric value {:?}", fields[0])))?;
        let mut idx = [0usize; 4];
        for (slot, f) in idx.iter_mut().zip(&fields[1..]) {
            let v: usize = f.parse().map_err(|_| parse_err(no, format!("bad index {f:?}")))?;
            if v > norb {
                return Err(parse_err(no, format!("index {v} exceeds NORB={norb}")));
            }
            *slot = v;
        }
        match idx {
            [0, 0, 0, 0] => core_energy = value,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                one_body[[i - 1, j - 1]] = value;
                one_body[[j - 1, i - 1]] = value;
            }
            // orbital energies, ignored
            [_, 0, 0, 0] => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (i, j, k, l) = (i - 1, j - 1, k - 1, l - 1);
                for [a, b, c, d] in [
                    [i, j, k, l],
                    [j, i, k, l],
                    [i, j, l, k],
                    [j, i, l, k],
                    [k, l, i, j],
                    [l, k, i, j],
                    [k, l, j, i],
                    [l, k, j, i],
                ] {
                    two_body[[a, b, c, d]] = value;
                }
            }
            _ => return Err(parse_err(no, format!("unsupported index pattern {idx:?}"))),
        }
    }

    Ok(FciDump {
        norb,
        nelec,
        ms2,
        orbsym: header.orbsym,
        core_energy,
        one_body,
        two_body,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n\
        0.5 1 1 1 1\n0.25 2 1 2 1\n0.5 1 1 0 0\n-0.1 2 1 0 0\n0.7 0 0 0 0\n";

    #[test]
    fn header_fields() {
        let f = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n").unwrap();
        assert_eq!((f.norb, f.nelec, f.ms2), (2, 2, 0));
    }

    #[test]
    fn one_body_index_convention() {
        let f = parse_fcidump(TINY).unwrap();
        assert_eq!(f.one_body[[0, 0]], 0.5);
        assert_eq!(f.one_body[[0, 1]], -0.1);
        assert_eq!(f.one_body[[1, 0]], -0.1);
        assert_eq!(f.core_energy, 0.7);
        assert_eq!(f.orbsym, vec![1, 1]);
    }

    #[test]
    fn two_body_symmetry_completed() {
        let f = parse_fcidump(TINY).unwrap();
        for idx in [[1, 0, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1], [0, 1, 0, 1]] {
            assert_eq!(f.two_body[idx], 0.25);
        }
        f.check_symmetry().unwrap();
    }

    #[test]
    fn slash_terminator_and_multiline_header() {
        let f = parse_fcidump(" &FCI NORB=1,\n NELEC=2, MS2=0\n /\n 1.0 1 1 1 1\n").unwrap();
        assert_eq!(f.norb, 1);
        assert_eq!(f.two_body[[0, 0, 0, 0]], 1.0);
    }

    #[test]
    fn errors_report_lines() {
        let bad_header = parse_fcidump("NORB=2\n").unwrap_err();
        assert!(matches!(bad_header, Error::Parse { line: 1, .. }));
        let out_of_range = parse_fcidump("&FCI NORB=1,NELEC=2 &END\n0.5 1 1 0 0\n0.1 2 1 0 0\n").unwrap_err();
        assert!(matches!(out_of_range, Error::Parse { line: 3, .. }));
        let non_numeric = parse_fcidump("&FCI NORB=1,NELEC=2 &END\nabc 1 1 0 0\n").unwrap_err();
        assert!(matches!(non_numeric, Error::Parse { line: 2, .. }));
        let unterminated = parse_fcidump("&FCI NORB=1,NELEC=2\n0.5 1 1 0 0\n").unwrap_err();
        assert!(matches!(unterminated, Error::Parse { .. }));
    }

    #[test]
    fn serialize_round_trip() {
        let f = parse_fcidump(TINY).unwrap();
        let back = parse_fcidump(&f.to_fcidump_string()).unwrap();
        assert_eq!(f, back);
    }
}
