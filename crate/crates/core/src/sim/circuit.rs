use std::fmt::Write as _;

use super::gate::{ExcitationFlavor, Gate};
use super::StateVector;
use crate::pauli::PauliString;
use crate::{Error, Result};

/// A gate list over `n_params` shared parameter slots, split into layers.
///
/// `layer_starts` holds the index of the first gate of each layer, starting at 0.
/// Gates that share a slot must sit in the same layer so that block-diagonal metric
/// estimates see every generator of a parameter together.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
    layer_starts: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_params: usize, gates: Vec<Gate>, layer_starts: Vec<usize>) -> Result<Self> {
        let c = Circuit { n_qubits, n_params, gates, layer_starts };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        for g in &self.gates {
            g.validate(self.n_qubits, self.n_params)?;
        }
        if self.layer_starts.first() != Some(&0) {
            return Err(Error::dim("layer boundaries must start at gate 0"));
        }
        if self.layer_starts.windows(2).any(|w| w[0] > w[1])
            || self.layer_starts.last().is_some_and(|&l| l > self.gates.len())
        {
            return Err(Error::dim("layer boundaries must be non-decreasing and within the gate list"));
        }
        let mut slot_layer = vec![None; self.n_params];
        for (l, range) in self.layer_ranges().enumerate() {
            for g in &self.gates[range] {
                if let Some(s) = g.slot() {
                    match slot_layer[s] {
                        None => slot_layer[s] = Some(l),
                        Some(prev) if prev != l => {
                            return Err(Error::dim(format!("slot {s} is used in layers {prev} and {l}")))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn layer_starts(&self) -> &[usize] {
        &self.layer_starts
    }

    pub fn n_layers(&self) -> usize {
        self.layer_starts.len()
    }

    pub fn layer_ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        let end = self.gates.len();
        self.layer_starts
            .iter()
            .enumerate()
            .map(move |(i, &s)| s..self.layer_starts.get(i + 1).copied().unwrap_or(end))
    }

    /// Slots read by each layer, in first-use order.
    pub fn layer_slots(&self) -> Vec<Vec<usize>> {
        self.layer_ranges()
            .map(|r| {
                let mut slots = Vec::new();
                for g in &self.gates[r] {
                    if let Some(s) = g.slot() {
                        if !slots.contains(&s) {
                            slots.push(s);
                        }
                    }
                }
                slots
            })
            .collect()
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::dim(format!(
                "circuit has {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::Numeric(format!("non-finite parameter {p}")));
        }
        Ok(())
    }

    /// Line-oriented text form, readable by [`Circuit::from_text`].
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {} params {}\n", self.n_qubits, self.n_params);
        let mut next_layer = 0;
        for (i, g) in self.gates.iter().enumerate() {
            while next_layer < self.layer_starts.len() && self.layer_starts[next_layer] == i {
                out.push_str("layer\n");
                next_layer += 1;
            }
            let flavor = |f: &ExcitationFlavor| match f {
                ExcitationFlavor::Qubit => "qubit",
                ExcitationFlavor::Fermionic => "fermionic",
            };
            let join = |w: &[usize]| w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let _ = match g {
                Gate::RotY { wire, slot } => writeln!(out, "ry {wire} slot={slot}"),
                Gate::RotZ { wire, slot } => writeln!(out, "rz {wire} slot={slot}"),
                Gate::Cnot { control, target } => writeln!(out, "cnot {control},{target}"),
                Gate::SingleExcitation { wires, slot, flavor: f } => {
                    writeln!(out, "single {} slot={slot} {}", join(wires), flavor(f))
                }
                Gate::DoubleExcitation { wires, slot, flavor: f } => {
                    writeln!(out, "double {} slot={slot} {}", join(wires), flavor(f))
                }
                Gate::PauliRotation { word, coeff, slot } => {
                    writeln!(out, "pauli {word} slot={slot} coeff={coeff:.17e}")
                }
            };
        }
        while next_layer < self.layer_starts.len() {
            out.push_str("layer\n");
            next_layer += 1;
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut header = None;
        let mut gates = Vec::new();
        let mut layer_starts = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |m: &str| Error::Parse { line: line_no, message: m.to_string() };
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                if let ["qubits", q, "params", p] = f.as_slice() {
                    let q = q.parse().map_err(|_| err("bad qubit count"))?;
                    let p = p.parse().map_err(|_| err("bad parameter count"))?;
                    header = Some((q, p));
                }
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let wires = |s: &str| -> Result<Vec<usize>> {
                s.split(',').map(|w| w.parse().map_err(|_| err("bad wire list"))).collect()
            };
            let keyed = |s: Option<&&str>, key: &str| -> Result<String> {
                s.and_then(|s| s.strip_prefix(key)).map(str::to_string).ok_or_else(|| err(&format!("expected {key}")))
            };
            let slot = |s: Option<&&str>| -> Result<usize> {
                keyed(s, "slot=")?.parse().map_err(|_| err("bad slot"))
            };
            let flavor = |s: Option<&&str>| -> Result<ExcitationFlavor> {
                match s.copied() {
                    Some("qubit") => Ok(ExcitationFlavor::Qubit),
                    Some("fermionic") => Ok(ExcitationFlavor::Fermionic),
                    _ => Err(err("expected qubit or fermionic")),
                }
            };
            let single_wire = |s: Option<&&str>| -> Result<usize> {
                s.ok_or_else(|| err("missing wire"))?.parse().map_err(|_| err("bad wire"))
            };
            let gate = match f[0] {
                "layer" => {
                    layer_starts.push(gates.len());
                    continue;
                }
                "ry" => Gate::RotY { wire: single_wire(f.get(1))?, slot: slot(f.get(2))? },
                "rz" => Gate::RotZ { wire: single_wire(f.get(1))?, slot: slot(f.get(2))? },
                "cnot" => match wires(f.get(1).ok_or_else(|| err("missing wires"))?)?.as_slice() {
                    [c, t] => Gate::Cnot { control: *c, target: *t },
                    _ => return Err(err("cnot takes two wires")),
                },
                "single" => {
                    let w = wires(f.get(1).ok_or_else(|| err("missing wires"))?)?;
                    let w: [usize; 2] = w.try_into().map_err(|_| err("single takes two wires"))?;
                    Gate::SingleExcitation { wires: w, slot: slot(f.get(2))?, flavor: flavor(f.get(3))? }
                }
                "double" => {
                    let w = wires(f.get(1).ok_or_else(|| err("missing wires"))?)?;
                    let w: [usize; 4] = w.try_into().map_err(|_| err("double takes four wires"))?;
                    Gate::DoubleExcitation { wires: w, slot: slot(f.get(2))?, flavor: flavor(f.get(3))? }
                }
                "pauli" => {
                    let word: PauliString = f
                        .get(1)
                        .ok_or_else(|| err("missing Pauli word"))?
                        .parse()
                        .map_err(|e: Error| err(&e.to_string()))?;
                    let coeff = keyed(f.get(3), "coeff=")?.parse().map_err(|_| err("bad coefficient"))?;
                    Gate::PauliRotation { word, coeff, slot: slot(f.get(2))? }
                }
                other => return Err(err(&format!("unknown gate '{other}'"))),
            };
            gates.push(gate);
        }
        let (n_qubits, n_params) = header.ok_or(Error::Parse {
            line: 1,
            message: "missing '# qubits N params P' header".into(),
        })?;
        if layer_starts.is_empty() {
            layer_starts.push(0);
        }
        Circuit::new(n_qubits, n_params, gates, layer_starts)
    }
}

/// Incremental circuit construction with automatic slot allocation.
#[derive(Debug)]
pub struct CircuitBuilder {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
    layer_starts: Vec<usize>,
}

impl CircuitBuilder {
    pub fn new(n_qubits: usize) -> Self {
        CircuitBuilder { n_qubits, n_params: 0, gates: Vec::new(), layer_starts: vec![0] }
    }

    /// Allocates a fresh parameter slot.
    pub fn slot(&mut self) -> usize {
        self.n_params += 1;
        self.n_params - 1
    }

    /// Starts a new layer unless the current one is still empty.
    pub fn layer(&mut self) -> &mut Self {
        if *self.layer_starts.last().unwrap() != self.gates.len() {
            self.layer_starts.push(self.gates.len());
        }
        self
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::new(self.n_qubits, self.n_params, self.gates, self.layer_starts)
    }
}

/// Starting point of a circuit run.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    Basis(usize),
    State(StateVector),
}

impl From<usize> for InitialState {
    fn from(b: usize) -> Self {
        InitialState::Basis(b)
    }
}

impl From<StateVector> for InitialState {
    fn from(s: StateVector) -> Self {
        InitialState::State(s)
    }
}

impl InitialState {
    pub fn prepare(&self, n_qubits: usize) -> Result<StateVector> {
        match self {
            InitialState::Basis(b) => StateVector::basis(n_qubits, *b),
            InitialState::State(s) => {
                s.check_qubits(n_qubits)?;
                Ok(s.clone())
            }
        }
    }
}

/// `U(params)|initial>`.
pub fn run(circuit: &Circuit, params: &[f64], initial: &InitialState) -> Result<StateVector> {
    circuit.check_params(params)?;
    let mut state = initial.prepare(circuit.n_qubits())?;
    let amps = state.amplitudes_mut();
    for g in circuit.gates() {
        g.apply_angle(amps, g.slot().map_or(0.0, |s| params[s]));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Circuit {
        let mut b = CircuitBuilder::new(4);
        let s0 = b.slot();
        let s1 = b.slot();
        b.push(Gate::DoubleExcitation { wires: [2, 3, 1, 0], slot: s0, flavor: ExcitationFlavor::Fermionic });
        b.push(Gate::SingleExcitation { wires: [2, 0], slot: s1, flavor: ExcitationFlavor::Qubit });
        b.layer();
        let s2 = b.slot();
        b.push(Gate::RotY { wire: 0, slot: s2 });
        b.push(Gate::RotZ { wire: 1, slot: s2 });
        b.push(Gate::Cnot { control: 0, target: 3 });
        b.push(Gate::PauliRotation { word: "XYZI".parse().unwrap(), coeff: 0.25, slot: s2 });
        b.build().unwrap()
    }

    #[test]
    fn text_round_trip() {
        let c = sample();
        assert_eq!(Circuit::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn slot_shared_across_layers_is_rejected() {
        let g = vec![Gate::RotY { wire: 0, slot: 0 }, Gate::RotY { wire: 0, slot: 0 }];
        assert!(Circuit::new(1, 1, g, vec![0, 1]).is_err());
    }

    #[test]
    fn run_checks_parameters() {
        let c = sample();
        assert!(run(&c, &[0.0; 2], &InitialState::Basis(3)).is_err());
        assert!(matches!(run(&c, &[0.0, f64::NAN, 0.0], &3.into()), Err(Error::Numeric(_))));
        let s = run(&c, &[0.1, 0.2, 0.3], &3.into()).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn parse_error_reports_line() {
        let e = Circuit::from_text("# qubits 2 params 1\nry 0 slot=0\nfoo 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
    }
}
