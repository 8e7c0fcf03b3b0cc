//! Parameter updates: gradient descent, Adam, and quantum natural gradient with a
//! layer-block-diagonal Fubini-Study metric.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::sim::{Circuit, InitialState};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Gd,
    Adam,
    Qng,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub qng_regularization: f64,
    /// Use `sqrt(1 - b2^h) / sqrt(1 - b1^h)` as the Adam step correction instead of
    /// the standard `sqrt(1 - b2^h) / (1 - b1^h)`.
    pub adam_paper_variant: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            kind: OptimizerKind::Adam,
            learning_rate: 0.3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            qng_regularization: 1e-6,
            adam_paper_variant: false,
        }
    }
}

impl OptimizerConfig {
    pub fn with_kind(kind: OptimizerKind, learning_rate: f64) -> Self {
        OptimizerConfig { kind, learning_rate, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::config(format!("optimizer.{field}"), msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate", "must be positive and finite");
        }
        if !(0.0..1.0).contains(&self.beta1) {
            return bad("beta1", "must lie in [0, 1)");
        }
        if !(0.0..1.0).contains(&self.beta2) {
            return bad("beta2", "must lie in [0, 1)");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon", "must be positive");
        }
        if !(self.qng_regularization >= 0.0 && self.qng_regularization.is_finite()) {
            return bad("qng_regularization", "must be non-negative and finite");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OptimizerState {
    pub step: u64,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
}

impl OptimizerState {
    pub fn new(n_params: usize) -> Self {
        OptimizerState { step: 0, m1: vec![0.0; n_params], m2: vec![0.0; n_params] }
    }
}

fn check_inputs(params: &[f64], grad: &[f64]) -> Result<()> {
    if params.len() != grad.len() {
        return Err(Error::dim(format!("{} parameters but {} gradient entries", params.len(), grad.len())));
    }
    if params.iter().chain(grad).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite parameter or gradient".into()));
    }
    Ok(())
}

/// `theta - eta * grad`.
pub fn gd_step(params: &[f64], grad: &[f64], cfg: &OptimizerConfig) -> Result<Vec<f64>> {
    check_inputs(params, grad)?;
    Ok(params.iter().zip(grad).map(|(p, g)| p - cfg.learning_rate * g).collect())
}

pub fn adam_step(
    params: &[f64],
    grad: &[f64],
    cfg: &OptimizerConfig,
    st: &OptimizerState,
) -> Result<(Vec<f64>, OptimizerState)> {
    check_inputs(params, grad)?;
    if st.m1.len() != params.len() || st.m2.len() != params.len() {
        return Err(Error::dim("optimizer state does not match the parameter count"));
    }
    let h = st.step + 1;
    let (b1, b2) = (cfg.beta1, cfg.beta2);
    let c1 = 1.0 - b1.powf(h as f64);
    let c2 = 1.0 - b2.powf(h as f64);
    let rate = if cfg.adam_paper_variant {
        cfg.learning_rate * c2.sqrt() / c1.sqrt()
    } else {
        cfg.learning_rate * c2.sqrt() / c1
    };
    let mut next = OptimizerState { step: h, m1: Vec::with_capacity(params.len()), m2: Vec::with_capacity(params.len()) };
    let mut out = Vec::with_capacity(params.len());
    for ((&p, &g), (&m1, &m2)) in params.iter().zip(grad).zip(st.m1.iter().zip(&st.m2)) {
        let m1 = b1 * m1 + (1.0 - b1) * g;
        let m2 = b2 * m2 + (1.0 - b2) * g * g;
        out.push(p - rate * m1 / (m2.sqrt() + cfg.epsilon));
        next.m1.push(m1);
        next.m2.push(m2);
    }
    Ok((out, next))
}

/// Block-diagonal metric: one dense block per circuit layer, indexed by the
/// parameter slots that layer reads.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMetric {
    pub n_params: usize,
    pub blocks: Vec<(Vec<usize>, DMatrix<f64>)>,
}

impl BlockMetric {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_params, self.n_params);
        for (slots, b) in &self.blocks {
            for (i, &si) in slots.iter().enumerate() {
                for (j, &sj) in slots.iter().enumerate() {
                    m[(si, sj)] += b[(i, j)];
                }
            }
        }
        m
    }

    /// `c * I` with one block per parameter.
    pub fn scaled_identity(n_params: usize, c: f64) -> Self {
        BlockMetric {
            n_params,
            blocks: (0..n_params).map(|i| (vec![i], DMatrix::from_element(1, 1, c))).collect(),
        }
    }
}

/// Fubini-Study metric blocks `Re <A_i A_j> - <A_i><A_j>` evaluated on the state
/// entering each layer, where `A_i` sums the generators of all gates in the layer
/// reading slot `i`.
pub fn geometric_tensor(circuit: &Circuit, params: &[f64], initial: &InitialState) -> Result<BlockMetric> {
    geometric_tensor_weighted(circuit, params, &[(initial.clone(), 1.0)])
}

/// Weighted sum of the metrics of several inputs through the same circuit.
pub fn geometric_tensor_weighted(
    circuit: &Circuit,
    params: &[f64],
    inputs: &[(InitialState, f64)],
) -> Result<BlockMetric> {
    circuit.check_params(params)?;
    let layer_slots = circuit.layer_slots();
    let mut blocks: Vec<(Vec<usize>, DMatrix<f64>)> = layer_slots
        .iter()
        .map(|s| (s.clone(), DMatrix::zeros(s.len(), s.len())))
        .collect();
    for (initial, weight) in inputs {
        let mut psi = initial.prepare(circuit.n_qubits())?.into_amplitudes();
        for (l, range) in circuit.layer_ranges().enumerate() {
            let slots = &layer_slots[l];
            let mut vs = vec![vec![Complex64::new(0.0, 0.0); psi.len()]; slots.len()];
            for g in &circuit.gates()[range.clone()] {
                let Some(slot) = g.slot() else { continue };
                let a_psi = g
                    .apply_generator(&psi)
                    .ok_or_else(|| Error::Unsupported(format!("gate {g:?} has no generator")))?;
                let k = slots.iter().position(|&s| s == slot).expect("slot listed for its layer");
                vs[k].iter_mut().zip(&a_psi).for_each(|(v, a)| *v += a);
            }
            let means: Vec<f64> = vs.iter().map(|v| inner(&psi, v).re).collect();
            let block = &mut blocks[l].1;
            for i in 0..slots.len() {
                for j in i..slots.len() {
                    let gij = inner(&vs[i], &vs[j]).re - means[i] * means[j];
                    block[(i, j)] += weight * gij;
                    if i != j {
                        block[(j, i)] += weight * gij;
                    }
                }
            }
            for g in &circuit.gates()[range] {
                g.apply_angle(&mut psi, g.slot().map_or(0.0, |s| params[s]));
            }
        }
    }
    Ok(BlockMetric { n_params: circuit.n_params(), blocks })
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `theta - eta (g + lambda I)^-1 grad`, solved block by block.
pub fn qng_step(params: &[f64], grad: &[f64], g: &BlockMetric, cfg: &OptimizerConfig) -> Result<Vec<f64>> {
    check_inputs(params, grad)?;
    if g.n_params != params.len() {
        return Err(Error::dim(format!("metric for {} parameters, got {}", g.n_params, params.len())));
    }
    let lambda = cfg.qng_regularization;
    let mut out = params.to_vec();
    for (slots, block) in &g.blocks {
        if slots.is_empty() {
            continue;
        }
        let n = slots.len();
        let reg = block + DMatrix::identity(n, n) * lambda;
        if lambda == 0.0 {
            let min_eig = reg.symmetric_eigenvalues().min();
            let scale = reg.amax().max(1.0);
            if min_eig <= 1e-12 * scale {
                return Err(Error::Regularization(format!(
                    "metric block over slots {slots:?} is singular (smallest eigenvalue {min_eig:e}); \
                     set qng_regularization > 0"
                )));
            }
        }
        let rhs = DVector::from_iterator(n, slots.iter().map(|&s| grad[s]));
        let chol = reg.cholesky().ok_or_else(|| {
            Error::Regularization(format!(
                "metric block over slots {slots:?} is not positive definite; increase qng_regularization"
            ))
        })?;
        let x = chol.solve(&rhs);
        for (k, &s) in slots.iter().enumerate() {
            out[s] -= cfg.learning_rate * x[k];
        }
    }
    Ok(out)
}

/// Optimizer configuration together with its running state.
#[derive(Clone, Debug)]
pub struct Optimizer {
    pub config: OptimizerConfig,
    pub state: OptimizerState,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig, n_params: usize) -> Result<Self> {
        config.validate()?;
        Ok(Optimizer { config, state: OptimizerState::new(n_params) })
    }

    pub fn needs_metric(&self) -> bool {
        self.config.kind == OptimizerKind::Qng
    }

    pub fn step(&mut self, params: &[f64], grad: &[f64], metric: Option<&BlockMetric>) -> Result<Vec<f64>> {
        match self.config.kind {
            OptimizerKind::Gd => gd_step(params, grad, &self.config),
            OptimizerKind::Adam => {
                let (p, st) = adam_step(params, grad, &self.config, &self.state)?;
                self.state = st;
                Ok(p)
            }
            OptimizerKind::Qng => {
                let g = metric.ok_or_else(|| Error::Unsupported("natural gradient step without a metric".into()))?;
                qng_step(params, grad, g, &self.config)
            }
        }
    }
}
