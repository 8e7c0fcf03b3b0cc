//! Optimization loops for VQE, VQD, weighted SSVQE and their folded-spectrum
//! counterparts.

use serde::{Deserialize, Serialize};

use crate::fermion::spin_penalty_operator;
use crate::optim::{geometric_tensor_weighted, Optimizer, OptimizerConfig};
use crate::pauli::{fold, PauliSum};
use crate::sim::{
    expectation, loss_and_gradient, overlap, variance, Circuit, CompiledOperator, InitialState, LossSpec,
    LossTerm, Objective, Penalty, StateVector,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoppingRule {
    /// Stop once `|L_t - L_{t-1}|` falls below this.
    pub convergence_threshold: f64,
    /// Loss evaluations allowed per optimization. Zero returns the initial state.
    pub max_iterations: usize,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule { convergence_threshold: 1e-5, max_iterations: 400 }
    }
}

impl StoppingRule {
    pub fn new(convergence_threshold: f64, max_iterations: usize) -> Self {
        StoppingRule { convergence_threshold, max_iterations }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.convergence_threshold > 0.0 && self.convergence_threshold.is_finite()) {
            return Err(Error::config("stopping.convergence_threshold", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Outcome of one driver call. Multi-stage methods concatenate their stage traces.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub loss_trace: Vec<f64>,
    /// Iterations spent in each optimization stage.
    pub stage_iterations: Vec<usize>,
    /// Final parameters of each stage.
    pub final_params: Vec<Vec<f64>>,
    /// `<H>` of each target state, Hartree.
    pub energies: Vec<f64>,
    /// `<H^2> - <H>^2` of each target state.
    pub variances: Vec<f64>,
    pub iterations_used: usize,
    /// Every stage met the convergence threshold.
    pub converged: bool,
    /// Set when a stage hit a non-finite loss or gradient.
    pub aborted: Option<String>,
    pub states: Vec<StateVector>,
}

/// Settings shared by every driver.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Extra observable added to every state's loss, e.g. a spin penalty.
    pub penalty_observable: Option<PauliSum>,
    /// Use `sqrt(<(H - omega)^2>)` per state in folded-spectrum losses.
    pub sqrt_loss: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqdSchedule {
    pub betas: Vec<f64>,
    pub circuits: Vec<Circuit>,
    pub initial_state: InitialState,
}

impl VqdSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.circuits.is_empty() {
            return Err(Error::Schedule("at least one circuit is required".into()));
        }
        if self.betas.len() + 1 != self.circuits.len() {
            return Err(Error::Schedule(format!(
                "{} states need {} penalties, got {}",
                self.circuits.len(),
                self.circuits.len() - 1,
                self.betas.len()
            )));
        }
        if let Some(b) = self.betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(Error::Schedule(format!("penalty {b} must be positive")));
        }
        let n = self.circuits[0].n_qubits();
        if self.circuits.iter().any(|c| c.n_qubits() != n) {
            return Err(Error::Schedule("circuits act on different registers".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsvqeSchedule {
    pub weights: Vec<f64>,
    pub input_states: Vec<usize>,
    pub circuit: Circuit,
    /// Accept equal weights; reported states are then sorted by energy.
    pub equal_weights: bool,
}

impl SsvqeSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() || self.weights.len() != self.input_states.len() {
            return Err(Error::Schedule(format!(
                "{} weights for {} input states",
                self.weights.len(),
                self.input_states.len()
            )));
        }
        if self.weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Schedule("weights must be positive".into()));
        }
        let ok = if self.equal_weights {
            self.weights.windows(2).all(|w| w[0] == w[1])
        } else {
            self.weights.windows(2).all(|w| w[0] > w[1])
        };
        if !ok {
            return Err(Error::Schedule(format!(
                "weights {:?} must be {}",
                self.weights,
                if self.equal_weights { "all equal" } else { "strictly decreasing" }
            )));
        }
        let mut seen = self.input_states.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.input_states.len() {
            return Err(Error::Schedule("input basis states must be distinct".into()));
        }
        Ok(())
    }
}

struct Stage {
    trace: Vec<f64>,
    params: Vec<f64>,
    states: Vec<StateVector>,
    converged: bool,
    aborted: Option<String>,
}

/// Gradient-based minimization of `spec` from zero parameters. Loss and gradient
/// are evaluated once per iteration; the update is skipped after the last one so
/// the returned parameters are those of the final trace entry.
fn optimize(
    circuit: &Circuit,
    spec: &LossSpec,
    metric_inputs: &[(InitialState, f64)],
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
) -> Result<Stage> {
    stop.validate()?;
    let mut opt = Optimizer::new(cfg.clone(), circuit.n_params())?;
    let mut params = vec![0.0; circuit.n_params()];
    let mut trace = Vec::new();
    let mut states = Vec::new();
    let mut converged = false;
    if stop.max_iterations == 0 {
        states = spec
            .terms
            .iter()
            .map(|t| crate::sim::run(circuit, &params, &t.initial))
            .collect::<Result<_>>()?;
    }
    for it in 0..stop.max_iterations {
        let eval = match loss_and_gradient(circuit, &params, spec) {
            Ok(e) => e,
            Err(Error::Numeric(msg)) => {
                return Ok(Stage { trace, params, states, converged: false, aborted: Some(msg) });
            }
            Err(e) => return Err(e),
        };
        states = eval.states;
        trace.push(eval.loss);
        if let [.., prev, last] = trace.as_slice() {
            if (last - prev).abs() < stop.convergence_threshold {
                converged = true;
                break;
            }
        }
        if it + 1 == stop.max_iterations {
            break;
        }
        let metric = if opt.needs_metric() {
            Some(geometric_tensor_weighted(circuit, &params, metric_inputs)?)
        } else {
            None
        };
        params = match opt.step(&params, &eval.gradient, metric.as_ref()) {
            Ok(p) => p,
            Err(Error::Numeric(msg)) => {
                return Ok(Stage { trace, params, states, converged: false, aborted: Some(msg) });
            }
            Err(e) => return Err(e),
        };
    }
    Ok(Stage { trace, params, states, converged, aborted: None })
}

struct Losses {
    objective: CompiledOperator,
    penalty: Option<CompiledOperator>,
    sqrt: bool,
}

impl Losses {
    fn new(objective: &PauliSum, opts: &RunOptions, folded: bool) -> Result<Self> {
        if opts.sqrt_loss && !folded {
            return Err(Error::Unsupported("the square-root loss applies only to folded-spectrum runs".into()));
        }
        if let Some(p) = &opts.penalty_observable {
            if p.n_qubits() != objective.n_qubits() {
                return Err(Error::dim("penalty observable and Hamiltonian act on different registers"));
            }
        }
        Ok(Losses {
            objective: CompiledOperator::new(objective),
            penalty: opts.penalty_observable.as_ref().map(CompiledOperator::new),
            sqrt: opts.sqrt_loss,
        })
    }

    fn objectives(&self) -> Vec<Objective<'_>> {
        let mut v = vec![if self.sqrt {
            Objective::SqrtExpectation(&self.objective)
        } else {
            Objective::Expectation(&self.objective)
        }];
        if let Some(p) = &self.penalty {
            v.push(Objective::Expectation(p));
        }
        v
    }
}

fn check_register(h: &PauliSum, circuit: &Circuit) -> Result<()> {
    if h.n_qubits() != circuit.n_qubits() {
        return Err(Error::dim(format!(
            "Hamiltonian on {} qubits, circuit on {}",
            h.n_qubits(),
            circuit.n_qubits()
        )));
    }
    Ok(())
}

fn finish(h: &PauliSum, stages: Vec<Stage>, states: Vec<StateVector>) -> Result<RunRecord> {
    let energies = states.iter().map(|s| expectation(s, h)).collect::<Result<Vec<_>>>()?;
    let variances = states.iter().map(|s| variance(s, h)).collect::<Result<Vec<_>>>()?;
    let stage_iterations: Vec<usize> = stages.iter().map(|s| s.trace.len()).collect();
    Ok(RunRecord {
        iterations_used: stage_iterations.iter().sum(),
        loss_trace: stages.iter().flat_map(|s| s.trace.iter().copied()).collect(),
        final_params: stages.iter().map(|s| s.params.clone()).collect(),
        converged: stages.iter().all(|s| s.converged),
        aborted: stages.iter().find_map(|s| s.aborted.clone()),
        stage_iterations,
        energies,
        variances,
        states,
    })
}

fn single_state(
    h: &PauliSum,
    objective: &PauliSum,
    folded: bool,
    circuit: &Circuit,
    init: &InitialState,
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<RunRecord> {
    check_register(h, circuit)?;
    let losses = Losses::new(objective, opts, folded)?;
    let spec = LossSpec {
        terms: vec![LossTerm { initial: init.clone(), weight: 1.0, objectives: losses.objectives(), penalties: vec![] }],
    };
    let stage = optimize(circuit, &spec, &[(init.clone(), 1.0)], cfg, stop)?;
    let states = stage.states.clone();
    finish(h, vec![stage], states)
}

/// Minimizes `<H>` (plus any penalty observable).
pub fn vqe(
    h: &PauliSum,
    circuit: &Circuit,
    init: &InitialState,
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<RunRecord> {
    single_state(h, h, false, circuit, init, cfg, stop, opts)
}

/// VQE on `(H - omega)^2`; energies and variances refer to `H`.
pub fn fs_vqe(
    h: &PauliSum,
    omega: f64,
    circuit: &Circuit,
    init: &InitialState,
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<RunRecord> {
    single_state(h, &fold(h, omega), true, circuit, init, cfg, stop, opts)
}

fn deflation(
    h: &PauliSum,
    objective: &PauliSum,
    folded: bool,
    schedule: &VqdSchedule,
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<RunRecord> {
    schedule.validate()?;
    for c in &schedule.circuits {
        check_register(h, c)?;
    }
    let losses = Losses::new(objective, opts, folded)?;
    let mut found: Vec<StateVector> = Vec::new();
    let mut stages = Vec::new();
    for (k, circuit) in schedule.circuits.iter().enumerate() {
        let penalties = found
            .iter()
            .zip(&schedule.betas)
            .map(|(target, &beta)| Penalty { beta, target })
            .collect();
        let spec = LossSpec {
            terms: vec![LossTerm {
                initial: schedule.initial_state.clone(),
                weight: 1.0,
                objectives: losses.objectives(),
                penalties,
            }],
        };
        let stage = optimize(circuit, &spec, &[(schedule.initial_state.clone(), 1.0)], cfg, stop)?;
        let aborted = stage.aborted.is_some();
        found.push(stage.states[0].clone());
        stages.push(stage);
        if aborted && k + 1 < schedule.circuits.len() {
            break;
        }
    }
    finish(h, stages, found)
}

/// Sequential deflation: state `k` minimizes `<H> + sum_{i<k} beta_i |<psi_i|psi_k>|^2`.
pub fn vqd(
    h: &PauliSum,
    schedule: &VqdSchedule,
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<RunRecord> {
    deflation(h, h, false, schedule, cfg, stop, opts)
}

/// Deflation on `(H - omega)^2`.
pub fn fs_vqd(
    h: &PauliSum,
    omega: f64,
    schedule: &VqdSchedule,
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<RunRecord> {
    deflation(h, &fold(h, omega), true, schedule, cfg, stop, opts)
}

fn subspace(
    h: &PauliSum,
    objective: &PauliSum,
    folded: bool,
    schedule: &SsvqeSchedule,
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<RunRecord> {
    schedule.validate()?;
    check_register(h, &schedule.circuit)?;
    let losses = Losses::new(objective, opts, folded)?;
    let inputs: Vec<(InitialState, f64)> = schedule
        .input_states
        .iter()
        .zip(&schedule.weights)
        .map(|(&b, &w)| (InitialState::Basis(b), w))
        .collect();
    let spec = LossSpec {
        terms: inputs
            .iter()
            .map(|(init, w)| LossTerm {
                initial: init.clone(),
                weight: *w,
                objectives: losses.objectives(),
                penalties: vec![],
            })
            .collect(),
    };
    let stage = optimize(&schedule.circuit, &spec, &inputs, cfg, stop)?;
    let mut states = stage.states.clone();
    if schedule.equal_weights {
        let mut keyed = states
            .into_iter()
            .map(|s| expectation(&s, h).map(|e| (e, s)))
            .collect::<Result<Vec<_>>>()?;
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        states = keyed.into_iter().map(|(_, s)| s).collect();
    }
    finish(h, vec![stage], states)
}

/// One optimization of `sum_j w_j <phi_j|U^+ H U|phi_j>` over orthogonal inputs.
pub fn ssvqe_weighted(
    h: &PauliSum,
    schedule: &SsvqeSchedule,
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<RunRecord> {
    subspace(h, h, false, schedule, cfg, stop, opts)
}

/// Weighted subspace search on `(H - omega)^2`.
pub fn fs_ssvqe(
    h: &PauliSum,
    omega: f64,
    schedule: &SsvqeSchedule,
    cfg: &OptimizerConfig,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<RunRecord> {
    subspace(h, &fold(h, omega), true, schedule, cfg, stop, opts)
}

/// `weight * <(S_z - m_z)^2>` on an untapered interleaved register.
pub fn spin_penalty(state: &StateVector, m_z: f64, weight: f64) -> Result<f64> {
    expectation(state, &spin_penalty_operator(state.n_qubits(), m_z, weight)?)
}

/// Largest pairwise `|<a|b>|^2` among distinct states.
pub fn max_pairwise_overlap(states: &[StateVector]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            worst = worst.max(overlap(a, b)?);
        }
    }
    Ok(worst)
}

/// Lowest `count` basis indices with `n_electrons` set bits and zero net spin
/// (interleaved up/down), optionally restricted further by `accept`.
pub fn sector_inputs(
    n_qubits: usize,
    n_electrons: usize,
    count: usize,
    accept: impl Fn(usize) -> bool,
) -> Result<Vec<usize>> {
    let sector = crate::exact::SectorSpec::new(n_electrons, 0.0);
    let found: Vec<usize> = (0..1usize << n_qubits)
        .filter(|&b| sector.contains(b) && accept(b))
        .take(count)
        .collect();
    if found.len() < count {
        return Err(Error::Sector(format!(
            "only {} sector basis states available, {count} requested",
            found.len()
        )));
    }
    Ok(found)
}
