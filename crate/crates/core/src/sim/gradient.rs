//! Reverse-mode (adjoint) gradients of expectation-value losses.
//!
//! One forward pass and one backward pass per loss term, independent of the
//! number of parameters.

use num_complex::Complex64;
use rayon::prelude::*;

use super::circuit::{run, Circuit, InitialState};
use super::state::inner_slices;
use super::{CompiledOperator, StateVector};
use crate::{Error, Result};

/// How an observable enters the loss.
#[derive(Clone, Copy, Debug)]
pub enum Objective<'a> {
    /// `<O>`.
    Expectation(&'a CompiledOperator),
    /// `sqrt(<O>)`; requires `<O> > 0`.
    SqrtExpectation(&'a CompiledOperator),
}

/// `beta |<target|psi>|^2`.
#[derive(Clone, Copy, Debug)]
pub struct Penalty<'a> {
    pub beta: f64,
    pub target: &'a StateVector,
}

/// One circuit evaluation from a given input, weighted into the loss.
#[derive(Clone, Debug)]
pub struct LossTerm<'a> {
    pub initial: InitialState,
    pub weight: f64,
    pub objectives: Vec<Objective<'a>>,
    pub penalties: Vec<Penalty<'a>>,
}

/// `L = sum_t [ w_t sum_o f_o(<O_o>_t) + sum_p beta_p |<phi_p|psi_t>|^2 ]`.
#[derive(Clone, Debug, Default)]
pub struct LossSpec<'a> {
    pub terms: Vec<LossTerm<'a>>,
}

#[derive(Clone, Debug)]
pub struct LossEvaluation {
    pub loss: f64,
    pub gradient: Vec<f64>,
    /// Output state of each term.
    pub states: Vec<StateVector>,
    /// Raw `<O>` per term and objective, before any square root.
    pub expectations: Vec<Vec<f64>>,
}

struct TermForward {
    value: f64,
    state: StateVector,
    expectations: Vec<f64>,
    costate: Vec<Complex64>,
}

fn forward(circuit: &Circuit, params: &[f64], term: &LossTerm) -> Result<TermForward> {
    let state = run(circuit, params, &term.initial)?;
    let dim = state.dim();
    let mut costate = vec![Complex64::new(0.0, 0.0); dim];
    let mut value = 0.0;
    let mut expectations = Vec::with_capacity(term.objectives.len());
    for obj in &term.objectives {
        let (op, sqrt) = match obj {
            Objective::Expectation(op) => (op, false),
            Objective::SqrtExpectation(op) => (op, true),
        };
        let (e, o_psi) = op.expectation_and_apply(&state)?;
        expectations.push(e);
        let (f, df) = if sqrt {
            if e <= 0.0 {
                return Err(Error::Unsupported(format!(
                    "square-root objective needs a positive expectation, got {e:e}"
                )));
            }
            (e.sqrt(), 0.5 / e.sqrt())
        } else {
            (e, 1.0)
        };
        value += term.weight * f;
        let scale = term.weight * df;
        costate.iter_mut().zip(o_psi.amplitudes()).for_each(|(c, o)| *c += o * scale);
    }
    for p in &term.penalties {
        p.target.check_qubits(state.n_qubits())?;
        let amp = inner_slices(p.target.amplitudes(), state.amplitudes());
        value += p.beta * amp.norm_sqr();
        let scale = amp * p.beta;
        costate.iter_mut().zip(p.target.amplitudes()).for_each(|(c, t)| *c += t * scale);
    }
    Ok(TermForward { value, state, expectations, costate })
}

fn backward(circuit: &Circuit, params: &[f64], fwd: &TermForward) -> Vec<f64> {
    let mut grad = vec![0.0; circuit.n_params()];
    let mut psi = fwd.state.amplitudes().to_vec();
    let mut lam = fwd.costate.clone();
    for g in circuit.gates().iter().rev() {
        let theta = g.slot().map_or(0.0, |s| params[s]);
        if let (Some(slot), Some(a_psi)) = (g.slot(), g.apply_generator(&psi)) {
            // d psi / d theta = -i A psi, and dL/dtheta = 2 Re <lambda| d psi>.
            grad[slot] += 2.0 * inner_slices(&lam, &a_psi).im;
        }
        g.apply_angle(&mut psi, -theta);
        g.apply_angle(&mut lam, -theta);
    }
    grad
}

/// Loss value, gradient, and per-term output states.
pub fn loss_and_gradient(circuit: &Circuit, params: &[f64], spec: &LossSpec) -> Result<LossEvaluation> {
    circuit.check_params(params)?;
    let results: Vec<(TermForward, Vec<f64>)> = spec
        .terms
        .par_iter()
        .map(|t| {
            let fwd = forward(circuit, params, t)?;
            let g = backward(circuit, params, &fwd);
            Ok((fwd, g))
        })
        .collect::<Result<_>>()?;
    let mut eval = LossEvaluation {
        loss: 0.0,
        gradient: vec![0.0; circuit.n_params()],
        states: Vec::with_capacity(results.len()),
        expectations: Vec::with_capacity(results.len()),
    };
    for (fwd, g) in results {
        eval.loss += fwd.value;
        eval.gradient.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        eval.states.push(fwd.state);
        eval.expectations.push(fwd.expectations);
    }
    if !eval.loss.is_finite() || eval.gradient.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numeric("loss or gradient is not finite".into()));
    }
    Ok(eval)
}

pub fn gradient(circuit: &Circuit, params: &[f64], spec: &LossSpec) -> Result<Vec<f64>> {
    Ok(loss_and_gradient(circuit, params, spec)?.gradient)
}

/// Forward pass only.
pub fn loss(circuit: &Circuit, params: &[f64], spec: &LossSpec) -> Result<f64> {
    circuit.check_params(params)?;
    spec.terms
        .iter()
        .map(|t| forward(circuit, params, t).map(|f| f.value))
        .sum()
}
