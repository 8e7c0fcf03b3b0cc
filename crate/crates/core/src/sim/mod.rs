//! Exact statevector simulation.
//!
//! Amplitudes are a flat array indexed by basis integer; bit `j` of the index is
//! the occupation of qubit `j`.

mod circuit;
mod gate;
mod gradient;
mod operator;
mod state;

pub use circuit::{run, Circuit, CircuitBuilder, InitialState};
pub use gate::{apply_gate, ExcitationFlavor, Gate};
pub use gradient::{gradient, loss, loss_and_gradient, LossEvaluation, LossSpec, LossTerm, Objective, Penalty};
pub use operator::CompiledOperator;
pub use state::{expectation, overlap, variance, StateVector, IMAGINARY_TOL};
