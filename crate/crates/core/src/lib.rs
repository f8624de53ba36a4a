//! Statevector simulation of QAOA and warm-start QAOA (WS-QAOA) for weighted
//! MAX-CUT on random 3-regular graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: problem instances, cut values, Ising encoding, exact solutions
//!   and approximate solutions at a controlled Hamming distance.
//! - [`statevector`]: dense `2^n` amplitude kernels.
//! - [`ansatz`]: the depth-`p` QAOA / WS-QAOA circuits and their objective.
//! - [`optimize`]: gradient descent, random-restart (RI) and interpolation
//!   (INTERP) parameter strategies.
//! - [`experiment`]: fidelity sweeps, closed-form initial-state theory,
//!   critical-distance estimation and the QAOA+WS pipeline.
//!
//! Basis index `k` encodes the assignment little-endian: bit `i` of `k` is `x_i`.

pub mod ansatz;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod optimize;
mod phase;
pub mod seed;
pub mod statevector;

pub use ansatz::{build_state, objective, Ansatz, AnsatzSpec, ParameterSet};
pub use error::{Error, Result};
pub use graph::{
    brute_force_solve, evaluate_cut, flip_bits, generate_w3r, hamming_distance, ising_energy,
    ising_from_graph, pair_distance, Assignment, Edge, Graph, IsingProblem, SolutionPair,
};
pub use optimize::{
    gradient, gradient_descent, interp_extend, random_init, run_interp, run_ri, GradientMethod,
    Method, MethodTable, OptResult, OptimizerConfig, StepRule,
};
pub use statevector::{
    expectation_energy, fidelity, plus_state, probabilities, warmstart_initial_state, Distribution,
    StateVector,
};
