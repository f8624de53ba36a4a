//! Depth-`p` QAOA and WS-QAOA circuits.
//!
//! Layer `s` applies `U_T(beta_s) U_L(beta_s) U_C(gamma_s)`: the cost phase,
//! then the bias phase (warm start only), then the transverse mixer. The bias
//! layer shares `beta_s` with the mixer. With `alpha = 0` the initial state is
//! `|+>^n` and the bias layer vanishes, which is plain QAOA.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use num_complex::Complex64;

use crate::graph::{Assignment, IsingProblem};
use crate::phase::ProductPhase;
use crate::statevector::{
    bias_diagonal, expectation_diagonal, plus_state, warmstart_initial_state, StateVector,
};

/// Variational angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl ParameterSet {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || betas.len() != gammas.len() {
            return Err(Error::Domain(format!(
                "need p >= 1 betas and gammas of equal length, got {} and {}",
                betas.len(),
                gammas.len()
            )));
        }
        Ok(ParameterSet { betas, gammas })
    }

    pub fn zeros(p: usize) -> Self {
        ParameterSet {
            betas: vec![0.0; p],
            gammas: vec![0.0; p],
        }
    }

    pub fn depth(&self) -> usize {
        self.betas.len()
    }

    /// Flat layout `(beta_1..beta_p, gamma_1..gamma_p)`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.betas.iter().chain(&self.gammas).copied().collect()
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "odd parameter vector length {}",
                flat.len()
            )));
        }
        let (b, g) = flat.split_at(flat.len() / 2);
        ParameterSet::new(b.to_vec(), g.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub alpha: f64,
    pub x0: Option<Assignment>,
    pub p: usize,
}

impl AnsatzSpec {
    pub fn qaoa(p: usize) -> Self {
        AnsatzSpec {
            alpha: 0.0,
            x0: None,
            p,
        }
    }

    pub fn warm_start(x0: Assignment, alpha: f64, p: usize) -> Self {
        AnsatzSpec {
            alpha,
            x0: Some(x0),
            p,
        }
    }

    pub fn with_depth(&self, p: usize) -> Self {
        AnsatzSpec { p, ..self.clone() }
    }

    pub fn is_qaoa(&self) -> bool {
        self.alpha == 0.0
    }
}

/// An ansatz bound to one problem, with the diagonals precomputed.
#[derive(Debug, Clone)]
pub struct Ansatz {
    p: usize,
    initial: StateVector,
    cost: Vec<f64>,
    bias: Option<Vec<f64>>,
    phase: Option<ProductPhase>,
}

impl Ansatz {
    pub fn new(spec: &AnsatzSpec, prob: &IsingProblem) -> Result<Self> {
        if spec.p == 0 {
            return Err(Error::Domain("ansatz depth must be >= 1".into()));
        }
        if !(spec.alpha >= 0.0 && spec.alpha.is_finite()) {
            return Err(Error::Domain(format!(
                "bias strength must be finite and >= 0, got {}",
                spec.alpha
            )));
        }
        let (initial, bias, field) = if spec.is_qaoa() {
            (plus_state(prob.n())?, None, vec![0.0; prob.n()])
        } else {
            let x0 = spec
                .x0
                .as_ref()
                .ok_or(Error::MissingWarmStart(spec.alpha))?;
            if x0.len() != prob.n() {
                return Err(Error::LengthMismatch {
                    expected: prob.n(),
                    found: x0.len(),
                });
            }
            (
                warmstart_initial_state(x0, spec.alpha)?,
                Some(bias_diagonal(x0, spec.alpha)),
                x0.spins().map(|z| -spec.alpha * z).collect(),
            )
        };
        Ok(Ansatz {
            p: spec.p,
            initial,
            cost: prob.diagonal(),
            bias,
            phase: ProductPhase::new(prob, field),
        })
    }

    pub fn depth(&self) -> usize {
        self.p
    }

    pub fn n_qubits(&self) -> usize {
        self.initial.n_qubits()
    }

    /// Diagonal of `H_C`.
    pub fn cost_diagonal(&self) -> &[f64] {
        &self.cost
    }

    /// Smallest eigenvalue of `H_C`, the variational lower bound.
    pub fn ground_energy(&self) -> f64 {
        self.cost.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn check(&self, params: &ParameterSet) -> Result<()> {
        if params.depth() != self.p || params.gammas.len() != self.p {
            return Err(Error::DepthMismatch {
                expected: self.p,
                found: params.depth(),
            });
        }
        Ok(())
    }

    /// Applies the cost and bias phases `exp(-i (gamma H_C + beta H_L))`, or
    /// their inverse, to every state in `states`.
    fn apply_phases(
        &self,
        states: &mut [&mut StateVector],
        beta: f64,
        gamma: f64,
        inverse: bool,
        buf: &mut Vec<Complex64>,
    ) {
        if let Some(phase) = &self.phase {
            phase.fill(gamma, beta, buf);
            for s in states {
                s.multiply_phases(buf, inverse);
            }
            return;
        }
        let sign = if inverse { -1.0 } else { 1.0 };
        for s in states {
            match &self.bias {
                Some(bias) => s.apply_diagonal_pair(&self.cost, sign * gamma, bias, sign * beta),
                None => s.apply_diagonal_phase(&self.cost, sign * gamma),
            }
        }
    }

    pub fn state(&self, params: &ParameterSet) -> Result<StateVector> {
        self.check(params)?;
        let mut s = self.initial.clone();
        let mut buf = Vec::new();
        for (&b, &g) in params.betas.iter().zip(&params.gammas) {
            self.apply_phases(&mut [&mut s], b, g, false, &mut buf);
            s.apply_transverse_mixer(b);
        }
        Ok(s)
    }

    /// `<H_C>` in the ansatz state, offset excluded.
    pub fn objective(&self, params: &ParameterSet) -> Result<f64> {
        Ok(expectation_diagonal(&self.state(params)?, &self.cost))
    }

    /// Objective and its exact gradient by reverse-mode (adjoint) differentiation.
    ///
    /// The gradient is laid out as `(d/d beta_1..p, d/d gamma_1..p)`. For a gate
    /// `exp(-i t G)` the derivative of `<psi|H|psi>` is `2 Im <lambda|G|phi>`
    /// with `phi` the state right after the gate and `lambda` the back-propagated
    /// `H|psi>`.
    pub fn value_and_gradient(&self, params: &ParameterSet) -> Result<(f64, Vec<f64>)> {
        let psi = self.state(params)?;
        Ok(self.backward(params, psi))
    }

    /// Objective together with the final state, for a later [`Self::backward`].
    pub(crate) fn evaluate(&self, params: &ParameterSet) -> Result<(f64, StateVector)> {
        let psi = self.state(params)?;
        Ok((expectation_diagonal(&psi, &self.cost), psi))
    }

    /// Value and gradient given the output state `psi` of `params`.
    pub(crate) fn backward(&self, params: &ParameterSet, mut psi: StateVector) -> (f64, Vec<f64>) {
        let mut lam = psi.clone();
        lam.scale_by_diagonal(&self.cost);
        let value = expectation_diagonal(&psi, &self.cost);

        let p = self.p;
        let mut grad = vec![0.0; 2 * p];
        let mut buf = Vec::new();
        for s in (0..p).rev() {
            let (beta, gamma) = (params.betas[s], params.gammas[s]);
            // H_T = -sum X_i
            grad[s] -= 2.0 * StateVector::unmix_pair(&mut psi, &mut lam, beta).im;
            // cost and bias commute, so both see the state after the fused phase
            grad[p + s] = 2.0 * lam.diagonal_matrix_element(&self.cost, &psi).im;
            if let Some(bias) = &self.bias {
                grad[s] += 2.0 * lam.diagonal_matrix_element(bias, &psi).im;
            }
            if s > 0 {
                self.apply_phases(&mut [&mut psi, &mut lam], beta, gamma, true, &mut buf);
            }
        }
        (value, grad)
    }

    /// Reverses the circuit; used to check unitarity.
    pub fn unapply(&self, state: &mut StateVector, params: &ParameterSet) -> Result<()> {
        self.check(params)?;
        let mut buf = Vec::new();
        for s in (0..self.p).rev() {
            let (b, g) = (params.betas[s], params.gammas[s]);
            state.apply_transverse_mixer(-b);
            self.apply_phases(&mut [state], b, g, true, &mut buf);
        }
        Ok(())
    }
}

pub fn build_state(
    spec: &AnsatzSpec,
    params: &ParameterSet,
    prob: &IsingProblem,
) -> Result<StateVector> {
    Ansatz::new(spec, prob)?.state(params)
}

pub fn objective(spec: &AnsatzSpec, params: &ParameterSet, prob: &IsingProblem) -> Result<f64> {
    Ansatz::new(spec, prob)?.objective(params)
}
