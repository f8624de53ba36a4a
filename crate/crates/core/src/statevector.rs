//! Dense statevector kernels.
//!
//! Amplitude `k` belongs to the basis state whose bit `i` is `x_i`. Global
//! phases are never normalised away. All kernels mutate in place and are
//! sequential, so results are bitwise reproducible.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Assignment, IsingProblem, SolutionPair};

/// Default memory guard: `2^24` complex doubles are 256 MiB.
pub const DEFAULT_MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    n: usize,
    probs: Vec<f64>,
}

fn check_qubits(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        return Err(Error::QubitLimit { n, limit });
    }
    Ok(())
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

impl StateVector {
    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Domain(format!(
                "{len} amplitudes is not 2^n with n >= 1"
            )));
        }
        Ok(StateVector {
            n: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// The computational basis state `|x>`.
    pub fn basis(x: &Assignment) -> Result<Self> {
        check_qubits(x.len(), DEFAULT_MAX_QUBITS)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << x.len()];
        amps[x.to_index()] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n: x.len(), amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, x: &Assignment) -> Complex64 {
        self.amps[x.to_index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.n, other.n)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `U_C(gamma) = exp(-i gamma H_C)`.
    pub fn apply_cost_phase(&mut self, p: &IsingProblem, gamma: f64) -> Result<()> {
        check_dim(self.n, p.n())?;
        for (k, a) in self.amps.iter_mut().enumerate() {
            *a *= Complex64::cis(-gamma * p.energy_of_index(k));
        }
        Ok(())
    }

    /// `U_T(beta) = exp(-i beta H_T)` with `H_T = -sum X_i`, i.e. `exp(+i beta X)`
    /// on every qubit.
    pub fn apply_transverse_mixer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        for q in 0..self.n {
            rotate_x(&mut self.amps, q, c, s);
        }
    }

    /// `U_L(beta) = exp(-i beta H_L)` with `H_L = -alpha sum (1 - 2 x0_i) Z_i`.
    pub fn apply_bias_phase(&mut self, x0: &Assignment, alpha: f64, beta: f64) -> Result<()> {
        check_dim(self.n, x0.len())?;
        let field = bias_diagonal(x0, alpha);
        self.apply_diagonal_phase(&field, beta);
        Ok(())
    }

    /// Multiplies amplitude `k` by `exp(-i angle diag[k])`.
    pub fn apply_diagonal_phase(&mut self, diag: &[f64], angle: f64) {
        debug_assert_eq!(diag.len(), self.amps.len());
        for (a, &e) in self.amps.iter_mut().zip(diag) {
            *a *= Complex64::cis(-angle * e);
        }
    }

    /// Two commuting diagonal phases fused into one pass.
    pub(crate) fn apply_diagonal_pair(&mut self, d1: &[f64], a1: f64, d2: &[f64], a2: f64) {
        for ((a, &e1), &e2) in self.amps.iter_mut().zip(d1).zip(d2) {
            *a *= Complex64::cis(-(a1 * e1 + a2 * e2));
        }
    }

    /// Multiplies amplitude `k` by `phase[k]`, or by its conjugate.
    pub(crate) fn multiply_phases(&mut self, phase: &[Complex64], conjugate: bool) {
        debug_assert_eq!(phase.len(), self.amps.len());
        if conjugate {
            self.amps
                .iter_mut()
                .zip(phase)
                .for_each(|(a, f)| *a *= f.conj());
        } else {
            self.amps.iter_mut().zip(phase).for_each(|(a, f)| *a *= f);
        }
    }

    /// Multiplies amplitude `k` by the real number `diag[k]` (not unitary).
    pub(crate) fn scale_by_diagonal(&mut self, diag: &[f64]) {
        for (a, &e) in self.amps.iter_mut().zip(diag) {
            *a *= e;
        }
    }

    /// `sum_k conj(self_k) diag_k other_k`.
    pub(crate) fn diagonal_matrix_element(&self, diag: &[f64], other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .zip(diag)
            .map(|((a, b), &e)| a.conj() * b * e)
            .sum()
    }

    /// Undoes the transverse mixer on `phi` and `lam` together and returns
    /// `<lam| sum_i X_i |phi>`, which the mixer leaves unchanged.
    pub(crate) fn unmix_pair(phi: &mut StateVector, lam: &mut StateVector, beta: f64) -> Complex64 {
        debug_assert_eq!(phi.n, lam.n);
        let (s, c) = (-beta).sin_cos();
        let mut total = Complex64::new(0.0, 0.0);
        for q in 0..phi.n {
            let stride = 1usize << q;
            for (pc, lc) in phi
                .amps
                .chunks_exact_mut(2 * stride)
                .zip(lam.amps.chunks_exact_mut(2 * stride))
            {
                let (p0, p1) = pc.split_at_mut(stride);
                let (l0, l1) = lc.split_at_mut(stride);
                for i in 0..stride {
                    let (a, b, x, y) = (p0[i], p1[i], l0[i], l1[i]);
                    total += x.conj() * b + y.conj() * a;
                    p0[i] = Complex64::new(c * a.re - s * b.im, c * a.im + s * b.re);
                    p1[i] = Complex64::new(c * b.re - s * a.im, c * b.im + s * a.re);
                    l0[i] = Complex64::new(c * x.re - s * y.im, c * x.im + s * y.re);
                    l1[i] = Complex64::new(c * y.re - s * x.im, c * y.im + s * x.re);
                }
            }
        }
        total
    }

    pub fn probabilities(&self) -> Distribution {
        Distribution {
            n: self.n,
            probs: self.amps.iter().map(|a| a.norm_sqr()).collect(),
        }
    }
}

/// `(cos b) I + i (sin b) X` on qubit `q`.
fn rotate_x(amps: &mut [Complex64], q: usize, c: f64, s: f64) {
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = Complex64::new(c * x.re - s * y.im, c * x.im + s * y.re);
            *b = Complex64::new(c * y.re - s * x.im, c * y.im + s * x.re);
        }
    }
}

/// Diagonal of `H_L = -alpha sum_i (1 - 2 x0_i) Z_i`.
pub fn bias_diagonal(x0: &Assignment, alpha: f64) -> Vec<f64> {
    let signs: Vec<f64> = x0.spins().collect();
    let n = signs.len();
    (0..1usize << n)
        .map(|k| {
            let field: f64 = signs
                .iter()
                .enumerate()
                .map(|(i, s)| if (k >> i) & 1 == 0 { *s } else { -*s })
                .sum();
            -alpha * field
        })
        .collect()
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let len = probs.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Domain(format!(
                "{len} probabilities is not 2^n with n >= 1"
            )));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Domain(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        Ok(Distribution {
            n: len.trailing_zeros() as usize,
            probs,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: &Assignment) -> f64 {
        self.probs[x.to_index()]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

pub fn plus_state(n: usize) -> Result<StateVector> {
    plus_state_with_limit(n, DEFAULT_MAX_QUBITS)
}

pub fn plus_state_with_limit(n: usize, limit: usize) -> Result<StateVector> {
    check_qubits(n, limit)?;
    let a = (0.5f64).powf(n as f64 / 2.0);
    Ok(StateVector {
        n,
        amps: vec![Complex64::new(a, 0.0); 1 << n],
    })
}

/// Product state with qubit `i` prepared as `R_Y(-pi/2 + (1 - 2 x0_i) atan(alpha)) |0>`,
/// where `R_Y(t) = exp(i t/2 Y)` so `R_Y(t)|0> = cos(t/2)|0> - sin(t/2)|1>`.
pub fn warmstart_initial_state(x0: &Assignment, alpha: f64) -> Result<StateVector> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!(
            "bias strength must be finite and >= 0, got {alpha}"
        )));
    }
    let n = x0.len();
    check_qubits(n, DEFAULT_MAX_QUBITS)?;
    let tilt = alpha.atan();
    let mut amps = Vec::with_capacity(1 << n);
    amps.push(Complex64::new(1.0, 0.0));
    for s in x0.spins() {
        let half = 0.5 * (-std::f64::consts::FRAC_PI_2 + s * tilt);
        let (zero, one) = (half.cos(), -half.sin());
        let len = amps.len();
        amps.extend_from_within(..);
        for a in &mut amps[..len] {
            *a *= zero;
        }
        for a in &mut amps[len..] {
            *a *= one;
        }
    }
    Ok(StateVector { n, amps })
}

pub fn probabilities(s: &StateVector) -> Distribution {
    s.probabilities()
}

/// `<psi| H_C |psi>` without the offset.
pub fn expectation_energy(s: &StateVector, p: &IsingProblem) -> Result<f64> {
    check_dim(s.n, p.n())?;
    Ok(s.amps
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm_sqr() * p.energy_of_index(k))
        .sum())
}

pub(crate) fn expectation_diagonal(s: &StateVector, diag: &[f64]) -> f64 {
    s.amps
        .iter()
        .zip(diag)
        .map(|(a, &e)| a.norm_sqr() * e)
        .sum()
}

/// Combined probability of the solution string and its complement.
pub fn fidelity(s: &StateVector, sol: &SolutionPair) -> Result<f64> {
    check_dim(s.n, sol.solution.len())?;
    let (a, b) = sol.indices();
    Ok(s.amps[a].norm_sqr() + s.amps[b].norm_sqr())
}

pub fn distribution_fidelity(d: &Distribution, sol: &SolutionPair) -> Result<f64> {
    check_dim(d.n, sol.solution.len())?;
    let (a, b) = sol.indices();
    Ok(d.probs[a] + d.probs[b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_w3r, ising_from_graph, Graph};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

    fn bits(v: &[u8]) -> Assignment {
        Assignment::new(v.to_vec()).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn plus_state_values_and_guard() {
        let s = plus_state(1).unwrap();
        for a in s.amplitudes() {
            assert!((a.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        let s = plus_state(2).unwrap();
        assert!(s
            .amplitudes()
            .iter()
            .all(|a| *a == Complex64::new(0.5, 0.0)));
        assert!(plus_state(0).is_err());
        assert!(plus_state(25).is_err());
        assert!(plus_state_with_limit(5, 4).is_err());
    }

    #[test]
    fn warmstart_single_qubit() {
        let s = warmstart_initial_state(&bits(&[0]), 1.0).unwrap();
        let a = s.amplitudes();
        assert!((a[0].re - FRAC_PI_8.cos()).abs() < 1e-15);
        assert!((a[1].re - FRAC_PI_8.sin()).abs() < 1e-15);
        assert!((a[0].norm_sqr() - 0.853_553_390_593_273_8).abs() < 1e-12);
        // x0 = 1 tilts the other way
        let s = warmstart_initial_state(&bits(&[1]), 1.0).unwrap();
        assert!((s.amplitudes()[1].re - FRAC_PI_8.cos()).abs() < 1e-15);
    }

    #[test]
    fn warmstart_at_zero_bias_is_plus() {
        let x0 = bits(&[0, 1, 1, 0, 1]);
        let s = warmstart_initial_state(&x0, 0.0).unwrap();
        let plus = plus_state(5).unwrap();
        for (a, b) in s.amplitudes().iter().zip(plus.amplitudes()) {
            assert!(close(*a, *b, 1e-15));
        }
        assert!(warmstart_initial_state(&x0, -0.1).is_err());
    }

    #[test]
    fn warmstart_probability_of_x0() {
        let x0 = bits(&[1, 0, 0, 1, 1, 0]);
        for alpha in [0.2, 0.4, 1.0, 3.0] {
            let s = warmstart_initial_state(&x0, alpha).unwrap();
            let direct = s.amplitude(&x0).norm_sqr();
            let closed = (FRAC_PI_4 - alpha.atan() / 2.0).cos().powi(12);
            assert!((direct - closed).abs() < 1e-14);
            assert!(s.amplitudes().iter().all(|a| a.re > 0.0 && a.im == 0.0));
            assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cost_phase_examples() {
        let p = ising_from_graph(&Graph::new(2, [(0, 1, 1.0)]).unwrap());
        let mut s = StateVector::basis(&bits(&[0, 0])).unwrap();
        s.apply_cost_phase(&p, PI).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(0.0, -1.0), 1e-15));

        let mut s = plus_state(2).unwrap();
        let before = s.clone();
        s.apply_cost_phase(&p, 0.0).unwrap();
        assert_eq!(s, before);

        let mut s = plus_state(3).unwrap();
        assert!(s.apply_cost_phase(&p, 0.1).is_err());
    }

    #[test]
    fn mixer_special_angles() {
        let x = bits(&[0, 1, 1]);
        let mut s = StateVector::basis(&x).unwrap();
        s.apply_transverse_mixer(0.0);
        assert_eq!(s, StateVector::basis(&x).unwrap());

        // exp(i pi/2 X) = iX on each qubit: |x> -> i^n |x-bar>
        s.apply_transverse_mixer(FRAC_PI_2);
        let phase = Complex64::new(0.0, 1.0).powu(3);
        assert!(close(s.amplitude(&x.complement()), phase, 1e-15));
        assert!((s.amplitude(&x.complement()).norm_sqr() - 1.0).abs() < 1e-15);

        // exp(i pi X) = -I per qubit
        let g = generate_w3r(6, 3).unwrap();
        let mut s = warmstart_initial_state(&Assignment::from_index(13, 6), 0.7).unwrap();
        s.apply_cost_phase(&ising_from_graph(&g), 0.4).unwrap();
        let before = s.clone();
        s.apply_transverse_mixer(PI);
        let sign = (-1.0f64).powi(6);
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!(close(*a, *b * sign, 1e-14));
        }
    }

    #[test]
    fn bias_phase_examples() {
        let x0 = bits(&[0]);
        let mut s = StateVector::basis(&bits(&[0])).unwrap();
        s.apply_bias_phase(&x0, 1.0, FRAC_PI_4).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::cis(FRAC_PI_4), 1e-15));
        let mut s = StateVector::basis(&bits(&[1])).unwrap();
        s.apply_bias_phase(&x0, 1.0, FRAC_PI_4).unwrap();
        assert!(close(s.amplitudes()[1], Complex64::cis(-FRAC_PI_4), 1e-15));

        let start = warmstart_initial_state(&bits(&[1, 0, 1]), 0.5).unwrap();
        let mut s = start.clone();
        s.apply_bias_phase(&bits(&[1, 0, 1]), 0.0, 0.9).unwrap();
        assert_eq!(s, start);
        let mut s = start.clone();
        s.apply_bias_phase(&bits(&[1, 0, 1]), 0.5, 0.0).unwrap();
        assert_eq!(s, start);
    }

    #[test]
    fn expectation_and_fidelity_examples() {
        let g = generate_w3r(8, 11).unwrap();
        let p = ising_from_graph(&g);
        let plus = plus_state(8).unwrap();
        assert!(expectation_energy(&plus, &p).unwrap().abs() < 1e-12);

        let x = Assignment::from_index(77, 8);
        let basis = StateVector::basis(&x).unwrap();
        let e = crate::graph::ising_energy(&p, &x).unwrap();
        assert!((expectation_energy(&basis, &p).unwrap() - e).abs() < 1e-14);

        // K4 unit weights, balanced bipartition: 2 uncut (+0.5) and 4 cut (-0.5)
        let k4 = Graph::new(
            4,
            [
                (0, 1, 1.0),
                (0, 2, 1.0),
                (0, 3, 1.0),
                (1, 2, 1.0),
                (1, 3, 1.0),
                (2, 3, 1.0),
            ],
        )
        .unwrap();
        let s = StateVector::basis(&bits(&[0, 0, 1, 1])).unwrap();
        assert!((expectation_energy(&s, &ising_from_graph(&k4)).unwrap() + 1.0).abs() < 1e-15);

        let sol = SolutionPair {
            solution: x.clone(),
            max_cut: 0.0,
            degenerate: false,
        };
        assert_eq!(fidelity(&basis, &sol).unwrap(), 1.0);
        for n in 1..=20 {
            let sol = SolutionPair {
                solution: Assignment::zeros(n),
                max_cut: 0.0,
                degenerate: false,
            };
            let f = fidelity(&plus_state(n).unwrap(), &sol).unwrap();
            assert!((f - 2f64.powi(1 - n as i32)).abs() <= 1e-14);
        }
    }

    #[test]
    fn probabilities_examples() {
        let d = plus_state(2).unwrap().probabilities();
        assert_eq!(d.probs(), &[0.25; 4]);
        let d = StateVector::basis(&bits(&[1, 0])).unwrap().probabilities();
        assert_eq!(d.probs(), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn adjoint_helpers_match_definitions() {
        let a = warmstart_initial_state(&bits(&[1, 0, 1, 1]), 0.3).unwrap();
        let mut b = plus_state(4).unwrap();
        b.apply_bias_phase(&bits(&[0, 0, 1, 0]), 0.8, 0.37).unwrap();
        b.apply_transverse_mixer(0.21);
        let mut xb = StateVector::from_amplitudes(vec![Complex64::new(0.0, 0.0); 16]).unwrap();
        for q in 0..4 {
            for k in 0..16 {
                xb.amps[k] += b.amps[k ^ (1 << q)];
            }
        }
        let direct = a.inner(&xb).unwrap();
        let (mut phi, mut lam) = (b.clone(), a.clone());
        assert!(close(
            StateVector::unmix_pair(&mut phi, &mut lam, 0.4),
            direct,
            1e-14
        ));
        b.apply_transverse_mixer(-0.4);
        let mut a2 = a.clone();
        a2.apply_transverse_mixer(-0.4);
        assert_eq!(phi, b);
        assert_eq!(lam, a2);
    }
}
