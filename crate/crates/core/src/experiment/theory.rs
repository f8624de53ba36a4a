//! Closed forms for the warm-start initial state.
//!
//! With `theta = atan(alpha)`, a qubit whose warm-start bit matches the
//! solution has probability `cos^2(pi/4 - theta/2)` of reading it, and one that
//! does not has `cos^2(pi/4 + theta/2)`. The initial-state fidelity at Hamming
//! distance `d` follows, and equating it with the `alpha = 0` value
//! `2^(1-n)` gives the critical relative distance `d_c / n` on two branches.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// Which curve a [`TheoryPoint`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoryKind {
    F0,
    DcPlus,
    DcMinus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub n: usize,
    pub alpha: f64,
    pub d: f64,
    pub value: f64,
    pub kind: TheoryKind,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )))
    }
}

/// Initial-state fidelity for a real-valued distance `d` in `[0, n]`.
pub fn initial_fidelity_at(n: usize, d: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 || !(0.0..=n as f64).contains(&d) {
        return Err(Error::Domain(format!(
            "need n >= 1 and 0 <= d <= n, got n = {n}, d = {d}"
        )));
    }
    let half = alpha.atan() / 2.0;
    let toward = (FRAC_PI_4 - half).cos();
    let away = (FRAC_PI_4 + half).cos();
    let rest = n as f64 - d;
    Ok(away.powf(2.0 * d) * toward.powf(2.0 * rest) + toward.powf(2.0 * d) * away.powf(2.0 * rest))
}

/// Fidelity of the warm-start initial state when the warm start sits `d` bit
/// flips away from the solution.
pub fn theoretical_initial_fidelity(n: usize, d: usize, alpha: f64) -> Result<f64> {
    if d > n {
        return Err(Error::Domain(format!("d = {d} exceeds n = {n}")));
    }
    initial_fidelity_at(n, d as f64, alpha)
}

/// Critical relative distance `d_c / n` where the initial-state fidelity equals
/// its `alpha = 0` value. The plus branch is the crossing with `d <= n/2`; the
/// two branches sum to one.
pub fn theoretical_dc_over_n(n: usize, alpha: f64, branch: Branch) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("d_c/n needs alpha > 0, got {alpha}")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let theta = alpha.atan();
    let log_delta = (FRAC_PI_4 - theta / 2.0).tan().ln();
    let leading = (FRAC_PI_4.cos() / (FRAC_PI_4 - theta / 2.0).cos()).ln() / log_delta;
    // t = sin^{2n}(pi/2 - theta) = cos^{2n}(theta), kept in log form: it
    // underflows for large n and 1 - sqrt(1 - t) cancels catastrophically.
    let log_t = 2.0 * n as f64 * theta.cos().ln();
    let root = (-log_t.exp_m1()).sqrt();
    let log_plus = root.ln_1p();
    let log_branch = match branch {
        Branch::Plus => log_plus,
        // 1 - r = t / (1 + r)
        Branch::Minus => log_t - log_plus,
    };
    Ok(leading + log_branch / (2.0 * n as f64 * log_delta))
}
