//! Classical outer loop: gradient descent, random-restart (RI) and
//! depth-interpolation (INTERP) strategies.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, AnsatzSpec, ParameterSet};
use crate::error::{Error, Result};
use crate::graph::IsingProblem;
use crate::seed;

/// How `gradient_descent` obtains gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethod {
    /// Exact reverse-mode gradient through the statevector circuit.
    Adjoint,
    /// Central differences with step `fd_step`.
    CentralDifference,
}

/// First trial step of each gradient-descent iteration, before halving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    /// Always `learning_rate`.
    Fixed,
    /// Short Barzilai-Borwein step `s.y / y.y` from the last accepted move
    /// (`s` the move, `y` the change in gradient), falling back to
    /// `learning_rate` when the curvature estimate is not positive.
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    /// Stop once the infinity norm of the gradient drops below this.
    pub grad_threshold: f64,
    pub max_iters: usize,
    pub fd_step: f64,
    /// Number of random initialisations in RI.
    pub restarts: usize,
    pub gradient: GradientMethod,
    pub step_rule: StepRule,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            learning_rate: 0.1,
            grad_threshold: 1e-4,
            max_iters: 5000,
            fd_step: 1e-4,
            restarts: 50,
            gradient: GradientMethod::Adjoint,
            step_rule: StepRule::Spectral,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.learning_rate, "learning_rate")?;
        positive(self.grad_threshold, "grad_threshold")?;
        positive(self.fd_step, "fd_step")?;
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(Error::Domain(
                "max_iters and restarts must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub params: ParameterSet,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm_final: f64,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn central_difference(ansatz: &Ansatz, params: &ParameterSet, h: f64) -> Result<Vec<f64>> {
    let flat = params.to_flat();
    let mut probe = flat.clone();
    let mut grad = Vec::with_capacity(flat.len());
    for k in 0..flat.len() {
        probe[k] = flat[k] + h;
        let up = ansatz.objective(&ParameterSet::from_flat(&probe)?)?;
        probe[k] = flat[k] - h;
        let down = ansatz.objective(&ParameterSet::from_flat(&probe)?)?;
        probe[k] = flat[k];
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

/// Central-difference gradient, ordered `(beta_1..beta_p, gamma_1..gamma_p)`.
pub fn gradient(
    spec: &AnsatzSpec,
    params: &ParameterSet,
    prob: &IsingProblem,
    fd_step: f64,
) -> Result<Vec<f64>> {
    if fd_step.is_nan() || fd_step <= 0.0 {
        return Err(Error::Domain(format!(
            "fd_step must be positive, got {fd_step}"
        )));
    }
    central_difference(&Ansatz::new(spec, prob)?, params, fd_step)
}

fn value_and_gradient(
    ansatz: &Ansatz,
    params: &ParameterSet,
    cfg: &OptimizerConfig,
) -> Result<(f64, Vec<f64>)> {
    match cfg.gradient {
        GradientMethod::Adjoint => ansatz.value_and_gradient(params),
        GradientMethod::CentralDifference => Ok((
            ansatz.objective(params)?,
            central_difference(ansatz, params, cfg.fd_step)?,
        )),
    }
}

/// Trace of accepted objective values, for inspecting the descent.
pub type DescentLog = Vec<f64>;

/// Gradient descent on a prepared ansatz.
///
/// A step is accepted only if it strictly lowers the objective; otherwise the
/// step is halved and retried. Each iteration starts from the step given by
/// [`StepRule`]. If halving underflows without progress the run stops and is
/// reported as not converged.
pub fn descend(
    ansatz: &Ansatz,
    init: &ParameterSet,
    cfg: &OptimizerConfig,
    mut log: Option<&mut DescentLog>,
) -> Result<OptResult> {
    cfg.validate()?;
    let mut params = init.clone();
    let (mut value, mut grad) = value_and_gradient(ansatz, &params, cfg)?;
    if let Some(log) = log.as_deref_mut() {
        log.push(value);
    }
    let mut iterations = 0;
    let min_rate = cfg.learning_rate * f64::EPSILON;
    let mut first_rate = cfg.learning_rate;
    loop {
        let norm = inf_norm(&grad);
        if norm < cfg.grad_threshold || iterations >= cfg.max_iters {
            return Ok(OptResult {
                params,
                objective_value: value,
                iterations,
                converged: norm < cfg.grad_threshold,
                grad_norm_final: norm,
            });
        }
        let flat = params.to_flat();
        let mut rate = first_rate;
        let accepted = loop {
            let trial: Vec<f64> = flat.iter().zip(&grad).map(|(x, g)| x - rate * g).collect();
            let trial = ParameterSet::from_flat(&trial)?;
            let (v, psi) = ansatz.evaluate(&trial)?;
            if v < value {
                break Some((trial, psi));
            }
            rate *= 0.5;
            if rate < min_rate {
                break None;
            }
        };
        let Some((next, psi)) = accepted else {
            return Ok(OptResult {
                params,
                objective_value: value,
                iterations,
                converged: false,
                grad_norm_final: norm,
            });
        };
        params = next;
        let old_grad = std::mem::take(&mut grad);
        (value, grad) = match cfg.gradient {
            GradientMethod::Adjoint => ansatz.backward(&params, psi),
            GradientMethod::CentralDifference => value_and_gradient(ansatz, &params, cfg)?,
        };
        if cfg.step_rule == StepRule::Spectral {
            // s = -rate * g0 and y = g1 - g0, so s.y / y.y = rate * g0.(g0 - g1) / y.y
            let (mut sy, mut yy) = (0.0, 0.0);
            for (g0, g1) in old_grad.iter().zip(&grad) {
                sy += g0 * (g0 - g1);
                yy += (g1 - g0) * (g1 - g0);
            }
            first_rate = if sy > 0.0 {
                rate * sy / yy
            } else {
                cfg.learning_rate
            };
        }
        iterations += 1;
        if let Some(log) = log.as_deref_mut() {
            log.push(value);
        }
    }
}

pub fn gradient_descent(
    spec: &AnsatzSpec,
    init: &ParameterSet,
    prob: &IsingProblem,
    cfg: &OptimizerConfig,
) -> Result<OptResult> {
    descend(&Ansatz::new(spec, prob)?, init, cfg, None)
}

/// Half-width of the initial beta range for a given bias strength.
pub fn beta_range(alpha: f64) -> f64 {
    if alpha == 0.0 {
        FRAC_PI_4
    } else if alpha == 1.0 {
        FRAC_PI_2
    } else {
        PI
    }
}

/// Uniform draws: `beta_s` in `[-r, r)` with `r` from [`beta_range`] and
/// `gamma_s` in `[-2 pi, 2 pi)`.
pub fn random_init(alpha: f64, p: usize, seed: u64) -> ParameterSet {
    let mut rng = seed::rng(seed);
    let r = beta_range(alpha);
    let betas = (0..p).map(|_| rng.gen_range(-r..r)).collect();
    let gammas = (0..p).map(|_| rng.gen_range(-2.0 * PI..2.0 * PI)).collect();
    ParameterSet { betas, gammas }
}

/// Seed of RI restart `r` under `seed`.
pub fn restart_seed(seed: u64, r: usize) -> u64 {
    seed::derive(seed, &[r as u64])
}

pub(crate) fn ri_on(
    ansatz: &Ansatz,
    alpha: f64,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<OptResult> {
    cfg.validate()?;
    let p = ansatz.depth();
    let results = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            descend(
                ansatz,
                &random_init(alpha, p, restart_seed(seed, r)),
                cfg,
                None,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    // first strictly smaller wins, so ties keep the lowest restart index
    Ok(results
        .into_iter()
        .reduce(|best, r| {
            if r.objective_value < best.objective_value {
                r
            } else {
                best
            }
        })
        .expect("restarts >= 1"))
}

/// Best of `cfg.restarts` gradient descents from [`random_init`] draws.
pub fn run_ri(
    spec: &AnsatzSpec,
    prob: &IsingProblem,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<OptResult> {
    ri_on(&Ansatz::new(spec, prob)?, spec.alpha, cfg, seed)
}

/// Depth `q` parameters to depth `q + 1` initial values by linear interpolation,
/// with zero padding at both ends.
pub fn interp_extend(prev: &ParameterSet) -> ParameterSet {
    fn extend(v: &[f64]) -> Vec<f64> {
        let p = v.len() + 1;
        let at = |s: usize| if s == 0 || s == p { 0.0 } else { v[s - 1] };
        (1..=p)
            .map(|s| {
                let w = (s - 1) as f64 / (p - 1) as f64;
                w * at(s - 1) + (1.0 - w) * at(s)
            })
            .collect()
    }
    ParameterSet {
        betas: extend(&prev.betas),
        gammas: extend(&prev.gammas),
    }
}

/// INTERP: RI at depth 1, then one descent per depth from the interpolated
/// previous optimum. Returns results for depths `1..=p_target`.
pub fn run_interp(
    spec: &AnsatzSpec,
    prob: &IsingProblem,
    p_target: usize,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<Vec<OptResult>> {
    if p_target == 0 {
        return Err(Error::Domain("p_target must be >= 1".into()));
    }
    let mut out: Vec<OptResult> = Vec::with_capacity(p_target);
    out.push(run_ri(&spec.with_depth(1), prob, cfg, seed)?);
    for p in 2..=p_target {
        let ansatz = Ansatz::new(&spec.with_depth(p), prob)?;
        let init = interp_extend(&out[p - 2].params);
        out.push(descend(&ansatz, &init, cfg, None)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "RI")]
    Ri,
    #[serde(rename = "INTERP")]
    Interp,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ri => "RI",
            Method::Interp => "INTERP",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ri" => Ok(Method::Ri),
            "interp" => Ok(Method::Interp),
            _ => Err(Error::Domain(format!("unknown method {s:?}"))),
        }
    }
}

/// One row of the method-selection table. `None` fields match anything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRule {
    pub alpha: Option<f64>,
    /// Match only when the warm start is (or is not) the exact solution.
    pub exact_warm_start: Option<bool>,
    pub max_depth: Option<usize>,
    pub method: Method,
}

/// First-match rule table choosing between RI and INTERP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTable {
    pub rules: Vec<MethodRule>,
    pub fallback: Method,
}

impl Default for MethodTable {
    /// QAOA uses INTERP; a warm start at the exact solution uses RI; `alpha = 1`
    /// uses RI up to `p = 3`; everything else uses INTERP.
    fn default() -> Self {
        let rule = |alpha, exact_warm_start, max_depth, method| MethodRule {
            alpha,
            exact_warm_start,
            max_depth,
            method,
        };
        MethodTable {
            rules: vec![
                rule(Some(0.0), None, None, Method::Interp),
                rule(None, Some(true), None, Method::Ri),
                rule(Some(1.0), None, Some(3), Method::Ri),
            ],
            fallback: Method::Interp,
        }
    }
}

impl MethodTable {
    pub fn select(&self, alpha: f64, p: usize, d: usize) -> Method {
        self.rules
            .iter()
            .find(|r| {
                r.alpha.is_none_or(|a| a == alpha)
                    && r.exact_warm_start.is_none_or(|e| e == (d == 0))
                    && r.max_depth.is_none_or(|m| p <= m)
            })
            .map_or(self.fallback, |r| r.method)
    }
}
