//! Diagonal phase vectors `exp(-i (a H_C + b H_L))` built qubit by qubit.
//!
//! Both Hamiltonians are sums of `ZZ` and `Z` terms, so the phase of index
//! `k + 2^q` (bit `q` set) differs from that of `k` only through the terms
//! touching qubit `q` and lower qubits. Each level is a small lookup table
//! keyed on the lower neighbours' bits, and the whole vector costs two complex
//! products per amplitude instead of one `sin`/`cos` pair.

use num_complex::Complex64;

use crate::graph::IsingProblem;

/// Tables grow as `2^(lower neighbours)`; denser problems use the plain path.
const MAX_LOWER_NEIGHBOURS: usize = 10;

#[derive(Debug, Clone)]
struct Level {
    nbrs: Vec<usize>,
    strengths: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct ProductPhase {
    levels: Vec<Level>,
    /// Longitudinal field `h_q` of `sum_q h_q Z_q`.
    field: Vec<f64>,
}

impl ProductPhase {
    /// `None` when some qubit has too many lower-indexed neighbours.
    pub(crate) fn new(prob: &IsingProblem, field: Vec<f64>) -> Option<Self> {
        let n = prob.n();
        debug_assert_eq!(field.len(), n);
        let mut levels: Vec<Level> = (0..n)
            .map(|_| Level {
                nbrs: Vec::new(),
                strengths: Vec::new(),
            })
            .collect();
        for c in prob.couplings() {
            let (lo, hi) = (c.i.min(c.j), c.i.max(c.j));
            let lv = &mut levels[hi];
            match lv.nbrs.iter().position(|&j| j == lo) {
                Some(t) => lv.strengths[t] += c.strength,
                None => {
                    lv.nbrs.push(lo);
                    lv.strengths.push(c.strength);
                }
            }
        }
        if levels.iter().any(|lv| lv.nbrs.len() > MAX_LOWER_NEIGHBOURS) {
            return None;
        }
        Some(ProductPhase { levels, field })
    }

    /// Writes `exp(-i (a_cost E_k + a_field B_k))` for every index `k` into `out`.
    pub(crate) fn fill(&self, a_cost: f64, a_field: f64, out: &mut Vec<Complex64>) {
        out.clear();
        out.reserve(1 << self.levels.len());
        out.push(Complex64::new(1.0, 0.0));
        let mut table = Vec::new();
        for (q, lv) in self.levels.iter().enumerate() {
            let m = lv.nbrs.len();
            table.clear();
            for pat in 0..1usize << m {
                let coupled: f64 = lv
                    .strengths
                    .iter()
                    .enumerate()
                    .map(|(t, &j)| if (pat >> t) & 1 == 0 { j } else { -j })
                    .sum();
                let angle = a_cost * coupled + a_field * self.field[q];
                table.push(Complex64::cis(-angle));
                table.push(Complex64::cis(angle));
            }
            let half = out.len();
            out.resize(2 * half, Complex64::new(0.0, 0.0));
            let (lo, hi) = out.split_at_mut(half);
            for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let mut pat = 0;
                for (t, &j) in lv.nbrs.iter().enumerate() {
                    pat |= ((k >> j) & 1) << t;
                }
                let v = *a;
                *a = v * table[2 * pat];
                *b = v * table[2 * pat + 1];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_w3r, ising_from_graph};

    #[test]
    fn matches_direct_exponentials() {
        let prob = ising_from_graph(&generate_w3r(8, 3).unwrap());
        let field: Vec<f64> = (0..8).map(|q| 0.3 - 0.1 * q as f64).collect();
        let pp = ProductPhase::new(&prob, field.clone()).unwrap();
        let mut out = Vec::new();
        pp.fill(0.7, -1.3, &mut out);
        for (k, v) in out.iter().enumerate() {
            let b: f64 = (0..8)
                .map(|q| {
                    if (k >> q) & 1 == 0 {
                        field[q]
                    } else {
                        -field[q]
                    }
                })
                .sum();
            let want = Complex64::cis(-(0.7 * prob.energy_of_index(k) - 1.3 * b));
            assert!((v - want).norm() < 1e-13, "k={k}");
        }
    }
}
