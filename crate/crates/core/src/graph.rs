//! MAX-CUT problem instances.
//!
//! A [`Graph`] is a weighted undirected graph with edges stored as `(i, j, w)`
//! with `i < j`. The cut objective is encoded as the Ising Hamiltonian
//! `H_C = sum w_ij/2 Z_i Z_j` with offset `D = -sum w_ij/2`, so that
//! `C(x) = -(H_C(z) + D)` under `z_i = 1 - 2 x_i`.

use std::collections::HashSet;
use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Largest `n` accepted by [`brute_force_solve`].
pub const ENUMERATION_LIMIT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph, normalising each edge to `i < j`.
    ///
    /// Rejects self-loops, out-of-range endpoints, duplicate pairs and
    /// non-finite weights.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {i}")));
            }
            if j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) has weight {w}"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i}, {j})")));
            }
            out.push(Edge { i, j, w });
        }
        Ok(Graph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }
}

/// Samples a simple 3-regular graph on `n` vertices with i.i.d. weights in `[0, 1)`.
///
/// Uses the pairing (configuration) model: `3n` stubs are shuffled and paired
/// consecutively, and the whole pairing is redrawn whenever it produces a
/// self-loop or a repeated edge. Edges come out sorted by `(i, j)` and weights
/// are drawn in that order.
pub fn generate_w3r(n: usize, seed: u64) -> Result<Graph> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidVertexCount(n));
    }
    let mut rng = seed::rng(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    let pairs = loop {
        stubs.shuffle(&mut rng);
        let mut pairs: Vec<(usize, usize)> = stubs
            .chunks_exact(2)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
            .collect();
        if pairs.iter().any(|&(i, j)| i == j) {
            continue;
        }
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        break pairs;
    };
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(i, j)| (i, j, rng.gen::<f64>()))
        .collect();
    Graph::new(n, edges)
}

/// A bit string `x_0 .. x_{n-1}` with `x_i` in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Domain(format!("bit value {b} is not 0 or 1")));
        }
        Ok(Assignment(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Assignment(vec![0; n])
    }

    /// Decodes basis index `k` (bit `i` of `k` is `x_i`).
    pub fn from_index(k: usize, n: usize) -> Self {
        Assignment((0..n).map(|i| ((k >> i) & 1) as u8).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |k, (i, &b)| k | ((b as usize) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn complement(&self) -> Self {
        Assignment(self.0.iter().map(|b| 1 - b).collect())
    }

    /// Spin values `z_i = 1 - 2 x_i`.
    pub fn spins(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|&b| 1.0 - 2.0 * b as f64)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Domain(format!("invalid bit character {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Assignment)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

pub fn evaluate_cut(g: &Graph, x: &Assignment) -> Result<f64> {
    check_len(g.n, x.len())?;
    let b = x.bits();
    Ok(g.edges
        .iter()
        .filter(|e| b[e.i] != b[e.j])
        .map(|e| e.w)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub strength: f64,
}

/// `H_C = sum J_ij Z_i Z_j` plus the constant offset `D` that is left off it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingProblem {
    n: usize,
    couplings: Vec<Coupling>,
    offset: f64,
}

impl IsingProblem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Energy of basis index `k`.
    pub fn energy_of_index(&self, k: usize) -> f64 {
        self.couplings
            .iter()
            .map(|c| {
                if ((k >> c.i) ^ (k >> c.j)) & 1 == 0 {
                    c.strength
                } else {
                    -c.strength
                }
            })
            .sum()
    }

    /// All `2^n` diagonal entries of `H_C`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..1usize << self.n)
            .map(|k| self.energy_of_index(k))
            .collect()
    }

    /// Cut value corresponding to an Ising energy.
    pub fn cut_from_energy(&self, energy: f64) -> f64 {
        -(energy + self.offset)
    }
}

pub fn ising_from_graph(g: &Graph) -> IsingProblem {
    let couplings = g
        .edges
        .iter()
        .map(|e| Coupling {
            i: e.i,
            j: e.j,
            strength: e.w / 2.0,
        })
        .collect();
    let offset = -g.edges.iter().map(|e| e.w / 2.0).sum::<f64>();
    IsingProblem {
        n: g.n,
        couplings,
        offset,
    }
}

/// `sum J_ij z_i z_j` without the offset.
pub fn ising_energy(p: &IsingProblem, x: &Assignment) -> Result<f64> {
    check_len(p.n, x.len())?;
    let b = x.bits();
    Ok(p.couplings
        .iter()
        .map(|c| {
            if b[c.i] == b[c.j] {
                c.strength
            } else {
                -c.strength
            }
        })
        .sum())
}

/// The exact maximiser of a MAX-CUT instance, up to global complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPair {
    pub solution: Assignment,
    pub max_cut: f64,
    /// Another assignment pair attains `max_cut` as well.
    pub degenerate: bool,
}

impl SolutionPair {
    pub fn complement(&self) -> Assignment {
        self.solution.complement()
    }

    /// Basis indices of the solution and its complement.
    pub fn indices(&self) -> (usize, usize) {
        (self.solution.to_index(), self.complement().to_index())
    }
}

/// Exhaustive search over the `2^(n-1)` assignments with `x_0 = 0`.
///
/// Ties are detected with a relative tolerance of `1e-12`; the canonical
/// representative is the lexicographically smallest maximiser.
pub fn brute_force_solve(g: &Graph) -> Result<SolutionPair> {
    if g.n > ENUMERATION_LIMIT {
        return Err(Error::TooLargeToEnumerate {
            n: g.n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let tol = 1e-12 * g.total_weight().abs().max(1.0);
    let half = 1usize << (g.n - 1);
    let mut best = f64::NEG_INFINITY;
    let mut maximisers: Vec<usize> = Vec::new();
    for m in 0..half {
        // x_0 = 0, x_{i+1} = bit i of m
        let k = m << 1;
        let cut: f64 = g
            .edges
            .iter()
            .filter(|e| ((k >> e.i) ^ (k >> e.j)) & 1 == 1)
            .map(|e| e.w)
            .sum();
        if cut > best + tol {
            best = cut;
            maximisers.clear();
            maximisers.push(k);
        } else if (cut - best).abs() <= tol {
            maximisers.push(k);
        }
    }
    let solution = maximisers
        .iter()
        .map(|&k| Assignment::from_index(k, g.n))
        .min()
        .expect("at least one assignment is enumerated");
    let max_cut = evaluate_cut(g, &solution)?;
    Ok(SolutionPair {
        solution,
        max_cut,
        degenerate: maximisers.len() > 1,
    })
}

/// Flips `d` distinct, uniformly chosen positions of `x`.
pub fn flip_bits(x: &Assignment, d: usize, seed: u64) -> Result<Assignment> {
    let n = x.len();
    if d > n {
        return Err(Error::FlipOutOfRange { d, n });
    }
    let mut rng = seed::rng(seed);
    let mut bits = x.0.clone();
    for pos in index::sample(&mut rng, n, d) {
        bits[pos] ^= 1;
    }
    Ok(Assignment(bits))
}

pub fn hamming_distance(a: &Assignment, b: &Assignment) -> Result<usize> {
    check_len(a.len(), b.len())?;
    Ok(a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count())
}

/// Distance to the closer member of the solution pair.
pub fn pair_distance(a: &Assignment, sol: &SolutionPair) -> Result<usize> {
    let d = hamming_distance(a, &sol.solution)?;
    Ok(d.min(a.len() - d))
}
