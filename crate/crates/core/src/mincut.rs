//! Weighted graphs as zero-threshold Hopfield networks.
//!
//! With `S[i][j] = w_ij` and `T = 0`, a state `V` splits the vertices into
//! `U = {i : Vᵢ = +1}` and its complement, and
//! `E(V) + 4·cut(U) = 2·Σ w_ij`, so maximizing energy minimizes the cut.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::core::{SpinVector, SquareMatrix};
use crate::dynamics::HopfieldNetwork;
use crate::error::{Error, Result};
use crate::oracle::{check_budget, chunk_ranges, slack_for, GrayWalker, Shortlist, DEFAULT_MAX_DIM};
use crate::spectral::{spectral_heuristic, HeuristicResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Undirected graph with `i < j` on every edge and no repeated pair.
/// Negative weights are allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Endpoints may be given in either order; they are stored as `i < j`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("graph needs at least one vertex".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for (k, (a, b, w)) in edges.into_iter().enumerate() {
            if a == b {
                return Err(Error::InvalidInput(format!("edge {k} is a self-loop on vertex {a}")));
            }
            let (i, j) = (a.min(b), a.max(b));
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!("edge {k} has non-finite weight {w}")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidInput(format!("edge {k} repeats the pair ({i},{j})")));
            }
            out.push(Edge { i, j, w });
        }
        Ok(Self { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().fold(0.0, |acc, e| acc + e.w)
    }

    /// Symmetric weight matrix with zero diagonal.
    pub fn weight_matrix(&self) -> SquareMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for e in &self.edges {
            data[e.i * n + e.j] = e.w;
            data[e.j * n + e.i] = e.w;
        }
        SquareMatrix::from_row_major(n, data).expect("finite weights")
    }

    /// Reads the edge set back from a zero-threshold network; zero entries
    /// are not edges.
    pub fn from_network(net: &HopfieldNetwork) -> Result<Self> {
        let s = net.weights();
        let n = s.n();
        if let Some(i) = (0..n).find(|&i| s.get(i, i) != 0.0) {
            return Err(Error::InvalidInput(format!("network has a self-coupling at node {i}")));
        }
        let edges = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| s.get(i, j) != 0.0)
            .map(|(i, j)| (i, j, s.get(i, j)));
        Self::new(n, edges)
    }
}

/// A vertex bipartition; `side[i]` is true when vertex `i` belongs to `U`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition {
    side: Vec<bool>,
}

impl Partition {
    pub fn new(side: Vec<bool>) -> Self {
        Self { side }
    }

    pub fn side(&self) -> &[bool] {
        &self.side
    }

    pub fn len(&self) -> usize {
        self.side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side.is_empty()
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.side.len()).filter(|&i| self.side[i]).collect()
    }

    pub fn to_spins(&self) -> SpinVector {
        SpinVector::new(self.side.iter().map(|&u| if u { 1 } else { -1 }).collect()).expect("±1")
    }

    /// The same cut described with vertex 0 in `U`.
    pub fn canonical(&self) -> Self {
        state_to_partition(&self.to_spins().canonical())
    }

    pub fn complement(&self) -> Self {
        Self {
            side: self.side.iter().map(|u| !u).collect(),
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_spins().fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutPartition {
    pub partition: Partition,
    pub weight: f64,
}

pub fn graph_to_network(g: &WeightedGraph) -> HopfieldNetwork {
    HopfieldNetwork::with_zero_thresholds(g.weight_matrix()).expect("weight matrix is symmetric")
}

/// `+1` spins form `U`.
pub fn state_to_partition(v: &SpinVector) -> Partition {
    Partition::new(v.spins().iter().map(|&s| s > 0).collect())
}

/// Sum of weights over edges with endpoints on opposite sides.
pub fn cut_weight(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    if p.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: p.len(),
        });
    }
    Ok(g.edges
        .iter()
        .filter(|e| p.side[e.i] != p.side[e.j])
        .fold(0.0, |acc, e| acc + e.w))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicCut {
    pub cut: CutPartition,
    pub search: HeuristicResult,
}

/// Runs the spectral search on the graph's network and reads the cut off
/// the stable state it reaches.
pub fn mincut_heuristic(g: &WeightedGraph) -> Result<HeuristicCut> {
    let search = spectral_heuristic(&graph_to_network(g))?;
    let partition = state_to_partition(&search.state).canonical();
    let weight = cut_weight(g, &partition)?;
    Ok(HeuristicCut {
        cut: CutPartition { partition, weight },
        search,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutScope {
    /// Includes the trivial cut with every vertex in `U`.
    #[default]
    All,
    /// Both sides non-empty.
    NonTrivial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinCutResult {
    /// The minimizer with the lowest partition index.
    pub best: CutPartition,
    /// Every minimizing partition, vertex 0 in `U`, by increasing index.
    pub minimizers: Vec<Partition>,
    pub partitions_scanned: u64,
}

/// Bit `i` of the index is set when vertex `i` is outside `U`.
pub fn partition_index(p: &Partition) -> u64 {
    p.to_spins().to_mask()
}

pub fn brute_force_mincut(g: &WeightedGraph, scope: CutScope) -> Result<MinCutResult> {
    brute_force_mincut_with_limit(g, scope, DEFAULT_MAX_DIM)
}

pub fn brute_force_mincut_with_limit(g: &WeightedGraph, scope: CutScope, limit: usize) -> Result<MinCutResult> {
    let n = g.n();
    check_budget(n, limit)?;
    if scope == CutScope::NonTrivial && n < 2 {
        return Err(Error::InvalidInput(
            "a non-trivial cut needs at least two vertices".into(),
        ));
    }
    let s = g.weight_matrix();
    let total = 1u64 << (n - 1);
    let slack = slack_for(&s);
    let direct = |x: &SpinVector| cut_weight(g, &state_to_partition(x)).expect("dimension matches");

    let lists: Vec<Shortlist> = chunk_ranges(total)
        .into_par_iter()
        .map(|(start, end)| {
            let mut list = Shortlist::new(slack);
            let mut walker = GrayWalker::at(&s, start);
            let mut cut = direct(walker.spins());
            for k in start..end {
                if k > start {
                    match walker.advance() {
                        // Same-side edges at the flipped vertex start crossing.
                        Some((_, spin, field)) => cut += f64::from(spin) * field,
                        None => cut = direct(walker.spins()),
                    }
                }
                if scope == CutScope::All || walker.mask() != 0 {
                    list.offer(walker.mask(), -cut);
                }
            }
            list
        })
        .collect();

    let mut best: Option<f64> = None;
    let mut minimizers = Vec::new();
    for mask in Shortlist::merge(lists, slack) {
        let p = state_to_partition(&SpinVector::from_mask(n, mask));
        let w = cut_weight(g, &p)?;
        if best.is_none_or(|b| w < b) {
            best = Some(w);
            minimizers.clear();
        }
        if best == Some(w) {
            minimizers.push(p);
        }
    }
    let weight = best.expect("at least one partition scanned");
    Ok(MinCutResult {
        best: CutPartition {
            partition: minimizers[0].clone(),
            weight,
        },
        minimizers,
        partitions_scanned: total,
    })
}
