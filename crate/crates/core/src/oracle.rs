//! Exhaustive ground truth for small dimensions.
//!
//! `x` and `−x` share their quadratic form, so scans only visit the
//! `2^(n−1)` corners whose first spin is `+1`, in Gray-code order so that each
//! step flips one spin and `M·x` is updated in `O(n)`. Incremental values only
//! shortlist candidates; reported values are always re-evaluated directly
//! with [`spin_form`], so ties are decided on identical evaluation order.

use rayon::prelude::*;
use serde::Serialize;

use crate::core::{spin_form, SpinVector, SquareMatrix};
use crate::dynamics::HopfieldNetwork;
use crate::error::{Error, Result};
use crate::stability::{satisfies, StabilityKind};

/// Largest dimension scanned unless the caller raises the limit.
pub const DEFAULT_MAX_DIM: usize = 22;
/// Hard ceiling imposed by the 64-bit corner masks.
pub const HARD_MAX_DIM: usize = 63;

const RESYNC_EVERY: u64 = 256;
const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub sense: Sense,
    pub optimum_value: f64,
    /// Negation-canonical optimizers in increasing corner-mask order.
    pub optimizers: Vec<SpinVector>,
    pub corners_scanned: u64,
}

/// A corner satisfying a stability predicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableEntry {
    /// The canonical representative when it qualifies, otherwise its negation.
    pub vector: SpinVector,
    pub value: f64,
    /// Whether `−vector` also qualifies. It can fail to only when some field
    /// component is exactly zero.
    pub negation_also: bool,
}

pub(crate) fn check_budget(n: usize, limit: usize) -> Result<()> {
    let limit = limit.min(HARD_MAX_DIM);
    if n > limit {
        return Err(Error::Budget { n, limit });
    }
    Ok(())
}

#[inline]
pub(crate) fn canonical_mask(k: u64) -> u64 {
    (k ^ (k >> 1)) << 1
}

/// Walks canonical corners in Gray-code order, maintaining `x` and `M·x`.
pub(crate) struct GrayWalker<'a> {
    m: &'a SquareMatrix,
    k: u64,
    x: SpinVector,
    mx: Vec<f64>,
}

impl<'a> GrayWalker<'a> {
    pub(crate) fn at(m: &'a SquareMatrix, k: u64) -> Self {
        let x = SpinVector::from_mask(m.n(), canonical_mask(k));
        let mx = m.mul_spins(&x).expect("walker dimension matches");
        Self { m, k, x, mx }
    }

    pub(crate) fn mask(&self) -> u64 {
        canonical_mask(self.k)
    }

    pub(crate) fn spins(&self) -> &SpinVector {
        &self.x
    }

    pub(crate) fn field(&self) -> &[f64] {
        &self.mx
    }

    /// Moves to the next corner. Returns the flipped index with its spin and
    /// field before the flip, or `None` if `M·x` was recomputed from scratch.
    pub(crate) fn advance(&mut self) -> Option<(usize, i8, f64)> {
        self.k += 1;
        let bit = self.k.trailing_zeros() as usize + 1;
        let (old_spin, old_field) = (self.x.get(bit), self.mx[bit]);
        self.x.flip(bit);
        if self.k.is_multiple_of(RESYNC_EVERY) {
            self.mx = self.m.mul_spins(&self.x).expect("walker dimension matches");
            return None;
        }
        let delta = -2.0 * f64::from(old_spin);
        for (f, &w) in self.mx.iter_mut().zip(self.m.row(bit)) {
            *f += delta * w;
        }
        Some((bit, old_spin, old_field))
    }
}

/// Masks whose approximate score is within `slack` of the best seen.
pub(crate) struct Shortlist {
    slack: f64,
    best: f64,
    items: Vec<(u64, f64)>,
    prune_at: usize,
}

impl Shortlist {
    pub(crate) fn new(slack: f64) -> Self {
        Self {
            slack,
            best: f64::NEG_INFINITY,
            items: Vec::new(),
            prune_at: 1 << 16,
        }
    }

    #[inline]
    pub(crate) fn offer(&mut self, mask: u64, score: f64) {
        if score < self.best - self.slack {
            return;
        }
        if score > self.best {
            self.best = score;
        }
        self.items.push((mask, score));
        if self.items.len() >= self.prune_at {
            self.prune();
            self.prune_at = self.prune_at.max(2 * self.items.len());
        }
    }

    fn prune(&mut self) {
        let floor = self.best - self.slack;
        self.items.retain(|&(_, s)| s >= floor);
    }

    pub(crate) fn merge(lists: Vec<Shortlist>, slack: f64) -> Vec<u64> {
        let best = lists.iter().map(|l| l.best).fold(f64::NEG_INFINITY, f64::max);
        let floor = best - slack;
        let mut masks: Vec<u64> = lists
            .into_iter()
            .flat_map(|l| l.items)
            .filter(|&(_, s)| s >= floor)
            .map(|(m, _)| m)
            .collect();
        masks.sort_unstable();
        masks
    }
}

pub(crate) fn slack_for(m: &SquareMatrix) -> f64 {
    1e-9 * (m.as_slice().iter().map(|v| v.abs()).sum::<f64>() + 1.0)
}

/// Splits `0..total` into chunk ranges processed in parallel.
pub(crate) fn chunk_ranges(total: u64) -> Vec<(u64, u64)> {
    (0..total.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(total)))
        .collect()
}

pub fn brute_force_optimum(m: &SquareMatrix, sense: Sense) -> Result<OracleResult> {
    brute_force_optimum_with_limit(m, sense, DEFAULT_MAX_DIM)
}

pub fn brute_force_optimum_with_limit(m: &SquareMatrix, sense: Sense, limit: usize) -> Result<OracleResult> {
    let n = m.n();
    check_budget(n, limit)?;
    m.check_symmetric()?;
    let total = 1u64 << (n - 1);
    let slack = slack_for(m);
    let orient = match sense {
        Sense::Max => 1.0,
        Sense::Min => -1.0,
    };
    let diag = m.diagonal();

    let lists: Vec<Shortlist> = chunk_ranges(total)
        .into_par_iter()
        .map(|(start, end)| {
            let mut list = Shortlist::new(slack);
            let mut walker = GrayWalker::at(m, start);
            let direct = |w: &GrayWalker| dot_spins(w.spins(), w.field());
            let mut value = direct(&walker);
            list.offer(walker.mask(), orient * value);
            for _ in start + 1..end {
                match walker.advance() {
                    Some((bit, spin, field)) => {
                        value += -4.0 * f64::from(spin) * field + 4.0 * diag[bit];
                    }
                    None => value = direct(&walker),
                }
                list.offer(walker.mask(), orient * value);
            }
            list
        })
        .collect();

    let mut best: Option<f64> = None;
    let mut optimizers = Vec::new();
    for mask in Shortlist::merge(lists, slack) {
        let x = SpinVector::from_mask(n, mask);
        let v = spin_form(m, &x)?;
        let better = match best {
            None => true,
            Some(b) => orient * v > orient * b,
        };
        if better {
            best = Some(v);
            optimizers.clear();
        }
        if best == Some(v) {
            optimizers.push(x);
        }
    }
    Ok(OracleResult {
        sense,
        optimum_value: best.expect("at least one corner scanned"),
        optimizers,
        corners_scanned: total,
    })
}

fn dot_spins(x: &SpinVector, v: &[f64]) -> f64 {
    x.spins().iter().zip(v).map(|(&s, &f)| if s > 0 { f } else { -f }).sum()
}

pub fn enumerate_stable_vectors(m: &SquareMatrix, kind: StabilityKind) -> Result<Vec<StableEntry>> {
    enumerate_stable_vectors_with_limit(m, kind, DEFAULT_MAX_DIM)
}

pub fn enumerate_stable_vectors_with_limit(
    m: &SquareMatrix,
    kind: StabilityKind,
    limit: usize,
) -> Result<Vec<StableEntry>> {
    let n = m.n();
    check_budget(n, limit)?;
    m.check_symmetric()?;
    let total = 1u64 << (n - 1);
    let slack = slack_for(m);
    let orient: i8 = match kind {
        StabilityKind::Stable => 1,
        StabilityKind::AntiStable => -1,
    };

    // A corner passes the incremental screen if every component either
    // matches or has a field too close to zero to trust.
    let plausible = |x: &SpinVector, field: &[f64], negate: bool| {
        x.spins().iter().zip(field).all(|(&s, &f)| {
            let (s, f) = if negate { (-s, -f) } else { (s, f) };
            f.abs() <= slack || orient * crate::core::sign(f) == s
        })
    };

    let mut masks: Vec<u64> = chunk_ranges(total)
        .into_par_iter()
        .flat_map_iter(|(start, end)| {
            let mut walker = GrayWalker::at(m, start);
            let mut hits = Vec::new();
            for k in start..end {
                if k > start {
                    walker.advance();
                }
                let (x, f) = (walker.spins(), walker.field());
                if plausible(x, f, false) || plausible(x, f, true) {
                    hits.push(walker.mask());
                }
            }
            hits
        })
        .collect();
    masks.sort_unstable();

    let mut entries = Vec::new();
    for mask in masks {
        let x = SpinVector::from_mask(n, mask);
        let neg = x.negated();
        let (pos_ok, neg_ok) = (satisfies(m, &x, kind)?, satisfies(m, &neg, kind)?);
        let vector = match (pos_ok, neg_ok) {
            (true, _) => x,
            (false, true) => neg,
            (false, false) => continue,
        };
        entries.push(StableEntry {
            value: spin_form(m, &vector)?,
            vector,
            negation_also: pos_ok && neg_ok,
        });
    }
    // Stable sort keeps increasing mask order among equal values.
    entries.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyOptimum {
    pub value: f64,
    /// All maximizing states (not negation-reduced: thresholds break the
    /// `±V` symmetry).
    pub maximizers: Vec<SpinVector>,
}

/// Exact maximum of `VᵀSV − 2VᵀT`, found by scanning the bias-augmented
/// matrix of dimension `n + 1`.
pub fn max_energy(net: &HopfieldNetwork, limit: usize) -> Result<EnergyOptimum> {
    check_budget(net.n() + 1, limit)?;
    let aug = net.augmented_matrix();
    let result = brute_force_optimum_with_limit(&aug, Sense::Max, limit)?;
    let strip = |x: &SpinVector| SpinVector::new(x.spins()[1..].to_vec()).expect("valid spins");
    let mut maximizers: Vec<SpinVector> = result.optimizers.iter().map(strip).collect();
    if net.thresholds().is_zero() {
        let negated: Vec<SpinVector> = maximizers.iter().map(SpinVector::negated).collect();
        maximizers.extend(negated);
        maximizers.sort();
        maximizers.dedup();
    }
    Ok(EnergyOptimum {
        value: result.optimum_value,
        maximizers,
    })
}
