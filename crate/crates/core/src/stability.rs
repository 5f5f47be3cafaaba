//! Stable and anti-stable corners of a symmetric matrix.
//!
//! A corner `x` is stable for `M` when `x = sign(Mx)` and anti-stable when
//! `x = −sign(Mx)`; `xᵀMx` is then its stable (anti-stable) value. Unlike
//! eigenvectors, neither kind needs to exist.

use std::fmt;

use serde::Serialize;

use crate::core::{sign, spin_form, SpinVector, SquareMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityKind {
    Stable,
    AntiStable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub vector: SpinVector,
    pub stable: bool,
    pub anti_stable: bool,
    pub value: f64,
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, {}, {}",
            self.vector, self.stable, self.anti_stable, self.value
        )
    }
}

fn field_signs(m: &SquareMatrix, x: &SpinVector) -> Result<Vec<i8>> {
    Ok(m.mul_spins(x)?.into_iter().map(sign).collect())
}

pub(crate) fn satisfies(m: &SquareMatrix, x: &SpinVector, kind: StabilityKind) -> Result<bool> {
    let signs = field_signs(m, x)?;
    let flip = match kind {
        StabilityKind::Stable => 1,
        StabilityKind::AntiStable => -1,
    };
    Ok(signs.iter().zip(x.spins()).all(|(&s, &xi)| flip * s == xi))
}

/// `x == sign(Mx)`.
pub fn is_stable_vector(m: &SquareMatrix, x: &SpinVector) -> Result<bool> {
    m.check_symmetric()?;
    satisfies(m, x, StabilityKind::Stable)
}

/// `x == −sign(Mx)`.
pub fn is_anti_stable_vector(m: &SquareMatrix, x: &SpinVector) -> Result<bool> {
    m.check_symmetric()?;
    satisfies(m, x, StabilityKind::AntiStable)
}

pub fn stability_report(m: &SquareMatrix, x: &SpinVector) -> Result<StabilityReport> {
    m.check_symmetric()?;
    Ok(StabilityReport {
        vector: x.clone(),
        stable: satisfies(m, x, StabilityKind::Stable)?,
        anti_stable: satisfies(m, x, StabilityKind::AntiStable)?,
        value: spin_form(m, x)?,
    })
}

/// Pairwise-orthogonal corners of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet {
    dim: usize,
    patterns: Vec<SpinVector>,
}

impl PatternSet {
    pub fn new(patterns: Vec<SpinVector>) -> Result<Self> {
        let dim = match patterns.first() {
            Some(p) if !p.is_empty() => p.len(),
            _ => {
                return Err(Error::InvalidInput(
                    "pattern set must hold at least one non-empty pattern".into(),
                ))
            }
        };
        for (k, p) in patterns.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "pattern {k} has length {}, expected {dim}",
                    p.len()
                )));
            }
        }
        if patterns.len() > dim {
            return Err(Error::InvalidInput(format!(
                "{} orthogonal patterns cannot fit in dimension {dim}",
                patterns.len()
            )));
        }
        for a in 0..patterns.len() {
            for b in (a + 1)..patterns.len() {
                let d = patterns[a].dot(&patterns[b]);
                if d != 0 {
                    return Err(Error::InvalidInput(format!(
                        "patterns {a} and {b} are not orthogonal (inner product {d})"
                    )));
                }
            }
        }
        Ok(Self { dim, patterns })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[SpinVector] {
        &self.patterns
    }
}

/// Rows of the Sylvester–Hadamard matrix of the given order (a power of two).
/// Every row starts with `+1` and distinct rows are orthogonal.
pub fn sylvester_hadamard(order: usize) -> Result<Vec<SpinVector>> {
    if order == 0 || !order.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "Hadamard order {order} is not a power of two"
        )));
    }
    Ok((0..order)
        .map(|r| {
            let spins = (0..order)
                .map(|c| if (r & c).count_ones() % 2 == 0 { 1 } else { -1 })
                .collect();
            SpinVector::new(spins).expect("±1 entries")
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedMemory {
    pub weights: SquareMatrix,
    /// `s == N`: `W·J = 0`, so stability of the stored patterns rests only on
    /// the `sign(0) = +1` convention.
    pub saturated: bool,
}

/// `W = Σₗ (JₗJₗᵀ − I)`, computed in integers.
pub fn synthesize_memory(patterns: &PatternSet) -> SynthesizedMemory {
    let n = patterns.dim();
    let s = patterns.len() as i64;
    let mut w = vec![0i64; n * n];
    for p in patterns.patterns() {
        let x = p.spins();
        for i in 0..n {
            for j in 0..n {
                w[i * n + j] += i64::from(x[i]) * i64::from(x[j]);
            }
        }
    }
    for i in 0..n {
        w[i * n + i] -= s;
    }
    let weights =
        SquareMatrix::from_row_major(n, w.into_iter().map(|v| v as f64).collect()).expect("integer entries are finite");
    SynthesizedMemory {
        weights,
        saturated: patterns.len() == n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "class")]
pub enum EigenCorner {
    StableByEigen {
        eigenvalue: f64,
    },
    AntiStableByEigen {
        eigenvalue: f64,
    },
    /// Not an eigenvector, or an eigenvector of eigenvalue zero.
    NotAnEigenvector,
}

/// Classifies a corner that happens to be an eigenvector by the sign of its
/// eigenvalue `μ = xᵀMx / n`. The eigen test is
/// `‖Mx − μx‖∞ ≤ 1e−9·max(1, ‖Mx‖∞)`.
pub fn eigencorner_stability(m: &SquareMatrix, x: &SpinVector) -> Result<EigenCorner> {
    m.check_symmetric()?;
    let mx = m.mul_spins(x)?;
    let n = x.len() as f64;
    let mu = mx
        .iter()
        .zip(x.spins())
        .map(|(&v, &s)| if s > 0 { v } else { -v })
        .sum::<f64>()
        / n;
    let scale = mx.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-9 * scale;
    let residual = mx
        .iter()
        .zip(x.spins())
        .fold(0.0f64, |a, (&v, &s)| a.max((v - mu * f64::from(s)).abs()));
    Ok(if residual > tol || mu.abs() <= tol {
        EigenCorner::NotAnEigenvector
    } else if mu > 0.0 {
        EigenCorner::StableByEigen { eigenvalue: mu }
    } else {
        EigenCorner::AntiStableByEigen { eigenvalue: mu }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllOnesReport {
    pub report: StabilityReport,
    /// Common row sum `α`, when every row sums to the same value; the all-ones
    /// vector is then an eigenvector for `α` with value `n·α`.
    pub common_row_sum: Option<f64>,
}

/// For a non-negative matrix, the all-ones corner is stable and its value is
/// the sum of all entries.
pub fn all_ones_check(m: &SquareMatrix) -> Result<AllOnesReport> {
    let n = m.n();
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j) < 0.0 {
                return Err(Error::Precondition(format!(
                    "all-ones check needs a non-negative matrix, entry ({i},{j}) = {}",
                    m.get(i, j)
                )));
            }
        }
    }
    let report = stability_report(m, &SpinVector::ones(n))?;
    let sums: Vec<f64> = m.rows().map(|r| r.iter().sum()).collect();
    let tol = 1e-12 * sums.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let common_row_sum = sums.iter().all(|s| (s - sums[0]).abs() <= tol).then_some(sums[0]);
    Ok(AllOnesReport { report, common_row_sum })
}

/// Rank of a set of corners over the reals.
pub fn independent_count(vectors: &[SpinVector]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let n = first.len();
    let mut rows: Vec<Vec<f64>> = vectors.iter().map(SpinVector::to_f64).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..rows.len())
            .filter(|&r| rows[r][col].abs() > 1e-9)
            .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
        else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let factor = row[col] / p[col];
            if factor != 0.0 {
                row.iter_mut().zip(&p).for_each(|(a, b)| *a -= factor * b);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Every component of `√n·v` lies within `tol` of `±1`.
pub fn on_scaled_hypercube(v: &[f64], tol: f64) -> bool {
    let scale = (v.len() as f64).sqrt();
    v.iter().all(|c| ((c * scale).abs() - 1.0).abs() <= tol)
}
