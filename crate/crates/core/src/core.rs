//! Domain types for quadratic forms over the ±1 hypercube.
//!
//! Everything downstream consumes a [`CanonicalMatrix`]: any square matrix `B`
//! has the same hypercube quadratic form as its symmetric part, and the
//! diagonal only contributes the constant `trace`, so `(B + Bᵀ)/2` with the
//! diagonal zeroed is a lossless normal form for optimization purposes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when a matrix is required to be symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense real `n × n` matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Builds a matrix from `f(i, j)`. Entries must be finite.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(n, data)
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry {} at ({},{})",
                data[k],
                k / n,
                k % n
            )));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok(self
            .rows()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `M·x` for a spin vector; each term is `±M[i][j]`, so no rounding occurs
    /// in the products.
    pub fn mul_spins(&self, x: &SpinVector) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok(self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(x.spins())
                    .map(|(&a, &s)| if s > 0 { a } else { -a })
                    .sum()
            })
            .collect())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other.n)?;
        Ok(Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }

    /// Fails with the first offending pair when `|a_ij − a_ji|` exceeds
    /// [`SYMMETRY_TOL`] relative to the largest entry.
    pub fn check_symmetric(&self) -> Result<()> {
        let tol = SYMMETRY_TOL * self.max_abs().max(1.0);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let (upper, lower) = (self.get(i, j), self.get(j, i));
                if (upper - lower).abs() > tol {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        upper,
                        lower,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.check_symmetric().is_ok()
    }
}

/// Symmetric matrix with an all-zero diagonal: the normal form for hypercube
/// optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalMatrix(SquareMatrix);

impl CanonicalMatrix {
    /// Accepts `m` only if it is already exactly symmetric with zero diagonal.
    pub fn new(m: SquareMatrix) -> Result<Self> {
        let n = m.n();
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidInput(format!(
                    "canonical matrix needs a zero diagonal, entry ({i},{i}) = {}",
                    m.get(i, i)
                )));
            }
            for j in (i + 1)..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        upper: m.get(i, j),
                        lower: m.get(j, i),
                    });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn as_matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.0
    }
}

impl AsRef<SquareMatrix> for CanonicalMatrix {
    fn as_ref(&self) -> &SquareMatrix {
        &self.0
    }
}

impl AsRef<SquareMatrix> for SquareMatrix {
    fn as_ref(&self) -> &SquareMatrix {
        self
    }
}

/// Strictly lower-triangular matrix carrying the same quadratic form as the
/// canonical matrix it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraMatrix(SquareMatrix);

impl VolterraMatrix {
    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn as_matrix(&self) -> &SquareMatrix {
        &self.0
    }
}

/// A corner of the hypercube `{−1, +1}ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(k) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput(format!("spin {k} is {}, expected ±1", spins[k])));
        }
        Ok(Self(spins))
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Corner with spin `i` equal to −1 exactly when bit `i` of `mask` is set.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self((0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    /// Inverse of [`SpinVector::from_mask`]. Only meaningful for `n ≤ 64`.
    pub fn to_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 0)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn set(&mut self, i: usize, spin: i8) {
        debug_assert!(spin == 1 || spin == -1);
        self.0[i] = spin;
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    /// Representative of `{x, −x}` whose first component is `+1`.
    pub fn canonical(&self) -> Self {
        match self.0.first() {
            Some(&s) if s < 0 => self.negated(),
            _ => self.clone(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.0.first().is_none_or(|&s| s > 0)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| f64::from(s)).collect()
    }

    pub fn dot(&self, other: &Self) -> i64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| i64::from(a) * i64::from(b))
            .sum()
    }
}

impl fmt::Display for SpinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for SpinVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::InvalidInput(format!(
                    "unexpected character {other:?} in spin string"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl Serialize for SpinVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Per-node thresholds of a Hopfield network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdVector(Vec<f64>);

impl ThresholdVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite threshold {} at index {k}",
                values[k]
            )));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&t| t == 0.0)
    }
}

/// `(B + Bᵀ)/2` with the diagonal set to zero.
pub fn canonicalize(b: &SquareMatrix) -> CanonicalMatrix {
    let n = b.n();
    let mut c = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (b.get(i, j) + b.get(j, i)) / 2.0;
            c.data[i * n + j] = v;
            c.data[j * n + i] = v;
        }
    }
    CanonicalMatrix(c)
}

/// Strictly lower-triangular `Ṽ` with `Ṽ[i][j] = 2·C[i][j]` for `i > j`.
pub fn volterra_form(c: &CanonicalMatrix) -> VolterraMatrix {
    let n = c.n();
    let mut v = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            v.data[i * n + j] = 2.0 * c.0.get(i, j);
        }
    }
    VolterraMatrix(v)
}

/// `Σᵢⱼ xᵢ M[i][j] xⱼ`, summed row by row.
pub fn quadratic_form(m: &SquareMatrix, x: &[f64]) -> Result<f64> {
    let mx = m.mul_vec(x)?;
    Ok(x.iter().zip(&mx).map(|(a, b)| a * b).sum())
}

/// Quadratic form at a corner. Values for `x` and `−x` are bitwise identical.
pub fn spin_form(m: &SquareMatrix, x: &SpinVector) -> Result<f64> {
    let mx = m.mul_spins(x)?;
    Ok(x.spins()
        .iter()
        .zip(&mx)
        .map(|(&s, &v)| if s > 0 { v } else { -v })
        .sum())
}

/// Hopfield energy `VᵀSV − 2VᵀT`.
pub fn energy(s: &SquareMatrix, t: &ThresholdVector, v: &SpinVector) -> Result<f64> {
    s.check_len(t.len())?;
    s.check_symmetric()?;
    energy_unchecked(s, t, v)
}

pub(crate) fn energy_unchecked(s: &SquareMatrix, t: &ThresholdVector, v: &SpinVector) -> Result<f64> {
    let form = spin_form(s, v)?;
    let linear: f64 = v
        .spins()
        .iter()
        .zip(t.values())
        .map(|(&s, &t)| if s > 0 { t } else { -t })
        .sum();
    Ok(form - 2.0 * linear)
}

/// Component-wise sign with `sign(0) = +1`.
pub fn sign_map(v: &[f64]) -> SpinVector {
    SpinVector(v.iter().map(|&x| sign(x)).collect())
}

#[inline]
pub fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// `‖u‖·‖Bu‖`, an upper bound on `uᵀBu`.
pub fn cauchy_schwarz_bound(b: &SquareMatrix, u: &[f64]) -> Result<f64> {
    let bu = b.mul_vec(u)?;
    Ok(norm(u) * norm(&bu))
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(rows).unwrap()
    }

    fn spins(s: &str) -> SpinVector {
        s.parse().unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(&m(&[&[1.0, 3.0], &[1.0, 2.0]]));
        assert_eq!(c.as_matrix(), &m(&[&[0.0, 2.0], &[2.0, 0.0]]));

        let c = canonicalize(&m(&[&[0.0, 1.0], &[-1.0, 0.0]]));
        assert_eq!(c.as_matrix(), &SquareMatrix::zeros(2));

        let c = canonicalize(&SquareMatrix::identity(3));
        assert_eq!(c.as_matrix(), &SquareMatrix::zeros(3));
    }

    #[test]
    fn non_finite_entries_are_rejected() {
        let err = SquareMatrix::from_rows(&[[1.0, f64::NAN], [0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        assert!(SquareMatrix::from_rows(&[[f64::INFINITY]]).is_err());
    }

    #[test]
    fn canonical_matrix_validates() {
        assert!(CanonicalMatrix::new(SquareMatrix::identity(2)).is_err());
        assert!(CanonicalMatrix::new(m(&[&[0.0, 1.0], &[2.0, 0.0]])).is_err());
        assert!(CanonicalMatrix::new(m(&[&[0.0, 1.0], &[1.0, 0.0]])).is_ok());
    }

    #[test]
    fn volterra_examples() {
        let c = CanonicalMatrix::new(m(&[&[0.0, 2.0], &[2.0, 0.0]])).unwrap();
        assert_eq!(volterra_form(&c).as_matrix(), &m(&[&[0.0, 0.0], &[4.0, 0.0]]));
        let z = CanonicalMatrix::new(SquareMatrix::zeros(2)).unwrap();
        assert_eq!(volterra_form(&z).as_matrix(), &SquareMatrix::zeros(2));
    }

    #[test]
    fn quadratic_form_examples() {
        let a = m(&[&[0.0, 2.0], &[2.0, 0.0]]);
        assert_eq!(quadratic_form(&a, &[1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(quadratic_form(&a, &[1.0, -1.0]).unwrap(), -4.0);

        let b = m(&[&[1.0, 3.0], &[1.0, 2.0]]);
        assert_eq!(quadratic_form(&b, &[1.0, 1.0]).unwrap(), 7.0);
        let sym = b.add(&b.transpose()).unwrap().scale(0.5);
        assert_eq!(quadratic_form(&sym, &[1.0, 1.0]).unwrap(), 7.0);

        assert!(matches!(
            quadratic_form(&a, &[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn energy_examples() {
        let s = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let zero = ThresholdVector::zeros(2);
        let t = ThresholdVector::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(energy(&s, &zero, &spins("++")).unwrap(), 2.0);
        assert_eq!(energy(&s, &t, &spins("++")).unwrap(), 0.0);
        assert_eq!(energy(&s, &t, &spins("--")).unwrap(), 4.0);

        let skew = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            energy(&skew, &zero, &spins("++")),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(energy(&s, &ThresholdVector::zeros(3), &spins("++")).is_err());
    }

    #[test]
    fn sign_map_examples() {
        assert_eq!(sign_map(&[0.5, -0.1, 0.0]), spins("+-+"));
        assert_eq!(sign_map(&[0.0, 0.0]), spins("++"));
        let x = spins("+--+-");
        assert_eq!(sign_map(&x.to_f64()), x);
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let a = m(&[&[0.0, 2.0], &[2.0, 0.0]]);
        let bound = cauchy_schwarz_bound(&a, &[1.0, 1.0]).unwrap();
        assert!((bound - 4.0).abs() <= 1e-12);
        assert!((bound - quadratic_form(&a, &[1.0, 1.0]).unwrap()).abs() <= 1e-12);
        assert!((cauchy_schwarz_bound(&a, &[1.0, 0.0]).unwrap() - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn spin_strings_round_trip() {
        let x = spins("+-+");
        assert_eq!(x.spins(), &[1, -1, 1]);
        assert_eq!(x.to_string(), "+-+");
        assert!("+x".parse::<SpinVector>().is_err());
        assert_eq!(SpinVector::from_mask(3, 0b010), x);
        assert_eq!(x.to_mask(), 0b010);
        assert_eq!(x.negated().canonical(), x);
    }

    #[test]
    fn spin_form_is_negation_invariant_bitwise() {
        let a = m(&[&[0.3, -1.7, 0.1], &[-1.7, 0.0, 2.9], &[0.1, 2.9, -0.4]]);
        for mask in 0..8 {
            let x = SpinVector::from_mask(3, mask);
            let v = spin_form(&a, &x).unwrap();
            assert_eq!(v.to_bits(), spin_form(&a, &x.negated()).unwrap().to_bits());
            assert!((v - quadratic_form(&a, &x.to_f64()).unwrap()).abs() <= 1e-12);
        }
    }
}
