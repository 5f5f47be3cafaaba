//! Symmetric eigendecomposition and the eigenvector-seeded search.
//!
//! The search takes the top eigenvector `z` of the canonical weight matrix,
//! starts serial dynamics from the corner `sign(z)`, and returns the stable
//! state it settles in. A corner `x` projects to `y = x/√n` on the unit
//! sphere, where `yᵀMy ≤ μ_max`; this gives both the `n·μ_max` bound on
//! corner values and the decomposition of `yᵀMy` around the top eigenvector.

use serde::Serialize;

use crate::core::{canonicalize, dot, sign_map, spin_form, SpinVector, SquareMatrix};
use crate::dynamics::{default_max_sweeps, HopfieldNetwork, Outcome, Schedule, Trajectory, UpdateMode};
use crate::error::{Error, Result};

/// Off-diagonal Frobenius tolerance (relative to `max(1, ‖M‖_F)`).
pub const EIGEN_TOL: f64 = 1e-12;
pub const EIGEN_MAX_SWEEPS: usize = 100;
/// Eigenvalues within this distance of the maximum count as tied.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// True when the top eigenvalue is tied within [`DEGENERACY_TOL`].
    pub fn top_is_degenerate(&self) -> bool {
        self.eigenvalues.len() > 1 && self.eigenvalues[0] - self.eigenvalues[1] <= DEGENERACY_TOL
    }

    /// Unit eigenvector of the largest eigenvalue, oriented so its first
    /// non-negligible component is positive.
    pub fn top_eigenvector(&self) -> Vec<f64> {
        let mut v = self.eigenvectors[0].clone();
        if let Some(&first) = v.iter().find(|c| c.abs() > 1e-12) {
            if first < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
        }
        v
    }

    /// `P·D·Pᵀ`.
    pub fn reconstruct(&self) -> SquareMatrix {
        let n = self.n();
        SquareMatrix::from_fn(n, |i, j| {
            self.eigenvalues
                .iter()
                .zip(&self.eigenvectors)
                .map(|(mu, v)| mu * v[i] * v[j])
                .sum()
        })
        .expect("finite spectrum")
    }

    /// Largest `‖M·vₖ − μₖ·vₖ‖∞` over all pairs.
    pub fn max_residual(&self, m: &SquareMatrix) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(mu, v)| {
                let mv = m.mul_vec(v).expect("matching dimension");
                mv.iter().zip(v).fold(0.0f64, |acc, (a, b)| acc.max((a - mu * b).abs()))
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `PᵀP` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, va) in self.eigenvectors.iter().enumerate() {
            for (b, vb) in self.eigenvectors.iter().enumerate().skip(a) {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot(va, vb) - target).abs());
            }
        }
        worst
    }

    /// Coordinates of `y` in the eigenbasis, `c = Pᵀy`.
    pub fn coefficients(&self, y: &[f64]) -> Vec<f64> {
        self.eigenvectors.iter().map(|v| dot(v, y)).collect()
    }
}

/// Cyclic Jacobi rotations on a symmetric matrix.
///
/// Stops once the off-diagonal Frobenius norm drops to `tol·max(1, ‖M‖_F)`;
/// fails with the remaining norm after [`EIGEN_MAX_SWEEPS`] sweeps.
pub fn eigen_decompose(m: &SquareMatrix, tol: f64) -> Result<Spectrum> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "eigen tolerance must be positive, got {tol}"
        )));
    }
    m.check_symmetric()?;
    let n = m.n();
    let mut a: Vec<f64> = m.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let threshold = tol * scale;

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_norm(&a);
    while off > threshold {
        if sweeps == EIGEN_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in (0..n).filter(|&r| r != p && r != q) {
                    let (arp, arq) = (a[r * n + p], a[r * n + q]);
                    let new_p = arp - s * (arq + tau * arp);
                    let new_q = arq + s * (arp - tau * arq);
                    a[r * n + p] = new_p;
                    a[p * n + r] = new_p;
                    a[r * n + q] = new_q;
                    a[q * n + r] = new_q;
                }
                for r in 0..n {
                    let (vrp, vrq) = (v[r * n + p], v[r * n + q]);
                    v[r * n + p] = vrp - s * (vrq + tau * vrp);
                    v[r * n + q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
        off = off_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the rotation order among exact ties.
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&k| a[k * n + k]).collect(),
        eigenvectors: order.iter().map(|&k| (0..n).map(|i| v[i * n + k]).collect()).collect(),
    })
}

/// `y = x/√n`.
pub fn project_to_sphere(x: &SpinVector) -> Vec<f64> {
    let scale = 1.0 / (x.len() as f64).sqrt();
    x.spins().iter().map(|&s| f64::from(s) * scale).collect()
}

/// The three pieces of `yᵀMy` around the top unit eigenvector `x₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereDecomposition {
    pub mu_max: f64,
    /// `2·μ_max·(y − x₀)ᵀx₀`
    pub cross_term: f64,
    /// `(y − x₀)ᵀM(y − x₀)`
    pub residual: f64,
    pub total: f64,
    /// `yᵀMy` evaluated directly, for comparison with `total`.
    pub projected_form: f64,
    /// The top eigenvalue is tied, so `x₀` is not unique.
    pub degenerate: bool,
}

impl SphereDecomposition {
    pub fn identity_error(&self) -> f64 {
        (self.total - self.projected_form).abs()
    }

    pub fn deviation(&self) -> f64 {
        self.cross_term + self.residual
    }
}

/// `yᵀMy` read as `Σ cᵢ²·μᵢ` with `c = Pᵀy`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationView {
    pub coefficients: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub expectation: f64,
    pub projected_form: f64,
}

impl ExpectationView {
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }
}

/// A symmetric matrix together with its spectrum, for repeated per-corner
/// queries.
#[derive(Debug, Clone)]
pub struct SpectralAnalysis {
    matrix: SquareMatrix,
    spectrum: Spectrum,
    top: Vec<f64>,
}

impl SpectralAnalysis {
    pub fn new(m: &SquareMatrix) -> Result<Self> {
        let spectrum = eigen_decompose(m, EIGEN_TOL)?;
        let top = spectrum.top_eigenvector();
        Ok(Self {
            matrix: m.clone(),
            spectrum,
            top,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn top_eigenvector(&self) -> &[f64] {
        &self.top
    }

    /// `n·μ_max`, an upper bound on `xᵀMx` over all corners.
    pub fn corner_value_bound(&self) -> f64 {
        self.matrix.n() as f64 * self.spectrum.max_eigenvalue()
    }

    pub fn decompose(&self, x: &SpinVector) -> Result<SphereDecomposition> {
        self.matrix.check_len(x.len())?;
        let mu = self.spectrum.max_eigenvalue();
        let y = project_to_sphere(x);
        let diff: Vec<f64> = y.iter().zip(&self.top).map(|(a, b)| a - b).collect();
        let cross_term = 2.0 * mu * dot(&diff, &self.top);
        let residual = dot(&diff, &self.matrix.mul_vec(&diff)?);
        Ok(SphereDecomposition {
            mu_max: mu,
            cross_term,
            residual,
            total: mu + cross_term + residual,
            projected_form: projected_form(&self.matrix, x)?,
            degenerate: self.spectrum.top_is_degenerate(),
        })
    }

    pub fn expectation(&self, x: &SpinVector) -> Result<ExpectationView> {
        self.matrix.check_len(x.len())?;
        let coefficients = self.spectrum.coefficients(&project_to_sphere(x));
        let expectation = coefficients
            .iter()
            .zip(self.spectrum.eigenvalues())
            .map(|(c, mu)| c * c * mu)
            .sum();
        Ok(ExpectationView {
            coefficients,
            eigenvalues: self.spectrum.eigenvalues.clone(),
            expectation,
            projected_form: projected_form(&self.matrix, x)?,
        })
    }
}

fn projected_form(m: &SquareMatrix, x: &SpinVector) -> Result<f64> {
    Ok(spin_form(m, x)? / x.len() as f64)
}

pub fn sphere_decompose(m: &SquareMatrix, x: &SpinVector) -> Result<SphereDecomposition> {
    SpectralAnalysis::new(m)?.decompose(x)
}

pub fn expectation_view(m: &SquareMatrix, x: &SpinVector) -> Result<ExpectationView> {
    SpectralAnalysis::new(m)?.expectation(x)
}

pub fn corner_value_bound(m: &SquareMatrix) -> Result<f64> {
    Ok(SpectralAnalysis::new(m)?.corner_value_bound())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicOptions {
    pub schedule: Schedule,
    /// Defaults to `1000·n` when `None`.
    pub max_sweeps: Option<usize>,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        Self {
            schedule: Schedule::RoundRobin,
            max_sweeps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicResult {
    pub state: SpinVector,
    pub energy: f64,
    /// `sign(z)` for the top eigenvector `z` of the canonical weights.
    pub start: SpinVector,
    pub start_energy: f64,
    pub top_eigenvalue: f64,
    pub degenerate_top: bool,
    pub trajectory: Trajectory,
}

pub fn spectral_heuristic(net: &HopfieldNetwork) -> Result<HeuristicResult> {
    spectral_heuristic_with(net, HeuristicOptions::default())
}

/// Eigen step on `canonicalize(S)`; thresholds only enter the serial run.
pub fn spectral_heuristic_with(net: &HopfieldNetwork, opts: HeuristicOptions) -> Result<HeuristicResult> {
    let canonical = canonicalize(net.weights());
    let analysis = SpectralAnalysis::new(canonical.as_matrix())?;
    let start = sign_map(analysis.top_eigenvector());
    let max_sweeps = opts.max_sweeps.unwrap_or_else(|| default_max_sweeps(net.n()));
    let trajectory = net.run(&start, UpdateMode::Serial(opts.schedule), max_sweeps)?;
    let state = match trajectory.outcome() {
        Outcome::FixedPoint(v) => v.clone(),
        _ => return Err(Error::HeuristicIncomplete { max_sweeps }),
    };
    Ok(HeuristicResult {
        energy: trajectory.final_energy(),
        start_energy: trajectory.initial_energy(),
        state,
        start,
        top_eigenvalue: analysis.spectrum().max_eigenvalue(),
        degenerate_top: analysis.spectrum().top_is_degenerate(),
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(rows).unwrap()
    }

    fn spins(s: &str) -> SpinVector {
        s.parse().unwrap()
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> SquareMatrix {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SquareMatrix::from_row_major(n, data).unwrap()
    }

    #[test]
    fn two_by_two_spectrum() {
        let a = m(&[&[0.0, 2.0], &[2.0, 0.0]]);
        let s = eigen_decompose(&a, EIGEN_TOL).unwrap();
        assert!((s.eigenvalues()[0] - 2.0).abs() <= 1e-12);
        assert!((s.eigenvalues()[1] + 2.0).abs() <= 1e-12);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let top = s.top_eigenvector();
        assert!((top[0] - r).abs() <= 1e-12 && (top[1] - r).abs() <= 1e-12);
        let low = &s.eigenvectors()[1];
        assert!((low[0] + low[1]).abs() <= 1e-12 && (low[0].abs() - r).abs() <= 1e-12);
    }

    #[test]
    fn zero_matrix_spectrum() {
        let s = eigen_decompose(&SquareMatrix::zeros(4), EIGEN_TOL).unwrap();
        assert!(s.eigenvalues().iter().all(|&mu| mu == 0.0));
        assert!(s.orthonormality_error() <= 1e-15);
        assert!(s.top_is_degenerate());
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let a = random_symmetric(6, &mut rng);
            let s = eigen_decompose(&a, EIGEN_TOL).unwrap();
            let diff = s
                .reconstruct()
                .as_slice()
                .iter()
                .zip(a.as_slice())
                .fold(0.0f64, |w, (x, y)| w.max((x - y).abs()));
            assert!(diff <= 1e-9, "reconstruction error {diff}");
            assert!(s.max_residual(&a) <= 1e-9);
            assert!(s.orthonormality_error() <= 1e-9);
            assert!(s.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eigen_rejects_bad_input() {
        let skew = m(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(matches!(
            eigen_decompose(&skew, EIGEN_TOL),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(eigen_decompose(&SquareMatrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn sphere_decompose_examples() {
        let a = m(&[&[0.0, 2.0], &[2.0, 0.0]]);
        let d = sphere_decompose(&a, &spins("+-")).unwrap();
        assert!((d.mu_max - 2.0).abs() <= 1e-12);
        assert!((d.cross_term + 4.0).abs() <= 1e-12);
        assert!(d.residual.abs() <= 1e-12);
        assert!((d.total + 2.0).abs() <= 1e-12);
        assert!(d.identity_error() <= 1e-12);

        let d = sphere_decompose(&a, &spins("++")).unwrap();
        assert!(d.cross_term.abs() <= 1e-12 && d.residual.abs() <= 1e-12);
        assert!((d.total - 2.0).abs() <= 1e-12);
        assert!(!d.degenerate);
    }

    #[test]
    fn decomposition_flags_degenerate_top() {
        let d = sphere_decompose(&SquareMatrix::identity(3), &spins("+-+")).unwrap();
        assert!(d.degenerate);
        assert!(d.identity_error() <= 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let a = m(&[&[0.0, 2.0], &[2.0, 0.0]]);
        let e = expectation_view(&a, &spins("++")).unwrap();
        assert!((e.coefficients[0].abs() - 1.0).abs() <= 1e-12 && e.coefficients[1].abs() <= 1e-12);
        assert!((e.expectation - 2.0).abs() <= 1e-12);
        let e = expectation_view(&a, &spins("+-")).unwrap();
        assert!(e.coefficients[0].abs() <= 1e-12 && (e.coefficients[1].abs() - 1.0).abs() <= 1e-12);
        assert!((e.expectation + 2.0).abs() <= 1e-12);
    }

    #[test]
    fn random_expectation_matches_projected_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = random_symmetric(6, &mut rng);
        let analysis = SpectralAnalysis::new(&a).unwrap();
        for _ in 0..10 {
            let x = SpinVector::from_mask(6, rng.gen_range(0..64));
            let e = analysis.expectation(&x).unwrap();
            assert!((e.total_probability() - 1.0).abs() <= 1e-10);
            assert!((e.expectation - e.projected_form).abs() <= 1e-9);
        }
    }

    #[test]
    fn bound_examples() {
        let a = m(&[&[0.0, 2.0], &[2.0, 0.0]]);
        let bound = corner_value_bound(&a).unwrap();
        assert!((bound - 4.0).abs() <= 1e-12);
        assert!((bound - spin_form(&a, &spins("++")).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn heuristic_on_pair_finds_optimum() {
        let net = HopfieldNetwork::with_zero_thresholds(m(&[&[0.0, 2.0], &[2.0, 0.0]])).unwrap();
        let h = spectral_heuristic(&net).unwrap();
        assert_eq!(h.start, spins("++"));
        assert_eq!(h.state, spins("++"));
        assert_eq!(h.energy, 4.0);
        assert!(net.is_stable_state(&h.state).unwrap());
    }

    #[test]
    fn heuristic_reports_step_limit() {
        // Thresholds push every node away from the spectral start `++`, so the
        // first sweep always changes the state.
        let net = HopfieldNetwork::new(
            m(&[&[0.0, 1.0], &[1.0, 0.0]]),
            crate::core::ThresholdVector::new(vec![5.0, 5.0]).unwrap(),
        )
        .unwrap();
        let opts = HeuristicOptions {
            max_sweeps: Some(1),
            ..Default::default()
        };
        assert_eq!(
            spectral_heuristic_with(&net, opts),
            Err(Error::HeuristicIncomplete { max_sweeps: 1 })
        );
        let h = spectral_heuristic(&net).unwrap();
        assert_eq!(h.state, spins("--"));
        assert!(h.energy >= h.start_energy);
    }
}
