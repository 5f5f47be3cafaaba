//! Discrete-time Hopfield dynamics.
//!
//! A network `(S, T)` updates node `i` to `sign(Σⱼ S[i][j]·Vⱼ − Tᵢ)`. In serial
//! mode with a non-negative diagonal the energy `VᵀSV − 2VᵀT` never decreases
//! and every run reaches a stable state; in fully-parallel mode with symmetric
//! `S` every run ends in a fixed point or a cycle of length two.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::core::{energy_unchecked, sign, SpinVector, SquareMatrix, ThresholdVector};
use crate::error::{Error, Result};

/// Full state history is kept only up to this dimension.
pub const FULL_HISTORY_MAX_N: usize = 24;

/// `1000·n`, the sweep budget used when the caller does not pick one.
pub fn default_max_sweeps(n: usize) -> usize {
    1000 * n.max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfieldNetwork {
    weights: SquareMatrix,
    thresholds: ThresholdVector,
}

/// Order in which a serial sweep visits the nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// `0, 1, …, n−1` every sweep.
    #[default]
    RoundRobin,
    /// A fresh permutation per sweep drawn from a ChaCha8 stream seeded with `seed`.
    RandomPermutation { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    Serial(Schedule),
    /// Consecutive groups of `size` nodes (in schedule order) update together.
    /// Neither convergence nor a cycle bound is guaranteed for `1 < size < n`.
    Blocked {
        size: usize,
        schedule: Schedule,
    },
    FullyParallel,
}

impl Default for UpdateMode {
    fn default() -> Self {
        UpdateMode::Serial(Schedule::RoundRobin)
    }
}

/// A single application of the update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Update<'a> {
    Node(usize),
    Nodes(&'a [usize]),
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Outcome {
    FixedPoint(SpinVector),
    TwoCycle(SpinVector, SpinVector),
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// Retained states; `states[k]` is the state after sweep `first_step + k`.
    states: Vec<SpinVector>,
    first_step: usize,
    /// One energy per sweep boundary, starting with the initial state.
    energies: Vec<f64>,
    outcome: Outcome,
    flips: usize,
}

impl Trajectory {
    pub fn states(&self) -> &[SpinVector] {
        &self.states
    }

    /// Sweep index of `states()[0]`; non-zero only when history was truncated.
    pub fn first_step(&self) -> usize {
        self.first_step
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn outcome(&self) -> &Outcome {
        &self.outcome
    }

    /// Number of sweeps (or parallel steps) performed.
    pub fn sweeps(&self) -> usize {
        self.energies.len() - 1
    }

    /// Total number of single-node sign changes over the run.
    pub fn flips(&self) -> usize {
        self.flips
    }

    pub fn final_state(&self) -> &SpinVector {
        self.states.last().expect("trajectory always holds a state")
    }

    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("trajectory always holds an energy")
    }

    pub fn initial_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn is_full_history(&self) -> bool {
        self.first_step == 0 && self.states.len() == self.energies.len()
    }

    pub fn energy_non_decreasing(&self) -> bool {
        self.energies.windows(2).all(|w| w[1] >= w[0])
    }

    /// `step, energy, state` records; the state column is empty for sweeps
    /// whose state was not retained.
    pub fn export_lines(&self) -> Vec<String> {
        self.energies
            .iter()
            .enumerate()
            .map(|(step, e)| {
                let state = step
                    .checked_sub(self.first_step)
                    .and_then(|k| self.states.get(k))
                    .map(ToString::to_string)
                    .unwrap_or_default();
                format!("{step}, {e}, {state}")
            })
            .collect()
    }
}

struct History {
    keep_all: bool,
    states: Vec<SpinVector>,
    first_step: usize,
    energies: Vec<f64>,
}

impl History {
    fn new(n: usize, v0: SpinVector, e0: f64) -> Self {
        Self {
            keep_all: n <= FULL_HISTORY_MAX_N,
            states: vec![v0],
            first_step: 0,
            energies: vec![e0],
        }
    }

    fn push(&mut self, v: SpinVector, e: f64) {
        self.states.push(v);
        self.energies.push(e);
        if !self.keep_all && self.states.len() > 2 {
            self.states.remove(0);
            self.first_step += 1;
        }
    }

    fn finish(self, outcome: Outcome, flips: usize) -> Trajectory {
        Trajectory {
            states: self.states,
            first_step: self.first_step,
            energies: self.energies,
            outcome,
            flips,
        }
    }
}

struct SweepOrder {
    order: Vec<usize>,
    rng: Option<ChaCha8Rng>,
}

impl SweepOrder {
    fn new(n: usize, schedule: Schedule) -> Self {
        let rng = match schedule {
            Schedule::RoundRobin => None,
            Schedule::RandomPermutation { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        Self {
            order: (0..n).collect(),
            rng,
        }
    }

    fn next_sweep(&mut self) -> &[usize] {
        if let Some(rng) = self.rng.as_mut() {
            self.order.shuffle(rng);
        }
        &self.order
    }
}

impl HopfieldNetwork {
    pub fn new(weights: SquareMatrix, thresholds: ThresholdVector) -> Result<Self> {
        weights.check_len(thresholds.len())?;
        weights.check_symmetric()?;
        Ok(Self { weights, thresholds })
    }

    pub fn with_zero_thresholds(weights: SquareMatrix) -> Result<Self> {
        let n = weights.n();
        Self::new(weights, ThresholdVector::zeros(n))
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn weights(&self) -> &SquareMatrix {
        &self.weights
    }

    pub fn thresholds(&self) -> &ThresholdVector {
        &self.thresholds
    }

    pub fn energy(&self, v: &SpinVector) -> Result<f64> {
        energy_unchecked(&self.weights, &self.thresholds, v)
    }

    /// `Jᵢ = Σⱼ S[i][j]·Vⱼ − Tᵢ`.
    pub fn local_field(&self, v: &SpinVector, i: usize) -> Result<f64> {
        self.check_state(v)?;
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        Ok(self.field(v, i))
    }

    #[inline]
    fn field(&self, v: &SpinVector, i: usize) -> f64 {
        let sum: f64 = self
            .weights
            .row(i)
            .iter()
            .zip(v.spins())
            .map(|(&w, &s)| if s > 0 { w } else { -w })
            .sum();
        sum - self.thresholds.values()[i]
    }

    pub fn step(&self, v: &SpinVector, update: Update<'_>) -> Result<SpinVector> {
        self.check_state(v)?;
        let mut next = v.clone();
        match update {
            Update::Node(i) => {
                if i >= self.n() {
                    return Err(Error::IndexOutOfRange { index: i, n: self.n() });
                }
                next.set(i, sign(self.field(v, i)));
            }
            Update::Nodes(nodes) => {
                if let Some(&i) = nodes.iter().find(|&&i| i >= self.n()) {
                    return Err(Error::IndexOutOfRange { index: i, n: self.n() });
                }
                for &i in nodes {
                    next.set(i, sign(self.field(v, i)));
                }
            }
            Update::Parallel => {
                for i in 0..self.n() {
                    next.set(i, sign(self.field(v, i)));
                }
            }
        }
        Ok(next)
    }

    /// `V == sign(S·V − T)`.
    pub fn is_stable_state(&self, v: &SpinVector) -> Result<bool> {
        self.check_state(v)?;
        Ok((0..self.n()).all(|i| sign(self.field(v, i)) == v.get(i)))
    }

    pub fn run(&self, v0: &SpinVector, mode: UpdateMode, max_sweeps: usize) -> Result<Trajectory> {
        self.check_state(v0)?;
        if max_sweeps == 0 {
            return Err(Error::Precondition("max_sweeps must be at least 1".into()));
        }
        match mode {
            UpdateMode::Serial(schedule) => {
                if let Some(i) = self.weights.diagonal().iter().position(|&d| d < 0.0) {
                    return Err(Error::Precondition(format!(
                        "serial convergence needs a non-negative diagonal, S[{i}][{i}] = {}",
                        self.weights.get(i, i)
                    )));
                }
                Ok(self.run_blocked(v0, 1, schedule, max_sweeps))
            }
            UpdateMode::Blocked { size, schedule } => {
                if size == 0 {
                    return Err(Error::Precondition("block size must be at least 1".into()));
                }
                Ok(self.run_blocked(v0, size, schedule, max_sweeps))
            }
            UpdateMode::FullyParallel => Ok(self.run_parallel(v0, max_sweeps)),
        }
    }

    fn run_blocked(&self, v0: &SpinVector, block: usize, schedule: Schedule, max_sweeps: usize) -> Trajectory {
        let n = self.n();
        let mut order = SweepOrder::new(n, schedule);
        let mut v = v0.clone();
        let mut history = History::new(n, v.clone(), self.energy_of(&v));
        let mut flips = 0;
        let mut next = Vec::with_capacity(block);
        for _ in 0..max_sweeps {
            let mut changed = 0;
            for nodes in order.next_sweep().chunks(block) {
                next.clear();
                next.extend(nodes.iter().map(|&i| sign(self.field(&v, i))));
                for (&i, &s) in nodes.iter().zip(&next) {
                    if v.get(i) != s {
                        v.set(i, s);
                        changed += 1;
                    }
                }
            }
            flips += changed;
            let e = self.energy_of(&v);
            history.push(v.clone(), e);
            if changed == 0 {
                return history.finish(Outcome::FixedPoint(v), flips);
            }
        }
        history.finish(Outcome::StepLimit, flips)
    }

    fn run_parallel(&self, v0: &SpinVector, max_steps: usize) -> Trajectory {
        let n = self.n();
        let mut prev: Option<SpinVector> = None;
        let mut cur = v0.clone();
        let mut history = History::new(n, cur.clone(), self.energy_of(&cur));
        let mut flips = 0;
        for _ in 0..max_steps {
            let next = self.parallel_update(&cur);
            flips += next.spins().iter().zip(cur.spins()).filter(|(a, b)| a != b).count();
            history.push(next.clone(), self.energy_of(&next));
            if next == cur {
                return history.finish(Outcome::FixedPoint(next), flips);
            }
            if prev.as_ref() == Some(&next) {
                return history.finish(Outcome::TwoCycle(next, cur), flips);
            }
            prev = Some(std::mem::replace(&mut cur, next));
        }
        history.finish(Outcome::StepLimit, flips)
    }

    fn parallel_update(&self, v: &SpinVector) -> SpinVector {
        let mut next = v.clone();
        for i in 0..self.n() {
            next.set(i, sign(self.field(v, i)));
        }
        next
    }

    fn energy_of(&self, v: &SpinVector) -> f64 {
        energy_unchecked(&self.weights, &self.thresholds, v).expect("state length checked")
    }

    fn check_state(&self, v: &SpinVector) -> Result<()> {
        self.weights.check_len(v.len())
    }

    /// `(n+1)×(n+1)` matrix whose quadratic form at `(+1, V)` equals the
    /// energy at `V`: node 0 is a clamped bias spin coupled through `−T`.
    pub fn augmented_matrix(&self) -> SquareMatrix {
        let n = self.n();
        let t = self.thresholds.values();
        SquareMatrix::from_fn(n + 1, |i, j| match (i, j) {
            (0, 0) => 0.0,
            (0, j) => -t[j - 1],
            (i, 0) => -t[i - 1],
            (i, j) => self.weights.get(i - 1, j - 1),
        })
        .expect("entries of a valid network are finite")
    }
}
