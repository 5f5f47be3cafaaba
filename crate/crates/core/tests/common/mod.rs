#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use spincube::core::{SpinVector, SquareMatrix};
use spincube::mincut::WeightedGraph;

pub fn uniform_matrix(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> SquareMatrix {
    SquareMatrix::from_fn(n, |_, _| rng.gen_range(lo..hi)).unwrap()
}

pub fn symmetric(n: usize, zero_diagonal: bool, rng: &mut ChaCha8Rng) -> SquareMatrix {
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = if i == j && zero_diagonal {
                0.0
            } else {
                rng.gen_range(-1.0..1.0)
            };
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    SquareMatrix::from_row_major(n, data).unwrap()
}

pub fn random_corner(n: usize, rng: &mut ChaCha8Rng) -> SpinVector {
    SpinVector::new((0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()).unwrap()
}

pub fn all_corners(n: usize) -> impl Iterator<Item = SpinVector> {
    (0..1u64 << n).map(move |mask| SpinVector::from_mask(n, mask))
}

pub fn canonical_corners(n: usize) -> impl Iterator<Item = SpinVector> {
    (0..1u64 << (n - 1)).map(move |k| SpinVector::from_mask(n, k << 1))
}

/// Each pair becomes an edge with probability `density`, weight uniform in `lo..hi`.
pub fn random_graph(n: usize, density: f64, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(density) {
                edges.push((i, j, rng.gen_range(lo..hi)));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}
