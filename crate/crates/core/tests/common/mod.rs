#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qot::classical::DiscreteMeasure;
use qot::C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Minimum of `Σ plan·|z_i - w_j|²` over every basic solution of the
/// transportation polytope: each choice of `m + n - 1` cells whose marginal
/// system is nonsingular, kept when the solved flows are nonnegative.
pub fn w2_vertex_enumeration(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let (m, n) = (mu.len(), nu.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let k = m + n - 1;
    // row constraints, then the first n - 1 column constraints
    let mut rhs = DVector::<f64>::zeros(k);
    for i in 0..m {
        rhs[i] = mu.weights()[i];
    }
    for j in 0..n - 1 {
        rhs[m + j] = nu.weights()[j];
    }
    let cost = |i: usize, j: usize| (mu.points()[i] - nu.points()[j]).norm_sqr();
    let mut best = f64::INFINITY;
    for subset in combinations(cells.len(), k) {
        let mut a = DMatrix::<f64>::zeros(k, k);
        for (col, &c) in subset.iter().enumerate() {
            let (i, j) = cells[c];
            a[(i, col)] = 1.0;
            if j < n - 1 {
                a[(m + j, col)] = 1.0;
            }
        }
        let lu = a.lu();
        if lu.determinant().abs() < 0.5 {
            continue;
        }
        let Some(x) = lu.solve(&rhs) else { continue };
        if x.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let value: f64 = subset.iter().zip(x.iter()).map(|(&c, &v)| v * cost(cells[c].0, cells[c].1)).sum();
        best = best.min(value);
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..=n - (k - cur.len()) {
            cur.push(s);
            rec(s + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Random measure with exactly `atoms` atoms; `degenerate` uses equal weights
/// on a coarse integer lattice so ties and zero flows show up.
pub fn random_atoms(rng: &mut ChaCha8Rng, atoms: usize, degenerate: bool) -> DiscreteMeasure {
    loop {
        let (points, weights): (Vec<C64>, Vec<f64>) = (0..atoms)
            .map(|_| {
                if degenerate {
                    let z = C64::new(rng.random_range(-2..=2) as f64, rng.random_range(-2..=2) as f64);
                    (z, 1.0)
                } else {
                    let z = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                    (z, rng.random_range(0.05..1.0))
                }
            })
            .unzip();
        let m = DiscreteMeasure::new(points, weights).unwrap();
        if m.len() == atoms {
            return m;
        }
    }
}

/// All oracle instances: every size pair up to 4×4, random and degenerate.
pub fn oracle_instances(seed: u64, per_size: usize) -> Vec<(DiscreteMeasure, DiscreteMeasure)> {
    let mut rng = qot::states::rng_from_seed(seed);
    let mut out = Vec::new();
    for m in 1..=4 {
        for n in 1..=4 {
            for k in 0..per_size {
                let degenerate = k % 2 == 1;
                out.push((random_atoms(&mut rng, m, degenerate), random_atoms(&mut rng, n, degenerate)));
            }
        }
    }
    out
}
