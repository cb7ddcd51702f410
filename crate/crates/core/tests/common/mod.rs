#![allow(dead_code)]

use iqcalc::{AtomicDistribution, ConvexPwl};
use proptest::prelude::*;
use rand::Rng;

/// Law with up to `max_atoms` atoms at arbitrary locations in `[-r, r]`.
pub fn law_strategy(max_atoms: usize, r: f64) -> impl Strategy<Value = AtomicDistribution> {
    prop::collection::vec((-r..r, 0.01f64..1.0), 1..=max_atoms).prop_map(|atoms| {
        let (xs, ws): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
        AtomicDistribution::from_weighted(&xs, &ws).unwrap()
    })
}

/// Law with atoms on the integer grid `-k..=k` and small integer weights,
/// so that ties between laws are frequent.
pub fn grid_law_strategy(max_atoms: usize, k: i32) -> impl Strategy<Value = AtomicDistribution> {
    prop::collection::vec((-k..=k, 1u32..4), 1..=max_atoms).prop_map(|atoms| {
        let xs: Vec<f64> = atoms.iter().map(|a| a.0 as f64).collect();
        let ws: Vec<f64> = atoms.iter().map(|a| a.1 as f64).collect();
        AtomicDistribution::from_weighted(&xs, &ws).unwrap()
    })
}

/// Convex PWL function with random vertices and tails; either side may be
/// bounded.
pub fn convex_strategy() -> impl Strategy<Value = ConvexPwl> {
    (
        prop::collection::vec(-50.0f64..50.0, 1..8),
        prop::collection::vec(-20.0f64..20.0, 0..8),
        -10.0f64..10.0,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_filter_map("needs distinct breakpoints", |(mut xs, mut ss, y0, bl, br)| {
            xs.sort_by(f64::total_cmp);
            xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let need = xs.len() + 1;
            if ss.len() < need {
                return None;
            }
            ss.truncate(need);
            ss.sort_by(f64::total_cmp);
            let mut ys = vec![y0];
            for i in 1..xs.len() {
                let y = ys[i - 1] + ss[i] * (xs[i] - xs[i - 1]);
                ys.push(y);
            }
            let left = (!bl).then_some(ss[0]);
            let right = (!br).then_some(ss[need - 1]);
            ConvexPwl::new(xs, ys, left, right).ok()
        })
}

/// Random law with at most `max_atoms` atoms, locations uniform in `[-r, r]`.
pub fn random_law<R: Rng>(rng: &mut R, max_atoms: usize, r: f64) -> AtomicDistribution {
    let n = rng.random_range(1..=max_atoms);
    let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-r..=r)).collect();
    let ws: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    AtomicDistribution::from_weighted(&xs, &ws).unwrap()
}

/// Random law on `[0, inf)` with mean at most 1.
pub fn random_ratio_law<R: Rng>(rng: &mut R, max_atoms: usize) -> AtomicDistribution {
    let n = rng.random_range(1..=max_atoms);
    let xs: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.15) {
                0.0
            } else {
                rng.random_range(0.0..4.0)
            }
        })
        .collect();
    let ws: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let d = AtomicDistribution::from_weighted(&xs, &ws).unwrap();
    let m = d.mean();
    let target = if rng.random_bool(0.3) {
        1.0
    } else {
        rng.random_range(0.2..1.0)
    };
    let scale = if m > 0.0 { target / m } else { 1.0 };
    let xs: Vec<f64> = d.locations().iter().map(|x| x * scale).collect();
    AtomicDistribution::from_weighted(&xs, d.masses()).unwrap()
}

/// A law `mu0 <=cx mu`: conditional expectations of `mu` over a random
/// partition of its atoms.
pub fn random_cx_pair<R: Rng>(rng: &mut R, max_atoms: usize) -> (AtomicDistribution, AtomicDistribution) {
    let n = rng.random_range(1..=max_atoms);
    let xs: Vec<f64> = (0..n)
        .map(|_| rng.random_range(-5i32..=5) as f64 + rng.random_range(0.0..1.0))
        .collect();
    let ws: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let mu = AtomicDistribution::from_weighted(&xs, &ws).unwrap();
    let groups = rng.random_range(1..=mu.len());
    let labels: Vec<usize> = (0..mu.len()).map(|_| rng.random_range(0..groups)).collect();
    let mut mass = vec![0.0; groups];
    let mut first = vec![0.0; groups];
    for (i, (x, p)) in mu.atoms().enumerate() {
        mass[labels[i]] += p;
        first[labels[i]] += p * x;
    }
    let (cx, cw): (Vec<f64>, Vec<f64>) = (0..groups)
        .filter(|&g| mass[g] > 0.0)
        .map(|g| (first[g] / mass[g], mass[g]))
        .unzip();
    (AtomicDistribution::from_weighted(&cx, &cw).unwrap(), mu)
}

/// Mean-zero law with `P(Z >= t) = p`: upper atoms in `[t, t + 4]` of total
/// mass `p`, lower part a mixture of two-point laws centred at the value
/// that makes the mean vanish.
pub fn random_tail_law<R: Rng>(rng: &mut R, t: f64, p: f64) -> AtomicDistribution {
    let k = rng.random_range(1..=3);
    let up: Vec<f64> = (0..k).map(|_| t + rng.random_range(0.0..4.0)).collect();
    let uw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let uw_sum: f64 = uw.iter().sum();
    let uw: Vec<f64> = uw.iter().map(|w| w / uw_sum * p).collect();
    let upper_mean: f64 = up.iter().zip(&uw).map(|(x, w)| x * w).sum::<f64>() / p;
    let centre = -p * upper_mean / (1.0 - p);
    let mut xs = up;
    let mut ws = uw;
    let j = rng.random_range(1..=3);
    for _ in 0..j {
        let a = rng.random_range(0.0..3.0);
        let b = rng.random_range(0.0..(t - centre));
        if a + b == 0.0 {
            xs.push(centre);
            ws.push((1.0 - p) / j as f64);
            continue;
        }
        xs.extend([centre - a, centre + b]);
        ws.extend([
            (1.0 - p) / j as f64 * b / (a + b),
            (1.0 - p) / j as f64 * a / (a + b),
        ]);
    }
    AtomicDistribution::from_weighted(&xs, &ws).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
