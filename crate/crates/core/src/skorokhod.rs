//! Chacon–Walsh construction: balayage of atomic laws, the tangent-line
//! step, embedding plans, and Monte Carlo simulation of the exit chain.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{kolmogorov, total_variation, AtomicDistribution};
use crate::error::{Error, Result};
use crate::orders::icx_witness_point;
use crate::pwl::{close, dominance_violation, solve_concave_equation, Interval};

/// Sweeps the mass of `d` on the closed interval `[a, b]` to its ends,
/// keeping the mean: an atom `x` goes to `a` with weight `(b - x) / (b - a)`
/// and to `b` with weight `(x - a) / (b - a)`.
pub fn balayage(d: &AtomicDistribution, iv: Interval) -> Result<AtomicDistribution> {
    let Interval { lo: a, hi: b } = iv;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::arg(format!(
            "balayage needs a finite interval a < b, got ({a}, {b})"
        )));
    }
    let mut xs = Vec::with_capacity(d.len() + 2);
    let mut ws = Vec::with_capacity(d.len() + 2);
    let (mut to_a, mut to_b) = (0.0, 0.0);
    for (x, p) in d.atoms() {
        if a <= x && x <= b {
            to_a += p * (b - x) / (b - a);
            to_b += p * (x - a) / (b - a);
        } else {
            xs.push(x);
            ws.push(p);
        }
    }
    xs.extend([a, b]);
    ws.extend([to_a, to_b]);
    AtomicDistribution::from_weighted(&xs, &ws)
}

/// One tangent-line step towards `target` at level `v`.
///
/// Solves `x v - Phi_X(x) - E[X+] = Q1_target(v)` for its two roots `a < b`
/// and sweeps `x` on `(a, b)`. The new law's shifted IQF lies between the
/// two inputs' and meets the target's at `v`. Returns `None` when the curves
/// already touch at `v`.
pub fn cw_step(
    x: &AtomicDistribution,
    target: &AtomicDistribution,
    v: f64,
    tol: f64,
) -> Result<Option<(Interval, AtomicDistribution)>> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::domain(format!("step level {v} is outside (0, 1)")));
    }
    let (qx, qy) = (x.iqf_shift1(), target.iqf_shift1());
    if let Some(u) = dominance_violation(&qx, &qy, tol) {
        return Err(Error::Precondition(format!(
            "target shifted IQF lies above the current one at u = {u}"
        )));
    }
    let (cur, goal) = (qx.evaluate(v), qy.evaluate(v));
    if cur - goal <= tol * cur.abs().max(goal.abs()).max(1.0) {
        return Ok(None);
    }
    let phi = x.idf();
    let n = phi.breakpoints().len();
    // sup_x (x - Phi(x)) = E[X+], read off the same vertex data the solver uses
    let pos = phi.breakpoints()[n - 1] - phi.values()[n - 1];
    let (a, b) = match solve_concave_equation(&phi, v, goal + pos) {
        Ok(r) => r,
        Err(Error::NoBracket { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let iv = Interval { lo: a, hi: b };
    Ok(Some((iv, balayage(x, iv)?)))
}

/// Interval sequence of a Chacon–Walsh embedding and the law after each
/// balayage; `laws[0]` is the starting law.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingPlan {
    pub intervals: Vec<Interval>,
    pub laws: Vec<AtomicDistribution>,
    /// Whether the last law equals the target.
    pub exact: bool,
}

impl EmbeddingPlan {
    pub fn start(&self) -> &AtomicDistribution {
        &self.laws[0]
    }

    pub fn terminal(&self) -> &AtomicDistribution {
        &self.laws[self.laws.len() - 1]
    }
}

/// Plans an embedding of `mu` starting from `mu0`, pinning the running
/// shifted IQF to the target's at each interior breakpoint of the target's,
/// in increasing order.
pub fn plan_embedding(mu0: &AtomicDistribution, mu: &AtomicDistribution, tol: f64) -> Result<EmbeddingPlan> {
    if let Some(u) = dominance_violation(&mu0.iqf_shift1(), &mu.iqf_shift1(), tol) {
        let y = icx_witness_point(mu0, mu, tol)
            .map(|y| format!("E[(X0 - y)+] > E[(X - y)+] at y = {y}"))
            .unwrap_or_else(|| format!("shifted IQFs cross at u = {u}"));
        return Err(Error::Precondition(format!(
            "the starting law is not below the target in the increasing convex order: {y}"
        )));
    }
    let mut intervals = Vec::new();
    let mut laws = vec![mu0.clone()];
    let cum = mu.cumulative();
    for &v in &cum[..cum.len() - 1] {
        let cur = &laws[laws.len() - 1];
        if let Some((iv, next)) = cw_step(cur, mu, v, tol)? {
            intervals.push(iv);
            laws.push(next);
        }
    }
    let exact = same_law(&laws[laws.len() - 1], mu, tol);
    Ok(EmbeddingPlan {
        intervals,
        laws,
        exact,
    })
}

fn same_law(a: &AtomicDistribution, b: &AtomicDistribution, tol: f64) -> bool {
    a.len() == b.len()
        && a.atoms()
            .zip(b.atoms())
            .all(|((x, p), (y, q))| close(x, y, tol) && close(p, q, tol))
}

/// Runs the exit chain from `x0`: inside an interval `[a, b]` the value
/// jumps to `a` with probability `(b - x) / (b - a)` and to `b` otherwise;
/// outside it stays put.
pub fn run_chain<R: Rng + ?Sized>(intervals: &[Interval], x0: f64, rng: &mut R) -> f64 {
    let mut x = x0;
    for iv in intervals {
        if iv.lo <= x && x <= iv.hi {
            let to_lo = (iv.hi - x) / (iv.hi - iv.lo);
            x = if rng.random::<f64>() < to_lo { iv.lo } else { iv.hi };
        }
    }
    x
}

/// Draws a starting value from the plan's first law and runs the chain.
pub fn chain_sample<R: Rng + ?Sized>(plan: &EmbeddingPlan, rng: &mut R) -> f64 {
    let start = plan.start();
    let pick = WeightedIndex::new(start.masses()).expect("masses are positive");
    run_chain(&plan.intervals, start.locations()[pick.sample(rng)], rng)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomError {
    pub x: f64,
    pub target: f64,
    pub empirical: f64,
    pub abs_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub n: u64,
    pub seed: u64,
    pub workers: usize,
    pub intervals: usize,
    pub tv_distance: f64,
    pub kolmogorov: f64,
    pub per_atom_abs_err: Vec<AtomError>,
    /// Fraction of draws that landed off the target's support.
    pub off_support: f64,
}

/// Samples `n` exit-chain values and compares their empirical law with the
/// plan's target `mu`.
///
/// Worker `i` draws its share from `ChaCha8Rng` seeded with `seed` on stream
/// `i`, so results depend only on `(seed, workers)`.
pub fn monte_carlo_verify(
    mu0: &AtomicDistribution,
    mu: &AtomicDistribution,
    n: u64,
    seed: u64,
    workers: usize,
    tol: f64,
) -> Result<MonteCarloReport> {
    if n == 0 {
        return Err(Error::arg("need at least one sample"));
    }
    if workers == 0 {
        return Err(Error::arg("need at least one worker"));
    }
    let plan = plan_embedding(mu0, mu, tol)?;
    let atoms = mu.locations();
    let nearest = |x: f64| -> Option<usize> {
        let k = atoms.partition_point(|&a| a < x);
        [k.checked_sub(1), Some(k)]
            .into_iter()
            .flatten()
            .filter(|&i| i < atoms.len() && close(atoms[i], x, tol))
            .min_by(|&i, &j| (atoms[i] - x).abs().total_cmp(&(atoms[j] - x).abs()))
    };

    let start = plan.start();
    let pick = WeightedIndex::new(start.masses()).expect("masses are positive");
    let w = workers as u64;
    let counts: Vec<(Vec<u64>, u64)> = (0..w)
        .into_par_iter()
        .map(|i| {
            let share = n / w + u64::from(i < n % w);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mut hits = vec![0u64; atoms.len()];
            let mut off = 0u64;
            for _ in 0..share {
                let x0 = start.locations()[pick.sample(&mut rng)];
                match nearest(run_chain(&plan.intervals, x0, &mut rng)) {
                    Some(k) => hits[k] += 1,
                    None => off += 1,
                }
            }
            (hits, off)
        })
        .collect();

    let mut hits = vec![0u64; atoms.len()];
    let mut off = 0u64;
    for (h, o) in counts {
        hits.iter_mut().zip(h).for_each(|(a, b)| *a += b);
        off += o;
    }
    let nf = n as f64;
    let per_atom_abs_err: Vec<AtomError> = mu
        .atoms()
        .zip(&hits)
        .map(|((x, p), &h)| {
            let e = h as f64 / nf;
            AtomError {
                x,
                target: p,
                empirical: e,
                abs_err: (e - p).abs(),
            }
        })
        .collect();
    let off_support = off as f64 / nf;

    let (kolmogorov_d, tv) = if off == 0 {
        let emp =
            AtomicDistribution::from_weighted(atoms, &hits.iter().map(|&h| h as f64).collect::<Vec<_>>())?;
        (kolmogorov(&emp, mu), total_variation(&emp, mu))
    } else {
        let tv = 0.5 * (per_atom_abs_err.iter().map(|e| e.abs_err).sum::<f64>() + off_support);
        let mut run = (0.0, 0.0, 0.0_f64);
        for e in &per_atom_abs_err {
            run.0 += e.empirical;
            run.1 += e.target;
            run.2 = run.2.max((run.0 - run.1).abs());
        }
        // off-support draws are not located, so bound their CDF effect by their mass
        (run.2 + off_support, tv)
    };

    Ok(MonteCarloReport {
        n,
        seed,
        workers,
        intervals: plan.intervals.len(),
        tv_distance: tv,
        kolmogorov: kolmogorov_d,
        per_atom_abs_err,
        off_support,
    })
}

#[derive(Serialize, Deserialize)]
struct PlanRepr {
    intervals: Vec<[f64; 2]>,
    laws: Vec<AtomicDistribution>,
    exact: bool,
}

impl Serialize for EmbeddingPlan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PlanRepr {
            intervals: self.intervals.iter().map(|iv| [iv.lo, iv.hi]).collect(),
            laws: self.laws.clone(),
            exact: self.exact,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EmbeddingPlan {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PlanRepr::deserialize(d)?;
        if r.laws.len() != r.intervals.len() + 1 {
            return Err(serde::de::Error::custom("a plan has one more law than intervals"));
        }
        let intervals = r
            .intervals
            .iter()
            .map(|&[a, b]| Interval::new(a, b))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(EmbeddingPlan {
            intervals,
            laws: r.laws,
            exact: r.exact,
        })
    }
}
