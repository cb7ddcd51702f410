//! Convex, increasing convex and decreasing convex orders, decided by
//! comparing shifted integrated quantile functions, and the two sharp tail
//! bounds with their extremal two-point laws.

use serde::Serialize;

use crate::dist::AtomicDistribution;
use crate::error::{Error, Result};
use crate::pwl::dominance_violation;

/// Outcome of an order test. `witness_u` is a level where the required
/// curve dominance fails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_u: Option<f64>,
}

impl Verdict {
    fn from_violation(v: Option<f64>) -> Self {
        Verdict {
            verdict: v.is_none(),
            witness_u: v,
        }
    }
}

/// `X <=icx Y`: `Q1_X >= Q1_Y` on `[0, 1]`, decided at the merged vertices.
pub fn icx(x: &AtomicDistribution, y: &AtomicDistribution, tol: f64) -> Verdict {
    Verdict::from_violation(dominance_violation(&x.iqf_shift1(), &y.iqf_shift1(), tol))
}

/// `X <=decx Y`: `Q0_X >= Q0_Y` on `[0, 1]`.
pub fn decx(x: &AtomicDistribution, y: &AtomicDistribution, tol: f64) -> Verdict {
    Verdict::from_violation(dominance_violation(&x.iqf_shift0(), &y.iqf_shift0(), tol))
}

/// `X <=cx Y`: both shifted dominances.
pub fn cx(x: &AtomicDistribution, y: &AtomicDistribution, tol: f64) -> Verdict {
    let v = icx(x, y, tol);
    if !v.verdict {
        return v;
    }
    decx(x, y, tol)
}

pub fn leq_icx(x: &AtomicDistribution, y: &AtomicDistribution, tol: f64) -> bool {
    icx(x, y, tol).verdict
}

pub fn leq_decx(x: &AtomicDistribution, y: &AtomicDistribution, tol: f64) -> bool {
    decx(x, y, tol).verdict
}

pub fn leq_cx(x: &AtomicDistribution, y: &AtomicDistribution, tol: f64) -> bool {
    cx(x, y, tol).verdict
}

/// `X <=cx Y` in the form "icx and equal means".
pub fn leq_cx_by_means(x: &AtomicDistribution, y: &AtomicDistribution, tol: f64) -> bool {
    let (mx, my) = (x.mean(), y.mean());
    (mx - my).abs() <= tol * mx.abs().max(my.abs()).max(1.0) && leq_icx(x, y, tol)
}

/// A point `t` with `E[(X - t)+] > E[(Y - t)+]`, searched over the merged
/// atoms of both laws. `None` when `X <=icx Y`.
pub fn icx_witness_point(x: &AtomicDistribution, y: &AtomicDistribution, tol: f64) -> Option<f64> {
    let mut ts: Vec<f64> = x.locations().iter().chain(y.locations()).copied().collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.into_iter().find(|&t| {
        let hx = x.stop_loss(t);
        let hy = y.stop_loss(t);
        hx > hy + tol * hx.abs().max(hy.abs()).max(1.0)
    })
}

/// One-sided Chebyshev (Cantelli) bound `P(X >= t) <= sigma^2 / (sigma^2 + t^2)`
/// for mean-zero `X` with variance `sigma^2`, with the two-point law
/// attaining it.
pub fn cantelli_extremal(sigma: f64, t: f64) -> Result<(f64, AtomicDistribution)> {
    if !(sigma > 0.0 && sigma.is_finite()) || !(t > 0.0 && t.is_finite()) {
        return Err(Error::arg(format!(
            "sigma and t must be positive, got sigma = {sigma}, t = {t}"
        )));
    }
    let s2 = sigma * sigma;
    let p = s2 / (s2 + t * t);
    // -t p / (1 - p) simplifies to -sigma^2 / t
    let law = AtomicDistribution::from_weighted(&[-s2 / t, t], &[1.0 - p, p])?;
    Ok((p, law))
}

/// Sharp lower bound `P(X > a) >= (1 - a)^2 / (b - a (2 - a))` for positive
/// `X` with `E[X] = 1` and `E[X^2] = b`, with the two-point law attaining it.
pub fn positive_tail_extremal(a: f64, b: f64) -> Result<(f64, AtomicDistribution)> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::arg(format!("a must lie in (0, 1), got {a}")));
    }
    if !(b >= 1.0 && b.is_finite()) || !(b > a * (2.0 - a)) {
        return Err(Error::arg(format!(
            "b must be finite, at least 1 and exceed a (2 - a), got {b}"
        )));
    }
    let p = (1.0 - a) * (1.0 - a) / (b - a * (2.0 - a));
    // the upper atom (1 - a (1 - p)) / p, rewritten without cancellation
    let hi = (b - a) / (1.0 - a);
    let law = AtomicDistribution::from_weighted(&[a, hi], &[1.0 - p, p])?;
    Ok((p, law))
}
