//! Tightness and uniform-integrability diagnostics for finite families of
//! laws, the dominating variable of a uniformly integrable family, and
//! uniform distances between integrated quantile functions.

use serde::{Deserialize, Serialize};

use crate::dist::AtomicDistribution;
use crate::error::{Error, Result};
use crate::pwl::{lower_convex_envelope, sup_distance, ConvexPwl, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDiagnostics {
    /// `max |Q(u) - Q(v)|` over the family.
    pub oscillation: f64,
    /// Largest modulus of continuity of the IQFs at the chosen gap.
    pub modulus: f64,
    /// `max(E[X-], E[X+])` over the family.
    pub sup_abs_mean: f64,
}

fn nonempty(family: &[AtomicDistribution]) -> Result<()> {
    if family.is_empty() {
        return Err(Error::arg("the family is empty"));
    }
    Ok(())
}

pub fn tightness_oscillation(family: &[AtomicDistribution], u: f64, v: f64) -> Result<f64> {
    nonempty(family)?;
    for w in [u, v] {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::domain(format!("level {w} is outside (0, 1)")));
        }
    }
    Ok(family
        .iter()
        .map(|d| {
            let q = d.iqf();
            (q.evaluate(u) - q.evaluate(v)).abs()
        })
        .fold(0.0, f64::max))
}

fn min_on(f: &ConvexPwl, lo: f64, hi: f64) -> f64 {
    f.breakpoints()
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .chain([lo, hi])
        .map(|x| f.evaluate(x))
        .fold(f64::INFINITY, f64::min)
}

/// Largest `|Q(u2) - Q(u1)|` with `|u2 - u1| <= delta` over the family.
///
/// Increments of a convex function over windows of fixed length are monotone
/// in the window position, so only windows touching 0 or 1 matter.
pub fn ui_modulus(family: &[AtomicDistribution], delta: f64) -> Result<f64> {
    nonempty(family)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("gap {delta} is outside (0, 1]")));
    }
    Ok(family
        .iter()
        .map(|d| {
            let q = d.iqf();
            let from_left = q.evaluate(0.0) - min_on(&q, 0.0, delta);
            let from_right = q.evaluate(1.0) - min_on(&q, 1.0 - delta, 1.0);
            from_left.max(from_right)
        })
        .fold(0.0, f64::max))
}

pub fn family_diagnostics(
    family: &[AtomicDistribution],
    u: f64,
    v: f64,
    delta: f64,
) -> Result<FamilyDiagnostics> {
    Ok(FamilyDiagnostics {
        oscillation: tightness_oscillation(family, u, v)?,
        modulus: ui_modulus(family, delta)?,
        sup_abs_mean: family
            .iter()
            .map(|d| d.neg_part_mean().max(d.pos_part_mean()))
            .fold(0.0, f64::max),
    })
}

/// The lower convex envelope on `[0, 1]` of the shifted IQFs `Q1` of `|X|`
/// over the family.
pub fn dominating_curve(family: &[AtomicDistribution]) -> Result<ConvexPwl> {
    nonempty(family)?;
    let curves: Vec<ConvexPwl> = family.iter().map(|d| d.abs().iqf_shift1()).collect();
    lower_convex_envelope(&curves, Interval { lo: 0.0, hi: 1.0 })
}

/// A law `D` with `|X| <=icx D` for every member `X`, whose shifted IQF is
/// the largest convex function below all member curves.
pub fn dominating_variable(family: &[AtomicDistribution]) -> Result<AtomicDistribution> {
    let k = dominating_curve(family)?;
    AtomicDistribution::from_iqf(&k.add_constant(-k.values()[0]))
}

/// Which integrated quantile function a distance profile compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curve {
    /// `Q`, compared on `[a, b]` with `0 < a < b < 1`.
    Raw,
    /// `Q - Q(0)`, which allows `a = 0`.
    Shift0,
    /// `Q - Q(1)`, which allows `b = 1`.
    Shift1,
}

impl Curve {
    fn of(self, d: &AtomicDistribution) -> ConvexPwl {
        match self {
            Curve::Raw => d.iqf(),
            Curve::Shift0 => d.iqf_shift0(),
            Curve::Shift1 => d.iqf_shift1(),
        }
    }
}

/// `sup_{[a, b]} |Q_n - Q|` for each member of `seq` against `target`.
pub fn uniform_distance_profile(
    seq: &[AtomicDistribution],
    target: &AtomicDistribution,
    a: f64,
    b: f64,
) -> Result<Vec<f64>> {
    distance_profile(seq, target, a, b, Curve::Raw)
}

pub fn distance_profile(
    seq: &[AtomicDistribution],
    target: &AtomicDistribution,
    a: f64,
    b: f64,
    curve: Curve,
) -> Result<Vec<f64>> {
    let lo_ok = match curve {
        Curve::Shift0 => a >= 0.0,
        _ => a > 0.0,
    };
    let hi_ok = match curve {
        Curve::Shift1 => b <= 1.0,
        _ => b < 1.0,
    };
    if !(lo_ok && hi_ok && a < b) {
        return Err(Error::domain(format!(
            "interval [{a}, {b}] is not admissible for the {curve:?} profile"
        )));
    }
    let on = Interval { lo: a, hi: b };
    let t = curve.of(target);
    seq.iter().map(|d| sup_distance(&curve.of(d), &t, on)).collect()
}
