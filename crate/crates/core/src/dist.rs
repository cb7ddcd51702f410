//! Finitely supported laws and their integrated transforms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pwl::{close, ConvexPwl, MonotoneNode, MonotonePwl, MERGE_TOL, TOL};
use crate::sum::{sum, Compensated};

/// A probability law with finitely many atoms.
///
/// Locations are strictly increasing, masses positive and normalized.
/// Locations closer than `1e-12` (relative above magnitude 1) are merged
/// into one atom at their mass-weighted average.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicDistribution {
    xs: Vec<f64>,
    ps: Vec<f64>,
    /// `cum[i] = P(X <= xs[i])`, with the last entry exactly 1.
    cum: Vec<f64>,
}

impl AtomicDistribution {
    /// Builds a law from `(location, mass)` pairs whose masses sum to 1.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (xs, ps): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
        let total = sum(ps.iter().copied());
        if (total - 1.0).abs() > TOL {
            return Err(Error::arg(format!("masses sum to {total}, not 1")));
        }
        Self::from_weighted(&xs, &ps)
    }

    /// Builds a law from locations and nonnegative weights of positive sum.
    /// Zero weights are dropped.
    pub fn from_weighted(xs: &[f64], ws: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::arg("a distribution needs at least one atom"));
        }
        if xs.len() != ws.len() {
            return Err(Error::arg(format!(
                "{} locations but {} weights",
                xs.len(),
                ws.len()
            )));
        }
        if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
            return Err(Error::arg(format!("atom location {x} is not finite")));
        }
        if let Some(w) = ws.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::arg(format!("weight {w} is negative or not finite")));
        }
        let total = sum(ws.iter().copied());
        if !(total > 0.0) {
            return Err(Error::arg("weights have no positive mass"));
        }
        let total = unit_or(total);

        let mut atoms: Vec<(f64, f64)> = xs
            .iter()
            .zip(ws)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&x, &w)| (x, w / total))
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut out_x: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut out_p: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, p) in atoms {
            match (out_x.last_mut(), out_p.last_mut()) {
                (Some(lx), Some(lp)) if close(*lx, x, MERGE_TOL) => {
                    if *lx != x {
                        *lx = (*lx * *lp + x * p) / (*lp + p);
                    }
                    *lp += p;
                }
                _ => {
                    out_x.push(x);
                    out_p.push(p);
                }
            }
        }
        Ok(Self::assemble(out_x, out_p))
    }

    /// Empirical law of `values`, equally weighted unless `weights` is given.
    pub fn from_samples(values: &[f64], weights: Option<&[f64]>) -> Result<Self> {
        match weights {
            Some(ws) => Self::from_weighted(values, ws),
            None => Self::from_weighted(values, &vec![1.0; values.len()]),
        }
    }

    pub fn dirac(c: f64) -> Result<Self> {
        Self::from_weighted(&[c], &[1.0])
    }

    /// Sorted, merged, positive masses in; renormalizes and fills the CDF.
    fn assemble(xs: Vec<f64>, ps: Vec<f64>) -> Self {
        let total = unit_or(sum(ps.iter().copied()));
        let ps: Vec<f64> = ps.into_iter().map(|p| p / total).collect();
        let mut acc = Compensated::default();
        let mut cum: Vec<f64> = ps
            .iter()
            .map(|&p| {
                acc.add(p);
                acc.value().min(1.0)
            })
            .collect();
        *cum.last_mut().expect("nonempty") = 1.0;
        AtomicDistribution { xs, ps, cum }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn locations(&self) -> &[f64] {
        &self.xs
    }

    pub fn masses(&self) -> &[f64] {
        &self.ps
    }

    /// Cumulative masses `P(X <= x_i)` at each atom.
    pub fn cumulative(&self) -> &[f64] {
        &self.cum
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ps.iter().copied())
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.xs.partition_point(|&a| a <= x);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    /// `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.xs.partition_point(|&a| a < x);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    fn check_open_unit(u: f64) -> Result<()> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("quantile level {u} is outside (0, 1)")));
        }
        Ok(())
    }

    /// `inf {x : F(x) >= u}` for `u` in `(0, 1)`.
    pub fn quantile_left(&self, u: f64) -> Result<f64> {
        Self::check_open_unit(u)?;
        let k = self.cum.partition_point(|&c| c < u);
        Ok(self.xs[k.min(self.len() - 1)])
    }

    /// `inf {x : F(x) > u}` for `u` in `(0, 1)`.
    pub fn quantile_right(&self, u: f64) -> Result<f64> {
        Self::check_open_unit(u)?;
        let k = self.cum.partition_point(|&c| c <= u);
        Ok(self.xs[k.min(self.len() - 1)])
    }

    pub fn mean(&self) -> f64 {
        sum(self.atoms().map(|(x, p)| x * p))
    }

    /// `E[X+]`.
    pub fn pos_part_mean(&self) -> f64 {
        sum(self.atoms().map(|(x, p)| x.max(0.0) * p))
    }

    /// `E[X-]`.
    pub fn neg_part_mean(&self) -> f64 {
        sum(self.atoms().map(|(x, p)| (-x).max(0.0) * p))
    }

    pub fn abs_mean(&self) -> f64 {
        sum(self.atoms().map(|(x, p)| x.abs() * p))
    }

    pub fn second_moment(&self) -> f64 {
        sum(self.atoms().map(|(x, p)| x * x * p))
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        sum(self.atoms().map(|(x, p)| (x - m) * (x - m) * p))
    }

    /// `E[g(X)]`.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        sum(self.atoms().map(|(x, p)| g(x) * p))
    }

    /// Law of `-X`.
    pub fn negate(&self) -> Self {
        let xs: Vec<f64> = self.xs.iter().rev().map(|x| -x).collect();
        let ps: Vec<f64> = self.ps.iter().rev().copied().collect();
        Self::assemble(xs, ps)
    }

    /// Law of `|X|`.
    pub fn abs(&self) -> Self {
        let xs: Vec<f64> = self.xs.iter().map(|x| x.abs()).collect();
        Self::from_weighted(&xs, &self.ps).expect("folding keeps a valid law")
    }

    /// The distribution function as a monotone PWL descriptor.
    pub fn cdf_pwl(&self) -> MonotonePwl {
        let nodes = (0..self.len())
            .map(|i| MonotoneNode {
                x: self.xs[i],
                left: if i == 0 { 0.0 } else { self.cum[i - 1] },
                right: self.cum[i],
            })
            .collect();
        MonotonePwl::new(nodes).expect("cumulative masses are nondecreasing")
    }

    /// The integrated distribution function `x -> int_0^x F(t) dt`.
    ///
    /// Breakpoints sit at the atoms and the slope between two atoms is the
    /// CDF value there; tail slopes are 0 and 1.
    pub fn idf(&self) -> ConvexPwl {
        let slopes: Vec<f64> = self.cum[..self.len() - 1].to_vec();
        let ys = integrate_steps(&self.xs, &slopes, 0.0, 1.0, 0.0);
        ConvexPwl::from_parts(self.xs.clone(), ys, slopes, Some(0.0), Some(1.0))
    }

    /// Breakpoints `0, F(x_0), ..., F(x_{n-2}), 1` of the quantile integrals.
    fn quantile_grid(&self) -> Vec<f64> {
        let mut us = Vec::with_capacity(self.len() + 1);
        us.push(0.0);
        us.extend_from_slice(&self.cum[..self.len() - 1]);
        us.push(1.0);
        us
    }

    fn quantile_integral(&self, anchor: f64) -> ConvexPwl {
        let us = self.quantile_grid();
        let ys = integrate_steps(&us, &self.xs, self.xs[0], self.xs[self.len() - 1], anchor);
        ConvexPwl::from_parts(us, ys, self.xs.clone(), None, None)
    }

    /// The integrated quantile function on `[0, 1]`: the antiderivative of
    /// the quantile function that vanishes where the quantile changes sign.
    ///
    /// Computed by direct integration; it coincides with the conjugate of
    /// [`idf`](Self::idf).
    pub fn iqf(&self) -> ConvexPwl {
        let k = self.xs.partition_point(|&x| x < 0.0);
        let anchor = if k == 0 { 0.0 } else { self.cum[k - 1] };
        self.quantile_integral(anchor)
    }

    /// `Q - Q(0)`, the absolute Lorenz curve.
    pub fn iqf_shift0(&self) -> ConvexPwl {
        self.quantile_integral(0.0)
    }

    /// `Q - Q(1)`.
    pub fn iqf_shift1(&self) -> ConvexPwl {
        self.quantile_integral(1.0)
    }

    /// `Psi(x) = Phi(x) + E[X-]`, which equals `E[(x - X)+]`.
    pub fn psi(&self, x: f64) -> f64 {
        self.idf().evaluate(x) + self.neg_part_mean()
    }

    /// Stop-loss transform `H(x) = Phi(x) + E[X+] - x`, which equals `E[(X - x)+]`.
    pub fn stop_loss(&self, x: f64) -> f64 {
        self.idf().evaluate(x) + self.pos_part_mean() - x
    }

    /// Potential `U(x) = x - E|X| - 2 Phi(x)`, which equals `-E|x - X|`.
    pub fn potential(&self, x: f64) -> f64 {
        x - self.abs_mean() - 2.0 * self.idf().evaluate(x)
    }

    /// Absolute Lorenz curve `AL(u) = Q(u) - Q(0)`, `u` in `[0, 1]`.
    pub fn lorenz(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::domain(format!("Lorenz level {u} is outside [0, 1]")));
        }
        Ok(self.iqf_shift0().evaluate(u))
    }

    /// Mean of the lower `u`-tail, `AL(u) / u` for `u` in `(0, 1]`.
    pub fn cvar(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::domain(format!("CVaR level {u} is outside (0, 1]")));
        }
        Ok(self.iqf_shift0().evaluate(u) / u)
    }

    /// Mean of the upper `(1 - u)`-tail, `(Q(u) - Q(1)) / (u - 1)` for `u` in `[0, 1)`.
    pub fn hardy_littlewood(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::domain(format!(
                "Hardy-Littlewood level {u} is outside [0, 1)"
            )));
        }
        Ok(self.iqf_shift1().evaluate(u) / (u - 1.0))
    }

    /// The law whose IDF is `j`: atoms at the breakpoints, masses equal to
    /// the slope increments.
    pub fn from_idf(j: &ConvexPwl) -> Result<Self> {
        let (Some(l), Some(r)) = (j.left_slope(), j.right_slope()) else {
            return Err(Error::arg("an IDF is finite on the whole line"));
        };
        if l.abs() > TOL || (r - 1.0).abs() > TOL {
            return Err(Error::arg(format!(
                "an IDF has asymptotic slopes 0 and 1, got {l} and {r}"
            )));
        }
        if j.slopes().iter().any(|&s| !(-TOL..=1.0 + TOL).contains(&s)) {
            return Err(Error::arg("IDF slopes must lie in [0, 1]"));
        }
        let at0 = j.evaluate(0.0);
        let scale = j.values().iter().fold(1.0_f64, |m, y| m.max(y.abs()));
        if at0.abs() > TOL * scale {
            return Err(Error::arg(format!("an IDF vanishes at 0, got {at0}")));
        }
        let mut slopes = vec![0.0];
        slopes.extend_from_slice(j.slopes());
        slopes.push(1.0);
        let ws: Vec<f64> = slopes.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
        Self::from_weighted(j.breakpoints(), &ws)
    }

    /// The law whose IQF is `k`: atoms at the slopes, masses equal to the
    /// lengths of the linear pieces.
    pub fn from_iqf(k: &ConvexPwl) -> Result<Self> {
        let d = k.domain();
        if d.lo != 0.0 || d.hi != 1.0 {
            return Err(Error::arg(format!(
                "an IQF lives on [0, 1], got domain [{}, {}]",
                d.lo, d.hi
            )));
        }
        let scale = k.values().iter().fold(1.0_f64, |m, y| m.max(y.abs()));
        let min = k.values().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -TOL * scale {
            return Err(Error::arg(format!("an IQF is nonnegative, minimum is {min}")));
        }
        if min > TOL * scale {
            return Err(Error::arg(format!("an IQF has a zero, minimum is {min}")));
        }
        let widths: Vec<f64> = k.breakpoints().windows(2).map(|w| w[1] - w[0]).collect();
        Self::from_weighted(k.slopes(), &widths)
    }
}

/// Totals within rounding of 1 are left alone, so that reloading a
/// serialized law reproduces it bit for bit.
fn unit_or(total: f64) -> f64 {
    if (total - 1.0).abs() <= 1e-14 {
        1.0
    } else {
        total
    }
}

/// Values at `ts` of the continuous PWL function with slope `slopes[i]` on
/// `(ts[i], ts[i+1])`, slope `left` before `ts[0]`, slope `right` after the
/// last point, and value 0 at `anchor`.
///
/// Accumulates outward from the anchor with compensated sums.
fn integrate_steps(ts: &[f64], slopes: &[f64], left: f64, right: f64, anchor: f64) -> Vec<f64> {
    let n = ts.len();
    let mut ys = vec![0.0; n];
    let k = ts.partition_point(|&t| t < anchor);
    let slope_before = |i: usize| if i == 0 { left } else { slopes[i - 1] };

    let mut acc = Compensated::default();
    if k < n {
        acc.add_scaled_diff(slope_before(k), ts[k], anchor);
        ys[k] = acc.value();
        for i in k..n - 1 {
            acc.add_scaled_diff(slopes[i], ts[i + 1], ts[i]);
            ys[i + 1] = acc.value();
        }
    }
    if k > 0 {
        let mut acc = Compensated::default();
        let s = if k == n { right } else { slopes[k - 1] };
        acc.add_scaled_diff(-s, anchor, ts[k - 1]);
        ys[k - 1] = acc.value();
        for i in (1..k).rev() {
            acc.add_scaled_diff(-slopes[i - 1], ts[i], ts[i - 1]);
            ys[i - 1] = acc.value();
        }
    }
    ys
}

/// Total variation distance `sup_A |P(A) - Q(A)|`.
pub fn total_variation(a: &AtomicDistribution, b: &AtomicDistribution) -> f64 {
    let mut diff = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let xa = a.xs.get(i).copied().unwrap_or(f64::INFINITY);
        let xb = b.xs.get(j).copied().unwrap_or(f64::INFINITY);
        if xa == xb {
            diff += (a.ps[i] - b.ps[j]).abs();
            i += 1;
            j += 1;
        } else if xa < xb {
            diff += a.ps[i];
            i += 1;
        } else {
            diff += b.ps[j];
            j += 1;
        }
    }
    0.5 * diff
}

/// Kolmogorov distance `sup_x |F(x) - G(x)|`.
pub fn kolmogorov(a: &AtomicDistribution, b: &AtomicDistribution) -> f64 {
    a.xs.iter()
        .chain(b.xs.iter())
        .map(|&x| (a.cdf(x) - b.cdf(x)).abs())
        .fold(0.0, f64::max)
}

#[derive(Serialize, Deserialize)]
struct Atom {
    x: f64,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    atoms: Vec<Atom>,
}

impl Serialize for AtomicDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionRepr {
            atoms: self.atoms().map(|(x, p)| Atom { x, p }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AtomicDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DistributionRepr::deserialize(d)?;
        AtomicDistribution::new(r.atoms.into_iter().map(|a| (a.x, a.p))).map_err(serde::de::Error::custom)
    }
}
