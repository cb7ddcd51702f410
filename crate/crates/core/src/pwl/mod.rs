//! Piecewise-linear convex analysis: evaluation, subdifferentials, Fenchel
//! conjugation, convex envelopes, root finding on concave PWL maps and
//! distances between PWL curves.

mod concave;
mod convex;
mod monotone;

pub use concave::ConcavePwl;
pub use convex::ConvexPwl;
pub use monotone::{levy_distance, MonotoneNode, MonotonePwl};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for "equals zero" decisions. Above magnitude 1
/// it is applied relative to the compared quantities.
pub const TOL: f64 = 1e-9;

/// Environment variable overriding [`TOL`] in [`default_tol`].
pub const TOL_ENV: &str = "IQCALC_TOL";

/// Slopes closer than this (relative above 1) are treated as collinear.
pub(crate) const MERGE_TOL: f64 = 1e-12;

/// [`TOL`], unless `IQCALC_TOL` holds a positive number.
pub fn default_tol() -> f64 {
    std::env::var(TOL_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(TOL)
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// A closed interval `[lo, hi]`; ends may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::arg(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Greatest convex minorant on `domain` of the pointwise minimum of `fs`.
///
/// Every input must be finite on the (finite) domain. The result is the lower
/// convex hull of all graph vertices inside the domain together with the
/// graph points at the two ends.
pub fn lower_convex_envelope(fs: &[ConvexPwl], domain: Interval) -> Result<ConvexPwl> {
    if fs.is_empty() {
        return Err(Error::arg("lower convex envelope of an empty family"));
    }
    let Interval { lo, hi } = domain;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::arg("envelope domain must be finite"));
    }
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for f in fs {
        let d = f.domain();
        if d.lo > lo || d.hi < hi {
            return Err(Error::domain(format!(
                "member with domain [{}, {}] is not finite on [{lo}, {hi}]",
                d.lo, d.hi
            )));
        }
        pts.push((lo, f.evaluate(lo)));
        pts.push((hi, f.evaluate(hi)));
        pts.extend(f.vertices().filter(|&(x, _)| x > lo && x < hi));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|b, a| a.0 == b.0);

    // Andrew's monotone chain, lower half
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = hull.into_iter().unzip();
    let slopes = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    Ok(ConvexPwl::from_parts(xs, ys, slopes, None, None))
}

/// Upper envelope of affine functions `slope * x + intercept` on a finite
/// interval, returned with bounded domain.
pub fn max_of_affine(lines: &[(f64, f64)], domain: Interval) -> Result<ConvexPwl> {
    let Interval { lo, hi } = domain;
    if lines.is_empty() {
        return Err(Error::arg("maximum of an empty family of lines"));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::arg("domain must be finite"));
    }
    let mut ls: Vec<(f64, f64)> = lines.to_vec();
    ls.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // equal slopes: keep the highest intercept (the last after sorting)
    let mut uniq: Vec<(f64, f64)> = Vec::with_capacity(ls.len());
    for l in ls {
        match uniq.last_mut() {
            Some(last) if last.0 == l.0 => *last = l,
            _ => uniq.push(l),
        }
    }
    let meet = |a: (f64, f64), b: (f64, f64)| (a.1 - b.1) / (b.0 - a.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(uniq.len());
    for l in uniq {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if meet(a, l) <= meet(a, b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    // walk the envelope over [lo, hi]
    // crossings within rounding of an end or of each other would leave
    // slivers, so they are snapped away
    let near = |x: f64, y: f64| close(x, y, MERGE_TOL);
    let mut k = 0;
    while k + 1 < hull.len() && {
        let x = meet(hull[k], hull[k + 1]);
        x <= lo || near(x, lo)
    } {
        k += 1;
    }
    let at = |l: (f64, f64), x: f64| l.0 * x + l.1;
    let mut xs = vec![lo];
    let mut ys = vec![at(hull[k], lo)];
    let mut slopes = Vec::new();
    while k + 1 < hull.len() {
        let x = meet(hull[k], hull[k + 1]);
        if x >= hi || near(x, hi) {
            break;
        }
        if xs.len() > 1 && near(x, xs[xs.len() - 1]) {
            // the previous piece has no width: replace its right end
            xs.pop();
            ys.pop();
            slopes.pop();
        }
        slopes.push(hull[k].0);
        xs.push(x);
        ys.push(at(hull[k + 1], x));
        k += 1;
    }
    if hi > lo {
        slopes.push(hull[k].0);
        xs.push(hi);
        ys.push(at(hull[k], hi));
    }
    Ok(ConvexPwl::from_parts(xs, ys, slopes, None, None))
}

/// Solves `x v - f(x) = c` for the two roots `a < b` of a concave PWL map.
///
/// Requires the maximum of `x v - f(x)` to exceed `c`. Roots are found by
/// exact segment intersection; a root that coincides with a vertex (up to
/// rounding) is returned as that vertex. On a side where `f` has bounded
/// domain the map drops to `-inf` at the boundary, which is then returned
/// if no interior crossing exists.
pub fn solve_concave_equation(f: &ConvexPwl, v: f64, c: f64) -> Result<(f64, f64)> {
    if !v.is_finite() || !c.is_finite() {
        return Err(Error::arg("level and slope must be finite"));
    }
    if f.left_slope().is_some_and(|s| v <= s) || f.right_slope().is_some_and(|s| v >= s) {
        return Err(Error::arg(format!(
            "x*{v} - f(x) does not tend to -inf on both sides"
        )));
    }
    let xs = f.breakpoints();
    let ys = f.values();
    let slopes = f.slopes();
    let n = xs.len();
    let g: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x * v - y).collect();
    let (k, &gmax) = g
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    if !(gmax > c) {
        return Err(Error::NoBracket { max: gmax, level: c });
    }
    let snap = |x: f64, vertex: f64| {
        if close(x, vertex, MERGE_TOL) {
            vertex
        } else {
            x
        }
    };

    // left root: walk down from the peak
    let mut a = None;
    for i in (0..k).rev() {
        if g[i] <= c {
            // crossing on [x_i, x_{i+1}], g rising with slope v - s_i
            let x = xs[i + 1] + (c - g[i + 1]) / (v - slopes[i]);
            a = Some(snap(snap(x, xs[i]), xs[i + 1]));
            break;
        }
    }
    let a = match a {
        Some(a) => a,
        None => match f.left_slope() {
            Some(s) => snap(xs[0] + (c - g[0]) / (v - s), xs[0]),
            None => xs[0],
        },
    };

    let mut b = None;
    for i in k + 1..n {
        if g[i] <= c {
            let x = xs[i - 1] + (c - g[i - 1]) / (v - slopes[i - 1]);
            b = Some(snap(snap(x, xs[i]), xs[i - 1]));
            break;
        }
    }
    let b = match b {
        Some(b) => b,
        None => match f.right_slope() {
            Some(s) => snap(xs[n - 1] + (c - g[n - 1]) / (v - s), xs[n - 1]),
            None => xs[n - 1],
        },
    };
    Ok((a, b))
}

/// `sup |f - g|` over a finite interval on which both are finite.
///
/// For PWL functions the supremum is attained at a vertex of either function
/// or at an end of the interval.
pub fn sup_distance(f: &ConvexPwl, g: &ConvexPwl, on: Interval) -> Result<f64> {
    let Interval { lo, hi } = on;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain("sup distance needs a finite interval"));
    }
    for h in [f, g] {
        let d = h.domain();
        if d.lo > lo || d.hi < hi {
            return Err(Error::domain(format!(
                "function with domain [{}, {}] is infinite on part of [{lo}, {hi}]",
                d.lo, d.hi
            )));
        }
    }
    let inside = |x: &f64| *x > lo && *x < hi;
    Ok([lo, hi]
        .iter()
        .chain(f.breakpoints().iter().filter(|x| inside(x)))
        .chain(g.breakpoints().iter().filter(|x| inside(x)))
        .map(|&x| (f.evaluate(x) - g.evaluate(x)).abs())
        .fold(0.0, f64::max))
}

/// First point where `upper >= lower` fails by more than `tol`.
///
/// Checks every vertex of either function and the asymptotic slopes; for
/// PWL functions this decides dominance on the whole line.
pub fn dominance_violation(upper: &ConvexPwl, lower: &ConvexPwl, tol: f64) -> Option<f64> {
    let mut pts: Vec<f64> = upper
        .breakpoints()
        .iter()
        .chain(lower.breakpoints())
        .copied()
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    for &x in &pts {
        let (u, l) = (upper.evaluate(x), lower.evaluate(x));
        if u == f64::INFINITY {
            continue;
        }
        if l == f64::INFINITY || u < l - tol * u.abs().max(l.abs()).max(1.0) {
            return Some(x);
        }
    }
    // tails: lower may outgrow upper beyond every vertex
    let first = pts[0];
    let last = pts[pts.len() - 1];
    if let (Some(su), Some(sl)) = (upper.right_slope(), lower.right_slope()) {
        if su < sl - MERGE_TOL {
            let gap = upper.evaluate(last) - lower.evaluate(last);
            return Some(last + (gap.max(0.0) + 1.0) / (sl - su));
        }
    }
    if upper.right_slope().is_some() && lower.right_slope().is_none() {
        return Some(last + 1.0);
    }
    if let (Some(su), Some(sl)) = (upper.left_slope(), lower.left_slope()) {
        if su > sl + MERGE_TOL {
            let gap = upper.evaluate(first) - lower.evaluate(first);
            return Some(first - (gap.max(0.0) + 1.0) / (su - sl));
        }
    }
    if upper.left_slope().is_some() && lower.left_slope().is_none() {
        return Some(first - 1.0);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos_part(shift: f64) -> ConvexPwl {
        ConvexPwl::new(vec![shift], vec![0.0], Some(0.0), Some(1.0)).unwrap()
    }

    #[test]
    fn envelope_of_crossing_lines_is_zero() {
        let fs = [
            ConvexPwl::affine_on(0.0, 1.0, 1.0, 0.0).unwrap(),
            ConvexPwl::affine_on(0.0, 1.0, -1.0, 1.0).unwrap(),
        ];
        let env = lower_convex_envelope(&fs, Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert!(env.vertices_close(&ConvexPwl::indicator(0.0, 1.0).unwrap(), 1e-15));
    }

    #[test]
    fn envelope_of_single_and_nested() {
        let f = ConvexPwl::new(vec![0.0, 0.5, 1.0], vec![-1.0, -1.0, 0.0], None, None).unwrap();
        let env = lower_convex_envelope(std::slice::from_ref(&f), Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert!(env.vertices_close(&f, 1e-15));

        let g = ConvexPwl::new(vec![0.0, 0.5, 1.0], vec![-2.0, -2.0, 0.0], None, None).unwrap();
        let env = lower_convex_envelope(&[f, g.clone()], Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert!(env.vertices_close(&g, 1e-15));
        assert!(lower_convex_envelope(&[], Interval::new(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            solve_concave_equation(&pos_part(0.0), 0.5, -0.5).unwrap(),
            (-1.0, 1.0)
        );
        let abs = ConvexPwl::new(vec![0.0], vec![0.0], Some(-1.0), Some(1.0)).unwrap();
        assert_eq!(solve_concave_equation(&abs, 0.0, -1.0).unwrap(), (-1.0, 1.0));
        // x/2 = -1 on the left piece, x/2 - (x - 2) = -1 on the right one
        assert_eq!(
            solve_concave_equation(&pos_part(2.0), 0.5, -1.0).unwrap(),
            (-2.0, 6.0)
        );
        assert_eq!(
            solve_concave_equation(&pos_part(2.0), 0.5, 0.0).unwrap(),
            (0.0, 4.0)
        );
    }

    #[test]
    fn solve_reports_missing_bracket() {
        match solve_concave_equation(&pos_part(0.0), 0.5, 0.0) {
            Err(Error::NoBracket { max, level }) => {
                assert_eq!(max, 0.0);
                assert_eq!(level, 0.0);
            }
            other => panic!("expected NoBracket, got {other:?}"),
        }
        assert!(solve_concave_equation(&pos_part(0.0), 1.0, -1.0).is_err());
    }

    #[test]
    fn solve_root_at_vertex() {
        // x/2 - f(x) equals -1/2 exactly at the vertex x = -1
        let f = ConvexPwl::new(vec![-1.0, 1.0], vec![0.0, 0.5], Some(0.0), Some(1.0)).unwrap();
        assert_eq!(solve_concave_equation(&f, 0.5, -0.5).unwrap(), (-1.0, 2.0));
    }

    #[test]
    fn sup_distance_examples() {
        let tent = ConvexPwl::new(vec![0.0, 0.5, 1.0], vec![0.5, 0.0, 0.5], None, None).unwrap();
        let zero = ConvexPwl::indicator(0.0, 1.0).unwrap();
        let unit = Interval::new(0.0, 1.0).unwrap();
        assert_eq!(sup_distance(&tent, &tent, unit).unwrap(), 0.0);
        assert_eq!(sup_distance(&zero, &tent, unit).unwrap(), 0.5);
        let id = ConvexPwl::affine_on(0.0, 1.0, 1.0, 0.0).unwrap();
        let sq = ConvexPwl::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.25, 1.0], None, None).unwrap();
        assert_eq!(sup_distance(&id, &sq, unit).unwrap(), 0.25);
        assert!(sup_distance(&zero, &tent, Interval::new(0.0, 2.0).unwrap()).is_err());
    }

    #[test]
    fn max_of_affine_matches_pointwise_max() {
        let lines = [(1.0, 0.0), (-1.0, 0.0), (0.0, 0.25), (-1.0, -3.0)];
        let f = max_of_affine(&lines, Interval::new(-2.0, 2.0).unwrap()).unwrap();
        for i in 0..=400 {
            let x = -2.0 + i as f64 * 0.01;
            let m = lines.iter().map(|(a, b)| a * x + b).fold(f64::MIN, f64::max);
            assert!((f.evaluate(x) - m).abs() < 1e-12, "x = {x}");
        }
        assert_eq!(f.breakpoints(), &[-2.0, -0.25, 0.25, 2.0]);
    }

    #[test]
    fn dominance_detects_tail_escape() {
        let a = ConvexPwl::affine(1.0, 0.0);
        let b = ConvexPwl::affine(2.0, 0.0);
        let w = dominance_violation(&a, &b, TOL).unwrap();
        assert!(a.evaluate(w) < b.evaluate(w));
        assert!(dominance_violation(&b, &b, TOL).is_none());
    }
}
