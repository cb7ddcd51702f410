use serde::{Deserialize, Serialize};

use super::{close, Interval, MERGE_TOL, TOL};
use crate::error::{Error, Result};

/// A convex piecewise-linear function on the real line, possibly `+inf`
/// outside a closed interval.
///
/// The function is described by its vertices `(x_i, y_i)`, the chord slope
/// between consecutive vertices, and a slope for each tail. A tail slope of
/// `None` means the function is `+inf` beyond the outermost vertex on that
/// side, so the effective domain is closed at that vertex.
///
/// Values are always canonical: vertices where the left and right slopes
/// agree are merged away, except that a function without any kink keeps a
/// single anchor vertex at `x = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConvexPwlRepr", into = "ConvexPwlRepr")]
pub struct ConvexPwl {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    left: Option<f64>,
    right: Option<f64>,
}

impl ConvexPwl {
    /// Builds a function from its vertices and tail slopes, validating
    /// monotone breakpoints and convexity.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, left: Option<f64>, right: Option<f64>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::arg(
                "a piecewise-linear function needs at least one vertex",
            ));
        }
        if xs.len() != ys.len() {
            return Err(Error::arg(format!(
                "{} breakpoints but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite())
            || left.is_some_and(|s| !s.is_finite())
            || right.is_some_and(|s| !s.is_finite())
        {
            return Err(Error::arg("breakpoints, values and slopes must be finite"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("breakpoints must be strictly increasing"));
        }
        let slopes: Vec<f64> = (0..xs.len() - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();

        let mut chain: Vec<f64> = Vec::with_capacity(slopes.len() + 2);
        chain.extend(left);
        chain.extend(slopes.iter().copied());
        chain.extend(right);
        for w in chain.windows(2) {
            if w[1] < w[0] - TOL * w[0].abs().max(w[1].abs()).max(1.0) {
                return Err(Error::arg(format!(
                    "slopes are not nondecreasing ({} then {}): function is not convex",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self::from_parts(xs, ys, slopes, left, right))
    }

    /// The affine function `x -> slope * x + intercept` on the whole line.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::from_parts(vec![0.0], vec![intercept], vec![], Some(slope), Some(slope))
    }

    /// The affine function `slope * x + intercept` restricted to `[lo, hi]`.
    pub fn affine_on(lo: f64, hi: f64, slope: f64, intercept: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::arg(format!("invalid domain [{lo}, {hi}]")));
        }
        if lo == hi {
            return Ok(Self::from_parts(
                vec![lo],
                vec![slope * lo + intercept],
                vec![],
                None,
                None,
            ));
        }
        Ok(Self::from_parts(
            vec![lo, hi],
            vec![slope * lo + intercept, slope * hi + intercept],
            vec![slope],
            None,
            None,
        ))
    }

    /// Zero on `[lo, hi]`, `+inf` elsewhere.
    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::affine_on(lo, hi, 0.0, 0.0)
    }

    /// Assembles a function from already consistent parts and canonicalizes it.
    /// `slopes[i]` is the chord slope between vertices `i` and `i + 1`.
    pub(crate) fn from_parts(
        xs: Vec<f64>,
        ys: Vec<f64>,
        slopes: Vec<f64>,
        left: Option<f64>,
        right: Option<f64>,
    ) -> Self {
        debug_assert!(!xs.is_empty());
        debug_assert_eq!(xs.len(), ys.len());
        debug_assert_eq!(slopes.len() + 1, xs.len());
        let n = xs.len();
        let slope_at = |i: usize| -> (Option<f64>, Option<f64>) {
            let l = if i == 0 { left } else { Some(slopes[i - 1]) };
            let r = if i + 1 == n { right } else { Some(slopes[i]) };
            (l, r)
        };
        let keep: Vec<usize> = (0..n)
            .filter(|&i| match slope_at(i) {
                (Some(l), Some(r)) => !close(l, r, MERGE_TOL),
                _ => true,
            })
            .collect();

        if keep.is_empty() {
            // no kink and both tails finite: a single affine piece
            let s = left.expect("unbounded on the left");
            let y0 = ys[0] + s * (0.0 - xs[0]);
            return ConvexPwl {
                xs: vec![0.0],
                ys: vec![y0],
                slopes: vec![],
                left: Some(s),
                right: Some(s),
            };
        }
        if keep.len() == n {
            return ConvexPwl {
                xs,
                ys,
                slopes,
                left,
                right,
            };
        }
        let mut nxs = Vec::with_capacity(keep.len());
        let mut nys = Vec::with_capacity(keep.len());
        let mut nslopes = Vec::with_capacity(keep.len().saturating_sub(1));
        for (k, &i) in keep.iter().enumerate() {
            nxs.push(xs[i]);
            nys.push(ys[i]);
            if k > 0 {
                let j = keep[k - 1];
                nslopes.push(if i == j + 1 {
                    slopes[j]
                } else {
                    (ys[i] - ys[j]) / (xs[i] - xs[j])
                });
            }
        }
        ConvexPwl {
            xs: nxs,
            ys: nys,
            slopes: nslopes,
            left,
            right,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    /// Chord slopes between consecutive breakpoints.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Slope left of the first breakpoint; `None` if the function is `+inf` there.
    pub fn left_slope(&self) -> Option<f64> {
        self.left
    }

    /// Slope right of the last breakpoint; `None` if the function is `+inf` there.
    pub fn right_slope(&self) -> Option<f64> {
        self.right
    }

    pub fn vertices(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    /// Effective domain; unbounded ends are infinite.
    pub fn domain(&self) -> Interval {
        let lo = if self.left.is_some() {
            f64::NEG_INFINITY
        } else {
            self.xs[0]
        };
        let hi = if self.right.is_some() {
            f64::INFINITY
        } else {
            self.xs[self.xs.len() - 1]
        };
        Interval { lo, hi }
    }

    pub fn first_breakpoint(&self) -> f64 {
        self.xs[0]
    }

    pub fn last_breakpoint(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// `f(x)`, with `+inf` outside the domain.
    pub fn evaluate(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] {
            return match self.left {
                Some(s) => self.ys[0] + s * (x - self.xs[0]),
                None => f64::INFINITY,
            };
        }
        if x > self.xs[n - 1] {
            return match self.right {
                Some(s) => self.ys[n - 1] + s * (x - self.xs[n - 1]),
                None => f64::INFINITY,
            };
        }
        // index of the last breakpoint <= x
        let i = self.xs.partition_point(|&b| b <= x) - 1;
        if self.xs[i] == x || i + 1 == n {
            return self.ys[i];
        }
        // interpolate from the nearer vertex
        if x - self.xs[i] <= self.xs[i + 1] - x {
            self.ys[i] + self.slopes[i] * (x - self.xs[i])
        } else {
            self.ys[i + 1] - self.slopes[i] * (self.xs[i + 1] - x)
        }
    }

    /// `[f'_-(x), f'_+(x)]` at a point of the domain interior.
    pub fn subdifferential(&self, x: f64) -> Result<Interval> {
        let dom = self.domain();
        if !(x > dom.lo && x < dom.hi) {
            return Err(Error::domain(format!(
                "{x} is not in the interior of the domain [{}, {}]",
                dom.lo, dom.hi
            )));
        }
        let n = self.xs.len();
        let pos = self.xs.partition_point(|&b| b < x);
        let left_of = |i: usize| {
            if i == 0 {
                self.left
            } else {
                Some(self.slopes[i - 1])
            }
        };
        let right_of = |i: usize| {
            if i + 1 == n {
                self.right
            } else {
                Some(self.slopes[i])
            }
        };
        let (lo, hi) = if pos < n && self.xs[pos] == x {
            (left_of(pos), right_of(pos))
        } else if pos == 0 {
            (self.left, self.left)
        } else if pos == n {
            (self.right, self.right)
        } else {
            (Some(self.slopes[pos - 1]), Some(self.slopes[pos - 1]))
        };
        // interior points always have finite one-sided derivatives
        Ok(Interval {
            lo: lo.expect("interior point"),
            hi: hi.expect("interior point"),
        })
    }

    /// The Fenchel conjugate `u -> sup_x (x u - f(x))`.
    ///
    /// Breakpoints of the result are the slopes of `self` and its slopes are
    /// the breakpoints of `self`; a bounded side turns into a finite tail
    /// slope and vice versa.
    pub fn conjugate(&self) -> ConvexPwl {
        let n = self.xs.len();
        let mut us = Vec::with_capacity(n + 1);
        let mut vs = Vec::with_capacity(n + 1);
        let mut ss = Vec::with_capacity(n);

        if let Some(s) = self.left {
            us.push(s);
            vs.push(self.xs[0] * s - self.ys[0]);
        }
        for i in 0..n - 1 {
            let s = self.slopes[i];
            if !us.is_empty() {
                ss.push(self.xs[i]);
            }
            us.push(s);
            vs.push(self.xs[i] * s - self.ys[i]);
        }
        if let Some(s) = self.right {
            if !us.is_empty() {
                ss.push(self.xs[n - 1]);
            }
            us.push(s);
            vs.push(self.xs[n - 1] * s - self.ys[n - 1]);
        }

        let left = if self.left.is_some() {
            None
        } else {
            Some(self.xs[0])
        };
        let right = if self.right.is_some() {
            None
        } else {
            Some(self.xs[n - 1])
        };

        if us.is_empty() {
            // indicator of a single point x0: the conjugate is affine
            return ConvexPwl::from_parts(vec![0.0], vec![-self.ys[0]], vec![], left, right);
        }
        if us.len() == 2 && us[0] == us[1] {
            // affine input: the conjugate is finite at a single point
            return ConvexPwl::from_parts(vec![us[0]], vec![vs[0]], vec![], None, None);
        }
        ConvexPwl::from_parts(us, vs, ss, left, right)
    }

    /// Vertex-by-vertex comparison of canonical forms.
    pub fn vertices_close(&self, other: &ConvexPwl, tol: f64) -> bool {
        let tails = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (None, None) => true,
            (Some(a), Some(b)) => close(a, b, tol),
            _ => false,
        };
        self.xs.len() == other.xs.len()
            && tails(self.left, other.left)
            && tails(self.right, other.right)
            && self
                .vertices()
                .zip(other.vertices())
                .all(|((x1, y1), (x2, y2))| close(x1, x2, tol) && close(y1, y2, tol))
    }

    /// Semantic comparison: same domain and tails, values within `tol`
    /// (relative above magnitude 1) at every vertex of either function.
    pub fn approx_eq(&self, other: &ConvexPwl, tol: f64) -> bool {
        let (d1, d2) = (self.domain(), other.domain());
        let ends = |a: f64, b: f64| (a.is_infinite() && a == b) || close(a, b, tol);
        let tails = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (None, None) => true,
            (Some(a), Some(b)) => close(a, b, tol),
            _ => false,
        };
        if !ends(d1.lo, d2.lo) || !ends(d1.hi, d2.hi) {
            return false;
        }
        if !tails(self.left, other.left) || !tails(self.right, other.right) {
            return false;
        }
        let lo = d1.lo.max(d2.lo);
        let hi = d1.hi.min(d2.hi);
        self.xs
            .iter()
            .chain(other.xs.iter())
            .map(|&x| x.clamp(lo, hi))
            .all(|x| close(self.evaluate(x), other.evaluate(x), tol))
    }

    /// Pointwise `self + c`.
    pub fn add_constant(&self, c: f64) -> ConvexPwl {
        ConvexPwl {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|y| y + c).collect(),
            slopes: self.slopes.clone(),
            left: self.left,
            right: self.right,
        }
    }

    /// Pointwise `self + a x + c`.
    pub fn add_affine(&self, a: f64, c: f64) -> ConvexPwl {
        ConvexPwl::from_parts(
            self.xs.clone(),
            self.xs.iter().zip(&self.ys).map(|(x, y)| y + a * x + c).collect(),
            self.slopes.iter().map(|s| s + a).collect(),
            self.left.map(|s| s + a),
            self.right.map(|s| s + a),
        )
    }

    /// `x -> self(c - x)`, which is again convex.
    pub fn reflect(&self, c: f64) -> ConvexPwl {
        let xs: Vec<f64> = self.xs.iter().rev().map(|x| c - x).collect();
        let ys: Vec<f64> = self.ys.iter().rev().copied().collect();
        let slopes: Vec<f64> = self.slopes.iter().rev().map(|s| -s).collect();
        ConvexPwl::from_parts(xs, ys, slopes, self.right.map(|s| -s), self.left.map(|s| -s))
    }

    /// Restriction to `[lo, hi]`, which must lie inside the domain.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<ConvexPwl> {
        let dom = self.domain();
        if !(lo <= hi) || lo < dom.lo || hi > dom.hi || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!(
                "[{lo}, {hi}] is not a finite subinterval of [{}, {}]",
                dom.lo, dom.hi
            )));
        }
        let mut xs = vec![lo];
        xs.extend(self.xs.iter().copied().filter(|&x| x > lo && x < hi));
        if hi > lo {
            xs.push(hi);
        }
        let ys: Vec<f64> = xs.iter().map(|&x| self.evaluate(x)).collect();
        let slopes = xs
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.subdifferential(mid)
                    .map(|d| d.lo)
                    .unwrap_or((self.evaluate(w[1]) - self.evaluate(w[0])) / (w[1] - w[0]))
            })
            .collect();
        Ok(ConvexPwl::from_parts(xs, ys, slopes, None, None))
    }
}

/// JSON shape: `{"breakpoints", "values", "slope_left", "slope_right", "domain"}`.
/// A `null` tail slope marks a bounded side; `domain` repeats the effective
/// domain with `null` for infinite ends, or is `null` when unbounded.
#[derive(Serialize, Deserialize)]
struct ConvexPwlRepr {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    slope_left: Option<f64>,
    slope_right: Option<f64>,
    #[serde(default)]
    domain: Option<[Option<f64>; 2]>,
}

impl From<ConvexPwl> for ConvexPwlRepr {
    fn from(f: ConvexPwl) -> Self {
        let domain = match (f.left, f.right) {
            (Some(_), Some(_)) => None,
            _ => {
                let d = f.domain();
                Some([d.lo.is_finite().then_some(d.lo), d.hi.is_finite().then_some(d.hi)])
            }
        };
        ConvexPwlRepr {
            breakpoints: f.xs,
            values: f.ys,
            slope_left: f.left,
            slope_right: f.right,
            domain,
        }
    }
}

impl TryFrom<ConvexPwlRepr> for ConvexPwl {
    type Error = Error;

    fn try_from(r: ConvexPwlRepr) -> Result<Self> {
        let f = ConvexPwl::new(r.breakpoints, r.values, r.slope_left, r.slope_right)?;
        if let Some([lo, hi]) = r.domain {
            let d = f.domain();
            let lo = lo.unwrap_or(f64::NEG_INFINITY);
            let hi = hi.unwrap_or(f64::INFINITY);
            if lo != d.lo || hi != d.hi {
                return Err(Error::arg(format!(
                    "declared domain [{lo}, {hi}] disagrees with the tail slopes ([{}, {}])",
                    d.lo, d.hi
                )));
            }
        }
        Ok(f)
    }
}
