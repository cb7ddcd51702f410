use serde::{Deserialize, Serialize};

use super::ConvexPwl;
use crate::error::{Error, Result};

/// A concave piecewise-linear function on a closed interval, stored as the
/// convex function `-b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcavePwl {
    neg: ConvexPwl,
}

impl ConcavePwl {
    /// Builds a concave function on `[xs[0], xs[n-1]]` from its vertices.
    pub fn from_vertices(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let neg =
            ConvexPwl::new(xs, ys.into_iter().map(|y| -y).collect(), None, None).map_err(|e| match e {
                Error::Argument(m) => Error::Argument(m.replace("convex", "concave")),
                e => e,
            })?;
        Ok(ConcavePwl { neg })
    }

    /// Wraps `-f` for a convex `f` with bounded domain.
    pub fn negate(f: ConvexPwl) -> Result<Self> {
        if f.left_slope().is_some() || f.right_slope().is_some() {
            return Err(Error::arg("concave curves are kept on a bounded interval"));
        }
        Ok(ConcavePwl { neg: f })
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        -self.neg.evaluate(x)
    }

    pub fn breakpoints(&self) -> &[f64] {
        self.neg.breakpoints()
    }

    pub fn values(&self) -> Vec<f64> {
        self.neg.values().iter().map(|y| -y).collect()
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.neg.slopes().iter().map(|s| -s).collect()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.neg.vertices().map(|(x, y)| (x, -y))
    }

    /// The convex function `-self`.
    pub fn negated(&self) -> &ConvexPwl {
        &self.neg
    }

    pub fn vertices_close(&self, other: &ConcavePwl, tol: f64) -> bool {
        self.neg.vertices_close(&other.neg, tol)
    }
}

#[derive(Serialize, Deserialize)]
struct ConcaveRepr {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    concave: bool,
}

impl Serialize for ConcavePwl {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConcaveRepr {
            breakpoints: self.breakpoints().to_vec(),
            values: self.values(),
            concave: true,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConcavePwl {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ConcaveRepr::deserialize(d)?;
        if !r.concave {
            return Err(serde::de::Error::custom("expected a concave curve"));
        }
        ConcavePwl::from_vertices(r.breakpoints, r.values).map_err(serde::de::Error::custom)
    }
}
