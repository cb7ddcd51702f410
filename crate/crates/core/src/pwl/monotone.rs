use serde::{Deserialize, Serialize};

use super::TOL;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneNode {
    pub x: f64,
    /// Left limit at `x`.
    pub left: f64,
    /// Value at `x` (right-continuous).
    pub right: f64,
}

/// A nondecreasing right-continuous piecewise-linear function.
///
/// Between consecutive nodes the function interpolates linearly from the
/// right value of the first node to the left value of the next; jumps sit at
/// nodes. Left of the first node it is constant at that node's left value,
/// right of the last node constant at its right value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MonotoneRepr", into = "MonotoneRepr")]
pub struct MonotonePwl {
    nodes: Vec<MonotoneNode>,
}

#[derive(Serialize, Deserialize)]
struct MonotoneRepr {
    nodes: Vec<MonotoneNode>,
}

impl From<MonotonePwl> for MonotoneRepr {
    fn from(f: MonotonePwl) -> Self {
        MonotoneRepr { nodes: f.nodes }
    }
}

impl TryFrom<MonotoneRepr> for MonotonePwl {
    type Error = Error;

    fn try_from(r: MonotoneRepr) -> Result<Self> {
        MonotonePwl::new(r.nodes)
    }
}

impl MonotonePwl {
    pub fn new(nodes: Vec<MonotoneNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::arg("a monotone function needs at least one node"));
        }
        if nodes
            .iter()
            .any(|n| !n.x.is_finite() || !n.left.is_finite() || !n.right.is_finite())
        {
            return Err(Error::arg("node coordinates must be finite"));
        }
        if nodes.windows(2).any(|w| w[0].x >= w[1].x) {
            return Err(Error::arg("node positions must be strictly increasing"));
        }
        if nodes.iter().any(|n| n.left > n.right) {
            return Err(Error::arg("left limit exceeds value at a node"));
        }
        if nodes.windows(2).any(|w| w[0].right > w[1].left) {
            return Err(Error::arg("function decreases between nodes"));
        }
        Ok(MonotonePwl { nodes })
    }

    pub fn nodes(&self) -> &[MonotoneNode] {
        &self.nodes
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let n = &self.nodes;
        let i = n.partition_point(|node| node.x <= x);
        if i == 0 {
            return n[0].left;
        }
        let a = n[i - 1];
        if a.x == x || i == n.len() {
            return a.right;
        }
        let b = n[i];
        a.right + (b.left - a.right) * (x - a.x) / (b.x - a.x)
    }

    /// Left limit `F(x - 0)`.
    pub fn evaluate_left(&self, x: f64) -> f64 {
        let n = &self.nodes;
        let i = n.partition_point(|node| node.x < x);
        if i < n.len() && n[i].x == x {
            return n[i].left;
        }
        self.evaluate(x)
    }

    /// Checks that the function is a distribution function: values in
    /// `[0, 1]`, `0` at `-inf` and `1` at `+inf`.
    pub fn check_cdf(&self) -> Result<()> {
        let first = self.nodes[0].left;
        let last = self.nodes[self.nodes.len() - 1].right;
        if first.abs() > TOL || (last - 1.0).abs() > TOL {
            return Err(Error::arg(format!(
                "not a distribution function: limits {first} and {last} instead of 0 and 1"
            )));
        }
        if self.nodes.iter().any(|n| n.left < -TOL || n.right > 1.0 + TOL) {
            return Err(Error::arg("distribution function leaves [0, 1]"));
        }
        Ok(())
    }

    /// Vertices of the completed graph (jumps filled by vertical segments),
    /// each paired with `s = x + y`, which increases strictly along the graph.
    fn diagonal_chart(&self) -> Vec<(f64, f64, f64)> {
        let mut pts = Vec::with_capacity(2 * self.nodes.len());
        for n in &self.nodes {
            pts.push((n.x + n.left, n.x, n.left));
            if n.right > n.left {
                pts.push((n.x + n.right, n.x, n.right));
            }
        }
        pts
    }

    /// Abscissa where the completed graph meets the line `x + y = s`.
    fn diagonal_abscissa(chart: &[(f64, f64, f64)], s: f64) -> f64 {
        let (s0, _, y0) = chart[0];
        let (sn, _, yn) = chart[chart.len() - 1];
        if s <= s0 {
            return s - y0;
        }
        if s >= sn {
            return s - yn;
        }
        let k = chart.partition_point(|p| p.0 <= s) - 1;
        let (sa, xa, _) = chart[k];
        let (sb, xb, _) = chart[k + 1];
        if xa == xb {
            return xa;
        }
        xa + (xb - xa) * (s - sa) / (sb - sa)
    }
}

/// Lévy distance between two distribution functions.
///
/// Equals the largest horizontal gap between the completed graphs measured
/// along the lines `x + y = s`. Both gap functions are linear in `s` between
/// graph vertices, so the supremum is a maximum over finitely many `s`.
pub fn levy_distance(f: &MonotonePwl, g: &MonotonePwl) -> Result<f64> {
    f.check_cdf()?;
    g.check_cdf()?;
    let cf = f.diagonal_chart();
    let cg = g.diagonal_chart();
    Ok(cf
        .iter()
        .chain(cg.iter())
        .map(|p| p.0)
        .map(|s| (MonotonePwl::diagonal_abscissa(&cf, s) - MonotonePwl::diagonal_abscissa(&cg, s)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(at: f64) -> MonotonePwl {
        MonotonePwl::new(vec![MonotoneNode {
            x: at,
            left: 0.0,
            right: 1.0,
        }])
        .unwrap()
    }

    fn uniform01() -> MonotonePwl {
        MonotonePwl::new(vec![
            MonotoneNode {
                x: 0.0,
                left: 0.0,
                right: 0.0,
            },
            MonotoneNode {
                x: 1.0,
                left: 1.0,
                right: 1.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn evaluation_is_right_continuous() {
        let f = step(0.0);
        assert_eq!(f.evaluate(0.0), 1.0);
        assert_eq!(f.evaluate_left(0.0), 0.0);
        assert_eq!(f.evaluate(-1.0), 0.0);
        assert_eq!(uniform01().evaluate(0.25), 0.25);
    }

    #[test]
    fn levy_examples() {
        assert_eq!(levy_distance(&step(0.0), &step(0.0)).unwrap(), 0.0);
        assert_eq!(levy_distance(&step(0.0), &step(0.5)).unwrap(), 0.5);
        assert_eq!(levy_distance(&step(0.0), &step(3.0)).unwrap(), 1.0);
        assert_eq!(levy_distance(&uniform01(), &step(1.0)).unwrap(), 0.5);
    }

    #[test]
    fn rejects_non_cdf_and_decreasing() {
        let half = MonotonePwl::new(vec![MonotoneNode {
            x: 0.0,
            left: 0.0,
            right: 0.5,
        }])
        .unwrap();
        assert!(levy_distance(&half, &step(0.0)).is_err());
        assert!(MonotonePwl::new(vec![
            MonotoneNode {
                x: 0.0,
                left: 0.0,
                right: 0.6
            },
            MonotoneNode {
                x: 1.0,
                left: 0.5,
                right: 1.0
            },
        ])
        .is_err());
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&step(0.0)).unwrap();
        assert_eq!(s, r#"{"nodes":[{"x":0.0,"left":0.0,"right":1.0}]}"#);
        assert_eq!(serde_json::from_str::<MonotonePwl>(&s).unwrap(), step(0.0));
    }
}
