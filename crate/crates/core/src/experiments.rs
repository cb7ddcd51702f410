//! Binary statistical experiments, represented by the law of the likelihood
//! ratio under the null hypothesis.

use serde::{Deserialize, Serialize};

use crate::dist::AtomicDistribution;
use crate::error::{Error, Result};
use crate::orders::leq_decx;
use crate::pwl::{
    dominance_violation, levy_distance, max_of_affine, ConcavePwl, ConvexPwl, Interval, MonotoneNode,
    MonotonePwl, TOL,
};

/// A dichotomy `(P, P')`, stored as the law `mu` of `Z = dP'/dP` under `P`.
///
/// `mu` lives on `[0, inf)` and has mean at most 1; the missing mass
/// `1 - E[Z]` is the part of `P'` singular to `P`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinaryExperiment {
    mu: AtomicDistribution,
}

/// Mean excess tolerated when validating `E[Z] <= 1`.
const MEAN_SLACK: f64 = 1e-12;

impl BinaryExperiment {
    pub fn new(mu: AtomicDistribution) -> Result<Self> {
        if let Some(&x) = mu.locations().first().filter(|x| **x < 0.0) {
            return Err(Error::arg(format!("likelihood ratio atom {x} is negative")));
        }
        let m = mu.mean();
        if m > 1.0 + MEAN_SLACK {
            return Err(Error::arg(format!("likelihood ratio mean {m} exceeds 1")));
        }
        Ok(BinaryExperiment { mu })
    }

    /// The experiment of two laws on a finite sample space. Outcomes with
    /// `p_i = 0` carry the part of `P'` singular to `P`.
    pub fn from_measures(p: &[f64], p_prime: &[f64]) -> Result<Self> {
        if p.len() != p_prime.len() {
            return Err(Error::arg(format!(
                "{} null probabilities but {} alternative probabilities",
                p.len(),
                p_prime.len()
            )));
        }
        for (name, v) in [("p", p), ("p_prime", p_prime)] {
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::arg(format!("{name} has a negative or non-finite entry")));
            }
            let s = crate::sum::sum(v.iter().copied());
            if (s - 1.0).abs() > TOL {
                return Err(Error::arg(format!("{name} sums to {s}, not 1")));
            }
        }
        let (zs, ws): (Vec<f64>, Vec<f64>) = p
            .iter()
            .zip(p_prime)
            .filter(|(&a, _)| a > 0.0)
            .map(|(&a, &b)| (b / a, a))
            .unzip();
        Self::new(AtomicDistribution::from_weighted(&zs, &ws)?)
    }

    pub fn mu(&self) -> &AtomicDistribution {
        &self.mu
    }

    /// Smallest type II error at type I error `u`: the IQF of `-Z` on `[0, 1]`.
    pub fn risk_function(&self) -> ConvexPwl {
        self.mu.negate().iqf()
    }

    /// Whether `(u, v)` is the (type I error, power) pair of some test:
    /// `r(1 - u) <= v <= 1 - r(u)`.
    pub fn power_region_contains(&self, u: f64, v: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("({u}, {v}) is outside the unit square")));
        }
        let r = self.risk_function();
        Ok(r.evaluate(1.0 - u) <= v + TOL && v <= 1.0 - r.evaluate(u) + TOL)
    }

    /// Minimum Bayes risk `b(pi) = 1 - pi - pi Phi_Z((1 - pi) / pi)` as a
    /// concave curve on `[0, 1]`.
    ///
    /// Each atom `x` of `mu` becomes a vertex at `pi = 1 / (1 + x)`, where
    /// `b = pi (x - Phi_Z(x))`; the curve is linear between vertices and
    /// vanishes at both ends.
    pub fn bayes_risk_curve(&self) -> ConcavePwl {
        let phi = self.mu.idf();
        let mut pis = vec![0.0];
        let mut bs = vec![0.0];
        for &x in self.mu.locations().iter().rev().filter(|&&x| x > 0.0) {
            let pi = 1.0 / (1.0 + x);
            if pi > *pis.last().expect("nonempty") {
                pis.push(pi);
                bs.push(pi * (x - phi.evaluate(x)));
            }
        }
        pis.push(1.0);
        bs.push(0.0);
        ConcavePwl::from_vertices(pis, bs).expect("Bayes risk is concave")
    }

    pub fn bayes_risk(&self, pi: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&pi) {
            return Err(Error::domain(format!("prior {pi} is outside [0, 1]")));
        }
        Ok(self.bayes_risk_curve().evaluate(pi))
    }

    /// Representation CDF: 0 below 0, `r(1 - x)` on `[0, 1)` and 1 from 1 on.
    pub fn repr_cdf(&self) -> MonotonePwl {
        let r = self.risk_function();
        let mut nodes = vec![MonotoneNode {
            x: 0.0,
            left: 0.0,
            right: r.evaluate(1.0).max(0.0),
        }];
        for (u, y) in r.vertices().collect::<Vec<_>>().into_iter().rev() {
            if u > 0.0 && u < 1.0 {
                nodes.push(MonotoneNode {
                    x: 1.0 - u,
                    left: y,
                    right: y,
                });
            }
        }
        nodes.push(MonotoneNode {
            x: 1.0,
            left: r.evaluate(0.0).min(1.0),
            right: 1.0,
        });
        MonotonePwl::new(nodes).expect("risk functions are decreasing")
    }

    /// Outcomes, null and alternative laws of a canonical sample space
    /// realizing this experiment.
    pub fn canonical(&self) -> CanonicalExperiment {
        canonical_experiment(&self.mu).expect("validated on construction")
    }
}

/// `r(u) = sup_pi (b(pi) - (1 - pi) u) / pi`, the risk function of the
/// experiment with Bayes risk curve `b`.
///
/// The supremum over `pi` is attained at interior vertices of `b` or in the
/// limit `pi -> 1`, where it is 0.
pub fn risk_from_bayes(b: &ConcavePwl) -> Result<ConvexPwl> {
    let bp = b.breakpoints();
    if bp[0] != 0.0 || bp[bp.len() - 1] != 1.0 {
        return Err(Error::arg("a Bayes risk curve lives on [0, 1]"));
    }
    let mut lines = vec![(0.0, 0.0)];
    for (pi, y) in b.vertices() {
        if y < -TOL || y > pi.min(1.0 - pi) + TOL {
            return Err(Error::arg(format!(
                "Bayes risk {y} at prior {pi} leaves [0, min(pi, 1 - pi)]"
            )));
        }
        if pi > 0.0 && pi < 1.0 {
            lines.push((-(1.0 - pi) / pi, y / pi));
        }
    }
    max_of_affine(&lines, Interval { lo: 0.0, hi: 1.0 })
}

/// `E` is more informative than `E~`: `r_E <= r_E~` on `[0, 1]`.
pub fn more_informative(e: &BinaryExperiment, e_tilde: &BinaryExperiment, tol: f64) -> bool {
    dominance_violation(&e_tilde.risk_function(), &e.risk_function(), tol).is_none()
}

/// Same relation read off the Bayes risk curves, `b_E <= b_E~`.
pub fn more_informative_by_bayes(e: &BinaryExperiment, e_tilde: &BinaryExperiment, tol: f64) -> bool {
    dominance_violation(
        e.bayes_risk_curve().negated(),
        e_tilde.bayes_risk_curve().negated(),
        tol,
    )
    .is_none()
}

/// Same relation as an order on ratio laws, `mu_E~ <=decx mu_E`.
pub fn more_informative_by_order(e: &BinaryExperiment, e_tilde: &BinaryExperiment, tol: f64) -> bool {
    leq_decx(&e_tilde.mu, &e.mu, tol)
}

/// `sup_pi (b_E(pi) - b_E~(pi))` over the vertices of both curves.
fn bayes_gap(e: &BinaryExperiment, e_tilde: &BinaryExperiment) -> (f64, f64) {
    let (b, bt) = (e.bayes_risk_curve(), e_tilde.bayes_risk_curve());
    let mut up: f64 = 0.0;
    let mut down: f64 = 0.0;
    for &pi in b.breakpoints().iter().chain(bt.breakpoints()) {
        let d = b.evaluate(pi) - bt.evaluate(pi);
        up = up.max(d);
        down = down.max(-d);
    }
    (up, down)
}

/// Whether `E` is `eps`-deficient with respect to `E~`:
/// `b_E <= b_E~ + eps / 2` everywhere.
pub fn epsilon_deficient(e: &BinaryExperiment, e_tilde: &BinaryExperiment, eps: f64) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(Error::arg(format!("eps must be nonnegative, got {eps}")));
    }
    let (up, _) = bayes_gap(e, e_tilde);
    Ok(up <= 0.5 * eps + TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deficiency {
    /// One-sided deficiency `sup (b_E - b_E~) / 2`.
    pub delta2: f64,
    /// Symmetric deficiency `sup |b_E - b_E~| / 2`.
    #[serde(rename = "Delta2")]
    pub big_delta2: f64,
}

pub fn deficiency(e: &BinaryExperiment, e_tilde: &BinaryExperiment) -> Deficiency {
    let (up, down) = bayes_gap(e, e_tilde);
    Deficiency {
        delta2: 0.5 * up,
        big_delta2: 0.5 * up.max(down),
    }
}

/// The symmetric deficiency as half the Lévy distance between the
/// representation CDFs.
pub fn levy_deficiency(e: &BinaryExperiment, e_tilde: &BinaryExperiment) -> f64 {
    0.5 * levy_distance(&e.repr_cdf(), &e_tilde.repr_cdf()).expect("representation CDFs are proper")
}

/// Symmetric deficiency of each experiment in `seq` from `target`.
pub fn experiment_sequence_distance(seq: &[BinaryExperiment], target: &BinaryExperiment) -> Vec<f64> {
    seq.iter().map(|e| deficiency(e, target).big_delta2).collect()
}

/// A finite sample space realizing an experiment. `outcomes[i]` is the
/// likelihood ratio at outcome `i`, `None` for the outcome of ratio `+inf`
/// that carries the singular part of `P'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalExperiment {
    pub outcomes: Vec<Option<f64>>,
    pub p: Vec<f64>,
    pub p_prime: Vec<f64>,
    pub defect: f64,
}

/// Outcomes at the atoms of `mu`, with `P = mu` and `P'(dx) = x mu(dx)`,
/// plus an outcome at infinity holding `1 - E[Z]` when that is positive.
pub fn canonical_experiment(mu: &AtomicDistribution) -> Result<CanonicalExperiment> {
    BinaryExperiment::new(mu.clone())?;
    let mut outcomes: Vec<Option<f64>> = mu.locations().iter().map(|&x| Some(x)).collect();
    let mut p = mu.masses().to_vec();
    let mut p_prime: Vec<f64> = mu.atoms().map(|(x, q)| x * q).collect();
    let defect = (1.0 - mu.mean()).max(0.0);
    if defect > MEAN_SLACK {
        outcomes.push(None);
        p.push(0.0);
        p_prime.push(defect);
    }
    Ok(CanonicalExperiment {
        outcomes,
        p,
        p_prime,
        defect,
    })
}

/// Experiment JSON: `{"mu": law}` or `{"p": [...], "p_prime": [...]}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum ExperimentRepr {
    Mu { mu: AtomicDistribution },
    Measures { p: Vec<f64>, p_prime: Vec<f64> },
}

impl<'de> Deserialize<'de> for BinaryExperiment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ExperimentRepr::deserialize(d)? {
            ExperimentRepr::Mu { mu } => BinaryExperiment::new(mu),
            ExperimentRepr::Measures { p, p_prime } => BinaryExperiment::from_measures(&p, &p_prime),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(atoms: &[(f64, f64)]) -> BinaryExperiment {
        BinaryExperiment::new(AtomicDistribution::new(atoms.iter().copied()).unwrap()).unwrap()
    }

    fn same() -> BinaryExperiment {
        exp(&[(1.0, 1.0)])
    }

    fn perfect() -> BinaryExperiment {
        exp(&[(0.0, 1.0)])
    }

    fn two_point() -> BinaryExperiment {
        exp(&[(0.5, 0.5), (1.5, 0.5)])
    }

    #[test]
    fn measures_to_ratio_law() {
        assert_eq!(
            BinaryExperiment::from_measures(&[0.5, 0.5], &[0.5, 0.5]).unwrap(),
            same()
        );
        assert_eq!(
            BinaryExperiment::from_measures(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            perfect()
        );
        assert_eq!(
            BinaryExperiment::from_measures(&[0.5, 0.5], &[0.25, 0.75]).unwrap(),
            two_point()
        );
        assert!(BinaryExperiment::from_measures(&[0.5, 0.5], &[1.0]).is_err());
        assert!(BinaryExperiment::from_measures(&[0.5, 0.6], &[0.5, 0.5]).is_err());
        assert!(BinaryExperiment::new(AtomicDistribution::dirac(2.0).unwrap()).is_err());
    }

    #[test]
    fn risk_examples() {
        let r = same().risk_function();
        assert_eq!(
            (r.evaluate(0.0), r.evaluate(0.3), r.evaluate(1.0)),
            (1.0, 0.7, 0.0)
        );
        let r = perfect().risk_function();
        assert_eq!((r.evaluate(0.0), r.evaluate(1.0)), (0.0, 0.0));
        let r = two_point().risk_function();
        assert_eq!(
            (r.evaluate(0.0), r.evaluate(0.5), r.evaluate(1.0)),
            (1.0, 0.25, 0.0)
        );
    }

    #[test]
    fn power_region() {
        assert!(two_point().power_region_contains(0.0, 0.0).unwrap());
        assert!(!same().power_region_contains(0.5, 0.25).unwrap());
        assert!(same().power_region_contains(0.5, 0.5).unwrap());
        assert!(perfect().power_region_contains(0.9, 0.1).unwrap());
        assert!(same().power_region_contains(1.5, 0.1).is_err());
    }

    #[test]
    fn bayes_examples() {
        let b = same().bayes_risk_curve();
        for pi in [0.0, 0.1, 0.5, 0.8, 1.0] {
            assert_eq!(b.evaluate(pi), pi.min(1.0 - pi));
        }
        let b = perfect().bayes_risk_curve();
        assert!(b.values().iter().all(|&y| y == 0.0));
        assert_eq!(two_point().bayes_risk(0.5).unwrap(), 0.375);
        let direct = |e: &BinaryExperiment, pi: f64| 1.0 - pi - pi * e.mu().idf().evaluate((1.0 - pi) / pi);
        for pi in [0.1, 0.3, 0.45, 0.7, 0.9] {
            assert!((two_point().bayes_risk(pi).unwrap() - direct(&two_point(), pi)).abs() < 1e-15);
        }
    }

    #[test]
    fn bayes_to_risk() {
        for e in [same(), perfect(), two_point()] {
            let r = risk_from_bayes(&e.bayes_risk_curve()).unwrap();
            assert!(r.vertices_close(&e.risk_function(), 1e-12), "{r:?}");
        }
        let bad = ConcavePwl::from_vertices(vec![0.0, 0.5, 1.0], vec![0.0, 0.7, 0.0]).unwrap();
        assert!(risk_from_bayes(&bad).is_err());
    }

    #[test]
    fn informativeness() {
        for e in [same(), two_point()] {
            assert!(more_informative(&perfect(), &e, TOL));
            assert!(more_informative(&e, &same(), TOL));
        }
        assert!(!more_informative(&two_point(), &perfect(), TOL));
        assert!(!more_informative_by_bayes(&two_point(), &perfect(), TOL));
        assert!(!more_informative_by_order(&two_point(), &perfect(), TOL));
        assert!(more_informative_by_order(&perfect(), &two_point(), TOL));
    }

    #[test]
    fn deficiencies() {
        let e = two_point();
        assert!(epsilon_deficient(&e, &e, 0.0).unwrap());
        assert!(epsilon_deficient(&same(), &perfect(), 1.0).unwrap());
        assert!(!epsilon_deficient(&same(), &perfect(), 0.9).unwrap());
        assert!(epsilon_deficient(&perfect(), &same(), 0.0).unwrap());
        assert!(epsilon_deficient(&e, &e, -1.0).is_err());
        assert_eq!(
            deficiency(&e, &e),
            Deficiency {
                delta2: 0.0,
                big_delta2: 0.0
            }
        );
        assert_eq!(
            deficiency(&same(), &perfect()),
            Deficiency {
                delta2: 0.25,
                big_delta2: 0.25
            }
        );
        assert_eq!(deficiency(&perfect(), &same()).delta2, 0.0);
        assert_eq!(levy_deficiency(&same(), &perfect()), 0.25);
    }

    #[test]
    fn representation() {
        let f = perfect().repr_cdf();
        assert_eq!(
            (f.evaluate(0.5), f.evaluate_left(1.0), f.evaluate(1.0)),
            (0.0, 0.0, 1.0)
        );
        let f = same().repr_cdf();
        assert_eq!((f.evaluate(0.25), f.evaluate(0.75)), (0.25, 0.75));
        let f = two_point().repr_cdf();
        assert_eq!(f.evaluate(0.5), 0.25);
        assert_eq!(f.evaluate(0.25), 0.125);
        assert_eq!(f.evaluate(0.75), 0.625);
    }

    #[test]
    fn canonical_round_trip() {
        let c = canonical_experiment(same().mu()).unwrap();
        assert_eq!((c.outcomes.len(), c.defect), (1, 0.0));
        let c = canonical_experiment(perfect().mu()).unwrap();
        assert_eq!(c.outcomes, vec![Some(0.0), None]);
        assert_eq!(c.p_prime, vec![0.0, 1.0]);
        let c = canonical_experiment(two_point().mu()).unwrap();
        assert_eq!(
            (c.p.clone(), c.p_prime.clone()),
            (vec![0.5, 0.5], vec![0.25, 0.75])
        );
        for e in [same(), perfect(), two_point()] {
            let c = e.canonical();
            assert_eq!(BinaryExperiment::from_measures(&c.p, &c.p_prime).unwrap(), e);
        }
    }

    #[test]
    fn sequence_distance() {
        assert_eq!(experiment_sequence_distance(&[same()], &same()), vec![0.0]);
        assert_eq!(experiment_sequence_distance(&[perfect()], &same()), vec![0.25]);
        let seq: Vec<_> = (1..6).map(|n| exp(&[(1.0 - 1.0 / n as f64, 1.0)])).collect();
        let d = experiment_sequence_distance(&seq, &same());
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }

    #[test]
    fn json_forms() {
        let e: BinaryExperiment = serde_json::from_str(r#"{"p":[0.5,0.5],"p_prime":[0.25,0.75]}"#).unwrap();
        assert_eq!(e, two_point());
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<BinaryExperiment>(&s).unwrap(), e);
    }
}
