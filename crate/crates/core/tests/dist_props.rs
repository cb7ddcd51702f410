mod common;

use common::{close, law_strategy};
use iqcalc::AtomicDistribution;
use proptest::prelude::*;

fn levels(d: &AtomicDistribution) -> Vec<f64> {
    let mut us: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    us.extend(d.cumulative()[..d.len() - 1].iter().copied());
    us
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn idf_and_iqf_are_conjugate(d in law_strategy(12, 100.0)) {
        let (phi, q) = (d.idf(), d.iqf());
        prop_assert!(phi.conjugate().vertices_close(&q, 1e-9));
        prop_assert!(q.conjugate().vertices_close(&phi, 1e-9));
    }

    #[test]
    fn idf_properties(d in law_strategy(12, 100.0), a in -150.0f64..150.0, b in -150.0f64..150.0) {
        let phi = d.idf();
        prop_assert!(phi.evaluate(0.0).abs() < 1e-12);
        prop_assert_eq!(phi.left_slope(), Some(0.0));
        prop_assert_eq!(phi.right_slope(), Some(1.0));
        prop_assert!(phi.slopes().iter().all(|s| (0.0..=1.0).contains(s)));
        prop_assert!(phi.slopes().windows(2).all(|w| w[0] < w[1]));
        let direct = d.expect(|x| (b - x).max(0.0) - (a - x).max(0.0));
        prop_assert!((phi.evaluate(b) - phi.evaluate(a) - direct).abs() < 1e-9);
        // tails: Phi(x) -> -E[X-] on the left, Phi(x) - x -> -E[X+] on the right
        let (lo, hi) = (d.locations()[0] - 1.0, d.locations()[d.len() - 1] + 1.0);
        prop_assert!((phi.evaluate(lo) + d.neg_part_mean()).abs() < 1e-9);
        prop_assert!((phi.evaluate(hi) - hi + d.pos_part_mean()).abs() < 1e-9);
        // subdifferential is [F(x-0), F(x)]
        let x = d.locations()[d.len() / 2];
        let sub = phi.subdifferential(x).unwrap();
        prop_assert!(close(sub.lo, d.cdf_left(x), 1e-12) && close(sub.hi, d.cdf(x), 1e-12));
    }

    #[test]
    fn iqf_properties(d in law_strategy(12, 100.0)) {
        let q = d.iqf();
        prop_assert!((q.evaluate(0.0) - d.neg_part_mean()).abs() < 1e-9);
        prop_assert!((q.evaluate(1.0) - d.pos_part_mean()).abs() < 1e-9);
        let min = q.values().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min.abs() < 1e-12);
        // zero set is [F(0-), F(0)]
        let (z0, z1) = (d.cdf_left(0.0), d.cdf(0.0));
        prop_assert!(q.evaluate(z0).abs() < 1e-9 && q.evaluate(z1).abs() < 1e-9);
        for u in levels(&d) {
            let sub = q.subdifferential(u).unwrap();
            prop_assert_eq!(sub.lo, d.quantile_left(u).unwrap());
            prop_assert_eq!(sub.hi, d.quantile_right(u).unwrap());
            if u < z0 - 1e-12 || u > z1 + 1e-12 {
                prop_assert!(q.evaluate(u) > 0.0);
            }
        }
    }

    #[test]
    fn iqf_at_cdf_value(d in law_strategy(12, 100.0), x in -150.0f64..150.0) {
        let f = d.cdf(x);
        let lhs = d.iqf().evaluate(f);
        let rhs = x * f - d.idf().evaluate(x);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn characterizations_round_trip(d in law_strategy(12, 100.0)) {
        let a = AtomicDistribution::from_idf(&d.idf()).unwrap();
        let b = AtomicDistribution::from_iqf(&d.iqf()).unwrap();
        for e in [a, b] {
            prop_assert_eq!(e.len(), d.len());
            for ((x, p), (y, q)) in e.atoms().zip(d.atoms()) {
                prop_assert!(close(x, y, 1e-12) && close(p, q, 1e-12));
            }
        }
    }

    #[test]
    fn functional_identities(d in law_strategy(12, 100.0), x in -150.0f64..150.0) {
        let (psi, h, u) = (d.psi(x), d.stop_loss(x), d.potential(x));
        prop_assert!((psi + h + u).abs() < 1e-9 * (1.0 + x.abs()));
        prop_assert!((psi - d.expect(|a| (x - a).max(0.0))).abs() < 1e-9 * (1.0 + x.abs()));
        prop_assert!((h - d.expect(|a| (a - x).max(0.0))).abs() < 1e-9 * (1.0 + x.abs()));
        prop_assert!(close(d.lorenz(1.0).unwrap(), d.mean(), 1e-12));
        let neg = d.negate();
        for v in levels(&d) {
            let hl = d.hardy_littlewood(v).unwrap();
            let cv = neg.cvar(1.0 - v).unwrap();
            prop_assert!(close(hl, -cv, 1e-9), "{hl} vs {cv}");
        }
    }

    #[test]
    fn reflections(d in law_strategy(12, 100.0), x in -150.0f64..150.0, u in 0.0f64..=1.0) {
        let n = d.negate();
        prop_assert!((n.idf().evaluate(x) - (x + d.idf().evaluate(-x))).abs() < 1e-9 * (1.0 + x.abs()));
        prop_assert!((n.iqf().evaluate(u) - d.iqf().evaluate(1.0 - u)).abs() < 1e-9);
        prop_assert!(close(d.pos_part_mean() - d.neg_part_mean(), d.mean(), 1e-12));
    }

    #[test]
    fn json_round_trip(d in law_strategy(12, 100.0)) {
        let s = serde_json::to_string(&d).unwrap();
        prop_assert_eq!(serde_json::from_str::<AtomicDistribution>(&s).unwrap(), d);
    }
}
