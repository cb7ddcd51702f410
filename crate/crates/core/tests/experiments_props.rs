mod common;

use common::random_ratio_law;
use iqcalc::experiments::{
    canonical_experiment, deficiency, epsilon_deficient, levy_deficiency, more_informative,
    more_informative_by_bayes, more_informative_by_order, risk_from_bayes,
};
use iqcalc::BinaryExperiment;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const T: f64 = 1e-9;

fn experiments(seed: u64, n: usize) -> Vec<BinaryExperiment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| BinaryExperiment::new(random_ratio_law(&mut rng, 5)).unwrap())
        .collect()
}

/// A garbling of `e`: the ratio law of `e` averaged over a partition of its
/// atoms, which is `<=cx`-below and hence less informative.
fn garble(e: &BinaryExperiment) -> BinaryExperiment {
    let mu = e.mu();
    let n = mu.len();
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for chunk in (0..n).collect::<Vec<_>>().chunks(2) {
        let w: f64 = chunk.iter().map(|&i| mu.masses()[i]).sum();
        let m: f64 = chunk.iter().map(|&i| mu.masses()[i] * mu.locations()[i]).sum();
        xs.push(m / w);
        ws.push(w);
    }
    BinaryExperiment::new(iqcalc::AtomicDistribution::from_weighted(&xs, &ws).unwrap()).unwrap()
}

#[test]
fn risk_function_facts() {
    for e in experiments(1, 200) {
        let r = e.risk_function();
        assert!(r.vertices_close(&e.mu().negate().iqf(), 0.0));
        assert!((r.evaluate(0.0) - e.mu().mean()).abs() < 1e-12);
        assert!(r.evaluate(1.0).abs() < 1e-12);
        assert!(r.slopes().iter().all(|&s| s <= 0.0));
        // slope of the Bayes curve at 0 is E[Z]
        let b = e.bayes_risk_curve();
        assert!((b.slopes()[0] - e.mu().mean()).abs() < 1e-9);
    }
}

#[test]
fn bayes_range_and_duality() {
    for e in experiments(2, 200) {
        let b = e.bayes_risk_curve();
        for (pi, y) in b.vertices() {
            assert!(y >= -1e-12 && y <= pi.min(1.0 - pi) + 1e-12, "b({pi}) = {y}");
        }
        let r = risk_from_bayes(&b).unwrap();
        assert!(
            r.vertices_close(&e.risk_function(), 1e-9),
            "{r:?} vs {:?}",
            e.risk_function()
        );
        for k in 1..20 {
            let pi = k as f64 / 20.0;
            let direct = 1.0 - pi - pi * e.mu().idf().evaluate((1.0 - pi) / pi);
            assert!((b.evaluate(pi) - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn informativeness_routes_agree() {
    let es = experiments(3, 60);
    let mut positives = 0;
    for (i, a) in es.iter().enumerate() {
        let g = garble(a);
        let pairs = [(a, &g), (&g, a), (a, &es[(i + 1) % es.len()])];
        for (x, y) in pairs {
            let r = more_informative(x, y, T);
            assert_eq!(r, more_informative_by_bayes(x, y, T));
            assert_eq!(r, more_informative_by_order(x, y, T));
            assert_eq!(r, deficiency(x, y).delta2 <= 1e-9);
            positives += usize::from(r);
        }
        assert!(more_informative(a, &g, T));
    }
    assert!(positives >= 60);
}

#[test]
fn deficiency_routes_and_metric() {
    let es = experiments(4, 90);
    for w in es.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let d = deficiency(a, b);
        assert!((d.big_delta2 - levy_deficiency(a, b)).abs() < 1e-9);
        assert!(d.delta2 <= d.big_delta2 + 1e-15);
        assert!(epsilon_deficient(a, b, 4.0 * d.delta2 + 1e-9).unwrap());
        if d.delta2 > 1e-6 {
            assert!(!epsilon_deficient(a, b, 3.0 * d.delta2).unwrap());
        }
        let dd = |x: &BinaryExperiment, y: &BinaryExperiment| deficiency(x, y).big_delta2;
        assert_eq!(dd(a, a), 0.0);
        assert_eq!(dd(a, b), dd(b, a));
        assert!(dd(a, c) <= dd(a, b) + dd(b, c) + 1e-12);
    }
}

#[test]
fn canonical_form_reproduces_ratio_law() {
    for e in experiments(5, 200) {
        let c = canonical_experiment(e.mu()).unwrap();
        let back = BinaryExperiment::from_measures(&c.p, &c.p_prime).unwrap();
        assert_eq!(back.mu().len(), e.mu().len());
        for ((x, p), (y, q)) in back.mu().atoms().zip(e.mu().atoms()) {
            assert!((x - y).abs() < 1e-12 && (p - q).abs() < 1e-12);
        }
    }
}
