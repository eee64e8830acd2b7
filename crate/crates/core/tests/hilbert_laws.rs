use std::f64::consts::PI;

use hilbert_bodies::hilbert::{
    finite_hilbert_invert, fractional_derivative_at_zero, hilbert_on_interval, hilbert_sqrt_monomial, pv_hilbert_oracle,
    WeightedSeries,
};
use hilbert_bodies_oracle::tanh_sinh;
use proptest::prelude::*;

fn series() -> impl Strategy<Value = WeightedSeries> {
    (-3.0..2.0f64, 0.2..3.0f64, prop::collection::vec(-1.0..1.0f64, 1..=13))
        .prop_map(|(a, w, g)| WeightedSeries::new(a, a + w, g).unwrap())
}

fn interior(s: &WeightedSeries, count: usize) -> Vec<f64> {
    (0..count).map(|i| s.a + (s.b - s.a) * (i as f64 + 0.5) / count as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn spectral_matches_principal_value(f in series()) {
        for t in interior(&f, 20) {
            let fast = hilbert_on_interval(&f, t).unwrap();
            let slow = pv_hilbert_oracle(|s| f.eval(s), f.a, f.b, t).unwrap();
            prop_assert!((fast - slow).abs() <= 1e-6, "t={t}: {fast} vs {slow}");
        }
    }

    #[test]
    fn multiplying_by_s_intertwines(f in series()) {
        let sf = f.times_t();
        let mass = f.integral() / PI;
        for t in interior(&f, 20) {
            let lhs = hilbert_on_interval(&sf, t).unwrap();
            let rhs = t * hilbert_on_interval(&f, t).unwrap() - mass;
            prop_assert!((lhs - rhs).abs() <= 1e-8);
        }
        // The same identity holds off the interval.
        for t in [f.a - 0.7, f.b + 0.3] {
            let lhs = sf.hilbert(t).unwrap();
            let rhs = t * f.hilbert(t).unwrap() - mass;
            prop_assert!((lhs - rhs).abs() <= 1e-8, "t={t}: {lhs} vs {rhs}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn monomial_transforms_have_degree_k_plus_one(a in -2.0..1.0f64, w in 0.3..2.0f64, k in 0usize..=12) {
        let p = hilbert_sqrt_monomial(a, a + w, k).unwrap();
        prop_assert_eq!(p.degree(), k + 1);
        prop_assert_eq!(p.coeffs[k + 1], 1.0);
    }

    #[test]
    fn inversion_recovers_the_profile(a in -2.0..1.0f64, w in 0.5..3.0f64, g in prop::collection::vec(-1.0..1.0f64, 1..=11)) {
        let f = WeightedSeries::new(a, a + w, g).unwrap();
        let total = f.integral();
        for t in interior(&f, 16) {
            let back = finite_hilbert_invert(|s| hilbert_on_interval(&f, s).unwrap(), f.a, f.b, total, t).unwrap();
            prop_assert!((back - f.eval(t)).abs() <= 1e-6);
        }
    }
}

/// (1/π)·PV∫_ℝ G(s)/(t−s) ds with G = HF. The two exterior half-lines are
/// mapped onto (0, 1) by s = b + y/(1−y) and s = a − y/(1−y), so no
/// truncation is needed.
fn transform_twice(f: &WeightedSeries, t: f64) -> f64 {
    let g = |s: f64| f.hilbert(s).unwrap();
    let inside = pv_hilbert_oracle(g, f.a, f.b, t).unwrap();
    let half_line = |sign: f64, edge: f64| {
        tanh_sinh(
            |y: f64| {
                if y >= 1.0 {
                    return 0.0;
                }
                let s = edge + sign * y / (1.0 - y);
                g(s) / (t - s) / ((1.0 - y) * (1.0 - y))
            },
            0.0,
            1.0,
            1e-10,
        )
        .unwrap()
    };
    inside + (half_line(1.0, f.b) + half_line(-1.0, f.a)) / PI
}

#[test]
fn transform_is_an_anti_involution() {
    let cases = [
        WeightedSeries::new(-1.0, 1.0, vec![1.0]).unwrap(),
        WeightedSeries::new(-0.5, 2.0, vec![0.3, -0.7, 0.2]).unwrap(),
        WeightedSeries::new(0.5, 1.5, vec![1.0, 0.0, 0.4, -0.1, 0.05]).unwrap(),
    ];
    for f in &cases {
        for t in interior(f, 5) {
            let twice = transform_twice(f, t);
            assert!((twice + f.eval(t)).abs() <= 1e-6, "t={t}: {twice} vs {}", -f.eval(t));
        }
    }
}

#[test]
fn fractional_derivative_of_the_disk_transform() {
    // Unit disk: A(t) = 2√(1−t²), so the series has the single coefficient 2.
    let disk = WeightedSeries::new(-1.0, 1.0, vec![2.0]).unwrap();
    let ours = fractional_derivative_at_zero(|x| disk.hilbert(x).unwrap(), -0.5).unwrap();

    // On the negative axis HA(−t) = −2t for t < 1 and −2(t − √(t²−1)) beyond.
    // Head: ∫_0^1 t^{−1/2}·(−2t) dt. Tail: t = 1/y² turns
    // ∫_1^∞ t^{−1/2}·HA(−t) dt into −4∫_0^1 dy / (1 + √(1−y⁴)).
    let head = tanh_sinh(|t| -2.0 * t.sqrt(), 0.0, 1.0, 1e-13).unwrap();
    let tail = tanh_sinh(|y| -4.0 / (1.0 + (1.0 - y.powi(4)).max(0.0).sqrt()), 0.0, 1.0, 1e-13).unwrap();
    let oracle = (head + tail) / PI.sqrt();
    assert!((ours - oracle).abs() < 1e-8, "{ours} vs {oracle}");
}
