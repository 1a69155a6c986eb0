mod common;

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zlab::expform::{eval_at, lemma2_form, EvalConfig};
use zlab::meanvalue::{reference_params, section2_mean_with, section3_mean_with, MollifierPair};
use zlab::numverify::zeros::{count_zeros_zeta_with, xi_prime_critical_sign_changes_with};
use zlab::numverify::{
    count_zeros_zeta, mertens, mobius_sieve, smoothed_moment, xi_prime, xi_prime_critical_sign_changes, zeta_em,
    ComplexPoint, MomentConfig, MomentSpec, SignChangeConfig, ZetaConfig,
};
use zlab::polyalg::{rat, RatPoly};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn jet_oracle_reproduces_frozen_means() {
    assert!(rel(reference_c2(), C2_GOLDEN) < 1e-10, "{}", reference_c2());
    assert!(rel(reference_c3(), C3_GOLDEN) < 1e-8, "{}", reference_c3());
}

#[test]
fn high_precision_path_matches_frozen_means() {
    let hp = EvalConfig::HighPrecision { digits: 30 };
    let c2 = section2_mean_with(&reference_params::mollifier_pair(), hp).unwrap().c;
    let c3 = section3_mean_with(&reference_params::eta_spec(), hp).unwrap().c;
    assert!(rel(c2, C2_GOLDEN) < 1e-14);
    assert!(rel(c3, C3_GOLDEN) < 1e-14);
}

#[test]
fn identity_kernel_value() {
    // [Σ(−R,−R) − e^{2R}Σ(R,R)]/(−2Rθ), Σ(a,b) = 1 + (a+b)θ/2 + abθ²/3
    let (r, th) = (1.023, THETA);
    let sigma = |a: f64, b: f64| 1.0 + (a + b) * th / 2.0 + a * b * th * th / 3.0;
    let expected = (sigma(-r, -r) - (2.0 * r).exp() * sigma(r, r)) / (-2.0 * r * th);
    let f = lemma2_form(&RatPoly::x(), &RatPoly::x(), &rat(4, 7));
    let got = eval_at(&f, -r, -r, EvalConfig::Double).unwrap();
    assert!((got - expected).abs() < 1e-12 * expected.abs());
    assert!((got - 10.787).abs() < 5e-4, "{got}");
}

#[test]
fn zeta_matches_alternating_series() {
    let cfg = ZetaConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let s = Complex64::new(rng.gen_range(0.01..0.99), rng.gen_range(0.5..99.0));
        let a = zeta_em(ComplexPoint::from(s), &cfg).unwrap();
        let b = zeta_borwein(s, 140);
        assert!((a - b).norm() < 1e-8, "s = {s}: {a} vs {b}");
    }
}

#[test]
fn zeta_at_integers_by_direct_summation() {
    let cfg = ZetaConfig::default();
    // 10⁶ terms plus the integral tail N^{1−s}/(s−1) and the midpoint correction
    let direct = |s: f64| {
        let n = 1_000_000u64;
        let sum: f64 = (1..=n).rev().map(|k| (k as f64).powf(-s)).sum();
        sum + (n as f64).powf(1.0 - s) / (s - 1.0) - 0.5 * (n as f64).powf(-s)
    };
    for s in [2.0, 3.0] {
        let z = zeta_em(ComplexPoint::new(s, 0.0), &cfg).unwrap();
        assert!((z.re - direct(s)).abs() < 1e-12 && z.im.abs() < 1e-15);
    }
    let z2 = zeta_em(ComplexPoint::new(2.0, 0.0), &cfg).unwrap().re;
    assert!((z2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
}

#[test]
fn mobius_sieve_matches_factorization() {
    let mu = mobius_sieve(10_000);
    let mut m = 0i64;
    for n in 1..=10_000u64 {
        let expected = mobius_by_factoring(n);
        assert_eq!(mu[n as usize], expected, "mu({n})");
        m += expected as i64;
    }
    assert_eq!(mertens(10_000), m);
    assert_eq!(m, -23);
}

#[test]
fn xi_prime_is_imaginary_on_the_line() {
    let cfg = ZetaConfig::default();
    for t in [20.0, 50.0] {
        let d = xi_prime(ComplexPoint::new(0.5, t), &cfg).unwrap();
        assert!(d.re.abs() < 1e-8 * d.norm());
    }
}

fn desk_pair() -> MollifierPair {
    MollifierPair::new(rat(1, 5), rat(1023, 1000), RatPoly::x(), RatPoly::zero()).unwrap()
}

#[test]
fn desk_moment_matches_finite_height_main_term() {
    let (t, w, de) = (5000.0, 7500.0, 0.3);
    let got = smoothed_moment(&MomentSpec::new(t, w, de, desk_pair()), &MomentConfig::default()).unwrap();
    let main = twisted_moment_main_term(0.2, 1.023, &[0.0, 1.0], t, w, de);
    println!("quadrature {:.6}, finite-height main term {:.6}", got.value, main);
    assert!(rel(got.value, main) < 1e-3);
}

#[test]
fn moment_is_stable_under_node_doubling() {
    let spec = MomentSpec::new(5000.0, 7500.0, 0.3, desk_pair());
    let base = MomentConfig::default();
    let fine = MomentConfig {
        nodes_per_oscillation: 2.0 * base.nodes_per_oscillation,
        ..base
    };
    let a = smoothed_moment(&spec, &base).unwrap();
    let b = smoothed_moment(&spec, &fine).unwrap();
    assert!(b.nodes > a.nodes);
    assert!(rel(a.value, b.value) < 5e-3);
}

#[test]
fn moment_far_right_stays_bounded() {
    // ψ₁ = 1 (y < 2), so the average of |ζ(3+it)|² tends to Σ n^{−6}.
    let zeta6: f64 = (1..200_000u64).map(|n| (n as f64).powi(-6)).sum();
    let pair = MollifierPair::new(rat(1, 20), rat(1023, 1000), RatPoly::x(), RatPoly::zero()).unwrap();
    for t in [1e3, 1e4] {
        let mut spec = MomentSpec::new(t, 1.5 * t, 0.3, pair.clone());
        spec.sigma = Some(3.0);
        let v = smoothed_moment(&spec, &MomentConfig::default()).unwrap().value;
        assert!((v - zeta6).abs() < 1e-3, "T = {t}: {v}");
    }
}

#[test]
fn counts_survive_grid_halving() {
    let base = SignChangeConfig::default();
    let fine = SignChangeConfig {
        step: base.step / 2.0,
        ..base
    };
    for t in [50.0, 100.0] {
        assert!(count_zeros_zeta_with(t, &fine).unwrap() >= count_zeros_zeta_with(t, &base).unwrap());
        assert!(
            xi_prime_critical_sign_changes_with(t, &fine).unwrap()
                >= xi_prime_critical_sign_changes_with(t, &base).unwrap()
        );
    }
    assert!(count_zeros_zeta(200.0).unwrap() >= count_zeros_zeta(100.0).unwrap());
    assert!(xi_prime_critical_sign_changes(50.0).unwrap() as f64 >= 0.85 * count_zeros_zeta(50.0).unwrap() as f64);
}
