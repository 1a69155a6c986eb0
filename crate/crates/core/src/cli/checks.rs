//! Report builders behind `reproduce`, `verify` and `zeros`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::RunConfig;
use super::report::{Report, Row};
use crate::expform::{eval_at, sigma_bipoly, BiPoly, EvalConfig, ExpRatForm};
use crate::meanvalue::{section2_mean, section3_mean, MollifierPair};
use crate::numverify::{
    count_zeros_zeta, riemann_vonmangoldt, smoothed_moment, xi, xi_prime, xi_prime_critical_sign_changes,
    ComplexPoint, MomentConfig, MomentSpec, NumError, ZetaConfig,
};
use crate::polyalg::{rat, rat_to_f64, Rat, RatPoly};
use crate::proportions::{distinct_bound, ng_bound, xi_critical_bound, ProportionError};

/// Thresholds and frozen high-precision constants for the built-in parameters.
pub mod goldens {
    pub const KAPPA_G_MAX: f64 = 0.27442;
    /// Rounding slack on the printed upper bound.
    pub const KAPPA_G_SLACK: f64 = 5e-6;
    pub const KAPPA_G_MIN: f64 = 0.2690;
    pub const KAPPA_C_MIN: f64 = 0.86957;
    pub const KAPPA_C_SLACK: f64 = 5e-5;
    pub const KAPPA_C_MAX: f64 = 0.8705;
    pub const KAPPA_D_MIN: f64 = 0.66036;

    pub const SECTION2_MEAN: f64 = 1.753_222_553_429_837_437_355_160_884_64;
    pub const SECTION3_MEAN: f64 = 1.154_882_151_873_687_481_930_726_248_34;
    pub const MEAN_TOLERANCE: f64 = 1e-9;

    /// Zero counts `N(T)` of ζ on the critical line.
    pub const ZERO_COUNTS: [(f64, usize); 5] = [(50.0, 10), (100.0, 29), (200.0, 79), (500.0, 269), (1000.0, 649)];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReproduceTarget {
    Section2,
    Section3,
    Theorem1,
}

impl ReproduceTarget {
    pub fn name(self) -> &'static str {
        match self {
            ReproduceTarget::Section2 => "section2",
            ReproduceTarget::Section3 => "section3",
            ReproduceTarget::Theorem1 => "theorem1",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Config(#[from] super::config::ConfigError),
    #[error(transparent)]
    Proportion(#[from] ProportionError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("{0}")]
    Other(String),
}

pub fn reproduce(target: ReproduceTarget, cfg: &RunConfig, golden: bool) -> Result<Report, CheckError> {
    use goldens::*;
    let mut rep = Report::new("reproduce", target.name());
    let mut kappa_g = None;
    let mut kappa_c = None;
    if target != ReproduceTarget::Section3 {
        let pair = cfg.mollifier_pair()?;
        let mv = section2_mean(&pair).map_err(ProportionError::from)?;
        let k = ng_bound(&mv, &pair.r)?;
        rep.detail("section2_mean", json!(mv.c));
        rep.detail(
            "section2_breakdown",
            json!(mv.breakdown.iter().map(|(l, v)| json!({"term": l, "value": v})).collect::<Vec<_>>()),
        );
        rep.detail("kappa_G", json!(k));
        rep.push(Row::new("kappa_G", k, KAPPA_G_MAX, KAPPA_G_SLACK, super::report::Check::AtMost));
        rep.push(Row::at_least("kappa_G.lower", k, KAPPA_G_MIN));
        if golden {
            rep.push(Row::within("section2.mean", mv.c, SECTION2_MEAN, MEAN_TOLERANCE));
        }
        kappa_g = Some(k);
    }
    if target != ReproduceTarget::Section2 {
        let eta = cfg.eta_spec()?;
        let mv = section3_mean(&eta).map_err(ProportionError::from)?;
        let k = xi_critical_bound(&mv, &eta.r)?;
        rep.detail("section3_mean", json!(mv.c));
        rep.detail("kappa_c", json!(k));
        rep.push(Row::new("kappa_c", k, KAPPA_C_MIN, KAPPA_C_SLACK, super::report::Check::AtLeast));
        rep.push(Row::at_most("kappa_c.upper", k, KAPPA_C_MAX));
        if golden {
            rep.push(Row::within("section3.mean", mv.c, SECTION3_MEAN, MEAN_TOLERANCE));
        }
        kappa_c = Some(k);
    }
    if let (Some(g), Some(c)) = (kappa_g, kappa_c) {
        let d = distinct_bound(c, g);
        rep.detail("kappa_d", json!(d));
        rep.push(Row::at_least("kappa_d", d, KAPPA_D_MIN));
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyCheck {
    SigmaQuadrature,
    ExpformDerivatives,
    FunctionalEquation,
    Moment,
    ZeroCount,
}

impl VerifyCheck {
    pub fn name(self) -> &'static str {
        match self {
            VerifyCheck::SigmaQuadrature => "sigma-quadrature",
            VerifyCheck::ExpformDerivatives => "expform-derivatives",
            VerifyCheck::FunctionalEquation => "functional-equation",
            VerifyCheck::Moment => "moment",
            VerifyCheck::ZeroCount => "zero-count",
        }
    }
}

pub fn verify(check: VerifyCheck, t: Option<f64>, seed: u64, cfg: &RunConfig) -> Result<Report, CheckError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = Report::new("verify", check.name());
    rep.detail("seed", json!(seed));
    match check {
        VerifyCheck::SigmaQuadrature => sigma_quadrature(&mut rep, &mut rng, cfg)?,
        VerifyCheck::ExpformDerivatives => expform_derivatives(&mut rep, &mut rng),
        VerifyCheck::FunctionalEquation => functional_equation(&mut rep, &mut rng)?,
        VerifyCheck::Moment => moment(&mut rep, t.unwrap_or(5000.0))?,
        VerifyCheck::ZeroCount => zero_rows(&mut rep, t.unwrap_or(100.0), false)?,
    }
    Ok(rep)
}

pub fn zeros_count(t: f64, golden: bool) -> Result<Report, CheckError> {
    let mut rep = Report::new("zeros", "count");
    zero_rows(&mut rep, t, golden)?;
    Ok(rep)
}

fn simpson<F: Fn(f64) -> f64>(f: F, panels: usize) -> f64 {
    let h = 1.0 / panels as f64;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

fn sigma_quadrature(rep: &mut Report, rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Result<(), CheckError> {
    let pair = cfg.mollifier_pair()?;
    let theta = rat_to_f64(&cfg.theta);
    let (pi, pj) = (&pair.p1, &pair.p2);
    let (dpi, dpj) = (pi.derive(), pj.derive());
    let sigma = sigma_bipoly(pi, pj, &cfg.theta);
    for case in 0..10 {
        let a: f64 = rng.gen_range(-2.0..2.0);
        let b: f64 = rng.gen_range(-2.0..2.0);
        let quad = simpson(
            |x| (dpi.eval_f64(x) + a * theta * pi.eval_f64(x)) * (dpj.eval_f64(x) + b * theta * pj.eval_f64(x)),
            10_000,
        );
        rep.push(Row::within(format!("sigma[{case}]"), sigma.eval_f64(a, b), quad, 1e-10));
    }
    Ok(())
}

fn random_bipoly(rng: &mut ChaCha8Rng) -> BiPoly {
    let mut p = BiPoly::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let c = rat(rng.gen_range(-9..=9), rng.gen_range(1..=5));
        p.add_term(rng.gen_range(0..=3), rng.gen_range(0..=3), c);
    }
    p
}

/// Random sum of up to three `(p + E·q)/(a+b)^k` terms with `k ≤ 3`.
pub fn random_form(rng: &mut ChaCha8Rng) -> ExpRatForm {
    let mut f = ExpRatForm::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let k = rng.gen_range(0..=3);
        f = f.with_term(k, random_bipoly(rng), random_bipoly(rng));
    }
    f.with_scale(rat(rng.gen_range(1..=7), rng.gen_range(1..=7)))
}

fn expform_derivatives(rep: &mut Report, rng: &mut ChaCha8Rng) {
    const H: f64 = 1e-6;
    let cfg = EvalConfig::Double;
    for case in 0..20 {
        let f = random_form(rng);
        let (a, b) = loop {
            let a: f64 = rng.gen_range(-1.5..1.5);
            let b: f64 = rng.gen_range(-1.5..1.5);
            if (a + b).abs() > 0.5 {
                break (a, b);
            }
        };
        let exact = eval_at(&f.d_a(), a, b, cfg);
        let fd = eval_at(&f, a + H, b, cfg).and_then(|p| Ok((p - eval_at(&f, a - H, b, cfg)?) / (2.0 * H)));
        let rel = match (exact, fd) {
            (Ok(d), Ok(fd)) => (fd - d).abs() / d.abs().max(1.0),
            _ => f64::INFINITY,
        };
        rep.push(Row::within(format!("d_a[{case}].relative_error"), rel, 0.0, 1e-6));
        let commute = f.d_a().d_b() == f.d_b().d_a();
        rep.push(Row::within(format!("d_a_d_b[{case}].mismatch"), if commute { 0.0 } else { 1.0 }, 0.0, 0.0));
    }
}

fn functional_equation(rep: &mut Report, rng: &mut ChaCha8Rng) -> Result<(), CheckError> {
    let cfg = ZetaConfig::default();
    let mut worst = (0.0f64, 0.0f64);
    for case in 0..20 {
        let s = ComplexPoint::new(rng.gen_range(0.01..0.99), rng.gen_range(10.0..100.0));
        let x = xi(s, &cfg)?;
        let xr = xi(s.reflect(), &cfg)?;
        let d = xi_prime(s, &cfg)?;
        let dr = xi_prime(s.reflect(), &cfg)?;
        let r0 = (x - xr).norm() / x.norm();
        let r1 = (d + dr).norm() / d.norm();
        worst = (worst.0.max(r0), worst.1.max(r1));
        rep.push(Row::within(format!("xi[{case}].residual"), r0, 0.0, 1e-8));
        rep.push(Row::within(format!("xi_prime[{case}].residual"), r1, 0.0, 1e-7));
    }
    rep.detail("max_xi_residual", json!(worst.0));
    rep.detail("max_xi_prime_residual", json!(worst.1));
    Ok(())
}

/// Finite-height moment for `θ = 0.2, R = 1.023, P₁ = x, P₂ = 0`, against the asymptotic constant.
fn moment(rep: &mut Report, t: f64) -> Result<(), CheckError> {
    let pair = MollifierPair::new(rat(1, 5), Rat::new(1023.into(), 1000.into()), RatPoly::x(), RatPoly::zero())
        .map_err(|e| CheckError::Other(e.to_string()))?;
    let predicted = section2_mean(&pair).map_err(ProportionError::from)?.c;
    let spec = MomentSpec::new(t, 1.5 * t, 0.3, pair);
    let res = smoothed_moment(&spec, &MomentConfig::default())?;
    rep.detail("T", json!(t));
    rep.detail("moment", json!(res.value));
    rep.detail("predicted", json!(predicted));
    rep.detail("nodes", json!(res.nodes));
    rep.detail("sigma0", json!(res.sigma));
    rep.push(Row::within("moment/predicted", res.value / predicted, 1.0, 0.3));
    Ok(())
}

fn zero_rows(rep: &mut Report, t: f64, golden: bool) -> Result<(), CheckError> {
    let count = count_zeros_zeta(t)?;
    let formula = riemann_vonmangoldt(t);
    let xi_changes = xi_prime_critical_sign_changes(t)?;
    rep.detail("T", json!(t));
    rep.detail("zeros", json!(count));
    rep.detail("riemann_von_mangoldt", json!(formula));
    rep.detail("xi_prime_sign_changes", json!(xi_changes));
    rep.push(Row::within("zeros.count", count as f64, formula, 3.0));
    rep.push(Row::at_least("xi_prime.sign_changes", xi_changes as f64, 0.85 * count as f64));
    if golden {
        match goldens::ZERO_COUNTS.iter().find(|(h, _)| *h == t) {
            Some(&(_, n)) => rep.push(Row::within("zeros.golden", count as f64, n as f64, 0.0)),
            None => return Err(CheckError::Other(format!("no frozen zero count for T = {t}"))),
        }
    }
    Ok(())
}
