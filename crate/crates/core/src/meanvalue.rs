//! The two mollified mean-value constants.
//!
//! * [`section2_mean`]: second moment of `ζψ₁ + ζ'ψ₂` on the line `σ₀ = 1/2 − R/L`,
//!   reduced to `g(P₁,P₁) + ∂_b g(P₁,P₂) + ∂_a g(P₂,P₁) + ∂_a∂_b g(P₂,P₂)` at `a = b = −R`.
//! * [`section3_mean`]: second moment of `Uψ`, where `U` is the differential
//!   operator `1 − δ + δ(1 + 2∂)Q(−∂)` applied to ζ, reduced to the operator
//!   sandwich around `g(P,P)`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::expform::{
    apply_operator, eval_at, lemma2_form, EvalConfig, ExpFormError, ExpRatForm, OperatorSpec, Var,
};
use crate::polyalg::{rat, rat_to_f64, Rat, RatPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanValueError {
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Form(#[from] ExpFormError),
    #[error("mean value {0} is not positive")]
    NonPositive(f64),
}

/// Largest admissible mollifier length.
pub fn theta_max() -> Rat {
    rat(4, 7)
}

fn check_theta_r(theta: &Rat, r: &Rat) -> Result<(), MeanValueError> {
    if !theta.is_positive() || *theta > theta_max() {
        return Err(MeanValueError::InvalidSpec(format!(
            "theta = {theta} outside (0, 4/7]"
        )));
    }
    if !r.is_positive() {
        return Err(MeanValueError::InvalidSpec(format!("R = {r} must be positive")));
    }
    Ok(())
}

/// Mollifier data for the `ζψ₁ + ζ'ψ₂` moment.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifierPair {
    pub theta: Rat,
    pub r: Rat,
    pub p1: RatPoly,
    pub p2: RatPoly,
}

impl MollifierPair {
    pub fn new(theta: Rat, r: Rat, p1: RatPoly, p2: RatPoly) -> Result<Self, MeanValueError> {
        let pair = MollifierPair { theta, r, p1, p2 };
        pair.validate()?;
        Ok(pair)
    }

    /// Skips validation; for experiments that deliberately break the boundary conditions.
    pub fn new_unchecked(theta: Rat, r: Rat, p1: RatPoly, p2: RatPoly) -> Self {
        MollifierPair { theta, r, p1, p2 }
    }

    pub fn validate(&self) -> Result<(), MeanValueError> {
        check_theta_r(&self.theta, &self.r)?;
        let zero = Rat::zero();
        if !self.p1.eval(&zero).is_zero() || !self.p2.eval(&zero).is_zero() {
            return Err(MeanValueError::InvalidSpec("P1(0) and P2(0) must be 0".into()));
        }
        if !self.p1.eval(&Rat::one()).is_one() {
            return Err(MeanValueError::InvalidSpec("P1(1) must be 1".into()));
        }
        Ok(())
    }
}

/// Parameters of the `ξ'` critical-line argument.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaSpec {
    pub theta: Rat,
    pub r: Rat,
    pub delta: Rat,
    pub p: RatPoly,
    pub q: RatPoly,
}

impl EtaSpec {
    pub fn new(theta: Rat, r: Rat, delta: Rat, p: RatPoly, q: RatPoly) -> Result<Self, MeanValueError> {
        let spec = EtaSpec { theta, r, delta, p, q };
        spec.validate()?;
        Ok(spec)
    }

    pub fn new_unchecked(theta: Rat, r: Rat, delta: Rat, p: RatPoly, q: RatPoly) -> Self {
        EtaSpec { theta, r, delta, p, q }
    }

    pub fn validate(&self) -> Result<(), MeanValueError> {
        check_theta_r(&self.theta, &self.r)?;
        if !self.delta.is_positive() || self.delta >= Rat::one() {
            return Err(MeanValueError::InvalidSpec(format!(
                "delta = {} outside (0, 1)",
                self.delta
            )));
        }
        if !self.p.eval(&Rat::zero()).is_zero() || !self.p.eval(&Rat::one()).is_one() {
            return Err(MeanValueError::InvalidSpec("P(0) must be 0 and P(1) must be 1".into()));
        }
        if !self.q.eval(&Rat::zero()).is_one() {
            return Err(MeanValueError::InvalidSpec("Q(0) must be 1".into()));
        }
        let dq = self.q.derive();
        if dq != dq.reflect(&Rat::one()) {
            return Err(MeanValueError::InvalidSpec("Q'(x) must equal Q'(1-x)".into()));
        }
        Ok(())
    }
}

/// A mean-value constant together with the labelled contributions that sum to it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanValue {
    pub c: f64,
    pub breakdown: Vec<(String, f64)>,
}

/// The four `(form, label)` pieces whose sum is the `ζψ₁ + ζ'ψ₂` moment.
pub fn section2_terms(m: &MollifierPair) -> Vec<(&'static str, ExpRatForm)> {
    let theta = &m.theta;
    vec![
        ("g(P1,P1)", lemma2_form(&m.p1, &m.p1, theta)),
        ("d_b g(P1,P2)", lemma2_form(&m.p1, &m.p2, theta).d_b()),
        ("d_a g(P2,P1)", lemma2_form(&m.p2, &m.p1, theta).d_a()),
        ("d_a d_b g(P2,P2)", lemma2_form(&m.p2, &m.p2, theta).d_a().d_b()),
    ]
}

pub fn section2_form(m: &MollifierPair) -> ExpRatForm {
    section2_terms(m)
        .into_iter()
        .fold(ExpRatForm::zero(), |acc, (_, f)| acc.add(&f))
}

pub fn section2_mean(m: &MollifierPair) -> Result<MeanValue, MeanValueError> {
    section2_mean_with(m, EvalConfig::Double)
}

pub fn section2_mean_with(m: &MollifierPair, cfg: EvalConfig) -> Result<MeanValue, MeanValueError> {
    let r = -rat_to_f64(&m.r);
    let mut breakdown = Vec::with_capacity(4);
    for (label, form) in section2_terms(m) {
        breakdown.push((label.to_string(), eval_at(&form, r, r, cfg)?));
    }
    let c = breakdown.iter().map(|(_, v)| v).sum();
    Ok(MeanValue { c, breakdown })
}

pub fn eta_operator(e: &EtaSpec, variable: Var) -> OperatorSpec {
    OperatorSpec {
        delta: e.delta.clone(),
        q: e.q.clone(),
        variable,
    }
}

/// Operator sandwich around `g(P,P)`, `a`-operator applied first.
pub fn section3_form(e: &EtaSpec) -> ExpRatForm {
    let base = lemma2_form(&e.p, &e.p, &e.theta);
    let in_a = apply_operator(&base, &eta_operator(e, Var::A));
    apply_operator(&in_a, &eta_operator(e, Var::B))
}

pub fn section3_mean(e: &EtaSpec) -> Result<MeanValue, MeanValueError> {
    section3_mean_with(e, EvalConfig::Double)
}

pub fn section3_mean_with(e: &EtaSpec, cfg: EvalConfig) -> Result<MeanValue, MeanValueError> {
    let r = -rat_to_f64(&e.r);
    let base = lemma2_form(&e.p, &e.p, &e.theta);
    let c = eval_at(&section3_form(e), r, r, cfg)?;
    let unmollified = eval_at(&base, r, r, cfg)?;
    Ok(MeanValue {
        c,
        breakdown: vec![
            ("g(P,P)".to_string(), unmollified),
            ("operator sandwich".to_string(), c),
        ],
    })
}

/// The published parameter choices, as exact decimals.
pub mod reference_params {
    use super::*;
    use crate::polyalg::{p_basis, parse_rat, q_basis, BasisKind};

    fn rats(v: &[&str]) -> Vec<Rat> {
        v.iter().map(|s| parse_rat(s).expect("literal")).collect()
    }

    pub const P1_COEFFS: [&str; 2] = ["-0.064", "0.112"];
    pub const P2_COEFFS: [&str; 3] = ["1.305", "-0.276", "-0.025"];
    pub const P_COEFFS: [&str; 3] = ["-0.274", "-0.334", "0.005"];
    pub const Q_COEFFS: [&str; 3] = ["-0.609", "-0.572", "-4.895"];
    pub const SECTION2_R: &str = "1.023";
    pub const SECTION3_R: &str = "1.104";
    pub const SECTION3_DELTA: &str = "0.869";

    pub fn mollifier_pair() -> MollifierPair {
        MollifierPair::new(
            theta_max(),
            parse_rat(SECTION2_R).unwrap(),
            p_basis(BasisKind::Section2P1, &rats(&P1_COEFFS)),
            p_basis(BasisKind::Section2P2, &rats(&P2_COEFFS)),
        )
        .expect("reference mollifier pair is valid")
    }

    pub fn eta_spec() -> EtaSpec {
        EtaSpec::new(
            theta_max(),
            parse_rat(SECTION3_R).unwrap(),
            parse_rat(SECTION3_DELTA).unwrap(),
            p_basis(BasisKind::Section3P, &rats(&P_COEFFS)),
            q_basis(&rats(&Q_COEFFS)),
        )
        .expect("reference eta parameters are valid")
    }
}
