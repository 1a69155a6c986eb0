//! Mean-value constants to zero-count proportions.
//!
//! With `N(T) ~ (T/2π) log T`, a moment bound `(1/T)∫|F(σ₀+it)|² dt → c` on the
//! line `σ₀ = 1/2 − R/L` turns into a proportion through `log c` and `R` alone.

use thiserror::Error;

use crate::meanvalue::{
    section2_mean, section3_mean, EtaSpec, MeanValue, MeanValueError, MollifierPair,
};
use crate::polyalg::{rat_to_f64, Rat};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProportionError {
    #[error("mean value {0} must be positive to take its logarithm")]
    NonPositiveMean(f64),
    #[error("shift R = {0} must be positive")]
    NonPositiveShift(f64),
    #[error(transparent)]
    MeanValue(#[from] MeanValueError),
}

fn check(c: &MeanValue, r: &Rat) -> Result<f64, ProportionError> {
    if !(c.c > 0.0) {
        return Err(ProportionError::NonPositiveMean(c.c));
    }
    let r = rat_to_f64(r);
    if !(r > 0.0) {
        return Err(ProportionError::NonPositiveShift(r));
    }
    Ok(r)
}

/// Upper bound for the share of zeros of `ζψ₁ + ζ'ψ₂` right of the critical line: `log(c)/(2R)`.
pub fn ng_bound(c: &MeanValue, r: &Rat) -> Result<f64, ProportionError> {
    let r = check(c, r)?;
    Ok(c.c.ln() / (2.0 * r))
}

/// Lower bound for the share of `ξ'` zeros on the critical line: `1 − log(c)/R`.
pub fn xi_critical_bound(c: &MeanValue, r: &Rat) -> Result<f64, ProportionError> {
    let r = check(c, r)?;
    Ok(1.0 - c.c.ln() / r)
}

/// Lower bound for the share of distinct zeros: `1/2 + κ_c/2 − κ_G`.
pub fn distinct_bound(kappa_c: f64, kappa_g: f64) -> f64 {
    0.5 + kappa_c / 2.0 - kappa_g
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProportionReport {
    pub kappa_g: f64,
    pub kappa_c: f64,
    pub kappa_d: f64,
    pub pair: MollifierPair,
    pub eta: EtaSpec,
    pub mean_g: MeanValue,
    pub mean_c: MeanValue,
}

impl ProportionReport {
    pub fn compute(pair: &MollifierPair, eta: &EtaSpec) -> Result<Self, ProportionError> {
        let mean_g = section2_mean(pair)?;
        let mean_c = section3_mean(eta)?;
        let kappa_g = ng_bound(&mean_g, &pair.r)?;
        let kappa_c = xi_critical_bound(&mean_c, &eta.r)?;
        Ok(ProportionReport {
            kappa_g,
            kappa_c,
            kappa_d: distinct_bound(kappa_c, kappa_g),
            pair: pair.clone(),
            eta: eta.clone(),
            mean_g,
            mean_c,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{parse_rat, rat_from_f64, rat_int};

    fn mv(c: f64) -> MeanValue {
        MeanValue { c, breakdown: vec![] }
    }

    #[test]
    fn ng_bound_examples() {
        let r = parse_rat("1.023").unwrap();
        let k = ng_bound(&mv(1.7533), &r).unwrap();
        assert!((k - 0.27442).abs() < 5e-5, "{k}");
        assert_eq!(ng_bound(&mv(1.0), &r).unwrap(), 0.0);
        let rf = 1.023f64;
        assert!((ng_bound(&mv((2.0 * rf).exp()), &r).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn xi_bound_examples() {
        let r = parse_rat("1.104").unwrap();
        let k = xi_critical_bound(&mv(1.1549), &r).unwrap();
        assert!((k - 0.86957).abs() < 5e-5, "{k}");
        assert_eq!(xi_critical_bound(&mv(1.0), &r).unwrap(), 1.0);
        assert!(xi_critical_bound(&mv(1.104f64.exp()), &r).unwrap().abs() < 1e-15);
    }

    #[test]
    fn distinct_examples() {
        assert!((distinct_bound(0.86957, 0.27442) - 0.660365).abs() < 1e-12);
        assert_eq!(distinct_bound(1.0, 0.0), 1.0);
        assert_eq!(distinct_bound(0.0, 0.5), 0.0);
    }

    #[test]
    fn rejects_non_positive_mean() {
        let r = rat_int(1);
        assert!(matches!(ng_bound(&mv(0.0), &r), Err(ProportionError::NonPositiveMean(_))));
        assert!(matches!(xi_critical_bound(&mv(-1.0), &r), Err(ProportionError::NonPositiveMean(_))));
        assert!(matches!(ng_bound(&mv(f64::NAN), &r), Err(ProportionError::NonPositiveMean(_))));
    }

    #[test]
    fn doubling_r_halves_ng_bound() {
        let r = rat_from_f64(0.8);
        let a = ng_bound(&mv(2.5), &r).unwrap();
        let b = ng_bound(&mv(2.5), &(&r * rat_int(2))).unwrap();
        assert_eq!(a, 2.0 * b);
    }
}
