//! Gaussian-smoothed second moment of `G = ζψ₁ + ζ'ψ₂` at finite height.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::mollifier::{Mollifier, PsiSource};
use super::zeta::{zeta_pair_on_line, LineTable, ZetaConfig};
use super::NumError;
use crate::meanvalue::MollifierPair;
use crate::polyalg::rat_to_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSpec {
    /// Height parameter `T`; fixes `L = log T` and `y = T^θ`.
    pub t_param: f64,
    /// Centre of the Gaussian window, `T ≤ w ≤ 2T`.
    pub w: f64,
    /// Window width exponent: `Δ = T^{1−delta_exp}`.
    pub delta_exp: f64,
    pub pair: MollifierPair,
    /// Integration never goes below this height.
    pub t0: f64,
    /// Vertical line to integrate on; `None` means `σ₀ = 1/2 − R/L`.
    pub sigma: Option<f64>,
}

impl MomentSpec {
    pub fn new(t_param: f64, w: f64, delta_exp: f64, pair: MollifierPair) -> Self {
        MomentSpec {
            t_param,
            w,
            delta_exp,
            pair,
            t0: 2.0,
            sigma: None,
        }
    }

    pub fn validate(&self) -> Result<(), NumError> {
        if !(self.t_param > 1.0) {
            return Err(NumError::InvalidConfig(format!("T = {} must exceed 1", self.t_param)));
        }
        if !(self.w >= self.t_param && self.w <= 2.0 * self.t_param) {
            return Err(NumError::InvalidConfig(format!(
                "w = {} must lie in [T, 2T] = [{}, {}]",
                self.w,
                self.t_param,
                2.0 * self.t_param
            )));
        }
        if !(self.delta_exp > 0.0 && self.delta_exp < 1.0) {
            return Err(NumError::InvalidConfig(format!(
                "delta_exp = {} must lie in (0, 1)",
                self.delta_exp
            )));
        }
        Ok(())
    }

    pub fn log_t(&self) -> f64 {
        self.t_param.ln()
    }

    /// Gaussian width `Δ = T^{1−δ}`.
    pub fn width(&self) -> f64 {
        self.t_param.powf(1.0 - self.delta_exp)
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma
            .unwrap_or_else(|| 0.5 - rat_to_f64(&self.pair.r) / self.log_t())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentConfig {
    /// Simpson nodes per local oscillation length `2π/log(t/2π)` of ζ.
    pub nodes_per_oscillation: f64,
    /// Half-width of the integration window in units of `Δ`.
    pub truncation: f64,
    pub max_nodes: usize,
    pub zeta: ZetaConfig,
}

impl Default for MomentConfig {
    fn default() -> Self {
        MomentConfig {
            nodes_per_oscillation: 8.0,
            truncation: 8.0,
            max_nodes: 4_000_000,
            zeta: ZetaConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult {
    pub value: f64,
    pub nodes: usize,
    pub width: f64,
    pub sigma: f64,
}

/// Simpson grid on `[lo, hi]` resolving oscillations up to height `hi`.
fn simpson_grid(lo: f64, hi: f64, cfg: &MomentConfig) -> Result<(usize, f64), NumError> {
    let scale = 2.0 * PI / (hi.abs() / (2.0 * PI)).ln().max(1.0);
    let target = scale / cfg.nodes_per_oscillation;
    let mut intervals = ((hi - lo) / target).ceil().max(2.0) as usize;
    intervals += intervals % 2;
    if intervals + 1 > cfg.max_nodes {
        return Err(NumError::BudgetExceeded {
            needed: intervals + 1,
            cap: cfg.max_nodes,
        });
    }
    Ok((intervals, (hi - lo) / intervals as f64))
}

/// `(1/(Δ√π)) ∫ e^{−(t−w)²/Δ²} f(t) dt` over `[max(w − kΔ, lower), w + kΔ]`.
pub fn gaussian_average<F>(
    f: F,
    w: f64,
    width: f64,
    lower: f64,
    cfg: &MomentConfig,
) -> Result<(f64, usize), NumError>
where
    F: Fn(f64) -> Result<f64, NumError> + Sync,
{
    let lo = (w - cfg.truncation * width).max(lower);
    let hi = w + cfg.truncation * width;
    let (intervals, h) = simpson_grid(lo, hi, cfg)?;
    let weighted: Vec<f64> = (0..=intervals)
        .into_par_iter()
        .map(|i| {
            let t = lo + h * i as f64;
            let simpson = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let gauss = (-((t - w) / width).powi(2)).exp();
            f(t).map(|v| simpson * gauss * v)
        })
        .collect::<Result<_, _>>()?;
    let integral = pairwise_sum(&weighted) * h / 3.0;
    Ok((integral / (width * PI.sqrt()), intervals + 1))
}

/// Summation order fixed by the slice layout, independent of thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn smoothed_moment(spec: &MomentSpec, cfg: &MomentConfig) -> Result<MomentResult, NumError> {
    spec.validate()?;
    cfg.zeta.validate()?;
    let sigma = spec.sigma0();
    let width = spec.width();
    let hi = spec.w + cfg.truncation * width;
    let psi1 = Mollifier::new(PsiSource::Psi1(&spec.pair), spec.t_param)?;
    let psi2 = Mollifier::new(PsiSource::Psi2(&spec.pair), spec.t_param)?;
    let max_terms = cfg
        .zeta
        .terms_for(num_complex::Complex64::new(sigma, hi));
    let table = LineTable::new(sigma, max_terms);
    let integrand = |t: f64| -> Result<f64, NumError> {
        let s = num_complex::Complex64::new(sigma, t);
        let (z, dz) = zeta_pair_on_line(t, &table, &cfg.zeta)?;
        let mut g = z * psi1.eval(s);
        if !psi2.is_empty() {
            g += dz * psi2.eval(s);
        }
        Ok(g.norm_sqr())
    };
    let (value, nodes) = gaussian_average(integrand, spec.w, width, spec.t0, cfg)?;
    Ok(MomentResult {
        value,
        nodes,
        width,
        sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanvalue::reference_params;

    #[test]
    fn weight_is_normalized() {
        let cfg = MomentConfig::default();
        let (v, _) = gaussian_average(|_| Ok(1.0), 1000.0, 50.0, 2.0, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn node_cap_is_enforced() {
        let cfg = MomentConfig { max_nodes: 100, ..Default::default() };
        let r = gaussian_average(|_| Ok(1.0), 1000.0, 50.0, 2.0, &cfg);
        assert!(matches!(r, Err(NumError::BudgetExceeded { .. })));
    }

    #[test]
    fn spec_validation() {
        let pair = reference_params::mollifier_pair();
        assert!(MomentSpec::new(100.0, 50.0, 0.3, pair.clone()).validate().is_err());
        assert!(MomentSpec::new(100.0, 150.0, 1.0, pair.clone()).validate().is_err());
        assert!(MomentSpec::new(100.0, 150.0, 0.5, pair).validate().is_ok());
    }

    #[test]
    fn pairwise_sum_is_order_stable() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let a = pairwise_sum(&xs);
        let b = pairwise_sum(&xs);
        assert_eq!(a, b);
        assert!((a - xs.iter().sum::<f64>()).abs() < 1e-12);
    }
}
