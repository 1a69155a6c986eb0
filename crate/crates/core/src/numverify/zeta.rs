//! ζ and ζ' by Euler–Maclaurin summation, and the completing factor `H`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{digamma, ln_gamma};
use super::{ComplexPoint, NumError};

/// `B_{2k}` for `k = 1..=8`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const NEAR_POLE: f64 = 1e-6;

/// Truncation rule for the Euler–Maclaurin evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaConfig {
    /// `N(t) = ceil(terms_per_height · |t|) + base_terms`.
    pub terms_per_height: f64,
    pub base_terms: usize,
    /// Number of Bernoulli corrections, at most 8.
    pub bernoulli_order: usize,
    /// `N` is doubled (up to 8 times) while the first omitted correction exceeds this.
    pub target_abs_error: f64,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        ZetaConfig {
            terms_per_height: 1.2,
            base_terms: 30,
            bernoulli_order: 6,
            target_abs_error: 1e-12,
        }
    }
}

impl ZetaConfig {
    pub fn validate(&self) -> Result<(), NumError> {
        if self.bernoulli_order == 0 || self.bernoulli_order > BERNOULLI.len() {
            return Err(NumError::InvalidConfig(format!(
                "bernoulli_order must be in 1..=8, got {}",
                self.bernoulli_order
            )));
        }
        Ok(())
    }

    pub fn terms_for(&self, s: Complex64) -> usize {
        let mut n = (self.terms_per_height * s.im.abs()).ceil() as usize + self.base_terms;
        for _ in 0..8 {
            if remainder_estimate(s, n, self.bernoulli_order) <= self.target_abs_error {
                break;
            }
            n *= 2;
        }
        n
    }
}

/// Size of the first omitted Euler–Maclaurin correction.
fn remainder_estimate(s: Complex64, n: usize, order: usize) -> f64 {
    let k = order + 1;
    let b = if k <= BERNOULLI.len() { BERNOULLI[k - 1].abs() } else { 54.97 };
    let mut poch = 1.0;
    for j in 0..(2 * k - 1) {
        poch *= (s + j as f64).norm();
    }
    let fact: f64 = (1..=2 * k).map(|i| i as f64).product();
    b / fact * poch * (n as f64).powf(-s.re - 2.0 * k as f64 + 1.0)
}

/// Precomputed `ln n` and `n^{-σ}` for repeated evaluation on one vertical line.
#[derive(Debug, Clone)]
pub struct LineTable {
    sigma: f64,
    ln_n: Vec<f64>,
    n_pow: Vec<f64>,
}

impl LineTable {
    pub fn new(sigma: f64, max_n: usize) -> Self {
        let ln_n: Vec<f64> = (1..=max_n).map(|n| (n as f64).ln()).collect();
        let n_pow = ln_n.iter().map(|l| (-sigma * l).exp()).collect();
        LineTable { sigma, ln_n, n_pow }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.ln_n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_n.is_empty()
    }
}

fn check_pole(s: Complex64) -> Result<(), NumError> {
    if (s - 1.0).norm() < NEAR_POLE {
        return Err(NumError::NearPole(s.re, s.im));
    }
    Ok(())
}

pub fn zeta_em(s: ComplexPoint, cfg: &ZetaConfig) -> Result<Complex64, NumError> {
    zeta_pair(s, cfg).map(|(z, _)| z)
}

pub fn zeta_prime_em(s: ComplexPoint, cfg: &ZetaConfig) -> Result<Complex64, NumError> {
    zeta_pair(s, cfg).map(|(_, d)| d)
}

/// `(ζ(s), ζ'(s))` in one pass; the derivative differentiates every
/// Euler–Maclaurin term exactly.
pub fn zeta_pair(s: ComplexPoint, cfg: &ZetaConfig) -> Result<(Complex64, Complex64), NumError> {
    cfg.validate()?;
    let s = s.to_complex();
    check_pole(s)?;
    let n = cfg.terms_for(s);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        let ln_k = (k as f64).ln();
        let term = (-s * ln_k).exp();
        sum += term;
        dsum -= term * ln_k;
    }
    let (tail, dtail) = em_tail(s, n, cfg.bernoulli_order);
    Ok((sum + tail, dsum + dtail))
}

/// Same as [`zeta_pair`] with the head sum read from a table for `Re s = table.sigma()`.
pub fn zeta_pair_on_line(
    t: f64,
    table: &LineTable,
    cfg: &ZetaConfig,
) -> Result<(Complex64, Complex64), NumError> {
    let s = Complex64::new(table.sigma, t);
    check_pole(s)?;
    let n = cfg.terms_for(s);
    if n > table.len() + 1 {
        return Err(NumError::InvalidConfig(format!(
            "line table holds {} terms, {} needed at t = {t}",
            table.len(),
            n
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    for k in 0..n - 1 {
        let ln_k = table.ln_n[k];
        let (sin, cos) = (t * ln_k).sin_cos();
        let term = Complex64::new(table.n_pow[k] * cos, -table.n_pow[k] * sin);
        sum += term;
        dsum -= term * ln_k;
    }
    let (tail, dtail) = em_tail(s, n, cfg.bernoulli_order);
    Ok((sum + tail, dsum + dtail))
}

/// Integral, boundary and Bernoulli terms at cut-off `N`, with their s-derivatives.
fn em_tail(s: Complex64, n: usize, order: usize) -> (Complex64, Complex64) {
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp();
    let sm1 = s - 1.0;
    let integral = nf * n_pow / sm1;
    let dintegral = -ln_n * integral - integral / sm1;
    let mut value = integral + 0.5 * n_pow;
    let mut deriv = dintegral - 0.5 * ln_n * n_pow;

    // poch = s(s+1)…(s+2k−2), carried with its derivative
    let mut poch = s;
    let mut dpoch = Complex64::new(1.0, 0.0);
    let mut fact = 2.0;
    let mut n_power = n_pow / nf;
    for k in 1..=order {
        if k > 1 {
            for j in [2 * k - 3, 2 * k - 2] {
                let f = s + j as f64;
                dpoch = dpoch * f + poch;
                poch *= f;
            }
            fact *= ((2 * k - 1) * (2 * k)) as f64;
            n_power /= nf * nf;
        }
        let coeff = BERNOULLI[k - 1] / fact;
        value += coeff * poch * n_power;
        deriv += coeff * (dpoch - ln_n * poch) * n_power;
    }
    (value, deriv)
}

/// `H(s) = ½ s(s−1) π^{−s/2} Γ(s/2)` with its logarithm and log-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HFactor {
    pub h: Complex64,
    pub log_h: Complex64,
    /// `H'/H(s)`.
    pub log_deriv: Complex64,
}

pub fn h_factor(s: ComplexPoint) -> Result<HFactor, NumError> {
    let z = s.to_complex();
    // ½ s Γ(s/2) = Γ(s/2 + 1), so H(s) = (s−1) π^{−s/2} Γ(s/2 + 1).
    let half_plus_one = z / 2.0 + 1.0;
    let sm1 = z - 1.0;
    if sm1.norm() == 0.0 {
        return Err(NumError::Domain(s.sigma, s.t));
    }
    let lg = ln_gamma(half_plus_one).ok_or(NumError::Domain(s.sigma, s.t))?;
    let psi = digamma(half_plus_one).ok_or(NumError::Domain(s.sigma, s.t))?;
    let log_h = sm1.ln() - z / 2.0 * PI.ln() + lg;
    // 1/(s−1) − ½ log π + ½ ψ(s/2 + 1) equals 1/s + 1/(s−1) − ½ log π + ½ ψ(s/2).
    let log_deriv = 1.0 / sm1 - 0.5 * PI.ln() + 0.5 * psi;
    Ok(HFactor {
        h: log_h.exp(),
        log_h,
        log_deriv,
    })
}

/// `ξ(s) = H(s)ζ(s)`.
pub fn xi(s: ComplexPoint, cfg: &ZetaConfig) -> Result<Complex64, NumError> {
    let h = h_factor(s)?;
    Ok(h.h * zeta_em(s, cfg)?)
}

/// `ξ'(s) = H(s)(H'/H(s)·ζ(s) + ζ'(s))`.
pub fn xi_prime(s: ComplexPoint, cfg: &ZetaConfig) -> Result<Complex64, NumError> {
    let h = h_factor(s)?;
    let (z, dz) = zeta_pair(s, cfg)?;
    Ok(h.h * (h.log_deriv * z + dz))
}

/// Hardy's function `Z(t) = e^{iϑ(t)} ζ(1/2 + it)`, real for real `t`.
///
/// On the critical line `s(s−1) < 0`, so `arg H = ϑ + π` and `Z = −ξ/|H|`.
pub fn hardy_z(t: f64, cfg: &ZetaConfig) -> Result<f64, NumError> {
    let s = ComplexPoint::new(0.5, t);
    let h = h_factor(s)?;
    let phase = Complex64::from_polar(1.0, h.log_h.im);
    Ok(-(phase * zeta_em(s, cfg)?).re)
}

/// `ξ'(1/2 + it)/(i|H(1/2 + it)|)`: real, with the sign pattern of `−i ξ'` on the line.
pub fn xi_prime_on_line(t: f64, cfg: &ZetaConfig) -> Result<f64, NumError> {
    let s = ComplexPoint::new(0.5, t);
    let h = h_factor(s)?;
    let (z, dz) = zeta_pair(s, cfg)?;
    let phase = Complex64::from_polar(1.0, h.log_h.im);
    Ok((phase * (h.log_deriv * z + dz)).im)
}
