//! Finite-`T` mollifiers `Σ_{n≤y} μ(n) n^{−s−R/L} P(log(y/n)/log y)` and `G = ζψ₁ + ζ'ψ₂`.

use num_complex::Complex64;

use super::mobius::mobius_sieve;
use super::zeta::{zeta_pair, ZetaConfig};
use super::{ComplexPoint, NumError};
use crate::meanvalue::{EtaSpec, MollifierPair};
use crate::polyalg::{rat_to_f64, RatPoly};

/// Which mollifier to build.
#[derive(Debug, Clone, Copy)]
pub enum PsiSource<'a> {
    Psi1(&'a MollifierPair),
    /// Carries the extra `1/L`.
    Psi2(&'a MollifierPair),
    Psi(&'a EtaSpec),
}

/// Dirichlet polynomial `Σ c_n n^{−s}` with precomputed coefficients.
#[derive(Debug, Clone)]
pub struct Mollifier {
    /// `(ln n, c_n)` for the nonzero coefficients.
    terms: Vec<(f64, f64)>,
}

impl Mollifier {
    /// Builds the mollifier at height `t_param` (`L = log T`, `y = T^θ`).
    pub fn new(source: PsiSource<'_>, t_param: f64) -> Result<Self, NumError> {
        let (theta, r, poly, extra) = match source {
            PsiSource::Psi1(m) => (&m.theta, &m.r, &m.p1, 1.0),
            PsiSource::Psi2(m) => (&m.theta, &m.r, &m.p2, 1.0 / t_param.ln()),
            PsiSource::Psi(e) => (&e.theta, &e.r, &e.p, 1.0),
        };
        Self::from_parts(rat_to_f64(theta), rat_to_f64(r), poly, extra, t_param)
    }

    pub fn from_parts(
        theta: f64,
        r: f64,
        poly: &RatPoly,
        prefactor: f64,
        t_param: f64,
    ) -> Result<Self, NumError> {
        if !(t_param > 1.0) {
            return Err(NumError::InvalidConfig(format!("T = {t_param} must exceed 1")));
        }
        let l = t_param.ln();
        let log_y = theta * l;
        let y = log_y.exp();
        if y < 1.0 {
            return Err(NumError::InvalidConfig(format!("y = T^θ = {y} is below 1")));
        }
        // Guard against y landing a rounding error below an integer.
        let y_floor = (y * (1.0 + 1e-14)).floor() as usize;
        let mu = mobius_sieve(y_floor);
        let mut terms = Vec::new();
        for (n, &m) in mu.iter().enumerate().skip(1) {
            if m == 0 {
                continue;
            }
            let ln_n = (n as f64).ln();
            let x = if log_y > 0.0 { ((log_y - ln_n) / log_y).max(0.0) } else { 1.0 };
            let c = m as f64 * (-r / l * ln_n).exp() * poly.eval_f64(x) * prefactor;
            if c != 0.0 {
                terms.push((ln_n, c));
            }
        }
        Ok(Mollifier { terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(ln_n, c)| c * (-s * ln_n).exp())
            .sum()
    }
}

pub fn psi_eval(s: ComplexPoint, source: PsiSource<'_>, t_param: f64) -> Result<Complex64, NumError> {
    Ok(Mollifier::new(source, t_param)?.eval(s.to_complex()))
}

/// `ζψ₁ + ζ'ψ₂` at a single point.
pub fn g_eval(
    s: ComplexPoint,
    pair: &MollifierPair,
    t_param: f64,
    cfg: &ZetaConfig,
) -> Result<Complex64, NumError> {
    let (z, dz) = zeta_pair(s, cfg)?;
    let psi1 = Mollifier::new(PsiSource::Psi1(pair), t_param)?;
    let psi2 = Mollifier::new(PsiSource::Psi2(pair), t_param)?;
    let sc = s.to_complex();
    Ok(z * psi1.eval(sc) + dz * psi2.eval(sc))
}
