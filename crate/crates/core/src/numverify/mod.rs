//! Direct numerics at finite height: ζ, ζ', the completing factor `H`, the
//! mollifiers, the smoothed second moment and zero counting. These check the
//! symbolic layer and the counting identities against explicit computation.

use num_complex::Complex64;
use thiserror::Error;

pub mod gamma;
pub mod mobius;
pub mod mollifier;
pub mod moment;
pub mod zeros;
pub mod zeta;

pub use mobius::{mertens, mobius_sieve};
pub use mollifier::{g_eval, psi_eval, Mollifier, PsiSource};
pub use moment::{gaussian_average, smoothed_moment, MomentConfig, MomentResult, MomentSpec};
pub use zeros::{
    count_zeros_zeta, riemann_vonmangoldt, xi_prime_critical_sign_changes, SignChangeConfig,
};
pub use zeta::{h_factor, hardy_z, xi, xi_prime, zeta_em, zeta_pair, zeta_prime_em, HFactor, ZetaConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("s = {0} + {1}i is too close to the pole of zeta")]
    NearPole(f64, f64),
    #[error("s = {0} + {1}i is outside the domain of H")]
    Domain(f64, f64),
    #[error("quadrature needs {needed} nodes, cap is {cap}")]
    BudgetExceeded { needed: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// `s = σ + it`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Self {
        ComplexPoint { sigma, t }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }

    /// `1 − s`.
    pub fn reflect(self) -> Self {
        ComplexPoint::new(1.0 - self.sigma, -self.t)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        ComplexPoint::new(z.re, z.im)
    }
}
