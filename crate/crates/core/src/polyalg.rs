//! Exact univariate polynomials over the rationals.
//!
//! Mollifier shapes and the operator polynomial are built through the
//! constrained bases [`p_basis`] and [`q_basis`], so boundary conditions hold
//! exactly for any coefficient vector.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number. Always stored reduced with a positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatParseError {
    #[error("empty number")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Builds `num/den` as a reduced rational.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact conversion of a finite double (every finite `f64` is a dyadic rational).
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    // BigRational::to_f64 handles huge numerators/denominators without overflow.
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Parses `-0.064`, `1.305`, `4/7`, `-3`, `1e-3` or `2.5E2` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    let malformed = || RatParseError::Malformed(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let num = parse_rat(n)?;
        let den = parse_rat(d)?;
        if den.is_zero() {
            return Err(RatParseError::ZeroDenominator(s.to_string()));
        }
        return Ok(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(idx) => {
            let e: i32 = s[idx + 1..].parse().map_err(|_| malformed())?;
            (&s[..idx], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(malformed());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(&all_digits).map_err(|_| malformed())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        Rat::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rat::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Formats a rational as a terminating decimal when possible, otherwise `p/q`.
/// The output always parses back to the identical value with [`parse_rat`].
pub fn format_rat(x: &Rat) -> String {
    let mut den = x.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    let places = twos.max(fives);
    if !den.is_one() || places > 40 {
        return format!("{}/{}", x.numer(), x.denom());
    }
    if places == 0 {
        return x.numer().to_string();
    }
    let scaled = x * Rat::from_integer(num_traits::pow(BigInt::from(10u32), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

/// Polynomial with exact rational coefficients; `coeffs[i]` multiplies `x^i`.
///
/// The coefficient vector never carries trailing zeros, so the zero polynomial
/// is the empty vector and `degree` is `len - 1` otherwise.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly::default()
    }

    pub fn constant(c: Rat) -> Self {
        RatPoly::new(vec![c])
    }

    pub fn one() -> Self {
        RatPoly::constant(Rat::one())
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        RatPoly::new(vec![Rat::zero(), Rat::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        RatPoly::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }

    pub fn derive(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat_int(i as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> RatPoly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(Rat::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c / rat_int(i as i64 + 1));
        }
        RatPoly::new(out)
    }

    /// Exact value of the integral over [0, 1].
    pub fn integrate01(&self) -> Rat {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c / rat_int(i as i64 + 1))
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    pub fn scale(&self, k: &Rat) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `p(c - x)` style reflection: returns the polynomial `x ↦ self(c - x)`.
    pub fn reflect(&self, c: &Rat) -> RatPoly {
        let lin = RatPoly::new(vec![c.clone(), -Rat::one()]);
        self.compose(&lin)
    }

    /// `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &RatPoly) -> RatPoly {
        self.coeffs
            .iter()
            .rev()
            .fold(RatPoly::zero(), |acc, c| &(&acc * inner) + &RatPoly::constant(c.clone()))
    }

    pub fn pow(&self, n: u32) -> RatPoly {
        (0..n).fold(RatPoly::one(), |acc, _| &acc * self)
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = format_rat(&c.abs());
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}x")?,
                _ => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Which free polynomial a coefficient vector parameterizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// `x + x(1-x)·Σ c_k x^k`: vanishes at 0, equals 1 at 1.
    Section2P1,
    /// `x·Σ c_k x^k`: vanishes at 0, free at 1.
    Section2P2,
    /// Same shape as [`BasisKind::Section2P1`].
    Section3P,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Section2P1 => "section2-P1",
            BasisKind::Section2P2 => "section2-P2",
            BasisKind::Section3P => "section3-P",
        }
    }
}

impl FromStr for BasisKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "section2-P1" => Ok(BasisKind::Section2P1),
            "section2-P2" => Ok(BasisKind::Section2P2),
            "section3-P" => Ok(BasisKind::Section3P),
            other => Err(format!("unknown basis kind `{other}`")),
        }
    }
}

/// Largest inner coefficient count accepted by [`p_basis`] during optimization
/// (inner degree 3, overall degree 5).
pub const P_BASIS_MAX_LEN: usize = 4;
/// Largest coefficient count accepted by [`q_basis`] during optimization (Q degree 7).
pub const Q_BASIS_MAX_LEN: usize = 4;

/// Builds a mollifier shape from inner coefficients. An empty slice is read as `[0]`.
pub fn p_basis(kind: BasisKind, c: &[Rat]) -> RatPoly {
    let inner = RatPoly::new(c.to_vec());
    let x = RatPoly::x();
    match kind {
        BasisKind::Section2P1 | BasisKind::Section3P => {
            let x_one_minus_x = RatPoly::from_i64(&[0, 1, -1]);
            &x + &(&x_one_minus_x * &inner)
        }
        BasisKind::Section2P2 => &x * &inner,
    }
}

/// `Q(x) = 1 + ∫₀ˣ Σ_k d_k (u(1-u))^k du`.
///
/// The integrand is symmetric under `u ↦ 1-u`, hence `Q'(x) = Q'(1-x)` and `Q(0) = 1`.
pub fn q_basis(d: &[Rat]) -> RatPoly {
    let u_one_minus_u = RatPoly::from_i64(&[0, 1, -1]);
    let integrand = d
        .iter()
        .enumerate()
        .fold(RatPoly::zero(), |acc, (k, dk)| {
            &acc + &u_one_minus_u.pow(k as u32).scale(dk)
        });
    &RatPoly::one() + &integrand.antiderivative()
}
