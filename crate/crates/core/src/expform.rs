//! Bivariate polynomials in the formal shifts `a`, `b` and the exp-rational
//! family
//!
//! ```text
//!     Σ_k (p_k(a,b) + E·q_k(a,b)) / (a+b)^k,      E = e^{-(a+b)},
//! ```
//!
//! which contains the mean-value kernel and is closed under `∂_a` and `∂_b`.
//! All symbolic work is exact; floating point enters only in [`eval_at`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::polyalg::{rat_from_f64, rat_int, rat_to_f64, Rat, RatPoly};

/// Smallest `|a+b|` accepted by [`eval_at`].
pub const POLE_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpFormError {
    #[error("evaluation point too close to the a+b=0 pole (|a+b| = {0:e})")]
    PoleProximity(f64),
    #[error("non-finite evaluation point ({0}, {1})")]
    NonFinite(f64, f64),
}

/// Formal variable of the bivariate layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    A,
    B,
}

/// Exact polynomial in `a`, `b`; key `(i, j)` is the monomial `a^i b^j`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: Rat) -> Self {
        BiPoly::zero().with_term(0, 0, c)
    }

    pub fn monomial(i: u32, j: u32, c: Rat) -> Self {
        BiPoly::zero().with_term(i, j, c)
    }

    /// Adds `c·a^i b^j` and returns `self`.
    pub fn with_term(mut self, i: u32, j: u32, c: Rat) -> Self {
        self.add_term(i, j, c);
        self
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, k: &Rat) -> BiPoly {
        if k.is_zero() {
            return BiPoly::zero();
        }
        BiPoly {
            terms: self.terms.iter().map(|(&m, c)| (m, c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    /// Exchanges the roles of `a` and `b`.
    pub fn swap(&self) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    /// `(a, b) ↦ (-a, -b)`.
    pub fn negate_args(&self) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((i, j), if (i + j) % 2 == 1 { -c } else { c.clone() }))
                .collect(),
        }
    }

    pub fn derive(&self, var: Var) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            match var {
                Var::A if i > 0 => out.add_term(i - 1, j, c * rat_int(i as i64)),
                Var::B if j > 0 => out.add_term(i, j - 1, c * rat_int(j as i64)),
                _ => {}
            }
        }
        out
    }

    pub fn eval(&self, a: &Rat, b: &Rat) -> Rat {
        let max_i = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let pa = powers(a, max_i);
        let pb = powers(b, max_j);
        self.terms
            .iter()
            .fold(Rat::zero(), |acc, (&(i, j), c)| acc + c * &pa[i as usize] * &pb[j as usize])
    }

    pub fn eval_f64(&self, a: f64, b: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| rat_to_f64(c) * a.powi(i as i32) * b.powi(j as i32))
            .sum()
    }
}

fn powers(x: &Rat, n: u32) -> Vec<Rat> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(Rat::one());
    for k in 0..n as usize {
        let next = &out[k] * x;
        out.push(next);
    }
    out
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| format!("({c})a^{i}b^{j}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Σ(a,b) = ∫₀¹ (P_i' + aθP_i)(P_j' + bθP_j) dx`, integrated exactly.
pub fn sigma_bipoly(pi: &RatPoly, pj: &RatPoly, theta: &Rat) -> BiPoly {
    let dpi = pi.derive();
    let dpj = pj.derive();
    let whole = (&dpi * &dpj).integrate01();
    let a_part = (pi * &dpj).integrate01() * theta;
    let b_part = (&dpi * pj).integrate01() * theta;
    let ab_part = (pi * pj).integrate01() * theta * theta;
    BiPoly::zero()
        .with_term(0, 0, whole)
        .with_term(1, 0, a_part)
        .with_term(0, 1, b_part)
        .with_term(1, 1, ab_part)
}

/// Pair `(p_k, q_k)` of one pole order.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct ExpTerm {
    pub poly: BiPoly,
    pub exp: BiPoly,
}

impl ExpTerm {
    fn is_zero(&self) -> bool {
        self.poly.is_zero() && self.exp.is_zero()
    }
}

/// `scale · Σ_k (p_k + E·q_k)/(a+b)^k` with `E = e^{-(a+b)}`.
#[derive(Clone, Debug)]
pub struct ExpRatForm {
    terms: BTreeMap<u32, ExpTerm>,
    scale: Rat,
}

impl Default for ExpRatForm {
    fn default() -> Self {
        ExpRatForm {
            terms: BTreeMap::new(),
            scale: Rat::one(),
        }
    }
}

impl PartialEq for ExpRatForm {
    /// Structural equality after folding the scale into the coefficients.
    fn eq(&self, other: &Self) -> bool {
        self.normalized().terms == other.normalized().terms
    }
}

impl ExpRatForm {
    pub fn zero() -> Self {
        ExpRatForm::default()
    }

    /// Polynomial form (pole order 0, no exponential part).
    pub fn polynomial(p: BiPoly) -> Self {
        ExpRatForm::zero().with_term(0, p, BiPoly::zero())
    }

    /// Adds `(p + E·q)/(a+b)^k` (unscaled) and returns `self`.
    pub fn with_term(mut self, k: u32, p: BiPoly, q: BiPoly) -> Self {
        let inv = self.scale.recip();
        self.add_raw(k, &p.scale(&inv), &q.scale(&inv));
        self
    }

    fn add_raw(&mut self, k: u32, p: &BiPoly, q: &BiPoly) {
        let entry = self.terms.entry(k).or_default();
        entry.poly = entry.poly.add(p);
        entry.exp = entry.exp.add(q);
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn scale(&self) -> &Rat {
        &self.scale
    }

    pub fn with_scale(mut self, scale: Rat) -> Self {
        self.scale = &self.scale * scale;
        self
    }

    /// Terms as stored, before applying the overall scale.
    pub fn raw_terms(&self) -> impl Iterator<Item = (u32, &ExpTerm)> {
        self.terms.iter().map(|(&k, t)| (k, t))
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.scale.is_zero()
    }

    /// True when some term divides by a positive power of `a+b`.
    pub fn has_pole(&self) -> bool {
        self.terms.keys().any(|&k| k > 0)
    }

    /// Same form with `scale == 1`.
    pub fn normalized(&self) -> ExpRatForm {
        if self.scale.is_one() {
            return self.clone();
        }
        if self.scale.is_zero() {
            return ExpRatForm::zero();
        }
        ExpRatForm {
            terms: self
                .terms
                .iter()
                .map(|(&k, t)| {
                    (
                        k,
                        ExpTerm {
                            poly: t.poly.scale(&self.scale),
                            exp: t.exp.scale(&self.scale),
                        },
                    )
                })
                .collect(),
            scale: Rat::one(),
        }
    }

    pub fn scaled(&self, k: &Rat) -> ExpRatForm {
        let mut out = self.clone();
        out.scale = &out.scale * k;
        out
    }

    pub fn add(&self, other: &ExpRatForm) -> ExpRatForm {
        let mut out = if self.scale == other.scale {
            self.clone()
        } else {
            self.normalized()
        };
        let rhs = if out.scale == other.scale {
            other.clone()
        } else {
            other.normalized()
        };
        for (&k, t) in &rhs.terms {
            out.add_raw(k, &t.poly, &t.exp);
        }
        out
    }

    /// Exact partial derivative in `var`.
    pub fn derive(&self, var: Var) -> ExpRatForm {
        let mut out = ExpRatForm {
            terms: BTreeMap::new(),
            scale: self.scale.clone(),
        };
        for (&k, t) in &self.terms {
            // ∂[p/s^k] = p_v/s^k − k p/s^{k+1};  ∂E = −E for both variables.
            let dp = t.poly.derive(var);
            let dq = t.exp.derive(var).sub(&t.exp);
            out.add_raw(k, &dp, &dq);
            if k > 0 {
                let factor = -rat_int(k as i64);
                out.add_raw(k + 1, &t.poly.scale(&factor), &t.exp.scale(&factor));
            }
        }
        out
    }

    pub fn d_a(&self) -> ExpRatForm {
        self.derive(Var::A)
    }

    pub fn d_b(&self) -> ExpRatForm {
        self.derive(Var::B)
    }

    pub fn derive_n(&self, var: Var, n: u32) -> ExpRatForm {
        (0..n).fold(self.clone(), |f, _| f.derive(var))
    }

    /// Exchanges `a` and `b` throughout.
    pub fn swap_vars(&self) -> ExpRatForm {
        ExpRatForm {
            terms: self
                .terms
                .iter()
                .map(|(&k, t)| {
                    (
                        k,
                        ExpTerm {
                            poly: t.poly.swap(),
                            exp: t.exp.swap(),
                        },
                    )
                })
                .collect(),
            scale: self.scale.clone(),
        }
    }
}

/// The kernel `[Σ(b,a) − e^{-a-b} Σ(−a,−b)] / (θ(a+b))` for the pair `(P_i, P_j)`.
pub fn lemma2_form(pi: &RatPoly, pj: &RatPoly, theta: &Rat) -> ExpRatForm {
    assert!(theta.is_positive(), "mollifier length must be positive");
    let sigma = sigma_bipoly(pi, pj, theta);
    let numer = sigma.swap();
    let exp_part = sigma.negate_args().scale(&-Rat::one());
    ExpRatForm::zero()
        .with_term(1, numer, exp_part)
        .with_scale(theta.recip())
}

/// `(1−δ) + δ(1 + 2∂)Q(−∂)` acting in one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub delta: Rat,
    pub q: RatPoly,
    pub variable: Var,
}

pub fn apply_operator(f: &ExpRatForm, op: &OperatorSpec) -> ExpRatForm {
    let one_minus_delta = Rat::one() - &op.delta;
    if op.delta.is_zero() {
        return f.clone();
    }
    // Q(−∂) f = Σ_m q_m (−1)^m ∂^m f
    let mut q_applied = ExpRatForm::zero();
    let mut deriv = f.clone();
    for (m, qm) in op.q.coeffs().iter().enumerate() {
        if m > 0 {
            deriv = deriv.derive(op.variable);
        }
        if qm.is_zero() {
            continue;
        }
        let sign = if m % 2 == 0 { qm.clone() } else { -qm };
        q_applied = q_applied.add(&deriv.scaled(&sign));
    }
    let with_lift = q_applied.add(&q_applied.derive(op.variable).scaled(&rat_int(2)));
    f.scaled(&one_minus_delta).add(&with_lift.scaled(&op.delta))
}

/// How [`eval_at`] treats the transcendental factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalConfig {
    /// Exact polynomial pieces, double-precision `exp`.
    #[default]
    Double,
    /// Whole evaluation in rationals with `e^{-(a+b)}` accurate to `digits` decimals.
    HighPrecision { digits: u32 },
}

pub fn eval_at(f: &ExpRatForm, a: f64, b: f64, cfg: EvalConfig) -> Result<f64, ExpFormError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(ExpFormError::NonFinite(a, b));
    }
    let s = a + b;
    if f.has_pole() && s.abs() < POLE_GUARD {
        return Err(ExpFormError::PoleProximity(s.abs()));
    }
    let ar = rat_from_f64(a);
    let br = rat_from_f64(b);
    match cfg {
        EvalConfig::Double => {
            let e = (-s).exp();
            let mut total = 0.0;
            for (&k, t) in &f.terms {
                let p = rat_to_f64(&t.poly.eval(&ar, &br));
                let q = rat_to_f64(&t.exp.eval(&ar, &br));
                total += (p + e * q) / s.powi(k as i32);
            }
            Ok(total * rat_to_f64(&f.scale))
        }
        EvalConfig::HighPrecision { digits } => Ok(rat_to_f64(&eval_rat(f, &ar, &br, digits)?)),
    }
}

/// Rational evaluation with `e^{-(a+b)}` truncated to `digits` decimal places
/// (relative). The result carries roughly the same number of correct digits.
pub fn eval_rat(f: &ExpRatForm, a: &Rat, b: &Rat, digits: u32) -> Result<Rat, ExpFormError> {
    let s = a + b;
    if f.has_pole() && rat_to_f64(&s.abs()) < POLE_GUARD {
        return Err(ExpFormError::PoleProximity(rat_to_f64(&s.abs())));
    }
    let e = exp_rat(&-&s, digits);
    let mut total = Rat::zero();
    for (&k, t) in &f.terms {
        let p = t.poly.eval(a, b);
        let q = t.exp.eval(a, b);
        let mut term = p + &e * q;
        if k > 0 {
            term /= num_traits::pow(s.clone(), k as usize);
        }
        total += term;
    }
    Ok(total * &f.scale)
}

/// `e^x` as a rational, relative error below `10^-digits`.
pub fn exp_rat(x: &Rat, digits: u32) -> Rat {
    let ten = BigInt::from(10u32);
    let guard = digits + 20;
    let unit = Rat::from_integer(num_traits::pow(ten, guard as usize));
    let round = |v: Rat| -> Rat { (v * &unit).round() / &unit };
    // Halve until |x| ≤ 1/2, sum Taylor, square back.
    let mut halvings = 0u32;
    let mut y = x.clone();
    let half = Rat::new(BigInt::from(1), BigInt::from(2));
    while y.abs() > half {
        y /= rat_int(2);
        halvings += 1;
    }
    let eps = Rat::new(BigInt::from(1), num_traits::pow(BigInt::from(10u32), guard as usize));
    let mut term = Rat::one();
    let mut sum = Rat::one();
    let mut n = 1i64;
    loop {
        term = round(term * &y / rat_int(n));
        if term.abs() < eps {
            break;
        }
        sum += &term;
        n += 1;
    }
    for _ in 0..halvings {
        sum = round(&sum * &sum);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{parse_rat, rat};

    fn x() -> RatPoly {
        RatPoly::x()
    }

    #[test]
    fn sigma_of_identity() {
        // ∫(1+ax)(1+bx)dx = 1 + a/2 + b/2 + ab/3
        let s = sigma_bipoly(&x(), &x(), &rat_int(1));
        let expected = BiPoly::zero()
            .with_term(0, 0, rat_int(1))
            .with_term(1, 0, rat(1, 2))
            .with_term(0, 1, rat(1, 2))
            .with_term(1, 1, rat(1, 3));
        assert_eq!(s, expected);
    }

    #[test]
    fn sigma_of_constant_is_pure_ab() {
        let theta = rat(4, 7);
        let s = sigma_bipoly(&RatPoly::one(), &RatPoly::one(), &theta);
        assert_eq!(s, BiPoly::monomial(1, 1, &theta * &theta));
    }

    #[test]
    fn sigma_swap_symmetry() {
        let theta = rat(4, 7);
        let pi = RatPoly::from_i64(&[0, 3, -1, 2]);
        let pj = RatPoly::from_i64(&[1, 0, 5]);
        assert_eq!(sigma_bipoly(&pi, &pj, &theta).swap(), sigma_bipoly(&pj, &pi, &theta));
    }

    #[test]
    fn derivative_of_pure_exponential_pole() {
        let f = ExpRatForm::zero().with_term(1, BiPoly::zero(), BiPoly::constant(rat_int(1)));
        let expected = ExpRatForm::zero()
            .with_term(1, BiPoly::zero(), BiPoly::constant(rat_int(-1)))
            .with_term(2, BiPoly::zero(), BiPoly::constant(rat_int(-1)));
        assert_eq!(f.d_a(), expected);
    }

    #[test]
    fn derivative_of_polynomial_part() {
        let f = ExpRatForm::polynomial(BiPoly::monomial(1, 1, rat_int(1)));
        assert_eq!(f.d_a(), ExpRatForm::polynomial(BiPoly::monomial(0, 1, rat_int(1))));
    }

    #[test]
    fn mixed_partials_commute_on_kernel() {
        let p1 = RatPoly::new(vec![rat_int(0), rat(1, 3), rat(2, 3)]);
        let p2 = RatPoly::new(vec![rat_int(0), rat(13, 10), rat(-1, 4)]);
        let f = lemma2_form(&p1, &p2, &rat(4, 7));
        assert_eq!(f.d_a().d_b(), f.d_b().d_a());
        assert_eq!(f.d_a().d_a().d_b(), f.d_b().d_a().d_a());
    }

    #[test]
    fn kernel_symmetric_for_equal_pair() {
        let p = RatPoly::new(vec![rat_int(0), rat(3, 4), rat(1, 4)]);
        let f = lemma2_form(&p, &p, &rat(4, 7));
        assert_eq!(f.swap_vars(), f);
    }

    #[test]
    fn kernel_numerator_vanishes_on_antidiagonal() {
        let p = RatPoly::new(vec![rat_int(0), rat(3, 4), rat(1, 4)]);
        let f = lemma2_form(&p, &p, &rat(4, 7));
        let (_, t) = f.raw_terms().next().unwrap();
        let numer = ExpRatForm::zero().with_term(0, t.poly.clone(), t.exp.clone());
        for tv in [0.3, 1.0] {
            let v = eval_at(&numer, tv, -tv, EvalConfig::Double).unwrap();
            assert!(v.abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn eval_simple_form() {
        let f = ExpRatForm::zero().with_term(1, BiPoly::constant(rat_int(1)), BiPoly::constant(rat_int(1)));
        let v = eval_at(&f, -1.0, -1.0, EvalConfig::Double).unwrap();
        let expected = (1.0 + 2f64.exp()) / -2.0;
        assert!((v - expected).abs() < 1e-12);
        assert!((v - -4.194528).abs() < 1e-6);
        assert_eq!(eval_at(&ExpRatForm::zero(), 0.3, 0.9, EvalConfig::Double).unwrap(), 0.0);
    }

    #[test]
    fn eval_identity_kernel() {
        // Σ(a,b) = 1 + (a+b)θ/2 + abθ²/3 evaluated by hand at a=b=−1.023.
        let theta = 4.0 / 7.0;
        let r = 1.023;
        let sig = |a: f64, b: f64| 1.0 + (a + b) * theta / 2.0 + a * b * theta * theta / 3.0;
        let hand = (sig(-r, -r) - (2.0 * r).exp() * sig(r, r)) / (-2.0 * r * theta);
        let f = lemma2_form(&x(), &x(), &rat(4, 7));
        let v = eval_at(&f, -r, -r, EvalConfig::Double).unwrap();
        assert!((v - hand).abs() < 1e-12 * hand.abs());
        assert!((v - 10.787).abs() < 1e-3, "{v}");
        let hp = eval_at(&f, -r, -r, EvalConfig::HighPrecision { digits: 30 }).unwrap();
        assert!((hp - v).abs() < 1e-13 * v.abs());
    }

    #[test]
    fn pole_is_rejected() {
        let f = lemma2_form(&x(), &x(), &rat(4, 7));
        assert!(matches!(
            eval_at(&f, 0.5, -0.5, EvalConfig::Double),
            Err(ExpFormError::PoleProximity(_))
        ));
    }

    #[test]
    fn operator_identities() {
        let f = lemma2_form(&x(), &RatPoly::from_i64(&[0, 2, -1]), &rat(4, 7));
        let q = RatPoly::from_i64(&[1, -3, 2]);
        let id = apply_operator(&f, &OperatorSpec { delta: rat_int(0), q: q.clone(), variable: Var::A });
        assert_eq!(id, f);
        let lift = apply_operator(&f, &OperatorSpec { delta: rat_int(1), q: RatPoly::one(), variable: Var::B });
        assert_eq!(lift, f.add(&f.d_b().scaled(&rat_int(2))));
    }

    #[test]
    fn operator_factors_commute() {
        // (1+2∂)Q(−∂) == Q(−∂)(1+2∂) applied in the other order.
        let f = lemma2_form(&x(), &x(), &rat(1, 2));
        let q = RatPoly::from_i64(&[1, -3, 2]);
        let op = OperatorSpec { delta: rat(1, 3), q: q.clone(), variable: Var::A };
        let lhs = apply_operator(&f, &op);
        let lifted = f.add(&f.d_a().scaled(&rat_int(2)));
        let mut rhs_q = ExpRatForm::zero();
        let mut d = lifted.clone();
        for (m, qm) in q.coeffs().iter().enumerate() {
            if m > 0 {
                d = d.d_a();
            }
            let sign = if m % 2 == 0 { qm.clone() } else { -qm };
            rhs_q = rhs_q.add(&d.scaled(&sign));
        }
        let rhs = f.scaled(&rat(2, 3)).add(&rhs_q.scaled(&rat(1, 3)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_rat_matches_known_digits() {
        // e to 40 places
        let e = parse_rat("2.7182818284590452353602874713526624977572").unwrap();
        let got = exp_rat(&rat_int(1), 35);
        assert!(rat_to_f64(&((got - &e).abs() * rat_int(10).pow(34))) < 1.0);
        let back = exp_rat(&rat(-2046, 1000), 30) * exp_rat(&rat(2046, 1000), 30);
        assert!(rat_to_f64(&((back - rat_int(1)).abs() * rat_int(10).pow(28))) < 1.0);
    }
}
