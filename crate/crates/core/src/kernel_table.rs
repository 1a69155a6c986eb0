//! Double-precision fast path for the mean-value constants.
//!
//! Both constants are bilinear in the polynomial coefficients and in the
//! operator coefficients, so once `θ` is fixed everything reduces to the
//! table `∂_a^m ∂_b^n g(x^i, x^j)` restricted to the diagonal `a = b`.
//! The table is built symbolically once and then evaluated per `R`.

use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::expform::{lemma2_form, ExpRatForm, Var};
use crate::meanvalue::{EtaSpec, MollifierPair};
use crate::polyalg::{rat_to_f64, Rat, RatPoly, P_BASIS_MAX_LEN, Q_BASIS_MAX_LEN};

/// Largest polynomial degree reachable from the bases.
pub const MAX_DEGREE: usize = P_BASIS_MAX_LEN + 1;
/// Largest operator order: `deg Q + 1`.
pub const MAX_ORDER: usize = 2 * Q_BASIS_MAX_LEN;

#[derive(Debug, Clone)]
struct DiagForm {
    // (pole order, coefficients of p(x,x), coefficients of q(x,x)), scale folded in
    terms: Vec<(i32, Vec<f64>, Vec<f64>)>,
}

impl DiagForm {
    fn compile(f: &ExpRatForm) -> Self {
        let scale = f.scale().clone();
        let diag = |p: &crate::expform::BiPoly| -> Vec<f64> {
            let mut out: Vec<Rat> = Vec::new();
            for (&(i, j), c) in p.terms() {
                let d = (i + j) as usize;
                if out.len() <= d {
                    out.resize(d + 1, Rat::zero());
                }
                out[d] += c * &scale;
            }
            out.iter().map(rat_to_f64).collect()
        };
        DiagForm {
            terms: f
                .raw_terms()
                .map(|(k, t)| (k as i32, diag(&t.poly), diag(&t.exp)))
                .collect(),
        }
    }

    fn eval(&self, xpow: &[f64], inv_s: &[f64], e: f64) -> f64 {
        let dot = |c: &[f64]| c.iter().zip(xpow).map(|(a, b)| a * b).sum::<f64>();
        self.terms
            .iter()
            .map(|(k, p, q)| (dot(p) + e * dot(q)) * inv_s[*k as usize])
            .sum()
    }

    fn max_order(&self) -> usize {
        self.terms.iter().map(|t| t.0 as usize).max().unwrap_or(0)
    }

    fn max_degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, p, q)| p.len().max(q.len()))
            .max()
            .unwrap_or(0)
    }
}

/// `∂_a^m ∂_b^n g(x^i, x^j)` on the diagonal, for `i, j ≤ degree` and `m, n ≤ order`.
#[derive(Debug, Clone)]
pub struct KernelTable {
    theta: Rat,
    degree: usize,
    order: usize,
    entries: Vec<DiagForm>,
    pole_order: usize,
    poly_len: usize,
}

impl KernelTable {
    pub fn new(theta: &Rat, degree: usize, order: usize) -> Self {
        let mono = |i: usize| {
            let mut c = vec![Rat::zero(); i + 1];
            c[i] = Rat::one();
            RatPoly::new(c)
        };
        let mut entries = Vec::with_capacity((degree + 1).pow(2) * (order + 1).pow(2));
        for i in 0..=degree {
            for j in 0..=degree {
                let mut in_a = lemma2_form(&mono(i), &mono(j), theta);
                for _m in 0..=order {
                    let mut f = in_a.clone();
                    for _n in 0..=order {
                        entries.push(DiagForm::compile(&f));
                        f = f.derive(Var::B);
                    }
                    in_a = in_a.derive(Var::A);
                }
            }
        }
        let pole_order = entries.iter().map(DiagForm::max_order).max().unwrap_or(0);
        let poly_len = entries.iter().map(DiagForm::max_degree).max().unwrap_or(0);
        KernelTable { theta: theta.clone(), degree, order, entries, pole_order, poly_len }
    }

    /// Full-size table for `theta`, built once per process.
    pub fn shared(theta: &Rat) -> Arc<KernelTable> {
        static CACHE: OnceLock<Mutex<Vec<Arc<KernelTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = guard.iter().find(|t| &t.theta == theta) {
            return Arc::clone(t);
        }
        let t = Arc::new(KernelTable::new(theta, MAX_DEGREE, MAX_ORDER));
        guard.push(Arc::clone(&t));
        t
    }

    pub fn theta(&self) -> &Rat {
        &self.theta
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn index(&self, i: usize, j: usize, m: usize, n: usize) -> usize {
        let o = self.order + 1;
        ((i * (self.degree + 1) + j) * o + m) * o + n
    }

    /// `Σ p_i q_j u_m v_n ∂_a^m ∂_b^n g(x^i, x^j)` at `a = b = −r`.
    pub fn contract(&self, p: &[f64], q: &[f64], u: &[f64], v: &[f64], r: f64) -> f64 {
        assert!(p.len() <= self.degree + 1 && q.len() <= self.degree + 1, "degree exceeds table");
        assert!(u.len() <= self.order + 1 && v.len() <= self.order + 1, "order exceeds table");
        let x = -r;
        let s = 2.0 * x;
        let e = (-s).exp();
        let mut xpow = Vec::with_capacity(self.poly_len);
        let mut acc = 1.0;
        for _ in 0..self.poly_len {
            xpow.push(acc);
            acc *= x;
        }
        let mut inv_s = Vec::with_capacity(self.pole_order + 1);
        let mut acc = 1.0;
        for _ in 0..=self.pole_order {
            inv_s.push(acc);
            acc /= s;
        }
        let mut total = 0.0;
        for (i, &pi) in p.iter().enumerate() {
            for (j, &qj) in q.iter().enumerate() {
                let w = pi * qj;
                if w == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                for (m, &um) in u.iter().enumerate() {
                    if um == 0.0 {
                        continue;
                    }
                    for (n, &vn) in v.iter().enumerate() {
                        if vn == 0.0 {
                            continue;
                        }
                        inner += um * vn * self.entries[self.index(i, j, m, n)].eval(&xpow, &inv_s, e);
                    }
                }
                total += w * inner;
            }
        }
        total
    }

    pub fn section2_value(&self, p1: &[f64], p2: &[f64], r: f64) -> f64 {
        let (one, d) = ([1.0], [0.0, 1.0]);
        self.contract(p1, p1, &one, &one, r)
            + self.contract(p1, p2, &one, &d, r)
            + self.contract(p2, p1, &d, &one, r)
            + self.contract(p2, p2, &d, &d, r)
    }

    pub fn section3_value(&self, p: &[f64], op: &[f64], r: f64) -> f64 {
        self.contract(p, p, op, op, r)
    }

    pub fn section2_mean(&self, m: &MollifierPair) -> f64 {
        debug_assert_eq!(m.theta, self.theta);
        self.section2_value(&poly_f64(&m.p1), &poly_f64(&m.p2), rat_to_f64(&m.r))
    }

    pub fn section3_mean(&self, e: &EtaSpec) -> f64 {
        debug_assert_eq!(e.theta, self.theta);
        self.section3_value(&poly_f64(&e.p), &operator_coeffs(&e.delta, &e.q), rat_to_f64(&e.r))
    }
}

fn poly_f64(p: &RatPoly) -> Vec<f64> {
    p.coeffs().iter().map(rat_to_f64).collect()
}

/// Coefficients `o_m` of `(1−δ) + δ(1 + 2D)Q(−D) = Σ o_m D^m`.
pub fn operator_coeffs(delta: &Rat, q: &RatPoly) -> Vec<f64> {
    if delta.is_zero() {
        return vec![1.0];
    }
    let qn: Vec<Rat> = q
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| if m % 2 == 0 { c.clone() } else { -c })
        .collect();
    let mut out = vec![Rat::zero(); qn.len() + 1];
    for (m, c) in qn.iter().enumerate() {
        out[m] += c * delta;
        out[m + 1] += c * delta * Rat::from_integer(2.into());
    }
    out[0] += Rat::one() - delta;
    out.iter().map(rat_to_f64).collect()
}
