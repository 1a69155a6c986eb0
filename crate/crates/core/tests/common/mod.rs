//! Independent oracles shared by the integration tests. Everything here is
//! plain `f64` arithmetic written from the defining formulas; nothing calls
//! into the symbolic layer.

#![allow(dead_code)]

use num_complex::Complex64;

pub const C2_GOLDEN: f64 = 1.753_222_553_429_837_437_355_160_884_64;
pub const C3_GOLDEN: f64 = 1.154_882_151_873_687_481_930_726_248_34;

pub const THETA: f64 = 4.0 / 7.0;
pub const P1: [f64; 2] = [-0.064, 0.112];
pub const P2: [f64; 3] = [1.305, -0.276, -0.025];
pub const P: [f64; 3] = [-0.274, -0.334, 0.005];
pub const Q: [f64; 3] = [-0.609, -0.572, -4.895];
pub const R2: f64 = 1.023;
pub const R3: f64 = 1.104;
pub const DELTA: f64 = 0.869;

// ---------- univariate f64 polynomials ----------

pub fn pmul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn padd(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

pub fn pderiv(a: &[f64]) -> Vec<f64> {
    a.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

pub fn pint01(a: &[f64]) -> f64 {
    a.iter().enumerate().map(|(i, c)| c / (i + 1) as f64).sum()
}

pub fn peval(a: &[f64], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// `x + x(1−x)Σ c_k x^k`
pub fn p_shape(c: &[f64]) -> Vec<f64> {
    padd(&[0.0, 1.0], &pmul(&[0.0, 1.0, -1.0], c))
}

/// `x Σ c_k x^k`
pub fn p2_shape(c: &[f64]) -> Vec<f64> {
    pmul(&[0.0, 1.0], c)
}

/// `1 + ∫₀ˣ Σ d_k (u(1−u))^k du`
pub fn q_shape(d: &[f64]) -> Vec<f64> {
    let mut integrand = vec![0.0];
    let mut pow = vec![1.0];
    for dk in d {
        integrand = padd(&integrand, &pow.iter().map(|c| c * dk).collect::<Vec<_>>());
        pow = pmul(&pow, &[0.0, 1.0, -1.0]);
    }
    let mut q = vec![1.0];
    q.extend(integrand.iter().enumerate().map(|(i, c)| c / (i + 1) as f64));
    q
}

/// `(1−δ) + δ(1 + 2D)Q(−D)` as coefficients of `D^m`.
pub fn operator(delta: f64, q: &[f64]) -> Vec<f64> {
    let qneg: Vec<f64> = q
        .iter()
        .enumerate()
        .map(|(m, c)| if m % 2 == 0 { *c } else { -c })
        .collect();
    let lifted = pmul(&[1.0, 2.0], &qneg);
    padd(&[1.0 - delta], &lifted.iter().map(|c| c * delta).collect::<Vec<_>>())
}

// ---------- bivariate Taylor jets ----------

/// Truncated Taylor expansion in `(da, db)`, coefficients `c[i][j]` for `i, j ≤ n`.
#[derive(Clone, Debug)]
pub struct Jet {
    n: usize,
    c: Vec<Vec<f64>>,
}

impl Jet {
    pub fn constant(n: usize, v: f64) -> Jet {
        let mut c = vec![vec![0.0; n + 1]; n + 1];
        c[0][0] = v;
        Jet { n, c }
    }

    pub fn var_a(n: usize, a0: f64) -> Jet {
        let mut j = Jet::constant(n, a0);
        if n > 0 {
            j.c[1][0] = 1.0;
        }
        j
    }

    pub fn var_b(n: usize, b0: f64) -> Jet {
        let mut j = Jet::constant(n, b0);
        if n > 0 {
            j.c[0][1] = 1.0;
        }
        j
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut r = self.clone();
        for i in 0..=self.n {
            for j in 0..=self.n {
                r.c[i][j] += o.c[i][j];
            }
        }
        r
    }

    pub fn scale(&self, k: f64) -> Jet {
        let mut r = self.clone();
        r.c.iter_mut().flatten().for_each(|v| *v *= k);
        r
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.n;
        let mut r = Jet::constant(n, 0.0);
        for i in 0..=n {
            for j in 0..=n {
                let x = self.c[i][j];
                if x == 0.0 {
                    continue;
                }
                for k in 0..=n - i {
                    for l in 0..=n - j {
                        r.c[i + k][j + l] += x * o.c[k][l];
                    }
                }
            }
        }
        r
    }

    pub fn recip(&self) -> Jet {
        let n = self.n;
        let u00 = self.c[0][0];
        let mut r = Jet::constant(n, 0.0);
        for i in 0..=n {
            for j in 0..=n {
                let mut acc = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                for k in 0..=i {
                    for l in 0..=j {
                        if k == 0 && l == 0 {
                            continue;
                        }
                        acc -= self.c[k][l] * r.c[i - k][j - l];
                    }
                }
                r.c[i][j] = acc / u00;
            }
        }
        r
    }

    /// `e^{−(a+b)}` around `(a0, b0)`.
    pub fn exp_neg_sum(n: usize, a0: f64, b0: f64) -> Jet {
        let mut r = Jet::constant(n, 0.0);
        let base = (-(a0 + b0)).exp();
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        for i in 0..=n {
            for j in 0..=n {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                r.c[i][j] = base * sign / (fact(i) * fact(j));
            }
        }
        r
    }

    /// `∂_a^m ∂_b^n` at the expansion point.
    pub fn derivative(&self, m: usize, n: usize) -> f64 {
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        self.c[m][n] * fact(m) * fact(n)
    }
}

/// The kernel `[Σ(b,a) − e^{−a−b}Σ(−a,−b)]/(θ(a+b))` for `(pi, pj)` as a jet around `(a0, b0)`.
pub fn kernel_jet(pi: &[f64], pj: &[f64], theta: f64, a0: f64, b0: f64, order: usize) -> Jet {
    let (dpi, dpj) = (pderiv(pi), pderiv(pj));
    let a_ = pint01(&pmul(&dpi, &dpj));
    let b_ = pint01(&pmul(pi, &dpj));
    let c_ = pint01(&pmul(&dpi, pj));
    let d_ = pint01(&pmul(pi, pj));
    let a = Jet::var_a(order, a0);
    let b = Jet::var_b(order, b0);
    let one = Jet::constant(order, 1.0);
    // Σ(x, y) = A + xθB + yθC + xyθ²D
    let sigma = |x: &Jet, y: &Jet| {
        one.scale(a_)
            .add(&x.scale(theta * b_))
            .add(&y.scale(theta * c_))
            .add(&x.mul(y).scale(theta * theta * d_))
    };
    let numer = sigma(&b, &a).add(&Jet::exp_neg_sum(order, a0, b0).mul(&sigma(&a.scale(-1.0), &b.scale(-1.0))).scale(-1.0));
    numer.mul(&a.add(&b).scale(theta).recip())
}

pub fn oracle_c2(theta: f64, r: f64, p1: &[f64], p2: &[f64]) -> f64 {
    let g = |pi: &[f64], pj: &[f64]| kernel_jet(pi, pj, theta, -r, -r, 1);
    g(p1, p1).derivative(0, 0) + g(p1, p2).derivative(0, 1) + g(p2, p1).derivative(1, 0) + g(p2, p2).derivative(1, 1)
}

pub fn oracle_c3(theta: f64, r: f64, delta: f64, p: &[f64], q: &[f64]) -> f64 {
    let op = operator(delta, q);
    let g = kernel_jet(p, p, theta, -r, -r, op.len() - 1);
    let mut total = 0.0;
    for (m, om) in op.iter().enumerate() {
        for (n, on) in op.iter().enumerate() {
            total += om * on * g.derivative(m, n);
        }
    }
    total
}

pub fn reference_c2() -> f64 {
    oracle_c2(THETA, R2, &p_shape(&P1), &p2_shape(&P2))
}

pub fn reference_c3() -> f64 {
    oracle_c3(THETA, R3, DELTA, &p_shape(&P), &q_shape(&Q))
}

// ---------- zeta via the alternating series ----------

/// `ζ(s) = η(s)/(1 − 2^{1−s})` with Borwein's accelerated alternating series (`n` terms).
pub fn zeta_borwein(s: Complex64, n: usize) -> Complex64 {
    let nf = n as f64;
    let mut d = Vec::with_capacity(n + 1);
    let mut term = 1.0;
    let mut acc = 1.0;
    d.push(acc);
    for i in 1..=n {
        let i_f = i as f64;
        term *= (nf + i_f - 1.0) * 4.0 * (nf - i_f + 1.0) / ((2.0 * i_f) * (2.0 * i_f - 1.0));
        acc += term;
        d.push(acc);
    }
    let dn = d[n];
    let mut eta = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * (d[k] - dn) / dn;
        eta += w * (-s * ((k + 1) as f64).ln()).exp();
    }
    eta = -eta;
    eta / (1.0 - (Complex64::new(1.0, 0.0) - s).exp2())
}

// ---------- Möbius by factorization ----------

pub fn mobius_by_factoring(mut n: u64) -> i8 {
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

// ---------- quadrature ----------

pub fn simpson01<F: Fn(f64) -> f64>(f: F, panels: usize) -> f64 {
    let h = 1.0 / panels as f64;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..panels {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    acc * h / 3.0
}

/// `(1/(Δ√π)) ∫ e^{−(t−w)²/Δ²} f(t) dt` by the trapezoid rule on `w ± 8Δ`.
pub fn gaussian_mean<F: Fn(f64) -> f64>(f: F, w: f64, width: f64) -> f64 {
    let steps = 4000;
    let lo = w - 8.0 * width;
    let h = 16.0 * width / steps as f64;
    let mut acc = 0.0;
    for i in 0..=steps {
        let t = lo + i as f64 * h;
        let wt = if i == 0 || i == steps { 0.5 } else { 1.0 };
        acc += wt * (-((t - w) / width).powi(2)).exp() * f(t);
    }
    acc * h / (width * std::f64::consts::PI.sqrt())
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Main term of the Gaussian-smoothed twisted second moment of `ζψ₁` on
/// `σ₀ = 1/2 − R/L`, at finite `T`, for `ψ₁ = Σ_{h≤y} μ(h) h^{−s−R/L} P(log(y/h)/log y)`.
pub fn twisted_moment_main_term(theta: f64, r: f64, p: &[f64], t: f64, w: f64, delta_exp: f64) -> f64 {
    let l = t.ln();
    let rho = r / l;
    let log_y = theta * l;
    let y = log_y.exp().floor() as u64;
    let b: Vec<(u64, f64)> = (1..=y)
        .filter_map(|h| {
            let m = mobius_by_factoring(h);
            (m != 0).then(|| (h, m as f64 * peval(p, (log_y - (h as f64).ln()) / log_y)))
        })
        .collect();
    let z_lo = zeta_borwein(Complex64::new(1.0 - 2.0 * rho, 0.0), 80).re;
    let z_hi = zeta_borwein(Complex64::new(1.0 + 2.0 * rho, 0.0), 80).re;
    let mut first = 0.0;
    let mut second = 0.0;
    for &(h, bh) in &b {
        for &(k, bk) in &b {
            let g = gcd(h, k);
            let hk = ((h / g) * (k / g)) as f64;
            let base = bh * bk / ((h * k) as f64).sqrt();
            first += base * hk.powf(rho - 0.5);
            second += base * hk.powf(-rho - 0.5);
        }
    }
    let width = t.powf(1.0 - delta_exp);
    let height = gaussian_mean(|u| (u / (2.0 * std::f64::consts::PI)).powf(2.0 * rho), w, width);
    z_lo * first + height * z_hi * second
}
