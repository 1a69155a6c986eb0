//! Complex log-gamma (Lanczos, g = 7) and digamma.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `log Γ(z)`; the principal branch for `Re z ≥ 1/2`, continued by reflection below.
/// Returns `None` at the poles.
pub fn ln_gamma(z: Complex64) -> Option<Complex64> {
    if is_nonpositive_integer(z) {
        return None;
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Some(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z)?);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Some(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln())
}

pub fn gamma(z: Complex64) -> Option<Complex64> {
    ln_gamma(z).map(|l| l.exp())
}

// B_{2k}/(2k) for k = 1..7
const DIGAMMA_ASYMPTOTIC: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

/// `ψ(z) = Γ'(z)/Γ(z)`; `None` at the poles.
pub fn digamma(z: Complex64) -> Option<Complex64> {
    if is_nonpositive_integer(z) {
        return None;
    }
    if z.re < 0.5 {
        // ψ(1−z) − ψ(z) = π cot(πz)
        let pz = Complex64::new(PI, 0.0) * z;
        return Some(digamma(Complex64::new(1.0, 0.0) - z)? - PI * pz.cos() / pz.sin());
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 12.0 {
        acc -= 1.0 / w;
        w += 1.0;
    }
    let inv2 = 1.0 / (w * w);
    let mut pow = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for &c in &DIGAMMA_ASYMPTOTIC {
        series += c * pow;
        pow *= inv2;
    }
    Some(acc + w.ln() - 0.5 / w - series)
}
