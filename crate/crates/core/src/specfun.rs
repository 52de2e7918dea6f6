//! Complex gamma function and terminating hypergeometric series.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::CompensatedSum;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k−1))` for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Below this modulus the argument is shifted up before the Stirling series.
const STIRLING_MIN: f64 = 10.0;

fn is_pole(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// `ln Γ(s)` for `Re s ≥ 1/2`, principal branch of the final logarithm not enforced.
fn ln_gamma_right(s: Complex64) -> Complex64 {
    let mut z = s;
    let mut shift = Complex64::new(1.0, 0.0);
    let mut log_shift = Complex64::new(0.0, 0.0);
    while z.norm() < STIRLING_MIN {
        shift *= z;
        // keep the running product bounded
        if shift.norm() > 1e200 {
            log_shift += shift.ln();
            shift = Complex64::new(1.0, 0.0);
        }
        z += 1.0;
    }
    log_shift += shift.ln();
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series - log_shift
}

/// `Γ(s)` on the complex plane.
///
/// Stirling series with ten Bernoulli terms after shifting `|s| ≥ 10`,
/// reflection for `Re s < 1/2`. Relative accuracy is about `1e-14` for
/// `|s| ≤ 50`.
pub fn cgamma(s: Complex64) -> Result<Complex64> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::domain(format!("gamma of non-finite argument {s}")));
    }
    if is_pole(s) {
        return Err(Error::domain(format!("gamma has a pole at {}", s.re)));
    }
    if s.re < 0.5 {
        let sin = (s * PI).sin();
        if sin.norm() == 0.0 {
            return Err(Error::domain(format!("gamma has a pole at {s}")));
        }
        let g = cgamma(Complex64::new(1.0, 0.0) - s)?;
        return Ok(Complex64::new(PI, 0.0) / (sin * g));
    }
    Ok(ln_gamma_right(s).exp())
}

/// Real-argument convenience wrapper around [`cgamma`].
pub fn gamma(x: f64) -> Result<f64> {
    cgamma(Complex64::new(x, 0.0)).map(|g| g.re)
}

/// `ln Γ(s)` for `Re s ≥ 1/2` (no branch normalisation of the imaginary part).
pub fn ln_cgamma(s: Complex64) -> Result<Complex64> {
    if s.re < 0.5 {
        return Err(Error::domain("ln_cgamma is only provided for Re s >= 1/2"));
    }
    Ok(ln_gamma_right(s))
}

/// Term ratios `t_{k+1}/t_k` of a terminating series share this check: no
/// denominator `c + k` may vanish for `k < n`.
fn check_denominator(n: u32, c: Complex64) -> Result<()> {
    for k in 0..n {
        let d = c + k as f64;
        if d.norm() == 0.0 {
            return Err(Error::domain(format!(
                "lower parameter {c} hits zero at term {k} of a degree-{n} series"
            )));
        }
    }
    Ok(())
}

/// Coefficients `(−n)_k (b)_k / ((c)_k k!)`, k = 0..=n, of the terminating ₂F₁.
pub fn hyp2f1_poly_coefficients(n: u32, b: Complex64, c: Complex64) -> Result<Vec<Complex64>> {
    check_denominator(n, c)?;
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut t = Complex64::new(1.0, 0.0);
    coeffs.push(t);
    for k in 0..n {
        let kf = k as f64;
        t = t * (kf - n as f64) * (b + kf) / ((c + kf) * (kf + 1.0));
        coeffs.push(t);
    }
    Ok(coeffs)
}

/// `₂F₁(−n, b; c; x)` as its finite sum, with compensated accumulation.
pub fn hyp2f1_poly(n: u32, b: Complex64, c: Complex64, x: Complex64) -> Result<Complex64> {
    check_denominator(n, c)?;
    let mut sum = CompensatedSum::new();
    let mut t = Complex64::new(1.0, 0.0);
    sum.add(t);
    for k in 0..n {
        let kf = k as f64;
        t = t * (kf - n as f64) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum.add(t);
    }
    Ok(sum.value())
}

/// Coefficients `(−n)_k / ((c)_k k!)`, k = 0..=n, of the terminating ₁F₁.
pub fn hyp1f1_poly_coefficients(n: u32, c: Complex64) -> Result<Vec<Complex64>> {
    check_denominator(n, c)?;
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut t = Complex64::new(1.0, 0.0);
    coeffs.push(t);
    for k in 0..n {
        let kf = k as f64;
        t = t * (kf - n as f64) / ((c + kf) * (kf + 1.0));
        coeffs.push(t);
    }
    Ok(coeffs)
}

/// `₁F₁(−n; c; q)` as its finite sum, with compensated accumulation.
pub fn hyp1f1_poly(n: u32, c: Complex64, q: Complex64) -> Result<Complex64> {
    check_denominator(n, c)?;
    let mut sum = CompensatedSum::new();
    let mut t = Complex64::new(1.0, 0.0);
    sum.add(t);
    for k in 0..n {
        let kf = k as f64;
        t = t * (kf - n as f64) / ((c + kf) * (kf + 1.0)) * q;
        sum.add(t);
    }
    Ok(sum.value())
}
