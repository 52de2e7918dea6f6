//! Bound states of the radial Dirac equation in a Coulomb field.
//!
//! In the rescaled variable `q = 2r√(m²−ε²)`, with `s = √((m+ε)/(m−ε))`,
//!
//! ```text
//! (q d/dq + 1 + χ) f − (qs/2 + λ) g = 0
//! (q d/dq + 1 − χ) g − (q/(2s) − λ) f = 0
//! ```
//!
//! The forward map turns this into a first-order system in `ζ̄` with regular
//! singular points at `±i/2`. Analyticity at `−i/2` forces `η̃ = n`, which
//! fixes the spectrum, and the solutions are polynomial ₂F₁ in `1/(1/2 + iζ̄)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{ppow, validate_params, AnalyticCoefficient, Atom, ParamsRef, PoleTerm};
use crate::error::{Error, Result};
use crate::reconstruct::invert_pole_term;
use crate::roots::brent;
use crate::specfun::{gamma as rgamma, hyp1f1_poly, hyp2f1_poly, hyp2f1_poly_coefficients};

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Pole of the bound-state coefficients, `ζ₀ = i/2`.
const HALF_I: Complex64 = Complex64::new(0.0, 0.5);

/// Mass `m`, coupling `λ = Nα`, and `χ = ±(j + 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiracParams {
    pub m: f64,
    pub lambda: f64,
    pub chi: f64,
}

impl DiracParams {
    pub fn new(m: f64, lambda: f64, chi: f64) -> Result<Self> {
        let p = Self { m, lambda, chi };
        validate_params(ParamsRef::Dirac(&p))?;
        Ok(p)
    }

    /// Nuclear charge `N` with `λ = N/137` and unit mass.
    pub fn hydrogen_like(charge: f64, chi: f64) -> Result<Self> {
        Self::new(1.0, charge * crate::FINE_STRUCTURE, chi)
    }

    /// `χ` from `j` and the sign of the spin–orbit branch (`−` for `j = l + 1/2`).
    pub fn chi_from_j(j: f64, negative: bool) -> Result<f64> {
        let c = j + 0.5;
        if !(c >= 1.0) || c != c.round() {
            return Err(Error::validation(format!("j = {j} is not a positive half-integer")));
        }
        Ok(if negative { -c } else { c })
    }

    /// `γ = √(χ² − λ²)`.
    pub fn gamma(&self) -> f64 {
        (self.chi * self.chi - self.lambda * self.lambda).sqrt()
    }

    fn check_energy(&self, eps: f64) -> Result<()> {
        if !(eps.abs() < self.m) {
            return Err(Error::domain(format!("|epsilon| = {} must be below m = {}", eps.abs(), self.m)));
        }
        Ok(())
    }

    /// `√(m² − ε²)`.
    pub fn k(&self, eps: f64) -> f64 {
        ((self.m - eps) * (self.m + eps)).sqrt()
    }

    /// `√((m+ε)/(m−ε))`.
    pub fn s(&self, eps: f64) -> f64 {
        ((self.m + eps) / (self.m - eps)).sqrt()
    }

    /// `η̃(ε) = −γ + λε/√(m²−ε²)`.
    pub fn eta_tilde(&self, eps: f64) -> f64 {
        -self.gamma() + self.lambda * eps / self.k(eps)
    }
}

/// `ε_n = m [1 + λ²/(γ+n)²]^{−1/2}`.
pub fn spectrum(p: &DiracParams, n: u32) -> Result<f64> {
    validate_params(ParamsRef::Dirac(p))?;
    let x = p.lambda / (p.gamma() + n as f64);
    Ok(p.m / (1.0 + x * x).sqrt())
}

/// Solves `η̃(ε) = n` for `ε ∈ (0, m)` by bracketed root finding.
pub fn quantize(p: &DiracParams, n: u32) -> Result<f64> {
    validate_params(ParamsRef::Dirac(p))?;
    let target = n as f64;
    let mut hi = 0.5 * p.m;
    let mut gap = 0.5 * p.m;
    while p.eta_tilde(hi) <= target {
        gap *= 0.5;
        if gap < p.m * f64::EPSILON {
            return Err(Error::domain(format!("no root of eta_tilde = {n} below m")));
        }
        hi = p.m - gap;
    }
    brent(|e| Ok(p.eta_tilde(e) - target), 0.0, hi, 1e-16 * p.m, 200)
}

/// A bound state with its exponents and the spinor prefactors of the two
/// channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    pub n: u32,
    pub epsilon: f64,
    /// `η = −γ − λε/k = −n − 2γ`.
    pub eta: f64,
    /// `η̃ = −γ + λε/k = n`.
    pub eta_tilde: f64,
    /// `(−γ + χ − λs)·(1, −1/s)`.
    pub spinor_a: [f64; 2],
    /// `(−γ + χ + λs)·(1, 1/s)`; zero when `n = 0`.
    pub spinor_b: [f64; 2],
}

impl BoundState {
    pub fn new(p: &DiracParams, n: u32) -> Result<Self> {
        let eps = spectrum(p, n)?;
        let g = p.gamma();
        let s = p.s(eps);
        let ca = -g + p.chi - p.lambda * s;
        let cb = -g + p.chi + p.lambda * s;
        if n == 0 && p.chi > 0.0 {
            return Err(Error::domain(format!(
                "no n = 0 bound state for chi = {} > 0",
                p.chi
            )));
        }
        let spinor_b = if n == 0 { [0.0, 0.0] } else { [cb, cb / s] };
        let lek = p.lambda * eps / p.k(eps);
        Ok(Self {
            n,
            epsilon: eps,
            eta: -g - lek,
            eta_tilde: -g + lek,
            spinor_a: [ca, -ca / s],
            spinor_b,
        })
    }
}

/// Real-valued 2×2 matrix stored with complex entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

impl Matrix2 {
    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    pub fn identity() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn mul(&self, o: &Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(r)
    }

    pub fn add(&self, o: &Matrix2) -> Matrix2 {
        self.zip(o, |x, y| x + y)
    }

    pub fn sub(&self, o: &Matrix2) -> Matrix2 {
        self.zip(o, |x, y| x - y)
    }

    pub fn scale(&self, c: Complex64) -> Matrix2 {
        Matrix2(self.0.map(|row| row.map(|x| x * c)))
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    fn zip(&self, o: &Matrix2, f: impl Fn(Complex64, Complex64) -> Complex64) -> Matrix2 {
        let mut r = self.0;
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = f(self.0[i][j], o.0[i][j]);
            }
        }
        Matrix2(r)
    }
}

/// The matrices of the transformed system at energy `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiracMatrices {
    pub a_prime: Matrix2,
    pub b_prime: Matrix2,
    /// `(A′+B′)/(−2η)`.
    pub a: Matrix2,
    /// `(A′−B′)/(−2η̃)`; absent when `η̃ = 0`.
    pub b: Option<Matrix2>,
    pub eta: f64,
    pub eta_tilde: f64,
    pub gamma: f64,
    /// `2λε/√(m²−ε²)`.
    pub c: f64,
}

pub fn build_matrices(p: &DiracParams, eps: f64) -> Result<DiracMatrices> {
    validate_params(ParamsRef::Dirac(p))?;
    p.check_energy(eps)?;
    let g = p.gamma();
    let (l, chi, s) = (p.lambda, p.chi, p.s(eps));
    let a_prime = Matrix2::from_real([[g - chi, l], [-l, g + chi]]);
    let b_prime = Matrix2::from_real([[l * s, -(chi + g) * s], [-(g - chi) / s, -l / s]]);
    let lek = l * eps / p.k(eps);
    let eta = -g - lek;
    let eta_tilde = -g + lek;
    let a = a_prime.add(&b_prime).scale(Complex64::new(-0.5 / eta, 0.0));
    let b = (eta_tilde != 0.0)
        .then(|| a_prime.sub(&b_prime).scale(Complex64::new(-0.5 / eta_tilde, 0.0)));
    Ok(DiracMatrices { a_prime, b_prime, a, b, eta, eta_tilde, gamma: g, c: 2.0 * lek })
}

impl DiracMatrices {
    /// Residuals of the eight identities, in the order
    /// `A′² = 2γA′, A′B′ = cA′, B′² = cB′, B′A′ = 2γB′, A² = A, AB = A, B² = B, BA = B`,
    /// each as `max|lhs − rhs| / max|rhs|`. The last three are NaN without `B`.
    pub fn identity_residuals(&self) -> [f64; 8] {
        let rel = |lhs: Matrix2, rhs: Matrix2| {
            let scale = rhs.max_abs();
            let d = lhs.sub(&rhs).max_abs();
            if scale == 0.0 {
                d
            } else {
                d / scale
            }
        };
        let (ap, bp, a) = (&self.a_prime, &self.b_prime, &self.a);
        let two_g = Complex64::new(2.0 * self.gamma, 0.0);
        let c = Complex64::new(self.c, 0.0);
        let mut out = [
            rel(ap.mul(ap), ap.scale(two_g)),
            rel(ap.mul(bp), ap.scale(c)),
            rel(bp.mul(bp), bp.scale(c)),
            rel(bp.mul(ap), bp.scale(two_g)),
            rel(a.mul(a), *a),
            f64::NAN,
            f64::NAN,
            f64::NAN,
        ];
        if let Some(b) = &self.b {
            out[5] = rel(a.mul(b), *a);
            out[6] = rel(b.mul(b), *b);
            out[7] = rel(b.mul(a), *b);
        }
        out
    }

    /// Coefficient of the transformed system `dΦ/dζ̄ = −M(ζ̄)Φ`.
    pub fn system_matrix(&self, zbar: Complex64) -> Matrix2 {
        let plus = self.a_prime.add(&self.b_prime).scale(0.5 / (zbar - HALF_I));
        let minus = self.a_prime.sub(&self.b_prime).scale(0.5 / (zbar + HALF_I));
        plus.add(&minus)
    }
}

fn check_lower(zbar: Complex64) -> Result<()> {
    if !(zbar.im < 0.0) {
        return Err(Error::domain(format!("ζ̄ = {zbar} is not in the lower half-plane")));
    }
    Ok(())
}

/// `Φ_n(ζ̄)` up to an overall constant:
///
/// ```text
/// Φ_n = w^{−2γ} [ spinor_a ₂F₁(−n, 2γ; 2γ+1; 1/w) + spinor_b ₂F₁(1−n, 2γ; 2γ+1; 1/w) ],
/// w = 1/2 + iζ̄.
/// ```
///
/// For `n = 0` only the first term is kept.
pub fn eigenfunction_z(p: &DiracParams, n: u32, zbar: Complex64) -> Result<[Complex64; 2]> {
    check_lower(zbar)?;
    let st = BoundState::new(p, n)?;
    let g2 = 2.0 * p.gamma();
    let w = I * (zbar - HALF_I);
    let x = w.inv();
    let pre = ppow(w, -g2)?;
    let b = Complex64::new(g2, 0.0);
    let c = Complex64::new(g2 + 1.0, 0.0);
    let fa = hyp2f1_poly(n, b, c, x)? * pre;
    let fb = if n == 0 { Complex64::new(0.0, 0.0) } else { hyp2f1_poly(n - 1, b, c, x)? * pre };
    Ok([
        fa * st.spinor_a[0] + fb * st.spinor_b[0],
        fa * st.spinor_a[1] + fb * st.spinor_b[1],
    ])
}

/// `Φ_n` as pole terms at `ζ₀ = i/2` of orders `2γ + k`, one coefficient per
/// spinor component.
pub fn eigen_coefficients(p: &DiracParams, n: u32) -> Result<[AnalyticCoefficient; 2]> {
    let st = BoundState::new(p, n)?;
    let g = p.gamma();
    let b = Complex64::new(2.0 * g, 0.0);
    let c = Complex64::new(2.0 * g + 1.0, 0.0);
    let ka = hyp2f1_poly_coefficients(n, b, c)?;
    let kb = if n == 0 { Vec::new() } else { hyp2f1_poly_coefficients(n - 1, b, c)? };
    let make = |comp: usize| -> Result<AnalyticCoefficient> {
        let mut poles = Vec::with_capacity(ka.len());
        for k in 0..ka.len() {
            let mut coeff = ka[k] * st.spinor_a[comp];
            if k < kb.len() {
                coeff += kb[k] * st.spinor_b[comp];
            }
            poles.push(PoleTerm { coeff, order: 2.0 * g + k as f64, pole: HALF_I });
        }
        AnalyticCoefficient::from_poles(g, poles)
    };
    Ok([make(0)?, make(1)?])
}

/// Residual of `dΦ/dζ̄ + M(ζ̄)Φ = 0` at `ζ̄`, relative to the size of the two
/// terms; `dΦ/dζ̄` is taken symbolically from the pole terms.
pub fn transformed_residual(p: &DiracParams, n: u32, zbar: Complex64) -> Result<f64> {
    check_lower(zbar)?;
    let st = BoundState::new(p, n)?;
    let mats = build_matrices(p, st.epsilon)?;
    let [c0, c1] = eigen_coefficients(p, n)?;
    let phi = [c0.eval(zbar)?, c1.eval(zbar)?];
    let dphi = [c0.derivative()?.eval(zbar)?, c1.derivative()?.eval(zbar)?];
    let m_phi = mats.system_matrix(zbar).apply(phi);
    let num = (dphi[0] + m_phi[0]).norm().max((dphi[1] + m_phi[1]).norm());
    let den = dphi[0].norm().max(dphi[1].norm()).max(m_phi[0].norm()).max(m_phi[1].norm());
    Ok(if den == 0.0 { num } else { num / den })
}

/// A normalised configuration-space eigenfunction `(f, g)` in `q`.
///
/// ```text
/// f = C q^{γ−1} e^{−q/2} [c_A ₁F₁(−n; 2γ+1; q) + c_B ₁F₁(1−n; 2γ+1; q)] / Γ(2γ)
/// g = C q^{γ−1} e^{−q/2} [−c_A ₁F₁(−n; 2γ+1; q) + c_B ₁F₁(1−n; 2γ+1; q)] / (sΓ(2γ))
/// ```
///
/// with `C` fixed by `∫q²(f²+g²)dq = 1` and `f > 0` as `q → 0⁺`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialEigenstate {
    pub params: DiracParams,
    pub state: BoundState,
    /// `C`: the factor between `ℒ^γ f` and [`eigen_coefficients`].
    pub scale: f64,
    pub f_atoms: Vec<Atom>,
    pub g_atoms: Vec<Atom>,
}

impl RadialEigenstate {
    pub fn new(p: &DiracParams, n: u32) -> Result<Self> {
        let state = BoundState::new(p, n)?;
        let g = p.gamma();
        let [c0, c1] = eigen_coefficients(p, n)?;
        let inv = |c: &AnalyticCoefficient| {
            c.poles.iter().map(|t| invert_pole_term(t, g)).collect::<Result<Vec<_>>>()
        };
        let fa = inv(&c0)?;
        let ga = inv(&c1)?;
        // ∫ q² q^{2γ−2+j+k} e^{−q} dq = Γ(2γ+1+j+k)
        let gram = |atoms: &[Atom]| -> Result<f64> {
            let mut acc = 0.0;
            for a in atoms {
                for b in atoms {
                    acc += (a.coeff.conj() * b.coeff).re * rgamma(a.alpha + b.alpha + 1.0)?;
                }
            }
            Ok(acc)
        };
        let norm2 = gram(&fa)? + gram(&ga)?;
        let lead = state.spinor_a[0] + state.spinor_b[0];
        let scale = lead.signum() / norm2.sqrt();
        let sc = |v: Vec<Atom>| v.into_iter().map(|a| a.scaled(Complex64::new(scale, 0.0))).collect();
        Ok(Self { params: *p, state, scale, f_atoms: sc(fa), g_atoms: sc(ga) })
    }

    /// `(f(q), g(q))`, evaluated from the ₁F₁ polynomials.
    pub fn eval(&self, q: f64) -> Result<(f64, f64)> {
        if !(q > 0.0) {
            return Err(Error::domain(format!("q must be positive, got {q}")));
        }
        let p = &self.params;
        let g = p.gamma();
        let n = self.state.n;
        let c = Complex64::new(2.0 * g + 1.0, 0.0);
        let x = Complex64::new(q, 0.0);
        let fa = hyp1f1_poly(n, c, x)?.re;
        let fb = if n == 0 { 0.0 } else { hyp1f1_poly(n - 1, c, x)?.re };
        let pre = self.scale * q.powf(g - 1.0) * (-0.5 * q).exp() / rgamma(2.0 * g)?;
        let (sa, sb) = (&self.state.spinor_a, &self.state.spinor_b);
        Ok((pre * (sa[0] * fa + sb[0] * fb), pre * (sa[1] * fa + sb[1] * fb)))
    }

    /// `ℒ^γ` of the normalised `(f, g)`.
    pub fn coefficients(&self) -> Result<[AnalyticCoefficient; 2]> {
        let [a, b] = eigen_coefficients(&self.params, self.state.n)?;
        let s = Complex64::new(self.scale, 0.0);
        Ok([a.scaled(s)?, b.scaled(s)?])
    }

    /// Physical radius for a given `q`.
    pub fn radius(&self, q: f64) -> f64 {
        q / (2.0 * self.params.k(self.state.epsilon))
    }
}

/// `(f(q), g(q))` of the normalised eigenfunction.
pub fn eigenfunction_config(p: &DiracParams, n: u32, q: f64) -> Result<(f64, f64)> {
    RadialEigenstate::new(p, n)?.eval(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(l: f64, chi: f64) -> DiracParams {
        DiracParams::new(1.0, l, chi).unwrap()
    }

    #[test]
    fn hydrogen_ground_state() {
        let p = DiracParams::hydrogen_like(1.0, -1.0).unwrap();
        let e = spectrum(&p, 0).unwrap();
        assert!((e - 0.999973359973355).abs() < 1e-15);
        let l: f64 = 1.0 / 137.0;
        assert!((e - (1.0 - l * l).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_rational_level() {
        let e = spectrum(&params(0.6, -1.0), 1).unwrap();
        assert!((e - 3.0 / 10f64.sqrt()).abs() < 1e-15);
        assert!((quantize(&params(0.6, -1.0), 1).unwrap() - e).abs() < 1e-15);
    }

    #[test]
    fn free_limit() {
        let p = params(1e-9, 2.0);
        assert!((spectrum(&p, 3).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quantize_agrees_and_is_monotone() {
        for l in [0.1, 0.3, 0.6, 0.9] {
            for chi in [-2.0, -1.0, 1.0, 2.0] {
                let p = params(l, chi);
                let mut prev = 0.0;
                for n in 0..=10 {
                    let e = quantize(&p, n).unwrap();
                    let c = spectrum(&p, n).unwrap();
                    assert!((e - c).abs() <= 1e-12 * c, "{l} {chi} {n}");
                    assert!(e > prev);
                    prev = e;
                }
            }
        }
    }

    #[test]
    fn eta_relations() {
        let p = params(0.6, -2.0);
        for n in 1..5 {
            let st = BoundState::new(&p, n).unwrap();
            assert!((st.eta_tilde - n as f64).abs() < 1e-12);
            assert!((st.eta + st.eta_tilde + 2.0 * p.gamma()).abs() < 1e-12);
        }
    }

    #[test]
    fn matrices_satisfy_identities() {
        let p = params(0.6, -1.0);
        let m = build_matrices(&p, spectrum(&p, 1).unwrap()).unwrap();
        for r in m.identity_residuals() {
            assert!(r < 1e-12, "{r}");
        }
        assert!((m.a_prime.trace().re - 2.0 * p.gamma()).abs() < 1e-15);
        assert!(build_matrices(&p, 1.0).is_err());
    }

    #[test]
    fn decoupled_limit() {
        let p = params(1e-12, -1.0);
        let m = build_matrices(&p, 0.5).unwrap();
        assert!(m.a_prime.0[0][0].re - 2.0 < 1e-12);
        assert!(m.a_prime.0[1][1].norm() < 1e-12);
    }

    #[test]
    fn no_ground_state_for_positive_chi() {
        assert!(BoundState::new(&params(0.6, 1.0), 0).is_err());
        assert!(BoundState::new(&params(0.6, 1.0), 1).is_ok());
        let st = BoundState::new(&params(0.6, -1.0), 0).unwrap();
        assert!(st.spinor_b == [0.0, 0.0]);
    }

    #[test]
    fn pole_terms_match_closed_form() {
        let p = params(0.6, -2.0);
        for n in 0..4 {
            let [c0, c1] = eigen_coefficients(&p, n).unwrap();
            let z = Complex64::new(0.4, -0.8);
            let direct = eigenfunction_z(&p, n, z).unwrap();
            assert!((c0.eval(z).unwrap() - direct[0]).norm() < 1e-13 * direct[0].norm());
            assert!((c1.eval(z).unwrap() - direct[1]).norm() < 1e-13 * direct[1].norm());
        }
    }

    #[test]
    fn eigenfunction_is_normalised_and_positive() {
        let st = RadialEigenstate::new(&params(0.6, -1.0), 2).unwrap();
        let (f, _) = st.eval(1e-6).unwrap();
        assert!(f > 0.0);
        let (f1, g1) = st.eval(1.7).unwrap();
        let fa: Complex64 = st.f_atoms.iter().map(|a| a.eval(1.7)).sum();
        let ga: Complex64 = st.g_atoms.iter().map(|a| a.eval(1.7)).sum();
        assert!((fa.re - f1).abs() < 1e-12 && (ga.re - g1).abs() < 1e-12);
        // trapezoid in ln q
        let (t0, t1, n) = ((1e-8f64).ln(), 80f64.ln(), 40000);
        let h = (t1 - t0) / n as f64;
        let mut acc = 0.0;
        for k in 0..=n {
            let q = (t0 + k as f64 * h).exp();
            let (f, g) = st.eval(q).unwrap();
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            acc += w * q * q * q * (f * f + g * g);
        }
        assert!((acc * h - 1.0).abs() < 1e-8, "{}", acc * h);
    }

    #[test]
    fn rejects_upper_half_plane() {
        assert!(eigenfunction_z(&params(0.6, -1.0), 1, Complex64::new(0.0, 0.1)).is_err());
        assert!(eigenfunction_config(&params(0.6, -1.0), 1, 0.0).is_err());
    }
}
