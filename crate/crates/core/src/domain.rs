//! Shared types: half-plane points, wavelet parameters, radial functions as
//! atoms plus samples, and analytic coefficients as pole terms plus a meshed
//! remainder.

use num_complex::Complex64;
use serde::Serialize;

use crate::dirac::DiracParams;
use crate::error::{Error, Result};
use crate::transform::HalfPlaneGrid;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `exp(s·Log w)` with the principal logarithm, `arg w ∈ (−π, π]`.
pub fn principal_power(w: Complex64, s: Complex64) -> Result<Complex64> {
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::domain("principal_power of zero base"));
    }
    if s.re == 0.0 && s.im == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok((s * w.ln()).exp())
}

/// Real-exponent shorthand for [`principal_power`].
pub(crate) fn ppow(w: Complex64, s: f64) -> Result<Complex64> {
    principal_power(w, Complex64::new(s, 0.0))
}

/// A point `z = b + ia` of the upper half-plane. Transforms are evaluated at
/// its conjugate `ζ̄ = b − ia`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlanePoint {
    b: f64,
    a: f64,
}

impl HalfPlanePoint {
    pub fn new(b: f64, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!("half-plane point needs a > 0, got a = {a}, b = {b}")));
        }
        Ok(Self { b, a })
    }

    /// The point whose conjugate is `zbar`; requires `Im zbar < 0`.
    pub fn from_zbar(zbar: Complex64) -> Result<Self> {
        Self::new(zbar.re, -zbar.im)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.b, self.a)
    }

    pub fn zbar(&self) -> Complex64 {
        Complex64::new(self.b, -self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveletClass {
    Admissible,
    NonAdmissibleSquareIntegrable,
    NonSquareIntegrable,
}

impl WaveletClass {
    pub fn label(&self) -> &'static str {
        match self {
            WaveletClass::Admissible => "admissible",
            WaveletClass::NonAdmissibleSquareIntegrable => "non-admissible-square-integrable",
            WaveletClass::NonSquareIntegrable => "non-square-integrable",
        }
    }
}

/// Exponent of the analyzing wavelet `ψ^γ(q) = q^{γ−2} e^{−q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveletParams {
    pub gamma: f64,
}

impl WaveletParams {
    pub fn new(gamma: f64) -> Result<Self> {
        let p = Self { gamma };
        validate_params(ParamsRef::Wavelet(&p))?;
        Ok(p)
    }

    pub fn class(&self) -> WaveletClass {
        if self.gamma > 1.0 {
            WaveletClass::Admissible
        } else if self.gamma > 0.5 {
            WaveletClass::NonAdmissibleSquareIntegrable
        } else {
            WaveletClass::NonSquareIntegrable
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ParamsRef<'a> {
    Wavelet(&'a WaveletParams),
    Dirac(&'a DiracParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classification {
    Wavelet { class: WaveletClass },
    Dirac { gamma: f64 },
}

/// Checks the defining inequalities of a parameter record.
pub fn validate_params(p: ParamsRef<'_>) -> Result<Classification> {
    match p {
        ParamsRef::Wavelet(w) => {
            if !(w.gamma > 0.0) || !w.gamma.is_finite() {
                return Err(Error::validation(format!("gamma > 0 violated (gamma = {})", w.gamma)));
            }
            Ok(Classification::Wavelet { class: w.class() })
        }
        ParamsRef::Dirac(d) => {
            if !(d.m > 0.0) || !d.m.is_finite() {
                return Err(Error::validation(format!("m > 0 violated (m = {})", d.m)));
            }
            if !(d.lambda > 0.0) || !d.lambda.is_finite() {
                return Err(Error::validation(format!("lambda > 0 violated (lambda = {})", d.lambda)));
            }
            if d.chi.abs() < 1.0 || d.chi != d.chi.round() {
                return Err(Error::validation(format!(
                    "|chi| >= 1 integer violated (chi = {})",
                    d.chi
                )));
            }
            if d.chi * d.chi <= d.lambda * d.lambda {
                return Err(Error::validation(format!(
                    "chi^2 > lambda^2 violated (chi = {}, lambda = {})",
                    d.chi, d.lambda
                )));
            }
            Ok(Classification::Dirac { gamma: (d.chi * d.chi - d.lambda * d.lambda).sqrt() })
        }
    }
}

/// `c · q^{α−1} e^{iζ₀q}` with `α ≥ 0` and `Im ζ₀ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub coeff: Complex64,
    pub alpha: f64,
    pub pole: Complex64,
}

impl Atom {
    pub fn new(coeff: Complex64, alpha: f64, pole: Complex64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::domain(format!("atom exponent alpha = {alpha} < 0")));
        }
        if !(pole.im > 0.0) {
            return Err(Error::domain(format!("atom pole {pole} not in the upper half-plane")));
        }
        Ok(Self { coeff, alpha, pole })
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        self.coeff * q.powf(self.alpha - 1.0) * (I * self.pole * q).exp()
    }

    /// `q f′(q)`.
    pub fn q_ddq(&self, q: f64) -> Complex64 {
        self.eval(q) * (Complex64::new(self.alpha - 1.0, 0.0) + I * self.pole * q)
    }

    /// The same atom multiplied by `q`.
    pub fn times_q(&self) -> Atom {
        Atom { alpha: self.alpha + 1.0, ..*self }
    }

    pub fn scaled(&self, c: Complex64) -> Atom {
        Atom { coeff: self.coeff * c, ..*self }
    }
}

/// Samples of `f` on a strictly increasing positive grid.
///
/// The smooth factor `h = f·q^{−β}` is interpolated by cubic Lagrange through
/// the four nearest nodes. Beyond the last node `h` continues as the
/// exponential through the last two samples; below the first node it is held
/// at its cubic extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledFunction {
    grid: Vec<f64>,
    values: Vec<Complex64>,
    beta: f64,
    smooth: Vec<Complex64>,
    tail_rate: Option<Complex64>,
}

impl SampledFunction {
    /// `beta` is the small-q exponent `f ~ q^β`. When `None` it is estimated
    /// from the first three samples.
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>, beta: Option<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::domain("grid and values differ in length"));
        }
        if grid.len() < 4 {
            return Err(Error::domain("at least four samples are needed"));
        }
        if !(grid[0] > 0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("grid must be positive and strictly increasing"));
        }
        let beta = match beta {
            Some(b) => b,
            None => estimate_leading_exponent(&grid, &values),
        };
        let smooth: Vec<Complex64> =
            grid.iter().zip(&values).map(|(q, f)| f * q.powf(-beta)).collect();
        let n = grid.len();
        let (h1, h2) = (smooth[n - 2], smooth[n - 1]);
        let tail_rate = if h1.norm() > 0.0 && h2.norm() > 0.0 {
            let k = (h1 / h2).ln() / (grid[n - 1] - grid[n - 2]);
            (k.re > 0.0).then_some(k)
        } else {
            None
        };
        Ok(Self { grid, values, beta, smooth, tail_rate })
    }

    /// Samples `f` on `grid` with a known leading exponent.
    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Vec<f64>, beta: f64, f: F) -> Result<Self> {
        let values = grid.iter().map(|&q| f(q)).collect();
        Self::new(grid, values, Some(beta))
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `h = f·q^{−β}` at the nodes.
    pub fn smooth_values(&self) -> &[Complex64] {
        &self.smooth
    }

    /// Decay rate `κ` of the tail model `h(q) = h_N e^{−κ(q−q_N)}`, when the
    /// last samples decay.
    pub fn tail_rate(&self) -> Option<Complex64> {
        self.tail_rate
    }

    /// Interpolated smooth factor `h` at `q` inside `[q_0, q_N]`; cubic
    /// extrapolation below `q_0`.
    pub fn smooth_at(&self, q: f64) -> Complex64 {
        let n = self.grid.len();
        let idx = self.grid.partition_point(|&x| x < q);
        let start = idx.saturating_sub(2).min(n - 4);
        lagrange4(&self.grid[start..start + 4], &self.smooth[start..start + 4], q)
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        let n = self.grid.len();
        let last = self.grid[n - 1];
        let h = if q > last {
            match self.tail_rate {
                Some(k) => self.smooth[n - 1] * (-k * (q - last)).exp(),
                None => Complex64::new(0.0, 0.0),
            }
        } else {
            self.smooth_at(q)
        };
        h * q.powf(self.beta)
    }
}

/// Cubic Lagrange interpolation through four nodes.
pub(crate) fn lagrange4(xs: &[f64], ys: &[Complex64], x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..4 {
        let mut l = 1.0;
        for m in 0..4 {
            if m != j {
                l *= (x - xs[m]) / (xs[j] - xs[m]);
            }
        }
        acc += ys[j] * l;
    }
    acc
}

/// Exact fit of `ln|f| = β ln q + c + d q` through the first three samples.
fn estimate_leading_exponent(grid: &[f64], values: &[Complex64]) -> f64 {
    let rows: Vec<[f64; 4]> = (0..3)
        .map(|i| [grid[i].ln(), 1.0, grid[i], values[i].norm().max(f64::MIN_POSITIVE).ln()])
        .collect();
    // Cramer's rule on the 3×3 system
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = [
        [rows[0][0], rows[0][1], rows[0][2]],
        [rows[1][0], rows[1][1], rows[1][2]],
        [rows[2][0], rows[2][1], rows[2][2]],
    ];
    let d = det(a);
    if d.abs() < 1e-300 {
        return 0.0;
    }
    let mut a0 = a;
    for (i, row) in a0.iter_mut().enumerate() {
        row[0] = rows[i][3];
    }
    det(a0) / d
}

/// A radial function: closed-form atoms plus an optional sampled remainder.
/// The two parts are added, never overlapped.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RadialFunction {
    pub atoms: Vec<Atom>,
    pub samples: Option<SampledFunction>,
}

impl RadialFunction {
    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        Self { atoms, samples: None }
    }

    pub fn from_samples(samples: SampledFunction) -> Self {
        Self { atoms: Vec::new(), samples: Some(samples) }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn eval(&self, q: f64) -> Result<Complex64> {
        if !(q > 0.0) {
            return Err(Error::domain(format!("radial functions live on q > 0, got {q}")));
        }
        let atoms: Complex64 = self.atoms.iter().map(|a| a.eval(q)).sum();
        let rest = self.samples.as_ref().map_or(Complex64::new(0.0, 0.0), |s| s.eval(q));
        Ok(atoms + rest)
    }
}

/// `coeff · [i(ζ̄ − pole)]^{−order}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleTerm {
    pub coeff: Complex64,
    pub order: f64,
    pub pole: Complex64,
}

impl PoleTerm {
    pub fn base(&self, zbar: Complex64) -> Complex64 {
        I * (zbar - self.pole)
    }

    pub fn eval(&self, zbar: Complex64) -> Result<Complex64> {
        if self.coeff == Complex64::new(0.0, 0.0) {
            return Ok(self.coeff);
        }
        Ok(self.coeff * ppow(self.base(zbar), -self.order)?)
    }

    /// `∂_ζ̄` of this term.
    pub fn derivative(&self) -> PoleTerm {
        PoleTerm {
            coeff: -self.order * I * self.coeff,
            order: self.order + 1.0,
            pole: self.pole,
        }
    }
}

/// Known bound `|G| ≤ K|ζ̄|^{−s}`, `|ζ̄∂G| ≤ K′|ζ̄|^{−s}` on a remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayBound {
    pub k: f64,
    pub k_prime: f64,
    pub exponent: f64,
}

/// Values of a remainder `G(ζ̄)` on the nodes of a [`HalfPlaneGrid`].
#[derive(Debug, Clone, Serialize)]
pub struct MeshSamples {
    pub grid: HalfPlaneGrid,
    /// Row-major, one row per a-node.
    pub values: Vec<Complex64>,
}

impl MeshSamples {
    pub fn new(grid: HalfPlaneGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "mesh has {} nodes but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Bilinear interpolation in the grid's computational coordinates; zero
    /// outside the mesh.
    pub fn eval(&self, zbar: Complex64) -> Complex64 {
        self.grid.interpolate(&self.values, zbar)
    }
}

/// Analytic factor `F(ζ̄)`: a sum of pole terms plus an optional remainder
/// known on a mesh.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticCoefficient {
    pub gamma: f64,
    pub poles: Vec<PoleTerm>,
    pub remainder: Option<MeshSamples>,
    pub bound: Option<DecayBound>,
}

impl AnalyticCoefficient {
    /// Pole-term representation; every order must be at least `γ`.
    pub fn from_poles(gamma: f64, poles: Vec<PoleTerm>) -> Result<Self> {
        for p in &poles {
            if p.order < gamma - 1e-12 {
                return Err(Error::domain(format!(
                    "pole order {} below gamma = {gamma}",
                    p.order
                )));
            }
            if !(p.pole.im > 0.0) {
                return Err(Error::domain(format!("pole {} not in the upper half-plane", p.pole)));
            }
        }
        Ok(Self { gamma, poles, remainder: None, bound: None })
    }

    pub fn zero(gamma: f64) -> Self {
        Self { gamma, poles: Vec::new(), remainder: None, bound: None }
    }

    pub fn with_remainder(mut self, remainder: MeshSamples) -> Self {
        self.remainder = Some(remainder);
        self
    }

    pub fn is_symbolic(&self) -> bool {
        self.remainder.is_none()
    }

    pub fn eval(&self, zbar: Complex64) -> Result<Complex64> {
        if !(zbar.im < 0.0) {
            return Err(Error::domain(format!(
                "analytic coefficient evaluated at {zbar}, outside Im ζ̄ < 0"
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &self.poles {
            acc += p.eval(zbar)?;
        }
        if let Some(r) = &self.remainder {
            acc += r.eval(zbar);
        }
        Ok(acc)
    }

    /// Symbolic `∂_ζ̄`; unsupported when a remainder is present.
    pub fn derivative(&self) -> Result<Self> {
        self.require_symbolic("derivative")?;
        Ok(Self {
            gamma: self.gamma,
            poles: self.poles.iter().map(PoleTerm::derivative).collect(),
            remainder: None,
            bound: None,
        })
    }

    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        self.require_symbolic("scaling")?;
        Ok(Self {
            gamma: self.gamma,
            poles: self.poles.iter().map(|p| PoleTerm { coeff: p.coeff * c, ..*p }).collect(),
            remainder: None,
            bound: None,
        })
    }

    pub(crate) fn require_symbolic(&self, what: &str) -> Result<()> {
        if self.remainder.is_some() {
            return Err(Error::Unsupported(format!(
                "{what} needs a pole-term representation; use finite differences for meshed remainders"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn principal_power_examples() {
        assert_eq!(principal_power(c(1.0, 0.0), c(0.75, 0.0)).unwrap(), c(1.0, 0.0));
        let base = I * (c(0.0, -1.0) - c(0.0, 1.0));
        assert!((principal_power(base, c(1.0, 0.0)).unwrap() - 2.0).norm() < 1e-15);
        let v = principal_power(c(2.0, 0.0), c(-1.6, 0.0)).unwrap();
        assert!((v.re - 0.32987697769322354).abs() < 1e-15);
        assert!(principal_power(c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn half_plane_point_rejects_lower_half() {
        assert!(HalfPlanePoint::new(0.0, 0.0).is_err());
        assert!(HalfPlanePoint::new(0.0, -1.0).is_err());
        let p = HalfPlanePoint::new(2.0, 0.5).unwrap();
        assert_eq!(p.zbar(), c(2.0, -0.5));
        assert_eq!(p.z(), c(2.0, 0.5));
    }

    #[test]
    fn wavelet_classification() {
        assert_eq!(WaveletParams::new(2.0).unwrap().class(), WaveletClass::Admissible);
        assert_eq!(
            WaveletParams::new(0.8).unwrap().class(),
            WaveletClass::NonAdmissibleSquareIntegrable
        );
        assert_eq!(WaveletParams::new(0.4).unwrap().class(), WaveletClass::NonSquareIntegrable);
        assert_eq!(WaveletParams::new(0.5).unwrap().class(), WaveletClass::NonSquareIntegrable);
        assert!(matches!(WaveletParams::new(0.0), Err(Error::Validation(_))));
    }

    #[test]
    fn dirac_validation() {
        let d = DiracParams { m: 1.0, lambda: 0.6, chi: -1.0 };
        match validate_params(ParamsRef::Dirac(&d)).unwrap() {
            Classification::Dirac { gamma } => assert!((gamma - 0.8).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        let bad = DiracParams { m: 1.0, lambda: 1.2, chi: 1.0 };
        let err = validate_params(ParamsRef::Dirac(&bad)).unwrap_err();
        assert!(err.to_string().contains("chi^2 > lambda^2"));
    }

    #[test]
    fn atom_validation_and_derivative() {
        assert!(Atom::new(c(1.0, 0.0), -0.1, I).is_err());
        assert!(Atom::new(c(1.0, 0.0), 0.5, c(1.0, 0.0)).is_err());
        let a = Atom::new(c(0.3, -0.2), 0.7, c(1.0, 0.5)).unwrap();
        let q = 1.3;
        let h = 1e-6;
        let fd = (a.eval(q + h) - a.eval(q - h)) / (2.0 * h) * q;
        assert!((fd - a.q_ddq(q)).norm() < 1e-8);
    }

    #[test]
    fn samples_reproduce_smooth_function() {
        let grid: Vec<f64> = (1..=400).map(|i| 0.02 * i as f64).collect();
        let f = |q: f64| c(q.powf(-0.4) * (-q).exp(), 0.0);
        let s = SampledFunction::from_fn(grid.clone(), -0.4, f).unwrap();
        for q in [0.031, 0.5, 3.3, 7.77] {
            assert!((s.eval(q) - f(q)).norm() < 1e-8 * f(q).norm(), "{q}");
        }
        // exponential tail continues exactly
        assert!((s.eval(12.0) - f(12.0)).norm() < 1e-8 * f(12.0).norm());
        let est = SampledFunction::new(grid, s.values().to_vec(), None).unwrap();
        assert!((est.beta() + 0.4).abs() < 1e-3);
    }

    #[test]
    fn sample_validation() {
        let v = vec![c(1.0, 0.0); 4];
        assert!(SampledFunction::new(vec![0.1, 0.2, 0.2, 0.3], v.clone(), Some(0.0)).is_err());
        assert!(SampledFunction::new(vec![0.0, 0.2, 0.3, 0.4], v.clone(), Some(0.0)).is_err());
        assert!(SampledFunction::new(vec![0.1, 0.2, 0.3], v[..3].to_vec(), Some(0.0)).is_err());
    }

    #[test]
    fn coefficient_rejects_upper_half_plane() {
        let f = AnalyticCoefficient::from_poles(
            0.6,
            vec![PoleTerm { coeff: c(1.0, 0.0), order: 1.6, pole: I }],
        )
        .unwrap();
        assert!(f.eval(c(0.0, -1.0)).is_ok());
        assert!(matches!(f.eval(c(0.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(f.eval(c(1.0, 0.5)), Err(Error::Domain(_))));
        assert!(AnalyticCoefficient::from_poles(
            0.6,
            vec![PoleTerm { coeff: c(1.0, 0.0), order: 0.5, pole: I }]
        )
        .is_err());
    }
}
