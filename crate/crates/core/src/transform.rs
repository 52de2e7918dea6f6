//! The forward map `F(ζ̄) = ∫₀^∞ e^{−iζ̄q} q^γ f(q) dq`: closed form on atoms,
//! quadrature on samples, the two operator maps, and decay diagnostics.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{
    lagrange4, AnalyticCoefficient, Atom, HalfPlanePoint, MeshSamples, PoleTerm, RadialFunction,
    SampledFunction,
};
use crate::error::{Error, Result};
use crate::numdiff;
use crate::quad::{self, Estimate, GaussLegendre, Tolerance};
use crate::specfun::cgamma;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// How the computational coordinate `v` maps to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BMap {
    /// `b = (a + offset)·tan v`, `v ∈ (−π/2, π/2)`: the whole real line.
    Tangent { offset: f64 },
    /// `b = v`, `v ∈ [−half_width, half_width]`.
    Linear { half_width: f64 },
}

/// Tensor Gauss–Legendre mesh over the half-plane in `(u, v)` with `a = e^u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfPlaneGrid {
    u_range: (f64, f64),
    u_nodes: Vec<f64>,
    u_weights: Vec<f64>,
    v_range: (f64, f64),
    v_nodes: Vec<f64>,
    v_weights: Vec<f64>,
    map: BMap,
    order: usize,
}

impl HalfPlaneGrid {
    /// `a_panels × order` nodes in `ln a` over `[a_min, a_max]`, and
    /// `b_panels × order` nodes in `v`.
    pub fn new(
        a_min: f64,
        a_max: f64,
        a_panels: usize,
        map: BMap,
        b_panels: usize,
        order: usize,
    ) -> Result<Self> {
        if !(a_min > 0.0) || !(a_max > a_min) {
            return Err(Error::domain(format!("need 0 < a_min < a_max, got [{a_min}, {a_max}]")));
        }
        if a_panels == 0 || b_panels == 0 || !(1..=32).contains(&order) {
            return Err(Error::domain("grid needs at least one panel and order in 1..=32"));
        }
        let v_range = match map {
            BMap::Tangent { offset } => {
                if !(offset >= 0.0) {
                    return Err(Error::domain("tangent map offset must be >= 0"));
                }
                (-FRAC_PI_2, FRAC_PI_2)
            }
            BMap::Linear { half_width } => {
                if !(half_width > 0.0) || !half_width.is_finite() {
                    return Err(Error::domain("linear b-range must be finite and positive"));
                }
                (-half_width, half_width)
            }
        };
        let u_range = (a_min.ln(), a_max.ln());
        let (u_nodes, u_weights) = quad::composite_nodes(u_range.0, u_range.1, a_panels, order);
        let (v_nodes, v_weights) = quad::composite_nodes(v_range.0, v_range.1, b_panels, order);
        Ok(Self { u_range, u_nodes, u_weights, v_range, v_nodes, v_weights, map, order })
    }

    /// Mesh for Bergman-type integrals of functions with poles at height
    /// `offset` above the real axis.
    pub fn bergman_default(offset: f64) -> Result<Self> {
        Self::new(1e-8, 1e6, 48, BMap::Tangent { offset }, 24, 16)
    }

    /// Mesh for b-first reconstruction of remainders that decay fast in `b`.
    pub fn reconstruction_default(half_width: f64, a_max: f64) -> Result<Self> {
        Self::new(1e-12, a_max, 40, BMap::Linear { half_width }, 120, 10)
    }

    /// Small mesh for tabulating `F` in demos.
    pub fn display(a_min: f64, a_max: f64, half_width: f64, na: usize, nb: usize) -> Result<Self> {
        Self::new(a_min, a_max, na, BMap::Linear { half_width }, nb, 1)
    }

    pub fn map(&self) -> BMap {
        self.map
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a_min(&self) -> f64 {
        self.u_range.0.exp()
    }

    pub fn a_max(&self) -> f64 {
        self.u_range.1.exp()
    }

    pub fn rows(&self) -> usize {
        self.u_nodes.len()
    }

    pub fn cols(&self) -> usize {
        self.v_nodes.len()
    }

    pub fn len(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn a_nodes(&self) -> Vec<f64> {
        self.u_nodes.iter().map(|u| u.exp()).collect()
    }

    /// Weight of row `i` for `∫ da` (the Jacobian `a` included).
    pub fn a_weight(&self, i: usize) -> f64 {
        self.u_weights[i] * self.u_nodes[i].exp()
    }

    fn b_of(&self, a: f64, v: f64) -> (f64, f64) {
        match self.map {
            BMap::Tangent { offset } => {
                let s = a + offset;
                let (sin, cos) = v.sin_cos();
                (s * sin / cos, s / (cos * cos))
            }
            BMap::Linear { .. } => (v, 1.0),
        }
    }

    /// `(a, b, w_b)` of node `(i, j)`, where `w_b` is the `∫ db` weight.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64, f64) {
        let a = self.u_nodes[i].exp();
        let (b, jac) = self.b_of(a, self.v_nodes[j]);
        (a, b, self.v_weights[j] * jac)
    }

    /// `ζ̄ = b − ia` at every node, row-major.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let (a, b, _) = self.node(i, j);
                out.push(Complex64::new(b, -a));
            }
        }
        out
    }

    /// Bilinear interpolation of node values in `(u, v)`; zero outside the
    /// node hull.
    pub fn interpolate(&self, values: &[Complex64], zbar: Complex64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let a = -zbar.im;
        if !(a > 0.0) {
            return zero;
        }
        let u = a.ln();
        let v = match self.map {
            BMap::Tangent { offset } => (zbar.re / (a + offset)).atan(),
            BMap::Linear { .. } => zbar.re,
        };
        let (Some((i, tu)), Some((j, tv))) = (cell(&self.u_nodes, u), cell(&self.v_nodes, v))
        else {
            return zero;
        };
        let nc = self.cols();
        let f = |r: usize, c: usize| values[r * nc + c];
        f(i, j) * ((1.0 - tu) * (1.0 - tv))
            + f(i + 1, j) * (tu * (1.0 - tv))
            + f(i, j + 1) * ((1.0 - tu) * tv)
            + f(i + 1, j + 1) * (tu * tv)
    }
}

fn cell(nodes: &[f64], x: f64) -> Option<(usize, f64)> {
    let n = nodes.len();
    if n < 2 || x < nodes[0] || x > nodes[n - 1] {
        return None;
    }
    let k = nodes.partition_point(|&y| y <= x).clamp(1, n - 1) - 1;
    Some((k, (x - nodes[k]) / (nodes[k + 1] - nodes[k])))
}

/// Closed-form transform of one atom: `c·Γ(γ+α)·[i(ζ̄−ζ₀)]^{−(γ+α)}`.
pub fn forward_atom(atom: &Atom, gamma: f64) -> Result<PoleTerm> {
    check_gamma(gamma)?;
    let order = gamma + atom.alpha;
    Ok(PoleTerm {
        coeff: atom.coeff * cgamma(Complex64::new(order, 0.0))?,
        order,
        pole: atom.pole,
    })
}

/// Closed-form transform of an atom sum.
pub fn forward_atoms(atoms: &[Atom], gamma: f64) -> Result<AnalyticCoefficient> {
    let poles = atoms.iter().map(|a| forward_atom(a, gamma)).collect::<Result<Vec<_>>>()?;
    AnalyticCoefficient::from_poles(gamma, poles)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

fn check_zbar(zbar: Complex64) -> Result<()> {
    if !(zbar.im < 0.0) {
        return Err(Error::domain(format!("ζ̄ = {zbar} is not in the lower half-plane")));
    }
    Ok(())
}

/// Precomputed quadrature of `∫ e^{−iζ̄q} q^γ f(q) dq` for one sampled
/// function: the ζ̄-independent factors are folded into the weights, so each
/// evaluation is a single weighted sum.
#[derive(Debug, Clone)]
pub struct ForwardPlan<'a> {
    samples: &'a SampledFunction,
    gamma: f64,
    power: f64,
    nodes: Vec<f64>,
    weights: Vec<Complex64>,
    coarse_nodes: Vec<f64>,
    coarse_weights: Vec<Complex64>,
    head_poly: [Complex64; 4],
    /// Interval width when the sample grid is uniform.
    step: Option<f64>,
    tol: Tolerance,
}

const FINE: usize = 8;
const COARSE: usize = 5;
/// Above this `|ζ̄|·q₀` the head series is replaced by quadrature.
const HEAD_SERIES_LIMIT: f64 = 8.0;

impl<'a> ForwardPlan<'a> {
    pub fn new(samples: &'a SampledFunction, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let power = gamma + samples.beta();
        if !(power > -1.0) {
            return Err(Error::domain(format!(
                "q^{power} is not integrable at 0 (gamma + beta must exceed -1)"
            )));
        }
        let grid = samples.grid();
        let h = samples.smooth_values();
        let n = grid.len();
        if samples.tail_rate().is_none() {
            let hmax = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if h[n - 1].norm() > 1e-14 * hmax {
                return Err(Error::domain(
                    "samples neither decay exponentially nor vanish at the last node",
                ));
            }
        }
        let build = |order: usize| {
            let rule = GaussLegendre::cached(order);
            let mut nodes = Vec::with_capacity((n - 1) * order);
            let mut weights = Vec::with_capacity((n - 1) * order);
            for k in 0..n - 1 {
                let start = k.saturating_sub(1).min(n - 4);
                let xs = &grid[start..start + 4];
                let ys = &h[start..start + 4];
                for (q, w) in rule.mapped(grid[k], grid[k + 1]) {
                    nodes.push(q);
                    weights.push(lagrange4(xs, ys, q) * (w * q.powf(power)));
                }
            }
            (nodes, weights)
        };
        let (nodes, weights) = build(FINE);
        let (coarse_nodes, coarse_weights) = build(COARSE);
        let head_poly = monomial_cubic(&grid[..4], &h[..4]);
        let width = (grid[n - 1] - grid[0]) / (n - 1) as f64;
        let uniform = grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - width).abs() <= 1e-12 * width);
        Ok(Self {
            samples,
            gamma,
            power,
            nodes,
            weights,
            coarse_nodes,
            coarse_weights,
            head_poly,
            step: uniform.then_some(width),
            tol: Tolerance::default(),
        })
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `F(ζ̄)` with an absolute error estimate.
    pub fn eval(&self, zbar: Complex64) -> Result<Estimate> {
        check_zbar(zbar)?;
        let head = self.head(zbar)?;
        let body = self.body(zbar)?;
        let tail = self.tail(zbar);
        Ok(head + body + tail)
    }

    fn body(&self, zbar: Complex64) -> Result<Estimate> {
        let m = -I * zbar;
        let grid = self.samples.grid();
        let sum = |nodes: &[f64], weights: &[Complex64]| {
            let mut acc = quad::CompensatedSum::new();
            match self.step {
                // e^{mq} = e^{m q_k} e^{m(q − q_k)} with offsets shared by all intervals
                Some(width) => {
                    let order = nodes.len() / (grid.len() - 1);
                    let offsets: Vec<Complex64> =
                        nodes[..order].iter().map(|q| (m * (q - grid[0])).exp()).collect();
                    let shift = (m * width).exp();
                    let mut base = Complex64::new(0.0, 0.0);
                    for (k, (w, _)) in weights.chunks(order).zip(nodes.chunks(order)).enumerate() {
                        base = if k % 64 == 0 { (m * grid[k]).exp() } else { base * shift };
                        for (wj, oj) in w.iter().zip(&offsets) {
                            acc.add(wj * (base * oj));
                        }
                    }
                }
                None => {
                    for (q, w) in nodes.iter().zip(weights) {
                        acc.add(w * (m * q).exp());
                    }
                }
            }
            acc.value()
        };
        let fine = sum(&self.nodes, &self.weights);
        let coarse = sum(&self.coarse_nodes, &self.coarse_weights);
        let err = (fine - coarse).norm();
        if err <= self.tol.abs.max(self.tol.rel * fine.norm()) {
            return Ok(Estimate::new(fine, err));
        }
        self.body_adaptive(zbar)
    }

    fn body_adaptive(&self, zbar: Complex64) -> Result<Estimate> {
        let grid = self.samples.grid();
        let h = self.samples.smooth_values();
        let n = grid.len();
        let m = -I * zbar;
        let per = Tolerance {
            abs: self.tol.abs / n as f64,
            ..self.tol
        };
        let mut total = Estimate::zero();
        for k in 0..n - 1 {
            let start = k.saturating_sub(1).min(n - 4);
            let xs = &grid[start..start + 4];
            let ys = &h[start..start + 4];
            let est = quad::adaptive(
                |q| lagrange4(xs, ys, q) * q.powf(self.power) * (m * q).exp(),
                grid[k],
                grid[k + 1],
                per,
            )?;
            total = total + est;
        }
        Ok(total)
    }

    /// `∫₀^{q₀}` against the cubic extrapolation of `h`.
    fn head(&self, zbar: Complex64) -> Result<Estimate> {
        let q0 = self.samples.grid()[0];
        let m = -I * zbar;
        if zbar.norm() * q0 <= HEAD_SERIES_LIMIT {
            let mut acc = quad::CompensatedSum::new();
            let mut mj = Complex64::new(1.0, 0.0);
            let mut last = 0.0;
            for j in 0..200 {
                let mut term = Complex64::new(0.0, 0.0);
                for (k, c) in self.head_poly.iter().enumerate() {
                    let e = self.power + (k + j) as f64 + 1.0;
                    term += c * q0.powf(e) / e;
                }
                let term = term * mj;
                acc.add(term);
                last = term.norm();
                if j > 2 && last <= 1e-17 * acc.value().norm() {
                    break;
                }
                mj *= m / (j as f64 + 1.0);
            }
            return Ok(Estimate::new(acc.value(), last));
        }
        let poly = self.head_poly;
        quad::power_singular(
            self.power + 1.0,
            q0,
            |q| (poly[0] + q * (poly[1] + q * (poly[2] + q * poly[3]))) * (m * q).exp(),
            self.tol,
        )
    }

    /// `∫_{q_N}^∞` of the exponential tail model, by its asymptotic series.
    fn tail(&self, zbar: Complex64) -> Estimate {
        let Some(kappa) = self.samples.tail_rate() else {
            return Estimate::zero();
        };
        let grid = self.samples.grid();
        let qn = grid[grid.len() - 1];
        let hn = self.samples.smooth_values()[grid.len() - 1];
        let p = kappa + I * zbar;
        // ∫₀^∞ e^{−Pt}(1+t/q_N)^s dt = Σ_j (s)_j↓ / (q_N^j P^{j+1})
        let ratio = (p * qn).inv();
        let mut term = p.inv();
        let mut sum = term;
        let mut last = term.norm();
        for j in 1..30 {
            term *= ratio * (self.power - (j - 1) as f64);
            if term.norm() >= last || term.norm() == 0.0 {
                break;
            }
            sum += term;
            last = term.norm();
            if last < 1e-17 * sum.norm() {
                break;
            }
        }
        let scale = hn * qn.powf(self.power) * (-I * zbar * qn).exp();
        Estimate::new(scale * sum, (scale * last).norm())
    }
}

/// Monomial coefficients of the cubic through four points.
fn monomial_cubic(xs: &[f64], ys: &[Complex64]) -> [Complex64; 4] {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for j in 0..4 {
        // expand Π_{m≠j} (x − x_m) / (x_j − x_m)
        let mut poly = [1.0, 0.0, 0.0, 0.0];
        let mut denom = 1.0;
        let mut deg = 0;
        for m in 0..4 {
            if m == j {
                continue;
            }
            denom *= xs[j] - xs[m];
            for d in (0..=deg).rev() {
                poly[d + 1] += poly[d];
                poly[d] *= -xs[m];
            }
            deg += 1;
        }
        for d in 0..4 {
            out[d] += ys[j] * (poly[d] / denom);
        }
    }
    out
}

/// `F(ζ̄)` of sampled data by quadrature, with endpoint models near `q = 0`
/// and beyond the last node.
pub fn forward_quadrature(f: &SampledFunction, gamma: f64, zbar: Complex64) -> Result<Estimate> {
    check_zbar(zbar)?;
    ForwardPlan::new(f, gamma)?.eval(zbar)
}

/// The full transform: atoms become pole terms, samples are transformed on
/// `mesh` into a remainder.
pub fn forward(
    f: &RadialFunction,
    gamma: f64,
    mesh: Option<&HalfPlaneGrid>,
) -> Result<AnalyticCoefficient> {
    let coeff = forward_atoms(&f.atoms, gamma)?;
    let Some(samples) = &f.samples else {
        return Ok(coeff);
    };
    let mesh = mesh.ok_or_else(|| {
        Error::domain("sampled functions need a half-plane mesh for the remainder")
    })?;
    let plan = ForwardPlan::new(samples, gamma)?;
    let values = mesh
        .points()
        .par_iter()
        .map(|&z| plan.eval(z).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(coeff.with_remainder(MeshSamples::new(mesh.clone(), values)?))
}

/// `(ψ_z^γ, f) = a^{γ−1/2} F(ζ̄)`.
pub fn wavelet_coefficient(f: &RadialFunction, z: HalfPlanePoint, gamma: f64) -> Result<Complex64> {
    let zbar = z.zbar();
    let mut value = Complex64::new(0.0, 0.0);
    for atom in &f.atoms {
        value += forward_atom(atom, gamma)?.eval(zbar)?;
    }
    if let Some(s) = &f.samples {
        value += forward_quadrature(s, gamma, zbar)?.value;
    }
    Ok(value * z.a().powf(gamma - 0.5))
}

/// `−ζ̄∂_ζ̄F − (γ+1)F`, the image of `q d/dq`.
pub fn apply_operator_map_qddq(f: &AnalyticCoefficient) -> Result<AnalyticCoefficient> {
    f.require_symbolic("the q d/dq operator map")?;
    let g = f.gamma;
    let mut poles = Vec::with_capacity(2 * f.poles.len());
    for t in &f.poles {
        let s = t.order;
        let same = t.coeff * (s - g - 1.0);
        let raised = I * s * t.coeff * t.pole;
        if same != Complex64::new(0.0, 0.0) {
            poles.push(PoleTerm { coeff: same, ..*t });
        }
        if raised != Complex64::new(0.0, 0.0) {
            poles.push(PoleTerm { coeff: raised, order: s + 1.0, pole: t.pole });
        }
    }
    AnalyticCoefficient::from_poles(g, poles)
}

/// `i∂_ζ̄F`, the image of multiplication by `q`.
pub fn apply_operator_map_q(f: &AnalyticCoefficient) -> Result<AnalyticCoefficient> {
    f.require_symbolic("the q operator map")?;
    let poles = f
        .poles
        .iter()
        .map(|t| PoleTerm { coeff: t.coeff * t.order, order: t.order + 1.0, pole: t.pole })
        .collect();
    AnalyticCoefficient::from_poles(f.gamma, poles)
}

/// `∂_ζ̄F` at a point by central differences; for meshed remainders.
pub fn derivative_fd(f: &AnalyticCoefficient, zbar: Complex64) -> Result<Complex64> {
    numdiff::central_difference(|w| f.eval(w), zbar)
}

/// Finite-difference version of [`apply_operator_map_qddq`] at one point.
pub fn operator_map_qddq_fd(f: &AnalyticCoefficient, zbar: Complex64) -> Result<Complex64> {
    Ok(-zbar * derivative_fd(f, zbar)? - (f.gamma + 1.0) * f.eval(zbar)?)
}

/// Finite-difference version of [`apply_operator_map_q`] at one point.
pub fn operator_map_q_fd(f: &AnalyticCoefficient, zbar: Complex64) -> Result<Complex64> {
    Ok(I * derivative_fd(f, zbar)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct RayReport {
    pub ray: String,
    /// Slope of `ln|F|` against `ln|ζ̄|` over `|ζ̄| ∈ [1e4, 1e6]`.
    pub exponent: f64,
    /// `|F|` never increases beyond `|ζ̄| = 10`.
    pub monotone: bool,
    pub last_abs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub rays: Vec<RayReport>,
    pub passed: bool,
}

const RAY_POINTS: usize = 61;

/// Samples `|F|` along `b → ±∞` at `a = 1` and `a → ∞` at `b = 0`.
pub fn decay_check(f: &AnalyticCoefficient) -> Result<DecayReport> {
    type Ray = (&'static str, fn(f64) -> Complex64);
    let rays: [Ray; 3] = [
        ("b->+inf, a=1", |t| Complex64::new(t, -1.0)),
        ("b->-inf, a=1", |t| Complex64::new(-t, -1.0)),
        ("a->inf, b=0", |t| Complex64::new(0.0, -t)),
    ];
    let mut out = Vec::with_capacity(3);
    for (label, point) in rays {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut monotone = true;
        let mut prev = f64::INFINITY;
        let mut last_abs = 0.0;
        for k in 0..RAY_POINTS {
            let t = 10f64.powf(1.0 + 5.0 * k as f64 / (RAY_POINTS - 1) as f64);
            let z = point(t);
            let v = f.eval(z)?.norm();
            if v > prev * (1.0 + 1e-12) {
                monotone = false;
            }
            prev = v;
            last_abs = v;
            if z.norm() >= 1e4 && v > 0.0 {
                xs.push(z.norm().ln());
                ys.push(v.ln());
            }
        }
        let exponent = if xs.len() < 2 { f64::NEG_INFINITY } else { slope(&xs, &ys) };
        out.push(RayReport { ray: label.to_string(), exponent, monotone, last_abs });
    }
    let passed = out.iter().all(|r| r.monotone && r.exponent < 0.0);
    Ok(DecayReport { rays: out, passed })
}

/// Least-squares slope.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp_atom() -> Atom {
        Atom::new(c(1.0, 0.0), 1.0, I).unwrap()
    }

    fn dense_grid() -> Vec<f64> {
        (1..=4000).map(|i| 0.01 * i as f64).collect()
    }

    #[test]
    fn atom_closed_form_value() {
        let t = forward_atom(&exp_atom(), 0.6).unwrap();
        let v = t.eval(c(0.0, -1.0)).unwrap();
        assert!((v.re - 0.294750142945528).abs() < 1e-14 && v.im.abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let s = SampledFunction::from_fn(dense_grid(), 0.0, |q| c((-q).exp(), 0.0)).unwrap();
        let v = forward_quadrature(&s, 0.6, c(0.0, -1.0)).unwrap();
        assert!((v.value.re - 0.294750142945528).abs() < 1e-9, "{v:?}");
        let s = SampledFunction::from_fn(dense_grid(), -0.8, |q| c(q.powf(-0.8) * (-q).exp(), 0.0))
            .unwrap();
        let v = forward_quadrature(&s, 0.6, c(0.0, -1.0)).unwrap();
        assert!((v.value.re - 0.668674378497462).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn quadrature_of_zero_is_zero() {
        let s = SampledFunction::from_fn(dense_grid(), 0.0, |_| c(0.0, 0.0)).unwrap();
        let v = forward_quadrature(&s, 0.6, c(0.3, -1.0)).unwrap();
        assert_eq!(v.value, c(0.0, 0.0));
    }

    #[test]
    fn quadrature_rejects_upper_half_plane() {
        let s = SampledFunction::from_fn(dense_grid(), 0.0, |q| c((-q).exp(), 0.0)).unwrap();
        assert!(matches!(forward_quadrature(&s, 0.6, c(0.0, 1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn head_uses_quadrature_for_large_arguments() {
        // h = (3 − q)³ is reproduced exactly by the cubic model, including the
        // extrapolated head on [0, 0.5]; reference from a 30-digit quadrature
        let grid: Vec<f64> = (0..=250).map(|i| 0.5 + 0.01 * i as f64).collect();
        let s = SampledFunction::from_fn(grid, -0.5, |q| c(q.powf(-0.5) * (3.0 - q).powi(3), 0.0)).unwrap();
        let zbar = c(30.0, -0.5);
        let exact = c(-0.06204459610236051, -0.605610902541671);
        let v = forward_quadrature(&s, 0.6, zbar).unwrap();
        assert!((v.value - exact).norm() < 1e-10 * exact.norm(), "{} vs {exact}", v.value);
    }

    #[test]
    fn wavelet_coefficient_scaling() {
        let f = RadialFunction::from_atoms(vec![exp_atom()]);
        let z = HalfPlanePoint::new(0.0, 1.0).unwrap();
        let v = wavelet_coefficient(&f, z, 0.6).unwrap();
        assert!((v.re - 0.294750142945528).abs() < 1e-14);
        let z2 = HalfPlanePoint::new(0.7, 2.0).unwrap();
        let direct = forward_atom(&exp_atom(), 0.6).unwrap().eval(z2.zbar()).unwrap()
            * 2f64.powf(0.1);
        assert!((wavelet_coefficient(&f, z2, 0.6).unwrap() - direct).norm() < 1e-15);
    }

    #[test]
    fn qddq_map_on_exponential() {
        // q d/dq e^{−q} = −q e^{−q}
        let gamma = 0.6;
        let f = forward_atoms(&[exp_atom()], gamma).unwrap();
        let lhs = forward_atoms(&[Atom::new(c(-1.0, 0.0), 2.0, I).unwrap()], gamma).unwrap();
        let rhs = apply_operator_map_qddq(&f).unwrap();
        for z in [c(0.0, -1.0), c(2.0, -0.3), c(-5.0, -4.0)] {
            let (l, r) = (lhs.eval(z).unwrap(), rhs.eval(z).unwrap());
            assert!((l - r).norm() < 1e-14 * l.norm(), "{l} {r}");
        }
    }

    #[test]
    fn q_map_raises_alpha() {
        let atom = Atom::new(c(0.4, 0.3), 0.2, c(1.0, 1.0)).unwrap();
        let f = forward_atoms(&[atom], 0.3).unwrap();
        let lhs = forward_atoms(&[atom.times_q()], 0.3).unwrap();
        let rhs = apply_operator_map_q(&f).unwrap();
        let z = c(0.5, -0.7);
        assert!((lhs.eval(z).unwrap() - rhs.eval(z).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn operator_maps_on_zero() {
        let z = AnalyticCoefficient::zero(0.6);
        assert!(apply_operator_map_qddq(&z).unwrap().poles.is_empty());
        assert!(apply_operator_map_q(&z).unwrap().poles.is_empty());
    }

    #[test]
    fn finite_difference_maps_agree() {
        let f = forward_atoms(&[exp_atom()], 0.8).unwrap();
        let z = c(0.3, -0.9);
        let sym = apply_operator_map_qddq(&f).unwrap().eval(z).unwrap();
        let fd = operator_map_qddq_fd(&f, z).unwrap();
        assert!((sym - fd).norm() < 1e-8 * sym.norm());
    }

    #[test]
    fn decay_of_single_pole() {
        let f = forward_atoms(&[exp_atom()], 0.6).unwrap();
        let rep = decay_check(&f).unwrap();
        assert!(rep.passed);
        for r in &rep.rays {
            assert!((r.exponent + 1.6).abs() < 1e-3, "{r:?}");
        }
        assert!(decay_check(&AnalyticCoefficient::zero(0.6)).unwrap().passed);
    }

    #[test]
    fn grid_nodes_and_interpolation() {
        let g = HalfPlaneGrid::new(0.1, 10.0, 4, BMap::Tangent { offset: 1.0 }, 4, 8).unwrap();
        assert_eq!(g.len(), 32 * 32);
        let wa: f64 = (0..g.rows()).map(|i| g.a_weight(i)).sum();
        assert!((wa - 9.9).abs() < 1e-12);
        let f = |z: Complex64| z * 0.5 + 1.0;
        let vals: Vec<Complex64> = g.points().into_iter().map(f).collect();
        let z = c(0.2, -1.3);
        assert!((g.interpolate(&vals, z) - f(z)).norm() < 1e-2);
        assert_eq!(g.interpolate(&vals, c(0.0, -100.0)), c(0.0, 0.0));
        assert!(HalfPlaneGrid::new(0.0, 1.0, 1, BMap::Linear { half_width: 1.0 }, 1, 4).is_err());
    }
}
