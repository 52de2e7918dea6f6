//! Gauss–Legendre rules, adaptive bisection, and compensated summation.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// A quadrature value together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: Complex64, error: f64) -> Self {
        Self { value, error }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0), 0.0)
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Estimate) -> Estimate {
        Estimate::new(self.value + rhs.value, self.error + rhs.error)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared rule of order `n` (cached for the orders used internally).
    pub fn cached(n: usize) -> &'static GaussLegendre {
        static RULES: [OnceLock<GaussLegendre>; 33] = [const { OnceLock::new() }; 33];
        assert!((1..=32).contains(&n), "cached rules cover orders 1..=32");
        RULES[n].get_or_init(|| GaussLegendre::new(n))
    }

    /// Applies the rule to `f` on `[a, b]`.
    pub fn integrate<F>(&self, a: f64, b: f64, f: F) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(f(mid + half * x) * *w);
        }
        acc.value() * half
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tolerances for [`adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_depth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-8,
            max_depth: 24,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }
}

const ADAPTIVE_ORDER: usize = 10;

/// Adaptive Gauss–Legendre on `[a, b]`: a panel is accepted when the
/// whole-panel rule and the sum over its two halves agree.
///
/// Returns an accuracy error carrying the best estimate when the depth limit
/// is reached before the tolerance is met.
pub fn adaptive<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    let rule = GaussLegendre::cached(ADAPTIVE_ORDER);
    let whole = rule.integrate(a, b, &f);
    let mut failed = false;
    let est = adaptive_step(&f, rule, a, b, whole, tol, 0, &mut failed);
    if failed {
        let scale = est.value.norm();
        if est.error > tol.abs.max(tol.rel * scale) {
            return Err(Error::Accuracy {
                message: format!("adaptive quadrature on [{a}, {b}] hit depth {}", tol.max_depth),
                estimate: scale,
                error: est.error,
            });
        }
    }
    Ok(est)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: Tolerance,
    depth: u32,
    failed: &mut bool,
) -> Estimate
where
    F: Fn(f64) -> Complex64,
{
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    let refined = left + right;
    let err = (refined - whole).norm();
    let allowed = tol.abs.max(tol.rel * refined.norm());
    if err <= allowed || mid <= a || mid >= b {
        return Estimate::new(refined, err);
    }
    if depth >= tol.max_depth {
        *failed = true;
        return Estimate::new(refined, err);
    }
    let half_tol = Tolerance {
        abs: 0.5 * tol.abs,
        ..tol
    };
    adaptive_step(f, rule, a, mid, left, half_tol, depth + 1, failed)
        + adaptive_step(f, rule, mid, b, right, half_tol, depth + 1, failed)
}

/// `∫₀^upper q^{p−1} φ(q) dq` for `p > 0` and smooth `φ`, through the
/// substitution `q = upper·t^{1/p}` that removes the endpoint singularity.
pub fn power_singular<F>(p: f64, upper: f64, phi: F, tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    if !(p > 0.0) {
        return Err(Error::domain(format!(
            "integrand q^{} is not integrable at 0",
            p - 1.0
        )));
    }
    let scale = upper.powf(p) / p;
    let inv_p = 1.0 / p;
    let est = adaptive(|t| phi(upper * t.powf(inv_p)), 0.0, 1.0, tol)?;
    Ok(Estimate::new(est.value * scale, est.error * scale))
}

/// `∫_lower^∞ φ(q) dq` for a decaying `φ`, by doubling panels until a panel
/// contributes less than the absolute tolerance.
pub fn semi_infinite<F>(lower: f64, phi: F, tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    let mut total = Estimate::zero();
    let mut a = lower;
    let mut width = 1.0_f64.max(lower);
    for _ in 0..60 {
        let b = a + width;
        let part = adaptive(&phi, a, b, tol)?;
        total = total + part;
        if part.value.norm() <= tol.abs.max(1e-17 * total.value.norm()) && b > lower + 4.0 {
            return Ok(total);
        }
        a = b;
        width *= 2.0;
    }
    Err(Error::Accuracy {
        message: "semi-infinite integrand does not decay".into(),
        estimate: total.value.norm(),
        error: f64::INFINITY,
    })
}

/// Neumaier-compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

/// Composite Gauss–Legendre panels covering `[lo, hi]`.
pub fn composite_nodes(lo: f64, hi: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::cached(order);
    let width = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = lo + p as f64 * width;
        for (x, w) in rule.mapped(a, a + width) {
            nodes.push(x);
            weights.push(w);
        }
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the limit for 8 nodes
        let v = rule.integrate(0.0, 2.0, |x| c(x.powi(15)));
        assert!((v.re - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let est = adaptive(|x| Complex64::new(0.0, 25.0 * x).exp(), 0.0, 3.0, Tolerance::default())
            .unwrap();
        let exact = (Complex64::new(0.0, 75.0).exp() - 1.0) / Complex64::new(0.0, 25.0);
        assert!((est.value - exact).norm() < 1e-10);
    }

    #[test]
    fn power_singular_gamma_integral() {
        // ∫₀^1 q^{-0.7} dq = 1/0.3
        let est = power_singular(0.3, 1.0, |_| c(1.0), Tolerance::default()).unwrap();
        assert!((est.value.re - 1.0 / 0.3).abs() < 1e-12);
        assert!(power_singular(0.0, 1.0, |_| c(1.0), Tolerance::default()).is_err());
    }

    #[test]
    fn semi_infinite_exponential() {
        let est = semi_infinite(0.0, |q| c((-q).exp()), Tolerance::new(1e-14, 1e-12)).unwrap();
        assert!((est.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::new();
        s.add(c(1e16));
        s.add(c(1.0));
        s.add(c(-1e16));
        assert_eq!(s.value().re, 1.0);
    }
}
