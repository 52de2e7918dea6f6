//! Weighted L² norms in `q`, Bergman norms over the half-plane, and the
//! isometry between them.
//!
//! With `F = ℒ^γ f`,
//!
//! ```text
//! ∫₀^∞ q²|f|² dq = 2^{2γ}/(2πΓ(2γ)) · ∫ da db a^{2γ−1} |∂_ζ̄F(b−ia)|²,
//! ```
//!
//! and for `γ > 1` also `∫ q²|f|² = 2^{2γ−2}/(2πΓ(2γ−2)) · ∫ da db a^{2γ−3}|F|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{ppow, AnalyticCoefficient, RadialFunction};
use crate::error::{Error, Result};
use crate::quad::{self, Estimate, Tolerance};
use crate::specfun::{cgamma, gamma as rgamma};
use crate::transform::{forward_atoms, BMap, HalfPlaneGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `∫ dμ_L (Im z)^order |F|²` together with a quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BergmanNorm {
    pub order: f64,
    pub value: f64,
    pub error: f64,
}

/// `∫₀^∞ q²|f(q)|² dq`: closed form for atom sums, quadrature otherwise.
pub fn l2_weighted_norm(f: &RadialFunction) -> Result<Estimate> {
    match &f.samples {
        None => {
            let mut acc = quad::CompensatedSum::new();
            for aj in &f.atoms {
                for ak in &f.atoms {
                    let e = aj.alpha + ak.alpha + 1.0;
                    let base = -I * (ak.pole - aj.pole.conj());
                    acc.add(
                        aj.coeff.conj() * ak.coeff * cgamma(Complex64::new(e, 0.0))? * ppow(base, -e)?,
                    );
                }
            }
            let v = acc.value();
            Ok(Estimate::new(Complex64::new(v.re, 0.0), 1e-15 * v.norm()))
        }
        Some(s) => {
            let min_alpha = f.atoms.iter().map(|a| a.alpha - 1.0).fold(s.beta(), f64::min);
            let p = 3.0 + 2.0 * min_alpha;
            if !(p > 0.0) {
                return Err(Error::domain(format!(
                    "q^2|f|^2 ~ q^{} is not integrable at 0",
                    p - 1.0
                )));
            }
            let dens = |q: f64| -> Complex64 {
                let v = f.eval(q).map(|z| z.norm_sqr()).unwrap_or(f64::NAN);
                Complex64::new(q * q * v, 0.0)
            };
            let tol = Tolerance::new(1e-14, 1e-12);
            let grid = s.grid();
            let q0 = grid[0];
            let mut total =
                quad::power_singular(p, q0, |q| dens(q) * q.powf(1.0 - p), tol)?;
            for w in grid.windows(2) {
                total = total + quad::adaptive(dens, w[0], w[1], tol)?;
            }
            let last = grid[grid.len() - 1];
            total = total
                + quad::semi_infinite(last, dens, tol).map_err(|e| match e {
                    Error::Accuracy { .. } => Error::domain("q^2|f|^2 does not decay: norm diverges"),
                    other => other,
                })?;
            if !total.value.re.is_finite() {
                return Err(Error::domain("weighted norm diverges"));
            }
            Ok(total)
        }
    }
}

/// Weighted area integral of a nonnegative density over `grid`, with tail
/// corrections below `a_min` and above `a_max`.
fn area_integral<D>(grid: &HalfPlaneGrid, order: f64, density: D) -> Result<f64>
where
    D: Fn(Complex64) -> Result<f64> + Sync,
{
    let a_nodes = grid.a_nodes();
    let mut rows = Vec::with_capacity(grid.rows());
    for i in 0..grid.rows() {
        let mut acc = 0.0;
        for j in 0..grid.cols() {
            let (a, b, w) = grid.node(i, j);
            acc += w * density(Complex64::new(b, -a))?;
        }
        rows.push(acc * a_nodes[i].powf(order - 2.0));
    }
    let mut total = 0.0;
    for (i, r) in rows.iter().enumerate() {
        total += grid.a_weight(i) * r;
    }
    // below a_min: row·a^{order−2} behaves like a^{order−2}
    let a0 = a_nodes[0];
    let a_min = grid.a_min();
    total += rows[0] * (a_min / a0).powf(order - 2.0) * a_min / (order - 1.0);
    // above a_max: power law through the last two rows
    let n = rows.len();
    if rows[n - 1] > 0.0 && rows[n - 2] > 0.0 {
        let r = -(rows[n - 1] / rows[n - 2]).ln() / (a_nodes[n - 1] / a_nodes[n - 2]).ln();
        if !(r > 1.0) {
            return Err(Error::Accuracy {
                message: format!("integrand decays like a^-{r:.2} at the top of the mesh"),
                estimate: total,
                error: f64::INFINITY,
            });
        }
        let a_max = grid.a_max();
        let g_max = rows[n - 1] * (a_max / a_nodes[n - 1]).powf(-r);
        total += g_max * a_max / (r - 1.0);
    }
    Ok(total)
}

fn companion(grid: &HalfPlaneGrid) -> Option<HalfPlaneGrid> {
    let order = grid.order();
    if order <= 4 {
        return None;
    }
    let a_panels = grid.rows() / order;
    let b_panels = grid.cols() / order;
    HalfPlaneGrid::new(grid.a_min(), grid.a_max(), a_panels, grid.map(), b_panels, order - 4).ok()
}

/// `∫ da db a^{order−2} |F(b−ia)|²`.
///
/// The error estimate is the change when every panel rule drops four nodes.
pub fn bergman_norm(f: &AnalyticCoefficient, order: f64, grid: &HalfPlaneGrid) -> Result<BergmanNorm> {
    if !(order > 1.0) {
        return Err(Error::domain(format!(
            "Bergman weight order {order} <= 1: the area integral diverges at a = 0"
        )));
    }
    let dens = |z: Complex64| f.eval(z).map(|v| v.norm_sqr());
    let value = area_integral(grid, order, dens)?;
    let error = match companion(grid) {
        Some(g) => (value - area_integral(&g, order, dens)?).abs(),
        None => f64::NAN,
    };
    Ok(BergmanNorm { order, value, error })
}

/// A tangent-mapped mesh adapted to the poles of `F`.
pub fn default_grid(f: &AnalyticCoefficient) -> Result<HalfPlaneGrid> {
    let offset = f.poles.iter().map(|p| p.pole.im).fold(f64::INFINITY, f64::min);
    let offset = if offset.is_finite() { offset } else { 1.0 };
    HalfPlaneGrid::bergman_default(offset)
}

/// `2^{2γ}/(2πΓ(2γ))`, relating `∫q²|f|²` to the Bergman norm of `∂F`.
pub fn isometry_constant(gamma: f64) -> Result<f64> {
    Ok(2f64.powf(2.0 * gamma) / (2.0 * PI * rgamma(2.0 * gamma)?))
}

/// `<F|G> = K·(f, g)` holds with `K = 2πΓ(2γ)/2^{2γ}`.
pub fn inner_product_constant(gamma: f64) -> Result<f64> {
    Ok(1.0 / isometry_constant(gamma)?)
}

/// The variant `2πΓ(2γ−2)/2^{2γ−2}` of [`inner_product_constant`]. It has a
/// pole at `γ = 1` and is negative for `1/2 < γ < 1`; the quadrature tests
/// show it does not relate the two inner products.
pub fn inner_product_constant_shifted(gamma: f64) -> Result<f64> {
    Ok(2.0 * PI * rgamma(2.0 * gamma - 2.0)? / 2f64.powf(2.0 * gamma - 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsometryReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_error: f64,
    pub relative_discrepancy: f64,
}

/// Compares `∫q²|f|²` with the scaled Bergman norm of `∂_ζ̄ ℒ^γ f`.
pub fn isometry_check(f: &RadialFunction, gamma: f64, grid: Option<&HalfPlaneGrid>) -> Result<IsometryReport> {
    if f.samples.is_some() {
        return Err(Error::Unsupported(
            "isometry_check needs an atom representation for the derivative".into(),
        ));
    }
    let lhs = l2_weighted_norm(f)?.value.re;
    let big_f = forward_atoms(&f.atoms, gamma)?;
    let df = big_f.derivative()?;
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = default_grid(&big_f)?;
            &owned
        }
    };
    let k = isometry_constant(gamma)?;
    let b = bergman_norm(&df, 2.0 * gamma + 1.0, grid)?;
    let rhs = k * b.value;
    let relative_discrepancy = if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs())
    };
    Ok(IsometryReport { lhs, rhs, rhs_error: k * b.error, relative_discrepancy })
}

/// `∫ da db a^{2γ−1} conj(∂F)·∂G`.
pub fn a_gamma_inner_product(
    f: &AnalyticCoefficient,
    g: &AnalyticCoefficient,
    grid: &HalfPlaneGrid,
) -> Result<Estimate> {
    if (f.gamma - g.gamma).abs() > 0.0 {
        return Err(Error::domain("inner product of coefficients with different gamma"));
    }
    let df = f.derivative()?;
    let dg = g.derivative()?;
    let order = 2.0 * f.gamma + 1.0;
    let run = |grid: &HalfPlaneGrid| -> Result<Complex64> {
        let a_nodes = grid.a_nodes();
        let mut total = quad::CompensatedSum::new();
        for i in 0..grid.rows() {
            let mut row = quad::CompensatedSum::new();
            for j in 0..grid.cols() {
                let (a, b, w) = grid.node(i, j);
                let z = Complex64::new(b, -a);
                row.add(df.eval(z)?.conj() * dg.eval(z)? * w);
            }
            total.add(row.value() * (grid.a_weight(i) * a_nodes[i].powf(order - 2.0)));
        }
        Ok(total.value())
    };
    let value = run(grid)?;
    let error = match companion(grid) {
        Some(c) => (value - run(&c)?).norm(),
        None => f64::NAN,
    };
    Ok(Estimate::new(value, error))
}

/// A tangent mesh centred on the real axis with the given pole height.
pub fn tangent_grid(offset: f64, a_panels: usize, b_panels: usize, order: usize) -> Result<HalfPlaneGrid> {
    HalfPlaneGrid::new(1e-8, 1e6, a_panels, BMap::Tangent { offset }, b_panels, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Atom, SampledFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp_atom() -> Atom {
        Atom::new(c(1.0, 0.0), 1.0, I).unwrap()
    }

    #[test]
    fn weighted_norm_closed_forms() {
        let f = RadialFunction::from_atoms(vec![exp_atom()]);
        assert!((l2_weighted_norm(&f).unwrap().value.re - 0.25).abs() < 1e-15);
        let g = RadialFunction::from_atoms(vec![Atom::new(c(1.0, 0.0), 0.5, I).unwrap()]);
        assert!((l2_weighted_norm(&g).unwrap().value.re - 0.25).abs() < 1e-15);
        assert_eq!(l2_weighted_norm(&RadialFunction::zero()).unwrap().value.re, 0.0);
    }

    #[test]
    fn weighted_norm_by_quadrature() {
        let grid: Vec<f64> = (1..=2000).map(|i| 0.01 * i as f64).collect();
        let s = SampledFunction::from_fn(grid, 0.0, |q| c((-q).exp(), 0.0)).unwrap();
        let v = l2_weighted_norm(&RadialFunction::from_samples(s)).unwrap();
        assert!((v.value.re - 0.25).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn bergman_rejects_low_order() {
        let f = forward_atoms(&[exp_atom()], 0.6).unwrap();
        let g = default_grid(&f).unwrap();
        assert!(bergman_norm(&f, 1.0, &g).is_err());
    }

    #[test]
    fn admissible_isometry_at_two() {
        // 2/π · ∫ da db a |F|² = 1/4 for f = e^{−q}, γ = 2
        let f = forward_atoms(&[exp_atom()], 2.0).unwrap();
        let g = default_grid(&f).unwrap();
        let b = bergman_norm(&f, 3.0, &g).unwrap();
        assert!((b.value - PI / 8.0).abs() < 1e-9, "{b:?}");
    }

    #[test]
    fn bergman_is_quadratic() {
        let f = forward_atoms(&[exp_atom()], 0.6).unwrap().derivative().unwrap();
        let g = tangent_grid(1.0, 12, 8, 8).unwrap();
        let one = bergman_norm(&f, 2.2, &g).unwrap().value;
        let two = bergman_norm(&f.scaled(c(2.0, 0.0)).unwrap(), 2.2, &g).unwrap().value;
        assert!((two - 4.0 * one).abs() <= 1e-14 * two);
        let zero = bergman_norm(&AnalyticCoefficient::zero(0.6), 2.2, &g).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn isometry_for_exponential() {
        let f = RadialFunction::from_atoms(vec![exp_atom()]);
        let rep = isometry_check(&f, 0.6, None).unwrap();
        assert!(rep.relative_discrepancy < 1e-8, "{rep:?}");
    }

    #[test]
    fn constants() {
        assert!((inner_product_constant(0.6).unwrap() * isometry_constant(0.6).unwrap() - 1.0).abs() < 1e-15);
        assert!(inner_product_constant_shifted(0.8).unwrap() < 0.0);
        assert!(inner_product_constant_shifted(1.0).is_err());
    }
}
