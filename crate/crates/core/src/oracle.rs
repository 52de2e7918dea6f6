//! Shooting solver for the radial Dirac system, independent of the transform.
//!
//! Integrates in `t = ln q` with `g̃ = s·g`:
//!
//! ```text
//! df/dt = −(1+χ) f + (q/2 + λ/s) g̃
//! dg̃/dt = −(1−χ) g̃ + (q/2 − λs) f
//! ```
//!
//! outward from a two-term Frobenius start and inward from the decaying
//! asymptote `g̃ = −f`, matching the two at an interior point.

use ode_solvers::{Dopri5, OutputType, System, Vector2};
use serde::Serialize;

use crate::dirac::DiracParams;
use crate::domain::{validate_params, ParamsRef};
use crate::error::{Error, Result};
use crate::numdiff;
use crate::roots::brent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingConfig {
    pub q_min: f64,
    pub q_max: f64,
    pub q_match: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Relative tolerance on `ε` for the root search.
    pub eps_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self { q_min: 1e-6, q_max: 60.0, q_match: 6.0, rtol: 1e-12, atol: 1e-14, eps_tol: 1e-14 }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_min > 0.0 && self.q_min < self.q_match && self.q_match < self.q_max) {
            return Err(Error::validation("need 0 < q_min < q_match < q_max"));
        }
        if (-0.5 * self.q_max).exp() >= 1e-12 {
            return Err(Error::validation(format!(
                "q_max = {} too small: e^(-q_max/2) must be below 1e-12",
                self.q_max
            )));
        }
        Ok(())
    }
}

struct Radial {
    chi: f64,
    lambda: f64,
    s: f64,
}

impl System<f64, Vector2<f64>> for Radial {
    fn system(&self, t: f64, y: &Vector2<f64>, dy: &mut Vector2<f64>) {
        let q = t.exp();
        dy[0] = -(1.0 + self.chi) * y[0] + (0.5 * q + self.lambda / self.s) * y[1];
        dy[1] = -(1.0 - self.chi) * y[1] + (0.5 * q - self.lambda * self.s) * y[0];
    }
}

fn system(p: &DiracParams, eps: f64) -> Result<Radial> {
    validate_params(ParamsRef::Dirac(p))?;
    if !(eps.abs() < p.m) {
        return Err(Error::domain(format!("|epsilon| = {} must be below m", eps.abs())));
    }
    Ok(Radial { chi: p.chi, lambda: p.lambda, s: p.s(eps) })
}

/// `(f, g̃)` at `q_min` from `f, g ∝ q^{γ−1}(1 + c₁q)`.
fn frobenius_start(p: &DiracParams, s: f64, q: f64) -> Vector2<f64> {
    let (g, chi, l) = (p.gamma(), p.chi, p.lambda);
    let f0 = 1.0;
    let g0 = (g + chi) / l * f0;
    // (γ+χ+1) f₁ − λ g₁ = (s/2) g₀,  λ f₁ + (γ−χ+1) g₁ = f₀/(2s)
    let r1 = 0.5 * s * g0;
    let r2 = f0 / (2.0 * s);
    let det = 2.0 * g + 1.0;
    let f1 = (r1 * (g - chi + 1.0) + l * r2) / det;
    let g1 = ((g + chi + 1.0) * r2 - l * r1) / det;
    let pw = q.powf(g - 1.0);
    Vector2::new(pw * (f0 + f1 * q), s * pw * (g0 + g1 * q))
}

/// Outward and inward solutions at the matching point.
fn endpoints(p: &DiracParams, eps: f64, cfg: &ShootingConfig) -> Result<(Vector2<f64>, Vector2<f64>)> {
    cfg.validate()?;
    let sys = system(p, eps)?;
    let s = sys.s;
    let y0 = frobenius_start(p, s, cfg.q_min);
    let tm = cfg.q_match.ln();
    let out = integrate(system(p, eps)?, cfg.q_min.ln(), tm, y0, cfg)?;
    let inn = integrate(system(p, eps)?, cfg.q_max.ln(), tm, Vector2::new(1.0, -1.0), cfg)?;
    Ok((out, inn))
}

fn integrate(sys: Radial, t0: f64, t1: f64, y: Vector2<f64>, cfg: &ShootingConfig) -> Result<Vector2<f64>> {
    let mut solver = Dopri5::new(sys, t0, t1, t1 - t0, y, cfg.rtol, cfg.atol);
    solver.set_output(OutputType::Sparse);
    solver
        .integrate()
        .map_err(|e| Error::Integration(format!("{e:?} on [{}, {}]", t0.exp(), t1.exp())))?;
    solver
        .y_out()
        .last()
        .copied()
        .ok_or_else(|| Error::Integration("stepper produced no output".into()))
}

/// Normalised Wronskian of the outward and inward solutions at `q_match`;
/// zero exactly at an eigenvalue.
pub fn matching_function(p: &DiracParams, eps: f64, cfg: &ShootingConfig) -> Result<f64> {
    let (o, i) = endpoints(p, eps, cfg)?;
    Ok((o[0] * i[1] - o[1] * i[0]) / (o.norm() * i.norm()))
}

/// Eigenvalue inside `(lo, hi)` by Brent's method on [`matching_function`].
pub fn shoot_eigenvalue(p: &DiracParams, bracket: (f64, f64), cfg: &ShootingConfig) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::Bracket(format!("degenerate bracket [{lo}, {hi}]")));
    }
    brent(|e| matching_function(p, e, cfg), lo, hi, cfg.eps_tol * hi.abs(), 200)
}

/// `(f, g)` on a grid, integrated at energy `ε`.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub epsilon: f64,
    pub q: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

/// Integrates outward from `q_min` and reports `(f, g)` at each grid point.
/// The grid must lie inside `[q_min, ∞)` and increase.
pub fn integrate_radial(p: &DiracParams, eps: f64, grid: &[f64], cfg: &ShootingConfig) -> Result<Trajectory> {
    let sys = system(p, eps)?;
    let s = sys.s;
    check_grid(grid, cfg.q_min)?;
    let mut y = frobenius_start(p, s, cfg.q_min);
    let mut t = cfg.q_min.ln();
    let (mut f, mut g) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    for &q in grid {
        let tq = q.ln();
        if tq > t {
            y = integrate(system(p, eps)?, t, tq, y, cfg)?;
            t = tq;
        }
        f.push(y[0]);
        g.push(y[1] / s);
    }
    Ok(Trajectory { epsilon: eps, q: grid.to_vec(), f, g })
}

fn check_grid(grid: &[f64], q_min: f64) -> Result<()> {
    if grid.is_empty() || grid[0] < q_min || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("grid must be increasing and start at or above q_min"));
    }
    Ok(())
}

/// Eigenfunction at `ε`: outward solution up to `q_match`, inward beyond,
/// scaled to agree at `q_match`, normalised so that `∫q²(f²+g²)dq = 1` on
/// the grid (Simpson in `ln q`, uniform spacing required) and `f > 0` near 0.
pub fn eigenfunction(p: &DiracParams, eps: f64, grid: &[f64], cfg: &ShootingConfig) -> Result<Trajectory> {
    cfg.validate()?;
    check_grid(grid, cfg.q_min)?;
    if grid[grid.len() - 1] > cfg.q_max {
        return Err(Error::domain("eigenfunction grid extends beyond q_max"));
    }
    let s = system(p, eps)?.s;
    let tm = cfg.q_match.ln();
    let split = grid.partition_point(|&q| q <= cfg.q_match);
    let mut f = vec![0.0; grid.len()];
    let mut g = vec![0.0; grid.len()];

    let mut y = frobenius_start(p, s, cfg.q_min);
    let mut t = cfg.q_min.ln();
    for k in 0..split {
        let tq = grid[k].ln();
        if tq > t {
            y = integrate(system(p, eps)?, t, tq, y, cfg)?;
            t = tq;
        }
        f[k] = y[0];
        g[k] = y[1];
    }
    let y_match = integrate(system(p, eps)?, t, tm, y, cfg)?;

    let mut z = Vector2::new(1.0, -1.0);
    let mut t = cfg.q_max.ln();
    for k in (split..grid.len()).rev() {
        let tq = grid[k].ln();
        if tq < t {
            z = integrate(system(p, eps)?, t, tq, z, cfg)?;
            t = tq;
        }
        f[k] = z[0];
        g[k] = z[1];
    }
    let z_match = integrate(system(p, eps)?, t, tm, z, cfg)?;
    let ratio = if y_match[0].abs() >= y_match[1].abs() {
        y_match[0] / z_match[0]
    } else {
        y_match[1] / z_match[1]
    };
    for k in split..grid.len() {
        f[k] *= ratio;
        g[k] *= ratio;
    }
    for v in g.iter_mut() {
        *v /= s;
    }
    let norm2 = simpson_log(grid, |k| grid[k].powi(3) * (f[k] * f[k] + g[k] * g[k]))?;
    let c = f[0].signum() / norm2.sqrt();
    f.iter_mut().for_each(|v| *v *= c);
    g.iter_mut().for_each(|v| *v *= c);
    Ok(Trajectory { epsilon: eps, q: grid.to_vec(), f, g })
}

/// Simpson's rule in `t = ln q` on a log-uniform grid with an odd number of
/// points.
pub fn simpson_log<F: Fn(usize) -> f64>(grid: &[f64], integrand: F) -> Result<f64> {
    let n = grid.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::domain("Simpson's rule needs an odd number (>= 3) of points"));
    }
    let h = (grid[n - 1].ln() - grid[0].ln()) / (n - 1) as f64;
    let mut acc = integrand(0) + integrand(n - 1);
    for k in 1..n - 1 {
        acc += integrand(k) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    Ok(acc * h / 3.0)
}

/// `n + 1` points uniform in `ln q` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..=n).map(|k| (a + (b - a) * k as f64 / n as f64).exp()).collect();
    g[0] = lo;
    g[n] = hi;
    g
}

/// Largest pointwise residual of the radial system, each equation normalised
/// by the sum of its term magnitudes. Derivatives come from 7-point
/// finite differences in `ln q`. `None` for the zero function.
pub fn residual(p: &DiracParams, eps: f64, q: &[f64], f: &[f64], g: &[f64]) -> Result<Option<f64>> {
    validate_params(ParamsRef::Dirac(p))?;
    if q.len() != f.len() || q.len() != g.len() || q.len() < 7 {
        return Err(Error::domain("residual needs matching grids of at least 7 points"));
    }
    let s = p.s(eps);
    let t: Vec<f64> = q.iter().map(|x| x.ln()).collect();
    let df = numdiff::derivative_on_grid(&t, f, 7);
    let dg = numdiff::derivative_on_grid(&t, g, 7);
    let mut worst: Option<f64> = None;
    for k in 0..q.len() {
        let a = [df[k], (1.0 + p.chi) * f[k], -(0.5 * q[k] * s + p.lambda) * g[k]];
        let b = [dg[k], (1.0 - p.chi) * g[k], -(0.5 * q[k] / s - p.lambda) * f[k]];
        for terms in [a, b] {
            let scale: f64 = terms.iter().map(|x| x.abs()).sum();
            if scale > 0.0 {
                let r = terms.iter().sum::<f64>().abs() / scale;
                worst = Some(worst.map_or(r, |w: f64| w.max(r)));
            }
        }
    }
    Ok(worst)
}

/// Sign changes of `v`, ignoring exact zeros.
pub fn count_nodes(v: &[f64]) -> usize {
    let mut last = 0.0;
    let mut count = 0;
    for &x in v {
        if x != 0.0 {
            if last != 0.0 && x.signum() != last {
                count += 1;
            }
            last = x.signum();
        }
    }
    count
}
