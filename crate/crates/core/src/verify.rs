//! The check suite behind `biwave verify`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dirac::{build_matrices, quantize, spectrum, transformed_residual, DiracParams, RadialEigenstate};
use crate::domain::{Atom, RadialFunction, SampledFunction};
use crate::error::Result;
use crate::norms::isometry_check;
use crate::oracle::{eigenfunction, log_grid, shoot_eigenvalue, simpson_log, ShootingConfig};
use crate::reconstruct::{invert_pole_term, invert_pole_term_numeric, ReconstructionWavelet};
use crate::transform::{
    apply_operator_map_q, apply_operator_map_qddq, decay_check, forward_atom, forward_atoms,
    forward_quadrature,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One line of the report. `value` is compared with `expected` through
/// `|value − expected| ≤ tolerance·max(1, |expected|)`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn new(check: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        let ok = (value - expected).abs() <= tolerance * expected.abs().max(1.0);
        Self {
            check: check.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            value,
            expected,
            tolerance,
        }
    }

    fn error(check: &str, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            status: Status::Fail,
            value: f64::NAN,
            expected: 0.0,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyConfig {
    /// Replaces every per-check tolerance.
    pub tolerance_override: Option<f64>,
    /// Skips the 2-D quadrature and reduces the shooting sweep.
    pub quick: bool,
}

fn run(out: &mut Vec<CheckResult>, name: &str, tol: f64, f: impl FnOnce(f64) -> Result<CheckResult>) {
    out.push(f(tol).unwrap_or_else(|_| CheckResult::error(name, tol)));
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    if b.norm() == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / b.norm()
    }
}

/// Runs every check and returns one result per check.
pub fn run_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let t = |default: f64| cfg.tolerance_override.unwrap_or(default);
    let mut out = Vec::new();

    run(&mut out, "spectrum.hydrogen_ground_state", t(1e-12), |tol| {
        let p = DiracParams::hydrogen_like(1.0, -1.0)?;
        let l = crate::FINE_STRUCTURE;
        Ok(CheckResult::new(
            "spectrum.hydrogen_ground_state",
            spectrum(&p, 0)?,
            (1.0 - l * l).sqrt(),
            tol,
        ))
    });

    run(&mut out, "spectrum.quantize_agreement", t(1e-12), |tol| {
        let mut worst = 0.0f64;
        for l in [0.1, 0.3, 0.6, 0.9] {
            for chi in [-2.0, -1.0, 1.0, 2.0] {
                let p = DiracParams::new(1.0, l, chi)?;
                for n in 0..=10 {
                    let c = spectrum(&p, n)?;
                    worst = worst.max((quantize(&p, n)? - c).abs() / c);
                }
            }
        }
        Ok(CheckResult::new("spectrum.quantize_agreement", worst, 0.0, tol))
    });

    run(&mut out, "dirac.matrix_identities", t(1e-12), |tol| {
        let mut worst = 0.0f64;
        for (l, chi) in [(0.3, -1.0), (0.6, 2.0), (0.9, -2.0), (1.5, 3.0)] {
            let p = DiracParams::new(1.0, l, chi)?;
            for n in 1..=5 {
                let m = build_matrices(&p, spectrum(&p, n)?)?;
                worst = m.identity_residuals().iter().fold(worst, |w, r| w.max(*r));
            }
        }
        Ok(CheckResult::new("dirac.matrix_identities", worst, 0.0, tol))
    });

    run(&mut out, "dirac.transformed_residual", t(1e-8), |tol| {
        let mut worst = 0.0f64;
        let p = DiracParams::new(1.0, 0.6, -1.0)?;
        for n in 0..=4 {
            for z in [Complex64::new(0.3, -0.2), Complex64::new(-2.0, -1.5), Complex64::new(5.0, -0.05)] {
                worst = worst.max(transformed_residual(&p, n, z)?);
            }
        }
        Ok(CheckResult::new("dirac.transformed_residual", worst, 0.0, tol))
    });

    run(&mut out, "dirac.decay_exponent", t(1e-2), |tol| {
        let p = DiracParams::new(1.0, 0.6, -1.0)?;
        let st = RadialEigenstate::new(&p, 2)?;
        let rep = decay_check(&st.coefficients()?[0])?;
        let worst = rep.rays.iter().map(|r| r.exponent).fold(f64::NAN, |w, e| {
            if w.is_nan() || (e + 2.0 * p.gamma()).abs() > (w + 2.0 * p.gamma()).abs() { e } else { w }
        });
        Ok(CheckResult::new("dirac.decay_exponent", worst / (-2.0 * p.gamma()), 1.0, tol))
    });

    run(&mut out, "transform.pairing", t(1e-10), |tol| {
        let v = ReconstructionWavelet::new(0.6)?.pairing()?.value.re;
        Ok(CheckResult::new("transform.pairing", v * 2.0 * std::f64::consts::PI, 1.0, tol))
    });

    run(&mut out, "transform.operator_maps", t(1e-12), |tol| {
        let atom = Atom::new(Complex64::new(0.8, -0.3), 0.4, Complex64::new(0.5, 1.0))?;
        let g = 0.6;
        let f = forward_atoms(&[atom], g)?;
        // q d/dq atom = (α−1) atom + iζ₀ (q·atom)
        let qddq = forward_atoms(
            &[atom.scaled(Complex64::new(atom.alpha - 1.0, 0.0)), atom.times_q().scaled(I * atom.pole)],
            g,
        )?;
        let qf = forward_atoms(&[atom.times_q()], g)?;
        let (m1, m2) = (apply_operator_map_qddq(&f)?, apply_operator_map_q(&f)?);
        let mut worst = 0.0f64;
        for z in [Complex64::new(0.0, -1.0), Complex64::new(2.5, -0.2), Complex64::new(-4.0, -3.0)] {
            worst = worst.max(rel(m1.eval(z)?, qddq.eval(z)?)).max(rel(m2.eval(z)?, qf.eval(z)?));
        }
        Ok(CheckResult::new("transform.operator_maps", worst, 0.0, tol))
    });

    run(&mut out, "transform.quadrature_vs_closed_form", t(1e-7), |tol| {
        let atom = Atom::new(Complex64::new(1.0, 0.0), 0.2, I)?;
        let grid: Vec<f64> = (1..=4000).map(|i| 0.01 * i as f64).collect();
        let s = SampledFunction::from_fn(grid, -0.8, |q| atom.eval(q))?;
        let mut worst = 0.0f64;
        for z in [Complex64::new(0.0, -1.0), Complex64::new(1.3, -0.1), Complex64::new(-3.0, -2.0)] {
            let exact = forward_atom(&atom, 0.6)?.eval(z)?;
            worst = worst.max(rel(forward_quadrature(&s, 0.6, z)?.value, exact));
        }
        Ok(CheckResult::new("transform.quadrature_vs_closed_form", worst, 0.0, tol))
    });

    run(&mut out, "reconstruct.round_trip", t(1e-7), |tol| {
        let mut worst = 0.0f64;
        for g in [0.3, 0.6, 0.8] {
            let atom = Atom::new(Complex64::new(1.0, 0.0), 1.0, I)?;
            let term = forward_atom(&atom, g)?;
            let back = invert_pole_term(&term, g)?;
            for q in [0.05, 0.5, 2.0, 9.0] {
                let e = atom.eval(q);
                worst = worst
                    .max(rel(back.eval(q), e))
                    .max(rel(invert_pole_term_numeric(&term, g, q)?.value, e));
            }
        }
        Ok(CheckResult::new("reconstruct.round_trip", worst, 0.0, tol))
    });

    if !cfg.quick {
        run(&mut out, "norms.isometry", t(1e-4), |tol| {
            let f = RadialFunction::from_atoms(vec![Atom::new(Complex64::new(1.0, 0.0), 1.0, I)?]);
            let rep = isometry_check(&f, 0.6, None)?;
            Ok(CheckResult::new("norms.isometry", rep.rhs, 0.25, tol))
        });
    }

    run(&mut out, "oracle.eigenvalue", t(1e-8), |tol| {
        let p = DiracParams::new(1.0, 0.6, -1.0)?;
        let cfg_s = ShootingConfig::default();
        let levels: &[u32] = if cfg.quick { &[1] } else { &[1, 2, 3] };
        let mut worst = 0.0f64;
        for &n in levels {
            let e = spectrum(&p, n)?;
            let lo = 0.5 * (spectrum(&p, n - 1)? + e);
            let hi = 0.5 * (spectrum(&p, n + 1)? + e);
            worst = worst.max((shoot_eigenvalue(&p, (lo, hi), &cfg_s)? - e).abs() / e);
        }
        Ok(CheckResult::new("oracle.eigenvalue", worst, 0.0, tol))
    });

    run(&mut out, "oracle.eigenfunction", t(1e-6), |tol| {
        let p = DiracParams::new(1.0, 0.6, -1.0)?;
        let st = RadialEigenstate::new(&p, 1)?;
        let grid = log_grid(1e-6, 60.0, 6000);
        let tr = eigenfunction(&p, st.state.epsilon, &grid, &ShootingConfig::default())?;
        let closed: Vec<(f64, f64)> = grid.iter().map(|&q| st.eval(q)).collect::<Result<_>>()?;
        let diff = simpson_log(&grid, |k| {
            let (f, g) = closed[k];
            grid[k].powi(3) * ((tr.f[k] - f).powi(2) + (tr.g[k] - g).powi(2))
        })?;
        Ok(CheckResult::new("oracle.eigenfunction", diff.sqrt(), 0.0, tol))
    });

    out
}

/// Checks tied to one parameter set: closed-form spectrum against the root
/// finder, and the matrix identities, for every `n` in `levels`.
pub fn parameter_checks(p: &DiracParams, levels: &[u32], cfg: &VerifyConfig) -> Vec<CheckResult> {
    let t = |default: f64| cfg.tolerance_override.unwrap_or(default);
    let mut out = Vec::new();

    run(&mut out, "params.quantize_agreement", t(1e-12), |tol| {
        let mut worst = 0.0f64;
        for &n in levels {
            let c = spectrum(p, n)?;
            worst = worst.max((quantize(p, n)? - c).abs() / c);
        }
        Ok(CheckResult::new("params.quantize_agreement", worst, 0.0, tol))
    });

    run(&mut out, "params.matrix_identities", t(1e-12), |tol| {
        let mut worst = 0.0f64;
        for &n in levels.iter().filter(|&&n| n > 0) {
            let m = build_matrices(p, spectrum(p, n)?)?;
            worst = m.identity_residuals().iter().fold(worst, |w, r| w.max(*r));
        }
        Ok(CheckResult::new("params.matrix_identities", worst, 0.0, tol))
    });

    out
}
