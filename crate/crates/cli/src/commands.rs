use biwave::dirac::spectrum;
use biwave::oracle::count_nodes;
use biwave::reconstruct::{invert_pole_term_numeric, invert_poles, reconstruct_admissible};
use biwave::transform::forward_atoms;
use biwave::verify::{parameter_checks, run_checks, VerifyConfig};
use biwave::{Atom, BoundState, Complex64, HalfPlaneGrid, RadialEigenstate, WaveletParams, ELECTRON_MASS_EV};

use crate::args::{DemoArgs, SpectrumArgs, VerifyArgs, WavefunctionArgs};
use crate::output::{fmt, Run, Table};
use crate::CliError;

pub fn spectrum_cmd(a: &SpectrumArgs, run: &mut Run) -> Result<(), CliError> {
    let p = a.physics.resolve()?;
    let ev = a.physics.charge.is_some();
    let mut cols = vec!["n", "eps_over_m", "binding_over_m", "eta", "eta_tilde"];
    if ev {
        cols.extend(["eps_ev", "binding_ev"]);
    }
    let mut t = Table::new(&cols);
    t.comment(&format!("lambda = {}, chi = {}, gamma = {}", fmt(p.lambda), fmt(p.chi), fmt(p.gamma())));
    if ev {
        t.comment(&format!("m = {ELECTRON_MASS_EV} eV"));
    }
    for n in a.levels.clone() {
        let s = BoundState::new(&p, n)?;
        let mut row = vec![s.epsilon, 1.0 - s.epsilon, s.eta, s.eta_tilde];
        if ev {
            row.extend([s.epsilon * ELECTRON_MASS_EV, (1.0 - s.epsilon) * ELECTRON_MASS_EV]);
        }
        t.row(Some(n), &row);
    }
    run.emit(a.output.out.as_deref(), &t.into_string())
}

pub fn wavefunction_cmd(a: &WavefunctionArgs, run: &mut Run) -> Result<(), CliError> {
    let p = a.physics.resolve()?;
    let q_max = a.q_max.unwrap_or(50.0 + 8.0 * a.level as f64);
    if !(a.q_min > 0.0 && q_max > a.q_min && a.points >= 2) {
        return Err(CliError::usage("need 0 < q-min < q-max and at least 2 points"));
    }
    let st = RadialEigenstate::new(&p, a.level)?;
    let h = (q_max - a.q_min) / (a.points - 1) as f64;
    let qs: Vec<f64> = (0..a.points).map(|i| a.q_min + h * i as f64).collect();
    let fg = qs.iter().map(|&q| st.eval(q)).collect::<biwave::Result<Vec<_>>>()?;
    let density: Vec<f64> = qs.iter().zip(&fg).map(|(q, (f, g))| q * q * (f * f + g * g)).collect();
    let norm = h * (density.iter().sum::<f64>() - 0.5 * (density[0] + density[density.len() - 1]));
    let f: Vec<f64> = fg.iter().map(|v| v.0).collect();

    let mut t = Table::new(&["q", "f", "g"]);
    t.comment(&format!(
        "n = {}, epsilon_over_m = {}, lambda = {}, chi = {}",
        a.level,
        fmt(st.state.epsilon),
        fmt(p.lambda),
        fmt(p.chi)
    ));
    t.comment(&format!("r = q / {} in units of 1/m", fmt(2.0 * p.k(st.state.epsilon))));
    t.comment(&format!("normalization (trapezoid of q^2 (f^2 + g^2)) = {}", fmt(norm)));
    t.comment(&format!("sign changes of f = {}", count_nodes(&f)));
    for (q, (f, g)) in qs.iter().zip(&fg) {
        t.row(None, &[*q, *f, *g]);
    }
    run.emit(a.output.out.as_deref(), &t.into_string())?;

    if let Some(path) = &a.plot {
        let mut t = Table::new(&["q", "r", "density"]);
        for (q, d) in qs.iter().zip(&density) {
            t.row(None, &[*q, st.radius(*q), *d]);
        }
        run.emit(Some(path), &t.into_string())?;
    }
    Ok(())
}

/// Returns whether every check passed.
pub fn verify_cmd(a: &VerifyArgs, run: &mut Run) -> Result<bool, CliError> {
    if let Some(t) = a.tolerance {
        if !(t >= 0.0) {
            return Err(CliError::usage(format!("tolerance must be non-negative, got {t}")));
        }
    }
    let cfg = VerifyConfig { tolerance_override: a.tolerance, quick: a.quick };
    let params = if a.physics.is_empty() { None } else { Some(a.physics.resolve()?) };
    if let Some(p) = &params {
        for n in a.levels.clone() {
            spectrum(p, n)?;
        }
    }

    let mut results = run_checks(&cfg);
    if let Some(p) = params {
        let levels: Vec<u32> = a.levels.clone().collect();
        results.extend(parameter_checks(&p, &levels, &cfg));
    }
    for r in results.iter().filter(|r| !r.passed()) {
        eprintln!(
            "FAIL {}: value {:e}, expected {:e}, |delta| {:e} > tolerance {:e}",
            r.check,
            r.value,
            r.expected,
            (r.value - r.expected).abs(),
            r.tolerance
        );
    }
    let mut json = serde_json::to_string_pretty(&results).expect("report serialises");
    json.push('\n');
    run.emit(a.output.out.as_deref(), &json)?;
    Ok(results.iter().all(|r| r.passed()))
}

fn rel(v: Complex64, e: Complex64) -> f64 {
    if e.norm() == 0.0 {
        v.norm()
    } else {
        (v - e).norm() / e.norm()
    }
}

pub fn demo_cmd(a: &DemoArgs, run: &mut Run) -> Result<(), CliError> {
    let gamma = WaveletParams::new(a.gamma)?.gamma;
    let atoms = if a.zero {
        Vec::new()
    } else {
        vec![Atom::new(
            Complex64::new(a.coeff_re, a.coeff_im),
            a.alpha,
            Complex64::new(a.pole_re, a.pole_im),
        )?]
    };
    let big_f = forward_atoms(&atoms, gamma)?;
    let grid = HalfPlaneGrid::display(a.a_min, a.a_max, a.half_width, a.na, a.nb)?;

    let qs: Vec<f64> = (0..20).map(|k| 0.05 * 200f64.powf(k as f64 / 19.0)).collect();
    let exact = |q: f64| atoms.iter().map(|t| t.eval(q)).sum::<Complex64>();
    let symbolic = invert_poles(&big_f)?;
    let (mut err_sym, mut err_num) = (0.0f64, 0.0f64);
    for &q in &qs {
        let e = exact(q);
        err_sym = err_sym.max(rel(symbolic.eval(q)?, e));
        let mut num = Complex64::new(0.0, 0.0);
        for term in &big_f.poles {
            num += invert_pole_term_numeric(term, gamma, q)?.value;
        }
        err_num = err_num.max(rel(num, e));
    }
    let cross = if gamma > 1.0 {
        let adm = reconstruct_admissible(&big_f, &qs)?;
        let mut worst = 0.0f64;
        for (q, v) in qs.iter().zip(adm) {
            worst = worst.max(rel(v, symbolic.eval(*q)?));
        }
        Some(worst)
    } else {
        None
    };

    let mut t = Table::new(&["b", "a", "re_F", "im_F"]);
    let mut summary = vec![
        format!("gamma = {}, atoms = {}", fmt(gamma), atoms.len()),
        format!("round_trip_symbolic_max_rel = {}", fmt(err_sym)),
        format!("round_trip_numeric_max_rel = {}", fmt(err_num)),
    ];
    if let Some(c) = cross {
        summary.push(format!("admissible_vs_bi_orthogonal_max_rel = {}", fmt(c)));
    }
    for s in &summary {
        t.comment(s);
        eprintln!("{s}");
    }
    for z in grid.points() {
        let v = big_f.eval(z)?;
        t.row(None, &[z.re, -z.im, v.re, v.im]);
    }
    run.emit(a.output.out.as_deref(), &t.into_string())
}
