use biwave::dirac::{build_matrices, spectrum, DiracParams, RadialEigenstate};
use biwave::domain::{principal_power, Atom, SampledFunction};
use biwave::norms::bergman_norm;
use biwave::oracle::count_nodes;
use biwave::specfun::{cgamma, hyp1f1_poly, hyp2f1_poly};
use biwave::transform::{forward_atom, forward_atoms, forward_quadrature, HalfPlaneGrid};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn upper_pole() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, 0.3..2.0f64).prop_map(|(re, im)| c(re, im))
}

fn lower_point() -> impl Strategy<Value = Complex64> {
    (-20.0..20.0f64, -10.0..-0.05f64).prop_map(|(re, im)| c(re, im))
}

fn dirac_params() -> impl Strategy<Value = DiracParams> {
    (1..=4i32, any::<bool>(), 0.01..0.99f64).prop_map(|(k, neg, frac)| {
        let chi = if neg { -(k as f64) } else { k as f64 };
        DiracParams::new(1.0, frac * k as f64, chi).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn principal_power_adds_exponents(
        re in -5.0..5.0f64, im in -5.0..5.0f64, s1 in -3.0..3.0f64, s2 in -3.0..3.0f64,
    ) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        // real exponents never leave the principal branch
        let w = c(re, im);
        let lhs = principal_power(w, c(s1, 0.0)).unwrap() * principal_power(w, c(s2, 0.0)).unwrap();
        let rhs = principal_power(w, c(s1 + s2, 0.0)).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn gamma_recurrence(re in 0.1..10.0f64, im in -10.0..10.0f64) {
        let s = c(re, im);
        let lhs = cgamma(s + 1.0).unwrap();
        let rhs = s * cgamma(s).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn hyp2f1_with_equal_parameters_is_binomial(n in 0u32..12, b in 0.2..5.0f64, xr in -0.9..0.9f64, xi in -0.9..0.9f64) {
        let x = c(xr, xi);
        let v = hyp2f1_poly(n, c(b, 0.0), c(b, 0.0), x).unwrap();
        let e = (c(1.0, 0.0) - x).powu(n);
        prop_assert!((v - e).norm() < 1e-12 * e.norm().max(1.0));
    }

    #[test]
    fn kummer_equation_residual(n in 1u32..10, cc in 0.5..6.0f64, x in 0.0..8.0f64) {
        // x y″ + (c − x) y′ + n y = 0 with y′, y″ from the contiguous relations
        let (cn, xn) = (c(cc, 0.0), c(x, 0.0));
        let nf = n as f64;
        let y = hyp1f1_poly(n, cn, xn).unwrap();
        let dy = hyp1f1_poly(n - 1, cn + 1.0, xn).unwrap() * (-nf / cc);
        let d2y = if n >= 2 {
            hyp1f1_poly(n - 2, cn + 2.0, xn).unwrap() * (nf * (nf - 1.0) / (cc * (cc + 1.0)))
        } else {
            c(0.0, 0.0)
        };
        let terms = [d2y * x, dy * (cc - x), y * nf];
        let scale: f64 = terms.iter().map(|t| t.norm()).sum();
        let r: Complex64 = terms.iter().sum();
        prop_assert!(r.norm() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn atom_obeys_its_decay_bound(
        cr in -2.0..2.0f64, ci in -2.0..2.0f64, alpha in 0.0..3.0f64, pole in upper_pole(), q in 1e-3..50.0f64,
    ) {
        let a = Atom::new(c(cr, ci), alpha, pole).unwrap();
        let bound = c(cr, ci).norm() * q.powf(alpha - 1.0) * (-pole.im * q).exp();
        prop_assert!(a.eval(q).norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn forward_transform_is_analytic(alpha in 0.0..2.5f64, gamma in 0.2..2.0f64, pole in upper_pole(), z in lower_point()) {
        // Cauchy–Riemann in (b, a) with ζ̄ = b − ia: ∂_a F = −i ∂_b F
        let f = forward_atom(&Atom::new(c(1.0, 0.0), alpha, pole).unwrap(), gamma).unwrap();
        let h = 1e-5 * z.norm().max(0.1);
        let db = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
        let da = (f.eval(z - c(0.0, h)).unwrap() - f.eval(z + c(0.0, h)).unwrap()) / (2.0 * h);
        prop_assert!((da + Complex64::i() * db).norm() <= 1e-6 * db.norm().max(1e-12));
    }

    #[test]
    fn matrix_identities_hold(p in dirac_params(), n in 1u32..9) {
        let m = build_matrices(&p, spectrum(&p, n).unwrap()).unwrap();
        for r in m.identity_residuals() {
            prop_assert!(r <= 1e-12, "{:?}", m.identity_residuals());
        }
    }

    #[test]
    fn nonrelativistic_limit(l in 1e-4..1e-3f64, k in 1..=3i32, n in 0u32..6) {
        // m − ε → m λ²/(2(n+|χ|)²) as λ → 0, with relative corrections O(λ²)
        let p = DiracParams::new(1.0, l, -(k as f64)).unwrap();
        let binding = 1.0 - spectrum(&p, n).unwrap();
        let big_n = n as f64 + k as f64;
        let schrodinger = l * l / (2.0 * big_n * big_n);
        prop_assert!((binding / schrodinger - 1.0).abs() < 1e-5);
    }

    #[test]
    fn large_component_has_n_nodes(p in dirac_params(), n in 0u32..6) {
        prop_assume!(p.chi < 0.0);
        let st = RadialEigenstate::new(&p, n).unwrap();
        let qs: Vec<f64> = (1..=4000).map(|i| 0.02 * i as f64).collect();
        let f: Vec<f64> = qs.iter().map(|&q| st.eval(q).unwrap().0).collect();
        prop_assert_eq!(count_nodes(&f), n as usize);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quadrature_matches_closed_form(alpha in 0.2..2.0f64, gamma in 0.3..0.9f64, b in -5.0..5.0f64, a in 0.2..3.0f64) {
        let atom = Atom::new(c(1.0, 0.0), alpha, c(0.0, 1.0)).unwrap();
        let grid: Vec<f64> = (1..=4000).map(|i| 0.01 * i as f64).collect();
        let s = SampledFunction::from_fn(grid, alpha - 1.0, |q| atom.eval(q)).unwrap();
        let z = c(b, -a);
        let exact = forward_atom(&atom, gamma).unwrap().eval(z).unwrap();
        prop_assert!(rel(forward_quadrature(&s, gamma, z).unwrap().value, exact) < 1e-7);
    }

    #[test]
    fn bergman_norm_is_homogeneous_and_obeys_the_parallelogram_law(
        p1 in upper_pole(), p2 in upper_pole(), alpha in 0.5..2.0f64, gamma in 0.3..0.9f64,
        sr in -2.0..2.0f64, si in -2.0..2.0f64,
    ) {
        let x = Atom::new(c(1.0, 0.0), alpha, p1).unwrap();
        let y = Atom::new(c(0.5, -0.4), alpha + 0.5, p2).unwrap();
        let order = 2.0 * gamma + 1.0;
        let grid = HalfPlaneGrid::bergman_default(p1.im.min(p2.im)).unwrap();
        let norm = |atoms: &[Atom]| {
            let f = forward_atoms(atoms, gamma).unwrap().derivative().unwrap();
            bergman_norm(&f, order, &grid).unwrap().value
        };
        let s = c(sr, si);
        let (nx, ny) = (norm(&[x]), norm(&[y]));
        let nsx = norm(&[x.scaled(s)]);
        prop_assert!((nsx - s.norm_sqr() * nx).abs() <= 1e-10 * nsx.max(1e-300));
        let plus = norm(&[x, y]);
        let minus = norm(&[x, y.scaled(c(-1.0, 0.0))]);
        let rhs = 2.0 * (nx + ny);
        prop_assert!((plus + minus - rhs).abs() <= 1e-8 * rhs);
    }
}
