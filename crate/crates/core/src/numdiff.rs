//! Finite-difference helpers: Fornberg weights on arbitrary grids and a
//! central difference for analytic functions of ζ̄.

use num_complex::Complex64;

use crate::error::Result;

/// Weights of the first derivative at `x0` for the stencil `xs` (Fornberg).
pub fn fornberg_first_derivative(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // c[j][k]: weight of node j for derivative order k
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// First derivative of sampled data `ys(xs)` at every node, from a
/// `width`-point stencil centred where possible.
pub fn derivative_on_grid(xs: &[f64], ys: &[f64], width: usize) -> Vec<f64> {
    let n = xs.len();
    let width = width.min(n).max(2);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let stencil = &xs[start..start + width];
            let w = fornberg_first_derivative(xs[i], stencil);
            w.iter().zip(&ys[start..start + width]).map(|(w, y)| w * y).sum()
        })
        .collect()
}

/// Step used for derivatives of analytic functions sampled off a grid.
pub fn zbar_step(zbar: Complex64) -> f64 {
    1e-5f64.max(1e-5 * zbar.norm())
}

/// Central difference `dF/dζ̄` along the real direction.
pub fn central_difference<F>(f: F, zbar: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let h = zbar_step(zbar);
    let plus = f(zbar + h)?;
    let minus = f(zbar - h)?;
    Ok((plus - minus) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_central_weights() {
        let w = fornberg_first_derivative(0.0, &[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_derivative_of_exponential() {
        let xs: Vec<f64> = (0..200).map(|i| 0.01 * i as f64 + 0.003 * (i as f64).sin()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let d = derivative_on_grid(&xs, &ys, 7);
        for (x, d) in xs.iter().zip(&d) {
            assert!((d - x.exp()).abs() < 1e-9 * x.exp(), "{x}");
        }
    }

    #[test]
    fn central_difference_of_power() {
        let z = Complex64::new(0.4, -1.3);
        let d = central_difference(|w| Ok(w.powf(-1.5)), z).unwrap();
        let exact = z.powf(-2.5) * -1.5;
        assert!((d - exact).norm() < 1e-8 * exact.norm());
    }
}
