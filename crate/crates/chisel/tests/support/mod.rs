//! Test-only oracles, independent of the library's computational paths:
//! direct O(N²) Fourier sums, dense matrix exponentials, a dense
//! eigensolver, and classical quadrature.

#![allow(dead_code)]

use chisel::core::Grid;
use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64;

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
}

pub fn assert_rel(a: f64, b: f64, rel: f64, what: &str) {
    assert!(
        (a - b).abs() <= rel * b.abs().max(1e-300),
        "{what}: {a} vs {b} (rel tol {rel}, got {})",
        ((a - b) / b).abs()
    );
}

/// Wraps x into the 2π-window centred on `target`.
pub fn wrap_near(x: f64, target: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    x - two_pi * ((x - target) / two_pi).round()
}

/// Direct O(N²) evaluation of the same momentum amplitudes the library
/// computes with its FFT: ã_m = √(dξ/N) Σ_j φ_j e^{−iκ_m ξ_j}.
pub fn direct_spectrum(grid: &Grid, amplitudes: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let scale = (grid.dxi() / n as f64).sqrt();
    grid.kappa()
        .iter()
        .map(|&k| {
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, a) in amplitudes.iter().enumerate() {
                sum += a * Complex64::new(0.0, -k * grid.xi()[j]).exp();
            }
            scale * sum
        })
        .collect()
}

/// Dense discretized Hamiltonian H = K − i diag(V) with the kinetic
/// block built by direct summation over the momentum comb.
pub fn dense_hamiltonian(grid: &Grid, v: &[f64]) -> DMatrix<Complex<f64>> {
    let n = grid.len();
    let mut h = DMatrix::<Complex<f64>>::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            let mut sum = 0.0f64;
            let mut sum_im = 0.0f64;
            for &k in grid.kappa() {
                let phase = k * (grid.xi()[j] - grid.xi()[l]);
                sum += k * k * phase.cos();
                sum_im += k * k * phase.sin();
            }
            h[(j, l)] = Complex::new(sum / n as f64, sum_im / n as f64);
        }
    }
    for j in 0..n {
        h[(j, j)] += Complex::new(0.0, -v[j]);
    }
    h
}

/// Matrix exponential by scaling-and-squaring with a Taylor series.
pub fn expm(a: &DMatrix<Complex<f64>>) -> DMatrix<Complex<f64>> {
    let n = a.nrows();
    let norm = a.iter().map(|c| c.norm()).fold(0.0f64, f64::max) * n as f64;
    let k = norm.log2().ceil().max(0.0) as u32 + 1;
    let scaled = a.map(|c| c / Complex::new(2f64.powi(k as i32), 0.0));
    let mut term = DMatrix::<Complex<f64>>::identity(n, n);
    let mut sum = DMatrix::<Complex<f64>>::identity(n, n);
    for j in 1..200 {
        term = (&term * &scaled) / Complex::new(j as f64, 0.0);
        sum += &term;
        let t_norm: f64 = term.iter().map(|c| c.norm()).sum();
        if t_norm < 1e-20 {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..k {
        result = &result * &result;
    }
    result
}

/// Eigenvalues of a dense complex matrix via the Schur form.
pub fn dense_eigenvalues(h: &DMatrix<Complex<f64>>) -> Vec<Complex64> {
    let (_q, t) = h.clone().schur().unpack();
    (0..h.nrows()).map(|i| Complex64::new(t[(i, i)].re, t[(i, i)].im)).collect()
}

/// Dense eigenpair nearest a target eigenvalue: inverse iteration with
/// an LU solve, certified by its residual.
pub fn dense_eigenpair(
    h: &DMatrix<Complex<f64>>,
    target: Complex64,
) -> (Complex64, Vec<Complex64>) {
    let n = h.nrows();
    // tiny shift off the exact eigenvalue keeps the LU factorizable
    let mu = Complex::new(target.re, target.im) + Complex::new(1e-10, 1e-10);
    let shifted = h - DMatrix::<Complex<f64>>::identity(n, n) * mu;
    let lu = shifted.lu();
    let mut x = DVector::<Complex<f64>>::from_element(n, Complex::new(1.0, 0.0));
    for _ in 0..4 {
        let solved = lu.solve(&x).expect("inverse iteration solve failed");
        let norm = solved.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        x = solved / Complex::new(norm, 0.0);
    }
    // Rayleigh quotient for the eigenvalue
    let hx = h * &x;
    let num: Complex<f64> = x.iter().zip(hx.iter()).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = x.iter().map(|c| c.norm_sqr()).sum();
    let lambda = num / Complex::new(den, 0.0);
    let resid = (&hx - &x * lambda).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    assert!(resid < 1e-8, "dense eigenpair residual {resid}");
    (
        Complex64::new(lambda.re, lambda.im),
        x.iter().map(|c| Complex64::new(c.re, c.im)).collect(),
    )
}

/// Simpson quadrature on a uniform grid over [a, b].
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + j as f64 * h);
    }
    sum * h / 3.0
}

/// Bessel J_n by its integral representation (Simpson quadrature).
pub fn bessel_j(n: i32, x: f64) -> f64 {
    simpson(|t| (n as f64 * t - x * t.sin()).cos(), 0.0, std::f64::consts::PI, 4000)
        / std::f64::consts::PI
}

/// Classic RK4 for a complex 2-vector ODE y' = f(t, y).
pub fn rk4_two_level<F>(f: F, y0: [Complex64; 2], t_final: f64, steps: usize) -> [Complex64; 2]
where
    F: Fn(f64, [Complex64; 2]) -> [Complex64; 2],
{
    let h = t_final / steps as f64;
    let mut y = y0;
    let mut t = 0.0;
    for _ in 0..steps {
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        y = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        t += h;
    }
    y
}

/// Relative L2 distance between two sampled states.
pub fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Least-squares slope of y against x.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    sxy / sxx
}

/// Fits ln(density) = c0 + c2 ξ² over the samples with |ξ| ≤ cut and
/// returns c2 (quadratic, generalized to any quadratic-in-ξ² fit).
pub fn quadratic_coefficient(xi: &[f64], values: &[f64], cut: f64) -> f64 {
    let pts: Vec<(f64, f64)> = xi
        .iter()
        .zip(values)
        .filter(|(&x, _)| x.abs() <= cut)
        .map(|(&x, &y)| (x * x, y))
        .collect();
    let xs: Vec<f64> = pts.iter().map(|(x, _)| *x).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, y)| *y).collect();
    slope(&xs, &ys)
}
