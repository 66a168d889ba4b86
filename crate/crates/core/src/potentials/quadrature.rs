//! Composite adaptive Gauss–Legendre integration on the half line.

use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{FewBodyError, Result};

pub const NODES_PER_PANEL: usize = 64;

/// `exp(-Re α r²)` below this is treated as zero.
pub const GAUSSIAN_CUTOFF: f64 = 1e-30;

const MAX_DEPTH: u32 = 24;
const REL_TOL: f64 = 1e-14;
const MAX_PANELS: usize = 20_000;

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn rule64() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES_PER_PANEL))
}

fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let (x, w) = rule64();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let v = f(mid + half * xi);
        sum += wi * v;
        abs_sum += wi * v.norm();
    }
    (sum * half, abs_sum * half)
}

fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    whole: Complex64,
    abs_tol: f64,
    depth: u32,
    budget: &mut usize,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let (left, _) = panel(f, a, m);
    let (right, _) = panel(f, m, b);
    let halves = left + right;
    *budget = budget.saturating_sub(2);
    if (halves - whole).norm() <= abs_tol.max(REL_TOL * halves.norm())
        || depth >= MAX_DEPTH
        || *budget == 0
    {
        return halves;
    }
    refine(f, a, m, left, 0.5 * abs_tol, depth + 1, budget)
        + refine(f, m, b, right, 0.5 * abs_tol, depth + 1, budget)
}

/// Integrates `f` over `[0, ∞)` for an integrand damped like `exp(-decay r²)`.
///
/// Panels grow geometrically from the origin out to the radius where the
/// Gaussian damping falls below [`GAUSSIAN_CUTOFF`]; each panel is bisected
/// until two successive estimates agree.
pub fn integrate_gaussian_damped<F>(f: F, decay: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(decay > 0.0) || !decay.is_finite() {
        return Err(FewBodyError::IntegrationFailure(format!(
            "damping exponent must be positive, got {decay}"
        )));
    }
    let scale = 1.0 / decay.sqrt();
    let cutoff = scale * (-GAUSSIAN_CUTOFF.ln()).sqrt();
    let mut edges = vec![0.0];
    let mut edge = scale * 2f64.powi(-14);
    while edge < cutoff {
        edges.push(edge);
        edge *= 2.0;
    }
    edges.push(cutoff);

    let coarse: Vec<(Complex64, f64)> = edges.windows(2).map(|e| panel(&f, e[0], e[1])).collect();
    let magnitude: f64 = coarse.iter().map(|c| c.1).sum();
    if !magnitude.is_finite() {
        return Err(FewBodyError::IntegrationFailure(
            "non-finite integrand on a quadrature panel".into(),
        ));
    }
    let abs_tol = REL_TOL * magnitude;
    let mut budget = MAX_PANELS;
    let mut total = Complex64::new(0.0, 0.0);
    for (e, (whole, _)) in edges.windows(2).zip(coarse) {
        total += refine(&f, e[0], e[1], whole, abs_tol, 0, &mut budget);
    }
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(FewBodyError::IntegrationFailure(
            "non-finite panel sum".into(),
        ));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let (x, w) = gauss_legendre(64);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(126)).sum();
        assert!((m - 2.0 / 127.0).abs() < 1e-14);
        let (x5, w5) = gauss_legendre(5);
        let m5: f64 = x5.iter().zip(&w5).map(|(x, w)| w * x.powi(8)).sum();
        assert!((m5 - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_moment_by_quadrature() {
        for &a in &[1e-6, 0.01, 1.0, 100.0, 4.4e3] {
            let got =
                integrate_gaussian_damped(|r| Complex64::new(r * r * (-a * r * r).exp(), 0.0), a)
                    .unwrap();
            let exact = std::f64::consts::PI.sqrt() / (4.0 * a * a.sqrt());
            assert!(
                (got.re / exact - 1.0).abs() < 1e-12,
                "a={a}: {} vs {exact}",
                got.re
            );
        }
    }

    #[test]
    fn oscillatory_complex_gaussian() {
        let z = Complex64::new(2.0, 3.0);
        let got = integrate_gaussian_damped(|r| r * (-z * r * r).exp(), z.re).unwrap();
        let exact = 1.0 / (2.0 * z);
        assert!((got - exact).norm() < 1e-13);
    }

    #[test]
    fn rejects_non_finite() {
        let err = integrate_gaussian_damped(|r| Complex64::new((r - 0.5).ln(), 0.0), 1.0);
        assert!(err.is_err());
    }
}
