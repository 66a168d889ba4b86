//! Closed-form Gaussian moments shared by the two- and three-body modules.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gamma function at half-integer or integer argument `n / 2` (n >= 1).
pub fn gamma_half(n: u32) -> f64 {
    assert!(n >= 1, "gamma_half requires n >= 1");
    let (mut value, mut arg) = if n % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = n as f64 / 2.0;
    while arg < target {
        value *= arg;
        arg += 1.0;
    }
    value
}

/// `∫_0^∞ r^p exp(-z r²) dr` for `Re z > 0`, principal branch.
pub fn half_line_moment(p: u32, z: Complex64) -> Complex64 {
    let k = (p + 1) as f64 / 2.0;
    gamma_half(p + 1) / (2.0 * z.powf(k))
}

/// Real-argument version of [`half_line_moment`].
pub fn half_line_moment_re(p: u32, z: f64) -> f64 {
    let k = (p + 1) as f64 / 2.0;
    gamma_half(p + 1) / (2.0 * z.powf(k))
}

/// `∫_{-∞}^{∞} x^p exp(-z x²) dx`; zero for odd `p`.
pub fn full_line_moment(p: u32, z: Complex64) -> Complex64 {
    if p % 2 == 1 {
        Complex64::new(0.0, 0.0)
    } else {
        2.0 * half_line_moment(p, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(2), 1.0);
        assert!((gamma_half(3) - 0.5 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(8), 6.0);
    }

    #[test]
    fn moments_match_elementary_integrals() {
        // ∫ r e^{-a r²} = 1/(2a), ∫ e^{-a x²} over R = sqrt(pi/a)
        let a = Complex64::new(1.7, 0.0);
        assert!((half_line_moment(1, a).re - 1.0 / 3.4).abs() < 1e-15);
        assert!((full_line_moment(0, a).re - (PI / 1.7).sqrt()).abs() < 1e-14);
        assert_eq!(full_line_moment(3, a), Complex64::new(0.0, 0.0));
    }
}
