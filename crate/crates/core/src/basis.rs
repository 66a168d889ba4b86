//! Gaussian basis sets: geometric range progressions, normalization and
//! complex-ranged (oscillating) members.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{FewBodyError, Result};
use crate::gaussian::half_line_moment;

/// Spatial dimension of a relative coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
    Three,
}

impl Dim {
    pub fn new(d: u32) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(FewBodyError::InvalidParams(format!(
                "dimension must be 1, 2 or 3, got {d}"
            ))),
        }
    }

    pub fn value(self) -> u32 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Angular integral of |f_{l,m}|²; the 1D factor counts both half lines.
    fn angular_measure(self) -> f64 {
        match self {
            Dim::One => 2.0,
            Dim::Two => 2.0 * PI,
            Dim::Three => 1.0,
        }
    }

    /// Radial power `2l + d - 1` weighting `exp(-α r²)` in a matrix element.
    pub fn radial_power(self, l: u32) -> u32 {
        2 * l + self.value() - 1
    }
}

/// Gaussian lengths `r_n = r1 · a^{n-1}` in geometric progression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeProgression {
    pub nmax: usize,
    pub r1: f64,
    pub rnmax: f64,
}

impl RangeProgression {
    pub fn new(nmax: usize, r1: f64, rnmax: f64) -> Result<Self> {
        geometric_ranges(nmax, r1, rnmax)?;
        Ok(Self { nmax, r1, rnmax })
    }

    pub fn lengths(&self) -> Vec<f64> {
        geometric_ranges(self.nmax, self.r1, self.rnmax).expect("validated on construction")
    }

    /// Range parameters `ν_n = 1 / r_n²`.
    pub fn ranges(&self) -> Vec<f64> {
        self.lengths().into_iter().map(|r| 1.0 / (r * r)).collect()
    }
}

pub fn geometric_ranges(nmax: usize, r1: f64, rnmax: f64) -> Result<Vec<f64>> {
    if nmax < 2 {
        return Err(FewBodyError::InvalidBasis(format!(
            "nmax must be at least 2, got {nmax}"
        )));
    }
    if !(r1 > 0.0) || !(rnmax > r1) || !rnmax.is_finite() {
        return Err(FewBodyError::InvalidBasis(format!(
            "ranges need 0 < r1 < rnmax, got r1={r1}, rnmax={rnmax}"
        )));
    }
    let ratio = (rnmax / r1).powf(1.0 / (nmax - 1) as f64);
    let mut out: Vec<f64> = (0..nmax).map(|n| r1 * ratio.powi(n as i32)).collect();
    out[nmax - 1] = rnmax;
    Ok(out)
}

/// `∫ dr^d r^{2l} exp(-(a+b) r²) |f_{l,m}|²` for unnormalized Gaussians with ranges `a`, `b`.
pub fn raw_overlap(a: Complex64, b: Complex64, l: u32, dim: Dim) -> Complex64 {
    dim.angular_measure() * half_line_moment(dim.radial_power(l), a + b)
}

/// Kinetic matrix element `⟨a| -∇²/(2μ) |b⟩` between unnormalized Gaussians of equal `l`.
pub fn raw_kinetic(a: Complex64, b: Complex64, l: u32, dim: Dim, mur: f64) -> Complex64 {
    let k = (2 * l + dim.value()) as f64;
    k * a * b / (mur * (a + b)) * raw_overlap(a, b, l, dim)
}

/// Normalization `N` with `N² ∫ dr^d |r^l e^{-ν r²} f_{l,m}|² = 1`.
pub fn normalization(nu: f64, l: u32, dim: Dim) -> f64 {
    let nu = Complex64::new(nu, 0.0);
    1.0 / raw_overlap(nu, nu, l, dim).re.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillationKind {
    Cos,
    Sin,
}

/// Factor `cos(ω ν r²)` or `sin(ω ν r²)` of a complex-ranged Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    pub kind: OscillationKind,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisFunction {
    pub nu: f64,
    pub power: u32,
    pub dim: Dim,
    pub norm: f64,
    pub oscillation: Option<Oscillation>,
}

impl BasisFunction {
    pub fn real(nu: f64, power: u32, dim: Dim) -> Self {
        Self {
            nu,
            power,
            dim,
            norm: normalization(nu, power, dim),
            oscillation: None,
        }
    }

    pub fn complex_ranged(
        nu: f64,
        power: u32,
        dim: Dim,
        kind: OscillationKind,
        omega: f64,
    ) -> Result<Self> {
        let mut f = Self {
            nu,
            power,
            dim,
            norm: 1.0,
            oscillation: Some(Oscillation { kind, omega }),
        };
        let self_overlap = f.pair_sum(&f, |a, b| raw_overlap(a, b, power, dim)).re;
        if !(self_overlap > 0.0) || !self_overlap.is_finite() {
            return Err(FewBodyError::InvalidBasis(format!(
                "complex-ranged function with nu={nu}, omega={omega} has no usable norm"
            )));
        }
        f.norm = 1.0 / self_overlap.sqrt();
        Ok(f)
    }

    /// Decomposition into complex Gaussians `Σ c_k r^l exp(-a_k r²)` (without `N`).
    pub fn terms(&self) -> Vec<(Complex64, Complex64)> {
        let nu = Complex64::new(self.nu, 0.0);
        match self.oscillation {
            None => vec![(Complex64::new(1.0, 0.0), nu)],
            Some(Oscillation { kind, omega }) => {
                let eta = Complex64::new(self.nu, self.nu * omega);
                let (c1, c2) = match kind {
                    OscillationKind::Cos => (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)),
                    OscillationKind::Sin => (Complex64::new(0.0, 0.5), Complex64::new(0.0, -0.5)),
                };
                vec![(c1, eta), (c2, eta.conj())]
            }
        }
    }

    /// `N_i N_j Σ c_k c_l M(a_k, a_l)` for a bilinear element `M` between raw Gaussians.
    pub fn pair_sum(
        &self,
        other: &Self,
        m: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ca, a) in self.terms() {
            for (cb, b) in other.terms() {
                acc += ca * cb * m(a, b);
            }
        }
        acc * self.norm * other.norm
    }

    /// Radial value `N r^l e^{-ν r²}` (times the oscillating factor); signed argument in 1D.
    pub fn eval(&self, r: f64) -> f64 {
        let base = self.norm * r.powi(self.power as i32) * (-self.nu * r * r).exp();
        match self.oscillation {
            None => base,
            Some(Oscillation {
                kind: OscillationKind::Cos,
                omega,
            }) => base * (omega * self.nu * r * r).cos(),
            Some(Oscillation {
                kind: OscillationKind::Sin,
                omega,
            }) => base * (omega * self.nu * r * r).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BasisSet {
    pub functions: Vec<BasisFunction>,
    /// Channel label of each function, for multi-channel problems.
    pub channels: Vec<usize>,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

/// Two-body basis. With `cr` set, each of the `nmax` ranges contributes a cos and a sin member.
pub fn make_basis_2b(
    prog: &RangeProgression,
    l: u32,
    dim: Dim,
    cr: bool,
    omega_cr: f64,
) -> Result<BasisSet> {
    let functions = if cr {
        if !(omega_cr > 0.0) {
            return Err(FewBodyError::InvalidBasis(format!(
                "omega_cr must be positive, got {omega_cr}"
            )));
        }
        let mut fs = Vec::with_capacity(2 * prog.nmax);
        for nu in prog.ranges() {
            fs.push(BasisFunction::complex_ranged(
                nu,
                l,
                dim,
                OscillationKind::Cos,
                omega_cr,
            )?);
            fs.push(BasisFunction::complex_ranged(
                nu,
                l,
                dim,
                OscillationKind::Sin,
                omega_cr,
            )?);
        }
        fs
    } else {
        prog.ranges()
            .into_iter()
            .map(|nu| BasisFunction::real(nu, l, dim))
            .collect()
    };
    let channels = vec![0; functions.len()];
    Ok(BasisSet {
        functions,
        channels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::quadrature::integrate_gaussian_damped;
    use proptest::prelude::*;

    fn quadrature_norm(f: &BasisFunction) -> f64 {
        let d = f.dim.value() as i32;
        let measure = match f.dim {
            Dim::One => 2.0,
            Dim::Two => 2.0 * PI,
            Dim::Three => 1.0,
        };
        let q = integrate_gaussian_damped(
            |r| Complex64::new(f.eval(r).powi(2) * r.powi(d - 1), 0.0),
            2.0 * f.nu,
        )
        .unwrap();
        measure * q.re
    }

    #[test]
    fn progression_examples() {
        assert_eq!(geometric_ranges(3, 1.0, 4.0).unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(geometric_ranges(2, 0.5, 2.0).unwrap(), vec![0.5, 2.0]);
        let r = geometric_ranges(10, 0.1, 30.0).unwrap();
        assert_eq!(r[0], 0.1);
        assert_eq!(r[9], 30.0);
        let a = 300f64.powf(1.0 / 9.0);
        assert!((r[1] / r[0] - a).abs() < 1e-12);
    }

    #[test]
    fn progression_errors() {
        assert!(matches!(
            geometric_ranges(1, 0.1, 1.0),
            Err(FewBodyError::InvalidBasis(_))
        ));
        assert!(matches!(
            geometric_ranges(4, 0.0, 1.0),
            Err(FewBodyError::InvalidBasis(_))
        ));
        assert!(matches!(
            geometric_ranges(4, 2.0, 1.0),
            Err(FewBodyError::InvalidBasis(_))
        ));
    }

    #[test]
    fn normalization_closed_forms() {
        let nu = 0.37;
        assert!((normalization(nu, 0, Dim::One) - (2.0 * nu / PI).powf(0.25)).abs() < 1e-14);
        // 3D radial normalization with Y_00 factored out: (2ν/π)^{3/4} · sqrt(4π)
        let n3 = (2.0 * nu / PI).powf(0.75) * (4.0 * PI).sqrt();
        assert!((normalization(nu, 0, Dim::Three) - n3).abs() < 1e-13);
    }

    #[test]
    fn normalization_matches_quadrature() {
        for dim in [Dim::One, Dim::Two, Dim::Three] {
            for l in 0..3 {
                let f = BasisFunction::real(1.0, l, dim);
                assert!(
                    (quadrature_norm(&f) - 1.0).abs() < 1e-12,
                    "dim {dim:?} l {l}"
                );
            }
        }
    }

    #[test]
    fn complex_ranged_basis_layout() {
        let prog = RangeProgression::new(80, 0.015, 2000.0).unwrap();
        let b = make_basis_2b(&prog, 0, Dim::Three, true, 1.5).unwrap();
        assert_eq!(b.len(), 160);
        let distinct: std::collections::BTreeSet<u64> =
            b.functions.iter().map(|f| f.nu.to_bits()).collect();
        assert_eq!(distinct.len(), 80);
        for f in &b.functions {
            assert!((quadrature_norm(f) - 1.0).abs() < 1e-10);
        }
        let odd = RangeProgression::new(5, 0.1, 10.0).unwrap();
        assert_eq!(
            make_basis_2b(&odd, 0, Dim::Three, true, 1.5).unwrap().len(),
            10
        );
        assert!(make_basis_2b(&odd, 0, Dim::Three, true, 0.0).is_err());
        let real = make_basis_2b(
            &RangeProgression::new(4, 0.1, 10.0).unwrap(),
            1,
            Dim::Two,
            false,
            0.0,
        )
        .unwrap();
        assert_eq!(real.len(), 4);
    }

    #[test]
    fn cos_member_degenerates_to_real_gaussian() {
        let nu = 0.8;
        let c =
            BasisFunction::complex_ranged(nu, 0, Dim::Three, OscillationKind::Cos, 1e-8).unwrap();
        let r = BasisFunction::real(nu, 0, Dim::Three);
        assert!((c.norm / r.norm - 1.0).abs() < 1e-6);
        for k in 0..20 {
            let x = 0.2 * k as f64;
            assert!((c.eval(x) - r.eval(x)).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn progression_is_log_equispaced(nmax in 2usize..60, r1 in 1e-3f64..10.0, factor in 1.01f64..1e4) {
            let r = geometric_ranges(nmax, r1, r1 * factor).unwrap();
            prop_assert_eq!(r.len(), nmax);
            let step = (r[1] / r[0]).ln();
            for w in r.windows(2) {
                prop_assert!(w[1] > w[0]);
                prop_assert!(((w[1] / w[0]).ln() - step).abs() < 1e-12);
            }
        }
    }
}
