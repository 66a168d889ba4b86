//! Pair potentials and the Gaussian-weighted radial kernel
//! `K(α) = ∫ r^l exp(-α r²) V(r) dr` to which every central matrix element reduces.

pub mod quadrature;
pub mod spline;
mod tabulated;

use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

use crate::error::{FewBodyError, Result};
use crate::gaussian::{full_line_moment, half_line_moment};
pub use spline::CubicSpline;
pub use tabulated::{Interpolation, TabulatedPotential};

type ComplexFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// A user supplied radial function.
#[derive(Clone)]
pub struct CallablePotential {
    name: String,
    f: Arc<ComplexFn>,
    complex_capable: bool,
}

impl CallablePotential {
    /// Wraps a function that is only defined on the real axis.
    pub fn real(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(move |z: Complex64| Complex64::new(f(z.re), 0.0)),
            complex_capable: false,
        }
    }

    /// Wraps an analytic function usable under complex scaling.
    pub fn complex(
        name: impl Into<String>,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            complex_capable: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_complex_capable(&self) -> bool {
        self.complex_capable
    }

    fn call(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }
}

impl fmt::Debug for CallablePotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CallablePotential")
            .field("name", &self.name)
            .field("complex_capable", &self.complex_capable)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum PotentialModel {
    /// `v0 · exp(-mu_g r²)`
    Gaussian {
        v0: f64,
        mu_g: f64,
    },
    /// `g · δ(x - x0)` on the full line.
    Contact1D {
        g: f64,
        x0: f64,
    },
    Callable(CallablePotential),
    Tabulated(TabulatedPotential),
}

/// Integration domain of the radial kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `∫_0^∞`, used for radial coordinates in 2D and 3D.
    HalfLine,
    /// `∫_{-∞}^{∞}`, used for signed 1D coordinates.
    FullLine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRequest {
    pub l_eff: u32,
    pub alpha: Complex64,
    pub domain: Domain,
    /// Complex scaling angle in radians.
    pub csm_theta: Option<f64>,
}

impl KernelRequest {
    pub fn new(l_eff: u32, alpha: f64, domain: Domain) -> Self {
        Self {
            l_eff,
            alpha: Complex64::new(alpha, 0.0),
            domain,
            csm_theta: None,
        }
    }

    pub fn with_alpha(mut self, alpha: Complex64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_theta(mut self, theta: Option<f64>) -> Self {
        self.csm_theta = theta.filter(|t| *t != 0.0);
        self
    }
}

impl PotentialModel {
    pub fn gaussian(v0: f64, mu_g: f64) -> Result<Self> {
        if !(mu_g > 0.0) || !v0.is_finite() {
            return Err(FewBodyError::InvalidParams(format!(
                "Gaussian potential needs mu_g > 0 and finite v0 (got v0={v0}, mu_g={mu_g})"
            )));
        }
        Ok(Self::Gaussian { v0, mu_g })
    }

    pub fn contact_1d(g: f64, x0: f64) -> Self {
        Self::Contact1D { g, x0 }
    }

    pub fn callable(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Callable(CallablePotential::real(name, f))
    }

    pub fn analytic(
        name: impl Into<String>,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::Callable(CallablePotential::complex(name, f))
    }

    pub fn label(&self) -> String {
        match self {
            Self::Gaussian { v0, mu_g } => format!("gaussian({v0}, {mu_g})"),
            Self::Contact1D { g, x0 } => format!("contact1d({g}, {x0})"),
            Self::Callable(c) => c.name().to_string(),
            Self::Tabulated(t) => format!("tabulated[{} points]", t.len()),
        }
    }

    /// Whether the kernel has a closed form (no quadrature or interpolation needed).
    pub fn is_analytic(&self) -> bool {
        matches!(self, Self::Gaussian { .. } | Self::Contact1D { .. })
    }

    pub fn is_complex_capable(&self) -> bool {
        match self {
            Self::Gaussian { .. } | Self::Contact1D { .. } => true,
            Self::Callable(c) => c.is_complex_capable(),
            Self::Tabulated(_) => false,
        }
    }

    /// The same potential multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Self::Gaussian { v0, mu_g } => Self::Gaussian {
                v0: v0 * factor,
                mu_g: *mu_g,
            },
            Self::Contact1D { g, x0 } => Self::Contact1D {
                g: g * factor,
                x0: *x0,
            },
            Self::Callable(c) => {
                let inner = c.clone();
                Self::Callable(CallablePotential {
                    name: format!("{factor}*({})", c.name),
                    f: Arc::new(move |z| factor * inner.call(z)),
                    complex_capable: c.complex_capable,
                })
            }
            Self::Tabulated(t) => Self::Tabulated(t.scaled(factor)),
        }
    }

    /// Value on the real axis. A contact term has no pointwise value and yields 0.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Gaussian { v0, mu_g } => v0 * (-mu_g * r * r).exp(),
            Self::Contact1D { .. } => 0.0,
            Self::Callable(c) => c.call(Complex64::new(r, 0.0)).re,
            Self::Tabulated(t) => t.eval(r),
        }
    }

    /// Value at a complex argument (analytic continuation).
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Ok(match self {
                Self::Callable(c) => c.call(z),
                _ => Complex64::new(self.eval(z.re), 0.0),
            });
        }
        match self {
            Self::Gaussian { v0, mu_g } => Ok(*v0 * (-*mu_g * z * z).exp()),
            Self::Contact1D { .. } => Ok(Complex64::new(0.0, 0.0)),
            Self::Callable(c) if c.complex_capable => Ok(c.call(z)),
            _ => Err(FewBodyError::UnsupportedComplexEvaluation(self.label())),
        }
    }

    /// The radial kernel `∫ r^l exp(-α r²) V(r e^{iθ}) dr` over the requested domain.
    pub fn kernel(&self, req: &KernelRequest) -> Result<Complex64> {
        if !(req.alpha.re > 0.0) {
            return Err(FewBodyError::InvalidParams(format!(
                "kernel requires Re(alpha) > 0, got {}",
                req.alpha
            )));
        }
        let theta = req.csm_theta.filter(|t| *t != 0.0);
        if theta.is_some() && !self.is_complex_capable() {
            return Err(FewBodyError::UnsupportedComplexEvaluation(self.label()));
        }
        let rot = theta.map_or(Complex64::new(1.0, 0.0), |t| Complex64::from_polar(1.0, t));
        match self {
            Self::Gaussian { v0, mu_g } => {
                let z = req.alpha + *mu_g * rot * rot;
                Ok(*v0
                    * match req.domain {
                        Domain::HalfLine => half_line_moment(req.l_eff, z),
                        Domain::FullLine => full_line_moment(req.l_eff, z),
                    })
            }
            Self::Contact1D { g, x0 } => {
                // δ(x e^{iθ} - x0) = e^{-iθ} δ(x - x0 e^{-iθ})
                if req.domain == Domain::HalfLine && *x0 < 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let support = *x0 / rot;
                let power = if req.l_eff == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    support.powu(req.l_eff)
                };
                Ok(*g / rot * power * (-req.alpha * support * support).exp())
            }
            _ => self.kernel_by_quadrature(req, rot, theta.is_some()),
        }
    }

    /// Quadrature route, available for every variant; used as an oracle for the closed forms.
    pub fn kernel_by_quadrature(
        &self,
        req: &KernelRequest,
        rot: Complex64,
        rotated: bool,
    ) -> Result<Complex64> {
        if matches!(self, Self::Contact1D { .. }) {
            return self.kernel(req);
        }
        let p = req.l_eff as i32;
        let alpha = req.alpha;
        let value = |x: f64| -> Complex64 {
            if rotated {
                self.eval_complex(x * rot)
                    .unwrap_or(Complex64::new(f64::NAN, 0.0))
            } else {
                Complex64::new(self.eval(x), 0.0)
            }
        };
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let integrand = |r: f64| -> Complex64 {
            let weight = r.powi(p) * (-alpha * r * r).exp();
            match req.domain {
                Domain::HalfLine => weight * value(r),
                Domain::FullLine => weight * (value(r) + sign * value(-r)),
            }
        };
        quadrature::integrate_gaussian_damped(integrand, alpha.re)
    }
}

/// Cubic-spline interpolant of a kernel over real `α`, on a log-equispaced grid.
///
/// The stored quantity is `K(α) · α^{(l+1)/2}`, which is constant for a
/// constant potential and slowly varying otherwise.
#[derive(Debug, Clone)]
pub struct AlphaInterpolant {
    l_eff: u32,
    alpha_min: f64,
    alpha_max: f64,
    re: CubicSpline,
    im: Option<CubicSpline>,
}

impl AlphaInterpolant {
    pub fn build(
        potential: &PotentialModel,
        l_eff: u32,
        domain: Domain,
        csm_theta: Option<f64>,
        alpha_min: f64,
        alpha_max: f64,
        kmax_interpol: usize,
    ) -> Result<Self> {
        if !(alpha_min > 0.0 && alpha_max > alpha_min) {
            return Err(FewBodyError::InvalidParams(format!(
                "interpolation range must satisfy 0 < alpha_min < alpha_max (got {alpha_min}, {alpha_max})"
            )));
        }
        if kmax_interpol < 4 {
            return Err(FewBodyError::InvalidParams(
                "kmax_interpol must be at least 4".into(),
            ));
        }
        let (t0, t1) = (alpha_min.ln(), alpha_max.ln());
        let knots: Vec<f64> = (0..kmax_interpol)
            .map(|k| t0 + (t1 - t0) * k as f64 / (kmax_interpol - 1) as f64)
            .collect();
        let exponent = (l_eff + 1) as f64 / 2.0;
        let values = knots
            .par_iter()
            .map(|&t| {
                let alpha = t.exp();
                let req = KernelRequest::new(l_eff, alpha, domain).with_theta(csm_theta);
                potential.kernel(&req).map(|k| k * alpha.powf(exponent))
            })
            .collect::<Result<Vec<_>>>()?;
        let re = CubicSpline::new(knots.clone(), values.iter().map(|v| v.re).collect())?;
        let im = if values.iter().any(|v| v.im != 0.0) {
            Some(CubicSpline::new(
                knots,
                values.iter().map(|v| v.im).collect(),
            )?)
        } else {
            None
        };
        Ok(Self {
            l_eff,
            alpha_min,
            alpha_max,
            re,
            im,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.alpha_min, self.alpha_max)
    }

    pub fn eval(&self, alpha: f64) -> Result<Complex64> {
        let slack = 1e-12;
        if !(alpha >= self.alpha_min * (1.0 - slack) && alpha <= self.alpha_max * (1.0 + slack)) {
            return Err(FewBodyError::OutOfRange {
                alpha,
                min: self.alpha_min,
                max: self.alpha_max,
            });
        }
        let t = alpha.ln();
        let scale = alpha.powf(-((self.l_eff + 1) as f64) / 2.0);
        let im = self.im.as_ref().map_or(0.0, |s| s.eval(t));
        Ok(Complex64::new(self.re.eval(t), im) * scale)
    }
}
