//! Two-body solver: `[-∇²/(2μ) + Σ V(r)] φ = E φ` in one, two or three
//! dimensions, at fixed angular momentum (parity in 1D, |m| in 2D, l in 3D).

mod coupled;
mod optimize;

use faer::{c64, Mat};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;

use crate::basis::{make_basis_2b, raw_kinetic, raw_overlap, BasisSet, Dim, RangeProgression};
use crate::eigensolve::{Assembled, AssembledSystem, Eigenpairs, Spectrum, DEFAULT_THRESHOLD};
use crate::error::{FewBodyError, Result};
use crate::potentials::{Domain, KernelRequest, PotentialModel};

pub use coupled::{solve_coupled_channels, CoupledChannelSpec};
pub use optimize::{
    nelder_mead, optimize_ranges, scale_potential_to_energy, scale_with_optimized_ranges,
    RangeOptimum, ScaledOptimum,
};

#[derive(Debug, Clone)]
pub struct PhysParams2B {
    /// Reduced mass μ (ħ = 1).
    pub mur: f64,
    /// Pair potentials; their sum acts between the particles.
    pub vints: Vec<PotentialModel>,
    pub dim: Dim,
    pub lmin: u32,
    pub lmax: u32,
}

impl PhysParams2B {
    pub fn new(mur: f64, vints: Vec<PotentialModel>, dim: Dim) -> Result<Self> {
        let pp = Self {
            mur,
            vints,
            dim,
            lmin: 0,
            lmax: 0,
        };
        pp.validate()?;
        Ok(pp)
    }

    pub fn with_l_window(mut self, lmin: u32, lmax: u32) -> Result<Self> {
        self.lmin = lmin;
        self.lmax = lmax;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mur > 0.0) || !self.mur.is_finite() {
            return Err(FewBodyError::InvalidParams(format!(
                "reduced mass must be positive, got {}",
                self.mur
            )));
        }
        if self.lmin > self.lmax {
            return Err(FewBodyError::InvalidParams(format!(
                "lmin {} exceeds lmax {}",
                self.lmin, self.lmax
            )));
        }
        if self.dim == Dim::One && self.lmax > 1 {
            return Err(FewBodyError::InvalidParams(
                "1D parity index must be 0 or 1".into(),
            ));
        }
        if self
            .vints
            .iter()
            .any(|v| matches!(v, PotentialModel::Contact1D { .. }))
            && self.dim != Dim::One
        {
            return Err(FewBodyError::InvalidParams(
                "contact potentials are one-dimensional".into(),
            ));
        }
        Ok(())
    }

    /// Same system with every potential multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            vints: self.vints.iter().map(|v| v.scaled(factor)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct NumParams2B {
    pub gem: RangeProgression,
    pub omega_cr: f64,
    /// Complex scaling angle in degrees.
    pub theta_csm: f64,
    pub threshold: f64,
}

impl NumParams2B {
    pub fn new(gem: RangeProgression) -> Self {
        Self {
            gem,
            omega_cr: 0.0,
            theta_csm: 0.0,
            threshold: DEFAULT_THRESHOLD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..45.0).contains(&self.theta_csm) {
            return Err(FewBodyError::InvalidParams(format!(
                "theta_csm must lie in [0, 45) degrees, got {}",
                self.theta_csm
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(FewBodyError::InvalidParams(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if !(self.omega_cr >= 0.0) {
            return Err(FewBodyError::InvalidParams(
                "omega_cr must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn with_gem(&self, nmax: usize, r1: f64, rnmax: f64) -> Result<Self> {
        Ok(Self {
            gem: RangeProgression::new(nmax, r1, rnmax)?,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveFlags {
    pub wf: bool,
    pub cr: bool,
    pub csm: bool,
}

/// Spectrum of one angular-momentum channel.
#[derive(Debug, Clone)]
pub struct ChannelSpectrum {
    pub l: u32,
    pub spectrum: Eigenpairs,
}

/// Kernel domain, power and angular factor for a potential element at angular momentum `l`.
pub(crate) fn kernel_layout(dim: Dim, l: u32) -> (Domain, u32, f64) {
    match dim {
        Dim::One => (Domain::FullLine, 2 * l, 1.0),
        Dim::Two => (
            Domain::HalfLine,
            dim.radial_power(l),
            2.0 * std::f64::consts::PI,
        ),
        Dim::Three => (Domain::HalfLine, dim.radial_power(l), 1.0),
    }
}

pub(crate) fn alpha_key(z: Complex64) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

/// Kernels of one potential at every distinct `a + b` occurring in the basis.
pub(crate) fn kernel_table(
    potential: &PotentialModel,
    basis: &BasisSet,
    layout: (Domain, u32, f64),
    theta: Option<f64>,
) -> Result<HashMap<(u64, u64), Complex64>> {
    let mut alphas: Vec<Complex64> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, fi) in basis.functions.iter().enumerate() {
        for fj in &basis.functions[i..] {
            for (_, a) in fi.terms() {
                for (_, b) in fj.terms() {
                    let s = a + b;
                    if seen.insert(alpha_key(s)) {
                        alphas.push(s);
                    }
                }
            }
        }
    }
    let (domain, l_eff, measure) = layout;
    let values = alphas
        .par_iter()
        .map(|&alpha| {
            let req = KernelRequest::new(l_eff, 0.0, domain)
                .with_alpha(alpha)
                .with_theta(theta);
            potential
                .kernel(&req)
                .map(|k| (alpha_key(alpha), measure * k))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values.into_iter().collect())
}

/// Hamiltonian and overlap for an explicit basis at angular momentum `l`.
///
/// `theta` is the complex scaling angle in radians; `None` gives a real system.
pub fn assemble_with_basis(
    pp: &PhysParams2B,
    basis: &BasisSet,
    l: u32,
    theta: Option<f64>,
) -> Result<Assembled> {
    pp.validate()?;
    let theta = theta.filter(|t| *t != 0.0);
    if theta.is_some() {
        if let Some(v) = pp.vints.iter().find(|v| !v.is_complex_capable()) {
            return Err(FewBodyError::UnsupportedComplexEvaluation(v.label()));
        }
    }
    let layout = kernel_layout(pp.dim, l);
    let tables = pp
        .vints
        .iter()
        .map(|v| kernel_table(v, basis, layout, theta))
        .collect::<Result<Vec<_>>>()?;

    let n = basis.len();
    let kin_phase = theta.map_or(c64::new(1.0, 0.0), |t| c64::from_polar(1.0, -2.0 * t));
    let (dim, mur) = (pp.dim, pp.mur);
    let rows: Vec<Vec<(f64, c64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let fi = &basis.functions[i];
            (i..n)
                .map(|j| {
                    let fj = &basis.functions[j];
                    let s = fi.pair_sum(fj, |a, b| raw_overlap(a, b, l, dim)).re;
                    let mut h = kin_phase * fi.pair_sum(fj, |a, b| raw_kinetic(a, b, l, dim, mur));
                    for table in &tables {
                        h += fi.pair_sum(fj, |a, b| table[&alpha_key(a + b)]);
                    }
                    (s, h)
                })
                .collect()
        })
        .collect();

    let mut s = Mat::<f64>::zeros(n, n);
    let mut h = Mat::<c64>::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (k, (sv, hv)) in row.into_iter().enumerate() {
            let j = i + k;
            s[(i, j)] = sv;
            s[(j, i)] = sv;
            h[(i, j)] = hv;
            h[(j, i)] = hv;
        }
    }
    Ok(match theta {
        None => Assembled::Real(AssembledSystem {
            h: Mat::from_fn(n, n, |i, j| h[(i, j)].re),
            s,
        }),
        Some(_) => Assembled::Complex(AssembledSystem { h, s }),
    })
}

pub fn build_basis(pp: &PhysParams2B, np: &NumParams2B, l: u32, cr: bool) -> Result<BasisSet> {
    make_basis_2b(&np.gem, l, pp.dim, cr, np.omega_cr)
}

pub fn assemble_2b(
    pp: &PhysParams2B,
    np: &NumParams2B,
    l: u32,
    flags: SolveFlags,
) -> Result<Assembled> {
    np.validate()?;
    let basis = build_basis(pp, np, l, flags.cr)?;
    let theta = flags.csm.then(|| np.theta_csm.to_radians());
    assemble_with_basis(pp, &basis, l, theta)
}

/// Spectra for every angular momentum in `[lmin, lmax]`.
pub fn solve_2b(
    pp: &PhysParams2B,
    np: &NumParams2B,
    flags: SolveFlags,
) -> Result<Vec<ChannelSpectrum>> {
    (pp.lmin..=pp.lmax)
        .map(|l| {
            let sys = assemble_2b(pp, np, l, flags)?;
            Ok(ChannelSpectrum {
                l,
                spectrum: sys.solve(np.threshold, flags.wf)?,
            })
        })
        .collect()
}

/// Real spectrum of a single channel (no complex scaling).
pub fn solve_channel(
    pp: &PhysParams2B,
    np: &NumParams2B,
    l: u32,
    cr: bool,
    wf: bool,
) -> Result<Spectrum<f64>> {
    match assemble_2b(pp, np, l, SolveFlags { wf, cr, csm: false })? {
        Assembled::Real(sys) => sys.solve(np.threshold, wf),
        Assembled::Complex(_) => unreachable!("complex system without complex scaling"),
    }
}

/// Real energies of the lowest channel `l = lmin`.
pub fn energies(pp: &PhysParams2B, np: &NumParams2B) -> Result<Vec<f64>> {
    Ok(solve_channel(pp, np, pp.lmin, false, false)?.energies)
}

/// `ψ(r) = Σ c_α φ_α(r)` at each grid point; signed coordinate in 1D, radial part otherwise.
pub fn wavefunction_on_grid(
    r_grid: &[f64],
    pp: &PhysParams2B,
    np: &NumParams2B,
    l: u32,
    coeffs: &[f64],
    cr: bool,
) -> Result<Vec<f64>> {
    let basis = build_basis(pp, np, l, cr)?;
    if coeffs.len() != basis.len() {
        return Err(FewBodyError::ShapeMismatch {
            expected: basis.len(),
            got: coeffs.len(),
        });
    }
    Ok(r_grid
        .iter()
        .map(|&r| {
            basis
                .functions
                .iter()
                .zip(coeffs)
                .map(|(f, c)| c * f.eval(r))
                .sum()
        })
        .collect())
}

/// Complex-coefficient variant of [`wavefunction_on_grid`] for complex-scaled states.
pub fn wavefunction_on_grid_complex(
    r_grid: &[f64],
    pp: &PhysParams2B,
    np: &NumParams2B,
    l: u32,
    coeffs: &[c64],
    cr: bool,
) -> Result<Vec<c64>> {
    let basis = build_basis(pp, np, l, cr)?;
    if coeffs.len() != basis.len() {
        return Err(FewBodyError::ShapeMismatch {
            expected: basis.len(),
            got: coeffs.len(),
        });
    }
    Ok(r_grid
        .iter()
        .map(|&r| {
            basis
                .functions
                .iter()
                .zip(coeffs)
                .map(|(f, c)| c * f.eval(r))
                .sum()
        })
        .collect())
}

/// Window for picking resonances out of a complex-rotated spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceFilter {
    /// Angular inset from the real axis and from the rotated continuum, in degrees.
    pub delta_arg_deg: f64,
    pub min_abs: f64,
    pub max_abs: f64,
}

impl Default for ResonanceFilter {
    fn default() -> Self {
        Self {
            delta_arg_deg: 5.0,
            min_abs: 0.0,
            max_abs: f64::INFINITY,
        }
    }
}

impl ResonanceFilter {
    /// Keeps `E` with `Im E < 0` and `arg E ∈ (-2θ + δ, -δ)` inside the modulus window.
    pub fn accepts(&self, e: c64, theta_deg: f64) -> bool {
        let arg = e.arg().to_degrees();
        e.im < 0.0
            && arg > -2.0 * theta_deg + self.delta_arg_deg
            && arg < -self.delta_arg_deg
            && e.norm() >= self.min_abs
            && e.norm() <= self.max_abs
    }
}

#[derive(Debug, Clone)]
pub struct CsmResult {
    pub l: u32,
    pub spectrum: Spectrum<c64>,
    /// Filtered resonance candidates, ordered by distance from the real axis.
    pub resonances: Vec<c64>,
}

/// Complex-scaled spectrum at `theta_deg` for the lowest channel, plus filtered resonances.
pub fn csm_resonances(
    pp: &PhysParams2B,
    np: &NumParams2B,
    theta_deg: f64,
    filter: ResonanceFilter,
) -> Result<CsmResult> {
    let np = NumParams2B {
        theta_csm: theta_deg,
        ..np.clone()
    };
    let l = pp.lmin;
    let spectrum = match assemble_2b(
        pp,
        &np,
        l,
        SolveFlags {
            wf: false,
            cr: false,
            csm: true,
        },
    )? {
        Assembled::Complex(sys) => sys.solve(np.threshold, false)?,
        Assembled::Real(sys) => {
            let s = sys.solve(np.threshold, false)?;
            Spectrum {
                energies: s.energies.iter().map(|&e| c64::new(e, 0.0)).collect(),
                vectors: None,
                kept_dim: s.kept_dim,
            }
        }
    };
    let mut resonances: Vec<c64> = spectrum
        .energies
        .iter()
        .copied()
        .filter(|&e| filter.accepts(e, theta_deg))
        .collect();
    resonances.sort_by(|a, b| b.arg().total_cmp(&a.arg()));
    Ok(CsmResult {
        l,
        spectrum,
        resonances,
    })
}
