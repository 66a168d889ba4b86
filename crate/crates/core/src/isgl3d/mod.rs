//! Three particles in 3D with central pair potentials, total angular momentum zero.
//!
//! Each interacting pair contributes a Faddeev component spanned by s-wave
//! products `e^{-ν r²} e^{-λ R²}` in its own Jacobi set. Components on
//! different sets overlap through the rearrangement between sets, which also
//! carries the angular correlation of the state.

use faer::Mat;

use crate::eigensolve::{Assembled, Eigenpairs, DEFAULT_THRESHOLD};
use crate::error::{FewBodyError, Result};
use crate::potentials::PotentialModel;
use crate::threebody::{
    active_sets, analyze_symmetry, gaussian_weight, jacobi_frames, ChannelKey, PairTerm, Prepared,
    Statistics,
};

pub use crate::gem3b1d::DEFAULT_KMAX_INTERPOL;
pub use crate::threebody::GemParams3B;

#[derive(Debug, Clone)]
pub struct PhysParams3B3D {
    pub masses: [f64; 3],
    pub svals: [String; 3],
    /// Potentials of the pairs (23), (31), (12) as functions of the pair distance.
    pub vints: [Vec<PotentialModel>; 3],
}

impl PhysParams3B3D {
    pub fn new(
        masses: [f64; 3],
        svals: [&str; 3],
        vints: [Vec<PotentialModel>; 3],
    ) -> Result<Self> {
        let pp = Self {
            masses,
            svals: svals.map(String::from),
            vints,
        };
        pp.validate()?;
        Ok(pp)
    }

    pub fn validate(&self) -> Result<()> {
        jacobi_frames(self.masses)?;
        for v in self.vints.iter().flatten() {
            check_central(v)?;
        }
        analyze_symmetry(&self.svals, self.masses, &self.vints)?;
        active_sets(&self.vints)?;
        Ok(())
    }
}

fn check_central(v: &PotentialModel) -> Result<()> {
    if matches!(v, PotentialModel::Contact1D { .. }) {
        return Err(FewBodyError::NonCentralPotential(format!(
            "{} acts on a signed 1D coordinate",
            v.label()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct NumParams3B3D {
    pub gem: GemParams3B,
    pub threshold: f64,
    pub kmax_interpol: usize,
    /// Complex scaling angle in degrees.
    pub theta_csm: f64,
}

impl NumParams3B3D {
    pub fn new(gem: GemParams3B) -> Self {
        Self {
            gem,
            threshold: DEFAULT_THRESHOLD,
            kmax_interpol: DEFAULT_KMAX_INTERPOL,
            theta_csm: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(FewBodyError::InvalidParams(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if self.kmax_interpol < 4 {
            return Err(FewBodyError::InvalidParams(
                "kmax_interpol must be at least 4".into(),
            ));
        }
        if !(0.0..45.0).contains(&self.theta_csm) {
            return Err(FewBodyError::InvalidParams(format!(
                "theta_csm must lie in [0, 45) degrees, got {}",
                self.theta_csm
            )));
        }
        Ok(())
    }
}

/// Mean values to evaluate on selected eigenstates.
#[derive(Debug, Clone, Default)]
pub struct ObservRequest {
    /// 1-based state indices.
    pub stateindices: Vec<usize>,
    /// Central observables `O(r_i)` of the pair distance of each Jacobi set.
    pub centobs: [Vec<PotentialModel>; 3],
    /// Whether `⟨R_i²⟩` is wanted for each Jacobi set.
    pub r2_flags: [bool; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateObservables {
    pub stateindex: usize,
    pub energy: f64,
    /// `⟨O(r_i)⟩` in the order of [`ObservRequest::centobs`].
    pub central: [Vec<f64>; 3],
    pub r2: [Option<f64>; 3],
}

#[derive(Debug, Clone)]
pub struct Solution3B3D {
    pub spectrum: Eigenpairs,
    /// Number of symmetrized basis functions before overlap truncation.
    pub basis_size: usize,
    pub observables: Vec<StateObservables>,
}

/// Faddeev set (1-based) kept after symmetry reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Channel3D {
    pub set: usize,
    /// Number of equivalent Faddeev sets merged into this one.
    pub weight: usize,
}

pub fn enumerate_channels_3d(pp: &PhysParams3B3D) -> Result<Vec<Channel3D>> {
    pp.validate()?;
    let sym = analyze_symmetry(&pp.svals, pp.masses, &pp.vints)?;
    let out: Vec<Channel3D> = sym
        .representatives(&active_sets(&pp.vints)?)
        .into_iter()
        .filter(|&(set, _)| sym.identical_pair(set) != Some(Statistics::Fermion))
        .map(|(set, weight)| Channel3D {
            set: set + 1,
            weight,
        })
        .collect();
    if out.is_empty() {
        return Err(FewBodyError::InvalidBasis(
            "s-wave components vanish for every interacting fermion pair".into(),
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Assembly3B3D {
    pub system: Assembled,
    pub channels: Vec<Channel3D>,
    /// Index into `channels` for each basis function.
    pub function_channel: Vec<usize>,
}

fn prepare(
    pp: &PhysParams3B3D,
    np: &NumParams3B3D,
    csm: bool,
) -> Result<(Prepared, Vec<Channel3D>)> {
    np.validate()?;
    let channels = enumerate_channels_3d(pp)?;
    let keys: Vec<ChannelKey> = channels
        .iter()
        .map(|c| ChannelKey {
            set: c.set - 1,
            l: 0,
            big_l: 0,
        })
        .collect();
    let sym = analyze_symmetry(&pp.svals, pp.masses, &pp.vints)?;
    let theta = csm.then(|| np.theta_csm.to_radians());
    let prepared = Prepared::new(
        jacobi_frames(pp.masses)?,
        &sym,
        &keys,
        &np.gem,
        3,
        theta,
        np.kmax_interpol,
    )?;
    Ok((prepared, channels))
}

pub fn assemble_3b3d(pp: &PhysParams3B3D, np: &NumParams3B3D, csm: bool) -> Result<Assembly3B3D> {
    let (prepared, channels) = prepare(pp, np, csm)?;
    let system = prepared.assemble(&pp.vints)?;
    Ok(Assembly3B3D {
        system,
        channels,
        function_channel: prepared.function_channels(),
    })
}

pub fn solve_3b3d(
    pp: &PhysParams3B3D,
    np: &NumParams3B3D,
    observ: Option<&ObservRequest>,
    want_wf: bool,
    csm: bool,
) -> Result<Solution3B3D> {
    if csm && observ.is_some() {
        return Err(FewBodyError::InvalidParams(
            "observables are evaluated on real bound states only".into(),
        ));
    }
    if let Some(req) = observ {
        for v in req.centobs.iter().flatten() {
            check_central(v)?;
        }
    }
    let (prepared, _) = prepare(pp, np, csm)?;
    let system = prepared.assemble(&pp.vints)?;
    let spectrum = system.solve(np.threshold, want_wf || observ.is_some())?;
    let observables = match (observ, &spectrum) {
        (Some(req), Eigenpairs::Real(spec)) => {
            let matrices = ObservableMatrices::new(&prepared, req)?;
            req.stateindices
                .iter()
                .map(|&k| {
                    let c = spec.vector(k)?;
                    Ok(StateObservables {
                        stateindex: k,
                        energy: spec.energy(k)?,
                        central: std::array::from_fn(|set| {
                            matrices.central[set]
                                .iter()
                                .map(|m| mean_value(&c, m, system.overlap()))
                                .collect()
                        }),
                        r2: std::array::from_fn(|set| {
                            matrices.r2[set]
                                .as_ref()
                                .map(|m| mean_value(&c, m, system.overlap()))
                        }),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => Vec::new(),
    };
    Ok(Solution3B3D {
        spectrum,
        basis_size: system.dim(),
        observables,
    })
}

/// Ascending bound-state energies.
pub fn energies_3b3d(pp: &PhysParams3B3D, np: &NumParams3B3D) -> Result<Vec<f64>> {
    match solve_3b3d(pp, np, None, false, false)?.spectrum {
        Eigenpairs::Real(s) => Ok(s.energies),
        Eigenpairs::Complex(_) => unreachable!("complex spectrum without complex scaling"),
    }
}

struct ObservableMatrices {
    central: [Vec<Mat<f64>>; 3],
    r2: [Option<Mat<f64>>; 3],
}

impl ObservableMatrices {
    fn new(prepared: &Prepared, req: &ObservRequest) -> Result<Self> {
        let engine = prepared.engine();
        let mut central: [Vec<Mat<f64>>; 3] = Default::default();
        let mut r2: [Option<Mat<f64>>; 3] = Default::default();
        for set in 0..3 {
            for o in &req.centobs[set] {
                central[set].push(central_matrix(prepared, set, o)?);
            }
            if req.r2_flags[set] {
                r2[set] = Some(prepared.orbit_average(set, |k| engine.spectator_r2_matrix(k))?);
            }
        }
        Ok(Self { central, r2 })
    }
}

fn central_matrix(
    prepared: &Prepared,
    set: usize,
    observable: &PotentialModel,
) -> Result<Mat<f64>> {
    let engine = prepared.engine();
    prepared.orbit_average(set, |k| {
        engine.pair_matrix(&PairTerm {
            set: k,
            source: engine.kernel_source(observable, k)?,
        })
    })
}

/// `cᵀ O c / cᵀ S c`.
fn mean_value(c: &[f64], o: &Mat<f64>, s: &Mat<f64>) -> f64 {
    let form = |m: &Mat<f64>| -> f64 {
        (0..c.len())
            .map(|i| c[i] * (0..c.len()).map(|j| m[(i, j)] * c[j]).sum::<f64>())
            .sum()
    };
    form(o) / form(s)
}

/// `∬ exp(-a r² - b R² - c r·R) d³r d³R`, the kernel of every rearrangement overlap.
pub fn correlated_gaussian_integral(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a * b > 0.25 * c * c) {
        return Err(FewBodyError::InvalidParams(format!(
            "exponent is not positive definite (a={a}, b={b}, c={c})"
        )));
    }
    Ok(gaussian_weight(&[[a, 0.5 * c], [0.5 * c, b]]).powi(3))
}

fn check_coefficients(coeffs: &[f64], prepared: &Prepared, set: usize) -> Result<usize> {
    if !(1..=3).contains(&set) {
        return Err(FewBodyError::InvalidIndex {
            index: set,
            available: 3,
        });
    }
    if coeffs.len() != prepared.functions.len() {
        return Err(FewBodyError::ShapeMismatch {
            expected: prepared.functions.len(),
            got: coeffs.len(),
        });
    }
    Ok(set - 1)
}

/// `⟨R²⟩` of the spectator of Jacobi set `set` (1-based) for a coefficient vector.
pub fn mean_r2(coeffs: &[f64], set: usize, pp: &PhysParams3B3D, np: &NumParams3B3D) -> Result<f64> {
    let (prepared, _) = prepare(pp, np, false)?;
    let set = check_coefficients(coeffs, &prepared, set)?;
    let m = prepared.orbit_average(set, |k| prepared.engine().spectator_r2_matrix(k))?;
    let s = prepared.engine().overlap_matrix()?;
    Ok(mean_value(coeffs, &m, &s))
}

/// `⟨O(r)⟩` for the pair distance of Jacobi set `set` (1-based).
pub fn mean_central(
    coeffs: &[f64],
    set: usize,
    observable: &PotentialModel,
    pp: &PhysParams3B3D,
    np: &NumParams3B3D,
) -> Result<f64> {
    check_central(observable)?;
    let (prepared, _) = prepare(pp, np, false)?;
    let set = check_coefficients(coeffs, &prepared, set)?;
    let m = central_matrix(&prepared, set, observable)?;
    Ok(mean_value(coeffs, &m, &prepared.engine().overlap_matrix()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> PotentialModel {
        PotentialModel::gaussian(-1.0, 1.0).unwrap()
    }

    #[test]
    fn channels_reduce_for_identical_particles() {
        let pp = PhysParams3B3D::new([1.0; 3], ["b", "b", "z"], [vec![g()], vec![g()], vec![g()]])
            .unwrap();
        assert_eq!(
            enumerate_channels_3d(&pp).unwrap(),
            vec![
                Channel3D { set: 1, weight: 2 },
                Channel3D { set: 3, weight: 1 }
            ]
        );
        let pp = PhysParams3B3D::new([1.0; 3], ["f", "f", "z"], [vec![g()], vec![g()], vec![g()]])
            .unwrap();
        assert_eq!(
            enumerate_channels_3d(&pp).unwrap(),
            vec![Channel3D { set: 1, weight: 2 }]
        );
    }

    #[test]
    fn contact_potential_is_not_central() {
        let err = PhysParams3B3D::new(
            [1.0; 3],
            ["x", "y", "z"],
            [vec![PotentialModel::contact_1d(-1.0, 0.0)], vec![], vec![]],
        )
        .unwrap_err();
        assert!(matches!(err, FewBodyError::NonCentralPotential(_)));
    }

    #[test]
    fn single_function_spectator_moment() {
        // one Gaussian e^{-λR²}: ⟨R²⟩ = 3/(4λ)
        let pp = PhysParams3B3D::new(
            [1.0, 2.0, 3.0],
            ["x", "y", "z"],
            [vec![g()], vec![], vec![]],
        )
        .unwrap();
        let np = NumParams3B3D::new(GemParams3B::new(2, 0.5, 1.0, 2, 0.7, 1.4).unwrap());
        let lam = np.gem.big_r.ranges();
        for k in 0..2 {
            let mut c = vec![0.0; 4];
            c[k] = 1.0;
            let r2 = mean_r2(&c, 1, &pp, &np).unwrap();
            assert!((r2 - 0.75 / lam[k]).abs() < 1e-12 * r2, "{r2}");
        }
    }
}
