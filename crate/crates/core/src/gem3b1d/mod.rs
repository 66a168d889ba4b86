//! Three particles on a line with pairwise interactions.
//!
//! The wave function is a sum of Faddeev components, one per interacting
//! pair, each expanded in products `x^l e^{-ν x²} · X^L e^{-λ X²}` of the pair
//! coordinate and the spectator coordinate, with `l, L ∈ {0, 1}` the parity
//! of each factor. Identical particles are handled by symmetrizing the
//! components, which also merges equivalent Faddeev sets.

use crate::eigensolve::{Assembled, Eigenpairs, DEFAULT_THRESHOLD};
use crate::error::{FewBodyError, Result};
use crate::potentials::PotentialModel;
use crate::threebody::{
    active_sets, analyze_symmetry, jacobi_frames, ChannelKey, Prepared, Statistics,
};

pub use crate::threebody::{GemParams3B, JacobiFrame};

/// Default number of knots for α-interpolated kernels.
pub const DEFAULT_KMAX_INTERPOL: usize = 1000;

#[derive(Debug, Clone)]
pub struct PhysParams3B1D {
    pub masses: [f64; 3],
    /// Particle labels: equal `"b"` or `"f"` labels mark identical bosons or fermions.
    pub svals: [String; 3],
    /// Potentials of the pairs (23), (31), (12), functions of `s_2 - s_3`,
    /// `s_3 - s_1` and `s_1 - s_2` respectively.
    pub vints: [Vec<PotentialModel>; 3],
    /// Total parity `±1`, or `0` when it is not conserved.
    pub parity: i8,
}

impl PhysParams3B1D {
    pub fn new(
        masses: [f64; 3],
        svals: [&str; 3],
        vints: [Vec<PotentialModel>; 3],
    ) -> Result<Self> {
        let pp = Self {
            masses,
            svals: svals.map(String::from),
            vints,
            parity: 1,
        };
        pp.validate()?;
        Ok(pp)
    }

    pub fn with_parity(mut self, parity: i8) -> Result<Self> {
        self.parity = parity;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        jacobi_frames(self.masses)?;
        if !matches!(self.parity, -1..=1) {
            return Err(FewBodyError::InvalidParams(format!(
                "parity must be -1, 0 or 1, got {}",
                self.parity
            )));
        }
        analyze_symmetry(&self.svals, self.masses, &self.vints)?;
        active_sets(&self.vints)?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NumParams3B1D {
    pub gem: GemParams3B,
    pub lmin: u32,
    pub lmax: u32,
    pub big_lmin: u32,
    pub big_lmax: u32,
    pub threshold: f64,
    pub kmax_interpol: usize,
    /// Complex scaling angle in degrees.
    pub theta_csm: f64,
}

impl NumParams3B1D {
    pub fn new(gem: GemParams3B) -> Self {
        Self {
            gem,
            lmin: 0,
            lmax: 0,
            big_lmin: 0,
            big_lmax: 0,
            threshold: DEFAULT_THRESHOLD,
            kmax_interpol: DEFAULT_KMAX_INTERPOL,
            theta_csm: 0.0,
        }
    }

    pub fn with_parity_waves(
        mut self,
        lmin: u32,
        lmax: u32,
        big_lmin: u32,
        big_lmax: u32,
    ) -> Result<Self> {
        (self.lmin, self.lmax, self.big_lmin, self.big_lmax) = (lmin, lmax, big_lmin, big_lmax);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lmax > 1
            || self.big_lmax > 1
            || self.lmin > self.lmax
            || self.big_lmin > self.big_lmax
        {
            return Err(FewBodyError::InvalidParams(format!(
                "parity-wave bounds must satisfy min ≤ max within {{0, 1}} (l: {}..{}, L: {}..{})",
                self.lmin, self.lmax, self.big_lmin, self.big_lmax
            )));
        }
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

/// Faddeev set (1-based) with the parities of its pair and spectator factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Channel1D {
    pub set: usize,
    pub l: u32,
    pub big_l: u32,
    /// Number of equivalent Faddeev sets merged into this one by symmetrization.
    pub weight: usize,
}

pub fn enumerate_channels_1d(pp: &PhysParams3B1D, np: &NumParams3B1D) -> Result<Vec<Channel1D>> {
    pp.validate()?;
    np.validate()?;
    let sym = analyze_symmetry(&pp.svals, pp.masses, &pp.vints)?;
    let mut out = Vec::new();
    for (set, weight) in sym.representatives(&active_sets(&pp.vints)?) {
        let exchange = sym.identical_pair(set);
        for l in np.lmin..=np.lmax {
            match exchange {
                Some(Statistics::Boson) if l % 2 == 1 => continue,
                Some(Statistics::Fermion) if l % 2 == 0 => continue,
                _ => {}
            }
            for big_l in np.big_lmin..=np.big_lmax {
                let parity = if (l + big_l) % 2 == 0 { 1 } else { -1 };
                if pp.parity != 0 && parity != pp.parity {
                    continue;
                }
                out.push(Channel1D {
                    set: set + 1,
                    l,
                    big_l,
                    weight,
                });
            }
        }
    }
    if out.is_empty() {
        return Err(FewBodyError::InvalidBasis(
            "no channel satisfies the parity and exchange constraints; raise lmax or Lmax".into(),
        ));
    }
    Ok(out)
}

/// Assembled matrices with the channel of every basis function.
#[derive(Debug, Clone)]
pub struct Assembly3B1D {
    pub system: Assembled,
    pub channels: Vec<Channel1D>,
    /// Index into `channels` for each basis function.
    pub function_channel: Vec<usize>,
}

pub(crate) fn prepare(
    pp: &PhysParams3B1D,
    np: &NumParams3B1D,
    csm: bool,
) -> Result<(Prepared, Vec<Channel1D>)> {
    let channels = enumerate_channels_1d(pp, np)?;
    let keys: Vec<ChannelKey> = channels
        .iter()
        .map(|c| ChannelKey {
            set: c.set - 1,
            l: c.l,
            big_l: c.big_l,
        })
        .collect();
    let sym = analyze_symmetry(&pp.svals, pp.masses, &pp.vints)?;
    let theta = csm.then(|| np.theta_csm.to_radians());
    let prepared = Prepared::new(
        jacobi_frames(pp.masses)?,
        &sym,
        &keys,
        &np.gem,
        1,
        theta,
        np.kmax_interpol,
    )?;
    Ok((prepared, channels))
}

/// Hamiltonian and overlap over all channels; complex-symmetric when `csm` is set.
pub fn assemble_3b1d(pp: &PhysParams3B1D, np: &NumParams3B1D, csm: bool) -> Result<Assembly3B1D> {
    let (prepared, channels) = prepare(pp, np, csm)?;
    let system = prepared.assemble(&pp.vints)?;
    Ok(Assembly3B1D {
        system,
        channels,
        function_channel: prepared.function_channels(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags3B {
    pub wf: bool,
    pub csm: bool,
}

pub fn solve_3b1d(pp: &PhysParams3B1D, np: &NumParams3B1D, flags: Flags3B) -> Result<Eigenpairs> {
    assemble_3b1d(pp, np, flags.csm)?
        .system
        .solve(np.threshold, flags.wf)
}

/// Ascending bound-state energies (no complex scaling).
pub fn energies_3b1d(pp: &PhysParams3B1D, np: &NumParams3B1D) -> Result<Vec<f64>> {
    match solve_3b1d(pp, np, Flags3B::default())? {
        Eigenpairs::Real(s) => Ok(s.energies),
        Eigenpairs::Complex(_) => unreachable!("complex spectrum without complex scaling"),
    }
}
