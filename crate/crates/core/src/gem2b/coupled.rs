use faer::Mat;
use rayon::prelude::*;

use super::{alpha_key, kernel_layout, kernel_table, NumParams2B};
use crate::basis::{make_basis_2b, raw_kinetic, raw_overlap, Dim};
use crate::eigensolve::{AssembledSystem, Spectrum};
use crate::error::{FewBodyError, Result};
use crate::potentials::PotentialModel;

/// Multichannel two-body Hamiltonian
/// `H_ij = δ_ij T_i + W_ij(r) + P_ij(r) d/dr` over a shared Gaussian basis.
///
/// `potentials` lists `W` once per unordered channel pair (diagonal included);
/// the transposed entry is implied. `derivative` lists `P` for `i ≠ j` once per
/// pair with `P_ji = -P_ij` implied. The derivative term enters in the
/// anti-Hermitian symmetrized form `(P d/dr + d/dr P) / 2`.
#[derive(Debug, Clone)]
pub struct CoupledChannelSpec {
    pub dim: Dim,
    pub l: u32,
    /// Reduced mass of each channel; the length fixes the channel count.
    pub mur: Vec<f64>,
    pub potentials: Vec<(usize, usize, PotentialModel)>,
    pub derivative: Vec<(usize, usize, PotentialModel)>,
}

impl CoupledChannelSpec {
    pub fn nch(&self) -> usize {
        self.mur.len()
    }

    pub fn validate(&self) -> Result<()> {
        let nch = self.nch();
        if nch == 0 {
            return Err(FewBodyError::InvalidParams(
                "at least one channel is required".into(),
            ));
        }
        if let Some(m) = self.mur.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(FewBodyError::InvalidParams(format!(
                "reduced mass must be positive, got {m}"
            )));
        }
        if self.dim == Dim::One && self.l > 1 {
            return Err(FewBodyError::InvalidParams(
                "1D parity index must be 0 or 1".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for (i, j, _) in &self.potentials {
            if *i >= nch || *j >= nch {
                return Err(FewBodyError::InvalidIndex {
                    index: (*i).max(*j),
                    available: nch,
                });
            }
            if !seen.insert((*i.min(j), *i.max(j))) {
                return Err(FewBodyError::InvalidParams(format!(
                    "coupling W({i},{j}) given twice; W is symmetric, list each pair once"
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (i, j, _) in &self.derivative {
            if *i >= nch || *j >= nch {
                return Err(FewBodyError::InvalidIndex {
                    index: (*i).max(*j),
                    available: nch,
                });
            }
            if i == j {
                return Err(FewBodyError::InvalidParams(format!(
                    "derivative coupling P({i},{i}) must vanish by antisymmetry"
                )));
            }
            if !seen.insert((*i.min(j), *i.max(j))) {
                return Err(FewBodyError::InvalidParams(format!(
                    "derivative coupling P({i},{j}) given twice; list each pair once"
                )));
            }
        }
        Ok(())
    }
}

/// Spectrum of the coupled-channel Hamiltonian on the product basis
/// (channel-major, `np.gem` Gaussians per channel).
pub fn solve_coupled_channels(cc: &CoupledChannelSpec, np: &NumParams2B) -> Result<Spectrum<f64>> {
    cc.validate()?;
    np.validate()?;
    let (l, dim) = (cc.l, cc.dim);
    let basis = make_basis_2b(&np.gem, l, dim, false, 0.0)?;
    let nb = basis.len();
    let layout = kernel_layout(dim, l);
    let deriv_layout = (layout.0, layout.1 + 1, layout.2);

    let mut s = Mat::<f64>::zeros(cc.nch() * nb, cc.nch() * nb);
    let mut h = Mat::<f64>::zeros(cc.nch() * nb, cc.nch() * nb);

    let block_s: Vec<f64> = (0..nb * nb)
        .map(|k| {
            let (a, b) = (&basis.functions[k / nb], &basis.functions[k % nb]);
            a.pair_sum(b, |x, y| raw_overlap(x, y, l, dim)).re
        })
        .collect();
    for (ch, &mu) in cc.mur.iter().enumerate() {
        let off = ch * nb;
        for a in 0..nb {
            for b in 0..nb {
                let (fa, fb) = (&basis.functions[a], &basis.functions[b]);
                s[(off + a, off + b)] = block_s[a * nb + b];
                h[(off + a, off + b)] += fa.pair_sum(fb, |x, y| raw_kinetic(x, y, l, dim, mu)).re;
            }
        }
    }

    let mut add_block = |i: usize, j: usize, block: &[f64]| {
        for a in 0..nb {
            for b in 0..nb {
                let v = block[a * nb + b];
                h[(i * nb + a, j * nb + b)] += v;
                if i != j {
                    h[(j * nb + b, i * nb + a)] += v;
                }
            }
        }
    };

    for (i, j, w) in &cc.potentials {
        let table = kernel_table(w, &basis, layout, None)?;
        let block: Vec<f64> = (0..nb * nb)
            .into_par_iter()
            .map(|k| {
                let (fa, fb) = (&basis.functions[k / nb], &basis.functions[k % nb]);
                fa.pair_sum(fb, |x, y| table[&alpha_key(x + y)]).re
            })
            .collect();
        add_block(*i, *j, &block);
    }

    // <a| (P d/dr + d/dr P)/2 |b> = (ν_a - ν_b) <a| r P |b>.
    for (i, j, p) in &cc.derivative {
        let table = kernel_table(p, &basis, deriv_layout, None)?;
        let block: Vec<f64> = (0..nb * nb)
            .into_par_iter()
            .map(|k| {
                let (fa, fb) = (&basis.functions[k / nb], &basis.functions[k % nb]);
                (fa.nu - fb.nu) * fa.pair_sum(fb, |x, y| table[&alpha_key(x + y)]).re
            })
            .collect();
        add_block(*i, *j, &block);
    }

    AssembledSystem { h, s }.solve(np.threshold, false)
}
