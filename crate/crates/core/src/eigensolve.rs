//! Generalized eigenproblem `H c = E S c` over a non-orthogonal basis.
//!
//! The overlap is diagonalized first; eigenvectors whose eigenvalue falls
//! below `threshold · max(eig S)` are discarded, the rest are rescaled to an
//! orthonormal set, and the projected Hamiltonian is solved as a standard
//! problem. Complex-symmetric Hamiltonians (complex scaling) reuse the same
//! real overlap transform.

use faer::{c64, Mat, MatRef, Side};

use crate::error::{FewBodyError, Result};

pub const DEFAULT_THRESHOLD: f64 = 1e-10;

/// Dense Hamiltonian and overlap matrices over one basis.
#[derive(Debug, Clone)]
pub struct AssembledSystem<T> {
    pub h: Mat<T>,
    pub s: Mat<f64>,
}

#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    /// Ascending (real case) or sorted by real part (complex case).
    pub energies: Vec<T>,
    /// Eigenvectors as columns, in the original basis, normalized so that `cᵀ S c = 1`.
    pub vectors: Option<Mat<T>>,
    pub kept_dim: usize,
}

impl<T: Copy> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// 1-based state lookup.
    pub fn energy(&self, stateindex: usize) -> Result<T> {
        if stateindex == 0 || stateindex > self.energies.len() {
            return Err(FewBodyError::InvalidIndex {
                index: stateindex,
                available: self.energies.len(),
            });
        }
        Ok(self.energies[stateindex - 1])
    }

    /// Coefficient vector of a 1-based state.
    pub fn vector(&self, stateindex: usize) -> Result<Vec<T>> {
        let vecs = self
            .vectors
            .as_ref()
            .ok_or_else(|| FewBodyError::InvalidParams("eigenvectors were not requested".into()))?;
        if stateindex == 0 || stateindex > vecs.ncols() {
            return Err(FewBodyError::InvalidIndex {
                index: stateindex,
                available: vecs.ncols(),
            });
        }
        Ok((0..vecs.nrows())
            .map(|i| vecs[(i, stateindex - 1)])
            .collect())
    }
}

/// Orthonormalizing map `X` with `Xᵀ S X = 1` on the retained subspace.
#[derive(Debug, Clone)]
pub struct OverlapTransform {
    pub transform: Mat<f64>,
    pub kept_dim: usize,
}

fn check_finite<T: Copy>(m: MatRef<'_, T>, what: &str, finite: impl Fn(T) -> bool) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !finite(m[(i, j)]) {
                return Err(FewBodyError::NumericalFailure(format!(
                    "non-finite entry in {what} at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

fn check_square<T>(h: &Mat<T>, s: &Mat<f64>) -> Result<()> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(FewBodyError::ShapeMismatch {
            expected: n,
            got: s.ncols(),
        });
    }
    if h.nrows() != n || h.ncols() != n {
        return Err(FewBodyError::ShapeMismatch {
            expected: n,
            got: h.nrows().max(h.ncols()),
        });
    }
    Ok(())
}

fn asymmetry<T: Copy>(m: MatRef<'_, T>, norm: impl Fn(T, T) -> (f64, f64)) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..=j {
            let (d, s) = norm(m[(i, j)], m[(j, i)]);
            worst = worst.max(d);
            scale = scale.max(s);
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

pub fn truncate_overlap(s: MatRef<'_, f64>, threshold: f64) -> Result<OverlapTransform> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(FewBodyError::InvalidParams(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let n = s.nrows();
    if s.ncols() != n {
        return Err(FewBodyError::ShapeMismatch {
            expected: n,
            got: s.ncols(),
        });
    }
    if n == 0 {
        return Err(FewBodyError::DegenerateBasis { threshold });
    }
    check_finite(s, "overlap", |x: f64| x.is_finite())?;
    if asymmetry(s, |a: f64, b: f64| ((a - b).abs(), a.abs())) > 1e-10 {
        return Err(FewBodyError::NumericalFailure(
            "overlap matrix is not symmetric".into(),
        ));
    }
    let evd = s.self_adjoint_eigen(Side::Lower).map_err(|e| {
        FewBodyError::NumericalFailure(format!("overlap diagonalization failed: {e:?}"))
    })?;
    let eig = evd.S().column_vector();
    let smax = eig[n - 1];
    if !(smax > 0.0) {
        return Err(FewBodyError::DegenerateBasis { threshold });
    }
    let cutoff = threshold * smax;
    let kept: Vec<usize> = (0..n).filter(|&k| eig[k] >= cutoff).collect();
    if kept.is_empty() {
        return Err(FewBodyError::DegenerateBasis { threshold });
    }
    let u = evd.U();
    let transform = Mat::from_fn(n, kept.len(), |i, j| u[(i, kept[j])] / eig[kept[j]].sqrt());
    Ok(OverlapTransform {
        kept_dim: kept.len(),
        transform,
    })
}

/// A real system, or a complex-symmetric one under complex scaling.
#[derive(Debug, Clone)]
pub enum Assembled {
    Real(AssembledSystem<f64>),
    Complex(AssembledSystem<c64>),
}

impl Assembled {
    pub fn dim(&self) -> usize {
        match self {
            Assembled::Real(s) => s.dim(),
            Assembled::Complex(s) => s.dim(),
        }
    }

    pub fn overlap(&self) -> &Mat<f64> {
        match self {
            Assembled::Real(s) => &s.s,
            Assembled::Complex(s) => &s.s,
        }
    }

    pub fn solve(&self, threshold: f64, want_vectors: bool) -> Result<Eigenpairs> {
        Ok(match self {
            Assembled::Real(s) => Eigenpairs::Real(s.solve(threshold, want_vectors)?),
            Assembled::Complex(s) => Eigenpairs::Complex(s.solve(threshold, want_vectors)?),
        })
    }
}

#[derive(Debug, Clone)]
pub enum Eigenpairs {
    Real(Spectrum<f64>),
    Complex(Spectrum<c64>),
}

impl Eigenpairs {
    pub fn kept_dim(&self) -> usize {
        match self {
            Eigenpairs::Real(s) => s.kept_dim,
            Eigenpairs::Complex(s) => s.kept_dim,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Eigenpairs::Real(s) => s.len(),
            Eigenpairs::Complex(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn complex_energies(&self) -> Vec<c64> {
        match self {
            Eigenpairs::Real(s) => s.energies.iter().map(|&e| c64::new(e, 0.0)).collect(),
            Eigenpairs::Complex(s) => s.energies.clone(),
        }
    }

    /// Real spectrum, or `None` under complex scaling.
    pub fn as_real(&self) -> Option<&Spectrum<f64>> {
        match self {
            Eigenpairs::Real(s) => Some(s),
            Eigenpairs::Complex(_) => None,
        }
    }
}

impl AssembledSystem<f64> {
    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn solve(&self, threshold: f64, want_vectors: bool) -> Result<Spectrum<f64>> {
        check_square(&self.h, &self.s)?;
        check_finite(self.h.as_ref(), "hamiltonian", |x: f64| x.is_finite())?;
        if asymmetry(self.h.as_ref(), |a: f64, b: f64| ((a - b).abs(), a.abs())) > 1e-10 {
            return Err(FewBodyError::NumericalFailure(
                "hamiltonian is not symmetric".into(),
            ));
        }
        let OverlapTransform {
            transform: x,
            kept_dim,
        } = truncate_overlap(self.s.as_ref(), threshold)?;
        let hx = &self.h * &x;
        let projected = x.transpose() * &hx;
        let sym = Mat::from_fn(kept_dim, kept_dim, |i, j| {
            0.5 * (projected[(i, j)] + projected[(j, i)])
        });
        if want_vectors {
            let evd = sym.self_adjoint_eigen(Side::Lower).map_err(|e| {
                FewBodyError::NumericalFailure(format!("eigensolver failed: {e:?}"))
            })?;
            let energies = evd.S().column_vector().iter().copied().collect();
            let vectors = &x * evd.U();
            Ok(Spectrum {
                energies,
                vectors: Some(vectors),
                kept_dim,
            })
        } else {
            let energies = sym.self_adjoint_eigenvalues(Side::Lower).map_err(|e| {
                FewBodyError::NumericalFailure(format!("eigensolver failed: {e:?}"))
            })?;
            Ok(Spectrum {
                energies,
                vectors: None,
                kept_dim,
            })
        }
    }
}

impl AssembledSystem<c64> {
    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// Complex-symmetric solve; vectors are normalized with the unconjugated form `cᵀ S c = 1`.
    pub fn solve(&self, threshold: f64, want_vectors: bool) -> Result<Spectrum<c64>> {
        check_square(&self.h, &self.s)?;
        check_finite(self.h.as_ref(), "hamiltonian", |z: c64| {
            z.re.is_finite() && z.im.is_finite()
        })?;
        if asymmetry(self.h.as_ref(), |a: c64, b: c64| ((a - b).norm(), a.norm())) > 1e-10 {
            return Err(FewBodyError::NumericalFailure(
                "hamiltonian is not complex symmetric".into(),
            ));
        }
        let OverlapTransform {
            transform: x,
            kept_dim,
        } = truncate_overlap(self.s.as_ref(), threshold)?;
        let xc = Mat::from_fn(x.nrows(), x.ncols(), |i, j| c64::new(x[(i, j)], 0.0));
        let hx = &self.h * &xc;
        let projected = xc.transpose() * &hx;
        let sym = Mat::from_fn(kept_dim, kept_dim, |i, j| {
            (projected[(i, j)] + projected[(j, i)]) * 0.5
        });

        let mut order: Vec<usize> = (0..kept_dim).collect();
        if want_vectors {
            let evd = sym.eigen().map_err(|e| {
                FewBodyError::NumericalFailure(format!("eigensolver failed: {e:?}"))
            })?;
            let values: Vec<c64> = evd.S().column_vector().iter().copied().collect();
            order.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
            let u = evd.U();
            let mut w = Mat::<c64>::zeros(kept_dim, kept_dim);
            for (col, &k) in order.iter().enumerate() {
                let norm2: c64 = (0..kept_dim).map(|i| u[(i, k)] * u[(i, k)]).sum();
                let scale = if norm2.norm() > 1e-300 {
                    norm2.sqrt().inv()
                } else {
                    c64::new(1.0, 0.0)
                };
                for i in 0..kept_dim {
                    w[(i, col)] = u[(i, k)] * scale;
                }
            }
            let vectors = &xc * &w;
            let energies = order.iter().map(|&k| values[k]).collect();
            Ok(Spectrum {
                energies,
                vectors: Some(vectors),
                kept_dim,
            })
        } else {
            let values = sym.eigenvalues().map_err(|e| {
                FewBodyError::NumericalFailure(format!("eigensolver failed: {e:?}"))
            })?;
            order.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
            let energies = order.iter().map(|&k| values[k]).collect();
            Ok(Spectrum {
                energies,
                vectors: None,
                kept_dim,
            })
        }
    }
}
