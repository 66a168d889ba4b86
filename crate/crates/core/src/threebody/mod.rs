//! Machinery shared by the three-body solvers: Jacobi coordinates, particle
//! symmetry, symmetrized product-Gaussian bases and their matrix elements.
//!
//! Every basis function is carried into one common frame `v = (r₁, R₁)`. A
//! primitive is `Π (a·v)^l (b·v)^L exp(-ν (a·v)² - λ (b·v)²)`, so overlaps,
//! kinetic terms and pair potentials all reduce to Gaussian moments in two
//! variables (per Cartesian component).

mod poly;

use faer::{c64, Mat};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::basis::RangeProgression;
use crate::eigensolve::{Assembled, AssembledSystem};
use crate::error::{FewBodyError, Result};
use crate::potentials::{AlphaInterpolant, Domain, KernelRequest, PotentialModel};
use poly::Poly2;

/// Range progressions for the pair coordinate `r` and the spectator coordinate `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GemParams3B {
    pub r: RangeProgression,
    pub big_r: RangeProgression,
}

impl GemParams3B {
    pub fn new(
        nmax: usize,
        r1: f64,
        rnmax: f64,
        big_nmax: usize,
        big_r1: f64,
        big_rnmax: f64,
    ) -> Result<Self> {
        Ok(Self {
            r: RangeProgression::new(nmax, r1, rnmax)?,
            big_r: RangeProgression::new(big_nmax, big_r1, big_rnmax)?,
        })
    }
}

/// Linear maps between the three Jacobi sets of a three-particle system.
///
/// Set `i` (0-based) has `r_i = s_j - s_k` and
/// `R_i = s_i - (m_j s_j + m_k s_k)/(m_j + m_k)` with `(i, j, k)` cyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiFrame {
    masses: [f64; 3],
    rows: [[[f64; 3]; 2]; 3],
}

pub fn jacobi_frames(masses: [f64; 3]) -> Result<JacobiFrame> {
    if let Some(m) = masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(FewBodyError::InvalidParams(format!(
            "masses must be positive and finite, got {m}"
        )));
    }
    let mut rows = [[[0.0; 3]; 2]; 3];
    for (i, set) in rows.iter_mut().enumerate() {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        set[0][j] = 1.0;
        set[0][k] = -1.0;
        let pair = masses[j] + masses[k];
        set[1][i] = 1.0;
        set[1][j] = -masses[j] / pair;
        set[1][k] = -masses[k] / pair;
    }
    Ok(JacobiFrame { masses, rows })
}

impl JacobiFrame {
    pub fn masses(&self) -> [f64; 3] {
        self.masses
    }

    /// Particle-coordinate coefficients of `(r_set, R_set)`.
    pub fn particle_rows(&self, set: usize) -> [[f64; 3]; 2] {
        self.rows[set]
    }

    /// `(r_set, R_set)` of a particle configuration.
    pub fn coordinates(&self, set: usize, s: [f64; 3]) -> [f64; 2] {
        self.rows[set].map(|row| row.iter().zip(&s).map(|(c, x)| c * x).sum())
    }

    /// Writes a translation-invariant form `c·s` as `α r_set + β R_set`.
    pub fn express(&self, c: [f64; 3], set: usize) -> [f64; 2] {
        let [r, big_r] = self.rows[set];
        // Zero-sum vectors are fixed by any two components; use the first two.
        let det = r[0] * big_r[1] - r[1] * big_r[0];
        let alpha = (c[0] * big_r[1] - c[1] * big_r[0]) / det;
        let beta = (r[0] * c[1] - r[1] * c[0]) / det;
        [alpha, beta]
    }

    /// Matrix `T` with `(r_j, R_j)ᵀ = T (r_k, R_k)ᵀ`.
    pub fn transform(&self, j: usize, k: usize) -> [[f64; 2]; 2] {
        self.rows[j].map(|row| self.express(row, k))
    }

    /// Reduced masses `(μ_jk, μ_i)` of the pair and spectator coordinates of a set.
    pub fn reduced_masses(&self, set: usize) -> (f64, f64) {
        let m = self.masses;
        let (j, k) = ((set + 1) % 3, (set + 2) % 3);
        let pair = m[j] + m[k];
        (m[j] * m[k] / pair, m[set] * pair / (pair + m[set]))
    }
}

/// Exchange statistics of a particle label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistics {
    Distinct,
    Boson,
    Fermion,
}

impl Statistics {
    fn of(label: &str) -> Self {
        match label {
            "b" => Statistics::Boson,
            "f" => Statistics::Fermion,
            _ => Statistics::Distinct,
        }
    }
}

/// Permutation group of the identical particles, with exchange signs.
#[derive(Debug, Clone, PartialEq)]
pub struct Symmetry {
    pub stats: [Statistics; 3],
    /// `(π, sign)` where `π[n]` is the particle that takes the place of `n`.
    pub group: Vec<([usize; 3], f64)>,
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn permutation_sign(p: [usize; 3]) -> f64 {
    let inversions = (0..3)
        .flat_map(|a| (a + 1..3).map(move |b| (a, b)))
        .filter(|&(a, b)| p[a] > p[b])
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Checks labels, masses and pair potentials for consistency and builds the symmetry group.
pub fn analyze_symmetry(
    svals: &[String; 3],
    masses: [f64; 3],
    vints: &[Vec<PotentialModel>; 3],
) -> Result<Symmetry> {
    for a in 0..3 {
        for b in a + 1..3 {
            if svals[a] != svals[b] {
                continue;
            }
            if Statistics::of(&svals[a]) == Statistics::Distinct {
                return Err(FewBodyError::InvalidSymmetry(format!(
                    "label {:?} is repeated; identical particles are marked \"b\" or \"f\"",
                    svals[a]
                )));
            }
            if (masses[a] - masses[b]).abs() > 1e-12 * masses[a].max(masses[b]) {
                return Err(FewBodyError::InvalidSymmetry(format!(
                    "identical particles {} and {} have different masses {} and {}",
                    a + 1,
                    b + 1,
                    masses[a],
                    masses[b]
                )));
            }
        }
    }
    let stats = [0, 1, 2].map(|n| Statistics::of(&svals[n]));
    let fermions = stats.contains(&Statistics::Fermion);
    let group: Vec<_> = PERMUTATIONS
        .iter()
        .filter(|p| (0..3).all(|n| p[n] == n || svals[p[n]] == svals[n]))
        .map(|&p| (p, if fermions { permutation_sign(p) } else { 1.0 }))
        .collect();
    let labels = |set: usize| {
        vints[set]
            .iter()
            .map(PotentialModel::label)
            .collect::<Vec<_>>()
    };
    for (p, _) in &group {
        for set in 0..3 {
            if labels(set) != labels(p[set]) {
                return Err(FewBodyError::InvalidSymmetry(format!(
                    "pair potentials of sets {} and {} differ although their particles are identical",
                    set + 1,
                    p[set] + 1
                )));
            }
        }
    }
    Ok(Symmetry { stats, group })
}

impl Symmetry {
    /// Whether the pair of a set consists of two identical particles.
    pub fn identical_pair(&self, set: usize) -> Option<Statistics> {
        let (j, k) = ((set + 1) % 3, (set + 2) % 3);
        let swap = self
            .group
            .iter()
            .any(|(p, _)| p[j] == k && p[k] == j && p[set] == set);
        swap.then_some(self.stats[j])
    }

    /// Smallest-index representatives of the orbits of `sets` under the group, with orbit sizes.
    pub fn representatives(&self, sets: &[usize]) -> Vec<(usize, usize)> {
        let mut seen = [false; 3];
        let mut out = Vec::new();
        for &s in sets {
            if seen[s] {
                continue;
            }
            let mut orbit: Vec<usize> = self.group.iter().map(|(p, _)| p[s]).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &o in &orbit {
                seen[o] = true;
            }
            out.push((orbit[0].min(s), orbit.len()));
        }
        out
    }
}

/// One product Gaussian in the common frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Primitive {
    pub coef: f64,
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub nu: f64,
    pub lam: f64,
    pub l: u32,
    pub big_l: u32,
}

impl Primitive {
    fn exponent(&self) -> [[f64; 2]; 2] {
        let (a, b) = (self.a, self.b);
        [
            [
                self.nu * a[0] * a[0] + self.lam * b[0] * b[0],
                self.nu * a[0] * a[1] + self.lam * b[0] * b[1],
            ],
            [
                self.nu * a[1] * a[0] + self.lam * b[1] * b[0],
                self.nu * a[1] * a[1] + self.lam * b[1] * b[1],
            ],
        ]
    }

    fn prefactor(&self) -> Poly2 {
        Poly2::linear(self.a)
            .pow(self.l)
            .mul(&Poly2::linear(self.b).pow(self.big_l))
    }
}

/// Channel of a Faddeev set: set index (0-based) and the powers of `r` and `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ChannelKey {
    pub set: usize,
    pub l: u32,
    pub big_l: u32,
}

/// A symmetrized basis function: `Σ_π sign(π) P_π` applied to a base primitive.
#[derive(Debug, Clone)]
pub(crate) struct SymFunction {
    pub channel: usize,
    pub base: Primitive,
    pub images: Vec<Primitive>,
}

/// Builds symmetrized product-Gaussian functions for each channel.
pub(crate) fn build_functions(
    frame: &JacobiFrame,
    sym: &Symmetry,
    channels: &[ChannelKey],
    gem: &GemParams3B,
    dim: u32,
) -> Vec<SymFunction> {
    let mut out = Vec::new();
    for (ci, ch) in channels.iter().enumerate() {
        let [r_row, big_r_row] = frame.particle_rows(ch.set);
        for nu in gem.r.ranges() {
            for lam in gem.big_r.ranges() {
                let make = |perm: [usize; 3], sign: f64| {
                    // (P_π ψ)(s) = ψ(s_π): row coefficient on s_m comes from π⁻¹(m).
                    let mut pr = [0.0; 3];
                    let mut pb = [0.0; 3];
                    for n in 0..3 {
                        pr[perm[n]] = r_row[n];
                        pb[perm[n]] = big_r_row[n];
                    }
                    Primitive {
                        coef: sign,
                        a: frame.express(pr, 0),
                        b: frame.express(pb, 0),
                        nu,
                        lam,
                        l: ch.l,
                        big_l: ch.big_l,
                    }
                };
                let mut base = make([0, 1, 2], 1.0);
                let self_overlap = overlap_1d_or_3d(&base, &base, dim);
                base.coef = 1.0 / self_overlap.sqrt();
                let images = sym
                    .group
                    .iter()
                    .map(|&(p, sign)| {
                        let mut img = make(p, sign);
                        img.coef *= base.coef;
                        img
                    })
                    .collect();
                out.push(SymFunction {
                    channel: ci,
                    base,
                    images,
                });
            }
        }
    }
    out
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn add2(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

/// `∫ exp(-vᵀ C v) d²v = π / √det C` for one Cartesian component.
pub(crate) fn gaussian_weight(c: &[[f64; 2]; 2]) -> f64 {
    PI / det2(c).sqrt()
}

/// Covariance `(2C)⁻¹` of the Gaussian weight `exp(-vᵀ C v)`.
fn covariance(c: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let d = 2.0 * det2(c);
    [[c[1][1] / d, -c[0][1] / d], [-c[1][0] / d, c[0][0] / d]]
}

fn quad(w: [f64; 2], m: &[[f64; 2]; 2]) -> f64 {
    w[0] * (m[0][0] * w[0] + m[0][1] * w[1]) + w[1] * (m[1][0] * w[0] + m[1][1] * w[1])
}

/// `∫ f_A f_B` per Cartesian component raised to `dim`, without polynomial factors in 3D.
fn overlap_1d_or_3d(a: &Primitive, b: &Primitive, dim: u32) -> f64 {
    let c = add2(&a.exponent(), &b.exponent());
    let z = gaussian_weight(&c);
    if dim == 1 {
        a.coef
            * b.coef
            * z
            * a.prefactor()
                .mul(&b.prefactor())
                .expectation(&covariance(&c))
    } else {
        a.coef * b.coef * z.powi(3)
    }
}

/// Kernel values `∫ r^p e^{-β r²} V(r)` for one potential, closed form or interpolated.
pub(crate) enum KernelSource {
    Direct(PotentialModel),
    Interpolated(Vec<Option<AlphaInterpolant>>),
}

impl KernelSource {
    fn eval(&self, power: u32, beta: f64, domain: Domain, theta: Option<f64>) -> Result<Complex64> {
        match self {
            KernelSource::Direct(v) => {
                v.kernel(&KernelRequest::new(power, beta, domain).with_theta(theta))
            }
            KernelSource::Interpolated(table) => table
                .get(power as usize)
                .and_then(Option::as_ref)
                .ok_or_else(|| {
                    FewBodyError::NumericalFailure(format!("no interpolant for power {power}"))
                })?
                .eval(beta),
        }
    }
}

/// Radial weight acting on one Jacobi pair coordinate: a pair potential or an observable.
pub(crate) struct PairTerm {
    pub set: usize,
    pub source: KernelSource,
}

/// Assembly context for one three-body problem.
pub(crate) struct Engine<'a> {
    pub frame: &'a JacobiFrame,
    pub dim: u32,
    pub functions: &'a [SymFunction],
    pub theta: Option<f64>,
    pub kmax_interpol: usize,
}

/// Quantities needed to evaluate every element between a bra primitive and a ket primitive.
struct PairGeometry {
    z: f64,
    cov: [[f64; 2]; 2],
    prefactor: Option<Poly2>,
}

impl Engine<'_> {
    fn domain(&self) -> Domain {
        if self.dim == 1 {
            Domain::FullLine
        } else {
            Domain::HalfLine
        }
    }

    fn pair_row(&self, set: usize) -> [f64; 2] {
        self.frame.express(self.frame.particle_rows(set)[0], 0)
    }

    /// Highest power of the pair coordinate appearing in potential elements.
    fn max_power(&self) -> u32 {
        if self.dim == 1 {
            2 * self
                .functions
                .iter()
                .map(|f| f.base.l + f.base.big_l)
                .max()
                .unwrap_or(0)
        } else {
            2
        }
    }

    fn geometry(&self, a: &Primitive, b: &Primitive) -> PairGeometry {
        let c = add2(&a.exponent(), &b.exponent());
        PairGeometry {
            z: gaussian_weight(&c),
            cov: covariance(&c),
            prefactor: (self.dim == 1).then(|| a.prefactor().mul(&b.prefactor())),
        }
    }

    /// Range of Gaussian widths `β = 1/(2 wᵀΣw)` met by the pair coordinate of `set`.
    fn beta_range(&self, set: usize) -> (f64, f64) {
        let w = self.pair_row(set);
        self.functions
            .par_iter()
            .map(|fi| {
                let mut range = (f64::INFINITY, 0.0f64);
                for fj in self.functions {
                    for img in &fj.images {
                        let c = add2(&fi.base.exponent(), &img.exponent());
                        let beta = 0.5 / quad(w, &covariance(&c));
                        range = (range.0.min(beta), range.1.max(beta));
                    }
                }
                range
            })
            .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    /// Kernel source for a potential: analytic forms directly, others by α-interpolation
    /// over the widths met in this basis, padded by a decade on each side.
    pub fn kernel_source(&self, potential: &PotentialModel, set: usize) -> Result<KernelSource> {
        if potential.is_analytic() {
            return Ok(KernelSource::Direct(potential.clone()));
        }
        let (lo, hi) = self.beta_range(set);
        let (lo, hi) = (lo / 10.0, hi * 10.0);
        let domain = self.domain();
        let powers: Vec<u32> = if self.dim == 1 {
            (0..=self.max_power()).collect()
        } else {
            vec![2]
        };
        let mut table: Vec<Option<AlphaInterpolant>> = vec![None; self.max_power() as usize + 1];
        for p in powers {
            table[p as usize] = Some(AlphaInterpolant::build(
                potential,
                p,
                domain,
                self.theta,
                lo,
                hi,
                self.kmax_interpol,
            )?);
        }
        Ok(KernelSource::Interpolated(table))
    }

    fn pair_element(
        &self,
        g: &PairGeometry,
        w: [f64; 2],
        source: &KernelSource,
    ) -> Result<Complex64> {
        let var = quad(w, &g.cov);
        let beta = 0.5 / var;
        if self.dim == 1 {
            let q = g
                .prefactor
                .as_ref()
                .expect("1D prefactor")
                .conditional(&g.cov, w);
            let mut sum = Complex64::new(0.0, 0.0);
            for (p, qp) in q.iter().enumerate() {
                if *qp != 0.0 {
                    sum += *qp * source.eval(p as u32, beta, Domain::FullLine, self.theta)?;
                }
            }
            Ok(sum * g.z / (2.0 * PI * var).sqrt())
        } else {
            let k = source.eval(2, beta, Domain::HalfLine, self.theta)?;
            Ok(k * g.z.powi(3) * 4.0 * PI / (2.0 * PI * var).powf(1.5))
        }
    }

    fn overlap(&self, g: &PairGeometry) -> f64 {
        match &g.prefactor {
            Some(p) => g.z * p.expectation(&g.cov),
            None => g.z.powi(3),
        }
    }

    fn kinetic(&self, a: &Primitive, b: &Primitive, g: &PairGeometry) -> f64 {
        let (mu_r, mu_big_r) = self.frame.reduced_masses(0);
        let lambda = [1.0 / mu_r, 1.0 / mu_big_r];
        let (ca, cb) = (a.exponent(), b.exponent());
        if self.dim == 1 {
            let (pa, pb) = (a.prefactor(), b.prefactor());
            let grad = |p: &Poly2, c: &[[f64; 2]; 2], var: usize| {
                p.derivative(var)
                    .add(&Poly2::linear(c[var]).mul(p).scale(-2.0))
            };
            let mut t = 0.0;
            for var in 0..2 {
                let integrand = grad(&pa, &ca, var).mul(&grad(&pb, &cb, var));
                t += 0.5 * lambda[var] * integrand.expectation(&g.cov);
            }
            t * g.z
        } else {
            // 2 d tr(C_A Λ C_B Σ) S
            let mut tr = 0.0;
            for i in 0..2 {
                for k in 0..2 {
                    let m_ik: f64 = (0..2).map(|j| ca[i][j] * lambda[j] * cb[j][k]).sum();
                    tr += m_ik * g.cov[k][i];
                }
            }
            6.0 * tr * g.z.powi(3)
        }
    }

    /// Unsymmetrized-bra, symmetrized-ket elements `Σ_π sign ⟨A|O|P_π B⟩` for all pairs `i ≤ j`.
    fn fill<F>(&self, element: F) -> Result<Mat<f64>>
    where
        F: Fn(&Primitive, &Primitive, &PairGeometry) -> Result<f64> + Sync,
    {
        let n = self.functions.len();
        let rows = (0..n)
            .into_par_iter()
            .map(|i| {
                let bra = &self.functions[i].base;
                (i..n)
                    .map(|j| {
                        let mut acc = 0.0;
                        for img in &self.functions[j].images {
                            let g = self.geometry(bra, img);
                            acc += bra.coef * img.coef * element(bra, img, &g)?;
                        }
                        Ok(acc)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut m = Mat::<f64>::zeros(n, n);
        for (i, row) in rows.into_iter().enumerate() {
            for (k, v) in row.into_iter().enumerate() {
                m[(i, i + k)] = v;
                m[(i + k, i)] = v;
            }
        }
        Ok(m)
    }

    /// Hamiltonian and overlap; complex-symmetric when a scaling angle is set.
    pub fn assemble(&self, terms: &[PairTerm]) -> Result<Assembled> {
        let rows: Vec<Vec<(f64, Complex64)>> = {
            let n = self.functions.len();
            let phase = self.theta.map_or(Complex64::new(1.0, 0.0), |t| {
                Complex64::from_polar(1.0, -2.0 * t)
            });
            let rows_ws: Vec<[f64; 2]> = terms.iter().map(|t| self.pair_row(t.set)).collect();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let bra = &self.functions[i].base;
                    (i..n)
                        .map(|j| {
                            let mut s = 0.0;
                            let mut h = Complex64::new(0.0, 0.0);
                            for img in &self.functions[j].images {
                                let g = self.geometry(bra, img);
                                let c = bra.coef * img.coef;
                                s += c * self.overlap(&g);
                                let mut hv = phase * self.kinetic(bra, img, &g);
                                for (term, w) in terms.iter().zip(&rows_ws) {
                                    hv += self.pair_element(&g, *w, &term.source)?;
                                }
                                h += c * hv;
                            }
                            Ok((s, h))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?
        };
        let n = rows.len();
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
        Ok(match self.theta {
            None => Assembled::Real(AssembledSystem {
                h: Mat::from_fn(n, n, |i, j| h[(i, j)].re),
                s,
            }),
            Some(_) => Assembled::Complex(AssembledSystem { h, s }),
        })
    }

    pub fn overlap_matrix(&self) -> Result<Mat<f64>> {
        self.fill(|_, _, g| Ok(self.overlap(g)))
    }

    /// Matrix of a radial weight acting on the pair coordinate of one set.
    pub fn pair_matrix(&self, term: &PairTerm) -> Result<Mat<f64>> {
        let w = self.pair_row(term.set);
        self.fill(|_, _, g| Ok(self.pair_element(g, w, &term.source)?.re))
    }

    /// Matrix of `R²` for the spectator coordinate of one set (per Cartesian component times `dim`).
    pub fn spectator_r2_matrix(&self, set: usize) -> Result<Mat<f64>> {
        let w = self.frame.express(self.frame.particle_rows(set)[1], 0);
        let d = self.dim as f64;
        self.fill(|_, _, g| {
            Ok(match &g.prefactor {
                Some(p) => g.z * p.mul(&Poly2::linear(w).pow(2)).expectation(&g.cov),
                None => d * quad(w, &g.cov) * self.overlap(g),
            })
        })
    }
}

/// Drops functions whose symmetrized norm vanishes (symmetry-forbidden) and
/// rescales the rest so that their overlap diagonal is one.
pub(crate) fn normalize_functions(dim: u32, functions: Vec<SymFunction>) -> Vec<SymFunction> {
    functions
        .into_iter()
        .filter_map(|mut f| {
            // The base primitive has unit norm, so this is relative to one.
            let norm: f64 = f
                .images
                .iter()
                .map(|img| overlap_1d_or_3d(&f.base, img, dim))
                .sum();
            if norm <= 1e-10 {
                return None;
            }
            let s = 1.0 / norm.sqrt();
            f.base.coef *= s;
            f.images.iter_mut().for_each(|img| img.coef *= s);
            Some(f)
        })
        .collect()
}

/// A symmetrized basis with its assembled matrices.
pub(crate) struct Prepared {
    pub frame: JacobiFrame,
    /// Particle permutations of the symmetry group.
    pub perms: Vec<[usize; 3]>,
    pub functions: Vec<SymFunction>,
    pub dim: u32,
    pub theta: Option<f64>,
    pub kmax_interpol: usize,
}

impl Prepared {
    pub fn new(
        frame: JacobiFrame,
        sym: &Symmetry,
        keys: &[ChannelKey],
        gem: &GemParams3B,
        dim: u32,
        theta: Option<f64>,
        kmax_interpol: usize,
    ) -> Result<Self> {
        let functions = normalize_functions(dim, build_functions(&frame, sym, keys, gem, dim));
        if functions.is_empty() {
            return Err(FewBodyError::InvalidBasis(
                "symmetry leaves no basis functions".into(),
            ));
        }
        let perms = sym.group.iter().map(|(p, _)| *p).collect();
        Ok(Self {
            frame,
            perms,
            functions,
            dim,
            theta: theta.filter(|t| *t != 0.0),
            kmax_interpol,
        })
    }

    pub fn engine(&self) -> Engine<'_> {
        Engine {
            frame: &self.frame,
            dim: self.dim,
            functions: &self.functions,
            theta: self.theta,
            kmax_interpol: self.kmax_interpol,
        }
    }

    /// Kernel sources for every pair potential.
    pub fn potential_terms(&self, vints: &[Vec<PotentialModel>; 3]) -> Result<Vec<PairTerm>> {
        let engine = self.engine();
        let mut terms = Vec::new();
        for (set, list) in vints.iter().enumerate() {
            for v in list {
                terms.push(PairTerm {
                    set,
                    source: engine.kernel_source(v, set)?,
                });
            }
        }
        Ok(terms)
    }

    pub fn assemble(&self, vints: &[Vec<PotentialModel>; 3]) -> Result<Assembled> {
        if self.theta.is_some() {
            if let Some(v) = vints.iter().flatten().find(|v| !v.is_complex_capable()) {
                return Err(FewBodyError::UnsupportedComplexEvaluation(v.label()));
            }
        }
        let terms = self.potential_terms(vints)?;
        self.engine().assemble(&terms)
    }

    /// Average of a per-set matrix over the images of `set` under the symmetry group.
    ///
    /// Elements are built with a symmetrized ket only, which is exact for
    /// operators invariant under the group; a single-set observable is not, but
    /// its group average is and has the same mean value in a symmetric state.
    pub fn orbit_average<F>(&self, set: usize, matrix: F) -> Result<Mat<f64>>
    where
        F: Fn(usize) -> Result<Mat<f64>>,
    {
        let n = self.functions.len();
        let mut acc = Mat::<f64>::zeros(n, n);
        for p in &self.perms {
            acc += matrix(p[set])?;
        }
        Ok(acc * faer::Scale(1.0 / self.perms.len() as f64))
    }

    pub fn function_channels(&self) -> Vec<usize> {
        self.functions.iter().map(|f| f.channel).collect()
    }
}

/// Sets carrying at least one pair potential.
pub(crate) fn active_sets(vints: &[Vec<PotentialModel>; 3]) -> Result<Vec<usize>> {
    let sets: Vec<usize> = (0..3).filter(|&i| !vints[i].is_empty()).collect();
    if sets.is_empty() {
        return Err(FewBodyError::InvalidParams(
            "at least one pair must interact".into(),
        ));
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_round_trip() {
        let f = jacobi_frames([1.0, 22.2, 22.2]).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let (a, b) = (f.transform(j, k), f.transform(k, j));
                for r in 0..2 {
                    for c in 0..2 {
                        let v: f64 = (0..2).map(|m| a[r][m] * b[m][c]).sum();
                        let id = if r == c { 1.0 } else { 0.0 };
                        assert!((v - id).abs() < 1e-14);
                    }
                }
                assert!((det2(&a).abs() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn frame_matches_particle_coordinates() {
        let masses = [1.0, 22.2, 22.2];
        let f = jacobi_frames(masses).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s: [f64; 3] = [
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            ];
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let r = s[j] - s[k];
                let big_r = s[i] - (masses[j] * s[j] + masses[k] * s[k]) / (masses[j] + masses[k]);
                let got = f.coordinates(i, s);
                assert!((got[0] - r).abs() < 1e-12 && (got[1] - big_r).abs() < 1e-12);
                for k2 in 0..3 {
                    let t = f.transform(i, k2);
                    let other = f.coordinates(k2, s);
                    let mapped = [
                        t[0][0] * other[0] + t[0][1] * other[1],
                        t[1][0] * other[0] + t[1][1] * other[1],
                    ];
                    assert!((mapped[0] - r).abs() < 1e-12 && (mapped[1] - big_r).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn equal_mass_transform() {
        let f = jacobi_frames([1.0; 3]).unwrap();
        let t = f.transform(1, 0);
        // r₂ = -r₁/2 - R₁, R₂ = 3 r₁/4 - R₁/2
        assert!((t[0][0] + 0.5).abs() < 1e-15 && (t[0][1] + 1.0).abs() < 1e-15);
        assert!((t[1][0] - 0.75).abs() < 1e-15 && (t[1][1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn relabeling_permutes_frames() {
        let masses = [1.0, 2.0, 3.0];
        let f = jacobi_frames(masses).unwrap();
        let g = jacobi_frames([masses[1], masses[2], masses[0]]).unwrap();
        // Relabeling particles (1,2,3) → (2,3,1) maps set i of g to set i+1 of f.
        let s = [0.3, -1.2, 2.0];
        let s_rel = [s[1], s[2], s[0]];
        for i in 0..3 {
            let a = g.coordinates(i, s_rel);
            let b = f.coordinates((i + 1) % 3, s);
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
    }

    fn labels(s: [&str; 3]) -> [String; 3] {
        s.map(String::from)
    }

    #[test]
    fn symmetry_groups() {
        let none: [Vec<PotentialModel>; 3] = Default::default();
        let s = analyze_symmetry(&labels(["x", "y", "z"]), [1.0; 3], &none).unwrap();
        assert_eq!(s.group.len(), 1);
        let s = analyze_symmetry(&labels(["x", "b", "b"]), [1.0, 2.0, 2.0], &none).unwrap();
        assert_eq!(s.group.len(), 2);
        assert_eq!(s.identical_pair(0), Some(Statistics::Boson));
        assert_eq!(s.identical_pair(1), None);
        assert_eq!(s.representatives(&[0, 1, 2]), vec![(0, 1), (1, 2)]);
        let s = analyze_symmetry(&labels(["f", "f", "f"]), [1.0; 3], &none).unwrap();
        assert_eq!(s.group.len(), 6);
        assert_eq!(s.group.iter().filter(|(_, sign)| *sign < 0.0).count(), 3);
        assert_eq!(s.representatives(&[0, 1, 2]), vec![(0, 3)]);
    }

    #[test]
    fn symmetry_rejections() {
        let none: [Vec<PotentialModel>; 3] = Default::default();
        assert!(matches!(
            analyze_symmetry(&labels(["x", "x", "z"]), [1.0; 3], &none),
            Err(FewBodyError::InvalidSymmetry(_))
        ));
        assert!(matches!(
            analyze_symmetry(&labels(["x", "b", "b"]), [1.0, 1.0, 2.0], &none),
            Err(FewBodyError::InvalidSymmetry(_))
        ));
        let g = PotentialModel::gaussian(-1.0, 1.0).unwrap();
        let uneven = [vec![], vec![g.clone()], vec![]];
        assert!(matches!(
            analyze_symmetry(&labels(["x", "b", "b"]), [1.0; 3], &uneven),
            Err(FewBodyError::InvalidSymmetry(_))
        ));
        let even = [vec![], vec![g.clone()], vec![g]];
        assert!(analyze_symmetry(&labels(["x", "b", "b"]), [1.0; 3], &even).is_ok());
    }
}
