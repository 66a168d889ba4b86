//! Dispatch from a [`RunSpec`] to the solvers.

use std::time::Instant;

use fewbody::gem2b::{
    build_basis, energies, optimize_ranges, scale_potential_to_energy, scale_with_optimized_ranges,
    solve_2b, wavefunction_on_grid, NumParams2B, PhysParams2B, SolveFlags,
};
use fewbody::gem3b1d::assemble_3b1d;
use fewbody::isgl3d::solve_3b3d;
use fewbody::{Dim, Eigenpairs};

use crate::config::{Built, Grid, Num, ObservSpec, Problem, RunSpec};
use crate::error::CliError;
use crate::report::{
    BasisDiagnostics, BenchReport, BenchRow, Coefficients, InvertReport, ObservableValue,
    OptimizeReport, Report, Resonance, StateEnergy, StateObservableReport, Wavefunction,
};

pub fn run(spec: &RunSpec) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut report = match spec.build()? {
        Built::TwoBody { pp, np } => run_two_body(spec, pp, np)?,
        Built::ThreeBody1D { pp, np } => {
            let assembly =
                assemble_3b1d(&pp, &np, spec.flags.csm).map_err(CliError::solve("assembly"))?;
            let spectrum = assembly
                .system
                .solve(np.threshold, spec.flags.wf)
                .map_err(CliError::solve("eigensolver"))?;
            three_body_report(spec, &spectrum, assembly.system.dim())?
        }
        Built::ThreeBody3D { pp, np, observ } => {
            let sol = solve_3b3d(&pp, &np, observ.as_ref(), spec.flags.wf, spec.flags.csm)
                .map_err(CliError::solve("three-body solve"))?;
            let mut report = three_body_report(spec, &sol.spectrum, sol.basis_size)?;
            if let Some(o) = &spec.observ {
                report.observables = sol
                    .observables
                    .iter()
                    .map(|s| StateObservableReport {
                        state: s.stateindex,
                        energy: s.energy,
                        values: observable_values(o, &s.central, &s.r2),
                    })
                    .collect();
            }
            report
        }
    };
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

fn empty_report(problem: Problem) -> Report {
    Report {
        problem,
        energies: Vec::new(),
        kept_dim: 0,
        basis: Vec::new(),
        resonances: Vec::new(),
        wavefunctions: Vec::new(),
        coefficients: Vec::new(),
        observables: Vec::new(),
        optimize: None,
        invert: None,
        wall_time_s: 0.0,
    }
}

fn push_energies(out: &mut Vec<StateEnergy>, channel: Option<u32>, spectrum: &Eigenpairs) {
    match spectrum {
        Eigenpairs::Real(s) => {
            out.extend(s.energies.iter().enumerate().map(|(i, &e)| StateEnergy {
                channel,
                state: i + 1,
                re: e,
                im: None,
                width: None,
            }))
        }
        Eigenpairs::Complex(s) => {
            out.extend(s.energies.iter().enumerate().map(|(i, e)| StateEnergy {
                channel,
                state: i + 1,
                re: e.re,
                im: Some(e.im),
                width: Some(-2.0 * e.im),
            }))
        }
    }
}

fn run_two_body(
    spec: &RunSpec,
    mut pp: PhysParams2B,
    mut np: NumParams2B,
) -> Result<Report, CliError> {
    let mut report = empty_report(Problem::TwoBody);
    let flags = &spec.flags;
    match (flags.optimize, flags.invert) {
        (Some(o), None) => {
            let opt = optimize_ranges(&pp, &np, o.stateindex)
                .map_err(CliError::solve("flags.optimize"))?;
            np = np
                .with_gem(np.gem.nmax, opt.r1, opt.rnmax)
                .map_err(CliError::solve("flags.optimize"))?;
            report.optimize = Some(OptimizeReport {
                stateindex: o.stateindex,
                r1: opt.r1,
                rnmax: opt.rnmax,
                energy: opt.energy,
            });
        }
        (None, Some(i)) => {
            let vscale = scale_potential_to_energy(&pp, &np, i.stateindex, i.target_e)
                .map_err(CliError::solve("flags.invert"))?;
            pp = pp.scaled(vscale);
            let e = energies(&pp, &np).map_err(CliError::solve("flags.invert"))?;
            report.invert = Some(InvertReport {
                stateindex: i.stateindex,
                target_e: i.target_e,
                vscale,
                energy: e[i.stateindex - 1],
                r1: np.gem.r1,
                rnmax: np.gem.rnmax,
            });
        }
        (Some(o), Some(i)) => {
            let fit = scale_with_optimized_ranges(&pp, &np, i.stateindex, i.target_e)
                .map_err(CliError::solve("flags.invert"))?;
            pp = pp.scaled(fit.vscale);
            np = fit.num;
            report.optimize = Some(OptimizeReport {
                stateindex: o.stateindex,
                r1: np.gem.r1,
                rnmax: np.gem.rnmax,
                energy: fit.energy,
            });
            report.invert = Some(InvertReport {
                stateindex: i.stateindex,
                target_e: i.target_e,
                vscale: fit.vscale,
                energy: fit.energy,
                r1: np.gem.r1,
                rnmax: np.gem.rnmax,
            });
        }
        (None, None) => {}
    }

    let solve_flags = SolveFlags {
        wf: flags.wf,
        cr: flags.cr,
        csm: flags.csm,
    };
    let channels = solve_2b(&pp, &np, solve_flags).map_err(CliError::solve("two-body solve"))?;
    let filter = match &spec.num {
        Num::TwoBody(n) => n.resonance_window.filter(),
        Num::ThreeBody(_) => unreachable!("two-body spec carries two-body numerics"),
    };
    for ch in &channels {
        let size = build_basis(&pp, &np, ch.l, flags.cr)
            .map_err(CliError::solve("basis"))?
            .len();
        report.basis.push(BasisDiagnostics {
            channel: Some(ch.l),
            size,
            kept_dim: ch.spectrum.kept_dim(),
        });
        report.kept_dim += ch.spectrum.kept_dim();
        push_energies(&mut report.energies, Some(ch.l), &ch.spectrum);
        if let Eigenpairs::Complex(s) = &ch.spectrum {
            let mut found: Vec<_> = s
                .energies
                .iter()
                .copied()
                .filter(|&e| filter.accepts(e, np.theta_csm))
                .collect();
            found.sort_by(|a, b| b.arg().total_cmp(&a.arg()));
            report
                .resonances
                .extend(found.into_iter().map(|e| Resonance {
                    channel: ch.l,
                    re: e.re,
                    im: e.im,
                    width: -2.0 * e.im,
                }));
        }
        if let (true, Eigenpairs::Real(s)) = (flags.wf, &ch.spectrum) {
            let r = grid_points(&spec.output.grid, pp.dim);
            let dr = r[1] - r[0];
            for k in 1..=spec.output.wf_states.min(s.len()) {
                let coeffs = s.vector(k).map_err(CliError::solve("wavefunction"))?;
                let psi = wavefunction_on_grid(&r, &pp, &np, ch.l, &coeffs, flags.cr)
                    .map_err(CliError::solve("wavefunction"))?;
                let density: Vec<f64> = r
                    .iter()
                    .zip(&psi)
                    .map(|(&x, &p)| radial_density(pp.dim, x, p))
                    .collect();
                let norm = density.iter().sum::<f64>() * dr;
                report.wavefunctions.push(Wavefunction {
                    channel: ch.l,
                    state: k,
                    energy: s.energies[k - 1],
                    norm,
                    r: r.clone(),
                    psi,
                    density,
                });
            }
        }
    }
    Ok(report)
}

/// Uniform grid; `[-rmax, rmax]` in 1D, `(0, rmax]` otherwise.
fn grid_points(grid: &Grid, dim: Dim) -> Vec<f64> {
    let n = grid.points;
    match dim {
        Dim::One => (0..n)
            .map(|i| -grid.rmax + 2.0 * grid.rmax * i as f64 / (n - 1) as f64)
            .collect(),
        _ => (1..=n).map(|i| grid.rmax * i as f64 / n as f64).collect(),
    }
}

/// `|ψ|²` times the measure `r^{d-1} dΩ` integrated over angles, for the basis normalization.
fn radial_density(dim: Dim, r: f64, psi: f64) -> f64 {
    match dim {
        Dim::One => psi * psi,
        Dim::Two => 2.0 * std::f64::consts::PI * r * psi * psi,
        Dim::Three => r * r * psi * psi,
    }
}

fn three_body_report(
    spec: &RunSpec,
    spectrum: &Eigenpairs,
    size: usize,
) -> Result<Report, CliError> {
    let mut report = empty_report(spec.problem);
    report.kept_dim = spectrum.kept_dim();
    report.basis.push(BasisDiagnostics {
        channel: None,
        size,
        kept_dim: spectrum.kept_dim(),
    });
    push_energies(&mut report.energies, None, spectrum);
    if let (true, Eigenpairs::Real(s)) = (spec.flags.wf, spectrum) {
        for k in 1..=spec.output.wf_states.min(s.len()) {
            let values = s.vector(k).map_err(CliError::solve("coefficients"))?;
            report.coefficients.push(Coefficients { state: k, values });
        }
    }
    Ok(report)
}

fn observable_values(
    o: &ObservSpec,
    central: &[Vec<f64>; 3],
    r2: &[Option<f64>; 3],
) -> Vec<ObservableValue> {
    let mut out = Vec::new();
    for set in 0..3 {
        for (spec, &value) in o.centobs[set].iter().zip(&central[set]) {
            out.push(ObservableValue {
                set: set + 1,
                observable: spec.label(),
                value,
            });
        }
        if let Some(value) = r2[set] {
            out.push(ObservableValue {
                set: set + 1,
                observable: "R^2".into(),
                value,
            });
        }
    }
    out
}

/// Runs `spec` once per entry of `nmax_list` (setting `Nmax` too for three bodies).
pub fn bench(spec: &RunSpec, nmax_list: &[usize]) -> Result<BenchReport, CliError> {
    let mut rows = Vec::with_capacity(nmax_list.len());
    for &nmax in nmax_list {
        let trial = spec.with_nmax(nmax);
        trial.validate()?;
        let report = run(&trial)?;
        let energy = report
            .energies
            .iter()
            .map(|e| e.re)
            .fold(f64::INFINITY, f64::min);
        rows.push(BenchRow {
            nmax,
            basis_size: report.basis.iter().map(|b| b.size).sum(),
            kept_dim: report.kept_dim,
            energy,
            wall_time_s: report.wall_time_s,
        });
    }
    Ok(BenchReport {
        problem: spec.problem,
        rows,
    })
}
