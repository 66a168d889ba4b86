use super::{energies, NumParams2B, PhysParams2B};
use crate::error::{FewBodyError, Result};

/// Downhill simplex minimization in two variables.
///
/// Stops when the spread of function values over the simplex drops below `ftol`
/// or after `max_iter` iterations, returning the best vertex and its value.
pub fn nelder_mead<F>(f: F, x0: [f64; 2], step: f64, ftol: f64, max_iter: usize) -> ([f64; 2], f64)
where
    F: Fn([f64; 2]) -> f64,
{
    let mut simplex = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut values = simplex.map(&f);
    let combine =
        |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    for _ in 0..max_iter {
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        if (values[2] - values[0]).abs() < ftol {
            break;
        }
        let centroid = combine(simplex[0], simplex[1], 0.5);
        let reflected = combine(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = combine(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let (contracted, fc) = if fr < values[2] {
                let c = combine(centroid, reflected, 0.5);
                (c, f(c))
            } else {
                let c = combine(centroid, simplex[2], 0.5);
                (c, f(c))
            };
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = combine(simplex[0], simplex[k], 0.5);
                    values[k] = f(simplex[k]);
                }
            }
        }
    }
    let best = (0..3)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap();
    (simplex[best], values[best])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeOptimum {
    pub r1: f64,
    pub rnmax: f64,
    pub energy: f64,
}

const OPT_FTOL: f64 = 1e-10;
const OPT_MAX_ITER: usize = 200;

fn state_energy(pp: &PhysParams2B, np: &NumParams2B, stateindex: usize) -> Result<f64> {
    let e = energies(pp, np)?;
    e.get(stateindex - 1)
        .copied()
        .ok_or(FewBodyError::InvalidIndex {
            index: stateindex,
            available: e.len(),
        })
}

/// Minimizes the `stateindex`-th eigenvalue (1-based) of the lowest channel over
/// `(ln r1, ln rnmax)` with `nmax` held fixed.
pub fn optimize_ranges(
    pp: &PhysParams2B,
    np: &NumParams2B,
    stateindex: usize,
) -> Result<RangeOptimum> {
    np.validate()?;
    if stateindex == 0 || stateindex > np.gem.nmax {
        return Err(FewBodyError::InvalidIndex {
            index: stateindex,
            available: np.gem.nmax,
        });
    }
    let start = state_energy(pp, np, stateindex)?;
    let objective = |x: [f64; 2]| {
        let (r1, rn) = (x[0].exp(), x[1].exp());
        np.with_gem(np.gem.nmax, r1, rn)
            .and_then(|trial| state_energy(pp, &trial, stateindex))
            .unwrap_or(f64::INFINITY)
    };
    let x0 = [np.gem.r1.ln(), np.gem.rnmax.ln()];
    let (x, e) = nelder_mead(objective, x0, 1.2f64.ln(), OPT_FTOL, OPT_MAX_ITER);
    if e < start {
        Ok(RangeOptimum {
            r1: x[0].exp(),
            rnmax: x[1].exp(),
            energy: e,
        })
    } else {
        Ok(RangeOptimum {
            r1: np.gem.r1,
            rnmax: np.gem.rnmax,
            energy: start,
        })
    }
}

const SCALE_MIN: f64 = 1e-3;
const SCALE_MAX: f64 = 1e3;

/// Factor multiplying every potential so that the `stateindex`-th eigenvalue of
/// the lowest channel equals `target`.
pub fn scale_potential_to_energy(
    pp: &PhysParams2B,
    np: &NumParams2B,
    stateindex: usize,
    target: f64,
) -> Result<f64> {
    np.validate()?;
    if !(target < 0.0) {
        return Err(FewBodyError::InvalidParams(format!(
            "target energy must be negative, got {target}"
        )));
    }
    if stateindex == 0 || stateindex > np.gem.nmax {
        return Err(FewBodyError::InvalidIndex {
            index: stateindex,
            available: np.gem.nmax,
        });
    }
    let residual = |s: f64| state_energy(&pp.scaled(s), np, stateindex).map(|e| e - target);

    let f1 = residual(1.0)?;
    if f1 == 0.0 {
        return Ok(1.0);
    }
    // E decreases with the scale, so a positive residual calls for more attraction.
    let factor = if f1 > 0.0 { 2.0 } else { 0.5 };
    let (mut a, mut fa) = (1.0, f1);
    let (mut b, mut fb) = loop {
        let s = a * factor;
        if !(SCALE_MIN..=SCALE_MAX).contains(&s) {
            return Err(FewBodyError::NoSolution(format!(
                "no scaling in [{SCALE_MIN}, {SCALE_MAX}] brackets E = {target}"
            )));
        }
        let fs = residual(s)?;
        if fs == 0.0 {
            return Ok(s);
        }
        if fs.signum() != fa.signum() {
            break (s, fs);
        }
        (a, fa) = (s, fs);
    };

    // Illinois variant of regula falsi.
    let tol = 1e-13 * target.abs();
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = residual(c)?;
        if fc.abs() <= tol || (b - a).abs() <= 1e-15 * c.abs() {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            (b, fb) = (c, fc);
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            (a, fa) = (c, fc);
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(FewBodyError::NumericalFailure(
        "root search for the potential scale did not converge".into(),
    ))
}

/// Potential scale and basis ranges fitted jointly: ranges are re-optimized for
/// the rescaled potential and the scale refitted until it stops changing.
#[derive(Debug, Clone)]
pub struct ScaledOptimum {
    pub vscale: f64,
    pub num: NumParams2B,
    pub energy: f64,
}

const JOINT_MAX_ITER: usize = 20;

pub fn scale_with_optimized_ranges(
    pp: &PhysParams2B,
    np: &NumParams2B,
    stateindex: usize,
    target: f64,
) -> Result<ScaledOptimum> {
    let mut num = np.clone();
    let mut vscale = scale_potential_to_energy(pp, &num, stateindex, target)?;
    for _ in 0..JOINT_MAX_ITER {
        let opt = optimize_ranges(&pp.scaled(vscale), &num, stateindex)?;
        num = num.with_gem(num.gem.nmax, opt.r1, opt.rnmax)?;
        let next = scale_potential_to_energy(pp, &num, stateindex, target)?;
        let settled = (next - vscale).abs() <= 1e-12 * vscale.abs();
        vscale = next;
        if settled {
            break;
        }
    }
    let energy = state_energy(&pp.scaled(vscale), &num, stateindex)?;
    Ok(ScaledOptimum {
        vscale,
        num,
        energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: [f64; 2]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let (x, v) = nelder_mead(f, [-1.2, 1.0], 0.1, 1e-16, 2000);
        assert!(v < 1e-10, "{v}");
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_respects_iteration_cap() {
        let calls = std::cell::Cell::new(0usize);
        let f = |x: [f64; 2]| {
            calls.set(calls.get() + 1);
            x[0] * x[0] + x[1] * x[1]
        };
        nelder_mead(f, [5.0, 5.0], 1.0, 0.0, 10);
        assert!(calls.get() <= 3 + 10 * 4);
    }
}
