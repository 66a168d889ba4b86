//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p fewbody-cli --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use fewbody::basis::BasisFunction;
use fewbody::gem2b::{assemble_with_basis, PhysParams2B};
use fewbody::gem3b1d::{energies_3b1d, NumParams3B1D, PhysParams3B1D};
use fewbody::isgl3d::correlated_gaussian_integral;
use fewbody::threebody::GemParams3B;
use fewbody::{Assembled, BasisSet, Dim, PotentialModel, RangeProgression};
use fewbody_cli::expr::parse_potential_expr;
use fewbody_cli::{bench, parse_config, run, Report, RunSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn config(name: &str) -> String {
    let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn solve(text: &str) -> Report {
    run(&parse_config(text).expect("acceptance configs are valid"))
        .expect("acceptance runs succeed")
}

fn real_energies(report: &Report) -> Vec<f64> {
    report.energies.iter().map(|e| e.re).collect()
}

/// Largest value, NaN if any entry is NaN.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, x| {
        if x.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(x)
        }
    })
}

/// Largest deviation over `want`; NaN when `got` has too few entries.
fn max_abs_dev(got: &[f64], want: &[f64]) -> f64 {
    if got.len() < want.len() {
        return f64::NAN;
    }
    worst(got.iter().zip(want).map(|(g, w)| (g - w).abs()))
}

fn coulomb_spec(nmax: usize, r1: f64, rnmax: f64, extra: &str) -> String {
    format!(
        r#"{{
            "problem": "two_body",
            "phys": {{ "mur": 1.0, "potentials": [{{ "type": "expr", "expr": "-1/r" }}] }},
            "num": {{ "nmax": {nmax}, "r1": {r1}, "rnmax": {rnmax} }}
            {extra}
        }}"#
    )
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let report = solve(&coulomb_spec(10, 0.1, 30.0, ""));
    let secs = start.elapsed().as_secs_f64();
    let dev = max_abs_dev(
        &real_energies(&report),
        &[-0.499876, -0.124543, -0.054437, -0.028644],
    );
    outcome(
        dev <= 1e-5 && secs < 1.0,
        format!("Coulomb levels 1-4: max |dE| = {dev:.2e} (tol 1e-5), {secs:.2} s (< 1 s)"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let fixed = solve(&coulomb_spec(10, 0.871259, 45.664907, ""));
    let want = [
        -0.489956, -0.123714, -0.055167, -0.031063, -0.019847, -0.013823,
    ];
    let dev = max_abs_dev(&real_energies(&fixed), &want);
    let opt = solve(&coulomb_spec(
        10,
        0.1,
        30.0,
        r#", "flags": { "optimize": { "stateindex": 6 } }"#,
    ));
    let e6 = opt.energies.get(5).map_or(f64::NAN, |x| x.re);
    let secs = start.elapsed().as_secs_f64();
    let r = opt.optimize.expect("optimize section present");
    outcome(
        dev <= 1e-5 && e6 <= -0.0138 && secs < 5.0,
        format!(
            "optimized ranges: max |dE| = {dev:.2e} (tol 1e-5); optimizer E6 = {e6:.6} at r1 = {:.4}, rnmax = {:.3} (<= -0.0138); {secs:.2} s (< 5 s)",
            r.r1, r.rnmax
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let report = solve(&config("coulomb_cr.json"));
    let secs = start.elapsed().as_secs_f64();
    let e = real_energies(&report);
    let levels = [
        1usize, 2, 3, 4, 5, 10, 14, 18, 22, 26, 30, 32, 34, 36, 38, 40,
    ];
    let dev = worst(levels.iter().map(|&n| {
        e.get(n - 1)
            .map_or(f64::NAN, |x| (x + 0.5 / (n * n) as f64).abs())
    }));
    outcome(
        dev <= 2e-6 && secs < 30.0,
        format!("complex-ranged basis, {} levels: max |E_n + 1/(2n^2)| = {dev:.2e} (tol 2e-6), {secs:.2} s (< 30 s)", levels.len()),
    )
}

/// Isolated poles of a complex-scaled run: filtered resonances and bound states.
fn poles(report: &Report) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = report
        .energies
        .iter()
        .filter(|e| e.re < 0.0)
        .map(|e| Complex64::new(e.re, e.im.unwrap_or(0.0)))
        .collect();
    out.extend(report.resonances.iter().map(|r| Complex64::new(r.re, r.im)));
    out
}

fn criterion_4() -> Outcome {
    let template = config("resonance.json");
    let cases = [
        (1.75, -1.7914, 0.0, 1e-3),
        (1.5, 0.0932, -0.0151, 1e-3),
        (1.25, 0.9713, -0.7446, 1e-3),
        (1.0, 1.2609, -1.9923, 1e-2),
    ];
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (lambda, re, im, tol) in cases {
        let text = template.replace("\"1.5*(", &format!("\"{lambda}*("));
        let found = poles(&solve(&text));
        match found.as_slice() {
            [e] => {
                let ok = (e.re - re).abs() <= tol && (e.im - im).abs() <= tol;
                pass &= ok;
                parts.push(format!("l={lambda}: {:.4}{:+.4}i", e.re, e.im));
            }
            _ => {
                pass = false;
                parts.push(format!("l={lambda}: {} poles", found.len()));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        pass && secs < 30.0,
        format!(
            "CSM poles {} (tol 1e-3, 1e-2 at l=1); {secs:.2} s (< 30 s)",
            parts.join(", ")
        ),
    )
}

fn two_plus_one_ratios(fermions: bool) -> (Vec<f64>, f64) {
    let mur = 1.0 / (1.0 + 1.0 / 22.2);
    let inverse = solve(&format!(
        r#"{{
            "problem": "two_body",
            "phys": {{ "mur": {mur}, "dim": 1, "potentials": [{{ "type": "gaussian", "v0": -1.0, "mu": 1.0 }}] }},
            "num": {{ "nmax": 6, "r1": 1.0, "rnmax": 20.0 }},
            "flags": {{ "optimize": {{ "stateindex": 1 }}, "invert": {{ "stateindex": 1, "target_e": -1e-3 }} }}
        }}"#
    ));
    let fit = inverse.invert.expect("invert section present");
    let (s, parity, waves) = if fermions {
        ("f", -1, r#", "lmax": 1, "Lmax": 1"#)
    } else {
        ("b", 1, "")
    };
    let v = format!(
        r#"[{{ "type": "gaussian", "v0": {}, "mu": 1.0 }}]"#,
        -fit.vscale
    );
    let three = solve(&format!(
        r#"{{
            "problem": "three_body_1d",
            "phys": {{ "masses": [1.0, 22.2, 22.2], "svals": ["x", "{s}", "{s}"], "parity": {parity},
                       "potentials": [[], {v}, {v}] }},
            "num": {{ "nmax": 6, "r1": {}, "rnmax": {}, "Nmax": 16, "R1": 1.5, "RNmax": 250.0 {waves} }}
        }}"#,
        fit.r1, fit.rnmax
    ));
    let ratios = three
        .energies
        .iter()
        .take(3)
        .map(|e| e.re / fit.energy.abs())
        .collect();
    (ratios, (fit.energy - fit.target_e).abs())
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (bosons, miss_b) = two_plus_one_ratios(false);
    let (fermions, miss_f) = two_plus_one_ratios(true);
    let secs = start.elapsed().as_secs_f64();
    let rel =
        |got: &[f64], want: [f64; 3]| worst(got.iter().zip(want).map(|(g, w)| ((g - w) / w).abs()));
    let db = rel(&bosons, [-2.74274, -1.36058, -1.05240]);
    let df = rel(&fermions, [-1.69497, -1.14929, -1.00423]);
    let miss = miss_b.max(miss_f);
    outcome(
        bosons.len() == 3 && fermions.len() == 3 && db <= 1e-3 && df <= 1e-3 && miss <= 1e-9 && secs < 120.0,
        format!(
            "2+1 ratios: bosons {bosons:.5?} (max rel {db:.1e}), fermions {fermions:.5?} (max rel {df:.1e}), tol 1e-3; |E2 - target| = {miss:.1e} (<= 1e-9); {secs:.1} s (< 120 s)"
        ),
    )
}

fn criterion_6() -> Outcome {
    // Bound states of N bosons with attractive contact g < 0 and unit mass:
    // E_N = -g² N (N² - 1) / 24.
    let mcguire = |n: f64, g: f64| -g * g * n * (n * n - 1.0) / 24.0;
    let exact = mcguire(3.0, -1.0) / mcguire(2.0, -1.0);
    let report = solve(&config("mcguire.json"));
    let ratio = report.energies[0].re / mcguire(2.0, -1.0);
    outcome(
        (ratio - exact).abs() <= 1e-3,
        format!("McGuire E3/E2 = {ratio:.6} vs {exact} (tol 1e-3)"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let report = solve(&config("psminus.json"));
    let secs = start.elapsed().as_secs_f64();
    let e = report.energies.first().map_or(f64::NAN, |x| x.re);
    let de = ((e + 0.262005) / 0.262005).abs();
    let values = &report.observables[0].values;
    let get = |set: usize, name: &str| {
        values
            .iter()
            .find(|v| v.set == set && v.observable == name)
            .map(|v| v.value)
            .unwrap_or(f64::NAN)
    };
    // (set, observable, published value, literature value)
    let table = [
        (1, "r", 5.499094, Some(5.489630)),
        (3, "r", 8.542070, Some(8.548580)),
        (1, "1/r", 0.339703, Some(0.339820)),
        (3, "1/r", 0.155783, Some(0.155630)),
        (1, "r^2", 48.633676, Some(48.418900)),
        (3, "r^2", 93.050415, Some(93.178600)),
        (1, "R^2", 58.6836, None),
        (3, "R^2", 25.3711, None),
    ];
    let rel = |got: f64, want: f64| ((got - want) / want).abs();
    let dobs = worst(table.iter().map(|&(set, name, published, literature)| {
        let got = get(set, name);
        worst([rel(got, published), literature.map_or(0.0, |w| rel(got, w))])
    }));
    outcome(
        de <= 2e-3 && dobs <= 1e-2 && secs < 120.0,
        format!("Ps-: E = {e:.7} ({:.3}% from -0.262005, tol 0.2%); observables max rel dev {dobs:.1e} (tol 1e-2); {secs:.1} s (< 120 s)", 100.0 * de),
    )
}

fn criterion_8() -> Outcome {
    let spec: RunSpec = parse_config(&config("benchmark.json")).unwrap();
    let report = bench(&spec, &[6, 10, 20, 30]).unwrap();
    let want = [-11.620, -14.349, -14.435, -14.435];
    let energies: Vec<f64> = report.rows.iter().map(|r| r.energy).collect();
    let dev = max_abs_dev(&energies, &want);
    let monotone = energies.windows(2).all(|w| w[1] <= w[0] + 1e-10);
    // Timing noise allowance on top of the cubic bound.
    const SLACK: f64 = 1.5;
    let rows = &report.rows;
    let mut cubic = true;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let growth = (rows[j].basis_size as f64 / rows[i].basis_size as f64).powi(3);
            cubic &= rows[j].wall_time_s <= SLACK * growth * rows[i].wall_time_s;
        }
    }
    let table: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "n={} N={} E={:.5} t={:.2}s",
                r.nmax, r.basis_size, r.energy, r.wall_time_s
            )
        })
        .collect();
    outcome(
        dev <= 0.01 && monotone && cubic,
        format!(
            "benchmark [{}]: max |dE| = {dev:.1e} (tol 0.01), nonincreasing = {monotone}, t_j <= {SLACK}*(N_j/N_i)^3*t_i = {cubic}",
            table.join("; ")
        ),
    )
}

fn interlacing_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = rng.random_range(1..=3u32);
    let dim = Dim::new(d).unwrap();
    let l = if d == 1 {
        rng.random_range(0..=1)
    } else {
        rng.random_range(0..=2)
    };
    let mur = rng.random_range(0.5..2.0);
    let v = if rng.random_bool(0.5) {
        PotentialModel::gaussian(rng.random_range(-8.0..-0.5), rng.random_range(0.3..2.0)).unwrap()
    } else {
        let expr = format!(
            "-{:.3}*exp(-{:.3}*r^2) + {:.3}*exp(-{:.3}*r^2)",
            rng.random_range(2.0..8.0),
            rng.random_range(0.2..0.8),
            rng.random_range(0.5..3.0),
            rng.random_range(1.0..3.0)
        );
        let ast = parse_potential_expr(&expr).unwrap();
        PotentialModel::analytic(expr, move |z| ast.eval_complex(z))
    };
    let pp = PhysParams2B::new(mur, vec![v], dim)
        .and_then(|p| p.with_l_window(l, l))
        .map_err(|e| e.to_string())?;
    let n = rng.random_range(4..=8);
    let prog =
        RangeProgression::new(n, rng.random_range(0.3..1.0), rng.random_range(5.0..15.0)).unwrap();
    let nus = prog.ranges();
    let k = rng.random_range(0..n - 1);
    let extra = (nus[k] * nus[k + 1]).sqrt() * rng.random_range(0.8..1.25);
    let mut functions: Vec<BasisFunction> = nus
        .iter()
        .map(|&nu| BasisFunction::real(nu, l, dim))
        .collect();
    let small = BasisSet {
        functions: functions.clone(),
        channels: vec![0; n],
    };
    functions.push(BasisFunction::real(extra, l, dim));
    let large = BasisSet {
        functions,
        channels: vec![0; n + 1],
    };
    let solve =
        |b: &BasisSet| match assemble_with_basis(&pp, b, l, None).map_err(|e| e.to_string())? {
            Assembled::Real(sys) => sys.solve(1e-13, false).map_err(|e| e.to_string()),
            Assembled::Complex(_) => Err("unexpected complex system".to_string()),
        };
    let (a, b) = (solve(&small)?, solve(&large)?);
    if a.kept_dim != n || b.kept_dim != n + 1 {
        return Err(format!(
            "overlap truncation dropped directions ({} of {n}, {} of {})",
            a.kept_dim,
            b.kept_dim,
            n + 1
        ));
    }
    for i in 0..n {
        if b.energies[i] > a.energies[i] + 1e-10 || a.energies[i] > b.energies[i + 1] + 1e-10 {
            return Err(format!(
                "level {i}: {} / {} / {}",
                b.energies[i],
                a.energies[i],
                b.energies[i + 1]
            ));
        }
    }
    Ok(())
}

fn relabeling_case(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let masses: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.5..5.0));
    let pots: [Vec<PotentialModel>; 3] = std::array::from_fn(|i| {
        if i == 2 && rng.random_bool(0.3) {
            vec![]
        } else {
            vec![
                PotentialModel::gaussian(rng.random_range(-3.0..-0.5), rng.random_range(0.5..2.0))
                    .unwrap(),
            ]
        }
    });
    let perms = [[1, 2, 0], [2, 0, 1], [0, 2, 1], [1, 0, 2], [2, 1, 0]];
    let perm = perms[rng.random_range(0..perms.len())];
    let parity = [-1i8, 0, 1][rng.random_range(0..3)];
    let np = NumParams3B1D::new(GemParams3B::new(6, 0.3, 6.0, 6, 0.3, 8.0).unwrap())
        .with_parity_waves(0, 1, 0, 1)
        .unwrap();
    let spectrum = |p: [usize; 3]| -> Result<Vec<f64>, String> {
        let mut m = [0.0; 3];
        let mut v: [Vec<PotentialModel>; 3] = Default::default();
        for i in 0..3 {
            m[p[i]] = masses[i];
            v[p[i]] = pots[i].clone();
        }
        let pp = PhysParams3B1D::new(m, ["x", "y", "z"], v)
            .and_then(|pp| pp.with_parity(parity))
            .map_err(|e| e.to_string())?;
        energies_3b1d(&pp, &np).map_err(|e| e.to_string())
    };
    let (a, b) = (spectrum([0, 1, 2])?, spectrum(perm)?);
    if a.len() != b.len() {
        return Err(format!("{} vs {} levels", a.len(), b.len()));
    }
    Ok(max_abs_dev(&a[..4], &b[..4]))
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (hi - lo) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(lo) + f(hi) + inner) * h / 3.0
}

/// `∬ exp(-a r² - b R² - c r·R) d³r d³R` by radial quadrature, angle integrated exactly.
fn correlated_by_quadrature(a: f64, b: f64, c: f64) -> f64 {
    let lmin = 0.5 * (a + b) - (0.25 * (a - b).powi(2) + 0.25 * c * c).sqrt();
    let cut = (46.0 / lmin).sqrt();
    let weighted = |r: f64, big_r: f64| {
        let base = -a * r * r - b * big_r * big_r;
        let x = (c * r * big_r).abs();
        if x < 1e-8 {
            2.0 * base.exp()
        } else {
            ((base + x).exp() - (base - x).exp()) / x
        }
    };
    8.0 * PI
        * PI
        * simpson(
            |r| {
                simpson(
                    |big_r| r * r * big_r * big_r * weighted(r, big_r),
                    0.0,
                    cut,
                    1200,
                )
            },
            0.0,
            cut,
            1200,
        )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let interlacing: Vec<String> = (0..50)
        .filter_map(|_| interlacing_case(&mut rng).err())
        .collect();

    let mut worst_relabel = 0.0f64;
    let mut relabel_errors = Vec::new();
    for _ in 0..20 {
        match relabeling_case(&mut rng) {
            Ok(d) => worst_relabel = worst([worst_relabel, d]),
            Err(e) => relabel_errors.push(e),
        }
    }

    let mut worst_gauss = 0.0f64;
    for _ in 0..20 {
        let a = rng.random_range(0.2..3.0);
        let b = rng.random_range(0.2..3.0);
        let c = rng.random_range(-0.9..0.9) * 2.0 * f64::sqrt(a * b);
        let exact = correlated_gaussian_integral(a, b, c).unwrap_or(f64::NAN);
        let quad = correlated_by_quadrature(a, b, c);
        worst_gauss = worst([worst_gauss, ((exact - quad) / quad).abs()]);
    }

    let mut crashes = 0;
    for _ in 0..10_000 {
        let text = common::fuzz_input(&mut rng);
        let ok = catch_unwind(AssertUnwindSafe(|| match parse_potential_expr(&text) {
            Ok(e) => {
                let _ = e.eval_complex(Complex64::new(0.9, 0.3));
                e.eval(0.9);
            }
            Err(err) => assert!(err.offset <= text.len()),
        }));
        crashes += ok.is_err() as usize;
    }

    let pass = interlacing.is_empty()
        && relabel_errors.is_empty()
        && worst_relabel <= 1e-8
        && worst_gauss <= 1e-8
        && crashes == 0;
    let mut detail = format!(
        "interlacing {}/50 systems hold (tol 1e-10); relabeling max |dE| = {worst_relabel:.1e} on 20 systems (tol 1e-8); correlated Gaussian max rel dev {worst_gauss:.1e} on 20 triples (tol 1e-8); parser fuzz 10000 inputs, {crashes} crashes",
        50 - interlacing.len()
    );
    for e in interlacing.iter().chain(&relabel_errors) {
        detail.push_str(&format!("\n    {e}"));
    }
    outcome(pass, detail)
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, check) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let result = catch_unwind(check).unwrap_or_else(|_| outcome(false, "panicked"));
        println!(
            "criterion {id}: {} {}",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
        failed += !result.pass as usize;
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
