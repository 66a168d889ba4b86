mod common;

use fewbody_cli::report::density_path;
use fewbody_cli::{emit_report, parse_config, run, Format, Report};

fn without_time(mut report: Report) -> String {
    report.wall_time_s = 0.0;
    report.to_json()
}

#[test]
fn coulomb_energies_and_basis_diagnostics() {
    let report = run(&parse_config(common::coulomb_config()).unwrap()).unwrap();
    let want = [-0.499876, -0.124543, -0.054437, -0.028644];
    for (e, w) in report.energies.iter().zip(want) {
        assert!((e.re - w).abs() < 1e-5, "{} vs {w}", e.re);
        assert_eq!((e.channel, e.im), (Some(0), None));
    }
    assert_eq!(report.kept_dim, 10);
    assert_eq!(report.basis.len(), 1);
    assert_eq!(report.basis[0].size, 10);
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    for key in ["problem", "energies", "kept_dim", "basis", "wall_time_s"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    for key in [
        "observables",
        "wavefunctions",
        "resonances",
        "optimize",
        "invert",
    ] {
        assert!(json.get(key).is_none(), "{key}");
    }
}

#[test]
fn json_keys_keep_declaration_order() {
    let report = run(&parse_config(common::coulomb_config()).unwrap()).unwrap();
    let text = report.to_json();
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    assert!(
        pos("problem") < pos("energies")
            && pos("energies") < pos("kept_dim")
            && pos("basis") < pos("wall_time_s")
    );
}

#[test]
fn identical_configs_give_identical_reports() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/coulomb.json"
    ))
    .unwrap();
    let a = without_time(run(&parse_config(&text).unwrap()).unwrap());
    let b = without_time(run(&parse_config(&text).unwrap()).unwrap());
    assert_eq!(a, b);
    let larger = common::coulomb_config().replace("\"nmax\": 10", "\"nmax\": 14");
    let c = without_time(run(&parse_config(&larger).unwrap()).unwrap());
    let d = without_time(run(&parse_config(&larger).unwrap()).unwrap());
    assert_eq!(c, d);
}

#[test]
fn three_body_reports_are_deterministic() {
    let text = r#"{
        "problem": "three_body_3d",
        "phys": { "masses": [1, 2, 3], "svals": ["x", "y", "z"],
                  "potentials": [[{"type": "expr", "expr": "-10*exp(-r^2)"}], [{"type": "gaussian", "v0": -10, "mu": 1}], []] },
        "num": { "nmax": 5, "r1": 0.2, "rnmax": 10, "Nmax": 5, "R1": 0.2, "RNmax": 10 },
        "observ": { "stateindices": [1, 2], "centobs": [[{"type": "expr", "expr": "r^2"}], [], []], "r2": [false, true, false] }
    }"#;
    let spec = parse_config(text).unwrap();
    let a = run(&spec).unwrap();
    assert_eq!(a.observables.len(), 2);
    assert_eq!(a.observables[0].values.len(), 2);
    assert_eq!(without_time(a), without_time(run(&spec).unwrap()));
}

#[test]
fn csv_has_header_and_one_row_per_state() {
    let report = run(&parse_config(common::coulomb_config()).unwrap()).unwrap();
    let csv = report.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), report.energies.len() + 1);
    assert_eq!(lines[0], "channel,state,energy_re,energy_im,width");
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0..2], ["0", "1"]);
    assert_eq!(first[2].parse::<f64>().unwrap(), report.energies[0].re);
}

#[test]
fn csv_observable_columns() {
    let text = r#"{
        "problem": "three_body_3d",
        "phys": { "masses": [1, 1, 1], "svals": ["x", "y", "z"],
                  "potentials": [[{"type": "gaussian", "v0": -5, "mu": 1}], [{"type": "gaussian", "v0": -5, "mu": 1}], []] },
        "num": { "nmax": 4, "r1": 0.3, "rnmax": 8, "Nmax": 4, "R1": 0.3, "RNmax": 8 },
        "observ": { "stateindices": [1], "centobs": [[{"type": "expr", "expr": "r"}], [], []], "r2": [true, false, false] }
    }"#;
    let report = run(&parse_config(text).unwrap()).unwrap();
    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "channel,state,energy_re,energy_im,width,set1:r,set1:R^2"
    );
    let row1: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(row1[5].parse::<f64>().unwrap() > 0.0 && row1[6].parse::<f64>().unwrap() > 0.0);
    let row2: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row2[5..], ["", ""]);
}

#[test]
fn hydrogen_densities_integrate_to_one() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/coulomb.json"
    ))
    .unwrap();
    let mut spec = parse_config(&text).unwrap();
    spec.output.wf_states = 3;
    let report = run(&spec).unwrap();
    assert_eq!(report.wavefunctions.len(), 3);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.json");
    let files = emit_report(&report, Format::Json, Some(&out)).unwrap();
    assert_eq!(files.len(), 3);
    for (wf, file) in report.wavefunctions.iter().zip(&files) {
        assert_eq!(*file, density_path(&out, wf));
        let rows: Vec<(f64, f64)> = std::fs::read_to_string(file)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| {
                let mut it = l.split_whitespace().map(|x| x.parse::<f64>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        let dr = rows[1].0 - rows[0].0;
        let riemann: f64 = rows.iter().map(|(_, d)| d * dr).sum();
        assert!(
            (riemann - 1.0).abs() < 1e-4,
            "state {}: {riemann}",
            wf.state
        );
        assert!((riemann - wf.norm).abs() < 1e-12);
    }
    let reread: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(reread["wavefunctions"].as_array().unwrap().len(), 3);
}

#[test]
fn one_dimensional_grids_span_both_signs() {
    let text = r#"{
        "problem": "two_body",
        "phys": { "mur": 0.5, "dim": 1, "lmax": 1, "potentials": [{"type": "gaussian", "v0": -4, "mu": 1}] },
        "num": { "nmax": 12, "r1": 0.1, "rnmax": 10 },
        "flags": { "wf": true },
        "output": { "wf_states": 1, "grid": { "rmax": 40, "points": 8001 } }
    }"#;
    let report = run(&parse_config(text).unwrap()).unwrap();
    assert_eq!(report.wavefunctions.len(), 2);
    for wf in &report.wavefunctions {
        assert_eq!(wf.r[0], -40.0);
        assert!(
            (wf.norm - 1.0).abs() < 1e-6,
            "channel {}: {}",
            wf.channel,
            wf.norm
        );
    }
}

#[test]
fn inversion_hits_the_target() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/gaussian_invert.json"
    ))
    .unwrap();
    let report = run(&parse_config(&text).unwrap()).unwrap();
    let inv = report.invert.unwrap();
    assert!((inv.energy + 1e-3).abs() <= 1e-9);
    assert!((report.energies[0].re + 1e-3).abs() <= 1e-9);
    assert_eq!(report.optimize.unwrap().r1, inv.r1);
}

#[test]
fn complex_scaling_reports_widths_and_resonances() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/resonance.json"
    ))
    .unwrap();
    let report = run(&parse_config(&text).unwrap()).unwrap();
    assert!(report
        .energies
        .iter()
        .all(|e| e.width == Some(-2.0 * e.im.unwrap())));
    assert_eq!(report.resonances.len(), 1);
    let r = &report.resonances[0];
    assert!(
        (r.re - 0.0932).abs() < 1e-3 && (r.im + 0.0151).abs() < 1e-3,
        "{r:?}"
    );
}
