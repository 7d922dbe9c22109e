//! End-to-end tests of the `jointspec` binary: files in, files out,
//! byte-reproducible, errors with useful exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_jointspec")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn run_err(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "command {:?} unexpectedly succeeded", args);
    String::from_utf8(out.stderr).unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn jc_small_model_rows() {
    let dir = tmp_dir("jc_small");
    let out = dir.join("spec.csv");
    run_ok(&["jc", "--n", "1", "--t-max", "1", "--out", out.to_str().unwrap()]);
    let rows = csv_rows(&read(&out));
    assert_eq!(rows.len(), 3);
    // Sorted points: (0, 0), (1, -1/(2 sqrt 2)), (1, +1/(2 sqrt 2)).
    let f = |s: &str| s.parse::<f64>().unwrap();
    assert_eq!(f(&rows[0][1]), 0.0);
    assert_eq!(f(&rows[0][2]), 0.0);
    assert!((f(&rows[1][1]) - 1.0).abs() < 1e-15);
    assert!((f(&rows[1][2]) + 0.35355339059327373).abs() < 1e-15);
    assert!((f(&rows[2][2]) - 0.35355339059327373).abs() < 1e-15);
    // hbar column: 2/(n+1) = 1.
    assert_eq!(f(&rows[0][0]), 1.0);
}

#[test]
fn jc_spin_zero_has_flat_second_coordinate() {
    let dir = tmp_dir("jc_n0");
    let out = dir.join("spec.csv");
    run_ok(&["jc", "--n", "0", "--t-max", "3", "--out", out.to_str().unwrap()]);
    let rows = csv_rows(&read(&out));
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn jc_trunc_flag_runs_cross_check() {
    let dir = tmp_dir("jc_trunc");
    let out = dir.join("spec.csv");
    let stdout = run_ok(&[
        "jc", "--n", "2", "--t-max", "6", "--trunc", "10", "--out", out.to_str().unwrap(),
    ]);
    assert!(stdout.contains("cross-check vs full build"), "stdout: {}", stdout);
    let within: f64 = stdout
        .split("match within ")
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(within <= 1e-12, "cross-check deviation {}", within);
}

#[test]
fn jc_row_count_matches_multiplicity_sum() {
    let dir = tmp_dir("jc_counts");
    let out = dir.join("spec.csv");
    run_ok(&["jc", "--n", "2", "--t-max", "5", "--out", out.to_str().unwrap()]);
    let rows = csv_rows(&read(&out));
    // sum over T <= 5 of min(T, 2) + 1 = 1 + 2 + 3 + 3 + 3 + 3.
    assert_eq!(rows.len(), 15);
    let total: usize = rows.iter().map(|r| r[3].parse::<usize>().unwrap()).sum();
    assert_eq!(total, 15);
}

#[test]
fn toric_s2_and_product_rows() {
    let dir = tmp_dir("toric_rows");
    let out = dir.join("s2.csv");
    let stdout = run_ok(&["toric", "--model", "s2", "--k", "2", "--out", out.to_str().unwrap()]);
    let rows = csv_rows(&read(&out));
    assert_eq!(rows.len(), 3);
    let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(values, vec![-0.5, 0.0, 0.5]);
    assert!(stdout.contains("lattice axis 0"), "missing lattice summary:\n{}", stdout);
    assert!(stdout.contains("oracle agreement"));

    let out = dir.join("prod.csv");
    run_ok(&["toric", "--model", "s2xs2", "--k", "1", "--out", out.to_str().unwrap()]);
    let rows = csv_rows(&read(&out));
    assert_eq!(rows.len(), 4);
    for row in &rows {
        for coord in &row[1..3] {
            let v: f64 = coord.parse().unwrap();
            assert!((v.abs() - 1.0 / 3.0).abs() < 1e-15);
        }
    }
}

#[test]
fn toric_rejects_k_zero_and_unknown_model() {
    let dir = tmp_dir("toric_bad");
    let out = dir.join("x.csv");
    let err = run_err(&["toric", "--model", "s2", "--k", "0", "--out", out.to_str().unwrap()]);
    assert!(err.contains("k"), "stderr: {}", err);
    let err = run_err(&["toric", "--model", "cp2", "--k", "3", "--out", out.to_str().unwrap()]);
    assert!(err.contains("unknown model"), "stderr: {}", err);
}

#[test]
fn classical_outputs_hull_json() {
    let dir = tmp_dir("classical");
    let out = dir.join("s2.csv");
    run_ok(&["classical", "--model", "s2", "--out", out.to_str().unwrap()]);
    let hull = read(&dir.join("s2.hull.json"));
    assert!(hull.contains("\"dim\": 1"));
    assert!(hull.contains("-1.0000000000000000e0"));
    assert!(hull.contains("1.0000000000000000e0"));

    let out = dir.join("prod.csv");
    run_ok(&["classical", "--model", "s2xs2", "--out", out.to_str().unwrap()]);
    let hull = read(&dir.join("prod.hull.json"));
    assert!(hull.contains("\"dim\": 2"));
    // Four square corners.
    assert_eq!(hull.matches("[-1.0000000000000000e0, -1.0000000000000000e0]").count(), 1);

    let out = dir.join("jc.csv");
    run_ok(&[
        "classical", "--model", "jc", "--window", "3", "--res", "24",
        "--out", out.to_str().unwrap(),
    ]);
    let rows = csv_rows(&read(&out));
    assert!(!rows.is_empty());
    let (mut f2_min, mut f2_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in &rows {
        let f1: f64 = row[0].parse().unwrap();
        let f2: f64 = row[1].parse().unwrap();
        assert!(f1 <= 3.0 + 1e-12);
        f2_min = f2_min.min(f2);
        f2_max = f2_max.max(f2);
    }
    assert!((f2_max + f2_min).abs() <= 1e-9, "f2 range asymmetric");

    // Hull vertex set inherits the symmetry (within grid tolerance).
    let hull = read(&dir.join("jc.hull.json"));
    let verts: Vec<(f64, f64)> = hull
        .split('[')
        .filter_map(|chunk| {
            let inner = chunk.split(']').next()?;
            let cells: Vec<&str> = inner.split(',').map(|s| s.trim()).collect();
            if cells.len() == 2 {
                Some((cells[0].parse().ok()?, cells[1].parse().ok()?))
            } else {
                None
            }
        })
        .collect();
    assert!(verts.len() >= 3, "hull json vertices: {}", hull);
    let vmax = verts.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let vmin = verts.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    assert!((vmax + vmin).abs() <= 1e-9, "hull asymmetric: {} vs {}", vmax, vmin);

    let err = run_err(&[
        "classical", "--model", "jc", "--window", "-2", "--out", out.to_str().unwrap(),
    ]);
    assert!(err.contains("window"), "stderr: {}", err);
}

#[test]
fn converge_table_matches_closed_form() {
    let dir = tmp_dir("converge");
    let out = dir.join("table.csv");
    run_ok(&[
        "converge", "--model", "s2", "--k-list", "4,8,16,32,64",
        "--out", out.to_str().unwrap(),
    ]);
    let text = read(&out);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    let expect = [1.0 / 3.0, 0.2, 1.0 / 9.0, 1.0 / 17.0, 1.0 / 33.0];
    for (row, want) in rows.iter().zip(expect) {
        let dh: f64 = row[2].parse().unwrap();
        assert!((dh - want).abs() <= 1e-12, "dH {} vs {}", dh, want);
    }
    let footer = text.lines().last().unwrap();
    assert!(footer.starts_with("# fit: alpha="), "footer: {}", footer);
    let alpha: f64 = footer
        .split("alpha=")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((alpha - 1.0).abs() <= 0.1, "alpha {}", alpha);

    let err = run_err(&[
        "converge", "--model", "s2", "--k-list", "4,8,16", "--out", out.to_str().unwrap(),
    ]);
    assert!(err.contains("at least 4"), "stderr: {}", err);
}

#[test]
fn recover_pipeline_and_error_paths() {
    let dir = tmp_dir("recover");
    let mut inputs = Vec::new();
    for k in [8u64, 16, 32] {
        let path = dir.join(format!("k{}.csv", k));
        run_ok(&[
            "toric", "--model", "s2xs2", "--k", &k.to_string(),
            "--out", path.to_str().unwrap(),
        ]);
        inputs.push(path);
    }
    let out = dir.join("polytope.json");
    let stdout = run_ok(&[
        "recover",
        "--in", inputs[0].to_str().unwrap(),
        "--in", inputs[1].to_str().unwrap(),
        "--in", inputs[2].to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert!(stdout.contains("delzant=true"), "stdout: {}", stdout);
    let json = read(&out);
    assert!(json.contains("\"dim\": 2"));
    assert!(json.contains("\"delzant\": true"));
    for corner in ["[1.0000000000000000e0, 1.0000000000000000e0]",
                   "[-1.0000000000000000e0, -1.0000000000000000e0]"] {
        assert!(json.contains(corner), "missing corner {} in {}", corner, json);
    }

    // One input only: not enough semiclassical parameters.
    let err = run_err(&[
        "recover", "--in", inputs[0].to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert!(err.contains("at least 3"), "stderr: {}", err);

    // Tampered file: duplicate an eigenvalue row as multiplicity 2.
    let tampered = dir.join("tampered.csv");
    let text = read(&inputs[0]);
    let mut lines: Vec<String> = text.lines().map(|s| s.to_string()).collect();
    let row = lines[1].clone();
    let mut fields: Vec<&str> = row.split(',').collect();
    fields[3] = "2";
    lines[1] = fields.join(",");
    std::fs::write(&tampered, lines.join("\n") + "\n").unwrap();
    let err = run_err(&[
        "recover",
        "--in", tampered.to_str().unwrap(),
        "--in", inputs[1].to_str().unwrap(),
        "--in", inputs[2].to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert!(err.contains("multiplicity 2"), "stderr: {}", err);
}

#[test]
fn recover_rejects_non_lattice_spectra() {
    // Spin-oscillator spectra are not affine lattices; the pipeline's
    // lattice gate must say so rather than produce a polytope.
    let dir = tmp_dir("recover_non_lattice");
    let mut inputs = Vec::new();
    for n in [3usize, 5, 7] {
        let path = dir.join(format!("jc{}.csv", n));
        run_ok(&[
            "jc", "--n", &n.to_string(), "--t-max", "12", "--out", path.to_str().unwrap(),
        ]);
        inputs.push(path);
    }
    let out = dir.join("polytope.json");
    let err = run_err(&[
        "recover",
        "--in", inputs[0].to_str().unwrap(),
        "--in", inputs[1].to_str().unwrap(),
        "--in", inputs[2].to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert!(err.contains("lattice"), "stderr: {}", err);
    assert!(!out.exists());
}

#[test]
fn plot_handles_empty_strip_and_malformed_inputs() {
    let dir = tmp_dir("plot");
    // Header-only file: axes-only SVG.
    let empty = dir.join("empty.csv");
    std::fs::write(&empty, "hbar,lambda1,lambda2,multiplicity\n").unwrap();
    let svg = dir.join("empty.svg");
    run_ok(&["plot", "--in", empty.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    let text = read(&svg);
    assert!(text.contains("<rect"));
    assert!(!text.contains("<circle"));

    // One-dimensional spectrum: strip plot.
    let s2 = dir.join("s2.csv");
    run_ok(&["toric", "--model", "s2", "--k", "4", "--out", s2.to_str().unwrap()]);
    let svg1 = dir.join("s2.svg");
    run_ok(&["plot", "--in", s2.to_str().unwrap(), "--out", svg1.to_str().unwrap()]);
    let text = read(&svg1);
    assert_eq!(text.matches("<circle").count(), 5);
    // Strip convention: all markers share one vertical position.
    let mut cys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("<circle"))
        .map(|l| {
            let s = l.find("cy=\"").unwrap() + 4;
            let e = l[s..].find('"').unwrap() + s;
            &l[s..e]
        })
        .collect();
    cys.dedup();
    assert_eq!(cys.len(), 1);

    // Bad column count points at the offending line.
    let bad = dir.join("bad.csv");
    std::fs::write(&bad, "hbar,lambda1,lambda2,multiplicity\n0.5,0.1,0.2,1\n0.5,0.1,1\n").unwrap();
    let err = run_err(&["plot", "--in", bad.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert!(err.contains("line 3"), "stderr: {}", err);
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = tmp_dir("determinism");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for path in [&a, &b] {
        run_ok(&[
            "toric", "--model", "s2xs2", "--k", "5", "--seed", "9",
            "--out", path.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let ja = dir.join("a.json");
    let jb = dir.join("b.json");
    let mut inputs = Vec::new();
    for k in [8u64, 16, 32] {
        let path = dir.join(format!("k{}.csv", k));
        run_ok(&["toric", "--model", "s2", "--k", &k.to_string(), "--out", path.to_str().unwrap()]);
        inputs.push(path);
    }
    for out in [&ja, &jb] {
        run_ok(&[
            "recover",
            "--in", inputs[0].to_str().unwrap(),
            "--in", inputs[1].to_str().unwrap(),
            "--in", inputs[2].to_str().unwrap(),
            "--out", out.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&ja).unwrap(), std::fs::read(&jb).unwrap());
}

#[test]
fn spectrum_round_trips_bit_exactly_through_files() {
    let dir = tmp_dir("roundtrip");
    let path = dir.join("s2xs2.csv");
    run_ok(&["toric", "--model", "s2xs2", "--k", "7", "--out", path.to_str().unwrap()]);
    let text = read(&path);
    let parsed = jointspec::cli::parse_spectrum_csv(&text).unwrap();
    let rewritten = jointspec::cli::spectrum_csv(&parsed);
    assert_eq!(text, rewritten);
}

#[test]
fn config_file_merges_below_flags() {
    let dir = tmp_dir("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# defaults\nn=3\nt-max=2\n").unwrap();
    let out = dir.join("a.csv");
    run_ok(&["jc", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    // n=3, t_max=2: 1 + 2 + 3 rows.
    assert_eq!(csv_rows(&read(&out)).len(), 6);

    // Flag overrides the file.
    let out2 = dir.join("b.csv");
    run_ok(&[
        "jc", "--config", cfg.to_str().unwrap(), "--n", "1",
        "--out", out2.to_str().unwrap(),
    ]);
    // n=1, t_max=2 (from file): 1 + 2 + 2 rows.
    assert_eq!(csv_rows(&read(&out2)).len(), 5);
}

#[test]
fn unwritable_output_path_fails() {
    let err = run_err(&["jc", "--n", "1", "--t-max", "1", "--out", "/nonexistent-dir/x.csv"]);
    assert!(err.contains("error"), "stderr: {}", err);
}
