//! Command-line front end: catalog models in, flat files out.
//!
//! Subcommands: `jc`, `toric`, `classical`, `converge`, `recover`, `plot`.
//! All file formats are plain text with floats at 17 significant digits,
//! so runs are byte-reproducible and values round-trip exactly. An
//! optional `key=value` config file merges below the flags; there are no
//! environment variables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::inverse::{fit_lattice, recover, RecoverOptions, RecoveryReport};
use crate::operators::SemiclassicalParam;
use crate::quantize::{jc_block_spectrum, toric_family, ToricModel, ToricModelName};
use crate::spectra::{
    classical_spectrum, convergence_study, default_cluster_tol, joint_spectrum,
    random_combination_check, hausdorff_points, ClassicalSystem, ConvergenceStudy, Hull,
    JointPoint, JointSpectrum,
};
use crate::{Error, Result};

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Jc,
    Toric,
    Classical,
    Converge,
    Recover,
    Plot,
}

impl Command {
    fn parse(name: &str) -> Result<Command> {
        match name {
            "jc" => Ok(Command::Jc),
            "toric" => Ok(Command::Toric),
            "classical" => Ok(Command::Classical),
            "converge" => Ok(Command::Converge),
            "recover" => Ok(Command::Recover),
            "plot" => Ok(Command::Plot),
            other => Err(Error::InvalidArgument(format!(
                "unknown command '{}' (expected jc | toric | classical | converge | recover | plot)",
                other
            ))),
        }
    }
}

/// Fully resolved invocation: command plus every parameter it may need.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub model: Option<String>,
    pub n: usize,
    pub k: u64,
    pub t_max: usize,
    pub trunc: Option<usize>,
    pub k_list: Vec<u64>,
    pub tol: Option<f64>,
    pub window: f64,
    pub resolution: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub inputs: Vec<PathBuf>,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if let Some(tol) = self.tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::InvalidArgument("tolerance must be positive".into()));
            }
        }
        for w in self.k_list.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidArgument(
                    "k-list must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

fn parse_flag_stream(args: &[String]) -> Result<BTreeMap<String, Vec<String>>> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        let key = arg
            .strip_prefix("--")
            .ok_or_else(|| Error::InvalidArgument(format!("expected a --flag, got '{}'", arg)))?;
        let value = args
            .get(i + 1)
            .ok_or_else(|| Error::InvalidArgument(format!("flag --{} needs a value", key)))?;
        map.entry(key.to_string()).or_default().push(value.clone());
        i += 2;
    }
    Ok(map)
}

/// Merge `key=value` lines at lower precedence than the flags.
fn merge_config_file(map: &mut BTreeMap<String, Vec<String>>, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path)?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::CsvFormat {
            line: lineno + 1,
            message: format!("expected key=value in config file, got '{}'", line),
        })?;
        map.entry(key.trim().to_string())
            .or_insert_with(|| vec![value.trim().to_string()]);
    }
    Ok(())
}

struct FlagReader {
    map: BTreeMap<String, Vec<String>>,
}

impl FlagReader {
    fn single(&self, key: &str) -> Result<Option<&str>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(v[0].as_str())),
            Some(_) => Err(Error::InvalidArgument(format!("flag --{} given more than once", key))),
        }
    }

    fn many(&self, key: &str) -> Vec<String> {
        self.map.get(key).cloned().unwrap_or_default()
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.single(key)? {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("--{} expects an integer, got '{}'", key, s))),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        match self.single(key)? {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidArgument(format!("--{} expects a number, got '{}'", key, s))),
        }
    }

    fn path_opt(&self, key: &str) -> Result<Option<PathBuf>> {
        Ok(self.single(key)?.map(PathBuf::from))
    }

    fn k_list(&self) -> Result<Vec<u64>> {
        match self.single("k-list")? {
            None => Ok(Vec::new()),
            Some(s) => s
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<u64>().map_err(|_| {
                        Error::InvalidArgument(format!("--k-list entry '{}' is not an integer", tok))
                    })
                })
                .collect(),
        }
    }
}

const KNOWN_FLAGS: &[&str] = &[
    "model", "n", "k", "t-max", "trunc", "k-list", "tol", "window", "res", "seed", "out",
    "svg", "in", "config",
];

/// Parse a full argument vector (without the program name) into a
/// [`RunConfig`].
pub fn parse_args(args: &[String]) -> Result<RunConfig> {
    let command_name = args
        .first()
        .ok_or_else(|| Error::InvalidArgument("missing command".into()))?;
    let command = Command::parse(command_name)?;
    let mut map = parse_flag_stream(&args[1..])?;
    let config_path = map.get("config").and_then(|v| v.first()).cloned();
    if let Some(path) = config_path {
        merge_config_file(&mut map, Path::new(&path))?;
    }
    if let Some(unknown) = map.keys().find(|k| !KNOWN_FLAGS.contains(&k.as_str())) {
        return Err(Error::InvalidArgument(format!("unknown flag --{}", unknown)));
    }
    let flags = FlagReader { map };

    let config = RunConfig {
        command,
        model: flags.single("model")?.map(|s| s.to_string()),
        n: flags.usize_or("n", 5)?,
        k: flags.u64_or("k", 0)?,
        t_max: flags.usize_or("t-max", 40)?,
        trunc: flags.single("trunc")?.map(|s| s.parse()).transpose().map_err(|_| {
            Error::InvalidArgument("--trunc expects an integer".into())
        })?,
        k_list: flags.k_list()?,
        tol: flags.f64_opt("tol")?,
        window: flags.f64_opt("window")?.unwrap_or(3.0),
        resolution: flags.usize_or("res", 32)?,
        seed: flags.u64_or("seed", 0)?,
        out: flags.path_opt("out")?,
        svg: flags.path_opt("svg")?,
        inputs: flags.many("in").into_iter().map(PathBuf::from).collect(),
    };
    config.validate()?;
    Ok(config)
}

/// Entry point used by the binary: parse, dispatch, print.
pub fn run(args: &[String]) -> Result<()> {
    let config = parse_args(args)?;
    match config.command {
        Command::Jc => cmd_jc(&config),
        Command::Toric => cmd_toric(&config),
        Command::Classical => cmd_classical(&config),
        Command::Converge => cmd_converge(&config),
        Command::Recover => cmd_recover(&config),
        Command::Plot => cmd_plot(&config),
    }
}

fn require_out(config: &RunConfig) -> Result<&PathBuf> {
    config
        .out
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--out is required".into()))
}

// ---------------------------------------------------------------------------
// Spectrum CSV
// ---------------------------------------------------------------------------

/// Render a joint spectrum as CSV (`hbar,lambda1[,lambda2],multiplicity`).
pub fn spectrum_csv(js: &JointSpectrum) -> String {
    let d = js.d();
    let mut out = String::new();
    match d {
        1 => out.push_str("hbar,lambda1,multiplicity\n"),
        _ => out.push_str("hbar,lambda1,lambda2,multiplicity\n"),
    }
    let hbar = fmt_f64(js.param().hbar());
    for p in js.points() {
        out.push_str(&hbar);
        for c in &p.coords {
            out.push(',');
            out.push_str(&fmt_f64(*c));
        }
        let _ = writeln!(out, ",{}", p.multiplicity);
    }
    out
}

/// Parse a spectrum CSV produced by [`spectrum_csv`]; errors carry the
/// 1-based offending line.
pub fn parse_spectrum_csv(text: &str) -> Result<JointSpectrum> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(Error::CsvFormat { line: 1, message: "empty file".into() })?;
    let d = match header.trim() {
        "hbar,lambda1,multiplicity" => 1,
        "hbar,lambda1,lambda2,multiplicity" => 2,
        other => {
            return Err(Error::CsvFormat {
                line: 1,
                message: format!("unrecognized header '{}'", other),
            })
        }
    };
    let mut hbar: Option<f64> = None;
    let mut points = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 2 {
            return Err(Error::CsvFormat {
                line: lineno,
                message: format!("expected {} columns, found {}", d + 2, fields.len()),
            });
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::CsvFormat {
                line: lineno,
                message: format!("'{}' is not a number", s),
            })
        };
        let row_hbar = parse_f(fields[0])?;
        if row_hbar.is_nan() || row_hbar <= 0.0 {
            return Err(Error::CsvFormat { line: lineno, message: "hbar must be positive".into() });
        }
        match hbar {
            None => hbar = Some(row_hbar),
            Some(h) if h == row_hbar => {}
            Some(h) => {
                return Err(Error::CsvFormat {
                    line: lineno,
                    message: format!("inconsistent hbar: {} vs {}", h, row_hbar),
                })
            }
        }
        let mut coords = Vec::with_capacity(d);
        for f in &fields[1..=d] {
            coords.push(parse_f(f)?);
        }
        let multiplicity: usize = fields[d + 1].trim().parse().map_err(|_| Error::CsvFormat {
            line: lineno,
            message: format!("'{}' is not a multiplicity", fields[d + 1]),
        })?;
        if multiplicity == 0 {
            return Err(Error::CsvFormat {
                line: lineno,
                message: "multiplicity must be at least 1".into(),
            });
        }
        points.push(JointPoint { coords, multiplicity });
    }
    let hbar = hbar.ok_or(Error::CsvFormat { line: 2, message: "no data rows".into() })?;
    Ok(JointSpectrum::new(SemiclassicalParam::from_hbar(hbar), points, 0.0))
}

// ---------------------------------------------------------------------------
// SVG scatter plots
// ---------------------------------------------------------------------------

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 56.0;

fn fmt_px(x: f64) -> String {
    format!("{:.4}", x)
}

/// Self-contained scatter plot of a point set (one-dimensional spectra
/// plot as a strip at height zero). Marker radius grows with the square
/// root of the multiplicity. Byte-deterministic for fixed input.
pub fn spectrum_svg(points: &[JointPoint]) -> String {
    let d = points.first().map_or(2, |p| p.coords.len());
    let xy = |p: &JointPoint| -> (f64, f64) {
        if d == 1 {
            (p.coords[0], 0.0)
        } else {
            (p.coords[0], p.coords[1])
        }
    };
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let (x, y) = xy(p);
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if points.is_empty() {
        xmin = -1.0;
        xmax = 1.0;
        ymin = -1.0;
        ymax = 1.0;
    }
    if xmax - xmin < 1e-300 {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if ymax - ymin < 1e-300 {
        ymin -= 1.0;
        ymax += 1.0;
    }
    let pad_x = 0.05 * (xmax - xmin);
    let pad_y = 0.05 * (ymax - ymin);
    xmin -= pad_x;
    xmax += pad_x;
    ymin -= pad_y;
    ymax += pad_y;

    let plot_w = SVG_W - MARGIN_L - MARGIN_R;
    let plot_h = SVG_H - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = |y: f64| SVG_H - MARGIN_B - (y - ymin) / (ymax - ymin) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        SVG_W, SVG_H, SVG_W, SVG_H
    );
    let _ = writeln!(svg, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>", SVG_W, SVG_H);
    let _ = writeln!(
        svg,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        fmt_px(MARGIN_L),
        fmt_px(MARGIN_T),
        fmt_px(plot_w),
        fmt_px(plot_h)
    );
    // Axis ticks: five per axis, value labels beneath/beside.
    for i in 0..5 {
        let f = i as f64 / 4.0;
        let xv = xmin + f * (xmax - xmin);
        let yv = ymin + f * (ymax - ymin);
        let x = sx(xv);
        let y = sy(yv);
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
            fmt_px(x),
            fmt_px(SVG_H - MARGIN_B),
            fmt_px(x),
            fmt_px(SVG_H - MARGIN_B + 6.0)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{:.4}</text>",
            fmt_px(x),
            fmt_px(SVG_H - MARGIN_B + 20.0),
            xv
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
            fmt_px(MARGIN_L - 6.0),
            fmt_px(y),
            fmt_px(MARGIN_L),
            fmt_px(y)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.4}</text>",
            fmt_px(MARGIN_L - 9.0),
            fmt_px(y + 4.0),
            yv
        );
    }
    for p in points {
        let (x, y) = xy(p);
        let r = 2.0 * (p.multiplicity as f64).sqrt();
        let _ = writeln!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\" fill-opacity=\"0.75\"/>",
            fmt_px(sx(x)),
            fmt_px(sy(y)),
            fmt_px(r)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

// ---------------------------------------------------------------------------
// JSON emission (hand-rolled for stable field order and number format)
// ---------------------------------------------------------------------------

fn json_point_array(values: &[Vec<f64>]) -> String {
    let rows: Vec<String> = values
        .iter()
        .map(|v| {
            let cells: Vec<String> = v.iter().map(|x| fmt_f64(*x)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn json_int_array(values: &[Vec<i64>]) -> String {
    let rows: Vec<String> = values
        .iter()
        .map(|v| {
            let cells: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Polytope JSON per the recovery output schema.
pub fn polytope_json(report: &RecoveryReport) -> String {
    let max_lattice = report
        .lattice_fits
        .iter()
        .map(|f| f.residual)
        .fold(0.0f64, f64::max);
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"dim\": {},", report.polytope.dim());
    let _ = writeln!(s, "  \"vertices\": {},", json_point_array(&report.polytope.vertices_f64()));
    let _ = writeln!(s, "  \"edge_normals\": {},", json_int_array(&report.polytope.edge_normals()));
    let _ = writeln!(s, "  \"delzant\": {},", report.delzant);
    let _ = writeln!(s, "  \"residuals\": {{");
    let _ = writeln!(s, "    \"lattice\": {},", fmt_f64(max_lattice));
    let _ = writeln!(s, "    \"extrapolation\": {},", fmt_f64(report.extrapolation_residual));
    let _ = writeln!(s, "    \"rounding\": {}", fmt_f64(report.rounding_delta));
    let _ = writeln!(s, "  }}");
    s.push_str("}\n");
    s
}

fn hull_json(hull: &Hull) -> String {
    let vertices: Vec<Vec<f64>> = match hull {
        Hull::D1(iv) => vec![vec![iv.lo], vec![iv.hi]],
        Hull::D2(poly) => poly.vertices().iter().map(|v| vec![v[0], v[1]]).collect(),
    };
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"dim\": {},", hull.dim());
    let _ = writeln!(s, "  \"vertices\": {}", json_point_array(&vertices));
    s.push_str("}\n");
    s
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// `jc`: joint spectrum of the spin-oscillator model from the exact
/// blocks, as CSV (plus an optional SVG scatter). With `--trunc` the
/// blocks are cross-validated against the full tensor-product build on
/// that oscillator truncation.
pub fn cmd_jc(config: &RunConfig) -> Result<()> {
    let out = require_out(config)?;
    let js = jc_block_spectrum(config.n, config.t_max)?;
    fs::write(out, spectrum_csv(&js))?;
    if let Some(svg_path) = &config.svg {
        fs::write(svg_path, spectrum_svg(js.points()))?;
    }
    println!(
        "jc: n={} t_max={} -> {} joint points ({} distinct f1 levels) -> {}",
        config.n,
        config.t_max,
        js.points().len(),
        config.t_max + 1,
        out.display()
    );
    if let Some(trunc) = config.trunc {
        if trunc <= config.n + 1 {
            return Err(Error::InvalidArgument(format!(
                "--trunc {} leaves no interior blocks for n = {}",
                trunc, config.n
            )));
        }
        let fam = crate::quantize::jc_full_family(config.n, trunc)?;
        let full = joint_spectrum(&fam, default_cluster_tol(&fam))?;
        let interior = crate::quantize::jc_block_spectrum(config.n, trunc - config.n - 1)?;
        let mut worst = 0.0f64;
        for bp in interior.points() {
            let best = full
                .points()
                .iter()
                .map(|p| {
                    p.coords
                        .iter()
                        .zip(&bp.coords)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        println!(
            "cross-check vs full build (trunc {}): interior blocks match within {:.3e}",
            trunc, worst
        );
    }
    Ok(())
}

/// `toric`: joint spectrum of a toric catalog model with a lattice-fit
/// summary printed alongside.
pub fn cmd_toric(config: &RunConfig) -> Result<()> {
    let out = require_out(config)?;
    let model_name = config
        .model
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--model is required".into()))?;
    if config.k < 1 {
        return Err(Error::InvalidArgument("--k must be at least 1".into()));
    }
    let model = ToricModel::parse(model_name, config.k)?;
    let fam = toric_family(&model)?;
    let cluster_tol = config.tol.unwrap_or_else(|| default_cluster_tol(&fam));
    let js = joint_spectrum(&fam, cluster_tol)?;
    fs::write(out, spectrum_csv(&js))?;

    let fit = fit_lattice(&js)?;
    let k = config.k as f64;
    println!(
        "toric: model={} k={} -> {} points, residual {:.3e} -> {}",
        model_name,
        config.k,
        js.points().len(),
        js.residual(),
        out.display()
    );
    for axis in 0..fit.spacing.len() {
        println!(
            "lattice axis {}: origin {} spacing {} (fit residual {:.3e})",
            axis,
            fmt_f64(fit.origin[axis]),
            fmt_f64(fit.spacing[axis]),
            fit.residual
        );
    }
    // The spacing constant is estimated, never assumed; report how it
    // compares to the two natural normalizations.
    let s = fit.mean_spacing();
    println!(
        "spacing ratios: s*(k+2)/2 = {:.12}, s*k/(2*pi) = {:.12}",
        s * (k + 2.0) / 2.0,
        s * k / std::f64::consts::TAU
    );
    if fam.dim() <= 500 {
        let oracle = random_combination_check(&fam, config.seed)?;
        let agreement = hausdorff_points(&js.coords_cloud(), &oracle.coords_cloud())?;
        println!("oracle agreement (seed {}): {:.3e}", config.seed, agreement);
    }
    Ok(())
}

/// `classical`: sampled classical spectrum as CSV plus a hull JSON next
/// to it (`<out with extension hull.json>`).
pub fn cmd_classical(config: &RunConfig) -> Result<()> {
    let out = require_out(config)?;
    let model_name = config
        .model
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--model is required".into()))?;
    let sys = match model_name.to_ascii_lowercase().as_str() {
        "s2" => ClassicalSystem::S2,
        "s2xs2" => ClassicalSystem::S2xS2,
        "jc" => ClassicalSystem::jaynes_cummings(config.window),
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    let cs = classical_spectrum(&sys, config.resolution, None)?;
    let d = sys.d();
    let mut csv = String::new();
    csv.push_str(if d == 1 { "f1\n" } else { "f1,f2\n" });
    for s in &cs.samples {
        let cells: Vec<String> = s.iter().map(|x| fmt_f64(*x)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    fs::write(out, csv)?;
    let hull_path = out.with_extension("hull.json");
    fs::write(&hull_path, hull_json(&cs.hull))?;
    println!(
        "classical: model={} res={} -> {} samples -> {} (+ {})",
        model_name,
        config.resolution,
        cs.samples.len(),
        out.display(),
        hull_path.display()
    );
    Ok(())
}

/// `converge`: Hausdorff distances between quantum and classical hulls
/// over a k-list, with the fitted decay exponent in the footer.
pub fn cmd_converge(config: &RunConfig) -> Result<()> {
    let out = require_out(config)?;
    let model_name = config
        .model
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--model is required".into()))?;
    if config.k_list.len() < 4 {
        return Err(Error::InvalidArgument("--k-list needs at least 4 values".into()));
    }
    let name = match model_name.to_ascii_lowercase().as_str() {
        "s2" => ToricModelName::S2,
        "s2xs2" => ToricModelName::S2xS2,
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    let study: ConvergenceStudy = convergence_study(name, &config.k_list, config.resolution)?;
    let mut csv = String::from("k,hbar,dH\n");
    for row in &study.rows {
        let _ = writeln!(
            csv,
            "{},{},{}",
            row.k.unwrap_or(0),
            fmt_f64(row.hbar),
            fmt_f64(row.distance)
        );
    }
    let _ = writeln!(csv, "# fit: alpha={} intercept={}", fmt_f64(study.alpha), fmt_f64(study.intercept));
    fs::write(out, csv)?;
    println!(
        "converge: model={} alpha={:.6} over {} levels -> {}",
        model_name,
        study.alpha,
        study.rows.len(),
        out.display()
    );
    Ok(())
}

/// `recover`: moment-polytope recovery from at least three spectrum CSVs.
pub fn cmd_recover(config: &RunConfig) -> Result<()> {
    let out = require_out(config)?;
    if config.inputs.len() < 3 {
        return Err(Error::InsufficientHbar { found: config.inputs.len(), need: 3 });
    }
    let mut spectra = Vec::with_capacity(config.inputs.len());
    for path in &config.inputs {
        let text = fs::read_to_string(path)?;
        spectra.push(parse_spectrum_csv(&text)?);
    }
    let opts = RecoverOptions {
        rounding_tol: config.tol,
        ..RecoverOptions::default()
    };
    let report = recover(&spectra, &opts)?;
    fs::write(out, polytope_json(&report))?;
    println!(
        "recover: {} spectra -> dim {} polytope, delzant={} -> {}",
        spectra.len(),
        report.polytope.dim(),
        report.delzant,
        out.display()
    );
    println!(
        "residuals: lattice {:.3e}, extrapolation {:.3e}, rounding {:.3e}",
        report
            .lattice_fits
            .iter()
            .map(|f| f.residual)
            .fold(0.0f64, f64::max),
        report.extrapolation_residual,
        report.rounding_delta
    );
    if !report.certificates.is_empty() {
        let certs: Vec<String> = report.certificates.iter().map(|c| c.to_string()).collect();
        println!("vertex determinants: [{}]", certs.join(", "));
    }
    Ok(())
}

/// `plot`: spectrum CSV to SVG scatter.
pub fn cmd_plot(config: &RunConfig) -> Result<()> {
    let out = require_out(config)?;
    let input = config
        .inputs
        .first()
        .ok_or_else(|| Error::InvalidArgument("--in is required".into()))?;
    let text = fs::read_to_string(input)?;
    let points = if text.lines().skip(1).any(|l| !l.trim().is_empty()) {
        parse_spectrum_csv(&text)?.points().to_vec()
    } else {
        // Header-only input: plot empty axes.
        Vec::new()
    };
    fs::write(out, spectrum_svg(&points))?;
    println!("plot: {} points -> {}", points.len(), out.display());
    Ok(())
}
