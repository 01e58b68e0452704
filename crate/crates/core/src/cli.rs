//! Configuration files, report files and the command implementations behind
//! the `frontlab` binary.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{
    derive_verdicts, hypothesis_report, run_scenario, FieldCheck, Outcome, Report, Row, Scalar, Scenario,
    Setting, Verdict,
};
use crate::fields::{GridSpec, Point, ScalarField};
use crate::geometry::{Ball, GeometrySummary, DEFAULT_RAYS, DEFAULT_SEED};
use crate::reactions::ReactionTerm;
use crate::solver::{SolverConfig, DEFAULT_BOUNDARY_TOLERANCE, DEFAULT_CFL};

/// Largest value a Linear run may reach, `e^{sup ζ · t_end} · max height`.
pub const LINEAR_GROWTH_CAP: f64 = 1e15;

pub const REPORT_HEADER: [&str; 14] = [
    "t",
    "theta",
    "R_i",
    "cx_i",
    "cy_i",
    "R_e",
    "cx_e",
    "cy_e",
    "r_origin",
    "gap",
    "star_shaped",
    "max_polar_slope",
    "radial_dev",
    "solution_id",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default = "default_rays")]
    pub rays: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            rays: DEFAULT_RAYS,
            seed: DEFAULT_SEED,
        }
    }
}

fn default_rays() -> usize {
    DEFAULT_RAYS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default)]
    pub snapshots: bool,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            snapshots: false,
            snapshot_stride: 1,
        }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_stride() -> usize {
    1
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub reaction: ReactionTerm,
    pub scenario: Scenario,
    pub geometry: GeometryConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn setting(&self) -> Setting {
        Setting {
            solver: self.solver,
            reaction: self.reaction,
            rays: self.geometry.rays,
            seed: self.geometry.seed,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    half_width: f64,
    nodes_per_side: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    #[serde(default = "raw_cfl")]
    cfl_fraction: f64,
    t_end: f64,
    record_interval: f64,
    #[serde(default = "raw_boundary_tolerance")]
    boundary_tolerance: f64,
}

fn raw_cfl() -> f64 {
    DEFAULT_CFL
}

fn raw_boundary_tolerance() -> f64 {
    DEFAULT_BOUNDARY_TOLERANCE
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: RawGrid,
    solver: RawSolver,
    reaction: ReactionTerm,
    scenario: Scenario,
    #[serde(default)]
    geometry: GeometryConfig,
    #[serde(default)]
    output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax { line: usize, column: usize, message: String },
    Semantic(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax { line, column, message } => {
                write!(f, "syntax error at line {line}, column {column}: {message}")
            }
            ConfigError::Semantic(list) => {
                writeln!(f, "{} invalid setting(s):", list.len())?;
                for e in list {
                    writeln!(f, "  {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn messages(&self) -> Vec<String> {
        match self {
            ConfigError::Syntax { .. } => vec![self.to_string()],
            ConfigError::Semantic(list) => list.clone(),
        }
    }
}

fn syntax(e: serde_json::Error) -> ConfigError {
    ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses and validates a JSON run configuration, collecting every semantic problem.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(syntax)?;
    let mut errors = Vec::new();

    let grid = match GridSpec::new(raw.grid.half_width, raw.grid.nodes_per_side) {
        Ok(g) => Some(g),
        Err(e) => {
            let msg = e.to_string().replace("contract violation: ", "");
            let field = if msg.starts_with("half_width") { "half_width" } else { "nodes_per_side" };
            errors.push(format!("grid.{field}: {msg}"));
            None
        }
    };
    if let Err(e) = raw.reaction.validate() {
        errors.push(format!("reaction: {}", strip(&e.to_string())));
    }
    if raw.geometry.rays < 3 {
        errors.push(format!("geometry.rays: need at least 3, got {}", raw.geometry.rays));
    }
    if raw.output.snapshot_stride == 0 {
        errors.push("output.snapshot_stride: must be at least 1".into());
    }

    let mut solver = None;
    if let Some(grid) = grid {
        let s = SolverConfig {
            grid,
            cfl_fraction: raw.solver.cfl_fraction,
            t_end: raw.solver.t_end,
            record_interval: raw.solver.record_interval,
            boundary_tolerance: raw.solver.boundary_tolerance,
        };
        match s.validate() {
            Ok(()) if s.t_end > 0.0 => solver = Some(s),
            Ok(()) => errors.push("solver.t_end: must be positive".into()),
            Err(e) => {
                let msg = strip(&e.to_string());
                let field = msg.split_whitespace().next().unwrap_or("solver").to_string();
                errors.push(format!("solver.{field}: {msg}"));
            }
        }
    }

    if let (Some(solver), true) = (solver, raw.reaction.validate().is_ok()) {
        let setting = Setting {
            solver,
            reaction: raw.reaction,
            rays: raw.geometry.rays.max(3),
            seed: raw.geometry.seed,
        };
        errors.extend(raw.scenario.problems(&setting).into_iter().map(|p| format!("scenario.{p}")));
        if let ReactionTerm::Linear { zeta } = raw.reaction {
            let height = raw.scenario.data().iter().map(|d| d.max_height()).fold(0.0, f64::max);
            let growth = (zeta.sup() * solver.t_end).exp() * height;
            if !(growth <= LINEAR_GROWTH_CAP) {
                errors.push(format!(
                    "solver.t_end: linear growth reaches {growth:e}, above {LINEAR_GROWTH_CAP:e}"
                ));
            }
        }
    }

    if !errors.is_empty() {
        return Err(ConfigError::Semantic(errors));
    }
    Ok(RunConfig {
        solver: solver.expect("validated"),
        reaction: raw.reaction,
        scenario: raw.scenario,
        geometry: raw.geometry,
        output: raw.output,
    })
}

fn strip(msg: &str) -> String {
    msg.trim_start_matches("contract violation: ").to_string()
}

/// Pretty JSON that [`parse_config`] maps back to an equal [`RunConfig`].
pub fn serialize_config(config: &RunConfig) -> String {
    let raw = RawConfig {
        grid: RawGrid {
            half_width: config.solver.grid.half_width(),
            nodes_per_side: config.solver.grid.n(),
        },
        solver: RawSolver {
            cfl_fraction: config.solver.cfl_fraction,
            t_end: config.solver.t_end,
            record_interval: config.solver.record_interval,
            boundary_tolerance: config.solver.boundary_tolerance,
        },
        reaction: config.reaction,
        scenario: config.scenario.clone(),
        geometry: config.geometry.clone(),
        output: config.output.clone(),
    };
    serde_json::to_string_pretty(&raw).expect("config serializes")
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn lf_writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Report rows as CSV text with the fixed header; absent values are empty cells.
pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut w = lf_writer(Vec::new());
    w.write_record(REPORT_HEADER).expect("in-memory write");
    for row in rows {
        let s = &row.summary;
        let i = s.inscribed;
        let e = s.enclosing;
        w.write_record([
            num(s.t),
            num(s.theta),
            opt(i.map(|b| b.radius)),
            opt(i.map(|b| b.center.x)),
            opt(i.map(|b| b.center.y)),
            opt(e.map(|b| b.radius)),
            opt(e.map(|b| b.center.x)),
            opt(e.map(|b| b.center.y)),
            opt(s.r_origin),
            opt(s.gap()),
            s.star_shaped.map(|b| b.to_string()).unwrap_or_default(),
            opt(s.max_polar_slope),
            opt(s.radial_deviation),
            row.solution_id.clone(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFileError(pub String);

impl fmt::Display for ReportFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ReportFileError {}

fn cell(rec: &csv::StringRecord, k: usize, line: usize) -> Result<Option<f64>, ReportFileError> {
    let s = rec.get(k).unwrap_or("");
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| ReportFileError(format!("line {line}: column {} is not a number: {s:?}", REPORT_HEADER[k])))
}

fn ball(r: Option<f64>, x: Option<f64>, y: Option<f64>) -> Option<Ball> {
    Some(Ball {
        radius: r?,
        center: Point::new(x?, y?),
    })
}

pub fn rows_from_csv(text: &str) -> Result<Vec<Row>, ReportFileError> {
    let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| ReportFileError(e.to_string()))?.clone();
    if header.iter().ne(REPORT_HEADER.iter().copied()) {
        return Err(ReportFileError("unexpected report header".into()));
    }
    let mut rows = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| ReportFileError(e.to_string()))?;
        let c = |i| cell(&rec, i, line);
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| ReportFileError(format!("line {line}: missing {name}")));
        let star = match rec.get(10).unwrap_or("") {
            "" => None,
            "true" => Some(true),
            "false" => Some(false),
            other => return Err(ReportFileError(format!("line {line}: bad star_shaped {other:?}"))),
        };
        rows.push(Row {
            solution_id: rec.get(13).unwrap_or("").to_string(),
            summary: GeometrySummary {
                t: need(c(0)?, "t")?,
                theta: need(c(1)?, "theta")?,
                inscribed: ball(c(2)?, c(3)?, c(4)?),
                enclosing: ball(c(5)?, c(6)?, c(7)?),
                r_origin: c(8)?,
                star_shaped: star,
                max_polar_slope: c(11)?,
                radial_deviation: c(12)?,
            },
        });
    }
    Ok(rows)
}

pub fn checks_to_csv(checks: &[FieldCheck]) -> String {
    let mut w = lf_writer(Vec::new());
    w.write_record(["name", "t", "value"]).expect("in-memory write");
    for c in checks {
        w.write_record([c.name.clone(), num(c.t), num(c.value)]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn checks_from_csv(text: &str) -> Result<Vec<FieldCheck>, ReportFileError> {
    let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| ReportFileError(e.to_string()))?;
        let parse = |i: usize| {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| ReportFileError(format!("checks line {}: bad number", k + 2)))
        };
        out.push(FieldCheck {
            name: rec.get(0).unwrap_or("").to_string(),
            t: parse(1)?,
            value: parse(2)?,
        });
    }
    Ok(out)
}

pub fn verdicts_to_csv(verdicts: &[Verdict]) -> String {
    let mut w = lf_writer(Vec::new());
    w.write_record([
        "name",
        "outcome",
        "expected",
        "holds",
        "relation",
        "measured",
        "bound",
        "tolerance",
        "t",
        "inequality",
    ])
    .expect("in-memory write");
    for v in verdicts {
        w.write_record([
            v.name.clone(),
            v.outcome().label().to_string(),
            v.expected.to_string(),
            v.holds.map(|b| b.to_string()).unwrap_or_default(),
            v.relation.symbol().to_string(),
            opt(v.measured),
            opt(v.bound),
            num(v.tolerance),
            opt(v.t),
            v.inequality.clone(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn scalars_to_csv(scalars: &[Scalar]) -> String {
    let mut w = lf_writer(Vec::new());
    w.write_record(["name", "value"]).expect("in-memory write");
    for s in scalars {
        w.write_record([s.name.clone(), num(s.value)]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Plain PGM (P2), top row at `y = L`, gray level `round(255 u / max u)`.
pub fn field_to_pgm(field: &ScalarField) -> String {
    let n = field.grid().n();
    let max = field.max();
    let mut out = format!("P2\n{n} {n}\n255\n");
    for j in (0..n).rev() {
        let px: Vec<String> = (0..n)
            .map(|i| {
                let v = if max > 0.0 { (255.0 * field.at(i, j) / max).round() } else { 0.0 };
                format!("{}", v.clamp(0.0, 255.0) as u8)
            })
            .collect();
        for chunk in px.chunks(17) {
            out.push_str(&chunk.join(" "));
            out.push('\n');
        }
    }
    out
}

/// One line per `x` index `i`, values along `y` index `j`.
pub fn field_to_csv(field: &ScalarField) -> String {
    let n = field.grid().n();
    let mut out = String::new();
    for i in 0..n {
        let line: Vec<String> = (0..n).map(|j| num(field.at(i, j))).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn snapshot_name(prefix: &str, t: f64, ext: &str) -> String {
    format!("{prefix}_t{t:.4}.{ext}")
}

fn write_file(path: &Path, text: &str) -> std::io::Result<()> {
    fs::write(path, text.as_bytes())
}

/// Writes `report.csv`, `checks.csv`, `verdicts.csv` and `scalars.csv` into `dir`.
pub fn write_report(dir: &Path, report: &Report) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    write_file(&dir.join("report.csv"), &rows_to_csv(&report.rows))?;
    write_file(&dir.join("checks.csv"), &checks_to_csv(&report.checks))?;
    write_file(&dir.join("verdicts.csv"), &verdicts_to_csv(&report.verdicts))?;
    write_file(&dir.join("scalars.csv"), &scalars_to_csv(&report.scalars))?;
    Ok(())
}

pub fn print_verdicts(out: &mut impl std::io::Write, verdicts: &[Verdict], scalars: &[Scalar]) {
    for v in verdicts {
        let label = match v.outcome() {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "INCONCLUSIVE",
        };
        let expect = if v.expected { "" } else { " (expected to be violated)" };
        let _ = writeln!(
            out,
            "{label:<12} {:<28} measured={} bound={} tol={} t={}  [{}]{expect}",
            v.name,
            opt(v.measured),
            opt(v.bound),
            num(v.tolerance),
            opt(v.t),
            v.inequality
        );
    }
    for s in scalars {
        let _ = writeln!(out, "  {} = {}", s.name, num(s.value));
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| vec![format!("{}: {e}", path.display())])?;
    parse_config(&text).map_err(|e| e.messages())
}

/// Options of the `run` subcommand.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

/// Exit status of `run`: 0 when every verdict passes or is inconclusive,
/// 2 when a verdict fails, 1 on configuration or runtime errors.
pub fn run_command(config_path: &Path, opts: &RunOptions) -> i32 {
    let mut config = match load_config(config_path) {
        Ok(c) => c,
        Err(errs) => {
            for e in errs {
                eprintln!("error: {e}");
            }
            return 1;
        }
    };
    if let Some(seed) = opts.seed {
        config.geometry.seed = seed;
    }
    if let Some(dir) = &opts.out {
        config.output.directory = dir.clone();
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return 1;
        }
    };
    pool.install(|| execute(&config))
}

fn execute(config: &RunConfig) -> i32 {
    let dir = config.output.directory.clone();
    let snap_dir = dir.join("snapshots");
    if let Err(e) = fs::create_dir_all(&dir).and_then(|_| {
        if config.output.snapshots {
            fs::create_dir_all(&snap_dir)
        } else {
            Ok(())
        }
    }) {
        eprintln!("error: cannot create {}: {e}", dir.display());
        return 1;
    }
    let stride = config.output.snapshot_stride;
    let snapshots = config.output.snapshots;
    let mut observer = |id: &str, k: usize, field: &ScalarField| -> crate::error::Result<()> {
        if snapshots && k % stride == 0 {
            let t = field.time();
            let io = write_file(&snap_dir.join(snapshot_name(id, t, "pgm")), &field_to_pgm(field))
                .and_then(|_| write_file(&snap_dir.join(snapshot_name(id, t, "csv")), &field_to_csv(field)));
            if let Err(e) = io {
                return Err(crate::error::Error::Contract(format!("snapshot write failed: {e}")));
            }
        }
        Ok(())
    };
    let report = run_scenario(&config.scenario, &config.setting(), &mut observer);
    if let Err(e) = write_report(&dir, &report) {
        eprintln!("error: cannot write report in {}: {e}", dir.display());
        return 1;
    }
    let mut stdout = std::io::stdout();
    let _ = writeln!(stdout, "scenario {}: {} rows", report.scenario.name(), report.rows.len());
    print_verdicts(&mut stdout, &report.verdicts, &report.scalars);
    if let Some(e) = &report.failure {
        eprintln!("error: {e}");
        return 1;
    }
    if report.any_failed() {
        2
    } else {
        0
    }
}

/// Re-derives verdicts from `report.csv` and `checks.csv` in the output directory.
pub fn report_command(config_path: &Path, out: Option<&Path>) -> i32 {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(errs) => {
            for e in errs {
                eprintln!("error: {e}");
            }
            return 1;
        }
    };
    let dir = out.map(Path::to_path_buf).unwrap_or(config.output.directory.clone());
    let read = |name: &str| fs::read_to_string(dir.join(name)).map_err(|e| format!("{}: {e}", dir.join(name).display()));
    let loaded = read("report.csv").and_then(|r| {
        let rows = rows_from_csv(&r).map_err(|e| e.0)?;
        let checks = match read("checks.csv") {
            Ok(c) => checks_from_csv(&c).map_err(|e| e.0)?,
            Err(_) => Vec::new(),
        };
        Ok((rows, checks))
    });
    let (rows, checks) = match loaded {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let (verdicts, scalars) = derive_verdicts(&config.scenario, &config.setting(), &rows, &checks);
    print_verdicts(&mut std::io::stdout(), &verdicts, &scalars);
    if verdicts.iter().any(|v| v.outcome() == Outcome::Fail) {
        2
    } else {
        0
    }
}

#[derive(Debug, Deserialize)]
struct ReactionOnly {
    reaction: ReactionTerm,
    #[serde(default)]
    lower_bound: Option<ReactionTerm>,
}

/// Prints the hypothesis validators for the `reaction` section (and an optional `lower_bound`).
pub fn validate_reaction_command(config_path: &Path, out: &mut impl std::io::Write) -> i32 {
    let text = match fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", config_path.display());
            return 1;
        }
    };
    let value: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {}", syntax(e));
            return 1;
        }
    };
    let mut lower = value.get("lower_bound").cloned();
    if lower.is_none() {
        lower = value.pointer("/scenario/lower_bound").cloned();
    }
    let only = serde_json::json!({ "reaction": value.get("reaction").cloned().unwrap_or_default(), "lower_bound": lower });
    let parsed: ReactionOnly = match serde_json::from_value(only) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: reaction: {e}");
            return 1;
        }
    };
    if let Err(e) = parsed.reaction.validate() {
        eprintln!("error: reaction: {}", strip(&e.to_string()));
        return 1;
    }
    match hypothesis_report(&parsed.reaction, parsed.lower_bound.as_ref()) {
        Ok(list) => {
            let _ = writeln!(out, "reaction {}", parsed.reaction.name());
            for (name, verdict) in list {
                let _ = writeln!(out, "{name}: {verdict}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "grid": { "half_width": 10, "nodes_per_side": 101 },
        "solver": { "t_end": 2, "record_interval": 0.5 },
        "reaction": { "variant": "FisherKPP", "rate": 1 },
        "scenario": {
            "variant": "Symmetrization",
            "datum": { "bumps": [ { "center": [0, 0], "radius": 1.5, "height": 1 } ] },
            "thetas": [0.5]
        }
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.solver.cfl_fraction, 0.8);
        assert_eq!(c.geometry.rays, 720);
        assert_eq!(c.solver.boundary_tolerance, 1e-6);
        assert_eq!(c.output, OutputConfig::default());
    }

    #[test]
    fn config_round_trips() {
        let c = parse_config(MINIMAL).unwrap();
        let again = parse_config(&serialize_config(&c)).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn semantic_errors_are_collected() {
        let bad = MINIMAL
            .replace("\"nodes_per_side\": 101", "\"nodes_per_side\": 100")
            .replace("\"rate\": 1", "\"rate\": -1");
        let ConfigError::Semantic(errs) = parse_config(&bad).unwrap_err() else {
            panic!("expected semantic errors");
        };
        assert_eq!(errs.len(), 2, "{errs:?}");
        assert!(errs[0].contains("nodes_per_side must be odd"));
        assert!(errs[1].starts_with("reaction:"));

        let bad = MINIMAL.replace("[0.5]", "[1.5]");
        let errs = parse_config(&bad).unwrap_err().messages();
        assert!(errs[0].contains("threshold 1.5 outside (0, Z)"), "{errs:?}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let bad = MINIMAL.replace("\"t_end\": 2,", "\"t_end\": 2");
        match parse_config(&bad).unwrap_err() {
            ConfigError::Syntax { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn linear_growth_is_capped() {
        let bad = MINIMAL
            .replace(r#""variant": "FisherKPP", "rate": 1"#, r#""variant": "Linear", "zeta": 1"#)
            .replace("\"t_end\": 2", "\"t_end\": 40")
            .replace("[0.5]", "[2.0]");
        let errs = parse_config(&bad).unwrap_err().messages();
        assert!(errs.iter().any(|e| e.starts_with("solver.t_end: linear growth")), "{errs:?}");
    }

    #[test]
    fn rows_round_trip_through_csv() {
        let rows = vec![
            Row {
                solution_id: "u".into(),
                summary: GeometrySummary {
                    inscribed: Some(Ball {
                        radius: 0.1 + 0.2,
                        center: Point::new(-1.0 / 3.0, 2.5e-17),
                    }),
                    enclosing: Some(Ball {
                        radius: 7.0,
                        center: Point::new(0.0, 1e300),
                    }),
                    r_origin: Some(3.25),
                    star_shaped: Some(false),
                    max_polar_slope: None,
                    radial_deviation: Some(1e-9),
                    ..GeometrySummary::empty(0.5, 0.25)
                },
            },
            Row {
                solution_id: "w1".into(),
                summary: GeometrySummary::empty(1.0, 0.75),
            },
        ];
        let text = rows_to_csv(&rows);
        assert!(text.starts_with(
            "t,theta,R_i,cx_i,cy_i,R_e,cx_e,cy_e,r_origin,gap,star_shaped,max_polar_slope,radial_dev,solution_id\n"
        ));
        assert!(!text.contains('\r'));
        assert!(text.ends_with("1,0.75,,,,,,,,,,,,w1\n"));
        assert_eq!(rows_from_csv(&text).unwrap(), rows);
    }

    #[test]
    fn pgm_scaling_and_names() {
        let g = GridSpec::new(1.0, 3).unwrap();
        let f = ScalarField::from_values(g, vec![0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0], 0.5).unwrap();
        let pgm = field_to_pgm(&f);
        // Top row is j = 2: nodes (0,2), (1,2), (2,2).
        assert_eq!(pgm, "P2\n3 3\n255\n255 0 0\n128 0 0\n0 0 64\n");
        assert_eq!(snapshot_name("u", 0.5, "pgm"), "u_t0.5000.pgm");
        assert_eq!(field_to_csv(&f).lines().next(), Some("0,0.5,1"));
    }
}
