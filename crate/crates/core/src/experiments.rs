//! Scenarios that run the solver, measure level sets and turn the
//! measurements into verdicts.
//!
//! Each scenario steps all of its solutions in lockstep and records, at every
//! record time, one [`GeometrySummary`] row per probed level and solution plus
//! a few field-level checks (comparison excesses, positivity, radial
//! monotonicity). Verdicts are then derived from those rows and checks alone by
//! [`derive_verdicts`], so a report can be rebuilt from its CSV output.
//!
//! Asymptotic statements are evaluated at finite horizons:
//! a `liminf` becomes the minimum over the late window `[t_end/2, t_end]`, and
//! "t large enough" becomes "after the first record where the reference level
//! covers the datum's ball" (`r_origin >= δ`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::fields::{make_field, DatumSpec, GridSpec, Point, ScalarField};
use crate::geometry::{radial_monotone_about, summarize, GeometrySummary, ProbeSpec};
use crate::reactions::{
    check_kpp, check_lower_bound, default_t_samples, default_z_samples, HypothesisVerdict, ReactionTerm,
};
use crate::solver::{boundary_guard, pointwise_leq, SolverConfig, Stepper};

/// Tolerance for the pointwise comparison checks.
pub const COMPARISON_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Symmetrization {
    pub datum: DatumSpec,
    pub thetas: Vec<f64>,
    /// Radius of the ball holding the datum; defaults to the support radius plus one cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Radius of a ball on which the datum is at least the largest threshold; required for non-KPP terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invasion_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntiSymmetrization {
    pub u1: DatumSpec,
    pub u2: DatumSpec,
    /// Separation: `u_0(x) = u_1(x) + u_2(x + ξ)`, placed so the pair straddles the origin.
    pub xi: Point,
    pub theta: f64,
    /// Lower level for the inscribed-radius bound; defaults to `θ/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_prime: Option<f64>,
    /// Further separations `|ξ|` along the direction of `xi`, each run without references.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<f64>,
    #[serde(default = "default_sweep_slope")]
    pub sweep_slope: [f64; 2],
    #[serde(default = "default_sweep_spread")]
    pub sweep_spread: f64,
    /// Required late-window minimum gap of `u`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_gap: Option<f64>,
}

fn default_sweep_slope() -> [f64; 2] {
    [0.4, 0.6]
}

fn default_sweep_spread() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Steepness {
    pub datum: DatumSpec,
    pub theta_prime: f64,
    pub theta: f64,
    pub width_cap: f64,
    /// Time shift `T` of the variation check.
    #[serde(default = "default_shift")]
    pub shift: f64,
    /// Lower bound `g` with `f >= g`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<ReactionTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invasion_radius: Option<f64>,
}

fn default_shift() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadingSpeed {
    pub datum: DatumSpec,
    pub theta: f64,
    pub window: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoSolution {
    pub datum1: DatumSpec,
    pub datum2: DatumSpec,
    pub theta: f64,
    pub theta_prime: f64,
    pub zeta_shift: Point,
    pub cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum Scenario {
    Symmetrization(Symmetrization),
    AntiSymmetrization(AntiSymmetrization),
    Steepness(Steepness),
    SpreadingSpeed(SpreadingSpeed),
    TwoSolutionComparison(TwoSolution),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Symmetrization(_) => "Symmetrization",
            Scenario::AntiSymmetrization(_) => "AntiSymmetrization",
            Scenario::Steepness(_) => "Steepness",
            Scenario::SpreadingSpeed(_) => "SpreadingSpeed",
            Scenario::TwoSolutionComparison(_) => "TwoSolutionComparison",
        }
    }

    /// Initial data used by the scenario.
    pub fn data(&self) -> Vec<&DatumSpec> {
        match self {
            Scenario::Symmetrization(s) => vec![&s.datum],
            Scenario::AntiSymmetrization(s) => vec![&s.u1, &s.u2],
            Scenario::Steepness(s) => vec![&s.datum],
            Scenario::SpreadingSpeed(s) => vec![&s.datum],
            Scenario::TwoSolutionComparison(s) => vec![&s.datum1, &s.datum2],
        }
    }

    /// Every invariant violation, each prefixed with its path below `scenario`.
    pub fn problems(&self, setting: &Setting) -> Vec<String> {
        let mut out = Vec::new();
        let z = setting.reaction.saturation();
        let grid = setting.solver.grid;
        let mut level = |path: &str, v: f64| {
            if !(v > 0.0 && v < z) {
                out.push(format!("{path}: threshold {v} outside (0, Z) with Z = {z}"));
            }
        };
        match self {
            Scenario::Symmetrization(s) => {
                if s.thetas.is_empty() {
                    level("thetas", f64::NAN);
                }
                for (k, &t) in s.thetas.iter().enumerate() {
                    level(&format!("thetas[{k}]"), t);
                }
            }
            Scenario::AntiSymmetrization(s) => {
                level("theta", s.theta);
                if let Some(tp) = s.theta_prime {
                    level("theta_prime", tp);
                }
            }
            Scenario::Steepness(s) => {
                level("theta", s.theta);
                level("theta_prime", s.theta_prime);
            }
            Scenario::SpreadingSpeed(s) => level("theta", s.theta),
            Scenario::TwoSolutionComparison(s) => {
                level("theta", s.theta);
                level("theta_prime", s.theta_prime);
            }
        }
        let mut datum = |path: &str, d: &DatumSpec| {
            if let Err(e) = d.validate() {
                out.push(format!("{path}: {e}"));
            } else if d.max_height() <= 0.0 || d.max_height() > z {
                out.push(format!("{path}: bump heights must lie in (0, Z] with Z = {z}"));
            }
        };
        match self {
            Scenario::Symmetrization(s) => datum("datum", &s.datum),
            Scenario::AntiSymmetrization(s) => {
                datum("u1", &s.u1);
                datum("u2", &s.u2);
            }
            Scenario::Steepness(s) => datum("datum", &s.datum),
            Scenario::SpreadingSpeed(s) => datum("datum", &s.datum),
            Scenario::TwoSolutionComparison(s) => {
                datum("datum1", &s.datum1);
                datum("datum2", &s.datum2);
            }
        }
        let mut lattice = |path: &str, v: Point| {
            if let Err(e) = grid.lattice_offset(v) {
                out.push(format!("{path}: not a lattice vector ({e})"));
            }
        };
        match self {
            Scenario::AntiSymmetrization(s) => lattice("xi", s.xi),
            Scenario::TwoSolutionComparison(s) => lattice("zeta_shift", s.zeta_shift),
            _ => {}
        }
        let kpp = passes_kpp(&setting.reaction);
        match self {
            Scenario::Symmetrization(s) => {
                let top = s.thetas.iter().copied().fold(0.0, f64::max);
                invasion_problems(&mut out, &grid, &s.datum, top, s.invasion_radius, kpp);
                if let Some(d) = s.delta {
                    if !(d > 0.0 && d < grid.half_width()) {
                        out.push(format!("delta: {d} must lie in (0, L)"));
                    }
                }
            }
            Scenario::Steepness(s) => {
                if s.theta_prime > s.theta {
                    out.push("theta_prime: must not exceed theta".into());
                }
                let th0 = setting.reaction.ignition_threshold();
                if s.theta_prime <= th0 {
                    out.push(format!("theta_prime: must exceed the ignition threshold {th0}"));
                }
                if !(s.width_cap.is_finite() && s.width_cap >= 0.0) {
                    out.push("width_cap: must be finite and >= 0".into());
                }
                if !(s.shift > 0.0 && s.shift.is_finite()) {
                    out.push("shift: must be positive".into());
                }
                if let Some(g) = &s.lower_bound {
                    if let Err(e) = g.validate() {
                        out.push(format!("lower_bound: {e}"));
                    } else if !g.is_time_independent() {
                        out.push("lower_bound: must be time-independent".into());
                    }
                }
                invasion_problems(&mut out, &grid, &s.datum, s.theta, s.invasion_radius, kpp);
            }
            Scenario::SpreadingSpeed(s) => {
                if !(s.window[0] >= 0.0 && s.window[1] > s.window[0]) {
                    out.push("window: must satisfy 0 <= t_a < t_b".into());
                }
                if s.window[1] > setting.solver.t_end {
                    out.push("window: t_b exceeds t_end".into());
                }
                if let Some(r) = s.slope_range {
                    if !(r[0] <= r[1]) {
                        out.push("slope_range: empty interval".into());
                    }
                }
                if !kpp {
                    out.push("reaction: the speed scenario needs a KPP-type term".into());
                }
            }
            Scenario::AntiSymmetrization(s) => {
                if !kpp {
                    out.push("reaction: anti-symmetrization needs a KPP-type term".into());
                }
                if let Some(tp) = s.theta_prime {
                    if tp >= s.theta {
                        out.push("theta_prime: must be below theta".into());
                    }
                }
                if s.sweep.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    out.push("sweep: separations must be finite and >= 0".into());
                }
                if s.xi.norm() == 0.0 && !s.sweep.is_empty() {
                    out.push("sweep: needs a nonzero xi to fix the direction".into());
                }
                if !(s.sweep_slope[0] <= s.sweep_slope[1]) {
                    out.push("sweep_slope: empty interval".into());
                }
            }
            Scenario::TwoSolutionComparison(s) => {
                if !kpp {
                    out.push("reaction: the two-solution comparison needs a KPP-type term".into());
                }
                if !(s.cap.is_finite() && s.cap >= 0.0) {
                    out.push("cap: must be finite and >= 0".into());
                }
            }
        }
        out
    }
}

fn passes_kpp(f: &ReactionTerm) -> bool {
    check_kpp(f, &default_z_samples(f), &default_t_samples(f)).is_ok_and(|v| v.passed())
}

fn invasion_problems(
    out: &mut Vec<String>,
    grid: &GridSpec,
    datum: &DatumSpec,
    theta: f64,
    radius: Option<f64>,
    kpp: bool,
) {
    match radius {
        None if !kpp => out.push("invasion_radius: required when the reaction is not of KPP type".into()),
        None => {}
        Some(r) => {
            let n = grid.n();
            let low = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| grid.node(i, j))
                .filter(|p| p.norm() <= r)
                .any(|p| datum.value(p) < theta);
            if low {
                out.push(format!("invasion_radius: datum drops below {theta} inside B_{r}"));
            }
        }
    }
}

/// Everything a scenario needs besides its own parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setting {
    pub solver: SolverConfig,
    pub reaction: ReactionTerm,
    pub rays: usize,
    pub seed: u64,
}

impl Setting {
    fn probe(&self, theta: f64, center: Point) -> ProbeSpec {
        ProbeSpec::new(theta).about(center).with_rays(self.rays).with_seed(self.seed)
    }

    fn h(&self) -> f64 {
        self.solver.grid.spacing()
    }

    /// `5h + 2π·max φ / M`, with `max φ` bounded by the enclosing ball seen from `center`.
    pub fn tol_geom(&self, s: &GeometrySummary, center: Point) -> Option<f64> {
        let outer = s.outer_radius_about(center)?;
        Some(5.0 * self.h() + 2.0 * PI * outer / self.rays as f64)
    }

    fn late_start(&self) -> f64 {
        0.5 * self.solver.t_end
    }
}

/// One CSV row: a geometry summary tagged with the solution it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub solution_id: String,
    pub summary: GeometrySummary,
}

/// A field-level measurement at one record time; `value <= 0` means the check held.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCheck {
    pub name: String,
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    AtMost,
    AtLeast,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

/// `measured (<= | >=) bound (+ | -) tolerance`, evaluated at the worst record.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub inequality: String,
    pub relation: Relation,
    pub t: Option<f64>,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    pub tolerance: f64,
    /// Whether the scenario expects the inequality to hold.
    pub expected: bool,
    pub holds: Option<bool>,
}

impl Verdict {
    pub fn outcome(&self) -> Outcome {
        match self.holds {
            None => Outcome::Inconclusive,
            Some(h) if h == self.expected => Outcome::Pass,
            Some(_) => Outcome::Fail,
        }
    }

    fn inconclusive(name: &str, inequality: &str, relation: Relation) -> Self {
        Verdict {
            name: name.into(),
            inequality: inequality.into(),
            relation,
            t: None,
            measured: None,
            bound: None,
            tolerance: 0.0,
            expected: true,
            holds: None,
        }
    }

    fn expecting(mut self, expected: bool) -> Self {
        self.expected = expected;
        self
    }
}

/// One side-by-side comparison at a record time.
#[derive(Debug, Clone, Copy)]
struct Cmp {
    t: f64,
    lhs: f64,
    rhs: f64,
    tol: f64,
}

/// Verdict over all comparisons, reporting the one with the least slack.
fn worst(name: &str, inequality: &str, relation: Relation, items: &[Cmp]) -> Verdict {
    let slack = |c: &Cmp| match relation {
        Relation::AtMost => c.rhs + c.tol - c.lhs,
        Relation::AtLeast => c.lhs - (c.rhs - c.tol),
    };
    let Some(w) = items.iter().min_by(|a, b| slack(a).total_cmp(&slack(b))) else {
        return Verdict::inconclusive(name, inequality, relation);
    };
    Verdict {
        name: name.into(),
        inequality: inequality.into(),
        relation,
        t: Some(w.t),
        measured: Some(w.lhs),
        bound: Some(w.rhs),
        tolerance: w.tol,
        expected: true,
        holds: Some(slack(w) >= 0.0),
    }
}

/// A derived number reported alongside the verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct Scalar {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: Scenario,
    pub rows: Vec<Row>,
    pub checks: Vec<FieldCheck>,
    pub scalars: Vec<Scalar>,
    pub verdicts: Vec<Verdict>,
    /// Runtime error that stopped the integration; rows up to that point are kept.
    pub failure: Option<Error>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.iter().find(|s| s.name == name).map(|s| s.value)
    }

    pub fn any_failed(&self) -> bool {
        self.verdicts.iter().any(|v| v.outcome() == Outcome::Fail)
    }

    pub fn rows_for<'a>(&'a self, id: &'a str, theta: f64) -> impl Iterator<Item = &'a GeometrySummary> + 'a {
        series(&self.rows, id, theta)
    }
}

fn series<'a>(rows: &'a [Row], id: &'a str, theta: f64) -> impl Iterator<Item = &'a GeometrySummary> + 'a {
    rows.iter()
        .filter(move |r| r.solution_id == id && r.summary.theta == theta)
        .map(|r| &r.summary)
}

fn at_time<'a>(rows: &'a [Row], id: &str, theta: f64, t: f64) -> Option<&'a GeometrySummary> {
    rows.iter()
        .find(|r| r.solution_id == id && r.summary.theta == theta && r.summary.t == t)
        .map(|r| &r.summary)
}

/// Callback for every field at every record time: `(solution_id, record index, field)`.
pub type Observer<'a> = dyn FnMut(&str, usize, &ScalarField) -> Result<()> + 'a;

struct Lane {
    id: String,
    stepper: Stepper,
    probes: Vec<ProbeSpec>,
}

impl Lane {
    fn new(id: &str, initial: ScalarField, setting: &Setting, probes: Vec<ProbeSpec>) -> Result<Self> {
        Ok(Lane {
            id: id.into(),
            stepper: Stepper::new(initial, setting.reaction, setting.solver.cfl_fraction)?,
            probes,
        })
    }

    fn field(&self) -> &ScalarField {
        self.stepper.field()
    }
}

/// Advances all lanes record by record, collecting rows, positivity checks and
/// whatever `extra` measures on the synchronized fields.
fn drive(
    setting: &Setting,
    lanes: &mut [Lane],
    rows: &mut Vec<Row>,
    checks: &mut Vec<FieldCheck>,
    observer: &mut Observer<'_>,
    mut extra: impl FnMut(f64, &[Lane], &mut Vec<FieldCheck>) -> Result<()>,
) -> Result<()> {
    setting.solver.validate()?;
    for (k, t) in setting.solver.record_times().into_iter().enumerate() {
        for lane in lanes.iter_mut() {
            lane.stepper.advance_to(t)?;
            boundary_guard(lane.field(), setting.solver.boundary_tolerance)?;
        }
        for lane in lanes.iter() {
            for p in &lane.probes {
                rows.push(Row {
                    solution_id: lane.id.clone(),
                    summary: summarize(lane.field(), p),
                });
            }
            checks.push(FieldCheck {
                name: format!("positivity:{}", lane.id),
                t,
                value: -lane.field().min(),
            });
            observer(&lane.id, k, lane.field())?;
        }
        extra(t, lanes, checks)?;
    }
    Ok(())
}

fn new_report(scenario: &Scenario) -> Report {
    Report {
        scenario: scenario.clone(),
        rows: Vec::new(),
        checks: Vec::new(),
        scalars: Vec::new(),
        verdicts: Vec::new(),
        failure: None,
        notes: vec![
            "liminf is evaluated as the minimum over the late window [t_end/2, t_end]".into(),
            "theorem checks apply from the first record with r_origin >= delta".into(),
        ],
    }
}

fn finish(mut report: Report, setting: &Setting, outcome: Result<()>) -> Report {
    if let Err(e) = outcome {
        report.failure = Some(e);
    }
    let (verdicts, scalars) = derive_verdicts(&report.scenario, setting, &report.rows, &report.checks);
    report.verdicts = verdicts;
    report.scalars = scalars;
    report
}

/// Runs `scenario`, never failing outright: setup and runtime errors end up in `Report::failure`.
pub fn run_scenario(scenario: &Scenario, setting: &Setting, observer: &mut Observer<'_>) -> Report {
    let problems = scenario.problems(setting);
    if !problems.is_empty() {
        let report = new_report(scenario);
        return finish(report, setting, contract(problems.join("; ")));
    }
    match scenario {
        Scenario::Symmetrization(s) => run_symmetrization(s, setting, observer),
        Scenario::AntiSymmetrization(s) => run_antisymmetrization(s, setting, observer),
        Scenario::Steepness(s) => run_steepness(s, setting, observer),
        Scenario::SpreadingSpeed(s) => run_speed(s, setting, observer),
        Scenario::TwoSolutionComparison(s) => run_two_solution(s, setting, observer),
    }
}

fn symmetrization_delta(s: &Symmetrization, h: f64) -> f64 {
    s.delta.unwrap_or_else(|| s.datum.delta_bound(h))
}

pub fn run_symmetrization(s: &Symmetrization, setting: &Setting, observer: &mut Observer<'_>) -> Report {
    let scenario = Scenario::Symmetrization(s.clone());
    let mut report = new_report(&scenario);
    let delta = symmetrization_delta(s, setting.h());
    let outcome = (|| {
        let initial = make_field(setting.solver.grid, &s.datum)?;
        let probes = s.thetas.iter().map(|&t| setting.probe(t, Point::ORIGIN)).collect();
        let mut lanes = vec![Lane::new("u", initial, setting, probes)?];
        let rays = setting.rays;
        drive(setting, &mut lanes, &mut report.rows, &mut report.checks, observer, |t, lanes, checks| {
            let v = radial_monotone_about(lanes[0].field(), delta, Point::ORIGIN, rays)?;
            let value = match v {
                crate::geometry::MonotoneVerdict::Pass => 0.0,
                crate::geometry::MonotoneVerdict::Fail { increase, .. } => increase,
            };
            checks.push(FieldCheck {
                name: "radial_monotone:u".into(),
                t,
                value,
            });
            Ok(())
        })
    })();
    finish(report, setting, outcome)
}

/// Offset that puts the pair `u_1(· - s)`, `u_2(· - s + ξ)` around the origin.
fn pair_offset(grid: &GridSpec, xi: Point) -> Point {
    grid.snap(xi * 0.5)
}

fn sweep_xi(grid: &GridSpec, xi: Point, magnitude: f64) -> Point {
    grid.snap(xi * (magnitude / xi.norm()))
}

fn sweep_id(magnitude: f64) -> String {
    format!("u_xi{magnitude}")
}

pub fn run_antisymmetrization(s: &AntiSymmetrization, setting: &Setting, observer: &mut Observer<'_>) -> Report {
    let scenario = Scenario::AntiSymmetrization(s.clone());
    let mut report = new_report(&scenario);
    let grid = setting.solver.grid;
    let theta_p = s.theta_prime.unwrap_or(0.5 * s.theta);
    let outcome = (|| {
        let shift = pair_offset(&grid, s.xi);
        let d1 = s.u1.translated(shift);
        let d2 = s.u2.translated(shift - s.xi);
        let u0 = make_field(grid, &d1.union(&d2))?;
        let w1 = make_field(grid, &d1)?;
        let w2 = make_field(grid, &d2)?;
        let mut lanes = vec![
            Lane::new(
                "u",
                u0,
                setting,
                vec![setting.probe(s.theta, Point::ORIGIN), setting.probe(theta_p, Point::ORIGIN)],
            )?,
            Lane::new(
                "w1",
                w1,
                setting,
                vec![setting.probe(s.theta, shift), setting.probe(theta_p, shift)],
            )?,
            Lane::new("w2", w2, setting, Vec::new())?,
        ];
        drive(setting, &mut lanes, &mut report.rows, &mut report.checks, observer, |t, lanes, checks| {
            let (u, w1, w2) = (lanes[0].field(), lanes[1].field(), lanes[2].field());
            let lower = pointwise_leq(&w1.pointwise_max(w2)?, u, COMPARISON_TOLERANCE)?;
            let upper = pointwise_leq(u, &w1.add(w2)?, COMPARISON_TOLERANCE)?;
            checks.push(FieldCheck {
                name: "comparison:max(w1,w2)<=u".into(),
                t,
                value: lower.max_excess,
            });
            checks.push(FieldCheck {
                name: "comparison:u<=w1+w2".into(),
                t,
                value: upper.max_excess,
            });
            Ok(())
        })?;
        for &m in &s.sweep {
            let xi = sweep_xi(&grid, s.xi, m);
            let shift = pair_offset(&grid, xi);
            let datum = s.u1.translated(shift).union(&s.u2.translated(shift - xi));
            let mut lanes = vec![Lane::new(
                &sweep_id(m),
                make_field(grid, &datum)?,
                setting,
                vec![setting.probe(s.theta, Point::ORIGIN)],
            )?];
            drive(setting, &mut lanes, &mut report.rows, &mut report.checks, observer, |_, _, _| Ok(()))?;
        }
        Ok(())
    })();
    finish(report, setting, outcome)
}

pub fn run_steepness(s: &Steepness, setting: &Setting, observer: &mut Observer<'_>) -> Report {
    let scenario = Scenario::Steepness(s.clone());
    let mut report = new_report(&scenario);
    let outcome = (|| {
        let initial = make_field(setting.solver.grid, &s.datum)?;
        let mut probes = vec![setting.probe(s.theta_prime, Point::ORIGIN)];
        if s.theta != s.theta_prime {
            probes.push(setting.probe(s.theta, Point::ORIGIN));
        }
        let mut lanes = vec![Lane::new("u", initial, setting, probes)?];
        drive(setting, &mut lanes, &mut report.rows, &mut report.checks, observer, |_, _, _| Ok(()))
    })();
    finish(report, setting, outcome)
}

pub fn run_speed(s: &SpreadingSpeed, setting: &Setting, observer: &mut Observer<'_>) -> Report {
    let scenario = Scenario::SpreadingSpeed(s.clone());
    let mut report = new_report(&scenario);
    let outcome = (|| {
        let initial = make_field(setting.solver.grid, &s.datum)?;
        let mut lanes = vec![Lane::new("u", initial, setting, vec![setting.probe(s.theta, Point::ORIGIN)])?];
        drive(setting, &mut lanes, &mut report.rows, &mut report.checks, observer, |_, _, _| Ok(()))
    })();
    finish(report, setting, outcome)
}

fn two_solution_data(s: &TwoSolution, grid: GridSpec) -> Result<[ScalarField; 5]> {
    let u1 = make_field(grid, &s.datum1)?;
    let u2 = make_field(grid, &s.datum2)?;
    let u1_shift = make_field(grid, &s.datum1.translated(s.zeta_shift))?;
    let lower = u1_shift.pointwise_min(&u2)?;
    if lower.max() <= 0.0 {
        return contract("zeta_shift makes min(τ_ζ u1_0, u2_0) identically zero");
    }
    let upper = u1.pointwise_max(&u2)?;
    Ok([u1, u2, u1_shift, lower, upper])
}

pub fn run_two_solution(s: &TwoSolution, setting: &Setting, observer: &mut Observer<'_>) -> Report {
    let scenario = Scenario::TwoSolutionComparison(s.clone());
    let mut report = new_report(&scenario);
    let (lo_th, hi_th) = (s.theta.min(s.theta_prime), s.theta.max(s.theta_prime));
    let outcome = (|| {
        let [u1, u2, u1s, lower, upper] = two_solution_data(s, setting.solver.grid)?;
        let o = Point::ORIGIN;
        let mut lanes = vec![
            Lane::new("u1", u1, setting, vec![setting.probe(s.theta, o)])?,
            Lane::new("u2", u2, setting, vec![setting.probe(s.theta_prime, o)])?,
            Lane::new("u1_shift", u1s, setting, Vec::new())?,
            Lane::new("lower", lower, setting, vec![setting.probe(hi_th, o)])?,
            Lane::new("upper", upper, setting, vec![setting.probe(lo_th, o)])?,
        ];
        drive(setting, &mut lanes, &mut report.rows, &mut report.checks, observer, |t, lanes, checks| {
            let f = |k: usize| lanes[k].field();
            let pairs = [
                ("comparison:lower<=u1_shift", 3, 2),
                ("comparison:lower<=u2", 3, 1),
                ("comparison:u1<=upper", 0, 4),
                ("comparison:u2<=upper", 1, 4),
            ];
            for (name, a, b) in pairs {
                let c = pointwise_leq(f(a), f(b), COMPARISON_TOLERANCE)?;
                checks.push(FieldCheck {
                    name: name.into(),
                    t,
                    value: c.max_excess,
                });
            }
            Ok(())
        })
    })();
    finish(report, setting, outcome)
}

/// Least-squares line through `(x, y)`: `(slope, intercept, max |residual|)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return contract("line fit needs at least two paired points");
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return contract("line fit needs distinct abscissae");
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0, f64::max);
    Ok((slope, intercept, resid))
}

/// Fits `r_origin(t)` of solution `id` at level `θ` over `window`: `(slope, max residual)`.
pub fn estimate_speed(rows: &[Row], id: &str, theta: f64, window: [f64; 2]) -> Result<(f64, f64)> {
    let mut ts = Vec::new();
    let mut rs = Vec::new();
    for s in series(rows, id, theta).filter(|s| s.t >= window[0] && s.t <= window[1]) {
        let Some(r) = s.r_origin else {
            return contract(format!("r_origin undefined at t = {} inside the fit window", s.t));
        };
        ts.push(s.t);
        rs.push(r);
    }
    if ts.len() < 3 {
        return contract(format!("fit window holds {} records, need at least 3", ts.len()));
    }
    let (slope, _, resid) = fit_line(&ts, &rs)?;
    Ok((slope, resid))
}

fn check_verdicts(checks: &[FieldCheck], prefix: &str, name: &str, inequality: &str, tol: f64, from: f64) -> Verdict {
    let items: Vec<Cmp> = checks
        .iter()
        .filter(|c| c.name.starts_with(prefix) && c.t >= from)
        .map(|c| Cmp {
            t: c.t,
            lhs: c.value,
            rhs: 0.0,
            tol,
        })
        .collect();
    worst(name, inequality, Relation::AtMost, &items)
}

/// First record time at which `id` at `θ` has `r_origin >= δ`.
fn transient_end(rows: &[Row], id: &str, theta: f64, delta: f64) -> Option<f64> {
    series(rows, id, theta).find(|s| s.r_origin.is_some_and(|r| r >= delta)).map(|s| s.t)
}

/// Builds verdicts and derived scalars from rows and field checks only.
pub fn derive_verdicts(
    scenario: &Scenario,
    setting: &Setting,
    rows: &[Row],
    checks: &[FieldCheck],
) -> (Vec<Verdict>, Vec<Scalar>) {
    let mut verdicts = vec![check_verdicts(
        checks,
        "positivity:",
        "positivity",
        "-min u <= 0",
        0.0,
        0.0,
    )];
    let mut scalars = Vec::new();
    let late = setting.late_start();
    let origin = Point::ORIGIN;
    let h = setting.h();
    match scenario {
        Scenario::Symmetrization(s) => {
            let delta = symmetrization_delta(s, h);
            scalars.push(Scalar {
                name: "delta".into(),
                value: delta,
            });
            for &theta in &s.thetas {
                let tag = format!("theta={theta}");
                let Some(t0) = transient_end(rows, "u", theta, delta) else {
                    for (n, ineq) in [
                        ("gap", "R_e - R_i <= delta*pi + tol_geom"),
                        ("annulus", "|c_e| + R_e <= r_origin + delta*pi + tol_geom"),
                        ("star_shaped", "non-star-shaped records <= 0"),
                        ("radial_monotone", "max radial increase outside B_delta <= 0"),
                    ] {
                        verdicts.push(Verdict::inconclusive(&format!("{n}[{tag}]"), ineq, Relation::AtMost));
                    }
                    continue;
                };
                scalars.push(Scalar {
                    name: format!("transient_end[{tag}]"),
                    value: t0,
                });
                let post: Vec<&GeometrySummary> = series(rows, "u", theta).filter(|r| r.t >= t0).collect();
                let mut gaps = Vec::new();
                let mut annulus = Vec::new();
                let mut star = Vec::new();
                for r in &post {
                    let tol = setting.tol_geom(r, origin);
                    if let (Some(g), Some(tol)) = (r.gap(), tol) {
                        gaps.push(Cmp {
                            t: r.t,
                            lhs: g,
                            rhs: delta * PI,
                            tol,
                        });
                    }
                    if let (Some(outer), Some(ro), Some(tol)) = (r.outer_radius_about(origin), r.r_origin, tol) {
                        annulus.push(Cmp {
                            t: r.t,
                            lhs: outer,
                            rhs: ro + delta * PI,
                            tol,
                        });
                    }
                    star.push(Cmp {
                        t: r.t,
                        lhs: if r.star_shaped == Some(true) { 0.0 } else { 1.0 },
                        rhs: 0.0,
                        tol: 0.0,
                    });
                }
                verdicts.push(worst(
                    &format!("gap[{tag}]"),
                    "R_e - R_i <= delta*pi + tol_geom",
                    Relation::AtMost,
                    &gaps,
                ));
                verdicts.push(worst(
                    &format!("annulus[{tag}]"),
                    "|c_e| + R_e <= r_origin + delta*pi + tol_geom",
                    Relation::AtMost,
                    &annulus,
                ));
                verdicts.push(worst(
                    &format!("star_shaped[{tag}]"),
                    "non-star-shaped records <= 0",
                    Relation::AtMost,
                    &star,
                ));
                verdicts.push(check_verdicts(
                    checks,
                    "radial_monotone:",
                    &format!("radial_monotone[{tag}]"),
                    "max radial increase outside B_delta <= 0",
                    0.0,
                    t0,
                ));
            }
        }
        Scenario::AntiSymmetrization(s) => {
            derive_anti(s, setting, rows, checks, &mut verdicts, &mut scalars);
        }
        Scenario::Steepness(s) => {
            let width: Vec<(f64, f64)> = series(rows, "u", s.theta_prime)
                .filter(|r| r.t >= late)
                .filter_map(|r| {
                    let hi = if s.theta == s.theta_prime {
                        r.r_origin?
                    } else {
                        at_time(rows, "u", s.theta, r.t)?.r_origin?
                    };
                    Some((r.t, r.r_origin? - hi))
                })
                .collect();
            let ineq = "late-window min (r_theta' - r_theta) <= width_cap";
            match width.iter().min_by(|a, b| a.1.total_cmp(&b.1)) {
                Some(&(t, w)) => {
                    verdicts.push(worst("width", ineq, Relation::AtMost, &[Cmp { t, lhs: w, rhs: s.width_cap, tol: 0.0 }]));
                    scalars.push(Scalar {
                        name: "width_late_min".into(),
                        value: w,
                    });
                    let max = width.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
                    scalars.push(Scalar {
                        name: "width_late_max".into(),
                        value: max,
                    });
                }
                None => verdicts.push(Verdict::inconclusive("width", ineq, Relation::AtMost)),
            }
            let c_star = setting.reaction.linear_speed();
            scalars.push(Scalar {
                name: "c_star".into(),
                value: c_star,
            });
            let mut var = Vec::new();
            for r in series(rows, "u", s.theta).filter(|r| r.t >= late) {
                let t2 = r.t + s.shift;
                let later = series(rows, "u", s.theta).find(|q| (q.t - t2).abs() <= 1e-9 * t2.max(1.0));
                if let (Some(a), Some(b)) = (r.r_origin, later.and_then(|q| q.r_origin)) {
                    var.push(Cmp {
                        t: r.t,
                        lhs: b - a,
                        rhs: (c_star + 1.0) * s.shift,
                        tol: 0.0,
                    });
                }
            }
            verdicts.push(worst(
                "variation",
                "r_theta(t+T) - r_theta(t) <= (c* + 1) T",
                Relation::AtMost,
                &var,
            ));
            if let Some(g) = &s.lower_bound {
                let f = &setting.reaction;
                let holds = check_lower_bound(f, g, &default_z_samples(f), &default_t_samples(f))
                    .ok()
                    .map(|v| v.passed());
                verdicts.push(Verdict {
                    holds,
                    ..Verdict::inconclusive("lower_bound", "f(t,z) >= g(z) with g of ignition type", Relation::AtLeast)
                });
            }
        }
        Scenario::SpreadingSpeed(s) => {
            let c_star = setting.reaction.linear_speed();
            scalars.push(Scalar {
                name: "c_star".into(),
                value: c_star,
            });
            match estimate_speed(rows, "u", s.theta, s.window) {
                Ok((slope, resid)) => {
                    scalars.push(Scalar {
                        name: "slope".into(),
                        value: slope,
                    });
                    scalars.push(Scalar {
                        name: "max_residual".into(),
                        value: resid,
                    });
                    let t = Some(s.window[1]);
                    verdicts.push(Verdict {
                        t,
                        measured: Some(slope),
                        bound: Some(c_star),
                        tolerance: 0.05,
                        holds: Some(slope <= c_star + 0.05),
                        ..Verdict::inconclusive("speed_upper", "fitted slope <= c* + 0.05", Relation::AtMost)
                    });
                    if let Some([lo, hi]) = s.slope_range {
                        verdicts.push(Verdict {
                            t,
                            measured: Some(slope),
                            bound: Some(lo),
                            holds: Some(slope >= lo && slope <= hi),
                            ..Verdict::inconclusive(
                                "speed_range",
                                &format!("{lo} <= fitted slope <= {hi}"),
                                Relation::AtLeast,
                            )
                        });
                    }
                }
                Err(_) => {
                    verdicts.push(Verdict::inconclusive(
                        "speed_upper",
                        "fitted slope <= c* + 0.05",
                        Relation::AtMost,
                    ));
                }
            }
        }
        Scenario::TwoSolutionComparison(s) => {
            derive_two(s, setting, rows, checks, &mut verdicts, &mut scalars);
        }
    }
    (verdicts, scalars)
}

fn derive_anti(
    s: &AntiSymmetrization,
    setting: &Setting,
    rows: &[Row],
    checks: &[FieldCheck],
    verdicts: &mut Vec<Verdict>,
    scalars: &mut Vec<Scalar>,
) {
    let grid = setting.solver.grid;
    let h = setting.h();
    let late = setting.late_start();
    let theta_p = s.theta_prime.unwrap_or(0.5 * s.theta);
    let shift = pair_offset(&grid, s.xi);
    let dtilde = s.u1.delta_bound(h);
    let xi_len = s.xi.norm();
    let origin = Point::ORIGIN;
    scalars.push(Scalar {
        name: "delta_tilde".into(),
        value: dtilde,
    });

    for (prefix, name, ineq) in [
        ("comparison:max(w1,w2)<=u", "comparison_lower", "max(w1, w2) - u <= 0"),
        ("comparison:u<=w1+w2", "comparison_upper", "u - (w1 + tau w2) <= 0"),
    ] {
        verdicts.push(check_verdicts(checks, prefix, name, ineq, COMPARISON_TOLERANCE, 0.0));
    }

    let t0 = transient_end(rows, "w1", s.theta, dtilde)
        .into_iter()
        .chain(transient_end(rows, "w1", theta_p, dtilde))
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))));
    let mut re = Vec::new();
    let mut ri = Vec::new();
    if let Some(t0) = t0 {
        for u in series(rows, "u", s.theta).filter(|r| r.t >= t0) {
            let tol = setting.tol_geom(u, origin);
            let w = at_time(rows, "w1", s.theta, u.t).and_then(|w| w.r_origin);
            let wp = at_time(rows, "w1", theta_p, u.t).and_then(|w| w.r_origin);
            if let (Some(e), Some(w), Some(tol)) = (u.enclosing, w, tol) {
                re.push(Cmp {
                    t: u.t,
                    lhs: e.radius,
                    rhs: w + 0.5 * xi_len,
                    tol,
                });
            }
            if let (Some(i), Some(wp), Some(tol)) = (u.inscribed, wp, tol) {
                ri.push(Cmp {
                    t: u.t,
                    lhs: i.radius,
                    rhs: wp + dtilde * PI,
                    tol,
                });
            }
        }
    }
    verdicts.push(worst(
        "re_lower",
        "R_e(u) >= r~_theta + |xi|/2 - tol_geom",
        Relation::AtLeast,
        &re,
    ));
    verdicts.push(worst(
        "ri_upper",
        "R_i(u) <= r~_theta' + delta~*pi + tol_geom",
        Relation::AtMost,
        &ri,
    ));

    let late_gap = |id: &str| -> Option<(f64, f64, f64)> {
        series(rows, id, s.theta)
            .filter(|r| r.t >= late)
            .filter_map(|r| Some((r.t, r.gap()?, setting.tol_geom(r, origin)?)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    };
    let spherical_ineq = "late-window min gap(u) <= delta~*pi + tol_geom";
    match late_gap("u") {
        Some((t, g, tol)) => {
            scalars.push(Scalar {
                name: "gap_late_min".into(),
                value: g,
            });
            verdicts.push(
                worst("sphericality", spherical_ineq, Relation::AtMost, &[Cmp { t, lhs: g, rhs: dtilde * PI, tol }])
                    .expecting(xi_len == 0.0),
            );
            if let Some(m) = s.min_gap {
                verdicts.push(worst(
                    "min_gap",
                    "late-window min gap(u) >= min_gap",
                    Relation::AtLeast,
                    &[Cmp { t, lhs: g, rhs: m, tol: 0.0 }],
                ));
            }
        }
        None => {
            verdicts.push(Verdict::inconclusive("sphericality", spherical_ineq, Relation::AtMost).expecting(xi_len == 0.0));
        }
    }
    let control: Vec<Cmp> = series(rows, "w1", s.theta)
        .filter(|r| r.t >= late)
        .filter_map(|r| {
            Some(Cmp {
                t: r.t,
                lhs: r.gap()?,
                rhs: dtilde * PI,
                tol: setting.tol_geom(r, shift)?,
            })
        })
        .collect();
    verdicts.push(worst(
        "reference_gap",
        "late-window gap(w1) <= delta~*pi + tol_geom",
        Relation::AtMost,
        &control,
    ));
    // Chain refuting the radial-profile form of sphericality: R_i at θ' below R_e at θ.
    let chain = series(rows, "u", theta_p)
        .filter(|r| r.t >= late)
        .filter_map(|r| Some(r.inscribed?.radius - at_time(rows, "u", s.theta, r.t)?.enclosing?.radius))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
    if let Some(c) = chain {
        scalars.push(Scalar {
            name: "ri_theta_prime_minus_re_theta_late_min".into(),
            value: c,
        });
    }

    if !s.sweep.is_empty() {
        let mut xs = Vec::new();
        let mut gs = Vec::new();
        let mut threshold: Option<f64> = None;
        let mut points: Vec<(f64, String)> = vec![(xi_len, "u".to_string())];
        points.extend(s.sweep.iter().map(|&m| (sweep_xi(&grid, s.xi, m).norm(), sweep_id(m))));
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (len, id) in &points {
            if let Some((_, g, tol)) = late_gap(id) {
                xs.push(*len);
                gs.push(g);
                scalars.push(Scalar {
                    name: format!("gap_late_min[{id}]"),
                    value: g,
                });
                if threshold.is_none() && g > dtilde * PI + tol {
                    threshold = Some(*len);
                }
            }
        }
        if let Some(x) = threshold {
            scalars.push(Scalar {
                name: "xi_threshold".into(),
                value: x,
            });
        }
        let slope_ineq = format!("{} <= slope of late gap vs |xi| <= {}", s.sweep_slope[0], s.sweep_slope[1]);
        let spread_ineq = format!("max |(gap - |xi|/2) - mean| <= {}", s.sweep_spread);
        if xs.len() >= 2 {
            if let Ok((slope, _, _)) = fit_line(&xs, &gs) {
                scalars.push(Scalar {
                    name: "sweep_slope".into(),
                    value: slope,
                });
                verdicts.push(Verdict {
                    measured: Some(slope),
                    bound: Some(s.sweep_slope[0]),
                    holds: Some(slope >= s.sweep_slope[0] && slope <= s.sweep_slope[1]),
                    ..Verdict::inconclusive("sweep_slope", &slope_ineq, Relation::AtLeast)
                });
            }
            let offsets: Vec<f64> = xs.iter().zip(&gs).map(|(x, g)| g - 0.5 * x).collect();
            let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
            let spread = offsets.iter().map(|o| (o - mean).abs()).fold(0.0, f64::max);
            verdicts.push(Verdict {
                measured: Some(spread),
                bound: Some(s.sweep_spread),
                holds: Some(spread <= s.sweep_spread),
                ..Verdict::inconclusive("sweep_offset", &spread_ineq, Relation::AtMost)
            });
        } else {
            verdicts.push(Verdict::inconclusive("sweep_slope", &slope_ineq, Relation::AtLeast));
        }
    }
}

fn derive_two(
    s: &TwoSolution,
    setting: &Setting,
    rows: &[Row],
    checks: &[FieldCheck],
    verdicts: &mut Vec<Verdict>,
    scalars: &mut Vec<Scalar>,
) {
    let h = setting.h();
    let late = setting.late_start();
    let origin = Point::ORIGIN;
    let (lo_th, hi_th) = (s.theta.min(s.theta_prime), s.theta.max(s.theta_prime));
    let d1 = s.datum1.delta_bound(h);
    let d2 = s.datum2.delta_bound(h);
    let dbar = d1.max(d2);
    let zeta = s.zeta_shift.norm();

    for (prefix, name) in [
        ("comparison:lower<=u1_shift", "minmax_lower_u1"),
        ("comparison:lower<=u2", "minmax_lower_u2"),
        ("comparison:u1<=upper", "minmax_upper_u1"),
        ("comparison:u2<=upper", "minmax_upper_u2"),
    ] {
        verdicts.push(check_verdicts(checks, prefix, name, "max (a - b) <= 0", COMPARISON_TOLERANCE, 0.0));
    }

    let mut est1a = Vec::new();
    let mut est1b = Vec::new();
    let mut est2 = Vec::new();
    let mut width = Vec::new();
    for a in series(rows, "u1", s.theta) {
        let t = a.t;
        let Some(b) = at_time(rows, "u2", s.theta_prime, t) else {
            continue;
        };
        let lower = at_time(rows, "lower", hi_th, t);
        let upper = at_time(rows, "upper", lo_th, t);
        let (Some(r1), Some(r2)) = (a.r_origin, b.r_origin) else {
            continue;
        };
        if t >= late {
            width.push((t, (r1 - r2).abs()));
        }
        let (Some(lower), Some(upper)) = (lower, upper) else {
            continue;
        };
        let (Some(rl), Some(ru)) = (lower.r_origin, upper.r_origin) else {
            continue;
        };
        // Post-transient: every level covers its datum's ball.
        if r1 < d1 || r2 < d2 || rl < d2 || ru < dbar {
            continue;
        }
        let tol = [a, b, lower, upper]
            .iter()
            .filter_map(|r| setting.tol_geom(r, origin))
            .fold(0.0, f64::max);
        est1a.push(Cmp { t, lhs: rl, rhs: r2 + d2 * PI, tol });
        est1b.push(Cmp {
            t,
            lhs: rl,
            rhs: zeta + r1 + d1 * PI,
            tol,
        });
        est2.push(Cmp {
            t,
            lhs: r1.max(r2),
            rhs: ru + dbar * PI,
            tol,
        });
    }
    verdicts.push(worst(
        "est1a",
        "r_lower(theta_hi) <= r2(theta') + delta2*pi + tol_geom",
        Relation::AtMost,
        &est1a,
    ));
    verdicts.push(worst(
        "est1b",
        "r_lower(theta_hi) <= |zeta| + r1(theta) + delta1*pi + tol_geom",
        Relation::AtMost,
        &est1b,
    ));
    verdicts.push(worst(
        "est2",
        "max(r1(theta), r2(theta')) <= r_upper(theta_lo) + delta_bar*pi + tol_geom",
        Relation::AtMost,
        &est2,
    ));
    let ineq = "late-window min |r1(theta) - r2(theta')| <= cap";
    match width.iter().min_by(|a, b| a.1.total_cmp(&b.1)) {
        Some(&(t, w)) => {
            scalars.push(Scalar {
                name: "distance_late_min".into(),
                value: w,
            });
            let max = width.iter().map(|p| p.1).fold(0.0, f64::max);
            scalars.push(Scalar {
                name: "distance_late_max".into(),
                value: max,
            });
            verdicts.push(worst("distance", ineq, Relation::AtMost, &[Cmp { t, lhs: w, rhs: s.cap, tol: 0.0 }]));
        }
        None => verdicts.push(Verdict::inconclusive("distance", ineq, Relation::AtMost)),
    }
}

/// Validator verdicts for the hypotheses used by the scenarios.
pub fn hypothesis_report(f: &ReactionTerm, g: Option<&ReactionTerm>) -> Result<Vec<(String, HypothesisVerdict)>> {
    let z = default_z_samples(f);
    let t = default_t_samples(f);
    let mut out = vec![
        ("KPP".to_string(), check_kpp(f, &z, &t)?),
        (
            "superposition".to_string(),
            crate::reactions::check_superposition(f, &crate::reactions::default_pairs(f), &t)?,
        ),
    ];
    if let Some(g) = g {
        out.push(("lower_bound".to_string(), check_lower_bound(f, g, &z, &t)?));
    }
    Ok(out)
}
