//! Explicit monotone time stepping for `u_t = Δu + f(t, u)`.
//!
//! The 2D scheme is forward Euler with the 5-point Laplacian and zero ghost
//! values outside `[-L, L]^2`. With `dt = σ h² / 4` and `σ < 1` every update
//! is a nonnegative combination of the previous values (as long as
//! `dt |∂f/∂z| <= 1 - σ`), which gives a discrete comparison principle:
//! ordered data stay ordered. The comparison helpers in this module check
//! exactly that property on paired runs.
//!
//! A 1D radial scheme for `u_rr + (N - 1)/r u_r` is provided as an
//! independent cross-check of the Cartesian solver on radial data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::fields::{make_field, DatumSpec, GridSpec, Point, ScalarField};
use crate::geometry::{summarize, GeometrySummary, ProbeSpec};
use crate::reactions::{FrozenReaction, ReactionTerm};

pub const DEFAULT_CFL: f64 = 0.8;
pub const DEFAULT_BOUNDARY_TOLERANCE: f64 = 1e-6;

/// Time stepping parameters for a run on a fixed grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    #[serde(default = "default_cfl")]
    pub cfl_fraction: f64,
    pub t_end: f64,
    pub record_interval: f64,
    #[serde(default = "default_boundary_tolerance")]
    pub boundary_tolerance: f64,
}

fn default_cfl() -> f64 {
    DEFAULT_CFL
}

fn default_boundary_tolerance() -> f64 {
    DEFAULT_BOUNDARY_TOLERANCE
}

impl SolverConfig {
    pub fn new(grid: GridSpec, t_end: f64, record_interval: f64) -> Self {
        Self {
            grid,
            cfl_fraction: DEFAULT_CFL,
            t_end,
            record_interval,
            boundary_tolerance: DEFAULT_BOUNDARY_TOLERANCE,
        }
    }

    /// Nominal step `σ h² / 4`.
    pub fn dt(&self) -> f64 {
        let h = self.grid.spacing();
        self.cfl_fraction * h * h / 4.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_fraction > 0.0 && self.cfl_fraction < 1.0) {
            return contract(format!("cfl_fraction must lie in (0, 1), got {}", self.cfl_fraction));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return contract(format!("t_end must be finite and >= 0, got {}", self.t_end));
        }
        if !(self.record_interval.is_finite() && self.record_interval >= self.dt()) {
            return contract(format!(
                "record_interval {} must be at least dt = {}",
                self.record_interval,
                self.dt()
            ));
        }
        if !(self.boundary_tolerance.is_finite() && self.boundary_tolerance >= 0.0) {
            return contract("boundary_tolerance must be finite and >= 0");
        }
        Ok(())
    }

    /// Record times `0, Δ, 2Δ, ...` up to `t_end`, closing with `t_end` itself.
    pub fn record_times(&self) -> Vec<f64> {
        let mut times = vec![0.0];
        if self.t_end <= 0.0 {
            return times;
        }
        let mut k = 1usize;
        loop {
            let t = k as f64 * self.record_interval;
            if t >= self.t_end - 1e-9 * self.record_interval {
                times.push(self.t_end);
                break;
            }
            times.push(t);
            k += 1;
        }
        times
    }
}

#[inline(always)]
fn update_row(
    up: &[f64],
    row: &[f64],
    down: &[f64],
    out: &mut [f64],
    lambda: f64,
    dt: f64,
    f: impl Fn(f64) -> f64,
) {
    let n = row.len();
    let edge = |j: usize, left: f64, right: f64| {
        let c = row[j];
        c + lambda * (up[j] + down[j] + left + right - 4.0 * c) + dt * f(c)
    };
    out[0] = edge(0, 0.0, row[1]);
    out[n - 1] = edge(n - 1, row[n - 2], 0.0);
    let inner = &mut out[1..n - 1];
    for (k, o) in inner.iter_mut().enumerate() {
        let j = k + 1;
        let c = row[j];
        *o = c + lambda * (up[j] + down[j] + row[j - 1] + row[j + 1] - 4.0 * c) + dt * f(c);
    }
}

fn sweep(src: &[f64], dst: &mut [f64], n: usize, lambda: f64, dt: f64, f: impl Fn(f64) -> f64 + Sync) {
    let zeros = vec![0.0; n];
    dst.par_chunks_mut(n)
        .with_min_len(4)
        .enumerate()
        .for_each(|(i, out)| {
            let up = if i == 0 { &zeros[..] } else { &src[(i - 1) * n..i * n] };
            let down = if i + 1 == n { &zeros[..] } else { &src[(i + 1) * n..(i + 2) * n] };
            update_row(up, &src[i * n..(i + 1) * n], down, out, lambda, dt, &f);
        });
}

/// One forward Euler step from `src` into `dst`; each output node depends only on `src`.
fn step_into(src: &[f64], dst: &mut [f64], grid: &GridSpec, reaction: FrozenReaction, dt: f64) {
    let n = grid.n();
    let h = grid.spacing();
    let lambda = dt / (h * h);
    match reaction {
        FrozenReaction::Linear(k) => sweep(src, dst, n, lambda, dt, move |z| k * z),
        FrozenReaction::Logistic(k) => sweep(src, dst, n, lambda, dt, move |z| k * z * (1.0 - z)),
        other => sweep(src, dst, n, lambda, dt, move |z| other.eval(z)),
    }
}

fn check_2d_dt(grid: &GridSpec, dt: f64) -> Result<()> {
    let h = grid.spacing();
    let bound = h * h / 4.0;
    if !(dt > 0.0 && dt <= bound * (1.0 + 1e-12)) {
        return contract(format!("dt = {dt} violates the stability bound h^2/4 = {bound}"));
    }
    Ok(())
}

/// Forward Euler step of the 2D problem; the returned field carries time `t + dt`.
pub fn step_2d(field: &ScalarField, f: &ReactionTerm, dt: f64) -> Result<ScalarField> {
    check_2d_dt(field.grid(), dt)?;
    let mut out = ScalarField::zeros(*field.grid(), field.time() + dt);
    step_into(field.values(), out.values_mut(), field.grid(), f.at(field.time()), dt);
    if out.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Blowup { t: out.time() });
    }
    Ok(out)
}

/// Stateful 2D integrator with a reusable scratch buffer.
#[derive(Debug, Clone)]
pub struct Stepper {
    current: ScalarField,
    scratch: Vec<f64>,
    reaction: ReactionTerm,
    dt_max: f64,
}

impl Stepper {
    pub fn new(initial: ScalarField, reaction: ReactionTerm, cfl_fraction: f64) -> Result<Self> {
        let h = initial.grid().spacing();
        let dt_max = cfl_fraction * h * h / 4.0;
        check_2d_dt(initial.grid(), dt_max)?;
        Ok(Self {
            scratch: vec![0.0; initial.values().len()],
            current: initial,
            reaction,
            dt_max,
        })
    }

    pub fn field(&self) -> &ScalarField {
        &self.current
    }

    pub fn time(&self) -> f64 {
        self.current.time()
    }

    /// Steps with a uniform `dt <= dt_max` so that the final time is exactly `t_target`.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        let t0 = self.current.time();
        let span = t_target - t0;
        if span < 0.0 {
            return contract(format!("cannot step backwards from {t0} to {t_target}"));
        }
        if span == 0.0 {
            return Ok(());
        }
        let steps = (span / self.dt_max * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        let grid = *self.current.grid();
        for s in 0..steps {
            let t = t0 + s as f64 * dt;
            step_into(self.current.values(), &mut self.scratch, &grid, self.reaction.at(t), dt);
            self.current.swap_values(&mut self.scratch);
        }
        self.current.set_time(t_target);
        if self.current.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Blowup { t: t_target });
        }
        Ok(())
    }
}

/// Fails if any boundary node exceeds `tol` in absolute value.
pub fn boundary_guard(field: &ScalarField, tol: f64) -> Result<()> {
    let n = field.grid().n();
    let mut worst = (0.0f64, 0usize, 0usize);
    let mut visit = |i: usize, j: usize| {
        let v = field.at(i, j).abs();
        if v > worst.0 {
            worst = (v, i, j);
        }
    };
    for k in 0..n {
        visit(0, k);
        visit(n - 1, k);
        visit(k, 0);
        visit(k, n - 1);
    }
    if worst.0 > tol {
        return Err(Error::BoundaryGuard {
            t: field.time(),
            max: worst.0,
            i: worst.1,
            j: worst.2,
            tol,
        });
    }
    Ok(())
}

/// Outcome of a nodewise `a <= b + tol` check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub holds: bool,
    /// `max (a - b)` over all nodes.
    pub max_excess: f64,
    pub at: (usize, usize),
}

pub fn pointwise_leq(a: &ScalarField, b: &ScalarField, tol: f64) -> Result<Comparison> {
    if a.grid() != b.grid() {
        return contract("pointwise comparison of fields on different grids");
    }
    if (a.time() - b.time()).abs() > 1e-12 * a.time().abs().max(1.0) {
        return contract(format!(
            "pointwise comparison at different times {} and {}",
            a.time(),
            b.time()
        ));
    }
    let n = a.grid().n();
    let (mut worst, mut at) = (f64::NEG_INFINITY, 0usize);
    for (k, (&x, &y)) in a.values().iter().zip(b.values()).enumerate() {
        let d = x - y;
        if d > worst {
            worst = d;
            at = k;
        }
    }
    Ok(Comparison {
        holds: worst <= tol,
        max_excess: worst,
        at: (at / n, at % n),
    })
}

/// `τ_y u(x) = u(x - y)` for a lattice vector `y`; zeros flow in from outside.
pub fn translate_field(field: &ScalarField, shift: Point) -> Result<ScalarField> {
    let grid = *field.grid();
    let (di, dj) = grid.lattice_offset(shift)?;
    let n = grid.n() as isize;
    let mut out = ScalarField::zeros(grid, field.time());
    {
        let dst = out.values_mut();
        for i in 0..n {
            let si = i - di;
            if si < 0 || si >= n {
                continue;
            }
            for j in 0..n {
                let sj = j - dj;
                if sj < 0 || sj >= n {
                    continue;
                }
                dst[(i * n + j) as usize] = field.values()[(si * n + sj) as usize];
            }
        }
    }
    Ok(out)
}

/// Summary statistics stored with every record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStats {
    pub max: f64,
    pub min: f64,
    pub mass: f64,
    pub origin_value: f64,
}

impl FieldStats {
    pub fn of(field: &ScalarField) -> Self {
        Self {
            max: field.max(),
            min: field.min(),
            mass: field.mass(),
            origin_value: field.origin_value(),
        }
    }
}

/// What to measure at each record time.
#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    Geometry(ProbeSpec),
    Snapshot,
}

#[derive(Debug, Clone)]
pub struct Record {
    pub t: f64,
    pub stats: FieldStats,
    pub summaries: Vec<GeometrySummary>,
    pub snapshot: Option<ScalarField>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub reaction: ReactionTerm,
    pub datum: Option<DatumSpec>,
    pub records: Vec<Record>,
}

fn observe(field: &ScalarField, probes: &[Probe]) -> Record {
    let mut summaries = Vec::new();
    let mut snapshot = None;
    for p in probes {
        match p {
            Probe::Geometry(spec) => summaries.push(summarize(field, spec)),
            Probe::Snapshot => snapshot = Some(field.clone()),
        }
    }
    Record {
        t: field.time(),
        stats: FieldStats::of(field),
        summaries,
        snapshot,
    }
}

/// Integrates from the datum to `t_end`, probing and guarding at each record time.
///
/// On failure the error is returned together with the records gathered so far.
pub fn run_from_field(
    config: &SolverConfig,
    initial: ScalarField,
    f: &ReactionTerm,
    probes: &[Probe],
) -> std::result::Result<Trajectory, (Error, Trajectory)> {
    let mut traj = Trajectory {
        config: *config,
        reaction: *f,
        datum: None,
        records: Vec::new(),
    };
    if let Err(e) = config.validate().and_then(|_| f.validate()) {
        return Err((e, traj));
    }
    let mut stepper = match Stepper::new(initial, *f, config.cfl_fraction) {
        Ok(s) => s,
        Err(e) => return Err((e, traj)),
    };
    for t in config.record_times() {
        if let Err(e) = stepper
            .advance_to(t)
            .and_then(|_| boundary_guard(stepper.field(), config.boundary_tolerance))
        {
            return Err((e, traj));
        }
        traj.records.push(observe(stepper.field(), probes));
    }
    Ok(traj)
}

pub fn run(
    config: &SolverConfig,
    datum: &DatumSpec,
    f: &ReactionTerm,
    probes: &[Probe],
) -> Result<Trajectory> {
    for p in probes {
        if let Probe::Geometry(spec) = p {
            if !(spec.theta > 0.0 && spec.theta < f.saturation()) {
                return contract(format!(
                    "probe threshold {} outside (0, {})",
                    spec.theta,
                    f.saturation()
                ));
            }
        }
    }
    let initial = make_field(config.grid, datum)?;
    let mut traj = run_from_field(config, initial, f, probes).map_err(|(e, _)| e)?;
    traj.datum = Some(datum.clone());
    Ok(traj)
}

/// Radially symmetric solution sampled at `r_k = k h`, `k = 0..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    dim: usize,
    spacing: f64,
    values: Vec<f64>,
    time: f64,
}

impl RadialProfile {
    pub fn new(dim: usize, spacing: f64, values: Vec<f64>, time: f64) -> Result<Self> {
        if dim == 0 {
            return contract("radial dimension must be >= 1");
        }
        if !(spacing > 0.0) || values.len() < 2 {
            return contract("radial profile needs h > 0 and at least two nodes");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return contract("radial profile has non-finite values");
        }
        Ok(Self {
            dim,
            spacing,
            values,
            time,
        })
    }

    /// Samples `g(r)` on `m + 1` nodes.
    pub fn from_fn(dim: usize, spacing: f64, last_node: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=last_node).map(|k| g(k as f64 * spacing)).collect();
        Self::new(dim, spacing, values, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Linear interpolation in `r` against a zero ghost beyond the last node.
    pub fn value_at(&self, r: f64) -> f64 {
        let x = r / self.spacing;
        let k = x.floor() as usize;
        let w = x - k as f64;
        let at = |i: usize| self.values.get(i).copied().unwrap_or(0.0);
        at(k) * (1.0 - w) + at(k + 1) * w
    }

    /// Largest `dt` keeping the radial scheme monotone: `h² / (2N)`.
    pub fn max_dt(&self) -> f64 {
        self.spacing * self.spacing / (2.0 * self.dim as f64)
    }
}

/// Forward Euler step of `u_t = u_rr + (N - 1)/r u_r + f(t, u)` with a zero ghost beyond the last node.
pub fn step_radial(profile: &RadialProfile, f: &ReactionTerm, dt: f64) -> Result<RadialProfile> {
    let bound = profile.max_dt();
    if !(dt > 0.0 && dt <= bound * (1.0 + 1e-12)) {
        return contract(format!("dt = {dt} violates the radial stability bound h^2/(2N) = {bound}"));
    }
    let mut out = profile.values.clone();
    radial_step_into(&profile.values, &mut out, profile.dim, profile.spacing, f.at(profile.time), dt);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Blowup { t: profile.time + dt });
    }
    Ok(RadialProfile {
        values: out,
        time: profile.time + dt,
        ..*profile
    })
}

fn radial_step_into(u: &[f64], out: &mut [f64], dim: usize, h: f64, fr: FrozenReaction, dt: f64) {
    let m = u.len();
    let inv_h2 = 1.0 / (h * h);
    let curv = (dim as f64 - 1.0) / 2.0;
    // Origin: Δu(0) = N u''(0) with the symmetric ghost u_{-1} = u_1.
    out[0] = u[0] + dt * (2.0 * dim as f64 * (u[1] - u[0]) * inv_h2 + fr.eval(u[0]));
    for k in 1..m {
        let right = if k + 1 < m { u[k + 1] } else { 0.0 };
        let left = u[k - 1];
        let lap = (right - 2.0 * u[k] + left) * inv_h2 + curv / k as f64 * (right - left) * inv_h2;
        out[k] = u[k] + dt * (lap + fr.eval(u[k]));
    }
}

/// Integrates a radial profile to `t_target` with uniform steps no larger than `dt_max`.
pub fn advance_radial(profile: &RadialProfile, f: &ReactionTerm, dt_max: f64, t_target: f64) -> Result<RadialProfile> {
    let span = t_target - profile.time;
    if span < 0.0 {
        return contract("cannot step a radial profile backwards");
    }
    if span == 0.0 {
        return Ok(profile.clone());
    }
    if dt_max > profile.max_dt() * (1.0 + 1e-12) {
        return contract("radial dt exceeds the stability bound");
    }
    let steps = (span / dt_max * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let mut cur = profile.values.clone();
    let mut next = cur.clone();
    for s in 0..steps {
        let t = profile.time + s as f64 * dt;
        radial_step_into(&cur, &mut next, profile.dim, profile.spacing, f.at(t), dt);
        std::mem::swap(&mut cur, &mut next);
    }
    if cur.iter().any(|v| !v.is_finite()) {
        return Err(Error::Blowup { t: t_target });
    }
    Ok(RadialProfile {
        values: cur,
        time: t_target,
        ..*profile
    })
}
