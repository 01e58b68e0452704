//! Level-set measurements on grid fields.
//!
//! * [`inscribed_ball`]: largest lattice-centred ball inside `{u > θ}`, from an
//!   exact Euclidean distance transform of the complement.
//! * [`enclosing_ball`]: minimal enclosing circle of the inside nodes,
//!   inflated by half a cell diagonal.
//! * Ray scans from a reference point give the inscribed radius about that
//!   point, star-shapedness and the polar profile `φ(α)` of the boundary.

use std::f64::consts::{PI, SQRT_2};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Error, Result};
use crate::fields::{ray_exit_distance, GridSpec, Point, ScalarField};

pub const DEFAULT_RAYS: usize = 720;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Hysteresis above `θ` before a ray counts as re-entering the level set.
pub const REENTRY_HYSTERESIS: f64 = 1e-9;
/// Allowed increase between successive ray samples for the monotonicity check.
pub const MONOTONE_TOLERANCE: f64 = 1e-10;

/// Nodes where `u > θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetMask {
    theta: f64,
    grid: GridSpec,
    inside: Vec<bool>,
    time: f64,
}

impl LevelSetMask {
    pub fn from_bools(grid: GridSpec, inside: Vec<bool>, theta: f64, time: f64) -> Result<Self> {
        if inside.len() != grid.len() {
            return contract("mask size does not match the grid");
        }
        Ok(Self {
            theta,
            grid,
            inside,
            time,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.inside[self.grid.index(i, j)]
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.inside.iter().any(|&b| b)
    }

    /// Inside nodes that are leftmost or rightmost in their row; every convex hull vertex is one.
    pub fn row_extremes(&self) -> Vec<(usize, usize)> {
        let n = self.grid.n();
        let mut out = Vec::new();
        for i in 0..n {
            let row = &self.inside[i * n..(i + 1) * n];
            if let Some(first) = row.iter().position(|&b| b) {
                let last = row.iter().rposition(|&b| b).unwrap_or(first);
                out.push((i, first));
                if last != first {
                    out.push((i, last));
                }
            }
        }
        out
    }
}

/// Strict nodewise threshold `u > θ`; `θ` must lie in `(0, Z)`.
pub fn upper_level_set(field: &ScalarField, theta: f64, saturation: f64) -> Result<LevelSetMask> {
    if !(theta > 0.0 && theta < saturation) {
        return contract(format!("threshold {theta} outside (0, {saturation})"));
    }
    Ok(LevelSetMask {
        theta,
        grid: *field.grid(),
        inside: field.values().iter().map(|&v| v > theta).collect(),
        time: field.time(),
    })
}

/// A disc in physical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub radius: f64,
    pub center: Point,
}

/// 1D squared distance transform of a sampled function (lower envelope of parabolas).
fn envelope_1d(f: &[f64], out: &mut [f64], v: &mut Vec<usize>, z: &mut Vec<f64>) {
    let n = f.len();
    v.clear();
    z.clear();
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        let qf = q as f64;
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let pf = p as f64;
                    let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf));
                    if s <= *z.last().unwrap() {
                        v.pop();
                        z.pop();
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    if v.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let qf = q as f64;
        while k + 1 < v.len() && z[k + 1] < qf {
            k += 1;
        }
        let d = qf - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Exact squared lattice distance (in cells²) from every node to the nearest outside node.
pub fn squared_distance_to_outside(mask: &LevelSetMask) -> Vec<f64> {
    let n = mask.grid.n();
    // Pass 1 along j: exact 1D distances per row.
    let mut g = vec![f64::INFINITY; n * n];
    for i in 0..n {
        let row = &mask.inside[i * n..(i + 1) * n];
        let dst = &mut g[i * n..(i + 1) * n];
        let mut last: Option<usize> = None;
        for j in 0..n {
            if !row[j] {
                last = Some(j);
            }
            if let Some(k) = last {
                dst[j] = (j - k) as f64;
            }
        }
        last = None;
        for j in (0..n).rev() {
            if !row[j] {
                last = Some(j);
            }
            if let Some(k) = last {
                dst[j] = dst[j].min((k - j) as f64);
            }
        }
        for d in dst.iter_mut() {
            *d *= *d;
        }
    }
    // Pass 2 along i: parabola envelope per column.
    let mut out = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    let mut res = vec![0.0; n];
    let (mut v, mut z) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for j in 0..n {
        for i in 0..n {
            col[i] = g[i * n + j];
        }
        envelope_1d(&col, &mut res, &mut v, &mut z);
        for i in 0..n {
            out[i * n + j] = res[i];
        }
    }
    out
}

/// Largest ball centred at a node that avoids every outside node and the domain edge.
///
/// Ties in the radius go to the lexicographically smallest `(i, j)`.
pub fn inscribed_ball(mask: &LevelSetMask) -> Result<Ball> {
    if mask.is_empty() {
        return Err(Error::EmptyLevelSet);
    }
    let grid = mask.grid;
    let n = grid.n();
    let d2 = squared_distance_to_outside(mask);
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        for j in 0..n {
            if !mask.inside[i * n + j] {
                continue;
            }
            let edge = grid.cells_to_edge(i, j) as f64;
            let r2 = d2[i * n + j].min(edge * edge);
            if best.is_none_or(|(b, _, _)| r2 > b) {
                best = Some((r2, i, j));
            }
        }
    }
    let (r2, i, j) = best.expect("nonempty mask");
    Ok(Ball {
        radius: r2.sqrt() * grid.spacing(),
        center: grid.node(i, j),
    })
}

/// Circle in lattice (index) coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    fn through_one(p: (f64, f64)) -> Self {
        Circle { cx: p.0, cy: p.1, r: 0.0 }
    }

    fn through_two(a: (f64, f64), b: (f64, f64)) -> Self {
        let cx = 0.5 * (a.0 + b.0);
        let cy = 0.5 * (a.1 + b.1);
        let r = (a.0 - cx).hypot(a.1 - cy).max((b.0 - cx).hypot(b.1 - cy));
        Circle { cx, cy, r }
    }

    /// Circumcircle; collinear triples fall back to the widest pair.
    fn through_three(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Self {
        let (bx, by) = (b.0 - a.0, b.1 - a.1);
        let (qx, qy) = (c.0 - a.0, c.1 - a.1);
        let d = 2.0 * (bx * qy - by * qx);
        if d.abs() < 1e-12 {
            let pairs = [(a, b), (b, c), (a, c)];
            return pairs
                .iter()
                .map(|&(p, q)| Circle::through_two(p, q))
                .fold(Circle::through_one(a), |acc, c| if c.r > acc.r { c } else { acc });
        }
        let b2 = bx * bx + by * by;
        let c2 = qx * qx + qy * qy;
        let ux = (qy * b2 - by * c2) / d;
        let uy = (bx * c2 - qx * b2) / d;
        let (cx, cy) = (a.0 + ux, a.1 + uy);
        let r = [a, b, c]
            .iter()
            .map(|p| (p.0 - cx).hypot(p.1 - cy))
            .fold(0.0, f64::max);
        Circle { cx, cy, r }
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        (p.0 - self.cx).hypot(p.1 - self.cy) <= self.r * (1.0 + 1e-12) + 1e-12
    }
}

/// Minimal enclosing circle by randomized incremental construction with move-to-front.
pub fn min_enclosing_circle(points: &[(f64, f64)], seed: u64) -> Option<Circle> {
    if points.is_empty() {
        return None;
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut circle = Circle::through_one(pts[0]);
    for i in 1..pts.len() {
        if circle.contains(pts[i]) {
            continue;
        }
        let p = pts[i];
        let mut c = Circle::through_one(p);
        for j in 0..i {
            if c.contains(pts[j]) {
                continue;
            }
            let q = pts[j];
            let mut cq = Circle::through_two(p, q);
            for k in 0..j {
                if !cq.contains(pts[k]) {
                    cq = Circle::through_three(p, q, pts[k]);
                }
            }
            c = cq;
        }
        circle = c;
        // Points that forced a rebuild tend to stay on the boundary: test them first.
        pts[..=i].rotate_right(1);
    }
    Some(circle)
}

/// Smallest disc containing every inside cell: the minimal enclosing circle of
/// the inside nodes plus `h / sqrt(2)`.
pub fn enclosing_ball(mask: &LevelSetMask, seed: u64) -> Result<Ball> {
    if mask.is_empty() {
        return Err(Error::EmptyLevelSet);
    }
    let grid = mask.grid;
    let h = grid.spacing();
    let c0 = grid.center_index() as f64;
    let pts: Vec<(f64, f64)> = mask
        .row_extremes()
        .into_iter()
        .map(|(i, j)| (i as f64 - c0, j as f64 - c0))
        .collect();
    let c = min_enclosing_circle(&pts, seed).expect("nonempty point set");
    Ok(Ball {
        radius: c.r * h + h / SQRT_2,
        center: Point::new(c.cx * h, c.cy * h),
    })
}

/// Result of scanning one ray from the reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayScan {
    pub angle: f64,
    /// First radius where `u <= θ`, or the exit distance when the ray never leaves the set.
    pub crossing: f64,
    pub reenters: bool,
}

fn check_rays(rays: usize) -> Result<()> {
    if rays < 3 {
        return contract(format!("need at least 3 rays, got {rays}"));
    }
    Ok(())
}

/// Scans `rays` equispaced rays from `center` at step `h/2`, locating the
/// first down-crossing of `θ` by bisection to `h/100`.
pub fn ray_scan(field: &ScalarField, theta: f64, center: Point, rays: usize) -> Result<Vec<RayScan>> {
    check_rays(rays)?;
    let grid = field.grid();
    if !grid.contains(center) {
        return Err(Error::OutOfDomain {
            x: center.x,
            y: center.y,
        });
    }
    if field.sample_unchecked(center) <= theta {
        return Err(Error::LevelNotInvaded {
            theta,
            t: field.time(),
        });
    }
    let h = grid.spacing();
    let step = 0.5 * h;
    let tol = h / 100.0;
    let scans = (0..rays)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / rays as f64;
            let e = Point::from_angle(angle);
            let exit = ray_exit_distance(grid, center, e);
            let at = |rho: f64| field.sample_unchecked(center + e * rho);
            let count = (exit / step).floor() as usize;
            let mut crossing = None;
            let mut reenters = false;
            let mut prev = 0.0;
            for s in 1..=count + 1 {
                let rho = if s > count { exit } else { s as f64 * step };
                if rho <= prev {
                    continue;
                }
                let v = at(rho);
                match crossing {
                    None if v <= theta => {
                        let (mut lo, mut hi) = (prev, rho);
                        while hi - lo > tol {
                            let mid = 0.5 * (lo + hi);
                            if at(mid) > theta {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        crossing = Some(0.5 * (lo + hi));
                    }
                    Some(_) if v > theta + REENTRY_HYSTERESIS => {
                        reenters = true;
                        break;
                    }
                    _ => {}
                }
                prev = rho;
            }
            RayScan {
                angle,
                crossing: crossing.unwrap_or(exit),
                reenters,
            }
        })
        .collect();
    Ok(scans)
}

/// `min` over rays of the first crossing radius about `center`.
pub fn inscribed_radius_about(field: &ScalarField, theta: f64, center: Point, rays: usize) -> Result<f64> {
    let scans = ray_scan(field, theta, center, rays)?;
    Ok(scans.iter().map(|s| s.crossing).fold(f64::INFINITY, f64::min))
}

/// Radius `r_θ(t)` of the largest origin-centred ball found inside `{u > θ}`.
pub fn origin_inscribed_radius(field: &ScalarField, theta: f64, rays: usize) -> Result<f64> {
    inscribed_radius_about(field, theta, Point::ORIGIN, rays)
}

pub fn star_shaped_about(field: &ScalarField, theta: f64, center: Point, rays: usize) -> Result<bool> {
    Ok(ray_scan(field, theta, center, rays)?.iter().all(|s| !s.reenters))
}

pub fn star_shaped_wrt_origin(field: &ScalarField, theta: f64, rays: usize) -> Result<bool> {
    star_shaped_about(field, theta, Point::ORIGIN, rays)
}

/// Boundary of a star-shaped level set in polar form.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarProfile {
    /// `φ(α_k)` for `α_k = 2πk/M`.
    pub radii: Vec<f64>,
    /// `max_k |φ(α_{k+1}) - φ(α_k)| / (2π/M)`, cyclic.
    pub max_slope: f64,
}

impl PolarProfile {
    fn from_scans(scans: &[RayScan]) -> Result<Self> {
        if scans.iter().any(|s| s.reenters) {
            return Err(Error::ProfileUndefined);
        }
        let radii: Vec<f64> = scans.iter().map(|s| s.crossing).collect();
        let m = radii.len();
        let dalpha = 2.0 * PI / m as f64;
        let max_slope = (0..m)
            .map(|k| (radii[(k + 1) % m] - radii[k]).abs() / dalpha)
            .fold(0.0, f64::max);
        Ok(Self { radii, max_slope })
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }
}

pub fn polar_profile_about(field: &ScalarField, theta: f64, center: Point, rays: usize) -> Result<PolarProfile> {
    PolarProfile::from_scans(&ray_scan(field, theta, center, rays)?)
}

pub fn polar_profile(field: &ScalarField, theta: f64, rays: usize) -> Result<PolarProfile> {
    polar_profile_about(field, theta, Point::ORIGIN, rays)
}

/// Outcome of the radial monotonicity check outside a ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonotoneVerdict {
    Pass,
    Fail { angle: f64, rho: f64, increase: f64 },
}

impl MonotoneVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, MonotoneVerdict::Pass)
    }
}

/// Checks that `ρ ↦ u(center + ρe)` is nonincreasing (up to [`MONOTONE_TOLERANCE`])
/// for `ρ >= δ + h` along every ray.
pub fn radial_monotone_about(field: &ScalarField, delta: f64, center: Point, rays: usize) -> Result<MonotoneVerdict> {
    check_rays(rays)?;
    let grid = field.grid();
    if !(delta >= 0.0 && delta < grid.half_width()) {
        return contract(format!("delta = {delta} must lie in [0, L)"));
    }
    let h = grid.spacing();
    let step = 0.5 * h;
    let start = delta + h;
    let mut worst = MonotoneVerdict::Pass;
    let mut worst_inc = MONOTONE_TOLERANCE;
    for k in 0..rays {
        let angle = 2.0 * PI * k as f64 / rays as f64;
        let e = Point::from_angle(angle);
        let exit = ray_exit_distance(grid, center, e);
        if exit <= start {
            continue;
        }
        let mut rho = start;
        let mut prev = field.sample_unchecked(center + e * rho);
        while rho + step <= exit {
            rho += step;
            let v = field.sample_unchecked(center + e * rho);
            let inc = v - prev;
            if inc > worst_inc {
                worst_inc = inc;
                worst = MonotoneVerdict::Fail { angle, rho, increase: inc };
            }
            prev = v;
        }
    }
    Ok(worst)
}

pub fn radial_monotone_outside(field: &ScalarField, delta: f64, rays: usize) -> Result<MonotoneVerdict> {
    radial_monotone_about(field, delta, Point::ORIGIN, rays)
}

/// `max |u(x) - φ̄(|x - center|)|` where `φ̄` is the mean of `u` over radial bins of width `h`.
pub fn radial_deviation(field: &ScalarField, center: Point) -> Result<f64> {
    let grid = field.grid();
    if !grid.contains(center) {
        return Err(Error::OutOfDomain {
            x: center.x,
            y: center.y,
        });
    }
    let n = grid.n();
    let h = grid.spacing();
    let bins_needed = (2.0 * SQRT_2 * grid.half_width() / h).ceil() as usize + 2;
    let mut sums = vec![0.0; bins_needed];
    let mut counts = vec![0usize; bins_needed];
    let mut bin_of = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            let b = (grid.node(i, j).distance(center) / h).floor() as usize;
            bin_of[i * n + j] = b;
            sums[b] += field.at(i, j);
            counts[b] += 1;
        }
    }
    let dev = field
        .values()
        .iter()
        .zip(&bin_of)
        .map(|(&v, &b)| (v - sums[b] / counts[b] as f64).abs())
        .fold(0.0, f64::max);
    Ok(dev)
}

/// What to measure on a field at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    pub theta: f64,
    /// Reference point for the ray-based quantities (the origin of the datum's ball).
    pub center: Point,
    pub rays: usize,
    pub seed: u64,
}

impl ProbeSpec {
    pub fn new(theta: f64) -> Self {
        Self {
            theta,
            center: Point::ORIGIN,
            rays: DEFAULT_RAYS,
            seed: DEFAULT_SEED,
        }
    }

    pub fn about(mut self, center: Point) -> Self {
        self.center = center;
        self
    }

    pub fn with_rays(mut self, rays: usize) -> Self {
        self.rays = rays;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// One row of geometric measurements; `None` marks a quantity that is
/// undefined at this time (empty level set, reference point not yet invaded,
/// or a non-star-shaped set for the polar slope).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySummary {
    pub t: f64,
    pub theta: f64,
    pub inscribed: Option<Ball>,
    pub enclosing: Option<Ball>,
    pub r_origin: Option<f64>,
    pub star_shaped: Option<bool>,
    pub max_polar_slope: Option<f64>,
    pub radial_deviation: Option<f64>,
}

impl GeometrySummary {
    pub fn empty(t: f64, theta: f64) -> Self {
        Self {
            t,
            theta,
            inscribed: None,
            enclosing: None,
            r_origin: None,
            star_shaped: None,
            max_polar_slope: None,
            radial_deviation: None,
        }
    }

    /// `R_e - R_i`.
    pub fn gap(&self) -> Option<f64> {
        Some(self.enclosing?.radius - self.inscribed?.radius)
    }

    /// Upper bound on the radius of the smallest ball about `reference` that contains the set.
    pub fn outer_radius_about(&self, reference: Point) -> Option<f64> {
        let e = self.enclosing?;
        Some(e.center.distance(reference) + e.radius)
    }
}

pub fn summarize(field: &ScalarField, spec: &ProbeSpec) -> GeometrySummary {
    let mut s = GeometrySummary::empty(field.time(), spec.theta);
    let mask = LevelSetMask {
        theta: spec.theta,
        grid: *field.grid(),
        inside: field.values().iter().map(|&v| v > spec.theta).collect(),
        time: field.time(),
    };
    if mask.is_empty() {
        return s;
    }
    s.inscribed = inscribed_ball(&mask).ok();
    s.enclosing = enclosing_ball(&mask, spec.seed).ok();
    if let Ok(scans) = ray_scan(field, spec.theta, spec.center, spec.rays) {
        s.r_origin = Some(scans.iter().map(|r| r.crossing).fold(f64::INFINITY, f64::min));
        let star = scans.iter().all(|r| !r.reenters);
        s.star_shaped = Some(star);
        if star {
            s.max_polar_slope = PolarProfile::from_scans(&scans).ok().map(|p| p.max_slope);
        }
    }
    if let Some(b) = s.inscribed {
        s.radial_deviation = radial_deviation(field, b.center).ok();
    }
    s
}
