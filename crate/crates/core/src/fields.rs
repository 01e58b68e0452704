//! Uniform square grids, grid-sampled scalar fields and compactly supported
//! initial data built from bumps.
//!
//! Node `(i, j)` sits at `(x_i, y_j)` with `x_i = -L + i h` and `y_j = -L + j h`.
//! Values are stored with `i` as the slow index: `values[i * n + j]`. The
//! number of nodes per side is odd so the origin is always node
//! `((n - 1) / 2, (n - 1) / 2)`.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(alpha: f64) -> Self {
        Self::new(alpha.cos(), alpha.sin())
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Square grid `[-L, L]^2` with an odd number of nodes per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpecRaw", into = "GridSpecRaw")]
pub struct GridSpec {
    half_width: f64,
    nodes: usize,
}

#[derive(Serialize, Deserialize)]
struct GridSpecRaw {
    half_width: f64,
    nodes_per_side: usize,
}

impl TryFrom<GridSpecRaw> for GridSpec {
    type Error = Error;
    fn try_from(raw: GridSpecRaw) -> Result<Self> {
        GridSpec::new(raw.half_width, raw.nodes_per_side)
    }
}

impl From<GridSpec> for GridSpecRaw {
    fn from(g: GridSpec) -> Self {
        GridSpecRaw {
            half_width: g.half_width,
            nodes_per_side: g.nodes,
        }
    }
}

impl GridSpec {
    pub fn new(half_width: f64, nodes_per_side: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return contract(format!("half_width must be positive, got {half_width}"));
        }
        if nodes_per_side < 3 {
            return contract(format!("nodes_per_side must be at least 3, got {nodes_per_side}"));
        }
        if nodes_per_side % 2 == 0 {
            return contract(format!("nodes_per_side must be odd, got {nodes_per_side}"));
        }
        Ok(Self {
            half_width,
            nodes: nodes_per_side,
        })
    }

    /// Grid with the given half width and spacing; `2L/h` must be an even integer.
    pub fn with_spacing(half_width: f64, spacing: f64) -> Result<Self> {
        let cells = 2.0 * half_width / spacing;
        let rounded = cells.round();
        if (cells - rounded).abs() > 1e-9 * cells.max(1.0) {
            return contract(format!("2L/h = {cells} is not an integer"));
        }
        Self::new(half_width, rounded as usize + 1)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes * self.nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }

    /// Index of the node at the origin along either axis.
    pub fn center_index(&self) -> usize {
        (self.nodes - 1) / 2
    }

    pub fn coord(&self, k: usize) -> f64 {
        // Measured from the centre node so that the origin is exactly 0.
        (k as f64 - self.center_index() as f64) * self.spacing()
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new(self.coord(i), self.coord(j))
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nodes + j
    }

    pub fn contains(&self, p: Point) -> bool {
        let lim = self.half_width * (1.0 + 1e-12);
        p.x.abs() <= lim && p.y.abs() <= lim
    }

    /// Distance from node `(i, j)` to the edge of the square, in cells.
    pub fn cells_to_edge(&self, i: usize, j: usize) -> usize {
        let last = self.nodes - 1;
        i.min(j).min(last - i).min(last - j)
    }

    /// Converts a displacement into whole cells, failing if it is not a lattice vector.
    pub fn lattice_offset(&self, v: Point) -> Result<(isize, isize)> {
        let h = self.spacing();
        let to_cells = |c: f64| -> Result<isize> {
            let k = c / h;
            let r = k.round();
            if (k - r).abs() > 1e-9 {
                return contract(format!("shift component {c} is not a multiple of h = {h}"));
            }
            Ok(r as isize)
        };
        Ok((to_cells(v.x)?, to_cells(v.y)?))
    }

    /// Nearest lattice vector to `v`.
    pub fn snap(&self, v: Point) -> Point {
        let h = self.spacing();
        Point::new((v.x / h).round() * h, (v.y / h).round() * h)
    }
}

/// Grid-sampled solution `u(t, .)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
    time: f64,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec, time: f64) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            time,
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return contract(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            ));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return contract(format!("non-finite value at flat index {k}"));
        }
        Ok(Self { grid, values, time })
    }

    pub fn from_fn(grid: GridSpec, time: f64, f: impl Fn(Point) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..n {
            for j in 0..n {
                values.push(f(grid.node(i, j)));
            }
        }
        Self { grid, values, time }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn swap_values(&mut self, other: &mut Vec<f64>) {
        debug_assert_eq!(other.len(), self.values.len());
        std::mem::swap(&mut self.values, other);
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Discrete mass `sum u h^2`.
    pub fn mass(&self) -> f64 {
        let h = self.grid.spacing();
        self.values.iter().sum::<f64>() * h * h
    }

    pub fn origin_value(&self) -> f64 {
        let c = self.grid.center_index();
        self.at(c, c)
    }

    fn zip_with(&self, other: &ScalarField, op: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        if self.grid != other.grid {
            return contract("fields live on different grids");
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(ScalarField {
            grid: self.grid,
            values,
            time: self.time,
        })
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn pointwise_min(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, f64::min)
    }

    pub fn pointwise_max(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, f64::max)
    }

    /// Bilinear interpolation of the four nodes surrounding `p`; exact at nodes.
    pub fn sample(&self, p: Point) -> Result<f64> {
        if !(p.x.is_finite() && p.y.is_finite()) || !self.grid.contains(p) {
            return Err(Error::OutOfDomain { x: p.x, y: p.y });
        }
        Ok(self.sample_unchecked(p))
    }

    pub(crate) fn sample_unchecked(&self, p: Point) -> f64 {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let last = (n - 1) as f64;
        let c = self.grid.center_index() as f64;
        let snap = |g: f64| {
            let r = g.round();
            if (g - r).abs() < 1e-9 {
                r
            } else {
                g
            }
        };
        let gx = snap(p.x / h + c).clamp(0.0, last);
        let gy = snap(p.y / h + c).clamp(0.0, last);
        let i0 = (gx.floor() as usize).min(n - 2);
        let j0 = (gy.floor() as usize).min(n - 2);
        let tx = gx - i0 as f64;
        let ty = gy - j0 as f64;
        let v00 = self.at(i0, j0);
        let v10 = self.at(i0 + 1, j0);
        let v01 = self.at(i0, j0 + 1);
        let v11 = self.at(i0 + 1, j0 + 1);
        // Weights that vanish exactly keep node values exact.
        let mut acc = 0.0;
        for (w, v) in [
            ((1.0 - tx) * (1.0 - ty), v00),
            (tx * (1.0 - ty), v10),
            ((1.0 - tx) * ty, v01),
            (tx * ty, v11),
        ] {
            if w != 0.0 {
                acc += w * v;
            }
        }
        acc
    }

    /// Samples `u(t, center + rho e)` for `rho = 0, step, 2 step, ...` up to the domain edge.
    pub fn ray_profile_from(&self, center: Point, direction: Point, step: f64) -> Result<Vec<(f64, f64)>> {
        if !(step.is_finite() && step > 0.0) {
            return contract(format!("ray step must be positive, got {step}"));
        }
        if (direction.norm() - 1.0).abs() > 1e-12 {
            return contract(format!(
                "ray direction must have unit norm, got |e| = {}",
                direction.norm()
            ));
        }
        if !self.grid.contains(center) {
            return Err(Error::OutOfDomain {
                x: center.x,
                y: center.y,
            });
        }
        let rho_max = ray_exit_distance(&self.grid, center, direction);
        let count = (rho_max / step * (1.0 + 1e-12)).floor() as usize;
        Ok((0..=count)
            .map(|k| {
                let rho = k as f64 * step;
                (rho, self.sample_unchecked(center + direction * rho))
            })
            .collect())
    }

    /// Ray profile from the origin.
    pub fn ray_profile(&self, direction: Point, step: f64) -> Result<Vec<(f64, f64)>> {
        self.ray_profile_from(Point::ORIGIN, direction, step)
    }
}

/// Distance along `direction` from `from` to the edge of the square.
pub(crate) fn ray_exit_distance(grid: &GridSpec, from: Point, direction: Point) -> f64 {
    let l = grid.half_width();
    let along = |p: f64, d: f64| {
        if d > 0.0 {
            (l - p) / d
        } else if d < 0.0 {
            (-l - p) / d
        } else {
            f64::INFINITY
        }
    };
    along(from.x, direction.x).min(along(from.y, direction.y)).max(0.0)
}

/// Radial shape of a single bump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `height * exp(1 - 1 / (1 - s^2))` for `s = |x - c| / r < 1`.
    SmoothBump,
    /// Equal to `height` for `s <= 1/2`, then a C-infinity transition down to 0 at `s = 1`.
    MollifiedIndicator,
}

/// Plateau radius of the mollified indicator, as a fraction of the bump radius.
pub const INDICATOR_PLATEAU: f64 = 0.5;

fn smooth_step(tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    if tau >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / tau).exp();
    let b = (-1.0 / (1.0 - tau)).exp();
    a / (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Point,
    pub radius: f64,
    pub height: f64,
    #[serde(default = "default_profile")]
    pub profile: Profile,
}

fn default_profile() -> Profile {
    Profile::SmoothBump
}

impl Bump {
    pub fn smooth(center: Point, radius: f64, height: f64) -> Self {
        Self {
            center,
            radius,
            height,
            profile: Profile::SmoothBump,
        }
    }

    pub fn indicator(center: Point, radius: f64, height: f64) -> Self {
        Self {
            center,
            radius,
            height,
            profile: Profile::MollifiedIndicator,
        }
    }

    pub fn value(&self, x: Point) -> f64 {
        let s2 = (x - self.center).norm_sq() / (self.radius * self.radius);
        if s2 >= 1.0 {
            return 0.0;
        }
        match self.profile {
            Profile::SmoothBump => self.height * (1.0 - 1.0 / (1.0 - s2)).exp(),
            Profile::MollifiedIndicator => {
                let s = s2.sqrt();
                self.height * smooth_step((1.0 - s) / (1.0 - INDICATOR_PLATEAU))
            }
        }
    }
}

/// Initial datum: a finite sum of compactly supported bumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatumSpec {
    pub bumps: Vec<Bump>,
}

impl DatumSpec {
    pub fn new(bumps: Vec<Bump>) -> Self {
        Self { bumps }
    }

    pub fn single(bump: Bump) -> Self {
        Self { bumps: vec![bump] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bumps.is_empty() {
            return contract("datum has no bumps");
        }
        for (k, b) in self.bumps.iter().enumerate() {
            if !(b.radius.is_finite() && b.radius > 0.0) {
                return contract(format!("bump {k}: radius must be positive"));
            }
            if !(b.height.is_finite() && b.height >= 0.0) {
                return contract(format!("bump {k}: height must be finite and nonnegative"));
            }
            if !(b.center.x.is_finite() && b.center.y.is_finite()) {
                return contract(format!("bump {k}: center must be finite"));
            }
        }
        Ok(())
    }

    pub fn value(&self, x: Point) -> f64 {
        self.bumps.iter().map(|b| b.value(x)).sum()
    }

    pub fn max_height(&self) -> f64 {
        self.bumps.iter().map(|b| b.height).fold(0.0, f64::max)
    }

    /// Smallest radius of an origin-centred ball containing every bump support.
    pub fn support_radius(&self) -> f64 {
        self.support_radius_about(Point::ORIGIN)
    }

    pub fn support_radius_about(&self, center: Point) -> f64 {
        self.bumps
            .iter()
            .map(|b| b.center.distance(center) + b.radius)
            .fold(0.0, f64::max)
    }

    /// Support radius inflated by one cell, used as `delta` in the annulus bound.
    pub fn delta_bound(&self, spacing: f64) -> f64 {
        self.support_radius() + spacing
    }

    pub fn translated(&self, v: Point) -> DatumSpec {
        DatumSpec {
            bumps: self
                .bumps
                .iter()
                .map(|b| Bump {
                    center: b.center + v,
                    ..*b
                })
                .collect(),
        }
    }

    pub fn union(&self, other: &DatumSpec) -> DatumSpec {
        let mut bumps = self.bumps.clone();
        bumps.extend_from_slice(&other.bumps);
        DatumSpec { bumps }
    }
}

/// Samples the datum on the grid at `t = 0`.
pub fn make_field(grid: GridSpec, datum: &DatumSpec) -> Result<ScalarField> {
    datum.validate()?;
    let l = grid.half_width();
    for (k, b) in datum.bumps.iter().enumerate() {
        if b.center.x.abs() + b.radius >= l || b.center.y.abs() + b.radius >= l {
            return Err(Error::DomainTooSmall(format!(
                "support of bump {k} (center ({}, {}), radius {}) is not strictly inside [-{l}, {l}]^2",
                b.center.x, b.center.y, b.radius
            )));
        }
    }
    Ok(ScalarField::from_fn(grid, 0.0, |x| datum.value(x)))
}
