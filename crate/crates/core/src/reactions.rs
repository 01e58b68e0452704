//! Reaction terms `f(t, z)` and sampling-based checks of the structural
//! hypotheses the front experiments rely on: KPP monotonicity of `f/z`,
//! subadditivity (`f(a + b) <= f(a) + f(b)`) and domination by a
//! time-independent lower bound `g`.
//!
//! The checks are universally quantified statements tested on finite sample
//! grids, so `Pass` means "no counterexample found on the grid".

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

/// Absolute slack used by every hypothesis check.
pub const CHECK_TOLERANCE: f64 = 1e-12;

/// Time coefficient `zeta(t) = a + b sin(omega t)` with `a > b >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Constant(f64),
    Periodic { a: f64, b: f64, omega: f64 },
}

impl Coefficient {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Periodic { a, b, omega } => a + b * (omega * t).sin(),
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Periodic { a, b, omega } if omega != 0.0 => a + b,
            Coefficient::Periodic { a, .. } => a,
        }
    }

    pub fn period(&self) -> Option<f64> {
        match *self {
            Coefficient::Periodic { b, omega, .. } if b != 0.0 && omega != 0.0 => {
                Some(2.0 * PI / omega.abs())
            }
            _ => None,
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        match *self {
            Coefficient::Constant(c) if c.is_finite() && c >= 0.0 => Ok(()),
            Coefficient::Constant(c) => contract(format!("{what}: coefficient {c} must be finite and >= 0")),
            Coefficient::Periodic { a, b, omega } => {
                if !(a.is_finite() && b.is_finite() && omega.is_finite()) {
                    return contract(format!("{what}: periodic coefficient must be finite"));
                }
                if !(a > b && b >= 0.0) {
                    return contract(format!("{what}: periodic coefficient needs a > b >= 0"));
                }
                Ok(())
            }
        }
    }
}

/// The nonlinearity of `u_t = Δu + f(t, u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum ReactionTerm {
    /// `f = zeta(t) z`; unbounded growth, `Z = +inf`.
    Linear { zeta: Coefficient },
    /// `f = rate z (1 - z)`.
    #[serde(rename = "FisherKPP")]
    FisherKpp { rate: f64 },
    /// `f = zeta(t) z (1 - z)`.
    #[serde(rename = "TimePeriodicKPP")]
    TimePeriodicKpp { zeta: Coefficient },
    /// `f = 0` on `[0, ignition]`, `(z - ignition)(1 - z)` on `(ignition, 1]`, 0 above 1.
    Combustion { ignition: f64 },
    /// `f = z (1 - z)(z - a)`; negative control only.
    Bistable { a: f64 },
}

/// A reaction term with its time dependence resolved, for tight inner loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrozenReaction {
    Linear(f64),
    Logistic(f64),
    Combustion(f64),
    Bistable(f64),
}

impl FrozenReaction {
    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            FrozenReaction::Linear(k) => k * z,
            FrozenReaction::Logistic(k) => k * z * (1.0 - z),
            FrozenReaction::Combustion(th) => {
                if z > th && z <= 1.0 {
                    (z - th) * (1.0 - z)
                } else {
                    0.0
                }
            }
            FrozenReaction::Bistable(a) => z * (1.0 - z) * (z - a),
        }
    }
}

impl ReactionTerm {
    pub fn fisher_kpp(rate: f64) -> Self {
        ReactionTerm::FisherKpp { rate }
    }

    pub fn linear(zeta: f64) -> Self {
        ReactionTerm::Linear {
            zeta: Coefficient::Constant(zeta),
        }
    }

    pub fn combustion(ignition: f64) -> Self {
        ReactionTerm::Combustion { ignition }
    }

    pub fn bistable(a: f64) -> Self {
        ReactionTerm::Bistable { a }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReactionTerm::Linear { .. } => "Linear",
            ReactionTerm::FisherKpp { .. } => "FisherKPP",
            ReactionTerm::TimePeriodicKpp { .. } => "TimePeriodicKPP",
            ReactionTerm::Combustion { .. } => "Combustion",
            ReactionTerm::Bistable { .. } => "Bistable",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ReactionTerm::Linear { zeta } => zeta.validate("Linear.zeta"),
            ReactionTerm::TimePeriodicKpp { zeta } => zeta.validate("TimePeriodicKPP.zeta"),
            ReactionTerm::FisherKpp { rate } if rate.is_finite() && rate > 0.0 => Ok(()),
            ReactionTerm::FisherKpp { rate } => contract(format!("FisherKPP.rate must be > 0, got {rate}")),
            ReactionTerm::Combustion { ignition } if ignition > 0.0 && ignition < 1.0 => Ok(()),
            ReactionTerm::Combustion { ignition } => {
                contract(format!("Combustion.ignition must lie in (0, 1), got {ignition}"))
            }
            ReactionTerm::Bistable { a } if a > 0.0 && a < 0.5 => Ok(()),
            ReactionTerm::Bistable { a } => contract(format!("Bistable.a must lie in (0, 1/2), got {a}")),
        }
    }

    pub fn at(&self, t: f64) -> FrozenReaction {
        match *self {
            ReactionTerm::Linear { zeta } => FrozenReaction::Linear(zeta.at(t)),
            ReactionTerm::FisherKpp { rate } => FrozenReaction::Logistic(rate),
            ReactionTerm::TimePeriodicKpp { zeta } => FrozenReaction::Logistic(zeta.at(t)),
            ReactionTerm::Combustion { ignition } => FrozenReaction::Combustion(ignition),
            ReactionTerm::Bistable { a } => FrozenReaction::Bistable(a),
        }
    }

    pub fn eval(&self, t: f64, z: f64) -> f64 {
        self.at(t).eval(z)
    }

    /// Saturation level `Z` (`+inf` for the linear equation).
    pub fn saturation(&self) -> f64 {
        match self {
            ReactionTerm::Linear { .. } => f64::INFINITY,
            _ => 1.0,
        }
    }

    /// `theta_0` of the lower-bound hypothesis when this term plays `g`: 0 for monostable terms.
    pub fn ignition_threshold(&self) -> f64 {
        match *self {
            ReactionTerm::Combustion { ignition } => ignition,
            ReactionTerm::Bistable { a } => a,
            _ => 0.0,
        }
    }

    pub fn period(&self) -> Option<f64> {
        match self {
            ReactionTerm::Linear { zeta } | ReactionTerm::TimePeriodicKpp { zeta } => zeta.period(),
            _ => None,
        }
    }

    pub fn is_time_independent(&self) -> bool {
        self.period().is_none()
    }

    /// `sup_{t, z > 0} f(t, z) / z`, in closed form for every variant.
    pub fn sup_slope(&self) -> f64 {
        match *self {
            ReactionTerm::Linear { zeta } | ReactionTerm::TimePeriodicKpp { zeta } => zeta.sup(),
            ReactionTerm::FisherKpp { rate } => rate,
            // (z - th)(1 - z)/z peaks at z = sqrt(th).
            ReactionTerm::Combustion { ignition } => (1.0 - ignition.sqrt()).powi(2),
            // (1 - z)(z - a) peaks at z = (1 + a)/2.
            ReactionTerm::Bistable { a } => ((1.0 - a) / 2.0).powi(2),
        }
    }

    /// Minimal linear spreading speed `2 sqrt(sup f/z)` of the dominating linear equation.
    pub fn linear_speed(&self) -> f64 {
        2.0 * self.sup_slope().sqrt()
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| {
            if k + 1 == count {
                hi
            } else {
                (a + (b - a) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Default `z` grid: 10^4 log-spaced points in `(1e-6, Z]`, with `Z` replaced by 10 when infinite.
pub fn default_z_samples(f: &ReactionTerm) -> Vec<f64> {
    let top = if f.saturation().is_finite() { f.saturation() } else { 10.0 };
    log_spaced(1e-6, top, 10_000)
}

/// Default `t` grid: 10^3 points over one period, or over `[0, 10]` for autonomous terms.
pub fn default_t_samples(f: &ReactionTerm) -> Vec<f64> {
    let span = f.period().unwrap_or(10.0);
    (0..1000).map(|k| span * k as f64 / 999.0).collect()
}

/// Default `(alpha, beta)` pairs for the subadditivity check: all `alpha <= beta` on a 60-point grid.
pub fn default_pairs(f: &ReactionTerm) -> Vec<(f64, f64)> {
    let top = if f.saturation().is_finite() { f.saturation() } else { 10.0 };
    let pts: Vec<f64> = (1..=60).map(|k| top * k as f64 / 60.0).collect();
    let mut pairs = Vec::new();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i..] {
            pairs.push((a, b));
        }
    }
    pairs
}

/// Counterexample returned by a failed hypothesis check.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotPositive { t: f64, z: f64, value: f64 },
    SlopeIncreases { t: f64, z1: f64, z2: f64, slope1: f64, slope2: f64 },
    Superadditive { t: f64, alpha: f64, beta: f64, lhs: f64, rhs: f64 },
    BelowLowerBound { t: f64, z: f64, f: f64, g: f64 },
    SignPattern { z: f64, g: f64, threshold: f64 },
    NonPositiveIntegral { integral: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NotPositive { t, z, value } => {
                write!(out, "f(t={t}, z={z}) = {value:e} is not positive")
            }
            Violation::SlopeIncreases { t, z1, z2, slope1, slope2 } => write!(
                out,
                "f/z increases at t={t}: f(z1)/z1 = {slope1:e} < f(z2)/z2 = {slope2:e} for z1={z1} < z2={z2}"
            ),
            Violation::Superadditive { t, alpha, beta, lhs, rhs } => write!(
                out,
                "f(t={t}, {alpha}+{beta}) = {lhs:e} > f(alpha)+f(beta) = {rhs:e}"
            ),
            Violation::BelowLowerBound { t, z, f, g } => {
                write!(out, "f(t={t}, z={z}) = {f:e} < g(z) = {g:e}")
            }
            Violation::SignPattern { z, g, threshold } => {
                write!(out, "g({z}) = {g:e} has the wrong sign relative to threshold {threshold}")
            }
            Violation::NonPositiveIntegral { integral } => {
                write!(out, "integral of g over [0, Z] is {integral:e} <= 0")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HypothesisVerdict {
    Pass,
    Fail(Violation),
}

impl HypothesisVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, HypothesisVerdict::Pass)
    }
}

impl fmt::Display for HypothesisVerdict {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypothesisVerdict::Pass => write!(out, "pass"),
            HypothesisVerdict::Fail(v) => write!(out, "fail: {v}"),
        }
    }
}

fn check_samples(name: &str, s: &[f64], positive: bool) -> Result<()> {
    if s.is_empty() {
        return contract(format!("{name} sample grid is empty"));
    }
    if s.iter().any(|v| !v.is_finite() || (positive && *v <= 0.0)) {
        return contract(format!("{name} samples must be finite{}", if positive { " and > 0" } else { "" }));
    }
    if s.windows(2).any(|w| w[1] < w[0]) {
        return contract(format!("{name} samples must be sorted"));
    }
    Ok(())
}

/// KPP hypothesis: positivity of `inf_t f(t, z)` on `(0, Z)` and `f/z` nonincreasing.
pub fn check_kpp(f: &ReactionTerm, z_samples: &[f64], t_samples: &[f64]) -> Result<HypothesisVerdict> {
    check_samples("z", z_samples, true)?;
    check_samples("t", t_samples, false)?;
    let z_top = f.saturation();

    let mut min_over_t = vec![(f64::INFINITY, 0.0); z_samples.len()];
    for &t in t_samples {
        let fr = f.at(t);
        for (slot, &z) in min_over_t.iter_mut().zip(z_samples) {
            let v = fr.eval(z);
            if v < slot.0 {
                *slot = (v, t);
            }
        }
    }
    for (&z, &(v, t)) in z_samples.iter().zip(&min_over_t) {
        if z < z_top && v <= 0.0 {
            return Ok(HypothesisVerdict::Fail(Violation::NotPositive { t, z, value: v }));
        }
    }

    // f(z1)/z1 >= f(z2)/z2 - tol for all z1 < z2 is a running-minimum condition.
    for &t in t_samples {
        let fr = f.at(t);
        let mut running: Option<(f64, f64)> = None;
        for &z in z_samples {
            let slope = fr.eval(z) / z;
            if let Some((min_slope, z_at)) = running {
                if min_slope < slope - CHECK_TOLERANCE {
                    return Ok(HypothesisVerdict::Fail(Violation::SlopeIncreases {
                        t,
                        z1: z_at,
                        z2: z,
                        slope1: min_slope,
                        slope2: slope,
                    }));
                }
                if slope < min_slope {
                    running = Some((slope, z));
                }
            } else {
                running = Some((slope, z));
            }
        }
    }
    Ok(HypothesisVerdict::Pass)
}

/// Subadditivity `f(t, a + b) <= f(t, a) + f(t, b)` for `0 < a <= b`.
pub fn check_superposition(
    f: &ReactionTerm,
    pairs: &[(f64, f64)],
    t_samples: &[f64],
) -> Result<HypothesisVerdict> {
    check_samples("t", t_samples, false)?;
    if pairs.is_empty() {
        return contract("no (alpha, beta) pairs given");
    }
    if let Some(&(a, b)) = pairs.iter().find(|(a, b)| !(*a > 0.0 && a <= b && b.is_finite())) {
        return contract(format!("malformed pair ({a}, {b}): need 0 < alpha <= beta"));
    }
    for &t in t_samples {
        let fr = f.at(t);
        for &(alpha, beta) in pairs {
            let lhs = fr.eval(alpha + beta);
            let rhs = fr.eval(alpha) + fr.eval(beta);
            if lhs > rhs + CHECK_TOLERANCE {
                return Ok(HypothesisVerdict::Fail(Violation::Superadditive {
                    t,
                    alpha,
                    beta,
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(HypothesisVerdict::Pass)
}

/// Lower-bound hypothesis: `f(t, z) >= g(z)`, `g <= 0` below its threshold,
/// `g > 0` between threshold and `Z`, and `int_0^Z g > 0`.
pub fn check_lower_bound(
    f: &ReactionTerm,
    g: &ReactionTerm,
    z_samples: &[f64],
    t_samples: &[f64],
) -> Result<HypothesisVerdict> {
    check_samples("z", z_samples, true)?;
    check_samples("t", t_samples, false)?;
    if !g.is_time_independent() {
        return contract(format!("lower bound g ({}) must be time-independent", g.name()));
    }
    let gz = g.at(0.0);
    for &t in t_samples {
        let fr = f.at(t);
        for &z in z_samples {
            let (fv, gv) = (fr.eval(z), gz.eval(z));
            if fv < gv - CHECK_TOLERANCE {
                return Ok(HypothesisVerdict::Fail(Violation::BelowLowerBound { t, z, f: fv, g: gv }));
            }
        }
    }

    let threshold = g.ignition_threshold();
    let z_top = g.saturation();
    for &z in z_samples {
        let gv = gz.eval(z);
        let wrong = if z < threshold {
            gv > 0.0
        } else if z > threshold && z < z_top {
            gv <= 0.0
        } else {
            false
        };
        if wrong {
            return Ok(HypothesisVerdict::Fail(Violation::SignPattern { z, g: gv, threshold }));
        }
    }

    let upper = if z_top.is_finite() { z_top } else { 10.0 };
    let intervals = 10_000;
    let dz = upper / intervals as f64;
    let integral: f64 = (0..intervals)
        .map(|k| 0.5 * dz * (gz.eval(k as f64 * dz) + gz.eval((k + 1) as f64 * dz)))
        .sum();
    if integral <= 0.0 {
        return Ok(HypothesisVerdict::Fail(Violation::NonPositiveIntegral { integral }));
    }
    Ok(HypothesisVerdict::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kpp(f: &ReactionTerm) -> HypothesisVerdict {
        check_kpp(f, &default_z_samples(f), &default_t_samples(f)).unwrap()
    }

    fn dense_sup_slope(f: &ReactionTerm) -> f64 {
        let ts = default_t_samples(f);
        let mut best = f64::NEG_INFINITY;
        for &t in &ts {
            for k in 1..=100_000 {
                let z = k as f64 * 1e-5;
                best = best.max(f.eval(t, z) / z);
            }
        }
        best
    }

    #[test]
    fn eval_examples() {
        let f = ReactionTerm::fisher_kpp(1.0);
        assert_eq!(f.eval(0.0, 0.0), 0.0);
        assert_eq!(f.eval(3.0, 0.5), 0.25);
        assert_eq!(ReactionTerm::linear(1.0).eval(0.0, 3.0), 3.0);
    }

    #[test]
    fn every_variant_vanishes_at_zero() {
        let variants = [
            ReactionTerm::linear(1.0),
            ReactionTerm::Linear {
                zeta: Coefficient::Periodic { a: 1.0, b: 0.5, omega: 1.0 },
            },
            ReactionTerm::fisher_kpp(2.0),
            ReactionTerm::TimePeriodicKpp {
                zeta: Coefficient::Periodic { a: 1.0, b: 0.5, omega: 3.0 },
            },
            ReactionTerm::combustion(0.25),
            ReactionTerm::bistable(0.25),
        ];
        for f in variants {
            for t in default_t_samples(&f) {
                assert_eq!(f.eval(t, 0.0), 0.0, "{}", f.name());
            }
        }
    }

    #[test]
    fn sup_slope_matches_dense_sampling() {
        assert_eq!(ReactionTerm::linear(1.0).sup_slope(), 1.0);
        assert_eq!(ReactionTerm::linear(0.37).sup_slope(), 0.37);
        let kpp = ReactionTerm::fisher_kpp(1.0);
        assert_eq!(kpp.sup_slope(), 1.0);
        assert!((dense_sup_slope(&kpp) - 1.0).abs() < 1e-4);
        let periodic = ReactionTerm::TimePeriodicKpp {
            zeta: Coefficient::Periodic { a: 1.0, b: 0.5, omega: 1.0 },
        };
        assert_eq!(periodic.sup_slope(), 1.5);
        assert!((dense_sup_slope(&periodic) - 1.5).abs() < 1e-3);
        let comb = ReactionTerm::combustion(0.25);
        assert!((dense_sup_slope(&comb) - comb.sup_slope()).abs() < 1e-6);
        assert!((comb.sup_slope() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn kpp_check() {
        assert!(kpp(&ReactionTerm::fisher_kpp(1.0)).passed());
        assert!(kpp(&ReactionTerm::linear(1.0)).passed());
        let wobbly = ReactionTerm::Linear {
            zeta: Coefficient::Periodic { a: 1.0, b: 0.5, omega: 1.0 },
        };
        assert!(kpp(&wobbly).passed());
        match kpp(&ReactionTerm::bistable(0.25)) {
            HypothesisVerdict::Fail(Violation::NotPositive { z, value, .. }) => {
                assert!(z < 0.25 && value < 0.0);
            }
            other => panic!("expected positivity witness, got {other:?}"),
        }
        // f(0.1) for the bistable control, evaluated by hand.
        let v = ReactionTerm::bistable(0.25).eval(0.0, 0.1);
        assert!((v - 0.1 * 0.9 * -0.15).abs() < 1e-15);
        assert!(!kpp(&ReactionTerm::combustion(0.25)).passed());
    }

    #[test]
    fn kpp_rejects_bad_grids() {
        let f = ReactionTerm::fisher_kpp(1.0);
        assert!(check_kpp(&f, &[], &[0.0]).is_err());
        assert!(check_kpp(&f, &[0.5], &[]).is_err());
        assert!(check_kpp(&f, &[0.5, 0.1], &[0.0]).is_err());
    }

    #[test]
    fn superposition_examples() {
        let ts = [0.0];
        let kpp = ReactionTerm::fisher_kpp(1.0);
        assert!(check_superposition(&kpp, &[(0.5, 0.5)], &ts).unwrap().passed());
        let lin = ReactionTerm::linear(1.0);
        assert!(check_superposition(&lin, &default_pairs(&lin), &ts).unwrap().passed());
        let bi = ReactionTerm::bistable(0.25);
        assert!(check_superposition(&bi, &[(0.5, 0.5)], &ts).unwrap().passed());
        match check_superposition(&bi, &[(0.3, 0.3)], &ts).unwrap() {
            HypothesisVerdict::Fail(Violation::Superadditive { lhs, rhs, .. }) => {
                assert!((lhs - 0.6 * 0.4 * 0.35).abs() < 1e-15);
                assert!((rhs - 2.0 * 0.3 * 0.7 * 0.05).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(check_superposition(&kpp, &[(0.5, 0.2)], &ts).is_err());
        assert!(check_superposition(&kpp, &[(0.0, 0.2)], &ts).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let kpp = ReactionTerm::fisher_kpp(1.0);
        let comb = ReactionTerm::combustion(0.25);
        let zs = default_z_samples(&kpp);
        let ts = default_t_samples(&kpp);
        assert!(check_lower_bound(&kpp, &comb, &zs, &ts).unwrap().passed());
        assert!(check_lower_bound(&comb, &comb, &zs, &ts).unwrap().passed());
        let bi = ReactionTerm::bistable(0.25);
        assert!(matches!(
            check_lower_bound(&bi, &kpp, &zs, &ts).unwrap(),
            HypothesisVerdict::Fail(Violation::BelowLowerBound { .. })
        ));
        let periodic = ReactionTerm::TimePeriodicKpp {
            zeta: Coefficient::Periodic { a: 1.0, b: 0.5, omega: 1.0 },
        };
        assert!(check_lower_bound(&kpp, &periodic, &zs, &ts).is_err());
    }

    #[test]
    fn serde_variant_names() {
        let f: ReactionTerm = serde_json::from_str(r#"{"variant":"FisherKPP","rate":1.0}"#).unwrap();
        assert_eq!(f, ReactionTerm::fisher_kpp(1.0));
        let g: ReactionTerm =
            serde_json::from_str(r#"{"variant":"Linear","zeta":{"a":1.0,"b":0.5,"omega":1.0}}"#).unwrap();
        assert_eq!(g.sup_slope(), 1.5);
        let back: ReactionTerm = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
