//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.

use std::f64::consts::SQRT_2;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use frontlab::cli::{checks_from_csv, parse_config, rows_from_csv, RunConfig};
use frontlab::experiments::{derive_verdicts, run_scenario, Outcome, Report, Verdict};
use frontlab::fields::{make_field, Bump, DatumSpec, GridSpec, Point, ScalarField};
use frontlab::geometry::{enclosing_ball, inscribed_ball, LevelSetMask};
use frontlab::reactions::{
    check_kpp, check_lower_bound, check_superposition, default_pairs, default_t_samples, default_z_samples,
    ReactionTerm,
};
use frontlab::solver::{advance_radial, RadialProfile, Stepper};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> RunConfig {
    let text = std::fs::read_to_string(configs().join(name)).unwrap();
    parse_config(&text).unwrap()
}

fn run(name: &str) -> Report {
    let c = config(name);
    run_scenario(&c.scenario, &c.setting(), &mut |_: &str, _: usize, _: &ScalarField| Ok(()))
}

fn say(line: &str) {
    // Written past the test harness capture so the lines show up in plain `cargo test` output.
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

struct Outcomes(Vec<(u32, bool, String)>);

impl Outcomes {
    fn record(&mut self, n: u32, ok: bool, detail: String) {
        say(&format!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" }));
        self.0.push((n, ok, detail));
    }
}

fn verdict<'a>(r: &'a Report, name: &str) -> &'a Verdict {
    r.verdict(name).unwrap_or_else(|| panic!("missing verdict {name}"))
}

fn passed(v: &Verdict) -> bool {
    v.outcome() == Outcome::Pass
}

fn describe(v: &Verdict) -> String {
    format!(
        "{}={} ({:?} vs {:?}±{:.3})",
        v.name,
        v.outcome().label(),
        v.measured,
        v.bound,
        v.tolerance
    )
}

fn positivity_ok(r: &Report) -> bool {
    passed(verdict(r, "positivity"))
}

// ---------- criterion 1 ----------

fn brute_inscribed(mask: &LevelSetMask) -> (f64, usize, usize) {
    let g = mask.grid();
    let n = g.n();
    let outside: Vec<(i64, i64)> = (0..n * n)
        .filter(|&k| !mask.inside()[k])
        .map(|k| ((k / n) as i64, (k % n) as i64))
        .collect();
    let mut best = (-1.0, 0, 0);
    for i in 0..n {
        for j in 0..n {
            if !mask.contains(i, j) {
                continue;
            }
            let e = g.cells_to_edge(i, j) as i64;
            let mut d2 = e * e;
            for &(a, b) in &outside {
                let (di, dj) = (a - i as i64, b - j as i64);
                d2 = d2.min(di * di + dj * dj);
            }
            if d2 as f64 > best.0 {
                best = (d2 as f64, i, j);
            }
        }
    }
    best
}

type P = (f64, f64);

fn circle2(a: P, b: P) -> (P, f64) {
    let c = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    (c, (a.0 - c.0).hypot(a.1 - c.1))
}

fn circle3(a: P, b: P, c: P) -> Option<(P, f64)> {
    let d = 2.0 * (a.0 * (b.1 - c.1) + b.0 * (c.1 - a.1) + c.0 * (a.1 - b.1));
    if d.abs() < 1e-12 {
        return None;
    }
    let sq = |p: P| p.0 * p.0 + p.1 * p.1;
    let ux = (sq(a) * (b.1 - c.1) + sq(b) * (c.1 - a.1) + sq(c) * (a.1 - b.1)) / d;
    let uy = (sq(a) * (c.0 - b.0) + sq(b) * (a.0 - c.0) + sq(c) * (b.0 - a.0)) / d;
    Some(((ux, uy), (a.0 - ux).hypot(a.1 - uy)))
}

/// Smallest circle over all pairs and triples that covers every point.
fn brute_mec(points: &[P]) -> f64 {
    if points.len() == 1 {
        return 0.0;
    }
    let covers = |c: P, r: f64| points.iter().all(|p| (p.0 - c.0).hypot(p.1 - c.1) <= r + 1e-9);
    let mut best = f64::INFINITY;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let (c, r) = circle2(points[a], points[b]);
            if r < best && covers(c, r) {
                best = r;
            }
            for k in b + 1..points.len() {
                if let Some((c, r)) = circle3(points[a], points[b], points[k]) {
                    if r < best && covers(c, r) {
                        best = r;
                    }
                }
            }
        }
    }
    best
}

/// Convex hull vertices by the monotone chain; the minimal circle is determined by them.
fn hull(mut pts: Vec<P>) -> Vec<P> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: P, a: P, b: P| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<P> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn random_mask(rng: &mut ChaCha8Rng, kind: usize) -> LevelSetMask {
    let n = 2 * rng.gen_range(1..=24) + 1;
    let g = GridSpec::new(1.0, n).unwrap();
    let inside: Vec<bool> = match kind % 4 {
        0 => {
            let k = rng.gen_range(1..=50usize.min(n * n));
            let mut v = vec![false; n * n];
            for _ in 0..k {
                v[rng.gen_range(0..n * n)] = true;
            }
            v
        }
        1 => {
            let p: f64 = rng.gen_range(0.05..0.95);
            (0..n * n).map(|_| rng.gen_bool(p)).collect()
        }
        2 => {
            let discs: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..4))
                .map(|_| (rng.gen_range(0.0..n as f64), rng.gen_range(0.0..n as f64), rng.gen_range(1.0..n as f64 / 2.0)))
                .collect();
            (0..n * n)
                .map(|k| {
                    let (i, j) = ((k / n) as f64, (k % n) as f64);
                    discs.iter().any(|&(x, y, r)| (i - x).hypot(j - y) <= r)
                })
                .collect()
        }
        _ => {
            let p: f64 = rng.gen_range(0.001..0.05);
            (0..n * n).map(|_| rng.gen_bool(p)).collect()
        }
    };
    LevelSetMask::from_bools(g, inside, 0.5, 0.0).unwrap()
}

fn criterion_1() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut tested = 0;
    let mut worst_enclosing = 0.0f64;
    let mut failures = Vec::new();
    let mut k = 0;
    while tested < 200 {
        let mask = random_mask(&mut rng, k);
        k += 1;
        if mask.is_empty() {
            continue;
        }
        tested += 1;
        let g = *mask.grid();
        let h = g.spacing();
        let (d2, i, j) = brute_inscribed(&mask);
        let b = inscribed_ball(&mask).unwrap();
        if b.radius != d2.sqrt() * h || b.center != g.node(i, j) {
            failures.push(format!("inscribed mismatch on mask {k}"));
        }
        let n = g.n();
        let pts: Vec<P> = (0..n * n)
            .filter(|&q| mask.inside()[q])
            .map(|q| ((q / n) as f64, (q % n) as f64))
            .collect();
        let candidates = if pts.len() <= 60 { pts } else { hull(pts) };
        let exact = brute_mec(&candidates) * h + h / SQRT_2;
        let e = enclosing_ball(&mask, k as u64).unwrap();
        let err = (e.radius - exact).abs();
        worst_enclosing = worst_enclosing.max(err);
        if err > 1e-9 {
            failures.push(format!("enclosing mismatch {err:e} on mask {k}"));
        }
    }
    (
        failures.is_empty(),
        format!("200 masks; max enclosing error {worst_enclosing:e}; {:?}", failures.first()),
    )
}

// ---------- criteria 2 and 10 ----------

fn run_binary(cfg: &Path, out: &Path, threads: usize) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_frontlab"))
        .args(["run", "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(["--threads", &threads.to_string()])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    status.code().unwrap_or(-1)
}

fn criteria_2_and_10(out: &mut Outcomes) -> bool {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = configs().join("symmetrization.json");
    let (a, b) = (tmp.path().join("t1"), tmp.path().join("t8"));
    let code1 = run_binary(&cfg_path, &a, 1);
    let code8 = run_binary(&cfg_path, &b, 8);
    let csv1 = std::fs::read(a.join("report.csv")).unwrap();
    let csv8 = std::fs::read(b.join("report.csv")).unwrap();

    // Criterion 2 from the emitted CSV files alone.
    let c = config("symmetrization.json");
    let rows = rows_from_csv(std::str::from_utf8(&csv1).unwrap()).unwrap();
    let checks = checks_from_csv(&std::fs::read_to_string(a.join("checks.csv")).unwrap()).unwrap();
    let (verdicts, _) = derive_verdicts(&c.scenario, &c.setting(), &rows, &checks);
    let mut ok = code1 == 0;
    let mut max_gap: f64 = 0.0;
    let mut max_bound: f64 = 0.0;
    for theta in [0.25, 0.5, 0.75] {
        for name in ["gap", "annulus", "star_shaped", "radial_monotone"] {
            let v = verdicts.iter().find(|v| v.name == format!("{name}[theta={theta}]")).unwrap();
            ok &= passed(v);
            if name == "gap" {
                max_gap = max_gap.max(v.measured.unwrap_or(f64::NAN));
                max_bound = max_bound.max(v.bound.unwrap_or(0.0) + v.tolerance);
            }
        }
    }
    ok &= verdicts.iter().any(|v| v.name == "positivity" && passed(v));
    out.record(
        2,
        ok,
        format!("exit {code1}; post-transient max gap {max_gap:.4} <= bound {max_bound:.4} (delta = 2); star-shaped and radially monotone at all thetas"),
    );
    let same = csv1 == csv8 && code8 == code1;
    out.record(10, same, format!("report.csv with --threads 1 and 8: {} bytes, identical = {same}", csv1.len()));
    ok
}

// ---------- criterion 3 ----------

fn criterion_3() -> (bool, String) {
    let lin = run("speed_linear.json");
    let kpp = run("speed_kpp.json");
    let ok = passed(verdict(&lin, "speed_range"))
        && passed(verdict(&kpp, "speed_range"))
        && lin.failure.is_none()
        && kpp.failure.is_none()
        && positivity_ok(&lin)
        && positivity_ok(&kpp);
    (
        ok,
        format!(
            "Linear slope {:.4} in [1.85, 2.05]; FisherKPP slope {:.4} in [1.75, 2.0]",
            lin.scalar("slope").unwrap_or(f64::NAN),
            kpp.scalar("slope").unwrap_or(f64::NAN)
        ),
    )
}

// ---------- criteria 4, 5, 6, 7 ----------

fn comparisons_ok(r: &Report, names: &[&str]) -> bool {
    names.iter().all(|n| {
        let v = verdict(r, n);
        passed(v) && v.measured.is_some_and(|m| m <= 1e-9)
    })
}

fn main_runs(out: &mut Outcomes) {
    let anti = run("antisymmetrization.json");
    let ok4 = anti.failure.is_none()
        && positivity_ok(&anti)
        && passed(verdict(&anti, "min_gap"))
        && passed(verdict(&anti, "reference_gap"))
        && passed(verdict(&anti, "sphericality"))
        && !verdict(&anti, "sphericality").expected
        && passed(verdict(&anti, "sweep_slope"))
        && passed(verdict(&anti, "sweep_offset"))
        && passed(verdict(&anti, "re_lower"))
        && passed(verdict(&anti, "ri_upper"));
    out.record(
        4,
        ok4,
        format!(
            "late-window min gap {:.3} >= 10 (xi = 40.05); control {}; sweep slope {:.4} in [0.4, 0.6]; {}",
            anti.scalar("gap_late_min").unwrap_or(f64::NAN),
            describe(verdict(&anti, "reference_gap")),
            anti.scalar("sweep_slope").unwrap_or(f64::NAN),
            describe(verdict(&anti, "sweep_offset")),
        ),
    );

    let two = run("two_solution.json");
    let ok5 = comparisons_ok(&anti, &["comparison_lower", "comparison_upper"])
        && comparisons_ok(
            &two,
            &["minmax_lower_u1", "minmax_lower_u2", "minmax_upper_u1", "minmax_upper_u2"],
        );
    let worst = ["comparison_lower", "comparison_upper"]
        .iter()
        .map(|n| verdict(&anti, n).measured.unwrap_or(f64::NAN))
        .chain(
            ["minmax_lower_u1", "minmax_lower_u2", "minmax_upper_u1", "minmax_upper_u2"]
                .iter()
                .map(|n| verdict(&two, n).measured.unwrap_or(f64::NAN)),
        )
        .fold(f64::NEG_INFINITY, f64::max);
    out.record(5, ok5, format!("6 pointwise comparison chains at every record; worst excess {worst:e} <= 1e-9"));

    let kpp = run("steepness_kpp.json");
    let comb = run("steepness_combustion.json");
    let ok6 = kpp.failure.is_none()
        && comb.failure.is_none()
        && positivity_ok(&kpp)
        && positivity_ok(&comb)
        && passed(verdict(&kpp, "width"))
        && passed(verdict(&comb, "width"))
        && passed(verdict(&comb, "lower_bound"));
    out.record(
        6,
        ok6,
        format!(
            "FisherKPP late-window min width {:.3} <= 5; Combustion(0.25) {:.3} <= 5",
            kpp.scalar("width_late_min").unwrap_or(f64::NAN),
            comb.scalar("width_late_min").unwrap_or(f64::NAN)
        ),
    );

    let ok7 = two.failure.is_none()
        && positivity_ok(&two)
        && ["est1a", "est1b", "est2", "distance"].iter().all(|n| passed(verdict(&two, n)));
    out.record(
        7,
        ok7,
        format!(
            "late-window min |r1 - r2| = {:.3} <= cap 2.5; {}; {}; {}",
            two.scalar("distance_late_min").unwrap_or(f64::NAN),
            describe(verdict(&two, "est1a")),
            describe(verdict(&two, "est1b")),
            describe(verdict(&two, "est2")),
        ),
    );
}

// ---------- criterion 8 ----------

fn radial_discrepancy(h: f64, l: f64, t: f64) -> f64 {
    let grid = GridSpec::with_spacing(l, h).unwrap();
    let datum = DatumSpec::single(Bump::smooth(Point::ORIGIN, 1.5, 1.0));
    let f = ReactionTerm::fisher_kpp(1.0);
    let mut stepper = Stepper::new(make_field(grid, &datum).unwrap(), f, 0.8).unwrap();
    stepper.advance_to(t).unwrap();
    let m = (l / h).round() as usize;
    let radial0 = RadialProfile::from_fn(2, h, m, |r| datum.value(Point::new(r, 0.0))).unwrap();
    let radial = advance_radial(&radial0, &f, 0.8 * h * h / 4.0, t).unwrap();
    let field = stepper.field();
    let n = grid.n();
    (0..n * n)
        .map(|k| {
            let p = grid.node(k / n, k % n);
            (field.values()[k] - radial.value_at(p.norm())).abs()
        })
        .fold(0.0, f64::max)
}

fn criterion_8(positivity: bool) -> (bool, String) {
    let coarse = radial_discrepancy(0.2, 30.0, 10.0);
    let fine = radial_discrepancy(0.1, 30.0, 10.0);

    let grid = GridSpec::new(10.0, 101).unwrap();
    let datum = DatumSpec::single(Bump::smooth(Point::new(0.5, -0.5), 2.0, 1.0));
    let mut heat = Stepper::new(make_field(grid, &datum).unwrap(), ReactionTerm::linear(0.0), 0.8).unwrap();
    let mut masses = vec![heat.field().mass()];
    let mut min_value: f64 = heat.field().min();
    for k in 1..=40 {
        heat.advance_to(0.25 * k as f64).unwrap();
        masses.push(heat.field().mass());
        min_value = min_value.min(heat.field().min());
    }
    // Nonincreasing up to summation rounding, with negligible loss while the heat is far from the edge.
    let mass_down = masses.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let early_loss = (masses[0] - masses[4]) / masses[0];
    let mass_down = mass_down && early_loss < 1e-6 && masses[40] < masses[0];
    let ok = fine <= 0.02 && fine < coarse && mass_down && min_value >= 0.0 && positivity;
    (
        ok,
        format!(
            "radial vs 2D L-inf at t=10: h=0.2 {coarse:.5}, h=0.1 {fine:.5} (<= 0.02); heat mass nonincreasing = {mass_down} (relative loss by t=1: {early_loss:e}); min u >= 0 in every run = {}",
            min_value >= 0.0 && positivity
        ),
    )
}

// ---------- criterion 9 ----------

fn criterion_9() -> (bool, String) {
    let kpp = |f: &ReactionTerm| check_kpp(f, &default_z_samples(f), &default_t_samples(f)).unwrap();
    let sup = |f: &ReactionTerm| check_superposition(f, &default_pairs(f), &default_t_samples(f)).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for f in [ReactionTerm::fisher_kpp(1.0), ReactionTerm::linear(1.0)] {
        let (a, b) = (kpp(&f), sup(&f));
        ok &= a.passed() && b.passed();
        detail.push(format!("{} KPP {a}, superposition {b}", f.name()));
    }
    let bi = ReactionTerm::bistable(0.3);
    let (a, b) = (kpp(&bi), sup(&bi));
    ok &= !a.passed() && !b.passed();
    detail.push(format!("Bistable KPP {a}; superposition {b}"));
    let comb = ReactionTerm::combustion(0.25);
    let lb = check_lower_bound(&comb, &comb, &default_z_samples(&comb), &default_t_samples(&comb)).unwrap();
    ok &= lb.passed();
    detail.push(format!("Combustion lower bound {lb}"));
    (ok, detail.join("; "))
}

#[test]
fn acceptance() {
    let mut out = Outcomes(Vec::new());
    let (ok, d) = criterion_1();
    out.record(1, ok, d);
    criteria_2_and_10(&mut out);
    let (ok, d) = criterion_3();
    out.record(3, ok, d);
    main_runs(&mut out);
    // Positivity of every recorded field in criteria 2-7 is part of their verdict lists.
    let positivity = out.0.iter().filter(|(n, _, _)| (2..=7).contains(n)).all(|(_, ok, _)| *ok);
    let (ok, d) = criterion_8(positivity);
    out.record(8, ok, d);
    let (ok, d) = criterion_9();
    out.record(9, ok, d);

    out.0.sort_by_key(|(n, _, _)| *n);
    let failed: Vec<u32> = out.0.iter().filter(|(_, ok, _)| !ok).map(|(n, _, _)| *n).collect();
    say(&format!(
        "acceptance summary: {} of {} criteria pass",
        out.0.len() - failed.len(),
        out.0.len()
    ));
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
