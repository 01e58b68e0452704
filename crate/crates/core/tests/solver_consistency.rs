//! Property tests tying the solver and geometry layers together.

use std::f64::consts::SQRT_2;

use proptest::prelude::*;

use frontlab::fields::{make_field, Bump, DatumSpec, GridSpec, Point};
use frontlab::geometry::{summarize, ProbeSpec};
use frontlab::reactions::ReactionTerm;
use frontlab::solver::{pointwise_leq, translate_field, Stepper};

const L: f64 = 6.0;
const N: usize = 61;

fn grid() -> GridSpec {
    GridSpec::new(L, N).unwrap()
}

fn bump() -> impl Strategy<Value = Bump> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.8..2.0f64, 0.3..1.0f64)
        .prop_map(|(x, y, r, h)| Bump::smooth(Point::new(x, y), r, h))
}

fn datum() -> impl Strategy<Value = DatumSpec> {
    prop::collection::vec(bump(), 1..3).prop_map(DatumSpec::new)
}

fn reaction() -> impl Strategy<Value = ReactionTerm> {
    prop_oneof![
        Just(ReactionTerm::fisher_kpp(1.0)),
        Just(ReactionTerm::bistable(0.3)),
        Just(ReactionTerm::combustion(0.25)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ordered_data_stay_ordered(d in datum(), extra in bump(), f in reaction()) {
        let lower = make_field(grid(), &d).unwrap();
        let upper = make_field(grid(), &d.union(&DatumSpec::single(extra))).unwrap();
        prop_assert!(pointwise_leq(&lower, &upper, 0.0).unwrap().holds);
        let mut a = Stepper::new(lower, f, 0.8).unwrap();
        let mut b = Stepper::new(upper, f, 0.8).unwrap();
        a.advance_to(0.5).unwrap();
        b.advance_to(0.5).unwrap();
        let c = pointwise_leq(a.field(), b.field(), 1e-12).unwrap();
        prop_assert!(c.holds, "excess {} at {:?}", c.max_excess, c.at);
        prop_assert!(a.field().min() >= 0.0);
    }

    #[test]
    fn higher_levels_give_smaller_balls(d in datum(), t1 in 0.1..0.5f64, dt in 0.05..0.4f64) {
        let field = make_field(grid(), &d).unwrap();
        let lo = summarize(&field, &ProbeSpec::new(t1).with_rays(90));
        let hi = summarize(&field, &ProbeSpec::new(t1 + dt).with_rays(90));
        let radius = |b: Option<frontlab::geometry::Ball>| b.map_or(0.0, |b| b.radius);
        prop_assert!(radius(hi.inscribed) <= radius(lo.inscribed));
        prop_assert!(radius(hi.enclosing) <= radius(lo.enclosing) + 1e-9);
    }

    #[test]
    fn summaries_follow_lattice_translations(d in datum(), a in -10i32..10, b in -10i32..10, theta in 0.1..0.6f64) {
        let h = grid().spacing();
        let v = Point::new(a as f64 * h, b as f64 * h);
        let field = make_field(grid(), &d).unwrap();
        let moved = translate_field(&field, v).unwrap();
        // Only compare when no mass is lost through the edge.
        prop_assume!((moved.mass() - field.mass()).abs() <= 1e-12 * field.mass());
        let s = summarize(&field, &ProbeSpec::new(theta).with_rays(90));
        let m = summarize(&moved, &ProbeSpec::new(theta).about(v).with_rays(90));
        match (s.inscribed, m.inscribed) {
            (Some(p), Some(q)) => prop_assert!((p.radius - q.radius).abs() < 1e-12),
            (p, q) => prop_assert_eq!(p.is_none(), q.is_none()),
        }
        if let (Some(p), Some(q)) = (s.enclosing, m.enclosing) {
            prop_assert!((p.radius - q.radius).abs() < 1e-9);
            prop_assert!((p.center.x + v.x - q.center.x).abs() < 1e-9);
            prop_assert!((p.center.y + v.y - q.center.y).abs() < 1e-9);
        }
        if let (Some(p), Some(q)) = (s.r_origin, m.r_origin) {
            prop_assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn origin_radius_sits_between_balls(d in datum(), theta in 0.1..0.6f64) {
        let field = make_field(grid(), &d).unwrap();
        let s = summarize(&field, &ProbeSpec::new(theta).with_rays(180));
        let h = grid().spacing();
        if let (Some(r), Some(ri), Some(re)) = (s.r_origin, s.inscribed, s.enclosing) {
            prop_assert!(r <= ri.radius + SQRT_2 * h, "r_origin {} vs R_i {}", r, ri.radius);
            prop_assert!(ri.radius <= re.radius);
        }
    }
}
