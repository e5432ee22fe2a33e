mod common;

use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;

use roadalign::alignment::{
    build_curve, segments, stations, tangent_length, vertical_variable_count, AlignmentDesign, SegmentId,
};
use roadalign::constraints::{check_all, ConstraintConfig, IpBox};
use roadalign::costing::{evaluate_costs, segment, ArcSegment, CostParameters, Segment, TangentSegment};
use roadalign::geom::{Point2, Point3};
use roadalign::moo::{pareto_filter, weighted_sum, FrontMember, NadirUtopia};
use roadalign::terrain::TerrainGrid;

fn terrain_from_seed(seed: u64) -> TerrainGrid {
    random_terrain(&mut rng(seed), 6, 10.0, 20.0)
}

fn pt() -> impl Strategy<Value = Point2> {
    (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

prop_compose! {
    fn tangent_in_box()(x0 in 0.0..60.0f64, y0 in 0.0..60.0f64, x1 in 0.0..60.0f64, y1 in 0.0..60.0f64,
                        z0 in 0.0..20.0f64, z1 in 0.0..20.0f64) -> TangentSegment {
        TangentSegment::new(Point3::new(x0, y0, z0), Point3::new(x1, y1, z1))
    }
}

prop_compose! {
    fn arc_in_box()(cx in 20.0..40.0f64, cy in 20.0..40.0f64, r in 1.0..19.0f64, t0 in -PI..PI,
                    sweep in -3.0..3.0f64, z0 in 0.0..20.0f64, z1 in 0.0..20.0f64) -> ArcSegment {
        ArcSegment { center: Point2::new(cx, cy), radius: r, theta_start: t0, theta_end: t0 + sweep, z_start: z0, z_end: z1 }
    }
}

fn zigzag_design(rad: f64, dz: &[f64], m: usize) -> AlignmentDesign {
    let ms = vec![m; 4];
    let nz = vertical_variable_count(&ms);
    let z = (0..nz).map(|i| 10.0 + dz[i % dz.len()]).collect();
    AlignmentDesign::new(
        Point3::new(0.0, 0.0, 10.0),
        Point3::new(400.0, 0.0, 10.0),
        vec![100.0, 200.0, 300.0],
        vec![40.0, -40.0, 40.0],
        vec![rad; 3],
        z,
        ms,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tangent_length_identity(theta in 0.01..(PI - 0.01), r in 0.1..1000.0f64) {
        let l = tangent_length(theta, r).unwrap();
        let half = r / (0.5 * theta).tan();
        prop_assert!((l - half).abs() <= 1e-10 * half.max(1.0));
    }

    #[test]
    fn curve_is_tangent_to_both_chords(a in pt(), ip in pt(), b in pt(), r in 1.0..50.0f64) {
        let theta = angle_atan2(a - ip, b - ip);
        prop_assume!(theta > 0.01 && theta < PI - 0.01);
        let c = build_curve(a, ip, b, r).unwrap();
        let center = c.center.unwrap();
        prop_assert!((center.distance(c.tc) - r).abs() <= 1e-9 * r);
        prop_assert!((center.distance(c.ct) - r).abs() <= 1e-9 * r);
        // Radius is orthogonal to the chord direction at TC and CT.
        prop_assert!(((c.tc - center).dot(a - ip)).abs() <= 1e-9 * r * r * (a - ip).norm().max(1.0));
        prop_assert!(((c.ct - center).dot(b - ip)).abs() <= 1e-9 * r * r * (b - ip).norm().max(1.0));
    }

    #[test]
    fn mirrored_triple_has_mirrored_curve(a in pt(), ip in pt(), b in pt(), r in 1.0..50.0f64) {
        let theta = angle_atan2(a - ip, b - ip);
        prop_assume!(theta > 0.01 && theta < PI - 0.01);
        let m = |p: Point2| Point2::new(p.x, -p.y);
        let c = build_curve(a, ip, b, r).unwrap();
        let cm = build_curve(m(a), m(ip), m(b), r).unwrap();
        prop_assert!((c.theta - cm.theta).abs() < 1e-12);
        prop_assert!((c.tangent_length - cm.tangent_length).abs() < 1e-9 * r);
        prop_assert!(m(c.center.unwrap()).distance(cm.center.unwrap()) < 1e-9 * r.max(1.0));
        prop_assert!((c.sweep() + cm.sweep()).abs() < 1e-9);
    }

    #[test]
    fn centerline_is_continuous(rad in 5.0..30.0f64, dz in prop::collection::vec(-3.0..3.0f64, 1..8), m in 1usize..5) {
        let d = zigzag_design(rad, &dz, m);
        let g = d.build_horizontal().unwrap();
        let segs: Vec<Segment> = segments(&d).into_iter().map(|id| segment(&d, &g, id)).collect();
        let ends = |s: &Segment| match s {
            Segment::Tangent(t) => (t.from, t.to),
            Segment::Arc(a) => (a.point(0.0), a.point(1.0)),
        };
        for w in segs.windows(2) {
            let (_, e) = ends(&w[0]);
            let (s, _) = ends(&w[1]);
            prop_assert!(e.distance(s) < 1e-9, "gap {}", e.distance(s));
        }
    }

    #[test]
    fn variable_count_matches_stations(n in 1usize..5, ms in prop::collection::vec(1usize..5, 5)) {
        let m = ms[..=n].to_vec();
        let expected = m[0] + m[n] + m[1..n].iter().map(|v| v + 1).sum::<usize>();
        prop_assert_eq!(vertical_variable_count(&m), expected);
        let x: Vec<f64> = (1..=n).map(|k| 100.0 * k as f64).collect();
        let y: Vec<f64> = (1..=n).map(|k| if k % 2 == 0 { 30.0 } else { -30.0 }).collect();
        let d = AlignmentDesign::new(
            Point3::new(0.0, 0.0, 0.0), Point3::new(100.0 * (n + 1) as f64, 0.0, 0.0),
            x, y, vec![5.0; n], vec![0.0; expected], m,
        ).unwrap();
        let g = d.build_horizontal().unwrap();
        let mut idx: Vec<usize> = stations(&d, &g).iter().filter_map(|s| s.z_index).collect();
        idx.sort();
        prop_assert_eq!(idx, (0..expected).collect::<Vec<_>>());
        prop_assert_eq!(d.dimension(), 3 * n + expected);
    }

    #[test]
    fn raising_road_trades_cut_for_fill(seed in 0u64..1000, seg in tangent_in_box(), delta in prop::sample::select(vec![0.1, 1.0])) {
        let t = terrain_from_seed(seed);
        let p = CostParameters::default();
        let lo = seg.cut_fill(&t, &p).unwrap();
        let up = TangentSegment::new(
            Point3::new(seg.from.x, seg.from.y, seg.from.z + delta),
            Point3::new(seg.to.x, seg.to.y, seg.to.z + delta),
        ).cut_fill(&t, &p).unwrap();
        prop_assert!(up.cut <= lo.cut + 1e-9 * lo.cut.max(1.0));
        prop_assert!(up.fill >= lo.fill - 1e-9 * lo.fill.max(1.0));
    }

    #[test]
    fn volumes_are_translation_invariant(seed in 0u64..1000, seg in tangent_in_box(), arc in arc_in_box(),
                                         dx in -500.0..500.0f64, dy in -500.0..500.0f64) {
        let t = terrain_from_seed(seed);
        let moved = t.translated(dx, dy);
        let p = CostParameters::default();
        let shift = |q: Point3| Point3::new(q.x + dx, q.y + dy, q.z);
        let a = seg.cut_fill(&t, &p).unwrap();
        let b = TangentSegment::new(shift(seg.from), shift(seg.to)).cut_fill(&moved, &p).unwrap();
        prop_assert!(rel_err(b.cut, a.cut, 1.0) < 1e-8 && rel_err(b.fill, a.fill, 1.0) < 1e-8);
        let a = arc.cut_fill(&t, &p).unwrap();
        let arc2 = ArcSegment { center: Point2::new(arc.center.x + dx, arc.center.y + dy), ..arc };
        let b = arc2.cut_fill(&moved, &p).unwrap();
        prop_assert!(rel_err(b.cut, a.cut, 1.0) < 1e-6 && rel_err(b.fill, a.fill, 1.0) < 1e-6);
    }

    #[test]
    fn splitting_a_segment_preserves_volume(seed in 0u64..1000, seg in tangent_in_box(), arc in arc_in_box(), s in 0.05..0.95f64) {
        let t = terrain_from_seed(seed);
        let p = CostParameters::default();
        let whole = seg.cut_fill(&t, &p).unwrap();
        let mid = seg.point(s);
        let a = TangentSegment::new(seg.from, mid).cut_fill(&t, &p).unwrap();
        let b = TangentSegment::new(mid, seg.to).cut_fill(&t, &p).unwrap();
        prop_assert!(rel_err(a.cut + b.cut, whole.cut, 1.0) < 1e-8);
        prop_assert!(rel_err(a.fill + b.fill, whole.fill, 1.0) < 1e-8);

        let whole = arc.cut_fill(&t, &p).unwrap();
        let zm = arc.z_start + s * (arc.z_end - arc.z_start);
        let th = arc.angle(s);
        let a = ArcSegment { theta_end: th, z_end: zm, ..arc }.cut_fill(&t, &p).unwrap();
        let b = ArcSegment { theta_start: th, z_start: zm, ..arc }.cut_fill(&t, &p).unwrap();
        prop_assert!(rel_err(a.cut + b.cut, whole.cut, 1.0) < 1e-6);
        prop_assert!(rel_err(a.fill + b.fill, whole.fill, 1.0) < 1e-6);
    }

    #[test]
    fn zero_kappa_is_linear_in_width(seed in 0u64..1000, seg in tangent_in_box(), w in 0.5..20.0f64) {
        let t = terrain_from_seed(seed);
        let p1 = CostParameters { width: 1.0, kappa: 0.0, ..CostParameters::default() };
        let pw = CostParameters { width: w, kappa: 0.0, ..CostParameters::default() };
        let a = seg.cut_fill(&t, &p1).unwrap();
        let b = seg.cut_fill(&t, &pw).unwrap();
        prop_assert!(rel_err(b.cut, w * a.cut, 1.0) < 1e-10);
        prop_assert!(rel_err(b.fill, w * a.fill, 1.0) < 1e-10);
    }

    #[test]
    fn totals_are_sums_of_segments(rad in 5.0..30.0f64, dz in prop::collection::vec(-3.0..3.0f64, 1..8), m in 1usize..4, seed in 0u64..100) {
        let d = zigzag_design(rad, &dz, m);
        let g = d.build_horizontal().unwrap();
        let t = rolling_terrain(400.0, 200.0, 10.0, 5.0, seed).translated(0.0, -100.0);
        let p = CostParameters::default();
        let c = evaluate_costs(&d, &g, &t, &p).unwrap();
        let (mut cut, mut fill, mut len) = (0.0, 0.0, 0.0);
        for id in segments(&d) {
            let s = segment(&d, &g, id);
            let cf = s.cut_fill(&t, &p).unwrap();
            cut += cf.cut;
            fill += cf.fill;
            len += s.length();
        }
        prop_assert!((c.v_cut - cut).abs() <= 1e-9 * cut.max(1.0));
        prop_assert!((c.v_fill - fill).abs() <= 1e-9 * fill.max(1.0));
        prop_assert!((c.length - len).abs() <= 1e-9 * len);
        prop_assert!((c.cost_utility - p.utility * len).abs() <= 1e-9 * len);
    }

    #[test]
    fn feasibility_is_translation_invariant(rad in 5.0..30.0f64, dz in prop::collection::vec(-3.0..3.0f64, 1..8),
                                            dx in -1000.0..1000.0f64, dy in -1000.0..1000.0f64, seed in 0u64..100) {
        let d = zigzag_design(rad, &dz, 3);
        let t = rolling_terrain(400.0, 200.0, 10.0, 5.0, seed).translated(0.0, -100.0);
        let boxes: Vec<IpBox> = (0..3).map(|i| IpBox { x_lo: d.x[i] - 10.0, x_hi: d.x[i] + 10.0, y_lo: d.y[i] - 10.0, y_hi: d.y[i] + 10.0 }).collect();
        let cfg = ConstraintConfig { boxes, r_min: 10.0, max_grade: 0.1, z_bar: 8.0 };
        let r1 = check_all(&d, &d.build_horizontal().unwrap(), &t, &cfg).unwrap();

        let mut d2 = d.clone();
        d2.start = Point3::new(d.start.x + dx, d.start.y + dy, d.start.z);
        d2.end = Point3::new(d.end.x + dx, d.end.y + dy, d.end.z);
        d2.x.iter_mut().for_each(|v| *v += dx);
        d2.y.iter_mut().for_each(|v| *v += dy);
        let cfg2 = ConstraintConfig {
            boxes: cfg.boxes.iter().map(|b| IpBox { x_lo: b.x_lo + dx, x_hi: b.x_hi + dx, y_lo: b.y_lo + dy, y_hi: b.y_hi + dy }).collect(),
            ..cfg.clone()
        };
        let r2 = check_all(&d2, &d2.build_horizontal().unwrap(), &t.translated(dx, dy), &cfg2).unwrap();
        prop_assert_eq!(r1.feasible, r2.feasible);
        for (a, b) in r1.violations.iter().zip(&r2.violations) {
            prop_assert_eq!(a.kind, b.kind);
            prop_assert!((a.value - b.value).abs() < 1e-6);
        }
    }

    #[test]
    fn pareto_filter_is_idempotent_and_order_free(pts in prop::collection::vec((0u8..20, 0u8..20), 1..60), seed in any::<u64>()) {
        let members: Vec<FrontMember> = pts.iter().enumerate()
            .map(|(i, &(a, b))| FrontMember { objectives: [a as f64, b as f64], x: vec![i as f64], eval_index: i })
            .collect();
        let front = pareto_filter(members.clone());
        let again = pareto_filter(front.members().to_vec());
        prop_assert_eq!(front.objectives(), again.objectives());

        let mut shuffled = members.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut rng(seed));
        let mut a = front.objectives();
        let mut b = pareto_filter(shuffled).objectives();
        a.sort_by(|p, q| p.partial_cmp(q).unwrap());
        b.sort_by(|p, q| p.partial_cmp(q).unwrap());
        prop_assert_eq!(a, b.clone());

        let objs: Vec<[f64; 2]> = members.iter().map(|m| m.objectives).collect();
        let mut brute: Vec<[f64; 2]> = brute_force_front(&objs).into_iter().map(|i| objs[i]).collect();
        brute.sort_by(|p, q| p.partial_cmp(q).unwrap());
        prop_assert_eq!(brute, b);
    }

    #[test]
    fn scalarization_argmin_is_scale_free(pts in prop::collection::vec((0.0..100.0f64, 0.0..100.0f64), 2..40),
                                          w in 0.0..1.0f64, s in 0.01..100.0f64) {
        let argmin = |scale: f64| {
            let objs: Vec<[f64; 2]> = pts.iter().map(|&(a, b)| [scale * a, scale * b]).collect();
            let norm = NadirUtopia::from_points(&objs).unwrap().normalization();
            objs.iter().enumerate()
                .map(|(i, &o)| (i, weighted_sum(o, w, norm)))
                .min_by(|x, y| x.1.total_cmp(&y.1)).unwrap().0
        };
        let base = argmin(1.0);
        let scaled = argmin(s);
        let v = |i: usize| weighted_sum([pts[i].0, pts[i].1], w, [1.0, 1.0]);
        prop_assert!((v(base) - v(scaled)).abs() <= 1e-9 * v(base).abs().max(1.0));
    }
}

#[test]
fn grade_ids_cover_every_segment() {
    let d = zigzag_design(10.0, &[0.0], 3);
    let g = d.build_horizontal().unwrap();
    let ids: Vec<SegmentId> = roadalign::constraints::check_grade(&d, &g, 0.1).into_iter().map(|(id, _)| id).collect();
    assert_eq!(ids, segments(&d));
}
