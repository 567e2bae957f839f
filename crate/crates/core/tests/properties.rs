//! Property tests against brute-force references.

use bpst::bottleneck::{compute_lambda, connected_under_threshold};
use bpst::geom::{convex_hull, cross, dist2, orientation, segments_properly_cross, Color, Hull, Point, Segment};
use bpst::oracle::{exact_bottleneck_planar_bst, feasible_at};
use bpst::pipeline::{solve, SolveOptions, BOUND_FACTOR2, CELL_FACTOR2};
use bpst::verify::verify_tree;
use bpst::{Error, Instance};
use proptest::prelude::*;

fn point(r: i64) -> impl Strategy<Value = Point> {
    (-r..=r, -r..=r).prop_map(|(x, y)| Point::new(x, y))
}

fn colored(max: usize, r: i64) -> impl Strategy<Value = Vec<(Point, Color)>> {
    prop::collection::vec((point(r), any::<bool>()), 2..=max).prop_map(|v| {
        let mut pts: Vec<(Point, Color)> = Vec::new();
        for (p, red) in v {
            if pts.iter().all(|(q, _)| *q != p) {
                pts.push((p, if red { Color::Red } else { Color::Blue }));
            }
        }
        pts
    })
}

/// Distinct points with both colors present.
fn instance(max: usize, r: i64) -> impl Strategy<Value = Instance> {
    colored(max, r)
        .prop_filter("needs both colors", |pts| {
            pts.iter().any(|p| p.1 == Color::Red) && pts.iter().any(|p| p.1 == Color::Blue)
        })
        .prop_map(|pts| Instance::new(pts, 0).unwrap())
}

fn bichromatic_pairs(inst: &Instance) -> Vec<(usize, usize)> {
    let n = inst.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if inst.color(a) != inst.color(b) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Minimax path lengths over red-blue edges; the worst pair is `λ²`.
fn brute_lambda2(inst: &Instance) -> i128 {
    let n = inst.len();
    let mut m = vec![vec![i128::MAX; n]; n];
    for (a, b) in bichromatic_pairs(inst) {
        let d = dist2(inst.pos(a), inst.pos(b));
        m[a][b] = d;
        m[b][a] = d;
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k].max(m[k][j]);
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    m.iter().flatten().copied().max().unwrap()
}

/// Smallest bottleneck over every subset of `n - 1` red-blue edges that
/// forms a valid plane tree.
fn brute_opt2(inst: &Instance) -> Option<i128> {
    fn rec(inst: &Instance, pairs: &[(usize, usize)], from: usize, chosen: &mut Vec<(usize, usize)>, best: &mut Option<i128>) {
        if chosen.len() + 1 == inst.len() {
            let r = verify_tree(inst, chosen);
            if r.is_valid() && best.is_none_or(|b| r.bottleneck2 < b) {
                *best = Some(r.bottleneck2);
            }
            return;
        }
        for i in from..pairs.len() {
            chosen.push(pairs[i]);
            rec(inst, pairs, i + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = None;
    rec(inst, &bichromatic_pairs(inst), 0, &mut Vec::new(), &mut best);
    best
}

fn hull_vertices(h: &Hull) -> Vec<Point> {
    match h {
        Hull::Degenerate(v) => v.clone(),
        Hull::Polygon(p) => p.vertices().to_vec(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn orientation_antisymmetric(a in point(1 << 40), b in point(1 << 40), c in point(1 << 40)) {
        prop_assert_eq!(orientation(a, b, c), orientation(b, a, c).reversed());
        prop_assert_eq!(orientation(a, b, c), orientation(b, c, a));
        prop_assert_eq!(cross(a, b, c), -cross(a, c, b));
    }

    #[test]
    fn crossing_symmetric(a in point(6), b in point(6), c in point(6), d in point(6)) {
        prop_assume!(a != b && c != d);
        let (s, t) = (Segment::new(a, b), Segment::new(c, d));
        let x = segments_properly_cross(&s, &t);
        prop_assert_eq!(x, segments_properly_cross(&t, &s));
        prop_assert_eq!(x, segments_properly_cross(&Segment::new(b, a), &Segment::new(d, c)));
    }

    #[test]
    fn hull_ignores_order(pts in prop::collection::vec(point(20), 1..30), seed in any::<u64>()) {
        let mut shuffled = pts.clone();
        let k = shuffled.len();
        shuffled.rotate_left((seed as usize) % k);
        shuffled.reverse();
        let h = convex_hull(&pts);
        prop_assert_eq!(&h, &convex_hull(&shuffled));
        for v in hull_vertices(&h) {
            prop_assert!(pts.contains(&v));
        }
    }

    #[test]
    fn lambda_matches_minimax(inst in instance(8, 30)) {
        let r = compute_lambda(&inst).unwrap();
        prop_assert_eq!(r.lambda2, brute_lambda2(&inst));
        prop_assert!(connected_under_threshold(&inst, r.lambda2));
        prop_assert!(!connected_under_threshold(&inst, r.lambda2 - 1));
        prop_assert!(connected_under_threshold(&inst, r.lambda2 * 2));
    }

    #[test]
    fn oracle_matches_enumeration(inst in instance(6, 4)) {
        match (exact_bottleneck_planar_bst(&inst), brute_opt2(&inst)) {
            (Ok(r), Some(b)) => {
                prop_assert_eq!(r.opt2, b);
                prop_assert!(verify_tree(&inst, &r.witness).is_valid());
                prop_assert!(feasible_at(&inst, r.opt2).is_some());
                prop_assert!(feasible_at(&inst, r.opt2 - 1).is_none());
            }
            (Err(Error::Infeasible), None) => {}
            (got, want) => prop_assert!(false, "oracle {got:?} vs enumeration {want:?}"),
        }
    }

    #[test]
    fn solve_within_bounds(inst in instance(60, 200)) {
        let sol = solve(&inst, &SolveOptions::default());
        // Exact collinear blocking admits no plane tree at all.
        if let Err(Error::ForestRemains { .. }) = sol {
            prop_assert!(matches!(exact_small(&inst), None | Some(Err(Error::Infeasible))));
            return Ok(());
        }
        let sol = sol.unwrap();
        let r = verify_tree(&inst, &sol.edges);
        prop_assert!(r.is_valid(), "{r:?}");
        prop_assert!(r.bottleneck2 <= BOUND_FACTOR2 * sol.lambda2);
        let cx = sol.complex.as_ref().unwrap();
        for fc in &cx.final_cells {
            for &p in &fc.points {
                for &q in &fc.points {
                    prop_assert!(dist2(inst.pos(p), inst.pos(q)) <= CELL_FACTOR2 * sol.lambda2);
                }
            }
        }
    }

    #[test]
    fn offset_seed_does_not_matter_for_validity(inst in instance(40, 100), seed in any::<u64>()) {
        if let Ok(sol) = solve(&inst, &SolveOptions::with_offset_seed(Some(seed))) {
            let r = verify_tree(&inst, &sol.edges);
            prop_assert!(r.is_valid());
            prop_assert!(r.bottleneck2 <= BOUND_FACTOR2 * sol.lambda2);
        }
    }
}

fn exact_small(inst: &Instance) -> Option<Result<bpst::oracle::ExactResult, Error>> {
    (inst.len() <= 10).then(|| exact_bottleneck_planar_bst(inst))
}
