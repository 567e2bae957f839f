//! Plane bichromatic trees inside a single cell, built as stars around a red
//! centre, and the rule for hanging an outside point onto such a tree.
//!
//! Blue points are grouped into rays from the centre `s`. The centre is
//! joined to the first point of each ray when that point is blue, and each
//! ray is chained through consecutive points of alternating colour. The
//! angular gaps between consecutive blue rays are cones; a cone wider than
//! a half-turn (or the whole turn when there is a single ray) is halved by
//! its bisector. Every red point inside a cone is joined to the nearest
//! blue on the ray bounding its half clockwise-side first.

use std::cmp::Ordering;

use crate::dsu::DisjointSet;
use crate::error::{Error, Result};
use crate::geom::{dist2, in_segment_interior, segments_properly_cross, Color, Point, Segment};
use crate::instance::Instance;
use crate::surd::sign_sum_over_roots;
use crate::world::World;

type Vec2 = (i128, i128);

fn sub(a: Point, b: Point) -> Vec2 {
    (a.x as i128 - b.x as i128, a.y as i128 - b.y as i128)
}

fn cross2(a: Vec2, b: Vec2) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

fn norm2(a: Vec2) -> i128 {
    a.0 * a.0 + a.1 * a.1
}

fn half(v: Vec2) -> u8 {
    u8::from(!(v.1 > 0 || (v.1 == 0 && v.0 > 0)))
}

/// Counterclockwise angular order starting from the positive x axis.
pub fn cmp_angle(a: Vec2, b: Vec2) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross2(a, b)))
}

fn same_direction(a: Vec2, b: Vec2) -> bool {
    half(a) == half(b) && cross2(a, b) == 0
}

/// Points of a cell sharing one direction from the centre, at least one of
/// them blue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    pub dir: Vec2,
    /// Nearest first.
    pub points: Vec<usize>,
    pub head_blue: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConePart {
    Whole,
    /// Between the clockwise ray and the bisector.
    Clockwise,
    /// Between the bisector and the counterclockwise ray.
    Counterclockwise,
}

/// The angular region between two consecutive blue rays, or one half of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub cw: usize,
    pub ccw: usize,
    pub part: ConePart,
    pub boundary_blue: usize,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarTree {
    pub center: usize,
    pub points: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub rays: Vec<Ray>,
    pub cones: Vec<Cone>,
    /// Edges the star rules produced; the rest came from repair.
    pub rule_edges: usize,
}

impl StarTree {
    /// More than one only when no plane bichromatic tree on the cell's
    /// points exists among the edges tried.
    pub fn components(&self) -> usize {
        self.points.len() - self.edges.len()
    }
}

impl StarTree {
    fn needs_split(&self, cone: usize) -> bool {
        let k = self.rays.len();
        if k == 1 {
            return true;
        }
        let a = self.rays[cone].dir;
        let b = self.rays[(cone + 1) % k].dir;
        cross2(a, b) < 0
    }

    /// Cone entry holding direction `v` (non-zero). A direction on a ray
    /// belongs to the cone counterclockwise of it.
    pub fn locate(&self, v: Vec2) -> usize {
        let k = self.rays.len();
        let idx = self.rays.partition_point(|r| cmp_angle(r.dir, v) != Ordering::Greater);
        let ray = if idx == 0 { k - 1 } else { idx - 1 };
        let first = self.cones.iter().position(|c| c.cw == ray).expect("every ray opens a cone");
        if !self.needs_split(ray) {
            return first;
        }
        match bisector_side(self, ray, v) {
            Ordering::Greater => first,
            Ordering::Less => first + 1,
            Ordering::Equal => {
                if self.cones[first].boundary_blue <= self.cones[first + 1].boundary_blue {
                    first
                } else {
                    first + 1
                }
            }
        }
    }
}

/// `Greater` for the clockwise half, `Less` for the counterclockwise half,
/// `Equal` on the bisector.
fn bisector_side(t: &StarTree, ray: usize, v: Vec2) -> Ordering {
    let a = t.rays[ray].dir;
    let b = t.rays[(ray + 1) % t.rays.len()].dir;
    sign_sum_over_roots(cross2(a, v), norm2(a), cross2(b, v), norm2(b))
}

/// Local validity of a candidate edge inside one cell.
fn locally_valid(inst: &Instance, pts: &[usize], edges: &[(usize, usize)], dsu: &mut DisjointSet, a: usize, b: usize) -> bool {
    if inst.color(a) == inst.color(b) || dsu.same(a, b) {
        return false;
    }
    let s = Segment::new(inst.pos(a), inst.pos(b));
    if pts.iter().any(|&q| q != a && q != b && in_segment_interior(&s, inst.pos(q))) {
        return false;
    }
    !edges.iter().any(|&(x, y)| segments_properly_cross(&s, &Segment::new(inst.pos(x), inst.pos(y))))
}

/// Builds the star tree on the points of one cell. The cell must contain
/// both colours. If the repair pass cannot join everything the result is a
/// forest; see [`StarTree::components`].
pub fn build_star_tree(inst: &Instance, points: &[usize]) -> Result<StarTree> {
    let center = points
        .iter()
        .copied()
        .filter(|&i| inst.color(i) == Color::Red)
        .min()
        .ok_or_else(|| Error::invariant("star", "cell without a red point"))?;
    let sp = inst.pos(center);
    let mut others: Vec<usize> = points.iter().copied().filter(|&i| i != center).collect();
    others.sort_by(|&i, &j| {
        cmp_angle(sub(inst.pos(i), sp), sub(inst.pos(j), sp))
            .then_with(|| dist2(inst.pos(i), sp).cmp(&dist2(inst.pos(j), sp)))
            .then(i.cmp(&j))
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in others {
        match groups.last_mut() {
            Some(g) if same_direction(sub(inst.pos(g[0]), sp), sub(inst.pos(i), sp)) => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut rays = Vec::new();
    let mut loose: Vec<usize> = Vec::new();
    for g in groups {
        match g.iter().copied().find(|&i| inst.color(i) == Color::Blue) {
            Some(head_blue) => rays.push(Ray { dir: sub(inst.pos(g[0]), sp), points: g, head_blue }),
            None => loose.extend(g),
        }
    }
    if rays.is_empty() {
        return Err(Error::invariant("star", "cell without a blue point"));
    }
    let mut tree = StarTree { center, points: points.to_vec(), edges: Vec::new(), rays, cones: Vec::new(), rule_edges: 0 };
    let k = tree.rays.len();
    for i in 0..k {
        let j = (i + 1) % k;
        if tree.needs_split(i) {
            for (part, head) in [(ConePart::Clockwise, i), (ConePart::Counterclockwise, j)] {
                let boundary_blue = tree.rays[head].head_blue;
                tree.cones.push(Cone { cw: i, ccw: j, part, boundary_blue, members: Vec::new() });
            }
        } else {
            let boundary_blue = tree.rays[i].head_blue;
            tree.cones.push(Cone { cw: i, ccw: j, part: ConePart::Whole, boundary_blue, members: Vec::new() });
        }
    }
    for r in loose {
        let c = tree.locate(sub(inst.pos(r), sp));
        tree.cones[c].members.push(r);
    }

    let mut cands: Vec<(usize, usize)> = Vec::new();
    for ray in &tree.rays {
        if inst.color(ray.points[0]) == Color::Blue {
            cands.push((center, ray.points[0]));
        }
        for w in ray.points.windows(2) {
            if inst.color(w[0]) != inst.color(w[1]) {
                cands.push((w[0], w[1]));
            }
        }
    }
    let mut members: Vec<(usize, usize)> =
        tree.cones.iter().flat_map(|c| c.members.iter().map(move |&r| (r, c.boundary_blue))).collect();
    members.sort_unstable();
    cands.extend(members);

    let mut dsu = DisjointSet::new(inst.len());
    let mut edges = Vec::new();
    for (a, b) in cands {
        if locally_valid(inst, points, &edges, &mut dsu, a, b) {
            dsu.union(a, b);
            edges.push((a, b));
        }
    }
    let rule_edges = edges.len();
    if edges.len() + 1 < points.len() {
        let mut pairs: Vec<(i128, usize, usize)> = Vec::new();
        for (x, &a) in points.iter().enumerate() {
            for &b in &points[x + 1..] {
                if inst.color(a) != inst.color(b) {
                    pairs.push((dist2(inst.pos(a), inst.pos(b)), a.min(b), a.max(b)));
                }
            }
        }
        pairs.sort_unstable();
        for (_, a, b) in pairs {
            if locally_valid(inst, points, &edges, &mut dsu, a, b) {
                dsu.union(a, b);
                edges.push((a, b));
            }
        }
    }
    tree.edges = edges;
    tree.rule_edges = rule_edges;
    Ok(tree)
}

/// An accepted connection of an outside point to a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub point: usize,
    pub target: usize,
    /// Whether the first candidate of the star rule was accepted.
    pub by_rule: bool,
}

/// Candidate tree endpoints for `p`, best first, and how many of them count
/// as the star rule.
pub fn attach_candidates(inst: &Instance, tree: &StarTree, p: usize) -> (Vec<usize>, usize) {
    let pp = inst.pos(p);
    let s = tree.center;
    let mut out = Vec::new();
    let rule;
    let by_dist = |col: Color| {
        let mut v: Vec<usize> = tree.points.iter().copied().filter(|&i| inst.color(i) == col).collect();
        v.sort_by_key(|&i| (dist2(inst.pos(i), pp), i));
        v
    };
    match inst.color(p) {
        Color::Blue => {
            out.push(s);
            let ps = Segment::new(pp, inst.pos(s));
            let d = sub(inst.pos(s), pp);
            let mut hits: Vec<(f64, usize, usize)> = Vec::new();
            for (k, &(a, b)) in tree.edges.iter().enumerate() {
                let e = Segment::new(inst.pos(a), inst.pos(b));
                if segments_properly_cross(&ps, &e) {
                    let ev = sub(e.b, e.a);
                    let denom = cross2(d, ev);
                    let t = if denom == 0 { 0.0 } else { cross2(sub(e.a, pp), ev) as f64 / denom as f64 };
                    let red = if inst.color(a) == Color::Red { a } else { b };
                    hits.push((t, k, red));
                }
            }
            hits.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            rule = if hits.is_empty() { 1 } else { 2 };
            out.extend(hits.into_iter().map(|h| h.2));
            out.extend(by_dist(Color::Red));
        }
        Color::Red => {
            let v = sub(pp, inst.pos(s));
            if v != (0, 0) {
                out.push(tree.cones[tree.locate(v)].boundary_blue);
            }
            rule = out.len();
            out.extend(by_dist(Color::Blue));
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut uniq = Vec::with_capacity(out.len());
    let mut rule_uniq = 0;
    for (k, c) in out.into_iter().enumerate() {
        if seen.insert(c) {
            uniq.push(c);
            if k < rule {
                rule_uniq += 1;
            }
        }
    }
    (uniq, rule_uniq)
}

/// Connects the outside point `p` to `tree` by the first candidate the world
/// accepts, adding the edge to the world.
pub fn attach_external_point(world: &mut World<'_>, tree: &StarTree, p: usize, cap2: i128) -> Result<Attachment> {
    let inst = world.instance();
    let (cands, rule) = attach_candidates(inst, tree, p);
    for (k, q) in cands.into_iter().enumerate() {
        if world.can_add(p, q, cap2) {
            world.add(p, q);
            return Ok(Attachment { point: p, target: q, by_rule: k < rule });
        }
    }
    Err(Error::AttachFailure { cell: tree.center, point: p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surd::Field;

    use Color::{Blue as B, Red as R};

    fn inst(pts: &[(i64, i64, Color)]) -> Instance {
        Instance::new(pts.iter().map(|&(x, y, c)| (Point::new(x, y), c)).collect(), 0).unwrap()
    }

    fn all(i: &Instance) -> Vec<usize> {
        (0..i.len()).collect()
    }

    #[test]
    fn angle_order() {
        let dirs = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
        for w in dirs.windows(2) {
            assert_eq!(cmp_angle(w[0], w[1]), Ordering::Less);
        }
        assert_eq!(cmp_angle((2, 0), (1, 0)), Ordering::Equal);
    }

    #[test]
    fn simple_star() {
        let i = inst(&[(0, 0, R), (2, 0, B), (0, 2, B), (-2, -1, B), (1, 1, R)]);
        let t = build_star_tree(&i, &all(&i)).unwrap();
        assert_eq!(t.center, 0);
        assert_eq!(t.rays.len(), 3);
        assert_eq!(t.edges.len(), 4);
        assert_eq!(t.rule_edges, 4);
        // (1,1) lies in the cone from (2,0) to (0,2).
        assert!(t.edges.contains(&(4, 1)));
    }

    #[test]
    fn chained_ray() {
        let i = inst(&[(0, 0, R), (1, 0, B), (2, 0, R), (3, 0, B)]);
        let t = build_star_tree(&i, &all(&i)).unwrap();
        assert_eq!(t.rays.len(), 1);
        assert_eq!(t.edges, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn single_ray_is_split() {
        // Rays: one blue ray to the right; reds above and below.
        let i = inst(&[(0, 0, R), (2, 0, B), (1, 3, R), (1, -3, R), (-3, 1, R)]);
        let t = build_star_tree(&i, &all(&i)).unwrap();
        assert_eq!(t.cones.len(), 2);
        assert_eq!(t.edges.len(), 4);
        assert_eq!(t.cones[0].members, vec![2, 4]);
        assert_eq!(t.cones[1].members, vec![3]);
    }

    #[test]
    fn attach_blue_through_edge() {
        let i = inst(&[(0, 0, R), (4, 1, B), (4, -1, R), (8, 0, B)]);
        let t = build_star_tree(&i, &[0, 1, 2]).unwrap();
        let mut w = World::new(&i, Field::new(4), 4.0);
        for &(a, b) in &t.edges {
            w.add(a, b);
        }
        let a = attach_external_point(&mut w, &t, 3, 1000).unwrap();
        assert_eq!(a.target, 2);
        assert!(a.by_rule);
    }

    #[test]
    fn attach_respects_cap() {
        let i = inst(&[(0, 0, R), (1, 0, B), (30, 0, R)]);
        let t = build_star_tree(&i, &[0, 1]).unwrap();
        let mut w = World::new(&i, Field::new(1), 4.0);
        w.add(0, 1);
        assert!(matches!(attach_external_point(&mut w, &t, 2, 100), Err(Error::AttachFailure { .. })));
        assert!(attach_external_point(&mut w, &t, 2, 900).is_ok());
    }
}
