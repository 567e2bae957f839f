//! Exact planar primitives over integer lattice coordinates.
//!
//! Every input coordinate is a decimal number; an [`Instance`](crate::Instance)
//! rescales all of them by a common power of ten so that points live on the
//! integer lattice. Predicates below evaluate in `i128` and are exact as long
//! as every coordinate magnitude stays below [`MAX_COORD`].

use std::cmp::Ordering;
use std::fmt;

/// Largest admissible coordinate magnitude. Differences fit in 54 bits and
/// every product formed by the predicates fits comfortably in `i128`.
pub const MAX_COORD: i64 = 1 << 53;

/// A lattice point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Self {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    pub fn tag(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ColoredPoint {
    pub pos: Point,
    pub color: Color,
    /// Ordinal within the owning instance.
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    pub fn len2(&self) -> i128 {
        dist2(self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Counterclockwise turn.
    Left,
    /// Clockwise turn.
    Right,
    Collinear,
}

impl Orientation {
    fn from_sign(v: i128) -> Self {
        match v.cmp(&0) {
            Ordering::Greater => Orientation::Left,
            Ordering::Less => Orientation::Right,
            Ordering::Equal => Orientation::Collinear,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// `(b - a) × (c - a)`.
pub fn cross(a: Point, b: Point, c: Point) -> i128 {
    let abx = (b.x - a.x) as i128;
    let aby = (b.y - a.y) as i128;
    let acx = (c.x - a.x) as i128;
    let acy = (c.y - a.y) as i128;
    abx * acy - aby * acx
}

pub fn orientation(a: Point, b: Point, c: Point) -> Orientation {
    Orientation::from_sign(cross(a, b, c))
}

/// Squared Euclidean distance, exact.
pub fn dist2(a: Point, b: Point) -> i128 {
    let dx = (a.x - b.x) as i128;
    let dy = (a.y - b.y) as i128;
    dx * dx + dy * dy
}

/// Euclidean distance in lattice units, rounded to `f64` for display.
pub fn distance(a: Point, b: Point) -> f64 {
    (dist2(a, b) as f64).sqrt()
}

/// `p` lies on the closed segment `[a, b]`. Requires `p` collinear with `a, b`.
fn within_box(a: Point, b: Point, p: Point) -> bool {
    a.x.min(b.x) <= p.x && p.x <= a.x.max(b.x) && a.y.min(b.y) <= p.y && p.y <= a.y.max(b.y)
}

/// `p` lies on the closed segment `s`.
pub fn on_segment(s: &Segment, p: Point) -> bool {
    cross(s.a, s.b, p) == 0 && within_box(s.a, s.b, p)
}

/// `p` lies strictly inside segment `s` (on it, but not an endpoint).
pub fn in_segment_interior(s: &Segment, p: Point) -> bool {
    p != s.a && p != s.b && on_segment(s, p)
}

/// True when the two segments meet anywhere other than at a shared endpoint.
///
/// A shared endpoint alone is not a crossing. An endpoint of one segment
/// resting in the interior of the other is, and so is any collinear overlap
/// of positive length. Both configurations would break a plane straight-line
/// drawing.
pub fn segments_properly_cross(s1: &Segment, s2: &Segment) -> bool {
    let shared = [s1.a, s1.b]
        .iter()
        .filter(|p| **p == s2.a || **p == s2.b)
        .count();
    if shared == 2 {
        // Same segment (possibly reversed).
        return true;
    }

    let d1 = cross(s2.a, s2.b, s1.a).signum();
    let d2 = cross(s2.a, s2.b, s1.b).signum();
    let d3 = cross(s1.a, s1.b, s2.a).signum();
    let d4 = cross(s1.a, s1.b, s2.b).signum();

    if d1 == 0 && d2 == 0 {
        // Collinear supports: overlap length decides.
        return collinear_overlap_positive(s1, s2);
    }

    if shared == 1 {
        // Not collinear, one common endpoint: the two lines meet only there.
        return false;
    }

    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    // Touching configurations: an endpoint on the other segment.
    (d1 == 0 && within_box(s2.a, s2.b, s1.a))
        || (d2 == 0 && within_box(s2.a, s2.b, s1.b))
        || (d3 == 0 && within_box(s1.a, s1.b, s2.a))
        || (d4 == 0 && within_box(s1.a, s1.b, s2.b))
}

fn collinear_overlap_positive(s1: &Segment, s2: &Segment) -> bool {
    // Project onto the dominant axis of s1 (or s2 if s1 is a point).
    let dir = if s1.a != s1.b { (s1.a, s1.b) } else { (s2.a, s2.b) };
    let use_x = (dir.1.x - dir.0.x).abs() >= (dir.1.y - dir.0.y).abs();
    let key = |p: Point| if use_x { p.x } else { p.y };
    let (lo1, hi1) = minmax(key(s1.a), key(s1.b));
    let (lo2, hi2) = minmax(key(s2.a), key(s2.b));
    lo1.max(lo2) < hi1.min(hi2)
}

fn minmax(a: i64, b: i64) -> (i64, i64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Counterclockwise convex polygon with no repeated or collinear vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Validates the invariants; `None` if they fail.
    pub fn new(vertices: Vec<Point>) -> Option<Self> {
        let n = vertices.len();
        if n < 3 {
            return None;
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if a == b || orientation(a, b, c) != Orientation::Left {
                return None;
            }
        }
        // Local left turns everywhere still admit a polygon winding twice, so
        // the cyclic order must match the hull's.
        match convex_hull(&vertices) {
            Hull::Polygon(h) if h.vertices.len() == n => {
                let start = vertices.iter().position(|&v| v == h.vertices[0])?;
                let same = (0..n).all(|i| vertices[(start + i) % n] == h.vertices[i]);
                same.then_some(Self { vertices })
            }
            _ => None,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// Result of [`convex_hull`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hull {
    /// Fewer than three non-collinear input points. Holds the extreme points
    /// (zero, one or two of them).
    Degenerate(Vec<Point>),
    Polygon(ConvexPolygon),
}

/// Andrew's monotone chain. Collinear boundary points are dropped.
pub fn convex_hull(points: &[Point]) -> Hull {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return Hull::Degenerate(pts);
    }
    let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        let first = pts[0];
        let last = pts[pts.len() - 1];
        return Hull::Degenerate(vec![first, last]);
    }
    Hull::Polygon(ConvexPolygon { vertices: lower })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    OnBoundary,
    Outside,
}

pub fn point_in_convex_region(p: Point, poly: &ConvexPolygon) -> Containment {
    let mut on_edge = false;
    for e in poly.edges() {
        match cross(e.a, e.b, p).cmp(&0) {
            Ordering::Less => return Containment::Outside,
            Ordering::Equal => on_edge = true,
            Ordering::Greater => {}
        }
    }
    if on_edge {
        Containment::OnBoundary
    } else {
        Containment::Inside
    }
}

/// Closed-hull membership that also covers degenerate hulls.
pub fn hull_contains(hull: &Hull, p: Point) -> bool {
    match hull {
        Hull::Polygon(poly) => point_in_convex_region(p, poly) != Containment::Outside,
        Hull::Degenerate(pts) => match pts.as_slice() {
            [] => false,
            [a] => *a == p,
            [a, b, ..] => on_segment(&Segment::new(*a, *b), p),
        },
    }
}

/// Does closed segment `s` meet the open interior of triangle `(t0, t1, t2)`?
///
/// Separating-axis test: disjoint iff the segment lies in a closed outer
/// half-plane of some triangle side, or the whole triangle lies on one
/// closed side of the segment's line.
pub fn segment_meets_open_triangle(s: &Segment, t: [Point; 3]) -> bool {
    let mut tri = t;
    let area = cross(tri[0], tri[1], tri[2]);
    if area == 0 {
        return false;
    }
    if area < 0 {
        tri.swap(1, 2);
    }
    for i in 0..3 {
        let a = tri[i];
        let b = tri[(i + 1) % 3];
        if cross(a, b, s.a) <= 0 && cross(a, b, s.b) <= 0 {
            return false;
        }
    }
    if s.a != s.b {
        let sides: Vec<i128> = tri.iter().map(|&v| cross(s.a, s.b, v).signum()).collect();
        if sides.iter().all(|&d| d >= 0) || sides.iter().all(|&d| d <= 0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::new(x, y)
    }

    fn seg(ax: i64, ay: i64, bx: i64, by: i64) -> Segment {
        Segment::new(p(ax, ay), p(bx, by))
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(p(0, 0), p(1, 0), p(0, 1)), Orientation::Left);
        assert_eq!(orientation(p(0, 0), p(1, 0), p(2, 0)), Orientation::Collinear);
        assert_eq!(orientation(p(0, 0), p(1, 0), p(1, -1)), Orientation::Right);
    }

    #[test]
    fn crossing_examples() {
        assert!(segments_properly_cross(&seg(0, 0, 1, 1), &seg(0, 1, 1, 0)));
        assert!(!segments_properly_cross(&seg(0, 0, 1, 1), &seg(1, 1, 2, 0)));
        assert!(segments_properly_cross(&seg(0, 0, 2, 0), &seg(1, 0, 3, 0)));
    }

    #[test]
    fn crossing_degenerate_contacts() {
        // T-junction.
        assert!(segments_properly_cross(&seg(0, 0, 2, 0), &seg(1, 0, 1, 5)));
        // Collinear, touching only at a shared endpoint.
        assert!(!segments_properly_cross(&seg(0, 0, 1, 0), &seg(1, 0, 3, 0)));
        // Collinear, shared endpoint, overlapping.
        assert!(segments_properly_cross(&seg(0, 0, 2, 0), &seg(0, 0, 1, 0)));
        // Collinear and disjoint.
        assert!(!segments_properly_cross(&seg(0, 0, 1, 0), &seg(2, 0, 3, 0)));
        // Identical.
        assert!(segments_properly_cross(&seg(0, 0, 1, 1), &seg(1, 1, 0, 0)));
        // Parallel.
        assert!(!segments_properly_cross(&seg(0, 0, 2, 0), &seg(0, 1, 2, 1)));
        // Lines cross outside both segments.
        assert!(!segments_properly_cross(&seg(0, 0, 1, 0), &seg(3, -1, 3, 1)));
        // Vertical collinear overlap.
        assert!(segments_properly_cross(&seg(0, 0, 0, 4), &seg(0, 3, 0, 9)));
    }

    #[test]
    fn hull_examples() {
        let sq = [p(0, 0), p(1, 0), p(1, 1), p(0, 1)];
        match convex_hull(&sq) {
            Hull::Polygon(h) => assert_eq!(h.vertices(), &[p(0, 0), p(1, 0), p(1, 1), p(0, 1)]),
            other => panic!("unexpected {other:?}"),
        }
        match convex_hull(&[p(0, 0), p(1, 1), p(2, 2)]) {
            Hull::Degenerate(v) => assert_eq!(v, vec![p(0, 0), p(2, 2)]),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(convex_hull(&[p(3, 3)]), Hull::Degenerate(vec![p(3, 3)]));
    }

    #[test]
    fn containment_examples() {
        let sq = ConvexPolygon::new(vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2)]).unwrap();
        assert_eq!(point_in_convex_region(p(1, 1), &sq), Containment::Inside);
        assert_eq!(point_in_convex_region(p(0, 0), &sq), Containment::OnBoundary);
        assert_eq!(point_in_convex_region(p(4, 4), &sq), Containment::Outside);
    }

    #[test]
    fn polygon_validation() {
        assert!(ConvexPolygon::new(vec![p(0, 0), p(1, 0)]).is_none());
        // Clockwise.
        assert!(ConvexPolygon::new(vec![p(0, 0), p(0, 1), p(1, 1), p(1, 0)]).is_none());
        // Collinear corner.
        assert!(ConvexPolygon::new(vec![p(0, 0), p(1, 0), p(2, 0), p(1, 1)]).is_none());
        // Pentagram: every corner turns left but it winds twice.
        let star = vec![p(0, 10), p(-6, -8), p(10, 3), p(-10, 3), p(6, -8)];
        assert!(ConvexPolygon::new(star).is_none());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(p(0, 0), p(3, 4)), 5.0);
        assert_eq!(distance(p(0, 0), p(0, 0)), 0.0);
        assert_eq!(dist2(p(0, 0), p(1, 1)), 2);
        assert!((distance(p(0, 0), p(1, 1)) - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn open_triangle_meeting() {
        let t = [p(0, 0), p(4, 0), p(0, 4)];
        assert!(segment_meets_open_triangle(&seg(1, 1, 9, 9), t));
        assert!(segment_meets_open_triangle(&seg(-1, 1, 5, 1), t));
        // Along a side only.
        assert!(!segment_meets_open_triangle(&seg(0, 0, 4, 0), t));
        // Touching a vertex from outside.
        assert!(!segment_meets_open_triangle(&seg(4, 0, 8, 3), t));
        assert!(!segment_meets_open_triangle(&seg(5, 5, 9, 9), t));
        // Through a vertex into the interior.
        assert!(segment_meets_open_triangle(&seg(-1, -1, 1, 1), t));
    }
}
