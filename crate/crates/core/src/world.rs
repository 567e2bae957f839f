//! The growing global edge set with a uniform-bucket spatial index.
//!
//! Every edge the constructor adds goes through [`World::can_add`], which
//! checks it exactly against all nearby points and edges.

use std::collections::HashMap;

use crate::dsu::DisjointSet;
use crate::geom::{on_segment, segments_properly_cross, Point, Segment};
use crate::instance::Instance;
use crate::surd::{Field, SPoint};

type Key = (i64, i64);

pub struct World<'a> {
    inst: &'a Instance,
    field: Field,
    bucket: f64,
    edges: Vec<(usize, usize)>,
    edge_buckets: HashMap<Key, Vec<usize>>,
    point_buckets: HashMap<Key, Vec<usize>>,
    dsu: DisjointSet,
    stamp: Vec<u32>,
    epoch: u32,
}

impl<'a> World<'a> {
    /// `bucket` is the side of an index bucket in lattice units; `field`
    /// evaluates triangle predicates with grid-derived corners.
    pub fn new(inst: &'a Instance, field: Field, bucket: f64) -> Self {
        let bucket = if bucket.is_finite() && bucket > 0.0 { bucket } else { 1.0 };
        let mut point_buckets: HashMap<Key, Vec<usize>> = HashMap::new();
        for p in inst.points() {
            point_buckets.entry(Self::key_of(bucket, p.pos.x as f64, p.pos.y as f64)).or_default().push(p.index);
        }
        Self {
            inst,
            field,
            bucket,
            edges: Vec::new(),
            edge_buckets: HashMap::new(),
            point_buckets,
            dsu: DisjointSet::new(inst.len()),
            stamp: Vec::new(),
            epoch: 0,
        }
    }

    fn key_of(bucket: f64, x: f64, y: f64) -> Key {
        ((x / bucket).floor() as i64, (y / bucket).floor() as i64)
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn segment(&self, e: (usize, usize)) -> Segment {
        Segment::new(self.inst.pos(e.0), self.inst.pos(e.1))
    }

    pub fn same_component(&mut self, a: usize, b: usize) -> bool {
        self.dsu.same(a, b)
    }

    pub fn component(&mut self, a: usize) -> usize {
        self.dsu.find(a)
    }

    pub fn component_count(&self) -> usize {
        self.dsu.set_count()
    }

    fn keys_in(&self, lo: (f64, f64), hi: (f64, f64)) -> impl Iterator<Item = Key> {
        let pad = 1e-9 * (lo.0.abs().max(lo.1.abs()).max(hi.0.abs()).max(hi.1.abs())) + 1.0;
        let a = Self::key_of(self.bucket, lo.0 - pad, lo.1 - pad);
        let b = Self::key_of(self.bucket, hi.0 + pad, hi.1 + pad);
        (a.0..=b.0).flat_map(move |x| (a.1..=b.1).map(move |y| (x, y)))
    }

    fn bbox(pts: &[(f64, f64)]) -> ((f64, f64), (f64, f64)) {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        (lo, hi)
    }

    /// Edge indices whose buckets meet the box, each once.
    fn edges_near(&mut self, lo: (f64, f64), hi: (f64, f64)) -> Vec<usize> {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.stamp.resize(self.edges.len(), 0);
        let mut out = Vec::new();
        let keys: Vec<Key> = self.keys_in(lo, hi).collect();
        for k in keys {
            if let Some(list) = self.edge_buckets.get(&k) {
                for &e in list {
                    if self.stamp[e] != self.epoch {
                        self.stamp[e] = self.epoch;
                        out.push(e);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Points whose buckets meet the box.
    pub fn points_near(&self, lo: (f64, f64), hi: (f64, f64)) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.keys_in(lo, hi).filter_map(|k| self.point_buckets.get(&k)).flatten().copied().collect();
        out.sort_unstable();
        out
    }

    fn point_box(&self, pts: &[Point]) -> ((f64, f64), (f64, f64)) {
        let v: Vec<(f64, f64)> = pts.iter().map(|p| (p.x as f64, p.y as f64)).collect();
        Self::bbox(&v)
    }

    /// Does the segment pass through a point other than its endpoints, or
    /// cross an existing edge?
    pub fn segment_blocked(&mut self, a: usize, b: usize) -> bool {
        let s = Segment::new(self.inst.pos(a), self.inst.pos(b));
        let (lo, hi) = self.point_box(&[s.a, s.b]);
        for q in self.points_near(lo, hi) {
            if q != a && q != b && on_segment(&s, self.inst.pos(q)) {
                return true;
            }
        }
        for e in self.edges_near(lo, hi) {
            if segments_properly_cross(&s, &self.segment(self.edges[e])) {
                return true;
            }
        }
        false
    }

    /// Could `(a, b)` join the tree: bichromatic, short enough, joining two
    /// components, touching nothing?
    pub fn can_add(&mut self, a: usize, b: usize, cap2: i128) -> bool {
        a != b
            && self.inst.color(a) != self.inst.color(b)
            && Segment::new(self.inst.pos(a), self.inst.pos(b)).len2() <= cap2
            && !self.dsu.same(a, b)
            && !self.segment_blocked(a, b)
    }

    /// Adds an edge without checks. Returns false if it closes a cycle.
    pub fn add(&mut self, a: usize, b: usize) -> bool {
        if !self.dsu.union(a, b) {
            return false;
        }
        let idx = self.edges.len();
        self.edges.push((a, b));
        let (lo, hi) = self.point_box(&[self.inst.pos(a), self.inst.pos(b)]);
        let keys: Vec<Key> = {
            let a = Self::key_of(self.bucket, lo.0, lo.1);
            let b = Self::key_of(self.bucket, hi.0, hi.1);
            (a.0..=b.0).flat_map(|x| (a.1..=b.1).map(move |y| (x, y))).collect()
        };
        for k in keys {
            self.edge_buckets.entry(k).or_default().push(idx);
        }
        true
    }

    /// Edges meeting the open interior of the triangle.
    pub fn edges_meeting_triangle(&mut self, t: [SPoint; 3]) -> Vec<usize> {
        let v: Vec<(f64, f64)> = t.iter().map(|p| self.field.to_f64_point(*p)).collect();
        let (lo, hi) = Self::bbox(&v);
        let cands = self.edges_near(lo, hi);
        cands
            .into_iter()
            .filter(|&e| {
                let (a, b) = self.edges[e];
                self.field.segment_meets_open_triangle(
                    SPoint::from_point(self.inst.pos(a)),
                    SPoint::from_point(self.inst.pos(b)),
                    t,
                )
            })
            .collect()
    }

    pub fn triangle_clear(&mut self, t: [SPoint; 3]) -> bool {
        self.edges_meeting_triangle(t).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Color;

    fn inst() -> Instance {
        let pts = vec![
            (Point::new(0, 0), Color::Red),
            (Point::new(4, 4), Color::Blue),
            (Point::new(0, 4), Color::Blue),
            (Point::new(4, 0), Color::Red),
            (Point::new(2, 2), Color::Red),
        ];
        Instance::new(pts, 0).unwrap()
    }

    #[test]
    fn blocks_points_and_crossings() {
        let i = inst();
        let mut w = World::new(&i, Field::new(2), 1.5);
        // (0,0)-(4,4) runs through (2,2).
        assert!(!w.can_add(0, 1, 100));
        assert!(w.can_add(2, 3, 100) || w.segment_blocked(2, 3));
        assert!(w.can_add(4, 2, 100));
        assert!(w.add(4, 2));
        assert!(w.can_add(3, 1, 100));
        assert!(w.add(3, 1));
        // (0,0)-(0,4) is fine; (2,2)-(4,4) then closes nothing new.
        assert!(w.can_add(0, 2, 100));
        assert!(!w.can_add(0, 2, 15));
    }

    #[test]
    fn triangle_queries() {
        let i = inst();
        let mut w = World::new(&i, Field::new(2), 1.0);
        w.add(0, 2);
        let t = [Point::new(-1, 1), Point::new(1, 1), Point::new(0, 3)].map(SPoint::from_point);
        assert_eq!(w.edges_meeting_triangle(t), vec![0]);
        let far = [Point::new(3, 1), Point::new(5, 1), Point::new(4, 3)].map(SPoint::from_point);
        assert!(w.triangle_clear(far));
    }
}
