//! Independent checks of a claimed solution, using only the lattice
//! predicates.

use std::fmt;

use crate::dsu::DisjointSet;
use crate::geom::{in_segment_interior, segments_properly_cross, Segment};
use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingWitness {
    Edges((usize, usize), (usize, usize)),
    /// An edge running through a point that is not one of its endpoints.
    Through { edge: (usize, usize), point: usize },
}

impl fmt::Display for CrossingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossingWitness::Edges(a, b) => write!(f, "{}-{} x {}-{}", a.0, a.1, b.0, b.1),
            CrossingWitness::Through { edge, point } => write!(f, "{}-{} through {}", edge.0, edge.1, point),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeReport {
    pub is_spanning: bool,
    pub is_bichromatic: bool,
    /// Exactly when there is no crossing witness.
    pub is_planar: bool,
    pub crossing_witness: Option<CrossingWitness>,
    pub component_count: usize,
    /// Squared length of the longest edge; 0 without edges.
    pub bottleneck2: i128,
}

impl TreeReport {
    pub fn is_valid(&self) -> bool {
        self.is_spanning && self.is_bichromatic && self.is_planar
    }

    pub fn bottleneck(&self) -> f64 {
        (self.bottleneck2 as f64).sqrt()
    }
}

/// Checks `edges` against the definition of a plane bichromatic spanning
/// tree. Edges with an endpoint outside the instance make the report
/// non-spanning and are otherwise ignored.
pub fn verify_tree(inst: &Instance, edges: &[(usize, usize)]) -> TreeReport {
    let n = inst.len();
    let valid: Vec<(usize, usize)> = edges.iter().copied().filter(|&(a, b)| a < n && b < n && a != b).collect();
    let mut dsu = DisjointSet::new(n);
    let mut acyclic = true;
    for &(a, b) in &valid {
        acyclic &= dsu.union(a, b);
    }
    let component_count = dsu.set_count();
    let is_spanning = valid.len() == edges.len() && acyclic && edges.len() + 1 == n && component_count == 1;
    let is_bichromatic = valid.iter().all(|&(a, b)| inst.color(a) != inst.color(b));
    let segs: Vec<Segment> = valid.iter().map(|&(a, b)| Segment::new(inst.pos(a), inst.pos(b))).collect();
    let bottleneck2 = segs.iter().map(Segment::len2).max().unwrap_or(0);
    let mut crossing_witness = None;
    'outer: for (i, s) in segs.iter().enumerate() {
        for (j, t) in segs.iter().enumerate().skip(i + 1) {
            if segments_properly_cross(s, t) {
                crossing_witness = Some(CrossingWitness::Edges(valid[i], valid[j]));
                break 'outer;
            }
        }
        for p in inst.points() {
            if in_segment_interior(s, p.pos) {
                crossing_witness = Some(CrossingWitness::Through { edge: valid[i], point: p.index });
                break 'outer;
            }
        }
    }
    TreeReport {
        is_spanning,
        is_bichromatic,
        is_planar: crossing_witness.is_none(),
        crossing_witness,
        component_count,
        bottleneck2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Color, Point};

    use Color::{Blue as B, Red as R};

    fn inst(pts: &[(i64, i64, Color)]) -> Instance {
        Instance::new(pts.iter().map(|&(x, y, c)| (Point::new(x, y), c)).collect(), 0).unwrap()
    }

    #[test]
    fn single_edge() {
        let i = inst(&[(0, 0, R), (1, 0, B)]);
        let r = verify_tree(&i, &[(0, 1)]);
        assert!(r.is_valid());
        assert_eq!(r.bottleneck2, 1);
        assert_eq!(r.component_count, 1);
    }

    #[test]
    fn square_examples() {
        let i = inst(&[(0, 0, R), (1, 0, B), (1, 1, R), (0, 1, B)]);
        assert!(verify_tree(&i, &[(0, 1), (1, 2), (2, 3)]).is_valid());
        let cycle = verify_tree(&i, &[(0, 1), (2, 3), (0, 3), (1, 2)]);
        assert!(!cycle.is_spanning);
        let mono = verify_tree(&i, &[(0, 2), (1, 2), (2, 3)]);
        assert!(!mono.is_bichromatic);
        let forest = verify_tree(&i, &[(0, 1)]);
        assert_eq!(forest.component_count, 3);
        assert!(!verify_tree(&i, &[(0, 1), (1, 2), (2, 9)]).is_spanning);
    }

    #[test]
    fn detects_crossings_and_touching() {
        let i = inst(&[(0, 0, R), (2, 2, B), (0, 2, B), (2, 0, R)]);
        let r = verify_tree(&i, &[(0, 1), (2, 3), (0, 2)]);
        assert!(!r.is_planar);
        assert_eq!(r.crossing_witness, Some(CrossingWitness::Edges((0, 1), (2, 3))));
        let line = inst(&[(0, 0, R), (2, 0, B), (1, 0, B)]);
        let r = verify_tree(&line, &[(0, 1), (0, 2)]);
        assert!(!r.is_planar);
        assert!(r.crossing_witness.is_some());
    }
}
