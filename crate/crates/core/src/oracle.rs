//! Exact minimum-bottleneck plane bichromatic spanning trees for small
//! instances, by exhaustive search.
//!
//! The optimum is one of the red-blue distances. Feasibility at a threshold
//! is monotone, so the threshold is binary searched; each probe runs a
//! branch-and-bound over include/exclude decisions on candidate edges.

use crate::dsu::DisjointSet;
use crate::error::{Error, Result};
use crate::geom::{dist2, in_segment_interior, segments_properly_cross, Segment};
use crate::instance::Instance;

pub const DEFAULT_BOUND: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactResult {
    /// Squared optimal bottleneck.
    pub opt2: i128,
    pub witness: Vec<(usize, usize)>,
}

impl ExactResult {
    pub fn opt(&self) -> f64 {
        (self.opt2 as f64).sqrt()
    }
}

struct Search<'a> {
    n: usize,
    edges: &'a [(usize, usize)],
    /// `conflict[i][j]`: edges `i` and `j` cannot both be used.
    conflict: &'a [Vec<bool>],
}

impl Search<'_> {
    /// Can the chosen edges plus all still-compatible edges connect every
    /// point?
    fn may_connect(&self, chosen: &[usize], state: &[u8]) -> bool {
        let mut dsu = DisjointSet::new(self.n);
        for &c in chosen {
            dsu.union(self.edges[c].0, self.edges[c].1);
        }
        for (e, &s) in state.iter().enumerate() {
            if s == FREE {
                dsu.union(self.edges[e].0, self.edges[e].1);
            }
        }
        dsu.set_count() == 1
    }

    fn run(&self, chosen: &mut Vec<usize>, state: &mut Vec<u8>) -> bool {
        let mut dsu = DisjointSet::new(self.n);
        for &c in chosen.iter() {
            dsu.union(self.edges[c].0, self.edges[c].1);
        }
        if dsu.set_count() == 1 {
            return true;
        }
        if !self.may_connect(chosen, state) {
            return false;
        }
        // Largest component; ties to the smallest representative.
        let largest = (0..self.n).max_by_key(|&v| (dsu.set_size(v), std::cmp::Reverse(dsu.find(v)))).expect("n > 0");
        let root = dsu.find(largest);
        let pick = (0..self.edges.len())
            .filter(|&e| state[e] == FREE)
            .filter(|&e| {
                let (a, b) = self.edges[e];
                let (ra, rb) = (dsu.find(a), dsu.find(b));
                ra != rb && (ra == root || rb == root)
            })
            .min();
        let Some(e) = pick else {
            return false;
        };
        // Include.
        let snapshot = state.clone();
        state[e] = USED;
        for (f, s) in state.iter_mut().enumerate() {
            if *s == FREE && self.conflict[e][f] {
                *s = BLOCKED;
            }
        }
        chosen.push(e);
        // Edges that would now close a cycle are useless.
        let mut d2 = DisjointSet::new(self.n);
        for &c in chosen.iter() {
            d2.union(self.edges[c].0, self.edges[c].1);
        }
        for (f, s) in state.iter_mut().enumerate() {
            if *s == FREE && d2.same(self.edges[f].0, self.edges[f].1) {
                *s = BLOCKED;
            }
        }
        if self.run(chosen, state) {
            return true;
        }
        chosen.pop();
        *state = snapshot;
        // Exclude.
        state[e] = BLOCKED;
        let found = self.run(chosen, state);
        if !found {
            state[e] = FREE;
        }
        found
    }
}

const FREE: u8 = 0;
const USED: u8 = 1;
const BLOCKED: u8 = 2;

/// Candidate edges: red-blue pairs whose open segment holds no point,
/// shortest first.
fn candidate_edges(inst: &Instance) -> Vec<(i128, usize, usize)> {
    let mut out = Vec::new();
    for a in 0..inst.len() {
        for b in a + 1..inst.len() {
            if inst.color(a) == inst.color(b) {
                continue;
            }
            let s = Segment::new(inst.pos(a), inst.pos(b));
            if inst.points().iter().any(|p| in_segment_interior(&s, p.pos)) {
                continue;
            }
            out.push((dist2(inst.pos(a), inst.pos(b)), a, b));
        }
    }
    out.sort_unstable();
    out
}

/// Is there a plane bichromatic spanning tree using only candidate edges of
/// squared length at most `d2`? Returns a witness.
pub fn feasible_at(inst: &Instance, d2: i128) -> Option<Vec<(usize, usize)>> {
    let cands = candidate_edges(inst);
    feasible_with(inst, &cands, d2)
}

fn feasible_with(inst: &Instance, cands: &[(i128, usize, usize)], d2: i128) -> Option<Vec<(usize, usize)>> {
    let n = inst.len();
    if n == 1 {
        return Some(Vec::new());
    }
    let edges: Vec<(usize, usize)> = cands.iter().filter(|c| c.0 <= d2).map(|c| (c.1, c.2)).collect();
    let segs: Vec<Segment> = edges.iter().map(|&(a, b)| Segment::new(inst.pos(a), inst.pos(b))).collect();
    let conflict: Vec<Vec<bool>> =
        segs.iter().map(|s| segs.iter().map(|t| s != t && segments_properly_cross(s, t)).collect()).collect();
    let search = Search { n, edges: &edges, conflict: &conflict };
    let mut chosen = Vec::new();
    let mut state = vec![FREE; edges.len()];
    if search.run(&mut chosen, &mut state) {
        let mut w: Vec<(usize, usize)> = chosen.into_iter().map(|e| edges[e]).collect();
        w.sort_unstable();
        Some(w)
    } else {
        None
    }
}

/// The optimum with the default size bound.
pub fn exact_bottleneck_planar_bst(inst: &Instance) -> Result<ExactResult> {
    exact_bottleneck_planar_bst_bounded(inst, DEFAULT_BOUND)
}

pub fn exact_bottleneck_planar_bst_bounded(inst: &Instance, bound: usize) -> Result<ExactResult> {
    if inst.len() > bound {
        return Err(Error::InstanceTooLarge { n: inst.len(), bound });
    }
    inst.require_bichromatic()?;
    if inst.len() == 1 {
        return Ok(ExactResult { opt2: 0, witness: Vec::new() });
    }
    let cands = candidate_edges(inst);
    let mut levels: Vec<i128> = cands.iter().map(|c| c.0).collect();
    levels.dedup();
    let top = levels.len().checked_sub(1).ok_or(Error::Infeasible)?;
    let mut best = feasible_with(inst, &cands, levels[top]).ok_or(Error::Infeasible)?;
    let (mut lo, mut hi) = (0, top);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match feasible_with(inst, &cands, levels[mid]) {
            Some(w) => {
                best = w;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    Ok(ExactResult { opt2: levels[lo], witness: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Color, Point};
    use crate::verify::verify_tree;

    use Color::{Blue as B, Red as R};

    fn inst(pts: &[(i64, i64, Color)]) -> Instance {
        Instance::new(pts.iter().map(|&(x, y, c)| (Point::new(x, y), c)).collect(), 0).unwrap()
    }

    #[test]
    fn two_points() {
        let r = exact_bottleneck_planar_bst(&inst(&[(0, 0, R), (1, 0, B)])).unwrap();
        assert_eq!(r.opt2, 1);
        assert_eq!(r.witness, vec![(0, 1)]);
    }

    #[test]
    fn unit_square() {
        let i = inst(&[(0, 0, R), (1, 0, B), (1, 1, R), (0, 1, B)]);
        let r = exact_bottleneck_planar_bst(&i).unwrap();
        assert_eq!(r.opt2, 1);
        let rep = verify_tree(&i, &r.witness);
        assert!(rep.is_valid());
        assert_eq!(rep.bottleneck2, 1);
    }

    #[test]
    fn optimum_is_tight() {
        let i = inst(&[(0, 0, R), (2, 2, R), (0, 2, B), (2, 0, B), (1, 1, B), (1, 4, R)]);
        let r = exact_bottleneck_planar_bst(&i).unwrap();
        let rep = verify_tree(&i, &r.witness);
        assert!(rep.is_valid());
        assert_eq!(rep.bottleneck2, r.opt2);
        assert!(feasible_at(&i, r.opt2 - 1).is_none());
    }

    #[test]
    fn collinear_blocking_is_infeasible() {
        let i = inst(&[(0, 0, R), (1, 0, B), (2, 0, B), (3, 0, R)]);
        assert_eq!(exact_bottleneck_planar_bst(&i), Err(Error::Infeasible));
    }

    #[test]
    fn too_large() {
        let pts: Vec<(i64, i64, Color)> = (0..11).map(|k| (k, k * k, if k % 2 == 0 { R } else { B })).collect();
        assert_eq!(
            exact_bottleneck_planar_bst(&inst(&pts)),
            Err(Error::InstanceTooLarge { n: 11, bound: DEFAULT_BOUND })
        );
    }
}
