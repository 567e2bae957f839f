//! The bottleneck `λ` of a minimum-bottleneck bichromatic spanning tree,
//! ignoring planarity.
//!
//! Feasibility at a threshold is monotone, so `λ` is found by binary search
//! over the sorted distinct red-blue squared distances, with a union-find
//! connectivity test at each probe.

use crate::dsu::DisjointSet;
use crate::error::{Error, Result};
use crate::geom::{dist2, Color};
use crate::instance::Instance;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BottleneckResult {
    /// `λ²`, exact.
    pub lambda2: i128,
    /// A bichromatic spanning tree whose longest edge has squared length
    /// `lambda2`. Edges may cross.
    pub witness: Vec<(usize, usize)>,
}

impl BottleneckResult {
    pub fn lambda(&self) -> f64 {
        (self.lambda2 as f64).sqrt()
    }
}

fn split_colors(inst: &Instance) -> (Vec<usize>, Vec<usize>) {
    let mut reds = Vec::new();
    let mut blues = Vec::new();
    for p in inst.points() {
        match p.color {
            Color::Red => reds.push(p.index),
            Color::Blue => blues.push(p.index),
        }
    }
    (reds, blues)
}

/// All red-blue squared distances, ascending and deduplicated.
pub fn bichromatic_candidate_distances(inst: &Instance) -> Result<Vec<i128>> {
    inst.require_bichromatic()?;
    let (reds, blues) = split_colors(inst);
    let mut out = Vec::with_capacity(reds.len() * blues.len());
    for &r in &reds {
        for &b in &blues {
            out.push(dist2(inst.pos(r), inst.pos(b)));
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Is the graph of red-blue pairs at squared distance `<= d2` connected?
pub fn connected_under_threshold(inst: &Instance, d2: i128) -> bool {
    threshold_forest(inst, d2).1 == 1
}

fn threshold_forest(inst: &Instance, d2: i128) -> (Vec<(usize, usize)>, usize) {
    let (reds, blues) = split_colors(inst);
    let mut dsu = DisjointSet::new(inst.len());
    let mut edges = Vec::new();
    for &r in &reds {
        for &b in &blues {
            if dist2(inst.pos(r), inst.pos(b)) <= d2 && dsu.union(r, b) {
                edges.push((r, b));
            }
        }
    }
    (edges, dsu.set_count())
}

pub fn compute_lambda(inst: &Instance) -> Result<BottleneckResult> {
    if inst.len() == 1 {
        return Ok(BottleneckResult { lambda2: 0, witness: Vec::new() });
    }
    let cands = bichromatic_candidate_distances(inst)?;
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if connected_under_threshold(inst, cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let lambda2 = cands[lo];
    if lambda2 == 0 {
        return Err(Error::DegenerateLambda { n: inst.len() });
    }
    let (witness, comps) = threshold_forest(inst, lambda2);
    debug_assert_eq!(comps, 1);
    Ok(BottleneckResult { lambda2, witness })
}
