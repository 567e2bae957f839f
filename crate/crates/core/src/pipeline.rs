//! The full construction: bottleneck, cell partition, per-cell stars, and
//! stitching.

use crate::bottleneck::compute_lambda;
use crate::error::{Error, Result};
use crate::grid::{partition, CellComplex, PartitionOptions};
use crate::instance::Instance;
use crate::star::{build_star_tree, StarTree};
use crate::stitch::{StitchStats, Stitcher};
use crate::trace::Trace;
use crate::world::World;

/// Every edge is at most `√BOUND_FACTOR2 · λ`, that is `8√2·λ`.
pub const BOUND_FACTOR2: i128 = 128;
/// Edges inside one final cell are at most `5√2·λ`.
pub const CELL_FACTOR2: i128 = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub partition: PartitionOptions,
}

impl SolveOptions {
    pub fn with_offset_seed(seed: Option<u64>) -> Self {
        Self { partition: PartitionOptions { offset_seed: seed, ..PartitionOptions::default() } }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub lambda2: i128,
    /// Star edges first, then the stitching edges in insertion order.
    pub edges: Vec<(usize, usize)>,
    pub star_edges: usize,
    pub complex: Option<CellComplex>,
    pub trees: Vec<StarTree>,
    pub stats: StitchStats,
    pub trace: Trace,
}

impl Solution {
    pub fn lambda(&self) -> f64 {
        (self.lambda2 as f64).sqrt()
    }

    pub fn stitch_edges(&self) -> &[(usize, usize)] {
        &self.edges[self.star_edges..]
    }
}

pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<Solution> {
    inst.require_bichromatic()?;
    let bn = compute_lambda(inst)?;
    let lambda2 = bn.lambda2;
    let mut trace = Trace::new();
    if inst.len() == 1 {
        return Ok(Solution {
            lambda2,
            edges: Vec::new(),
            star_edges: 0,
            complex: None,
            trees: Vec::new(),
            stats: StitchStats::default(),
            trace,
        });
    }
    let cx = partition(inst, lambda2, opts.partition, &mut trace)?;
    let trees = cx
        .final_cells
        .iter()
        .map(|fc| build_star_tree(inst, &fc.points))
        .collect::<Result<Vec<_>>>()?;
    let bucket = 3.0 * cx.frame.field.lambda_f64();
    let mut world = World::new(inst, cx.frame.field.clone(), bucket);
    let cap2 = BOUND_FACTOR2 * lambda2;
    for (c, t) in trees.iter().enumerate() {
        for &(a, b) in &t.edges {
            if world.segment_blocked(a, b) || !world.add(a, b) {
                return Err(Error::invariant("stars", format!("edge {a}-{b} of cell {c} meets another cell's tree")));
            }
        }
    }
    let star_edges = world.edges().len();
    let mut stitcher = Stitcher::new(inst, &cx, &trees, world, cap2);
    stitcher.run(&mut trace)?;
    let stats = stitcher.stats;
    let edges = stitcher.into_world().edges().to_vec();
    Ok(Solution { lambda2, edges, star_edges, complex: Some(cx), trees, stats, trace })
}
