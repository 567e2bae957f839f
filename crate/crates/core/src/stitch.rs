//! Joining the per-cell trees into one tree.
//!
//! Final cells are visited breadth-first from cell 0. Each step connects a
//! side-adjacent or diagonally adjacent cell using a point of the current
//! component that sees the shared boundary through an empty triangle. Any
//! connection the local rules cannot make falls back to the shortest valid
//! bichromatic edge between the two cells, and a last global pass joins
//! whatever components remain.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::geom::{convex_hull, dist2, hull_contains, Point};
use crate::grid::{CellComplex, CellId, Dir};
use crate::instance::Instance;
use crate::star::{attach_external_point, StarTree};
use crate::surd::{Field, SPoint, Surd};
use crate::trace::{Label, Trace};
use crate::world::World;

/// How a final cell neighbours another.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    /// Sharing the side `d` of the source.
    Side(Dir),
    /// Across the corner `d + e`, both cells in between partitioned.
    Diagonal(Dir, Dir),
}

/// Kept cells reachable from `base` in one step.
pub fn neighbours(cx: &CellComplex, base: CellId) -> Vec<(usize, Link)> {
    let mut out = Vec::new();
    for d in Dir::ALL {
        if let Some(t) = cx.final_of(base.step(d)) {
            out.push((t, Link::Side(d)));
        }
    }
    for d in [Dir::Left, Dir::Right] {
        for e in [Dir::Down, Dir::Up] {
            let diag = base.step(d).step(e);
            if let Some(t) = cx.final_of(diag) {
                if !cx.is_kept(base.step(d)) && !cx.is_kept(base.step(e)) {
                    out.push((t, Link::Diagonal(d, e)));
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StitchStats {
    pub case1: usize,
    pub case21: usize,
    pub case221: usize,
    pub case222: usize,
    pub fallback: usize,
    pub repair: usize,
    pub sweeps: usize,
    /// Sweeps whose clipped region emptied before a point was found.
    pub sweep_brute: usize,
    pub attach_total: usize,
    pub attach_rule: usize,
}

fn dir_vec(d: Dir) -> (i128, i128) {
    (d.dx() as i128, d.dy() as i128)
}

fn along(p: SPoint, d: (i128, i128), den: i128) -> SPoint {
    p.offset(d.0, d.1, den)
}

/// `cross(y - x, q - x)` for integer `x, y`.
fn side_value(x: Point, y: Point, q: SPoint) -> Surd {
    let dx = y.x as i128 - x.x as i128;
    let dy = y.y as i128 - x.y as i128;
    (q.y - Surd::int(x.y)).times(dx) - (q.x - Surd::int(x.x)).times(dy)
}

/// Outcome of [`find_unblocked_point`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepHit {
    pub point: usize,
    /// Found by exhaustive search after the clipped sweep came up empty.
    pub brute: bool,
}

/// Sweeps a line parallel to `ab` away from it, over the candidate points
/// on the side of `inside`, and returns the first point `p` for which the
/// open triangle `p a b` meets no edge. Whenever the swept region runs
/// into an edge, the region is clipped by that edge's supporting line.
pub fn find_unblocked_point(
    world: &mut World<'_>,
    candidates: &[usize],
    inside: SPoint,
    a: SPoint,
    b: SPoint,
) -> Option<SweepHit> {
    let f = world.field().clone();
    let inst = world.instance();
    let side = f.orient(a, b, inside);
    if side == Ordering::Equal {
        return None;
    }
    let bax = b.x - a.x;
    let bay = b.y - a.y;
    let mut cands: Vec<usize> =
        candidates.iter().copied().filter(|&p| f.orient(a, b, SPoint::from_point(inst.pos(p))) == side).collect();
    let key_cmp = |p: usize, q: usize| {
        let (pp, qq) = (inst.pos(p), inst.pos(q));
        let dx = pp.x as i128 - qq.x as i128;
        let dy = pp.y as i128 - qq.y as i128;
        let s = f.sign(bax.times(dy) - bay.times(dx));
        let s = if side == Ordering::Less { s.reverse() } else { s };
        s.then(p.cmp(&q))
    };
    cands.sort_by(|&p, &q| key_cmp(p, q));
    let (af, bf) = (f.to_f64_point(a), f.to_f64_point(b));
    let sgn = if side == Ordering::Greater { 1.0 } else { -1.0 };
    let key_f = |q: Point| sgn * ((bf.0 - af.0) * (q.y as f64 - af.1) - (bf.1 - af.1) * (q.x as f64 - af.0));

    let mut clips: Vec<(Point, Point, Ordering)> = Vec::new();
    let mut rejected: HashSet<usize> = HashSet::new();
    let mut exhausted = false;
    for _ in 0..=cands.len() {
        let next = cands.iter().copied().find(|p| {
            !rejected.contains(p)
                && clips.iter().all(|&(x, y, keep)| f.sign(side_value(x, y, SPoint::from_point(inst.pos(*p)))) == keep)
        });
        let Some(p) = next else {
            exhausted = true;
            break;
        };
        let blocking = world.edges_meeting_triangle([SPoint::from_point(inst.pos(p)), a, b]);
        if blocking.is_empty() {
            return Some(SweepHit { point: p, brute: false });
        }
        rejected.insert(p);
        let first = blocking
            .iter()
            .copied()
            .map(|e| {
                let (x, y) = world.edges()[e];
                let k = key_f(inst.pos(x)).max(0.0).min(key_f(inst.pos(y)).max(0.0));
                (k, e)
            })
            .min_by(|u, v| u.0.total_cmp(&v.0).then(u.1.cmp(&v.1)))
            .map(|(_, e)| e)
            .expect("non-empty");
        let (x, y) = world.edges()[first];
        let (px, py) = (inst.pos(x), inst.pos(y));
        let mid = f.sign(side_value(px, py, a) + side_value(px, py, b));
        if mid == Ordering::Equal {
            exhausted = true;
            break;
        }
        clips.push((px, py, mid));
    }
    if !exhausted {
        return None;
    }
    cands
        .into_iter()
        .filter(|p| !rejected.contains(p))
        .find(|&p| world.triangle_clear([SPoint::from_point(inst.pos(p)), a, b]))
        .map(|point| SweepHit { point, brute: true })
}

pub struct Stitcher<'a, 'c> {
    inst: &'a Instance,
    cx: &'c CellComplex,
    trees: &'c [StarTree],
    world: World<'a>,
    cap2: i128,
    pub stats: StitchStats,
}

impl<'a, 'c> Stitcher<'a, 'c> {
    /// `world` must already hold every star edge.
    pub fn new(inst: &'a Instance, cx: &'c CellComplex, trees: &'c [StarTree], world: World<'a>, cap2: i128) -> Self {
        Self { inst, cx, trees, world, cap2, stats: StitchStats::default() }
    }

    pub fn into_world(self) -> World<'a> {
        self.world
    }

    fn field(&self) -> Field {
        self.world.field().clone()
    }

    fn connected(&mut self, a: usize, b: usize) -> bool {
        self.world.same_component(self.trees[a].center, self.trees[b].center)
    }

    fn base(&self, c: usize) -> CellId {
        self.cx.final_cells[c].base
    }

    fn points(&self, c: usize) -> &'c [usize] {
        &self.cx.final_cells[c].points
    }

    fn sweep(&mut self, cell: usize, a: SPoint, b: SPoint) -> Option<usize> {
        self.stats.sweeps += 1;
        let inside = self.cx.frame.center(self.base(cell));
        let pts = self.points(cell);
        let hit = find_unblocked_point(&mut self.world, pts, inside, a, b)?;
        if hit.brute {
            self.stats.sweep_brute += 1;
        }
        Some(hit.point)
    }

    /// Joins `p` to the tree of `dst`, falling back to a generic edge.
    fn attach(&mut self, src: usize, p: Option<usize>, dst: usize, trace: &mut Trace) -> bool {
        if self.connected(src, dst) {
            return true;
        }
        if let Some(p) = p {
            self.stats.attach_total += 1;
            if let Ok(a) = attach_external_point(&mut self.world, &self.trees[dst], p, self.cap2) {
                if a.by_rule {
                    self.stats.attach_rule += 1;
                }
                return true;
            }
        }
        self.fallback(src, dst, trace)
    }

    /// Shortest valid edge from the component of `src` into `dst`.
    fn fallback(&mut self, src: usize, dst: usize, trace: &mut Trace) -> bool {
        let root = self.trees[src].center;
        let r = (self.cap2 as f64).sqrt() + 1.0;
        let mut cands: Vec<(i128, usize, usize)> = Vec::new();
        for &y in self.points(dst) {
            let py = self.inst.pos(y);
            let (fx, fy) = (py.x as f64, py.y as f64);
            for x in self.world.points_near((fx - r, fy - r), (fx + r, fy + r)) {
                if self.inst.color(x) != self.inst.color(y) && self.world.same_component(x, root) {
                    cands.push((dist2(self.inst.pos(x), py), x, y));
                }
            }
        }
        cands.sort_unstable();
        for (_, x, y) in cands {
            if self.world.can_add(x, y, self.cap2) {
                self.world.add(x, y);
                self.stats.fallback += 1;
                trace.push(Label::Fallback, format!("src={src} dst={dst} edge={x}-{y}"));
                return true;
            }
        }
        false
    }

    fn connect(&mut self, src: usize, dst: usize, link: Link, depth: u32, trace: &mut Trace) {
        if self.connected(src, dst) {
            return;
        }
        let f = self.field();
        let frame = &self.cx.frame;
        let base = self.base(src);
        match link {
            Link::Diagonal(d, e) => {
                let (dv, ev) = (dir_vec(d), dir_vec(e));
                let v = frame.corner_towards(base, d, e);
                let a = along(v, (ev.0 - dv.0, ev.1 - dv.1), 1);
                let b = along(v, (dv.0 - ev.0, dv.1 - ev.1), 1);
                let p = self.sweep(src, a, b);
                self.stats.case1 += 1;
                trace.push(Label::Case1, format!("src={src} dst={dst} p={}", opt(p)));
                self.attach(src, p, dst, trace);
            }
            Link::Side(d) => {
                let e0 = d.perp();
                let v_tr = frame.corner_towards(base, d, e0);
                let v_br = frame.corner_towards(base, d, e0.opposite());
                let Some(p) = self.sweep(src, v_br, v_tr) else {
                    self.fallback(src, dst, trace);
                    return;
                };
                let foreign = self.foreign_points(src, dst, p);
                if foreign.is_empty() {
                    self.stats.case21 += 1;
                    trace.push(Label::Case21, format!("src={src} dst={dst} p={p}"));
                    self.attach(src, Some(p), dst, trace);
                    return;
                }
                let Some(e) = self.choose_row(&f, base, d, v_tr, &foreign, trace) else {
                    self.fallback(src, dst, trace);
                    return;
                };
                self.case22(src, dst, p, d, e, &foreign, depth, trace);
            }
        }
    }

    /// Points inside the hull of `dst` plus `p` that belong to neither cell.
    fn foreign_points(&self, src: usize, dst: usize, p: usize) -> Vec<usize> {
        let mut pts: Vec<Point> = self.points(dst).iter().map(|&i| self.inst.pos(i)).collect();
        pts.push(self.inst.pos(p));
        let hull = convex_hull(&pts);
        let lo = (pts.iter().map(|q| q.x).min().unwrap() as f64, pts.iter().map(|q| q.y).min().unwrap() as f64);
        let hi = (pts.iter().map(|q| q.x).max().unwrap() as f64, pts.iter().map(|q| q.y).max().unwrap() as f64);
        self.world
            .points_near(lo, hi)
            .into_iter()
            .filter(|&q| {
                let c = self.cx.point_cell[q];
                c != src && c != dst && hull_contains(&hull, self.inst.pos(q))
            })
            .collect()
    }

    /// The perpendicular direction whose row holds the intruding points.
    fn choose_row(
        &self,
        f: &Field,
        base: CellId,
        d: Dir,
        v_tr: SPoint,
        foreign: &[usize],
        trace: &mut Trace,
    ) -> Option<Dir> {
        let row_of = |e: Dir| -> Vec<usize> {
            let u = self.cx.final_of(base.step(e));
            let ur = self.cx.final_of(base.step(d).step(e));
            foreign.iter().copied().filter(|&q| Some(self.cx.point_cell[q]) == u || Some(self.cx.point_cell[q]) == ur).collect()
        };
        let e0 = d.perp();
        let rows = [(e0, row_of(e0)), (e0.opposite(), row_of(e0.opposite()))];
        if rows.iter().map(|r| r.1.len()).sum::<usize>() != foreign.len() {
            return None;
        }
        match (rows[0].1.is_empty(), rows[1].1.is_empty()) {
            (false, true) => Some(rows[0].0),
            (true, false) => Some(rows[1].0),
            (true, true) => None,
            (false, false) => {
                // Distance from the shared side, measured along `d`.
                let (dx, dy) = dir_vec(d);
                let gap = |q: usize| {
                    let p = self.inst.pos(q);
                    let s = (Surd::int(p.x) - v_tr.x).times(dx) + (Surd::int(p.y) - v_tr.y).times(dy);
                    if f.sign(s) == Ordering::Less {
                        -s
                    } else {
                        s
                    }
                };
                let nearest = |r: &[usize]| r.iter().map(|&q| gap(q)).min_by(|x, y| f.cmp(*x, *y)).expect("non-empty");
                let (g0, g1) = (nearest(&rows[0].1), nearest(&rows[1].1));
                let pick = if f.cmp(g0, g1) != Ordering::Greater { rows[0].0 } else { rows[1].0 };
                trace.push(Label::RowChoice, format!("side={} row={}", d.tag(), pick.tag()));
                Some(pick)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn case22(&mut self, src: usize, dst: usize, p: usize, d: Dir, e: Dir, foreign: &[usize], depth: u32, trace: &mut Trace) {
        let frame = &self.cx.frame;
        let base = self.base(src);
        let (dv, ev) = (dir_vec(d), dir_vec(e));
        let v_tr = frame.corner_towards(base, d, e);
        let u = self.cx.final_of(base.step(e));
        let ur = self.cx.final_of(base.step(d).step(e));
        let intrudes = |c: Option<usize>| c.is_some_and(|c| foreign.iter().any(|&q| self.cx.point_cell[q] == c));
        if intrudes(u) {
            let u = u.expect("checked");
            let q = self.sweep(u, v_tr, along(v_tr, (dv.0 + ev.0, dv.1 + ev.1), 1));
            self.stats.case221 += 1;
            trace.push(Label::Case221, format!("src={src} dst={dst} p={p} q={}", opt(q)));
            self.attach(u, q, dst, trace);
            if depth < 4 {
                self.connect(src, u, Link::Side(e), depth + 1, trace);
            }
            if !self.connected(src, dst) {
                self.fallback(src, dst, trace);
            }
        } else if intrudes(ur) && u.is_none() {
            let ur = ur.expect("checked");
            if !self.connected(src, ur) {
                let q = self.sweep(src, v_tr, along(v_tr, (ev.0 - dv.0, ev.1 - dv.1), 1));
                self.attach(src, q, ur, trace);
            }
            let f = self.field();
            let a = along(v_tr, (3 * dv.0, 3 * dv.1), 1);
            let tri = [SPoint::from_point(self.inst.pos(p)), v_tr, a];
            let mut zs: Vec<usize> = self
                .points(ur)
                .iter()
                .copied()
                .filter(|&z| f.in_closed_triangle(SPoint::from_point(self.inst.pos(z)), tri))
                .collect();
            let height = |z: usize| {
                let q = self.inst.pos(z);
                ev.0 * q.x as i128 + ev.1 * q.y as i128
            };
            zs.sort_by_key(|&z| (height(z), z));
            let z = zs.into_iter().find(|&z| self.world.triangle_clear([SPoint::from_point(self.inst.pos(z)), v_tr, a]));
            self.stats.case222 += 1;
            trace.push(Label::Case222, format!("src={src} dst={dst} p={p} z={}", opt(z)));
            self.attach(ur, z, dst, trace);
            if !self.connected(src, dst) {
                self.fallback(src, dst, trace);
            }
        } else {
            self.fallback(src, dst, trace);
        }
    }

    /// Breadth-first connection of every final cell to cell 0, then a
    /// global repair pass.
    pub fn run(&mut self, trace: &mut Trace) -> Result<()> {
        let nf = self.cx.final_cells.len();
        if nf == 0 {
            return Ok(());
        }
        let mut queued = vec![false; nf];
        let mut queue = VecDeque::from([0]);
        queued[0] = true;
        loop {
            while let Some(c) = queue.pop_front() {
                for (t, link) in neighbours(self.cx, self.base(c)) {
                    if !self.connected(0, t) {
                        self.connect(c, t, link, 0, trace);
                    }
                    for x in [t, c] {
                        if !queued[x] && self.connected(0, x) {
                            queued[x] = true;
                            queue.push_back(x);
                        }
                    }
                }
            }
            let late: Vec<usize> = (0..nf).filter(|&x| !queued[x] && self.connected(0, x)).collect();
            if late.is_empty() {
                break;
            }
            for x in late {
                queued[x] = true;
                queue.push_back(x);
            }
        }
        self.repair(trace);
        match self.world.component_count() {
            1 => Ok(()),
            k => Err(Error::ForestRemains { components: k }),
        }
    }

    /// Adds the shortest valid edges between different components until
    /// none is left.
    fn repair(&mut self, trace: &mut Trace) {
        if self.world.component_count() == 1 {
            return;
        }
        let r = (self.cap2 as f64).sqrt() + 1.0;
        let mut cands: Vec<(i128, usize, usize)> = Vec::new();
        for x in 0..self.inst.len() {
            let px = self.inst.pos(x);
            let (fx, fy) = (px.x as f64, px.y as f64);
            for y in self.world.points_near((fx - r, fy - r), (fx + r, fy + r)) {
                if x < y && self.inst.color(x) != self.inst.color(y) {
                    cands.push((dist2(px, self.inst.pos(y)), x, y));
                }
            }
        }
        cands.sort_unstable();
        for (_, x, y) in cands {
            if self.world.can_add(x, y, self.cap2) {
                self.world.add(x, y);
                self.stats.repair += 1;
                trace.push(Label::Repair, format!("edge={x}-{y}"));
                if self.world.component_count() == 1 {
                    return;
                }
            }
        }
    }
}

fn opt(p: Option<usize>) -> String {
    p.map_or_else(|| "-".to_string(), |p| p.to_string())
}
