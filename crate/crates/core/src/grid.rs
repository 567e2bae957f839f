//! Stage one: turn the `3λ` grid into convex bichromatic cells.
//!
//! Monochromatic cells are either kept or partitioned into four trapezoids
//! that merge into their side neighbours. Facing trapezoids of two adjacent
//! partitioned cells form a lune; lune corners are handed to the kept cells
//! around the shared grid vertex. The result is a list of [`FinalCell`]s,
//! each bichromatic and of diameter at most `5√2·λ`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{dist2, Color, Point};
use crate::instance::Instance;
use crate::surd::{Field, SPoint, Surd};
use crate::trace::{Label, Trace};

/// Offsets are multiples of `λ / 7000`.
pub const OFFSET_DEN: i128 = 7000;
/// Default offset `λ/7`.
pub const DEFAULT_OFFSET: i128 = 1000;
/// Offsets cycle through `λ/7 + k/1000·λ` for `k` in `0..OFFSET_SLOTS`.
pub const OFFSET_SLOTS: u64 = 2857;
/// Slot stride between attempts; coprime to [`OFFSET_SLOTS`], so every slot
/// is eventually visited, and successive offsets differ by about `1.1λ`.
pub const OFFSET_STRIDE: u64 = 1103;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Left,
    Right,
    Down,
    Up,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Left, Dir::Right, Dir::Down, Dir::Up];

    pub fn dx(self) -> i64 {
        match self {
            Dir::Left => -1,
            Dir::Right => 1,
            _ => 0,
        }
    }

    pub fn dy(self) -> i64 {
        match self {
            Dir::Down => -1,
            Dir::Up => 1,
            _ => 0,
        }
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }

    /// The positive perpendicular: up for horizontal sides, right for
    /// vertical ones.
    pub fn perp(self) -> Dir {
        match self {
            Dir::Left | Dir::Right => Dir::Up,
            Dir::Down | Dir::Up => Dir::Right,
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Dir::Left | Dir::Right)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Dir::Left => "l",
            Dir::Right => "r",
            Dir::Down => "b",
            Dir::Up => "t",
        }
    }
}

/// Grid cell coordinates. Ordered by row, then column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId {
    pub row: i64,
    pub col: i64,
}

impl CellId {
    pub const fn new(col: i64, row: i64) -> Self {
        Self { row, col }
    }

    pub fn step(self, d: Dir) -> CellId {
        CellId::new(self.col + d.dx(), self.row + d.dy())
    }

    pub fn offset(self, dc: i64, dr: i64) -> CellId {
        CellId::new(self.col + dc, self.row + dr)
    }

    /// Chessboard parity; white cells are partitioned in step 2.
    pub fn is_white(self) -> bool {
        (self.col + self.row).rem_euclid(2) == 0
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.col, self.row)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Bichromatic,
    Mono(Color),
    Empty,
}

impl CellKind {
    pub fn tag(self) -> &'static str {
        match self {
            CellKind::Bichromatic => "bichromatic",
            CellKind::Mono(Color::Red) => "mono-red",
            CellKind::Mono(Color::Blue) => "mono-blue",
            CellKind::Empty => "empty",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    /// Kept and bichromatic from the start.
    Original,
    /// Kept monochromatic cell.
    Extended,
    /// Partitioned in the given step.
    Partitioned(u8),
}

impl CellStatus {
    pub fn is_kept(self) -> bool {
        !matches!(self, CellStatus::Partitioned(_))
    }

    pub fn tag(self) -> String {
        match self {
            CellStatus::Original => "original".into(),
            CellStatus::Extended => "extended".into(),
            CellStatus::Partitioned(s) => format!("partitioned@{s}"),
        }
    }
}

/// The grid: origin, cell side `3λ`, and extent. Cells outside
/// `[0, cols) × [0, rows)` do not exist; the outermost ring is empty.
#[derive(Clone, Debug)]
pub struct GridFrame {
    pub field: Field,
    pub lambda2: i128,
    pub origin: SPoint,
    /// The origin sits `(offset / 7000 + 3)·λ` below and left of the
    /// bounding-box minimum.
    pub offset: i128,
    pub cols: i64,
    pub rows: i64,
}

fn lam(num: i128, den: i128) -> Surd {
    Surd::lambda_ratio(num, den)
}

impl GridFrame {
    /// `None` if some point would lie on a line `x` or `y = origin + k·λ`.
    pub fn new(inst: &Instance, lambda2: i128, offset: i128) -> Option<Self> {
        let field = Field::new(lambda2);
        let min_x = inst.points().iter().map(|p| p.pos.x).min().unwrap_or(0);
        let min_y = inst.points().iter().map(|p| p.pos.y).min().unwrap_or(0);
        let shift = lam(offset + 3 * OFFSET_DEN, OFFSET_DEN);
        let origin = SPoint::new(Surd::int(min_x) - shift, Surd::int(min_y) - shift);
        let mut frame = Self { field, lambda2, origin, offset, cols: 0, rows: 0 };
        let (mut max_c, mut max_r) = (0, 0);
        for p in inst.points() {
            let (dx, dy) = frame.rel(p.pos);
            for d in [dx, dy] {
                let k = frame.field.floor_div(d, lam(1, 1));
                if frame.field.sign(d - lam(k as i128, 1)) == Ordering::Equal {
                    return None;
                }
            }
            let c = frame.cell_of(p.pos);
            max_c = max_c.max(c.col);
            max_r = max_r.max(c.row);
        }
        frame.cols = max_c + 2;
        frame.rows = max_r + 2;
        Some(frame)
    }

    pub fn lambda(&self) -> Surd {
        lam(1, 1)
    }

    pub fn side(&self) -> Surd {
        lam(3, 1)
    }

    fn rel(&self, p: Point) -> (Surd, Surd) {
        (Surd::int(p.x) - self.origin.x, Surd::int(p.y) - self.origin.y)
    }

    pub fn cell_of(&self, p: Point) -> CellId {
        let (dx, dy) = self.rel(p);
        CellId::new(self.field.floor_div(dx, self.side()), self.field.floor_div(dy, self.side()))
    }

    pub fn contains(&self, c: CellId) -> bool {
        (0..self.cols).contains(&c.col) && (0..self.rows).contains(&c.row)
    }

    /// Grid vertex `(col, row)`.
    pub fn vertex(&self, col: i64, row: i64) -> SPoint {
        SPoint::new(self.origin.x + lam(3 * col as i128, 1), self.origin.y + lam(3 * row as i128, 1))
    }

    /// Bottom-left corner plus `(dx, dy)·λ/den`.
    pub fn cell_point(&self, c: CellId, dx: i128, dy: i128, den: i128) -> SPoint {
        self.vertex(c.col, c.row).offset(dx, dy, den)
    }

    /// Corners counterclockwise from bottom-left.
    pub fn square(&self, c: CellId) -> [SPoint; 4] {
        [
            self.cell_point(c, 0, 0, 1),
            self.cell_point(c, 3, 0, 1),
            self.cell_point(c, 3, 3, 1),
            self.cell_point(c, 0, 3, 1),
        ]
    }

    pub fn center(&self, c: CellId) -> SPoint {
        self.cell_point(c, 3, 3, 2)
    }

    /// Local coordinates of `p` inside cell `c`.
    pub fn local(&self, p: Point, c: CellId) -> (Surd, Surd) {
        let corner = self.vertex(c.col, c.row);
        (Surd::int(p.x) - corner.x, Surd::int(p.y) - corner.y)
    }

    /// Trapezoid on side `d` of cell `c`, counterclockwise.
    pub fn trapezoid(&self, c: CellId, d: Dir) -> [SPoint; 4] {
        let p = |x: i128, y: i128| self.cell_point(c, x, y, 1);
        match d {
            Dir::Left => [p(0, 0), p(1, 1), p(1, 2), p(0, 3)],
            Dir::Right => [p(3, 0), p(3, 3), p(2, 2), p(2, 1)],
            Dir::Down => [p(0, 0), p(3, 0), p(2, 1), p(1, 1)],
            Dir::Up => [p(0, 3), p(1, 2), p(2, 2), p(3, 3)],
        }
    }

    /// Grid vertex of `c` in the quadrant `d + e` for perpendicular `d, e`.
    pub fn corner_towards(&self, c: CellId, d: Dir, e: Dir) -> SPoint {
        let ox = i64::from(d.dx() + e.dx() > 0);
        let oy = i64::from(d.dy() + e.dy() > 0);
        self.vertex(c.col + ox, c.row + oy)
    }

    /// The corner triangle of trapezoid `d` of `c` at end `e`.
    pub fn end_triangle(&self, c: CellId, d: Dir, e: Dir) -> [SPoint; 3] {
        let v = self.corner_towards(c, d, e);
        let back = |k: i128, dir: Dir| (-(dir.dx() as i128) * k, -(dir.dy() as i128) * k);
        let (ex, ey) = back(1, e);
        let (dx, dy) = back(1, d);
        [v, v.offset(ex, ey, 1), v.offset(ex + dx, ey + dy, 1)]
    }
}

/// Where a point sits inside its grid cell.
#[derive(Clone, Copy, Debug)]
pub struct PointLoc {
    pub cell: CellId,
    pub u: Surd,
    pub v: Surd,
    /// Sub-cell column and row, each in `0..3`.
    pub su: u8,
    pub sv: u8,
}

impl PointLoc {
    pub fn in_center(&self) -> bool {
        self.su == 1 && self.sv == 1
    }

    /// Sub-cell number, 1 to 9, row-major from the top-left.
    pub fn subcell(&self) -> u8 {
        (2 - self.sv) * 3 + self.su + 1
    }
}

#[derive(Clone, Debug)]
pub struct GridCell {
    pub id: CellId,
    pub kind: CellKind,
    pub status: CellStatus,
    pub points: Vec<usize>,
}

/// Directed edges between side-adjacent monochromatic cells of different
/// colors whose source trapezoid facing the target is non-empty.
#[derive(Clone, Debug, Default)]
pub struct MonoDigraph {
    out: BTreeMap<CellId, BTreeSet<CellId>>,
    inn: BTreeMap<CellId, BTreeSet<CellId>>,
}

impl MonoDigraph {
    pub fn add(&mut self, from: CellId, to: CellId) {
        self.out.entry(from).or_default().insert(to);
        self.inn.entry(to).or_default().insert(from);
    }

    pub fn edges(&self) -> Vec<(CellId, CellId)> {
        self.out.iter().flat_map(|(a, bs)| bs.iter().map(move |b| (*a, *b))).collect()
    }

    pub fn d_in(&self, c: CellId) -> usize {
        self.inn.get(&c).map_or(0, |s| s.len())
    }

    pub fn d_out(&self, c: CellId) -> usize {
        self.out.get(&c).map_or(0, |s| s.len())
    }

    pub fn targets(&self, c: CellId) -> Vec<CellId> {
        self.out.get(&c).map(|s| s.iter().copied().collect()).unwrap_or_default()
    }

    pub fn remove_outgoing(&mut self, c: CellId) {
        if let Some(ts) = self.out.remove(&c) {
            for t in ts {
                if let Some(s) = self.inn.get_mut(&t) {
                    s.remove(&c);
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceKind {
    /// A whole trapezoid of a partitioned side neighbour.
    Trapezoid,
    /// The corner triangle of a lune next to this cell.
    EndTriangle(Dir),
    /// Lune corner points from the diagonal cell, all within `λ` of the
    /// shared grid vertex.
    Disk(Dir),
}

/// Points handed to a kept cell by a partitioned one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub from: CellId,
    /// Side of `from` the piece belongs to.
    pub side: Dir,
    pub kind: PieceKind,
    pub points: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct FinalCell {
    pub id: usize,
    pub base: CellId,
    /// Convex hull of the absorbed area, counterclockwise.
    pub region: Vec<SPoint>,
    pub points: Vec<usize>,
    pub pieces: Vec<Piece>,
}

/// Everything stage one produces.
#[derive(Clone, Debug)]
pub struct CellComplex {
    pub frame: GridFrame,
    /// Non-empty grid cells in scan order.
    pub cells: Vec<GridCell>,
    pub initial_edges: Vec<(CellId, CellId)>,
    pub final_cells: Vec<FinalCell>,
    /// Final cell of each point.
    pub point_cell: Vec<usize>,
    kept: BTreeMap<CellId, usize>,
}

impl CellComplex {
    pub fn final_of(&self, c: CellId) -> Option<usize> {
        self.kept.get(&c).copied()
    }

    pub fn is_kept(&self, c: CellId) -> bool {
        self.kept.contains_key(&c)
    }

    /// Versioned text dump, one cell per line.
    pub fn dump(&self) -> String {
        let f = &self.frame.field;
        let mut out = format!(
            "bpst-cells v1 lambda2={} offset={}/{} cols={} rows={}\n",
            self.frame.lambda2, self.frame.offset, OFFSET_DEN, self.frame.cols, self.frame.rows
        );
        let ids = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        for c in &self.cells {
            out.push_str(&format!(
                "cell {} {} {} points={}\n",
                c.id,
                c.kind.tag(),
                c.status.tag(),
                ids(&c.points)
            ));
        }
        for fc in &self.final_cells {
            let region: Vec<String> = fc
                .region
                .iter()
                .map(|p| {
                    let (x, y) = f.to_f64_point(*p);
                    format!("{x:.3}:{y:.3}")
                })
                .collect();
            out.push_str(&format!(
                "final {} base={} points={} region={}\n",
                fc.id,
                fc.base,
                ids(&fc.points),
                region.join(";")
            ));
        }
        out
    }
}

/// Stage-one state, exposed step by step.
pub struct Stage1<'a> {
    inst: &'a Instance,
    pub frame: GridFrame,
    pub locs: Vec<PointLoc>,
    cells: BTreeMap<CellId, GridCell>,
    trap: BTreeMap<usize, Dir>,
    pub digraph: MonoDigraph,
    initial_edges: Vec<(CellId, CellId)>,
    decided: BTreeMap<CellId, CellStatus>,
}

impl<'a> Stage1<'a> {
    /// Locates points, classifies cells and builds the digraph.
    pub fn new(inst: &'a Instance, frame: GridFrame) -> Result<Self> {
        let f = &frame.field;
        let lam1 = frame.lambda();
        let mut locs = Vec::with_capacity(inst.len());
        let mut cells: BTreeMap<CellId, GridCell> = BTreeMap::new();
        for p in inst.points() {
            let cell = frame.cell_of(p.pos);
            let (u, v) = frame.local(p.pos, cell);
            let su = f.floor_div(u, lam1).clamp(0, 2) as u8;
            let sv = f.floor_div(v, lam1).clamp(0, 2) as u8;
            locs.push(PointLoc { cell, u, v, su, sv });
            cells
                .entry(cell)
                .or_insert_with(|| GridCell { id: cell, kind: CellKind::Empty, status: CellStatus::Original, points: vec![] })
                .points
                .push(p.index);
        }
        for c in cells.values_mut() {
            let red = c.points.iter().any(|&i| inst.color(i) == Color::Red);
            let blue = c.points.iter().any(|&i| inst.color(i) == Color::Blue);
            c.kind = match (red, blue) {
                (true, true) => CellKind::Bichromatic,
                (true, false) => CellKind::Mono(Color::Red),
                (false, true) => CellKind::Mono(Color::Blue),
                (false, false) => CellKind::Empty,
            };
        }
        let mut stage = Self {
            inst,
            frame,
            locs,
            cells,
            trap: BTreeMap::new(),
            digraph: MonoDigraph::default(),
            initial_edges: vec![],
            decided: BTreeMap::new(),
        };
        for c in stage.cells.values() {
            if c.kind == CellKind::Bichromatic {
                stage.decided.insert(c.id, CellStatus::Original);
            }
        }
        let mono: Vec<CellId> =
            stage.cells.values().filter(|c| matches!(c.kind, CellKind::Mono(_))).map(|c| c.id).collect();
        for &c in &mono {
            let pts = stage.cells[&c].points.clone();
            for i in pts {
                if stage.locs[i].in_center() {
                    return Err(Error::invariant(
                        "grid",
                        format!("point {i} lies in the central sub-cell of monochromatic cell {c}"),
                    ));
                }
                let t = stage.trapezoid_of(i);
                stage.trap.insert(i, t);
            }
        }
        stage.build_mono_digraph();
        Ok(stage)
    }

    /// Side whose trapezoid holds point `i`; ties go to the first of
    /// left, right, bottom, top.
    pub fn trapezoid_of(&self, i: usize) -> Dir {
        let loc = &self.locs[i];
        let s = self.frame.side();
        let cands = [(Dir::Left, loc.u), (Dir::Right, s - loc.u), (Dir::Down, loc.v), (Dir::Up, s - loc.v)];
        let mut best = cands[0];
        for c in &cands[1..] {
            if self.frame.field.cmp(c.1, best.1) == Ordering::Less {
                best = *c;
            }
        }
        best.0
    }

    fn kind(&self, c: CellId) -> CellKind {
        self.cells.get(&c).map_or(CellKind::Empty, |g| g.kind)
    }

    fn build_mono_digraph(&mut self) {
        let mut g = MonoDigraph::default();
        for c in self.cells.values() {
            let CellKind::Mono(color) = c.kind else { continue };
            for d in Dir::ALL {
                let n = c.id.step(d);
                if self.kind(n) != CellKind::Mono(color.other()) {
                    continue;
                }
                if c.points.iter().any(|i| self.trap.get(i) == Some(&d)) {
                    g.add(c.id, n);
                }
            }
        }
        self.initial_edges = g.edges();
        self.digraph = g;
    }

    pub fn status(&self, c: CellId) -> Option<CellStatus> {
        match self.kind(c) {
            CellKind::Empty => Some(CellStatus::Partitioned(3)),
            _ => self.decided.get(&c).copied(),
        }
    }

    fn is_kept(&self, c: CellId) -> bool {
        self.status(c).is_some_and(|s| s.is_kept())
    }

    fn undecided_mono(&self) -> impl Iterator<Item = CellId> + '_ {
        self.cells
            .values()
            .filter(|c| matches!(c.kind, CellKind::Mono(_)) && !self.decided.contains_key(&c.id))
            .map(|c| c.id)
    }

    /// Repeatedly partitions a cell with no incoming and some outgoing
    /// edges. Its targets are kept from then on and their outgoing edges
    /// are dropped along with its own.
    pub fn apply_step1(&mut self, trace: &mut Trace) {
        loop {
            let next = self.undecided_mono().find(|&c| self.digraph.d_in(c) == 0 && self.digraph.d_out(c) > 0);
            let Some(a) = next else { break };
            self.decided.insert(a, CellStatus::Partitioned(1));
            let targets = self.digraph.targets(a);
            self.digraph.remove_outgoing(a);
            for &b in &targets {
                self.decided.entry(b).or_insert(CellStatus::Extended);
                self.digraph.remove_outgoing(b);
            }
            let kept: Vec<String> = targets.iter().map(|t| t.to_string()).collect();
            trace.push(Label::Step1, format!("cell={a} kept={}", kept.join(",")));
        }
    }

    /// Cells still carrying incoming edges: white ones are partitioned,
    /// black ones kept.
    pub fn apply_step2(&mut self, trace: &mut Trace) {
        let cands: Vec<CellId> = self.undecided_mono().filter(|&c| self.digraph.d_in(c) > 0).collect();
        for c in cands {
            if c.is_white() {
                self.decided.insert(c, CellStatus::Partitioned(2));
                trace.push(Label::Step2, format!("cell={c} partitioned"));
            } else {
                self.decided.insert(c, CellStatus::Extended);
                trace.push(Label::Step2, format!("cell={c} kept"));
            }
        }
    }

    /// Everything still undecided is partitioned, as is every empty cell.
    pub fn apply_step3(&mut self, trace: &mut Trace) {
        let rest: Vec<CellId> = self.undecided_mono().collect();
        for c in rest {
            self.decided.insert(c, CellStatus::Partitioned(3));
            trace.push(Label::Step3, format!("cell={c}"));
        }
        let empty = self.frame.cols * self.frame.rows - self.cells.len() as i64;
        trace.push(Label::Step3, format!("empty-cells={empty}"));
    }

    /// Hands every point of a partitioned cell to a kept cell.
    pub fn eliminate_lunes(&mut self, trace: &mut Trace) -> Result<BTreeMap<CellId, Vec<Piece>>> {
        let mut pieces: BTreeMap<CellId, Vec<Piece>> = BTreeMap::new();
        // Lune (lower/left cell, upper/right cell) -> points at the
        // negative and positive ends.
        let mut lunes: BTreeMap<(CellId, CellId), [usize; 2]> = BTreeMap::new();
        let partitioned: Vec<CellId> = self
            .cells
            .values()
            .filter(|c| matches!(self.decided.get(&c.id), Some(CellStatus::Partitioned(_))))
            .map(|c| c.id)
            .collect();
        for x in partitioned {
            let pts = self.cells[&x].points.clone();
            for i in pts {
                let d = self.trap[&i];
                let n = x.step(d);
                if !self.frame.contains(n) {
                    return Err(Error::invariant("grid", format!("half-lune beyond cell {x} holds point {i}")));
                }
                if self.is_kept(n) {
                    push_piece(&mut pieces, n, x, d, PieceKind::Trapezoid, i);
                    continue;
                }
                let loc = self.locs[i];
                let w = if d.is_horizontal() { loc.sv } else { loc.su };
                if w == 1 {
                    return Err(Error::invariant("grid", format!("centre of the lune {x}|{n} holds point {i}")));
                }
                let e = if w == 2 { d.perp() } else { d.perp().opposite() };
                let key = if matches!(d, Dir::Right | Dir::Up) { (x, n) } else { (n, x) };
                lunes.entry(key).or_default()[usize::from(w == 2)] += 1;
                let own = x.step(e);
                let diag = n.step(e);
                if self.is_kept(own) {
                    push_piece(&mut pieces, own, x, d, PieceKind::EndTriangle(e), i);
                } else if self.is_kept(diag) {
                    let v = self.frame.corner_towards(x, d, e);
                    let p = SPoint::from_point(self.inst.pos(i));
                    if self.frame.field.cmp_dist2_lambda2(p, v, 1) == Ordering::Greater {
                        return Err(Error::invariant(
                            "grid",
                            format!("point {i} of lune {x}|{n} is farther than λ from the vertex it joins"),
                        ));
                    }
                    push_piece(&mut pieces, diag, x, d, PieceKind::Disk(e), i);
                } else {
                    return Err(Error::invariant(
                        "grid",
                        format!("corner of lune {x}|{n} between two partitioned flanks holds point {i}"),
                    ));
                }
            }
        }
        for ((a, b), counts) in &lunes {
            let d = if a.row == b.row { Dir::Right } else { Dir::Up };
            for (slot, e) in [d.perp().opposite(), d.perp()].into_iter().enumerate() {
                let label = match (self.is_kept(a.step(e)), self.is_kept(b.step(e))) {
                    (true, true) => Label::LuneA,
                    (false, true) => Label::LuneB,
                    (true, false) => Label::LuneC,
                    (false, false) => Label::LuneD,
                };
                trace.push(label, format!("cells={a}|{b} end={} moved={}", e.tag(), counts[slot]));
            }
        }
        let boundary = 2 * (self.frame.cols + self.frame.rows);
        trace.push(Label::HalfLune, format!("trapezoids={boundary} points=0"));
        Ok(pieces)
    }

    /// Builds and checks the final cells.
    pub fn finalize(self, mut pieces: BTreeMap<CellId, Vec<Piece>>) -> Result<CellComplex> {
        let f = &self.frame.field;
        let n = self.inst.len();
        let kept_ids: Vec<CellId> = self.decided.iter().filter(|(_, s)| s.is_kept()).map(|(c, _)| *c).collect();
        let mut kept = BTreeMap::new();
        let mut final_cells = Vec::with_capacity(kept_ids.len());
        let mut point_cell = vec![usize::MAX; n];
        for (id, &base) in kept_ids.iter().enumerate() {
            kept.insert(base, id);
            let mut points = self.cells[&base].points.clone();
            let cell_pieces = pieces.remove(&base).unwrap_or_default();
            let mut outline: Vec<SPoint> = self.frame.square(base).to_vec();
            for d in Dir::ALL {
                let nb = base.step(d);
                if !self.is_kept(nb) {
                    outline.extend(self.frame.trapezoid(nb, d.opposite()));
                    for side in [d.perp(), d.perp().opposite()] {
                        if !self.is_kept(nb.step(side)) {
                            outline.extend(self.frame.end_triangle(nb, side, d.opposite()));
                        }
                    }
                }
            }
            for pc in &cell_pieces {
                points.extend(&pc.points);
                if let PieceKind::Disk(_) = pc.kind {
                    outline.extend(pc.points.iter().map(|&i| SPoint::from_point(self.inst.pos(i))));
                }
            }
            points.sort_unstable();
            for &i in &points {
                if point_cell[i] != usize::MAX {
                    return Err(Error::invariant("grid", format!("point {i} assigned to two final cells")));
                }
                point_cell[i] = id;
            }
            final_cells.push(FinalCell { id, base, region: f.hull(&outline), points, pieces: cell_pieces });
        }
        if let Some(i) = point_cell.iter().position(|&c| c == usize::MAX) {
            return Err(Error::invariant("grid", format!("point {i} left without a final cell")));
        }
        for fc in &final_cells {
            self.check_final(fc)?;
        }
        let cells = self
            .cells
            .values()
            .map(|c| GridCell { status: self.status(c.id).unwrap_or(CellStatus::Partitioned(3)), ..c.clone() })
            .collect();
        Ok(CellComplex {
            frame: self.frame,
            cells,
            initial_edges: self.initial_edges,
            final_cells,
            point_cell,
            kept,
        })
    }

    fn check_final(&self, fc: &FinalCell) -> Result<()> {
        let inst = self.inst;
        let has = |c: Color| fc.points.iter().any(|&i| inst.color(i) == c);
        if !has(Color::Red) || !has(Color::Blue) {
            return Err(Error::invariant("grid", format!("final cell {} at {} is monochromatic", fc.id, fc.base)));
        }
        let bound = 50 * self.frame.lambda2;
        for (k, &i) in fc.points.iter().enumerate() {
            for &j in &fc.points[k + 1..] {
                if dist2(inst.pos(i), inst.pos(j)) > bound {
                    return Err(Error::invariant(
                        "grid",
                        format!("points {i} and {j} of final cell {} are farther than 5√2·λ apart", fc.id),
                    ));
                }
            }
        }
        let f = &self.frame.field;
        let lo = self.frame.cell_point(fc.base, -1, -1, 1);
        let hi = self.frame.cell_point(fc.base, 4, 4, 1);
        for &i in &fc.points {
            let p = SPoint::from_point(inst.pos(i));
            let inside = f.cmp(p.x, lo.x) != Ordering::Less
                && f.cmp(p.x, hi.x) != Ordering::Greater
                && f.cmp(p.y, lo.y) != Ordering::Less
                && f.cmp(p.y, hi.y) != Ordering::Greater;
            if !inside {
                return Err(Error::invariant(
                    "grid",
                    format!("point {i} of final cell {} lies outside the λ-expanded base square", fc.id),
                ));
            }
        }
        Ok(())
    }
}

fn push_piece(map: &mut BTreeMap<CellId, Vec<Piece>>, to: CellId, from: CellId, side: Dir, kind: PieceKind, i: usize) {
    let list = map.entry(to).or_default();
    if let Some(p) = list.iter_mut().find(|p| p.from == from && p.side == side && p.kind == kind) {
        p.points.push(i);
    } else {
        list.push(Piece { from, side, kind, points: vec![i] });
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// First offset slot for an optional seed.
pub fn initial_slot(seed: Option<u64>) -> u64 {
    seed.map_or(0, |s| splitmix64(s) % OFFSET_SLOTS)
}

/// Offset of attempt `k` starting from `slot`.
pub fn offset_for(slot: u64, k: u64) -> i128 {
    let s = (slot + k * OFFSET_STRIDE) % OFFSET_SLOTS;
    DEFAULT_OFFSET + 7 * s as i128
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionOptions {
    pub offset_seed: Option<u64>,
    /// Offsets tried before an invariant violation is reported.
    pub max_attempts: usize,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self { offset_seed: None, max_attempts: 32 }
    }
}

/// Runs all of stage one for a single grid offset.
pub fn partition_at(inst: &Instance, frame: GridFrame, trace: &mut Trace) -> Result<CellComplex> {
    let mut stage = Stage1::new(inst, frame)?;
    stage.apply_step1(trace);
    stage.apply_step2(trace);
    stage.apply_step3(trace);
    let pieces = stage.eliminate_lunes(trace)?;
    stage.finalize(pieces)
}

/// Runs stage one, shifting the grid whenever a point lands on a grid line
/// or an invariant check fails.
pub fn partition(inst: &Instance, lambda2: i128, opts: PartitionOptions, trace: &mut Trace) -> Result<CellComplex> {
    if lambda2 <= 0 {
        return Err(Error::DegenerateLambda { n: inst.len() });
    }
    let slot = initial_slot(opts.offset_seed);
    let mut failures = 0;
    let mut last_err = None;
    for k in 0..OFFSET_SLOTS {
        let offset = offset_for(slot, k);
        let Some(frame) = GridFrame::new(inst, lambda2, offset) else {
            continue;
        };
        let mut local = Trace::new();
        match partition_at(inst, frame, &mut local) {
            Ok(cx) => {
                trace.extend(local);
                return Ok(cx);
            }
            Err(e @ Error::InvariantViolation { .. }) => {
                trace.push(Label::Retry, format!("offset={offset}/{OFFSET_DEN} reason={e}"));
                failures += 1;
                last_err = Some(e);
                if failures >= opts.max_attempts {
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::invariant("grid", "no admissible grid offset found")))
}
