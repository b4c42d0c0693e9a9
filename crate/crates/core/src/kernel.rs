//! Numeric feasibility kernel for systems of unit-disk placement constraints.
//!
//! A query asks for `count` new centers inside the rectangle (and an optional
//! window) that keep distance at least 2 from forbidden centers, stay closer
//! than 2 to their anchors, and optionally keep distance 2 from each other.
//!
//! The search walks a ladder of grids from coarse to fine. On each grid it
//! enumerates assignments of grid points that satisfy every constraint relaxed
//! by the grid's rounding error. Any exact solution rounds to such an
//! assignment, so an empty enumeration on any grid proves infeasibility.
//! Relaxed assignments are polished into exact solutions by iterated
//! projection onto the violated constraints.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{area_bound, dist2, Point, Rect, SpatialIndex, Tolerance};
use crate::par;

pub const MAX_COUNT: usize = 200;

static CALLS: AtomicU64 = AtomicU64::new(0);

/// Number of `find_placement` calls made by this process so far.
pub fn calls() -> u64 {
    CALLS.load(Ordering::Relaxed)
}

/// Coarsest grid pitch of the ladder.
const COARSE_PITCH: f64 = 0.4;
/// Relaxed assignments polished per first-variable branch on each grid.
const LEAVES_PER_BRANCH: usize = 3;
/// Relaxed single points polished per grid when `count == 1`.
const SINGLE_LEAVES: usize = 48;
/// First-variable branches per grid that polish their relaxed leaves; the
/// others only look for an exact grid leaf, which keeps near-tight
/// infeasible queries from polishing thousands of hopeless leaves.
const POLISHED_BRANCHES: usize = 32;
/// Candidate checks allowed per grid across all branches. A grid whose
/// search runs out of budget cannot certify infeasibility, so the search
/// moves on to the next grid (or gives up after the finest one).
const LEVEL_WORK: u64 = 40_000_000;
const MIN_BRANCH_WORK: u64 = 20_000;
const POLISH_STARTS: usize = 3;
const POLISH_SWEEPS: usize = 300;
/// Overshoot used by projections so that accepted points clear thresholds.
const PUSH: f64 = 1e-9;

/// Closed axis-parallel box `(x0, y0, x1, y1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Window { x0, y0, x1, y1 }
    }

    fn meet(&self, o: &Window) -> Window {
        Window::new(self.x0.max(o.x0), self.y0.max(o.y0), self.x1.min(o.x1), self.y1.min(o.y1))
    }

    fn is_empty(&self) -> bool {
        self.x0 > self.x1 || self.y0 > self.y1
    }

    fn excess(&self, p: Point) -> f64 {
        let ex = (self.x0 - p.x).max(p.x - self.x1).max(0.0);
        let ey = (self.y0 - p.y).max(p.y - self.y1).max(0.0);
        ex.max(ey)
    }

    fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.x0, self.x1), p.y.clamp(self.y0, self.y1))
    }
}

#[derive(Clone, Debug)]
pub struct PlacementQuery {
    pub rect: Rect,
    pub count: usize,
    /// One entry per new disk; empty means no anchors at all.
    pub anchors: Vec<Option<Point>>,
    pub forbidden: Vec<Point>,
    pub pairwise: bool,
    pub sigma: f64,
    pub delta: f64,
    pub seed: u64,
    /// When nonempty, every new center must be closer than 2 to one of these.
    pub anchor_pool: Vec<Point>,
    /// Pairs of new disks whose centers must be closer than 2.
    pub links: Vec<(usize, usize)>,
    /// Extra closed box that every new center must lie in.
    pub window: Option<Window>,
}

impl PlacementQuery {
    pub fn new(rect: Rect, count: usize) -> Self {
        let tol = Tolerance::default();
        PlacementQuery {
            rect,
            count,
            anchors: Vec::new(),
            forbidden: Vec::new(),
            pairwise: true,
            sigma: tol.sigma,
            delta: tol.delta,
            seed: 0,
            anchor_pool: Vec::new(),
            links: Vec::new(),
            window: None,
        }
    }

    pub fn anchored(mut self, anchors: Vec<Option<Point>>) -> Self {
        self.anchors = anchors;
        self
    }

    pub fn forbid(mut self, forbidden: Vec<Point>) -> Self {
        self.forbidden = forbidden;
        self
    }

    pub fn pairwise(mut self, on: bool) -> Self {
        self.pairwise = on;
        self
    }

    pub fn tolerance(mut self, tol: &Tolerance) -> Self {
        self.sigma = tol.sigma;
        self.delta = tol.delta;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn pool(mut self, pool: Vec<Point>) -> Self {
        self.anchor_pool = pool;
        self
    }

    pub fn link(mut self, i: usize, j: usize) -> Self {
        self.links.push((i, j));
        self
    }

    pub fn within(mut self, w: Window) -> Self {
        self.window = Some(w);
        self
    }

    fn anchor(&self, i: usize) -> Option<Point> {
        self.anchors.get(i).copied().flatten()
    }

    /// Largest count the kernel will attempt for this rectangle.
    pub fn count_cap(&self) -> usize {
        area_bound(self.rect.diagonal() / 2.0).min(MAX_COUNT)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlacementResult {
    Found(Vec<Point>),
    NotFoundAtResolution,
}

impl PlacementResult {
    pub fn is_found(&self) -> bool {
        matches!(self, PlacementResult::Found(_))
    }

    pub fn points(self) -> Option<Vec<Point>> {
        match self {
            PlacementResult::Found(p) => Some(p),
            PlacementResult::NotFoundAtResolution => None,
        }
    }
}

/// Checks `pts` against every constraint of `q` with verification slack `tol.tau`.
pub fn verify_placement(q: &PlacementQuery, pts: &[Point], tol: &Tolerance) -> bool {
    if pts.len() != q.count || pts.iter().any(|p| !p.is_finite()) {
        return false;
    }
    let sep = (2.0 - tol.tau).powi(2);
    let near = (2.0 + tol.tau).powi(2);
    for (i, &p) in pts.iter().enumerate() {
        if q.rect.excess(p) > tol.tau {
            return false;
        }
        if let Some(w) = q.window {
            if w.excess(p) > tol.tau {
                return false;
            }
        }
        if q.forbidden.iter().any(|&f| dist2(p, f) < sep) {
            return false;
        }
        if let Some(a) = q.anchor(i) {
            if dist2(p, a) >= near {
                return false;
            }
        }
        if !q.anchor_pool.is_empty() && !q.anchor_pool.iter().any(|&a| dist2(p, a) < near) {
            return false;
        }
    }
    if q.pairwise {
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if dist2(pts[i], pts[j]) < sep {
                    return false;
                }
            }
        }
    }
    q.links.iter().all(|&(i, j)| i < pts.len() && j < pts.len() && dist2(pts[i], pts[j]) < near)
}

/// Searches for a placement satisfying `q`. Found placements always verify.
pub fn find_placement(q: &PlacementQuery) -> PlacementResult {
    CALLS.fetch_add(1, Ordering::Relaxed);
    if q.count == 0 {
        return PlacementResult::Found(Vec::new());
    }
    if q.count > MAX_COUNT || !q.rect.admits_disk() || q.delta <= 0.0 {
        return PlacementResult::NotFoundAtResolution;
    }
    if q.links.iter().any(|&(i, j)| i >= q.count || j >= q.count) {
        return PlacementResult::NotFoundAtResolution;
    }
    let solver = Solver::new(q);
    let Some(solver) = solver else {
        return PlacementResult::NotFoundAtResolution;
    };
    match solver.run() {
        Some(p) if verify_placement(q, &p, &Tolerance { tau: 1e-9, sigma: q.sigma.max(2e-9), delta: q.delta }) => {
            PlacementResult::Found(p)
        }
        _ => PlacementResult::NotFoundAtResolution,
    }
}

/// A center at distance at least 2 from every disk, or `None` at resolution.
pub fn find_free_disk(disks: &[Point], rect: Rect) -> Option<Point> {
    find_free_disk_with(disks, rect, &Tolerance::default())
}

pub fn find_free_disk_with(disks: &[Point], rect: Rect, tol: &Tolerance) -> Option<Point> {
    let q = PlacementQuery::new(rect, 1).forbid(disks.to_vec()).tolerance(tol);
    find_placement(&q).points().map(|p| p[0])
}

struct Solver<'a> {
    q: &'a PlacementQuery,
    boxes: Vec<Window>,
    forbidden: SpatialIndex,
    pool: SpatialIndex,
    /// `same_as_prev[i]`: variable `i` is interchangeable with `i - 1`.
    same_as_prev: Vec<bool>,
    linked: Vec<Vec<usize>>,
    /// Anchor target `2 - sigma` on strict constraints.
    reach: f64,
}

/// One grid of the ladder with per-variable candidate lists.
struct Level {
    pitch: f64,
    slack: f64,
    cands: Vec<Vec<Point>>,
}

impl<'a> Solver<'a> {
    fn new(q: &'a PlacementQuery) -> Option<Self> {
        let (x0, y0, x1, y1) = q.rect.center_box();
        let mut base = Window::new(x0, y0, x1, y1);
        if let Some(w) = q.window {
            base = base.meet(&w);
        }
        let reach = 2.0 - q.sigma;
        if !q.anchor_pool.is_empty() {
            let (mut a0, mut b0, mut a1, mut b1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in &q.anchor_pool {
                a0 = a0.min(p.x - reach);
                b0 = b0.min(p.y - reach);
                a1 = a1.max(p.x + reach);
                b1 = b1.max(p.y + reach);
            }
            base = base.meet(&Window::new(a0, b0, a1, b1));
        }
        let mut boxes = Vec::with_capacity(q.count);
        for i in 0..q.count {
            let b = match q.anchor(i) {
                Some(a) => base.meet(&Window::new(a.x - reach, a.y - reach, a.x + reach, a.y + reach)),
                None => base,
            };
            if b.is_empty() {
                return None;
            }
            boxes.push(b);
        }
        let mut linked = vec![Vec::new(); q.count];
        for &(i, j) in &q.links {
            linked[i].push(j);
            linked[j].push(i);
        }
        let same_as_prev = (0..q.count)
            .map(|i| {
                i > 0
                    && q.pairwise
                    && linked[i].is_empty()
                    && linked[i - 1].is_empty()
                    && q.anchor(i) == q.anchor(i - 1)
            })
            .collect();
        Some(Solver {
            q,
            boxes,
            forbidden: SpatialIndex::new(&q.forbidden, 2.0),
            pool: SpatialIndex::new(&q.anchor_pool, 2.0),
            same_as_prev,
            linked,
            reach,
        })
    }

    fn pitches(&self) -> Vec<f64> {
        let mut p = self.q.delta;
        let mut v = vec![p];
        while p * 2.0 <= COARSE_PITCH + 1e-12 {
            p *= 2.0;
            v.push(p);
        }
        v.reverse();
        v
    }

    fn run(&self) -> Option<Vec<Point>> {
        for (li, pitch) in self.pitches().into_iter().enumerate() {
            let level = self.level(pitch);
            if level.cands.iter().any(|c| c.is_empty()) {
                return None;
            }
            let (found, any_leaf) = if self.q.count == 1 { self.search_single(&level, li) } else { self.search(&level, li) };
            if found.is_some() {
                return found;
            }
            if !any_leaf {
                return None;
            }
        }
        None
    }

    fn unary_ok(&self, i: usize, p: Point, slack: f64) -> bool {
        if self.forbidden.any_closer(p, 2.0 - slack) {
            return false;
        }
        if let Some(a) = self.q.anchor(i) {
            if dist2(p, a) > (self.reach + slack).powi(2) {
                return false;
            }
        }
        if !self.q.anchor_pool.is_empty() && self.pool.nearest_within(p, self.reach + slack).is_none() {
            return false;
        }
        true
    }

    fn level(&self, pitch: f64) -> Level {
        let slack = pitch * std::f64::consts::FRAC_1_SQRT_2 * 1.0001;
        let mut cands: Vec<Vec<Point>> = Vec::with_capacity(self.q.count);
        for i in 0..self.q.count {
            if i > 0 && self.boxes[i] == self.boxes[i - 1] && self.q.anchor(i) == self.q.anchor(i - 1) {
                let prev = cands[i - 1].clone();
                cands.push(prev);
                continue;
            }
            let b = self.boxes[i];
            let nx = ((b.x1 - b.x0) / pitch).ceil().max(0.0) as usize;
            let ny = ((b.y1 - b.y0) / pitch).ceil().max(0.0) as usize;
            let mut v = Vec::new();
            for ix in 0..=nx {
                let x = if nx == 0 { b.x0 } else { b.x0 + (b.x1 - b.x0) * ix as f64 / nx as f64 };
                for iy in 0..=ny {
                    let y = if ny == 0 { b.y0 } else { b.y0 + (b.y1 - b.y0) * iy as f64 / ny as f64 };
                    let p = Point::new(x, y);
                    if self.unary_ok(i, p, slack) {
                        v.push(p);
                    }
                }
            }
            cands.push(v);
        }
        Level { pitch, slack, cands }
    }

    fn search_single(&self, level: &Level, li: usize) -> (Option<Vec<Point>>, bool) {
        let c = &level.cands[0];
        if let Some(&p) = c.iter().find(|&&p| self.exact(&[p])) {
            return (Some(vec![p]), true);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.q.seed ^ (li as u64) << 32);
        for &p in c.iter().take(SINGLE_LEAVES) {
            if let Some(x) = self.polish(&[p], level.pitch, &mut rng) {
                return (Some(x), true);
            }
        }
        (None, !c.is_empty())
    }

    fn search(&self, level: &Level, li: usize) -> (Option<Vec<Point>>, bool) {
        let first = &level.cands[0];
        let any_leaf = std::sync::atomic::AtomicBool::new(false);
        let stride = first.len().div_ceil(POLISHED_BRANCHES).max(1);
        let budget = (LEVEL_WORK / first.len().max(1) as u64).max(MIN_BRANCH_WORK);
        let hit = par::find_first(first, par::default_chunk(), |bi, &p0| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.q.seed ^ ((li as u64) << 32) ^ (bi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut dfs = Dfs { solver: self, level, chosen: vec![p0], chosen_idx: vec![bi], leaves: 0, polish: bi % stride == 0, work: Cell::new(0), budget, truncated: false, rng: &mut rng, found: None };
            let mut filtered: Vec<Vec<u32>> = (1..self.q.count).map(|j| (0..level.cands[j].len() as u32).collect()).collect();
            if dfs.filter_after(0, p0, bi, &mut filtered) {
                dfs.descend(1, &filtered);
            }
            if dfs.leaves > 0 || dfs.truncated {
                any_leaf.store(true, std::sync::atomic::Ordering::Relaxed);
            }
            dfs.found
        });
        let found = hit.map(|(_, v)| v);
        let leafy = found.is_some() || any_leaf.load(std::sync::atomic::Ordering::Relaxed);
        (found, leafy)
    }

    /// Solver-level acceptance: exact thresholds, strict ones closed at `2 - sigma`.
    fn exact(&self, pts: &[Point]) -> bool {
        for (i, &p) in pts.iter().enumerate() {
            if self.boxes[i].excess(p) > 0.0 || self.forbidden.any_closer(p, 2.0) {
                return false;
            }
            if let Some(a) = self.q.anchor(i) {
                if dist2(p, a) > self.reach * self.reach {
                    return false;
                }
            }
            if !self.q.anchor_pool.is_empty() && self.pool.nearest_within(p, self.reach).is_none() {
                return false;
            }
        }
        for i in 0..pts.len() {
            if self.q.pairwise {
                for j in i + 1..pts.len() {
                    if dist2(pts[i], pts[j]) < 4.0 {
                        return false;
                    }
                }
            }
            for &j in &self.linked[i] {
                if dist2(pts[i], pts[j]) > self.reach * self.reach {
                    return false;
                }
            }
        }
        true
    }

    /// Iterated projection from a relaxed assignment toward an exact one.
    fn polish(&self, init: &[Point], pitch: f64, rng: &mut ChaCha8Rng) -> Option<Vec<Point>> {
        let n = init.len();
        let sep = 2.0 + PUSH;
        let pull = self.reach - PUSH;
        for start in 0..POLISH_STARTS {
            let mut x: Vec<Point> = if start == 0 {
                init.to_vec()
            } else {
                init.iter()
                    .enumerate()
                    .map(|(i, p)| self.boxes[i].clamp(p.add(rng.gen_range(-pitch..pitch), rng.gen_range(-pitch..pitch))))
                    .collect()
            };
            let mut best = f64::INFINITY;
            let mut stale = 0;
            for _ in 0..POLISH_SWEEPS {
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    let mut p = x[i];
                    let pts = self.forbidden.points();
                    let mut pushes = Vec::new();
                    self.forbidden.for_each_near(p, sep, |fi| pushes.push(pts[fi]));
                    for f in pushes {
                        let d = p.dist(&f);
                        if d < sep {
                            worst = worst.max(sep - d);
                            let (ux, uy) = if d > 1e-12 { ((p.x - f.x) / d, (p.y - f.y) / d) } else { (1.0, 0.0) };
                            p = Point::new(f.x + ux * sep, f.y + uy * sep);
                        }
                    }
                    if let Some(a) = self.q.anchor(i) {
                        p = pull_toward(p, a, pull, &mut worst);
                    }
                    if !self.q.anchor_pool.is_empty() {
                        let pool = self.pool.points();
                        let mut nearest = None;
                        let mut bd = f64::INFINITY;
                        for a in pool {
                            let d = dist2(p, *a);
                            if d < bd {
                                bd = d;
                                nearest = Some(*a);
                            }
                        }
                        if let Some(a) = nearest {
                            p = pull_toward(p, a, pull, &mut worst);
                        }
                    }
                    let c = self.boxes[i].clamp(p);
                    worst = worst.max(c.dist(&p));
                    x[i] = c;
                }
                for i in 0..n {
                    if self.q.pairwise {
                        for j in i + 1..n {
                            let d = x[i].dist(&x[j]);
                            if d < sep {
                                worst = worst.max(sep - d);
                                let (ux, uy) = if d > 1e-12 {
                                    ((x[j].x - x[i].x) / d, (x[j].y - x[i].y) / d)
                                } else {
                                    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                                    (t.cos(), t.sin())
                                };
                                let h = (sep - d) / 2.0;
                                x[i] = self.boxes[i].clamp(x[i].add(-ux * h, -uy * h));
                                x[j] = self.boxes[j].clamp(x[j].add(ux * h, uy * h));
                            }
                        }
                    }
                    for &j in &self.linked[i] {
                        if j > i {
                            let d = x[i].dist(&x[j]);
                            if d > pull {
                                worst = worst.max(d - pull);
                                let h = (d - pull) / 2.0 / d;
                                let (dx, dy) = (x[j].x - x[i].x, x[j].y - x[i].y);
                                x[i] = self.boxes[i].clamp(x[i].add(dx * h, dy * h));
                                x[j] = self.boxes[j].clamp(x[j].add(-dx * h, -dy * h));
                            }
                        }
                    }
                }
                if self.exact(&x) {
                    return Some(x);
                }
                if worst < best * 0.999 {
                    best = worst;
                    stale = 0;
                } else {
                    stale += 1;
                    if stale > 40 {
                        break;
                    }
                }
            }
        }
        None
    }
}

fn pull_toward(p: Point, a: Point, r: f64, worst: &mut f64) -> Point {
    let d = p.dist(&a);
    if d > r {
        *worst = worst.max(d - r);
        let t = r / d;
        Point::new(a.x + (p.x - a.x) * t, a.y + (p.y - a.y) * t)
    } else {
        p
    }
}

struct Dfs<'s, 'q, 'r> {
    solver: &'s Solver<'q>,
    level: &'s Level,
    chosen: Vec<Point>,
    chosen_idx: Vec<usize>,
    leaves: usize,
    polish: bool,
    work: Cell<u64>,
    budget: u64,
    truncated: bool,
    rng: &'r mut ChaCha8Rng,
    found: Option<Vec<Point>>,
}

impl Dfs<'_, '_, '_> {
    /// Narrows the candidate lists of later variables after fixing variable `i`
    /// at `p` (candidate index `pi`). Returns false when the branch is dead.
    fn filter_after(&self, i: usize, p: Point, pi: usize, lists: &mut [Vec<u32>]) -> bool {
        let s = self.solver;
        let sep = (2.0 - 2.0 * self.level.slack).max(0.0).powi(2);
        let near = (s.reach + 2.0 * self.level.slack).powi(2);
        let offset = i + 1;
        for (k, list) in lists.iter_mut().enumerate() {
            let j = offset + k;
            let cands = &self.level.cands[j];
            self.work.set(self.work.get() + list.len() as u64);
            let linked = s.linked[i].contains(&j);
            let ordered = j == i + 1 && s.same_as_prev[j];
            list.retain(|&c| {
                let c = c as usize;
                if ordered && c <= pi {
                    return false;
                }
                let d = dist2(p, cands[c]);
                (!s.q.pairwise || d >= sep) && (!linked || d <= near)
            });
            if list.is_empty() {
                return false;
            }
        }
        if s.q.pairwise && lists.len() > 1 {
            // Points sharing a cell of this side are too close for two disks.
            let side = (2.0 - 2.0 * self.level.slack) * std::f64::consts::FRAC_1_SQRT_2 * 0.999;
            let mut cells = std::collections::HashSet::new();
            for (k, list) in lists.iter().enumerate() {
                let cands = &self.level.cands[offset + k];
                for &c in list {
                    let p = cands[c as usize];
                    cells.insert(((p.x / side).floor() as i64, (p.y / side).floor() as i64));
                }
                if cells.len() >= lists.len() {
                    return true;
                }
            }
            return cells.len() >= lists.len();
        }
        true
    }

    fn descend(&mut self, i: usize, lists: &[Vec<u32>]) {
        let n = self.solver.q.count;
        if i == n {
            self.leaves += 1;
            if self.solver.exact(&self.chosen) {
                self.found = Some(self.chosen.clone());
                return;
            }
            if !self.polish {
                self.leaves = LEAVES_PER_BRANCH;
                return;
            }
            let init = self.chosen.clone();
            if let Some(x) = self.solver.polish(&init, self.level.pitch, self.rng) {
                self.found = Some(x);
            }
            return;
        }
        let mine = &lists[0];
        for &c in mine {
            if self.found.is_some() || self.leaves >= LEAVES_PER_BRANCH || self.truncated {
                return;
            }
            if self.work.get() > self.budget {
                self.truncated = true;
                return;
            }
            let p = self.level.cands[i][c as usize];
            let mut rest: Vec<Vec<u32>> = lists[1..].to_vec();
            if self.filter_after(i, p, c as usize, &mut rest) {
                self.chosen.push(p);
                self.chosen_idx.push(c as usize);
                self.descend(i + 1, &rest);
                self.chosen.pop();
                self.chosen_idx.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn verify_examples() {
        let tol = Tolerance::default();
        let q = PlacementQuery::new(Rect::new(4.0, 2.0), 1).anchored(vec![Some(p(2.0, 1.0))]);
        assert!(verify_placement(&q, &[p(2.0, 1.0)], &tol));
        assert!(!verify_placement(&q, &[p(2.0, 3.0)], &tol));
        let q2 = PlacementQuery::new(Rect::new(4.0, 2.0), 2).anchored(vec![Some(p(2.0, 1.0)); 2]);
        assert!(verify_placement(&q2, &[p(1.0, 1.0), p(3.0, 1.0)], &tol));
    }

    #[test]
    fn find_examples() {
        let a = Some(p(2.0, 1.0));
        let one = PlacementQuery::new(Rect::new(4.0, 2.0), 1).anchored(vec![a]);
        assert!(find_placement(&one).is_found());
        let three = PlacementQuery::new(Rect::new(4.0, 2.0), 3).anchored(vec![a; 3]);
        assert_eq!(find_placement(&three), PlacementResult::NotFoundAtResolution);
        let corners = vec![p(1.0, 1.0), p(1.0, 3.0), p(3.0, 1.0), p(3.0, 3.0)];
        let q = PlacementQuery::new(Rect::new(4.0, 4.0), 1).forbid(corners.clone());
        assert_eq!(find_placement(&q), PlacementResult::NotFoundAtResolution);
        assert_eq!(find_free_disk(&corners, Rect::new(4.0, 4.0)), None);
    }

    #[test]
    fn free_disk_examples() {
        assert_eq!(find_free_disk(&[], Rect::new(2.0, 2.0)), Some(p(1.0, 1.0)));
        let q = find_free_disk(&[p(1.0, 1.0)], Rect::new(6.0, 2.0)).unwrap();
        assert!(q.x >= 3.0 - 1e-9 && (q.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_anchored_disks_fit_exactly() {
        let a = Some(p(2.0, 1.0));
        let q = PlacementQuery::new(Rect::new(4.0, 2.0), 2).anchored(vec![a; 2]);
        let pts = find_placement(&q).points().unwrap();
        assert!(verify_placement(&q, &pts, &Tolerance::default()));
    }

    #[test]
    fn linked_pair_through_a_gap() {
        // Slots beside (1,1) and (5,1) meeting in the middle of a 6x2 strip.
        let q = PlacementQuery::new(Rect::new(6.0, 2.0), 2)
            .anchored(vec![Some(p(1.0, 1.0)), Some(p(5.0, 1.0))])
            .pairwise(false)
            .link(0, 1);
        assert!(find_placement(&q).is_found());
        let blocked = q.clone().forbid(vec![p(3.0, 1.0)]);
        assert!(!find_placement(&blocked).is_found());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let q = PlacementQuery::new(Rect::new(7.3, 5.1), 4).forbid(vec![p(3.0, 2.5), p(5.5, 3.9)]).seed(11);
        assert_eq!(find_placement(&q), find_placement(&q));
    }
}
