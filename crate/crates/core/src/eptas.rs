//! Shifted-grid approximation for adding as many disks as possible, combined
//! with the exact solver when the optimum is small.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect, Tolerance};
use crate::io::{verify_witness, Instance, Relocation, Witness};
use crate::kernel::{find_free_disk_with, find_placement, PlacementQuery};
use crate::par_map_range;
use crate::pipeline::{default_strategy, solve_with, Answer, SolveError, SolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellCount {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendReport {
    pub added: Vec<Point>,
    pub side: usize,
    /// Offset `(i, j)` in `1..=side` of the winning cell decomposition.
    pub offset: (usize, usize),
    pub cells: Vec<CellCount>,
    /// Total for every offset, row-major in `(i, j)`.
    pub offset_totals: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApproxSource {
    Exact,
    Shifting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub added: Vec<Point>,
    pub relocated: Vec<Relocation>,
    pub eps: f64,
    pub source: ApproxSource,
    /// The shifting run that was compared against the exact branch.
    pub shifting: AppendReport,
}

impl ApproxReport {
    pub fn witness(&self) -> Witness {
        Witness { added: self.added.clone(), relocated: self.relocated.clone() }
    }
}

pub fn cell_side(eps: f64) -> usize {
    (2.0 / eps).ceil() as usize
}

pub fn exact_threshold(h: usize, eps: f64) -> usize {
    (10.0 * h as f64 / eps).ceil() as usize
}

/// Cells of one decomposition: grid lines at `offset + m * side`, clipped to
/// `[0, extent]`.
fn cuts(offset: usize, side: usize, extent: f64) -> Vec<(f64, f64)> {
    let mut lines = vec![0.0];
    let mut x = offset as f64;
    while x > 0.0 {
        x -= side as f64;
    }
    x += side as f64;
    while x < extent {
        lines.push(x);
        x += side as f64;
    }
    lines.push(extent);
    lines.windows(2).filter(|w| w[1] - w[0] >= 2.0).map(|w| (w[0], w[1])).collect()
}

type CellKey = (u64, u64, Vec<(i64, i64)>);

/// Packs as many new disks as possible into the `w x hgt` cell (local
/// coordinates) avoiding `forbidden`. Grows a greedy packing, then asks the
/// kernel for one more disk at a time until it fails.
fn pack_cell(w: f64, hgt: f64, forbidden: &[Point], tol: &Tolerance, seed: u64) -> Vec<Point> {
    let rect = Rect::new(w, hgt);
    let mut placed: Vec<Point> = Vec::new();
    let mut all = forbidden.to_vec();
    while let Some(p) = find_free_disk_with(&all, rect, tol) {
        placed.push(p);
        all.push(p);
    }
    loop {
        let q = PlacementQuery::new(rect, placed.len() + 1).forbid(forbidden.to_vec()).tolerance(tol).seed(seed);
        match find_placement(&q).points() {
            Some(pts) => placed = pts,
            None => return placed,
        }
    }
}

pub fn approx_append(p: &[Point], rect: Rect, eps: f64, seed: u64) -> Vec<Point> {
    approx_append_report(p, rect, eps, seed, &Tolerance::default()).added
}

pub fn approx_append_report(p: &[Point], rect: Rect, eps: f64, seed: u64, tol: &Tolerance) -> AppendReport {
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    let side = cell_side(eps);
    let cache: Mutex<HashMap<CellKey, Vec<Point>>> = Mutex::new(HashMap::new());
    let q = |v: f64| (v * 1e9).round() as i64;

    let runs = par_map_range!(0..side * side, |o: usize| {
        let (i, j) = (o / side + 1, o % side + 1);
        let mut added = Vec::new();
        let mut cells = Vec::new();
        for &(x0, x1) in &cuts(i, side, rect.a) {
            for &(y0, y1) in &cuts(j, side, rect.b) {
                let (w, hgt) = (x1 - x0, y1 - y0);
                let local: Vec<Point> = p
                    .iter()
                    .map(|c| Point::new(c.x - x0, c.y - y0))
                    .filter(|c| c.x > -3.0 && c.x < w + 3.0 && c.y > -3.0 && c.y < hgt + 3.0)
                    .collect();
                let key: CellKey = (w.to_bits(), hgt.to_bits(), local.iter().map(|c| (q(c.x), q(c.y))).collect());
                let cached = cache.lock().expect("cell cache").get(&key).cloned();
                let pts = match cached {
                    Some(v) => v,
                    None => {
                        let v = pack_cell(w, hgt, &local, tol, seed);
                        cache.lock().expect("cell cache").insert(key, v.clone());
                        v
                    }
                };
                cells.push(CellCount { x0, y0, x1, y1, count: pts.len() });
                added.extend(pts.into_iter().map(|c| Point::new(c.x + x0, c.y + y0)));
            }
        }
        (added, cells)
    });
    let offset_totals: Vec<usize> = runs.iter().map(|r| r.0.len()).collect();
    let best = (0..runs.len()).fold(0, |b, o| if offset_totals[o] > offset_totals[b] { o } else { b });
    let (added, cells) = runs.into_iter().nth(best).expect("at least one offset");
    AppendReport { added, side, offset: (best / side + 1, best % side + 1), cells, offset_totals }
}

/// Best of the exact solver (for `k` up to the threshold) and the shifting
/// scheme at `eps / 2`. Whatever is returned has been verified.
pub fn approx_repack(inst: &Instance, eps: f64, seed: u64) -> Result<ApproxReport, SolveError> {
    approx_repack_with(inst, eps, seed, &Tolerance::default())
}

pub fn approx_repack_with(inst: &Instance, eps: f64, seed: u64, tol: &Tolerance) -> Result<ApproxReport, SolveError> {
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    let shifting = approx_append_report(&inst.disks, inst.rect, eps / 2.0, seed, tol);
    let mut exact: Option<Witness> = None;
    let limit = exact_threshold(inst.h, eps);
    let opts = SolveOptions { strategy: default_strategy(inst.disks.len(), seed), tol: *tol, seed, ..SolveOptions::default() };
    for k in 1..=limit {
        match solve_with(&inst.with_budgets(inst.h, k), &opts)?.answer {
            Answer::Yes(w) => exact = Some(w),
            _ => break,
        }
    }
    let report = match exact {
        Some(w) if w.added.len() > shifting.added.len() => ApproxReport {
            added: w.added,
            relocated: w.relocated,
            eps,
            source: ApproxSource::Exact,
            shifting,
        },
        _ => ApproxReport { added: shifting.added.clone(), relocated: vec![], eps, source: ApproxSource::Shifting, shifting },
    };
    let check = inst.with_budgets(inst.h, report.added.len());
    verify_witness(&check, &report.witness(), tol)
        .map_err(|r| SolveError::InternalInconsistency(format!("approximate packing rejected: {r}")))?;
    Ok(report)
}
