//! The fixed-parameter decision procedure: hole cover, colorings, containers,
//! knapsack, and witness reconstruction.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blueprint::{compute_blueprint, container_weight, resolve, Description, DiskRef};
use crate::coloring::{
    enumerate_colorings, low_blue_colorings, relevant_bound, Coloring, ColoringError, ColoringStrategy, EXHAUSTIVE_LIMIT,
};
use crate::geom::{Point, Tolerance};
use crate::hole_cover::{compute_hole_cover_with, HoleCoverOutcome};
use crate::io::{verify_witness, Instance, Relocation, Witness};
use crate::knapsack::{accept_profile, container_value, knapsack_profile, AnchorMode, KnapsackItem};
use crate::kernel;
use crate::par;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Answer {
    Yes(Witness),
    No,
    /// No accepting coloring among a family that is not known to be complete.
    NoHeuristic,
}

impl Answer {
    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::Yes(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Answer::Yes(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Colorings examined up to and including the accepting one.
    pub colorings_tried: usize,
    /// Process-wide kernel queries issued during the call (approximate when
    /// several solves run concurrently).
    pub kernel_calls: u64,
    pub containers_valued: usize,
    pub wall_ms: u128,
    pub hole_cover_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub answer: Answer,
    pub stats: SolveStats,
    pub strategy: ColoringStrategy,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub strategy: ColoringStrategy,
    pub tol: Tolerance,
    pub seed: u64,
    pub anchors: AnchorMode,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { strategy: ColoringStrategy::Exhaustive, tol: Tolerance::default(), seed: 0, anchors: AnchorMode::Pool }
    }
}

/// Exhaustive for at most `EXHAUSTIVE_LIMIT` disks, randomized beyond.
pub fn default_strategy(n: usize, seed: u64) -> ColoringStrategy {
    if n <= EXHAUSTIVE_LIMIT {
        ColoringStrategy::Exhaustive
    } else {
        ColoringStrategy::Randomized { samples: 256, seed }
    }
}

pub fn solve(inst: &Instance, strat: ColoringStrategy, tol: &Tolerance) -> Result<SolveReport, SolveError> {
    solve_with(inst, &SolveOptions { strategy: strat, tol: *tol, ..SolveOptions::default() })
}

pub fn solve_with(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    let started = Instant::now();
    let calls0 = kernel::calls();
    let mut stats = SolveStats::default();
    let finish = |answer: Answer, mut stats: SolveStats| {
        stats.wall_ms = started.elapsed().as_millis();
        stats.kernel_calls = kernel::calls() - calls0;
        SolveReport { answer, stats, strategy: opts.strategy }
    };
    if inst.k == 0 {
        return Ok(finish(Answer::Yes(Witness::default()), stats));
    }
    let n = inst.disks.len();
    // Any coloring compatible with a solution can recolor its unforced disks
    // red, so exhaustive search only needs blue sets of size at most h.
    let colorings: Vec<Coloring> = match opts.strategy {
        ColoringStrategy::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(ColoringError::ExhaustiveLimitExceeded { n, limit: EXHAUSTIVE_LIMIT }.into());
            }
            low_blue_colorings(n, inst.h).collect()
        }
        s => enumerate_colorings(n, s)?.collect(),
    };
    let holes = match compute_hole_cover_with(inst, &opts.tol) {
        HoleCoverOutcome::EarlyYes(w) => {
            stats.hole_cover_size = inst.k;
            return Ok(finish(Answer::Yes(w), stats));
        }
        HoleCoverOutcome::Dense(h) => h,
    };
    stats.hole_cover_size = holes.len();

    let cache: Mutex<HashMap<Description, (usize, Vec<Point>)>> = Mutex::new(HashMap::new());
    let valued = std::sync::atomic::AtomicUsize::new(0);
    let hit = par::find_first(&colorings, par::default_chunk(), |_, c| {
        try_coloring(inst, &holes, c, opts, &cache, &valued)
    });
    stats.containers_valued = valued.into_inner();
    match hit {
        Some((idx, result)) => {
            stats.colorings_tried = idx + 1;
            let w = result?;
            Ok(finish(Answer::Yes(w), stats))
        }
        None => {
            stats.colorings_tried = colorings.len();
            let complete = match opts.strategy {
                ColoringStrategy::Exhaustive => true,
                ColoringStrategy::NSSUniversal { t } => t >= relevant_bound(inst.h, inst.k).min(n),
                ColoringStrategy::Randomized { .. } => false,
            };
            Ok(finish(if complete { Answer::No } else { Answer::NoHeuristic }, stats))
        }
    }
}

fn description_seed(d: &Description, seed: u64) -> u64 {
    let mut h = DefaultHasher::new();
    d.hash(&mut h);
    seed.hash(&mut h);
    h.finish()
}

/// Runs one coloring end to end. `None` when its knapsack instance rejects.
fn try_coloring(
    inst: &Instance,
    holes: &[Point],
    c: &Coloring,
    opts: &SolveOptions,
    cache: &Mutex<HashMap<Description, (usize, Vec<Point>)>>,
    valued: &std::sync::atomic::AtomicUsize,
) -> Option<Result<Witness, SolveError>> {
    let bp = compute_blueprint(&inst.disks, holes, c, inst.rect, &opts.tol);
    let mut items = Vec::new();
    for (di, d) in bp.descriptions.iter().enumerate() {
        let w = container_weight(d);
        if w > inst.h {
            continue;
        }
        let cached = cache.lock().expect("cache lock").get(d).cloned();
        let (v, pts) = match cached {
            Some(x) => x,
            None => {
                valued.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let x = container_value(
                    d,
                    &inst.disks,
                    holes,
                    inst.h,
                    inst.k,
                    inst.rect,
                    &opts.tol,
                    opts.anchors,
                    description_seed(d, opts.seed),
                );
                cache.lock().expect("cache lock").insert(d.clone(), x.clone());
                x
            }
        };
        items.push(KnapsackItem { description: di, weight: w, value: v, placements: pts });
    }
    let pairs: Vec<(usize, usize)> = items.iter().map(|it| (it.weight, it.value)).collect();
    let prof = knapsack_profile(&pairs, inst.h);
    let w_prime = accept_profile(&prof, inst.k)?;
    let chosen: Vec<&KnapsackItem> = prof.chosen(w_prime).into_iter().map(|i| &items[i]).collect();
    Some(reconstruct_witness(&chosen, &bp.descriptions, inst, holes, &opts.tol))
}

/// Moves every blue disk of the chosen containers onto the containers'
/// placements and uses `k` of the remaining placements as new disks.
pub fn reconstruct_witness(
    chosen: &[&KnapsackItem],
    descriptions: &[Description],
    inst: &Instance,
    holes: &[Point],
    tol: &Tolerance,
) -> Result<Witness, SolveError> {
    let _ = holes;
    let mut movers: Vec<usize> = Vec::new();
    let mut spots: Vec<Point> = Vec::new();
    for it in chosen {
        for r in &descriptions[it.description].d1 {
            if let DiskRef::P(i) = *r {
                movers.push(i);
            }
        }
        spots.extend(it.placements.iter().copied());
    }
    if spots.len() < movers.len() + inst.k {
        return Err(SolveError::InternalInconsistency(format!(
            "{} placements for {} moved and {} added disks",
            spots.len(),
            movers.len(),
            inst.k
        )));
    }
    let relocated = movers.iter().zip(&spots).map(|(&index, &to)| Relocation { index, to }).collect();
    let added = spots[movers.len()..movers.len() + inst.k].to_vec();
    let w = Witness { added, relocated };
    verify_witness(inst, &w, tol).map_err(|r| SolveError::InternalInconsistency(format!("witness rejected: {r}")))?;
    Ok(w)
}

/// Blue seeds of a description, for diagnostics.
pub fn seed_points(d: &Description, inst: &Instance, holes: &[Point]) -> Vec<Point> {
    d.d1.iter().map(|&r| resolve(r, &inst.disks, holes)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;

    fn corridor(h: usize, k: usize) -> Instance {
        Instance::new(Rect::new(2.0, 9.0), vec![Point::new(1.0, 1.0), Point::new(1.0, 4.5), Point::new(1.0, 8.0)], h, k)
    }

    #[test]
    fn corridor_answers() {
        let tol = Tolerance::default();
        let yes = solve(&corridor(1, 1), ColoringStrategy::Exhaustive, &tol).unwrap();
        let w = yes.answer.witness().expect("yes");
        assert!(verify_witness(&corridor(1, 1), w, &tol).is_ok());
        assert_eq!(w.relocated.len(), 1);
        assert_eq!(w.relocated[0].index, 1);
        let no = solve(&corridor(0, 1), ColoringStrategy::Exhaustive, &tol).unwrap();
        assert_eq!(no.answer, Answer::No);
    }

    #[test]
    fn zero_k_is_trivially_yes() {
        let r = solve(&corridor(0, 0), ColoringStrategy::Exhaustive, &Tolerance::default()).unwrap();
        assert_eq!(r.answer, Answer::Yes(Witness::default()));
    }

    #[test]
    fn reconstruct_examples() {
        let tol = Tolerance::default();
        let empty = Instance::new(Rect::new(4.0, 2.0), vec![], 0, 1);
        let d = vec![Description { d1: vec![DiskRef::H(0)], d2: vec![] }];
        let it = KnapsackItem { description: 0, weight: 0, value: 1, placements: vec![Point::new(2.0, 1.0)] };
        let w = reconstruct_witness(&[&it], &d, &empty, &[Point::new(2.0, 1.0)], &tol).unwrap();
        assert_eq!((w.added.len(), w.relocated.len()), (1, 0));

        let wide = Instance::new(Rect::new(8.0, 2.0), vec![], 0, 2);
        let d = vec![
            Description { d1: vec![DiskRef::H(0)], d2: vec![] },
            Description { d1: vec![DiskRef::H(1)], d2: vec![] },
        ];
        let a = KnapsackItem { description: 0, weight: 0, value: 1, placements: vec![Point::new(1.0, 1.0)] };
        let b = KnapsackItem { description: 1, weight: 0, value: 1, placements: vec![Point::new(7.0, 1.0)] };
        let w = reconstruct_witness(&[&a, &b], &d, &wide, &[], &tol).unwrap();
        assert_eq!(w.added.len(), 2);

        let bad = KnapsackItem { description: 0, weight: 0, value: 1, placements: vec![Point::new(0.0, 1.0)] };
        assert!(matches!(
            reconstruct_witness(&[&bad], &d, &empty, &[], &tol),
            Err(SolveError::InternalInconsistency(_))
        ));
    }

    #[test]
    fn deterministic_reports() {
        let tol = Tolerance::default();
        let a = solve(&corridor(1, 1), ColoringStrategy::Exhaustive, &tol).unwrap();
        let b = solve(&corridor(1, 1), ColoringStrategy::Exhaustive, &tol).unwrap();
        assert_eq!(a.answer, b.answer);
        assert_eq!(a.stats.colorings_tried, b.stats.colorings_tried);
    }
}
