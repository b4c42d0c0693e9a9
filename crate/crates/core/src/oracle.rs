//! Instances with known answers, and a lattice brute-force oracle for small
//! instances.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::Combinations;
use crate::geom::{dist2, Point, Rect, Tolerance};
use crate::io::{serialize_instance, serialize_witness, verify_witness, Instance, Relocation, Witness};
use crate::par;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Truth {
    Yes(Witness),
    No,
}

impl Truth {
    pub fn is_yes(&self) -> bool {
        matches!(self, Truth::Yes(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnownAnswer {
    pub h: usize,
    pub k: usize,
    pub truth: Truth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthInstance {
    pub name: String,
    /// Budgets in `instance` are those of the first known answer.
    pub instance: Instance,
    pub known: Vec<KnownAnswer>,
}

impl GroundTruthInstance {
    fn new(name: String, rect: Rect, disks: Vec<Point>, known: Vec<KnownAnswer>) -> Self {
        let (h, k) = known.first().map(|a| (a.h, a.k)).unwrap_or((0, 0));
        GroundTruthInstance { name, instance: Instance::new(rect, disks, h, k), known }
    }

    pub fn at(&self, h: usize, k: usize) -> Instance {
        self.instance.with_budgets(h, k)
    }

    pub fn answer(&self, h: usize, k: usize) -> Option<&Truth> {
        self.known.iter().find(|a| a.h == h && a.k == k).map(|a| &a.truth)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("brute force limited to area <= 64, h <= 2, k <= 3 (got area {area}, h {h}, k {k})")]
    ScaleError { area: f64, h: usize, k: usize },
    #[error("invalid generator input: {0}")]
    BadInput(String),
}

/// Largest hole cluster (by bounding box, in cells) for which the grid still
/// certifies that no further disk fits: hexagonal rows only beat square rows
/// once a free block is several cells wide.
const CERTIFIED_CLUSTER: usize = 3;

/// Disks at the odd lattice points of `[0,2a]x[0,2b]`, leaving out `holes`
/// (given as cell indices `(i, j)`, center `(2i+1, 2j+1)`).
pub fn gen_grid(a_cells: usize, b_cells: usize, holes: &[(usize, usize)]) -> Result<GroundTruthInstance, OracleError> {
    let mut seen = std::collections::HashSet::new();
    for &(i, j) in holes {
        if i >= a_cells || j >= b_cells || !seen.insert((i, j)) {
            return Err(OracleError::BadInput(format!("hole ({i},{j}) repeated or outside the grid")));
        }
    }
    let rect = Rect::new(2.0 * a_cells as f64, 2.0 * b_cells as f64);
    let cell = |i: usize, j: usize| Point::new(2.0 * i as f64 + 1.0, 2.0 * j as f64 + 1.0);
    let mut disks = Vec::new();
    for j in 0..b_cells {
        for i in 0..a_cells {
            if !seen.contains(&(i, j)) {
                disks.push(cell(i, j));
            }
        }
    }
    let mut known: Vec<KnownAnswer> = (1..=holes.len())
        .map(|k| KnownAnswer {
            h: 0,
            k,
            truth: Truth::Yes(Witness { added: holes[..k].iter().map(|&(i, j)| cell(i, j)).collect(), relocated: vec![] }),
        })
        .collect();
    if clusters_fit(holes, CERTIFIED_CLUSTER) {
        known.push(KnownAnswer { h: 0, k: holes.len() + 1, truth: Truth::No });
    }
    let name = format!("grid-{a_cells}x{b_cells}-{}holes", holes.len());
    Ok(GroundTruthInstance::new(name, rect, disks, known))
}

/// Whether every king-move connected cluster of holes fits in a `side`×`side` box.
fn clusters_fit(holes: &[(usize, usize)], side: usize) -> bool {
    let mut comp = vec![usize::MAX; holes.len()];
    for s in 0..holes.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = s;
        let mut stack = vec![s];
        let (mut x0, mut x1, mut y0, mut y1) = (holes[s].0, holes[s].0, holes[s].1, holes[s].1);
        while let Some(u) = stack.pop() {
            let (ux, uy) = holes[u];
            x0 = x0.min(ux);
            x1 = x1.max(ux);
            y0 = y0.min(uy);
            y1 = y1.max(uy);
            for v in 0..holes.len() {
                let (vx, vy) = holes[v];
                if comp[v] == usize::MAX && ux.abs_diff(vx) <= 1 && uy.abs_diff(vy) <= 1 {
                    comp[v] = s;
                    stack.push(v);
                }
            }
        }
        if x1 - x0 >= side || y1 - y0 >= side {
            return false;
        }
    }
    true
}

/// Room left on the segment `x = 1` of a corridor of length `len` when the
/// disks at `kept` stay: each gap between consecutive obstacles (the ends act
/// as obstacles at -1 and len+1) of length g holds floor(g/2) - 1 centers.
fn corridor_room(len: f64, kept: &[f64]) -> (usize, Vec<f64>) {
    let mut stops = vec![-1.0];
    stops.extend_from_slice(kept);
    stops.push(len + 1.0);
    let mut spots = Vec::new();
    for w in stops.windows(2) {
        let mut y = w[0] + 2.0;
        while y <= w[1] - 2.0 + 1e-12 {
            spots.push(y.min(w[1] - 2.0));
            y += 2.0;
        }
    }
    (spots.len(), spots)
}

/// Corridor `[0,2]x[0,len]` with disks at `(1, y)`. Answers are exact for every
/// `h <= n` and every `k` up to one past the corridor's capacity.
pub fn gen_corridor(len: f64, ys: &[f64]) -> Result<GroundTruthInstance, OracleError> {
    let mut sorted: Vec<(usize, f64)> = ys.iter().copied().enumerate().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    if !(len >= 2.0) || sorted.iter().any(|&(_, y)| !(1.0..=len - 1.0).contains(&y)) {
        return Err(OracleError::BadInput("centers must lie in [1, L-1]".into()));
    }
    if sorted.windows(2).any(|w| w[1].1 - w[0].1 < 2.0) {
        return Err(OracleError::BadInput("centers must be pairwise at least 2 apart".into()));
    }
    let n = ys.len();
    let capacity = corridor_room(len, &[]).0;
    let mut known = Vec::new();
    for h in 0..=n {
        // Moving one more disk merges two gaps, which never loses room, so
        // it suffices to try sets of exactly h movers.
        let mut best: Option<(usize, Vec<usize>, Vec<f64>)> = None;
        for movers in Combinations::new(n, h) {
            let kept: Vec<f64> = sorted.iter().enumerate().filter(|(r, _)| !movers.contains(r)).map(|(_, &(_, y))| y).collect();
            let (room, spots) = corridor_room(len, &kept);
            if best.as_ref().is_none_or(|b| room > b.0) {
                best = Some((room, movers, spots));
            }
        }
        let (room, movers, spots) = best.expect("at least one subset");
        let free = room - h;
        for k in 1..=capacity.saturating_sub(n) + 1 {
            let truth = if k <= free {
                let relocated = movers.iter().zip(&spots).map(|(&r, &y)| Relocation { index: sorted[r].0, to: Point::new(1.0, y) }).collect();
                let added = spots[h..h + k].iter().map(|&y| Point::new(1.0, y)).collect();
                Truth::Yes(Witness { added, relocated })
            } else {
                Truth::No
            };
            known.push(KnownAnswer { h, k, truth });
        }
    }
    let disks = ys.iter().map(|&y| Point::new(1.0, y)).collect();
    Ok(GroundTruthInstance::new(format!("corridor-{len}-{n}"), Rect::new(2.0, len), disks, known))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BruteAnswer {
    Yes(Witness),
    NoAtResolution,
}

impl BruteAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, BruteAnswer::Yes(_))
    }
}

pub fn brute_force_decide(inst: &Instance, delta_grid: f64) -> Result<BruteAnswer, OracleError> {
    brute_force_decide_with(inst, delta_grid, 0.0)
}

/// Lattice search in which every distance threshold is `2 + margin` and the
/// center box shrinks by `margin`. A positive margin asks for slack; a margin
/// below `-sqrt(2) * delta_grid` relaxes enough that every true solution
/// rounds onto the lattice, so `NoAtResolution` then certifies a no (the
/// returned witness is only approximate in that regime).
pub fn brute_force_decide_with(inst: &Instance, delta_grid: f64, margin: f64) -> Result<BruteAnswer, OracleError> {
    let area = inst.rect.area();
    if area > 64.0 + 1e-9 || inst.h > 2 || inst.k > 3 || !(delta_grid > 0.0) {
        return Err(OracleError::ScaleError { area, h: inst.h, k: inst.k });
    }
    if inst.k == 0 {
        return Ok(BruteAnswer::Yes(Witness::default()));
    }
    let n = inst.disks.len();
    let movers = inst.h.min(n);
    let need = movers + inst.k;
    let thr = 2.0 + margin;
    let thr2 = thr * thr;
    let lattice = |lo: f64, hi: f64| -> Vec<f64> {
        let i0 = (lo / delta_grid - 1e-9).ceil() as i64;
        let i1 = (hi / delta_grid + 1e-9).floor() as i64;
        (i0..=i1).map(|i| i as f64 * delta_grid).collect()
    };
    let xs = lattice(1.0 + margin, inst.rect.a - 1.0 - margin);
    let ys = lattice(1.0 + margin, inst.rect.b - 1.0 - margin);

    let subsets: Vec<Vec<usize>> = Combinations::new(n, movers).collect();
    let hit = par::find_first(&subsets, par::default_chunk(), |_, s| {
        let fixed: Vec<Point> = (0..n).filter(|i| !s.contains(i)).map(|i| inst.disks[i]).collect();
        let mut cand = Vec::new();
        for &y in &ys {
            for &x in &xs {
                let p = Point::new(x, y);
                if fixed.iter().all(|&f| dist2(f, p) >= thr2) {
                    cand.push(p);
                }
            }
        }
        let mut chosen = Vec::with_capacity(need);
        lattice_dfs(&cand, need, thr2, thr / std::f64::consts::SQRT_2, &mut chosen).then_some(chosen)
    });
    let Some((si, pts)) = hit else {
        return Ok(BruteAnswer::NoAtResolution);
    };
    let s = &subsets[si];
    let relocated = s.iter().zip(&pts).map(|(&index, &to)| Relocation { index, to }).collect();
    let w = Witness { added: pts[s.len()..].to_vec(), relocated };
    if margin >= 0.0 {
        debug_assert!(verify_witness(inst, &w, &Tolerance::default()).is_ok());
    }
    Ok(BruteAnswer::Yes(w))
}

/// Picks `need` mutually separated points from `cand` (in index order). Each
/// half-open cell of side `cell` holds at most one chosen point, which gives
/// the pruning bound.
fn lattice_dfs(cand: &[Point], need: usize, thr2: f64, cell: f64, chosen: &mut Vec<Point>) -> bool {
    if need == 0 {
        return true;
    }
    if cand.len() < need {
        return false;
    }
    let mut cells: Vec<(i64, i64)> = cand.iter().map(|p| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)).collect();
    cells.sort_unstable();
    cells.dedup();
    if cells.len() < need {
        return false;
    }
    for (i, &p) in cand.iter().enumerate() {
        if cand.len() - i < need {
            break;
        }
        let rest: Vec<Point> = cand[i + 1..].iter().copied().filter(|&q| dist2(p, q) >= thr2).collect();
        chosen.push(p);
        if lattice_dfs(&rest, need - 1, thr2, cell, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A random packing of `rect` grown by rejection sampling, at most `n` disks.
pub fn random_packing(rect: Rect, n: usize, rng: &mut impl Rng) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::new();
    let mut misses = 0;
    while pts.len() < n && misses < 2000 {
        let p = Point::new(rng.gen_range(1.0..=rect.a - 1.0), rng.gen_range(1.0..=rect.b - 1.0));
        if pts.iter().all(|&q| dist2(p, q) >= 4.0) {
            pts.push(p);
            misses = 0;
        } else {
            misses += 1;
        }
    }
    pts
}

/// How a small instance fared against the slack filters of [`robust_truth`].
#[derive(Clone, Debug, PartialEq)]
pub enum Robustness {
    /// A witness exists with every constraint slack by `10 * delta_grid`.
    RobustYes(Witness),
    /// No solution exists at all (certified by the relaxed lattice).
    CertifiedNo,
    Ambiguous,
}

pub fn robust_truth(inst: &Instance, delta_grid: f64) -> Result<Robustness, OracleError> {
    if let BruteAnswer::Yes(w) = brute_force_decide_with(inst, delta_grid, 10.0 * delta_grid)? {
        return Ok(Robustness::RobustYes(w));
    }
    let relax = -1.05 * std::f64::consts::SQRT_2 * delta_grid;
    match brute_force_decide_with(inst, delta_grid, relax)? {
        BruteAnswer::NoAtResolution => Ok(Robustness::CertifiedNo),
        BruteAnswer::Yes(_) => Ok(Robustness::Ambiguous),
    }
}

/// Random small instances (area at most 64, h at most 2, k at most 3) whose
/// answers survive the slack filter, half robust yes and half certified no.
pub fn robust_corpus(count: usize, seed: u64, delta_grid: f64) -> Vec<(Instance, Robustness)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut yes, mut no) = (Vec::new(), Vec::new());
    let want_yes = count / 2;
    let want_no = count - want_yes;
    while yes.len() < want_yes || no.len() < want_no {
        let a = rng.gen_range(2.0..=8.0f64);
        let b = rng.gen_range(2.0..=(64.0 / a).min(8.0));
        let rect = Rect::new((a * 4.0).round() / 4.0, (b * 4.0).round() / 4.0);
        if rect.area() > 64.0 || !rect.admits_disk() {
            continue;
        }
        let mut disks = random_packing(rect, 16, &mut rng);
        for _ in 0..rng.gen_range(0..=3usize).min(disks.len()) {
            let i = rng.gen_range(0..disks.len());
            disks.swap_remove(i);
        }
        let inst = Instance::new(rect, disks, rng.gen_range(0..=2), rng.gen_range(1..=3));
        match robust_truth(&inst, delta_grid) {
            Ok(r @ Robustness::RobustYes(_)) if yes.len() < want_yes => yes.push((inst, r)),
            Ok(Robustness::CertifiedNo) if no.len() < want_no => no.push((inst, Robustness::CertifiedNo)),
            _ => {}
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut ys = yes.into_iter();
    let mut ns = no.into_iter();
    loop {
        match (ys.next(), ns.next()) {
            (None, None) => break,
            (y, n) => out.extend(y.into_iter().chain(n)),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub h: usize,
    pub k: usize,
    pub answer: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub instance: String,
    pub known: Vec<ManifestRow>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

/// Writes each instance and reference witness under `dir` and returns the
/// manifest (also written as `dir/manifest.json`). Paths are relative to `dir`.
pub fn write_corpus(dir: &Path, corpus: &[GroundTruthInstance]) -> std::io::Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut manifest = Manifest::default();
    for g in corpus {
        let inst_name = format!("{}.json", g.name);
        fs::write(dir.join(&inst_name), serialize_instance(&g.instance))?;
        let mut known = Vec::new();
        for a in &g.known {
            let (answer, witness) = match &a.truth {
                Truth::Yes(w) => {
                    let wn = format!("{}.h{}k{}.witness.json", g.name, a.h, a.k);
                    fs::write(dir.join(&wn), serialize_witness(w))?;
                    ("yes".to_string(), Some(wn))
                }
                Truth::No => ("no".to_string(), None),
            };
            known.push(ManifestRow { h: a.h, k: a.k, answer, witness });
        }
        manifest.entries.push(ManifestEntry { name: g.name.clone(), instance: inst_name, known });
    }
    fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(&manifest).expect("manifest serializes"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_witnesses(g: &GroundTruthInstance) {
        for a in &g.known {
            if let Truth::Yes(w) = &a.truth {
                assert!(verify_witness(&g.at(a.h, a.k), w, &Tolerance::default()).is_ok(), "{} h={} k={}", g.name, a.h, a.k);
            }
        }
    }

    #[test]
    fn grid_examples() {
        let g = gen_grid(4, 4, &[(1, 1)]).unwrap();
        assert_eq!(g.instance.disks.len(), 15);
        assert!(g.answer(0, 1).unwrap().is_yes());
        assert_eq!(g.answer(0, 2), Some(&Truth::No));
        check_witnesses(&g);

        let full = gen_grid(3, 2, &[]).unwrap();
        assert_eq!(full.answer(0, 1), Some(&Truth::No));
        assert!(crate::kernel::find_free_disk(&full.instance.disks, full.instance.rect).is_none());

        let all: Vec<(usize, usize)> = (0..2).flat_map(|j| (0..3).map(move |i| (i, j))).collect();
        let empty = gen_grid(3, 2, &all).unwrap();
        assert!(empty.instance.disks.is_empty());
        assert!(empty.answer(0, 6).unwrap().is_yes());
        check_witnesses(&empty);

        assert!(gen_grid(2, 2, &[(0, 0), (0, 0)]).is_err());
    }

    #[test]
    fn corridor_examples() {
        let g = gen_corridor(9.0, &[1.0, 4.5, 8.0]).unwrap();
        assert_eq!(g.answer(0, 1), Some(&Truth::No));
        let Some(Truth::Yes(w)) = g.answer(1, 1) else { panic!("expected yes") };
        assert_eq!(w.relocated.len(), 1);
        check_witnesses(&g);

        let full = gen_corridor(6.0, &[1.0, 3.0, 5.0]).unwrap();
        for h in 0..=3 {
            assert_eq!(full.answer(h, 1), Some(&Truth::No));
        }

        let two = gen_corridor(8.0, &[1.0, 3.0]).unwrap();
        let Some(Truth::Yes(w)) = two.answer(0, 2) else { panic!("expected yes") };
        assert_eq!(w.added, vec![Point::new(1.0, 5.0), Point::new(1.0, 7.0)]);
    }

    #[test]
    fn brute_force_examples() {
        let corridor = gen_corridor(9.0, &[1.0, 4.5, 8.0]).unwrap();
        assert!(brute_force_decide(&corridor.at(1, 1), 0.05).unwrap().is_yes());
        assert!(!brute_force_decide(&corridor.at(0, 1), 0.05).unwrap().is_yes());

        let corners = vec![Point::new(1.0, 1.0), Point::new(1.0, 3.0), Point::new(3.0, 1.0), Point::new(3.0, 3.0)];
        let inst = Instance::new(Rect::new(4.0, 4.0), corners, 0, 1);
        assert_eq!(brute_force_decide(&inst, 0.05).unwrap(), BruteAnswer::NoAtResolution);

        let tiny = Instance::new(Rect::new(2.0, 2.0), vec![], 0, 1);
        let BruteAnswer::Yes(w) = brute_force_decide(&tiny, 0.05).unwrap() else { panic!("expected yes") };
        assert_eq!(w.added, vec![Point::new(1.0, 1.0)]);

        let big = Instance::new(Rect::new(10.0, 10.0), vec![], 0, 1);
        assert!(matches!(brute_force_decide(&big, 0.05), Err(OracleError::ScaleError { .. })));
        assert!(matches!(brute_force_decide(&tiny.with_budgets(3, 1), 0.05), Err(OracleError::ScaleError { .. })));
    }

    #[test]
    fn declared_nos_agree_with_brute_force() {
        let g = gen_grid(4, 4, &[(1, 1), (2, 3)]).unwrap();
        assert_eq!(g.answer(0, 3), Some(&Truth::No));
        assert_eq!(robust_truth(&g.at(0, 3), 0.1).unwrap(), Robustness::CertifiedNo);
        let c = gen_corridor(8.0, &[1.0, 4.0]).unwrap();
        for a in &c.known {
            if a.h <= 2 && a.k <= 3 {
                let b = brute_force_decide(&c.at(a.h, a.k), 0.05).unwrap();
                assert_eq!(b.is_yes(), a.truth.is_yes(), "h={} k={}", a.h, a.k);
            }
        }
    }

    #[test]
    fn manifest_round_trip() {
        let dir = std::env::temp_dir().join(format!("repack-corpus-{}", std::process::id()));
        let corpus = vec![gen_grid(2, 2, &[(0, 0)]).unwrap(), gen_corridor(8.0, &[1.0, 3.0]).unwrap()];
        let m = write_corpus(&dir, &corpus).unwrap();
        let back: Manifest = serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m, back);
        assert!(dir.join(&m.entries[0].instance).exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
