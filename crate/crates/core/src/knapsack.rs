//! Container values and the extended 0/1 knapsack over containers.

use serde::{Deserialize, Serialize};

use crate::blueprint::{resolve, Description};
use crate::geom::{area_bound, Point, Rect, Tolerance};
use crate::kernel::{find_placement, PlacementQuery};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackItem {
    pub description: usize,
    pub weight: usize,
    pub value: usize,
    /// Centers achieving `value`.
    pub placements: Vec<Point>,
}

/// How anchor disks are assigned to the new disks of a container.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AnchorMode {
    /// One query per count: each new disk may meet any seed.
    #[default]
    Pool,
    /// One query per multiset of seeds, as in the exhaustive formulation.
    Multisets,
}

/// Per-anchor multiplicity cap: a disk's 2-neighborhood fits in a radius-3 circle.
pub fn multiplicity_cap() -> usize {
    area_bound(3.0)
}

/// Nondecreasing index vectors of length `len` over `0..n`, each index used at most `cap` times.
pub fn anchor_multisets(n: usize, len: usize, cap: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, len: usize, cap: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            let used = cur.iter().rev().take_while(|&&x| x == i).count();
            if used < cap {
                cur.push(i);
                rec(n, len, cap, i, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, len, cap, 0, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Largest number (at most `h + k`) of disjoint unit disks that each meet a
/// seed of `d`, avoid its bounding disks and lie in `rect`, with centers.
#[allow(clippy::too_many_arguments)]
pub fn container_value(
    d: &Description,
    p: &[Point],
    holes: &[Point],
    h: usize,
    k: usize,
    rect: Rect,
    tol: &Tolerance,
    mode: AnchorMode,
    seed: u64,
) -> (usize, Vec<Point>) {
    let seeds: Vec<Point> = d.d1.iter().map(|&r| resolve(r, p, holes)).collect();
    let bounds: Vec<Point> = d.d2.iter().map(|&i| p[i]).collect();
    let cap = h + k;
    let floor = seeds.len().min(cap).max(1);
    // Packable counts are downward closed, so climb until the first failure.
    let mut best = (floor, {
        let mut s = seeds.clone();
        s.truncate(floor);
        s
    });
    for len in floor + 1..=cap {
        let found = match mode {
            AnchorMode::Pool => {
                let q = PlacementQuery::new(rect, len)
                    .pool(seeds.clone())
                    .forbid(bounds.clone())
                    .tolerance(tol)
                    .seed(seed ^ len as u64);
                find_placement(&q).points()
            }
            AnchorMode::Multisets => anchor_multisets(seeds.len(), len, multiplicity_cap()).into_iter().find_map(|m| {
                let q = PlacementQuery::new(rect, len)
                    .anchored(m.iter().map(|&i| Some(seeds[i])).collect())
                    .forbid(bounds.clone())
                    .tolerance(tol)
                    .seed(seed ^ len as u64);
                find_placement(&q).points()
            }),
        };
        match found {
            Some(pts) => best = (len, pts),
            None => break,
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackProfile {
    /// `values[w]`: best total value with total weight at most `w`.
    pub values: Vec<usize>,
    weights: Vec<usize>,
    /// `take[i][w]`: item `i` is used in the optimum of the first `i + 1` items at budget `w`.
    take: Vec<Vec<bool>>,
}

impl KnapsackProfile {
    /// Item indices of an optimal selection at budget `w`.
    pub fn chosen(&self, w: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut budget = w.min(self.values.len().saturating_sub(1));
        for i in (0..self.take.len()).rev() {
            if self.take[i][budget] {
                out.push(i);
                budget -= self.weights[i];
            }
        }
        out.reverse();
        out
    }
}

/// Exact DP over `(weight, value)` pairs for every budget `0..=w`.
pub fn knapsack_profile(items: &[(usize, usize)], w: usize) -> KnapsackProfile {
    let mut best = vec![0usize; w + 1];
    let mut take = Vec::with_capacity(items.len());
    for &(wi, vi) in items {
        let mut row = vec![false; w + 1];
        for b in (0..=w).rev() {
            if wi <= b && best[b - wi] + vi > best[b] {
                best[b] = best[b - wi] + vi;
                row[b] = true;
            }
        }
        take.push(row);
    }
    KnapsackProfile { values: best, weights: items.iter().map(|x| x.0).collect(), take }
}

/// Smallest budget `w'` whose best value reaches `w' + k`.
pub fn accept_profile(prof: &KnapsackProfile, k: usize) -> Option<usize> {
    prof.values.iter().enumerate().find(|&(w, &v)| v >= w + k).map(|(w, _)| w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blueprint::DiskRef;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn profile_examples() {
        assert_eq!(knapsack_profile(&[(1, 2), (2, 3)], 2).values, vec![0, 2, 3]);
        assert_eq!(knapsack_profile(&[], 3).values, vec![0; 4]);
        assert_eq!(knapsack_profile(&[(0, 5)], 0).values, vec![5]);
    }

    #[test]
    fn accept_examples() {
        let prof = knapsack_profile(&[(1, 2), (2, 3)], 2);
        assert_eq!(accept_profile(&prof, 1), Some(1));
        assert_eq!(accept_profile(&knapsack_profile(&[], 1), 1), None);
        assert_eq!(accept_profile(&knapsack_profile(&[(3, 1)], 4), 0), Some(0));
    }

    #[test]
    fn backtracking_reaches_the_optimum() {
        let items = [(2, 3), (3, 4), (4, 5), (5, 6), (0, 1)];
        let prof = knapsack_profile(&items, 5);
        for w in 0..=5 {
            let sel = prof.chosen(w);
            let (tw, tv) = sel.iter().fold((0, 0), |(a, b), &i| (a + items[i].0, b + items[i].1));
            assert!(tw <= w);
            assert_eq!(tv, prof.values[w]);
        }
    }

    #[test]
    fn value_examples() {
        let tol = Tolerance::default();
        let d = Description { d1: vec![DiskRef::H(0)], d2: vec![] };
        let (v, pts) = container_value(&d, &[], &[p(2.0, 1.0)], 1, 1, Rect::new(4.0, 2.0), &tol, AnchorMode::Pool, 0);
        assert_eq!(v, 2);
        assert_eq!(pts.len(), 2);
        let d = Description { d1: vec![DiskRef::P(0)], d2: vec![] };
        let (v, _) = container_value(&d, &[p(1.0, 1.0)], &[], 1, 2, Rect::new(2.0, 2.0), &tol, AnchorMode::Pool, 0);
        assert_eq!(v, 1);
    }

    #[test]
    fn multisets() {
        assert_eq!(anchor_multisets(2, 2, 28), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(anchor_multisets(2, 3, 1), Vec::<Vec<usize>>::new());
        assert_eq!(anchor_multisets(3, 2, 1), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(multiplicity_cap(), 28);
    }
}
