//! Containers of a coloring, represented by their descriptions.

use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::geom::{dist2, Point, Rect, Tolerance};
use crate::kernel::{find_placement, PlacementQuery};
use crate::par_map;

/// A disk of the packing (`P`) or of the hole cover (`H`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiskRef {
    P(usize),
    H(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Description {
    /// Seeds: blue packed disks and hole-cover disks inside the container.
    pub d1: Vec<DiskRef>,
    /// Red packed disks bounding the container.
    pub d2: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Blueprint {
    pub descriptions: Vec<Description>,
}

impl Blueprint {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            index: usize,
            d1: &'a [DiskRef],
            d2: &'a [usize],
        }
        let rows: Vec<Row> =
            self.descriptions.iter().enumerate().map(|(index, d)| Row { index, d1: &d.d1, d2: &d.d2 }).collect();
        serde_json::to_string_pretty(&rows).expect("blueprint serializes")
    }
}

pub fn container_weight(d: &Description) -> usize {
    d.d1.iter().filter(|r| matches!(r, DiskRef::P(_))).count()
}

pub fn resolve(r: DiskRef, p: &[Point], h: &[Point]) -> Point {
    match r {
        DiskRef::P(i) => p[i],
        DiskRef::H(i) => h[i],
    }
}

/// Whether two slots `C`, `C'` exist with `C` meeting `a`, `C'` meeting `b`,
/// `C` meeting `C'`, both avoiding every red disk.
pub fn corridor_connected(a: Point, b: Point, red: &[Point], rect: Rect, tol: &Tolerance) -> bool {
    let d2 = dist2(a, b);
    if d2 < 4.0 {
        return true;
    }
    if d2 >= 36.0 {
        return false;
    }
    let near: Vec<Point> = red.iter().copied().filter(|&r| dist2(r, a) < 36.0 || dist2(r, b) < 36.0).collect();
    let q = PlacementQuery::new(rect, 2)
        .anchored(vec![Some(a), Some(b)])
        .forbid(near)
        .pairwise(false)
        .link(0, 1)
        .tolerance(tol);
    find_placement(&q).is_found()
}

/// Seeds are merged by the closure of `corridor_connected`; each bounding set
/// starts from every red disk and sheds, in index order, those that no slot
/// near the seeds could touch.
pub fn compute_blueprint(p: &[Point], h: &[Point], c: &Coloring, rect: Rect, tol: &Tolerance) -> Blueprint {
    let red_idx = c.red();
    let red: Vec<Point> = red_idx.iter().map(|&i| p[i]).collect();
    let mut seeds: Vec<DiskRef> = c.blue().into_iter().map(DiskRef::P).collect();
    seeds.extend((0..h.len()).map(DiskRef::H));
    let pos: Vec<Point> = seeds.iter().map(|&r| resolve(r, p, h)).collect();

    let pairs: Vec<(usize, usize)> = (0..seeds.len())
        .flat_map(|i| (i + 1..seeds.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| dist2(pos[i], pos[j]) < 36.0)
        .collect();
    let linked = par_map!(pairs, |&(i, j)| corridor_connected(pos[i], pos[j], &red, rect, tol));

    let mut parent: Vec<usize> = (0..seeds.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for (&(i, j), &ok) in pairs.iter().zip(&linked) {
        if ok {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot_of = vec![usize::MAX; seeds.len()];
    for i in 0..seeds.len() {
        let r = find(&mut parent, i);
        if slot_of[r] == usize::MAX {
            slot_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot_of[r]].push(i);
    }

    let descriptions = par_map!(groups, |g: &Vec<usize>| {
        let d1: Vec<DiskRef> = g.iter().map(|&i| seeds[i]).collect();
        let anchors: Vec<Point> = g.iter().map(|&i| pos[i]).collect();
        Description { d1, d2: bounding_reds(&anchors, &red_idx, p, rect, tol) }
    });
    Blueprint { descriptions }
}

fn bounding_reds(anchors: &[Point], red_idx: &[usize], p: &[Point], rect: Rect, tol: &Tolerance) -> Vec<usize> {
    let mut keep: Vec<bool> = vec![true; red_idx.len()];
    for (t, &ri) in red_idx.iter().enumerate() {
        let a = p[ri];
        let pool: Vec<Point> = anchors.iter().copied().filter(|&s| dist2(s, a) < 16.0).collect();
        if pool.is_empty() {
            keep[t] = false;
            continue;
        }
        let others: Vec<Point> = red_idx
            .iter()
            .enumerate()
            .filter(|&(u, &rj)| u != t && keep[u] && dist2(p[rj], a) < 16.0)
            .map(|(_, &rj)| p[rj])
            .collect();
        let q = PlacementQuery::new(rect, 1).anchored(vec![Some(a)]).pool(pool).forbid(others).tolerance(tol);
        if !find_placement(&q).is_found() {
            keep[t] = false;
        }
    }
    red_idx.iter().zip(keep).filter(|(_, k)| *k).map(|(&i, _)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::Color;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn corridor_examples() {
        let tol = Tolerance::default();
        let strip = Rect::new(6.0, 2.0);
        assert!(corridor_connected(p(1.0, 1.0), p(5.0, 1.0), &[], strip, &tol));
        assert!(!corridor_connected(p(1.0, 1.0), p(5.0, 1.0), &[p(3.0, 1.0)], strip, &tol));
        assert!(corridor_connected(p(1.0, 1.0), p(1.0, 1.0), &[], strip, &tol));
    }

    #[test]
    fn blueprint_examples() {
        let tol = Tolerance::default();
        let bp = compute_blueprint(&[p(1.0, 1.0)], &[], &Coloring::all(1, Color::Blue), Rect::new(2.0, 2.0), &tol);
        assert_eq!(bp.descriptions, vec![Description { d1: vec![DiskRef::P(0)], d2: vec![] }]);

        // The red disk splits the strip. At distance exactly 4 it only touches
        // the slots around each blue disk, so neither description needs it.
        let pts = [p(1.0, 1.0), p(5.0, 1.0), p(9.0, 1.0)];
        let c = Coloring { colors: vec![Color::Blue, Color::Red, Color::Blue] };
        let bp = compute_blueprint(&pts, &[], &c, Rect::new(10.0, 2.0), &tol);
        assert_eq!(bp.descriptions.len(), 2);
        for d in &bp.descriptions {
            assert_eq!(d.d1.len(), 1);
            assert!(d.d2.is_empty());
        }
        // Closer in, the red disk cuts into both containers and bounds them.
        let pts = [p(1.0, 1.0), p(4.5, 1.0), p(8.0, 1.0)];
        let bp = compute_blueprint(&pts, &[], &c, Rect::new(9.0, 2.0), &tol);
        assert_eq!(bp.descriptions.len(), 2);
        for d in &bp.descriptions {
            assert_eq!(d.d1.len(), 1);
            assert_eq!(d.d2, vec![1]);
        }

        let bp = compute_blueprint(&[p(3.0, 3.0)], &[p(1.0, 1.0)], &Coloring::all(1, Color::Red), Rect::new(6.0, 6.0), &tol);
        assert_eq!(bp.descriptions.len(), 1);
        assert_eq!(bp.descriptions[0].d1, vec![DiskRef::H(0)]);
    }

    #[test]
    fn weights() {
        let d = |d1: Vec<DiskRef>| Description { d1, d2: vec![] };
        assert_eq!(container_weight(&d(vec![DiskRef::P(3)])), 1);
        assert_eq!(container_weight(&d(vec![DiskRef::H(0)])), 0);
        assert_eq!(container_weight(&d(vec![DiskRef::P(0), DiskRef::H(1), DiskRef::P(2)])), 2);
    }
}
