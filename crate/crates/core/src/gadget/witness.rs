use std::collections::{BTreeSet, HashMap};

use super::assemble::{assemble_layout, GadgetLayout, PlacedTile};
use super::consts::TileConstants;
use super::embed::{Embedding, Graph};
use super::tile::{polyline_dist, Side, TileKind};
use super::GadgetError;
use crate::geom::{Point, SpatialIndex};
use crate::io::Witness;
use crate::par_map;

const TOUCH: f64 = 1e-10;

/// Assembles the instance for `k = |S|` with the default constants and
/// replays the forward direction for `S`.
pub fn forward_witness(graph: &Graph, emb: &Embedding, s: &[usize]) -> Result<Witness, GadgetError> {
    check_independent(graph, s)?;
    let layout = assemble_layout(graph, emb, s.len(), &TileConstants::default())?;
    forward_witness_for(&layout, graph, s)
}

fn check_independent(graph: &Graph, s: &[usize]) -> Result<(), GadgetError> {
    for (i, &a) in s.iter().enumerate() {
        if a >= graph.n() {
            return Err(GadgetError::Embedding(format!("vertex {a} does not exist")));
        }
        for &b in &s[i + 1..] {
            if a == b || graph.has_edge(a, b) {
                return Err(GadgetError::NotIndependent(a, b));
            }
        }
    }
    Ok(())
}

fn abs(t: &PlacedTile, p: Point) -> Point {
    Point::new(t.origin.x + p.x, t.origin.y + p.y)
}

/// Arc length of the projection of `p` onto a polyline.
fn arc_param(p: Point, line: &[Point]) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    let mut acc = 0.0;
    for w in line.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len = (dx * dx + dy * dy).sqrt();
        let t = if len == 0.0 { 0.0 } else { (((p.x - a.x) * dx + (p.y - a.y) * dy) / (len * len)).clamp(0.0, 1.0) };
        let d = p.dist(&Point::new(a.x + t * dx, a.y + t * dy));
        if d < best.0 {
            best = (d, acc + t * len);
        }
        acc += len;
    }
    best.1
}

fn length(line: &[Point]) -> f64 {
    line.windows(2).map(|w| w[0].dist(&w[1])).sum()
}

fn side_of(p: Point, s: f64) -> Option<Side> {
    if p.x.abs() < 1e-6 {
        Some(Side::L)
    } else if (p.x - s).abs() < 1e-6 {
        Some(Side::R)
    } else if p.y.abs() < 1e-6 {
        Some(Side::B)
    } else if (p.y - s).abs() < 1e-6 {
        Some(Side::T)
    } else {
        None
    }
}

/// Vertices of the free space inside one placed tile: points at distance two
/// from two disks and at least two from all others.
fn free_vertices(t: &PlacedTile, disks: &[Point], index: &SpatialIndex) -> Vec<Point> {
    let s = t.tile.side();
    let spines: Vec<Vec<Point>> = t.tile.spines.iter().map(|sp| sp.iter().map(|&p| abs(t, p)).collect()).collect();
    let (x0, y0) = (t.origin.x, t.origin.y);
    let mut near = Vec::new();
    for (i, p) in disks.iter().enumerate() {
        if p.x >= x0 - 2.5 && p.x <= x0 + s + 2.5 && p.y >= y0 - 2.5 && p.y <= y0 + s + 2.5 && spines.iter().any(|sp| polyline_dist(*p, sp) < 5.0) {
            near.push(i);
        }
    }
    let mut out = Vec::new();
    for &i in &near {
        let a = disks[i];
        index.for_each_near(a, 4.0, |j| {
            if j <= i {
                return;
            }
            let b = disks[j];
            let d = a.dist(&b);
            if d >= 4.0 || d == 0.0 {
                return;
            }
            let m = Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
            let hh = (4.0 - d * d / 4.0).max(0.0).sqrt();
            let (ux, uy) = ((b.x - a.x) / d, (b.y - a.y) / d);
            for sg in [-1.0, 1.0] {
                let q = Point::new(m.x - sg * hh * uy, m.y + sg * hh * ux);
                // Half-open ownership so boundary points land in one tile.
                if q.x < x0 || q.x >= x0 + s || q.y < y0 || q.y >= y0 + s {
                    continue;
                }
                if index.any_closer(q, 2.0 - TOUCH) {
                    continue;
                }
                out.push(q);
            }
        });
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    out.dedup_by(|a, b| a.dist(b) < 1e-9);
    out
}

/// Picked centers hashed on a grid of pitch two.
#[derive(Default)]
struct Taken(HashMap<(i64, i64), Vec<Point>>);

impl Taken {
    fn key(p: Point) -> (i64, i64) {
        ((p.x / 2.0).floor() as i64, (p.y / 2.0).floor() as i64)
    }

    fn insert(&mut self, p: Point) {
        self.0.entry(Self::key(p)).or_default().push(p);
    }

    fn is_clear(&self, p: Point) -> bool {
        let (i, j) = Self::key(p);
        (i - 1..=i + 1).all(|a| (j - 1..=j + 1).all(|b| self.0.get(&(a, b)).is_none_or(|v| v.iter().all(|q| q.dist(&p) >= 2.0 - TOUCH))))
    }
}

/// Replays the forward direction on an assembled layout: a disk on each
/// chosen node center and, along every edge, every other vertex of the
/// channel's free space, as many as the count formula grants the edge.
pub fn forward_witness_for(layout: &GadgetLayout, graph: &Graph, s: &[usize]) -> Result<Witness, GadgetError> {
    check_independent(graph, s)?;
    let c = layout.consts.c;
    let disks = &layout.instance.disks;
    let index = SpatialIndex::new(disks, 2.0);
    let chosen: BTreeSet<usize> = s.iter().copied().collect();
    let centers: Vec<Point> = s
        .iter()
        .map(|&v| {
            let t = &layout.tiles[layout.vertex_tiles[v]];
            abs(t, t.tile.center.expect("node tiles have a center"))
        })
        .collect();

    // Candidates per edge, keyed by position along the edge.
    let busy: Vec<usize> = (0..layout.tiles.len()).filter(|&i| layout.tiles[i].tile.kind != TileKind::Filler).collect();
    let found = par_map!(busy, |&i| free_vertices(&layout.tiles[i], disks, &index));
    let mut per_edge: Vec<Vec<(usize, f64, Point)>> = vec![Vec::new(); layout.edges.len()];
    for (&ti, pts) in busy.iter().zip(found) {
        let t = &layout.tiles[ti];
        let side = t.tile.side();
        if let Some((e, pos)) = t.edge {
            let spine: Vec<Point> = t.tile.spines[0].iter().map(|&p| abs(t, p)).collect();
            let path = &layout.edge_tiles[e];
            let prev = &layout.tiles[path[pos - 1]];
            let entry = Side::from_step(prev.cell.0 as i64 - t.cell.0 as i64, prev.cell.1 as i64 - t.cell.1 as i64).expect("adjacent");
            let forward = side_of(t.tile.spines[0][0], side) == Some(entry);
            let total = length(&spine);
            for p in pts {
                let a = arc_param(p, &spine);
                per_edge[e].push((pos, if forward { a } else { total - a }, p));
            }
        } else if let Some(v) = t.vertex {
            let arms: Vec<(Side, Vec<Point>)> = t
                .tile
                .spines
                .iter()
                .map(|sp| (side_of(*sp.last().expect("nonempty spine"), side).expect("arm ends on the boundary"), sp.iter().map(|&p| abs(t, p)).collect()))
                .collect();
            for p in pts {
                let (arm_side, spine) = arms
                    .iter()
                    .min_by(|a, b| polyline_dist(p, &a.1).total_cmp(&polyline_dist(p, &b.1)))
                    .expect("three arms");
                let Some(e) = (0..layout.edges.len()).find(|&e| {
                    let path = &layout.edge_tiles[e];
                    let (first, last) = (path[0], path[path.len() - 1]);
                    let next = |a: usize, b: usize| {
                        let (ca, cb) = (layout.tiles[a].cell, layout.tiles[b].cell);
                        Side::from_step(cb.0 as i64 - ca.0 as i64, cb.1 as i64 - ca.1 as i64)
                    };
                    (layout.edges[e].0 == v && first == layout.vertex_tiles[v] && next(first, path[1]) == Some(*arm_side))
                        || (layout.edges[e].1 == v && last == layout.vertex_tiles[v] && next(last, path[path.len() - 2]) == Some(*arm_side))
                }) else {
                    continue;
                };
                let a = arc_param(p, spine);
                let path = &layout.edge_tiles[e];
                if layout.edges[e].0 == v {
                    per_edge[e].push((0, a, p));
                } else {
                    per_edge[e].push((path.len() - 1, -a, p));
                }
            }
        }
    }

    let mut added: Vec<Point> = centers.clone();
    let mut taken = Taken::default();
    for &p in &centers {
        taken.insert(p);
    }
    for (e, cands) in per_edge.iter_mut().enumerate() {
        cands.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let path = &layout.edge_tiles[e];
        let mut want = c - 1;
        for &ti in &path[1..path.len() - 1] {
            want += match layout.tiles[ti].tile.kind {
                TileKind::Bend => c - 2,
                TileKind::ParityChannel => c - 1,
                _ => c,
            };
        }
        let (u, v) = layout.edges[e];
        // Start from the chosen endpoint so its center disk blocks the path's start.
        let ordered: Vec<&(usize, f64, Point)> = if chosen.contains(&v) { cands.iter().rev().collect() } else { cands.iter().collect() };
        let mut picked = Vec::new();
        for &&(_, _, p) in &ordered {
            if picked.len() == want {
                break;
            }
            if taken.is_clear(p) {
                taken.insert(p);
                picked.push(p);
            }
        }
        if picked.len() < want {
            return Err(GadgetError::Constraint(format!("edge {u}-{v} yields {} of the {want} disks it owes", picked.len())));
        }
        added.extend(picked);
    }
    Ok(Witness { added, relocated: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::k4;
    use crate::geom::Tolerance;
    use crate::io::verify_witness;

    #[test]
    fn adjacent_vertices_are_rejected() {
        let (g, e) = k4();
        assert!(matches!(forward_witness(&g, &e, &[0, 2]), Err(GadgetError::NotIndependent(0, 2))));
        assert!(matches!(forward_witness(&g, &e, &[1, 1]), Err(GadgetError::NotIndependent(1, 1))));
    }

    #[test]
    fn empty_set_fills_every_edge() {
        let (g, e) = k4();
        let w = forward_witness(&g, &e, &[]).unwrap();
        let layout = assemble_layout(&g, &e, 0, &TileConstants::default()).unwrap();
        assert_eq!(w.added.len(), layout.instance.k);
        assert_eq!(layout.instance.k, layout.counts.base_budget(layout.consts.c));
        assert!(verify_witness(&layout.instance, &w, &Tolerance::default()).is_ok());
    }
}
