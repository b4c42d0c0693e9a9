use std::collections::HashMap;

use super::consts::TileConstants;
use super::tile::{build_tile, Side, Tile, TileKind, Transform};
use super::GadgetError;
use crate::geom::{dist2, Point, SpatialIndex};

/// Parameters of the grid brute force used to measure how many unit disks
/// fit into a region. A grid point counts as free when it is at least
/// `2 - slack` from every disk; two free points conflict when they are closer
/// than `2 - conflict`. Points that are pinned between three disks have no
/// free neighbourhood at all, so the slack must exceed half the grid diagonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridProbe {
    pub pitch: f64,
    pub slack: f64,
    pub conflict: f64,
    pub thin: f64,
}

impl Default for GridProbe {
    fn default() -> Self {
        GridProbe { pitch: 0.02, slack: 0.025, conflict: 0.07, thin: 0.06 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityReport {
    pub count: usize,
    /// One maximum placement (representative grid points).
    pub placement: Vec<Point>,
    /// Connected pieces of free space, as clusters of grid points.
    pub regions: Vec<Vec<Point>>,
}

/// Free grid points of the window `(x0, y0, x1, y1)`, grouped into
/// 8-connected clusters.
pub fn free_regions(disks: &[Point], window: (f64, f64, f64, f64), probe: &GridProbe) -> Vec<Vec<Point>> {
    free_regions_where(disks, window, probe, |_| true)
}

/// As [`free_regions`], keeping only grid points accepted by `keep`.
pub fn free_regions_where(disks: &[Point], window: (f64, f64, f64, f64), probe: &GridProbe, keep: impl Fn(Point) -> bool) -> Vec<Vec<Point>> {
    let (x0, y0, x1, y1) = window;
    let nx = ((x1 - x0) / probe.pitch).floor() as i64;
    let ny = ((y1 - y0) / probe.pitch).floor() as i64;
    let index = SpatialIndex::new(disks, 2.0);
    let r = 2.0 - probe.slack;
    let mut free: HashMap<(i64, i64), usize> = HashMap::new();
    let mut cells = Vec::new();
    for i in 0..=nx {
        for j in 0..=ny {
            let p = Point::new(x0 + i as f64 * probe.pitch, y0 + j as f64 * probe.pitch);
            if keep(p) && !index.any_closer(p, r) {
                free.insert((i, j), cells.len());
                cells.push(((i, j), p));
            }
        }
    }
    let mut seen = vec![false; cells.len()];
    let mut out = Vec::new();
    for s in 0..cells.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut group = Vec::new();
        while let Some(a) = stack.pop() {
            let ((i, j), p) = cells[a];
            group.push(p);
            for di in -1..=1 {
                for dj in -1..=1 {
                    if let Some(&b) = free.get(&(i + di, j + dj)) {
                        if !seen[b] {
                            seen[b] = true;
                            stack.push(b);
                        }
                    }
                }
            }
        }
        out.push(group);
    }
    out
}

/// Reduces each cluster to a handful of representatives: tiny clusters
/// (pinned points) collapse to their mean, larger ones are resampled.
fn representatives(regions: &[Vec<Point>], probe: &GridProbe) -> Vec<Point> {
    let mut out = Vec::new();
    for g in regions {
        let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in g {
            lo_x = lo_x.min(p.x);
            lo_y = lo_y.min(p.y);
            hi_x = hi_x.max(p.x);
            hi_y = hi_y.max(p.y);
        }
        if hi_x - lo_x < 2.0 * probe.thin && hi_y - lo_y < 2.0 * probe.thin {
            let n = g.len() as f64;
            out.push(Point::new(g.iter().map(|p| p.x).sum::<f64>() / n, g.iter().map(|p| p.y).sum::<f64>() / n));
            continue;
        }
        let mut keys = HashMap::new();
        for p in g {
            keys.entry(((p.x / probe.thin).round() as i64, (p.y / probe.thin).round() as i64)).or_insert(*p);
        }
        let mut v: Vec<_> = keys.into_iter().collect();
        v.sort_by_key(|(k, _)| *k);
        out.extend(v.into_iter().map(|(_, p)| p));
    }
    out
}

/// Maximum number of disks with centers in `window` that fit among `disks`,
/// by grid brute force followed by an exact independent-set search.
pub fn grid_capacity(disks: &[Point], window: (f64, f64, f64, f64), probe: &GridProbe) -> CapacityReport {
    grid_capacity_where(disks, window, probe, |_| true)
}

/// As [`grid_capacity`], counting only centers accepted by `keep`.
pub fn grid_capacity_where(disks: &[Point], window: (f64, f64, f64, f64), probe: &GridProbe, keep: impl Fn(Point) -> bool) -> CapacityReport {
    let regions = free_regions_where(disks, window, probe, keep);
    let pts = representatives(&regions, probe);
    let t = 2.0 - probe.conflict;
    let index = SpatialIndex::new(&pts, 2.0);
    let mut adj = vec![Vec::new(); pts.len()];
    for (a, &p) in pts.iter().enumerate() {
        index.for_each_near(p, t, |b| {
            if b != a && dist2(p, pts[b]) < t * t {
                adj[a].push(b);
            }
        });
    }
    let best = max_independent_set(&adj);
    CapacityReport { count: best.len(), placement: best.into_iter().map(|i| pts[i]).collect(), regions }
}

/// The tile at the center of a 3 by 3 block: each port continues into a
/// straight channel tile, every other neighbour is filler. Coordinates are
/// shifted so the tile occupies `[2c, 4c]^2`.
pub fn tile_in_context(tile: &Tile, consts: &TileConstants) -> Result<Vec<Point>, GadgetError> {
    let c = tile.c;
    let s = 2.0 * c as f64;
    let k = consts.with_c(c);
    let straight = build_tile(TileKind::StraightChannel, &k, Some(c))?;
    let filler = build_tile(TileKind::Filler, &k, Some(c))?;
    let mut out: Vec<Point> = tile.disks.iter().map(|p| Point::new(p.x + s, p.y + s)).collect();
    let own = SpatialIndex::new(&out, 2.0);
    for di in -1i64..=1 {
        for dj in -1i64..=1 {
            if di == 0 && dj == 0 {
                continue;
            }
            let side = Side::from_step(di, dj);
            let neighbour = match side.and_then(|sd| tile.port(sd).map(|p| (sd, p))) {
                Some((sd, port)) => Transform::all()
                    .map(|t| straight.transformed(t, k.h_chan))
                    .find(|t| t.port(sd.opposite()).is_some_and(|q| q.phase == port.phase) && t.port(sd).is_some())
                    .expect("straight channels exist in every orientation and phase"),
                None => filler.clone(),
            };
            let (ox, oy) = (s * (1 + di) as f64, s * (1 + dj) as f64);
            for p in &neighbour.disks {
                let q = Point::new(p.x + ox, p.y + oy);
                if own.nearest_within(q, 1e-6).is_none() {
                    out.push(q);
                }
            }
        }
    }
    Ok(out)
}

/// Grid capacity of a tile's own square, measured in context.
pub fn tile_capacity(tile: &Tile, consts: &TileConstants, probe: &GridProbe) -> Result<CapacityReport, GadgetError> {
    let disks = tile_in_context(tile, consts)?;
    let s = 2.0 * tile.c as f64;
    Ok(grid_capacity(&disks, (s, s, 2.0 * s, 2.0 * s), probe))
}

/// Exact maximum independent set by branch and reduce. Intended for the
/// sparse, nearly one-dimensional conflict graphs of channel regions.
pub fn max_independent_set(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut sorted: Vec<Vec<usize>> = adj.to_vec();
    for v in &mut sorted {
        v.sort_unstable();
        v.dedup();
    }
    let alive = vec![true; adj.len()];
    let mut out = solve(&sorted, alive);
    out.sort_unstable();
    out
}

fn degree(adj: &[Vec<usize>], alive: &[bool], v: usize) -> usize {
    adj[v].iter().filter(|&&u| alive[u]).count()
}

fn is_simplicial(adj: &[Vec<usize>], alive: &[bool], v: usize) -> bool {
    let nb: Vec<usize> = adj[v].iter().copied().filter(|&u| alive[u]).collect();
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if adj[a].binary_search(&b).is_err() {
                return false;
            }
        }
    }
    true
}

fn take(adj: &[Vec<usize>], alive: &mut [bool], v: usize, out: &mut Vec<usize>) {
    out.push(v);
    alive[v] = false;
    for &u in &adj[v] {
        alive[u] = false;
    }
}

fn solve(adj: &[Vec<usize>], mut alive: Vec<bool>) -> Vec<usize> {
    let mut out = Vec::new();
    // Reductions: a simplicial vertex (degree 0 and 1 included) is always in
    // some maximum independent set.
    loop {
        let mut changed = false;
        for v in 0..adj.len() {
            if alive[v] && degree(adj, &alive, v) <= 8 && is_simplicial(adj, &alive, v) {
                take(adj, &mut alive, v, &mut out);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let rest: Vec<usize> = (0..adj.len()).filter(|&v| alive[v]).collect();
    if rest.is_empty() {
        return out;
    }
    // Split into components.
    let mut comp = vec![usize::MAX; adj.len()];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &s in &rest {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            i += 1;
            for &u in &adj[v] {
                if alive[u] && comp[u] == usize::MAX {
                    comp[u] = id;
                    members.push(u);
                }
            }
        }
        comps.push(members);
    }
    if comps.len() > 1 {
        for members in comps {
            let mut mask = vec![false; adj.len()];
            for &v in &members {
                mask[v] = true;
            }
            out.extend(solve(adj, mask));
        }
        return out;
    }
    let v = *rest.iter().max_by_key(|&&v| (degree(adj, &alive, v), std::cmp::Reverse(v))).expect("nonempty");
    let mut with = alive.clone();
    let mut a = vec![v];
    with[v] = false;
    for &u in &adj[v] {
        with[u] = false;
    }
    a.extend(solve(adj, with));
    let mut without = alive;
    without[v] = false;
    let b = solve(adj, without);
    out.extend(if a.len() >= b.len() { a } else { b });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(adj: &[Vec<usize>]) -> usize {
        let n = adj.len();
        (0u32..1 << n)
            .filter(|m| (0..n).all(|v| m & (1 << v) == 0 || adj[v].iter().all(|&u| m & (1 << u) == 0)))
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn mis_matches_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..13);
            let mut adj = vec![Vec::new(); n];
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.3) {
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                }
            }
            let s = max_independent_set(&adj);
            assert_eq!(s.len(), brute(&adj));
            for &a in &s {
                assert!(adj[a].iter().all(|u| !s.contains(u)));
            }
        }
    }

    #[test]
    fn tile_capacities_at_small_c() {
        let k = TileConstants::default();
        for c in [5, 7] {
            for (kind, want) in [(TileKind::StraightChannel, c + 1), (TileKind::TwistedChannel, c + 1), (TileKind::ParityChannel, c), (TileKind::Bend, c - 1)] {
                let t = build_tile(kind, &k, Some(c)).unwrap();
                let r = tile_capacity(&t, &k, &GridProbe::default()).unwrap();
                assert_eq!(r.count, want, "{kind:?} at c = {c}");
            }
        }
    }

    #[test]
    fn empty_square_holds_four() {
        let r = grid_capacity(&[], (1.0, 1.0, 3.0, 3.0), &GridProbe::default());
        assert_eq!(r.count, 4);
    }

    #[test]
    fn pinned_point_is_found() {
        // Three disks around the origin at distance exactly two.
        let d: Vec<Point> = (0..3)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 3.0 + 0.3;
                Point::new(2.0 * a.cos(), 2.0 * a.sin())
            })
            .collect();
        let r = grid_capacity(&d, (-0.5, -0.5, 0.5, 0.5), &GridProbe::default());
        assert_eq!(r.count, 1);
        assert!(r.placement[0].dist(&Point::new(0.0, 0.0)) < 0.05);
    }
}
