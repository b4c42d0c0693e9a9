use super::capacity::{free_regions_where, grid_capacity_where, GridProbe};
use super::consts::TileConstants;
use super::GadgetError;
use crate::geom::Point;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalParams {
    /// Channel size for `channel-one`.
    pub r: usize,
    /// Gap length for `channel-gap`.
    pub s: f64,
    /// Grid pitch of the search.
    pub delta: f64,
}

impl Default for LocalParams {
    fn default() -> Self {
        LocalParams { r: 2, s: 0.5, delta: 0.02 }
    }
}

pub const LOCAL_CHECKS: [&str; 6] = ["channel-one", "channel-twist", "channel-level", "channel-gap", "bend", "node"];

/// Strictly inside a convex polygon given in either orientation.
fn inside(poly: &[Point], p: Point) -> bool {
    let mut sign = 0.0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if cross.abs() < 1e-12 {
            return false;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    true
}

fn bbox(poly: &[Point]) -> (f64, f64, f64, f64) {
    let x0 = poly.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let y0 = poly.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let x1 = poly.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let y1 = poly.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    (x0, y0, x1, y1)
}

struct Search {
    probe: GridProbe,
}

impl Search {
    fn capacity(&self, disks: &[Point], poly: &[Point]) -> usize {
        grid_capacity_where(disks, bbox(poly), &self.probe, |p| inside(poly, p)).count
    }

    /// Grid points of the polygon at distance at least two from every disk.
    fn exactly_free(&self, disks: &[Point], poly: &[Point]) -> Vec<Point> {
        let probe = GridProbe { slack: 0.0, ..self.probe };
        free_regions_where(disks, bbox(poly), &probe, |p| inside(poly, p)).into_iter().flatten().collect()
    }

    /// Grid points that are free up to the search slack.
    fn nearly_free(&self, disks: &[Point], poly: &[Point]) -> Vec<Point> {
        free_regions_where(disks, bbox(poly), &self.probe, |p| inside(poly, p)).into_iter().flatten().collect()
    }

    /// Every nearly free grid point lies close to one of `loci`.
    fn only_near(&self, disks: &[Point], poly: &[Point], loci: &[Point]) -> bool {
        let reach = 10.0 * self.probe.pitch.max(self.probe.slack);
        self.nearly_free(disks, poly).iter().all(|p| loci.iter().any(|q| p.dist(q) < reach))
    }
}

fn is_free(p: Point, disks: &[Point]) -> bool {
    disks.iter().all(|d| d.dist(&p) >= 2.0 - 1e-9)
}

/// The point at distance two from `a` and `b` on the side of `toward`.
fn apex(a: Point, b: Point, toward: Point) -> Point {
    let d = a.dist(&b);
    let m = Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
    let hh = (4.0 - d * d / 4.0).max(0.0).sqrt();
    let (nx, ny) = (-(b.y - a.y) / d, (b.x - a.x) / d);
    let p1 = Point::new(m.x + hh * nx, m.y + hh * ny);
    let p2 = Point::new(m.x - hh * nx, m.y - hh * ny);
    if p1.dist(&toward) <= p2.dist(&toward) {
        p1
    } else {
        p2
    }
}

fn rows(upper: &[f64], lower: &[f64], h: f64) -> Vec<Point> {
    upper.iter().map(|&x| Point::new(x, h)).chain(lower.iter().map(|&x| Point::new(x, 0.0))).collect()
}

fn with(disks: &[Point], extra: &[Point]) -> Vec<Point> {
    disks.iter().chain(extra).copied().collect()
}

/// Two rows of `r` disks, the lower one shifted by one. The free space inside
/// is a path of pinned points alternating between two levels.
fn channel_one(r: usize, k: &TileConstants, sr: &Search) -> bool {
    let h = k.h_chan;
    let upper: Vec<f64> = (0..r).map(|i| 2.0 * i as f64).collect();
    let lower: Vec<f64> = (0..r).map(|i| 2.0 * i as f64 + 1.0).collect();
    let disks = rows(&upper, &lower, h);
    let quad = [Point::new(0.0, h), Point::new(1.0, 0.0), Point::new(2.0 * r as f64 - 1.0, 0.0), Point::new(2.0 * r as f64 - 2.0, h)];
    // Loci along the channel: upper level between consecutive upper disks, lower level between lower ones.
    let mut loci = Vec::new();
    for i in 0..r - 1 {
        let (a0, a1) = (Point::new(upper[i], h), Point::new(upper[i + 1], h));
        let (b0, b1) = (Point::new(lower[i], 0.0), Point::new(lower[i + 1], 0.0));
        loci.push(apex(a0, a1, b0));
        loci.push(apex(b0, b1, a1));
    }
    let pinned = loci.iter().all(|&p| is_free(p, &disks) && inside(&quad, p));
    let pattern = (0..loci.len()).all(|i| (i + 1..loci.len()).all(|j| (loci[i].dist(&loci[j]) < 2.0 - 1e-9) == (j == i + 1)));
    pinned && pattern && sr.only_near(&disks, &quad, &loci) && sr.capacity(&disks, &quad) == r - 1
}

/// A unit gap in both rows. With the two outer disks on different levels two
/// disks fit between them, on fixed points; on the same level only one.
fn twist_scene(k: &TileConstants) -> (Vec<Point>, [Point; 4], [Point; 4]) {
    let h = k.h_chan;
    let disks = rows(&[-2.0, 0.0, 3.0, 5.0], &[-1.0, 1.0, 4.0, 6.0], h);
    let quad = [Point::new(0.0, h), Point::new(1.0, 0.0), Point::new(4.0, 0.0), Point::new(3.0, h)];
    let (a0, a1, a2, a3) = (disks[0], disks[1], disks[2], disks[3]);
    let (b0, b1, b2, b3) = (disks[4], disks[5], disks[6], disks[7]);
    let outer = [apex(a0, a1, b0), apex(b0, b1, a1), apex(a2, a3, b2), apex(b2, b3, a3)];
    (disks, quad, outer)
}

fn channel_twist(k: &TileConstants, sr: &Search) -> bool {
    let (disks, quad, [ul, ll, ur, lr]) = twist_scene(k);
    let a1 = disks[1];
    let b1 = disks[5];
    let (a2, b2) = (disks[2], disks[6]);
    let across = with(&disks, &[ul, lr]);
    let mid = Point::new(2.0, k.h_chan / 2.0);
    let y1 = apex(a1, b1, mid);
    let y2 = apex(a2, b2, mid);
    let two = sr.capacity(&across, &quad) == 2;
    // Every compatible pair of free points sits on the two fixed points.
    let free = sr.nearly_free(&across, &quad);
    let reach = 10.0 * sr.probe.pitch;
    let fixed = free.iter().enumerate().all(|(i, p)| {
        free[i + 1..].iter().all(|q| {
            p.dist(q) < 2.0 - sr.probe.conflict
                || (p.dist(&y1) < reach && q.dist(&y2) < reach)
                || (p.dist(&y2) < reach && q.dist(&y1) < reach)
        })
    });
    let single = sr.capacity(&with(&disks, &[ll, ur]), &quad) <= 1;
    two && fixed && single && is_free(y1, &across) && is_free(y2, &across)
}

fn channel_level(k: &TileConstants, sr: &Search) -> bool {
    let (disks, quad, [ul, ll, ur, lr]) = twist_scene(k);
    sr.capacity(&with(&disks, &[ul, ur]), &quad) <= 1 && sr.capacity(&with(&disks, &[ll, lr]), &quad) <= 1 && sr.capacity(&disks, &quad) == 2
}

/// A gap `s` in both rows: at most one disk fits in the widened cell and it
/// meets one of the two neighbouring channel disks.
fn channel_gap(s: f64, k: &TileConstants, sr: &Search) -> bool {
    let h = k.h_chan;
    let disks = rows(&[-2.0, 0.0, 2.0 + s, 4.0 + s], &[-1.0, 1.0, 3.0 + s, 5.0 + s], h);
    let quad = [Point::new(0.0, h), Point::new(1.0, 0.0), Point::new(3.0 + s, 0.0), Point::new(2.0 + s, h)];
    let x = apex(disks[4], disks[5], disks[1]);
    let y = apex(disks[2], disks[3], disks[6]);
    let at_most_one = sr.capacity(&disks, &quad) <= 1;
    let blocked = sr.exactly_free(&disks, &quad).iter().all(|p| p.dist(&x) < 2.0 || p.dist(&y) < 2.0);
    at_most_one && blocked
}

/// The corner of a right-angle bend: pivot `O`, the two outer-row neighbours
/// `A` and `D`, and the corner disks `B` and `C`.
fn bend(k: &TileConstants, sr: &Search) -> bool {
    let h = k.h_chan;
    let o = Point::new(0.0, 0.0);
    let a = Point::new(-1.0, -h);
    let d = Point::new(h, 1.0);
    let polar = |deg: f64| Point::new(k.r_bend * deg.to_radians().cos(), k.r_bend * deg.to_radians().sin());
    let (b, c) = (polar(-67.5), polar(-22.5));
    let disks = [o, a, b, c, d];
    let pent = [a, b, c, d, o];
    let x = apex(o, a, b);
    let y = apex(b, c, o);
    let z = apex(c, d, o);
    let loci = [x, y, z];
    let pinned = loci.iter().all(|&p| is_free(p, &disks) && inside(&pent, p));
    let exclusion = x.dist(&y) < 2.0 && z.dist(&y) < 2.0;
    pinned && exclusion && sr.only_near(&disks, &pent, &loci) && sr.capacity(&disks, &pent) == 2
}

fn rot(v: Point, deg: f64) -> Point {
    let (s, c) = deg.to_radians().sin_cos();
    Point::new(v.x * c - v.y * s, v.x * s + v.y * c)
}

fn node(k: &TileConstants, sr: &Search) -> bool {
    let side = 2.0 * k.h_node / 3f64.sqrt();
    let r = side / 3f64.sqrt();
    let o = Point::new(0.0, 0.0);
    let v: Vec<Point> = (0..3).map(|i| rot(Point::new(0.0, r), 120.0 * i as f64)).collect();
    let (a, b, c) = (v[2], v[0], v[1]);
    let len = b.dist(&c);
    let cb = Point::new((b.x - c.x) / len, (b.y - c.y) / len);
    let n = rot(cb, (k.gamma - k.alpha).to_degrees());
    let u = rot(n, 90.0);
    let at = |p: Point, s: f64, w: Point| Point::new(p.x + s * w.x, p.y + s * w.y);
    let d = at(at(c, 1.0, u), k.h_chan, n);
    let e = at(c, 2.0, u);
    let f = at(d, 2.0, u);
    let disks = [a, b, c, d, e, f];
    let bcd = [b, c, d];
    let abc = [a, b, c];
    let y = Point::new((b.x + c.x) / 2.0, (b.y + c.y) / 2.0);
    let node_u = apex(c, e, d);
    let node_w = apex(d, f, e);

    let one = sr.capacity(&disks, &bcd) <= 1;
    // Y and U touch the triangle's free space only at tangency points.
    let after_y = sr.exactly_free(&with(&disks, &[y]), &bcd).is_empty();
    let after_u = sr.exactly_free(&with(&disks, &[node_u]), &bcd).is_empty();
    let with_ow = sr.capacity(&with(&disks, &[o, node_w]), &bcd) >= 1 && is_free(o, &disks) && is_free(node_w, &disks);
    // A center properly inside the triangle leaves room for nothing else there.
    let mids = [y, Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0), Point::new((a.x + c.x) / 2.0, (a.y + c.y) / 2.0)];
    let free = sr.exactly_free(&disks, &abc);
    let lonely = free.iter().filter(|p| mids.iter().all(|m| p.dist(m) > sr.probe.pitch)).all(|p| free.iter().all(|q| q.dist(p) < 2.0));
    one && after_y && after_u && with_ow && lonely && !free.is_empty()
}

/// Brute-force grid check of one of the local claims the tiles rely on.
/// Names: `channel-one` (uses `r`), `channel-twist`, `channel-level`,
/// `channel-gap` (uses `s`), `bend`, `node`.
pub fn check_local_observation(name: &str, params: &LocalParams) -> Result<bool, GadgetError> {
    if params.r > 3 {
        return Err(GadgetError::Scale { name: name.to_string(), r: params.r });
    }
    if !(params.delta > 0.0 && params.delta <= 0.1) {
        return Err(GadgetError::Constraint(format!("grid pitch {} outside (0, 0.1]", params.delta)));
    }
    let k = TileConstants::exact();
    let sr = Search { probe: GridProbe { pitch: params.delta, ..GridProbe::default() } };
    Ok(match name {
        "channel-one" => {
            if params.r < 2 {
                return Err(GadgetError::Constraint("a basic channel needs r >= 2".into()));
            }
            channel_one(params.r, &k, &sr)
        }
        "channel-twist" => channel_twist(&k, &sr),
        "channel-level" => channel_level(&k, &sr),
        "channel-gap" => channel_gap(params.s, &k, &sr),
        "bend" => bend(&k, &sr),
        "node" => node(&k, &sr),
        other => return Err(GadgetError::UnknownCheck(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_hold() {
        for name in LOCAL_CHECKS {
            let p = LocalParams::default();
            assert!(check_local_observation(name, &p).unwrap(), "{name}");
        }
        assert!(check_local_observation("channel-one", &LocalParams { r: 3, ..LocalParams::default() }).unwrap());
    }

    #[test]
    fn gap_beyond_the_bound_fails() {
        assert!(!check_local_observation("channel-gap", &LocalParams { s: 1.0, ..LocalParams::default() }).unwrap());
    }

    #[test]
    fn scale_is_limited() {
        assert!(matches!(check_local_observation("channel-one", &LocalParams { r: 4, ..LocalParams::default() }), Err(GadgetError::Scale { .. })));
        assert!(matches!(check_local_observation("spiral", &LocalParams::default()), Err(GadgetError::UnknownCheck(_))));
    }
}
