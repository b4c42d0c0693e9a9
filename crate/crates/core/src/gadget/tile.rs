use serde::{Deserialize, Serialize};

use super::consts::{TileConstants, NODE_C};
use super::node::build_node;
use super::GadgetError;
use crate::geom::{Point, SpatialIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
    B,
    T,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::L, Side::R, Side::B, Side::T];

    pub fn opposite(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
            Side::B => Side::T,
            Side::T => Side::B,
        }
    }

    /// Grid step leaving a cell through this side.
    pub fn step(self) -> (i64, i64) {
        match self {
            Side::L => (-1, 0),
            Side::R => (1, 0),
            Side::B => (0, -1),
            Side::T => (0, 1),
        }
    }

    pub fn from_step(dx: i64, dy: i64) -> Option<Side> {
        match (dx.signum(), dy.signum(), dx == 0 || dy == 0) {
            (-1, 0, true) => Some(Side::L),
            (1, 0, true) => Some(Side::R),
            (0, -1, true) => Some(Side::B),
            (0, 1, true) => Some(Side::T),
            _ => None,
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Side::L | Side::R)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TileKind {
    Filler,
    StraightChannel,
    TwistedChannel,
    ParityChannel,
    Bend,
    Node,
}

/// A symmetry of the tile square: optional mirror `x -> 2c - x`, then
/// `quarter_turns` counterclockwise rotations about the tile center.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transform {
    pub reflect: bool,
    pub quarter_turns: u8,
}

impl Transform {
    pub const IDENTITY: Transform = Transform { reflect: false, quarter_turns: 0 };

    pub fn all() -> impl Iterator<Item = Transform> {
        (0..8u8).map(|i| Transform { reflect: i >= 4, quarter_turns: i % 4 })
    }

    pub fn apply(&self, p: Point, side: f64) -> Point {
        let mut q = if self.reflect { Point::new(side - p.x, p.y) } else { p };
        for _ in 0..self.quarter_turns % 4 {
            q = Point::new(side - q.y, q.x);
        }
        q
    }

    pub fn apply_side(&self, s: Side) -> Side {
        let mut t = if self.reflect {
            match s {
                Side::L => Side::R,
                Side::R => Side::L,
                o => o,
            }
        } else {
            s
        };
        for _ in 0..self.quarter_turns % 4 {
            t = match t {
                Side::L => Side::B,
                Side::B => Side::R,
                Side::R => Side::T,
                Side::T => Side::L,
            };
        }
        t
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Transform) -> Transform {
        // Represent both as 2x2 integer matrices acting on centered coordinates.
        fn mat(t: &Transform) -> [[i32; 2]; 2] {
            let mut m = if t.reflect { [[-1, 0], [0, 1]] } else { [[1, 0], [0, 1]] };
            for _ in 0..t.quarter_turns % 4 {
                m = [[-m[1][0], -m[1][1]], [m[0][0], m[0][1]]];
            }
            m
        }
        let (a, b) = (mat(self), mat(first));
        let m = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        Transform::all().find(|t| mat(t) == m).expect("dihedral group is closed")
    }
}

/// A channel crossing a tile side. For horizontal sides phase 0 means the pole
/// sits on the upper row; for vertical sides it sits on the left column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Port {
    pub side: Side,
    pub phase: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub kind: TileKind,
    pub c: usize,
    /// Local centers in `[0, 2c]^2`, poles included.
    pub disks: Vec<Point>,
    /// Disks on the tile boundary, shared with the neighbouring tile.
    pub poles: Vec<Point>,
    pub ports: Vec<Port>,
    pub transform: Transform,
    /// Channel center lines. For a node, one polyline per arm, each starting
    /// at the node center.
    pub spines: Vec<Vec<Point>>,
    pub center: Option<Point>,
}

impl Tile {
    pub fn side(&self) -> f64 {
        2.0 * self.c as f64
    }

    pub fn port(&self, side: Side) -> Option<Port> {
        self.ports.iter().copied().find(|p| p.side == side)
    }

    /// The same tile under a further symmetry.
    pub fn transformed(&self, t: Transform, h_chan: f64) -> Tile {
        let s = self.side();
        let disks: Vec<Point> = self.disks.iter().map(|&p| t.apply(p, s)).collect();
        let poles = boundary_disks(&disks, self.c);
        let ports = detect_ports(&disks, self.c, h_chan);
        Tile {
            kind: self.kind,
            c: self.c,
            disks,
            poles,
            ports,
            transform: t.compose(&self.transform),
            spines: self.spines.iter().map(|sp| sp.iter().map(|&p| t.apply(p, s)).collect()).collect(),
            center: self.center.map(|p| t.apply(p, s)),
        }
    }
}

pub(crate) fn boundary_disks(disks: &[Point], c: usize) -> Vec<Point> {
    let s = 2.0 * c as f64;
    let on = |v: f64| v.abs() < 1e-6 || (v - s).abs() < 1e-6;
    disks.iter().copied().filter(|p| on(p.x) || on(p.y)).collect()
}

/// Port positions of a side: `(phase 0 pole, phase 1 pole)`.
pub(crate) fn port_poles(side: Side, c: usize, h_chan: f64) -> (Point, Point) {
    let cc = c as f64;
    let s = 2.0 * cc;
    let (lo, hi) = (cc - h_chan / 2.0, cc + h_chan / 2.0);
    match side {
        Side::L => (Point::new(0.0, hi), Point::new(0.0, lo)),
        Side::R => (Point::new(s, hi), Point::new(s, lo)),
        Side::B => (Point::new(lo, 0.0), Point::new(hi, 0.0)),
        Side::T => (Point::new(lo, s), Point::new(hi, s)),
    }
}

pub(crate) fn detect_ports(disks: &[Point], c: usize, h_chan: f64) -> Vec<Port> {
    let near = |q: Point| disks.iter().any(|p| p.dist(&q) < 1e-6);
    let mut out = Vec::new();
    for side in Side::ALL {
        let (p0, p1) = port_poles(side, c, h_chan);
        if near(p0) {
            out.push(Port { side, phase: 0 });
        } else if near(p1) {
            out.push(Port { side, phase: 1 });
        }
    }
    out
}

/// Disks along a ray starting at `start`, spaced `2 + gap_i`, as long as they
/// stay within `limit` of the start (plus float noise).
fn row(start: f64, gaps: &[f64], limit: f64, dir: f64) -> Vec<f64> {
    let mut out = vec![start];
    let mut i = 0;
    loop {
        let g = gaps.get(i).copied().unwrap_or(0.0);
        let next = out[out.len() - 1] + dir * (2.0 + g);
        if (next - start).abs() > limit + 1e-9 {
            return out;
        }
        out.push(next);
        i += 1;
    }
}

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let l2 = dx * dx + dy * dy;
    let t = if l2 == 0.0 { 0.0 } else { (((p.x - a.x) * dx + (p.y - a.y) * dy) / l2).clamp(0.0, 1.0) };
    p.dist(&Point::new(a.x + t * dx, a.y + t * dy))
}

pub(crate) fn polyline_dist(p: Point, line: &[Point]) -> f64 {
    match line.len() {
        0 => f64::INFINITY,
        1 => p.dist(&line[0]),
        _ => line.windows(2).map(|w| seg_dist(p, w[0], w[1])).fold(f64::INFINITY, f64::min),
    }
}

/// Completes a tile around its channel disks: the odd lattice away from the
/// channels, then a first-fit sweep over a fine grid near them. `keep_out`
/// reports grid points where no filler may go.
pub(crate) fn fill(mut disks: Vec<Point>, c: usize, spines: &[Vec<Point>], lattice_clear: f64, band: f64, keep_out: &dyn Fn(Point) -> bool) -> Vec<Point> {
    let s = 2.0 * c as f64;
    let near_spine = |p: Point, r: f64| spines.iter().any(|sp| polyline_dist(p, sp) < r);
    let mut placed = Vec::new();
    {
        let index = SpatialIndex::new(&disks, 2.0);
        for i in 0..c {
            for j in 0..c {
                let p = Point::new(2.0 * i as f64 + 1.0, 2.0 * j as f64 + 1.0);
                if near_spine(p, lattice_clear) || index.any_closer(p, 2.0) {
                    continue;
                }
                placed.push(p);
            }
        }
    }
    disks.extend(placed);
    // First-fit sweep near the channels, row by row.
    let pitch = 0.1;
    let n = ((s - 2.0) / pitch).round() as i64;
    let mut index = SpatialIndex::new(&disks, 2.0);
    let mut extra = Vec::new();
    for j in 0..=n {
        let y = 1.0 + j as f64 * pitch;
        for i in 0..=n {
            let p = Point::new(1.0 + i as f64 * pitch, y);
            if !near_spine(p, lattice_clear + 4.0) || near_spine(p, band) || keep_out(p) {
                continue;
            }
            if index.any_closer(p, 2.0) || extra.iter().any(|q: &Point| q.dist(&p) < 2.0) {
                continue;
            }
            extra.push(p);
            if extra.len() % 64 == 0 {
                disks.append(&mut extra);
                index = SpatialIndex::new(&disks, 2.0);
            }
        }
    }
    disks.extend(extra);
    disks
}

fn finish(kind: TileKind, c: usize, channel: Vec<Point>, spines: Vec<Vec<Point>>, k: &TileConstants, center: Option<Point>, keep_out: &dyn Fn(Point) -> bool) -> Tile {
    let band = if kind == TileKind::Node { 1.4 } else { 2.5 };
    let disks = if kind == TileKind::Filler { channel } else { fill(channel, c, &spines, 2.5, band, keep_out) };
    let poles = boundary_disks(&disks, c);
    let ports = detect_ports(&disks, c, k.h_chan);
    Tile { kind, c, disks, poles, ports, transform: Transform::IDENTITY, spines, center }
}

fn horizontal(c: usize, k: &TileConstants, upper_gaps: &[f64], lower_gaps: &[f64]) -> Vec<Point> {
    let cc = c as f64;
    let s = 2.0 * cc;
    let up = row(0.0, upper_gaps, s, 1.0);
    let lo = row(1.0, lower_gaps, s - 1.0, 1.0);
    let mut d: Vec<Point> = up.iter().map(|&x| Point::new(snap(x), cc + k.h_chan / 2.0)).collect();
    d.extend(lo.iter().map(|&x| Point::new(snap(x), cc - k.h_chan / 2.0)));
    d
}

fn check_ports(kind: TileKind, disks: &[Point], c: usize, k: &TileConstants, want: &[Port]) -> Result<(), GadgetError> {
    let got = detect_ports(disks, c, k.h_chan);
    if want.iter().all(|w| got.contains(w)) && got.len() == want.len() {
        Ok(())
    } else {
        Err(GadgetError::Constraint(format!("{kind:?} does not fit at c = {c}: ports {got:?}, expected {want:?}")))
    }
}

fn bend_channel(c: usize, k: &TileConstants) -> Result<Vec<Point>, GadgetError> {
    let cc = c as f64;
    let s = 2.0 * cc;
    let h2 = k.h_chan / 2.0;
    let p = Point::new(cc - h2, cc + h2);
    // Inner row and outer row run left from the pivot; one gap each brings the
    // poles onto the boundary (upper row odd, lower row even).
    let g = (p.x - 1.0).rem_euclid(2.0);
    if p.x - 1.0 < g + 2.0 - 1e-9 {
        return Err(GadgetError::Constraint(format!("Bend needs room for its alignment gaps; c = {c} is too small")));
    }
    let up = row(p.x, &[g], p.x - 1.0 + 1e-9, -1.0);
    let lo = row(p.x - 1.0, &[g], p.x - 1.0, -1.0);
    let gv = (s - 1.0 - p.y).rem_euclid(2.0);
    let li = row(p.y, &[gv], s - 1.0 - p.y + 1e-9, 1.0);
    let ro = row(p.y + 1.0, &[gv], s - p.y - 1.0, 1.0);
    let mut d: Vec<Point> = up.iter().map(|&x| Point::new(snap(x), p.y)).collect();
    d.extend(lo.iter().map(|&x| Point::new(snap(x), cc - h2)));
    d.extend(li[1..].iter().map(|&y| Point::new(p.x, snap(y))));
    d.extend(ro.iter().map(|&y| Point::new(cc + h2, snap(y))));
    for deg in [-67.5f64, -22.5] {
        let a = deg.to_radians();
        d.push(Point::new(p.x + k.r_bend * a.cos(), p.y + k.r_bend * a.sin()));
    }
    // The plug sits on the corner node, touching the pivot and both corner disks.
    let a = (-45f64).to_radians();
    d.push(Point::new(p.x + 2.0 * a.cos(), p.y + 2.0 * a.sin()));
    Ok(d)
}

/// Builds one tile in its canonical orientation: straight, twisted and parity
/// channels run left to right (entering with phase 0), bends connect the left
/// and top sides, the node's arms leave through the left, right and bottom.
pub fn build_tile(kind: TileKind, consts: &TileConstants, c_override: Option<usize>) -> Result<Tile, GadgetError> {
    let c = c_override.unwrap_or(consts.c);
    if c.is_multiple_of(2) || c < 3 {
        return Err(GadgetError::Constraint(format!("tile size c = {c} must be odd and at least 3")));
    }
    let k = consts.with_c(c);
    let cc = c as f64;
    let s = 2.0 * cc;
    let m = (c - 1) / 2;
    let hspine = vec![vec![Point::new(0.0, cc), Point::new(s, cc)]];
    let none = |_: Point| false;
    let tile = match kind {
        TileKind::Filler => {
            let d = (0..c).flat_map(|i| (0..c).map(move |j| Point::new(2.0 * i as f64 + 1.0, 2.0 * j as f64 + 1.0))).collect();
            finish(kind, c, d, vec![], &k, None, &none)
        }
        TileKind::StraightChannel => {
            let d = horizontal(c, &k, &[], &[]);
            check_ports(kind, &d, c, &k, &[Port { side: Side::L, phase: 0 }, Port { side: Side::R, phase: 0 }])?;
            finish(kind, c, d, hspine, &k, None, &none)
        }
        TileKind::TwistedChannel => {
            let mut gaps = vec![0.0; m];
            gaps.push(1.0);
            let d = horizontal(c, &k, &gaps, &gaps);
            check_ports(kind, &d, c, &k, &[Port { side: Side::L, phase: 0 }, Port { side: Side::R, phase: 1 }])?;
            finish(kind, c, d, hspine, &k, None, &none)
        }
        TileKind::ParityChannel => {
            if m < 1 {
                return Err(GadgetError::Constraint(format!("ParityChannel needs c >= 3, got {c}")));
            }
            let mut gaps = vec![0.0; m - 1];
            gaps.extend([k.gap_std, 0.0, k.gap_std]);
            let d = horizontal(c, &k, &gaps, &gaps);
            check_ports(kind, &d, c, &k, &[Port { side: Side::L, phase: 0 }, Port { side: Side::R, phase: 1 }])?;
            finish(kind, c, d, hspine, &k, None, &none)
        }
        TileKind::Bend => {
            let d = bend_channel(c, &k)?;
            check_ports(kind, &d, c, &k, &[Port { side: Side::L, phase: 1 }, Port { side: Side::T, phase: 1 }])?;
            let spine = vec![vec![Point::new(0.0, cc), Point::new(cc, cc), Point::new(cc, s)]];
            finish(kind, c, d, spine, &k, None, &none)
        }
        TileKind::Node => {
            if c != NODE_C {
                return Err(GadgetError::Constraint(format!("the node tile is only constructed for c = {NODE_C}, got {c}")));
            }
            let n = build_node(&k)?;
            let keep = n.keep_out.clone();
            let o = n.center;
            let mut t = finish(kind, c, n.disks, n.spines, &k, Some(o), &move |p: Point| keep(p));
            t.ports = detect_ports(&t.disks, c, k.h_chan);
            if t.ports.len() != 3 || t.port(Side::T).is_some() {
                return Err(GadgetError::Constraint(format!("node arms do not reach the left, right and bottom sides: {:?}", t.ports)));
            }
            t
        }
    };
    Ok(tile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{validate_packing, Packing, Rect, Tolerance};

    // Poles sit on the tile boundary, so check inside a rectangle one unit larger on every side.
    fn valid(t: &Tile) -> bool {
        let s = t.side();
        let shifted: Vec<Point> = t.disks.iter().map(|p| Point::new(p.x + 1.0, p.y + 1.0)).collect();
        validate_packing(&Packing::from_centers(Rect::new(s + 2.0, s + 2.0), &shifted), &Tolerance::default()).is_ok()
    }

    #[test]
    fn filler_is_the_odd_lattice() {
        let t = build_tile(TileKind::Filler, &TileConstants::default(), None).unwrap();
        assert_eq!(t.disks.len(), 2209);
        assert!(t.ports.is_empty());
        assert!(valid(&t));
    }

    #[test]
    fn small_tiles_are_packings_with_expected_ports() {
        let k = TileConstants::default();
        for c in [5, 7, 9] {
            for (kind, ports) in [
                (TileKind::StraightChannel, [(Side::L, 0), (Side::R, 0)]),
                (TileKind::TwistedChannel, [(Side::L, 0), (Side::R, 1)]),
                (TileKind::ParityChannel, [(Side::L, 0), (Side::R, 1)]),
                (TileKind::Bend, [(Side::L, 1), (Side::T, 1)]),
            ] {
                let t = build_tile(kind, &k, Some(c)).unwrap();
                assert!(valid(&t), "{kind:?} at c = {c}");
                for (side, phase) in ports {
                    assert_eq!(t.port(side), Some(Port { side, phase }), "{kind:?} at c = {c}");
                }
                assert_eq!(t.ports.len(), 2);
            }
        }
    }

    #[test]
    fn node_tile_has_three_arms() {
        let t = build_tile(TileKind::Node, &TileConstants::default(), None).unwrap();
        assert!(valid(&t));
        assert_eq!(t.ports, vec![Port { side: Side::L, phase: 1 }, Port { side: Side::R, phase: 0 }, Port { side: Side::B, phase: 1 }]);
        let o = t.center.unwrap();
        assert!(t.disks.iter().all(|p| p.dist(&o) >= 2.0));
    }

    #[test]
    fn constraints_are_reported() {
        let k = TileConstants::default();
        assert!(matches!(build_tile(TileKind::StraightChannel, &k, Some(6)), Err(GadgetError::Constraint(_))));
        assert!(matches!(build_tile(TileKind::Node, &k, Some(45)), Err(GadgetError::Constraint(_))));
        assert!(matches!(build_tile(TileKind::Bend, &k, Some(3)), Err(GadgetError::Constraint(_))));
    }

    #[test]
    fn transforms_move_ports_with_the_disks() {
        let k = TileConstants::default();
        let t = build_tile(TileKind::Bend, &k, Some(7)).unwrap();
        for tr in Transform::all() {
            let u = t.transformed(tr, k.h_chan);
            assert!(valid(&u));
            assert_eq!(u.ports.len(), 2);
            for p in &t.ports {
                assert!(u.port(tr.apply_side(p.side)).is_some(), "{tr:?}");
            }
        }
    }
}
