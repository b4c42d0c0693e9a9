use std::sync::Arc;

use super::consts::TileConstants;
use super::tile::polyline_dist;
use super::GadgetError;
use crate::geom::Point;

pub(crate) struct NodeBuild {
    pub disks: Vec<Point>,
    /// One polyline per arm in the order left, bottom, right.
    pub spines: Vec<Vec<Point>>,
    pub center: Point,
    pub keep_out: Arc<dyn Fn(Point) -> bool + Send + Sync>,
}

fn rot(v: Point, deg: f64) -> Point {
    let (s, c) = deg.to_radians().sin_cos();
    Point::new(v.x * c - v.y * s, v.x * s + v.y * c)
}

fn sub(a: Point, b: Point) -> Point {
    Point::new(a.x - b.x, a.y - b.y)
}

fn axpy(p: Point, t: f64, v: Point) -> Point {
    Point::new(p.x + t * v.x, p.y + t * v.y)
}

fn mid(a: Point, b: Point) -> Point {
    Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
}

/// Lays out a two-row channel step by step. `a` is the last disk of the row on
/// the left of the heading, `b` the last disk of the right row; one of them
/// is always exactly one unit ahead of the other.
struct Turtle {
    u: Point,
    a: Point,
    b: Point,
    disks: Vec<Point>,
    spine: Vec<Point>,
}

impl Turtle {
    fn b_leads(&self) -> bool {
        let d = sub(self.b, self.a);
        d.x * self.u.x + d.y * self.u.y > 0.0
    }

    fn mark(&mut self) {
        self.spine.push(mid(self.a, self.b));
    }

    /// Advances both rows by `2 + gap`.
    fn pair(&mut self, gap: f64) {
        self.a = axpy(self.a, 2.0 + gap, self.u);
        self.b = axpy(self.b, 2.0 + gap, self.u);
        self.disks.push(self.a);
        self.disks.push(self.b);
        self.mark();
    }

    /// Advances the lagging row alone, which then leads.
    fn single(&mut self) {
        if self.b_leads() {
            self.a = axpy(self.a, 2.0, self.u);
            self.disks.push(self.a);
        } else {
            self.b = axpy(self.b, 2.0, self.u);
            self.disks.push(self.b);
        }
        self.mark();
    }

    /// Turns by `steps` times 30 degrees, counterclockwise for `ccw`. The row
    /// on the inside of the turn pivots on its last disk while the other row
    /// fans around it.
    fn turn(&mut self, ccw: bool, steps: usize) {
        if ccw == !self.b_leads() {
            self.single();
        }
        let sign = if ccw { 1.0 } else { -1.0 };
        let (p, q0) = if ccw { (self.a, self.b) } else { (self.b, self.a) };
        let mut f = q0;
        for j in 1..=steps {
            f = axpy(p, 1.0, rot(sub(q0, p), sign * 30.0 * j as f64));
            self.disks.push(f);
            self.spine.push(mid(p, f));
        }
        if ccw {
            self.b = f;
        } else {
            self.a = f;
        }
        self.u = rot(self.u, sign * 30.0 * steps as f64);
    }

    /// Splits `total` into pair gaps of at most a quarter.
    fn spread(&mut self, total: f64) {
        if total <= 1e-12 {
            return;
        }
        let k = (total / 0.25).ceil() as usize;
        for _ in 0..k {
            self.pair(total / k as f64);
        }
    }

    /// Runs straight until one row lands on the line `coord(p) = target`,
    /// after spreading the gaps that make that landing exact.
    fn run_to(&mut self, target: f64, coord: impl Fn(Point) -> f64) -> Result<Point, GadgetError> {
        let lead = if self.b_leads() { self.b } else { self.a };
        let dist = (target - coord(lead)).abs();
        self.spread(dist - dist.floor());
        for _ in 0..10_000 {
            let lead = if self.b_leads() { self.b } else { self.a };
            let left = (target - coord(lead)).abs();
            if left < 1e-7 {
                return Ok(lead);
            }
            if left < 1.0 - 1e-7 {
                break;
            }
            self.single();
        }
        Err(GadgetError::Constraint("node arm does not land on the tile boundary".into()))
    }
}

struct ArmStart {
    c_vertex: Point,
    d: Point,
    u: Point,
    y_mid: Point,
}

fn arm_starts(k: &TileConstants) -> [ArmStart; 3] {
    let side = 2.0 * k.h_node / 3f64.sqrt();
    let r = side / 3f64.sqrt();
    let v: Vec<Point> = (0..3).map(|i| rot(Point::new(0.0, r), 120.0 * i as f64 - 30.0)).collect();
    let turn = (k.gamma - k.alpha).to_degrees();
    std::array::from_fn(|i| {
        let (b, c) = (v[i], v[(i + 1) % 3]);
        let len = b.dist(&c);
        let cb = Point::new((b.x - c.x) / len, (b.y - c.y) / len);
        let n = rot(cb, turn);
        let u = rot(n, 90.0);
        let d = axpy(axpy(c, 1.0, u), k.h_chan, n);
        ArmStart { c_vertex: c, d, u, y_mid: mid(b, c) }
    })
}

fn start(a: &ArmStart, o: Point) -> Turtle {
    let c = axpy(o, 1.0, a.c_vertex);
    let d = axpy(o, 1.0, a.d);
    Turtle { u: a.u, a: c, b: d, disks: vec![d], spine: vec![o, axpy(o, 1.0, a.y_mid), mid(c, d)] }
}

const RISE_PAIRS: usize = 2;
const GAP_PAIRS: usize = 8;

/// Side arm: a short climb, a 60 degree turn outward, a descent that sets the
/// height, a 30 degree turn to horizontal, then a straight run to the boundary.
/// Returns the turtle just after the second turn.
fn side_arm(a: &ArmStart, o: Point, ccw_first: bool, descent_pairs: usize, descent_gap: f64) -> Turtle {
    let mut t = start(a, o);
    for _ in 0..RISE_PAIRS {
        t.pair(0.0);
    }
    t.turn(ccw_first, 2);
    for _ in 0..descent_pairs {
        t.pair(0.0);
    }
    for _ in 0..GAP_PAIRS {
        t.pair(descent_gap / GAP_PAIRS as f64);
    }
    t.turn(!ccw_first, 1);
    t
}

fn centerline_y(t: &Turtle) -> f64 {
    (t.a.y + t.b.y) / 2.0
}

/// Descent that brings the side arm's center line to height `target`.
fn plan_descent(a: &ArmStart, o: Point, ccw_first: bool, target: f64) -> Result<(usize, f64), GadgetError> {
    let y0 = centerline_y(&side_arm(a, o, ccw_first, 0, 0.0));
    let drop = y0 - target;
    if drop < 0.0 {
        return Err(GadgetError::Constraint("node sits too low for its side arms".into()));
    }
    // Each pair drops the center line by one, each unit of gap by one half.
    let m = drop.floor() as usize;
    let g = 2.0 * (drop - m as f64);
    let t = side_arm(a, o, ccw_first, m, g);
    let err = centerline_y(&t) - target;
    if err.abs() > 1e-9 {
        return Err(GadgetError::Constraint(format!("node side arm misaligned by {err}")));
    }
    Ok((m, g))
}

pub(crate) fn build_node(k: &TileConstants) -> Result<NodeBuild, GadgetError> {
    let cc = k.c as f64;
    let s = 2.0 * cc;
    let starts = arm_starts(k);
    // The bottom arm runs straight down; its center line fixes the node's x.
    let probe = start(&starts[1], Point::new(0.0, 0.0));
    let ox = cc - (probe.a.x + probe.b.x) / 2.0;
    let oy = cc + 6.0;
    let o = Point::new(ox, oy);

    let (ml, gl) = plan_descent(&starts[0], o, true, cc)?;
    let mut left = side_arm(&starts[0], o, true, ml, gl);
    let (mr, gr) = plan_descent(&starts[2], o, false, cc)?;
    let mut right = side_arm(&starts[2], o, false, mr, gr);
    let mut bottom = start(&starts[1], o);

    left.run_to(0.0, |p| p.x)?;
    right.run_to(s, |p| p.x)?;
    bottom.run_to(0.0, |p| p.y)?;
    left.spine.push(Point::new(0.0, cc));
    right.spine.push(Point::new(s, cc));
    bottom.spine.push(Point::new(cc, 0.0));

    let side = 2.0 * k.h_node / 3f64.sqrt();
    let r = side / 3f64.sqrt();
    let mut disks: Vec<Point> = (0..3).map(|i| axpy(o, 1.0, rot(Point::new(0.0, r), 120.0 * i as f64 - 30.0))).collect();
    for t in [&left, &bottom, &right] {
        disks.extend(t.disks.iter().copied());
    }
    // Snap the boundary rows onto the exact port heights.
    let h2 = k.h_chan / 2.0;
    for p in &mut disks {
        for (v, lo, hi) in [(&mut p.y, cc - h2, cc + h2)] {
            if (*v - lo).abs() < 1e-7 {
                *v = lo;
            } else if (*v - hi).abs() < 1e-7 {
                *v = hi;
            }
        }
        if (p.x - (cc - h2)).abs() < 1e-7 {
            p.x = cc - h2;
        } else if (p.x - (cc + h2)).abs() < 1e-7 {
            p.x = cc + h2;
        }
        for v in [&mut p.x, &mut p.y] {
            if v.abs() < 1e-7 {
                *v = 0.0;
            } else if (*v - s).abs() < 1e-7 {
                *v = s;
            }
        }
    }
    if disks.iter().any(|p| p.x < -1e-9 || p.y < -1e-9 || p.x > s + 1e-9 || p.y > s + 1e-9) {
        return Err(GadgetError::Constraint("node arms leave the tile".into()));
    }
    let pockets: Vec<(Point, Point)> = starts.iter().map(|a| (axpy(o, 1.0, a.y_mid), axpy(o, 1.0, mid(a.c_vertex, a.d)))).collect();
    let spines = vec![left.spine, bottom.spine, right.spine];
    let bands = spines.clone();
    let keep_out = Arc::new(move |p: Point| {
        p.dist(&o) < 2.6 || pockets.iter().any(|&(y, m)| polyline_dist(p, &[y, m]) < 2.2) || bands.iter().any(|sp| polyline_dist(p, sp) < 1.4)
    });
    Ok(NodeBuild { disks, spines, center: o, keep_out })
}
