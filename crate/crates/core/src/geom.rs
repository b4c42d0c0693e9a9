//! Points, rectangles, tolerances and packing validation.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A point in the plane. Serialized as a two-element array `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist2(*self, *other).sqrt()
    }

    pub fn add(&self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An open disk of radius 1. Only the center is stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitDisk {
    pub center: Point,
}

impl UnitDisk {
    pub fn at(x: f64, y: f64) -> Self {
        UnitDisk { center: Point::new(x, y) }
    }
}

/// The axis-parallel rectangle `[0,a] x [0,b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub a: f64,
    pub b: f64,
}

impl Rect {
    pub fn new(a: f64, b: f64) -> Self {
        Rect { a, b }
    }

    /// Whether any unit disk fits at all.
    pub fn admits_disk(&self) -> bool {
        self.a >= 2.0 && self.b >= 2.0
    }

    /// Box of admissible centers, `[1,a-1] x [1,b-1]`, as `(x0, y0, x1, y1)`.
    pub fn center_box(&self) -> (f64, f64, f64, f64) {
        (1.0, 1.0, self.a - 1.0, self.b - 1.0)
    }

    pub fn area(&self) -> f64 {
        self.a * self.b
    }

    pub fn diagonal(&self) -> f64 {
        self.a.hypot(self.b)
    }

    /// Largest violation of the center box by `p` (0 when inside).
    pub fn excess(&self, p: Point) -> f64 {
        let (x0, y0, x1, y1) = self.center_box();
        let ex = (x0 - p.x).max(p.x - x1).max(0.0);
        let ey = (y0 - p.y).max(p.y - y1).max(0.0);
        ex.max(ey)
    }
}

/// Numeric policy shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Verification slack on closed inequalities.
    pub tau: f64,
    /// Margin used when a strict inequality is solved as a closed one.
    pub sigma: f64,
    /// Grid pitch of the feasibility kernel.
    pub delta: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { tau: 1e-9, sigma: 1e-6, delta: 0.05 }
    }
}

impl Tolerance {
    pub fn is_valid(&self) -> bool {
        self.tau > 0.0 && self.tau < self.sigma && self.delta > 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Packing {
    pub rect: Rect,
    pub disks: Vec<UnitDisk>,
}

impl Packing {
    pub fn from_centers(rect: Rect, centers: &[Point]) -> Self {
        Packing { rect, disks: centers.iter().map(|&center| UnitDisk { center }).collect() }
    }

    pub fn centers(&self) -> Vec<Point> {
        self.disks.iter().map(|d| d.center).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    Overlap,
    OutOfBounds,
    NonFinite,
    WrongAddCount,
    BudgetExceeded,
    BadIndex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub indices: Vec<usize>,
    /// Center distance for overlaps, distance outside the center box for
    /// out-of-bounds disks, offending count otherwise.
    pub measured: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, kind: ViolationKind, indices: Vec<usize>, measured: f64) {
        self.violations.push(Violation { kind, indices, measured });
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn into_result(self) -> Result<(), ViolationReport> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{:?} {:?} measured={}", v.kind, v.indices, v.measured)?;
        }
        Ok(())
    }
}

impl std::error::Error for ViolationReport {}

pub fn dist2(p: Point, q: Point) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    dx * dx + dy * dy
}

pub fn disks_disjoint(d1: &UnitDisk, d2: &UnitDisk, tol: &Tolerance) -> bool {
    let t = 2.0 - tol.tau;
    dist2(d1.center, d2.center) >= t * t
}

/// Checks both packing invariants and reports every offending disk and pair.
pub fn validate_packing(p: &Packing, tol: &Tolerance) -> Result<(), ViolationReport> {
    let mut report = ViolationReport::default();
    let centers = p.centers();
    for (i, c) in centers.iter().enumerate() {
        if !c.is_finite() {
            report.push(ViolationKind::NonFinite, vec![i], f64::NAN);
            continue;
        }
        let ex = p.rect.excess(*c);
        if ex > tol.tau {
            report.push(ViolationKind::OutOfBounds, vec![i], ex);
        }
    }
    let finite: Vec<usize> = (0..centers.len()).filter(|&i| centers[i].is_finite()).collect();
    let pts: Vec<Point> = finite.iter().map(|&i| centers[i]).collect();
    let index = SpatialIndex::new(&pts, 2.0);
    let t = 2.0 - tol.tau;
    for (a, &pa) in pts.iter().enumerate() {
        index.for_each_near(pa, t, |b| {
            if b > a {
                let d2 = dist2(pa, pts[b]);
                if d2 < t * t {
                    report.push(ViolationKind::Overlap, vec![finite[a], finite[b]], d2.sqrt());
                }
            }
        });
    }
    report.into_result()
}

/// Upper bound on pairwise disjoint unit disks inside a circle of radius `r`.
pub fn area_bound(r: f64) -> usize {
    (PI * r * r).floor() as usize
}

/// Uniform bucket grid over a point set for fixed-radius neighbor queries.
#[derive(Clone, Debug)]
pub struct SpatialIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Point>,
}

impl SpatialIndex {
    pub fn new(points: &[Point], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(cell, *p)).or_default().push(i);
        }
        SpatialIndex { cell, buckets, points: points.to_vec() }
    }

    fn key(cell: f64, p: Point) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Calls `f` with every index whose point lies within distance `r` of `q`
    /// (plus possibly a few slightly farther ones; callers filter exactly).
    pub fn for_each_near(&self, q: Point, r: f64, mut f: impl FnMut(usize)) {
        let reach = (r / self.cell).ceil() as i64;
        let (cx, cy) = Self::key(self.cell, q);
        for ix in cx - reach..=cx + reach {
            for iy in cy - reach..=cy + reach {
                if let Some(v) = self.buckets.get(&(ix, iy)) {
                    for &i in v {
                        f(i);
                    }
                }
            }
        }
    }

    /// Smallest distance from `q` to an indexed point within `r`, if any.
    pub fn nearest_within(&self, q: Point, r: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        self.for_each_near(q, r, |i| {
            let d = dist2(q, self.points[i]);
            if d <= r * r && best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        });
        best.map(f64::sqrt)
    }

    /// Whether some indexed point is strictly closer than `r` to `q`.
    pub fn any_closer(&self, q: Point, r: f64) -> bool {
        let reach = (r / self.cell).ceil() as i64;
        let (cx, cy) = Self::key(self.cell, q);
        let r2 = r * r;
        for ix in cx - reach..=cx + reach {
            for iy in cy - reach..=cy + reach {
                if let Some(v) = self.buckets.get(&(ix, iy)) {
                    if v.iter().any(|&i| dist2(q, self.points[i]) < r2) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist2_examples() {
        assert_eq!(dist2(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 25.0);
        assert_eq!(dist2(Point::new(1.0, 1.0), Point::new(1.0, 1.0)), 0.0);
        assert_eq!(dist2(Point::new(0.0, 0.0), Point::new(2.0, 0.0)), 4.0);
    }

    #[test]
    fn disjointness_examples() {
        let tol = Tolerance::default();
        assert!(disks_disjoint(&UnitDisk::at(1.0, 1.0), &UnitDisk::at(3.0, 1.0), &tol));
        assert!(!disks_disjoint(&UnitDisk::at(1.0, 1.0), &UnitDisk::at(2.5, 1.0), &tol));
        assert!(disks_disjoint(&UnitDisk::at(1.0, 1.0), &UnitDisk::at(3.0 - 1e-12, 1.0), &tol));
    }

    #[test]
    fn validation_examples() {
        let tol = Tolerance::default();
        let r = Rect::new(4.0, 4.0);
        let four = [(1.0, 1.0), (1.0, 3.0), (3.0, 1.0), (3.0, 3.0)].map(|(x, y)| Point::new(x, y));
        assert!(validate_packing(&Packing::from_centers(r, &four), &tol).is_ok());

        let out = validate_packing(&Packing::from_centers(r, &[Point::new(0.5, 2.0)]), &tol).unwrap_err();
        assert!(out.has(ViolationKind::OutOfBounds));

        let pair = [Point::new(1.0, 1.0), Point::new(2.0, 1.0)];
        let err = validate_packing(&Packing::from_centers(r, &pair), &tol).unwrap_err();
        assert_eq!(err.violations.len(), 1);
        assert_eq!(err.violations[0].kind, ViolationKind::Overlap);
        assert_eq!(err.violations[0].indices, vec![0, 1]);
        assert!((err.violations[0].measured - 1.0).abs() < 1e-15);
    }

    #[test]
    fn area_bound_examples() {
        assert_eq!(area_bound(5.0), 78);
        assert_eq!(area_bound(1.0), 3);
        assert_eq!(area_bound(2.0), 12);
    }

    #[test]
    fn spatial_index_matches_scan() {
        let pts: Vec<Point> = (0..50).map(|i| Point::new((i * 37 % 19) as f64 * 0.7, (i * 11 % 13) as f64 * 0.9)).collect();
        let idx = SpatialIndex::new(&pts, 2.0);
        let q = Point::new(5.0, 5.0);
        let mut got = vec![];
        idx.for_each_near(q, 3.0, |i| {
            if pts[i].dist(&q) < 3.0 {
                got.push(i)
            }
        });
        got.sort();
        let want: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].dist(&q) < 3.0).collect();
        assert_eq!(got, want);
    }
}
