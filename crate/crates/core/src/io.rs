//! JSON instance/witness formats, witness verification and SVG rendering.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{validate_packing, Packing, Point, Rect, Tolerance, ViolationKind, ViolationReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub rect: Rect,
    pub disks: Vec<Point>,
    pub h: usize,
    pub k: usize,
}

impl Instance {
    pub fn new(rect: Rect, disks: Vec<Point>, h: usize, k: usize) -> Self {
        Instance { rect, disks, h, k }
    }

    pub fn packing(&self) -> Packing {
        Packing::from_centers(self.rect, &self.disks)
    }

    pub fn with_budgets(&self, h: usize, k: usize) -> Instance {
        Instance { h, k, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relocation {
    pub index: usize,
    pub to: Point,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub added: Vec<Point>,
    pub relocated: Vec<Relocation>,
}

impl Witness {
    /// The packing the witness describes: originals (with moves applied) then additions.
    pub fn apply(&self, inst: &Instance) -> Vec<Point> {
        let mut pts = inst.disks.clone();
        for r in &self.relocated {
            if r.index < pts.len() {
                pts[r.index] = r.to;
            }
        }
        pts.extend(self.added.iter().copied());
        pts
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid packing: {0}")]
    Geometry(ViolationReport),
}

pub fn parse_instance(bytes: &[u8], tol: &Tolerance) -> Result<Instance, IoError> {
    let inst: Instance = serde_json::from_slice(bytes).map_err(|e| IoError::Schema(e.to_string()))?;
    if !(inst.rect.a.is_finite() && inst.rect.b.is_finite() && inst.rect.a > 0.0 && inst.rect.b > 0.0) {
        return Err(IoError::Schema("rectangle sides must be positive and finite".into()));
    }
    validate_packing(&inst.packing(), tol).map_err(IoError::Geometry)?;
    Ok(inst)
}

/// Doubles are written in shortest round-trip form, so parsing gives back the same bits.
pub fn serialize_instance(inst: &Instance) -> Vec<u8> {
    serde_json::to_vec(inst).expect("instance serializes")
}

pub fn parse_witness(bytes: &[u8]) -> Result<Witness, IoError> {
    serde_json::from_slice(bytes).map_err(|e| IoError::Schema(e.to_string()))
}

pub fn serialize_witness(w: &Witness) -> Vec<u8> {
    serde_json::to_vec(w).expect("witness serializes")
}

pub fn verify_witness(inst: &Instance, w: &Witness, tol: &Tolerance) -> Result<(), ViolationReport> {
    let mut report = ViolationReport::default();
    if w.added.len() != inst.k {
        report.push(ViolationKind::WrongAddCount, vec![], w.added.len() as f64);
    }
    if w.relocated.len() > inst.h {
        report.push(ViolationKind::BudgetExceeded, vec![], w.relocated.len() as f64);
    }
    let mut seen = HashSet::new();
    for (j, r) in w.relocated.iter().enumerate() {
        if r.index >= inst.disks.len() || !seen.insert(r.index) {
            report.push(ViolationKind::BadIndex, vec![j], r.index as f64);
        }
    }
    if let Err(geo) = validate_packing(&Packing::from_centers(inst.rect, &w.apply(inst)), tol) {
        report.violations.extend(geo.violations);
    }
    report.into_result()
}

fn num(x: f64) -> String {
    let s = format!("{:.4}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// SVG drawing in instance coordinates with the y axis pointing up.
pub fn render_svg(inst: &Instance, w: Option<&Witness>) -> Vec<u8> {
    let (a, b) = (inst.rect.a, inst.rect.b);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="-0.5 -0.5 {} {}">"#,
        num(a + 1.0),
        num(b + 1.0)
    );
    s.push_str(
        "<style>.orig{fill:#d9d9d9;stroke:#333;stroke-width:0.04}\
         .added{fill:#e8a33d;stroke:#333;stroke-width:0.04}\
         .moved{fill:#4a90d9;stroke:#333;stroke-width:0.04}\
         .frame{fill:none;stroke:#000;stroke-width:0.06}</style>\n",
    );
    let _ = writeln!(s, r#"<rect class="frame" x="0" y="0" width="{}" height="{}"/>"#, num(a), num(b));
    let mut moved = vec![None; inst.disks.len()];
    if let Some(w) = w {
        for r in &w.relocated {
            if r.index < moved.len() {
                moved[r.index] = Some(r.to);
            }
        }
    }
    let mut circle = |p: Point, class: &str| {
        let _ = writeln!(s, r#"<circle class="{}" cx="{}" cy="{}" r="1"/>"#, class, num(p.x), num(b - p.y));
    };
    for (i, &p) in inst.disks.iter().enumerate() {
        match moved[i] {
            Some(to) => circle(to, "moved"),
            None => circle(p, "orig"),
        }
    }
    if let Some(w) = w {
        for &p in &w.added {
            circle(p, "added");
        }
    }
    s.push_str("</svg>\n");
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn parse_example() {
        let text = br#"{"rect":{"a":4,"b":4},"disks":[[1,1],[3,3]],"h":0,"k":1}"#;
        let inst = parse_instance(text, &tol()).unwrap();
        assert_eq!(inst.disks.len(), 2);
        assert_eq!(inst.k, 1);
        let back = parse_instance(&serialize_instance(&inst), &tol()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let inst = Instance::new(Rect::new(10.0, 7.5), vec![Point::new(1.0 + 1e-13, 2.0 / 3.0 + 1.0), Point::new(5.1, 3.3)], 1, 2);
        let back = parse_instance(&serialize_instance(&inst), &tol()).unwrap();
        for (p, q) in inst.disks.iter().zip(&back.disks) {
            assert_eq!(p.x.to_bits(), q.x.to_bits());
            assert_eq!(p.y.to_bits(), q.y.to_bits());
        }
    }

    #[test]
    fn overlapping_input_is_rejected() {
        let text = br#"{"rect":{"a":4,"b":4},"disks":[[1,1],[2,1]],"h":0,"k":1}"#;
        match parse_instance(text, &tol()) {
            Err(IoError::Geometry(r)) => assert!(r.has(ViolationKind::Overlap)),
            other => panic!("expected geometry error, got {other:?}"),
        }
        assert!(matches!(parse_instance(br#"{"rect":{"a":4,"b":4},"h":0,"k":1}"#, &tol()), Err(IoError::Schema(_))));
    }

    #[test]
    fn witness_checks() {
        let inst = Instance::new(Rect::new(4.0, 4.0), vec![], 0, 1);
        let ok = Witness { added: vec![Point::new(2.0, 2.0)], relocated: vec![] };
        assert!(verify_witness(&inst, &ok, &tol()).is_ok());
        let two = Witness { added: vec![Point::new(1.0, 1.0), Point::new(3.0, 3.0)], relocated: vec![] };
        assert!(verify_witness(&inst, &two, &tol()).unwrap_err().has(ViolationKind::WrongAddCount));

        let inst = Instance::new(Rect::new(4.0, 4.0), vec![Point::new(1.0, 1.0)], 0, 0);
        let self_move = Witness { added: vec![], relocated: vec![Relocation { index: 0, to: Point::new(1.0, 1.0) }] };
        assert!(verify_witness(&inst, &self_move, &tol()).unwrap_err().has(ViolationKind::BudgetExceeded));
        let bad = Witness { added: vec![], relocated: vec![Relocation { index: 3, to: Point::new(1.0, 1.0) }] };
        assert!(verify_witness(&inst.with_budgets(1, 0), &bad, &tol()).unwrap_err().has(ViolationKind::BadIndex));
    }

    #[test]
    fn svg_classes() {
        let one = Instance::new(Rect::new(4.0, 4.0), vec![Point::new(1.0, 1.0)], 0, 0);
        let svg = String::from_utf8(render_svg(&one, None)).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<rect").count(), 1);

        let two = Instance::new(Rect::new(6.0, 4.0), vec![Point::new(1.0, 1.0), Point::new(5.0, 1.0)], 1, 1);
        let w = Witness {
            added: vec![Point::new(3.0, 3.0)],
            relocated: vec![Relocation { index: 0, to: Point::new(1.0, 3.0) }],
        };
        let svg = String::from_utf8(render_svg(&two, Some(&w))).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches(r#"class="added""#).count(), 1);
        assert!(svg.contains(r#"<circle class="moved" cx="1" cy="1" r="1"/>"#));
        assert_eq!(svg, String::from_utf8(render_svg(&two, Some(&w))).unwrap());
    }
}
