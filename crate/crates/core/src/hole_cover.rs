//! Greedy hole covers.

use crate::geom::{Point, Tolerance};
use crate::io::{Instance, Witness};
use crate::kernel::find_free_disk_with;

#[derive(Clone, Debug, PartialEq)]
pub enum HoleCoverOutcome {
    /// `k` free disks were found without moving anything.
    EarlyYes(Witness),
    /// Fewer than `k` disks cover every hole (at kernel resolution).
    Dense(Vec<Point>),
}

pub fn compute_hole_cover(inst: &Instance) -> HoleCoverOutcome {
    compute_hole_cover_with(inst, &Tolerance::default())
}

pub fn compute_hole_cover_with(inst: &Instance, tol: &Tolerance) -> HoleCoverOutcome {
    let mut all = inst.disks.clone();
    let mut holes = Vec::new();
    while holes.len() < inst.k {
        match find_free_disk_with(&all, inst.rect, tol) {
            Some(p) => {
                holes.push(p);
                all.push(p);
            }
            None => return HoleCoverOutcome::Dense(holes),
        }
    }
    if inst.k == 0 {
        return HoleCoverOutcome::Dense(holes);
    }
    HoleCoverOutcome::EarlyYes(Witness { added: holes, relocated: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::io::verify_witness;

    #[test]
    fn examples() {
        let big = Instance::new(Rect::new(10.0, 10.0), vec![], 0, 4);
        match compute_hole_cover(&big) {
            HoleCoverOutcome::EarlyYes(w) => {
                assert_eq!(w.added.len(), 4);
                assert!(verify_witness(&big, &w, &Tolerance::default()).is_ok());
            }
            other => panic!("{other:?}"),
        }
        let small = Instance::new(Rect::new(4.0, 4.0), vec![], 0, 5);
        match compute_hole_cover(&small) {
            HoleCoverOutcome::Dense(h) => assert_eq!(h.len(), 4),
            other => panic!("{other:?}"),
        }
        let none = Instance::new(Rect::new(4.0, 4.0), vec![Point::new(2.0, 2.0)], 3, 0);
        assert_eq!(compute_hole_cover(&none), HoleCoverOutcome::Dense(vec![]));
    }
}
