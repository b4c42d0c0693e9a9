use serde::{Deserialize, Serialize};

/// Geometric constants of the hardness tiles. Lengths may be rounded up to
/// dyadic rationals so that exactly touching constructions gain a little
/// slack; angles are always exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileConstants {
    pub c: usize,
    /// Distance between the two rows of a channel, `2 + sqrt(3)`.
    pub h_chan: f64,
    /// Distance between consecutive disks of opposite rows, `2 sqrt(2 + sqrt(3))`.
    pub l_chan: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Distance from the pivot of a bend to its two corner disks, `2 sqrt(2 + sqrt(2))`.
    pub r_bend: f64,
    /// Height of the node triangle, `2 sqrt(3)`.
    pub h_node: f64,
    pub gamma: f64,
    /// Largest row gap that still leaves room for only one disk, `sqrt(4 sqrt(3) - 3) - 1`.
    pub gap_max: f64,
    pub gap_std: f64,
    pub node_gap_small: f64,
    pub node_gap_large: f64,
    /// Upward rounding bound; zero for the exact constants.
    pub round: f64,
}

pub const NODE_C: usize = 47;

/// Smallest multiple of the largest power of two not exceeding `delta` that
/// is at least `x`.
pub fn round_up(x: f64, delta: f64) -> f64 {
    if delta <= 0.0 {
        return x;
    }
    let pitch = dyadic_pitch(delta);
    (x / pitch).ceil() * pitch
}

pub fn dyadic_pitch(delta: f64) -> f64 {
    2f64.powi(delta.log2().floor() as i32)
}

impl TileConstants {
    pub fn exact() -> Self {
        let s3 = 3f64.sqrt();
        TileConstants {
            c: NODE_C,
            h_chan: 2.0 + s3,
            l_chan: 2.0 * (2.0 + s3).sqrt(),
            alpha: std::f64::consts::PI / 12.0,
            beta: std::f64::consts::PI / 8.0,
            r_bend: 2.0 * (2.0 + 2f64.sqrt()).sqrt(),
            h_node: 2.0 * s3,
            gamma: std::f64::consts::PI / 4.0,
            gap_max: (4.0 * s3 - 3.0).sqrt() - 1.0,
            gap_std: 0.5,
            node_gap_small: 2.0 - s3,
            node_gap_large: 4.0 - 2.0 * s3,
            round: 0.0,
        }
    }

    pub fn rounded(delta: f64) -> Self {
        let e = Self::exact();
        if !(delta > 0.0) {
            return e;
        }
        TileConstants {
            h_chan: round_up(e.h_chan, delta),
            l_chan: round_up(e.l_chan, delta),
            r_bend: round_up(e.r_bend, delta),
            h_node: round_up(e.h_node, delta),
            node_gap_small: round_up(e.node_gap_small, delta),
            node_gap_large: round_up(e.node_gap_large, delta),
            round: delta,
            ..e
        }
    }

    pub fn with_c(self, c: usize) -> Self {
        TileConstants { c, ..self }
    }

    pub fn side(&self) -> f64 {
        2.0 * self.c as f64
    }
}

impl Default for TileConstants {
    fn default() -> Self {
        Self::rounded(1e-6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let e = TileConstants::exact();
        assert!((e.h_chan - 3.732050807568877).abs() < 1e-12);
        assert!((e.l_chan - (1.0 + e.h_chan * e.h_chan).sqrt()).abs() < 1e-12);
        assert!((e.r_bend - 4.0 * (std::f64::consts::PI / 8.0).cos()).abs() < 1e-12);
        assert!((e.gamma - (std::f64::consts::PI / 3.0 - e.alpha)).abs() < 1e-12);
        assert!((e.gap_max - 0.98197).abs() < 1e-5);
        assert_eq!(e.c, 47);
    }

    #[test]
    fn rounding_goes_up_by_at_most_delta() {
        let e = TileConstants::exact();
        for d in [1e-6, 1e-3, 0.1] {
            let r = TileConstants::rounded(d);
            for (a, b) in [(e.h_chan, r.h_chan), (e.l_chan, r.l_chan), (e.r_bend, r.r_bend), (e.h_node, r.h_node), (e.node_gap_small, r.node_gap_small)] {
                assert!(b > a && b - a <= d, "{a} -> {b} at {d}");
                let q = b / dyadic_pitch(d);
                assert_eq!(q, q.round());
            }
            assert_eq!(r.alpha, e.alpha);
        }
        assert_eq!(TileConstants::rounded(0.0), e);
    }
}
