//! Blue/red colorings of the packed disks and families of them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Blue,
    Red,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<Color>,
}

impl Coloring {
    pub fn all(n: usize, c: Color) -> Self {
        Coloring { colors: vec![c; n] }
    }

    /// Blue exactly on `blue`, red elsewhere.
    pub fn with_blue(n: usize, blue: &[usize]) -> Self {
        let mut c = Coloring::all(n, Color::Red);
        for &i in blue {
            c.colors[i] = Color::Blue;
        }
        c
    }

    /// Bit `i` is set when disk `i` is blue. Only meaningful for `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Coloring {
            colors: (0..n).map(|i| if mask >> i & 1 == 1 { Color::Blue } else { Color::Red }).collect(),
        }
    }

    pub fn mask(&self) -> u64 {
        self.colors.iter().enumerate().filter(|(_, &c)| c == Color::Blue).fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn is_blue(&self, i: usize) -> bool {
        self.colors[i] == Color::Blue
    }

    pub fn blue(&self) -> Vec<usize> {
        (0..self.colors.len()).filter(|&i| self.is_blue(i)).collect()
    }

    pub fn red(&self) -> Vec<usize> {
        (0..self.colors.len()).filter(|&i| !self.is_blue(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColoringStrategy {
    Exhaustive,
    Randomized { samples: usize, seed: u64 },
    NSSUniversal { t: usize },
}

pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringError {
    #[error("exhaustive colorings requested for {n} disks (limit {limit})")]
    ExhaustiveLimitExceeded { n: usize, limit: usize },
    #[error("universality check limited to n <= 12 and t <= 4 (got n={n}, t={t})")]
    ScaleError { n: usize, t: usize },
    #[error("universal family too large for n={n}, t={t}")]
    FamilyTooLarge { n: usize, t: usize },
}

/// Number of disks whose color has to be right: `h + ceil(25 pi (h + 2k))`.
pub fn relevant_bound(h: usize, k: usize) -> usize {
    h + (25.0 * PI * (h + 2 * k) as f64).ceil() as usize
}

pub fn enumerate_colorings(
    n: usize,
    strat: ColoringStrategy,
) -> Result<Box<dyn Iterator<Item = Coloring> + Send>, ColoringError> {
    match strat {
        ColoringStrategy::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(ColoringError::ExhaustiveLimitExceeded { n, limit: EXHAUSTIVE_LIMIT });
            }
            Ok(Box::new((0..1u64 << n).map(move |m| Coloring::from_mask(n, m))))
        }
        ColoringStrategy::Randomized { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(Box::new((0..samples).map(move |_| Coloring {
                colors: (0..n).map(|_| if rng.gen::<bool>() { Color::Blue } else { Color::Red }).collect(),
            })))
        }
        ColoringStrategy::NSSUniversal { t } => Ok(Box::new(linear_universal(n, t)?.into_iter())),
    }
}

/// Colorings with at most `h` blue disks, fewest blue first, then
/// lexicographic in the blue index set.
pub fn low_blue_colorings(n: usize, h: usize) -> impl Iterator<Item = Coloring> {
    (0..=h.min(n)).flat_map(move |size| Combinations::new(n, size).map(move |blue| Coloring::with_blue(n, &blue)))
}

/// Lexicographic `size`-subsets of `0..n`.
pub struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, size: usize) -> Self {
        Combinations { n, cur: (size <= n).then(|| (0..size).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.cur = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Exhaustive check that every disjoint `(B, R)` with `|B ∪ R| <= t` is
/// matched by some coloring (blue on `B`, red on `R`).
pub fn is_universal(family: &[Coloring], n: usize, t: usize) -> Result<bool, ColoringError> {
    if n > 12 || t > 4 {
        return Err(ColoringError::ScaleError { n, t });
    }
    let size = t.min(n);
    let masks: Vec<u64> = family.iter().filter(|c| c.colors.len() == n).map(Coloring::mask).collect();
    for s in Combinations::new(n, size) {
        let mut seen = vec![false; 1 << size];
        for &m in &masks {
            let mut pat = 0usize;
            for (b, &i) in s.iter().enumerate() {
                pat |= ((m >> i & 1) as usize) << b;
            }
            seen[pat] = true;
        }
        if seen.iter().any(|x| !x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// GF(2^m) multiplication modulo a primitive polynomial.
fn gf_mul(mut a: u32, mut b: u32, m: u32, poly: u32) -> u32 {
    let mut r = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= poly;
        }
    }
    r
}

const PRIMITIVE: [u32; 17] = [
    0, 0b11, 0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10001001, 0b100011101, 0b1000010001, 0b10000001001,
    0b100000000101, 0b1000001010011, 0b10000000011011, 0b100010001000011, 0b1000000000000011, 0b10001000000001011,
];

/// `t`-universal family from a binary BCH-style parity-check matrix.
///
/// Disk `i` gets the column `(1, b, b^3, ..., b^(2s-1))` with `b = i + 1` in
/// GF(2^m) and `2s + 1 >= t`. Any `t` such columns are linearly independent,
/// so the colorings `i -> <v, column_i>` over all vectors `v` show every
/// pattern on every `t` disks.
pub fn linear_universal(n: usize, t: usize) -> Result<Vec<Coloring>, ColoringError> {
    if t == 0 || n == 0 {
        return Ok(vec![Coloring::all(n, Color::Red)]);
    }
    let mut m = 1u32;
    while (1usize << m) <= n {
        m += 1;
    }
    let s = t / 2;
    let bits = 1 + s as u32 * m;
    if m as usize >= PRIMITIVE.len() || bits > 24 {
        return Err(ColoringError::FamilyTooLarge { n, t });
    }
    let poly = PRIMITIVE[m as usize];
    let columns: Vec<u64> = (0..n)
        .map(|i| {
            let b = i as u32 + 1;
            let b2 = gf_mul(b, b, m, poly);
            let mut col = 1u64;
            let mut pw = b;
            for r in 0..s {
                col |= (pw as u64) << (1 + r as u32 * m);
                pw = gf_mul(pw, b2, m, poly);
            }
            col
        })
        .collect();
    Ok((0..1u64 << bits)
        .map(|v| Coloring {
            colors: columns
                .iter()
                .map(|&c| if (c & v).count_ones() % 2 == 1 { Color::Blue } else { Color::Red })
                .collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(relevant_bound(0, 0), 0);
        assert_eq!(relevant_bound(0, 1), 158);
        assert_eq!(relevant_bound(1, 1), 237);
    }

    #[test]
    fn exhaustive_small() {
        let fam: Vec<_> = enumerate_colorings(2, ColoringStrategy::Exhaustive).unwrap().collect();
        assert_eq!(fam.len(), 4);
        let distinct: std::collections::HashSet<_> = fam.iter().collect();
        assert_eq!(distinct.len(), 4);
        let five: Vec<_> = enumerate_colorings(5, ColoringStrategy::Exhaustive).unwrap().collect();
        assert!(is_universal(&five, 5, 4).unwrap());
        assert!(matches!(
            enumerate_colorings(21, ColoringStrategy::Exhaustive),
            Err(ColoringError::ExhaustiveLimitExceeded { .. })
        ));
    }

    #[test]
    fn universality_checker() {
        let fam: Vec<_> = enumerate_colorings(4, ColoringStrategy::Exhaustive).unwrap().collect();
        assert!(is_universal(&fam, 4, 4).unwrap());
        assert!(!is_universal(&[Coloring::all(2, Color::Blue)], 2, 1).unwrap());
        assert_eq!(is_universal(&fam, 13, 2), Err(ColoringError::ScaleError { n: 13, t: 2 }));
    }

    #[test]
    fn linear_family_is_universal() {
        for n in 1..=12 {
            for t in 1..=4 {
                let fam = linear_universal(n, t).unwrap();
                assert!(is_universal(&fam, n, t).unwrap(), "n={n} t={t}");
            }
        }
        let fam: Vec<_> = enumerate_colorings(10, ColoringStrategy::NSSUniversal { t: 3 }).unwrap().collect();
        assert!(is_universal(&fam, 10, 3).unwrap());
        assert!(fam.len() < 1 << 10);
    }

    #[test]
    fn randomized_is_reproducible() {
        let a: Vec<_> = enumerate_colorings(9, ColoringStrategy::Randomized { samples: 20, seed: 5 }).unwrap().collect();
        let b: Vec<_> = enumerate_colorings(9, ColoringStrategy::Randomized { samples: 20, seed: 5 }).unwrap().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn low_blue_order() {
        let v: Vec<_> = low_blue_colorings(3, 2).map(|c| c.blue()).collect();
        assert_eq!(v, vec![vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]);
    }
}
