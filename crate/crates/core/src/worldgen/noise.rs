//! 2-D simplex noise over a seeded permutation table.

use crate::rng::SplitMix64;

const F2: f64 = 0.366_025_403_784_438_6; // (sqrt(3) - 1) / 2
const G2: f64 = 0.211_324_865_405_187_1; // (3 - sqrt(3)) / 6

const GRADIENTS: [(f64, f64); 8] =
    [(1.0, 2.0), (-1.0, 2.0), (1.0, -2.0), (-1.0, -2.0), (2.0, 1.0), (-2.0, 1.0), (2.0, -1.0), (-2.0, -1.0)];

/// A shuffled 0..=255 permutation, doubled to 512 entries so lattice hashes
/// never need a second wrap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationTable {
    perm: [u8; 512],
    seed: u64,
}

impl PermutationTable {
    pub fn new(seed: u64) -> Self {
        Self::from_rng(&mut SplitMix64::new(seed), seed)
    }

    /// Fisher-Yates over 0..=255, drawing `j = next % (i + 1)` for i = 255..=1.
    pub(crate) fn from_rng(rng: &mut SplitMix64, seed: u64) -> Self {
        let mut base: [u8; 256] = std::array::from_fn(|i| i as u8);
        for i in (1..256).rev() {
            let j = rng.below(i + 1);
            base.swap(i, j);
        }
        let perm = std::array::from_fn(|i| base[i & 255]);
        Self { perm, seed }
    }

    pub fn perm(&self) -> &[u8; 512] {
        &self.perm
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn hash(&self, i: usize, j: usize) -> usize {
        self.perm[i + self.perm[j] as usize] as usize
    }
}

pub fn build_permutation(seed: u64) -> PermutationTable {
    PermutationTable::new(seed)
}

fn corner(x: f64, y: f64, gradient: usize) -> f64 {
    let t = 0.5 - x * x - y * y;
    if t < 0.0 {
        0.0
    } else {
        let (gx, gy) = GRADIENTS[gradient];
        let t2 = t * t;
        t2 * t2 * (gx * x + gy * y)
    }
}

/// Simplex noise at `(x, y)`, clamped to `[-1, 1]`.
pub fn simplex2(table: &PermutationTable, x: f64, y: f64) -> f64 {
    let s = (x + y) * F2;
    let i = (x + s).floor();
    let j = (y + s).floor();
    let t = (i + j) * G2;
    let x0 = x - (i - t);
    let y0 = y - (j - t);

    let (i1, j1) = if x0 > y0 { (1, 0) } else { (0, 1) };
    let x1 = x0 - i1 as f64 + G2;
    let y1 = y0 - j1 as f64 + G2;
    let x2 = x0 - 1.0 + 2.0 * G2;
    let y2 = y0 - 1.0 + 2.0 * G2;

    let ii = (i as i64).rem_euclid(256) as usize;
    let jj = (j as i64).rem_euclid(256) as usize;
    let g0 = table.hash(ii, jj) % 8;
    let g1 = table.hash(ii + i1, jj + j1) % 8;
    let g2 = table.hash(ii + 1, jj + 1) % 8;

    let n = corner(x0, y0, g0) + corner(x1, y1, g1) + corner(x2, y2, g2);
    (70.0 * n).clamp(-1.0, 1.0)
}
