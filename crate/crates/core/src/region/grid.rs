use serde::Serialize;

use crate::error::{Error, Result};

/// The lattice `{k / n : k_j >= 0 integer, sum k_j = n}` in the simplex of
/// dimension `t - 1`, enumerated in ascending lexicographic order of `k`.
///
/// Two points are adjacent when they differ by moving one unit `1/n` of mass
/// between any two coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimplexGrid {
    dim: usize,
    resolution: usize,
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

impl SimplexGrid {
    pub fn new(dim: usize, resolution: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidParameter("grid dimension must be at least 1".into()));
        }
        if resolution < 1 {
            return Err(Error::InvalidParameter("grid resolution must be at least 1".into()));
        }
        let g = SimplexGrid { dim, resolution };
        g.checked_len()
            .ok_or_else(|| Error::InvalidParameter("grid is too large to enumerate".into()))?;
        Ok(g)
    }

    /// Number of lattice points `C(n + t - 1, t - 1)` without building the
    /// grid, or `None` on overflow.
    pub fn point_count(dim: usize, resolution: usize) -> Option<u64> {
        if dim == 0 {
            return None;
        }
        binomial((resolution + dim - 1) as u64, (dim - 1) as u64)
    }

    fn checked_len(&self) -> Option<usize> {
        SimplexGrid::point_count(self.dim, self.resolution).and_then(|c| usize::try_from(c).ok())
    }

    /// `t`, the number of coordinates.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n`
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.checked_len().expect("validated at construction")
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice coordinates of every point, concatenated in enumeration order.
    pub fn lattice(&self) -> Vec<u32> {
        let t = self.dim;
        let mut out = Vec::with_capacity(self.len() * t);
        let mut k = vec![0u32; t];
        k[t - 1] = self.resolution as u32;
        loop {
            out.extend_from_slice(&k);
            if !self.advance(&mut k) {
                return out;
            }
        }
    }

    /// Next composition in ascending lexicographic order.
    fn advance(&self, k: &mut [u32]) -> bool {
        let t = self.dim;
        if t == 1 {
            return false;
        }
        // rightmost position before the last that can grow
        let Some(j) = (0..t - 1).rev().find(|&j| {
            let used: u32 = k[..=j].iter().sum();
            used < self.resolution as u32
        }) else {
            return false;
        };
        k[j] += 1;
        for v in &mut k[j + 1..] {
            *v = 0;
        }
        let used: u32 = k[..t - 1].iter().sum();
        k[t - 1] = self.resolution as u32 - used;
        true
    }

    /// Index of lattice point `k` in enumeration order.
    pub fn rank(&self, k: &[u32]) -> usize {
        let t = self.dim;
        let mut r = self.resolution as u64;
        let mut idx: u64 = 0;
        for (j, &kj) in k.iter().enumerate().take(t - 1) {
            let m = (t - j) as u64;
            // compositions of r into m parts whose first part is below kj
            let all = binomial(r + m - 1, m - 1).expect("bounded by grid size");
            let rest = binomial(r - kj as u64 + m - 1, m - 1).expect("bounded by grid size");
            idx += all - rest;
            r -= kj as u64;
        }
        idx as usize
    }

    /// Barycentric coordinates `k / n`.
    pub fn point(&self, k: &[u32]) -> Vec<f64> {
        let n = self.resolution as f64;
        k.iter().map(|&v| v as f64 / n).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomial() {
        for (t, n, c) in [(3, 200, 20301), (2, 10, 11), (4, 5, 56), (1, 7, 1)] {
            let g = SimplexGrid::new(t, n).unwrap();
            assert_eq!(g.len(), c);
            assert_eq!(g.lattice().len(), c * t);
        }
    }

    #[test]
    fn enumeration_is_ascending_lexicographic() {
        let g = SimplexGrid::new(3, 2).unwrap();
        let pts: Vec<Vec<u32>> = g.lattice().chunks(3).map(|c| c.to_vec()).collect();
        let expected: Vec<Vec<u32>> = vec![
            vec![0, 0, 2],
            vec![0, 1, 1],
            vec![0, 2, 0],
            vec![1, 0, 1],
            vec![1, 1, 0],
            vec![2, 0, 0],
        ];
        assert_eq!(pts, expected);
    }

    #[test]
    fn rank_inverts_enumeration() {
        for (t, n) in [(3, 17), (4, 6), (2, 9), (5, 4)] {
            let g = SimplexGrid::new(t, n).unwrap();
            for (i, k) in g.lattice().chunks(t).enumerate() {
                assert_eq!(g.rank(k), i);
            }
        }
    }

    #[test]
    fn points_lie_on_simplex() {
        let g = SimplexGrid::new(3, 7).unwrap();
        for k in g.lattice().chunks(3) {
            let p = g.point(k);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }
}
