use rayon::prelude::*;
use serde::Serialize;

use super::grid::SimplexGrid;
use crate::cpt::regret_unchecked;
use crate::error::{Error, Result};
use crate::game::{Game, GamePreferences};

/// Grid points with regret at or above `-MEMBERSHIP_TOLERANCE` are members.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Points with `|regret|` below this are counted as grazing the boundary.
pub const FUZZY_BAND: f64 = 1e-4;

/// A rasterized subset of a simplex together with its connected components.
///
/// `regrets[k]` is the value whose sign decides membership of point `k`: a
/// single regret for one deviation, the minimum over deviations for an
/// intersection. `labels[k]` is the component id of a member point, numbered
/// from 0 in order of first appearance, and `-1` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMask {
    grid: SimplexGrid,
    tolerance: f64,
    members: Vec<bool>,
    labels: Vec<i64>,
    regrets: Vec<f64>,
    component_count: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

impl RegionMask {
    /// Builds a mask from per-point regrets; a point is a member iff its
    /// regret is at least `-tolerance`.
    pub fn from_regrets(grid: SimplexGrid, regrets: Vec<f64>, tolerance: f64) -> Result<Self> {
        if regrets.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: regrets.len(),
            });
        }
        if !(tolerance >= 0.0) {
            return Err(Error::InvalidParameter("tolerance must be non-negative".into()));
        }
        let members = regrets.iter().map(|&r| r >= -tolerance).collect();
        Ok(RegionMask::labeled(grid, tolerance, members, regrets))
    }

    /// The whole simplex.
    pub fn full(grid: SimplexGrid) -> Self {
        let n = grid.len();
        RegionMask::labeled(grid, MEMBERSHIP_TOLERANCE, vec![true; n], vec![f64::INFINITY; n])
    }

    fn labeled(grid: SimplexGrid, tolerance: f64, members: Vec<bool>, regrets: Vec<f64>) -> Self {
        let t = grid.dim();
        let lattice = grid.lattice();
        let mut uf = UnionFind::new(members.len());
        let mut neighbour = vec![0u32; t];
        for (idx, k) in lattice.chunks(t).enumerate() {
            if !members[idx] {
                continue;
            }
            for from in (0..t).filter(|&a| k[a] > 0) {
                for to in (0..t).filter(|&b| b != from) {
                    neighbour.copy_from_slice(k);
                    neighbour[from] -= 1;
                    neighbour[to] += 1;
                    let j = grid.rank(&neighbour);
                    if j < idx && members[j] {
                        uf.union(idx, j);
                    }
                }
            }
        }
        let mut labels = vec![-1i64; members.len()];
        let mut root_label: Vec<i64> = vec![-1; members.len()];
        let mut next = 0i64;
        for idx in 0..members.len() {
            if !members[idx] {
                continue;
            }
            let root = uf.find(idx);
            if root_label[root] < 0 {
                root_label[root] = next;
                next += 1;
            }
            labels[idx] = root_label[root];
        }
        RegionMask {
            grid,
            tolerance,
            members,
            labels,
            regrets,
            component_count: next as usize,
        }
    }

    pub fn grid(&self) -> &SimplexGrid {
        &self.grid
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn regrets(&self) -> &[f64] {
        &self.regrets
    }

    pub fn is_member(&self, index: usize) -> bool {
        self.members[index]
    }

    pub fn member_count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// Number of points with `|regret| < FUZZY_BAND`.
    pub fn fuzzy_band_count(&self) -> usize {
        self.regrets.iter().filter(|r| r.abs() < FUZZY_BAND).count()
    }

    /// Component id of the grid point nearest to `p`, or `None` if that
    /// point is not a member.
    pub fn component_at(&self, p: &[f64]) -> Result<Option<i64>> {
        let k = self.nearest_lattice_point(p)?;
        let l = self.labels[self.grid.rank(&k)];
        Ok((l >= 0).then_some(l))
    }

    /// Lattice point nearest to `p` by largest-remainder rounding of `n p`.
    pub fn nearest_lattice_point(&self, p: &[f64]) -> Result<Vec<u32>> {
        if p.len() != self.grid.dim() {
            return Err(Error::LengthMismatch {
                expected: self.grid.dim(),
                found: p.len(),
            });
        }
        crate::cpt::validate_probabilities(p)?;
        let n = self.grid.resolution();
        let scaled: Vec<f64> = p.iter().map(|v| v * n as f64).collect();
        let mut k: Vec<u32> = scaled.iter().map(|v| v.floor() as u32).collect();
        let assigned: usize = k.iter().map(|&v| v as usize).sum();
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = scaled[a] - scaled[a].floor();
            let rb = scaled[b] - scaled[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &j in order.iter().take(n.saturating_sub(assigned)) {
            k[j] += 1;
        }
        Ok(k)
    }
}

/// Evaluates `f` at every grid point in parallel; output order follows the
/// lattice enumeration regardless of scheduling.
fn evaluate<F>(grid: &SimplexGrid, f: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let t = grid.dim();
    let lattice = grid.lattice();
    lattice
        .par_chunks(t)
        .map(|k| f(&grid.point(k)))
        .collect()
}

fn check_region_args(
    game: &Game,
    prefs: &GamePreferences,
    i: usize,
    strategies: &[usize],
    grid: &SimplexGrid,
    tolerance: f64,
) -> Result<()> {
    prefs.check_for(game)?;
    game.check_player(i)?;
    for &s in strategies {
        game.check_strategy(i, s)?;
    }
    if grid.dim() != game.opponent_size(i) {
        return Err(Error::LengthMismatch {
            expected: game.opponent_size(i),
            found: grid.dim(),
        });
    }
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidParameter("tolerance must be non-negative".into()));
    }
    Ok(())
}

/// `C(i, s_i, d_i)` on `grid`: the opponent distributions `p` under which
/// player `i`, told `s_i`, weakly prefers obeying to playing `d_i`.
pub fn rasterize_deviation_region(
    game: &Game,
    prefs: &GamePreferences,
    i: usize,
    s_i: usize,
    d_i: usize,
    grid: SimplexGrid,
    tolerance: f64,
) -> Result<RegionMask> {
    check_region_args(game, prefs, i, &[s_i, d_i], &grid, tolerance)?;
    let x = game.outcome_profile(i, s_i);
    let y = game.outcome_profile(i, d_i);
    let pi = prefs.get(i);
    let regrets = evaluate(&grid, |p| regret_unchecked(p, &x, &y, pi));
    RegionMask::from_regrets(grid, regrets, tolerance)
}

/// `C(i, s_i)`: the intersection of `C(i, s_i, d_i)` over all `d_i != s_i`,
/// computed in one pass.
pub fn rasterize_signal_region(
    game: &Game,
    prefs: &GamePreferences,
    i: usize,
    s_i: usize,
    grid: SimplexGrid,
    tolerance: f64,
) -> Result<RegionMask> {
    check_region_args(game, prefs, i, &[s_i], &grid, tolerance)?;
    let x = game.outcome_profile(i, s_i);
    let ys: Vec<Vec<f64>> = (0..game.strategy_counts()[i])
        .filter(|&d| d != s_i)
        .map(|d| game.outcome_profile(i, d))
        .collect();
    let pi = prefs.get(i);
    let regrets = evaluate(&grid, |p| {
        ys.iter()
            .map(|y| regret_unchecked(p, &x, y, pi))
            .fold(f64::INFINITY, f64::min)
    });
    RegionMask::from_regrets(grid, regrets, tolerance)
}

/// Pointwise intersection; the regret of a point is the minimum over the
/// inputs and components are relabeled.
pub fn intersect_regions(masks: &[RegionMask]) -> Result<RegionMask> {
    let first = masks
        .first()
        .ok_or_else(|| Error::InvalidParameter("no masks to intersect".into()))?;
    if masks.iter().any(|m| m.grid != first.grid) {
        return Err(Error::GridMismatch);
    }
    let n = first.grid.len();
    let mut members = vec![true; n];
    let mut regrets = vec![f64::INFINITY; n];
    for m in masks {
        for k in 0..n {
            members[k] &= m.members[k];
            regrets[k] = regrets[k].min(m.regrets[k]);
        }
    }
    let tolerance = masks.iter().map(|m| m.tolerance).fold(0.0, f64::max);
    Ok(RegionMask::labeled(first.grid, tolerance, members, regrets))
}

pub fn component_count(mask: &RegionMask) -> usize {
    mask.component_count()
}

/// Component counts of the same region at resolution `n` and `n / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResolutionCheck {
    pub resolution: usize,
    pub components: usize,
    pub coarse_resolution: usize,
    pub coarse_components: usize,
}

impl ResolutionCheck {
    pub fn agrees(&self) -> bool {
        self.components == self.coarse_components
    }

    /// Human-readable warning when the two counts differ.
    pub fn warning(&self) -> Option<String> {
        (!self.agrees()).then(|| {
            format!(
                "component count differs between n={} ({}) and n={} ({})",
                self.resolution, self.components, self.coarse_resolution, self.coarse_components
            )
        })
    }
}

/// Rasterizes via `build` at `n` and at `max(n / 2, 1)` and reports both
/// component counts. The mask at `n` is returned alongside.
pub fn check_resolution<F>(dim: usize, n: usize, build: F) -> Result<(RegionMask, ResolutionCheck)>
where
    F: Fn(SimplexGrid) -> Result<RegionMask>,
{
    let fine = build(SimplexGrid::new(dim, n)?)?;
    let coarse_n = (n / 2).max(1);
    let coarse = build(SimplexGrid::new(dim, coarse_n)?)?;
    let check = ResolutionCheck {
        resolution: n,
        components: fine.component_count(),
        coarse_resolution: coarse_n,
        coarse_components: coarse.component_count(),
    };
    Ok((fine, check))
}
