use serde::Serialize;

use super::lcoords::{from_l_coordinates, to_l_coordinates};
use super::mask::RegionMask;
use crate::cpt::{common_ranking, regret_unchecked};
use crate::error::{Error, Result};
use crate::game::{Game, GamePreferences};

/// Upper bound on member pairs sampled for the midpoint test.
pub const MIDPOINT_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MidpointCheck {
    pub ordering: Vec<usize>,
    pub pairs_tested: usize,
    /// Pairs whose l-space midpoint maps back outside the region.
    pub failures: usize,
    /// Smallest regret seen at a midpoint.
    pub worst_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub component_count: usize,
    pub member_count: usize,
    pub fuzzy_band_count: usize,
    pub similarly_ranked: bool,
    /// Present only when the two outcome profiles share a ranking.
    pub midpoint_check: Option<MidpointCheck>,
    /// Coordinates removed before the remaining outcome profiles become
    /// similarly ranked, following the support-reduction argument.
    pub support_reduction_depth: usize,
}

impl ConvexityReport {
    pub fn is_connected(&self) -> bool {
        self.component_count == 1
    }
}

/// Repeatedly drops the lower-ranked coordinate `j2` of the first pair with
/// `x_{j1} > x_{j2}` and `y_{j1} < y_{j2}` until `x` and `y` are similarly
/// ranked on what is left; returns the number of removals.
pub fn support_reduction_depth(x: &[f64], y: &[f64]) -> usize {
    let mut live: Vec<usize> = (0..x.len()).collect();
    let mut depth = 0;
    while common_ranking(&live, x, y).is_none() {
        let mut by_x = live.clone();
        by_x.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
        let j2 = by_x
            .iter()
            .enumerate()
            .find_map(|(pos, &j1)| {
                by_x[pos + 1..]
                    .iter()
                    .find(|&&j2| x[j1] > x[j2] && y[j1] < y[j2])
                    .copied()
            })
            .expect("a reversed pair exists when no common ranking does");
        live.retain(|&j| j != j2);
        depth += 1;
    }
    depth
}

/// Connectivity and convexity diagnostics for a rasterized `C(i, s_i, d_i)`.
///
/// When the outcome profiles of `s_i` and `d_i` are similarly ranked, member
/// pairs are mapped to weighted cumulative coordinates along the shared
/// ranking; each midpoint there is mapped back and its regret is checked.
pub fn convexity_probe(
    mask: &RegionMask,
    game: &Game,
    prefs: &GamePreferences,
    i: usize,
    s_i: usize,
    d_i: usize,
) -> Result<ConvexityReport> {
    prefs.check_for(game)?;
    game.check_player(i)?;
    game.check_strategy(i, s_i)?;
    game.check_strategy(i, d_i)?;
    let grid = mask.grid();
    if grid.dim() != game.opponent_size(i) {
        return Err(Error::LengthMismatch {
            expected: game.opponent_size(i),
            found: grid.dim(),
        });
    }
    let x = game.outcome_profile(i, s_i);
    let y = game.outcome_profile(i, d_i);
    let pi = prefs.get(i);
    let all: Vec<usize> = (0..x.len()).collect();
    let ranking = common_ranking(&all, &x, &y);

    let midpoint_check = match &ranking {
        None => None,
        Some(order) => {
            let t = grid.dim();
            let lattice = grid.lattice();
            let members: Vec<usize> = (0..grid.len()).filter(|&k| mask.is_member(k)).collect();
            let m = members.len();
            let w = &pi.weight_gain;
            let mut check = MidpointCheck {
                ordering: order.clone(),
                pairs_tested: 0,
                failures: 0,
                worst_regret: f64::INFINITY,
            };
            if m >= 2 {
                let samples = MIDPOINT_SAMPLES.min(m * (m - 1) / 2);
                for s in 0..samples {
                    let a = members[(s * 7919) % m];
                    let b = members[(s * 104_729 + m / 2 + 1) % m];
                    if a == b {
                        continue;
                    }
                    let pa = grid.point(&lattice[a * t..(a + 1) * t]);
                    let pb = grid.point(&lattice[b * t..(b + 1) * t]);
                    let la = to_l_coordinates(&pa, order, w)?;
                    let lb = to_l_coordinates(&pb, order, w)?;
                    let mid = from_l_coordinates(&la.midpoint(&lb)?, w);
                    let r = regret_unchecked(&mid, &x, &y, pi);
                    check.pairs_tested += 1;
                    check.worst_regret = check.worst_regret.min(r);
                    if r < -mask.tolerance() {
                        check.failures += 1;
                    }
                }
            }
            Some(check)
        }
    };

    Ok(ConvexityReport {
        component_count: mask.component_count(),
        member_count: mask.member_count(),
        fuzzy_band_count: mask.fuzzy_band_count(),
        similarly_ranked: ranking.is_some(),
        midpoint_check,
        support_reduction_depth: support_reduction_depth(&x, &y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{rasterize_deviation_region, SimplexGrid};

    #[test]
    fn depth_zero_when_similarly_ranked() {
        assert_eq!(support_reduction_depth(&[3.0, 2.0, 1.0], &[1.0, 1.0, 0.0]), 0);
    }

    #[test]
    fn depth_counts_removals() {
        assert_eq!(support_reduction_depth(&[2.0, 1.0], &[0.0, 3.0]), 1);
        // fully reversed on three coordinates needs two removals
        assert_eq!(support_reduction_depth(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0]), 2);
    }

    #[test]
    fn linear_half_simplex_is_convex_in_l() {
        // identity prefs, x and y similarly ranked
        let g = Game::bimatrix(
            &[vec![3.0, 2.0, 0.0], vec![1.0, 1.0, 1.0]],
            &[vec![0.0; 3], vec![0.0; 3]],
        )
        .unwrap();
        let prefs = GamePreferences::expected_utility(2);
        let grid = SimplexGrid::new(3, 40).unwrap();
        let mask = rasterize_deviation_region(&g, &prefs, 0, 0, 1, grid, 1e-9).unwrap();
        let report = convexity_probe(&mask, &g, &prefs, 0, 0, 1).unwrap();
        assert!(report.similarly_ranked);
        assert!(report.is_connected());
        let mc = report.midpoint_check.unwrap();
        assert!(mc.pairs_tested > 100);
        assert_eq!(mc.failures, 0);
    }
}
