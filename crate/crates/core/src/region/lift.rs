use serde::Serialize;

use crate::cpt::validate_probabilities;
use crate::error::{Error, Result};
use crate::game::{cpt_deviation_slacks, Game, GamePreferences, JointDistribution};

/// Builds `mu(s_i, s_{-i}) = q_i(s_i) * p^{s_i}(s_{-i})`.
///
/// `points[s_i]` is the opponent distribution attached to signal `s_i`; it is
/// ignored (and may be empty) whenever `q_i(s_i) = 0`.
pub fn lift_to_joint(
    game: &Game,
    i: usize,
    points: &[Vec<f64>],
    signal_mix: &[f64],
) -> Result<JointDistribution> {
    game.check_player(i)?;
    let m = game.strategy_counts()[i];
    for len in [points.len(), signal_mix.len()] {
        if len != m {
            return Err(Error::LengthMismatch {
                expected: m,
                found: len,
            });
        }
    }
    validate_probabilities(signal_mix)?;
    let mut probs = vec![0.0; game.joint_size()];
    for (s_i, (&q, p)) in signal_mix.iter().zip(points).enumerate() {
        if q == 0.0 {
            continue;
        }
        if p.len() != game.opponent_size(i) {
            return Err(Error::LengthMismatch {
                expected: game.opponent_size(i),
                found: p.len(),
            });
        }
        validate_probabilities(p)?;
        for (k, &pk) in game.slice_indices(i, s_i).into_iter().zip(p) {
            probs[k] = q * pk;
        }
    }
    JointDistribution::for_game(game, probs)
}

/// Signal mix and per-signal conditionals of a joint distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub signal_mix: Vec<f64>,
    /// `None` where the marginal is at or below the tolerance.
    pub conditionals: Vec<Option<Vec<f64>>>,
}

/// Inverse of [`lift_to_joint`] from player `i`'s point of view.
pub fn decompose(
    game: &Game,
    i: usize,
    mu: &JointDistribution,
    tolerance: f64,
) -> Result<Decomposition> {
    game.check_player(i)?;
    game.check_distribution(mu)?;
    let signal_mix = mu.marginal(game, i);
    let conditionals = (0..signal_mix.len())
        .map(|s_i| mu.conditional(game, i, s_i, tolerance).ok())
        .collect();
    Ok(Decomposition {
        signal_mix,
        conditionals,
    })
}

/// Whether `mu` lies in `C(i)`: every recommendation `s_i` with marginal
/// above `tolerance` has its conditional in `C(i, s_i)`.
pub fn check_joint_in_c_i(
    game: &Game,
    prefs: &GamePreferences,
    i: usize,
    mu: &JointDistribution,
    tolerance: f64,
) -> Result<bool> {
    game.check_player(i)?;
    let slacks = cpt_deviation_slacks(game, prefs, mu, tolerance)?;
    Ok(slacks
        .iter()
        .filter(|s| s.deviation.player == i)
        .all(|s| s.slack >= -tolerance))
}
