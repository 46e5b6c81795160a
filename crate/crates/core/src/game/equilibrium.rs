use serde::Serialize;

use super::{Game, GamePreferences, JointDistribution};
use crate::cpt::{value_unchecked, CptPreferences, Prospect};
use crate::error::{Error, Result};

/// Absolute slack tolerance used when callers have no better choice.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PureStrategy {
    pub player: usize,
    pub strategy: usize,
}

/// Player `player`, told to play `strategy`, considers `deviation` instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub player: usize,
    pub strategy: usize,
    pub deviation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationSlack {
    pub deviation: Deviation,
    pub slack: f64,
}

/// Outcome of a membership check.
///
/// `worst_violation` is the smallest slack over all checked inequalities;
/// `witness` names the inequality attaining it whenever membership fails.
/// `near_zero_marginals` lists recommendations whose marginal probability is
/// positive yet at or below the tolerance, which were skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumVerdict {
    pub is_member: bool,
    pub worst_violation: f64,
    pub witness: Option<Deviation>,
    pub near_zero_marginals: Vec<PureStrategy>,
}

impl EquilibriumVerdict {
    pub(crate) fn from_slacks(
        slacks: &[DeviationSlack],
        tolerance: f64,
        near_zero_marginals: Vec<PureStrategy>,
    ) -> Self {
        let mut worst: Option<&DeviationSlack> = None;
        for s in slacks {
            if worst.is_none_or(|w| s.slack < w.slack) {
                worst = Some(s);
            }
        }
        let worst_violation = worst.map_or(0.0, |w| w.slack);
        let is_member = worst_violation >= -tolerance;
        EquilibriumVerdict {
            is_member,
            worst_violation,
            witness: if is_member {
                None
            } else {
                worst.map(|w| w.deviation)
            },
            near_zero_marginals,
        }
    }
}

/// The lottery `L(mu, s_i, d_i)` player `i` faces when told `s_i` and
/// playing `d_i`: opponents follow `mu_{-i}^{s_i}`, payoffs are
/// `h_i(d_i, .)`.
pub fn deviation_lottery(
    game: &Game,
    mu: &JointDistribution,
    i: usize,
    s_i: usize,
    d_i: usize,
) -> Result<Prospect> {
    game.check_distribution(mu)?;
    game.check_strategy(i, s_i)?;
    game.check_strategy(i, d_i)?;
    let probs = mu.conditional(game, i, s_i, 0.0)?;
    Prospect::new(probs, game.outcome_profile(i, d_i))
}

/// Expected-utility slacks `sum_{s_-i} mu(s) (h_i(s_i, s_-i) - h_i(d_i, s_-i))`
/// for every `i` and every `s_i != d_i`.
pub fn eut_deviation_slacks(game: &Game, mu: &JointDistribution) -> Result<Vec<DeviationSlack>> {
    game.check_distribution(mu)?;
    let mut out = Vec::new();
    for i in 0..game.player_count() {
        let m = game.strategy_counts()[i];
        for s_i in 0..m {
            let idx = game.slice_indices(i, s_i);
            let x = game.outcome_profile(i, s_i);
            for d_i in (0..m).filter(|&d| d != s_i) {
                let y = game.outcome_profile(i, d_i);
                let slack = idx
                    .iter()
                    .enumerate()
                    .map(|(k, &j)| mu.probs()[j] * (x[k] - y[k]))
                    .sum();
                out.push(DeviationSlack {
                    deviation: Deviation {
                        player: i,
                        strategy: s_i,
                        deviation: d_i,
                    },
                    slack,
                });
            }
        }
    }
    Ok(out)
}

pub fn is_eut_correlated_equilibrium(
    game: &Game,
    mu: &JointDistribution,
    tolerance: f64,
) -> Result<EquilibriumVerdict> {
    let slacks = eut_deviation_slacks(game, mu)?;
    Ok(EquilibriumVerdict::from_slacks(&slacks, tolerance, Vec::new()))
}

fn cpt_slacks_inner(
    game: &Game,
    prefs: &GamePreferences,
    mu: &JointDistribution,
    tolerance: f64,
    player_prefs: impl Fn(usize) -> CptPreferences,
) -> Result<(Vec<DeviationSlack>, Vec<PureStrategy>)> {
    game.check_distribution(mu)?;
    prefs.check_for(game)?;
    let mut out = Vec::new();
    let mut near_zero = Vec::new();
    for i in 0..game.player_count() {
        let pi = player_prefs(i);
        let m = game.strategy_counts()[i];
        for s_i in 0..m {
            let mass = mu.slice_mass(game, i, s_i);
            if mass <= tolerance {
                if mass > 0.0 {
                    near_zero.push(PureStrategy {
                        player: i,
                        strategy: s_i,
                    });
                }
                continue;
            }
            let p = mu.conditional(game, i, s_i, tolerance)?;
            let on_path = value_unchecked(&p, &game.outcome_profile(i, s_i), &pi);
            for d_i in (0..m).filter(|&d| d != s_i) {
                let off_path = value_unchecked(&p, &game.outcome_profile(i, d_i), &pi);
                out.push(DeviationSlack {
                    deviation: Deviation {
                        player: i,
                        strategy: s_i,
                        deviation: d_i,
                    },
                    slack: on_path - off_path,
                });
            }
        }
    }
    Ok((out, near_zero))
}

/// CPT slacks `V_i(L(mu, s_i, s_i)) - V_i(L(mu, s_i, d_i))` for every player,
/// every recommendation with marginal above `tolerance`, and every
/// alternative `d_i`.
pub fn cpt_deviation_slacks(
    game: &Game,
    prefs: &GamePreferences,
    mu: &JointDistribution,
    tolerance: f64,
) -> Result<Vec<DeviationSlack>> {
    cpt_slacks_inner(game, prefs, mu, tolerance, |i| *prefs.get(i)).map(|(s, _)| s)
}

pub fn is_cpt_correlated_equilibrium(
    game: &Game,
    prefs: &GamePreferences,
    mu: &JointDistribution,
    tolerance: f64,
) -> Result<EquilibriumVerdict> {
    let (slacks, near_zero) = cpt_slacks_inner(game, prefs, mu, tolerance, |i| *prefs.get(i))?;
    Ok(EquilibriumVerdict::from_slacks(&slacks, tolerance, near_zero))
}

/// CPT membership with each player's reference point supplied by
/// `reference(i, mu)` instead of the constant stored in `prefs`.
pub fn is_cpt_correlated_equilibrium_with_reference<F>(
    game: &Game,
    prefs: &GamePreferences,
    mu: &JointDistribution,
    tolerance: f64,
    reference: F,
) -> Result<EquilibriumVerdict>
where
    F: Fn(usize, &JointDistribution) -> f64,
{
    let mut refs = Vec::with_capacity(game.player_count());
    for i in 0..game.player_count() {
        let r = reference(i, mu);
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reference point of player {i} is not finite"
            )));
        }
        refs.push(r);
    }
    let (slacks, near_zero) =
        cpt_slacks_inner(game, prefs, mu, tolerance, |i| prefs.get(i).with_reference(refs[i]))?;
    Ok(EquilibriumVerdict::from_slacks(&slacks, tolerance, near_zero))
}
