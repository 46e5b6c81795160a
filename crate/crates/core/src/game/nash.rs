use serde::Serialize;

use super::equilibrium::{Deviation, DeviationSlack, EquilibriumVerdict, PureStrategy};
use super::{Game, GamePreferences, JointDistribution};
use crate::cpt::{
    regret_direction, regret_unchecked, validate_probabilities, value_unchecked, CptPreferences,
    RegretDirection,
};
use crate::error::{Error, Result};

/// Maximum entrywise gap tolerated between a joint distribution and the
/// product of its claimed marginals.
pub const PRODUCT_FORM_TOLERANCE: f64 = 1e-9;

const BEST_RESPONSE_WINDOW: f64 = 1e-9;
const SCAN_STEPS: usize = 1000;

/// A joint distribution together with the independent marginals it
/// factors into.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductForm {
    joint: JointDistribution,
    marginals: Vec<Vec<f64>>,
}

fn product_of(game: &Game, marginals: &[Vec<f64>]) -> Vec<f64> {
    (0..game.joint_size())
        .map(|k| {
            game.profile(k)
                .iter()
                .enumerate()
                .map(|(j, &s)| marginals[j][s])
                .product()
        })
        .collect()
}

fn check_marginals(game: &Game, marginals: &[Vec<f64>]) -> Result<()> {
    if marginals.len() != game.player_count() {
        return Err(Error::LengthMismatch {
            expected: game.player_count(),
            found: marginals.len(),
        });
    }
    for (m, &c) in marginals.iter().zip(game.strategy_counts()) {
        if m.len() != c {
            return Err(Error::LengthMismatch {
                expected: c,
                found: m.len(),
            });
        }
        validate_probabilities(m)?;
    }
    Ok(())
}

impl ProductForm {
    /// Pairs `joint` with caller-supplied marginals, checking that their
    /// product reproduces `joint` entrywise within [`PRODUCT_FORM_TOLERANCE`].
    pub fn new(game: &Game, joint: JointDistribution, marginals: Vec<Vec<f64>>) -> Result<Self> {
        game.check_distribution(&joint)?;
        check_marginals(game, &marginals)?;
        let deviation = product_of(game, &marginals)
            .iter()
            .zip(joint.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if deviation > PRODUCT_FORM_TOLERANCE {
            return Err(Error::NotProductForm { deviation });
        }
        Ok(ProductForm { joint, marginals })
    }

    pub fn from_marginals(game: &Game, marginals: Vec<Vec<f64>>) -> Result<Self> {
        check_marginals(game, &marginals)?;
        let joint = JointDistribution::for_game(game, product_of(game, &marginals))?;
        Ok(ProductForm { joint, marginals })
    }

    /// Factorizes `joint` through its own marginals, failing when it is not
    /// a product distribution.
    pub fn infer(game: &Game, joint: JointDistribution) -> Result<Self> {
        game.check_distribution(&joint)?;
        let marginals = (0..game.player_count())
            .map(|i| joint.marginal(game, i))
            .collect();
        ProductForm::new(game, joint, marginals)
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn marginals(&self) -> &[Vec<f64>] {
        &self.marginals
    }

    /// `mu_{-i}`, the product of the other players' marginals in
    /// opponent-profile order.
    pub fn opponent_distribution(&self, game: &Game, i: usize) -> Vec<f64> {
        game.slice_indices(i, 0)
            .into_iter()
            .map(|k| {
                game.profile(k)
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, &s)| self.marginals[j][s])
                    .product()
            })
            .collect()
    }

    pub fn is_completely_mixed(&self, tolerance: f64) -> bool {
        self.marginals.iter().flatten().all(|&m| m > tolerance)
    }
}

/// `V_i(L(mu_{-i}, s_i))` for every pure strategy `s_i` of player `i`.
pub fn strategy_values(
    game: &Game,
    prefs: &GamePreferences,
    mu: &ProductForm,
    i: usize,
) -> Result<Vec<f64>> {
    game.check_player(i)?;
    prefs.check_for(game)?;
    game.check_distribution(mu.joint())?;
    let p = mu.opponent_distribution(game, i);
    Ok((0..game.strategy_counts()[i])
        .map(|s| value_unchecked(&p, &game.outcome_profile(i, s), prefs.get(i)))
        .collect())
}

/// Average CPT value of the mixture `alt` over player `i`'s pure strategies
/// against the opponents' product marginal.
pub fn average_cpt_value(
    game: &Game,
    prefs: &GamePreferences,
    mu: &ProductForm,
    i: usize,
    alt: &[f64],
) -> Result<f64> {
    let values = strategy_values(game, prefs, mu, i)?;
    if alt.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            found: alt.len(),
        });
    }
    validate_probabilities(alt)?;
    Ok(alt.iter().zip(&values).map(|(a, v)| a * v).sum())
}

/// Pure strategies whose value is within `1e-9` of the best.
pub fn best_response_support(
    game: &Game,
    prefs: &GamePreferences,
    mu: &ProductForm,
    i: usize,
) -> Result<Vec<usize>> {
    let values = strategy_values(game, prefs, mu, i)?;
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((0..values.len())
        .filter(|&s| values[s] >= best - BEST_RESPONSE_WINDOW)
        .collect())
}

/// Nash check: every strategy played with probability above `tolerance`
/// must be within `tolerance` of the best pure reply.
pub fn is_cpt_nash(
    game: &Game,
    prefs: &GamePreferences,
    mu: &ProductForm,
    tolerance: f64,
) -> Result<EquilibriumVerdict> {
    let mut slacks = Vec::new();
    let mut near_zero = Vec::new();
    for i in 0..game.player_count() {
        let values = strategy_values(game, prefs, mu, i)?;
        let (best_idx, best) = values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (s, v)| if v > acc.1 { (s, v) } else { acc });
        for (s_i, &m) in mu.marginals()[i].iter().enumerate() {
            if m <= tolerance {
                if m > 0.0 {
                    near_zero.push(PureStrategy {
                        player: i,
                        strategy: s_i,
                    });
                }
                continue;
            }
            slacks.push(DeviationSlack {
                deviation: Deviation {
                    player: i,
                    strategy: s_i,
                    deviation: best_idx,
                },
                slack: values[s_i] - best,
            });
        }
    }
    Ok(EquilibriumVerdict::from_slacks(&slacks, tolerance, near_zero))
}

/// Pure profiles at which no player gains from a unilateral deviation.
///
/// For a certain outcome the CPT value is `v(h)` with `v` strictly
/// increasing, so the comparison reduces to raw payoffs and needs no
/// preferences.
pub fn pure_nash_equilibria(game: &Game) -> Vec<Vec<usize>> {
    (0..game.joint_size())
        .map(|k| game.profile(k))
        .filter(|profile| {
            (0..game.player_count()).all(|i| {
                let here = game.payoff(i, profile);
                let mut alt = profile.clone();
                (0..game.strategy_counts()[i]).all(|d| {
                    alt[i] = d;
                    game.payoff(i, &alt) <= here
                })
            })
        })
        .collect()
}

/// Interior zero of `p0 -> V(p, x) - V(p, y)` for two-outcome prospects
/// `p = (p0, 1 - p0)`.
///
/// Sign changes are located on a grid of step `1e-3` and then refined by
/// bisection down to a bracket of `1e-15`. Returns the first interior zero,
/// or `None` when the regret keeps one sign on `(0, 1)`.
pub fn indifference_point(x: [f64; 2], y: [f64; 2], prefs: &CptPreferences) -> Option<f64> {
    let f = |p0: f64| regret_unchecked(&[p0, 1.0 - p0], &x, &y, prefs);
    let mut prev_p = 0.0;
    let mut prev_f = f(0.0);
    for k in 1..=SCAN_STEPS {
        let p = k as f64 / SCAN_STEPS as f64;
        let fp = f(p);
        if k < SCAN_STEPS && fp == 0.0 && prev_f != 0.0 {
            return Some(p);
        }
        if prev_f * fp < 0.0 {
            return Some(bisect(&f, prev_p, prev_f, p));
        }
        prev_p = p;
        prev_f = fp;
    }
    None
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, f_lo: f64, mut hi: f64) -> f64 {
    let lo_sign = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// The completely mixed CPT Nash equilibrium of a 2x2 game, if there is an
/// isolated one: each player's mixture makes the opponent indifferent.
pub fn completely_mixed_nash_2x2(
    game: &Game,
    prefs: &GamePreferences,
) -> Result<Option<ProductForm>> {
    if !game.is_two_by_two() {
        return Err(Error::NotTwoByTwo);
    }
    prefs.check_for(game)?;
    let a = game.payoffs(0);
    let b = game.payoffs(1);
    let col = indifference_point([a[0], a[1]], [a[2], a[3]], prefs.get(0));
    let row = indifference_point([b[0], b[2]], [b[1], b[3]], prefs.get(1));
    match (row, col) {
        (Some(r), Some(c)) => Ok(Some(ProductForm::from_marginals(
            game,
            vec![vec![r, 1.0 - r], vec![c, 1.0 - c]],
        )?)),
        _ => Ok(None),
    }
}

/// A direction in joint-distribution space leading from a completely mixed
/// Nash equilibrium straight out of the CPT correlated equilibrium set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryWitness {
    /// The inequality that the perturbation breaks.
    pub deviation: Deviation,
    /// Mass transfer on the opponents' distribution.
    pub regret_direction: RegretDirection,
    /// Direction over joint profiles; zero outside the recommended slice.
    pub direction: Vec<f64>,
    /// Largest step keeping the perturbed point a distribution.
    pub epsilon_max: f64,
}

impl BoundaryWitness {
    /// `mu + eps * direction`, for `0 <= eps <= epsilon_max`.
    pub fn perturb(&self, game: &Game, mu: &JointDistribution, eps: f64) -> Result<JointDistribution> {
        if !(0.0..=self.epsilon_max).contains(&eps) {
            return Err(Error::InvalidParameter(format!(
                "step {eps} outside [0, {}]",
                self.epsilon_max
            )));
        }
        let probs = mu
            .probs()
            .iter()
            .zip(&self.direction)
            .map(|(m, d)| (m + eps * d).max(0.0))
            .collect();
        JointDistribution::for_game(game, probs)
    }
}

/// Builds a [`BoundaryWitness`] at a completely mixed CPT Nash equilibrium.
///
/// Uses the first `(i, s_i, d_i)` in lexicographic order whose outcome
/// profiles differ, and moves the `s_i` slice of `mu` along the
/// regret-decreasing transfer for `(mu_{-i}, h_i(s_i, .), h_i(d_i, .))`.
pub fn boundary_witness(
    game: &Game,
    prefs: &GamePreferences,
    mu: &ProductForm,
    tolerance: f64,
) -> Result<BoundaryWitness> {
    game.check_distribution(mu.joint())?;
    prefs.check_for(game)?;
    let triple = (0..game.player_count()).find_map(|i| {
        let m = game.strategy_counts()[i];
        (0..m).find_map(|s| {
            let x = game.outcome_profile(i, s);
            (0..m)
                .filter(|&d| d != s)
                .find(|&d| game.outcome_profile(i, d) != x)
                .map(|d| (i, s, d))
        })
    });
    let (i, s_i, d_i) = triple.ok_or(Error::TrivialGame)?;
    if !mu.is_completely_mixed(tolerance) {
        return Err(Error::NotCompletelyMixed);
    }
    let verdict = is_cpt_nash(game, prefs, mu, tolerance)?;
    if !verdict.is_member {
        return Err(Error::PreconditionViolated(format!(
            "distribution is not a CPT Nash equilibrium (gap {:.3e})",
            verdict.worst_violation
        )));
    }

    let p = mu.opponent_distribution(game, i);
    let x = game.outcome_profile(i, s_i);
    let y = game.outcome_profile(i, d_i);
    let delta = regret_direction(&p, &x, &y)?;
    let weight = mu.marginals()[i][s_i];
    let mut direction = vec![0.0; game.joint_size()];
    for (k, idx) in game.slice_indices(i, s_i).into_iter().enumerate() {
        direction[idx] = weight * delta.delta[k];
    }
    Ok(BoundaryWitness {
        deviation: Deviation {
            player: i,
            strategy: s_i,
            deviation: d_i,
        },
        epsilon_max: delta.max_step(&p),
        regret_direction: delta,
        direction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::is_cpt_correlated_equilibrium;

    fn gamma_one() -> Game {
        Game::two_by_two([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    fn eut() -> GamePreferences {
        GamePreferences::expected_utility(2)
    }

    fn half() -> Vec<f64> {
        vec![0.5, 0.5]
    }

    #[test]
    fn product_form_consistency() {
        let g = gamma_one();
        let pf = ProductForm::from_marginals(&g, vec![vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        assert!((pf.joint().probs()[1] - 0.12).abs() < 1e-15);
        let inferred = ProductForm::infer(&g, pf.joint().clone()).unwrap();
        for (a, b) in inferred.marginals().iter().flatten().zip(pf.marginals().iter().flatten()) {
            assert!((a - b).abs() < 1e-15);
        }
        let correlated = JointDistribution::for_game(&g, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(matches!(
            ProductForm::infer(&g, correlated.clone()),
            Err(Error::NotProductForm { .. })
        ));
        assert!(matches!(
            ProductForm::new(&g, correlated, vec![half(), half()]),
            Err(Error::NotProductForm { .. })
        ));
    }

    #[test]
    fn opponent_distribution_orders_like_slices() {
        let g = Game::new(vec![2, 3, 2], vec![vec![0.0; 12]; 3]).unwrap();
        let pf = ProductForm::from_marginals(
            &g,
            vec![vec![0.1, 0.9], vec![0.2, 0.3, 0.5], vec![0.4, 0.6]],
        )
        .unwrap();
        let p = pf.opponent_distribution(&g, 1);
        let expect = [0.1 * 0.4, 0.1 * 0.6, 0.9 * 0.4, 0.9 * 0.6];
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn average_value_examples() {
        let g = gamma_one();
        let pf = ProductForm::from_marginals(&g, vec![half(), half()]).unwrap();
        let a = average_cpt_value(&g, &eut(), &pf, 0, &[0.5, 0.5]).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        let values = strategy_values(&g, &eut(), &pf, 0).unwrap();
        assert_eq!(average_cpt_value(&g, &eut(), &pf, 0, &[0.0, 1.0]).unwrap(), values[1]);
    }

    #[test]
    fn average_value_is_linear_in_mixture() {
        let g = Game::two_by_two([[3.0, -1.0], [0.5, 2.0]], [[0.0; 2]; 2]).unwrap();
        let prefs = GamePreferences::uniform(2, CptPreferences::prelec(0.45).unwrap());
        let pf = ProductForm::from_marginals(&g, vec![half(), vec![0.3, 0.7]]).unwrap();
        let a1 = [0.2, 0.8];
        let a2 = [0.9, 0.1];
        let lam = 0.35;
        let mix = [lam * a1[0] + (1.0 - lam) * a2[0], lam * a1[1] + (1.0 - lam) * a2[1]];
        let lhs = average_cpt_value(&g, &prefs, &pf, 0, &mix).unwrap();
        let rhs = lam * average_cpt_value(&g, &prefs, &pf, 0, &a1).unwrap()
            + (1.0 - lam) * average_cpt_value(&g, &prefs, &pf, 0, &a2).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn best_responses() {
        let g = gamma_one();
        let pf = ProductForm::from_marginals(&g, vec![half(), half()]).unwrap();
        assert_eq!(best_response_support(&g, &eut(), &pf, 0).unwrap(), vec![0, 1]);

        let dominant =
            Game::two_by_two([[2.0, 2.0], [1.0, 1.0]], [[0.0; 2]; 2]).unwrap();
        assert_eq!(best_response_support(&dominant, &eut(), &pf, 0).unwrap(), vec![0]);
    }

    #[test]
    fn nash_examples() {
        let g = gamma_one();
        let pure = ProductForm::from_marginals(&g, vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(is_cpt_nash(&g, &eut(), &pure, 1e-9).unwrap().is_member);
        let mixed = ProductForm::from_marginals(&g, vec![half(), half()]).unwrap();
        assert!(is_cpt_nash(&g, &eut(), &mixed, 1e-9).unwrap().is_member);
        let off = ProductForm::from_marginals(&g, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let v = is_cpt_nash(&g, &eut(), &off, 1e-9).unwrap();
        assert!(!v.is_member);
        assert_eq!(v.worst_violation, -1.0);
    }

    #[test]
    fn pure_nash_of_coordination_game() {
        assert_eq!(pure_nash_equilibria(&gamma_one()), vec![vec![0, 0], vec![1, 1]]);
        let pennies =
            Game::two_by_two([[1.0, -1.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, -1.0]]).unwrap();
        assert!(pure_nash_equilibria(&pennies).is_empty());
    }

    #[test]
    fn mixed_nash_search_matches_closed_form() {
        // gamma_I(2, 3): column mixes 1/(1+alpha), row mixes 1/(1+beta)
        let g = Game::two_by_two([[2.0, 0.0], [0.0, 1.0]], [[3.0, 0.0], [0.0, 1.0]]).unwrap();
        let pf = completely_mixed_nash_2x2(&g, &eut()).unwrap().unwrap();
        assert!((pf.marginals()[0][0] - 0.25).abs() < 1e-12);
        assert!((pf.marginals()[1][0] - 1.0 / 3.0).abs() < 1e-12);
        assert!(is_cpt_nash(&g, &eut(), &pf, 1e-9).unwrap().is_member);
    }

    #[test]
    fn mixed_nash_absent_with_dominant_strategy() {
        let g = Game::two_by_two([[2.0, 2.0], [1.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(completely_mixed_nash_2x2(&g, &eut()).unwrap(), None);
    }

    #[test]
    fn boundary_witness_on_uniform_nash() {
        let g = gamma_one();
        let mixed = ProductForm::from_marginals(&g, vec![half(), half()]).unwrap();
        let w = boundary_witness(&g, &eut(), &mixed, 1e-9).unwrap();
        assert_eq!(w.deviation, Deviation { player: 0, strategy: 0, deviation: 1 });
        assert_eq!(w.epsilon_max, 0.5);
        assert!((w.direction.iter().sum::<f64>()).abs() < 1e-15);
        let base = is_cpt_correlated_equilibrium(&g, &eut(), mixed.joint(), 1e-9).unwrap();
        assert!(base.is_member);
        let bumped = w.perturb(&g, mixed.joint(), 1e-3).unwrap();
        let v = is_cpt_correlated_equilibrium(&g, &eut(), &bumped, 1e-9).unwrap();
        assert!(!v.is_member);
    }

    #[test]
    fn boundary_witness_errors() {
        let g = gamma_one();
        let pure = ProductForm::from_marginals(&g, vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(
            boundary_witness(&g, &eut(), &pure, 1e-9),
            Err(Error::NotCompletelyMixed)
        );
        let flat = Game::two_by_two([[1.0; 2]; 2], [[1.0; 2]; 2]).unwrap();
        let mixed = ProductForm::from_marginals(&flat, vec![half(), half()]).unwrap();
        assert_eq!(boundary_witness(&flat, &eut(), &mixed, 1e-9), Err(Error::TrivialGame));
        let not_nash = ProductForm::from_marginals(&g, vec![vec![0.3, 0.7], half()]).unwrap();
        assert!(matches!(
            boundary_witness(&g, &eut(), &not_nash, 1e-9),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
