//! Finite normal-form games and the equilibrium notions built on them.
//!
//! Joint strategy profiles are indexed row-major over players with the last
//! player varying fastest. For a 2x2 game the joint vector therefore reads
//! `(mu00, mu01, mu10, mu11)`. The opponents' profiles `S_{-i}` use the same
//! convention with player `i` removed.

mod equilibrium;
mod nash;

use serde::{Deserialize, Serialize};

use crate::cpt::{validate_probabilities, CptPreferences};
use crate::error::{Error, Result};

pub use equilibrium::{
    cpt_deviation_slacks, deviation_lottery, eut_deviation_slacks,
    is_cpt_correlated_equilibrium, is_cpt_correlated_equilibrium_with_reference,
    is_eut_correlated_equilibrium, Deviation, DeviationSlack, EquilibriumVerdict, PureStrategy,
    DEFAULT_TOLERANCE,
};
pub use nash::{
    average_cpt_value, best_response_support, boundary_witness, completely_mixed_nash_2x2,
    indifference_point, is_cpt_nash, pure_nash_equilibria, strategy_values, BoundaryWitness,
    ProductForm, PRODUCT_FORM_TOLERANCE,
};

/// A finite game in normal form with real payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    strategy_counts: Vec<usize>,
    strides: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

impl Game {
    /// `payoffs[i]` holds player `i`'s payoff for every joint profile in
    /// row-major order.
    pub fn new(strategy_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let n = strategy_counts.len();
        if n < 2 {
            return Err(Error::InvalidGame(format!(
                "a game needs at least two players, got {n}"
            )));
        }
        if let Some((i, &c)) = strategy_counts.iter().enumerate().find(|(_, &c)| c < 2) {
            return Err(Error::InvalidGame(format!(
                "player {i} has {c} strategies; at least two are required"
            )));
        }
        let size = strategy_counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .ok_or_else(|| Error::InvalidGame("joint strategy space overflows".into()))?;
        if payoffs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: payoffs.len(),
            });
        }
        for (i, h) in payoffs.iter().enumerate() {
            if h.len() != size {
                return Err(Error::InvalidGame(format!(
                    "payoff tensor of player {i} has {} entries, expected {size}",
                    h.len()
                )));
            }
            if h.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidGame(format!(
                    "payoff tensor of player {i} contains a non-finite entry"
                )));
            }
        }
        let mut strides = vec![1; n];
        for j in (0..n - 1).rev() {
            strides[j] = strides[j + 1] * strategy_counts[j + 1];
        }
        Ok(Game {
            strategy_counts,
            strides,
            payoffs,
        })
    }

    /// Two-player game from row and column payoff matrices.
    pub fn bimatrix(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Self> {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let shape_ok = |m: &[Vec<f64>]| m.len() == rows && m.iter().all(|r| r.len() == cols);
        if !shape_ok(a) || !shape_ok(b) {
            return Err(Error::InvalidGame(
                "payoff matrices must be rectangular and of equal shape".into(),
            ));
        }
        Game::new(
            vec![rows, cols],
            vec![a.concat(), b.concat()],
        )
    }

    /// 2x2 game with payoffs `a[s1][s2]` for the row player and `b[s1][s2]`
    /// for the column player.
    pub fn two_by_two(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Result<Self> {
        Game::new(
            vec![2, 2],
            vec![
                vec![a[0][0], a[0][1], a[1][0], a[1][1]],
                vec![b[0][0], b[0][1], b[1][0], b[1][1]],
            ],
        )
    }

    pub fn player_count(&self) -> usize {
        self.strategy_counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.strategy_counts
    }

    pub fn is_two_by_two(&self) -> bool {
        self.strategy_counts == [2, 2]
    }

    /// `|S|`
    pub fn joint_size(&self) -> usize {
        self.strides[0] * self.strategy_counts[0]
    }

    /// `|S_{-i}|`
    pub fn opponent_size(&self, i: usize) -> usize {
        self.joint_size() / self.strategy_counts[i]
    }

    /// Player `i`'s payoffs over all joint profiles, row-major.
    pub fn payoffs(&self, i: usize) -> &[f64] {
        &self.payoffs[i]
    }

    pub fn joint_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strides)
            .map(|(&s, &stride)| s * stride)
            .sum()
    }

    pub fn profile(&self, index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.strategy_counts)
            .map(|(&stride, &c)| (index / stride) % c)
            .collect()
    }

    pub fn payoff(&self, i: usize, profile: &[usize]) -> f64 {
        self.payoffs[i][self.joint_index(profile)]
    }

    /// Joint indices of the slice `{s_i} x S_{-i}`, listed in opponent-profile
    /// order.
    pub fn slice_indices(&self, i: usize, s_i: usize) -> Vec<usize> {
        let n = self.player_count();
        let mut out = Vec::with_capacity(self.opponent_size(i));
        let mut profile = vec![0usize; n];
        profile[i] = s_i;
        loop {
            out.push(self.joint_index(&profile));
            // odometer over every coordinate except i, last fastest
            let mut j = n;
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if j == i {
                    continue;
                }
                profile[j] += 1;
                if profile[j] < self.strategy_counts[j] {
                    break;
                }
                profile[j] = 0;
            }
        }
    }

    /// Outcome profile `(h_i(s_i, s_{-i}))_{s_{-i}}` in opponent-profile order.
    pub fn outcome_profile(&self, i: usize, s_i: usize) -> Vec<f64> {
        self.slice_indices(i, s_i)
            .into_iter()
            .map(|k| self.payoffs[i][k])
            .collect()
    }

    pub(crate) fn check_player(&self, i: usize) -> Result<()> {
        if i < self.player_count() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "player index {i} out of range for {} players",
                self.player_count()
            )))
        }
    }

    pub(crate) fn check_strategy(&self, i: usize, s: usize) -> Result<()> {
        self.check_player(i)?;
        if s < self.strategy_counts[i] {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "strategy {s} out of range for player {i} with {} strategies",
                self.strategy_counts[i]
            )))
        }
    }

    pub(crate) fn check_distribution(&self, mu: &JointDistribution) -> Result<()> {
        if mu.shape() == self.strategy_counts.as_slice() {
            Ok(())
        } else {
            Err(Error::InvalidGame(format!(
                "distribution shape {:?} does not match game shape {:?}",
                mu.shape(),
                self.strategy_counts
            )))
        }
    }
}

/// A probability distribution over joint strategy profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    shape: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(shape: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = shape.iter().product();
        if probs.len() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                found: probs.len(),
            });
        }
        validate_probabilities(&probs)?;
        Ok(JointDistribution { shape, probs })
    }

    pub fn for_game(game: &Game, probs: Vec<f64>) -> Result<Self> {
        JointDistribution::new(game.strategy_counts.clone(), probs)
    }

    pub fn uniform(game: &Game) -> Self {
        let size = game.joint_size();
        JointDistribution {
            shape: game.strategy_counts.clone(),
            probs: vec![1.0 / size as f64; size],
        }
    }

    /// Normalizes non-negative weights to sum to one.
    pub fn normalized(game: &Game, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidProbabilities(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidProbabilities("weights sum to zero".into()));
        }
        JointDistribution::for_game(game, weights.iter().map(|w| w / total).collect())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `mu_i(s_i)` for every `s_i`.
    pub fn marginal(&self, game: &Game, i: usize) -> Vec<f64> {
        (0..game.strategy_counts[i])
            .map(|s| self.slice_mass(game, i, s))
            .collect()
    }

    pub(crate) fn slice_mass(&self, game: &Game, i: usize, s_i: usize) -> f64 {
        game.slice_indices(i, s_i)
            .into_iter()
            .map(|k| self.probs[k])
            .sum()
    }

    /// `mu_{-i}^{s_i}`: the opponents' distribution given the recommendation
    /// `s_i`. Requires `mu_i(s_i) > tolerance`.
    pub fn conditional(&self, game: &Game, i: usize, s_i: usize, tolerance: f64) -> Result<Vec<f64>> {
        let idx = game.slice_indices(i, s_i);
        let mass: f64 = idx.iter().map(|&k| self.probs[k]).sum();
        if mass <= tolerance {
            return Err(Error::ZeroMarginal {
                player: i,
                strategy: s_i,
            });
        }
        Ok(idx.into_iter().map(|k| self.probs[k] / mass).collect())
    }
}

/// Per-player CPT preferences, one entry per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamePreferences(Vec<CptPreferences>);

impl GamePreferences {
    pub fn new(prefs: Vec<CptPreferences>) -> Result<Self> {
        for p in &prefs {
            p.validate()?;
        }
        Ok(GamePreferences(prefs))
    }

    pub fn uniform(players: usize, prefs: CptPreferences) -> Self {
        GamePreferences(vec![prefs; players])
    }

    pub fn expected_utility(players: usize) -> Self {
        GamePreferences::uniform(players, CptPreferences::expected_utility())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &CptPreferences {
        &self.0[i]
    }

    pub fn as_slice(&self) -> &[CptPreferences] {
        &self.0
    }

    pub(crate) fn check_for(&self, game: &Game) -> Result<()> {
        if self.0.len() == game.player_count() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: game.player_count(),
                found: self.0.len(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_player() -> Game {
        let size = 2 * 3 * 2;
        Game::new(
            vec![2, 3, 2],
            (0..3).map(|i| (0..size).map(|k| (k * (i + 1)) as f64).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_malformed_games() {
        assert!(Game::new(vec![2], vec![vec![0.0; 2]]).is_err());
        assert!(Game::new(vec![2, 1], vec![vec![0.0; 2]; 2]).is_err());
        assert!(Game::new(vec![2, 2], vec![vec![0.0; 4]; 3]).is_err());
        assert!(Game::new(vec![2, 2], vec![vec![0.0; 4], vec![0.0; 3]]).is_err());
        assert!(Game::new(vec![2, 2], vec![vec![0.0; 4], vec![f64::NAN; 4]]).is_err());
    }

    #[test]
    fn row_major_indexing_round_trips() {
        let g = three_player();
        assert_eq!(g.joint_size(), 12);
        for k in 0..12 {
            assert_eq!(g.joint_index(&g.profile(k)), k);
        }
        assert_eq!(g.profile(1), vec![0, 0, 1]);
        assert_eq!(g.profile(2), vec![0, 1, 0]);
    }

    #[test]
    fn slices_follow_opponent_order() {
        let g = three_player();
        assert_eq!(g.slice_indices(1, 2), vec![4, 5, 10, 11]);
        assert_eq!(g.slice_indices(0, 1), (6..12).collect::<Vec<_>>());
        assert_eq!(g.slice_indices(2, 0), vec![0, 2, 4, 6, 8, 10]);
    }

    #[test]
    fn two_by_two_layout() {
        let g = Game::two_by_two([[1.0, 2.0], [3.0, 4.0]], [[5.0, 6.0], [7.0, 8.0]]).unwrap();
        assert_eq!(g.payoffs(0), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(g.outcome_profile(0, 1), vec![3.0, 4.0]);
        assert_eq!(g.outcome_profile(1, 0), vec![5.0, 7.0]);
        assert_eq!(g.outcome_profile(1, 1), vec![6.0, 8.0]);
    }

    #[test]
    fn marginals_and_conditionals() {
        let g = Game::two_by_two([[0.0; 2]; 2], [[0.0; 2]; 2]).unwrap();
        let mu = JointDistribution::for_game(&g, vec![0.1, 0.3, 0.6, 0.0]).unwrap();
        assert_eq!(mu.marginal(&g, 0), vec![0.4, 0.6]);
        let c = mu.conditional(&g, 1, 1, 1e-9).unwrap();
        assert_eq!(c, vec![1.0, 0.0]);
        let c = mu.conditional(&g, 0, 0, 1e-9).unwrap();
        assert!((c[0] - 0.25).abs() < 1e-15 && (c[1] - 0.75).abs() < 1e-15);
        let zero = JointDistribution::for_game(&g, vec![0.0, 0.0, 0.5, 0.5]).unwrap();
        assert_eq!(
            zero.conditional(&g, 0, 0, 1e-9),
            Err(Error::ZeroMarginal { player: 0, strategy: 0 })
        );
    }

    #[test]
    fn distribution_validation() {
        assert!(JointDistribution::new(vec![2, 2], vec![0.5, 0.5, 0.0]).is_err());
        assert!(JointDistribution::new(vec![2, 2], vec![0.5, 0.5, 0.1, -0.1]).is_err());
        assert!(JointDistribution::new(vec![2, 2], vec![0.5, 0.5, 0.1, 0.0]).is_err());
    }
}
