//! Two-player, two-strategy games.
//!
//! A 2x2 game has payoffs `a[s1][s2]` for the row player and `b[s1][s2]` for
//! the column player, and joint distributions are written
//! `mu = (mu00, mu01, mu10, mu11)`. With no equivalent or weakly dominated
//! strategies, every deviation inequality takes the form `c * mu_a >= mu_b`
//! or `c * mu_a <= mu_b`, where `c` is `alpha` for the row player and `beta`
//! for the column player. The sign pattern of the payoffs picks one of four
//! canonical types:
//!
//! | type | row player | column player |
//! |------|------------|---------------|
//! | I    | `alpha mu00 >= mu01`, `alpha mu10 <= mu11` | `beta mu00 >= mu10`, `beta mu01 <= mu11` |
//! | II   | `alpha mu00 <= mu01`, `alpha mu10 >= mu11` | as type I |
//! | III  | as type I | `beta mu00 <= mu10`, `beta mu01 >= mu11` |
//! | IV   | as type II | as type III |
//!
//! Under expected utility these are exactly the correlated equilibria of the
//! canonical games built by [`canonical_game`]. Under CPT the coefficients
//! come from the zero of a strictly monotone regret, see [`threshold`].

mod nash;
mod polytope;

use serde::Serialize;

use crate::cpt::{regret_unchecked, CptPreferences};
use crate::error::{Error, Result};
use crate::game::{Game, GamePreferences};

pub use nash::{nash_set_2x2, Interval, NashKind, NashPiece};
pub use polytope::{
    canonical_vertices, characterize, enumerate_vertices, is_extreme_point, Constraint,
    PolytopeDescription, Sense, Symbol,
};

/// Default bound on `|R(q)|` at the returned threshold.
pub const THRESHOLD_TOLERANCE: f64 = 1e-10;
const THRESHOLD_BRACKET: f64 = 1e-12;
const THRESHOLD_MAX_ITER: usize = 200;

/// How one pure strategy compares with an alternative, from raw payoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "relation", content = "by", rename_all = "snake_case")]
pub enum StrategyRelation {
    Equivalent,
    /// Weakly but not strictly dominated by the given strategy.
    WeaklyDominatedBy(usize),
    StrictlyDominatedBy(usize),
    Neither,
}

/// Relation of a strategy with outcome profile `x` to an alternative `d`
/// with outcome profile `y`.
pub fn relation(x: &[f64], y: &[f64], d: usize) -> StrategyRelation {
    let all_le = x.iter().zip(y).all(|(a, b)| a <= b);
    let all_lt = x.iter().zip(y).all(|(a, b)| a < b);
    if x == y {
        StrategyRelation::Equivalent
    } else if all_lt {
        StrategyRelation::StrictlyDominatedBy(d)
    } else if all_le {
        StrategyRelation::WeaklyDominatedBy(d)
    } else {
        StrategyRelation::Neither
    }
}

/// `relations[player][strategy]`: how each strategy compares with the
/// player's other strategy.
pub fn detect_relations(game: &Game) -> Result<[[StrategyRelation; 2]; 2]> {
    require_2x2(game)?;
    let mut out = [[StrategyRelation::Neither; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (s, slot) in row.iter_mut().enumerate() {
            let d = 1 - s;
            *slot = relation(&game.outcome_profile(i, s), &game.outcome_profile(i, d), d);
        }
    }
    Ok(out)
}

pub(crate) fn require_2x2(game: &Game) -> Result<()> {
    if game.is_two_by_two() {
        Ok(())
    } else {
        Err(Error::NotTwoByTwo)
    }
}

/// True for the crossing sign pattern `(x0 > y0, x1 < y1)` or
/// `(x0 < y0, x1 > y1)`.
pub fn is_crossing(x: [f64; 2], y: [f64; 2]) -> bool {
    (x[0] > y[0] && x[1] < y[1]) || (x[0] < y[0] && x[1] > y[1])
}

/// The unique `q` in `(0, 1)` at which the regret
/// `p0 -> V((p0, 1 - p0), x) - V((p0, 1 - p0), y)` changes sign.
///
/// Bisection keeps halving until both `|R| <= tol` and the bracket is below
/// `1e-12`, with at most 200 steps.
pub fn threshold(x: [f64; 2], y: [f64; 2], prefs: &CptPreferences, tol: f64) -> Result<f64> {
    if !is_crossing(x, y) {
        return Err(Error::WrongSignPattern);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold tolerance must be positive, got {tol}"
        )));
    }
    let f = |p0: f64| regret_unchecked(&[p0, 1.0 - p0], &x, &y, prefs);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let lo_positive = f(lo) > 0.0;
    let mut mid = 0.5;
    for _ in 0..THRESHOLD_MAX_ITER {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (fm.abs() <= tol && hi - lo <= THRESHOLD_BRACKET) {
            break;
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// `(1 - q) / q`, the coefficient an interior threshold `q` induces.
pub fn coefficient_from_threshold(q: f64) -> f64 {
    (1.0 - q) / q
}

/// The four sign patterns of games without equivalent or weakly dominated
/// strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CanonicalType {
    I,
    II,
    III,
    IV,
}

impl CanonicalType {
    pub const ALL: [CanonicalType; 4] = [
        CanonicalType::I,
        CanonicalType::II,
        CanonicalType::III,
        CanonicalType::IV,
    ];

    fn from_patterns(row_a: bool, col_a: bool) -> Self {
        match (row_a, col_a) {
            (true, true) => CanonicalType::I,
            (false, true) => CanonicalType::II,
            (true, false) => CanonicalType::III,
            (false, false) => CanonicalType::IV,
        }
    }

    /// Whether the row player's inequalities read `alpha mu00 >= mu01`.
    pub fn row_is_pattern_a(self) -> bool {
        matches!(self, CanonicalType::I | CanonicalType::III)
    }

    /// Whether the column player's inequalities read `beta mu00 >= mu10`.
    pub fn col_is_pattern_a(self) -> bool {
        matches!(self, CanonicalType::I | CanonicalType::II)
    }

    pub fn name(self) -> &'static str {
        match self {
            CanonicalType::I => "coordination",
            CanonicalType::II | CanonicalType::III => "competitive",
            CanonicalType::IV => "anti-coordination",
        }
    }
}

/// The canonical game of a given type, whose expected-utility correlated
/// equilibria are cut out by the type's inequalities with coefficients
/// `(alpha, beta)`.
pub fn canonical_game(kind: CanonicalType, alpha: f64, beta: f64) -> Result<Game> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "canonical coefficients must be positive and finite, got ({alpha}, {beta})"
        )));
    }
    let sa = if kind.row_is_pattern_a() { 1.0 } else { -1.0 };
    let sb = if kind.col_is_pattern_a() { 1.0 } else { -1.0 };
    Game::two_by_two(
        [[sa * alpha, 0.0], [0.0, sa]],
        [[sb * beta, 0.0], [0.0, sb]],
    )
}

/// `(mu00, mu01, mu10, mu11) -> (mu10, mu11, mu00, mu01)`: swaps the row
/// player's strategies.
pub fn tau(mu: [f64; 4]) -> [f64; 4] {
    [mu[2], mu[3], mu[0], mu[1]]
}

/// Limit of a coefficient along a perturbation path into generic games.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "limit", content = "value", rename_all = "snake_case")]
pub enum Limit {
    Zero,
    Finite(f64),
    Infinity,
}

impl Limit {
    pub fn is_finite(self) -> bool {
        matches!(self, Limit::Finite(_))
    }

    /// `1/0 = infinity`, `1/infinity = 0`.
    pub fn reciprocal(self) -> Self {
        match self {
            Limit::Zero => Limit::Infinity,
            Limit::Infinity => Limit::Zero,
            Limit::Finite(v) => Limit::Finite(1.0 / v),
        }
    }
}

/// Classification of a 2x2 game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GameClass2x2 {
    /// No equivalent or weakly dominated strategies.
    Generic {
        kind: CanonicalType,
        alpha: f64,
        beta: f64,
    },
    /// Some weakly dominated strategy, none equivalent or strictly dominated.
    /// The game is a limit of generic games of type `kind` whose
    /// coefficients tend to `alpha` and `beta`, at least one of them to `0`
    /// or infinity.
    WeaklyDominated {
        kind: CanonicalType,
        alpha: Limit,
        beta: Limit,
    },
    StrictlyDominated,
    Equivalent,
}

impl GameClass2x2 {
    pub fn canonical_type(&self) -> Option<CanonicalType> {
        match *self {
            GameClass2x2::Generic { kind, .. } | GameClass2x2::WeaklyDominated { kind, .. } => {
                Some(kind)
            }
            _ => None,
        }
    }
}

/// Per-player outcome of the classification step.
enum Side {
    Crossing { pattern_a: bool, coefficient: f64 },
    Weak { pattern_a: bool, limit: Limit },
}

/// Crossing or weakly ordered profiles `x` (stay) and `y` (deviate) of the
/// deviation from strategy 0 to strategy 1.
fn side(x: [f64; 2], y: [f64; 2], prefs: &CptPreferences) -> Result<Side> {
    if is_crossing(x, y) {
        let q = threshold(x, y, prefs, THRESHOLD_TOLERANCE)?;
        return Ok(Side::Crossing {
            pattern_a: x[0] > y[0],
            coefficient: coefficient_from_threshold(q),
        });
    }
    // exactly one coordinate is tied and the other strict
    if x[1] == y[1] {
        Ok(Side::Weak {
            pattern_a: x[0] > y[0],
            limit: Limit::Infinity,
        })
    } else {
        Ok(Side::Weak {
            pattern_a: x[1] < y[1],
            limit: Limit::Zero,
        })
    }
}

/// Assigns a game to its class, computing `(alpha, beta)` from the
/// thresholds of the row player's deviation `0 -> 1` and the column
/// player's deviation `0 -> 1`.
pub fn classify(game: &Game, prefs: &GamePreferences) -> Result<GameClass2x2> {
    let rel = detect_relations(game)?;
    prefs.check_for(game)?;
    let flat = rel.iter().flatten();
    if flat.clone().any(|r| *r == StrategyRelation::Equivalent) {
        return Ok(GameClass2x2::Equivalent);
    }
    if flat
        .clone()
        .any(|r| matches!(r, StrategyRelation::StrictlyDominatedBy(_)))
    {
        return Ok(GameClass2x2::StrictlyDominated);
    }
    let (xr, yr) = row_deviation(game);
    let (xc, yc) = col_deviation(game);
    let row = side(xr, yr, prefs.get(0))?;
    let col = side(xc, yc, prefs.get(1))?;
    Ok(match (row, col) {
        (
            Side::Crossing {
                pattern_a: ra,
                coefficient: alpha,
            },
            Side::Crossing {
                pattern_a: ca,
                coefficient: beta,
            },
        ) => GameClass2x2::Generic {
            kind: CanonicalType::from_patterns(ra, ca),
            alpha,
            beta,
        },
        (row, col) => {
            let (ra, alpha) = side_limit(row);
            let (ca, beta) = side_limit(col);
            GameClass2x2::WeaklyDominated {
                kind: CanonicalType::from_patterns(ra, ca),
                alpha,
                beta,
            }
        }
    })
}

fn side_limit(side: Side) -> (bool, Limit) {
    match side {
        Side::Crossing {
            pattern_a,
            coefficient,
        } => (pattern_a, Limit::Finite(coefficient)),
        Side::Weak { pattern_a, limit } => (pattern_a, limit),
    }
}

/// `(x, y)` for the row player told 0 and playing 1.
pub(crate) fn row_deviation(game: &Game) -> ([f64; 2], [f64; 2]) {
    let a = game.payoffs(0);
    ([a[0], a[1]], [a[2], a[3]])
}

/// `(x, y)` for the column player told 0 and playing 1.
pub(crate) fn col_deviation(game: &Game) -> ([f64; 2], [f64; 2]) {
    let b = game.payoffs(1);
    ([b[0], b[2]], [b[1], b[3]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpt::WeightingFunction;

    fn eut() -> GamePreferences {
        GamePreferences::expected_utility(2)
    }

    #[test]
    fn relation_examples() {
        let g = Game::two_by_two([[1.0, 2.0], [1.0, 2.0]], [[0.0; 2]; 2]).unwrap();
        let r = detect_relations(&g).unwrap();
        assert_eq!(r[0], [StrategyRelation::Equivalent; 2]);

        let g = Game::two_by_two([[3.0, 2.0], [1.0, 0.0]], [[0.0; 2]; 2]).unwrap();
        let r = detect_relations(&g).unwrap();
        assert_eq!(r[0], [StrategyRelation::Neither, StrategyRelation::StrictlyDominatedBy(0)]);

        let g = Game::two_by_two([[0.0, 2.0], [1.0, 2.0]], [[0.0; 2]; 2]).unwrap();
        let r = detect_relations(&g).unwrap();
        assert_eq!(r[0], [StrategyRelation::WeaklyDominatedBy(1), StrategyRelation::Neither]);
    }

    #[test]
    fn relations_need_2x2() {
        let m = vec![vec![0.0; 3]; 2];
        let g = Game::bimatrix(&m, &m).unwrap();
        assert_eq!(detect_relations(&g), Err(Error::NotTwoByTwo));
    }

    #[test]
    fn threshold_eut_linear() {
        let q = threshold([2.0, 0.0], [0.0, 1.0], &CptPreferences::expected_utility(), 1e-10)
            .unwrap();
        assert!((q - 1.0 / 3.0).abs() < 1e-12);
        let q = threshold([1.0, 0.0], [0.0, 1.0], &CptPreferences::expected_utility(), 1e-10)
            .unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn threshold_prelec_matches_grid_scan() {
        let prefs = CptPreferences::prelec(0.5).unwrap();
        let q = threshold([2.0, 0.0], [0.0, 1.0], &prefs, 1e-10).unwrap();
        let w = WeightingFunction::prelec(0.5).unwrap();
        let f = |p: f64| 2.0 * w.eval(p) - w.eval(1.0 - p);
        let n = 1_000_000;
        let k = (1..n)
            .find(|&k| f(k as f64 / n as f64) >= 0.0)
            .unwrap();
        assert!(q > (k - 1) as f64 / n as f64 && q <= k as f64 / n as f64, "q={q}, k={k}");
        assert!(f(q).abs() <= 1e-10);
    }

    #[test]
    fn threshold_rejects_non_crossing() {
        let prefs = CptPreferences::expected_utility();
        assert_eq!(threshold([1.0, 1.0], [0.0, 0.0], &prefs, 1e-10), Err(Error::WrongSignPattern));
        assert_eq!(threshold([1.0, 0.0], [1.0, 1.0], &prefs, 1e-10), Err(Error::WrongSignPattern));
    }

    #[test]
    fn classify_recovers_canonical_coefficients() {
        for kind in CanonicalType::ALL {
            let g = canonical_game(kind, 2.0, 0.75).unwrap();
            match classify(&g, &eut()).unwrap() {
                GameClass2x2::Generic { kind: k, alpha, beta } => {
                    assert_eq!(k, kind);
                    assert!((alpha - 2.0).abs() < 1e-9);
                    assert!((beta - 0.75).abs() < 1e-9);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn matching_pennies_is_type_three() {
        let g = Game::two_by_two([[1.0, -1.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, -1.0]]).unwrap();
        let c = classify(&g, &eut()).unwrap();
        assert_eq!(c.canonical_type(), Some(CanonicalType::III));
    }

    #[test]
    fn weak_dominance_limit() {
        // a00 < a10, a01 = a11, b00 > b01, b10 < b11
        let g = Game::two_by_two([[0.0, 1.0], [1.0, 1.0]], [[2.0, 0.0], [0.0, 1.0]]).unwrap();
        match classify(&g, &eut()).unwrap() {
            GameClass2x2::WeaklyDominated { kind, alpha, beta } => {
                assert_eq!(kind, CanonicalType::II);
                assert_eq!(alpha, Limit::Infinity);
                assert!(matches!(beta, Limit::Finite(b) if (b - 2.0).abs() < 1e-9));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_precedence() {
        let equiv = Game::two_by_two([[1.0, 1.0], [1.0, 1.0]], [[3.0, 0.0], [1.0, 2.0]]).unwrap();
        assert_eq!(classify(&equiv, &eut()).unwrap(), GameClass2x2::Equivalent);
        let strict = Game::two_by_two([[2.0, 2.0], [1.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(classify(&strict, &eut()).unwrap(), GameClass2x2::StrictlyDominated);
    }

    #[test]
    fn tau_is_an_involution() {
        let mu = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(tau(tau(mu)), mu);
        assert_eq!(tau([1.0, 0.0, 0.0, 0.0]), [0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn limit_reciprocals() {
        assert_eq!(Limit::Zero.reciprocal(), Limit::Infinity);
        assert_eq!(Limit::Infinity.reciprocal(), Limit::Zero);
        assert_eq!(Limit::Finite(4.0).reciprocal(), Limit::Finite(0.25));
    }
}
