use serde::{Deserialize, Serialize};

use super::prospect::{support, validate_outcomes, validate_probabilities, value_unchecked};
use super::CptPreferences;
use crate::error::{Error, Result};

/// Regret of choosing `y` over `x`: `V(p, x) - V(p, y)`.
pub fn regret(p: &[f64], x: &[f64], y: &[f64], prefs: &CptPreferences) -> Result<f64> {
    validate_probabilities(p)?;
    validate_outcomes(x, p.len())?;
    validate_outcomes(y, p.len())?;
    Ok(regret_unchecked(p, x, y, prefs))
}

#[inline]
pub(crate) fn regret_unchecked(p: &[f64], x: &[f64], y: &[f64], prefs: &CptPreferences) -> f64 {
    value_unchecked(p, x, prefs) - value_unchecked(p, y, prefs)
}

/// Pointwise comparison of two outcome profiles on the support of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    /// `x >= y` on the support, strictly somewhere on it.
    XStrict,
    /// `y >= x` on the support, strictly somewhere on it.
    YStrict,
    /// Equal on the support; off the support `x >= y` with some strict entry.
    XWeak,
    /// Equal on the support; off the support `y >= x` with some strict entry.
    YWeak,
    /// Equal on the support, and not ordered off it.
    Equal,
    Neither,
}

impl Dominance {
    /// True when one profile pointwise dominates the other on the support
    /// (including equality).
    pub fn is_dominating(self) -> bool {
        !matches!(self, Dominance::Neither)
    }
}

fn compare_on(indices: impl Iterator<Item = usize>, x: &[f64], y: &[f64]) -> (bool, bool) {
    let (mut x_above, mut y_above) = (false, false);
    for j in indices {
        if x[j] > y[j] {
            x_above = true;
        } else if x[j] < y[j] {
            y_above = true;
        }
    }
    (x_above, y_above)
}

pub fn pointwise_dominates(p: &[f64], x: &[f64], y: &[f64]) -> Result<Dominance> {
    validate_outcomes(x, p.len())?;
    validate_outcomes(y, p.len())?;
    let on = compare_on((0..p.len()).filter(|&j| p[j] > 0.0), x, y);
    Ok(match on {
        (true, true) => Dominance::Neither,
        (true, false) => Dominance::XStrict,
        (false, true) => Dominance::YStrict,
        (false, false) => match compare_on((0..p.len()).filter(|&j| p[j] <= 0.0), x, y) {
            (true, false) => Dominance::XWeak,
            (false, true) => Dominance::YWeak,
            _ => Dominance::Equal,
        },
    })
}

/// A permutation of the support of `p` that sorts both `x` and `y` in
/// descending order, if one exists.
pub fn similarly_ranked(p: &[f64], x: &[f64], y: &[f64]) -> Result<Option<Vec<usize>>> {
    validate_outcomes(x, p.len())?;
    validate_outcomes(y, p.len())?;
    Ok(common_ranking(&support(p), x, y))
}

/// Sorting by `x` descending with ties broken by `y` descending settles every
/// tie group; the ranking exists iff `y` then comes out non-increasing.
pub(crate) fn common_ranking(indices: &[usize], x: &[f64], y: &[f64]) -> Option<Vec<usize>> {
    let mut perm = indices.to_vec();
    perm.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(y[b].total_cmp(&y[a])));
    if perm.windows(2).all(|w| y[w[0]] >= y[w[1]]) {
        Some(perm)
    } else {
        None
    }
}

/// Unit mass transfer `from_index -> to_index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretDirection {
    pub delta: Vec<f64>,
    pub from_index: usize,
    pub to_index: usize,
}

impl RegretDirection {
    fn transfer(len: usize, from: usize, to: usize) -> Self {
        let mut delta = vec![0.0; len];
        delta[from] = -1.0;
        delta[to] = 1.0;
        RegretDirection {
            delta,
            from_index: from,
            to_index: to,
        }
    }

    /// Largest step keeping `p + eps * delta` on the simplex.
    pub fn max_step(&self, p: &[f64]) -> f64 {
        p[self.from_index]
    }

    /// `p + eps * delta`, with the source entry clamped at zero.
    pub fn apply(&self, p: &[f64], eps: f64) -> Vec<f64> {
        let mut q = p.to_vec();
        let moved = eps.min(p[self.from_index]);
        q[self.from_index] = p[self.from_index] - moved;
        q[self.to_index] = p[self.to_index] + moved;
        q
    }
}

/// A direction along which the regret `V(p,x) - V(p,y)` strictly decreases
/// for every reference point and every feasible step.
///
/// When the prospects are not similarly ranked, mass moves from `j1` to `j2`
/// where `j1` precedes `j2` in the `x`-descending order (ties by index) and
/// `y[j1] < y[j2]`; the lexicographically first such pair is used. When they
/// are similarly ranked but neither dominates, mass moves from the
/// coordinate with `x > y` to the coordinate with `x < y` of the first pair
/// of opposite-sign differences that are adjacent once tied coordinates are
/// skipped in the common ranking.
pub fn regret_direction(p: &[f64], x: &[f64], y: &[f64]) -> Result<RegretDirection> {
    validate_probabilities(p)?;
    validate_outcomes(x, p.len())?;
    validate_outcomes(y, p.len())?;
    let supp = support(p);
    let t = p.len();

    match common_ranking(&supp, x, y) {
        None => {
            let mut by_x = supp.clone();
            by_x.sort_by(|&a, &b| x[b].total_cmp(&x[a]));
            for (u, &j1) in by_x.iter().enumerate() {
                if let Some(&j2) = by_x[u + 1..].iter().find(|&&j2| y[j1] < y[j2]) {
                    return Ok(RegretDirection::transfer(t, j1, j2));
                }
            }
            Err(Error::PreconditionViolated(
                "no rank reversal found between profiles".into(),
            ))
        }
        Some(perm) => {
            let dom = pointwise_dominates(p, x, y)?;
            if dom.is_dominating() {
                return Err(Error::PreconditionViolated(format!(
                    "profiles are similarly ranked and one dominates the other ({dom:?})"
                )));
            }
            let differing: Vec<usize> = perm.into_iter().filter(|&j| x[j] != y[j]).collect();
            for w in differing.windows(2) {
                let (a, b) = (w[0], w[1]);
                let a_up = x[a] > y[a];
                let b_up = x[b] > y[b];
                if a_up != b_up {
                    let (from, to) = if a_up { (a, b) } else { (b, a) };
                    return Ok(RegretDirection::transfer(t, from, to));
                }
            }
            Err(Error::PreconditionViolated(
                "no sign change between profiles".into(),
            ))
        }
    }
}
