use serde::Serialize;

use crate::cpt::{validate_probabilities, WeightingFunction};
use crate::error::{Error, Result};

/// Slack allowed when checking that a chain is monotone and ends at one.
pub const CHAIN_TOLERANCE: f64 = 1e-12;

/// Weighted cumulative probabilities `l_j = w(p_{a_1} + ... + p_{a_j})`
/// along an ordering `a` of the coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LCoordinates {
    values: Vec<f64>,
    ordering: Vec<usize>,
}

fn check_permutation(ordering: &[usize], len: usize) -> Result<()> {
    if ordering.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            found: ordering.len(),
        });
    }
    let mut seen = vec![false; len];
    for &a in ordering {
        if a >= len || seen[a] {
            return Err(Error::InvalidParameter(format!(
                "ordering {ordering:?} is not a permutation of 0..{len}"
            )));
        }
        seen[a] = true;
    }
    Ok(())
}

impl LCoordinates {
    /// Validates `0 <= l_1 <= ... <= l_t = 1`, up to [`CHAIN_TOLERANCE`].
    pub fn new(values: Vec<f64>, ordering: Vec<usize>) -> Result<Self> {
        check_permutation(&ordering, values.len())?;
        let Some(&last) = values.last() else {
            return Err(Error::NonMonotoneChain("empty chain".into()));
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonMonotoneChain("non-finite entry".into()));
        }
        if values[0] < -CHAIN_TOLERANCE {
            return Err(Error::NonMonotoneChain(format!("l_1 = {} is negative", values[0])));
        }
        if let Some(j) = values.windows(2).position(|w| w[1] < w[0] - CHAIN_TOLERANCE) {
            return Err(Error::NonMonotoneChain(format!(
                "l_{} = {} exceeds l_{} = {}",
                j + 1,
                values[j],
                j + 2,
                values[j + 1]
            )));
        }
        if (last - 1.0).abs() > CHAIN_TOLERANCE {
            return Err(Error::NonMonotoneChain(format!("last entry is {last}, not 1")));
        }
        Ok(LCoordinates { values, ordering })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    /// Entry-wise midpoint of two chains over the same ordering.
    pub fn midpoint(&self, other: &LCoordinates) -> Result<LCoordinates> {
        if self.ordering != other.ordering {
            return Err(Error::InvalidParameter("chains use different orderings".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        LCoordinates::new(values, self.ordering.clone())
    }
}

pub fn to_l_coordinates(
    p: &[f64],
    ordering: &[usize],
    w: &WeightingFunction,
) -> Result<LCoordinates> {
    validate_probabilities(p)?;
    check_permutation(ordering, p.len())?;
    let mut cum = 0.0;
    let mut values: Vec<f64> = ordering
        .iter()
        .map(|&a| {
            cum += p[a];
            w.eval(cum)
        })
        .collect();
    *values.last_mut().expect("non-empty") = 1.0;
    Ok(LCoordinates {
        values,
        ordering: ordering.to_vec(),
    })
}

/// Recovers `p` by inverting `w` on each cumulative level.
pub fn from_l_coordinates(l: &LCoordinates, w: &WeightingFunction) -> Vec<f64> {
    let mut p = vec![0.0; l.values.len()];
    let mut prev = 0.0;
    for (&a, &lj) in l.ordering.iter().zip(&l.values) {
        let cum = w.inverse(lj.clamp(0.0, 1.0)).max(prev);
        p[a] = cum - prev;
        prev = cum;
    }
    p
}

/// `sum_j l_j (x_{a_j} - x_{a_{j+1}}) - sum_j l_j (y_{a_j} - y_{a_{j+1}})`
/// with `x_{a_{t+1}} = y_{a_{t+1}} = 0`.
///
/// When `x` and `y` are value-transformed gains ranked by `a`, this equals
/// the regret, which is therefore linear in the chain.
pub fn linear_form(l: &LCoordinates, x: &[f64], y: &[f64]) -> Result<f64> {
    let t = l.values.len();
    for len in [x.len(), y.len()] {
        if len != t {
            return Err(Error::LengthMismatch {
                expected: t,
                found: len,
            });
        }
    }
    let a = &l.ordering;
    let mut total = 0.0;
    for j in 0..t {
        let next = |z: &[f64]| if j + 1 < t { z[a[j + 1]] } else { 0.0 };
        let coeff = (x[a[j]] - next(x)) - (y[a[j]] - next(y));
        total += l.values[j] * coeff;
    }
    Ok(total)
}
