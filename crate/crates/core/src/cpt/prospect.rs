use serde::{Deserialize, Serialize};

use super::CptPreferences;
use crate::error::{Error, Result};

/// Tolerance on `|sum(p) - 1|` accepted for probability vectors.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// Checks that `probs` is a finite, non-negative vector summing to one.
pub fn validate_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidProbabilities("empty vector".into()));
    }
    let mut sum = 0.0;
    for (j, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidProbabilities(format!(
                "entry {j} is {p}"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(Error::InvalidProbabilities(format!(
            "entries sum to {sum}"
        )));
    }
    Ok(())
}

pub(crate) fn validate_outcomes(outcomes: &[f64], expected: usize) -> Result<()> {
    if outcomes.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: outcomes.len(),
        });
    }
    if let Some(j) = outcomes.iter().position(|z| !z.is_finite()) {
        return Err(Error::InvalidParameter(format!("outcome {j} is not finite")));
    }
    Ok(())
}

/// A finite lottery: outcome `outcomes[j]` occurs with probability `probs[j]`.
///
/// Zero-probability entries are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prospect {
    probs: Vec<f64>,
    outcomes: Vec<f64>,
}

impl Prospect {
    pub fn new(probs: Vec<f64>, outcomes: Vec<f64>) -> Result<Self> {
        validate_probabilities(&probs)?;
        validate_outcomes(&outcomes, probs.len())?;
        Ok(Prospect { probs, outcomes })
    }

    /// A degenerate lottery paying `outcome` with certainty.
    pub fn certain(outcome: f64) -> Self {
        Prospect {
            probs: vec![1.0],
            outcomes: vec![outcome],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Indices with strictly positive probability.
    pub fn support(&self) -> Vec<usize> {
        support(&self.probs)
    }
}

pub(crate) fn support(probs: &[f64]) -> Vec<usize> {
    probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(j, _)| j)
        .collect()
}

/// Indices sorting `z` in descending order; ties keep their original order.
pub fn descending_order(z: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]));
    order
}

/// Whether a decision weight applies to a gain or to a loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Gain,
    Loss,
}

/// Rank-dependent decision weights of a prospect.
///
/// Entry `k` of `weights` and `frames` belongs to outcome `order[k]`, the
/// `k`-th largest outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionWeights {
    pub order: Vec<usize>,
    /// Number of outcomes at or above the reference point.
    pub gain_count: usize,
    pub weights: Vec<f64>,
    pub frames: Vec<Frame>,
}

impl DecisionWeights {
    pub fn gain_sum(&self) -> f64 {
        self.weights[..self.gain_count].iter().sum()
    }

    pub fn loss_sum(&self) -> f64 {
        self.weights[self.gain_count..].iter().sum()
    }
}

/// Decision weights `pi^+` (top-down cumulative differences of `w+`) for the
/// outcomes at or above the reference point and `pi^-` (bottom-up
/// differences of `w-`) for the rest.
pub fn decision_weights(prospect: &Prospect, prefs: &CptPreferences) -> DecisionWeights {
    weights_for(&prospect.probs, &prospect.outcomes, prefs)
}

/// Ranks (positions in `order`) of the first and last outcome carrying
/// positive probability.
fn positive_span(probs: &[f64], order: &[usize]) -> (usize, usize) {
    let first = order.iter().position(|&j| probs[j] > 0.0).unwrap_or(0);
    let last = order.iter().rposition(|&j| probs[j] > 0.0).unwrap_or(order.len() - 1);
    (first, last)
}

/// Running sums of `probs` along `order` from the top (`top_down`) or from
/// the bottom. Once every positive entry has been absorbed the sum is
/// exactly one: weighting functions can be infinitely steep at one, so a
/// rounded `1 - 1e-16` would otherwise shift decision weights visibly.
fn cumulative_masses(probs: &[f64], order: &[usize], range: std::ops::Range<usize>, top_down: bool) -> Vec<f64> {
    let (first, last) = positive_span(probs, order);
    let mut cum = 0.0;
    let mut out = vec![0.0; order.len()];
    let ks: Vec<usize> = if top_down { range.collect() } else { range.rev().collect() };
    for k in ks {
        cum += probs[order[k]];
        let complete = if top_down { k >= last } else { k <= first };
        out[k] = if complete { 1.0 } else { cum };
    }
    out
}

fn weights_for(probs: &[f64], outcomes: &[f64], prefs: &CptPreferences) -> DecisionWeights {
    let order = descending_order(outcomes);
    let r = prefs.value.reference;
    let gain_count = order.iter().take_while(|&&j| outcomes[j] >= r).count();
    let t = order.len();
    let mut weights = vec![0.0; t];

    let gains = cumulative_masses(probs, &order, 0..gain_count, true);
    let losses = cumulative_masses(probs, &order, gain_count..t, false);
    let mut prev = 0.0;
    for k in 0..gain_count {
        let w = prefs.weight_gain.eval(gains[k]);
        weights[k] = w - prev;
        prev = w;
    }
    let mut prev = 0.0;
    for k in (gain_count..t).rev() {
        let w = prefs.weight_loss.eval(losses[k]);
        weights[k] = w - prev;
        prev = w;
    }
    let frames = (0..t)
        .map(|k| if k < gain_count { Frame::Gain } else { Frame::Loss })
        .collect();
    DecisionWeights {
        order,
        gain_count,
        weights,
        frames,
    }
}

/// CPT value as the decision-weighted sum of values.
///
/// Tied outcomes are merged before weighting (their probabilities summed in
/// ascending order), so the result does not depend on how ties are ordered.
pub fn cpt_value(prospect: &Prospect, prefs: &CptPreferences) -> f64 {
    value_unchecked(&prospect.probs, &prospect.outcomes, prefs)
}

/// CPT value in the cumulative (telescoped) form:
/// `sum_j w+(P_j)[v(z_j) - v(z_{j+1})]` over the gains plus the mirrored
/// sum over the losses, with `P_j` the mass of the `j` best outcomes.
pub fn cpt_value_cumulative(prospect: &Prospect, prefs: &CptPreferences) -> f64 {
    let z = &prospect.outcomes;
    let p = &prospect.probs;
    let order = descending_order(z);
    let t = order.len();
    let r = prefs.value.reference;
    let g = order.iter().take_while(|&&j| z[j] >= r).count();
    let v = |k: usize| prefs.value.eval(z[order[k]]);

    let gains = cumulative_masses(p, &order, 0..g, true);
    let losses = cumulative_masses(p, &order, g..t, false);
    let mut total = 0.0;
    for k in 0..g {
        let diff = if k + 1 < g { v(k) - v(k + 1) } else { v(k) };
        total += prefs.weight_gain.eval(gains[k]) * diff;
    }
    for k in (g..t).rev() {
        let diff = if k > g { v(k) - v(k - 1) } else { v(k) };
        total += prefs.weight_loss.eval(losses[k]) * diff;
    }
    total
}

/// CPT value of `(probs, outcomes)` with the reference point of `prefs`
/// replaced by `reference`. Hook for callers that derive the reference
/// point from context.
pub fn cpt_value_at_reference(
    prospect: &Prospect,
    prefs: &CptPreferences,
    reference: f64,
) -> f64 {
    cpt_value(prospect, &prefs.with_reference(reference))
}

pub(crate) fn value_unchecked(probs: &[f64], outcomes: &[f64], prefs: &CptPreferences) -> f64 {
    let order = descending_order(outcomes);
    let has_ties = order
        .windows(2)
        .any(|w| outcomes[w[0]] == outcomes[w[1]]);

    if !has_ties {
        let dw = weights_for(probs, outcomes, prefs);
        return dw
            .order
            .iter()
            .zip(&dw.weights)
            .map(|(&j, &pi)| pi * prefs.value.eval(outcomes[j]))
            .sum();
    }

    let mut merged_p = Vec::with_capacity(order.len());
    let mut merged_z = Vec::with_capacity(order.len());
    let mut k = 0;
    let mut group = Vec::new();
    while k < order.len() {
        let z = outcomes[order[k]];
        group.clear();
        while k < order.len() && outcomes[order[k]] == z {
            group.push(probs[order[k]]);
            k += 1;
        }
        group.sort_by(f64::total_cmp);
        merged_p.push(group.iter().sum::<f64>());
        merged_z.push(z);
    }
    let dw = weights_for(&merged_p, &merged_z, prefs);
    dw.order
        .iter()
        .zip(&dw.weights)
        .map(|(&j, &pi)| pi * prefs.value.eval(merged_z[j]))
        .sum()
}
