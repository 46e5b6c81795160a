//! Cumulative prospect theory: value and weighting functions, prospect
//! evaluation, regret and the regret-decreasing mass transfer.

mod prospect;
mod regret;
mod value;
mod weighting;

use serde::{Deserialize, Serialize};

pub use prospect::{
    cpt_value, cpt_value_at_reference, cpt_value_cumulative, decision_weights,
    descending_order, validate_probabilities, DecisionWeights, Frame, Prospect,
    PROBABILITY_SUM_TOLERANCE,
};
pub use regret::{
    pointwise_dominates, regret, regret_direction, similarly_ranked, Dominance, RegretDirection,
};
pub use value::{ValueFunction, ValueKind};
pub use weighting::WeightingFunction;

pub(crate) use prospect::value_unchecked;
pub(crate) use regret::{common_ranking, regret_unchecked};

use crate::error::Result;

/// One decision maker's CPT preferences: a reference point with its value
/// function, plus weighting functions for gains (`w+`) and losses (`w-`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CptPreferences {
    pub value: ValueFunction,
    pub weight_gain: WeightingFunction,
    pub weight_loss: WeightingFunction,
}

impl CptPreferences {
    pub fn new(
        value: ValueFunction,
        weight_gain: WeightingFunction,
        weight_loss: WeightingFunction,
    ) -> Result<Self> {
        let prefs = CptPreferences {
            value,
            weight_gain,
            weight_loss,
        };
        prefs.validate()?;
        Ok(prefs)
    }

    /// Identity value at reference 0 with identity weights: CPT values are
    /// plain expectations.
    pub fn expected_utility() -> Self {
        CptPreferences::default()
    }

    /// Identity value at reference 0 with the same Prelec weighting for
    /// gains and losses.
    pub fn prelec(alpha: f64) -> Result<Self> {
        let w = WeightingFunction::prelec(alpha)?;
        Ok(CptPreferences {
            value: ValueFunction::identity(0.0),
            weight_gain: w,
            weight_loss: w,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.value.validate()?;
        self.weight_gain.validate()?;
        self.weight_loss.validate()
    }

    pub fn reference(&self) -> f64 {
        self.value.reference
    }

    pub fn with_reference(&self, reference: f64) -> Self {
        CptPreferences {
            value: self.value.with_reference(reference),
            ..*self
        }
    }

    /// True when values reduce to expectations of `x - r`.
    pub fn is_expected_utility(&self) -> bool {
        matches!(self.value.kind, ValueKind::Identity)
            && self.weight_gain.is_identity()
            && self.weight_loss.is_identity()
    }
}
