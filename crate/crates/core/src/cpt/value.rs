use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a value function relative to its reference point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueKind {
    /// `v(x) = x - r`
    #[serde(alias = "identity_shift")]
    #[default]
    Identity,
    /// `v(x) = (x - r)^a` for gains, `-lambda (r - x)^b` for losses.
    PiecewisePower {
        a: f64,
        b: f64,
        lambda: f64,
    },
}

/// A value function `v^r` anchored at a reference point.
///
/// Continuous, strictly increasing, and `v(r) = 0`. Convexity and loss
/// aversion are not required.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ValueFunction {
    pub reference: f64,
    pub kind: ValueKind,
}

impl ValueFunction {
    pub fn identity(reference: f64) -> Self {
        ValueFunction {
            reference,
            kind: ValueKind::Identity,
        }
    }

    pub fn piecewise_power(reference: f64, a: f64, b: f64, lambda: f64) -> Result<Self> {
        let v = ValueFunction {
            reference,
            kind: ValueKind::PiecewisePower { a, b, lambda },
        };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.reference.is_finite() {
            return Err(Error::InvalidParameter(
                "reference point must be finite".into(),
            ));
        }
        if let ValueKind::PiecewisePower { a, b, lambda } = self.kind {
            let exp_ok = |e: f64| e.is_finite() && e > 0.0 && e <= 1.0;
            if !exp_ok(a) || !exp_ok(b) {
                return Err(Error::InvalidParameter(format!(
                    "power exponents must lie in (0, 1], got a={a}, b={b}"
                )));
            }
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "loss aversion must be positive, got {lambda}"
                )));
            }
        }
        Ok(())
    }

    /// Same shape, different reference point.
    pub fn with_reference(&self, reference: f64) -> Self {
        ValueFunction {
            reference,
            kind: self.kind,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let d = x - self.reference;
        match self.kind {
            ValueKind::Identity => d,
            ValueKind::PiecewisePower { a, b, lambda } => {
                if d >= 0.0 {
                    d.powf(a)
                } else {
                    -lambda * (-d).powf(b)
                }
            }
        }
    }
}
