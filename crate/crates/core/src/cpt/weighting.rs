use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability weighting function `w: [0,1] -> [0,1]`.
///
/// Every kind is continuous, strictly increasing and pinned at `w(0) = 0`,
/// `w(1) = 1`. Arguments outside `[0, 1]` are clamped, which also absorbs
/// the last-ulp drift of cumulative sums.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightingFunction {
    #[default]
    Identity,
    /// `w(p) = exp(-(-ln p)^alpha)` with `alpha` in `(0, 1]`.
    Prelec { alpha: f64 },
    /// The dual of a Prelec function, `w(p) = 1 - prelec(1 - p)`.
    DualPrelec { alpha: f64 },
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "Prelec alpha must lie in (0, 1], got {alpha}"
        )))
    }
}

fn prelec(alpha: f64, p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if p >= 1.0 {
        1.0
    } else {
        (-(-p.ln()).powf(alpha)).exp()
    }
}

impl WeightingFunction {
    pub fn prelec(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(WeightingFunction::Prelec { alpha })
    }

    /// The dual weighting `p -> 1 - w(1 - p)` of this function.
    pub fn dual(&self) -> Self {
        match *self {
            WeightingFunction::Identity => WeightingFunction::Identity,
            WeightingFunction::Prelec { alpha } => WeightingFunction::DualPrelec { alpha },
            WeightingFunction::DualPrelec { alpha } => WeightingFunction::Prelec { alpha },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightingFunction::Identity => Ok(()),
            WeightingFunction::Prelec { alpha } | WeightingFunction::DualPrelec { alpha } => {
                check_alpha(alpha)
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        match *self {
            WeightingFunction::Identity => true,
            WeightingFunction::Prelec { alpha } | WeightingFunction::DualPrelec { alpha } => {
                alpha == 1.0
            }
        }
    }

    #[inline]
    pub fn eval(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return 1.0;
        }
        match *self {
            WeightingFunction::Identity => p,
            WeightingFunction::Prelec { alpha } => prelec(alpha, p),
            WeightingFunction::DualPrelec { alpha } => 1.0 - prelec(alpha, 1.0 - p),
        }
    }

    /// Inverse of `eval` on `[0, 1]` by bisection.
    ///
    /// The bracket is shrunk until it is narrower than `1e-15` or the
    /// residual drops below `1e-15`, which keeps round trips well inside
    /// `1e-12`.
    pub fn inverse(&self, l: f64) -> f64 {
        if l <= 0.0 {
            return 0.0;
        }
        if l >= 1.0 {
            return 1.0;
        }
        if let WeightingFunction::Identity = self {
            return l;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let val = self.eval(mid);
            if (val - l).abs() <= 1e-15 {
                return mid;
            }
            if val < l {
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
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        for w in [
            WeightingFunction::Identity,
            WeightingFunction::Prelec { alpha: 0.5 },
            WeightingFunction::Prelec { alpha: 0.01 },
            WeightingFunction::DualPrelec { alpha: 0.3 },
        ] {
            assert_eq!(w.eval(0.0), 0.0);
            assert_eq!(w.eval(1.0), 1.0);
            assert_eq!(w.eval(-0.1), 0.0);
            assert_eq!(w.eval(1.0 + 1e-15), 1.0);
        }
    }

    #[test]
    fn prelec_matches_scalar_formula() {
        let w = WeightingFunction::prelec(0.5).unwrap();
        let direct = (-(-(0.4_f64).ln()).sqrt()).exp();
        assert_eq!(w.eval(0.4), direct);
        assert!((w.eval(0.4) - 0.3840).abs() < 5e-5);
    }

    #[test]
    fn prelec_alpha_one_is_identity() {
        let w = WeightingFunction::prelec(1.0).unwrap();
        for k in 1..100 {
            let p = k as f64 / 100.0;
            assert!((w.eval(p) - p).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(WeightingFunction::prelec(0.0).is_err());
        assert!(WeightingFunction::prelec(1.5).is_err());
        assert!(WeightingFunction::prelec(f64::NAN).is_err());
    }

    #[test]
    fn strictly_increasing_and_continuous_on_fine_grid() {
        for w in [
            WeightingFunction::Prelec { alpha: 0.5 },
            WeightingFunction::Prelec { alpha: 0.2 },
            WeightingFunction::DualPrelec { alpha: 0.5 },
        ] {
            let mut prev = w.eval(0.0);
            let n = 100_000;
            for k in 1..=n {
                let v = w.eval(k as f64 / n as f64);
                assert!(v > prev, "{w:?} not increasing at {k}");
                prev = v;
            }
            // local modulus: shrinking the step shrinks the increment
            for k in 1..1000 {
                let p = k as f64 / 1000.0;
                let coarse = w.eval(p + 1e-6) - w.eval(p - 1e-6);
                let fine = w.eval(p + 1e-9) - w.eval(p - 1e-9);
                assert!(fine < 1e-5 && fine < coarse, "{w:?} at {p}");
            }
        }
    }

    #[test]
    fn dual_is_involution_and_complementary() {
        let w = WeightingFunction::Prelec { alpha: 0.4 };
        assert_eq!(w.dual().dual(), w);
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            assert!((w.dual().eval(p) - (1.0 - w.eval(1.0 - p))).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let w = WeightingFunction::Prelec { alpha: 0.5 };
        for k in 0..=1000 {
            let p = k as f64 / 1000.0;
            assert!((w.inverse(w.eval(p)) - p).abs() < 1e-12, "p={p}");
        }
    }
}
