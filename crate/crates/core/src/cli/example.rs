use serde::Serialize;
use serde_json::json;

use super::{CliError, GameFile, PreferenceSpec};
use crate::cpt::{regret_unchecked, ValueKind, WeightingFunction};
use crate::fmt::g12;
use crate::game::{is_cpt_correlated_equilibrium, Game, GamePreferences, JointDistribution};
use crate::region::{
    check_resolution, lift_to_joint, rasterize_signal_region, RegionMask, SimplexGrid,
};

const ROW: [&str; 3] = ["TOP", "CENTER", "BOTTOM"];
const COL: [&str; 3] = ["RED", "YELLOW", "GREEN"];

const ROW_PAYOFFS: [[f64; 3]; 3] = [[69.0, 61.0, 20.0], [50.0, 60.0, 30.0], [101.0, 41.0, 0.0]];
const COL_PAYOFFS: [[f64; 3]; 3] = [[10.0, 0.0, 10.0], [0.0, 10.0, 0.0], [0.0, 10.0, 0.0]];

/// Accepted interval for the TOP-versus-BOTTOM threshold on `p_R`.
pub const THRESHOLD_WINDOW: (f64, f64) = (0.39, 0.41);

/// Resolution of the lift grid used to search for equilibria that never
/// recommend TOP.
pub const LIFT_RESOLUTION: usize = 10;

/// The 3x3 game with a disconnected `C(1, TOP)`: identity values and Prelec
/// weights with exponents `alpha1`, `alpha2`.
pub fn disconnected_game(alpha1: f64, alpha2: f64) -> GameFile {
    let prelec = |alpha: f64| PreferenceSpec {
        reference: 0.0,
        value: ValueKind::Identity,
        weight_gain: WeightingFunction::Prelec { alpha },
        weight_loss: WeightingFunction::Prelec { alpha },
    };
    let matrix = |m: [[f64; 3]; 3]| json!(m);
    GameFile {
        players: 2,
        strategies: vec![
            ROW.iter().map(|s| s.to_string()).collect(),
            COL.iter().map(|s| s.to_string()).collect(),
        ],
        payoffs: vec![matrix(ROW_PAYOFFS), matrix(COL_PAYOFFS)],
        preferences: vec![prelec(alpha1), prelec(alpha2)],
    }
}

/// `mu-bar` of the worked example, normalized.
pub const MU_BAR: [f64; 9] = [0.2, 0.05, 0.25, 0.0, 0.025, 0.25, 0.2, 0.025, 0.0];
/// `mu-tilde` of the worked example, normalized.
pub const MU_TILDE: [f64; 9] = [0.2, 0.0, 0.3, 0.0, 0.0, 0.3, 0.2, 0.0, 0.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleConfig {
    pub resolution: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub tolerance: f64,
}

impl Default for ExampleConfig {
    fn default() -> Self {
        ExampleConfig {
            resolution: crate::region::DEFAULT_RESOLUTION,
            alpha1: 0.5,
            alpha2: 1.0,
            tolerance: crate::game::DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleReport {
    pub checks: Vec<ExampleCheck>,
    pub warnings: Vec<String>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&ExampleCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// One line per check, `PASS` or `FAIL` first.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
        }
        s
    }
}

/// Root in `p_R` of the TOP-versus-BOTTOM regret along `p_G = 0`, by
/// bisection to a bracket of `1e-12`.
pub fn top_bottom_threshold(game: &Game, prefs: &GamePreferences) -> Option<f64> {
    let x = game.outcome_profile(0, 0);
    let y = game.outcome_profile(0, 2);
    let f = |t: f64| regret_unchecked(&[t, 1.0 - t, 0.0], &x, &y, prefs.get(0));
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return None;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Grid points where membership in `C(2, s)` disagrees with the half-plane
/// `p_T >= 1/2` (`upper`) or `p_T <= 1/2`.
fn half_plane_mismatches(mask: &RegionMask, upper: bool) -> usize {
    let grid = mask.grid();
    let n = grid.resolution() as u64;
    grid.lattice()
        .chunks(3)
        .enumerate()
        .filter(|(idx, k)| {
            let twice = 2 * k[0] as u64;
            let expected = if upper { twice >= n } else { twice <= n };
            mask.is_member(*idx) != expected
        })
        .count()
}

/// Runs the whole worked example and reports each claim as a check.
pub fn run_disconnected_example(config: &ExampleConfig) -> Result<ExampleReport, CliError> {
    let gf = disconnected_game(config.alpha1, config.alpha2);
    let game = gf.game()?;
    let prefs = gf.game_preferences()?;
    let tol = config.tolerance;
    let n = config.resolution;
    let mut checks = Vec::new();
    let mut warnings = Vec::new();

    let root = top_bottom_threshold(&game, &prefs);
    checks.push(ExampleCheck {
        name: "threshold",
        passed: root.is_some_and(|r| (THRESHOLD_WINDOW.0..=THRESHOLD_WINDOW.1).contains(&r)),
        detail: match root {
            Some(r) => format!(
                "TOP vs BOTTOM at p_G = 0 changes sign at p_R = {} (window [{}, {}])",
                g12(r),
                THRESHOLD_WINDOW.0,
                THRESHOLD_WINDOW.1
            ),
            None => "TOP vs BOTTOM regret does not change sign along p_G = 0".into(),
        },
    });

    let grid = SimplexGrid::new(3, n)?;
    let mut mismatches = Vec::new();
    for (s, upper) in [(0, true), (1, false), (2, true)] {
        let mask = rasterize_signal_region(&game, &prefs, 1, s, grid, tol)?;
        mismatches.push((COL[s], half_plane_mismatches(&mask, upper)));
    }
    checks.push(ExampleCheck {
        name: "player-2-half-planes",
        passed: mismatches.iter().all(|(_, m)| *m == 0),
        detail: format!(
            "grid points off the half-planes at n={n}: {}",
            mismatches
                .iter()
                .map(|(s, m)| format!("{s} {m}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    });

    let (top, res) = check_resolution(3, n, |g| rasterize_signal_region(&game, &prefs, 0, 0, g, tol))?;
    if let Some(w) = res.warning() {
        warnings.push(format!("C(1,TOP): {w}"));
    }
    checks.push(ExampleCheck {
        name: "top-components",
        passed: top.component_count() == 2,
        detail: format!(
            "C(1,TOP) has {} components at n={} and {} at n={} (expected 2)",
            res.components, res.resolution, res.coarse_components, res.coarse_resolution
        ),
    });

    let mut memberships = Vec::new();
    let mut components = Vec::new();
    for (label, weights) in [("mu-bar", MU_BAR), ("mu-tilde", MU_TILDE)] {
        let mu = JointDistribution::normalized(&game, &weights)?;
        let verdict = is_cpt_correlated_equilibrium(&game, &prefs, &mu, tol)?;
        let cond = mu.conditional(&game, 0, 0, tol)?;
        let comp = top.component_at(&cond)?;
        memberships.push((label, verdict.is_member, verdict.worst_violation));
        components.push(comp);
    }
    let distinct = matches!((components[0], components[1]), (Some(a), Some(b)) if a != b);
    checks.push(ExampleCheck {
        name: "equilibrium-memberships",
        passed: memberships.iter().all(|m| m.1) && distinct,
        detail: format!(
            "{}; TOP conditionals in components {:?} and {:?}",
            memberships
                .iter()
                .map(|(l, m, w)| format!("{l} member={m} worst={}", g12(*w)))
                .collect::<Vec<_>>()
                .join(", "),
            components[0],
            components[1]
        ),
    });

    let (tested, found) = search_top_free_equilibria(&game, &prefs, tol)?;
    checks.push(ExampleCheck {
        name: "no-top-free-equilibrium",
        passed: found == 0,
        detail: format!(
            "{found} of {tested} lifted distributions with mu_1(TOP) = 0 are equilibria"
        ),
    });

    Ok(ExampleReport { checks, warnings })
}

/// Lifts every combination of a signal mix over CENTER and BOTTOM and two
/// opponent distributions from a coarse grid, and counts CPT correlated
/// equilibria among them.
fn search_top_free_equilibria(
    game: &Game,
    prefs: &GamePreferences,
    tol: f64,
) -> Result<(usize, usize), CliError> {
    let m = LIFT_RESOLUTION;
    let grid = SimplexGrid::new(3, m)?;
    let points: Vec<Vec<f64>> = grid.lattice().chunks(3).map(|k| grid.point(k)).collect();
    let mut tested = 0;
    let mut found = 0;
    for a in 0..=m {
        let qc = a as f64 / m as f64;
        let q = [0.0, qc, 1.0 - qc];
        let centers: &[Vec<f64>] = if a == 0 { &points[..1] } else { &points };
        let bottoms: &[Vec<f64>] = if a == m { &points[..1] } else { &points };
        for pc in centers {
            for pb in bottoms {
                let mu = lift_to_joint(game, 0, &[vec![], pc.clone(), pb.clone()], &q)?;
                tested += 1;
                if is_cpt_correlated_equilibrium(game, prefs, &mu, tol)?.is_member {
                    found += 1;
                }
            }
        }
    }
    Ok((tested, found))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_normalized() {
        assert!((MU_BAR.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((MU_TILDE.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_near_point_four() {
        let gf = disconnected_game(0.5, 1.0);
        let r = top_bottom_threshold(&gf.game().unwrap(), &gf.game_preferences().unwrap()).unwrap();
        assert!((r - 0.40132).abs() < 1e-4, "{r}");
    }

    #[test]
    fn coarse_run_passes() {
        let report = run_disconnected_example(&ExampleConfig {
            resolution: 60,
            ..ExampleConfig::default()
        })
        .unwrap();
        assert!(report.passed(), "{}", report.render());
    }
}
