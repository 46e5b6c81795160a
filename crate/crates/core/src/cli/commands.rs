use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use super::{to_report_json, CliError, GameFile, OutputFormat, RunConfig};
use crate::cpt::{cpt_value, regret, CptPreferences, Prospect};
use crate::game::{
    is_cpt_correlated_equilibrium, is_cpt_nash, is_eut_correlated_equilibrium, Deviation,
    EquilibriumVerdict, JointDistribution, ProductForm,
};
use crate::region::{
    check_resolution, mask_to_csv, mask_to_svg, rasterize_deviation_region,
    rasterize_signal_region, SimplexGrid,
};
use crate::two_by_two::{characterize, nash_set_2x2};
use crate::Error;

/// Grids above this many points are refused unless forced.
pub const MAX_GRID_POINTS: u64 = 5_000_000;

fn player_prefs(gf: Option<&GameFile>, player: usize) -> Result<CptPreferences, CliError> {
    match gf {
        None => Ok(CptPreferences::expected_utility()),
        Some(gf) => {
            if player >= gf.players {
                return Err(CliError::field(
                    "player",
                    format!("player {} does not exist (1..={})", player + 1, gf.players),
                ));
            }
            Ok(*gf.game_preferences()?.get(player))
        }
    }
}

/// CPT value of `prospect` for `player`, or the regret against the outcome
/// profile `against` when given.
pub fn value(
    gf: Option<&GameFile>,
    player: usize,
    prospect: &Prospect,
    against: Option<&[f64]>,
) -> Result<f64, CliError> {
    let prefs = player_prefs(gf, player)?;
    match against {
        None => Ok(cpt_value(prospect, &prefs)),
        Some(y) => Ok(regret(prospect.probs(), prospect.outcomes(), y, &prefs)?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    EutCe,
    CptCe,
    CptNash,
}

impl CheckMode {
    fn name(self) -> &'static str {
        match self {
            CheckMode::EutCe => "eut-ce",
            CheckMode::CptCe => "cpt-ce",
            CheckMode::CptNash => "cpt-nash",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub member: bool,
    pub json: String,
}

#[derive(Serialize)]
struct NamedDeviation<'a> {
    player: usize,
    strategy: &'a str,
    deviation: &'a str,
}

fn name_deviation(gf: &GameFile, d: Deviation) -> NamedDeviation<'_> {
    NamedDeviation {
        player: d.player + 1,
        strategy: gf.strategy_name(d.player, d.strategy),
        deviation: gf.strategy_name(d.player, d.deviation),
    }
}

fn verdict_json(gf: &GameFile, mode: CheckMode, v: &EquilibriumVerdict) -> serde_json::Value {
    json!({
        "mode": mode.name(),
        "member": v.is_member,
        "worst_violation": v.worst_violation,
        "witness": v.witness.map(|d| name_deviation(gf, d)),
        "near_zero_marginals": v.near_zero_marginals.iter().map(|p| json!({
            "player": p.player + 1,
            "strategy": gf.strategy_name(p.player, p.strategy),
        })).collect::<Vec<_>>(),
    })
}

/// Membership of `mu` in the equilibrium set selected by `mode`.
///
/// With `normalize`, `mu` may be any non-negative weight vector.
pub fn check(
    gf: &GameFile,
    mu: &[f64],
    mode: CheckMode,
    tolerance: f64,
    normalize: bool,
) -> Result<CheckOutcome, CliError> {
    let game = gf.game()?;
    let prefs = gf.game_preferences()?;
    if mu.len() != game.joint_size() {
        return Err(CliError::field(
            "mu",
            format!("expected {} entries, found {}", game.joint_size(), mu.len()),
        ));
    }
    let dist = if normalize {
        JointDistribution::normalized(&game, mu)?
    } else {
        JointDistribution::for_game(&game, mu.to_vec())?
    };
    let verdict = match mode {
        CheckMode::EutCe => is_eut_correlated_equilibrium(&game, &dist, tolerance)?,
        CheckMode::CptCe => is_cpt_correlated_equilibrium(&game, &prefs, &dist, tolerance)?,
        CheckMode::CptNash => match ProductForm::infer(&game, dist) {
            Ok(pf) => is_cpt_nash(&game, &prefs, &pf, tolerance)?,
            Err(Error::NotProductForm { deviation }) => {
                let body = json!({
                    "mode": mode.name(),
                    "member": false,
                    "worst_violation": null,
                    "witness": null,
                    "product_form": false,
                    "product_deviation": deviation,
                });
                return Ok(CheckOutcome {
                    member: false,
                    json: to_report_json(&body),
                });
            }
            Err(e) => return Err(e.into()),
        },
    };
    Ok(CheckOutcome {
        member: verdict.is_member,
        json: to_report_json(&verdict_json(gf, mode, &verdict)),
    })
}

/// Full 2x2 report: class, constraints, vertices and Nash set.
pub fn classify(gf: &GameFile) -> Result<String, CliError> {
    let game = gf.game()?;
    if !game.is_two_by_two() {
        return Err(CliError::Core(Error::NotTwoByTwo));
    }
    let prefs = gf.game_preferences()?;
    let desc = characterize(&game, &prefs)?;
    let nash = nash_set_2x2(&game, &prefs)?;
    let constraints: Vec<serde_json::Value> = desc
        .constraints
        .iter()
        .map(|c| {
            let mut v = serde_json::to_value(c).expect("constraint serializes");
            v["symbolic"] = json!(c.symbolic());
            v
        })
        .collect();
    let body = json!({
        "class": desc.class,
        "canonical_type": desc.class.canonical_type().map(|t| t.name()),
        "constraints": constraints,
        "vertices": desc.vertices,
        "implied_zeros": desc.implied_zeros,
        "nash": nash,
    });
    Ok(to_report_json(&body))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionsRequest {
    /// 0-based.
    pub player: usize,
    pub signal: usize,
    pub deviation: Option<usize>,
    pub force: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionsOutcome {
    pub summary_json: String,
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct RegionSummary {
    name: String,
    deviation: Option<String>,
    members: usize,
    components: usize,
    fuzzy_band: usize,
    coarse_resolution: usize,
    coarse_components: usize,
    warning: Option<String>,
    files: Vec<String>,
}

fn file_stem(gf: &GameFile, req: &RegionsRequest, deviation: Option<usize>) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect()
    };
    let mut stem = format!(
        "C_{}_{}",
        req.player + 1,
        clean(gf.strategy_name(req.player, req.signal))
    );
    if let Some(d) = deviation {
        stem.push('_');
        stem.push_str(&clean(gf.strategy_name(req.player, d)));
    }
    stem
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Rasterizes the requested regions, writes CSV and SVG files to the output
/// directory and returns a JSON summary.
///
/// Without a deviation, every `C(i, s_i, d_i)` is produced together with
/// their intersection `C(i, s_i)`.
pub fn regions(gf: &GameFile, req: &RegionsRequest, config: &RunConfig) -> Result<RegionsOutcome, CliError> {
    config.validate()?;
    let game = gf.game()?;
    let prefs = gf.game_preferences()?;
    if req.player >= game.player_count() {
        return Err(CliError::field(
            "player",
            format!("player {} does not exist (1..={})", req.player + 1, game.player_count()),
        ));
    }
    let dim = game.opponent_size(req.player);
    let points = SimplexGrid::point_count(dim, config.resolution).unwrap_or(u64::MAX);
    if points > MAX_GRID_POINTS && !req.force {
        return Err(CliError::field(
            "resolution",
            format!(
                "grid of dimension {dim} at n={} has {points} points (limit {MAX_GRID_POINTS}); lower n or pass --force",
                config.resolution
            ),
        ));
    }
    let deviations: Vec<Option<usize>> = match req.deviation {
        Some(d) => vec![Some(d)],
        None => (0..game.strategy_counts()[req.player])
            .filter(|&d| d != req.signal)
            .map(Some)
            .chain(std::iter::once(None))
            .collect(),
    };
    if config.wants(OutputFormat::Csv) || config.wants(OutputFormat::Svg) || config.wants(OutputFormat::Json) {
        std::fs::create_dir_all(&config.output_dir).map_err(|source| CliError::Io {
            path: config.output_dir.display().to_string(),
            source,
        })?;
    }

    let mut summaries = Vec::new();
    let mut written = Vec::new();
    let mut warnings = Vec::new();
    let player_label = req.player + 1;
    let signal_name = gf.strategy_name(req.player, req.signal).to_string();
    for dev in deviations {
        let build = |grid: SimplexGrid| match dev {
            Some(d) => rasterize_deviation_region(
                &game, &prefs, req.player, req.signal, d, grid, config.tolerance,
            ),
            None => rasterize_signal_region(&game, &prefs, req.player, req.signal, grid, config.tolerance),
        };
        let (mask, res) = check_resolution(dim, config.resolution, build)?;
        let name = match dev {
            Some(d) => format!(
                "C({player_label},{signal_name},{})",
                gf.strategy_name(req.player, d)
            ),
            None => format!("C({player_label},{signal_name})"),
        };
        let warning = res.warning().map(|w| format!("{name}: {w}"));
        if let Some(w) = &warning {
            warnings.push(w.clone());
        }
        let stem = file_stem(gf, req, dev);
        let mut files = Vec::new();
        if config.wants(OutputFormat::Csv) {
            let file = format!("{stem}.csv");
            let path = config.output_dir.join(&file);
            write_file(&path, &mask_to_csv(&mask))?;
            written.push(path);
            files.push(file);
        }
        if config.wants(OutputFormat::Svg) && dim == 3 {
            let opponent = if req.player == 0 { 1 } else { 0 };
            let labels: Vec<&str> = if game.player_count() == 2 {
                (0..3).map(|s| gf.strategy_name(opponent, s)).collect()
            } else {
                vec!["1", "2", "3"]
            };
            let svg = mask_to_svg(&mask, [labels[0], labels[1], labels[2]], &name)?;
            let file = format!("{stem}.svg");
            let path = config.output_dir.join(&file);
            write_file(&path, &svg)?;
            written.push(path);
            files.push(file);
        }
        summaries.push(RegionSummary {
            name,
            deviation: dev.map(|d| gf.strategy_name(req.player, d).to_string()),
            members: mask.member_count(),
            components: mask.component_count(),
            fuzzy_band: mask.fuzzy_band_count(),
            coarse_resolution: res.coarse_resolution,
            coarse_components: res.coarse_components,
            warning,
            files,
        });
    }
    if config.wants(OutputFormat::Svg) && dim != 3 {
        warnings.push(format!(
            "SVG output needs three opponent profiles, found {dim}; skipped"
        ));
    }
    let summary = json!({
        "player": player_label,
        "signal": signal_name,
        "resolution": config.resolution,
        "tolerance": config.tolerance,
        "regions": summaries,
    });
    let summary_json = to_report_json(&summary);
    if config.wants(OutputFormat::Json) {
        let path = config.output_dir.join("summary.json");
        write_file(&path, &summary_json)?;
        written.push(path);
    }
    Ok(RegionsOutcome {
        summary_json,
        written,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::disconnected_game;

    #[test]
    fn value_of_certain_outcome() {
        let p = Prospect::new(vec![1.0], vec![5.0]).unwrap();
        assert_eq!(value(None, 0, &p, None).unwrap(), 5.0);
    }

    #[test]
    fn check_rejects_wrong_dimension() {
        let gf = disconnected_game(0.5, 1.0);
        assert!(check(&gf, &[1.0, 0.0], CheckMode::CptCe, 1e-9, false).is_err());
    }

    #[test]
    fn non_product_is_not_nash() {
        let gf = disconnected_game(0.5, 1.0);
        let mut mu = vec![0.0; 9];
        mu[0] = 0.5;
        mu[8] = 0.5;
        let out = check(&gf, &mu, CheckMode::CptNash, 1e-9, false).unwrap();
        assert!(!out.member);
        assert!(out.json.contains("\"product_form\": false"));
    }

    #[test]
    fn classify_needs_two_by_two() {
        assert!(classify(&disconnected_game(0.5, 1.0)).is_err());
    }

    #[test]
    fn oversized_grid_refused() {
        let gf = disconnected_game(0.5, 1.0);
        let req = RegionsRequest {
            player: 0,
            signal: 0,
            deviation: None,
            force: false,
        };
        let config = RunConfig {
            resolution: 4000,
            formats: vec![],
            ..RunConfig::default()
        };
        let err = regions(&gf, &req, &config).unwrap_err().to_string();
        assert!(err.contains("--force"), "{err}");
    }
}
