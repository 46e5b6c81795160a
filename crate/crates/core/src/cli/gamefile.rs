use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::cpt::{CptPreferences, ValueFunction, ValueKind, WeightingFunction};
use crate::game::{Game, GamePreferences};

/// One player's preferences as written in a game file. Every field is
/// optional and defaults to the expected-utility choice.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceSpec {
    #[serde(default)]
    pub reference: f64,
    #[serde(default)]
    pub value: ValueKind,
    #[serde(default)]
    pub weight_gain: WeightingFunction,
    #[serde(default)]
    pub weight_loss: WeightingFunction,
}

impl PreferenceSpec {
    pub fn to_preferences(&self) -> crate::Result<CptPreferences> {
        CptPreferences::new(
            ValueFunction {
                reference: self.reference,
                kind: self.value,
            },
            self.weight_gain,
            self.weight_loss,
        )
    }

    pub fn from_preferences(p: &CptPreferences) -> Self {
        PreferenceSpec {
            reference: p.value.reference,
            value: p.value.kind,
            weight_gain: p.weight_gain,
            weight_loss: p.weight_loss,
        }
    }
}

/// A game on disk.
///
/// `payoffs[i]` is player `i`'s payoff tensor as nested arrays indexed
/// `[s_1][s_2]...`; for two players it is the familiar matrix with rows for
/// player 1 and columns for player 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: usize,
    pub strategies: Vec<Vec<String>>,
    pub payoffs: Vec<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preferences: Vec<PreferenceSpec>,
}

fn field(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Field {
        field: field.into(),
        message: message.into(),
    }
}

fn flatten(value: &Value, shape: &[usize], path: String, out: &mut Vec<f64>) -> Result<(), CliError> {
    match shape.split_first() {
        None => {
            let x = value
                .as_f64()
                .ok_or_else(|| field(&path, format!("expected a number, found {value}")))?;
            if !x.is_finite() {
                return Err(field(&path, "payoff is not finite"));
            }
            out.push(x);
            Ok(())
        }
        Some((&len, rest)) => {
            let arr = value
                .as_array()
                .ok_or_else(|| field(&path, format!("expected an array of {len} entries")))?;
            if arr.len() != len {
                return Err(field(
                    &path,
                    format!("expected {len} entries, found {}", arr.len()),
                ));
            }
            for (k, v) in arr.iter().enumerate() {
                flatten(v, rest, format!("{path}[{k}]"), out)?;
            }
            Ok(())
        }
    }
}

fn nest(values: &[f64], shape: &[usize]) -> Value {
    match shape.split_first() {
        None => Value::from(values[0]),
        Some((&len, rest)) => {
            let chunk = values.len() / len;
            Value::Array(
                (0..len)
                    .map(|k| nest(&values[k * chunk..(k + 1) * chunk], rest))
                    .collect(),
            )
        }
    }
}

impl GameFile {
    /// Parses and validates a game file.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let gf: GameFile = serde_json::from_str(text).map_err(|e| CliError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        gf.validate()?;
        Ok(gf)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("game file serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.game()?;
        self.game_preferences()?;
        Ok(())
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.strategies.iter().map(Vec::len).collect()
    }

    pub fn game(&self) -> Result<Game, CliError> {
        if self.players < 2 {
            return Err(field("players", "a game needs at least two players"));
        }
        if self.strategies.len() != self.players {
            return Err(field(
                "strategies",
                format!("expected {} lists, found {}", self.players, self.strategies.len()),
            ));
        }
        if self.payoffs.len() != self.players {
            return Err(field(
                "payoffs",
                format!("expected {} tensors, found {}", self.players, self.payoffs.len()),
            ));
        }
        let shape = self.strategy_counts();
        let mut tensors = Vec::with_capacity(self.players);
        for (i, v) in self.payoffs.iter().enumerate() {
            let mut flat = Vec::new();
            flatten(v, &shape, format!("payoffs[{i}]"), &mut flat)?;
            tensors.push(flat);
        }
        Game::new(shape, tensors).map_err(|e| field("payoffs", e.to_string()))
    }

    pub fn game_preferences(&self) -> Result<GamePreferences, CliError> {
        if self.preferences.is_empty() {
            return Ok(GamePreferences::expected_utility(self.players));
        }
        if self.preferences.len() != self.players {
            return Err(field(
                "preferences",
                format!("expected {} entries, found {}", self.players, self.preferences.len()),
            ));
        }
        let prefs = self
            .preferences
            .iter()
            .enumerate()
            .map(|(i, p)| {
                p.to_preferences()
                    .map_err(|e| field(format!("preferences[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GamePreferences::new(prefs)?)
    }

    /// Builds a file from a game, naming strategies `S1, S2, ...` unless
    /// names are supplied.
    pub fn from_game(
        game: &Game,
        names: Option<Vec<Vec<String>>>,
        prefs: Option<&GamePreferences>,
    ) -> Self {
        let shape = game.strategy_counts().to_vec();
        let strategies = names.unwrap_or_else(|| {
            shape
                .iter()
                .map(|&m| (1..=m).map(|s| format!("S{s}")).collect())
                .collect()
        });
        GameFile {
            players: game.player_count(),
            strategies,
            payoffs: (0..game.player_count())
                .map(|i| nest(game.payoffs(i), &shape))
                .collect(),
            preferences: prefs
                .map(|p| p.as_slice().iter().map(PreferenceSpec::from_preferences).collect())
                .unwrap_or_default(),
        }
    }

    /// Resolves a strategy given by name or by 1-based index.
    pub fn strategy_index(&self, player: usize, token: &str) -> Result<usize, CliError> {
        let names = &self.strategies[player];
        if let Some(k) = names.iter().position(|n| n == token) {
            return Ok(k);
        }
        match token.parse::<usize>() {
            Ok(k) if (1..=names.len()).contains(&k) => Ok(k - 1),
            _ => Err(field(
                "strategy",
                format!(
                    "'{token}' is neither a strategy of player {} ({}) nor an index in 1..={}",
                    player + 1,
                    names.join(", "),
                    names.len()
                ),
            )),
        }
    }

    pub fn strategy_name(&self, player: usize, s: usize) -> &str {
        &self.strategies[player][s]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "players": 2,
        "strategies": [["U", "D"], ["L", "C", "R"]],
        "payoffs": [[[1, 2, 3], [4, 5, 6]], [[0, 0, 1], [1, 0, 0]]],
        "preferences": [
            {"weight_gain": {"kind": "prelec", "alpha": 0.5}, "weight_loss": {"kind": "prelec", "alpha": 0.5}},
            {"reference": 1.0, "value": {"kind": "piecewise_power", "a": 0.88, "b": 0.88, "lambda": 2.25}}
        ]
    }"#;

    #[test]
    fn parses_nested_payoffs_row_major() {
        let gf = GameFile::parse(SAMPLE).unwrap();
        let g = gf.game().unwrap();
        assert_eq!(g.payoffs(0), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(g.payoff(1, &[0, 2]), 1.0);
        let prefs = gf.game_preferences().unwrap();
        assert_eq!(prefs.get(1).reference(), 1.0);
    }

    #[test]
    fn round_trip_is_idempotent() {
        let gf = GameFile::parse(SAMPLE).unwrap();
        let once = gf.to_json();
        let again = GameFile::parse(&once).unwrap().to_json();
        assert_eq!(once, again);
    }

    #[test]
    fn shape_errors_name_the_field() {
        let bad = SAMPLE.replace("[4, 5, 6]", "[4, 5]");
        let err = GameFile::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("payoffs[0][1]"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line() {
        let err = GameFile::parse("{\n\"players\": 2,\n oops }").unwrap_err();
        assert!(matches!(err, CliError::Json { line: 3, .. }), "{err}");
    }

    #[test]
    fn defaults_to_expected_utility() {
        let text = r#"{"players":2,"strategies":[["a","b"],["c","d"]],"payoffs":[[[1,0],[0,1]],[[1,0],[0,1]]]}"#;
        let gf = GameFile::parse(text).unwrap();
        assert!(gf.game_preferences().unwrap().get(0).is_expected_utility());
    }

    #[test]
    fn from_game_round_trips() {
        let g = Game::bimatrix(&[vec![1.0, 2.0], vec![3.0, 4.0]], &[vec![0.5, 0.0], vec![0.0, 1.0]])
            .unwrap();
        let gf = GameFile::from_game(&g, None, None);
        assert_eq!(GameFile::parse(&gf.to_json()).unwrap().game().unwrap(), g);
    }

    #[test]
    fn strategies_by_name_or_index() {
        let gf = GameFile::parse(SAMPLE).unwrap();
        assert_eq!(gf.strategy_index(1, "C").unwrap(), 1);
        assert_eq!(gf.strategy_index(1, "3").unwrap(), 2);
        assert!(gf.strategy_index(1, "4").is_err());
    }
}
