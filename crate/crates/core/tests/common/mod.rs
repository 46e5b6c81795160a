#![allow(dead_code)]

use cpt_eq::cpt::{CptPreferences, ValueFunction, ValueKind, WeightingFunction};
use cpt_eq::game::{Game, GamePreferences, JointDistribution};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn oracle_weight(w: &WeightingFunction, p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let prelec = |a: f64, q: f64| {
        if q <= 0.0 {
            0.0
        } else if q >= 1.0 {
            1.0
        } else {
            (-(-q.ln()).powf(a)).exp()
        }
    };
    match *w {
        WeightingFunction::Identity => p,
        WeightingFunction::Prelec { alpha } => prelec(alpha, p),
        WeightingFunction::DualPrelec { alpha } => 1.0 - prelec(alpha, 1.0 - p),
    }
}

fn oracle_v(v: &ValueFunction, z: f64) -> f64 {
    let d = z - v.reference;
    match v.kind {
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

/// `P(v in A)`, reported as exactly one when the complement carries no
/// probability.
fn level_mass(vals: &[f64], p: &[f64], inside: impl Fn(f64) -> bool) -> f64 {
    let outside: f64 = vals.iter().zip(p).filter(|(v, _)| !inside(**v)).map(|(_, q)| q).sum();
    if outside == 0.0 {
        1.0
    } else {
        vals.iter().zip(p).filter(|(v, _)| inside(**v)).map(|(_, q)| q).sum()
    }
}

/// CPT value as a Choquet integral over distinct value levels: gains use
/// `w+(P(v >= u))`, losses `w-(P(v <= -l))`. Shares no code with the
/// library's rank-ordered sums.
pub fn oracle_value(p: &[f64], z: &[f64], prefs: &CptPreferences) -> f64 {
    let vals: Vec<f64> = z.iter().map(|&x| oracle_v(&prefs.value, x)).collect();
    let mut gains: Vec<f64> = vals.iter().copied().filter(|&v| v > 0.0).collect();
    gains.sort_by(|a, b| b.total_cmp(a));
    gains.dedup();
    let mut total = 0.0;
    for (k, &u) in gains.iter().enumerate() {
        let next = gains.get(k + 1).copied().unwrap_or(0.0);
        let mass = level_mass(&vals, p, |v| v >= u);
        total += (u - next) * oracle_weight(&prefs.weight_gain, mass);
    }
    let mut losses: Vec<f64> = vals.iter().filter(|&&v| v < 0.0).map(|v| -v).collect();
    losses.sort_by(|a, b| b.total_cmp(a));
    losses.dedup();
    for (k, &l) in losses.iter().enumerate() {
        let next = losses.get(k + 1).copied().unwrap_or(0.0);
        let mass = level_mass(&vals, p, |v| v <= -l);
        total -= (l - next) * oracle_weight(&prefs.weight_loss, mass);
    }
    total
}

/// Linear correlated-equilibrium test from the payoff tensor alone:
/// `sum_{s : s_i fixed} mu(s) (h_i(s) - h_i(d_i, s_{-i})) >= -tol`.
pub fn oracle_eut_ce(game: &Game, mu: &[f64], tol: f64) -> bool {
    let n = game.player_count();
    for i in 0..n {
        let m = game.strategy_counts()[i];
        for s_i in 0..m {
            for d_i in (0..m).filter(|&d| d != s_i) {
                let mut slack = 0.0;
                for (k, &w) in mu.iter().enumerate() {
                    let prof = game.profile(k);
                    if prof[i] != s_i {
                        continue;
                    }
                    let mut alt = prof.clone();
                    alt[i] = d_i;
                    slack += w * (game.payoff(i, &prof) - game.payoff(i, &alt));
                }
                if slack < -tol {
                    return false;
                }
            }
        }
    }
    true
}

pub fn random_weighting(rng: &mut ChaCha8Rng) -> WeightingFunction {
    match rng.gen_range(0..4) {
        0 => WeightingFunction::Identity,
        1 | 2 => WeightingFunction::prelec(rng.gen_range(0.3..=1.0)).unwrap(),
        _ => WeightingFunction::prelec(rng.gen_range(0.3..=1.0)).unwrap().dual(),
    }
}

pub fn random_prefs(rng: &mut ChaCha8Rng, reference: f64) -> CptPreferences {
    let value = if rng.gen_bool(0.5) {
        ValueFunction::identity(reference)
    } else {
        ValueFunction::piecewise_power(
            reference,
            rng.gen_range(0.4..=1.0),
            rng.gen_range(0.4..=1.0),
            rng.gen_range(1.0..3.0),
        )
        .unwrap()
    };
    CptPreferences::new(value, random_weighting(rng), random_weighting(rng)).unwrap()
}

/// Random probability vector; with `sparse`, some entries are zeroed.
pub fn random_probs(rng: &mut ChaCha8Rng, t: usize, sparse: bool) -> Vec<f64> {
    loop {
        let mut w: Vec<f64> = (0..t)
            .map(|_| {
                if sparse && rng.gen_bool(0.25) {
                    0.0
                } else {
                    rng.gen_range(0.01..1.0)
                }
            })
            .collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            w.iter_mut().for_each(|x| *x /= s);
            return w;
        }
    }
}

/// Outcomes in `[-20, 20]`, rounded to integers half the time so that ties
/// occur.
pub fn random_outcomes(rng: &mut ChaCha8Rng, t: usize) -> Vec<f64> {
    let round = rng.gen_bool(0.5);
    (0..t)
        .map(|_| {
            let x: f64 = rng.gen_range(-20.0..20.0);
            if round {
                x.round()
            } else {
                x
            }
        })
        .collect()
}

pub fn random_game(rng: &mut ChaCha8Rng, counts: &[usize]) -> Game {
    let size: usize = counts.iter().product();
    let payoffs = (0..counts.len())
        .map(|_| (0..size).map(|_| rng.gen_range(-10.0..10.0_f64).round()).collect())
        .collect();
    Game::new(counts.to_vec(), payoffs).unwrap()
}

pub fn disconnected_game() -> (Game, GamePreferences) {
    let gf = cpt_eq::cli::disconnected_game(0.5, 1.0);
    (gf.game().unwrap(), gf.game_preferences().unwrap())
}

pub fn eut2() -> GamePreferences {
    GamePreferences::expected_utility(2)
}

pub fn joint(game: &Game, probs: &[f64]) -> JointDistribution {
    JointDistribution::for_game(game, probs.to_vec()).unwrap()
}

/// Feasibility of `{x in R^3 : a_k . x >= b_k}` by enumerating vertices of
/// every triple of planes; the sets tested here are bounded.
pub fn feasible_3d(rows: &[([f64; 3], f64)], tol: f64) -> bool {
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let k = rows.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let m = [rows[a].0, rows[b].0, rows[c].0];
                let d = det3(m);
                if d.abs() < 1e-12 {
                    continue;
                }
                let rhs = [rows[a].1, rows[b].1, rows[c].1];
                let mut x = [0.0; 3];
                for (col, xc) in x.iter_mut().enumerate() {
                    let mut mc = m;
                    for r in 0..3 {
                        mc[r][col] = rhs[r];
                    }
                    *xc = det3(mc) / d;
                }
                if rows
                    .iter()
                    .all(|(g, h)| g[0] * x[0] + g[1] * x[1] + g[2] * x[2] >= h - tol)
                {
                    return true;
                }
            }
        }
    }
    false
}

/// Linear CE constraints of a 2x2 game in the free coordinates
/// `(mu00, mu01, mu10)`, with `mu11 = 1 - mu00 - mu01 - mu10`, as
/// `(g, h)` meaning `g . x >= h`.
pub fn ce_rows_2x2(game: &Game) -> Vec<([f64; 3], f64)> {
    let mut rows = Vec::new();
    for i in 0..2 {
        for s in 0..2 {
            let d = 1 - s;
            // coefficients on the four joint cells
            let mut c = [0.0; 4];
            for k in 0..4 {
                let prof = game.profile(k);
                if prof[i] != s {
                    continue;
                }
                let mut alt = prof.clone();
                alt[i] = d;
                c[k] = game.payoff(i, &prof) - game.payoff(i, &alt);
            }
            // substitute mu11
            rows.push(([c[0] - c[3], c[1] - c[3], c[2] - c[3]], -c[3]));
        }
    }
    rows
}
