use serde::Serialize;

use super::{
    classify, coefficient_from_threshold, col_deviation, is_crossing, row_deviation, tau,
    threshold, CanonicalType, GameClass2x2, THRESHOLD_TOLERANCE,
};
use crate::cpt::CptPreferences;
use crate::error::Result;
use crate::game::{Deviation, Game, GamePreferences};

const FEASIBILITY_TOLERANCE: f64 = 1e-9;
const RANK_TOLERANCE: f64 = 1e-9;

const COORD_NAMES: [&str; 4] = ["mu00", "mu01", "mu10", "mu11"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symbol {
    Alpha,
    Beta,
}

impl Symbol {
    fn name(self) -> &'static str {
        match self {
            Symbol::Alpha => "alpha",
            Symbol::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Ge,
    Le,
}

/// One linear restriction on `mu = (mu00, mu01, mu10, mu11)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Constraint {
    /// `mu[coordinate] = 0`
    Zero { coordinate: usize, source: Deviation },
    /// `coefficient * mu[scaled] >= mu[other]` (or `<=`), with the
    /// coefficient labelled by `symbol`.
    Ratio {
        symbol: Symbol,
        coefficient: f64,
        scaled: usize,
        other: usize,
        sense: Sense,
        source: Deviation,
    },
}

impl Constraint {
    pub fn source(&self) -> Deviation {
        match *self {
            Constraint::Zero { source, .. } | Constraint::Ratio { source, .. } => source,
        }
    }

    /// Human-readable form, e.g. `alpha*mu00 >= mu01`.
    pub fn symbolic(&self) -> String {
        match *self {
            Constraint::Zero { coordinate, .. } => format!("{} = 0", COORD_NAMES[coordinate]),
            Constraint::Ratio {
                symbol,
                scaled,
                other,
                sense,
                ..
            } => format!(
                "{}*{} {} {}",
                symbol.name(),
                COORD_NAMES[scaled],
                if sense == Sense::Ge { ">=" } else { "<=" },
                COORD_NAMES[other]
            ),
        }
    }

    /// Row `g` such that the constraint reads `g . mu >= 0` (ratio) or
    /// `g . mu = 0` (zero).
    pub fn row(&self) -> [f64; 4] {
        let mut g = [0.0; 4];
        match *self {
            Constraint::Zero { coordinate, .. } => g[coordinate] = 1.0,
            Constraint::Ratio {
                coefficient,
                scaled,
                other,
                sense,
                ..
            } => {
                let s = if sense == Sense::Ge { 1.0 } else { -1.0 };
                g[scaled] = s * coefficient;
                g[other] = -s;
            }
        }
        g
    }

    /// Signed slack at `mu`: non-negative when satisfied for ratio
    /// constraints; `-|mu_c|` for zero constraints.
    pub fn slack(&self, mu: &[f64; 4]) -> f64 {
        let v = dot(&self.row(), mu);
        match self {
            Constraint::Zero { .. } => -v.abs(),
            Constraint::Ratio { .. } => v,
        }
    }

    pub fn is_equality(&self) -> bool {
        matches!(self, Constraint::Zero { .. })
    }
}

/// The CPT correlated equilibrium set of a 2x2 game as a polytope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopeDescription {
    pub class: GameClass2x2,
    pub constraints: Vec<Constraint>,
    pub vertices: Vec<[f64; 4]>,
    /// Coordinates that vanish on the whole set.
    pub implied_zeros: Vec<usize>,
}

impl PolytopeDescription {
    /// Membership of a point of the simplex, each constraint within `tol`.
    pub fn contains(&self, mu: &[f64; 4], tol: f64) -> bool {
        self.constraints.iter().all(|c| c.slack(mu) >= -tol)
    }
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One deviation inequality: slice coordinates `(u, w)` of the recommended
/// strategy, outcome profiles `x` (obey) and `y` (deviate).
struct Condition {
    source: Deviation,
    symbol: Symbol,
    coords: [usize; 2],
    x: [f64; 2],
    y: [f64; 2],
}

fn conditions(game: &Game) -> [Condition; 4] {
    let (xr, yr) = row_deviation(game);
    let (xc, yc) = col_deviation(game);
    let dev = |player, strategy, deviation| Deviation {
        player,
        strategy,
        deviation,
    };
    [
        Condition { source: dev(0, 0, 1), symbol: Symbol::Alpha, coords: [0, 1], x: xr, y: yr },
        Condition { source: dev(0, 1, 0), symbol: Symbol::Alpha, coords: [2, 3], x: yr, y: xr },
        Condition { source: dev(1, 0, 1), symbol: Symbol::Beta, coords: [0, 2], x: xc, y: yc },
        Condition { source: dev(1, 1, 0), symbol: Symbol::Beta, coords: [1, 3], x: yc, y: xc },
    ]
}

fn condition_constraints(c: &Condition, prefs: &CptPreferences, out: &mut Vec<Constraint>) -> Result<()> {
    let (x, y) = (c.x, c.y);
    if x[0] >= y[0] && x[1] >= y[1] {
        return Ok(());
    }
    if is_crossing(x, y) {
        let q = threshold(x, y, prefs, THRESHOLD_TOLERANCE)?;
        out.push(Constraint::Ratio {
            symbol: c.symbol,
            coefficient: coefficient_from_threshold(q),
            scaled: c.coords[0],
            other: c.coords[1],
            sense: if x[0] > y[0] { Sense::Ge } else { Sense::Le },
            source: c.source,
        });
        return Ok(());
    }
    // y weakly above x: every outcome where deviating strictly pays must
    // never be recommended
    for k in 0..2 {
        if x[k] < y[k] {
            let coordinate = c.coords[k];
            let seen = out
                .iter()
                .any(|e| matches!(e, Constraint::Zero { coordinate: z, .. } if *z == coordinate));
            if !seen {
                out.push(Constraint::Zero {
                    coordinate,
                    source: c.source,
                });
            }
        }
    }
    Ok(())
}

/// Vertices of the generic-type polytopes in closed form.
///
/// Type I has the five vertices `A..E`; type IV is the image under
/// [`tau`] of type I with `beta` replaced by `1 / beta`; types II and III
/// collapse to the single point `(1, alpha, beta, alpha beta) / ((1 + alpha)(1 + beta))`.
pub fn canonical_vertices(kind: CanonicalType, alpha: f64, beta: f64) -> Vec<[f64; 4]> {
    let (a, b) = (alpha, beta);
    let c = [1.0, a, b, a * b].map(|v| v / ((1.0 + a) * (1.0 + b)));
    match kind {
        CanonicalType::I => {
            let d_den = 1.0 + b + a * b;
            let e_den = 1.0 + a + a * b;
            vec![
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                c,
                [1.0 / d_den, 0.0, b / d_den, a * b / d_den],
                [1.0 / e_den, a / e_den, 0.0, a * b / e_den],
            ]
        }
        CanonicalType::IV => canonical_vertices(CanonicalType::I, a, 1.0 / b)
            .into_iter()
            .map(tau)
            .collect(),
        CanonicalType::II | CanonicalType::III => vec![c],
    }
}

fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> Option<[f64; 4]> {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    for col in 0..4 {
        let pivot = (col..4).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in col + 1..4 {
            let f = m[r][col] / m[col][col];
            for k in col..4 {
                m[r][k] -= f * m[col][k];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 4];
    for r in (0..4).rev() {
        let tail: f64 = (r + 1..4).map(|k| m[r][k] * x[k]).sum();
        x[r] = (rhs[r] - tail) / m[r][r];
    }
    Some(x)
}

fn rank(rows: &[[f64; 4]], tol: f64) -> usize {
    let mut m: Vec<[f64; 4]> = rows
        .iter()
        .map(|r| {
            let n = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.0 {
                r.map(|v| v / n)
            } else {
                *r
            }
        })
        .collect();
    let mut rank = 0;
    for col in 0..4 {
        let Some(pivot) = (rank..m.len()).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
        else {
            break;
        };
        if m[pivot][col].abs() <= tol {
            continue;
        }
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            let f = m[r][col] / m[rank][col];
            for k in col..4 {
                m[r][k] -= f * m[rank][k];
            }
        }
        rank += 1;
    }
    rank
}

fn nonnegativity() -> impl Iterator<Item = [f64; 4]> {
    (0..4).map(|k| {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        e
    })
}

fn feasible(constraints: &[Constraint], p: &[f64; 4]) -> bool {
    p.iter().all(|&v| v >= -FEASIBILITY_TOLERANCE)
        && constraints.iter().all(|c| c.slack(p) >= -FEASIBILITY_TOLERANCE)
}

/// Vertices of `{mu in simplex : constraints}` by brute force over every
/// triple of hyperplanes (non-negativity or constraint) meeting the
/// simplex plane.
pub fn enumerate_vertices(constraints: &[Constraint]) -> Vec<[f64; 4]> {
    let rows: Vec<[f64; 4]> = nonnegativity().chain(constraints.iter().map(Constraint::row)).collect();
    let mut out: Vec<[f64; 4]> = Vec::new();
    let n = rows.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let m = [[1.0; 4], rows[a], rows[b], rows[c]];
                let Some(mut p) = solve4(m, [1.0, 0.0, 0.0, 0.0]) else {
                    continue;
                };
                if !feasible(constraints, &p) {
                    continue;
                }
                for v in p.iter_mut() {
                    if v.abs() < 1e-15 {
                        *v = 0.0;
                    }
                }
                if !out
                    .iter()
                    .any(|q| q.iter().zip(&p).all(|(x, y)| (x - y).abs() <= FEASIBILITY_TOLERANCE))
                {
                    out.push(p);
                }
            }
        }
    }
    out.sort_by(|x, y| {
        y.iter()
            .zip(x)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// A feasible point is extreme iff its active hyperplanes, together with
/// the simplex plane, have full rank.
pub fn is_extreme_point(constraints: &[Constraint], point: &[f64; 4]) -> bool {
    let mut active: Vec<[f64; 4]> = vec![[1.0; 4]];
    for (k, e) in nonnegativity().enumerate() {
        if point[k].abs() <= FEASIBILITY_TOLERANCE {
            active.push(e);
        }
    }
    for c in constraints {
        let g = c.row();
        if dot(&g, point).abs() <= FEASIBILITY_TOLERANCE {
            active.push(g);
        }
    }
    rank(&active, RANK_TOLERANCE) == 4
}

/// The full constraint list and vertex set of the CPT correlated
/// equilibrium polytope of a 2x2 game.
pub fn characterize(game: &Game, prefs: &GamePreferences) -> Result<PolytopeDescription> {
    let class = classify(game, prefs)?;
    let mut constraints = Vec::new();
    for c in conditions(game) {
        condition_constraints(&c, prefs.get(c.source.player), &mut constraints)?;
    }
    let vertices = match class {
        GameClass2x2::Generic { kind, alpha, beta } => canonical_vertices(kind, alpha, beta),
        _ => enumerate_vertices(&constraints),
    };
    let implied_zeros = (0..4)
        .filter(|&k| vertices.iter().all(|v| v[k].abs() <= FEASIBILITY_TOLERANCE))
        .collect();
    Ok(PolytopeDescription {
        class,
        constraints,
        vertices,
        implied_zeros,
    })
}
