use serde::Serialize;

use super::{col_deviation, is_crossing, require_2x2, row_deviation, threshold, THRESHOLD_TOLERANCE};
use crate::cpt::CptPreferences;
use crate::error::Result;
use crate::game::{Game, GamePreferences};

/// An interval of `[0, 1]` with independently open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval {
            lo: v,
            hi: v,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        (v > self.lo || (self.lo_closed && v == self.lo))
            && (v < self.hi || (self.hi_closed && v == self.hi))
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.total_cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo, self.lo_closed),
            std::cmp::Ordering::Less => (other.lo, other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.total_cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi, self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi, other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi, self.hi_closed && other.hi_closed),
        };
        let out = Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        };
        (!out.is_empty()).then_some(out)
    }

    /// The union when it is again an interval.
    fn union(&self, other: &Interval) -> Option<Interval> {
        let (a, b) = if (self.lo, !self.lo_closed) <= (other.lo, !other.lo_closed) {
            (self, other)
        } else {
            (other, self)
        };
        if a.hi < b.lo || (a.hi == b.lo && !a.hi_closed && !b.lo_closed) {
            return None;
        }
        let (hi, hi_closed) = match a.hi.total_cmp(&b.hi) {
            std::cmp::Ordering::Greater => (a.hi, a.hi_closed),
            std::cmp::Ordering::Less => (b.hi, b.hi_closed),
            std::cmp::Ordering::Equal => (a.hi, a.hi_closed || b.hi_closed),
        };
        let lo_closed = if a.lo == b.lo {
            a.lo_closed || b.lo_closed
        } else {
            a.lo_closed
        };
        Some(Interval {
            lo: a.lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NashKind {
    Pure,
    Mixed,
    /// A segment or rectangle of equilibria.
    Continuum,
}

/// A box of Nash equilibria: the row player puts probability in `row` on
/// strategy 0, the column player probability in `col` on strategy 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NashPiece {
    pub kind: NashKind,
    pub row: Interval,
    pub col: Interval,
}

impl NashPiece {
    fn new(row: Interval, col: Interval) -> Self {
        let kind = if row.is_point() && col.is_point() {
            let pure = |v: f64| v == 0.0 || v == 1.0;
            if pure(row.lo) && pure(col.lo) {
                NashKind::Pure
            } else {
                NashKind::Mixed
            }
        } else {
            NashKind::Continuum
        };
        NashPiece { kind, row, col }
    }

    /// The joint distribution `(pq, p(1-q), (1-p)q, (1-p)(1-q))` of a
    /// single-point piece.
    pub fn joint(&self) -> Option<[f64; 4]> {
        if !(self.row.is_point() && self.col.is_point()) {
            return None;
        }
        let (p, q) = (self.row.lo, self.col.lo);
        Some([p * q, p * (1.0 - q), (1.0 - p) * q, (1.0 - p) * (1.0 - q)])
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign of `V((t, 1-t), x) - V((t, 1-t), y)` on a partition of `[0, 1]`.
///
/// The sign at the endpoints is read off the payoffs; inside, the regret is
/// either of one sign (one profile weakly dominates) or changes sign once
/// at the threshold.
fn sign_pieces(x: [f64; 2], y: [f64; 2], prefs: &CptPreferences) -> Result<Vec<(Interval, i8)>> {
    let at_zero = sign(x[1] - y[1]);
    let at_one = sign(x[0] - y[0]);
    let mut pieces = vec![(Interval::point(0.0), at_zero)];
    if is_crossing(x, y) {
        let q = threshold(x, y, prefs, THRESHOLD_TOLERANCE)?;
        pieces.push((Interval::open(0.0, q), at_zero));
        pieces.push((Interval::point(q), 0));
        pieces.push((Interval::open(q, 1.0), at_one));
    } else {
        let inside = if at_zero != 0 { at_zero } else { at_one };
        pieces.push((Interval::open(0.0, 1.0), inside));
    }
    pieces.push((Interval::point(1.0), at_one));
    Ok(pieces)
}

fn best_reply(sign: i8) -> Interval {
    match sign {
        1 => Interval::point(1.0),
        -1 => Interval::point(0.0),
        _ => Interval::closed(0.0, 1.0),
    }
}

/// All CPT Nash equilibria of a 2x2 game, as boxes in the plane of mixing
/// probabilities.
///
/// For generic games this is the mixed point whose joint distribution is
/// `(1, alpha, beta, alpha beta) / ((1 + alpha)(1 + beta))`, plus two pure
/// points for types I and IV. Degenerate games can yield segments and
/// rectangles.
pub fn nash_set_2x2(game: &Game, prefs: &GamePreferences) -> Result<Vec<NashPiece>> {
    require_2x2(game)?;
    prefs.check_for(game)?;
    let (xr, yr) = row_deviation(game);
    let (xc, yc) = col_deviation(game);
    // row regret is a function of the column mix and vice versa
    let row = sign_pieces(xr, yr, prefs.get(0))?;
    let col = sign_pieces(xc, yc, prefs.get(1))?;

    let mut boxes: Vec<(Interval, Interval)> = Vec::new();
    for (q_set, row_sign) in &row {
        for (p_set, col_sign) in &col {
            let p = best_reply(*row_sign).intersect(p_set);
            let q = best_reply(*col_sign).intersect(q_set);
            if let (Some(p), Some(q)) = (p, q) {
                boxes.push((p, q));
            }
        }
    }

    'merge: loop {
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                let (a, b) = (boxes[i], boxes[j]);
                let merged = if a.0 == b.0 {
                    a.1.union(&b.1).map(|q| (a.0, q))
                } else if a.1 == b.1 {
                    a.0.union(&b.0).map(|p| (p, a.1))
                } else {
                    None
                };
                if let Some(m) = merged {
                    boxes[i] = m;
                    boxes.remove(j);
                    continue 'merge;
                }
            }
        }
        break;
    }

    let mut pieces: Vec<NashPiece> = boxes.into_iter().map(|(p, q)| NashPiece::new(p, q)).collect();
    pieces.sort_by(|a, b| {
        a.kind
            .cmp(&b.kind)
            .then(b.row.lo.total_cmp(&a.row.lo))
            .then(b.col.lo.total_cmp(&a.col.lo))
    });
    Ok(pieces)
}
