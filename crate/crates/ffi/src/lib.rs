//! C ABI over `cpt_eq`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` and
//! released by `*_free`. Every fallible function returns a [`CptEqStatus`]
//! and writes results through out-pointers; on failure a message can be
//! fetched with [`cpt_eq_last_error`] from the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use cpt_eq::cpt::{self, CptPreferences, ValueFunction, WeightingFunction};
use cpt_eq::game::{self, Game, GamePreferences, JointDistribution};
use cpt_eq::region::{self, SimplexGrid};
use cpt_eq::two_by_two::{self, GameClass2x2};
use cpt_eq::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CptEqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    NotTwoByTwo = 4,
    PreconditionViolated = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CptEqWeighting {
    Identity = 0,
    Prelec = 1,
    DualPrelec = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CptEqClass {
    Generic = 0,
    WeaklyDominated = 1,
    StrictlyDominated = 2,
    Equivalent = 3,
}

/// Classification of a 2x2 game. `kind` is the canonical type 1 to 4, or 0
/// when the class has none. `alpha` and `beta` are set for generic games;
/// for weakly dominated ones a coefficient tending to 0 or infinity is
/// reported as 0 or `INFINITY`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptEqClassification {
    pub class: CptEqClass,
    pub kind: u32,
    pub alpha: f64,
    pub beta: f64,
}

/// Opaque preferences handle.
pub struct CptEqPreferences(CptPreferences);

/// Opaque game handle.
pub struct CptEqGame(Game);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(CptEqStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::LengthMismatch { .. } => CptEqStatus::LengthMismatch,
            Error::NotTwoByTwo => CptEqStatus::NotTwoByTwo,
            Error::PreconditionViolated(_) | Error::NotCompletelyMixed | Error::TrivialGame => {
                CptEqStatus::PreconditionViolated
            }
            _ => CptEqStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CptEqStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CptEqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CptEqStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CptEqStatus::Panic
        }
    }
}

unsafe fn read<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(ptr: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    ptr.write(value);
    Ok(())
}

fn weighting(kind: CptEqWeighting, alpha: f64) -> Result<WeightingFunction, Error> {
    match kind {
        CptEqWeighting::Identity => Ok(WeightingFunction::Identity),
        CptEqWeighting::Prelec => WeightingFunction::prelec(alpha),
        CptEqWeighting::DualPrelec => Ok(WeightingFunction::prelec(alpha)?.dual()),
    }
}

unsafe fn game_preferences(
    prefs: *const *const CptEqPreferences,
    count: usize,
) -> Result<GamePreferences, Failure> {
    let handles = read(prefs, count, "prefs")?;
    let list = handles
        .iter()
        .map(|&h| handle(h, "prefs entry").map(|p| p.0))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GamePreferences::new(list)?)
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len - 1` bytes) and returns the full message
/// length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn cpt_eq_status_str(status: CptEqStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CptEqStatus::Ok => c"ok",
        CptEqStatus::NullPointer => c"null pointer",
        CptEqStatus::InvalidArgument => c"invalid argument",
        CptEqStatus::LengthMismatch => c"length mismatch",
        CptEqStatus::NotTwoByTwo => c"game is not 2x2",
        CptEqStatus::PreconditionViolated => c"precondition violated",
        CptEqStatus::BufferTooSmall => c"buffer too small",
        CptEqStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Creates preferences with reference point `reference`, value exponents
/// `a` (gains) and `b` (losses), loss aversion `lambda`, and one weighting
/// function per frame. `a = b = lambda = 1` gives the identity value.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_preferences_new(
    reference: f64,
    a: f64,
    b: f64,
    lambda: f64,
    gain: CptEqWeighting,
    gain_alpha: f64,
    loss: CptEqWeighting,
    loss_alpha: f64,
    out: *mut *mut CptEqPreferences,
) -> CptEqStatus {
    guard(|| {
        let value = if a == 1.0 && b == 1.0 && lambda == 1.0 {
            ValueFunction::identity(reference)
        } else {
            ValueFunction::piecewise_power(reference, a, b, lambda)?
        };
        let prefs = CptPreferences::new(value, weighting(gain, gain_alpha)?, weighting(loss, loss_alpha)?)?;
        write(out, Box::into_raw(Box::new(CptEqPreferences(prefs))), "out")
    })
}

/// # Safety
/// `prefs` must be null or a handle from [`cpt_eq_preferences_new`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_preferences_free(prefs: *mut CptEqPreferences) {
    if !prefs.is_null() {
        drop(Box::from_raw(prefs));
    }
}

/// CPT value of the prospect `(probs, outcomes)` of length `len`.
///
/// # Safety
/// Arrays must hold `len` values; `prefs` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_value(
    prefs: *const CptEqPreferences,
    probs: *const f64,
    outcomes: *const f64,
    len: usize,
    out: *mut f64,
) -> CptEqStatus {
    guard(|| {
        let prefs = handle(prefs, "prefs")?;
        let prospect = cpt::Prospect::new(
            read(probs, len, "probs")?.to_vec(),
            read(outcomes, len, "outcomes")?.to_vec(),
        )?;
        write(out, cpt::cpt_value(&prospect, &prefs.0), "out")
    })
}

/// Regret `V(p, x) - V(p, y)`.
///
/// # Safety
/// Arrays must hold `len` values; `prefs` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_regret(
    prefs: *const CptEqPreferences,
    probs: *const f64,
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> CptEqStatus {
    guard(|| {
        let prefs = handle(prefs, "prefs")?;
        let r = cpt::regret(
            read(probs, len, "probs")?,
            read(x, len, "x")?,
            read(y, len, "y")?,
            &prefs.0,
        )?;
        write(out, r, "out")
    })
}

/// Creates a game with `players` players; `counts[i]` strategies for
/// player `i`. `payoffs` holds `players` consecutive tensors in joint index
/// order (last player fastest), `players * prod(counts)` values in all.
///
/// # Safety
/// `counts` must hold `players` values and `payoffs` the number above.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_game_new(
    players: usize,
    counts: *const usize,
    payoffs: *const f64,
    payoffs_len: usize,
    out: *mut *mut CptEqGame,
) -> CptEqStatus {
    guard(|| {
        let counts = read(counts, players, "counts")?.to_vec();
        let size = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
        let expected = size.and_then(|s| s.checked_mul(players)).ok_or_else(|| {
            Failure(CptEqStatus::InvalidArgument, "game size overflows".into())
        })?;
        if payoffs_len != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: payoffs_len,
            }
            .into());
        }
        let flat = read(payoffs, payoffs_len, "payoffs")?;
        let per = expected.checked_div(players).unwrap_or(0);
        let tensors = flat.chunks(per.max(1)).map(<[f64]>::to_vec).collect();
        let game = Game::new(counts, tensors)?;
        write(out, Box::into_raw(Box::new(CptEqGame(game))), "out")
    })
}

/// # Safety
/// `game` must be null or a handle from [`cpt_eq_game_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_game_free(game: *mut CptEqGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of joint profiles of `game`, or 0 for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_game_joint_size(game: *const CptEqGame) -> usize {
    game.as_ref().map_or(0, |g| g.0.joint_size())
}

/// CPT correlated equilibrium check of `mu` (joint index order). `prefs`
/// is an array of one handle per player. Writes membership and the smallest
/// slack.
///
/// # Safety
/// Pointers must be valid for the stated lengths; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_check_correlated(
    game: *const CptEqGame,
    prefs: *const *const CptEqPreferences,
    prefs_len: usize,
    mu: *const f64,
    mu_len: usize,
    tolerance: f64,
    out_member: *mut bool,
    out_worst: *mut f64,
) -> CptEqStatus {
    guard(|| {
        let game = &handle(game, "game")?.0;
        let prefs = game_preferences(prefs, prefs_len)?;
        let mu = JointDistribution::for_game(game, read(mu, mu_len, "mu")?.to_vec())?;
        let v = game::is_cpt_correlated_equilibrium(game, &prefs, &mu, tolerance)?;
        write(out_member, v.is_member, "out_member")?;
        if !out_worst.is_null() {
            out_worst.write(v.worst_violation);
        }
        Ok(())
    })
}

fn limit_value(l: two_by_two::Limit) -> f64 {
    match l {
        two_by_two::Limit::Zero => 0.0,
        two_by_two::Limit::Finite(v) => v,
        two_by_two::Limit::Infinity => f64::INFINITY,
    }
}

fn kind_number(k: two_by_two::CanonicalType) -> u32 {
    match k {
        two_by_two::CanonicalType::I => 1,
        two_by_two::CanonicalType::II => 2,
        two_by_two::CanonicalType::III => 3,
        two_by_two::CanonicalType::IV => 4,
    }
}

/// Classifies a 2x2 game and writes the vertices of its CPT correlated
/// equilibrium polytope into `vertices` (4 values each, up to
/// `vertex_capacity` vertices). `out_vertex_count` always receives the
/// true count; a short buffer yields `BufferTooSmall`.
///
/// # Safety
/// `vertices` must hold `4 * vertex_capacity` values; other pointers must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_classify_2x2(
    game: *const CptEqGame,
    prefs: *const *const CptEqPreferences,
    prefs_len: usize,
    out_class: *mut CptEqClassification,
    vertices: *mut f64,
    vertex_capacity: usize,
    out_vertex_count: *mut usize,
) -> CptEqStatus {
    guard(|| {
        let game = &handle(game, "game")?.0;
        let prefs = game_preferences(prefs, prefs_len)?;
        let d = two_by_two::characterize(game, &prefs)?;
        let class = match d.class {
            GameClass2x2::Generic { kind, alpha, beta } => CptEqClassification {
                class: CptEqClass::Generic,
                kind: kind_number(kind),
                alpha,
                beta,
            },
            GameClass2x2::WeaklyDominated { kind, alpha, beta } => CptEqClassification {
                class: CptEqClass::WeaklyDominated,
                kind: kind_number(kind),
                alpha: limit_value(alpha),
                beta: limit_value(beta),
            },
            GameClass2x2::StrictlyDominated => CptEqClassification {
                class: CptEqClass::StrictlyDominated,
                kind: 0,
                alpha: f64::NAN,
                beta: f64::NAN,
            },
            GameClass2x2::Equivalent => CptEqClassification {
                class: CptEqClass::Equivalent,
                kind: 0,
                alpha: f64::NAN,
                beta: f64::NAN,
            },
        };
        write(out_class, class, "out_class")?;
        write(out_vertex_count, d.vertices.len(), "out_vertex_count")?;
        if d.vertices.len() > vertex_capacity {
            return Err(Failure(
                CptEqStatus::BufferTooSmall,
                format!("{} vertices, room for {vertex_capacity}", d.vertices.len()),
            ));
        }
        if !d.vertices.is_empty() {
            if vertices.is_null() {
                return Err(null("vertices"));
            }
            let buf = slice::from_raw_parts_mut(vertices, 4 * vertex_capacity);
            for (chunk, v) in buf.chunks_mut(4).zip(&d.vertices) {
                chunk.copy_from_slice(v);
            }
        }
        Ok(())
    })
}

/// Rasterizes `C(player, signal)` on a grid of the given resolution over
/// the opponents' profiles and writes the number of member points and of
/// connected components. Players and strategies count from 0.
///
/// # Safety
/// Pointers must be valid; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cpt_eq_region_components(
    game: *const CptEqGame,
    prefs: *const *const CptEqPreferences,
    prefs_len: usize,
    player: usize,
    signal: usize,
    resolution: usize,
    tolerance: f64,
    out_members: *mut usize,
    out_components: *mut usize,
) -> CptEqStatus {
    guard(|| {
        let game = &handle(game, "game")?.0;
        let prefs = game_preferences(prefs, prefs_len)?;
        if player >= game.player_count() {
            return Err(Failure(CptEqStatus::InvalidArgument, format!("no player {player}")));
        }
        let grid = SimplexGrid::new(game.opponent_size(player), resolution)?;
        let mask = region::rasterize_signal_region(game, &prefs, player, signal, grid, tolerance)?;
        write(out_members, mask.member_count(), "out_members")?;
        write(out_components, mask.component_count(), "out_components")
    })
}
