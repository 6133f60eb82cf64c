//! C ABI over `gameabs`.
//!
//! Objects are opaque handles created by `*_new`/`*_load`/`gameabs_solve`
//! and released with the matching `*_free`. Every fallible call returns a
//! [`GameabsStatus`]; on failure [`gameabs_last_error`] describes the error
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use gameabs::abstraction::load_maps;
use gameabs::efg::{size_metrics, GameTree};
use gameabs::experiment::{evaluate_abstraction, run_experiment, ExperimentConfig};
use gameabs::games::GameSpec;
use gameabs::solver::{solve, BehavioralProfile, SequenceGame, SolverSettings, Variant};
use gameabs::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameabsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    /// The profile or maps do not fit the game.
    Mismatch = 5,
    Solver = 6,
    Provider = 7,
    Panic = 99,
}

/// A benchmark game.
pub struct GameabsGame {
    spec: GameSpec,
    tree: GameTree,
}

/// A behavioural strategy profile keyed by infoset.
pub struct GameabsProfile {
    inner: BehavioralProfile,
}

/// Solver choice for [`gameabs_solve`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameabsVariant {
    CfrPlus = 0,
    Cfr = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GameabsStatus {
    match err {
        Error::InvalidArgument(_) => GameabsStatus::InvalidArgument,
        Error::Io(_) => GameabsStatus::Io,
        Error::Json(_) | Error::Csv(_) | Error::Parse { .. } => GameabsStatus::Parse,
        Error::DimensionMismatch { .. }
        | Error::MissingInfoset(_)
        | Error::MissingTokens(_)
        | Error::UnknownToken(_)
        | Error::UncoveredObservation(_) => GameabsStatus::Mismatch,
        Error::Diverged(_) => GameabsStatus::Solver,
        Error::MissingApiKey(_) | Error::Provider { .. } => GameabsStatus::Provider,
        Error::Cell { source, .. } => status_of(source),
        _ => GameabsStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic for [`gameabs_last_error`].
fn guard(f: impl FnOnce() -> Result<(), GameabsStatusError>) -> GameabsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GameabsStatus::Ok,
        Ok(Err(GameabsStatusError(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            GameabsStatus::Panic
        }
    }
}

struct GameabsStatusError(GameabsStatus, String);

impl From<Error> for GameabsStatusError {
    fn from(e: Error) -> Self {
        GameabsStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> GameabsStatusError {
    GameabsStatusError(GameabsStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, GameabsStatusError> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| GameabsStatusError(GameabsStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, GameabsStatusError> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gameabs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gameabs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a game from `kuhn:N` or `leduc:R`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gameabs_game_new(spec: *const c_char, out: *mut *mut GameabsGame) -> GameabsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let spec: GameSpec = str_arg(spec, "spec")?.parse()?;
        let tree = spec.build()?;
        *out = Box::into_raw(Box::new(GameabsGame { spec, tree }));
        Ok(())
    })
}

/// # Safety
/// `game` must come from [`gameabs_game_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gameabs_game_free(game: *mut GameabsGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Sequence count and utility-matrix nonzeros.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gameabs_game_size(
    game: *const GameabsGame,
    num_sequences: *mut usize,
    nnz: *mut usize,
) -> GameabsStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        let m = size_metrics(&game.tree)?;
        *out_arg(num_sequences, "num_sequences")? = m.num_sequences;
        *out_arg(nnz, "nnz")? = m.nnz;
        Ok(())
    })
}

/// Solves `game` until the exploitability reaches `target_eps` or
/// `max_iterations` pass. Writes the average profile and its exploitability.
///
/// # Safety
/// All pointers must be valid; `eps_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn gameabs_solve(
    game: *const GameabsGame,
    variant: GameabsVariant,
    target_eps: f64,
    max_iterations: usize,
    out: *mut *mut GameabsProfile,
    eps_out: *mut f64,
) -> GameabsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        let variant = match variant {
            GameabsVariant::CfrPlus => Variant::CfrPlus,
            GameabsVariant::Cfr => Variant::Cfr,
        };
        let (profile, report) = solve(&game.tree, &SolverSettings { variant, target_eps, max_iterations })?;
        if let Some(e) = eps_out.as_mut() {
            *e = report.exploitability;
        }
        *out = Box::into_raw(Box::new(GameabsProfile { inner: profile }));
        Ok(())
    })
}

/// Average best-response gain against `profile` in `game`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gameabs_exploitability(
    game: *const GameabsGame,
    profile: *const GameabsProfile,
    out: *mut f64,
) -> GameabsStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        let profile = profile.as_ref().ok_or_else(|| null("profile"))?;
        *out_arg(out, "out")? = gameabs::solver::exploitability(&game.tree, &profile.inner)?;
        Ok(())
    })
}

/// Number of infosets the profile covers.
///
/// # Safety
/// `profile` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn gameabs_profile_len(profile: *const GameabsProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.inner.len())
}

/// Copies the action probabilities of infoset `key` into `probs`, which has
/// room for `capacity` values. `len_out` receives the number of actions even
/// when `capacity` is too small (then nothing is copied and the call fails).
///
/// # Safety
/// `probs` must point to `capacity` writable doubles (or be NULL when
/// `capacity` is 0); the other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gameabs_profile_get(
    profile: *const GameabsProfile,
    key: *const c_char,
    probs: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> GameabsStatus {
    guard(|| {
        let profile = profile.as_ref().ok_or_else(|| null("profile"))?;
        let key = str_arg(key, "key")?;
        let values = profile.inner.get(key).ok_or_else(|| Error::MissingInfoset(key.to_owned()))?;
        *out_arg(len_out, "len_out")? = values.len();
        if values.len() > capacity {
            return Err(GameabsStatusError(
                GameabsStatus::InvalidArgument,
                format!("buffer holds {capacity} values, infoset has {}", values.len()),
            ));
        }
        if !values.is_empty() {
            if probs.is_null() {
                return Err(null("probs"));
            }
            ptr::copy_nonoverlapping(values.as_ptr(), probs, values.len());
        }
        Ok(())
    })
}

/// Writes the profile as JSON (gzip when the path ends in `.gz`).
///
/// # Safety
/// Pointers must be valid; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gameabs_profile_save(profile: *const GameabsProfile, path: *const c_char) -> GameabsStatus {
    guard(|| {
        let profile = profile.as_ref().ok_or_else(|| null("profile"))?;
        profile.inner.save(&PathBuf::from(str_arg(path, "path")?))?;
        Ok(())
    })
}

/// # Safety
/// `path` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gameabs_profile_load(path: *const c_char, out: *mut *mut GameabsProfile) -> GameabsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inner = BehavioralProfile::load(&PathBuf::from(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(GameabsProfile { inner }));
        Ok(())
    })
}

/// # Safety
/// `profile` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gameabs_profile_free(profile: *mut GameabsProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Abstracts `game` with the maps in `maps_path`, solves the abstract game,
/// lifts the result and writes its exploitability in `game`.
///
/// # Safety
/// Pointers must be valid; `maps_path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gameabs_evaluate_maps(
    game: *const GameabsGame,
    maps_path: *const c_char,
    target_eps: f64,
    max_iterations: usize,
    eps_out: *mut f64,
) -> GameabsStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        let maps = load_maps(&PathBuf::from(str_arg(maps_path, "maps_path")?))?;
        let original = SequenceGame::new(&game.tree)?;
        let settings = SolverSettings { target_eps, max_iterations, ..Default::default() };
        let eval = evaluate_abstraction(&original, &maps, &settings)?;
        *out_arg(eps_out, "eps_out")? = eval.exploitability;
        Ok(())
    })
}

/// Runs the experiment described by a JSON config file and writes the
/// number of records. Results land in the config's output directory.
///
/// # Safety
/// `config_path` must be NUL-terminated; `records_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn gameabs_run_experiment(config_path: *const c_char, records_out: *mut usize) -> GameabsStatus {
    guard(|| {
        let cfg = ExperimentConfig::load(&PathBuf::from(str_arg(config_path, "config_path")?))?;
        let records = run_experiment(&cfg)?;
        if let Some(n) = records_out.as_mut() {
            *n = records.len();
        }
        Ok(())
    })
}

/// Writes the game's spec string (`kuhn:N` or `leduc:R`) into `buf` of
/// `capacity` bytes, NUL-terminated. Fails when the buffer is too small.
///
/// # Safety
/// `buf` must point to `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gameabs_game_spec(
    game: *const GameabsGame,
    buf: *mut c_char,
    capacity: usize,
) -> GameabsStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        let text = game.spec.to_string();
        if text.len() + 1 > capacity {
            return Err(GameabsStatusError(GameabsStatus::InvalidArgument, "buffer too small".into()));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(text.as_ptr().cast(), buf, text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}
