//! C interface to `twoprover`.
//!
//! Games live behind the opaque [`TpGame`] handle. Every fallible call
//! returns a [`TpStatus`]; on failure a message is kept per thread and read
//! with [`tp_last_error`]. Strings returned through `char **` out-parameters
//! are owned by the caller and released with [`tp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twoprover::io::{parse_game, serialize_game, GameDocument};
use twoprover::suites::{run_suite, Suite, SuiteOptions};
use twoprover::transforms::{oracularize_multi_round, oracularize_pcp, oracularize_pcp_dummy, parallel_repeat};
use twoprover::values::{classical_value, entangled_lower_bound, multi_round_value, no_signaling_value, pcp_value, SeeSawOptions};
use twoprover::{catalog, Error, Rational, Scalar};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Invalid = 5,
    SizeGuard = 6,
    WrongKind = 7,
    Numerical = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpGameKind {
    TwoProverOneRound = 0,
    MultiRound = 1,
    Pcp3 = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpValueKind {
    Classical = 0,
    NoSignaling = 1,
    MultiRound = 2,
    Pcp = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpTransformKind {
    Oracularize = 0,
    OracularizeDummy = 1,
    Repeat = 2,
}

/// Opaque game handle.
pub struct TpGame {
    doc: GameDocument,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TpStatus {
    match e {
        Error::Parse { .. } => TpStatus::Parse,
        Error::Validation(_) => TpStatus::Validation,
        Error::SizeGuard { .. } => TpStatus::SizeGuard,
        Error::Io(_) => TpStatus::Io,
        _ => TpStatus::Invalid,
    }
}

/// Runs `f`, translating errors and panics into a status and last-error.
fn guard(f: impl FnOnce() -> Result<(), (TpStatus, String)>) -> TpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TpStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TpStatus::Panic
        }
    }
}

fn lib(e: Error) -> (TpStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TpStatus, String) {
    (TpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TpStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn game_ref<'a>(g: *const TpGame) -> Result<&'a TpGame, (TpStatus, String)> {
    g.as_ref().ok_or_else(|| null("game"))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (TpStatus, String)> {
    if out.is_null() {
        return Err(null("output string pointer"));
    }
    let c = CString::new(s).map_err(|_| (TpStatus::Invalid, "string contains a nul byte".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_game(out: *mut *mut TpGame, doc: GameDocument) -> Result<(), (TpStatus, String)> {
    if out.is_null() {
        return Err(null("output game pointer"));
    }
    *out = Box::into_raw(Box::new(TpGame { doc }));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a game file's text into a new handle.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tp_game_parse(text: *const c_char, out: *mut *mut TpGame) -> TpStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        put_game(out, parse_game(text).map_err(lib)?)
    })
}

/// A built-in game: `chsh`, `magic-square`, `magic-square-rc` or `tiny-1in3`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tp_game_catalog(name: *const c_char, out: *mut *mut TpGame) -> TpStatus {
    guard(|| {
        let doc = match read_str(name, "name")? {
            "chsh" => GameDocument::TwoProver(catalog::chsh()),
            "magic-square" => GameDocument::TwoProver(catalog::magic_square()),
            "magic-square-rc" => GameDocument::TwoProver(catalog::magic_square_rc()),
            "tiny-1in3" => GameDocument::Pcp(catalog::tiny_1in3()),
            other => return Err((TpStatus::Invalid, format!("unknown catalog game `{other}`"))),
        };
        put_game(out, doc)
    })
}

/// # Safety
/// `game` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tp_game_free(game: *mut TpGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// # Safety
/// `game` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tp_game_kind(game: *const TpGame, out: *mut TpGameKind) -> TpStatus {
    guard(|| {
        let g = game_ref(game)?;
        let out = out.as_mut().ok_or_else(|| null("output kind pointer"))?;
        *out = match g.doc {
            GameDocument::TwoProver(_) => TpGameKind::TwoProverOneRound,
            GameDocument::MultiRound(_) => TpGameKind::MultiRound,
            GameDocument::Pcp(_) => TpGameKind::Pcp3,
        };
        Ok(())
    })
}

/// Serializes to the game file format.
///
/// # Safety
/// `game` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tp_game_serialize(game: *const TpGame, out: *mut *mut c_char) -> TpStatus {
    guard(|| {
        let g = game_ref(game)?;
        put_string(out, serialize_game(&g.doc))
    })
}

fn wrong_kind(need: &str, doc: &GameDocument) -> (TpStatus, String) {
    (TpStatus::WrongKind, format!("this value needs a {need} game, got {}", doc.kind()))
}

/// Exact value. `exact_out` receives `"p/q"` text (free with
/// [`tp_string_free`]); `float_out` may be NULL.
///
/// # Safety
/// `game` and `exact_out` must be valid; `float_out` valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn tp_value(
    game: *const TpGame,
    kind: TpValueKind,
    exact_out: *mut *mut c_char,
    float_out: *mut f64,
) -> TpStatus {
    guard(|| {
        let g = game_ref(game)?;
        let value: Rational = match (kind, &g.doc) {
            (TpValueKind::Classical, GameDocument::TwoProver(x)) => classical_value(x).map_err(lib)?.value,
            (TpValueKind::NoSignaling, GameDocument::TwoProver(x)) => no_signaling_value(x).map_err(lib)?.value,
            (TpValueKind::MultiRound, GameDocument::MultiRound(x)) => multi_round_value(x).map_err(lib)?.value,
            (TpValueKind::Pcp, GameDocument::Pcp(x)) => pcp_value(x).map_err(lib)?.value,
            (TpValueKind::Classical | TpValueKind::NoSignaling, doc) => return Err(wrong_kind("two_prover_one_round", doc)),
            (TpValueKind::MultiRound, doc) => return Err(wrong_kind("multi_round", doc)),
            (TpValueKind::Pcp, doc) => return Err(wrong_kind("pcp3", doc)),
        };
        put_string(exact_out, value.to_text())?;
        if let Some(f) = float_out.as_mut() {
            *f = value.to_f64();
        }
        Ok(())
    })
}

/// See-saw lower bound on the entangled value with local dimensions `d1`
/// and `d2`.
///
/// # Safety
/// `game` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tp_entangled_lower_bound(
    game: *const TpGame,
    d1: usize,
    d2: usize,
    restarts: usize,
    seed: u64,
    out: *mut f64,
) -> TpStatus {
    guard(|| {
        let g = game_ref(game)?;
        let GameDocument::TwoProver(x) = &g.doc else {
            return Err(wrong_kind("two_prover_one_round", &g.doc));
        };
        let out = out.as_mut().ok_or_else(|| null("output value pointer"))?;
        let opts = SeeSawOptions { dims: (d1, d2), restarts, seed, ..SeeSawOptions::default() };
        let r = entangled_lower_bound(x, &opts).map_err(lib)?;
        if !r.value.is_finite() {
            return Err((TpStatus::Numerical, "see-saw produced a non-finite value".into()));
        }
        *out = r.value;
        Ok(())
    })
}

/// Transforms into a new two-prover game. `copies` is used by `Repeat`.
///
/// # Safety
/// `game` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tp_transform(
    game: *const TpGame,
    kind: TpTransformKind,
    copies: usize,
    out: *mut *mut TpGame,
) -> TpStatus {
    guard(|| {
        let g = game_ref(game)?;
        let result = match (kind, &g.doc) {
            (TpTransformKind::Oracularize, GameDocument::MultiRound(x)) => oracularize_multi_round(x).map(|o| o.game),
            (TpTransformKind::Oracularize, GameDocument::Pcp(x)) => oracularize_pcp(x).map(|o| o.game),
            (TpTransformKind::OracularizeDummy, GameDocument::Pcp(x)) => oracularize_pcp_dummy(x).map(|o| o.game),
            (TpTransformKind::Repeat, GameDocument::TwoProver(x)) => parallel_repeat(x, copies),
            (_, doc) => return Err((TpStatus::WrongKind, format!("transform does not apply to a {} game", doc.kind()))),
        };
        put_game(out, GameDocument::TwoProver(result.map_err(lib)?))
    })
}

/// Runs a verification suite by name. `samples == 0` uses the suite's
/// default. Writes the number of holding and total inequalities.
///
/// # Safety
/// `suite` must be a nul-terminated string; `holding` and `total` valid.
#[no_mangle]
pub unsafe extern "C" fn tp_verify(
    suite: *const c_char,
    seed: u64,
    samples: usize,
    holding: *mut usize,
    total: *mut usize,
) -> TpStatus {
    guard(|| {
        let name = read_str(suite, "suite")?;
        let suite = Suite::from_name(name).ok_or_else(|| (TpStatus::Invalid, format!("unknown suite `{name}`")))?;
        let mut opts = SuiteOptions::new(suite, seed);
        if samples > 0 {
            opts.samples = samples;
        }
        let report = run_suite(suite, &opts).map_err(lib)?;
        let (h, t) = report.tally();
        *holding.as_mut().ok_or_else(|| null("holding"))? = h;
        *total.as_mut().ok_or_else(|| null("total"))? = t;
        Ok(())
    })
}
