//! C ABI for pegkit.
//!
//! Objects are opaque handles created by `peg_*_new`/`peg_*_parse` style
//! calls and released with the matching `*_free`. Every fallible call
//! returns a [`PegStatus`]; on failure a message is kept per thread and can be
//! read with [`peg_last_error`]. Panics never cross the boundary: they are
//! reported as `PEG_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use pegkit::dp::{dp_evader_action, dp_pursuer_action, nash_value, solve_dp_with, DpTable, SolveOptions};
use pegkit::error::Category;
use pegkit::graph::{gen_grid, parse_graph_file};
use pegkit::{Error, GlobalState};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PegStatus {
    Ok = 0,
    NullPointer = 1,
    Input = 3,
    Capacity = 4,
    Unsupported = 5,
    Rules = 6,
    Protocol = 7,
    Validation = 8,
    Io = 9,
    /// The buffer passed in is too small.
    BufferTooSmall = 10,
    Panic = 99,
}

/// An undirected graph plus the exits listed in its file.
pub struct PegGraph {
    graph: Arc<pegkit::Graph>,
    exits: Vec<usize>,
}

/// A validated game definition.
pub struct PegSpec {
    spec: pegkit::PegSpec,
}

/// A solved step table.
pub struct PegTable {
    table: DpTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PegStatus {
    match e.category() {
        Category::Input => PegStatus::Input,
        Category::Capacity => PegStatus::Capacity,
        Category::Unsupported => PegStatus::Unsupported,
        Category::Rules => PegStatus::Rules,
        Category::Protocol => PegStatus::Protocol,
        Category::Validation => PegStatus::Validation,
        Category::Io => PegStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Core(Error),
    Small(usize),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PegStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PegStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            PegStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Small(need))) => {
            set_error(format!("buffer too small: {need} entries needed"));
            PegStatus::BufferTooSmall
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            PegStatus::Panic
        }
    }
}

unsafe fn reference<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Core(Error::Argument(format!("{what} is not valid UTF-8"))))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn state(spec: &pegkit::PegSpec, pursuers: *const u32, evader: u32) -> Result<GlobalState, Fail> {
    let p = slice(pursuers, spec.pursuers(), "pursuers")?;
    Ok(GlobalState::new(p.iter().map(|&v| v as usize).collect(), evader as usize))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn peg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a graph file (line format or JSON).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn peg_graph_parse(text: *const c_char, out: *mut *mut PegGraph) -> PegStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let file = parse_graph_file(c_str(text, "text")?)?;
        *out = Box::into_raw(Box::new(PegGraph { graph: Arc::new(file.graph), exits: file.exits }));
        Ok(())
    })
}

/// Builds a `width` x `height` grid graph.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn peg_graph_grid(width: u32, height: u32, out: *mut *mut PegGraph) -> PegStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let graph = gen_grid(width as usize, height as usize)?;
        *out = Box::into_raw(Box::new(PegGraph { graph: Arc::new(graph), exits: Vec::new() }));
        Ok(())
    })
}

/// # Safety
/// `graph` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn peg_graph_node_count(graph: *const PegGraph) -> u32 {
    graph.as_ref().map_or(0, |g| g.graph.node_count() as u32)
}

/// # Safety
/// `graph` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn peg_graph_free(graph: *mut PegGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Creates a game on `graph`. A negative `capture_radius`, a zero
/// `capture_threshold` or a zero `discount` selects the default. The graph's own exits are used; the graph handle may
/// be freed afterwards.
///
/// # Safety
/// `graph` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn peg_spec_new(
    graph: *const PegGraph,
    pursuers: u32,
    capture_radius: i32,
    capture_threshold: u32,
    discount: f64,
    out: *mut *mut PegSpec,
) -> PegStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let g = reference(graph, "graph")?;
        let mut b = pegkit::PegSpec::builder(g.graph.clone(), pursuers as usize).exits(g.exits.clone());
        if capture_radius >= 0 {
            b = b.capture_radius(capture_radius as u32);
        }
        if capture_threshold > 0 {
            b = b.capture_threshold(capture_threshold as usize);
        }
        if discount != 0.0 {
            b = b.discount(discount);
        }
        *out = Box::into_raw(Box::new(PegSpec { spec: b.build()? }));
        Ok(())
    })
}

/// Stable identifier of the game; zero for a null handle.
///
/// # Safety
/// `spec` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn peg_spec_fingerprint(spec: *const PegSpec) -> u64 {
    spec.as_ref().map_or(0, |s| s.spec.fingerprint())
}

/// # Safety
/// `spec` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn peg_spec_free(spec: *mut PegSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Solves a no-exit game. `state_cap` of zero keeps the default limit.
///
/// # Safety
/// `spec` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn peg_table_solve(spec: *const PegSpec, state_cap: u64, out: *mut *mut PegTable) -> PegStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = reference(spec, "spec")?;
        let mut opts = SolveOptions::default();
        if state_cap > 0 {
            opts.state_cap = state_cap as u128;
        }
        let (table, _) = solve_dp_with(&s.spec, &opts)?;
        *out = Box::into_raw(Box::new(PegTable { table }));
        Ok(())
    })
}

/// Loads a table saved for `spec`.
///
/// # Safety
/// `spec`, `path` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn peg_table_load(
    spec: *const PegSpec,
    path: *const c_char,
    out: *mut *mut PegTable,
) -> PegStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = reference(spec, "spec")?;
        let file = File::open(c_str(path, "path")?).map_err(Error::from)?;
        let table = DpTable::read_for(BufReader::new(file), &s.spec)?;
        *out = Box::into_raw(Box::new(PegTable { table }));
        Ok(())
    })
}

/// # Safety
/// `table` and `path` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn peg_table_save(table: *const PegTable, path: *const c_char) -> PegStatus {
    guard(|| {
        let t = reference(table, "table")?;
        let file = File::create(c_str(path, "path")?).map_err(Error::from)?;
        t.table.write_to(BufWriter::new(file))?;
        Ok(())
    })
}

/// # Safety
/// `table` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn peg_table_free(table: *mut PegTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Steps to forced capture from a state; `u32::MAX` when the evader can
/// avoid capture forever.
///
/// # Safety
/// All pointers must be valid; `pursuers` holds one node per pursuer.
#[no_mangle]
pub unsafe extern "C" fn peg_table_steps(
    table: *const PegTable,
    spec: *const PegSpec,
    pursuers: *const u32,
    evader: u32,
    out: *mut u32,
) -> PegStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = reference(table, "table")?;
        let s = reference(spec, "spec")?;
        t.table.check_spec(&s.spec)?;
        let st = state(&s.spec, pursuers, evader)?;
        s.spec.check_state(&st)?;
        *out = t.table.steps(&st).unwrap_or(u32::MAX);
        Ok(())
    })
}

/// Equilibrium joint pursuer move; writes one node per pursuer to `out`,
/// which must hold `out_len` entries.
///
/// # Safety
/// All pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn peg_pursuer_action(
    table: *const PegTable,
    spec: *const PegSpec,
    pursuers: *const u32,
    evader: u32,
    out: *mut u32,
    out_len: usize,
) -> PegStatus {
    guard(|| {
        let t = reference(table, "table")?;
        let s = reference(spec, "spec")?;
        let st = state(&s.spec, pursuers, evader)?;
        let mv = dp_pursuer_action(&t.table, &s.spec, &st)?;
        if out_len < mv.len() {
            return Err(Fail::Small(mv.len()));
        }
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, mv.len());
        for (d, v) in dst.iter_mut().zip(mv) {
            *d = v as u32;
        }
        Ok(())
    })
}

/// Equilibrium evader move.
///
/// # Safety
/// All pointers must be valid; `pursuers` holds one node per pursuer.
#[no_mangle]
pub unsafe extern "C" fn peg_evader_action(
    table: *const PegTable,
    spec: *const PegSpec,
    pursuers: *const u32,
    evader: u32,
    out: *mut u32,
) -> PegStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = reference(table, "table")?;
        let s = reference(spec, "spec")?;
        let st = state(&s.spec, pursuers, evader)?;
        *out = dp_evader_action(&t.table, &s.spec, &st)? as u32;
        Ok(())
    })
}

/// Discounted equilibrium value of a state.
///
/// # Safety
/// All pointers must be valid; `pursuers` holds one node per pursuer.
#[no_mangle]
pub unsafe extern "C" fn peg_nash_value(
    table: *const PegTable,
    spec: *const PegSpec,
    pursuers: *const u32,
    evader: u32,
    out: *mut f64,
) -> PegStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = reference(table, "table")?;
        let s = reference(spec, "spec")?;
        let st = state(&s.spec, pursuers, evader)?;
        *out = nash_value(&t.table, &s.spec, &st)?;
        Ok(())
    })
}
