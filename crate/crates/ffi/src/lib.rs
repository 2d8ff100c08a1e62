//! C ABI over `bias_learn`.
//!
//! Networks are opaque handles created by `bl_network_new` or
//! `bl_network_load` and released with `bl_network_free`. Every fallible
//! function returns a `BlStatus`; on failure `bl_last_error_message` gives a
//! description that stays valid until the next failing call on the same
//! thread. Results are written through out-pointers only on success.
//!
//! All functions use the default environment: 10-bit inputs with one to
//! four ones. Inputs are passed as `len` bytes, each 0 or 1.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use bias_learn::checkpoint::Checkpoint;
use bias_learn::environment::{
    build_training_set, EnvironmentSpec, InputMeasure, InputPattern, MeasureMode, SymmetricTask,
};
use bias_learn::evaluation::{
    average_true_error, category_separation, representation_error, representation_scatter,
    OracleConfig,
};
use bias_learn::network::{init_multitask, NetworkConfig};
use bias_learn::training::{train_multitask, TrainConfig};
use bias_learn::{theory, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Opaque multitask network together with the task of each output unit.
pub struct BlNetwork {
    inner: Checkpoint,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Diverged = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlMeasure {
    /// Each ones-count gets equal mass, spread uniformly within it.
    CategoryUniform = 0,
    /// Every admissible input has equal mass.
    FlatUniform = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlTrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub target_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlTrainResult {
    pub epochs: usize,
    pub final_error: f64,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BlStatus {
    match e {
        Error::Io(_) => BlStatus::Io,
        Error::Parse { .. } | Error::Csv(_) | Error::ArchiveVerification(_) => BlStatus::Parse,
        Error::Diverged { .. } => BlStatus::Diverged,
        _ => BlStatus::InvalidArgument,
    }
}

struct Failure(BlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BlStatus::NullPointer, format!("{what} is null"))
}

fn guard<F>(body: F) -> BlStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BlStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            BlStatus::Panic
        }
    }
}

fn measure(mode: BlMeasure) -> Result<InputMeasure, Failure> {
    let mode = match mode {
        BlMeasure::CategoryUniform => MeasureMode::CategoryUniform,
        BlMeasure::FlatUniform => MeasureMode::FlatUniform,
    };
    Ok(InputMeasure::new(mode, EnvironmentSpec::default())?)
}

unsafe fn network<'a>(net: *const BlNetwork) -> Result<&'a BlNetwork, Failure> {
    net.as_ref().ok_or_else(|| null("network"))
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn path(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BlStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn pattern(bits: *const u8, len: usize) -> Result<InputPattern, Failure> {
    let bits = slice(bits, len, "input")?;
    let x = InputPattern::from_bits(bits)?;
    let spec = EnvironmentSpec::default();
    if !spec.contains(&x) {
        return Err(Error::OutsideDomain {
            ones: x.ones(),
            min: spec.ones_min,
            max: spec.ones_max,
        }
        .into());
    }
    Ok(x)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or an empty string.
#[no_mangle]
pub extern "C" fn bl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn bl_train_config_default() -> BlTrainConfig {
    let d = TrainConfig::default();
    BlTrainConfig {
        learning_rate: d.learning_rate,
        max_epochs: d.max_epochs,
        target_error: d.target_error,
    }
}

/// Creates a network with sigmoid hidden layers `hidden[0..hidden_len]`, a
/// `rep_dim`-dimensional representation and one output unit per task code.
/// Task codes are truth tables over ones-counts 1..4 read as a binary
/// number, most significant bit first (parity is 0b1010 = 10).
///
/// # Safety
/// `hidden` and `task_codes` must point to the stated number of elements;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_network_new(
    hidden: *const usize,
    hidden_len: usize,
    rep_dim: usize,
    task_codes: *const u32,
    task_count: usize,
    init_scale: f64,
    seed: u64,
    out: *mut *mut BlNetwork,
) -> BlStatus {
    guard(|| {
        let spec = EnvironmentSpec::default();
        let hidden = slice(hidden, hidden_len, "hidden")?.to_vec();
        let tasks = slice(task_codes, task_count, "task_codes")?
            .iter()
            .map(|&c| SymmetricTask::from_code(&spec, c))
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = NetworkConfig {
            hidden_sizes: hidden,
            rep_dim,
            init_scale,
            seed,
            ..NetworkConfig::default()
        };
        let net = init_multitask(&cfg, tasks.len())?;
        let handle = Box::new(BlNetwork {
            inner: Checkpoint::new(net, tasks)?,
        });
        write(out, Box::into_raw(handle))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `net` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bl_network_free(net: *mut BlNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Loads a checkpoint written by `bl_network_save` or the command-line tool.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_network_load(
    path_: *const c_char,
    out: *mut *mut BlNetwork,
) -> BlStatus {
    guard(|| {
        let ckpt = Checkpoint::read(&path(path_)?, &EnvironmentSpec::default())?;
        write(out, Box::into_raw(Box::new(BlNetwork { inner: ckpt })))
    })
}

/// # Safety
/// `net` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bl_network_save(net: *const BlNetwork, path_: *const c_char) -> BlStatus {
    guard(|| {
        network(net)?.inner.write(&path(path_)?)?;
        Ok(())
    })
}

/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_network_task_count(net: *const BlNetwork, out: *mut usize) -> BlStatus {
    guard(|| write(out, network(net)?.inner.network.task_count()))
}

/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_network_rep_dim(net: *const BlNetwork, out: *mut usize) -> BlStatus {
    guard(|| write(out, network(net)?.inner.network.rep().output_dim()))
}

/// Total weight count `W_R + n W_O`.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_network_param_count(
    net: *const BlNetwork,
    out: *mut usize,
) -> BlStatus {
    guard(|| write(out, network(net)?.inner.network.param_count()))
}

/// Output of task `task` on one input.
///
/// # Safety
/// `bits` must point to `len` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_network_predict(
    net: *const BlNetwork,
    task: usize,
    bits: *const u8,
    len: usize,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        let x = pattern(bits, len)?;
        write(out, network(net)?.inner.network.predict(task, &x)?)
    })
}

/// Representation output for one input, written to `out[0..out_len]`;
/// `out_len` must equal the representation dimension.
///
/// # Safety
/// `bits` must point to `len` bytes; `out` to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_network_represent(
    net: *const BlNetwork,
    bits: *const u8,
    len: usize,
    out: *mut f64,
    out_len: usize,
) -> BlStatus {
    guard(|| {
        let x = pattern(bits, len)?;
        let h = network(net)?.inner.network.rep().forward_pattern(&x)?;
        if out_len != h.len() {
            return Err(Error::DimensionMismatch {
                expected: h.len(),
                actual: out_len,
            }
            .into());
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        std::slice::from_raw_parts_mut(out, out_len).copy_from_slice(&h);
        Ok(())
    })
}

/// Samples `m` examples per task from `measure` (seeded by `seed`) and trains
/// the whole network jointly. On `BL_STATUS_DIVERGED` the network is left
/// unchanged.
///
/// # Safety
/// `net` must be a live handle; `config` readable; `result` writable or null.
#[no_mangle]
pub unsafe extern "C" fn bl_network_train(
    net: *mut BlNetwork,
    m: usize,
    seed: u64,
    measure_mode: BlMeasure,
    config: *const BlTrainConfig,
    result: *mut BlTrainResult,
) -> BlStatus {
    guard(|| {
        let handle = net.as_mut().ok_or_else(|| null("network"))?;
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        let measure = measure(measure_mode)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets = handle
            .inner
            .tasks
            .iter()
            .map(|t| build_training_set(*t, m, &measure, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = TrainConfig {
            learning_rate: c.learning_rate,
            max_epochs: c.max_epochs,
            target_error: c.target_error,
        };
        let (trained, trace) = train_multitask(handle.inner.network.clone(), &sets, &cfg)?;
        handle.inner.network = trained;
        if !result.is_null() {
            result.write(BlTrainResult {
                epochs: trace.epochs(),
                final_error: trace.final_error,
                converged: trace.converged,
            });
        }
        Ok(())
    })
}

/// Exact mean generalization error over the network's tasks.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_network_gen_error(
    net: *const BlNetwork,
    measure_mode: BlMeasure,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        let h = network(net)?;
        let report = average_true_error(&h.inner.network, &h.inner.tasks, &measure(measure_mode)?)?;
        write(out, report.mean)
    })
}

/// Representation error of the network's representation over all 14 tasks,
/// using `restarts` output-only training restarts per task.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_representation_error(
    net: *const BlNetwork,
    measure_mode: BlMeasure,
    restarts: usize,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        let h = network(net)?;
        let oracle = OracleConfig {
            restarts,
            ..OracleConfig::default()
        };
        let m = measure(measure_mode)?;
        let report = representation_error(h.inner.network.rep(), &m.spec, &m, &oracle)?;
        write(out, report.mean)
    })
}

/// Measure-weighted nearest-centroid accuracy of recovering the ones-count
/// from the representation output.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_category_separation(
    net: *const BlNetwork,
    measure_mode: BlMeasure,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        let h = network(net)?;
        let m = measure(measure_mode)?;
        let points = representation_scatter(h.inner.network.rep(), &m.spec)?;
        write(out, category_separation(&points, &m)?)
    })
}

/// `(W_O + W_R) / (W_O + W_R / n)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_n_task_gain(
    rep_weights: f64,
    output_weights: f64,
    n: usize,
    out: *mut f64,
) -> BlStatus {
    guard(|| write(out, theory::n_task_gain(rep_weights, output_weights, n)?))
}

/// Per-task capacity logarithm `c_cap (W_O + W_R / n) ln(1/epsilon)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_capacity_log_composite(
    rep_weights: f64,
    output_weights: f64,
    n: usize,
    epsilon: f64,
    c_cap: f64,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        write(
            out,
            theory::capacity_log_composite(rep_weights, output_weights, n, epsilon, c_cap)?,
        )
    })
}

/// Examples per task `m = a + b / n`; any of the out-pointers may be null.
///
/// # Safety
/// Non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_m_bound(
    rep_weights: f64,
    output_weights: f64,
    n: usize,
    epsilon: f64,
    delta: f64,
    c_sample: f64,
    out_m: *mut f64,
    out_a: *mut f64,
    out_b: *mut f64,
) -> BlStatus {
    guard(|| {
        let inputs = theory::BoundInputs {
            c_sample,
            ..theory::BoundInputs::new(rep_weights, output_weights, n, epsilon, delta)
        };
        let (m, a, b) = theory::m_bound(&inputs)?;
        for (p, v) in [(out_m, m), (out_a, a), (out_b, b)] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Tasks needed before the learnt representation serves novel tasks.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_n_bound(
    rep_weights: f64,
    epsilon: f64,
    delta: f64,
    c_cap: f64,
    c_sample: f64,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        write(
            out,
            theory::n_bound(rep_weights, epsilon, delta, c_cap, c_sample)?,
        )
    })
}

/// Examples for a novel task when only the output unit is learnt.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_novel_task_m_bound(
    output_weights: f64,
    epsilon: f64,
    delta: f64,
    c_sample: f64,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        write(
            out,
            theory::novel_task_m_bound(output_weights, epsilon, delta, c_sample)?,
        )
    })
}
