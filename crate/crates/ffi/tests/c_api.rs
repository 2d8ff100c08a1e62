use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use bias_learn_ffi::*;

const PARITY: u32 = 0b1010;
const AT_LEAST_TWO: u32 = 0b0111;

fn new_net(rep_dim: usize, seed: u64) -> *mut BlNetwork {
    let hidden = [8usize];
    let tasks = [PARITY, AT_LEAST_TWO];
    let mut net = ptr::null_mut();
    let status = unsafe {
        bl_network_new(
            hidden.as_ptr(),
            1,
            rep_dim,
            tasks.as_ptr(),
            2,
            0.5,
            seed,
            &mut net,
        )
    };
    assert_eq!(status, BlStatus::Ok);
    assert!(!net.is_null());
    net
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(bl_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(bl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn shape_accessors() {
    let net = new_net(2, 1);
    let (mut tasks, mut k, mut params) = (0usize, 0usize, 0usize);
    unsafe {
        assert_eq!(bl_network_task_count(net, &mut tasks), BlStatus::Ok);
        assert_eq!(bl_network_rep_dim(net, &mut k), BlStatus::Ok);
        assert_eq!(bl_network_param_count(net, &mut params), BlStatus::Ok);
        bl_network_free(net);
    }
    assert_eq!((tasks, k), (2, 2));
    assert_eq!(params, 106 + 2 * 3);
}

#[test]
fn zero_init_predicts_one_half() {
    let hidden = [4usize];
    let tasks = [PARITY];
    let mut net = ptr::null_mut();
    let bits = [1u8, 1, 0, 0, 0, 0, 0, 0, 0, 0];
    let mut p = 0.0;
    let mut h = [0.0; 3];
    unsafe {
        assert_eq!(
            bl_network_new(hidden.as_ptr(), 1, 3, tasks.as_ptr(), 1, 0.0, 0, &mut net),
            BlStatus::Ok
        );
        assert_eq!(
            bl_network_predict(net, 0, bits.as_ptr(), bits.len(), &mut p),
            BlStatus::Ok
        );
        assert_eq!(
            bl_network_represent(net, bits.as_ptr(), bits.len(), h.as_mut_ptr(), 3),
            BlStatus::Ok
        );
        bl_network_free(net);
    }
    assert_eq!(p, 0.5);
    assert_eq!(h, [0.5; 3]);
}

#[test]
fn errors_carry_status_and_message() {
    let net = new_net(2, 2);
    let zero_ones = [0u8; 10];
    let short = [1u8; 4];
    let mut p = 0.0;
    let mut h = [0.0; 3];
    unsafe {
        assert_eq!(
            bl_network_predict(net, 0, zero_ones.as_ptr(), 10, &mut p),
            BlStatus::InvalidArgument
        );
        assert!(!last_error().is_empty());
        assert_eq!(
            bl_network_predict(net, 0, short.as_ptr(), 4, &mut p),
            BlStatus::InvalidArgument
        );
        let bits = [1u8, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        assert_eq!(
            bl_network_predict(net, 7, bits.as_ptr(), 10, &mut p),
            BlStatus::InvalidArgument
        );
        assert_eq!(
            bl_network_represent(net, bits.as_ptr(), 10, h.as_mut_ptr(), 3),
            BlStatus::InvalidArgument
        );
        assert_eq!(
            bl_network_predict(ptr::null(), 0, bits.as_ptr(), 10, &mut p),
            BlStatus::NullPointer
        );
        assert_eq!(
            bl_network_predict(net, 0, bits.as_ptr(), 10, ptr::null_mut()),
            BlStatus::NullPointer
        );
        bl_network_free(net);
        bl_network_free(ptr::null_mut());
    }
    let mut out = ptr::null_mut();
    let bad_task = [0u32];
    let hidden = [8usize];
    let status = unsafe {
        bl_network_new(
            hidden.as_ptr(),
            1,
            2,
            bad_task.as_ptr(),
            1,
            0.5,
            0,
            &mut out,
        )
    };
    assert_eq!(status, BlStatus::InvalidArgument);
    assert!(out.is_null());
}

#[test]
fn training_lowers_error_and_is_deterministic() {
    let cfg = BlTrainConfig {
        max_epochs: 3000,
        ..bl_train_config_default()
    };
    let run = || {
        let net = new_net(2, 5);
        let (mut before, mut after) = (0.0, 0.0);
        let mut result = BlTrainResult {
            epochs: 0,
            final_error: 0.0,
            converged: false,
        };
        unsafe {
            assert_eq!(
                bl_network_gen_error(net, BlMeasure::CategoryUniform, &mut before),
                BlStatus::Ok
            );
            assert_eq!(
                bl_network_train(net, 40, 11, BlMeasure::CategoryUniform, &cfg, &mut result),
                BlStatus::Ok
            );
            assert_eq!(
                bl_network_gen_error(net, BlMeasure::CategoryUniform, &mut after),
                BlStatus::Ok
            );
            bl_network_free(net);
        }
        (before, after, result.epochs, result.final_error)
    };
    let (before, after, epochs, train) = run();
    assert!(after < before, "{after} !< {before}");
    assert!(epochs >= 1 && epochs <= 3000);
    assert!(train.is_finite());
    assert_eq!(run(), (before, after, epochs, train));
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = CString::new(dir.path().join("net.ckpt").to_str().unwrap()).unwrap();
    let net = new_net(2, 3);
    let bits = [0u8, 1, 1, 0, 1, 0, 0, 0, 0, 0];
    let (mut a, mut b) = (0.0, 0.0);
    let mut loaded = ptr::null_mut();
    unsafe {
        assert_eq!(bl_network_save(net, file.as_ptr()), BlStatus::Ok);
        assert_eq!(bl_network_load(file.as_ptr(), &mut loaded), BlStatus::Ok);
        assert_eq!(
            bl_network_predict(net, 1, bits.as_ptr(), 10, &mut a),
            BlStatus::Ok
        );
        assert_eq!(
            bl_network_predict(loaded, 1, bits.as_ptr(), 10, &mut b),
            BlStatus::Ok
        );
        bl_network_free(net);
        bl_network_free(loaded);
    }
    assert_eq!(a, b);

    let missing = CString::new(dir.path().join("absent.ckpt").to_str().unwrap()).unwrap();
    let garbage = dir.path().join("garbage.ckpt");
    std::fs::write(&garbage, "not a checkpoint\n").unwrap();
    let garbage = CString::new(garbage.to_str().unwrap()).unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(bl_network_load(missing.as_ptr(), &mut out), BlStatus::Io);
        assert_eq!(bl_network_load(garbage.as_ptr(), &mut out), BlStatus::Parse);
        assert_eq!(
            bl_network_load(ptr::null(), &mut out),
            BlStatus::NullPointer
        );
    }
    assert!(out.is_null());
}

#[test]
fn separation_and_representation_error_are_in_range() {
    let net = new_net(2, 4);
    let (mut sep, mut err) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            bl_category_separation(net, BlMeasure::FlatUniform, &mut sep),
            BlStatus::Ok
        );
        assert_eq!(
            bl_representation_error(net, BlMeasure::CategoryUniform, 1, &mut err),
            BlStatus::Ok
        );
        bl_network_free(net);
    }
    assert!((0.25..=1.0).contains(&sep), "{sep}");
    assert!(err > 0.0 && err < 0.25, "{err}");
}

#[test]
fn bounds() {
    let mut g = 0.0;
    let (mut m, mut a, mut b) = (0.0, 0.0, 0.0);
    let mut novel = 0.0;
    let mut n_tasks = 0.0;
    let mut cap = 0.0;
    unsafe {
        assert_eq!(bl_n_task_gain(100.0, 10.0, 10, &mut g), BlStatus::Ok);
        assert_eq!(
            bl_m_bound(106.0, 3.0, 4, 0.1, 0.05, 1.0, &mut m, &mut a, &mut b),
            BlStatus::Ok
        );
        assert_eq!(
            bl_m_bound(
                106.0,
                3.0,
                4,
                0.1,
                0.05,
                1.0,
                ptr::null_mut(),
                ptr::null_mut(),
                ptr::null_mut()
            ),
            BlStatus::Ok
        );
        assert_eq!(
            bl_novel_task_m_bound(3.0, 0.1, 0.05, 1.0, &mut novel),
            BlStatus::Ok
        );
        assert_eq!(
            bl_n_bound(106.0, 0.1, 0.05, 1.0, 1.0, &mut n_tasks),
            BlStatus::Ok
        );
        assert_eq!(
            bl_capacity_log_composite(106.0, 3.0, 1, 0.1, 1.0, &mut cap),
            BlStatus::Ok
        );
        assert_eq!(
            bl_n_task_gain(100.0, 10.0, 0, &mut g),
            BlStatus::InvalidArgument
        );
        assert_eq!(
            bl_m_bound(
                106.0,
                3.0,
                4,
                1.5,
                0.05,
                1.0,
                &mut m,
                ptr::null_mut(),
                ptr::null_mut()
            ),
            BlStatus::InvalidArgument
        );
    }
    assert_eq!(g, 5.5);
    assert!((m - (a + b / 4.0)).abs() < 1e-9 * m);
    assert!(novel > 0.0 && n_tasks > 0.0);
    assert!((cap - 109.0 * 10f64.ln()).abs() < 1e-9);
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bias_learn.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "bl_network_new",
        "bl_network_free",
        "bl_network_train",
        "bl_representation_error",
        "bl_n_task_gain",
        "typedef struct BlNetwork BlNetwork",
        "BL_STATUS_DIVERGED",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"bias_learn.h\"\nint main(void) { BlNetwork *n = 0; double g; bl_n_task_gain(1.0, 1.0, 1, &g); bl_network_free(n); return 0; }\n",
    )
    .unwrap();
    let Ok(out) = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler, skipping syntax check");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
