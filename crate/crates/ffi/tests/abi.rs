use std::ffi::{CStr, CString};
use std::ptr;

use pegkit_ffi::*;

fn last_error() -> String {
    let p = peg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn path_spec(n: usize, pursuers: u32) -> *mut PegSpec {
    let mut text = format!("nodes {n}\n");
    for i in 0..n - 1 {
        text += &format!("edge {i} {}\n", i + 1);
    }
    let text = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(peg_graph_parse(text.as_ptr(), &mut g), PegStatus::Ok);
    assert_eq!(peg_graph_node_count(g), n as u32);
    let mut s = ptr::null_mut();
    assert_eq!(peg_spec_new(g, pursuers, -1, 0, 0.0, &mut s), PegStatus::Ok);
    peg_graph_free(g);
    s
}

#[test]
fn solve_and_query_path() {
    unsafe {
        let spec = path_spec(3, 1);
        let mut t = ptr::null_mut();
        assert_eq!(peg_table_solve(spec, 0, &mut t), PegStatus::Ok);

        let p = [0u32];
        let mut steps = 0;
        assert_eq!(peg_table_steps(t, spec, p.as_ptr(), 2, &mut steps), PegStatus::Ok);
        assert_eq!(steps, 1);
        let mut mv = [9u32; 1];
        assert_eq!(peg_pursuer_action(t, spec, p.as_ptr(), 2, mv.as_mut_ptr(), 1), PegStatus::Ok);
        assert_eq!(mv, [1]);
        let mut e = 9;
        assert_eq!(peg_evader_action(t, spec, p.as_ptr(), 2, &mut e), PegStatus::Ok);
        assert!(e <= 2);
        let mut v = 0.0;
        assert_eq!(peg_nash_value(t, spec, p.as_ptr(), 2, &mut v), PegStatus::Ok);
        assert!((v - 0.99).abs() < 1e-12);

        peg_table_free(t);
        peg_spec_free(spec);
    }
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("t.bin").to_str().unwrap()).unwrap();
    unsafe {
        let spec = path_spec(5, 1);
        let mut t = ptr::null_mut();
        assert_eq!(peg_table_solve(spec, 0, &mut t), PegStatus::Ok);
        assert_eq!(peg_table_save(t, path.as_ptr()), PegStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(peg_table_load(spec, path.as_ptr(), &mut back), PegStatus::Ok);
        let (mut a, mut b) = (0, 0);
        let p = [0u32];
        peg_table_steps(t, spec, p.as_ptr(), 4, &mut a);
        peg_table_steps(back, spec, p.as_ptr(), 4, &mut b);
        assert_eq!((a, b), (3, 3));

        // A different game must not accept the table.
        let other = path_spec(5, 2);
        let mut wrong = ptr::null_mut();
        assert_eq!(peg_table_load(other, path.as_ptr(), &mut wrong), PegStatus::Input);
        assert!(wrong.is_null());
        assert!(last_error().contains("fingerprint"));

        peg_table_free(back);
        peg_table_free(t);
        peg_spec_free(other);
        peg_spec_free(spec);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(peg_graph_parse(ptr::null(), &mut g), PegStatus::NullPointer);
        assert!(last_error().contains("text"));

        let bad = CString::new("nodes 2\nedge 0 5\n").unwrap();
        assert_eq!(peg_graph_parse(bad.as_ptr(), &mut g), PegStatus::Input);
        assert!(g.is_null());

        assert_eq!(peg_graph_grid(3, 3, &mut g), PegStatus::Ok);
        assert!(peg_last_error().is_null());
        let mut s = ptr::null_mut();
        assert_eq!(peg_spec_new(g, 0, -1, 0, 0.0, &mut s), PegStatus::Input);
        assert_eq!(peg_spec_new(g, 2, 1, 1, 0.95, &mut s), PegStatus::Ok);
        assert_ne!(peg_spec_fingerprint(s), 0);
        assert_eq!(peg_spec_fingerprint(ptr::null()), 0);

        let mut t = ptr::null_mut();
        assert_eq!(peg_table_solve(s, 10, &mut t), PegStatus::Capacity);
        assert_eq!(peg_table_solve(s, 0, &mut t), PegStatus::Ok);

        let p = [0u32, 8];
        let mut small = [0u32; 1];
        assert_eq!(peg_pursuer_action(t, s, p.as_ptr(), 4, small.as_mut_ptr(), 1), PegStatus::BufferTooSmall);
        let mut e = 0;
        assert_eq!(peg_evader_action(t, s, p.as_ptr(), 99, &mut e), PegStatus::Rules);
        assert_eq!(peg_evader_action(t, s, ptr::null(), 4, &mut e), PegStatus::NullPointer);

        peg_table_free(t);
        peg_spec_free(s);
        peg_graph_free(g);
        peg_graph_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/pegkit.h")).unwrap();
    for name in [
        "peg_last_error",
        "peg_graph_parse",
        "peg_graph_grid",
        "peg_graph_free",
        "peg_spec_new",
        "peg_spec_fingerprint",
        "peg_spec_free",
        "peg_table_solve",
        "peg_table_load",
        "peg_table_save",
        "peg_table_free",
        "peg_table_steps",
        "peg_pursuer_action",
        "peg_evader_action",
        "peg_nash_value",
        "PEG_STATUS_OK",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = ["cc", "clang", "gcc"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"pegkit.h\"\nint main(void) { PegGraph *g = 0; return peg_graph_grid(2, 2, &g) == PEG_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
