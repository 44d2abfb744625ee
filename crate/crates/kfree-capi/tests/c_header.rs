//! Compiles tests/smoke.c against the generated header and the staticlib,
//! then runs it: proves the header is valid C and the ABI links.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_header_smoke() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    let smoke = manifest.join("tests/smoke.c");
    assert!(include.join("kfree.h").exists(), "header missing");

    // the staticlib lands in target/debug/ for plain builds and in
    // target/debug/deps/ when built for tests
    let tmpdir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let debug_dir = tmpdir.parent().unwrap().join("debug");
    let staticlib = [debug_dir.join("libkfree_capi.a"), debug_dir.join("deps/libkfree_capi.a")]
        .into_iter()
        .find(|p| p.exists())
        .expect("staticlib not built");

    let exe = tmpdir.join("capi_smoke");
    std::fs::create_dir_all(&tmpdir).unwrap();
    let status = Command::new("cc")
        .arg(&smoke)
        .arg("-I")
        .arg(&include)
        .arg(staticlib)
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-lm")
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("cc not available");
    assert!(status.success(), "C compilation failed");

    let out = Command::new(&exe).output().expect("run smoke");
    assert!(
        out.status.success(),
        "smoke exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
