//! Compiles and runs tests/smoke.c against the generated header and the
//! freshly built static library. Skips (without failing) when no C
//! compiler or artifact is available.

use std::env;
use std::path::PathBuf;
use std::process::Command;

fn target_debug_dir() -> PathBuf {
    if let Ok(dir) = env::var("CARGO_TARGET_DIR") {
        return PathBuf::from(dir).join("debug");
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../target")
        .join("debug")
}

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // `cargo test` links rlibs; produce the staticlib artifact explicitly.
    // The build lock is free while tests execute, so this is safe.
    let cargo = env::var("CARGO").unwrap_or_else(|_| "cargo".to_string());
    let built = Command::new(&cargo)
        .args(["build", "-p", "vvlab-ffi"])
        .current_dir(manifest.join("../.."))
        .status()
        .map(|s| s.success())
        .unwrap_or(false);
    let staticlib = target_debug_dir().join("libvvlab_ffi.a");
    if !built || !staticlib.exists() {
        eprintln!("skipping: {} not built", staticlib.display());
        return;
    }
    let cc = env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let work = tempfile::tempdir().unwrap();
    let exe = work.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/smoke.c"))
        .arg(&staticlib)
        .arg(format!("-I{}", manifest.join("include").display()))
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("compiler runs");
    assert!(status.success(), "C compilation failed");
    let out_dir = work.path().join("artifacts");
    let run = Command::new(&exe)
        .arg(&out_dir)
        .output()
        .expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("c abi ok"), "{stdout}");
    assert!(out_dir.join("component1_summary.json").exists());
}
