//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "dp_ffi.h"

int main(void) {
    double v[64];
    for (int j = 0; j < 64; j++) v[j] = sin(2.0 * M_PI * j / 64.0);
    DpField *f = NULL;
    if (dp_field_new(v, 64, &f) != DP_STATUS_OK) return 1;
    DpBlowupBound b;
    if (dp_blowup_bound(f, 0.0, &b) != DP_STATUS_OK) return 2;
    if (fabs(b.t_bound - 1.0 / (2.0 * M_PI)) > 1e-9) return 3;
    if (dp_field_new(v, 7, &f) != DP_STATUS_INVALID_ARGUMENT) return 4;
    if (dp_last_error_message()[0] == '\0') return 5;
    dp_field_free(f);
    printf("ok %.6f\n", b.t_bound);
    return 0;
}
"#;

fn include_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn static_lib() -> PathBuf {
    // target/<profile>/deps/header-<hash> -> target/<profile>/libdp_ffi.a
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().join("libdp_ffi.a")
}

#[test]
fn header_is_valid_c_and_cxx() {
    let header = include_dir().join("dp_ffi.h");
    for (compiler, std) in [("cc", "-std=c99"), ("c++", "-std=c++11")] {
        let status = Command::new(compiler)
            .args([std, "-Wall", "-Werror", "-fsyntax-only", "-x"])
            .arg(if compiler == "cc" { "c" } else { "c++" })
            .arg(&header)
            .status()
            .unwrap();
        assert!(status.success(), "{compiler} rejected the header");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = static_lib();
    assert!(lib.exists(), "missing {}", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    let exe = tmp.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-D_DEFAULT_SOURCE", "-Wall", "-Werror"])
        .arg("-I")
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "compiling the C program failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok 0.159155\n");
}
