use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn header_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fastbin.h")
}

#[test]
fn header_declares_the_api() {
    let h = fs::read_to_string(header_path()).expect("header is generated by build.rs");
    for item in [
        "typedef struct FastbinBinner FastbinBinner;",
        "FASTBIN_STATUS_OK = 0",
        "FASTBIN_STATUS_NON_FINITE_INPUT = 5",
        "fastbin_binner_new(",
        "fastbin_binner_free(",
        "fastbin_binner_num_bins(",
        "fastbin_binner_cells(",
        "fastbin_bin_value(",
        "fastbin_bin_slice(",
        "fastbin_binary_search_bin(",
        "fastbin_status_message(",
        "#ifndef FASTBIN_H",
    ] {
        assert!(h.contains(item), "header lacks {item}");
    }
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include "fastbin.h"

int main(void) {
    const double b[] = {2, 11, 19, 20, 21, 27, 29, 30};
    const double xs[] = {25, 13, 10.5, 19.5};
    size_t out[4];
    FastbinBinner *h = NULL;
    FastbinStatus s = fastbin_binner_new(b, 8, 0, &h);
    if (s != FASTBIN_STATUS_OK) {
        fprintf(stderr, "%s\n", fastbin_status_message(s));
        return 1;
    }
    s = fastbin_bin_slice(h, xs, 4, out, NULL);
    if (s != FASTBIN_STATUS_OK) return 2;
    printf("%zu %zu %zu %zu\n", out[0], out[1], out[2], out[3]);
    fastbin_binner_free(h);

    const double bad[] = {1, 1, 2};
    s = fastbin_binner_new(bad, 3, 0, &h);
    printf("%s\n", fastbin_status_message(s));
    return h == NULL ? 0 : 3;
}
"#;

/// Directory holding this build's `libfastbin_ffi.a`, next to `deps/`.
fn artifact_dir() -> PathBuf {
    let exe = env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let cc = env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let lib = artifact_dir().join("libfastbin_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(header_path().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");

    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "5 2 1 3\nboundaries are not strictly increasing\n"
    );
}
