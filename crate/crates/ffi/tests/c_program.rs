//! Compiles a small C program against the generated header and the static
//! library. Skipped when no C compiler is on PATH.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "qmarginal.h"

int main(void) {
    bool yes = false;
    if (qm_werner_triple_joinable(2, -1.0, -1.0, -1.0, &yes) != QM_STATUS_OK || yes) return 10;
    if (qm_werner_triple_joinable(2, 7.0, 0.0, 0.0, &yes) != QM_STATUS_INVALID_ARGUMENT) return 11;
    if (qm_last_error() == NULL || strlen(qm_last_error()) == 0) return 12;
    int64_t num = 0, den = 0;
    if (qm_sharing_threshold(3, 2, 5, &num, &den) != QM_STATUS_OK || num != 2 || den != 5) return 13;
    QmDensityMatrix *w = NULL;
    if (qm_join_werner(2, 0.0, 0.0, 0.0, &w) != QM_STATUS_OK) return 14;
    size_t dim = 0;
    qm_density_dim(w, &dim);
    if (dim != 8) return 15;
    double re[64], im[64];
    if (qm_density_entries(w, re, im, 64) != QM_STATUS_OK) return 16;
    double tr = 0.0;
    for (size_t i = 0; i < dim; i++) tr += re[i * dim + i];
    qm_density_free(w);
    if (tr < 1.0 - 1e-12 || tr > 1.0 + 1e-12) return 17;
    printf("ok %s\n", qm_version());
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // test binaries live in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libqmarginal_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), format!("ok {}", env!("CARGO_PKG_VERSION")));
}
