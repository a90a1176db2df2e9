use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "floquet.h"

int main(void) {
    FqCircuit *c = NULL;
    if (fq_circuit_build(FQ_FAMILY_DYNAMIC, 4, 6, 2, FQ_OBSERVABLE_H, 0.0, &c) != FQ_STATUS_OK) return 1;
    FqShots *s = NULL;
    if (fq_sample(c, 10, 7, &s) != FQ_STATUS_OK) return 2;
    size_t n = 1;
    if (fq_shots_fired_count(s, 3, &n) != FQ_STATUS_OK || n != 0) return 3;
    FqCircuit *bad = NULL;
    if (fq_circuit_build(FQ_FAMILY_STANDARD, 2, 4, 2, FQ_OBSERVABLE_H, 0.0, &bad) != FQ_STATUS_INVALID_DIMENSIONS) return 4;
    if (fq_last_error() == NULL) return 5;
    printf("qubits=%zu\n", fq_circuit_num_qubits(c));
    fq_shots_free(s);
    fq_circuit_free(c);
    return 0;
}
"#;

fn include_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn cc() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .map(String::from)
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let ok = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-c", "-o"])
        .arg(dir.path().join("main.o"))
        .arg("-I")
        .arg(include_dir())
        .arg(&src)
        .status()
        .unwrap()
        .success();
    assert!(ok, "C compile failed");
    if let Ok(cxx) = Command::new("c++").arg("--version").output().map(|_| "c++") {
        let hdr = dir.path().join("h.cpp");
        std::fs::write(&hdr, "#include \"floquet.h\"\nint main() { return 0; }\n").unwrap();
        let ok = Command::new(cxx)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(include_dir())
            .arg(&hdr)
            .status()
            .unwrap()
            .success();
        assert!(ok, "C++ compile failed");
    }
}

/// Links the test program against the static library when cargo has built it.
#[test]
fn c_program_runs() {
    let Some(cc) = cc() else {
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libfloquet_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let ok = Command::new(&cc)
        .arg("-I")
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap()
        .success();
    assert!(ok, "link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "qubits=24");
}
