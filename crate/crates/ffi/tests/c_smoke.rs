//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "cocoonsim.h"

int main(void) {
    CsConfig *cfg = NULL;
    if (cs_config_parse("n = 200\ni0 = 0.05\nhorizon = 20\nra = 0.85\n", &cfg) != CS_STATUS_OK) return 1;
    CsRun *run = NULL;
    if (cs_run(cfg, 7, &run) != CS_STATUS_OK) return 2;
    size_t n = cs_run_step_count(run);
    CsStepRecord rec;
    if (cs_run_step(run, n - 1, &rec) != CS_STATUS_OK) return 3;
    if (!(rec.i > 0.05) || rec.t != n - 1) return 4;
    if (cs_run_step(run, n, &rec) != CS_STATUS_OUT_OF_RANGE) return 5;
    if (cs_last_error() == NULL) return 6;
    if (cs_config_set_ra(cfg, 2.0) != CS_STATUS_INVALID_PARAMETER) return 7;
    if (fabs(cs_logistic_density(0.0, 0.25, 1.0) - 0.25) > 1e-12) return 8;
    printf("steps=%zu final_i=%f\n", n, rec.i);
    cs_run_free(run);
    cs_config_free(cfg);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    assert!(include.join("cocoonsim.h").exists(), "header not generated");

    // target/<profile>/deps/c_smoke-* -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libcocoonsim_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("smoke.c");
    let bin = work.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();

    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("run C compiler");
    assert!(status.success(), "C compilation failed");

    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "C program exited with {:?}",
        out.status.code()
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("steps=21 "));
}
