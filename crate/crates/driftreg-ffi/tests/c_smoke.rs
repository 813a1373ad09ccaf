//! Compiles and runs a small C program against the generated header and
//! the static library, proving the ABI is consumable from C.

use std::path::PathBuf;
use std::process::Command;

const C_PROGRAM: &str = r#"
#include <assert.h>
#include <math.h>
#include <stdio.h>
#include "driftreg.h"

int main(void) {
    driftreg_learner *laser = NULL;
    driftreg_learner *aar = NULL;
    assert(driftreg_learner_new_laser(2, 0.5, INFINITY, 0.0, &laser) == DRIFTREG_STATUS_OK);
    assert(driftreg_learner_new_aar(2, 0.5, &aar) == DRIFTREG_STATUS_OK);
    assert(driftreg_learner_dim(laser) == 2);

    double xs[6] = {1.0, 0.5, -0.3, 0.8, 0.2, -1.1};
    double ys[3] = {0.7, -0.2, 0.4};
    for (int t = 0; t < 3; t++) {
        double ya = 0.0, yb = 0.0;
        assert(driftreg_learner_step(laser, &xs[2 * t], 2, ys[t], &ya) == DRIFTREG_STATUS_OK);
        assert(driftreg_learner_step(aar, &xs[2 * t], 2, ys[t], &yb) == DRIFTREG_STATUS_OK);
        assert(fabs(ya - yb) <= 1e-12);
    }
    assert(driftreg_learner_steps(laser) == 3);

    double w[2];
    assert(driftreg_learner_weights(laser, w, 2) == DRIFTREG_STATUS_OK);

    /* error path: wrong dimension must not succeed and must leave a message */
    double one = 1.0, yhat = 0.0;
    assert(driftreg_learner_predict(laser, &one, 1, &yhat) == DRIFTREG_STATUS_DIMENSION_MISMATCH);
    char msg[128];
    assert(driftreg_last_error(msg, sizeof msg) > 0);

    driftreg_learner_free(laser);
    driftreg_learner_free(aar);
    printf("c smoke ok\n");
    return 0;
}
"#;

#[test]
fn c_consumer_compiles_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");

    // locate the staticlib built for this test profile
    let mut lib = None;
    for ancestor in std::env::current_exe().unwrap().ancestors() {
        let candidate = ancestor.join("libdriftreg_ffi.a");
        if candidate.exists() {
            lib = Some(candidate);
            break;
        }
    }
    let Some(lib) = lib else {
        panic!("libdriftreg_ffi.a not found next to the test binary");
    };

    let work = std::env::temp_dir().join(format!("driftreg_c_smoke_{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("smoke.c");
    let exe = work.join("smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();

    let compile = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include_dir)
        .arg(&lib)
        .arg("-lm")
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-o")
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        compile.status.success(),
        "cc failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success());
    assert_eq!(String::from_utf8_lossy(&run.stdout), "c smoke ok\n");
    std::fs::remove_dir_all(&work).ok();
}
