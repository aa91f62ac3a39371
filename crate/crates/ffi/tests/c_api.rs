use std::ffi::{CStr, CString};
use std::ptr;

use levymult_ffi::*;

const UNIT: &str = r#"
d = 1
n = 1
a = [[1.0]]
b = [[1.0]]
[measure]
kind = "atoms"
atoms = [{ z = [1.0], w = 1.0 }]
[grid]
lengths = [16.0]
points = [64]
"#;

fn parse(text: &str) -> (LmStatus, *mut LmConfig) {
    let c = CString::new(text).unwrap();
    let mut cfg = ptr::null_mut();
    (lm_config_parse(c.as_ptr(), &mut cfg), cfg)
}

fn last_error() -> String {
    let p = lm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn symbol_round_trip_through_handles() {
    let (s, cfg) = parse(UNIT);
    assert_eq!(s, LM_OK);
    let mut m = ptr::null_mut();
    assert_eq!(lm_symbol_evaluate(cfg, &mut m), LM_OK);
    let n = lm_symbol_len(m);
    assert_eq!(n, 64);
    let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(lm_symbol_values(m, re.as_mut_ptr(), im.as_mut_ptr(), n), LM_OK);
    // m(ξ) = 1 − e^{2(cos ξ − 1)} for the unit atom with φ ≡ 1
    let xi = 2.0 * std::f64::consts::PI / 16.0 * 3.0;
    let want = 1.0 - (2.0 * (xi.cos() - 1.0)).exp();
    assert!((re[32 + 3] - want).abs() < 1e-12 && im[35].abs() < 1e-12);
    let mut top = 0.0;
    assert_eq!(lm_symbol_max_abs(m, &mut top), LM_OK);
    assert!(top <= 1.0);
    assert_eq!(lm_symbol_values(m, re.as_mut_ptr(), im.as_mut_ptr(), n - 1), LM_ERR_BUFFER);
    lm_symbol_free(m);
    lm_config_free(cfg);
}

#[test]
fn apply_and_pair() {
    let (_, cfg) = parse(UNIT);
    let mut m = ptr::null_mut();
    assert_eq!(lm_symbol_evaluate(cfg, &mut m), LM_OK);
    let (l, np) = ([16.0], [64usize]);
    let re: Vec<f64> = (0..64).map(|j| (-0.5 * (-8.0 + 0.25 * j as f64).powi(2)).exp()).collect();
    let im = vec![0.0; 64];
    let mut f = ptr::null_mut();
    assert_eq!(lm_field_new(1, l.as_ptr(), np.as_ptr(), re.as_ptr(), im.as_ptr(), &mut f), LM_OK);
    let mut mf = ptr::null_mut();
    assert_eq!(lm_apply(m, f, &mut mf), LM_OK);
    assert_eq!(lm_field_len(mf), 64);
    let mut out = [0.0; 4];
    assert_eq!(lm_pairing(m, f, f, out.as_mut_ptr()), LM_OK);
    assert!((out[0] - out[2]).abs() < 1e-10 && out[0] > 0.0);
    lm_field_free(mf);
    lm_field_free(f);
    lm_symbol_free(m);
    lm_config_free(cfg);
}

#[test]
fn errors_carry_library_codes() {
    let (s, cfg) = parse("fooo = 1");
    assert_eq!(s, LM_ERR_PARSE);
    assert!(cfg.is_null());
    assert!(last_error().contains("fooo"));
    let (s, _) = parse(&UNIT.replace("z = [1.0]", "z = [0.0]"));
    assert_eq!(s, LM_ERR_VALIDATION);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(lm_symbol_stable(2.5, 1.0, &mut re, &mut im), LM_ERR_ALPHA_OUT_OF_RANGE);
    assert_eq!(lm_symbol_stable(0.5, 1.0, ptr::null_mut(), &mut im), LM_ERR_NULL);
    assert_eq!(lm_symbol_stable(0.5, 1.0, &mut re, &mut im), LM_OK);
    assert!(lm_last_error().is_null());
    assert_eq!(lm_config_parse(ptr::null(), &mut ptr::null_mut()), LM_ERR_NULL);
}

#[test]
fn unknown_command_is_reported() {
    let (_, cfg) = parse(UNIT);
    let cmd = CString::new("bogus").unwrap();
    let mut passed = false;
    assert_eq!(lm_run_command(cfg, cmd.as_ptr(), &mut passed), LM_ERR_COMMAND);
    lm_config_free(cfg);
}

#[test]
fn symbol_command_writes_into_out_dir() {
    let dir = std::env::temp_dir().join(format!("levymult-ffi-{}", std::process::id()));
    let (_, cfg) = parse(UNIT);
    let d = CString::new(dir.to_str().unwrap()).unwrap();
    assert_eq!(lm_config_set_out(cfg, d.as_ptr()), LM_OK);
    let cmd = CString::new("symbol").unwrap();
    let mut passed = false;
    assert_eq!(lm_run_command(cfg, cmd.as_ptr(), &mut passed), LM_OK);
    assert!(passed);
    assert!(dir.join("symbol.lmgrid").exists());
    std::fs::remove_dir_all(&dir).unwrap();
    lm_config_free(cfg);
}

#[test]
fn free_accepts_null() {
    lm_config_free(ptr::null_mut());
    lm_symbol_free(ptr::null_mut());
    lm_field_free(ptr::null_mut());
    assert_eq!(lm_symbol_len(ptr::null()), 0);
}

#[test]
fn status_codes_match_library_errors() {
    use levymult::Error;
    assert_eq!(Error::RequiresFiniteMeasure.code(), LM_ERR_REQUIRES_FINITE_MEASURE);
    assert_eq!(Error::Csv(csv::Error::from(std::io::Error::other("x"))).code(), LM_ERR_CSV);
    assert_eq!(Error::StepTooCoarse { change: 0.0, std_err: 0.0 }.code(), LM_ERR_STEP_TOO_COARSE);
}

#[test]
fn header_compiles_and_runs_from_c() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include/levymult.h");
    let text = std::fs::read_to_string(&header).unwrap();
    assert!(text.contains("typedef struct LmConfig LmConfig;"));
    assert!(text.contains("#define LM_ERR_PARSE 22"));
    let Ok(cc) = which_cc() else { return };
    let dir = std::env::temp_dir().join(format!("levymult-c-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("probe.c");
    std::fs::write(
        &src,
        r#"#include "levymult.h"
#include <stdio.h>
int main(void) {
    double re = 0, im = 0;
    if (lm_symbol_stable(0.5, 1.0, &re, &im) != LM_OK) return 1;
    if (lm_symbol_stable(3.0, 1.0, &re, &im) != LM_ERR_ALPHA_OUT_OF_RANGE) return 2;
    LmConfig *cfg = NULL;
    if (lm_config_parse("d = 1", &cfg) == LM_OK) return 3;
    printf("%s\n", lm_version());
    return 0;
}
"#,
    )
    .unwrap();
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("liblevymult_ffi.a");
    let exe = dir.join("probe");
    let mut cmd = std::process::Command::new(cc);
    cmd.args(["-Wall", "-Werror", "-I"]).arg(root.join("include")).arg(&src);
    if lib.exists() {
        cmd.arg(&lib).args(["-lm", "-lpthread", "-ldl", "-o"]).arg(&exe);
    } else {
        cmd.arg("-fsyntax-only");
    }
    assert!(cmd.status().unwrap().success());
    if lib.exists() {
        let out = std::process::Command::new(&exe).output().unwrap();
        assert!(out.status.success(), "{out:?}");
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
