use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use scas_ffi::*;

const PROVIDER: &str = include_str!("../../core/fixtures/provider.arcs");
const SAAS_APP: &str = include_str!("../../core/fixtures/saas_app.xml");

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(scas_last_error()).to_string_lossy().into_owned() }
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    scas_string_free(s);
    out
}

fn parse(text: &str, format: ScasFormat) -> *mut ScasModel {
    let text = cstr(text);
    let mut model = ptr::null_mut();
    let status = unsafe { scas_model_parse(text.as_ptr(), format, &mut model) };
    assert_eq!(status, ScasStatus::Ok, "{}", last_error());
    model
}

#[test]
fn parse_and_count() {
    let m = parse(PROVIDER, ScasFormat::ArcTable);
    unsafe {
        assert_eq!(scas_model_feature_count(m), 34);
        assert_eq!(scas_model_arc_count(m), 24);
        for (scope, k) in [("PGUI", 24), ("pBP", 16), ("PS", 3), ("PDB", 6), ("Provider", 6912)] {
            let mut n = 0u64;
            let s = cstr(scope);
            assert_eq!(scas_count_configurations(m, s.as_ptr(), &mut n), ScasStatus::Ok);
            assert_eq!(n, k, "{scope}");
        }
        scas_model_free(m);
    }
    let x = parse(SAAS_APP, ScasFormat::Xml);
    unsafe {
        assert!(scas_model_feature_count(x) > 0);
        scas_model_free(x);
    }
}

#[test]
fn parse_errors_set_message() {
    let text = cstr(include_str!("../../core/fixtures/empty_heads.arcs"));
    let mut model = ptr::null_mut();
    let status = unsafe { scas_model_parse(text.as_ptr(), ScasFormat::ArcTable, &mut model) };
    assert_eq!(status, ScasStatus::ParseError);
    assert!(model.is_null());
    assert!(last_error().contains("empty head set"), "{}", last_error());
    let status = unsafe { scas_model_parse(ptr::null(), ScasFormat::Xml, &mut model) };
    assert_eq!(status, ScasStatus::NullArgument);
}

#[test]
fn enumerator_streams_in_order_and_outlives_model() {
    let m = parse(PROVIDER, ScasFormat::ArcTable);
    let scope = cstr("PDB");
    let mut it = ptr::null_mut();
    unsafe {
        assert_eq!(scas_enumerator_new(m, scope.as_ptr(), false, &mut it), ScasStatus::Ok);
        scas_model_free(m);
        let mut lines = Vec::new();
        loop {
            let mut line = ptr::null_mut();
            assert_eq!(scas_enumerator_next(it, &mut line), ScasStatus::Ok);
            if line.is_null() {
                break;
            }
            lines.push(take(line));
        }
        scas_enumerator_free(it);
        assert_eq!(lines.len(), 6);
        assert!(lines.iter().all(|l| l.split(',').any(|t| t == "PDB")));
    }
}

#[test]
fn unknown_scope_and_streaming_root() {
    let m = parse(PROVIDER, ScasFormat::ArcTable);
    unsafe {
        let mut it = ptr::null_mut();
        let bogus = cstr("nope");
        assert_eq!(scas_enumerator_new(m, bogus.as_ptr(), false, &mut it), ScasStatus::UnknownFeature);
        assert!(it.is_null());
        assert_eq!(scas_enumerator_new(m, ptr::null(), true, &mut it), ScasStatus::Ok);
        let mut line = ptr::null_mut();
        assert_eq!(scas_enumerator_next(it, &mut line), ScasStatus::Ok);
        let first = take(line);
        assert!(first.contains("Provider"));
        scas_enumerator_free(it);
        scas_model_free(m);
    }
}

#[test]
fn metrics_json_is_exact() {
    let m = parse(PROVIDER, ScasFormat::ArcTable);
    unsafe {
        let mut out = ptr::null_mut();
        let scope = cstr("PGUI");
        assert_eq!(scas_metrics_json(m, scope.as_ptr(), &mut out), ScasStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["scopes"][0]["variability"]["fraction"], "24/255");
        assert_eq!(v["scopes"][0]["n"], 8);
        assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);

        let mut out = ptr::null_mut();
        assert_eq!(scas_metrics_json(m, ptr::null(), &mut out), ScasStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["scopes"].as_array().unwrap().len(), 4);
        scas_model_free(m);
    }
}

#[test]
fn select_and_reconfigure() {
    let m = parse(PROVIDER, ScasFormat::ArcTable);
    unsafe {
        let scope = cstr("PGUI");
        let require = cstr("tree");
        let mut out = ptr::null_mut();
        assert_eq!(scas_select(m, scope.as_ptr(), require.as_ptr(), ptr::null(), ptr::null(), &mut out), ScasStatus::Ok);
        assert_eq!(take(out), "PGUI,menu,page,tree");

        let both = cstr("tree,standard");
        let mut out = ptr::null_mut();
        let status = scas_select(m, scope.as_ptr(), both.as_ptr(), ptr::null(), ptr::null(), &mut out);
        assert_eq!(status, ScasStatus::Infeasible);
        assert!(out.is_null());
        assert!(!last_error().is_empty());

        let current = cstr("PGUI,tree");
        let mut out = ptr::null_mut();
        let status = scas_reconfigure_json(m, scope.as_ptr(), current.as_ptr(), ptr::null(), ptr::null(), ptr::null(), &mut out);
        assert_eq!(status, ScasStatus::Ok);
        let plan: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(plan["delta_size"], 2);
        assert_eq!(plan["add"], serde_json::json!(["menu", "page"]));
        assert_eq!(plan["cost"], "4");

        let weights = cstr("bad weight here\n");
        let status = scas_select(m, scope.as_ptr(), ptr::null(), ptr::null(), weights.as_ptr(), &mut out);
        assert_eq!(status, ScasStatus::InvalidArgument);
        scas_model_free(m);
    }
}

#[test]
fn null_handles_are_tolerated() {
    unsafe {
        scas_model_free(ptr::null_mut());
        scas_enumerator_free(ptr::null_mut());
        scas_string_free(ptr::null_mut());
        assert_eq!(scas_model_feature_count(ptr::null()), 0);
        let mut n = 0;
        assert_eq!(scas_count_configurations(ptr::null(), ptr::null(), &mut n), ScasStatus::NullArgument);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/scas.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["scas_model_parse", "scas_enumerator_next", "scas_last_error", "scas_string_free"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "scas.h"

int main(int argc, char **argv) {
    FILE *f = fopen(argv[1], "rb");
    static char text[1 << 16];
    size_t len = fread(text, 1, sizeof text - 1, f);
    fclose(f);
    text[len] = 0;
    ScasModel *m = NULL;
    if (scas_model_parse(text, SCAS_FORMAT_ARC_TABLE, &m) != SCAS_STATUS_OK) {
        fprintf(stderr, "%s\n", scas_last_error());
        return 1;
    }
    uint64_t k = 0;
    if (scas_count_configurations(m, "Provider", &k) != SCAS_STATUS_OK) return 2;
    ScasEnumerator *it = NULL;
    if (scas_enumerator_new(m, "PS", false, &it) != SCAS_STATUS_OK) return 3;
    char *line = NULL;
    scas_enumerator_next(it, &line);
    printf("%zu %llu %s\n", scas_model_feature_count(m), (unsigned long long)k, line);
    scas_string_free(line);
    scas_enumerator_free(it);
    scas_model_free(m);
    return 0;
}
"#;

#[test]
fn c_program_links_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"));
    let lib = target.join(if cfg!(debug_assertions) { "debug" } else { "release" }).join("libscas_ffi.a");
    if !lib.exists() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("static library or C compiler unavailable; link check skipped");
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("main.c");
    let exe = dir.join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = std::process::Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).arg(manifest.join("../core/fixtures/provider.arcs")).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut fields = stdout.split_whitespace();
    assert_eq!(fields.next(), Some("34"));
    assert_eq!(fields.next(), Some("6912"));
    assert!(fields.next().unwrap().contains("PS"));
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("scas-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
