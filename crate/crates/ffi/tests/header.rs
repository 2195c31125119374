use std::path::PathBuf;
use std::process::Command;

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/greedy_lab.h")
}

#[test]
fn header_declares_the_exports() {
    let text = std::fs::read_to_string(header()).unwrap();
    for decl in [
        "typedef struct GlEngine GlEngine;",
        "GL_STATUS_OK = 0",
        "GL_STATUS_PANIC = 9",
        "enum GlStatus gl_engine_new(const char *space, struct GlEngine **out);",
        "void gl_engine_free(struct GlEngine *engine);",
        "gl_engine_name(",
        "enum GlStatus gl_norm(const struct GlEngine *engine, const char *vector, char **out);",
        "enum GlStatus gl_norm_f64(const struct GlEngine *engine, const char *vector, double *out);",
        "gl_dual_norm(",
        "gl_tga_run(",
        "gl_verify_claim(",
        "gl_reproduce_examples(",
        "gl_list_claims(",
        "void gl_string_free(char *s);",
        "const char *gl_last_error_message(void);",
        "const char *gl_version(void);",
    ] {
        assert!(text.contains(decl), "header lacks {decl}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(header())
        .status()
    else {
        eprintln!("no C compiler on PATH; skipped");
        return;
    };
    assert!(status.success());
}

#[test]
fn c_program_links_against_the_static_library() {
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libgreedy_lab_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(header().parent().unwrap())
        .arg(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
    else {
        eprintln!("no C compiler on PATH; skipped");
        return;
    };
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, format!("6 {}\n5 index 13 lies outside the window [1, 12]\n", env!("CARGO_PKG_VERSION")));
}
