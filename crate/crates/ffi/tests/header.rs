use std::path::Path;
use std::process::Command;

#[test]
fn header_declares_the_api_and_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/treeaxes.h")).unwrap();
    for f in ["ta_presentation_parse", "ta_word_parse", "ta_translation_length", "ta_root", "ta_is_primitive", "ta_analyze_json", "ta_string_free", "TA_STATUS_OK"] {
        assert!(header.contains(f), "{f} missing from the header");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"treeaxes.h\"\nint main(void) { TaPresentation *p = 0; return ta_presentation_parse(\"F2\", &p) == TA_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status()
        .expect("a C compiler is installed");
    assert!(status.success());
}
