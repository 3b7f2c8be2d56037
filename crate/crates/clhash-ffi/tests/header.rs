//! Keeps the hand-maintained C header honest: every exported symbol must be
//! declared, and the header must parse as plain C when a compiler is around.

use std::path::PathBuf;
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_exported_symbol() {
    let src = std::fs::read_to_string(manifest_dir().join("src/lib.rs")).unwrap();
    let header = std::fs::read_to_string(manifest_dir().join("include/clhash.h")).unwrap();

    let mut exported = Vec::new();
    let mut saw_no_mangle = false;
    for line in src.lines() {
        let line = line.trim();
        if line.starts_with("#[no_mangle]") {
            saw_no_mangle = true;
            continue;
        }
        if saw_no_mangle {
            if let Some(rest) = line
                .strip_prefix("pub extern \"C\" fn ")
                .or_else(|| line.strip_prefix("pub unsafe extern \"C\" fn "))
            {
                let name: String = rest
                    .chars()
                    .take_while(|c| c.is_alphanumeric() || *c == '_')
                    .collect();
                exported.push(name);
                saw_no_mangle = false;
            }
        }
    }
    assert!(exported.len() >= 10, "symbol scan looks broken: {exported:?}");
    for name in &exported {
        assert!(
            header.contains(name),
            "exported symbol {name} missing from include/clhash.h"
        );
    }
}

#[test]
fn header_parses_as_c_when_a_compiler_exists() {
    let compiler = ["cc", "clang", "gcc"].iter().find_map(|c| {
        Command::new(c)
            .arg("--version")
            .output()
            .ok()
            .filter(|o| o.status.success())
            .map(|_| *c)
    });
    let Some(cc) = compiler else {
        eprintln!("no C compiler on PATH; skipping header syntax check");
        return;
    };

    let dir = std::env::temp_dir().join(format!("clhash-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let tu = dir.join("use_header.c");
    std::fs::write(
        &tu,
        "#include \"clhash.h\"\nint main(void) { return (int)clh_key_serialized_size(); }\n",
    )
    .unwrap();

    let include = manifest_dir().join("include");
    let status = Command::new(cc)
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg(format!("-I{}", include.display()))
        .arg(&tu)
        .status()
        .unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    assert!(status.success(), "{cc} rejected include/clhash.h");
}
