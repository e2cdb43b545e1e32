//! Each file in `tests/golden` starts with an `args:` line; the rest is the
//! expected exit code, stdout and stderr of `qalg` run with those arguments
//! from `tests/data`. `UPDATE_GOLDEN=1` rewrites the expectations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn render(args: &str, code: i32, stdout: &str, stderr: &str) -> String {
    format!("args: {args}\nexit: {code}\n--- stdout\n{stdout}--- stderr\n{stderr}")
}

fn cases() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir("golden"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    v.sort();
    v
}

#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for path in cases() {
        let text = fs::read_to_string(&path).unwrap();
        let args = text.lines().next().and_then(|l| l.strip_prefix("args: ")).unwrap_or_else(|| {
            panic!("{} does not start with `args:`", path.display())
        });
        let out = Command::new(env!("CARGO_BIN_EXE_qalg"))
            .args(args.split_whitespace())
            .current_dir(dir("data"))
            .output()
            .unwrap();
        let actual = render(
            args,
            out.status.code().unwrap_or(-1),
            &String::from_utf8_lossy(&out.stdout),
            &String::from_utf8_lossy(&out.stderr),
        );
        if update {
            fs::write(&path, &actual).unwrap();
        } else if actual != text {
            failures.push(format!("{}:\n{actual}", path.display()));
        }
    }
    assert!(failures.is_empty(), "{} golden mismatches\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn every_command_has_each_exit_code() {
    let mut seen = std::collections::BTreeSet::new();
    for path in cases() {
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        let command = lines.next().unwrap()["args: ".len()..].split_whitespace().next().unwrap().to_string();
        let code = lines.next().unwrap().trim_start_matches("exit: ").to_string();
        seen.insert((command, code));
    }
    for c in qalg::commands::COMMANDS {
        for code in ["0", "1", "2"] {
            assert!(seen.contains(&(c.to_string(), code.to_string())), "no golden case for {c} exiting {code}");
        }
    }
}
