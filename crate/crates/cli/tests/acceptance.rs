//! The acceptance suite: every criterion at its stated bounds, one
//! pass/fail line per criterion, plus report determinism for the binary.

use std::process::Command;

use strsem_core::accept::{run_all, Bounds, Status};

#[test]
fn acceptance_criteria() {
    let bounds = Bounds::default();
    let checks = run_all(&bounds);
    let mut failed = Vec::new();
    for check in &checks {
        let status = match check.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        println!("{status} {} - {}", check.name, check.details);
        if check.status == Status::Fail {
            failed.push(check.name.clone());
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
    assert_eq!(checks.len(), 11);
}

#[test]
fn c12_reports_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_strsem");
    let run = |fmt: &str| {
        let output = Command::new(bin)
            .args([
                "verify-thesis",
                "--bound",
                "2",
                "--monoid-bound",
                "3",
                "--depth",
                "2",
                "--seed",
                "7",
                "--format",
                fmt,
            ])
            .output()
            .expect("binary runs");
        assert!(
            output.status.success(),
            "verify-thesis failed: {}",
            String::from_utf8_lossy(&output.stdout)
        );
        output.stdout
    };
    let first = run("text");
    let second = run("text");
    assert_eq!(
        first, second,
        "two runs with identical flags must agree byte for byte"
    );
    println!(
        "PASS C12 determinism - {} bytes, byte-identical across runs",
        first.len()
    );
    let structured = run("structured");
    let text = String::from_utf8(structured).unwrap();
    assert!(text.starts_with('{') && text.trim_end().ends_with('}'));
}

#[test]
fn cli_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_strsem");
    // input error: missing file
    let out = Command::new(bin)
        .args(["validate", "no-such-file.cat"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    // pass: a valid fixture
    let fixture = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/walking_arrow.cat"
    );
    let out = Command::new(bin)
        .args(["validate", fixture])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
}
