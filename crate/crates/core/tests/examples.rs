//! Every example must run to completion.

use std::process::Command;

#[test]
fn examples_run() {
    let names = [
        "gadget",
        "prf_eval",
        "incremental",
        "defect_report",
        "constrained_prf",
        "updatable_encryption",
        "serialization",
        "bench",
        "selftest",
    ];
    for name in names {
        let out = Command::new(env!("CARGO"))
            .args(["run", "--quiet", "--release", "-p", "kih", "--example", name])
            .output()
            .unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
