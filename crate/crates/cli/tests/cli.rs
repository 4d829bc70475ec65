//! Parser round trips and the `sympq` binary: determinism and exit codes.

use std::process::Command;

use proptest::prelude::*;
use rand::Rng;
use serde_json::Value;
use sympq_cli::parser::{parse_form, print_form};
use sympq_core::actions::builtin;
use sympq_core::form::Form;
use sympq_core::poly::Layout;
use sympq_core::random::{self, rng};

fn sympq(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sympq"))
        .args(args)
        .env_remove("SYMPQ_SEED")
        .env("SYMPQ_THREADS", "2")
        .output()
        .expect("run sympq");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_then_parse_is_identity(seed: u64, code in 0u8..5) {
        let l = match code {
            0 => Layout::linear(2),
            1 => Layout::linear(3),
            2 => Layout::linear(4),
            3 => Layout::with_angles(2, 1),
            _ => Layout::with_angles(4, 2),
        };
        let mut r = rng(seed);
        let k = r.gen_range(0..=l.dim());
        let a = random::form(&mut r, l, k, 3, 4);
        let text = print_form(&a);
        let back = parse_form(&text, Some(l), None).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, a);
    }
}

#[test]
fn json_tree_round_trips_through_the_binary() {
    let (code, out) = sympq(&["parse", "--json", "(1/2)*(x1^2 + y1^2)*dx1 /\\ dy1"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let tree = if v.get("form").is_some() { &v["form"] } else { &v };
    let f = Form::from_json(tree).unwrap();
    assert_eq!(f, parse_form("(1/2)*(x1^2 + y1^2)*dx1 /\\ dy1", None, None).unwrap());
}

#[test]
fn reports_are_deterministic_for_a_seed() {
    let args = ["stokes", "--example", "teardrop", "--cases", "2", "--samples", "2000", "--seed", "11", "--json"];
    let (c1, a) = sympq(&args);
    let (c2, b) = sympq(&args);
    assert_eq!(c1, c2);
    assert_eq!(a, b);
    let (_, other) = sympq(&["stokes", "--example", "teardrop", "--cases", "2", "--samples", "2000", "--seed", "12", "--json"]);
    assert_ne!(a, other);
}

#[test]
fn exit_codes() {
    assert_eq!(sympq(&["check-basic", "--example", "cp1", "dx1 /\\ dy1 + dx2 /\\ dy2"]).0, 0);
    assert_eq!(sympq(&["check-basic", "--example", "cp1", "dx1"]).0, 1);
    assert_eq!(sympq(&["suite", "bogus"]).0, 2);
    assert_eq!(sympq(&["parse", "dx1 /\\"]).0, 2);
    assert_eq!(sympq(&["check-basic", "--example", "cp1", "dx9"]).0, 2);
    assert_eq!(sympq(&["pairing", "--example", "nowhere"]).0, 2);
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = std::env::temp_dir().join(format!("sympq-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    let bad = dir.join("bad.json");
    std::fs::write(&good, r#"{"example": "cp1", "samples": 2000, "seed": 5}"#).unwrap();
    std::fs::write(&bad, r#"{"example": "cp1", "smaples": 2000}"#).unwrap();
    assert_eq!(sympq(&["pairing", "--config", good.to_str().unwrap()]).0, 0);
    assert_eq!(sympq(&["pairing", "--config", bad.to_str().unwrap()]).0, 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn builtin_examples_resolve() {
    for name in ["cp1", "teardrop", "cone11", "z3-cone"] {
        assert!(builtin(name, 0).is_ok(), "{name}");
    }
}
