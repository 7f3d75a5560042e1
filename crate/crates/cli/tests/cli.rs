use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn lagsurg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lagsurg"))
        .args(args)
        .env_remove("LAGSURG_FIXTURES")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = lagsurg(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    (out.status.code().expect("exit code"), v)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lagsurg-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn exit_codes_follow_verdicts() {
    let (code, v) = json(&["profile-check", "p2xp1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["c1_cubed"], "54");

    let (code, v) = json(&["profile-check", "salvage:2,1,1/100,1,0,+"]);
    assert_eq!(code, 1);
    assert!(v["verdicts"].as_array().unwrap().iter().any(|x| x["outcome"] == "fail"));

    let (code, _) = json(&["profile-check", "does-not-exist"]);
    assert_eq!(code, 2);
    let (code, _) = json(&["surgery", "conifold", "quintic", "--n", "5", "--r", "5"]);
    assert_eq!(code, 1);
    let (code, _) = json(&["surgery", "flop", "quintic"]);
    assert_eq!(code, 2);
}

#[test]
fn no_zero_exit_with_a_failed_verdict() {
    let runs: &[&[&str]] = &[
        &["profile-check", "p2xp1", "--omega", "1,-1"],
        &["profile-check", "quintic"],
        &["profile-check", "salvage:1,1,1/1000,-1,2,+"],
        &["surgery", "an-chain", "--n", "4"],
        &["surgery", "an-chain", "--n", "3"],
        &["surgery", "odp-blowup", "p2xp1"],
        &["surgery", "triple-point", "quintic", "--r", "13"],
        &["monodromy", "e1_four_I3"],
        &["fibre-product", "triple_point", "triple_point", "--rule", "shared-endpoint-disjoint"],
        &["local-models", "--seed", "3", "--samples", "20"],
        &["fano-lookup", "4", "52"],
    ];
    for args in runs {
        let (code, v) = json(args);
        let failed = v["verdicts"].as_array().unwrap().iter().any(|x| x["outcome"] == "fail");
        assert!(code != 0 || !failed, "{args:?}");
        assert_eq!(v["exit_code"], code, "{args:?}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &["local-models", "--seed", "7", "--samples", "30"][..],
        &["fibre-product", "e1_sketch", "e1_sketch"][..],
        &["surgery", "conifold", "quintic", "--n", "130", "--r", "101"][..],
    ] {
        let mut all = vec!["--json"];
        all.extend_from_slice(args);
        let (a, b) = (lagsurg(&all), lagsurg(&all));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = lagsurg(&["--json", "local-models", "--seed", "7", "--samples", "30"]).stdout;
    let b = lagsurg(&["--json", "local-models", "--seed", "8", "--samples", "30"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn monodromy_and_fano_lookup() {
    let (code, v) = json(&["monodromy", "e1_four_I3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["closed"], true);
    assert_eq!(v["results"]["euler"], 12);

    let (_, v) = json(&["fano-lookup", "4", "26"]);
    assert_eq!(v["results"]["found"], true);
}

#[test]
fn file_inputs_and_fixture_override() {
    let dir = scratch("files");
    let word = dir.join("word.json");
    std::fs::write(&word, r#"[{"p":1,"q":0,"e":1},{"p":0,"q":1,"e":1}]"#).unwrap();
    let (code, v) = json(&["monodromy", word.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["results"]["closed"], false);

    // an empty fixtures directory makes every fixture lookup an input error
    let empty = scratch("empty");
    let out = Command::new(env!("CARGO_BIN_EXE_lagsurg"))
        .args(["monodromy", "e1_four_I3"])
        .env("LAGSURG_FIXTURES", &empty)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_output_lists_verdicts() {
    let out = lagsurg(&["monodromy", "e1_four_I3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[   PASS] monodromy_closed"), "{text}");
    assert!(text.contains("exit code 0"));
}
