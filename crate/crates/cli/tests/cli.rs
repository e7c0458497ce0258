use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn schemmel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schemmel")).args(args).env_remove("SCHEMMEL_CACHE_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_both_methods() {
    for method in ["formula", "count"] {
        let o = schemmel(&["eval", "--r", "2", "--n", "105", "--method", method]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o), "15\n");
    }
}

#[test]
fn jacobsthal_json() {
    let o = schemmel(&["jacobsthal", "--r", "5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["r"], 5);
    assert_eq!(v["modulus"], 30);
    assert_eq!(v["J_r"], 6);
    assert_eq!(v["witness_start"], 1);
}

#[test]
fn enumerate_json_lines() {
    let o = schemmel(&["enumerate", "--r", "1", "--upto", "30"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let ns: Vec<u64> = lines.iter().map(|v| v["n"].as_u64().unwrap()).collect();
    assert_eq!(ns, [2, 6, 12, 18, 30]);
    assert_eq!(lines[4]["factors"], serde_json::json!([[2, 1], [3, 1], [5, 1]]));
    assert_eq!(lines[4]["s_r"], 8);
    assert!(lines.iter().all(|v| v.get("degenerate").is_none() && v["horizon"].as_u64().unwrap() >= 30));
}

#[test]
fn degenerate_one_is_flagged() {
    let o = schemmel(&["enumerate", "--r", "3", "--upto", "10"]);
    let first: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(first["n"], 1);
    assert_eq!(first["degenerate"], true);
}

#[test]
fn output_independent_of_threads() {
    let a = schemmel(&["enumerate", "--r", "2", "--upto", "200000", "--threads", "1"]);
    let b = schemmel(&["enumerate", "--r", "2", "--upto", "200000", "--threads", "4", "--segment-len", "65536"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn membership_queries() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&schemmel(&["is-member", "--n", "9", "--r", "2"]))).unwrap();
    assert_eq!((v["member"].as_bool(), v["refuter"].as_u64()), (Some(false), Some(15)));
    let v: serde_json::Value = serde_json::from_str(&stdout(&schemmel(&["is-member", "--n", "4", "--r", "1"]))).unwrap();
    assert_eq!(v["refuter"], 6);
    let v: serde_json::Value = serde_json::from_str(&stdout(&schemmel(&["is-member", "--n", "2", "--r", "1"]))).unwrap();
    assert_eq!(v["member"], true);
    let v: serde_json::Value = serde_json::from_str(&stdout(&schemmel(&["is-member", "--n", "10", "--r", "2"]))).unwrap();
    assert_eq!(v["reason"], "not_in_class");
}

#[test]
fn construct_valid_and_invalid() {
    let o = schemmel(&["construct", "--r", "1", "--k", "3", "--ell", "1", "--d", "1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // 2 * 3 * p_4
    assert_eq!(v["n"], 42);
    let o = schemmel(&["construct", "--r", "3", "--k", "2", "--d", "2"]);
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("below b(r) + 2"));
}

#[test]
fn family_lines() {
    let o = schemmel(&["construct-family", "--r", "1", "--k-max", "6"]);
    let ks: Vec<u64> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["k"].as_u64().unwrap())
        .collect();
    assert_eq!(ks, [2, 3, 4, 5, 6]);
}

#[test]
fn lambda_root_json() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&schemmel(&["lambda", "--r", "1", "--k", "2"]))).unwrap();
    assert!((v["value"].as_f64().unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    assert_eq!(code(&schemmel(&["lambda", "--r", "1", "--k", "1"])), 64);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&schemmel(&["--help"])), 0);
    assert_eq!(code(&schemmel(&["--version"])), 0);
    assert_eq!(code(&schemmel(&[])), 64);
    assert_eq!(code(&schemmel(&["frobnicate"])), 64);
    assert_eq!(code(&schemmel(&["eval", "--r", "1", "--n", "5", "--bogus", "1"])), 64);
    assert_eq!(code(&schemmel(&["eval", "--r", "0", "--n", "5"])), 64);
    assert_eq!(code(&schemmel(&["sieve", "--r", "1", "--lo", "10", "--hi", "5"])), 64);
    assert_eq!(code(&schemmel(&["jacobsthal", "--r", "31"])), 64);
    let o = schemmel(&["enumerate", "--r", "1", "--upto", "1000", "--horizon-cap", "1000"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("inconclusive"));
}

#[test]
fn verify_passes() {
    let o = schemmel(&["verify", "--r", "2", "--upto", "100000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["prime_power_structure"]["prime_members"], serde_json::json!([3]));
    assert_eq!(v["conjectures"]["prime_squares"], serde_json::json!([]));
}

#[test]
fn report_csv_with_manifest_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ratios.csv");
    let o = schemmel(&["report", "--r", "1", "--upto", "10000", "--K", "2", "--L", "1", "--out", path_str(&csv)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,log_n,omega,P1,Q1,ratio_p1_logn,ratio_qL_logn,ratio_pK_logn,ratio_p1_log2n"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!((first[0], first[2], first[3], first[4], first[7]), ("2", "1", "2", "3", "NA"));

    let manifest_path = dir.path().join("ratios.csv.manifest.json");
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(m["command"], "report");
    assert_eq!(m["parameters"]["K"], "2");
    assert_eq!(m["parameters"]["threads"], "1");
    assert_eq!(m["prime_table_limit"], 1u64 << 32);

    let o = schemmel(&["replay", "--manifest", path_str(&manifest_path)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reproduced"], true);

    // a tampered digest is caught
    let tampered = fs::read_to_string(&manifest_path).unwrap().replacen("\"sha256\": \"", "\"sha256\": \"00", 1);
    fs::write(&manifest_path, tampered).unwrap();
    let o = schemmel(&["replay", "--manifest", path_str(&manifest_path)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn enumerate_manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.jsonl");
    let o = schemmel(&["enumerate", "--r", "2", "--upto", "5000", "--format", "csv", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let manifest = dir.path().join("f2.jsonl.manifest.json");
    let o = schemmel(&["replay", "--manifest", path_str(&manifest)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn sieve_cache_round_trip_and_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_schemmel"))
            .args(["sieve", "--r", "2", "--lo", "1", "--hi", "1000"])
            .env("SCHEMMEL_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let fresh = schemmel(&["sieve", "--r", "2", "--lo", "1", "--hi", "1000"]);
    let first = run();
    let cache_file = dir.path().join("sr-r2-1-1000.bin");
    assert!(cache_file.exists());
    let second = run();
    assert_eq!(first.stdout, fresh.stdout);
    assert_eq!(second.stdout, fresh.stdout);
    assert!(second.stderr.is_empty());

    let bytes = fs::read(&cache_file).unwrap();
    fs::write(&cache_file, &bytes[..bytes.len() / 2]).unwrap();
    let third = run();
    assert_eq!(code(&third), 0);
    assert_eq!(third.stdout, fresh.stdout);
    assert!(String::from_utf8_lossy(&third.stderr).contains("cache invalid"));
    // rewritten after recovery
    assert_eq!(fs::read(&cache_file).unwrap(), bytes);

    let line = stdout(&fresh).lines().nth(104).unwrap().to_string();
    assert_eq!(line, r#"{"n":105,"s_r":15}"#);
}
