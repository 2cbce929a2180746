use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitnest")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("orbitnest-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn field_report() {
    let out = run(&["field", "--q", "3", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["size"], 6561);
    assert_eq!(v["modulus_irreducible"], true);

    let out = run(&["field", "--q", "2", "--n", "18"]);
    let degrees: Vec<u64> = json(&out)["subfields"].as_array().unwrap().iter().map(|s| s["degree"].as_u64().unwrap()).collect();
    assert_eq!(degrees, [1, 2, 3, 6, 9, 18]);

    let out = run(&["field", "--q", "6", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prime"));
}

#[test]
fn construct_and_verify_round_trip() {
    let path = scratch("rrt.json");
    let p = path.to_str().unwrap();
    let out = run(&["construct", "--q", "3", "--k", "2", "--family", "rrt", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let art: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(art["reps"].as_array().unwrap().len(), 1);
    assert_eq!(art["predicted_size"], "40");

    let out = run(&["verify", "--artifact", p]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    assert!(checks.iter().all(|c| c["passed"] == true && c["mode"] == "exhaustive"));

    std::fs::write(&path, "{\"field\": 1}").unwrap();
    assert_eq!(run(&["verify", "--artifact", p]).status.code(), Some(2));
}

#[test]
fn zhang_artifact_has_four_orbits() {
    let out = run(&["construct", "--q", "2", "--k", "2", "--family", "zhang", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["reps"].as_array().unwrap().len(), 4);
}

#[test]
fn guard_violations_exit_two() {
    let out = run(&["construct", "--q", "2", "--k", "2", "--family", "mixed", "--e", "1", "--blocks", "3:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("too small"));
    let out = run(&["construct", "--q", "3", "--k", "2", "--family", "zhang", "--p", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["construct", "--q", "3", "--k", "2", "--family", "nope"]).status.code(), Some(2));
}

#[test]
fn spread_fails_sidon_with_witness() {
    let out = run(&["verify", "--q", "3", "--k", "2", "--family", "spread", "--r", "2", "--checks", "sidon,distance"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let sidon = &report["checks"][0];
    assert_eq!(sidon["passed"], false);
    assert_eq!(sidon["witnesses"][0]["dim"], 2);
    assert_eq!(report["checks"][1]["measured"], "4");
}

#[test]
fn sampled_mode_records_seed() {
    let args = ["verify", "--q", "3", "--k", "2", "--family", "nested2e", "--e", "2", "--checks", "distance", "--mode", "sampled:200000"];
    assert_eq!(run(&args).status.code(), Some(2), "seed is required");
    let mut with_seed = args.to_vec();
    with_seed.extend(["--seed", "42"]);
    let out = run(&with_seed);
    assert_eq!(out.status.code(), Some(0));
    let rec = &json(&out)["checks"][0];
    assert_eq!(rec["mode"], "sampled");
    assert_eq!(rec["seed"], 42);
    assert_eq!(rec["samples"], 200000);
    assert!(rec["measured"].as_str().unwrap().starts_with("no violation in 200000 samples"));
    assert_eq!(run(&["verify", "--q", "3", "--k", "2", "--family", "rrt", "--mode", "sampled"]).status.code(), Some(2));
}

#[test]
fn bound_and_compare() {
    let out = run(&["bound", "--q", "3", "--n", "8", "--d", "2", "--k", "2"]);
    assert_eq!(json(&out)["johnson"], "896260");
    assert_eq!(run(&["bound", "--q", "3", "--n", "8", "--d", "3", "--k", "2"]).status.code(), Some(2));

    let out = run(&["compare", "--q", "3", "--k", "2..3", "--family", "nested2e", "--e", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    let ratio = |r: &[&str]| r[6].parse::<f64>().unwrap();
    assert!(ratio(&rows[0]) < ratio(&rows[1]));
    for r in &rows {
        let size: u128 = r[4].parse().unwrap();
        let j: u128 = r[5].parse().unwrap();
        assert!(size <= j);
    }

    let out = run(&["compare", "--q", "2,3", "--k", "2,3", "--r", "8,9,27", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["dominates_s3"] == true));
}
