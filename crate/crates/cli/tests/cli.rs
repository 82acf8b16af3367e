use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cr-atlas"))
        .args(args)
        .env_remove("CR_ATLAS_SEED")
        .output()
        .expect("binary runs")
}

fn doc(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is one JSON document")
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12
}

#[test]
fn eval_rossi_mu_base_point() {
    let o = run(&["eval", "PhiMu", "[[1,0],[0,0]]"]);
    assert_eq!(o.status.code(), Some(0));
    let d = doc(&o);
    assert_eq!(d["schema"], "cr-atlas/1");
    let out = &d["result"]["output"];
    assert!(close(c(&out[0]), (0.0, -1.0)) && close(c(&out[1]), (1.0, 0.0)) && close(c(&out[2]), (1.0, 0.0)));
    assert_eq!(d["result"]["residuals"]["q_plus"].as_f64(), Some(0.0));
}

#[test]
fn eval_pipeline_lands_on_nu() {
    for p in ["PsiNu∘PhiMinus", r#"["PsiNu","PhiMinus"]"#] {
        let o = run(&["eval", p, "[[0.8,0],[0,0]]"]);
        assert_eq!(o.status.code(), Some(0));
        let r = &doc(&o)["result"];
        assert!(close(c(&r["output"][0]), (0.64, 0.0)) && close(c(&r["output"][1]), (0.0, 0.64)));
        let alpha = r["residuals"]["surface"]["alpha"].as_f64().unwrap();
        assert!((alpha - (2.0 * 0.8f64.powi(4) - 1.0)).abs() < 1e-12);
        assert_eq!(r["residuals"]["surface"]["membership"]["side"], "on");
    }
}

#[test]
fn eval_lambda_at_origin() {
    let r = doc(&run(&["eval", "Lambda", "[[0,0],[0,0]]"]))["result"].clone();
    assert!(close(c(&r["output"][0]), (1.0, 0.0)) && close(c(&r["output"][1]), (0.0, 0.0)));
}

#[test]
fn domain_errors_exit_2_naming_the_guard() {
    let o = run(&["eval", "PhiMinus", "[[1,0],[1,0]]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("null cone"));
    assert!(doc(&o)["error"].as_str().unwrap().contains("null cone"));
    assert_eq!(run(&["eval", "Bogus", "[[1,0],[0,0]]"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn classify_examples() {
    let d = doc(&run(&["classify", "[[0,0],[1,0],[0,0]]"]));
    assert_eq!(d["result"]["region"], "O2");
    // Φ(0.5, 0) and Φ(2, 0)
    let nu = run(&["eval", "PhiMinus", "[[0.5,0],[0,0]]"]);
    let z = serde_json::to_string(&doc(&nu)["result"]["output"]).unwrap();
    assert_eq!(doc(&run(&["classify", &z]))["result"]["region"], "SigmaNu");
    let eta = run(&["eval", "PhiMinus", "[[2,0],[0,0]]"]);
    let z = serde_json::to_string(&doc(&eta)["result"]["output"]).unwrap();
    assert_eq!(doc(&run(&["classify", &z]))["result"]["region"], "SigmaEta");
    assert_eq!(run(&["classify", "[[1,0],[1,0],[0,0]]"]).status.code(), Some(2));
}

#[test]
fn sheets_examples() {
    let card = |args: &[&str]| doc(&run(args))["result"]["cardinality"].clone();
    assert_eq!(card(&["sheets", "mu", "4", "--alpha", "3"]), 4);
    assert_eq!(card(&["sheets", "nu", "5", "--alpha", "0.5"]), 5);
    assert_eq!(card(&["sheets", "eta", "inf", "--alpha", "3"]), "INFINITE");
    assert_eq!(card(&["sheets", "chi", "3"]), 3);
    assert_eq!(run(&["sheets", "nu", "5"]).status.code(), Some(2));
}

#[test]
fn verify_homomorphism_passes() {
    let o = run(&["verify", "homomorphism", "--samples", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &doc(&o)["result"];
    assert_eq!(r["passed"], true);
    assert!(r["max_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_decks_and_levi() {
    let r = doc(&run(&["verify", "decks", "--samples", "200"]))["result"].clone();
    let f_mu = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "f_mu_order_four").unwrap().clone();
    assert_eq!(f_mu["passed"], true);
    let r = doc(&run(&["verify", "levi", "--samples", "100"]))["result"].clone();
    for c in r["checks"].as_array().unwrap() {
        if c["name"].as_str().unwrap().starts_with("levi_positive") {
            assert!(c["min_value"].as_f64().unwrap() > 0.0);
        }
    }
}

#[test]
fn output_is_deterministic_and_seeded() {
    let a = run(&["verify", "orbits", "--samples", "100", "--seed", "7"]);
    let b = run(&["verify", "orbits", "--samples", "100", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(doc(&a)["seed"], 7);
    let env = Command::new(env!("CARGO_BIN_EXE_cr-atlas"))
        .args(["verify", "orbits", "--samples", "100"])
        .env("CR_ATLAS_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
    let other = run(&["verify", "orbits", "--samples", "100", "--seed", "8"]);
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn out_file_and_compact_json() {
    let dir = std::env::temp_dir().join(format!("cr-atlas-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let o = run(&["sample", "chi", "--count", "3", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(o.stdout.iter().filter(|&&b| b == b'\n').count(), 1);
    assert_eq!(std::fs::read(&path).unwrap(), o.stdout);
    let d = doc(&o);
    assert_eq!(d["result"]["points"].as_array().unwrap().len(), 3);
    std::fs::remove_dir_all(&dir).ok();
}
