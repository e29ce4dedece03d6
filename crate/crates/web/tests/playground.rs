use eco_core::stdlib::{source, SCENARIO_FIG4_GOLDEN};
use eco_web::{check_json, classify, classify_json, emit_json, examples, run_json};
use serde_json::Value;

#[test]
fn check_reports_positioned_diagnostics() {
    let ok = check_json("class Main { static method main() { } }");
    assert_eq!(ok["ok"], true);
    let bad = check_json("class A extends Missing { }");
    assert_eq!(bad["ok"], false);
    let d = &bad["diagnostics"][0];
    assert_eq!(d["code"], "E001");
    assert_eq!((d["line"].as_u64(), d["file"].as_str()), (Some(1), Some("playground.eco")));
}

#[test]
fn emit_has_header_and_is_stable() {
    let src = source("scenario_fig4.eco").unwrap();
    let a = emit_json(src);
    assert_eq!(a, emit_json(src));
    assert!(a["core"].as_str().unwrap().starts_with("// eco-core v1\n"));
}

#[test]
fn run_links_library_and_matches_golden() {
    let out = run_json(source("scenario_fig4.eco").unwrap(), "main", 10_000_000);
    assert_eq!(out["exit_code"], 0, "{}", out["stderr"]);
    assert_eq!(out["stdout"], SCENARIO_FIG4_GOLDEN);
}

#[test]
fn run_exit_codes() {
    let throw = run_json("class Main { static method main() { throw 1; } }", "main", 1000);
    assert_eq!(throw["exit_code"], 1);
    let spin = run_json("class Main { static method main() { while (true) { } } }", "main", 1000);
    assert_eq!(spin["exit_code"], 2);
    assert!(spin["stderr"].as_str().unwrap().contains("R104"));
    let bad = run_json("class {", "main", 1000);
    assert_eq!(bad["exit_code"], 1);
    assert_eq!(bad["stdout"], "");
}

fn classes(step: &Value) -> Vec<&str> {
    step["state"]["classes"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect()
}

#[test]
fn classify_tracks_connectivity() {
    let r = classify_json("AV\nAV\nAE 0 1\nDE 0\n", &["ConnCompSet"]);
    assert_eq!(r["ok"], true);
    let steps = r["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 5);
    let comps: Vec<i64> = steps.iter().map(|s| s["state"]["components"].as_i64().unwrap()).collect();
    assert_eq!(comps, [0, 1, 2, 1, 2]);
    assert_eq!(classes(&steps[3]), ["Connected"]);
    assert_eq!(classes(&steps[4]), ["NotConnected"]);
}

#[test]
fn classify_reports_vetoes() {
    let mut script = "AV\n".repeat(5);
    for u in 0..5 {
        for v in u + 1..5 {
            script.push_str(&format!("AE {u} {v}\n"));
        }
    }
    let r = classify_json(&script, &["Planar", "ConnCompSet"]);
    let steps = r["steps"].as_array().unwrap();
    let last = steps.last().unwrap();
    assert_eq!(last["outcome"], "rejected");
    assert_eq!(last["state"]["edges"], 9);
    assert_eq!(classes(last), ["Connected", "Planar"]);

    let tri = classify_json("AV\nAV\nAV\nAE 0 1\nAE 1 2\nAE 2 0\n", &["Forest"]);
    assert_eq!(tri["steps"].as_array().unwrap().last().unwrap()["outcome"], "rejected");
}

#[test]
fn classify_input_errors() {
    assert_eq!(classify_json("XX 1", &[])["ok"], false);
    assert_eq!(classify_json("AV", &["Nope"])["ok"], false);
    let unknown = classify_json("DE 4", &[]);
    assert_eq!(unknown["steps"][1]["outcome"], "rejected");
    let parsed: Value = serde_json::from_str(&classify("AV", " ConnCompSet , Planar ")).unwrap();
    assert_eq!(classes(&parsed["steps"][1]), ["Connected", "Planar"]);
}

#[test]
fn examples_lists_corpus() {
    let all: Value = serde_json::from_str(&examples()).unwrap();
    assert_eq!(all.as_array().unwrap().len(), 10);
    assert_eq!(all[0]["name"], "scenario_fig4.eco");
}
