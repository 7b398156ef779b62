use std::process::{Command, Output};

fn cfdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfdim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn measure_prints_exact_lengths() {
    let o = cfdim(&["measure", "--cf", "2,3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1/63");
    let g = cfdim(&["measure", "--cf", "1", "--gauss"]);
    assert!(stdout(&g).contains("@ 128"));
}

#[test]
fn encode_decode_divide() {
    let e: serde_json::Value = serde_json::from_slice(&cfdim(&["encode", "--cf", "2"]).stdout).unwrap();
    assert_eq!(e["base"], "011");
    let code = e["code"].as_str().unwrap().to_string();
    let d: serde_json::Value = serde_json::from_slice(&cfdim(&["decode", &code]).stdout).unwrap();
    assert_eq!(d["word"], "[2]");
    let v: serde_json::Value = serde_json::from_slice(&cfdim(&["divide", "01"]).stdout).unwrap();
    assert_eq!(v["parts"].as_array().unwrap().len(), 1);
    assert_eq!(v["parts"][0]["lebesgue"], "1/4");
}

#[test]
fn errors_exit_with_two() {
    let o = cfdim(&["verify", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(cfdim(&["measure", "--cf", "1,x"]).status.code(), Some(2));
    assert_eq!(cfdim(&["walk", "--s-gale", "other"]).status.code(), Some(2));
}

#[test]
fn quick_verify_is_byte_identical() {
    let args = ["verify", "divide", "--quick", "--seed", "3", "--format", "csv"];
    let a = cfdim(&args);
    let b = cfdim(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("claim_id,anchor,status,lo,hi,ms"));
    assert!(text.lines().skip(1).all(|l| l.contains(",proved,")));
}

#[test]
fn walk_picks_the_first_digits() {
    let o = cfdim(&["walk", "--depth", "2"]);
    assert!(o.status.success());
    let w: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = w.to_string();
    assert!(s.contains("1131371"), "{s}");
}
