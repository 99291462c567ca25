use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fano(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fano"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("fano-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn reports(out: &Output) -> Vec<Value> {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn gen_then_discriminant() {
    let d = scratch("disc");
    let z = d.join("z.json");
    let z = z.to_str().unwrap();
    assert!(fano(&["gen", "--k", "1", "--seed", "42", "--out", z])
        .status
        .success());
    let out = fano(&["check", "discriminant", z]);
    assert_eq!(out.status.code(), Some(0));
    let r = &reports(&out)[0];
    assert_eq!(r["claim"], "discriminant-order");
    assert!(r["details"]["orders"]
        .as_array()
        .unwrap()
        .iter()
        .all(|o| o == 3));
}

#[test]
fn reports_are_reproducible_apart_from_wall_time() {
    let d = scratch("repro");
    let z = d.join("z.json");
    let z = z.to_str().unwrap();
    fano(&["gen", "--k", "1", "--seed", "9", "--out", z]);
    let strip = |o: &Output| {
        let mut v = reports(o);
        for r in &mut v {
            r.as_object_mut().unwrap().remove("wall_time_ms");
        }
        serde_json::to_string(&v).unwrap()
    };
    let a = fano(&["conic", "partner", z, "--trials", "4", "--seed", "7"]);
    let b = fano(&["conic", "partner", z, "--trials", "4", "--seed", "7"]);
    assert_eq!(strip(&a), strip(&b));
    let c = fano(&["conic", "partner", z, "--trials", "4", "--seed", "8"]);
    assert_ne!(strip(&a), strip(&c));
}

#[test]
fn out_directory_gets_reports_and_summary() {
    let d = scratch("outdir");
    let out = fano(&["bott", "hodge", "--out", d.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(d.join("summary.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("hodge,"));
    let r: Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("hodge.json")).unwrap()).unwrap();
    let entries = r["details"]["entries"].as_array().unwrap();
    let h = |p: u64, q: u64| {
        entries.iter().find(|e| e["p"] == p && e["q"] == q).unwrap()["value"].clone()
    };
    assert_eq!(h(3, 1), 1);
    assert_eq!(h(2, 2), 22);
}

#[test]
fn failing_expectation_exits_nonzero() {
    let ok = fano(&["bott", "chi", "--bundle", "Omega2_G(-3)", "--expect", "-5"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = fano(&["bott", "chi", "--bundle", "Omega2_G(-3)", "--expect", "4"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(
        fano(&["tangent", "conic", "--k", "3"]).status.code(),
        Some(2)
    );
    let d = scratch("bad");
    let p = d.join("bad.json");
    std::fs::write(&p, "{not json").unwrap();
    assert_eq!(
        fano(&["check", "discriminant", p.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let x = d.join("x.json");
    fano(&["gen", "--k", "0", "--out", x.to_str().unwrap()]);
    // conics are only sampled on k = 1 instances
    assert_eq!(
        fano(&["conic", "kappa", x.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn csv_format() {
    let out = fano(&["tangent", "double-line", "--kind", "rho", "--format", "csv"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        s.lines().next().unwrap(),
        "claim,instance_digest,seed,trials,passes,failures,status"
    );
    assert_eq!(
        s.lines().nth(1).unwrap(),
        "tangent-double-line,,0,2,2,0,pass"
    );
}
