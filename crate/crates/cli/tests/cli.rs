use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use geninv_cli::{read_matrix, MatrixFile};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geninv"))
}

fn write(dir: &Path, name: &str, rows: &[&[f64]]) -> PathBuf {
    let data: Vec<Vec<[f64; 2]>> = rows.iter().map(|r| r.iter().map(|&x| [x, 0.0]).collect()).collect();
    let f = MatrixFile {
        rows: rows.len(),
        cols: rows[0].len(),
        data,
    };
    let p = dir.join(name);
    fs::write(&p, f.to_json()).unwrap();
    p
}

fn a1(dir: &Path) -> PathBuf {
    write(dir, "A1.json", &[&[2.0, 0.0, 1.0], &[0.0, 0.0, 2.0], &[0.0, 0.0, 0.0]])
}

fn a3(dir: &Path) -> PathBuf {
    write(dir, "A3.json", &[&[2.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[2.0, 2.0, 0.0]])
}

fn b3(dir: &Path) -> PathBuf {
    write(dir, "B3.json", &[&[2.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 0.0, 1.0]])
}

fn run(cmd: &mut Command) -> (i32, Value, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    let v = serde_json::from_slice(&stdout).unwrap_or(Value::Null);
    (status.code().unwrap(), v, String::from_utf8_lossy(&stderr).into_owned())
}

fn assert_entries(path: &Path, expected: &[&[f64]]) {
    let m = read_matrix(path).unwrap();
    for (i, row) in expected.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let z = m.get(i, j);
            assert!((z.re - x).abs() <= 1e-10 && z.im.abs() <= 1e-10, "entry ({i},{j}) = {z}, expected {x}");
        }
    }
}

#[test]
fn compute_drazin_of_a1() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("ad.json");
    let (code, v, _) = run(bin().args(["compute", "--which", "drazin", "-i"]).arg(a1(d.path())).arg("-o").arg(&out));
    assert_eq!(code, 0);
    assert_eq!(v["index"], 2);
    assert_entries(&out, &[&[0.5, 0.0, 0.25], &[0.0; 3], &[0.0; 3]]);
    let side: Value = serde_json::from_str(&fs::read_to_string(d.path().join("ad.residuals.json")).unwrap()).unwrap();
    for (_, r) in side["residuals"].as_object().unwrap() {
        assert!(r.as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn compute_dmp_of_a3() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("dmp.json");
    let (code, _, _) = run(bin().args(["compute", "--which", "dmp", "-i"]).arg(a3(d.path())).arg("-o").arg(&out));
    assert_eq!(code, 0);
    assert_entries(&out, &[&[0.5, 0.0, 0.0], &[0.0; 3], &[0.5, 0.0, 0.0]]);
}

#[test]
fn compute_to_stdout_embeds_result() {
    let d = TempDir::new().unwrap();
    let (code, v, _) = run(bin().args(["compute", "--which", "mp", "-i"]).arg(a1(d.path())));
    assert_eq!(code, 0);
    assert_eq!(v["result"]["rows"], 3);
    assert_eq!(v["residuals"].as_object().unwrap().len(), 4);
}

#[test]
fn every_inverse_name_is_accepted() {
    let d = TempDir::new().unwrap();
    let a = a3(d.path());
    for w in ["mp", "drazin", "dmp", "mpd", "cmp", "mpdmp", "core-ep", "cce"] {
        let (code, v, err) = run(bin().args(["compute", "--which", w, "-i"]).arg(&a));
        assert_eq!(code, 0, "{w}: {err}");
        assert_eq!(v["which"], w);
    }
}

#[test]
fn group_inverse_of_index_two_is_precondition_failure() {
    let d = TempDir::new().unwrap();
    let (code, _, err) = run(bin().args(["compute", "--which", "group", "-i"]).arg(a1(d.path())));
    assert_eq!(code, 3);
    assert!(err.contains("index"), "{err}");
}

#[test]
fn malformed_input_exits_2() {
    let d = TempDir::new().unwrap();
    let p = d.path().join("bad.json");
    fs::write(&p, r#"{"rows":2,"cols":2,"data":[[[1,0]]]}"#).unwrap();
    let (code, _, _) = run(bin().args(["compute", "--which", "mp", "-i"]).arg(&p));
    assert_eq!(code, 2);
    fs::write(&p, "not json").unwrap();
    let (code, _, _) = run(bin().args(["classify", "-i"]).arg(&p));
    assert_eq!(code, 2);
    let (code, _, _) = run(bin().args(["compute", "--which", "bogus", "-i"]).arg(&p));
    assert_eq!(code, 2);
}

#[test]
fn invalid_tolerance_exits_2() {
    let d = TempDir::new().unwrap();
    let (code, _, _) = run(bin().args(["--tol-abs", "-1", "classify", "-i"]).arg(a1(d.path())));
    assert_eq!(code, 2);
}

#[test]
fn classify_fixtures() {
    let d = TempDir::new().unwrap();
    let (code, v, _) = run(bin().args(["classify", "-i"]).arg(a1(d.path())));
    assert_eq!(code, 0);
    assert_eq!(v["index"], 2);
    assert_eq!(v["is_core_ep"]["holds"], false);
    assert_eq!(v["core_ep_conditions"].as_array().unwrap().len(), 7);

    let id = write(d.path(), "I.json", &[&[1.0, 0.0], &[0.0, 1.0]]);
    let (_, v, _) = run(bin().args(["classify", "-i"]).arg(id));
    assert_eq!(v["is_ep"]["holds"], true);
    assert_eq!(v["index"], 0);

    let (_, v, _) = run(bin().args(["classify", "-i"]).arg(a3(d.path())));
    assert_eq!(v["is_k_ep"]["holds"], false);
}

#[test]
fn classify_rectangular_exits_4() {
    let d = TempDir::new().unwrap();
    let r = write(d.path(), "R.json", &[&[1.0, 2.0, 3.0]]);
    let (code, _, _) = run(bin().args(["classify", "-i"]).arg(r));
    assert_eq!(code, 4);
}

fn holds(v: &Value) -> Vec<(String, bool)> {
    v.as_object()
        .unwrap()
        .iter()
        .map(|(k, r)| (k.clone(), r["holds"].as_bool().unwrap()))
        .collect()
}

#[test]
fn order_a3_b3_pattern() {
    let d = TempDir::new().unwrap();
    let (code, v, _) = run(bin().args(["order", "--relation", "all", "--a"]).arg(a3(d.path())).arg("--b").arg(b3(d.path())));
    assert_eq!(code, 0);
    let mut h = holds(&v);
    h.sort();
    let expected = [("cmp", false), ("dmp", true), ("drazin", true), ("mpd", false)];
    assert_eq!(h, expected.map(|(k, b)| (k.to_string(), b)).to_vec());
}

#[test]
fn order_a1_below_its_core_part() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("ad.json");
    let a = a1(d.path());
    run(bin().args(["compute", "--which", "drazin", "-i"]).arg(&a).arg("-o").arg(&out));
    let ad = read_matrix(&out).unwrap();
    let m = read_matrix(&a).unwrap();
    let core = &(&m * &ad) * &m;
    let c = d.path().join("Ac.json");
    fs::write(&c, MatrixFile::from_matrix(&core).to_json()).unwrap();
    let (code, v, _) = run(bin().args(["order", "--a"]).arg(&a).arg("--b").arg(&c));
    assert_eq!(code, 0);
    assert!(holds(&v).iter().all(|(_, b)| *b));
}

#[test]
fn order_single_relation_is_deterministic() {
    let d = TempDir::new().unwrap();
    let a = a1(d.path());
    let b = write(d.path(), "A2.json", &[&[1.0, 0.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
    let first = run(bin().args(["order", "--relation", "drazin", "--a"]).arg(&a).arg("--b").arg(&b));
    let second = run(bin().args(["order", "--relation", "drazin", "--a"]).arg(&a).arg("--b").arg(&b));
    assert_eq!(first.0, 0);
    assert_eq!(first.1, second.1);
    assert_eq!(first.1.as_object().unwrap().len(), 1);
    assert!(first.1["drazin"]["left_residual"].is_f64());
}

#[test]
fn order_size_mismatch_exits_4() {
    let d = TempDir::new().unwrap();
    let i2 = write(d.path(), "I.json", &[&[1.0, 0.0], &[0.0, 1.0]]);
    let (code, _, _) = run(bin().args(["order", "--a"]).arg(a1(d.path())).arg("--b").arg(i2));
    assert_eq!(code, 4);
}

#[test]
fn verify_examples() {
    let (code, v, _) = run(bin().args(["verify", "--suite", "ew2", "--size", "6", "--count", "200", "--seed", "42"]));
    assert_eq!(code, 0);
    assert_eq!(v["samples"], 200);
    assert_eq!(v["failures"], 0);

    let (code, v, _) = run(bin().args(["verify", "--suite", "core_ep_equiv", "--class", "core_ep", "--count", "50"]));
    assert_eq!(code, 0, "{v}");

    let (code, _, _) = run(bin().args(["verify", "--suite", "nonsense"]));
    assert_eq!(code, 5);
}

#[test]
fn verify_seed_from_environment() {
    let args = ["verify", "--suite", "penrose_drazin", "--size", "4", "--count", "5"];
    let (_, a, _) = run(bin().args(args).env("GENINV_SEED", "7"));
    let (_, b, _) = run(bin().args(args).arg("--seed").arg("7").env_remove("GENINV_SEED"));
    assert_eq!(a, b);
}

#[test]
fn verify_class_list_and_bad_class() {
    let (code, v, _) = run(bin().args(["verify", "--suite", "ew2", "--size", "4", "--count", "10", "--class", "generic,nilpotent"]));
    assert_eq!(code, 0);
    assert_eq!(v["samples"], 20);
    let (code, _, _) = run(bin().args(["verify", "--suite", "ew2", "--class", "wobbly"]));
    assert_eq!(code, 2);
}

#[test]
fn hs_writes_blocks() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("hs");
    let (code, v, _) = run(bin().args(["hs", "-i"]).arg(a1(d.path())).arg("-o").arg(&out));
    assert_eq!(code, 0);
    assert!(v["residuals"]["reconstruction"].as_f64().unwrap() <= 1e-10);
    for name in ["U", "Sigma", "Q", "P", "q_hat", "sigma_tilde", "q_tilde", "delta", "delta_hat", "delta_tilde"] {
        assert!(out.join(format!("{name}.json")).exists(), "{name}");
    }
    let (_, v, _) = run(bin().args(["hs", "-i"]).arg(a3(d.path())).arg("-o").arg(&out));
    assert!(v["residuals"]["unitarity"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn hs_of_zero_matrix_exits_3() {
    let d = TempDir::new().unwrap();
    let z = write(d.path(), "Z.json", &[&[0.0, 0.0], &[0.0, 0.0]]);
    let (code, _, _) = run(bin().args(["hs", "-i"]).arg(z).arg("-o").arg(d.path().join("hz")));
    assert_eq!(code, 3);
}

#[test]
fn pretty_output_is_indented() {
    let d = TempDir::new().unwrap();
    let out = bin().args(["--pretty", "classify", "-i"]).arg(a1(d.path())).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("\n  \""));
}
