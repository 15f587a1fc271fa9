use std::path::Path;
use std::process::{Command, Output};

fn cage_lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cage-lab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

const SIM: &str = r#"{"epsilon":[1,1],"omega":6.2831853,"delta":"1/2","case":"wires","spacing":"1/16",
  "X3":"3","source":{"type":"CurrentSheet","a":"5/16","pol":"e1","amp":[1,0]},"tol":1e-8}"#;

#[test]
fn quick_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = cage_lab(dir.path(), &["check", "--seed", "7"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("hardy random profiles") && !stdout.contains("FAIL"));
}

#[test]
fn fdfd_writes_report_field_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("sim.json"), SIM).unwrap();
    let out = cage_lab(dir.path(), &["--out-dir", "run", "fdfd", "--config", "sim.json", "--out", "field.vtk", "--report", "trans.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("run/trans.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "case,delta,pol,incident,transmitted_re,transmitted_im,reflected_re,reflected_im,ratio");
    assert!(lines[1].starts_with("wires,1/2,e1,"));
    let vtk = std::fs::read_to_string(dir.path().join("run/field.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0") && vtk.contains("DIMENSIONS 8 8 97"));
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/manifest.json")).unwrap()).unwrap();
    let listed: Vec<&str> = manifest["outputs"].as_array().unwrap().iter().map(|o| o["path"].as_str().unwrap()).collect();
    assert_eq!(listed, ["trans.csv", "field.vtk"]);
}

#[test]
fn invalid_configs_name_the_problem_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("lossless.json"), SIM.replace("[1,1]", "[1,0]")).unwrap();
    let out = cage_lab(dir.path(), &["fdfd", "--config", "lossless.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("permittivity"));

    std::fs::write(dir.path().join("typo.json"), SIM.replace("\"tol\"", "\"tolerance\"")).unwrap();
    let out = cage_lab(dir.path(), &["fdfd", "--config", "typo.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`tolerance`"));
}

#[test]
fn homog_prints_coefficients_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = cage_lab(dir.path(), &["homog", "--case", "wires", "--pol", "e1", "--omega", "6.2831853", "--eps", "1,1"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("R = -1 +0i") && stdout.contains("T = 0 +0i"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("out/homog.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "wires,0,e1,1,0,0,-1,0,0");
}

#[test]
fn sweep_rejects_unsorted_deltas_and_oversized_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let out = cage_lab(dir.path(), &["sweep", "--case", "mesh", "--deltas", "1/4,1/2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("decreasing"));
    let out = cage_lab(dir.path(), &["sweep", "--case", "mesh", "--deltas", "1/2", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn cell_reports_the_basis() {
    let dir = tempfile::tempdir().unwrap();
    let out = cage_lab(dir.path(), &["cell", "--case", "mesh", "--space", "KT", "--n", "8", "--l", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("out/basis_KT_mesh.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "kind,limit+,limit-,dimension,gram_condition,decay_rate");
    assert_eq!(lines.len(), 6);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!((fields[0], fields[3]), ("q1+", "5"));
    let vec3 = |f: &str| f.split(' ').map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>();
    let close = |got: Vec<f64>, want: [f64; 3]| got.iter().zip(want).all(|(g, w)| (g - w).abs() < 1e-12);
    assert!(close(vec3(fields[1]), [1.0, 0.0, 0.0]) && close(vec3(fields[2]), [0.0; 3]), "{}", lines[1]);
}
