use std::fs;
use std::process::{Command, Output};

fn qite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn two_point_scan_writes_curve_traces_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = qite(&["scan", "--cmf", "--r", "1.5,2.0", "--trace", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve = fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 3);
    assert_eq!(curve.lines().next().unwrap(), "R,e_qite,e_exact,fidelity,iterations,flags");
    for r in ["1.5", "2"] {
        let trace = fs::read_to_string(dir.path().join(format!("trace_R{r}.csv"))).unwrap();
        assert_eq!(trace.lines().count(), 6);
        assert!(trace.starts_with("iter,theta_1,theta_2,theta_3,theta_4,theta_5,theta_6,energy,fidelity\n"));
        assert!(dir.path().join(format!("cmf_R{r}.txt")).exists());
    }
    let echo = fs::read_to_string(dir.path().join("manifest.echo")).unwrap();
    assert!(echo.contains("ansatz=he\n"));
    assert!(echo.contains("theta0=0.5,0.5,0.5,0.5,0.5,0.5\n"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let common = ["scan", "--ansatz", "ucc-lih", "--r", "1.0,1.5", "--route", "shots:2000", "--seed", "11", "--trace"];
    let serial_flag = ["--serial"];
    let mut first: Vec<&str> = common.to_vec();
    first.extend(["--out", a.path().to_str().unwrap()]);
    let mut second: Vec<&str> = common.to_vec();
    second.extend(serial_flag);
    second.extend(["--out", b.path().to_str().unwrap()]);
    assert!(qite(&first).status.success());
    assert!(qite(&second).status.success());
    for name in ["curve.csv", "trace_R1.csv", "trace_R1.5.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn manifest_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // hardware-efficient circuit on the raw three-qubit table
    assert_eq!(qite(&["scan", "--r", "1.5", "--out", out]).status.code(), Some(2));
    assert_eq!(qite(&["scan", "--cmf", "--r", "", "--out", out]).status.code(), Some(2));
    assert_eq!(qite(&["scan", "--cmf", "--iters", "0", "--out", out]).status.code(), Some(2));
    assert_eq!(
        qite(&["scan", "--ansatz", "ucc-lih", "--theta0", "1.0", "--out", out]).status.code(),
        Some(2)
    );
    assert_eq!(qite(&["validate", "--table", "/nonexistent.csv"]).status.code(), Some(2));
    assert!(!dir.path().join("curve.csv").exists());
}

#[test]
fn point_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("noz.csv");
    fs::write(&table, "R,II,XX,YY\n0.7,-1.0,0.2,0.1\n").unwrap();
    let out = dir.path().join("out");
    let o = qite(&[
        "scan",
        "--table",
        table.to_str().unwrap(),
        "--ansatz",
        "ucc-h2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let curve = fs::read_to_string(out.join("curve.csv")).unwrap();
    assert!(curve.lines().nth(1).unwrap().ends_with(",error"));
}

#[test]
fn point_matches_the_scan_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = qite(&["point", "--ansatz", "ucc-lih", "--r", "1.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap().to_string();
    let s = qite(&["scan", "--ansatz", "ucc-lih", "--r", "1.5", "--out", dir.path().to_str().unwrap()]);
    assert!(s.status.success());
    assert_eq!(stdout(&s).lines().nth(1).unwrap(), row);
    assert_eq!(text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count(), 1 + 5);
}

#[test]
fn spectrum_validate_and_excited() {
    let s = stdout(&qite(&["spectrum", "--r", "1.5"]));
    assert_eq!(s.lines().count(), 9);
    assert!(s.contains("0,-7.954370068,false"));

    let v = qite(&["validate"]);
    assert!(v.status.success());
    let text = stdout(&v);
    assert!(text.contains("rows=50\n"));
    assert!(text.contains("discontinuities=4.9,5\n"));

    let h2 = stdout(&qite(&["validate", "--table", "bundled:h2-synthetic"]));
    assert!(h2.contains("qubits=2\n"));

    let e = qite(&["excited", "--exact-ground"]);
    assert!(e.status.success());
    let err: f64 = stdout(&e)
        .lines()
        .find_map(|l| l.strip_prefix("error="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(err < 1e-2);
}
