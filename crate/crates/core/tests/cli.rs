use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn opthedge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opthedge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<_> = ["a", "b"]
        .iter()
        .map(|sub| {
            let out = dir.path().join(sub);
            let o = opthedge(&[
                "simulate",
                "--m",
                "3",
                "--n",
                "40",
                "--T",
                "300",
                "--out",
                out.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            read_dir_sorted(&out)
        })
        .collect();
    assert_eq!(outs[0].len(), 9);
    assert_eq!(outs[0], outs[1]);
    let summary = String::from_utf8(
        outs[0]
            .iter()
            .find(|(n, _)| n == "summary.csv")
            .unwrap()
            .1
            .clone(),
    )
    .unwrap();
    assert!(summary.starts_with("preset,dynamics,eta,"));
    assert_eq!(summary.lines().count(), 9);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            "# small run\nm = 2\nn = 5\nT = 50\npresets = U-Social, A-Social\nout = {}\ncadence = 10\n",
            out.display()
        ),
    )
    .unwrap();
    let o = opthedge(&["simulate", "--config", cfg.to_str().unwrap(), "--T", "40"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("A-Social.csv")).unwrap();
    // header plus t = 10, 20, 30, 40
    assert_eq!(text.lines().count(), 5);
    assert!(!out.join("U-X-only.csv").exists());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["simulate", "--preset", "", "--out", out],
        vec!["simulate", "--delta", "1.5", "--out", out],
        vec!["simulate", "--T", "0", "--out", out],
        vec!["sweep-gamma", "--gamma-grid", "0.5,1.0", "--out", out],
        vec!["rates", "Nope", "--m", "2", "--n", "2"],
    ] {
        let o = opthedge(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&o.stderr).starts_with("error:"),
            "{args:?}"
        );
    }
}

#[test]
fn verify_csv_is_self_contained() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = opthedge(&[
        "verify", "--m", "4", "--n", "6", "--T", "200", "--algo", "averaged", "--out", out,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let mut rows = csv::Reader::from_path(dir.path().join("verify.csv")).unwrap();
    let mut checked = 0;
    for rec in rows.records() {
        let rec = rec.unwrap();
        let status = &rec[6];
        if status == "SKIP" {
            continue;
        }
        let (lhs, rhs, tol): (f64, f64, f64) = (
            rec[2].parse().unwrap(),
            rec[4].parse().unwrap(),
            rec[5].parse().unwrap(),
        );
        let holds = match &rec[3] {
            "<" => lhs < rhs + tol,
            "<=" => lhs <= rhs + tol,
            ">=" => lhs >= rhs - tol,
            r => panic!("relation {r}"),
        };
        assert_eq!(status, if holds { "PASS" } else { "FAIL" }, "{rec:?}");
        checked += 1;
    }
    assert!(checked > 10);
    assert!(dir.path().join("verify_report.txt").exists());
}

#[test]
fn rates_and_sweep() {
    let o = opthedge(&["rates", "a-social", "--m", "2", "--n", "10000"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("preset\tA-Social"));
    assert!(text.contains("f\tinf") && text.contains("g\tinf"));
    let upper: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("theoretical_upper\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((upper - 11.818736728617).abs() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let o = opthedge(&[
        "sweep-gamma",
        "--m",
        "10",
        "--n",
        "100",
        "--gamma-grid",
        "0.25,0.5,0.75",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = fs::read_to_string(dir.path().join("gamma_sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 5);
    assert!(sweep.lines().last().unwrap().starts_with("max_fg,,"));
}

#[test]
fn matrix_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    fs::write(&good, "2 3\n0.5 -1 0\n1 0.25 -0.75\n").unwrap();
    let o = opthedge(&["matrix-check", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("2x3"));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "2 2\n0.5 1.5\n0 0\n").unwrap();
    assert_eq!(
        opthedge(&["matrix-check", bad.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let out = dir.path().join("run");
    let instance = format!("file:{}", good.display());
    let o = opthedge(&[
        "simulate",
        "--instance",
        &instance,
        "--T",
        "30",
        "--preset",
        "U-Social",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
