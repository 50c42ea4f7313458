use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monopole-lab"))
        .args(args)
        .env_remove("MONOPOLE_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_owned()
}

#[test]
fn simulate_is_deterministic_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = lab(&[
            "simulate", "--family", "CaseII", "--seed", "7", "--t-end", "2", "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
    let o = lab(&["simulate", "--family", "CaseII", "--seed", "8", "--t-end", "2", "--out", dir.path().join("c.csv").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_ne!(std::fs::read(dir.path().join("c.csv")).unwrap(), x);
}

#[test]
fn csv_headers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases: [(&[&str], &str, &str); 5] = [
        (&["simulate", "--family", "CaseII", "--t-end", "0.5"], "torus.csv", "t,u1,u2,p1,p2,H,F"),
        (&["simulate", "--family", "VY", "--t-end", "0.5"], "e3.csv", "t,M1,M2,M3,x1,x2,x3,H,F,C1,C2"),
        (&["elliptic-table", "--family", "CaseII", "--samples", "10"], "table.csv", "u,Q,dQ"),
        (&["metric-check", "--family", "CaseI", "--samples", "5"], "metric.csv", "u1,u2,lambda,K_closed,K_numeric"),
        (&["flux", "--family", "CaseI", "--n", "64"], "flux.csv", "n,area,flux_over_2pi"),
    ];
    for (args, file, expected) in cases {
        let path = d.join(file);
        let mut all = args.to_vec();
        all.extend(["--out", path.to_str().unwrap()]);
        let o = lab(&all);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(header(&path), expected, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = lab(&["roots", "--family", "CaseII"]);
    assert_eq!(code(&good), 0);
    assert!(stdout(&good).contains("admissible"));

    // β2 + β3 < 0 violates the sign conditions on the coefficients
    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"family":"CaseII","mu":1,"B":0.5,"geometry":{"roots":[4,1,-2,-3],"a3":-1}}"#,
    );
    assert_eq!(code(&lab(&["roots", "--config", &bad])), 1);

    let missing = write_config(
        dir.path(),
        "missing.json",
        r#"{"family":"CaseII","mu":1,"B":0.5,"geometry":{"roots":[3,2,-1,-4]}}"#,
    );
    let o = lab(&["roots", "--config", &missing]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("geometry.a3"));

    let unknown = write_config(dir.path(), "unknown.json", r#"{"family":"CaseII","mu":1,"B":0.5,"geometry":{},"extra":1}"#);
    assert_eq!(code(&lab(&["roots", "--config", &unknown])), 2);
    assert_eq!(code(&lab(&["roots"])), 2);
    assert_eq!(code(&lab(&["verify", "--family", "CaseI", "--stencil", "3"])), 2);
    assert_eq!(code(&lab(&["verify", "--family", "CaseI", "--tol", "-1"])), 2);

    // an impossible drift bound is a numerical breach, not a configuration error
    let o = lab(&["simulate", "--family", "CaseI", "--t-end", "1", "--drift-tol", "1e-30"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_passes_on_builtin_families() {
    for family in ["CaseI", "CaseII"] {
        let o = lab(&["verify", "--family", family]);
        assert_eq!(code(&o), 0, "{family}: {}", stdout(&o));
        let out = stdout(&o);
        for name in ["C1", "C2", "C3", "C4", "C5", "C6", "C6*", "C6*-C6", "duality"] {
            assert!(out.lines().any(|l| l.split_whitespace().next() == Some(name)), "{name} missing:\n{out}");
        }
        assert!(out.contains("pass=true"));
    }
}

#[test]
fn flux_of_the_round_sphere_is_one() {
    let o = lab(&["flux", "--family", "CaseI"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("flux_over_2pi=1.000000"), "{}", stdout(&o));
    let o = lab(&["flux", "--family", "CaseII"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("flux_over_2pi=8.000000"), "{}", stdout(&o));
}

#[test]
fn seeded_trajectories_conserve_h_and_f() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["CaseI", "CaseII", "CaseIILimit", "VY"] {
        let out = dir.path().join(format!("{family}.csv"));
        let o = lab(&[
            "simulate", "--family", family, "--t-end", "10", "--trajectories", "2", "--seed", "3", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{family}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(dir.path().join(format!("{family}_001.csv")).exists());
        assert!(stdout(&o).contains("pass=true"));
    }
}
