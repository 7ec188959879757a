use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orlicz_kit::fields_norms::{Grid, SampledField};
use orlicz_kit::io::{read_field, write_field};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_orlicz-kit"));
    c.env_remove("ORLICZ_KIT_THREADS");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_chi(dir: &Path, name: &str, half_width: f64, h: f64, r: f64) -> PathBuf {
    let g = Grid::new(1, half_width, h).unwrap();
    let f = SampledField::from_fn(g, |x| if x[0].abs() <= r + 1e-12 { 1.0 } else { 0.0 });
    let path = dir.join(name);
    write_field(&f, std::fs::File::create(&path).unwrap()).unwrap();
    path
}

fn read_out(dir: &Path, name: &str) -> SampledField {
    read_field(std::fs::File::open(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn norm_of_indicator_sits_in_the_sandwich() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    // radius 1.005 = (m + ½)h: lattice mass equals |B|
    write_chi(d, "chi.csv", 4.0, 0.01, 1.0);
    for weak in [false, true] {
        let mut args = vec!["norm", "chi.csv", "--out", "o"];
        if weak {
            args.push("--weak");
        }
        let o = run(d, &args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("o/norm.json")).unwrap()).unwrap();
        let v = meta["value"].as_f64().unwrap();
        // 1/Φ⁻¹(φ(1)) = 1 for Φ = t², φ = 1/r; the family only reaches radii it contains
        assert!(v >= 0.99 && v <= 2.0, "{v}");
        let per_ball = std::fs::read_to_string(d.join("o/per_ball.csv")).unwrap();
        assert!(per_ball.starts_with("center_x,center_y,radius,norm\n"));
    }
}

#[test]
fn zero_field_has_zero_norm() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write_chi(d, "zero.csv", 1.0, 0.01, -1.0);
    let o = run(d, &["norm", "zero.csv", "--out", "o"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("global strong norm: 0 "));
}

#[test]
fn malformed_inputs_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("bad.csv"), "x,value\n-1,0\n0,zero\n1,0\n").unwrap();
    assert_eq!(code(&run(d, &["norm", "bad.csv"])), 2);
    assert_eq!(code(&run(d, &["norm", "missing.csv"])), 2);
    std::fs::write(d.join("seed.toml"), "[run]\nseed = \"seven\"\n").unwrap();
    assert_eq!(code(&run(d, &["--config", "seed.toml", "verify", "--filter", "EQ_4_1"])), 2);
    assert_eq!(code(&run(d, &["frobnicate"])), 2);
    let o = bin().current_dir(d).env("ORLICZ_KIT_THREADS", "many").args(["check", "Mr_A"]).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn maximal_of_indicator_follows_the_profile() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write_chi(d, "chi.csv", 4.0, 0.01, 1.0);
    // default half-octave radii: never above the lattice optimum, at most a √2-step below 2/(x+1)
    assert_eq!(code(&run(d, &["apply", "chi.csv", "--op", "m", "--out", "coarse"])), 0);
    // finer radii ratio 2^{1/16}: within 3%
    std::fs::write(d.join("fine.toml"), "[balls]\nr0 = 0.01\nkappa = 1.0442737824274138\n").unwrap();
    assert_eq!(code(&run(d, &["--config", "fine.toml", "apply", "chi.csv", "--op", "m", "--out", "fine"])), 0);
    let coarse = read_out(d, "coarse/field.csv");
    let fine = read_out(d, "fine/field.csv");
    for i in 0..coarse.grid.side {
        let x = coarse.grid.coord(i);
        if !(1.2..=4.0).contains(&x) {
            continue;
        }
        let exact = 2.0 / (x + 1.0);
        // lattice optimum: the 2/h + 1 points of [-1, 1] over the points of [-1, x]
        let h = coarse.grid.h;
        let lattice = (2.0 + h) / (x + 1.0 + h);
        assert!(coarse.values[i] <= lattice * (1.0 + 1e-9) && coarse.values[i] >= exact / 2f64.sqrt(), "x = {x}");
        assert!((fine.values[i] / exact - 1.0).abs() < 0.03, "x = {x}: {}", fine.values[i]);
    }
    let meta = std::fs::read_to_string(d.join("fine/operator.json")).unwrap();
    assert!(meta.contains("\"operator\": \"M\""));
}

#[test]
fn non_integrable_kernel_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write_chi(d, "chi.csv", 2.0, 0.02, 1.0);
    std::fs::write(d.join("k.toml"), "[kernel.rho]\nfamily = \"power\"\nalpha = 0\n").unwrap();
    let o = run(d, &["--config", "k.toml", "apply", "chi.csv", "--op", "i-rho", "--out", "o"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("integral condition violated"));
    assert!(!d.join("o").exists());
}

#[test]
fn constant_kernel_maximal_matches_m_bitwise() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write_chi(d, "chi.csv", 2.0, 0.02, 0.5);
    std::fs::write(d.join("k.toml"), "[kernel.rho]\nfamily = \"constant\"\nc = 1\n").unwrap();
    assert_eq!(code(&run(d, &["--config", "k.toml", "apply", "chi.csv", "--op", "m", "--out", "a"])), 0);
    assert_eq!(code(&run(d, &["--config", "k.toml", "apply", "chi.csv", "--op", "m-rho", "--out", "b"])), 0);
    assert_eq!(std::fs::read(d.join("a/field.csv")).unwrap(), std::fs::read(d.join("b/field.csv")).unwrap());
}

#[test]
fn condition_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let o = run(d, &["check", "Ir_A", "--out", "adams"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("Ir_A: Holds"));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("adams/condition.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "holds");
    let csv = std::fs::read_to_string(d.join("adams/condition.csv")).unwrap();
    assert!(csv.starts_with("r,lhs/rhs\n"));
    assert_eq!(csv.lines().count(), 201);

    std::fs::write(
        d.join("over.toml"),
        "[young.Psi]\nfamily = \"power\"\np = 4.2\n[rgrid]\nmin = 1e-60\nmax = 1e60\npoints = 241\n",
    )
    .unwrap();
    let o = run(d, &["--config", "over.toml", "check", "Ir_A", "--out", "over"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("Ir_A: Fails"));

    assert_eq!(code(&run(d, &["check", "Ir_B"])), 4);
}

#[test]
fn verify_filter_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let a = run(d, &["verify", "--filter", "THM_3_2", "--out", "a"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    let suite: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("a/suite.json")).unwrap()).unwrap();
    assert_eq!(suite["cases"].as_array().unwrap().len(), 1);
    assert_eq!(suite["cases"][0]["statement_id"], "THM_3_2");
    let b = bin().current_dir(d).env("ORLICZ_KIT_THREADS", "1").args(["verify", "--filter", "THM_3_2", "--out", "b"]).output().unwrap();
    assert_eq!(code(&b), 0);
    for f in ["suite.json", "summary.csv"] {
        assert_eq!(std::fs::read(d.join("a").join(f)).unwrap(), std::fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&run(d, &["verify", "--filter", "THM_9"])), 4);
}

#[test]
fn failing_suite_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    // a drift tolerance below the sampling noise makes the refinement check fail
    std::fs::write(d.join("strict.toml"), "[tolerances]\ndrift = 1e-12\n").unwrap();
    let o = run(d, &["--config", "strict.toml", "verify", "--filter", "LEM_5_6", "--out", "o"]);
    assert_eq!(code(&o), 5);
    assert!(d.join("o/suite.json").exists());
}
