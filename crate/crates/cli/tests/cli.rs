use std::path::Path;
use std::process::{Command, Output};

use steinerflow::sgf::read_sgf_file;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_steinerflow"));
    c.env_remove("STEINERFLOW_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn steinerflow")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn example(dir: &Path, kind: &str, n: usize) -> String {
    let path = dir.join(format!("{kind}-{n}.sgf"));
    let p = path.to_str().unwrap().to_string();
    let o = run(&["example", kind, "--p", "2", "--s", "3", "--n", &n.to_string(), "--out", &p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn example_then_verify_pde() {
    let dir = tempfile::tempdir().unwrap();
    let u = example(dir.path(), "three-mountains", 128);
    let o = run(&["verify-pde", "--in", &u]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.starts_with("name,lhs,rhs,slack,pass\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("weak_residual_")).count(), 10);
}

#[test]
fn symmetrize_at_time_zero_keeps_u() {
    let dir = tempfile::tempdir().unwrap();
    let u = example(dir.path(), "three-mountains", 64);
    let v = dir.path().join("v.sgf");
    let o = run(&["symmetrize", "--in", &u, "--t", "0", "--axis", "0", "--out", v.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let a = read_sgf_file(Path::new(&u)).unwrap();
    let b = read_sgf_file(&v).unwrap();
    assert_eq!(a.geometry(), b.geometry());
    let quantization = a.sup() / steinerflow::DEFAULT_LEVELS as f64;
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() <= quantization + 1e-12, "{x} vs {y}");
    }
}

#[test]
fn brock_detects_shifted_mountain() {
    let dir = tempfile::tempdir().unwrap();
    let u = example(dir.path(), "shifted", 96);
    let o = run(&["brock", "--in", &u, "--axis", "0"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("brock_slope"));
}

#[test]
fn brock_passes_on_exemplar() {
    let dir = tempfile::tempdir().unwrap();
    let u = example(dir.path(), "three-mountains", 128);
    let table = dir.path().join("e.csv");
    let o = run(&["brock", "--in", &u, "--axis", "0", "--energies", table.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let t = std::fs::read_to_string(table).unwrap();
    assert!(t.starts_with("t,energy_change\n"));
}

#[test]
fn decompose_finds_three_annuli() {
    let dir = tempfile::tempdir().unwrap();
    let u = example(dir.path(), "three-mountains", 128);
    let o = run(&["decompose", "--in", &u, "--expect-annuli", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = run(&["decompose", "--in", &u, "--expect-annuli", "2"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn rings_boundary_constants() {
    let dir = tempfile::tempdir().unwrap();
    let u = example(dir.path(), "ring", 256);
    let o = run(&["rings", "--in", &u, "--expect", "3.2727272727272727,1.6875", "--rel", "0.02"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn properties_and_lemmas_pass() {
    let dir = tempfile::tempdir().unwrap();
    let u = example(dir.path(), "three-mountains", 128);
    let v = example(dir.path(), "perturbed", 128);
    let r = example(dir.path(), "ring", 128);
    let o = run(&["properties", "--in", &u, "--upper", &v]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["lemmas", "--in", &u, "--ring", &r]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn output_flag_and_thread_count_do_not_change_csv() {
    let dir = tempfile::tempdir().unwrap();
    let u = example(dir.path(), "three-mountains", 64);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o1 = run(&["properties", "--in", &u, "--threads", "1", "--output", a.to_str().unwrap()]);
    let o2 = bin()
        .args(["properties", "--in", &u, "--output", b.to_str().unwrap()])
        .env("STEINERFLOW_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(code(&o1), 0);
    assert_eq!(code(&o2), 0);
    assert!(o1.stdout.is_empty());
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn lemmas_on_a_coarse_grid_report_the_degenerate_band() {
    let dir = tempfile::tempdir().unwrap();
    let u = example(dir.path(), "three-mountains", 64);
    let o = run(&["lemmas", "--in", &u]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("vanishing gradient"));
}

#[test]
fn usage_and_io_errors_exit_two() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["brock", "--bogus-flag"])), 2);
    assert_eq!(code(&run(&["brock", "--in", "/nonexistent/u.sgf"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sgf");
    std::fs::write(&bad, "SGF1\ndim 2\nshape 4\n").unwrap();
    let o = run(&["decompose", "--in", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn help_documents_csv_schemas() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("name,lhs,rhs,slack,pass"));
}
