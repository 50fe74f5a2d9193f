use std::path::Path;
use std::process::{Command, Output};

fn kaczmarz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kaczmarz")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

const GAUSSIAN: &str = "steps = 40\nrecord_stride = 10\n[problem]\nkind = \"gaussian_row_normalized\"\nn = 12\n";

#[test]
fn solve_writes_run_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN);
    let out = dir.path().join("t.csv").display().to_string();
    let o = kaczmarz(&["solve", "--config", &cfg, "--seed", "3", "--runs", "2", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("t_run0.csv").exists());
    assert!(dir.path().join("t_run1.csv").exists());
}

#[test]
fn missing_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN);
    let out = dir.path().join("t.csv").display().to_string();
    let o = kaczmarz(&["solve", "--config", &cfg, "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    let o = kaczmarz(&["reproduce", "--figure", "fig1", "--out", &dir.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(kaczmarz(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(kaczmarz(&["reproduce", "--figure", "fig4", "--seed", "1", "--out", "x"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "steps = 1\nbogus_key = 3\n[problem]\nkind = \"laplacian1d\"\nn = 4\n");
    assert_eq!(kaczmarz(&["solve", "--config", &cfg, "--seed", "1", "--out", "o.csv"]).status.code(), Some(1));
    assert_eq!(kaczmarz(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_passes_and_theorem_two_needs_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN);
    let out = dir.path().join("v.csv").display().to_string();
    let o = kaczmarz(&["verify", "--config", &cfg, "--seed", "2", "--out", &out, "--theorem", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = kaczmarz(&["verify", "--config", &cfg, "--seed", "2", "--out", &out, "--theorem", "2"]);
    assert_eq!(o.status.code(), Some(1));

    let sym = write_config(
        dir.path(),
        "steps = 30\n[problem]\nkind = \"symmetric_gaussian\"\nn = 10\nrhs = \"from_solution\"\n",
    );
    let o = kaczmarz(&["verify", "--config", &sym, "--seed", "2", "--out", &out, "--theorem", "2", "--ell", "1", "2", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let header = std::fs::read_to_string(&out).unwrap();
    assert!(header.lines().next().unwrap().contains("rhs_thm2_l3"));
}

#[test]
fn verify_failure_exits_two() {
    // The stated power bound fails at the eigenvector of the smallest
    // eigenvalue; this instance starts exactly there.
    let dir = tempfile::tempdir().unwrap();
    let a = "3 3\n2 1 0\n1 2 1\n0 1 0.05\n";
    std::fs::write(dir.path().join("a.txt"), a).unwrap();
    let m = kaczmarz_cascade::io::load_matrix(dir.path().join("a.txt")).unwrap();
    let s = kaczmarz_cascade::svd(&m).unwrap();
    let v = s.right_vector(2).to_vec();
    kaczmarz_cascade::io::save_vector(dir.path().join("x0.txt"), &v).unwrap();
    kaczmarz_cascade::io::save_vector(dir.path().join("b.txt"), &[0.0; 3]).unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            "steps = 0\ntheorem = 2\nells = [2]\n[problem]\nkind = \"from_file\"\nmatrix_path = \"{0}/a.txt\"\nrhs = \"from_file\"\nrhs_path = \"{0}/b.txt\"\nx0 = \"from_file\"\nx0_path = \"{0}/x0.txt\"\n",
            dir.path().display()
        ),
    );
    let out = dir.path().join("v.csv").display().to_string();
    let o = kaczmarz(&["verify", "--config", &cfg, "--seed", "1", "--out", &out]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn montecarlo_writes_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN);
    let out = dir.path().join("mc.csv");
    let o = kaczmarz(&["montecarlo", "--config", &cfg, "--seed", "4", "--runs", "3", "--out", &out.display().to_string()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("k,residual_norm_mean,residual_norm_std,residual_norm_min,residual_norm_max"));
    let o = kaczmarz(&["montecarlo", "--config", &cfg, "--seed", "4", "--runs", "1", "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}
