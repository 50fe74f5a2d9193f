//! Writes a system to text files, runs `solve` and `montecarlo` from a TOML
//! config that points at them, and prints the aggregate CSV head.
//!
//!     cargo run --release --example matrix_files

use kaczmarz_cascade::experiments::{cmd_montecarlo, cmd_solve, RunConfig};
use kaczmarz_cascade::io::{save_matrix, save_vector};
use kaczmarz_cascade::problems::gen_laplacian_1d;

fn main() -> kaczmarz_cascade::Result<()> {
    let dir = std::env::temp_dir().join("kaczmarz_matrix_files");
    let a = gen_laplacian_1d(16)?;
    save_matrix(dir.join("a.txt"), &a)?;
    save_vector(dir.join("b.txt"), &[1.0; 16])?;

    let toml = format!(
        r#"
steps = 2000
seed = 7
record_stride = 500
runs = 4
diagnostics = ["decrement", "h1"]
output_path = "{out}"

[problem]
kind = "from_file"
matrix_path = "{a}"
rhs = "from_file"
rhs_path = "{b}"
"#,
        out = dir.join("trace.csv").display(),
        a = dir.join("a.txt").display(),
        b = dir.join("b.txt").display(),
    );
    let config = RunConfig::from_toml_str(&toml)?;
    for p in cmd_solve(&config)?.paths {
        println!("wrote {}", p.display());
    }
    let mc = cmd_montecarlo(&config)?;
    println!("aggregate: {}", mc.path.display());
    for line in mc.aggregate.to_csv().lines().take(3) {
        println!("{line}");
    }
    Ok(())
}
