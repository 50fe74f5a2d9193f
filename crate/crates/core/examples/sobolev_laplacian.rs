//! On the 1D Laplacian the error becomes smooth long before it becomes
//! small: the H2 seminorm collapses while `‖x_k - x‖` barely moves.
//!
//!     cargo run --release --example sobolev_laplacian

use kaczmarz_cascade::{build_problem, run, Diagnostic, ProblemKind, ProblemSpec, SobolevOrder, X0Kind};

fn main() -> kaczmarz_cascade::Result<()> {
    let spec = ProblemSpec::new(ProblemKind::Laplacian1d, 64, 2).with_x0(X0Kind::Gaussian);
    let problem = build_problem(&spec)?;
    let diags = [
        Diagnostic::ErrorNormSq,
        Diagnostic::Sobolev(SobolevOrder::H1),
        Diagnostic::Sobolev(SobolevOrder::H2),
    ];
    let trace = run(&problem, 20_000, 2, 2000, &diags)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "k", "|e|^2", "H1", "H2");
    for row in &trace.rows {
        println!(
            "{:>6} {:>12.4e} {:>12.4e} {:>12.4e}",
            row.k, row.extras[0], row.extras[1], row.extras[2]
        );
    }
    Ok(())
}
