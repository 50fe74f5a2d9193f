//! Tracks the cosine between the error `x_k - x` and the leading right
//! singular vector `v_1`. It drops quickly and then fluctuates near zero.
//!
//!     cargo run --release --example fig2_leading_direction -- [seed]

use kaczmarz_cascade::{build_problem, run, Diagnostic, ProblemKind, ProblemSpec};

fn main() -> kaczmarz_cascade::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let problem = build_problem(&ProblemSpec::new(ProblemKind::GaussianRowNormalized, 100, seed))?;
    let trace = run(&problem, 5000, seed, 250, &[Diagnostic::LeadingCosine])?;
    for row in &trace.rows {
        let c = trace.extra(row, "v1_cosine").unwrap_or(f64::NAN);
        let bar = "#".repeat((c.abs() * 60.0) as usize);
        println!("{:>5} {:+.4} {bar}", row.k, c);
    }
    Ok(())
}
