//! Residual decay and plateau on a 100x100 row-normalized Gaussian system
//! with `b = 1` and `x0 = 0`.
//!
//!     cargo run --release --example fig1_plateau -- [seed]

use kaczmarz_cascade::experiments::{fig1_summary, fig1_trace};

fn main() -> kaczmarz_cascade::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let (problem, trace) = fig1_trace(seed)?;

    println!("{:>6}  {:>12}  {:>10}", "k", "|Ax_k - b|", "|x_k|");
    for row in trace.rows.iter().step_by(2000) {
        println!("{:>6}  {:>12.5}  {:>10.3}", row.k, row.residual_norm, row.iterate_norm);
    }
    let s = fig1_summary(&problem, &trace);
    println!(
        "final |x_k| = {:.2} against |x| = {:.2}; residual {:.3} -> {:.3}",
        s.final_iterate_norm, s.solution_norm, s.initial_residual, s.final_residual
    );
    Ok(())
}
