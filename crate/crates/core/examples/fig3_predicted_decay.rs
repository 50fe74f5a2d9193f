//! n = 500, Gaussian starting points: compares the realized drop of
//! `‖A x_k - b‖²` over 3000 steps with the summed one-step prediction
//! `(α/F)‖A x_k - b‖² - (2/F)‖Aᵀ(A x_k - b)‖²`.
//!
//!     cargo run --release --example fig3_predicted_decay -- [seed]

use kaczmarz_cascade::experiments::{fig3_summary, fig3_traces, FIG3_RUNS};
use kaczmarz_cascade::alpha;

fn main() -> kaczmarz_cascade::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let (problem, traces) = fig3_traces(seed, FIG3_RUNS)?;
    println!("alpha = {:.3}", alpha(&problem.a)?);
    for (j, t) in traces.iter().enumerate() {
        let r = fig3_summary(t);
        println!(
            "run {j}: |Ax-b|^2 {:8.1} -> {:7.1}  drop {:6.1}  predicted {:6.1}  ({:.3} per step)",
            r.initial_residual.powi(2),
            r.final_residual.powi(2),
            -r.realized_change_sq(),
            -r.cumulative_decrement,
            r.cumulative_decrement / (t.rows.len() - 1) as f64
        );
    }
    Ok(())
}
