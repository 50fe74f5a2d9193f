//! Mean squared error over many runs against the geometric envelope
//! `(1 - σ_min²/‖A‖_F²)^k ‖x_0 - x‖²`.
//!
//!     cargo run --release --example strohmer_vershynin

use kaczmarz_cascade::sampling::derive_seed;
use kaczmarz_cascade::{build_problem, run, sv_rate, Diagnostic, ProblemKind, ProblemSpec};

fn main() -> kaczmarz_cascade::Result<()> {
    let p = build_problem(&ProblemSpec::new(ProblemKind::GaussianRowNormalized, 50, 9))?;
    let rate = sv_rate(p.svd.as_ref().expect("attached"), p.a.frobenius_norm_sq())?;
    let (steps, stride, runs) = (500, 50, 300);
    let traces: Vec<_> = (0..runs)
        .map(|j| run(&p, steps, derive_seed(9, j), stride, &[Diagnostic::ErrorNormSq]))
        .collect::<Result<_, _>>()?;
    let e0 = traces[0].rows[0].extras[0];
    println!("rate = {rate:.6}");
    for (s, row) in traces[0].rows.iter().enumerate() {
        let mean = traces.iter().map(|t| t.rows[s].extras[0]).sum::<f64>() / runs as f64;
        let envelope = rate.powi(row.k as i32) * e0;
        println!("{:>4}  mean {mean:10.4}  envelope {envelope:10.4}", row.k);
    }
    Ok(())
}
