//! Each singular component of the error decays in mean like
//! `(1 - σ_ℓ²/‖A‖_F²)^k`. Checked exactly for one step and by sampling for
//! 100 steps.
//!
//!     cargo run --release --example spectral_decay

use kaczmarz_cascade::diagnostics::spectral_mean_prediction;
use kaczmarz_cascade::sampling::derive_seed;
use kaczmarz_cascade::{
    build_problem, expected_next, spectral_coeffs, Functional, KaczmarzSolver, ProblemKind, ProblemSpec, X0Kind,
};

fn main() -> kaczmarz_cascade::Result<()> {
    let n = 40;
    let spec = ProblemSpec::new(ProblemKind::GaussianRowNormalized, n, 5).with_x0(X0Kind::Gaussian);
    let p = build_problem(&spec)?;
    let s = p.svd.clone().expect("attached");
    let frob = p.a.frobenius_norm_sq();
    let x_true = p.x_true.clone().expect("attached");
    let c0 = spectral_coeffs(&p.x0, &x_true, &s)?.coeffs;

    println!("one step, exact:");
    for ell in [1, n / 2, n] {
        let exact = expected_next(&p, &p.x0, Functional::SpectralCoeff(ell))?;
        let formula = spectral_mean_prediction(s.singular_values[ell - 1], frob, 1, c0[ell - 1]);
        println!("  l = {ell:>2}: {exact:+.12e}  {formula:+.12e}");
    }

    let (k, runs) = (100, 400);
    let mut sums = vec![0.0; n];
    for j in 0..runs {
        let mut solver = KaczmarzSolver::new(&p, derive_seed(5, j))?;
        for _ in 0..k {
            solver.step();
        }
        let c = spectral_coeffs(solver.iterate(), &x_true, &s)?.coeffs;
        for (acc, v) in sums.iter_mut().zip(c) {
            *acc += v;
        }
    }
    println!("after {k} steps, mean of {runs} runs vs formula:");
    for ell in [1, n / 2, n] {
        let formula = spectral_mean_prediction(s.singular_values[ell - 1], frob, k, c0[ell - 1]);
        println!("  l = {ell:>2}: {:+.5}  {formula:+.5}", sums[ell - 1] / runs as f64);
    }
    Ok(())
}
