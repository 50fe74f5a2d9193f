//! Exact one-step expectations against the first-order and power bounds.
//!
//! Along a trajectory both bounds hold. At the eigenvector of the smallest
//! eigenvalue the power bound stated with `‖A^ℓ r‖²` in the correction term
//! fails for `ℓ >= 2`, while the version with `‖A r‖²` holds.
//!
//!     cargo run --release --example verify_bounds

use kaczmarz_cascade::{
    build_problem, theorem1_report, theorem2_report, KaczmarzSolver, ProblemInstance, ProblemKind, ProblemSpec,
    RhsKind,
};

fn main() -> kaczmarz_cascade::Result<()> {
    let spec = ProblemSpec::new(ProblemKind::SymmetricGaussian, 20, 3).with_rhs(RhsKind::FromSolution);
    let problem = build_problem(&spec)?;
    let mut solver = KaczmarzSolver::new(&problem, 3)?;

    println!("{:>5} {:>3} {:>12} {:>12} {:>12}", "k", "l", "E next", "bound", "proof bound");
    for k in 0..=400 {
        if k % 100 == 0 {
            let x = solver.iterate();
            let t1 = theorem1_report(&problem, x)?;
            println!("{k:>5} {:>3} {:>12.5e} {:>12.5e} {:>12.5e}", 1, t1.lhs_exact, t1.rhs, t1.rhs_proof);
            for ell in 2..=3 {
                let r = theorem2_report(&problem, x, ell)?;
                println!("{k:>5} {ell:>3} {:>12.5e} {:>12.5e} {:>12.5e}", r.lhs_exact, r.rhs, r.rhs_proof);
            }
        }
        solver.step();
    }

    let s = problem.svd.clone().expect("attached by build_problem");
    let n = problem.n();
    let zero = ProblemInstance::new(problem.a.clone(), vec![0.0; n], Some(vec![0.0; n]), vec![0.0; n])?;
    let v_min = s.right_vectors.last().expect("n > 0");
    let r = theorem2_report(&zero, v_min, 2)?;
    println!(
        "\nx = v_min, l = 2: E next {:.4e}, bound {:.4e} (holds: {}), proof bound {:.4e} (holds: {})",
        r.lhs_exact,
        r.rhs,
        r.inequality_holds(),
        r.rhs_proof,
        r.proof_bound_holds()
    );
    Ok(())
}
