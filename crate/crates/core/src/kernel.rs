//! The randomized Kaczmarz update and the iteration driver.
//!
//! Stepping on row `i` projects the iterate onto the hyperplane
//! `<a_i, x> = b_i`:
//!
//! ```text
//! x' = x + (b_i - <a_i, x>) / ‖a_i‖² · a_i
//! ```
//!
//! which is one SGD step on `f_i(x)² = (<a_i, x> - b_i)²` with rows drawn
//! with probability `‖a_i‖² / ‖A‖_F²`.

use crate::diagnostics::{Diagnostic, DiagnosticContext};
use crate::error::{Error, Result};
use crate::linalg::{axpy, check_len, dot, norm, sub, DenseMatrix};
use crate::sampling::{Rng, RowSampler};
use crate::svd::SvdResult;

/// Relative tolerance for `‖A x_true - b‖`.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// A consistent system `A x = b` with starting point `x0`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub x_true: Option<Vec<f64>>,
    pub x0: Vec<f64>,
    /// SVD of `a`, kept when the builder already computed it.
    pub svd: Option<SvdResult>,
}

impl ProblemInstance {
    pub fn new(a: DenseMatrix, b: Vec<f64>, x_true: Option<Vec<f64>>, x0: Vec<f64>) -> Result<Self> {
        if a.n_rows() < a.n_cols() {
            return Err(Error::InvalidProblem(format!(
                "need at least as many rows as columns, got {}x{}",
                a.n_rows(),
                a.n_cols()
            )));
        }
        check_len("ProblemInstance b", a.n_rows(), b.len())?;
        check_len("ProblemInstance x0", a.n_cols(), x0.len())?;
        if b.iter().chain(&x0).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        if let Some(x) = &x_true {
            check_len("ProblemInstance x_true", a.n_cols(), x.len())?;
            let mismatch = norm(&residual(&a, &b, x)?);
            if mismatch > CONSISTENCY_TOL * (1.0 + norm(&b)) {
                return Err(Error::InvalidProblem(format!(
                    "system is inconsistent: ‖A x_true - b‖ = {mismatch:e}"
                )));
            }
        }
        Ok(ProblemInstance {
            a,
            b,
            x_true,
            x0,
            svd: None,
        })
    }

    pub fn with_svd(mut self, svd: SvdResult) -> Self {
        self.svd = Some(svd);
        self
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Self> {
        check_len("ProblemInstance x0", self.a.n_cols(), x0.len())?;
        self.x0 = x0;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.a.n_cols()
    }

    pub fn m(&self) -> usize {
        self.a.n_rows()
    }

    /// The SVD, computing it if the instance does not carry one.
    pub fn svd_or_compute(&self) -> Result<std::borrow::Cow<'_, SvdResult>> {
        match &self.svd {
            Some(s) => Ok(std::borrow::Cow::Borrowed(s)),
            None => Ok(std::borrow::Cow::Owned(crate::svd::svd(&self.a)?)),
        }
    }
}

/// `A x - b`
pub fn residual(a: &DenseMatrix, b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_len("residual", a.n_rows(), b.len())?;
    let ax = a.matvec(x)?;
    Ok(sub(&ax, b))
}

/// One projection step onto row `i`; returns the new iterate.
pub fn kaczmarz_step(a: &DenseMatrix, b: &[f64], x: &[f64], i: usize) -> Result<Vec<f64>> {
    check_len("kaczmarz_step", a.n_cols(), x.len())?;
    check_len("kaczmarz_step", a.n_rows(), b.len())?;
    if i >= a.n_rows() {
        return Err(Error::InvalidProblem(format!(
            "row index {i} out of range for {} rows",
            a.n_rows()
        )));
    }
    let row_norm_sq = a.row_norm_sq(i);
    if row_norm_sq == 0.0 {
        return Err(Error::ZeroRow { row: i });
    }
    let mut out = x.to_vec();
    project(a.row(i), row_norm_sq, b[i], &mut out);
    Ok(out)
}

#[inline]
fn project(row: &[f64], row_norm_sq: f64, bi: f64, x: &mut [f64]) {
    let scale = (bi - dot(row, x)) / row_norm_sq;
    axpy(scale, row, x);
}

/// Stateful stepper: owns the iterate and the random stream of one run.
#[derive(Debug, Clone)]
pub struct KaczmarzSolver<'p> {
    problem: &'p ProblemInstance,
    sampler: RowSampler,
    row_norms_sq: Vec<f64>,
    rng: Rng,
    x: Vec<f64>,
    k: usize,
}

impl<'p> KaczmarzSolver<'p> {
    pub fn new(problem: &'p ProblemInstance, seed: u64) -> Result<Self> {
        let sampler = RowSampler::new(&problem.a)?;
        let row_norms_sq = (0..problem.m()).map(|i| problem.a.row_norm_sq(i)).collect();
        Ok(KaczmarzSolver {
            problem,
            sampler,
            row_norms_sq,
            rng: Rng::new(seed),
            x: problem.x0.clone(),
            k: 0,
        })
    }

    /// Samples a row, projects onto it and returns the row index.
    pub fn step(&mut self) -> usize {
        let i = self.sampler.sample(&mut self.rng);
        project(
            self.problem.a.row(i),
            self.row_norms_sq[i],
            self.problem.b[i],
            &mut self.x,
        );
        self.k += 1;
        i
    }

    pub fn iterate(&self) -> &[f64] {
        &self.x
    }

    pub fn steps_taken(&self) -> usize {
        self.k
    }

    pub fn residual_norm(&self) -> f64 {
        norm(&residual(&self.problem.a, &self.problem.b, &self.x).expect("dimensions fixed at construction"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub residual_norm: f64,
    pub error_norm: Option<f64>,
    pub iterate_norm: f64,
    /// Row used to reach `x_k` (none for the initial iterate).
    pub chosen_row: Option<usize>,
    /// Values for [`Trace::extra_columns`], in order.
    pub extras: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub seed: u64,
    pub record_stride: usize,
    pub extra_columns: Vec<String>,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn last(&self) -> &TraceRow {
        self.rows.last().expect("trace always holds the initial row")
    }

    pub fn at(&self, k: usize) -> Option<&TraceRow> {
        self.rows.iter().find(|r| r.k == k)
    }

    pub fn extra(&self, row: &TraceRow, column: &str) -> Option<f64> {
        self.extra_columns
            .iter()
            .position(|c| c == column)
            .map(|idx| row.extras[idx])
    }
}

/// Runs `steps` iterations, recording step 0, every `record_stride`-th step
/// and the final step. Diagnostics are evaluated only on recorded steps.
pub fn run(
    problem: &ProblemInstance,
    steps: usize,
    seed: u64,
    record_stride: usize,
    diagnostics: &[Diagnostic],
) -> Result<Trace> {
    let ctx = DiagnosticContext::new(problem, diagnostics)?;
    run_with_context(problem, steps, seed, record_stride, &ctx)
}

/// Same as [`run`] with a prepared (shareable) diagnostic context.
pub fn run_with_context(
    problem: &ProblemInstance,
    steps: usize,
    seed: u64,
    record_stride: usize,
    ctx: &DiagnosticContext,
) -> Result<Trace> {
    if record_stride == 0 {
        return Err(Error::config("record_stride", "must be at least 1"));
    }
    let mut solver = KaczmarzSolver::new(problem, seed)?;
    let mut trace = Trace {
        seed,
        record_stride,
        extra_columns: ctx.columns(),
        rows: Vec::with_capacity(steps / record_stride + 2),
    };
    trace.rows.push(record(problem, ctx, solver.iterate(), 0, None)?);
    for k in 1..=steps {
        let i = solver.step();
        if k % record_stride == 0 || k == steps {
            trace.rows.push(record(problem, ctx, solver.iterate(), k, Some(i))?);
        }
    }
    Ok(trace)
}

fn record(
    problem: &ProblemInstance,
    ctx: &DiagnosticContext,
    x: &[f64],
    k: usize,
    chosen_row: Option<usize>,
) -> Result<TraceRow> {
    let residual_norm = norm(&residual(&problem.a, &problem.b, x)?);
    let iterate_norm = norm(x);
    if !residual_norm.is_finite() || !iterate_norm.is_finite() {
        return Err(Error::NumericFailure { step: k });
    }
    let error_norm = problem.x_true.as_ref().map(|xt| norm(&sub(x, xt)));
    let extras = ctx.evaluate(x)?;
    if extras.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure { step: k });
    }
    Ok(TraceRow {
        k,
        residual_norm,
        error_norm,
        iterate_norm,
        chosen_row,
        extras,
    })
}
