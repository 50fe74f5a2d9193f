//! Instance generators and problem assembly.
//!
//! Random matrices draw their entries row by row from [`Rng::new(seed)`]
//! (Box–Muller normals). When a generated square matrix has
//! `σ_min <= 1e-6`, generation is retried with `seed + 1`, at most three
//! times. The exact solution and the initial iterate use separate streams
//! derived from the same seed, so the three choices do not interact.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{load_matrix, load_vector};
use crate::kernel::ProblemInstance;
use crate::linalg::DenseMatrix;
use crate::sampling::{derive_seed, Rng};
use crate::svd::{svd, SvdResult};

const INVERTIBILITY_FLOOR: f64 = 1e-6;
const MAX_RETRIES: u64 = 3;
const STREAM_X_TRUE: u64 = 1;
const STREAM_X0: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    GaussianRowNormalized,
    SymmetricGaussian,
    Laplacian1d,
    FromFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsKind {
    #[default]
    Ones,
    FromSolution,
    FromFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum X0Kind {
    #[default]
    Zero,
    Gaussian,
    FromFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    #[serde(default)]
    pub n: usize,
    /// Row count for rectangular Gaussian instances; defaults to `n`.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub rhs: RhsKind,
    #[serde(default)]
    pub x0: X0Kind,
    #[serde(default)]
    pub matrix_path: Option<PathBuf>,
    #[serde(default)]
    pub rhs_path: Option<PathBuf>,
    #[serde(default)]
    pub x0_path: Option<PathBuf>,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, n: usize, seed: u64) -> Self {
        ProblemSpec {
            kind,
            n,
            m: None,
            seed,
            rhs: RhsKind::Ones,
            x0: X0Kind::Zero,
            matrix_path: None,
            rhs_path: None,
            x0_path: None,
        }
    }

    pub fn with_rhs(mut self, rhs: RhsKind) -> Self {
        self.rhs = rhs;
        self
    }

    pub fn with_x0(mut self, x0: X0Kind) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_rows(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == ProblemKind::FromFile {
            if self.matrix_path.is_none() {
                return Err(Error::config("problem.matrix_path", "required for kind = from_file"));
            }
        } else if self.n < 2 {
            return Err(Error::config("problem.n", "must be at least 2"));
        }
        if let Some(m) = self.m {
            if self.kind != ProblemKind::GaussianRowNormalized {
                return Err(Error::config("problem.m", "only gaussian_row_normalized takes a row count"));
            }
            if m < self.n {
                return Err(Error::config("problem.m", "must be at least n"));
            }
        }
        if self.rhs == RhsKind::FromFile && self.rhs_path.is_none() {
            return Err(Error::config("problem.rhs_path", "required for rhs = from_file"));
        }
        if self.x0 == X0Kind::FromFile && self.x0_path.is_none() {
            return Err(Error::config("problem.x0_path", "required for x0 = from_file"));
        }
        Ok(())
    }
}

fn gaussian_row_normalized_raw(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let mut rng = Rng::new(seed);
    DenseMatrix::from_fn(m, n, |_, _| rng.next_normal())
        .expect("normals are finite")
        .normalize_rows()
}

fn symmetric_gaussian_raw(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = Rng::new(seed);
    let g = DenseMatrix::from_fn(n, n, |_, _| rng.next_normal()).expect("normals are finite");
    DenseMatrix::from_fn(n, n, |i, j| 0.5 * (g.get(i, j) + g.get(j, i))).expect("finite")
}

fn with_retries(
    seed: u64,
    build: impl Fn(u64) -> DenseMatrix,
) -> Result<(DenseMatrix, SvdResult)> {
    let mut last = None;
    for attempt in 0..=MAX_RETRIES {
        let a = build(seed.wrapping_add(attempt));
        let s = svd(&a)?;
        if s.sigma_min() > INVERTIBILITY_FLOOR {
            return Ok((a, s));
        }
        last = Some((s.sigma_min(), s.sigma_max()));
    }
    let (sigma_min, sigma_max) = last.expect("at least one attempt");
    Err(Error::IllPosed {
        sigma_min,
        sigma_max,
    })
}

/// `m x n` matrix of i.i.d. standard normals with every row scaled to unit norm.
pub fn gen_gaussian_row_normalized(n: usize, m: usize, seed: u64) -> Result<DenseMatrix> {
    gaussian_row_normalized_with_svd(n, m, seed).map(|(a, _)| a)
}

fn gaussian_row_normalized_with_svd(n: usize, m: usize, seed: u64) -> Result<(DenseMatrix, SvdResult)> {
    if n < 2 || m < n {
        return Err(Error::InvalidProblem(format!("need m >= n >= 2, got m={m}, n={n}")));
    }
    with_retries(seed, |s| gaussian_row_normalized_raw(m, n, s))
}

/// `(G + Gᵀ)/2` for a standard normal `G`; rows are left unnormalized so the
/// result stays exactly symmetric.
pub fn gen_symmetric_gaussian(n: usize, seed: u64) -> Result<DenseMatrix> {
    symmetric_gaussian_with_svd(n, seed).map(|(a, _)| a)
}

fn symmetric_gaussian_with_svd(n: usize, seed: u64) -> Result<(DenseMatrix, SvdResult)> {
    if n < 2 {
        return Err(Error::InvalidProblem(format!("need n >= 2, got {n}")));
    }
    with_retries(seed, |s| symmetric_gaussian_raw(n, s))
}

/// Tridiagonal `(-1, 2, -1)` Dirichlet Laplacian.
pub fn gen_laplacian_1d(n: usize) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(Error::InvalidProblem(format!("need n >= 2, got {n}")));
    }
    DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    })
}

/// Assembles `A`, `b`, `x_true` and `x0` for a spec. `x_true` always comes
/// from the SVD solve or the seeded draw, so error norms are available.
pub fn build_problem(spec: &ProblemSpec) -> Result<ProblemInstance> {
    spec.validate()?;
    let (a, s) = match spec.kind {
        ProblemKind::GaussianRowNormalized => {
            gaussian_row_normalized_with_svd(spec.n, spec.m.unwrap_or(spec.n), spec.seed)?
        }
        ProblemKind::SymmetricGaussian => symmetric_gaussian_with_svd(spec.n, spec.seed)?,
        ProblemKind::Laplacian1d => {
            let a = gen_laplacian_1d(spec.n)?;
            let s = svd(&a)?;
            (a, s)
        }
        ProblemKind::FromFile => {
            let a = load_matrix(spec.matrix_path.as_ref().expect("validated"))?;
            let s = svd(&a)?;
            (a, s)
        }
    };
    if a.n_rows() < a.n_cols() {
        return Err(Error::InvalidProblem(format!(
            "need at least as many rows as columns, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if s.sigma_min() <= 1e-10 * s.sigma_max() {
        return Err(Error::IllPosed {
            sigma_min: s.sigma_min(),
            sigma_max: s.sigma_max(),
        });
    }
    let n = a.n_cols();

    let (b, x_true) = match spec.rhs {
        RhsKind::Ones => {
            let b = vec![1.0; a.n_rows()];
            let x = s.solve(&b)?;
            (b, x)
        }
        RhsKind::FromSolution => {
            let x = Rng::new(derive_seed(spec.seed, STREAM_X_TRUE)).normal_vec(n);
            (a.matvec(&x)?, x)
        }
        RhsKind::FromFile => {
            let b = load_vector(spec.rhs_path.as_ref().expect("validated"))?;
            crate::linalg::check_len("rhs file", a.n_rows(), b.len())?;
            let x = s.solve(&b)?;
            (b, x)
        }
    };
    let x0 = match spec.x0 {
        X0Kind::Zero => vec![0.0; n],
        X0Kind::Gaussian => Rng::new(derive_seed(spec.seed, STREAM_X0)).normal_vec(n),
        X0Kind::FromFile => load_vector(spec.x0_path.as_ref().expect("validated"))?,
    };
    Ok(ProblemInstance::new(a, b, Some(x_true), x0)?.with_svd(s))
}
