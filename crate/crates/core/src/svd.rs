//! Thin SVD by one-sided (Hestenes) Jacobi rotations on columns.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, DenseMatrix};

pub const MAX_SWEEPS: usize = 60;

/// `A = U Σ Vᵀ` with singular values sorted non-increasing.
///
/// Each right vector `v_ℓ` is signed so its largest-magnitude entry is
/// positive; `u_ℓ` follows. For an `m x n` input with `m >= n` there are `n`
/// triplets (`min(m, n)` in general).
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    /// `v_ℓ`, each of length `n_cols`.
    pub right_vectors: Vec<Vec<f64>>,
    /// `u_ℓ`, each of length `n_rows`. Zero for vanishing `σ_ℓ`.
    pub left_vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values[0]
    }

    pub fn sigma_min(&self) -> f64 {
        *self.singular_values.last().expect("non-empty SVD")
    }

    pub fn right_vector(&self, ell: usize) -> &[f64] {
        &self.right_vectors[ell]
    }

    /// Minimum-norm least-squares solution `V Σ⁻¹ Uᵀ b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let sigma_max = self.sigma_max();
        let sigma_min = self.sigma_min();
        if sigma_min <= 1e-10 * sigma_max {
            return Err(Error::IllPosed {
                sigma_min,
                sigma_max,
            });
        }
        let n = self.right_vectors[0].len();
        let mut x = vec![0.0; n];
        for ((u, v), s) in self
            .left_vectors
            .iter()
            .zip(&self.right_vectors)
            .zip(&self.singular_values)
        {
            if u.len() != b.len() {
                return Err(Error::DimensionMismatch {
                    op: "SvdResult::solve",
                    expected: u.len(),
                    got: b.len(),
                });
            }
            let coeff = dot(u, b) / s;
            crate::linalg::axpy(coeff, v, &mut x);
        }
        Ok(x)
    }

    /// `U Σ Vᵀ` as a dense matrix.
    pub fn reconstruct(&self) -> DenseMatrix {
        let m = self.left_vectors[0].len();
        let n = self.right_vectors[0].len();
        DenseMatrix::from_fn(m, n, |i, j| {
            self.singular_values
                .iter()
                .enumerate()
                .map(|(l, s)| s * self.left_vectors[l][i] * self.right_vectors[l][j])
                .sum()
        })
        .expect("reconstruction is finite")
    }
}

/// Computes the thin SVD of `a`.
///
/// Rotations are applied whenever a column pair has
/// `|<c_p, c_q>| > max(m, n) * eps * ‖c_p‖‖c_q‖`; the iteration stops after
/// a sweep with no rotation.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    if a.n_rows() < a.n_cols() {
        let t = svd(&a.transpose())?;
        let mut out = SvdResult {
            singular_values: t.singular_values,
            right_vectors: t.left_vectors,
            left_vectors: t.right_vectors,
            sweeps: t.sweeps,
        };
        fix_signs(&mut out);
        return Ok(out);
    }

    let m = a.n_rows();
    let n = a.n_cols();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    let mut vs: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let tol = (m.max(n) as f64) * f64::EPSILON;

    let mut sweeps = 0;
    loop {
        if sweeps == MAX_SWEEPS {
            let off = max_off_diagonal(&cols);
            return Err(Error::SvdNoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        let mut norms: Vec<f64> = cols.iter().map(|c| norm_sq(c)).collect();
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, c, s);
                rotate_pair(&mut vs, p, q, c, s);
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut triplets: Vec<(f64, Vec<f64>, Vec<f64>)> = cols
        .into_iter()
        .zip(vs)
        .map(|(c, v)| {
            let sigma = norm_sq(&c).sqrt();
            let u = if sigma > 0.0 {
                c.iter().map(|x| x / sigma).collect()
            } else {
                vec![0.0; m]
            };
            (sigma, u, v)
        })
        .collect();
    triplets.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut out = SvdResult {
        singular_values: Vec::with_capacity(n),
        right_vectors: Vec::with_capacity(n),
        left_vectors: Vec::with_capacity(n),
        sweeps,
    };
    for (s, u, v) in triplets {
        out.singular_values.push(s);
        out.left_vectors.push(u);
        out.right_vectors.push(v);
    }
    fix_signs(&mut out);
    Ok(out)
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

fn max_off_diagonal(cols: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for p in 0..cols.len() {
        for q in (p + 1)..cols.len() {
            worst = worst.max(dot(&cols[p], &cols[q]).abs());
        }
    }
    worst
}

fn fix_signs(out: &mut SvdResult) {
    for (v, u) in out.right_vectors.iter_mut().zip(out.left_vectors.iter_mut()) {
        let mut pivot = 0.0f64;
        for &x in v.iter() {
            if x.abs() > pivot.abs() {
                pivot = x;
            }
        }
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
}
