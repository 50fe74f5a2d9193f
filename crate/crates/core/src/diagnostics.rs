//! One-step expectation oracle and the quantities it is checked against.
//!
//! Every "in expectation" statement about a single Kaczmarz step can be
//! evaluated exactly: the next iterate takes one of `m` values, one per
//! row, with weights `‖a_i‖² / ‖A‖_F²`. [`expected_next`] enumerates them.
//! The bound reports compare that number with
//!
//! ```text
//! (1 + α/‖A‖_F²) ‖A r‖² - (2/‖A‖_F²) ‖AᵀA r‖²,   α = max_i ‖A a_i‖² / ‖a_i‖²
//! ```
//!
//! its power-`ℓ` counterpart for symmetric `A`, and the exact three-term
//! expansion obtained by squaring out the update.
//!
//! For a consistent system `A r = A x - b`, so the `A r` based quantities
//! never need the exact solution. Rectangular `m x n` matrices use the same
//! formula for `α`: each row `a_i` lies in `Rⁿ`, so `A a_i` is defined.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::{kaczmarz_step, residual, ProblemInstance};
use crate::linalg::{dot, norm, norm_sq, sub, DenseMatrix};
use crate::svd::SvdResult;

/// Additive slack `1e-10 · (1 + |rhs|)` for the one-step inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-10;
/// Relative tolerance for enumeration vs. three-term expansion.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Relative tolerance for the one-step spectral decay identity.
pub const SPECTRAL_TOL: f64 = 1e-8;
/// Symmetry tolerance relative to `max |A_ij|`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// `‖A^ℓ a_i‖² / ‖a_i‖²` for every row.
pub fn row_gains(a: &DenseMatrix, ell: usize) -> Result<Vec<f64>> {
    if ell >= 2 {
        a.require_square("row_gains")?;
    }
    (0..a.n_rows())
        .map(|i| {
            let row = a.row(i);
            let w = norm_sq(row);
            if w == 0.0 {
                return Err(Error::ZeroRow { row: i });
            }
            Ok(norm_sq(&a.power_apply(row, ell)?) / w)
        })
        .collect()
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `α = max_i ‖A a_i‖² / ‖a_i‖²`.
pub fn alpha(a: &DenseMatrix) -> Result<f64> {
    Ok(max_of(&row_gains(a, 1)?))
}

/// `α_ℓ = max_i ‖A^ℓ a_i‖² / ‖a_i‖²` for square `A`.
pub fn alpha_ell(a: &DenseMatrix, ell: usize) -> Result<f64> {
    a.require_square("alpha_ell")?;
    if ell == 0 {
        return Err(Error::InvalidProblem("alpha_ell needs ell >= 1".into()));
    }
    Ok(max_of(&row_gains(a, ell)?))
}

/// Quantities whose one-step expectation [`expected_next`] can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// `‖A x' - b‖² = ‖A r'‖²`
    AResidualNormSq,
    /// `‖x' - x_true‖²`
    ErrorNormSq,
    /// `‖A^ℓ r'‖²`, `ℓ >= 1`, evaluated as `‖A^(ℓ-1) (A x' - b)‖²`.
    AEllResidualNormSq(usize),
    /// `<x' - x_true, v_ℓ>` with 1-based `ℓ`.
    SpectralCoeff(usize),
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownName {
            kind: "functional",
            name: s.to_string(),
        };
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<usize>().map_err(|_| unknown())?)),
            None => (s, None),
        };
        match (name.to_ascii_lowercase().as_str(), arg) {
            ("a_residual_normsq", None) => Ok(Functional::AResidualNormSq),
            ("error_normsq", None) => Ok(Functional::ErrorNormSq),
            ("a_ell_residual_normsq", Some(l)) if l >= 1 => Ok(Functional::AEllResidualNormSq(l)),
            ("spectral_coeff", Some(l)) if l >= 1 => Ok(Functional::SpectralCoeff(l)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::AResidualNormSq => write!(f, "a_residual_normsq"),
            Functional::ErrorNormSq => write!(f, "error_normsq"),
            Functional::AEllResidualNormSq(l) => write!(f, "a_ell_residual_normsq:{l}"),
            Functional::SpectralCoeff(l) => write!(f, "spectral_coeff:{l}"),
        }
    }
}

fn require_x_true(problem: &ProblemInstance) -> Result<&[f64]> {
    problem
        .x_true
        .as_deref()
        .ok_or_else(|| Error::InvalidProblem("this quantity needs the exact solution x_true".into()))
}

/// Exact `E f(x_{k+1})` given `x_k = x`, by enumeration over rows.
pub fn expected_next(problem: &ProblemInstance, x: &[f64], functional: Functional) -> Result<f64> {
    let a = &problem.a;
    let b = &problem.b;
    let frob = a.frobenius_norm_sq();
    let svd = match functional {
        Functional::SpectralCoeff(_) => Some(problem.svd_or_compute()?),
        _ => None,
    };
    let eval = |next: &[f64]| -> Result<f64> {
        match functional {
            Functional::AResidualNormSq => Ok(norm_sq(&residual(a, b, next)?)),
            Functional::ErrorNormSq => Ok(norm_sq(&sub(next, require_x_true(problem)?))),
            Functional::AEllResidualNormSq(ell) => {
                if ell == 0 {
                    return Err(Error::InvalidProblem("ell must be >= 1".into()));
                }
                if ell >= 2 {
                    a.require_square("expected_next")?;
                }
                Ok(norm_sq(&a.power_apply(&residual(a, b, next)?, ell - 1)?))
            }
            Functional::SpectralCoeff(ell) => {
                let svd = svd.as_ref().expect("computed above");
                let v = spectral_vector(svd, ell)?;
                Ok(dot(&sub(next, require_x_true(problem)?), v))
            }
        }
    };
    let mut acc = 0.0;
    for i in 0..a.n_rows() {
        let w = a.row_norm_sq(i);
        if w == 0.0 {
            continue;
        }
        let next = kaczmarz_step(a, b, x, i)?;
        acc += (w / frob) * eval(&next)?;
    }
    Ok(acc)
}

fn spectral_vector(svd: &SvdResult, ell: usize) -> Result<&[f64]> {
    if ell == 0 || ell > svd.rank() {
        return Err(Error::InvalidProblem(format!(
            "spectral index {ell} outside 1..={}",
            svd.rank()
        )));
    }
    Ok(svd.right_vector(ell - 1))
}

/// One-step comparison of the exact expectation with the bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub k: usize,
    /// Power of `A`; 1 for the first-order bound.
    pub ell: usize,
    /// `‖A^ℓ r_k‖²`
    pub current: f64,
    /// `E ‖A^ℓ r_{k+1}‖²` by enumeration.
    pub lhs_exact: f64,
    /// `(1 + α_ℓ/F) ‖A^ℓ r_k‖² - (2/F) ‖A^ℓ⁺¹ r_k‖²` (`AᵀA r` for `ℓ = 1`).
    pub rhs: f64,
    /// `‖A^ℓ r_k‖² + (α_ℓ/F) ‖A r_k‖² - (2/F) ‖A^ℓ⁺¹ r_k‖²`, the bound the
    /// squared-out expansion yields directly. Equals `rhs` at `ℓ = 1`.
    pub rhs_proof: f64,
    /// Three-term expansion of the expectation.
    pub expansion: f64,
    pub identity_residual: f64,
    /// `rhs - current`
    pub decrement: f64,
}

impl BoundReport {
    pub fn inequality_holds(&self) -> bool {
        self.lhs_exact <= self.rhs + INEQUALITY_SLACK * (1.0 + self.rhs.abs())
    }

    pub fn proof_bound_holds(&self) -> bool {
        self.lhs_exact <= self.rhs_proof + INEQUALITY_SLACK * (1.0 + self.rhs_proof.abs())
    }

    pub fn identity_holds(&self) -> bool {
        self.identity_residual <= IDENTITY_TOL * self.current.max(self.lhs_exact)
    }
}

/// Precomputed constants for repeated bound evaluation on one matrix.
#[derive(Debug, Clone)]
pub struct BoundChecker {
    ell: usize,
    /// Built by [`BoundChecker::power`]: uses `A^ℓ⁺¹ r` in place of `AᵀA r`.
    symmetric: bool,
    frob: f64,
    gains: Vec<f64>,
    alpha: f64,
}

impl BoundChecker {
    /// First-order checker; any `m x n` with `m >= n`.
    pub fn first_order(a: &DenseMatrix) -> Result<Self> {
        let gains = row_gains(a, 1)?;
        Ok(BoundChecker {
            ell: 1,
            symmetric: false,
            frob: a.frobenius_norm_sq(),
            alpha: max_of(&gains),
            gains,
        })
    }

    /// Power-`ℓ` checker; requires a symmetric matrix.
    pub fn power(a: &DenseMatrix, ell: usize) -> Result<Self> {
        require_symmetric(a)?;
        if ell == 0 {
            return Err(Error::InvalidProblem("ell must be >= 1".into()));
        }
        let gains = row_gains(a, ell)?;
        Ok(BoundChecker {
            ell,
            symmetric: true,
            frob: a.frobenius_norm_sq(),
            alpha: max_of(&gains),
            gains,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `(α/F) ‖A x - b‖² - (2/F) ‖Aᵀ(A x - b)‖²`, the predicted one-step change.
    pub fn predicted_decrement(&self, a: &DenseMatrix, b: &[f64], x: &[f64]) -> Result<f64> {
        let res = residual(a, b, x)?;
        let grad_sq = norm_sq(&a.transpose_matvec(&res)?);
        Ok(self.alpha / self.frob * norm_sq(&res) - 2.0 / self.frob * grad_sq)
    }

    pub fn report(&self, problem: &ProblemInstance, x: &[f64], k: usize) -> Result<BoundReport> {
        let a = &problem.a;
        let res = residual(a, &problem.b, x)?;
        let frob = self.frob;
        let ar_sq = norm_sq(&res);
        let cross: f64 = res
            .iter()
            .zip(&self.gains)
            .map(|(ri, g)| ri * ri * g)
            .sum::<f64>()
            / frob;

        let (current, next_sq, middle, lhs_exact) = if !self.symmetric {
            let grad_sq = norm_sq(&a.transpose_matvec(&res)?);
            let lhs = expected_next(problem, x, Functional::AResidualNormSq)?;
            (ar_sq, grad_sq, 2.0 / frob * grad_sq, lhs)
        } else {
            let ell = self.ell;
            let a_ell_r = a.power_apply(&res, ell - 1)?;
            let next = a.matvec(&a_ell_r)?;
            // (A^ℓ)ᵀ A^ℓ r without using symmetry
            let mut w = a_ell_r.clone();
            for _ in 0..ell {
                w = a.transpose_matvec(&w)?;
            }
            let middle = 2.0 / frob * dot(&res, &a.matvec(&w)?);
            let lhs = expected_next(problem, x, Functional::AEllResidualNormSq(ell))?;
            (norm_sq(&a_ell_r), norm_sq(&next), middle, lhs)
        };

        let rhs = (1.0 + self.alpha / frob) * current - 2.0 / frob * next_sq;
        let rhs_proof = current + self.alpha / frob * ar_sq - 2.0 / frob * next_sq;
        let expansion = current - middle + cross;
        Ok(BoundReport {
            k,
            ell: self.ell,
            current,
            lhs_exact,
            rhs,
            rhs_proof,
            expansion,
            identity_residual: (lhs_exact - expansion).abs(),
            decrement: rhs - current,
        })
    }
}

pub fn require_symmetric(a: &DenseMatrix) -> Result<()> {
    let asym = a.max_asymmetry()?;
    if asym > SYMMETRY_TOL * a.max_abs() {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym,
        });
    }
    Ok(())
}

/// First-order bound report at iterate `x`.
pub fn theorem1_report(problem: &ProblemInstance, x: &[f64]) -> Result<BoundReport> {
    BoundChecker::first_order(&problem.a)?.report(problem, x, 0)
}

/// Power-`ℓ` bound report at iterate `x`; `A` must be symmetric.
pub fn theorem2_report(problem: &ProblemInstance, x: &[f64], ell: usize) -> Result<BoundReport> {
    BoundChecker::power(&problem.a, ell)?.report(problem, x, 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    /// `<x_k - x_true, v_ℓ>`, ℓ = 1..n
    pub coeffs: Vec<f64>,
    pub sigmas: Vec<f64>,
}

pub fn spectral_coeffs(x_k: &[f64], x_true: &[f64], svd: &SvdResult) -> Result<SpectralCoeffs> {
    let n = svd.right_vector(0).len();
    crate::linalg::check_len("spectral_coeffs", n, x_k.len())?;
    crate::linalg::check_len("spectral_coeffs", n, x_true.len())?;
    let r = sub(x_k, x_true);
    Ok(SpectralCoeffs {
        coeffs: svd.right_vectors.iter().map(|v| dot(&r, v)).collect(),
        sigmas: svd.singular_values.clone(),
    })
}

/// `(1 - σ²/F)^k c_0`: the mean of a spectral coefficient after `k` steps.
pub fn spectral_mean_prediction(sigma: f64, frob_sq: f64, k: usize, initial: f64) -> f64 {
    (1.0 - sigma * sigma / frob_sq).powi(k as i32) * initial
}

/// Expected-error contraction factor `1 - σ_min² / ‖A‖_F²`.
pub fn sv_rate(svd: &SvdResult, frob_sq: f64) -> Result<f64> {
    let sigma_min = svd.sigma_min();
    let sigma_max = svd.sigma_max();
    if sigma_min <= 1e-12 * sigma_max {
        return Err(Error::IllPosed {
            sigma_min,
            sigma_max,
        });
    }
    Ok(1.0 - sigma_min * sigma_min / frob_sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SobolevOrder {
    /// `<L u, u>`
    H1,
    /// `<L u, L u>`
    H2,
}

impl TryFrom<u8> for SobolevOrder {
    type Error = Error;

    fn try_from(order: u8) -> Result<Self> {
        match order {
            1 => Ok(SobolevOrder::H1),
            2 => Ok(SobolevOrder::H2),
            other => Err(Error::UnknownName {
                kind: "seminorm order",
                name: other.to_string(),
            }),
        }
    }
}

/// Discrete homogeneous Sobolev seminorm (squared) of `u` under operator `l`.
pub fn sobolev_seminorm_sq(l: &DenseMatrix, u: &[f64], order: SobolevOrder) -> Result<f64> {
    let lu = l.matvec(u)?;
    match order {
        SobolevOrder::H1 => {
            let value = dot(&lu, u);
            if value < -1e-12 * norm_sq(u) {
                return Err(Error::NotPositiveDefinite { value });
            }
            Ok(value.max(0.0))
        }
        SobolevOrder::H2 => Ok(norm_sq(&lu)),
    }
}

/// Per-step quantities the iteration driver can record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagnostic {
    /// Predicted first-order change of `‖A x_k - b‖²`.
    Decrement,
    /// Exact expectation, first-order bound and identity residual.
    Theorem1,
    /// Same for `‖A^ℓ r‖²` (symmetric `A`).
    Theorem2(usize),
    /// `<(x_k - x)/‖x_k - x‖, v_1>`
    LeadingCosine,
    /// `<x_k - x, v_ℓ>`, 1-based.
    SpectralCoeff(usize),
    /// `‖x_k - x‖²`
    ErrorNormSq,
    /// Seminorm of `x_k - x` with `A` as the operator.
    Sobolev(SobolevOrder),
}

impl Diagnostic {
    pub fn columns(&self) -> Vec<String> {
        match self {
            Diagnostic::Decrement => vec!["decrement".into()],
            Diagnostic::Theorem1 => vec![
                "lhs_exact".into(),
                "rhs_thm1".into(),
                "identity_residual".into(),
            ],
            Diagnostic::Theorem2(l) => vec![
                format!("lhs_exact_l{l}"),
                format!("rhs_thm2_l{l}"),
                format!("rhs_proof_l{l}"),
                format!("identity_residual_l{l}"),
            ],
            Diagnostic::LeadingCosine => vec!["v1_cosine".into()],
            Diagnostic::SpectralCoeff(l) => vec![format!("coeff_{l}")],
            Diagnostic::ErrorNormSq => vec!["error_normsq".into()],
            Diagnostic::Sobolev(SobolevOrder::H1) => vec!["h1_error".into()],
            Diagnostic::Sobolev(SobolevOrder::H2) => vec!["h2_error".into()],
        }
    }
}

impl FromStr for Diagnostic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownName {
            kind: "diagnostic",
            name: s.to_string(),
        };
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<usize>().map_err(|_| unknown())?)),
            None => (s, None),
        };
        match (name, arg) {
            ("decrement", None) => Ok(Diagnostic::Decrement),
            ("theorem1", None) => Ok(Diagnostic::Theorem1),
            ("theorem2", Some(l)) if l >= 1 => Ok(Diagnostic::Theorem2(l)),
            ("v1_cosine", None) => Ok(Diagnostic::LeadingCosine),
            ("coeff", Some(l)) if l >= 1 => Ok(Diagnostic::SpectralCoeff(l)),
            ("error_normsq", None) => Ok(Diagnostic::ErrorNormSq),
            ("h1", None) => Ok(Diagnostic::Sobolev(SobolevOrder::H1)),
            ("h2", None) => Ok(Diagnostic::Sobolev(SobolevOrder::H2)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Decrement => write!(f, "decrement"),
            Diagnostic::Theorem1 => write!(f, "theorem1"),
            Diagnostic::Theorem2(l) => write!(f, "theorem2:{l}"),
            Diagnostic::LeadingCosine => write!(f, "v1_cosine"),
            Diagnostic::SpectralCoeff(l) => write!(f, "coeff:{l}"),
            Diagnostic::ErrorNormSq => write!(f, "error_normsq"),
            Diagnostic::Sobolev(SobolevOrder::H1) => write!(f, "h1"),
            Diagnostic::Sobolev(SobolevOrder::H2) => write!(f, "h2"),
        }
    }
}

/// Everything the requested diagnostics need, computed once per problem.
#[derive(Debug, Clone)]
pub struct DiagnosticContext<'p> {
    problem: &'p ProblemInstance,
    diagnostics: Vec<Diagnostic>,
    first_order: Option<BoundChecker>,
    powers: Vec<(usize, BoundChecker)>,
    svd: Option<SvdResult>,
}

impl<'p> DiagnosticContext<'p> {
    pub fn new(problem: &'p ProblemInstance, diagnostics: &[Diagnostic]) -> Result<Self> {
        let needs = |pred: fn(&Diagnostic) -> bool| diagnostics.iter().any(pred);
        if needs(|d| {
            matches!(
                d,
                Diagnostic::LeadingCosine
                    | Diagnostic::SpectralCoeff(_)
                    | Diagnostic::ErrorNormSq
                    | Diagnostic::Sobolev(_)
            )
        }) {
            require_x_true(problem)?;
        }
        let first_order = if needs(|d| matches!(d, Diagnostic::Decrement | Diagnostic::Theorem1)) {
            Some(BoundChecker::first_order(&problem.a)?)
        } else {
            None
        };
        let mut powers = Vec::new();
        for d in diagnostics {
            if let Diagnostic::Theorem2(l) = *d {
                if !powers.iter().any(|(ell, _)| *ell == l) {
                    powers.push((l, BoundChecker::power(&problem.a, l)?));
                }
            }
        }
        let svd = if needs(|d| matches!(d, Diagnostic::LeadingCosine | Diagnostic::SpectralCoeff(_))) {
            let svd = problem.svd_or_compute()?.into_owned();
            for d in diagnostics {
                if let Diagnostic::SpectralCoeff(l) = *d {
                    spectral_vector(&svd, l)?;
                }
            }
            Some(svd)
        } else {
            None
        };
        Ok(DiagnosticContext {
            problem,
            diagnostics: diagnostics.to_vec(),
            first_order,
            powers,
            svd,
        })
    }

    pub fn columns(&self) -> Vec<String> {
        self.diagnostics.iter().flat_map(Diagnostic::columns).collect()
    }

    pub fn first_order(&self) -> Option<&BoundChecker> {
        self.first_order.as_ref()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.problem;
        let mut out = Vec::new();
        for d in &self.diagnostics {
            match *d {
                Diagnostic::Decrement => {
                    let c = self.first_order.as_ref().expect("built in new");
                    out.push(c.predicted_decrement(&p.a, &p.b, x)?);
                }
                Diagnostic::Theorem1 => {
                    let c = self.first_order.as_ref().expect("built in new");
                    let r = c.report(p, x, 0)?;
                    out.extend([r.lhs_exact, r.rhs, r.identity_residual]);
                }
                Diagnostic::Theorem2(l) => {
                    let (_, c) = self.powers.iter().find(|(ell, _)| *ell == l).expect("built in new");
                    let r = c.report(p, x, 0)?;
                    out.extend([r.lhs_exact, r.rhs, r.rhs_proof, r.identity_residual]);
                }
                Diagnostic::LeadingCosine => {
                    let r = sub(x, require_x_true(p)?);
                    let len = norm(&r);
                    let v1 = self.svd.as_ref().expect("built in new").right_vector(0);
                    out.push(if len > 0.0 { dot(&r, v1) / len } else { 0.0 });
                }
                Diagnostic::SpectralCoeff(l) => {
                    let r = sub(x, require_x_true(p)?);
                    let v = spectral_vector(self.svd.as_ref().expect("built in new"), l)?;
                    out.push(dot(&r, v));
                }
                Diagnostic::ErrorNormSq => out.push(norm_sq(&sub(x, require_x_true(p)?))),
                Diagnostic::Sobolev(order) => {
                    let r = sub(x, require_x_true(p)?);
                    out.push(sobolev_seminorm_sq(&p.a, &r, order)?);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::gen_laplacian_1d;
    use crate::sampling::Rng;
    use crate::svd::svd;

    fn instance(a: DenseMatrix, seed: u64) -> ProblemInstance {
        let mut rng = Rng::new(seed);
        let x_true = rng.normal_vec(a.n_cols());
        let b = a.matvec(&x_true).unwrap();
        let n = a.n_cols();
        ProblemInstance::new(a, b, Some(x_true), vec![0.0; n]).unwrap()
    }

    fn gaussian(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut rng = Rng::new(seed);
        DenseMatrix::from_fn(m, n, |_, _| rng.next_normal()).unwrap()
    }

    fn symmetric(n: usize, seed: u64) -> DenseMatrix {
        let g = gaussian(n, n, seed);
        DenseMatrix::from_fn(n, n, |i, j| 0.5 * (g.get(i, j) + g.get(j, i))).unwrap()
    }

    #[test]
    fn alpha_small_cases() {
        assert_eq!(alpha(&DenseMatrix::identity(4)).unwrap(), 1.0);
        assert_eq!(alpha(&DenseMatrix::diag(&[1.0, 2.0]).unwrap()).unwrap(), 4.0);
        let z = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(alpha(&z), Err(Error::ZeroRow { row: 1 })));
    }

    #[test]
    fn alpha_ell_small_cases() {
        assert_eq!(alpha_ell(&DenseMatrix::identity(3), 4).unwrap(), 1.0);
        assert_eq!(alpha_ell(&DenseMatrix::diag(&[1.0, 2.0]).unwrap(), 2).unwrap(), 16.0);
        let rect = gaussian(4, 3, 1);
        assert!(matches!(alpha_ell(&rect, 1), Err(Error::NotSquare { .. })));
        let a = symmetric(5, 2);
        assert_eq!(alpha_ell(&a, 1).unwrap(), alpha(&a).unwrap());
    }

    #[test]
    fn alpha_ell_matches_explicit_cube() {
        let a = symmetric(10, 3);
        let cube = a.matmul(&a).unwrap().matmul(&a).unwrap();
        let explicit = (0..10)
            .map(|i| norm_sq(&cube.matvec(a.row(i)).unwrap()) / norm_sq(a.row(i)))
            .fold(f64::NEG_INFINITY, f64::max);
        let got = alpha_ell(&a, 3).unwrap();
        assert!((got - explicit).abs() <= 1e-10 * explicit);
    }

    #[test]
    fn alpha_within_singular_range() {
        for seed in 0..5 {
            let a = gaussian(12, 8, seed);
            let s = svd(&a).unwrap();
            let al = alpha(&a).unwrap();
            assert!(al >= s.sigma_min().powi(2) * (1.0 - 1e-12));
            assert!(al <= s.sigma_max().powi(2) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn functional_names_round_trip() {
        for f in [
            Functional::AResidualNormSq,
            Functional::ErrorNormSq,
            Functional::AEllResidualNormSq(3),
            Functional::SpectralCoeff(2),
        ] {
            assert_eq!(f.to_string().parse::<Functional>().unwrap(), f);
        }
        assert!(matches!(
            "bogus".parse::<Functional>(),
            Err(Error::UnknownName { .. })
        ));
        assert!("spectral_coeff:0".parse::<Functional>().is_err());
    }

    #[test]
    fn identity_closed_forms() {
        let n = 6;
        let p = instance(DenseMatrix::identity(n), 4);
        let x = Rng::new(5).normal_vec(n);
        let r_sq = norm_sq(&sub(&x, p.x_true.as_ref().unwrap()));
        let want = (1.0 - 1.0 / n as f64) * r_sq;
        let e = expected_next(&p, &x, Functional::ErrorNormSq).unwrap();
        let ar = expected_next(&p, &x, Functional::AResidualNormSq).unwrap();
        assert!((e - want).abs() <= 1e-13 * want);
        assert!((ar - want).abs() <= 1e-13 * want);
        let rep = theorem1_report(&p, &x).unwrap();
        assert!((rep.rhs - want).abs() <= 1e-13 * want);
        assert!((rep.lhs_exact - rep.rhs).abs() <= 1e-12 * want);
    }

    #[test]
    fn enumeration_matches_expansion() {
        let p = instance(gaussian(20, 20, 7), 8);
        let x = Rng::new(9).normal_vec(20);
        let rep = theorem1_report(&p, &x).unwrap();
        assert!(rep.identity_residual <= 1e-10 * rep.lhs_exact);
        assert!(rep.identity_holds());
        assert!(rep.inequality_holds());
    }

    #[test]
    fn report_at_solution_is_zero() {
        let p = instance(gaussian(6, 6, 1), 2);
        let xt = p.x_true.clone().unwrap();
        let rep = theorem1_report(&p, &xt).unwrap();
        for v in [rep.lhs_exact, rep.rhs, rep.expansion, rep.decrement] {
            assert!(v.abs() < 1e-20, "{v}");
        }
        assert!(rep.inequality_holds() && rep.identity_holds());
    }

    #[test]
    fn theorem1_random_square_and_rectangular() {
        for (m, n) in [(50, 50), (30, 12)] {
            let p = instance(gaussian(m, n, m as u64), 3);
            let checker = BoundChecker::first_order(&p.a).unwrap();
            let mut rng = Rng::new(11);
            for _ in 0..20 {
                let x = rng.normal_vec(n);
                let rep = checker.report(&p, &x, 0).unwrap();
                assert!(rep.inequality_holds(), "{rep:?}");
                assert!(rep.identity_holds(), "{rep:?}");
            }
        }
    }

    #[test]
    fn theorem2_rejects_asymmetric() {
        let p = instance(gaussian(5, 5, 2), 1);
        assert!(matches!(
            theorem2_report(&p, &[0.0; 5], 2),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn theorem2_ell1_matches_theorem1() {
        let p = instance(symmetric(12, 5), 6);
        let x = Rng::new(7).normal_vec(12);
        let r1 = theorem1_report(&p, &x).unwrap();
        let r2 = theorem2_report(&p, &x, 1).unwrap();
        assert_eq!(r1.current, r2.current);
        assert_eq!(r1.rhs, r2.rhs);
        assert_eq!(r1.decrement, r2.decrement);
        assert!((r1.lhs_exact - r2.lhs_exact).abs() <= 1e-12 * r1.lhs_exact);
    }

    #[test]
    fn theorem2_random_symmetric() {
        let p = instance(symmetric(20, 9), 10);
        let mut rng = Rng::new(12);
        let checkers: Vec<BoundChecker> = (1..=3).map(|l| BoundChecker::power(&p.a, l).unwrap()).collect();
        for _ in 0..50 {
            let x = rng.normal_vec(20);
            for c in &checkers {
                let rep = c.report(&p, &x, 0).unwrap();
                assert!(rep.inequality_holds(), "{rep:?}");
                assert!(rep.proof_bound_holds(), "{rep:?}");
                assert!(rep.identity_holds(), "{rep:?}");
            }
        }
    }

    // With r on the smallest-|λ| eigenvector the α_ℓ‖A^ℓ r‖² form of the
    // power bound fails for ℓ >= 2, while the α_ℓ‖A r‖² form still holds.
    #[test]
    fn power_bound_needs_first_order_cross_term() {
        let a = symmetric(20, 3);
        let s = svd(&a).unwrap();
        let v_min = s.right_vectors.last().unwrap().clone();
        let x_true = vec![0.0; 20];
        let b = vec![0.0; 20];
        let p = ProblemInstance::new(a, b, Some(x_true), vec![0.0; 20]).unwrap();
        let r2 = theorem2_report(&p, &v_min, 2).unwrap();
        assert!(r2.proof_bound_holds());
        assert!(r2.identity_holds());
        assert!(!r2.inequality_holds(), "{r2:?}");
    }

    #[test]
    fn spectral_coeff_cases() {
        let a = gaussian(8, 8, 21);
        let s = svd(&a).unwrap();
        let xt = vec![1.0; 8];
        let zero = spectral_coeffs(&xt, &xt, &s).unwrap();
        assert!(zero.coeffs.iter().all(|c| *c == 0.0));
        let shifted: Vec<f64> = xt.iter().zip(&s.right_vectors[0]).map(|(x, v)| x + v).collect();
        let c = spectral_coeffs(&shifted, &xt, &s).unwrap();
        assert!((c.coeffs[0] - 1.0).abs() < 1e-12);
        assert!(c.coeffs[1..].iter().all(|v| v.abs() < 1e-12));
        let x = Rng::new(3).normal_vec(8);
        let c = spectral_coeffs(&x, &xt, &s).unwrap();
        let parseval: f64 = c.coeffs.iter().map(|v| v * v).sum();
        let direct = norm_sq(&sub(&x, &xt));
        assert!((parseval - direct).abs() <= 1e-10 * direct);
    }

    #[test]
    fn one_step_spectral_decay() {
        let p = instance(gaussian(15, 15, 31), 32);
        let s = p.svd_or_compute().unwrap().into_owned();
        let frob = p.a.frobenius_norm_sq();
        let x = Rng::new(33).normal_vec(15);
        let c = spectral_coeffs(&x, p.x_true.as_ref().unwrap(), &s).unwrap();
        for ell in 1..=15 {
            let got = expected_next(&p, &x, Functional::SpectralCoeff(ell)).unwrap();
            let want = spectral_mean_prediction(s.singular_values[ell - 1], frob, 1, c.coeffs[ell - 1]);
            assert!((got - want).abs() <= 1e-8 * want.abs(), "ell={ell}: {got} vs {want}");
        }
    }

    #[test]
    fn sv_rate_cases() {
        let id = svd(&DenseMatrix::identity(4)).unwrap();
        assert!((sv_rate(&id, 4.0).unwrap() - 0.75).abs() < 1e-15);
        let d = DenseMatrix::diag(&[1.0, 2.0]).unwrap();
        let sd = svd(&d).unwrap();
        assert!((sv_rate(&sd, d.frobenius_norm_sq()).unwrap() - 0.8).abs() < 1e-15);
        let sing = DenseMatrix::diag(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            sv_rate(&svd(&sing).unwrap(), 1.0),
            Err(Error::IllPosed { .. })
        ));
        let a = gaussian(30, 30, 4);
        let s = svd(&a).unwrap();
        let sum_sq: f64 = s.singular_values.iter().map(|x| x * x).sum();
        let rate = sv_rate(&s, a.frobenius_norm_sq()).unwrap();
        assert!((rate - (1.0 - s.sigma_min().powi(2) / sum_sq)).abs() < 1e-12);
        assert!(rate > 0.0 && rate < 1.0);
    }

    #[test]
    fn sobolev_cases() {
        let l = gen_laplacian_1d(3).unwrap();
        assert_eq!(sobolev_seminorm_sq(&l, &[0.0; 3], SobolevOrder::H1).unwrap(), 0.0);
        assert_eq!(sobolev_seminorm_sq(&l, &[0.0, 1.0, 0.0], SobolevOrder::H1).unwrap(), 2.0);
        assert_eq!(sobolev_seminorm_sq(&l, &[0.0, 1.0, 0.0], SobolevOrder::H2).unwrap(), 6.0);
        let neg = DenseMatrix::diag(&[-1.0, 1.0]).unwrap();
        assert!(matches!(
            sobolev_seminorm_sq(&neg, &[1.0, 0.0], SobolevOrder::H1),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(SobolevOrder::try_from(3).is_err());
    }

    #[test]
    fn sobolev_eigen_expansion() {
        let n = 12;
        let l = gen_laplacian_1d(n).unwrap();
        let s = svd(&l).unwrap();
        let u = Rng::new(44).normal_vec(n);
        let (mut h1, mut h2) = (0.0, 0.0);
        for (lambda, w) in s.singular_values.iter().zip(&s.right_vectors) {
            let c = dot(&u, w);
            h1 += lambda * c * c;
            h2 += lambda * lambda * c * c;
        }
        let got1 = sobolev_seminorm_sq(&l, &u, SobolevOrder::H1).unwrap();
        let got2 = sobolev_seminorm_sq(&l, &u, SobolevOrder::H2).unwrap();
        assert!((got1 - h1).abs() <= 1e-9 * h1);
        assert!((got2 - h2).abs() <= 1e-9 * h2);
    }

    #[test]
    fn monte_carlo_agrees_with_enumeration() {
        let p = instance(gaussian(10, 10, 51), 52);
        let x = Rng::new(53).normal_vec(10);
        let exact = expected_next(&p, &x, Functional::AResidualNormSq).unwrap();
        let sampler = crate::sampling::RowSampler::new(&p.a).unwrap();
        let mut rng = Rng::new(54);
        let draws = 20_000;
        let samples: Vec<f64> = (0..draws)
            .map(|_| {
                let i = sampler.sample(&mut rng);
                let next = kaczmarz_step(&p.a, &p.b, &x, i).unwrap();
                norm_sq(&residual(&p.a, &p.b, &next).unwrap())
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        assert!((mean - exact).abs() <= 5.0 * se, "{mean} vs {exact} (se {se})");
    }

    #[test]
    fn diagnostic_names_parse() {
        for d in [
            Diagnostic::Decrement,
            Diagnostic::Theorem1,
            Diagnostic::Theorem2(2),
            Diagnostic::LeadingCosine,
            Diagnostic::SpectralCoeff(5),
            Diagnostic::ErrorNormSq,
            Diagnostic::Sobolev(SobolevOrder::H1),
            Diagnostic::Sobolev(SobolevOrder::H2),
        ] {
            assert_eq!(d.to_string().parse::<Diagnostic>().unwrap(), d);
        }
        assert!("theorem2".parse::<Diagnostic>().is_err());
        assert!("nope".parse::<Diagnostic>().is_err());
    }
}
