//! Experiment commands: solve, verify, reproduce and Monte-Carlo sweeps.
//!
//! Configs are TOML files whose keys mirror [`RunConfig`]; command-line
//! values override them through [`Overrides`]. All output is CSV with `.`
//! decimals, `\n` line endings and 17 significant digits per float.
//!
//! Run `j` of a multi-run command uses seed `derive_seed(seed, j)` (or the
//! base seed itself for every run when `same_seed = true`) and writes to
//! `<stem>_run<j>.<ext>` next to `output_path`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::diagnostics::{BoundChecker, BoundReport, Diagnostic};
use crate::error::{Error, Result};
use crate::io::{format_f64, write_file};
use crate::kernel::{run, run_with_context, KaczmarzSolver, ProblemInstance, Trace};
use crate::linalg::norm;
use crate::problems::{build_problem, ProblemKind, ProblemSpec, RhsKind, X0Kind};
use crate::sampling::{derive_seed, Rng};

/// Salt for per-run initial iterates in the Figure 3 setup.
const X0_STREAM: u64 = 2;

fn default_one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub steps: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_one")]
    pub record_stride: usize,
    #[serde(default)]
    pub diagnostics: Vec<String>,
    #[serde(default = "default_one")]
    pub runs: usize,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Give every Monte-Carlo run the base seed instead of derived seeds.
    #[serde(default)]
    pub same_seed: bool,
    /// Which bound `verify` checks: 1 (first order) or 2 (powers, symmetric).
    #[serde(default)]
    pub theorem: Option<u8>,
    /// Powers checked when `theorem = 2`.
    #[serde(default)]
    pub ells: Option<Vec<usize>>,
}

/// Command-line values; each `Some` replaces the config value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub runs: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub record_stride: Option<usize>,
    pub diagnostics: Option<Vec<String>>,
    pub theorem: Option<u8>,
    pub ells: Option<Vec<usize>>,
    pub n: Option<usize>,
}

impl RunConfig {
    pub fn new(problem: ProblemSpec, steps: usize, seed: u64) -> Self {
        RunConfig {
            problem,
            steps,
            seed: Some(seed),
            record_stride: 1,
            diagnostics: Vec::new(),
            runs: 1,
            output_path: None,
            same_seed: false,
            theorem: None,
            ells: None,
        }
    }

    /// Parses TOML. A `[problem]` table without `seed` inherits the run seed.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<config>", e.message().to_string()))?;
        let problem_has_seed = value
            .get("problem")
            .and_then(|p| p.as_table())
            .is_some_and(|t| t.contains_key("seed"));
        let mut config: RunConfig = value
            .try_into()
            .map_err(|e: toml::de::Error| Error::config("<config>", e.message().to_string()))?;
        if !problem_has_seed {
            config.problem.seed = config.seed.unwrap_or(0);
        }
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            // An overridden run seed also moves a problem seed that was inherited.
            if self.seed == Some(self.problem.seed) || self.seed.is_none() {
                self.problem.seed = seed;
            }
            self.seed = Some(seed);
        }
        if let Some(v) = o.steps {
            self.steps = v;
        }
        if let Some(v) = o.runs {
            self.runs = v;
        }
        if let Some(v) = &o.output_path {
            self.output_path = Some(v.clone());
        }
        if let Some(v) = o.record_stride {
            self.record_stride = v;
        }
        if let Some(v) = &o.diagnostics {
            self.diagnostics = v.clone();
        }
        if let Some(v) = o.theorem {
            self.theorem = Some(v);
        }
        if let Some(v) = &o.ells {
            self.ells = Some(v.clone());
        }
        if let Some(v) = o.n {
            self.problem.n = v;
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::config("seed", "required (pass --seed or set seed in the config)"))
    }

    pub fn output_path(&self) -> Result<&Path> {
        self.output_path
            .as_deref()
            .ok_or_else(|| Error::config("output_path", "required (pass --out or set output_path)"))
    }

    pub fn parsed_diagnostics(&self) -> Result<Vec<Diagnostic>> {
        self.diagnostics.iter().map(|d| Diagnostic::from_str(d)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.seed()?;
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.record_stride == 0 {
            return Err(Error::config("record_stride", "must be at least 1"));
        }
        self.parsed_diagnostics()?;
        if let Some(t) = self.theorem {
            if t != 1 && t != 2 {
                return Err(Error::config("theorem", "must be 1 or 2"));
            }
        }
        if let Some(ells) = &self.ells {
            if ells.is_empty() || ells.contains(&0) {
                return Err(Error::config("ells", "need at least one power, all >= 1"));
            }
        }
        self.problem.validate()
    }

    fn run_seed(&self, j: usize) -> Result<u64> {
        let base = self.seed()?;
        Ok(if self.same_seed {
            base
        } else {
            derive_seed(base, j as u64)
        })
    }
}

/// `dir/stem.ext` → `dir/stem_run<j>.ext`
pub fn run_path(base: &Path, j: usize) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_run{j}.{}", ext.to_string_lossy()),
        None => format!("{stem}_run{j}"),
    };
    base.with_file_name(name)
}

fn csv_line(out: &mut String, fields: impl IntoIterator<Item = String>) {
    let fields: Vec<String> = fields.into_iter().collect();
    out.push_str(&fields.join(","));
    out.push('\n');
}

/// Trace as CSV: `k,residual_norm,error_norm,iterate_norm[,extras...]`.
pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::new();
    let header = ["k", "residual_norm", "error_norm", "iterate_norm"]
        .into_iter()
        .map(String::from)
        .chain(trace.extra_columns.iter().cloned());
    csv_line(&mut out, header);
    for row in &trace.rows {
        let fields = [
            row.k.to_string(),
            format_f64(row.residual_norm),
            row.error_norm.map(format_f64).unwrap_or_default(),
            format_f64(row.iterate_norm),
        ]
        .into_iter()
        .chain(row.extras.iter().map(|v| format_f64(*v)));
        csv_line(&mut out, fields);
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &Trace) -> Result<()> {
    write_file(path, &trace_to_csv(trace))
}

/// Per-step mean / sample standard deviation / min / max across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    pub quantities: Vec<String>,
    pub ks: Vec<usize>,
    /// `[step][quantity]`
    pub mean: Vec<Vec<f64>>,
    pub std: Vec<Vec<f64>>,
    pub min: Vec<Vec<f64>>,
    pub max: Vec<Vec<f64>>,
    pub runs: usize,
}

impl AggregateStats {
    pub fn from_traces(traces: &[Trace]) -> Result<Self> {
        let first = traces
            .first()
            .ok_or_else(|| Error::config("runs", "need at least one trace to aggregate"))?;
        let has_error = first.rows.iter().all(|r| r.error_norm.is_some());
        let mut quantities = vec!["residual_norm".to_string()];
        if has_error {
            quantities.push("error_norm".into());
        }
        quantities.push("iterate_norm".into());
        quantities.extend(first.extra_columns.iter().cloned());

        let ks: Vec<usize> = first.rows.iter().map(|r| r.k).collect();
        for t in traces {
            if t.rows.len() != ks.len() || t.rows.iter().zip(&ks).any(|(r, k)| r.k != *k) {
                return Err(Error::InvalidProblem("traces record different steps".into()));
            }
        }
        let values = |t: &Trace, s: usize| -> Vec<f64> {
            let r = &t.rows[s];
            let mut v = vec![r.residual_norm];
            if has_error {
                v.push(r.error_norm.expect("checked"));
            }
            v.push(r.iterate_norm);
            v.extend(&r.extras);
            v
        };
        let n = traces.len() as f64;
        let q = quantities.len();
        let mut stats = AggregateStats {
            quantities,
            ks,
            mean: Vec::new(),
            std: Vec::new(),
            min: Vec::new(),
            max: Vec::new(),
            runs: traces.len(),
        };
        for s in 0..stats.ks.len() {
            let per_run: Vec<Vec<f64>> = traces.iter().map(|t| values(t, s)).collect();
            let mut mean = vec![0.0; q];
            let mut std = vec![0.0; q];
            let mut lo = vec![f64::INFINITY; q];
            let mut hi = vec![f64::NEG_INFINITY; q];
            for c in 0..q {
                let col = per_run.iter().map(|v| v[c]);
                let sum: f64 = col.clone().sum();
                lo[c] = col.clone().fold(f64::INFINITY, f64::min);
                hi[c] = col.clone().fold(f64::NEG_INFINITY, f64::max);
                let m = (sum / n).clamp(lo[c], hi[c]);
                mean[c] = m;
                std[c] = if traces.len() > 1 {
                    (col.map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
            }
            stats.mean.push(mean);
            stats.std.push(std);
            stats.min.push(lo);
            stats.max.push(hi);
        }
        Ok(stats)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.quantities.iter().position(|q| q == name)
    }

    pub fn step(&self, k: usize) -> Option<usize> {
        self.ks.iter().position(|&x| x == k)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header = vec!["k".to_string()];
        for q in &self.quantities {
            for suffix in ["mean", "std", "min", "max"] {
                header.push(format!("{q}_{suffix}"));
            }
        }
        csv_line(&mut out, header);
        for (s, k) in self.ks.iter().enumerate() {
            let mut fields = vec![k.to_string()];
            for c in 0..self.quantities.len() {
                for v in [self.mean[s][c], self.std[s][c], self.min[s][c], self.max[s][c]] {
                    fields.push(format_f64(v));
                }
            }
            csv_line(&mut out, fields);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub paths: Vec<PathBuf>,
    pub traces: Vec<Trace>,
}

/// Runs the configured solve once per run and writes one trace CSV per run.
pub fn cmd_solve(config: &RunConfig) -> Result<SolveOutput> {
    config.validate()?;
    let out = config.output_path()?.to_path_buf();
    let problem = build_problem(&config.problem)?;
    let traces = run_many(&problem, config)?;
    let mut paths = Vec::with_capacity(traces.len());
    for (j, t) in traces.iter().enumerate() {
        let path = run_path(&out, j);
        write_trace_csv(&path, t)?;
        paths.push(path);
    }
    Ok(SolveOutput { paths, traces })
}

fn run_many(problem: &ProblemInstance, config: &RunConfig) -> Result<Vec<Trace>> {
    let diagnostics = config.parsed_diagnostics()?;
    let ctx = crate::diagnostics::DiagnosticContext::new(problem, &diagnostics)?;
    let seeds: Vec<u64> = (0..config.runs).map(|j| config.run_seed(j)).collect::<Result<_>>()?;
    seeds
        .par_iter()
        .map(|&seed| run_with_context(problem, config.steps, seed, config.record_stride, &ctx))
        .collect()
}

#[derive(Debug, Clone)]
pub struct MonteCarloOutput {
    pub aggregate: AggregateStats,
    pub path: PathBuf,
    pub run_paths: Vec<PathBuf>,
    pub traces: Vec<Trace>,
}

/// Runs `runs >= 2` independent solves on one instance and writes per-run
/// traces plus the aggregate CSV at `output_path`.
pub fn cmd_montecarlo(config: &RunConfig) -> Result<MonteCarloOutput> {
    config.validate()?;
    if config.runs < 2 {
        return Err(Error::config("runs", "montecarlo needs at least 2 runs"));
    }
    let out = config.output_path()?.to_path_buf();
    let problem = build_problem(&config.problem)?;
    let traces = run_many(&problem, config)?;
    let aggregate = AggregateStats::from_traces(&traces)?;
    let mut run_paths = Vec::with_capacity(traces.len());
    for (j, t) in traces.iter().enumerate() {
        let path = run_path(&out, j);
        write_trace_csv(&path, t)?;
        run_paths.push(path);
    }
    write_file(&out, &aggregate.to_csv())?;
    Ok(MonteCarloOutput {
        aggregate,
        path: out,
        run_paths,
        traces,
    })
}

#[derive(Debug, Clone)]
pub struct VerifyOutput {
    pub path: PathBuf,
    /// Per recorded step, one report per checked power.
    pub reports: Vec<Vec<BoundReport>>,
    pub inequality_violations: usize,
    pub identity_violations: usize,
}

impl VerifyOutput {
    pub fn passed(&self) -> bool {
        self.inequality_violations == 0 && self.identity_violations == 0
    }
}

/// Follows one trajectory and evaluates the bound reports at each recorded
/// step. `theorem = 2` requires a symmetric matrix.
pub fn cmd_verify(config: &RunConfig) -> Result<VerifyOutput> {
    config.validate()?;
    let out = config.output_path()?.to_path_buf();
    let problem = build_problem(&config.problem)?;
    let theorem = config.theorem.unwrap_or(1);
    let checkers: Vec<BoundChecker> = if theorem == 1 {
        vec![BoundChecker::first_order(&problem.a)?]
    } else {
        let ells = config.ells.clone().unwrap_or_else(|| vec![1, 2, 3]);
        ells.iter()
            .map(|&l| BoundChecker::power(&problem.a, l))
            .collect::<Result<_>>()?
    };

    let mut header = vec!["k".to_string()];
    for c in &checkers {
        if theorem == 1 {
            header.extend(["lhs_exact", "rhs_thm1", "identity_residual", "decrement"].map(String::from));
        } else {
            let l = c.ell();
            header.extend([
                format!("lhs_exact_l{l}"),
                format!("rhs_thm2_l{l}"),
                format!("rhs_proof_l{l}"),
                format!("identity_residual_l{l}"),
                format!("decrement_l{l}"),
            ]);
        }
    }
    let mut csv = String::new();
    csv_line(&mut csv, header);

    let mut solver = KaczmarzSolver::new(&problem, config.run_seed(0)?)?;
    let mut reports = Vec::new();
    let (mut ineq, mut ident) = (0, 0);
    for k in 0..=config.steps {
        if k > 0 {
            solver.step();
        }
        if !(k % config.record_stride == 0 || k == config.steps) {
            continue;
        }
        let x = solver.iterate();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure { step: k });
        }
        let mut fields = vec![k.to_string()];
        let mut row = Vec::with_capacity(checkers.len());
        for c in &checkers {
            let r = c.report(&problem, x, k)?;
            if !r.inequality_holds() {
                ineq += 1;
            }
            if !r.identity_holds() {
                ident += 1;
            }
            fields.push(format_f64(r.lhs_exact));
            fields.push(format_f64(r.rhs));
            if theorem == 2 {
                fields.push(format_f64(r.rhs_proof));
            }
            fields.push(format_f64(r.identity_residual));
            fields.push(format_f64(r.decrement));
            row.push(r);
        }
        csv_line(&mut csv, fields);
        reports.push(row);
    }
    write_file(&out, &csv)?;
    Ok(VerifyOutput {
        path: out,
        reports,
        inequality_violations: ineq,
        identity_violations: ident,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Residual plateau, n = 100, 20000 steps from `x0 = 0`.
    Fig1,
    /// Cosine between the error and `v_1` along a run.
    Fig2,
    /// n = 500, 3000 steps from Gaussian `x0`, five runs, with the
    /// predicted first-order decrement at every step.
    Fig3,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            other => Err(Error::UnknownName {
                kind: "figure",
                name: other.to_string(),
            }),
        }
    }
}

pub const FIG1_N: usize = 100;
pub const FIG1_STEPS: usize = 20_000;
pub const FIG2_STEPS: usize = 10_000;
pub const FIG3_N: usize = 500;
pub const FIG3_STEPS: usize = 3_000;
pub const FIG3_RUNS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Summary {
    pub initial_residual: f64,
    pub mid_residual: f64,
    pub final_residual: f64,
    pub final_iterate_norm: f64,
    pub solution_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Run {
    pub initial_residual: f64,
    pub final_residual: f64,
    /// Sum of the predicted one-step changes of `‖A x_k - b‖²` over the
    /// steps taken.
    pub cumulative_decrement: f64,
}

impl Fig3Run {
    /// `‖A x_0 - b‖ / ‖A x_K - b‖`
    pub fn decay_factor(&self) -> f64 {
        self.initial_residual / self.final_residual
    }

    /// Realized change of `‖A x_k - b‖²` (negative for decay).
    pub fn realized_change_sq(&self) -> f64 {
        self.final_residual.powi(2) - self.initial_residual.powi(2)
    }
}

#[derive(Debug, Clone)]
pub enum FigureSummary {
    Fig1(Fig1Summary),
    Fig2 { min_cosine: f64, max_cosine: f64 },
    Fig3(Vec<Fig3Run>),
}

#[derive(Debug, Clone)]
pub struct ReproduceOutput {
    pub paths: Vec<PathBuf>,
    pub summary: FigureSummary,
}

/// Figure 1 data: a single 20000-step run from `x0 = 0`.
pub fn fig1_trace(seed: u64) -> Result<(ProblemInstance, Trace)> {
    let problem = build_problem(&ProblemSpec::new(ProblemKind::GaussianRowNormalized, FIG1_N, seed))?;
    let trace = run(&problem, FIG1_STEPS, derive_seed(seed, 0), 1, &[])?;
    Ok((problem, trace))
}

pub fn fig1_summary(problem: &ProblemInstance, trace: &Trace) -> Fig1Summary {
    Fig1Summary {
        initial_residual: trace.rows[0].residual_norm,
        mid_residual: trace.at(FIG1_STEPS / 2).map_or(f64::NAN, |r| r.residual_norm),
        final_residual: trace.last().residual_norm,
        final_iterate_norm: trace.last().iterate_norm,
        solution_norm: norm(problem.x_true.as_deref().unwrap_or(&[])),
    }
}

/// Figure 3 data: one instance, `runs` independent starts and row streams.
pub fn fig3_traces(seed: u64, runs: usize) -> Result<(ProblemInstance, Vec<Trace>)> {
    let problem = build_problem(&ProblemSpec::new(ProblemKind::GaussianRowNormalized, FIG3_N, seed))?;
    let traces = (0..runs)
        .into_par_iter()
        .map(|j| {
            let run_seed = derive_seed(seed, j as u64);
            let x0 = Rng::new(derive_seed(run_seed, X0_STREAM)).normal_vec(FIG3_N);
            let p = problem.clone().with_x0(x0)?;
            run(&p, FIG3_STEPS, run_seed, 1, &[Diagnostic::Decrement])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((problem, traces))
}

pub fn fig3_summary(trace: &Trace) -> Fig3Run {
    let cumulative_decrement = trace.rows[..trace.rows.len() - 1]
        .iter()
        .map(|r| trace.extra(r, "decrement").expect("decrement recorded"))
        .sum();
    Fig3Run {
        initial_residual: trace.rows[0].residual_norm,
        final_residual: trace.last().residual_norm,
        cumulative_decrement,
    }
}

/// Writes the CSV data behind one of the three figures into `out_dir`.
pub fn cmd_reproduce(figure: Figure, seed: u64, out_dir: &Path) -> Result<ReproduceOutput> {
    match figure {
        Figure::Fig1 => {
            let (problem, trace) = fig1_trace(seed)?;
            let path = out_dir.join("fig1.csv");
            write_trace_csv(&path, &trace)?;
            Ok(ReproduceOutput {
                paths: vec![path],
                summary: FigureSummary::Fig1(fig1_summary(&problem, &trace)),
            })
        }
        Figure::Fig2 => {
            let problem = build_problem(&ProblemSpec::new(ProblemKind::GaussianRowNormalized, FIG1_N, seed))?;
            let trace = run(&problem, FIG2_STEPS, derive_seed(seed, 0), 1, &[Diagnostic::LeadingCosine])?;
            let cosines: Vec<f64> = trace
                .rows
                .iter()
                .map(|r| trace.extra(r, "v1_cosine").expect("recorded"))
                .collect();
            let path = out_dir.join("fig2.csv");
            write_trace_csv(&path, &trace)?;
            Ok(ReproduceOutput {
                paths: vec![path],
                summary: FigureSummary::Fig2 {
                    min_cosine: cosines.iter().copied().fold(f64::INFINITY, f64::min),
                    max_cosine: cosines.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                },
            })
        }
        Figure::Fig3 => {
            let (_, traces) = fig3_traces(seed, FIG3_RUNS)?;
            let mut paths = Vec::new();
            let base = out_dir.join("fig3.csv");
            for (j, t) in traces.iter().enumerate() {
                let path = run_path(&base, j);
                write_trace_csv(&path, t)?;
                paths.push(path);
            }
            let agg_path = out_dir.join("fig3_aggregate.csv");
            write_file(&agg_path, &AggregateStats::from_traces(&traces)?.to_csv())?;
            paths.push(agg_path);
            let mut summary_csv = String::new();
            csv_line(
                &mut summary_csv,
                ["run", "initial_residual", "final_residual", "decay_factor", "realized_change_sq", "cumulative_decrement"]
                    .map(String::from),
            );
            let runs: Vec<Fig3Run> = traces.iter().map(fig3_summary).collect();
            for (j, r) in runs.iter().enumerate() {
                csv_line(
                    &mut summary_csv,
                    [
                        j.to_string(),
                        format_f64(r.initial_residual),
                        format_f64(r.final_residual),
                        format_f64(r.decay_factor()),
                        format_f64(r.realized_change_sq()),
                        format_f64(r.cumulative_decrement),
                    ],
                );
            }
            let summary_path = out_dir.join("fig3_summary.csv");
            write_file(&summary_path, &summary_csv)?;
            paths.push(summary_path);
            Ok(ReproduceOutput {
                paths,
                summary: FigureSummary::Fig3(runs),
            })
        }
    }
}

/// Default config used by the examples: the Figure 1 instance.
pub fn fig1_config(seed: u64, out: impl Into<PathBuf>) -> RunConfig {
    let mut c = RunConfig::new(
        ProblemSpec::new(ProblemKind::GaussianRowNormalized, FIG1_N, seed)
            .with_rhs(RhsKind::Ones)
            .with_x0(X0Kind::Zero),
        FIG1_STEPS,
        seed,
    );
    c.output_path = Some(out.into());
    c
}

/// Minimal line-oriented CSV reader for files written by this module.
pub fn read_csv(text: &str) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .map(|h| h.split(',').map(String::from).collect())
        .unwrap_or_default();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|f| f.parse::<f64>().ok()).collect())
        .collect();
    (header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(dir: &Path) -> RunConfig {
        let mut c = RunConfig::new(ProblemSpec::new(ProblemKind::GaussianRowNormalized, 8, 3), 50, 11);
        c.record_stride = 10;
        c.output_path = Some(dir.join("t.csv"));
        c
    }

    #[test]
    fn run_path_suffix() {
        assert_eq!(run_path(Path::new("out/trace.csv"), 2), PathBuf::from("out/trace_run2.csv"));
        assert_eq!(run_path(Path::new("trace"), 0), PathBuf::from("trace_run0"));
    }

    #[test]
    fn toml_config_and_overrides() {
        let text = r#"
            steps = 100
            seed = 5
            diagnostics = ["decrement", "theorem2:2"]
            output_path = "x.csv"
            [problem]
            kind = "symmetric_gaussian"
            n = 10
            rhs = "from_solution"
        "#;
        let mut c = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(c.problem.seed, 5);
        assert_eq!(c.problem.rhs, RhsKind::FromSolution);
        c.validate().unwrap();
        c.apply(&Overrides {
            seed: Some(9),
            steps: Some(7),
            ..Default::default()
        });
        assert_eq!(c.seed, Some(9));
        assert_eq!(c.problem.seed, 9);
        assert_eq!(c.steps, 7);
    }

    #[test]
    fn explicit_problem_seed_survives_override() {
        let text = "seed = 1\n[problem]\nkind = \"laplacian1d\"\nn = 4\nseed = 42\n";
        let mut c = RunConfig::from_toml_str(text).unwrap();
        c.apply(&Overrides {
            seed: Some(3),
            ..Default::default()
        });
        assert_eq!(c.problem.seed, 42);
    }

    #[test]
    fn config_errors_name_the_field() {
        let c = RunConfig::from_toml_str("[problem]\nkind = \"laplacian1d\"\nn = 4\n").unwrap();
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "seed"),
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::from_toml_str("bogus = 1\n[problem]\nkind = \"laplacian1d\"\n").is_err());
        let mut c = RunConfig::new(ProblemSpec::new(ProblemKind::Laplacian1d, 4, 0), 1, 1);
        c.diagnostics = vec!["nope".into()];
        assert!(matches!(c.validate(), Err(Error::UnknownName { .. })));
        c.diagnostics.clear();
        c.runs = 0;
        assert!(matches!(c.validate(), Err(Error::Config { .. })));
    }

    #[test]
    fn solve_zero_steps_writes_one_row() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        c.steps = 0;
        let out = cmd_solve(&c).unwrap();
        let text = std::fs::read_to_string(&out.paths[0]).unwrap();
        let (header, rows) = read_csv(&text);
        assert_eq!(header, vec!["k", "residual_norm", "error_norm", "iterate_norm"]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0][0], Some(0.0));
        assert!(out.paths[0].ends_with("t_run0.csv"));
    }

    #[test]
    fn csv_is_plain_ascii_with_17_digits() {
        let dir = tempfile::tempdir().unwrap();
        let out = cmd_solve(&small_config(dir.path())).unwrap();
        let text = std::fs::read_to_string(&out.paths[0]).unwrap();
        assert!(!text.contains('\r'));
        let second = text.lines().nth(1).unwrap();
        let field = second.split(',').nth(1).unwrap();
        let mantissa = field.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
    }

    #[test]
    fn montecarlo_needs_two_runs_and_same_seed_gives_zero_std() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        assert!(matches!(cmd_montecarlo(&c), Err(Error::Config { .. })));
        c.runs = 2;
        c.same_seed = true;
        let mc = cmd_montecarlo(&c).unwrap();
        for row in &mc.aggregate.std {
            assert!(row.iter().all(|s| *s == 0.0));
        }
    }

    #[test]
    fn aggregate_bounds() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        c.runs = 4;
        let mc = cmd_montecarlo(&c).unwrap();
        let a = &mc.aggregate;
        for s in 0..a.ks.len() {
            for q in 0..a.quantities.len() {
                assert!(a.min[s][q] <= a.mean[s][q] && a.mean[s][q] <= a.max[s][q]);
                assert!(a.std[s][q] >= 0.0);
            }
        }
    }

    #[test]
    fn verify_rejects_asymmetric_theorem2() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        c.theorem = Some(2);
        assert!(matches!(cmd_verify(&c), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn figure_names() {
        assert_eq!("fig2".parse::<Figure>().unwrap(), Figure::Fig2);
        assert!("fig4".parse::<Figure>().is_err());
    }
}
