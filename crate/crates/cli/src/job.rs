//! Validated jobs and their execution.

use std::fs;
use std::path::{Path, PathBuf};

use nscap::chaincx::{chain_capacity_with, koszul_complex, ComplexConfig, MAX_RANK};
use nscap::propcheck::{curated_suite, generative_suite, CheckConfig};
use nscap::symbol::{capacity_of_cokernel, geometric_grid, spectral_density, Quadrature, SpectralDensitySamples};
use nscap::walks::{
    c0_from_series, decay_exponent, growth_series, return_series, GroupModel, GroupSpec, ReturnSeries, WalkSpec,
};
use nscap::{LaurentMatrix, OperatorSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cache::Cache;
use crate::format;
use crate::summary::summarize;

/// Largest singular value admitted before the default grid is applied.
pub const NORMALIZED_NORM: f64 = 2.0;

#[derive(Debug)]
pub enum JobError {
    /// Status 2.
    Parse(String),
    /// Status 3.
    Compute(String),
}

impl From<nscap::Error> for JobError {
    fn from(e: nscap::Error) -> Self {
        JobError::Compute(e.to_string())
    }
}

pub type JobResult<T> = Result<T, JobError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points_per_decade: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            lambda_min: 1e-4,
            lambda_max: 1.0,
            points_per_decade: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Curated,
    Generative,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Target {
    Density { op: OperatorSpec, nodes: Option<usize>, grid: GridParams },
    Capacity { op: OperatorSpec, nodes: Option<usize>, grid: GridParams },
    Walk { group: GroupSpec, steps: usize, lazy: bool },
    Growth { group: GroupSpec, radius: usize },
    Complex { n: usize, p: usize, nodes: Option<usize>, grid: GridParams, export_dir: Option<PathBuf> },
    Check { suite: Suite, count: usize, seed: u64, nodes: Option<usize>, grid: GridParams },
}

pub struct JobSpec {
    pub target: Target,
    pub out: Option<PathBuf>,
    pub cache: Cache,
}

/// Reads a JSON spec file, reporting `path:line:column` on failure.
pub fn read_spec<T: serde::de::DeserializeOwned>(path: &Path) -> JobResult<T> {
    let text = fs::read_to_string(path).map_err(|e| JobError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| JobError::Parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

fn positive(name: &str, ok: bool) -> JobResult<()> {
    if ok {
        Ok(())
    } else {
        Err(JobError::Parse(format!("--{name} must be positive")))
    }
}

impl GridParams {
    fn validate(&self) -> JobResult<()> {
        positive("lambda-min", self.lambda_min > 0.0 && self.lambda_min.is_finite())?;
        positive("points-per-decade", self.points_per_decade > 0)?;
        if !(self.lambda_max > self.lambda_min && self.lambda_max.is_finite()) {
            return Err(JobError::Parse("--lambda-max must exceed --lambda-min".into()));
        }
        Ok(())
    }

    fn grid(&self) -> JobResult<Vec<f64>> {
        Ok(geometric_grid(self.lambda_min, self.lambda_max, self.points_per_decade)?)
    }
}

fn quadrature(nodes: Option<usize>, rank: usize) -> JobResult<Quadrature> {
    match nodes {
        Some(n) => Quadrature::new(n).map_err(|e| JobError::Parse(format!("--nodes: {e}"))),
        None => Ok(Quadrature::default_for_rank(rank)),
    }
}

impl Target {
    /// Parameter checks and command-target compatibility, before any work.
    pub fn validate(&self) -> JobResult<()> {
        match self {
            Target::Density { op, grid, .. } | Target::Capacity { op, grid, .. } => {
                op.to_matrix().map_err(|e| JobError::Parse(format!("operator spec: {e}")))?;
                grid.validate()
            }
            Target::Walk { group, .. } | Target::Growth { group, .. } => {
                GroupModel::new(group.clone()).map_err(|e| JobError::Parse(format!("group spec: {e}")))?;
                Ok(())
            }
            Target::Complex { n, p, grid, .. } => {
                if !(1..=MAX_RANK).contains(n) {
                    return Err(JobError::Parse(format!("--n must lie in 1..={MAX_RANK}")));
                }
                if *p > n + 1 {
                    return Err(JobError::Parse(format!("--p must lie in 0..={}", n + 1)));
                }
                grid.validate()
            }
            Target::Check { grid, .. } => grid.validate(),
        }
    }
}

/// Bound on the largest singular value of the symbol: the Frobenius norm of
/// the entrywise coefficient sums.
fn norm_bound(m: &LaurentMatrix) -> f64 {
    m.entries()
        .map(|(_, _, p)| p.terms().map(|(_, c)| c.norm()).sum::<f64>().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Scales `m` so its symbol norm is at most [`NORMALIZED_NORM`].
pub fn normalize(m: &LaurentMatrix) -> (LaurentMatrix, f64) {
    let b = norm_bound(m);
    if b > NORMALIZED_NORM {
        let s = NORMALIZED_NORM / b;
        (m.scale(Complex64::new(s, 0.0)), s)
    } else {
        (m.clone(), 1.0)
    }
}

fn cache_key(target: &Target) -> serde_json::Value {
    let mut key = serde_json::to_value(target).expect("targets serialize");
    // export_dir does not affect artifacts
    if let Some(obj) = key.as_object_mut() {
        obj.remove("export_dir");
    }
    key
}

/// Density samples of the normalized operator, with the scale factor used.
fn density(spec: &JobSpec, op: &OperatorSpec, nodes: Option<usize>, grid: &GridParams) -> JobResult<(SpectralDensitySamples, f64)> {
    let (m, scale) = normalize(&op.to_matrix()?);
    let quad = quadrature(nodes, m.rank())?;
    let key = serde_json::json!({ "artifact": "density", "target": cache_key(&spec.target) });
    let lambdas = grid.grid()?;
    let samples = spec.cache.get_or_compute(&key, || spectral_density(&m, &lambdas, &quad))?;
    Ok((samples, scale))
}

fn emit(out: &Option<PathBuf>, text: &str) -> JobResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| JobError::Compute(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a job; returns the process exit status.
pub fn run(spec: &JobSpec) -> JobResult<i32> {
    spec.target.validate()?;
    match &spec.target {
        Target::Density { op, nodes, grid } => {
            let (s, scale) = density(spec, op, *nodes, grid)?;
            emit(&spec.out, &format::density_csv(&s, scale))?;
        }
        Target::Capacity { op, nodes, grid } => {
            let (m, _) = normalize(&op.to_matrix()?);
            let quad = quadrature(*nodes, m.rank())?;
            let c = capacity_of_cokernel(&m, &grid.grid()?, &quad)?;
            emit(&spec.out, &format!("c = {c}\n"))?;
        }
        Target::Walk { group, steps, lazy } => {
            let walk = WalkSpec { group: group.clone(), lazy: *lazy };
            let key = serde_json::json!({ "artifact": "walk", "target": cache_key(&spec.target) });
            let rs: ReturnSeries = spec.cache.get_or_compute(&key, || return_series(&walk, *steps))?;
            emit(&spec.out, &format::walk_csv(&rs))?;
            if *steps >= 32 {
                match decay_exponent(&rs) {
                    Ok(fit) => eprintln!(
                        "decay: {} window slopes {:?} rate {}",
                        serde_json::to_string(&fit.class).unwrap(),
                        fit.window_slopes,
                        fit.rate_estimate
                    ),
                    Err(e) => eprintln!("decay: {e}"),
                }
                if *lazy {
                    if let Ok(c) = c0_from_series(&rs) {
                        eprintln!("c0 = {c}");
                    }
                }
            }
        }
        Target::Growth { group, radius } => {
            let gs = growth_series(&GroupModel::new(group.clone())?, *radius)?;
            emit(&spec.out, &format::growth_csv(&gs))?;
        }
        Target::Complex { n, p, nodes, grid, export_dir } => {
            let cx = koszul_complex(*n)?;
            if let Some(dir) = export_dir {
                fs::create_dir_all(dir).map_err(|e| JobError::Compute(format!("{}: {e}", dir.display())))?;
                for (i, op) in cx.export_specs().iter().enumerate() {
                    let path = dir.join(format!("d{}.json", i + 1));
                    let text = serde_json::to_string_pretty(op).expect("specs serialize");
                    fs::write(&path, text + "\n").map_err(|e| JobError::Compute(format!("{}: {e}", path.display())))?;
                }
            }
            let cfg = ComplexConfig {
                quadrature: nodes.map(Quadrature::new).transpose()?,
                grid: grid.grid()?,
            };
            let c = chain_capacity_with(*n, *p, &cfg)?;
            emit(&spec.out, &format!("c = {c}\n"))?;
        }
        Target::Check { suite, count, seed, nodes, grid } => {
            let cfg = CheckConfig {
                quadrature: quadrature(*nodes, 1)?,
                grid: grid.grid()?,
                ..CheckConfig::default()
            };
            let mut reports = Vec::new();
            if matches!(suite, Suite::Curated | Suite::All) {
                reports.extend(curated_suite(&cfg)?);
            }
            if matches!(suite, Suite::Generative | Suite::All) {
                reports.extend(generative_suite(*count, *seed, &cfg)?);
            }
            let s = summarize(&reports);
            let mut lines = s.json_lines.join("\n");
            if !lines.is_empty() {
                lines.push('\n');
            }
            emit(&spec.out, &lines)?;
            eprint!("{}", s.table);
            return Ok(if s.any_violated { 1 } else { 0 });
        }
    }
    Ok(0)
}
