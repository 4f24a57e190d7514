//! Benchmark suites: seeded instances, parallel solves, CSV rows and per-configuration summaries.

use std::io::Write;
use std::time::Instant;

use blaschke::instances::{Family, InstanceSpec};
use blaschke::solver::{solve, SolveOptions};
use blaschke::verify::report;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const CSV_HEADER: [&str; 10] = [
    "instance",
    "n",
    "family",
    "transformed",
    "iterations",
    "cpu_seconds",
    "max_error",
    "max_abs_derivative",
    "classification",
    "solved",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Test1,
    Test2,
    Test3,
    Test4,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TransformMode {
    On,
    Off,
    Both,
}

impl TransformMode {
    fn modes(self) -> &'static [bool] {
        match self {
            TransformMode::On => &[true],
            TransformMode::Off => &[false],
            TransformMode::Both => &[false, true],
        }
    }
}

/// One family/size/radius combination solved in one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub family: Family,
    pub n: usize,
    pub r: f64,
    pub transformed: bool,
}

/// Overrides applied on top of a suite definition.
#[derive(Debug, Clone, Default)]
pub struct SuiteOverrides {
    pub sizes: Option<Vec<usize>>,
    pub radii: Option<Vec<f64>>,
    pub family: Option<Family>,
    pub transform: Option<TransformMode>,
}

fn expand(shapes: &[(Family, usize, f64)], mode: TransformMode) -> Vec<Config> {
    shapes
        .iter()
        .flat_map(|&(family, n, r)| mode.modes().iter().map(move |&transformed| Config { family, n, r, transformed }))
        .collect()
}

/// Configurations of a suite, in output order.
pub fn configurations(suite: Suite, o: &SuiteOverrides) -> Result<Vec<Config>> {
    let sizes = |default: &[usize]| o.sizes.clone().unwrap_or_else(|| default.to_vec());
    let radii = |default: &[f64]| o.radii.clone().unwrap_or_else(|| default.to_vec());
    let mode = |default: TransformMode| o.transform.unwrap_or(default);
    let grid = |family: Family, ns: Vec<usize>, rs: Vec<f64>| -> Vec<(Family, usize, f64)> {
        ns.iter().flat_map(|&n| rs.iter().map(move |&r| (family, n, r))).collect()
    };
    let configs = match suite {
        Suite::Test1 => expand(&grid(Family::Disk, sizes(&[20]), radii(&[0.99])), mode(TransformMode::Both)),
        Suite::Test2 => {
            let default: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
            expand(&grid(Family::Disk, sizes(&[30]), radii(&default)), mode(TransformMode::On))
        }
        Suite::Test3 => {
            let default: Vec<usize> = (1..=6).map(|k| 10 * k).collect();
            expand(&grid(Family::Disk, sizes(&default), radii(&[0.999])), mode(TransformMode::On))
        }
        Suite::Test4 => {
            let mut shapes = grid(Family::Cluster, sizes(&[10]), vec![0.0]);
            shapes.extend(grid(Family::Circle, sizes(&[50]), radii(&[0.95])));
            expand(&shapes, mode(TransformMode::Both))
        }
        Suite::Custom => {
            let family = o.family.ok_or_else(|| CliError::Usage("custom suite needs --family".into()))?;
            let ns = o.sizes.clone().ok_or_else(|| CliError::Usage("custom suite needs --n".into()))?;
            let rs = match family {
                Family::Cluster => o.radii.clone().unwrap_or_else(|| vec![0.0]),
                _ => o.radii.clone().ok_or_else(|| CliError::Usage("custom suite needs --r".into()))?,
            };
            expand(&grid(family, ns, rs), mode(TransformMode::On))
        }
    };
    if configs.iter().any(|c| c.n == 0) {
        return Err(CliError::Usage("sizes must be positive".into()));
    }
    Ok(configs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub instance: String,
    pub n: usize,
    pub family: Family,
    pub transformed: bool,
    pub iterations: usize,
    pub cpu_seconds: f64,
    pub max_error: f64,
    pub max_abs_derivative: f64,
    pub classification: String,
    pub solved: bool,
}

impl Row {
    fn record(&self) -> [String; 10] {
        [
            self.instance.clone(),
            self.n.to_string(),
            self.family.to_string(),
            self.transformed.to_string(),
            self.iterations.to_string(),
            format!("{:e}", self.cpu_seconds),
            format!("{:e}", self.max_error),
            format!("{:e}", self.max_abs_derivative),
            self.classification.clone(),
            self.solved.to_string(),
        ]
    }
}

pub fn instance_id(c: &Config, index: usize) -> String {
    format!("{}-n{}-r{}-{}", c.family, c.n, c.r, index)
}

/// Solves instance `index` of `c`. The seed ignores the mode so both modes see the same data.
pub fn run_instance(c: &Config, index: usize, base: &SolveOptions, seed: u64) -> Result<Row> {
    let instance_seed = seed.wrapping_add(index as u64);
    let points = InstanceSpec { family: c.family, n: c.n, r: c.r, seed: instance_seed }.generate()?;
    let opts = SolveOptions { transform_enabled: c.transformed, rng_seed: instance_seed, ..*base };
    let start = Instant::now();
    let outcome = solve(&points, &opts).and_then(|res| report(&points, &res).map(|rep| (res, rep)));
    let cpu_seconds = start.elapsed().as_secs_f64();
    let mut row = Row {
        instance: instance_id(c, index),
        n: c.n,
        family: c.family,
        transformed: c.transformed,
        iterations: 0,
        cpu_seconds,
        max_error: f64::INFINITY,
        max_abs_derivative: f64::INFINITY,
        classification: "error".into(),
        solved: false,
    };
    if let Ok((res, rep)) = outcome {
        row.iterations = res.iterations;
        row.max_error = rep.max_error;
        row.max_abs_derivative = rep.max_abs_derivative;
        row.classification = rep.classification.to_string();
        row.solved = rep.accurately_solved;
    }
    Ok(row)
}

/// `[min, lower median, max]`; `None` for non-finite statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spread {
    pub min: Option<f64>,
    pub median: Option<f64>,
    pub max: Option<f64>,
}

impl Spread {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = values.into_iter().collect();
        v.sort_by(f64::total_cmp);
        let finite = |x: f64| x.is_finite().then_some(x);
        match v.len() {
            0 => Spread { min: None, median: None, max: None },
            len => Spread { min: finite(v[0]), median: finite(v[(len - 1) / 2]), max: finite(v[len - 1]) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub family: String,
    pub n: usize,
    pub r: f64,
    pub transformed: bool,
    pub instances: usize,
    pub iterations: Spread,
    pub cpu_seconds: Spread,
    pub max_error: Spread,
    pub solved_percent: f64,
}

impl ConfigSummary {
    pub fn new(c: &Config, rows: &[Row]) -> Self {
        let solved = rows.iter().filter(|r| r.solved).count();
        Self {
            family: c.family.to_string(),
            n: c.n,
            r: c.r,
            transformed: c.transformed,
            instances: rows.len(),
            iterations: Spread::of(rows.iter().map(|r| r.iterations as f64)),
            cpu_seconds: Spread::of(rows.iter().map(|r| r.cpu_seconds)),
            max_error: Spread::of(rows.iter().map(|r| r.max_error)),
            solved_percent: if rows.is_empty() { 0.0 } else { 100.0 * solved as f64 / rows.len() as f64 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub suite: String,
    pub seed: u64,
    pub instances: usize,
    pub configurations: Vec<ConfigSummary>,
}

/// Runs every configuration, writing CSV rows in instance order and flushing after each chunk
/// so an interrupted run keeps its completed rows.
pub fn run<W: Write>(
    configs: &[Config],
    instances: usize,
    base: &SolveOptions,
    seed: u64,
    csv_out: Option<&mut csv::Writer<W>>,
) -> Result<Vec<ConfigSummary>> {
    let mut csv_out = csv_out;
    if let Some(w) = csv_out.as_deref_mut() {
        w.write_record(CSV_HEADER)?;
        w.flush().map_err(csv::Error::from)?;
    }
    let chunk = 4 * rayon::current_num_threads().max(1);
    let mut summaries = Vec::with_capacity(configs.len());
    for c in configs {
        let mut rows = Vec::with_capacity(instances);
        for start in (0..instances).step_by(chunk) {
            let end = (start + chunk).min(instances);
            let batch: Vec<Row> =
                (start..end).into_par_iter().map(|i| run_instance(c, i, base, seed)).collect::<Result<_>>()?;
            if let Some(w) = csv_out.as_deref_mut() {
                for row in &batch {
                    w.write_record(row.record())?;
                }
                w.flush().map_err(csv::Error::from)?;
            }
            rows.extend(batch);
        }
        summaries.push(ConfigSummary::new(c, &rows));
    }
    Ok(summaries)
}
