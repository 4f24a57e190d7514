//! Command-line front end for the Blaschke product solver.

pub mod bench;
pub mod error;
pub mod formats;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use blaschke::instances::{Family, InstanceSpec};
use blaschke::mobius::BlaschkeProduct;
use blaschke::solver::{solve, SolveOptions};
use blaschke::verify::{check_product, report, VerificationReport};
use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{Suite, SuiteOverrides, Summary, TransformMode};
use crate::error::{CliError, Result};
use crate::formats::{read_json, to_json, CoefficientFile, InstanceFile, SolutionFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "blaschke", version, about = "Blaschke products with prescribed critical points")]
pub struct Cli {
    /// Residual tolerance for the least-squares solve.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Iteration budget for the least-squares solve.
    #[arg(long = "max-iter", global = true, default_value_t = 5000)]
    pub max_iter: usize,
    /// Solve without the centering disk automorphism.
    #[arg(long = "no-transform", global = true)]
    pub no_transform: bool,
    /// Seed for instance generation and centering perturbations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (a directory for `bench`); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the coefficients for the critical points in an instance file.
    Solve { input: PathBuf },
    /// Generate a seeded instance.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.99)]
        r: f64,
    },
    /// Check stored coefficients against prescribed critical points.
    Verify {
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
    /// Run a benchmark suite.
    Bench {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        /// Degrees, overriding the suite default (`--n` for custom).
        #[arg(long, alias = "n", value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Radii, overriding the suite default (`--r` for custom).
        #[arg(long, alias = "r", value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        family: Option<Family>,
        #[arg(long, value_enum)]
        transform: Option<TransformMode>,
    },
}

impl Cli {
    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            residual_tol: self.tol,
            max_iterations: self.max_iter,
            transform_enabled: !self.no_transform,
            rng_seed: self.seed,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn report_rows(rep: &VerificationReport) -> Vec<(&'static str, String)> {
    vec![
        ("max_error", format!("{:e}", rep.max_error)),
        ("max_abs_derivative", format!("{:e}", rep.max_abs_derivative)),
        ("accurately_solved", rep.accurately_solved.to_string()),
        ("classification", rep.classification.to_string()),
        ("in_disk_root_count", rep.in_disk_root_count.to_string()),
    ]
}

pub fn run(cli: &Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Solve { input } => {
            let points = read_json::<InstanceFile>(input)?.points()?;
            let result = solve(&points, &cli.solve_options())?;
            let rep = report(&points, &result)?;
            let zeros = result.product().zeros()?;
            let text = match cli.format {
                Format::Json => to_json(&SolutionFile::new(&result, &zeros, &rep)),
                Format::Csv => formats::points_csv(&[
                    ("a", &result.a),
                    ("zero", &zeros),
                    ("critical_point", &rep.computed_points),
                ])?,
            };
            emit(out, &with_newline(text))
        }
        Command::Gen { family, n, r } => {
            let spec = InstanceSpec { family: *family, n: *n, r: *r, seed: cli.seed };
            let points = spec.generate()?;
            let text = match cli.format {
                Format::Json => {
                    let mut file = InstanceFile::new(&points);
                    file.family = Some(family.to_string());
                    file.r = (*family != Family::Cluster).then_some(*r);
                    file.seed = Some(cli.seed);
                    to_json(&file)
                }
                Format::Csv => formats::points_csv(&[("point", &points)])?,
            };
            emit(out, &with_newline(text))
        }
        Command::Verify { coeffs, points } => {
            let a = read_json::<CoefficientFile>(coeffs)?.coefficients()?;
            let pts = read_json::<InstanceFile>(points)?.points()?;
            if a.len() != pts.len() {
                return Err(CliError::Format(format!(
                    "{} coefficients but {} critical points",
                    a.len(),
                    pts.len()
                )));
            }
            let rep = check_product(&pts, &BlaschkeProduct::new(a))?;
            let text = match cli.format {
                Format::Json => to_json(&formats::ReportJson::from(&rep)),
                Format::Csv => formats::key_value_csv(&report_rows(&rep))?,
            };
            emit(out, &with_newline(text))
        }
        Command::Bench { suite, instances, sizes, radii, family, transform } => {
            let overrides = SuiteOverrides {
                sizes: sizes.clone(),
                radii: radii.clone(),
                family: *family,
                transform: if cli.no_transform { Some(TransformMode::Off) } else { *transform },
            };
            let configs = bench::configurations(*suite, &overrides)?;
            let base = cli.solve_options();
            let summaries = match (out, cli.format) {
                (Some(dir), _) => {
                    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
                    let path = dir.join("bench.csv");
                    let file = File::create(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                    let mut w = csv::Writer::from_writer(BufWriter::new(file));
                    bench::run(&configs, *instances, &base, cli.seed, Some(&mut w))?
                }
                (None, Format::Csv) => {
                    let mut w = csv::Writer::from_writer(io::stdout());
                    bench::run(&configs, *instances, &base, cli.seed, Some(&mut w))?
                }
                (None, Format::Json) => bench::run::<io::Sink>(&configs, *instances, &base, cli.seed, None)?,
            };
            let summary = Summary {
                suite: format!("{suite:?}").to_lowercase(),
                seed: cli.seed,
                instances: *instances,
                configurations: summaries,
            };
            let text = with_newline(to_json(&summary));
            match (out, cli.format) {
                (Some(dir), _) => emit(Some(&dir.join("summary.json")), &text),
                (None, Format::Json) => emit(None, &text),
                (None, Format::Csv) => Ok(()),
            }
        }
    }
}
