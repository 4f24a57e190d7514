//! File formats. Complex numbers are `[re, im]` pairs throughout.

use std::fs;
use std::path::Path;

use blaschke::solver::SolveResult;
use blaschke::verify::VerificationReport;
use blaschke::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub type Pair = [f64; 2];

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn pairs(zs: &[Complex64]) -> Vec<Pair> {
    zs.iter().copied().map(to_pair).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub points: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn new(points: &[Complex64]) -> Self {
        Self { n: points.len(), points: pairs(points), family: None, r: None, seed: None }
    }

    /// Points after checking the count field and the admissibility rules.
    pub fn points(&self) -> Result<Vec<Complex64>> {
        if self.n != self.points.len() {
            return Err(CliError::Format(format!("field `n` is {} but `points` has {} entries", self.n, self.points.len())));
        }
        let pts: Vec<Complex64> = self.points.iter().copied().map(from_pair).collect();
        blaschke::validate_points(&pts)?;
        Ok(pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub n: usize,
    pub a: Vec<Pair>,
}

impl CoefficientFile {
    pub fn coefficients(&self) -> Result<Vec<Complex64>> {
        if self.n != self.a.len() {
            return Err(CliError::Format(format!("field `n` is {} but `a` has {} entries", self.n, self.a.len())));
        }
        Ok(self.a.iter().copied().map(from_pair).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub computed_points: Vec<Pair>,
    pub pairing: Vec<usize>,
    pub max_error: f64,
    pub max_abs_derivative: f64,
    pub accurately_solved: bool,
    pub classification: String,
    pub in_disk_root_count: usize,
}

impl From<&VerificationReport> for ReportJson {
    fn from(r: &VerificationReport) -> Self {
        Self {
            computed_points: pairs(&r.computed_points),
            pairing: r.pairing.clone(),
            max_error: r.max_error,
            max_abs_derivative: r.max_abs_derivative,
            accurately_solved: r.accurately_solved,
            classification: r.classification.to_string(),
            in_disk_root_count: r.in_disk_root_count,
        }
    }
}

/// Output of `solve`; also readable as a [`CoefficientFile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub n: usize,
    pub a: Vec<Pair>,
    pub zeros: Vec<Pair>,
    pub status: String,
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub residual_limit: f64,
    pub classification: String,
    pub near_circle_warning: bool,
    pub center: Option<Pair>,
    pub report: ReportJson,
}

impl SolutionFile {
    pub fn new(result: &SolveResult, zeros: &[Complex64], report: &VerificationReport) -> Self {
        Self {
            n: result.a.len(),
            a: pairs(&result.a),
            zeros: pairs(zeros),
            status: result.status.to_string(),
            iterations: result.iterations,
            final_residual_norm: result.final_residual_norm,
            residual_limit: result.residual_limit,
            classification: result.classification.to_string(),
            near_circle_warning: result.near_circle_warning,
            center: result.center.map(to_pair),
            report: report.into(),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_owned(), source })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

/// `kind,index,re,im` rows for a list of labelled point sets.
pub fn points_csv(sets: &[(&str, &[Complex64])]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "index", "re", "im"])?;
    for (kind, zs) in sets {
        for (i, z) in zs.iter().enumerate() {
            w.write_record([kind.to_string(), i.to_string(), format!("{:e}", z.re), format!("{:e}", z.im)])?;
        }
    }
    finish_csv(w)
}

/// `key,value` rows.
pub fn key_value_csv(rows: &[(&str, String)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"])?;
    for (k, v) in rows {
        w.write_record([*k, v.as_str()])?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
