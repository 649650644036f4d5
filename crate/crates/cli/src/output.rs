//! File formats: CSV with a one-line JSON header, and plain JSON.
//!
//! Numbers are written with 17 significant digits so that values survive a
//! write/read cycle bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use refract_core::particles::BallConfig;
use refract_core::{Domain, GridField, Vec3};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Shortest form with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV document: `# <json header>`, a column line, then rows.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &impl Serialize, columns: &[&str]) -> Result<Self, CliError> {
        let json = serde_json::to_string(header).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Csv {
            text: format!("# {json}\n{}\n", columns.join(",")),
        })
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.text)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

/// Cell-center samples of a grid field.
pub fn field_csv(header: &impl Serialize, field: &GridField) -> Result<Csv, CliError> {
    let mut csv = Csv::new(header, &["x", "y", "z", "re", "im"])?;
    let grid = field.grid();
    for (i, v) in field.values().iter().enumerate() {
        let x = grid.center(i);
        csv.row(&[num(x[0]), num(x[1]), num(x[2]), num(v.re), num(v.im)]);
    }
    Ok(csv)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BallHeader {
    radius: f64,
    seed: Option<u64>,
    domain: Domain,
}

/// One row per ball: center and coefficient `n_m²`.
pub fn balls_csv(config: &BallConfig, domain: &Domain) -> Result<Csv, CliError> {
    let header = BallHeader {
        radius: config.radius(),
        seed: config.seed(),
        domain: *domain,
    };
    let mut csv = Csv::new(&header, &["x", "y", "z", "re", "im"])?;
    for (c, n) in config.centers().iter().zip(config.coeffs()) {
        csv.row(&[num(c[0]), num(c[1]), num(c[2]), num(n.re), num(n.im)]);
    }
    Ok(csv)
}

/// Reads back the output of [`balls_csv`], revalidating the geometry.
pub fn parse_balls_csv(text: &str) -> Result<BallConfig, CliError> {
    let bad = |msg: String| CliError::Config(format!("ball CSV: {msg}"));
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| bad("missing JSON header".into()))?;
    let header: BallHeader = serde_json::from_str(header).map_err(|e| bad(e.to_string()))?;
    lines
        .next()
        .ok_or_else(|| bad("missing column line".into()))?;

    let mut centers = Vec::new();
    let mut coeffs = Vec::new();
    for (n, line) in lines.enumerate() {
        let v: Vec<f64> = line
            .split(',')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", n + 1)))?;
        if v.len() != 5 {
            return Err(bad(format!(
                "row {}: expected 5 columns, found {}",
                n + 1,
                v.len()
            )));
        }
        centers.push(Vec3::new(v[0], v[1], v[2]));
        coeffs.push(Complex64::new(v[3], v[4]));
    }
    let config = BallConfig::new(header.radius, centers, coeffs, &header.domain)
        .map_err(|e| bad(e.to_string()))?;
    Ok(match header.seed {
        Some(s) => config.with_seed(s),
        None => config,
    })
}
