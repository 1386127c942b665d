//! Result tables: a `#`-prefixed JSON metadata line followed by CSV.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::{families, fock, linalg, measures, sampling};

pub const SCHEMA_VERSION: u32 = 1;
pub const NULL: &str = "null";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Null,
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Null, Cell::Float)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Float(x) => Some(x),
            Cell::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Null => NULL.to_owned(),
            Cell::Int(i) => i.to_string(),
            // Debug gives the shortest round-trip form with exponents for
            // very small or large magnitudes.
            Cell::Float(x) => format!("{x:?}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Shortest round-trip rendering used inside text cells.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Tolerance constants in force, recorded in every header.
#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub hermitian_admission: f64,
    pub jacobi_off_diagonal: f64,
    pub normalization: f64,
    pub density: f64,
    pub support_leak: f64,
    pub embedding: f64,
    pub newton: f64,
    pub newton_max_iterations: usize,
    pub newton_fallback_step: f64,
    pub min_feasibility_rate: f64,
    pub schmidt_invariance: f64,
}

impl Tolerances {
    pub fn current() -> Self {
        Tolerances {
            hermitian_admission: linalg::HERMITIAN_ADMISSION_TOL,
            jacobi_off_diagonal: linalg::JACOBI_OFF_DIAGONAL_TOL,
            normalization: fock::NORMALIZATION_TOL,
            density: fock::DENSITY_TOL,
            support_leak: measures::SUPPORT_LEAK_TOL,
            embedding: families::EMBEDDING_TOL,
            newton: sampling::NEWTON_TOL,
            newton_max_iterations: sampling::NEWTON_MAX_ITERATIONS,
            newton_fallback_step: sampling::FALLBACK_STEP,
            min_feasibility_rate: sampling::MIN_FEASIBILITY_RATE,
            schmidt_invariance: super::SCHMIDT_INVARIANCE_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub schema: String,
    pub schema_version: u32,
    pub library_version: &'static str,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub tolerances: Tolerances,
    pub columns: Vec<&'static str>,
    /// Experiment-specific derived quantities (reference values, rejection
    /// counts).
    pub summary: Value,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub metadata: Metadata,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(config: &ExperimentConfig, columns: &[&'static str]) -> Self {
        Table {
            metadata: Metadata {
                schema: format!("robust-light/{}", config.experiment),
                schema_version: SCHEMA_VERSION,
                library_version: env!("CARGO_PKG_VERSION"),
                seed: config.seed,
                config: config.clone(),
                tolerances: Tolerances::current(),
                columns: columns.to_vec(),
                summary: Value::Object(Default::default()),
            },
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.metadata.columns.len());
        self.rows.push(row);
    }

    pub fn set_summary(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value)?;
        if let Value::Object(map) = &mut self.metadata.summary {
            map.insert(key.to_owned(), v);
        }
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.metadata.columns.iter().position(|c| *c == name)
    }

    /// Values of a numeric column, `None` where the cell is null.
    pub fn column(&self, name: &str) -> Vec<Option<f64>> {
        let i = self.column_index(name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for row in &self.rows {
            for cell in row {
                if let Cell::Float(x) = cell {
                    if !x.is_finite() {
                        return Err(Error::Contract {
                            invariant: "finite output",
                            detail: format!("non-finite value {x} in {}", self.metadata.schema),
                        });
                    }
                }
            }
        }
        writeln!(w, "# {}", serde_json::to_string(&self.metadata)?)?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.metadata.columns)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(Cell::render))?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn write_to_path(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }
}
