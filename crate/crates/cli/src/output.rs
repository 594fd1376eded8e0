use std::io::Write;

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Rows of one CSV result plus diagnostics for stderr.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Value cell, or an empty cell with a warning when the point failed.
pub fn cell(value: &cdma_core::Result<f64>, what: &str, warnings: &mut Vec<String>) -> String {
    match value {
        Ok(v) => num(*v),
        Err(e) => {
            warnings.push(format!("{what}: {e}"));
            String::new()
        }
    }
}

/// Writes the `#` comment header (command and resolved config) and the rows.
pub fn write_csv(mut out: impl Write, command: &str, cfg: &ExperimentConfig, table: &Table) -> Result<(), CliError> {
    writeln!(out, "# cdma {command}")?;
    for line in cfg.to_toml().lines() {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
