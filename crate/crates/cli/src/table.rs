//! Plot-ready tables rendered as CSV or JSON.

use std::io::Write;
use std::path::Path;

use crate::config::{Format, Output};

pub use dynbc::verify::fmt_float;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
}

/// A header row and data rows of equal width.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(v) => fmt_float(*v),
                    Cell::Int(i) => i.to_string(),
                })
                .collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Array of objects with keys in header order; floats keep 17 significant digits.
    pub fn write_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = self
                .header
                .iter()
                .zip(row)
                .map(|(k, c)| {
                    let v = match c {
                        Cell::Float(v) if v.is_finite() => fmt_float(*v),
                        Cell::Int(i) => i.to_string(),
                        _ => "null".to_string(),
                    };
                    format!("{}: {v}", serde_json::Value::from(*k))
                })
                .collect();
            let sep = if i + 1 < self.rows.len() { "," } else { "" };
            writeln!(w, "  {{{}}}{sep}", fields.join(", "))?;
        }
        writeln!(w, "]")
    }

    pub fn write<W: Write>(&self, format: Format, w: W) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    /// Writes `<dir>/<stem>.<ext>` when an output directory is set, else to stdout.
    pub fn emit(&self, out: &Output, stem: &str) -> std::io::Result<()> {
        let ext = match out.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        emit_with(out.dir.as_deref(), &format!("{stem}.{ext}"), |w| self.write(out.format, w))
    }
}

/// Runs `f` on `<dir>/<name>` (created as needed) or on stdout.
pub fn emit_with(
    dir: Option<&Path>,
    name: &str,
    f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> std::io::Result<()> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            let mut file = std::io::BufWriter::new(std::fs::File::create(d.join(name))?);
            f(&mut file)?;
            file.flush()
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush()
        }
    }
}
