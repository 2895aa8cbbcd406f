//! CSV rendering: significant-digit number formatting, the `NA` token for
//! missing values and atomic file replacement.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

pub const DEFAULT_PRECISION: usize = 12;
pub const MISSING: &str = "NA";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Missing, Cell::Num)
    }

    pub fn render(&self, digits: usize) -> String {
        match self {
            Cell::Num(v) => format_sig(*v, digits),
            Cell::Int(n) => n.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Missing => MISSING.to_string(),
        }
    }
}

/// `%g`-style formatting with `digits` significant digits, trailing zeros
/// removed. NaN renders as the missing token.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return MISSING.to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn write<W: Write>(&self, out: W, digits: usize) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render(digits)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes next to `path` and renames into place, so readers never see a
    /// partial file.
    pub fn write_atomic(&self, path: &Path, digits: usize) -> Result<()> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .with_context(|| format!("creating temporary file in {}", dir.display()))?;
        self.write(&mut tmp, digits)?;
        tmp.as_file().sync_all()?;
        tmp.persist(path)
            .with_context(|| format!("moving output into {}", path.display()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.1, 12), "0.1");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(2.0 / 3.0, 4), "0.6667");
        assert_eq!(format_sig(123456.0, 3), "1.23e5");
        assert_eq!(format_sig(-1.5e-7, 12), "-1.5e-7");
        assert_eq!(format_sig(99.96, 3), "100");
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(-0.0, 12), "0");
        assert_eq!(format_sig(f64::NAN, 12), "NA");
        assert_eq!(format_sig(2.5, 1), "2");
    }

    #[test]
    fn table_has_header_and_unix_newlines() {
        let t = Table {
            header: vec!["a".into(), "b".into()],
            rows: vec![
                vec![Cell::Num(0.5), Cell::Missing],
                vec![Cell::Int(3), Cell::Text("engine".into())],
            ],
        };
        let mut buf = Vec::new();
        t.write(&mut buf, 12).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n0.5,NA\n3,engine\n");
        let empty = Table {
            header: vec!["x".into()],
            rows: vec![],
        };
        let mut buf = Vec::new();
        empty.write(&mut buf, 12).unwrap();
        assert_eq!(buf, b"x\n");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("t.csv");
        let t = Table {
            header: vec!["x".into()],
            rows: vec![vec![Cell::Num(1.0)]],
        };
        t.write_atomic(&path, 12).unwrap();
        t.write_atomic(&path, 12).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x\n1\n");
        assert_eq!(
            std::fs::read_dir(path.parent().unwrap()).unwrap().count(),
            1
        );
    }
}
