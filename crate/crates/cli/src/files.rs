//! Text file formats: grids as `re im` lines under a one-line header, time
//! series as `t,re,im` CSV. Floats carry 17 significant digits so every
//! value survives a round trip.

use num_complex::Complex64;
use sckerr::grid::{ComplexField2D, TimeSeries};
use std::fmt::Write as _;

use crate::CliError;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim().parse().map_err(|_| CliError::Parse(format!("bad {what}: {s:?}")))
}

/// A sampled complex field on a rectangular grid, values row-major along `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub t: f64,
    pub values: Vec<Complex64>,
}

impl GridFile {
    pub fn from_field(field: &ComplexField2D, t: f64) -> Self {
        let (nx, ny) = field.values.dim();
        Self {
            nx,
            ny,
            x_range: (field.x_axis.min(), field.x_axis.max()),
            y_range: (field.y_axis.min(), field.y_axis.max()),
            t,
            values: field.values.iter().copied().collect(),
        }
    }

    pub fn emit(&self) -> String {
        let mut s = String::with_capacity(48 * self.values.len() + 128);
        s.push_str("# nx ny xmin xmax ymin ymax t\n");
        let _ = writeln!(
            s,
            "# {} {} {} {} {} {} {}",
            self.nx,
            self.ny,
            num(self.x_range.0),
            num(self.x_range.1),
            num(self.y_range.0),
            num(self.y_range.1),
            num(self.t)
        );
        for v in &self.values {
            let _ = writeln!(s, "{} {}", num(v.re), num(v.im));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("# nx ny xmin xmax ymin ymax t") {
            return Err(CliError::Parse("missing grid header".into()));
        }
        let head = lines.next().ok_or_else(|| CliError::Parse("missing grid dimensions".into()))?;
        let fields: Vec<&str> = head.trim_start_matches('#').split_whitespace().collect();
        if fields.len() != 7 {
            return Err(CliError::Parse(format!("expected 7 header fields, got {}", fields.len())));
        }
        let nx: usize = fields[0].parse().map_err(|_| CliError::Parse("bad nx".into()))?;
        let ny: usize = fields[1].parse().map_err(|_| CliError::Parse("bad ny".into()))?;
        let r: Vec<f64> = fields[2..].iter().map(|f| parse_f64(f, "header value")).collect::<Result<_, _>>()?;
        let values = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let mut it = l.split_whitespace();
                match (it.next(), it.next(), it.next()) {
                    (Some(a), Some(b), None) => Ok(Complex64::new(parse_f64(a, "re")?, parse_f64(b, "im")?)),
                    _ => Err(CliError::Parse(format!("bad grid line {l:?}"))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != nx * ny {
            return Err(CliError::Parse(format!("expected {} values, got {}", nx * ny, values.len())));
        }
        Ok(Self { nx, ny, x_range: (r[0], r[1]), y_range: (r[2], r[3]), t: r[4], values })
    }
}

/// A complex time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub t: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SeriesFile {
    pub fn from_series(s: &TimeSeries) -> Self {
        Self { t: s.t.clone(), values: s.values.clone() }
    }

    pub fn emit(&self) -> String {
        let mut s = String::from("t,re,im\n");
        for (t, v) in self.t.iter().zip(&self.values) {
            let _ = writeln!(s, "{},{},{}", num(*t), num(v.re), num(v.im));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("t,re,im") {
            return Err(CliError::Parse("missing series header".into()));
        }
        let mut t = Vec::new();
        let mut values = Vec::new();
        for l in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 3 {
                return Err(CliError::Parse(format!("bad series line {l:?}")));
            }
            let tk = parse_f64(f[0], "t")?;
            if t.last().is_some_and(|&prev| tk <= prev) {
                return Err(CliError::Parse("series times must increase strictly".into()));
            }
            t.push(tk);
            values.push(Complex64::new(parse_f64(f[1], "re")?, parse_f64(f[2], "im")?));
        }
        Ok(Self { t, values })
    }
}

/// Which format a file holds, judged from its first line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Grid,
    Series,
}

pub fn sniff(text: &str) -> Option<FileKind> {
    match text.lines().next().map(str::trim) {
        Some("# nx ny xmin xmax ymin ymax t") => Some(FileKind::Grid),
        Some("t,re,im") => Some(FileKind::Series),
        _ => None,
    }
}
