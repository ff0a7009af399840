//! Gnuplot scripts for the text outputs. Scripts depend only on the file
//! names and headers, so identical inputs give byte-identical scripts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::files::{sniff, FileKind, GridFile};
use crate::CliError;

/// Which part of a complex grid to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotStyle {
    #[default]
    Modulus,
    Real,
}

impl PlotStyle {
    fn expr(self) -> &'static str {
        match self {
            PlotStyle::Modulus => "sqrt($1**2+$2**2)",
            PlotStyle::Real => "$1",
        }
    }
}

fn quoted(p: &Path) -> String {
    format!("'{}'", p.display().to_string().replace('\'', "''"))
}

/// Script drawing grids side by side as heatmaps and series as line plots.
pub fn emit_plot_script(files: &[PathBuf], style: PlotStyle) -> Result<String, CliError> {
    if files.is_empty() {
        return Err(CliError::MissingFile("no input files".into()));
    }
    let mut s = String::new();
    s.push_str("set terminal pngcairo size ");
    let _ = writeln!(s, "{},480", 520 * files.len());
    s.push_str("set output 'figure.png'\n");
    let _ = writeln!(s, "set multiplot layout 1,{}", files.len());
    for f in files {
        let text = std::fs::read_to_string(f).map_err(|_| CliError::MissingFile(f.display().to_string()))?;
        match sniff(&text) {
            Some(FileKind::Grid) => {
                let g = GridFile::parse(&text)?;
                let dx = if g.nx > 1 { (g.x_range.1 - g.x_range.0) / (g.nx - 1) as f64 } else { 0.0 };
                let dy = if g.ny > 1 { (g.y_range.1 - g.y_range.0) / (g.ny - 1) as f64 } else { 0.0 };
                let _ = writeln!(s, "set title 't = {:.6}'", g.t);
                s.push_str("set view map\nset size square\nunset key\n");
                let _ = writeln!(s, "set xrange [{}:{}]", g.y_range.0, g.y_range.1);
                let _ = writeln!(s, "set yrange [{}:{}]", g.x_range.0, g.x_range.1);
                // Line k holds (row i, column j) = (k / ny, k % ny): row along x, column along y.
                let _ = writeln!(
                    s,
                    "plot {} using ({} + {}*(int($0) % {})):({} + {}*int($0 / {})):({}) with image",
                    quoted(f),
                    g.y_range.0,
                    dy,
                    g.ny,
                    g.x_range.0,
                    dx,
                    g.ny,
                    style.expr()
                );
            }
            Some(FileKind::Series) => {
                s.push_str("set datafile separator ','\nset key top right\nset xlabel 't'\nset title ''\n");
                let _ = writeln!(
                    s,
                    "plot {f} skip 1 using 1:(sqrt($2**2+$3**2)) with lines title '|C|', {f} skip 1 using 1:2 with lines title 'Re C'",
                    f = quoted(f)
                );
                s.push_str("set datafile separator whitespace\n");
            }
            None => return Err(CliError::Parse(format!("{} is neither a grid nor a series file", f.display()))),
        }
    }
    s.push_str("unset multiplot\n");
    Ok(s)
}
