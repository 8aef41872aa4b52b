use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::settings::RunConfig;

/// CSV text with `#` metadata lines ahead of the header.
pub struct Table {
    text: String,
    header: Vec<&'static str>,
}

impl Table {
    pub fn new(cfg: &RunConfig, command: &str, header: &[&'static str]) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# fso-secrecy {} {command}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(text, "# config_hash={}", cfg.hash());
        text.push_str(&header.join(","));
        text.push('\n');
        Table {
            text,
            header: header.to_vec(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    /// Write to `--out`, or stdout when absent.
    pub fn emit(&self, cfg: &RunConfig) -> CliResult<()> {
        match &cfg.out {
            Some(path) => std::fs::write(path, &self.text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(self.text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string())),
        }
    }

    /// gnuplot script plotting column `y` against column `x` (1-based).
    pub fn write_plot(&self, csv: &Path, x: usize, y: usize, log_y: bool) -> CliResult<()> {
        let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set datafile commentschars '#'");
        let _ = writeln!(s, "set key autotitle columnhead");
        let _ = writeln!(s, "set xlabel '{}'", self.header[x - 1]);
        let _ = writeln!(s, "set ylabel '{}'", self.header[y - 1]);
        if log_y {
            let _ = writeln!(s, "set logscale y");
        }
        let _ = writeln!(s, "plot '{name}' using {x}:{y} with linespoints");
        let mut path = csv.as_os_str().to_owned();
        path.push(".gp");
        std::fs::write(&path, s).map_err(|e| CliError::Io(format!("{}: {e}", Path::new(&path).display())))
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn value(v: f64) -> String {
    format!("{v:.12e}")
}
