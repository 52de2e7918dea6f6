use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::CliError;

/// CSV text with `#` header lines and round-trippable floats.
#[derive(Debug, Default)]
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        let mut t = Self::default();
        t.comment(&columns.join(","));
        t
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn row(&mut self, label: Option<u32>, values: &[f64]) {
        let mut cells: Vec<String> = label.into_iter().map(|n| n.to_string()).collect();
        cells.extend(values.iter().map(|v| fmt(*v)));
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// 17 significant digits.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    version: &'a str,
    args: &'a [String],
    threads: usize,
    unix_time: u64,
    elapsed_seconds: f64,
    outputs: &'a [PathBuf],
}

/// Collects output files and writes their sidecars at the end of a run.
pub struct Run<'a> {
    command: &'a str,
    args: &'a [String],
    start: Instant,
    written: Vec<PathBuf>,
}

impl<'a> Run<'a> {
    pub fn new(command: &'a str, args: &'a [String]) -> Self {
        Self { command, args, start: Instant::now(), written: Vec::new() }
    }

    /// Writes `text` to `path`, or to stdout when `path` is `None`.
    pub fn emit(&mut self, path: Option<&Path>, text: &str) -> Result<(), CliError> {
        match path {
            Some(p) => {
                std::fs::write(p, text).map_err(|e| CliError::io(p, e))?;
                self.written.push(p.to_path_buf());
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(), CliError> {
        let meta = Meta {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            args: self.args,
            threads: rayon::current_num_threads(),
            unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            elapsed_seconds: self.start.elapsed().as_secs_f64(),
            outputs: &self.written,
        };
        let json = serde_json::to_string_pretty(&meta).expect("metadata serialises");
        for p in &self.written {
            let mut side = p.clone().into_os_string();
            side.push(".meta.json");
            let side = PathBuf::from(side);
            std::fs::write(&side, &json).map_err(|e| CliError::io(&side, e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["n", "x"]);
        t.comment("note");
        t.row(Some(2), &[0.5]);
        assert_eq!(t.into_string(), "# n,x\n# note\n2,5.0000000000000000e-1\n");
    }
}
