use std::io::{self, Write};

use sha2::{Digest, Sha256};

/// Hex SHA-256 of the effective (post-override) scenario text.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Comma-separated time series with a `#`-commented preamble.
pub struct CsvSink<W: Write> {
    out: W,
    width: usize,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut out: W, columns: &[&str], hash: &str, mode: &str) -> io::Result<Self> {
        writeln!(out, "# nhq time series")?;
        writeln!(out, "# config-sha256: {hash}")?;
        writeln!(out, "# mode: {mode}")?;
        writeln!(out, "# columns: {}", columns.join(" "))?;
        writeln!(out, "{}", columns.join(","))?;
        Ok(Self {
            out,
            width: columns.len(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> io::Result<()> {
        debug_assert_eq!(values.len(), self.width);
        let line: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    /// Marks the file as truncated by a failure and flushes it.
    pub fn fail(&mut self, message: &str) -> io::Result<()> {
        writeln!(self.out, "# FAILED: {}", message.replace('\n', " "))?;
        self.out.flush()
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
