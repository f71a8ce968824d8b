use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

/// Deterministic text report; wall-clock times go to stderr instead.
#[derive(Default)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key:<22}{value}");
    }

    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        print!("{}", self.text);
        if let Some(path) = out {
            std::fs::write(path, &self.text).map_err(|e| CliError::io(path, e))?;
        }
        Ok(())
    }
}
