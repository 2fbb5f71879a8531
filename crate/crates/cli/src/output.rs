use std::fs;

use serde::Serialize;
use serde_json::json;

use crate::{Cli, CliError, Format};

/// Renders rows as CSV (header plus one line per row) or as a JSON array.
pub fn render<T: Serialize>(format: Format, header: &str, rows: &[T], csv: impl Fn(&T) -> String) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut out = String::with_capacity(64 * (rows.len() + 1));
            out.push_str(header);
            out.push('\n');
            for row in rows {
                out.push_str(&csv(row));
                out.push('\n');
            }
            Ok(out)
        }
        Format::Json => {
            let mut out = serde_json::to_string_pretty(rows).map_err(|e| CliError::Runtime(e.to_string()))?;
            out.push('\n');
            Ok(out)
        }
    }
}

fn write_file(path: &str, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Runtime(format!("cannot write {path}: {e}")))
}

/// Collects the files written by one invocation and its manifest.
pub struct Sink<'a> {
    cli: &'a Cli,
    master_seed: Option<u64>,
    written: Vec<String>,
}

impl<'a> Sink<'a> {
    pub fn new(cli: &'a Cli, master_seed: Option<u64>) -> Self {
        Self {
            cli,
            master_seed,
            written: Vec::new(),
        }
    }

    /// The primary output goes to `--out` or stdout.
    pub fn primary(&mut self, body: &str) -> Result<(), CliError> {
        match &self.cli.out {
            Some(path) => {
                write_file(path, body)?;
                self.written.insert(0, path.clone());
            }
            None => print!("{body}"),
        }
        Ok(())
    }

    pub fn extra(&mut self, path: &str, body: &str) -> Result<(), CliError> {
        write_file(path, body)?;
        self.written.push(path.to_string());
        Ok(())
    }

    /// Writes `<first output>.manifest.json` when anything went to a file.
    pub fn finish(self) -> Result<(), CliError> {
        let Some(first) = self.written.first() else {
            return Ok(());
        };
        let manifest = json!({
            "tool": "mdl",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": self.cli.command.name(),
            "argv": self.cli.argv,
            "parameters": self.cli,
            "master_seed": self.master_seed,
            "outputs": self.written,
        });
        let body = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
        write_file(&format!("{first}.manifest.json"), &(body + "\n"))
    }
}
