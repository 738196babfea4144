//! CSV and JSON writers. Numbers are printed with 17 significant digits in
//! scientific notation so identical runs give identical bytes.

use crate::config::RunConfig;
use crate::error::CliError;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thermal_decoherence::constants::table_hash;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv {
            text: format!("{header}\n"),
        }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            first = false;
            let _ = write!(self.text, "{f}");
        }
        self.text.push('\n');
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, &self.text)
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

#[derive(Serialize)]
struct Sidecar<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    constants_hash: String,
    config: &'a RunConfig,
    outputs: &'a [String],
    summary: T,
}

/// Writes `<command>.json` next to the CSV outputs.
pub fn write_sidecar<T: Serialize>(
    cfg: &RunConfig,
    command: &str,
    outputs: &[String],
    summary: T,
) -> Result<PathBuf, CliError> {
    let side = Sidecar {
        command,
        version: env!("CARGO_PKG_VERSION"),
        constants_hash: table_hash(),
        config: cfg,
        outputs,
        summary,
    };
    let path = cfg.out.join(format!("{command}.json"));
    let text = serde_json::to_string_pretty(&side).map_err(|e| CliError::Config(e.to_string()))?;
    write_file(&path, &(text + "\n"))?;
    Ok(path)
}
