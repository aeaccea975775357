//! Simulator `.ini` configuration.
//!
//! ```text
//! [system]
//! total_qbit=31   // Total qubit for simulation
//! rank_qbit=0
//! buffer_qbit=28
//! ```
//!
//! Only the `[system]` section and these three keys are accepted. Text after
//! `//`, `;` or `#` is a comment.

use thiserror::Error;

use crate::circuit::{LayoutError, LayoutParams};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {detail}")]
    Syntax { line: usize, detail: String },
    #[error("missing key `{0}` in [system]")]
    MissingKey(&'static str),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SystemConfig {
    pub total_qbit: usize,
    pub rank_qbit: usize,
    pub buffer_qbit: usize,
}

const KEYS: [&str; 3] = ["total_qbit", "rank_qbit", "buffer_qbit"];

fn strip_comment(line: &str) -> &str {
    let cut = ["//", ";", "#"].iter().filter_map(|m| line.find(m)).min().unwrap_or(line.len());
    line[..cut].trim()
}

pub fn parse_ini(text: &str) -> Result<SystemConfig, ConfigError> {
    let mut values: [Option<usize>; 3] = [None; 3];
    let mut in_system = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |detail: String| ConfigError::Syntax { line, detail };
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if name.trim() != "system" {
                return Err(err(format!("unknown section [{}]", name.trim())));
            }
            in_system = true;
            continue;
        }
        if !in_system {
            return Err(err("key outside the [system] section".into()));
        }
        let (key, value) = body.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{body}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let slot = KEYS.iter().position(|k| *k == key).ok_or_else(|| err(format!("unknown key `{key}`")))?;
        if values[slot].is_some() {
            return Err(err(format!("duplicate key `{key}`")));
        }
        values[slot] =
            Some(value.parse().map_err(|_| err(format!("`{key}` must be a non-negative integer, got `{value}`")))?);
    }
    let get = |slot: usize| values[slot].ok_or(ConfigError::MissingKey(KEYS[slot]));
    Ok(SystemConfig { total_qbit: get(0)?, rank_qbit: get(1)?, buffer_qbit: get(2)? })
}

impl SystemConfig {
    /// Layout with the given chunk width and the default cache line.
    pub fn layout(&self, chunk_qubits: usize) -> Result<LayoutParams, ConfigError> {
        let layout = LayoutParams::new(self.total_qbit, self.rank_qbit, chunk_qubits).with_buffer(self.buffer_qbit);
        layout.validate()?;
        Ok(layout)
    }
}
