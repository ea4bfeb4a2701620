//! The envelope shared by every command's output.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

pub struct Outcome {
    pub text: String,
    pub json: String,
    /// False when a verification failed.
    pub ok: bool,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
pub struct Report {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    input: BTreeMap<&'static str, String>,
    flags: BTreeMap<&'static str, String>,
    seed: u64,
    ok: bool,
    result: Value,
}

impl Report {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Report {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            input: BTreeMap::new(),
            flags: BTreeMap::new(),
            seed,
            ok: true,
            result: Value::Null,
        }
    }

    pub fn input(mut self, key: &'static str, value: impl Display) -> Self {
        self.input.insert(key, value.to_string());
        self
    }

    pub fn flag(mut self, key: &'static str, value: impl Display) -> Self {
        self.flags.insert(key, value.to_string());
        self
    }

    pub fn finish(mut self, text: String, result: Value, ok: bool) -> anyhow::Result<Outcome> {
        self.ok = ok;
        self.result = result;
        let mut json = serde_json::to_string_pretty(&self)?;
        json.push('\n');
        Ok(Outcome {
            text,
            json,
            ok,
            out: None,
        })
    }
}
