use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{write, CliError};
use crate::Globals;

/// Inputs, options and outputs of one run, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub time_budget_s: f64,
    pub inputs: BTreeMap<&'static str, PathBuf>,
    pub options: BTreeMap<&'static str, Value>,
    pub outputs: Vec<PathBuf>,
    pub result: BTreeMap<&'static str, Value>,
}

impl RunManifest {
    pub fn new(command: &'static str, g: &Globals) -> Self {
        RunManifest {
            tool: "resdep",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: g.seed,
            time_budget_s: g.time_budget_s,
            inputs: BTreeMap::new(),
            options: BTreeMap::new(),
            outputs: Vec::new(),
            result: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, name: &'static str, path: &Path) -> &mut Self {
        self.inputs.insert(name, path.to_path_buf());
        self
    }

    pub fn option(&mut self, name: &'static str, value: impl Into<Value>) -> &mut Self {
        self.options.insert(name, value.into());
        self
    }

    pub fn result(&mut self, name: &'static str, value: impl Into<Value>) -> &mut Self {
        self.result.insert(name, value.into());
        self
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Output(e.to_string()))?;
        write(path, &(text + "\n"))
    }
}
