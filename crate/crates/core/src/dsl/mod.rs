//! Input and output formats.
//!
//! * `<app>.riaps` - application model; only actor declarations and their
//!   `uses` resource blocks are interpreted, everything else is skipped.
//! * `<app>.dspec` - deployment specification directives.
//! * `hardware-spec.conf` - INI hardware capacities plus an optional
//!   `[network]` section carrying `nic_rate` / `nic_ceil`.
//! * `<app>.depl` - the generated deployment, one `on (<node>) <Actor>;` line
//!   per placed copy.

mod app;
mod assemble;
mod depl;
mod dspec;
mod hwspec;
pub(crate) mod lexer;

use thiserror::Error;

pub use app::{parse_app_model, AppActor, AppModel};
pub use assemble::{assemble_problem, NetworkConfig};
pub use depl::{emit_depl, parse_depl, DeplEntry, DeplFile};
pub use dspec::{parse_dspec, DeployStmt, DspecFile, LimitsDirective};
pub use hwspec::{parse_hwspec, HardwareRecord, HardwareSpecFile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DslError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate actor `{name}`")]
    DuplicateActor { name: String, line: usize, col: usize },
    #[error("{line}:{col}: malformed uses entry: {msg}")]
    MalformedUsesEntry { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: copies for `{actor}` given more than once")]
    DuplicateCopiesOverride { actor: String, line: usize, col: usize },
    #[error("{line}:{col}: `{directive}` needs at least two members")]
    EmptyGroup { directive: String, line: usize, col: usize },
    #[error("{line}:{col}: `{actor}` appears in more than one deploy statement")]
    DuplicateDeploy { actor: String, line: usize, col: usize },
    #[error("section [{section}] is missing `{field}`")]
    MissingField { section: String, field: String },
    #[error("{line}:1: bad number for `{field}`: `{value}`")]
    BadNumber { line: usize, field: String, value: String },
    #[error("{line}:1: section [{section}] defined twice")]
    DuplicateSection { section: String, line: usize },
    #[error("{line}:1: `{field}` set twice in [{section}]")]
    DuplicateField { section: String, field: String, line: usize },
    #[error("dspec is for app `{dspec}` but the model defines `{model}`")]
    AppNameMismatch { model: String, dspec: String },
    #[error("no hardware section [{0}]")]
    UnknownHardwareKey(String),
    #[error("dspec refers to unknown actor `{0}`")]
    UnknownActor(String),
    #[error("node `{0}` is covered by more than one limits directive")]
    OverlappingLimits(String),
    #[error("limits enabled but NIC rate/ceil are not configured")]
    MissingNetworkConfig,
    #[error("{line}:{col}: unknown node `{name}`")]
    UnknownNode { name: String, line: usize, col: usize },
    #[error("{line}:{col}: unknown actor `{name}`")]
    UnknownDeplActor { name: String, line: usize, col: usize },
    #[error("{line}:{col}: `{actor}` assigned to `{node}` twice")]
    DuplicateAssignment { node: String, actor: String, line: usize, col: usize },
    #[error("refusing to emit a deployment with {0} violation(s)")]
    InfeasibleMatrix(usize),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

impl DslError {
    /// Source position `(line, column)` if the error refers to one.
    pub fn position(&self) -> Option<(usize, usize)> {
        use DslError::*;
        match self {
            Syntax { line, col, .. }
            | DuplicateActor { line, col, .. }
            | MalformedUsesEntry { line, col, .. }
            | DuplicateCopiesOverride { line, col, .. }
            | EmptyGroup { line, col, .. }
            | DuplicateDeploy { line, col, .. }
            | UnknownNode { line, col, .. }
            | UnknownDeplActor { line, col, .. }
            | DuplicateAssignment { line, col, .. } => Some((*line, *col)),
            BadNumber { line, .. } | DuplicateSection { line, .. } | DuplicateField { line, .. } => Some((*line, 1)),
            _ => None,
        }
    }
}

/// Formats a non-negative number so that it lexes back to the same value.
pub(crate) fn fmt_num(v: f64) -> String {
    format!("{v}")
}
