//! Design-time tooling for resilient deployments of distributed actors.
//!
//! * [`model`] - deployment domain types and the direct constraint checker.
//! * [`dsl`] - parsers for the application model, deployment specification,
//!   hardware specification and deployment files.
//! * [`solver`] - pseudo-Boolean branch-and-bound placement engine with an
//!   enumeration oracle and infeasibility explanation.
//! * [`dispatch`] - weighted least-squares power dispatch under a grid cap.
//! * [`ftsim`] - discrete-event simulation of redundancy and consensus groups
//!   under scripted faults.

pub mod dispatch;
pub mod dsl;
pub mod ftsim;
pub mod model;
pub mod solver;

pub use model::{
    check_deployment, validate_problem, ActorSpec, ConstraintKind, DeploymentMatrix, DeploymentProblem, LimitTargets,
    LimitsScope, ModelError, NodeSpec, PlacementRules, ResourceEnvelope, ValidProblem, Violation, ViolationReport,
};
pub use solver::{encode, solve, ConstraintSystem, SolveMode, SolveOutcome, SolveStatus};
