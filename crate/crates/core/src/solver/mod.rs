//! Pseudo-Boolean placement engine.
//!
//! [`encode`] turns a validated problem into rows over the binary matrix
//! `x[node][actor]`; [`solve`] searches it depth-first with unit propagation,
//! budget pruning, objective bounds and symmetry breaking between
//! interchangeable nodes.
//!
//! Among equally good matrices the engine returns the lexicographically
//! greatest one in row-major order (values tried `1` before `0`), which fills
//! earlier nodes first.

mod explain;
mod oracle;
mod search;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::model::{ConstraintKind, DeploymentMatrix, ModelError, ValidProblem};

pub use explain::{explain_infeasible, InfeasibleCore};
pub use oracle::{brute_force_oracle, ORACLE_MAX_CELLS};

pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("instance has {cells} cells, the oracle enumerates at most {limit}")]
    InstanceTooLarge { cells: usize, limit: usize },
    #[error("the system is satisfiable")]
    NotInfeasible,
    #[error("time budget exhausted")]
    Timeout,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveMode {
    /// Any matrix meeting every row.
    Feasibility,
    /// Copies become variables in `[declared, |nodes|]` (pinned actors stay
    /// fixed); maximize the total number of copies.
    MaximizeCopies,
    /// Copies fixed at declared values; minimize the number of nodes used.
    MinimizeNodesUsed,
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMode::Feasibility => "feasible",
            SolveMode::MaximizeCopies => "max-redundancy",
            SolveMode::MinimizeNodesUsed => "min-cost",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Feasible,
    Infeasible,
    /// Budget ran out; the outcome may still carry the best matrix found.
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveStats {
    pub nodes_explored: u64,
    pub propagations: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub matrix: Option<DeploymentMatrix>,
    /// Total copies or nodes used, depending on the mode. `None` for
    /// feasibility solves.
    pub objective_value: Option<i64>,
    pub stats: SolveStats,
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        self.status == SolveStatus::Feasible
    }
}

/// A user-level constraint: the unit reported by infeasibility explanations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintGroup {
    pub kind: ConstraintKind,
    /// Actor ids (and the node id for resource rows).
    pub subjects: Vec<String>,
}

impl fmt::Display for ConstraintGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind, self.subjects.join(", "))
    }
}

/// One row over the matrix variables.
#[derive(Debug, Clone, PartialEq)]
pub enum Row {
    /// Column sum equals `copies` (or lies in `[copies, |nodes|]` when copies
    /// are maximized and the actor is not pinned).
    Redundancy { actor: usize, copies: u32, pinned: bool },
    /// `x[node][actor] = 0`.
    Forbid { node: usize, actor: usize },
    /// `x[node][a] <-> x[node][b]`.
    Colocate { node: usize, a: usize, b: usize },
    /// `not (x[node][a] and x[node][b])`.
    Separate { node: usize, a: usize, b: usize },
    /// `sum_j x[node][j] * coeffs[j] <= rhs - eps`.
    Budget { node: usize, resource: ConstraintKind, coeffs: Vec<f64>, rhs: f64 },
    /// `sum_j x[node][j] * rates[j] + max_{j: x=1} bursts[j] <= rhs - eps`.
    Network { node: usize, rates: Vec<f64>, bursts: Vec<f64>, rhs: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Index into [`ConstraintSystem::groups`].
    pub group: usize,
    pub row: Row,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    node_ids: Vec<String>,
    actor_ids: Vec<String>,
    groups: Vec<ConstraintGroup>,
    constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn num_nodes(&self) -> usize {
        self.node_ids.len()
    }

    pub fn num_actors(&self) -> usize {
        self.actor_ids.len()
    }

    pub fn num_vars(&self) -> usize {
        self.num_nodes() * self.num_actors()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn actor_ids(&self) -> &[String] {
        &self.actor_ids
    }

    pub fn groups(&self) -> &[ConstraintGroup] {
        &self.groups
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn count_rows(&self, pred: impl Fn(&Row) -> bool) -> usize {
        self.constraints.iter().filter(|c| pred(&c.row)).count()
    }

    fn push_group(&mut self, kind: ConstraintKind, subjects: Vec<String>) -> usize {
        self.groups.push(ConstraintGroup { kind, subjects });
        self.groups.len() - 1
    }
}

/// Emits redundancy, host-pin, colocation, separation and (for limited
/// nodes) CPU, memory, disk and network rows.
pub fn encode(problem: &ValidProblem) -> ConstraintSystem {
    let mut sys = ConstraintSystem {
        node_ids: problem.nodes.iter().map(|n| n.id.clone()).collect(),
        actor_ids: problem.actors.iter().map(|a| a.id.clone()).collect(),
        groups: Vec::new(),
        constraints: Vec::new(),
    };
    let n = problem.num_nodes();

    for (j, a) in problem.actors.iter().enumerate() {
        let pins = problem.pinned_nodes(j);
        let group = sys.push_group(ConstraintKind::Redundancy, vec![a.id.clone()]);
        sys.constraints
            .push(Constraint { group, row: Row::Redundancy { actor: j, copies: a.copies, pinned: pins.is_some() } });
        if let Some(pins) = pins {
            let group = sys.push_group(ConstraintKind::HostPin, vec![a.id.clone()]);
            for node in (0..n).filter(|i| !pins.contains(i)) {
                sys.constraints.push(Constraint { group, row: Row::Forbid { node, actor: j } });
            }
        }
    }

    let pair_name = |a: usize, b: usize| vec![problem.actors[a].id.clone(), problem.actors[b].id.clone()];
    for &(a, b) in problem.colocated_pairs() {
        let group = sys.push_group(ConstraintKind::Colocation, pair_name(a, b));
        for node in 0..n {
            sys.constraints.push(Constraint { group, row: Row::Colocate { node, a, b } });
        }
    }
    for &(a, b) in problem.separated_pairs() {
        let group = sys.push_group(ConstraintKind::Separation, pair_name(a, b));
        for node in 0..n {
            sys.constraints.push(Constraint { group, row: Row::Separate { node, a, b } });
        }
    }

    if problem.rules.limits_enabled() {
        let envs: Vec<_> = problem.actors.iter().map(|a| a.env).collect();
        for (node, spec) in problem.nodes.iter().enumerate().filter(|(i, _)| problem.is_limited(*i)) {
            let budgets = [
                (ConstraintKind::Cpu, envs.iter().map(|e| e.cpu_pct / 100.0).collect::<Vec<_>>(), spec.cpu_budget()),
                (ConstraintKind::Memory, envs.iter().map(|e| e.mem_mb).collect(), spec.mem_budget()),
                (ConstraintKind::Disk, envs.iter().map(|e| e.spc_mb).collect(), spec.spc_budget()),
            ];
            for (resource, coeffs, rhs) in budgets {
                let group = sys.push_group(resource, vec![spec.id.clone()]);
                sys.constraints.push(Constraint { group, row: Row::Budget { node, resource, coeffs, rhs } });
            }
            let group = sys.push_group(ConstraintKind::Network, vec![spec.id.clone()]);
            sys.constraints.push(Constraint {
                group,
                row: Row::Network {
                    node,
                    rates: envs.iter().map(|e| e.net_rate_kbps).collect(),
                    bursts: envs.iter().map(|e| e.net_burst_kbps()).collect(),
                    rhs: spec.net_budget(),
                },
            });
        }
    }
    sys
}

/// Searches `system` in the given mode.
pub fn solve(system: &ConstraintSystem, mode: SolveMode, time_budget: Duration) -> SolveOutcome {
    let active = vec![true; system.groups.len()];
    search::run(system, mode, time_budget, &active)
}

pub(crate) fn solve_subset(
    system: &ConstraintSystem,
    mode: SolveMode,
    time_budget: Duration,
    active_groups: &[bool],
) -> SolveOutcome {
    search::run(system, mode, time_budget, active_groups)
}

/// Checks a matrix under the mode's copy semantics: exact declared copies,
/// or copies within `[declared, |nodes|]` (pinned actors exact) when copies
/// are maximized.
pub fn check_for_mode(
    problem: &ValidProblem,
    mode: SolveMode,
    m: &DeploymentMatrix,
) -> Result<crate::model::ViolationReport, ModelError> {
    if mode != SolveMode::MaximizeCopies {
        return crate::model::check_deployment(problem, m);
    }
    let adjusted = problem.with_copies_from(m)?;
    let mut report = crate::model::check_deployment(&adjusted, m)?;
    for (j, a) in problem.actors.iter().enumerate() {
        let got = m.copies_of(j)?;
        let pinned = problem.pinned_nodes(j).is_some();
        let hi = if pinned { a.copies as usize } else { problem.num_nodes() };
        if got < a.copies as usize || got > hi {
            report.violations.push(crate::model::Violation {
                kind: ConstraintKind::Redundancy,
                subjects: vec![a.id.clone()],
                lhs: got as f64,
                budget: f64::from(a.copies),
                message: format!("`{}` has {} copies, allowed {}..={}", a.id, got, a.copies, hi),
            });
        }
    }
    Ok(report)
}
