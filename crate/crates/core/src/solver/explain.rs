//! Minimal infeasible subsets of user constraints.

use std::time::{Duration, Instant};

use super::{solve_subset, ConstraintGroup, ConstraintSystem, SolveError, SolveMode, SolveStatus};
use crate::model::ConstraintKind;

#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibleCore {
    /// Removing any one of these makes the remainder satisfiable.
    pub groups: Vec<ConstraintGroup>,
    /// True when the declared copy counts were kept in force while
    /// minimizing; the core is then relative to them.
    pub given_redundancy: bool,
}

impl InfeasibleCore {
    pub fn describe(&self) -> String {
        let list: Vec<String> = self.groups.iter().map(ToString::to_string).collect();
        if self.given_redundancy {
            format!("with the declared copy counts, these conflict: {}", list.join("; "))
        } else {
            format!("copy counts exceed the nodes available (one copy per node): {}", list.join("; "))
        }
    }
}

/// Deletion-based extraction: drop each group in turn and keep it out
/// whenever the rest stays infeasible.
pub fn explain_infeasible(system: &ConstraintSystem, time_budget: Duration) -> Result<InfeasibleCore, SolveError> {
    let deadline = Instant::now() + time_budget;
    let infeasible = |active: &[bool]| -> Result<bool, SolveError> {
        let left = deadline.saturating_duration_since(Instant::now());
        match solve_subset(system, SolveMode::Feasibility, left, active).status {
            SolveStatus::Infeasible => Ok(true),
            SolveStatus::Feasible => Ok(false),
            SolveStatus::Timeout => Err(SolveError::Timeout),
        }
    };

    let groups = system.groups();
    let is_red: Vec<bool> = groups.iter().map(|g| g.kind == ConstraintKind::Redundancy).collect();
    if !infeasible(&vec![true; groups.len()])? {
        return Err(SolveError::NotInfeasible);
    }

    let red_only = is_red.clone();
    let (mut active, candidates, given_redundancy) = if infeasible(&red_only)? {
        (red_only, (0..groups.len()).filter(|&g| is_red[g]).collect::<Vec<_>>(), false)
    } else {
        (vec![true; groups.len()], (0..groups.len()).filter(|&g| !is_red[g]).collect(), true)
    };

    for g in candidates {
        active[g] = false;
        if !infeasible(&active)? {
            active[g] = true;
        }
    }
    let core = (0..groups.len())
        .filter(|&g| active[g] && (is_red[g] != given_redundancy))
        .map(|g| groups[g].clone())
        .collect();
    Ok(InfeasibleCore { groups: core, given_redundancy })
}
