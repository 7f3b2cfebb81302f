//! Exhaustive reference search for small instances.

use std::time::Instant;

use super::{SolveError, SolveMode, SolveOutcome, SolveStats, SolveStatus};
use crate::model::{check_deployment, DeploymentMatrix, ValidProblem};

pub const ORACLE_MAX_CELLS: usize = 24;

/// Enumerates every column assignment, checks each candidate with the model
/// checker and keeps the best one (ties broken towards the lexicographically
/// greatest row-major matrix, as the engine does).
pub fn brute_force_oracle(problem: &ValidProblem, mode: SolveMode) -> Result<SolveOutcome, SolveError> {
    let start = Instant::now();
    let (n, a) = (problem.num_nodes(), problem.num_actors());
    if n * a > ORACLE_MAX_CELLS {
        return Err(SolveError::InstanceTooLarge { cells: n * a, limit: ORACLE_MAX_CELLS });
    }

    let all: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let columns: Vec<Vec<u32>> = (0..a)
        .map(|j| {
            let declared = problem.actors[j].copies;
            let (allowed, hi) = match problem.pinned_nodes(j) {
                Some(pins) => (pins.iter().fold(0u32, |m, &i| m | 1 << i), declared),
                None if mode == SolveMode::MaximizeCopies => (all, n as u32),
                None => (all, declared),
            };
            (0..=all).filter(|&mask| mask & !allowed == 0 && (declared..=hi).contains(&mask.count_ones())).collect()
        })
        .collect();

    let mut search = Search { problem, mode, n, a, columns, chosen: Vec::with_capacity(a), best: None, leaves: 0 };
    search.walk()?;

    let stats = SolveStats { nodes_explored: search.leaves, propagations: 0, wall_time: start.elapsed() };
    Ok(match search.best {
        Some((m, obj)) => SolveOutcome {
            status: SolveStatus::Feasible,
            matrix: Some(m),
            objective_value: (mode != SolveMode::Feasibility).then_some(obj),
            stats,
        },
        None => SolveOutcome { status: SolveStatus::Infeasible, matrix: None, objective_value: None, stats },
    })
}

struct Search<'p> {
    problem: &'p ValidProblem,
    mode: SolveMode,
    n: usize,
    a: usize,
    columns: Vec<Vec<u32>>,
    chosen: Vec<u32>,
    best: Option<(DeploymentMatrix, i64)>,
    leaves: u64,
}

impl Search<'_> {
    fn walk(&mut self) -> Result<(), SolveError> {
        let j = self.chosen.len();
        if j == self.a {
            return self.leaf();
        }
        for ci in 0..self.columns[j].len() {
            let mask = self.columns[j][ci];
            let clash = self.problem.colocated_pairs().iter().any(|&(x, y)| {
                (y == j && x < j && self.chosen[x] != mask) || (x == j && y < j && self.chosen[y] != mask)
            }) || self.problem.separated_pairs().iter().any(|&(x, y)| {
                (y == j && x < j && self.chosen[x] & mask != 0) || (x == j && y < j && self.chosen[y] & mask != 0)
            });
            if clash {
                continue;
            }
            self.chosen.push(mask);
            self.walk()?;
            self.chosen.pop();
        }
        Ok(())
    }

    fn leaf(&mut self) -> Result<(), SolveError> {
        self.leaves += 1;
        let mut m = DeploymentMatrix::zeros(self.n, self.a);
        for (j, &mask) in self.chosen.iter().enumerate() {
            for i in (0..self.n).filter(|i| mask >> i & 1 == 1) {
                m.set(i, j, true);
            }
        }
        let report = if self.mode == SolveMode::MaximizeCopies {
            check_deployment(&self.problem.with_copies_from(&m)?, &m)?
        } else {
            check_deployment(self.problem, &m)?
        };
        if !report.is_empty() {
            return Ok(());
        }
        let obj = match self.mode {
            SolveMode::Feasibility => 0,
            SolveMode::MaximizeCopies => m.total_copies() as i64,
            SolveMode::MinimizeNodesUsed => m.nodes_used() as i64,
        };
        let better = match &self.best {
            None => true,
            Some((bm, bo)) => {
                let cmp = match self.mode {
                    SolveMode::MinimizeNodesUsed => bo.cmp(&obj),
                    _ => obj.cmp(bo),
                };
                cmp.then_with(|| m.cells().cmp(bm.cells())).is_gt()
            }
        };
        if better {
            self.best = Some((m, obj));
        }
        Ok(())
    }
}
