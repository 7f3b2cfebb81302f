//! Depth-first branch-and-bound over the row-major matrix variables.

use std::time::{Duration, Instant};

use super::{ConstraintSystem, Row, SolveMode, SolveOutcome, SolveStats, SolveStatus};
use crate::model::{DeploymentMatrix, BUDGET_EPS};

const UNSET: i8 = -1;
const CLOCK_INTERVAL: u64 = 1024;

#[derive(Debug, Clone, Copy)]
enum Link {
    Equal(usize),
    Exclude(usize),
}

#[derive(Debug, Clone)]
struct ResourceRow {
    weights: Vec<f64>,
    /// Present for network rows.
    bursts: Option<Vec<f64>>,
    rhs: f64,
}

struct Engine {
    mode: SolveMode,
    n: usize,
    a: usize,
    val: Vec<i8>,
    trail: Vec<usize>,
    qhead: usize,
    col_ones: Vec<u32>,
    col_free: Vec<u32>,
    col_active: Vec<bool>,
    lb: Vec<u32>,
    ub: Vec<u32>,
    links: Vec<Vec<Link>>,
    resources: Vec<ResourceRow>,
    node_rows: Vec<Vec<usize>>,
    sym_prev: Vec<Option<usize>>,
    cliques: Vec<Vec<usize>>,
    cover: Vec<Vec<usize>>,
    uncovered: Vec<usize>,
    forbids: Vec<usize>,
    best: Option<(Vec<i8>, i64)>,
    stats: SolveStats,
    deadline: Instant,
    timed_out: bool,
    stop: bool,
}

pub(super) fn run(sys: &ConstraintSystem, mode: SolveMode, budget: Duration, active: &[bool]) -> SolveOutcome {
    let start = Instant::now();
    let mut eng = Engine::new(sys, mode, start + budget, active);
    if eng.root() {
        eng.dfs(0);
    }
    eng.stats.wall_time = start.elapsed();
    eng.outcome()
}

impl Engine {
    fn new(sys: &ConstraintSystem, mode: SolveMode, deadline: Instant, active: &[bool]) -> Self {
        let (n, a) = (sys.num_nodes(), sys.num_actors());
        let mut eng = Engine {
            mode,
            n,
            a,
            val: vec![UNSET; n * a],
            trail: Vec::with_capacity(n * a),
            qhead: 0,
            col_ones: vec![0; a],
            col_free: vec![n as u32; a],
            col_active: vec![false; a],
            lb: vec![0; a],
            ub: vec![n as u32; a],
            links: vec![Vec::new(); n * a],
            resources: Vec::new(),
            node_rows: vec![Vec::new(); n],
            sym_prev: vec![None; n],
            cliques: Vec::new(),
            cover: Vec::new(),
            uncovered: Vec::new(),
            forbids: Vec::new(),
            best: None,
            stats: SolveStats::default(),
            deadline,
            timed_out: false,
            stop: false,
        };

        let mut sep_count = vec![vec![0usize; a]; a];
        let mut signatures: Vec<Vec<Vec<u64>>> = vec![Vec::new(); n];
        for c in sys.constraints().iter().filter(|c| active[c.group]) {
            match &c.row {
                Row::Redundancy { actor, copies, pinned } => {
                    let j = *actor;
                    eng.col_active[j] = true;
                    eng.lb[j] = *copies;
                    eng.ub[j] = if mode == SolveMode::MaximizeCopies && !pinned { n as u32 } else { *copies };
                }
                Row::Forbid { node, actor } => {
                    eng.forbids.push(node * a + actor);
                    signatures[*node].push(vec![0, *actor as u64]);
                }
                Row::Colocate { node, a: x, b: y } => {
                    let (vx, vy) = (node * a + x, node * a + y);
                    eng.links[vx].push(Link::Equal(vy));
                    eng.links[vy].push(Link::Equal(vx));
                    signatures[*node].push(vec![1, *x as u64, *y as u64]);
                }
                Row::Separate { node, a: x, b: y } => {
                    let (vx, vy) = (node * a + x, node * a + y);
                    eng.links[vx].push(Link::Exclude(vy));
                    eng.links[vy].push(Link::Exclude(vx));
                    sep_count[*x][*y] += 1;
                    sep_count[*y][*x] += 1;
                    signatures[*node].push(vec![2, *x as u64, *y as u64]);
                }
                Row::Budget { node, resource, coeffs, rhs } => {
                    let mut sig = vec![3, *resource as u64, rhs.to_bits()];
                    sig.extend(coeffs.iter().map(|v| v.to_bits()));
                    signatures[*node].push(sig);
                    eng.node_rows[*node].push(eng.resources.len());
                    eng.resources.push(ResourceRow { weights: coeffs.clone(), bursts: None, rhs: *rhs });
                }
                Row::Network { node, rates, bursts, rhs } => {
                    let mut sig = vec![4, rhs.to_bits()];
                    sig.extend(rates.iter().chain(bursts).map(|v| v.to_bits()));
                    signatures[*node].push(sig);
                    eng.node_rows[*node].push(eng.resources.len());
                    eng.resources.push(ResourceRow { weights: rates.clone(), bursts: Some(bursts.clone()), rhs: *rhs });
                }
            }
        }

        for sig in &mut signatures {
            sig.sort();
        }
        for i in 0..n {
            eng.sym_prev[i] = (0..i).rev().find(|&p| signatures[p] == signatures[i]);
        }

        // Pairs kept apart on every node form the graph whose cliques bound
        // how many copies fit per node.
        let adj: Vec<Vec<bool>> =
            (0..a).map(|x| (0..a).map(|y| x != y && n > 0 && sep_count[x][y] == n).collect()).collect();
        eng.cliques = maximal_cliques(&adj);
        let mut covered = vec![false; a];
        let mut by_size = eng.cliques.clone();
        by_size.sort_by(|p, q| q.len().cmp(&p.len()).then_with(|| p.cmp(q)));
        for k in by_size {
            if k.len() > 1 && k.iter().all(|&j| !covered[j]) {
                k.iter().for_each(|&j| covered[j] = true);
                eng.cover.push(k);
            }
        }
        eng.uncovered = (0..a).filter(|&j| !covered[j]).collect();
        eng
    }

    fn outcome(&self) -> SolveOutcome {
        let matrix = self.best.as_ref().map(|(cells, _)| {
            let mut m = DeploymentMatrix::zeros(self.n, self.a);
            for (v, &b) in cells.iter().enumerate() {
                m.set(v / self.a.max(1), v % self.a.max(1), b == 1);
            }
            m
        });
        let objective_value = match self.mode {
            SolveMode::Feasibility => None,
            _ => self.best.as_ref().map(|(_, o)| *o),
        };
        let status = if self.timed_out {
            SolveStatus::Timeout
        } else if self.best.is_some() {
            SolveStatus::Feasible
        } else {
            SolveStatus::Infeasible
        };
        SolveOutcome { status, matrix, objective_value, stats: self.stats }
    }

    fn assign(&mut self, v: usize, b: bool) -> bool {
        let want = b as i8;
        if self.val[v] != UNSET {
            return self.val[v] == want;
        }
        self.val[v] = want;
        self.trail.push(v);
        let j = v % self.a;
        self.col_free[j] -= 1;
        if b {
            self.col_ones[j] += 1;
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            let j = v % self.a;
            self.col_free[j] += 1;
            if self.val[v] == 1 {
                self.col_ones[j] -= 1;
            }
            self.val[v] = UNSET;
        }
        self.qhead = mark;
    }

    /// Forces a column's free cells once its count hits a bound.
    fn settle_column(&mut self, j: usize) -> bool {
        if !self.col_active[j] {
            return true;
        }
        let (ones, free) = (self.col_ones[j], self.col_free[j]);
        if ones > self.ub[j] || ones + free < self.lb[j] {
            return false;
        }
        if free == 0 {
            return true;
        }
        let fill = if ones == self.ub[j] {
            false
        } else if ones + free == self.lb[j] {
            true
        } else {
            return true;
        };
        for i in 0..self.n {
            let v = i * self.a + j;
            if self.val[v] == UNSET && !self.assign(v, fill) {
                return false;
            }
        }
        true
    }

    fn row_load(&self, r: usize, node: usize, extra: Option<usize>) -> f64 {
        let row = &self.resources[r];
        let base = node * self.a;
        let on = |k: usize| self.val[base + k] == 1 || extra == Some(k);
        let sum: f64 = (0..self.a).filter(|&k| on(k)).map(|k| row.weights[k]).sum();
        match &row.bursts {
            None => sum,
            Some(b) => sum + (0..self.a).filter(|&k| on(k)).map(|k| b[k]).fold(0.0, f64::max),
        }
    }

    fn fits(lhs: f64, rhs: f64) -> bool {
        lhs <= rhs - BUDGET_EPS
    }

    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let v = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let (i, j) = (v / self.a, v % self.a);
            let on = self.val[v] == 1;
            if !self.settle_column(j) {
                return false;
            }
            for li in 0..self.links[v].len() {
                let ok = match self.links[v][li] {
                    Link::Equal(o) => self.assign(o, on),
                    Link::Exclude(o) => !on || self.assign(o, false),
                };
                if !ok {
                    return false;
                }
            }
            if on {
                for ri in 0..self.node_rows[i].len() {
                    let r = self.node_rows[i][ri];
                    if !Self::fits(self.row_load(r, i, None), self.resources[r].rhs) {
                        return false;
                    }
                    for k in 0..self.a {
                        let w = i * self.a + k;
                        if self.val[w] == UNSET
                            && !Self::fits(self.row_load(r, i, Some(k)), self.resources[r].rhs)
                            && !self.assign(w, false)
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn root(&mut self) -> bool {
        for j in 0..self.a {
            if !self.settle_column(j) {
                return false;
            }
        }
        for f in 0..self.forbids.len() {
            if !self.assign(self.forbids[f], false) {
                return false;
            }
        }
        // Single actors that exceed an empty node's budget never go there.
        for i in 0..self.n {
            for ri in 0..self.node_rows[i].len() {
                let r = self.node_rows[i][ri];
                for k in 0..self.a {
                    let v = i * self.a + k;
                    if self.val[v] == UNSET
                        && !Self::fits(self.row_load(r, i, Some(k)), self.resources[r].rhs)
                        && !self.assign(v, false)
                    {
                        return false;
                    }
                }
            }
        }
        self.propagate()
    }

    fn tick(&mut self) {
        self.stats.nodes_explored += 1;
        if self.stats.nodes_explored.is_multiple_of(CLOCK_INTERVAL) && Instant::now() >= self.deadline {
            self.timed_out = true;
            self.stop = true;
        }
    }

    fn dfs(&mut self, pos: usize) {
        self.tick();
        if self.stop {
            return;
        }
        let total = self.n * self.a;
        let mut pos = pos;
        while pos < total && self.val[pos] != UNSET {
            pos += 1;
        }
        if !self.bound_allows() {
            return;
        }
        if pos == total {
            self.leaf();
            return;
        }
        let (i, k) = (pos / self.a, pos % self.a);
        let mut allow_one = true;
        if let Some(p) = self.sym_prev[i] {
            match self.prefix_cmp(i, p, k) {
                std::cmp::Ordering::Greater => return,
                std::cmp::Ordering::Less => {}
                std::cmp::Ordering::Equal => allow_one = self.val[p * self.a + k] == 1,
            }
        }
        for b in [true, false] {
            if b && !allow_one {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(pos, b) && self.propagate() {
                self.dfs(pos + 1);
            }
            self.undo(mark);
            if self.stop {
                return;
            }
        }
    }

    /// Compares the first `len` cells of rows `i` and `p` (1 above 0); cells
    /// of `i` may be unset only at or after the first difference.
    fn prefix_cmp(&self, i: usize, p: usize, len: usize) -> std::cmp::Ordering {
        for c in 0..len {
            let (x, y) = (self.val[i * self.a + c], self.val[p * self.a + c]);
            if x != y {
                return x.cmp(&y);
            }
        }
        std::cmp::Ordering::Equal
    }

    fn leaf(&mut self) {
        for i in 0..self.n {
            if let Some(p) = self.sym_prev[i] {
                if self.prefix_cmp(i, p, self.a) == std::cmp::Ordering::Greater {
                    return;
                }
            }
        }
        let obj = match self.mode {
            SolveMode::Feasibility => 0,
            SolveMode::MaximizeCopies => self.col_ones.iter().map(|&c| c as i64).sum(),
            SolveMode::MinimizeNodesUsed => self.rows_used() as i64,
        };
        let better = match (&self.best, self.mode) {
            (None, _) => true,
            (Some((_, b)), SolveMode::MaximizeCopies) => obj > *b,
            (Some((_, b)), SolveMode::MinimizeNodesUsed) => obj < *b,
            (Some(_), SolveMode::Feasibility) => false,
        };
        if better {
            self.best = Some((self.val.clone(), obj));
        }
        if self.mode == SolveMode::Feasibility {
            self.stop = true;
        }
    }

    fn rows_used(&self) -> usize {
        (0..self.n).filter(|&i| self.row_has(i, 1)).count()
    }

    fn row_has(&self, i: usize, state: i8) -> bool {
        self.val[i * self.a..(i + 1) * self.a].contains(&state)
    }

    fn bound_allows(&self) -> bool {
        let Some((_, best)) = &self.best else { return true };
        match self.mode {
            SolveMode::Feasibility => true,
            SolveMode::MaximizeCopies => self.copies_upper_bound() > *best,
            SolveMode::MinimizeNodesUsed => self.nodes_lower_bound() < *best,
        }
    }

    fn cell(&self, i: usize, j: usize) -> i8 {
        self.val[i * self.a + j]
    }

    fn copies_upper_bound(&self) -> i64 {
        let placed: i64 = self.col_ones.iter().map(|&c| c as i64).sum();
        let extra = |j: usize| -> i64 {
            let room = if self.col_active[j] { self.ub[j].saturating_sub(self.col_ones[j]) } else { self.col_free[j] };
            room.min(self.col_free[j]) as i64
        };

        let mut by_columns = placed + self.uncovered.iter().map(|&j| extra(j)).sum::<i64>();
        for k in &self.cover {
            let open_rows = (0..self.n)
                .filter(|&i| k.iter().all(|&j| self.cell(i, j) != 1) && k.iter().any(|&j| self.cell(i, j) == UNSET))
                .count() as i64;
            by_columns += open_rows.min(k.iter().map(|&j| extra(j)).sum());
        }

        let mut by_rows = placed;
        let mut free_w = Vec::with_capacity(self.a);
        for i in 0..self.n {
            let mut slots = self.uncovered.iter().filter(|&&j| self.cell(i, j) == UNSET).count();
            for k in &self.cover {
                if k.iter().all(|&j| self.cell(i, j) != 1) && k.iter().any(|&j| self.cell(i, j) == UNSET) {
                    slots += 1;
                }
            }
            for &r in &self.node_rows[i] {
                let row = &self.resources[r];
                free_w.clear();
                free_w.extend((0..self.a).filter(|&j| self.cell(i, j) == UNSET).map(|j| row.weights[j]));
                free_w.sort_by(f64::total_cmp);
                let mut load = self.row_load(r, i, None);
                let mut fit = 0;
                for w in &free_w {
                    load += w;
                    if !Self::fits(load, row.rhs) {
                        break;
                    }
                    fit += 1;
                }
                slots = slots.min(fit);
            }
            by_rows += slots as i64;
        }
        by_columns.min(by_rows)
    }

    fn nodes_lower_bound(&self) -> i64 {
        let used: Vec<usize> = (0..self.n).filter(|&i| self.row_has(i, 1)).collect();
        let mut lb = used.len() as i64;
        for k in &self.cliques {
            let need: i64 = k
                .iter()
                .filter(|&&j| self.col_active[j])
                .map(|&j| self.lb[j].saturating_sub(self.col_ones[j]) as i64)
                .sum();
            if need == 0 {
                continue;
            }
            let hosts = used
                .iter()
                .filter(|&&i| k.iter().all(|&j| self.cell(i, j) != 1) && k.iter().any(|&j| self.cell(i, j) == UNSET))
                .count() as i64;
            lb = lb.max(used.len() as i64 + (need - hosts).max(0));
        }
        lb
    }
}

/// All maximal cliques (Bron-Kerbosch with pivoting), each sorted, listed in
/// lexicographic order. Isolated vertices appear as singletons.
pub(crate) fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    fn expand(adj: &[Vec<bool>], r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() && x.is_empty() {
            let mut k = r.clone();
            k.sort_unstable();
            out.push(k);
            return;
        }
        let pivot = p.iter().chain(&x).copied().max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count()).unwrap();
        let (mut p, mut x) = (p, x);
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in candidates {
            r.push(v);
            let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            expand(adj, r, np, nx, out);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    expand(adj, &mut Vec::new(), (0..adj.len()).collect(), Vec::new(), &mut out);
    out.sort();
    out
}
