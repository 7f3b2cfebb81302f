//! Deployment domain types, problem validation and the direct constraint
//! checker.
//!
//! The checker in this module evaluates a [`DeploymentMatrix`] against every
//! placement rule without going through the search engine, so it doubles as
//! the ground truth for solver output.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

/// Slack applied to the strict resource inequalities: a row is satisfied iff
/// `lhs <= budget - BUDGET_EPS` (normalized units).
pub const BUDGET_EPS: f64 = 1e-9;

/// Share of the NIC rate a node may commit to its actors.
pub const NIC_HEADROOM: f64 = 0.95;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown actor `{0}`")]
    UnknownActor(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate actor id `{0}`")]
    DuplicateActor(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("actors `{0}` and `{1}` are both colocated and separated")]
    ContradictoryRules(String, String),
    #[error("bad resource envelope for actor `{actor}`: {reason}")]
    BadEnvelope { actor: String, reason: String },
    #[error("bad node spec for `{node}`: {reason}")]
    BadNode { node: String, reason: String },
    #[error("actor `{0}` must have at least one copy")]
    ZeroCopies(String),
    #[error("actor `{actor}` has {copies} copies but is pinned to {pins} node(s)")]
    PinCountMismatch { actor: String, copies: u32, pins: usize },
    #[error("colocated actors `{0}` and `{1}` declare different copy counts")]
    UnequalColocatedCopies(String, String),
    #[error("matrix is {rows}x{cols}, problem needs {want_rows}x{want_cols}")]
    DimensionMismatch { rows: usize, cols: usize, want_rows: usize, want_cols: usize },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("matrix entries must be 0 or 1, found {0}")]
    NonBinary(u8),
}

/// Declared worst-case resource use of one actor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResourceEnvelope {
    /// Percentage of one core.
    pub cpu_pct: f64,
    pub mem_mb: f64,
    pub spc_mb: f64,
    pub net_rate_kbps: f64,
    pub net_ceil_kbps: f64,
}

impl ResourceEnvelope {
    pub fn network(rate_kbps: f64, ceil_kbps: f64) -> Self {
        Self { net_rate_kbps: rate_kbps, net_ceil_kbps: ceil_kbps, ..Self::default() }
    }

    /// Burst allowance above the average rate.
    pub fn net_burst_kbps(&self) -> f64 {
        self.net_ceil_kbps - self.net_rate_kbps
    }

    fn check(&self) -> Result<(), String> {
        let fields = [
            ("cpu", self.cpu_pct),
            ("mem", self.mem_mb),
            ("space", self.spc_mb),
            ("net rate", self.net_rate_kbps),
            ("net ceil", self.net_ceil_kbps),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        if self.net_ceil_kbps < self.net_rate_kbps {
            return Err(format!("net ceil {} is below net rate {}", self.net_ceil_kbps, self.net_rate_kbps));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActorSpec {
    pub id: String,
    /// Redundancy: number of copies, each on a distinct node.
    pub copies: u32,
    /// Nodes the actor is tied to. Empty means unpinned; otherwise exactly
    /// one copy runs on each listed node and nowhere else.
    pub host_pin: Vec<String>,
    pub env: ResourceEnvelope,
}

impl ActorSpec {
    pub fn new(id: impl Into<String>, copies: u32) -> Self {
        Self { id: id.into(), copies, host_pin: Vec::new(), env: ResourceEnvelope::default() }
    }

    pub fn pinned_to(mut self, node: impl Into<String>) -> Self {
        self.host_pin.push(node.into());
        self
    }

    pub fn with_env(mut self, env: ResourceEnvelope) -> Self {
        self.env = env;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: String,
    pub cores: u32,
    /// Usable fraction of the CPU, in (0, 1].
    pub max_cpu: f64,
    pub mem_mb: f64,
    pub max_mem: f64,
    pub spc_mb: f64,
    pub max_spc: f64,
    pub nic_rate_kbps: f64,
    pub nic_ceil_kbps: f64,
}

impl NodeSpec {
    /// A node without meaningful capacity limits; used when no limits
    /// directive covers it.
    pub fn unconstrained(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            cores: 1,
            max_cpu: 1.0,
            mem_mb: f64::INFINITY,
            max_mem: 1.0,
            spc_mb: f64::INFINITY,
            max_spc: 1.0,
            nic_rate_kbps: f64::INFINITY,
            nic_ceil_kbps: f64::INFINITY,
        }
    }

    pub fn cpu_budget(&self) -> f64 {
        self.max_cpu * f64::from(self.cores)
    }

    pub fn mem_budget(&self) -> f64 {
        self.mem_mb * self.max_mem
    }

    pub fn spc_budget(&self) -> f64 {
        self.spc_mb * self.max_spc
    }

    pub fn net_budget(&self) -> f64 {
        NIC_HEADROOM * self.nic_rate_kbps
    }

    fn check(&self) -> Result<(), String> {
        if self.cores == 0 {
            return Err("cores must be positive".into());
        }
        for (name, v) in [("mem", self.mem_mb), ("spc", self.spc_mb), ("nic_rate", self.nic_rate_kbps)] {
            if v.is_nan() || v <= 0.0 {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [("max_cpu", self.max_cpu), ("max_mem", self.max_mem), ("max_spc", self.max_spc)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(format!("{name} must be in (0, 1], got {v}"));
            }
        }
        if self.nic_ceil_kbps.is_nan() || self.nic_ceil_kbps < self.nic_rate_kbps {
            return Err(format!("nic_ceil {} is below nic_rate {}", self.nic_ceil_kbps, self.nic_rate_kbps));
        }
        Ok(())
    }

    /// Equal capacities, ignoring the id.
    pub fn same_hardware(&self, other: &NodeSpec) -> bool {
        self.cores == other.cores
            && self.max_cpu == other.max_cpu
            && self.mem_mb == other.mem_mb
            && self.max_mem == other.max_mem
            && self.spc_mb == other.spc_mb
            && self.max_spc == other.max_spc
            && self.nic_rate_kbps == other.nic_rate_kbps
            && self.nic_ceil_kbps == other.nic_ceil_kbps
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitTargets {
    All,
    Nodes(Vec<String>),
}

/// One `use limits for <key> on ...` directive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitsScope {
    pub hardware_key: String,
    pub targets: LimitTargets,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlacementRules {
    pub colocate_sets: Vec<Vec<String>>,
    pub separate_sets: Vec<Vec<String>>,
    pub limits: Vec<LimitsScope>,
}

impl PlacementRules {
    pub fn limits_enabled(&self) -> bool {
        !self.limits.is_empty()
    }

    pub fn limits_apply_to(&self, node: &str) -> bool {
        self.limits.iter().any(|l| match &l.targets {
            LimitTargets::All => true,
            LimitTargets::Nodes(ns) => ns.iter().any(|n| n == node),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeploymentProblem {
    pub name: String,
    pub actors: Vec<ActorSpec>,
    pub nodes: Vec<NodeSpec>,
    pub rules: PlacementRules,
}

/// A problem whose references are resolved and whose invariants hold.
///
/// Obtained only through [`validate_problem`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidProblem {
    problem: DeploymentProblem,
    colocate: Vec<Vec<usize>>,
    separate: Vec<Vec<usize>>,
    colocated_pairs: Vec<(usize, usize)>,
    separated_pairs: Vec<(usize, usize)>,
    pins: Vec<Option<Vec<usize>>>,
    limited: Vec<bool>,
}

impl Deref for ValidProblem {
    type Target = DeploymentProblem;

    fn deref(&self) -> &DeploymentProblem {
        &self.problem
    }
}

impl ValidProblem {
    pub fn problem(&self) -> &DeploymentProblem {
        &self.problem
    }

    pub fn into_problem(self) -> DeploymentProblem {
        self.problem
    }

    pub fn num_nodes(&self) -> usize {
        self.problem.nodes.len()
    }

    pub fn num_actors(&self) -> usize {
        self.problem.actors.len()
    }

    /// Canonical colocation sets as actor indices (sorted, deduplicated).
    pub fn colocate_sets(&self) -> &[Vec<usize>] {
        &self.colocate
    }

    pub fn separate_sets(&self) -> &[Vec<usize>] {
        &self.separate
    }

    /// Distinct unordered colocated actor pairs `(a, b)` with `a < b`.
    pub fn colocated_pairs(&self) -> &[(usize, usize)] {
        &self.colocated_pairs
    }

    pub fn separated_pairs(&self) -> &[(usize, usize)] {
        &self.separated_pairs
    }

    /// Node indices an actor is pinned to, if any.
    pub fn pinned_nodes(&self, actor: usize) -> Option<&[usize]> {
        self.pins[actor].as_deref()
    }

    /// Whether resource rows are enforced on this node.
    pub fn is_limited(&self, node: usize) -> bool {
        self.limited[node]
    }

    pub fn actor_index(&self, id: &str) -> Option<usize> {
        self.problem.actors.iter().position(|a| a.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.problem.nodes.iter().position(|n| n.id == id)
    }

    /// Same problem with each actor's copies replaced by the column sums of
    /// `m`. Used to check matrices from the copy-maximizing mode.
    pub fn with_copies_from(&self, m: &DeploymentMatrix) -> Result<ValidProblem, ModelError> {
        m.check_dims(self)?;
        let mut out = self.clone();
        for (j, a) in out.problem.actors.iter_mut().enumerate() {
            a.copies = m.copies_of(j)? as u32;
        }
        Ok(out)
    }
}

fn canonical_sets(sets: &[Vec<String>], index: &HashMap<&str, usize>) -> Result<Vec<Vec<usize>>, ModelError> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for set in sets {
        let mut ids = BTreeSet::new();
        for name in set {
            let idx = index.get(name.as_str()).ok_or_else(|| ModelError::UnknownActor(name.clone()))?;
            ids.insert(*idx);
        }
        let ids: Vec<usize> = ids.into_iter().collect();
        if ids.len() >= 2 && !out.contains(&ids) {
            out.push(ids);
        }
    }
    Ok(out)
}

fn pairs_of(sets: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let mut pairs = BTreeSet::new();
    for set in sets {
        for (k, &a) in set.iter().enumerate() {
            for &b in &set[k + 1..] {
                pairs.insert((a, b));
            }
        }
    }
    pairs.into_iter().collect()
}

/// Checks invariants and cross-references and canonicalizes the rule sets.
pub fn validate_problem(problem: DeploymentProblem) -> Result<ValidProblem, ModelError> {
    let mut actor_index = HashMap::new();
    for (j, a) in problem.actors.iter().enumerate() {
        if actor_index.insert(a.id.as_str(), j).is_some() {
            return Err(ModelError::DuplicateActor(a.id.clone()));
        }
        if a.copies == 0 {
            return Err(ModelError::ZeroCopies(a.id.clone()));
        }
        a.env.check().map_err(|reason| ModelError::BadEnvelope { actor: a.id.clone(), reason })?;
    }
    let mut node_index = HashMap::new();
    for (i, n) in problem.nodes.iter().enumerate() {
        if node_index.insert(n.id.as_str(), i).is_some() {
            return Err(ModelError::DuplicateNode(n.id.clone()));
        }
        n.check().map_err(|reason| ModelError::BadNode { node: n.id.clone(), reason })?;
    }

    let mut pins = Vec::with_capacity(problem.actors.len());
    for a in &problem.actors {
        if a.host_pin.is_empty() {
            pins.push(None);
            continue;
        }
        let mut nodes = BTreeSet::new();
        for n in &a.host_pin {
            let idx = node_index.get(n.as_str()).ok_or_else(|| ModelError::UnknownNode(n.clone()))?;
            nodes.insert(*idx);
        }
        if nodes.len() != a.copies as usize {
            return Err(ModelError::PinCountMismatch { actor: a.id.clone(), copies: a.copies, pins: nodes.len() });
        }
        pins.push(Some(nodes.into_iter().collect()));
    }

    let colocate = canonical_sets(&problem.rules.colocate_sets, &actor_index)?;
    let separate = canonical_sets(&problem.rules.separate_sets, &actor_index)?;
    let colocated_pairs = pairs_of(&colocate);
    let separated_pairs = pairs_of(&separate);

    let name = |j: usize| problem.actors[j].id.clone();
    if let Some(&(a, b)) = colocated_pairs.iter().find(|p| separated_pairs.contains(p)) {
        return Err(ModelError::ContradictoryRules(name(a), name(b)));
    }
    for &(a, b) in &colocated_pairs {
        if problem.actors[a].copies != problem.actors[b].copies {
            return Err(ModelError::UnequalColocatedCopies(name(a), name(b)));
        }
    }

    for scope in &problem.rules.limits {
        if let LimitTargets::Nodes(ns) = &scope.targets {
            if let Some(n) = ns.iter().find(|n| !node_index.contains_key(n.as_str())) {
                return Err(ModelError::UnknownNode(n.clone()));
            }
        }
    }
    let limited = problem.nodes.iter().map(|n| problem.rules.limits_apply_to(&n.id)).collect();
    let colocate_names = colocate.iter().map(|s| s.iter().map(|&j| name(j)).collect()).collect();
    let separate_names = separate.iter().map(|s| s.iter().map(|&j| name(j)).collect()).collect();

    let mut problem = problem;
    problem.rules.colocate_sets = colocate_names;
    problem.rules.separate_sets = separate_names;

    Ok(ValidProblem { problem, colocate, separate, colocated_pairs, separated_pairs, pins, limited })
}

/// Binary assignment matrix indexed `[node][actor]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeploymentMatrix {
    nodes: usize,
    actors: usize,
    cells: Vec<bool>,
}

impl DeploymentMatrix {
    pub fn zeros(nodes: usize, actors: usize) -> Self {
        Self { nodes, actors, cells: vec![false; nodes * actors] }
    }

    /// Builds a matrix from 0/1 rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, ModelError> {
        let actors = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), actors);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != actors {
                return Err(ModelError::DimensionMismatch {
                    rows: rows.len(),
                    cols: row.len(),
                    want_rows: rows.len(),
                    want_cols: actors,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set(i, j, true),
                    other => return Err(ModelError::NonBinary(other)),
                }
            }
        }
        Ok(m)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn num_actors(&self) -> usize {
        self.actors
    }

    pub fn get(&self, node: usize, actor: usize) -> bool {
        self.cells[node * self.actors + actor]
    }

    pub fn set(&mut self, node: usize, actor: usize, value: bool) {
        self.cells[node * self.actors + actor] = value;
    }

    /// Row-major cells.
    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn row(&self, node: usize) -> &[bool] {
        &self.cells[node * self.actors..(node + 1) * self.actors]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.nodes).map(|i| self.row(i).iter().map(|&b| u8::from(b)).collect()).collect()
    }

    /// Number of nodes hosting a copy of `actor`.
    pub fn copies_of(&self, actor: usize) -> Result<usize, ModelError> {
        if actor >= self.actors {
            return Err(ModelError::IndexOutOfRange { index: actor, len: self.actors });
        }
        Ok((0..self.nodes).filter(|&i| self.get(i, actor)).count())
    }

    /// Number of nodes hosting at least one actor.
    pub fn nodes_used(&self) -> usize {
        (0..self.nodes).filter(|&i| self.row(i).iter().any(|&b| b)).count()
    }

    pub fn total_copies(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn swap_nodes(&mut self, a: usize, b: usize) {
        for j in 0..self.actors {
            self.cells.swap(a * self.actors + j, b * self.actors + j);
        }
    }

    fn check_dims(&self, p: &ValidProblem) -> Result<(), ModelError> {
        if self.nodes != p.num_nodes() || self.actors != p.num_actors() {
            return Err(ModelError::DimensionMismatch {
                rows: self.nodes,
                cols: self.actors,
                want_rows: p.num_nodes(),
                want_cols: p.num_actors(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for DeploymentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nodes {
            let row: Vec<&str> = self.row(i).iter().map(|&b| if b { "1" } else { "0" }).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    Redundancy,
    HostPin,
    Colocation,
    Separation,
    Cpu,
    Memory,
    Disk,
    Network,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstraintKind::Redundancy => "redundancy",
            ConstraintKind::HostPin => "host-pin",
            ConstraintKind::Colocation => "colocation",
            ConstraintKind::Separation => "separation",
            ConstraintKind::Cpu => "cpu",
            ConstraintKind::Memory => "memory",
            ConstraintKind::Disk => "disk",
            ConstraintKind::Network => "network",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ConstraintKind,
    /// Actor and node ids the violated instance refers to.
    pub subjects: Vec<String>,
    pub lhs: f64,
    pub budget: f64,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (lhs {} vs {})", self.kind, self.message, self.lhs, self.budget)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn of_kind(&self, kind: ConstraintKind) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.kind == kind)
    }
}

/// Sum of actor CPU shares on a node, in cores.
pub fn cpu_load<'a>(actors: impl IntoIterator<Item = &'a ResourceEnvelope>) -> f64 {
    actors.into_iter().map(|e| e.cpu_pct / 100.0).sum()
}

/// Network commitment of a node: summed average rates plus the largest burst
/// among the hosted actors (zero for an empty node).
pub fn network_load<'a>(actors: impl IntoIterator<Item = &'a ResourceEnvelope> + Clone) -> f64 {
    let rate: f64 = actors.clone().into_iter().map(|e| e.net_rate_kbps).sum();
    let burst = actors.into_iter().map(ResourceEnvelope::net_burst_kbps).fold(0.0, f64::max);
    rate + burst
}

pub fn within_budget(lhs: f64, budget: f64) -> bool {
    lhs <= budget - BUDGET_EPS
}

/// Evaluates every active constraint on `m`; one entry per violated instance.
pub fn check_deployment(p: &ValidProblem, m: &DeploymentMatrix) -> Result<ViolationReport, ModelError> {
    m.check_dims(p)?;
    let actors = &p.problem.actors;
    let nodes = &p.problem.nodes;
    let mut out = Vec::new();

    for (j, a) in actors.iter().enumerate() {
        let copies = m.copies_of(j)?;
        if copies != a.copies as usize {
            out.push(Violation {
                kind: ConstraintKind::Redundancy,
                subjects: vec![a.id.clone()],
                lhs: copies as f64,
                budget: f64::from(a.copies),
                message: format!("`{}` has {} copies, needs {}", a.id, copies, a.copies),
            });
        }
        if let Some(pins) = p.pinned_nodes(j) {
            for i in (0..nodes.len()).filter(|i| !pins.contains(i) && m.get(*i, j)) {
                out.push(Violation {
                    kind: ConstraintKind::HostPin,
                    subjects: vec![a.id.clone(), nodes[i].id.clone()],
                    lhs: 1.0,
                    budget: 0.0,
                    message: format!("`{}` is pinned elsewhere but placed on `{}`", a.id, nodes[i].id),
                });
            }
        }
    }

    for (i, node) in nodes.iter().enumerate() {
        for &(a, b) in p.colocated_pairs() {
            if m.get(i, a) != m.get(i, b) {
                out.push(Violation {
                    kind: ConstraintKind::Colocation,
                    subjects: vec![actors[a].id.clone(), actors[b].id.clone(), node.id.clone()],
                    lhs: 1.0,
                    budget: 0.0,
                    message: format!(
                        "`{}` and `{}` must share nodes but differ on `{}`",
                        actors[a].id, actors[b].id, node.id
                    ),
                });
            }
        }
        for &(a, b) in p.separated_pairs() {
            if m.get(i, a) && m.get(i, b) {
                out.push(Violation {
                    kind: ConstraintKind::Separation,
                    subjects: vec![actors[a].id.clone(), actors[b].id.clone(), node.id.clone()],
                    lhs: 2.0,
                    budget: 1.0,
                    message: format!("`{}` and `{}` both placed on `{}`", actors[a].id, actors[b].id, node.id),
                });
            }
        }
    }

    if p.problem.rules.limits_enabled() {
        for (i, node) in nodes.iter().enumerate().filter(|(i, _)| p.is_limited(*i)) {
            let hosted: Vec<&ResourceEnvelope> =
                (0..actors.len()).filter(|&j| m.get(i, j)).map(|j| &actors[j].env).collect();
            let rows = [
                (ConstraintKind::Cpu, cpu_load(hosted.iter().copied()), node.cpu_budget(), "cores"),
                (ConstraintKind::Memory, hosted.iter().map(|e| e.mem_mb).sum(), node.mem_budget(), "MB memory"),
                (ConstraintKind::Disk, hosted.iter().map(|e| e.spc_mb).sum(), node.spc_budget(), "MB disk"),
                (ConstraintKind::Network, network_load(hosted.iter().copied()), node.net_budget(), "kbps"),
            ];
            for (kind, lhs, budget, unit) in rows {
                if !within_budget(lhs, budget) {
                    out.push(Violation {
                        kind,
                        subjects: vec![node.id.clone()],
                        lhs,
                        budget,
                        message: format!("`{}` commits {lhs} {unit}, budget {budget}", node.id),
                    });
                }
            }
        }
    }

    Ok(ViolationReport { violations: out })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub const REMAPP_ACTORS: [&str; 6] =
        ["Aggregator", "BESSActor", "BuildingActor", "ChargerActor", "DataLogger", "UtilityGrid"];

    pub fn hosts(n: usize) -> Vec<NodeSpec> {
        (1..=n).map(|i| NodeSpec::unconstrained(format!("h{i}"))).collect()
    }

    /// REMApp under the basic dspec rules (limits off).
    pub fn remapp_problem(nodes: usize) -> DeploymentProblem {
        let actors = REMAPP_ACTORS
            .iter()
            .map(|id| match *id {
                "Aggregator" => ActorSpec::new(*id, 2),
                "UtilityGrid" => ActorSpec::new(*id, 1).pinned_to("h1"),
                _ => ActorSpec::new(*id, 1),
            })
            .collect();
        DeploymentProblem {
            name: "REMApp".into(),
            actors,
            nodes: hosts(nodes),
            rules: PlacementRules {
                colocate_sets: vec![vec!["UtilityGrid".into(), "DataLogger".into()]],
                separate_sets: vec![vec!["BESSActor".into(), "BuildingActor".into(), "ChargerActor".into()]],
                limits: vec![],
            },
        }
    }

    /// The deployment used for the fault-tolerance test run.
    pub fn ft_test_problem(nodes: usize) -> DeploymentProblem {
        let copies = [2, 3, 3, 3, 1, 1];
        let actors = REMAPP_ACTORS
            .iter()
            .zip(copies)
            .map(|(id, c)| {
                let a = ActorSpec::new(*id, c);
                if *id == "UtilityGrid" {
                    a.pinned_to("h1")
                } else {
                    a
                }
            })
            .collect();
        DeploymentProblem {
            name: "REMApp".into(),
            actors,
            nodes: hosts(nodes),
            rules: PlacementRules {
                colocate_sets: vec![vec!["UtilityGrid".into(), "DataLogger".into()]],
                separate_sets: vec![
                    vec!["BESSActor".into(), "BuildingActor".into(), "ChargerActor".into()],
                    vec!["ChargerActor".into(), "Aggregator".into()],
                ],
                limits: vec![],
            },
        }
    }

    /// Solver output reported for the fault-tolerance configuration.
    pub fn nine_node_table() -> DeploymentMatrix {
        DeploymentMatrix::from_rows(&[
            vec![0, 0, 1, 0, 1, 1],
            vec![1, 0, 1, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0],
            vec![0, 0, 0, 1, 0, 0],
            vec![0, 1, 0, 0, 0, 0],
            vec![0, 0, 0, 1, 0, 0],
            vec![1, 0, 1, 0, 0, 0],
            vec![0, 0, 0, 1, 0, 0],
        ])
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn net_node(id: &str, rate: f64, ceil: f64) -> NodeSpec {
        NodeSpec { nic_rate_kbps: rate, nic_ceil_kbps: ceil, ..NodeSpec::unconstrained(id) }
    }

    #[test]
    fn nine_node_table_is_feasible() {
        let p = validate_problem(ft_test_problem(9)).unwrap();
        let m = nine_node_table();
        let report = check_deployment(&p, &m).unwrap();
        assert!(report.is_empty(), "{:?}", report);
        assert_eq!(m.nodes_used(), 9);
        assert_eq!(m.copies_of(1).unwrap(), 3);
    }

    #[test]
    fn zero_matrix_violates_redundancy_per_actor() {
        let p = validate_problem(ft_test_problem(9)).unwrap();
        let m = DeploymentMatrix::zeros(9, 6);
        let report = check_deployment(&p, &m).unwrap();
        assert_eq!(report.len(), 6);
        assert_eq!(report.of_kind(ConstraintKind::Redundancy).count(), 6);
        assert_eq!(m.copies_of(0).unwrap(), 0);
        assert_eq!(m.nodes_used(), 0);
    }

    #[test]
    fn copies_of_out_of_range() {
        let m = DeploymentMatrix::zeros(2, 2);
        assert_eq!(m.copies_of(2), Err(ModelError::IndexOutOfRange { index: 2, len: 2 }));
    }

    #[test]
    fn network_row_counts_largest_burst() {
        let env = ResourceEnvelope::network(40.0, 60.0);
        let p = DeploymentProblem {
            name: "N".into(),
            actors: (0..3).map(|k| ActorSpec::new(format!("A{k}"), 1).with_env(env)).collect(),
            nodes: vec![net_node("n1", 118.0, 131.0)],
            rules: PlacementRules {
                limits: vec![LimitsScope { hardware_key: "bbb".into(), targets: LimitTargets::All }],
                ..Default::default()
            },
        };
        let p = validate_problem(p).unwrap();
        let m = DeploymentMatrix::from_rows(&[vec![1, 1, 1]]).unwrap();
        let report = check_deployment(&p, &m).unwrap();
        assert_eq!(report.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.kind, ConstraintKind::Network);
        assert!((v.lhs - 140.0).abs() < 1e-12);
        assert!((v.budget - 112.1).abs() < 1e-9);

        let two = DeploymentMatrix::from_rows(&[vec![1, 1, 0]]).unwrap();
        // 2*40 + 20 = 100 fits, but redundancy for A2 is then unmet
        let report = check_deployment(&p, &two).unwrap();
        assert_eq!(report.of_kind(ConstraintKind::Network).count(), 0);
    }

    #[test]
    fn strict_inequality_at_exact_budget() {
        // 0.35 + 0.35 cores on a 0.7 budget is rejected
        let env = ResourceEnvelope { cpu_pct: 35.0, ..Default::default() };
        let node = NodeSpec { max_cpu: 0.7, ..NodeSpec::unconstrained("n1") };
        let p = DeploymentProblem {
            name: "C".into(),
            actors: vec![ActorSpec::new("A", 1).with_env(env), ActorSpec::new("B", 1).with_env(env)],
            nodes: vec![node],
            rules: PlacementRules {
                limits: vec![LimitsScope { hardware_key: "k".into(), targets: LimitTargets::All }],
                ..Default::default()
            },
        };
        let p = validate_problem(p).unwrap();
        let m = DeploymentMatrix::from_rows(&[vec![1, 1]]).unwrap();
        let report = check_deployment(&p, &m).unwrap();
        assert_eq!(report.of_kind(ConstraintKind::Cpu).count(), 1);
    }

    #[test]
    fn limits_disabled_skips_resource_rows() {
        let env = ResourceEnvelope::network(400.0, 600.0);
        let p = DeploymentProblem {
            name: "N".into(),
            actors: vec![ActorSpec::new("A", 1).with_env(env)],
            nodes: vec![net_node("n1", 118.0, 131.0)],
            rules: PlacementRules::default(),
        };
        let p = validate_problem(p).unwrap();
        let m = DeploymentMatrix::from_rows(&[vec![1]]).unwrap();
        assert!(check_deployment(&p, &m).unwrap().is_empty());
    }

    #[test]
    fn dimension_mismatch() {
        let p = validate_problem(ft_test_problem(9)).unwrap();
        let m = DeploymentMatrix::zeros(8, 6);
        assert!(matches!(check_deployment(&p, &m), Err(ModelError::DimensionMismatch { .. })));
    }

    #[test]
    fn dangling_pin_is_rejected() {
        let mut p = ft_test_problem(9);
        p.actors[5].host_pin = vec!["h99".into()];
        assert_eq!(validate_problem(p), Err(ModelError::UnknownNode("h99".into())));
    }

    #[test]
    fn colocate_and_separate_same_pair() {
        let p = DeploymentProblem {
            name: "X".into(),
            actors: vec![ActorSpec::new("A", 1), ActorSpec::new("B", 1)],
            nodes: hosts(2),
            rules: PlacementRules {
                colocate_sets: vec![vec!["A".into(), "B".into()]],
                separate_sets: vec![vec!["B".into(), "A".into()]],
                limits: vec![],
            },
        };
        assert_eq!(validate_problem(p), Err(ModelError::ContradictoryRules("A".into(), "B".into())));
    }

    #[test]
    fn unequal_colocated_copies_rejected() {
        let p = DeploymentProblem {
            name: "X".into(),
            actors: vec![ActorSpec::new("A", 1), ActorSpec::new("B", 2)],
            nodes: hosts(2),
            rules: PlacementRules { colocate_sets: vec![vec!["A".into(), "B".into()]], ..Default::default() },
        };
        assert!(matches!(validate_problem(p), Err(ModelError::UnequalColocatedCopies(..))));
    }

    #[test]
    fn bad_envelope_rejected() {
        let mut p = ft_test_problem(3);
        p.actors[0].env = ResourceEnvelope::network(60.0, 40.0);
        assert!(matches!(validate_problem(p.clone()), Err(ModelError::BadEnvelope { .. })));
        p.actors[0].env = ResourceEnvelope { mem_mb: -1.0, ..Default::default() };
        assert!(matches!(validate_problem(p), Err(ModelError::BadEnvelope { .. })));
    }

    #[test]
    fn canonicalizes_rule_sets() {
        let mut p = ft_test_problem(3);
        p.rules.separate_sets.push(vec!["ChargerActor".into(), "BESSActor".into(), "ChargerActor".into()]);
        p.rules.colocate_sets.push(vec!["DataLogger".into(), "DataLogger".into()]);
        let v = validate_problem(p).unwrap();
        assert_eq!(v.colocate_sets(), &[vec![4, 5]]);
        assert_eq!(v.separate_sets(), &[vec![1, 2, 3], vec![0, 3], vec![1, 3]]);
        assert_eq!(v.separated_pairs(), &[(0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(v.rules.colocate_sets, vec![vec!["DataLogger".to_string(), "UtilityGrid".to_string()]]);
    }

    #[test]
    fn unknown_actor_in_rules() {
        let mut p = ft_test_problem(3);
        p.rules.separate_sets.push(vec!["Ghost".into(), "BESSActor".into()]);
        assert_eq!(validate_problem(p), Err(ModelError::UnknownActor("Ghost".into())));
    }
}
