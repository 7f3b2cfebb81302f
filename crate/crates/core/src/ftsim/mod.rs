//! Discrete-event simulation of redundancy and consensus groups.
//!
//! Members run a reduced Raft: randomized election timeouts, term-numbered
//! vote requests, majority wins and leader heartbeats. Consensus groups add
//! periodic value rounds coordinated by the leader. Faults (node drop and
//! restore, false-data injection) are scripted against virtual time, and the
//! same seed always replays the same run.

mod report;
mod script;

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use report::{summarize, ElectionRecord, SimReport, Summary, VoteOutcome};
pub use script::{FaultAction, FaultScript, Target};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FtError {
    #[error("bad group config: {0}")]
    BadConfig(String),
    #[error("bad script: {0}")]
    BadScript(String),
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("event queue is empty")]
    EmptyQueue,
    #[error("two leaders in term {term}: `{first}` and `{second}`")]
    SplitBrain { term: u64, first: String, second: String },
    #[error("term of `{member}` went from {from} back to {to}")]
    TermRegression { member: String, from: u64, to: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Leader election and failover only.
    Redundancy,
    /// Failover plus leader-coordinated value voting.
    Consensus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupConfig {
    pub member_ids: Vec<String>,
    pub pattern: Pattern,
    pub election_timeout_ms: (u64, u64),
    pub heartbeat_ms: u64,
    /// How long the leader waits for values in a round.
    pub vote_timeout_ms: u64,
    pub vote_interval_ms: u64,
    pub latency_ms: u64,
    pub drop_probability: f64,
    /// Relative tolerance for two values to agree.
    pub tolerance: f64,
    pub honest_value: f64,
    pub rng_seed: u64,
}

impl GroupConfig {
    pub fn new(member_ids: Vec<String>, pattern: Pattern, rng_seed: u64) -> Self {
        GroupConfig {
            member_ids,
            pattern,
            election_timeout_ms: (500, 1000),
            heartbeat_ms: 100,
            vote_timeout_ms: 50,
            vote_interval_ms: 1000,
            latency_ms: 5,
            drop_probability: 0.0,
            tolerance: 1e-6,
            honest_value: 100.0,
            rng_seed,
        }
    }

    /// Members `m1..=mn`.
    pub fn numbered(n: usize, pattern: Pattern, rng_seed: u64) -> Self {
        Self::new((1..=n).map(|k| format!("m{k}")).collect(), pattern, rng_seed)
    }

    pub fn majority(&self) -> usize {
        self.member_ids.len() / 2 + 1
    }

    pub fn validate(&self) -> Result<(), FtError> {
        let bad = |m: String| Err(FtError::BadConfig(m));
        if self.member_ids.len() < 2 {
            return bad("a group needs at least two members".into());
        }
        let unique: BTreeSet<_> = self.member_ids.iter().collect();
        if unique.len() != self.member_ids.len() {
            return bad("member ids must be distinct".into());
        }
        let (lo, hi) = self.election_timeout_ms;
        if lo >= hi {
            return bad(format!("election timeout range {lo}..{hi} is empty"));
        }
        if self.heartbeat_ms == 0 || self.heartbeat_ms >= lo {
            return bad(format!("heartbeat {} ms must be positive and below {lo} ms", self.heartbeat_ms));
        }
        if self.pattern == Pattern::Consensus && (self.vote_timeout_ms == 0 || self.vote_interval_ms == 0) {
            return bad("vote timeout and interval must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.drop_probability) {
            return bad(format!("drop probability {} is outside [0, 1]", self.drop_probability));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 || !self.honest_value.is_finite() {
            return bad("tolerance and honest value must be finite and non-negative".into());
        }
        Ok(())
    }

    fn agree(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.tolerance * a.abs().max(b.abs()).max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Follower,
    Candidate,
    Leader,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueSource {
    Honest,
    Corrupted(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberState {
    pub id: String,
    pub role: Role,
    pub term: u64,
    pub voted_for: Option<usize>,
    pub value_source: ValueSource,
    pub alive: bool,
    votes: BTreeSet<usize>,
    /// Bumped on drop and restore; in-flight sends from an older epoch are
    /// discarded.
    epoch: u64,
    election_gen: u64,
    heartbeat_gen: u64,
}

impl MemberState {
    fn new(id: String) -> Self {
        MemberState {
            id,
            role: Role::Follower,
            term: 0,
            voted_for: None,
            value_source: ValueSource::Honest,
            alive: true,
            votes: BTreeSet::new(),
            epoch: 0,
            election_gen: 0,
            heartbeat_gen: 0,
        }
    }

    fn value(&self, honest: f64) -> f64 {
        match self.value_source {
            ValueSource::Honest => honest,
            ValueSource::Corrupted(off) => honest + off,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Msg {
    RequestVote { term: u64 },
    Vote { term: u64, granted: bool },
    Heartbeat { term: u64 },
    ValueRequest { term: u64, round: u64 },
    ValueReply { term: u64, round: u64, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
enum Event {
    ElectionTimeout { member: usize, gen: u64 },
    HeartbeatTick { member: usize, gen: u64 },
    Deliver { from: usize, from_epoch: u64, to: usize, msg: Msg },
    RoundStart { member: usize, gen: u64 },
    RoundTimeout { round: u64 },
    Fault(FaultAction),
}

#[derive(Debug)]
struct Scheduled {
    at: u64,
    seq: u64,
    event: Event,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.at, self.seq).cmp(&(other.at, other.seq))
    }
}

#[derive(Debug)]
struct OpenRound {
    round: u64,
    leader: usize,
    term: u64,
    start: u64,
    values: BTreeMap<usize, f64>,
}

/// Simulation state: members, clock, event queue and the report so far.
#[derive(Debug)]
pub struct World {
    config: GroupConfig,
    members: Vec<MemberState>,
    now: u64,
    seq: u64,
    queue: BinaryHeap<Reverse<Scheduled>>,
    rng: ChaCha8Rng,
    report: SimReport,
    leaderless_since: Option<u64>,
    term_leaders: BTreeMap<u64, usize>,
    open_round: Option<OpenRound>,
    rounds: u64,
}

impl World {
    pub fn new(config: GroupConfig) -> Result<Self, FtError> {
        config.validate()?;
        let members = config.member_ids.iter().cloned().map(MemberState::new).collect();
        let rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let report =
            SimReport { honest_value: config.honest_value, leader_timeline: vec![(0, None)], ..Default::default() };
        let mut world = World {
            config,
            members,
            now: 0,
            seq: 0,
            queue: BinaryHeap::new(),
            rng,
            report,
            leaderless_since: Some(0),
            term_leaders: BTreeMap::new(),
            open_round: None,
            rounds: 0,
        };
        for m in 0..world.members.len() {
            world.arm_election(m);
        }
        Ok(world)
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn config(&self) -> &GroupConfig {
        &self.config
    }

    pub fn members(&self) -> &[MemberState] {
        &self.members
    }

    pub fn report(&self) -> &SimReport {
        &self.report
    }

    pub fn pending_events(&self) -> usize {
        self.queue.len()
    }

    /// The live leader with the highest term, if any.
    pub fn leader(&self) -> Option<usize> {
        (0..self.members.len())
            .filter(|&m| self.members[m].alive && self.members[m].role == Role::Leader)
            .max_by_key(|&m| self.members[m].term)
    }

    pub fn member_index(&self, id: &str) -> Option<usize> {
        self.members.iter().position(|m| m.id == id)
    }

    /// Overrides a member's pending election deadline.
    pub fn force_election_deadline(&mut self, member: usize, at_ms: u64) {
        self.members[member].election_gen += 1;
        let gen = self.members[member].election_gen;
        self.push(at_ms, Event::ElectionTimeout { member, gen });
    }

    /// Queues a fault at the current time.
    pub fn inject(&mut self, action: FaultAction) {
        self.push(self.now, Event::Fault(action));
    }

    pub fn schedule(&mut self, at_ms: u64, action: FaultAction) {
        self.push(at_ms.max(self.now), Event::Fault(action));
    }

    /// Pops and applies one event, then re-checks the safety invariants.
    pub fn step(&mut self) -> Result<(), FtError> {
        let Reverse(next) = self.queue.pop().ok_or(FtError::EmptyQueue)?;
        self.now = next.at;
        let terms: Vec<u64> = self.members.iter().map(|m| m.term).collect();
        self.apply(next.event);
        for (m, before) in self.members.iter().zip(terms) {
            if m.term < before {
                return Err(FtError::TermRegression { member: m.id.clone(), from: before, to: m.term });
            }
        }
        self.check_leaders()
    }

    /// Processes every event up to and including `t_ms`.
    pub fn run_until(&mut self, t_ms: u64) -> Result<(), FtError> {
        while self.queue.peek().is_some_and(|Reverse(s)| s.at <= t_ms) {
            self.step()?;
        }
        self.now = self.now.max(t_ms);
        Ok(())
    }

    pub fn into_report(mut self) -> SimReport {
        self.report.duration_ms = self.now;
        self.report
    }

    fn push(&mut self, at: u64, event: Event) {
        self.seq += 1;
        self.queue.push(Reverse(Scheduled { at, seq: self.seq, event }));
    }

    fn arm_election(&mut self, member: usize) {
        let (lo, hi) = self.config.election_timeout_ms;
        let wait = self.rng.random_range(lo..=hi);
        self.members[member].election_gen += 1;
        let gen = self.members[member].election_gen;
        self.push(self.now + wait, Event::ElectionTimeout { member, gen });
    }

    fn send(&mut self, from: usize, to: usize, msg: Msg) {
        if self.config.drop_probability > 0.0 && self.rng.random_bool(self.config.drop_probability) {
            return;
        }
        let from_epoch = self.members[from].epoch;
        self.push(self.now + self.config.latency_ms, Event::Deliver { from, from_epoch, to, msg });
    }

    fn broadcast(&mut self, from: usize, msg: Msg) {
        for to in (0..self.members.len()).filter(|&to| to != from) {
            self.send(from, to, msg.clone());
        }
    }

    fn check_leaders(&mut self) -> Result<(), FtError> {
        for m in 0..self.members.len() {
            let s = &self.members[m];
            if s.alive && s.role == Role::Leader {
                let first = *self.term_leaders.entry(s.term).or_insert(m);
                if first != m {
                    return Err(FtError::SplitBrain {
                        term: s.term,
                        first: self.members[first].id.clone(),
                        second: s.id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn set_leader_timeline(&mut self) {
        let current = self.leader().map(|m| self.members[m].id.clone());
        if self.report.leader_timeline.last().map(|(_, l)| l) != Some(&current) {
            self.report.leader_timeline.push((self.now, current.clone()));
        }
        match current {
            None if self.leaderless_since.is_none() => self.leaderless_since = Some(self.now),
            Some(_) => self.leaderless_since = None,
            None => {}
        }
    }

    fn step_down(&mut self, m: usize, term: u64) {
        let s = &mut self.members[m];
        let was_leader = s.role == Role::Leader;
        if term > s.term {
            s.term = term;
            s.voted_for = None;
        }
        s.role = Role::Follower;
        s.votes.clear();
        if was_leader {
            s.heartbeat_gen += 1;
            self.set_leader_timeline();
            self.arm_election(m);
        }
    }

    fn apply(&mut self, event: Event) {
        match event {
            Event::ElectionTimeout { member, gen } => {
                let s = &self.members[member];
                if s.alive && s.election_gen == gen && s.role != Role::Leader {
                    self.start_election(member);
                }
            }
            Event::HeartbeatTick { member, gen } => {
                let s = &self.members[member];
                if s.alive && s.heartbeat_gen == gen && s.role == Role::Leader {
                    let term = s.term;
                    self.broadcast(member, Msg::Heartbeat { term });
                    self.push(self.now + self.config.heartbeat_ms, Event::HeartbeatTick { member, gen });
                }
            }
            Event::Deliver { from, from_epoch, to, msg } => {
                if self.members[from].epoch == from_epoch && self.members[from].alive && self.members[to].alive {
                    self.receive(from, to, msg);
                }
            }
            Event::RoundStart { member, gen } => {
                let s = &self.members[member];
                if s.alive && s.heartbeat_gen == gen && s.role == Role::Leader {
                    self.start_round(member);
                    self.push(self.now + self.config.vote_interval_ms, Event::RoundStart { member, gen });
                }
            }
            Event::RoundTimeout { round } => {
                if self.open_round.as_ref().is_some_and(|r| r.round == round) {
                    self.finish_round();
                }
            }
            Event::Fault(action) => self.apply_fault(action),
        }
    }

    fn start_election(&mut self, m: usize) {
        let s = &mut self.members[m];
        s.role = Role::Candidate;
        s.term += 1;
        s.voted_for = Some(m);
        s.votes = BTreeSet::from([m]);
        let term = s.term;
        self.arm_election(m);
        self.broadcast(m, Msg::RequestVote { term });
        self.maybe_win(m);
    }

    fn maybe_win(&mut self, m: usize) {
        let s = &mut self.members[m];
        if s.role != Role::Candidate || s.votes.len() < self.config.majority() {
            return;
        }
        s.role = Role::Leader;
        s.heartbeat_gen += 1;
        let (term, gen, id) = (s.term, s.heartbeat_gen, s.id.clone());
        let latency_ms = self.now - self.leaderless_since.unwrap_or(self.now);
        self.report.elections.push(ElectionRecord { term, leader: id, at_ms: self.now, latency_ms });
        self.set_leader_timeline();
        self.broadcast(m, Msg::Heartbeat { term });
        self.push(self.now + self.config.heartbeat_ms, Event::HeartbeatTick { member: m, gen });
        if self.config.pattern == Pattern::Consensus {
            self.push(self.now, Event::RoundStart { member: m, gen });
        }
    }

    fn receive(&mut self, from: usize, to: usize, msg: Msg) {
        let msg_term = match &msg {
            Msg::RequestVote { term }
            | Msg::Vote { term, .. }
            | Msg::Heartbeat { term }
            | Msg::ValueRequest { term, .. }
            | Msg::ValueReply { term, .. } => *term,
        };
        if msg_term > self.members[to].term {
            self.step_down(to, msg_term);
        }
        let my_term = self.members[to].term;
        match msg {
            Msg::RequestVote { term } => {
                let s = &mut self.members[to];
                let granted = term == s.term && s.voted_for.is_none_or(|v| v == from);
                if granted {
                    s.voted_for = Some(from);
                    self.arm_election(to);
                }
                self.send(to, from, Msg::Vote { term: my_term, granted });
            }
            Msg::Vote { term, granted } => {
                let s = &mut self.members[to];
                if granted && term == s.term && s.role == Role::Candidate {
                    s.votes.insert(from);
                    self.maybe_win(to);
                }
            }
            Msg::Heartbeat { term } => {
                if term == my_term {
                    if self.members[to].role != Role::Follower {
                        self.step_down(to, term);
                    }
                    self.arm_election(to);
                }
            }
            Msg::ValueRequest { term, round } => {
                if term == my_term {
                    self.arm_election(to);
                    let value = self.members[to].value(self.config.honest_value);
                    self.send(to, from, Msg::ValueReply { term, round, value });
                }
            }
            Msg::ValueReply { term, round, value } => {
                let Some(open) = self.open_round.as_mut() else { return };
                if open.round == round && open.leader == to && open.term == term {
                    open.values.insert(from, value);
                    if open.values.len() == self.members.len() {
                        self.finish_round();
                    }
                }
            }
        }
    }

    fn start_round(&mut self, leader: usize) {
        if self.open_round.is_some() {
            self.finish_round();
        }
        self.rounds += 1;
        let round = self.rounds;
        let term = self.members[leader].term;
        let own = self.members[leader].value(self.config.honest_value);
        self.open_round =
            Some(OpenRound { round, leader, term, start: self.now, values: BTreeMap::from([(leader, own)]) });
        self.broadcast(leader, Msg::ValueRequest { term, round });
        self.push(self.now + self.config.vote_timeout_ms, Event::RoundTimeout { round });
    }

    /// Closes the open round: the leader's value if verified, else the
    /// lowest-index member with a verified value.
    fn finish_round(&mut self) {
        let Some(open) = self.open_round.take() else { return };
        let verified = |m: usize| {
            let v = open.values[&m];
            open.values.values().filter(|w| self.config.agree(v, **w)).count() >= self.config.majority()
        };
        let chosen =
            if verified(open.leader) { Some(open.leader) } else { open.values.keys().copied().find(|&m| verified(m)) };
        self.report.vote_outcomes.push(VoteOutcome {
            round: open.round,
            leader: self.members[open.leader].id.clone(),
            start_ms: open.start,
            duration_ms: self.now - open.start,
            replies: open.values.len(),
            chosen_member: chosen.map(|m| self.members[m].id.clone()),
            chosen_value: chosen.map(|m| open.values[&m]),
            verified: chosen.is_some(),
        });
    }

    fn apply_fault(&mut self, action: FaultAction) {
        let target = match action.target() {
            Target::Member(id) => self.member_index(id),
            Target::Leader => self.leader(),
        };
        let Some(m) = target else {
            self.report.faults.push((self.now, format!("{action} (no target)")));
            return;
        };
        let id = self.members[m].id.clone();
        let applied = match &action {
            FaultAction::DropNode(_) => {
                if self.open_round.as_ref().is_some_and(|r| r.leader == m) {
                    self.open_round = None;
                }
                let s = &mut self.members[m];
                s.alive = false;
                s.epoch += 1;
                s.role = Role::Follower;
                s.votes.clear();
                s.heartbeat_gen += 1;
                self.set_leader_timeline();
                format!("DROP {id}")
            }
            FaultAction::RestoreNode(_) => {
                if !self.members[m].alive {
                    let s = &mut self.members[m];
                    s.alive = true;
                    s.epoch += 1;
                    self.arm_election(m);
                }
                format!("RESTORE {id}")
            }
            FaultAction::StartFdia(_, off) => {
                self.members[m].value_source = ValueSource::Corrupted(*off);
                format!("FDIA {id} {off:+}")
            }
            FaultAction::StopFdia(_) => {
                self.members[m].value_source = ValueSource::Honest;
                format!("STOPFDIA {id}")
            }
        };
        self.report.faults.push((self.now, applied));
    }
}

/// Runs `script` against a fresh group for `duration_ms` of virtual time.
pub fn run_scenario(config: GroupConfig, script: &FaultScript, duration_ms: u64) -> Result<SimReport, FtError> {
    script.check(&config.member_ids, duration_ms)?;
    let mut world = World::new(config)?;
    for (t, action) in &script.events {
        world.schedule(*t, action.clone());
    }
    world.run_until(duration_ms)?;
    Ok(world.into_report())
}
