use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct ElectionRecord {
    pub term: u64,
    pub leader: String,
    pub at_ms: u64,
    /// Time since the group last had a live leader (or since start).
    pub latency_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoteOutcome {
    pub round: u64,
    pub leader: String,
    pub start_ms: u64,
    pub duration_ms: u64,
    pub replies: usize,
    pub chosen_member: Option<String>,
    pub chosen_value: Option<f64>,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimReport {
    pub duration_ms: u64,
    pub honest_value: f64,
    pub elections: Vec<ElectionRecord>,
    pub vote_outcomes: Vec<VoteOutcome>,
    /// Leader changes; `None` marks a leaderless interval.
    pub leader_timeline: Vec<(u64, Option<String>)>,
    /// Faults as applied, with `@leader` resolved.
    pub faults: Vec<(u64, String)>,
}

impl SimReport {
    pub fn election_latencies(&self) -> Vec<u64> {
        self.elections.iter().map(|e| e.latency_ms).collect()
    }

    pub fn vote_round_durations(&self) -> Vec<u64> {
        self.vote_outcomes.iter().map(|v| v.duration_ms).collect()
    }

    pub fn elections_after(&self, t_ms: u64) -> usize {
        self.elections.iter().filter(|e| e.at_ms > t_ms).count()
    }

    /// Fraction of `[0, duration]` with a live leader.
    pub fn availability(&self) -> f64 {
        if self.duration_ms == 0 {
            return 0.0;
        }
        let mut led = 0;
        for (k, (t, leader)) in self.leader_timeline.iter().enumerate() {
            let end = self.leader_timeline.get(k + 1).map_or(self.duration_ms, |(u, _)| *u).min(self.duration_ms);
            if leader.is_some() {
                led += end.saturating_sub(*t);
            }
        }
        led as f64 / self.duration_ms as f64
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = summarize(self);
        let fmt_opt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3} ms"));
        let _ = writeln!(out, "duration: {} ms", self.duration_ms);
        let _ = writeln!(out, "elections: {}", self.elections.len());
        let _ = writeln!(out, "mean election latency: {}", fmt_opt(s.mean_election_latency_ms));
        let _ = writeln!(
            out,
            "vote rounds: {} ({} verified)",
            self.vote_outcomes.len(),
            self.vote_outcomes.iter().filter(|v| v.verified).count()
        );
        let _ = writeln!(out, "mean vote duration: {}", fmt_opt(s.mean_vote_duration_ms));
        let _ = writeln!(out, "availability: {:.4}", s.availability);
        let _ = writeln!(out, "\n[faults]");
        for (t, f) in &self.faults {
            let _ = writeln!(out, "{t} {f}");
        }
        let _ = writeln!(out, "\n[elections]");
        for e in &self.elections {
            let _ = writeln!(out, "{} term={} leader={} latency={}", e.at_ms, e.term, e.leader, e.latency_ms);
        }
        let _ = writeln!(out, "\n[leader timeline]");
        for (t, l) in &self.leader_timeline {
            let _ = writeln!(out, "{t} {}", l.as_deref().unwrap_or("-"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean_election_latency_ms: Option<f64>,
    pub mean_vote_duration_ms: Option<f64>,
    pub availability: f64,
}

fn mean(xs: &[u64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<u64>() as f64 / xs.len() as f64)
}

pub fn summarize(report: &SimReport) -> Summary {
    Summary {
        mean_election_latency_ms: mean(&report.election_latencies()),
        mean_vote_duration_ms: mean(&report.vote_round_durations()),
        availability: report.availability(),
    }
}
