use std::path::{Path, PathBuf};

use resdep_core::dispatch::{format_solution, solve_horizon, DispatchProblem};
use resdep_core::ftsim::{run_scenario, summarize, FaultScript, GroupConfig, Pattern, SimReport};
use serde::Serialize;

use crate::error::{read, write, CliError};
use crate::manifest::RunManifest;
use crate::{ensure_output_dir, DispatchArgs, Globals, PatternArg, SimulateArgs};

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned())
}

pub fn cmd_dispatch(g: &Globals, args: &DispatchArgs) -> Result<u8, CliError> {
    let problem: DispatchProblem = read(&args.problem)?.parse().map_err(|e| CliError::dispatch(&args.problem, e))?;
    let sol = solve_horizon(&problem).map_err(|e| CliError::dispatch(&args.problem, e))?;
    let text = format_solution(&sol);
    out!("{text}");

    ensure_output_dir(g)?;
    let name = stem(&args.problem);
    let out_path = g.output_dir.join(format!("{name}.solution.txt"));
    let manifest_path = g.output_dir.join(format!("{name}.manifest.json"));
    write(&out_path, &text)?;
    let mut man = RunManifest::new("dispatch", g);
    man.input("problem", &args.problem)
        .option("loads", problem.loads())
        .option("slots", problem.slots())
        .result("objective", sol.objective(&problem));
    man.outputs = vec![out_path, manifest_path.clone()];
    man.save(&manifest_path)?;
    Ok(0)
}

#[derive(Serialize)]
struct RoundRow<'a> {
    round: u64,
    leader: &'a str,
    start_ms: u64,
    duration_ms: u64,
    replies: usize,
    chosen_member: &'a str,
    chosen_value: Option<f64>,
    verified: bool,
}

#[derive(Serialize)]
struct ElectionRow<'a> {
    at_ms: u64,
    term: u64,
    leader: &'a str,
    latency_ms: u64,
}

fn write_csv<T: Serialize>(path: &PathBuf, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let fail = |e: csv::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    for row in rows {
        w.serialize(row).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn config(g: &Globals, args: &SimulateArgs) -> Result<GroupConfig, CliError> {
    let pattern = match args.pattern {
        PatternArg::Redundancy => Pattern::Redundancy,
        PatternArg::Consensus => Pattern::Consensus,
    };
    let mut cfg = match (args.members, args.member_ids.is_empty()) {
        (Some(n), _) => GroupConfig::numbered(n, pattern, g.seed),
        (None, false) => GroupConfig::new(args.member_ids.clone(), pattern, g.seed),
        (None, true) => GroupConfig::numbered(3, pattern, g.seed),
    };
    cfg.election_timeout_ms = (args.timeout_min_ms, args.timeout_max_ms);
    cfg.heartbeat_ms = args.heartbeat_ms;
    cfg.vote_timeout_ms = args.vote_timeout_ms;
    cfg.vote_interval_ms = args.vote_interval_ms;
    cfg.latency_ms = args.latency_ms;
    cfg.drop_probability = args.drop_probability;
    cfg.tolerance = args.tolerance;
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

pub fn cmd_simulate(g: &Globals, args: &SimulateArgs) -> Result<u8, CliError> {
    let cfg = config(g, args)?;
    let script = FaultScript::parse(&read(&args.scenario)?).map_err(|e| CliError::script(&args.scenario, e))?;
    let last = script.events.last().map_or(0, |(t, _)| *t);
    let duration = args.duration_ms.or(script.end_ms).unwrap_or(last + 10_000);
    script.check(&cfg.member_ids, duration).map_err(|e| CliError::script(&args.scenario, e))?;
    let members = cfg.member_ids.clone();
    let report = run_scenario(cfg, &script, duration).map_err(CliError::Simulation)?;

    ensure_output_dir(g)?;
    let name = stem(&args.scenario);
    let paths = [
        g.output_dir.join(format!("{name}.report.txt")),
        g.output_dir.join(format!("{name}.rounds.csv")),
        g.output_dir.join(format!("{name}.elections.csv")),
        g.output_dir.join(format!("{name}.manifest.json")),
    ];
    let text = report.to_text();
    write(&paths[0], &text)?;
    write_csv(
        &paths[1],
        report.vote_outcomes.iter().map(|v| RoundRow {
            round: v.round,
            leader: &v.leader,
            start_ms: v.start_ms,
            duration_ms: v.duration_ms,
            replies: v.replies,
            chosen_member: v.chosen_member.as_deref().unwrap_or(""),
            chosen_value: v.chosen_value,
            verified: v.verified,
        }),
    )?;
    write_csv(
        &paths[2],
        report.elections.iter().map(|e| ElectionRow {
            at_ms: e.at_ms,
            term: e.term,
            leader: &e.leader,
            latency_ms: e.latency_ms,
        }),
    )?;
    out!("{text}");

    let mut man = RunManifest::new("simulate", g);
    man.input("scenario", &args.scenario)
        .option("pattern", format!("{:?}", args.pattern).to_lowercase())
        .option("members", members)
        .option("duration_ms", duration)
        .option("election_timeout_ms", vec![args.timeout_min_ms, args.timeout_max_ms])
        .option("heartbeat_ms", args.heartbeat_ms)
        .option("vote_timeout_ms", args.vote_timeout_ms)
        .option("vote_interval_ms", args.vote_interval_ms)
        .option("latency_ms", args.latency_ms)
        .option("drop_probability", args.drop_probability)
        .option("tolerance", args.tolerance);
    summary_into(&mut man, &report);
    man.outputs = paths.to_vec();
    man.save(&paths[3])?;
    Ok(0)
}

fn summary_into(man: &mut RunManifest, report: &SimReport) {
    let s = summarize(report);
    man.result("elections", report.elections.len())
        .result("vote_rounds", report.vote_outcomes.len())
        .result("verified_rounds", report.vote_outcomes.iter().filter(|v| v.verified).count())
        .result("availability", s.availability);
    if let Some(v) = s.mean_election_latency_ms {
        man.result("mean_election_latency_ms", v);
    }
    if let Some(v) = s.mean_vote_duration_ms {
        man.result("mean_vote_duration_ms", v);
    }
}
