use std::path::Path;
use std::time::Duration;

use resdep_core::dsl::{
    assemble_problem, emit_depl, parse_app_model, parse_depl, parse_dspec, parse_hwspec, HardwareSpecFile,
    NetworkConfig,
};
use resdep_core::model::{validate_problem, DeploymentMatrix, ValidProblem};
use resdep_core::solver::{check_for_mode, encode, explain_infeasible, solve, SolveMode, SolveStatus};

use crate::error::{read, write, CliError};
use crate::manifest::RunManifest;
use crate::{ensure_output_dir, Globals, SolveArgs, SpecArgs, VerifyArgs};

fn node_ids(spec: &SpecArgs) -> Result<Vec<String>, CliError> {
    match (spec.node_count, spec.nodes.is_empty()) {
        (Some(0), _) => Err(CliError::Usage("--node-count must be positive".into())),
        (Some(n), _) => Ok((1..=n).map(|i| format!("h{i}")).collect()),
        (None, false) => Ok(spec.nodes.iter().map(|s| s.trim().to_string()).collect()),
        (None, true) => Err(CliError::Usage("give --nodes h1,h2,... or --node-count N".into())),
    }
}

fn network(spec: &SpecArgs, hw: &HardwareSpecFile) -> Result<Option<NetworkConfig>, CliError> {
    let from_file = hw.network;
    let rate = spec.nic_rate.or(from_file.map(|n| n.nic_rate_kbps));
    let ceil = spec.nic_ceil.or(from_file.map(|n| n.nic_ceil_kbps));
    match (rate, ceil) {
        (Some(r), Some(c)) => {
            if !(r > 0.0 && c >= r) {
                return Err(CliError::Usage(format!("NIC rate {r} / ceil {c} must satisfy 0 < rate <= ceil")));
            }
            Ok(Some(NetworkConfig { nic_rate_kbps: r, nic_ceil_kbps: c }))
        }
        (None, None) => Ok(None),
        _ => Err(CliError::Usage("NIC rate and ceil must both be known".into())),
    }
}

pub fn load_problem(spec: &SpecArgs) -> Result<ValidProblem, CliError> {
    let nodes = node_ids(spec)?;
    let app = parse_app_model(&read(&spec.model)?).map_err(|e| CliError::dsl(&spec.model, e))?;
    let dspec = parse_dspec(&read(&spec.dspec)?).map_err(|e| CliError::dsl(&spec.dspec, e))?;
    let hw = match &spec.hwspec {
        Some(p) => parse_hwspec(&read(p)?).map_err(|e| CliError::dsl(p, e))?,
        None => HardwareSpecFile::default(),
    };
    let net = network(spec, &hw)?;
    let problem = assemble_problem(&app, &dspec, &hw, &nodes, net).map_err(|e| CliError::dsl(&spec.dspec, e))?;
    Ok(validate_problem(problem)?)
}

fn matrix_table(p: &ValidProblem, m: &DeploymentMatrix) -> String {
    let width = p.nodes.iter().map(|n| n.id.len()).max().unwrap_or(0);
    let mut out = format!("{:width$} | {}\n", "", p.actors.iter().map(|a| a.id.as_str()).collect::<Vec<_>>().join(" "));
    for (i, node) in p.nodes.iter().enumerate() {
        let cells: Vec<String> = p
            .actors
            .iter()
            .enumerate()
            .map(|(j, a)| format!("{:>w$}", u8::from(m.get(i, j)), w = a.id.len()))
            .collect();
        out.push_str(&format!("{:width$} | {}\n", node.id, cells.join(" ")));
    }
    out
}

fn record_spec(man: &mut RunManifest, spec: &SpecArgs, p: &ValidProblem) {
    man.input("model", &spec.model).input("dspec", &spec.dspec);
    if let Some(h) = &spec.hwspec {
        man.input("hwspec", h);
    }
    let nodes: Vec<_> = p.nodes.iter().map(|n| n.id.clone()).collect();
    man.option("nodes", nodes);
    if let Some(r) = spec.nic_rate {
        man.option("nic_rate", r);
    }
    if let Some(c) = spec.nic_ceil {
        man.option("nic_ceil", c);
    }
}

pub fn cmd_solve(g: &Globals, args: &SolveArgs) -> Result<u8, CliError> {
    if !(g.time_budget_s > 0.0 && g.time_budget_s.is_finite()) {
        return Err(CliError::Usage("--time-budget-s must be positive".into()));
    }
    let p = load_problem(&args.spec)?;
    let mode = SolveMode::from(args.mode);
    let budget = Duration::from_secs_f64(g.time_budget_s);
    let sys = encode(&p);
    let out = solve(&sys, mode, budget);

    ensure_output_dir(g)?;
    let mut man = RunManifest::new("solve", g);
    record_spec(&mut man, &args.spec, &p);
    man.option("mode", mode.to_string());
    man.result("status", format!("{:?}", out.status))
        .result("nodes_explored", out.stats.nodes_explored)
        .result("propagations", out.stats.propagations)
        .result("wall_time_s", out.stats.wall_time.as_secs_f64());
    let manifest_path = g.output_dir.join(format!("{}.manifest.json", p.name));

    outln!("status: {:?} ({mode})", out.status);
    outln!(
        "search: {} nodes, {} propagations, {:.3} s",
        out.stats.nodes_explored,
        out.stats.propagations,
        out.stats.wall_time.as_secs_f64()
    );

    let Some(m) = &out.matrix else {
        man.save(&manifest_path)?;
        if out.status == SolveStatus::Timeout {
            outln!("no deployment found within the time budget");
            return Ok(1);
        }
        match explain_infeasible(&sys, budget) {
            Ok(core) => outln!("infeasible: {}", core.describe()),
            Err(e) => outln!("infeasible (no explanation: {e})"),
        }
        return Ok(1);
    };

    if out.status == SolveStatus::Timeout {
        outln!("warning: time budget exhausted; best deployment so far is not proven optimal");
    }
    let emitted = if mode == SolveMode::MaximizeCopies { p.with_copies_from(m)? } else { p.clone() };
    let text = emit_depl(&emitted, m).map_err(|e| CliError::Output(e.to_string()))?;
    let depl_path = g.output_dir.join(format!("{}.depl", p.name));
    write(&depl_path, &text)?;
    if let Some(obj) = out.objective_value {
        outln!("objective: {obj}");
        man.result("objective", obj);
    }
    outln!("nodes used: {}, copies: {}", m.nodes_used(), m.total_copies());
    out!("{}", matrix_table(&p, m));
    outln!("wrote {}", depl_path.display());
    man.result("nodes_used", m.nodes_used()).result("total_copies", m.total_copies());
    man.outputs = vec![depl_path, manifest_path.clone()];
    man.save(&manifest_path)?;
    Ok(0)
}

pub fn cmd_verify(_g: &Globals, args: &VerifyArgs) -> Result<u8, CliError> {
    let p = load_problem(&args.spec)?;
    let depl = parse_depl(&read(&args.depl)?).map_err(|e| CliError::dsl(&args.depl, e))?;
    if depl.app_name != p.name {
        return Err(CliError::Input {
            path: args.depl.clone(),
            message: format!("deployment is for app `{}`, specification is for `{}`", depl.app_name, p.name),
        });
    }
    let m = depl.to_matrix(&p).map_err(|e| CliError::dsl(&args.depl, e))?;
    let report = check_for_mode(&p, args.mode.into(), &m)?;
    verdict(&args.depl, &report)
}

fn verdict(path: &Path, report: &resdep_core::model::ViolationReport) -> Result<u8, CliError> {
    if report.is_empty() {
        outln!("{}: ok", path.display());
        return Ok(0);
    }
    for v in &report.violations {
        outln!("{} [{}]: {}", v.kind, v.subjects.join(", "), v.message);
    }
    outln!("{}: {} violation(s)", path.display(), report.len());
    Ok(1)
}
