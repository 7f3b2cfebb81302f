//! Random placement problems for cross-checking the engine.
#![allow(dead_code)]

pub mod strategies;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use resdep_core::model::{
    validate_problem, ActorSpec, DeploymentProblem, LimitTargets, LimitsScope, NodeSpec, PlacementRules,
    ResourceEnvelope, ValidProblem,
};

/// A random valid problem with `nodes * actors <= max_cells`.
pub fn random_problem(rng: &mut impl RngCore, max_cells: usize) -> ValidProblem {
    loop {
        if let Ok(p) = validate_problem(draw(rng, max_cells)) {
            return p;
        }
    }
}

fn draw(rng: &mut impl RngCore, max_cells: usize) -> DeploymentProblem {
    let n = rng.random_range(1..=5usize.min(max_cells));
    let a = rng.random_range(1..=(max_cells / n).clamp(1, 6));
    let node_ids: Vec<String> = (1..=n).map(|i| format!("h{i}")).collect();

    let limits = rng.random_bool(0.4);
    let mut actors: Vec<ActorSpec> = (0..a)
        .map(|j| {
            let overfull = u32::from(rng.random_bool(0.1));
            let copies = rng.random_range(1..=n as u32 + overfull);
            let rate = rng.random_range(5.0..50.0f64).round();
            let env = ResourceEnvelope {
                cpu_pct: rng.random_range(5.0..80.0f64).round(),
                mem_mb: rng.random_range(20.0..300.0f64).round(),
                spc_mb: rng.random_range(10.0..500.0f64).round(),
                net_rate_kbps: rate,
                net_ceil_kbps: rate + rng.random_range(0.0..30.0f64).round(),
            };
            ActorSpec::new(format!("A{j}"), copies).with_env(env)
        })
        .collect();

    let mut ids: Vec<usize> = (0..a).collect();
    let mut separate_sets = Vec::new();
    let mut colocate_sets = Vec::new();
    for _ in 0..rng.random_range(0..=2) {
        ids.shuffle(rng);
        let k = rng.random_range(2..=3).min(a);
        if k >= 2 {
            separate_sets.push(ids[..k].iter().map(|&j| actors[j].id.clone()).collect::<Vec<_>>());
        }
    }
    if a >= 2 && rng.random_bool(0.3) {
        ids.shuffle(rng);
        let (x, y) = (ids[0], ids[1]);
        actors[y].copies = actors[x].copies;
        colocate_sets.push(vec![actors[x].id.clone(), actors[y].id.clone()]);
    }
    for actor in actors.iter_mut() {
        if rng.random_bool(0.15) && actor.copies as usize <= n {
            let mut pool = node_ids.clone();
            pool.shuffle(rng);
            actor.host_pin = pool[..actor.copies as usize].to_vec();
        }
    }

    let nodes = node_ids
        .iter()
        .map(|id| {
            if !limits {
                return NodeSpec::unconstrained(id.clone());
            }
            let rate = rng.random_range(60.0..160.0f64).round();
            NodeSpec {
                id: id.clone(),
                cores: rng.random_range(1..=2),
                max_cpu: [0.5, 0.7, 1.0][rng.random_range(0..3)],
                mem_mb: [256.0, 512.0, 1024.0][rng.random_range(0..3)],
                max_mem: 0.7,
                spc_mb: 2048.0,
                max_spc: 0.7,
                nic_rate_kbps: rate,
                nic_ceil_kbps: rate + 10.0,
            }
        })
        .collect();
    let limits =
        if limits { vec![LimitsScope { hardware_key: "hw".into(), targets: LimitTargets::All }] } else { vec![] };
    DeploymentProblem {
        name: "Rand".into(),
        actors,
        nodes,
        rules: PlacementRules { colocate_sets, separate_sets, limits },
    }
}

/// REMApp actors with uniform network envelopes on `n` identical nodes
/// carrying the given NIC figures, limits on.
pub fn network_limited(n: usize, rate: f64, ceil: f64, nic_rate: f64, nic_ceil: f64) -> ValidProblem {
    let names = ["Aggregator", "BESSActor", "BuildingActor", "ChargerActor", "DataLogger", "UtilityGrid"];
    let actors = names
        .iter()
        .map(|id| {
            let a = ActorSpec::new(*id, 1).with_env(ResourceEnvelope::network(rate, ceil));
            if *id == "UtilityGrid" {
                a.pinned_to("h1")
            } else {
                a
            }
        })
        .collect();
    let nodes = (1..=n)
        .map(|i| NodeSpec {
            cores: 4,
            max_cpu: 1.0,
            mem_mb: 1024.0,
            max_mem: 1.0,
            spc_mb: 1024.0,
            max_spc: 1.0,
            nic_rate_kbps: nic_rate,
            nic_ceil_kbps: nic_ceil,
            ..NodeSpec::unconstrained(format!("h{i}"))
        })
        .collect();
    validate_problem(DeploymentProblem {
        name: "REMApp".into(),
        actors,
        nodes,
        rules: PlacementRules {
            colocate_sets: vec![vec!["UtilityGrid".into(), "DataLogger".into()]],
            separate_sets: vec![vec!["BESSActor".into(), "BuildingActor".into(), "ChargerActor".into()]],
            limits: vec![LimitsScope { hardware_key: "bbb".into(), targets: LimitTargets::All }],
        },
    })
    .unwrap()
}
