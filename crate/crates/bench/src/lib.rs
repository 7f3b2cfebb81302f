//! Inputs shared by the benchmarks.

use resdep_core::model::{validate_problem, ActorSpec, DeploymentProblem, NodeSpec, PlacementRules, ValidProblem};

const ACTORS: [(&str, u32); 6] = [
    ("Aggregator", 2),
    ("BESSActor", 3),
    ("BuildingActor", 3),
    ("ChargerActor", 3),
    ("DataLogger", 1),
    ("UtilityGrid", 1),
];

/// The fault-tolerance test configuration over `nodes` unconstrained hosts.
pub fn remapp(nodes: usize) -> ValidProblem {
    let actors = ACTORS
        .iter()
        .map(|&(id, c)| if id == "UtilityGrid" { ActorSpec::new(id, c).pinned_to("h1") } else { ActorSpec::new(id, c) })
        .collect();
    validate_problem(DeploymentProblem {
        name: "REMApp".into(),
        actors,
        nodes: (1..=nodes).map(|i| NodeSpec::unconstrained(format!("h{i}"))).collect(),
        rules: PlacementRules {
            colocate_sets: vec![vec!["UtilityGrid".into(), "DataLogger".into()]],
            separate_sets: vec![
                vec!["BESSActor".into(), "BuildingActor".into(), "ChargerActor".into()],
                vec!["ChargerActor".into(), "Aggregator".into()],
            ],
            limits: vec![],
        },
    })
    .expect("valid benchmark problem")
}
