use super::{AppModel, DslError, DspecFile, HardwareSpecFile};
use crate::model::{ActorSpec, DeploymentProblem, LimitTargets, LimitsScope, NodeSpec, PlacementRules};

/// NIC parameters from the platform configuration, in kbps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    pub nic_rate_kbps: f64,
    pub nic_ceil_kbps: f64,
}

/// Combines the three inputs into an (unvalidated) deployment problem over
/// `node_ids`.
///
/// Nodes covered by a limits directive get that hardware's capacities and
/// the NIC values from `network`; other nodes are unconstrained.
pub fn assemble_problem(
    app: &AppModel,
    dspec: &DspecFile,
    hw: &HardwareSpecFile,
    node_ids: &[String],
    network: Option<NetworkConfig>,
) -> Result<DeploymentProblem, DslError> {
    if let Some(model_name) = &app.app_name {
        if *model_name != dspec.app_name {
            return Err(DslError::AppNameMismatch { model: model_name.clone(), dspec: dspec.app_name.clone() });
        }
    }
    for (actor, _) in &dspec.copies_overrides {
        if app.actor(actor).is_none() {
            return Err(DslError::UnknownActor(actor.clone()));
        }
    }
    for d in &dspec.deploys {
        if let Some(a) = d.actors.iter().find(|a| app.actor(a).is_none()) {
            return Err(DslError::UnknownActor(a.clone()));
        }
    }

    let actors = app
        .actors
        .iter()
        .map(|a| ActorSpec {
            id: a.name.clone(),
            copies: dspec.copies_of(&a.name).unwrap_or(1),
            host_pin: dspec.pins_of(&a.name).map(<[String]>::to_vec).unwrap_or_default(),
            env: a.uses,
        })
        .collect();

    let mut records = Vec::with_capacity(dspec.limits.len());
    for l in &dspec.limits {
        let rec =
            hw.hardware.get(&l.hardware_key).ok_or_else(|| DslError::UnknownHardwareKey(l.hardware_key.clone()))?;
        records.push((l, rec));
    }
    if !records.is_empty() && network.is_none() {
        return Err(DslError::MissingNetworkConfig);
    }

    let mut nodes = Vec::with_capacity(node_ids.len());
    for id in node_ids {
        let mut covering = records.iter().filter(|(l, _)| match &l.targets {
            LimitTargets::All => true,
            LimitTargets::Nodes(ns) => ns.contains(id),
        });
        let node = match (covering.next(), covering.next()) {
            (Some(_), Some(_)) => return Err(DslError::OverlappingLimits(id.clone())),
            (Some((_, rec)), None) => {
                let net = network.expect("checked above");
                NodeSpec {
                    id: id.clone(),
                    cores: rec.cores,
                    max_cpu: rec.max_cpu,
                    mem_mb: rec.mem_mb,
                    max_mem: rec.max_mem,
                    spc_mb: rec.spc_mb,
                    max_spc: rec.max_spc,
                    nic_rate_kbps: net.nic_rate_kbps,
                    nic_ceil_kbps: net.nic_ceil_kbps,
                }
            }
            _ => NodeSpec::unconstrained(id.clone()),
        };
        nodes.push(node);
    }

    Ok(DeploymentProblem {
        name: dspec.app_name.clone(),
        actors,
        nodes,
        rules: PlacementRules {
            colocate_sets: dspec.colocate_sets.clone(),
            separate_sets: dspec.separate_sets.clone(),
            limits: dspec
                .limits
                .iter()
                .map(|l| LimitsScope { hardware_key: l.hardware_key.clone(), targets: l.targets.clone() })
                .collect(),
        },
    })
}
