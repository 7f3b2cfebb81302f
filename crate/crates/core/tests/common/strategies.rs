//! Proptest strategies for the specification file formats.

use std::collections::BTreeMap;

use proptest::prelude::*;
use resdep_core::dsl::{
    AppActor, AppModel, DeployStmt, DspecFile, HardwareRecord, HardwareSpecFile, LimitsDirective, NetworkConfig,
};
use resdep_core::model::{LimitTargets, ResourceEnvelope};

pub fn num() -> impl Strategy<Value = f64> {
    (0u32..1_000_000, 0u32..4).prop_map(|(m, k)| f64::from(m) / 10f64.powi(k as i32))
}

pub fn pos_num() -> impl Strategy<Value = f64> {
    num().prop_map(|v| if v == 0.0 { 1.5 } else { v })
}

pub fn actor_name() -> impl Strategy<Value = String> {
    "[A-Z][A-Za-z0-9_]{0,8}"
}

pub fn node_name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,5}".prop_filter("reserved", |s| !matches!(s.as_str(), "all" | "on" | "app"))
}

pub fn hw_key() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,7}".prop_filter("reserved", |s| s != "network")
}

pub fn group(names: &[String]) -> BoxedStrategy<Vec<String>> {
    prop::sample::subsequence(names.to_vec(), 2..=names.len().clamp(2, 4)).boxed()
}

pub fn dspec() -> impl Strategy<Value = DspecFile> {
    (actor_name(), prop::collection::btree_set(actor_name(), 2..7), prop::collection::vec(node_name(), 1..5))
        .prop_flat_map(|(app, actors, nodes)| {
            let actors: Vec<String> = actors.into_iter().collect();
            let overrides = prop::sample::subsequence(actors.clone(), 0..=actors.len())
                .prop_flat_map(|names| {
                    let n = names.len();
                    (Just(names), prop::collection::vec(1u32..20, n))
                })
                .prop_map(|(names, copies)| names.into_iter().zip(copies).collect::<Vec<_>>());
            let deploys = prop::sample::subsequence(actors.clone(), 0..=actors.len().min(3)).prop_flat_map({
                let nodes = nodes.clone();
                move |picked| {
                    let k = picked.len();
                    (Just(picked), prop::collection::vec(prop::sample::subsequence(nodes.clone(), 1..=nodes.len()), k))
                }
            });
            let limits = prop::collection::vec(
                (
                    hw_key(),
                    prop_oneof![
                        Just(LimitTargets::All),
                        prop::sample::subsequence(nodes.clone(), 1..=nodes.len()).prop_map(LimitTargets::Nodes),
                    ],
                ),
                0..3,
            );
            (
                Just(app),
                overrides,
                prop::collection::vec(group(&actors), 0..3),
                prop::collection::vec(group(&actors), 0..3),
                deploys,
                limits,
            )
        })
        .prop_map(|(app_name, copies_overrides, colocate_sets, separate_sets, (picked, node_sets), limits)| DspecFile {
            app_name,
            copies_overrides,
            colocate_sets,
            separate_sets,
            deploys: picked
                .into_iter()
                .zip(node_sets)
                .map(|(a, nodes)| DeployStmt { actors: vec![a], nodes })
                .collect(),
            limits: limits
                .into_iter()
                .map(|(hardware_key, targets)| LimitsDirective { hardware_key, targets })
                .collect(),
        })
}

pub fn hwspec() -> impl Strategy<Value = HardwareSpecFile> {
    let record = (1u32..64, pos_num(), pos_num(), pos_num(), pos_num(), pos_num()).prop_map(
        |(cores, max_cpu, mem_mb, max_mem, spc_mb, max_spc)| HardwareRecord {
            cores,
            max_cpu,
            mem_mb,
            max_mem,
            spc_mb,
            max_spc,
        },
    );
    (
        prop::collection::btree_map(hw_key(), record, 0..4),
        prop::option::of(
            (pos_num(), pos_num()).prop_map(|(r, c)| NetworkConfig { nic_rate_kbps: r, nic_ceil_kbps: c }),
        ),
    )
        .prop_map(|(hardware, network): (BTreeMap<_, _>, _)| HardwareSpecFile { hardware, network })
}

pub fn app_model() -> impl Strategy<Value = AppModel> {
    let envelope = (num(), num(), num(), num(), num()).prop_map(|(cpu, mem, spc, rate, extra)| ResourceEnvelope {
        cpu_pct: cpu,
        mem_mb: mem,
        spc_mb: spc,
        net_rate_kbps: rate,
        net_ceil_kbps: rate + extra,
    });
    (
        prop::option::of(actor_name()),
        prop::collection::btree_map(actor_name(), (prop::collection::vec("[a-z][a-z0-9]{0,4}", 0..3), envelope), 1..5),
    )
        .prop_map(|(app_name, actors)| AppModel {
            app_name,
            actors: actors.into_iter().map(|(name, (params, uses))| AppActor { name, params, uses }).collect(),
        })
}
