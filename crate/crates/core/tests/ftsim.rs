use proptest::prelude::*;
use resdep_core::ftsim::{run_scenario, summarize, FaultAction, FaultScript, GroupConfig, Pattern, Target};

const LATENCY_BOUND_MS: u64 = 2 * (1000 + 2 * 5);

fn member(id: &str) -> Target {
    Target::Member(id.into())
}

#[test]
fn leader_drop_sweep_is_live() {
    for seed in 0..100 {
        let cfg = GroupConfig::numbered(3, Pattern::Redundancy, seed);
        let script = FaultScript::new(vec![(20_000, FaultAction::DropNode(Target::Leader))]);
        let r = run_scenario(cfg, &script, 60_000).unwrap();
        assert_eq!(r.elections_after(20_000), 1, "seed {seed}");
        let e = r.elections.last().unwrap();
        assert!(e.latency_ms <= LATENCY_BOUND_MS, "seed {seed}: {e:?}");
    }
}

#[test]
fn two_corrupted_of_five_are_masked() {
    for seed in 0..50 {
        let cfg = GroupConfig::numbered(5, Pattern::Consensus, seed);
        let script = FaultScript::new(vec![
            (10_000, FaultAction::StartFdia(member("m1"), 250.0)),
            (10_000, FaultAction::StartFdia(member("m4"), -40.0)),
        ]);
        let r = run_scenario(cfg, &script, 30_000).unwrap();
        let late: Vec<_> = r.vote_outcomes.iter().filter(|v| v.start_ms > 10_000).collect();
        assert!(!late.is_empty());
        assert!(late.iter().all(|v| v.verified && v.chosen_value == Some(100.0)), "seed {seed}");
    }
}

#[test]
fn restored_member_rejoins_as_follower() {
    let cfg = GroupConfig::numbered(3, Pattern::Redundancy, 9);
    let script = FaultScript::new(vec![
        (5_000, FaultAction::DropNode(Target::Leader)),
        (10_000, FaultAction::RestoreNode(Target::Leader)),
    ]);
    // restoring "@leader" hits the live leader and is a no-op
    let r = run_scenario(cfg, &script, 20_000).unwrap();
    assert_eq!(r.elections_after(5_000), 1);
    assert!(summarize(&r).availability > 0.85);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_faults_keep_safety(
        seed in any::<u64>(),
        n in 2usize..6,
        faults in prop::collection::vec((0u64..20_000, 0usize..4, 0usize..6), 0..8),
        drop_p in prop::sample::select(vec![0.0, 0.05]),
    ) {
        let mut cfg = GroupConfig::numbered(n, Pattern::Consensus, seed);
        cfg.drop_probability = drop_p;
        let mut events: Vec<(u64, FaultAction)> = faults
            .into_iter()
            .map(|(t, kind, who)| {
                let target = if who >= n { Target::Leader } else { member(&format!("m{}", who + 1)) };
                let action = match kind {
                    0 => FaultAction::DropNode(target),
                    1 => FaultAction::RestoreNode(target),
                    2 => FaultAction::StartFdia(target, 10.0),
                    _ => FaultAction::StopFdia(target),
                };
                (t, action)
            })
            .collect();
        events.sort_by_key(|e| e.0);
        // run_scenario fails on any split brain or term regression
        let r = run_scenario(cfg, &FaultScript::new(events), 20_000);
        prop_assert!(r.is_ok(), "{:?}", r.err());
    }

    #[test]
    fn honest_majority_wins_every_verified_round(seed in any::<u64>(), k in 1usize..4) {
        let n = 2 * k + 1;
        let cfg = GroupConfig::numbered(n, Pattern::Consensus, seed);
        let events = (1..=k).map(|m| (5_000, FaultAction::StartFdia(member(&format!("m{m}")), 7.0 * m as f64))).collect();
        let r = run_scenario(cfg, &FaultScript::new(events), 15_000).unwrap();
        for v in r.vote_outcomes.iter().filter(|v| v.verified) {
            prop_assert_eq!(v.chosen_value, Some(100.0));
        }
    }

    #[test]
    fn replay_is_deterministic(seed in any::<u64>()) {
        let script = FaultScript::new(vec![
            (3_000, FaultAction::DropNode(Target::Leader)),
            (6_000, FaultAction::StartFdia(member("m2"), 3.0)),
        ]);
        let a = run_scenario(GroupConfig::numbered(3, Pattern::Consensus, seed), &script, 10_000).unwrap();
        let b = run_scenario(GroupConfig::numbered(3, Pattern::Consensus, seed), &script, 10_000).unwrap();
        prop_assert_eq!(a, b);
    }
}
