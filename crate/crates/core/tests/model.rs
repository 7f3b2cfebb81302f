mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resdep_core::model::{check_deployment, validate_problem, ConstraintKind, DeploymentMatrix, ValidProblem};

fn random_matrix(rng: &mut ChaCha8Rng, p: &ValidProblem) -> DeploymentMatrix {
    let mut m = DeploymentMatrix::zeros(p.num_nodes(), p.num_actors());
    for i in 0..p.num_nodes() {
        for j in 0..p.num_actors() {
            m.set(i, j, rng.random_bool(0.4));
        }
    }
    m
}

/// Straight-line evaluation of every rule, counting violated instances.
fn scalar_violations(p: &ValidProblem, m: &DeploymentMatrix) -> usize {
    let (n, a) = (p.num_nodes(), p.num_actors());
    let x = |i: usize, j: usize| if m.get(i, j) { 1.0 } else { 0.0 };
    let mut count = 0;
    for j in 0..a {
        let col: f64 = (0..n).map(|i| x(i, j)).sum();
        count += usize::from(col != f64::from(p.actors[j].copies));
        if let Some(pins) = p.pinned_nodes(j) {
            count += (0..n).filter(|i| !pins.contains(i) && x(*i, j) == 1.0).count();
        }
    }
    for i in 0..n {
        for &(u, v) in p.colocated_pairs() {
            count += usize::from(x(i, u) != x(i, v));
        }
        for &(u, v) in p.separated_pairs() {
            count += usize::from(x(i, u) + x(i, v) > 1.0);
        }
        if p.rules.limits_enabled() && p.is_limited(i) {
            let node = &p.nodes[i];
            let mut cpu = 0.0;
            let mut mem = 0.0;
            let mut spc = 0.0;
            let mut rate = 0.0;
            let mut burst: f64 = 0.0;
            for j in 0..a {
                let e = &p.actors[j].env;
                cpu += x(i, j) * e.cpu_pct / 100.0;
                mem += x(i, j) * e.mem_mb;
                spc += x(i, j) * e.spc_mb;
                rate += x(i, j) * e.net_rate_kbps;
                if x(i, j) == 1.0 {
                    burst = burst.max(e.net_ceil_kbps - e.net_rate_kbps);
                }
            }
            let budgets = [
                (cpu, node.max_cpu * f64::from(node.cores)),
                (mem, node.mem_mb * node.max_mem),
                (spc, node.spc_mb * node.max_spc),
                (rate + burst, 0.95 * node.nic_rate_kbps),
            ];
            count += budgets.iter().filter(|(lhs, cap)| *lhs > cap - 1e-9).count();
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn checker_matches_scalar_evaluation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_problem(&mut rng, 30);
        let m = random_matrix(&mut rng, &p);
        prop_assert_eq!(check_deployment(&p, &m).unwrap().len(), scalar_violations(&p, &m));
    }

    #[test]
    fn node_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_problem(&mut rng, 30);
        let m = random_matrix(&mut rng, &p);
        let (a, b) = (rng.random_range(0..p.num_nodes()), rng.random_range(0..p.num_nodes()));
        let mut q = p.problem().clone();
        q.nodes.swap(a, b);
        let q = validate_problem(q).unwrap();
        let mut swapped = m.clone();
        swapped.swap_nodes(a, b);
        let before = check_deployment(&p, &m).unwrap();
        let after = check_deployment(&q, &swapped).unwrap();
        prop_assert_eq!(before.len(), after.len());
        for kind in [ConstraintKind::Redundancy, ConstraintKind::Cpu, ConstraintKind::Network] {
            prop_assert_eq!(before.of_kind(kind).count(), after.of_kind(kind).count());
        }
    }
}
