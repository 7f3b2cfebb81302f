use proptest::prelude::*;
use resdep_core::dispatch::{
    cap_tolerance, dispatch_oracle, kkt_residual, slot_objective, solve_horizon, solve_slot, DispatchProblem,
};

fn slot(max_loads: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (1..=max_loads).prop_flat_map(|n| {
        (prop::collection::vec(0.1f64..10.0, n), prop::collection::vec(0.0f64..20.0, n), 0.0f64..1.2).prop_map(
            |(w, p, frac)| {
                let g = frac * p.iter().sum::<f64>();
                (w, p, g)
            },
        )
    })
}

proptest! {
    #[test]
    fn matches_oracle_and_kkt((w, p, g) in slot(4)) {
        let s = solve_slot(&w, &p, g).unwrap();
        let o = dispatch_oracle(&w, &p, g).unwrap();
        prop_assert!(slot_objective(&w, &p, &s.x) <= slot_objective(&w, &p, &o) + 1e-6);
        prop_assert!(kkt_residual(&w, &p, g, &s.x, s.lambda) < 1e-6);
    }

    #[test]
    fn respects_cap_and_boxes((w, p, g) in slot(8)) {
        let s = solve_slot(&w, &p, g).unwrap();
        prop_assert!(s.x.iter().sum::<f64>() <= g + cap_tolerance(g));
        prop_assert!(s.x.iter().zip(&p).all(|(x, p)| *x >= 0.0 && x <= p));
        prop_assert!(s.lambda >= 0.0);
        if p.iter().sum::<f64>() <= g {
            prop_assert_eq!(&s.x, &p);
        }
    }

    #[test]
    fn more_grid_never_cuts_a_load((w, p, g) in slot(6), extra in 0.0f64..5.0) {
        let a = solve_slot(&w, &p, g).unwrap();
        let b = solve_slot(&w, &p, g + extra).unwrap();
        for (xa, xb) in a.x.iter().zip(&b.x) {
            prop_assert!(xb + 1e-7 >= *xa);
        }
    }

    #[test]
    fn scales_with_requests((w, p, g) in slot(6), c in 0.1f64..10.0) {
        let a = solve_slot(&w, &p, g).unwrap();
        let scaled: Vec<f64> = p.iter().map(|v| v * c).collect();
        let b = solve_slot(&w, &scaled, g * c).unwrap();
        for (xa, xb) in a.x.iter().zip(&b.x) {
            prop_assert!((xa * c - xb).abs() <= 1e-6 * (1.0 + xb.abs()));
        }
    }

    #[test]
    fn horizon_is_per_slot(cols in prop::collection::vec(slot(3), 1..4)) {
        let n = cols.iter().map(|c| c.0.len()).min().unwrap();
        let weights = cols[0].0[..n].to_vec();
        let problem = DispatchProblem {
            weights: weights.clone(),
            p_req: (0..n).map(|i| cols.iter().map(|c| c.1[i]).collect()).collect(),
            p_grid: cols.iter().map(|c| c.2).collect(),
        };
        let sol = solve_horizon(&problem).unwrap();
        for (j, c) in cols.iter().enumerate() {
            let s = solve_slot(&weights, &c.1[..n], c.2).unwrap();
            prop_assert_eq!(sol.lambda[j], s.lambda);
            for i in 0..n {
                prop_assert_eq!(sol.x[i][j], s.x[i]);
            }
        }
    }
}
