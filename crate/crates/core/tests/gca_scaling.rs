use dissim_core::cbe::{circuit_unitary, Gate};
use dissim_core::gca::{exact_gca_oracle, run_pipeline_exact, run_pipeline_mlae, GcaProblem};
use dissim_core::linalg::inner;
use dissim_core::resources::{theorem1_cost, theorem2_cost, theorem3_cost};
use proptest::prelude::*;
use rayon::prelude::*;

fn tiny(epsilon: f64) -> GcaProblem {
    GcaProblem::new(1, vec![(1.0, "X".parse().unwrap())], 1.0, vec![Gate::s(0)], vec![Gate::h(0)], epsilon, 0.05).unwrap()
}

#[test]
fn mlae_meets_epsilon_on_most_seeds() {
    let p = tiny(0.02);
    let truth = exact_gca_oracle(&p).unwrap();
    let hits = (0..100u64)
        .into_par_iter()
        .filter(|&seed| (run_pipeline_mlae(&p, seed).unwrap().value() - truth).norm() <= p.epsilon)
        .count();
    assert!(hits >= 95, "{hits}/100 within epsilon");
}

#[test]
fn halving_epsilon_doubles_queries() {
    let q = |eps: f64| run_pipeline_mlae(&tiny(eps), 1).unwrap().queries.unwrap() as f64;
    for eps in [0.04, 0.02, 0.01] {
        let ratio = q(eps / 2.0) / q(eps);
        assert!((1.6..=2.4).contains(&ratio), "eps {eps}: ratio {ratio}");
    }
}

#[test]
fn zero_beta_is_overlap() {
    let u1 = vec![Gate::h(0), Gate::cnot(0, 1), Gate::t(1)];
    let u2 = vec![Gate::h(1), Gate::s(0)];
    let p = GcaProblem::new(2, vec![(0.7, "ZX".parse().unwrap())], 0.0, u1.clone(), u2.clone(), 1e-3, 0.05).unwrap();
    let plus = vec![dissim_core::cx(0.5, 0.0); 4];
    let psi1 = circuit_unitary::<f64>(&u1, 2).unwrap().apply(&plus).unwrap();
    let psi2 = circuit_unitary::<f64>(&u2, 2).unwrap().column(0);
    let overlap = inner(&psi1, &psi2);
    let est = run_pipeline_exact(&p).unwrap();
    assert_eq!(est.truncation_order, 0);
    assert!((est.value() - overlap).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_forwarding_never_deepens(t in 0.1f64..50.0, m in 1usize..20, r in 1usize..4, n in 1usize..10) {
        let c1 = theorem1_cost(t, 1e-3, m).unwrap();
        let c2 = theorem2_cost(t, 1e-3, m, r, n).unwrap();
        prop_assert_eq!(c1.queries, c2.queries);
        prop_assert!(c2.ancillas >= c1.ancillas);
        let k = c1.queries;
        if k >= 8.0 {
            prop_assert!(c2.depth <= c1.depth + r as f64);
        }
    }

    #[test]
    fn hadamards_remove_amplification(beta in 0.5f64..1e3, n in 1usize..12, m in 1usize..20) {
        let amplified = theorem3_cost(beta, 1e-2, 0.05, m, n, 0, 4).unwrap();
        let plain = theorem3_cost(beta, 1e-2, 0.05, m, n, n, 4).unwrap();
        let ratio = plain.queries / amplified.queries;
        prop_assert!((ratio - 2f64.powf(n as f64 / 2.0)).abs() < 1e-9 * ratio);
    }
}
