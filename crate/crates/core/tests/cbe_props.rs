use dissim_core::cbe::{
    circuit_unitary, compile_circuit_cbe, compose_cbe, gamma_upper_bound, gate_cbe, hadamard_all, hadamard_count,
    hamiltonian_jump_construction, ndme_construct, pqc_encode, ub_tensor, verify_cbe, TableGate,
};
use dissim_core::linalg::hermitian_eigen;
use dissim_core::pauli::{Letter, PauliPhase, PauliString};
use dissim_core::sample::{random_gates, random_unitary};
use dissim_core::{cx, Operator};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hermitian_pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (any::<bool>(), prop::collection::vec(0u8..4, n)).prop_map(|(neg, ls)| {
        let letters: Vec<Letter> = ls.into_iter().map(Letter::from_code).collect();
        let phase = if neg { PauliPhase::MINUS_ONE } else { PauliPhase::ONE };
        PauliString::from_letters(phase, &letters)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn compiled_circuits_encode_conjugated_unitary(seed in any::<u64>(), n in 1usize..4, len in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = random_gates(n, len, &mut rng);
        let c = compile_circuit_cbe::<f64>(&gates, n).unwrap();
        let v = verify_cbe(&c);
        prop_assert!(v.passed(), "{v:?}");
        let eta = 2f64.powf(-(hadamard_count(&gates) as f64) / 2.0);
        prop_assert!((c.eta() - eta).abs() < 1e-15);
        let h = hadamard_all::<f64>(n).unwrap();
        let want = h.mm(&circuit_unitary::<f64>(&gates, n).unwrap()).mm(&h);
        prop_assert!(c.encoded_op().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn jump_pairs_encode_minus_q(q in (1usize..4).prop_flat_map(hermitian_pauli)) {
        let n = q.num_qubits();
        let d = 1 << n;
        let (p0, p1) = hamiltonian_jump_construction(&q).unwrap();
        let w = ub_tensor::<f64>(n).unwrap();
        let full = w.mm(&p0.to_dense::<f64>().kron(&p1.to_dense::<f64>().conj())).mm(&w.adjoint());
        let want = Operator::identity(d).kron(&q.to_dense::<f64>()).scale(cx(-1.0, 0.0));
        prop_assert!(full.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn ndme_upper_right_holds_scaled_state(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_unitary(n, &mut rng).unwrap().column(0);
        let gamma = gamma_upper_bound::<f64>(&psi).unwrap();
        let s = ndme_construct(&psi, gamma).unwrap();
        let want = pqc_encode(&psi).unwrap().scale_real(gamma);
        prop_assert!(s.upper_right().max_abs_diff(&want) < 1e-12);
        prop_assert!((s.rho.matrix().trace().re - 1.0).abs() < 1e-12);
        let low = hermitian_eigen(s.rho.matrix()).unwrap().values[0];
        prop_assert!(low >= -1e-12, "smallest eigenvalue {low}");
    }
}

#[test]
fn table_gates_compose_strongly() {
    for a in TableGate::ALL.into_iter().filter(|g| g.num_qubits() == 1) {
        for b in TableGate::ALL.into_iter().filter(|g| g.num_qubits() == 1) {
            let c = compose_cbe(&gate_cbe::<f64>(b), &gate_cbe::<f64>(a)).unwrap();
            assert!(verify_cbe(&c).passed(), "{a:?} then {b:?}");
            let want = b.unitary::<f64>().mm(&a.unitary::<f64>()).scale_real(a.eta() * b.eta());
            assert!(c.encoded_op().scale_real(c.eta()).max_abs_diff(&want) < 1e-12);
        }
    }
}
