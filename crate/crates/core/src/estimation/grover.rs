use crate::error::{Error, Result};
use crate::linalg::{inner, Operator};
use crate::scalar::{cx, Cx};

/// `U_G = (I − 2U₁|0⟩⟨0|U₁†)(I − 2U₂|0⟩⟨0|U₂†)`.
pub fn grover_operator(u1: &Operator, u2: &Operator) -> Result<Operator> {
    if !u1.is_square() || u1.dim() != u2.dim() {
        return Err(Error::Shape(format!("preparations of dimension {} and {}", u1.rows(), u2.rows())));
    }
    let d = u1.dim();
    let reflect = |u: &Operator| {
        let psi = u.column(0);
        let mut r = Operator::identity(d);
        r.add_scaled(cx(-2.0, 0.0), &Operator::outer(&psi, &psi));
        r
    };
    Ok(reflect(u1).mm(&reflect(u2)))
}

/// `v ↦ v − 2|ψ⟩⟨ψ|v⟩` in place.
fn reflect_about(psi: &[Cx<f64>], v: &mut [Cx<f64>]) {
    let p = inner(psi, v) * 2.0;
    for (x, y) in v.iter_mut().zip(psi) {
        *x -= p * y;
    }
}

/// Success probabilities `|⟨S₂|(−U_G)^m|S₁⟩|² = sin²((2m+1)θ)` for each
/// power, obtained by applying the reflections to the state vector. `U_G`
/// reflects about `|S₂⟩` first, so the rotation starts from `|S₁⟩`.
pub(crate) fn grover_probabilities(psi1: &[Cx<f64>], psi2: &[Cx<f64>], powers: &[u64]) -> Vec<f64> {
    let mut v = psi1.to_vec();
    let mut done = 0u64;
    let mut sorted: Vec<(usize, u64)> = powers.iter().copied().enumerate().collect();
    sorted.sort_by_key(|&(_, m)| m);
    let mut probs = vec![0.0; powers.len()];
    for (slot, m) in sorted {
        while done < m {
            reflect_about(psi2, &mut v);
            reflect_about(psi1, &mut v);
            for x in v.iter_mut() {
                *x = -*x;
            }
            done += 1;
        }
        probs[slot] = inner(psi2, &v).norm_sqr().clamp(0.0, 1.0);
    }
    probs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbe::hadamard;
    use crate::linalg::normal_eigenvalues;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unitary(q: usize, rng: &mut ChaCha8Rng) -> Operator {
        let d = 1 << q;
        let m = Operator::from_fn(d, d, |_, _| cx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let h = m.add(&m.adjoint()).unwrap();
        crate::linalg::expm(&h.scale(cx(0.0, 1.0))).unwrap()
    }

    /// Eigenphases of `−U_G` outside the complement where it acts as `−I`.
    fn rotation_phases(ug: &Operator) -> Vec<f64> {
        let mut ph: Vec<f64> = normal_eigenvalues(&ug.scale(cx(-1.0, 0.0)))
            .unwrap()
            .iter()
            .map(|z| z.arg())
            .filter(|a| (a.abs() - std::f64::consts::PI).abs() > 1e-6)
            .collect();
        ph.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ph
    }

    #[test]
    fn identity_pair_squares_to_identity() {
        let id = Operator::identity(4);
        let g = grover_operator(&id, &id).unwrap();
        assert!(g.max_abs_diff(&id) < 1e-15);
    }

    #[test]
    fn hadamard_eigenphases() {
        let g = grover_operator(&Operator::identity(2), &hadamard()).unwrap();
        assert!(g.unitarity_residual() < 1e-12);
        let ph = rotation_phases(&g);
        let theta = (0.5f64).sqrt().asin();
        assert_eq!(ph.len(), 2);
        assert!((ph[0] + 2.0 * theta).abs() < 1e-9 && (ph[1] - 2.0 * theta).abs() < 1e-9);
    }

    #[test]
    fn random_eigenphases_match_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let u1 = random_unitary(2, &mut rng);
            let u2 = random_unitary(2, &mut rng);
            let g = grover_operator(&u1, &u2).unwrap();
            assert!(g.unitarity_residual() < 1e-12);
            let theta = inner(&u1.column(0), &u2.column(0)).norm().asin();
            let ph = rotation_phases(&g);
            assert_eq!(ph.len(), 2);
            assert!((ph[0] + 2.0 * theta).abs() < 1e-8, "{ph:?} vs {theta}");
            assert!((ph[1] - 2.0 * theta).abs() < 1e-8);
        }
    }

    #[test]
    fn probabilities_follow_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u1 = random_unitary(3, &mut rng);
        let u2 = random_unitary(3, &mut rng);
        let theta = inner(&u1.column(0), &u2.column(0)).norm().asin();
        let powers = [4, 0, 1, 2];
        let p = grover_probabilities(&u1.column(0), &u2.column(0), &powers);
        for (m, pm) in powers.iter().zip(&p) {
            let want = ((2 * m + 1) as f64 * theta).sin().powi(2);
            assert!((pm - want).abs() < 1e-12);
        }
    }
}
