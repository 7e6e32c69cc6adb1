use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{embed, Operator};
use crate::scalar::{cx, Cx};

/// Which part of `⟨S₁|S₂⟩` a Hadamard test exposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Real,
    Imag,
}

/// Two unitaries on `b ⊗ a ⊗ system` (projection ancilla `b`, Hadamard-test
/// ancilla `a`) with `⟨0|V₁†V₂|0⟩ = (1 + Re⟨S₁|S₂⟩)/2`, or `Im` for the
/// imaginary variant.
#[derive(Clone, Debug)]
pub struct HadamardEmbedding {
    pub part: Part,
    pub v1: Operator,
    pub v2: Operator,
}

impl HadamardEmbedding {
    pub fn num_qubits(&self) -> usize {
        self.v1.num_qubits().unwrap_or(0)
    }

    /// `⟨0|V₁†V₂|0⟩` by direct evaluation.
    pub fn amplitude(&self) -> Cx<f64> {
        let d = self.v1.dim();
        (0..d).fold(Cx::new(0.0, 0.0), |acc, r| acc + self.v1[(r, 0)].conj() * self.v2[(r, 0)])
    }
}

fn ancilla_gate(part: Part) -> Operator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match part {
        Part::Real => Operator::from_real(&[&[h, h], &[h, -h]]),
        // H · S†
        Part::Imag => Operator::from_rows(vec![vec![cx(h, 0.0), cx(0.0, -h)], vec![cx(h, 0.0), cx(0.0, h)]])
            .expect("2x2"),
    }
}

/// `I_b ⊗ P₀ + X_b ⊗ P₁` on the two ancillas: a one-ancilla block encoding
/// of the projector `(Z + I)/2` on `a`.
pub fn projector_block_encoding() -> Operator {
    // a CNOT controlled by `a` onto `b`, flipping when a = 1
    Operator::from_fn(4, 4, |r, c| {
        let (rb, ra) = (r >> 1, r & 1);
        let (cb, ca) = (c >> 1, c & 1);
        let hit = ra == ca && (if ca == 0 { rb == cb } else { rb != cb });
        if hit {
            cx(1.0, 0.0)
        } else {
            cx(0.0, 0.0)
        }
    })
}

/// Builds the Hadamard-test embedding of `⟨0|U₁†U₂|0⟩`.
pub fn hadamard_test_embed(u1: &Operator, u2: &Operator, part: Part) -> Result<HadamardEmbedding> {
    if !u1.is_square() || u1.dim() != u2.dim() || u1.num_qubits().is_none() {
        return Err(Error::Shape(format!(
            "preparations of shape {}x{} and {}x{}",
            u1.rows(),
            u1.cols(),
            u2.rows(),
            u2.cols()
        )));
    }
    let q = u1.num_qubits().expect("checked");
    let n = q + 2;
    let d = u1.dim();
    let h_a = embed(&ancilla_gate(Part::Real), &[1], n)?;
    let g_a = embed(&ancilla_gate(part), &[1], n)?;
    let mut select = Operator::zeros(2 * d);
    select.set_block(0, 0, u1);
    select.set_block(d, d, u2);
    let select = Operator::identity(2).kron(&select);
    let w = g_a.mm(&select).mm(&h_a);
    let uz = projector_block_encoding().kron(&Operator::identity(d));
    Ok(HadamardEmbedding {
        part,
        v2: uz.mm(&w),
        v1: w,
    })
}

/// State-level version of [`hadamard_test_embed`]: returns `(V₁|0⟩, V₂|0⟩)`
/// given `|S₁⟩`, `|S₂⟩` directly, for registers too wide for dense unitaries.
pub fn hadamard_test_states(s1: &[Cx<f64>], s2: &[Cx<f64>], part: Part) -> Result<(Vec<Cx<f64>>, Vec<Cx<f64>>)> {
    if s1.len() != s2.len() || !s1.len().is_power_of_two() {
        return Err(Error::Shape(format!("states of length {} and {}", s1.len(), s2.len())));
    }
    let d = s1.len();
    let g = ancilla_gate(part);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // (H_a or H_a S†_a) applied to (|0⟩S₁ + |1⟩S₂)/√2
    let mut w = vec![cx(0.0, 0.0); 2 * d];
    for i in 0..d {
        let (x0, x1) = (s1[i] * h, s2[i] * h);
        w[i] = g[(0, 0)] * x0 + g[(0, 1)] * x1;
        w[d + i] = g[(1, 0)] * x0 + g[(1, 1)] * x1;
    }
    let mut phi1 = vec![cx(0.0, 0.0); 4 * d];
    phi1[..2 * d].copy_from_slice(&w);
    // U_Z keeps the a=0 half in b=0 and moves the a=1 half to b=1
    let mut phi2 = vec![cx(0.0, 0.0); 4 * d];
    phi2[..d].copy_from_slice(&w[..d]);
    phi2[3 * d..].copy_from_slice(&w[d..]);
    Ok((phi1, phi2))
}
