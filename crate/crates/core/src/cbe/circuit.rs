use crate::cbe::channel::{compose_pairs, CbeChannel, CbePair};
use crate::cbe::gates::{check_gates, circuit_unitary, gate_cbe, hadamard_all, hadamard_count, Gate};
use crate::error::Result;
use crate::limits::check_dense_dim;
use crate::linalg::{embed, DenseOperator, DensityMatrix, KrausChannel};
use crate::scalar::Real;

/// Lifts a `k`-qubit CBE onto `targets`, tensoring `(I, I)` elsewhere.
pub fn embed_cbe<T: Real>(c: &CbeChannel<T>, targets: &[usize], n: usize) -> Result<CbeChannel<T>> {
    let pairs = c
        .pairs()
        .iter()
        .map(|p| Ok(CbePair::new(embed(&p.k, targets, n)?, embed(&p.l, targets, n)?)))
        .collect::<Result<Vec<_>>>()?;
    CbeChannel::new(pairs, c.eta(), embed(c.encoded_op(), targets, n)?)
}

/// CBE of `H^{⊗n} U H^{⊗n}` kept gate by gate, so the Kraus count stays
/// linear in the gate count.
#[derive(Clone, Debug)]
pub struct CbeCircuit<T: Real> {
    pub n: usize,
    pub gates: Vec<Gate>,
    /// ASAP layers as indices into `gates`.
    pub layers: Vec<Vec<usize>>,
    /// Per-gate CBEs lifted to `n` qubits, in application order.
    pub gate_channels: Vec<CbeChannel<T>>,
    block_channels: Vec<KrausChannel<T>>,
    pub eta: T,
    /// `H^{⊗n} U H^{⊗n}`.
    pub encoded_op: DenseOperator<T>,
    /// `U` itself.
    pub unitary: DenseOperator<T>,
}

impl<T: Real> CbeCircuit<T> {
    pub fn compile(gates: &[Gate], n: usize) -> Result<Self> {
        check_gates(gates, n)?;
        check_dense_dim(2 << n)?;
        let mut ready = vec![0usize; n];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (i, g) in gates.iter().enumerate() {
            let at = g.qubits.iter().map(|&q| ready[q]).max().unwrap_or(0);
            if layers.len() <= at {
                layers.resize(at + 1, Vec::new());
            }
            layers[at].push(i);
            for &q in &g.qubits {
                ready[q] = at + 1;
            }
        }
        let gate_channels = gates
            .iter()
            .map(|g| embed_cbe(&gate_cbe(g.name.conjugated()), &g.qubits, n))
            .collect::<Result<Vec<_>>>()?;
        let block_channels = gate_channels
            .iter()
            .map(CbeChannel::block_channel)
            .collect::<Result<Vec<_>>>()?;
        let unitary = circuit_unitary(gates, n)?;
        let had = hadamard_all(n)?;
        let encoded_op = had.mm(&unitary).mm(&had);
        let eta = T::from_f64_lossy(2f64.powf(-(hadamard_count(gates) as f64) / 2.0));
        Ok(CbeCircuit {
            n,
            gates: gates.to_vec(),
            layers,
            gate_channels,
            block_channels,
            eta,
            encoded_op,
            unitary,
        })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn num_hadamards(&self) -> usize {
        hadamard_count(&self.gates)
    }

    /// Applies the block-diagonal channels gate by gate.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        let mut out = rho.clone();
        for ch in &self.block_channels {
            out = ch.apply(&out)?;
        }
        Ok(out)
    }

    /// Product of the per-gate transfer matrices, last gate leftmost.
    pub fn transfer_product(&self) -> DenseOperator<T> {
        self.gate_channels
            .iter()
            .fold(DenseOperator::identity(1 << self.n), |acc, c| c.transfer_matrix().mm(&acc))
    }

    /// Max-entry deviation of [`CbeCircuit::transfer_product`] from `ηQ`.
    pub fn residual(&self) -> T {
        self.transfer_product().max_abs_diff(&self.encoded_op.scale_real(self.eta))
    }

    /// One channel with all pairwise products; subject to the Kraus cap.
    pub fn flatten(&self) -> Result<CbeChannel<T>> {
        let mut acc = CbeChannel::identity(self.n);
        for c in &self.gate_channels {
            acc = compose_pairs(c, &acc)?;
        }
        // Q from the dense product rather than from accumulated round-off.
        CbeChannel::new(acc.pairs().to_vec(), self.eta, self.encoded_op.clone())
    }
}

/// CBE of `H^{⊗n} U H^{⊗n}` for a circuit over `{H, S, T, CNOT}`, with
/// `η = 2^{-n_h/2}`.
pub fn compile_circuit_cbe<T: Real>(gates: &[Gate], n: usize) -> Result<CbeChannel<T>> {
    CbeCircuit::compile(gates, n)?.flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbe::channel::verify_cbe;
    use crate::cbe::gates::{hadamard_all, GateName};

    #[test]
    fn empty_circuit_is_identity() {
        let c = compile_circuit_cbe::<f64>(&[], 2).unwrap();
        assert_eq!(c.eta(), 1.0);
        assert!(c.encoded_op().max_abs_diff(&DenseOperator::identity(4)) < 1e-15);
        assert!(verify_cbe(&c).passed());
    }

    #[test]
    fn single_hadamard() {
        let c = compile_circuit_cbe::<f64>(&[Gate::h(0)], 1).unwrap();
        assert!((c.eta() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(verify_cbe(&c).passed());
    }

    #[test]
    fn two_qubit_circuit_against_dense_product() {
        let gates = [Gate::h(0), Gate::cnot(0, 1), Gate::t(1)];
        let circ = CbeCircuit::<f64>::compile(&gates, 2).unwrap();
        assert_eq!(circ.depth(), 3);
        assert!((circ.eta - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let had = hadamard_all::<f64>(2).unwrap();
        let mut u = DenseOperator::identity(4);
        for g in &gates {
            u = embed(&g.name.unitary(), &g.qubits, 2).unwrap().mm(&u);
        }
        assert!(circ.encoded_op.max_abs_diff(&had.mm(&u).mm(&had)) < 1e-14);
        assert!(circ.residual() < 1e-12);
        let flat = circ.flatten().unwrap();
        assert_eq!(flat.pairs().len(), 4 * 2);
        let v = verify_cbe(&flat);
        assert!(v.residual < 1e-12, "{v:?}");
    }

    #[test]
    fn layering_and_reversed_cnot() {
        let gates = [Gate::h(0), Gate::h(2), Gate::cnot(2, 0), Gate::s(1), Gate::t(1)];
        let circ = CbeCircuit::<f64>::compile(&gates, 3).unwrap();
        assert_eq!(circ.layers, vec![vec![0, 1, 3], vec![2, 4]]);
        assert!(circ.residual() < 1e-12);
        assert_eq!(circ.num_hadamards(), 2);
        assert!(circ.gates.iter().all(|g| g.name != GateName::H || g.qubits.len() == 1));
    }
}
