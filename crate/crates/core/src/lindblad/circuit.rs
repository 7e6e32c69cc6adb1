use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{check_statevector_qubits, Limits};
use crate::lindblad::spec::DissipativeLindbladSpec;
use crate::lindblad::taylor::{kraus_count, TruncationPlan};
use crate::linalg::{DenseOperator, norm};
use crate::pauli::{ceil_log2, decode_binary, encode_binary, BlockDiagPauli, PauliBinaryCode};
use crate::scalar::{Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitMode {
    /// Sequential controlled jumps, depth linear in `K`.
    Theorem1,
    /// Parallel binary encoding, tree multiplication and block application,
    /// depth logarithmic in `K`.
    Theorem2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

/// Abstract gates of the purification. Jump slots `k` count from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum GateKind {
    /// `U_T` on register `a`: unary encoding of the truncation order.
    PrepareTaylor,
    /// `U_g` on `b_k`, controlled by qubit `a_k`.
    PrepareJump { k: usize },
    /// `U_{F,k}`: applies `F_{b_k}` to the system when `b_k ≠ 0`.
    SelectJump { k: usize },
    /// `V_F`: writes the binary code of `F_{b_k}` into `c_k`.
    EncodeJump { k: usize },
    /// `U_P`: `out ← code(left · right)` over code registers.
    MultiplyCodes { left: usize, right: usize, out: usize },
    /// One controlled-Pauli layer of `T_F`: block `block` of the operator
    /// held in register `code`.
    ApplyBlock { block: usize, code: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitGate {
    pub kind: GateKind,
    /// Register ids touched, for reporting.
    pub registers: Vec<usize>,
    /// Depth cost of the gate.
    pub weight: usize,
    /// Start time in the as-soon-as-possible schedule.
    pub start: usize,
}

/// Query and width accounting of an emitted circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceTally {
    pub order: usize,
    pub num_jumps: usize,
    pub num_blocks: usize,
    pub block_qubits: usize,
    pub queries_ug: usize,
    pub queries_uf: usize,
    pub queries_vf: usize,
    pub queries_up: usize,
    pub queries_tf: usize,
    pub depth: usize,
    pub tree_depth: usize,
    /// Ancillas actually allocated by this construction.
    pub ancillas_as_constructed: usize,
    /// `K + K⌈log2(M+1)⌉`, plus `8RnK` in theorem-2 mode.
    pub ancillas_stated_formula: usize,
    pub total_qubits: usize,
}

#[derive(Clone, Debug)]
pub struct PurifiedCircuit<T: Real> {
    pub mode: CircuitMode,
    pub plan: TruncationPlan,
    spec: DissipativeLindbladSpec<T>,
    pub registers: Vec<Register>,
    pub gates: Vec<CircuitGate>,
    pub tally: ResourceTally,
    system: usize,
}

/// Qubit count of each `b_k` register.
pub fn jump_index_width(m: usize) -> usize {
    ceil_log2(m + 1)
}

struct Builder {
    registers: Vec<Register>,
    gates: Vec<CircuitGate>,
    ready: Vec<usize>,
}

impl Builder {
    fn register(&mut self, name: String, width: usize) -> usize {
        let offset = self.registers.last().map_or(0, |r| r.offset + r.width);
        self.registers.push(Register { name, offset, width });
        self.registers.len() - 1
    }

    fn wires(&self, id: usize) -> std::ops::Range<usize> {
        let r = &self.registers[id];
        r.offset..r.offset + r.width
    }

    fn gate(&mut self, kind: GateKind, registers: Vec<usize>, extra_wires: &[usize], weight: usize) {
        let mut wires: Vec<usize> = registers.iter().flat_map(|&r| self.wires(r)).collect();
        wires.extend_from_slice(extra_wires);
        if self.ready.len() < self.registers.last().map_or(0, |r| r.offset + r.width) {
            self.ready.resize(self.registers.last().map_or(0, |r| r.offset + r.width), 0);
        }
        let start = wires.iter().map(|&w| self.ready[w]).max().unwrap_or(0);
        for &w in &wires {
            self.ready[w] = start + weight;
        }
        self.gates.push(CircuitGate {
            kind,
            registers,
            weight,
            start,
        });
    }
}

pub fn build_purified_circuit<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    t: f64,
    epsilon: f64,
    mode: CircuitMode,
) -> Result<PurifiedCircuit<T>> {
    let plan = TruncationPlan::for_spec(spec, t, epsilon)?;
    build_purified_circuit_with_plan(spec, plan, mode)
}

/// Gate weights: `U_T` 1; `U_g`, `U_{F,k}` and `V_F` `M` each (an
/// `(M+1)`-way select); one `U_P` tree level 1; each `T_F` block 1.
pub fn build_purified_circuit_with_plan<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    plan: TruncationPlan,
    mode: CircuitMode,
) -> Result<PurifiedCircuit<T>> {
    let k_order = plan.order;
    let m = spec.num_jumps();
    let wb = jump_index_width(m);
    let (r, nb) = match mode {
        CircuitMode::Theorem1 => (spec.num_blocks().unwrap_or(1), spec.num_qubits()),
        CircuitMode::Theorem2 => {
            let jumps = spec
                .pauli_jumps()
                .ok_or_else(|| Error::InvalidArgument("theorem-2 circuits need block-diagonal Pauli jumps".into()))?;
            (jumps[0].num_blocks(), jumps[0].num_qubits())
        }
    };
    let code_width = 4 * r * nb;

    let mut b = Builder {
        registers: Vec::new(),
        gates: Vec::new(),
        ready: Vec::new(),
    };
    let a = b.register("a".into(), k_order);
    let bk: Vec<usize> = (1..=k_order).map(|k| b.register(format!("b{k}"), wb)).collect();
    let ck: Vec<usize> = match mode {
        CircuitMode::Theorem1 => Vec::new(),
        CircuitMode::Theorem2 => (1..=k_order).map(|k| b.register(format!("c{k}"), code_width)).collect(),
    };

    let mut tree_regs = Vec::new();
    let mut tree_depth = 0;
    if mode == CircuitMode::Theorem2 && k_order > 0 {
        // Leaves c_K … c_1 so the reduction yields F_{i_K}···F_{i_1}.
        let mut level: Vec<usize> = ck.iter().rev().copied().collect();
        let mut pending = Vec::new();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                match *pair {
                    [l, rgt] => {
                        let out = b.register(format!("t{}", tree_regs.len() + 1), code_width);
                        tree_regs.push(out);
                        pending.push((l, rgt, out));
                        next.push(out);
                    }
                    [single] => next.push(single),
                    _ => unreachable!(),
                }
            }
            level = next;
            tree_depth += 1;
        }
        let system = b.register("system".into(), spec.num_qubits());
        emit_theorem2(&mut b, a, &bk, &ck, &pending, level[0], system, k_order, m, r);
    } else {
        let system = b.register("system".into(), spec.num_qubits());
        if k_order > 0 {
            b.gate(GateKind::PrepareTaylor, vec![a], &[], 1);
            for k in 1..=k_order {
                let ak = b.registers[a].offset + k - 1;
                b.gate(GateKind::PrepareJump { k }, vec![bk[k - 1]], &[ak], m);
            }
            if mode == CircuitMode::Theorem1 {
                for k in 1..=k_order {
                    b.gate(GateKind::SelectJump { k }, vec![bk[k - 1], system], &[], m);
                }
            }
        }
    }
    let system = b.registers.len() - 1;
    let depth = b.gates.iter().map(|g| g.start + g.weight).max().unwrap_or(0);
    let total_qubits = b.registers.last().map_or(0, |r| r.offset + r.width);
    let ancillas = total_qubits - spec.num_qubits();
    let mut stated = k_order + k_order * wb;
    if mode == CircuitMode::Theorem2 {
        stated += 8 * r * nb * k_order;
    }
    let theorem2 = mode == CircuitMode::Theorem2;
    let tally = ResourceTally {
        order: k_order,
        num_jumps: m,
        num_blocks: r,
        block_qubits: nb,
        queries_ug: k_order,
        queries_uf: if theorem2 { 0 } else { k_order },
        queries_vf: if theorem2 { k_order } else { 0 },
        queries_up: tree_regs.len(),
        queries_tf: usize::from(theorem2 && k_order > 0),
        depth,
        tree_depth,
        ancillas_as_constructed: ancillas,
        ancillas_stated_formula: stated,
        total_qubits,
    };
    Ok(PurifiedCircuit {
        mode,
        plan,
        spec: spec.clone(),
        registers: b.registers,
        gates: b.gates,
        tally,
        system,
    })
}

#[allow(clippy::too_many_arguments)]
fn emit_theorem2(
    b: &mut Builder,
    a: usize,
    bk: &[usize],
    ck: &[usize],
    products: &[(usize, usize, usize)],
    root: usize,
    system: usize,
    k_order: usize,
    m: usize,
    r: usize,
) {
    b.gate(GateKind::PrepareTaylor, vec![a], &[], 1);
    for k in 1..=k_order {
        let ak = b.registers[a].offset + k - 1;
        b.gate(GateKind::PrepareJump { k }, vec![bk[k - 1]], &[ak], m);
    }
    for k in 1..=k_order {
        b.gate(GateKind::EncodeJump { k }, vec![bk[k - 1], ck[k - 1]], &[], m);
    }
    for &(left, right, out) in products {
        b.gate(GateKind::MultiplyCodes { left, right, out }, vec![left, right, out], &[], 1);
    }
    for block in 0..r {
        b.gate(GateKind::ApplyBlock { block, code: root }, vec![root, system], &[], 1);
    }
}

fn bits_to_int(bits: &[bool]) -> usize {
    bits.iter().fold(0usize, |acc, &x| (acc << 1) | x as usize)
}

fn int_to_bits(v: usize, width: usize) -> Vec<bool> {
    (0..width).rev().map(|j| (v >> j) & 1 == 1).collect()
}

/// Register `a` is always allocated first.
const A_REG: usize = 0;

type Branches<T> = BTreeMap<Vec<Vec<bool>>, Vec<Cx<T>>>;

impl<T: Real> PurifiedCircuit<T> {
    pub fn depth(&self) -> usize {
        self.tally.depth
    }

    pub fn spec(&self) -> &DissipativeLindbladSpec<T> {
        &self.spec
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    /// Gates grouped by start time.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut by_start: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.gates.iter().enumerate() {
            by_start.entry(g.start).or_default().push(i);
        }
        by_start.into_values().collect()
    }

    /// Runs the circuit on `|0…0⟩_anc |ψ0⟩` and traces out the ancillas.
    ///
    /// Every gate maps computational-basis ancilla labels to basis labels,
    /// so the joint state is kept as a map from ancilla label to the
    /// attached (unnormalised) system vector.
    pub fn execute(&self, psi0: &[Cx<T>]) -> Result<DenseOperator<T>> {
        check_statevector_qubits(self.spec.num_qubits())?;
        let cap = Limits::current().max_kraus;
        let branches = kraus_count(self.spec.num_jumps(), self.plan.order);
        if branches > cap as f64 {
            return Err(Error::EnumerationCap { count: branches, cap });
        }
        if psi0.len() != self.spec.dim() || (norm(psi0) - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::InvalidArgument("input must be a normalised system state".into()));
        }
        let dense = self.spec.dense_jumps()?;
        let probs: Vec<T> = self.spec.probabilities();
        let codes: Vec<PauliBinaryCode> = match self.spec.pauli_jumps() {
            Some(j) => j.into_iter().map(encode_binary).collect(),
            None => Vec::new(),
        };
        let identity_code = self
            .spec
            .pauli_jumps()
            .map(|j| encode_binary(&BlockDiagPauli::identity(j[0].num_blocks(), j[0].num_qubits())));

        let anc: Vec<Vec<bool>> = self
            .registers
            .iter()
            .enumerate()
            .map(|(i, r)| if i == self.system { Vec::new() } else { vec![false; r.width] })
            .collect();
        let mut state: Branches<T> = BTreeMap::new();
        state.insert(anc, psi0.to_vec());

        let fresh = |bits: &[bool], what: &str| -> Result<()> {
            if bits.iter().any(|&x| x) {
                return Err(Error::InvalidArgument(format!("{what} acts on a non-fresh register")));
            }
            Ok(())
        };

        for gate in &self.gates {
            let mut next: Branches<T> = BTreeMap::new();
            let mut push = |key: Vec<Vec<bool>>, psi: Vec<Cx<T>>| {
                match next.get_mut(&key) {
                    Some(v) => v.iter_mut().zip(&psi).for_each(|(a, b)| *a += b),
                    None => {
                        next.insert(key, psi);
                    }
                }
            };
            for (key, psi) in state {
                match &gate.kind {
                    GateKind::PrepareTaylor => {
                        let a = gate.registers[0];
                        fresh(&key[a], "U_T")?;
                        for (k, &w) in self.plan.weights.iter().enumerate() {
                            if w == 0.0 {
                                continue;
                            }
                            let mut nk = key.clone();
                            nk[a] = (0..self.plan.order).map(|j| j < k).collect();
                            let s = T::from_f64_lossy(w.sqrt());
                            push(nk, psi.iter().map(|z| z * s).collect());
                        }
                    }
                    GateKind::PrepareJump { k } => {
                        let b = gate.registers[0];
                        if key[A_REG][k - 1] {
                            fresh(&key[b], "U_g")?;
                            for (i, &p) in probs.iter().enumerate() {
                                if p == T::zero() {
                                    continue;
                                }
                                let mut nk = key.clone();
                                nk[b] = int_to_bits(i + 1, self.registers[b].width);
                                let s = p.sqrt();
                                push(nk, psi.iter().map(|z| z * s).collect());
                            }
                        } else {
                            push(key, psi);
                        }
                    }
                    GateKind::SelectJump { .. } => {
                        let i = bits_to_int(&key[gate.registers[0]]);
                        let out = if i == 0 { psi } else { dense[i - 1].apply(&psi)? };
                        push(key, out);
                    }
                    GateKind::EncodeJump { .. } => {
                        let (b, c) = (gate.registers[0], gate.registers[1]);
                        fresh(&key[c], "V_F")?;
                        let i = bits_to_int(&key[b]);
                        let code = if i == 0 {
                            identity_code.clone().expect("Pauli spec")
                        } else {
                            codes[i - 1].clone()
                        };
                        let mut nk = key;
                        nk[c] = code.bits().to_vec();
                        push(nk, psi);
                    }
                    GateKind::MultiplyCodes { left, right, out } => {
                        fresh(&key[*out], "U_P")?;
                        let r = self.tally.num_blocks;
                        let l = decode_register(&key[*left], r)?;
                        let rr = decode_register(&key[*right], r)?;
                        let mut nk = key;
                        nk[*out] = encode_binary(&l.multiply(&rr)?).bits().to_vec();
                        push(nk, psi);
                    }
                    GateKind::ApplyBlock { block, code } => {
                        let f = decode_register(&key[*code], self.tally.num_blocks)?;
                        let sub = 1usize << f.num_qubits();
                        let mut out = psi;
                        let slice = &mut out[block * sub..(block + 1) * sub];
                        let mut tmp = vec![Cx::new(T::zero(), T::zero()); sub];
                        f.block(*block).apply_into(slice, &mut tmp);
                        slice.copy_from_slice(&tmp);
                        push(key, out);
                    }
                }
            }
            state = next;
        }
        let d = self.spec.dim();
        let mut rho = DenseOperator::zeros(d);
        for psi in state.values() {
            rho.add_scaled(Cx::new(T::one(), T::zero()), &DenseOperator::outer(psi, psi));
        }
        Ok(rho)
    }
}

fn decode_register(bits: &[bool], blocks: usize) -> Result<BlockDiagPauli> {
    let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    decode_binary(&PauliBinaryCode::parse(&s, blocks)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::taylor::build_taylor_channel_with_plan;
    use crate::linalg::DensityMatrix;
    use crate::scalar::cx;

    fn pauli_spec() -> DissipativeLindbladSpec<f64> {
        DissipativeLindbladSpec::pauli(vec![
            (1.0, BlockDiagPauli::parse(&["X", "-Z"]).unwrap()),
            (0.5, BlockDiagPauli::parse(&["+iY", "X"]).unwrap()),
            (0.25, BlockDiagPauli::parse(&["Z", "Z"]).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn minimal_circuit() {
        let spec = DissipativeLindbladSpec::<f64>::pauli(vec![(1.0, BlockDiagPauli::parse(&["X"]).unwrap())]).unwrap();
        let plan = TruncationPlan::with_order(0.1, 1, 1e-2);
        let c1 = build_purified_circuit_with_plan(&spec, plan.clone(), CircuitMode::Theorem1).unwrap();
        // U_T, then U_g (1), then U_F (1).
        assert_eq!(c1.depth(), 3);
        assert_eq!(c1.tally.ancillas_as_constructed, 2);
        let c2 = build_purified_circuit_with_plan(&spec, plan, CircuitMode::Theorem2).unwrap();
        // U_T, U_g, V_F, one T_F block.
        assert_eq!(c2.depth(), 4);
        assert_eq!(c2.tally.ancillas_as_constructed, 2 + 4);
    }

    #[test]
    fn theorem2_tree_and_tf_depth() {
        let spec = pauli_spec();
        let plan = TruncationPlan::with_order(1.0, 8, 1e-3);
        let c = build_purified_circuit_with_plan(&spec, plan, CircuitMode::Theorem2).unwrap();
        assert_eq!(c.tally.tree_depth, 3);
        assert_eq!(c.tally.queries_up, 7);
        assert_eq!(c.depth(), 1 + 2 * 3 + 3 + 2);
        let tf: Vec<_> = c.gates.iter().filter(|g| matches!(g.kind, GateKind::ApplyBlock { .. })).collect();
        assert_eq!(tf.len(), 2);
        assert_eq!(tf[1].start - tf[0].start, 1);
        assert_eq!(c.tally.ancillas_stated_formula, 8 + 8 * 2 + 8 * 2 * 1 * 8);
    }

    #[test]
    fn theorem1_depth_is_linear() {
        let spec = pauli_spec();
        for k in [1usize, 2, 5, 9] {
            let plan = TruncationPlan::with_order(1.0, k, 1e-3);
            let c = build_purified_circuit_with_plan(&spec, plan, CircuitMode::Theorem1).unwrap();
            assert_eq!(c.depth(), 1 + 3 + 3 * k);
        }
    }

    #[test]
    fn execution_matches_taylor_channel() {
        let spec = pauli_spec();
        let plan = TruncationPlan::with_order(spec.dimensionless_time(0.4), 3, 1e-2);
        let psi = vec![cx(0.5, 0.0), cx(0.0, 0.5), cx(-0.5, 0.0), cx(0.5, 0.0)];
        let want = build_taylor_channel_with_plan(&spec, &plan)
            .unwrap()
            .apply(&DensityMatrix::from_pure(&psi))
            .unwrap();
        for mode in [CircuitMode::Theorem1, CircuitMode::Theorem2] {
            let c = build_purified_circuit_with_plan(&spec, plan.clone(), mode).unwrap();
            let got = c.execute(&psi).unwrap();
            assert!(got.max_abs_diff(want.matrix()) < 1e-12, "{mode:?}");
        }
    }

    #[test]
    fn theorem2_needs_pauli_jumps() {
        let x = DenseOperator::<f64>::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let spec = DissipativeLindbladSpec::dense(1, vec![(1.0, x)]).unwrap();
        assert!(build_purified_circuit(&spec, 1.0, 1e-3, CircuitMode::Theorem2).is_err());
        assert!(build_purified_circuit(&spec, 1.0, 1e-3, CircuitMode::Theorem1).is_ok());
    }
}
