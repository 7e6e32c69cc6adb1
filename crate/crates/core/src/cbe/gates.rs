use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cbe::channel::{CbeChannel, CbePair};
use crate::error::{Error, Result};
use crate::limits::check_dense_dim;
use crate::linalg::{embed, DenseOperator};
use crate::scalar::{Cx, Real};

fn c<T: Real>(re: f64, im: f64) -> Cx<T> {
    Cx::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
}

fn m2<T: Real>(a: [[(f64, f64); 2]; 2]) -> DenseOperator<T> {
    DenseOperator::from_fn(2, 2, |r, k| c(a[r][k].0, a[r][k].1))
}

pub fn pauli_i<T: Real>() -> DenseOperator<T> {
    DenseOperator::identity(2)
}

pub fn pauli_x<T: Real>() -> DenseOperator<T> {
    m2([[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]])
}

pub fn pauli_y<T: Real>() -> DenseOperator<T> {
    m2([[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]])
}

pub fn pauli_z<T: Real>() -> DenseOperator<T> {
    m2([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]])
}

pub fn hadamard<T: Real>() -> DenseOperator<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    m2([[(h, 0.0), (h, 0.0)], [(h, 0.0), (-h, 0.0)]])
}

pub fn phase_s<T: Real>() -> DenseOperator<T> {
    m2([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, 1.0)]])
}

pub fn phase_t<T: Real>() -> DenseOperator<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    m2([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (h, h)]])
}

/// CNOT with the first qubit as control.
pub fn cnot<T: Real>() -> DenseOperator<T> {
    DenseOperator::from_fn(4, 4, |r, k| {
        let target = if k >= 2 { k ^ 1 } else { k };
        if r == target {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `H^{⊗n}`.
pub fn hadamard_all<T: Real>(n: usize) -> Result<DenseOperator<T>> {
    check_dense_dim(1 << n)?;
    let s = T::one() / T::from_usize(1usize << n).expect("dim").sqrt();
    Ok(DenseOperator::from_fn(1 << n, 1 << n, |r, k| {
        if (r & k).count_ones() % 2 == 1 {
            Cx::new(-s, T::zero())
        } else {
            Cx::new(s, T::zero())
        }
    }))
}

/// Elementary gates with a tabulated optimal CBE.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableGate {
    X,
    Y,
    Z,
    H,
    /// `H S H`
    Hsh,
    /// `H T H`
    Hth,
    /// `(H⊗H) CNOT (H⊗H)`
    HhCnotHh,
}

impl TableGate {
    pub const ALL: [TableGate; 7] = [
        TableGate::X,
        TableGate::Y,
        TableGate::Z,
        TableGate::H,
        TableGate::Hsh,
        TableGate::Hth,
        TableGate::HhCnotHh,
    ];

    pub fn num_qubits(self) -> usize {
        if self == TableGate::HhCnotHh {
            2
        } else {
            1
        }
    }

    pub fn unitary<T: Real>(self) -> DenseOperator<T> {
        let h = hadamard::<T>();
        match self {
            TableGate::X => pauli_x(),
            TableGate::Y => pauli_y(),
            TableGate::Z => pauli_z(),
            TableGate::H => h,
            TableGate::Hsh => h.mm(&phase_s()).mm(&h),
            TableGate::Hth => h.mm(&phase_t()).mm(&h),
            TableGate::HhCnotHh => {
                let hh = h.kron(&h);
                hh.mm(&cnot()).mm(&hh)
            }
        }
    }

    /// The tabulated `η`: `1/√2` for `H`, one otherwise.
    pub fn eta(self) -> f64 {
        if self == TableGate::H {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        }
    }
}

/// `(I, ½[[1+w, 1−w], [1−w, 1+w]]*)/√2` and `(X, ½[[1−w, 1+w], [1+w, 1−w]]*)/√2`.
///
/// The lower blocks are stored conjugated: with `M = Σ K⊗L*` the
/// unconjugated blocks would encode `H S† H` (resp. `H T† H`).
fn phase_pairs<T: Real>(w: Cx<f64>) -> Vec<CbePair<T>> {
    let w = w.conj();
    let one = Cx::new(1.0, 0.0);
    let (p, m) = (one + w, one - w);
    let h = |z: Cx<f64>| (0.5 * z.re, 0.5 * z.im);
    let a = m2::<T>([[h(p), h(m)], [h(m), h(p)]]);
    let b = m2::<T>([[h(m), h(p)], [h(p), h(m)]]);
    let s = T::from_f64_lossy(std::f64::consts::FRAC_1_SQRT_2);
    vec![
        CbePair::new(pauli_i::<T>().scale_real(s), a.scale_real(s)),
        CbePair::new(pauli_x::<T>().scale_real(s), b.scale_real(s)),
    ]
}

/// The optimal Kraus pairs for `gate`.
pub fn gate_cbe<T: Real>(gate: TableGate) -> CbeChannel<T> {
    let (i, x, y, z) = (pauli_i::<T>(), pauli_x::<T>(), pauli_y::<T>(), pauli_z::<T>());
    let neg = |m: &DenseOperator<T>| m.scale_real(-T::one());
    let pairs = match gate {
        TableGate::X => vec![CbePair::new(i, x)],
        TableGate::Y => vec![CbePair::new(z, neg(&y))],
        TableGate::Z => vec![CbePair::new(z.clone(), z)],
        TableGate::H => {
            let half = T::from_f64_lossy(0.5);
            [(&i, &x), (&z, &z), (&x, &i), (&y, &y)]
                .into_iter()
                .map(|(k, l)| CbePair::new(k.scale_real(half), l.scale_real(half)))
                .collect()
        }
        TableGate::Hsh => phase_pairs(Cx::new(0.0, 1.0)),
        TableGate::Hth => phase_pairs(Cx::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
        // C = H⊗H·CNOT·H⊗H maps the I/X words onto I/X words by a basis
        // permutation, so S ↦ C S C† alone is an η = 1 strong CBE of C.
        TableGate::HhCnotHh => {
            let c = gate.unitary::<T>();
            vec![CbePair::new(c.clone(), c)]
        }
    };
    CbeChannel::new(pairs, T::from_f64_lossy(gate.eta()), gate.unitary()).expect("tabulated sets are CPTP")
}

/// Gate alphabet of circuits handed to the compiler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateName {
    H,
    S,
    T,
    #[serde(rename = "CNOT")]
    Cnot,
}

impl GateName {
    pub fn arity(self) -> usize {
        if self == GateName::Cnot {
            2
        } else {
            1
        }
    }

    pub fn unitary<T: Real>(self) -> DenseOperator<T> {
        match self {
            GateName::H => hadamard(),
            GateName::S => phase_s(),
            GateName::T => phase_t(),
            GateName::Cnot => cnot(),
        }
    }

    /// Table entry for `H^{⊗k} g H^{⊗k}`.
    pub fn conjugated(self) -> TableGate {
        match self {
            GateName::H => TableGate::H,
            GateName::S => TableGate::Hsh,
            GateName::T => TableGate::Hth,
            GateName::Cnot => TableGate::HhCnotHh,
        }
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(GateName::H),
            "S" => Ok(GateName::S),
            "T" => Ok(GateName::T),
            "CNOT" => Ok(GateName::Cnot),
            other => Err(Error::Parse(format!("unsupported gate {other:?}"))),
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateName::H => "H",
            GateName::S => "S",
            GateName::T => "T",
            GateName::Cnot => "CNOT",
        })
    }
}

/// A gate applied to `qubits` (control first for CNOT). Serialised as
/// `{"g": "H", "q": [0]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    #[serde(rename = "g")]
    pub name: GateName,
    #[serde(rename = "q")]
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(name: GateName, qubits: Vec<usize>) -> Self {
        Gate { name, qubits }
    }

    pub fn h(q: usize) -> Self {
        Gate::new(GateName::H, vec![q])
    }

    pub fn s(q: usize) -> Self {
        Gate::new(GateName::S, vec![q])
    }

    pub fn t(q: usize) -> Self {
        Gate::new(GateName::T, vec![q])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::new(GateName::Cnot, vec![control, target])
    }
}

pub fn check_gates(gates: &[Gate], n: usize) -> Result<()> {
    for (i, g) in gates.iter().enumerate() {
        if g.qubits.len() != g.name.arity() {
            return Err(Error::InvalidArgument(format!(
                "gate {i} ({}) needs {} qubit(s), got {}",
                g.name,
                g.name.arity(),
                g.qubits.len()
            )));
        }
        if let Some(&q) = g.qubits.iter().find(|&&q| q >= n) {
            return Err(Error::IndexOutOfRange { index: q, size: n });
        }
        if g.qubits.len() == 2 && g.qubits[0] == g.qubits[1] {
            return Err(Error::InvalidArgument(format!("gate {i}: control equals target")));
        }
    }
    Ok(())
}

/// `U = G_last ··· G_first` on `n` qubits.
pub fn circuit_unitary<T: Real>(gates: &[Gate], n: usize) -> Result<DenseOperator<T>> {
    check_gates(gates, n)?;
    check_dense_dim(1 << n)?;
    let mut u = DenseOperator::identity(1 << n);
    for g in gates {
        u = embed(&g.name.unitary(), &g.qubits, n)?.mm(&u);
    }
    Ok(u)
}

/// Gate list of `U†`: reversed, with `S† = S³` and `T† = T⁷`.
pub fn adjoint_gates(gates: &[Gate]) -> Vec<Gate> {
    gates
        .iter()
        .rev()
        .flat_map(|g| {
            let reps = match g.name {
                GateName::H | GateName::Cnot => 1,
                GateName::S => 3,
                GateName::T => 7,
            };
            std::iter::repeat(g.clone()).take(reps)
        })
        .collect()
}

/// Number of Hadamard gates `n_h`.
pub fn hadamard_count(gates: &[Gate]) -> usize {
    gates.iter().filter(|g| g.name == GateName::H).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbe::channel::verify_cbe;
    use crate::cbe::pqc::ub_tensor;

    #[test]
    fn table_entries_verify() {
        for g in TableGate::ALL {
            let c = gate_cbe::<f64>(g);
            let v = verify_cbe(&c);
            assert!(v.cptp_residual_k <= 1e-12 && v.cptp_residual_l <= 1e-12, "{g:?}");
            assert!(v.residual <= 1e-12, "{g:?}: {}", v.residual);
            assert!(v.strong_residual.unwrap() <= 1e-12, "{g:?}");
            assert!(v.passed());
            assert!((c.eta() - g.eta()).abs() < 1e-15);
            assert!(c.transfer_matrix().max_abs_diff(&c.transfer_matrix_dense().unwrap()) < 1e-13);
        }
        assert_eq!(gate_cbe::<f64>(TableGate::H).pairs().len(), 4);
        assert_eq!(gate_cbe::<f64>(TableGate::HhCnotHh).pairs().len(), 1);
        let y = gate_cbe::<f64>(TableGate::Y);
        assert_eq!(y.pairs()[0].k, pauli_z());
        assert_eq!(y.pairs()[0].l, pauli_y::<f64>().scale_real(-1.0));
    }

    #[test]
    fn full_conjugation_is_block_of_gate() {
        // U_B Σ K⊗L* U_B† = |0⟩⟨0| ⊗ ηQ, which implies the strong property
        let mut proj = DenseOperator::<f64>::zeros(2);
        proj[(0, 0)] = Cx::new(1.0, 0.0);
        for g in [TableGate::H, TableGate::Hsh, TableGate::Hth, TableGate::HhCnotHh] {
            let c = gate_cbe::<f64>(g);
            let k = g.num_qubits();
            let w = ub_tensor::<f64>(k).unwrap();
            let lhs = w.mm(&c.mixture().unwrap()).mm(&w.adjoint());
            if k == 1 {
                let rhs = proj.kron(&g.unitary::<f64>().scale_real(g.eta()));
                assert!(lhs.max_abs_diff(&rhs) < 1e-12, "{g:?}");
            } else {
                // unitary, so block diagonal rather than a projector
                let top = lhs.block(0, 0, 4, 16);
                assert!(top.block(0, 0, 4, 4).max_abs_diff(&g.unitary()) < 1e-12);
                assert!(top.block(0, 4, 4, 12).max_abs() < 1e-12);
                assert!(lhs.block(4, 0, 12, 4).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eight_pauli_pairs_cannot_encode_cnot() {
        // Each Pauli pair contributes one Pauli word of weight 1/8 to the
        // transfer matrix, but Q = ½(II + IZ + XI − XZ) needs total weight 2.
        let (i, x, y, z) = (pauli_i::<f64>(), pauli_x::<f64>(), pauli_y::<f64>(), pauli_z::<f64>());
        let my = y.scale_real(-1.0);
        let rows = [
            (&i, &i, &i, &i),
            (&i, &x, &i, &x),
            (&z, &i, &x, &i),
            (&z, &x, &x, &x),
            (&x, &i, &z, &i),
            (&x, &x, &z, &x),
            (&y, &i, &my, &i),
            (&y, &x, &my, &x),
        ];
        let w = 1.0 / (2.0 * std::f64::consts::SQRT_2);
        let pairs = rows
            .iter()
            .map(|(a, b, c, d)| CbePair::new(a.kron(b).scale_real(w), c.kron(d).scale_real(w)))
            .collect();
        let c = CbeChannel::new(pairs, 1.0, TableGate::HhCnotHh.unitary()).unwrap();
        assert!(!verify_cbe(&c).is_cbe);
    }

    #[test]
    fn single_pair_identities() {
        let w = ub_tensor::<f64>(1).unwrap();
        let i2 = pauli_i::<f64>();
        for (a, b, q) in [
            (pauli_i::<f64>(), pauli_x::<f64>(), pauli_x::<f64>()),
            (pauli_z(), pauli_y(), pauli_y()),
            (pauli_z(), pauli_z(), pauli_z()),
        ] {
            let lhs = w.mm(&a.kron(&b)).mm(&w.adjoint());
            assert!(lhs.max_abs_diff(&i2.kron(&q)) < 1e-14);
        }
    }

    #[test]
    fn adjoints_and_unitaries() {
        let gates = vec![Gate::h(0), Gate::cnot(0, 1), Gate::t(1), Gate::s(0)];
        let u = circuit_unitary::<f64>(&gates, 2).unwrap();
        let ud = circuit_unitary::<f64>(&adjoint_gates(&gates), 2).unwrap();
        assert!(ud.max_abs_diff(&u.adjoint()) < 1e-13);
        assert!(phase_t::<f64>().powi(2).max_abs_diff(&phase_s()) < 1e-15);
        assert!(check_gates(&[Gate::cnot(1, 1)], 2).is_err());
        assert!(check_gates(&[Gate::h(2)], 2).is_err());
        assert!("RX".parse::<GateName>().is_err());
        let json = serde_json::to_string(&Gate::cnot(0, 1)).unwrap();
        assert_eq!(json, r#"{"g":"CNOT","q":[0,1]}"#);
    }
}
