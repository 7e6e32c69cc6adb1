use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::scalar::{i_pow, Cx, Real};

/// Global phase of a Pauli string, one of `{+1, +i, -1, -i}`.
///
/// The code is the exponent of `i`: `00 = +1`, `01 = +i`, `10 = -1`,
/// `11 = -i`. Multiplication is addition in Z_4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct PauliPhase(u8);

impl PauliPhase {
    pub const ONE: PauliPhase = PauliPhase(0);
    pub const I: PauliPhase = PauliPhase(1);
    pub const MINUS_ONE: PauliPhase = PauliPhase(2);
    pub const MINUS_I: PauliPhase = PauliPhase(3);

    pub fn from_code(code: u8) -> Self {
        PauliPhase(code & 3)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn mul(self, other: PauliPhase) -> PauliPhase {
        PauliPhase((self.0 + other.0) & 3)
    }

    pub fn conj(self) -> PauliPhase {
        PauliPhase((4 - self.0) & 3)
    }

    pub fn is_real(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn to_complex<T: Real>(self) -> Cx<T> {
        i_pow(self.0)
    }

    fn prefix(self) -> &'static str {
        match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        }
    }
}

/// Single-qubit Pauli letter. The discriminant is the two-bit letter code
/// `I = 00, X = 01, Y = 10, Z = 11`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Letter {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Letter {
        Letter::ALL[(code & 3) as usize]
    }

    /// Symplectic `(x, z)` bits; `Y` carries both.
    fn xz(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_xz(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn to_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }
}

/// An `n`-qubit Pauli operator `phase * P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}`.
///
/// Letters are bit-packed in symplectic form, one `x` and one `z` bit per
/// qubit, 64 qubits per word. `Y` is the Hermitian Pauli Y (not `XZ`), so
/// the stored phase is exactly the scalar in front of the tensor product.
/// Qubit 0 is the leftmost (most significant) tensor factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    phase: PauliPhase,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        let w = words_for(num_qubits);
        PauliString {
            num_qubits,
            phase: PauliPhase::ONE,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    pub fn from_letters(phase: PauliPhase, letters: &[Letter]) -> Self {
        let mut p = PauliString::identity(letters.len());
        p.phase = phase;
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// Uniformly random letters and phase.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        let letters: Vec<Letter> = (0..num_qubits)
            .map(|_| Letter::from_code(rng.gen_range(0..4)))
            .collect();
        PauliString::from_letters(PauliPhase::from_code(rng.gen_range(0..4)), &letters)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn phase(&self) -> PauliPhase {
        self.phase
    }

    pub fn with_phase(mut self, phase: PauliPhase) -> Self {
        self.phase = phase;
        self
    }

    pub fn letter(&self, q: usize) -> Letter {
        let (w, b) = (q / 64, q % 64);
        Letter::from_xz((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set_letter(&mut self, q: usize, l: Letter) {
        assert!(q < self.num_qubits, "qubit {q} out of range");
        let (w, b) = (q / 64, q % 64);
        let (x, z) = l.xz();
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.num_qubits).map(|q| self.letter(q)).collect()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    pub fn count_y(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones())
            .sum()
    }

    /// Letter-wise product with phase accumulation, `O(n / 64)` word operations.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.num_qubits != rhs.num_qubits {
            return Err(Error::QubitMismatch {
                left: self.num_qubits,
                right: rhs.num_qubits,
            });
        }
        let mut plus = 0u32;
        let mut minus = 0u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], rhs.x[w], rhs.z[w]);
            // cyclic pairs XY, YZ, ZX pick up +i; anticyclic XZ, YX, ZY pick up -i
            let p = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
            let m = (x1 & !z1 & !x2 & z2) | (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2);
            plus += p.count_ones();
            minus += m.count_ones();
            x.push(x1 ^ x2);
            z.push(z1 ^ z2);
        }
        let k = (self.phase.0 as u32 + rhs.phase.0 as u32 + plus + 3 * minus) & 3;
        Ok(PauliString {
            num_qubits: self.num_qubits,
            phase: PauliPhase(k as u8),
            x,
            z,
        })
    }

    /// Entrywise complex conjugate: `conj(phase)` and a factor `-1` per `Y`.
    pub fn complex_conjugate(&self) -> PauliString {
        let ys = (self.count_y() & 1) as u8;
        let mut out = self.clone();
        out.phase = self.phase.conj().mul(PauliPhase(2 * ys));
        out
    }

    pub fn adjoint(&self) -> PauliString {
        let mut out = self.clone();
        out.phase = self.phase.conj();
        out
    }

    /// Negation `-P`.
    pub fn negate(&self) -> PauliString {
        let mut out = self.clone();
        out.phase = self.phase.mul(PauliPhase::MINUS_ONE);
        out
    }

    /// Bit masks over dense basis indices (qubit 0 is the most significant bit).
    pub(crate) fn dense_masks(&self) -> (usize, usize) {
        let n = self.num_qubits;
        let (mut xm, mut zm) = (0usize, 0usize);
        for q in 0..n {
            let (x, z) = self.letter(q).xz();
            let bit = 1usize << (n - 1 - q);
            if x {
                xm |= bit;
            }
            if z {
                zm |= bit;
            }
        }
        (xm, zm)
    }

    /// Writes `P |in⟩` into `out`; both slices have length `2^n`.
    pub fn apply_into<T: Real>(&self, input: &[Cx<T>], out: &mut [Cx<T>]) {
        let (xm, zm) = self.dense_masks();
        let base: Cx<T> = i_pow(self.phase.0.wrapping_add((self.count_y() & 3) as u8));
        for (j, &amp) in input.iter().enumerate() {
            let v = if (j & zm).count_ones() & 1 == 1 { -base } else { base };
            out[j ^ xm] = v * amp;
        }
    }

    pub fn apply<T: Real>(&self, state: &[Cx<T>]) -> Vec<Cx<T>> {
        let mut out = vec![Cx::new(T::zero(), T::zero()); state.len()];
        self.apply_into(state, &mut out);
        out
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn to_dense<T: Real>(&self) -> DenseOperator<T> {
        let dim = 1usize << self.num_qubits;
        let (xm, zm) = self.dense_masks();
        let base: Cx<T> = i_pow(self.phase.0.wrapping_add((self.count_y() & 3) as u8));
        let mut m = DenseOperator::zeros(dim);
        for j in 0..dim {
            let v = if (j & zm).count_ones() & 1 == 1 { -base } else { base };
            m[(j ^ xm, j)] = v;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phase.prefix())?;
        for q in 0..self.num_qubits {
            write!(f, "{}", self.letter(q).to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional prefix in `{"+", "-", "+i", "-i"}` followed by
    /// letters over `{I, X, Y, Z}`, e.g. `"-iXZY"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (PauliPhase::I, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (PauliPhase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (PauliPhase::ONE, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (PauliPhase::MINUS_ONE, r)
        } else {
            (PauliPhase::ONE, s)
        };
        if rest.is_empty() {
            return Err(Error::Parse(format!("no Pauli letters in {s:?}")));
        }
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(Error::Parse(format!("bad Pauli letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(phase, &letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Operator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_y_is_i_z() {
        assert_eq!(p("X").multiply(&p("Y")).unwrap(), p("+iZ"));
    }

    #[test]
    fn single_qubit_table_matches_published_table() {
        // rows: left factor, columns: right factor
        let table = [
            ["I", "X", "Y", "Z"],
            ["X", "I", "+iZ", "-iY"],
            ["Y", "-iZ", "I", "+iX"],
            ["Z", "+iY", "-iX", "I"],
        ];
        for (a, row) in Letter::ALL.iter().zip(table.iter()) {
            for (b, want) in Letter::ALL.iter().zip(row.iter()) {
                let l = PauliString::from_letters(PauliPhase::ONE, &[*a]);
                let r = PauliString::from_letters(PauliPhase::ONE, &[*b]);
                assert_eq!(l.multiply(&r).unwrap(), p(want), "{a:?}·{b:?}");
            }
        }
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..8 {
            let q = PauliString::random(n, &mut rng);
            assert_eq!(PauliString::identity(n).multiply(&q).unwrap(), q);
        }
    }

    #[test]
    fn mismatch_is_an_error() {
        assert!(matches!(
            p("XX").multiply(&p("X")),
            Err(Error::QubitMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn random_five_qubit_product_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = PauliString::random(5, &mut rng);
            let b = PauliString::random(5, &mut rng);
            let c = a.multiply(&b).unwrap();
            let dense: Operator = a.to_dense::<f64>().matmul(&b.to_dense()).unwrap();
            assert!(c.to_dense::<f64>().max_abs_diff(&dense) == 0.0);
        }
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(p("Y").complex_conjugate(), p("-Y"));
        assert_eq!(p("X").complex_conjugate(), p("X"));
        let q = p("-iXZY");
        let dense: Operator = q.to_dense();
        assert_eq!(q.complex_conjugate().to_dense::<f64>().max_abs_diff(&dense.conj()), 0.0);
    }

    #[test]
    fn words_beyond_64_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = PauliString::random(130, &mut rng);
        let b = PauliString::random(130, &mut rng);
        let c = a.multiply(&b).unwrap();
        // letter-by-letter reference using single-qubit products
        let mut phase = a.phase().mul(b.phase());
        for q in 0..130 {
            let l = PauliString::from_letters(PauliPhase::ONE, &[a.letter(q)]);
            let r = PauliString::from_letters(PauliPhase::ONE, &[b.letter(q)]);
            let s = l.multiply(&r).unwrap();
            phase = phase.mul(s.phase());
            assert_eq!(c.letter(q), s.letter(0));
        }
        assert_eq!(c.phase(), phase);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["+XZY", "-I", "+iZZ", "-iXYZI"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("XZ").to_string(), "+XZ");
        assert!("+iQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }
}
