use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{BlockDiagPauli, Letter, PauliPhase, PauliString};

/// Binary register image of a [`BlockDiagPauli`]: `R` consecutive blocks,
/// each `n` groups of `(2 phase bits ‖ 2 letter bits)`, `4Rn` bits total.
///
/// Each group reserves phase bits, but only the first group of a block
/// carries the block's phase; the remaining phase slots are zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliBinaryCode {
    num_blocks: usize,
    num_qubits: usize,
    bits: Vec<bool>,
}

impl PauliBinaryCode {
    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Parses an ASCII `0`/`1` string holding `num_blocks` blocks.
    pub fn parse(s: &str, num_blocks: usize) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::MalformedCode(format!("non-binary character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if num_blocks == 0 || bits.is_empty() || bits.len() % (4 * num_blocks) != 0 {
            return Err(Error::MalformedCode(format!(
                "length {} is not a positive multiple of 4·R = {}",
                bits.len(),
                4 * num_blocks
            )));
        }
        Ok(PauliBinaryCode {
            num_blocks,
            num_qubits: bits.len() / (4 * num_blocks),
            bits,
        })
    }

    /// Packs the code into an integer, first bit most significant. Only for
    /// codes of at most 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        (self.bits.len() <= 64).then(|| self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }
}

impl fmt::Display for PauliBinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn push2(bits: &mut Vec<bool>, v: u8) {
    bits.push(v & 2 != 0);
    bits.push(v & 1 != 0);
}

fn read2(bits: &[bool]) -> u8 {
    ((bits[0] as u8) << 1) | bits[1] as u8
}

pub fn encode_binary(f: &BlockDiagPauli) -> PauliBinaryCode {
    let n = f.num_qubits();
    let mut bits = Vec::with_capacity(4 * n * f.num_blocks());
    for block in f.blocks() {
        for q in 0..n {
            push2(&mut bits, if q == 0 { block.phase().code() } else { 0 });
            push2(&mut bits, block.letter(q).code());
        }
    }
    PauliBinaryCode {
        num_blocks: f.num_blocks(),
        num_qubits: n,
        bits,
    }
}

/// Strict inverse of [`encode_binary`]: nonzero phase bits outside the first
/// slot of a block are rejected.
pub fn decode_binary(code: &PauliBinaryCode) -> Result<BlockDiagPauli> {
    let n = code.num_qubits;
    if code.bits.len() != 4 * n * code.num_blocks || n == 0 {
        return Err(Error::MalformedCode(format!(
            "expected {} bits, found {}",
            4 * n * code.num_blocks,
            code.bits.len()
        )));
    }
    let mut blocks = Vec::with_capacity(code.num_blocks);
    for (j, chunk) in code.bits.chunks(4 * n).enumerate() {
        let mut letters = Vec::with_capacity(n);
        let mut phase = PauliPhase::ONE;
        for (q, group) in chunk.chunks(4).enumerate() {
            let ph = read2(&group[..2]);
            if q == 0 {
                phase = PauliPhase::from_code(ph);
            } else if ph != 0 {
                return Err(Error::MalformedCode(format!(
                    "block {j} qubit {q}: phase bits must be 00 outside the first slot"
                )));
            }
            letters.push(Letter::from_code(read2(&group[2..])));
        }
        blocks.push(PauliString::from_letters(phase, &letters));
    }
    BlockDiagPauli::new(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_example() {
        let f = BlockDiagPauli::parse(&["-X", "+iZ"]).unwrap();
        assert_eq!(encode_binary(&f).to_string(), "10010111");
    }

    #[test]
    fn identity_is_all_zero() {
        let f = BlockDiagPauli::parse(&["I"]).unwrap();
        assert_eq!(encode_binary(&f).to_string(), "0000");
    }

    #[test]
    fn phase_lives_in_first_slot() {
        let f = BlockDiagPauli::parse(&["-iXY"]).unwrap();
        assert_eq!(encode_binary(&f).to_string(), "11010010");
        let back = decode_binary(&PauliBinaryCode::parse("11010010", 1).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn strict_decode_rejects_stray_phase() {
        let code = PauliBinaryCode::parse("00010101", 1).unwrap();
        assert!(matches!(decode_binary(&code), Err(Error::MalformedCode(_))));
    }

    #[test]
    fn bad_lengths() {
        assert!(PauliBinaryCode::parse("101", 1).is_err());
        assert!(PauliBinaryCode::parse("1010", 2).is_err());
        assert!(PauliBinaryCode::parse("10a0", 1).is_err());
        assert!(PauliBinaryCode::parse("", 1).is_err());
    }
}
