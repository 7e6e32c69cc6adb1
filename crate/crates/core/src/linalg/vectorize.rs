use crate::error::{Error, Result};
use crate::limits::check_dense_dim;
use crate::linalg::operator::DenseOperator;
use crate::scalar::{Cx, Real};

/// Row-major vectorisation `|O⟩⟩ = Σ o_ij |i⟩|j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorizedOperator<T: Real>(pub Vec<Cx<T>>);

impl<T: Real> VectorizedOperator<T> {
    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn vectorize<T: Real>(o: &DenseOperator<T>) -> VectorizedOperator<T> {
    VectorizedOperator(o.data().to_vec())
}

pub fn matrixize<T: Real>(v: &VectorizedOperator<T>) -> Result<DenseOperator<T>> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() {
        return Err(Error::Shape(format!("vector of length {} is not d²", v.len())));
    }
    DenseOperator::from_vec(d, d, v.0.clone())
}

/// `Σ A_i ⊗ conj(B_i)`, the matrix of `O ↦ Σ A_i O B_i†` on `|O⟩⟩`.
pub fn superop_of_map<T: Real>(a: &[DenseOperator<T>], b: &[DenseOperator<T>]) -> Result<DenseOperator<T>> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("{} left vs {} right operators", a.len(), b.len())));
    }
    let first = a.first().ok_or(Error::Empty("operator list"))?;
    let d = first.rows();
    if a.iter().chain(b).any(|m| !m.is_square() || m.rows() != d) {
        return Err(Error::Shape("superop_of_map needs equal square operators".into()));
    }
    check_dense_dim(d * d)?;
    let mut s = DenseOperator::zeros(d * d);
    for (x, y) in a.iter().zip(b) {
        accumulate_kron_conj(&mut s, x, y, Cx::new(T::one(), T::zero()));
    }
    Ok(s)
}

/// `s += w · (x ⊗ conj(y))` without materialising the product.
pub(crate) fn accumulate_kron_conj<T: Real>(
    s: &mut DenseOperator<T>,
    x: &DenseOperator<T>,
    y: &DenseOperator<T>,
    w: Cx<T>,
) {
    let d = x.rows();
    for a in 0..d {
        for i in 0..d {
            let xa = x[(a, i)] * w;
            if xa.re == T::zero() && xa.im == T::zero() {
                continue;
            }
            for b in 0..d {
                for j in 0..d {
                    s[(a * d + b, i * d + j)] += xa * y[(b, j)].conj();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type Op = DenseOperator<f64>;

    #[test]
    fn bell_correspondence() {
        let v = vectorize(&Op::identity(2));
        assert_eq!(v.0, vec![cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]);
        let y = Op::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => cx(0.0, -1.0),
            (1, 0) => cx(0.0, 1.0),
            _ => cx(0.0, 0.0),
        });
        assert_eq!(vectorize(&y).0, vec![cx(0.0, 0.0), cx(0.0, -1.0), cx(0.0, 1.0), cx(0.0, 0.0)]);
        assert!(vectorize(&Op::zeros(2)).0.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn round_trip() {
        let o = Op::from_fn(4, 4, |r, c| cx(r as f64, -(c as f64)));
        assert_eq!(matrixize(&vectorize(&o)).unwrap(), o);
        assert!(matrixize(&VectorizedOperator::<f64>(vec![cx(0.0, 0.0); 3])).is_err());
    }

    #[test]
    fn x_left_only() {
        let x = Op::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let o = Op::diag(&[cx(1.0, 0.0), cx(0.0, 0.0)]);
        let s = superop_of_map(&[x.clone()], &[Op::identity(2)]).unwrap();
        let got = s.apply(vectorize(&o).as_slice()).unwrap();
        assert_eq!(got, vectorize(&x.mm(&o)).0);
    }
}
