use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::operator::DenseOperator;
use crate::scalar::{Cx, Real};

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: DenseOperator<T>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi iteration. The input is symmetrised as
/// `(A + A†)/2` first.
pub fn hermitian_eigen<T: Real>(a: &DenseOperator<T>) -> Result<HermitianEigen<T>> {
    if !a.is_square() {
        return Err(Error::Shape("eigen-decomposition of a non-square matrix".into()));
    }
    let n = a.dim();
    let half = T::from_f64_lossy(0.5);
    let mut m = DenseOperator::from_fn(n, n, |r, c| (a[(r, c)] + a[(c, r)].conj()) * half);
    let mut v = DenseOperator::<T>::identity(n);
    let scale = m.frobenius_norm().max(T::min_positive_value());
    let stop = scale * T::from_f64_lossy(T::EPSILON_F64 * 0.01);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= stop * T::from_f64_lossy(1e-3) {
                    continue;
                }
                // Remove the phase of the pivot so the 2x2 problem is real
                // symmetric, then apply a standard Jacobi rotation.
                let ph = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (mag + mag);
                let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                let t = sgn / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // Unitary G acts on columns p, q:
                //   col_p' = c·col_p − s·conj(ph)·col_q
                //   col_q' = s·ph·col_p + c·col_q
                let g_qp = -ph.conj() * s;
                let g_pq = ph * s;
                for r in 0..n {
                    let xp = m[(r, p)];
                    let xq = m[(r, q)];
                    m[(r, p)] = xp * c + xq * g_qp;
                    m[(r, q)] = xp * g_pq + xq * c;
                    let vp = v[(r, p)];
                    let vq = v[(r, q)];
                    v[(r, p)] = vp * c + vq * g_qp;
                    v[(r, q)] = vp * g_pq + vq * c;
                }
                for col in 0..n {
                    let xp = m[(p, col)];
                    let xq = m[(q, col)];
                    m[(p, col)] = xp * c + xq * g_qp.conj();
                    m[(q, col)] = xp * g_pq.conj() + xq * c;
                }
                m[(p, q)] = Cx::zero();
                m[(q, p)] = Cx::zero();
            }
        }
    }
    if off_diagonal_norm(&m) > scale * T::tol(1e-10) {
        return Err(Error::Verification {
            what: "Jacobi eigen-decomposition did not converge".into(),
            residual: off_diagonal_norm(&m).to_f64_lossy(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = DenseOperator::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm<T: Real>(m: &DenseOperator<T>) -> T {
    let n = m.dim();
    let mut acc = T::zero();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += m[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Schatten-1 norm of a Hermitian matrix, `Σ |λ|`.
pub fn trace_norm_hermitian<T: Real>(a: &DenseOperator<T>) -> Result<T> {
    Ok(hermitian_eigen(a)?.values.iter().fold(T::zero(), |acc, l| acc + l.abs()))
}

/// Eigenvalues of a general complex matrix that is known to be normal
/// (unitary, Hermitian), via its Hermitian and anti-Hermitian parts sharing
/// an eigenbasis. Returned as complex numbers sorted by argument.
pub fn normal_eigenvalues<T: Real>(a: &DenseOperator<T>) -> Result<Vec<Cx<T>>> {
    let n = a.dim();
    let half = T::from_f64_lossy(0.5);
    // A random-ish real combination of the two Hermitian parts separates
    // eigenvalues that share a real or imaginary part.
    let h = DenseOperator::from_fn(n, n, |r, c| (a[(r, c)] + a[(c, r)].conj()) * half);
    let k = DenseOperator::from_fn(n, n, |r, c| (a[(r, c)] - a[(c, r)].conj()) * Cx::new(T::zero(), -half));
    let mix = T::from_f64_lossy(0.618_033_988_749_894_9);
    let mut combo = h.clone();
    combo.add_scaled(Cx::new(mix, T::zero()), &k);
    let eig = hermitian_eigen(&combo)?;
    let mut out: Vec<Cx<T>> = (0..n)
        .map(|j| {
            let vj = eig.vectors.column(j);
            let av = a.apply(&vj).expect("square");
            vj.iter().zip(&av).fold(Cx::zero(), |acc, (x, y)| acc + x.conj() * y)
        })
        .collect();
    out.sort_by(|x, y| x.arg().partial_cmp(&y.arg()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type Op = DenseOperator<f64>;

    fn random_hermitian(n: usize, seed: u64) -> Op {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = Op::from_fn(n, n, |_, _| cx(next(), next()));
        a.add(&a.adjoint()).unwrap()
    }

    #[test]
    fn reconstructs_random_hermitian() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (16, 4)] {
            let a = random_hermitian(n, seed);
            let e = hermitian_eigen(&a).unwrap();
            let d = Op::diag(&e.values.iter().map(|&l| cx(l, 0.0)).collect::<Vec<_>>());
            let back = e.vectors.mm(&d).mm(&e.vectors.adjoint());
            assert!(back.max_abs_diff(&a) < 1e-12, "n={n}");
            assert!(e.vectors.unitarity_residual() < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = Op::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => cx(0.0, -1.0),
            (1, 0) => cx(0.0, 1.0),
            _ => cx(0.0, 0.0),
        });
        let e = hermitian_eigen(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        assert!((trace_norm_hermitian(&y).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unitary_eigenvalues() {
        let t = std::f64::consts::FRAC_PI_4;
        let u = Op::diag(&[cx(t.cos(), t.sin()), cx(t.cos(), -t.sin()), cx(-1.0, 0.0)]);
        let ev = normal_eigenvalues(&u).unwrap();
        assert!((ev[0] - cx(t.cos(), -t.sin())).norm() < 1e-12);
        assert!((ev[1] - cx(t.cos(), t.sin())).norm() < 1e-12);
        assert!((ev[2].arg().abs() - std::f64::consts::PI).abs() < 1e-12);
    }
}
