use crate::error::{Error, Result};
use crate::linalg::operator::{solve, DenseOperator};
use crate::scalar::{real, Real};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;
const MAX_SQUARINGS: i32 = 1024;

/// Matrix exponential by scaling and squaring around the diagonal [13/13]
/// Padé approximant.
pub fn expm<T: Real>(a: &DenseOperator<T>) -> Result<DenseOperator<T>> {
    if !a.is_square() {
        return Err(Error::Shape("expm of a non-square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::Overflow("expm input has non-finite entries".into()));
    }
    let n = a.dim();
    let norm = a.one_norm().to_f64_lossy();
    if norm == 0.0 {
        return Ok(DenseOperator::identity(n));
    }
    let s = (norm / THETA13).log2().ceil().max(0.0) as i32;
    if s > MAX_SQUARINGS {
        return Err(Error::Overflow(format!("expm norm {norm:e} too large")));
    }
    let a = a.scale_real(T::from_f64_lossy(0.5f64.powi(s)));
    let b = |k: usize| real(T::from_f64_lossy(PADE13[k]));

    let ident = DenseOperator::identity(n);
    let a2 = a.mm(&a);
    let a4 = a2.mm(&a2);
    let a6 = a4.mm(&a2);

    let mut u_inner = a6.scale(b(13));
    u_inner.add_scaled(b(11), &a4);
    u_inner.add_scaled(b(9), &a2);
    let mut u = a6.mm(&u_inner);
    u.add_scaled(b(7), &a6);
    u.add_scaled(b(5), &a4);
    u.add_scaled(b(3), &a2);
    u.add_scaled(b(1), &ident);
    let u = a.mm(&u);

    let mut v_inner = a6.scale(b(12));
    v_inner.add_scaled(b(10), &a4);
    v_inner.add_scaled(b(8), &a2);
    let mut v = a6.mm(&v_inner);
    v.add_scaled(b(6), &a6);
    v.add_scaled(b(4), &a4);
    v.add_scaled(b(2), &a2);
    v.add_scaled(b(0), &ident);

    let p = v.add(&u)?;
    let q = v.sub(&u)?;
    let mut r = solve(&q, &p)?;
    for _ in 0..s {
        r = r.mm(&r);
    }
    if !r.is_finite() {
        return Err(Error::Overflow("expm result is not finite".into()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use std::f64::consts::PI;

    type Op = DenseOperator<f64>;

    #[test]
    fn zero_gives_identity() {
        assert_eq!(expm(&Op::zeros(4)).unwrap(), Op::identity(4));
    }

    #[test]
    fn diagonal() {
        let d = Op::diag(&[cx(0.3, 0.0), cx(-2.0, 1.0)]);
        let e = expm(&d).unwrap();
        assert!((e[(0, 0)] - cx::<f64>(0.3, 0.0).exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - cx::<f64>(-2.0, 1.0).exp()).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-16);
    }

    #[test]
    fn euler_identity_for_x() {
        let x = Op::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = expm(&x.scale(cx(0.0, -PI / 2.0))).unwrap();
        let want = x.scale(cx(0.0, -1.0));
        assert!(e.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn large_norm_scaling() {
        let d = Op::diag(&[cx(-40.0, 0.0), cx(3.0, 50.0)]);
        let e = expm(&d).unwrap();
        let want = cx::<f64>(3.0, 50.0).exp();
        assert!((e[(1, 1)] - want).norm() / want.norm() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = Op::zeros(2);
        m[(0, 0)] = cx(f64::NAN, 0.0);
        assert!(expm(&m).is_err());
        let huge = Op::diag(&[cx(1e308, 0.0), cx(0.0, 0.0)]);
        assert!(expm(&huge).is_err());
    }

    #[test]
    fn single_precision() {
        let x = DenseOperator::<f32>::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = expm(&x.scale(cx(0.0, -std::f64::consts::FRAC_PI_2))).unwrap();
        assert!(e.max_abs_diff(&x.scale(cx(0.0, -1.0))) < 1e-5);
    }
}
