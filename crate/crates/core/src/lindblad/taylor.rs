use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::{check_dense_dim, Limits};
use crate::lindblad::spec::DissipativeLindbladSpec;
use crate::linalg::{DenseOperator, DensityMatrix, KrausChannel, Superoperator};
use crate::scalar::{Cx, Real};

/// Smallest `K` with `2 T^{K+1} / (K+1)! ≤ ε`, evaluated in the log domain.
pub fn truncation_order(t: f64, epsilon: f64) -> Result<usize> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T = {t} must be finite and nonnegative")));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    if t == 0.0 {
        return Ok(0);
    }
    let (ln2, ln_t, ln_eps) = (2f64.ln(), t.ln(), epsilon.ln());
    let mut ln_fact = 0.0; // ln (K+1)!
    for k in 0usize.. {
        ln_fact += ((k + 1) as f64).ln();
        // Relative slack of 1e-12 so exact ties (e.g. T = 0.1, ε = 1e-2)
        // resolve as they do in exact arithmetic.
        if ln2 + (k + 1) as f64 * ln_t - ln_fact <= ln_eps + 1e-12 {
            return Ok(k);
        }
    }
    unreachable!()
}

/// `2 T^{K+1} / (K+1)!`.
pub fn truncation_bound(t: f64, k: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let ln_fact: f64 = (1..=k + 1).map(|j| (j as f64).ln()).sum();
    (2f64.ln() + (k + 1) as f64 * t.ln() - ln_fact).exp()
}

/// Parameters of the renormalised Taylor truncation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationPlan {
    /// Dimensionless time `T`.
    pub time: f64,
    pub order: usize,
    /// `C² = 1 / Σ_{k≤K} e^{−T} T^k / k!`.
    pub c_squared: f64,
    pub epsilon: f64,
    /// `w_k = C² e^{−T} T^k / k!`, summing to one.
    pub weights: Vec<f64>,
    pub bound: f64,
}

impl TruncationPlan {
    pub fn new(time: f64, epsilon: f64) -> Result<Self> {
        let order = truncation_order(time, epsilon)?;
        Ok(Self::with_order(time, order, epsilon))
    }

    /// Plan with a caller-chosen order; `epsilon` is recorded as given.
    pub fn with_order(time: f64, order: usize, epsilon: f64) -> Self {
        let mut raw = Vec::with_capacity(order + 1);
        let mut ln_fact = 0.0;
        for k in 0..=order {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            let w = if time == 0.0 {
                if k == 0 { 1.0 } else { 0.0 }
            } else {
                (k as f64 * time.ln() - ln_fact - time).exp()
            };
            raw.push(w);
        }
        let total: f64 = raw.iter().sum();
        TruncationPlan {
            time,
            order,
            c_squared: 1.0 / total,
            epsilon,
            weights: raw.iter().map(|w| w / total).collect(),
            bound: truncation_bound(time, order),
        }
    }

    pub fn for_spec<T: Real>(spec: &DissipativeLindbladSpec<T>, t: f64, epsilon: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time {t} must be finite and nonnegative")));
        }
        Self::new(spec.dimensionless_time(t), epsilon)
    }
}

/// Number of Kraus operators in the enumerated truncated channel,
/// `Σ_{k≤K} M^k`, as a float to survive overflow.
pub fn kraus_count(m: usize, k: usize) -> f64 {
    (0..=k).map(|j| (m as f64).powi(j as i32)).sum()
}

/// Kraus form of the renormalised truncated series. Operators are indexed
/// by jump sequences `(i_1, …, i_k)`, applied in that order.
pub fn build_taylor_channel<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    t: f64,
    epsilon: f64,
) -> Result<KrausChannel<T>> {
    let plan = TruncationPlan::for_spec(spec, t, epsilon)?;
    build_taylor_channel_with_plan(spec, &plan)
}

pub fn build_taylor_channel_with_plan<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    plan: &TruncationPlan,
) -> Result<KrausChannel<T>> {
    let m = spec.num_jumps();
    let cap = Limits::current().max_kraus;
    let count = ((m + 1) as f64).powi(plan.order as i32);
    if count > cap as f64 {
        return Err(Error::EnumerationCap { count, cap });
    }
    let jumps = spec.dense_jumps()?;
    let probs: Vec<f64> = spec.probabilities().iter().map(|p| p.to_f64_lossy()).collect();
    let dim = spec.dim();

    // Level k holds (F_{i_k}···F_{i_1}, Π p) for every length-k sequence.
    let mut level: Vec<(DenseOperator<T>, f64)> = vec![(DenseOperator::identity(dim), 1.0)];
    let mut ops = Vec::new();
    for (k, &w) in plan.weights.iter().enumerate() {
        if k > 0 {
            let mut next = Vec::with_capacity(level.len() * m);
            for (prod, p) in &level {
                for (f, &pi) in jumps.iter().zip(&probs) {
                    next.push((f.mm(prod), p * pi));
                }
            }
            level = next;
        }
        for (prod, p) in &level {
            ops.push(prod.scale_real(T::from_f64_lossy((w * p).sqrt())));
        }
    }
    KrausChannel::new(ops)
}

/// Superoperator of the truncated series, `Σ_k w_k G^k` with
/// `G = Σ p_i F_i ⊗ conj(F_i)`; needs no enumeration.
pub fn taylor_superoperator<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    plan: &TruncationPlan,
) -> Result<Superoperator<T>> {
    let d2 = spec.dim() * spec.dim();
    check_dense_dim(d2)?;
    let g = spec.jump_mixture_superop()?;
    let mut term = DenseOperator::identity(d2);
    let mut acc = DenseOperator::zeros(d2);
    for (k, &w) in plan.weights.iter().enumerate() {
        if k > 0 {
            term = g.mm(&term);
        }
        acc.add_scaled(Cx::new(T::from_f64_lossy(w), T::zero()), &term);
    }
    Superoperator::from_matrix(acc)
}

/// Applies the truncated series to an arbitrary operator term by term:
/// `X_0 = O`, `X_k = Σ p_i F_i X_{k−1} F_i†`, result `Σ w_k X_k`.
pub fn apply_taylor_operator<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    plan: &TruncationPlan,
    o: &DenseOperator<T>,
) -> Result<DenseOperator<T>> {
    if o.rows() != spec.dim() || o.cols() != spec.dim() {
        return Err(Error::Shape("operator dimension does not match the spec".into()));
    }
    let jumps = spec.dense_jumps()?;
    let adj: Vec<DenseOperator<T>> = jumps.iter().map(|f| f.adjoint()).collect();
    let probs = spec.probabilities();
    let mut x = o.clone();
    let mut acc = o.scale_real(T::from_f64_lossy(plan.weights[0]));
    for &w in &plan.weights[1..] {
        let mut next = DenseOperator::zeros(spec.dim());
        for ((f, fa), &p) in jumps.iter().zip(&adj).zip(&probs) {
            next.add_scaled(Cx::new(p, T::zero()), &f.mm(&x).mm(fa));
        }
        x = next;
        acc.add_scaled(Cx::new(T::from_f64_lossy(w), T::zero()), &x);
    }
    Ok(acc)
}

pub fn apply_taylor_channel<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    plan: &TruncationPlan,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    Ok(DensityMatrix::new_unchecked(apply_taylor_operator(spec, plan, rho.matrix())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::spec::exact_channel;
    use crate::linalg::{choi_trace_distance_superop, Operator};
    use crate::scalar::cx;

    fn brute_force_order(t: f64, eps: f64) -> usize {
        let mut k = 0usize;
        loop {
            let fact: f64 = (1..=k + 1).map(|j| j as f64).product();
            if 2.0 * t.powi(k as i32 + 1) / fact <= eps * (1.0 + 1e-12) {
                return k;
            }
            k += 1;
        }
    }

    #[test]
    fn order_values() {
        assert_eq!(truncation_order(0.0, 0.3).unwrap(), 0);
        assert_eq!(truncation_order(1.0, 1e-6).unwrap(), 9);
        assert_eq!(truncation_order(10.0, 1e-3).unwrap(), brute_force_order(10.0, 1e-3));
        for t in [0.1, 0.5, 2.0, 7.5] {
            for eps in [1e-2, 1e-5, 1e-9] {
                assert_eq!(truncation_order(t, eps).unwrap(), brute_force_order(t, eps));
            }
        }
        assert!(truncation_order(1.0, 0.0).is_err());
        assert!(truncation_order(-1.0, 0.1).is_err());
        // Large T stays finite in the log domain.
        assert!(truncation_order(500.0, 1e-12).unwrap() > 500);
    }

    #[test]
    fn weights_sum_to_one() {
        let plan = TruncationPlan::new(3.0, 1e-8).unwrap();
        let s: f64 = plan.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(plan.c_squared >= 1.0);
        assert!(plan.bound <= 1e-8);
    }

    #[test]
    fn order_zero_is_identity() {
        let x = Operator::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let spec = DissipativeLindbladSpec::dense(1, vec![(1.0, x)]).unwrap();
        let ch = build_taylor_channel_with_plan(&spec, &TruncationPlan::with_order(0.4, 0, 1.0)).unwrap();
        assert_eq!(ch.len(), 1);
        assert_eq!(ch.ops()[0], Operator::identity(2));
    }

    #[test]
    fn three_routes_agree_and_obey_bound() {
        let x = Operator::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = Operator::diag(&[cx(1.0, 0.0), cx(-1.0, 0.0)]);
        let spec = DissipativeLindbladSpec::dense(1, vec![(0.3, x), (0.7, z)]).unwrap();
        let plan = TruncationPlan::for_spec(&spec, 0.5, 1e-4).unwrap();
        let kraus = build_taylor_channel_with_plan(&spec, &plan).unwrap();
        let sup = taylor_superoperator(&spec, &plan).unwrap();
        assert!(kraus.superoperator().unwrap().matrix().max_abs_diff(sup.matrix()) < 1e-14);
        let rho = Operator::from_fn(2, 2, |r, c| cx(if r == c { 0.5 } else { 0.3 }, if r < c { 0.2 } else if r > c { -0.2 } else { 0.0 }));
        let direct = apply_taylor_operator(&spec, &plan, &rho).unwrap();
        assert!(direct.max_abs_diff(&sup.apply_operator(&rho).unwrap()) < 1e-14);
        let exact = exact_channel(&spec, 0.5).unwrap();
        assert!(choi_trace_distance_superop(&exact, &sup).unwrap() <= plan.bound);
    }

    #[test]
    fn enumeration_cap() {
        let x = Operator::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let spec = DissipativeLindbladSpec::dense(1, vec![(1.0, x.clone()), (1.0, x.clone()), (1.0, x.clone()), (1.0, x)]).unwrap();
        let plan = TruncationPlan::with_order(4.0, 12, 1e-6);
        assert!(matches!(
            build_taylor_channel_with_plan(&spec, &plan),
            Err(Error::EnumerationCap { .. })
        ));
    }
}
