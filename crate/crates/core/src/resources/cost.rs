use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{jump_index_width, truncation_order, ResourceTally};
use crate::pauli::ceil_log2;

/// Every hidden big-O constant is 1 and logarithms are natural unless a
/// register width is being counted.
pub const CONVENTIONS: &str = "big-O constants set to 1; ln for error/confidence factors; ceil(log2) for register widths and tree depth";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMethod {
    Theorem1,
    Theorem2,
    Theorem3,
    Qsvt,
    QsvtAmplified,
}

impl CostMethod {
    pub fn label(self) -> &'static str {
        match self {
            CostMethod::Theorem1 => "theorem1",
            CostMethod::Theorem2 => "theorem2",
            CostMethod::Theorem3 => "theorem3",
            CostMethod::Qsvt => "qsvt",
            CostMethod::QsvtAmplified => "qsvt_amplified",
        }
    }
}

/// Closed-form cost of one method at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub method: CostMethod,
    pub params: BTreeMap<String, f64>,
    /// Intermediate quantities such as the truncation order `K`.
    pub derived: BTreeMap<String, f64>,
    pub queries: f64,
    pub depth: f64,
    pub ancillas: f64,
    pub conventions: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub as_constructed: Option<ResourceTally>,
}

impl CostReport {
    fn new(method: CostMethod, params: &[(&str, f64)]) -> Self {
        CostReport {
            method,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            derived: BTreeMap::new(),
            queries: 0.0,
            depth: 0.0,
            ancillas: 0.0,
            conventions: CONVENTIONS.to_string(),
            as_constructed: None,
        }
    }

    pub fn with_tally(mut self, tally: ResourceTally) -> Self {
        self.as_constructed = Some(tally);
        self
    }

    /// `key=value` pairs joined by `;`, in key order.
    pub fn param_point(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    pub fn order(&self) -> Option<usize> {
        self.derived.get("K").map(|&k| k as usize)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must be positive and finite")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must be finite and nonnegative")))
    }
}

fn probability(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must lie in (0, 1)")))
    }
}

fn at_least_one(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidArgument(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

/// `M·max(1, ⌈log2 K⌉)`, the tree part of the fast-forwarded depth; zero
/// when nothing is applied.
fn tree_depth_term(k: usize, m: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        (m * ceil_log2(k).max(1)) as f64
    }
}

fn theorem1_ancillas(k: usize, m: usize) -> f64 {
    (k * (1 + jump_index_width(m))) as f64
}

/// Sequential purification: `K` queries to `U_g` and `U_F`, depth `K·M`.
pub fn theorem1_cost(t: f64, epsilon: f64, m: usize) -> Result<CostReport> {
    nonnegative("T", t)?;
    positive("epsilon", epsilon)?;
    at_least_one("M", m)?;
    let k = truncation_order(t, epsilon)?;
    let mut r = CostReport::new(CostMethod::Theorem1, &[("T", t), ("epsilon", epsilon), ("M", m as f64)]);
    r.derived.insert("K".into(), k as f64);
    r.queries = k as f64;
    r.depth = (k * m) as f64;
    r.ancillas = theorem1_ancillas(k, m);
    Ok(r)
}

/// Fast-forwarded purification: depth `M·⌈log2 K⌉ + R`, ancillas adding
/// `8RnK` Pauli-path registers to the theorem-1 count.
pub fn theorem2_cost(t: f64, epsilon: f64, m: usize, r_blocks: usize, n: usize) -> Result<CostReport> {
    nonnegative("T", t)?;
    positive("epsilon", epsilon)?;
    at_least_one("M", m)?;
    at_least_one("R", r_blocks)?;
    let k = truncation_order(t, epsilon)?;
    let mut r = CostReport::new(
        CostMethod::Theorem2,
        &[("T", t), ("epsilon", epsilon), ("M", m as f64), ("R", r_blocks as f64), ("n", n as f64)],
    );
    r.derived.insert("K".into(), k as f64);
    r.queries = k as f64;
    r.depth = if k == 0 { 0.0 } else { tree_depth_term(k, m) + r_blocks as f64 };
    r.ancillas = theorem1_ancillas(k, m) + (8 * r_blocks * n * k) as f64;
    Ok(r)
}

/// GCA estimation. The Lindbladian has unit `‖L‖_L` so the evolution time is
/// `β`; the simulation budget is `½·2^{(n−n_h)/2}ϵ`. `ln(1/δ)` multiplies the
/// total query count.
pub fn theorem3_cost(beta: f64, epsilon: f64, delta: f64, m: usize, n: usize, n_h: usize, d: usize) -> Result<CostReport> {
    nonnegative("beta", beta)?;
    positive("epsilon", epsilon)?;
    probability("delta", delta)?;
    at_least_one("M", m)?;
    at_least_one("n", n)?;
    let amplification = 2f64.powf((n as f64 - n_h as f64) / 2.0);
    let eps_sim = 0.5 * amplification * epsilon;
    let k = truncation_order(beta, eps_sim)?;
    let mut r = CostReport::new(
        CostMethod::Theorem3,
        &[
            ("beta", beta),
            ("epsilon", epsilon),
            ("delta", delta),
            ("M", m as f64),
            ("n", n as f64),
            ("n_h", n_h as f64),
            ("D", d as f64),
        ],
    );
    let per_query = tree_depth_term(k, m) + d as f64;
    r.derived.insert("K".into(), k as f64);
    r.derived.insert("amplification_factor".into(), amplification);
    r.derived.insert("epsilon_sim".into(), eps_sim);
    r.derived.insert("depth_per_query".into(), per_query);
    r.queries = (1.0 / delta).ln() / (amplification * epsilon);
    r.depth = r.queries * per_query;
    // NDME qubit, two Hadamard-test ancillas, and the theorem-2 registers for
    // jumps with two blocks of n qubits.
    r.ancillas = 3.0 + theorem1_ancillas(k, m) + (8 * 2 * n * k) as f64;
    Ok(r)
}

/// Known spectral norm `‖H‖` and amplification slack `α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralAmplification {
    pub norm: f64,
    pub alpha: f64,
}

/// QSVT baseline. Without a norm: `ϵ⁻¹ ln(1/δ)` queries of depth
/// `M√β ln(1/ϵ) + D`. With a norm: the query count gains
/// `e^{β(‖H‖/(1−α)−1)}` and the block-encoding depth becomes `Mα⁻¹√β ln(1/ϵ)`.
pub fn qsvt_cost(
    beta: f64,
    epsilon: f64,
    delta: f64,
    m: usize,
    d: usize,
    amplification: Option<SpectralAmplification>,
) -> Result<CostReport> {
    nonnegative("beta", beta)?;
    positive("epsilon", epsilon)?;
    probability("delta", delta)?;
    at_least_one("M", m)?;
    let log_eps = (1.0 / epsilon).ln().max(1.0);
    let base = (1.0 / delta).ln() / epsilon;
    let lcu = ceil_log2(m) as f64;
    let mut params = vec![
        ("beta", beta),
        ("epsilon", epsilon),
        ("delta", delta),
        ("M", m as f64),
        ("D", d as f64),
    ];
    let r = match amplification {
        None => {
            let mut r = CostReport::new(CostMethod::Qsvt, &params);
            let per_query = m as f64 * beta.sqrt() * log_eps + d as f64;
            r.derived.insert("depth_per_query".into(), per_query);
            r.queries = base;
            r.depth = base * per_query;
            r
        }
        Some(SpectralAmplification { norm, alpha }) => {
            if !(0.0..1.0).contains(&norm) {
                return Err(Error::InvalidArgument(format!("spectral norm {norm} must lie in [0, 1)")));
            }
            if !(alpha > 0.0 && alpha < 1.0 - norm) {
                return Err(Error::InvalidArgument(format!(
                    "alpha = {alpha} must lie in (0, 1 - ||H||) = (0, {})",
                    1.0 - norm
                )));
            }
            params.push(("norm", norm));
            params.push(("alpha", alpha));
            let mut r = CostReport::new(CostMethod::QsvtAmplified, &params);
            let boost = (beta * (norm / (1.0 - alpha) - 1.0)).exp();
            let per_query = d as f64 + m as f64 * beta.sqrt() * log_eps / alpha;
            r.derived.insert("depth_per_query".into(), per_query);
            r.derived.insert("query_factor".into(), boost);
            r.queries = boost * base;
            r.depth = r.queries * per_query;
            r
        }
    };
    // LCU index register, one signal qubit, two Hadamard-test ancillas.
    Ok(CostReport { ancillas: lcu + 3.0, ..r })
}

/// As-constructed circuit depth against a formula depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub as_constructed: usize,
    pub formula: f64,
    pub ratio: f64,
    pub constant: f64,
    pub pass: bool,
}

pub const DEFAULT_ENVELOPE: f64 = 4.0;

/// `as-constructed depth ≤ c · formula depth`; a zero formula demands a
/// zero-depth circuit.
pub fn depth_envelope_check(tally: &ResourceTally, report: &CostReport, c: f64) -> EnvelopeCheck {
    let built = tally.depth;
    let ratio = if report.depth > 0.0 {
        built as f64 / report.depth
    } else if built == 0 {
        0.0
    } else {
        f64::INFINITY
    };
    EnvelopeCheck {
        as_constructed: built,
        formula: report.depth,
        ratio,
        constant: c,
        pass: ratio <= c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_loop_example() {
        let t1 = theorem1_cost(1.0, 1e-6, 2).unwrap();
        assert_eq!(t1.order(), Some(9));
        assert_eq!(t1.depth, 18.0);
        assert_eq!(t1.queries, 9.0);
        assert_eq!(t1.ancillas, 9.0 * 3.0);
        for r in 1..4 {
            let t2 = theorem2_cost(1.0, 1e-6, 2, r, 3).unwrap();
            assert_eq!(t2.depth, 8.0 + r as f64);
            assert_eq!(t2.ancillas, 27.0 + (8 * r * 3 * 9) as f64);
        }
    }

    #[test]
    fn zero_time_costs_nothing() {
        let t1 = theorem1_cost(0.0, 1e-3, 3).unwrap();
        let t2 = theorem2_cost(0.0, 1e-3, 3, 2, 2).unwrap();
        for r in [t1, t2] {
            assert_eq!((r.queries, r.depth, r.ancillas), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn full_hadamard_count_has_unit_factor() {
        let r = theorem3_cost(2.0, 0.01, 0.05, 3, 4, 4, 5).unwrap();
        assert_eq!(r.derived["amplification_factor"], 1.0);
        let s = theorem3_cost(2.0, 0.01, 0.05, 3, 4, 0, 5).unwrap();
        assert_eq!(s.derived["amplification_factor"], 4.0);
        assert!((r.queries / s.queries - 4.0).abs() < 1e-12);
    }

    #[test]
    fn m_terms_scale_linearly() {
        let a = theorem1_cost(2.0, 1e-4, 3).unwrap();
        let b = theorem1_cost(2.0, 1e-4, 6).unwrap();
        assert_eq!(b.depth, 2.0 * a.depth);
        let a = theorem2_cost(2.0, 1e-4, 3, 2, 1).unwrap();
        let b = theorem2_cost(2.0, 1e-4, 6, 2, 1).unwrap();
        assert_eq!(b.depth - 2.0, 2.0 * (a.depth - 2.0));
        let a = qsvt_cost(4.0, 0.01, 0.05, 3, 0, None).unwrap();
        let b = qsvt_cost(4.0, 0.01, 0.05, 6, 0, None).unwrap();
        assert!((b.depth - 2.0 * a.depth).abs() < 1e-9 * b.depth);
    }

    #[test]
    fn qsvt_variants() {
        let plain = qsvt_cost(0.0, 0.01, 0.05, 4, 3, None).unwrap();
        assert!((plain.queries - 100.0 * 20f64.ln()).abs() < 1e-9);
        assert!((plain.depth - 3.0 * plain.queries).abs() < 1e-9);
        let amp = SpectralAmplification { norm: 0.5, alpha: 0.1 };
        let r = qsvt_cost(10.0, 0.01, 0.05, 4, 3, Some(amp)).unwrap();
        let boost = (10.0 * (0.5 / 0.9 - 1.0f64)).exp();
        assert!((r.queries / plain.queries - boost).abs() < 1e-12);
        assert!(qsvt_cost(1.0, 0.01, 0.05, 4, 3, Some(SpectralAmplification { norm: 0.5, alpha: 0.5 })).is_err());
        assert!(qsvt_cost(1.0, 0.01, 0.05, 4, 3, Some(SpectralAmplification { norm: 1.2, alpha: 0.1 })).is_err());
    }

    #[test]
    fn built_circuits_within_envelope() {
        use crate::lindblad::{build_purified_circuit_with_plan, CircuitMode, TruncationPlan};
        use crate::pauli::BlockDiagPauli;
        use crate::LindbladSpec;
        let spec = LindbladSpec::pauli(vec![
            (0.5, BlockDiagPauli::parse(&["X", "Z"]).unwrap()),
            (0.3, BlockDiagPauli::parse(&["Y", "-Y"]).unwrap()),
            (0.2, BlockDiagPauli::parse(&["Z", "I"]).unwrap()),
        ])
        .unwrap();
        for k in [1, 2, 4, 8, 16] {
            let plan = TruncationPlan::with_order(1.0, k, 1e-3);
            for mode in [CircuitMode::Theorem1, CircuitMode::Theorem2] {
                let c = build_purified_circuit_with_plan(&spec, plan.clone(), mode).unwrap();
                let mut report = CostReport::new(CostMethod::Theorem1, &[]);
                report.depth = match mode {
                    CircuitMode::Theorem1 => (k * 3) as f64,
                    CircuitMode::Theorem2 => tree_depth_term(k, 3) + 2.0,
                };
                let check = depth_envelope_check(&c.tally, &report, DEFAULT_ENVELOPE);
                assert!(check.pass, "{mode:?} K={k}: {check:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(theorem1_cost(-1.0, 1e-3, 1).is_err());
        assert!(theorem1_cost(1.0, 0.0, 1).is_err());
        assert!(theorem2_cost(1.0, 1e-3, 0, 1, 1).is_err());
        assert!(theorem3_cost(1.0, 1e-3, 1.0, 1, 1, 0, 0).is_err());
    }
}
