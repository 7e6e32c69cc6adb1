use serde::{Deserialize, Serialize};

use super::cost::{qsvt_cost, theorem3_cost, CostMethod, CostReport, SpectralAmplification};
use crate::error::{Error, Result};

/// Fixed parameters of a Theorem-3 versus QSVT comparison; `β` is swept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub epsilon: f64,
    pub delta: f64,
    pub m: usize,
    pub n: usize,
    pub n_h: usize,
    pub d: usize,
    pub amplification: Option<SpectralAmplification>,
}

/// Rows for theorem 3, plain QSVT and, when a norm is given, amplified QSVT
/// at every `β`.
pub fn comparison_table(point: &ComparisonPoint, betas: &[f64]) -> Result<Vec<CostReport>> {
    let mut rows = Vec::with_capacity(betas.len() * 3);
    for &beta in betas {
        let mut t3 = theorem3_cost(beta, point.epsilon, point.delta, point.m, point.n, point.n_h, point.d)?;
        t3.params.insert("beta".into(), beta);
        rows.push(t3);
        rows.push(qsvt_cost(beta, point.epsilon, point.delta, point.m, point.d, None)?);
        if let Some(a) = point.amplification {
            rows.push(qsvt_cost(beta, point.epsilon, point.delta, point.m, point.d, Some(a))?);
        }
    }
    Ok(rows)
}

/// `per_decade` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_sweep(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || per_decade == 0 {
        return Err(Error::InvalidArgument(format!("invalid sweep range [{lo}, {hi}] x {per_decade}")));
    }
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).round() as usize;
    if steps == 0 {
        return Ok(vec![lo]);
    }
    Ok((0..=steps)
        .map(|i| lo * 10f64.powf(decades * i as f64 / steps as f64))
        .collect())
}

/// Depth ratio `QSVT / theorem 3` along a `β` sweep and the points where
/// the cheaper method changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub ratios: Vec<(f64, f64)>,
    pub switches: Vec<f64>,
    pub single_crossover: bool,
}

pub fn crossover(rows: &[CostReport]) -> Crossover {
    let depth_at = |method: CostMethod| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.method == method)
            .map(|r| (r.params["beta"], r.depth))
            .collect()
    };
    let ours = depth_at(CostMethod::Theorem3);
    let theirs = depth_at(CostMethod::Qsvt);
    let ratios: Vec<(f64, f64)> = ours
        .iter()
        .zip(&theirs)
        .map(|(&(b, a), &(_, q))| (b, if a > 0.0 { q / a } else { f64::INFINITY }))
        .collect();
    let switches: Vec<f64> = ratios
        .windows(2)
        .filter(|w| (w[0].1 > 1.0) != (w[1].1 > 1.0))
        .map(|w| w[1].0)
        .collect();
    Crossover {
        single_crossover: switches.len() <= 1,
        ratios,
        switches,
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    method: &'a str,
    param_point: String,
    queries: f64,
    depth: f64,
    ancillas: f64,
}

pub fn to_csv(rows: &[CostReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(CsvRow {
            method: r.method.label(),
            param_point: r.param_point(),
            queries: r.queries,
            depth: r.depth,
            ancillas: r.ancillas,
        })
        .map_err(|e| Error::Serialization(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn to_json(rows: &[CostReport]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(|e| Error::Serialization(e.to_string()))
}
