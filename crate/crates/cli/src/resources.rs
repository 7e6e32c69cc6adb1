use serde::Serialize;

use dissim_core::resources::{
    comparison_table, crossover, log_sweep, to_csv, ComparisonPoint, CostMethod, CostReport, Crossover,
    SpectralAmplification,
};

use crate::{to_json, usage, Format, Outcome, ResourcesArgs};

/// One row of the side-by-side table: per-query depth `M log β + D`
/// against `M√β + D`, plus totals.
#[derive(Serialize)]
struct ComparisonRow {
    beta: f64,
    ours_queries: f64,
    qsvt_queries: f64,
    ours_depth_per_query: f64,
    qsvt_depth_per_query: f64,
    ours_depth: f64,
    qsvt_depth: f64,
    depth_ratio: f64,
}

#[derive(Serialize)]
struct ResourcesReport {
    command: &'static str,
    point: ComparisonPoint,
    comparison: Vec<ComparisonRow>,
    crossover: Crossover,
    rows: Vec<CostReport>,
}

fn side_by_side(rows: &[CostReport]) -> Vec<ComparisonRow> {
    let pick = |m: CostMethod| rows.iter().filter(move |r| r.method == m);
    pick(CostMethod::Theorem3)
        .zip(pick(CostMethod::Qsvt))
        .map(|(a, q)| ComparisonRow {
            beta: a.params["beta"],
            ours_queries: a.queries,
            qsvt_queries: q.queries,
            ours_depth_per_query: a.derived["depth_per_query"],
            qsvt_depth_per_query: q.derived["depth_per_query"],
            ours_depth: a.depth,
            qsvt_depth: q.depth,
            depth_ratio: q.depth / a.depth,
        })
        .collect()
}

pub fn cmd_resources(args: &ResourcesArgs) -> anyhow::Result<Outcome> {
    let betas = match args.beta {
        Some(b) => vec![b],
        None => log_sweep(args.beta_min, args.beta_max, args.per_decade).map_err(|e| usage(e.to_string()))?,
    };
    let point = ComparisonPoint {
        epsilon: args.epsilon,
        delta: args.delta,
        m: args.m,
        n: args.n,
        n_h: args.n_h,
        d: args.d,
        amplification: args.norm.zip(args.alpha).map(|(norm, alpha)| SpectralAmplification { norm, alpha }),
    };
    let rows = comparison_table(&point, &betas).map_err(|e| usage(e.to_string()))?;
    let report = match args.format {
        Format::Csv => to_csv(&rows)?,
        Format::Json => to_json(&ResourcesReport {
            command: "resources",
            point,
            comparison: side_by_side(&rows),
            crossover: crossover(&rows),
            rows,
        })?,
    };
    Ok(Outcome {
        report,
        extra: Vec::new(),
        summary: Vec::new(),
        success: true,
    })
}
