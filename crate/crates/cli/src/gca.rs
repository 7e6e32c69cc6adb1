use serde::Serialize;

use dissim_core::gca::{
    exact_gca_oracle, run_pipeline_exact, run_pipeline_mlae, run_pipeline_shots, GcaEstimate, GcaMethod, GcaProblem,
    GcaProblemJson,
};
use dissim_core::io::from_json_str;

use crate::{read_input, to_json, usage, GcaArgs, GlobalArgs, MethodChoice, Outcome};

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct OracleComparison {
    method: GcaMethod,
    abs_error: f64,
    tolerance: f64,
    within: bool,
}

#[derive(Serialize)]
struct OracleReport {
    value: Complex,
    /// `|GCA| ≤ 2^{−(n−n_h)/2}` on the oracle value.
    magnitude_bound: f64,
    magnitude_bound_holds: bool,
    comparisons: Vec<OracleComparison>,
}

#[derive(Serialize)]
struct GcaReport {
    command: &'static str,
    /// The problem after coefficient normalisation.
    problem: GcaProblemJson,
    input_beta: f64,
    scale: f64,
    amplification_factor: f64,
    estimates: Vec<GcaEstimate>,
    /// Each estimate mapped back to the unnormalised coefficients.
    input_targets: Vec<Complex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleReport>,
}

fn methods(choice: MethodChoice) -> Vec<GcaMethod> {
    match choice {
        MethodChoice::Exact => vec![GcaMethod::Exact],
        MethodChoice::Shots => vec![GcaMethod::Shots],
        MethodChoice::Mlae => vec![GcaMethod::Mlae],
        MethodChoice::All => vec![GcaMethod::Exact, GcaMethod::Shots, GcaMethod::Mlae],
    }
}

pub fn cmd_gca(args: &GcaArgs, global: &GlobalArgs) -> anyhow::Result<Outcome> {
    let mut json: GcaProblemJson = from_json_str(&read_input(&args.input)?)?;
    if let Some(e) = args.epsilon {
        json.epsilon = e;
    }
    if let Some(d) = args.delta {
        json.delta = d;
    }
    let problem = GcaProblem::from_json(&json).map_err(|e| usage(format!("invalid problem: {e}")))?;
    if problem.n > args.ceiling_qubits && !args.no_oracle {
        return Err(usage(format!(
            "n = {} exceeds the oracle ceiling of {} qubits; pass --no-oracle to run without the comparison",
            problem.n, args.ceiling_qubits
        )));
    }
    if args.shots == 0 {
        return Err(usage("--shots must be positive"));
    }

    let mut estimates = Vec::new();
    for m in methods(args.method) {
        estimates.push(match m {
            GcaMethod::Exact => run_pipeline_exact(&problem)?,
            GcaMethod::Shots => run_pipeline_shots(&problem, args.shots, global.seed)?,
            GcaMethod::Mlae => run_pipeline_mlae(&problem, global.seed)?,
        });
    }

    let mut success = true;
    let mut summary = Vec::new();
    let oracle = if args.no_oracle {
        None
    } else {
        let z = exact_gca_oracle(&problem)?;
        let bound = 1.0 / problem.amplification_factor();
        let holds = z.norm() <= bound + 1e-9;
        success &= holds;
        let comparisons = estimates
            .iter()
            .map(|e| {
                let abs_error = (e.value() - z).norm();
                let within = abs_error <= problem.epsilon;
                // Only the exact readout is deterministic; sampled methods
                // meet ϵ with probability 1 − δ and are reported, not judged.
                if e.method == GcaMethod::Exact {
                    success &= within;
                }
                summary.push(format!(
                    "gca {:?}: |error| {abs_error:.3e} vs epsilon {:.1e} {}",
                    e.method,
                    problem.epsilon,
                    match (e.method == GcaMethod::Exact, within) {
                        (true, true) => "PASS",
                        (true, false) => "FAIL",
                        (false, true) => "within",
                        (false, false) => "outside (not judged)",
                    }
                ));
                OracleComparison {
                    method: e.method,
                    abs_error,
                    tolerance: problem.epsilon,
                    within,
                }
            })
            .collect();
        Some(OracleReport {
            value: Complex { re: z.re, im: z.im },
            magnitude_bound: bound,
            magnitude_bound_holds: holds,
            comparisons,
        })
    };

    let input_targets = estimates
        .iter()
        .map(|e| {
            let (re, im) = problem.to_input_target(e.re, e.im);
            Complex { re, im }
        })
        .collect();
    let report = GcaReport {
        command: "gca",
        problem: problem.to_json(),
        input_beta: problem.input_beta,
        scale: problem.scale,
        amplification_factor: problem.amplification_factor(),
        estimates,
        input_targets,
        oracle,
    };
    Ok(Outcome {
        report: to_json(&report)?,
        extra: Vec::new(),
        summary,
        success,
    })
}
