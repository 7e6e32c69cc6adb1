use serde::Serialize;

use dissim_core::io::{parse_lindblad_spec, trajectories_to_jsonl};
use dissim_core::lindblad::{
    apply_taylor_channel, average_density, exact_channel, exact_evolution, sample_trajectories, taylor_superoperator,
    TrajectoryPath, TruncationPlan,
};
use dissim_core::linalg::{basis_state, choi_trace_distance_superop, MatrixJson};
use dissim_core::{cx, Density, LindbladSpec};

use crate::{read_input, to_json, usage, GlobalArgs, InitialState, Outcome, PathChoice, SimulateArgs};

/// Round-off allowance when comparing a measured distance with the bound.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Serialize)]
struct TrajectorySummary {
    shots: u64,
    seed: u64,
    path: TrajectoryPath,
    /// Trace distance between the empirical mean state and the series output.
    trace_distance_to_series: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    command: &'static str,
    num_qubits: usize,
    num_jumps: usize,
    lindblad_norm: f64,
    time: f64,
    initial: InitialState,
    plan: TruncationPlan,
    state: MatrixJson,
    exact_state: MatrixJson,
    state_trace_distance: f64,
    choi_distance: f64,
    bound: f64,
    bound_satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    trajectories: Option<TrajectorySummary>,
}

fn initial_state(spec: &LindbladSpec, initial: InitialState) -> (Density, Option<Vec<dissim_core::Complex64>>) {
    let d = spec.dim();
    match initial {
        InitialState::Zero => {
            let psi = basis_state(d, 0);
            (Density::from_pure(&psi), Some(psi))
        }
        InitialState::Plus => {
            let psi = vec![cx(1.0 / (d as f64).sqrt(), 0.0); d];
            (Density::from_pure(&psi), Some(psi))
        }
        InitialState::Mixed => (Density::maximally_mixed(d), None),
    }
}

pub fn cmd_simulate(args: &SimulateArgs, global: &GlobalArgs) -> anyhow::Result<Outcome> {
    if !(args.time >= 0.0 && args.time.is_finite()) {
        return Err(usage(format!("--time {} must be finite and nonnegative", args.time)));
    }
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        return Err(usage(format!("--epsilon {} must lie in (0, 1)", args.epsilon)));
    }
    if args.trajectories.is_some() && args.shots == 0 {
        return Err(usage("--trajectories needs --shots > 0"));
    }
    let spec = parse_lindblad_spec(&read_input(&args.input)?)?;
    let (rho0, psi0) = initial_state(&spec, args.initial);

    let plan = TruncationPlan::for_spec(&spec, args.time, args.epsilon)?;
    let state = apply_taylor_channel(&spec, &plan, &rho0)?;
    let exact_state = exact_evolution(&spec, &rho0, args.time)?;
    let choi = choi_trace_distance_superop(&exact_channel(&spec, args.time)?, &taylor_superoperator(&spec, &plan)?)?;

    let mut extra = Vec::new();
    let trajectories = if args.shots > 0 {
        let psi = psi0.ok_or_else(|| usage("trajectories need a pure initial state"))?;
        let path = match args.path {
            PathChoice::Pauli => TrajectoryPath::Pauli,
            PathChoice::Dense => TrajectoryPath::Dense,
            PathChoice::Auto if spec.is_pauli() => TrajectoryPath::Pauli,
            PathChoice::Auto => TrajectoryPath::Dense,
        };
        let ts = sample_trajectories(&spec, &psi, args.time, args.epsilon, global.seed, args.shots, path)?;
        let mean = Density::new_unchecked(average_density(&ts)?);
        if let Some(p) = &args.trajectories {
            extra.push((p.clone(), trajectories_to_jsonl(&ts, args.with_states)?));
        }
        Some(TrajectorySummary {
            shots: args.shots,
            seed: global.seed,
            path,
            trace_distance_to_series: mean.trace_distance(&state)?,
        })
    } else {
        None
    };

    let bound_satisfied = choi <= plan.bound + BOUND_SLACK;
    let report = SimulateReport {
        command: "simulate",
        num_qubits: spec.num_qubits(),
        num_jumps: spec.num_jumps(),
        lindblad_norm: spec.lindblad_norm(),
        time: args.time,
        initial: args.initial,
        bound: plan.bound,
        state_trace_distance: state.trace_distance(&exact_state)?,
        state: MatrixJson::from_operator(state.matrix()),
        exact_state: MatrixJson::from_operator(exact_state.matrix()),
        plan,
        choi_distance: choi,
        bound_satisfied,
        trajectories,
    };
    let summary = vec![format!(
        "simulate: order {} choi distance {:.3e} bound {:.3e} {}",
        report.plan.order,
        report.choi_distance,
        report.bound,
        if bound_satisfied { "PASS" } else { "FAIL" }
    )];
    Ok(Outcome {
        report: to_json(&report)?,
        extra,
        summary,
        success: bound_satisfied,
    })
}
