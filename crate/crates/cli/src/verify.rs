use rayon::prelude::*;
use serde::Serialize;

use dissim_core::cbe::{
    gamma_upper_bound, gate_cbe, pauli_i, pauli_x, pauli_y, pauli_z, ub_tensor, verify_cbe, CbeChannel, TableGate,
};
use dissim_core::gca::{exact_gca_oracle, gibbs_cbe_residual, run_pipeline_exact};
use dissim_core::lindblad::{exact_channel, taylor_superoperator, TruncationPlan};
use dissim_core::linalg::{basis_state, choi_trace_distance_superop};
use dissim_core::pauli::{ceil_log2, product_tree, PauliPhase, PauliString};
use dissim_core::sample::{random_dense_spec, random_gca_problem, random_pauli_spec, random_phased_pauli};
use dissim_core::{cx, LindbladSpec, Operator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{to_json, usage, Outcome, VerifyArgs};

const CPTP_TOL: f64 = 1e-12;
const DENSE_TOL: f64 = 1e-12;
const GIBBS_TOL: f64 = 1e-8;
const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    /// Largest observed deviation, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: impl Into<String>, cases: usize, worst: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            passed: worst <= tolerance,
            cases,
            worst,
            tolerance,
            detail: None,
        }
    }

    fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            cases: 0,
            worst: f64::INFINITY,
            tolerance: 0.0,
            detail: Some(err.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn pass_set(&self) -> Vec<(&str, bool)> {
        self.checks.iter().map(|c| (c.name.as_str(), c.passed)).collect()
    }
}

fn parse_fault(name: &str) -> anyhow::Result<TableGate> {
    Ok(match name.to_ascii_uppercase().as_str() {
        "X" => TableGate::X,
        "Y" => TableGate::Y,
        "Z" => TableGate::Z,
        "H" => TableGate::H,
        "HSH" => TableGate::Hsh,
        "HTH" => TableGate::Hth,
        "CNOT" | "HHCNOTHH" => TableGate::HhCnotHh,
        other => return Err(usage(format!("unknown fault target {other:?}"))),
    })
}

fn table_gate_name(g: TableGate) -> &'static str {
    match g {
        TableGate::X => "X",
        TableGate::Y => "Y",
        TableGate::Z => "Z",
        TableGate::H => "H",
        TableGate::Hsh => "HSH",
        TableGate::Hth => "HTH",
        TableGate::HhCnotHh => "HH-CNOT-HH",
    }
}

fn gate_table(fault: Option<TableGate>) -> Vec<CheckResult> {
    TableGate::ALL
        .iter()
        .map(|&g| {
            let name = format!("gates/{}", table_gate_name(g));
            let mut c = gate_cbe::<f64>(g);
            if fault == Some(g) {
                match CbeChannel::new_unchecked(c.pairs().to_vec(), c.eta() * 0.99, c.encoded_op().clone()) {
                    Ok(bad) => c = bad,
                    Err(e) => return CheckResult::failed(name, e),
                }
            }
            let v = verify_cbe(&c);
            let cptp = v.cptp_residual_k.max(v.cptp_residual_l);
            let eta_ok = (c.eta() - g.eta()).abs() == 0.0;
            let mut r = CheckResult::new(name, 1, v.residual.max(cptp), 1e-10);
            r.passed &= cptp <= CPTP_TOL && v.passed() && eta_ok;
            if !r.passed {
                r.detail = Some(format!(
                    "cptp {cptp:.2e}, transfer residual {:.2e}, eta {} (tabulated {})",
                    v.residual,
                    c.eta(),
                    g.eta()
                ));
            }
            r
        })
        .collect()
}

fn ub_identities() -> CheckResult {
    let w = match ub_tensor::<f64>(1) {
        Ok(w) => w,
        Err(e) => return CheckResult::failed("cbe/ub-identities", e),
    };
    let i2 = pauli_i::<f64>();
    let worst = [
        (pauli_i::<f64>(), pauli_x::<f64>(), pauli_x::<f64>()),
        (pauli_z(), pauli_y(), pauli_y()),
        (pauli_z(), pauli_z(), pauli_z()),
    ]
    .iter()
    .map(|(a, b, q)| w.mm(&a.kron(b)).mm(&w.adjoint()).max_abs_diff(&i2.kron(q)))
    .fold(0.0, f64::max);
    CheckResult::new("cbe/ub-identities", 3, worst, DENSE_TOL)
}

fn all_phased_strings(n: usize) -> Vec<PauliString> {
    let template = PauliString::identity(n);
    (0..4usize.pow(n as u32))
        .flat_map(|code| {
            let mut p = template.clone();
            for q in 0..n {
                p.set_letter(q, dissim_core::pauli::Letter::from_code(((code >> (2 * q)) & 3) as u8));
            }
            (0..4).map(move |ph| p.clone().with_phase(PauliPhase::from_code(ph)))
        })
        .collect()
}

fn pauli_exhaustive() -> Vec<CheckResult> {
    (1..=3)
        .map(|n| {
            let name = format!("pauli/exhaustive-n{n}");
            let all = all_phased_strings(n);
            let dense: Vec<Operator> = all.iter().map(|p| p.to_dense()).collect();
            let worst = all
                .par_iter()
                .zip(&dense)
                .map(|(a, da)| {
                    all.iter()
                        .zip(&dense)
                        .map(|(b, db)| match a.multiply(b) {
                            Ok(ab) => ab.to_dense::<f64>().max_abs_diff(&da.mm(db)),
                            Err(_) => f64::INFINITY,
                        })
                        .fold(0.0, f64::max)
                })
                .reduce(|| 0.0, f64::max);
            CheckResult::new(name, all.len() * all.len(), worst, DENSE_TOL)
        })
        .collect()
}

fn pauli_tree(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ee5);
    let mut bad = 0usize;
    let cases = 64;
    for i in 0..cases {
        let len = 1 + (i * 67) % 1024;
        let seq: Vec<PauliString> = (0..len).map(|_| random_phased_pauli(4, &mut rng)).collect();
        let fold = seq[1..].iter().try_fold(seq[0].clone(), |acc, p| acc.multiply(p));
        match (product_tree(&seq), fold) {
            (Ok((t, stats)), Ok(f)) if t == f && stats.depth == ceil_log2(len) => {}
            _ => bad += 1,
        }
    }
    CheckResult::new("pauli/tree-vs-fold", cases, bad as f64, 0.0)
}

/// Specs for the truncation sweep: dense and Pauli jumps, `n ≤ 3`,
/// `M ∈ {1, 2, 4}`.
pub(crate) fn sweep_specs(seed: u64) -> dissim_core::Result<Vec<(String, LindbladSpec)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    for n in 1..=3 {
        for m in [1, 2, 4] {
            out.push((format!("dense n={n} M={m}"), random_dense_spec(n, m, &mut rng)?));
            let index = usize::from(n >= 2);
            out.push((format!("pauli n={n} M={m}"), random_pauli_spec(n, index, m, &mut rng)?));
        }
    }
    Ok(out)
}

fn truncation_sweep(seed: u64) -> CheckResult {
    let specs = match sweep_specs(seed) {
        Ok(s) => s,
        Err(e) => return CheckResult::failed("lindblad/truncation-bound", e),
    };
    let cases: Vec<(usize, f64, f64)> = (0..specs.len())
        .flat_map(|i| {
            [0.1, 0.5, 1.0, 2.0]
                .into_iter()
                .flat_map(move |t| [1e-2, 1e-4, 1e-6].into_iter().map(move |e| (i, t, e)))
        })
        .collect();
    let results: Vec<Result<f64, String>> = cases
        .par_iter()
        .map(|&(i, t, eps)| {
            let spec = &specs[i].1;
            let plan = TruncationPlan::for_spec(spec, t, eps).map_err(|e| e.to_string())?;
            let exact = exact_channel(spec, t).map_err(|e| e.to_string())?;
            let series = taylor_superoperator(spec, &plan).map_err(|e| e.to_string())?;
            let d = choi_trace_distance_superop(&exact, &series).map_err(|e| e.to_string())?;
            // Excess over the bound; nonpositive when it holds.
            Ok(d - plan.bound)
        })
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut detail = None;
    for (r, &(i, t, eps)) in results.iter().zip(&cases) {
        match r {
            Ok(excess) => {
                if *excess > worst {
                    worst = *excess;
                    if *excess > BOUND_SLACK {
                        detail = Some(format!("{} t={t} eps={eps}: distance exceeds bound by {excess:.3e}", specs[i].0));
                    }
                }
            }
            Err(e) => return CheckResult::failed("lindblad/truncation-bound", format!("{}: {e}", specs[i].0)),
        }
    }
    let mut c = CheckResult::new("lindblad/truncation-bound", cases.len(), worst.max(0.0), BOUND_SLACK);
    c.detail = detail;
    c
}

fn gamma_lemmas() -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=5 {
        let d = 1usize << n;
        let want = 2f64.powf(-(n as f64) / 2.0 - 1.0);
        for k in 0..d {
            match gamma_upper_bound(&basis_state::<f64>(d, k)) {
                Ok(g) => worst = worst.max((g - want).abs()),
                Err(_) => worst = f64::INFINITY,
            }
            cases += 1;
        }
        let plus = vec![cx(1.0 / (d as f64).sqrt(), 0.0); d];
        match gamma_upper_bound::<f64>(&plus) {
            Ok(g) => worst = worst.max((g - 0.5).abs()),
            Err(_) => worst = f64::INFINITY,
        }
        cases += 1;
    }
    CheckResult::new("cbe/gamma-bounds", cases, worst, DENSE_TOL)
}

fn gibbs_and_gca(seed: u64, epsilon: f64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x61b5);
    let problems: Vec<_> = (0..6)
        .map(|i| random_gca_problem(1 + i % 3, 1 + i % 4, 0.5 + 0.5 * i as f64, 6, epsilon, 0.05, &mut rng))
        .collect::<dissim_core::Result<_>>()
        .unwrap_or_default();
    if problems.is_empty() {
        return vec![
            CheckResult::failed("gca/gibbs-cbe", "could not build instances"),
            CheckResult::failed("gca/oracle", "could not build instances"),
        ];
    }
    let gibbs: Vec<f64> = problems
        .par_iter()
        .map(|p| {
            [0.5, 1.0, 2.0, 5.0]
                .iter()
                .map(|&b| gibbs_cbe_residual(p, b).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max)
        })
        .collect();
    let gca: Vec<(f64, f64)> = problems
        .par_iter()
        .map(|p| match (run_pipeline_exact(p), exact_gca_oracle(p)) {
            (Ok(e), Ok(z)) => ((e.value() - z).norm(), z.norm() - 1.0 / p.amplification_factor()),
            _ => (f64::INFINITY, f64::INFINITY),
        })
        .collect();
    let worst_err = gca.iter().map(|g| g.0).fold(0.0, f64::max);
    let worst_mag = gca.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    let mut oracle = CheckResult::new("gca/oracle", problems.len(), worst_err, epsilon);
    if worst_mag > 1e-9 {
        oracle.passed = false;
        oracle.detail = Some(format!("magnitude bound exceeded by {worst_mag:.3e}"));
    }
    vec![
        CheckResult::new("gca/gibbs-cbe", problems.len() * 4, gibbs.iter().cloned().fold(0.0, f64::max), GIBBS_TOL),
        oracle,
    ]
}

/// Runs every check. The result depends only on `seed` and `args`.
pub fn verify_report(args: &VerifyArgs, seed: u64) -> anyhow::Result<VerifyReport> {
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        return Err(usage(format!("--epsilon {} must lie in (0, 1)", args.epsilon)));
    }
    let fault = args.fault.as_deref().map(parse_fault).transpose()?;
    let mut checks = gate_table(fault);
    checks.push(ub_identities());
    checks.push(gamma_lemmas());
    checks.extend(pauli_exhaustive());
    checks.push(pauli_tree(seed));
    checks.push(truncation_sweep(seed));
    checks.extend(gibbs_and_gca(seed, args.epsilon));
    let passed = checks.iter().filter(|c| c.passed).count();
    Ok(VerifyReport {
        command: "verify",
        seed,
        failed: checks.len() - passed,
        passed,
        checks,
    })
}

pub fn cmd_verify(args: &VerifyArgs, seed: u64) -> anyhow::Result<Outcome> {
    let report = verify_report(args, seed)?;
    let mut summary: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            let mut line = format!(
                "{} {} ({} cases, worst {:.3e}, tol {:.1e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.cases,
                c.worst,
                c.tolerance
            );
            if let Some(d) = &c.detail {
                line.push_str(": ");
                line.push_str(d);
            }
            line
        })
        .collect();
    summary.push(format!("verify: {} passed, {} failed", report.passed, report.failed));
    Ok(Outcome {
        report: to_json(&report)?,
        extra: Vec::new(),
        summary,
        success: report.failed == 0,
    })
}
