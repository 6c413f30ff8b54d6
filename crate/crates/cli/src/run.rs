use serde::Serialize;
use serde_json::Value;

use quantumness_core::bounds::{
    bounds_report, clone_fidelity_argmin, pgm_fidelity, trivial_bound,
};
use quantumness_core::ensembles::json::{complex_to_pair, matrix_to_pairs, parse_ensemble_json, EnsembleFile, FileDiagnostic};
use quantumness_core::ensembles::{make_two_state_ensemble, symmetric_qubit_ensemble, validate_povm, Ensemble, Povm, PureState};
use quantumness_core::solvers::{
    brute_force_qubit_fidelity, explore_space_quantumness, optimal_success_probability,
    optimize_accessible_fidelity, optimize_clone_unitary, quantumness_with, SizeRecord, SolveDiagnostics,
    SolverConfig, CONVEXITY_RATIONALE,
};
use quantumness_core::bounds::clone_fidelity;

use crate::error::{CliError, Result};
use crate::report::{csv, fmt_sig, sha256_hex, Checks, RunReport, Status};
use crate::spec::CommandSpec;

/// Tolerance for the solver against the qubit oracle.
const ORACLE_TOL: f64 = 1e-4;
/// Allowed rise of `F_acc` between consecutive symmetric constellations.
const MONOTONE_TOL: f64 = 1e-4;
const CLONE_GAP_RANGE: (f64, f64) = (-1e-9, 1e-3);

pub const TWO_STATE_HEADER: &str = "x,F_acc,F_pgm,lambda1,P_s_opt,F_clone";
pub const SYMMETRIC_HEADER: &str = "n,F_acc,lambda1,P_s_opt";

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: RunReport,
    /// Tabular output of sweep commands.
    pub csv: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.report.status.exit_code()
    }
}

struct Input {
    file: EnsembleFile,
    digest: String,
}

fn read_input(path: &str) -> Result<Input> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Input(format!("{path}: not UTF-8")))?;
    Ok(Input {
        file: parse_ensemble_json(&text)?,
        digest: sha256_hex(&bytes),
    })
}

fn check_config(cfg: &SolverConfig) -> Result<()> {
    cfg.validate().map_err(CliError::from)
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn state_pairs(s: &PureState) -> Vec<[f64; 2]> {
    s.amplitudes().iter().map(|&z| complex_to_pair(z)).collect()
}

fn povm_pairs(p: &Povm) -> Vec<Vec<Vec<[f64; 2]>>> {
    p.elements().iter().map(|e| matrix_to_pairs(e.matrix())).collect()
}

fn finish(
    spec: &CommandSpec,
    digest: Option<String>,
    results: Value,
    bounds: Option<quantumness_core::BoundsReport>,
    checks: Checks,
    csv: Option<String>,
) -> Outcome {
    Outcome {
        report: RunReport {
            command: spec.name().to_string(),
            spec: spec.clone(),
            input_digest: digest,
            results,
            bounds,
            converged: checks.converged,
            status: checks.status(),
            warnings: checks.warnings,
            breaches: checks.breaches,
            wall_time_ms: None,
        },
        csv,
    }
}

/// Runs a command. `Err` means the run could not start (unreadable or
/// malformed input, invalid flags); numerical trouble is reported through
/// the report's status instead.
pub fn execute(spec: &CommandSpec) -> Result<Outcome> {
    if let Some(cfg) = spec.config() {
        check_config(cfg)?;
    }
    match spec {
        CommandSpec::Validate { path } => validate(spec, path),
        CommandSpec::Accfid { path, config, resolution } => accfid(spec, path, config, *resolution),
        CommandSpec::Quantumness { path, config, outer } => {
            let input = read_input(path)?;
            quantumness(spec, input, config, outer)
        }
        CommandSpec::SweepTwoState { xs, config } => sweep_two_state(spec, xs, config),
        CommandSpec::SweepSymmetric { ns, config } => sweep_symmetric(spec, ns, config),
        CommandSpec::CloneVerify { xs, config, argmin_step } => clone_verify(spec, xs, config, *argmin_step),
        CommandSpec::ExploreQd {
            dim,
            sizes,
            config,
            options,
        } => {
            let report = explore_space_quantumness(*dim, sizes, config, options)?;
            explore(spec, report)
        }
    }
}

#[derive(Serialize)]
struct ValidateResult {
    clean: bool,
    diagnostics: Vec<FileDiagnostic>,
}

fn validate(spec: &CommandSpec, path: &str) -> Result<Outcome> {
    let input = read_input(path)?;
    let diagnostics = input.file.validate();
    let clean = diagnostics.is_empty();
    let mut checks = Checks::new();
    checks.warnings = diagnostics.iter().map(ToString::to_string).collect();
    let mut outcome = finish(
        spec,
        Some(input.digest),
        to_value(&ValidateResult { clean, diagnostics }),
        None,
        checks,
        None,
    );
    if !clean {
        outcome.report.status = Status::InputError;
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct AccfidResult {
    accessible_fidelity: f64,
    optimal_success_probability: f64,
    povm: Vec<Vec<Vec<[f64; 2]>>>,
    responses: Vec<Vec<[f64; 2]>>,
    outcome_weights: Vec<f64>,
    effective_outcomes: usize,
    oracle_fidelity: Option<f64>,
    diagnostics: SolveDiagnostics,
    success_diagnostics: SolveDiagnostics,
}

fn accfid(spec: &CommandSpec, path: &str, cfg: &SolverConfig, resolution: Option<f64>) -> Result<Outcome> {
    let input = read_input(path)?;
    let ens = input.file.to_ensemble()?;
    if resolution.is_some() && ens.dim() != 2 {
        return Err(CliError::Input(format!(
            "--resolution runs the qubit oracle, but the ensemble has dimension {}",
            ens.dim()
        )));
    }
    let acc = optimize_accessible_fidelity(&ens, cfg)?;
    let ps = optimal_success_probability(&ens, cfg)?;
    let oracle = resolution.map(|r| brute_force_qubit_fidelity(&ens, r)).transpose()?;

    let mut checks = Checks::new();
    checks.converged = acc.diagnostics.converged && ps.diagnostics.converged;
    checks.finite("accessible_fidelity", acc.value());
    checks.finite("optimal_success_probability", ps.value);
    let bounds = bounds_report(&ens, Some(acc.value()), Some(ps.value));
    checks.require(bounds.hierarchy.ok(), || "bound hierarchy violated".into());
    checks.require(bounds.pgm_routes_agree, || {
        format!(
            "square-root routes disagree: {} vs {}",
            bounds.pgm_fidelity, bounds.pgm_fidelity_direct
        )
    });
    checks.require(validate_povm(&acc.povm).is_empty(), || "optimal POVM is invalid".into());
    if let Some(o) = oracle {
        checks.require(acc.value() >= o - ORACLE_TOL, || {
            format!("solver value {} below oracle {o} by more than {ORACLE_TOL:e}", acc.value())
        });
    }

    let result = AccfidResult {
        accessible_fidelity: acc.value(),
        optimal_success_probability: ps.value,
        povm: povm_pairs(&acc.povm),
        responses: acc.result.responses.iter().map(state_pairs).collect(),
        outcome_weights: acc.result.outcome_weights.clone(),
        effective_outcomes: acc.diagnostics.effective_outcomes,
        oracle_fidelity: oracle,
        diagnostics: acc.diagnostics,
        success_diagnostics: ps.diagnostics,
    };
    Ok(finish(spec, Some(input.digest), to_value(&result), Some(bounds), checks, None))
}

#[derive(Serialize)]
struct QuantumnessOut {
    quantumness: f64,
    worst_priors: Vec<f64>,
    povm: Vec<Vec<Vec<[f64; 2]>>>,
    responses: Vec<Vec<[f64; 2]>>,
    outer_iterations: usize,
    polish_evals: usize,
    rationale: &'static str,
}

fn quantumness(
    spec: &CommandSpec,
    input: Input,
    cfg: &SolverConfig,
    outer: &quantumness_core::solvers::QuantumnessOptions,
) -> Result<Outcome> {
    let states = input.file.to_states()?;
    let mut checks = Checks::new();
    if input.file.probs.is_some() {
        checks.warnings.push("probs in the input file are ignored".into());
    }
    let q = quantumness_with(&states, cfg, outer)?;
    checks.converged = q.converged;
    checks.finite("quantumness", q.value);
    let d = states[0].dim() as f64;
    checks.require(q.value >= 1.0 / d - 1e-9 && q.value <= 1.0 + 1e-12, || {
        format!("quantumness {} outside [1/d, 1]", q.value)
    });
    checks.require((q.worst_priors.iter().sum::<f64>() - 1.0).abs() <= 1e-10, || {
        "worst priors do not sum to 1".into()
    });
    let worst = Ensemble::new(q.worst_priors.clone(), states)?;
    let bounds = bounds_report(&worst, Some(q.value), None);
    checks.require(bounds.hierarchy.ok(), || "bound hierarchy violated at the worst priors".into());
    let out = QuantumnessOut {
        quantumness: q.value,
        worst_priors: q.worst_priors.clone(),
        povm: povm_pairs(&q.povm),
        responses: q.inner.responses.iter().map(state_pairs).collect(),
        outer_iterations: q.outer_iterations,
        polish_evals: q.polish_evals,
        rationale: CONVEXITY_RATIONALE,
    };
    Ok(finish(spec, Some(input.digest), to_value(&out), Some(bounds), checks, None))
}

#[derive(Serialize)]
struct TwoStateRow {
    x: f64,
    f_acc: f64,
    f_pgm: f64,
    lambda1: f64,
    p_s_opt: f64,
    f_clone: f64,
    converged: bool,
}

fn sweep_two_state(spec: &CommandSpec, xs: &[f64], cfg: &SolverConfig) -> Result<Outcome> {
    let mut checks = Checks::new();
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let ens = make_two_state_ensemble(x, 0.5)?;
        let acc = optimize_accessible_fidelity(&ens, cfg)?;
        let ps = optimal_success_probability(&ens, cfg)?;
        let row = TwoStateRow {
            x,
            f_acc: acc.value(),
            f_pgm: pgm_fidelity(&ens),
            lambda1: trivial_bound(&ens),
            p_s_opt: ps.value,
            f_clone: clone_fidelity(x)?,
            converged: acc.diagnostics.converged && ps.diagnostics.converged,
        };
        checks.converged &= row.converged;
        for (name, v) in [("F_acc", row.f_acc), ("P_s_opt", row.p_s_opt)] {
            checks.finite(name, v);
        }
        let b = bounds_report(&ens, Some(row.f_acc), Some(row.p_s_opt));
        checks.require(b.hierarchy.ok() && b.pgm_routes_agree, || format!("bound hierarchy violated at x={x}"));
        rows.push(row);
    }
    let table = csv(
        TWO_STATE_HEADER,
        rows.iter().map(|r| {
            [r.x, r.f_acc, r.f_pgm, r.lambda1, r.p_s_opt, r.f_clone]
                .into_iter()
                .map(fmt_sig)
                .collect()
        }),
    );
    Ok(finish(spec, None, to_value(&rows), None, checks, Some(table)))
}

#[derive(Serialize)]
struct SymmetricRow {
    n: usize,
    f_acc: f64,
    lambda1: f64,
    p_s_opt: f64,
    effective_outcomes: usize,
    converged: bool,
}

fn sweep_symmetric(spec: &CommandSpec, ns: &[usize], cfg: &SolverConfig) -> Result<Outcome> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::Input("n values must be non-empty and >= 1".into()));
    }
    let mut checks = Checks::new();
    let mut rows: Vec<SymmetricRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let ens = symmetric_qubit_ensemble(n)?;
        let acc = optimize_accessible_fidelity(&ens, cfg)?;
        let ps = optimal_success_probability(&ens, cfg)?;
        let row = SymmetricRow {
            n,
            f_acc: acc.value(),
            lambda1: trivial_bound(&ens),
            p_s_opt: ps.value,
            effective_outcomes: acc.diagnostics.effective_outcomes,
            converged: acc.diagnostics.converged && ps.diagnostics.converged,
        };
        checks.converged &= row.converged;
        checks.finite("F_acc", row.f_acc);
        let b = bounds_report(&ens, Some(row.f_acc), Some(row.p_s_opt));
        checks.require(b.hierarchy.ok(), || format!("bound hierarchy violated at n={n}"));
        if let Some(prev) = rows.last() {
            if prev.n < n {
                checks.require(row.f_acc <= prev.f_acc + MONOTONE_TOL, || {
                    format!("F_acc rises from n={} ({}) to n={n} ({})", prev.n, prev.f_acc, row.f_acc)
                });
            }
        }
        rows.push(row);
    }
    let table = csv(
        SYMMETRIC_HEADER,
        rows.iter().map(|r| {
            vec![r.n.to_string(), fmt_sig(r.f_acc), fmt_sig(r.lambda1), fmt_sig(r.p_s_opt)]
        }),
    );
    Ok(finish(spec, None, to_value(&rows), None, checks, Some(table)))
}

#[derive(Serialize)]
struct CloneRow {
    x: f64,
    numeric: f64,
    closed_form: f64,
    gap: f64,
    evals: usize,
}

#[derive(Serialize)]
struct CloneOut {
    rows: Vec<CloneRow>,
    closed_form_argmin: f64,
    argmin_step: f64,
}

fn clone_verify(spec: &CommandSpec, xs: &[f64], cfg: &SolverConfig, step: f64) -> Result<Outcome> {
    let mut checks = Checks::new();
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let opt = optimize_clone_unitary(x, cfg)?;
        checks.finite("clone value", opt.value);
        checks.require(opt.gap >= CLONE_GAP_RANGE.0 && opt.gap <= CLONE_GAP_RANGE.1, || {
            format!("clone gap {} at x={x} outside [-1e-9, 1e-3]", opt.gap)
        });
        rows.push(CloneRow {
            x,
            numeric: opt.value,
            closed_form: opt.closed_form,
            gap: opt.gap,
            evals: opt.evals,
        });
    }
    let argmin = clone_fidelity_argmin(step)?;
    checks.require((argmin - 1.0 / 3f64.sqrt()).abs() <= step + 1e-6, || {
        format!("closed-form argmin {argmin} is not within {step} of 1/sqrt(3)")
    });
    let out = CloneOut {
        rows,
        closed_form_argmin: argmin,
        argmin_step: step,
    };
    Ok(finish(spec, None, to_value(&out), None, checks, None))
}

#[derive(Serialize)]
struct ExploreOut {
    label: &'static str,
    dim: usize,
    best_value: f64,
    best_set: EnsembleFile,
    per_size: Vec<SizeRecord>,
}

fn explore(spec: &CommandSpec, report: quantumness_core::solvers::ExploreReport) -> Result<Outcome> {
    let mut checks = Checks::new();
    checks.finite("best_value", report.best_value);
    checks.require(
        report.per_size.windows(2).all(|w| w[1].running_best <= w[0].running_best),
        || "running best increased".into(),
    );
    let set = Ensemble::uniform(report.best_states.clone())?;
    let out = ExploreOut {
        label: report.label,
        dim: report.dim,
        best_value: report.best_value,
        best_set: EnsembleFile {
            dimension: report.dim,
            states: set.states().iter().map(state_pairs).collect(),
            probs: None,
        },
        per_size: report.per_size,
    };
    Ok(finish(spec, None, to_value(&out), None, checks, None))
}

/// Re-runs the spec echoed in a report. Returns the new outcome and
/// whether its digest matches the original.
pub fn rerun(report_text: &str) -> Result<(Outcome, bool)> {
    let original: RunReport = serde_json::from_str(report_text)?;
    let outcome = execute(&original.spec)?;
    let same = outcome.report.digest() == original.digest();
    Ok((outcome, same))
}
