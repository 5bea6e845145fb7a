//! Experiment orchestration: runs a validated config and writes its outputs.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rplab_core::et_model::{
    build_model, classical_two_step, classical_two_step_confluent, fit_decay_rate, golden_rule_rates, populations,
    propagate_exact, reduced_coherence, EtConfig, EtError, Populations,
};
use rplab_core::perturbation::PHASE_CONVENTION;
use rplab_core::spin::{entropy_series, evolve, yields, PluginRegistry, SpinTrajectory, SPIN_LABELS};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Experiment, ResolvedSpin, RunConfig};
use crate::error::{CliError, EXIT_OK, EXIT_VERIFY_FAILED};
use crate::table::{format_float, sidecar_path, write_csv, write_table, TimeSeriesTable};
use crate::verify::{run_verify, VerifyReport};

/// Name of the resolved-config echo written to every output directory.
pub const CONFIG_ECHO: &str = "config.json";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtSummary {
    pub k_golden: Option<f64>,
    pub gamma_golden: Option<f64>,
    pub k_fit: Option<f64>,
    pub p_p_final: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariantSummary {
    pub label: String,
    pub singlet_yield: f64,
    pub triplet_yield: f64,
    pub survival: f64,
    pub max_entropy: f64,
    pub final_entropy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Summary {
    Et(EtSummary),
    Rp(Vec<VariantSummary>),
    Verify(VerifyReport),
    Sweep(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match &self.summary {
            Summary::Verify(r) if !r.all_passed => EXIT_VERIFY_FAILED,
            _ => EXIT_OK,
        }
    }
}

fn metadata(cfg: &RunConfig, extra: Value) -> Result<Value, CliError> {
    let mut meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment.name(),
        "phase_convention": PHASE_CONVENTION,
        "config": cfg.resolved()?,
    });
    if let (Some(m), Value::Object(extra)) = (meta.as_object_mut(), extra) {
        m.extend(extra);
    }
    Ok(meta)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serialisable value");
    fs::write(path, text + "\n").map_err(CliError::io(path))
}

/// Runs `cfg`, writing into `out_dir` (created if needed).
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
    let echo = out_dir.join(CONFIG_ECHO);
    write_json(&echo, &cfg.resolved()?)?;
    let mut files = vec![echo];
    let summary = match cfg.experiment {
        Experiment::EtSim => Summary::Et(et_sim(cfg, out_dir, &mut files)?),
        Experiment::RpSim => Summary::Rp(rp_sim(cfg, out_dir, &mut files)?),
        Experiment::Verify => {
            let report = run_verify(cfg.seed);
            let path = out_dir.join("verify_report.json");
            write_json(&path, &report)?;
            files.push(path);
            Summary::Verify(report)
        }
        Experiment::Sweep => Summary::Sweep(sweep(cfg, out_dir, &mut files)?),
    };
    Ok(RunOutcome { files, summary })
}

fn emit(table: &TimeSeriesTable, path: &Path, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    write_table(table, path)?;
    files.push(path.to_path_buf());
    files.push(sidecar_path(path));
    Ok(())
}

fn classical(k: f64, gamma: f64, times: &[f64]) -> Result<Populations, EtError> {
    match classical_two_step(k, gamma, times) {
        Err(EtError::DegenerateRates { .. }) => classical_two_step_confluent(k, times),
        other => other,
    }
}

fn et_sim(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<EtSummary, CliError> {
    let model_cfg: &EtConfig = cfg.model()?;
    let model = build_model(model_cfg)?;
    let traj = propagate_exact(&model)?;
    let pops = populations(&traj);
    let coh = reduced_coherence(&traj);
    let mut notes: Vec<String> = model.warnings().to_vec();

    let rates = golden_rule_rates(&model).map_err(|e| notes.push(format!("golden-rule rates unavailable: {e}"))).ok();
    let kinetics = rates.and_then(|(k, gamma)| {
        classical(k, gamma, &pops.times).map_err(|e| notes.push(format!("classical kinetics omitted: {e}"))).ok()
    });
    let k_fit = fit_decay_rate(&pops.times, &pops.p_r, model_cfg.fit_window)
        .map_err(|e| notes.push(format!("decay fit failed: {e}")))
        .ok();

    let mut columns = vec![
        ("P_R".to_string(), pops.p_r.clone()),
        ("P_Pstar".to_string(), pops.p_pstar.clone()),
        ("P_P".to_string(), pops.p_p.clone()),
        ("per_mode_bound".to_string(), coh.per_mode_bound.clone()),
        ("rho_RP_reduced_abs".to_string(), coh.rho_rp.iter().map(|z| z.norm()).collect()),
    ];
    if let Some(c) = &kinetics {
        columns.push(("classical_P_R".to_string(), c.p_r.clone()));
        columns.push(("classical_P_Pstar".to_string(), c.p_pstar.clone()));
        columns.push(("classical_P_P".to_string(), c.p_p.clone()));
    }
    let meta = metadata(cfg, json!({ "dim": model.dim(), "notes": notes }))?;
    let table = TimeSeriesTable::from_columns(&pops.times, columns, meta);
    emit(&table, &dir.join("populations.csv"), files)?;

    let summary = EtSummary {
        k_golden: rates.map(|r| r.0),
        gamma_golden: rates.map(|r| r.1),
        k_fit,
        p_p_final: pops.p_p.last().copied().unwrap_or(0.0),
    };
    let path = dir.join("rates.json");
    write_json(
        &path,
        &json!({
            "k_golden": summary.k_golden,
            "gamma_golden": summary.gamma_golden,
            "gamma_over_k": rates.map(|(k, g)| g / k),
            "k_fit": summary.k_fit,
            "fit_window": model_cfg.fit_window,
            "notes": notes,
        }),
    )?;
    files.push(path);
    Ok(summary)
}

fn subsample(traj: &SpinTrajectory, stride: usize) -> SpinTrajectory {
    let keep = |j: &usize| j.is_multiple_of(stride);
    SpinTrajectory {
        times: (0..traj.times.len()).filter(keep).map(|j| traj.times[j]).collect(),
        states: (0..traj.states.len()).filter(keep).map(|j| traj.states[j].clone()).collect(),
    }
}

fn rp_sim(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<Vec<VariantSummary>, CliError> {
    let spin: ResolvedSpin = cfg.spin()?;
    let registry = PluginRegistry::with_builtins();
    let rho0 = spin.initial_state.density_matrix();

    let mut times = Vec::new();
    let (mut ent_cols, mut pop_cols, mut yield_cols) = (Vec::new(), Vec::new(), Vec::new());
    let mut summaries = Vec::new();
    for spec in &spin.variants {
        let label = spec.label();
        let full = evolve(spec, &spin.params, &rho0, spin.t_max, spin.dt, &registry)?;
        let y = yields(&full, &spin.params);
        let traj = subsample(&full, spin.stride);
        let entropy = entropy_series(&traj)?;
        times = traj.times.clone();

        for (idx, name) in SPIN_LABELS.iter().enumerate() {
            pop_cols.push((format!("{label}_{name}"), traj.states.iter().map(|r| r.matrix()[(idx, idx)].re).collect()));
        }
        pop_cols.push((format!("{label}_trace"), traj.states.iter().map(|r| r.trace()).collect()));
        let pick = |v: &[f64]| -> Vec<f64> { v.iter().step_by(spin.stride).copied().collect() };
        yield_cols.push((format!("{label}_Y_S"), pick(&y.singlet)));
        yield_cols.push((format!("{label}_Y_T"), pick(&y.triplet)));
        yield_cols.push((format!("{label}_survival"), pick(&y.survival)));

        summaries.push(VariantSummary {
            label: label.clone(),
            singlet_yield: *y.singlet.last().expect("non-empty"),
            triplet_yield: *y.triplet.last().expect("non-empty"),
            survival: *y.survival.last().expect("non-empty"),
            max_entropy: entropy.iter().cloned().fold(0.0, f64::max),
            final_entropy: *entropy.last().expect("non-empty"),
        });
        ent_cols.push((format!("S_{label}"), entropy));
    }

    let variants: Vec<String> = spin.variants.iter().map(|v| v.label()).collect();
    for (name, cols, extra) in [
        ("entropy.csv", ent_cols, json!({ "units": "nats", "normalised_by_trace": true })),
        ("populations.csv", pop_cols, json!({ "basis": SPIN_LABELS, "normalised_by_trace": false })),
        ("yields.csv", yield_cols, json!({ "integration": "trapezoid" })),
    ] {
        let mut extra = extra;
        extra["variants"] = json!(variants);
        let table = TimeSeriesTable::from_columns(&times, cols, metadata(cfg, extra)?);
        emit(&table, &dir.join(name), files)?;
    }
    Ok(summaries)
}

fn cell(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn sweep(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<usize, CliError> {
    let sweep = cfg.sweep.as_ref().expect("validated sweep section");
    let points = cfg.sweep_points()?;
    let run_point = |(index, point): (usize, &RunConfig)| {
        run(point, &dir.join(format!("point_{index:03}")))
            .map_err(|e| CliError::SweepPoint { index, source: Box::new(e) })
    };
    let outcomes: Vec<RunOutcome> = if sweep.parallel {
        points.par_iter().enumerate().map(run_point).collect::<Result<_, _>>()?
    } else {
        points.iter().enumerate().map(run_point).collect::<Result<_, _>>()?
    };

    let mut header = vec!["point".to_string(), sweep.parameter.clone()];
    let mut rows = Vec::with_capacity(outcomes.len());
    for (index, (outcome, value)) in outcomes.iter().zip(&sweep.values).enumerate() {
        let mut row = vec![index.to_string(), format_float(*value)];
        match &outcome.summary {
            Summary::Et(s) => {
                if index == 0 {
                    header.extend(["k_golden", "gamma_golden", "k_fit", "P_P_final"].map(String::from));
                }
                row.extend([cell(s.k_golden), cell(s.gamma_golden), cell(s.k_fit), format_float(s.p_p_final)]);
            }
            Summary::Rp(variants) => {
                for v in variants {
                    if index == 0 {
                        for m in ["Y_S", "Y_T", "survival", "S_max", "S_final"] {
                            header.push(format!("{}_{m}", v.label));
                        }
                    }
                    row.extend(
                        [v.singlet_yield, v.triplet_yield, v.survival, v.max_entropy, v.final_entropy]
                            .map(format_float),
                    );
                }
            }
            Summary::Verify(_) | Summary::Sweep(_) => unreachable!("validated sweep experiment"),
        }
        rows.push(row);
        files.extend(outcome.files.iter().cloned());
    }
    let path = dir.join("summary.csv");
    write_csv(&path, &header, &rows)?;
    files.push(path);
    Ok(outcomes.len())
}
