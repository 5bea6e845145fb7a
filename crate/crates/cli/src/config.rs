//! Run configuration: parsing, defaulting and validation.

use std::path::PathBuf;

use rplab_core::et_model::{EtConfig, EtError};
use rplab_core::spin::{max_time_step, InitialState, MasterEquation, PluginRegistry, RpParams, SpinError};
use rplab_core::{CMatrix, HermitianOperator, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Parse(String),

    #[error("invalid config value at `{path}`: {reason}")]
    Validation { path: String, reason: String },
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Validation { path: path.into(), reason: reason.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    EtSim,
    RpSim,
    Verify,
    Sweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::EtSim => "et-sim",
            Experiment::RpSim => "rp-sim",
            Experiment::Verify => "verify",
            Experiment::Sweep => "sweep",
        }
    }
}

/// A Hamiltonian entry: a real number or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Real(re) => C64::new(re, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// Radical-pair section. Unset time-grid fields are derived from the rate
/// scale `max(k_S, k_T, max|H|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinConfig {
    #[serde(rename = "k_S")]
    pub k_s: f64,
    #[serde(rename = "k_T")]
    pub k_t: f64,
    /// Row-major 4x4 over `S, T+, T0, T-`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_spin: Option<Vec<Vec<Entry>>>,
    pub variants: Vec<MasterEquation>,
    pub initial_state: InitialState,
    /// Defaults to `20 / scale`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Defaults to `1e-3 / scale`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Output spacing; rounded to a whole number of steps. Defaults to `0.01 / scale`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
}

impl Default for SpinConfig {
    fn default() -> Self {
        Self {
            k_s: 1.0,
            k_t: 0.0,
            h_spin: None,
            variants: vec![
                MasterEquation::Haberkorn,
                MasterEquation::JonesHore,
                MasterEquation::Plugin { name: "measurement_standin".into() },
            ],
            initial_state: InitialState::SingletT0Superposition,
            t_max: None,
            dt: None,
            sample_interval: None,
        }
    }
}

/// Spin section with every derived quantity filled in.
#[derive(Clone, Debug)]
pub struct ResolvedSpin {
    pub params: RpParams,
    pub variants: Vec<MasterEquation>,
    pub initial_state: InitialState,
    pub t_max: f64,
    pub dt: f64,
    /// Integration steps between output rows.
    pub stride: usize,
}

impl SpinConfig {
    fn hamiltonian(&self) -> Result<HermitianOperator, ConfigError> {
        let Some(rows) = &self.h_spin else {
            return Ok(HermitianOperator::zeros(4));
        };
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(invalid("spin.h_spin", "expected 4 rows of 4 entries"));
        }
        let m = CMatrix::from_fn(4, |i, j| rows[i][j].value());
        HermitianOperator::new(m).map_err(|e| invalid("spin.h_spin", e.to_string()))
    }

    pub fn resolve(&self) -> Result<ResolvedSpin, ConfigError> {
        let params = RpParams::with_hamiltonian(self.k_s, self.k_t, self.hamiltonian()?).map_err(|e| match e {
            SpinError::InvalidParameter { field, reason } => invalid(format!("spin.{field}"), reason),
            other => invalid("spin", other.to_string()),
        })?;
        if self.variants.is_empty() {
            return Err(invalid("spin.variants", "at least one master equation is required"));
        }
        let registry = PluginRegistry::with_builtins();
        for (i, v) in self.variants.iter().enumerate() {
            v.validate().map_err(|e| invalid(format!("spin.variants[{i}].eta"), e.to_string()))?;
            if let MasterEquation::Plugin { name } = v {
                if registry.get(name).is_none() {
                    let known: Vec<&str> = registry.names().collect();
                    return Err(invalid(
                        format!("spin.variants[{i}].name"),
                        format!("unknown plugin `{name}`; registered: {}", known.join(", ")),
                    ));
                }
            }
        }

        let mut labels: Vec<String> = self.variants.iter().map(MasterEquation::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(invalid("spin.variants", format!("`{}` is listed twice", w[0])));
        }

        let scale = match params.rate_scale() {
            s if s > 0.0 => s,
            _ => 1.0,
        };
        let t_max = self.t_max.unwrap_or(20.0 / scale);
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(invalid("spin.t_max", format!("must be positive, got {t_max}")));
        }
        let limit = max_time_step(&params);
        let dt = self.dt.unwrap_or(1e-3 / scale);
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("spin.dt", format!("must be positive, got {dt}")));
        }
        if dt > limit * (1.0 + 1e-12) {
            return Err(invalid("spin.dt", format!("{dt} exceeds the stability limit {limit}")));
        }
        let interval = self.sample_interval.unwrap_or(0.01 / scale);
        if !(interval > 0.0 && interval.is_finite()) {
            return Err(invalid("spin.sample_interval", format!("must be positive, got {interval}")));
        }
        let stride = ((interval / dt).round() as usize).max(1);
        Ok(ResolvedSpin {
            params,
            variants: self.variants.clone(),
            initial_state: self.initial_state,
            t_max,
            dt,
            stride,
        })
    }

    /// Copy with the derived time-grid fields written out.
    fn filled(&self) -> Result<SpinConfig, ConfigError> {
        let r = self.resolve()?;
        Ok(SpinConfig {
            t_max: Some(r.t_max),
            dt: Some(r.dt),
            sample_interval: Some(r.stride as f64 * r.dt),
            ..self.clone()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted path of a numeric field, e.g. `model.lambda` or `spin.k_S`.
    pub parameter: String,
    pub values: Vec<f64>,
    #[serde(default = "default_sweep_experiment")]
    pub experiment: Experiment,
    /// Run points concurrently.
    #[serde(default)]
    pub parallel: bool,
}

fn default_sweep_experiment() -> Experiment {
    Experiment::EtSim
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<EtConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<SpinConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, None)
}

/// As [`parse_config`], replacing the experiment before validation.
pub fn parse_config_with(text: &str, experiment: Option<Experiment>) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let mut cfg = from_value(value)?;
    if let Some(e) = experiment {
        cfg.experiment = e;
    }
    cfg.validate()
}

fn from_value(value: Value) -> Result<RunConfig, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        invalid(if path == "." { "<root>".to_string() } else { path }, e.inner().to_string())
    })
}

fn validate_model(cfg: &EtConfig) -> Result<(), ConfigError> {
    match cfg.validate() {
        Ok(_) => Ok(()),
        Err(EtError::InvalidConfig { field, reason }) => Err(invalid(format!("model.{field}"), reason)),
        Err(e @ EtError::DegenerateManifold { .. }) => Err(invalid("model.resonant_flag", e.to_string())),
        Err(e) => Err(invalid("model", e.to_string())),
    }
}

impl RunConfig {
    /// Applies section defaults and checks every value.
    pub fn validate(mut self) -> Result<RunConfig, ConfigError> {
        match self.experiment {
            Experiment::EtSim => {
                self.model.get_or_insert_with(EtConfig::baseline);
            }
            Experiment::RpSim => {
                self.spin.get_or_insert_with(SpinConfig::default);
            }
            Experiment::Verify => {}
            Experiment::Sweep => {
                let sweep = self.sweep.as_ref().ok_or_else(|| invalid("sweep", "required for the sweep experiment"))?;
                match sweep.experiment {
                    Experiment::EtSim => {
                        self.model.get_or_insert_with(EtConfig::baseline);
                    }
                    Experiment::RpSim => {
                        self.spin.get_or_insert_with(SpinConfig::default);
                    }
                    other => {
                        return Err(invalid("sweep.experiment", format!("cannot sweep `{}`", other.name())));
                    }
                }
            }
        }
        if let Some(model) = &self.model {
            validate_model(model)?;
        }
        if let Some(spin) = &self.spin {
            spin.resolve()?;
        }
        if self.experiment == Experiment::Sweep {
            self.sweep_points()?;
        }
        Ok(self)
    }

    /// Copy with derived spin fields written out, as echoed next to outputs.
    pub fn resolved(&self) -> Result<RunConfig, ConfigError> {
        let spin = self.spin.as_ref().map(SpinConfig::filled).transpose()?;
        Ok(RunConfig { spin, ..self.clone() })
    }

    pub fn model(&self) -> Result<&EtConfig, ConfigError> {
        self.model.as_ref().ok_or_else(|| invalid("model", "section is required"))
    }

    pub fn spin(&self) -> Result<ResolvedSpin, ConfigError> {
        self.spin.as_ref().ok_or_else(|| invalid("spin", "section is required"))?.resolve()
    }

    /// One validated configuration per sweep value.
    pub fn sweep_points(&self) -> Result<Vec<RunConfig>, ConfigError> {
        let sweep = self.sweep.as_ref().ok_or_else(|| invalid("sweep", "section is required"))?;
        if sweep.values.is_empty() {
            return Err(invalid("sweep.values", "must be non-empty"));
        }
        let (section, key) = match sweep.parameter.split_once('.') {
            Some((s @ ("model" | "spin"), k)) if !k.is_empty() && !k.contains('.') => (s, k),
            _ => {
                return Err(invalid(
                    "sweep.parameter",
                    format!("`{}` is not of the form model.<field> or spin.<field>", sweep.parameter),
                ))
            }
        };
        let wanted = if sweep.experiment == Experiment::RpSim { "spin" } else { "model" };
        if section != wanted {
            return Err(invalid(
                "sweep.parameter",
                format!("`{}` does not belong to a {} run", sweep.parameter, sweep.experiment.name()),
            ));
        }
        let base = RunConfig {
            experiment: sweep.experiment,
            model: if section == "model" { self.model.clone() } else { None },
            spin: if section == "spin" { self.spin.clone() } else { None },
            output_dir: None,
            seed: self.seed,
            sweep: None,
        };
        let base = serde_json::to_value(&base).map_err(|e| invalid("sweep", e.to_string()))?;

        let mut out = Vec::with_capacity(sweep.values.len());
        for (i, &v) in sweep.values.iter().enumerate() {
            let at = format!("sweep.values[{i}]");
            if !v.is_finite() {
                return Err(invalid(at, "must be finite"));
            }
            let mut value = base.clone();
            let slot = value
                .get_mut(section)
                .and_then(Value::as_object_mut)
                .ok_or_else(|| invalid("sweep.parameter", format!("section `{section}` is missing")))?;
            if let Some(old) = slot.get(key) {
                if !(old.is_number() || old.is_null()) {
                    return Err(invalid("sweep.parameter", format!("`{}` is not a numeric field", sweep.parameter)));
                }
            }
            // Integral values go in as integers so count fields accept them.
            let number = if v.fract() == 0.0 && v.abs() < 9.0e15 { Value::from(v as i64) } else { Value::from(v) };
            slot.insert(key.to_string(), number);
            let point = from_value(value).and_then(RunConfig::validate).map_err(|e| match e {
                ConfigError::Validation { path, reason } => invalid(at.clone(), format!("{path}: {reason}")),
                other => other,
            })?;
            out.push(point);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(e: ConfigError) -> String {
        match e {
            ConfigError::Validation { path, .. } => path,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_et_sim_gets_baseline() {
        let cfg = parse_config(r#"{"experiment": "et-sim"}"#).unwrap();
        assert_eq!(cfg.model, Some(EtConfig::baseline()));
        assert_eq!(cfg.seed, 0);
        assert!(cfg.spin.is_none() && cfg.sweep.is_none());
    }

    #[test]
    fn negative_singlet_rate_names_its_key() {
        let e = parse_config(r#"{"experiment": "rp-sim", "spin": {"k_S": -1}}"#).unwrap_err();
        assert_eq!(path_of(e), "spin.k_S");
    }

    #[test]
    fn malformed_text_is_a_parse_error() {
        assert!(matches!(parse_config("{\"experiment\": "), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse_config(r#"{"experiment": "et-sim", "model": {"lamda": 0.1}}"#).unwrap_err();
        assert_eq!(path_of(e.clone()), "model.lamda");
        assert!(e.to_string().contains("lamda"));
        assert!(parse_config(r#"{"experiment": "verify", "colour": 1}"#).is_err());
    }

    #[test]
    fn model_errors_carry_paths() {
        let e = parse_config(r#"{"experiment": "et-sim", "model": {"manifold_width": 0}}"#).unwrap_err();
        assert_eq!(path_of(e), "model.manifold_width");
        let e = parse_config(r#"{"experiment": "et-sim", "model": {"n_intermediate": 3}}"#).unwrap_err();
        assert_eq!(path_of(e), "model.resonant_flag");
    }

    #[test]
    fn spin_defaults_follow_the_rate_scale() {
        let cfg = parse_config(r#"{"experiment": "rp-sim", "spin": {"k_S": 2}}"#).unwrap();
        let r = cfg.spin().unwrap();
        assert_eq!(r.t_max, 10.0);
        assert_eq!(r.dt, 5e-4);
        assert_eq!(r.stride, 10);
        let echo = cfg.resolved().unwrap().spin.unwrap();
        assert_eq!(echo.t_max, Some(10.0));
    }

    #[test]
    fn spin_step_above_limit_is_rejected() {
        let e = parse_config(r#"{"experiment": "rp-sim", "spin": {"dt": 0.1}}"#).unwrap_err();
        assert_eq!(path_of(e), "spin.dt");
        let e = parse_config(r#"{"experiment": "rp-sim", "spin": {"variants": [{"variant": "plugin", "name": "x"}]}}"#)
            .unwrap_err();
        assert_eq!(path_of(e), "spin.variants[0].name");
        let e = parse_config(
            r#"{"experiment": "rp-sim", "spin": {"variants": [{"variant": "dephasing_family", "eta": -1}]}}"#,
        )
        .unwrap_err();
        assert_eq!(path_of(e), "spin.variants[0].eta");
        let e = parse_config(
            r#"{"experiment": "rp-sim", "spin": {"variants": [{"variant": "haberkorn"}, {"variant": "haberkorn"}]}}"#,
        )
        .unwrap_err();
        assert_eq!(path_of(e), "spin.variants");
    }

    #[test]
    fn hamiltonian_must_be_hermitian() {
        let ok = r#"{"experiment": "rp-sim", "spin": {"h_spin": [[0, [0, 1], 0, 0], [[0, -1], 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}}"#;
        assert!(parse_config(ok).is_ok());
        let bad = r#"{"experiment": "rp-sim", "spin": {"h_spin": [[0, [0, 1], 0, 0], [[0, 1], 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}}"#;
        assert_eq!(path_of(parse_config(bad).unwrap_err()), "spin.h_spin");
    }

    #[test]
    fn sweep_derives_one_config_per_value() {
        let text = r#"{"experiment": "sweep",
            "sweep": {"parameter": "model.lambda", "values": [0.001, 0.002, 0.005, 0.01, 0.02]}}"#;
        let cfg = parse_config(text).unwrap();
        let points = cfg.sweep_points().unwrap();
        assert_eq!(points.len(), 5);
        for (p, v) in points.iter().zip([0.001, 0.002, 0.005, 0.01, 0.02]) {
            assert_eq!(p.experiment, Experiment::EtSim);
            assert_eq!(p.model.as_ref().unwrap().lambda, v);
            assert!(p.sweep.is_none());
        }
    }

    #[test]
    fn sweep_over_counts_and_spin_rates() {
        let text = r#"{"experiment": "sweep", "sweep": {"parameter": "model.n_modes", "values": [10, 20]}}"#;
        let points = parse_config(text).unwrap().sweep_points().unwrap();
        assert_eq!(points[1].model.as_ref().unwrap().n_modes, 20);

        // Step defaults are re-derived for every rate.
        let text =
            r#"{"experiment": "sweep", "sweep": {"parameter": "spin.k_S", "values": [1, 4], "experiment": "rp-sim"}}"#;
        let points = parse_config(text).unwrap().sweep_points().unwrap();
        assert_eq!(points[1].spin().unwrap().dt, 2.5e-4);
    }

    #[test]
    fn sweep_errors() {
        let cases = [
            (r#"{"experiment": "sweep"}"#, "sweep"),
            (r#"{"experiment": "sweep", "sweep": {"parameter": "model.lambda", "values": []}}"#, "sweep.values"),
            (r#"{"experiment": "sweep", "sweep": {"parameter": "lambda", "values": [1]}}"#, "sweep.parameter"),
            (r#"{"experiment": "sweep", "sweep": {"parameter": "spin.k_S", "values": [1]}}"#, "sweep.parameter"),
            (r#"{"experiment": "sweep", "sweep": {"parameter": "model.lambdaa", "values": [1]}}"#, "sweep.values[0]"),
            (r#"{"experiment": "sweep", "sweep": {"parameter": "model.n_modes", "values": [2.5]}}"#, "sweep.values[0]"),
            (
                r#"{"experiment": "sweep", "sweep": {"parameter": "model.lambda", "values": [1], "experiment": "verify"}}"#,
                "sweep.experiment",
            ),
        ];
        for (text, path) in cases {
            assert_eq!(path_of(parse_config(text).unwrap_err()), path, "{text}");
        }
    }

    #[test]
    fn experiment_override() {
        let cfg = parse_config_with(r#"{"experiment": "verify"}"#, Some(Experiment::RpSim)).unwrap();
        assert_eq!(cfg.experiment, Experiment::RpSim);
        assert!(cfg.spin.is_some());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = parse_config(r#"{"experiment": "rp-sim", "seed": 9}"#).unwrap();
        let text = serde_json::to_string(&cfg.resolved().unwrap()).unwrap();
        let again = parse_config(&text).unwrap();
        assert_eq!(again.resolved().unwrap(), cfg.resolved().unwrap());
    }
}
