//! Reactant, intermediate manifold and product-plus-photon model.
//!
//! Basis order is `[R] ++ [P*_i] ++ [(P, 1_k)]`. The product level is the zero
//! of energy, so a product state carrying photon `k` has energy `omega_k`.
//! Manifold and mode grids are cell-centred: `M` states over width `W` sit at
//! `omega_R + W (2i + 1 - M) / 2M`, which makes the density exactly `M / W` and
//! mirror detunings exact negatives of each other.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{HermitianOperator, LinalgError, Propagator, StateVector, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EtError {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("intermediate state {index} at energy {energy} is degenerate with the reactant")]
    DegenerateManifold { index: usize, energy: f64 },

    #[error("golden-rule rates need uniform couplings; per-state tables were supplied")]
    NonUniformCoupling,

    #[error("series must be positive on the fit window; sample {index} is {value}")]
    NonPositiveData { index: usize, value: f64 },

    #[error("fit window holds {found} samples, need at least 2")]
    InsufficientData { found: usize },

    #[error("rates k = {k} and Gamma = {gamma} coincide; use the confluent formula")]
    DegenerateRates { k: f64, gamma: f64 },

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type EtResult<T> = Result<T, EtError>;

fn invalid(field: &str, reason: impl Into<String>) -> EtError {
    EtError::InvalidConfig { field: field.to_string(), reason: reason.into() }
}

/// How the intermediates couple to the photon continuum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayChannels {
    /// Every intermediate couples to the same `K` modes.
    #[default]
    Shared,
    /// Intermediate `i` couples only to its own block of `K` modes.
    Independent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EtConfig {
    #[serde(rename = "omega_R")]
    pub omega_r: f64,
    pub n_intermediate: usize,
    pub manifold_width: f64,
    pub lambda: f64,
    /// Per-intermediate tunnelling couplings; overrides `lambda`.
    pub lambda_list: Option<Vec<f64>>,
    pub n_modes: usize,
    pub mode_width: f64,
    pub g: f64,
    /// `c[i][k]`, one row per intermediate; overrides `g`.
    pub coupling_table: Option<Vec<Vec<f64>>>,
    pub decay_channels: DecayChannels,
    /// Adds one intermediate exactly at `omega_R` (even `M`); for odd `M` the
    /// centre cell already sits there.
    pub resonant_flag: bool,
    /// Grid indices dropped from the manifold before assembly.
    pub removed_intermediates: Vec<usize>,
    pub t_max: f64,
    pub dt_sample: f64,
    pub fit_window: [f64; 2],
}

impl Default for EtConfig {
    fn default() -> Self {
        Self::baseline()
    }
}

impl EtConfig {
    /// Shared continuum, `Gamma / k = 9`, densities 100 per unit energy.
    pub fn baseline() -> Self {
        Self {
            omega_r: 10.0,
            n_intermediate: 200,
            manifold_width: 2.0,
            lambda: 0.01,
            lambda_list: None,
            n_modes: 200,
            mode_width: 2.0,
            g: 0.03,
            coupling_table: None,
            decay_channels: DecayChannels::Shared,
            resonant_flag: false,
            removed_intermediates: Vec::new(),
            t_max: 80.0,
            dt_sample: 0.5,
            fit_window: [5.0, 50.0],
        }
    }

    /// Baseline tunnelling with the decay coupling switched off.
    pub fn golden_rule() -> Self {
        Self { g: 0.0, ..Self::baseline() }
    }

    /// Independent decay channels tuned so that `k = 2 pi 0.01` and
    /// `Gamma = 9k`, with recurrences beyond `t = 50`.
    pub fn two_step_kinetics() -> Self {
        Self {
            n_intermediate: 40,
            manifold_width: 12.0,
            lambda: 0.003_f64.sqrt(),
            n_modes: 26,
            mode_width: 3.0,
            g: (0.27_f64 / 26.0).sqrt(),
            decay_channels: DecayChannels::Independent,
            ..Self::baseline()
        }
    }

    /// Validates the configuration, returning advisory warnings.
    pub fn validate(&self) -> EtResult<Vec<String>> {
        let finite = |field: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, "must be finite"))
            }
        };
        finite("omega_R", self.omega_r)?;
        finite("lambda", self.lambda)?;
        finite("g", self.g)?;
        if self.n_intermediate == 0 {
            return Err(invalid("n_intermediate", "must be at least 1"));
        }
        if self.n_modes == 0 {
            return Err(invalid("n_modes", "must be at least 1"));
        }
        if !(self.manifold_width > 0.0 && self.manifold_width.is_finite()) {
            return Err(invalid("manifold_width", "must be positive"));
        }
        if !(self.mode_width > 0.0 && self.mode_width.is_finite()) {
            return Err(invalid("mode_width", "must be positive"));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(invalid("t_max", "must be non-negative"));
        }
        if !(self.dt_sample > 0.0 && self.dt_sample.is_finite()) {
            return Err(invalid("dt_sample", "must be positive"));
        }
        let [t0, t1] = self.fit_window;
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return Err(invalid("fit_window", "must be an increasing pair"));
        }
        for &r in &self.removed_intermediates {
            if r >= self.n_intermediate {
                return Err(invalid("removed_intermediates", format!("index {r} out of range")));
            }
        }
        let m = self.manifold_detunings().len();
        if m == 0 {
            return Err(invalid("removed_intermediates", "no intermediates left"));
        }
        if let Some(list) = &self.lambda_list {
            if list.len() != m {
                return Err(invalid("lambda_list", format!("expected {m} entries, found {}", list.len())));
            }
            if list.iter().any(|v| !v.is_finite()) {
                return Err(invalid("lambda_list", "entries must be finite"));
            }
        }
        if let Some(table) = &self.coupling_table {
            if table.len() != m || table.iter().any(|row| row.len() != self.n_modes) {
                return Err(invalid("coupling_table", format!("expected {m} rows of {} entries", self.n_modes)));
            }
            if table.iter().flatten().any(|v| !v.is_finite()) {
                return Err(invalid("coupling_table", "entries must be finite"));
            }
        }
        if !self.resonant_flag {
            let detunings = self.manifold_detunings();
            if let Some(index) = detunings.iter().position(|d| d.abs() < 1e-12) {
                return Err(EtError::DegenerateManifold { index, energy: self.omega_r + detunings[index] });
            }
        }

        let mut warnings = Vec::new();
        let heisenberg = self.heisenberg_time();
        if self.t_max >= 0.5 * heisenberg {
            warnings.push(format!(
                "t_max = {} exceeds half the manifold Heisenberg time {heisenberg:.3}; expect recurrences",
                self.t_max
            ));
        }
        let mode_recurrence = 2.0 * PI * self.n_modes as f64 / self.mode_width;
        if self.g != 0.0 && self.t_max >= mode_recurrence {
            warnings.push(format!(
                "t_max = {} exceeds the photon-continuum recurrence time {mode_recurrence:.3}",
                self.t_max
            ));
        }
        Ok(warnings)
    }

    /// `2 pi / spacing` for the intermediate grid.
    pub fn heisenberg_time(&self) -> f64 {
        2.0 * PI * self.n_intermediate as f64 / self.manifold_width
    }

    pub fn manifold_density(&self) -> f64 {
        self.n_intermediate as f64 / self.manifold_width
    }

    pub fn mode_density(&self) -> f64 {
        self.n_modes as f64 / self.mode_width
    }

    /// Detunings `omega_P*_i - omega_R` after removals and resonant insertion,
    /// in ascending order.
    pub fn manifold_detunings(&self) -> Vec<f64> {
        let m = self.n_intermediate;
        let mut out: Vec<f64> = cell_grid(m, self.manifold_width)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !self.removed_intermediates.contains(i))
            .map(|(_, d)| d)
            .collect();
        if self.resonant_flag && m.is_multiple_of(2) {
            let pos = out.partition_point(|&d| d < 0.0);
            out.insert(pos, 0.0);
        }
        out
    }

    /// The full cell-centred manifold grid, before removals or insertion.
    pub fn grid_detunings(&self) -> Vec<f64> {
        cell_grid(self.n_intermediate, self.manifold_width)
    }

    pub fn mode_detunings(&self) -> Vec<f64> {
        cell_grid(self.n_modes, self.mode_width)
    }

    /// Sample times `0, dt, 2dt, ...` up to `t_max`.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt_sample + 1e-9).floor() as usize;
        (0..=n).map(|j| j as f64 * self.dt_sample).collect()
    }
}

/// Cell-centred offsets `W (2i + 1 - n) / 2n`; entry `n-1-i` is the exact
/// negative of entry `i`.
fn cell_grid(n: usize, width: f64) -> Vec<f64> {
    (0..n).map(|i| width * ((2 * i + 1) as f64 - n as f64) / (2 * n) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisLabel {
    Reactant,
    Intermediate(usize),
    /// Product with one photon; `channel` is set for independent channels.
    Product {
        channel: Option<usize>,
        mode: usize,
    },
}

impl BasisLabel {
    /// Photon occupation carried by the state: `None` for the vacuum.
    pub fn photon(&self) -> Option<(Option<usize>, usize)> {
        match *self {
            BasisLabel::Product { channel, mode } => Some((channel, mode)),
            _ => None,
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Reactant => write!(f, "R"),
            BasisLabel::Intermediate(i) => write!(f, "P*_{i}"),
            BasisLabel::Product { channel: None, mode } => write!(f, "P,1_{mode}"),
            BasisLabel::Product { channel: Some(c), mode } => write!(f, "P,1_({c},{mode})"),
        }
    }
}

/// Assembled model. Immutable after [`build_model`].
#[derive(Clone, Debug)]
pub struct EtModel {
    config: EtConfig,
    detunings: Vec<f64>,
    mode_detunings: Vec<f64>,
    lambdas: Vec<f64>,
    /// `M x K`; for independent channels row `i` addresses channel `i`.
    couplings: Vec<f64>,
    basis: Vec<BasisLabel>,
    energies: Vec<f64>,
    hamiltonian: HermitianOperator,
    warnings: Vec<String>,
}

pub fn build_model(cfg: &EtConfig) -> EtResult<EtModel> {
    let warnings = cfg.validate()?;
    let detunings = cfg.manifold_detunings();
    let mode_detunings = cfg.mode_detunings();
    let m = detunings.len();
    let k = mode_detunings.len();

    let lambdas = cfg.lambda_list.clone().unwrap_or_else(|| vec![cfg.lambda; m]);
    let couplings = match &cfg.coupling_table {
        Some(table) => table.iter().flatten().copied().collect(),
        None => vec![cfg.g; m * k],
    };

    let mut basis = vec![BasisLabel::Reactant];
    basis.extend((0..m).map(BasisLabel::Intermediate));
    match cfg.decay_channels {
        DecayChannels::Shared => {
            basis.extend((0..k).map(|mode| BasisLabel::Product { channel: None, mode }));
        }
        DecayChannels::Independent => {
            for c in 0..m {
                basis.extend((0..k).map(|mode| BasisLabel::Product { channel: Some(c), mode }));
            }
        }
    }
    let energies: Vec<f64> = basis
        .iter()
        .map(|label| match *label {
            BasisLabel::Reactant => cfg.omega_r,
            BasisLabel::Intermediate(i) => cfg.omega_r + detunings[i],
            BasisLabel::Product { mode, .. } => cfg.omega_r + mode_detunings[mode],
        })
        .collect();

    let n = basis.len();
    let mut h = HermitianOperator::from_real_diagonal(&energies);
    for (i, &lam) in lambdas.iter().enumerate() {
        if lam != 0.0 {
            h.set_pair(0, 1 + i, C64::new(lam, 0.0));
        }
    }
    for (p, label) in basis.iter().enumerate().skip(1 + m) {
        if let BasisLabel::Product { channel, mode } = *label {
            let sources: Box<dyn Iterator<Item = usize>> = match channel {
                Some(c) => Box::new(std::iter::once(c)),
                None => Box::new(0..m),
            };
            for i in sources {
                let c = couplings[i * k + mode];
                if c != 0.0 {
                    h.set_pair(1 + i, p, C64::new(c, 0.0));
                }
            }
        }
    }
    debug_assert_eq!(h.dim(), n);

    Ok(EtModel {
        config: cfg.clone(),
        detunings,
        mode_detunings,
        lambdas,
        couplings,
        basis,
        energies,
        hamiltonian: h,
        warnings,
    })
}

impl EtModel {
    pub fn config(&self) -> &EtConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n_intermediate(&self) -> usize {
        self.detunings.len()
    }

    pub fn n_modes(&self) -> usize {
        self.mode_detunings.len()
    }

    pub fn n_product(&self) -> usize {
        self.dim() - 1 - self.n_intermediate()
    }

    pub fn basis(&self) -> &[BasisLabel] {
        &self.basis
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `omega_P*_i - omega_R`.
    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn intermediate_index(&self, i: usize) -> usize {
        1 + i
    }

    pub fn product_index(&self, p: usize) -> usize {
        1 + self.n_intermediate() + p
    }

    /// `delta_p = omega_p - omega_R` for product state `p`.
    pub fn product_detuning(&self, p: usize) -> f64 {
        match self.basis[self.product_index(p)] {
            BasisLabel::Product { mode, .. } => self.mode_detunings[mode],
            _ => unreachable!("product index addresses a product state"),
        }
    }

    /// `c_{i,p}` between intermediate `i` and product state `p`.
    pub fn decay_coupling(&self, i: usize, p: usize) -> f64 {
        match self.basis[self.product_index(p)] {
            BasisLabel::Product { channel: Some(c), mode } if c == i => self.couplings[i * self.n_modes() + mode],
            BasisLabel::Product { channel: None, mode } => self.couplings[i * self.n_modes() + mode],
            _ => 0.0,
        }
    }

    /// Overwrites the reactant-to-product element `H[0][product p]`. The model
    /// has no such coupling by construction; this exists to exercise checks
    /// that rely on that structure.
    pub fn set_direct_coupling(&mut self, p: usize, v: f64) {
        let idx = self.product_index(p);
        self.hamiltonian.set_pair(0, idx, C64::new(v, 0.0));
    }

    /// Whether every tunnelling and decay coupling takes one common value.
    pub fn has_uniform_couplings(&self) -> bool {
        self.config.lambda_list.is_none() && self.config.coupling_table.is_none()
    }

    /// Number of nonzero strictly-upper-triangular Hamiltonian entries.
    pub fn off_diagonal_pairs(&self) -> usize {
        let h = self.hamiltonian.matrix();
        let n = self.dim();
        (0..n).map(|i| h.row(i)[i + 1..].iter().filter(|z| **z != C64::new(0.0, 0.0)).count()).sum()
    }
}

/// Golden-rule rates `(k, Gamma)` with `hbar = 1`.
pub fn golden_rule_rates(model: &EtModel) -> EtResult<(f64, f64)> {
    if !model.has_uniform_couplings() {
        return Err(EtError::NonUniformCoupling);
    }
    let cfg = model.config();
    let k = 2.0 * PI * cfg.lambda * cfg.lambda * cfg.manifold_density();
    let gamma = 2.0 * PI * cfg.g * cfg.g * cfg.mode_density();
    Ok((k, gamma))
}

/// Schrödinger-picture amplitudes on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveTrajectory {
    pub times: Vec<f64>,
    pub c_r: Vec<C64>,
    /// `c_pstar[i][j]`: intermediate `i` at sample `j`.
    pub c_pstar: Vec<Vec<C64>>,
    /// `c_pk[p][j]`: product state `p` at sample `j`.
    pub c_pk: Vec<Vec<C64>>,
    /// Basis label of every amplitude, `[R] ++ [P*_i] ++ [(P, 1_k)]`.
    pub labels: Vec<BasisLabel>,
}

impl WaveTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Full amplitude vector at sample `j`, in basis order.
    pub fn state(&self, j: usize) -> Vec<C64> {
        std::iter::once(self.c_r[j])
            .chain(self.c_pstar.iter().map(|row| row[j]))
            .chain(self.c_pk.iter().map(|row| row[j]))
            .collect()
    }
}

/// Exact propagation from `|R>` at the model's sample times.
pub fn propagate_exact(model: &EtModel) -> EtResult<WaveTrajectory> {
    propagate_exact_at(model, &model.config().sample_times())
}

pub fn propagate_exact_at(model: &EtModel, times: &[f64]) -> EtResult<WaveTrajectory> {
    let prop = Propagator::new(model.hamiltonian())?;
    let states = prop.trajectory(&StateVector::basis(model.dim(), 0), times)?;
    let m = model.n_intermediate();
    let np = model.n_product();
    let mut c_r = Vec::with_capacity(times.len());
    let mut c_pstar = vec![Vec::with_capacity(times.len()); m];
    let mut c_pk = vec![Vec::with_capacity(times.len()); np];
    for s in &states {
        let a = s.amplitudes();
        c_r.push(a[0]);
        for (row, &z) in c_pstar.iter_mut().zip(&a[1..1 + m]) {
            row.push(z);
        }
        for (row, &z) in c_pk.iter_mut().zip(&a[1 + m..]) {
            row.push(z);
        }
    }
    Ok(WaveTrajectory { times: times.to_vec(), c_r, c_pstar, c_pk, labels: model.basis().to_vec() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Populations {
    pub times: Vec<f64>,
    pub p_r: Vec<f64>,
    pub p_pstar: Vec<f64>,
    pub p_p: Vec<f64>,
}

pub fn populations(traj: &WaveTrajectory) -> Populations {
    let sum_sq = |rows: &[Vec<C64>], j: usize| rows.iter().map(|r| r[j].norm_sqr()).sum::<f64>();
    let n = traj.len();
    Populations {
        times: traj.times.clone(),
        p_r: traj.c_r.iter().map(|z| z.norm_sqr()).collect(),
        p_pstar: (0..n).map(|j| sum_sq(&traj.c_pstar, j)).collect(),
        p_p: (0..n).map(|j| sum_sq(&traj.c_pk, j)).collect(),
    }
}

/// Sequential first-order kinetics `R -> P* -> P`.
pub fn classical_two_step(k: f64, gamma: f64, times: &[f64]) -> EtResult<Populations> {
    check_rate("k", k)?;
    check_rate("Gamma", gamma)?;
    if (k - gamma).abs() < 1e-12 * k.max(gamma) {
        return Err(EtError::DegenerateRates { k, gamma });
    }
    let mut out = Populations { times: times.to_vec(), p_r: vec![], p_pstar: vec![], p_p: vec![] };
    for &t in times {
        let (ek, eg) = ((-k * t).exp(), (-gamma * t).exp());
        out.p_r.push(ek);
        out.p_pstar.push(k * (ek - eg) / (gamma - k));
        out.p_p.push(1.0 - (gamma * ek - k * eg) / (gamma - k));
    }
    Ok(out)
}

/// The `Gamma = k` limit of [`classical_two_step`].
pub fn classical_two_step_confluent(k: f64, times: &[f64]) -> EtResult<Populations> {
    check_rate("k", k)?;
    let mut out = Populations { times: times.to_vec(), p_r: vec![], p_pstar: vec![], p_p: vec![] };
    for &t in times {
        let ek = (-k * t).exp();
        out.p_r.push(ek);
        out.p_pstar.push(k * t * ek);
        out.p_p.push(1.0 - ek * (1.0 + k * t));
    }
    Ok(out)
}

fn check_rate(field: &str, v: f64) -> EtResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, "rate must be positive"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedCoherence {
    /// `<R| Tr_photons |psi><psi| |P>` per sample.
    pub rho_rp: Vec<C64>,
    /// `max_k |c_R conj(c_{P,k})|` per sample.
    pub per_mode_bound: Vec<f64>,
}

/// Electronic R-P coherence after tracing out the photon field.
///
/// The trace pairs basis states with equal photon occupation, so the element
/// collects `c(R, n) conj(c(P, n))` over every photon configuration `n` shared
/// by a reactant and a product state.
pub fn reduced_coherence(traj: &WaveTrajectory) -> ReducedCoherence {
    let m = traj.c_pstar.len();
    let photon_of = |idx: usize| traj.labels[idx].photon();
    // Reactant basis indices (only `0` in this model) and product indices
    // grouped by their photon configuration.
    let reactants: Vec<usize> = (0..traj.labels.len()).filter(|&i| traj.labels[i] == BasisLabel::Reactant).collect();
    let products: Vec<usize> = (1 + m..traj.labels.len()).collect();
    let pairs: Vec<(usize, usize)> = reactants
        .iter()
        .flat_map(|&r| products.iter().map(move |&p| (r, p)))
        .filter(|&(r, p)| photon_of(r) == photon_of(p))
        .collect();

    let mut rho_rp = Vec::with_capacity(traj.len());
    let mut per_mode_bound = Vec::with_capacity(traj.len());
    for j in 0..traj.len() {
        let amp = |idx: usize| if idx == 0 { traj.c_r[j] } else { traj.c_pk[idx - 1 - m][j] };
        rho_rp.push(pairs.iter().map(|&(r, p)| amp(r) * amp(p).conj()).sum());
        let cr = traj.c_r[j].norm();
        per_mode_bound.push(traj.c_pk.iter().map(|row| cr * row[j].norm()).fold(0.0, f64::max));
    }
    ReducedCoherence { rho_rp, per_mode_bound }
}

/// Negated least-squares slope of `ln(series)` over samples with
/// `t0 <= t <= t1`.
pub fn fit_decay_rate(times: &[f64], series: &[f64], window: [f64; 2]) -> EtResult<f64> {
    if times.len() != series.len() {
        return Err(EtError::Linalg(LinalgError::DimensionMismatch { expected: times.len(), found: series.len() }));
    }
    let [t0, t1] = window;
    let mut pts = Vec::new();
    for (index, (&t, &y)) in times.iter().zip(series).enumerate() {
        if t < t0 || t > t1 {
            continue;
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(EtError::NonPositiveData { index, value: y });
        }
        pts.push((t, y.ln()));
    }
    if pts.len() < 2 {
        return Err(EtError::InsufficientData { found: pts.len() });
    }
    // Offsets from the first point keep a constant series exactly flat.
    let (ta, ya) = pts[0];
    let n = pts.len() as f64;
    let mt = pts.iter().map(|(t, _)| t - ta).sum::<f64>() / n;
    let my = pts.iter().map(|(_, y)| y - ya).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, y) in &pts {
        let dx = t - ta - mt;
        sxy += dx * (y - ya - my);
        sxx += dx * dx;
    }
    Ok(-(sxy / sxx))
}
