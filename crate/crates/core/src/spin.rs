//! Radical-pair spin master equations on the basis `{S, T+, T0, T-}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    ops, purity, rk4_evolve, von_neumann_entropy, CMatrix, DensityMatrix, HermitianOperator, LinalgError, C64,
};

pub const SPIN_LABELS: [&str; 4] = ["S", "T+", "T0", "T-"];
pub const S: usize = 0;
pub const T_PLUS: usize = 1;
pub const T0: usize = 2;
pub const T_MINUS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("plugin `{name}` violates the superoperator contract: {reason}")]
    PluginContractViolation { name: String, reason: String },

    #[error("no plugin registered under `{0}`")]
    UnknownPlugin(String),

    #[error("closed form requires a vanishing spin Hamiltonian")]
    NonzeroHamiltonian,

    #[error("population vanished at sample {index} (trace {trace:e})")]
    VanishedPopulation { index: usize, trace: f64 },

    #[error("time step {dt} exceeds the stability limit {limit}")]
    TimeStepTooLarge { dt: f64, limit: f64 },

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type SpinResult<T> = Result<T, SpinError>;

/// `(Q_S, Q_T)` with `Q_S = |S><S|` and `Q_T = I - Q_S`.
pub fn projectors() -> (HermitianOperator, HermitianOperator) {
    (
        HermitianOperator::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]),
        HermitianOperator::from_real_diagonal(&[0.0, 1.0, 1.0, 1.0]),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct RpParams {
    pub k_s: f64,
    pub k_t: f64,
    pub h_spin: HermitianOperator,
}

impl RpParams {
    /// Zero-field parameters.
    pub fn new(k_s: f64, k_t: f64) -> SpinResult<Self> {
        Self::with_hamiltonian(k_s, k_t, HermitianOperator::zeros(4))
    }

    pub fn with_hamiltonian(k_s: f64, k_t: f64, h_spin: HermitianOperator) -> SpinResult<Self> {
        for (field, v) in [("k_S", k_s), ("k_T", k_t)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SpinError::InvalidParameter {
                    field: field.to_string(),
                    reason: format!("rate must be finite and non-negative, got {v}"),
                });
            }
        }
        if h_spin.dim() != 4 {
            return Err(SpinError::InvalidParameter {
                field: "H_spin".to_string(),
                reason: format!("expected a 4x4 operator, got {}x{}", h_spin.dim(), h_spin.dim()),
            });
        }
        Ok(Self { k_s, k_t, h_spin })
    }

    pub fn has_zero_field(&self) -> bool {
        self.h_spin.matrix().max_abs() == 0.0
    }

    /// Largest rate scale: `max(k_S, k_T, max|H|)`.
    pub fn rate_scale(&self) -> f64 {
        self.k_s.max(self.k_t).max(self.h_spin.matrix().max_abs())
    }
}

/// Right-hand side `d rho / dt` contributed by a named plug-in.
///
/// Implementations must return a Hermitian matrix whose trace does not exceed
/// zero, and must be pure functions of their inputs.
pub trait Superoperator: Send + Sync {
    fn apply(&self, params: &RpParams, rho: &CMatrix) -> CMatrix;
}

impl<F> Superoperator for F
where
    F: Fn(&RpParams, &CMatrix) -> CMatrix + Send + Sync,
{
    fn apply(&self, params: &RpParams, rho: &CMatrix) -> CMatrix {
        self(params, rho)
    }
}

/// Dephasing strength of the built-in `measurement_standin` plug-in.
pub const STANDIN_ETA: f64 = 0.5;

#[derive(Clone, Default)]
pub struct PluginRegistry {
    plugins: BTreeMap<String, Arc<dyn Superoperator>>,
}

impl fmt::Debug for PluginRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.plugins.keys()).finish()
    }
}

impl PluginRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry holding `measurement_standin`: the dephasing family at
    /// `eta = 0.5`, a qualitative stand-in for a measurement-based equation.
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("measurement_standin", |p: &RpParams, rho: &CMatrix| dephasing_family(p, rho, STANDIN_ETA));
        reg
    }

    pub fn register(&mut self, name: &str, op: impl Superoperator + 'static) {
        self.plugins.insert(name.to_string(), Arc::new(op));
    }

    pub fn get(&self, name: &str) -> Option<&dyn Superoperator> {
        self.plugins.get(name).map(|p| p.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.plugins.keys().map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum MasterEquation {
    Haberkorn,
    JonesHore,
    #[serde(rename = "dephasing_family")]
    Dephasing {
        eta: f64,
    },
    Plugin {
        name: String,
    },
}

impl MasterEquation {
    /// Column-friendly identifier.
    pub fn label(&self) -> String {
        match self {
            MasterEquation::Haberkorn => "haberkorn".into(),
            MasterEquation::JonesHore => "jones_hore".into(),
            MasterEquation::Dephasing { eta } => format!("dephasing_eta_{eta}"),
            MasterEquation::Plugin { name } => name.clone(),
        }
    }

    pub fn validate(&self) -> SpinResult<()> {
        if let MasterEquation::Dephasing { eta } = self {
            if !(*eta >= 0.0 && eta.is_finite()) {
                return Err(SpinError::InvalidParameter {
                    field: "eta".to_string(),
                    reason: format!("must be finite and non-negative, got {eta}"),
                });
            }
        }
        Ok(())
    }
}

fn q_s_rho(rho: &CMatrix) -> CMatrix {
    CMatrix::from_fn(4, |i, j| if i == S { rho[(i, j)] } else { C64::new(0.0, 0.0) })
}

fn rho_q_s(rho: &CMatrix) -> CMatrix {
    CMatrix::from_fn(4, |i, j| if j == S { rho[(i, j)] } else { C64::new(0.0, 0.0) })
}

/// `D_S[rho] = Q_S rho + rho Q_S - 2 Q_S rho Q_S`: the singlet-triplet
/// coherence blocks, traceless.
pub fn singlet_dephasing(rho: &CMatrix) -> CMatrix {
    let (q_s, _) = projectors();
    let qsq = ops::sandwich(q_s.matrix(), rho).expect("4x4 operands");
    q_s_rho(rho).add_scaled(&rho_q_s(rho), 1.0).add_scaled(&qsq, -2.0)
}

fn unitary_part(params: &RpParams, rho: &CMatrix) -> CMatrix {
    if params.has_zero_field() {
        return CMatrix::zeros(4);
    }
    let c = ops::commutator(params.h_spin.matrix(), rho).expect("4x4 operands");
    c.scaled(C64::new(0.0, -1.0))
}

/// `-i[H, rho] - (k_S/2){Q_S, rho} - (k_T/2){Q_T, rho}`.
pub fn haberkorn(params: &RpParams, rho: &CMatrix) -> CMatrix {
    let (q_s, q_t) = projectors();
    let a_s = ops::anticommutator(q_s.matrix(), rho).expect("4x4 operands");
    let a_t = ops::anticommutator(q_t.matrix(), rho).expect("4x4 operands");
    unitary_part(params, rho).add_scaled(&a_s, -params.k_s / 2.0).add_scaled(&a_t, -params.k_t / 2.0)
}

/// `-i[H, rho] - k_S (rho - Q_T rho Q_T) - k_T (rho - Q_S rho Q_S)`.
pub fn jones_hore(params: &RpParams, rho: &CMatrix) -> CMatrix {
    let (q_s, q_t) = projectors();
    let qtq = ops::sandwich(q_t.matrix(), rho).expect("4x4 operands");
    let qsq = ops::sandwich(q_s.matrix(), rho).expect("4x4 operands");
    unitary_part(params, rho)
        .add_scaled(&rho.add_scaled(&qtq, -1.0), -params.k_s)
        .add_scaled(&rho.add_scaled(&qsq, -1.0), -params.k_t)
}

/// Haberkorn plus `-eta (k_S + k_T)/2 D_S[rho]`; `eta = 1` is Jones-Hore.
pub fn dephasing_family(params: &RpParams, rho: &CMatrix, eta: f64) -> CMatrix {
    haberkorn(params, rho).add_scaled(&singlet_dephasing(rho), -eta * (params.k_s + params.k_t) / 2.0)
}

/// `Tr(d rho/dt)` implied by recombination: `-k_S Tr(Q_S rho) - k_T Tr(Q_T rho)`.
pub fn trace_flow(params: &RpParams, rho: &CMatrix) -> f64 {
    let pop_s = rho[(S, S)].re;
    let pop_t = rho.trace().re - pop_s;
    -params.k_s * pop_s - params.k_t * pop_t
}

/// `d rho / dt` for the selected master equation.
pub fn liouvillian(
    spec: &MasterEquation,
    params: &RpParams,
    rho: &CMatrix,
    registry: &PluginRegistry,
) -> SpinResult<CMatrix> {
    if rho.dim() != 4 {
        return Err(LinalgError::DimensionMismatch { expected: 4, found: rho.dim() }.into());
    }
    match spec {
        MasterEquation::Haberkorn => Ok(haberkorn(params, rho)),
        MasterEquation::JonesHore => Ok(jones_hore(params, rho)),
        MasterEquation::Dephasing { eta } => Ok(dephasing_family(params, rho, *eta)),
        MasterEquation::Plugin { name } => {
            let op = registry.get(name).ok_or_else(|| SpinError::UnknownPlugin(name.clone()))?;
            let out = op.apply(params, rho);
            check_plugin_output(name, rho, &out)?;
            Ok(out)
        }
    }
}

fn check_plugin_output(name: &str, rho: &CMatrix, out: &CMatrix) -> SpinResult<()> {
    let violation = |reason: String| SpinError::PluginContractViolation { name: name.to_string(), reason };
    if out.dim() != 4 {
        return Err(violation(format!("returned a {}x{} matrix", out.dim(), out.dim())));
    }
    if !out.is_finite() {
        return Err(violation("returned non-finite entries".into()));
    }
    let scale = out.max_abs().max(rho.max_abs()).max(f64::MIN_POSITIVE);
    let dev = out.hermitian_deviation();
    if dev > 1e-12 * scale {
        return Err(violation(format!("output is not Hermitian (deviation {dev:e})")));
    }
    let tr = out.trace().re;
    if tr > 1e-12 * scale {
        return Err(violation(format!("output increases the trace at rate {tr:e}")));
    }
    Ok(())
}

/// `E rho0 E` with `E = exp(-(k_S Q_S + k_T Q_T) t / 2)`.
pub fn closed_form_haberkorn(params: &RpParams, rho0: &DensityMatrix, t: f64) -> SpinResult<DensityMatrix> {
    closed_form_zero_field(params, rho0, t, 0.0)
}

/// Zero-field solution of the dephasing family: the SS block decays at `k_S`,
/// the TT block at `k_T` and the S-T coherences at `(1 + eta)(k_S + k_T)/2`.
/// `eta = 0` is Haberkorn and `eta = 1` Jones-Hore.
pub fn closed_form_zero_field(params: &RpParams, rho0: &DensityMatrix, t: f64, eta: f64) -> SpinResult<DensityMatrix> {
    if !params.has_zero_field() {
        return Err(SpinError::NonzeroHamiltonian);
    }
    if rho0.dim() != 4 {
        return Err(LinalgError::DimensionMismatch { expected: 4, found: rho0.dim() }.into());
    }
    let ss = (-params.k_s * t).exp();
    let tt = (-params.k_t * t).exp();
    let st = (-(1.0 + eta) * (params.k_s + params.k_t) * t / 2.0).exp();
    let r = rho0.matrix();
    let m = CMatrix::from_fn(4, |i, j| {
        let f = match (i == S, j == S) {
            (true, true) => ss,
            (false, false) => tt,
            _ => st,
        };
        r[(i, j)] * f
    });
    Ok(DensityMatrix::new(m)?)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `(|S> + |T0>) / sqrt 2`.
    #[default]
    SingletT0Superposition,
    Singlet,
    TripletZero,
    /// `I / 4`.
    MaximallyMixed,
}

impl InitialState {
    pub fn density_matrix(self) -> DensityMatrix {
        let mut m = CMatrix::zeros(4);
        match self {
            InitialState::SingletT0Superposition => {
                for (i, j) in [(S, S), (S, T0), (T0, S), (T0, T0)] {
                    m[(i, j)] = C64::new(0.5, 0.0);
                }
            }
            InitialState::Singlet => m[(S, S)] = C64::new(1.0, 0.0),
            InitialState::TripletZero => m[(T0, T0)] = C64::new(1.0, 0.0),
            InitialState::MaximallyMixed => m = CMatrix::identity(4).scaled_real(0.25),
        }
        DensityMatrix::new(m).expect("valid initial state")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

/// Largest step `evolve` accepts: `0.01 / max(k_S, k_T, max|H|, 1e-12)`.
pub fn max_time_step(params: &RpParams) -> f64 {
    0.01 / params.rate_scale().max(1e-12)
}

/// RK4 integration of `spec` from `rho0` over `[0, t_max]`.
pub fn evolve(
    spec: &MasterEquation,
    params: &RpParams,
    rho0: &DensityMatrix,
    t_max: f64,
    dt: f64,
    registry: &PluginRegistry,
) -> SpinResult<SpinTrajectory> {
    spec.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(LinalgError::InvalidTimeStep(dt).into());
    }
    let limit = max_time_step(params);
    if dt > limit * (1.0 + 1e-12) {
        return Err(SpinError::TimeStepTooLarge { dt, limit });
    }
    integrate(spec, params, rho0, t_max, dt, registry)
}

/// As [`evolve`] without the step-size precondition; for convergence studies.
pub fn integrate(
    spec: &MasterEquation,
    params: &RpParams,
    rho0: &DensityMatrix,
    t_max: f64,
    dt: f64,
    registry: &PluginRegistry,
) -> SpinResult<SpinTrajectory> {
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(SpinError::InvalidParameter { field: "t_max".into(), reason: "must be non-negative".into() });
    }
    let n_steps = (t_max / dt).round() as usize;
    let states = rk4_evolve(|rho: &CMatrix| liouvillian(spec, params, rho, registry), rho0, dt, n_steps)?;
    let times = (0..=n_steps).map(|j| j as f64 * dt).collect();
    Ok(SpinTrajectory { times, states })
}

fn normalized_states(traj: &SpinTrajectory) -> SpinResult<Vec<DensityMatrix>> {
    traj.states
        .iter()
        .enumerate()
        .map(|(index, rho)| {
            let trace = rho.trace();
            if trace > 1e-12 {
                Ok(rho.normalized())
            } else {
                Err(SpinError::VanishedPopulation { index, trace })
            }
        })
        .collect()
}

/// Von Neumann entropy (nats) of `rho / Tr rho` at every sample.
pub fn entropy_series(traj: &SpinTrajectory) -> SpinResult<Vec<f64>> {
    normalized_states(traj)?.iter().map(|r| Ok(von_neumann_entropy(r)?)).collect()
}

/// `Tr(rho_hat^2)` of the normalised state at every sample.
pub fn purity_series(traj: &SpinTrajectory) -> SpinResult<Vec<f64>> {
    Ok(normalized_states(traj)?.iter().map(purity).collect())
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Yields {
    pub singlet: Vec<f64>,
    pub triplet: Vec<f64>,
    pub survival: Vec<f64>,
}

/// Cumulative recombination yields by the trapezoid rule, and `Tr rho`.
pub fn yields(traj: &SpinTrajectory, params: &RpParams) -> Yields {
    let mut out = Yields::default();
    let (mut ys, mut yt) = (0.0, 0.0);
    let pops = |rho: &DensityMatrix| {
        let s = rho.matrix()[(S, S)].re;
        (s, rho.trace() - s)
    };
    for (j, rho) in traj.states.iter().enumerate() {
        if j > 0 {
            let h = traj.times[j] - traj.times[j - 1];
            let (s0, t0) = pops(&traj.states[j - 1]);
            let (s1, t1) = pops(rho);
            ys += params.k_s * h * (s0 + s1) / 2.0;
            yt += params.k_t * h * (t0 + t1) / 2.0;
        }
        out.singlet.push(ys);
        out.triplet.push(yt);
        out.survival.push(rho.trace());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4() -> (RpParams, DensityMatrix) {
        (RpParams::new(1.0, 0.0).unwrap(), InitialState::SingletT0Superposition.density_matrix())
    }

    #[test]
    fn projector_algebra() {
        let (q_s, q_t) = projectors();
        let (s, t) = (q_s.matrix(), q_t.matrix());
        assert_eq!(&s.mul_mat(s), s);
        assert_eq!(&t.mul_mat(t), t);
        assert_eq!(s.mul_mat(t).max_abs(), 0.0);
        assert_eq!(s.add_scaled(t, 1.0), CMatrix::identity(4));
        assert_eq!(t.trace().re, 3.0);
    }

    #[test]
    fn negative_rate_is_rejected() {
        assert!(matches!(
            RpParams::new(-1.0, 0.0),
            Err(SpinError::InvalidParameter { ref field, .. }) if field == "k_S"
        ));
        assert!(RpParams::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn zero_rates_give_zero_derivative() {
        let p = RpParams::new(0.0, 0.0).unwrap();
        let rho = InitialState::SingletT0Superposition.density_matrix();
        let reg = PluginRegistry::with_builtins();
        for spec in [
            MasterEquation::Haberkorn,
            MasterEquation::JonesHore,
            MasterEquation::Dephasing { eta: 0.3 },
            MasterEquation::Plugin { name: "measurement_standin".into() },
        ] {
            assert_eq!(liouvillian(&spec, &p, rho.matrix(), &reg).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn haberkorn_initial_derivative() {
        let (p, rho) = fig4();
        let d = haberkorn(&p, rho.matrix());
        assert_eq!(d[(S, S)].re, -0.5);
        assert_eq!(d[(S, T0)].re, -0.25);
        assert_eq!(d[(T0, T0)].re, 0.0);
    }

    #[test]
    fn closed_form_limits() {
        let (p, rho) = fig4();
        assert_eq!(closed_form_haberkorn(&p, &rho, 0.0).unwrap(), rho);
        let late = closed_form_haberkorn(&p, &rho, 60.0).unwrap();
        assert!((late.trace() - 0.5).abs() < 1e-12);
        assert!((late.matrix()[(T0, T0)].re - 0.5).abs() < 1e-15);
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 0.0, -1.0]);
        let p = RpParams::with_hamiltonian(1.0, 0.0, h).unwrap();
        assert_eq!(closed_form_haberkorn(&p, &rho, 1.0), Err(SpinError::NonzeroHamiltonian));
    }

    #[test]
    fn haberkorn_closed_form_stays_pure() {
        let (p, rho) = fig4();
        for t in [0.5, 1.0, 3.0] {
            let r = closed_form_haberkorn(&p, &rho, t).unwrap().normalized();
            assert!(von_neumann_entropy(&r).unwrap() < 1e-9);
        }
    }

    #[test]
    fn plugin_contract_is_enforced() {
        let (p, rho) = fig4();
        let mut reg = PluginRegistry::empty();
        reg.register("pump", |_: &RpParams, r: &CMatrix| r.clone());
        reg.register("skew", |_: &RpParams, r: &CMatrix| {
            let mut m = r.scaled_real(-1.0);
            m[(0, 2)] += C64::new(0.0, 0.0) + C64::new(1.0, 0.0);
            m
        });
        for name in ["pump", "skew"] {
            let spec = MasterEquation::Plugin { name: name.into() };
            assert!(matches!(
                liouvillian(&spec, &p, rho.matrix(), &reg),
                Err(SpinError::PluginContractViolation { .. })
            ));
        }
        let missing = MasterEquation::Plugin { name: "nope".into() };
        assert_eq!(liouvillian(&missing, &p, rho.matrix(), &reg), Err(SpinError::UnknownPlugin("nope".into())));
    }

    #[test]
    fn step_precondition() {
        let (p, rho) = fig4();
        let reg = PluginRegistry::empty();
        assert!(matches!(
            evolve(&MasterEquation::Haberkorn, &p, &rho, 1.0, 0.1, &reg),
            Err(SpinError::TimeStepTooLarge { .. })
        ));
    }

    #[test]
    fn constant_trajectory_without_rates() {
        let p = RpParams::new(0.0, 0.0).unwrap();
        let rho = InitialState::SingletT0Superposition.density_matrix();
        let traj = evolve(&MasterEquation::JonesHore, &p, &rho, 1.0, 0.01, &PluginRegistry::empty()).unwrap();
        assert_eq!(traj.states.len(), 101);
        assert!(traj.states.iter().all(|s| s == &rho));
        let y = yields(&traj, &p);
        assert_eq!(*y.singlet.last().unwrap(), 0.0);
        assert_eq!(*y.survival.last().unwrap(), 1.0);
    }

    #[test]
    fn vanished_population() {
        let rho = DensityMatrix::from_matrix_unchecked(CMatrix::from_real_diagonal(&[1e-13, 0.0, 0.0, 0.0]));
        let traj = SpinTrajectory { times: vec![0.0], states: vec![rho] };
        assert!(matches!(entropy_series(&traj), Err(SpinError::VanishedPopulation { index: 0, .. })));
    }

    #[test]
    fn spec_serde_names() {
        let spec: MasterEquation = serde_json::from_str(r#"{"variant":"dephasing_family","eta":0.5}"#).unwrap();
        assert_eq!(spec, MasterEquation::Dephasing { eta: 0.5 });
        let spec: MasterEquation = serde_json::from_str(r#"{"variant":"jones_hore"}"#).unwrap();
        assert_eq!(spec, MasterEquation::JonesHore);
        assert!(MasterEquation::Dephasing { eta: -1.0 }.validate().is_err());
    }
}
