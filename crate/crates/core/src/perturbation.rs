//! Order-by-order time-dependent perturbation theory for the ET model.
//!
//! Amplitudes use the interaction picture `c_n(t) = exp(+i E_n t) <n|psi(t)>`
//! with `psi(0) = |R>` and `hbar = 1`. Detunings are `Delta_i = omega_P*_i -
//! omega_R` for intermediates and `delta_p = omega_p - omega_R` for product
//! states.

use serde::Serialize;
use thiserror::Error;

use crate::et_model::{propagate_exact_at, EtConfig, EtError, EtModel};
use crate::linalg::{C64, I};

/// Embedded in every comparison report.
pub const PHASE_CONVENTION: &str = "interaction picture: c_n(t) = exp(+i E_n t) <n|psi(t)>, psi(0) = |R>, hbar = 1";

/// Detunings below this magnitude count as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

/// Largest `k t` accepted by [`perturbative_vs_exact`].
pub const REGIME_LIMIT: f64 = 0.3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbationError {
    #[error("intermediate {index} is resonant (detuning {detuning:e}); the off-resonant formula diverges")]
    ResonantDenominator { index: usize, detuning: f64 },

    #[error("no intermediate state is resonant with the reactant")]
    NoResonantState,

    #[error("direct reactant-product coupling {value:e} found for product state {product}")]
    StructuralViolation { product: usize, value: f64 },

    #[error("k * t_max = {kt:.3} exceeds the perturbative limit {limit}")]
    RegimeViolation { kt: f64, limit: f64 },

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },

    #[error(transparent)]
    Model(#[from] EtError),
}

pub type PtResult<T> = Result<T, PerturbationError>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationResult {
    pub order: u8,
    pub target: String,
    pub amplitude: C64,
    pub t: f64,
}

/// `sin(x) / x`, with `sinc(0) = 1`; exactly even.
pub fn sinc(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-4 {
        let a2 = a * a;
        1.0 - a2 / 6.0 + a2 * a2 / 120.0
    } else {
        a.sin() / a
    }
}

/// `int_0^t exp(i a s) ds = t exp(i a t / 2) sinc(a t / 2)`.
pub fn phase_integral(a: f64, t: f64) -> C64 {
    C64::from_polar(t * sinc(a * t / 2.0), a * t / 2.0)
}

/// `int_0^t s exp(i delta s) ds = [exp(ix)(1 - ix) - 1] / delta^2`, `x = delta t`.
///
/// Small `x` uses the series `t^2 sum_{m>=2} (1-m)/m! (ix)^(m-2)`.
pub fn resonant_kernel(delta: f64, t: f64) -> C64 {
    let x = delta * t;
    if x.abs() < 0.5 {
        let mut sum = C64::new(0.0, 0.0);
        // term_m = (ix)^(m-2) / m!; the remaining i^2 is the leading minus sign.
        let mut term = C64::new(0.5, 0.0);
        for m in 2..40 {
            sum += term * (1.0 - m as f64);
            term = term * I * x / (m + 1) as f64;
            if term.norm() < 1e-18 {
                break;
            }
        }
        -sum * (t * t)
    } else {
        (C64::from_polar(1.0, x) * C64::new(1.0, -x) - 1.0) / (delta * delta)
    }
}

fn check_intermediate(model: &EtModel, i: usize) -> PtResult<()> {
    let len = model.n_intermediate();
    if i >= len {
        return Err(PerturbationError::IndexOutOfRange { what: "intermediate", index: i, len });
    }
    Ok(())
}

fn check_product(model: &EtModel, p: usize) -> PtResult<()> {
    let len = model.n_product();
    if p >= len {
        return Err(PerturbationError::IndexOutOfRange { what: "product", index: p, len });
    }
    Ok(())
}

fn product_label(model: &EtModel, p: usize) -> String {
    model.basis()[model.product_index(p)].to_string()
}

/// `c^(1)_{P*_i}(t) = lambda_i (1 - exp(i Delta_i t)) / Delta_i`.
///
/// A resonant state is an error unless `resonant_limit` is set, in which case
/// the limit `-i lambda_i t` is returned.
pub fn first_order_intermediate(
    model: &EtModel,
    i: usize,
    t: f64,
    resonant_limit: bool,
) -> PtResult<PerturbationResult> {
    check_intermediate(model, i)?;
    let delta = model.detunings()[i];
    if delta.abs() < RESONANCE_TOLERANCE && !resonant_limit {
        return Err(PerturbationError::ResonantDenominator { index: i, detuning: delta });
    }
    let lambda = model.lambdas()[i];
    // -i lambda int_0^t exp(i Delta s) ds; equals -i lambda t at resonance.
    let amplitude = -I * lambda * phase_integral(delta, t);
    Ok(PerturbationResult { order: 1, target: format!("P*_{i}"), amplitude, t })
}

/// First-order product amplitude, `-i H[R][p] int_0^t exp(i delta_p s) ds`.
///
/// The model has no direct reactant-product element, so this is zero; a
/// nonzero element is reported as a structural violation.
pub fn first_order_product(model: &EtModel, p: usize, t: f64) -> PtResult<PerturbationResult> {
    check_product(model, p)?;
    let v = model.hamiltonian()[(0, model.product_index(p))];
    if v != C64::new(0.0, 0.0) {
        return Err(PerturbationError::StructuralViolation { product: p, value: v.norm() });
    }
    let amplitude = -I * v * phase_integral(model.product_detuning(p), t);
    Ok(PerturbationResult { order: 1, target: product_label(model, p), amplitude, t })
}

/// `sum_i lambda_i c_{i,p} / Delta_i` and its one-sided parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InnerSum {
    pub total: f64,
    /// Sum over `Delta_i > 0`.
    pub positive: f64,
    /// Sum over `Delta_i < 0`.
    pub negative: f64,
}

/// Inner sum of the off-resonant second-order amplitude.
///
/// Terms whose detunings are exact mirrors are added pairwise before the
/// unpaired remainder, so a symmetric manifold with uniform couplings cancels
/// exactly rather than to round-off.
pub fn inner_sum(model: &EtModel, p: usize) -> PtResult<InnerSum> {
    check_product(model, p)?;
    let mut terms = Vec::with_capacity(model.n_intermediate());
    for (i, (&delta, &lambda)) in model.detunings().iter().zip(model.lambdas()).enumerate() {
        if delta.abs() < RESONANCE_TOLERANCE {
            return Err(PerturbationError::ResonantDenominator { index: i, detuning: delta });
        }
        terms.push((delta, lambda * model.decay_coupling(i, p) / delta));
    }
    Ok(pairwise_inner_sum(&terms))
}

fn pairwise_inner_sum(terms: &[(f64, f64)]) -> InnerSum {
    let mut sorted = terms.to_vec();
    sorted.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.0.total_cmp(&b.0)));
    let (mut paired, mut unpaired) = (0.0, 0.0);
    let (mut positive, mut negative) = (0.0, 0.0);
    let mut j = 0;
    while j < sorted.len() {
        let (d, v) = sorted[j];
        if d > 0.0 {
            positive += v;
        } else {
            negative += v;
        }
        if j + 1 < sorted.len() && sorted[j + 1].0 == -d {
            let w = sorted[j + 1].1;
            if d > 0.0 {
                negative += w;
            } else {
                positive += w;
            }
            paired += v + w;
            j += 2;
        } else {
            unpaired += v;
            j += 1;
        }
    }
    InnerSum { total: paired + unpaired, positive, negative }
}

/// Off-resonant second-order product amplitude,
/// `i t exp(i delta_p t/2) sinc(delta_p t/2) sum_i lambda_i c_{i,p} / Delta_i`.
///
/// This keeps the secular term only; see [`second_order_product_complete`].
pub fn second_order_product(model: &EtModel, p: usize, t: f64) -> PtResult<PerturbationResult> {
    let sum = inner_sum(model, p)?;
    let amplitude = I * phase_integral(model.product_detuning(p), t) * sum.total;
    Ok(PerturbationResult { order: 2, target: product_label(model, p), amplitude, t })
}

/// `int_0^t ds exp(i (delta - Delta) s) int_0^s ds' exp(i Delta s')`.
fn second_order_kernel(delta: f64, big_delta: f64, t: f64) -> C64 {
    if (big_delta * t).abs() < 1e-7 {
        return resonant_kernel(delta, t);
    }
    (phase_integral(delta, t) - phase_integral(delta - big_delta, t)) / (I * big_delta)
}

/// Full second-order amplitude `-sum_i lambda_i c_{i,p} K(delta_p, Delta_i, t)`
/// including the transient term the secular form drops. Resonant
/// intermediates are allowed.
pub fn second_order_product_complete(model: &EtModel, p: usize, t: f64) -> PtResult<PerturbationResult> {
    check_product(model, p)?;
    let delta = model.product_detuning(p);
    let amplitude = model
        .detunings()
        .iter()
        .zip(model.lambdas())
        .enumerate()
        .map(|(i, (&d, &lambda))| {
            let c = model.decay_coupling(i, p);
            if lambda == 0.0 || c == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                -lambda * c * second_order_kernel(delta, d, t)
            }
        })
        .sum();
    Ok(PerturbationResult { order: 2, target: product_label(model, p), amplitude, t })
}

/// Resonant-intermediate contribution to every product amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonantAmplitudes {
    pub t: f64,
    pub detunings: Vec<f64>,
    /// `-lambda c_p [exp(ix)(1 - ix) - 1] / delta_p^2`.
    pub exact: Vec<C64>,
    /// Small-detuning form `-(t^2 / 2) lambda c_p exp(i delta_p t)`.
    pub limit: Vec<C64>,
}

impl ResonantAmplitudes {
    /// `|exact - limit| / |limit|` per product state.
    pub fn relative_limit_error(&self) -> Vec<f64> {
        self.exact.iter().zip(&self.limit).map(|(e, l)| (e - l).norm() / l.norm()).collect()
    }
}

pub fn resonant_index(model: &EtModel) -> PtResult<usize> {
    model.detunings().iter().position(|d| d.abs() < RESONANCE_TOLERANCE).ok_or(PerturbationError::NoResonantState)
}

/// Second-order amplitudes through the intermediate resonant with `|R>`.
pub fn second_order_resonant(model: &EtModel, t: f64) -> PtResult<ResonantAmplitudes> {
    let r = resonant_index(model)?;
    let lambda = model.lambdas()[r];
    let np = model.n_product();
    let mut out = ResonantAmplitudes {
        t,
        detunings: Vec::with_capacity(np),
        exact: Vec::with_capacity(np),
        limit: Vec::with_capacity(np),
    };
    for p in 0..np {
        let delta = model.product_detuning(p);
        let lc = lambda * model.decay_coupling(r, p);
        out.detunings.push(delta);
        out.exact.push(-lc * resonant_kernel(delta, t));
        out.limit.push(-lc * (t * t / 2.0) * C64::from_polar(1.0, delta * t));
    }
    Ok(out)
}

/// `|sum z| / sum |z|`; zero for an all-zero input.
pub fn phase_averaging_ratio(amplitudes: &[C64]) -> f64 {
    let total: f64 = amplitudes.iter().map(|z| z.norm()).sum();
    if total == 0.0 {
        return 0.0;
    }
    amplitudes.iter().sum::<C64>().norm() / total
}

/// Copy of `cfg` with the highest-energy intermediate below `omega_R` removed.
pub fn remove_nearest_subresonant(cfg: &EtConfig) -> EtConfig {
    let grid = cfg.grid_detunings();
    let nearest = grid
        .iter()
        .enumerate()
        .filter(|(i, d)| **d < 0.0 && !cfg.removed_intermediates.contains(i))
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    let mut out = cfg.clone();
    if let Some(i) = nearest {
        out.removed_intermediates.push(i);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeComparison {
    pub product: usize,
    pub label: String,
    pub detuning: f64,
    /// Max over the grid of the exact `|c_p|`.
    pub max_exact: f64,
    /// Max of the leading prediction: secular off-resonant sum plus the
    /// resonant-intermediate term when present.
    pub max_leading: f64,
    pub max_complete: f64,
    pub max_dev_leading: f64,
    pub max_dev_complete: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbativeReport {
    pub convention: String,
    pub k_estimate: f64,
    pub t_max: f64,
    pub max_exact: f64,
    /// `t_max max|lambda| max|c| / min|Delta|`: the size of one unpaired term
    /// of the second-order sum.
    pub second_order_scale: f64,
    /// `second_order_scale / max_exact`; infinite when the exact amplitudes
    /// vanish.
    pub suppression: f64,
    pub modes: Vec<ModeComparison>,
}

fn leading_prediction(model: &EtModel, p: usize, t: f64) -> C64 {
    let delta = model.product_detuning(p);
    let mut terms = Vec::new();
    let mut resonant = C64::new(0.0, 0.0);
    for (i, (&d, &lambda)) in model.detunings().iter().zip(model.lambdas()).enumerate() {
        let lc = lambda * model.decay_coupling(i, p);
        if d.abs() < RESONANCE_TOLERANCE {
            resonant += -lc * resonant_kernel(delta, t);
        } else {
            terms.push((d, lc / d));
        }
    }
    I * phase_integral(delta, t) * pairwise_inner_sum(&terms).total + resonant
}

/// Compares exact product amplitudes with second-order predictions on
/// `t_grid`.
pub fn perturbative_vs_exact(model: &EtModel, t_grid: &[f64]) -> PtResult<PerturbativeReport> {
    let cfg = model.config();
    let t_max = t_grid.iter().copied().fold(0.0, f64::max);
    let mean_lambda_sq = model.lambdas().iter().map(|l| l * l).sum::<f64>() / model.n_intermediate() as f64;
    let k_estimate = 2.0 * std::f64::consts::PI * mean_lambda_sq * cfg.manifold_density();
    if k_estimate * t_max > REGIME_LIMIT {
        return Err(PerturbationError::RegimeViolation { kt: k_estimate * t_max, limit: REGIME_LIMIT });
    }

    let traj = propagate_exact_at(model, t_grid)?;
    let energies = model.energies();
    let mut modes = Vec::with_capacity(model.n_product());
    for p in 0..model.n_product() {
        let e = energies[model.product_index(p)];
        let mut row = ModeComparison {
            product: p,
            label: product_label(model, p),
            detuning: model.product_detuning(p),
            max_exact: 0.0,
            max_leading: 0.0,
            max_complete: 0.0,
            max_dev_leading: 0.0,
            max_dev_complete: 0.0,
        };
        for (j, &t) in t_grid.iter().enumerate() {
            let exact = C64::from_polar(1.0, e * t) * traj.c_pk[p][j];
            let leading = leading_prediction(model, p, t);
            let complete = second_order_product_complete(model, p, t)?.amplitude;
            row.max_exact = row.max_exact.max(exact.norm());
            row.max_leading = row.max_leading.max(leading.norm());
            row.max_complete = row.max_complete.max(complete.norm());
            row.max_dev_leading = row.max_dev_leading.max((exact - leading).norm());
            row.max_dev_complete = row.max_dev_complete.max((exact - complete).norm());
        }
        modes.push(row);
    }

    let max_exact = modes.iter().map(|m| m.max_exact).fold(0.0, f64::max);
    let max_lambda = model.lambdas().iter().map(|l| l.abs()).fold(0.0, f64::max);
    let mut max_c: f64 = 0.0;
    for i in 0..model.n_intermediate() {
        for p in 0..model.n_product() {
            max_c = max_c.max(model.decay_coupling(i, p).abs());
        }
    }
    let min_delta =
        model.detunings().iter().map(|d| d.abs()).filter(|d| *d >= RESONANCE_TOLERANCE).fold(f64::INFINITY, f64::min);
    let second_order_scale = if min_delta.is_finite() { t_max * max_lambda * max_c / min_delta } else { 0.0 };
    let suppression = if max_exact > 0.0 { second_order_scale / max_exact } else { f64::INFINITY };

    Ok(PerturbativeReport {
        convention: PHASE_CONVENTION.to_string(),
        k_estimate,
        t_max,
        max_exact,
        second_order_scale,
        suppression,
        modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::et_model::build_model;

    fn cfg(m: usize, w: f64, k: usize, lambda: f64, g: f64) -> EtConfig {
        EtConfig { n_intermediate: m, manifold_width: w, n_modes: k, lambda, g, ..EtConfig::baseline() }
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        for x in [1e-6, 0.3, 2.0, 17.5] {
            assert_eq!(sinc(x), sinc(-x));
        }
        assert!((sinc(2.0) - 2.0_f64.sin() / 2.0).abs() < 1e-16);
        assert!((sinc(5e-5) - (5e-5_f64).sin() / 5e-5).abs() < 4e-16);
    }

    #[test]
    fn resonant_kernel_series_matches_closed_form() {
        for (delta, t) in [(0.3, 1.0), (0.49, 1.0), (0.51, 1.0), (-0.4, 1.2)] {
            let x: f64 = delta * t;
            let closed = (C64::from_polar(1.0, x) * C64::new(1.0, -x) - 1.0) / (delta * delta);
            assert!((resonant_kernel(delta, t) - closed).norm() < 1e-13);
        }
        assert_eq!(resonant_kernel(0.0, 2.0), C64::new(2.0, 0.0));
    }

    #[test]
    fn first_order_basics() {
        let model = build_model(&cfg(4, 2.0, 3, 0.01, 0.02)).unwrap();
        assert_eq!(first_order_intermediate(&model, 1, 0.0, false).unwrap().amplitude, C64::new(0.0, 0.0));
        let delta = model.detunings()[1];
        let t = 3.0;
        let expected = 0.01 * (1.0 - C64::from_polar(1.0, delta * t)) / delta;
        assert!((first_order_intermediate(&model, 1, t, false).unwrap().amplitude - expected).norm() < 1e-16);

        let zero = build_model(&cfg(4, 2.0, 3, 0.0, 0.02)).unwrap();
        assert_eq!(first_order_intermediate(&zero, 0, t, false).unwrap().amplitude.norm(), 0.0);
    }

    #[test]
    fn first_order_resonant_branch() {
        let model = build_model(&EtConfig { resonant_flag: true, ..cfg(4, 2.0, 3, 0.01, 0.0) }).unwrap();
        let r = resonant_index(&model).unwrap();
        assert!(matches!(
            first_order_intermediate(&model, r, 1.0, false),
            Err(PerturbationError::ResonantDenominator { .. })
        ));
        let a = first_order_intermediate(&model, r, 2.5, true).unwrap().amplitude;
        assert_eq!(a, C64::new(0.0, -0.025));
    }

    #[test]
    fn first_order_product_is_zero_and_structurally_checked() {
        let mut model = build_model(&cfg(4, 2.0, 3, 0.01, 0.02)).unwrap();
        for t in [0.0, 1.0, 7.5] {
            assert_eq!(first_order_product(&model, 2, t).unwrap().amplitude, C64::new(0.0, 0.0));
        }
        model.set_direct_coupling(2, 1e-3);
        assert!(matches!(
            first_order_product(&model, 2, 1.0),
            Err(PerturbationError::StructuralViolation { product: 2, .. })
        ));
    }

    #[test]
    fn single_state_second_order() {
        // Two-state grid with the lower state removed leaves one at +W/4.
        let c = EtConfig { removed_intermediates: vec![0], ..cfg(2, 2.0, 5, 0.01, 0.03) };
        let model = build_model(&c).unwrap();
        let delta_i = model.detunings()[0];
        assert_eq!(delta_i, 0.5);
        let t = 4.0;
        for p in 0..5 {
            let d = model.product_detuning(p);
            let a = second_order_product(&model, p, t).unwrap().amplitude;
            let expected = t * 0.01 * 0.03 * sinc(d * t / 2.0).abs() / delta_i;
            assert!((a.norm() - expected).abs() < 1e-17);
        }
    }

    #[test]
    fn symmetric_sum_cancels_exactly() {
        let model = build_model(&EtConfig::baseline()).unwrap();
        for p in [0, 57, 199] {
            let s = inner_sum(&model, p).unwrap();
            assert_eq!(s.total, 0.0);
            assert!(s.positive > 0.0 && s.negative == -s.positive);
            assert_eq!(second_order_product(&model, p, 12.0).unwrap().amplitude.norm(), 0.0);
        }
    }

    #[test]
    fn deleted_state_leaves_its_partner() {
        let c = remove_nearest_subresonant(&EtConfig::baseline());
        assert_eq!(c.removed_intermediates, vec![99]);
        let model = build_model(&c).unwrap();
        let s = inner_sum(&model, 10).unwrap();
        let deleted = 0.01 * 0.03 / -0.005;
        assert!((s.total + deleted).abs() < 1e-12 * deleted.abs());
    }

    #[test]
    fn resonant_limit_at_zero_detuning() {
        let model = build_model(&EtConfig { resonant_flag: true, ..cfg(4, 2.0, 1, 0.01, 0.02) }).unwrap();
        assert_eq!(model.product_detuning(0), 0.0);
        let t = 3.0;
        let r = second_order_resonant(&model, t).unwrap();
        let expected = -(t * t / 2.0) * 0.01 * 0.02;
        assert!((r.exact[0] - expected).norm() < 1e-18);
        assert!((r.limit[0] - expected).norm() < 1e-18);
        let zero = second_order_resonant(&model, 0.0).unwrap();
        assert_eq!(zero.exact[0].norm(), 0.0);
    }

    #[test]
    fn no_resonant_state() {
        let model = build_model(&cfg(4, 2.0, 3, 0.01, 0.02)).unwrap();
        assert_eq!(second_order_resonant(&model, 1.0), Err(PerturbationError::NoResonantState));
    }

    #[test]
    fn complete_second_order_reduces_to_resonant_form() {
        let model =
            build_model(&EtConfig { resonant_flag: true, lambda_list: None, ..cfg(1, 2.0, 7, 0.01, 0.02) }).unwrap();
        let t = 2.0;
        let r = second_order_resonant(&model, t).unwrap();
        for p in 0..7 {
            let c = second_order_product_complete(&model, p, t).unwrap().amplitude;
            assert!((c - r.exact[p]).norm() < 1e-16);
        }
    }

    #[test]
    fn complete_second_order_matches_double_integral() {
        // Midpoint double quadrature of int_0^t ds e^{i(delta-D)s} int_0^s e^{iDs'} ds'.
        let (delta, big, t) = (0.3, -0.7, 2.0);
        let n = 2000;
        let h = t / n as f64;
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..n {
            let s = (a as f64 + 0.5) * h;
            let inner = phase_integral(big, s);
            acc += C64::from_polar(1.0, (delta - big) * s) * inner * h;
        }
        assert!((second_order_kernel(delta, big, t) - acc).norm() < 1e-6);
    }

    #[test]
    fn regime_guard() {
        let model = build_model(&EtConfig::baseline()).unwrap();
        assert!(matches!(perturbative_vs_exact(&model, &[0.0, 10.0]), Err(PerturbationError::RegimeViolation { .. })));
    }

    #[test]
    fn uncoupled_report_is_all_zero() {
        let model = build_model(&cfg(4, 2.0, 3, 0.0, 0.0)).unwrap();
        let rep = perturbative_vs_exact(&model, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(rep.max_exact, 0.0);
        assert!(rep.modes.iter().all(|m| m.max_dev_leading == 0.0 && m.max_dev_complete == 0.0));
        assert_eq!(rep.convention, PHASE_CONVENTION);
    }

    #[test]
    fn linearity_in_couplings() {
        let a = build_model(&cfg(6, 2.0, 4, 0.01, 0.02)).unwrap();
        let b = build_model(&cfg(6, 2.0, 4, 0.02, 0.04)).unwrap();
        let c = build_model(&EtConfig { removed_intermediates: vec![2], ..cfg(6, 2.0, 4, 0.01, 0.02) }).unwrap();
        let d = build_model(&EtConfig { removed_intermediates: vec![2], ..cfg(6, 2.0, 4, 0.02, 0.04) }).unwrap();
        let t = 1.3;
        let f1 = first_order_intermediate(&a, 2, t, false).unwrap().amplitude;
        let f2 = first_order_intermediate(&b, 2, t, false).unwrap().amplitude;
        assert!((f2 - f1 * 2.0).norm() < 1e-17);
        let s1 = second_order_product(&c, 1, t).unwrap().amplitude;
        let s2 = second_order_product(&d, 1, t).unwrap().amplitude;
        assert!((s2 - s1 * 4.0).norm() < 1e-16 * s2.norm().max(1.0));
    }

    #[test]
    fn phase_averaging() {
        assert_eq!(phase_averaging_ratio(&[]), 0.0);
        let z = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        assert_eq!(phase_averaging_ratio(&z), 0.0);
        assert_eq!(phase_averaging_ratio(&[C64::new(0.0, 2.0)]), 1.0);
    }
}
