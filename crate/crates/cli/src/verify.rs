//! Self-verification suite: every documented invariant, evaluated on seeded
//! inputs and reported property by property.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rplab_core::et_model::{
    build_model, classical_two_step, fit_decay_rate, golden_rule_rates, populations, propagate_exact,
    propagate_exact_at, reduced_coherence, EtConfig,
};
use rplab_core::linalg::{eigh, rk4_evolve, von_neumann_entropy, LinalgError, Propagator};
use rplab_core::perturbation::{
    first_order_intermediate, inner_sum, phase_averaging_ratio, remove_nearest_subresonant, second_order_product,
    second_order_product_complete, second_order_resonant, sinc, PHASE_CONVENTION,
};
use rplab_core::spin::{
    closed_form_zero_field, dephasing_family, entropy_series, evolve, integrate, jones_hore, liouvillian,
    max_time_step, purity_series, trace_flow, yields, InitialState, MasterEquation, PluginRegistry, RpParams,
    SpinTrajectory,
};
use rplab_core::{CMatrix, DensityMatrix, HermitianOperator, StateVector, C64};
use serde::Serialize;

type Measure = Result<f64, String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub module: String,
    pub status: String,
    pub measured: Option<f64>,
    pub bound: Bound,
    pub threshold: f64,
    pub detail: String,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub version: String,
    pub seed: u64,
    pub phase_convention: String,
    pub all_passed: bool,
    pub failed: Vec<String>,
    pub properties: Vec<PropertyResult>,
}

struct Suite {
    seed: u64,
    results: Vec<PropertyResult>,
}

impl Suite {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn record(&mut self, module: &str, name: &str, bound: Bound, threshold: f64, detail: &str, measured: Measure) {
        let (status, measured, detail) = match measured {
            Ok(v) => {
                let ok = match bound {
                    Bound::AtMost => v <= threshold,
                    Bound::AtLeast => v >= threshold,
                };
                (if ok { "pass" } else { "fail" }, Some(v), detail.to_string())
            }
            Err(e) => ("fail", None, format!("{detail}; error: {e}")),
        };
        self.results.push(PropertyResult {
            name: name.to_string(),
            module: module.to_string(),
            status: status.to_string(),
            measured: measured.filter(|v| v.is_finite()),
            bound,
            threshold,
            detail,
        });
    }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianOperator {
    let a = CMatrix::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    HermitianOperator::new(a.hermitian_part()).expect("Hermitian part")
}

fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    let v = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    StateVector::normalized(v).expect("nonzero vector")
}

/// `A A† / Tr` with `A` of random rank.
fn random_density(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let rank = rng.gen_range(1..=n);
    let cols: Vec<Vec<C64>> = (0..rank)
        .map(|_| (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .collect();
    let m = CMatrix::from_fn(n, |i, j| cols.iter().map(|c| c[i] * c[j].conj()).sum());
    let tr = m.trace().re;
    DensityMatrix::new(m.scaled_real(1.0 / tr).hermitian_part()).expect("valid density matrix")
}

fn fig4() -> (RpParams, DensityMatrix) {
    (RpParams::new(1.0, 0.0).expect("valid rates"), InitialState::SingletT0Superposition.density_matrix())
}

fn sample(traj: &SpinTrajectory, series: &[f64], t: f64) -> f64 {
    let j = traj.times.iter().position(|&x| (x - t).abs() < 1e-9).expect("sample time on grid");
    series[j]
}

/// Runs every property; failures are collected, never short-circuited.
pub fn run_verify(seed: u64) -> VerifyReport {
    let mut suite = Suite { seed, results: Vec::new() };
    linalg_properties(&mut suite);
    et_properties(&mut suite);
    perturbation_properties(&mut suite);
    spin_properties(&mut suite);
    let failed: Vec<String> = suite.results.iter().filter(|r| !r.passed()).map(|r| r.name.clone()).collect();
    VerifyReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        phase_convention: PHASE_CONVENTION.to_string(),
        all_passed: failed.is_empty(),
        failed,
        properties: suite.results,
    }
}

fn linalg_properties(suite: &mut Suite) {
    let mut rng = suite.rng(1);
    let recon = (|| {
        let mut worst: f64 = 0.0;
        for n in [1, 2, 5, 17, 64, 200] {
            let h = random_hermitian(&mut rng, n);
            let e = eigh(&h).map_err(s)?;
            worst = worst.max(e.reconstruct().max_abs_diff(h.matrix()) / h.matrix().max_abs());
        }
        Ok(worst)
    })();
    suite.record(
        "linalg",
        "eigh_reconstruction",
        Bound::AtMost,
        1e-9,
        "max |U w U^H - H| / max|H|, dims 1..200",
        recon,
    );

    let mut rng = suite.rng(2);
    let mut norm_dev: f64 = 0.0;
    let mut energy_dev: f64 = 0.0;
    let run = (|| {
        for _ in 0..1000 {
            let n = rng.gen_range(2..=8);
            let h = random_hermitian(&mut rng, n);
            let psi0 = random_state(&mut rng, n);
            let t = rng.gen_range(0.0..50.0);
            let psi = Propagator::new(&h).map_err(s)?.evolve(&psi0, t).map_err(s)?;
            norm_dev = norm_dev.max((psi.norm() - 1.0).abs());
            let de = h.expectation(psi.amplitudes()) - h.expectation(psi0.amplitudes());
            energy_dev = energy_dev.max(de.abs() / h.matrix().max_abs());
        }
        Ok::<_, String>(())
    })();
    let (norm, energy) = match run {
        Ok(()) => (Ok(norm_dev), Ok(energy_dev)),
        Err(e) => (Err(e.clone()), Err(e)),
    };
    suite.record("linalg", "unitarity", Bound::AtMost, 1e-10, "max ||psi_t| - 1| over 1000 random triples", norm);
    suite.record("linalg", "energy_conservation", Bound::AtMost, 1e-10, "max |<H>_t - <H>_0| / max|H|", energy);

    let mut rng = suite.rng(3);
    let entropy = (|| {
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let rho = random_density(&mut rng, n);
            let sv = von_neumann_entropy(&rho).map_err(s)?;
            worst = worst.max(-sv).max(sv - (n as f64).ln());
            let pure = DensityMatrix::pure(&random_state(&mut rng, n));
            worst = worst.max(von_neumann_entropy(&pure).map_err(s)? - 1e-9);
        }
        Ok(worst.max(0.0))
    })();
    suite.record(
        "linalg",
        "entropy_bounds",
        Bound::AtMost,
        1e-12,
        "violation of 0 <= S <= ln d, and S(pure) <= 1e-9",
        entropy,
    );

    let order = (|| {
        let rho0 = DensityMatrix::new(CMatrix::from_real_diagonal(&[0.5, 0.5])).map_err(s)?;
        let decay = |rho: &CMatrix| -> Result<CMatrix, LinalgError> { Ok(rho.scaled_real(-1.0)) };
        let err = |dt: f64| -> Result<f64, String> {
            let steps = (2.0 / dt).round() as usize;
            let out = rk4_evolve(decay, &rho0, dt, steps).map_err(|e: LinalgError| s(e))?;
            Ok((out.last().expect("states").trace() - (-2.0_f64).exp()).abs())
        };
        Ok(err(0.2)? / err(0.1)?)
    })();
    suite.record(
        "linalg",
        "rk4_order",
        Bound::AtLeast,
        14.0,
        "error ratio for dt 0.2 -> 0.1 on exponential decay",
        order,
    );
}

fn et_properties(suite: &mut Suite) {
    let sparsity = (|| {
        let model = build_model(&EtConfig::baseline()).map_err(s)?;
        let (m, k) = (model.n_intermediate(), model.n_modes());
        let mut worst = (model.off_diagonal_pairs() as f64 - (m + m * k) as f64).abs();
        for p in 0..model.n_product() {
            worst = worst.max(model.hamiltonian()[(0, model.product_index(p))].norm());
        }
        Ok(worst)
    })();
    suite.record(
        "et-model",
        "structural_sparsity",
        Bound::AtMost,
        0.0,
        "baseline: pair count minus M + MK, and max |H[R][P]|",
        sparsity,
    );

    let golden = (|| {
        let model = build_model(&EtConfig::golden_rule()).map_err(s)?;
        let pops = populations(&propagate_exact(&model).map_err(s)?);
        let (k, _) = golden_rule_rates(&model).map_err(s)?;
        let fitted = fit_decay_rate(&pops.times, &pops.p_r, model.config().fit_window).map_err(s)?;
        let norm = (0..pops.times.len())
            .map(|j| (pops.p_r[j] + pops.p_pstar[j] + pops.p_p[j] - 1.0).abs())
            .fold(0.0, f64::max);
        Ok::<_, String>(((fitted / k - 1.0).abs(), norm))
    })();
    let (rate, norm) = match golden {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(e.clone()), Err(e)),
    };
    suite.record(
        "et-model",
        "golden_rule_agreement",
        Bound::AtMost,
        0.05,
        "|k_fit / k - 1| on t in [5, 50], decay coupling off",
        rate,
    );
    suite.record("et-model", "population_conservation", Bound::AtMost, 1e-10, "max |P_R + P_P* + P_P - 1|", norm);

    let kinetics = (|| {
        let model = build_model(&EtConfig::two_step_kinetics()).map_err(s)?;
        let (k, gamma) = golden_rule_rates(&model).map_err(s)?;
        let pops = populations(&propagate_exact(&model).map_err(s)?);
        let classical = classical_two_step(k, gamma, &pops.times).map_err(s)?;
        let d: Vec<f64> = (0..pops.times.len())
            .filter(|&j| pops.times[j] <= 50.0)
            .map(|j| (pops.p_p[j] - classical.p_p[j]).powi(2))
            .collect();
        Ok((d.iter().sum::<f64>() / d.len() as f64).sqrt())
    })();
    suite.record(
        "et-model",
        "kinetics_agreement",
        Bound::AtMost,
        0.02,
        "RMS of P_P vs sequential kinetics on [0, 50], independent channels",
        kinetics,
    );

    let coherence = (|| {
        let model = build_model(&EtConfig::baseline()).map_err(s)?;
        let coh = reduced_coherence(&propagate_exact(&model).map_err(s)?);
        Ok(coh.rho_rp.iter().map(|z| z.norm()).fold(0.0, f64::max))
    })();
    suite.record(
        "et-model",
        "photon_sector_coherence",
        Bound::AtMost,
        1e-15,
        "max |<R| Tr_ph rho |P>| on the baseline trajectory",
        coherence,
    );
}

fn perturbation_properties(suite: &mut Suite) {
    let mut rng = suite.rng(4);
    let cancel = (|| {
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let cfg = EtConfig {
                n_intermediate: 2 * rng.gen_range(1..=150),
                manifold_width: rng.gen_range(0.1..5.0),
                n_modes: rng.gen_range(1..=20),
                lambda: rng.gen_range(1e-4..0.1),
                g: rng.gen_range(1e-4..0.1),
                ..EtConfig::baseline()
            };
            let model = build_model(&cfg).map_err(s)?;
            for p in 0..model.n_product() {
                let sum = inner_sum(&model, p).map_err(s)?;
                worst = worst.max(sum.total.abs() / sum.positive.abs().max(sum.negative.abs()));
            }
        }
        Ok(worst)
    })();
    suite.record(
        "perturbation",
        "odd_function_cancellation",
        Bound::AtMost,
        1e-12,
        "|inner sum| / one-sided partial sum, 50 symmetric manifolds",
        cancel,
    );

    let limit = (|| {
        let cfg = EtConfig { n_intermediate: 2, resonant_flag: true, n_modes: 2, ..EtConfig::baseline() };
        let model = build_model(&cfg).map_err(s)?;
        let delta = model.product_detuning(1);
        let mut worst: f64 = 0.0;
        for x in [0.01, 0.05, 0.1] {
            let amps = second_order_resonant(&model, x / delta).map_err(s)?;
            for err in amps.relative_limit_error() {
                worst = worst.max(err / (x * x / 6.0 + 1e-9));
            }
        }
        Ok(worst)
    })();
    suite.record(
        "perturbation",
        "resonant_limit_consistency",
        Bound::AtMost,
        1.0,
        "max |exact - limit| / |limit| divided by (delta t)^2/6 + 1e-9, delta t in {0.01, 0.05, 0.1}",
        limit,
    );

    let linear = (|| {
        let base = EtConfig {
            n_intermediate: 8,
            manifold_width: 2.0,
            n_modes: 3,
            removed_intermediates: vec![2],
            ..EtConfig::baseline()
        };
        let doubled = EtConfig { lambda: 2.0 * base.lambda, g: 2.0 * base.g, ..base.clone() };
        let half_g = EtConfig { lambda: 2.0 * base.lambda, ..base.clone() };
        let (m1, m2, m3) =
            (build_model(&base).map_err(s)?, build_model(&doubled).map_err(s)?, build_model(&half_g).map_err(s)?);
        let rel = |a: C64, b: C64| (a - b).norm() / b.norm().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for t in [0.5, 3.0, 20.0] {
            for i in 0..m1.n_intermediate() {
                let a = first_order_intermediate(&m1, i, t, false).map_err(s)?.amplitude;
                let b = first_order_intermediate(&m3, i, t, false).map_err(s)?.amplitude;
                worst = worst.max(rel(b, 2.0 * a));
            }
            for p in 0..m1.n_product() {
                for f in [second_order_product, second_order_product_complete] {
                    let a = f(&m1, p, t).map_err(s)?.amplitude;
                    let b = f(&m2, p, t).map_err(s)?.amplitude;
                    worst = worst.max(rel(b, 4.0 * a));
                }
            }
        }
        Ok(worst)
    })();
    suite.record(
        "perturbation",
        "order_consistency",
        Bound::AtMost,
        1e-12,
        "relative deviation from linear scaling in each coupling",
        linear,
    );

    let mut rng = suite.rng(5);
    let mut even: f64 = (sinc(0.0) - 1.0).abs();
    for _ in 0..1000 {
        let x: f64 = rng.gen_range(-100.0..100.0);
        even = even.max((sinc(-x) - sinc(x)).abs());
    }
    suite.record(
        "perturbation",
        "sinc_even",
        Bound::AtMost,
        0.0,
        "|sinc(0) - 1| and max |sinc(-x) - sinc(x)|",
        Ok(even),
    );

    let averaging = (|| {
        let cfg = EtConfig { n_intermediate: 2, resonant_flag: true, n_modes: 201, ..EtConfig::baseline() };
        let model = build_model(&cfg).map_err(s)?;
        Ok(phase_averaging_ratio(&second_order_resonant(&model, 30.0).map_err(s)?.exact))
    })();
    suite.record(
        "perturbation",
        "resonant_phase_averaging",
        Bound::AtMost,
        0.05,
        "|sum_k c_k| / sum_k |c_k| at t = 30, K = 201",
        averaging,
    );

    let regime = (|| {
        let cfg = EtConfig::baseline();
        let symmetric = build_model(&cfg).map_err(s)?;
        let asymmetric = build_model(&remove_nearest_subresonant(&cfg)).map_err(s)?;
        let (k, _) = golden_rule_rates(&symmetric).map_err(s)?;
        let n = (0.1 / k / 0.05).floor() as usize;
        let times: Vec<f64> = (1..=n).map(|j| j as f64 * 0.05).collect();
        let traj = propagate_exact_at(&symmetric, &times).map_err(s)?;
        let exact = traj.c_pk.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let mut scale: f64 = 0.0;
        for &t in &times {
            for p in 0..asymmetric.n_product() {
                scale = scale.max(second_order_product(&asymmetric, p, t).map_err(s)?.amplitude.norm());
            }
        }
        Ok(scale / exact)
    })();
    suite.record(
        "perturbation",
        "perturbative_regime",
        Bound::AtLeast,
        10.0,
        "asymmetric second-order scale / exact symmetric max |c_P,k|, k t < 0.1",
        regime,
    );
}

fn spin_properties(suite: &mut Suite) {
    let reg = PluginRegistry::with_builtins();
    let all_variants = [
        MasterEquation::Haberkorn,
        MasterEquation::JonesHore,
        MasterEquation::Dephasing { eta: 0.5 },
        MasterEquation::Plugin { name: "measurement_standin".into() },
    ];

    let mut rng = suite.rng(6);
    let flow = (|| {
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let params = RpParams::with_hamiltonian(
                rng.gen_range(0.0..5.0),
                rng.gen_range(0.0..5.0),
                random_hermitian(&mut rng, 4),
            )
            .map_err(s)?;
            let rho = random_density(&mut rng, 4);
            for spec in &all_variants {
                let d = liouvillian(spec, &params, rho.matrix(), &reg).map_err(s)?;
                let scale = params.k_s.max(params.k_t).max(1.0);
                worst = worst.max((d.trace().re - trace_flow(&params, rho.matrix())).abs() / scale);
                worst = worst.max(d.hermitian_deviation() / scale);
            }
        }
        Ok(worst)
    })();
    suite.record(
        "spin-master",
        "trace_flow_identity",
        Bound::AtMost,
        1e-8,
        "|Tr L[rho] + k_S Tr Q_S rho + k_T Tr Q_T rho| and Hermiticity, every variant",
        flow,
    );

    let mut rng = suite.rng(7);
    let positivity = (|| {
        let mut worst = f64::INFINITY;
        for n in 0..100 {
            let rho0 = random_density(&mut rng, 4);
            let eta = [0.0, 0.5, 1.0, 2.0][n % 4];
            let params =
                RpParams::with_hamiltonian(1.0, rng.gen_range(0.0..1.0), random_hermitian(&mut rng, 4)).map_err(s)?;
            let traj = evolve(&MasterEquation::Dephasing { eta }, &params, &rho0, 3.0, max_time_step(&params), &reg)
                .map_err(s)?;
            for rho in &traj.states {
                let min = rho.eigenvalues().map_err(s)?.into_iter().fold(f64::INFINITY, f64::min);
                worst = worst.min(min);
            }
        }
        Ok(worst)
    })();
    suite.record(
        "spin-master",
        "dephasing_positivity",
        Bound::AtLeast,
        -1e-8,
        "min eigenvalue over 100 random dephasing-family trajectories",
        positivity,
    );

    let mut rng = suite.rng(8);
    let identity = (|| {
        let params = RpParams::with_hamiltonian(0.7, 0.3, random_hermitian(&mut rng, 4)).map_err(s)?;
        let mut worst: f64 = 0.0;
        for j in 0..4 {
            for k in j..4 {
                let mut basis = vec![CMatrix::from_fn(4, |a, b| {
                    C64::new(((a == j && b == k) || (a == k && b == j)) as u8 as f64, 0.0)
                })];
                if j != k {
                    basis.push(CMatrix::from_fn(4, |a, b| match (a, b) {
                        (a, b) if a == j && b == k => C64::new(0.0, 1.0),
                        (a, b) if a == k && b == j => C64::new(0.0, -1.0),
                        _ => C64::new(0.0, 0.0),
                    }));
                }
                for m in &basis {
                    worst = worst.max(jones_hore(&params, m).max_abs_diff(&dephasing_family(&params, m, 1.0)));
                }
            }
        }
        Ok(worst)
    })();
    suite.record(
        "spin-master",
        "superoperator_identity",
        Bound::AtMost,
        1e-12,
        "max |L_JH - L_deph(eta=1)| on the 16-matrix Hermitian basis",
        identity,
    );

    let (params, rho0) = fig4();
    let run = |spec: &MasterEquation, dt: f64| evolve(spec, &params, &rho0, 20.0, dt, &reg).map_err(s);

    let oracle = (|| {
        let mut worst: f64 = 0.0;
        for (spec, eta) in [(MasterEquation::Haberkorn, 0.0), (MasterEquation::JonesHore, 1.0)] {
            let traj = run(&spec, 1e-3)?;
            for (&t, rho) in traj.times.iter().zip(&traj.states) {
                let exact = closed_form_zero_field(&params, &rho0, t, eta).map_err(s)?;
                worst = worst.max(rho.matrix().max_abs_diff(exact.matrix()));
            }
        }
        Ok(worst)
    })();
    suite.record(
        "spin-master",
        "rk4_closed_form",
        Bound::AtMost,
        1e-8,
        "max elementwise RK4 error vs closed forms, k_S dt = 1e-3",
        oracle,
    );

    let spin_order = (|| {
        let exact = closed_form_zero_field(&params, &rho0, 2.0, 1.0).map_err(s)?;
        let err = |dt: f64| -> Result<f64, String> {
            let traj = integrate(&MasterEquation::JonesHore, &params, &rho0, 2.0, dt, &reg).map_err(s)?;
            Ok(traj.states.last().expect("states").matrix().max_abs_diff(exact.matrix()))
        };
        Ok(err(0.2)? / err(0.1)?)
    })();
    suite.record(
        "spin-master",
        "rk4_order_spin",
        Bound::AtLeast,
        14.0,
        "Jones-Hore error ratio for k_S dt 0.2 -> 0.1",
        spin_order,
    );

    let fig4_runs = (|| {
        let mut out = Vec::new();
        for spec in [
            MasterEquation::Haberkorn,
            MasterEquation::JonesHore,
            MasterEquation::Plugin { name: "measurement_standin".into() },
        ] {
            let traj = run(&spec, 1e-3)?;
            let ent = entropy_series(&traj).map_err(s)?;
            let pur = purity_series(&traj).map_err(s)?;
            let y = yields(&traj, &params);
            out.push((traj, ent, pur, y));
        }
        Ok::<_, String>(out)
    })();
    let fig4_runs = match fig4_runs {
        Ok(r) => r,
        Err(e) => {
            for name in [
                "entropy_haberkorn_zero",
                "entropy_jones_hore_value",
                "entropy_jones_hore_return",
                "entropy_standin_rise_return",
                "purity_haberkorn",
                "purity_dephasing_dip_return",
                "yield_conservation",
                "yield_limits",
            ] {
                suite.record(
                    "spin-master",
                    name,
                    Bound::AtMost,
                    0.0,
                    "singlet-T0 superposition scenario",
                    Err(e.clone()),
                );
            }
            return;
        }
    };
    let [(_, hab_s, hab_p, hab_y), (jh_t, jh_s, _, _), (st_t, st_s, st_p, _)] = &fig4_runs[..] else { unreachable!() };
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    suite.record(
        "spin-master",
        "entropy_haberkorn_zero",
        Bound::AtMost,
        1e-9,
        "max S over the Haberkorn trajectory",
        Ok(max(hab_s)),
    );
    suite.record(
        "spin-master",
        "entropy_jones_hore_value",
        Bound::AtMost,
        1e-3,
        "|S_JH(k_S t = 1) - 0.4146|",
        Ok((sample(jh_t, jh_s, 1.0) - 0.4146).abs()),
    );
    suite.record(
        "spin-master",
        "entropy_jones_hore_return",
        Bound::AtMost,
        0.0,
        "max(0.4 - max S_JH, S_JH(20) - 1e-3)",
        Ok((0.4 - max(jh_s)).max(sample(jh_t, jh_s, 20.0) - 1e-3).max(0.0)),
    );
    suite.record(
        "spin-master",
        "entropy_standin_rise_return",
        Bound::AtMost,
        0.0,
        "max(0.05 - max S, S(20) - 1e-3) for the eta = 0.5 stand-in",
        Ok((0.05 - max(st_s)).max(sample(st_t, st_s, 20.0) - 1e-3).max(0.0)),
    );
    let hab_pur = hab_p.iter().map(|p| (p - 1.0).abs()).fold(0.0, f64::max);
    suite.record(
        "spin-master",
        "purity_haberkorn",
        Bound::AtMost,
        1e-8,
        "max |Tr rho_hat^2 - 1| under Haberkorn",
        Ok(hab_pur),
    );
    let dip = 1.0 - sample(st_t, st_p, 1.0);
    let ret = 1.0 - sample(st_t, st_p, 20.0);
    suite.record(
        "spin-master",
        "purity_dephasing_dip_return",
        Bound::AtMost,
        0.0,
        "max(1e-4 - (1 - P(1)), (1 - P(20)) - 1e-3) for eta = 0.5",
        Ok((1e-4 - dip).max(ret - 1e-3).max(0.0)),
    );
    let conservation = fig4_runs
        .iter()
        .flat_map(|(_, _, _, y)| {
            (0..y.survival.len()).map(move |j| (y.singlet[j] + y.triplet[j] + y.survival[j] - 1.0).abs())
        })
        .fold(0.0, f64::max);
    suite.record(
        "spin-master",
        "yield_conservation",
        Bound::AtMost,
        1e-6,
        "max |Y_S + Y_T + survival - 1|",
        Ok(conservation),
    );
    let ys = *hab_y.singlet.last().expect("samples");
    let surv = *hab_y.survival.last().expect("samples");
    suite.record(
        "spin-master",
        "yield_limits",
        Bound::AtMost,
        1e-3,
        "max(|Y_S(20) - 0.5|, |survival(20) - 0.5|)",
        Ok((ys - 0.5).abs().max((surv - 0.5).abs())),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rng_streams_are_seeded() {
        let a = Suite { seed: 3, results: vec![] };
        let b = Suite { seed: 3, results: vec![] };
        assert_eq!(a.rng(1).gen::<u64>(), b.rng(1).gen::<u64>());
        assert_ne!(a.rng(1).gen::<u64>(), a.rng(2).gen::<u64>());
    }

    #[test]
    fn errors_are_recorded_as_failures() {
        let mut suite = Suite { seed: 0, results: vec![] };
        suite.record("m", "p", Bound::AtMost, 1.0, "d", Err("boom".into()));
        suite.record("m", "q", Bound::AtLeast, 1.0, "d", Ok(2.0));
        suite.record("m", "r", Bound::AtMost, 1.0, "d", Ok(f64::NAN));
        assert_eq!(suite.results[0].status, "fail");
        assert!(suite.results[0].detail.contains("boom"));
        assert!(suite.results[1].passed());
        assert!(!suite.results[2].passed());
        assert_eq!(suite.results[2].measured, None);
    }
}
