//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (run with `--nocapture` to see them).

use std::time::Instant;

use sjf_core::compensator::{
    check_locally_integrable, compensate, compensated_martingale, compensator_path,
    survival_from_k, JumpMarkSpec,
};
use sjf_core::func::RealFunction;
use sjf_core::integrate::{atomic_oracle, stieltjes_integral};
use sjf_core::measure::Distribution;
use sjf_core::options::NumericOptions;
use sjf_core::preset::{bundle, Preset};
use sjf_core::simulate::simulate;
use sjf_core::solver::{
    classify, solve_f_from_h, solve_h_from_f, verify_condition_m, ConditionMPair, DerivativePair,
    MartingaleType, NoiseSpec, SigmaStatus,
};

const SEED: u64 = 20_260_808;

fn opts() -> NumericOptions {
    NumericOptions::default()
}

#[test]
fn criterion_1_reciprocal_supermartingale_reproduction() {
    let start = Instant::now();
    let o = opts();
    let d = Distribution::uniform(0.0, 1.0);
    let cm = solve_f_from_h(RealFunction::constant(0.0), d.clone(), Some(1.0), &o).unwrap();

    let mut max_err: f64 = 0.0;
    for t in d.support_grid(o.grid_size, o.survival_floor) {
        max_err = max_err.max((cm.pair.f(t) - 1.0 / (1.0 - t)).abs());
    }
    assert!(max_err <= 1e-8, "max pointwise F error {max_err}");

    let class = classify(&cm, &NoiseSpec::Zero, &o).unwrap();
    assert_eq!(class.tag, MartingaleType::Type2a);

    let report = simulate(&cm, &NoiseSpec::Zero, &[0.25, 0.5, 0.9], 100_000, SEED, &o).unwrap();
    for (m, s) in report.mean.iter().zip(&report.se) {
        assert!((m - 1.0).abs() <= 4.0 * s, "mean {m}, se {s}");
    }
    let m_inf = report.e_m_inf.unwrap();
    assert!(m_inf.abs() <= 4.0 * report.se_m_inf.unwrap());

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "PASS criterion 1: F=(1-t)^-1 within {max_err:.2e}, Type2a, means within 4 SE of 1, \
         E M_inf within 4 SE of 0 ({elapsed:?})"
    );
}

#[test]
fn criterion_2_sigma_martingale_discrimination() {
    let start = Instant::now();
    let o = opts();
    let d = Distribution::exponential(1.0);
    let zero_pair = DerivativePair::new(0.0, RealFunction::constant(0.0), d.clone(), &o).unwrap();
    let cm = ConditionMPair::new(zero_pair, RealFunction::constant(0.0));

    let strict = NoiseSpec::two_point(RealFunction::power(-1.0));
    let strict_status = sjf_core::solver::sigma_status(&cm, &strict, &o).unwrap();
    assert_eq!(strict_status, SigmaStatus::StrictlySigma);

    let local = NoiseSpec::two_point(RealFunction::power(-0.5));
    let local_status = sjf_core::solver::sigma_status(&cm, &local, &o).unwrap();
    assert_eq!(local_status, SigmaStatus::LocalMartingale);

    let heavy = JumpMarkSpec {
        k: RealFunction::constant(0.0),
        kabs: RealFunction::power(-1.0),
    };
    assert!(!check_locally_integrable(&heavy, &d, &o).unwrap());
    let light = JumpMarkSpec {
        k: RealFunction::constant(0.0),
        kabs: RealFunction::power(-0.5),
    };
    assert!(check_locally_integrable(&light, &d, &o).unwrap());

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "PASS criterion 2: J=t^-1 -> {strict_status}, J=t^-0.5 -> {local_status}, \
         local integrability false/true ({elapsed:?})"
    );
}

#[test]
fn criterion_3_maximal_function_instance() {
    let start = Instant::now();
    let o = opts();
    let d = Distribution::uniform(0.0, 1.0);
    let cm = solve_f_from_h(RealFunction::affine(2.0, -1.0), d.clone(), Some(0.0), &o).unwrap();

    let mut max_err: f64 = 0.0;
    for t in d.support_grid(o.grid_size, o.survival_floor) {
        max_err = max_err.max((cm.pair.f(t) - t).abs());
    }
    assert!(max_err <= 1e-8, "max pointwise F error {max_err}");

    let class = classify(&cm, &NoiseSpec::Zero, &o).unwrap();
    assert_eq!(class.tag, MartingaleType::Type4);
    let h1 = class.h1_integral.unwrap();
    assert!(h1.converged);
    assert!((h1.value - 0.5).abs() <= 1e-8, "variation integral {}", h1.value);

    let report = simulate(&cm, &NoiseSpec::Zero, &[0.25, 0.5, 0.75], 100_000, SEED, &o).unwrap();
    assert!(
        (report.e_sup - 0.5).abs() <= 4.0 * report.se_sup,
        "E sup M = {} (se {})",
        report.e_sup,
        report.se_sup
    );
    let m_inf = report.e_m_inf.unwrap();
    assert!(m_inf.abs() <= 4.0 * report.se_m_inf.unwrap());

    let elapsed = start.elapsed();
    println!(
        "PASS criterion 3: F=t within {max_err:.2e}, Type4 with variation integral {:.9}, \
         E sup M = {:.4} ~ 0.5, E M_inf ~ 0 ({elapsed:?})",
        h1.value, report.e_sup
    );
}

#[test]
fn criterion_4_endpoint_atom_exactness() {
    let start = Instant::now();
    let o = opts();
    let d = Distribution::from_atoms(&[(1.0, 0.5), (2.0, 0.5)]).unwrap();
    let h = RealFunction::table(vec![1.0, 2.0], vec![1.0, -1.0]).unwrap();
    let cm = solve_f_from_h(h.clone(), d.clone(), None, &o).unwrap();

    // F(0) forced by the endpoint atom; cross-checked by the atomic oracle.
    let expect_f0 = atomic_oracle(&h, &d, 0.0, 2.0).unwrap() / d.survival(0.0);
    assert!(expect_f0.abs() <= 1e-15);
    assert!((cm.pair.f0() - expect_f0).abs() <= 1e-12, "F0 = {}", cm.pair.f0());

    let lim = cm.pair.f_limit(&o).unwrap().require_converged().unwrap();
    assert!((lim - (-1.0)).abs() <= 1e-12, "endpoint limit {lim}");

    let class = classify(&cm, &NoiseSpec::Zero, &o).unwrap();
    assert_eq!(class.tag, MartingaleType::Type4);

    let report = verify_condition_m(&cm, o.grid_size, 1e-12, &o).unwrap();
    assert!(
        report.passes(),
        "residual {} endpoint {:?}",
        report.max_residual,
        report.endpoint_residual
    );

    let elapsed = start.elapsed();
    println!(
        "PASS criterion 4: F0 = {:.1e}, endpoint limit -1 within 1e-12, Type4, \
         residual {:.2e} ({elapsed:?})",
        cm.pair.f0(),
        report.max_residual
    );
}

#[test]
fn criterion_5_compensator_identities() {
    let start = Instant::now();
    let o = opts();

    // Unit mark against the unit exponential: F(t) = t on [0, 5].
    let d_exp = Distribution::exponential(1.0);
    let res = compensate(&JumpMarkSpec::unit(), &d_exp, &o).unwrap();
    let mut max_err: f64 = 0.0;
    for i in 0..=50 {
        let t = 5.0 * i as f64 / 50.0;
        max_err = max_err.max((res.pair.f(t) - t).abs());
    }
    assert!(max_err <= 1e-8, "hazard identity error {max_err}");

    // Two-atom law: A_inf on {gamma=2} is 1.5 and E A_inf = E X_inf = 1, exactly.
    let d_b = Distribution::from_atoms(&[(1.0, 0.5), (2.0, 0.5)]).unwrap();
    let res_b = compensate(&JumpMarkSpec::unit(), &d_b, &o).unwrap();
    let a_at_1 = compensator_path(&res_b, 1.0, 10.0, &o).unwrap();
    let a_at_2 = compensator_path(&res_b, 2.0, 10.0, &o).unwrap();
    assert!((a_at_2 - 1.5).abs() <= 1e-12);
    let e_a_inf = 0.5 * a_at_1 + 0.5 * a_at_2;
    let e_x_inf = atomic_oracle(&RealFunction::constant(1.0), &d_b, 0.0, 2.0).unwrap();
    assert_eq!(e_x_inf, 1.0);
    assert!((e_a_inf - e_x_inf).abs() <= 1e-15);

    // Simulated compensated process: means of A - X within 4 SE of 0.
    let (_, cm) = compensated_martingale(&JumpMarkSpec::unit(), &d_exp, &o).unwrap();
    let grid = [0.5, 1.0, 2.0, 3.0, 5.0];
    let report = simulate(&cm, &NoiseSpec::Zero, &grid, 100_000, SEED, &o).unwrap();
    for (m, s) in report.mean.iter().zip(&report.se) {
        assert!(m.abs() <= 4.0 * s, "mean {m}, se {s}");
    }

    let elapsed = start.elapsed();
    println!(
        "PASS criterion 5: F(t)=t within {max_err:.2e}, A_inf(gamma=2)=1.5 and \
         E A_inf = E X_inf = 1 exactly, compensated means within 4 SE of 0 ({elapsed:?})"
    );
}

#[test]
fn criterion_6_survival_inversion() {
    let start = Instant::now();
    let o = opts();
    for t in [0.5, 1.0, 2.0] {
        let s = survival_from_k(&RealFunction::constant(1.0), t, &o).unwrap();
        assert!((s - (-t).exp()).abs() <= 1e-8, "t={t}: {s}");
    }
    let s = survival_from_k(&RealFunction::affine(1.0, 1.0), 1.0, &o).unwrap();
    assert!((s - 0.5).abs() <= 1e-8, "K=1+s at 1: {s}");

    let elapsed = start.elapsed();
    println!("PASS criterion 6: exp(-t) within 1e-8 at t in {{0.5,1,2}}; K=1+s gives 0.5 ({elapsed:?})");
}

#[test]
fn criterion_7_property_batch() {
    let start = Instant::now();
    let o = opts();

    // Round trips, both directions, at 1e-7.
    let d = Distribution::uniform(0.0, 1.0);
    let h = RealFunction::affine(2.0, -1.0);
    let cm = solve_f_from_h(h.clone(), d.clone(), Some(0.25), &o).unwrap();
    let back = solve_h_from_f((*cm.pair).clone(), &o).unwrap();
    for t in d.support_grid(32, o.survival_floor) {
        assert!((back.h.eval(t) - h.eval(t)).abs() <= 1e-7);
    }
    let pair = DerivativePair::new(0.7, RealFunction::poly(vec![1.0, -0.5]), d.clone(), &o).unwrap();
    let cm2 = solve_h_from_f(pair.clone(), &o).unwrap();
    let rebuilt = solve_f_from_h(cm2.h.clone(), d.clone(), Some(pair.f0()), &o).unwrap();
    for t in d.support_grid(32, o.survival_floor) {
        assert!((rebuilt.pair.f(t) - pair.f(t)).abs() <= 1e-7);
    }

    // Balance-equation residuals at 1e-8 for every preset.
    for p in Preset::ALL {
        let b = bundle(p, &o).unwrap();
        let report = verify_condition_m(&b.pair, o.grid_size, 1e-8, &o).unwrap();
        assert!(report.passes(), "{}: residual {}", p.name(), report.max_residual);
    }

    // Positive-scaling equivariance of classification.
    let usual = bundle(Preset::UsualCond, &o).unwrap();
    for c in [0.5, 3.0] {
        let tag = classify(&usual.pair.scaled(c, &o).unwrap(), &NoiseSpec::Zero, &o)
            .unwrap()
            .tag;
        assert_eq!(tag, MartingaleType::Type2a);
    }
    let tag = classify(&usual.pair.scaled(-2.0, &o).unwrap(), &NoiseSpec::Zero, &o)
        .unwrap()
        .tag;
    assert_eq!(tag, MartingaleType::Type2b);

    // Atomic oracle vs quadrature at 1e-12.
    let atoms = Distribution::from_atoms(&[(0.25, 0.5), (0.5, 0.25), (1.75, 0.25)]).unwrap();
    for f in [
        RealFunction::constant(1.0),
        RealFunction::affine(1.0, 0.0),
        RealFunction::power(-1.0),
        RealFunction::poly(vec![0.5, -1.0, 2.0]),
    ] {
        let quad = stieltjes_integral(&f, &atoms, 0.0, 2.0, &o).unwrap();
        let oracle = atomic_oracle(&f, &atoms, 0.0, 2.0).unwrap();
        assert!((quad.value - oracle).abs() <= 1e-12);
    }

    // Seed-reproducible simulation.
    let a = simulate(&usual.pair, &usual.noise, &usual.sim_grid, 10_000, SEED, &o).unwrap();
    let b = simulate(&usual.pair, &usual.noise, &usual.sim_grid, 10_000, SEED, &o).unwrap();
    assert_eq!(a.mean, b.mean);
    assert_eq!(a.e_variation, b.e_variation);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "PASS criterion 7: round trips (1e-7), residuals (1e-8), scaling equivariance, \
         oracle agreement (1e-12), seed reproducibility ({elapsed:?})"
    );
}
