//! Acceptance gate: one test (one pass/fail line) per release criterion.
//!
//! Each criterion pins tolerances and parameter grids; the heavy
//! criteria (4–8) run the same configurations as the experiment CLI at
//! desk scale and take minutes each.

use std::time::Instant;

use nlsemi::cheb::ChebSegment;
use nlsemi::evolve::StepperConfig;
use nlsemi::experiments::{
    blowup_study_run, defocusing_scaling, evolve_case, focusing_scaling, match_study_single,
    nongeneric_eta, MatchOutcome,
};
use nlsemi::hodograph::{
    eval_semiclassical, find_critical_point, hyperbolic_constants, tian_ye_mu,
    tian_ye_mu_quadrature,
};
use nlsemi::madelung::{psi_from_uv, uv_from_psi, InitialDataCase, MadelungState};
use nlsemi::model::{NlsModel, Sign};
use nlsemi::painleve::{kdv_residual_max, locate_p1_pole, solve_p1_tritronquee, P12Continuation};
use nlsemi::spectral::make_grid;
use num_complex::Complex64;
use std::sync::Arc;

const SQRT3: f64 = 1.732050807568877_2935;

#[test]
fn criterion_1_critical_point_closed_forms() {
    let start = Instant::now();

    // Quintic defocusing sech: t₀ = 3√3/4, |x₀| = ln((√3+1)/√2)+√3/2,
    // breaking invariant −2/3 exactly.
    let cp = find_critical_point(&InitialDataCase::QuinticDefocSech).unwrap();
    let t0_exact = 3.0 * SQRT3 / 4.0;
    let xc_exact = ((SQRT3 + 1.0) / 2.0_f64.sqrt()).ln() + SQRT3 / 2.0;
    assert!(
        (cp.t0 - t0_exact).abs() < 1e-10,
        "quintic defoc t0 {} vs {}",
        cp.t0,
        t0_exact
    );
    assert!(
        (cp.x0.abs() - xc_exact).abs() < 1e-10,
        "quintic defoc |x0| {} vs {}",
        cp.x0.abs(),
        xc_exact
    );
    assert_eq!(cp.r_minus0, Complex64::new(-2.0 / 3.0, 0.0));

    // Cubic focusing sech, A₀ = 1: (x₀, t₀, u₀) = (0, 0.5, 2).
    let cp = find_critical_point(&InitialDataCase::CubicFocSech { a0: 1.0 }).unwrap();
    assert!(cp.x0.abs() < 1e-10 && (cp.t0 - 0.5).abs() < 1e-10 && (cp.u0 - 2.0).abs() < 1e-10);

    // Quintic dark A = B = 1: t₀ = 25√15/72.
    let cp = find_critical_point(&InitialDataCase::QuinticDefocDark { a: 1.0, b: 1.0 }).unwrap();
    let t0_exact = 25.0 * 15.0_f64.sqrt() / 72.0;
    assert!((cp.t0 - t0_exact).abs() < 1e-10, "dark t0 {}", cp.t0);

    assert!(start.elapsed().as_secs_f64() < 1.0, "criterion 1 over budget");
}

#[test]
fn criterion_2_critical_point_root_solves() {
    let start = Instant::now();

    let cp = find_critical_point(&InitialDataCase::QuinticFocSech { a0: 1.0 }).unwrap();
    assert!((cp.u0 - 1.5858).abs() < 1e-4, "quintic foc u0 {}", cp.u0);
    assert!((cp.t0 - 0.4119).abs() < 1e-4, "quintic foc t0 {}", cp.t0);

    let cp = find_critical_point(&InitialDataCase::CubicDefocSech).unwrap();
    assert!(
        (cp.x0 - -2.209395255).abs() < 1e-6,
        "cubic defoc x0 {}",
        cp.x0
    );
    let t0_exact = 3.0 * 2.0_f64.sqrt() / 32.0 * (69.0 + 11.0 * 33.0_f64.sqrt()).sqrt();
    assert!((cp.t0 - t0_exact).abs() < 1e-8, "cubic defoc t0 {}", cp.t0);

    assert!(start.elapsed().as_secs_f64() < 5.0, "criterion 2 over budget");
}

#[test]
fn criterion_3_asymptotic_constants() {
    let start = Instant::now();

    let case = InitialDataCase::CubicDefocSech;
    let cp = find_critical_point(&case).unwrap();
    let k = hyperbolic_constants(&case, &cp).unwrap();
    assert!((k.alpha - 2.635171951).abs() < 1e-6, "alpha {}", k.alpha);
    assert!(
        (k.gamma - 2.3269).abs() / 2.3269 < 1e-3,
        "gamma {}",
        k.gamma
    );

    let eta = nongeneric_eta(&case).unwrap();
    assert!((eta - 1.3060).abs() < 1e-3, "eta* {eta}");

    assert!(start.elapsed().as_secs_f64() < 10.0, "criterion 3 over budget");
}

#[test]
fn criterion_4_painleve_solvers() {
    // P_I tritronquée: interior residual on the positive real axis and
    // on the maximal ray arg ξ = 7π/10; first negative-real-axis pole.
    let real = ChebSegment::real(8.0, 40.0, 256).unwrap();
    let sol = solve_p1_tritronquee(&real).unwrap();
    assert!(sol.residual_norm < 1e-10, "P_I real axis {}", sol.residual_norm);
    let ray = ChebSegment::new(
        Complex64::from_polar(8.0, 0.7 * std::f64::consts::PI),
        Complex64::from_polar(40.0, 0.7 * std::f64::consts::PI),
        256,
    )
    .unwrap();
    let sol = solve_p1_tritronquee(&ray).unwrap();
    assert!(sol.residual_norm < 1e-10, "P_I ray {}", sol.residual_norm);
    let pole = locate_p1_pole().unwrap();
    assert!((pole - -2.3841687).abs() < 1e-3, "P_I pole {pole}");

    // P_I²: interior residual per T and the KdV cross-derivative
    // residual over T ∈ [−3, 3], walking one continuation per sign.
    let seg = ChebSegment::real(-20.0, 20.0, 1536).unwrap();
    let delta = 0.02;
    for sign in [1.0, -1.0] {
        let mut cont = P12Continuation::new(&seg).unwrap();
        for k in 0..=3 {
            let t = sign * k as f64;
            if sign < 0.0 && k == 0 {
                continue; // T = 0 is covered by the ascending walk.
            }
            let sol = cont.solve(t).unwrap();
            assert!(sol.residual_norm < 1e-8, "P_I² residual at T={t}: {}", sol.residual_norm);
            let kdv = kdv_residual_max(&mut cont, t, delta).unwrap();
            assert!(kdv < 1e-4, "KdV residual at T={t}: {kdv}");
        }
    }
}

#[test]
fn criterion_5_conservation_gates() {
    // ε = 0.05, 2¹³ modes, 2·10⁴ steps, to the respective break-up
    // times: ΔE < 10⁻⁶ and |Δmass| < 10⁻⁸.
    let stepper = StepperConfig {
        n_steps: 20_000,
        ..Default::default()
    };
    for case in [
        InitialDataCase::QuinticFocSech { a0: 1.0 },
        InitialDataCase::QuinticDefocSech,
    ] {
        let cp = find_critical_point(&case).unwrap();
        let (_, trace) = evolve_case(
            &case,
            0.05,
            8192,
            case.default_length(),
            &stepper,
            cp.t0,
            &[cp.t0],
        )
        .unwrap();
        let de = trace.delta_e.iter().fold(0.0f64, |m, &v| m.max(v));
        let dm = trace.delta_mass.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(de < 1e-6, "{case:?}: ΔE = {de:e}");
        assert!(dm < 1e-8, "{case:?}: Δmass = {dm:e}");
        assert!(!trace.energy_gate_violated && !trace.terminated_early, "{case:?}");
    }
}

#[test]
fn criterion_6_scaling_laws() {
    // Focusing quintic: pre-break (t₀/2) slope ≈ 2, at-break slope ≈ 2/5.
    let stepper = StepperConfig::default();
    let foc = focusing_scaling(
        &InitialDataCase::QuinticFocSech { a0: 1.0 },
        &[0.05, 0.0625, 0.075, 0.0875, 0.1],
        8192,
        InitialDataCase::QuinticFocSech { a0: 1.0 }.default_length(),
        &stepper,
    )
    .unwrap();
    let pre = foc.pre_break.slope_a;
    let at = foc.at_break.slope_a;
    assert!((1.9..=2.1).contains(&pre), "pre-break slope {pre}");
    assert!((0.35..=0.46).contains(&at), "at-break slope {at}");

    // Defocusing quintic: Δ∓ = |r∓(x₀,t₀) − r∓⁰| scale like ε^{2/7} and
    // ε^{4/7}; the finer grid keeps the interpolation error at x₀ below
    // the smallest Δ₊.
    let defoc = defocusing_scaling(
        &InitialDataCase::QuinticDefocSech,
        &[0.02, 0.04, 0.06, 0.08, 0.1],
        16384,
        InitialDataCase::QuinticDefocSech.default_length(),
        &stepper,
    )
    .unwrap();
    let dm = defoc.delta_minus.slope_a;
    let dp = defoc.delta_plus.slope_a;
    assert!((0.24..=0.36).contains(&dm), "Δ₋ slope {dm}");
    assert!((0.50..=0.68).contains(&dp), "Δ₊ slope {dp}");
}

#[test]
fn criterion_7_blowup_law() {
    let case = InitialDataCase::QuinticFocSech { a0: 1.0 };
    let stepper = StepperConfig {
        n_steps: 20_000,
        ..Default::default()
    };
    let eps: Vec<f64> = (3..=10).map(|k| 0.01 * k as f64).collect();
    let out = blowup_study_run(&case, &eps, 8192, case.default_length(), &stepper).unwrap();
    assert!(out.skipped.is_empty(), "skipped ε: {:?}", out.skipped);
    let a = out.fit.slope_a;
    let b = out.fit.intercept_b;
    assert!((0.75..=0.90).contains(&a), "blow-up slope {a}");
    assert!(
        (0.10..=0.20).contains(&b.abs()),
        "blow-up intercept {b} (|b| must bracket 0.1267 and 0.1596)"
    );
}

/// Sup-norm of both error columns of a match table over the central
/// window |x − x₀| ≤ h, returning (semiclassical, painleve).
fn central_sups(table: &nlsemi::report::Table, x0: f64, h: f64) -> (f64, f64) {
    let mut sup_semi = 0.0f64;
    let mut sup_pain = 0.0f64;
    for row in &table.rows {
        if (row[0] - x0).abs() <= h {
            sup_semi = sup_semi.max(row[1]);
            sup_pain = sup_pain.max(row[2]);
        }
    }
    (sup_semi, sup_pain)
}

fn crossover_half_width(out: &MatchOutcome) -> f64 {
    let (lo, hi) = out.report.crossover.expect("no crossover interval");
    0.5 * (hi - lo)
}

#[test]
fn criterion_8_matching_superiority() {
    let stepper = StepperConfig::default();

    // Focusing quintic sech at ε = 0.1 and 0.05: the tritronquée
    // formula beats the semiclassical solution in sup norm over the
    // central window (an eighth of the matching half-width), and the
    // crossover half-width shrinks with ε.
    let case = InitialDataCase::QuinticFocSech { a0: 1.0 };
    let cp = find_critical_point(&case).unwrap();
    let mut widths = Vec::new();
    for eps in [0.1, 0.05] {
        let out = match_study_single(&case, eps, 8192, case.default_length(), &stepper, None, 256)
            .unwrap();
        let h = 0.5 * (out.report.window.1 - out.report.window.0) / 8.0;
        let (sup_semi, sup_pain) = central_sups(&out.table, cp.x0, h);
        assert!(
            sup_pain < sup_semi,
            "focusing ε={eps}: painleve {sup_pain} vs semiclassical {sup_semi}"
        );
        widths.push(crossover_half_width(&out));
    }
    assert!(widths[1] < widths[0], "focusing crossover widths {widths:?}");

    // Defocusing quintic sech: the P_I² formula on the breaking
    // invariant r₋ over the central window, same shrink property.
    let case = InitialDataCase::QuinticDefocSech;
    let cp = find_critical_point(&case).unwrap();
    let mut widths = Vec::new();
    for eps in [0.1, 0.05] {
        let out = match_study_single(&case, eps, 16384, case.default_length(), &stepper, None, 64)
            .unwrap();
        let h = 0.5 * (out.report.window.1 - out.report.window.0) / 8.0;
        let rt = out.rminus_table.as_ref().expect("hyperbolic r₋ table");
        let (sup_semi, sup_pain) = central_sups(rt, cp.x0, h);
        assert!(
            sup_pain < sup_semi,
            "defocusing ε={eps}: painleve {sup_pain} vs semiclassical {sup_semi}"
        );
        widths.push(crossover_half_width(&out));
    }
    assert!(widths[1] < widths[0], "defocusing crossover widths {widths:?}");
}

#[test]
fn criterion_9_oracle_equivalences() {
    let start = Instant::now();

    // Madelung round trip ψ → (u, v) → ψ below 1e-9.
    let grid = Arc::new(make_grid(1 << 10, 40.0).unwrap());
    let model = NlsModel::quintic(Sign::Defocusing, 0.25);
    let k0 = 2.0 * std::f64::consts::PI / 40.0;
    let psi0: Vec<Complex64> = grid
        .nodes
        .iter()
        .map(|&x| {
            let u = 0.3 + 0.2 * (k0 * x).cos();
            Complex64::from_polar(u.sqrt(), 0.4 * (k0 * x).sin())
        })
        .collect();
    let psi0 = nlsemi::spectral::WaveField::from_values(grid.clone(), psi0).unwrap();
    let state = uv_from_psi(&psi0, &model);
    let back = psi_from_uv(&state, &grid, &model, grid.nodes[0]).unwrap();
    let mut err = 0.0f64;
    for (a, b) in back.values.iter().zip(&psi0.values) {
        err = err.max((a - b).norm());
    }
    assert!(err < 1e-9, "Madelung round trip {err:e}");

    // Hodograph residuals of the cubic defocusing semiclassical
    // solution below 1e-10 near the break-up point.
    let xs: Vec<f64> = (0..21).map(|k| -2.7 + 0.05 * k as f64).collect();
    let t = 1.0;
    let state = eval_semiclassical(&InitialDataCase::CubicDefocSech, &xs, t).unwrap();
    for (k, &x) in xs.iter().enumerate() {
        let (u, v) = (state.u[k], state.v[k]);
        let (rp, rm) = (v + 2.0 * u.sqrt(), v - 2.0 * u.sqrt());
        let (mp, mm) = tian_ye_mu(rp, rm, &InitialDataCase::CubicDefocSech).unwrap();
        let e1 = 0.25 * (3.0 * rp + rm) * t + mp - x;
        let e2 = 0.25 * (rp + 3.0 * rm) * t + mm - x;
        assert!(e1.abs() < 1e-10 && e2.abs() < 1e-10, "x={x}: {e1:e} {e2:e}");
    }

    // Tian–Ye closed form vs the quadrature oracle below 1e-8.
    for (rp, rm) in [(0.3, -1.4), (0.1, -0.9), (0.5, -1.8)] {
        let (cp_, cm_) = tian_ye_mu(rp, rm, &InitialDataCase::CubicDefocSech).unwrap();
        let (qp, qm) = tian_ye_mu_quadrature(1.0, rp, rm).unwrap();
        assert!(
            (cp_ - qp).abs() < 1e-8 && (cm_ - qm).abs() < 1e-8,
            "Tian–Ye mismatch at ({rp},{rm}): {:e} {:e}",
            (cp_ - qp).abs(),
            (cm_ - qm).abs()
        );
    }

    // Composite RK vs the exact free propagator: 4th-order convergence
    // on a nearly linear (tiny-amplitude) field.
    {
        let n = 256;
        let grid = Arc::new(make_grid(n, 40.0 * std::f64::consts::PI).unwrap());
        let model = NlsModel::cubic(Sign::Focusing, 0.5);
        let amp = 1e-9;
        let psi0 = nlsemi::spectral::WaveField::from_fn(grid.clone(), |x| {
            Complex64::new(amp * (-x * x / 8.0).exp(), 0.0)
        });
        let t_end = 0.1;
        // Exact: ψ̂_k(t) = exp(−iεk²t/2) ψ̂_k(0).
        let exact: Vec<Complex64> = psi0
            .coefficients
            .iter()
            .zip(&grid.wavenumbers)
            .map(|(c0, &k)| c0 * Complex64::new(0.0, -0.5 * model.epsilon * k * k * t_end).exp())
            .collect();
        let exact =
            nlsemi::spectral::WaveField::from_coefficients(grid.clone(), exact).unwrap();
        let run_err = |n_steps: usize| -> f64 {
            let cfg = StepperConfig {
                n_steps,
                krasny_threshold: 0.0,
                ..Default::default()
            };
            let tr = nlsemi::evolve::evolve(&psi0, &model, t_end, &cfg, &[t_end]).unwrap();
            tr.snapshots
                .last()
                .unwrap()
                .values
                .iter()
                .zip(&exact.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max)
                / amp
        };
        let e1 = run_err(20);
        let e2 = run_err(40);
        let order = (e1 / e2).log2();
        assert!(order > 3.7 && order < 4.3, "observed order {order} ({e1:e} → {e2:e})");
    }

    // η = 0 nonlocal coincides with the cubic equation within 1e-12.
    {
        let stepper = StepperConfig {
            n_steps: 400,
            ..Default::default()
        };
        let t_end = 0.2;
        let (_, tr_nl) = evolve_case(
            &InitialDataCase::NonlocalDefocSech { eta: 0.0 },
            0.5,
            1 << 10,
            InitialDataCase::NonlocalDefocSech { eta: 0.0 }.default_length(),
            &stepper,
            t_end,
            &[t_end],
        )
        .unwrap();
        let (_, tr_cb) = evolve_case(
            &InitialDataCase::CubicDefocSech,
            0.5,
            1 << 10,
            InitialDataCase::CubicDefocSech.default_length(),
            &stepper,
            t_end,
            &[t_end],
        )
        .unwrap();
        let mut diff = 0.0f64;
        for (a, b) in tr_nl.snapshots[0]
            .values
            .iter()
            .zip(&tr_cb.snapshots[0].values)
        {
            diff = diff.max((a - b).norm());
        }
        assert!(diff < 1e-12, "nonlocal η=0 vs cubic: {diff:e}");
    }

    assert!(start.elapsed().as_secs_f64() < 60.0, "criterion 9 over budget");
}
