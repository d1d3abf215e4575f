//! Cross-checks of the transfer solver and the resonance finder against
//! independent implementations.

mod common;

use common::*;
use gamow_core::resonance::residue_estimate;
use gamow_core::spectral::{EigenfunctionFamily, FamilyKind, RadialSamples};
use gamow_core::verification::fit_exterior;
use gamow_core::*;

#[test]
fn rk_oracle_matches_transfer_solution() {
    let pot = shell(8.0);
    for k in [c(3.0, 0.0), c(2.2, -0.4), c(1.3, 0.7)] {
        let sol = solve_regular(&pot, unit(), k).unwrap();
        let radii: Vec<f64> = (0..50).map(|j| 0.1 * j as f64 + 0.05).collect();
        let oracle = rk_oracle(&pot, unit(), k, &radii, 2e-4).unwrap();
        assert!(!oracle.step_too_large);
        for (j, &r) in radii.iter().enumerate() {
            let chi = evaluate_chi(&sol, r).unwrap();
            assert!((chi - oracle.chi[j]).norm() < 1e-8 * chi.norm().max(1.0), "k={k} r={r}");
            let d = evaluate_chi_derivative(&sol, r).unwrap();
            assert!((d - oracle.chi_prime[j]).norm() < 1e-8 * d.norm().max(1.0));
        }
    }
}

#[test]
fn rk_fitted_exterior_amplitudes() {
    let pot = shell(8.0);
    let k = c(3.0, 0.0);
    let oracle = rk_oracle(&pot, unit(), k, &[2.7, 3.4], 1e-4).unwrap();
    let (j3, j4) = fit_exterior(k, 2.7, oracle.chi[0], 3.4, oracle.chi[1]).unwrap();
    let jp = jost(&pot, unit(), k).unwrap();
    assert!((jp.j_minus - 2.0 * gamow_core::cmath::I * j3).norm() < 1e-8);
    assert!((jp.j_plus + 2.0 * gamow_core::cmath::I * j4).norm() < 1e-8);
    let sol = solve_regular(&pot, unit(), k).unwrap();
    let chi = evaluate_chi(&sol, 1.5).unwrap();
    let mid = rk_oracle(&pot, unit(), k, &[1.5], 1e-4).unwrap();
    assert!((chi - mid.chi[0]).norm() < 1e-8);
}

#[test]
fn rk_oracle_respects_conjugation() {
    let pot = shell(8.0);
    let k = c(2.5, -0.3);
    let radii = [0.5, 1.5, 3.0];
    let a = rk_oracle(&pot, unit(), k, &radii, 1e-3).unwrap();
    let b = rk_oracle(&pot, unit(), k.conj(), &radii, 1e-3).unwrap();
    for (x, y) in a.chi.iter().zip(&b.chi) {
        assert!((x.conj() - y).norm() < 1e-14 * x.norm().max(1.0));
    }
}

#[test]
fn chi_derivative_matches_finite_differences_at_second_order() {
    let pot = shell(8.0);
    let sol = solve_regular(&pot, unit(), c(3.0, -0.2)).unwrap();
    let r = 1.4;
    let exact = evaluate_chi_derivative(&sol, r).unwrap();
    let err = |h: f64| {
        let fd = (evaluate_chi(&sol, r + h).unwrap() - evaluate_chi(&sol, r - h).unwrap()) / (2.0 * h);
        (fd - exact).norm()
    };
    let order = (err(1e-2) / err(5e-3)).log2();
    assert!((order - 2.0).abs() < 0.05, "order {order}");
    // r → 0 gives χ′ = k.
    assert!((evaluate_chi_derivative(&sol, 0.0).unwrap() - c(3.0, -0.2)).norm() < 1e-14);
}

#[test]
fn finder_agrees_with_grid_scan_oracle() {
    let pot = shell(8.0);
    let region = shell_region();
    let found = find_resonances(&pot, unit(), region, 16).unwrap();
    let scan = grid_scan_oracle(&pot, unit(), region, 400, 400).unwrap();
    assert_eq!(found.states.len(), scan.len());
    assert_eq!(found.winding, scan.len() as i64);
    for (s, k) in found.states.iter().zip(&scan) {
        assert!((s.k_pole - k).norm() < 1e-8, "{} vs {}", s.k_pole, k);
    }
    for (s, (re, im)) in found.states.iter().zip(SHELL_POLES) {
        assert!((s.k_pole - c(re, im)).norm() < 1e-12);
    }
}

#[test]
fn residue_matches_reference_and_both_methods_agree() {
    let pot = shell(8.0);
    let k1 = c(SHELL_POLES[0].0, SHELL_POLES[0].1);
    let est = residue_estimate(&pot, unit(), k1).unwrap();
    assert!(est.relative_gap < 1e-6);
    let n2 = residue_norm(&pot, unit(), k1).unwrap();
    assert!((n2 - c(SHELL_N1_SQ.0, SHELL_N1_SQ.1)).norm() < 1e-9);
    assert!(est.radius >= 1e-4 * k1.norm() * 0.999);
}

#[test]
fn s_matrix_has_simple_poles_at_resonances() {
    let pot = shell(8.0);
    let k1 = c(SHELL_POLES[0].0, SHELL_POLES[0].1);
    // Average over directions so the regular part does not bias the fit.
    let mean_abs = |rho: f64| {
        let n = 16;
        (0..n)
            .map(|j| {
                let w = Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
                s_matrix(&pot, unit(), k1 + w).unwrap().s.norm()
            })
            .sum::<f64>()
            / n as f64
    };
    let slope = (mean_abs(1e-3) / mean_abs(1e-2)).log10();
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");

    let mut real: Vec<f64> = (1..=200)
        .map(|j| s_matrix(&pot, unit(), c(0.05 * j as f64, 0.0)).unwrap().s.norm())
        .collect();
    real.sort_by(f64::total_cmp);
    let median = real[real.len() / 2];
    for state in find_resonances(&pot, unit(), shell_region(), 8).unwrap().states {
        // A fixed 1e−3 offset is wider than the first pole's own width
        // scale; measure the offset in units of |Im k|.
        let s = s_matrix(&pot, unit(), state.k_pole + c(1e-3 * state.k_pole.im.abs(), 0.0)).unwrap().s.norm();
        assert!(s > 1e2 * median, "|S| = {s} near {}", state.k_pole);
    }
}

#[test]
fn no_jost_zeros_on_the_positive_real_axis() {
    for v0 in [0.5, 8.0, 50.0] {
        let pot = shell(v0);
        let min = (1..=4000)
            .map(|j| jost(&pot, unit(), c(0.0025 * j as f64, 0.0)).unwrap().j_plus.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(min > 1e-6, "V0={v0} min {min}");
    }
}

#[test]
fn conjugate_pairs_of_jost_zeros() {
    let pot = shell(8.0);
    for state in find_resonances(&pot, unit(), shell_region(), 8).unwrap().states {
        let k = state.k_pole;
        let scale = jost(&pot, unit(), k).unwrap().j_minus.norm();
        assert!(jost(&pot, unit(), -k.conj()).unwrap().j_plus.norm() <= 1e-10 * scale.max(1.0));
        assert!(jost(&pot, unit(), k.conj()).unwrap().j_minus.norm() <= 1e-10 * scale.max(1.0));
        assert!(jost(&pot, unit(), k).unwrap().j_plus.norm() <= 1e-10 * scale.max(1.0));
    }
}

#[test]
fn growing_partner_mirrors_the_pole() {
    let pot = shell(8.0);
    let search = find_resonances(&pot, unit(), shell_region(), 8).unwrap();
    for state in &search.states {
        let partner = growing_partner(state, &pot, unit()).unwrap();
        assert_eq!(partner.kind, GamowKind::Growing);
        assert_eq!(partner.k_pole, -state.k_pole.conj());
        assert!((partner.z_pole - state.z_pole.conj()).norm() < 1e-12 * state.z_pole.norm());
        assert!((partner.width - state.width).abs() < 1e-12 * state.width);
        assert!((partner.norm_sq - state.norm_sq.conj()).norm() < 1e-8 * state.norm_sq.norm());
        let back = growing_partner(&partner, &pot, unit()).unwrap();
        assert_eq!(back.kind, GamowKind::Decaying);
        assert_eq!(back.k_pole, state.k_pole);
        assert!((back.norm_sq - state.norm_sq).norm() < 1e-8 * state.norm_sq.norm());
    }
}

fn gamow_checks(v0: f64, region: SearchRegion) {
    let pot = shell(v0);
    let search = find_resonances(&pot, unit(), region, 8).unwrap();
    assert!(!search.states.is_empty());
    for state in &search.states {
        let partner = growing_partner(state, &pot, unit()).unwrap();
        for s in [state, &partner] {
            let peak = (1..200).map(|j| gamow_eigenfunction(s, 0.01 * j as f64).unwrap().norm()).fold(0.0, f64::max);
            assert!(gamow_eigenfunction(s, 0.0).unwrap().norm() <= 1e-12 * peak);
            // Purely outgoing tail.
            for j in 0..=40 {
                let r = 2.0 + 8.0 * j as f64 / 40.0;
                let tail = gamow_eigenfunction(s, r).unwrap() / (gamow_core::cmath::I * s.k_pole * r).exp();
                assert!((tail - s.norm).norm() <= 1e-10 * s.norm.norm());
            }
            // Value and slope continuity at each breakpoint.
            for (layer, &b) in pot.breakpoints().iter().enumerate() {
                let (v0_, d0) = s.evaluate_in_layer(layer, b).unwrap();
                let (v1, d1) = s.evaluate_in_layer(layer + 1, b).unwrap();
                let scale = v0_.norm().max(d0.norm() / s.k_pole.norm());
                assert!((v0_ - v1).norm() <= 1e-10 * scale, "V0={v0} value jump at {b}");
                assert!((d0 - d1).norm() <= 1e-10 * scale * s.k_pole.norm(), "V0={v0} slope jump at {b}: {}", (d0 - d1).norm() / scale);
            }
        }
    }
}

#[test]
fn gamow_functions_are_outgoing_and_smooth() {
    gamow_checks(8.0, shell_region());
    gamow_checks(50.0, SearchRegion::new(0.0, 6.0, -1.0, 0.0).unwrap());
    gamow_checks(500.0, SearchRegion::new(0.0, 3.5, -0.5, 0.0).unwrap());
}

#[test]
fn gamow_residual_converges_at_second_order() {
    let pot = shell(8.0);
    let state = find_resonances(&pot, unit(), shell_region(), 8).unwrap().states.remove(0);
    let k2 = state.k_pole * state.k_pole;
    let residual = |h: f64| {
        [0.5, 1.5, 3.0]
            .iter()
            .map(|&r| {
                let u = |x: f64| gamow_eigenfunction(&state, x).unwrap();
                let d2 = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
                (-d2 + pot.value(r) * u(r) - k2 * u(r)).norm()
            })
            .fold(0.0, f64::max)
    };
    let order = (residual(2e-2) / residual(1e-2)).log2();
    assert!((order - 2.0).abs() <= 0.1, "order {order}");
}

#[test]
fn widths_shrink_as_the_barrier_grows() {
    let mut widths = Vec::new();
    for (v0, im_min) in [(8.0, -1.0), (50.0, -1.0), (500.0, -0.5)] {
        let region = SearchRegion::new(0.0, 3.5, im_min, 0.0).unwrap();
        let s = find_resonances(&shell(v0), unit(), region, 4).unwrap();
        widths.push((s.states[0].k_pole, s.states[0].width));
    }
    assert!(widths[0].1 > widths[1].1 && widths[1].1 > widths[2].1 && widths[2].1 > 0.0);
    assert!((widths[2].0.re - std::f64::consts::PI).abs() < 0.05 * std::f64::consts::PI);
    // 60-digit references.
    assert!((widths[2].0 - c(3.006_719_532_658_740, -3.857_679_341_779_149e-21)).norm() < 1e-12);
    assert!((widths[2].0.im / -3.857_679_341_779_149e-21 - 1.0).abs() < 1e-6);
}

#[test]
fn narrow_pole_residue_matches_reference() {
    let pot = shell(500.0);
    let k = c(3.006_719_532_658_740, -3.857_679_341_779_149e-21);
    let n2 = residue_norm(&pot, unit(), k).unwrap();
    let reference = c(5.323_980_284_523_793e-21, 5.584_083_948_684_905e-21);
    assert!((n2 - reference).norm() < 1e-8 * reference.norm());
}

#[test]
fn phase_of_s_winds_once_across_a_narrow_resonance() {
    // Narrow enough that the hard-sphere background phase is negligible
    // across the window.
    let pot = shell(50.0);
    let region = SearchRegion::new(0.0, 3.5, -1.0, 0.0).unwrap();
    let k1 = find_resonances(&pot, unit(), region, 4).unwrap().states[0].k_pole;
    let gamma = -k1.im;
    let n = 2001;
    let mut total = 0.0;
    let mut prev = s_matrix(&pot, unit(), c(k1.re - 20.0 * gamma, 0.0)).unwrap().s;
    for j in 1..n {
        let k = k1.re - 20.0 * gamma + 40.0 * gamma * j as f64 / (n - 1) as f64;
        let s = s_matrix(&pot, unit(), c(k, 0.0)).unwrap().s;
        total += (s / prev).arg();
        prev = s;
    }
    assert!((total - 2.0 * std::f64::consts::PI).abs() < 0.6, "sweep {total}");
}

#[test]
fn transform_of_zero_is_zero() {
    let psi = RadialSamples::from_fn(20.0, 101, |_| c(0.0, 0.0)).unwrap();
    let t = energy_transform(EigenfunctionFamily::new(FamilyKind::In), &shell(8.0), unit(), &psi, &[1.0, 2.0, 3.0]).unwrap();
    assert!(t.coefficients.iter().all(|z| *z == c(0.0, 0.0)));
}

#[test]
fn transform_of_a_windowed_eigenfunction_peaks_at_its_energy() {
    let pot = shell(8.0);
    let e0 = 9.0;
    for kind in FamilyKind::ALL {
        let fam = EigenfunctionFamily::new(kind);
        let ef = fam.at_energy(&pot, unit(), e0).unwrap();
        let psi = RadialSamples::from_fn(80.0, 4001, |r| ef.value(r).unwrap()).unwrap();
        let grid: Vec<f64> = (0..=80).map(|j| 7.0 + 0.05 * j as f64).collect();
        let t = energy_transform(fam, &pot, unit(), &psi, &grid).unwrap();
        let peak = t
            .coefficients
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert!((grid[peak] - e0).abs() <= 0.05 + 1e-12, "{kind:?} peak at {}", grid[peak]);
    }
}

#[test]
fn free_smearing_oracle_is_exact() {
    let g = GaussianTest { center: 16.0, width: 1.5 };
    let lhs = free_delta_oracle(unit(), g, 60.0, 801).unwrap();
    assert!((lhs / g.norm_sqr() - 1.0).abs() < 1e-8);
    let report = smeared_delta_check(
        EigenfunctionFamily::new(FamilyKind::StandingWave),
        &free(),
        unit(),
        g,
        60.0,
        QuadratureSpec { n_energy: 401, n_radius: 1201 },
    )
    .unwrap();
    assert!((report.lhs - lhs).abs() < 1e-6 * lhs);
}
