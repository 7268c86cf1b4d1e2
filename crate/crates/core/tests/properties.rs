//! Randomized invariants tying the closed forms, the numeric integrator,
//! the budget solver, and the optimizer to one another.

use num_complex::Complex64;
use proptest::prelude::*;
use readout_core::*;

fn max_amp_err(a: &[(Complex64, Complex64)], b: &[(Complex64, Complex64)]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.0 - y.0).norm().max((x.1 - y.1).norm()))
        .fold(0.0, f64::max)
}

mod ode_backed {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// Closed-form release amplitudes equal the integrated equations of
        /// motion on a 20/κ horizon.
        #[test]
        fn release_closed_form_matches_integration(
            chi_mag in 0.1f64..5.0,
            neg in any::<bool>(),
            eps in 0.0f64..10.0,
            alpha in 0.0f64..3.0,
        ) {
            let chi = if neg { -chi_mag } else { chi_mag };
            let p = SchemeParams::resonant(chi, 1.0, eps, alpha, 100.0);
            let drive = DriveProfile::Constant { epsilon1: eps };
            let times = Trajectory::uniform_times(20.0, 101);
            let traj = integrate_eom_on(&p, &drive, &times, 1e-11).unwrap();
            let closed: Vec<_> = times.iter().map(|&t| amplitude_ar(&p, t).unwrap()).collect();
            let numeric: Vec<_> = (0..times.len())
                .map(|i| (traj.alpha_g[i], traj.alpha_e[i]))
                .collect();
            let err = max_amp_err(&closed, &numeric);
            prop_assert!(err < 1e-7, "max amplitude error {err:e}");
        }

        /// Same for the longitudinal-style scheme under its shaped drive,
        /// including the pinned imaginary part.
        #[test]
        fn longitudinal_closed_form_matches_integration(
            chi_mag in 0.1f64..5.0,
            neg in any::<bool>(),
            alpha in 0.05f64..3.0,
        ) {
            let chi = if neg { -chi_mag } else { chi_mag };
            let p = SchemeParams::resonant(chi, 1.0, 0.0, alpha, 100.0);
            let drive = DriveProfile::ArmLongitudinal { alpha_arm: alpha, chi, kappa: 1.0 };
            let times = Trajectory::uniform_times(10.0, 81);
            let traj = integrate_eom_on(&p, &drive, &times, 1e-11).unwrap();
            for i in 0..times.len() {
                let (g, e) = amplitude_al(alpha, chi, 1.0, times[i]).unwrap();
                prop_assert!((traj.alpha_g[i] - g).norm() < 1e-7);
                prop_assert!((traj.alpha_e[i] - e).norm() < 1e-7);
                prop_assert!((traj.alpha_e[i].im - alpha).abs() < 1e-9,
                    "imaginary part drifted at t = {}", times[i]);
            }
        }

        /// Flipping the sign of the shift mirrors both branches:
        /// α_{g,e}(−χ) = −conj(α_{g,e}(χ)).
        #[test]
        fn shift_sign_mirror_symmetry(
            chi in 0.1f64..5.0,
            eps in 0.0f64..10.0,
            alpha in 0.0f64..3.0,
            t in 0.0f64..20.0,
        ) {
            let plus = SchemeParams::resonant(chi, 1.0, eps, alpha, 100.0);
            let minus = SchemeParams::resonant(-chi, 1.0, eps, alpha, 100.0);
            let (gp, ep) = amplitude_ar(&plus, t).unwrap();
            let (gm, em) = amplitude_ar(&minus, t).unwrap();
            prop_assert!((gm + gp.conj()).norm() <= 1e-14 * (1.0 + gp.norm()));
            prop_assert!((em + ep.conj()).norm() <= 1e-14 * (1.0 + ep.norm()));
        }

        /// With the physical (negative) shift and an armed cavity, the ground
        /// branch leads on the real quadrature from the first instant.
        #[test]
        fn armed_separation_sign_for_negative_shift(
            chi in -5.0f64..-0.1,
            eps in 0.0f64..10.0,
            alpha in 0.1f64..3.0,
        ) {
            let p = SchemeParams::resonant(chi, 1.0, eps, alpha, 100.0);
            let t = 1e-3;
            let (g, e) = amplitude_ar(&p, t).unwrap();
            prop_assert!((g - e).re > 0.0, "separation {:e}", (g - e).re);
        }

        /// The matched-filter SNR accumulates: later τ never lowers it.
        #[test]
        fn snr_never_decreases_with_tau(
            chi_mag in 0.1f64..5.0,
            neg in any::<bool>(),
            eps in 0.0f64..10.0,
            alpha in 0.0f64..3.0,
            tau1 in 0.01f64..30.0,
            scale in 1.0f64..5.0,
        ) {
            let chi = if neg { -chi_mag } else { chi_mag };
            let p = SchemeParams::resonant(chi, 1.0, eps, alpha, 100.0);
            let s1 = snr_ar_closed(&p, tau1).unwrap().snr;
            let s2 = snr_ar_closed(&p, tau1 * scale).unwrap().snr;
            prop_assert!(s2 >= s1 - 1e-12 * (1.0 + s1));
        }

        /// Closed-form SNRs agree with quadrature of an integrated
        /// trajectory for both schemes.
        #[test]
        fn closed_snr_matches_numeric_quadrature(
            chi_mag in 0.1f64..5.0,
            neg in any::<bool>(),
            eps in 0.5f64..10.0,
            alpha in 0.1f64..3.0,
            tau in 0.5f64..10.0,
        ) {
            let chi = if neg { -chi_mag } else { chi_mag };
            let p = SchemeParams::resonant(chi, 1.0, eps, alpha, 100.0);
            let times = Trajectory::uniform_times(tau, 2001);
            let drive = DriveProfile::Constant { epsilon1: eps };
            let traj = integrate_eom_on(&p, &drive, &times, 1e-12).unwrap();
            let num = snr_numeric(&traj, 1.0, tau).unwrap().snr;
            let closed = snr_ar_closed(&p, tau).unwrap().snr;
            prop_assert!((num - closed).abs() <= 1e-5 * closed.max(1e-6),
                "release: {num} vs {closed}");

            let drive = DriveProfile::ArmLongitudinal { alpha_arm: alpha, chi, kappa: 1.0 };
            let traj = integrate_eom_on(&p, &drive, &times, 1e-12).unwrap();
            let num = snr_numeric(&traj, 1.0, tau).unwrap().snr;
            let closed = snr_al_closed(alpha, chi, 1.0, tau).unwrap().snr;
            prop_assert!((num - closed).abs() <= 1e-5 * closed.max(1e-6),
                "longitudinal: {num} vs {closed}");
        }

        /// The budget solver saturates: its drive really peaks at n_max.
        #[test]
        fn budget_drive_saturates_photon_ceiling(
            chi_mag in 0.1f64..5.0,
            neg in any::<bool>(),
            alpha_tilde in 0.0f64..0.999,
            n_max in 0.5f64..4.0,
        ) {
            let chi = if neg { -chi_mag } else { chi_mag };
            let alpha = alpha_tilde * n_max.sqrt();
            let eps = epsilon_for_peak(alpha, chi, 1.0, n_max).unwrap();
            let p = SchemeParams::resonant(chi, 1.0, eps, alpha, n_max);
            let peak = peak_photon(&p, &DriveProfile::Constant { epsilon1: eps }).unwrap();
            prop_assert!((peak.n_peak - n_max).abs() <= 1e-8 * n_max,
                "peak {} vs budget {n_max}", peak.n_peak);
        }
    }
}

mod optimizer_backed {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]

        /// The dispersive endpoint sits inside the search domain, so the
        /// armed optimum can never lose to it.
        #[test]
        fn relative_gain_at_least_one(
            r in 0.1f64..5.0,
            x in 0.1f64..30.0,
        ) {
            let g = gain_ar(r, 1.0, x, 2.44).unwrap();
            prop_assert!(g >= 1.0 - 1e-12, "gain {g}");
        }

        /// The normalized optimal arming amplitude does not depend on the
        /// photon budget.
        #[test]
        fn normalized_optimum_is_budget_free(
            r in 0.1f64..5.0,
            x in 0.1f64..30.0,
        ) {
            let opts = SearchOptions::default();
            let a = optimize_alpha_arm(r, 1.0, x, 1.0, &opts).unwrap().alpha_tilde;
            let b = optimize_alpha_arm(r, 1.0, x, 2.44, &opts).unwrap().alpha_tilde;
            prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }

        /// Large shift and long measurements: arming stops paying, the
        /// optimizer walks to the dispersive end.
        #[test]
        fn dispersive_end_wins_at_large_shift_and_long_time(
            r in 3.0f64..5.0,
            x in 10.0f64..30.0,
        ) {
            let opt = optimize_alpha_arm(r, 1.0, x, 2.44, &SearchOptions::default()).unwrap();
            let g = gain_ar(r, 1.0, x, 2.44).unwrap();
            prop_assert!(g - 1.0 < 5e-3, "gain {g}");
            prop_assert!(opt.alpha_tilde < 0.05, "alpha_tilde {}", opt.alpha_tilde);
        }

        /// The recommendation follows the gain ratio and reports a
        /// consistent error probability.
        #[test]
        fn recommendation_follows_gain_ratio(
            r in 0.1f64..5.0,
            x in 0.1f64..30.0,
        ) {
            let rec = recommend(r, 1.0, x, 2.44).unwrap();
            let ratio = gain_ratio(r, 1.0, x, 2.44).unwrap();
            let want = if ratio > 1.0 { SchemeKind::ArmLongitudinal } else { SchemeKind::ArmRelease };
            prop_assert!(rec.scheme == want);
            let err = assignment_error(rec.expected_snr).unwrap();
            prop_assert!((rec.expected_error - err).abs() < 1e-15);
        }
    }
}

mod cheap {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        /// Error probabilities live in (0, 1/2] and decrease with SNR.
        #[test]
        fn assignment_error_halves_and_decays(
            snr in 0.0f64..30.0,
            bump in 0.01f64..5.0,
        ) {
            let e1 = assignment_error(snr).unwrap();
            let e2 = assignment_error(snr + bump).unwrap();
            prop_assert!(e1 <= 0.5 && e1 > 0.0);
            prop_assert!(e2 < e1);
        }

        /// Dimensionless reduction: scaling (χ, κ, ε₁) by c and τ by 1/c
        /// rescales nothing in the SNR.
        #[test]
        fn snr_is_scale_covariant(
            chi in 0.1f64..5.0,
            eps in 0.0f64..10.0,
            alpha in 0.0f64..3.0,
            tau in 0.05f64..20.0,
            c in prop::sample::select(vec![0.25f64, 0.5, 2.0, 4.0]),
        ) {
            let p1 = SchemeParams::resonant(chi, 1.0, eps, alpha, 100.0);
            let p2 = SchemeParams::resonant(chi * c, c, eps * c, alpha, 100.0);
            let s1 = snr_ar_closed(&p1, tau).unwrap().snr;
            let s2 = snr_ar_closed(&p2, tau / c).unwrap().snr;
            prop_assert!((s1 - s2).abs() <= 1e-10 * (1.0 + s1), "{s1} vs {s2}");
        }

        /// The budget amplitude formula stays on the circle
        /// α² (1 + (χ/κ)²) = n_max.
        #[test]
        fn longitudinal_arming_spends_the_whole_budget(
            r in 0.01f64..10.0,
            n_max in 0.1f64..10.0,
        ) {
            let a = alpha_arm_for_al(r, 1.0, n_max).unwrap();
            let spent = a * a * (1.0 + r * r);
            prop_assert!((spent - n_max).abs() <= 1e-12 * n_max);
        }
    }
}

/// A parallel map evaluation must be indistinguishable from the serial one.
#[test]
fn gain_map_parallel_equals_serial_bitwise() {
    let chi_axis = log_axis(0.2, 3.0, 5).unwrap();
    let tau_axis = log_axis(0.5, 20.0, 4).unwrap();
    let par = gain_map(&chi_axis, &tau_axis, 2.44).unwrap();
    let ser = readout_core::optimizer::gain_map_serial(&chi_axis, &tau_axis, 2.44).unwrap();
    for (row_p, row_s) in par.cells.iter().zip(&ser.cells) {
        for (p, s) in row_p.iter().zip(row_s) {
            let (p, s) = (p.as_ref().unwrap(), s.as_ref().unwrap());
            assert_eq!(p.gain_ar.to_bits(), s.gain_ar.to_bits());
            assert_eq!(p.gain_al.to_bits(), s.gain_al.to_bits());
            assert_eq!(p.gain_ratio.to_bits(), s.gain_ratio.to_bits());
            assert_eq!(p.alpha_tilde.to_bits(), s.alpha_tilde.to_bits());
            assert_eq!(p.recommended, s.recommended);
        }
    }
}

/// Map cells agree with the direct gain calls they are built from.
#[test]
fn gain_map_cells_match_direct_calls() {
    let m = gain_map(&[0.42, 1.0], &[11.31, 20.73], 2.44).unwrap();
    for (i, &r) in m.chi_over_kappa_axis.clone().iter().enumerate() {
        for (j, &x) in m.kappa_tau_axis.clone().iter().enumerate() {
            let cell = m.cells[i][j].as_ref().unwrap();
            assert_eq!(cell.gain_ratio, gain_ratio(r, 1.0, x, 2.44).unwrap());
        }
    }
}
