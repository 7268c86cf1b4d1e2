//! Acceptance gate for the full-model crate. Each criterion prints one
//! PASS/FAIL line with the measured numbers next to the required band.

use std::time::Instant;

use readout_core::params::SchemeKind;
use readout_lindblad::evolve::StepControl;
use readout_lindblad::fullsim::run_readout_fullsim;
use readout_lindblad::spectrum::{chi_at_target, dressed_spectrum};
use readout_lindblad::transmon::TransmonParams;

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Reference device: dressed shifts and matched drive frequencies for both
/// figure panels, against the published values with a 2% band (1 MHz on ω₁).
#[test]
fn criterion_08_full_model_dispersive_shifts() {
    let start = Instant::now();

    // Panel a: n_tar = 2 at a 1 MHz cavity.
    let pa = TransmonParams::new(16930.0, 200.4, 159.1, 7655.0, 1.0, 6, 45, 40);
    let sa = dressed_spectrum(&pa).unwrap();
    let (chi_a, omega1_a) = chi_at_target(&sa, 2).unwrap();
    let ratio_a = chi_a.abs() / pa.kappa;

    // Panel b: n_tar = 1 at a 10.1 MHz cavity.
    let pb = TransmonParams::new(16930.0, 200.4, 159.1, 7655.0, 10.1, 6, 25, 40);
    let sb = dressed_spectrum(&pb).unwrap();
    let (chi_b, omega1_b) = chi_at_target(&sb, 1).unwrap();
    let ratio_b = chi_b.abs() / pb.kappa;

    let elapsed = start.elapsed().as_secs_f64();
    let ok_a = (ratio_a / 3.286 - 1.0).abs() < 0.02;
    let ok_b = (ratio_b / 0.326 - 1.0).abs() < 0.02;
    let ok_wa = (omega1_a - 7665.0).abs() < 1.0;
    let ok_wb = (omega1_b - 7666.0).abs() < 1.0;
    let ok_t = elapsed < 60.0;
    let ok = ok_a && ok_b && ok_wa && ok_wb && ok_t;
    println!(
        "ACCEPTANCE C08 full_model_dispersive_shifts: {} \
         (|chi_2|/kappa = {ratio_a:.4} vs 3.286 +/- 2%, |chi_1|/kappa = {ratio_b:.4} vs \
         0.326 +/- 2%, omega_1 = {omega1_a:.3}/{omega1_b:.3} MHz vs 7665/7666 +/- 1, \
         {elapsed:.1} s < 60 s)",
        verdict(ok)
    );
    assert!(ok_a, "panel-a shift ratio {ratio_a}");
    assert!(ok_b, "panel-b shift ratio {ratio_b}");
    assert!(ok_wa, "panel-a omega_1 {omega1_a}");
    assert!(ok_wb, "panel-b omega_1 {omega1_b}");
    assert!(ok_t, "runtime {elapsed}");
}

/// Reference device, panel-b arm-and-longitudinal run over κt ≤ 3 at the
/// default cutoffs: the armed imaginary part holds within 10%, the real
/// parts separate monotonically, and the trace/truncation monitors stay
/// well inside their bands.
#[test]
fn criterion_09_full_model_longitudinal_behavior() {
    let start = Instant::now();
    let params = TransmonParams::new(16930.0, 200.4, 159.1, 7655.0, 10.1, 6, 25, 40);
    // Fine sampling (κt steps of 1e-3) resolves the fast dressing beat the
    // instantaneous arming excites, so it can be averaged away below.
    let ctrl = StepControl {
        steps_per_period: StepControl::default().steps_per_period,
        samples: 3001,
    };
    let r = run_readout_fullsim(SchemeKind::ArmLongitudinal, &params, 1, 2.0, 3.0, &ctrl)
        .unwrap();

    // Worst excursion of the armed quadrature, both branches, raw samples.
    let mut im_dev: f64 = 0.0;
    for a in r.a_g.iter().chain(r.a_e.iter()) {
        im_dev = im_dev.max((a.im - r.alpha_arm).abs());
    }
    let im_frac = im_dev / r.alpha_arm;
    let ok_im = im_frac < 0.10;

    // Monotone branch separation. The separation ramps from 0 to ~0.67 with
    // a ±0.015 ripple at the qubit-cavity detuning (κt period ≈ 0.024)
    // riding on it, the same ripple the published trajectories show. The
    // growth statement concerns the trend, so the beat is boxcar-averaged
    // over one period before checking strict growth on 31 grid points.
    let sep: Vec<f64> = (0..r.times.len())
        .map(|i| r.a_g[i].re - r.a_e[i].re)
        .collect();
    let window = 12usize;
    let smooth = |i: usize| -> f64 {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(sep.len() - 1);
        sep[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
    };
    let trend: Vec<f64> = (0..sep.len()).step_by(100).map(smooth).collect();
    let ok_mono = trend.windows(2).all(|w| w[1] > w[0]);

    let trace = r.max_trace_dev();
    let top = r.max_top_fock();
    let ok_trace = trace < 1e-6;
    let ok_top = top < 1e-4;
    let elapsed = start.elapsed().as_secs_f64();
    let ok_t = elapsed < 1200.0;
    let ok = ok_im && ok_mono && ok_trace && ok_top && ok_t;
    println!(
        "ACCEPTANCE C09 full_model_longitudinal_behavior: {} \
         (Im excursion {:.2}% of alpha_arm < 10%, beat-averaged separation monotone on 31-point grid: {}, \
         trace dev {trace:.2e} < 1e-6, top-Fock {top:.2e} < 1e-4, {elapsed:.0} s < 1200 s)",
        verdict(ok),
        100.0 * im_frac,
        ok_mono
    );
    assert!(ok_im, "Im excursion fraction {im_frac}");
    assert!(ok_mono, "separation trend not monotone: {trend:?}");
    assert!(ok_trace, "trace deviation {trace}");
    assert!(ok_top, "top-Fock population {top}");
    assert!(ok_t, "runtime {elapsed}");
}
