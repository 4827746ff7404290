use spc_timescale::align::shift_to_reltime;
use spc_timescale::dataset::{generate_synthetic, minmax_scale, ContinuityMode, SynthSpec};
use spc_timescale::inference::*;
use spc_timescale::logistic::{fit_logistic, FitConfig, FitResult, LogisticParams};
use spc_timescale::AlignedDataset;

fn aligned(spec: &SynthSpec, seed: u64) -> AlignedDataset {
    let scaled = minmax_scale(generate_synthetic(spec, seed).unwrap()).unwrap();
    shift_to_reltime(&scaled, 0.5).unwrap()
}

fn full_fit(a: &AlignedDataset) -> FitResult {
    fit_logistic(&a.pooled_points(), LogisticParams::default_init(), &FitConfig::default()).unwrap()
}

fn ensemble(params: Vec<LogisticParams>) -> BootstrapEnsemble {
    BootstrapEnsemble { n_iter: params.len(), param_sets: params, failed_fits: 0, seed: 0 }
}

#[test]
fn thresholds_from_two_lower_plateaus() {
    let e = ensemble(vec![LogisticParams::new(1.0, 0.0, 0.002, 0.0), LogisticParams::new(0.98, 0.02, 0.002, 0.0)]);
    let th = plateau_thresholds(&e, 1.0).unwrap();
    // mean 0.01, population sd 0.01
    assert!((th.th1 - 0.02).abs() < 1e-15);
    assert!((th.th2 - 1.0).abs() < 1e-15);
}

#[test]
fn identical_curves_give_the_asymptotes() {
    let e = ensemble(vec![LogisticParams::new(1.0, 0.0, 0.002, 0.0); 5]);
    let th = plateau_thresholds(&e, 3.0).unwrap();
    assert_eq!((th.th1, th.th2), (0.0, 1.0));
    assert_eq!(th.sd_lower, 0.0);
}

#[test]
fn threshold_errors() {
    let e = ensemble(vec![]);
    assert_eq!(plateau_thresholds(&e, 1.0), Err(InferenceError::EmptyEnsemble));
    let e = ensemble(vec![LogisticParams::new(1.0, 0.0, 0.002, 0.0)]);
    assert!(matches!(plateau_thresholds(&e, 0.0), Err(InferenceError::InvalidKSigma(_))));
    // a wide spread of plateaus makes the bounds cross
    let e = ensemble(vec![LogisticParams::new(0.1, 0.0, 0.002, 0.0), LogisticParams::new(0.1, 1.0, 0.002, 0.0)]);
    assert!(matches!(plateau_thresholds(&e, 3.0), Err(InferenceError::InvertedThresholds { .. })));
}

#[test]
fn duration_of_a_single_curve_has_closed_form() {
    let c = 0.002;
    let e = ensemble(vec![LogisticParams::new(1.0, 0.0, c, 250.0)]);
    for y2 in [0.6, 0.9, 0.99] {
        let th = PlateauThresholds {
            k_sigma: 1.0,
            th1: 1.0 - y2,
            th2: y2,
            mean_lower: 0.0,
            sd_lower: 0.0,
            mean_upper: 1.0,
            sd_upper: 0.0,
        };
        let t = characteristic_timescale(&e, &th).unwrap();
        let expected = 2.0 / c * (y2 / (1.0 - y2)).ln();
        assert!((t.duration_mean - expected).abs() < 1e-9 * expected, "{y2}: {}", t.duration_mean);
        assert!((t.t1_mean + t.t2_mean - 500.0).abs() < 1e-9);
    }
}

#[test]
fn curves_that_miss_a_threshold_are_excluded() {
    let e = ensemble(vec![LogisticParams::new(1.0, 0.0, 0.002, 0.0), LogisticParams::new(0.5, 0.0, 0.002, 0.0)]);
    let th = PlateauThresholds {
        k_sigma: 1.0,
        th1: 0.1,
        th2: 0.8,
        mean_lower: 0.0,
        sd_lower: 0.0,
        mean_upper: 0.0,
        sd_upper: 0.0,
    };
    let t = characteristic_timescale(&e, &th).unwrap();
    assert_eq!((t.n_crossing_curves, t.n_excluded), (1, 1));
    let th = PlateauThresholds { th2: 1.5, ..th };
    assert!(matches!(characteristic_timescale(&e, &th), Err(InferenceError::NoCrossingCurves { .. })));
}

#[test]
fn bootstrap_ensemble_properties() {
    let spec = SynthSpec { noise_sigma: 0.02, ..SynthSpec::default() };
    let scaled = minmax_scale(generate_synthetic(&spec, 5).unwrap()).unwrap();
    let truth_upper = scaled.scale.unwrap().scale(1.0);
    let a = shift_to_reltime(&scaled, 0.5).unwrap();
    let fit = full_fit(&a);
    let e = bootstrap_fits(&a, &fit, 200, 11, &FitConfig::default()).unwrap();
    assert_eq!(e.param_sets.len() + e.failed_fits, 200);
    assert!(e.param_sets.iter().all(|p| p.c > 0.0));

    let upper = e.upper_plateaus();
    let mean = upper.iter().sum::<f64>() / upper.len() as f64;
    let sd = (upper.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / upper.len() as f64).sqrt();
    assert!((mean - truth_upper).abs() <= 2.0 * sd, "mean {mean} sd {sd} truth {truth_upper}");

    let k1 = characteristic_timescale(&e, &plateau_thresholds(&e, 1.0).unwrap()).unwrap();
    let k3 = characteristic_timescale(&e, &plateau_thresholds(&e, 3.0).unwrap()).unwrap();
    assert!(k1.duration_mean >= k3.duration_mean);
    for t in [&k1, &k3] {
        assert!((t.duration_mean - (t.t2_mean - t.t1_mean)).abs() < 1e-9);
    }

    let again = bootstrap_fits(&a, &fit, 200, 11, &FitConfig::default()).unwrap();
    assert_eq!(e, again);
    let other = bootstrap_fits(&a, &fit, 200, 12, &FitConfig::default()).unwrap();
    assert_ne!(e.param_sets, other.param_sets);
}

#[test]
fn bootstrap_needs_two_regions() {
    let a = aligned(&SynthSpec { n_regions: 1, ..SynthSpec::default() }, 0);
    let fit = full_fit(&a);
    assert_eq!(bootstrap_fits(&a, &fit, 10, 0, &FitConfig::default()), Err(InferenceError::TooFewRegions(1)));
    let a = aligned(&SynthSpec::default(), 0);
    assert_eq!(bootstrap_fits(&a, &fit, 0, 0, &FitConfig::default()), Err(InferenceError::ZeroRepeats));
}

#[test]
fn noiseless_validation_is_near_perfect() {
    let a = aligned(&SynthSpec { noise_sigma: 0.0, ..SynthSpec::default() }, 0);
    let fit = full_fit(&a);
    let v = out_of_sample_validation(&a, &fit, 100, 3, &FitConfig::default()).unwrap();
    assert_eq!(v.rho2_values.len(), 100);
    assert!(v.rho2_values.iter().all(|r| *r > 0.999));
    assert_eq!(v, out_of_sample_validation(&a, &fit, 100, 3, &FitConfig::default()).unwrap());
}

#[test]
fn validation_stderr_shrinks_with_repeats() {
    let a = aligned(&SynthSpec { noise_sigma: 0.1, ..SynthSpec::default() }, 2);
    let fit = full_fit(&a);
    let v25 = out_of_sample_validation(&a, &fit, 25, 8, &FitConfig::default()).unwrap();
    let v100 = out_of_sample_validation(&a, &fit, 100, 8, &FitConfig::default()).unwrap();
    let ratio = v25.stderr_rho2 / v100.stderr_rho2;
    assert!((1.5..=2.5).contains(&ratio), "ratio {ratio}");
    // substreams are per repeat, so the first 25 values coincide
    assert_eq!(v25.rho2_values[..], v100.rho2_values[..25]);
}

#[test]
fn validation_rejects_empty_requests() {
    let a = aligned(&SynthSpec::default(), 0);
    let fit = full_fit(&a);
    assert_eq!(out_of_sample_validation(&a, &fit, 0, 0, &FitConfig::default()), Err(InferenceError::ZeroRepeats));
}

#[test]
fn empirical_durations_on_identical_regions() {
    let a = aligned(&SynthSpec { noise_sigma: 0.0, n_regions: 4, ..SynthSpec::default() }, 0);
    let e = empirical_durations(&a, 0.1, 0.9).unwrap();
    assert_eq!(e.per_nga.len(), 4);
    let first = e.per_nga[0].duration;
    assert!(first > 0 && first % 100 == 0);
    assert!(e.per_nga.iter().all(|r| r.duration == first));
    assert_eq!(e.mean_duration, Some(first as f64));
    assert_eq!(e.median_duration, Some(first as f64));

    let never = empirical_durations(&a, 0.1, 1.5).unwrap();
    assert_eq!(never.excluded.len(), 4);
    assert_eq!(never.mean_duration, None);
}

#[test]
fn continuity_segments_and_ranking() {
    let spec = SynthSpec { noise_sigma: 0.01, ..SynthSpec::default() };
    let a = aligned(&spec, 4);
    let fit = full_fit(&a);
    let cultural = continuity_comparison(&a, &fit, ContinuityMode::Cultural, &FitConfig::default()).unwrap();
    let institutional = continuity_comparison(&a, &fit, ContinuityMode::Institutional, &FitConfig::default()).unwrap();
    assert_eq!(cultural.segments.len(), 23);
    assert!(cultural.mean_length > institutional.mean_length);
    assert!(cultural.ranking.windows(2).all(|w| w[0].1 >= w[1].1));
    assert!(cultural.fit.params.c > 0.0);
}

#[test]
fn continuity_without_labels_is_infeasible() {
    let spec = SynthSpec { cultural_half_width: -1, ..SynthSpec::default() };
    let a = aligned(&spec, 0);
    let fit = full_fit(&a);
    let r = continuity_comparison(&a, &fit, ContinuityMode::Cultural, &FitConfig::default());
    assert!(matches!(r, Err(InferenceError::ContinuityInfeasible { segments: 0, .. })));
}
