use std::fs;

use spc_timescale::benchmark::{benchmark_check, in_sample_divergence, render_check, CheckOutcome};
use spc_timescale::dataset::{generate_synthetic, write_dataset, Observation, RegionSeries, SequenceLabel, SynthSpec};
use spc_timescale::pipeline::{analyze, run_pipeline, write_outputs};
use spc_timescale::report::{lookup, parse_json, render_json, render_text};
use spc_timescale::{ContinuityMode, Dataset, PipelineConfig, PipelineError, ReportBundle, Stage};

fn config() -> PipelineConfig {
    PipelineConfig { seed: 7, n_bootstrap: 100, n_validation: 20, ..PipelineConfig::default() }
}

fn demo(seed: u64) -> Dataset {
    generate_synthetic(&SynthSpec::demo(), seed).unwrap()
}

fn bundle() -> ReportBundle {
    analyze(demo(1), &config(), "test").unwrap()
}

fn series(nga: &str, values: impl Iterator<Item = (i64, f64)>) -> RegionSeries {
    RegionSeries {
        nga: nga.into(),
        points: values
            .map(|(abs_time, spc1_raw)| Observation {
                pol_id: "X".into(),
                abs_time,
                rel_time_recorded: None,
                spc1_raw,
                spc1_scaled: None,
                culture: SequenceLabel::OutsideCentral,
                institution: SequenceLabel::OutsideCentral,
            })
            .collect(),
    }
}

#[test]
fn demo_panel_alignment_and_fit() {
    let b = bundle();
    assert_eq!(b.n_regions, 35);
    assert_eq!(b.aligned.regions.len(), 23);
    assert_eq!(b.aligned.discarded.len(), 12);
    assert!(b.threshold.spc1_0 > 0.2 && b.threshold.spc1_0 < 0.8);
    for r in &b.aligned.regions {
        let i = r.anchor_index();
        assert_eq!(r.rel_times[i], 0);
        assert!(r.series.points[i].spc1_scaled.unwrap() > b.threshold.spc1_0);
    }
    // noise of 0.04 raw units, shrunk by the scale range
    let expected = 0.04 / (b.scale.max - b.scale.min);
    assert!((b.full_fit.rmse - expected).abs() < 0.1 * expected, "rmse {} vs {expected}", b.full_fit.rmse);
    assert!(b.full_fit.converged && b.full_fit.params.c > 0.0);
    assert!(b.validation.mean_rho2 > 0.9);
    assert_eq!(b.timescales.len(), 2);
    assert!(b.timescale(1.0).unwrap().duration_mean > b.timescale(3.0).unwrap().duration_mean);
    assert_eq!(b.empirical.as_ref().unwrap().th1, b.thresholds.iter().find(|t| t.k_sigma == 3.0).unwrap().th1);
    assert!(b.continuity_fit(ContinuityMode::Cultural).is_some());
    assert!(b.continuity_fit(ContinuityMode::Institutional).is_some());
}

#[test]
fn noiseless_panel_fits_exactly() {
    let spec = SynthSpec { noise_sigma: 0.0, ..SynthSpec::demo() };
    let b = analyze(generate_synthetic(&spec, 0).unwrap(), &config(), "test").unwrap();
    assert!(b.full_fit.rmse < 1e-6, "rmse {}", b.full_fit.rmse);
    assert!(b.validation.rho2_values.iter().all(|r| *r > 0.999));
    // identical bootstrap curves leave no room between the plateau bounds
    assert_eq!(b.timescales.len() + b.timescale_failures.len(), 2);
    let text = render_text(&b);
    for f in &b.timescale_failures {
        assert!(lookup(&text, "timescales", &format!("k{}.unavailable", f.k_sigma)).is_some());
    }
}

#[test]
fn stages_limit_the_work() {
    let fit_only = analyze(demo(1), &PipelineConfig { stage: Stage::Fit, ..config() }, "x").unwrap();
    assert!(fit_only.bootstrap.is_none() && fit_only.timescales.is_empty() && fit_only.continuity.is_empty());
    let cont = analyze(demo(1), &PipelineConfig { stage: Stage::Continuity, ..config() }, "x").unwrap();
    assert!(cont.bootstrap.is_none());
    assert_eq!(cont.continuity.len(), 2);
    let boot = analyze(demo(1), &PipelineConfig { stage: Stage::Bootstrap, ..config() }, "x").unwrap();
    assert!(boot.bootstrap.is_some() && boot.continuity.is_empty());
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let a = bundle();
    let b = bundle();
    assert_eq!(render_text(&a), render_text(&b));
    assert_eq!(render_json(&a), render_json(&b));
    assert_eq!(parse_json(&render_json(&a)).unwrap(), a);
    let other = analyze(demo(1), &PipelineConfig { seed: 8, ..config() }, "test").unwrap();
    assert_ne!(render_text(&a), render_text(&other));
}

#[test]
fn text_report_exposes_headline_numbers() {
    let b = bundle();
    let text = render_text(&b);
    let num = |s: &str, k: &str| lookup(&text, s, k).unwrap().parse::<f64>().unwrap();
    assert_eq!(num("full_fit", "full.rmse"), b.full_fit.rmse);
    assert_eq!(num("validation", "mean_rho2"), b.validation.mean_rho2);
    assert_eq!(num("timescales", "k3.duration_mean"), b.timescale(3.0).unwrap().duration_mean);
    assert_eq!(num("threshold", "spc1_0"), b.threshold.spc1_0);
    assert_eq!(num("alignment", "retained"), 23.0);
    assert_eq!(num("continuity.cultural", "mean_length"), b.continuity[0].mean_length);
    assert_eq!(lookup(&text, "provenance", "seed"), Some("7"));
}

#[test]
fn written_artifacts() {
    let b = bundle();
    let dir = tempfile::tempdir().unwrap();
    let written = write_outputs(&b, dir.path()).unwrap();
    assert!(written.iter().all(|p| p.exists()));
    for name in ["report.txt", "report.json", "curves.csv", "kde.csv", "residuals.csv", "fig_kde.svg", "fig_curves.svg"]
    {
        assert!(dir.path().join(name).is_file(), "{name}");
    }

    let n_series = fs::read_dir(dir.path().join("series")).unwrap().count();
    assert_eq!(n_series, b.aligned.regions.len());

    let residuals = fs::read_to_string(dir.path().join("residuals.csv")).unwrap();
    assert_eq!(residuals.lines().count() - 1, b.aligned.pooled_points().len());

    let kde = fs::read_to_string(dir.path().join("kde.csv")).unwrap();
    assert_eq!(kde.lines().count() - 1, b.density.grid.len());

    let window = fs::read_to_string(dir.path().join("growth_window.csv")).unwrap();
    let rows: Vec<Vec<f64>> = window
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            vec![f[0].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap()]
        })
        .collect();
    assert_eq!(rows.len(), 2 * b.timescales.len());
    for t in &b.timescales {
        let mine: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == t.k_sigma).collect();
        assert_eq!(*mine[0], vec![t.k_sigma, t.t1_mean, t.th1]);
        assert_eq!(*mine[1], vec![t.k_sigma, t.t2_mean, t.th2]);
    }

    let svg = fs::read_to_string(dir.path().join("fig_timeseries.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn pipeline_reads_its_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("panel.csv");
    write_dataset(&demo(1), fs::File::create(&path).unwrap()).unwrap();
    let cfg = PipelineConfig { input_path: path, ..config() };
    let from_file = run_pipeline(&cfg).unwrap();
    assert_eq!(from_file.provenance.input_sha256.len(), 64);
    assert_eq!(from_file.full_fit, bundle().full_fit);
}

#[test]
fn missing_input_is_a_data_error() {
    let cfg = PipelineConfig { input_path: "/nonexistent/panel.csv".into(), ..config() };
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(err, PipelineError::Input { .. }));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn held_out_region_is_checked_against_the_curve() {
    let mut full = demo(3);
    let held = full.regions.remove(4);
    let b = analyze(full, &config(), "x").unwrap();
    let reports = benchmark_check(&b, Dataset { regions: vec![held.clone()], scale: None }).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].nga, held.nga);
    match &reports[0].outcome {
        CheckOutcome::Anchored { points, divergent_fraction, .. } => {
            assert_eq!(points.len(), held.points.len());
            assert!(*divergent_fraction < 0.2, "{divergent_fraction}");
        }
        CheckOutcome::NotAnchorable => panic!("held-out region should cross"),
    }
    let retained = in_sample_divergence(&b, b.aligned.regions[0].nga()).unwrap();
    assert!(retained < 0.2);
    assert_eq!(in_sample_divergence(&b, "nowhere"), None);
    assert!(render_check(&reports).contains("status = anchored"));
}

#[test]
fn on_curve_series_has_no_divergence() {
    let mut b = bundle();
    // shift the curve so that its first century above the threshold is 0
    let curve = b.full_fit.params;
    let first = (-100..100).map(|k| k * 100).find(|t| curve.eval(*t as f64) > b.threshold.spc1_0).unwrap();
    b.full_fit.params.d -= first as f64;
    let curve = b.full_fit.params;
    let scale = b.scale;
    let s = series("On Curve", (-30..=30).map(|k| (k * 100, scale.unscale(curve.eval((k * 100) as f64)))));
    let reports = benchmark_check(&b, Dataset { regions: vec![s], scale: None }).unwrap();
    match &reports[0].outcome {
        CheckOutcome::Anchored { anchor_year, points, divergent_fraction } => {
            assert_eq!(*anchor_year, 0);
            assert_eq!(*divergent_fraction, 0.0);
            assert!(points.iter().all(|p| p.residual.abs() < 1e-12));
        }
        CheckOutcome::NotAnchorable => panic!("series crosses the threshold"),
    }
}

#[test]
fn flat_series_is_not_anchorable() {
    let b = bundle();
    let low = b.scale.min;
    let s = series("Flat", (0..20).map(|k| (k * 100, low)));
    let reports = benchmark_check(&b, Dataset { regions: vec![s], scale: None }).unwrap();
    assert_eq!(reports[0].outcome, CheckOutcome::NotAnchorable);
    assert!(render_check(&reports).contains("not_anchorable"));
}
