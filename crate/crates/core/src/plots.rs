//! Plot-ready CSV files and static SVG renderings of a report bundle.
//!
//! The CSVs carry every plotted number; the SVGs are overlays drawn from the
//! same data.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::dataset::ContinuityMode;
use crate::logistic::LogisticParams;
use crate::pipeline::ReportBundle;
use crate::svg::{Panel, Svg, PALETTE};

/// Spacing of the dense curve samples, in years.
pub const CURVE_STEP: f64 = 10.0;

/// File-system friendly version of a region name.
pub fn slug(name: &str) -> String {
    let s: String =
        name.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect();
    s.trim_matches('_').to_string()
}

fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> io::Result<PathBuf> {
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

fn time_span(bundle: &ReportBundle) -> (f64, f64) {
    bundle
        .aligned
        .regions
        .iter()
        .flat_map(|r| r.rel_times.iter().map(|t| *t as f64))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)))
}

fn curve_fits(bundle: &ReportBundle) -> Vec<(&'static str, LogisticParams)> {
    let mut fits = vec![("full", bundle.full_fit.params)];
    for mode in ContinuityMode::ALL {
        if let Some(c) = bundle.continuity_fit(mode) {
            fits.push((mode.name(), c.fit.params));
        }
    }
    fits
}

/// Write every CSV and SVG artifact into `dir`; returns the paths written.
pub fn emit_plot_data(bundle: &ReportBundle, dir: &Path) -> io::Result<Vec<PathBuf>> {
    let series_dir = dir.join("series");
    fs::create_dir_all(&series_dir)?;
    let mut written = Vec::new();

    let mut used = BTreeSet::new();
    for (i, region) in bundle.aligned.regions.iter().enumerate() {
        let mut name = slug(region.nga());
        if name.is_empty() || !used.insert(name.clone()) {
            name = format!("{name}_{i}");
            used.insert(name.clone());
        }
        let rows = region
            .series
            .points
            .iter()
            .zip(&region.rel_times)
            .map(|(p, t)| format!("{},{},{}", p.abs_time, t, p.spc1_scaled.unwrap_or(f64::NAN)));
        written.push(write_csv(&series_dir.join(format!("{name}.csv")), "abs_time,rel_time,spc1_scaled", rows)?);
    }

    let (t0, t1) = time_span(bundle);
    let fits = curve_fits(bundle);
    let n_steps = ((t1 - t0) / CURVE_STEP).ceil().max(1.0) as usize;
    let header = std::iter::once("rel_time").chain(fits.iter().map(|(n, _)| *n)).collect::<Vec<_>>().join(",");
    let rows = (0..=n_steps).map(|i| {
        let t = (t0 + i as f64 * CURVE_STEP).min(t1);
        let vals: Vec<String> = fits.iter().map(|(_, p)| p.eval(t).to_string()).collect();
        format!("{t},{}", vals.join(","))
    });
    written.push(write_csv(&dir.join("curves.csv"), &header, rows)?);

    let rows = bundle.density.grid.iter().zip(&bundle.density.density).map(|(x, y)| format!("{x},{y}"));
    written.push(write_csv(&dir.join("kde.csv"), "spc1,density", rows)?);

    let labelled: Vec<(&str, f64, f64)> =
        bundle.aligned.regions.iter().flat_map(|r| r.points().map(move |(t, y)| (r.nga(), t, y))).collect();
    let rows = labelled
        .iter()
        .zip(&bundle.full_fit.residuals)
        .map(|((nga, t, y), r)| format!("{},{t},{y},{},{r}", csv_field(nga), bundle.full_fit.params.eval(*t)));
    written.push(write_csv(&dir.join("residuals.csv"), "nga,rel_time,observed,predicted,residual", rows)?);

    if !bundle.timescales.is_empty() {
        let rows = bundle.timescales.iter().flat_map(|t| {
            [
                format!("{},lower,{},{}", t.k_sigma, t.t1_mean, t.th1),
                format!("{},upper,{},{}", t.k_sigma, t.t2_mean, t.th2),
            ]
        });
        written.push(write_csv(&dir.join("growth_window.csv"), "k_sigma,bound,rel_time,spc1", rows)?);
    }
    if let Some(e) = &bundle.bootstrap {
        let rows = e.param_sets.iter().map(|p| format!("{},{},{},{}", p.a, p.b, p.c, p.d));
        written.push(write_csv(&dir.join("bootstrap_params.csv"), "a,b,c,d", rows)?);
    }
    if let Some(e) = &bundle.empirical {
        let rows = e.per_nga.iter().map(|r| format!("{},{},{},{}", csv_field(&r.nga), r.tau1, r.tau2, r.duration));
        written.push(write_csv(&dir.join("durations.csv"), "nga,tau1,tau2,duration", rows)?);
    }
    if !bundle.continuity.is_empty() {
        let rows = bundle.continuity.iter().flat_map(|c| {
            c.ranking
                .iter()
                .enumerate()
                .map(move |(i, (nga, len))| format!("{},{},{},{len}", c.mode.name(), i + 1, csv_field(nga)))
        });
        written.push(write_csv(&dir.join("continuity_lengths.csv"), "mode,rank,nga,length", rows)?);
    }

    for (name, svg) in [
        ("fig_timeseries.svg", timeseries_svg(bundle)),
        ("fig_curves.svg", curves_svg(bundle)),
        ("fig_small_multiples.svg", small_multiples_svg(bundle)),
        ("fig_kde.svg", kde_svg(bundle)),
        ("fig_residuals.svg", residuals_svg(bundle)),
    ] {
        let path = dir.join(name);
        fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn sample(p: &LogisticParams, t0: f64, t1: f64) -> Vec<(f64, f64)> {
    let n = 200;
    (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).map(|t| (t, p.eval(t))).collect()
}

fn y_range(bundle: &ReportBundle) -> (f64, f64) {
    let (lo, hi) =
        bundle.aligned.pooled_points().iter().fold((0.0f64, 1.0f64), |(lo, hi), (_, y)| (lo.min(*y), hi.max(*y)));
    (lo - 0.05, hi + 0.05)
}

fn timeseries_svg(bundle: &ReportBundle) -> String {
    let (t0, t1) = time_span(bundle);
    let mut svg = Svg::new(900.0, 560.0);
    let p = Panel { left: 70.0, top: 40.0, width: 780.0, height: 440.0, x: (t0, t1), y: y_range(bundle) };
    if let Some(t) = bundle.timescales.iter().max_by(|a, b| a.k_sigma.total_cmp(&b.k_sigma)) {
        svg.band(&p, t.t1_mean, t.t2_mean, "#d62728", 0.15);
    }
    for (i, r) in bundle.aligned.regions.iter().enumerate() {
        let pts: Vec<(f64, f64)> = r.points().collect();
        svg.polyline(&p, &pts, PALETTE[i % PALETTE.len()], 1.0, false);
    }
    svg.polyline(&p, &sample(&bundle.full_fit.params, t0, t1), "#000", 2.5, false);
    svg.frame(&p, "Relative time vs scaled SPC1 with logistic fit", "RelTime (years)", "SPC1 (scaled)", 8);
    svg.finish()
}

fn curves_svg(bundle: &ReportBundle) -> String {
    let (t0, t1) = time_span(bundle);
    let mut svg = Svg::new(900.0, 560.0);
    let p = Panel { left: 70.0, top: 40.0, width: 780.0, height: 440.0, x: (t0, t1), y: (-0.05, 1.05) };
    let fits = curve_fits(bundle);
    let mut legend = Vec::new();
    for (i, (name, params)) in fits.iter().enumerate() {
        let color = ["#000", "#1f77b4", "#ff7f0e"][i % 3];
        svg.polyline(&p, &sample(params, t0, t1), color, 2.0, i > 0);
        legend.push((*name, color));
    }
    svg.frame(&p, "Logistic fits: full data and continuity cutouts", "RelTime (years)", "SPC1 (scaled)", 8);
    svg.legend(p.left + 12.0, p.top + 16.0, &legend);
    svg.finish()
}

fn small_multiples_svg(bundle: &ReportBundle) -> String {
    let regions = &bundle.aligned.regions;
    let per_panel = 4;
    let n_panels = regions.len().div_ceil(per_panel).max(1);
    let cols = 3;
    let rows = n_panels.div_ceil(cols);
    let (pw, ph) = (280.0, 200.0);
    let mut svg = Svg::new(cols as f64 * (pw + 70.0) + 20.0, rows as f64 * (ph + 90.0) + 20.0);
    let (t0, t1) = time_span(bundle);
    let yr = y_range(bundle);
    for k in 0..n_panels {
        let (cx, cy) = ((k % cols) as f64, (k / cols) as f64);
        let p = Panel {
            left: 70.0 + cx * (pw + 70.0),
            top: 40.0 + cy * (ph + 90.0),
            width: pw,
            height: ph,
            x: (t0, t1),
            y: yr,
        };
        svg.polyline(&p, &sample(&bundle.full_fit.params, t0, t1), "#000", 1.5, true);
        let mut legend = Vec::new();
        for (j, r) in regions.iter().skip(k * per_panel).take(per_panel).enumerate() {
            let pts: Vec<(f64, f64)> = r.points().collect();
            svg.polyline(&p, &pts, PALETTE[j], 1.2, false);
            legend.push((r.nga(), PALETTE[j]));
        }
        svg.frame(&p, "", "RelTime (years)", "SPC1", 4);
        svg.legend(p.left + 8.0, p.top + 12.0, &legend);
    }
    svg.finish()
}

fn kde_svg(bundle: &ReportBundle) -> String {
    let d = &bundle.density;
    let x = (d.grid[0], *d.grid.last().unwrap_or(&1.0));
    let ymax = d.density.iter().cloned().fold(0.0, f64::max) * 1.05;
    let mut svg = Svg::new(600.0, 400.0);
    let p = Panel { left: 70.0, top: 40.0, width: 480.0, height: 290.0, x, y: (0.0, ymax.max(1e-12)) };
    let pts: Vec<(f64, f64)> = d.grid.iter().copied().zip(d.density.iter().copied()).collect();
    svg.polyline(&p, &pts, "#d62728", 2.0, false);
    svg.vline(&p, bundle.threshold.spc1_0, "#000");
    svg.frame(&p, "Kernel density of scaled SPC1 and threshold", "SPC1 (scaled)", "density", 5);
    svg.finish()
}

fn residuals_svg(bundle: &ReportBundle) -> String {
    let r = &bundle.full_fit.residuals;
    let lim = r.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-9);
    let bins = 30;
    let edges: Vec<f64> = (0..=bins).map(|i| -lim + 2.0 * lim * i as f64 / bins as f64).collect();
    let mut counts = vec![0.0; bins];
    for v in r {
        let k = (((v + lim) / (2.0 * lim)) * bins as f64).floor() as usize;
        counts[k.min(bins - 1)] += 1.0;
    }
    let top = counts.iter().cloned().fold(0.0, f64::max).max(1.0) * 1.05;
    let mut svg = Svg::new(600.0, 400.0);
    let p = Panel { left: 70.0, top: 40.0, width: 480.0, height: 290.0, x: (-lim, lim), y: (0.0, top) };
    svg.bars(&p, &edges, &counts, "#1f77b4");
    svg.frame(&p, "Residuals of the full fit", "predicted - observed", "count", 6);
    svg.finish()
}
