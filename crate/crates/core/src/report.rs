//! Text and JSON rendering of a [`ReportBundle`].
//!
//! The text report is line oriented: `[section]` headers, `key = value`
//! lines and `|`-separated tables introduced by a `# columns:` line. Floats
//! are printed in shortest round-trip form so the text carries the same
//! numbers as the JSON sidecar.

use std::fmt::Write;

use crate::logistic::FitResult;
use crate::pipeline::ReportBundle;

pub fn render_json(bundle: &ReportBundle) -> String {
    let mut s = serde_json::to_string_pretty(bundle).expect("bundle serializes");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<ReportBundle, serde_json::Error> {
    serde_json::from_str(text)
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn fit_lines(out: &mut String, prefix: &str, fit: &FitResult) {
    let p = fit.params;
    let _ = writeln!(out, "{prefix}.a = {}", p.a);
    let _ = writeln!(out, "{prefix}.b = {}", p.b);
    let _ = writeln!(out, "{prefix}.c = {}", p.c);
    let _ = writeln!(out, "{prefix}.d = {}", p.d);
    let _ = writeln!(out, "{prefix}.upper_plateau = {}", p.a + p.b);
    let _ = writeln!(out, "{prefix}.rmse = {}", fit.rmse);
    let _ = writeln!(out, "{prefix}.n_points = {}", fit.n_points);
    let _ = writeln!(out, "{prefix}.iterations = {}", fit.iterations);
    let _ = writeln!(out, "{prefix}.converged = {}", fit.converged);
}

pub fn render_text(b: &ReportBundle) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "# spc-timescale report");

    let _ = writeln!(w, "\n[provenance]");
    let _ = writeln!(w, "tool_version = {}", b.provenance.tool_version);
    let _ = writeln!(w, "stage = {:?}", b.provenance.stage);
    let _ = writeln!(w, "seed = {}", b.provenance.seed);
    let _ = writeln!(w, "config_sha256 = {}", b.provenance.config_sha256);
    let _ = writeln!(w, "input_sha256 = {}", b.provenance.input_sha256);

    let _ = writeln!(w, "\n[scaling]");
    let _ = writeln!(w, "raw_min = {}", b.scale.min);
    let _ = writeln!(w, "raw_max = {}", b.scale.max);
    let _ = writeln!(w, "regions = {}", b.n_regions);
    let _ = writeln!(w, "points = {}", b.n_points);

    let _ = writeln!(w, "\n[threshold]");
    let _ = writeln!(w, "bandwidth = {}", b.density.bandwidth);
    let _ = writeln!(w, "grid_size = {}", b.density.grid.len());
    let _ = writeln!(w, "spc1_0 = {}", b.threshold.spc1_0);
    let _ = writeln!(w, "left_peak = {}", b.threshold.left_peak);
    let _ = writeln!(w, "right_peak = {}", b.threshold.right_peak);
    let _ = writeln!(w, "exact_ties = {}", b.aligned.ties.len());

    let _ = writeln!(w, "\n[alignment]");
    let _ = writeln!(w, "retained = {}", b.aligned.regions.len());
    let _ = writeln!(w, "discarded = {}", b.aligned.discarded.len());
    let _ = writeln!(w, "discarded_ngas = {}", b.aligned.discarded.join("; "));
    let _ = writeln!(w, "mean_points_retained = {}", b.mean_points_retained);
    let _ = writeln!(w, "mean_points_discarded = {}", opt(b.mean_points_discarded));
    let _ = writeln!(w, "# columns: nga | points | anchor_year | recorded_anchor_year");
    for a in &b.anchors {
        let _ =
            writeln!(w, "anchor | {} | {} | {} | {}", a.nga, a.n_points, opt(a.anchor_year), opt(a.recorded_anchor));
    }

    let _ = writeln!(w, "\n[full_fit]");
    fit_lines(w, "full", &b.full_fit);

    let v = &b.validation;
    let _ = writeln!(w, "\n[validation]");
    let _ = writeln!(w, "repeats = {}", v.n_repeats);
    let _ = writeln!(w, "failed = {}", v.failed);
    let _ = writeln!(w, "mean_rho2 = {}", v.mean_rho2);
    let _ = writeln!(w, "std_rho2 = {}", v.std_rho2);
    let _ = writeln!(w, "stderr_rho2 = {}", v.stderr_rho2);

    if let Some(e) = &b.bootstrap {
        let _ = writeln!(w, "\n[bootstrap]");
        let _ = writeln!(w, "iterations = {}", e.n_iter);
        let _ = writeln!(w, "failed_fits = {}", e.failed_fits);
        for th in &b.thresholds {
            let k = th.k_sigma;
            let _ = writeln!(w, "k{k}.mean_lower = {}", th.mean_lower);
            let _ = writeln!(w, "k{k}.sd_lower = {}", th.sd_lower);
            let _ = writeln!(w, "k{k}.mean_upper = {}", th.mean_upper);
            let _ = writeln!(w, "k{k}.sd_upper = {}", th.sd_upper);
        }
    }
    if !b.timescales.is_empty() || !b.timescale_failures.is_empty() {
        let _ = writeln!(w, "\n[timescales]");
        for f in &b.timescale_failures {
            let _ = writeln!(w, "k{}.unavailable = {}", f.k_sigma, f.reason);
        }
        for t in &b.timescales {
            let k = t.k_sigma;
            let _ = writeln!(w, "k{k}.th1 = {}", t.th1);
            let _ = writeln!(w, "k{k}.th2 = {}", t.th2);
            let _ = writeln!(w, "k{k}.t1_mean = {}", t.t1_mean);
            let _ = writeln!(w, "k{k}.t2_mean = {}", t.t2_mean);
            let _ = writeln!(w, "k{k}.duration_mean = {}", t.duration_mean);
            let _ = writeln!(w, "k{k}.crossing_curves = {}", t.n_crossing_curves);
            let _ = writeln!(w, "k{k}.excluded_curves = {}", t.n_excluded);
        }
    }
    if let Some(e) = &b.empirical {
        let _ = writeln!(w, "\n[empirical_durations]");
        let _ = writeln!(w, "th1 = {}", e.th1);
        let _ = writeln!(w, "th2 = {}", e.th2);
        let _ = writeln!(w, "count = {}", e.per_nga.len());
        let _ = writeln!(w, "excluded = {}", e.excluded.join("; "));
        let _ = writeln!(w, "mean = {}", opt(e.mean_duration));
        let _ = writeln!(w, "median = {}", opt(e.median_duration));
        let _ = writeln!(w, "# columns: nga | tau1 | tau2 | duration");
        for r in &e.per_nga {
            let _ = writeln!(w, "duration | {} | {} | {} | {}", r.nga, r.tau1, r.tau2, r.duration);
        }
    }
    for c in &b.continuity {
        let name = c.mode.name();
        let _ = writeln!(w, "\n[continuity.{name}]");
        let _ = writeln!(w, "segments = {}", c.segments.len());
        let _ = writeln!(w, "excluded = {}", c.excluded.join("; "));
        let _ = writeln!(w, "mean_length = {}", c.mean_length);
        fit_lines(w, name, &c.fit);
        let _ = writeln!(w, "# columns: rank | nga | length");
        for (i, (nga, len)) in c.ranking.iter().enumerate() {
            let _ = writeln!(w, "length | {} | {} | {}", i + 1, nga, len);
        }
    }
    out
}

/// Value of `key` in `[section]` of a rendered text report.
pub fn lookup<'a>(report: &'a str, section: &str, key: &str) -> Option<&'a str> {
    let header = format!("[{section}]");
    let mut inside = false;
    for line in report.lines() {
        if line.starts_with('[') {
            inside = line == header;
            continue;
        }
        if inside {
            if let Some((k, v)) = line.split_once(" = ") {
                if k == key {
                    return Some(v);
                }
            }
        }
    }
    None
}
