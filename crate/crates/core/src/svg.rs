//! Bare-bones SVG line charts.

use std::fmt::Write;

pub(crate) const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// One plot panel mapping data coordinates onto a pixel rectangle.
pub(crate) struct Panel {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y.0) / (self.y.1 - self.y.0) * self.height
    }
}

pub(crate) struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height, body: String::new() }
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.1}" y="{y:.1}" font-size="{size}" text-anchor="{anchor}" font-family="sans-serif">{}</text>"#,
            escape(s)
        );
    }

    pub fn frame(&mut self, p: &Panel, title: &str, x_label: &str, y_label: &str, ticks: usize) {
        let _ = writeln!(
            self.body,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
            p.left, p.top, p.width, p.height
        );
        for i in 0..=ticks {
            let f = i as f64 / ticks as f64;
            let xv = p.x.0 + f * (p.x.1 - p.x.0);
            let yv = p.y.0 + f * (p.y.1 - p.y.0);
            let (xp, yp) = (p.px(xv), p.py(yv));
            let bottom = p.top + p.height;
            let _ = writeln!(
                self.body,
                r##"<line x1="{xp:.1}" y1="{bottom:.1}" x2="{xp:.1}" y2="{:.1}" stroke="#333"/>"##,
                bottom + 4.0
            );
            let _ = writeln!(
                self.body,
                r##"<line x1="{:.1}" y1="{yp:.1}" x2="{:.1}" y2="{yp:.1}" stroke="#333"/>"##,
                p.left - 4.0,
                p.left
            );
            self.text(xp, bottom + 15.0, 9.0, "middle", &tick_label(xv));
            self.text(p.left - 6.0, yp + 3.0, 9.0, "end", &tick_label(yv));
        }
        self.text(p.left + p.width / 2.0, p.top - 6.0, 11.0, "middle", title);
        self.text(p.left + p.width / 2.0, p.top + p.height + 30.0, 10.0, "middle", x_label);
        let (lx, ly) = (p.left - 38.0, p.top + p.height / 2.0);
        let _ = writeln!(
            self.body,
            r#"<text x="{lx:.1}" y="{ly:.1}" font-size="10" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 {lx:.1} {ly:.1})">{}</text>"#,
            escape(y_label)
        );
    }

    pub fn polyline(&mut self, p: &Panel, pts: &[(f64, f64)], color: &str, stroke: f64, dashed: bool) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", p.px(x), p.py(y))).collect();
        let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{stroke}"{dash}/>"#,
            coords.join(" ")
        );
    }

    pub fn band(&mut self, p: &Panel, x0: f64, x1: f64, color: &str, opacity: f64) {
        let (a, b) = (p.px(x0.max(p.x.0)), p.px(x1.min(p.x.1)));
        let _ = writeln!(
            self.body,
            r#"<rect x="{a:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{color}" fill-opacity="{opacity}"/>"#,
            p.top,
            (b - a).max(0.0),
            p.height
        );
    }

    pub fn vline(&mut self, p: &Panel, x: f64, color: &str) {
        let xp = p.px(x);
        let _ = writeln!(
            self.body,
            r#"<line x1="{xp:.1}" y1="{:.1}" x2="{xp:.1}" y2="{:.1}" stroke="{color}" stroke-width="1.5"/>"#,
            p.top,
            p.top + p.height
        );
    }

    pub fn bars(&mut self, p: &Panel, edges: &[f64], counts: &[f64], color: &str) {
        for (w, &c) in edges.windows(2).zip(counts) {
            let (x0, x1) = (p.px(w[0]), p.px(w[1]));
            let (y0, y1) = (p.py(c), p.py(0.0));
            let _ = writeln!(
                self.body,
                r##"<rect x="{x0:.1}" y="{y0:.1}" width="{:.1}" height="{:.1}" fill="{color}" stroke="#fff" stroke-width="0.5"/>"##,
                (x1 - x0).max(0.0),
                (y1 - y0).max(0.0)
            );
        }
    }

    pub fn legend(&mut self, x: f64, y: f64, entries: &[(&str, &str)]) {
        for (i, (label, color)) in entries.iter().enumerate() {
            let yy = y + 14.0 * i as f64;
            let _ = writeln!(
                self.body,
                r#"<line x1="{x:.1}" y1="{yy:.1}" x2="{:.1}" y2="{yy:.1}" stroke="{color}" stroke-width="2"/>"#,
                x + 18.0
            );
            self.text(x + 22.0, yy + 3.0, 9.0, "start", label);
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
