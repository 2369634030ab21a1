//! Static SVG renderings of the effect box plots and error curves.

use std::fmt::Write;

use crate::counterfactual::EffectReport;
use crate::ensemble::SensitivityCurve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64) -> Self {
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        };
        let pad = 0.05 * (hi - lo);
        Axis {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn y(&self, v: f64) -> f64 {
        TOP + (HEIGHT - TOP - BOTTOM) * (1.0 - (v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<f64> {
        (0..=4)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / 4.0)
            .collect()
    }
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>
"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn y_axis(out: &mut String, axis: &Axis, label: &str) {
    let bottom = HEIGHT - BOTTOM;
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bottom}" stroke="black"/>
<line x1="{LEFT}" y1="{bottom}" x2="{}" y2="{bottom}" stroke="black"/>"#,
        WIDTH - RIGHT
    );
    for t in axis.ticks() {
        let y = axis.y(t);
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{t:.2}</text>"##,
            LEFT - 4.0,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let mid = (TOP + bottom) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="16" y="{mid}" text-anchor="middle" transform="rotate(-90 16 {mid})">{}</text>"#,
        escape(label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// One box per lane width with whiskers, outliers and a line through the
/// marginal means.
pub fn effect_boxplot_svg(report: &EffectReport) -> String {
    let lo = report
        .groups
        .iter()
        .map(|g| g.summary.min)
        .fold(f64::INFINITY, f64::min);
    let hi = report
        .groups
        .iter()
        .map(|g| g.summary.max)
        .fold(f64::NEG_INFINITY, f64::max);
    let axis = Axis::new(lo, hi);
    let mut out = String::new();
    header(
        &mut out,
        &format!("Simulated {} by lane width", report.response_label),
    );
    y_axis(&mut out, &axis, &report.response_label);

    let slot = (WIDTH - LEFT - RIGHT) / report.groups.len().max(1) as f64;
    let half = slot * 0.25;
    let mut mean_points = Vec::new();
    for (i, g) in report.groups.iter().enumerate() {
        let s = &g.summary;
        let cx = LEFT + slot * (i as f64 + 0.5);
        let (q1, q3, med) = (axis.y(s.q1), axis.y(s.q3), axis.y(s.median));
        let (wl, wh) = (axis.y(s.whisker_low), axis.y(s.whisker_high));
        let _ = writeln!(
            out,
            r##"<line x1="{cx:.2}" y1="{wl:.2}" x2="{cx:.2}" y2="{q1:.2}" stroke="black"/>
<line x1="{cx:.2}" y1="{q3:.2}" x2="{cx:.2}" y2="{wh:.2}" stroke="black"/>
<line x1="{:.2}" y1="{wl:.2}" x2="{:.2}" y2="{wl:.2}" stroke="black"/>
<line x1="{:.2}" y1="{wh:.2}" x2="{:.2}" y2="{wh:.2}" stroke="black"/>
<rect x="{:.2}" y="{q3:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="black"/>
<line x1="{:.2}" y1="{med:.2}" x2="{:.2}" y2="{med:.2}" stroke="black" stroke-width="2"/>
<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{} ft</text>"##,
            cx - half / 2.0,
            cx + half / 2.0,
            cx - half / 2.0,
            cx + half / 2.0,
            cx - half,
            2.0 * half,
            (q1 - q3).max(0.5),
            cx - half,
            cx + half,
            HEIGHT - BOTTOM + 18.0,
            g.width
        );
        for &o in &s.outliers {
            let _ = writeln!(
                out,
                r#"<circle cx="{cx:.2}" cy="{:.2}" r="2" fill="none" stroke="gray"/>"#,
                axis.y(o)
            );
        }
        mean_points.push((cx, axis.y(s.mean)));
    }
    let path: Vec<String> = mean_points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#d62728" stroke-width="2"/>"##,
        path.join(" ")
    );
    for (x, y) in &mean_points {
        let _ = writeln!(
            out,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#d62728"/>"##
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">lane width (marginal means in red)</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0
    );
    out.push_str("</svg>\n");
    out
}

/// Test error against ensemble size for one family; `metric` picks MAE or
/// MSE.
pub fn sensitivity_svg(curve: &SensitivityCurve, metric: Metric) -> String {
    let values: Vec<(f64, f64)> = curve
        .points
        .iter()
        .map(|p| (p.trees as f64, metric.of(p.mae, p.mse)))
        .collect();
    let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let axis = Axis::new(lo, hi);
    let max_k = values.last().map_or(1.0, |v| v.0).max(1.0);
    let x = |k: f64| LEFT + (WIDTH - LEFT - RIGHT) * k / max_k;

    let mut out = String::new();
    header(
        &mut out,
        &format!(
            "{} of {} by number of trees",
            metric.name(),
            curve.family.label()
        ),
    );
    y_axis(&mut out, &axis, metric.name());
    let path: Vec<String> = values
        .iter()
        .map(|&(k, v)| format!("{:.2},{:.2}", x(k), axis.y(v)))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
        path.join(" ")
    );
    for &(k, v) in &values {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f77b4"/><text x="{:.2}" y="{}" text-anchor="middle">{k}</text>"##,
            x(k),
            axis.y(v),
            x(k),
            HEIGHT - BOTTOM + 18.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">number of trees</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0
    );
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mae,
    Mse,
}

impl Metric {
    fn of(self, mae: f64, mse: f64) -> f64 {
        match self {
            Metric::Mae => mae,
            Metric::Mse => mse,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Mae => "MAE",
            Metric::Mse => "MSE",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{Family, SensitivityPoint};

    #[test]
    fn curve_is_well_formed() {
        let c = SensitivityCurve {
            family: Family::Boost,
            points: vec![
                SensitivityPoint {
                    trees: 1,
                    mae: 3.0,
                    mse: 12.0,
                },
                SensitivityPoint {
                    trees: 50,
                    mae: 2.0,
                    mse: 6.0,
                },
            ],
        };
        let svg = sensitivity_svg(&c, Metric::Mse);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("MSE of LSBoost"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }
}
