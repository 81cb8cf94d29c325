//! SVG rendering of sampled fibers: θ runs along the horizontal axis, with
//! `arg w` in the upper panel and `log10 ||w| - 1|` in the lower one.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use num_complex::Complex64;
use torus_locus::density::ArcCertificate;
use torus_locus::tracking::BranchWitness;

const WIDTH: f64 = 900.0;
const PANEL: f64 = 220.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const GAP: f64 = 50.0;
const LOG_MIN: f64 = -17.0;
const LOG_MAX: f64 = 1.0;
/// Branch points drawn at most; keeps documents well under 2 MB.
const MAX_POINTS: usize = 30_000;

fn x_of(theta: f64) -> f64 {
    LEFT + theta.rem_euclid(TAU) / TAU * (WIDTH - LEFT - RIGHT)
}

fn y_arg(a: f64) -> f64 {
    TOP + (PI - a) / TAU * PANEL
}

fn y_log(dev: f64) -> f64 {
    let l = dev.max(1e-300).log10().clamp(LOG_MIN, LOG_MAX);
    TOP + PANEL + GAP + (LOG_MAX - l) / (LOG_MAX - LOG_MIN) * PANEL
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Svg {
    body: String,
}

impl Svg {
    fn new(title: &str) -> Self {
        let height = TOP + 2.0 * PANEL + GAP + 40.0;
        let mut body = String::new();
        let _ = writeln!(body, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(body, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(body, r#"<text x="{LEFT}" y="20" font-size="14">{}</text>"#, escape(title));
        let mut svg = Svg { body };
        svg.axes();
        svg
    }

    fn axes(&mut self) {
        let x0 = LEFT;
        let x1 = WIDTH - RIGHT;
        for (top, label) in [(TOP, "arg w"), (TOP + PANEL + GAP, "log10 ||w| - 1|")] {
            let _ = writeln!(
                self.body,
                r##"<rect x="{x0}" y="{top}" width="{}" height="{PANEL}" fill="none" stroke="#444"/>"##,
                x1 - x0
            );
            let _ = writeln!(
                self.body,
                r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">{}</text>"#,
                top + PANEL / 2.0,
                top + PANEL / 2.0,
                escape(label)
            );
        }
        for (k, label) in ["0", "π/2", "π", "3π/2", "2π"].iter().enumerate() {
            let x = x0 + k as f64 / 4.0 * (x1 - x0);
            let y = TOP + 2.0 * PANEL + GAP + 16.0;
            let _ = writeln!(self.body, r#"<text x="{x:.2}" y="{y}" text-anchor="middle">{label}</text>"#);
        }
        for (a, label) in [(PI, "π"), (0.0, "0"), (-PI, "-π")] {
            let _ = writeln!(self.body, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, x0 - 4.0, y_arg(a) + 4.0);
        }
        for l in [0.0, -8.0, -16.0] {
            let _ = writeln!(
                self.body,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{l}</text>"#,
                x0 - 4.0,
                y_log(10f64.powf(l)) + 4.0
            );
        }
        let _ = writeln!(self.body, r#"<text x="{}" y="{}" text-anchor="middle">θ</text>"#, (x0 + x1) / 2.0, TOP + 2.0 * PANEL + GAP + 32.0);
    }

    /// Draws `pts` as polylines, breaking at θ wrap-around and wherever `y`
    /// jumps by more than `max_jump`.
    fn polyline(&mut self, pts: &[(f64, f64)], max_jump: f64, style: &str) {
        let mut runs: Vec<Vec<(f64, f64)>> = vec![];
        let mut prev: Option<(f64, f64)> = None;
        for &(x, y) in pts {
            let breaks = prev.is_none_or(|(px, py)| x < px || (y - py).abs() > max_jump);
            if breaks {
                runs.push(vec![]);
            }
            runs.last_mut().expect("pushed").push((x, y));
            prev = Some((x, y));
        }
        for run in runs {
            if run.len() == 1 {
                let (x, y) = run[0];
                let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.2" {style}/>"#);
                continue;
            }
            let coords: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(self.body, r#"<polyline fill="none" {style} points="{}"/>"#, coords.join(" "));
        }
    }

    fn trace(&mut self, pts: &[(f64, Complex64)], style: &str) {
        let args: Vec<(f64, f64)> = pts.iter().map(|(t, w)| (x_of(*t), y_arg(w.arg()))).collect();
        self.polyline(&args, PANEL / 2.0, style);
        let devs: Vec<(f64, f64)> = pts.iter().map(|(t, w)| (x_of(*t), y_log((w.norm() - 1.0).abs()))).collect();
        self.polyline(&devs, PANEL, style);
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Every tracked branch in grey, the certified arc on top in colour.
pub fn branch_plot(title: &str, witness: &BranchWitness, arc: Option<&ArcCertificate>) -> String {
    let mut svg = Svg::new(title);
    let total: usize = witness.branches.iter().map(|b| b.points.len()).sum();
    let stride = total.div_ceil(MAX_POINTS).max(1);
    for b in &witness.branches {
        let pts: Vec<(f64, Complex64)> = b.points.iter().step_by(stride).map(|p| (p.theta, p.value)).collect();
        svg.trace(&pts, r##"stroke="#999" stroke-width="1" fill="#999""##);
    }
    if let Some(arc) = arc {
        let pts: Vec<(f64, Complex64)> = arc.points.iter().step_by(stride).map(|p| (p.theta, p.value)).collect();
        svg.trace(&pts, r##"stroke="#c0392b" stroke-width="2.5" fill="#c0392b""##);
    }
    svg.finish()
}

/// The smallest root deviation per fiber, with fibers that carry an on-circle
/// root marked.
pub fn heat_plot(title: &str, profile: &[(f64, Option<f64>)], tol: f64) -> String {
    let mut svg = Svg::new(title);
    let pts: Vec<(f64, f64)> = profile.iter().filter_map(|(t, d)| d.map(|d| (x_of(*t), y_log(d)))).collect();
    svg.polyline(&pts, f64::INFINITY, r##"stroke="#2c7fb8" stroke-width="1" fill="#2c7fb8""##);
    for (t, d) in profile {
        if let Some(d) = d {
            if *d <= tol {
                let _ = writeln!(
                    svg.body,
                    r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
                    x_of(*t),
                    y_log(*d)
                );
            }
        }
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_plot_marks_circle_points() {
        let profile = vec![(0.0, Some(1e-16)), (1.0, Some(0.3)), (2.0, None)];
        let svg = heat_plot("t", &profile, 1e-9);
        assert!(svg.starts_with("<?xml"));
        assert_eq!(svg.matches(r##"stroke="#c0392b""##).count(), 1);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn titles_are_escaped() {
        assert!(Svg::new("a < b & c").finish().contains("a &lt; b &amp; c"));
    }
}
