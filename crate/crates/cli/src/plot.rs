//! Static SVG rendering of a sweep CSV.
//!
//! Output is a pure function of the rows and options, with every coordinate
//! printed at fixed precision, so the same input always gives the same bytes.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;

use crate::report::{read_csv, to_db, CsvRow};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlotOptions {
    /// Plot `10·log10` of the gains instead of linear values.
    pub db: bool,
}

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 250.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
/// Lowest level shown in dB mode, relative to the peak.
const DB_RANGE: f64 = 60.0;

struct Curve {
    label: &'static str,
    color: &'static str,
    dashed: bool,
    values: Vec<f64>,
}

fn curves(rows: &[CsvRow], db: bool) -> Vec<Curve> {
    let pick = |lin: fn(&CsvRow) -> f64| -> Vec<f64> {
        rows.iter()
            .map(|r| if db { to_db(lin(r)) } else { lin(r) })
            .collect()
    };
    vec![
        Curve {
            label: "Gain of real-valued pulse",
            color: "#0072bd",
            dashed: false,
            values: pick(|r| r.gain_real_mean),
        },
        Curve {
            label: "P_rr mean",
            color: "#d95319",
            dashed: false,
            values: pick(|r| r.prr_mean),
        },
        Curve {
            label: "P_rr std-dev",
            color: "#edb120",
            dashed: false,
            values: pick(|r| r.prr_std),
        },
        Curve {
            label: "|P_vr|\u{b2} mean",
            color: "#7e2f8e",
            dashed: true,
            values: pick(|r| r.pvr_sq_mean),
        },
    ]
}

/// Rounds `span / 5` up to a 1-2-5 step.
fn nice_step(span: f64) -> f64 {
    let raw = (span / 5.0).max(f64::MIN_POSITIVE);
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    format!("{v:.decimals$}")
}

/// Horizontal axis. Grids spanning at least [`LOG_DECADES`] decades of nonzero
/// angles get a log scale; θ = 0 then sits on the left edge.
struct XAxis {
    lo: f64,
    hi: f64,
    /// Smallest positive θ, when the axis is logarithmic.
    log_min: Option<f64>,
}

const LOG_DECADES: f64 = 2.0;
/// Share of the plot width reserved left of the first positive θ on a log axis.
const ZERO_GAP: f64 = 0.04;

impl XAxis {
    fn fit(rows: &[CsvRow]) -> Self {
        let hi = rows.iter().map(|r| r.theta_deg).fold(f64::NEG_INFINITY, f64::max);
        let lo = rows.iter().map(|r| r.theta_deg).fold(f64::INFINITY, f64::min).min(0.0);
        let hi = if hi > lo { hi } else { lo + 1.0 };
        let min_pos = rows
            .iter()
            .map(|r| r.theta_deg)
            .filter(|t| *t > 0.0)
            .fold(f64::INFINITY, f64::min);
        let log_min = (lo >= 0.0 && min_pos.is_finite() && (hi / min_pos).log10() >= LOG_DECADES)
            .then_some(min_pos);
        Self { lo, hi, log_min }
    }

    /// Fraction of the plot width, in [0, 1].
    fn position(&self, t: f64) -> f64 {
        match self.log_min {
            Some(_) if t <= 0.0 => 0.0,
            Some(m) => {
                let f = (t.max(m) / m).log10() / (self.hi / m).log10();
                ZERO_GAP + (1.0 - ZERO_GAP) * f
            }
            None => (t - self.lo) / (self.hi - self.lo),
        }
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        match self.log_min {
            Some(m) => {
                let first = m.log10().ceil() as i32;
                let last = (self.hi.log10() + 1e-9).floor() as i32;
                std::iter::once((0.0, "0".to_string()))
                    .chain((first..=last).map(|e| (10f64.powi(e), format!("1e{e}"))))
                    .collect()
            }
            None => {
                let step = nice_step(self.hi - self.lo);
                ticks(self.lo, self.hi)
                    .into_iter()
                    .map(|t| (t, tick_label(t, step)))
                    .collect()
            }
        }
    }
}

pub fn render_svg(rows: &[CsvRow], options: PlotOptions) -> String {
    let curves = curves(rows, options.db);
    let finite = curves
        .iter()
        .flat_map(|c| c.values.iter().copied())
        .filter(|v| v.is_finite());
    let ymax_data = finite.clone().fold(f64::NEG_INFINITY, f64::max);
    let ymin_data = finite.fold(f64::INFINITY, f64::min);
    let (ylo, yhi) = if !ymax_data.is_finite() {
        (0.0, 1.0)
    } else if options.db {
        let hi = (ymax_data / 10.0).ceil() * 10.0;
        let lo = ((ymin_data.max(ymax_data - DB_RANGE)) / 10.0).floor() * 10.0;
        (lo, if hi > lo { hi } else { lo + 10.0 })
    } else {
        (0.0, if ymax_data > 0.0 { ymax_data * 1.05 } else { 1.0 })
    };
    let x = XAxis::fit(rows);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + x.position(t) * plot_w;
    let sy = |y: f64| {
        let y = if y.is_finite() { y.clamp(ylo, yhi) } else { ylo };
        TOP + (yhi - y) / (yhi - ylo) * plot_h
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // grid and ticks
    for (t, label) in x.ticks() {
        let px = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{TOP:.2}" x2="{px:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            TOP + plot_h + 18.0
        );
    }
    let ystep = nice_step(yhi - ylo);
    for y in ticks(ylo, yhi) {
        let py = sy(y);
        let label = if options.db {
            format!("{} dB", tick_label(y, ystep))
        } else {
            tick_label(y, ystep)
        };
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#e0e0e0"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        if x.log_min.is_some() { "θ (degrees, log scale; θ = 0 at left edge)" } else { "θ (degrees)" }
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        if options.db { "Gain (dB)" } else { "Gain (linear)" }
    );

    for c in &curves {
        let mut d = String::new();
        for (i, (r, v)) in rows.iter().zip(&c.values).enumerate() {
            let _ = write!(
                d,
                "{}{:.2} {:.2}",
                if i == 0 { "M" } else { " L" },
                sx(r.theta_deg),
                sy(*v)
            );
        }
        let dash = if c.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.8"{dash}/>"#,
            c.color
        );
    }

    let lx = LEFT + plot_w + 20.0;
    for (i, c) in curves.iter().enumerate() {
        let ly = TOP + 20.0 + 22.0 * i as f64;
        let dash = if c.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="1.8"{dash}/>"#,
            lx + 28.0,
            c.color
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 36.0,
            ly + 4.0,
            c.label
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Reads `csv_path` and writes the plot to `svg_path`.
pub fn plot_svg(csv_path: &Path, svg_path: &Path, options: PlotOptions) -> anyhow::Result<()> {
    let rows = read_csv(csv_path)?;
    std::fs::write(svg_path, render_svg(&rows, options))
        .with_context(|| format!("cannot write {}", svg_path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<CsvRow> {
        (0..20)
            .map(|i| {
                let t = i as f64 * 0.1;
                let g = 64.0 / (1.0 + 10.0 * t);
                CsvRow {
                    theta_deg: t,
                    gain_real_mean: g,
                    gain_real_db: to_db(g),
                    prr_mean: g,
                    prr_db: to_db(g),
                    prr_std: if i == 0 { 0.0 } else { 2.0 },
                    pvr_sq_mean: g / 2.0,
                    pvr_sq_db: to_db(g / 2.0),
                }
            })
            .collect()
    }

    #[test]
    fn four_curves_and_legend() {
        let svg = render_svg(&rows(), PlotOptions::default());
        assert_eq!(svg.matches("<path").count(), 4);
        assert!(svg.contains("Gain of real-valued pulse"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(!svg.contains(" dB<"));
    }

    #[test]
    fn db_axis_labels() {
        let svg = render_svg(&rows(), PlotOptions { db: true });
        assert_eq!(svg.matches("<path").count(), 4);
        assert!(svg.contains(" dB</text>"));
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = render_svg(&rows(), PlotOptions { db: true });
        let b = render_svg(&rows(), PlotOptions { db: true });
        assert_eq!(a, b);
    }

    #[test]
    fn wide_grids_get_a_log_axis() {
        let mut rows = rows();
        for (i, r) in rows.iter_mut().enumerate().skip(1) {
            r.theta_deg = 1e-5 * 10f64.powf(i as f64 * 5.0 / 19.0);
        }
        let svg = render_svg(&rows, PlotOptions::default());
        assert!(svg.contains(">1e-3</text>"));
        assert!(svg.contains("log scale"));
        let linear = render_svg(&super::tests::rows(), PlotOptions::default());
        assert!(!linear.contains("log scale"));
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(2.0), 0.5);
        assert_eq!(nice_step(70.0), 20.0);
        assert_eq!(nice_step(10.0), 2.0);
    }
}
