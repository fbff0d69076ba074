//! Self-contained SVG line charts with a log2 vertical axis.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const LEGEND: f64 = 130.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XScale {
    Linear,
    Log10,
}

impl XScale {
    fn apply(self, x: f64) -> f64 {
        match self {
            XScale::Linear => x,
            XScale::Log10 => x.log10(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_scale: XScale,
    pub series: &'a [Series],
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn nice_step(span: f64, max_ticks: usize) -> f64 {
    let raw = span / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
        .max(1.0)
}

fn fmt_tick(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.2}")
    }
}

/// Renders the chart. Points with a non-positive ordinate have no place on a
/// log axis and are left out.
pub fn render(chart: &Chart<'_>) -> String {
    let legend = if chart.series.len() > 1 { LEGEND } else { 0.0 };
    let plot_w = WIDTH - LEFT - RIGHT - legend;
    let plot_h = HEIGHT - TOP - BOTTOM;

    let visible: Vec<Vec<(f64, f64)>> = chart
        .series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|&&(x, y)| y > 0.0 && chart.x_scale.apply(x).is_finite())
                .map(|&(x, y)| (chart.x_scale.apply(x), y.log2()))
                .collect()
        })
        .collect();
    let all = visible.iter().flatten();
    let (x_lo, x_hi) = all
        .clone()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.0), b.max(p.0))
        });
    let (y_lo, y_hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
        (a.min(p.1), b.max(p.1))
    });
    let (x_lo, x_hi) = if x_lo.is_finite() {
        padded(x_lo, x_hi)
    } else {
        (0.0, 1.0)
    };
    let (y_lo, y_hi) = if y_lo.is_finite() {
        padded(y_lo.floor(), y_hi.ceil())
    } else {
        (0.0, 1.0)
    };

    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        chart.title
    );

    // axes
    let _ = writeln!(
        out,
        r#"<path d="M{LEFT:.2},{TOP:.2} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );

    // y ticks at integer powers of two
    let y_step = nice_step(y_hi - y_lo, 8);
    let mut e = (y_lo / y_step).ceil() * y_step;
    while e <= y_hi + 1e-9 {
        let y = sy(e);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">2^{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            fmt_tick(e)
        );
        e += y_step;
    }

    // x ticks
    let x_step = match chart.x_scale {
        XScale::Linear => nice_step(x_hi - x_lo, 10),
        XScale::Log10 => 1.0,
    };
    let mut t = (x_lo / x_step).ceil() * x_step;
    while t <= x_hi + 1e-9 {
        let x = sx(t);
        let label = match chart.x_scale {
            XScale::Linear => fmt_tick(t),
            XScale::Log10 => fmt_tick(10f64.powf(t).round()),
        };
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0
        );
        t += x_step;
    }

    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        chart.x_label
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        chart.y_label
    );

    for (i, (series, pts)) in chart.series.iter().zip(&visible).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        if legend > 0.0 {
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let lx = WIDTH - RIGHT - legend + 15.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 20.0,
                lx + 25.0,
                ly + 4.0,
                series.label
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(63.0, 10), 10.0);
        assert_eq!(nice_step(3.0, 8), 1.0);
        assert_eq!(nice_step(120.0, 8), 20.0);
    }

    #[test]
    fn drops_non_positive_points() {
        let series = [Series {
            label: "n=4".into(),
            points: vec![
                (0.0, 0.0),
                (1.0, 2.0),
                (2.0, 2.584_962_500_721_156),
                (3.0, 2.0),
                (4.0, 0.0),
            ],
        }];
        let svg = render(&Chart {
            title: "t",
            x_label: "k",
            y_label: "bits",
            x_scale: XScale::Linear,
            series: &series,
        });
        let poly = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(poly.matches(',').count(), 3);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
}
