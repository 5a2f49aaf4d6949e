//! Minimal, dependency-free SVG line chart of success rate against speed.

use std::fmt::Write;

use mmwave::engine::SummaryRow;
use mmwave::Scheme;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn style(scheme: Scheme) -> (&'static str, &'static str) {
    match scheme {
        Scheme::Single => ("#d62728", "Single-gNB (hard handover)"),
        Scheme::Multi => ("#1f77b4", "Multi-gNB (serving cluster)"),
    }
}

fn nice_bounds(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    let span = (hi - lo).max(0.01);
    let lo = (lo - 0.1 * span).max(0.0);
    let hi = (hi + 0.1 * span).min(1.0);
    if hi - lo < 1e-9 {
        ((lo - 0.05).max(0.0), (hi + 0.05).min(1.0))
    } else {
        (lo, hi)
    }
}

/// Renders one polyline per scheme with +-1 standard error bars.
pub fn success_rate_chart(rows: &[SummaryRow]) -> String {
    let mut speeds: Vec<f64> = rows.iter().map(|r| r.speed_kmh).collect();
    speeds.sort_by(f64::total_cmp);
    speeds.dedup();
    let (x_lo, x_hi) = match (speeds.first(), speeds.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a - 1.0, a + 1.0),
        _ => (0.0, 1.0),
    };
    let lo = rows
        .iter()
        .map(|r| r.success_rate_mean - r.success_rate_stderr)
        .fold(f64::INFINITY, f64::min);
    let hi = rows
        .iter()
        .map(|r| r.success_rate_mean + r.success_rate_stderr)
        .fold(f64::NEG_INFINITY, f64::max);
    let (y_lo, y_hi) = nice_bounds(lo, hi);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">Average success rate vs. UE speed</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let y = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let v = py(y);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{v:.2}" x2="{:.2}" y2="{v:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y:.3}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            v + 4.0
        );
    }
    for &x in &speeds {
        let h = px(x);
        let _ = writeln!(
            s,
            r#"<line x1="{h:.2}" y1="{:.2}" x2="{h:.2}" y2="{:.2}" stroke="black"/><text x="{h:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">UE speed (km/h)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">Average success rate</text>"#,
        TOP + plot_h / 2.0
    );

    let mut legend_y = TOP + 18.0;
    for scheme in Scheme::ALL {
        let mut pts: Vec<&SummaryRow> = rows.iter().filter(|r| r.scheme == scheme).collect();
        if pts.is_empty() {
            continue;
        }
        pts.sort_by(|a, b| a.speed_kmh.total_cmp(&b.speed_kmh));
        let (color, label) = style(scheme);
        let path: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(r.speed_kmh), py(r.success_rate_mean)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for r in &pts {
            let (x, y) = (px(r.speed_kmh), py(r.success_rate_mean));
            let (y1, y2) = (
                py((r.success_rate_mean - r.success_rate_stderr).max(y_lo)),
                py((r.success_rate_mean + r.success_rate_stderr).min(y_hi)),
            );
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{y2:.2}" stroke="{color}"/><circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/>"#
            );
        }
        let lx = LEFT + plot_w - 210.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            lx + 24.0,
            lx + 30.0,
            legend_y + 4.0
        );
        legend_y += 18.0;
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(speed: f64, scheme: Scheme, mean: f64) -> SummaryRow {
        SummaryRow {
            speed_kmh: speed,
            scheme,
            seeds: 5,
            success_rate_mean: mean,
            success_rate_stderr: 0.002,
            handovers_mean: 1.0,
            cluster_size_mean: 1.0,
        }
    }

    #[test]
    fn self_contained_with_both_series() {
        let rows = vec![
            row(30.0, Scheme::Single, 0.96),
            row(30.0, Scheme::Multi, 0.98),
            row(90.0, Scheme::Single, 0.95),
            row(90.0, Scheme::Multi, 0.98),
        ];
        let svg = success_rate_chart(&rows);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        for banned in ["href", "url(", "<image", "@import", "<script"] {
            assert!(!svg.contains(banned), "{banned}");
        }
    }

    #[test]
    fn single_speed_and_empty_input_render() {
        assert!(success_rate_chart(&[row(60.0, Scheme::Multi, 1.0)]).contains("<circle"));
        assert!(success_rate_chart(&[]).contains("</svg>"));
    }
}
