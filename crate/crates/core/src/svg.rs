//! Static SVG rendering of a normalised histogram with a fitted density.

use std::fmt::Write;

use crate::stats::{Histogram, LogNormalFit};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

pub fn histogram_svg(title: &str, h: &Histogram, fit: Option<&LogNormalFit>) -> String {
    let x0 = h.edges[0];
    let x1 = h.edges[h.edges.len() - 1];
    let curve: Vec<(f64, f64)> = match fit {
        Some(f) => (0..=200)
            .map(|k| {
                let x = x0 + (x1 - x0) * k as f64 / 200.0;
                (x, f.pdf(x))
            })
            .collect(),
        None => Vec::new(),
    };
    let y_max = h
        .densities
        .iter()
        .copied()
        .chain(curve.iter().map(|p| p.1))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
        * 1.05;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - y / y_max * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (k, &d) in h.densities.iter().enumerate() {
        if d <= 0.0 {
            continue;
        }
        let left = sx(h.edges[k]);
        let right = sx(h.edges[k + 1]);
        let top = sy(d);
        let _ = writeln!(
            s,
            r##"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>"##,
            right - left,
            sy(0.0) - top
        );
    }
    if !curve.is_empty() {
        let pts: Vec<String> = curve
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#d62728" stroke-width="2"/>"##,
            pts.join(" ")
        );
    }
    // axes
    let (ax, ay) = (MARGIN_LEFT, MARGIN_TOP + plot_h);
    let _ = writeln!(
        s,
        r#"<line x1="{ax}" y1="{ay}" x2="{}" y2="{ay}" stroke="black"/>"#,
        ax + plot_w
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ax}" y1="{MARGIN_TOP}" x2="{ax}" y2="{ay}" stroke="black"/>"#
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = t * y_max;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{xv:.3}</text>"#,
            sx(xv),
            ay + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{yv:.2}</text>"#,
            ax - 6.0,
            sy(yv) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">rho</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {:.2})">density</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{build_histogram, FitMethod};

    #[test]
    fn renders_bars_and_curve() {
        let h = build_histogram(&[0.5, 0.6, 0.6, 0.7, 0.9], 4).unwrap();
        let fit = LogNormalFit::new(-0.4, 0.2, FitMethod::Lsq, 0.0);
        let svg = histogram_svg("n = 3 <test>", &h, Some(&fit));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("&lt;test&gt;"));
        assert!(!svg.contains("<script"));
        assert_eq!(svg.matches("fill=\"#9ecae1\"").count(), 3);
    }
}
