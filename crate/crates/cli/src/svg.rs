//! Minimal static SVG line charts: linear x (iteration count), logarithmic
//! y (errors and bounds). Output is deterministic — fixed palette, fixed
//! two-decimal coordinate formatting, no timestamps — so identical data
//! produces identical files.

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 42.0;
const BOTTOM: f64 = 52.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// One curve: points with non-finite or non-positive y are treated as gaps.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, dashed: false }
    }

    pub fn dashed(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, dashed: true }
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a chart with a log₁₀ y axis. Series colors cycle through the
/// fixed palette in input order.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;

    // Data ranges over plottable points only.
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() && y > 0.0 {
                x_min = x_min.min(x);
                x_max = x_max.max(x);
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.1;
        y_max = 10.0;
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    let dec_lo = y_min.log10().floor() as i64;
    let mut dec_hi = y_max.log10().ceil() as i64;
    if dec_hi == dec_lo {
        dec_hi += 1;
    }
    let (ly_lo, ly_hi) = (dec_lo as f64, dec_hi as f64);

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = LEFT + (x - x_min) / (x_max - x_min) * plot_w;
        let py = TOP + (ly_hi - y.log10()) / (ly_hi - ly_lo) * plot_h;
        (px, py)
    };

    let mut out = String::with_capacity(16 * 1024);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" \
         viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" font-family=\"Helvetica, Arial, sans-serif\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        LEFT + plot_w / 2.0,
        esc(title)
    ));

    // Frame.
    out.push_str(&format!(
        "<rect x=\"{LEFT:.2}\" y=\"{TOP:.2}\" width=\"{plot_w:.2}\" height=\"{plot_h:.2}\" \
         fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n"
    ));

    // Y ticks at powers of ten (thinned to at most nine labels).
    let span = (dec_hi - dec_lo).max(1);
    let step = ((span + 8) / 9).max(1);
    let mut k = dec_lo;
    while k <= dec_hi {
        let (_, py) = to_px(x_min, 10f64.powi(k as i32));
        out.push_str(&format!(
            "<line x1=\"{LEFT:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" \
             stroke=\"#ddd\" stroke-width=\"1\"/>\n",
            LEFT + plot_w
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">1e{k}</text>\n",
            LEFT - 6.0,
            py + 4.0
        ));
        k += step;
    }

    // X ticks: a "nice" step producing at most eight labels.
    let raw = (x_max - x_min) / 7.0;
    let mag = 10f64.powf(raw.log10().floor());
    let x_step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| (x_max - x_min) / s <= 8.0)
        .unwrap_or(mag * 10.0);
    let mut tick = (x_min / x_step).ceil() * x_step;
    while tick <= x_max + 1e-9 {
        let (px, _) = to_px(tick, 10f64.powf(ly_lo));
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" \
             stroke=\"#333\" stroke-width=\"1\"/>\n",
            TOP + plot_h,
            TOP + plot_h + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            TOP + plot_h + 18.0,
            format_tick(tick)
        ));
        tick += x_step;
    }

    // Axis labels.
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        esc(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        esc(y_label)
    ));

    // Curves: contiguous plottable runs become separate polylines.
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if s.dashed { " stroke-dasharray=\"7,4\"" } else { "" };
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, out: &mut String| {
            if run.len() >= 2 {
                let pts: Vec<String> = run
                    .iter()
                    .map(|&(x, y)| format!("{x:.2},{y:.2}"))
                    .collect();
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                     stroke-width=\"1.7\"{dash}/>\n",
                    pts.join(" ")
                ));
            } else if run.len() == 1 {
                let (x, y) = run[0];
                out.push_str(&format!(
                    "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.2\" fill=\"{color}\"/>\n"
                ));
            }
            run.clear();
        };
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() && y > 0.0 {
                run.push(to_px(x, y));
            } else {
                flush(&mut run, &mut out);
            }
        }
        flush(&mut run, &mut out);

        // Legend entry.
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 12.0;
        out.push_str(&format!(
            "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" \
             stroke=\"{color}\" stroke-width=\"1.7\"{dash}/>\n",
            lx + 26.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>\n",
            lx + 32.0,
            ly + 4.0,
            esc(&s.label)
        ));
    }

    out.push_str("</svg>\n");
    out
}

fn format_tick(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 {
        format!("{:.0}", x.round())
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Series> {
        vec![
            Series::new(
                "error",
                (1..=40).map(|m| (m as f64, 0.8f64.powi(m))).collect(),
            ),
            Series::dashed(
                "bound",
                (1..=40).map(|m| (m as f64, 5.0 * 0.8f64.powi(m))).collect(),
            ),
        ]
    }

    #[test]
    fn chart_is_valid_looking_svg_and_deterministic() {
        let a = line_chart("demo", "m", "error", &sample());
        let b = line_chart("demo", "m", "error", &sample());
        assert_eq!(a, b);
        assert!(a.starts_with("<svg "));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 2);
        assert!(a.contains("stroke-dasharray"));
        assert!(a.contains(">demo</text>"));
        assert!(a.contains("1e-"));
    }

    #[test]
    fn gaps_split_polylines_and_empty_input_renders() {
        let with_gap = vec![Series::new(
            "gappy",
            vec![
                (1.0, 1.0),
                (2.0, 0.5),
                (3.0, f64::NAN),
                (4.0, 0.2),
                (5.0, 0.1),
            ],
        )];
        let svg = line_chart("g", "m", "e", &with_gap);
        assert_eq!(svg.matches("<polyline").count(), 2);

        let empty = line_chart("none", "m", "e", &[Series::new("x", vec![])]);
        assert!(empty.contains("</svg>"));
    }

    #[test]
    fn labels_are_escaped() {
        let svg = line_chart("a < b & c", "m", "e", &sample());
        assert!(svg.contains("a &lt; b &amp; c"));
    }
}
