//! Minimal SVG line-plot writer: one polyline per series, a frame, tick
//! labels and a title. No external plotting dependency.

const W: f64 = 720.0;
const H: f64 = 440.0;
const MARGIN: f64 = 60.0;

pub struct Series<'a> {
    pub points: &'a [(f64, f64)],
    pub color: &'a str,
    pub label: &'a str,
}

/// Renders one or more series into an SVG document.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            if x.is_finite() && y.is_finite() {
                xmin = xmin.min(x);
                xmax = xmax.max(x);
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
        }
    }
    if !xmin.is_finite() || xmin == xmax {
        xmin -= 0.5;
        xmax = xmin + 1.0;
    }
    if !ymin.is_finite() || ymin == ymax {
        ymin -= 0.5;
        ymax = ymin + 1.0;
    }
    let pad = 0.05 * (ymax - ymin);
    let (ymin, ymax) = (ymin - pad, ymax + pad);
    let sx = (W - 2.0 * MARGIN) / (xmax - xmin);
    let sy = (H - 2.0 * MARGIN) / (ymax - ymin);
    let px = |x: f64| MARGIN + (x - xmin) * sx;
    let py = |y: f64| H - MARGIN - (y - ymin) * sy;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"15\">{}</text>\n",
        W / 2.0,
        xml_escape(title)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
        W / 2.0,
        H - 14.0,
        xml_escape(xlabel)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        H / 2.0,
        H / 2.0,
        xml_escape(ylabel)
    ));
    // tick labels at the frame corners and midpoints
    for (frac, x) in [(0.0, xmin), (0.5, 0.5 * (xmin + xmax)), (1.0, xmax)] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">{:.4}</text>\n",
            MARGIN + frac * (W - 2.0 * MARGIN),
            H - MARGIN + 18.0,
            x
        ));
    }
    for (frac, y) in [(0.0, ymin), (0.5, 0.5 * (ymin + ymax)), (1.0, ymax)] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">{:.4}</text>\n",
            MARGIN - 6.0,
            H - MARGIN - frac * (H - 2.0 * MARGIN) + 4.0,
            y
        ));
    }
    for (i, s) in series.iter().enumerate() {
        let mut d = String::new();
        for (j, &(x, y)) in s.points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            d.push_str(if j == 0 { "M" } else { "L" });
            d.push_str(&format!("{:.3},{:.3} ", px(x), py(y)));
        }
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            d.trim_end(),
            s.color
        ));
        if !s.label.is_empty() {
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{}\">{}</text>\n",
                W - MARGIN - 150.0,
                MARGIN + 18.0 + 16.0 * i as f64,
                s.color,
                xml_escape(s.label)
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polyline() {
        let pts: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, (i as f64 * 0.2).sin())).collect();
        let svg = line_plot(
            "title",
            "x",
            "y",
            &[Series {
                points: &pts,
                color: "#1f77b4",
                label: "u",
            }],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<path"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
