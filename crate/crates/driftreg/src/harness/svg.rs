//! Self-contained SVG line plots; no plotting dependency.

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 44.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-2..1e4).contains(&a) {
        format!("{v:.1e}")
    } else if a >= 10.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Renders cumulative-loss curves against the iteration index. With
/// `log_y` the y axis is log10-scaled (values clamped to a tiny positive
/// floor before the transform).
pub fn render_line_plot(title: &str, series: &[(String, Vec<f64>)], log_y: bool) -> String {
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let max_len = series
        .iter()
        .map(|(_, v)| v.len())
        .max()
        .unwrap_or(1)
        .max(1);

    let tx = |v: f64| if log_y { v.max(1e-12).log10() } else { v };
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, vals) in series {
        for &v in vals {
            let t = tx(v);
            y_min = y_min.min(t);
            y_max = y_max.max(t);
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (y_max - y_min).abs() < 1e-12 {
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let x_of = |i: usize| MARGIN_L + plot_w * i as f64 / (max_len.max(2) - 1) as f64;
    let y_of = |v: f64| MARGIN_T + plot_h * (1.0 - (tx(v) - y_min) / (y_max - y_min));

    let mut svg = String::with_capacity(1 << 16);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(title)
    ));

    // axes
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B
    ));

    // ticks
    for k in 0..=5 {
        let frac = k as f64 / 5.0;
        let x = MARGIN_L + plot_w * frac;
        let t_label = 1 + ((max_len - 1) as f64 * frac).round() as usize;
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{t_label}</text>\n",
            HEIGHT - MARGIN_B + 18.0
        ));

        let ty = y_min + (y_max - y_min) * frac;
        let y = MARGIN_T + plot_h * (1.0 - frac);
        let label = if log_y {
            format!("1e{ty:.1}")
        } else {
            fmt_tick(ty)
        };
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{MARGIN_L}\" y2=\"{y}\" stroke=\"black\"/>\n",
            MARGIN_L - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{label}</text>\n",
            MARGIN_L - 8.0,
            y + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">iteration</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 {})\">cumulative loss</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    ));

    // at most ~1200 points per polyline keeps files small
    for (si, (label, vals)) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let stride = (vals.len() / 1200).max(1);
        let mut points = String::new();
        for (i, &v) in vals.iter().enumerate() {
            if i % stride != 0 && i != vals.len() - 1 {
                continue;
            }
            points.push_str(&format!("{:.2},{:.2} ", x_of(i), y_of(v)));
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\" points=\"{}\"/>\n",
            points.trim_end()
        ));
        let ly = MARGIN_T + 16.0 + 18.0 * si as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            MARGIN_L + 10.0,
            MARGIN_L + 34.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            MARGIN_L + 40.0,
            ly + 4.0,
            xml_escape(label)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_svg() {
        let series = vec![
            ("rls(r=1)".to_string(), vec![1.0, 2.0, 4.0, 8.0]),
            ("aar(b=1)".to_string(), vec![0.5, 1.0, 1.5, 2.0]),
        ];
        for log_y in [false, true] {
            let svg = render_line_plot("cumulative loss", &series, log_y);
            assert!(svg.starts_with("<svg"));
            assert!(svg.ends_with("</svg>\n"));
            assert!(svg.contains("polyline"));
            assert!(svg.contains("rls(r=1)"));
        }
    }

    #[test]
    fn identical_inputs_render_identical_bytes() {
        let series = vec![("a".to_string(), vec![1.0, 3.0, 2.0])];
        assert_eq!(
            render_line_plot("t", &series, false),
            render_line_plot("t", &series, false)
        );
    }
}
