//! Minimal deterministic SVG emission for line plots and histograms.
//!
//! Output depends only on the input data: fixed canvas, fixed palette,
//! numbers formatted through the crate-wide significant-digit formatter.

use crate::numfmt::fmt_sig;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 48.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn fm(x: f64) -> String {
    fmt_sig(x, 6)
}

/// One polyline with a legend label.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

/// Draws the given series on log-log axes.
pub fn line_plot_loglog(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y) in &s.points {
            if x > 0.0 && y > 0.0 {
                xs.push(x.log10());
                ys.push(y.log10());
            }
        }
    }
    let (x_lo, x_hi) = padded_range(&xs);
    let (y_lo, y_hi) = padded_range(&ys);
    let to_px = |lx: f64, ly: f64| -> (f64, f64) {
        let px = MARGIN_L + (lx - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = HEIGHT - MARGIN_B - (ly - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);
        (px, py)
    };

    let mut out = String::new();
    svg_open(&mut out, title);
    axes(&mut out, x_label, y_label);
    // Decade tick marks.
    for e in (x_lo.floor() as i64)..=(x_hi.ceil() as i64) {
        let lx = e as f64;
        if lx < x_lo || lx > x_hi {
            continue;
        }
        let (px, _) = to_px(lx, y_lo);
        out.push_str(&format!(
            "<line x1='{}' y1='{}' x2='{}' y2='{}' stroke='#cccccc'/>\n",
            fm(px),
            fm(MARGIN_T),
            fm(px),
            fm(HEIGHT - MARGIN_B)
        ));
        out.push_str(&format!(
            "<text x='{}' y='{}' font-size='11' text-anchor='middle'>1e{}</text>\n",
            fm(px),
            fm(HEIGHT - MARGIN_B + 16.0),
            e
        ));
    }
    for e in (y_lo.floor() as i64)..=(y_hi.ceil() as i64) {
        let ly = e as f64;
        if ly < y_lo || ly > y_hi {
            continue;
        }
        let (_, py) = to_px(x_lo, ly);
        out.push_str(&format!(
            "<line x1='{}' y1='{}' x2='{}' y2='{}' stroke='#cccccc'/>\n",
            fm(MARGIN_L),
            fm(py),
            fm(WIDTH - MARGIN_R),
            fm(py)
        ));
        out.push_str(&format!(
            "<text x='{}' y='{}' font-size='11' text-anchor='end'>1e{}</text>\n",
            fm(MARGIN_L - 6.0),
            fm(py + 4.0),
            e
        ));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|&&(x, y)| x > 0.0 && y > 0.0)
            .map(|&(x, y)| {
                let (px, py) = to_px(x.log10(), y.log10());
                format!("{},{}", fm(px), fm(py))
            })
            .collect();
        let dash = if s.dashed { " stroke-dasharray='6,4'" } else { "" };
        out.push_str(&format!(
            "<polyline fill='none' stroke='{color}' stroke-width='1.5'{dash} points='{}'/>\n",
            pts.join(" ")
        ));
        legend_entry(&mut out, i, color, &s.label, s.dashed);
    }
    out.push_str("</svg>\n");
    out
}

/// One histogram: precomputed bin edges and counts.
#[derive(Debug, Clone)]
pub struct HistSeries {
    pub label: String,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Draws step-outline histograms of all series on shared linear axes.
pub fn histogram_plot(title: &str, x_label: &str, series: &[HistSeries]) -> String {
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_hi: f64 = 0.0;
    for s in series {
        if let (Some(first), Some(last)) = (s.edges.first(), s.edges.last()) {
            x_lo = x_lo.min(*first);
            x_hi = x_hi.max(*last);
        }
        for &c in &s.counts {
            y_hi = y_hi.max(c as f64);
        }
    }
    if !x_lo.is_finite() || x_hi <= x_lo {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    y_hi = y_hi.max(1.0) * 1.05;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = HEIGHT - MARGIN_B - y / y_hi * (HEIGHT - MARGIN_T - MARGIN_B);
        (px, py)
    };

    let mut out = String::new();
    svg_open(&mut out, title);
    axes(&mut out, x_label, "count");
    for k in 0..=4 {
        let x = x_lo + (x_hi - x_lo) * k as f64 / 4.0;
        let (px, _) = to_px(x, 0.0);
        out.push_str(&format!(
            "<text x='{}' y='{}' font-size='11' text-anchor='middle'>{}</text>\n",
            fm(px),
            fm(HEIGHT - MARGIN_B + 16.0),
            fm(x)
        ));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = Vec::new();
        let (px0, py0) = to_px(s.edges[0], 0.0);
        pts.push(format!("{},{}", fm(px0), fm(py0)));
        for (b, &c) in s.counts.iter().enumerate() {
            let (pl, py) = to_px(s.edges[b], c as f64);
            let (pr, _) = to_px(s.edges[b + 1], c as f64);
            pts.push(format!("{},{}", fm(pl), fm(py)));
            pts.push(format!("{},{}", fm(pr), fm(py)));
        }
        let (pxn, pyn) = to_px(*s.edges.last().unwrap(), 0.0);
        pts.push(format!("{},{}", fm(pxn), fm(pyn)));
        out.push_str(&format!(
            "<polyline fill='none' stroke='{color}' stroke-width='1.5' points='{}'/>\n",
            pts.join(" ")
        ));
        legend_entry(&mut out, i, color, &s.label, false);
    }
    out.push_str("</svg>\n");
    out
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn svg_open(out: &mut String, title: &str) {
    out.push_str(&format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{}' height='{}' viewBox='0 0 {} {}'>\n",
        WIDTH as u32, HEIGHT as u32, WIDTH as u32, HEIGHT as u32
    ));
    out.push_str("<rect width='100%' height='100%' fill='white'/>\n");
    out.push_str(&format!(
        "<text x='{}' y='18' font-size='14' text-anchor='middle'>{}</text>\n",
        fm(WIDTH / 2.0),
        title
    ));
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    out.push_str(&format!(
        "<line x1='{l}' y1='{b}' x2='{r}' y2='{b}' stroke='black'/>\n<line x1='{l}' y1='{t}' x2='{l}' y2='{b}' stroke='black'/>\n",
        l = fm(MARGIN_L),
        r = fm(WIDTH - MARGIN_R),
        t = fm(MARGIN_T),
        b = fm(HEIGHT - MARGIN_B),
    ));
    out.push_str(&format!(
        "<text x='{}' y='{}' font-size='12' text-anchor='middle'>{}</text>\n",
        fm((MARGIN_L + WIDTH - MARGIN_R) / 2.0),
        fm(HEIGHT - 12.0),
        x_label
    ));
    out.push_str(&format!(
        "<text x='14' y='{}' font-size='12' text-anchor='middle' transform='rotate(-90 14 {})'>{}</text>\n",
        fm((MARGIN_T + HEIGHT - MARGIN_B) / 2.0),
        fm((MARGIN_T + HEIGHT - MARGIN_B) / 2.0),
        y_label
    ));
}

fn legend_entry(out: &mut String, index: usize, color: &str, label: &str, dashed: bool) {
    let y = MARGIN_T + 14.0 + 16.0 * index as f64;
    let dash = if dashed { " stroke-dasharray='6,4'" } else { "" };
    out.push_str(&format!(
        "<line x1='{}' y1='{}' x2='{}' y2='{}' stroke='{color}' stroke-width='1.5'{dash}/>\n",
        fm(WIDTH - 170.0),
        fm(y),
        fm(WIDTH - 140.0),
        fm(y)
    ));
    out.push_str(&format!(
        "<text x='{}' y='{}' font-size='11'>{}</text>\n",
        fm(WIDTH - 134.0),
        fm(y + 4.0),
        label
    ));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_output_is_deterministic() {
        let series = vec![Series {
            label: "lag 2".into(),
            points: vec![(250.0, 0.5), (500.0, 0.3), (1000.0, 0.2)],
            dashed: false,
        }];
        let a = line_plot_loglog("rate", "N", "mean", &series);
        let b = line_plot_loglog("rate", "N", "mean", &series);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("polyline"));
    }

    #[test]
    fn histogram_handles_empty_range() {
        let h = HistSeries {
            label: "lag 2".into(),
            edges: vec![0.0, 0.5, 1.0],
            counts: vec![3, 7],
        };
        let s = histogram_plot("hist", "value", &[h]);
        assert!(s.contains("</svg>"));
    }
}
