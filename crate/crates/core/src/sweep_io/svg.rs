//! Minimal standalone SVG line plots.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvgError {
    #[error("nothing to plot")]
    EmptyData,
    #[error("series '{0}': x and y lengths differ")]
    LengthMismatch(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
    /// Free text placed in the `<desc>` element (e.g. the manifest run id).
    pub description: String,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            title: String::new(),
            x_label: "x / omega_m".into(),
            y_label: String::new(),
            width: 720.0,
            height: 480.0,
            description: String::new(),
        }
    }
}

const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 40.0, 55.0); // left, right, top, bottom

/// Tick positions at 1/2/5 x 10^k spacing covering `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One polyline per series, legend entries in input order. Identical input
/// gives identical output.
pub fn render_svg(series: &[PlotSeries], style: &PlotStyle) -> Result<String, SvgError> {
    let mut pts = 0;
    for s in series {
        if s.x.len() != s.y.len() {
            return Err(SvgError::LengthMismatch(s.label.clone()));
        }
        pts += s.x.iter().zip(&s.y).filter(|(x, y)| x.is_finite() && y.is_finite()).count();
    }
    if pts == 0 {
        return Err(SvgError::EmptyData);
    }
    let finite = |v: &Vec<f64>| v.iter().copied().filter(|v| v.is_finite()).collect::<Vec<_>>();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for v in finite(&s.x) {
            x0 = x0.min(v);
            x1 = x1.max(v);
        }
        for v in finite(&s.y) {
            y0 = y0.min(v);
            y1 = y1.max(v);
        }
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let pad = if y1 > y0 { 0.05 * (y1 - y0) } else { 0.5_f64.max(0.05 * y0.abs()) };
    y0 -= pad;
    y1 += pad;

    let (ml, mr, mt, mb) = MARGIN;
    let (w, h) = (style.width, style.height);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;

    let mut o = String::new();
    let _ = writeln!(o, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    if !style.description.is_empty() {
        let _ = writeln!(o, "<desc>{}</desc>", escape(&style.description));
    }
    let _ = writeln!(o, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        o,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for t in nice_ticks(x0, x1, 6) {
        let x = sx(t);
        let _ = writeln!(o, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, mt + ph, mt + ph + 5.0);
        let _ = writeln!(
            o,
            r#"<text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            mt + ph + 18.0,
            tick_label(t)
        );
    }
    for t in nice_ticks(y0, y1, 6) {
        let y = sy(t);
        let _ = writeln!(o, r#"<line x1="{:.2}" y1="{y:.2}" x2="{ml}" y2="{y:.2}" stroke="black"/>"#, ml - 5.0);
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            ml - 8.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        o,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        h - 12.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        o,
        r#"<text x="16" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        escape(&style.y_label)
    );
    if !style.title.is_empty() {
        let _ = writeln!(o, r#"<text x="{:.2}" y="24" font-size="15" text-anchor="middle">{}</text>"#, w / 2.0, escape(&style.title));
    }

    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = s
            .x
            .iter()
            .zip(&s.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            o,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = mt + 16.0 + 18.0 * k as f64;
        let lx = ml + pw - 150.0;
        let _ = writeln!(o, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#, lx + 24.0);
        let _ = writeln!(
            o,
            r#"<text class="legend" x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    o.push_str("</svg>\n");
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(label: &str, slope: f64) -> PlotSeries {
        let x: Vec<f64> = (0..50).map(|i| i as f64 / 49.0 - 0.5).collect();
        let y = x.iter().map(|v| slope * v).collect();
        PlotSeries { label: label.into(), x, y }
    }

    #[test]
    fn one_series_one_polyline() {
        let svg = render_svg(&[line("a", 1.0)], &PlotStyle::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn legend_in_input_order() {
        let svg = render_svg(&[line("bare", 1.0), line("nonlinear", -1.0)], &PlotStyle::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        let a = svg.find(">bare</text>").unwrap();
        let b = svg.find(">nonlinear</text>").unwrap();
        assert!(a < b);
    }

    #[test]
    fn deterministic() {
        let s = [line("a", 2.0)];
        assert_eq!(render_svg(&s, &PlotStyle::default()), render_svg(&s, &PlotStyle::default()));
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(render_svg(&[], &PlotStyle::default()), Err(SvgError::EmptyData));
        let s = PlotSeries { label: "e".into(), x: vec![], y: vec![] };
        assert_eq!(render_svg(&[s], &PlotStyle::default()), Err(SvgError::EmptyData));
    }

    #[test]
    fn ticks() {
        assert_eq!(nice_ticks(-0.1, 0.1, 4), vec![-0.1, -0.05, 0.0, 0.05, 0.1]);
    }
}
