//! Deterministic SVG chart rendering.
//!
//! Charts render to self-contained SVG strings with axes, tick labels and
//! legends. There are no timestamps and every float goes through the same
//! fixed formatting (6 significant digits for data labels, 2 decimals for
//! coordinates), so identical specs produce byte-identical documents.

use crate::error::{Error, Result};
use crate::math;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];
const HIGHLIGHT_COLOR: &str = "#d62728";

/// One named (x, y) series for scatter and line charts.
#[derive(Debug, Clone, PartialEq)]
pub struct XySeries {
    pub name: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Rendered with the highlight style (ringed markers) when true.
    pub highlight: bool,
}

impl XySeries {
    pub fn new(name: &str, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        XySeries {
            name: name.to_string(),
            xs,
            ys,
            highlight: false,
        }
    }

    pub fn highlighted(mut self) -> Self {
        self.highlight = true;
        self
    }
}

/// Chart payload; one variant per supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ChartData {
    Histogram {
        values: Vec<f64>,
        bins: usize,
    },
    Bar {
        labels: Vec<String>,
        values: Vec<f64>,
    },
    Line {
        series: Vec<XySeries>,
    },
    Scatter {
        series: Vec<XySeries>,
    },
    /// Scores scattered on the first two components plus one labeled
    /// loading arrow per feature, anchored at the origin.
    Biplot {
        xs: Vec<f64>,
        ys: Vec<f64>,
        arrows: Vec<(String, f64, f64)>,
    },
    /// Square matrix, row-major, colored on a [-1, 1] diverging scale.
    Heatmap {
        labels: Vec<String>,
        cells: Vec<f64>,
    },
    /// Grid of scatter panels with histograms on the diagonal; `rows` holds
    /// one record per observation, `groups` a color index per observation,
    /// and `highlight` row indices drawn in the highlight style.
    Pairplot {
        dim_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        groups: Vec<usize>,
        highlight: Vec<usize>,
        bins: usize,
    },
}

impl ChartData {
    pub fn kind(&self) -> &'static str {
        match self {
            ChartData::Histogram { .. } => "histogram",
            ChartData::Bar { .. } => "bar",
            ChartData::Line { .. } => "line",
            ChartData::Scatter { .. } => "scatter",
            ChartData::Biplot { .. } => "biplot",
            ChartData::Heatmap { .. } => "heatmap",
            ChartData::Pairplot { .. } => "pairplot",
        }
    }
}

/// Complete chart specification.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    pub data: ChartData,
}

impl ChartSpec {
    pub fn new(title: &str, data: ChartData) -> Self {
        ChartSpec {
            title: title.to_string(),
            x_label: String::new(),
            y_label: String::new(),
            width: 800,
            height: 560,
            data,
        }
    }

    pub fn with_axis_labels(mut self, x: &str, y: &str) -> Self {
        self.x_label = x.to_string();
        self.y_label = y.to_string();
        self
    }
}

/// Equal-width histogram bins over `[min, max]`; the last bin includes its
/// right edge. All-identical input collapses to a single degenerate bin.
pub fn histogram_bins(values: &[f64], n_bins: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "histogram of an empty slice".to_string(),
        ));
    }
    if n_bins == 0 {
        return Err(Error::Spec("histogram needs at least one bin".to_string()));
    }
    let mut min = values[0];
    let mut max = values[0];
    for &v in values {
        if !v.is_finite() {
            return Err(Error::Spec("histogram values must be finite".to_string()));
        }
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    if min == max {
        let edges = alloc::vec![min, max];
        let counts = alloc::vec![values.len()];
        return Ok((edges, counts));
    }

    let width = (max - min) / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|i| min + width * i as f64).collect();
    let mut counts = alloc::vec![0usize; n_bins];
    for &v in values {
        let mut idx = ((v - min) / width) as usize;
        if idx >= n_bins {
            idx = n_bins - 1;
        }
        counts[idx] += 1;
    }
    Ok((edges, counts))
}

/// Render a chart spec to a standalone SVG document.
pub fn render_chart(spec: &ChartSpec) -> Result<String> {
    validate(spec)?;
    let mut svg = String::with_capacity(16 * 1024);
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n",
        w = spec.width,
        h = spec.height
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        spec.width, spec.height
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        spec.width / 2,
        escape(&spec.title)
    ));

    match &spec.data {
        ChartData::Histogram { values, bins } => render_histogram(&mut svg, spec, values, *bins)?,
        ChartData::Bar { labels, values } => render_bar(&mut svg, spec, labels, values),
        ChartData::Line { series } => render_xy(&mut svg, spec, series, true),
        ChartData::Scatter { series } => render_xy(&mut svg, spec, series, false),
        ChartData::Biplot { xs, ys, arrows } => render_biplot(&mut svg, spec, xs, ys, arrows),
        ChartData::Heatmap { labels, cells } => render_heatmap(&mut svg, spec, labels, cells),
        ChartData::Pairplot {
            dim_names,
            rows,
            groups,
            highlight,
            bins,
        } => render_pairplot(&mut svg, spec, dim_names, rows, groups, highlight, *bins)?,
    }

    svg.push_str("</svg>\n");
    debug_assert!(is_well_formed_xml(&svg));
    Ok(svg)
}

fn validate(spec: &ChartSpec) -> Result<()> {
    match &spec.data {
        ChartData::Histogram { values, .. } => {
            if values.is_empty() {
                return Err(Error::Spec("histogram of no values".to_string()));
            }
        }
        ChartData::Bar { labels, values } => {
            if labels.len() != values.len() {
                return Err(Error::Spec(format!(
                    "bar chart has {} labels for {} values",
                    labels.len(),
                    values.len()
                )));
            }
            if values.is_empty() {
                return Err(Error::Spec("bar chart of no values".to_string()));
            }
        }
        ChartData::Line { series } | ChartData::Scatter { series } => {
            if series.is_empty() || series.iter().all(|s| s.xs.is_empty()) {
                return Err(Error::Spec("chart of no points".to_string()));
            }
            for s in series {
                if s.xs.len() != s.ys.len() {
                    return Err(Error::Spec(format!(
                        "series {} has {} x values for {} y values",
                        s.name,
                        s.xs.len(),
                        s.ys.len()
                    )));
                }
            }
        }
        ChartData::Biplot { xs, ys, arrows } => {
            if xs.len() != ys.len() {
                return Err(Error::Spec(format!(
                    "biplot has {} x values for {} y values",
                    xs.len(),
                    ys.len()
                )));
            }
            if xs.is_empty() || arrows.is_empty() {
                return Err(Error::Spec("biplot needs scores and arrows".to_string()));
            }
        }
        ChartData::Heatmap { labels, cells } => {
            if labels.len() * labels.len() != cells.len() {
                return Err(Error::Spec(format!(
                    "heatmap of {} labels needs {} cells, got {}",
                    labels.len(),
                    labels.len() * labels.len(),
                    cells.len()
                )));
            }
        }
        ChartData::Pairplot {
            dim_names,
            rows,
            groups,
            ..
        } => {
            if dim_names.is_empty() {
                return Err(Error::Spec("pairplot of no dimensions".to_string()));
            }
            if groups.len() != rows.len() {
                return Err(Error::Spec(format!(
                    "pairplot has {} group labels for {} rows",
                    groups.len(),
                    rows.len()
                )));
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != dim_names.len() {
                    return Err(Error::Spec(format!(
                        "pairplot row {i} has {} values for {} dimensions",
                        row.len(),
                        dim_names.len()
                    )));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- layout --

struct Frame {
    px: f64,
    py: f64,
    pw: f64,
    ph: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        self.px + (x - self.xmin) / (self.xmax - self.xmin) * self.pw
    }

    fn sy(&self, y: f64) -> f64 {
        self.py + self.ph - (y - self.ymin) / (self.ymax - self.ymin) * self.ph
    }
}

/// Pad a degenerate range so scaling never divides by zero.
fn padded(min: f64, max: f64) -> (f64, f64) {
    if min == max {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    }
}

fn data_frame(spec: &ChartSpec, xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Frame {
    let (xmin, xmax) = padded(xmin, xmax);
    let (ymin, ymax) = padded(ymin, ymax);
    Frame {
        px: 72.0,
        py: 44.0,
        pw: spec.width as f64 - 72.0 - 28.0,
        ph: spec.height as f64 - 44.0 - 58.0,
        xmin,
        xmax,
        ymin,
        ymax,
    }
}

fn axes(svg: &mut String, spec: &ChartSpec, frame: &Frame) {
    // gridlines and ticks from nice step values
    for (ticks, vertical) in [
        (nice_ticks(frame.xmin, frame.xmax), true),
        (nice_ticks(frame.ymin, frame.ymax), false),
    ] {
        for &t in &ticks {
            if vertical {
                let x = frame.sx(t);
                svg.push_str(&format!(
                    "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n",
                    frame.py,
                    frame.py + frame.ph
                ));
                svg.push_str(&format!(
                    "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
                    frame.py + frame.ph + 16.0,
                    fmt_sig(t)
                ));
            } else {
                let y = frame.sy(t);
                svg.push_str(&format!(
                    "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n",
                    frame.px,
                    frame.px + frame.pw
                ));
                svg.push_str(&format!(
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
                    frame.px - 6.0,
                    y + 4.0,
                    fmt_sig(t)
                ));
            }
        }
    }
    // frame box
    svg.push_str(&format!(
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        frame.px, frame.py, frame.pw, frame.ph
    ));
    // axis labels
    if !spec.x_label.is_empty() {
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
            frame.px + frame.pw / 2.0,
            frame.py + frame.ph + 42.0,
            escape(&spec.x_label)
        ));
    }
    if !spec.y_label.is_empty() {
        let x = 18.0;
        let y = frame.py + frame.ph / 2.0;
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 {x:.2} {y:.2})\">{}</text>\n",
            escape(&spec.y_label)
        ));
    }
}

/// Round tick positions covering `[min, max]` with a 1/2/5 step.
fn nice_ticks(min: f64, max: f64) -> Vec<f64> {
    let range = max - min;
    debug_assert!(range > 0.0);
    let raw_step = range / 5.0;
    let mag = math::pow(10.0, math::floor(math::log10(raw_step)));
    let norm = raw_step / mag;
    let step = if norm <= 1.0 {
        mag
    } else if norm <= 2.0 {
        2.0 * mag
    } else if norm <= 5.0 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let mut ticks = Vec::new();
    let mut t = math::ceil(min / step) * step;
    while t <= max + step * 1e-9 {
        // snap near-zero ticks produced by rounding
        ticks.push(if math::abs(t) < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    ticks
}

// --------------------------------------------------------------- formats --

/// Fixed 6-significant-digit formatting for data values.
pub fn fmt_sig(v: f64) -> String {
    format_sig(v, 6)
}

fn format_sig(v: f64, sig: usize) -> String {
    debug_assert!(sig >= 1);
    if v == 0.0 {
        return "0".to_string();
    }
    let exp_repr = format!("{:.*e}", sig - 1, v);
    let (mant, exp) = exp_repr.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("valid exponent");
    if exp >= -4 && exp < sig as i32 {
        let decimals = (sig as i32 - 1 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else if exp >= sig as i32 && exp <= 8 {
        // rounded mantissa digits padded with zeros up to the magnitude
        let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
        let sign = if mant.starts_with('-') { "-" } else { "" };
        let zeros = (exp + 1 - digits.len() as i32).max(0) as usize;
        format!("{sign}{digits}{}", "0".repeat(zeros))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

// ----------------------------------------------------------------- kinds --

fn render_histogram(svg: &mut String, spec: &ChartSpec, values: &[f64], bins: usize) -> Result<()> {
    let (edges, counts) = histogram_bins(values, bins)?;
    let max_count = *counts.iter().max().expect("non-empty") as f64;
    let (xmin, xmax) = (edges[0], edges[edges.len() - 1]);
    let frame = data_frame(spec, xmin, xmax, 0.0, max_count);
    axes(svg, spec, &frame);
    for (i, &count) in counts.iter().enumerate() {
        let x0 = frame.sx(edges[i]);
        let x1 = frame.sx(edges[i + 1].max(edges[i] + (xmax - xmin).max(1.0) * 1e-9));
        let y = frame.sy(count as f64);
        let h = frame.py + frame.ph - y;
        svg.push_str(&format!(
            "<rect class=\"bin\" x=\"{x0:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"{}\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n",
            (x1 - x0).max(0.8),
            PALETTE[0]
        ));
    }
    Ok(())
}

fn render_bar(svg: &mut String, spec: &ChartSpec, labels: &[String], values: &[f64]) {
    let max_v = values.iter().fold(0.0_f64, |a, &b| a.max(b));
    let frame = data_frame(spec, 0.0, labels.len() as f64, 0.0, max_v.max(1e-12));
    // y gridlines only; x positions are categorical
    for &t in &nice_ticks(frame.ymin, frame.ymax) {
        let y = frame.sy(t);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n",
            frame.px,
            frame.px + frame.pw
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
            frame.px - 6.0,
            y + 4.0,
            fmt_sig(t)
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        frame.px, frame.py, frame.pw, frame.ph
    ));
    let slot = frame.pw / labels.len() as f64;
    for (i, (label, &v)) in labels.iter().zip(values).enumerate() {
        let x = frame.px + slot * i as f64 + slot * 0.15;
        let y = frame.sy(v);
        svg.push_str(&format!(
            "<rect class=\"bar\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>\n",
            slot * 0.7,
            frame.py + frame.ph - y,
            PALETTE[0]
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
            frame.px + slot * (i as f64 + 0.5),
            frame.py + frame.ph + 16.0,
            escape(label)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
            frame.px + slot * (i as f64 + 0.5),
            y - 4.0,
            fmt_sig(v)
        ));
    }
    if !spec.x_label.is_empty() {
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
            frame.px + frame.pw / 2.0,
            frame.py + frame.ph + 42.0,
            escape(&spec.x_label)
        ));
    }
}

fn render_xy(svg: &mut String, spec: &ChartSpec, series: &[XySeries], as_line: bool) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for (&x, &y) in s.xs.iter().zip(&s.ys) {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    let frame = data_frame(spec, xmin, xmax, ymin, ymax);
    axes(svg, spec, &frame);

    let mut color_idx = 0usize;
    for s in series {
        let color = if s.highlight {
            HIGHLIGHT_COLOR
        } else {
            let c = PALETTE[color_idx % PALETTE.len()];
            color_idx += 1;
            c
        };
        if as_line {
            let mut d = String::new();
            for (i, (&x, &y)) in s.xs.iter().zip(&s.ys).enumerate() {
                let cmd = if i == 0 { 'M' } else { 'L' };
                d.push_str(&format!("{cmd}{:.2} {:.2} ", frame.sx(x), frame.sy(y)));
            }
            svg.push_str(&format!(
                "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                d.trim_end()
            ));
            for (&x, &y) in s.xs.iter().zip(&s.ys) {
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                    frame.sx(x),
                    frame.sy(y)
                ));
            }
        } else if s.highlight {
            for (&x, &y) in s.xs.iter().zip(&s.ys) {
                svg.push_str(&format!(
                    "<circle class=\"pt-highlight\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                    frame.sx(x),
                    frame.sy(y)
                ));
            }
        } else {
            for (&x, &y) in s.xs.iter().zip(&s.ys) {
                svg.push_str(&format!(
                    "<circle class=\"pt\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.75\"/>\n",
                    frame.sx(x),
                    frame.sy(y)
                ));
            }
        }
    }

    // legend in the top-right corner of the plot area
    if series.len() > 1 {
        let mut color_idx = 0usize;
        for (i, s) in series.iter().enumerate() {
            let color = if s.highlight {
                HIGHLIGHT_COLOR
            } else {
                let c = PALETTE[color_idx % PALETTE.len()];
                color_idx += 1;
                c
            };
            let y = frame.py + 14.0 + 16.0 * i as f64;
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{color}\"/>\n",
                frame.px + frame.pw - 120.0
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>\n",
                frame.px + frame.pw - 110.0,
                y + 4.0,
                escape(&s.name)
            ));
        }
    }
}

fn render_biplot(
    svg: &mut String,
    spec: &ChartSpec,
    xs: &[f64],
    ys: &[f64],
    arrows: &[(String, f64, f64)],
) {
    let mut xmin = 0.0f64;
    let mut xmax = 0.0f64;
    let mut ymin = 0.0f64;
    let mut ymax = 0.0f64;
    for (&x, &y) in xs.iter().zip(ys) {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    for (_, ax, ay) in arrows {
        xmin = xmin.min(*ax);
        xmax = xmax.max(*ax);
        ymin = ymin.min(*ay);
        ymax = ymax.max(*ay);
    }
    let frame = data_frame(spec, xmin, xmax, ymin, ymax);
    axes(svg, spec, &frame);
    for (&x, &y) in xs.iter().zip(ys) {
        svg.push_str(&format!(
            "<circle class=\"pt\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
            frame.sx(x),
            frame.sy(y),
            PALETTE[0]
        ));
    }
    let ox = frame.sx(0.0);
    let oy = frame.sy(0.0);
    for (name, ax, ay) in arrows {
        let tx = frame.sx(*ax);
        let ty = frame.sy(*ay);
        svg.push_str(&format!(
            "<line class=\"loading\" x1=\"{ox:.2}\" y1=\"{oy:.2}\" x2=\"{tx:.2}\" y2=\"{ty:.2}\" stroke=\"{HIGHLIGHT_COLOR}\" stroke-width=\"2\"/>\n"
        ));
        svg.push_str(&format!(
            "<circle cx=\"{tx:.2}\" cy=\"{ty:.2}\" r=\"2.5\" fill=\"{HIGHLIGHT_COLOR}\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{HIGHLIGHT_COLOR}\">{}</text>\n",
            tx + 4.0,
            ty - 4.0,
            escape(name)
        ));
    }
}

fn render_heatmap(svg: &mut String, spec: &ChartSpec, labels: &[String], cells: &[f64]) {
    let n = labels.len();
    let px = 150.0;
    let py = 44.0;
    let pw = spec.width as f64 - px - 28.0;
    let ph = spec.height as f64 - py - 120.0;
    let cw = pw / n as f64;
    let ch = ph / n as f64;
    for i in 0..n {
        for j in 0..n {
            let v = cells[i * n + j];
            let x = px + cw * j as f64;
            let y = py + ch * i as f64;
            svg.push_str(&format!(
                "<rect class=\"cell\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"{}\" stroke=\"#ffffff\" stroke-width=\"1\"/>\n",
                diverging_color(v)
            ));
            let text_color = if math::abs(v) > 0.6 {
                "#ffffff"
            } else {
                "#222222"
            };
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"10\" fill=\"{text_color}\">{}</text>\n",
                x + cw / 2.0,
                y + ch / 2.0 + 3.0,
                format_sig(v, 3)
            ));
        }
    }
    for (i, label) in labels.iter().enumerate() {
        // row labels on the left, column labels below rotated
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"10\">{}</text>\n",
            px - 6.0,
            py + ch * (i as f64 + 0.5) + 3.0,
            escape(label)
        ));
        let cx = px + cw * (i as f64 + 0.5);
        let cy = py + ph + 10.0;
        svg.push_str(&format!(
            "<text x=\"{cx:.2}\" y=\"{cy:.2}\" text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-45 {cx:.2} {cy:.2})\">{}</text>\n",
            escape(label)
        ));
    }
}

/// Blue-white-red scale for values in [-1, 1].
fn diverging_color(v: f64) -> String {
    let v = v.clamp(-1.0, 1.0);
    let (r, g, b) = if v >= 0.0 {
        lerp_rgb((255, 255, 255), (178, 24, 43), v)
    } else {
        lerp_rgb((255, 255, 255), (33, 102, 172), -v)
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn lerp_rgb(from: (u8, u8, u8), to: (u8, u8, u8), t: f64) -> (u8, u8, u8) {
    let ch = |a: u8, b: u8| -> u8 {
        let x = a as f64 + (b as f64 - a as f64) * t;
        math::floor(x + 0.5) as u8
    };
    (ch(from.0, to.0), ch(from.1, to.1), ch(from.2, to.2))
}

fn render_pairplot(
    svg: &mut String,
    spec: &ChartSpec,
    dim_names: &[String],
    rows: &[Vec<f64>],
    groups: &[usize],
    highlight: &[usize],
    bins: usize,
) -> Result<()> {
    let q = dim_names.len();
    let margin = 56.0;
    let gap = 10.0;
    let panel_w = (spec.width as f64 - margin - 20.0 - gap * (q as f64 - 1.0)) / q as f64;
    let panel_h = (spec.height as f64 - margin - 40.0 - gap * (q as f64 - 1.0)) / q as f64;

    // per-dimension ranges shared across the row/column of panels
    let ranges: Vec<(f64, f64)> = (0..q)
        .map(|d| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for row in rows {
                lo = lo.min(row[d]);
                hi = hi.max(row[d]);
            }
            padded(lo, hi)
        })
        .collect();

    for pi in 0..q {
        for pj in 0..q {
            let x0 = margin + pj as f64 * (panel_w + gap);
            let y0 = 40.0 + pi as f64 * (panel_h + gap);
            svg.push_str(&format!(
                "<g class=\"panel\" data-row=\"{pi}\" data-col=\"{pj}\">\n"
            ));
            svg.push_str(&format!(
                "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{panel_w:.2}\" height=\"{panel_h:.2}\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.8\"/>\n"
            ));
            if pi == pj {
                // diagonal: histogram of the dimension
                let values: Vec<f64> = rows.iter().map(|r| r[pi]).collect();
                let (edges, counts) = histogram_bins(&values, bins)?;
                let max_count = *counts.iter().max().expect("non-empty") as f64;
                let (lo, hi) = ranges[pi];
                for (b, &count) in counts.iter().enumerate() {
                    let bx0 = x0 + (edges[b] - lo) / (hi - lo) * panel_w;
                    let bx1 = x0 + (edges[b + 1] - lo) / (hi - lo) * panel_w;
                    let bh = count as f64 / max_count * (panel_h - 4.0);
                    svg.push_str(&format!(
                        "<rect class=\"pp-hist\" x=\"{bx0:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{bh:.2}\" fill=\"{}\" stroke=\"#ffffff\" stroke-width=\"0.4\"/>\n",
                        y0 + panel_h - bh,
                        (bx1 - bx0).max(0.5),
                        PALETTE[0]
                    ));
                }
                svg.push_str(&format!(
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
                    x0 + panel_w / 2.0,
                    y0 + 12.0,
                    escape(&dim_names[pi])
                ));
            } else {
                let (xlo, xhi) = ranges[pj];
                let (ylo, yhi) = ranges[pi];
                for (r, row) in rows.iter().enumerate() {
                    let cx = x0 + (row[pj] - xlo) / (xhi - xlo) * panel_w;
                    let cy = y0 + panel_h - (row[pi] - ylo) / (yhi - ylo) * panel_h;
                    let color = PALETTE[groups[r] % PALETTE.len()];
                    svg.push_str(&format!(
                        "<circle class=\"pp-pt\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"1.8\" fill=\"{color}\" fill-opacity=\"0.7\"/>\n"
                    ));
                }
                for &r in highlight {
                    let row = &rows[r];
                    let cx = x0 + (row[pj] - xlo) / (xhi - xlo) * panel_w;
                    let cy = y0 + panel_h - (row[pi] - ylo) / (yhi - ylo) * panel_h;
                    svg.push_str(&format!(
                        "<circle class=\"pp-highlight\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"3.2\" fill=\"none\" stroke=\"{HIGHLIGHT_COLOR}\" stroke-width=\"1.2\"/>\n"
                    ));
                }
            }
            svg.push_str("</g>\n");
        }
    }
    Ok(())
}

// ------------------------------------------------------------- wellformed --

/// Minimal XML well-formedness check: balanced tags, quoted attributes,
/// sane entities. Enough to validate the documents this module emits.
pub fn is_well_formed_xml(doc: &str) -> bool {
    let bytes = doc.as_bytes();
    let mut i = 0usize;
    let mut stack: Vec<&str> = Vec::new();
    let mut seen_root_close = false;

    while i < bytes.len() {
        match bytes[i] {
            b'<' => {
                if seen_root_close && !doc[i..].trim().is_empty() {
                    // content after the root element
                }
                if doc[i..].starts_with("<?") {
                    match doc[i..].find("?>") {
                        Some(end) => i += end + 2,
                        None => return false,
                    }
                } else if doc[i..].starts_with("<!--") {
                    match doc[i..].find("-->") {
                        Some(end) => i += end + 3,
                        None => return false,
                    }
                } else {
                    let close = match find_tag_end(doc, i) {
                        Some(c) => c,
                        None => return false,
                    };
                    let inner = &doc[i + 1..close];
                    if let Some(name) = inner.strip_prefix('/') {
                        match stack.pop() {
                            Some(open) if open == name.trim() => {}
                            _ => return false,
                        }
                        if stack.is_empty() {
                            seen_root_close = true;
                        }
                    } else if inner.ends_with('/') {
                        if tag_name(inner).is_empty() {
                            return false;
                        }
                    } else {
                        let name = tag_name(inner);
                        if name.is_empty() {
                            return false;
                        }
                        stack.push(name);
                    }
                    i = close + 1;
                }
            }
            b'>' => return false,
            b'&' => {
                let rest = &doc[i + 1..];
                let semi = match rest.find(';') {
                    Some(s) if s <= 10 => s,
                    _ => return false,
                };
                let entity = &rest[..semi];
                let ok = matches!(entity, "amp" | "lt" | "gt" | "quot" | "apos")
                    || entity
                        .strip_prefix('#')
                        .is_some_and(|d| d.chars().all(|c| c.is_ascii_digit()) && !d.is_empty());
                if !ok {
                    return false;
                }
                i += semi + 2;
            }
            _ => i += 1,
        }
    }
    stack.is_empty()
}

/// Index of the `>` ending the tag at `start`, skipping quoted attributes.
fn find_tag_end(doc: &str, start: usize) -> Option<usize> {
    let bytes = doc.as_bytes();
    let mut i = start + 1;
    let mut quote: Option<u8> = None;
    while i < bytes.len() {
        match (quote, bytes[i]) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, b'"') | (None, b'\'') => quote = Some(bytes[i]),
            (None, b'>') => return Some(i),
            (None, b'<') => return None,
            _ => {}
        }
        i += 1;
    }
    None
}

fn tag_name(inner: &str) -> &str {
    inner
        .split(|c: char| c.is_whitespace() || c == '/')
        .next()
        .unwrap_or("")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use alloc::vec;

    #[test]
    fn bin_examples() {
        let (edges, counts) = histogram_bins(&[1.0, 1.0, 2.0], 2).unwrap();
        assert_eq!(counts, vec![2, 1]);
        assert_eq!(edges, vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn bin_counts_conserve_input_length() {
        let mut rng = SplitMix64::new(20);
        for _ in 0..50 {
            let n = 1 + rng.next_index(500);
            let values: Vec<f64> = (0..n).map(|_| rng.next_normal() * 10.0).collect();
            let bins = 1 + rng.next_index(40);
            let (_, counts) = histogram_bins(&values, bins).unwrap();
            assert_eq!(counts.iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn degenerate_single_bin() {
        let (edges, counts) = histogram_bins(&[7.0; 12], 5).unwrap();
        assert_eq!(edges, vec![7.0, 7.0]);
        assert_eq!(counts, vec![12]);
    }

    #[test]
    fn last_bin_includes_right_edge() {
        let (_, counts) = histogram_bins(&[0.0, 1.0, 2.0, 3.0, 4.0], 4).unwrap();
        assert_eq!(counts.iter().sum::<usize>(), 5);
        assert_eq!(counts[3], 2); // 3.0 and 4.0
    }

    #[test]
    fn trimming_shrinks_last_bin_of_lognormal() {
        use crate::preprocess::trim_outliers;
        use crate::table::{Column, Role, Table};

        let mut rng = SplitMix64::new(30);
        let values: Vec<f64> = (0..1000).map(|_| math::exp(rng.next_normal())).collect();
        let table = Table::new(vec![Column::numeric(
            "v",
            Role::Independent,
            values.iter().map(|&v| Some(v)).collect(),
        )
        .unwrap()])
        .unwrap();
        let (trimmed, _) = trim_outliers(&table, &["v"], 0.10).unwrap();
        let after = trimmed.column("v").unwrap().present_numeric().unwrap();

        // count raw values that fall into the raw last bin vs the trimmed
        // sample in the same bin: the heavy right tail must shrink
        let (edges, before_counts) = histogram_bins(&values, 30).unwrap();
        let lo = edges[edges.len() - 2];
        let after_last = after.iter().filter(|&&v| v >= lo).count();
        assert!(
            after_last < before_counts[before_counts.len() - 1].max(1),
            "last bin did not shrink"
        );
    }

    #[test]
    fn fixed_significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(1234.5678), "1234.57");
        assert_eq!(fmt_sig(0.000123456789), "0.000123457");
        assert_eq!(fmt_sig(123456789.0), "123457000");
        assert_eq!(fmt_sig(1.23456789e12), "1.23457e12");
        assert_eq!(fmt_sig(1e-9), "1e-9");
    }

    #[test]
    fn rendering_is_byte_deterministic() {
        let spec = ChartSpec::new(
            "scatter",
            ChartData::Scatter {
                series: vec![
                    XySeries::new("a", vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 2.5]),
                    XySeries::new("b", vec![0.5, 1.5], vec![2.0, 1.0]).highlighted(),
                ],
            },
        )
        .with_axis_labels("x", "y");
        let one = render_chart(&spec).unwrap();
        let two = render_chart(&spec).unwrap();
        assert_eq!(one, two);
        assert!(is_well_formed_xml(&one));
    }

    #[test]
    fn every_kind_renders_well_formed_xml() {
        let mut rng = SplitMix64::new(40);
        let values: Vec<f64> = (0..200).map(|_| rng.next_normal()).collect();
        let specs = vec![
            ChartSpec::new(
                "h",
                ChartData::Histogram {
                    values: values.clone(),
                    bins: 20,
                },
            ),
            ChartSpec::new(
                "b",
                ChartData::Bar {
                    labels: vec!["pc1".into(), "pc2 & more".into()],
                    values: vec![0.8, 0.2],
                },
            ),
            ChartSpec::new(
                "l",
                ChartData::Line {
                    series: vec![XySeries::new(
                        "inertia",
                        vec![1.0, 2.0, 3.0],
                        vec![9.0, 4.0, 3.0],
                    )],
                },
            ),
            ChartSpec::new(
                "s",
                ChartData::Scatter {
                    series: vec![XySeries::new("<pts>", vec![1.0, 2.0], vec![2.0, 1.0])],
                },
            ),
            ChartSpec::new(
                "hm",
                ChartData::Heatmap {
                    labels: vec!["a".into(), "b".into()],
                    cells: vec![1.0, -0.4, -0.4, 1.0],
                },
            ),
            ChartSpec::new(
                "bp",
                ChartData::Biplot {
                    xs: vec![-1.0, 0.0, 2.0],
                    ys: vec![0.5, -0.5, 1.0],
                    arrows: vec![("f1".into(), 1.5, 0.2), ("f2".into(), -0.3, 1.2)],
                },
            ),
            ChartSpec::new(
                "pp",
                ChartData::Pairplot {
                    dim_names: vec!["pc1".into(), "pc2".into(), "pc3".into()],
                    rows: (0..40)
                        .map(|_| vec![rng.next_normal(), rng.next_normal(), rng.next_normal()])
                        .collect(),
                    groups: (0..40).map(|i| i % 3).collect(),
                    highlight: vec![0, 5, 9],
                    bins: 10,
                },
            ),
        ];
        for spec in specs {
            let svg = render_chart(&spec).unwrap();
            assert!(is_well_formed_xml(&svg), "kind {}", spec.data.kind());
        }
    }

    #[test]
    fn pairplot_layout_structure() {
        let mut rng = SplitMix64::new(41);
        let q = 4;
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..q).map(|_| rng.next_normal()).collect())
            .collect();
        let spec = ChartSpec::new(
            "pairs",
            ChartData::Pairplot {
                dim_names: (0..q).map(|i| format!("pc{}", i + 1)).collect(),
                rows,
                groups: (0..30).map(|i| i % 3).collect(),
                highlight: vec![],
                bins: 8,
            },
        );
        let svg = render_chart(&spec).unwrap();
        let panels = svg.matches("class=\"panel\"").count();
        assert_eq!(panels, q * q);
        // one histogram per diagonal panel
        for d in 0..q {
            assert!(svg.contains(&format!("data-row=\"{d}\" data-col=\"{d}\"")));
        }
        assert!(svg.matches("class=\"pp-hist\"").count() >= q);
    }

    #[test]
    fn cluster_scatter_marks_nearest_points_distinctly() {
        let nearest = 10usize;
        let mut rng = SplitMix64::new(42);
        let member_xs: Vec<f64> = (0..50).map(|_| rng.next_normal()).collect();
        let member_ys: Vec<f64> = (0..50).map(|_| rng.next_normal()).collect();
        let spec = ChartSpec::new(
            "clusters",
            ChartData::Scatter {
                series: vec![
                    XySeries::new("cluster 0", member_xs, member_ys),
                    XySeries::new(
                        "cluster 0 nearest",
                        (0..nearest).map(|i| i as f64 / 10.0).collect(),
                        (0..nearest).map(|i| i as f64 / 20.0).collect(),
                    )
                    .highlighted(),
                ],
            },
        );
        let svg = render_chart(&spec).unwrap();
        assert_eq!(svg.matches("class=\"pt-highlight\"").count(), nearest);
    }

    #[test]
    fn mismatched_series_rejected() {
        let spec = ChartSpec::new(
            "bad",
            ChartData::Scatter {
                series: vec![XySeries::new("a", vec![1.0, 2.0], vec![1.0])],
            },
        );
        assert!(matches!(render_chart(&spec), Err(Error::Spec(_))));

        let spec = ChartSpec::new(
            "bad",
            ChartData::Heatmap {
                labels: vec!["a".into(), "b".into()],
                cells: vec![1.0, 2.0, 3.0],
            },
        );
        assert!(matches!(render_chart(&spec), Err(Error::Spec(_))));
    }

    #[test]
    fn xml_checker_rejects_malformed() {
        assert!(is_well_formed_xml("<a><b/></a>"));
        assert!(is_well_formed_xml("<a attr=\"x > y\"><b>hi</b></a>"));
        assert!(!is_well_formed_xml("<a><b></a></b>"));
        assert!(!is_well_formed_xml("<a>"));
        assert!(!is_well_formed_xml("<a>&unknown;</a>"));
        assert!(!is_well_formed_xml("<a attr=\"unterminated></a>"));
    }
}
