//! Text formats: point-cloud CSV, scale-series and profile CSV, fit JSON and
//! SVG rendering. Floats are written with 17 significant digits so every
//! value reads back bit-identical.

use std::fmt::Write as _;

use crate::catalog::{Polyline, Triangle};
use crate::error::{Error, Result};
use crate::estimator::{DimensionFit, MeasureProfile, ScaleEntry, ScaleSeries};
use crate::geometry::PointCloud;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

const AXES: [&str; 3] = ["x", "y", "z"];

fn header_for(dim: usize) -> String {
    (0..dim).map(|i| AXES.get(i).map_or_else(|| format!("x{i}"), |s| s.to_string())).collect::<Vec<_>>().join(",")
}

/// Rows `x[,y[,z]]` under a header line.
pub fn write_cloud_csv(cloud: &PointCloud) -> String {
    let mut out = header_for(cloud.dim());
    out.push('\n');
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|c| fmt_f64(*c)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn parse_row(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|f| {
            f.trim().parse::<f64>().map_err(|_| Error::Format(format!("line {lineno}: cannot parse {:?} as a number", f.trim())))
        })
        .collect()
}

/// Reads a point cloud; a non-numeric first line is taken as a header.
pub fn read_cloud_csv(text: &str) -> Result<PointCloud> {
    let mut dim = None;
    let mut coords = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if dim.is_none() && coords.is_empty() && line.split(',').any(|f| f.trim().parse::<f64>().is_err()) {
            dim = Some(line.split(',').count());
            continue;
        }
        let row = parse_row(line, i + 1)?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::Format(format!("line {}: expected {d} columns, found {}", i + 1, row.len())))
            }
            _ => {}
        }
        coords.extend(row);
    }
    let dim = dim.ok_or_else(|| Error::Format("empty point cloud file".into()))?;
    PointCloud::new(dim, coords)
}

pub fn write_series_csv(series: &ScaleSeries) -> String {
    let mut out = String::from("scale,count\n");
    for e in &series.entries {
        let _ = writeln!(out, "{},{}", fmt_f64(e.scale), e.count);
    }
    out
}

pub fn read_series_csv(text: &str) -> Result<ScaleSeries> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let (s, c) = line.split_once(',').ok_or_else(|| Error::Format(format!("line {}: expected 2 columns", i + 1)))?;
        let scale = s.trim().parse().map_err(|_| Error::Format(format!("line {}: bad scale", i + 1)))?;
        let count = c.trim().parse().map_err(|_| Error::Format(format!("line {}: bad count", i + 1)))?;
        entries.push(ScaleEntry { scale, count });
    }
    Ok(ScaleSeries { entries })
}

pub fn write_profile_csv(profile: &MeasureProfile) -> String {
    let mut out = String::from("delta,value\n");
    for (d, v) in profile.deltas.iter().zip(&profile.values) {
        let _ = writeln!(out, "{},{}", fmt_f64(*d), fmt_f64(*v));
    }
    out
}

pub fn read_profile_csv(text: &str, epsilon: f64) -> Result<MeasureProfile> {
    let mut profile = MeasureProfile { epsilon, deltas: vec![], values: vec![] };
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_row(line, i + 1)?;
        if row.len() != 2 {
            return Err(Error::Format(format!("line {}: expected 2 columns", i + 1)));
        }
        profile.deltas.push(row[0]);
        profile.values.push(row[1]);
    }
    Ok(profile)
}

pub fn write_fit_json(fit: &DimensionFit) -> String {
    serde_json::to_string_pretty(fit).expect("fit serializes")
}

pub fn read_fit_json(text: &str) -> Result<DimensionFit> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("fit JSON: {e}")))
}

/// SVG styling. Coordinates live in a unit viewBox with y pointing up.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub size_px: u32,
    pub stroke: String,
    pub stroke_width_px: f64,
    pub margin: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { size_px: 512, stroke: "black".into(), stroke_width_px: 1.0, margin: 0.02 }
    }
}

/// Fits `[min, max]` of the drawn data into the unit square (aspect kept,
/// y flipped so larger y is drawn higher).
struct Frame {
    min: [f64; 2],
    span: f64,
    margin: f64,
}

impl Frame {
    fn new(points: impl Iterator<Item = [f64; 2]>, margin: f64) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        if !lo[0].is_finite() {
            lo = [0.0; 2];
            hi = [1.0; 2];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        Frame { min: lo, span: if span > 0.0 { span } else { 1.0 }, margin }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let usable = 1.0 - 2.0 * self.margin;
        let x = self.margin + usable * (p[0] - self.min[0]) / self.span;
        let y = 1.0 - self.margin - usable * (p[1] - self.min[1]) / self.span;
        (x, y)
    }
}

fn svg_open(style: &SvgStyle) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 1 1\">\n",
        style.size_px
    )
}

fn px(style: &SvgStyle, n: f64) -> f64 {
    n / f64::from(style.size_px)
}

fn fmt_svg(x: f64) -> String {
    // fixed precision keeps the file byte-stable and compact
    format!("{x:.9}")
}

pub fn polyline_svg(lines: &[&Polyline], style: &SvgStyle) -> String {
    let frame = Frame::new(lines.iter().flat_map(|l| l.vertices().iter().copied()), style.margin);
    let mut out = svg_open(style);
    for line in lines {
        let pts: Vec<String> = line
            .vertices()
            .iter()
            .map(|&p| {
                let (x, y) = frame.map(p);
                format!("{},{}", fmt_svg(x), fmt_svg(y))
            })
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"{}\"/>",
            style.stroke,
            fmt_svg(px(style, style.stroke_width_px)),
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn triangles_svg(tris: &[Triangle], style: &SvgStyle) -> String {
    let frame = Frame::new(tris.iter().flat_map(|t| t.iter().copied()), style.margin);
    let mut out = svg_open(style);
    for t in tris {
        let pts: Vec<String> = t
            .iter()
            .map(|&p| {
                let (x, y) = frame.map(p);
                format!("{},{}", fmt_svg(x), fmt_svg(y))
            })
            .collect();
        let _ = writeln!(out, "<polygon fill=\"{}\" points=\"{}\"/>", style.stroke, pts.join(" "));
    }
    out.push_str("</svg>\n");
    out
}

/// Each point as a 0.5-px square; 1-D clouds are drawn on the line `y = 0`.
pub fn points_svg(cloud: &PointCloud, style: &SvgStyle) -> String {
    let as_2d = |p: &[f64]| [p[0], p.get(1).copied().unwrap_or(0.0)];
    let frame = Frame::new(cloud.points().map(as_2d), style.margin);
    let side = px(style, 0.5);
    let mut out = svg_open(style);
    let _ = writeln!(out, "<g fill=\"{}\">", style.stroke);
    for p in cloud.points() {
        let (x, y) = frame.map(as_2d(p));
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
            fmt_svg(x - side / 2.0),
            fmt_svg(y - side / 2.0),
            fmt_svg(side),
            fmt_svg(side)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Closed intervals on the line, drawn as horizontal segments.
pub fn intervals_svg(intervals: &[[f64; 2]], style: &SvgStyle) -> String {
    let frame = Frame::new(intervals.iter().flat_map(|[a, b]| [[*a, 0.0], [*b, 0.0]]), style.margin);
    let mut out = svg_open(style);
    let _ = writeln!(out, "<g stroke=\"{}\" stroke-width=\"{}\">", style.stroke, fmt_svg(px(style, style.stroke_width_px)));
    for [a, b] in intervals {
        let ((x1, y), (x2, _)) = (frame.map([*a, 0.0]), frame.map([*b, 0.0]));
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            fmt_svg(x1),
            fmt_svg(y),
            fmt_svg(x2),
            fmt_svg(y)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
