//! CSV grids, JSON boundary records and SVG heatmaps.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;
use crate::scan::{Axis, ScanResult, Spacing};

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::usage("io", e.to_string())
}

/// One row per grid node (first axis fastest): axis coordinates, then a
/// value and a 0/1 verdict column per target, then the failure reasons.
pub fn write_csv<W: Write>(result: &ScanResult, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = result.axes.iter().map(|a| a.name.to_string()).collect();
    for t in &result.targets {
        header.push(t.to_string());
        header.push(format!("{t}:nonclassical"));
    }
    header.push("error".into());
    w.write_record(&header).map_err(csv_err)?;
    for cell in &result.cells {
        let mut row: Vec<String> = cell.coords.iter().map(|&v| num(v)).collect();
        let mut errors = Vec::new();
        for (t, v) in result.targets.iter().zip(&cell.values) {
            row.push(num(v.value));
            row.push(if v.error.is_some() {
                String::new()
            } else {
                u8::from(v.nonclassical).to_string()
            });
            if let Some(e) = &v.error {
                errors.push(format!("{t}: {e}"));
            }
        }
        row.push(errors.join("; "));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct BoundaryRecord {
    target: String,
    polyline: usize,
    index: usize,
    coords: Map<String, Value>,
    edge_axis: String,
    bracket: [f64; 2],
    residual: f64,
}

/// Flat array of boundary points, one record per refined crossing.
pub fn boundaries_json(result: &ScanResult) -> Value {
    let mut records = Vec::new();
    for b in &result.boundaries {
        for (p, line) in b.polylines.iter().enumerate() {
            for (i, c) in line.iter().enumerate() {
                let coords = result
                    .axes
                    .iter()
                    .zip(&c.coords)
                    .map(|(a, &v)| (a.name.to_string(), Value::from(v)))
                    .collect();
                records.push(BoundaryRecord {
                    target: b.target.to_string(),
                    polyline: p,
                    index: i,
                    coords,
                    edge_axis: result.axes[c.axis].name.to_string(),
                    bracket: [c.bracket.0, c.bracket.1],
                    residual: c.residual,
                });
            }
        }
    }
    serde_json::to_value(records).expect("records serialize")
}

pub fn write_json<W: Write>(value: &Value, mut out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::usage("io", e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

const NONCLASSICAL: &str = "#c0392b";
const CLASSICAL: &str = "#dfe6e9";
const FAILED: &str = "#2d3436";

/// Fractional grid index of `v` along `axis`.
fn grid_position(axis: &Axis, v: f64) -> f64 {
    if axis.count <= 1 {
        return 0.0;
    }
    let f = match axis.spacing {
        Spacing::Linear => (v - axis.min) / (axis.max - axis.min),
        Spacing::Log => (v / axis.min).ln() / (axis.max / axis.min).ln(),
    };
    f * (axis.count - 1) as f64
}

/// Heatmap of the verdicts of target `k` for a 1-D or 2-D scan, with the
/// boundary polylines drawn on top.
pub fn render_svg(result: &ScanResult, k: usize) -> Result<String, CliError> {
    if result.axes.len() > 2 {
        return Err(CliError::usage("invalid_output", "heatmaps need a 1-D or 2-D scan"));
    }
    let ax = result.axes[0];
    let ay = result.axes.get(1).copied();
    let (nx, ny) = (ax.count, ay.map_or(1, |a| a.count));
    let cs = (640.0 / nx.max(ny) as f64).max(1.0);
    let (left, top, bottom) = (60.0, 40.0, 50.0);
    let (w, h) = (left + nx as f64 * cs + 20.0, top + ny as f64 * cs + bottom);
    let colour = |flat: usize| {
        let v = &result.cells[flat].values[k];
        if v.error.is_some() {
            FAILED
        } else if v.nonclassical {
            NONCLASSICAL
        } else {
            CLASSICAL
        }
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="24" font-family="sans-serif" font-size="14">{} (red: nonclassical)</text>"#,
        escape(&result.targets[k].to_string())
    );
    // rows are run-length merged to keep large grids small
    for j in 0..ny {
        let y = top + (ny - 1 - j) as f64 * cs;
        let mut i = 0;
        while i < nx {
            let c = colour(i + nx * j);
            let start = i;
            while i < nx && colour(i + nx * j) == c {
                i += 1;
            }
            let x = left + start as f64 * cs;
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{}" height="{cs}" fill="{c}"/>"#,
                (i - start) as f64 * cs
            );
        }
    }
    let px = |c: &[f64]| {
        let x = left + (grid_position(&ax, c[0]) + 0.5) * cs;
        let y = match ay {
            Some(a) => top + (ny as f64 - 0.5 - grid_position(&a, c[1])) * cs,
            None => top + 0.5 * cs,
        };
        (x, y)
    };
    for line in &result.boundaries[k].polylines {
        if line.len() == 1 {
            let (x, y) = px(&line[0].coords);
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2" fill="black"/>"#);
            continue;
        }
        let pts: Vec<String> = line
            .iter()
            .map(|c| {
                let (x, y) = px(&c.coords);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    let base = top + ny as f64 * cs;
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="{}" font-family="sans-serif" font-size="12">{} ∈ [{}, {}]{}</text>"#,
        base + 20.0,
        ax.name,
        ax.min,
        ax.max,
        if ax.spacing == Spacing::Log { " (log)" } else { "" }
    );
    if let Some(a) = ay {
        let _ = writeln!(
            s,
            r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})">{} ∈ [{}, {}]{}</text>"#,
            base,
            base,
            a.name,
            a.min,
            a.max,
            if a.spacing == Spacing::Log { " (log)" } else { "" }
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
