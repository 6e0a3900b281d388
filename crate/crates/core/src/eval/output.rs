//! CSV and SVG rendering of result tables.

use std::fmt::Write as _;
use std::path::Path;

use crate::allocation::distance_based_bits;
use crate::error::{Error, Result};
use crate::eval::scenario::ResultTable;
use crate::eval::sizes::AllocationSizeTable;

pub const RATE_HEADER: &str = "snr_db,user_rate_mean,sum_rate_mean,stderr,alloc_bits,alloc_scalars,flags";
pub const SIZE_HEADER: &str = "antennas,mean_scalars,stderr,mean_complete_scalars,rejected";
pub const BITS_HEADER: &str = "gamma,snr_db,distance,bits";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            _ => Err(format!("unknown format `{s}` (expected csv or svg)")),
        }
    }
}

pub fn rate_csv(table: &ResultTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut out = format!("{RATE_HEADER}\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{:.3},{:.6},{:.6},{:.6},{},{},{}",
            r.snr_db, r.user_rate_mean, r.sum_rate_mean, r.stderr, r.alloc_bits, r.alloc_scalars, r.flags
        );
    }
    Ok(out)
}

/// Several tables, each preceded by a `# label` line.
pub fn rate_csv_multi(tables: &[ResultTable]) -> Result<String> {
    if tables.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut out = String::new();
    for t in tables {
        let _ = writeln!(out, "# {}", t.label);
        out.push_str(&rate_csv(t)?);
    }
    Ok(out)
}

pub fn size_csv(table: &AllocationSizeTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut out = format!("{SIZE_HEADER}\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{}",
            r.antennas, r.mean_scalars, r.stderr, r.mean_complete_scalars, r.rejected
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitsRow {
    pub gamma: f64,
    pub snr_db: f64,
    pub distance: usize,
    pub bits: u32,
}

pub fn bits_table(gammas: &[f64], snr_db: &[f64], max_distance: usize) -> Result<Vec<BitsRow>> {
    let mut rows = Vec::new();
    for &gamma in gammas {
        for &db in snr_db {
            let p = 10f64.powf(db / 10.0);
            for distance in 0..=max_distance {
                rows.push(BitsRow { gamma, snr_db: db, distance, bits: distance_based_bits(distance, 0, gamma, p)? });
            }
        }
    }
    Ok(rows)
}

pub fn bits_csv(rows: &[BitsRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut out = format!("{BITS_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.gamma, r.snr_db, r.distance, r.bits);
    }
    Ok(out)
}

/// One named polyline of an SVG chart.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart with linear axes and a legend.
pub fn svg_chart(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> Result<String> {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return Err(Error::EmptyTable);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    y0 = y0.min(0.0);
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let (w, h, l, r, t, b) = (640.0, 420.0, 60.0, 170.0, 40.0, 50.0);
    let px = |x: f64| l + (x - x0) / (x1 - x0) * (w - l - r);
    let py = |y: f64| h - b - (y - y0) / (y1 - y0) * (h - t - b);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, (w - r + l) / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<path d="M{l} {t} V{} H{}" fill="none" stroke="black"/>"#,
        h - b,
        w - r
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{:.1}" y="{}" text-anchor="middle">{:.4}</text>"#, px(fx), h - b + 16.0, fx);
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">{:.4}</text>"#, l - 4.0, py(fy) + 4.0, fy);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (w - r + l) / 2.0, h - 10.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    for (n, s) in series.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let path: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"><title>{}</title></polyline>"#,
            path.join(" "),
            escape(s.label)
        );
        let ly = t + 10.0 + 18.0 * n as f64;
        let _ = writeln!(out, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, w - r + 10.0, w - r + 30.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, w - r + 35.0, ly + 4.0, escape(s.label));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Sum rate against SNR, one series per table.
pub fn rate_svg(tables: &[ResultTable]) -> Result<String> {
    if tables.is_empty() || tables.iter().any(|t| t.rows.is_empty()) {
        return Err(Error::EmptyTable);
    }
    let series: Vec<Series<'_>> = tables
        .iter()
        .map(|t| Series { label: &t.label, points: t.rows.iter().map(|r| (r.snr_db, r.sum_rate_mean)).collect() })
        .collect();
    svg_chart("Mean sum rate", "SNR [dB]", "sum rate [bits/s/Hz]", &series)
}

pub fn size_svg(table: &AllocationSizeTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let x = |r: &crate::eval::sizes::SizeRow| r.antennas as f64;
    let series = [
        Series { label: &table.label, points: table.rows.iter().map(|r| (x(r), r.mean_scalars)).collect() },
        Series { label: "complete CSIT", points: table.rows.iter().map(|r| (x(r), r.mean_complete_scalars)).collect() },
    ];
    svg_chart("CSIT allocation size", "total antennas", "scalars", &series)
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
