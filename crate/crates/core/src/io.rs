//! File formats: numeric CSV input, discrepancy CSV and SVG output, the
//! versioned JSON result document and the textual null-distribution syntax.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::depth::DepthValue;
use crate::discrepancy::DddRecord;
use crate::distributions::{identity, ReferenceDistribution};
use crate::error::{Error, Result};
use crate::hypothesis::TestResult;
use crate::simulation::PowerEstimate;

pub const SCHEMA_VERSION: &str = "1";

/// Reads a rectangular numeric CSV file. Lines are numbered from 1 in error
/// messages, counting the header line when there is one.
pub fn read_csv(path: impl AsRef<Path>, has_header: bool) -> Result<DataMatrix> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_csv(&text, has_header)
}

/// [`read_csv`] on in-memory text.
pub fn parse_csv(text: &str, has_header: bool) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut labels = None;
    let mut width = None;
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            column: None,
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if has_header && labels.is_none() {
            labels = Some(record.iter().map(str::to_owned).collect::<Vec<_>>());
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Parse {
                line,
                column: None,
                message: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                column: Some(j + 1),
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    column: Some(j + 1),
                    message: format!("'{cell}' is not finite"),
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::InsufficientData("no data rows".into()));
    }
    let m = DataMatrix::new(rows, width.unwrap_or(0), values)?;
    match labels {
        Some(l) => m.with_labels(l),
        None => Ok(m),
    }
}

/// Writes a matrix as CSV, with its labels as the header when it has them.
pub fn write_matrix_csv(x: &DataMatrix) -> Vec<u8> {
    let mut out = String::new();
    if let Some(labels) = x.labels() {
        let _ = writeln!(out, "{}", labels.join(","));
    }
    for row in x.rows() {
        let cells: Vec<String> = row.iter().map(|v| fmt_real(*v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out.into_bytes()
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Discrepancy records as CSV: `index,ddd,band,outside,x1,..,xd`.
pub fn write_ddd_csv(records: &[DddRecord]) -> Vec<u8> {
    let d = records.first().map_or(0, |r| r.point.len());
    let mut out = String::from("index,ddd,band,outside");
    for j in 1..=d {
        let _ = write!(out, ",x{j}");
    }
    out.push('\n');
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{}",
            r.index,
            fmt_real(r.ddd),
            fmt_real(r.band_halfwidth),
            u8::from(r.outside)
        );
        for v in &r.point {
            let _ = write!(out, ",{}", fmt_real(*v));
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// One parsed row of [`write_ddd_csv`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct DddRow {
    pub index: usize,
    pub ddd: f64,
    pub band: f64,
    pub outside: bool,
    pub point: Vec<f64>,
}

pub fn parse_ddd_csv(text: &str) -> Result<Vec<DddRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.starts_with("index,ddd,band,outside") => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: None,
                message: "missing discrepancy header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let bad = |column: usize, message: &str| Error::Parse {
                line: i + 1,
                column: Some(column),
                message: message.into(),
            };
            let cells: Vec<&str> = l.split(',').collect();
            if cells.len() < 4 {
                return Err(bad(cells.len(), "too few fields"));
            }
            let real = |j: usize| {
                cells[j]
                    .parse::<f64>()
                    .map_err(|_| bad(j + 1, "not a number"))
            };
            Ok(DddRow {
                index: cells[0].parse().map_err(|_| bad(1, "not an index"))?,
                ddd: real(1)?,
                band: real(2)?,
                outside: match cells[3] {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad(4, "flag must be 0 or 1")),
                },
                point: (4..cells.len()).map(real).collect::<Result<_>>()?,
            })
        })
        .collect()
}

/// A scatter plot of `(index, ddd)` with the zero line, dashed `+-band`
/// curves, points outside their band in red and the rest in black.
pub fn write_ddd_svg(records: &[DddRecord], width: u32, height: u32) -> Result<Vec<u8>> {
    if width < 100 || height < 100 {
        return Err(Error::Parameter(format!(
            "canvas must be at least 100x100, got {width}x{height}"
        )));
    }
    let (w, h) = (f64::from(width), f64::from(height));
    let margin = 40.0;
    let mut sorted: Vec<&DddRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.index);
    let max_index = sorted.last().map_or(1, |r| r.index.max(1)) as f64;
    let extent = sorted
        .iter()
        .map(|r| r.ddd.abs().max(r.band_halfwidth))
        .fold(0.0f64, f64::max)
        .max(1e-3)
        * 1.1;
    let px = |i: usize| margin + (w - 2.0 * margin) * i as f64 / max_index;
    let py = |v: f64| h / 2.0 - (h / 2.0 - margin) * v / extent;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{margin}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-width="1"/>"#,
        py(0.0),
        w - margin,
        py(0.0)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{:.3}" stroke="gray" stroke-width="1"/>"#,
        h - margin
    );
    let _ = writeln!(
        s,
        r#"<text x="{margin}" y="{:.3}" font-size="10" font-family="sans-serif">{:.3}</text>"#,
        margin - 4.0,
        extent
    );
    if !sorted.is_empty() {
        for sign in [1.0, -1.0] {
            let pts: Vec<String> = sorted
                .iter()
                .map(|r| format!("{:.3},{:.3}", px(r.index), py(sign * r.band_halfwidth)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="gray" stroke-dasharray="4 3" stroke-width="1"/>"#,
                pts.join(" ")
            );
        }
    }
    for r in &sorted {
        let colour = if r.outside { "red" } else { "black" };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="2.5" fill="{colour}"/>"#,
            px(r.index),
            py(r.ddd)
        );
    }
    s.push_str("</svg>\n");
    Ok(s.into_bytes())
}

/// Depth of one query point, as written by the `depth` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRecord {
    pub index: usize,
    pub point: Vec<f64>,
    pub depth: DepthValue,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Depth(Vec<DepthRecord>),
    Ddd(Vec<DddRecord>),
    Tests(Vec<TestResult>),
    Power(Vec<PowerEstimate>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

/// Everything a command produced, with enough context to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: String,
    pub command: Vec<String>,
    pub seed: u64,
    pub payload: Payload,
    pub timing: Timing,
}

impl ResultDocument {
    pub fn new(command: Vec<String>, seed: u64, payload: Payload, elapsed_seconds: f64) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION.into(),
            command,
            seed,
            payload,
            timing: Timing { elapsed_seconds },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ResultDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: Some(e.column()),
            message: e.to_string(),
        })?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Parameter(format!(
                "unsupported schema version '{}'",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Parses a null-distribution description for dimension `d`.
///
/// ```text
/// standard-normal
/// normal:<mean>:<cov>          comma-separated, covariance row-major
/// t:<dof>                      location 0, scatter I
/// cauchy
/// laplace
/// skew-normal:<lambda>         d = 3, correlation I
/// mixture:<w>@<spec>;<w>@<spec>;...
/// ```
pub fn parse_null_spec(text: &str, d: usize) -> Result<ReferenceDistribution> {
    let text = text.trim();
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let reals = |s: &str| -> Result<Vec<f64>> {
        s.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parameter(format!("'{v}' is not a number in '{text}'")))
            })
            .collect()
    };
    let no_args = |dist: Result<ReferenceDistribution>| {
        if rest.is_empty() {
            dist
        } else {
            Err(Error::Parameter(format!("'{head}' takes no arguments")))
        }
    };
    match head {
        "standard-normal" => no_args(ReferenceDistribution::standard_normal(d)),
        "cauchy" => no_args(ReferenceDistribution::cauchy(vec![0.0; d], identity(d))),
        "laplace" => no_args(ReferenceDistribution::laplace(d)),
        "normal" => {
            let (mean, cov) = rest.split_once(':').ok_or_else(|| {
                Error::Parameter("normal needs normal:<mean>:<covariance>".into())
            })?;
            let (mean, cov) = (reals(mean)?, reals(cov)?);
            if mean.len() != d {
                return Err(Error::Shape(format!(
                    "null mean has {} entries, data have d = {d}",
                    mean.len()
                )));
            }
            ReferenceDistribution::normal(mean, cov)
        }
        "t" => {
            let dof = reals(rest)?;
            match dof[..] {
                [dof] => ReferenceDistribution::student_t(vec![0.0; d], identity(d), dof),
                _ => Err(Error::Parameter("t needs t:<dof>".into())),
            }
        }
        "skew-normal" => {
            if d != 3 {
                return Err(Error::UnsupportedDimension(d));
            }
            ReferenceDistribution::skew_normal(reals(rest)?, identity(3))
        }
        "mixture" => {
            let mut weights = Vec::new();
            let mut parts = Vec::new();
            for item in rest.split(';').filter(|s| !s.trim().is_empty()) {
                let (w, spec) = item.split_once('@').ok_or_else(|| {
                    Error::Parameter(format!("mixture component '{item}' needs <w>@<spec>"))
                })?;
                weights.push(reals(w)?[0]);
                parts.push(parse_null_spec(spec, d)?);
            }
            ReferenceDistribution::mixture(weights, parts)
        }
        _ => Err(Error::Parameter(format!(
            "unknown null distribution '{text}'"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_examples() {
        let m = parse_csv("a,b\n1,2\n3,4", true).unwrap();
        assert_eq!(m.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.labels().unwrap(), &["a".to_string(), "b".to_string()]);
        match parse_csv("1,2\n3", false) {
            Err(Error::Parse {
                line: 2,
                column: None,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
        match parse_csv("1,x", false) {
            Err(Error::Parse {
                line: 1,
                column: Some(2),
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_csv("1,NaN", false),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_csv("1,inf", false),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_csv("a,b\n", true),
            Err(Error::InsufficientData(_))
        ));
    }

    fn record(index: usize, ddd: f64, band: f64) -> DddRecord {
        DddRecord {
            index,
            point: vec![0.1, -2.0 / 3.0],
            depth_a: DepthValue::new(1, 3),
            depth_b: DepthValue::new(0, 3),
            ddd,
            band_halfwidth: band,
            outside: ddd.abs() > band,
        }
    }

    #[test]
    fn ddd_csv() {
        assert_eq!(write_ddd_csv(&[]), b"index,ddd,band,outside\n");
        let r = record(4, 1.0 / 3.0, 0.1);
        let text = String::from_utf8(write_ddd_csv(std::slice::from_ref(&r))).unwrap();
        let back = parse_ddd_csv(&text).unwrap();
        assert_eq!(
            back,
            vec![DddRow {
                index: 4,
                ddd: r.ddd,
                band: 0.1,
                outside: true,
                point: r.point.clone(),
            }]
        );
        assert!(text.lines().nth(1).unwrap().split(',').nth(3) == Some("1"));
    }

    #[test]
    fn svg_marks() {
        let count = |b: &[u8]| String::from_utf8_lossy(b).matches(r#"fill="red""#).count();
        let empty = write_ddd_svg(&[], 200, 150).unwrap();
        assert!(String::from_utf8_lossy(&empty).contains("<svg"));
        assert_eq!(count(&empty), 0);
        let inside = [record(0, 0.01, 0.1), record(1, -0.02, 0.1)];
        assert_eq!(count(&write_ddd_svg(&inside, 300, 300).unwrap()), 0);
        let one = [record(0, 0.01, 0.1), record(1, 0.5, 0.1)];
        assert_eq!(count(&write_ddd_svg(&one, 300, 300).unwrap()), 1);
        assert!(write_ddd_svg(&one, 99, 300).is_err());
    }

    #[test]
    fn null_specs() {
        assert_eq!(
            parse_null_spec("standard-normal", 2).unwrap(),
            ReferenceDistribution::standard_normal(2).unwrap()
        );
        assert_eq!(
            parse_null_spec("cauchy", 2).unwrap(),
            parse_null_spec("t:1", 2).unwrap()
        );
        let n = parse_null_spec("normal:1,2:2,0.5,0.5,1", 2).unwrap();
        assert_eq!(n.dim(), 2);
        let mix = parse_null_spec("mixture:0.8@standard-normal;0.2@normal:5,5:1,0,0,1", 2).unwrap();
        assert_eq!(mix.dim(), 2);
        assert!(parse_null_spec("laplace", 3).is_ok());
        assert!(parse_null_spec("skew-normal:0.9,0.9,0.9", 3).is_ok());
        assert!(parse_null_spec("gamma", 2).is_err());
        assert!(parse_null_spec("normal:0:1", 2).is_err());
        assert!(parse_null_spec("cauchy:3", 2).is_err());
    }

    #[test]
    fn document_round_trip() {
        let doc = ResultDocument::new(
            vec!["ddd".into(), "depth".into()],
            7,
            Payload::Depth(vec![DepthRecord {
                index: 0,
                point: vec![0.1, 1e-300],
                depth: DepthValue::new(1, 3),
                value: 1.0 / 3.0,
            }]),
            0.25,
        );
        let back = ResultDocument::from_json(&doc.to_json().unwrap()).unwrap();
        assert_eq!(back, doc);
    }
}
