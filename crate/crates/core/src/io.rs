//! Text formats: accuracy and element CSVs, parameter metadata, the anchor
//! registry, leaderboards and the accuracy/xScore scatter plot.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{CorrelationReport, ElementMatrix};
use crate::error::{Error, Result};
use crate::matrix::{AccuracyMatrix, Anchor, AnchorTable, DatasetId, ModelId};
use crate::scoring::ScoreRecord;

/// A header line plus data rows, with the line number of every row.
struct Table {
    header: Vec<String>,
    rows: Vec<(u64, Vec<String>)>,
}

fn read_table(text: &str, first: &str) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => return Err(Error::parse(1, 1, "empty input: missing header row")),
    };
    let header: Vec<String> = header.iter().map(str::to_string).collect();
    if header.first().map(|h| h.trim()) != Some(first) {
        return Err(Error::parse(
            1,
            1,
            format!("first header cell must be `{first}`"),
        ));
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if rec.len() != header.len() {
            return Err(Error::parse(
                line,
                (rec.len().min(header.len()) + 1) as u64,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Table { header, rows })
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    Error::parse(line, 1, err.to_string())
}

fn parse_number(cell: &str, line: u64, column: usize) -> Result<f64> {
    let cell = cell.trim();
    let ok = !cell.is_empty()
        && cell
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    match f64::from_str(cell) {
        Ok(v) if ok => Ok(v),
        _ => Err(Error::parse(
            line,
            column as u64,
            format!("invalid number {cell:?} (dot-decimal expected)"),
        )),
    }
}

fn parse_header_ids(header: &[String]) -> Result<Vec<DatasetId>> {
    header[1..]
        .iter()
        .map(|h| DatasetId::new(h.as_str()))
        .collect()
}

/// Dataset header and `(model, accuracies)` rows in file order.
pub type AccuracyRows = (Vec<DatasetId>, Vec<(ModelId, Vec<f64>)>);

/// Model names and accuracy rows from the accuracy CSV layout, without any
/// matrix-level checks. Used for files of candidate models.
pub fn parse_accuracy_rows(text: &str) -> Result<AccuracyRows> {
    let table = read_table(text, "model")?;
    let datasets = parse_header_ids(&table.header)?;
    let mut rows = Vec::with_capacity(table.rows.len());
    for (line, fields) in table.rows {
        let model = ModelId::new(fields[0].as_str())?;
        let values = fields[1..]
            .iter()
            .enumerate()
            .map(|(j, cell)| parse_number(cell, line, j + 2))
            .collect::<Result<Vec<_>>>()?;
        rows.push((model, values));
    }
    Ok((datasets, rows))
}

/// Parses the accuracy CSV: header `model,<dataset>...`, one row per model.
pub fn parse_accuracy_table(text: &str) -> Result<AccuracyMatrix> {
    let (datasets, rows) = parse_accuracy_rows(text)?;
    let (models, values): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    AccuracyMatrix::from_rows(models, datasets, values)
}

/// Renders a matrix in the accuracy CSV layout using the shortest decimal
/// representation of each value.
pub fn emit_accuracy_table(matrix: &AccuracyMatrix) -> String {
    let mut out = String::from("model");
    for d in matrix.datasets() {
        write!(out, ",{d}").unwrap();
    }
    out.push('\n');
    for (i, m) in matrix.models().iter().enumerate() {
        out.push_str(m.as_str());
        for v in matrix.row(i) {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses `model,params_m` rows of parameter counts in millions.
pub fn parse_params_table(text: &str) -> Result<BTreeMap<ModelId, f64>> {
    let table = read_table(text, "model")?;
    if table.header.len() != 2 {
        return Err(Error::parse(1, 1, "expected header `model,params_m`"));
    }
    let mut out = BTreeMap::new();
    for (line, fields) in table.rows {
        let model = ModelId::new(fields[0].as_str())?;
        let params = parse_number(&fields[1], line, 2)?;
        if out.insert(model.clone(), params).is_some() {
            return Err(Error::Duplicate {
                kind: "model",
                name: model.to_string(),
            });
        }
    }
    Ok(out)
}

/// Parses the element CSV: header `model,<element>...`, cells `1` or `0`.
pub fn parse_element_table(text: &str) -> Result<ElementMatrix> {
    let table = read_table(text, "model")?;
    let elements: Vec<String> = table.header[1..].to_vec();
    let mut models = Vec::with_capacity(table.rows.len());
    let mut rows = Vec::with_capacity(table.rows.len());
    for (line, fields) in table.rows {
        models.push(ModelId::new(fields[0].as_str())?);
        let flags = fields[1..]
            .iter()
            .enumerate()
            .map(|(j, cell)| match cell.trim() {
                "1" => Ok(true),
                "0" => Ok(false),
                other => Err(Error::parse(
                    line,
                    (j + 2) as u64,
                    format!("element flag must be 0 or 1, found {other:?}"),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(flags);
    }
    ElementMatrix::new(models, elements, rows)
}

pub fn emit_element_table(elements: &ElementMatrix) -> String {
    let mut out = String::from("model");
    for e in elements.elements() {
        write!(out, ",{e}").unwrap();
    }
    out.push('\n');
    for (i, m) in elements.models().iter().enumerate() {
        out.push_str(m.as_str());
        for e in 0..elements.elements().len() {
            out.push_str(if elements.flag(i, e) { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnchorFile {
    source: String,
    #[serde(default, rename = "anchor")]
    anchors: Vec<Anchor>,
}

/// Renders the anchor registry as TOML: a top-level `source` and one
/// `[[anchor]]` table per dataset.
pub fn emit_anchor_file(anchors: &AnchorTable) -> String {
    let file = AnchorFile {
        source: anchors.source().to_string(),
        anchors: anchors.entries().to_vec(),
    };
    toml::to_string(&file).expect("anchor registry serializes")
}

pub fn parse_anchor_file(text: &str) -> Result<AnchorTable> {
    let file: AnchorFile = toml::from_str(text).map_err(|err| {
        let (line, column) = err
            .span()
            .map(|span| line_col(text, span.start))
            .unwrap_or((0, 0));
        Error::parse(line, column, err.message().to_string())
    })?;
    AnchorTable::new(file.anchors, file.source)
}

fn line_col(text: &str, offset: usize) -> (u64, u64) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() as u64 + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u64 + 1;
    (line, column)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Markdown,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?} (expected markdown or csv)")),
        }
    }
}

/// Fixed three-decimal rendering; negative zero prints as `0.000`.
pub fn fmt3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// Leaderboard of ranked records: rank, model, normalized cells per dataset,
/// then G, V and xScore, all with three fractional digits.
pub fn emit_leaderboard(records: &[ScoreRecord], datasets: &[DatasetId], format: Format) -> String {
    let mut rows: Vec<&ScoreRecord> = records.iter().collect();
    rows.sort_by_key(|r| r.rank);

    let mut header: Vec<String> = vec!["Rank".into(), "Model".into()];
    header.extend(datasets.iter().map(|d| d.to_string()));
    header.extend(["G".into(), "V".into(), "xScore".into()]);

    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = vec![r.rank.to_string(), r.model.to_string()];
            cells.extend(r.normalized_row.iter().map(|&x| fmt3(x)));
            cells.extend([fmt3(r.g), fmt3(r.v), fmt3(r.xscore)]);
            cells
        })
        .collect();

    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for cells in &body {
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        Format::Markdown => {
            writeln!(out, "| {} |", header.join(" | ")).unwrap();
            let align: Vec<&str> = (0..header.len())
                .map(|c| if c == 1 { ":---" } else { "---:" })
                .collect();
            writeln!(out, "|{}|", align.join("|")).unwrap();
            for cells in &body {
                writeln!(out, "| {} |", cells.join(" | ")).unwrap();
            }
        }
    }
    out
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Axis range padded by 5% on each side.
fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let span = if hi > lo { hi - lo } else { 1.0 };
    (lo - 0.05 * span, hi + 0.05 * span)
}

/// Standalone SVG scatter of accuracy (x) against xScore (y) with the
/// least-squares line. Output contains one `<circle>` per model and exactly
/// one `<line>` element, the fitted line.
pub fn emit_scatter(report: &CorrelationReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 60.0;

    let (x0, x1) = padded_range(report.points.iter().map(|p| p.0));
    let (y0, y1) = padded_range(report.points.iter().map(|p| p.1));
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">xScore vs {} accuracy (pearson r = {:.3}, spearman rho = {:.3})</text>"#,
        W / 2.0,
        escape_xml(report.dataset.as_str()),
        report.pearson_r,
        report.spearman_rho
    )
    .unwrap();
    writeln!(
        out,
        r#"<path class="axes" d="M {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2}" fill="none" stroke="black"/>"#,
        LEFT,
        TOP,
        LEFT,
        H - BOTTOM,
        W - RIGHT,
        H - BOTTOM
    )
    .unwrap();

    for t in 0..=4 {
        let xv = x0 + (x1 - x0) * t as f64 / 4.0;
        let yv = y0 + (y1 - y0) * t as f64 / 4.0;
        writeln!(
            out,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="middle">{:.1}</text>"#,
            px(xv),
            H - BOTTOM + 16.0,
            xv
        )
        .unwrap();
        writeln!(
            out,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="end">{:.2}</text>"#,
            LEFT - 6.0,
            py(yv) + 4.0,
            yv
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text class="xlabel" x="{:.2}" y="{:.2}" text-anchor="middle">{} accuracy (%)</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 16.0,
        escape_xml(report.dataset.as_str())
    )
    .unwrap();
    writeln!(
        out,
        r#"<text class="ylabel" x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">xScore</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0
    )
    .unwrap();

    let fit = |x: f64| report.ols_slope * x + report.ols_intercept;
    writeln!(
        out,
        r#"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="2"/>"#,
        px(x0),
        py(fit(x0)),
        px(x1),
        py(fit(x1))
    )
    .unwrap();

    for (acc, xs, model) in &report.points {
        writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"><title>{}: {:.2}%, xScore {:.3}</title></circle>"#,
            px(*acc),
            py(*xs),
            escape_xml(model.as_str()),
            acc,
            xs
        )
        .unwrap();
        writeln!(
            out,
            r#"<text class="label" x="{:.2}" y="{:.2}">{}</text>"#,
            px(*acc) + 6.0,
            py(*xs) - 6.0,
            escape_xml(model.as_str())
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
