//! CSV, JSON and SVG emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// Reals use 17 significant digits in scientific notation.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// One CSV file: `<experiment>.csv` when `name` is empty, else `<experiment>-<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: String,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        passed: bool,
        value: f64,
        bound: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed,
            value,
            bound: bound.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

/// Everything an experiment produces.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub summary: Map<String, Value>,
    pub checks: Vec<Check>,
    pub plots: Vec<Plot>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        value: f64,
        bound: impl Into<String>,
    ) {
        self.checks.push(Check::new(name, passed, value, bound));
    }
}

fn file_name(experiment: &str, name: &str, ext: &str) -> String {
    if name.is_empty() {
        format!("{experiment}.{ext}")
    } else {
        format!("{experiment}-{name}.{ext}")
    }
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    let io = |e: csv::Error| {
        let e = match e.into_kind() {
            csv::ErrorKind::Io(e) => e,
            other => std::io::Error::other(format!("{other:?}")),
        };
        CliError::io(path, e)
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// JSON summary. Only `metadata` varies between identical runs.
pub fn summary_json(
    config: &ExperimentConfig,
    report: &Report,
    files: &[String],
    seconds: f64,
) -> Value {
    json!({
        "experiment": config.experiment.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "summary": report.summary,
        "checks": report.checks,
        "passed": report.passed(),
        "files": files,
        "metadata": { "wall_clock_seconds": seconds },
    })
}

fn scale(v: f64, log: bool) -> f64 {
    if log {
        v.log10()
    } else {
        v
    }
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Static line plot; points that cannot be shown on a log axis are dropped.
pub fn render_svg(plot: &Plot) -> String {
    let (w, h, left, right, top, bottom) = (640.0, 420.0, 70.0, 150.0, 40.0, 50.0);
    let pts: Vec<Vec<(f64, f64)>> = plot
        .series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| {
                    (!plot.log_x || *x > 0.0)
                        && (!plot.log_y || *y > 0.0)
                        && x.is_finite()
                        && y.is_finite()
                })
                .map(|&(x, y)| (scale(x, plot.log_x), scale(y, plot.log_y)))
                .collect()
        })
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 <= 0.0 {
        y1 = y0 + 1.0;
    }
    let pw = w - left - right;
    let ph = h - top - bottom;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;
    let label = |v: f64, log: bool| {
        if log {
            format!("1e{v:.1}")
        } else {
            format!("{v:.3e}")
        }
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(&plot.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            px(xv),
            top + ph + 16.0,
            label(xv, plot.log_x)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            left - 4.0,
            py(yv) + 4.0,
            label(yv, plot.log_y)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 10.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(&plot.y_label)
    );
    for (i, (series, p)) in plot.series.iter().zip(&pts).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = p
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if !path.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        let ly = top + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            w - right + 10.0,
            w - right + 30.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            w - right + 34.0,
            ly + 4.0,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Writes all tables, optional plots and the JSON summary; returns the written file names.
pub fn emit(
    config: &ExperimentConfig,
    report: &Report,
    seconds: f64,
) -> Result<Vec<PathBuf>, CliError> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let exp = config.experiment.name();
    let mut names = Vec::new();
    for t in &report.tables {
        let name = file_name(exp, &t.name, "csv");
        write_csv(&dir.join(&name), t)?;
        names.push(name);
    }
    if config.svg {
        for p in &report.plots {
            let name = file_name(exp, &p.name, "svg");
            let path = dir.join(&name);
            fs::write(&path, render_svg(p)).map_err(|e| CliError::io(&path, e))?;
            names.push(name);
        }
    }
    let json_name = file_name(exp, "", "json");
    let path = dir.join(&json_name);
    let value = summary_json(config, report, &names, seconds);
    let text = serde_json::to_string_pretty(&value).expect("serialisable") + "\n";
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    names.push(json_name);
    Ok(names.into_iter().map(|n| dir.join(n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_render_seventeen_digits() {
        assert_eq!(Cell::Real(0.1).render(), "1.0000000000000001e-1");
        assert_eq!(Cell::from(None::<f64>).render(), "");
        assert_eq!(Cell::from(7usize).render(), "7");
    }

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&path, &Table::new("", &["N", "min_gap"])).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "N,min_gap\n");
    }

    #[test]
    fn text_cells_are_quoted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new("", &["string", "x"]);
        t.push(vec![Cell::Text("a, \"b\"".into()), Cell::Real(1.0)]);
        write_csv(&path, &t).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "string,x\n\"a, \"\"b\"\"\",1.0000000000000000e0\n"
        );
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let p = Plot {
            name: "p".into(),
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            log_y: true,
            series: vec![Series {
                label: "s".into(),
                points: vec![(1.0, 1.0), (10.0, 0.01), (0.0, 1.0)],
            }],
        };
        let s = render_svg(&p);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt; b"));
        assert_eq!(s.matches("<polyline").count(), 1);
    }
}
