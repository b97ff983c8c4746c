use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::value::RawValue;

use super::BenchRow;
use crate::error::{Error, Result};
use crate::linalg::save_matrix_market;
use crate::problems::{build_problem_unchecked, AssembledProblem, Example, ProblemSpec};
use crate::spectral::{verify_clustering, SpectrumReport};

/// Largest `2m²` accepted by [`spectrum_dump`].
pub const MAX_SPECTRUM_ORDER: usize = 2000;

const HEADER: [&str; 11] = [
    "example",
    "m",
    "method",
    "alpha",
    "converged",
    "outer_cycles",
    "total_inner",
    "final_relres",
    "wall_seconds",
    "factor_seconds",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format '{s}'"))),
        }
    }
}

impl fmt::Display for TableFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
        })
    }
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    example: Example,
    m: usize,
    method: &'a str,
    alpha: Option<Box<RawValue>>,
    converged: bool,
    outer_cycles: usize,
    total_inner: usize,
    final_relres: Option<Box<RawValue>>,
    wall_seconds: Box<RawValue>,
    factor_seconds: Box<RawValue>,
    error: Option<&'a str>,
}

fn raw(v: f64) -> Result<Option<Box<RawValue>>> {
    if !v.is_finite() {
        return Ok(None);
    }
    RawValue::from_string(num(v))
        .map(Some)
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Renders rows as CSV (fixed header) or as a JSON array of objects.
pub fn format_table(rows: &[BenchRow], format: TableFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no rows to emit".into()));
    }
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::InvalidArgument(e.to_string());
            w.write_record(HEADER).map_err(csv_err)?;
            for r in rows {
                w.write_record([
                    r.example.to_string(),
                    r.m.to_string(),
                    r.method.to_string(),
                    r.alpha.map(num).unwrap_or_default(),
                    r.converged.to_string(),
                    r.outer_cycles.to_string(),
                    r.total_inner.to_string(),
                    num(r.final_relres),
                    num(r.wall_seconds),
                    num(r.factor_seconds),
                    r.error.clone().unwrap_or_default(),
                ])
                .map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
        }
        TableFormat::Json => {
            let out: Vec<JsonRow> = rows
                .iter()
                .map(|r| {
                    Ok(JsonRow {
                        example: r.example,
                        m: r.m,
                        method: r.method.name(),
                        alpha: r.alpha.map(raw).transpose()?.flatten(),
                        converged: r.converged,
                        outer_cycles: r.outer_cycles,
                        total_inner: r.total_inner,
                        final_relres: raw(r.final_relres)?,
                        wall_seconds: raw(r.wall_seconds)?.unwrap_or_else(|| RawValue::from_string("0".into()).unwrap()),
                        factor_seconds: raw(r.factor_seconds)?.unwrap_or_else(|| RawValue::from_string("0".into()).unwrap()),
                        error: r.error.as_deref(),
                    })
                })
                .collect::<Result<_>>()?;
            let mut s = serde_json::to_string_pretty(&out).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Parses text produced by [`format_table`].
pub fn parse_table(text: &str, format: TableFormat) -> Result<Vec<BenchRow>> {
    match format {
        TableFormat::Csv => parse_csv(text),
        TableFormat::Json => {
            let values: Vec<serde_json::Value> =
                serde_json::from_str(text).map_err(|e| Error::Parse {
                    line: e.line(),
                    message: e.to_string(),
                })?;
            values
                .into_iter()
                .enumerate()
                .map(|(i, mut v)| {
                    if let Some(obj) = v.as_object_mut() {
                        if obj.get("final_relres").is_some_and(|x| x.is_null()) {
                            obj.insert("final_relres".into(), serde_json::json!(0.0));
                            let mut row: BenchRow = serde_json::from_value(v).map_err(|e| parse_err(i + 1, e))?;
                            row.final_relres = f64::NAN;
                            return Ok(row);
                        }
                    }
                    serde_json::from_value(v).map_err(|e| parse_err(i + 1, e))
                })
                .collect()
        }
    }
}

fn parse_err(line: usize, e: impl fmt::Display) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn parse_csv(text: &str) -> Result<Vec<BenchRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| parse_err(1, e))?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(parse_err(1, "unexpected header"));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, e))?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let f = |k: usize| field(k).parse::<f64>().map_err(|e| parse_err(line, format!("{}: {e}", HEADER[k])));
        let u = |k: usize| field(k).parse::<usize>().map_err(|e| parse_err(line, format!("{}: {e}", HEADER[k])));
        rows.push(BenchRow {
            example: field(0).parse().map_err(|e| parse_err(line, e))?,
            m: u(1)?,
            method: field(2).parse().map_err(|e| parse_err(line, e))?,
            alpha: if field(3).is_empty() { None } else { Some(f(3)?) },
            converged: field(4).parse().map_err(|e| parse_err(line, e))?,
            outer_cycles: u(5)?,
            total_inner: u(6)?,
            final_relres: f(7)?,
            wall_seconds: f(8)?,
            factor_seconds: f(9)?,
            error: if field(10).is_empty() { None } else { Some(field(10).to_string()) },
        });
    }
    Ok(rows)
}

/// Writes the rows to `path`.
pub fn emit_table(rows: &[BenchRow], format: TableFormat, path: &Path) -> Result<()> {
    let text = format_table(rows, format)?;
    fs::write(path, text).map_err(io_err(path))
}

/// Writes one CSV row per eigenvalue (`re, im, dist, a, b, c, r1, r2`)
/// and a trailing `# all_within=…` summary line.
pub fn write_spectrum_csv<W: Write>(report: &SpectrumReport, mut out: W) -> std::io::Result<()> {
    writeln!(out, "re,im,dist,a,b,c,r1,r2")?;
    let r2 = report.extremal_radius.map(num).unwrap_or_default();
    let r1 = num(report.stats_radius);
    for row in &report.rows {
        let (a, b, c) = match row.stats {
            Some(s) => (num(s.a), num(s.b), num(s.c)),
            None => Default::default(),
        };
        writeln!(
            out,
            "{},{},{},{a},{b},{c},{r1},{r2}",
            num(row.lambda.re),
            num(row.lambda.im),
            num(row.dist)
        )?;
    }
    writeln!(
        out,
        "# all_within={} unit_count={} max_dist={} alpha={}",
        report.all_within,
        report.unit_count,
        num(report.max_dist),
        num(report.alpha)
    )
}

/// Spectrum of the BLT-preconditioned matrix for a benchmark problem,
/// written as CSV to `path`.
pub fn spectrum_dump(example: Example, m: usize, alpha: f64, path: &Path) -> Result<SpectrumReport> {
    let order = 2 * m * m;
    if order > MAX_SPECTRUM_ORDER {
        return Err(Error::InvalidArgument(format!(
            "spectrum of order 2m² = {order} exceeds {MAX_SPECTRUM_ORDER}; use a smaller m"
        )));
    }
    let prob = build_problem_unchecked(&ProblemSpec::new(example, m))?;
    spectrum_dump_problem(&prob, alpha, path)
}

pub(crate) fn spectrum_dump_problem(prob: &AssembledProblem, alpha: f64, path: &Path) -> Result<SpectrumReport> {
    let report = verify_clustering(&prob.w, &prob.t, alpha, 1e-8)?;
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_spectrum_csv(&report, &mut w).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))?;
    Ok(report)
}

/// Writes `W.mtx`, `T.mtx` and `b.csv` (columns `re,im`) into `dir`.
pub fn dump_problem(example: Example, m: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    let prob = build_problem_unchecked(&ProblemSpec::new(example, m))?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let (wp, tp, bp) = (dir.join("W.mtx"), dir.join("T.mtx"), dir.join("b.csv"));
    save_matrix_market(&prob.w, &wp)?;
    save_matrix_market(&prob.t, &tp)?;
    let mut text = String::from("re,im\n");
    for k in 0..prob.n {
        text.push_str(&format!("{},{}\n", num(prob.b.re[k]), num(prob.b.im[k])));
    }
    fs::write(&bp, text).map_err(io_err(&bp))?;
    Ok(vec![wp, tp, bp])
}
