//! Concurrence traces: CSV storage and cross-method comparison.
//!
//! A trace file has the header `t,method,state,concurrence,stderr`, numbers
//! written with 17 significant digits and the `stderr` column left blank
//! for deterministic methods.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::operators::BellState;
use crate::scenario::Method;

pub const HEADER: [&str; 5] = ["t", "method", "state", "concurrence", "stderr"];

/// Slack on the upper bound `1 + 3·stderr` for rounding in Wootters'
/// formula.
const UPPER_SLACK: f64 = 1e-7;

/// Absolute slack added to every `3·stderr` band so that curves equal up to
/// rounding always agree.
pub const ROUNDING_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub method: Method,
    pub state: BellState,
    pub concurrence: f64,
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConcurrenceTrace {
    rows: Vec<TraceRow>,
}

fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

impl ConcurrenceTrace {
    /// Builds a trace, checking that every value is finite, that
    /// concurrences lie in `[0, 1 + 3·stderr]` and that time increases
    /// strictly within each `(method, state)` series.
    pub fn new(rows: Vec<TraceRow>) -> Result<Self> {
        let trace = Self { rows };
        trace.validate().map_err(|message| Error::Trace {
            path: "<memory>".into(),
            message,
        })?;
        Ok(trace)
    }

    fn validate(&self) -> Result<(), String> {
        let mut last: BTreeMap<(Method, BellState), f64> = BTreeMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            let se = r.stderr.unwrap_or(0.0);
            if !(r.t.is_finite() && r.concurrence.is_finite() && se.is_finite() && se >= 0.0) {
                return Err(format!("row {}: non-finite or negative entry", i + 1));
            }
            if r.concurrence < 0.0 || r.concurrence > 1.0 + 3.0 * se + UPPER_SLACK {
                return Err(format!(
                    "row {}: concurrence {} out of range",
                    i + 1,
                    r.concurrence
                ));
            }
            if let Some(prev) = last.insert((r.method, r.state), r.t) {
                if r.t <= prev {
                    return Err(format!(
                        "row {}: time {} does not increase within {}/{}",
                        i + 1,
                        r.t,
                        r.method,
                        r.state
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(HEADER).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                format_number(r.t),
                r.method.to_string(),
                r.state.to_string(),
                format_number(r.concurrence),
                r.stderr.map(format_number).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("trace output is ASCII")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads a trace; `source` names the input in error messages.
    pub fn read_csv<R: Read>(input: R, source: &str) -> Result<Self> {
        let bad = |message: String| Error::Trace {
            path: source.to_string(),
            message,
        };
        let mut reader = csv::Reader::from_reader(input);
        let header = reader.headers().map_err(|e| bad(e.to_string()))?;
        if header.iter().ne(HEADER) {
            return Err(bad(format!("expected header `{}`", HEADER.join(","))));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let line = i + 2;
            let num = |k: usize| -> Result<f64> {
                record[k]
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("line {line}: bad {} `{}`", HEADER[k], &record[k])))
            };
            let stderr = match record[4].trim() {
                "" => None,
                _ => Some(num(4)?),
            };
            rows.push(TraceRow {
                t: num(0)?,
                method: record[1]
                    .parse()
                    .map_err(|e: Error| bad(format!("line {line}: {e}")))?,
                state: record[2]
                    .parse()
                    .map_err(|e: Error| bad(format!("line {line}: {e}")))?,
                concurrence: num(3)?,
                stderr,
            });
        }
        let trace = Self { rows };
        trace.validate().map_err(bad)?;
        Ok(trace)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file), &path.display().to_string())
    }

    /// Rows grouped by `(state, method)` in file order.
    pub fn series(&self) -> BTreeMap<(BellState, Method), Vec<TraceRow>> {
        let mut out: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for r in &self.rows {
            out.entry((r.state, r.method)).or_default().push(*r);
        }
        out
    }
}

/// One `(trace, method, state)` curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub state: BellState,
    pub rows: Vec<TraceRow>,
}

impl Series {
    /// First grid time at which the concurrence is zero.
    pub fn sudden_death(&self) -> Option<f64> {
        self.rows.iter().find(|r| r.concurrence <= 0.0).map(|r| r.t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairStats {
    pub state: BellState,
    pub a: String,
    pub b: String,
    pub max_deviation: f64,
    /// Points with `|ΔC| ≤ 3√(s_a² + s_b²) + ROUNDING_FLOOR`, or `None`
    /// when neither curve carries a standard error.
    pub within_3se: Option<usize>,
    pub points: usize,
    /// Points with `|ΔC| > tol + 3√(s_a² + s_b²) + ROUNDING_FLOOR`.
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub tol: Option<f64>,
    pub series: Vec<Series>,
    pub pairs: Vec<PairStats>,
}

impl CompareReport {
    pub fn violations(&self) -> usize {
        self.pairs.iter().map(|p| p.violations).sum()
    }
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Compares every pair of curves that share a Bell state.
///
/// `traces` holds `(name, trace)`; with more than one trace each curve is
/// labelled `method@name`. Curves of the same state must share their time
/// grid.
pub fn compare(traces: &[(String, ConcurrenceTrace)], tol: Option<f64>) -> Result<CompareReport> {
    if let Some(t) = tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be non-negative, got {t}"
            )));
        }
    }
    let mut series = Vec::new();
    for (name, trace) in traces {
        for ((state, method), rows) in trace.series() {
            let label = if traces.len() > 1 {
                format!("{method}@{name}")
            } else {
                method.to_string()
            };
            series.push(Series { label, state, rows });
        }
    }
    series.sort_by_key(|s| s.state);

    let mut pairs = Vec::new();
    for (i, a) in series.iter().enumerate() {
        for b in series[i + 1..].iter().filter(|b| b.state == a.state) {
            let grids_match = a.rows.len() == b.rows.len()
                && a.rows.iter().zip(&b.rows).all(|(x, y)| same_time(x.t, y.t));
            if !grids_match {
                return Err(Error::GridMismatch(format!(
                    "{} and {} for {} use different time grids",
                    a.label, b.label, a.state
                )));
            }
            let mut stats = PairStats {
                state: a.state,
                a: a.label.clone(),
                b: b.label.clone(),
                max_deviation: 0.0,
                within_3se: None,
                points: a.rows.len(),
                violations: 0,
            };
            let stochastic = a.rows.iter().chain(&b.rows).any(|r| r.stderr.is_some());
            let mut within = 0;
            for (x, y) in a.rows.iter().zip(&b.rows) {
                let d = (x.concurrence - y.concurrence).abs();
                let band =
                    3.0 * x.stderr.unwrap_or(0.0).hypot(y.stderr.unwrap_or(0.0)) + ROUNDING_FLOOR;
                stats.max_deviation = stats.max_deviation.max(d);
                if d <= band {
                    within += 1;
                }
                if tol.is_some_and(|t| d > t + band) {
                    stats.violations += 1;
                }
            }
            if stochastic {
                stats.within_3se = Some(within);
            }
            pairs.push(stats);
        }
    }
    Ok(CompareReport { tol, series, pairs })
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut current = None;
        for s in &self.series {
            if current != Some(s.state) {
                writeln!(f, "state {}", s.state)?;
                current = Some(s.state);
                for p in self.pairs.iter().filter(|p| p.state == s.state) {
                    write!(
                        f,
                        "  {} vs {}: max |dC| = {:.3e}",
                        p.a, p.b, p.max_deviation
                    )?;
                    if let Some(w) = p.within_3se {
                        let pct = 100.0 * w as f64 / p.points as f64;
                        write!(f, ", within 3 stderr {w}/{} ({pct:.1}%)", p.points)?;
                    }
                    if self.tol.is_some() {
                        write!(f, ", violations {}", p.violations)?;
                    }
                    writeln!(f)?;
                }
            }
            match s.sudden_death() {
                Some(t) => writeln!(f, "  {}: sudden death at t = {t:.6e}", s.label)?,
                None => writeln!(f, "  {}: no sudden death on grid", s.label)?,
            }
        }
        if let Some(t) = self.tol {
            writeln!(f, "tolerance {t:e}: {} violation(s)", self.violations())?;
        }
        Ok(())
    }
}
