//! Deterministic text, CSV and JSON rendering of competition results.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::competition::{CompetitionReport, WeightSensitivityReport};
use crate::error::{Error, Result};
use crate::half::HalfInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "table" | "text-table" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidInput(format!("unknown format {other}"))),
        }
    }
}

/// Prints half-integers exactly and anything else with Rust's shortest
/// round-trip representation.
pub fn format_number(v: f64) -> String {
    match HalfInt::from_f64(v) {
        Some(h) => h.to_string(),
        None => v.to_string(),
    }
}

/// Left-aligned columns separated by two spaces, no trailing whitespace.
pub fn text_table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for r in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let mut line = String::new();
        for (i, cell) in r.iter().enumerate().take(cols) {
            if i + 1 == cols {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{:<width$}  ", cell, width = widths[i]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn to_csv(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Text or CSV rendering of a plain table. JSON callers serialize their own
/// report objects instead.
pub fn render_rows(header: &[String], rows: &[Vec<String>], format: Format) -> Result<String> {
    match format {
        Format::Text => Ok(text_table(header, rows)),
        Format::Csv => to_csv(header, rows),
        Format::Json => Err(Error::InvalidInput("render_rows has no JSON form".into())),
    }
}

/// Rank, algorithm, one column per group subtotal, then the weighted total.
pub fn render_competition(report: &CompetitionReport, format: Format) -> Result<String> {
    if report.algorithms.is_empty() || report.groups.is_empty() {
        return Err(Error::Empty("competition report has no algorithms or functions".into()));
    }
    if format == Format::Json {
        return to_json(report);
    }
    let mut header = vec!["Rank".to_string(), "Algorithm".to_string()];
    header.extend(report.groups.iter().cloned());
    header.push("Total".into());
    let text = format == Format::Text;
    if !text {
        header.push("Tied".into());
    }
    let rows: Vec<Vec<String>> = report
        .order()
        .into_iter()
        .map(|j| {
            let rank = if text && report.tied[j] {
                format!("{}=", report.ranks[j])
            } else {
                report.ranks[j].to_string()
            };
            let mut row = vec![rank, report.algorithms[j].clone()];
            row.extend(report.subtotals[j].iter().map(HalfInt::to_string));
            row.push(format_number(report.totals[j]));
            if !text {
                row.push(report.tied[j].to_string());
            }
            row
        })
        .collect();
    match format {
        Format::Text => {
            let mut out = text_table(&header, &rows);
            let weighted: Vec<String> = report
                .groups
                .iter()
                .zip(&report.weights)
                .filter(|(_, w)| **w != 1.0)
                .map(|(g, w)| format!("{g}={}", format_number(*w)))
                .collect();
            if !weighted.is_empty() {
                let _ = writeln!(out, "weights: {}", weighted.join(", "));
            }
            if report.tied.iter().any(|&t| t) {
                out.push_str("= tied total\n");
            }
            Ok(out)
        }
        _ => to_csv(&header, &rows),
    }
}

pub fn render_weight_sensitivity(report: &WeightSensitivityReport, format: Format) -> Result<String> {
    if report.algorithms.is_empty() {
        return Err(Error::Empty("weight sensitivity report has no algorithms".into()));
    }
    match format {
        Format::Json => to_json(report),
        Format::Csv => {
            let header: Vec<String> = ["weight", "first", "second"].map(String::from).to_vec();
            let rows: Vec<Vec<String>> = report
                .crossovers
                .iter()
                .map(|c| {
                    vec![
                        format!("{:.4}", c.weight),
                        report.algorithms[c.first].clone(),
                        report.algorithms[c.second].clone(),
                    ]
                })
                .collect();
            to_csv(&header, &rows)
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "crossovers in [{}, {}]:", format_number(report.weight_min), format_number(report.weight_max));
            if report.crossovers.is_empty() {
                out.push_str("  none\n");
            }
            for c in &report.crossovers {
                let _ = writeln!(
                    out,
                    "  w = {:.2}: {} (rank {}) and {} (rank {}) swap",
                    c.weight,
                    report.algorithms[c.first],
                    report.regime_rank_below(c.weight, c.first),
                    report.algorithms[c.second],
                    report.regime_rank_below(c.weight, c.second),
                );
            }
            match report.freeze_weight {
                Some(w) => {
                    let _ = writeln!(out, "ranks depend only on the weighted group above w = {w:.2}");
                }
                None => out.push_str("no pair of algorithms ever swaps\n"),
            }
            out.push('\n');
            let header: Vec<String> = ["From", "To", "Order (unweighted ranks)"].map(String::from).to_vec();
            let rows: Vec<Vec<String>> = report
                .regimes
                .iter()
                .map(|r| {
                    vec![
                        format!("{:.2}", r.from),
                        format!("{:.2}", r.to),
                        r.base_ranks_in_order.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                    ]
                })
                .collect();
            out.push_str(&text_table(&header, &rows));
            Ok(out)
        }
    }
}

impl WeightSensitivityReport {
    /// Rank of algorithm `j` in the regime ending at `weight`.
    fn regime_rank_below(&self, weight: f64, j: usize) -> usize {
        self.regimes
            .iter()
            .find(|r| r.to >= weight)
            .map_or(self.unweighted_ranks[j], |r| r.ranks[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(format_number(186378.5), "186378.5");
        assert_eq!(format_number(55075.0), "55075");
        assert_eq!(format_number(0.125), "0.125");
    }

    #[test]
    fn table_alignment() {
        let t = text_table(&["a".into(), "bb".into()], &[vec!["long".into(), "x".into()]]);
        assert_eq!(t, "a     bb\nlong  x\n");
    }

    #[test]
    fn empty_report_errors() {
        let r = CompetitionReport::from_subtotals(vec!["a".into()], vec![], vec![vec![]], &[]).unwrap();
        assert!(render_competition(&r, Format::Text).is_err());
        assert!("yaml".parse::<Format>().is_err());
    }
}
