use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{Category, TestKind, TestOutcome};

use super::ReportError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    /// Aligned text; Holm-significant cells are wrapped in brackets.
    Plain,
    /// LaTeX `tabular` body with `\textbf` and `\textsuperscript` markers.
    Latex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableStyle {
    pub format: TableFormat,
    /// Adjusted p-values at or below this level are shown in bold.
    pub alpha: f64,
}

impl Default for TableStyle {
    fn default() -> Self {
        TableStyle {
            format: TableFormat::Plain,
            alpha: 0.05,
        }
    }
}

/// Rounds half away from zero to one decimal.
pub fn round_pp(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// `+27.8pp`, `-1.0pp`; values that round to zero print as `+0.0pp`.
pub fn format_pp(diff: f64) -> String {
    let r = round_pp(diff);
    if r == 0.0 {
        "+0.0pp".to_string()
    } else {
        format!("{r:+.1}pp")
    }
}

/// `**` below 0.01, `*` below 0.05.
pub fn significance_marker(p_adjusted: Option<f64>) -> &'static str {
    match p_adjusted {
        Some(p) if p < 0.01 => "**",
        Some(p) if p < 0.05 => "*",
        _ => "",
    }
}

/// One rendered cell.
pub fn format_cell(outcome: &TestOutcome, style: TableStyle) -> String {
    if outcome.test_kind == TestKind::Descriptive {
        return "---".to_string();
    }
    let pp = format_pp(outcome.diff_pp);
    let marker = significance_marker(outcome.p_adjusted);
    let bold = outcome.p_adjusted.is_some_and(|p| p <= style.alpha);
    match style.format {
        TableFormat::Plain => {
            let cell = format!("{pp}{marker}");
            if bold {
                format!("[{cell}]")
            } else {
                cell
            }
        }
        TableFormat::Latex => {
            let pp = pp.replace('%', "\\%");
            let cell = if marker.is_empty() {
                pp
            } else {
                format!("{pp}\\textsuperscript{{{marker}}}")
            };
            if bold {
                format!("\\textbf{{{cell}}}")
            } else {
                cell
            }
        }
    }
}

fn row_label(o: &TestOutcome) -> String {
    if o.stratum == super::ALL_STRATA {
        o.column.clone()
    } else {
        format!("{} / {}", o.column, o.stratum)
    }
}

/// Renders outcomes as a table with one row per column/stratum and one
/// column per category of the shared scheme.
pub fn format_table(outcomes: &[TestOutcome], style: TableStyle) -> Result<String, ReportError> {
    let Some(first) = outcomes.first() else {
        return Ok(String::new());
    };
    let scheme = first.scheme;
    if let Some(o) = outcomes.iter().find(|o| o.scheme != scheme) {
        return Err(ReportError::MixedSchemes(scheme, o.scheme));
    }
    let cats = scheme.categories();
    let mut rows: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(String, Category), String> = BTreeMap::new();
    for o in outcomes {
        let label = row_label(o);
        if !rows.contains(&label) {
            rows.push(label.clone());
        }
        if cells
            .insert((label.clone(), o.category), format_cell(o, style))
            .is_some()
        {
            return Err(ReportError::DuplicateCell(label, o.category));
        }
    }
    let grid: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut line = vec![r.clone()];
            line.extend(
                cats.iter()
                    .map(|c| cells.get(&(r.clone(), *c)).cloned().unwrap_or_else(|| "".into())),
            );
            line
        })
        .collect();
    let mut header = vec![String::new()];
    header.extend(cats.iter().map(|c| c.label().to_string()));

    let mut out = String::new();
    match style.format {
        TableFormat::Plain => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
            for line in &grid {
                for (w, cell) in widths.iter_mut().zip(line) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let render = |line: &[String], out: &mut String| {
                let parts: Vec<String> = line
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(
                        |(i, (c, w))| {
                            if i == 0 {
                                format!("{c:<w$}")
                            } else {
                                format!("{c:>w$}")
                            }
                        },
                    )
                    .collect();
                let _ = writeln!(out, "{}", parts.join("  ").trim_end());
            };
            render(&header, &mut out);
            let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            let _ = writeln!(out, "{}", "-".repeat(total));
            for line in &grid {
                render(line, &mut out);
            }
        }
        TableFormat::Latex => {
            let _ = writeln!(out, "\\begin{{tabular}}{{l{}}}", "r".repeat(cats.len()));
            let _ = writeln!(out, "\\hline");
            let _ = writeln!(out, "{} \\\\", header.join(" & "));
            let _ = writeln!(out, "\\hline");
            for line in &grid {
                let _ = writeln!(out, "{} \\\\", line.join(" & "));
            }
            let _ = writeln!(out, "\\hline");
            let _ = writeln!(out, "\\end{{tabular}}");
        }
    }
    Ok(out)
}
