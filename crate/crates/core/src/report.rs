//! Text and CSV renderers for strategy comparisons and summary tables.
//!
//! Renderers only round for display; every number comes straight from the
//! computed outcome or summary row.

use std::fmt::Write as _;

use serde::Serialize;

use crate::indicators::IndicatorOptions;
use crate::ingest::{Dataset, Field};
use crate::round_half_up;
use crate::stats::{SummaryRow, QUANTILE_METHOD, SKEWNESS_METHOD};
use crate::strategy::{Comparison, RoundingPolicy, StrategyOutcome};
use crate::sz::SzCurve;

/// Placeholder for a statistic the data cannot support.
pub const ABSENT: &str = "–";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown format `{other}` (expected text or csv)")),
        }
    }
}

pub fn fmt_fixed(value: f64, decimals: usize) -> String {
    let v = round_half_up(value, decimals as u32);
    // avoid "-0.00"
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.decimals$}")
}

pub fn fmt_percent(rate: f64) -> String {
    format!("{} %", fmt_fixed(rate * 100.0, 2))
}

/// Up to `max` decimals with trailing zeros removed, keeping at least `min`.
pub fn fmt_trimmed(value: f64, min: usize, max: usize) -> String {
    let mut s = fmt_fixed(value, max);
    if let Some(dot) = s.find('.') {
        let keep = dot + 1 + min;
        while s.len() > keep && s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

type RowFn = fn(&StrategyOutcome) -> String;

fn scenario_rows() -> Vec<(&'static str, RowFn)> {
    vec![
        ("Cash revenues (CR)", |o| fmt_fixed(o.statement.cash_revenues, 2)),
        ("Fixed assets (FA)", |o| fmt_fixed(o.statement.fixed_assets, 2)),
        ("Current assets (CA)", |o| fmt_fixed(o.statement.current_assets, 2)),
        ("Total assets (TA)", |o| fmt_fixed(o.statement.total_assets, 2)),
        ("Accounts payable (AP)", |o| fmt_fixed(o.statement.accounts_payable, 2)),
        ("Capital invested (E + Dl + Ds)", |o| fmt_fixed(o.statement.capital_invested, 2)),
        ("Equity (E)", |o| fmt_fixed(o.statement.equity, 2)),
        ("Long-term debt (Dl)", |o| fmt_fixed(o.statement.long_term_debt, 2)),
        ("Short-term debt (Ds)", |o| fmt_fixed(o.statement.short_term_debt, 2)),
        ("EBIT share in CR", |o| fmt_fixed(o.ebit_share, 2)),
        ("EBIT", |o| fmt_fixed(o.statement.ebit, 2)),
        ("Free cash flow, periods 1..n", |o| fmt_fixed(o.statement.fcf_recurring, 2)),
        ("Initial free cash flow (FCF0)", |o| fmt_fixed(o.statement.fcf_initial, 2)),
        ("SZ risk premium correction", |o| fmt_trimmed(o.sz_premium, 1, 6)),
        ("Leveraged and corrected beta", |o| fmt_trimmed(o.corrected_beta, 4, 6)),
        ("Cost of equity (ke)", |o| fmt_percent(o.cost_of_equity)),
        ("Long-term debt rate (kdl)", |o| fmt_percent(o.long_debt_rate.value)),
        ("Short-term debt rate (kds)", |o| fmt_percent(o.short_debt_rate.value)),
        ("Cost of capital (CC)", |o| fmt_percent(o.cost_of_capital)),
        ("Economic result", |o| fmt_fixed(o.economic_result, 2)),
    ]
}

fn policy_label(p: RoundingPolicy) -> &'static str {
    match (p.round_statement_lines, p.round_leveraged_beta) {
        (false, false) => "full precision",
        (true, false) => "statement lines rounded to integers",
        (false, true) => "leveraged beta rounded to 2 decimals",
        (true, true) => "statement lines rounded to integers, leveraged beta rounded to 2 decimals",
    }
}

/// Grid of display strings: header row then one row per line item.
pub fn scenario_grid(cmp: &Comparison) -> Vec<Vec<String>> {
    let mut grid = Vec::new();
    let mut header = vec!["Liquidity investment strategy".to_string()];
    header.extend(cmp.outcomes.iter().map(|o| o.name.clone()));
    grid.push(header);
    for (label, f) in scenario_rows() {
        let mut row = vec![label.to_string()];
        row.extend(cmp.outcomes.iter().map(f));
        grid.push(row);
    }
    grid
}

pub fn render_scenario(cmp: &Comparison, curve: &SzCurve, policy: RoundingPolicy, format: Format) -> String {
    let grid = scenario_grid(cmp);
    match format {
        Format::Csv => to_csv(&grid),
        Format::Text => {
            let mut out = aligned(&grid);
            let _ = writeln!(out);
            let _ = writeln!(out, "SZ curve: {curve}");
            let _ = writeln!(out, "Rounding: {}", policy_label(policy));
            let _ = writeln!(out, "Highest economic result: {}", cmp.best_economic_result);
            let _ = writeln!(out, "Lowest cost of capital: {}", cmp.lowest_cost_of_capital);
            for o in cmp.outcomes.iter().filter(|o| o.has_degenerate_rate()) {
                let _ = writeln!(out, "warning: {} has a negative debt rate (spread exceeds cost of equity)", o.name);
            }
            out
        }
    }
}

fn to_csv(grid: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in grid {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

fn aligned(grid: &[Vec<String>]) -> String {
    let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| grid.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in grid {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.extend(std::iter::repeat_n(' ', pad));
            } else {
                line.push_str("  ");
                line.extend(std::iter::repeat_n(' ', pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupBy {
    #[default]
    None,
    Sector,
    Year,
}

impl std::str::FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "sector" => Ok(Self::Sector),
            "year" => Ok(Self::Year),
            other => Err(format!("unknown grouping `{other}` (expected sector, year or none)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRequest {
    pub group_by: GroupBy,
    pub metrics: Vec<Field>,
    pub trim_fraction: f64,
    pub winsor_fraction: f64,
    pub indicators: IndicatorOptions,
}

impl Default for StatsRequest {
    fn default() -> Self {
        Self {
            group_by: GroupBy::None,
            metrics: Field::LIQUIDITY_SET.to_vec(),
            trim_fraction: crate::stats::DEFAULT_TAIL_FRACTION,
            winsor_fraction: crate::stats::DEFAULT_TAIL_FRACTION,
            indicators: IndicatorOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub records: usize,
    pub rows: Vec<(String, SummaryRow)>,
}

/// One summary row per (group, metric), groups ordered by label. With sector
/// grouping a record contributes to every sector it lists.
pub fn summarize_dataset(ds: &Dataset, req: &StatsRequest) -> Result<Vec<GroupSummary>, crate::stats::StatsError> {
    for f in [req.trim_fraction, req.winsor_fraction] {
        if !(0.0..0.5).contains(&f) {
            return Err(crate::stats::StatsError::InvalidFraction(f));
        }
    }
    let groups: Vec<(String, Dataset)> = match req.group_by {
        GroupBy::None => vec![("all".to_string(), ds.clone())],
        GroupBy::Sector => ds.sector_labels().into_iter().map(|s| {
            let sub = ds.filter(Some(&s), None);
            (s, sub)
        }).collect(),
        GroupBy::Year => ds.years().into_iter().map(|y| (y.to_string(), ds.filter(None, Some(y)))).collect(),
    };
    Ok(groups
        .into_iter()
        .map(|(group, sub)| GroupSummary {
            group,
            records: sub.records.len(),
            rows: req
                .metrics
                .iter()
                .map(|m| {
                    let sample = sub.column(*m, &req.indicators);
                    (m.name().to_string(), sample.summarize(req.trim_fraction, req.winsor_fraction))
                })
                .collect(),
        })
        .collect())
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| fmt_fixed(v, 2)).unwrap_or_else(|| ABSENT.to_string())
}

pub fn render_stats(groups: &[GroupSummary], req: &StatsRequest, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut grid = vec![[
                "group",
                "metric",
                "size",
                "average",
                "sd",
                "median",
                "truncated_mean",
                "winsorized_mean",
                "skewness",
                "maximum",
                "minimum",
                "trim_fraction",
                "winsor_fraction",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()];
            for g in groups {
                for (metric, row) in &g.rows {
                    let mut line = vec![g.group.clone(), metric.clone(), row.size.to_string()];
                    line.extend(
                        row.statistics()
                            .iter()
                            .map(|v| v.map(|v| v.to_string()).unwrap_or_else(|| ABSENT.to_string())),
                    );
                    line.push(req.trim_fraction.to_string());
                    line.push(req.winsor_fraction.to_string());
                    grid.push(line);
                }
            }
            to_csv(&grid)
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "# truncated mean trims {} per tail; winsorized mean replaces {} per tail",
                req.trim_fraction, req.winsor_fraction
            );
            let _ = writeln!(out, "# quantiles: {QUANTILE_METHOD}; skewness: {SKEWNESS_METHOD}");
            let _ = writeln!(
                out,
                "# {}; periods use {} days over cash revenues",
                req.indicators.cl_definition.describe(),
                req.indicators.day_count
            );
            for g in groups {
                let _ = writeln!(out);
                let _ = writeln!(out, "Group: {} ({} records)", g.group, g.records);
                let mut grid = Vec::new();
                let mut header = vec![String::new()];
                header.extend(g.rows.iter().map(|(m, _)| m.clone()));
                grid.push(header);
                let mut size = vec![SummaryRow::LABELS[0].to_string()];
                size.extend(g.rows.iter().map(|(_, r)| r.size.to_string()));
                grid.push(size);
                for (i, label) in SummaryRow::LABELS[1..].iter().enumerate() {
                    let mut line = vec![label.to_string()];
                    line.extend(g.rows.iter().map(|(_, r)| cell(r.statistics()[i])));
                    grid.push(line);
                }
                out.push_str(&aligned(&grid));
            }
            out
        }
    }
}
