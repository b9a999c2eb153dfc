//! Loading and slicing organization-year records from CSV.
//!
//! The header is mandatory and matched by name, in any order. Empty cells are
//! absent values. A row that cannot be parsed is rejected on its own and the
//! rest of the file still loads; only an unreadable file or a header missing
//! required columns fails the whole load.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::indicators::{compute_indicators, IndicatorOptions, OrgRecord};
use crate::stats::Sample;

pub const COLUMNS: [&str; 15] = [
    "org_id",
    "year",
    "sectors",
    "cash_revenues",
    "total_assets",
    "fixed_assets",
    "current_assets",
    "inventories",
    "accounts_receivable",
    "cash_equivalents",
    "fund_capital",
    "long_term_debt",
    "short_term_debt",
    "accounts_payable",
    "net_result",
];

const SECTOR_SEPARATOR: char = ';';
const YEAR_RANGE: std::ops::RangeInclusive<i64> = 1900..=2100;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse CSV header: {0}")]
    Header(#[source] csv::Error),
    #[error("header is missing required column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("cannot write CSV: {0}")]
    Write(#[from] csv::Error),
}

impl IngestError {
    /// True for failures of the file system rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Self::Io { .. } | Self::Write(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RejectReason {
    Malformed { detail: String },
    FieldCount { expected: usize, found: usize },
    EmptyKey { column: &'static str },
    NumericParse { column: &'static str, value: String },
    /// A comma used as decimal separator, e.g. `12,5`.
    CommaDecimal { column: &'static str, value: String },
    NonFinite { column: &'static str },
    YearOutOfRange { year: i64 },
    DuplicateKey { org_id: String, year: i32 },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Malformed { detail } => write!(f, "malformed row: {detail}"),
            Self::FieldCount { expected, found } => write!(f, "expected {expected} fields, found {found}"),
            Self::EmptyKey { column } => write!(f, "{column} is empty"),
            Self::NumericParse { column, value } => write!(f, "{column}: `{value}` is not a number"),
            Self::CommaDecimal { column, value } => {
                write!(f, "{column}: `{value}` uses a comma decimal separator; use `.`")
            }
            Self::NonFinite { column } => write!(f, "{column} is not finite"),
            Self::YearOutOfRange { year } => write!(f, "year {year} outside 1900..=2100"),
            Self::DuplicateKey { org_id, year } => write!(f, "duplicate record for {org_id} in {year}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reject {
    /// 1-based data row number (the header is row 0).
    pub row: usize,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Provenance {
    pub source: String,
    pub total_rows: usize,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Dataset {
    pub records: Vec<OrgRecord>,
    pub provenance: Provenance,
    pub rejects: Vec<Reject>,
    pub warnings: Vec<String>,
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset, IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    Dataset::from_reader(file, path.display().to_string())
}

fn parse_amount(column: &'static str, raw: &str) -> Result<Option<f64>, RejectReason> {
    if raw.is_empty() {
        return Ok(None);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Err(RejectReason::NonFinite { column }),
        Err(_) if raw.contains(',') && raw.replacen(',', ".", 1).parse::<f64>().is_ok() => {
            Err(RejectReason::CommaDecimal { column, value: raw.to_string() })
        }
        Err(_) => Err(RejectReason::NumericParse { column, value: raw.to_string() }),
    }
}

fn parse_row(cells: &[&str; 15]) -> Result<OrgRecord, RejectReason> {
    let org_id = cells[0];
    if org_id.is_empty() {
        return Err(RejectReason::EmptyKey { column: "org_id" });
    }
    if cells[1].is_empty() {
        return Err(RejectReason::EmptyKey { column: "year" });
    }
    let year: i64 = cells[1]
        .parse()
        .map_err(|_| RejectReason::NumericParse { column: "year", value: cells[1].to_string() })?;
    if !YEAR_RANGE.contains(&year) {
        return Err(RejectReason::YearOutOfRange { year });
    }
    let sectors: BTreeSet<String> = cells[2]
        .split(SECTOR_SEPARATOR)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect();
    let mut amounts = [None; 12];
    for (i, slot) in amounts.iter_mut().enumerate() {
        *slot = parse_amount(COLUMNS[i + 3], cells[i + 3])?;
    }
    let [cash_revenues, total_assets, fixed_assets, current_assets, inventories, accounts_receivable, cash_equivalents, fund_capital, long_term_debt, short_term_debt, accounts_payable, net_result] =
        amounts;
    Ok(OrgRecord {
        org_id: org_id.to_string(),
        year: year as i32,
        sectors,
        cash_revenues,
        total_assets,
        fixed_assets,
        current_assets,
        inventories,
        accounts_receivable,
        cash_equivalents,
        fund_capital,
        long_term_debt,
        short_term_debt,
        accounts_payable,
        net_result,
    })
}

impl Dataset {
    pub fn from_reader(reader: impl Read, source: impl Into<String>) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers().map_err(IngestError::Header)?.clone();
        let names: Vec<&str> = header.iter().collect();

        let missing: Vec<String> =
            COLUMNS.iter().filter(|c| !names.contains(c)).map(|c| c.to_string()).collect();
        if !missing.is_empty() {
            return Err(IngestError::MissingColumns(missing));
        }
        let positions: Vec<usize> =
            COLUMNS.iter().map(|c| names.iter().position(|n| n == c).unwrap()).collect();
        let warnings = names
            .iter()
            .filter(|n| !COLUMNS.contains(n))
            .map(|n| format!("ignoring unknown column `{n}`"))
            .collect();

        let mut ds = Dataset {
            provenance: Provenance { source: source.into(), ..Default::default() },
            warnings,
            ..Default::default()
        };
        let mut seen: HashSet<(String, i32)> = HashSet::new();
        for (idx, row) in rdr.records().enumerate() {
            let row_no = idx + 1;
            ds.provenance.total_rows += 1;
            let parsed = match row {
                Err(e) => Err(RejectReason::Malformed { detail: e.to_string() }),
                Ok(r) if r.len() != names.len() => {
                    Err(RejectReason::FieldCount { expected: names.len(), found: r.len() })
                }
                Ok(r) => {
                    let cells: [&str; 15] = std::array::from_fn(|i| &r[positions[i]]);
                    parse_row(&cells)
                }
            };
            let parsed = parsed.and_then(|rec| {
                if seen.insert((rec.org_id.clone(), rec.year)) {
                    Ok(rec)
                } else {
                    Err(RejectReason::DuplicateKey { org_id: rec.org_id, year: rec.year })
                }
            });
            match parsed {
                Ok(rec) => ds.records.push(rec),
                Err(reason) => ds.rejects.push(Reject { row: row_no, reason }),
            }
        }
        ds.provenance.accepted = ds.records.len();
        ds.provenance.rejected = ds.rejects.len();
        Ok(ds)
    }

    /// Writes the accepted records in the canonical column order.
    pub fn write_csv(&self, writer: impl Write) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(COLUMNS)?;
        for r in &self.records {
            let mut row = vec![
                r.org_id.clone(),
                r.year.to_string(),
                r.sectors.iter().cloned().collect::<Vec<_>>().join(";"),
            ];
            row.extend(r.amounts().iter().map(|v| v.map(|v| v.to_string()).unwrap_or_default()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| IngestError::Write(e.into()))?;
        Ok(())
    }

    /// Records that belong to `sector` (if given) and fall in `year` (if given).
    /// A record with several sectors passes several different sector filters.
    pub fn filter(&self, sector: Option<&str>, year: Option<i32>) -> Dataset {
        let records = self
            .records
            .iter()
            .filter(|r| sector.is_none_or(|s| r.sectors.contains(s)))
            .filter(|r| year.is_none_or(|y| r.year == y))
            .cloned()
            .collect();
        Dataset { records, ..self.clone() }
    }

    pub fn sector_labels(&self) -> BTreeSet<String> {
        self.records.iter().flat_map(|r| r.sectors.iter().cloned()).collect()
    }

    pub fn years(&self) -> BTreeSet<i32> {
        self.records.iter().map(|r| r.year).collect()
    }

    /// Present values of `field` as a sample; absent values are skipped, so the
    /// sample size can differ between columns of the same dataset.
    pub fn column(&self, field: Field, opts: &IndicatorOptions) -> Sample {
        let values: Vec<f64> = self.records.iter().filter_map(|r| field.value(r, opts)).collect();
        // present values are finite by construction (loader rejects non-finite,
        // indicators divide by nonzero finite denominators) except on overflow
        Sample::new(values.into_iter().filter(|v| v.is_finite()).collect()).unwrap_or_default()
    }
}

/// A column of a dataset: either a raw amount or a derived indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    CashRevenues,
    TotalAssets,
    FixedAssets,
    CurrentAssets,
    Inventories,
    AccountsReceivable,
    CashEquivalents,
    FundCapital,
    LongTermDebt,
    ShortTermDebt,
    AccountsPayable,
    NetResult,
    CurrentRatio,
    QuickRatio,
    CashRatio,
    ReceivablesPeriod,
    PayablesPeriod,
    InventoryPeriod,
    OperatingCycle,
    CashCycle,
    Roa,
    Roe,
}

impl Field {
    pub const ALL: [Field; 22] = [
        Field::CashRevenues,
        Field::TotalAssets,
        Field::FixedAssets,
        Field::CurrentAssets,
        Field::Inventories,
        Field::AccountsReceivable,
        Field::CashEquivalents,
        Field::FundCapital,
        Field::LongTermDebt,
        Field::ShortTermDebt,
        Field::AccountsPayable,
        Field::NetResult,
        Field::CurrentRatio,
        Field::QuickRatio,
        Field::CashRatio,
        Field::ReceivablesPeriod,
        Field::PayablesPeriod,
        Field::InventoryPeriod,
        Field::OperatingCycle,
        Field::CashCycle,
        Field::Roa,
        Field::Roe,
    ];

    /// Conversion periods and liquidity ratios, the default summary columns.
    pub const LIQUIDITY_SET: [Field; 6] = [
        Field::ReceivablesPeriod,
        Field::PayablesPeriod,
        Field::InventoryPeriod,
        Field::CurrentRatio,
        Field::QuickRatio,
        Field::CashRatio,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Field::CashRevenues => "cash_revenues",
            Field::TotalAssets => "total_assets",
            Field::FixedAssets => "fixed_assets",
            Field::CurrentAssets => "current_assets",
            Field::Inventories => "inventories",
            Field::AccountsReceivable => "accounts_receivable",
            Field::CashEquivalents => "cash_equivalents",
            Field::FundCapital => "fund_capital",
            Field::LongTermDebt => "long_term_debt",
            Field::ShortTermDebt => "short_term_debt",
            Field::AccountsPayable => "accounts_payable",
            Field::NetResult => "net_result",
            Field::CurrentRatio => "current_ratio",
            Field::QuickRatio => "quick_ratio",
            Field::CashRatio => "cash_ratio",
            Field::ReceivablesPeriod => "receivables_period",
            Field::PayablesPeriod => "payables_period",
            Field::InventoryPeriod => "inventory_period",
            Field::OperatingCycle => "operating_cycle",
            Field::CashCycle => "cash_cycle",
            Field::Roa => "roa",
            Field::Roe => "roe",
        }
    }

    pub fn is_indicator(&self) -> bool {
        *self >= Field::CurrentRatio
    }

    pub fn value(&self, r: &OrgRecord, opts: &IndicatorOptions) -> Option<f64> {
        if !self.is_indicator() {
            return r.amounts()[*self as usize];
        }
        let set = compute_indicators(r, opts);
        let v = match self {
            Field::CurrentRatio => set.current_ratio,
            Field::QuickRatio => set.quick_ratio,
            Field::CashRatio => set.cash_ratio,
            Field::ReceivablesPeriod => set.receivables_period,
            Field::PayablesPeriod => set.payables_period,
            Field::InventoryPeriod => set.inventory_period,
            Field::OperatingCycle => set.operating_cycle,
            Field::CashCycle => set.cash_cycle,
            Field::Roa => set.roa,
            Field::Roe => set.roe,
            _ => unreachable!("raw amounts handled above"),
        };
        v.ok()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Field {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Field::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| IngestError::UnknownField(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "org_id,year,sectors,cash_revenues,total_assets,fixed_assets,current_assets,inventories,accounts_receivable,cash_equivalents,fund_capital,long_term_debt,short_term_debt,accounts_payable,net_result";

    fn load(body: &str) -> Dataset {
        Dataset::from_reader(format!("{HEADER}\n{body}").as_bytes(), "test").unwrap()
    }

    #[test]
    fn maps_fields_and_sectors() {
        let ds = load("npo1,2009,1a;1b,2000,2000,1400,600,0,100,300,680,340,680,300,50\n");
        assert_eq!(ds.rejects, vec![]);
        let r = &ds.records[0];
        assert_eq!(r.sectors.iter().map(String::as_str).collect::<Vec<_>>(), ["1a", "1b"]);
        assert_eq!(r.cash_revenues, Some(2000.0));
        assert_eq!(r.net_result, Some(50.0));
        assert_eq!(r.year, 2009);
    }

    #[test]
    fn empty_cell_is_absent() {
        let ds = load("npo1,2009,1a,2000,2000,1400,600,,100,300,680,340,680,300,50\n");
        assert_eq!(ds.records[0].inventories, None);
    }

    #[test]
    fn bad_numbers_reject_only_their_row() {
        let ds = load(
            "a,2009,x,abc,1,1,1,1,1,1,1,1,1,1,1\n\
             b,2009,x,\"12,5\",1,1,1,1,1,1,1,1,1,1,1\n\
             c,2009,x,10,1,1,1,1,1,1,1,1,1,1,1\n\
             d,1800,x,10,1,1,1,1,1,1,1,1,1,1,1\n\
             e,2009,x,inf,1,1,1,1,1,1,1,1,1,1,1\n\
             f,2009,x,1,1\n\
             c,2009,y,11,1,1,1,1,1,1,1,1,1,1,1\n",
        );
        assert_eq!(ds.records.len(), 1);
        assert_eq!(ds.records[0].org_id, "c");
        let reasons: Vec<_> = ds.rejects.iter().map(|r| (r.row, r.reason.clone())).collect();
        assert_eq!(
            reasons[0],
            (1, RejectReason::NumericParse { column: "cash_revenues", value: "abc".into() })
        );
        assert_eq!(
            reasons[1],
            (2, RejectReason::CommaDecimal { column: "cash_revenues", value: "12,5".into() })
        );
        assert_eq!(reasons[2], (4, RejectReason::YearOutOfRange { year: 1800 }));
        assert_eq!(reasons[3], (5, RejectReason::NonFinite { column: "cash_revenues" }));
        assert_eq!(reasons[4], (6, RejectReason::FieldCount { expected: 15, found: 5 }));
        assert_eq!(reasons[5], (7, RejectReason::DuplicateKey { org_id: "c".into(), year: 2009 }));
        assert_eq!(ds.provenance.total_rows, 7);
        assert_eq!(ds.provenance.accepted + ds.provenance.rejected, 7);
    }

    #[test]
    fn header_is_order_insensitive_and_validated() {
        let mut cols: Vec<&str> = COLUMNS.to_vec();
        cols.reverse();
        cols.push("comment");
        let text = format!("{}\n50,300,680,340,680,300,100,0,600,1400,2000,2000,s,2010,z,hello\n", cols.join(","));
        let ds = Dataset::from_reader(text.as_bytes(), "rev").unwrap();
        assert_eq!(ds.records[0].org_id, "z");
        assert_eq!(ds.records[0].cash_revenues, Some(2000.0));
        assert_eq!(ds.warnings.len(), 1);

        let err = Dataset::from_reader("org_id,year\nx,2009\n".as_bytes(), "short").unwrap_err();
        assert!(matches!(err, IngestError::MissingColumns(ref m) if m.len() == 13));
    }

    #[test]
    fn unreadable_file_is_io_error() {
        let err = load_csv("/nonexistent/file.csv").unwrap_err();
        assert!(err.is_io());
    }

    #[test]
    fn filters() {
        let ds = load(
            "a,2009,s1;s2,1,1,1,1,1,1,1,1,1,1,1,1\n\
             b,2009,s1,1,1,1,1,1,1,1,1,1,1,1,1\n\
             c,2010,s2,1,1,1,1,1,1,1,1,1,1,1,1\n\
             d,2010,s1,1,1,1,1,1,1,1,1,1,1,1,1\n\
             e,2010,,1,1,1,1,1,1,1,1,1,1,1,1\n",
        );
        assert_eq!(ds.filter(Some("s1"), None).records.len(), 3);
        assert_eq!(ds.filter(None, None), ds);
        let s1: Vec<_> = ds.filter(Some("s1"), None).records.into_iter().map(|r| r.org_id).collect();
        let s2: Vec<_> = ds.filter(Some("s2"), None).records.into_iter().map(|r| r.org_id).collect();
        assert!(s1.contains(&"a".to_string()) && s2.contains(&"a".to_string()));
        assert_eq!(ds.filter(Some("s1"), Some(2010)).records.len(), 1);
        assert_eq!(ds.filter(Some("s1"), Some(2010)), ds.filter(None, Some(2010)).filter(Some("s1"), None));
        assert_eq!(ds.filter(Some("zz"), None).records.len(), 0);
    }

    #[test]
    fn columns_skip_absences() {
        let ds = load(
            "a,2009,s,,1,1,5,0,1,1,1,1,0,0,1\n\
             b,2009,s,,1,1,5,0,1,1,1,1,0,0,1\n\
             c,2009,s,10,1,1,5,0,1,1,1,1,1,1,1\n\
             d,2009,s,10,1,1,5,0,1,1,1,1,1,1,1\n\
             e,2009,s,10,1,1,5,0,1,1,1,1,1,1,1\n",
        );
        let opts = IndicatorOptions::default();
        assert_eq!(ds.column(Field::CashRevenues, &opts).count(), 3);
        assert_eq!(ds.column(Field::CurrentRatio, &opts).count(), 3);
        assert_eq!(ds.column(Field::CurrentRatio, &opts).sorted_values(), &[2.5, 2.5, 2.5]);
        assert_eq!(ds.column(Field::NetResult, &opts).count(), 5);
    }

    #[test]
    fn field_names_round_trip() {
        for f in Field::ALL {
            assert_eq!(f.name().parse::<Field>().unwrap(), f);
        }
        assert!("bogus".parse::<Field>().is_err());
        assert_eq!(Field::ALL.iter().filter(|f| !f.is_indicator()).count(), 12);
    }
}
