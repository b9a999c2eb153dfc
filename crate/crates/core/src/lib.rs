//! Liquidity-strategy valuation and robust descriptive statistics for
//! nonprofit financial records.
//!
//! The crate has two halves:
//!
//! - a deterministic cost-of-capital model ([`strategy`], [`sz`]) that turns a
//!   current-assets policy into a leveraged beta, component capital costs, a
//!   weighted cost of capital and the perpetuity value of the strategy;
//! - an empirical toolkit ([`ingest`], [`indicators`], [`stats`]) that loads
//!   organization-year records from CSV, derives liquidity ratios and
//!   conversion periods, and summarizes them with outlier-resistant estimators.
//!
//! [`config`], [`report`] and [`svg`] hold the text formats and renderers used
//! by the command-line tool and the browser demo.

pub mod config;
pub mod indicators;
pub mod ingest;
pub mod report;
pub mod stats;
pub mod strategy;
pub mod svg;
pub mod sz;

pub use config::{ConfigError, ScenarioConfig};
pub use indicators::{
    compute_indicators, cycle_identities, Absence, ClDefinition, CycleCheck, IndicatorOptions,
    IndicatorSet, OrgRecord,
};
pub use ingest::{Dataset, Field, IngestError};
pub use stats::{FiveNumber, Sample, StatsError, SummaryRow};
pub use strategy::{
    compare_strategies, evaluate_strategy, CapitalWeights, Comparison, DerivedStatement,
    MarketConditions, ModelError, RoundingPolicy, StrategyOutcome, StrategyProfile,
};
pub use sz::{Anchor, SzCurve};

/// Rounds half away from zero to `decimals` places.
///
/// Used for the integer statement lines, the two-decimal beta and every
/// displayed number, so that ties behave like hand arithmetic.
pub fn round_half_up(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round() / scale
}
