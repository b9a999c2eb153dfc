//! Cost of capital and economic result of a liquidity investment strategy.
//!
//! The chain for one strategy is:
//!
//! ```text
//! profile ──► implied statement (CA, TA, AP, E, Dl, Ds, EBIT, FCF)
//!    │
//!    └─► SZ(CA/CR) ──► beta_l = beta_u (1 + (1-T) D/E) ──► beta_l* = beta_l (1 + SZ)
//!                          ──► k_e = beta_l* (k_m - k_RF) + k_RF
//!                          ──► k_dl = k_e - spread_l (1 + SZ),  k_ds = k_e - spread_s (1 + SZ)
//!                          ──► CC = weighted(k_e, k_dl (1-T), k_ds (1-T))
//!                          ──► dER = FCF_0 + FCF / CC
//! ```
//!
//! Nonprofits are tax exempt on operations, so EBIT is taken as the recurring
//! free cash flow; the tax rate only enters through the debt tax shield and the
//! leverage adjustment of beta.

use serde::Serialize;
use thiserror::Error;

use crate::round_half_up;
use crate::sz::SzCurve;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid {field}: {reason}")]
    InvalidField { field: &'static str, reason: String },
    #[error("capital invested is {0}; cost of capital is undefined without positive capital")]
    ZeroCapital(f64),
    #[error("cost of capital {0} is not positive; the perpetuity value is undefined")]
    NonPositiveCostOfCapital(f64),
    #[error("at least one strategy profile is required")]
    NoProfiles,
    #[error("unsupported SZ variant `{name}`: {detail}")]
    UnsupportedVariant { name: String, detail: String },
}

impl ModelError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Self::InvalidField { field, reason: reason.into() }
    }
}

fn require(ok: bool, field: &'static str, reason: &str) -> Result<(), ModelError> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::invalid(field, reason))
    }
}

fn finite(v: f64, field: &'static str) -> Result<(), ModelError> {
    require(v.is_finite(), field, "must be a finite number")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketConditions {
    pub risk_free_rate: f64,
    pub market_return: f64,
    pub tax_rate: f64,
    pub long_debt_spread: f64,
    pub short_debt_spread: f64,
}

impl MarketConditions {
    /// 4% risk-free rate, 18% market return, 19% tax, 9%/12% debt spreads.
    pub const PRE_CRISIS: Self = Self {
        risk_free_rate: 0.04,
        market_return: 0.18,
        tax_rate: 0.19,
        long_debt_spread: 0.09,
        short_debt_spread: 0.12,
    };

    /// 5% risk-free rate and a 16% market premium; other parameters unchanged.
    pub const AFTER_CRISIS: Self = Self {
        risk_free_rate: 0.05,
        market_return: 0.21,
        ..Self::PRE_CRISIS
    };

    pub fn validate(&self) -> Result<(), ModelError> {
        finite(self.risk_free_rate, "market.risk_free_rate")?;
        finite(self.market_return, "market.market_return")?;
        finite(self.tax_rate, "market.tax_rate")?;
        finite(self.long_debt_spread, "market.long_debt_spread")?;
        finite(self.short_debt_spread, "market.short_debt_spread")?;
        require(
            self.market_return > self.risk_free_rate,
            "market.market_return",
            "must exceed the risk-free rate",
        )?;
        require(
            (0.0..1.0).contains(&self.tax_rate),
            "market.tax_rate",
            "must lie in [0, 1)",
        )?;
        require(self.long_debt_spread > 0.0, "market.long_debt_spread", "must be positive")?;
        require(self.short_debt_spread > 0.0, "market.short_debt_spread", "must be positive")
    }

    pub fn market_premium(&self) -> f64 {
        self.market_return - self.risk_free_rate
    }
}

/// Shares of invested capital supplied by equity, long-term and short-term debt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapitalWeights {
    pub equity_share: f64,
    pub long_debt_share: f64,
    pub short_debt_share: f64,
}

impl CapitalWeights {
    /// 40% equity, 20% long-term debt, 40% short-term debt.
    pub const DEFAULT: Self = Self { equity_share: 0.4, long_debt_share: 0.2, short_debt_share: 0.4 };

    pub fn new(equity: f64, long_debt: f64, short_debt: f64) -> Result<Self, ModelError> {
        let w = Self { equity_share: equity, long_debt_share: long_debt, short_debt_share: short_debt };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (v, field) in [
            (self.equity_share, "weights.equity"),
            (self.long_debt_share, "weights.long_debt"),
            (self.short_debt_share, "weights.short_debt"),
        ] {
            finite(v, field)?;
            require(v >= 0.0, field, "must be non-negative")?;
        }
        let total = self.equity_share + self.long_debt_share + self.short_debt_share;
        require((total - 1.0).abs() <= 1e-12, "weights", "shares must sum to 1")
    }
}

impl Default for CapitalWeights {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Which intermediate values are rounded the way hand-worked tables
/// round them. Both flags off is full double precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RoundingPolicy {
    /// Round every currency line of the statement to an integer before it
    /// feeds the next line and the capital weights.
    pub round_statement_lines: bool,
    /// Round the leveraged beta to two decimals before the SZ correction.
    pub round_leveraged_beta: bool,
}

impl RoundingPolicy {
    pub const FULL_PRECISION: Self = Self { round_statement_lines: false, round_leveraged_beta: false };
    pub const TABULATED: Self = Self { round_statement_lines: true, round_leveraged_beta: true };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyProfile {
    /// restrictive, moderate, flexible or any custom label.
    pub name: String,
    pub cash_revenues: f64,
    pub ca_to_cr: f64,
    pub fixed_assets: f64,
    pub ebit_share: f64,
    pub payables_to_ca: f64,
    pub unleveraged_beta: f64,
    /// D/E plugged into the leverage adjustment of beta. Kept separate from the
    /// capital weights: the worked example uses 0.4/0.6 while financing 40/60.
    pub hamada_debt_equity_ratio: f64,
}

impl StrategyProfile {
    pub const DEFAULT_PAYABLES_TO_CA: f64 = 0.5;
    pub const DEFAULT_UNLEVERAGED_BETA: f64 = 0.77;
    pub const DEFAULT_DEBT_EQUITY_RATIO: f64 = 0.4 / 0.6;

    fn preset(name: &str, cash_revenues: f64, ca_to_cr: f64, fixed_assets: f64, ebit_share: f64) -> Self {
        Self {
            name: name.to_string(),
            cash_revenues,
            ca_to_cr,
            fixed_assets,
            ebit_share,
            payables_to_ca: Self::DEFAULT_PAYABLES_TO_CA,
            unleveraged_beta: Self::DEFAULT_UNLEVERAGED_BETA,
            hamada_debt_equity_ratio: Self::DEFAULT_DEBT_EQUITY_RATIO,
        }
    }

    pub fn restrictive() -> Self {
        Self::preset("restrictive", 2000.0, 0.3, 1400.0, 0.5)
    }

    pub fn moderate() -> Self {
        Self::preset("moderate", 2080.0, 0.45, 1445.0, 0.45)
    }

    pub fn flexible() -> Self {
        Self::preset("flexible", 2142.4, 0.6, 1480.0, 0.40)
    }

    /// The three strategies of the worked example, in table order.
    pub fn standard_set() -> Vec<Self> {
        vec![Self::restrictive(), Self::moderate(), Self::flexible()]
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        finite(self.cash_revenues, "profile.cash_revenues")?;
        finite(self.ca_to_cr, "profile.ca_to_cr")?;
        finite(self.fixed_assets, "profile.fixed_assets")?;
        finite(self.ebit_share, "profile.ebit_share")?;
        finite(self.payables_to_ca, "profile.payables_to_ca")?;
        finite(self.unleveraged_beta, "profile.unleveraged_beta")?;
        finite(self.hamada_debt_equity_ratio, "profile.debt_equity_ratio")?;
        // zero revenue is allowed as the degenerate all-fixed-assets case
        require(self.cash_revenues >= 0.0, "profile.cash_revenues", "must be non-negative")?;
        require(self.ca_to_cr > 0.0, "profile.ca_to_cr", "must be positive")?;
        require(self.fixed_assets >= 0.0, "profile.fixed_assets", "must be non-negative")?;
        require((0.0..=1.0).contains(&self.ebit_share), "profile.ebit_share", "must lie in [0, 1]")?;
        require(self.payables_to_ca >= 0.0, "profile.payables_to_ca", "must be non-negative")?;
        require(self.unleveraged_beta >= 0.0, "profile.unleveraged_beta", "must be non-negative")?;
        require(self.hamada_debt_equity_ratio >= 0.0, "profile.debt_equity_ratio", "must be non-negative")
    }
}

/// Balance-sheet and cash-flow lines implied by a strategy profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedStatement {
    pub cash_revenues: f64,
    pub fixed_assets: f64,
    pub current_assets: f64,
    pub total_assets: f64,
    pub accounts_payable: f64,
    pub capital_invested: f64,
    pub equity: f64,
    pub long_term_debt: f64,
    pub short_term_debt: f64,
    pub ebit: f64,
    pub fcf_initial: f64,
    pub fcf_recurring: f64,
}

impl DerivedStatement {
    pub fn financing_total(&self) -> f64 {
        self.equity + self.long_term_debt + self.short_term_debt
    }
}

/// Derives the statement lines for `profile`. With integer rounding each line
/// is rounded as soon as it is derived and the rounded value feeds the lines
/// below it, the way a hand-computed table is built.
pub fn build_statement(
    profile: &StrategyProfile,
    weights: &CapitalWeights,
    policy: RoundingPolicy,
) -> Result<DerivedStatement, ModelError> {
    profile.validate()?;
    weights.validate()?;
    let line = |v: f64| if policy.round_statement_lines { round_half_up(v, 0) } else { v };

    let current_assets = line(profile.ca_to_cr * profile.cash_revenues);
    let total_assets = line(profile.fixed_assets + current_assets);
    let accounts_payable = line(profile.payables_to_ca * current_assets);
    let capital_invested = line(total_assets - accounts_payable);
    let ebit = line(profile.ebit_share * profile.cash_revenues);

    Ok(DerivedStatement {
        cash_revenues: profile.cash_revenues,
        fixed_assets: profile.fixed_assets,
        current_assets,
        total_assets,
        accounts_payable,
        capital_invested,
        equity: line(weights.equity_share * capital_invested),
        long_term_debt: line(weights.long_debt_share * capital_invested),
        short_term_debt: line(weights.short_debt_share * capital_invested),
        ebit,
        fcf_initial: -capital_invested,
        fcf_recurring: ebit,
    })
}

/// Leverage-adjusted (equity) beta: `beta_u * (1 + (1 - T) * D/E)`.
pub fn leveraged_beta(unleveraged_beta: f64, tax_rate: f64, debt_equity_ratio: f64) -> Result<f64, ModelError> {
    finite(unleveraged_beta, "unleveraged_beta")?;
    require(unleveraged_beta >= 0.0, "unleveraged_beta", "must be non-negative")?;
    require(
        debt_equity_ratio.is_finite() && debt_equity_ratio >= 0.0,
        "debt_equity_ratio",
        "must be non-negative",
    )?;
    require((0.0..1.0).contains(&tax_rate), "tax_rate", "must lie in [0, 1)")?;
    Ok(unleveraged_beta * (1.0 + (1.0 - tax_rate) * debt_equity_ratio))
}

/// Applies the strategy premium: `beta_l * (1 + SZ)`, optionally rounding
/// `beta_l` to two decimals first.
pub fn corrected_beta(leveraged_beta: f64, sz_premium: f64, policy: RoundingPolicy) -> Result<f64, ModelError> {
    require(sz_premium.is_finite() && sz_premium >= 0.0, "sz_premium", "must be non-negative")?;
    let base = if policy.round_leveraged_beta { round_half_up(leveraged_beta, 2) } else { leveraged_beta };
    Ok(base * (1.0 + sz_premium))
}

/// CAPM required return on equity.
pub fn cost_of_equity(beta: f64, market: &MarketConditions) -> f64 {
    beta * market.market_premium() + market.risk_free_rate
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateStatus {
    Normal,
    /// The spread exceeded the cost of equity; the value is kept, not clamped.
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DebtRate {
    pub value: f64,
    pub status: RateStatus,
}

impl DebtRate {
    fn from_value(value: f64) -> Self {
        let status = if value < 0.0 { RateStatus::Negative } else { RateStatus::Normal };
        Self { value, status }
    }

    pub fn is_degenerate(&self) -> bool {
        self.status == RateStatus::Negative
    }
}

/// `k_e - spread_l * (1 + SZ)`.
pub fn long_debt_rate(cost_of_equity: f64, sz_premium: f64, market: &MarketConditions) -> DebtRate {
    DebtRate::from_value(cost_of_equity - market.long_debt_spread * (1.0 + sz_premium))
}

/// `k_e - spread_s * (1 + SZ)`.
pub fn short_debt_rate(cost_of_equity: f64, sz_premium: f64, market: &MarketConditions) -> DebtRate {
    DebtRate::from_value(cost_of_equity - market.short_debt_spread * (1.0 + sz_premium))
}

/// Weighted cost of capital with after-tax debt costs, weighted by the
/// statement's (possibly rounded) financing lines.
pub fn cost_of_capital(
    statement: &DerivedStatement,
    k_e: f64,
    k_dl: f64,
    k_ds: f64,
    tax_rate: f64,
) -> Result<f64, ModelError> {
    let total = statement.financing_total();
    if total.is_nan() || total <= 0.0 {
        return Err(ModelError::ZeroCapital(total));
    }
    let after_tax = 1.0 - tax_rate;
    Ok((statement.equity * k_e
        + statement.long_term_debt * k_dl * after_tax
        + statement.short_term_debt * k_ds * after_tax)
        / total)
}

/// Perpetuity value of the strategy: `FCF_0 + FCF / CC`.
pub fn economic_result(fcf_initial: f64, fcf_recurring: f64, cc: f64) -> Result<f64, ModelError> {
    if cc.is_nan() || cc <= 0.0 {
        return Err(ModelError::NonPositiveCostOfCapital(cc));
    }
    Ok(fcf_initial + fcf_recurring / cc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyOutcome {
    pub name: String,
    pub ca_to_cr: f64,
    pub ebit_share: f64,
    pub statement: DerivedStatement,
    pub sz_premium: f64,
    /// Leverage-adjusted beta before any rounding or SZ correction.
    pub leveraged_beta: f64,
    pub corrected_beta: f64,
    pub cost_of_equity: f64,
    pub long_debt_rate: DebtRate,
    pub short_debt_rate: DebtRate,
    pub cost_of_capital: f64,
    pub economic_result: f64,
}

impl StrategyOutcome {
    pub fn has_degenerate_rate(&self) -> bool {
        self.long_debt_rate.is_degenerate() || self.short_debt_rate.is_degenerate()
    }
}

pub fn evaluate_strategy(
    profile: &StrategyProfile,
    market: &MarketConditions,
    weights: &CapitalWeights,
    curve: &SzCurve,
    policy: RoundingPolicy,
) -> Result<StrategyOutcome, ModelError> {
    market.validate()?;
    let statement = build_statement(profile, weights, policy)?;
    let sz_premium = curve.sz_at(profile.ca_to_cr);
    let beta_l = leveraged_beta(profile.unleveraged_beta, market.tax_rate, profile.hamada_debt_equity_ratio)?;
    let beta = corrected_beta(beta_l, sz_premium, policy)?;
    let k_e = cost_of_equity(beta, market);
    let k_dl = long_debt_rate(k_e, sz_premium, market);
    let k_ds = short_debt_rate(k_e, sz_premium, market);
    let cc = cost_of_capital(&statement, k_e, k_dl.value, k_ds.value, market.tax_rate)?;
    let er = economic_result(statement.fcf_initial, statement.fcf_recurring, cc)?;
    Ok(StrategyOutcome {
        name: profile.name.clone(),
        ca_to_cr: profile.ca_to_cr,
        ebit_share: profile.ebit_share,
        statement,
        sz_premium,
        leveraged_beta: beta_l,
        corrected_beta: beta,
        cost_of_equity: k_e,
        long_debt_rate: k_dl,
        short_debt_rate: k_ds,
        cost_of_capital: cc,
        economic_result: er,
    })
}

/// Outcomes for several strategies under one market, in input order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub outcomes: Vec<StrategyOutcome>,
    /// Strategy with the largest economic result (first on ties).
    pub best_economic_result: String,
    /// Strategy with the lowest cost of capital (first on ties).
    pub lowest_cost_of_capital: String,
}

pub fn compare_strategies(
    profiles: &[StrategyProfile],
    market: &MarketConditions,
    weights: &CapitalWeights,
    curve: &SzCurve,
    policy: RoundingPolicy,
) -> Result<Comparison, ModelError> {
    if profiles.is_empty() {
        return Err(ModelError::NoProfiles);
    }
    let outcomes = profiles
        .iter()
        .map(|p| evaluate_strategy(p, market, weights, curve, policy))
        .collect::<Result<Vec<_>, _>>()?;

    let mut best = &outcomes[0];
    let mut cheapest = &outcomes[0];
    for o in &outcomes[1..] {
        if o.economic_result > best.economic_result {
            best = o;
        }
        if o.cost_of_capital < cheapest.cost_of_capital {
            cheapest = o;
        }
    }
    Ok(Comparison {
        best_economic_result: best.name.clone(),
        lowest_cost_of_capital: cheapest.name.clone(),
        outcomes,
    })
}
