//! Per-organization liquidity ratios, conversion periods and profitability.
//!
//! Every indicator is either a value or an [`Absence`] explaining why it could
//! not be computed. Absence plays the role of an empty cell in a summary table
//! and is never folded into zero.

use serde::Serialize;
use std::collections::BTreeSet;

/// One organization-year of financial-statement fields. Any amount may be
/// missing from the source data.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OrgRecord {
    pub org_id: String,
    pub year: i32,
    pub sectors: BTreeSet<String>,
    pub cash_revenues: Option<f64>,
    pub total_assets: Option<f64>,
    pub fixed_assets: Option<f64>,
    pub current_assets: Option<f64>,
    pub inventories: Option<f64>,
    pub accounts_receivable: Option<f64>,
    pub cash_equivalents: Option<f64>,
    pub fund_capital: Option<f64>,
    pub long_term_debt: Option<f64>,
    pub short_term_debt: Option<f64>,
    pub accounts_payable: Option<f64>,
    pub net_result: Option<f64>,
}

impl OrgRecord {
    pub fn amounts(&self) -> [Option<f64>; 12] {
        [
            self.cash_revenues,
            self.total_assets,
            self.fixed_assets,
            self.current_assets,
            self.inventories,
            self.accounts_receivable,
            self.cash_equivalents,
            self.fund_capital,
            self.long_term_debt,
            self.short_term_debt,
            self.accounts_payable,
            self.net_result,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Absence {
    MissingInput,
    ZeroDenominator,
    /// Fund capital was not positive and strict ROE was requested.
    NonPositiveEquity,
}

pub type Indicator = Result<f64, Absence>;

/// What counts as current liabilities in the liquidity ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClDefinition {
    #[default]
    ShortDebtPlusPayables,
    ShortDebtOnly,
}

impl ClDefinition {
    pub fn describe(&self) -> &'static str {
        match self {
            Self::ShortDebtPlusPayables => "CL = short-term debt + accounts payable",
            Self::ShortDebtOnly => "CL = short-term debt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorOptions {
    pub day_count: f64,
    pub cl_definition: ClDefinition,
    /// Report ROE as absent when fund capital is zero or negative.
    pub strict_roe: bool,
}

impl Default for IndicatorOptions {
    fn default() -> Self {
        Self { day_count: 365.0, cl_definition: ClDefinition::default(), strict_roe: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorSet {
    pub current_ratio: Indicator,
    pub quick_ratio: Indicator,
    pub cash_ratio: Indicator,
    pub receivables_period: Indicator,
    pub payables_period: Indicator,
    pub inventory_period: Indicator,
    pub operating_cycle: Indicator,
    pub cash_cycle: Indicator,
    pub roa: Indicator,
    pub roe: Indicator,
    /// Some present input amount was negative.
    pub negative_inputs: bool,
}

fn input(v: Option<f64>) -> Indicator {
    v.ok_or(Absence::MissingInput)
}

fn ratio(num: Indicator, den: Indicator) -> Indicator {
    let (num, den) = (num?, den?);
    if den == 0.0 {
        Err(Absence::ZeroDenominator)
    } else {
        Ok(num / den)
    }
}

pub fn compute_indicators(r: &OrgRecord, opts: &IndicatorOptions) -> IndicatorSet {
    let current_liabilities = match opts.cl_definition {
        ClDefinition::ShortDebtPlusPayables => input(r.short_term_debt)
            .and_then(|ds| input(r.accounts_payable).map(|ap| ds + ap)),
        ClDefinition::ShortDebtOnly => input(r.short_term_debt),
    };
    let ca = input(r.current_assets);
    let inv = input(r.inventories);
    let quick_assets = ca.and_then(|ca| inv.map(|inv| ca - inv));

    let cr = input(r.cash_revenues);
    let period = |item: Option<f64>| ratio(input(item), cr).map(|x| opts.day_count * x);
    let receivables_period = period(r.accounts_receivable);
    let payables_period = period(r.accounts_payable);
    let inventory_period = period(r.inventories);
    let operating_cycle = inventory_period.and_then(|i| receivables_period.map(|rc| i + rc));
    let cash_cycle = operating_cycle.and_then(|o| payables_period.map(|p| o - p));

    let roe = match input(r.fund_capital) {
        Ok(e) if opts.strict_roe && e <= 0.0 && r.net_result.is_some() => Err(Absence::NonPositiveEquity),
        e => ratio(input(r.net_result), e),
    };

    IndicatorSet {
        current_ratio: ratio(ca, current_liabilities),
        quick_ratio: ratio(quick_assets, current_liabilities),
        cash_ratio: ratio(input(r.cash_equivalents), current_liabilities),
        receivables_period,
        payables_period,
        inventory_period,
        operating_cycle,
        cash_cycle,
        roa: ratio(input(r.net_result), input(r.total_assets)),
        roe,
        negative_inputs: r.amounts().iter().flatten().any(|v| *v < 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityStatus {
    Holds,
    Violated { expected: f64, actual: f64 },
    /// An input period is absent, so the identity cannot be checked.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleCheck {
    pub operating_cycle: IdentityStatus,
    pub cash_cycle: IdentityStatus,
}

impl CycleCheck {
    pub fn holds(&self) -> bool {
        self.operating_cycle == IdentityStatus::Holds && self.cash_cycle == IdentityStatus::Holds
    }
}

const IDENTITY_TOLERANCE: f64 = 1e-9;

fn check(expected: Option<f64>, actual: Indicator) -> IdentityStatus {
    match (expected, actual) {
        (Some(expected), Ok(actual)) => {
            if (expected - actual).abs() <= IDENTITY_TOLERANCE * expected.abs().max(1.0) {
                IdentityStatus::Holds
            } else {
                IdentityStatus::Violated { expected, actual }
            }
        }
        _ => IdentityStatus::NotApplicable,
    }
}

/// Verifies operating = inventory + receivables and cash = operating - payables.
pub fn cycle_identities(set: &IndicatorSet) -> CycleCheck {
    let (inv, rec, pay) = (set.inventory_period.ok(), set.receivables_period.ok(), set.payables_period.ok());
    let operating = inv.zip(rec).map(|(i, r)| i + r);
    let cash = set.operating_cycle.ok().zip(pay).map(|(o, p)| o - p);
    CycleCheck { operating_cycle: check(operating, set.operating_cycle), cash_cycle: check(cash, set.cash_cycle) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn restrictive_record() -> OrgRecord {
        OrgRecord {
            org_id: "npo1".into(),
            year: 2009,
            cash_revenues: Some(2000.0),
            total_assets: Some(2000.0),
            fixed_assets: Some(1400.0),
            current_assets: Some(600.0),
            inventories: Some(0.0),
            accounts_receivable: Some(100.0),
            cash_equivalents: Some(300.0),
            fund_capital: Some(680.0),
            long_term_debt: Some(340.0),
            short_term_debt: Some(680.0),
            accounts_payable: Some(300.0),
            net_result: Some(50.0),
            ..Default::default()
        }
    }

    #[test]
    fn liquidity_ratios() {
        let i = compute_indicators(&restrictive_record(), &IndicatorOptions::default());
        assert_abs_diff_eq!(i.current_ratio.unwrap(), 0.612, epsilon = 1e-3);
        assert_abs_diff_eq!(i.quick_ratio.unwrap(), 0.612, epsilon = 1e-3);
        assert_abs_diff_eq!(i.cash_ratio.unwrap(), 0.306, epsilon = 1e-3);
        assert!(!i.negative_inputs);

        let short_only = IndicatorOptions { cl_definition: ClDefinition::ShortDebtOnly, ..Default::default() };
        let j = compute_indicators(&restrictive_record(), &short_only);
        assert_abs_diff_eq!(j.current_ratio.unwrap(), 600.0 / 680.0, epsilon = 1e-12);
    }

    #[test]
    fn receivables_period_in_days() {
        let r = OrgRecord { accounts_receivable: Some(100.0), cash_revenues: Some(3650.0), ..Default::default() };
        let i = compute_indicators(&r, &IndicatorOptions::default());
        assert_abs_diff_eq!(i.receivables_period.unwrap(), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn missing_revenue_only_hides_periods() {
        let r = OrgRecord { cash_revenues: None, ..restrictive_record() };
        let i = compute_indicators(&r, &IndicatorOptions::default());
        for p in [i.receivables_period, i.payables_period, i.inventory_period, i.operating_cycle, i.cash_cycle] {
            assert_eq!(p, Err(Absence::MissingInput));
        }
        assert!(i.current_ratio.is_ok() && i.quick_ratio.is_ok() && i.cash_ratio.is_ok());
    }

    #[test]
    fn zero_denominators() {
        let r = OrgRecord { short_term_debt: Some(0.0), accounts_payable: Some(0.0), ..restrictive_record() };
        let i = compute_indicators(&r, &IndicatorOptions::default());
        assert_eq!(i.current_ratio, Err(Absence::ZeroDenominator));
        assert_eq!(i.cash_ratio, Err(Absence::ZeroDenominator));
    }

    #[test]
    fn strict_roe() {
        let r = OrgRecord { fund_capital: Some(-10.0), ..restrictive_record() };
        let lax = compute_indicators(&r, &IndicatorOptions::default());
        assert_abs_diff_eq!(lax.roe.unwrap(), -5.0, epsilon = 1e-12);
        assert!(lax.negative_inputs);
        let strict = compute_indicators(&r, &IndicatorOptions { strict_roe: true, ..Default::default() });
        assert_eq!(strict.roe, Err(Absence::NonPositiveEquity));
    }

    fn with_periods(inv: f64, rec: f64, pay: f64) -> IndicatorSet {
        let mut set = compute_indicators(&OrgRecord::default(), &IndicatorOptions::default());
        set.inventory_period = Ok(inv);
        set.receivables_period = Ok(rec);
        set.payables_period = Ok(pay);
        set.operating_cycle = Ok(inv + rec);
        set.cash_cycle = Ok(inv + rec - pay);
        set
    }

    #[test]
    fn negative_cash_cycle_identities() {
        let set = with_periods(2.0, 3.0, 12.0);
        assert_eq!(set.operating_cycle, Ok(5.0));
        assert_eq!(set.cash_cycle, Ok(-7.0));
        assert!(cycle_identities(&set).holds());
    }

    #[test]
    fn corrupted_set_is_reported() {
        let mut set = with_periods(2.0, 3.0, 12.0);
        set.cash_cycle = Ok(1.0);
        let check = cycle_identities(&set);
        assert_eq!(check.operating_cycle, IdentityStatus::Holds);
        assert_eq!(check.cash_cycle, IdentityStatus::Violated { expected: -7.0, actual: 1.0 });
        assert!(!check.holds());
    }

    #[test]
    fn absent_periods_are_not_applicable() {
        let set = compute_indicators(&OrgRecord::default(), &IndicatorOptions::default());
        let check = cycle_identities(&set);
        assert_eq!(check.operating_cycle, IdentityStatus::NotApplicable);
    }

    proptest! {
        #[test]
        fn computed_sets_satisfy_identities(
            cr in 1.0f64..1e6, ar in 0.0f64..1e5, inv in 0.0f64..1e5, ap in 0.0f64..1e5,
        ) {
            let r = OrgRecord {
                cash_revenues: Some(cr), accounts_receivable: Some(ar), inventories: Some(inv),
                accounts_payable: Some(ap), ..Default::default()
            };
            let set = compute_indicators(&r, &IndicatorOptions::default());
            prop_assert!(cycle_identities(&set).holds());
        }
    }
}
