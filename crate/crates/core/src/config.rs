//! Scenario files: a line-oriented, sectioned `key = value` format.
//!
//! ```text
//! # comments start with '#'
//! [market]
//! risk_free_rate = 0.04
//! market_return = 0.18
//! tax_rate = 0.19
//! long_debt_spread = 0.09
//! short_debt_spread = 0.12
//!
//! [weights]
//! equity = 0.4
//! long_debt = 0.2
//! short_debt = 0.4
//!
//! [rounding]            # optional, both default to false
//! statement_lines = true
//! leveraged_beta = true
//!
//! [sz]
//! variant = SZ1         # or: anchors = 0.3:0.2, 0.45:0.1, 0.6:0.01
//!
//! [profile]             # repeat once per strategy
//! name = restrictive
//! cash_revenues = 2000
//! ca_to_cr = 0.3
//! fixed_assets = 1400
//! ebit_share = 0.5
//! unleveraged_beta = 0.77
//! debt_equity_ratio = 0.4/0.6   # optional, this is the default
//! payables_to_ca = 0.5          # optional, this is the default
//! ```
//!
//! Numbers may be written as a quotient `a/b`.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::strategy::{
    compare_strategies, CapitalWeights, Comparison, MarketConditions, ModelError, RoundingPolicy,
    StrategyProfile,
};
use crate::sz::SzCurve;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("[{section}] is missing required key `{key}`")]
    MissingKey { section: String, key: &'static str },
    #[error("missing required section [{0}]")]
    MissingSection(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl ConfigError {
    pub fn is_io(&self) -> bool {
        matches!(self, Self::Io { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub market: MarketConditions,
    pub weights: CapitalWeights,
    pub profiles: Vec<StrategyProfile>,
    pub curve: SzCurve,
    pub rounding: RoundingPolicy,
}

impl ScenarioConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        text.parse()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.market.validate()?;
        self.weights.validate()?;
        if self.profiles.is_empty() {
            return Err(ModelError::NoProfiles);
        }
        self.profiles.iter().try_for_each(StrategyProfile::validate)
    }

    pub fn evaluate(&self) -> Result<Comparison, ModelError> {
        compare_strategies(&self.profiles, &self.market, &self.weights, &self.curve, self.rounding)
    }
}

struct Section {
    name: String,
    header_line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn number(&mut self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        self.take(key).map(|(line, v)| parse_number(&v).map_err(|message| ConfigError::Syntax { line, message })).transpose()
    }

    fn required(&mut self, key: &'static str) -> Result<f64, ConfigError> {
        self.number(key)?.ok_or_else(|| ConfigError::MissingKey { section: self.name.clone(), key })
    }

    fn flag(&mut self, key: &'static str) -> Result<bool, ConfigError> {
        match self.take(key) {
            None => Ok(false),
            Some((line, v)) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(ConfigError::Syntax { line, message: format!("`{v}` is not a boolean") }),
            },
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(ConfigError::Syntax {
                line,
                message: format!("unknown key `{key}` in [{}]", self.name),
            }),
        }
    }
}

fn parse_number(text: &str) -> Result<f64, String> {
    let bad = || format!("`{text}` is not a number");
    let value = match text.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(format!("`{text}` divides by zero"));
            }
            n / d
        }
        None => text.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn split_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax { line: line_no, message: "unterminated section header".into() })?
                .trim()
                .to_ascii_lowercase();
            if !matches!(name.as_str(), "market" | "weights" | "rounding" | "sz" | "profile") {
                return Err(ConfigError::Syntax { line: line_no, message: format!("unknown section [{name}]") });
            }
            if name != "profile" && sections.iter().any(|s| s.name == name) {
                return Err(ConfigError::Syntax { line: line_no, message: format!("section [{name}] repeated") });
            }
            sections.push(Section { name, header_line: line_no, entries: BTreeMap::new() });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line: line_no, message: format!("expected `key = value`, got `{line}`") })?;
        let section = sections
            .last_mut()
            .ok_or_else(|| ConfigError::Syntax { line: line_no, message: "key outside of any section".into() })?;
        let key = key.trim().to_ascii_lowercase();
        if section.entries.insert(key.clone(), (line_no, value.trim().to_string())).is_some() {
            return Err(ConfigError::Syntax { line: line_no, message: format!("duplicate key `{key}`") });
        }
    }
    Ok(sections)
}

impl std::str::FromStr for ScenarioConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut market = None;
        let mut weights = None;
        let mut rounding = RoundingPolicy::default();
        let mut curve = None;
        let mut profiles = Vec::new();

        for mut s in split_sections(text)? {
            match s.name.as_str() {
                "market" => {
                    market = Some(MarketConditions {
                        risk_free_rate: s.required("risk_free_rate")?,
                        market_return: s.required("market_return")?,
                        tax_rate: s.required("tax_rate")?,
                        long_debt_spread: s.required("long_debt_spread")?,
                        short_debt_spread: s.required("short_debt_spread")?,
                    });
                }
                "weights" => {
                    weights = Some(CapitalWeights {
                        equity_share: s.required("equity")?,
                        long_debt_share: s.required("long_debt")?,
                        short_debt_share: s.required("short_debt")?,
                    });
                }
                "rounding" => {
                    rounding = RoundingPolicy {
                        round_statement_lines: s.flag("statement_lines")?,
                        round_leveraged_beta: s.flag("leveraged_beta")?,
                    };
                }
                "sz" => {
                    curve = Some(match (s.take("variant"), s.take("anchors")) {
                        (Some((_, v)), None) => SzCurve::builtin(&v)?,
                        (None, Some((_, list))) => {
                            let name = s.take("name").map(|(_, n)| n).unwrap_or_else(|| "custom".into());
                            SzCurve::from_anchor_list(name, &list)?
                        }
                        (Some(_), Some((line, _))) => {
                            return Err(ConfigError::Syntax {
                                line,
                                message: "[sz] takes either `variant` or `anchors`, not both".into(),
                            })
                        }
                        (None, None) => {
                            return Err(ConfigError::Syntax {
                                line: s.header_line,
                                message: "[sz] needs `variant` or `anchors`".into(),
                            })
                        }
                    });
                }
                "profile" => {
                    let name = s
                        .take("name")
                        .map(|(_, n)| n)
                        .unwrap_or_else(|| format!("profile{}", profiles.len() + 1));
                    profiles.push(StrategyProfile {
                        name,
                        cash_revenues: s.required("cash_revenues")?,
                        ca_to_cr: s.required("ca_to_cr")?,
                        fixed_assets: s.required("fixed_assets")?,
                        ebit_share: s.required("ebit_share")?,
                        unleveraged_beta: s.required("unleveraged_beta")?,
                        payables_to_ca: s.number("payables_to_ca")?.unwrap_or(StrategyProfile::DEFAULT_PAYABLES_TO_CA),
                        hamada_debt_equity_ratio: s
                            .number("debt_equity_ratio")?
                            .unwrap_or(StrategyProfile::DEFAULT_DEBT_EQUITY_RATIO),
                    });
                }
                _ => unreachable!("section names are checked while splitting"),
            }
            s.finish()?;
        }

        let config = ScenarioConfig {
            market: market.ok_or(ConfigError::MissingSection("market"))?,
            weights: weights.ok_or(ConfigError::MissingSection("weights"))?,
            curve: curve.ok_or(ConfigError::MissingSection("sz"))?,
            rounding,
            profiles,
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[market]
risk_free_rate = 0.04
market_return = 0.18
tax_rate = 0.19
long_debt_spread = 0.09
short_debt_spread = 0.12
[weights]
equity = 0.4
long_debt = 0.2
short_debt = 0.4
[sz]
variant = SZ1
[profile]
name = restrictive
cash_revenues = 2000
ca_to_cr = 0.3
fixed_assets = 1400
ebit_share = 0.5
unleveraged_beta = 0.77
";

    #[test]
    fn parses_minimal_config_with_defaults() {
        let c: ScenarioConfig = MINIMAL.parse().unwrap();
        assert_eq!(c.market, MarketConditions::PRE_CRISIS);
        assert_eq!(c.weights, CapitalWeights::DEFAULT);
        assert_eq!(c.rounding, RoundingPolicy::FULL_PRECISION);
        assert_eq!(c.profiles, vec![StrategyProfile::restrictive()]);
        assert_eq!(c.curve.name(), "SZ1");
    }

    #[test]
    fn quotient_numbers() {
        assert_eq!(parse_number("0.4/0.6").unwrap(), 0.4 / 0.6);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("x").is_err());
        assert!(parse_number("inf").is_err());
    }

    #[test]
    fn zero_profiles_is_a_validation_error() {
        let text = MINIMAL.split("[profile]").next().unwrap();
        let err = text.parse::<ScenarioConfig>().unwrap_err();
        assert!(matches!(err, ConfigError::Model(ModelError::NoProfiles)));
    }

    #[test]
    fn field_level_errors() {
        let err = MINIMAL.replace("tax_rate = 0.19", "tax_rate = 1.2").parse::<ScenarioConfig>().unwrap_err();
        assert!(err.to_string().contains("market.tax_rate"), "{err}");

        let err = MINIMAL.replace("ebit_share = 0.5", "ebit_share = half").parse::<ScenarioConfig>().unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 19, .. }), "{err:?}");

        let err = MINIMAL.replace("ebit_share = 0.5\n", "").parse::<ScenarioConfig>().unwrap_err();
        assert!(matches!(err, ConfigError::MissingKey { key: "ebit_share", .. }));

        let err = MINIMAL.replace("variant = SZ1", "variant = SZ2").parse::<ScenarioConfig>().unwrap_err();
        assert!(matches!(err, ConfigError::Model(ModelError::UnsupportedVariant { .. })));

        let err = format!("{MINIMAL}colour = blue\n").parse::<ScenarioConfig>().unwrap_err();
        assert!(err.to_string().contains("unknown key `colour`"));

        let err = format!("{MINIMAL}[market]\n").parse::<ScenarioConfig>().unwrap_err();
        assert!(err.to_string().contains("repeated"));
    }

    #[test]
    fn custom_anchors() {
        let text = MINIMAL.replace("variant = SZ1", "anchors = 0.2:1, 0.8:0.1");
        let c: ScenarioConfig = text.parse().unwrap();
        assert_eq!(c.curve.name(), "custom");
        assert_eq!(c.curve.anchors().len(), 2);
    }
}
