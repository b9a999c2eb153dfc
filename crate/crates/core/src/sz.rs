//! Strategy risk-premium correction as a function of CA/CR.
//!
//! A curve is a piecewise-linear function through a small set of anchors.
//! Restrictive strategies (low CA/CR) carry the largest premium, so the anchor
//! premiums must strictly decrease as CA/CR grows. Outside the anchored range
//! the curve is flat at the end values.

use serde::Serialize;
use std::fmt;

use crate::strategy::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anchor {
    pub ca_cr: f64,
    pub sz: f64,
}

impl Anchor {
    pub const fn new(ca_cr: f64, sz: f64) -> Self {
        Self { ca_cr, sz }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SzCurve {
    name: String,
    anchors: Vec<Anchor>,
}

const SZ1: [Anchor; 3] = [
    Anchor::new(0.3, 0.2),
    Anchor::new(0.45, 0.1),
    Anchor::new(0.6, 0.01),
];

const SZ3: [Anchor; 3] = [
    Anchor::new(0.3, 2.0),
    Anchor::new(0.45, 0.1),
    Anchor::new(0.6, 0.001),
];

impl SzCurve {
    /// Builds a curve from user anchors, validating ordering and sign.
    pub fn new(name: impl Into<String>, anchors: Vec<Anchor>) -> Result<Self, ModelError> {
        if anchors.len() < 2 {
            return Err(ModelError::invalid("sz.anchors", "at least two anchors are required"));
        }
        for (i, a) in anchors.iter().enumerate() {
            if !a.ca_cr.is_finite() || !a.sz.is_finite() {
                return Err(ModelError::invalid("sz.anchors", format!("anchor {} is not finite", i + 1)));
            }
            if a.sz < 0.0 {
                return Err(ModelError::invalid("sz.anchors", format!("anchor {} has a negative premium", i + 1)));
            }
        }
        for (i, pair) in anchors.windows(2).enumerate() {
            if pair[1].ca_cr <= pair[0].ca_cr {
                return Err(ModelError::invalid(
                    "sz.anchors",
                    format!("CA/CR must strictly increase (anchor {} vs {})", i + 1, i + 2),
                ));
            }
            if pair[1].sz >= pair[0].sz {
                return Err(ModelError::invalid(
                    "sz.anchors",
                    format!("premium must strictly decrease (anchor {} vs {})", i + 1, i + 2),
                ));
            }
        }
        Ok(Self { name: name.into(), anchors })
    }

    /// Returns one of the built-in variants, `SZ1` or `SZ3` (case-insensitive).
    ///
    /// `SZ2` is deliberately rejected: only its qualitative shape is known,
    /// none of its anchor values are.
    pub fn builtin(name: &str) -> Result<Self, ModelError> {
        match name.trim().to_ascii_uppercase().as_str() {
            "SZ1" => Ok(Self { name: "SZ1".into(), anchors: SZ1.to_vec() }),
            "SZ3" => Ok(Self { name: "SZ3".into(), anchors: SZ3.to_vec() }),
            "SZ2" => Err(ModelError::UnsupportedVariant {
                name: name.to_string(),
                detail: "SZ2 has no defined anchor values; supply explicit anchors instead".into(),
            }),
            _ => Err(ModelError::UnsupportedVariant {
                name: name.to_string(),
                detail: "known variants are SZ1 and SZ3".into(),
            }),
        }
    }

    /// Parses `ca:sz` pairs separated by commas, e.g. `0.3:0.2, 0.45:0.1, 0.6:0.01`.
    pub fn from_anchor_list(name: impl Into<String>, list: &str) -> Result<Self, ModelError> {
        let mut anchors = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (x, y) = item
                .split_once(':')
                .ok_or_else(|| ModelError::invalid("sz.anchors", format!("`{item}` is not a ca:sz pair")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| ModelError::invalid("sz.anchors", format!("`{}` is not a number", s.trim())))
            };
            anchors.push(Anchor::new(parse(x)?, parse(y)?));
        }
        Self::new(name, anchors)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    /// Premium at `ca_cr`, interpolated linearly between the bracketing anchors
    /// and clamped to the end anchors outside their range.
    pub fn sz_at(&self, ca_cr: f64) -> f64 {
        let first = self.anchors[0];
        let last = self.anchors[self.anchors.len() - 1];
        if ca_cr <= first.ca_cr {
            return first.sz;
        }
        if ca_cr >= last.ca_cr {
            return last.sz;
        }
        // first anchor with abscissa >= ca_cr; guaranteed to be > 0 here
        let hi = self.anchors.partition_point(|a| a.ca_cr < ca_cr);
        let (a, b) = (self.anchors[hi - 1], self.anchors[hi]);
        if ca_cr == b.ca_cr {
            return b.sz;
        }
        let t = (ca_cr - a.ca_cr) / (b.ca_cr - a.ca_cr);
        a.sz + t * (b.sz - a.sz)
    }
}

impl fmt::Display for SzCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [", self.name)?;
        for (i, a) in self.anchors.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", a.ca_cr, a.sz)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn builtin_anchor_sets() {
        let sz1 = SzCurve::builtin("SZ1").unwrap();
        assert_eq!(sz1.anchors(), &SZ1);
        let sz3 = SzCurve::builtin("sz3").unwrap();
        assert_eq!(
            sz3.anchors(),
            &[Anchor::new(0.3, 2.0), Anchor::new(0.45, 0.1), Anchor::new(0.6, 0.001)]
        );
    }

    #[test]
    fn sz2_is_unsupported() {
        assert!(matches!(SzCurve::builtin("SZ2"), Err(ModelError::UnsupportedVariant { .. })));
        assert!(matches!(SzCurve::builtin("SZ9"), Err(ModelError::UnsupportedVariant { .. })));
    }

    #[test]
    fn interpolation_examples() {
        let sz1 = SzCurve::builtin("SZ1").unwrap();
        assert_eq!(sz1.sz_at(0.45), 0.1);
        // midway between (0.3, 0.2) and (0.45, 0.1)
        assert_abs_diff_eq!(sz1.sz_at(0.375), 0.15, epsilon = 1e-12);
        assert_eq!(sz1.sz_at(0.9), 0.01);
        assert_eq!(sz1.sz_at(0.05), 0.2);
    }

    #[test]
    fn rejects_bad_anchor_sets() {
        assert!(SzCurve::new("x", vec![Anchor::new(0.3, 0.2)]).is_err());
        assert!(SzCurve::new("x", vec![Anchor::new(0.3, 0.2), Anchor::new(0.3, 0.1)]).is_err());
        assert!(SzCurve::new("x", vec![Anchor::new(0.3, 0.1), Anchor::new(0.4, 0.2)]).is_err());
        assert!(SzCurve::new("x", vec![Anchor::new(0.3, 0.1), Anchor::new(0.4, -0.2)]).is_err());
        assert!(SzCurve::from_anchor_list("x", "0.3:0.2, 0.45").is_err());
    }

    #[test]
    fn parses_anchor_list() {
        let c = SzCurve::from_anchor_list("custom", "0.3:0.2, 0.45:0.1,0.6:0.01").unwrap();
        assert_eq!(c.anchors(), SzCurve::builtin("SZ1").unwrap().anchors());
    }

    fn arb_curve() -> impl Strategy<Value = SzCurve> {
        prop::collection::vec((0.01f64..1.0, 0.001f64..1.0), 2..8).prop_map(|steps| {
            let mut x = 0.0;
            let mut y: f64 = steps.iter().map(|s| s.1).sum::<f64>() + 0.01;
            let anchors = steps
                .iter()
                .map(|&(dx, dy)| {
                    x += dx;
                    y -= dy;
                    Anchor::new(x, y)
                })
                .collect();
            SzCurve::new("gen", anchors).unwrap()
        })
    }

    proptest! {
        #[test]
        fn monotone_nonincreasing(curve in arb_curve(), a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(curve.sz_at(lo) >= curve.sz_at(hi));
        }

        #[test]
        fn exact_at_anchors_and_bounded(curve in arb_curve(), x in 0.0f64..10.0) {
            for a in curve.anchors() {
                prop_assert_eq!(curve.sz_at(a.ca_cr), a.sz);
            }
            let min = curve.anchors().last().unwrap().sz;
            let max = curve.anchors()[0].sz;
            let v = curve.sz_at(x);
            prop_assert!(v >= min && v <= max);
        }
    }
}
