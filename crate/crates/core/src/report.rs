//! The metrics report document and exact-number rendering.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::engine::{LayerKey, LayerMetrics};
use crate::model::FeatureModel;

pub const TOOL: &str = "scas";
pub const VARIABILITY_DENOMINATOR: &str = "2^n - 1";
pub const SIGNIFICANT_DIGITS: usize = 6;

/// `num/den` as written.
pub fn fraction(num: &BigUint, den: &BigUint) -> String {
    format!("{num}/{den}")
}

/// `num/den`, or just `num` when `den` is 1.
pub fn ratio_text(num: &BigUint, den: &BigUint) -> String {
    if den.is_one() {
        num.to_string()
    } else {
        fraction(num, den)
    }
}

/// Decimal rendering of `num/den` with `digits` significant digits,
/// rounding half up.
pub fn decimal(num: &BigUint, den: &BigUint, digits: usize) -> String {
    assert!(!den.is_zero() && digits > 0);
    if num.is_zero() {
        return format!("0.{}", "0".repeat(digits - 1));
    }
    let ten = BigUint::from(10u32);
    // Smallest e with num/den < 10^(e+1).
    let mut exp: i64 = num.to_string().len() as i64 - den.to_string().len() as i64;
    let pow = |e: i64| num_traits::pow(ten.clone(), e.unsigned_abs() as usize);
    let below = |e: i64| if e >= 0 { *num < den * pow(e) } else { num * pow(e) < *den };
    while below(exp) {
        exp -= 1;
    }
    while !below(exp + 1) {
        exp += 1;
    }
    let round = |exp: i64| {
        // scaled = round(num/den * 10^(digits-1-exp))
        let shift = digits as i64 - 1 - exp;
        let (n, d) = if shift >= 0 { (num * pow(shift), den.clone()) } else { (num.clone(), den * pow(shift)) };
        let (q, r) = n.div_rem(&d);
        if r * 2u32 >= d {
            q + 1u32
        } else {
            q
        }
    };
    let mut scaled = round(exp);
    if scaled.to_string().len() > digits {
        exp += 1;
        scaled = round(exp);
    }
    let s = scaled.to_string();
    if exp >= digits as i64 - 1 {
        format!("{s}{}", "0".repeat((exp - (digits as i64 - 1)) as usize))
    } else if exp >= 0 {
        let split = exp as usize + 1;
        format!("{}.{}", &s[..split], &s[split..])
    } else {
        format!("0.{}{s}", "0".repeat((-exp - 1) as usize))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactValue {
    /// Unreduced fraction as computed.
    pub fraction: String,
    pub reduced: String,
    pub decimal: String,
}

impl ExactValue {
    pub fn new(num: &BigUint, den: &BigUint) -> Self {
        let g = num.gcd(den);
        ExactValue {
            fraction: fraction(num, den),
            reduced: fraction(&(num / &g), &(den / &g)),
            decimal: decimal(num, den, SIGNIFICANT_DIGITS),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommonalityRow {
    pub feature: String,
    pub share: u64,
    pub commonality: ExactValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScopeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layer: Option<String>,
    pub scope: String,
    pub k: u64,
    pub n: usize,
    pub variability: ExactValue,
    pub commonality: Vec<CommonalityRow>,
}

impl ScopeReport {
    pub fn new(key: Option<LayerKey>, metrics: &LayerMetrics) -> Self {
        let k = BigUint::from(metrics.k);
        ScopeReport {
            level: key.and_then(|k| k.level).map(|l| l.to_string()),
            layer: key.map(|k| k.layer.to_string()),
            scope: metrics.scope.to_string(),
            k: metrics.k,
            n: metrics.n,
            variability: ExactValue::new(&k, &metrics.subset_count()),
            commonality: metrics
                .shares
                .iter()
                .map(|(f, s)| CommonalityRow {
                    feature: f.to_string(),
                    share: *s,
                    commonality: ExactValue::new(&BigUint::from(*s), &k),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub root: String,
    pub features: usize,
    pub arcs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub input_sha256: String,
    pub model: ModelSummary,
    pub variability_denominator: String,
    pub scopes: Vec<ScopeReport>,
}

impl Report {
    pub fn new(input: &[u8], model: &FeatureModel, scopes: Vec<ScopeReport>) -> Self {
        Report {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_sha256: hex_digest(input),
            model: ModelSummary {
                root: model.root().id.to_string(),
                features: model.feature_count(),
                arcs: model.arc_count(),
            },
            variability_denominator: VARIABILITY_DENOMINATOR.to_string(),
            scopes,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
