//! Log-domain values tagged with how much of the infinite tail they account for.

use serde::{Serialize, Serializer};

/// Tolerance band for log-domain threshold comparisons.
pub const LOG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    /// The value is the true infimum/supremum over the infinite index range.
    Exact,
    /// The true value is at least `log_value`.
    LowerBounded,
    /// The true value is at most `log_value`.
    UpperBounded,
    /// Only the finite horizon was inspected.
    HorizonOnly,
}

impl Status {
    pub fn is_certified(self) -> bool {
        !matches!(self, Status::HorizonOnly)
    }
}

/// Indices realizing a reported value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub big_n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedValue {
    #[serde(serialize_with = "ser_ext")]
    pub log_value: f64,
    pub status: Status,
    pub provenance: Provenance,
    /// Last index inspected numerically.
    pub horizon: i64,
    /// Extremum over the inspected horizon (always finite data, possibly ±inf for
    /// vanishing terms).
    #[serde(serialize_with = "ser_ext")]
    pub horizon_value: f64,
}

impl CertifiedValue {
    pub fn exact(log_value: f64, provenance: Provenance, horizon: i64, horizon_value: f64) -> Self {
        CertifiedValue {
            log_value,
            status: Status::Exact,
            provenance,
            horizon,
            horizon_value,
        }
    }

    pub fn horizon_only(horizon_value: f64, provenance: Provenance, horizon: i64) -> Self {
        CertifiedValue {
            log_value: horizon_value,
            status: Status::HorizonOnly,
            provenance,
            horizon,
            horizon_value,
        }
    }

    /// Multiplicative value `exp(log_value)`.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// Serializes non-finite floats as the strings `"+inf"`, `"-inf"`, `"nan"`.
pub fn ser_ext<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("+inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn ser_ext_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_ext(v, s),
        None => s.serialize_none(),
    }
}

pub fn ser_ext_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Ext(f64);
    impl Serialize for Ext {
        fn serialize<S2: Serializer>(&self, s: S2) -> Result<S2::Ok, S2::Error> {
            ser_ext(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&Ext(*x))?;
    }
    seq.end()
}

/// Limit behaviour of `kcoef * k + lncoef * ln k + O(1)` as `k -> inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    ToMinusInf,
    ToPlusInf,
    Bounded,
}

pub fn trend(kcoef: f64, lncoef: f64) -> Trend {
    if kcoef < -LOG_TOL {
        Trend::ToMinusInf
    } else if kcoef > LOG_TOL {
        Trend::ToPlusInf
    } else if lncoef < -LOG_TOL {
        Trend::ToMinusInf
    } else if lncoef > LOG_TOL {
        Trend::ToPlusInf
    } else {
        Trend::Bounded
    }
}

/// Lexicographic sign of a coefficient vector ordered by decreasing growth;
/// `0` when every entry lies inside the tolerance band.
pub fn lex_sign(coefs: &[f64]) -> i8 {
    for &c in coefs {
        if c.is_nan() {
            continue;
        }
        if c > LOG_TOL {
            return 1;
        }
        if c < -LOG_TOL {
            return -1;
        }
    }
    0
}

/// Greatest common divisor / least common multiple on periods.
pub(crate) fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}
