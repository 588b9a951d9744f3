//! Hypotheses for hypercyclic subspaces of `P(B_w)`.

use serde::Serialize;

use crate::certified::{trend, Status, Trend};
use crate::criteria::tail::{tail_inf, Criterion, CriterionValue};
use crate::criteria::verdict::Outcome;
use crate::error::{Error, Result};
use crate::spaces::{check_condition_b, ConditionReport, Holds, Horizons, RowFamily, SpaceModel};
use crate::weights::{NamedGenerator, WeightFamily, WeightSequence};

/// Largest window start inspected when listing dip witnesses.
pub const DIP_WITNESS_LIMIT: i64 = 1 << 14;

/// Whether `P(B_w)` is known to satisfy the Hypercyclicity Criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Premise {
    Known(String),
    Assumed,
}

/// A window `[k+1, k+n]` that contains the dip `|w_{2^i}| = 2^-i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipWitness {
    pub n: usize,
    pub i: u32,
    pub k: i64,
    /// `(n - 1 - i) ln 2`.
    pub closed_form: f64,
    pub evaluated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyVerdict {
    pub outcome: Outcome,
    pub weights: String,
    pub space: String,
    pub poly: Vec<f64>,
    /// `J` with certified condition (B), if any.
    #[serde(rename = "J")]
    pub big_j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_b: Option<ConditionReport>,
    /// Least `m` whose windows have infimum `0` for every `n <= n_max`.
    pub inf_zero_m: Option<usize>,
    pub criterion_values: Vec<CriterionValue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dip_witnesses: Vec<DipWitness>,
    /// `|c_0| <= 1`.
    pub constant_term_ok: bool,
    /// Least `m'` with `a_{J,k} / a_{m',k} -> 0`.
    pub ratio_to_zero_m: Option<usize>,
    pub premise: Premise,
    pub horizons: Horizons,
    pub notes: Vec<String>,
}

/// Drops trailing zero coefficients; constants are rejected.
pub fn trim_poly(coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("polynomial coefficients must be finite"));
    }
    let deg = coeffs.iter().rposition(|&c| c != 0.0);
    match deg {
        Some(d) if d >= 1 => Ok(coeffs[..=d].to_vec()),
        _ => Err(Error::domain("the polynomial must be non-constant")),
    }
}

fn premise(w: &WeightSequence, space: &SpaceModel, poly: &[f64]) -> Premise {
    if matches!(w.family(), WeightFamily::Linear) && matches!(space.rows, RowFamily::PowerOfJ) {
        return Premise::Known("every non-scalar operator commuting with differentiation on H(C) is chaotic".into());
    }
    if matches!(space.rows, RowFamily::Unit) && poly == [1.0, 1.0] {
        return Premise::Known("I + B_w satisfies the criterion on l^p and c_0".into());
    }
    Premise::Assumed
}

fn dip_witnesses(c: &Criterion, n_max: usize) -> Vec<DipWitness> {
    let ln2 = std::f64::consts::LN_2;
    let mut out = Vec::new();
    for n in 1..=n_max {
        let mut i = (n as f64).log2().ceil() as u32;
        while (1i64 << i) - 1 + n as i64 <= DIP_WITNESS_LIMIT {
            let k = (1i64 << i) - 1;
            if k >= c.base() {
                out.push(DipWitness {
                    n,
                    i,
                    k,
                    closed_form: (n as f64 - 1.0 - i as f64) * ln2,
                    evaluated: c.value(n, k),
                });
            }
            i += 1;
        }
    }
    out
}

pub fn poly_hypothesis_check(
    w: &WeightSequence,
    space: &SpaceModel,
    coeffs: &[f64],
    h: &Horizons,
) -> Result<PolyVerdict> {
    let poly = trim_poly(coeffs)?;
    if w.is_bilateral() || space.bilateral {
        return Err(Error::domain("polynomial hypotheses are stated for unilateral shifts"));
    }
    if h.j_max == 0 || h.m_max == 0 || h.n_max == 0 || h.k_horizon < 1 {
        return Err(Error::domain("horizons must be positive"));
    }
    let mut v = PolyVerdict {
        outcome: Outcome::UnknownAtHorizon,
        weights: w.render(),
        space: space.render(),
        poly: poly.clone(),
        big_j: None,
        condition_b: None,
        inf_zero_m: None,
        criterion_values: Vec::new(),
        dip_witnesses: Vec::new(),
        constant_term_ok: poly[0].abs() <= 1.0,
        ratio_to_zero_m: None,
        premise: premise(w, space, &poly),
        horizons: *h,
        notes: Vec::new(),
    };

    for j in 1..=h.j_max {
        let cb = check_condition_b(space, j, h)?;
        let ok = cb.certified && cb.holds == Holds::Holds;
        if ok || j == h.j_max {
            v.condition_b = Some(cb);
        }
        if ok {
            v.big_j = Some(j);
            break;
        }
    }
    let Some(big_j) = v.big_j else {
        v.notes.push(format!("condition (B) not certified for any J <= {}", h.j_max));
        return Ok(v);
    };

    let ms: Vec<usize> = if space.rows_identical() { vec![big_j] } else { (1..=h.m_max).collect() };
    let mut fallback = None;
    for &m in &ms {
        let c = Criterion::new(w, space, big_j, m)?;
        let values = (1..=h.n_max)
            .map(|n| tail_inf(&c, n, c.base(), h.k_horizon))
            .collect::<Result<Vec<_>>>()?;
        let zero = values
            .iter()
            .all(|cv| cv.status == Status::Exact && cv.inf_log == f64::NEG_INFINITY);
        if zero {
            v.inf_zero_m = Some(m);
            v.criterion_values = values;
            if w.named_generator() == Some(NamedGenerator::Dips) {
                v.dip_witnesses = dip_witnesses(&c, h.n_max);
            }
            break;
        }
        fallback.get_or_insert(values);
    }
    if v.inf_zero_m.is_none() {
        v.criterion_values = fallback.unwrap_or_default();
        v.notes.push(format!("no m <= {} certifies inf = 0 for every n <= {}", h.m_max, h.n_max));
    }

    if let Some(gj) = space.row_growth(big_j) {
        v.ratio_to_zero_m = (1..=h.m_max).find(|&m| {
            space
                .row_growth(m)
                .is_some_and(|gm| trend(gj.beta - gm.beta, gj.alpha - gm.alpha) == Trend::ToMinusInf)
        });
    }
    if !v.constant_term_ok && v.ratio_to_zero_m.is_none() {
        v.notes.push(format!(
            "|c_0| = {} exceeds 1 and no row ratio a_(J,k) / a_(m,k) tends to 0",
            poly[0].abs()
        ));
    }

    if v.inf_zero_m.is_some() && (v.constant_term_ok || v.ratio_to_zero_m.is_some()) {
        v.outcome = Outcome::HasSubspace;
        if v.premise == Premise::Assumed {
            v.notes.push("assumes P(B_w) satisfies the Hypercyclicity Criterion".into());
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::parse_space_spec;
    use crate::weights::parse_weight_spec;

    fn check(w: &str, s: &str, p: &[f64]) -> PolyVerdict {
        let w = parse_weight_spec(w).unwrap();
        let s = parse_space_spec(s).unwrap();
        poly_hypothesis_check(&w, &s, p, &Horizons::default()).unwrap()
    }

    #[test]
    fn examples() {
        let v = check("linear", "entire", &[1.0, 1.0, 1.0]);
        assert_eq!(v.outcome, Outcome::HasSubspace);
        assert_eq!(v.big_j, Some(1));
        assert_eq!(v.inf_zero_m, Some(2));
        assert!(v.constant_term_ok);
        assert_eq!(v.ratio_to_zero_m, Some(2));

        let v = check("named:dips", "lp:2", &[1.0, 1.0]);
        assert_eq!(v.outcome, Outcome::HasSubspace);
        assert!(!v.dip_witnesses.is_empty());
        for d in &v.dip_witnesses {
            assert!((d.closed_form - d.evaluated).abs() < 1e-9);
        }

        let v = check("const:2", "lp:2", &[1.0, 1.0]);
        assert_eq!(v.outcome, Outcome::UnknownAtHorizon);
    }

    #[test]
    fn constant_rejected() {
        assert!(trim_poly(&[3.0, 0.0]).is_err());
        assert_eq!(trim_poly(&[1.0, 2.0, 0.0]).unwrap(), vec![1.0, 2.0]);
    }
}
