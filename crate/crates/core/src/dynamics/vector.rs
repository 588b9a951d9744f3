//! Finitely supported vectors with log-domain coefficients and the shift action.

use std::collections::BTreeMap;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::SpaceModel;
use crate::weights::WeightSequence;

/// Log-magnitudes beyond this no longer round-trip through `f64`.
pub const LOG_EXPONENT_LIMIT: f64 = 700.0;

/// Non-zero coefficient stored as `sign * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coef {
    pub negative: bool,
    pub log_abs: f64,
}

impl Coef {
    pub fn from_value(c: f64) -> Option<Coef> {
        (c != 0.0).then(|| Coef {
            negative: c < 0.0,
            log_abs: c.abs().ln(),
        })
    }

    pub fn value(self) -> f64 {
        let v = self.log_abs.exp();
        if self.negative {
            -v
        } else {
            v
        }
    }

    fn negated(self) -> Coef {
        Coef {
            negative: !self.negative,
            ..self
        }
    }
}

/// Signed sum of log-domain terms; `None` when the terms cancel up to rounding.
fn signed_log_sum(terms: &[Coef]) -> Option<Coef> {
    if let [one] = terms {
        return Some(*one);
    }
    let m = terms.iter().map(|t| t.log_abs).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms
        .iter()
        .map(|t| {
            let v = (t.log_abs - m).exp();
            if t.negative {
                -v
            } else {
                v
            }
        })
        .sum();
    // Residues at the rounding floor of the largest term are cancellations.
    let floor = 8.0 * f64::EPSILON * terms.len() as f64;
    (s.abs() > floor).then(|| Coef {
        negative: s < 0.0,
        log_abs: m + s.abs().ln(),
    })
}

/// `x = sum_k x_k e_k` with finitely many non-zero `x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedVector {
    entries: BTreeMap<i64, Coef>,
    index_base: i64,
    bilateral: bool,
}

impl TruncatedVector {
    pub fn zero(space: &SpaceModel) -> Self {
        TruncatedVector {
            entries: BTreeMap::new(),
            index_base: space.index_base,
            bilateral: space.bilateral,
        }
    }

    fn check_index(&self, k: i64) -> Result<()> {
        if !self.bilateral && k < self.index_base {
            return Err(Error::domain(format!(
                "index {k} lies below the index base {}",
                self.index_base
            )));
        }
        Ok(())
    }

    pub fn from_pairs(space: &SpaceModel, pairs: &[(i64, f64)]) -> Result<Self> {
        let mut x = Self::zero(space);
        for &(k, c) in pairs {
            x.check_index(k)?;
            if !c.is_finite() {
                return Err(Error::domain(format!("coefficient at index {k} is not finite")));
            }
            if x.entries.contains_key(&k) {
                return Err(Error::domain(format!("index {k} appears twice")));
            }
            if let Some(coef) = Coef::from_value(c) {
                x.entries.insert(k, coef);
            }
        }
        Ok(x)
    }

    /// `e_k`.
    pub fn basis(space: &SpaceModel, k: i64) -> Result<Self> {
        Self::from_pairs(space, &[(k, 1.0)])
    }

    /// `exp(log_abs) e_k`, for coefficients outside the `f64` range.
    pub fn scaled_basis(space: &SpaceModel, k: i64, log_abs: f64) -> Result<Self> {
        let mut x = Self::zero(space);
        x.check_index(k)?;
        if !log_abs.is_finite() {
            return Err(Error::domain("log-coefficient must be finite"));
        }
        x.entries.insert(k, Coef { negative: false, log_abs });
        Ok(x)
    }

    pub fn index_base(&self) -> i64 {
        self.index_base
    }

    pub fn is_bilateral(&self) -> bool {
        self.bilateral
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    pub fn coefficient(&self, k: i64) -> f64 {
        self.entries.get(&k).map_or(0.0, |c| c.value())
    }

    pub fn coef(&self, k: i64) -> Option<Coef> {
        self.entries.get(&k).copied()
    }

    /// `(k, x_k)` in increasing `k`.
    pub fn pairs(&self) -> Vec<(i64, f64)> {
        self.entries.iter().map(|(&k, c)| (k, c.value())).collect()
    }

    /// `(k, ln|x_k|)` in increasing `k`.
    pub fn log_pairs(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().map(|(&k, c)| (k, c.log_abs))
    }

    /// Indices whose coefficients overflow or underflow when re-exponentiated.
    pub fn out_of_range(&self) -> Vec<i64> {
        self.entries
            .iter()
            .filter(|(_, c)| c.log_abs.abs() > LOG_EXPONENT_LIMIT)
            .map(|(&k, _)| k)
            .collect()
    }

    fn same_layout(&self, other: &Self) -> Result<()> {
        if self.index_base != other.index_base || self.bilateral != other.bilateral {
            return Err(Error::domain("vectors live on different index sets"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_layout(other)?;
        let mut out = self.clone();
        for (&k, &c) in &other.entries {
            match out.entries.get(&k).copied() {
                None => {
                    out.entries.insert(k, c);
                }
                Some(prev) => match signed_log_sum(&[prev, c]) {
                    Some(s) => {
                        out.entries.insert(k, s);
                    }
                    None => {
                        out.entries.remove(&k);
                    }
                },
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        let Some(f) = Coef::from_value(c) else {
            return TruncatedVector {
                entries: BTreeMap::new(),
                ..self.clone()
            };
        };
        self.scale_log(f.log_abs, f.negative)
    }

    pub fn scale_log(&self, log_abs: f64, negate: bool) -> Self {
        let mut out = self.clone();
        for c in out.entries.values_mut() {
            c.log_abs += log_abs;
            if negate {
                *c = c.negated();
            }
        }
        out
    }

    /// `sum_i c_i y_i` with terms merged per index in one signed log-sum.
    pub(crate) fn combine(parts: &[(Coef, &TruncatedVector)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::domain("empty linear combination"))?
            .1;
        let mut terms: BTreeMap<i64, Vec<Coef>> = BTreeMap::new();
        for (c, y) in parts {
            first.same_layout(y)?;
            for (&k, &e) in &y.entries {
                terms.entry(k).or_default().push(Coef {
                    negative: e.negative != c.negative,
                    log_abs: e.log_abs + c.log_abs,
                });
            }
        }
        let mut out = TruncatedVector {
            entries: BTreeMap::new(),
            ..first.clone()
        };
        for (k, ts) in terms {
            if let Some(s) = signed_log_sum(&ts) {
                out.entries.insert(k, s);
            }
        }
        Ok(out)
    }
}

impl Serialize for TruncatedVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for (k, c) in &self.entries {
            seq.serialize_element(&(k, c.value()))?;
        }
        seq.end()
    }
}

/// Parses `k:c,k:c,...`.
pub fn parse_vector(space: &SpaceModel, text: &str) -> Result<TruncatedVector> {
    let mut pairs = Vec::new();
    let mut pos = 0;
    for item in text.split(',') {
        let trimmed = item.trim();
        let (ks, cs) = trimmed
            .split_once(':')
            .ok_or_else(|| Error::parse(text, pos, "expected `<index>:<coefficient>`"))?;
        let k: i64 = ks
            .trim()
            .parse()
            .map_err(|_| Error::parse(text, pos, format!("bad index `{}`", ks.trim())))?;
        let c: f64 = cs
            .trim()
            .parse()
            .map_err(|_| Error::parse(text, pos + ks.len() + 1, format!("bad coefficient `{}`", cs.trim())))?;
        pairs.push((k, c));
        pos += item.len() + 1;
    }
    TruncatedVector::from_pairs(space, &pairs)
}

/// `B_w x` with weight moduli: the coefficient at `k` moves to `k - 1` and is
/// multiplied by `|w_k|`.
fn shift_once(x: &TruncatedVector, w: &WeightSequence) -> TruncatedVector {
    let mut out = TruncatedVector {
        entries: BTreeMap::new(),
        ..x.clone()
    };
    for (&k, &c) in &x.entries {
        let target = k - 1;
        if !x.bilateral && target < x.index_base {
            continue;
        }
        out.entries.insert(
            target,
            Coef {
                negative: c.negative,
                log_abs: c.log_abs + w.log_at_unchecked(k),
            },
        );
    }
    out
}

/// `B_w^n x`, one step at a time so that `B^a B^b = B^(a+b)` holds bit for bit.
pub fn apply_shift(x: &TruncatedVector, w: &WeightSequence, n: usize) -> Result<TruncatedVector> {
    if w.is_bilateral() != x.bilateral {
        return Err(Error::domain("bilateral weights act on bilateral vectors only"));
    }
    let mut y = x.clone();
    for _ in 0..n {
        if y.is_zero() {
            break;
        }
        y = shift_once(&y, w);
    }
    Ok(y)
}

/// `x` with `B_w^n x = y`: the coefficient at `k` moves to `k + n` divided by
/// `prod_{v=1..n} |w_{k+v}|`.
pub fn right_inverse(y: &TruncatedVector, w: &WeightSequence, n: usize) -> Result<TruncatedVector> {
    if w.is_bilateral() != y.bilateral {
        return Err(Error::domain("bilateral weights act on bilateral vectors only"));
    }
    let mut out = TruncatedVector {
        entries: BTreeMap::new(),
        ..y.clone()
    };
    for (&k, &c) in &y.entries {
        let mut log_abs = c.log_abs;
        for v in (1..=n as i64).rev() {
            log_abs -= w.log_at_unchecked(k + v);
        }
        out.entries.insert(
            k + n as i64,
            Coef {
                negative: c.negative,
                log_abs,
            },
        );
    }
    Ok(out)
}

pub fn seminorm_log(x: &TruncatedVector, space: &SpaceModel, j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::domain("seminorm index j starts at 1"));
    }
    if x.bilateral != space.bilateral {
        return Err(Error::domain("vector and space disagree on bilaterality"));
    }
    Ok(space.seminorm_log(j, x.log_pairs()))
}

/// `p_j(x)`.
pub fn seminorm(x: &TruncatedVector, space: &SpaceModel, j: usize) -> Result<f64> {
    Ok(seminorm_log(x, space, j)?.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRow {
    pub n: usize,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub log_value: f64,
    pub value: f64,
}

/// `p_j(B_w^n x)` for `n = 0..=horizon`.
pub fn orbit_table(
    x: &TruncatedVector,
    w: &WeightSequence,
    space: &SpaceModel,
    j: usize,
    horizon: usize,
) -> Result<Vec<OrbitRow>> {
    let mut y = x.clone();
    let mut rows = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        if n > 0 {
            y = apply_shift(&y, w, 1)?;
        }
        let log_value = seminorm_log(&y, space, j)?;
        rows.push(OrbitRow {
            n,
            log_value,
            value: log_value.exp(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::parse_space_spec;
    use crate::weights::parse_weight_spec;

    fn sp(s: &str) -> SpaceModel {
        parse_space_spec(s).unwrap()
    }

    fn ws(s: &str) -> WeightSequence {
        parse_weight_spec(s).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn shift_examples() {
        let s = sp("entire");
        let y = apply_shift(&TruncatedVector::basis(&s, 3).unwrap(), &ws("linear"), 1).unwrap();
        assert_eq!(y.support_len(), 1);
        assert!(close(y.coefficient(2), 3.0));

        let s = sp("lp:2");
        let x = TruncatedVector::from_pairs(&s, &[(1, 1.0), (2, 1.0)]).unwrap();
        let y = apply_shift(&x, &ws("const:2"), 1).unwrap();
        assert_eq!(y.pairs(), vec![(1, 2.0)]);

        let w = ws("periodic:[3,0.5]");
        let y = apply_shift(&TruncatedVector::basis(&s, 7).unwrap(), &w, 4).unwrap();
        assert!(close(y.coefficient(3), w.window_log(4, 3).unwrap().exp()));
    }

    #[test]
    fn seminorm_examples() {
        let e3 = TruncatedVector::basis(&sp("entire"), 3).unwrap();
        assert!(close(seminorm(&e3, &sp("entire"), 2).unwrap(), 8.0));
        let s = sp("lp:2");
        let x = TruncatedVector::from_pairs(&s, &[(1, 3.0), (2, 4.0)]).unwrap();
        assert!(close(seminorm(&x, &s, 1).unwrap(), 5.0));
        let s = sp("c0");
        let x = TruncatedVector::from_pairs(&s, &[(1, 3.0), (2, 4.0)]).unwrap();
        assert!(close(seminorm(&x, &s, 1).unwrap(), 4.0));
    }

    #[test]
    fn orbit_examples() {
        let s = sp("lp:2");
        let e5 = TruncatedVector::basis(&s, 5).unwrap();
        let vals: Vec<f64> = orbit_table(&e5, &ws("const:2"), &s, 1, 5).unwrap().iter().map(|r| r.value).collect();
        for (v, e) in vals.iter().zip([1.0, 2.0, 4.0, 8.0, 16.0, 0.0]) {
            assert!(close(*v, e), "{vals:?}");
        }
        let s = sp("entire");
        let x = TruncatedVector::from_pairs(&s, &[(3, 1.0 / 6.0)]).unwrap();
        let vals: Vec<f64> = orbit_table(&x, &ws("linear"), &s, 1, 3).unwrap().iter().map(|r| r.value).collect();
        for (v, e) in vals.iter().zip([1.0 / 6.0, 0.5, 1.0, 1.0]) {
            assert!(close(*v, e), "{vals:?}");
        }
    }

    #[test]
    fn right_inverse_examples() {
        let s = sp("lp:2");
        let w = ws("const:2");
        let e1 = TruncatedVector::basis(&s, 1).unwrap();
        let x = right_inverse(&e1, &w, 3).unwrap();
        assert_eq!(x.support_len(), 1);
        assert!(close(x.coefficient(4), 0.125));
        let back = apply_shift(&x, &w, 3).unwrap();
        assert_eq!(back.support_len(), 1);
        assert!(close(back.coefficient(1), 1.0));

        let s = sp("entire");
        let x = right_inverse(&TruncatedVector::basis(&s, 0).unwrap(), &ws("linear"), 2).unwrap();
        assert!(close(x.coefficient(2), 0.5));

        let s = sp("lp:2");
        let y = TruncatedVector::from_pairs(&s, &[(1, 1.0), (2, 1.0)]).unwrap();
        let x = right_inverse(&y, &ws("periodic:[3,0.5]"), 2).unwrap();
        assert!(close(x.coefficient(3), 1.0 / 1.5));
        assert!(close(x.coefficient(4), 1.0 / 1.5));
    }

    #[test]
    fn parse_and_errors() {
        let s = sp("lp:2");
        let x = parse_vector(&s, "1:3, 2:-4").unwrap();
        assert!(close(x.coefficient(1), 3.0) && close(x.coefficient(2), -4.0));
        assert!(parse_vector(&s, "0:1").is_err());
        assert!(parse_vector(&s, "1:1,1:2").is_err());
        assert!(matches!(parse_vector(&s, "1;2"), Err(Error::Parse { .. })));
        let d = x.sub(&x).unwrap();
        assert!(d.is_zero());
    }
}
