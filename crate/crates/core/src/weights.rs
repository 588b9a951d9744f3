//! Weight sequences `w = (w_k)` and their log-domain window algebra.
//!
//! Only moduli matter for every criterion, so a weight is stored as the value
//! the user wrote and evaluated through `ln|w_k|`. Unilateral sequences are
//! indexed by `k >= 1`; bilateral ones by all of `Z`.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::certified::{lex_sign, CertifiedValue, Provenance, Status};
use crate::error::{Error, Result};

/// Closed-form generators that are not expressible through the other tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedGenerator {
    /// `|w_k| = 2` on `[4^i, 2*4^i)`, `1/2` elsewhere.
    Blocks,
    /// `|w_k| = 2` except `|w_{2^i}| = 2^-i`.
    Dips,
}

impl NamedGenerator {
    pub fn name(self) -> &'static str {
        match self {
            NamedGenerator::Blocks => "blocks",
            NamedGenerator::Dips => "dips",
        }
    }

    fn log_at(self, k: i64) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        let k = k as u64;
        match self {
            NamedGenerator::Blocks => {
                let b = 63 - k.leading_zeros();
                if b.is_multiple_of(2) {
                    ln2
                } else {
                    -ln2
                }
            }
            NamedGenerator::Dips => {
                if k.is_power_of_two() {
                    -(k.trailing_zeros() as f64) * ln2
                } else {
                    ln2
                }
            }
        }
    }

    fn magnitude_at(self, k: i64) -> f64 {
        let k = k as u64;
        match self {
            NamedGenerator::Blocks => {
                if (63 - k.leading_zeros()).is_multiple_of(2) {
                    2.0
                } else {
                    0.5
                }
            }
            NamedGenerator::Dips => {
                if k.is_power_of_two() {
                    2f64.powi(-(k.trailing_zeros() as i32))
                } else {
                    2.0
                }
            }
        }
    }

    /// `inf_{k >= N} sum_{v=1..n} ln|w_{k+v}|`, independent of `N`.
    ///
    /// Blocks: every window is at least `n ln(1/2)` and runs of `1/2` of length
    /// `2*4^i` recur forever. Dips: a window covering `2^i` is at most
    /// `(n-1) ln 2 - i ln 2`, unbounded below.
    pub fn tail_window_inf(self, n: usize) -> f64 {
        match self {
            NamedGenerator::Blocks => -(n as f64) * std::f64::consts::LN_2,
            NamedGenerator::Dips => f64::NEG_INFINITY,
        }
    }

    /// Whether the partial sums `sum_{v<=n} ln|w_v|` are unbounded above.
    pub fn partial_sums_diverge(self) -> bool {
        // Blocks: the sum at 2*4^i - 1 grows like (2/3) 4^i ln 2.
        // Dips: n ln 2 minus O(log^2 n).
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum WeightFamily {
    Constant {
        value: f64,
    },
    /// `w_k = k`.
    Linear,
    /// `w_k = r^k`.
    Geometric {
        ratio: f64,
    },
    /// `w_k = values[(k-1) mod m]`.
    Periodic {
        values: Vec<f64>,
    },
    /// `w_k = prefix[k-1]` for `k <= |prefix|`, then periodic.
    EventuallyPeriodic {
        prefix: Vec<f64>,
        period: Vec<f64>,
    },
    /// Finite list followed by a tail rule evaluated at the absolute index.
    Table {
        source: String,
        values: Vec<f64>,
        tail: Box<WeightSequence>,
    },
    Named {
        generator: NamedGenerator,
    },
    /// `w_k = pos(k)` for `k > 0`, `w_k = nonpos(1 - k)` for `k <= 0`.
    Bilateral {
        pos: Box<WeightSequence>,
        nonpos: Box<WeightSequence>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightSequence {
    family: WeightFamily,
}

/// Periodic part of a unilateral sequence: `ln|w_k| = logs[(k - start) mod p]`
/// for every `k >= start`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicTail {
    pub start: i64,
    pub logs: Vec<f64>,
}

impl PeriodicTail {
    pub fn period(&self) -> usize {
        self.logs.len()
    }

    /// Sum of logs over one period.
    pub fn drift(&self) -> f64 {
        self.logs.iter().sum()
    }
}

/// `S_n = sum_{v=1..n} ln|w_v| = quad n^2 + nlogn n ln n + lin n + log ln n + O(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumulativeAsymptotics {
    pub quad: f64,
    pub nlogn: f64,
    pub lin: f64,
    pub log: f64,
}

impl CumulativeAsymptotics {
    /// Coefficients of `k` and `ln k` in `window_log(n, k)` as `k -> inf`.
    pub fn window_coefs(&self, n: usize) -> (f64, f64) {
        let n = n as f64;
        (2.0 * self.quad * n, self.nlogn * n)
    }

    /// Sign of the growth of `S_n`: `1` unbounded above, `-1` to `-inf`, `0` bounded.
    pub fn sign(&self) -> i8 {
        lex_sign(&[self.quad, self.nlogn, self.lin, self.log])
    }
}

fn check_weight(v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::domain(format!("weight {v} is not finite")));
    }
    if v == 0.0 {
        return Err(Error::domain("weights must be non-zero"));
    }
    Ok(v)
}

impl WeightSequence {
    pub fn constant(value: f64) -> Result<Self> {
        Ok(Self::from_family(WeightFamily::Constant {
            value: check_weight(value)?,
        }))
    }

    pub fn linear() -> Self {
        Self::from_family(WeightFamily::Linear)
    }

    pub fn geometric(ratio: f64) -> Result<Self> {
        Ok(Self::from_family(WeightFamily::Geometric {
            ratio: check_weight(ratio)?,
        }))
    }

    pub fn periodic(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("periodic weights need at least one value"));
        }
        for v in &values {
            check_weight(*v)?;
        }
        Ok(Self::from_family(WeightFamily::Periodic { values }))
    }

    pub fn eventually_periodic(prefix: Vec<f64>, period: Vec<f64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::domain("eventually periodic weights need a period"));
        }
        for v in prefix.iter().chain(&period) {
            check_weight(*v)?;
        }
        Ok(Self::from_family(WeightFamily::EventuallyPeriodic {
            prefix,
            period,
        }))
    }

    pub fn named(generator: NamedGenerator) -> Self {
        Self::from_family(WeightFamily::Named { generator })
    }

    pub fn bilateral(pos: WeightSequence, nonpos: WeightSequence) -> Result<Self> {
        if pos.is_bilateral() || nonpos.is_bilateral() {
            return Err(Error::domain("bilateral halves must be unilateral"));
        }
        Ok(Self::from_family(WeightFamily::Bilateral {
            pos: Box::new(pos),
            nonpos: Box::new(nonpos),
        }))
    }

    /// Finite table followed by `tail`. Tables with a periodic tail collapse to
    /// `EventuallyPeriodic`.
    pub fn table(source: impl Into<String>, values: Vec<f64>, tail: WeightSequence) -> Result<Self> {
        for v in &values {
            check_weight(*v)?;
        }
        if tail.is_bilateral() || matches!(tail.family, WeightFamily::Table { .. }) {
            return Err(Error::domain("table tail must be a plain unilateral rule"));
        }
        if let Some(pt) = tail.periodic_tail() {
            let len = values.len() as i64;
            let first_periodic = pt.start.max(len + 1);
            let mut prefix = values;
            for k in (len + 1)..first_periodic {
                prefix.push(tail.raw_at(k));
            }
            let period = (0..pt.period() as i64)
                .map(|i| tail.raw_at(first_periodic + i))
                .collect();
            return Self::eventually_periodic(prefix, period);
        }
        Ok(Self::from_family(WeightFamily::Table {
            source: source.into(),
            values,
            tail: Box::new(tail),
        }))
    }

    fn from_family(family: WeightFamily) -> Self {
        WeightSequence { family }
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn is_bilateral(&self) -> bool {
        matches!(self.family, WeightFamily::Bilateral { .. })
    }

    /// Signed value as declared (the modulus is what every criterion uses).
    fn raw_at(&self, k: i64) -> f64 {
        match &self.family {
            WeightFamily::Constant { value } => *value,
            WeightFamily::Linear => k as f64,
            WeightFamily::Geometric { ratio } => ratio.powi(k as i32),
            WeightFamily::Periodic { values } => values[(k - 1).rem_euclid(values.len() as i64) as usize],
            WeightFamily::EventuallyPeriodic { prefix, period } => {
                let l = prefix.len() as i64;
                if k <= l {
                    prefix[(k - 1) as usize]
                } else {
                    period[(k - 1 - l).rem_euclid(period.len() as i64) as usize]
                }
            }
            WeightFamily::Table { values, tail, .. } => {
                if k <= values.len() as i64 {
                    values[(k - 1) as usize]
                } else {
                    tail.raw_at(k)
                }
            }
            WeightFamily::Named { generator } => generator.magnitude_at(k),
            WeightFamily::Bilateral { pos, nonpos } => {
                if k > 0 {
                    pos.raw_at(k)
                } else {
                    nonpos.raw_at(1 - k)
                }
            }
        }
    }

    pub fn index_valid(&self, k: i64) -> bool {
        self.is_bilateral() || k >= 1
    }

    /// `ln|w_k|` without index validation.
    #[inline]
    pub(crate) fn log_at_unchecked(&self, k: i64) -> f64 {
        match &self.family {
            WeightFamily::Constant { value } => value.abs().ln(),
            WeightFamily::Linear => (k as f64).ln(),
            WeightFamily::Geometric { ratio } => k as f64 * ratio.abs().ln(),
            WeightFamily::Named { generator } => generator.log_at(k),
            WeightFamily::Table { values, tail, .. } => {
                if k <= values.len() as i64 {
                    values[(k - 1) as usize].abs().ln()
                } else {
                    tail.log_at_unchecked(k)
                }
            }
            WeightFamily::Bilateral { pos, nonpos } => {
                if k > 0 {
                    pos.log_at_unchecked(k)
                } else {
                    nonpos.log_at_unchecked(1 - k)
                }
            }
            _ => self.raw_at(k).abs().ln(),
        }
    }

    pub fn log_at(&self, k: i64) -> Result<f64> {
        if !self.index_valid(k) {
            return Err(Error::domain(format!("weight index {k} is not valid (unilateral weights start at 1)")));
        }
        Ok(self.log_at_unchecked(k))
    }

    pub fn magnitude_at(&self, k: i64) -> Result<f64> {
        self.log_at(k)?;
        Ok(self.raw_at(k).abs())
    }

    /// `sum_{v=1..n} ln|w_{v+k}|`, accumulated left to right.
    pub fn window_log(&self, n: usize, k: i64) -> Result<f64> {
        if n == 0 {
            return Err(Error::domain("window length must be positive"));
        }
        if !self.index_valid(k + 1) {
            return Err(Error::domain(format!(
                "window ({n}, {k}) touches invalid index {}",
                k + 1
            )));
        }
        Ok(self.window_log_unchecked(n, k))
    }

    /// Same as [`window_log`](Self::window_log) but allows `n = 0` (empty sum)
    /// and skips validation.
    #[inline]
    pub(crate) fn window_log_unchecked(&self, n: usize, k: i64) -> f64 {
        let mut acc = 0.0;
        for v in 1..=n as i64 {
            acc += self.log_at_unchecked(k + v);
        }
        acc
    }

    pub fn periodic_tail(&self) -> Option<PeriodicTail> {
        let logs = |vs: &[f64]| vs.iter().map(|v| v.abs().ln()).collect::<Vec<_>>();
        match &self.family {
            WeightFamily::Constant { value } => Some(PeriodicTail {
                start: 1,
                logs: vec![value.abs().ln()],
            }),
            WeightFamily::Geometric { ratio } if ratio.abs() == 1.0 => Some(PeriodicTail {
                start: 1,
                logs: vec![0.0],
            }),
            WeightFamily::Periodic { values } => Some(PeriodicTail {
                start: 1,
                logs: logs(values),
            }),
            WeightFamily::EventuallyPeriodic { prefix, period } => Some(PeriodicTail {
                start: prefix.len() as i64 + 1,
                logs: logs(period),
            }),
            _ => None,
        }
    }

    pub fn asymptotics(&self) -> Option<CumulativeAsymptotics> {
        let zero = CumulativeAsymptotics {
            quad: 0.0,
            nlogn: 0.0,
            lin: 0.0,
            log: 0.0,
        };
        if let Some(pt) = self.periodic_tail() {
            return Some(CumulativeAsymptotics {
                lin: pt.drift() / pt.period() as f64,
                ..zero
            });
        }
        match &self.family {
            // ln n! = n ln n - n + (1/2) ln n + O(1)
            WeightFamily::Linear => Some(CumulativeAsymptotics {
                nlogn: 1.0,
                lin: -1.0,
                log: 0.5,
                ..zero
            }),
            WeightFamily::Geometric { ratio } => {
                let l = ratio.abs().ln();
                Some(CumulativeAsymptotics {
                    quad: l / 2.0,
                    lin: l / 2.0,
                    ..zero
                })
            }
            WeightFamily::Table { tail, .. } => tail.asymptotics(),
            _ => None,
        }
    }

    /// `ln|w_k| = alpha ln k + beta k + O(1)`, when the family declares it.
    pub fn log_term_growth(&self) -> Option<(f64, f64)> {
        if self.periodic_tail().is_some() {
            return Some((0.0, 0.0));
        }
        match &self.family {
            WeightFamily::Linear => Some((1.0, 0.0)),
            WeightFamily::Geometric { ratio } => Some((0.0, ratio.abs().ln())),
            WeightFamily::Table { tail, .. } => tail.log_term_growth(),
            _ => None,
        }
    }

    /// Whether `|w_k| <= |w_{k+1}|` for every `k >= 1`, when decidable from the tag.
    pub fn is_nondecreasing(&self) -> Option<bool> {
        match &self.family {
            WeightFamily::Constant { .. } | WeightFamily::Linear => Some(true),
            WeightFamily::Geometric { ratio } => Some(ratio.abs() >= 1.0),
            WeightFamily::Periodic { values } => Some(values.iter().all(|v| v.abs() == values[0].abs())),
            WeightFamily::EventuallyPeriodic { prefix, period } => {
                let p0 = period[0].abs();
                let flat = period.iter().all(|v| v.abs() == p0);
                let mono = prefix.windows(2).all(|w| w[0].abs() <= w[1].abs());
                let joins = prefix.last().is_none_or(|l| l.abs() <= p0);
                Some(flat && mono && joins)
            }
            _ => None,
        }
    }

    pub fn named_generator(&self) -> Option<NamedGenerator> {
        match &self.family {
            WeightFamily::Named { generator } => Some(*generator),
            _ => None,
        }
    }

    pub fn bilateral_halves(&self) -> Option<(&WeightSequence, &WeightSequence)> {
        match &self.family {
            WeightFamily::Bilateral { pos, nonpos } => Some((pos, nonpos)),
            _ => None,
        }
    }

    /// Mini-language rendering; `parse_weight_spec(render(w)) == w` for every
    /// non-table spec.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn fmt_list(f: &mut fmt::Formatter<'_>, vs: &[f64]) -> fmt::Result {
    write!(f, "[")?;
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, "]")
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            WeightFamily::Constant { value } => write!(f, "const:{value}"),
            WeightFamily::Linear => write!(f, "linear"),
            WeightFamily::Geometric { ratio } => write!(f, "geom:{ratio}"),
            WeightFamily::Periodic { values } => {
                write!(f, "periodic:")?;
                fmt_list(f, values)
            }
            WeightFamily::EventuallyPeriodic { prefix, period } => {
                write!(f, "evper:")?;
                fmt_list(f, prefix)?;
                write!(f, ":")?;
                fmt_list(f, period)
            }
            WeightFamily::Table { source, .. } => write!(f, "table:{source}"),
            WeightFamily::Named { generator } => write!(f, "named:{}", generator.name()),
            WeightFamily::Bilateral { pos, nonpos } => write!(f, "bilateral:{pos}:{nonpos}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

pub fn parse_weight_spec(spec: &str) -> Result<WeightSequence> {
    parse_at(spec, 0, spec.trim_end())
}

fn parse_float(full: &str, pos: usize, s: &str) -> Result<f64> {
    let t = s.trim();
    let v: f64 = t
        .parse()
        .map_err(|_| Error::parse(full, pos, format!("expected a number, found `{t}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(full, pos, "weights must be finite"));
    }
    Ok(v)
}

fn parse_list(full: &str, pos: usize, s: &str) -> Result<(Vec<f64>, usize)> {
    if !s.starts_with('[') {
        return Err(Error::parse(full, pos, "expected `[`"));
    }
    let close = s
        .find(']')
        .ok_or_else(|| Error::parse(full, pos, "unterminated list, expected `]`"))?;
    let body = &s[1..close];
    if body.trim().is_empty() {
        return Err(Error::parse(full, pos + 1, "empty list"));
    }
    let mut out = Vec::new();
    let mut off = pos + 1;
    for item in body.split(',') {
        out.push(parse_float(full, off, item)?);
        off += item.len() + 1;
    }
    Ok((out, close + 1))
}

fn parse_at(full: &str, pos: usize, s: &str) -> Result<WeightSequence> {
    let (head, rest) = match s.find(':') {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let rest_pos = pos + head.len() + 1;
    let need_rest = |what: &str| rest.ok_or_else(|| Error::parse(full, pos + head.len(), format!("`{head}` expects `:{what}`")));
    let wrap = |e: Error| match e {
        Error::Domain(msg) => Error::parse(full, pos, msg),
        other => other,
    };
    match head {
        "const" => WeightSequence::constant(parse_float(full, rest_pos, need_rest("<float>")?)?).map_err(wrap),
        "linear" => match rest {
            None => Ok(WeightSequence::linear()),
            Some(_) => Err(Error::parse(full, rest_pos, "`linear` takes no argument")),
        },
        "geom" => WeightSequence::geometric(parse_float(full, rest_pos, need_rest("<float>")?)?).map_err(wrap),
        "periodic" => {
            let r = need_rest("[v1,...]")?;
            let (vals, used) = parse_list(full, rest_pos, r)?;
            if used != r.len() {
                return Err(Error::parse(full, rest_pos + used, "trailing input after list"));
            }
            WeightSequence::periodic(vals).map_err(wrap)
        }
        "evper" => {
            let r = need_rest("[p...]:[v...]")?;
            let (prefix, used) = parse_list(full, rest_pos, r)?;
            let r2 = &r[used..];
            let Some(r2) = r2.strip_prefix(':') else {
                return Err(Error::parse(full, rest_pos + used, "expected `:` between prefix and period"));
            };
            let p2 = rest_pos + used + 1;
            let (period, used2) = parse_list(full, p2, r2)?;
            if used2 != r2.len() {
                return Err(Error::parse(full, p2 + used2, "trailing input after list"));
            }
            WeightSequence::eventually_periodic(prefix, period).map_err(wrap)
        }
        "named" => match need_rest("<name>")? {
            "blocks" => Ok(WeightSequence::named(NamedGenerator::Blocks)),
            "dips" => Ok(WeightSequence::named(NamedGenerator::Dips)),
            other => Err(Error::parse(full, rest_pos, format!("unknown generator `{other}`"))),
        },
        "table" => {
            let path = need_rest("<path>")?;
            load_table(full, rest_pos, path)
        }
        "bilateral" => {
            let r = need_rest("<pos-spec>:<nonpos-spec>")?;
            let mut first_err = None;
            for (i, _) in r.match_indices(':') {
                let left = &r[..i];
                let right = &r[i + 1..];
                match parse_at(full, rest_pos, left) {
                    Ok(pos_w) => match parse_at(full, rest_pos + i + 1, right) {
                        Ok(neg_w) => return WeightSequence::bilateral(pos_w, neg_w).map_err(wrap),
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    },
                    Err(e) => {
                        if !matches!(e, Error::Parse { .. }) {
                            first_err.get_or_insert(e);
                        }
                    }
                }
            }
            Err(first_err.unwrap_or_else(|| Error::parse(full, rest_pos, "expected `<pos-spec>:<nonpos-spec>`")))
        }
        "" => Err(Error::parse(full, pos, "empty weight spec")),
        other => Err(Error::parse(full, pos, format!("unknown weight family `{other}`"))),
    }
}

fn load_table(full: &str, pos: usize, path: &str) -> Result<WeightSequence> {
    let text = std::fs::read_to_string(Path::new(path))
        .map_err(|e| Error::parse(full, pos, format!("cannot read table `{path}`: {e}")))?;
    parse_table_text(path, &text)
}

/// Table file: a `tail=<spec>` header line, then one modulus per line.
pub fn parse_table_text(source: &str, text: &str) -> Result<WeightSequence> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(text, 0, "table is empty"))?;
    let tail_spec = header
        .strip_prefix("tail=")
        .ok_or_else(|| Error::parse(header, 0, "table must start with a `tail=<spec>` header"))?;
    let tail = parse_weight_spec(tail_spec)?;
    let mut values = Vec::new();
    for (lineno, l) in lines {
        let cell = l.trim_end_matches(',');
        let v: f64 = cell
            .parse()
            .map_err(|_| Error::parse(l, 0, format!("line {lineno}: expected a modulus")))?;
        values.push(check_weight(v).map_err(|e| Error::Domain(format!("line {lineno}: {e}")))?);
    }
    WeightSequence::table(source, values, tail)
}

// ---------------------------------------------------------------------------
// Free-function views

pub fn window_log(w: &WeightSequence, n: usize, k: i64) -> Result<f64> {
    w.window_log(n, k)
}

/// What the partial sums do past the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBehavior {
    /// Unbounded above (the true supremum is `+inf`).
    Diverges,
    /// The supremum is attained at the reported index.
    Attained,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeSup {
    pub value: CertifiedValue,
    pub tail: TailBehavior,
    /// Average log weight per index, when the family declares one.
    #[serde(serialize_with = "crate::certified::ser_ext_opt")]
    pub drift: Option<f64>,
}

/// `sup_{n <= horizon} sum_{v=1..n} ln|w_v|` with a certificate of what happens
/// beyond the horizon.
pub fn cumulative_sup_log(w: &WeightSequence, horizon: usize) -> Result<CumulativeSup> {
    if w.is_bilateral() {
        return Err(Error::domain(
            "cumulative sums are unilateral; use the bilateral verdict for bilateral weights",
        ));
    }
    if horizon == 0 {
        return Err(Error::domain("horizon must be positive"));
    }
    let mut s = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut arg = 1;
    for n in 1..=horizon {
        s += w.log_at_unchecked(n as i64);
        if s > best {
            best = s;
            arg = n;
        }
    }
    let prov = Provenance {
        n: Some(arg),
        ..Default::default()
    };
    let h = horizon as i64;
    let drift = w.asymptotics().map(|a| a.lin + a.quad);

    if let Some(g) = w.named_generator() {
        if g.partial_sums_diverge() {
            return Ok(CumulativeSup {
                value: CertifiedValue {
                    status: Status::LowerBounded,
                    ..CertifiedValue::horizon_only(best, prov, h)
                },
                tail: TailBehavior::Diverges,
                drift: None,
            });
        }
    }
    let Some(asym) = w.asymptotics() else {
        return Ok(CumulativeSup {
            value: CertifiedValue::horizon_only(best, prov, h),
            tail: TailBehavior::Unknown,
            drift,
        });
    };
    if asym.sign() > 0 {
        return Ok(CumulativeSup {
            value: CertifiedValue {
                status: Status::LowerBounded,
                ..CertifiedValue::horizon_only(best, prov, h)
            },
            tail: TailBehavior::Diverges,
            drift,
        });
    }
    // Non-increasing drift: the supremum lives in a computable finite range.
    let exact_range = if let Some(pt) = w.periodic_tail() {
        Some((pt.start - 1).max(0) as usize + pt.period())
    } else if let WeightFamily::Geometric { .. } = w.family() {
        // ln r * n(n+1)/2 with ln r <= 0 is maximal at n = 1.
        Some(1)
    } else {
        None
    };
    match exact_range {
        Some(range) => {
            let mut s = 0.0;
            let mut best = f64::NEG_INFINITY;
            let mut arg = 1;
            for n in 1..=range {
                s += w.log_at_unchecked(n as i64);
                if s > best {
                    best = s;
                    arg = n;
                }
            }
            let horizon_value = {
                let mut s = 0.0;
                let mut hb = f64::NEG_INFINITY;
                for n in 1..=horizon {
                    s += w.log_at_unchecked(n as i64);
                    hb = hb.max(s);
                }
                hb
            };
            Ok(CumulativeSup {
                value: CertifiedValue::exact(
                    best,
                    Provenance {
                        n: Some(arg),
                        ..Default::default()
                    },
                    h,
                    horizon_value,
                ),
                tail: TailBehavior::Attained,
                drift,
            })
        }
        None => Ok(CumulativeSup {
            value: CertifiedValue::horizon_only(best, prov, h),
            tail: TailBehavior::Unknown,
            drift,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn parse_examples() {
        let w = parse_weight_spec("const:2").unwrap();
        assert_eq!(w.family(), &WeightFamily::Constant { value: 2.0 });
        assert_eq!(w.magnitude_at(17).unwrap(), 2.0);

        let w = parse_weight_spec("linear").unwrap();
        assert_eq!(w.family(), &WeightFamily::Linear);
        assert_eq!(w.magnitude_at(5).unwrap(), 5.0);

        let w = parse_weight_spec("periodic:[3,0.5]").unwrap();
        let mags: Vec<f64> = (1..=4).map(|k| w.magnitude_at(k).unwrap()).collect();
        assert_eq!(mags, vec![3.0, 0.5, 3.0, 0.5]);
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_weight_spec("periodic:[3,x]") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_weight_spec("wobble:3"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_weight_spec("const:0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_weight_spec("const:inf"), Err(Error::Parse { .. })));
        assert!(matches!(parse_weight_spec("linear:2"), Err(Error::Parse { .. })));
    }

    #[test]
    fn zero_weight_is_domain_error() {
        assert!(matches!(WeightSequence::constant(0.0), Err(Error::Domain(_))));
        assert!(matches!(WeightSequence::periodic(vec![1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn bilateral_split_finds_both_halves() {
        let w = parse_weight_spec("bilateral:const:2:const:0.5").unwrap();
        assert_eq!(w.magnitude_at(1).unwrap(), 2.0);
        assert_eq!(w.magnitude_at(0).unwrap(), 0.5);
        assert_eq!(w.magnitude_at(-40).unwrap(), 0.5);
        let w = parse_weight_spec("bilateral:evper:[1]:[2,3]:linear").unwrap();
        assert_eq!(w.magnitude_at(2).unwrap(), 2.0);
        assert_eq!(w.magnitude_at(-2).unwrap(), 3.0);
    }

    #[test]
    fn window_examples() {
        let c2 = WeightSequence::constant(2.0).unwrap();
        assert!((c2.window_log(3, 5).unwrap() - 3.0 * LN2).abs() < 1e-15);
        let lin = WeightSequence::linear();
        assert!((lin.window_log(2, 3).unwrap() - 20f64.ln()).abs() < 1e-14);
        let one = WeightSequence::constant(1.0).unwrap();
        assert_eq!(one.window_log(9, 40).unwrap(), 0.0);
        assert!(lin.window_log(2, -1).is_err());
        assert!(lin.window_log(0, 3).is_err());
    }

    #[test]
    fn named_generators() {
        let b = WeightSequence::named(NamedGenerator::Blocks);
        let mags: Vec<f64> = (1..=17).map(|k| b.magnitude_at(k).unwrap()).collect();
        assert_eq!(
            mags,
            vec![2.0, 0.5, 0.5, 2.0, 2.0, 2.0, 2.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 2.0, 2.0]
        );
        let d = WeightSequence::named(NamedGenerator::Dips);
        assert_eq!(d.magnitude_at(1).unwrap(), 1.0);
        assert_eq!(d.magnitude_at(3).unwrap(), 2.0);
        assert_eq!(d.magnitude_at(8).unwrap(), 0.125);
    }

    #[test]
    fn table_with_periodic_tail_becomes_eventually_periodic() {
        let w = parse_table_text("t.csv", "tail=periodic:[2,3]\n5\n7\n9\n").unwrap();
        match w.family() {
            WeightFamily::EventuallyPeriodic { prefix, period } => {
                assert_eq!(prefix, &vec![5.0, 7.0, 9.0]);
                // index 4 of periodic:[2,3] is 3
                assert_eq!(period, &vec![3.0, 2.0]);
            }
            other => panic!("{other:?}"),
        }
        let w = parse_table_text("t.csv", "tail=linear\n5\n").unwrap();
        assert!(matches!(w.family(), WeightFamily::Table { .. }));
        assert_eq!(w.magnitude_at(1).unwrap(), 5.0);
        assert_eq!(w.magnitude_at(6).unwrap(), 6.0);
        assert!(parse_table_text("t.csv", "5\n").is_err());
    }

    #[test]
    fn cumulative_sup_examples() {
        let c2 = WeightSequence::constant(2.0).unwrap();
        let r = cumulative_sup_log(&c2, 100).unwrap();
        assert!((r.value.log_value - 100.0 * LN2).abs() < 1e-12);
        assert_eq!(r.tail, TailBehavior::Diverges);

        let one = WeightSequence::constant(1.0).unwrap();
        let r = cumulative_sup_log(&one, 100).unwrap();
        assert_eq!(r.value.log_value, 0.0);
        assert_eq!(r.value.status, Status::Exact);

        let p = WeightSequence::periodic(vec![3.0, 0.5]).unwrap();
        let r = cumulative_sup_log(&p, 100).unwrap();
        let expect = 50.0 * 3f64.ln() + 49.0 * 0.5f64.ln();
        assert!((r.value.log_value - expect).abs() < 1e-10);
        assert_eq!(r.value.provenance.n, Some(99));
        assert_eq!(r.tail, TailBehavior::Diverges);

        let g = WeightSequence::geometric(0.5).unwrap();
        let r = cumulative_sup_log(&g, 50).unwrap();
        assert_eq!(r.value.status, Status::Exact);
        assert!((r.value.log_value + LN2).abs() < 1e-15);

        let bi = parse_weight_spec("bilateral:const:2:const:0.5").unwrap();
        assert!(matches!(cumulative_sup_log(&bi, 10), Err(Error::Domain(_))));
    }

    #[test]
    fn render_examples() {
        for s in ["const:2", "linear", "geom:0.5", "periodic:[3,0.5]", "evper:[1,2]:[3]", "named:dips", "bilateral:const:2:const:0.5"] {
            assert_eq!(parse_weight_spec(s).unwrap().render(), s);
        }
    }
}
