//! Command-line front end: `run(argv)` returns an exit code and the report text.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::criteria::{
    poly_hypothesis_check, subspace_verdict, subspace_verdict_at, Criterion, Outcome, PolyVerdict, Verdict,
};
use crate::dynamics::{
    apply_poly, build_divergence_witness, build_hypercyclic_prefix, orbit_table, parse_vector, verify_witness,
    PolyMode, TruncatedVector,
};
use crate::error::{Error, Result};
use crate::spaces::{parse_space_spec, presets, Horizons, SpaceModel};
use crate::verify::{default_count, run_suite, VerifyReport};
use crate::weights::{parse_weight_spec, WeightSequence};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Exit code for definitive verdicts and passing verifications.
pub const EXIT_OK: i32 = 0;
/// Exit code for errors and failed verifications.
pub const EXIT_ERROR: i32 = 1;
/// Exit code for `UnknownAtHorizon` and `Boundary`.
pub const EXIT_UNDECIDED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "hyshift", version, about = "Hypercyclic subspaces of weighted backward shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Weight spec, e.g. `const:2`, `linear`, `periodic:[1,3]`, `bilateral:const:2:const:0.5`.
    #[arg(long)]
    weights: String,
    /// Space spec, e.g. `lp:2`, `c0`, `entire`, `rapid`, `kothe:<path>`, `bi-lp:2`.
    #[arg(long, default_value = "lp:2")]
    space: String,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HorizonArgs {
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    nmax: u32,
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u32).range(1..))]
    khorizon: u32,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    mmax: u32,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    jmax: u32,
}

impl HorizonArgs {
    fn horizons(&self) -> Horizons {
        Horizons {
            j_max: self.jmax as usize,
            m_max: self.mmax as usize,
            n_max: self.nmax as usize,
            k_horizon: self.khorizon as i64,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hypercyclic-subspace verdict with certificates.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        h: HorizonArgs,
        /// Fix the seminorm index J instead of searching from 1.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        j: Option<u32>,
    },
    /// Criterion values `ln q(n, k)` over a grid.
    Table {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
        nmax: u32,
        /// Number of window starts per row.
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
        kmax: u32,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        j: u32,
        /// Second seminorm index; defaults to `J`.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: Option<u32>,
    },
    /// Orbit seminorms `p_j(B_w^n x)`.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Finite vector `k:c,k:c,...`.
        #[arg(long)]
        vector: String,
        #[arg(long, default_value_t = 32)]
        horizon: u32,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        j: u32,
    },
    /// Divergence witness built from the growth certificate, then verified.
    Witness {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        h: HorizonArgs,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        stages: u32,
        /// Orbit length checked against the band bounds.
        #[arg(long, default_value_t = 1000)]
        horizon: u32,
    },
    /// Finite prefix `z = sum R^{n_i} y_i` of a hypercyclic vector.
    Prefix {
        #[command(flatten)]
        common: Common,
        /// Targets separated by `;`, each `k:c,k:c,...`.
        #[arg(long)]
        targets: String,
        /// Strictly increasing times, comma separated.
        #[arg(long, value_delimiter = ',')]
        times: Vec<usize>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        j: u32,
    },
    /// Subspace hypotheses for `P(B_w)` and expanded against iterated orbits.
    Poly {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        h: HorizonArgs,
        /// Coefficients `c_0,c_1,...,c_d`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        poly: Vec<f64>,
        /// Vector for the orbit comparison; defaults to a basis vector.
        #[arg(long)]
        vector: Option<String>,
        /// Power `n` in `P(B_w)^n x`.
        #[arg(long, default_value_t = 4)]
        power: u32,
    },
    /// Seeded oracle suites.
    Verify {
        #[arg(value_parser = ["condn", "prop44", "certtransform", "polyorbit"])]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random cases; the suite default when omitted.
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Built-in weight and space specs.
    Presets {
        #[command(flatten)]
        out: Output,
    },
}

/// A finished report before rendering.
struct Report {
    code: i32,
    json: Value,
    csv: String,
    text: String,
}

impl Report {
    fn new<T: Serialize>(command: &str, code: i32, body: &T, csv: String, text: String) -> Result<Self> {
        let mut json = serde_json::to_value(body).map_err(|e| Error::Io(e.to_string()))?;
        if let Value::Object(map) = &mut json {
            map.insert("schema".into(), json!(SCHEMA_VERSION));
            map.insert("command".into(), json!(command));
        }
        Ok(Report { code, json, csv, text })
    }

    fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| Error::Io(e.to_string()))?;
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        })
    }
}

fn outcome_code(o: Outcome) -> i32 {
    if o.is_definitive() {
        EXIT_OK
    } else {
        EXIT_UNDECIDED
    }
}

fn parse_pair(common: &Common) -> Result<(WeightSequence, SpaceModel)> {
    Ok((parse_weight_spec(&common.weights)?, parse_space_spec(&common.space)?))
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn analyze(common: &Common, h: &HorizonArgs, j: Option<u32>) -> Result<Report> {
    let (w, s) = parse_pair(common)?;
    let hz = h.horizons();
    let v = match j {
        Some(j) => subspace_verdict_at(&w, &s, j as usize, &hz)?,
        None => subspace_verdict(&w, &s, &hz)?,
    };
    let csv = criterion_csv(&v);
    let text = verdict_text(&v);
    Report::new("analyze", outcome_code(v.outcome), &v, csv, text)
}

fn criterion_csv(v: &Verdict) -> String {
    let mut s = String::from("n,inf_log,status,argmin_k,route\n");
    for cv in &v.criterion_values {
        let _ = writeln!(
            s,
            "{},{},{:?},{},{:?}",
            cv.n,
            num(cv.inf_log),
            cv.status,
            opt(cv.argmin_k),
            cv.route
        );
    }
    s
}

fn verdict_text(v: &Verdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "weights  {}", v.weights);
    let _ = writeln!(s, "space    {}", v.space);
    let _ = writeln!(s, "outcome  {:?}", v.outcome);
    let _ = writeln!(s, "J        {}", v.big_j);
    for t in &v.theta {
        let _ = writeln!(
            s,
            "theta(m = {}) = exp({}) [{:?}, {:?}]",
            t.m,
            num(t.value.log_value),
            t.value.status,
            t.route
        );
    }
    if !v.certificate.rule.is_empty() {
        let _ = writeln!(s, "rule     {}", v.certificate.rule);
    }
    if let Some(g) = &v.certificate.growth {
        let _ = writeln!(
            s,
            "growth   C = {} every m = {} steps from N = {}, K = {}",
            num(g.block.c),
            g.block.m,
            g.block.big_n,
            num(g.k)
        );
    }
    for n in &v.notes {
        let _ = writeln!(s, "note     {n}");
    }
    s
}

#[derive(Serialize)]
struct TableRow {
    n: usize,
    k: i64,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    log_q: f64,
}

#[derive(Serialize)]
struct TableReport {
    weights: String,
    space: String,
    #[serde(rename = "J")]
    big_j: usize,
    m: usize,
    rows: Vec<TableRow>,
}

fn table(common: &Common, nmax: u32, kmax: u32, j: u32, m: Option<u32>) -> Result<Report> {
    let (w, s) = parse_pair(common)?;
    let m = m.unwrap_or(j) as usize;
    let c = Criterion::new(&w, &s, j as usize, m)?;
    let mut rows = Vec::with_capacity(nmax as usize * kmax as usize);
    for n in 1..=nmax as usize {
        for k in c.base()..c.base() + kmax as i64 {
            rows.push(TableRow {
                n,
                k,
                log_q: c.checked_value(n, k)?,
            });
        }
    }
    let mut csv = String::from("n,k,log_q\n");
    let mut text = format!("ln q(n, k) for {} on {}, J = {j}, m = {m}\n", w.render(), s.render());
    for r in &rows {
        let _ = writeln!(csv, "{},{},{}", r.n, r.k, num(r.log_q));
        let _ = writeln!(text, "n = {:>3}  k = {:>5}  {}", r.n, r.k, num(r.log_q));
    }
    let body = TableReport {
        weights: w.render(),
        space: s.render(),
        big_j: j as usize,
        m,
        rows,
    };
    Report::new("table", EXIT_OK, &body, csv, text)
}

fn simulate(common: &Common, vector: &str, horizon: u32, j: u32) -> Result<Report> {
    let (w, s) = parse_pair(common)?;
    let x = parse_vector(&s, vector)?;
    let rows = orbit_table(&x, &w, &s, j as usize, horizon as usize)?;
    let mut csv = String::from("n,log_value,value\n");
    let mut text = format!("p_{j}(B^n x) for {} on {}\n", w.render(), s.render());
    for r in &rows {
        let _ = writeln!(csv, "{},{},{}", r.n, num(r.log_value), num(r.value));
        let _ = writeln!(text, "n = {:>4}  {}", r.n, num(r.value));
    }
    let body = json!({
        "weights": w.render(),
        "space": s.render(),
        "j": j,
        "x": x,
        "rows": rows,
    });
    Report::new("simulate", EXIT_OK, &body, csv, text)
}

fn witness(common: &Common, h: &HorizonArgs, stages: u32, horizon: u32) -> Result<Report> {
    let (w, s) = parse_pair(common)?;
    let hz = h.horizons();
    let v = subspace_verdict(&w, &s, &hz)?;
    let Some(g) = v.certificate.growth.clone() else {
        return Err(Error::domain(format!(
            "no growth certificate for {} on {} (outcome {:?})",
            w.render(),
            s.render(),
            v.outcome
        )));
    };
    let wit = build_divergence_witness(&g, &w, &s, stages as usize, hz.k_horizon)?;
    let checks = verify_witness(&wit, &w, &s, horizon as usize)?;
    let failed = checks.iter().filter(|c| !c.ok).count();
    let mut csv = String::from("j,log_value,log_bound,ok\n");
    for c in &checks {
        let _ = writeln!(csv, "{},{},{},{}", c.j, num(c.log_value), num(c.log_bound), c.ok);
    }
    let text = format!(
        "witness for {} on {}: {} stages, bands cover j <= {}; {} of {} checked orbit points meet the bound\n",
        w.render(),
        s.render(),
        stages,
        wit.schedule.last().copied().unwrap_or(0),
        checks.len() - failed,
        checks.len()
    );
    let body = json!({
        "weights": w.render(),
        "space": s.render(),
        "growth": g,
        "witness": wit,
        "checked": checks.len(),
        "failed": failed,
        "checks": checks,
        "passed": failed == 0,
    });
    Report::new("witness", if failed == 0 { EXIT_OK } else { EXIT_ERROR }, &body, csv, text)
}

fn prefix(common: &Common, targets: &str, times: &[usize], j: u32) -> Result<Report> {
    let (w, s) = parse_pair(common)?;
    let ys = targets
        .split(';')
        .map(|t| parse_vector(&s, t))
        .collect::<Result<Vec<TruncatedVector>>>()?;
    let r = build_hypercyclic_prefix(&w, &s, &ys, times, j as usize)?;
    let mut csv = String::from("target,time,error\n");
    let mut text = format!("p_{j}(z) = {}\n", num(r.smallness));
    for (i, (t, e)) in r.times.iter().zip(&r.errors).enumerate() {
        let _ = writeln!(csv, "{i},{t},{}", num(*e));
        let _ = writeln!(text, "target {i}: p_{j}(B^{t} z - y) = {}", num(*e));
    }
    Report::new("prefix", EXIT_OK, &r, csv, text)
}

#[derive(Serialize)]
struct OrbitComparison {
    n: usize,
    x: TruncatedVector,
    expanded: TruncatedVector,
    iterated: TruncatedVector,
    relative_distance: f64,
    agree: bool,
}

#[derive(Serialize)]
struct PolyReport {
    #[serde(flatten)]
    verdict: PolyVerdict,
    orbit: OrbitComparison,
}

fn poly(common: &Common, h: &HorizonArgs, coeffs: &[f64], vector: Option<&str>, power: u32) -> Result<Report> {
    let (w, s) = parse_pair(common)?;
    let verdict = poly_hypothesis_check(&w, &s, coeffs, &h.horizons())?;
    let p = &verdict.poly;
    let n = power as usize;
    let x = match vector {
        Some(t) => parse_vector(&s, t)?,
        None => TruncatedVector::basis(&s, s.index_base + (n * (p.len() - 1)) as i64)?,
    };
    let expanded = apply_poly(&x, &w, p, n, PolyMode::Expanded)?;
    let iterated = apply_poly(&x, &w, p, n, PolyMode::Iterated)?;
    let d = crate::verify::relative_distance(&expanded, &iterated);
    let orbit = OrbitComparison {
        n,
        x,
        expanded,
        iterated,
        relative_distance: d,
        agree: d <= 1e-9,
    };
    let mut csv = String::from("n,inf_log,status,argmin_k,route\n");
    for cv in &verdict.criterion_values {
        let _ = writeln!(
            csv,
            "{},{},{:?},{},{:?}",
            cv.n,
            num(cv.inf_log),
            cv.status,
            opt(cv.argmin_k),
            cv.route
        );
    }
    let mut text = format!(
        "P = {:?} on {} over {}\noutcome  {:?}\nJ        {}\ninf = 0  m = {}\n|c_0|<=1 {}\nratio->0 m = {}\npremise  {:?}\norbit    n = {n}, relative distance {:e}\n",
        p,
        verdict.weights,
        verdict.space,
        verdict.outcome,
        opt(verdict.big_j),
        opt(verdict.inf_zero_m),
        verdict.constant_term_ok,
        opt(verdict.ratio_to_zero_m),
        verdict.premise,
        d
    );
    for note in &verdict.notes {
        let _ = writeln!(text, "note     {note}");
    }
    let code = if !orbit.agree {
        EXIT_ERROR
    } else {
        outcome_code(verdict.outcome)
    };
    Report::new("poly", code, &PolyReport { verdict, orbit }, csv, text)
}

fn verify(suite: &str, seed: u64, count: Option<usize>) -> Result<Report> {
    let r: VerifyReport = run_suite(suite, seed, count.unwrap_or_else(|| default_count(suite)))?;
    let code = if r.passed {
        EXIT_OK
    } else if r.violations == 0 {
        EXIT_UNDECIDED
    } else {
        EXIT_ERROR
    };
    let csv = format!(
        "suite,seed,count,agreements,violations,undecided,passed\n{},{},{},{},{},{},{}\n",
        r.suite, r.seed, r.count, r.agreements, r.violations, r.undecided, r.passed
    );
    let mut text = format!(
        "{}: seed {}, {} cases, {} agreements, {} violations, {} undecided: {}\n",
        r.suite,
        r.seed,
        r.count,
        r.agreements,
        r.violations,
        r.undecided,
        if r.passed { "PASS" } else { "FAIL" }
    );
    for f in &r.failures {
        let _ = writeln!(text, "  {f}");
    }
    Report::new("verify", code, &r, csv, text)
}

const WEIGHT_PRESETS: [(&str, &str); 9] = [
    ("const:<c>", "w_k = c"),
    ("linear", "w_k = k"),
    ("geom:<r>", "w_k = r^k"),
    ("periodic:[a,b,...]", "periodic weights"),
    ("evper:[prefix]:[period]", "finite prefix, then periodic"),
    ("named:blocks", "w_k = 2 for 4^i <= k < 2 * 4^i, else 1/2"),
    ("named:dips", "w_k = 2 except w_(2^i) = 2^-i"),
    ("table:<path>", "explicit values from a file, then a tail spec"),
    ("bilateral:<pos>:<nonpos>", "w_k from <pos> for k > 0, from <nonpos> at 1 - k for k <= 0"),
];

fn presets_report() -> Result<Report> {
    let spaces = presets();
    let mut csv = String::from("kind,spec,description\n");
    let mut text = String::from("weights\n");
    for (spec, d) in WEIGHT_PRESETS {
        let _ = writeln!(csv, "weights,\"{spec}\",\"{d}\"");
        let _ = writeln!(text, "  {spec:<28} {d}");
    }
    text.push_str("spaces\n");
    for (spec, d) in &spaces {
        let _ = writeln!(csv, "space,\"{spec}\",\"{d}\"");
        let _ = writeln!(text, "  {spec:<28} {d}");
    }
    let pair = |v: &[(&str, &str)]| {
        v.iter()
            .map(|(s, d)| json!({"spec": s, "description": d}))
            .collect::<Vec<_>>()
    };
    let body = json!({ "weights": pair(&WEIGHT_PRESETS), "spaces": pair(&spaces) });
    Report::new("presets", EXIT_OK, &body, csv, text)
}

fn dispatch(cmd: &Command) -> Result<(Report, &Output)> {
    Ok(match cmd {
        Command::Analyze { common, h, j } => (analyze(common, h, *j)?, &common.out),
        Command::Table {
            common,
            nmax,
            kmax,
            j,
            m,
        } => (table(common, *nmax, *kmax, *j, *m)?, &common.out),
        Command::Simulate {
            common,
            vector,
            horizon,
            j,
        } => (simulate(common, vector, *horizon, *j)?, &common.out),
        Command::Witness {
            common,
            h,
            stages,
            horizon,
        } => (witness(common, h, *stages, *horizon)?, &common.out),
        Command::Prefix {
            common,
            targets,
            times,
            j,
        } => (prefix(common, targets, times, *j)?, &common.out),
        Command::Poly {
            common,
            h,
            poly: coeffs,
            vector,
            power,
        } => (poly(common, h, coeffs, vector.as_deref(), *power)?, &common.out),
        Command::Verify { suite, seed, count, out } => (verify(suite, *seed, *count)?, out),
        Command::Presets { out } => (presets_report()?, out),
    })
}

/// Runs one command. The string is the report, or the diagnostic when the code
/// is [`EXIT_ERROR`] and no report was produced.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            return (code, e.render().to_string());
        }
    };
    let (report, out) = match dispatch(&cli.command) {
        Ok(r) => r,
        Err(e) => return (EXIT_ERROR, format!("error: {e}\n")),
    };
    let rendered = match report.render(out.format) {
        Ok(s) => s,
        Err(e) => return (EXIT_ERROR, format!("error: {e}\n")),
    };
    match &out.out {
        Some(path) => match std::fs::write(path, rendered) {
            Ok(()) => (report.code, String::new()),
            Err(e) => (EXIT_ERROR, format!("error: cannot write `{}`: {e}\n", path.display())),
        },
        None => (report.code, rendered),
    }
}

/// Caps the global thread pool at `HYSHIFT_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("HYSHIFT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::domain(format!("HYSHIFT_THREADS must be a positive integer, found `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::domain(e.to_string()))
}
