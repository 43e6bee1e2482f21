//! The `primrows` command line.
//!
//! Every subcommand produces a table that is rendered as CSV, JSON
//! (`{"config": .., "results": [..]}`) or aligned plain text. Exact values are
//! always printed next to their 12-significant-digit decimals.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget
//! exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::asymptotics::{constant_report, Estimate};
use crate::density::{density, density_prime_limit, density_prime_limit_n2, density_zero, local_density};
use crate::error::{invalid, Error, Result};
use crate::lattice::{count_ball, count_ball_fast_n2, enumerate_hnf_with, parse_decimal, BallQuery, EnumConfig};
use crate::orbits::{a, a_prime};
use crate::verify::{run_selection, summary_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "primrows",
    version,
    about = "Orbit counts, densities and lattice oracles for integer matrices with primitive rows"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// a_n(k), a'_n(k) and D_n(k)
    Count,
    /// D_n(k), D_n(0), or D_n(p^m) for m = 0..mmax with --p
    Density,
    /// C0, C1 and the counting constants for (n, k); k = 0 or omitted gives the singular case
    Constants,
    /// Brute force: ball count with --T, otherwise the list of Hermite normal forms
    Oracle,
    /// N_{2,k}(T), N'_{2,k}(T) and N'/(c' T^2) for T = Tmax/steps, ..., Tmax
    Converge,
    /// a, a', D for k = 1..K (K given by --k)
    Scan,
    /// Run invariant suites (--suite NAME or all)
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Plain,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    #[arg(long, global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Ball radius as a decimal
    #[arg(long = "T", global = true)]
    pub t: Option<String>,
    #[arg(long = "Tmax", global = true)]
    pub t_max: Option<String>,
    #[arg(long, global = true)]
    pub steps: Option<u32>,
    /// Comma-separated primes
    #[arg(long, global = true, value_delimiter = ',')]
    pub p: Vec<u64>,
    #[arg(long, global = true)]
    pub mmax: Option<u32>,
    #[arg(long, global = true)]
    pub primitive: bool,
    /// Use the n = 2 line-counting path in `oracle`
    #[arg(long, global = true)]
    pub fast: bool,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Enumeration budget in candidate visits
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value = "all")]
    pub suite: String,
}

impl Opts {
    fn enum_config(&self) -> EnumConfig {
        let mut cfg = EnumConfig::with_threads(self.threads);
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        cfg
    }

    fn need_n(&self) -> Result<u32> {
        self.n.ok_or_else(|| invalid("--n is required"))
    }

    fn need_k(&self) -> Result<i64> {
        self.k.ok_or_else(|| invalid("--k is required"))
    }

    fn config_json(&self, command: Command) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(format!("{command:?}").to_lowercase()));
        if let Some(n) = self.n {
            m.insert("n".into(), json!(n));
        }
        if let Some(k) = self.k {
            m.insert("k".into(), json!(k));
        }
        if let Some(t) = &self.t {
            m.insert("T".into(), json!(t));
        }
        if let Some(t) = &self.t_max {
            m.insert("Tmax".into(), json!(t));
        }
        if let Some(s) = self.steps {
            m.insert("steps".into(), json!(s));
        }
        if !self.p.is_empty() {
            m.insert("p".into(), json!(self.p));
        }
        if let Some(x) = self.mmax {
            m.insert("mmax".into(), json!(x));
        }
        m.insert("primitive".into(), json!(self.primitive));
        m.insert("fast".into(), json!(self.fast));
        m.insert("threads".into(), json!(self.threads));
        m.insert("budget".into(), json!(self.enum_config().budget.to_string()));
        if command == Command::Verify {
            m.insert("suite".into(), json!(self.suite));
        }
        Value::Object(m)
    }
}

/// Column-oriented result of a subcommand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let field = |s: &str| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|s| field(s)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), Value::String(v.clone())))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn to_plain(&self) -> String {
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                self.rows
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([self.columns[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(self.columns.clone());
        for row in &self.rows {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
        }
        out
    }
}

/// `|r|` to 12 significant digits, rounded half away from zero, with at
/// least one fractional digit (`1 -> "1.0"`, `11/15 -> "0.733333333333"`).
pub fn format_sig(r: &BigRational) -> String {
    format_sig_digits(r, 12)
}

pub fn format_sig_digits(r: &BigRational, digits: u32) -> String {
    if r.is_zero() {
        return "0.0".into();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let x = r.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |e: i64| -> BigRational {
        if e >= 0 {
            num_traits::pow(ten.clone(), e as usize)
        } else {
            num_traits::pow(ten.recip(), (-e) as usize)
        }
    };
    let mut e = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
    while pow10(e) > x {
        e -= 1;
    }
    while pow10(e + 1) <= x {
        e += 1;
    }
    let top = digits as i64 - 1;
    let scaled = &x * pow10(top - e);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut int = if rem * 2 >= *scaled.denom() { q + 1 } else { q };
    if int == num_traits::pow(BigInt::from(10), digits as usize) {
        int /= 10;
        e += 1;
    }
    let s = int.to_string();
    if !(-7..=15).contains(&e) {
        let frac = s[1..].trim_end_matches('0');
        let frac = if frac.is_empty() { "0" } else { frac };
        return format!("{sign}{}.{frac}e{e}", &s[..1]);
    }
    if e >= 0 {
        let split = (e + 1) as usize;
        let (int_part, frac) = if split >= s.len() {
            (format!("{s}{}", "0".repeat(split - s.len())), String::new())
        } else {
            (s[..split].to_string(), s[split..].to_string())
        };
        let frac = frac.trim_end_matches('0');
        format!("{sign}{int_part}.{}", if frac.is_empty() { "0" } else { frac })
    } else {
        let zeros = "0".repeat((-e - 1) as usize);
        format!("{sign}0.{zeros}{}", s.trim_end_matches('0'))
    }
}

/// [`format_sig`] for a float, via its exact binary value.
pub fn format_f64(x: f64) -> String {
    match BigRational::from_float(x) {
        Some(r) => format_sig(&r),
        None => x.to_string(),
    }
}

fn exact(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn cmd_count(o: &Opts) -> Result<Table> {
    let (n, k) = (o.need_n()?, o.need_k()?);
    if n < 2 {
        return Err(invalid("count needs n >= 2"));
    }
    let d = density(n, k)?;
    let mut t = Table::new(&["n", "k", "a", "a_prime", "D", "D_decimal"]);
    t.push(vec![
        n.to_string(),
        k.to_string(),
        a(n, k)?.to_string(),
        a_prime(n, k)?.to_string(),
        d.to_string(),
        format_sig(d.ratio()),
    ]);
    Ok(t)
}

fn cmd_density(o: &Opts) -> Result<Table> {
    let n = o.need_n()?;
    if n < 2 {
        return Err(invalid("density needs n >= 2"));
    }
    if !o.p.is_empty() {
        let mmax = o.mmax.unwrap_or(8);
        let mut t = Table::new(&["p", "m", "D", "D_decimal", "limit", "limit_decimal"]);
        for &p in &o.p {
            let limit = if n == 2 { density_prime_limit_n2(p)? } else { density_prime_limit(n, p)? };
            for m in 0..=mmax {
                let d = local_density(n, p, m);
                t.push(vec![
                    p.to_string(),
                    m.to_string(),
                    exact(&d),
                    format_sig(&d),
                    exact(&limit),
                    format_sig(&limit),
                ]);
            }
        }
        return Ok(t);
    }
    let k = o.need_k()?;
    let mut t = Table::new(&["n", "k", "D", "D_decimal"]);
    if k == 0 {
        t.push(vec![n.to_string(), "0".into(), String::new(), format_f64(density_zero(n)?)]);
    } else {
        let d = density(n, k)?;
        t.push(vec![n.to_string(), k.to_string(), d.to_string(), format_sig(d.ratio())]);
    }
    Ok(t)
}

fn cmd_constants(o: &Opts) -> Result<Table> {
    let n = o.need_n()?;
    let r = constant_report(n, o.k)?;
    let singular = matches!(r.k, None | Some(0));
    let mut t = Table::new(&["name", "value", "abs_error"]);
    let mut push = |name: &str, e: &Estimate| {
        t.push(vec![name.to_string(), format_f64(e.value), format!("{:.1e}", e.abs_error)]);
    };
    push("C0", &r.c0);
    push("C1", &r.c1);
    if singular {
        push("c_n0", &r.c);
        if let Some(cp) = &r.c_prime {
            push("c_n0_prime", cp);
            let d = density_zero(n)?;
            t.push(vec!["D_n0".into(), format_f64(d), format!("{:.1e}", 1e-10)]);
        }
    } else {
        push("c_nk", &r.c);
        if let Some(cp) = &r.c_prime {
            push("c_nk_prime", cp);
        }
    }
    Ok(t)
}

fn cmd_oracle(o: &Opts) -> Result<Table> {
    let (n, k) = (o.need_n()?, o.need_k()?);
    let cfg = o.enum_config();
    match &o.t {
        Some(radius) => {
            let q = BallQuery::with_radius(n as usize, k, radius, o.primitive)?;
            let count = if o.fast { count_ball_fast_n2(&q, &cfg)? } else { count_ball(&q, &cfg)? };
            let mut t = Table::new(&["n", "k", "T_sq", "primitive", "count"]);
            t.push(vec![
                n.to_string(),
                k.to_string(),
                exact(&q.t_sq),
                o.primitive.to_string(),
                count.to_string(),
            ]);
            Ok(t)
        }
        None => {
            let mut t = Table::new(&["index", "hnf"]);
            for (i, m) in enumerate_hnf_with(n as usize, k, o.primitive, &cfg)?.enumerate() {
                t.push(vec![(i + 1).to_string(), m.to_string()]);
            }
            Ok(t)
        }
    }
}

fn cmd_converge(o: &Opts) -> Result<Table> {
    if o.n.is_some_and(|n| n != 2) {
        return Err(invalid("converge is only available for n = 2"));
    }
    let k = o.need_k()?;
    if k == 0 {
        return Err(Error::ZeroDeterminant);
    }
    let t_max = parse_decimal(o.t_max.as_deref().ok_or_else(|| invalid("--Tmax is required"))?)?;
    let steps = o.steps.unwrap_or(10);
    if steps == 0 {
        return Err(invalid("--steps must be >= 1"));
    }
    let c_prime = crate::asymptotics::c_nk_prime(2, k)?;
    let cfg = o.enum_config();
    let mut t = Table::new(&["T", "N", "Nprime", "Nprime_over_T2", "c_prime", "ratio"]);
    for i in 1..=steps {
        let radius = &t_max * BigRational::new(i.into(), steps.into());
        let t_sq = &radius * &radius;
        let all = count_ball_fast_n2(&BallQuery::new(2, k, t_sq.clone(), false)?, &cfg)?;
        let prim = count_ball_fast_n2(&BallQuery::new(2, k, t_sq.clone(), true)?, &cfg)?;
        let per_t2 = if t_sq.is_zero() { BigRational::zero() } else { BigRational::from_integer(prim.into()) / &t_sq };
        let ratio = crate::density::rational_to_f64(&per_t2) / c_prime;
        t.push(vec![
            format_sig(&radius),
            all.to_string(),
            prim.to_string(),
            format_sig(&per_t2),
            format_f64(c_prime),
            format_f64(ratio),
        ]);
    }
    Ok(t)
}

fn cmd_scan(o: &Opts) -> Result<Table> {
    let n = o.need_n()?;
    let k_max = o.need_k()?;
    if n < 2 {
        return Err(invalid("scan needs n >= 2"));
    }
    if k_max < 1 {
        return Err(invalid("scan needs --k >= 1 (the largest k)"));
    }
    let mut t = Table::new(&["k", "a", "a_prime", "D", "D_decimal"]);
    for k in 1..=k_max {
        let d = density(n, k)?;
        t.push(vec![
            k.to_string(),
            a(n, k)?.to_string(),
            a_prime(n, k)?.to_string(),
            d.to_string(),
            format_sig(d.ratio()),
        ]);
    }
    Ok(t)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Verification(_) => EXIT_VERIFICATION,
        _ => EXIT_USAGE,
    }
}

fn emit(o: &Opts, text: &str, out: &mut dyn Write) -> Result<()> {
    match &o.out {
        Some(path) => std::fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| invalid(format!("cannot write output: {e}"))),
    }
}

fn render(o: &Opts, command: Command, table: &Table, default: Format) -> String {
    match o.format.unwrap_or(default) {
        Format::Csv => table.to_csv(),
        Format::Plain => table.to_plain(),
        Format::Json => {
            let doc = json!({"config": o.config_json(command), "results": table.to_json_rows()});
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    }
}

fn run_verify(o: &Opts, out: &mut dyn Write) -> Result<i32> {
    let reports = run_selection(&o.suite, &o.enum_config())?;
    let passed = reports.iter().all(|r| r.passed);
    let text = match o.format.unwrap_or(Format::Json) {
        Format::Json => {
            let doc = json!({"config": o.config_json(Command::Verify), "results": summary_json(&reports)});
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut t = Table::new(&["suite", "passed", "checks", "failures", "seconds"]);
            for r in &reports {
                t.push(vec![
                    r.name.clone(),
                    r.passed.to_string(),
                    r.checks.to_string(),
                    r.failures.len().to_string(),
                    format!("{:.3}", r.seconds),
                ]);
            }
            t.to_csv()
        }
        Format::Plain => {
            let mut s = String::new();
            for r in &reports {
                let status = if r.passed { "PASS" } else { "FAIL" };
                s += &format!("{status} {} ({} checks, {:.2} s)\n", r.name, r.checks, r.seconds);
                for f in &r.failures {
                    s += &format!("  failure: {f}\n");
                }
                for note in &r.notes {
                    s += &format!("  note: {note}\n");
                }
            }
            s
        }
    };
    emit(o, &text, out)?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFICATION })
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let o = &cli.opts;
    let (table, default) = match cli.command {
        Command::Count => (cmd_count(o)?, Format::Plain),
        Command::Density => (cmd_density(o)?, Format::Plain),
        Command::Constants => (cmd_constants(o)?, Format::Plain),
        Command::Oracle => (cmd_oracle(o)?, Format::Plain),
        Command::Converge => (cmd_converge(o)?, Format::Csv),
        Command::Scan => (cmd_scan(o)?, Format::Csv),
        Command::Verify => return run_verify(o, out),
    };
    emit(o, &render(o, cli.command, &table, default), out)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
