//! Named invariant suites behind `primrows verify`.
//!
//! Each suite recomputes a family of values along two independent routes and
//! records every disagreement. Ranges are sized to finish in seconds.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith::{big_pow, binomial, is_prime};
use crate::asymptotics::{c0_forms, c1, c_n0, c_n0_prime, c_nk, c_nk_prime};
use crate::density::{
    a_prime_sequence, density, density_image_gap, density_monotone_check, density_zero, find_k_for_density,
    geometric_seq, is_log_concave, local_density, local_limit_product, menon_decompose, mobius_seq, seq_convolve,
    IntSeq,
};
use crate::error::{invalid, Error, Result};
use crate::lattice::{count_ball, count_ball_fast_n2, enumerate_hnf_with, orbit_decomposition_check, BallQuery, EnumConfig};
use crate::orbits::{
    a, a3_closed, a3_prime_closed, a4_prime_closed, a5_prime_closed, a_local, a_prime, a_prime_local,
    a_prime_via_convolution, a_via_convolution,
};

pub const SUITES: &[&str] = &[
    "identities",
    "closed-forms",
    "hnf",
    "logconcavity",
    "menon",
    "limits",
    "bounds",
    "image",
    "theorem",
    "constants",
    "orbits",
    "determinism",
];

const SMALL_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    pub failures: Vec<String>,
    /// Expected negatives and other remarks that do not affect `passed`.
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "failures": self.failures,
            "notes": self.notes,
            "seconds": self.seconds,
        })
    }
}

#[derive(Default)]
struct Checker {
    checks: u64,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checker {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        // keep reports readable when a whole range fails
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

/// Runs the named suite. Budget overruns are returned as errors; every other
/// problem is recorded as a failure in the report.
pub fn run_suite(name: &str, cfg: &EnumConfig) -> Result<SuiteReport> {
    let suite: fn(&mut Checker, &EnumConfig) -> Result<()> = match name {
        "identities" => identities,
        "closed-forms" => closed_forms,
        "hnf" => hnf,
        "logconcavity" => logconcavity,
        "menon" => menon,
        "limits" => limits,
        "bounds" => bounds,
        "image" => image,
        "theorem" => theorem,
        "constants" => constants,
        "orbits" => orbit_classes,
        "determinism" => determinism,
        other => {
            return Err(invalid(format!(
                "unknown suite {other:?}; available: {}",
                SUITES.join(", ")
            )))
        }
    };
    let start = Instant::now();
    let mut c = Checker::default();
    match suite(&mut c, cfg) {
        Err(e @ Error::BudgetExceeded { .. }) => return Err(e),
        Err(e) => c.failures.push(format!("error: {e}")),
        Ok(()) => {}
    }
    Ok(SuiteReport {
        name: name.to_string(),
        passed: c.failures.is_empty(),
        checks: c.checks,
        failures: c.failures,
        notes: c.notes,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// `"all"` or a single suite name.
pub fn run_selection(selection: &str, cfg: &EnumConfig) -> Result<Vec<SuiteReport>> {
    if selection == "all" {
        SUITES.iter().map(|s| run_suite(s, cfg)).collect()
    } else {
        Ok(vec![run_suite(selection, cfg)?])
    }
}

fn identities(c: &mut Checker, _: &EnumConfig) -> Result<()> {
    for n in 2..=6u32 {
        for &p in &SMALL_PRIMES {
            for m in 1..=8u32 {
                let split = BigInt::from(p).pow(n - 1) * a_local(n, p, m - 1)? + a_local(n - 1, p, m)?;
                c.check(a_local(n, p, m)? == split, || format!("split recursion n={n} p={p} m={m}"));
                let mut incl = BigInt::zero();
                for i in 0..=m.min(n) {
                    let term = binomial(n as u64, i as u64) * a_local(n, p, m - i)?;
                    if i % 2 == 0 {
                        incl += term;
                    } else {
                        incl -= term;
                    }
                }
                c.check(a_prime_local(n, p, m)? == incl, || format!("inclusion/exclusion n={n} p={p} m={m}"));
            }
        }
        for k in 1..=300i64 {
            c.check(a_prime(n, k)? == a_prime_via_convolution(n, k)?, || format!("a' = μ^(*n) * a at n={n} k={k}"));
            c.check(a(n, k)? == a_via_convolution(n, k)?, || format!("a = 1^(*n) * a' at n={n} k={k}"));
        }
        for x in 1..=40i64 {
            for y in 1..=40i64 {
                if num_integer::gcd(x, y) != 1 {
                    continue;
                }
                c.check(a(n, x * y)? == a(n, x)? * a(n, y)?, || format!("a multiplicative n={n} ({x},{y})"));
                c.check(a_prime(n, x * y)? == a_prime(n, x)? * a_prime(n, y)?, || {
                    format!("a' multiplicative n={n} ({x},{y})")
                });
                let d = density(n, x * y)?.into_ratio();
                c.check(d == density(n, x)?.into_ratio() * density(n, y)?.into_ratio(), || {
                    format!("D multiplicative n={n} ({x},{y})")
                });
            }
        }
    }
    Ok(())
}

fn closed_forms(c: &mut Checker, _: &EnumConfig) -> Result<()> {
    for p in [2u64, 3, 5, 7, 11] {
        for m in 1..=8u32 {
            c.check(a3_closed(p, m)? == a_local(3, p, m)?, || format!("a_3 closed form p={p} m={m}"));
            c.check(a3_prime_closed(p, m)? == a_prime_local(3, p, m)?, || format!("a'_3 closed form p={p} m={m}"));
            c.check(a4_prime_closed(p, m)? == a_prime_local(4, p, m)?, || format!("a'_4 closed form p={p} m={m}"));
            c.check(a5_prime_closed(p, m)? == a_prime_local(5, p, m)?, || format!("a'_5 closed form p={p} m={m}"));
        }
    }
    for (value, expected, label) in [
        (a3_closed(2, 1)?, 7, "a_3(2)"),
        (a3_prime_closed(2, 1)?, 4, "a'_3(2)"),
        (a4_prime_closed(2, 1)?, 11, "a'_4(2)"),
        (a5_prime_closed(2, 1)?, 26, "a'_5(2)"),
    ] {
        c.check(value == BigInt::from(expected), || format!("{label} = {value}, expected {expected}"));
    }
    Ok(())
}

fn hnf(c: &mut Checker, cfg: &EnumConfig) -> Result<()> {
    for (n, kmax) in [(2usize, 40i64), (3, 30), (4, 12)] {
        for k in 1..=kmax {
            let all = enumerate_hnf_with(n, k, false, cfg)?.count();
            let prim = enumerate_hnf_with(n, k, true, cfg)?.count();
            c.check(BigInt::from(all) == a(n as u32, k)?, || format!("HNF count n={n} k={k}"));
            c.check(BigInt::from(prim) == a_prime(n as u32, k)?, || format!("primitive HNF count n={n} k={k}"));
        }
    }
    Ok(())
}

fn logconcavity(c: &mut Checker, _: &EnumConfig) -> Result<()> {
    for n in 4..=8u32 {
        for &p in &SMALL_PRIMES {
            let (ok, at) = is_log_concave(&a_prime_sequence(n, p, 13)?);
            c.check(ok, || format!("a'_{n}({p}^m) not log-concave at r={at:?}"));
        }
    }
    for n in 2..=8u32 {
        for &p in &SMALL_PRIMES {
            c.check(density_monotone_check(n, p, 8)?, || format!("D_{n}({p}^m) not strictly decreasing"));
        }
    }
    let (ok, at) = is_log_concave(&a_prime_sequence(2, 2, 10)?);
    c.check(!ok && at == Some(1), || format!("a'_2(2^m) expected to fail at r=1, got {at:?}"));
    c.note("asserted negative: a'_2(2^m) = 1, 1, 2, 4, ... fails log-concavity at r = 1");
    Ok(())
}

fn m_star_p(p: u64, i: u32, len: usize) -> Result<IntSeq> {
    Ok(seq_convolve(&mobius_seq(len)?, &geometric_seq(p, i, len)?))
}

fn menon(c: &mut Checker, _: &EnumConfig) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let len = rng.gen_range(3..12);
        let mut draw = || {
            let mut t: Vec<i64> = (0..len).map(|_| rng.gen_range(-1000..=1000)).collect();
            t[0] = 1;
            IntSeq::from_i64s(&t)
        };
        let (u, v) = (draw()?, draw()?);
        let w = seq_convolve(&u, &v);
        for r in 1..len - 1 {
            let (i, ii, iii) = menon_decompose(&u, &v, r)?;
            c.check(i + ii + iii == &w[r] * &w[r] - &w[r - 1] * &w[r + 1], || format!("Menon identity r={r}"));
        }
    }
    let mut r1_gap = true;
    for &p in &SMALL_PRIMES {
        for i in 0..=5u32 {
            for j in i + 1..=6u32 {
                let (u, v) = (m_star_p(p, i, 12)?, m_star_p(p, j, 12)?);
                for r in 1..11 {
                    let (a1, a2, a3) = menon_decompose(&u, &v, r)?;
                    let product = (&u[r] - &u[r - 1]) * (&v[r] - &v[r - 1]);
                    if r == 1 {
                        r1_gap &= a1 + a2 + a3 == product - 1;
                    } else {
                        c.check(a1 + a2 + a3 == product, || format!("product formula p={p} i={i} j={j} r={r}"));
                    }
                }
            }
        }
    }
    c.check(r1_gap, || "r = 1 value differs from (u_1-1)(v_1-1) - 1".into());
    c.note("product formula (u_r-u_{r-1})(v_r-v_{r-1}) holds for r >= 2; at r = 1 the value is one less");
    Ok(())
}

fn limits(c: &mut Checker, _: &EnumConfig) -> Result<()> {
    let target = BigRational::new(27.into(), 64.into());
    let mut prev: Option<BigRational> = None;
    for m in 1..=12u32 {
        let gap = (local_density(3, 2, m) / &target - BigRational::one()).abs();
        if let Some(prev) = &prev {
            c.check(&gap < prev, || format!("|D_3(2^m)·64/27 - 1| not decreasing at m={m}"));
        }
        prev = Some(gap);
    }
    let at10 = (local_density(3, 2, 10) / &target - BigRational::one()).abs();
    c.check(at10 < BigRational::new(1.into(), 100.into()), || "D_3(2^10) not within 1% of 27/64".into());
    // (3/4)³ (8/9)³ (24/25)³
    let limit = local_limit_product(3, 30)?;
    let mut last = BigRational::one();
    for m in 1..=12u32 {
        let d = density(3, 30i64.pow(m))?.into_ratio();
        c.check(d < last && d > limit, || format!("D_3(30^m) not decreasing to its limit at m={m}"));
        last = d;
    }
    let gap = (&last - &limit) / &limit;
    c.check(gap < BigRational::new(1.into(), 1000.into()), || "D_3(30^12) not within 1e-3 of the limit".into());
    Ok(())
}

fn bounds(c: &mut Checker, _: &EnumConfig) -> Result<()> {
    for n in 3..=5u32 {
        let floor = density_zero(n)?;
        let mut min = f64::INFINITY;
        for k in 2..=300i64 {
            let d = density(n, k)?.into_ratio();
            let lo = local_limit_product(n, k)?;
            c.check(lo < d && d < BigRational::one(), || format!("density sandwich n={n} k={k}"));
            min = min.min(crate::density::rational_to_f64(&d));
        }
        c.check(min >= floor, || format!("min D_{n} below 1/ζ(n-1)^n"));
    }
    for n in 2..=6u32 {
        for &p in &SMALL_PRIMES {
            for m in 0..=8u32 {
                c.check(a_local(n, p, m)? >= big_pow(p, (m * (n - 1)) as u64), || {
                    format!("a_{n}({p}^{m}) < p^(m(n-1))")
                });
            }
        }
    }
    Ok(())
}

fn image(c: &mut Checker, _: &EnumConfig) -> Result<()> {
    for n in 4..=40u32 {
        let g = density_image_gap(n)?;
        c.check(g.gap_holds, || format!("density gap fails at n={n}"));
    }
    let g4 = density_image_gap(4)?;
    c.check((g4.odd_lower_bound - 0.817086).abs() < 1e-6, || format!("n=4 lower bound {}", g4.odd_lower_bound));
    for x in [0.1, 0.7, 2.0] {
        let t = find_k_for_density(x, 0.01)?;
        c.check((t.neg_log_density - x).abs() < 0.01, || format!("find_k_for_density({x})"));
        c.check(t.primes.iter().all(|&p| is_prime(p)), || format!("non-prime factor for x={x}"));
    }
    Ok(())
}

fn theorem(c: &mut Checker, cfg: &EnumConfig) -> Result<()> {
    for k in 1..=4i64 {
        let q = BallQuery::with_t_sq(2, k, 1_000_000, true)?;
        let count = count_ball_fast_n2(&q, cfg)? as f64;
        let ratio = count / (c_nk_prime(2, k)? * 1e6);
        c.check((ratio - 1.0).abs() <= 0.05, || format!("N'_2,{k}(1000)/(c' T²) = {ratio}"));
    }
    let q = BallQuery::with_t_sq(2, 1, 2, false)?;
    c.check(count_ball(&q, cfg)? == 4, || "N_2,1(√2) != 4".into());
    Ok(())
}

fn constants(c: &mut Checker, _: &EnumConfig) -> Result<()> {
    c.check((c1(2)? - 6.0).abs() < 1e-9, || "c1(2) != 6".into());
    for n in 2..=12u32 {
        let (a, b) = c0_forms(n);
        c.check(((a - b) / b).abs() < 1e-10, || format!("C0 forms disagree at n={n}"));
    }
    for n in 2..=5u32 {
        for k in (-100..=100i64).filter(|&k| k != 0) {
            let ratio = c_nk_prime(n, k)? / c_nk(n, k)?;
            let d = density(n, k)?.to_f64();
            c.check((ratio - d).abs() < 1e-9, || format!("c'/c vs D at n={n} k={k}"));
        }
    }
    for n in 3..=8u32 {
        let ratio = c_n0_prime(n)? / c_n0(n)?;
        c.check((ratio - density_zero(n)?).abs() < 1e-9, || format!("c'_n0/c_n0 vs D_n(0) at n={n}"));
    }
    Ok(())
}

fn orbit_classes(c: &mut Checker, cfg: &EnumConfig) -> Result<()> {
    let mut cases: Vec<(usize, i64, i64)> = (1..=6).map(|k| (2, k, 400)).collect();
    for k in 1..=3 {
        for s in [6, 9, 12] {
            cases.push((3, k, s));
        }
    }
    for (n, k, s) in cases {
        let r = orbit_decomposition_check(n, k, BigRational::from_integer(s.into()), cfg)?;
        c.check(r.holds, || format!("orbit decomposition n={n} k={k} T²={s}"));
        c.check(BigInt::from(r.classes.len()) <= a_prime(n as u32, k)?, || {
            format!("more classes than a'_{n}({k})")
        });
    }
    Ok(())
}

fn determinism(c: &mut Checker, cfg: &EnumConfig) -> Result<()> {
    let grid: Vec<BallQuery> = [(2usize, 1i64, 400u64), (2, 6, 900), (3, 1, 12), (3, 2, 14), (3, -3, 12)]
        .iter()
        .flat_map(|&(n, k, s)| [false, true].map(|p| BallQuery::with_t_sq(n, k, s, p)))
        .collect::<Result<_>>()?;
    for q in &grid {
        let counts: Vec<u64> = [1usize, 4, 8]
            .iter()
            .map(|&t| count_ball(q, &EnumConfig { threads: t, ..cfg.clone() }))
            .collect::<Result<_>>()?;
        c.check(counts.windows(2).all(|w| w[0] == w[1]), || format!("thread-dependent count {counts:?} for {q:?}"));
    }
    Ok(())
}

/// JSON summary `{"passed": .., "suites": [...]}`.
pub fn summary_json(reports: &[SuiteReport]) -> Value {
    json!({
        "passed": reports.iter().all(|r| r.passed),
        "suites": reports.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
    })
}
