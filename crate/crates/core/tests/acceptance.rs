//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown.
//! A criterion listed in `KNOWN_FAILURES` still prints FAIL; the run only
//! fails on an unexpected outcome in either direction.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use primrows::arith::{binomial, dirichlet_power, factorize, ArithmeticFunction};
use primrows::asymptotics::{c0_forms, c1, c_n0, c_n0_prime, c_nk, c_nk_prime};
use primrows::density::{
    a_prime_sequence, density, density_image_gap, density_monotone_check, density_zero, find_k_for_density,
    geometric_seq, is_log_concave, local_density, local_limit_product, menon_decompose, mobius_seq,
    neg_log_density_n2_squarefree, seq_convolve, IntSeq,
};
use primrows::lattice::{count_ball, count_ball_fast_n2, enumerate_hnf, orbit_decomposition_check, BallQuery, EnumConfig};
use primrows::orbits::{
    a, a3_closed, a3_prime_closed, a4_prime_closed, a5_prime_closed, a_local, a_prime, a_prime_local,
};

/// Criteria whose statement is false as written; see the decisions ledger.
const KNOWN_FAILURES: &[u32] = &[5];

const PRIMES_13: [u64; 6] = [2, 3, 5, 7, 11, 13];

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn to_f64(x: &BigRational) -> f64 {
    let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(900);
    (x.numer() >> shift).to_f64().unwrap() / (x.denom() >> shift).to_f64().unwrap()
}

/// ζ(s) by the plain partial sum plus its integral tail, independent of the library.
fn zeta_ref(s: u32) -> f64 {
    let n = 200_000u64;
    let partial: f64 = (1..=n).rev().map(|j| (j as f64).powi(-(s as i32))).sum();
    partial + (n as f64 + 0.5).powf(1.0 - s as f64) / (s as f64 - 1.0)
}

fn criterion_1() -> Outcome {
    let mut streamed = 0usize;
    for n in 2..=4usize {
        for k in 1..=60i64 {
            let all = enumerate_hnf(n, k, false).unwrap().count();
            let prim = enumerate_hnf(n, k, true).unwrap().count();
            streamed += all + prim;
            if BigInt::from(all) != a(n as u32, k).unwrap() {
                return fail(format!("stream length {all} != a({n},{k})"));
            }
            if BigInt::from(prim) != a_prime(n as u32, k).unwrap() {
                return fail(format!("primitive stream length {prim} != a'({n},{k})"));
            }
        }
    }
    pass(format!("n in 2..4, k <= 60; {streamed} matrices streamed"))
}

fn criterion_2() -> Outcome {
    for p in [2u64, 3, 5, 7, 11] {
        for m in 1..=8u32 {
            let pairs = [
                ("a_3", a3_closed(p, m), a_local(3, p, m)),
                ("a'_3", a3_prime_closed(p, m), a_prime_local(3, p, m)),
                ("a'_4", a4_prime_closed(p, m), a_prime_local(4, p, m)),
                ("a'_5", a5_prime_closed(p, m), a_prime_local(5, p, m)),
            ];
            for (label, closed, generic) in pairs {
                if closed.unwrap() != generic.unwrap() {
                    return fail(format!("{label} closed form differs at p={p} m={m}"));
                }
            }
        }
    }
    let spots = [
        (a3_closed(2, 1).unwrap(), 7),
        (a3_prime_closed(2, 1).unwrap(), 4),
        (a4_prime_closed(2, 1).unwrap(), 11),
        (a5_prime_closed(2, 1).unwrap(), 26),
    ];
    if spots.iter().any(|(v, e)| *v != BigInt::from(*e)) {
        return fail(format!("spot values {:?}", spots.iter().map(|s| s.0.to_string()).collect::<Vec<_>>()));
    }
    pass("p in {2,3,5,7,11}, m in 1..8; a3(2)=7, a'3(2)=4, a'4(2)=11, a'5(2)=26")
}

fn criterion_3() -> Outcome {
    let mu = ArithmeticFunction::mobius();
    let one = ArithmeticFunction::one();
    let mut checks = 0u64;
    for n in 2..=6u32 {
        for &p in &PRIMES_13 {
            for m in 1..=8u32 {
                let lhs = a_local(n, p, m).unwrap();
                let split = BigInt::from(p).pow(n - 1) * a_local(n, p, m - 1).unwrap() + a_local(n - 1, p, m).unwrap();
                if lhs != split {
                    return fail(format!("split recursion n={n} p={p} m={m}"));
                }
                let incl: BigInt = (0..=m.min(n))
                    .map(|i| {
                        let t = binomial(n as u64, i as u64) * a_local(n, p, m - i).unwrap();
                        if i % 2 == 0 {
                            t
                        } else {
                            -t
                        }
                    })
                    .sum();
                if a_prime_local(n, p, m).unwrap() != incl {
                    return fail(format!("inclusion/exclusion n={n} p={p} m={m}"));
                }
                checks += 2;
            }
        }
        for k in 1..=2000u64 {
            let divs = factorize(k).unwrap().divisors();
            // (μ^{*n} * a)(k) and (1^{*n} * a')(k), with the powers from the generic Dirichlet routine
            let mut via_mu = BigInt::zero();
            let mut via_one = BigInt::zero();
            for &d in &divs {
                let e = k / d;
                via_mu += dirichlet_power(&mu, n, d).unwrap() * a(n, e as i64).unwrap();
                via_one += dirichlet_power(&one, n, d).unwrap() * a_prime(n, e as i64).unwrap();
            }
            if via_mu != a_prime(n, k as i64).unwrap() {
                return fail(format!("a' != μ^(*n) * a at n={n} k={k}"));
            }
            if via_one != a(n, k as i64).unwrap() {
                return fail(format!("a != 1^(*n) * a' at n={n} k={k}"));
            }
            checks += 2;
        }
        for x in 1..=2000i64 {
            for y in 2..=2000 / x {
                if x >= y || num_integer::gcd(x, y) != 1 {
                    continue;
                }
                let ok = a(n, x * y).unwrap() == a(n, x).unwrap() * a(n, y).unwrap()
                    && a_prime(n, x * y).unwrap() == a_prime(n, x).unwrap() * a_prime(n, y).unwrap()
                    && density(n, x * y).unwrap().into_ratio()
                        == density(n, x).unwrap().into_ratio() * density(n, y).unwrap().into_ratio();
                if !ok {
                    return fail(format!("multiplicativity n={n} ({x},{y})"));
                }
                checks += 3;
            }
        }
    }
    pass(format!("{checks} exact identities over n <= 6, k <= 2000, p <= 13, m <= 8"))
}

fn criterion_4() -> Outcome {
    for n in 4..=8u32 {
        for &p in &PRIMES_13 {
            let seq = a_prime_sequence(n, p, 13).unwrap();
            if let (false, at) = is_log_concave(&seq) {
                return fail(format!("a'_{n}({p}^m) not log-concave at r={at:?}"));
            }
        }
    }
    for n in 2..=8u32 {
        for &p in &PRIMES_13 {
            if !density_monotone_check(n, p, 12).unwrap() {
                return fail(format!("D_{n}({p}^m) not strictly decreasing for m <= 12"));
            }
        }
    }
    let negative = is_log_concave(&a_prime_sequence(2, 2, 13).unwrap());
    if negative != (false, Some(1)) {
        return fail(format!("a'_2(2^m) expected to fail at r=1, got {negative:?}"));
    }
    pass("log-concave for n in 4..8, p <= 13, m <= 12; D strictly decreasing n in 2..8; a'_2(2^m) fails at r=1 as asserted")
}

fn m_star_p(p: u64, i: u32, len: usize) -> IntSeq {
    seq_convolve(&mobius_seq(len).unwrap(), &geometric_seq(p, i, len).unwrap())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for pair in 0..200 {
        let len = rng.gen_range(3..=14);
        let mut draw = || {
            let mut t: Vec<i64> = (0..len).map(|_| rng.gen_range(-10_000..=10_000)).collect();
            t[0] = 1;
            IntSeq::from_i64s(&t).unwrap()
        };
        let (u, v) = (draw(), draw());
        let w = seq_convolve(&u, &v);
        for r in 1..len - 1 {
            let (i, ii, iii) = menon_decompose(&u, &v, r).unwrap();
            if i + ii + iii != &w[r] * &w[r] - &w[r - 1] * &w[r + 1] {
                return fail(format!("identity fails for random pair {pair} at r={r}"));
            }
        }
    }
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for &p in &PRIMES_13 {
        for i in 0..=6u32 {
            for j in i + 1..=7u32 {
                let (u, v) = (m_star_p(p, i, 12), m_star_p(p, j, 12));
                for r in 1..11 {
                    let (a1, a2, a3) = menon_decompose(&u, &v, r).unwrap();
                    let total = a1 + a2 + a3;
                    let product = (&u[r] - &u[r - 1]) * (&v[r] - &v[r - 1]);
                    cases += 1;
                    if total != product {
                        mismatches.push((p, i, j, r, total, product));
                    }
                }
            }
        }
    }
    if mismatches.is_empty() {
        return pass(format!("200 random pairs; product formula on {cases} M*P cases"));
    }
    let only_r1 = mismatches.iter().all(|m| m.3 == 1 && m.4 == &m.5 - 1);
    let (p, i, j, r, total, product) = &mismatches[0];
    fail(format!(
        "identity holds on 200 random pairs, but the product formula fails in {}/{cases} M*P cases{}; \
         e.g. p={p} i={i} j={j} r={r}: I+II+III={total}, (u_r-u_(r-1))(v_r-v_(r-1))={product}",
        mismatches.len(),
        if only_r1 { " (all at r=1, each exactly one less)" } else { "" }
    ))
}

fn criterion_6() -> Outcome {
    let target = r(27, 64);
    let gaps: Vec<BigRational> = (1..=14u32)
        .map(|m| (local_density(3, 2, m) / &target - BigRational::one()).abs())
        .collect();
    if !gaps.windows(2).all(|w| w[1] < w[0]) {
        return fail("|D_3(2^m)·64/27 - 1| not decreasing in m");
    }
    let at10 = &gaps[9];
    if *at10 >= r(1, 100) {
        return fail(format!("gap at m=10 is {}", to_f64(at10)));
    }
    pass(format!("|D_3(2^10)·64/27 - 1| = {:.3e}, decreasing for m = 1..14", to_f64(at10)))
}

fn criterion_7() -> Outcome {
    for n in 3..=5u32 {
        for k in 2..=1000i64 {
            let d = density(n, k).unwrap().into_ratio();
            if d >= BigRational::one() {
                return fail(format!("density({n},{k}) >= 1"));
            }
            // the local-factor product, rebuilt here from the prime factors
            let mut lower = BigRational::one();
            for p in factorize(k as u64).unwrap().primes() {
                let base = BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(p).pow(n - 1));
                lower *= num_traits::pow(base, n as usize);
            }
            if lower != local_limit_product(n, k).unwrap() || d <= lower {
                return fail(format!("density({n},{k}) not above the local-factor product"));
            }
        }
    }
    pass("n in {3,4,5}, 2 <= k <= 1000")
}

fn criterion_8() -> Outcome {
    for n in 4..=40u32 {
        let g = density_image_gap(n).unwrap();
        if !g.gap_holds {
            return fail(format!("gap inequality fails at n={n}"));
        }
        if n <= 20 {
            // direct float evaluation is still meaningful at this size
            let lb = zeta_ref(n - 1).powi(-(n as i32)) * (1.0 - 2f64.powi(1 - n as i32)).powi(-(n as i32));
            if (lb - g.odd_lower_bound).abs() > 1e-10 {
                return fail(format!("odd lower bound at n={n}: {} vs reference {lb}", g.odd_lower_bound));
            }
        }
    }
    let g4 = density_image_gap(4).unwrap();
    if g4.d_at_2 != r(11, 15) || (g4.odd_lower_bound - 0.8177).abs() > 1e-3 {
        return fail(format!("n=4 values ({}, {})", g4.odd_lower_bound, g4.d_at_2));
    }
    let mut found = Vec::new();
    for x in [0.1, 0.7, 2.0] {
        let t = match find_k_for_density(x, 0.01) {
            Ok(t) => t,
            Err(e) => return fail(format!("find_k_for_density({x}, 0.01): {e}")),
        };
        let check = neg_log_density_n2_squarefree(&t.primes);
        let product: BigInt = t.primes.iter().map(|&p| BigInt::from(p)).product();
        if product != t.k || (check - x).abs() >= 0.01 {
            return fail(format!("find_k_for_density({x}) does not verify"));
        }
        if let Some(k) = t.k.to_i64() {
            let exact = -density(2, k).unwrap().to_f64().ln();
            if (exact - x).abs() >= 0.01 {
                return fail(format!("exact D_2(k) misses x={x}"));
            }
        }
        found.push(format!("x={x}: {} primes", t.primes.len()));
    }
    pass(format!(
        "gap holds for n in 4..40; n=4: {:.6} vs 11/15 (printed target 0.8177); {}",
        g4.odd_lower_bound,
        found.join(", ")
    ))
}

fn criterion_9() -> Outcome {
    let cfg = EnumConfig::default();
    let mut ratios = Vec::new();
    for k in 1..=4i64 {
        let q = BallQuery::with_radius(2, k, "1000", true).unwrap();
        let count = count_ball_fast_n2(&q, &cfg).unwrap() as f64;
        let c_prime = 6.0 * a_prime(2, k).unwrap().to_f64().unwrap() / k as f64;
        if (c_nk_prime(2, k).unwrap() - c_prime).abs() > 1e-9 * c_prime {
            return fail(format!("c'_2,{k} = {} vs 6 a'_2(k)/k = {c_prime}", c_nk_prime(2, k).unwrap()));
        }
        let ratio = count / (c_prime * 1e6);
        if (ratio - 1.0).abs() > 0.05 {
            return fail(format!("k={k}: N'/(c'T²) = {ratio}"));
        }
        ratios.push(format!("k={k}: {ratio:.4}"));
    }
    let q = BallQuery::with_t_sq(2, 1, 2, false).unwrap();
    let (slow, fast) = (count_ball(&q, &cfg).unwrap(), count_ball_fast_n2(&q, &cfg).unwrap());
    if slow != 4 || fast != 4 {
        return fail(format!("N_2,1(√2) = {slow} (fast path {fast})"));
    }
    pass(format!("T = 1000, {}; N_2,1(√2) = 4", ratios.join(", ")))
}

fn criterion_10() -> Outcome {
    if (c1(2).unwrap() - 6.0).abs() > 1e-9 {
        return fail(format!("c1(2) = {}", c1(2).unwrap()));
    }
    for n in 2..=12u32 {
        let (product, gamma) = c0_forms(n);
        if ((product - gamma) / gamma).abs() > 1e-10 {
            return fail(format!("C0 forms at n={n}: {product} vs {gamma}"));
        }
    }
    for n in 2..=5u32 {
        for k in (-100..=100i64).filter(|&k| k != 0) {
            let ratio = c_nk_prime(n, k).unwrap() / c_nk(n, k).unwrap();
            let d = density(n, k).unwrap().to_f64();
            if (ratio - d).abs() > 1e-9 {
                return fail(format!("c'/c at n={n} k={k}: {ratio} vs {d}"));
            }
        }
    }
    for n in 3..=8u32 {
        let ratio = c_n0_prime(n).unwrap() / c_n0(n).unwrap();
        let d = density_zero(n).unwrap();
        let reference = zeta_ref(n - 1).powi(-(n as i32));
        if (ratio - d).abs() > 1e-9 || (d - reference).abs() > 1e-9 {
            return fail(format!("c'_n0/c_n0 at n={n}: {ratio} vs {d} (reference {reference})"));
        }
    }
    pass("c1(2) = 6; C0 forms agree for n <= 12; c'/c = D for n <= 5, |k| <= 100; c'_n0/c_n0 = D_n(0) for n in 3..8")
}

fn criterion_11() -> Outcome {
    let cfg = EnumConfig::default();
    let mut cases: Vec<(usize, i64, i64)> = (1..=6).map(|k| (2, k, 400)).collect();
    for k in 1..=3 {
        for s in [6, 9, 12] {
            cases.push((3, k, s));
        }
    }
    let mut classes = 0;
    for (n, k, s) in cases {
        let d = orbit_decomposition_check(n, k, BigRational::from_integer(s.into()), &cfg).unwrap();
        if !d.holds {
            return fail(format!("n={n} k={k} T²={s}: classes sum {} vs N' {}", d.classes.values().sum::<u64>(), d.ball_count));
        }
        classes += d.classes.len();
    }
    pass(format!("n=2, k in 1..6, T²=400; n=3, k in 1..3, T² in {{6,9,12}}; {classes} orbit classes seen"))
}

fn criterion_12() -> Outcome {
    let mut grid = Vec::new();
    for (n, k, s) in [(2usize, 1i64, 900u64), (2, 6, 2500), (2, -4, 1600), (3, 1, 14), (3, 2, 16), (3, 0, 8)] {
        for prim in [false, true] {
            grid.push(BallQuery::with_t_sq(n, k, s, prim).unwrap());
        }
    }
    for q in &grid {
        let counts: Vec<u64> = [1usize, 4, 8]
            .iter()
            .map(|&t| count_ball(q, &EnumConfig::with_threads(t)).unwrap())
            .collect();
        if counts.windows(2).any(|w| w[0] != w[1]) {
            return fail(format!("{q:?}: {counts:?}"));
        }
    }
    pass(format!("{} queries identical with 1, 4 and 8 threads", grid.len()))
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "HNF oracle equivalence", Duration::from_secs(60), criterion_1),
        (2, "closed-form equivalence", Duration::from_secs(5), criterion_2),
        (3, "identity suite", Duration::from_secs(60), criterion_3),
        (4, "log-concavity and monotonicity", Duration::from_secs(30), criterion_4),
        (5, "Menon decomposition", Duration::from_secs(5), criterion_5),
        (6, "limit lemma", Duration::from_secs(1), criterion_6),
        (7, "density bounds", Duration::from_secs(10), criterion_7),
        (8, "density image gap", Duration::from_secs(11), criterion_8),
        (9, "main theorem at desk scale", Duration::from_secs(120), criterion_9),
        (10, "constants", Duration::from_secs(5), criterion_10),
        (11, "orbit decomposition", Duration::from_secs(120), criterion_11),
        (12, "determinism under parallelism", Duration::from_secs(60), criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if outcome.ok && elapsed > limit {
            outcome = fail(format!("{} (took {elapsed:.1?}, limit {limit:?})", outcome.detail));
        }
        let status = if outcome.ok { "PASS" } else { "FAIL" };
        let known = KNOWN_FAILURES.contains(&id);
        let tag = if known && !outcome.ok { " [known, see decisions ledger]" } else { "" };
        println!("{status} criterion {id:>2} ({name}, {elapsed:.2?}){tag}: {}", outcome.detail);
        if outcome.ok == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
