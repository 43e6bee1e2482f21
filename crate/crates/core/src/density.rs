//! The density `D_n(k) = a'_n(k) / a_n(k)` of primitive-row matrices among
//! all integer matrices of determinant `k`, and the sequence tools used to
//! study `m -> a'_n(p^m)`.
//!
//! Densities stay exact rationals; floats only appear where a value is
//! compared against ζ or a logarithm.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{big_pow, factorize, require_prime};
use crate::asymptotics::{zeta_int, zeta_minus_one};
use crate::error::{invalid, Error, Result};
use crate::orbits::{a_factored, a_prime_factored};

/// Default cap on the number of primes used by [`find_k_for_density`].
pub const DEFAULT_MAX_PRIMES: usize = 1_000_000;

/// An exact density value in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Density(BigRational);

impl Density {
    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(900);
    (n >> shift).to_f64().unwrap_or(f64::NAN) / (d >> shift).to_f64().unwrap_or(f64::NAN)
}

fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn require_dim(n: u32, min: u32) -> Result<()> {
    if n < min {
        Err(invalid(format!("dimension must be >= {min}, got {n}")))
    } else {
        Ok(())
    }
}

/// `D_n(k)`, exact.
pub fn density(n: u32, k: i64) -> Result<Density> {
    require_dim(n, 2)?;
    if k == 0 {
        return Err(Error::ZeroDeterminant);
    }
    let f = factorize(k.unsigned_abs())?;
    Ok(Density(BigRational::new(a_prime_factored(n, &f), a_factored(n, &f))))
}

/// `D_2(p^m) = (1 - 1/p)^2 / (1 - 1/p^{m+1})` for `m >= 1`, and 1 at `m = 0`.
pub fn density_local_n2(p: u64, m: u32) -> Result<Density> {
    require_prime(p)?;
    if m == 0 {
        return Ok(Density(BigRational::one()));
    }
    let one = BigRational::one();
    let q = &one - ratio(1, p);
    let tail = &one - BigRational::new(BigInt::one(), big_pow(p, m as u64 + 1));
    Ok(Density(&q * &q / tail))
}

/// `lim_{m→∞} D_n(p^m) = (1 - p^{1-n})^n` for `n >= 3`.
pub fn density_prime_limit(n: u32, p: u64) -> Result<BigRational> {
    require_dim(n, 3)?;
    require_prime(p)?;
    let base = BigRational::one() - BigRational::new(BigInt::one(), big_pow(p, n as u64 - 1));
    Ok(num_traits::pow(base, n as usize))
}

/// `lim_{m→∞} D_2(p^m) = (1 - 1/p)^2`.
pub fn density_prime_limit_n2(p: u64) -> Result<BigRational> {
    require_prime(p)?;
    let base = BigRational::one() - ratio(1, p);
    Ok(&base * &base)
}

/// `D_n(0) = 1 / ζ(n-1)^n`, `n >= 3`.
pub fn density_zero(n: u32) -> Result<f64> {
    require_dim(n, 3)?;
    Ok(zeta_int(n - 1)?.powi(-(n as i32)))
}

/// Finite prefix of an integer sequence indexed from 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntSeq(Vec<BigInt>);

impl IntSeq {
    pub fn new(terms: Vec<BigInt>) -> Result<Self> {
        if terms.is_empty() {
            return Err(invalid("a sequence needs at least one term"));
        }
        Ok(IntSeq(terms))
    }

    pub fn from_i64s(terms: &[i64]) -> Result<Self> {
        Self::new(terms.iter().map(|&t| BigInt::from(t)).collect())
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> Option<&BigInt> {
        self.0.get(i)
    }
}

impl std::ops::Index<usize> for IntSeq {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

/// `(u ⋆ v)_r = Σ_{j=0}^{r} u_{r-j} v_j`, over the indices both prefixes cover.
pub fn seq_convolve(u: &IntSeq, v: &IntSeq) -> IntSeq {
    let len = u.len().min(v.len());
    IntSeq(
        (0..len)
            .map(|r| (0..=r).map(|j| &u[r - j] * &v[j]).sum())
            .collect(),
    )
}

/// `M = (1, -1, 0, 0, ...)`.
pub fn mobius_seq(len: usize) -> Result<IntSeq> {
    if len == 0 {
        return Err(invalid("len must be >= 1"));
    }
    let mut t = vec![BigInt::zero(); len];
    t[0] = BigInt::one();
    if len > 1 {
        t[1] = BigInt::from(-1);
    }
    Ok(IntSeq(t))
}

/// `P_i = (1, p^i, p^{2i}, ...)`.
pub fn geometric_seq(p: u64, i: u32, len: usize) -> Result<IntSeq> {
    if len == 0 {
        return Err(invalid("len must be >= 1"));
    }
    Ok(IntSeq((0..len).map(|r| big_pow(p, r as u64 * i as u64)).collect()))
}

/// `m -> a'_n(p^m)` for `m < len`.
pub fn a_prime_sequence(n: u32, p: u64, len: usize) -> Result<IntSeq> {
    require_dim(n, 2)?;
    require_prime(p)?;
    let terms = (0..len as u32)
        .map(|m| crate::orbits::a_prime_local(n, p, m))
        .collect::<Result<Vec<_>>>()?;
    IntSeq::new(terms)
}

/// The three sums `(I, II, III)` with `I + II + III = w_r² - w_{r-1} w_{r+1}`
/// for `w = u ⋆ v`, valid whenever `u_0 = v_0 = 1`.
pub fn menon_decompose(u: &IntSeq, v: &IntSeq, r: usize) -> Result<(BigInt, BigInt, BigInt)> {
    if !u[0].is_one() || !v[0].is_one() {
        return Err(invalid("menon_decompose requires u_0 = v_0 = 1"));
    }
    if r == 0 {
        return Err(invalid("menon_decompose requires r >= 1"));
    }
    if u.len() < r + 2 || v.len() < r + 2 {
        return Err(invalid(format!("sequences must cover index {}", r + 1)));
    }
    let mut one = BigInt::zero();
    for j in 0..r {
        for i in 0..j {
            let vf = &v[j] * &v[i + 1] - &v[j + 1] * &v[i];
            if vf.is_zero() {
                continue;
            }
            let uf = &u[r - j] * &u[r - i - 1] - &u[r - 1 - j] * &u[r - i];
            one += vf * uf;
        }
    }
    let mut two = BigInt::zero();
    for j in 0..r {
        two += &v[j] * (&u[r - j] * &u[r] - &u[r - 1 - j] * &u[r + 1]);
    }
    let mut three = &v[r] * &u[r];
    for j in 0..r {
        three += &u[j] * (&v[r] * &v[r - j] - &v[r + 1] * &v[r - 1 - j]);
    }
    Ok((one, two, three))
}

/// Log-concavity `u_r² - u_{r-1} u_{r+1} >= 0` at every interior index;
/// reports the first violating `r`. Prefixes shorter than 3 are vacuously
/// log-concave.
pub fn is_log_concave(u: &IntSeq) -> (bool, Option<usize>) {
    let t = u.terms();
    for r in 1..t.len().saturating_sub(1) {
        if (&t[r] * &t[r] - &t[r - 1] * &t[r + 1]).is_negative() {
            return (false, Some(r));
        }
    }
    (true, None)
}

/// True iff `D_n(p^0) > D_n(p^1) > ... > D_n(p^max_m)`.
pub fn density_monotone_check(n: u32, p: u64, max_m: u32) -> Result<bool> {
    require_dim(n, 2)?;
    require_prime(p)?;
    if max_m == 0 {
        return Err(invalid("max exponent must be >= 1"));
    }
    let mut prev: Option<BigRational> = None;
    for m in 0..=max_m {
        let d = local_density(n, p, m);
        if let Some(prev) = &prev {
            if d >= *prev {
                return Ok(false);
            }
        }
        prev = Some(d);
    }
    Ok(true)
}

/// `D_n(p^m)` without going through `i64` (the power may not fit).
/// Panics if `n < 2` or `p` is not prime.
pub fn local_density(n: u32, p: u64, m: u32) -> BigRational {
    let num = crate::orbits::a_prime_local(n, p, m).expect("validated by caller");
    let den = crate::orbits::a_local(n, p, m).expect("validated by caller");
    BigRational::new(num, den)
}

/// The separation between odd and even determinants for `n >= 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGap {
    /// `ζ(n-1)^{-n} (1 - 2^{1-n})^{-n}`, a lower bound for `D_n(k)` over odd `k`.
    pub odd_lower_bound: f64,
    /// `D_n(2) = 1 - n/(2^n - 1)`, an upper bound over even `k`.
    pub d_at_2: BigRational,
    pub gap_holds: bool,
}

/// Evaluates both sides of the odd/even gap inequality. The comparison is
/// done on logarithms built from `ζ(n-1) - 1`, so it stays meaningful when
/// both sides are within 1e-11 of 1.
pub fn density_image_gap(n: u32) -> Result<DensityGap> {
    if n < 4 {
        return Err(invalid(format!("the density gap needs n >= 4, got {n}")));
    }
    let nf = n as f64;
    let zm1 = zeta_minus_one(n - 1)?;
    let half_pow = 2f64.powi(1 - n as i32);
    let log_lower = -nf * zm1.ln_1p() - nf * (-half_pow).ln_1p();
    let two_n_minus_1 = big_pow(2, n as u64) - BigInt::one();
    let d_at_2 = BigRational::one() - BigRational::new(BigInt::from(n), two_n_minus_1.clone());
    let eps_at_2 = rational_to_f64(&BigRational::new(BigInt::from(n), two_n_minus_1));
    let log_d2 = (-eps_at_2).ln_1p();
    Ok(DensityGap {
        odd_lower_bound: log_lower.exp(),
        d_at_2,
        gap_holds: log_lower > log_d2,
    })
}

/// A squarefree `k` whose `-log D_2(k)` approximates a target.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTarget {
    pub k: BigInt,
    /// The primes dividing `k`, increasing and consecutive.
    pub primes: Vec<u64>,
    /// `-log D_2(k)`, evaluated from the exact value of `D_2(k)`.
    pub neg_log_density: f64,
}

fn d_term(p: u64) -> f64 {
    // -log(1 - 2/(p+1)) = log1p(2/(p-1))
    (2.0 / (p - 1) as f64).ln_1p()
}

fn sieve(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn product_tree(values: &[BigInt]) -> BigInt {
    match values.len() {
        0 => BigInt::one(),
        1 => values[0].clone(),
        len => product_tree(&values[..len / 2]) * product_tree(&values[len / 2..]),
    }
}

/// Natural logarithm of a positive big integer.
fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact `-log D_2(k)` for squarefree `k = Π primes`, via
/// `D_2(k) = Π (p - 1)/(p + 1)`.
pub fn neg_log_density_n2_squarefree(primes: &[u64]) -> f64 {
    let num: Vec<BigInt> = primes.iter().map(|&p| BigInt::from(p - 1)).collect();
    let den: Vec<BigInt> = primes.iter().map(|&p| BigInt::from(p + 1)).collect();
    ln_big(&product_tree(&den)) - ln_big(&product_tree(&num))
}

/// Greedy construction of a squarefree `k` with `|-log D_2(k) - x| < eps`:
/// start at the smallest prime `p_0` with `d_{p_0} < eps` and take
/// consecutive primes until `Σ d_p >= x`, where `d_p = -log(1 - 2/(p+1))`.
pub fn find_k_for_density(x: f64, eps: f64) -> Result<DensityTarget> {
    find_k_for_density_capped(x, eps, DEFAULT_MAX_PRIMES)
}

pub fn find_k_for_density_capped(x: f64, eps: f64, max_primes: usize) -> Result<DensityTarget> {
    if x.is_nan() || x < 0.0 || !x.is_finite() {
        return Err(invalid("x must be a finite non-negative number"));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(invalid("eps must be positive"));
    }
    if x == 0.0 {
        return Ok(DensityTarget {
            k: BigInt::one(),
            primes: Vec::new(),
            neg_log_density: 0.0,
        });
    }
    let mut limit = 1usize << 16;
    let chosen = loop {
        let primes = sieve(limit);
        let start = primes.iter().position(|&p| d_term(p) < eps);
        if let Some(start) = start {
            let mut sum = 0.0;
            let mut end = None;
            for (idx, &p) in primes.iter().enumerate().skip(start) {
                sum += d_term(p);
                if idx - start + 1 > max_primes {
                    return Err(Error::BudgetExceeded {
                        what: "prime set for find_k_for_density",
                        estimate: (idx - start + 1) as u128,
                        budget: max_primes as u128,
                    });
                }
                if sum >= x {
                    end = Some(idx);
                    break;
                }
            }
            if let Some(end) = end {
                break primes[start..=end].to_vec();
            }
        }
        limit *= 4;
    };
    let neg_log = neg_log_density_n2_squarefree(&chosen);
    if (neg_log - x).abs() >= eps {
        return Err(Error::Verification(format!(
            "-log D_2(k) = {neg_log} misses {x} by more than {eps}"
        )));
    }
    let k = product_tree(&chosen.iter().map(|&p| BigInt::from(p)).collect::<Vec<_>>());
    Ok(DensityTarget {
        k,
        primes: chosen,
        neg_log_density: neg_log,
    })
}

/// `Π_{p | k} (1 - p^{1-n})^n`, the limit of `D_n` along powers of the
/// primes dividing `k`.
pub fn local_limit_product(n: u32, k: i64) -> Result<BigRational> {
    require_dim(n, 3)?;
    if k == 0 {
        return Err(Error::ZeroDeterminant);
    }
    factorize(k.unsigned_abs())?
        .primes()
        .map(|p| density_prime_limit(n, p))
        .try_fold(BigRational::one(), |acc, x| Ok(acc * x?))
}

/// Whether `x` lies strictly inside `(lo, hi)`.
pub fn strictly_between(lo: &BigRational, x: &BigRational, hi: &BigRational) -> bool {
    lo.cmp(x) == Ordering::Less && x.cmp(hi) == Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::a_prime_local;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        ratio(n, d)
    }

    fn seq(t: &[i64]) -> IntSeq {
        IntSeq::from_i64s(t).unwrap()
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(4, 2).unwrap().ratio(), &r(11, 15));
        for n in 2..8 {
            assert_eq!(density(n, 1).unwrap().ratio(), &r(1, 1));
        }
        let split = r(1, 3) * r(1, 2);
        assert_eq!(density(2, 6).unwrap().ratio(), &split);
        assert_eq!(density(2, -6).unwrap().ratio(), &r(1, 6));
        assert_eq!(density(3, 0), Err(Error::ZeroDeterminant));
        assert_eq!(density(4, 2).unwrap().to_string(), "11/15");
    }

    #[test]
    fn n2_local_examples() {
        assert_eq!(density_local_n2(2, 1).unwrap().ratio(), &r(1, 3));
        assert_eq!(density_local_n2(7, 0).unwrap().ratio(), &r(1, 1));
        assert_eq!(density_local_n2(2, 2).unwrap().ratio(), &(r(1, 4) / r(7, 8)));
        for p in [2u64, 3, 5, 7, 11, 13] {
            for m in 0..8 {
                let direct = density(2, (p as i64).pow(m)).unwrap();
                assert_eq!(density_local_n2(p, m).unwrap(), direct);
            }
            // D_2(p) = 1 - 2/(p+1)
            assert_eq!(density_local_n2(p, 1).unwrap().ratio(), &(r(1, 1) - r(2, p as i64 + 1)));
        }
        assert!(density_local_n2(9, 1).is_err());
    }

    #[test]
    fn prime_limit_examples() {
        assert_eq!(density_prime_limit(3, 2).unwrap(), r(27, 64));
        assert_eq!(density_prime_limit(4, 3).unwrap(), num_traits::pow(r(26, 27), 4));
        assert!(density_prime_limit(2, 3).is_err());
        assert_eq!(density_prime_limit_n2(3).unwrap(), r(4, 9));
        let d = local_density(3, 2, 10);
        let lim = r(27, 64);
        assert!(((&d - &lim) / &lim).abs() < r(1, 100));
    }

    #[test]
    fn density_zero_examples() {
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((density_zero(3).unwrap() - (6.0 / pi2).powi(3)).abs() < 1e-12);
        assert!((density_zero(3).unwrap() - 0.224675).abs() < 1e-6);
        assert!((density_zero(4).unwrap() - 0.478961).abs() < 1e-6);
        let vals: Vec<f64> = (3..30).map(|n| density_zero(n).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]) && vals.iter().all(|&v| v < 1.0));
        assert!(density_zero(2).is_err());
    }

    #[test]
    fn sequence_examples() {
        assert_eq!(seq_convolve(&seq(&[1, 1, 1, 1]), &seq(&[1, 1, 1, 1])), seq(&[1, 2, 3, 4]));
        let m = mobius_seq(6).unwrap();
        assert_eq!(mobius_seq(4).unwrap(), seq(&[1, -1, 0, 0]));
        assert_eq!(geometric_seq(2, 3, 3).unwrap(), seq(&[1, 8, 64]));
        assert_eq!(geometric_seq(5, 0, 4).unwrap(), seq(&[1, 1, 1, 1]));
        assert_eq!(seq_convolve(&m, &geometric_seq(7, 0, 6).unwrap()), seq(&[1, 0, 0, 0, 0, 0]));
        assert_eq!(seq_convolve(&m, &geometric_seq(2, 1, 6).unwrap()), seq(&[1, 1, 2, 4, 8, 16]));
        assert_eq!(seq_convolve(&seq(&[1, 2, 3]), &seq(&[1])), seq(&[1]));
        assert!(IntSeq::new(vec![]).is_err());
    }

    #[test]
    fn a_prime_sequence_is_convolution_of_local_factors() {
        for n in 2..=6u32 {
            for p in [2u64, 3, 5] {
                let len = 9;
                let mut acc = seq_convolve(&mobius_seq(len).unwrap(), &geometric_seq(p, 0, len).unwrap());
                for i in 1..n {
                    let f = seq_convolve(&mobius_seq(len).unwrap(), &geometric_seq(p, i, len).unwrap());
                    acc = seq_convolve(&acc, &f);
                }
                assert_eq!(acc, a_prime_sequence(n, p, len).unwrap());
            }
        }
    }

    #[test]
    fn menon_examples() {
        let ones = seq(&[1, 1, 1, 1]);
        let (i, ii, iii) = menon_decompose(&ones, &ones, 1).unwrap();
        assert_eq!((i, ii, iii), (0.into(), 0.into(), 1.into()));
        assert!(menon_decompose(&seq(&[2, 1, 1]), &ones, 1).is_err());
        assert!(menon_decompose(&ones, &ones, 3).is_err());

        for p in [2u64, 3, 5] {
            for i in 0..4u32 {
                for j in i + 1..6u32 {
                    let len = 10;
                    let u = seq_convolve(&mobius_seq(len).unwrap(), &geometric_seq(p, i, len).unwrap());
                    let v = seq_convolve(&mobius_seq(len).unwrap(), &geometric_seq(p, j, len).unwrap());
                    for r in 1..len - 1 {
                        let (a, b, c) = menon_decompose(&u, &v, r).unwrap();
                        let product = (&u[r] - &u[r - 1]) * (&v[r] - &v[r - 1]);
                        // at r = 1 the double sum I is empty, so the u_0 v_0 term is missing
                        let expected = if r == 1 { product - 1 } else { product };
                        assert_eq!(a + b + c, expected, "p={p} i={i} j={j} r={r}");
                    }
                }
            }
        }
    }

    fn log_concave_positive(len: usize) -> impl Strategy<Value = IntSeq> {
        // ratios non-increasing: u_{r+1} = floor(u_r * q_r) with q_r decreasing keeps
        // log-concavity only approximately, so build from a concave log profile.
        prop::collection::vec(1u32..40, len - 1).prop_map(move |mut steps| {
            steps.sort_unstable_by(|a, b| b.cmp(a));
            let mut terms = vec![BigInt::one()];
            // u_r = Π_{s<r} steps[s]: ratios u_{r+1}/u_r = steps[r] non-increasing
            for s in steps {
                let last = terms.last().unwrap().clone();
                terms.push(last * BigInt::from(s));
            }
            IntSeq(terms)
        })
    }

    proptest! {
        #[test]
        fn menon_identity_holds(
            u in prop::collection::vec(-50i64..50, 8),
            v in prop::collection::vec(-50i64..50, 8),
        ) {
            let mut u = u; u[0] = 1;
            let mut v = v; v[0] = 1;
            let (u, v) = (seq(&u), seq(&v));
            let w = seq_convolve(&u, &v);
            for r in 1..7 {
                let (a, b, c) = menon_decompose(&u, &v, r).unwrap();
                prop_assert_eq!(a + b + c, &w[r] * &w[r] - &w[r - 1] * &w[r + 1]);
            }
        }

        #[test]
        fn menon_parts_nonnegative_for_log_concave(u in log_concave_positive(8), v in log_concave_positive(8)) {
            prop_assert!(is_log_concave(&u).0 && is_log_concave(&v).0);
            for r in 1..7 {
                let (a, b, c) = menon_decompose(&u, &v, r).unwrap();
                prop_assert!(!a.is_negative() && !b.is_negative() && !c.is_negative());
            }
            prop_assert!(is_log_concave(&seq_convolve(&u, &v)).0);
        }
    }

    #[test]
    fn log_concavity_examples() {
        assert_eq!(is_log_concave(&seq(&[1, 2, 3, 2])), (true, None));
        assert_eq!(is_log_concave(&a_prime_sequence(2, 2, 4).unwrap()), (false, Some(1)));
        assert_eq!(a_prime_sequence(2, 2, 4).unwrap(), seq(&[1, 1, 2, 4]));
        assert_eq!(is_log_concave(&a_prime_sequence(4, 2, 11).unwrap()), (true, None));
        // equality counts as log-concave
        assert_eq!(is_log_concave(&seq(&[1, 2, 4, 8])), (true, None));
        assert_eq!(is_log_concave(&seq(&[5, 1])), (true, None));
    }

    #[test]
    fn convolution_lemma() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let len = 12;
            let mk = |i| seq_convolve(&mobius_seq(len).unwrap(), &geometric_seq(p, i, len).unwrap());
            for i in 0..=6u32 {
                for j in i + 1..=6u32 {
                    let w = seq_convolve(&mk(i), &mk(j));
                    // w_1^2 - w_0 w_2 = (u_1 - 1)(v_1 - 1) - 1, negative iff u_1 = p^i - 1 < 2
                    if i == 0 || (p == 2 && i == 1) {
                        assert_eq!(is_log_concave(&w), (false, Some(1)), "p={p} i={i} j={j}");
                    } else {
                        assert!(w.terms().iter().all(|t| t.is_positive()));
                        assert_eq!(is_log_concave(&w), (true, None), "p={p} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn monotone_examples() {
        assert!(density_monotone_check(2, 2, 8).unwrap());
        assert!(density_monotone_check(3, 2, 8).unwrap());
        assert!(density_monotone_check(6, 3, 8).unwrap());
        assert!(density_monotone_check(3, 4, 8).is_err());
    }

    #[test]
    fn gap_examples() {
        let g4 = density_image_gap(4).unwrap();
        assert_eq!(g4.d_at_2, r(11, 15));
        let expected = 1.2020569031595942f64.powi(-4) * (8.0f64 / 7.0).powi(4);
        assert!((g4.odd_lower_bound - expected).abs() < 1e-10, "{}", g4.odd_lower_bound);
        assert!((g4.odd_lower_bound - 0.81709).abs() < 1e-5);
        assert!(g4.gap_holds);
        let g5 = density_image_gap(5).unwrap();
        assert_eq!(g5.d_at_2, r(26, 31));
        assert!((g5.odd_lower_bound - 0.9298).abs() < 1e-4, "{}", g5.odd_lower_bound);
        assert!(g5.gap_holds);
        assert!(density_image_gap(40).unwrap().gap_holds);
        assert!(density_image_gap(3).is_err());
    }

    #[test]
    fn find_k_examples() {
        let t = find_k_for_density(0.0, 0.5).unwrap();
        assert_eq!(t.k, BigInt::one());

        let x = 3f64.ln();
        let t = find_k_for_density(x, 1e-3).unwrap();
        assert!((t.neg_log_density - x).abs() < 1e-3);
        assert!(t.primes.windows(2).all(|w| w[0] < w[1]));

        let t = find_k_for_density(0.7, 0.05).unwrap();
        assert!((t.neg_log_density - 0.7).abs() < 0.05);
        // small enough to cross-check against the generic density
        if let Some(k) = t.k.to_i64() {
            let d = density(2, k).unwrap().to_f64();
            assert!((-d.ln() - t.neg_log_density).abs() < 1e-9);
        }
        assert!(matches!(
            find_k_for_density_capped(2.0, 0.01, 10),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(find_k_for_density(-1.0, 0.1).is_err());
    }

    #[test]
    fn neg_log_matches_exact_density_for_small_k() {
        let primes = [3u64, 5, 7, 11, 13];
        let k: i64 = primes.iter().map(|&p| p as i64).product();
        let exact = density(2, k).unwrap();
        let direct = -rational_to_f64(exact.ratio()).ln();
        assert!((neg_log_density_n2_squarefree(&primes) - direct).abs() < 1e-12);
    }

    #[test]
    fn local_limits_and_bounds() {
        for k in 2..=300i64 {
            for n in 3..=5 {
                let d = density(n, k).unwrap().into_ratio();
                let lo = local_limit_product(n, k).unwrap();
                assert!(strictly_between(&lo, &d, &BigRational::one()), "n={n} k={k}");
            }
        }
        assert_eq!(a_prime_local(3, 2, 0).unwrap(), BigInt::one());
    }
}
