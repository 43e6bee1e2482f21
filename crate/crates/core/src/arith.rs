//! Exact integer substrate: factorization, the Möbius function, ordered
//! factorizations and Dirichlet convolution of arithmetic functions.
//!
//! Everything that can grow is carried as [`BigInt`]; the only machine
//! integers are the arguments themselves, which are capped at `u64`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};

/// Normalized arbitrary-precision fraction (gcd 1, positive denominator).
pub type ExactRational = BigRational;

const TRIAL_LIMIT: u64 = 1_000_000;

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant; `n` is odd, composite and has no factor below TRIAL_LIMIT.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..std::cmp::min(128, r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Prime factorization of `k >= 1`.
///
/// Trial division up to 10^6, then Pollard rho with a deterministic
/// Miller–Rabin test for the remaining cofactor.
pub fn factorize(k: u64) -> Result<FactoredInteger> {
    if k == 0 {
        return Err(invalid("factorize requires k >= 1"));
    }
    let mut rest = k;
    let mut factors = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    let mut p = 5u64;
    while p <= TRIAL_LIMIT && p * p <= rest {
        push(p, &mut rest);
        push(p + 2, &mut rest);
        p += 6;
    }
    if rest > 1 {
        let mut big = Vec::new();
        split_large(rest, &mut big);
        big.sort_unstable();
        let mut i = 0;
        while i < big.len() {
            let q = big[i];
            let e = big[i..].iter().take_while(|&&x| x == q).count();
            factors.push((q, e as u32));
            i += e;
        }
    }
    factors.sort_unstable();
    Ok(FactoredInteger { value: k, factors })
}

/// The Möbius function μ(k).
pub fn mobius(k: u64) -> Result<i8> {
    let f = factorize(k)?;
    Ok(mobius_of(&f))
}

pub(crate) fn mobius_of(f: &FactoredInteger) -> i8 {
    if !f.is_squarefree() {
        0
    } else if f.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn divisors(k: u64) -> Result<Vec<u64>> {
    Ok(factorize(k)?.divisors())
}

pub fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `C(n, k)` as a big integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn big_pow(base: u64, exp: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Stream of ordered factorizations `(d_1, ..., d_n)` of `k`, in
/// lexicographic order of the tuple.
///
/// ```
/// let tuples: Vec<_> = primrows::arith::ordered_factorizations(4, 2).unwrap().collect();
/// assert_eq!(tuples, vec![vec![1, 4], vec![2, 2], vec![4, 1]]);
/// ```
pub fn ordered_factorizations(k: u64, n: usize) -> Result<OrderedFactorizations> {
    if n == 0 {
        return Err(invalid("ordered_factorizations requires n >= 1"));
    }
    let divisors = divisors(k)?;
    Ok(OrderedFactorizations::new(k, n, divisors))
}

#[derive(Debug, Clone)]
pub struct OrderedFactorizations {
    divisors: Vec<u64>,
    // idx[i] indexes `divisors` for levels 0..n-1; the last level is forced.
    idx: Vec<usize>,
    rem: Vec<u64>,
    started: bool,
    done: bool,
}

impl OrderedFactorizations {
    fn new(k: u64, n: usize, divisors: Vec<u64>) -> Self {
        let mut rem = vec![0u64; n];
        rem[0] = k;
        let mut it = OrderedFactorizations {
            divisors,
            idx: vec![0; n - 1],
            rem,
            started: false,
            done: false,
        };
        it.descend_from(0);
        it
    }

    // Reset levels `from..n-1` to the smallest admissible divisor (always 1).
    fn descend_from(&mut self, from: usize) {
        for level in from..self.idx.len() {
            self.idx[level] = 0;
            self.rem[level + 1] = self.rem[level];
        }
    }

    fn advance(&mut self) -> bool {
        for level in (0..self.idx.len()).rev() {
            let rem = self.rem[level];
            let next = (self.idx[level] + 1..self.divisors.len())
                .take_while(|&j| self.divisors[j] <= rem)
                .find(|&j| rem.is_multiple_of(self.divisors[j]));
            if let Some(j) = next {
                self.idx[level] = j;
                self.rem[level + 1] = rem / self.divisors[j];
                self.descend_from(level + 1);
                return true;
            }
        }
        false
    }

    fn current(&self) -> Vec<u64> {
        let mut t: Vec<u64> = self.idx.iter().map(|&j| self.divisors[j]).collect();
        t.push(*self.rem.last().unwrap());
        t
    }
}

impl Iterator for OrderedFactorizations {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(self.current())
    }
}

/// A pure function `N>=1 -> Z`, shareable across threads.
#[derive(Clone)]
pub struct ArithmeticFunction {
    name: Arc<str>,
    eval: Arc<dyn Fn(u64) -> BigInt + Send + Sync>,
}

impl fmt::Debug for ArithmeticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ArithmeticFunction").field(&self.name).finish()
    }
}

impl ArithmeticFunction {
    pub fn new<F>(name: &str, eval: F) -> Self
    where
        F: Fn(u64) -> BigInt + Send + Sync + 'static,
    {
        ArithmeticFunction {
            name: Arc::from(name),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, k: u64) -> BigInt {
        (self.eval)(k)
    }

    pub fn mobius() -> Self {
        Self::new("mu", |k| BigInt::from(mobius(k).expect("k >= 1")))
    }

    /// The constant function 1.
    pub fn one() -> Self {
        Self::new("1", |_| BigInt::one())
    }

    /// `x -> x^i`.
    pub fn power(i: u32) -> Self {
        Self::new(&format!("id^{i}"), move |k| big_pow(k, i as u64))
    }

    pub fn divisor_count() -> Self {
        Self::new("tau", |k| BigInt::from(divisors(k).expect("k >= 1").len()))
    }
}

/// `(f * g)(k) = Σ_{d|k} f(d) g(k/d)`.
pub fn dirichlet_convolve(f: &ArithmeticFunction, g: &ArithmeticFunction, k: u64) -> Result<BigInt> {
    let divs = divisors(k)?;
    Ok(divs.iter().map(|&d| f.eval(d) * g.eval(k / d)).sum())
}

/// `f^{*n}(k)`, the n-fold Dirichlet self-convolution evaluated at `k`.
pub fn dirichlet_power(f: &ArithmeticFunction, n: u32, k: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(invalid("dirichlet_power requires n >= 1"));
    }
    let divs = divisors(k)?;
    let base: Vec<BigInt> = divs.iter().map(|&d| f.eval(d)).collect();
    Ok(power_table(&divs, &base, n).pop().expect("k is a divisor of itself"))
}

/// Values of the n-fold self-convolution on every divisor in `divs`
/// (which must be the sorted divisor list of its last element).
pub(crate) fn power_table(divs: &[u64], base: &[BigInt], n: u32) -> Vec<BigInt> {
    let pos: HashMap<u64, usize> = divs.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut acc = base.to_vec();
    for _ in 1..n {
        acc = convolve_on_divisors(divs, &pos, &acc, base);
    }
    acc
}

pub(crate) fn convolve_on_divisors(
    divs: &[u64],
    pos: &HashMap<u64, usize>,
    f: &[BigInt],
    g: &[BigInt],
) -> Vec<BigInt> {
    divs.iter()
        .map(|&m| {
            divs.iter()
                .take_while(|&&d| d <= m)
                .filter(|&&d| m % d == 0)
                .map(|&d| &f[pos[&d]] * &g[pos[&(m / d)]])
                .sum()
        })
        .collect()
}
