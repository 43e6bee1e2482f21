//! Orbit counts `a_n(k) = |M_{n,k}/SL_n(Z)|` and `a'_n(k) = |M'_{n,k}/SL_n(Z)|`.
//!
//! Both are counts of lower Hermite normal forms of determinant `k`:
//!
//! ```text
//! a_n(k)  = Σ_{d_1⋯d_n = k} Π_i d_i^{i-1}
//! a'_n(k) = Σ_{d_1⋯d_n = k} Π_i v_i(d_i),   v_i(d) = Σ_{g|d} μ(g) (d/g)^{i-1}
//! ```
//!
//! The generic evaluators [`a`] and [`a_prime`] factor `k` and sum the
//! tuples prime by prime (the summand is multiplicative in the tuple).
//! [`a_by_tuples`] and [`a_prime_by_tuples`] walk the global tuple stream
//! instead and exist as a slow, independent path for cross-checks. The
//! recursions, inclusion/exclusion and closed forms below are further
//! independent routes to the same numbers.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{
    big_pow, binomial, convolve_on_divisors, factorize, mobius_of, ordered_factorizations, power_table,
    require_prime, ArithmeticFunction, FactoredInteger,
};
use crate::error::{invalid, Error, Result};

fn abs_k(k: i64) -> Result<u64> {
    if k == 0 {
        Err(Error::ZeroDeterminant)
    } else {
        Ok(k.unsigned_abs())
    }
}

fn require_dim(n: u32, min: u32) -> Result<()> {
    if n < min {
        Err(invalid(format!("dimension must be >= {min}, got {n}")))
    } else {
        Ok(())
    }
}

fn require_positive_m(m: u32) -> Result<()> {
    if m == 0 {
        Err(invalid("closed forms hold for m >= 1"))
    } else {
        Ok(())
    }
}

/// Weight of row `i` (1-based) whose diagonal is `p^j`, all sub-diagonal entries free.
fn row_weight_all(p: u64, i: u32, j: u32) -> BigInt {
    big_pow(p, j as u64 * (i as u64 - 1))
}

/// Number of primitive rows `(x_1, .., x_{i-1}, p^j)` with `0 <= x < p^j`.
fn row_weight_primitive(p: u64, i: u32, j: u32) -> BigInt {
    if j == 0 {
        BigInt::one()
    } else {
        let e = i as u64 - 1;
        big_pow(p, j as u64 * e) - big_pow(p, (j as u64 - 1) * e)
    }
}

/// Σ over compositions `j_1 + .. + j_n = m` of Π_i weight(i, j_i), as a
/// running convolution over rows.
fn local_sum(n: u32, m: u32, weight: impl Fn(u32, u32) -> BigInt) -> BigInt {
    let m = m as usize;
    let mut acc = vec![BigInt::zero(); m + 1];
    acc[0] = BigInt::one();
    for i in 1..=n {
        let w: Vec<BigInt> = (0..=m as u32).map(|j| weight(i, j)).collect();
        let mut next = vec![BigInt::zero(); m + 1];
        for (total, slot) in next.iter_mut().enumerate() {
            for j in 0..=total {
                if !acc[total - j].is_zero() {
                    *slot += &acc[total - j] * &w[j];
                }
            }
        }
        acc = next;
    }
    acc.pop().unwrap()
}

pub(crate) fn a_factored(n: u32, k: &FactoredInteger) -> BigInt {
    k.factors()
        .iter()
        .map(|&(p, m)| local_sum(n, m, |i, j| row_weight_all(p, i, j)))
        .product()
}

pub(crate) fn a_prime_factored(n: u32, k: &FactoredInteger) -> BigInt {
    k.factors()
        .iter()
        .map(|&(p, m)| local_sum(n, m, |i, j| row_weight_primitive(p, i, j)))
        .product()
}

/// `a_n(|k|)`, the number of SL_n(Z)-orbits of integer matrices of determinant `k`.
///
/// `a(1, k) = 1`: the only 1×1 Hermite form is `(|k|)`.
pub fn a(n: u32, k: i64) -> Result<BigInt> {
    require_dim(n, 1)?;
    let k = abs_k(k)?;
    Ok(a_factored(n, &factorize(k)?))
}

/// `a'_n(|k|)`, the number of orbits whose rows are all primitive.
pub fn a_prime(n: u32, k: i64) -> Result<BigInt> {
    require_dim(n, 2)?;
    let k = abs_k(k)?;
    Ok(a_prime_factored(n, &factorize(k)?))
}

/// Global tuple sum for `a_n(|k|)`; slow, used as a cross-check.
pub fn a_by_tuples(n: u32, k: i64) -> Result<BigInt> {
    require_dim(n, 1)?;
    let k = abs_k(k)?;
    Ok(ordered_factorizations(k, n as usize)?
        .map(|t| {
            t.iter()
                .enumerate()
                .map(|(i, &d)| big_pow(d, i as u64))
                .product::<BigInt>()
        })
        .sum())
}

/// Global tuple sum for `a'_n(|k|)` through [`v`]; slow, used as a cross-check.
pub fn a_prime_by_tuples(n: u32, k: i64) -> Result<BigInt> {
    require_dim(n, 2)?;
    let k = abs_k(k)?;
    let mut cache: HashMap<(u32, u64), BigInt> = HashMap::new();
    let mut total = BigInt::zero();
    for t in ordered_factorizations(k, n as usize)? {
        let mut term = BigInt::one();
        for (i, &d) in t.iter().enumerate() {
            let i = i as u32 + 1;
            let vi = match cache.get(&(i, d)) {
                Some(x) => x.clone(),
                None => {
                    let x = v(i, d)?;
                    cache.insert((i, d), x.clone());
                    x
                }
            };
            term *= vi;
            if term.is_zero() {
                break;
            }
        }
        total += term;
    }
    Ok(total)
}

/// `v_i(d) = Σ_{g|d} μ(g) (d/g)^{i-1}`: the number of primitive vectors
/// `(x_1, .., x_{i-1}, d)` with `0 <= x_j < d`.
pub fn v(i: u32, d: u64) -> Result<BigInt> {
    if i == 0 {
        return Err(invalid("row index must be >= 1"));
    }
    let f = factorize(d)?;
    let mut total = BigInt::zero();
    for g in f.divisors() {
        let mu = mobius_of(&factorize(g)?);
        if mu != 0 {
            total += BigInt::from(mu) * big_pow(d / g, i as u64 - 1);
        }
    }
    Ok(total)
}

/// `a_n(p^m)` from the split recursion
/// `a_n(p^m) = p^{n-1} a_n(p^{m-1}) + a_{n-1}(p^m)` with `a_n(1) = a_1(p^m) = 1`.
pub fn a_local(n: u32, p: u64, m: u32) -> Result<BigInt> {
    require_dim(n, 1)?;
    require_prime(p)?;
    Ok(split_recursion_table(n, p, m).pop().unwrap())
}

// row r holds a_{r+1}(p^0..=p^m); returns the last row
fn split_recursion_table(n: u32, p: u64, m: u32) -> Vec<BigInt> {
    let m = m as usize;
    let mut prev = vec![BigInt::one(); m + 1];
    for dim in 2..=n {
        let scale = big_pow(p, dim as u64 - 1);
        let mut row = vec![BigInt::one(); m + 1];
        for j in 1..=m {
            row[j] = &scale * &row[j - 1] + &prev[j];
        }
        prev = row;
    }
    prev
}

/// `a'_n(p^m) = Σ_{i=0}^{m} (-1)^i C(n,i) a_n(p^{m-i})`.
pub fn a_prime_local(n: u32, p: u64, m: u32) -> Result<BigInt> {
    require_dim(n, 2)?;
    require_prime(p)?;
    let table = split_recursion_table(n, p, m);
    let mut total = BigInt::zero();
    for i in 0..=m {
        let term = binomial(n as u64, i as u64) * &table[(m - i) as usize];
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

fn exact_integer(r: BigRational, what: &str) -> BigInt {
    assert!(r.is_integer(), "{what} closed form produced a non-integer {r}");
    r.to_integer()
}

/// `a_3(p^m) = (p^{m+1} - 1)(p^{m+2} - 1) / ((p - 1)(p^2 - 1))`, `m >= 1`.
pub fn a3_closed(p: u64, m: u32) -> Result<BigInt> {
    require_prime(p)?;
    require_positive_m(m)?;
    let m = m as u64;
    let num = (big_pow(p, m + 1) - 1) * (big_pow(p, m + 2) - 1);
    let den = BigInt::from(p - 1) * (big_pow(p, 2) - 1);
    Ok(exact_integer(BigRational::new(num, den), "a_3"))
}

/// `a'_3(p^m) = (p^{2m}(p+1)^2 - p^{m+1}) (p - 1) / p^3`, `m >= 1`.
pub fn a3_prime_closed(p: u64, m: u32) -> Result<BigInt> {
    require_prime(p)?;
    require_positive_m(m)?;
    let m = m as u64;
    let pb = BigInt::from(p);
    let num = (big_pow(p, 2 * m) * (&pb + 1) * (&pb + 1) - big_pow(p, m + 1)) * (&pb - 1);
    Ok(exact_integer(BigRational::new(num, big_pow(p, 3)), "a'_3"))
}

/// `Σ coeff · p^{a·m + b}` for `(coeff, a, b)` triples.
fn poly_in_pm(p: u64, m: u32, terms: &[(i64, u64, u64)]) -> BigInt {
    terms
        .iter()
        .map(|&(c, a, b)| BigInt::from(c) * big_pow(p, a * m as u64 + b))
        .sum()
}

/// `p^e` as an exact rational for a possibly negative exponent.
fn rational_pow(p: u64, e: i64) -> BigRational {
    let mag = big_pow(p, e.unsigned_abs());
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// Closed form of `a'_4(p^m)` for `m >= 1`.
pub fn a4_prime_closed(p: u64, m: u32) -> Result<BigInt> {
    require_prime(p)?;
    require_positive_m(m)?;
    const TERMS: &[(i64, u64, u64)] = &[
        (1, 2, 0),
        (-1, 1, 1),
        (-4, 1, 2),
        (-6, 1, 3),
        (-4, 1, 4),
        (-1, 1, 5),
        (3, 2, 1),
        (6, 2, 2),
        (7, 2, 3),
        (6, 2, 4),
        (3, 2, 5),
        (1, 2, 6),
        (1, 0, 3),
    ];
    let poly = BigRational::from_integer(poly_in_pm(p, m, TERMS));
    let front = BigRational::new(BigInt::from(p - 1), BigInt::from(p + 1)) * rational_pow(p, m as i64 - 6);
    Ok(exact_integer(front * poly, "a'_4"))
}

/// Closed form of `a'_5(p^m)` for `m >= 1`.
pub fn a5_prime_closed(p: u64, m: u32) -> Result<BigInt> {
    require_prime(p)?;
    require_positive_m(m)?;
    const TERMS: &[(i64, u64, u64)] = &[
        (1, 4, 0),
        (-1, 1, 6),
        (1, 2, 3),
        (5, 2, 4),
        (11, 2, 5),
        (14, 2, 6),
        (11, 2, 7),
        (5, 2, 8),
        (1, 2, 9),
        (-1, 3, 1),
        (-5, 3, 2),
        (-15, 3, 3),
        (-30, 3, 4),
        (-45, 3, 5),
        (-51, 3, 6),
        (-45, 3, 7),
        (-30, 3, 8),
        (-15, 3, 9),
        (-5, 3, 10),
        (-1, 3, 11),
        (4, 4, 1),
        (10, 4, 2),
        (20, 4, 3),
        (31, 4, 4),
        (40, 4, 5),
        (44, 4, 6),
        (40, 4, 7),
        (31, 4, 8),
        (20, 4, 9),
        (10, 4, 10),
        (4, 4, 11),
        (1, 4, 12),
    ];
    let poly = BigRational::from_integer(poly_in_pm(p, m, TERMS));
    let pb = BigInt::from(p);
    let den = big_pow(p, 10) * (&pb + 1) * (&pb * &pb + &pb + 1);
    let front = BigRational::new(pb - 1, den);
    Ok(exact_integer(front * poly, "a'_5"))
}

/// `a'_n(|k|)` as `(μ^{*n} * a_n)(|k|)`.
pub fn a_prime_via_convolution(n: u32, k: i64) -> Result<BigInt> {
    require_dim(n, 2)?;
    let k = abs_k(k)?;
    let divs = factorize(k)?.divisors();
    let mu: Vec<BigInt> = divs
        .iter()
        .map(|&d| Ok(BigInt::from(mobius_of(&factorize(d)?))))
        .collect::<Result<_>>()?;
    let an: Vec<BigInt> = divs
        .iter()
        .map(|&d| Ok(a_factored(n, &factorize(d)?)))
        .collect::<Result<_>>()?;
    Ok(convolve_at_top(&divs, &power_table(&divs, &mu, n), &an))
}

/// `a_n(|k|)` as `(1^{*n} * a'_n)(|k|)`.
pub fn a_via_convolution(n: u32, k: i64) -> Result<BigInt> {
    require_dim(n, 2)?;
    let k = abs_k(k)?;
    let divs = factorize(k)?.divisors();
    let one = ArithmeticFunction::one();
    let ones: Vec<BigInt> = divs.iter().map(|&d| one.eval(d)).collect();
    let ap: Vec<BigInt> = divs
        .iter()
        .map(|&d| Ok(a_prime_factored(n, &factorize(d)?)))
        .collect::<Result<_>>()?;
    Ok(convolve_at_top(&divs, &power_table(&divs, &ones, n), &ap))
}

fn convolve_at_top(divs: &[u64], f: &[BigInt], g: &[BigInt]) -> BigInt {
    let pos: HashMap<u64, usize> = divs.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    convolve_on_divisors(divs, &pos, f, g).pop().unwrap()
}
