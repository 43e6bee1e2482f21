//! Floating-point values of the counting constants.
//!
//! `C0 = V_{n(n-1)} S_{n-1} / 2`, `C1 = C0 / (ζ(2)⋯ζ(n))`, and the
//! per-determinant constants `c_{n,k}`, `c'_{n,k}`, `c_{n,0}`, `c'_{n,0}`.
//! Every value is returned with a conservative absolute error bound.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::orbits;

/// Guaranteed absolute error of [`zeta_int`].
pub const ZETA_ABS_ERROR: f64 = 1e-12;

/// First index handled by the Euler–Maclaurin tail.
const EM_CUTOFF: u64 = 100;

/// Largest even argument evaluated through the Bernoulli closed form.
const EVEN_CLOSED_FORM_MAX: u32 = 60;

const CACHED_MAX: u32 = 64;

/// Bernoulli numbers `B_0..=B_max` (with `B_1 = -1/2`).
fn bernoulli(max: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(max + 1);
    b.push(BigRational::one());
    for m in 1..=max {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // to_f64 on huge numerators/denominators can overflow; shift both first
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(900);
    let n = n >> shift;
    let d = d >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

fn zeta_even_closed(s: u32) -> f64 {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    let b = TABLE.get_or_init(|| bernoulli(EVEN_CLOSED_FORM_MAX as usize));
    // ζ(2k) = |B_2k| (2π)^{2k} / (2 (2k)!)
    let mut fact = BigInt::one();
    for i in 2..=s {
        fact *= BigInt::from(i);
    }
    let coeff = b[s as usize].abs() / BigRational::from_integer(fact * 2);
    ratio_to_f64(&coeff) * (2.0 * PI).powi(s as i32)
}

/// `Σ_{j>=2} j^{-s}` for `s >= 3`: the terms below [`EM_CUTOFF`] are summed
/// directly and the rest is the Euler–Maclaurin tail with three correction
/// terms (remainder below 1e-17 for every `s >= 3`).
fn zeta_tail_series(s: u32) -> f64 {
    debug_assert!(s >= 3);
    let sf = s as f64;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for j in (2..EM_CUTOFF).rev() {
        let y = (j as f64).powi(-(s as i32)) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let n = EM_CUTOFF as f64;
    let f = n.powf(-sf);
    let tail = n * f / (sf - 1.0) + f / 2.0 + sf * f / (12.0 * n)
        - sf * (sf + 1.0) * (sf + 2.0) * f / (720.0 * n.powi(3))
        + sf * (sf + 1.0) * (sf + 2.0) * (sf + 3.0) * (sf + 4.0) * f / (30240.0 * n.powi(5));
    sum + tail
}

fn tail_cached(s: u32) -> f64 {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    if s > CACHED_MAX {
        return zeta_tail_series(s);
    }
    let table = CACHE.get_or_init(|| (0..=CACHED_MAX).map(|s| if s >= 3 { zeta_tail_series(s) } else { f64::NAN }).collect());
    table[s as usize]
}

fn require_s(s: u32) -> Result<()> {
    if s < 2 {
        Err(invalid(format!("zeta needs s >= 2, got {s}")))
    } else {
        Ok(())
    }
}

/// `ζ(s)` for integer `s >= 2`, absolute error below [`ZETA_ABS_ERROR`].
///
/// Even `s` up to 60 use `|B_s| (2π)^s / (2 s!)`; every other argument
/// sums the series directly.
pub fn zeta_int(s: u32) -> Result<f64> {
    require_s(s)?;
    if s.is_multiple_of(2) && s <= EVEN_CLOSED_FORM_MAX {
        Ok(zeta_even_closed(s))
    } else {
        Ok(1.0 + tail_cached(s))
    }
}

/// `ζ(s) - 1` with small relative error, for comparisons near 1.
pub fn zeta_minus_one(s: u32) -> Result<f64> {
    require_s(s)?;
    if s == 2 {
        Ok(PI * PI / 6.0 - 1.0)
    } else {
        Ok(tail_cached(s))
    }
}

/// `Γ(half_units / 2)` for a positive integer `half_units`, by recursion
/// from `Γ(1) = 1` and `Γ(1/2) = √π`.
pub fn gamma_half(half_units: u32) -> f64 {
    assert!(half_units >= 1, "Γ is undefined at 0");
    let mut x = if half_units.is_multiple_of(2) { 1.0 } else { 0.5 };
    let mut acc = if half_units.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let target = half_units as f64 / 2.0;
    while x < target {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// Volume of the unit ball in `R^d`.
pub fn ball_volume(d: u32) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half(d + 2)
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`.
pub fn sphere_area(n: u32) -> f64 {
    n as f64 * ball_volume(n)
}

/// Both routes to `C0`: `(V_{n(n-1)} S_{n-1} / 2, π^{n²/2} / (Γ(n/2) Γ(n(n-1)/2 + 1)))`.
pub fn c0_forms(n: u32) -> (f64, f64) {
    let product = ball_volume(n * (n - 1)) * sphere_area(n) / 2.0;
    let gamma = PI.powf((n * n) as f64 / 2.0) / (gamma_half(n) * gamma_half(n * (n - 1) + 2));
    (product, gamma)
}

fn require_n(n: u32, min: u32) -> Result<()> {
    if n < min {
        Err(invalid(format!("dimension must be >= {min}, got {n}")))
    } else {
        Ok(())
    }
}

pub fn c0(n: u32) -> Result<f64> {
    require_n(n, 2)?;
    Ok(c0_forms(n).1)
}

fn zeta_product(n: u32) -> f64 {
    (2..=n).map(|s| zeta_int(s).unwrap()).product()
}

pub fn c1(n: u32) -> Result<f64> {
    Ok(c0(n)? / zeta_product(n))
}

fn orbit_ratio(n: u32, count: BigInt, k: i64) -> f64 {
    let scale = num_traits::pow(BigInt::from(k.unsigned_abs()), n as usize - 1);
    ratio_to_f64(&BigRational::new(count, scale))
}

/// `c_{n,k} = C1 a_n(|k|) / |k|^{n-1}`.
pub fn c_nk(n: u32, k: i64) -> Result<f64> {
    require_n(n, 2)?;
    Ok(c1(n)? * orbit_ratio(n, orbits::a(n, k)?, k))
}

/// `c'_{n,k} = C1 a'_n(|k|) / |k|^{n-1}`.
pub fn c_nk_prime(n: u32, k: i64) -> Result<f64> {
    require_n(n, 2)?;
    Ok(c1(n)? * orbit_ratio(n, orbits::a_prime(n, k)?, k))
}

/// `c_{n,0} = C0 (n-1) / ζ(n)`.
pub fn c_n0(n: u32) -> Result<f64> {
    require_n(n, 2)?;
    Ok(c0(n)? * (n - 1) as f64 / zeta_int(n)?)
}

/// `c'_{n,0} = C0 (n-1) / (ζ(n-1)^n ζ(n))`, `n >= 3`.
pub fn c_n0_prime(n: u32) -> Result<f64> {
    require_n(n, 3)?;
    Ok(c0(n)? * (n - 1) as f64 / (zeta_int(n - 1)?.powi(n as i32) * zeta_int(n)?))
}

/// A value together with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

impl Estimate {
    fn with_rel(value: f64, rel: f64) -> Self {
        Estimate {
            value,
            abs_error: value.abs() * rel,
        }
    }
}

/// Constants for one `(n, k)`; `k = None` or `Some(0)` selects the singular case.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantReport {
    pub n: u32,
    pub k: Option<i64>,
    pub c0: Estimate,
    pub c1: Estimate,
    /// `c_{n,k}`, or `c_{n,0}` when `k` is zero.
    pub c: Estimate,
    /// `c'_{n,k}`, or `c'_{n,0}` when `k` is zero (absent for `n = 2`).
    pub c_prime: Option<Estimate>,
}

// Relative rounding budget for C0: the Γ recursions take about n²/2 steps.
fn c0_rel_error(n: u32) -> f64 {
    (n * n + 16) as f64 * f64::EPSILON
}

pub fn constant_report(n: u32, k: Option<i64>) -> Result<ConstantReport> {
    require_n(n, 2)?;
    let rel0 = c0_rel_error(n);
    let zeta_rel = ZETA_ABS_ERROR; // ζ >= 1, so absolute error bounds relative error
    let rel1 = rel0 + (n - 1) as f64 * (zeta_rel + f64::EPSILON);
    let c0v = Estimate::with_rel(c0(n)?, rel0);
    let c1v = Estimate::with_rel(c1(n)?, rel1);
    let (c, c_prime) = match k {
        Some(k) if k != 0 => {
            let rel = rel1 + 8.0 * f64::EPSILON;
            (
                Estimate::with_rel(c_nk(n, k)?, rel),
                Some(Estimate::with_rel(c_nk_prime(n, k)?, rel)),
            )
        }
        _ => {
            let c = Estimate::with_rel(c_n0(n)?, rel0 + zeta_rel + 4.0 * f64::EPSILON);
            let cp = if n >= 3 {
                let rel = rel0 + (n + 1) as f64 * (zeta_rel + 2.0 * f64::EPSILON);
                Some(Estimate::with_rel(c_n0_prime(n)?, rel))
            } else {
                None
            };
            (c, cp)
        }
    };
    Ok(ConstantReport {
        n,
        k,
        c0: c0v,
        c1: c1v,
        c,
        c_prime,
    })
}
