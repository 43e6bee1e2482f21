//! Brute-force oracles: integer matrices in Euclidean balls, exact
//! determinants, row primitivity, and Hermite normal forms.
//!
//! Balls are closed: a matrix is counted when `norm_sq(A) <= T_sq`, compared
//! exactly against the rational `T_sq`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::factorize;
use crate::error::{invalid, Error, Result};
use crate::orbits;

/// Square integer matrix with arbitrary-precision entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(n: usize, entries: Vec<BigInt>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix dimension must be >= 1"));
        }
        if entries.len() != n * n {
            return Err(invalid(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        Ok(IntMatrix { n, entries })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.as_ref().len() != n) {
            return Err(invalid("matrix must be square"));
        }
        Self::new(n, rows.iter().flat_map(|r| r.as_ref().iter().map(|&x| BigInt::from(x))).collect())
    }

    pub(crate) fn from_i64s(n: usize, entries: &[i64]) -> Self {
        IntMatrix {
            n,
            entries: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix {
            n,
            entries: vec![BigInt::zero(); n * n],
        };
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.n)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(invalid("dimension mismatch"));
        }
        let n = self.n;
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(l, j);
                }
            }
        }
        Ok(IntMatrix { n, entries: out })
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut out = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.get(i, j).clone();
            }
        }
        IntMatrix { n, entries: out }
    }

    /// `Σ a_ij²`.
    pub fn norm_sq(&self) -> BigInt {
        self.entries.iter().map(|x| x * x).sum()
    }

    pub fn det(&self) -> BigInt {
        det(self)
    }

    /// Every row is a primitive vector.
    pub fn rows_primitive(&self) -> bool {
        self.rows().all(is_primitive)
    }

    /// Lower triangular, positive diagonal, and `0 <= c_ij < c_ii` for `j < i`.
    pub fn is_hnf(&self) -> bool {
        (0..self.n).all(|i| {
            let d = self.get(i, i);
            d.is_positive()
                && (i + 1..self.n).all(|j| self.get(i, j).is_zero())
                && (0..i).all(|j| {
                    let c = self.get(i, j);
                    !c.is_negative() && c < d
                })
        })
    }

    fn negate_column(&mut self, j: usize) {
        for i in 0..self.n {
            let x = -std::mem::take(&mut self.entries[i * self.n + j]);
            self.entries[i * self.n + j] = x;
        }
    }

    /// `(col_i, col_j) <- (x col_i + y col_j, s col_i + t col_j)`.
    fn column_combine(&mut self, i: usize, j: usize, x: &BigInt, y: &BigInt, s: &BigInt, t: &BigInt) {
        for r in 0..self.n {
            let a = self.get(r, i).clone();
            let b = self.get(r, j).clone();
            self.set(r, i, x * &a + y * &b);
            self.set(r, j, s * &a + t * &b);
        }
    }

    /// `col_j <- col_j - q col_i`.
    fn column_sub(&mut self, j: usize, i: usize, q: &BigInt) {
        for r in 0..self.n {
            let v = self.get(r, j) - q * self.get(r, i);
            self.set(r, j, v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination. For `n <= 4`
/// the result is cross-checked against cofactor expansion in debug builds.
pub fn det(a: &IntMatrix) -> BigInt {
    let d = det_bareiss(a);
    debug_assert!(a.n > 4 || d == det_cofactor(a));
    d
}

pub fn det_bareiss(a: &IntMatrix) -> BigInt {
    let n = a.n;
    let mut m = a.entries.clone();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k * n + k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                m.swap(k * n + j, swap * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j]) / &prev;
                m[i * n + j] = v;
            }
        }
        prev = m[k * n + k].clone();
    }
    let d = m[n * n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Laplace expansion along the first row.
pub fn det_cofactor(a: &IntMatrix) -> BigInt {
    fn rec(m: &[BigInt], n: usize) -> BigInt {
        if n == 1 {
            return m[0].clone();
        }
        let mut total = BigInt::zero();
        for c in 0..n {
            if m[c].is_zero() {
                continue;
            }
            let minor: Vec<BigInt> = (1..n)
                .flat_map(|r| (0..n).filter(move |&j| j != c).map(move |j| (r, j)))
                .map(|(r, j)| m[r * n + j].clone())
                .collect();
            let term = &m[c] * rec(&minor, n - 1);
            if c % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }
    rec(&a.entries, a.n)
}

pub fn norm_sq(a: &IntMatrix) -> BigInt {
    a.norm_sq()
}

/// gcd of the entries is 1; the zero vector is not primitive.
pub fn is_primitive(v: &[BigInt]) -> bool {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one()
}

fn gcd_i64(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Parses a non-negative decimal such as `1000`, `2.5` or `1e3` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || invalid(format!("not a non-negative decimal: {s:?}"));
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let mantissa = mantissa.strip_prefix('+').unwrap_or(mantissa);
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit())
        || exp.unsigned_abs() > 1000
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    })
}

/// A counting problem `#{A : norm_sq(A) <= T_sq, det A = k}`, optionally
/// restricted to matrices whose rows are all primitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallQuery {
    pub n: usize,
    pub k: i64,
    pub t_sq: BigRational,
    pub primitive_only: bool,
}

impl BallQuery {
    pub fn new(n: usize, k: i64, t_sq: BigRational, primitive_only: bool) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("ball counting needs n >= 2, got {n}")));
        }
        if t_sq.is_negative() {
            return Err(invalid("T_sq must be non-negative"));
        }
        Ok(BallQuery { n, k, t_sq, primitive_only })
    }

    pub fn with_t_sq(n: usize, k: i64, t_sq: u64, primitive_only: bool) -> Result<Self> {
        Self::new(n, k, BigRational::from_integer(t_sq.into()), primitive_only)
    }

    /// `T` given as a decimal string; `T_sq` is its exact square.
    pub fn with_radius(n: usize, k: i64, radius: &str, primitive_only: bool) -> Result<Self> {
        let t = parse_decimal(radius)?;
        Self::new(n, k, &t * &t, primitive_only)
    }

    /// `floor(T_sq)`: integer norms satisfy `norm_sq <= T_sq` iff they are at most this.
    pub fn t_sq_floor(&self) -> BigInt {
        self.t_sq.numer().div_floor(self.t_sq.denom())
    }
}

/// Resource limits for the brute-force enumerators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumConfig {
    /// Worker threads; 0 uses rayon's default.
    pub threads: usize,
    /// Maximum number of candidate visits (or stream items).
    pub budget: u128,
    /// Largest dimension accepted by [`count_ball`].
    pub max_dim: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            threads: 0,
            budget: 2_000_000_000,
            max_dim: 3,
        }
    }
}

impl EnumConfig {
    pub fn with_threads(threads: usize) -> Self {
        EnumConfig {
            threads,
            ..Self::default()
        }
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// Upper bound on the integer points of the closed `d`-ball of squared
/// radius `s`: every point's unit cube lies in the ball of radius
/// `sqrt(s) + sqrt(d)/2`.
fn lattice_points_upper_bound(d: u32, s: f64) -> f64 {
    let r = s.sqrt() + (d as f64).sqrt() / 2.0;
    crate::asymptotics::ball_volume(d) * r.powi(d as i32)
}

fn check_budget(what: &'static str, estimate: f64, budget: u128) -> Result<()> {
    if estimate > budget as f64 {
        return Err(Error::BudgetExceeded {
            what,
            estimate: if estimate.is_finite() { estimate as u128 } else { u128::MAX },
            budget,
        });
    }
    Ok(())
}

fn small_t_sq(q: &BallQuery) -> Result<i64> {
    q.t_sq_floor()
        .to_i64()
        .filter(|s| *s < (1i64 << 40))
        .ok_or(Error::BudgetExceeded {
            what: "squared radius",
            estimate: u128::MAX,
            budget: 1 << 40,
        })
}

/// Depth-first enumeration of the matrices in a query, first entry fixed.
struct BallWalk {
    n: usize,
    k: i128,
    primitive: bool,
    entries: Vec<i64>,
}

impl BallWalk {
    fn new(q: &BallQuery) -> Self {
        BallWalk {
            n: q.n,
            k: q.k as i128,
            primitive: q.primitive_only,
            entries: vec![0; q.n * q.n],
        }
    }

    fn run(&mut self, first: i64, rem: i64, visit: &mut dyn FnMut(&[i64])) {
        self.entries[0] = first;
        self.fill(1, rem - first * first, visit);
    }

    fn fill(&mut self, pos: usize, rem: i64, visit: &mut dyn FnMut(&[i64])) {
        let n = self.n;
        if pos == n * (n - 1) {
            self.last_row(rem, visit);
            return;
        }
        if pos.is_multiple_of(n) && !self.row_ok(pos / n - 1) {
            return;
        }
        let bound = rem.sqrt();
        for x in -bound..=bound {
            self.entries[pos] = x;
            self.fill(pos + 1, rem - x * x, visit);
        }
    }

    fn row_ok(&self, r: usize) -> bool {
        let row = &self.entries[r * self.n..(r + 1) * self.n];
        let g = gcd_i64(row);
        if self.primitive {
            g == 1
        } else {
            // a zero row forces det 0
            g != 0 || self.k == 0
        }
    }

    fn last_row(&mut self, rem: i64, visit: &mut dyn FnMut(&[i64])) {
        let n = self.n;
        if !self.row_ok(n - 2) {
            return;
        }
        let cof = last_row_cofactors(&self.entries, n);
        let start = n * (n - 1);
        self.last_entry(start, 0, rem, &cof, 0, visit);
    }

    fn last_entry(&mut self, pos: usize, j: usize, rem: i64, cof: &[i128], acc: i128, visit: &mut dyn FnMut(&[i64])) {
        let n = self.n;
        if j == n - 1 {
            // the final entry is determined by the determinant when its cofactor is nonzero
            let c = cof[j];
            let bound = rem.sqrt() as i128;
            let mut check = |this: &mut Self, x: i128| {
                this.entries[pos] = x as i64;
                if this.primitive && gcd_i64(&this.entries[pos + 1 - n..]) != 1 {
                    return;
                }
                visit(&this.entries);
            };
            if c == 0 {
                if acc == self.k {
                    for x in -bound..=bound {
                        check(self, x);
                    }
                }
            } else {
                let diff = self.k - acc;
                if diff % c == 0 {
                    let x = diff / c;
                    if x.abs() <= bound {
                        check(self, x);
                    }
                }
            }
            return;
        }
        let bound = rem.sqrt();
        for x in -bound..=bound {
            self.entries[pos] = x;
            self.last_entry(pos + 1, j + 1, rem - x * x, cof, acc + x as i128 * cof[j], visit);
        }
    }
}

/// Cofactors `C_j` with `det A = Σ_j a_{n-1,j} C_j`, from the first `n-1` rows.
fn last_row_cofactors(entries: &[i64], n: usize) -> Vec<i128> {
    (0..n)
        .map(|j| {
            let minor: Vec<i128> = (0..n - 1)
                .flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| entries[r * n + c] as i128))
                .collect();
            let d = det_i128(minor, n - 1);
            if (n - 1 + j).is_multiple_of(2) {
                d
            } else {
                -d
            }
        })
        .collect()
}

fn det_i128(mut m: Vec<i128>, n: usize) -> i128 {
    if n == 1 {
        return m[0];
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k * n + k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                return 0;
            };
            for j in 0..n {
                m.swap(k * n + j, swap * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
            }
        }
        prev = m[k * n + k];
    }
    sign * m[n * n - 1]
}

fn prepare_walk(q: &BallQuery, cfg: &EnumConfig) -> Result<i64> {
    if q.n > cfg.max_dim {
        return Err(invalid(format!(
            "ball enumeration is limited to n <= {} (got {})",
            cfg.max_dim, q.n
        )));
    }
    let s = small_t_sq(q)?;
    // the last entry is solved for, so visits are bounded by a ball one dimension lower
    let d = (q.n * q.n) as u32;
    check_budget("ball enumeration", lattice_points_upper_bound(d - 1, s as f64), cfg.budget)?;
    Ok(s)
}

/// `N_{n,k}(T)` (or `N'_{n,k}(T)` when `primitive_only`) by exhaustive
/// enumeration, split over the first entry across `cfg.threads` workers.
pub fn count_ball(q: &BallQuery, cfg: &EnumConfig) -> Result<u64> {
    let s = prepare_walk(q, cfg)?;
    let bound = s.sqrt();
    cfg.run(|| {
        (-bound..=bound)
            .into_par_iter()
            .map(|first| {
                let mut count = 0u64;
                BallWalk::new(q).run(first, s, &mut |_| count += 1);
                count
            })
            .sum()
    })
}

/// Calls `visit` on every matrix counted by `count_ball`, in lexicographic
/// order of the row-major entries. Runs on the calling thread.
pub fn visit_ball(q: &BallQuery, cfg: &EnumConfig, mut visit: impl FnMut(&IntMatrix)) -> Result<()> {
    let s = prepare_walk(q, cfg)?;
    let bound = s.sqrt();
    let n = q.n;
    let mut walk = BallWalk::new(q);
    for first in -bound..=bound {
        walk.run(first, s, &mut |e| visit(&IntMatrix::from_i64s(n, e)));
    }
    Ok(())
}

/// Extended gcd on `i128`: `(g, x, y)` with `a x + b y = g >= 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Number of integers `t` with `|P + t w|² <= rem`, and the interval they fill.
fn line_interval(p: (i128, i128), w: (i128, i128), rem: i128) -> Option<(i128, i128)> {
    let ww = w.0 * w.0 + w.1 * w.1;
    // recentre so that |P·w| <= ww/2 keeps every intermediate small
    let shift = -(p.0 * w.0 + p.1 * w.1).div_euclid(ww);
    let p = (p.0 + shift * w.0, p.1 + shift * w.1);
    let b = p.0 * w.0 + p.1 * w.1;
    let c = p.0 * p.0 + p.1 * p.1 - rem;
    // ww t² + 2 b t + c <= 0  ⇔  |ww t + b| <= sqrt(b² - ww c)
    let disc = b * b - ww * c;
    if disc < 0 {
        return None;
    }
    let s = disc.sqrt();
    let lo = Integer::div_ceil(&(-s - b), &ww);
    let hi = Integer::div_floor(&(s - b), &ww);
    (lo <= hi).then_some((lo + shift, hi + shift))
}

/// Integers in `[lo, hi]` congruent to `r` mod `m`.
fn count_residue(lo: i128, hi: i128, r: i128, m: i128) -> i128 {
    (Integer::div_floor(&(hi - r), &m) - Integer::div_floor(&(lo - 1 - r), &m)).max(0)
}

/// The residue `t mod q` (squarefree `q | k`) for which `q` divides both
/// `c0 + t a` and `d0 + t b`, assuming `gcd(a, b) = 1` and `a d0 - b c0 = k`.
fn common_residue(primes: &[i128], a: i128, b: i128, c0: i128, d0: i128) -> (i128, i128) {
    let (mut r, mut m) = (0i128, 1i128);
    for &l in primes {
        let (coef, off) = if a.rem_euclid(l) != 0 { (a, c0) } else { (b, d0) };
        let (_, inv, _) = ext_gcd(coef.rem_euclid(l), l);
        let rl = (-off.rem_euclid(l) * inv).rem_euclid(l);
        // combine t ≡ r (mod m) with t ≡ rl (mod l)
        let (_, minv, _) = ext_gcd(m.rem_euclid(l), l);
        let step = ((rl - r).rem_euclid(l) * minv).rem_euclid(l);
        r += m * step;
        m *= l;
    }
    (r, m)
}

/// `count_ball` for `n = 2`, by solving `ad - bc = k` on each first row and
/// counting lattice points of the solution line inside the residual disk.
pub fn count_ball_fast_n2(q: &BallQuery, cfg: &EnumConfig) -> Result<u64> {
    if q.n != 2 {
        return Err(invalid("count_ball_fast_n2 needs n = 2"));
    }
    if q.k == 0 {
        return Err(Error::ZeroDeterminant);
    }
    let s = small_t_sq(q)?;
    check_budget("first rows of the n = 2 fast path", lattice_points_upper_bound(2, s as f64), cfg.budget)?;
    let k = q.k as i128;
    let kf = factorize(q.k.unsigned_abs())?;
    // squarefree divisors q of rad(k) with μ(q), for the primitivity sieve on the second row
    let primes: Vec<i128> = kf.primes().map(|p| p as i128).collect();
    let sieve: Vec<(Vec<i128>, i64)> = (0u32..1 << primes.len())
        .map(|mask| {
            let ps: Vec<i128> = primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            let sign = if ps.len().is_multiple_of(2) { 1 } else { -1 };
            (ps, sign)
        })
        .collect();
    let primitive = q.primitive_only;
    let bound = s.sqrt();
    cfg.run(|| {
        (-bound..=bound)
            .into_par_iter()
            .map(|a| {
                let mut count = 0i128;
                let rem_a = s - a * a;
                let bb = rem_a.sqrt();
                for b in -bb..=bb {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let (a, b) = (a as i128, b as i128);
                    let (g, x, y) = ext_gcd(a, b);
                    if k % g != 0 || (primitive && g != 1) {
                        continue;
                    }
                    // a x + b y = g  ⇒  (c, d) = (-y k/g, x k/g) + t (a/g, b/g)
                    let (c0, d0) = (-y * (k / g), x * (k / g));
                    let w = (a / g, b / g);
                    let rem = (rem_a as i128) - b * b;
                    let Some((lo, hi)) = line_interval((c0, d0), w, rem) else {
                        continue;
                    };
                    if !primitive {
                        count += hi - lo + 1;
                        continue;
                    }
                    for (ps, sign) in &sieve {
                        let (r, m) = common_residue(ps, a, b, c0, d0);
                        count += *sign as i128 * count_residue(lo, hi, r, m);
                    }
                }
                count as u64
            })
            .sum()
    })
}

/// Lazy stream of Hermite normal forms of determinant `k`.
pub struct HnfStream {
    n: usize,
    primitive_only: bool,
    diagonals: crate::arith::OrderedFactorizations,
    diag: Vec<i64>,
    /// row index of each off-diagonal slot
    row_of: Vec<usize>,
    /// off-diagonal entries `c_ij`, `j < i`, row-major; `None` before the first diagonal
    lower: Option<Vec<i64>>,
}

impl HnfStream {
    fn advance_lower(&mut self) -> bool {
        let Some(lower) = self.lower.as_mut() else {
            return false;
        };
        // odometer: the last off-diagonal entry varies fastest
        let mut idx = lower.len();
        while idx > 0 {
            idx -= 1;
            lower[idx] += 1;
            if lower[idx] < self.diag[self.row_of[idx]] {
                return true;
            }
            lower[idx] = 0;
        }
        false
    }

    fn next_diagonal(&mut self) -> bool {
        match self.diagonals.next() {
            Some(d) => {
                self.diag = d.into_iter().map(|x| x as i64).collect();
                self.lower = Some(vec![0; self.n * (self.n - 1) / 2]);
                true
            }
            None => {
                self.lower = None;
                false
            }
        }
    }

    fn current(&self) -> Vec<i64> {
        let n = self.n;
        let lower = self.lower.as_ref().expect("positioned");
        let mut e = vec![0i64; n * n];
        let mut idx = 0;
        for i in 0..n {
            for j in 0..i {
                e[i * n + j] = lower[idx];
                idx += 1;
            }
            e[i * n + i] = self.diag[i];
        }
        e
    }
}

impl Iterator for HnfStream {
    type Item = IntMatrix;

    fn next(&mut self) -> Option<IntMatrix> {
        loop {
            let moved = if self.lower.is_none() {
                self.next_diagonal()
            } else {
                self.advance_lower() || self.next_diagonal()
            };
            if !moved {
                return None;
            }
            let e = self.current();
            if self.primitive_only && !e.chunks(self.n).all(|row| gcd_i64(row) == 1) {
                continue;
            }
            return Some(IntMatrix::from_i64s(self.n, &e));
        }
    }
}

/// Every HNF of determinant `k` (rows primitive when requested), each once.
pub fn enumerate_hnf(n: usize, k: i64, primitive_only: bool) -> Result<HnfStream> {
    enumerate_hnf_with(n, k, primitive_only, &EnumConfig::default())
}

pub fn enumerate_hnf_with(n: usize, k: i64, primitive_only: bool, cfg: &EnumConfig) -> Result<HnfStream> {
    if n == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    if k < 1 {
        return Err(invalid(format!("enumerate_hnf needs k >= 1, got {k}")));
    }
    let total = orbits::a(n as u32, k)?;
    if total > BigInt::from(cfg.budget) {
        return Err(Error::BudgetExceeded {
            what: "HNF enumeration",
            estimate: total.to_u128().unwrap_or(u128::MAX),
            budget: cfg.budget,
        });
    }
    Ok(HnfStream {
        n,
        primitive_only,
        diagonals: crate::arith::ordered_factorizations(k as u64, n)?,
        diag: Vec::new(),
        row_of: (0..n).flat_map(|i| std::iter::repeat_n(i, i)).collect(),
        lower: None,
    })
}

/// `(C, X)` with `C` the Hermite normal form of `A`, `det X = 1`, `A X = C`.
/// Requires `det A > 0`.
pub fn hnf_reduce(a: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    let d = det(a);
    if d.is_zero() {
        return Err(Error::Singular);
    }
    if d.is_negative() {
        return Err(invalid("hnf_reduce needs det > 0; negate a row first"));
    }
    let n = a.n;
    let mut c = a.clone();
    let mut x = IntMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            if c.get(i, j).is_zero() {
                continue;
            }
            let (p, q) = (c.get(i, i).clone(), c.get(i, j).clone());
            let e = p.extended_gcd(&q);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (u, v) = (-(&q / &g), &p / &g);
            c.column_combine(i, j, &s, &t, &u, &v);
            x.column_combine(i, j, &s, &t, &u, &v);
        }
        if c.get(i, i).is_negative() && i + 1 < n {
            c.negate_column(i);
            c.negate_column(n - 1);
            x.negate_column(i);
            x.negate_column(n - 1);
        }
    }
    for i in 1..n {
        for j in 0..i {
            let qt = c.get(i, j).div_floor(c.get(i, i));
            if !qt.is_zero() {
                c.column_sub(j, i, &qt);
                x.column_sub(j, i, &qt);
            }
        }
    }
    debug_assert!(c.is_hnf());
    Ok((c, x))
}

/// Result of classifying the primitive-row matrices in a ball by orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    /// Matrices per HNF representative.
    pub classes: BTreeMap<IntMatrix, u64>,
    /// `N'_{n,k}(T)` from [`count_ball`].
    pub ball_count: u64,
    /// Every representative occurs in `enumerate_hnf(n, k, true)`.
    pub representatives_known: bool,
    pub holds: bool,
}

/// Reduces every primitive-row matrix of determinant `k` in the ball and
/// checks that the class sizes add up to `N'_{n,k}(T)` and that each class
/// representative is a primitive HNF of determinant `k`.
pub fn orbit_decomposition_check(n: usize, k: i64, t_sq: BigRational, cfg: &EnumConfig) -> Result<OrbitDecomposition> {
    if k < 1 {
        return Err(invalid(format!("orbit decomposition needs k >= 1, got {k}")));
    }
    let q = BallQuery::new(n, k, t_sq, true)?;
    let ball_count = count_ball(&q, cfg)?;
    let mut classes: BTreeMap<IntMatrix, u64> = BTreeMap::new();
    let mut failure = None;
    visit_ball(&q, cfg, |m| match hnf_reduce(m) {
        Ok((c, _)) => *classes.entry(c).or_default() += 1,
        Err(e) => failure = Some(e),
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let known: BTreeSet<IntMatrix> = enumerate_hnf_with(n, k, true, cfg)?.collect();
    let representatives_known = classes.keys().all(|c| known.contains(c));
    let total: u64 = classes.values().sum();
    Ok(OrbitDecomposition {
        holds: representatives_known && total == ball_count,
        classes,
        ball_count,
        representatives_known,
    })
}
