//! Counting integer matrices of fixed determinant in a Euclidean ball.
//!
//! The generic enumerator walks the ball row by row; for n = 2 the fast path
//! solves `ad - bc = k` along each first row instead. Counts are exact and do
//! not depend on the number of threads.

use primrows::asymptotics::c_nk_prime;
use primrows::lattice::{count_ball, count_ball_fast_n2, BallQuery, EnumConfig};

pub fn run_example() -> primrows::Result<()> {
    let cfg = EnumConfig::default();

    let q = BallQuery::with_t_sq(2, 1, 2, false)?;
    println!("N_2,1(sqrt 2) = {}", count_ball(&q, &cfg)?);

    let q = BallQuery::with_t_sq(2, 6, 400, true)?;
    println!("N'_2,6(20): enumerator {}, fast path {}", count_ball(&q, &cfg)?, count_ball_fast_n2(&q, &cfg)?);

    let q = BallQuery::with_t_sq(3, 2, 12, true)?;
    let one = count_ball(&q, &EnumConfig::with_threads(1))?;
    let four = count_ball(&q, &EnumConfig::with_threads(4))?;
    println!("N'_3,2(sqrt 12) = {one} (1 thread) = {four} (4 threads)");

    for radius in ["50", "100", "200", "400"] {
        let q = BallQuery::with_radius(2, 3, radius, true)?;
        let n = count_ball_fast_n2(&q, &cfg)? as f64;
        let t: f64 = radius.parse().unwrap();
        println!("T = {radius:>4}: N'/(c' T^2) = {:.5}", n / (c_nk_prime(2, 3)? * t * t));
    }
    Ok(())
}

fn main() -> primrows::Result<()> {
    run_example()
}
