//! Where the densities land.
//!
//! For n >= 4 odd and even determinants separate: every odd k has density
//! above every even k. For n = 2 the densities are dense in [0, 1], and a
//! squarefree k hits any target.

use primrows::density::{density, density_image_gap, find_k_for_density};

pub fn run_example() -> primrows::Result<()> {
    for n in 4..=8 {
        let g = density_image_gap(n)?;
        println!("n = {n}: odd k >= {:.9}, even k <= D_n(2) = {} ({:.9})", g.odd_lower_bound, g.d_at_2, 1.0 - n as f64 / (2f64.powi(n as i32) - 1.0));
    }

    let (odd, even): (Vec<_>, Vec<_>) = (1..=200).partition(|k| k % 2 == 1);
    let min_odd = odd.iter().map(|&k| density(4, k).map(|d| d.to_f64())).collect::<Result<Vec<_>, _>>()?.into_iter().fold(1.0, f64::min);
    let max_even = even.iter().map(|&k| density(4, k).map(|d| d.to_f64())).collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max);
    println!("n = 4, k <= 200: min over odd {min_odd:.6} > max over even {max_even:.6}");

    for x in [0.1, 0.5, 1.0] {
        let t = find_k_for_density(x, 0.01)?;
        println!("-log D_2(k) = {:.6} for k = product of {} primes from {}", t.neg_log_density, t.primes.len(), t.primes[0]);
    }
    Ok(())
}

fn main() -> primrows::Result<()> {
    run_example()
}
