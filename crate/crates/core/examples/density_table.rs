//! Exact densities `D_n(k) = a'_n(k) / a_n(k)` and their prime-power limits.

use primrows::cli::format_sig;
use primrows::density::{density, density_prime_limit, density_zero, local_density};

pub fn run_example() -> primrows::Result<()> {
    for n in 2..=5 {
        let row: Vec<String> = (1..=8).map(|k| density(n, k).map(|d| d.to_string())).collect::<Result<_, _>>()?;
        println!("D_{n}(1..8): {}", row.join("  "));
    }

    let limit = density_prime_limit(3, 2)?;
    println!("D_3(2^m) -> {} = {}", limit, format_sig(&limit));
    for m in [1, 2, 4, 8, 16] {
        println!("  m = {m:>2}: {}", format_sig(&local_density(3, 2, m)));
    }

    for n in 3..=6 {
        println!("D_{n}(0) = 1/zeta({})^{n} = {:.12}", n - 1, density_zero(n)?);
    }
    Ok(())
}

fn main() -> primrows::Result<()> {
    run_example()
}
