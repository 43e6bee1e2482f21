//! Counting SL_n(Z)-orbits of integer matrices with a given determinant.
//!
//! `a(n, k)` counts all orbits, `a_prime(n, k)` those whose matrices have
//! primitive rows. Both are multiplicative in `k`, so the work happens one
//! prime power at a time.
//!
//! ```bash
//! cargo run --example orbit_counts
//! ```

use primrows::orbits::{a, a3_prime_closed, a_prime, a_prime_by_tuples, a_prime_local, a_prime_via_convolution};

pub fn run_example() -> primrows::Result<()> {
    println!("{:>4} {:>10} {:>10} {:>10}", "k", "a_3(k)", "a'_3(k)", "a'_4(k)");
    for k in 1..=12 {
        println!("{k:>4} {:>10} {:>10} {:>10}", a(3, k)?, a_prime(3, k)?, a_prime(4, k)?);
    }

    // three independent routes to the same number
    let k = 360;
    let fast = a_prime(4, k)?;
    assert_eq!(fast, a_prime_by_tuples(4, k)?);
    assert_eq!(fast, a_prime_via_convolution(4, k)?);
    println!("a'_4(360) = {fast}");

    // prime powers, where the closed forms live
    for m in 1..=5 {
        let generic = a_prime_local(3, 2, m)?;
        assert_eq!(generic, a3_prime_closed(2, m)?);
        println!("a'_3(2^{m}) = {generic}");
    }

    // the sign of k does not matter
    assert_eq!(a(5, -12)?, a(5, 12)?);
    Ok(())
}

fn main() -> primrows::Result<()> {
    run_example()
}
