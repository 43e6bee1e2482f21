//! Hermite normal forms as orbit representatives.
//!
//! Every integer matrix of positive determinant `k` is right-equivalent
//! under SL_n(Z) to exactly one lower-triangular HNF, so enumerating HNFs
//! enumerates orbits.

use primrows::lattice::{enumerate_hnf, hnf_reduce, IntMatrix};
use primrows::orbits::{a, a_prime};

pub fn run_example() -> primrows::Result<()> {
    for c in enumerate_hnf(2, 4, false)? {
        println!("{c}  primitive rows: {}", c.rows_primitive());
    }
    println!("a(2,4) = {}, a'(2,4) = {}", a(2, 4)?, a_prime(2, 4)?);

    let count = enumerate_hnf(3, 12, true)?.count();
    println!("{count} primitive HNFs of determinant 12 in dimension 3 (a'_3(12) = {})", a_prime(3, 12)?);

    let m = IntMatrix::from_rows(&[[1, 3, 4], [5, 1, 9], [6, 2, 5]])?;
    let (c, x) = hnf_reduce(&m)?;
    println!("A = {m}\nC = {c}\nX = {x}, det X = {}", x.det());
    assert_eq!(m.mul(&x)?, c);
    Ok(())
}

fn main() -> primrows::Result<()> {
    run_example()
}
