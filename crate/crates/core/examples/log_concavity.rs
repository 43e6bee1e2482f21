//! Log-concavity of `m -> a'_n(p^m)` and the convolution structure behind it.
//!
//! The sequence factors as a discrete convolution of the pieces
//! `M ⋆ P_i = (1, p^i - 1, p^{2i} - p^i, ...)`, and Menon's decomposition
//! splits `w_r² - w_{r-1} w_{r+1}` of a convolution into three sums.

use primrows::density::{a_prime_sequence, geometric_seq, is_log_concave, menon_decompose, mobius_seq, seq_convolve};

pub fn run_example() -> primrows::Result<()> {
    for n in 2..=6 {
        let seq = a_prime_sequence(n, 2, 10)?;
        let (ok, at) = is_log_concave(&seq);
        let head: Vec<String> = seq.terms().iter().take(6).map(|t| t.to_string()).collect();
        println!("a'_{n}(2^m) = {}, ...  log-concave: {ok} {}", head.join(", "), at.map(|r| format!("(fails at r = {r})")).unwrap_or_default());
    }

    let piece = |i| -> primrows::Result<_> { Ok(seq_convolve(&mobius_seq(10)?, &geometric_seq(3, i, 10)?)) };
    let (u, v) = (piece(1)?, piece(2)?);
    let w = seq_convolve(&u, &v);
    for r in 1..5 {
        let (i, ii, iii) = menon_decompose(&u, &v, r)?;
        let direct = &w[r] * &w[r] - &w[r - 1] * &w[r + 1];
        println!("r = {r}: I = {i}, II = {ii}, III = {iii}, sum = {direct}");
    }

    // with p = 2 and i = 1 the first piece is (1, 1, 2, 4, ...) and the product dips at r = 1
    let w = seq_convolve(&seq_convolve(&mobius_seq(6)?, &geometric_seq(2, 1, 6)?), &seq_convolve(&mobius_seq(6)?, &geometric_seq(2, 2, 6)?));
    println!("(M*P_1)*(M*P_2) at p = 2: {:?}", is_log_concave(&w));
    Ok(())
}

fn main() -> primrows::Result<()> {
    run_example()
}
