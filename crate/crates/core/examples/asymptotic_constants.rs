use primrows::asymptotics::{ball_volume, c0, c1, c_nk_prime, constant_report, zeta_int};

pub fn run_example() -> primrows::Result<()> {
    for s in [2, 3, 4, 5, 9] {
        println!("zeta({s}) = {:.15}", zeta_int(s)?);
    }
    println!("V_4 = {:.12} (pi^2/2)", ball_volume(4));

    for n in 2..=5 {
        println!("n = {n}: C0 = {:.12}, C1 = {:.12}", c0(n)?, c1(n)?);
    }

    // N'_{2,k}(T) ~ c'_{2,k} T^2
    for k in 1..=6 {
        println!("c'_2,{k} = {:.12}", c_nk_prime(2, k)?);
    }

    let report = constant_report(3, Some(0))?;
    println!("{report:#?}");
    Ok(())
}

fn main() -> primrows::Result<()> {
    run_example()
}
