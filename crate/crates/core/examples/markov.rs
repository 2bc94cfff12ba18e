//! The recurrence t_{n+1} = M(Frob) t_n: closed-form powers and norm decay.

use num_rational::BigRational;
use num_traits::One;
use quadtwist::disparity::{
    markov_matrix, markov_power_closed_form, markov_run, parse_markov, ratio_string, Draws, FrobeniusClassDatum,
};
use quadtwist::galois::Sign;

fn main() -> quadtwist::Result<()> {
    let class = FrobeniusClassDatum { label: "s".into(), epsilon: Sign::Minus, rho: vec![1], weight: BigRational::one() };
    let m = markov_matrix(&class, 5, 1)?;
    for k in [1, 5, 10] {
        assert_eq!(markov_power_closed_form(&class, 5, 1, k)?, m.iterated_power(k));
    }
    println!("closed form matches M^k for p = 5, r = 1");

    let file = parse_markov(include_str!("data/markov_mixed.json"))?;
    let report = markov_run(&file, file.initial_state()?, 60, &Draws::Seeded(0))?;
    for (k, n) in report.norm_squares.iter().enumerate().step_by(10) {
        println!("step {k:>3}: |t|^2 = {}", ratio_string(n));
    }
    println!("bound holds {}, decays {}", report.bound_holds, report.decays);
    Ok(())
}
