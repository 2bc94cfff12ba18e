//! Local factors and the even-parity fraction for the sextic twist family.

use quadtwist::disparity::{disparity_report, parse_disparity, ratio_string, GAMMA_CAP};

fn main() -> quadtwist::Result<()> {
    let input = parse_disparity(include_str!("data/kappa_sextic.json"))?;
    let places = input.places()?;
    let report = disparity_report(&places, input.statistic, input.base_parity, true, GAMMA_CAP)?;
    for p in &report.places {
        println!("kappa_{:<8} = {}", p.label, ratio_string(&p.factor));
    }
    println!("product {}", ratio_string(&report.product));
    println!("even {}  odd {}", ratio_string(&report.fraction_even), ratio_string(&report.fraction_odd));
    println!("enumeration agrees: {:?}", report.brute_force_agrees);
    Ok(())
}
