//! Quadratic refinements of F_2^4: Arf invariants, orthogonal groups and the Dickson invariant.

use std::sync::Arc;

use quadtwist::quadform::{QuadraticRefinement, SymplecticSpace};

fn main() -> quadtwist::Result<()> {
    let space = Arc::new(SymplecticSpace::hyperbolic(2));
    let sp = space.symplectic_group()?;
    println!("|Sp4(F2)| = {}", sp.order()?);
    for q in QuadraticRefinement::all(space.clone()) {
        let o = q.orthogonal_group(&sp)?;
        let elements = o.closure()?;
        let odd = elements.iter().filter(|s| q.dickson(s).map(|d| d == 1).unwrap_or(false)).count();
        println!("q = {:?}  Arf {}  |O(q)| = {:>3}  Dickson-odd elements {odd}", q.basis_values(), q.arf(), elements.len());
    }
    Ok(())
}
