//! The extension W = V ⊕ U of a refinement and the function f_q on Sp(V).

use std::sync::Arc;

use quadtwist::pollatsek::PollatsekSpace;
use quadtwist::quadform::{QuadraticRefinement, SymplecticSpace};

fn main() -> quadtwist::Result<()> {
    let space = Arc::new(SymplecticSpace::hyperbolic(2));
    let sp = space.symplectic_group()?.closure()?;
    let q = QuadraticRefinement::new(space.clone(), 0b0011);
    let w = PollatsekSpace::extend(&q)?;
    println!("dim W = {}, Arf(q) = {}, Arf(q_W) = {}", w.total().dim(), q.arf(), w.q_w().arf());

    let f: Vec<u32> = sp.iter().map(|s| w.f_q(s)).collect::<quadtwist::Result<_>>()?;
    let ones = f.iter().filter(|&&x| x == 1).count();
    println!("f_q takes the value 1 on {ones} of {} elements", sp.len());

    let mut in_orthogonal = 0;
    for s in &sp {
        for alpha in 0..2 {
            let image = w.phi(s, alpha)?;
            in_orthogonal += usize::from(w.q_w().preserves(&image));
        }
    }
    println!("phi(s, a) preserves q_W for {in_orthogonal} of {} pairs", 2 * sp.len());
    Ok(())
}
