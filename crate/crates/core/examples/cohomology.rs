//! H^1(Sp4(F2), F2^4) and the obstruction class c_q.

use std::sync::Arc;

use quadtwist::cohomology::{h1_dim, h1_dim_dense, is_coboundary, GroupCochain, GroupModule};
use quadtwist::quadform::{QuadraticRefinement, SymplecticSpace};

fn main() -> quadtwist::Result<()> {
    let space = Arc::new(SymplecticSpace::hyperbolic(2));
    let sp = space.symplectic_group()?;
    let module = Arc::new(GroupModule::standard(&sp)?);
    println!("dim H1(Sp4(F2), V) = {} (generator propagation)", h1_dim(&module)?);

    let small = SymplecticSpace::hyperbolic(1);
    let sp2 = Arc::new(GroupModule::standard(&small.symplectic_group()?)?);
    println!("dim H1(Sp2(F2), V) = {} (dense linear algebra)", h1_dim_dense(&sp2)?);

    let table = module.group().clone();
    for q in QuadraticRefinement::all(space.clone()).take(3) {
        let c = GroupCochain::from_fn(module.clone(), 1, |t| q.cocycle_c(table.element(t[0])).expect("symplectic"))?;
        let cocycle = c.is_cocycle()?;
        let bounded = is_coboundary(&c)?.is_some();
        println!("q = {:?}: c_q cocycle {cocycle}, coboundary {bounded}", q.basis_values());
    }
    Ok(())
}
