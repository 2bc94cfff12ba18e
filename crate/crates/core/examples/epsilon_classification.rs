//! Whether ε(σ) = (-1)^{dim V^σ} is a homomorphism, with the θ cross-check.

use std::sync::Arc;

use quadtwist::galois::GaloisImage;
use quadtwist::quadform::{QuadraticRefinement, SymplecticSpace};

fn describe(name: &str, image: &GaloisImage) -> quadtwist::Result<()> {
    let class = image.classify()?;
    let theta = image.theta_criterion()?;
    println!(
        "{name:<12} |G| = {:>3}  {:<24} theta generates: {}",
        image.table()?.order(),
        class.name(),
        theta.generates
    );
    Ok(())
}

fn main() -> quadtwist::Result<()> {
    let space = Arc::new(SymplecticSpace::hyperbolic(2));
    let sp = space.symplectic_group()?;
    let gram = space.gram().clone();
    describe("Sp4(F2)", &GaloisImage::new(sp.clone(), gram.clone())?)?;
    for q in QuadraticRefinement::all(space.clone()).step_by(7) {
        describe(&format!("O(q), Arf {}", q.arf()), &GaloisImage::new(q.orthogonal_group(&sp)?, gram.clone())?)?;
    }
    Ok(())
}
