//! ε on S_n acting on the 2-torsion of y² = f(x), deg f = n, by cycle type.

use std::collections::BTreeMap;

use quadtwist::galois::{epsilon, epsilon_from_cycle_type, EvenSubsetModel, Permutation};

fn main() -> quadtwist::Result<()> {
    for n in [5, 6] {
        let model = EvenSubsetModel::new(n)?;
        let mut by_type = BTreeMap::new();
        for perm in Permutation::all(n) {
            let ct = perm.cycle_type();
            let from_matrix = epsilon(&model.matrix_of(&perm)?);
            assert_eq!(from_matrix, epsilon_from_cycle_type(&ct, n)?);
            by_type.insert(ct.to_string(), from_matrix);
        }
        println!("n = {n}, genus {}:", model.genus());
        for (ct, eps) in by_type {
            println!("  {ct:<12} {eps}");
        }
    }
    Ok(())
}
