//! Quadratic refinements of nondegenerate alternating forms over F₂.

use std::sync::Arc;

use rayon::prelude::*;

use crate::check::IdentityCheck;
use crate::error::{Error, Result};
use crate::gflinalg::{FpMatrix, FpVector, MatrixGroup, Prime};

/// Largest supported dimension of a symplectic space.
pub const MAX_DIM: usize = 62;

/// `F₂^dim` with a nondegenerate alternating Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticSpace {
    gram: FpMatrix,
}

impl SymplecticSpace {
    pub fn new(gram: FpMatrix) -> Result<Self> {
        if gram.prime() != Prime::TWO {
            return Err(Error::InvalidSymplecticSpace("Gram matrix must be over F2".into()));
        }
        if !gram.is_square() {
            return Err(Error::InvalidSymplecticSpace("Gram matrix must be square".into()));
        }
        let n = gram.nrows();
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge(n, MAX_DIM));
        }
        if gram != gram.transpose() || (0..n).any(|i| gram.get(i, i) != 0) {
            return Err(Error::InvalidSymplecticSpace("Gram matrix is not alternating".into()));
        }
        if gram.rank() != n {
            return Err(Error::InvalidSymplecticSpace("pairing is degenerate".into()));
        }
        Ok(SymplecticSpace { gram })
    }

    /// `F₂^{2g}` with basis `e_1, f_1, …, e_g, f_g` and `⟨e_i, f_i⟩ = 1`.
    pub fn hyperbolic(g: usize) -> Self {
        let n = 2 * g;
        let mut gram = FpMatrix::zeros(Prime::TWO, n, n);
        for i in 0..g {
            gram.set(2 * i, 2 * i + 1, 1);
            gram.set(2 * i + 1, 2 * i, 1);
        }
        SymplecticSpace::new(gram).expect("hyperbolic form is valid")
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &FpMatrix {
        &self.gram
    }

    pub fn pairing(&self, v: &FpVector, w: &FpVector) -> u32 {
        self.gram.apply(w).dot(v)
    }

    fn check_vector(&self, v: &FpVector) -> Result<()> {
        if v.prime() != Prime::TWO || v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.dim() });
        }
        Ok(())
    }

    fn check_matrix(&self, m: &FpMatrix) -> Result<()> {
        if m.prime() != Prime::TWO || !m.is_square() || m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.nrows() });
        }
        Ok(())
    }

    /// Whether `σᵀ G σ = G`.
    pub fn is_symplectic(&self, sigma: &FpMatrix) -> bool {
        self.check_matrix(sigma).is_ok() && sigma.transpose().mul(&self.gram).mul(sigma) == self.gram
    }

    /// The transvection `v ↦ v + ⟨v, w⟩ w`.
    pub fn transvection(&self, w: &FpVector) -> Result<FpMatrix> {
        self.check_vector(w)?;
        let n = self.dim();
        let cols: Vec<FpVector> = (0..n)
            .map(|j| {
                let e = FpVector::unit(Prime::TWO, n, j);
                let mut img = e.clone();
                if self.pairing(&e, w) == 1 {
                    img.add_assign(w);
                }
                img
            })
            .collect();
        Ok(FpMatrix::from_columns(Prime::TWO, n, &cols))
    }

    /// Every nonzero vector of the space, in enumeration order.
    pub fn nonzero_vectors(&self) -> impl Iterator<Item = FpVector> {
        FpVector::all(Prime::TWO, self.dim()).skip(1)
    }

    /// `Sp(V)`, generated by a greedily reduced set of transvections.
    pub fn symplectic_group(&self) -> Result<MatrixGroup> {
        let transvections: Vec<FpMatrix> =
            self.nonzero_vectors().map(|w| self.transvection(&w)).collect::<Result<_>>()?;
        let g = MatrixGroup::generated_by(Prime::TWO, self.dim(), &transvections, crate::gflinalg::DEFAULT_CLOSURE_CAP)?;
        Ok(g)
    }

    /// Symplectic basis by greedy pivoting in index order.
    pub fn symplectic_basis(&self) -> SymplecticBasis {
        let n = self.dim();
        let mut remaining: Vec<FpVector> = (0..n).map(|i| FpVector::unit(Prime::TWO, n, i)).collect();
        let mut pairs = Vec::with_capacity(n / 2);
        while let Some(e) = remaining.first().cloned() {
            let k = remaining
                .iter()
                .position(|f| self.pairing(&e, f) == 1)
                .expect("nondegenerate pairing always has a partner");
            let f = remaining[k].clone();
            remaining.remove(k);
            remaining.remove(0);
            // project the rest onto ⟨e, f⟩^⊥
            for u in remaining.iter_mut() {
                let a = self.pairing(u, &f);
                let b = self.pairing(u, &e);
                if a == 1 {
                    u.add_assign(&e);
                }
                if b == 1 {
                    u.add_assign(&f);
                }
            }
            pairs.push((e, f));
        }
        SymplecticBasis { pairs }
    }
}

/// Pairs `(e_i, f_i)` with `⟨e_i, f_j⟩ = δ_ij` and all other pairings zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticBasis {
    pub pairs: Vec<(FpVector, FpVector)>,
}

impl SymplecticBasis {
    pub fn is_valid_for(&self, space: &SymplecticSpace) -> bool {
        let flat: Vec<&FpVector> = self.pairs.iter().flat_map(|(e, f)| [e, f]).collect();
        flat.len() == space.dim()
            && flat.iter().enumerate().all(|(i, u)| {
                flat.iter().enumerate().all(|(j, w)| {
                    let expected = u32::from(i / 2 == j / 2 && i != j);
                    space.pairing(u, w) == expected
                })
            })
    }
}

/// A quadratic refinement `q` of the pairing, determined by its values on the standard basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticRefinement {
    space: Arc<SymplecticSpace>,
    basis_values: u64,
}

impl QuadraticRefinement {
    /// `basis_values` bit `i` is `q(e_i)`.
    pub fn new(space: Arc<SymplecticSpace>, basis_values: u64) -> Self {
        let mask = if space.dim() == 64 { u64::MAX } else { (1u64 << space.dim()) - 1 };
        QuadraticRefinement { space, basis_values: basis_values & mask }
    }

    pub fn from_values(space: Arc<SymplecticSpace>, values: &[u32]) -> Result<Self> {
        if values.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: values.len() });
        }
        let bits = values.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | (u64::from(v & 1) << i));
        Ok(QuadraticRefinement::new(space, bits))
    }

    /// All `2^dim` refinements, ordered by their basis-value masks.
    pub fn all(space: Arc<SymplecticSpace>) -> impl Iterator<Item = QuadraticRefinement> {
        let n = space.dim();
        assert!(n < 32, "too many refinements to enumerate");
        (0..1u64 << n).map(move |b| QuadraticRefinement::new(space.clone(), b))
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn basis_values(&self) -> Vec<u32> {
        (0..self.space.dim()).map(|i| ((self.basis_values >> i) & 1) as u32).collect()
    }

    pub fn basis_mask(&self) -> u64 {
        self.basis_values
    }

    /// `q(Σ λ_i e_i) = Σ λ_i q(e_i) + Σ_{i<j} λ_i λ_j ⟨e_i, e_j⟩`.
    pub fn eval(&self, v: &FpVector) -> Result<u32> {
        self.space.check_vector(v)?;
        Ok(self.eval_unchecked(v))
    }

    fn eval_unchecked(&self, v: &FpVector) -> u32 {
        let gram = self.space.gram();
        let mut acc = 0u32;
        let n = v.dim();
        for i in 0..n {
            if v.get(i) == 0 {
                continue;
            }
            acc ^= ((self.basis_values >> i) & 1) as u32;
            for j in (i + 1)..n {
                acc ^= v.get(j) & gram.get(i, j);
            }
        }
        acc
    }

    pub fn arf(&self) -> u32 {
        self.space
            .symplectic_basis()
            .pairs
            .iter()
            .map(|(e, f)| self.eval_unchecked(e) & self.eval_unchecked(f))
            .fold(0, |a, b| a ^ b)
    }

    /// `(q + v)(u) = q(u) + ⟨v, u⟩`.
    pub fn translate(&self, v: &FpVector) -> Result<QuadraticRefinement> {
        self.space.check_vector(v)?;
        let shift = self.space.gram().apply(v).as_bits().expect("F2 vector of dim <= 64");
        Ok(QuadraticRefinement::new(self.space.clone(), self.basis_values ^ shift))
    }

    /// `q ∘ σ⁻¹`.
    pub fn act(&self, sigma: &FpMatrix) -> Result<QuadraticRefinement> {
        if !self.space.is_symplectic(sigma) {
            return Err(Error::NotSymplectic);
        }
        let inv = sigma.inverse().ok_or(Error::NotInvertible)?;
        let n = self.space.dim();
        let values: Vec<u32> = (0..n).map(|i| self.eval_unchecked(&inv.column(i))).collect();
        QuadraticRefinement::from_values(self.space.clone(), &values)
    }

    /// The unique `w` with `q(σ⁻¹u) − q(u) = ⟨u, w⟩` for all `u`.
    pub fn cocycle_c(&self, sigma: &FpMatrix) -> Result<FpVector> {
        let moved = self.act(sigma)?;
        let diff = FpVector::from_bits(self.space.dim(), moved.basis_values ^ self.basis_values);
        Ok(self
            .space
            .gram()
            .solve(&diff)?
            .expect("nondegenerate Gram matrix is invertible"))
    }

    /// Whether `σ` preserves the pairing and `q`.
    pub fn preserves(&self, sigma: &FpMatrix) -> bool {
        self.space.is_symplectic(sigma)
            && (0..self.space.dim()).all(|i| self.eval_unchecked(&sigma.column(i)) == ((self.basis_values >> i) & 1) as u32)
    }

    /// The Dickson invariant `dim V^σ mod 2` of an element of `O(q)`.
    pub fn dickson(&self, sigma: &FpMatrix) -> Result<u32> {
        if !self.space.is_symplectic(sigma) {
            return Err(Error::NotSymplectic);
        }
        if !self.preserves(sigma) {
            return Err(Error::NotOrthogonal);
        }
        Ok((sigma.fixed_subspace_dim() % 2) as u32)
    }

    /// The subgroup of `ambient` preserving `q`.
    pub fn orthogonal_group(&self, ambient: &MatrixGroup) -> Result<MatrixGroup> {
        let elements = ambient.closure()?;
        if let Some(bad) = elements.iter().find(|g| !self.space.is_symplectic(g)) {
            let _ = bad;
            return Err(Error::NotSymplectic);
        }
        let stabilizer: Vec<FpMatrix> = elements.into_iter().filter(|g| self.preserves(g)).collect();
        MatrixGroup::generated_by(Prime::TWO, self.space.dim(), &stabilizer, ambient.cap())
    }
}

/// The standard hyperbolic space of dimension `dim ∈ {2, 4}` with its symplectic group.
pub fn sweep_space(dim: usize) -> Result<(Arc<SymplecticSpace>, MatrixGroup)> {
    if dim != 2 && dim != 4 {
        return Err(Error::InvalidArgument(format!("exhaustive sweeps support dim 2 or 4, got {dim}")));
    }
    let space = Arc::new(SymplecticSpace::hyperbolic(dim / 2));
    let group = space.symplectic_group()?;
    Ok((space, group))
}

/// Exhaustive identity checks for refinements of the hyperbolic space of dimension 2 or 4.
pub fn verify_suite(dim: usize) -> Result<Vec<IdentityCheck>> {
    let (space, sp) = sweep_space(dim)?;
    let table = sp.table()?;
    let refinements: Vec<QuadraticRefinement> = QuadraticRefinement::all(space.clone()).collect();
    let vectors: Vec<FpVector> = FpVector::all(Prime::TWO, dim).collect();
    let mut out = Vec::new();

    out.push(IdentityCheck::from_outcomes(
        "polar identity q(v+w)+q(v)+q(w) = <v,w>",
        refinements.par_iter().flat_map_iter(|q| {
            let vectors = &vectors;
            let space = &space;
            vectors.iter().flat_map(move |a| {
                vectors.iter().map(move |b| {
                    let lhs = q.eval_unchecked(&a.add(b)) ^ q.eval_unchecked(a) ^ q.eval_unchecked(b);
                    (lhs != space.pairing(a, b)).then(|| format!("q={:b} v={a} w={b}", q.basis_values))
                })
            })
        }),
    ));

    out.push(IdentityCheck::from_outcomes(
        "Arf(q+v) = Arf(q) + q(v)",
        refinements.par_iter().flat_map_iter(|q| {
            let arf = q.arf();
            vectors.iter().map(move |v| {
                let moved = q.translate(v).expect("dimension matches");
                (moved.arf() != arf ^ q.eval_unchecked(v)).then(|| format!("q={:b} v={v}", q.basis_values))
            })
        }),
    ));

    out.push(IdentityCheck::from_outcomes(
        "Sp action q -> q o s^-1 preserves Arf",
        refinements.par_iter().flat_map_iter(|q| {
            let arf = q.arf();
            table.elements().iter().map(move |g| {
                let moved = q.act(g).expect("elements are symplectic");
                (moved.arf() != arf).then(|| format!("q={:b} s={g}", q.basis_values))
            })
        }),
    ));

    let mut cocycle = IdentityCheck::new("c_q(st) = c_q(s) + s c_q(t)");
    for q in &refinements {
        let c: Vec<FpVector> = table.elements().par_iter().map(|g| q.cocycle_c(g)).collect::<Result<_>>()?;
        let n = table.order();
        let part = IdentityCheck::from_outcomes(
            "",
            (0..n * n).into_par_iter().map(|k| {
                let (i, j) = (k / n, k % n);
                let lhs = &c[table.mul(i, j)];
                let rhs = c[i].add(&table.element(i).apply(&c[j]));
                (*lhs != rhs).then(|| format!("q={:b} pair=({i},{j})", q.basis_values))
            }),
        );
        cocycle.absorb(part.cases, part.failures, part.first_failure);
    }
    out.push(cocycle);

    let mut dickson = IdentityCheck::new("Dickson d_q(st) = d_q(s) + d_q(t) on O(q)");
    for q in &refinements {
        let o = q.orthogonal_group(&sp)?;
        let ot = o.table()?;
        let d: Vec<u32> = ot.elements().iter().map(|g| q.dickson(g)).collect::<Result<_>>()?;
        let n = ot.order();
        let part = IdentityCheck::from_outcomes(
            "",
            (0..n * n).into_par_iter().map(|k| {
                let (i, j) = (k / n, k % n);
                (d[ot.mul(i, j)] != d[i] ^ d[j]).then(|| format!("q={:b} pair=({i},{j})", q.basis_values))
            }),
        );
        dickson.absorb(part.cases, part.failures, part.first_failure);
    }
    out.push(dickson);

    let invariant: Vec<&QuadraticRefinement> =
        refinements.iter().filter(|q| sp.generators().iter().all(|g| q.preserves(g))).collect();
    let expected = if dim == 2 { 1 } else { 0 };
    let mut inv = IdentityCheck::new(format!("Sp-invariant refinements = {expected}"));
    inv.record(invariant.len() == expected, || format!("found {} invariant refinements", invariant.len()));
    out.push(inv);

    Ok(out)
}
