//! The extended space `W = V ⊕ U`, the maps `φ_q : E_q → O(q_W)`, and the function
//! `f_q` whose coboundary is `c_q ∪ c_q`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::check::IdentityCheck;
use crate::cohomology::{cup, BilinearMap, Extension, GroupCochain, GroupModule};
use crate::error::{Error, Result};
use crate::gflinalg::{FpMatrix, FpVector, MatrixGroup, Prime};
use crate::quadform::{sweep_space, QuadraticRefinement, SymplecticSpace};

/// `V ⊕ U` with `U = F₂²`, `q_U(λ, λ') = λ + λ' + λλ'`, and the `U` coordinates last.
#[derive(Clone, Debug)]
pub struct PollatsekSpace {
    q: QuadraticRefinement,
    total: Arc<SymplecticSpace>,
    q_w: QuadraticRefinement,
}

impl PollatsekSpace {
    pub fn extend(q: &QuadraticRefinement) -> Result<Self> {
        let base = q.space();
        let n = base.dim();
        let mut gram = FpMatrix::zeros(Prime::TWO, n + 2, n + 2);
        for i in 0..n {
            for j in 0..n {
                gram.set(i, j, base.gram().get(i, j));
            }
        }
        gram.set(n, n + 1, 1);
        gram.set(n + 1, n, 1);
        let total = Arc::new(SymplecticSpace::new(gram)?);
        let q_w = QuadraticRefinement::new(total.clone(), q.basis_mask() | (0b11 << n));
        Ok(PollatsekSpace { q: q.clone(), total, q_w })
    }

    pub fn base(&self) -> &Arc<SymplecticSpace> {
        self.q.space()
    }

    pub fn refinement(&self) -> &QuadraticRefinement {
        &self.q
    }

    pub fn total(&self) -> &Arc<SymplecticSpace> {
        &self.total
    }

    pub fn q_w(&self) -> &QuadraticRefinement {
        &self.q_w
    }

    fn n(&self) -> usize {
        self.base().dim()
    }

    pub fn x(&self) -> FpVector {
        FpVector::unit(Prime::TWO, self.n() + 2, self.n())
    }

    pub fn y(&self) -> FpVector {
        FpVector::unit(Prime::TWO, self.n() + 2, self.n() + 1)
    }

    /// Inclusion `V → W`.
    pub fn embed(&self, v: &FpVector) -> FpVector {
        v.concat(&FpVector::zeros(Prime::TWO, 2))
    }

    /// `φ(σ, α)`: `x ↦ x`, `y ↦ αx + c_q(σ) + y`, `v ↦ σv + ⟨c_q(σ), σv⟩ x`.
    pub fn phi(&self, sigma: &FpMatrix, alpha: u32) -> Result<FpMatrix> {
        let c = self.q.cocycle_c(sigma)?;
        Ok(self.phi_with(sigma, &c, alpha))
    }

    fn phi_with(&self, sigma: &FpMatrix, c: &FpVector, alpha: u32) -> FpMatrix {
        let n = self.n();
        let base = self.base();
        let x = self.x();
        let mut cols: Vec<FpVector> = (0..n)
            .map(|j| {
                let sv = sigma.column(j);
                let mut img = self.embed(&sv);
                if base.pairing(c, &sv) == 1 {
                    img.add_assign(&x);
                }
                img
            })
            .collect();
        cols.push(x.clone());
        let mut y_img = self.embed(c).add(&self.y());
        if alpha % 2 == 1 {
            y_img.add_assign(&x);
        }
        cols.push(y_img);
        FpMatrix::from_columns(Prime::TWO, n + 2, &cols)
    }

    /// `f_q(σ) = d_{q_W}(φ(σ, 0))`.
    pub fn f_q(&self, sigma: &FpMatrix) -> Result<u32> {
        self.q_w.dickson(&self.phi(sigma, 0)?)
    }
}

/// `(c∪v)(σ) + (v∪c)(σ) + (v∪dv)(σ) = ⟨c_q(σ), σv⟩ + ⟨v, c_q(σ)⟩ + ⟨v, σv⟩`.
fn change_of_form_correction(space: &SymplecticSpace, c: &FpVector, sigma: &FpMatrix, v: &FpVector) -> u32 {
    let sv = sigma.apply(v);
    space.pairing(c, &sv) ^ space.pairing(v, c) ^ space.pairing(v, &sv)
}

/// Whether `f_{q+v}(σ) = f_q(σ) + (c_q∪v)(σ) + (v∪c_q)(σ) + (v∪dv)(σ)`.
pub fn change_of_form_check(q: &QuadraticRefinement, v: &FpVector, sigma: &FpMatrix) -> Result<bool> {
    let q2 = q.translate(v)?;
    let lhs = PollatsekSpace::extend(&q2)?.f_q(sigma)?;
    let c = q.cocycle_c(sigma)?;
    let rhs = PollatsekSpace::extend(q)?.f_q(sigma)? ^ change_of_form_correction(q.space(), &c, sigma, v);
    Ok(lhs == rhs)
}

/// `E_q = Sp(V) × F₂` with the law twisted by `c_q ∪ c_q`.
pub fn eq_group(q: &QuadraticRefinement, sp: &MatrixGroup) -> Result<Extension> {
    if q.space().dim() > 4 {
        return Err(Error::InvalidArgument("E_q is only built for dim V <= 4".into()));
    }
    let standard = Arc::new(GroupModule::standard(sp)?);
    let table = standard.group().clone();
    let c = GroupCochain::from_fn(standard.clone(), 1, |g| {
        q.cocycle_c(table.element(g[0])).expect("group elements are symplectic")
    })?;
    if !c.is_cocycle()? {
        return Err(Error::NotACocycle);
    }
    let trivial = Arc::new(GroupModule::trivial(table.clone(), Prime::TWO, 1));
    let cc = cup(&c, &c, &BilinearMap::scalar(q.space().gram().clone()), trivial)?;
    // a cup product of 1-cocycles is a 2-cocycle
    Extension::new_unchecked(cc)
}

/// Per-refinement tables over `Sp(V)`: `c_q` and `f_q`.
struct Tables {
    c: Vec<FpVector>,
    f: Vec<u32>,
}

fn tables(ps: &PollatsekSpace, elements: &[FpMatrix]) -> Result<Tables> {
    let c: Vec<FpVector> = elements.par_iter().map(|g| ps.q.cocycle_c(g)).collect::<Result<_>>()?;
    let f: Vec<u32> = elements
        .par_iter()
        .zip(&c)
        .map(|(g, cg)| ps.q_w.dickson(&ps.phi_with(g, cg, 0)))
        .collect::<Result<_>>()?;
    Ok(Tables { c, f })
}

/// Exhaustive checks of the construction over every refinement of the hyperbolic
/// space of dimension 2 or 4.
pub fn verify_suite(dim: usize) -> Result<Vec<IdentityCheck>> {
    let (space, sp) = sweep_space(dim)?;
    let table = sp.table()?;
    let elements = table.elements();
    let n = table.order();
    let refinements: Vec<QuadraticRefinement> = QuadraticRefinement::all(space.clone()).collect();
    let spaces: Vec<PollatsekSpace> = refinements.iter().map(PollatsekSpace::extend).collect::<Result<_>>()?;
    let all_tables: Vec<Tables> = spaces.iter().map(|ps| tables(ps, elements)).collect::<Result<_>>()?;

    let mut shape = IdentityCheck::new("W invariants: q_W|V = q, q_W(x) = q_W(y) = q_W(x+y) = 1, <x,y> = 1, Arf(q_W) = Arf(q) + 1");
    for ps in &spaces {
        let (x, y) = (ps.x(), ps.y());
        let restricted = FpVector::all(Prime::TWO, dim).all(|v| ps.q_w.eval(&ps.embed(&v)) == ps.q.eval(&v));
        let ok = restricted
            && ps.q_w.eval(&x) == Ok(1)
            && ps.q_w.eval(&y) == Ok(1)
            && ps.q_w.eval(&x.add(&y)) == Ok(1)
            && ps.total.pairing(&x, &y) == 1
            && ps.q_w.arf() == ps.q.arf() ^ 1;
        shape.record(ok, || format!("q={:b}", ps.q.basis_mask()));
    }

    let mut in_orthogonal = IdentityCheck::new("phi(s, a) lies in O(q_W)");
    let mut phi_hom = IdentityCheck::new("phi: E_q -> O(q_W) is a homomorphism");
    let mut split = IdentityCheck::new("d_{q_W}(phi(1, a)) = a");
    let mut df = IdentityCheck::new("f(s) + f(t) + f(st) = (c_q u c_q)(s, t)");
    let mut cup_route = IdentityCheck::new("df_q = c_q u c_q as cochains");
    let mut restrict = IdentityCheck::new("f_q restricted to O(q) is the Dickson invariant");
    let mut unique = IdentityCheck::new("f_q is the unique solution restricting to Dickson");

    let characters = f2_characters(&sp)?;
    for ((ps, t), q) in spaces.iter().zip(&all_tables).zip(&refinements) {
        let phis: Vec<[FpMatrix; 2]> = elements
            .par_iter()
            .zip(&t.c)
            .map(|(g, cg)| [ps.phi_with(g, cg, 0), ps.phi_with(g, cg, 1)])
            .collect();
        for (i, pair) in phis.iter().enumerate() {
            for (a, m) in pair.iter().enumerate() {
                in_orthogonal.record(ps.q_w.preserves(m), || format!("q={:b} s#{i} a={a}", q.basis_mask()));
            }
        }
        let id = table.identity();
        for a in 0..2u32 {
            split.record(ps.q_w.dickson(&phis[id][a as usize]) == Ok(a), || format!("q={:b} a={a}", q.basis_mask()));
        }

        let ext = eq_group(q, &sp)?;
        let cc = ext.cocycle();
        let part = IdentityCheck::from_outcomes(
            "",
            (0..n * n * 4).into_par_iter().map(|k| {
                let (pair, ab) = (k / 4, k % 4);
                let (i, j) = (pair / n, pair % n);
                let (a, b) = ((ab >> 1) as u32, (ab & 1) as u32);
                let x = ext.element(i, FpVector::from_bits(1, a as u64));
                let y = ext.element(j, FpVector::from_bits(1, b as u64));
                let xy = x.multiply(&y).expect("same extension");
                let lhs = &phis[xy.g][xy.m.get(0) as usize];
                let rhs = phis[i][a as usize].mul(&phis[j][b as usize]);
                (*lhs != rhs).then(|| format!("q={:b} ({i},{a})({j},{b})", q.basis_mask()))
            }),
        );
        phi_hom.absorb(part.cases, part.failures, part.first_failure);

        let part = IdentityCheck::from_outcomes(
            "",
            (0..n * n).into_par_iter().map(|k| {
                let (i, j) = (k / n, k % n);
                let lhs = t.f[i] ^ t.f[j] ^ t.f[table.mul(i, j)];
                let rhs = space.pairing(&t.c[i], &elements[i].apply(&t.c[j]));
                (lhs != rhs).then(|| format!("q={:b} pair=({i},{j})", q.basis_mask()))
            }),
        );
        df.absorb(part.cases, part.failures, part.first_failure);

        let trivial = cc.module().clone();
        let f_cochain = GroupCochain::from_fn(trivial, 1, |g| FpVector::from_bits(1, u64::from(t.f[g[0]])))?;
        let d = f_cochain.differential()?;
        cup_route.record(d == *cc, || format!("q={:b}", q.basis_mask()));

        let mut restricted_ok = true;
        for (i, g) in elements.iter().enumerate() {
            if q.preserves(g) {
                let ok = q.dickson(g)? == t.f[i];
                restricted_ok &= ok;
                restrict.record(ok, || format!("q={:b} s#{i}", q.basis_mask()));
            }
        }
        // any other solution differs by a character of Sp(V) that vanishes on O(q)
        let others = characters
            .iter()
            .filter(|chi| chi.iter().any(|&v| v != 0))
            .filter(|chi| elements.iter().enumerate().all(|(i, g)| !q.preserves(g) || chi[i] == 0))
            .count();
        unique.record(restricted_ok && others == 0, || format!("q={:b}: {others} extra solutions", q.basis_mask()));
    }

    let change = verify_change_of_form(&space, elements, &refinements, &all_tables)?;
    Ok(vec![shape, in_orthogonal, phi_hom, split, df, cup_route, restrict, unique, change])
}

fn verify_change_of_form(
    space: &SymplecticSpace,
    elements: &[FpMatrix],
    refinements: &[QuadraticRefinement],
    all_tables: &[Tables],
) -> Result<IdentityCheck> {
    let by_mask: HashMap<u64, usize> = refinements.iter().enumerate().map(|(k, q)| (q.basis_mask(), k)).collect();
    let vectors: Vec<FpVector> = FpVector::all(Prime::TWO, space.dim()).collect();
    let mut check = IdentityCheck::new("f_{q+v} = f_q + c_q u v + v u c_q + v u dv");
    for (k, q) in refinements.iter().enumerate() {
        for v in &vectors {
            let k2 = by_mask[&q.translate(v)?.basis_mask()];
            let (t, t2) = (&all_tables[k], &all_tables[k2]);
            let part = IdentityCheck::from_outcomes(
                "",
                elements.par_iter().enumerate().map(|(i, g)| {
                    let rhs = t.f[i] ^ change_of_form_correction(space, &t.c[i], g, v);
                    (t2.f[i] != rhs).then(|| format!("q={:b} v={v} s#{i}", q.basis_mask()))
                }),
            );
            check.absorb(part.cases, part.failures, part.first_failure);
        }
    }
    Ok(check)
}

/// Every homomorphism `G → F₂`, as value lists indexed like the group table.
pub fn f2_characters(group: &MatrixGroup) -> Result<Vec<Vec<u32>>> {
    let table = group.table()?;
    let gens = table.generator_indices();
    if gens.len() > 20 {
        return Err(Error::SizeLimit(1 << 20));
    }
    let n = table.order();
    let mut out = Vec::new();
    for mask in 0..1u32 << gens.len() {
        let mut chi = vec![0u32; n];
        for j in 1..n {
            let (h, k) = table.parent(j).expect("BFS parent");
            chi[j] = chi[h] ^ ((mask >> k) & 1);
        }
        let consistent = (0..n).all(|h| gens.iter().enumerate().all(|(k, &s)| chi[table.mul(h, s)] == chi[h] ^ ((mask >> k) & 1)));
        if consistent {
            out.push(chi);
        }
    }
    Ok(out)
}
