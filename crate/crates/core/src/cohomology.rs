//! Inhomogeneous cochains on finite groups: differentials, cup products, `H¹`, and
//! central extensions.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::check::IdentityCheck;
use crate::error::{Error, Result};
use crate::gflinalg::{FpMatrix, FpVector, GroupTable, MatrixGroup, Prime};
use crate::quadform::QuadraticRefinement;

/// Highest supported cochain degree.
pub const MAX_DEGREE: usize = 3;

/// Largest cochain table (number of tuples) that will be materialized.
pub const MAX_TABLE: usize = 1 << 26;

/// Default group-order cap for [`h1_dim`].
pub const H1_CAP: usize = 10_000;

/// Default group-order cap for the dense routes ([`h1_dim_dense`], [`coboundary_preimage_dense`]).
pub const DENSE_CAP: usize = 64;

/// A finite group acting linearly on `F_p^dim`.
#[derive(Debug)]
pub struct GroupModule {
    group: Arc<GroupTable>,
    p: Prime,
    dim: usize,
    action: Vec<FpMatrix>,
}

impl GroupModule {
    /// The module determined by images of the group's generators. Fails unless the
    /// assignment extends to a homomorphism.
    pub fn from_generator_images(group: Arc<GroupTable>, p: Prime, dim: usize, images: &[FpMatrix]) -> Result<Self> {
        let gens = group.generator_indices();
        if images.len() != gens.len() {
            return Err(Error::InvalidModule(format!("{} generator images for {} generators", images.len(), gens.len())));
        }
        for m in images {
            if m.prime() != p || !m.is_square() || m.nrows() != dim {
                return Err(Error::InvalidModule("generator image has the wrong shape or field".into()));
            }
            if !m.is_invertible() {
                return Err(Error::InvalidModule("generator image is not invertible".into()));
            }
        }
        let n = group.order();
        let mut action = Vec::with_capacity(n);
        action.push(FpMatrix::identity(p, dim));
        for j in 1..n {
            let (h, k) = group.parent(j).expect("non-identity elements have a BFS parent");
            let m = action[h].mul(&images[k]);
            action.push(m);
        }
        for i in 0..n {
            for (k, &s) in gens.iter().enumerate() {
                if action[group.mul(i, s)] != action[i].mul(&images[k]) {
                    return Err(Error::InvalidModule("generator images do not define a homomorphism".into()));
                }
            }
        }
        Ok(GroupModule { group, p, dim, action })
    }

    /// A module from an explicit action on every element, checked on all
    /// (element, generator) pairs.
    pub fn new(group: Arc<GroupTable>, p: Prime, dim: usize, action: Vec<FpMatrix>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::InvalidModule("action must list one matrix per element".into()));
        }
        let images: Vec<FpMatrix> = group.generator_indices().iter().map(|&s| action[s].clone()).collect();
        let m = GroupModule::from_generator_images(group, p, dim, &images)?;
        if m.action != action {
            return Err(Error::InvalidModule("action is not a homomorphism".into()));
        }
        Ok(m)
    }

    /// A matrix group acting on its natural module.
    pub fn standard(group: &MatrixGroup) -> Result<Self> {
        let table = group.table()?;
        let action = table.elements().to_vec();
        Ok(GroupModule { p: group.prime(), dim: group.dim(), group: table, action })
    }

    pub fn trivial(group: Arc<GroupTable>, p: Prime, dim: usize) -> Self {
        let action = vec![FpMatrix::identity(p, dim); group.order()];
        GroupModule { group, p, dim, action }
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix of the element with index `g`.
    pub fn action(&self, g: usize) -> &FpMatrix {
        &self.action[g]
    }

    pub fn act(&self, g: usize, m: &FpVector) -> FpVector {
        self.action[g].apply(m)
    }

    pub fn is_trivial(&self) -> bool {
        self.action.iter().all(FpMatrix::is_identity)
    }

    /// `dim M^G`.
    pub fn invariants_dim(&self) -> usize {
        let rows: Vec<FpVector> = self
            .group
            .generator_indices()
            .iter()
            .flat_map(|&s| {
                let a = self.action[s].sub(&FpMatrix::identity(self.p, self.dim));
                a.row_vectors().to_vec()
            })
            .collect();
        let stacked = FpMatrix::from_row_vectors(self.p, self.dim, rows).expect("rows have module dimension");
        self.dim - stacked.rank()
    }
}

/// An `i`-cochain `G^i → M`, stored densely by flattened tuple index (first entry most significant).
#[derive(Clone, Debug)]
pub struct GroupCochain {
    degree: usize,
    module: Arc<GroupModule>,
    values: Vec<FpVector>,
}

impl PartialEq for GroupCochain {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && Arc::ptr_eq(&self.module, &other.module) && self.values == other.values
    }
}

fn table_size(order: usize, degree: usize) -> Result<usize> {
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    match order.checked_pow(degree as u32) {
        Some(s) if s <= MAX_TABLE => Ok(s),
        _ => Err(Error::SizeLimit(MAX_TABLE)),
    }
}

fn decode(mut idx: usize, order: usize, degree: usize, out: &mut [usize]) {
    for k in (0..degree).rev() {
        out[k] = idx % order;
        idx /= order;
    }
}

impl GroupCochain {
    pub fn zero(module: Arc<GroupModule>, degree: usize) -> Result<Self> {
        let size = table_size(module.group.order(), degree)?;
        let z = FpVector::zeros(module.p, module.dim);
        Ok(GroupCochain { degree, values: vec![z; size], module })
    }

    /// The degree-0 cochain with value `m`.
    pub fn constant(module: Arc<GroupModule>, m: FpVector) -> Result<Self> {
        if m.dim() != module.dim || m.prime() != module.p {
            return Err(Error::DimensionMismatch { expected: module.dim, found: m.dim() });
        }
        Ok(GroupCochain { degree: 0, values: vec![m], module })
    }

    /// Tabulate `f` on every `degree`-tuple of element indices.
    pub fn from_fn<F>(module: Arc<GroupModule>, degree: usize, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> FpVector + Sync,
    {
        let n = module.group.order();
        let size = table_size(n, degree)?;
        let values: Vec<FpVector> = (0..size)
            .into_par_iter()
            .map(|idx| {
                let mut t = [0usize; MAX_DEGREE];
                decode(idx, n, degree, &mut t[..degree]);
                f(&t[..degree])
            })
            .collect();
        if let Some(bad) = values.iter().find(|v| v.dim() != module.dim || v.prime() != module.p) {
            return Err(Error::DimensionMismatch { expected: module.dim, found: bad.dim() });
        }
        Ok(GroupCochain { degree, module, values })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn module(&self) -> &Arc<GroupModule> {
        &self.module
    }

    fn index(&self, tuple: &[usize]) -> usize {
        let n = self.module.group.order();
        tuple.iter().fold(0, |acc, &g| acc * n + g)
    }

    /// Value on a tuple of element indices.
    pub fn value(&self, tuple: &[usize]) -> &FpVector {
        assert_eq!(tuple.len(), self.degree, "tuple length must equal the cochain degree");
        &self.values[self.index(tuple)]
    }

    pub fn values(&self) -> &[FpVector] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(FpVector::is_zero)
    }

    fn check_same(&self, other: &GroupCochain) -> Result<()> {
        if !Arc::ptr_eq(&self.module, &other.module) || self.degree != other.degree {
            return Err(Error::InvalidArgument("cochains live in different groups".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &GroupCochain) -> Result<GroupCochain> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect();
        Ok(GroupCochain { degree: self.degree, module: self.module.clone(), values })
    }

    pub fn scale(&self, c: u32) -> GroupCochain {
        let values = self.values.iter().map(|a| a.scale(c)).collect();
        GroupCochain { degree: self.degree, module: self.module.clone(), values }
    }

    /// `(df)(g_1..g_{i+1}) = g_1 f(g_2..) + Σ_k (−1)^k f(.., g_k g_{k+1}, ..) + (−1)^{i+1} f(g_1..g_i)`.
    pub fn differential(&self) -> Result<GroupCochain> {
        let i = self.degree;
        if i >= MAX_DEGREE {
            return Err(Error::UnsupportedDegree(i + 1));
        }
        let group = self.module.group.clone();
        let p = self.module.p.get();
        let neg = |v: &FpVector, k: usize| if k % 2 == 1 { v.scale(p - 1) } else { v.clone() };
        GroupCochain::from_fn(self.module.clone(), i + 1, |g| {
            let mut out = self.module.act(g[0], self.value(&g[1..]));
            let mut merged = [0usize; MAX_DEGREE];
            for k in 1..=i {
                merged[..k - 1].copy_from_slice(&g[..k - 1]);
                merged[k - 1] = group.mul(g[k - 1], g[k]);
                merged[k..i].copy_from_slice(&g[k + 1..=i]);
                out.add_assign(&neg(self.value(&merged[..i]), k));
            }
            out.add_assign(&neg(self.value(&g[..i]), i + 1));
            out
        })
    }

    pub fn is_cocycle(&self) -> Result<bool> {
        Ok(self.differential()?.is_zero())
    }
}

/// A bilinear map `M × N → P`, `out_k = mᵀ B_k n`.
#[derive(Clone, Debug)]
pub struct BilinearMap {
    forms: Vec<FpMatrix>,
}

impl BilinearMap {
    pub fn new(forms: Vec<FpMatrix>) -> Self {
        BilinearMap { forms }
    }

    /// A scalar-valued pairing with Gram matrix `gram`.
    pub fn scalar(gram: FpMatrix) -> Self {
        BilinearMap { forms: vec![gram] }
    }

    /// Multiplication `F_p × F_p → F_p`.
    pub fn multiplication(p: Prime) -> Self {
        BilinearMap::scalar(FpMatrix::identity(p, 1))
    }

    pub fn out_dim(&self) -> usize {
        self.forms.len()
    }

    pub fn apply(&self, m: &FpVector, n: &FpVector) -> FpVector {
        let p = m.prime();
        let vals: Vec<i64> = self.forms.iter().map(|b| b.apply(n).dot(m) as i64).collect();
        FpVector::from_residues(p, &vals)
    }

    /// Whether `B(gm, gn) = g B(m, n)` on basis vectors for every generator.
    pub fn is_equivariant(&self, left: &GroupModule, right: &GroupModule, out: &GroupModule) -> bool {
        if out.dim != self.out_dim()
            || self.forms.iter().any(|b| b.nrows() != left.dim || b.ncols() != right.dim)
            || !Arc::ptr_eq(&left.group, &right.group)
            || !Arc::ptr_eq(&left.group, &out.group)
        {
            return false;
        }
        left.group.generator_indices().iter().all(|&s| {
            (0..left.dim).all(|a| {
                (0..right.dim).all(|b| {
                    let m = FpVector::unit(left.p, left.dim, a);
                    let n = FpVector::unit(right.p, right.dim, b);
                    self.apply(&left.act(s, &m), &right.act(s, &n)) == out.act(s, &self.apply(&m, &n))
                })
            })
        })
    }
}

/// `(a∪b)(g_1..g_{i+j}) = B(a(g_1..g_i), g_1⋯g_i · b(g_{i+1}..g_{i+j}))`, valued in `out`.
pub fn cup(a: &GroupCochain, b: &GroupCochain, pairing: &BilinearMap, out: Arc<GroupModule>) -> Result<GroupCochain> {
    let degree = a.degree + b.degree;
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    if !pairing.is_equivariant(&a.module, &b.module, &out) {
        return Err(Error::NotEquivariant);
    }
    let group = a.module.group.clone();
    GroupCochain::from_fn(out, degree, |g| {
        let (left, right) = g.split_at(a.degree);
        let h = group.product(left);
        pairing.apply(a.value(left), &b.module.act(h, b.value(right)))
    })
}

/// Some `m` with `dm = f` for a 1-cocycle `f`, or `None` if `f` is not a coboundary.
pub fn is_coboundary(f: &GroupCochain) -> Result<Option<FpVector>> {
    if f.degree != 1 {
        return Err(Error::UnsupportedDegree(f.degree));
    }
    if !f.is_cocycle()? {
        return Err(Error::NotACocycle);
    }
    let module = &f.module;
    let (p, dim) = (module.p, module.dim);
    let id = FpMatrix::identity(p, dim);
    let gens = module.group.generator_indices();
    if gens.is_empty() {
        return Ok(Some(FpVector::zeros(p, dim)));
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &s in gens {
        rows.extend(module.action[s].sub(&id).row_vectors().iter().cloned());
        rhs.extend(f.value(&[s]).residues().into_iter().map(i64::from));
    }
    let a = FpMatrix::from_row_vectors(p, dim, rows)?;
    a.solve(&FpVector::from_residues(p, &rhs))
}

/// `dim H¹(G, M)` by propagating generator values along the breadth-first spanning
/// tree of the Cayley graph and imposing the cocycle relation on every remaining edge.
pub fn h1_dim(module: &GroupModule) -> Result<usize> {
    h1_dim_capped(module, H1_CAP)
}

pub fn h1_dim_capped(module: &GroupModule, cap: usize) -> Result<usize> {
    let group = &module.group;
    let n = group.order();
    if n > cap {
        return Err(Error::SizeLimit(cap));
    }
    let (p, dim) = (module.p, module.dim);
    let gens = group.generator_indices();
    let nv = dim * gens.len();
    let selector = |k: usize| {
        let mut s = FpMatrix::zeros(p, dim, nv);
        for r in 0..dim {
            s.set(r, k * dim + r, 1);
        }
        s
    };
    let selectors: Vec<FpMatrix> = (0..gens.len()).map(selector).collect();
    // expr[g] gives f(g) as a linear function of the unknown generator values
    let mut expr: Vec<Option<FpMatrix>> = vec![None; n];
    expr[group.identity()] = Some(FpMatrix::zeros(p, dim, nv));
    for j in 1..n {
        let (h, k) = group.parent(j).expect("BFS parent");
        let e = expr[h].as_ref().expect("parents precede children").add(&module.action[h].mul(&selectors[k]));
        expr[j] = Some(e);
    }
    let expr: Vec<FpMatrix> = expr.into_iter().map(Option::unwrap).collect();
    let constraints: Vec<FpVector> = (0..n)
        .into_par_iter()
        .flat_map_iter(|h| {
            let expr = &expr;
            let selectors = &selectors;
            gens.iter().enumerate().filter_map(move |(k, &s)| {
                let g = group.mul(h, s);
                if group.parent(g) == Some((h, k)) {
                    return None;
                }
                let diff = expr[g].sub(&expr[h]).sub(&module.action[h].mul(&selectors[k]));
                Some(diff.row_vectors().to_vec())
            })
        })
        .flatten()
        .filter(|r| !r.is_zero())
        .collect();
    let z1 = if nv == 0 {
        0
    } else {
        nv - FpMatrix::from_row_vectors(p, nv, constraints)?.rank()
    };
    let b1 = dim - module.invariants_dim();
    Ok(z1 - b1)
}

/// Matrix of `d: C^i → C^{i+1}` in the basis of (tuple, coordinate) pairs.
fn dense_differential(module: &Arc<GroupModule>, degree: usize) -> Result<FpMatrix> {
    let n = module.group.order();
    let (p, dim) = (module.p, module.dim);
    let src = table_size(n, degree)? * dim;
    let tgt = table_size(n, degree + 1)? * dim;
    let mut columns = Vec::with_capacity(src);
    for idx in 0..src {
        let mut unit = FpVector::zeros(p, src);
        unit.set(idx, 1);
        let values = (0..src / dim).map(|t| unit.slice(t * dim, (t + 1) * dim)).collect();
        let c = GroupCochain { degree, module: module.clone(), values };
        let d = c.differential()?;
        let mut col = FpVector::zeros(p, tgt);
        for (t, v) in d.values.iter().enumerate() {
            for r in 0..dim {
                col.set(t * dim + r, v.get(r));
            }
        }
        columns.push(col);
    }
    Ok(FpMatrix::from_columns(p, tgt, &columns))
}

/// `dim H¹(G, M)` from the ranks of `d⁰` and `d¹` on the full cochain spaces.
pub fn h1_dim_dense(module: &Arc<GroupModule>) -> Result<usize> {
    let n = module.group.order();
    if n > DENSE_CAP {
        return Err(Error::SizeLimit(DENSE_CAP));
    }
    let d0 = dense_differential(module, 0)?;
    let d1 = dense_differential(module, 1)?;
    let z1 = n * module.dim - d1.rank();
    Ok(z1 - d0.rank())
}

/// Some `(i−1)`-cochain `u` with `du = f`, found by dense linear algebra.
pub fn coboundary_preimage_dense(f: &GroupCochain) -> Result<Option<GroupCochain>> {
    let module = &f.module;
    if f.degree == 0 || f.degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(f.degree));
    }
    if module.group.order() > DENSE_CAP {
        return Err(Error::SizeLimit(DENSE_CAP));
    }
    let (p, dim) = (module.p, module.dim);
    let d = dense_differential(module, f.degree - 1)?;
    let mut rhs = FpVector::zeros(p, d.nrows());
    for (t, v) in f.values.iter().enumerate() {
        for r in 0..dim {
            rhs.set(t * dim + r, v.get(r));
        }
    }
    Ok(d.solve(&rhs)?.map(|x| {
        let values = (0..x.dim() / dim.max(1)).map(|t| x.slice(t * dim, (t + 1) * dim)).collect();
        GroupCochain { degree: f.degree - 1, module: module.clone(), values }
    }))
}

/// The central extension `E_a` of `G` by a trivial module `M` defined by a 2-cocycle `a`.
#[derive(Clone, Debug)]
pub struct Extension {
    cocycle: Arc<GroupCochain>,
}

/// An element `(g, m)` of an [`Extension`].
#[derive(Clone, Debug)]
pub struct ExtensionElement {
    pub g: usize,
    pub m: FpVector,
    cocycle: Arc<GroupCochain>,
}

impl PartialEq for ExtensionElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.cocycle, &other.cocycle) && self.g == other.g && self.m == other.m
    }
}

impl Eq for ExtensionElement {}

impl Extension {
    pub fn new(cocycle: GroupCochain) -> Result<Self> {
        if cocycle.degree != 2 {
            return Err(Error::UnsupportedDegree(cocycle.degree));
        }
        if !cocycle.module.is_trivial() {
            return Err(Error::InvalidModule("central extensions need a trivial module".into()));
        }
        if !cocycle.is_cocycle()? {
            return Err(Error::NotACocycle);
        }
        Ok(Extension { cocycle: Arc::new(cocycle) })
    }

    /// Like [`Extension::new`] without the cocycle check, for 2-cochains that are
    /// cocycles by construction (such as cup products of 1-cocycles).
    pub fn new_unchecked(cocycle: GroupCochain) -> Result<Self> {
        if cocycle.degree != 2 {
            return Err(Error::UnsupportedDegree(cocycle.degree));
        }
        if !cocycle.module.is_trivial() {
            return Err(Error::InvalidModule("central extensions need a trivial module".into()));
        }
        Ok(Extension { cocycle: Arc::new(cocycle) })
    }

    pub fn cocycle(&self) -> &GroupCochain {
        &self.cocycle
    }

    pub fn order(&self) -> usize {
        let m = &self.cocycle.module;
        m.group.order() * (m.p.get() as usize).pow(m.dim as u32)
    }

    pub fn element(&self, g: usize, m: FpVector) -> ExtensionElement {
        ExtensionElement { g, m, cocycle: self.cocycle.clone() }
    }

    /// All elements, group index major.
    pub fn elements(&self) -> Vec<ExtensionElement> {
        let m = &self.cocycle.module;
        (0..m.group.order())
            .flat_map(|g| FpVector::all(m.p, m.dim).map(move |v| (g, v)))
            .map(|(g, v)| self.element(g, v))
            .collect()
    }

    /// `(1, −a(1,1))`.
    pub fn identity(&self) -> ExtensionElement {
        let id = self.cocycle.module.group.identity();
        self.element(id, self.cocycle.value(&[id, id]).neg())
    }

    /// The embedding `m ↦ (1, m − a(1,1))`.
    pub fn embed(&self, m: &FpVector) -> ExtensionElement {
        let id = self.cocycle.module.group.identity();
        self.element(id, m.sub(self.cocycle.value(&[id, id])))
    }

    /// A section `g ↦ (g, s(g))` that is a homomorphism, if one exists, by exhaustive search.
    pub fn find_splitting(&self, cap: u64) -> Result<Option<Vec<FpVector>>> {
        let module = &self.cocycle.module;
        let n = module.group.order();
        let q = (module.p.get() as u64).checked_pow(module.dim as u32).ok_or(Error::SizeLimit(cap as usize))?;
        let total = q.checked_pow(n as u32).filter(|&t| t <= cap).ok_or(Error::SizeLimit(cap as usize))?;
        let all: Vec<FpVector> = FpVector::all(module.p, module.dim).collect();
        let found = (0..total).into_par_iter().find_map_any(|mut code| {
            let s: Vec<FpVector> = (0..n)
                .map(|_| {
                    let v = all[(code % q) as usize].clone();
                    code /= q;
                    v
                })
                .collect();
            let hom = (0..n).all(|g| {
                (0..n).all(|h| {
                    let lhs = self.element(g, s[g].clone()).multiply(&self.element(h, s[h].clone())).unwrap();
                    lhs.g == module.group.mul(g, h) && lhs.m == s[lhs.g]
                })
            });
            hom.then_some(s)
        });
        Ok(found)
    }
}

impl ExtensionElement {
    /// `(g, m)(g', m') = (gg', m + m' + a(g, g'))`.
    pub fn multiply(&self, other: &ExtensionElement) -> Result<ExtensionElement> {
        if !Arc::ptr_eq(&self.cocycle, &other.cocycle) {
            return Err(Error::MismatchedExtensions);
        }
        let group = &self.cocycle.module.group;
        let mut m = self.m.add(&other.m);
        m.add_assign(self.cocycle.value(&[self.g, other.g]));
        Ok(ExtensionElement { g: group.mul(self.g, other.g), m, cocycle: self.cocycle.clone() })
    }
}

/// A group with a module, an equivariant pairing into trivial `F_p`, and a name.
pub struct BatteryEntry {
    pub name: String,
    pub group: MatrixGroup,
    pub module: Arc<GroupModule>,
    pub pairing: BilinearMap,
    pub scalars: Arc<GroupModule>,
}

fn permutation_matrix(p: Prime, images: &[usize]) -> FpMatrix {
    let n = images.len();
    let mut m = FpMatrix::zeros(p, n, n);
    for (i, &j) in images.iter().enumerate() {
        m.set(j, i, 1);
    }
    m
}

fn entry(name: &str, group: MatrixGroup, module: GroupModule, pairing: BilinearMap) -> Result<BatteryEntry> {
    let scalars = Arc::new(GroupModule::trivial(module.group().clone(), module.prime(), 1));
    let module = Arc::new(module);
    if !pairing.is_equivariant(&module, &module, &scalars) {
        return Err(Error::NotEquivariant);
    }
    Ok(BatteryEntry { name: name.into(), group, module, pairing, scalars })
}

/// Small groups (order at most 24) with modules over `F₂` and `F₃`, including
/// subgroups of `Sp₄(F₂)` drawn with a fixed seed.
pub fn small_battery() -> Result<Vec<BatteryEntry>> {
    let (f2, f3) = (Prime::TWO, Prime::new(3)?);
    let hyp = |p: Prime, g: usize| {
        let mut m = FpMatrix::zeros(p, 2 * g, 2 * g);
        for i in 0..g {
            m.set(2 * i, 2 * i + 1, 1);
            m.set(2 * i + 1, 2 * i, p.get() - 1);
        }
        m
    };
    let mut out = Vec::new();

    let s3 = MatrixGroup::new(f2, 2, vec![FpMatrix::from_rows(f2, &[vec![1, 1], vec![0, 1]])?, FpMatrix::from_rows(f2, &[vec![1, 0], vec![1, 1]])?])?;
    out.push(entry("S3 on F2^2", s3.clone(), GroupModule::standard(&s3)?, BilinearMap::scalar(hyp(f2, 1)))?);
    let t = s3.table()?;
    out.push(entry("S3 on trivial F2", s3.clone(), GroupModule::trivial(t.clone(), f2, 1), BilinearMap::multiplication(f2))?);
    let sign: Vec<FpMatrix> = t
        .generator_indices()
        .iter()
        .map(|&s| FpMatrix::from_rows(f3, &[vec![if t.element(s).fixed_subspace_dim() % 2 == 1 { 2 } else { 1 }]]))
        .collect::<Result<_>>()?;
    out.push(entry("S3 on F3 by sign", s3, GroupModule::from_generator_images(t, f3, 1, &sign)?, BilinearMap::multiplication(f3))?);

    let c2 = MatrixGroup::new(f3, 1, vec![FpMatrix::from_rows(f3, &[vec![2]])?])?;
    out.push(entry("C2 on F3 by -1", c2.clone(), GroupModule::standard(&c2)?, BilinearMap::multiplication(f3))?);
    let c3 = MatrixGroup::new(f2, 2, vec![FpMatrix::from_rows(f2, &[vec![0, 1], vec![1, 1]])?])?;
    out.push(entry("C3 on F2^2", c3.clone(), GroupModule::standard(&c3)?, BilinearMap::scalar(hyp(f2, 1)))?);

    for p in [f2, f3] {
        let s4 = MatrixGroup::new(p, 4, vec![permutation_matrix(p, &[1, 0, 2, 3]), permutation_matrix(p, &[1, 2, 3, 0])])?;
        let name = format!("S4 on F{}^4 by permutations", p.get());
        out.push(entry(&name, s4.clone(), GroupModule::standard(&s4)?, BilinearMap::scalar(FpMatrix::identity(p, 4)))?);
    }

    let sp4 = crate::quadform::SymplecticSpace::hyperbolic(2).symplectic_group()?;
    let table = sp4.table()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..400 {
        if seen.len() >= 5 {
            break;
        }
        let picks: Vec<FpMatrix> = (0..2).map(|_| table.element(rng.random_range(0..table.order())).clone()).collect();
        let Ok(h) = MatrixGroup::generated_by(f2, 4, &picks, 24) else { continue };
        let Ok(order) = h.order() else { continue };
        if order < 2 || !seen.insert(order) {
            continue;
        }
        let name = format!("order-{order} subgroup of Sp4(F2)");
        out.push(entry(&name, h.clone(), GroupModule::standard(&h)?, BilinearMap::scalar(hyp(f2, 2)))?);
    }
    Ok(out)
}

fn seeded_cochain(module: &Arc<GroupModule>, degree: usize, rng: &mut ChaCha8Rng) -> Result<GroupCochain> {
    let n = table_size(module.group.order(), degree)?;
    let p = module.p.get();
    let raw: Vec<FpVector> = (0..n)
        .map(|_| {
            let entries: Vec<i64> = (0..module.dim).map(|_| i64::from(rng.random_range(0..p))).collect();
            FpVector::from_residues(module.p, &entries)
        })
        .collect();
    GroupCochain::from_fn(module.clone(), degree, |g| {
        let mut idx = 0;
        for &x in g {
            idx = idx * module.group.order() + x;
        }
        raw[idx].clone()
    })
}

/// Exhaustive identity checks for cochains: `d∘d = 0`, the Leibniz rule, agreement
/// of the two `H¹` routes, `H¹(Sp(V), V)` and the class of `c_q` for `dim V ∈ {2, 4}`,
/// and the extension group law.
pub fn verify_suite(dim: usize) -> Result<Vec<IdentityCheck>> {
    let (space, sp) = crate::quadform::sweep_space(dim)?;
    let battery = small_battery()?;
    let mut rng = ChaCha8Rng::seed_from_u64(dim as u64);

    let mut dd = IdentityCheck::new("d(df) = 0 on groups of order <= 24");
    let mut leibniz = IdentityCheck::new("d(a u b) = da u b + (-1)^i a u db");
    let mut routes = IdentityCheck::new("H1 by generator propagation = H1 by full linear algebra");
    for e in &battery {
        for degree in 0..=1 {
            for _ in 0..3 {
                let f = seeded_cochain(&e.module, degree, &mut rng)?;
                let ok = f.differential()?.differential()?.is_zero();
                dd.record(ok, || format!("{} degree {degree}", e.name));
            }
        }
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)] {
            let a = seeded_cochain(&e.module, i, &mut rng)?;
            let b = seeded_cochain(&e.module, j, &mut rng)?;
            let lhs = cup(&a, &b, &e.pairing, e.scalars.clone())?.differential()?;
            let t1 = cup(&a.differential()?, &b, &e.pairing, e.scalars.clone())?;
            let t2 = cup(&a, &b.differential()?, &e.pairing, e.scalars.clone())?;
            let sign = if i % 2 == 1 { e.module.p.get() - 1 } else { 1 };
            leibniz.record(lhs == t1.add(&t2.scale(sign))?, || format!("{} degrees ({i},{j})", e.name));
        }
        let (a, b) = (h1_dim(&e.module)?, h1_dim_dense(&e.module)?);
        routes.record(a == b, || format!("{}: {a} vs {b}", e.name));
    }

    let expected = if dim == 4 { 1 } else { 0 };
    let standard = Arc::new(GroupModule::standard(&sp)?);
    let h1 = h1_dim(&standard)?;
    let mut h1_sp = IdentityCheck::new(format!("dim H1(Sp(V), V) = {expected} for dim V = {dim}"));
    h1_sp.record(h1 == expected, || format!("got {h1}"));

    let refinements: Vec<QuadraticRefinement> = QuadraticRefinement::all(space.clone()).collect();
    let invariant_exists = refinements.iter().any(|q| sp.generators().iter().all(|g| q.preserves(g)));
    let mut class = IdentityCheck::new("c_q is a coboundary exactly when an Sp-invariant refinement exists");
    let table = sp.table()?;
    for q in &refinements {
        let c: Vec<FpVector> = table.elements().par_iter().map(|g| q.cocycle_c(g)).collect::<Result<_>>()?;
        let cq = GroupCochain::from_fn(standard.clone(), 1, |g| c[g[0]].clone())?;
        let cob = is_coboundary(&cq)?.is_some();
        class.record(cob == invariant_exists, || format!("q={:b}", q.basis_mask()));
    }

    let mut assoc = IdentityCheck::new("E_q over Sp2(F2) is associative with identity (1, -a(1,1))");
    let (space2, sp2) = crate::quadform::sweep_space(2)?;
    for q in QuadraticRefinement::all(space2) {
        let ext = crate::pollatsek::eq_group(&q, &sp2)?;
        let elems = ext.elements();
        let e = ext.identity();
        for x in &elems {
            assoc.record(e.multiply(x)? == *x && x.multiply(&e)? == *x, || format!("identity q={:b}", q.basis_mask()));
            for y in &elems {
                let xy = x.multiply(y)?;
                for z in &elems {
                    let ok = xy.multiply(z)? == x.multiply(&y.multiply(z)?)?;
                    assoc.record(ok, || format!("q={:b} ({},{})({},{})({},{})", q.basis_mask(), x.g, x.m, y.g, y.m, z.g, z.m));
                }
            }
        }
    }

    let mut split = IdentityCheck::new("E_a splits exactly when a is a coboundary (|G| <= 12)");
    for e in battery.iter().filter(|e| e.module.group.order() <= 12) {
        let triv = Arc::new(GroupModule::trivial(e.module.group.clone(), Prime::TWO, 1));
        let mut cocycles = vec![GroupCochain::zero(triv.clone(), 2)?];
        for chi in crate::pollatsek::f2_characters(&e.group)? {
            let c = GroupCochain::from_fn(triv.clone(), 1, |g| FpVector::from_bits(1, u64::from(chi[g[0]])))?;
            cocycles.push(cup(&c, &c, &BilinearMap::multiplication(Prime::TWO), triv.clone())?);
        }
        cocycles.push(seeded_cochain(&triv, 1, &mut rng)?.differential()?);
        for a in cocycles {
            let is_cob = coboundary_preimage_dense(&a)?.is_some();
            let splits = Extension::new(a)?.find_splitting(1 << 24)?.is_some();
            split.record(is_cob == splits, || format!("{}: coboundary {is_cob}, splits {splits}", e.name));
        }
    }

    Ok(vec![dd, leibniz, routes, h1_sp, class, assoc, split])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::SymplecticSpace;

    fn s3() -> MatrixGroup {
        SymplecticSpace::hyperbolic(1).symplectic_group().unwrap()
    }

    fn f2() -> Prime {
        Prime::TWO
    }

    fn random_cochain(module: &Arc<GroupModule>, degree: usize, seed: u64) -> GroupCochain {
        let p = module.prime().get() as u64;
        GroupCochain::from_fn(module.clone(), degree, |g| {
            let mut h = seed;
            for &x in g {
                h = h.wrapping_mul(6364136223846793005).wrapping_add(x as u64 + 1442695040888963407);
            }
            let entries: Vec<i64> =
                (0..module.dim()).map(|r| ((h >> (8 * r + 13)) % p) as i64).collect();
            FpVector::from_residues(module.prime(), &entries)
        })
        .unwrap()
    }

    /// S₃ acting on F₃ through the sign character.
    fn sign_module_f3() -> Arc<GroupModule> {
        let t = s3().table().unwrap();
        let p = Prime::new(3).unwrap();
        let images: Vec<FpMatrix> = t
            .generator_indices()
            .iter()
            .map(|&s| {
                let sgn = if t.element(s).fixed_subspace_dim() == 1 { 2 } else { 1 };
                FpMatrix::from_rows(p, &[vec![sgn]]).unwrap()
            })
            .collect();
        Arc::new(GroupModule::from_generator_images(t, p, 1, &images).unwrap())
    }

    #[test]
    fn differential_basics() {
        let m = Arc::new(GroupModule::standard(&s3()).unwrap());
        let z = GroupCochain::zero(m.clone(), 1).unwrap();
        assert!(z.differential().unwrap().is_zero());
        let fixed = GroupCochain::constant(m.clone(), FpVector::zeros(f2(), 2)).unwrap();
        assert!(fixed.differential().unwrap().is_zero());
        let v = GroupCochain::constant(m.clone(), FpVector::from_bits(2, 0b01)).unwrap();
        let dv = v.differential().unwrap();
        assert!(!dv.is_zero());
        assert!(dv.differential().unwrap().is_zero());
    }

    #[test]
    fn d_squared_vanishes() {
        let m = Arc::new(GroupModule::standard(&s3()).unwrap());
        for deg in 0..=1 {
            for seed in 0..4 {
                let f = random_cochain(&m, deg, seed);
                assert!(f.differential().unwrap().differential().unwrap().is_zero());
            }
        }
        let m3 = sign_module_f3();
        for deg in 0..=1 {
            let f = random_cochain(&m3, deg, 7);
            assert!(f.differential().unwrap().differential().unwrap().is_zero());
        }
    }

    #[test]
    fn degree_overflow() {
        let m = Arc::new(GroupModule::standard(&s3()).unwrap());
        let f = GroupCochain::zero(m.clone(), 3).unwrap();
        assert_eq!(f.differential().unwrap_err(), Error::UnsupportedDegree(4));
        assert!(GroupCochain::zero(m, 4).is_err());
    }

    #[test]
    fn cup_with_zero_and_character_square() {
        // C₂ = ⟨σ⟩ with trivial F₂ coefficients
        let p = f2();
        let c2 = MatrixGroup::new(p, 2, vec![FpMatrix::from_rows(p, &[vec![0, 1], vec![1, 0]]).unwrap()]).unwrap();
        let t = c2.table().unwrap();
        let triv = Arc::new(GroupModule::trivial(t.clone(), p, 1));
        let chi = GroupCochain::from_fn(triv.clone(), 1, |g| FpVector::from_bits(1, (g[0] != 0) as u64)).unwrap();
        assert!(chi.is_cocycle().unwrap());
        let sq = cup(&chi, &chi, &BilinearMap::multiplication(p), triv.clone()).unwrap();
        assert_eq!(sq.value(&[1, 1]).get(0), 1);
        let zero = GroupCochain::zero(triv.clone(), 1).unwrap();
        assert!(cup(&chi, &zero, &BilinearMap::multiplication(p), triv).unwrap().is_zero());
    }

    fn check_leibniz(a: &GroupCochain, b: &GroupCochain, pairing: &BilinearMap, out: &Arc<GroupModule>) {
        let lhs = cup(a, b, pairing, out.clone()).unwrap().differential().unwrap();
        let t1 = cup(&a.differential().unwrap(), b, pairing, out.clone()).unwrap();
        let t2 = cup(a, &b.differential().unwrap(), pairing, out.clone()).unwrap();
        let sign = if a.degree() % 2 == 1 { out.prime().get() - 1 } else { 1 };
        assert_eq!(lhs, t1.add(&t2.scale(sign)).unwrap());
    }

    #[test]
    fn leibniz_rule() {
        let sp = s3();
        let std = Arc::new(GroupModule::standard(&sp).unwrap());
        let triv = Arc::new(GroupModule::trivial(std.group().clone(), f2(), 1));
        let pairing = BilinearMap::scalar(SymplecticSpace::hyperbolic(1).gram().clone());
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)] {
            let a = random_cochain(&std, i, 3 + i as u64);
            let b = random_cochain(&std, j, 11 + j as u64);
            check_leibniz(&a, &b, &pairing, &triv);
        }
        let sgn = sign_module_f3();
        let p3 = sgn.prime();
        let triv3 = Arc::new(GroupModule::trivial(sgn.group().clone(), p3, 1));
        for (i, j) in [(0, 1), (1, 1), (1, 0), (0, 2), (2, 0)] {
            let a = random_cochain(&sgn, i, 5 + i as u64);
            let b = random_cochain(&sgn, j, 9 + j as u64);
            check_leibniz(&a, &b, &BilinearMap::multiplication(p3), &triv3);
        }
    }

    #[test]
    fn cup_rejects_non_equivariant_pairing() {
        let std = Arc::new(GroupModule::standard(&s3()).unwrap());
        let triv = Arc::new(GroupModule::trivial(std.group().clone(), f2(), 1));
        let a = GroupCochain::zero(std.clone(), 1).unwrap();
        let bad = BilinearMap::scalar(FpMatrix::identity(f2(), 2));
        assert_eq!(cup(&a, &a, &bad, triv).unwrap_err(), Error::NotEquivariant);
    }

    #[test]
    fn coboundary_detection() {
        let std = Arc::new(GroupModule::standard(&s3()).unwrap());
        let m = FpVector::from_bits(2, 0b10);
        let f = GroupCochain::constant(std.clone(), m).unwrap().differential().unwrap();
        let pre = is_coboundary(&f).unwrap().unwrap();
        assert_eq!(GroupCochain::constant(std.clone(), pre).unwrap().differential().unwrap(), f);
        let z = GroupCochain::zero(std.clone(), 1).unwrap();
        assert!(is_coboundary(&z).unwrap().is_some());
        let junk = random_cochain(&std, 1, 1);
        if !junk.is_cocycle().unwrap() {
            assert_eq!(is_coboundary(&junk), Err(Error::NotACocycle));
        }
    }

    #[test]
    fn h1_small_cases() {
        let p2 = f2();
        let trivial = MatrixGroup::trivial(p2, 2);
        let m = GroupModule::standard(&trivial).unwrap();
        assert_eq!(h1_dim(&m).unwrap(), 0);
        // C₂ acting on F₃ by −1
        let p3 = Prime::new(3).unwrap();
        let c2 = MatrixGroup::new(p3, 1, vec![FpMatrix::from_rows(p3, &[vec![2]]).unwrap()]).unwrap();
        let m = Arc::new(GroupModule::standard(&c2).unwrap());
        assert_eq!(h1_dim(&m).unwrap(), 0);
        assert_eq!(h1_dim_dense(&m).unwrap(), 0);
        // C₂ acting trivially on F₂: H¹ = Hom(C₂, F₂)
        let c2f2 = MatrixGroup::new(p2, 2, vec![FpMatrix::from_rows(p2, &[vec![0, 1], vec![1, 0]]).unwrap()]).unwrap();
        let triv = Arc::new(GroupModule::trivial(c2f2.table().unwrap(), p2, 1));
        assert_eq!(h1_dim(&triv).unwrap(), 1);
        assert_eq!(h1_dim_dense(&triv).unwrap(), 1);
    }

    #[test]
    fn h1_routes_agree_on_s3() {
        let std = Arc::new(GroupModule::standard(&s3()).unwrap());
        assert_eq!(h1_dim(&std).unwrap(), h1_dim_dense(&std).unwrap());
        let sgn = sign_module_f3();
        assert_eq!(h1_dim(&sgn).unwrap(), h1_dim_dense(&sgn).unwrap());
        let triv = Arc::new(GroupModule::trivial(std.group().clone(), f2(), 2));
        assert_eq!(h1_dim(&triv).unwrap(), 2);
        assert_eq!(h1_dim_dense(&triv).unwrap(), 2);
    }

    #[test]
    fn invalid_generator_images() {
        let t = s3().table().unwrap();
        let k = t.generator_indices().len();
        assert_eq!(k, 2);
        // conjugate transpositions cannot have different images
        let swap = FpMatrix::from_rows(f2(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let images = vec![swap.clone(), FpMatrix::identity(f2(), 2)];
        assert!(GroupModule::from_generator_images(t.clone(), f2(), 2, &images).is_err());
        assert!(GroupModule::from_generator_images(t, f2(), 2, &[swap.clone(), swap]).is_ok());
    }

    #[test]
    fn extension_laws() {
        let t = s3().table().unwrap();
        let triv = Arc::new(GroupModule::trivial(t.clone(), f2(), 1));
        let zero = Extension::new(GroupCochain::zero(triv.clone(), 2).unwrap()).unwrap();
        let x = zero.element(1, FpVector::from_bits(1, 1));
        let y = zero.element(2, FpVector::from_bits(1, 1));
        let xy = x.multiply(&y).unwrap();
        assert_eq!((xy.g, xy.m.get(0)), (t.mul(1, 2), 0));
        // a nonzero-at-identity cocycle: a = d(constant function 1) with trivial action
        let one = GroupCochain::from_fn(triv.clone(), 1, |_| FpVector::from_bits(1, 1)).unwrap();
        let a = one.differential().unwrap();
        assert_eq!(a.value(&[0, 0]).get(0), 1);
        let ext = Extension::new(a).unwrap();
        let e = ext.identity();
        for z in ext.elements() {
            assert_eq!(e.multiply(&z).unwrap(), z);
            assert_eq!(z.multiply(&e).unwrap(), z);
        }
        let m = FpVector::from_bits(1, 1);
        let em = ext.embed(&m);
        assert_eq!(em.multiply(&ext.embed(&m)).unwrap(), e);
        assert_eq!(x.multiply(&ext.identity()), Err(Error::MismatchedExtensions));
    }

    #[test]
    fn splitting_matches_coboundary() {
        let t = s3().table().unwrap();
        let triv = Arc::new(GroupModule::trivial(t.clone(), f2(), 1));
        let sgn_bit = |g: usize| (t.element(g).fixed_subspace_dim() % 2 == 1) as u64;
        let chi = GroupCochain::from_fn(triv.clone(), 1, |g| FpVector::from_bits(1, sgn_bit(g[0]))).unwrap();
        let chi2 = cup(&chi, &chi, &BilinearMap::multiplication(f2()), triv.clone()).unwrap();
        let cob = GroupCochain::from_fn(triv.clone(), 1, |g| FpVector::from_bits(1, (g[0] % 2) as u64))
            .unwrap()
            .differential()
            .unwrap();
        for a in [chi2, cob, GroupCochain::zero(triv.clone(), 2).unwrap()] {
            let is_cob = coboundary_preimage_dense(&a).unwrap().is_some();
            let ext = Extension::new(a).unwrap();
            assert_eq!(ext.find_splitting(1 << 20).unwrap().is_some(), is_cob);
        }
    }

    #[test]
    fn battery_and_suite() {
        let battery = small_battery().unwrap();
        assert!(battery.len() >= 9);
        assert!(battery.iter().all(|e| e.module.group().order() <= 24));
        for dim in [2, 4] {
            for check in verify_suite(dim).unwrap() {
                assert!(check.passed() && check.cases > 0, "{check}");
            }
        }
    }
}
