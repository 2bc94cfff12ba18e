use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use once_cell::sync::OnceCell;
use rayon::prelude::*;

use super::matrix::FpMatrix;
use super::vector::Prime;
use crate::error::{Error, Result};

/// Default cap on the number of elements materialized by [`MatrixGroup::table`].
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// Groups up to this order get a precomputed multiplication table.
const MUL_TABLE_CAP: usize = 4096;

/// A finite matrix group given by generators; its elements are enumerated lazily.
#[derive(Debug)]
pub struct MatrixGroup {
    p: Prime,
    dim: usize,
    generators: Vec<FpMatrix>,
    labels: Vec<Option<String>>,
    cap: usize,
    table: OnceCell<Arc<GroupTable>>,
}

impl Clone for MatrixGroup {
    fn clone(&self) -> Self {
        MatrixGroup {
            p: self.p,
            dim: self.dim,
            generators: self.generators.clone(),
            labels: self.labels.clone(),
            cap: self.cap,
            table: self.table.clone(),
        }
    }
}

impl MatrixGroup {
    /// A group generated by invertible `dim × dim` matrices over `F_p`.
    pub fn new(p: Prime, dim: usize, generators: Vec<FpMatrix>) -> Result<Self> {
        for g in &generators {
            if g.prime() != p {
                return Err(Error::InvalidArgument("generator over a different field".into()));
            }
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.nrows().max(g.ncols()) });
            }
            if !g.is_invertible() {
                return Err(Error::NotInvertible);
            }
        }
        let labels = vec![None; generators.len()];
        Ok(MatrixGroup { p, dim, generators, labels, cap: DEFAULT_CLOSURE_CAP, table: OnceCell::new() })
    }

    pub fn trivial(p: Prime, dim: usize) -> Self {
        MatrixGroup::new(p, dim, Vec::new()).expect("empty generator list is valid")
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Result<Self> {
        if labels.len() != self.generators.len() {
            return Err(Error::DimensionMismatch { expected: self.generators.len(), found: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self.table = OnceCell::new();
        self
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[FpMatrix] {
        &self.generators
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Enumerate the group (breadth-first, right-multiplying by generators in order).
    pub fn table(&self) -> Result<Arc<GroupTable>> {
        self.table
            .get_or_try_init(|| GroupTable::build(self.p, self.dim, &self.generators, self.cap).map(Arc::new))
            .cloned()
    }

    /// All elements in deterministic breadth-first order; the identity comes first.
    pub fn closure(&self) -> Result<Vec<FpMatrix>> {
        Ok(self.table()?.elements().to_vec())
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.table()?.order())
    }

    pub fn contains(&self, m: &FpMatrix) -> Result<bool> {
        Ok(self.table()?.index_of(m).is_some())
    }

    /// The subgroup generated by `elements`, with a generating set chosen greedily:
    /// an element becomes a generator only if it is not already in the span of the
    /// earlier ones.
    pub fn generated_by(p: Prime, dim: usize, elements: &[FpMatrix], cap: usize) -> Result<MatrixGroup> {
        let mut gens: Vec<FpMatrix> = Vec::new();
        let mut span: HashSet<FpMatrix> = HashSet::from([FpMatrix::identity(p, dim)]);
        for e in elements {
            if span.contains(e) {
                continue;
            }
            gens.push(e.clone());
            let t = GroupTable::build(p, dim, &gens, cap)?;
            span = t.elements.iter().cloned().collect();
        }
        let g = MatrixGroup::new(p, dim, gens)?.with_cap(cap);
        Ok(g)
    }

    /// Same group, generated by a greedily reduced subset of its elements.
    pub fn reduce_generators(&self) -> Result<MatrixGroup> {
        let t = self.table()?;
        MatrixGroup::generated_by(self.p, self.dim, &self.generators, self.cap).map(|g| {
            debug_assert_eq!(g.order().ok(), Some(t.order()));
            g
        })
    }

    /// `g H g⁻¹` with conjugated generators.
    pub fn conjugate(&self, g: &FpMatrix) -> Result<MatrixGroup> {
        let inv = g.inverse().ok_or(Error::NotInvertible)?;
        let gens = self.generators.iter().map(|h| g.mul(h).mul(&inv)).collect();
        Ok(MatrixGroup::new(self.p, self.dim, gens)?.with_cap(self.cap))
    }
}

/// The enumerated elements of a [`MatrixGroup`] with index-based arithmetic.
#[derive(Debug)]
pub struct GroupTable {
    p: Prime,
    dim: usize,
    elements: Vec<FpMatrix>,
    index: HashMap<FpMatrix, usize>,
    generators: Vec<usize>,
    /// For each element other than the identity: `(parent, generator position)` with
    /// `element = parent · generator` along the BFS tree.
    parent: Vec<Option<(usize, usize)>>,
    mul: OnceCell<Vec<u32>>,
    inv: OnceCell<Vec<u32>>,
}

impl GroupTable {
    fn build(p: Prime, dim: usize, generators: &[FpMatrix], cap: usize) -> Result<Self> {
        let id = FpMatrix::identity(p, dim);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut parent = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (k, s) in generators.iter().enumerate() {
                let h = elements[i].mul(s);
                if index.contains_key(&h) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::SizeLimit(cap));
                }
                let j = elements.len();
                index.insert(h.clone(), j);
                elements.push(h);
                parent.push(Some((i, k)));
                queue.push_back(j);
            }
        }
        let generators = generators.iter().map(|g| index[g]).collect();
        Ok(GroupTable { p, dim, elements, index, generators, parent, mul: OnceCell::new(), inv: OnceCell::new() })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[FpMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &FpMatrix {
        &self.elements[i]
    }

    pub fn index_of(&self, m: &FpMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub const fn identity(&self) -> usize {
        0
    }

    /// Indices of the generators, in the order they were given.
    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    /// BFS tree edge into element `i`: `(parent, generator position)`.
    pub fn parent(&self, i: usize) -> Option<(usize, usize)> {
        self.parent[i]
    }

    fn mul_table(&self) -> Option<&[u32]> {
        if self.order() > MUL_TABLE_CAP {
            return None;
        }
        let n = self.order();
        let table = self.mul.get_or_init(|| {
            let mut t = vec![0u32; n * n];
            t.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = self.index[&self.elements[i].mul(&self.elements[j])] as u32;
                }
            });
            t
        });
        Some(table)
    }

    /// Index of the product `elements[i] · elements[j]`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        match self.mul_table() {
            Some(t) => t[i * self.order() + j] as usize,
            None => self.index[&self.elements[i].mul(&self.elements[j])],
        }
    }

    /// Like [`GroupTable::mul`] but never builds the full multiplication table.
    pub fn mul_uncached(&self, i: usize, j: usize) -> usize {
        match self.mul.get() {
            Some(t) => t[i * self.order() + j] as usize,
            None => self.index[&self.elements[i].mul(&self.elements[j])],
        }
    }

    pub fn inverse(&self, i: usize) -> usize {
        let inv = self.inv.get_or_init(|| {
            self.elements
                .iter()
                .map(|m| self.index[&m.inverse().expect("group elements are invertible")] as u32)
                .collect()
        });
        inv[i] as usize
    }

    /// Index of the product of a sequence of elements (identity for an empty slice).
    pub fn product(&self, items: &[usize]) -> usize {
        items.iter().fold(self.identity(), |acc, &g| self.mul(acc, g))
    }

    /// Subgroup generated by the given element indices, as a sorted index list.
    pub fn subgroup_indices(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity()] = true;
        let mut out = vec![self.identity()];
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(i) = queue.pop_front() {
            for &s in gens {
                let j = self.mul(i, s);
                if !seen[j] {
                    seen[j] = true;
                    out.push(j);
                    queue.push_back(j);
                }
            }
        }
        out.sort_unstable();
        out
    }
}
