use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::Sign;
use crate::error::{Error, Result};
use crate::gflinalg::{FpMatrix, FpVector, MatrixGroup, Prime};
use crate::quadform::SymplecticSpace;

/// A permutation of `{0, …, n−1}`; `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// The cycle `(c_0 c_1 … c_k)` on `n` points.
    pub fn cycle(n: usize, points: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for (k, &a) in points.iter().enumerate() {
            if a >= n {
                return Err(Error::InvalidArgument(format!("point {a} outside 0..{n}")));
            }
            images[a] = points[(k + 1) % points.len()];
        }
        Permutation::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    /// Image of a subset given as a bit mask.
    pub fn apply_mask(&self, mask: u64) -> u64 {
        (0..self.degree()).filter(|&i| mask >> i & 1 == 1).fold(0, |acc, i| acc | 1 << self.images[i])
    }

    pub fn cycle_type(&self) -> CycleType {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            lengths.push(len);
        }
        CycleType::new(lengths)
    }

    pub fn sign(&self) -> Sign {
        self.cycle_type().sign()
    }

    /// All `n!` permutations in lexicographic order of their image lists.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some((0..n).collect::<Vec<usize>>());
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut a = current.clone();
            if let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) {
                let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).expect("successor exists");
                a.swap(i - 1, j);
                a[i..].reverse();
                next = Some(a);
            }
            Some(Permutation { images: current })
        })
    }
}

/// Multiset of cycle lengths, sorted in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    lengths: Vec<usize>,
}

impl CycleType {
    pub fn new(mut lengths: Vec<usize>) -> Self {
        lengths.retain(|&d| d > 0);
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { lengths }
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn degree(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// `(−1)^{Σ(d_i − 1)}`.
    pub fn sign(&self) -> Sign {
        Sign::from_parity(self.lengths.iter().map(|d| d - 1).sum::<usize>())
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lengths.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("-"))
    }
}

impl Serialize for CycleType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for CycleType {
    type Err = Error;

    /// Parses dash- or comma-separated lengths, optionally in parentheses: `"4-2"`, `"(2,1,1,1)"`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let lengths = inner
            .split(|c: char| c == '-' || c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().ok().filter(|&d| d > 0))
            .collect::<Option<Vec<usize>>>()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| Error::InvalidCycleType(s.to_string()))?;
        Ok(CycleType::new(lengths))
    }
}

/// `ε` of an element of `Gal(f) ⊆ S_n` acting on the 2-torsion of the Jacobian of
/// `y² = f(x)`: `−sgn` when every cycle length is even and `n ≡ 2 (mod 4)`, else `sgn`.
pub fn epsilon_from_cycle_type(ct: &CycleType, n: usize) -> Result<Sign> {
    if ct.degree() != n {
        return Err(Error::InvalidCycleType(format!("{ct} does not partition {n}")));
    }
    let sgn = ct.sign();
    if n % 4 == 2 && ct.lengths.iter().all(|d| d % 2 == 0) {
        Ok(-sgn)
    } else {
        Ok(sgn)
    }
}

/// Even-cardinality subsets of `{0, …, n−1}` modulo the full set (when `n` is even),
/// with the intersection-parity pairing.
#[derive(Clone, Debug)]
pub struct EvenSubsetModel {
    n: usize,
    basis: Vec<u64>,
    space: SymplecticSpace,
    /// Columns: basis masks, then the full set when `n` is even.
    solver: FpMatrix,
}

fn mask_vector(n: usize, mask: u64) -> FpVector {
    FpVector::from_bits(n, mask)
}

impl EvenSubsetModel {
    /// `n ≥ 3`, `n ≤ 20`. The basis is chosen greedily in increasing mask order.
    pub fn new(n: usize) -> Result<Self> {
        if !(3..=20).contains(&n) {
            return Err(Error::InvalidArgument(format!("even-subset model needs 3 <= n <= 20, got {n}")));
        }
        let g = (n - 1) / 2;
        let full: u64 = (1 << n) - 1;
        let mut basis: Vec<u64> = Vec::with_capacity(2 * g);
        // xor basis of the span so far, including the full set for even n
        let mut reduced: Vec<u64> = Vec::new();
        let insert = |reduced: &mut Vec<u64>, mut m: u64| -> bool {
            for &r in reduced.iter() {
                m = m.min(m ^ r);
            }
            if m == 0 {
                return false;
            }
            reduced.push(m);
            reduced.sort_unstable_by(|a, b| b.cmp(a));
            true
        };
        if n % 2 == 0 {
            insert(&mut reduced, full);
        }
        for m in 1..full {
            if basis.len() == 2 * g {
                break;
            }
            if m.count_ones() % 2 == 0 && insert(&mut reduced, m) {
                basis.push(m);
            }
        }
        let mut gram = FpMatrix::zeros(Prime::TWO, 2 * g, 2 * g);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                gram.set(i, j, (a & b).count_ones() % 2);
            }
        }
        let space = SymplecticSpace::new(gram)?;
        let mut cols: Vec<FpVector> = basis.iter().map(|&m| mask_vector(n, m)).collect();
        if n % 2 == 0 {
            cols.push(mask_vector(n, full));
        }
        let solver = FpMatrix::from_columns(Prime::TWO, n, &cols);
        Ok(EvenSubsetModel { n, basis, space, solver })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn genus(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    /// Coordinates of an even subset in the chosen basis.
    pub fn coordinates(&self, mask: u64) -> Result<FpVector> {
        if mask.count_ones() % 2 == 1 || mask >> self.n != 0 {
            return Err(Error::InvalidArgument(format!("{mask:b} is not an even subset of {} points", self.n)));
        }
        let x = self.solver.solve(&mask_vector(self.n, mask))?.expect("even subsets lie in the span");
        Ok(x.slice(0, self.basis.len()))
    }

    /// Matrix of the induced action of a permutation.
    pub fn matrix_of(&self, perm: &Permutation) -> Result<FpMatrix> {
        if perm.degree() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: perm.degree() });
        }
        let cols: Vec<FpVector> =
            self.basis.iter().map(|&m| self.coordinates(perm.apply_mask(m))).collect::<Result<_>>()?;
        Ok(FpMatrix::from_columns(Prime::TWO, self.basis.len(), &cols))
    }

    /// The image of `S_n`, generated by `(0 1)` and `(0 1 … n−1)`.
    pub fn symmetric_image(&self) -> Result<MatrixGroup> {
        let gens = vec![Permutation::cycle(self.n, &[0, 1])?, Permutation::cycle(self.n, &(0..self.n).collect::<Vec<_>>())?];
        self.image(&gens, vec![Some("(1 2)".into()), Some(format!("(1 .. {})", self.n))])
    }

    /// The image of `A_n`, generated by the 3-cycles `(0 1 i)`.
    pub fn alternating_image(&self) -> Result<MatrixGroup> {
        let gens: Vec<Permutation> = (2..self.n).map(|i| Permutation::cycle(self.n, &[0, 1, i])).collect::<Result<_>>()?;
        let labels = (2..self.n).map(|i| Some(format!("(1 2 {})", i + 1))).collect();
        self.image(&gens, labels)
    }

    fn image(&self, gens: &[Permutation], labels: Vec<Option<String>>) -> Result<MatrixGroup> {
        let mats = gens.iter().map(|g| self.matrix_of(g)).collect::<Result<_>>()?;
        MatrixGroup::new(Prime::TWO, self.basis.len(), mats)?.with_labels(labels)
    }
}
