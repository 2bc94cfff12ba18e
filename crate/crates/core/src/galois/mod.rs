//! The sign function `ε(σ) = (−1)^{dim T^σ}` on finite images in `GSp(T)`, the
//! even-subsets model of hyperelliptic 2-torsion, and Frobenius sampling.

mod factor;
mod perm;
mod poly;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Mul, Neg};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use factor::{factor_mod, frobenius_cycle_type, primes_in, Frobenius, FrobeniusSampler};
pub use perm::{epsilon_from_cycle_type, CycleType, EvenSubsetModel, Permutation};
pub use poly::{determinant, resultant, IntPolynomial};

use crate::error::{Error, Result};
use crate::gflinalg::{FpMatrix, GroupTable, MatrixGroup};

/// `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(k: usize) -> Sign {
        if k % 2 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Sign::Plus { "+1" } else { "-1" })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Sign, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_i64(v).ok_or_else(|| serde::de::Error::custom(format!("expected 1 or -1, found {v}")))
    }
}

/// `(−1)^{dim ker(σ − 1)}`.
pub fn epsilon(sigma: &FpMatrix) -> Sign {
    Sign::from_parity(sigma.fixed_subspace_dim())
}

/// A finite subgroup of `GSp(T)` for an alternating form on `F_p^{2g}`.
#[derive(Clone, Debug)]
pub struct GaloisImage {
    group: MatrixGroup,
    gram: FpMatrix,
    multipliers: Vec<u32>,
}

impl GaloisImage {
    /// Checks that every generator is a symplectic similitude `σᵀ G σ = λ(σ) G`.
    pub fn new(group: MatrixGroup, gram: FpMatrix) -> Result<Self> {
        let p = group.prime();
        let n = group.dim();
        if gram.prime() != p || !gram.is_square() || gram.nrows() != n {
            return Err(Error::InvalidSymplecticSpace("Gram matrix does not match the group".into()));
        }
        let alternating = (0..n).all(|i| gram.get(i, i) == 0) && gram.add(&gram.transpose()).is_zero();
        if !alternating || gram.rank() != n {
            return Err(Error::InvalidSymplecticSpace("pairing must be alternating and nondegenerate".into()));
        }
        for g in group.generators() {
            multiplier(&gram, g)?;
        }
        let table = group.table()?;
        let multipliers = table.elements().iter().map(|g| multiplier(&gram, g)).collect::<Result<_>>()?;
        Ok(GaloisImage { group, gram, multipliers })
    }

    pub fn group(&self) -> &MatrixGroup {
        &self.group
    }

    pub fn gram(&self) -> &FpMatrix {
        &self.gram
    }

    pub fn table(&self) -> Result<std::sync::Arc<GroupTable>> {
        self.group.table()
    }

    /// `λ(σ)` for the element with index `i`.
    pub fn multiplier(&self, i: usize) -> u32 {
        self.multipliers[i]
    }

    pub fn epsilons(&self) -> Result<Vec<Sign>> {
        Ok(self.table()?.elements().par_iter().map(epsilon).collect())
    }

    /// For `p = 2`: whether `ε` is a homomorphism, with kernel or a witness pair.
    /// For odd `p`: whether `ε` is trivial on the multiplier-one subgroup.
    pub fn classify(&self) -> Result<EpsilonClassification> {
        let table = self.table()?;
        let eps = self.epsilons()?;
        if self.group.prime().is_two() {
            if let Some((g, h)) = homomorphism_witness(&table, &eps) {
                return Ok(EpsilonClassification::NotHomomorphism { witness: (g, h) });
            }
            let kernel: Vec<usize> = (0..table.order()).filter(|&i| eps[i] == Sign::Plus).collect();
            if kernel.len() == table.order() {
                Ok(EpsilonClassification::HomomorphismTrivial)
            } else {
                Ok(EpsilonClassification::HomomorphismNontrivial { kernel })
            }
        } else {
            let witness = (0..table.order()).find(|&i| self.multipliers[i] == 1 && eps[i] == Sign::Minus);
            Ok(match witness {
                Some(w) => EpsilonClassification::NontrivialOnSp { witness: w },
                None => EpsilonClassification::TrivialOnSp,
            })
        }
    }

    /// `(S generates G/G² × {±1}, ε is not a homomorphism)` for `p = 2`, where
    /// `S = {(σ G², ε(σ))}` and `G²` is generated by squares.
    pub fn theta_criterion(&self) -> Result<ThetaReport> {
        if !self.group.prime().is_two() {
            return Err(Error::InvalidArgument("the surjectivity criterion is stated for p = 2".into()));
        }
        let table = self.table()?;
        let n = table.order();
        let eps = self.epsilons()?;
        let mut squares: Vec<usize> = (0..n).map(|g| table.mul_uncached(g, g)).collect();
        squares.sort_unstable();
        squares.dedup();
        let g2 = subgroup_uncached(&table, &squares);
        // coset labels of G²
        let mut coset = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &h in &g2 {
                coset[table.mul_uncached(g, h)] = id;
            }
        }
        let quotient = reps.len();
        let mut s: Vec<(usize, Sign)> = (0..n).map(|g| (coset[g], eps[g])).collect();
        s.sort_unstable();
        s.dedup();
        let mut reached: HashMap<(usize, Sign), ()> = s.iter().map(|&x| (x, ())).collect();
        let mut frontier = s.clone();
        while let Some((c, e)) = frontier.pop() {
            for &(c2, e2) in &s {
                let next = (coset[table.mul_uncached(reps[c], reps[c2])], e * e2);
                if reached.insert(next, ()).is_none() {
                    frontier.push(next);
                }
            }
        }
        let generates = reached.len() == 2 * quotient;
        let not_hom = homomorphism_witness(&table, &eps).is_some();
        Ok(ThetaReport { quotient_order: quotient, generated: reached.len(), generates, eps_not_homomorphism: not_hom })
    }
}

fn subgroup_uncached(table: &GroupTable, gens: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; table.order()];
    seen[0] = true;
    let mut out = vec![0];
    let mut queue = vec![0];
    while let Some(i) = queue.pop() {
        for &s in gens {
            let j = table.mul_uncached(i, s);
            if !seen[j] {
                seen[j] = true;
                out.push(j);
                queue.push(j);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `λ` with `σᵀ G σ = λ G`.
fn multiplier(gram: &FpMatrix, sigma: &FpMatrix) -> Result<u32> {
    let p = gram.prime();
    let lhs = sigma.transpose().mul(gram).mul(sigma);
    let (i, j) = (0..gram.nrows())
        .flat_map(|i| (0..gram.ncols()).map(move |j| (i, j)))
        .find(|&(i, j)| gram.get(i, j) != 0)
        .ok_or(Error::NotSymplectic)?;
    let lambda = lhs.get(i, j) * p.inv(gram.get(i, j)) % p.get();
    if lambda == 0 || lhs != gram.scale(lambda) {
        return Err(Error::NotSymplectic);
    }
    Ok(lambda)
}

/// A pair `(g, s)` with `s` a generator and `ε(gs) ≠ ε(g)ε(s)`; none exists exactly
/// when `ε` is a homomorphism.
fn homomorphism_witness(table: &GroupTable, eps: &[Sign]) -> Option<(usize, usize)> {
    let gens = table.generator_indices();
    (0..table.order())
        .into_par_iter()
        .find_map_first(|g| {
            let x = table.element(g);
            gens.iter().find(|&&s| epsilon(&x.mul(table.element(s))) != eps[g] * eps[s]).map(|&s| (g, s))
        })
}

/// Outcome of [`GaloisImage::classify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum EpsilonClassification {
    HomomorphismTrivial,
    /// `kernel` lists element indices; it has index 2.
    HomomorphismNontrivial { kernel: Vec<usize> },
    NotHomomorphism { witness: (usize, usize) },
    TrivialOnSp,
    NontrivialOnSp { witness: usize },
}

impl EpsilonClassification {
    pub fn is_homomorphism(&self) -> Option<bool> {
        match self {
            EpsilonClassification::HomomorphismTrivial | EpsilonClassification::HomomorphismNontrivial { .. } => Some(true),
            EpsilonClassification::NotHomomorphism { .. } => Some(false),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EpsilonClassification::HomomorphismTrivial => "HomomorphismTrivial",
            EpsilonClassification::HomomorphismNontrivial { .. } => "HomomorphismNontrivial",
            EpsilonClassification::NotHomomorphism { .. } => "NotHomomorphism",
            EpsilonClassification::TrivialOnSp => "TrivialOnSp",
            EpsilonClassification::NontrivialOnSp { .. } => "NontrivialOnSp",
        }
    }
}

/// Outcome of [`GaloisImage::theta_criterion`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    /// `|G/G²|`.
    pub quotient_order: usize,
    /// Size of the subgroup of `G/G² × {±1}` generated by `S`.
    pub generated: usize,
    pub generates: bool,
    pub eps_not_homomorphism: bool,
}

impl ThetaReport {
    pub fn consistent(&self) -> bool {
        self.generates == self.eps_not_homomorphism
    }
}

/// `S_n` acting on the 2-torsion of the Jacobian of `y² = f(x)`, `deg f = n ≥ 5`,
/// through the even-subsets model.
pub fn hyperelliptic_rep(n: usize) -> Result<GaloisImage> {
    hyperelliptic_image(n, GroupGuess::Symmetric)
}

/// [`hyperelliptic_rep`] for `S_n` or `A_n`.
pub fn hyperelliptic_image(n: usize, group: GroupGuess) -> Result<GaloisImage> {
    if n < 5 {
        return Err(Error::InvalidArgument(format!("the hyperelliptic model needs degree >= 5, got {n}")));
    }
    let model = EvenSubsetModel::new(n)?;
    let image = match group {
        GroupGuess::Symmetric => model.symmetric_image()?,
        GroupGuess::Alternating => model.alternating_image()?,
    };
    GaloisImage::new(image, model.space().gram().clone())
}

/// Which full group a set of Frobenius cycle types looks like; a heuristic only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupGuess {
    Symmetric,
    Alternating,
}

/// Guess `S_n` when some sampled Frobenius is odd, else `A_n`.
pub fn guess_group(samples: &[CycleType]) -> GroupGuess {
    if samples.iter().any(|c| c.sign() == Sign::Minus) {
        GroupGuess::Symmetric
    } else {
        GroupGuess::Alternating
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gflinalg::{FpVector, Prime};
    use crate::quadform::{QuadraticRefinement, SymplecticSpace};
    use std::sync::Arc;

    fn sp4() -> (Arc<SymplecticSpace>, MatrixGroup) {
        let s = Arc::new(SymplecticSpace::hyperbolic(2));
        let g = s.symplectic_group().unwrap();
        (s, g)
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(&FpMatrix::identity(Prime::TWO, 4)), Sign::Plus);
        let (s, _) = sp4();
        let t = s.transvection(&FpVector::from_bits(4, 0b0101)).unwrap();
        assert_eq!(epsilon(&t), Sign::Minus);
        // p = 3: v ↦ v + β(v, w) w on F₃² with β the standard form
        let p3 = Prime::new(3).unwrap();
        let t3 = FpMatrix::from_rows(p3, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(epsilon(&t3), Sign::Minus);
    }

    #[test]
    fn classify_sp4_and_orthogonal() {
        let (s, sp) = sp4();
        let gi = GaloisImage::new(sp.clone(), s.gram().clone()).unwrap();
        let c = gi.classify().unwrap();
        assert_eq!(c.is_homomorphism(), Some(false));
        if let EpsilonClassification::NotHomomorphism { witness: (g, h) } = c {
            let t = gi.table().unwrap();
            assert_ne!(epsilon(t.element(t.mul(g, h))), epsilon(t.element(g)) * epsilon(t.element(h)));
        }
        for q in QuadraticRefinement::all(s.clone()).step_by(5) {
            let o = q.orthogonal_group(&sp).unwrap();
            let gi = GaloisImage::new(o, s.gram().clone()).unwrap();
            let table = gi.table().unwrap();
            match gi.classify().unwrap() {
                EpsilonClassification::HomomorphismNontrivial { kernel } => {
                    assert_eq!(2 * kernel.len(), table.order());
                    for &k in &kernel {
                        assert_eq!(q.dickson(table.element(k)).unwrap(), 0);
                    }
                }
                other => panic!("unexpected {other:?}"),
            }
        }
        let trivial = GaloisImage::new(MatrixGroup::trivial(Prime::TWO, 4), s.gram().clone()).unwrap();
        assert_eq!(trivial.classify().unwrap(), EpsilonClassification::HomomorphismTrivial);
    }

    #[test]
    fn classify_odd_prime() {
        let p3 = Prime::new(3).unwrap();
        let gram = FpMatrix::from_rows(p3, &[vec![0, 1], vec![2, 0]]).unwrap();
        let t = FpMatrix::from_rows(p3, &[vec![1, 1], vec![0, 1]]).unwrap();
        let scale = FpMatrix::from_rows(p3, &[vec![1, 0], vec![0, 2]]).unwrap();
        let g = MatrixGroup::new(p3, 2, vec![t, scale.clone()]).unwrap();
        let gi = GaloisImage::new(g, gram.clone()).unwrap();
        assert!(matches!(gi.classify().unwrap(), EpsilonClassification::NontrivialOnSp { .. }));
        // ⟨diag(1, 2)⟩ has multiplier 2 off the identity, so H is trivial
        let d = GaloisImage::new(MatrixGroup::new(p3, 2, vec![scale]).unwrap(), gram.clone()).unwrap();
        assert_eq!(d.multiplier(1), 2);
        assert_eq!(d.classify().unwrap(), EpsilonClassification::TrivialOnSp);
        let p3_4 = FpMatrix::from_rows(p3, &[vec![0, 1, 0, 0], vec![2, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 2, 0]]).unwrap();
        let skew = FpMatrix::from_rows(p3, &[vec![1, 0, 0, 0], vec![0, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        let bad_group = MatrixGroup::new(p3, 4, vec![skew]).unwrap();
        assert!(matches!(GaloisImage::new(bad_group, p3_4), Err(Error::NotSymplectic)));
    }

    #[test]
    fn theta_examples() {
        let model = EvenSubsetModel::new(6).unwrap();
        let s6 = GaloisImage::new(model.symmetric_image().unwrap(), model.space().gram().clone()).unwrap();
        let r = s6.theta_criterion().unwrap();
        assert!(r.generates && r.eps_not_homomorphism);
        let (s, sp) = sp4();
        let q = QuadraticRefinement::new(s.clone(), 0b0011);
        let o = GaloisImage::new(q.orthogonal_group(&sp).unwrap(), s.gram().clone()).unwrap();
        let r = o.theta_criterion().unwrap();
        assert!(!r.generates && !r.eps_not_homomorphism);
        assert_eq!(r.generated, r.quotient_order);
        let t = GaloisImage::new(MatrixGroup::trivial(Prime::TWO, 4), s.gram().clone()).unwrap();
        let r = t.theta_criterion().unwrap();
        assert!(!r.generates && !r.eps_not_homomorphism);
    }

    #[test]
    fn hyperelliptic_images() {
        let s5 = hyperelliptic_rep(5).unwrap();
        assert_eq!(s5.table().unwrap().order(), 120);
        assert!(matches!(s5.classify().unwrap(), EpsilonClassification::HomomorphismNontrivial { .. }));
        let a6 = hyperelliptic_image(6, GroupGuess::Alternating).unwrap();
        assert_eq!(a6.table().unwrap().order(), 360);
        assert!(hyperelliptic_rep(4).is_err());
    }

    #[test]
    fn group_guess() {
        let odd = CycleType::new(vec![2, 1, 1, 1, 1]);
        let even = CycleType::new(vec![3, 1, 1, 1]);
        assert_eq!(guess_group(&[even.clone(), odd]), GroupGuess::Symmetric);
        assert_eq!(guess_group(&[even]), GroupGuess::Alternating);
    }
}
