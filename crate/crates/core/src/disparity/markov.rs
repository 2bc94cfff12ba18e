use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ser_ratio, ser_ratios};
use crate::error::{Error, Result};
use crate::galois::Sign;

/// Largest index set `p^r` a run will allocate.
pub const MAX_STATES: usize = 1 << 16;

/// A Frobenius class: its sign, the exponent tuple `ρ(σ) ∈ (Z/p)^r`, and its density.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusClassDatum {
    pub label: String,
    pub epsilon: Sign,
    pub rho: Vec<u32>,
    #[serde(serialize_with = "ser_ratio")]
    pub weight: BigRational,
}

/// A validated class file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovClassFile {
    pub p: u32,
    pub r: usize,
    pub classes: Vec<FrobeniusClassDatum>,
    pub initial: Option<Vec<BigRational>>,
    pub sequence: Option<Vec<String>>,
}

impl MarkovClassFile {
    pub fn new(p: u32, r: usize, classes: Vec<FrobeniusClassDatum>) -> Result<Self> {
        let f = MarkovClassFile { p, r, classes, initial: None, sequence: None };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let (p, r) = (self.p, self.r);
        check_dims(p, r)?;
        if self.classes.is_empty() {
            return Err(Error::InvalidMarkov("no classes".into()));
        }
        let mut labels = std::collections::HashSet::new();
        for c in &self.classes {
            if !labels.insert(c.label.as_str()) {
                return Err(Error::InvalidMarkov(format!("duplicate class label {}", c.label)));
            }
            if c.rho.len() != r {
                return Err(Error::InvalidMarkov(format!("class {}: rho has {} entries, expected r = {r}", c.label, c.rho.len())));
            }
            if let Some(&bad) = c.rho.iter().find(|&&x| x >= p) {
                return Err(Error::InvalidMarkov(format!("class {}: rho entry {bad} is not in 0..{p}", c.label)));
            }
            if c.weight.is_negative() {
                return Err(Error::InvalidMarkov(format!("class {}: negative weight", c.label)));
            }
        }
        let total: BigRational = self.classes.iter().map(|c| c.weight.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidMarkov(format!("weights sum to {}, not 1", super::ratio_string(&total))));
        }
        if let Some(v) = &self.initial {
            if v.len() != states(p, r) {
                return Err(Error::InvalidMarkov(format!("initial vector has {} entries, expected {}", v.len(), states(p, r))));
            }
        }
        if let Some(seq) = &self.sequence {
            if let Some(bad) = seq.iter().find(|l| !labels.contains(l.as_str())) {
                return Err(Error::InvalidMarkov(format!("sequence names unknown class {bad}")));
            }
        }
        Ok(())
    }

    pub fn class(&self, label: &str) -> Option<&FrobeniusClassDatum> {
        self.classes.iter().find(|c| c.label == label)
    }

    /// The file's initial vector, or `1/2` in every coordinate.
    pub fn initial_state(&self) -> Result<MarkovState> {
        let v = self
            .initial
            .clone()
            .unwrap_or_else(|| vec![BigRational::new(BigInt::one(), BigInt::from(2)); states(self.p, self.r)]);
        MarkovState::new(self.p, self.r, v)
    }
}

fn check_dims(p: u32, r: usize) -> Result<()> {
    let prime = p >= 3 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
    if !prime {
        return Err(Error::InvalidMarkov(format!("p = {p} must be an odd prime")));
    }
    let n = (p as usize).checked_pow(r as u32).filter(|&n| n <= MAX_STATES);
    if n.is_none() {
        return Err(Error::InvalidMarkov(format!("p^r = {p}^{r} exceeds {MAX_STATES} states")));
    }
    Ok(())
}

fn states(p: u32, r: usize) -> usize {
    (p as usize).pow(r as u32)
}

/// Index of `η + k·ρ` where indices encode exponent tuples in base `p`, first coordinate least significant.
fn translate(index: usize, rho: &[u32], k: u32, p: u32) -> usize {
    let p = p as usize;
    let mut out = 0;
    let mut place = 1;
    let mut rest = index;
    for &x in rho {
        let digit = (rest % p + k as usize * x as usize) % p;
        out += digit * place;
        place *= p;
        rest /= p;
    }
    out
}

/// A dense square matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: Vec<Vec<BigRational>>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        RatMatrix { rows: vec![vec![BigRational::zero(); n]; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n);
        for i in 0..n {
            m.rows[i][i] = BigRational::one();
        }
        m
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        let n = self.size();
        let mut out = RatMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !other.rows[k][j].is_zero() {
                        out.rows[i][j] += a * &other.rows[k][j];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> RatMatrix {
        RatMatrix { rows: self.rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        RatMatrix {
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect(),
        }
    }

    /// `M^m` by repeated multiplication.
    pub fn iterated_power(&self, m: u32) -> RatMatrix {
        (0..m).fold(RatMatrix::identity(self.size()), |acc, _| acc.mul(self))
    }

    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

/// `M(σ) = (1/p)(1 + ε Σ_{i=1}^{p−1} ρ^i)` on the basis `{e_η}`, `ρ` translating `η` by `ρ(σ)`.
pub fn markov_matrix(class: &FrobeniusClassDatum, p: u32, r: usize) -> Result<RatMatrix> {
    check_dims(p, r)?;
    if class.rho.len() != r {
        return Err(Error::InvalidMarkov(format!("rho has {} entries, expected {r}", class.rho.len())));
    }
    let n = states(p, r);
    let inv_p = BigRational::new(BigInt::one(), BigInt::from(p));
    let off = if class.epsilon == Sign::Plus { inv_p.clone() } else { -inv_p.clone() };
    let mut m = RatMatrix::zeros(n);
    for eta in 0..n {
        m.rows[eta][eta] += &inv_p;
        for i in 1..p {
            m.rows[translate(eta, &class.rho, i, p)][eta] += &off;
        }
    }
    Ok(m)
}

/// `M(σ)^m` in closed form: `M` itself when `ε = +1`, otherwise
/// `(2/p·s^m − s·(2/p)^m)·id + ((2/p)^m − s^m)·M` with `s = (2−p)/p`.
pub fn markov_power_closed_form(class: &FrobeniusClassDatum, p: u32, r: usize, m: u32) -> Result<RatMatrix> {
    let base = markov_matrix(class, p, r)?;
    if m == 0 {
        return Ok(RatMatrix::identity(base.size()));
    }
    if class.epsilon == Sign::Plus {
        return Ok(base);
    }
    let (t, s) = two_eigenvalues(p);
    let tm = pow(&t, m);
    let sm = pow(&s, m);
    let a = &t * &sm - &s * &tm;
    let b = tm - sm;
    Ok(RatMatrix::identity(base.size()).scale(&a).add(&base.scale(&b)))
}

/// `(2/p, (2−p)/p)`.
fn two_eigenvalues(p: u32) -> (BigRational, BigRational) {
    let p = BigInt::from(p);
    (BigRational::new(BigInt::from(2), p.clone()), BigRational::new(BigInt::from(2) - &p, p))
}

fn pow(x: &BigRational, m: u32) -> BigRational {
    (0..m).fold(BigRational::one(), |acc, _| acc * x)
}

/// `‖M(σ)^m‖²` for the operator norm: `1` when `ε = +1`; for `ε = −1`, `((p−2)/p)^{2m}`
/// when `ρ(σ) = 0` and `max(2/p, (p−2)/p)^{2m}` otherwise.
pub fn markov_power_norm_squared(class: &FrobeniusClassDatum, p: u32, m: u32) -> BigRational {
    if class.epsilon == Sign::Plus || m == 0 {
        return BigRational::one();
    }
    let (t, s) = two_eigenvalues(p);
    let s = s.abs();
    let top = if class.rho.iter().all(|&x| x == 0) { s } else { t.max(s) };
    pow(&(&top * &top), m)
}

/// `t̂_n` with its history of squared Euclidean norms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkovState {
    pub p: u32,
    pub r: usize,
    #[serde(serialize_with = "ser_ratios")]
    pub vector: Vec<BigRational>,
    #[serde(serialize_with = "ser_ratios")]
    pub history: Vec<BigRational>,
}

impl MarkovState {
    pub fn new(p: u32, r: usize, vector: Vec<BigRational>) -> Result<Self> {
        check_dims(p, r)?;
        if vector.len() != states(p, r) {
            return Err(Error::InvalidMarkov(format!("vector has {} entries, expected {}", vector.len(), states(p, r))));
        }
        let n = norm_squared(&vector);
        Ok(MarkovState { p, r, vector, history: vec![n] })
    }

    pub fn norm_squared(&self) -> BigRational {
        norm_squared(&self.vector)
    }

    /// `t̂ ← M(σ) t̂`, without materializing `M(σ)`.
    pub fn step(&mut self, class: &FrobeniusClassDatum) {
        let p = self.p;
        let inv_p = BigRational::new(BigInt::one(), BigInt::from(p));
        let next: Vec<BigRational> = (0..self.vector.len())
            .map(|k| {
                let mut orbit = BigRational::zero();
                for i in 1..p {
                    // (Mv)[k] collects v[k − iρ] = v[k + (p − i)ρ]
                    orbit += &self.vector[translate(k, &class.rho, p - i, p)];
                }
                let signed = if class.epsilon == Sign::Plus { orbit } else { -orbit };
                (&self.vector[k] + signed) * &inv_p
            })
            .collect();
        self.vector = next;
        self.history.push(self.norm_squared());
    }
}

fn norm_squared(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x * x).sum()
}

/// How classes are chosen at each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Draws {
    /// Sample by weight from a ChaCha stream with this seed.
    Seeded(u64),
    /// Use these labels in order.
    Sequence(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkovReport {
    pub p: u32,
    pub r: usize,
    pub steps: usize,
    pub draws: Vec<String>,
    /// `‖t̂_n‖²` for `n = 1, …, steps + 1`.
    #[serde(serialize_with = "ser_ratios")]
    pub norm_squares: Vec<BigRational>,
    /// `‖t̂_n‖² ≤ Π ‖M(σ_i)^{m_i(n)}‖² ‖t̂_1‖²` at every step.
    pub bound_holds: bool,
    /// Some `ε = −1` class was drawn and the final norm is below the initial one.
    pub decays: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub final_ratio: BigRational,
    #[serde(skip)]
    pub state: MarkovState,
}

/// Run the recurrence `t̂_{n+1} = M(Frob) t̂_n` for `steps` draws, checking the norm bound at each step.
pub fn markov_run(file: &MarkovClassFile, initial: MarkovState, steps: usize, draws: &Draws) -> Result<MarkovReport> {
    file.validate()?;
    if initial.p != file.p || initial.r != file.r {
        return Err(Error::InvalidMarkov("initial state does not match the class file".into()));
    }
    let labels: Vec<String> = match draws {
        Draws::Sequence(seq) => {
            if seq.len() < steps {
                return Err(Error::InvalidMarkov(format!("sequence has {} labels, {steps} steps requested", seq.len())));
            }
            if let Some(bad) = seq.iter().find(|l| file.class(l).is_none()) {
                return Err(Error::InvalidMarkov(format!("sequence names unknown class {bad}")));
            }
            seq[..steps].to_vec()
        }
        Draws::Seeded(seed) => sample_labels(file, steps, *seed)?,
    };

    let start = initial.norm_squared();
    let mut state = initial;
    let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
    let mut bound_holds = true;
    let mut drew_negative = false;
    for label in &labels {
        let class = file.class(label).expect("labels validated");
        state.step(class);
        *counts.entry(class.label.as_str()).or_default() += 1;
        drew_negative |= class.epsilon == Sign::Minus;
        let bound = counts
            .iter()
            .map(|(l, &m)| markov_power_norm_squared(file.class(l).expect("known"), file.p, m))
            .fold(start.clone(), |acc, x| acc * x);
        bound_holds &= *state.history.last().expect("nonempty") <= bound;
    }
    let end = state.norm_squared();
    let final_ratio = if start.is_zero() { BigRational::zero() } else { &end / &start };
    Ok(MarkovReport {
        p: file.p,
        r: file.r,
        steps,
        draws: labels,
        norm_squares: state.history.clone(),
        bound_holds,
        decays: bound_holds && drew_negative && end < start,
        final_ratio,
        state,
    })
}

fn sample_labels(file: &MarkovClassFile, steps: usize, seed: u64) -> Result<Vec<String>> {
    let den = file.classes.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.weight.denom().clone()));
    let total = den.to_u64().ok_or_else(|| Error::InvalidMarkov("weight denominators too large to sample".into()))?;
    let cumulative: Vec<u64> = file
        .classes
        .iter()
        .scan(0u64, |acc, c| {
            *acc += (c.weight.numer() * (&den / c.weight.denom())).to_u64().expect("numerator below denominator");
            Some(*acc)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..steps)
        .map(|_| {
            let u = rng.random_range(0..total);
            let k = cumulative.partition_point(|&c| c <= u);
            file.classes[k].label.clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn class(label: &str, eps: i64, rho: Vec<u32>, w: BigRational) -> FrobeniusClassDatum {
        FrobeniusClassDatum { label: label.into(), epsilon: Sign::from_i64(eps).unwrap(), rho, weight: w }
    }

    #[test]
    fn matrix_examples() {
        let m = markov_matrix(&class("a", -1, vec![], r(1, 1)), 5, 0).unwrap();
        assert_eq!(m.rows(), &[vec![r(-3, 5)]]);
        let plus = markov_matrix(&class("b", 1, vec![1, 2], r(1, 1)), 3, 2).unwrap();
        assert_eq!(plus.mul(&plus), plus);
        let neg = markov_matrix(&class("c", -1, vec![1], r(1, 1)), 3, 1).unwrap();
        for row in neg.rows() {
            assert_eq!(row.iter().sum::<BigRational>(), r(-1, 3));
        }
        assert!(markov_matrix(&class("d", 1, vec![], r(1, 1)), 2, 0).is_err());
    }

    #[test]
    fn closed_form_matches_powers() {
        for p in [3u32, 5] {
            for rr in 0..=2usize {
                let rhos: Vec<Vec<u32>> = vec![vec![0; rr], (0..rr as u32).map(|i| (i + 1) % p).collect()];
                for rho in rhos {
                    for eps in [1, -1] {
                        let c = class("x", eps, rho.clone(), r(1, 1));
                        let m = markov_matrix(&c, p, rr).unwrap();
                        let mut acc = RatMatrix::identity(m.size());
                        for k in 1..=12 {
                            acc = acc.mul(&m);
                            assert_eq!(markov_power_closed_form(&c, p, rr, k).unwrap(), acc, "p={p} r={rr} eps={eps} m={k}");
                        }
                    }
                }
            }
        }
        let c = class("x", -1, vec![], r(1, 1));
        assert_eq!(markov_power_closed_form(&c, 3, 0, 2).unwrap().rows(), &[vec![r(1, 9)]]);
    }

    #[test]
    fn scalar_run() {
        let file = MarkovClassFile::new(3, 0, vec![class("neg", -1, vec![], r(1, 1))]).unwrap();
        let init = MarkovState::new(3, 0, vec![r(1, 1)]).unwrap();
        let rep = markov_run(&file, init, 10, &Draws::Seeded(0)).unwrap();
        for (k, n) in rep.norm_squares.iter().enumerate() {
            assert_eq!(*n, pow(&r(1, 9), k as u32));
        }
        assert!(rep.bound_holds && rep.decays);
    }

    #[test]
    fn constant_run_and_validation() {
        let file = MarkovClassFile::new(5, 1, vec![class("id", 1, vec![0], r(1, 1))]).unwrap();
        let init = file.initial_state().unwrap();
        let rep = markov_run(&file, init.clone(), 7, &Draws::Seeded(3)).unwrap();
        assert!(rep.norm_squares.iter().all(|n| *n == rep.norm_squares[0]));
        assert!(!rep.decays);
        assert!(MarkovClassFile::new(3, 1, vec![class("a", 1, vec![0], r(1, 2))]).is_err());
        assert!(MarkovClassFile::new(3, 1, vec![class("a", 1, vec![3], r(1, 1))]).is_err());
        assert!(MarkovClassFile::new(9, 0, vec![class("a", 1, vec![], r(1, 1))]).is_err());
        let seq = Draws::Sequence(vec!["id".into(); 2]);
        assert!(markov_run(&file, init, 3, &seq).is_err());
    }

    #[test]
    fn seeded_draws_follow_weights_and_repeat() {
        let classes = vec![class("a", -1, vec![1], r(1, 4)), class("b", 1, vec![2], r(3, 4))];
        let file = MarkovClassFile::new(3, 1, classes).unwrap();
        let a = sample_labels(&file, 4000, 42).unwrap();
        assert_eq!(a, sample_labels(&file, 4000, 42).unwrap());
        let share = a.iter().filter(|l| *l == "a").count() as f64 / 4000.0;
        assert!((share - 0.25).abs() < 0.03, "{share}");
    }
}
