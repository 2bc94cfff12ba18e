//! Factorization of integer polynomials modulo odd primes and Frobenius cycle types.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::perm::CycleType;
use super::poly::IntPolynomial;
use crate::error::{Error, Result};

/// Polynomials over `F_ℓ`, constant term first, with no trailing zeros.
type Poly = Vec<u64>;

#[derive(Clone, Copy, Debug)]
struct Field {
    l: u64,
}

impl Field {
    fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.l as u128) as u64
    }

    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.l {
            s - self.l
        } else {
            s
        }
    }

    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.l - b
        }
    }

    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.l;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(self, a: u64) -> u64 {
        self.pow(a, self.l - 2)
    }

    fn trim(mut p: Poly) -> Poly {
        while p.last() == Some(&0) {
            p.pop();
        }
        p
    }

    fn deg(p: &Poly) -> Option<usize> {
        p.len().checked_sub(1)
    }

    fn monic(self, p: &Poly) -> Poly {
        let inv = self.inv(*p.last().expect("nonzero polynomial"));
        p.iter().map(|&c| self.mul(c, inv)).collect()
    }

    fn sub_poly(self, a: &Poly, b: &Poly) -> Poly {
        let n = a.len().max(b.len());
        Field::trim(
            (0..n)
                .map(|i| self.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
                .collect(),
        )
    }

    fn mul_poly(self, a: &Poly, b: &Poly) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        Field::trim(out)
    }

    fn divmod(self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        let db = Field::deg(b).expect("division by zero polynomial");
        let inv = self.inv(b[db]);
        let mut r = a.clone();
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = self.mul(r[k], inv);
            if c == 0 {
                continue;
            }
            q[k - db] = c;
            for (j, &bj) in b.iter().enumerate() {
                r[k - db + j] = self.sub(r[k - db + j], self.mul(c, bj));
            }
        }
        r.truncate(db);
        (Field::trim(q), Field::trim(r))
    }

    fn rem(self, a: &Poly, b: &Poly) -> Poly {
        self.divmod(a, b).1
    }

    fn gcd(self, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        if a.is_empty() {
            a
        } else {
            self.monic(&a)
        }
    }

    fn powmod(self, base: &Poly, mut e: u128, m: &Poly) -> Poly {
        let mut result: Poly = self.rem(&vec![1], m);
        let mut b = self.rem(base, m);
        while e > 0 {
            if e & 1 == 1 {
                result = self.rem(&self.mul_poly(&result, &b), m);
            }
            b = self.rem(&self.mul_poly(&b, &b), m);
            e >>= 1;
        }
        result
    }

    fn derivative(self, p: &Poly) -> Poly {
        Field::trim(p.iter().enumerate().skip(1).map(|(i, &c)| self.mul(c, i as u64 % self.l)).collect())
    }

    /// `p(x^{1/ℓ})` for a polynomial in `x^ℓ` (coefficients are fixed by Frobenius over `F_ℓ`).
    fn pth_root(self, p: &Poly) -> Poly {
        p.iter().step_by(self.l as usize).copied().collect()
    }

    /// Squarefree factorization: pairs `(g, multiplicity)` with `g` monic squarefree.
    fn squarefree(self, f: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        self.squarefree_into(&self.monic(f), 1, &mut out);
        out
    }

    fn squarefree_into(self, f: &Poly, mult: usize, out: &mut Vec<(Poly, usize)>) {
        if Field::deg(f) == Some(0) {
            return;
        }
        let df = self.derivative(f);
        if df.is_empty() {
            self.squarefree_into(&self.pth_root(f), mult * self.l as usize, out);
            return;
        }
        let mut c = self.gcd(f, &df);
        let mut w = self.divmod(f, &c).0;
        let mut i = 1;
        while Field::deg(&w) != Some(0) {
            let y = self.gcd(&w, &c);
            let z = self.divmod(&w, &y).0;
            if Field::deg(&z).unwrap_or(0) > 0 {
                out.push((self.monic(&z), i * mult));
            }
            i += 1;
            w = y;
            c = self.divmod(&c, &w).0;
        }
        if Field::deg(&c).unwrap_or(0) > 0 {
            self.squarefree_into(&self.pth_root(&c), mult * self.l as usize, out);
        }
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    fn distinct_degree(self, f: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut f = f.clone();
        let x: Poly = vec![0, 1];
        let mut h = x.clone();
        let mut d = 0;
        while Field::deg(&f).unwrap_or(0) >= 2 * (d + 1) {
            d += 1;
            h = self.powmod(&h, self.l as u128, &f);
            let g = self.gcd(&f, &self.sub_poly(&h, &x));
            if Field::deg(&g).unwrap_or(0) > 0 {
                f = self.divmod(&f, &g).0;
                h = self.rem(&h, &f);
                out.push((g, d));
            }
        }
        if Field::deg(&f).unwrap_or(0) > 0 {
            let df = Field::deg(&f).expect("nonzero");
            out.push((self.monic(&f), df));
        }
        out
    }

    /// Cantor–Zassenhaus splitting of a monic product of distinct degree-`d` irreducibles.
    fn equal_degree(self, f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        let n = Field::deg(f).expect("nonzero");
        if n == d {
            return vec![f.clone()];
        }
        loop {
            let a: Poly = Field::trim((0..n).map(|_| rng.random_range(0..self.l)).collect());
            if Field::deg(&a).unwrap_or(0) == 0 {
                continue;
            }
            // a^((ℓ^d − 1)/2) = (a · a^ℓ ⋯ a^{ℓ^{d−1}})^((ℓ − 1)/2)
            let mut t = a.clone();
            let mut norm = a.clone();
            for _ in 1..d {
                t = self.powmod(&t, self.l as u128, f);
                norm = self.rem(&self.mul_poly(&norm, &t), f);
            }
            let b = self.sub_poly(&self.powmod(&norm, (self.l as u128 - 1) / 2, f), &vec![1]);
            let g = self.gcd(f, &b);
            let dg = Field::deg(&g).unwrap_or(0);
            if dg > 0 && dg < n {
                let mut parts = self.equal_degree(&g, d, rng);
                parts.extend(self.equal_degree(&self.divmod(f, &g).0, d, rng));
                return parts;
            }
        }
    }
}

fn is_prime(l: u64) -> bool {
    if l < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= l {
        if l % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes in the half-open range `lo..hi` (segmented sieve).
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo || hi <= 2 {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 1;
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            for j in (i * i..=root as usize).step_by(i) {
                small[j] = false;
            }
        }
    }
    let mut seg = vec![true; (hi - lo) as usize];
    for &p in &base {
        let start = (p * p).max(lo.div_ceil(p) * p);
        for m in (start..hi).step_by(p as usize) {
            seg[(m - lo) as usize] = false;
        }
    }
    seg.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| lo + i as u64).collect()
}

/// Stable 64-bit seed derived from a polynomial and a prime.
fn seed_for(f: &IntPolynomial, l: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |x: u64| {
        h ^= x;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for c in f.coeffs() {
        for digit in c.to_signed_bytes_le() {
            feed(digit as u64);
        }
        feed(0x1_0000);
    }
    feed(l);
    h
}

fn check_modulus(f: &IntPolynomial, l: u64) -> Result<Field> {
    if l % 2 == 0 || !is_prime(l) || l >= 1 << 32 {
        return Err(Error::InvalidModulus(l, "need an odd prime below 2^32".into()));
    }
    if (f.leading() % BigInt::from(l)).is_zero() {
        return Err(Error::InvalidModulus(l, "divides the leading coefficient".into()));
    }
    Ok(Field { l })
}

/// Monic irreducible factors of `f mod ℓ` with multiplicities, sorted by degree then
/// coefficients.
pub fn factor_mod(f: &IntPolynomial, l: u64) -> Result<Vec<(Vec<u64>, usize)>> {
    let field = check_modulus(f, l)?;
    let reduced = Field::trim(f.reduce_mod(l));
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(f, l));
    let mut out = Vec::new();
    for (g, mult) in field.squarefree(&reduced) {
        for (h, d) in field.distinct_degree(&g) {
            for irreducible in field.equal_degree(&h, d, &mut rng) {
                out.push((irreducible, mult));
            }
        }
    }
    out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    Ok(out)
}

/// Cycle type of Frobenius at `ℓ`, or [`Frobenius::Ramified`] when `ℓ` divides the discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Frobenius {
    Unramified(CycleType),
    Ramified,
}

/// Frobenius cycle types of a fixed polynomial, with its discriminant cached.
#[derive(Clone, Debug)]
pub struct FrobeniusSampler {
    f: IntPolynomial,
    disc: BigInt,
}

impl FrobeniusSampler {
    pub fn new(f: IntPolynomial) -> Result<Self> {
        if f.degree() < 1 {
            return Err(Error::InvalidPolynomial("need degree >= 1".into()));
        }
        let disc = f.discriminant()?;
        Ok(FrobeniusSampler { f, disc })
    }

    pub fn polynomial(&self) -> &IntPolynomial {
        &self.f
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn cycle_type(&self, l: u64) -> Result<Frobenius> {
        let field = check_modulus(&self.f, l)?;
        if self.disc.mod_floor(&BigInt::from(l)).is_zero() {
            return Ok(Frobenius::Ramified);
        }
        let reduced = Field::trim(self.f.reduce_mod(l));
        let mut rng = ChaCha8Rng::seed_from_u64(seed_for(&self.f, l));
        let mut degrees = Vec::new();
        for (h, d) in field.distinct_degree(&field.monic(&reduced)) {
            let parts = field.equal_degree(&h, d, &mut rng);
            degrees.extend(parts.iter().map(|p| p.len() - 1));
        }
        Ok(Frobenius::Unramified(CycleType::new(degrees)))
    }
}

/// Frobenius cycle type of `f` at the odd prime `ℓ`.
pub fn frobenius_cycle_type(f: &IntPolynomial, l: u64) -> Result<Frobenius> {
    FrobeniusSampler::new(f.clone())?.cycle_type(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    fn ct(f: &str, l: u64) -> Frobenius {
        frobenius_cycle_type(&poly(f), l).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(ct("x^2+1", 5), Frobenius::Unramified(CycleType::new(vec![1, 1])));
        assert_eq!(ct("x^2+1", 3), Frobenius::Unramified(CycleType::new(vec![2])));
        assert_eq!(ct("x^6+x^4+x+3", 5), Frobenius::Ramified);
        assert!(frobenius_cycle_type(&poly("x^2+1"), 2).is_err());
        assert!(frobenius_cycle_type(&poly("3x^2+1"), 3).is_err());
        assert!(frobenius_cycle_type(&poly("x^2+1"), 9).is_err());
    }

    #[test]
    fn factors_multiply_back() {
        let f = poly("x^6+x^4+x+3");
        for l in [7u64, 11, 13, 101] {
            let fld = Field { l };
            let factors = factor_mod(&f, l).unwrap();
            let mut prod: Poly = vec![1];
            for (g, m) in &factors {
                for _ in 0..*m {
                    prod = fld.mul_poly(&prod, g);
                }
            }
            assert_eq!(prod, Field::trim(f.reduce_mod(l)));
        }
    }

    #[test]
    fn squarefree_handles_repeats() {
        // (x+1)^2 (x+2)^3 x^5 over F_5: x^5 has zero derivative part
        let l = 5;
        let fld = Field { l };
        let mut prod: Poly = vec![1];
        for (g, m) in [(vec![1, 1], 2), (vec![2, 1], 3), (vec![0, 1], 5)] {
            for _ in 0..m {
                prod = fld.mul_poly(&prod, &g);
            }
        }
        let f = IntPolynomial::from_i64(&prod.iter().map(|&c| c as i64).collect::<Vec<_>>()).unwrap();
        let mut got = factor_mod(&f, l).unwrap();
        got.sort_by_key(|(g, _)| g.clone());
        assert_eq!(got, vec![(vec![0, 1], 5), (vec![1, 1], 2), (vec![2, 1], 3)]);
    }

    #[test]
    fn cycle_type_is_deterministic_and_consistent() {
        let s = FrobeniusSampler::new(poly("x^6+x^4+x+3")).unwrap();
        for l in primes_in(3, 400) {
            let a = s.cycle_type(l).unwrap();
            assert_eq!(a, s.cycle_type(l).unwrap());
            let ramified = (s.discriminant() % BigInt::from(l)).is_zero();
            assert_eq!(a == Frobenius::Ramified, ramified);
            if let Frobenius::Unramified(c) = a {
                assert_eq!(c.degree(), 6);
                let degs: Vec<usize> = factor_mod(s.polynomial(), l).unwrap().iter().map(|(g, _)| g.len() - 1).collect();
                assert_eq!(CycleType::new(degs), c);
            }
        }
    }

    #[test]
    fn primes() {
        assert_eq!(primes_in(0, 30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_in(90, 110), vec![97, 101, 103, 107, 109]);
        assert!(primes_in(10, 10).is_empty());
        assert_eq!(primes_in(0, 100_000).len(), 9592);
    }
}
