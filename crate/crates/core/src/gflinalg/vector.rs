use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A prime modulus `p <= 97`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u8);

impl Prime {
    pub const TWO: Prime = Prime(2);
    pub const MAX: u32 = 97;

    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || p > Self::MAX || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return Err(Error::UnsupportedPrime(p));
        }
        Ok(Prime(p as u8))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_two(self) -> bool {
        self.0 == 2
    }

    /// Reduce an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.get() != 0);
        let p = self.get();
        let mut result = 1u32;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        result
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    /// F₂ entries packed little-endian into 64-bit words.
    Bits(SmallVec<[u64; 1]>),
    /// Residues for odd `p`, one byte each.
    Bytes(Vec<u8>),
}

/// A vector over a prime field. Over F₂ the entries are packed into words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpVector {
    p: Prime,
    dim: usize,
    repr: Repr,
}

#[inline]
fn words_for(dim: usize) -> usize {
    dim.div_ceil(64)
}

impl FpVector {
    pub fn zeros(p: Prime, dim: usize) -> Self {
        let repr = if p.is_two() {
            Repr::Bits(SmallVec::from_elem(0, words_for(dim)))
        } else {
            Repr::Bytes(vec![0; dim])
        };
        FpVector { p, dim, repr }
    }

    /// The `i`-th standard basis vector.
    pub fn unit(p: Prime, dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(p, dim);
        v.set(i, 1);
        v
    }

    pub fn from_residues(p: Prime, entries: &[i64]) -> Self {
        let mut v = Self::zeros(p, entries.len());
        for (i, &x) in entries.iter().enumerate() {
            v.set(i, p.reduce(x));
        }
        v
    }

    /// An F₂ vector of dimension `dim <= 64` whose `i`-th entry is bit `i` of `bits`.
    pub fn from_bits(dim: usize, bits: u64) -> Self {
        assert!(dim <= 64, "from_bits supports dimension <= 64");
        let mask = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
        let mut words = SmallVec::new();
        if dim > 0 {
            words.push(bits & mask);
        }
        FpVector { p: Prime::TWO, dim, repr: Repr::Bits(words) }
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        debug_assert!(i < self.dim);
        match &self.repr {
            Repr::Bits(w) => ((w[i / 64] >> (i % 64)) & 1) as u32,
            Repr::Bytes(b) => b[i] as u32,
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u32) {
        debug_assert!(i < self.dim);
        let value = value % self.p.get();
        match &mut self.repr {
            Repr::Bits(w) => {
                let bit = 1u64 << (i % 64);
                if value == 1 {
                    w[i / 64] |= bit;
                } else {
                    w[i / 64] &= !bit;
                }
            }
            Repr::Bytes(b) => b[i] = value as u8,
        }
    }

    /// Low 64 entries of an F₂ vector as a bit mask.
    pub fn as_bits(&self) -> Option<u64> {
        match &self.repr {
            Repr::Bits(w) if self.dim <= 64 => Some(w.first().copied().unwrap_or(0)),
            _ => None,
        }
    }

    pub fn residues(&self) -> Vec<u32> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Bits(w) => w.iter().all(|&x| x == 0),
            Repr::Bytes(b) => b.iter().all(|&x| x == 0),
        }
    }

    /// Index of the first nonzero entry.
    pub fn first_nonzero(&self) -> Option<usize> {
        match &self.repr {
            Repr::Bits(w) => w
                .iter()
                .enumerate()
                .find(|(_, &x)| x != 0)
                .map(|(k, &x)| k * 64 + x.trailing_zeros() as usize),
            Repr::Bytes(b) => b.iter().position(|&x| x != 0),
        }
    }

    fn check_compatible(&self, other: &FpVector) {
        assert_eq!(self.p, other.p, "vectors over different fields");
        assert_eq!(self.dim, other.dim, "vector dimension mismatch");
    }

    /// `self += c * other`.
    pub fn add_scaled_assign(&mut self, other: &FpVector, c: u32) {
        self.check_compatible(other);
        let p = self.p.get();
        let c = c % p;
        if c == 0 {
            return;
        }
        match (&mut self.repr, &other.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => {
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x ^= *y;
                }
            }
            (Repr::Bytes(a), Repr::Bytes(b)) => {
                for (x, &y) in a.iter_mut().zip(b.iter()) {
                    *x = ((*x as u32 + c * y as u32) % p) as u8;
                }
            }
            _ => unreachable!("representation is determined by the prime"),
        }
    }

    pub fn add_assign(&mut self, other: &FpVector) {
        self.add_scaled_assign(other, 1);
    }

    pub fn sub_assign(&mut self, other: &FpVector) {
        let p = self.p.get();
        self.add_scaled_assign(other, p - 1);
    }

    pub fn add(&self, other: &FpVector) -> FpVector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &FpVector) -> FpVector {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn neg(&self) -> FpVector {
        self.scale(self.p.get() - 1)
    }

    pub fn scale(&self, c: u32) -> FpVector {
        let p = self.p.get();
        let c = c % p;
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Bits(w) => {
                if c == 0 {
                    w.iter_mut().for_each(|x| *x = 0);
                }
            }
            Repr::Bytes(b) => b.iter_mut().for_each(|x| *x = ((*x as u32 * c) % p) as u8),
        }
        out
    }

    /// Standard dot product `Σ aᵢbᵢ`.
    pub fn dot(&self, other: &FpVector) -> u32 {
        self.check_compatible(other);
        match (&self.repr, &other.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => {
                a.iter().zip(b.iter()).map(|(x, y)| (x & y).count_ones()).sum::<u32>() & 1
            }
            (Repr::Bytes(a), Repr::Bytes(b)) => {
                let p = self.p.get();
                a.iter().zip(b.iter()).fold(0u32, |acc, (&x, &y)| (acc + x as u32 * y as u32) % p)
            }
            _ => unreachable!("representation is determined by the prime"),
        }
    }

    /// Concatenation `(self | other)`.
    pub fn concat(&self, other: &FpVector) -> FpVector {
        assert_eq!(self.p, other.p);
        let mut out = FpVector::zeros(self.p, self.dim + other.dim);
        for i in 0..self.dim {
            out.set(i, self.get(i));
        }
        for i in 0..other.dim {
            out.set(self.dim + i, other.get(i));
        }
        out
    }

    /// Entries `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> FpVector {
        let mut out = FpVector::zeros(self.p, end - start);
        for i in start..end {
            out.set(i - start, self.get(i));
        }
        out
    }

    /// Every vector of `F_p^dim`, in lexicographic order of the residue tuple read
    /// with the first coordinate varying fastest.
    pub fn all(p: Prime, dim: usize) -> impl Iterator<Item = FpVector> {
        let total = (p.get() as u64).checked_pow(dim as u32).expect("vector space too large to enumerate");
        (0..total).map(move |mut n| {
            let mut v = FpVector::zeros(p, dim);
            for i in 0..dim {
                v.set(i, (n % p.get() as u64) as u32);
                n /= p.get() as u64;
            }
            v
        })
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_two() {
            for i in 0..self.dim {
                write!(f, "{}", self.get(i))?;
            }
            Ok(())
        } else {
            write!(f, "(")?;
            for i in 0..self.dim {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i))?;
            }
            write!(f, ")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_validation() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(91).is_err());
        assert!(Prime::new(101).is_err());
    }

    #[test]
    fn inverses_mod_p() {
        for p in [3u32, 5, 7, 97] {
            let pr = Prime::new(p).unwrap();
            for a in 1..p {
                assert_eq!(a * pr.inv(a) % p, 1);
            }
        }
    }

    #[test]
    fn f2_arithmetic_is_xor() {
        let a = FpVector::from_bits(4, 0b1100);
        let b = FpVector::from_bits(4, 0b0110);
        assert_eq!(a.add(&b), FpVector::from_bits(4, 0b1010));
        assert_eq!(a.dot(&b), 1);
        assert_eq!(a.sub(&b), a.add(&b));
    }

    #[test]
    fn odd_prime_arithmetic() {
        let p = Prime::new(5).unwrap();
        let a = FpVector::from_residues(p, &[1, 2, 3]);
        let b = FpVector::from_residues(p, &[4, 4, -1]);
        assert_eq!(a.add(&b).residues(), vec![0, 1, 2]);
        assert_eq!(a.dot(&b), (4 + 8 + 12) % 5);
        assert_eq!(a.neg().add(&a), FpVector::zeros(p, 3));
    }

    #[test]
    fn enumerate_space() {
        let all: Vec<_> = FpVector::all(Prime::new(3).unwrap(), 2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[1].residues(), vec![1, 0]);
    }
}
