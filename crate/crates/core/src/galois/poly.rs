use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A polynomial in `x` with integer coefficients, stored constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Coefficients constant term first; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("the zero polynomial".into()));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Parses `"x^6+x^4+x+3"`-style strings or a JSON list of integers, constant term first.
    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn derivative(&self) -> Vec<BigInt> {
        self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: u64) -> Vec<u64> {
        let m = BigInt::from(m);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&m).try_into().expect("residue fits in u64"))
            .collect()
    }

    /// `(−1)^{n(n−1)/2} Res(f, f') / lead(f)`.
    pub fn discriminant(&self) -> Result<BigInt> {
        let n = self.degree();
        if n < 1 {
            return Err(Error::InvalidPolynomial("discriminant needs degree >= 1".into()));
        }
        if n == 1 {
            return Ok(BigInt::one());
        }
        let res = resultant(&self.coeffs, &self.derivative());
        let (q, r) = res.div_rem(self.leading());
        debug_assert!(r.is_zero());
        Ok(if (n * (n - 1) / 2) % 2 == 1 { -q } else { q })
    }
}

/// Resultant of two polynomials (constant term first) as the Sylvester determinant.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (k, c) in f.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in g.iter().rev().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    determinant(rows)
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('[') {
            let list: Vec<serde_json::Value> =
                serde_json::from_str(t).map_err(|e| Error::InvalidPolynomial(e.to_string()))?;
            let coeffs = list
                .iter()
                .map(|v| match v {
                    serde_json::Value::Number(n) => n.to_string().parse::<BigInt>().ok(),
                    serde_json::Value::String(s) => s.parse::<BigInt>().ok(),
                    _ => None,
                })
                .collect::<Option<Vec<BigInt>>>()
                .ok_or_else(|| Error::InvalidPolynomial(format!("non-integer coefficient in {t}")))?;
            return IntPolynomial::new(coeffs);
        }
        parse_expression(t)
    }
}

fn parse_expression(s: &str) -> Result<IntPolynomial> {
    let bad = |msg: &str| Error::InvalidPolynomial(format!("{msg} in {s:?}"));
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(bad("empty input"));
    }
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let mut negative = false;
        if chars[i] == '+' || chars[i] == '-' {
            negative = chars[i] == '-';
            i += 1;
        } else if i > 0 {
            return Err(bad("expected + or -"));
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let number: Option<BigInt> = (i > start).then(|| chars[start..i].iter().collect::<String>().parse().expect("digits"));
        let mut power = 0usize;
        if i < chars.len() && chars[i] == '*' {
            if number.is_none() {
                return Err(bad("'*' without a coefficient"));
            }
            i += 1;
            if i >= chars.len() || chars[i] != 'x' {
                return Err(bad("expected x after '*'"));
            }
        }
        if i < chars.len() && chars[i] == 'x' {
            i += 1;
            power = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let ps = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if ps == i {
                    return Err(bad("missing exponent"));
                }
                power = chars[ps..i].iter().collect::<String>().parse().map_err(|_| bad("exponent too large"))?;
                if power > 10_000 {
                    return Err(bad("exponent too large"));
                }
            }
        } else if number.is_none() {
            return Err(bad("expected a term"));
        }
        let mut c = number.unwrap_or_else(BigInt::one);
        if negative {
            c = -c;
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += c;
    }
    IntPolynomial::new(coeffs)
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let abs = c.abs();
            let coef = if abs.is_one() && k > 0 { String::new() } else { abs.to_string() };
            let var = match k {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{k}"),
            };
            write!(f, "{sign}{coef}{var}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn parsing() {
        assert_eq!(p("x^6+x^4+x+3"), IntPolynomial::from_i64(&[3, 1, 0, 0, 1, 0, 1]).unwrap());
        assert_eq!(p(" 3x^2 - x + 2*x - 7 "), IntPolynomial::from_i64(&[-7, 1, 3]).unwrap());
        assert_eq!(p("-x"), IntPolynomial::from_i64(&[0, -1]).unwrap());
        assert_eq!(p("[3, 1, 0, 0, 1, 0, 1]"), p("x^6+x^4+x+3"));
        for bad in ["", "x^", "3**x", "y+1", "x^2 x", "0", "x-x"] {
            assert!(bad.parse::<IntPolynomial>().is_err(), "{bad}");
        }
        assert_eq!(p("x^6+x^4+x+3").to_string(), "x^6+x^4+x+3");
        assert_eq!(p("-2x^3+x-1").to_string(), "-2x^3+x-1");
    }

    #[test]
    fn discriminants() {
        assert_eq!(p("x^2+1").discriminant().unwrap(), BigInt::from(-4));
        assert_eq!(p("x^3-x").discriminant().unwrap(), BigInt::from(4));
        assert_eq!(p("x^6+x^4+x+3").discriminant().unwrap(), BigInt::from(-5i64 * 2_670_719));
        // non-monic quadratic: b² − 4ac
        assert_eq!(p("3x^2+5x-2").discriminant().unwrap(), BigInt::from(25 + 24));
        // cubic x³ + ax + b: −4a³ − 27b²
        assert_eq!(p("x^3+2x+3").discriminant().unwrap(), BigInt::from(-4 * 8 - 27 * 9));
        // repeated root
        assert_eq!(p("x^2-2x+1").discriminant().unwrap(), BigInt::zero());
    }

    #[test]
    fn determinant_examples() {
        let m = |rows: &[&[i64]]| rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        assert_eq!(determinant(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(determinant(m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]])), BigInt::from(0));
        assert_eq!(determinant(m(&[&[1, 2], &[3, 4]])), BigInt::from(-2));
    }
}
