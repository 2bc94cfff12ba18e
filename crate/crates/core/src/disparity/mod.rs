//! Exact disparity statistics: local factors from place data, their products, the
//! even fraction of a twist family, and the brute-force average over `Γ = Π_v C(K_v)`.

mod markov;
mod schema;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use markov::{
    markov_matrix, markov_power_closed_form, markov_power_norm_squared, markov_run, Draws, FrobeniusClassDatum,
    MarkovClassFile, MarkovReport, MarkovState, RatMatrix,
};
pub use schema::{parse_disparity, parse_markov, CharacterInput, DisparityInput, PlaceInput};

use crate::error::{Error, Result};
use crate::galois::Sign;

/// Largest `|Γ|` enumerated by [`brute_force_gamma`] unless a caller passes its own cap.
pub const GAMMA_CAP: u64 = 10_000_000;

/// Which local sign is averaged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statistic {
    /// `ω_v(χ) = χ(Δ)(−1)^{norm}`.
    #[serde(rename = "selmer2")]
    Selmer2,
    /// `Ω_v(χ) = (−1)^{2g + norm}`.
    #[serde(rename = "twoinf")]
    TwoInf,
    /// `Υ_v(χ) = χ(Δ)(−1)^{2g}`.
    #[serde(rename = "sha")]
    Sha,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Selmer2 => "selmer2",
            Statistic::TwoInf => "twoinf",
            Statistic::Sha => "sha",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> Sign {
        match self {
            Parity::Even => Sign::Plus,
            Parity::Odd => Sign::Minus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaceKind {
    ArchimedeanReal,
    ArchimedeanComplex,
    NonarchGoodOdd,
    NonarchOther,
}

impl fmt::Display for PlaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PlaceKind::ArchimedeanReal => "archimedean_real",
            PlaceKind::ArchimedeanComplex => "archimedean_complex",
            PlaceKind::NonarchGoodOdd => "nonarch_good_odd",
            PlaceKind::NonarchOther => "nonarch_other",
        };
        f.write_str(s)
    }
}

/// One local character `χ ∈ C(K_v)` with the data its signs are built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalCharacterDatum {
    pub name: String,
    pub chi_delta: Sign,
    /// `dim A(K_v)/N A(L_χ)`.
    pub norm_cokernel_dim: u32,
    /// `2·inv_v 𝔤(A, λ, χ) ∈ {0, 1}`.
    pub sha_term_double: u8,
    pub ramified: bool,
    pub trivial: bool,
}

impl LocalCharacterDatum {
    pub fn new(name: impl Into<String>, chi_delta: Sign, norm_cokernel_dim: u32, sha_term_double: u8, ramified: bool) -> Result<Self> {
        if sha_term_double > 1 {
            return Err(Error::InvalidLocalDatum(format!("sha_term_double must be 0 or 1, found {sha_term_double}")));
        }
        Ok(LocalCharacterDatum { name: name.into(), chi_delta, norm_cokernel_dim, sha_term_double, ramified, trivial: false })
    }

    /// The trivial character: `χ(Δ) = 1`, no norm cokernel, no local term.
    pub fn trivial(name: impl Into<String>) -> Self {
        LocalCharacterDatum {
            name: name.into(),
            chi_delta: Sign::Plus,
            norm_cokernel_dim: 0,
            sha_term_double: 0,
            ramified: false,
            trivial: true,
        }
    }

    pub fn satisfies_trivial_invariants(&self) -> bool {
        self.chi_delta == Sign::Plus && self.norm_cokernel_dim == 0 && self.sha_term_double == 0
    }

    pub fn value(&self, statistic: Statistic) -> Sign {
        let norm = Sign::from_parity(self.norm_cokernel_dim as usize);
        let sha = Sign::from_parity(self.sha_term_double as usize);
        match statistic {
            Statistic::Selmer2 => self.chi_delta * norm,
            Statistic::TwoInf => sha * norm,
            Statistic::Sha => self.chi_delta * sha,
        }
    }
}

/// The characters of one place in the finite set `Σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalPlaceDatum {
    pub label: String,
    pub kind: PlaceKind,
    pub characters: Vec<LocalCharacterDatum>,
}

impl LocalPlaceDatum {
    /// Needs at least one character. At most one may be flagged trivial, and it must
    /// have the trivial values; with no flag, some character must have them.
    pub fn new(label: impl Into<String>, kind: PlaceKind, characters: Vec<LocalCharacterDatum>) -> Result<Self> {
        let label = label.into();
        if characters.is_empty() {
            return Err(Error::InvalidLocalDatum(format!("place {label} has no characters")));
        }
        let flagged: Vec<&LocalCharacterDatum> = characters.iter().filter(|c| c.trivial).collect();
        match flagged.as_slice() {
            [] if !characters.iter().any(LocalCharacterDatum::satisfies_trivial_invariants) => {
                return Err(Error::InvalidLocalDatum(format!("place {label} has no character with trivial values")));
            }
            [] => {}
            [c] if !c.satisfies_trivial_invariants() => {
                return Err(Error::InvalidLocalDatum(format!(
                    "place {label}: trivial character {} needs chi_delta = 1, norm_cokernel_dim = 0, sha_term_double = 0",
                    c.name
                )));
            }
            [_] => {}
            _ => return Err(Error::InvalidLocalDatum(format!("place {label} flags more than one trivial character"))),
        }
        Ok(LocalPlaceDatum { label, kind, characters })
    }

    /// A place whose characters take exactly the given signs under `statistic`; the
    /// first `+1` is the trivial character.
    pub fn from_signs(label: impl Into<String>, kind: PlaceKind, statistic: Statistic, signs: &[Sign]) -> Result<Self> {
        let label = label.into();
        let first_plus = signs.iter().position(|&s| s == Sign::Plus);
        let characters = signs
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let mut c = LocalCharacterDatum::trivial(format!("{label}.{i}"));
                if Some(i) != first_plus {
                    c.trivial = false;
                    c.ramified = true;
                    match statistic {
                        Statistic::Sha => c.chi_delta = s,
                        Statistic::Selmer2 | Statistic::TwoInf => c.norm_cokernel_dim = u32::from(s == Sign::Minus),
                    }
                }
                c
            })
            .collect();
        LocalPlaceDatum::new(label, kind, characters)
    }

    pub fn signs(&self, statistic: Statistic) -> Vec<Sign> {
        self.characters.iter().map(|c| c.value(statistic)).collect()
    }
}

/// Mean of the chosen sign over the characters of `place`.
pub fn local_factor(place: &LocalPlaceDatum, statistic: Statistic) -> BigRational {
    let total: i64 = place.characters.iter().map(|c| c.value(statistic).value()).sum();
    BigRational::new(BigInt::from(total), BigInt::from(place.characters.len()))
}

/// `(1 + (−1)^parity · product) / 2`.
pub fn global_fraction(product: &BigRational, base_parity: Parity) -> Result<BigRational> {
    if product.abs() > BigRational::one() {
        return Err(Error::InvalidArgument(format!("|product| = {} exceeds 1", ratio_string(&product.abs()))));
    }
    let signed = if base_parity == Parity::Odd { -product.clone() } else { product.clone() };
    Ok((BigRational::one() + signed) / BigRational::from_integer(BigInt::from(2)))
}

/// Fraction of `γ ∈ Γ` whose twisted parity is even, by enumerating all of `Γ`.
pub fn brute_force_gamma(places: &[LocalPlaceDatum], statistic: Statistic, base_parity: Parity, cap: u64) -> Result<BigRational> {
    let sizes: Vec<u64> = places.iter().map(|p| p.characters.len() as u64).collect();
    let total = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s).filter(|&t| t <= cap))
        .ok_or(Error::SizeLimit(cap as usize))?;
    if places.is_empty() {
        let even = u64::from(base_parity == Parity::Even);
        return Ok(BigRational::from_integer(BigInt::from(even)));
    }
    // bit i set when the sign is −1
    let bits: Vec<Vec<u8>> = places
        .iter()
        .map(|p| p.signs(statistic).iter().map(|&s| u8::from(s == Sign::Minus)).collect())
        .collect();
    let target = u8::from(base_parity == Parity::Odd);
    let inner: u64 = total / sizes[0];
    let rest = &bits[1..];
    let even: u64 = bits[0]
        .par_iter()
        .map(|&b0| {
            let mut count = 0u64;
            let mut idx = vec![0usize; rest.len()];
            for _ in 0..inner {
                let parity = rest.iter().zip(&idx).fold(b0, |acc, (b, &i)| acc ^ b[i]);
                count += u64::from(parity == target);
                for (k, b) in rest.iter().enumerate() {
                    idx[k] += 1;
                    if idx[k] < b.len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
            count
        })
        .sum();
    Ok(BigRational::new(BigInt::from(even), BigInt::from(total)))
}

/// Closed form for `dim A(K_v)/N A(L_χ)`. At archimedean places `ramified` means
/// the character is nontrivial.
pub fn norm_cokernel_dim(kind: PlaceKind, ramified: bool, dim_torsion: u32, dim_a: u32, p: u32) -> Result<u32> {
    match kind {
        PlaceKind::NonarchGoodOdd => Ok(if ramified { dim_torsion } else { 0 }),
        PlaceKind::ArchimedeanComplex => Ok(0),
        PlaceKind::ArchimedeanReal if !ramified => Ok(0),
        PlaceKind::ArchimedeanReal if p != 2 => {
            Err(Error::InvalidLocalDatum(format!("a real place has no nontrivial characters of order {p}")))
        }
        PlaceKind::ArchimedeanReal => dim_torsion.checked_sub(dim_a).ok_or_else(|| {
            Error::InvalidLocalDatum(format!("dim A(R)[2] = {dim_torsion} is smaller than dim A = {dim_a}"))
        }),
        PlaceKind::NonarchOther => Err(Error::NotComputable(format!("norm cokernel at a {kind} place"))),
    }
}

/// Closed form for `inv_v 𝔤(A, λ, χ) ∈ {0, 1/2}`.
pub fn sha_local_term(kind: PlaceKind, chi_trivial: bool, ramified: bool, dim_torsion: u32) -> Result<BigRational> {
    let half = || BigRational::new(BigInt::from(dim_torsion % 2), BigInt::from(2));
    match kind {
        PlaceKind::NonarchOther => Err(Error::NotComputable(format!("local term at a {kind} place"))),
        _ if chi_trivial => Ok(BigRational::zero()),
        PlaceKind::ArchimedeanComplex => Ok(BigRational::zero()),
        PlaceKind::NonarchGoodOdd | PlaceKind::ArchimedeanReal if ramified => Ok(half()),
        _ => Ok(BigRational::zero()),
    }
}

/// Per-place output of [`disparity_report`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaceFactor {
    pub label: String,
    pub kind: PlaceKind,
    pub characters: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub factor: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DisparityReport {
    pub statistic: Statistic,
    pub selmer_parity_base: Parity,
    pub places: Vec<PlaceFactor>,
    #[serde(serialize_with = "ser_ratio")]
    pub product: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub fraction_even: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub fraction_odd: BigRational,
    /// `|Γ|`, when it fits in a `u64`.
    pub gamma_size: Option<u64>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub brute_force_fraction_even: Option<BigRational>,
    pub brute_force_agrees: Option<bool>,
}

/// Factors, product and even fraction; with `oracle`, also the enumeration of `Γ`
/// when `|Γ| ≤ cap`.
pub fn disparity_report(
    places: &[LocalPlaceDatum],
    statistic: Statistic,
    base_parity: Parity,
    oracle: bool,
    cap: u64,
) -> Result<DisparityReport> {
    let factors: Vec<PlaceFactor> = places
        .iter()
        .map(|p| PlaceFactor { label: p.label.clone(), kind: p.kind, characters: p.characters.len(), factor: local_factor(p, statistic) })
        .collect();
    let product = factors.iter().fold(BigRational::one(), |acc, f| acc * &f.factor);
    let fraction_even = global_fraction(&product, base_parity)?;
    let fraction_odd = BigRational::one() - &fraction_even;
    let gamma_size = places.iter().try_fold(1u64, |acc, p| acc.checked_mul(p.characters.len() as u64));
    let brute = match gamma_size {
        Some(n) if oracle && n <= cap => Some(brute_force_gamma(places, statistic, base_parity, cap)?),
        _ => None,
    };
    let agrees = brute.as_ref().map(|b| *b == fraction_even);
    Ok(DisparityReport {
        statistic,
        selmer_parity_base: base_parity,
        places: factors,
        product,
        fraction_even,
        fraction_odd,
        gamma_size,
        brute_force_fraction_even: brute,
        brute_force_agrees: agrees,
    })
}

/// `"num/den"` with a positive denominator.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or an integer.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("expected a rational \"num/den\", found {s:?}"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub(crate) fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

pub(crate) fn ser_opt_ratio<S: serde::Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&ratio_string(r)),
        None => s.serialize_none(),
    }
}

pub(crate) fn ser_ratios<S: serde::Serializer>(rs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(ratio_string))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn signs(v: &[i64]) -> Vec<Sign> {
        v.iter().map(|&x| Sign::from_i64(x).unwrap()).collect()
    }

    fn place(label: &str, v: &[i64]) -> LocalPlaceDatum {
        LocalPlaceDatum::from_signs(label, PlaceKind::NonarchOther, Statistic::TwoInf, &signs(v)).unwrap()
    }

    #[test]
    fn local_factors() {
        assert_eq!(local_factor(&place("a", &[1, 1, 1]), Statistic::Selmer2), r(1, 1));
        for stat in [Statistic::Selmer2, Statistic::TwoInf, Statistic::Sha] {
            let p = LocalPlaceDatum::from_signs("m", PlaceKind::NonarchOther, stat, &signs(&[1, -1, -1, 1])).unwrap();
            assert_eq!(p.signs(stat), signs(&[1, -1, -1, 1]));
        }
        assert_eq!(local_factor(&place("b", &[1, -1]), Statistic::Selmer2), r(0, 1));
        let two = place("2", &[1, 1, 1, 1, 1, 1, 1, -1]);
        assert_eq!(local_factor(&two, Statistic::TwoInf), r(3, 4));
    }

    #[test]
    fn statistics_relate() {
        for chi in [Sign::Plus, Sign::Minus] {
            for norm in 0..3 {
                for sha in 0..2 {
                    let c = LocalCharacterDatum::new("c", chi, norm, sha, true).unwrap();
                    assert_eq!(c.value(Statistic::TwoInf), c.value(Statistic::Selmer2) * c.value(Statistic::Sha));
                }
            }
        }
        assert!(LocalCharacterDatum::new("c", Sign::Plus, 0, 2, false).is_err());
    }

    #[test]
    fn place_validation() {
        assert!(LocalPlaceDatum::new("e", PlaceKind::NonarchOther, vec![]).is_err());
        let bad = LocalCharacterDatum::new("x", Sign::Minus, 0, 0, true).unwrap();
        assert!(LocalPlaceDatum::new("v", PlaceKind::NonarchOther, vec![bad.clone()]).is_err());
        let mut flagged = bad;
        flagged.trivial = true;
        assert!(LocalPlaceDatum::new("v", PlaceKind::NonarchOther, vec![flagged]).is_err());
        let two = vec![LocalCharacterDatum::trivial("a"), LocalCharacterDatum::trivial("b")];
        assert!(LocalPlaceDatum::new("v", PlaceKind::NonarchOther, two).is_err());
    }

    #[test]
    fn fractions() {
        assert_eq!(global_fraction(&r(1, 1), Parity::Even).unwrap(), r(1, 1));
        assert_eq!(global_fraction(&r(1, 1), Parity::Odd).unwrap(), r(0, 1));
        assert_eq!(global_fraction(&r(0, 1), Parity::Odd).unwrap(), r(1, 2));
        assert_eq!(global_fraction(&r(-3, 16), Parity::Odd).unwrap(), r(19, 32));
        assert!(global_fraction(&r(5, 4), Parity::Even).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let places = vec![place("a", &[1, -1, -1]), place("b", &[1, -1, -1])];
        assert_eq!(brute_force_gamma(&places, Statistic::Selmer2, Parity::Even, GAMMA_CAP).unwrap(), r(5, 9));
        assert_eq!(brute_force_gamma(&[place("a", &[1, 1])], Statistic::Selmer2, Parity::Even, GAMMA_CAP).unwrap(), r(1, 1));
        assert_eq!(brute_force_gamma(&places, Statistic::Selmer2, Parity::Even, 8), Err(Error::SizeLimit(8)));
        assert_eq!(brute_force_gamma(&[], Statistic::Selmer2, Parity::Odd, 1).unwrap(), r(0, 1));
    }

    #[test]
    fn example_kappa_values() {
        let places = vec![
            place("inf", &[1, 1]),
            place("2", &[1, 1, 1, 1, 1, 1, 1, -1]),
            place("5", &[1, -1, -1, -1]),
            place("2670719", &[1, 1, 1, -1]),
        ];
        let rep = disparity_report(&places, Statistic::TwoInf, Parity::Odd, true, GAMMA_CAP).unwrap();
        assert_eq!(rep.product, r(-3, 16));
        assert_eq!(rep.fraction_even, r(19, 32));
        assert_eq!(rep.fraction_odd, r(13, 32));
        assert_eq!(rep.brute_force_agrees, Some(true));
        assert_eq!(rep.gamma_size, Some(256));
    }

    #[test]
    fn closed_forms() {
        use PlaceKind::*;
        assert_eq!(norm_cokernel_dim(NonarchGoodOdd, false, 3, 2, 2).unwrap(), 0);
        assert_eq!(norm_cokernel_dim(NonarchGoodOdd, true, 3, 2, 2).unwrap(), 3);
        assert_eq!(norm_cokernel_dim(ArchimedeanReal, true, 2, 2, 2).unwrap(), 0);
        assert_eq!(norm_cokernel_dim(ArchimedeanReal, true, 3, 2, 2).unwrap(), 1);
        assert_eq!(norm_cokernel_dim(ArchimedeanComplex, true, 4, 2, 2).unwrap(), 0);
        assert!(matches!(norm_cokernel_dim(NonarchOther, true, 4, 2, 2), Err(Error::NotComputable(_))));
        assert!(norm_cokernel_dim(ArchimedeanReal, true, 1, 2, 2).is_err());
        assert!(norm_cokernel_dim(ArchimedeanReal, true, 2, 2, 3).is_err());
        assert_eq!(sha_local_term(NonarchGoodOdd, true, false, 1).unwrap(), r(0, 1));
        assert_eq!(sha_local_term(NonarchGoodOdd, false, true, 1).unwrap(), r(1, 2));
        assert_eq!(sha_local_term(NonarchGoodOdd, false, true, 2).unwrap(), r(0, 1));
        assert_eq!(sha_local_term(ArchimedeanComplex, false, true, 1).unwrap(), r(0, 1));
        assert!(sha_local_term(NonarchOther, false, true, 1).is_err());
    }

    #[test]
    fn ratio_strings() {
        assert_eq!(ratio_string(&r(-6, 32)), "-3/16");
        assert_eq!(ratio_string(&r(2, 2)), "1/1");
        assert_eq!(parse_ratio(" 3 / 4").unwrap(), r(3, 4));
        assert_eq!(parse_ratio("-2").unwrap(), r(-2, 1));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("a/b").is_err());
    }
}
