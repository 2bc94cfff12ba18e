use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::{
    norm_cokernel_dim, parse_ratio, sha_local_term, FrobeniusClassDatum, LocalCharacterDatum, LocalPlaceDatum,
    MarkovClassFile, Parity, PlaceKind, Statistic,
};
use crate::error::{Error, Result};
use crate::galois::Sign;

/// The disparity input document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisparityInput {
    pub p: u32,
    pub base_parity: Parity,
    pub statistic: Statistic,
    pub places: Vec<PlaceInput>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceInput {
    pub label: String,
    pub kind: PlaceKind,
    /// `dim A(K_v)[p]`; used to fill missing character data from closed forms.
    #[serde(default)]
    pub dim_torsion: Option<u32>,
    /// `dim A`; needed only at real places.
    #[serde(default)]
    pub dim_a: Option<u32>,
    pub characters: Vec<CharacterInput>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterInput {
    pub name: String,
    pub chi_delta: Sign,
    #[serde(default)]
    pub norm_cokernel_dim: Option<u32>,
    #[serde(default)]
    pub sha_term_double: Option<u8>,
    pub ramified: bool,
    #[serde(default)]
    pub trivial: bool,
}

impl DisparityInput {
    /// Places with every character complete. Missing `norm_cokernel_dim` and
    /// `sha_term_double` come from the closed forms, which need `dim_torsion`
    /// (and `dim_a` at real places).
    pub fn places(&self) -> Result<Vec<LocalPlaceDatum>> {
        if self.p < 2 || !(2..self.p).take_while(|d| d * d <= self.p).all(|d| self.p % d != 0) {
            return Err(Error::Schema { path: "p".into(), message: format!("{} is not prime", self.p) });
        }
        self.places.iter().enumerate().map(|(i, pl)| self.resolve(i, pl)).collect()
    }

    fn resolve(&self, i: usize, place: &PlaceInput) -> Result<LocalPlaceDatum> {
        let mut chars = Vec::with_capacity(place.characters.len());
        for (j, c) in place.characters.iter().enumerate() {
            let at = |field: &str| format!("places[{i}].characters[{j}].{field}");
            let nontrivial = c.ramified && !c.trivial;
            let need_dim = |field: &str| {
                place.dim_torsion.ok_or_else(|| Error::Schema {
                    path: at(field),
                    message: format!("missing, and place {} gives no dim_torsion to derive it", place.label),
                })
            };
            let norm = match c.norm_cokernel_dim {
                Some(n) => n,
                None => {
                    let dt = need_dim("norm_cokernel_dim")?;
                    let da = match (place.kind, nontrivial) {
                        (PlaceKind::ArchimedeanReal, true) => place.dim_a.ok_or_else(|| Error::Schema {
                            path: at("norm_cokernel_dim"),
                            message: "missing, and a real place needs dim_a to derive it".into(),
                        })?,
                        _ => 0,
                    };
                    norm_cokernel_dim(place.kind, nontrivial, dt, da, self.p)?
                }
            };
            let sha = match c.sha_term_double {
                Some(s) => s,
                None => {
                    let dt = need_dim("sha_term_double")?;
                    let term = sha_local_term(place.kind, c.trivial, c.ramified, dt)?;
                    (term * BigRational::from_integer(2.into())).to_integer().to_u8().expect("0 or 1")
                }
            };
            let mut datum = LocalCharacterDatum::new(c.name.clone(), c.chi_delta, norm, sha, c.ramified)
                .map_err(|e| Error::Schema { path: at("sha_term_double"), message: e.to_string() })?;
            datum.trivial = c.trivial;
            chars.push(datum);
        }
        LocalPlaceDatum::new(place.label.clone(), place.kind, chars)
            .map_err(|e| Error::Schema { path: format!("places[{i}]"), message: e.to_string() })
    }
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Schema { path, message: format!("{inner}") }
    })?;
    de.end().map_err(|e| Error::Schema { path: ".".into(), message: e.to_string() })?;
    Ok(value)
}

/// Parse and validate a disparity document.
pub fn parse_disparity(text: &str) -> Result<DisparityInput> {
    let input: DisparityInput = parse_json(text)?;
    input.places()?;
    Ok(input)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClassFile {
    p: u32,
    r: usize,
    classes: Vec<RawClass>,
    #[serde(default)]
    initial: Option<Vec<RatField>>,
    #[serde(default)]
    sequence: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    label: String,
    epsilon: Sign,
    rho: Vec<u32>,
    weight: RatField,
}

/// A rational given as `"num/den"` or as a JSON integer.
#[derive(Deserialize)]
#[serde(untagged)]
enum RatField {
    Text(String),
    Int(i64),
}

impl RatField {
    fn value(&self, path: &str) -> Result<BigRational> {
        match self {
            RatField::Text(s) => parse_ratio(s).map_err(|e| Error::Schema { path: path.into(), message: e.to_string() }),
            RatField::Int(n) => Ok(BigRational::from_integer((*n).into())),
        }
    }
}

/// Parse and validate a Markov class file.
pub fn parse_markov(text: &str) -> Result<MarkovClassFile> {
    let raw: RawClassFile = parse_json(text)?;
    let classes = raw
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Ok(FrobeniusClassDatum {
                label: c.label.clone(),
                epsilon: c.epsilon,
                rho: c.rho.clone(),
                weight: c.weight.value(&format!("classes[{i}].weight"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let initial = raw
        .initial
        .as_ref()
        .map(|v| v.iter().enumerate().map(|(i, x)| x.value(&format!("initial[{i}]"))).collect::<Result<Vec<_>>>())
        .transpose()?;
    let file = MarkovClassFile { p: raw.p, r: raw.r, classes, initial, sequence: raw.sequence };
    file.validate().map_err(|e| Error::Schema { path: ".".into(), message: e.to_string() })?;
    Ok(file)
}
