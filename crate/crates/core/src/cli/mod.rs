//! Command-line front end. Every subcommand returns a report plus an exit code:
//! 0 on success, 1 when a checked identity fails, 2 on bad input.

mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::check::IdentityCheck;
use crate::disparity::{self, DisparityReport, Draws, MarkovReport};
use crate::error::{Error, Result};
use crate::galois::{
    epsilon_from_cycle_type, guess_group, CycleType, EvenSubsetModel, EpsilonClassification, Frobenius,
    FrobeniusSampler, GaloisImage, GroupGuess, IntPolynomial, Sign, ThetaReport,
};
use crate::gflinalg::{FpMatrix, MatrixGroup, Prime, DEFAULT_CLOSURE_CAP};

pub use render::Render;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILURE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "quadtwist", version, about = "Exact finite algebra for Selmer parity in quadratic twist families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format (each subcommand has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Skip brute-force cross-checks.
    #[arg(long, global = true)]
    pub no_oracle: bool,
    /// Size cap: |Γ| for disparity, group order for epsilon.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the exhaustive identity sweeps.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
    /// Classify ε on a group given by generators or by a hyperelliptic polynomial.
    Epsilon {
        /// Polynomial such as "x^6+x^4+x+3" or "[3,1,0,0,1,0,1]".
        poly: Option<String>,
        /// JSON file with "generators" (and optionally "p" and "gram").
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        p: Option<u32>,
        /// Galois group of the polynomial; `auto` guesses from Frobenius samples.
        #[arg(long, value_enum, default_value = "auto")]
        group: GroupChoice,
        /// Primes sampled by `--group auto`, as a half-open range LO..HI.
        #[arg(long, default_value = "3..2000")]
        primes: PrimeRange,
    },
    /// Local factors, product and even fraction from a JSON ledger.
    Disparity {
        #[arg(long)]
        input: PathBuf,
    },
    /// Frobenius cycle types over a half-open prime range.
    Frobenius {
        poly: String,
        #[arg(long, default_value = "3..1000")]
        primes: PrimeRange,
    },
    /// Run the Markov recurrence from a class file.
    Markov {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Quadform,
    Pollatsek,
    Cohomology,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupChoice {
    Auto,
    Symmetric,
    Alternating,
}

/// `LO..HI`, half-open, both below `2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeRange {
    pub lo: u64,
    pub hi: u64,
}

impl FromStr for PrimeRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, found {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad bound {t:?} in {s:?}"));
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo >= 1 << 32 || hi > 1 << 32 {
            return Err("prime bounds must be below 2^32".into());
        }
        Ok(PrimeRange { lo, hi })
    }
}

/// Parse `args` (program name first), run, and write the report. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let _ = write!(err, "{}", e.render());
            return EXIT_INPUT_ERROR;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, text.as_bytes()).map_err(Error::from),
                None => out.write_all(text.as_bytes()).map_err(Error::from),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_INPUT_ERROR
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

/// The rendered report and its exit code.
pub fn execute(cli: &Cli) -> Result<(String, i32)> {
    match &cli.command {
        Command::Verify { suite, dim } => {
            let report = cmd_verify(*suite, *dim)?;
            let code = if report.passed { EXIT_OK } else { EXIT_IDENTITY_FAILURE };
            Ok((report.render(cli.format.unwrap_or(Format::Text))?, code))
        }
        Command::Epsilon { poly, input, p, group, primes } => {
            let source = match (poly, input) {
                (Some(f), None) => EpsilonSource::Polynomial { poly: IntPolynomial::parse(f)?, group: *group, primes: *primes },
                (None, Some(path)) => EpsilonSource::Generators(read_generators(path, *p)?),
                _ => return Err(Error::InvalidArgument("give exactly one of a polynomial or --input".into())),
            };
            let cap = cli.cap.map_or(DEFAULT_CLOSURE_CAP, |c| c as usize);
            let report = cmd_epsilon(source, cap)?;
            let code = if report.theta.as_ref().is_none_or(ThetaReport::consistent) { EXIT_OK } else { EXIT_IDENTITY_FAILURE };
            Ok((report.render(cli.format.unwrap_or(Format::Text))?, code))
        }
        Command::Disparity { input } => {
            let text = read(input)?;
            let cap = cli.cap.unwrap_or(disparity::GAMMA_CAP);
            let report = cmd_disparity(&text, !cli.no_oracle, cap)?;
            let code = if report.brute_force_agrees == Some(false) { EXIT_IDENTITY_FAILURE } else { EXIT_OK };
            Ok((report.render(cli.format.unwrap_or(Format::Json))?, code))
        }
        Command::Frobenius { poly, primes } => {
            let report = cmd_frobenius(&IntPolynomial::parse(poly)?, *primes)?;
            Ok((report.render(cli.format.unwrap_or(Format::Csv))?, EXIT_OK))
        }
        Command::Markov { input, steps } => {
            let file = disparity::parse_markov(&read(input)?)?;
            let report = cmd_markov(&file, *steps, cli.seed)?;
            let code = if report.bound_holds { EXIT_OK } else { EXIT_IDENTITY_FAILURE };
            Ok((report.render(cli.format.unwrap_or(Format::Json))?, code))
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub checks: Vec<IdentityCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub dim: usize,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

/// Run one or all identity suites on the hyperbolic space of dimension 2 or 4.
pub fn cmd_verify(suite: Suite, dim: usize) -> Result<VerifyReport> {
    if dim != 2 && dim != 4 {
        return Err(Error::InvalidArgument(format!("--dim must be 2 or 4, got {dim}")));
    }
    let mut suites = Vec::new();
    if matches!(suite, Suite::Quadform | Suite::All) {
        suites.push(SuiteResult { suite: "quadform".into(), checks: crate::quadform::verify_suite(dim)? });
    }
    if matches!(suite, Suite::Pollatsek | Suite::All) {
        suites.push(SuiteResult { suite: "pollatsek".into(), checks: crate::pollatsek::verify_suite(dim)? });
    }
    if matches!(suite, Suite::Cohomology | Suite::All) {
        suites.push(SuiteResult { suite: "cohomology".into(), checks: crate::cohomology::verify_suite(dim)? });
    }
    let passed = suites.iter().flat_map(|s| &s.checks).all(IdentityCheck::passed);
    Ok(VerifyReport { dim, passed, suites })
}

/// A generators file: `{"p": 2, "gram": [[...]], "generators": [[[...]], ...]}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsFile {
    #[serde(default)]
    pub p: Option<u32>,
    #[serde(default)]
    pub gram: Option<Vec<Vec<i64>>>,
    pub generators: Vec<Vec<Vec<i64>>>,
}

/// The standard alternating form `Σ e_{2i} ∧ e_{2i+1}`.
pub fn standard_gram(p: Prime, dim: usize) -> FpMatrix {
    let mut m = FpMatrix::zeros(p, dim, dim);
    for i in 0..dim / 2 {
        m.set(2 * i, 2 * i + 1, 1);
        m.set(2 * i + 1, 2 * i, p.get() - 1);
    }
    m
}

fn read_generators(path: &Path, p_flag: Option<u32>) -> Result<(MatrixGroup, FpMatrix)> {
    let text = read(path)?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let file: GeneratorsFile = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| Error::Schema { path: e.path().to_string(), message: e.into_inner().to_string() })?;
    generators_image(&file, p_flag)
}

/// Group and Gram matrix from a generators file; `p_flag` must agree with the file's `p`.
pub fn generators_image(file: &GeneratorsFile, p_flag: Option<u32>) -> Result<(MatrixGroup, FpMatrix)> {
    let p = match (file.p, p_flag) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::InvalidArgument(format!("--p {b} disagrees with p = {a} in the generators file")));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => 2,
    };
    let p = Prime::new(p)?;
    let first = file.generators.first().ok_or_else(|| Error::Schema { path: "generators".into(), message: "empty list".into() })?;
    let dim = first.len();
    let mats: Vec<FpMatrix> = file
        .generators
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(Error::Schema { path: format!("generators[{i}]"), message: format!("expected a {dim}x{dim} matrix") });
            }
            FpMatrix::from_rows(p, rows)
        })
        .collect::<Result<_>>()?;
    let gram = match &file.gram {
        Some(rows) => FpMatrix::from_rows(p, rows)?,
        None => standard_gram(p, dim),
    };
    Ok((MatrixGroup::new(p, dim, mats)?, gram))
}

pub enum EpsilonSource {
    Generators((MatrixGroup, FpMatrix)),
    Polynomial { poly: IntPolynomial, group: GroupChoice, primes: PrimeRange },
}

/// How the group was obtained for a polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct GroupProvenance {
    pub group: GroupGuess,
    /// True when the group was guessed from Frobenius cycle types rather than supplied.
    pub heuristic: bool,
    pub primes_sampled: usize,
    pub odd_frobenius_seen: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonReport {
    pub source: String,
    pub p: u32,
    pub dim: usize,
    pub group_order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<GroupProvenance>,
    pub classification: EpsilonClassification,
    pub elements_with_epsilon_minus: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_order: Option<usize>,
    /// Matrices of the witness elements, rows as strings.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaReport>,
}

/// Classify `ε` and, for `p = 2`, cross-check with the surjectivity criterion.
pub fn cmd_epsilon(source: EpsilonSource, cap: usize) -> Result<EpsilonReport> {
    let (gi, label, provenance) = match source {
        EpsilonSource::Generators((group, gram)) => (GaloisImage::new(group.with_cap(cap), gram)?, "generators".to_string(), None),
        EpsilonSource::Polynomial { poly, group, primes } => {
            let n = poly.degree();
            if n < 5 {
                return Err(Error::InvalidArgument(format!("the hyperelliptic model needs degree >= 5, got {n}")));
            }
            let sampler = FrobeniusSampler::new(poly.clone())?;
            if sampler.discriminant() == &BigInt::from(0) {
                return Err(Error::InvalidPolynomial(format!("{poly} has a repeated root")));
            }
            let provenance = match group {
                GroupChoice::Symmetric => GroupProvenance { group: GroupGuess::Symmetric, heuristic: false, primes_sampled: 0, odd_frobenius_seen: 0 },
                GroupChoice::Alternating => GroupProvenance { group: GroupGuess::Alternating, heuristic: false, primes_sampled: 0, odd_frobenius_seen: 0 },
                GroupChoice::Auto => {
                    let samples = sample_cycle_types(&sampler, primes)?;
                    let odd = samples.iter().filter(|c| c.sign() == Sign::Minus).count();
                    GroupProvenance { group: guess_group(&samples), heuristic: true, primes_sampled: samples.len(), odd_frobenius_seen: odd }
                }
            };
            let model = EvenSubsetModel::new(n)?;
            let image = match provenance.group {
                GroupGuess::Symmetric => model.symmetric_image()?,
                GroupGuess::Alternating => model.alternating_image()?,
            };
            let gi = GaloisImage::new(image.with_cap(cap), model.space().gram().clone())?;
            (gi, poly.to_string(), Some(provenance))
        }
    };
    let table = gi.table()?;
    let classification = gi.classify()?;
    let minus = gi.epsilons()?.iter().filter(|&&s| s == Sign::Minus).count();
    let show = |i: usize| table.element(i).to_string();
    let (kernel_order, witness) = match &classification {
        EpsilonClassification::HomomorphismTrivial => (Some(table.order()), Vec::new()),
        EpsilonClassification::HomomorphismNontrivial { kernel } => (Some(kernel.len()), Vec::new()),
        EpsilonClassification::NotHomomorphism { witness: (g, h) } => (None, vec![show(*g), show(*h)]),
        EpsilonClassification::NontrivialOnSp { witness } => (None, vec![show(*witness)]),
        EpsilonClassification::TrivialOnSp => (None, Vec::new()),
    };
    let p = gi.group().prime();
    let theta = if p.is_two() { Some(gi.theta_criterion()?) } else { None };
    Ok(EpsilonReport {
        source: label,
        p: p.get(),
        dim: gi.group().dim(),
        group_order: table.order(),
        provenance,
        classification,
        elements_with_epsilon_minus: minus,
        kernel_order,
        witness,
        theta,
    })
}

fn sample_cycle_types(sampler: &FrobeniusSampler, range: PrimeRange) -> Result<Vec<CycleType>> {
    let lc = sampler.polynomial().leading().clone();
    let mut out = Vec::new();
    for l in crate::galois::primes_in(range.lo, range.hi) {
        if l == 2 || lc.is_multiple_of(&BigInt::from(l)) {
            continue;
        }
        if let Frobenius::Unramified(ct) = sampler.cycle_type(l)? {
            out.push(ct);
        }
    }
    Ok(out)
}

pub fn cmd_disparity(text: &str, oracle: bool, cap: u64) -> Result<DisparityReport> {
    let input = disparity::parse_disparity(text)?;
    let places = input.places()?;
    disparity::disparity_report(&places, input.statistic, input.base_parity, oracle, cap)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusRow {
    pub prime: u64,
    pub cycle_type: Option<CycleType>,
    pub epsilon: Option<Sign>,
    pub ramified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrobeniusReport {
    pub polynomial: String,
    pub degree: usize,
    pub discriminant: String,
    /// `2` and primes dividing the leading coefficient are not sampled.
    pub skipped: Vec<u64>,
    pub rows: Vec<FrobeniusRow>,
    pub unramified: usize,
    pub epsilon_minus: usize,
    /// Guessed from the sampled cycle types; not a proof.
    pub heuristic_group: Option<GroupGuess>,
}

/// Frobenius cycle types at every odd prime in `range` not dividing the leading coefficient.
pub fn cmd_frobenius(poly: &IntPolynomial, range: PrimeRange) -> Result<FrobeniusReport> {
    let sampler = FrobeniusSampler::new(poly.clone())?;
    let n = poly.degree();
    let lc = poly.leading().clone();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for l in crate::galois::primes_in(range.lo, range.hi) {
        if l == 2 || lc.is_multiple_of(&BigInt::from(l)) {
            skipped.push(l);
            continue;
        }
        rows.push(match sampler.cycle_type(l)? {
            Frobenius::Ramified => FrobeniusRow { prime: l, cycle_type: None, epsilon: None, ramified: true },
            Frobenius::Unramified(ct) => {
                let epsilon = if n >= 5 { Some(epsilon_from_cycle_type(&ct, n)?) } else { None };
                FrobeniusRow { prime: l, cycle_type: Some(ct), epsilon, ramified: false }
            }
        });
    }
    let types: Vec<CycleType> = rows.iter().filter_map(|r| r.cycle_type.clone()).collect();
    Ok(FrobeniusReport {
        polynomial: poly.to_string(),
        degree: n,
        discriminant: sampler.discriminant().to_string(),
        skipped,
        unramified: types.len(),
        epsilon_minus: rows.iter().filter(|r| r.epsilon == Some(Sign::Minus)).count(),
        heuristic_group: (!types.is_empty()).then(|| guess_group(&types)),
        rows,
    })
}

/// Run the recurrence with the file's sequence if present, else seeded draws.
pub fn cmd_markov(file: &disparity::MarkovClassFile, steps: usize, seed: u64) -> Result<MarkovReport> {
    let draws = match &file.sequence {
        Some(seq) => Draws::Sequence(seq.clone()),
        None => Draws::Seeded(seed),
    };
    disparity::markov_run(file, file.initial_state()?, steps, &draws)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("quadtwist").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn prime_ranges() {
        assert_eq!("3..100".parse::<PrimeRange>().unwrap(), PrimeRange { lo: 3, hi: 100 });
        assert!("3-100".parse::<PrimeRange>().is_err());
        assert!("0..99999999999".parse::<PrimeRange>().is_err());
    }

    #[test]
    fn verify_rejects_dim_six() {
        let (code, _, err) = run_args(&["verify", "--dim", "6"]);
        assert_eq!(code, EXIT_INPUT_ERROR);
        assert!(err.contains("2 or 4"));
    }

    #[test]
    fn verify_dim_two_passes() {
        let (code, out, _) = run_args(&["verify", "all", "--dim", "2"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.lines().all(|l| !l.starts_with("FAIL")));
    }

    #[test]
    fn frobenius_small() {
        let (code, out, _) = run_args(&["frobenius", "x^2+1", "--primes", "3..14"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "prime,cycle_type,epsilon,ramified\n3,2,,false\n5,1-1,,false\n7,2,,false\n11,2,,false\n13,1-1,,false\n");
        let (code, out, _) = run_args(&["frobenius", "x^2+1", "--primes", "50..40"]);
        assert_eq!((code, out.as_str()), (EXIT_OK, "prime,cycle_type,epsilon,ramified\n"));
    }

    #[test]
    fn epsilon_sextic() {
        let (code, out, _) = run_args(&["epsilon", "x^6+x^4+x+3", "--group", "symmetric", "--format", "json"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["classification"]["kind"], "NotHomomorphism");
        assert_eq!(v["group_order"], 720);
        assert_eq!(v["theta"]["generates"], true);
    }

    #[test]
    fn bad_inputs_exit_two() {
        assert_eq!(run_args(&["epsilon", "x^4+1"]).0, EXIT_INPUT_ERROR);
        assert_eq!(run_args(&["epsilon", "x^^2"]).0, EXIT_INPUT_ERROR);
        assert_eq!(run_args(&["disparity", "--input", "/nonexistent.json"]).0, EXIT_INPUT_ERROR);
        assert_eq!(run_args(&["nonsense"]).0, EXIT_INPUT_ERROR);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }
}
