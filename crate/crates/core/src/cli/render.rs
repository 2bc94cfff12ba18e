use std::fmt::Write as _;

use serde::Serialize;

use super::{EpsilonReport, Format, FrobeniusReport, VerifyReport};
use crate::disparity::{ratio_string, DisparityReport, MarkovReport};
use crate::error::{Error, Result};

/// A report that can be written as JSON, CSV or plain text.
pub trait Render: Serialize {
    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>);

    fn text(&self) -> String;

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => serde_json::to_string_pretty(self)
                .map(|mut s| {
                    s.push('\n');
                    s
                })
                .map_err(|e| Error::Io(e.to_string())),
            Format::Csv => {
                let (header, rows) = self.csv_rows();
                write_csv(&header, &rows)
            }
            Format::Text => Ok(self.text()),
        }
    }
}

fn write_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().delimiter(b',').terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl Render for VerifyReport {
    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .suites
            .iter()
            .flat_map(|s| {
                s.checks.iter().map(move |c| {
                    vec![
                        s.suite.clone(),
                        c.name.clone(),
                        c.cases.to_string(),
                        c.failures.to_string(),
                        c.passed().to_string(),
                        c.first_failure.clone().unwrap_or_default(),
                    ]
                })
            })
            .collect();
        (vec!["suite", "identity", "cases", "failures", "passed", "first_failure"], rows)
    }

    fn text(&self) -> String {
        let mut s = String::new();
        for suite in &self.suites {
            let _ = writeln!(s, "[{} dim {}]", suite.suite, self.dim);
            for c in &suite.checks {
                let _ = writeln!(s, "{c}");
            }
        }
        let _ = writeln!(s, "{}", if self.passed { "all identities hold" } else { "IDENTITY FAILURE" });
        s
    }
}

impl Render for EpsilonReport {
    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let mut rows = vec![
            vec!["source".into(), self.source.clone()],
            vec!["p".into(), self.p.to_string()],
            vec!["dim".into(), self.dim.to_string()],
            vec!["group_order".into(), self.group_order.to_string()],
            vec!["classification".into(), self.classification.name().into()],
            vec!["elements_with_epsilon_minus".into(), self.elements_with_epsilon_minus.to_string()],
            vec!["kernel_order".into(), opt(&self.kernel_order)],
        ];
        if let Some(p) = &self.provenance {
            rows.push(vec!["group".into(), format!("{:?}", p.group).to_lowercase()]);
            rows.push(vec!["group_heuristic".into(), p.heuristic.to_string()]);
        }
        for (i, w) in self.witness.iter().enumerate() {
            rows.push(vec![format!("witness_{i}"), w.clone()]);
        }
        if let Some(t) = &self.theta {
            rows.push(vec!["theta_generates".into(), t.generates.to_string()]);
            rows.push(vec!["theta_eps_not_homomorphism".into(), t.eps_not_homomorphism.to_string()]);
        }
        (vec!["field", "value"], rows)
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "source: {}", self.source);
        let _ = writeln!(s, "group: order {} in GL_{}(F_{})", self.group_order, self.dim, self.p);
        if let Some(p) = &self.provenance {
            let how = if p.heuristic {
                format!("guessed from {} Frobenius samples ({} odd); heuristic", p.primes_sampled, p.odd_frobenius_seen)
            } else {
                "supplied".to_string()
            };
            let _ = writeln!(s, "galois group: {:?} ({how})", p.group);
        }
        let _ = writeln!(s, "classification: {}", self.classification.name());
        let _ = writeln!(s, "elements with epsilon = -1: {}", self.elements_with_epsilon_minus);
        if let Some(k) = self.kernel_order {
            let _ = writeln!(s, "kernel order: {k}");
        }
        for w in &self.witness {
            let _ = writeln!(s, "witness: {w}");
        }
        if let Some(t) = &self.theta {
            let _ = writeln!(
                s,
                "theta: |G/G^2| = {}, S generates {} of {}; generates = {}, eps not a homomorphism = {}{}",
                t.quotient_order,
                t.generated,
                2 * t.quotient_order,
                t.generates,
                t.eps_not_homomorphism,
                if t.consistent() { "" } else { "  INCONSISTENT" }
            );
        }
        s
    }
}

impl Render for DisparityReport {
    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let mut rows: Vec<Vec<String>> = self
            .places
            .iter()
            .map(|p| vec!["place".into(), p.label.clone(), p.kind.to_string(), p.characters.to_string(), ratio_string(&p.factor)])
            .collect();
        let total = |name: &str, v: String| vec![name.to_string(), String::new(), String::new(), String::new(), v];
        rows.push(total("product", ratio_string(&self.product)));
        rows.push(total("fraction_even", ratio_string(&self.fraction_even)));
        rows.push(total("fraction_odd", ratio_string(&self.fraction_odd)));
        if let Some(b) = &self.brute_force_fraction_even {
            rows.push(total("brute_force_fraction_even", ratio_string(b)));
        }
        (vec!["row", "label", "kind", "characters", "value"], rows)
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "statistic {} with {:?} base parity", self.statistic.name(), self.selmer_parity_base);
        for p in &self.places {
            let _ = writeln!(s, "  {:<12} {:<20} {:>6} characters  factor {}", p.label, p.kind.to_string(), p.characters, ratio_string(&p.factor));
        }
        let _ = writeln!(s, "product        {}", ratio_string(&self.product));
        let _ = writeln!(s, "fraction even  {}", ratio_string(&self.fraction_even));
        let _ = writeln!(s, "fraction odd   {}", ratio_string(&self.fraction_odd));
        match (&self.brute_force_fraction_even, self.brute_force_agrees) {
            (Some(b), Some(ok)) => {
                let _ = writeln!(s, "enumeration of Gamma ({} tuples): {} ({})", opt(&self.gamma_size), ratio_string(b), if ok { "agrees" } else { "DISAGREES" });
            }
            _ => {
                let _ = writeln!(s, "enumeration of Gamma skipped");
            }
        }
        s
    }
}

impl Render for FrobeniusReport {
    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .rows
            .iter()
            .map(|r| vec![r.prime.to_string(), opt(&r.cycle_type), r.epsilon.map(|e| e.value().to_string()).unwrap_or_default(), r.ramified.to_string()])
            .collect();
        (vec!["prime", "cycle_type", "epsilon", "ramified"], rows)
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "f = {}  (degree {}, discriminant {})", self.polynomial, self.degree, self.discriminant);
        for r in &self.rows {
            let ct = if r.ramified { "ramified".to_string() } else { opt(&r.cycle_type) };
            let eps = r.epsilon.map(|e| e.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{:>10}  {:<14} {}", r.prime, ct, eps);
        }
        let _ = writeln!(s, "unramified primes: {}, epsilon = -1 at {}", self.unramified, self.epsilon_minus);
        if let Some(g) = self.heuristic_group {
            let _ = writeln!(s, "group guess (heuristic): {g:?}");
        }
        s
    }
}

impl Render for MarkovReport {
    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .norm_squares
            .iter()
            .enumerate()
            .map(|(k, n)| {
                let label = if k == 0 { String::new() } else { self.draws[k - 1].clone() };
                vec![k.to_string(), label, ratio_string(n)]
            })
            .collect();
        (vec!["step", "class", "norm_squared"], rows)
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p = {}, r = {}, {} steps", self.p, self.r, self.steps);
        for (k, n) in self.norm_squares.iter().enumerate() {
            let label = if k == 0 { "start" } else { self.draws[k - 1].as_str() };
            let _ = writeln!(s, "{k:>6}  {label:<12} {}", ratio_string(n));
        }
        let _ = writeln!(s, "norm bound holds: {}", self.bound_holds);
        let _ = writeln!(s, "decays: {} (final/initial = {})", self.decays, ratio_string(&self.final_ratio));
        s
    }
}
