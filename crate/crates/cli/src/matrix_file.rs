//! On-disk matrix format.
//!
//! Phases are stored in turns as decimal strings. The strings use the
//! shortest representation that parses back to the same `f64`, so a phase
//! file round-trips bit for bit.

use hadamard6::classify::is_hadamard;
use hadamard6::{CMat6, Quadruple, Tolerances, UScalar, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Phases,
    Cartesian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Turns(String),
    Cartesian([f64; 2]),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceRecord {
    pub unimodular: f64,
    pub unimodular_verify: f64,
    pub orth: f64,
    pub root: f64,
    pub grid: usize,
}

impl From<Tolerances> for ToleranceRecord {
    fn from(t: Tolerances) -> Self {
        ToleranceRecord {
            unimodular: t.unimodular,
            unimodular_verify: t.unimodular_verify,
            orth: t.orth,
            root: t.root,
            grid: t.grid,
        }
    }
}

impl From<ToleranceRecord> for Tolerances {
    fn from(t: ToleranceRecord) -> Self {
        Tolerances {
            unimodular: t.unimodular,
            unimodular_verify: t.unimodular_verify,
            orth: t.orth,
            root: t.root,
            grid: t.grid,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub source: String,
    /// Seed `(a, b, c, d)` in turns, when the matrix came from a dilation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_turns: Option<[String; 4]>,
    pub tool_version: String,
    pub tolerances: ToleranceRecord,
    /// Hadamard residual of the matrix as stored in this file.
    pub hadamard_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub representation: Representation,
    pub entries: Vec<Vec<Entry>>,
    pub metadata: Metadata,
}

pub fn format_turns(t: f64) -> String {
    format!("{t}")
}

fn parse_turns(s: &str) -> Result<f64, CliError> {
    match s.trim().parse::<f64>() {
        Ok(t) if t.is_finite() => Ok(t),
        _ => Err(CliError::Input(format!("invalid phase {s:?}"))),
    }
}

/// Seed phases as given by the user, kept next to the derived quadruple so
/// that reports echo them exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Seed {
    pub turns: [f64; 4],
    pub quad: Quadruple,
}

impl Seed {
    pub fn from_turns(turns: [f64; 4]) -> Self {
        Seed {
            turns,
            quad: Quadruple::from_turns(turns),
        }
    }

    pub fn strings(&self) -> [String; 4] {
        self.turns.map(format_turns)
    }
}

impl MatrixFile {
    /// Builds a phase file from exact turns.
    pub fn from_turns(
        turns: &[[f64; 6]; 6],
        source: &str,
        tol: &Tolerances,
        seed: Option<&Seed>,
    ) -> Self {
        let entries = turns
            .iter()
            .map(|row| row.iter().map(|&t| Entry::Turns(format_turns(t))).collect())
            .collect();
        Self::finish(Representation::Phases, entries, source, tol, seed)
    }

    /// Builds a file from matrix values; phases are taken from the arguments.
    pub fn from_matrix(
        h: &CMat6,
        repr: Representation,
        source: &str,
        tol: &Tolerances,
        seed: Option<&Seed>,
    ) -> Self {
        let entries = (0..6)
            .map(|i| {
                (0..6)
                    .map(|j| {
                        let z = h[(i, j)];
                        match repr {
                            Representation::Phases => {
                                Entry::Turns(format_turns(UScalar::from_angle(z.arg()).turns()))
                            }
                            Representation::Cartesian => Entry::Cartesian([z.re, z.im]),
                        }
                    })
                    .collect()
            })
            .collect();
        Self::finish(repr, entries, source, tol, seed)
    }

    fn finish(
        repr: Representation,
        entries: Vec<Vec<Entry>>,
        source: &str,
        tol: &Tolerances,
        seed: Option<&Seed>,
    ) -> Self {
        let mut file = MatrixFile {
            n: 6,
            representation: repr,
            entries,
            metadata: Metadata {
                source: source.to_string(),
                seed_turns: seed.map(Seed::strings),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                tolerances: (*tol).into(),
                hadamard_residual: 0.0,
            },
        };
        let h = file.matrix().expect("freshly built file is well formed");
        file.metadata.hadamard_residual = is_hadamard(&h, tol.orth).residual;
        file
    }

    /// Materializes the stored entries.
    pub fn matrix(&self) -> Result<CMat6, CliError> {
        if self.n != 6 || self.entries.len() != 6 || self.entries.iter().any(|r| r.len() != 6) {
            return Err(CliError::Input(format!(
                "expected a 6×6 matrix, got n = {}",
                self.n
            )));
        }
        let mut h = CMat6::zeros();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                h[(i, j)] = match (self.representation, entry) {
                    (Representation::Phases, Entry::Turns(s)) => {
                        UScalar::from_turns(parse_turns(s)?).value()
                    }
                    (Representation::Cartesian, Entry::Cartesian([re, im])) => C64::new(*re, *im),
                    _ => {
                        return Err(CliError::Input(format!(
                            "entry ({i}, {j}) does not match representation {:?}",
                            self.representation
                        )))
                    }
                };
            }
        }
        Ok(h)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("malformed matrix file: {e}")))
    }
}
