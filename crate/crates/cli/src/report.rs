//! JSON views of library results.

use hadamard6::classify::{ClassReport, Fingerprint, K63Flags};
use hadamard6::dilation::{Outcome, SelectionBranch, Sextuple, SolutionSet};
use hadamard6::{DilationReport, UScalar};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::matrix_file::{format_turns, MatrixFile, Representation, Seed, ToleranceRecord};

#[derive(Debug, Serialize)]
pub struct K63Json {
    pub core_minus_one: bool,
    pub pair_sum: bool,
    pub quad_sum: bool,
}

impl From<K63Flags> for K63Json {
    fn from(k: K63Flags) -> Self {
        K63Json {
            core_minus_one: k.core_minus_one,
            pair_sum: k.pair_sum,
            quad_sum: k.quad_sum,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolutionJson {
    pub branch: &'static str,
    pub roots_turns: Vec<String>,
    /// `(e, s1, s2, f, s3, s4)` in turns.
    pub sextuples: Vec<[String; 6]>,
}

fn turns(u: UScalar) -> String {
    format_turns(u.turns())
}

fn sextuple_turns(s: &Sextuple) -> [String; 6] {
    [s.e, s.s1, s.s2, s.f, s.s3, s.s4].map(turns)
}

impl From<&SolutionSet> for SolutionJson {
    fn from(s: &SolutionSet) -> Self {
        SolutionJson {
            branch: match s.branch {
                SelectionBranch::RootTriplets => "root_triplets",
                SelectionBranch::Decomposition => "decomposition",
            },
            roots_turns: s.roots.iter().map(|&r| turns(r)).collect(),
            sextuples: s.sextuples.iter().map(sextuple_turns).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FoundJson {
    pub sol_b_index: usize,
    pub sol_c_index: usize,
    pub hadamard_residual: f64,
    pub k63: K63Json,
    pub s6_equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub matrix: MatrixFile,
}

#[derive(Debug, Serialize)]
pub struct RejectionJson {
    pub sol_b_index: usize,
    pub sol_c_index: usize,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct DiagnosticJson {
    pub step: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct EmbedReport {
    pub seed_turns: [String; 4],
    pub tolerances: ToleranceRecord,
    pub canonical_passes: bool,
    pub canonical_factors: [f64; 8],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction_passes: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sol_b: Option<SolutionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sol_c: Option<SolutionJson>,
    pub matrices: Vec<FoundJson>,
    pub rejections: Vec<RejectionJson>,
    pub diagnostics: Vec<DiagnosticJson>,
    pub outcome: &'static str,
}

pub fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Found => "found",
        Outcome::NoneFound => "none_found",
        Outcome::Rejected => "rejected",
        Outcome::Degenerate => "degenerate",
    }
}

impl EmbedReport {
    pub fn new(r: &DilationReport, seed: &Seed, repr: Representation) -> Self {
        EmbedReport {
            seed_turns: seed.strings(),
            tolerances: r.tolerances.into(),
            canonical_passes: r.canonical.passes,
            canonical_factors: r.canonical.factors,
            contraction_passes: r.contraction.map(|c| c.passes),
            lambda_max: r.contraction.map(|c| c.lambda_max),
            sol_b: r.sol_b.as_ref().map(SolutionJson::from),
            sol_c: r.sol_c.as_ref().map(SolutionJson::from),
            matrices: r
                .matrices
                .iter()
                .map(|m| FoundJson {
                    sol_b_index: m.sol_b_index,
                    sol_c_index: m.sol_c_index,
                    hadamard_residual: m.hadamard_residual,
                    k63: m.k63.into(),
                    s6_equivalent: m.s6_equivalent,
                    file: None,
                    matrix: MatrixFile::from_matrix(
                        &m.matrix,
                        repr,
                        "embed",
                        &r.tolerances,
                        Some(seed),
                    ),
                })
                .collect(),
            rejections: r
                .rejections
                .iter()
                .map(|(b, c, why)| RejectionJson {
                    sol_b_index: *b,
                    sol_c_index: *c,
                    reason: why.to_string(),
                })
                .collect(),
            diagnostics: r
                .diagnostics
                .iter()
                .map(|d| DiagnosticJson {
                    step: d.step.to_string(),
                    message: d.message.clone(),
                })
                .collect(),
            outcome: outcome_name(r.outcome),
        }
    }
}

/// SHA-256 of the fingerprint phases rounded to `1e-6` radians.
pub fn fingerprint_hash(fp: &Fingerprint) -> String {
    let mut hasher = Sha256::new();
    for x in &fp.0 {
        hasher.update(((x * 1e6).round() as i64).to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub is_hadamard: bool,
    pub hadamard_residual: f64,
    /// Residual recorded in the file's metadata.
    pub recorded_residual: f64,
    pub k63: K63Json,
    pub in_k63: bool,
    pub vanishing_minor: bool,
    pub s6_equivalent: bool,
    pub lambda_max_estar_e: f64,
    pub fingerprint_sha256: String,
}

impl VerifyReport {
    pub fn new(c: &ClassReport, recorded_residual: f64) -> Self {
        VerifyReport {
            is_hadamard: c.hadamard.is_hadamard,
            hadamard_residual: c.hadamard.residual,
            recorded_residual,
            k63: c.k63.into(),
            in_k63: c.in_k63(),
            vanishing_minor: c.vanishing_minor,
            s6_equivalent: c.s6_equivalent,
            lambda_max_estar_e: c.max_eig_estar_e,
            fingerprint_sha256: fingerprint_hash(&c.fingerprint),
        }
    }

    pub const CSV_HEADER: [&'static str; 11] = [
        "is_hadamard",
        "hadamard_residual",
        "recorded_residual",
        "core_minus_one",
        "pair_sum",
        "quad_sum",
        "in_k63",
        "vanishing_minor",
        "s6_equivalent",
        "lambda_max_estar_e",
        "fingerprint_sha256",
    ];

    pub fn csv_record(&self) -> [String; 11] {
        [
            self.is_hadamard.to_string(),
            self.hadamard_residual.to_string(),
            self.recorded_residual.to_string(),
            self.k63.core_minus_one.to_string(),
            self.k63.pair_sum.to_string(),
            self.k63.quad_sum.to_string(),
            self.in_k63.to_string(),
            self.vanishing_minor.to_string(),
            self.s6_equivalent.to_string(),
            self.lambda_max_estar_e.to_string(),
            self.fingerprint_sha256.clone(),
        ]
    }
}
