//! Verification and classification of order-6 complex Hadamard matrices.
//!
//! Membership in Karlsson's degenerate family `K6⁽³⁾` is detected through its
//! equivalent characterizations on a dephased matrix: a `−1` in the core, or a
//! vanishing sum of order 2 or 4 in some row or column. A vanishing 3×3 minor
//! also forces membership.
//!
//! Equivalence (`H = P1·D1·K·D2·P2`) is tested through a [`Fingerprint`], the
//! multiset of phases of the quartic products `h_ij·h_kl·h̄_il·h̄_kj`. The
//! fingerprint is invariant under the whole equivalence group, so different
//! fingerprints prove inequivalence. Equal fingerprints are only evidence of
//! equivalence: whether the invariant is complete in order 6 is not known.

use std::sync::OnceLock;

use crate::known::tao_s6;
use crate::matrix::{herm_eigs3, CMat3, CMat6};
use crate::triplet::triplet_residual;
use crate::types::{Quadruple, Tolerances, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HadamardCheck {
    pub is_hadamard: bool,
    /// `max(max|(HH*)_jk − 6δ_jk|, max||h_jk| − 1|)`
    pub residual: f64,
}

pub fn is_hadamard(h: &CMat6, tol: f64) -> HadamardCheck {
    let gram = *h * h.adjoint();
    let target = CMat6::identity().scale(C64::new(6.0, 0.0));
    let residual = gram.max_abs_diff(&target).max(h.max_unimodular_deviation());
    HadamardCheck {
        is_hadamard: h.is_finite() && residual <= tol,
        residual,
    }
}

/// Multiplies rows and columns by unimodular diagonals so that the first row
/// and column become all ones.
pub fn dephase(h: &CMat6) -> CMat6 {
    let rows = CMat6::from_fn(|i, j| h[(i, j)] / h[(i, 0)]);
    CMat6::from_fn(|i, j| rows[(i, j)] / rows[(0, j)])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct K63Flags {
    pub core_minus_one: bool,
    pub pair_sum: bool,
    pub quad_sum: bool,
}

impl K63Flags {
    pub fn any(&self) -> bool {
        self.core_minus_one || self.pair_sum || self.quad_sum
    }
}

fn lines(h: &CMat6) -> impl Iterator<Item = [C64; 6]> + '_ {
    (0..6).map(|i| h.row(i)).chain((0..6).map(|j| h.col(j)))
}

/// Indicators of `K6⁽³⁾` membership on a dephased Hadamard matrix.
///
/// `minus_one_tol` bounds `|h + 1|` for core entries, `sum_tol` bounds the
/// modulus of a vanishing sum.
pub fn k63_indicators(h: &CMat6, minus_one_tol: f64, sum_tol: f64) -> K63Flags {
    let core_minus_one = (1..6).any(|i| (1..6).any(|j| (h[(i, j)] + 1.0).norm() <= minus_one_tol));

    let mut pair_sum = false;
    let mut quad_sum = false;
    for line in lines(h) {
        for x in 0..6 {
            for y in (x + 1)..6 {
                if (line[x] + line[y]).norm() <= sum_tol {
                    pair_sum = true;
                }
                // a 4-subset is the complement of the pair {x, y}
                let total: C64 = line.iter().sum();
                if (total - line[x] - line[y]).norm() <= sum_tol {
                    quad_sum = true;
                }
            }
        }
    }
    K63Flags {
        core_minus_one,
        pair_sum,
        quad_sum,
    }
}

fn triples() -> impl Iterator<Item = [usize; 3]> {
    (0..6).flat_map(|a| ((a + 1)..6).flat_map(move |b| ((b + 1)..6).map(move |c| [a, b, c])))
}

/// Smallest `|det|` over all 400 3×3 minors.
pub fn min_minor(h: &CMat6) -> f64 {
    let mut best = f64::INFINITY;
    for rows in triples() {
        for cols in triples() {
            best = best.min(h.submatrix3(rows, cols).det().norm());
        }
    }
    best
}

/// `true` iff some 3×3 minor has `|det| ≤ 6·tol`.
pub fn vanishing_minor(h: &CMat6, tol: f64) -> bool {
    min_minor(h) <= 6.0 * tol
}

/// Sorted phases `|arg(h_ij·h_kl·h̄_il·h̄_kj)| ∈ [0, π]` over all `i<k`, `j<l`.
///
/// Folding the sign of the phase absorbs the conjugation caused by swapping a
/// single index pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Fingerprint(pub Vec<f64>);

impl Fingerprint {
    pub fn of(h: &CMat6) -> Self {
        let mut phases = Vec::with_capacity(225);
        for i in 0..6 {
            for k in (i + 1)..6 {
                for j in 0..6 {
                    for l in (j + 1)..6 {
                        let q = h[(i, j)] * h[(k, l)] * h[(i, l)].conj() * h[(k, j)].conj();
                        phases.push(q.arg().abs());
                    }
                }
            }
        }
        phases.sort_by(f64::total_cmp);
        Fingerprint(phases)
    }

    /// Largest elementwise difference of the sorted phase lists.
    pub fn distance(&self, other: &Fingerprint) -> f64 {
        if self.0.len() != other.0.len() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn fingerprint(h: &CMat6) -> Fingerprint {
    Fingerprint::of(h)
}

fn s6_fingerprint() -> &'static Fingerprint {
    static FP: OnceLock<Fingerprint> = OnceLock::new();
    FP.get_or_init(|| Fingerprint::of(&tao_s6()))
}

/// Whether `h` has the fingerprint of `S6⁽⁰⁾` within `tol` per phase.
pub fn s6_detect(h: &CMat6, tol: f64) -> bool {
    Fingerprint::of(h).distance(s6_fingerprint()) <= tol
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionCheck {
    pub passes: bool,
    pub lambda_max: f64,
}

/// Necessary embedding condition: every eigenvalue of `E*E` is at most 6.
pub fn contraction_precheck(e: &CMat3, tol: f64) -> ContractionCheck {
    let gram = e.adjoint() * *e;
    let lambda_max = herm_eigs3(&gram).map(|l| l[2]).unwrap_or(f64::INFINITY);
    ContractionCheck {
        passes: lambda_max <= 6.0 + tol,
        lambda_max,
    }
}

/// `ℰ(x, y) = x + y + x² + y² + x·y² + x²·y`; `y` is an elliptical pair of `x`
/// when it vanishes.
pub fn elliptical(x: C64, y: C64) -> C64 {
    x + y + x * x + y * y + x * y * y + x * x * y
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalCheck {
    pub passes: bool,
    /// Moduli of `b−1, c−1, b−d², c−d², b−c, bc−d, ℰ(b,d), ℰ(c,d)`.
    pub factors: [f64; 8],
}

/// Evaluates the factors that must all be nonzero for a seed in canonical
/// position. The condition is symmetric in `b` and `c`.
pub fn canonical_condition(q: &Quadruple, tol: f64) -> CanonicalCheck {
    let (b, c, d) = (q.b.value(), q.c.value(), q.d.value());
    let factors = [
        b - 1.0,
        c - 1.0,
        b - d * d,
        c - d * d,
        b - c,
        b * c - d,
        elliptical(b, d),
        elliptical(c, d),
    ]
    .map(|z| z.norm());
    CanonicalCheck {
        passes: factors.iter().all(|&f| f > tol),
        factors,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unbiasedness {
    pub unbiased: bool,
    /// `max ||⟨u, v⟩|² − 1/6|` over normalized column pairs.
    pub max_deviation: f64,
}

/// Tests whether the normalized columns of `h1` and `h2` form unbiased bases.
pub fn unbiased(h1: &CMat6, h2: &CMat6, tol: f64) -> Unbiasedness {
    let normalized = |h: &CMat6| -> Vec<[C64; 6]> {
        (0..6)
            .map(|j| {
                let col = h.col(j);
                let n = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                col.map(|z| z / n)
            })
            .collect()
    };
    let (u, v) = (normalized(h1), normalized(h2));
    let mut max_deviation: f64 = 0.0;
    for x in &u {
        for y in &v {
            let ip: C64 = x.iter().zip(y).map(|(p, q)| p.conj() * q).sum();
            max_deviation = max_deviation.max((ip.norm_sqr() - 1.0 / 6.0).abs());
        }
    }
    Unbiasedness {
        unbiased: max_deviation <= tol,
        max_deviation,
    }
}

/// Worst-case values of the triplet identity over all noninitial row (or
/// column) pairs and all 3-subsets of noninitial positions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IdentityScan {
    pub max_residual: f64,
    pub max_abs_haagerup: f64,
    pub max_abs_im_haagerup: f64,
    pub checked: usize,
}

impl IdentityScan {
    fn merge(self, other: IdentityScan) -> IdentityScan {
        IdentityScan {
            max_residual: self.max_residual.max(other.max_residual),
            max_abs_haagerup: self.max_abs_haagerup.max(other.max_abs_haagerup),
            max_abs_im_haagerup: self.max_abs_im_haagerup.max(other.max_abs_im_haagerup),
            checked: self.checked + other.checked,
        }
    }
}

fn row_identity_scan(h: &CMat6) -> IdentityScan {
    let mut scan = IdentityScan::default();
    let positions: Vec<[usize; 3]> = triples().filter(|t| t[0] > 0).collect();
    for i in 1..6 {
        for j in (i + 1)..6 {
            for cols in &positions {
                let first = cols.map(|c| h[(i, c)]);
                let second = cols.map(|c| h[(j, c)]);
                let r = triplet_residual(first, second, 0.0);
                scan.max_residual = scan.max_residual.max(r.residual);
                scan.max_abs_haagerup = scan.max_abs_haagerup.max(r.stats.haagerup.norm());
                scan.max_abs_im_haagerup = scan.max_abs_im_haagerup.max(r.stats.haagerup.im.abs());
                scan.checked += 1;
            }
        }
    }
    scan
}

/// Runs the triplet identity over rows and columns of the dephased form of `h`.
pub fn identity_scan(h: &CMat6) -> IdentityScan {
    let d = dephase(h);
    row_identity_scan(&d).merge(row_identity_scan(&d.transpose()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub hadamard: HadamardCheck,
    pub k63: K63Flags,
    pub vanishing_minor: bool,
    pub s6_equivalent: bool,
    /// Largest eigenvalue of `E*E` for the upper-left 3×3 block `E`.
    pub max_eig_estar_e: f64,
    pub fingerprint: Fingerprint,
}

impl ClassReport {
    /// Membership in `K6⁽³⁾` implied by any of the indicators.
    pub fn in_k63(&self) -> bool {
        self.k63.any() || (self.hadamard.is_hadamard && self.vanishing_minor)
    }
}

pub fn classify(h: &CMat6, tol: &Tolerances) -> ClassReport {
    let hadamard = is_hadamard(h, tol.orth);
    let d = dephase(h);
    let e = d.submatrix3([0, 1, 2], [0, 1, 2]);
    ClassReport {
        hadamard,
        k63: k63_indicators(&d, tol.unimodular_verify, tol.orth),
        vanishing_minor: vanishing_minor(h, tol.orth),
        s6_equivalent: s6_detect(h, tol.orth),
        max_eig_estar_e: contraction_precheck(&e, tol.orth).lambda_max,
        fingerprint: Fingerprint::of(h),
    }
}
