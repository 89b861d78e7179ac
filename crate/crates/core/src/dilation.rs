//! The dilation algorithm: embeds the seed block `E(a,b,c,d)` into 6×6 complex
//! Hadamard matrices
//!
//! ```text
//! [1  1  1 | 1  1  1 ]
//! [1  a  b | e  s1 s2]
//! [1  c  d | f  s3 s4]     [E B]
//! [1  g  h | *  *  * ]  =  [C D]
//! [1  t1 t3| *  *  * ]
//! [1  t2 t4| *  *  * ]
//! ```
//!
//! For a fixed seed and a unimodular `e`, reality of the Haagerup polynomial and
//! the triplet identity give two quadratics in `f`. Eliminating `f²` yields the
//! companion value `f = F(e)`, and `|F(e)| = 1` becomes a real trigonometric
//! sextic in `e` (the fundamental polynomial). Its unimodular roots give the
//! candidate blocks `B` (set `SOL_B`); the transposed seed gives the candidate
//! blocks `C` (set `SOL_C`). Each pair determines the unitary completion
//! `D = −C·E*·(B⁻¹)*`, which is kept when all its entries are unimodular.

use std::f64::consts::TAU;
use std::fmt;

use crate::classify::{
    canonical_condition, contraction_precheck, is_hadamard, k63_indicators, s6_detect,
    CanonicalCheck, ContractionCheck, K63Flags,
};
use crate::error::{Error, Result};
use crate::matrix::{inv3, CMat3, CMat6};
use crate::triplet::{complete_triplet, orthogonality_residual, TripletStats};
use crate::types::{Quadruple, Tolerances, UScalar, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Lower bound for magnitude references. Genuine coefficients are of order
/// 0.1–10 while identically vanishing ones come out near 1e-15, so relative
/// checks against this floor still see the latter as zero.
pub const SCALE_FLOOR: f64 = 1e-6;

/// Coefficients of the two quadratics `F1 + F2·f + F3·f² = 0` and
/// `G1 + G2·f + G3·f² = 0` satisfied by the companion `f` of `e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadCoeffs {
    pub f: [C64; 3],
    pub g: [C64; 3],
}

impl QuadCoeffs {
    /// `F3·G1 − F1·G3`
    pub fn numerator(&self) -> C64 {
        self.f[2] * self.g[0] - self.f[0] * self.g[2]
    }

    /// `F3·G2 − F2·G3`
    pub fn denominator(&self) -> C64 {
        self.f[2] * self.g[1] - self.f[1] * self.g[2]
    }

    /// Magnitude reference for the numerator and denominator.
    pub fn scale(&self) -> f64 {
        let m = |c: &[C64; 3]| c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        (m(&self.f) * m(&self.g)).max(SCALE_FLOOR)
    }

    /// Residuals of both quadratics at `x`, relative to their coefficient sums.
    pub fn relative_residual(&self, x: C64) -> f64 {
        let eval = |c: &[C64; 3]| {
            let v = c[0] + c[1] * x + c[2] * x * x;
            let s: f64 = c.iter().map(|z| z.norm()).sum();
            v.norm() / s.max(SCALE_FLOOR)
        };
        eval(&self.f).max(eval(&self.g))
    }

    /// Roots of the `F` quadratic (fewer when it degenerates).
    pub fn f_roots(&self) -> Vec<C64> {
        let [c0, c1, c2] = self.f;
        let s = c0.norm() + c1.norm() + c2.norm();
        if c2.norm() <= 1e-14 * s {
            if c1.norm() <= 1e-14 * s {
                return Vec::new();
            }
            return vec![-c0 / c1];
        }
        let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
        // pick the numerically stable pairing
        let q = if (c1.conj() * disc).re >= 0.0 {
            -(c1 + disc) / 2.0
        } else {
            -(c1 - disc) / 2.0
        };
        if q.norm() == 0.0 {
            return vec![C64::new(0.0, 0.0); 2];
        }
        vec![q / c2, c0 / q]
    }
}

/// `(R(f), S(f))` with `R = f·(ℋ − ℋ̄)` and `S = f·(ℋ − 4 + |Σ|² + |Δ|² + |Ψ|²)`
/// for the rows `(1,a,b,e)` and `(1,c,d,f)`; `f` must be unimodular.
fn triplet_forms(q: &Quadruple, e: C64, f: C64) -> (C64, C64) {
    let st = TripletStats::of([q.a.value(), q.b.value(), e], [q.c.value(), q.d.value(), f]);
    let h = st.haagerup;
    (f * (h - h.conj()), f * (h - st.identity_rhs()))
}

/// Recovers the quadratic coefficients by sampling at `f ∈ {1, i, −1}`.
///
/// Both forms are Laurent polynomials in `f` with exponents −1..1, hence
/// exact quadratics after the factor `f`. The held-out sample `f = −i` guards
/// that assumption.
pub fn quad_coeffs(q: &Quadruple, e: UScalar) -> Result<QuadCoeffs> {
    let e = e.value();
    let (r1, s1) = triplet_forms(q, e, ONE);
    let (ri, si) = triplet_forms(q, e, I);
    let (rm, sm) = triplet_forms(q, e, -ONE);
    let (rg, sg) = triplet_forms(q, e, -I);

    // p(1) = c0+c1+c2, p(i) = c0+i·c1−c2, p(−1) = c0−c1+c2
    let fit = |p1: C64, pi: C64, pm: C64| -> [C64; 3] {
        let c1 = (p1 - pm) / 2.0;
        let even = (p1 + pm) / 2.0;
        let odd = pi - I * c1;
        [(even + odd) / 2.0, c1, (even - odd) / 2.0]
    };
    let f = fit(r1, ri, rm);
    let g = fit(s1, si, sm);

    let at_guard = |c: &[C64; 3]| c[0] - I * c[1] - c[2];
    let scale = [r1, ri, rm, s1, si, sm]
        .iter()
        .fold(1.0f64, |m, z| m.max(z.norm()));
    let residual = (at_guard(&f) - rg).norm().max((at_guard(&g) - sg).norm());
    let bound = 1e-8 * scale;
    if residual.is_nan() || residual > bound {
        return Err(Error::InterpolationInconsistent { residual, bound });
    }
    Ok(QuadCoeffs { f, g })
}

/// The value `e` at which `F3` can vanish.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecialE {
    pub value: C64,
    pub is_unimodular: bool,
}

/// `(a²b + a²d + ab² + ad + b²c + bc) / (abc + abd + ac + a + bd + b)`.
pub fn special_e(q: &Quadruple, tol: f64) -> Result<SpecialE> {
    let (a, b, c, d) = (q.a.value(), q.b.value(), q.c.value(), q.d.value());
    let num = a * a * b + a * a * d + a * b * b + a * d + b * b * c + b * c;
    let den = a * b * c + a * b * d + a * c + a + b * d + b;
    if den.norm() <= f64::EPSILON * 8.0 {
        return Err(Error::ZeroDenominator);
    }
    let value = num / den;
    Ok(SpecialE {
        value,
        is_unimodular: (value.norm() - 1.0).abs() <= tol,
    })
}

/// Companion value `F(e) = −(F3·G1 − F1·G3)/(F3·G2 − F2·G3)`.
///
/// Not necessarily unimodular. Fails with [`Error::DegenerateDenominator`] when
/// the denominator is below `tol_root` relative to the coefficient scale.
pub fn companion(q: &Quadruple, e: UScalar, tol_root: f64) -> Result<C64> {
    companion_from(&quad_coeffs(q, e)?, tol_root)
}

fn companion_from(k: &QuadCoeffs, tol_root: f64) -> Result<C64> {
    let den = k.denominator();
    if den.norm() <= tol_root * k.scale() {
        return Err(Error::DegenerateDenominator { abs: den.norm() });
    }
    Ok(-k.numerator() / den)
}

/// `|F3G1 − F1G3|² − |F3G2 − F2G3|²` at `e`, together with
/// `|F3G1 − F1G3|² + |F3G2 − F2G3|²` as its magnitude reference.
/// Degeneracy checks floor the reference at [`SCALE_FLOOR`].
pub fn fundamental_parts(q: &Quadruple, e: UScalar) -> Result<(f64, f64)> {
    let k = quad_coeffs(q, e)?;
    let (n, d) = (k.numerator().norm_sqr(), k.denominator().norm_sqr());
    Ok((n - d, n + d))
}

/// The fundamental polynomial evaluated at a unimodular `e`; its zeros are the
/// `e` whose companion value is unimodular.
pub fn fundamental_value(q: &Quadruple, e: UScalar) -> Result<f64> {
    fundamental_parts(q, e).map(|(v, _)| v)
}

fn circular_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Unimodular roots of the fundamental polynomial, sorted by angle in `[0, 2π)`.
///
/// The real function `θ ↦ P(e^{iθ})` is sampled on `tol.grid` points. Sign
/// changes are bisected to `1e-13` in θ. Around each grid-local minimum of
/// `|P|` without a sign change the signed minimum is located: if `P` crosses
/// zero there, both crossings are bisected; if it only touches zero (grid value
/// below `√tol.root`, refined value below `tol.root`, both relative) the
/// touching point is a tangential root.
pub fn circle_roots(q: &Quadruple, tol: &Tolerances) -> Result<Vec<UScalar>> {
    let m = tol.grid;
    let eval = |theta: f64| fundamental_parts(q, UScalar::from_angle(theta));
    let thetas: Vec<f64> = (0..m).map(|k| TAU * k as f64 / m as f64).collect();
    let mut values = Vec::with_capacity(m);
    let mut scale = SCALE_FLOOR;
    for &t in &thetas {
        let (v, w) = eval(t)?;
        values.push(v);
        scale = scale.max(w);
    }
    let max_abs = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max_abs <= tol.root * scale {
        return Err(Error::DegenerateFamily {
            max_relative: max_abs / scale,
        });
    }

    let p = |theta: f64| eval(theta).map(|(v, _)| v);
    let mut found: Vec<f64> = Vec::new();
    for k in 0..m {
        let (t0, v0) = (thetas[k], values[k]);
        let t1 = if k + 1 == m { TAU } else { thetas[k + 1] };
        let v1 = values[(k + 1) % m];
        if v0 == 0.0 {
            found.push(t0);
            continue;
        }
        if v0 * v1 < 0.0 {
            found.push(bisect_sign_change(&p, t0, t1, v0)?.rem_euclid(TAU));
            continue;
        }
        // no sign change across the cell: a local minimum of |P| may hide a
        // close pair of roots or a tangential one
        let prev = values[(k + m - 1) % m];
        let same_sign = prev * v0 > 0.0 && v0 * v1 > 0.0;
        if same_sign && v0.abs() < prev.abs() && v0.abs() <= v1.abs() {
            let step = TAU / m as f64;
            let sign = v0.signum();
            let (lo, hi) = (t0 - step, t0 + step);
            let t = golden_min(|t| p(t).map(|v| sign * v), lo, hi)?;
            let vt = p(t)?;
            if sign * vt < 0.0 {
                found.push(bisect_sign_change(&p, lo, t, prev)?.rem_euclid(TAU));
                found.push(bisect_sign_change(&p, t, hi, vt)?.rem_euclid(TAU));
            } else if v0.abs() <= tol.root.sqrt() * scale && vt.abs() <= tol.root * scale {
                found.push(t.rem_euclid(TAU));
            }
        }
    }

    found.sort_by(f64::total_cmp);
    let mut roots: Vec<f64> = Vec::new();
    for t in found {
        if roots.iter().all(|&r| circular_distance(r, t) > tol.root) {
            roots.push(t);
        }
    }
    if roots.len() > 6 {
        return Err(Error::NumericalAnomaly(format!(
            "{} unimodular roots found for a degree-6 polynomial",
            roots.len()
        )));
    }
    Ok(roots.into_iter().map(UScalar::from_angle).collect())
}

/// Bisects `[lo, hi]` (with `p(lo)` of sign `v_lo`) down to `1e-13`.
fn bisect_sign_change(
    p: &impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    mut v_lo: f64,
) -> Result<f64> {
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let vm = p(mid)?;
        if vm == 0.0 {
            return Ok(mid);
        }
        if (vm < 0.0) == (v_lo < 0.0) {
            lo = mid;
            v_lo = vm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_min(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if hi - lo <= 1e-15 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One candidate completion of rows 2–3: `(e, s1, s2, f, s3, s4)`.
///
/// For the transposed seed the same fields hold `(g, t1, t2, h, t3, t4)`, the
/// noninitial entries of columns 2–3 below the seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sextuple {
    pub e: UScalar,
    pub s1: UScalar,
    pub s2: UScalar,
    pub f: UScalar,
    pub s3: UScalar,
    pub s4: UScalar,
}

impl Sextuple {
    pub fn top(&self) -> [C64; 3] {
        [self.e, self.s1, self.s2].map(UScalar::value)
    }

    pub fn bottom(&self) -> [C64; 3] {
        [self.f, self.s3, self.s4].map(UScalar::value)
    }

    fn pairs(&self) -> [(UScalar, UScalar); 3] {
        [(self.e, self.f), (self.s1, self.s3), (self.s2, self.s4)]
    }

    /// Worst violation among: `e+s1+s2 = −1−a−b`, orthogonality of the three
    /// completed rows, and both quadratics at each `(top, bottom)` pair.
    pub fn residual(&self, q: &Quadruple) -> Result<f64> {
        let sum = (self.top().iter().sum::<C64>() + ONE + q.a.value() + q.b.value()).norm();
        let orth = orthogonality_residual(
            [q.a.value(), q.b.value(), self.e.value()],
            [q.c.value(), q.d.value(), self.f.value()],
            [self.s1, self.s2, self.s3, self.s4].map(UScalar::value),
        );
        let mut worst = sum.max(orth);
        for (x, y) in self.pairs() {
            worst = worst.max(quad_coeffs(q, x)?.relative_residual(y.value()));
        }
        Ok(worst)
    }

    fn same_up_to_column_order(&self, other: &Sextuple, tol: f64) -> bool {
        let key = |s: &Sextuple| {
            let mut p = s.pairs();
            p.sort_by(|x, y| x.0.angle().total_cmp(&y.0.angle()));
            p
        };
        key(self).iter().zip(key(other).iter()).all(|(x, y)| {
            (x.0.value() - y.0.value()).norm() <= tol && (x.1.value() - y.1.value()).norm() <= tol
        })
    }
}

/// How the sextuples were selected from the roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionBranch {
    /// `F3` has no unimodular zero: `(e,f)`, `(s1,s3)`, `(s2,s4)` play symmetric
    /// roles and `{e, s1, s2}` are picked among the roots.
    RootTriplets,
    /// `F3` vanishes at a unimodular point: each root `e` is completed with
    /// the decomposition formula.
    Decomposition,
}

/// Pipeline stage a diagnostic refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Canonical,
    Contraction,
    SolB,
    SolC,
    Assemble,
    Classify,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Step::Canonical => "canonical",
            Step::Contraction => "contraction",
            Step::SolB => "sol_b",
            Step::SolC => "sol_c",
            Step::Assemble => "assemble",
            Step::Classify => "classify",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub step: Step,
    pub message: String,
}

/// Candidate set for one side (`SOL_B` or `SOL_C`).
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet {
    pub roots: Vec<UScalar>,
    pub branch: SelectionBranch,
    pub sextuples: Vec<Sextuple>,
    pub notes: Vec<String>,
}

/// Unimodular companions of `e`: `F(e)` normally, or both roots of the `F`
/// quadratic when the companion denominator vanishes as well.
fn companion_candidates(
    q: &Quadruple,
    e: UScalar,
    tol: &Tolerances,
    notes: &mut Vec<String>,
) -> Result<Vec<UScalar>> {
    let k = quad_coeffs(q, e)?;
    let raw = match companion_from(&k, tol.root) {
        Ok(f) => vec![f],
        Err(Error::DegenerateDenominator { .. }) => {
            notes.push(format!(
                "companion of e = {e} degenerate, using both roots of the F quadratic"
            ));
            k.f_roots()
        }
        Err(other) => return Err(other),
    };
    Ok(raw
        .into_iter()
        .filter_map(|f| UScalar::project(f, 2.0 * tol.unimodular_verify).ok())
        .collect())
}

fn build_side(q: &Quadruple, tol: &Tolerances) -> Result<SolutionSet> {
    let roots = circle_roots(q, tol)?;
    let mut notes = Vec::new();
    let branch = match special_e(q, tol.unimodular_verify) {
        Ok(s) if s.is_unimodular => SelectionBranch::Decomposition,
        Ok(_) => SelectionBranch::RootTriplets,
        Err(_) => {
            notes.push("special value of e has a zero denominator".into());
            SelectionBranch::RootTriplets
        }
    };
    let target = -(ONE + q.a.value() + q.b.value());

    let mut candidates: Vec<Sextuple> = Vec::new();
    let mut companions = Vec::with_capacity(roots.len());
    for &r in &roots {
        companions.push(companion_candidates(q, r, tol, &mut notes)?);
    }

    match branch {
        SelectionBranch::RootTriplets => {
            let n = roots.len();
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        let (e, s1, s2) = (roots[i], roots[j], roots[k]);
                        let miss = (e.value() + s1.value() + s2.value() - target).norm();
                        if miss > tol.orth {
                            continue;
                        }
                        for &f in &companions[i] {
                            for &s3 in &companions[j] {
                                for &s4 in &companions[k] {
                                    candidates.push(Sextuple {
                                        e,
                                        s1,
                                        s2,
                                        f,
                                        s3,
                                        s4,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        SelectionBranch::Decomposition => {
            for (i, &e) in roots.iter().enumerate() {
                for &f in &companions[i] {
                    let first = [q.a.value(), q.b.value(), e.value()];
                    let second = [q.c.value(), q.d.value(), f.value()];
                    match complete_triplet(first, second, 0.0, tol.orth) {
                        Ok(done) => {
                            for c in done {
                                let [s1, s2, s3, s4] = c.s.map(|z| UScalar::from_angle(z.arg()));
                                candidates.push(Sextuple {
                                    e,
                                    s1,
                                    s2,
                                    f,
                                    s3,
                                    s4,
                                });
                            }
                        }
                        Err(err) => notes.push(format!("root e = {e}: {err}")),
                    }
                }
            }
        }
    }

    let mut sextuples: Vec<Sextuple> = Vec::new();
    for s in candidates {
        let res = s.residual(q)?;
        if res > tol.orth {
            notes.push(format!(
                "candidate with e = {} rejected, residual {res:e}",
                s.e
            ));
            continue;
        }
        if sextuples
            .iter()
            .all(|t| !t.same_up_to_column_order(&s, tol.orth))
        {
            sextuples.push(s);
        }
    }
    Ok(SolutionSet {
        roots,
        branch,
        sextuples,
        notes,
    })
}

/// Candidate completions of rows 2–3 (the block `B`).
pub fn build_solb(q: &Quadruple, tol: &Tolerances) -> Result<SolutionSet> {
    build_side(q, tol)
}

/// Candidate completions of columns 2–3 (the block `C`): the row construction
/// applied to the transposed seed `(a, c, b, d)`.
pub fn build_solc(q: &Quadruple, tol: &Tolerances) -> Result<SolutionSet> {
    build_side(&q.transposed(), tol)
}

/// Why a `(SOL_B, SOL_C)` pair did not produce a Hadamard matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rejection {
    NonOrthogonal { residual: f64 },
    SingularB { det_abs: f64 },
    NonUnimodularD { max_deviation: f64 },
    NotHadamard { residual: f64 },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NonOrthogonal { residual } => {
                write!(f, "first rows/columns not orthogonal ({residual:e})")
            }
            Rejection::SingularB { det_abs } => write!(f, "B singular (|det| = {det_abs:e})"),
            Rejection::NonUnimodularD { max_deviation } => {
                write!(f, "D not unimodular (max deviation {max_deviation:e})")
            }
            Rejection::NotHadamard { residual } => {
                write!(f, "not Hadamard (residual {residual:e})")
            }
        }
    }
}

pub fn block_b(rb: &Sextuple) -> CMat3 {
    CMat3::new([[ONE; 3], rb.top(), rb.bottom()])
}

pub fn block_c(cb: &Sextuple) -> CMat3 {
    CMat3::new([
        [ONE, cb.e.value(), cb.f.value()],
        [ONE, cb.s1.value(), cb.s3.value()],
        [ONE, cb.s2.value(), cb.s4.value()],
    ])
}

pub fn from_blocks(e: &CMat3, b: &CMat3, c: &CMat3, d: &CMat3) -> CMat6 {
    CMat6::from_fn(|i, j| match (i < 3, j < 3) {
        (true, true) => e[(i, j)],
        (true, false) => b[(i, j - 3)],
        (false, true) => c[(i - 3, j)],
        (false, false) => d[(i - 3, j - 3)],
    })
}

/// Unitary completion `D = −C·E*·(B⁻¹)*`.
pub fn completion_block(e: &CMat3, b: &CMat3, c: &CMat3, singular_tol: f64) -> Result<CMat3> {
    let b_inv = inv3(b, singular_tol)?;
    Ok(-(*c * e.adjoint() * b_inv.adjoint()))
}

/// Builds the full matrix from a row candidate `rb` and a column candidate `cb`.
pub fn assemble(
    q: &Quadruple,
    rb: &Sextuple,
    cb: &Sextuple,
    tol: &Tolerances,
) -> std::result::Result<CMat6, Rejection> {
    let e = q.seed_matrix();
    let b = block_b(rb);
    let c = block_c(cb);

    let mut residual = 0.0f64;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let rows: C64 = (0..3)
                .map(|k| e[(i, k)] * e[(j, k)].conj() + b[(i, k)] * b[(j, k)].conj())
                .sum();
            let cols: C64 = (0..3)
                .map(|k| e[(k, i)] * e[(k, j)].conj() + c[(k, i)] * c[(k, j)].conj())
                .sum();
            residual = residual.max(rows.norm()).max(cols.norm());
        }
    }
    if residual > tol.orth {
        return Err(Rejection::NonOrthogonal { residual });
    }

    let d = match completion_block(&e, &b, &c, tol.root) {
        Ok(d) => d,
        Err(_) => {
            return Err(Rejection::SingularB {
                det_abs: b.det().norm(),
            })
        }
    };
    let max_deviation = d.max_unimodular_deviation();
    if max_deviation.is_nan() || max_deviation > tol.unimodular_verify {
        return Err(Rejection::NonUnimodularD { max_deviation });
    }
    let h = from_blocks(&e, &b, &c, &d);
    let check = is_hadamard(&h, tol.orth);
    if !check.is_hadamard {
        return Err(Rejection::NotHadamard {
            residual: check.residual,
        });
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoundMatrix {
    pub matrix: CMat6,
    pub sol_b_index: usize,
    pub sol_c_index: usize,
    pub hadamard_residual: f64,
    pub k63: K63Flags,
    pub s6_equivalent: bool,
}

/// Overall result of a dilation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// At least one Hadamard matrix was produced.
    Found,
    /// The pipeline completed without producing a matrix.
    NoneFound,
    /// The seed failed the canonical or contraction precheck.
    Rejected,
    /// The fundamental polynomial vanishes identically.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DilationReport {
    pub seed: Quadruple,
    pub tolerances: Tolerances,
    pub canonical: CanonicalCheck,
    pub contraction: Option<ContractionCheck>,
    pub sol_b: Option<SolutionSet>,
    pub sol_c: Option<SolutionSet>,
    pub matrices: Vec<FoundMatrix>,
    pub rejections: Vec<(usize, usize, Rejection)>,
    pub diagnostics: Vec<Diagnostic>,
    pub outcome: Outcome,
}

impl DilationReport {
    fn note(&mut self, step: Step, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            step,
            message: message.into(),
        });
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.matrices
            .iter()
            .map(|m| m.hadamard_residual)
            .reduce(f64::max)
    }
}

/// Runs the full pipeline on one seed. Failures never abort the run; they are
/// recorded in the report's diagnostics and outcome.
pub fn dilate(q: &Quadruple, tol: &Tolerances) -> DilationReport {
    let mut report = DilationReport {
        seed: *q,
        tolerances: *tol,
        canonical: canonical_condition(q, tol.orth),
        contraction: None,
        sol_b: None,
        sol_c: None,
        matrices: Vec::new(),
        rejections: Vec::new(),
        diagnostics: Vec::new(),
        outcome: Outcome::Rejected,
    };
    if let Err(err) = tol.validate() {
        report.note(Step::Canonical, err.to_string());
        return report;
    }
    if !report.canonical.passes {
        report.note(
            Step::Canonical,
            format!(
                "canonical condition fails, factor moduli {:?}",
                report.canonical.factors
            ),
        );
        return report;
    }
    let contraction = contraction_precheck(&q.seed_matrix(), tol.orth);
    report.contraction = Some(contraction);
    if !contraction.passes {
        report.note(
            Step::Contraction,
            format!(
                "largest eigenvalue of E*E is {} > 6, E cannot be embedded",
                contraction.lambda_max
            ),
        );
        return report;
    }

    for (step, side) in [
        (Step::SolB, build_solb(q, tol)),
        (Step::SolC, build_solc(q, tol)),
    ] {
        match side {
            Ok(set) => {
                for n in &set.notes {
                    report.note(step, n.clone());
                }
                if set.roots.is_empty() {
                    report.note(step, "no unimodular roots, E cannot be embedded");
                }
                if step == Step::SolB {
                    report.sol_b = Some(set);
                } else {
                    report.sol_c = Some(set);
                }
            }
            Err(err) => {
                report.note(step, err.to_string());
                report.outcome = if matches!(err, Error::DegenerateFamily { .. }) {
                    Outcome::Degenerate
                } else {
                    Outcome::NoneFound
                };
                return report;
            }
        }
    }

    let sol_b = report
        .sol_b
        .clone()
        .map(|s| s.sextuples)
        .unwrap_or_default();
    let sol_c = report
        .sol_c
        .clone()
        .map(|s| s.sextuples)
        .unwrap_or_default();
    for (i, rb) in sol_b.iter().enumerate() {
        for (j, cb) in sol_c.iter().enumerate() {
            match assemble(q, rb, cb, tol) {
                Ok(h) => {
                    let k63 = k63_indicators(&h, tol.unimodular_verify, tol.orth);
                    if k63.core_minus_one != k63.pair_sum {
                        report.note(
                            Step::Classify,
                            format!("K6(3) indicators disagree for pair ({i}, {j}): {k63:?}"),
                        );
                    }
                    report.matrices.push(FoundMatrix {
                        matrix: h,
                        sol_b_index: i,
                        sol_c_index: j,
                        hadamard_residual: is_hadamard(&h, tol.orth).residual,
                        k63,
                        s6_equivalent: s6_detect(&h, tol.orth),
                    });
                }
                Err(rej) => report.rejections.push((i, j, rej)),
            }
        }
    }
    report.outcome = if report.matrices.is_empty() {
        Outcome::NoneFound
    } else {
        Outcome::Found
    };
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::known::example_quadruple;

    #[test]
    fn interpolation_guard_holds_on_random_inputs() {
        for k in 0..50 {
            let t = k as f64 * 0.1234;
            let q = Quadruple::from_turns([t, 0.3 * t + 0.1, 0.7 - t, 0.05 * t]);
            assert!(quad_coeffs(&q, UScalar::from_turns(0.17 * t)).is_ok());
        }
    }

    fn seed_of(h: &CMat6) -> Quadruple {
        let one = |z: C64| UScalar::project(z, 1e-10).unwrap();
        Quadruple::new(
            one(h[(1, 1)]),
            one(h[(1, 2)]),
            one(h[(2, 1)]),
            one(h[(2, 2)]),
        )
    }

    #[test]
    fn hadamard_rows_satisfy_both_quadratics() {
        let r = dilate(&example_quadruple(), &Tolerances::default());
        let h = r.matrices[0].matrix;
        let q = seed_of(&h);
        for col in 3..6 {
            let k = quad_coeffs(&q, UScalar::project(h[(1, col)], 1e-10).unwrap()).unwrap();
            assert!(k.scale() > 1e-3, "coefficients must not be degenerate");
            assert!(k.relative_residual(h[(2, col)]) < 1e-8);
        }
    }

    #[test]
    fn equal_unit_seed_degenerates_f3() {
        // a = b = 1 puts the special value at e = 1 where F collapses
        let q = Quadruple::from_turns([0.0, 0.0, 0.2, 0.45]);
        let s = special_e(&q, 1e-8).unwrap();
        assert!(s.is_unimodular && (s.value - 1.0).norm() < 1e-12);
        let k = quad_coeffs(&q, UScalar::ONE).unwrap();
        assert!(k.f[2].norm() <= 1e-12);
    }

    #[test]
    fn f3_vanishes_at_unimodular_special_value() {
        // tune d until the special value lands on the unit circle
        let at = |t: f64| {
            let q = Quadruple::from_turns([0.11, 0.37, 0.52, t]);
            (q, special_e(&q, 1e-8).unwrap().value.norm() - 1.0)
        };
        let (mut lo, mut hi) = (0.0, 0.0);
        let mut found = false;
        for k in 0..400 {
            let (t0, t1) = (k as f64 / 400.0, (k + 1) as f64 / 400.0);
            if at(t0).1 * at(t1).1 < 0.0 {
                (lo, hi, found) = (t0, t1, true);
                break;
            }
        }
        assert!(found);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if at(lo).1 * at(mid).1 <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (q, _) = at(lo);
        let s = special_e(&q, 1e-8).unwrap();
        assert!(s.is_unimodular);
        let k = quad_coeffs(&q, UScalar::from_angle(s.value.arg())).unwrap();
        let mag = k.f.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(k.f[2].norm() <= 1e-9 * mag, "{:?}", k.f);
        let off = quad_coeffs(&q, UScalar::from_angle(s.value.arg() + 0.3)).unwrap();
        assert!(off.f[2].norm() > 1e-3 * mag);
    }

    #[test]
    fn special_e_examples() {
        let s = special_e(&Quadruple::from_turns([0.0; 4]), 1e-8).unwrap();
        assert!((s.value - 1.0).norm() < 1e-15 && s.is_unimodular);
        // (−1, 1, 1, −1): numerator −1+1+1+1−1−1... evaluated directly
        let q = Quadruple::from_turns([0.5, 0.0, 0.0, 0.5]);
        let (a, b, c, d) = (-1.0, 1.0, 1.0, -1.0);
        let num = a * a * b + a * a * d + a * b * b + a * d + b * b * c + b * c;
        let den = a * b * c + a * b * d + a * c + a + b * d + b;
        match special_e(&q, 1e-8) {
            Ok(s) => assert!((s.value - num / den).norm() < 1e-12),
            Err(e) => assert!(den == 0.0, "{e}"),
        }
    }

    #[test]
    fn example_seed_has_unimodular_companions() {
        let q = example_quadruple();
        let roots = circle_roots(&q, &Tolerances::default()).unwrap();
        assert!(!roots.is_empty() && roots.len() <= 6);
        for r in roots {
            assert!(fundamental_value(&q, r).unwrap().abs() < 1e-9);
            let f = companion(&q, r, 1e-9).unwrap();
            assert!((f.norm() - 1.0).abs() < 1e-7);
            let off = companion(&q, UScalar::from_angle(r.angle() + 1e-2), 1e-9).unwrap();
            assert!((off.norm() - 1.0).abs() > 1e-6);
        }
    }

    #[test]
    fn degenerate_fundamental_polynomial_reported() {
        // (ω, ω², ω², ω) and (ω², ω, ω, ω²) kill numerator and denominator identically
        let w = |k: f64| UScalar::from_turns(k / 3.0);
        for q in [
            Quadruple::new(w(1.0), w(2.0), w(2.0), w(1.0)),
            Quadruple::new(w(2.0), w(1.0), w(1.0), w(2.0)),
        ] {
            assert!(matches!(
                circle_roots(&q, &Tolerances::default()),
                Err(Error::DegenerateFamily { .. })
            ));
        }
        let w = |k: f64| UScalar::from_turns(k / 3.0);
        let q = Quadruple::new(w(1.0), w(2.0), w(2.0), w(1.0));
        assert!(matches!(
            companion(&q, UScalar::from_turns(0.1), 1e-9),
            Err(Error::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn solc_is_solb_of_transposed_seed() {
        let q = example_quadruple();
        let tol = Tolerances::default();
        assert_eq!(
            build_solc(&q, &tol).unwrap(),
            build_solb(&q.transposed(), &tol).unwrap()
        );
    }

    #[test]
    fn singular_b_rejected() {
        let q = example_quadruple();
        let tol = Tolerances::default();
        let u = UScalar::ONE;
        // e = s1 = s2 = f = s3 = s4 = 1 gives a rank-1 B
        let rb = Sextuple {
            e: u,
            s1: u,
            s2: u,
            f: u,
            s3: u,
            s4: u,
        };
        let loose = Tolerances { orth: 1e3, ..tol };
        assert!(matches!(
            assemble(&q, &rb, &rb, &loose),
            Err(Rejection::SingularB { .. })
        ));
        assert!(matches!(
            assemble(&q, &rb, &rb, &tol),
            Err(Rejection::NonOrthogonal { .. })
        ));
    }

    #[test]
    fn rejected_seeds() {
        let tol = Tolerances::default();
        let r = dilate(&Quadruple::from_turns([0.0; 4]), &tol);
        assert_eq!(r.outcome, Outcome::Rejected);
        assert_eq!(r.diagnostics[0].step, Step::Canonical);

        let near_ones = Quadruple::from_turns([0.001, 0.002, 0.003, 0.004]);
        let r = dilate(&near_ones, &tol);
        assert_eq!(r.outcome, Outcome::Rejected);
        assert_eq!(r.diagnostics[0].step, Step::Contraction);
        assert!(r.contraction.unwrap().lambda_max > 8.9);
    }
}
