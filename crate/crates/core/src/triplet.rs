//! Orthogonality of row triplets.
//!
//! Three rows of a dephased order-6 matrix are written as
//!
//! ```text
//! (1, 1, 1, 1, 1,  1 )
//! (1, a, b, e, s1, s2)
//! (1, c, d, f, s3, s4)
//! ```
//!
//! With `Σ = 1+a+b+e`, `Δ = 1+c+d+f` and `Ψ = 1+c·ā+d·b̄+f·ē`, the Haagerup
//! polynomial is `ℋ = Σ·Δ̄·Ψ`. Unimodular `s1..s4` making the three rows
//! mutually orthogonal exist iff `ℋ = 4 − |Σ|² − |Δ|² − |Ψ|²` and `|ℋ| ≤ 8`.
//! This module evaluates those quantities and builds the completions.

use crate::error::{Error, Result};
use crate::types::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Partial-row sums and the Haagerup polynomial of a row triplet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripletStats {
    pub sigma: C64,
    pub delta: C64,
    pub psi: C64,
    pub haagerup: C64,
}

impl TripletStats {
    /// `first = (a, b, e)`, `second = (c, d, f)`.
    pub fn of(first: [C64; 3], second: [C64; 3]) -> Self {
        let one = C64::new(1.0, 0.0);
        let sigma = one + first[0] + first[1] + first[2];
        let delta = one + second[0] + second[1] + second[2];
        let psi = one
            + second[0] * first[0].conj()
            + second[1] * first[1].conj()
            + second[2] * first[2].conj();
        TripletStats {
            sigma,
            delta,
            psi,
            haagerup: sigma * delta.conj() * psi,
        }
    }

    /// Right-hand side `4 − |Σ|² − |Δ|² − |Ψ|²` of the triplet identity.
    pub fn identity_rhs(&self) -> f64 {
        4.0 - self.sigma.norm_sqr() - self.delta.norm_sqr() - self.psi.norm_sqr()
    }
}

/// `ℋ(a,b,c,d,e,f) = (1+a+b+e)(1+c̄+d̄+f̄)(1+c·ā+d·b̄+f·ē)` for `first = (a,b,e)`,
/// `second = (c,d,f)`.
pub fn haagerup_poly(first: [C64; 3], second: [C64; 3]) -> C64 {
    TripletStats::of(first, second).haagerup
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripletResidual {
    /// `|ℋ − (4 − |Σ|² − |Δ|² − |Ψ|²)|`
    pub residual: f64,
    /// `|ℋ| ≤ 8 + tol`
    pub ni_ok: bool,
    pub stats: TripletStats,
}

pub fn triplet_residual(first: [C64; 3], second: [C64; 3], tol: f64) -> TripletResidual {
    let stats = TripletStats::of(first, second);
    TripletResidual {
        residual: (stats.haagerup - stats.identity_rhs()).norm(),
        ni_ok: stats.haagerup.norm() <= 8.0 + tol,
        stats,
    }
}

/// Unimodular `(s1, s2)` with `s1 + s2 = −Σ`.
///
/// `s1 = −Σ/2 + i·(Σ/|Σ|)·√(1 − |Σ|²/4)` and `s2` takes the opposite sign.
/// When `|Σ| ≤ tol` the pair is `(exp(i·free_phase), −exp(i·free_phase))`.
pub fn decomposition(sigma: C64, free_phase: f64, tol: f64) -> Result<(C64, C64)> {
    let r = sigma.norm();
    if r.is_nan() || r > 2.0 + tol {
        return Err(Error::SigmaTooLarge { abs_sigma: r });
    }
    if r <= tol {
        let s1 = C64::from_polar(1.0, free_phase);
        return Ok((s1, -s1));
    }
    if r >= 2.0 {
        let s = -sigma / r;
        return Ok((s, s));
    }
    let unit = sigma / r;
    let h = (1.0 - r * r / 4.0).sqrt();
    let base = -sigma / 2.0;
    Ok((base + I * unit * h, base - I * unit * h))
}

/// Candidate values of `|Ψ|` consistent with `|Σ|`, `|Δ|` and a real `ℋ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PsiBranch {
    pub magnitudes: Vec<f64>,
}

/// Solves `ℋ = 4 − |Σ|² − |Δ|² − |Ψ|²` (with `ℋ = Σ·Δ̄·Ψ` taken in modulus)
/// for `|Ψ|`.
///
/// * `ℋ ≥ 0`: `|Ψ| = (−|Σ||Δ| + √((4−|Σ|²)(4−|Δ|²)))/2`
/// * `ℋ < 0`, `|Σ|²+|Δ|² ≤ 4`: `|Ψ| = (|Σ||Δ| + √(...))/2`
/// * `ℋ < 0`, `|Σ|²+|Δ|² > 4`: both `(|Σ||Δ| ± √(...))/2`, when real and `≤ 2`
///
/// An empty list marks an unrealizable triplet.
pub fn psi_candidates(abs_sigma: f64, abs_delta: f64, h: f64, tol: f64) -> PsiBranch {
    let (s, d) = (abs_sigma, abs_delta);
    let disc = (4.0 - s * s) * (4.0 - d * d);
    let mut out = Vec::new();
    if disc < -tol || s > 2.0 + tol || d > 2.0 + tol {
        return PsiBranch { magnitudes: out };
    }
    let root = disc.max(0.0).sqrt();
    let mut push = |v: f64| {
        if v >= -tol && v <= 2.0 + tol {
            let v = v.clamp(0.0, 2.0);
            if out.iter().all(|w: &f64| (w - v).abs() > tol) {
                out.push(v);
            }
        }
    };
    if h >= 0.0 {
        push((-s * d + root) / 2.0);
    } else if s * s + d * d <= 4.0 + tol {
        push((s * d + root) / 2.0);
    } else {
        push((s * d + root) / 2.0);
        push((s * d - root) / 2.0);
    }
    PsiBranch { magnitudes: out }
}

/// Which sign of `±` was used for `s3` when completing the third row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Completion `(s1, s2, s3, s4)` of a row triplet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Completion {
    pub s: [C64; 4],
    pub sign: Sign,
    /// Largest modulus of the three pairwise inner products.
    pub residual: f64,
}

/// Largest modulus among the three pairwise inner products of
/// `(1,1,1,1,1,1)`, `(1,a,b,e,s1,s2)` and `(1,c,d,f,s3,s4)`.
pub fn orthogonality_residual(first: [C64; 3], second: [C64; 3], s: [C64; 4]) -> f64 {
    let one = C64::new(1.0, 0.0);
    let r1 = [one, first[0], first[1], first[2], s[0], s[1]];
    let r2 = [one, second[0], second[1], second[2], s[2], s[3]];
    let ones: C64 = r1.iter().sum();
    let twos: C64 = r2.iter().sum();
    let cross: C64 = r1.iter().zip(&r2).map(|(x, y)| y * x.conj()).sum();
    ones.norm().max(twos.norm()).max(cross.norm())
}

/// Builds unimodular `s1..s4` making the rows `(1,…,1)`, `(1,a,b,e,s1,s2)` and
/// `(1,c,d,f,s3,s4)` mutually orthogonal.
///
/// `s1` always takes the `+` sign of the decomposition formula. Both signs for
/// `s3` are tried and every completion within `tol` is returned. `free_phase`
/// fixes whichever entry the equations leave undetermined.
pub fn complete_triplet(
    first: [C64; 3],
    second: [C64; 3],
    free_phase: f64,
    tol: f64,
) -> Result<Vec<Completion>> {
    let check = triplet_residual(first, second, tol);
    if check.residual > tol || !check.ni_ok {
        return Err(Error::NotCompletable(format!(
            "triplet identity residual {:e}, |H| = {}",
            check.residual,
            check.stats.haagerup.norm()
        )));
    }
    let TripletStats {
        sigma, delta, psi, ..
    } = check.stats;
    let free = C64::from_polar(1.0, free_phase);
    let (rs, rd) = (sigma.norm(), delta.norm());

    let mut candidates: Vec<([C64; 4], Sign)> = Vec::new();
    if rs <= tol && rd <= tol {
        let s1 = free;
        let s3 = -(psi / psi.norm()) * s1;
        candidates.push(([s1, -s1, s3, -s3], Sign::Plus));
    } else if rd <= tol {
        let (s1, s2) = decomposition(sigma, free_phase, tol)?;
        let s3 = if rs >= 2.0 - tol || psi.norm() <= tol {
            free
        } else {
            -I * sigma * psi / (rs * psi.norm())
        };
        candidates.push(([s1, s2, s3, -s3], Sign::Plus));
    } else if rs <= tol {
        // mirror image of the previous case: s2 = −s1 and s1 is fixed by Ψ
        let (s3, s4) = decomposition(delta, free_phase, tol)?;
        let s1 = if rd >= 2.0 - tol || psi.norm() <= tol {
            free
        } else {
            let w = -psi.conj() / (s3 - s4).conj();
            w / w.norm()
        };
        candidates.push(([s1, -s1, s3, s4], Sign::Plus));
    } else {
        let (s1, s2) = decomposition(sigma, free_phase, tol)?;
        let (p, m) = decomposition(delta, free_phase, tol)?;
        candidates.push(([s1, s2, p, m], Sign::Plus));
        candidates.push(([s1, s2, m, p], Sign::Minus));
    }

    let out: Vec<Completion> = candidates
        .into_iter()
        .map(|(s, sign)| Completion {
            s,
            sign,
            residual: orthogonality_residual(first, second, s),
        })
        .filter(|c| c.residual <= tol)
        .collect();
    if out.is_empty() {
        return Err(Error::NotCompletable(
            "no sign choice meets the orthogonality tolerance".into(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::fourier;
    use crate::testutil::{dita, unit};
    use proptest::prelude::*;

    fn zeta(k: i32) -> C64 {
        C64::from_polar(1.0, std::f64::consts::PI * k as f64 / 3.0)
    }

    fn near(x: C64, y: C64, tol: f64) -> bool {
        (x - y).norm() <= tol
    }

    #[test]
    fn decomposition_examples() {
        let one = C64::new(1.0, 0.0);
        let (s1, s2) = decomposition(2.0 * one, 0.0, 1e-12).unwrap();
        assert!(near(s1, -one, 1e-15) && near(s2, -one, 1e-15));

        let (s1, s2) =
            decomposition(C64::new(0.0, 0.0), std::f64::consts::FRAC_PI_2, 1e-12).unwrap();
        assert!(near(s1, I, 1e-15) && near(s2, -I, 1e-15));

        let (s1, s2) = decomposition(one, 0.0, 1e-12).unwrap();
        let h = 3f64.sqrt() / 2.0;
        assert!(near(s1, C64::new(-0.5, h), 1e-15));
        assert!(near(s2, C64::new(-0.5, -h), 1e-15));
    }

    #[test]
    fn decomposition_rejects_large_sigma() {
        assert!(matches!(
            decomposition(C64::new(3.0, 0.0), 0.0, 1e-8),
            Err(Error::SigmaTooLarge { .. })
        ));
    }

    #[test]
    fn haagerup_examples() {
        let one = C64::new(1.0, 0.0);
        assert!(near(
            haagerup_poly([one; 3], [one; 3]),
            C64::new(64.0, 0.0),
            1e-12
        ));

        let killed = haagerup_poly([-one, one, -one], [zeta(1), zeta(2), zeta(5)]);
        assert_eq!(killed, C64::new(0.0, 0.0));

        // rows 2-3 of F6 restricted to columns 2-4
        let h = haagerup_poly([zeta(1), zeta(2), zeta(3)], [zeta(2), zeta(4), zeta(6)]);
        assert!(h.im.abs() < 1e-12, "{h}");
    }

    #[test]
    fn residual_examples() {
        let one = C64::new(1.0, 0.0);
        let r = triplet_residual([one; 3], [one; 3], 1e-8);
        assert!((r.residual - 108.0).abs() < 1e-12);
        assert!(!r.ni_ok);

        let r = triplet_residual([-one, one, -one], [-one, one, -one], 1e-8);
        assert!((r.residual - 12.0).abs() < 1e-12);
        assert!(r.stats.sigma.norm() < 1e-15 && r.stats.delta.norm() < 1e-15);
        assert!((r.stats.psi - 4.0).norm() < 1e-15);

        let f = fourier::<6>();
        for i in 1..6 {
            for j in (i + 1)..6 {
                let r = triplet_residual(
                    [f[(i, 1)], f[(i, 2)], f[(i, 3)]],
                    [f[(j, 1)], f[(j, 2)], f[(j, 3)]],
                    1e-8,
                );
                assert!(r.residual < 1e-9 && r.ni_ok);
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_candidates(0.0, 0.0, 0.0, 1e-12).magnitudes, vec![2.0]);

        let s3 = 3f64.sqrt();
        let mut m = psi_candidates(s3, s3, -3.0, 1e-12).magnitudes;
        m.sort_by(f64::total_cmp);
        assert_eq!(m.len(), 2);
        assert!((m[0] - 1.0).abs() < 1e-12 && (m[1] - 2.0).abs() < 1e-12);

        // formally negative |Ψ| from the non-negative branch: unrealizable
        assert!(psi_candidates(2.0, 1.0, 1.0, 1e-12).magnitudes.is_empty());
        // both sums above 2
        assert!(psi_candidates(2.5, 2.5, -1.0, 1e-12).magnitudes.is_empty());
    }

    #[test]
    fn completes_fourier_rows() {
        let f = fourier::<6>();
        let first = [f[(1, 1)], f[(1, 2)], f[(1, 3)]];
        let second = [f[(2, 1)], f[(2, 2)], f[(2, 3)]];
        let out = complete_triplet(first, second, 0.0, 1e-9).unwrap();
        let target = [(f[(1, 4)], f[(2, 4)]), (f[(1, 5)], f[(2, 5)])];
        let hit = out.iter().any(|c| {
            let got = [(c.s[0], c.s[2]), (c.s[1], c.s[3])];
            let same = |p: [(C64, C64); 2], q: [(C64, C64); 2]| {
                p.iter()
                    .zip(&q)
                    .all(|(x, y)| near(x.0, y.0, 1e-12) && near(x.1, y.1, 1e-12))
            };
            same(got, target) || same([got[1], got[0]], target)
        });
        assert!(hit, "{out:?}");
    }

    #[test]
    fn incompletable_triplet() {
        let one = C64::new(1.0, 0.0);
        assert!(matches!(
            complete_triplet([-one, one, -one], [-one, one, -one], 0.0, 1e-8),
            Err(Error::NotCompletable(_))
        ));
    }

    #[test]
    fn degenerate_branches_complete() {
        let one = C64::new(1.0, 0.0);
        // Σ = Δ = 0, |Ψ| = 2
        let omega = zeta(2);
        let first = [-one, one, -one];
        let second = [-one, omega, -omega];
        let r = triplet_residual(first, second, 1e-12);
        assert!(r.residual < 1e-12, "{r:?}");
        let out = complete_triplet(first, second, 0.3, 1e-12).unwrap();
        assert!(out.iter().all(|c| c.residual < 1e-12));

        // Δ = 0, Σ ≠ 0: F6 rows 1 and 3 with columns 1,2,3
        let f = fourier::<6>();
        let a = [f[(1, 1)], f[(1, 2)], f[(1, 3)]];
        let b = [f[(3, 1)], f[(3, 2)], f[(3, 3)]];
        let st = TripletStats::of(a, b);
        assert!(st.delta.norm() < 1e-12 && st.sigma.norm() > 0.5);
        assert!(complete_triplet(a, b, 0.0, 1e-9).unwrap()[0].residual < 1e-9);
        // and its mirror image with Σ = 0
        assert!(complete_triplet(b, a, 0.0, 1e-9).unwrap()[0].residual < 1e-9);
    }

    proptest! {
        #[test]
        fn decomposition_sums_to_minus_sigma(r in 0.0f64..=2.0, t in 0.0f64..1.0, phase in 0.0f64..6.3) {
            let sigma = C64::from_polar(r, std::f64::consts::TAU * t);
            let (s1, s2) = decomposition(sigma, phase, 1e-8).unwrap();
            prop_assert!((s1 + s2 + sigma).norm() <= 1e-12);
            prop_assert!((s1.norm() - 1.0).abs() <= 1e-12);
            prop_assert!((s2.norm() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn haagerup_conjugation_symmetry(t in proptest::array::uniform6(0.0f64..1.0)) {
            let z: Vec<C64> = t.iter().map(|&x| unit(x)).collect();
            let first = [z[0], z[1], z[4]];
            let second = [z[2], z[3], z[5]];
            let h = haagerup_poly(first, second);
            let hc = haagerup_poly(first.map(|x| x.conj()), second.map(|x| x.conj()));
            prop_assert!((hc - h.conj()).norm() <= 1e-12);
        }

        #[test]
        fn completions_are_orthogonal(t in proptest::array::uniform6(0.0f64..1.0), phase in 0.0f64..6.3) {
            let z: Vec<C64> = t.iter().map(|&x| unit(x)).collect();
            if let Ok(out) = complete_triplet([z[0], z[1], z[2]], [z[3], z[4], z[5]], phase, 1e-8) {
                for c in out {
                    prop_assert!(orthogonality_residual([z[0], z[1], z[2]], [z[3], z[4], z[5]], c.s) <= 1e-8);
                }
            }
        }

        #[test]
        fn hadamard_triplets_satisfy_identity(x in 0.0f64..1.0, y in 0.0f64..1.0, i in 1usize..6, j in 1usize..6) {
            prop_assume!(i != j);
            let h = dita(x, y);
            let first = [h[(i, 1)], h[(i, 2)], h[(i, 3)]];
            let second = [h[(j, 1)], h[(j, 2)], h[(j, 3)]];
            let r = triplet_residual(first, second, 1e-8);
            prop_assert!(r.residual <= 1e-9 && r.ni_ok);
            prop_assert!(r.stats.haagerup.im.abs() <= 1e-9);
            let cands = psi_candidates(r.stats.sigma.norm(), r.stats.delta.norm(), r.stats.haagerup.re, 1e-7);
            prop_assert!(cands.magnitudes.iter().any(|m| (m - r.stats.psi.norm()).abs() <= 1e-6),
                "|Ψ| = {} not in {:?}", r.stats.psi.norm(), cands.magnitudes);
            let out = complete_triplet(first, second, 0.0, 1e-8).unwrap();
            prop_assert!(!out.is_empty());
        }
    }
}
