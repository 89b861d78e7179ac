//! Independent cross-checks of the dilation pipeline: explicit sextic
//! coefficients with a simultaneous root finder, an exhaustive search over
//! sixth roots of unity, and the matrix inversion and unitary completion
//! identities.

use std::f64::consts::TAU;

use crate::dilation::{completion_block, fundamental_parts, SCALE_FLOOR};
use crate::error::{Error, Result};
use crate::matrix::{inv3, CMat3, CMat6};
use crate::types::{Quadruple, Tolerances, UScalar, C64};

const FIT_SAMPLES: usize = 16;
const HELD_OUT: usize = 8;

/// Coefficients `c0..c6` of `e³·P(e)` where `P` is the fundamental polynomial
/// restricted to the unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalPoly {
    pub coeffs: [C64; 7],
    /// Largest `|N|² + |D|²` seen while sampling (at least [`SCALE_FLOOR`]), the magnitude reference.
    pub scale: f64,
}

impl FundamentalPoly {
    /// Recovers the coefficients from uniform unit-circle samples.
    ///
    /// On equispaced points least squares reduces to the discrete Fourier
    /// transform; the fit is then checked on points between the samples.
    pub fn fit(q: &Quadruple) -> Result<Self> {
        let sample = |theta: f64| -> Result<(C64, f64)> {
            let (v, w) = fundamental_parts(q, UScalar::from_angle(theta))?;
            Ok((C64::from_polar(v, 3.0 * theta), w))
        };
        let mut scale = SCALE_FLOOR;
        let mut ys = Vec::with_capacity(FIT_SAMPLES);
        for j in 0..FIT_SAMPLES {
            let (y, w) = sample(TAU * j as f64 / FIT_SAMPLES as f64)?;
            ys.push(y);
            scale = scale.max(w);
        }
        let coeffs: [C64; 7] = std::array::from_fn(|k| {
            ys.iter()
                .enumerate()
                .map(|(j, y)| y * C64::from_polar(1.0, -TAU * (j * k) as f64 / FIT_SAMPLES as f64))
                .sum::<C64>()
                / FIT_SAMPLES as f64
        });
        let poly = FundamentalPoly { coeffs, scale };

        let norm = poly.norm();
        for j in 0..HELD_OUT {
            let theta = TAU * (j as f64 + 0.5) / HELD_OUT as f64 + 0.1;
            let (y, w) = sample(theta)?;
            scale = scale.max(w);
            let r = (poly.eval(C64::from_polar(1.0, theta)) - y).norm();
            if r > 1e-7 * norm.max(SCALE_FLOOR * f64::EPSILON) {
                return Err(Error::FitFailed(format!(
                    "held-out residual {r:e} at θ = {theta}, coefficient norm {norm:e}"
                )));
            }
        }
        Ok(FundamentalPoly { coeffs, scale })
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn is_degenerate(&self, tol_root: f64) -> bool {
        self.norm() <= tol_root * self.scale
    }
}

/// All roots of `Σ cₖ zᵏ` by the Aberth–Ehrlich iteration.
pub fn aberth_roots(coeffs: &[C64]) -> Vec<C64> {
    let norm = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if norm == 0.0 {
        return Vec::new();
    }
    let eps = 1e-13 * norm;
    let hi = coeffs.iter().rposition(|c| c.norm() > eps).unwrap_or(0);
    let lo = coeffs.iter().position(|c| c.norm() > eps).unwrap_or(0);
    let mut roots = vec![C64::new(0.0, 0.0); lo];
    let p = &coeffs[lo..=hi];
    let n = p.len() - 1;
    if n == 0 {
        return roots;
    }

    let eval = |z: C64| {
        let mut v = C64::new(0.0, 0.0);
        let mut dv = C64::new(0.0, 0.0);
        for c in p.iter().rev() {
            dv = dv * z + v;
            v = v * z + c;
        }
        (v, dv)
    };
    let radius = (p[0].norm() / p[n].norm()).powf(1.0 / n as f64);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut largest = 0.0f64;
        for i in 0..n {
            let (v, dv) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulsion: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                largest = largest.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if largest < 1e-16 {
            break;
        }
    }
    roots.extend(z);
    roots
}

/// Unimodular roots of the fitted sextic, sorted by angle.
pub fn poly_roots(q: &Quadruple, tol: &Tolerances) -> Result<Vec<UScalar>> {
    let poly = FundamentalPoly::fit(q)?;
    if poly.is_degenerate(tol.root) {
        return Err(Error::DegenerateFamily {
            max_relative: poly.norm() / poly.scale,
        });
    }
    let mut thetas: Vec<f64> = aberth_roots(&poly.coeffs)
        .into_iter()
        .filter(|r| (r.norm() - 1.0).abs() <= 1e-6)
        .map(|r| r.arg().rem_euclid(TAU))
        .collect();
    thetas.sort_by(f64::total_cmp);
    // a tangential root shows up as a close pair
    let mut out: Vec<f64> = Vec::new();
    for t in thetas {
        if out.iter().all(|&s| circular_distance(s, t) > 1e-6) {
            out.push(t);
        }
    }
    Ok(out.into_iter().map(UScalar::from_angle).collect())
}

pub fn circular_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Largest angular mismatch after pairing each angle of `a` with its nearest
/// unused angle of `b`; `None` when the sets differ in size.
pub fn match_theta_sets(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, circular_distance(x, y)))
            .min_by(|p, q| p.1.total_cmp(&q.1))?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// Exact `ζᵏ` for `ζ = e^{iπ/3}` in the Eisenstein basis `{1, ω}`, `ω = ζ²`.
const ZETA: [(i64, i64); 6] = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)];

fn eisenstein_sum(exps: impl Iterator<Item = u8>) -> (i64, i64) {
    exps.fold((0, 0), |(m, n), k| {
        let (dm, dn) = ZETA[(k % 6) as usize];
        (m + dm, n + dn)
    })
}

/// `|m + nω|²`
fn eisenstein_norm((m, n): (i64, i64)) -> i64 {
    m * m - m * n + n * n
}

/// Exponents of two dephased sixth-root rows with their statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct SixthRootPair {
    pub first: [u8; 6],
    pub second: [u8; 6],
    /// Exact squared moduli `(|Σ|², |Δ|², |Ψ|²)`.
    pub norms_sq: (i64, i64, i64),
}

impl SixthRootPair {
    pub fn moduli(&self) -> (f64, f64, f64) {
        let (s, d, p) = self.norms_sq;
        ((s as f64).sqrt(), (d as f64).sqrt(), (p as f64).sqrt())
    }

    /// Inner product with the all-ones row and with each other, in floating point.
    pub fn orthogonality_residual(&self) -> f64 {
        let z = |k: u8| UScalar::from_turns(k as f64 / 6.0).value();
        let sum = |r: &[u8; 6]| r.iter().map(|&k| z(k)).sum::<C64>().norm();
        let cross: C64 = (0..6)
            .map(|i| z(self.first[i]) * z(self.second[i]).conj())
            .sum();
        sum(&self.first).max(sum(&self.second)).max(cross.norm())
    }
}

/// Every ordered pair of distinct rows `(1, x1, .., x5)` of sixth roots of unity
/// orthogonal to the all-ones row and to each other, with
/// `Σ = 1+x1+x2+x3`, `Δ = 1+y1+y2+y3`, `Ψ = 1 + Σ yₖ x̄ₖ` (k ≤ 3).
pub fn sixth_root_triplets() -> Vec<SixthRootPair> {
    let mut rows: Vec<[u8; 6]> = Vec::new();
    for code in 0..6u32.pow(5) {
        let mut row = [0u8; 6];
        let mut c = code;
        for slot in row.iter_mut().skip(1) {
            *slot = (c % 6) as u8;
            c /= 6;
        }
        if eisenstein_sum(row.iter().copied()) == (0, 0) {
            rows.push(row);
        }
    }
    let mut out = Vec::new();
    for x in &rows {
        for y in &rows {
            let cross = eisenstein_sum((0..6).map(|i| (6 + y[i] - x[i]) % 6));
            if cross != (0, 0) || x == y {
                continue;
            }
            let sigma = eisenstein_sum(x[..4].iter().copied());
            let delta = eisenstein_sum(y[..4].iter().copied());
            let psi = eisenstein_sum((0..4).map(|i| (6 + y[i] - x[i]) % 6));
            out.push(SixthRootPair {
                first: *x,
                second: *y,
                norms_sq: (
                    eisenstein_norm(sigma),
                    eisenstein_norm(delta),
                    eisenstein_norm(psi),
                ),
            });
        }
    }
    out
}

/// `‖(I+UV)·(I − U(I+VU)⁻¹V) − I‖∞`
pub fn mil_check(u: &CMat3, v: &CMat3, singular_tol: f64) -> Result<f64> {
    let id = CMat3::identity();
    let inner = inv3(&(id + *v * *u), singular_tol)?;
    let lhs = (id + *u * *v) * (id - *u * inner * *v);
    Ok((lhs - id).norm_inf())
}

/// Recomputes the lower-right block from the other three and returns its
/// largest entrywise deviation from the actual block.
pub fn completion_recheck(h: &CMat6, singular_tol: f64) -> Result<f64> {
    let e = h.submatrix3([0, 1, 2], [0, 1, 2]);
    let b = h.submatrix3([0, 1, 2], [3, 4, 5]);
    let c = h.submatrix3([3, 4, 5], [0, 1, 2]);
    let d = h.submatrix3([3, 4, 5], [3, 4, 5]);
    Ok(completion_block(&e, &b, &c, singular_tol)?.max_abs_diff(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::{circle_roots, dilate, fundamental_value};
    use crate::known::{example_quadruple, fourier6, tao_s6};
    use proptest::prelude::*;

    #[test]
    fn fitted_poly_reproduces_direct_values() {
        let q = Quadruple::from_turns([0.11, 0.37, 0.52, 0.83]);
        let poly = FundamentalPoly::fit(&q).unwrap();
        for k in 0..20 {
            let e = UScalar::from_turns(k as f64 * 0.0517);
            let direct = fundamental_value(&q, e).unwrap();
            let via = poly.eval(e.value()) * e.value().powi(-3);
            assert!((via.re - direct).abs() < 1e-9 * poly.norm());
            assert!(via.im.abs() < 1e-9 * poly.norm());
        }
    }

    #[test]
    fn aberth_on_known_roots() {
        let want = [
            C64::new(0.5, 0.2),
            C64::new(-1.0, 0.0),
            C64::from_polar(1.0, 2.0),
        ];
        // (z − r0)(z − r1)(z − r2)
        let mut c = vec![C64::new(1.0, 0.0)];
        for r in want {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        let got = aberth_roots(&c);
        assert_eq!(got.len(), 3);
        for r in want {
            assert!(got.iter().any(|g| (g - r).norm() < 1e-12));
        }
    }

    #[test]
    fn poly_roots_agree_with_circle_roots_on_example() {
        let q = example_quadruple();
        let tol = Tolerances::default();
        let a: Vec<f64> = circle_roots(&q, &tol)
            .unwrap()
            .iter()
            .map(|r| r.angle())
            .collect();
        let b: Vec<f64> = poly_roots(&q, &tol)
            .unwrap()
            .iter()
            .map(|r| r.angle())
            .collect();
        assert!(match_theta_sets(&a, &b).unwrap() < 1e-7, "{a:?} vs {b:?}");
    }

    #[test]
    fn degenerate_seed_degenerate_in_both() {
        let w = |k: f64| UScalar::from_turns(k / 3.0);
        let q = Quadruple::new(w(1.0), w(2.0), w(2.0), w(1.0));
        assert!(matches!(
            poly_roots(&q, &Tolerances::default()),
            Err(Error::DegenerateFamily { .. })
        ));
    }

    #[test]
    fn psi_moduli_one_and_two_both_occur() {
        let pairs = sixth_root_triplets();
        assert!(pairs.iter().any(|p| p.norms_sq == (3, 3, 1)));
        assert!(pairs.iter().any(|p| p.norms_sq == (3, 3, 4)));
        assert!(pairs.iter().all(|p| p.orthogonality_residual() < 1e-12));
    }

    #[test]
    fn match_theta_sets_wraps() {
        assert!(match_theta_sets(&[0.0, 1.0], &[1.0 + 1e-9, TAU - 1e-9]).unwrap() < 2e-9);
        assert!(match_theta_sets(&[0.0], &[]).is_none());
    }

    #[test]
    fn mil_trivial_cases() {
        let z = CMat3::zeros();
        let id = CMat3::identity();
        assert_eq!(mil_check(&z, &z, 1e-9).unwrap(), 0.0);
        assert!(mil_check(&id, &id, 1e-9).unwrap() < 1e-15);
        assert!(matches!(
            mil_check(&id, &(-id), 1e-9),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn completion_recheck_examples() {
        let r = dilate(&example_quadruple(), &Tolerances::default());
        let h = r.matrices[0].matrix;
        assert!(completion_recheck(&h, 1e-9).unwrap() < 1e-9);
        let mut bumped = h;
        bumped[(4, 4)] += C64::new(1e-3, 0.0);
        assert!((completion_recheck(&bumped, 1e-9).unwrap() - 1e-3).abs() < 1e-9);

        match completion_recheck(&tao_s6(), 1e-9) {
            Ok(res) => assert!(res < 1e-9),
            Err(e) => assert!(matches!(e, Error::SingularMatrix { .. })),
        }
        match completion_recheck(&fourier6(), 1e-9) {
            Ok(res) => assert!(res < 1e-9),
            Err(e) => assert!(matches!(e, Error::SingularMatrix { .. })),
        }
    }

    fn contraction() -> impl Strategy<Value = CMat3> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9).prop_map(|v| {
            let m = CMat3::from_fn(|i, j| C64::new(v[3 * i + j].0, v[3 * i + j].1));
            m.scale(C64::new(1.0 / (3.0 * 2f64.sqrt()), 0.0))
        })
    }

    proptest! {
        #[test]
        fn mil_on_contractions(u in contraction(), v in contraction()) {
            prop_assert!(mil_check(&u, &v, 1e-9).unwrap() < 1e-10);
        }
    }
}
