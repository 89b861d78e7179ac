//! Fixed-size complex matrices and the small linear-algebra kernel needed for
//! 3×3 blocks: product, adjoint, adjugate inverse, determinant and the
//! eigenvalues of a Hermitian 3×3 matrix.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::types::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense `N×N` complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize> {
    pub entries: [[C64; N]; N],
}

pub type CMat3 = CMat<3>;
pub type CMat6 = CMat<6>;

impl<const N: usize> CMat<N> {
    pub const fn new(entries: [[C64; N]; N]) -> Self {
        CMat { entries }
    }

    pub fn zeros() -> Self {
        CMat::new([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.entries[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in values.into_iter().enumerate() {
            m.entries[i][i] = v;
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.entries[i][j] * s)
    }

    pub fn row(&self, i: usize) -> [C64; N] {
        self.entries[i]
    }

    pub fn col(&self, j: usize) -> [C64; N] {
        std::array::from_fn(|i| self.entries[i][j])
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.entries[i][i]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Induced ∞-norm (max row sum of moduli).
    pub fn norm_inf(&self) -> f64 {
        self.entries
            .iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `||h_ij| − 1|`.
    pub fn max_unimodular_deviation(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .fold(0.0, |m, z| m.max((z.norm() - 1.0).abs()))
    }

    /// `true` when the first row and column equal 1 within `tol`.
    pub fn is_dephased(&self, tol: f64) -> bool {
        (0..N).all(|k| {
            (self.entries[0][k] - ONE).norm() <= tol && (self.entries[k][0] - ONE).norm() <= tol
        })
    }

    /// Rows `rows` and columns `cols` as a 3×3 block.
    pub fn submatrix3(&self, rows: [usize; 3], cols: [usize; 3]) -> CMat3 {
        CMat3::from_fn(|i, j| self.entries[rows[i]][cols[j]])
    }
}

/// Matrix product. Exists alongside the `*` operator for readability at call sites.
pub fn mat_mul<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> CMat<N> {
    let mut out = CMat::<N>::zeros();
    for i in 0..N {
        for k in 0..N {
            let aik = a.entries[i][k];
            for j in 0..N {
                out.entries[i][j] += aik * b.entries[k][j];
            }
        }
    }
    out
}

pub fn adjoint<const N: usize>(a: &CMat<N>) -> CMat<N> {
    a.adjoint()
}

impl<const N: usize> Mul for CMat<N> {
    type Output = CMat<N>;
    fn mul(self, rhs: CMat<N>) -> CMat<N> {
        mat_mul(&self, &rhs)
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = CMat<N>;
    fn add(self, rhs: CMat<N>) -> CMat<N> {
        CMat::from_fn(|i, j| self.entries[i][j] + rhs.entries[i][j])
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = CMat<N>;
    fn sub(self, rhs: CMat<N>) -> CMat<N> {
        CMat::from_fn(|i, j| self.entries[i][j] - rhs.entries[i][j])
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = CMat<N>;
    fn neg(self) -> CMat<N> {
        CMat::from_fn(|i, j| -self.entries[i][j])
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i][j]
    }
}

impl CMat3 {
    pub fn det(&self) -> C64 {
        let m = &self.entries;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Classical adjugate (transposed cofactor matrix), so `A·adj(A) = det(A)·I`.
    pub fn adjugate(&self) -> CMat3 {
        let m = &self.entries;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        CMat3::new([
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ])
    }
}

/// Inverse of a 3×3 matrix through its adjugate.
///
/// Fails with [`Error::SingularMatrix`] when `|det| ≤ singular_tol`.
pub fn inv3(a: &CMat3, singular_tol: f64) -> Result<CMat3> {
    let det = a.det();
    if det.norm().is_nan() || det.norm() <= singular_tol {
        return Err(Error::SingularMatrix {
            det_abs: det.norm(),
        });
    }
    Ok(a.adjugate().scale(det.inv()))
}

/// Eigenvalues of a Hermitian 3×3 matrix in ascending order.
///
/// Closed-form trigonometric solution of the characteristic cubic. Inputs whose
/// anti-Hermitian part exceeds `1e-9·max(1, ‖A‖)` are rejected.
pub fn herm_eigs3(a: &CMat3) -> Result<[f64; 3]> {
    let asym = a.max_abs_diff(&a.adjoint());
    if asym > 1e-9 * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    // Hermitian part; its diagonal is real.
    let h = (*a + a.adjoint()).scale(C64::new(0.5, 0.0));
    let m = &h.entries;
    let q = (m[0][0].re + m[1][1].re + m[2][2].re) / 3.0;
    let p1 = m[0][1].norm_sqr() + m[0][2].norm_sqr() + m[1][2].norm_sqr();
    let p2 =
        (m[0][0].re - q).powi(2) + (m[1][1].re - q).powi(2) + (m[2][2].re - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p <= f64::EPSILON * q.abs().max(f64::MIN_POSITIVE) {
        return Ok([q, q, q]);
    }
    let shifted = (h - CMat3::identity().scale(C64::new(q, 0.0))).scale(C64::new(1.0 / p, 0.0));
    let r = (shifted.det().re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + TAU / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    let mut eig = [smallest, middle, largest];
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// The order-`n` Fourier matrix `F_n[j][k] = exp(2πi·jk/n)`.
pub fn fourier<const N: usize>() -> CMat<N> {
    CMat::from_fn(|j, k| {
        let t = 2.0 * PI * ((j * k) % N) as f64 / N as f64;
        C64::new(t.cos(), t.sin())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> CMat3 {
        CMat3::new([
            [c(1.0, 2.0), c(-0.5, 0.1), c(0.0, 1.0)],
            [c(0.3, -0.7), c(2.0, 0.0), c(1.0, 1.0)],
            [c(-1.0, 0.0), c(0.2, 0.2), c(0.5, -1.5)],
        ])
    }

    #[test]
    fn identity_is_neutral() {
        let a = sample();
        assert_eq!(mat_mul(&CMat3::identity(), &a), a);
        assert_eq!(mat_mul(&a, &CMat3::identity()), a);
    }

    #[test]
    fn conjugate_diagonals_multiply_to_identity() {
        let a = CMat3::diag([c(0.0, 1.0); 3]);
        let b = CMat3::diag([c(0.0, -1.0); 3]);
        assert_eq!(a * b, CMat3::identity());
    }

    #[test]
    fn fourier3_is_scaled_unitary() {
        let f = fourier::<3>();
        let prod = f * f.adjoint();
        assert!(prod.max_abs_diff(&CMat3::identity().scale(c(3.0, 0.0))) < 1e-14);
    }

    #[test]
    fn adjoint_examples() {
        let sym = CMat3::new([
            [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
            [c(2.0, 0.0), c(5.0, 0.0), c(4.0, 0.0)],
            [c(3.0, 0.0), c(4.0, 0.0), c(6.0, 0.0)],
        ]);
        assert_eq!(sym.adjoint(), sym);
        assert_eq!(
            CMat3::diag([c(0.0, 1.0); 3]).adjoint(),
            CMat3::diag([c(0.0, -1.0); 3])
        );
        // unimodular entries: conjugate equals reciprocal
        let f = fourier::<3>();
        let recip_t = CMat3::from_fn(|i, j| f.entries[j][i].inv());
        assert!(f.adjoint().max_abs_diff(&recip_t) < 1e-15);
        assert_eq!(sample().adjoint().adjoint(), sample());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inv3(&CMat3::identity(), 1e-9).unwrap(), CMat3::identity());
        let f = fourier::<3>();
        let inv = inv3(&f, 1e-9).unwrap();
        assert!(inv.max_abs_diff(&f.adjoint().scale(c(1.0 / 3.0, 0.0))) < 1e-15);
        let ones = CMat3::from_fn(|_, _| c(1.0, 0.0));
        assert!(matches!(
            inv3(&ones, 1e-9),
            Err(Error::SingularMatrix { .. })
        ));
        let a = sample();
        let inv = inv3(&a, 1e-9).unwrap();
        assert!((a * inv).max_abs_diff(&CMat3::identity()) < 1e-13);
    }

    #[test]
    fn hermitian_eigenvalue_examples() {
        let three = CMat3::identity().scale(c(3.0, 0.0));
        assert_eq!(herm_eigs3(&three).unwrap(), [3.0, 3.0, 3.0]);

        let ones = CMat3::from_fn(|_, _| c(1.0, 0.0));
        let e = herm_eigs3(&(ones.adjoint() * ones)).unwrap();
        assert!(
            e[0].abs() < 1e-12 && e[1].abs() < 1e-12 && (e[2] - 9.0).abs() < 1e-12,
            "{e:?}"
        );

        let f = fourier::<3>();
        let e = herm_eigs3(&(f.adjoint() * f)).unwrap();
        for l in e {
            assert!((l - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        assert!(matches!(
            herm_eigs3(&sample()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn dephased_detection() {
        assert!(fourier::<6>().is_dephased(1e-12));
        assert!(!CMat6::identity().is_dephased(1e-12));
    }
}
