//! Unimodular scalars, seed quadruples and numerical tolerances.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMat3;

pub type C64 = Complex64;

/// Complex number of modulus one.
///
/// Every matrix entry of a complex Hadamard matrix is one of these. Values
/// built with [`UScalar::from_turns`] are unimodular to machine precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UScalar(C64);

impl UScalar {
    pub const ONE: UScalar = UScalar(C64 { re: 1.0, im: 0.0 });

    /// `exp(2πi·turns)`.
    pub fn from_turns(turns: f64) -> Self {
        let (s, c) = (TAU * turns).sin_cos();
        UScalar(C64::new(c, s))
    }

    /// `exp(i·angle)` with the angle in radians.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        UScalar(C64::new(c, s))
    }

    /// Accepts `z` if `||z|² − 1| ≤ tol`, storing it unchanged.
    pub fn new(z: C64, tol: f64) -> Result<Self> {
        let n = z.norm_sqr();
        if z.re.is_finite() && z.im.is_finite() && (n - 1.0).abs() <= tol {
            Ok(UScalar(z))
        } else {
            Err(Error::NotUnimodular {
                modulus: n.sqrt(),
                tolerance: tol,
            })
        }
    }

    /// Like [`UScalar::new`] but rescales the accepted value onto the circle.
    pub fn project(z: C64, tol: f64) -> Result<Self> {
        Self::new(z, tol).map(|u| UScalar(u.0 / u.0.norm()))
    }

    #[inline]
    pub fn value(self) -> C64 {
        self.0
    }

    /// Conjugate, which for a unimodular number is also its reciprocal.
    #[inline]
    pub fn conj(self) -> Self {
        UScalar(self.0.conj())
    }

    /// Argument in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        let t = self.0.im.atan2(self.0.re);
        if t < 0.0 {
            t + TAU
        } else {
            t
        }
    }

    /// Argument as a fraction of a full turn, in `[0, 1)`.
    pub fn turns(self) -> f64 {
        let t = self.angle() / TAU;
        if t >= 1.0 {
            0.0
        } else {
            t
        }
    }
}

impl std::ops::Mul for UScalar {
    type Output = UScalar;

    fn mul(self, other: UScalar) -> UScalar {
        UScalar(self.0 * other.0)
    }
}

impl From<UScalar> for C64 {
    fn from(u: UScalar) -> C64 {
        u.0
    }
}

impl fmt::Display for UScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp(2πi·{})", self.turns())
    }
}

/// Seed parameters `(a, b, c, d)` of the upper-left block
///
/// ```text
/// E(a,b,c,d) = [1 1 1]
///              [1 a b]
///              [1 c d]
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadruple {
    pub a: UScalar,
    pub b: UScalar,
    pub c: UScalar,
    pub d: UScalar,
}

impl Quadruple {
    pub fn new(a: UScalar, b: UScalar, c: UScalar, d: UScalar) -> Self {
        Quadruple { a, b, c, d }
    }

    pub fn from_turns(turns: [f64; 4]) -> Self {
        let [a, b, c, d] = turns.map(UScalar::from_turns);
        Quadruple { a, b, c, d }
    }

    pub fn turns(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d].map(UScalar::turns)
    }

    /// Seed of the transposed block: `Eᵀ(a,b,c,d) = E(a,c,b,d)`.
    pub fn transposed(&self) -> Self {
        Quadruple {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }

    pub fn seed_matrix(&self) -> CMat3 {
        let one = C64::new(1.0, 0.0);
        CMat3::new([
            [one, one, one],
            [one, self.a.value(), self.b.value()],
            [one, self.c.value(), self.d.value()],
        ])
    }
}

/// Numerical thresholds shared by every stage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Unimodularity at construction time.
    pub unimodular: f64,
    /// Unimodularity when checking computed entries (the `D` block, companions).
    pub unimodular_verify: f64,
    /// Orthogonality residuals and "is zero" branch thresholds.
    pub orth: f64,
    /// Root deduplication and relative degeneracy thresholds.
    pub root: f64,
    /// Number of samples of the unit-circle grid used for root isolation.
    pub grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unimodular: 1e-10,
            unimodular_verify: 1e-8,
            orth: 1e-8,
            root: 1e-9,
            grid: 4096,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [
            self.unimodular,
            self.unimodular_verify,
            self.orth,
            self.root,
        ]
        .iter()
        .all(|t| t.is_finite() && *t > 0.0);
        if !all_positive {
            return Err(Error::InvalidTolerances("all tolerances must be positive"));
        }
        if self.grid < 64 {
            return Err(Error::InvalidTolerances(
                "circle grid needs at least 64 points",
            ));
        }
        Ok(())
    }
}
