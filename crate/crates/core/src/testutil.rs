//! Shared fixtures for unit tests.

use crate::matrix::{fourier, CMat6};
use crate::types::C64;

pub fn unit(turns: f64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * turns)
}

/// Dephased member of the two-parameter family `(F2 ⊗ I3)·D(x,y)·(I2 ⊗ F3)`.
pub fn dita(x: f64, y: f64) -> CMat6 {
    let f2 = fourier::<2>();
    let f3 = fourier::<3>();
    let left = CMat6::from_fn(|i, j| {
        if i % 3 == j % 3 {
            f2[(i / 3, j / 3)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let right = CMat6::from_fn(|i, j| {
        if i / 3 == j / 3 {
            f3[(i % 3, j % 3)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let one = C64::new(1.0, 0.0);
    let d = CMat6::diag([one, one, one, one, unit(x), unit(y)]);
    let h = left * d * right;
    CMat6::from_fn(|i, j| h[(i, j)] / h[(i, 0)] / (h[(0, j)] / h[(0, 0)]))
}
