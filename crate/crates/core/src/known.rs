//! Reference matrices and seeds: the Fourier matrix `F6`, Tao's matrix
//! `S6⁽⁰⁾` and the closed-form example seed of the generic family.

use crate::matrix::{fourier, CMat6};
use crate::types::{Quadruple, UScalar, C64};

pub fn fourier6() -> CMat6 {
    fourier::<6>()
}

/// Exponents (mod 3) of the partial cubic array that determines `S6⁽⁰⁾`:
/// the first two noninitial rows and the first noninitial column.
const CUBIC_ROW_1: [u8; 6] = [0, 0, 1, 1, 2, 2];
const CUBIC_ROW_2: [u8; 6] = [0, 1, 0, 2, 1, 2];
const CUBIC_COL_1: [u8; 6] = [0, 0, 1, 1, 2, 2];

/// Two cubic rows (given as exponents of ω) are orthogonal iff every residue
/// of the exponent difference occurs exactly twice.
fn cubic_orthogonal(x: &[u8; 6], y: &[u8; 6]) -> bool {
    let mut counts = [0u8; 3];
    for (a, b) in x.iter().zip(y) {
        counts[((3 + a - b) % 3) as usize] += 1;
    }
    counts == [2, 2, 2]
}

fn fill_cubic(rows: &mut Vec<[u8; 6]>) -> bool {
    let next = rows.len();
    if next == 6 {
        return true;
    }
    for code in 0..81u32 {
        let mut row = [0, CUBIC_COL_1[next], 0, 0, 0, 0];
        let mut c = code;
        for slot in row.iter_mut().skip(2) {
            *slot = (c % 3) as u8;
            c /= 3;
        }
        if rows.iter().all(|r| cubic_orthogonal(r, &row)) {
            rows.push(row);
            if fill_cubic(rows) {
                return true;
            }
            rows.pop();
        }
    }
    false
}

/// Exponent table of `S6⁽⁰⁾` obtained by completing the cubic partial array
/// row by row with cubic roots of unity.
pub fn tao_exponents() -> [[u8; 6]; 6] {
    let mut rows = vec![[0u8; 6], CUBIC_ROW_1, CUBIC_ROW_2];
    assert!(
        fill_cubic(&mut rows),
        "cubic partial array has a completion"
    );
    std::array::from_fn(|i| rows[i])
}

/// Tao's isolated matrix `S6⁽⁰⁾`, all of whose entries are cubic roots of unity.
pub fn tao_s6() -> CMat6 {
    let ex = tao_exponents();
    CMat6::from_fn(|i, j| UScalar::from_turns(ex[i][j] as f64 / 3.0).value())
}

/// Unique real root of `4x³ − 2x + 1 = 0` by Cardano's formula.
pub fn example_real_part() -> f64 {
    // x³ + p·x + q = 0 with p = −1/2, q = 1/4; one real root since the
    // discriminant (q/2)² + (p/3)³ is positive.
    let (p, q) = (-0.5f64, 0.25f64);
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let s = disc.sqrt();
    (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()
}

/// The closed-form seed `(a, ā, c, a)` with `Re a` the real root of
/// `4x³ − 2x + 1`, `Im a > 0` and `c = (−a³+a²+a+1)/(a⁴+a³+a²−a)`.
pub fn example_quadruple() -> Quadruple {
    let x = example_real_part();
    let a = C64::new(x, (1.0 - x * x).sqrt());
    let c = (-a.powi(3) + a.powi(2) + a + 1.0) / (a.powi(4) + a.powi(3) + a.powi(2) - a);
    let a = UScalar::from_angle(a.arg());
    let c = UScalar::from_angle(c.arg());
    Quadruple::new(a, a.conj(), c, a)
}
