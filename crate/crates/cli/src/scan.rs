//! Batch dilation of random seeds.
//!
//! Seeds are drawn sequentially from a ChaCha stream, so the seed list depends
//! only on the RNG seed. Work is spread over a rayon pool and collected in
//! index order, which keeps the output independent of thread count.

use std::io::Write;

use hadamard6::{dilate, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::matrix_file::Seed;
use crate::report::outcome_name;

pub const THREADS_ENV: &str = "HADAMARD6_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub index: usize,
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
    pub canonical: bool,
    pub contraction: Option<bool>,
    pub sol_b: usize,
    pub sol_c: usize,
    pub matrices: usize,
    pub max_residual: Option<f64>,
    pub outcome: &'static str,
}

pub fn seeds(rng_seed: u64, count: usize) -> Vec<Seed> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| Seed::from_turns([rng.gen(), rng.gen(), rng.gen(), rng.gen()]))
        .collect()
}

fn scan_one(index: usize, seed: &Seed, tol: &Tolerances) -> ScanRow {
    let r = dilate(&seed.quad, tol);
    let [a, b, c, d] = seed.strings();
    ScanRow {
        index,
        a,
        b,
        c,
        d,
        canonical: r.canonical.passes,
        contraction: r.contraction.map(|c| c.passes),
        sol_b: r.sol_b.as_ref().map_or(0, |s| s.sextuples.len()),
        sol_c: r.sol_c.as_ref().map_or(0, |s| s.sextuples.len()),
        matrices: r.matrices.len(),
        max_residual: r.max_residual(),
        outcome: outcome_name(r.outcome),
    }
}

/// Thread cap from the environment; `None` means the rayon default.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got {v:?}"
            ))),
        },
    }
}

pub fn run_scan(
    rng_seed: u64,
    count: usize,
    tol: &Tolerances,
    threads: Option<usize>,
) -> Result<Vec<ScanRow>, CliError> {
    let quads = seeds(rng_seed, count);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        quads
            .par_iter()
            .enumerate()
            .map(|(i, q)| scan_one(i, q, tol))
            .collect()
    }))
}

pub fn write_csv(rows: &[ScanRow], out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "index",
        "a",
        "b",
        "c",
        "d",
        "canonical",
        "contraction",
        "sol_b",
        "sol_c",
        "matrices",
        "max_residual",
        "outcome",
    ])?;
    let opt = |x: Option<String>| x.unwrap_or_default();
    for r in rows {
        w.write_record([
            r.index.to_string(),
            r.a.clone(),
            r.b.clone(),
            r.c.clone(),
            r.d.clone(),
            r.canonical.to_string(),
            opt(r.contraction.map(|c| c.to_string())),
            r.sol_b.to_string(),
            r.sol_c.to_string(),
            r.matrices.to_string(),
            opt(r.max_residual.map(|x| x.to_string())),
            r.outcome.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_does_not_change_rows() {
        let tol = Tolerances::default();
        let one = run_scan(3, 24, &tol, Some(1)).unwrap();
        let many = run_scan(3, 24, &tol, Some(4)).unwrap();
        assert_eq!(one, many);
        assert_eq!(
            one.iter().map(|r| r.index).collect::<Vec<_>>(),
            (0..24).collect::<Vec<_>>()
        );
    }

    #[test]
    fn empty_scan_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }
}
