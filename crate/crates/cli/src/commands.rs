use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hadamard6::classify::classify;
use hadamard6::dilation::circle_roots;
use hadamard6::known::{example_quadruple, fourier6, tao_exponents};
use hadamard6::oracle::{circular_distance, poly_roots};
use hadamard6::{dilate, Error, Outcome, Tolerances, UScalar};
use serde::Serialize;

use crate::error::{exit, CliError};
use crate::matrix_file::{format_turns, MatrixFile, Representation, Seed};
use crate::report::{EmbedReport, VerifyReport};
use crate::scan::{run_scan, thread_cap, write_csv};

/// Construct and check 6×6 complex Hadamard matrices from a 3×3 seed block.
///
/// Exit codes: 0 success, 1 verification failed, 2 nothing found,
/// 3 degenerate seed, 64 usage or input error, 74 output error.
#[derive(Debug, Parser)]
#[command(name = "hadamard6", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Orthogonality tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of unit-circle grid points used to isolate roots.
    #[arg(long)]
    pub grid: Option<usize>,
}

impl TolArgs {
    fn tolerances(&self) -> Result<Tolerances, CliError> {
        let mut t = Tolerances::default();
        if let Some(x) = self.tol {
            t.orth = x;
        }
        if let Some(m) = self.grid {
            t.grid = m;
        }
        t.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KnownName {
    #[value(name = "F6", alias = "f6")]
    F6,
    #[value(name = "S6", alias = "s6")]
    S6,
    #[value(name = "example")]
    Example,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed the seed E(a,b,c,d) into Hadamard matrices.
    Embed {
        /// Seed phases a,b,c,d in turns.
        #[arg(long, value_parser = parse_quad, allow_hyphen_values = true)]
        quad: Seed,
        #[command(flatten)]
        tol: TolArgs,
        /// Directory for report.json and one file per matrix (default: report to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "phases")]
        repr: Representation,
    },
    /// Verify and classify a matrix file.
    Verify {
        path: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dilate a batch of uniformly random seeds.
    Scan {
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unimodular roots of the fundamental polynomial, grid search next to the sextic fit.
    Roots {
        #[arg(long, value_parser = parse_quad, allow_hyphen_values = true)]
        quad: Seed,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a reference matrix.
    Known {
        #[arg(value_enum)]
        name: KnownName,
        #[arg(long, value_enum, default_value = "phases")]
        repr: Representation,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_quad(s: &str) -> Result<Seed, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "expected four comma-separated phases, got {}",
            parts.len()
        ));
    }
    let mut t = [0.0; 4];
    for (slot, p) in t.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("invalid phase {p:?}"))?;
    }
    Ok(Seed::from_turns(t))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => println!("{}", text.trim_end()),
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn embed(
    seed: &Seed,
    tol: &Tolerances,
    out: Option<&Path>,
    repr: Representation,
) -> Result<i32, CliError> {
    let r = dilate(&seed.quad, tol);
    let mut report = EmbedReport::new(&r, seed, repr);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        for (k, m) in report.matrices.iter_mut().enumerate() {
            let name = format!("matrix-{}.json", k + 1);
            fs::write(dir.join(&name), m.matrix.to_json())?;
            m.file = Some(name);
        }
        fs::write(dir.join("report.json"), json(&report))?;
    } else {
        emit(None, &json(&report))?;
    }
    Ok(match r.outcome {
        Outcome::Found => exit::OK,
        Outcome::NoneFound | Outcome::Rejected => exit::NONE_FOUND,
        Outcome::Degenerate => exit::DEGENERATE,
    })
}

fn verify(
    path: &Path,
    tol: Option<f64>,
    format: Format,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let file = MatrixFile::from_json(&text)?;
    let h = file.matrix()?;
    let mut t = Tolerances::default();
    if let Some(x) = tol {
        t.orth = x;
    }
    t.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = VerifyReport::new(&classify(&h, &t), file.metadata.hadamard_residual);
    match format {
        Format::Json => emit(out, &json(&report))?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(VerifyReport::CSV_HEADER)?;
            w.write_record(report.csv_record())?;
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            emit(out, &String::from_utf8_lossy(&bytes))?;
        }
    }
    Ok(if report.is_hadamard {
        exit::OK
    } else {
        exit::VERIFY_FAILED
    })
}

fn scan(
    count: usize,
    seed: u64,
    tol: &Tolerances,
    format: Format,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let rows = run_scan(seed, count, tol, thread_cap()?)?;
    match (format, out) {
        (Format::Csv, Some(path)) => write_csv(&rows, fs::File::create(path)?)?,
        (Format::Csv, None) => write_csv(&rows, std::io::stdout().lock())?,
        (Format::Json, _) => emit(out, &json(&rows))?,
    }
    Ok(exit::OK)
}

#[derive(Debug, Serialize)]
struct RootSide {
    status: String,
    turns: Vec<String>,
}

#[derive(Debug, Serialize)]
struct RootPair {
    circle: Option<String>,
    poly: Option<String>,
    angle_diff: Option<f64>,
}

#[derive(Debug, Serialize)]
struct RootsReport {
    seed_turns: [String; 4],
    circle: RootSide,
    poly: RootSide,
    pairs: Vec<RootPair>,
}

fn side(r: &Result<Vec<UScalar>, Error>) -> RootSide {
    match r {
        Ok(v) => RootSide {
            status: "ok".into(),
            turns: v.iter().map(|u| format_turns(u.turns())).collect(),
        },
        Err(e) => RootSide {
            status: e.to_string(),
            turns: Vec::new(),
        },
    }
}

/// Pairs each grid root with the nearest unused polynomial root.
fn pair_roots(a: &[UScalar], b: &[UScalar]) -> Vec<RootPair> {
    let mut used = vec![false; b.len()];
    let mut pairs = Vec::new();
    for x in a {
        let best = (0..b.len()).filter(|&j| !used[j]).min_by(|&i, &j| {
            circular_distance(x.angle(), b[i].angle())
                .total_cmp(&circular_distance(x.angle(), b[j].angle()))
        });
        let (poly, diff) = match best {
            Some(j) => {
                used[j] = true;
                (
                    Some(format_turns(b[j].turns())),
                    Some(circular_distance(x.angle(), b[j].angle())),
                )
            }
            None => (None, None),
        };
        pairs.push(RootPair {
            circle: Some(format_turns(x.turns())),
            poly,
            angle_diff: diff,
        });
    }
    for (j, y) in b.iter().enumerate() {
        if !used[j] {
            pairs.push(RootPair {
                circle: None,
                poly: Some(format_turns(y.turns())),
                angle_diff: None,
            });
        }
    }
    pairs
}

fn roots(
    seed: &Seed,
    tol: &Tolerances,
    format: Format,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let a = circle_roots(&seed.quad, tol);
    let b = poly_roots(&seed.quad, tol);
    let empty = Vec::new();
    let report = RootsReport {
        seed_turns: seed.strings(),
        circle: side(&a),
        poly: side(&b),
        pairs: pair_roots(a.as_ref().unwrap_or(&empty), b.as_ref().unwrap_or(&empty)),
    };
    match format {
        Format::Json => emit(out, &json(&report))?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["circle_turns", "poly_turns", "angle_diff"])?;
            for p in &report.pairs {
                w.write_record([
                    p.circle.clone().unwrap_or_default(),
                    p.poly.clone().unwrap_or_default(),
                    p.angle_diff.map(|d| d.to_string()).unwrap_or_default(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            emit(out, &String::from_utf8_lossy(&bytes))?;
        }
    }
    let degenerate =
        |r: &Result<Vec<UScalar>, Error>| matches!(r, Err(Error::DegenerateFamily { .. }));
    Ok(if degenerate(&a) || degenerate(&b) {
        exit::DEGENERATE
    } else {
        exit::OK
    })
}

pub fn known_file(name: KnownName, repr: Representation) -> Result<MatrixFile, CliError> {
    let tol = Tolerances::default();
    let exact = |turns: [[f64; 6]; 6], source: &str| match repr {
        Representation::Phases => MatrixFile::from_turns(&turns, source, &tol, None),
        Representation::Cartesian => {
            let h = hadamard6::CMat6::from_fn(|i, j| UScalar::from_turns(turns[i][j]).value());
            MatrixFile::from_matrix(&h, repr, source, &tol, None)
        }
    };
    Ok(match name {
        KnownName::F6 => {
            let turns =
                std::array::from_fn(|i| std::array::from_fn(|j| ((i * j) % 6) as f64 / 6.0));
            let file = exact(turns, "known:F6");
            debug_assert!(file
                .matrix()
                .map(|h| h.max_abs_diff(&fourier6()) < 1e-14)
                .unwrap_or(false));
            file
        }
        KnownName::S6 => {
            let ex = tao_exponents();
            exact(
                std::array::from_fn(|i| std::array::from_fn(|j| ex[i][j] as f64 / 3.0)),
                "known:S6",
            )
        }
        KnownName::Example => {
            let q = example_quadruple();
            let seed = Seed {
                turns: q.turns(),
                quad: q,
            };
            let r = dilate(&q, &tol);
            let m = r
                .matrices
                .first()
                .ok_or_else(|| CliError::Input("example seed produced no matrix".into()))?;
            MatrixFile::from_matrix(&m.matrix, repr, "known:example", &tol, Some(&seed))
        }
    })
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Embed {
            quad,
            tol,
            out,
            repr,
        } => embed(quad, &tol.tolerances()?, out.as_deref(), *repr),
        Command::Verify {
            path,
            tol,
            format,
            out,
        } => verify(path, *tol, *format, out.as_deref()),
        Command::Scan {
            count,
            seed,
            tol,
            format,
            out,
        } => scan(*count, *seed, &tol.tolerances()?, *format, out.as_deref()),
        Command::Roots {
            quad,
            tol,
            format,
            out,
        } => roots(quad, &tol.tolerances()?, *format, out.as_deref()),
        Command::Known { name, repr, out } => {
            emit(out.as_deref(), &known_file(*name, *repr)?.to_json())?;
            Ok(exit::OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_parsing() {
        let q = parse_quad("0.1, -0.25,0.5,1").unwrap();
        assert_eq!(q.turns[0], 0.1);
        assert_eq!(q.turns[1], -0.25);
        assert!(parse_quad("0.1,0.2,0.3").is_err());
        assert!(parse_quad("0.1,0.2,x,0.4").is_err());
        assert!(parse_quad("0.1,0.2,inf,0.4").is_err());
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["hadamard6", "embed", "--quad", "1,2"]), exit::USAGE);
        assert_eq!(run(["hadamard6", "frobnicate"]), exit::USAGE);
        assert_eq!(
            run(["hadamard6", "scan", "--count", "0", "--grid", "8"]),
            exit::USAGE
        );
        assert_eq!(run(["hadamard6", "--help"]), exit::OK);
    }
}
