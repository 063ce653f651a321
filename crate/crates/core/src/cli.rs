//! Command-line front end.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::classical::classical_triple_joinable;
use crate::error::Error;
use crate::feasibility::{
    alternating_projection, FeasibilityProblem, MatrixFile, Verdict, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::joinability::{
    construct_joining_state_iso, construct_joining_state_werner, hybrid_pair_joinable, iso_1n_joinable,
    iso_pair_joinable, iso_triple_joinable, werner_pair_joinable, werner_triple_joinable, IsoTriple, WernerTriple,
};
use crate::sharability::{
    sharable_1n_iso, sharable_1n_werner, sharable_mn_werner, sharing_state_1n, sharing_table,
    twirl_sharability_bounds_search,
};
use crate::states::{IsotropicParam, WernerParam};
use crate::tensor::{ComplexMatrix, DensityMatrix, TensorSpace};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CAP: i32 = 4;
pub const EXIT_UNDECIDED: i32 = 5;

/// Most grid points a region sweep may emit.
pub const REGION_MAX_POINTS: usize = 1_000_000;
/// Largest m, n for `share table`.
pub const TABLE_MAX: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "qmarginal", version, about = "Joinability and sharability of Werner and isotropic states")]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a family of reduced states can be joined.
    Join(JoinArgs),
    /// Sample a joinable region on a grid.
    Region(RegionArgs),
    /// Sharability queries.
    #[command(subcommand)]
    Share(ShareCommand),
    /// Run the numeric feasibility oracle on a JSON problem.
    Feasibility(FeasibilityArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum JoinFamily {
    Werner,
    Iso,
    WernerPair,
    IsoPair,
    Hybrid,
    #[value(name = "iso-1n")]
    Iso1n,
}

#[derive(Args, Debug)]
struct JoinArgs {
    family: JoinFamily,
    #[arg(long)]
    d: usize,
    /// Werner parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    psi: Vec<f64>,
    /// Isotropic parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phi: Vec<f64>,
    /// Write a joining state here (werner and iso triples).
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Scenario {
    WernerTriple,
    IsoTriple,
    WernerPair,
    IsoPair,
    Hybrid,
    Classical,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct RegionArgs {
    scenario: Scenario,
    #[arg(long)]
    d: usize,
    /// Grid points per axis, endpoints included.
    #[arg(long)]
    res: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum ShareCommand {
    /// Is a Werner (--psi) or isotropic (--phi) state m-n sharable?
    Check {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<f64>,
        #[arg(long)]
        phi: Option<f64>,
    },
    /// Thresholds -Psi for 1 <= m, n <= max as exact fractions.
    Table {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Write a 1-n sharing state of the most entangled sharable Werner state.
    State {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Twirl bounds on 1-n sharability of a two-qudit state given as JSON.
    Bounds {
        state: PathBuf,
        /// Random local unitaries to try on the second party.
        #[arg(long, default_value_t = 0)]
        search: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct FeasibilityArgs {
    problem: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::CapExceeded { .. }) { EXIT_CAP } else { EXIT_USAGE };
        Self { code, message: e.to_string() }
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
        }
    };
    let result = match cli.command {
        Command::Join(a) => cmd_join(a),
        Command::Region(a) => cmd_region(a),
        Command::Share(s) => cmd_share(s),
        Command::Feasibility(a) => cmd_feasibility(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn expect_len(name: &str, v: &[f64], n: usize) -> Result<(), Failure> {
    if v.len() != n {
        return Err(Failure::usage(format!("--{name} needs {n} value(s), got {}", v.len())));
    }
    Ok(())
}

fn check_psi(v: &[f64]) -> Result<(), Failure> {
    match v.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
        Some(x) => Err(Failure::usage(format!("psi value {x} outside [-1, 1]"))),
        None => Ok(()),
    }
}

fn check_phi(d: usize, v: &[f64]) -> Result<(), Failure> {
    match v.iter().find(|x| !(0.0..=d as f64).contains(*x)) {
        Some(x) => Err(Failure::usage(format!("phi value {x} outside [0, {d}]"))),
        None => Ok(()),
    }
}

fn verdict(yes: bool, word: &str) -> i32 {
    if yes {
        println!("{word}");
        EXIT_YES
    } else {
        println!("not {word}");
        EXIT_NO
    }
}

fn write_output(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Failure::io(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

fn state_json(w: &DensityMatrix) -> serde_json::Value {
    let m = MatrixFile::from(w.matrix());
    json!({ "dims": w.space().dims(), "re": m.re, "im": m.im })
}

fn cmd_join(a: JoinArgs) -> Outcome {
    if a.d < 2 {
        return Err(Failure::usage("--d must be at least 2"));
    }
    check_psi(&a.psi)?;
    check_phi(a.d, &a.phi)?;
    if a.witness.is_some() && !matches!(a.family, JoinFamily::Werner | JoinFamily::Iso) {
        return Err(Failure::usage("--witness is available for werner and iso triples only"));
    }
    let d = a.d;
    let yes = match a.family {
        JoinFamily::Werner => {
            expect_len("psi", &a.psi, 3)?;
            let t = WernerTriple::new(d, a.psi[0], a.psi[1], a.psi[2])?;
            let ok = werner_triple_joinable(&t);
            if ok {
                if let Some(path) = &a.witness {
                    let w = construct_joining_state_werner(&t)?;
                    write_output(Some(path), &state_json(&w).to_string())?;
                }
            }
            ok
        }
        JoinFamily::Iso => {
            expect_len("phi", &a.phi, 2)?;
            expect_len("psi", &a.psi, 1)?;
            let t = IsoTriple::new(d, a.phi[0], a.phi[1], a.psi[0])?;
            let ok = iso_triple_joinable(&t);
            if ok {
                if let Some(path) = &a.witness {
                    let w = construct_joining_state_iso(&t)?;
                    write_output(Some(path), &state_json(&w).to_string())?;
                }
            }
            ok
        }
        JoinFamily::WernerPair => {
            expect_len("psi", &a.psi, 2)?;
            werner_pair_joinable(d, a.psi[0], a.psi[1])
        }
        JoinFamily::IsoPair => {
            expect_len("phi", &a.phi, 2)?;
            iso_pair_joinable(d, a.phi[0], a.phi[1])
        }
        JoinFamily::Hybrid => {
            expect_len("phi", &a.phi, 1)?;
            expect_len("psi", &a.psi, 1)?;
            hybrid_pair_joinable(d, a.phi[0], a.psi[0])
        }
        JoinFamily::Iso1n => {
            if a.phi.is_empty() {
                return Err(Failure::usage("--phi needs at least one value"));
            }
            iso_1n_joinable(d, &a.phi)
        }
    };
    Ok(verdict(yes, "joinable"))
}

fn linspace(lo: f64, hi: f64, res: usize) -> Vec<f64> {
    (0..res).map(|k| if k + 1 == res { hi } else { lo + (hi - lo) * k as f64 / (res - 1) as f64 }).collect()
}

fn worker_count() -> usize {
    let fallback = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::env::var("QMARGINAL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0).unwrap_or(fallback)
}

/// Coordinates of the k-th grid point, first axis slowest.
fn grid_point(axes: &[Vec<f64>], mut k: usize) -> Vec<f64> {
    let mut p = vec![0.0; axes.len()];
    for (slot, axis) in p.iter_mut().zip(axes).rev() {
        *slot = axis[k % axis.len()];
        k /= axis.len();
    }
    p
}

/// Evaluate `inside` at every grid point, first axis slowest. Work is split
/// into contiguous chunks so the result order never depends on scheduling.
fn sweep(axes: &[Vec<f64>], inside: &(dyn Fn(&[f64]) -> bool + Sync)) -> Vec<bool> {
    let total: usize = axes.iter().map(Vec::len).product();
    let workers = worker_count().min(total.max(1));
    let chunk = total.div_ceil(workers);
    let mut out = vec![false; total];
    std::thread::scope(|s| {
        for (c, slice) in out.chunks_mut(chunk.max(1)).enumerate() {
            s.spawn(move || {
                for (i, o) in slice.iter_mut().enumerate() {
                    *o = inside(&grid_point(axes, c * chunk + i));
                }
            });
        }
    });
    out
}

fn cmd_region(a: RegionArgs) -> Outcome {
    let d = a.d;
    if d < 2 {
        return Err(Failure::usage("--d must be at least 2"));
    }
    if a.res < 2 {
        return Err(Failure::usage("--res must be at least 2"));
    }
    let df = d as f64;
    let psi = linspace(-1.0, 1.0, a.res);
    let phi = linspace(0.0, df, a.res);
    let alpha = linspace(0.0, 1.0, a.res);
    type Test = Box<dyn Fn(&[f64]) -> bool + Sync>;
    let (names, axes, test): (&[&str], Vec<Vec<f64>>, Test) = match a.scenario {
        Scenario::WernerTriple => (
            &["psi_ab", "psi_ac", "psi_bc"],
            vec![psi.clone(), psi.clone(), psi],
            Box::new(move |p| WernerTriple::new(d, p[0], p[1], p[2]).is_ok_and(|t| werner_triple_joinable(&t))),
        ),
        Scenario::IsoTriple => (
            &["phi_ab", "phi_ac", "psi_bc"],
            vec![phi.clone(), phi, psi],
            Box::new(move |p| IsoTriple::new(d, p[0], p[1], p[2]).is_ok_and(|t| iso_triple_joinable(&t))),
        ),
        Scenario::WernerPair => {
            (&["psi_ab", "psi_ac"], vec![psi.clone(), psi], Box::new(move |p| werner_pair_joinable(d, p[0], p[1])))
        }
        Scenario::IsoPair => {
            (&["phi_ab", "phi_ac"], vec![phi.clone(), phi], Box::new(move |p| iso_pair_joinable(d, p[0], p[1])))
        }
        Scenario::Hybrid => {
            (&["phi_ab", "psi_bc"], vec![phi, psi], Box::new(move |p| hybrid_pair_joinable(d, p[0], p[1])))
        }
        Scenario::Classical => (
            &["alpha_ab", "alpha_ac", "alpha_bc"],
            vec![alpha.clone(), alpha.clone(), alpha],
            Box::new(move |p| classical_triple_joinable(d, p[0], p[1], p[2])),
        ),
    };
    let total = axes.iter().map(Vec::len).try_fold(1usize, |acc, n| acc.checked_mul(n));
    match total {
        Some(t) if t <= REGION_MAX_POINTS => {}
        _ => return Err(Failure::usage(format!("grid exceeds {REGION_MAX_POINTS} points"))),
    }
    let inside = sweep(&axes, test.as_ref());
    let body = render_region(names, &axes, &inside, a.format);
    write_output(a.out.as_deref(), &body)?;
    Ok(EXIT_YES)
}

fn render_region(names: &[&str], axes: &[Vec<f64>], inside: &[bool], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = String::with_capacity(inside.len() * 80);
            s.push_str(&names.join(","));
            s.push_str(",inside\n");
            for (k, &ins) in inside.iter().enumerate() {
                for x in grid_point(axes, k) {
                    s.push_str(&format!("{x:.16e},"));
                }
                s.push_str(if ins { "true\n" } else { "false\n" });
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = inside
                .iter()
                .enumerate()
                .map(|(k, &ins)| {
                    let mut r: Vec<serde_json::Value> = grid_point(axes, k).into_iter().map(|x| json!(x)).collect();
                    r.push(json!(ins));
                    serde_json::Value::Array(r)
                })
                .collect();
            let mut s = json!({ "axes": names, "rows": rows }).to_string();
            s.push('\n');
            s
        }
    }
}

fn cmd_share(s: ShareCommand) -> Outcome {
    match s {
        ShareCommand::Check { d, n, m, psi, phi } => {
            if n == 0 || m == 0 {
                return Err(Failure::usage("--m and --n must be positive"));
            }
            match (psi, phi) {
                (Some(x), None) => {
                    let p = WernerParam::new(d, x)?;
                    let ok = if m == 1 { sharable_1n_werner(p, n) } else { sharable_mn_werner(p, m, n)? };
                    Ok(verdict(ok, "sharable"))
                }
                (None, Some(x)) => {
                    if m != 1 {
                        return Err(Failure::usage("isotropic checks are 1-n only"));
                    }
                    Ok(verdict(sharable_1n_iso(IsotropicParam::new(d, x)?, n), "sharable"))
                }
                _ => Err(Failure::usage("give exactly one of --psi and --phi")),
            }
        }
        ShareCommand::Table { d, max, out, format } => {
            if d < 2 || max == 0 {
                return Err(Failure::usage("need --d >= 2 and --max >= 1"));
            }
            if max > TABLE_MAX {
                return Err(Error::CapExceeded { what: "table size", size: max as u128, cap: TABLE_MAX as u128 }.into());
            }
            let cells = sharing_table(d, max)?;
            let body = match format {
                Format::Csv => {
                    let mut s = String::from("d,n,m,threshold,status\n");
                    for c in &cells {
                        s.push_str(&format!("{},{},{},{},{}\n", c.d, c.n, c.m, c.threshold, c.status.as_str()));
                    }
                    s
                }
                Format::Json => {
                    let rows: Vec<_> = cells
                        .iter()
                        .map(|c| json!({"d": c.d, "n": c.n, "m": c.m, "threshold": c.threshold.to_string(), "status": c.status.as_str()}))
                        .collect();
                    format!("{}\n", serde_json::Value::Array(rows))
                }
            };
            write_output(out.as_deref(), &body)?;
            Ok(EXIT_YES)
        }
        ShareCommand::State { d, n, out } => {
            let w = sharing_state_1n(d, n)?;
            write_output(out.as_deref(), &format!("{}\n", state_json(&w)))?;
            Ok(EXIT_YES)
        }
        ShareCommand::Bounds { state, search, seed } => {
            let text = fs::read_to_string(&state).map_err(|e| Failure::io(&state, e))?;
            let file: MatrixFile = serde_json::from_str(&text).map_err(|e| Failure::usage(e.to_string()))?;
            let m: ComplexMatrix = file.to_matrix()?;
            let d = (m.rows() as f64).sqrt().round() as usize;
            if d * d != m.rows() {
                return Err(Failure::usage(format!("{} rows is not a two-qudit dimension", m.rows())));
            }
            let rho = DensityMatrix::new(TensorSpace::uniform(d, 2)?, m)?;
            let b = twirl_sharability_bounds_search(&rho, search, seed)?;
            let n = |x: Option<u64>| x.map_or(json!("inf"), |v| json!(v));
            let body = json!({
                "psi_minus": b.psi_minus,
                "phi_plus": b.phi_plus,
                "werner_max_n": n(b.werner_max_n),
                "iso_max_n": n(b.iso_max_n),
            });
            write_output(None, &format!("{body}\n"))?;
            Ok(EXIT_YES)
        }
    }
}

fn cmd_feasibility(a: FeasibilityArgs) -> Outcome {
    let text = fs::read_to_string(&a.problem).map_err(|e| Failure::io(&a.problem, e))?;
    let problem = FeasibilityProblem::from_json(&text).map_err(|e| match e {
        Error::CapExceeded { .. } => Failure::from(e),
        other => Failure::usage(other.to_string()),
    })?;
    let report = alternating_projection(&problem, a.tol, a.max_iter)?;
    let body = format!("{}\n", report.to_json());
    match &a.out {
        Some(p) => {
            let f = fs::File::create(p).map_err(|e| Failure::io(p, e))?;
            let mut w = BufWriter::new(f);
            w.write_all(body.as_bytes()).and_then(|_| w.flush()).map_err(|e| Failure::io(p, e))?;
            println!("{}", report.verdict.name());
        }
        None => write_output(None, &body)?,
    }
    Ok(match report.verdict {
        Verdict::Feasible(_) => EXIT_YES,
        Verdict::Infeasible { .. } => EXIT_NO,
        Verdict::Undecided { .. } => EXIT_UNDECIDED,
    })
}
