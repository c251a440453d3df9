//! Command-line front end: build family coefficient quivers, classify cells,
//! compute Euler characteristics, F-polynomials and cluster variables,
//! export DOT, and run the finite-field verification.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage/parse error,
//! 3 verification failure.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schubert::dim::{defect, DimVector};
use schubert::families::{build_family, validate_family, FamilySpec};
use schubert::fpoly::{cluster_variable, f_from_cells};
use schubert::grass::{
    decomposition_table, euler_characteristic, eval_poly, full_sweep, points_over_fq_all,
    poly_string, Classification,
};
use schubert::rep::CoefficientQuiver;
use schubert::scalar::Rat;
use schubert::state::{beta_state_traced, subset, BetaOutcome};
use schubert::system::{build_system, SystemKind};

#[derive(Parser)]
#[command(
    name = "schubert",
    version,
    about = "Schubert decompositions of quiver Grassmannians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FamilyArg {
    /// Family spec, e.g. defect-1:n=6,r=3,orient=RRRRRR (see README).
    #[arg(long)]
    family: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print the coefficient quiver of a family member as JSON.
    Build {
        #[command(flatten)]
        family: FamilyArg,
    },
    /// Classify the Schubert cells of one type (or print a single
    /// beta-state with --beta).
    Cells {
        #[command(flatten)]
        family: FamilyArg,
        /// Dimension vector e, comma-separated in vertex order.
        #[arg(long)]
        e: Option<String>,
        /// A single basis subset, comma-separated ids.
        #[arg(long)]
        beta: Option<String>,
        /// Log the beta-state algorithm steps (with --beta).
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Euler characteristic of Gr_e(M).
    Chi {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        e: String,
    },
    /// The F-polynomial (requires every cell to classify).
    Fpoly {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        json: bool,
    },
    /// The cluster variable X_M as a Laurent polynomial.
    ClusterVar {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        json: bool,
    },
    /// Export the coefficient quiver or a Schubert system as DOT.
    ExportDot {
        #[command(flatten)]
        family: FamilyArg,
        /// One of: gamma, complete, reduced.
        #[arg(long, default_value = "gamma")]
        system: String,
    },
    /// Cross-check every cell classification against subrepresentation
    /// counts over F_q; exits 3 on any mismatch.
    Verify {
        #[command(flatten)]
        family: FamilyArg,
        /// Primes to check (repeatable).
        #[arg(long = "q", default_values_t = [2u64, 3u64])]
        qs: Vec<u64>,
    },
    /// Summary of a family member: dimension vector, defect, basis size.
    Info {
        #[command(flatten)]
        family: FamilyArg,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SCHUBERT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let parse = matches!(
                err.downcast_ref::<schubert::Error>(),
                Some(schubert::Error::Parse(_)) | Some(schubert::Error::InvalidFamily(_))
            );
            if parse {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn gamma_of(family: &FamilyArg) -> anyhow::Result<(FamilySpec, CoefficientQuiver<Rat>)> {
    let spec = FamilySpec::parse(&family.family)?;
    let gamma = build_family(&spec)?;
    Ok((spec, gamma))
}

fn parse_beta(s: &str) -> anyhow::Result<Vec<u32>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| anyhow::anyhow!("invalid basis id '{t}'"))
        })
        .collect()
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Build { family } => {
            let (_, gamma) = gamma_of(&family)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&gamma.to_json())?)?;
        }
        Command::Cells {
            family,
            e,
            beta,
            trace,
            json,
        } => {
            let (_, gamma) = gamma_of(&family)?;
            if let Some(beta) = beta {
                let ids = parse_beta(&beta)?;
                let sys = build_system(&gamma, SystemKind::Reduced);
                let b = subset(&ids);
                let (outcome, log) = beta_state_traced(&sys, &b);
                if trace {
                    for line in &log {
                        writeln!(out, "# {line}")?;
                    }
                }
                match outcome {
                    BetaOutcome::Contradictory => writeln!(out, "contradictory")?,
                    BetaOutcome::State(state) => {
                        let pairs: Vec<String> = state
                            .pairs
                            .iter()
                            .map(|&p| format!("({},{})", sys.pairs[p].i, sys.pairs[p].j))
                            .collect();
                        let triples: Vec<String> =
                            state.triples.iter().map(|&t| sys.triple_name(t)).collect();
                        writeln!(out, "pairs: {{{}}}", pairs.join(", "))?;
                        writeln!(out, "triples: {{{}}}", triples.join(", "))?;
                        writeln!(
                            out,
                            "classification: {}",
                            schubert::grass::classify_cell_with(&sys, &b).label()
                        )?;
                    }
                }
            } else {
                let e = e.ok_or_else(|| anyhow::anyhow!("--e or --beta is required"))?;
                let e = DimVector::parse(&e, &gamma.quiver)?;
                let table = decomposition_table(&gamma, &e)?;
                if json {
                    writeln!(out, "{}", serde_json::to_string_pretty(&table.to_json())?)?;
                } else {
                    write!(out, "{}", table.to_csv())?;
                }
            }
        }
        Command::Chi { family, e } => {
            let (_, gamma) = gamma_of(&family)?;
            let e = DimVector::parse(&e, &gamma.quiver)?;
            writeln!(out, "{}", euler_characteristic(&gamma, &e)?)?;
        }
        Command::Fpoly { family, json } => {
            let (_, gamma) = gamma_of(&family)?;
            let f = f_from_cells(&gamma)?;
            if json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&f.to_json(&gamma.quiver))?
                )?;
            } else {
                writeln!(out, "{}", f.to_text(&gamma.quiver))?;
            }
        }
        Command::ClusterVar { family, json } => {
            let (_, gamma) = gamma_of(&family)?;
            let f = f_from_cells(&gamma)?;
            let x = cluster_variable(&f, &gamma.dim_vector(), &gamma.quiver);
            if json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&x.to_json(&gamma.quiver))?
                )?;
            } else {
                writeln!(out, "{}", x.to_text(&gamma.quiver))?;
            }
        }
        Command::ExportDot { family, system } => {
            let (_, gamma) = gamma_of(&family)?;
            let dot = match system.as_str() {
                "gamma" => gamma.to_dot(),
                "complete" => build_system(&gamma, SystemKind::Complete).to_dot(),
                "reduced" => build_system(&gamma, SystemKind::Reduced).to_dot(),
                other => {
                    return Err(schubert::Error::Parse(format!(
                        "unknown system '{other}' (expected gamma, complete or reduced)"
                    ))
                    .into())
                }
            };
            write!(out, "{dot}")?;
        }
        Command::Verify { family, qs } => {
            let (spec, gamma) = gamma_of(&family)?;
            let violations = validate_family(&gamma, &spec);
            for v in &violations {
                eprintln!("family condition violated: {v}");
            }
            let mut failed = !violations.is_empty();
            eprintln!("classifying cells ...");
            let sweep = full_sweep(&gamma);
            let undetermined = sweep
                .cells
                .iter()
                .filter(|(_, c)| matches!(c, Classification::Undetermined))
                .count();
            if undetermined > 0 {
                eprintln!("{undetermined} cell(s) undetermined");
                failed = true;
            }
            for &q in &qs {
                eprintln!("counting points over F_{q} ...");
                let counts = points_over_fq_all(&gamma, q)?;
                let dims = gamma.dim_vector();
                let mut e = DimVector(vec![0; dims.len()]);
                'sweep: loop {
                    let expected = counts.get(&e).copied().unwrap_or(0);
                    let poly = sweep
                        .per_type
                        .get(&e)
                        .map(|(_, p, _)| p.clone())
                        .unwrap_or_default();
                    let got = eval_poly(&poly, q as u128);
                    let status = if got == expected { "ok" } else { "MISMATCH" };
                    if got != expected {
                        failed = true;
                    }
                    writeln!(
                        out,
                        "e={e} q={q} cells={} points={expected} {status}",
                        poly_string(&poly)
                    )?;
                    let mut i = 0;
                    loop {
                        if i == e.len() {
                            break 'sweep;
                        }
                        e.0[i] += 1;
                        if e.0[i] <= dims.0[i] {
                            break;
                        }
                        e.0[i] = 0;
                        i += 1;
                    }
                }
            }
            if failed {
                return Ok(ExitCode::from(3));
            }
            writeln!(out, "verified")?;
        }
        Command::Info { family } => {
            let (spec, gamma) = gamma_of(&family)?;
            let dim = gamma.dim_vector();
            writeln!(out, "family: {}", family.family)?;
            writeln!(out, "vertices: {}", gamma.vertex_count())?;
            writeln!(out, "arrows: {}", gamma.arrows().len())?;
            writeln!(out, "dim: {dim}")?;
            if let Ok(d) = defect(&gamma.quiver, &dim) {
                writeln!(out, "defect: {d}")?;
            }
            let violations = validate_family(&gamma, &spec);
            writeln!(
                out,
                "family conditions: {}",
                if violations.is_empty() {
                    "ok".to_string()
                } else {
                    violations.join("; ")
                }
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
