//! Command-line surface: coefficients, reduced blocks, reduction
//! verification, monodromy, Morse indices, degenerate curves, thresholds,
//! table reproduction, parameter sweeps, and the selftest gate.

use clap::{Args, Parser, Subcommand, ValueEnum};
use gonstab::atlas::{
    large_m_certificates, principal_mass_proxy, reproduce_tables, sweep, thresholds, RangeSpec,
    SweepMode, TableKind,
};
use gonstab::blocks::{bounding_blocks, reduced_block, CoefficientPath};
use gonstab::coefficients::{block_coefficients, global_coefficients};
use gonstab::error::{Error, Result};
use gonstab::monodromy::{gon_verdict, integrate_monodromy};
use gonstab::morse::{
    degenerate_curves, index_and_nullity, two_param_index, BoundaryTwist, DEFAULT_MODES,
    DEFAULT_RHO_GRID,
};
use gonstab::reduction::reduce_and_verify;
use gonstab::{selftest, Scenario};
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "gonstab",
    version,
    about = "Linear stability of ring-plus-central-mass relative equilibria on Kepler ellipses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON even for outputs that default to text.
    #[arg(long, global = true)]
    json: bool,

    /// Write the primary output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Relative tolerance for the monodromy integrator.
    #[arg(long, global = true, default_value_t = 1e-11)]
    rel_tol: f64,

    /// Fourier truncation for the spectral discretization.
    #[arg(long, global = true, default_value_t = DEFAULT_MODES)]
    modes: usize,

    /// Twist-circle grid size for positivity certificates.
    #[arg(long, global = true, default_value_t = DEFAULT_RHO_GRID)]
    rho_grid: usize,

    /// Worker threads (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Lift the default cap e <= 0.99 (the coefficients degenerate as
    /// e approaches 1).
    #[arg(long, global = true)]
    allow_extreme_e: bool,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Ring size.
    #[arg(long)]
    n: usize,
    /// Central mass.
    #[arg(long, default_value_t = 0.0)]
    m: f64,
    /// Eccentricity.
    #[arg(long, default_value_t = 0.0)]
    e: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum WhichTable {
    Sigma,
    Dcheck,
    Instability,
    All,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CliSweepMode {
    ClosedForm,
    Monodromy,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar coefficients of the ring configuration.
    Coeffs {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Restrict to one mode.
        #[arg(long)]
        block: Option<usize>,
    },
    /// Reduced mode blocks and their two-parameter bounds.
    Blocks {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        block: Option<usize>,
    },
    /// Numerically verify the symmetry-basis block diagonalization.
    VerifyReduction {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: f64,
        /// Include the extracted block matrices in the report.
        #[arg(long)]
        full: bool,
    },
    /// Monodromy matrices, multipliers and verdicts.
    Monodromy {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        block: Option<usize>,
    },
    /// Twisted Morse index of one scenario mode.
    Morse {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Twist: `1`, `-1`, or `rho=R` with R in [0, 1).
        #[arg(long, default_value = "1")]
        omega: String,
        #[arg(long)]
        block: Option<usize>,
    },
    /// Twisted Morse index of a two-parameter comparison block.
    MorseAb {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        e: f64,
        #[arg(long, default_value = "1")]
        omega: String,
    },
    /// Tabulate the e = 0 degenerate curves with nullity checks (CSV).
    Curves {
        /// Alpha grid as lo:hi:step.
        #[arg(long, value_name = "LO:HI:STEP")]
        alpha_range: String,
    },
    /// Closed-form instability thresholds for one ring size.
    Thresholds {
        #[arg(long)]
        n: usize,
    },
    /// Reproduce the published tables and report deviations.
    Tables {
        #[arg(long, value_enum, default_value_t = WhichTable::All)]
        which: WhichTable,
    },
    /// Large-mass periodic-twist positivity certificates.
    LargeMass {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        e: f64,
    },
    /// Grid sweep over (m, e) with CSV output and a JSON sidecar.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, value_name = "LO:HI:STEP")]
        m_range: String,
        #[arg(long, value_name = "LO:HI:STEP")]
        e_range: String,
        #[arg(long, value_enum, default_value_t = CliSweepMode::Both)]
        mode: CliSweepMode,
        /// Also estimate the principal-mode mass proxy for this ring.
        #[arg(long)]
        mass_proxy: bool,
    },
    /// Run the integrity gate; exit code 0 only on a full pass.
    Selftest,
}

fn parse_range(text: &str) -> Result<RangeSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::domain(format!("range '{text}' is not LO:HI:STEP")));
    }
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| Error::domain(format!("bad number '{s}' in range")))
    };
    RangeSpec::new(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)
}

fn parse_omega(text: &str) -> Result<BoundaryTwist> {
    match text {
        "1" | "+1" => Ok(BoundaryTwist::periodic()),
        "-1" => Ok(BoundaryTwist::antiperiodic()),
        other => {
            if let Some(rho) = other.strip_prefix("rho=") {
                let rho: f64 = rho
                    .parse()
                    .map_err(|_| Error::domain(format!("bad twist fraction '{rho}'")))?;
                BoundaryTwist::from_rho(rho)
            } else {
                Err(Error::domain(format!(
                    "twist '{other}' is not 1, -1 or rho=R"
                )))
            }
        }
    }
}

fn check_eccentricity(e: f64, allow_extreme: bool) -> Result<()> {
    if e > 0.99 && !allow_extreme {
        return Err(Error::domain(
            "e > 0.99 degrades the numerics; pass --allow-extreme-e to proceed",
        ));
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
            f.write_all(b"\n")?;
            Ok(())
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn mode_list(scenario: &Scenario, block: Option<usize>) -> Result<Vec<usize>> {
    match block {
        Some(l) => {
            if l < 1 || l > scenario.mode_count() {
                return Err(Error::domain(format!(
                    "block {l} out of range 1..={}",
                    scenario.mode_count()
                )));
            }
            Ok(vec![l])
        }
        None => Ok((1..=scenario.mode_count()).collect()),
    }
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn monodromy_json(r: &gonstab::monodromy::MonodromyReport) -> serde_json::Value {
    json!({
        "block": r.block,
        "verdict": r.verdict,
        "multipliers": r.multipliers.iter().map(|&(re, im)| {
            json!({ "re": re, "im": im, "abs": (re * re + im * im).sqrt() })
        }).collect::<Vec<_>>(),
        "symplectic_residual": r.symplectic_residual,
        "det_residual": r.det_residual,
        "multiplier_cross_residual": r.multiplier_cross_residual,
        "krein": r.krein,
        "rel_tol": r.rel_tol,
        "steps": r.steps,
    })
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Coeffs { scenario, block } => {
            let s = Scenario::new(scenario.n, scenario.m, scenario.e)?;
            check_eccentricity(s.e, cli.allow_extreme_e)?;
            let global = global_coefficients(&s)?;
            let modes: Vec<_> = mode_list(&s, block)?
                .into_iter()
                .map(|l| block_coefficients(&s, l))
                .collect::<Result<_>>()?;
            let doc = json!({ "scenario": s, "global": global, "blocks": modes });
            emit(&cli.out, &serde_json::to_string_pretty(&doc)?)
        }
        Command::Blocks { scenario, block } => {
            let s = Scenario::new(scenario.n, scenario.m, scenario.e)?;
            check_eccentricity(s.e, cli.allow_extreme_e)?;
            let mut blocks = Vec::new();
            for l in mode_list(&s, block)? {
                let r = reduced_block(&s, l)?;
                let b = bounding_blocks(&s, l)?;
                blocks.push(json!({
                    "l": l,
                    "dim": r.dim(),
                    "matrix": matrix_rows(&r.matrix),
                    "lower": b.lower,
                    "upper": b.upper,
                }));
            }
            let doc = json!({ "scenario": s, "blocks": blocks });
            emit(&cli.out, &serde_json::to_string_pretty(&doc)?)
        }
        Command::VerifyReduction { n, m, full } => {
            let report = reduce_and_verify(n, m)?;
            let mut doc = serde_json::to_value(&report)?;
            if !full {
                doc.as_object_mut()
                    .expect("report is an object")
                    .remove("blocks");
            }
            emit(&cli.out, &serde_json::to_string_pretty(&doc)?)
        }
        Command::Monodromy { scenario, block } => {
            let s = Scenario::new(scenario.n, scenario.m, scenario.e)?;
            check_eccentricity(s.e, cli.allow_extreme_e)?;
            let doc = match block {
                Some(l) => {
                    if l < 1 || l > s.mode_count() {
                        return Err(Error::domain(format!(
                            "block {l} out of range 1..={}",
                            s.mode_count()
                        )));
                    }
                    let path = CoefficientPath::from_reduced(&reduced_block(&s, l)?, s.e)?;
                    let mut report = integrate_monodromy(&path, cli.rel_tol)?;
                    report.block = Some(l);
                    json!({ "scenario": s, "blocks": [monodromy_json(&report)] })
                }
                None => {
                    let v = gon_verdict(&s, cli.rel_tol)?;
                    json!({
                        "scenario": s,
                        "overall": v.overall,
                        "blocks": v.blocks.iter().map(monodromy_json).collect::<Vec<_>>(),
                    })
                }
            };
            emit(&cli.out, &serde_json::to_string_pretty(&doc)?)
        }
        Command::Morse {
            scenario,
            omega,
            block,
        } => {
            let s = Scenario::new(scenario.n, scenario.m, scenario.e)?;
            check_eccentricity(s.e, cli.allow_extreme_e)?;
            let twist = parse_omega(&omega)?;
            let mut results = Vec::new();
            for l in mode_list(&s, block)? {
                let r = reduced_block(&s, l)?;
                let idx = index_and_nullity(&r.matrix, s.e, &twist, cli.modes)?;
                results.push(json!({ "l": l, "index": idx }));
            }
            let doc = json!({ "scenario": s, "rho": twist.rho, "modes": results });
            emit(&cli.out, &serde_json::to_string_pretty(&doc)?)
        }
        Command::MorseAb {
            alpha,
            beta,
            e,
            omega,
        } => {
            check_eccentricity(e, cli.allow_extreme_e)?;
            let twist = parse_omega(&omega)?;
            let idx = two_param_index(alpha, beta, e, &twist, cli.modes)?;
            let doc = json!({
                "alpha": alpha, "beta": beta, "e": e, "rho": twist.rho, "index": idx,
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc)?)
        }
        Command::Curves { alpha_range } => {
            let range = parse_range(&alpha_range)?;
            let points = degenerate_curves(&range.values(), cli.modes)?;
            let mut text = String::from("alpha,beta_curve_id,beta,nullity_check\n");
            for p in &points {
                text.push_str(&format!(
                    "{},{:?},{},{}\n",
                    p.alpha,
                    p.curve,
                    p.beta,
                    if p.nullity == p.expected_nullity {
                        "ok"
                    } else {
                        "mismatch"
                    },
                ));
            }
            emit(&cli.out, text.trim_end())
        }
        Command::Thresholds { n } => {
            let t = thresholds(n)?;
            if cli.json || cli.out.is_some() {
                emit(&cli.out, &serde_json::to_string_pretty(&t)?)
            } else {
                println!("ring n = {n}  (beta0 = {}):", t.beta0);
                for b in &t.blocks {
                    let bracket = if b.l == 1 { '[' } else { '(' };
                    println!(
                        "  mode {}: {}{:.6}, {:.6})  {}",
                        b.l,
                        bracket,
                        b.lower,
                        b.upper,
                        if b.is_empty() {
                            "empty"
                        } else {
                            "hyperbolic for every e"
                        }
                    );
                }
                println!("  large-mass threshold 2 Qmax = {:.6}", t.large_m_threshold);
                Ok(())
            }
        }
        Command::Tables { which } => {
            let kinds: Vec<TableKind> = match which {
                WhichTable::Sigma => vec![TableKind::Sigma],
                WhichTable::Dcheck => vec![TableKind::Dcheck],
                WhichTable::Instability => vec![TableKind::Instability],
                WhichTable::All => {
                    vec![TableKind::Sigma, TableKind::Dcheck, TableKind::Instability]
                }
            };
            let reports: Vec<_> = kinds
                .into_iter()
                .map(reproduce_tables)
                .collect::<Result<_>>()?;
            if cli.json || cli.out.is_some() {
                emit(&cli.out, &serde_json::to_string_pretty(&reports)?)
            } else {
                for r in &reports {
                    println!("table {:?}: max deviation {:.3e}", r.kind, r.max_deviation);
                    for row in &r.rows {
                        let note = row.note.map(|n| format!("  ({n})")).unwrap_or_default();
                        println!(
                            "  {:<18} computed {:<12.6} printed {:<10} dev {:.2e}{note}",
                            row.label, row.computed, row.printed, row.deviation
                        );
                    }
                }
                Ok(())
            }
        }
        Command::LargeMass { n, e } => {
            check_eccentricity(e, cli.allow_extreme_e)?;
            let report = large_m_certificates(n, e, cli.modes)?;
            emit(&cli.out, &serde_json::to_string_pretty(&report)?)
        }
        Command::Sweep {
            n,
            m_range,
            e_range,
            mode,
            mass_proxy,
        } => {
            let m_range = parse_range(&m_range)?;
            let e_range = parse_range(&e_range)?;
            if e_range.hi > 0.99 && !cli.allow_extreme_e {
                return Err(Error::domain(
                    "sweep eccentricities above 0.99 need --allow-extreme-e",
                ));
            }
            let mode = match mode {
                CliSweepMode::ClosedForm => SweepMode::ClosedForm,
                CliSweepMode::Monodromy => SweepMode::Monodromy,
                CliSweepMode::Both => SweepMode::Both,
            };
            let mut grid = sweep(
                n,
                m_range,
                e_range,
                mode,
                cli.rel_tol,
                cli.modes,
                cli.rho_grid,
            )?;
            if mass_proxy && grid.config.principal_mass_proxy.is_none() {
                grid.config.principal_mass_proxy =
                    Some(principal_mass_proxy(n, e_range.lo, cli.modes)?);
            }
            let mut csv = Vec::new();
            grid.write_csv(&mut csv)?;
            let sidecar = serde_json::to_string_pretty(&grid.config)?;
            match &cli.out {
                Some(path) => {
                    std::fs::write(path, &csv)?;
                    let mut sidecar_path = path.clone().into_os_string();
                    sidecar_path.push(".json");
                    std::fs::write(sidecar_path, sidecar)?;
                }
                None => {
                    print!("{}", String::from_utf8_lossy(&csv));
                    eprintln!("{sidecar}");
                }
            }
            Ok(())
        }
        Command::Selftest => selftest::run(cli.modes),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
