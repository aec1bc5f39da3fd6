//! Command-line driver: K_{n,d} tables, free-energy runs (Monte Carlo, exact
//! 2D oracle, or leading-term formula), and verification suites.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lgt::error::{Error, Result};
use lgt::lattice::{edge_counts, Lattice};
use lgt::maxwell::{extrapolate_kd, knd, maxwell_free_energy};
use lgt::montecarlo::{
    default_beta_grid, exact_2d_free_energy, free_energy_ti, theorem1_prediction,
    theorem1_residual, SimulationParams,
};
use lgt::report::{write_csv, RunReport};
use lgt::verify;

/// Refuse Maxwell systems larger than this many free edges.
const MAX_FREE_EDGES: u64 = 500_000;

#[derive(Parser)]
#[command(
    name = "lgt",
    version,
    about = "U(N) lattice gauge theory toolkit: Maxwell log-determinants, free energies, verification suites"
)]
struct Cli {
    /// Cap on worker threads (default: LGT_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate K_{n,d} over a range of box sizes and extrapolate K_d.
    MaxwellKd {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        /// Output CSV path (columns n,d,free_edges,logdet,K_nd,F_M).
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate or evaluate the per-site free energy.
    FreeEnergy {
        #[arg(value_enum)]
        mode: Mode,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        nmatrix: usize,
        /// Inverse coupling β = 1/g₀² (alternative to --g0).
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        /// Coupling strength g₀ (alternative to --beta).
        #[arg(long, allow_negative_numbers = true)]
        g0: Option<f64>,
        /// Lattice spacing ε (formula mode, d = 2, 3).
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<f64>,
        /// Continuum coupling g (formula mode).
        #[arg(long, allow_negative_numbers = true)]
        g: Option<f64>,
        /// Dimension constant K_d (formula mode; defaults to 0 for d = 2).
        #[arg(long, allow_negative_numbers = true)]
        kd: Option<f64>,
        /// Total sweeps per chain and grid node, including burn-in.
        #[arg(long, default_value_t = 24_000)]
        sweeps: usize,
        #[arg(long = "burn-in", default_value_t = 4_000)]
        burn_in: usize,
        #[arg(long, default_value_t = 4)]
        chains: usize,
        /// Initial proposal scale (auto-tuned during burn-in).
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Number of thermodynamic-integration grid nodes (>= 8).
        #[arg(long = "grid-nodes", default_value_t = 17)]
        grid_nodes: usize,
        /// RNG seed; mandatory for the stochastic mc mode.
        #[arg(long)]
        seed: Option<u64>,
        /// JSON report path; a CSV mirror of the β grid lands next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite (combinatorics, smallball, gauge, poincare,
    /// liealgebra, maxwell, theorem1, or all).
    Verify {
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Mc,
    Exact2d,
    Formula,
}

fn main() {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("LGT_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global();
    }
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::MaxwellKd {
            dim,
            n_min,
            n_max,
            out,
        } => cmd_maxwell_kd(dim, n_min, n_max, &out),
        Command::FreeEnergy {
            mode,
            dim,
            n,
            nmatrix,
            beta,
            g0,
            eps,
            g,
            kd,
            sweeps,
            burn_in,
            chains,
            step,
            grid_nodes,
            seed,
            out,
        } => cmd_free_energy(FreeEnergyArgs {
            mode,
            dim,
            n,
            nmatrix,
            beta,
            g0,
            eps,
            g,
            kd,
            sweeps,
            burn_in,
            chains,
            step,
            grid_nodes,
            seed,
            out,
        }),
        Command::Verify { suite, seed, out } => cmd_verify(&suite, seed, out.as_deref()),
    }
}

fn cmd_maxwell_kd(dim: usize, n_min: usize, n_max: usize, out: &Path) -> Result<i32> {
    if !(2..=4).contains(&dim) {
        return Err(Error::InvalidArgument(format!(
            "dim must be 2, 3 or 4, got {dim}"
        )));
    }
    if !(2 <= n_min && n_min < n_max) {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= n_min < n_max, got {n_min}..{n_max}"
        )));
    }
    let largest = edge_counts(dim, n_max)?;
    if largest.free > MAX_FREE_EDGES {
        return Err(Error::SizeCapExceeded(format!(
            "n_max={n_max} gives {} free edges, above the cap {MAX_FREE_EDGES}",
            largest.free
        )));
    }

    let mut rows = Vec::new();
    let mut points = Vec::new();
    for n in n_min..=n_max {
        let lat = Arc::new(Lattice::new(dim, n)?);
        let k = knd(&lat)?;
        let logdet = -k * 2.0 * lat.vertex_count() as f64;
        let fm = maxwell_free_energy(&lat)?;
        rows.push(format!(
            "{},{},{},{},{},{}",
            n,
            dim,
            lat.free_edge_count(),
            logdet,
            k,
            fm
        ));
        points.push((n, k));
        println!("n={n:3} d={dim} K_nd={k:.9} F_M={fm:.9}");
    }
    let footer = if points.len() >= 3 {
        let est = extrapolate_kd(&points)?;
        println!(
            "K_{dim} = {:.9} +/- {:.9} (fit K + a/n, a = {:.6})",
            est.kd, est.uncertainty, est.slope
        );
        Some(format!(
            "K_d={} uncertainty={} fit_slope={}",
            est.kd, est.uncertainty, est.slope
        ))
    } else {
        None
    };
    write_csv(out, "n,d,free_edges,logdet,K_nd,F_M", rows, footer)?;
    println!("wrote {}", out.display());
    Ok(0)
}

struct FreeEnergyArgs {
    mode: Mode,
    dim: usize,
    n: usize,
    nmatrix: usize,
    beta: Option<f64>,
    g0: Option<f64>,
    eps: Option<f64>,
    g: Option<f64>,
    kd: Option<f64>,
    sweeps: usize,
    burn_in: usize,
    chains: usize,
    step: f64,
    grid_nodes: usize,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct FreeEnergyParams {
    mode: &'static str,
    d: usize,
    n: usize,
    nmatrix: usize,
    beta: Option<f64>,
    g0: Option<f64>,
    eps: Option<f64>,
    g: Option<f64>,
    kd: Option<f64>,
    sweeps: Option<usize>,
    burn_in: Option<usize>,
    chains: Option<usize>,
    step: Option<f64>,
    grid_nodes: Option<usize>,
    seed: Option<u64>,
}

fn resolve_beta(beta: Option<f64>, g0: Option<f64>) -> Result<(f64, f64)> {
    match (beta, g0) {
        (Some(b), None) => {
            if !(b > 0.0) {
                return Err(Error::InvalidArgument("beta must be positive".into()));
            }
            Ok((b, 1.0 / b.sqrt()))
        }
        (None, Some(g)) => {
            if !(g > 0.0) {
                return Err(Error::InvalidArgument("g0 must be positive".into()));
            }
            Ok((1.0 / (g * g), g))
        }
        (Some(_), Some(_)) => Err(Error::InvalidArgument(
            "give exactly one of --beta and --g0".into(),
        )),
        (None, None) => Err(Error::InvalidArgument(
            "this mode needs --beta or --g0".into(),
        )),
    }
}

fn cmd_free_energy(args: FreeEnergyArgs) -> Result<i32> {
    let t0 = Instant::now();
    match args.mode {
        Mode::Mc => {
            let (beta, g0) = resolve_beta(args.beta, args.g0)?;
            let seed = args.seed.ok_or_else(|| {
                Error::InvalidArgument("--seed is mandatory for the stochastic mc mode".into())
            })?;
            let params = SimulationParams {
                d: args.dim,
                n: args.n,
                nmatrix: args.nmatrix,
                beta,
                sweeps: args.sweeps,
                burn_in: args.burn_in,
                chains: args.chains,
                step: args.step,
                seed,
            };
            let grid = default_beta_grid(beta, args.grid_nodes.max(8));
            let estimate = free_energy_ti(&params, &grid)?;
            let kd = args.kd.or(if args.dim == 2 { Some(0.0) } else { None });
            let residual = kd
                .map(|k| {
                    theorem1_residual(args.dim, args.nmatrix, args.n, beta, estimate.value, k)
                })
                .transpose()?;
            println!(
                "F = {:.6} +/- {:.6} (quadrature error {:.2e}, equilibrated: {})",
                estimate.value, estimate.stderr, estimate.quadrature_error, estimate.equilibrated
            );
            if let Some(r) = residual {
                println!("theorem-1 residual = {r:.6}");
            }
            let echo = FreeEnergyParams {
                mode: "mc",
                d: args.dim,
                n: args.n,
                nmatrix: args.nmatrix,
                beta: Some(beta),
                g0: Some(g0),
                eps: None,
                g: None,
                kd,
                sweeps: Some(args.sweeps),
                burn_in: Some(args.burn_in),
                chains: Some(args.chains),
                step: Some(args.step),
                grid_nodes: Some(args.grid_nodes),
                seed: Some(seed),
            };
            #[derive(Serialize)]
            struct McResults<'a> {
                #[serde(flatten)]
                estimate: &'a lgt::montecarlo::FreeEnergyEstimate,
                residual: Option<f64>,
            }
            let report = RunReport::new(
                "free-energy mc",
                echo,
                McResults {
                    estimate: &estimate,
                    residual,
                },
                t0.elapsed().as_millis() as u64,
            )?;
            if let Some(out) = &args.out {
                report.write_json(out)?;
                let mirror = out.with_extension("csv");
                write_csv(
                    &mirror,
                    "beta,mean_action_per_site,stderr",
                    estimate.beta_grid.iter().map(|r| {
                        format!("{},{},{}", r.beta, r.mean_action_per_site, r.stderr)
                    }),
                    None,
                )?;
                println!("wrote {} and {}", out.display(), mirror.display());
            }
            Ok(0)
        }
        Mode::Exact2d => {
            if args.dim != 2 || args.nmatrix != 1 {
                return Err(Error::UnsupportedOracle(
                    "exact2d requires --dim 2 --nmatrix 1".into(),
                ));
            }
            let (beta, g0) = resolve_beta(args.beta, args.g0)?;
            let value = exact_2d_free_energy(args.n, beta, 1)?;
            let kd = args.kd.unwrap_or(0.0);
            let residual = theorem1_residual(2, 1, args.n, beta, value, kd)?;
            println!("F_exact = {value:.9}");
            println!("theorem-1 residual = {residual:.6}");
            let echo = FreeEnergyParams {
                mode: "exact2d",
                d: 2,
                n: args.n,
                nmatrix: 1,
                beta: Some(beta),
                g0: Some(g0),
                eps: None,
                g: None,
                kd: Some(kd),
                sweeps: None,
                burn_in: None,
                chains: None,
                step: None,
                grid_nodes: None,
                seed: None,
            };
            #[derive(Serialize)]
            struct ExactResults {
                value: f64,
                residual: f64,
            }
            let report = RunReport::new(
                "free-energy exact2d",
                echo,
                ExactResults { value, residual },
                t0.elapsed().as_millis() as u64,
            )?;
            if let Some(out) = &args.out {
                report.write_json(out)?;
                println!("wrote {}", out.display());
            }
            Ok(0)
        }
        Mode::Formula => {
            let kd = args.kd.or(if args.dim == 2 { Some(0.0) } else { None });
            let kd = kd.ok_or_else(|| {
                Error::InvalidArgument("formula mode needs --kd (the dimension constant)".into())
            })?;
            let g = args.g.ok_or_else(|| {
                Error::InvalidArgument("formula mode needs --g (continuum coupling)".into())
            })?;
            let nf = args.n as f64;
            let n2 = (args.nmatrix * args.nmatrix) as f64;
            let log_z = match args.dim {
                2 | 3 => {
                    let eps = args.eps.ok_or_else(|| {
                        Error::InvalidArgument("formula mode needs --eps for d = 2, 3".into())
                    })?;
                    let coupling = (g * g * eps.powi(4 - args.dim as i32)).ln();
                    nf.powi(args.dim as i32)
                        * (0.5 * (args.dim as f64 - 1.0) * n2 * coupling
                            + theorem1_prediction(args.dim, args.nmatrix, kd))
                }
                4 => {
                    // ε drops out in d = 4; the weak-coupling formula keeps
                    // the n-dependent coefficient of log g².
                    let coeff = 1.5 - 2.0 / nf + 0.5 / nf.powi(4);
                    nf.powi(4) * (coeff * n2 * (g * g).ln() + theorem1_prediction(4, args.nmatrix, kd))
                }
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "formula mode supports d in {{2,3,4}}, got {other}"
                    )))
                }
            };
            let per_site = log_z / nf.powi(args.dim as i32);
            println!("log Z (leading term) = {log_z:.6}");
            println!("per site             = {per_site:.6}");
            let echo = FreeEnergyParams {
                mode: "formula",
                d: args.dim,
                n: args.n,
                nmatrix: args.nmatrix,
                beta: None,
                g0: None,
                eps: args.eps,
                g: Some(g),
                kd: Some(kd),
                sweeps: None,
                burn_in: None,
                chains: None,
                step: None,
                grid_nodes: None,
                seed: None,
            };
            #[derive(Serialize)]
            struct FormulaResults {
                log_z_leading: f64,
                per_site: f64,
            }
            let report = RunReport::new(
                "free-energy formula",
                echo,
                FormulaResults {
                    log_z_leading: log_z,
                    per_site,
                },
                t0.elapsed().as_millis() as u64,
            )?;
            if let Some(out) = &args.out {
                report.write_json(out)?;
                println!("wrote {}", out.display());
            }
            Ok(0)
        }
    }
}

fn cmd_verify(suite: &str, seed: Option<u64>, out: Option<&Path>) -> Result<i32> {
    let t0 = Instant::now();
    let reports = verify::run_named(suite, seed)?;
    let mut all_passed = true;
    for report in &reports {
        for c in &report.checks {
            println!(
                "[{}] {} ... {}  ({})",
                report.suite,
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.detail
            );
        }
        all_passed &= report.passed;
    }
    println!(
        "verify {suite}: {} in {:.1}s",
        if all_passed { "PASS" } else { "FAIL" },
        t0.elapsed().as_secs_f64()
    );
    if let Some(out) = out {
        let report = RunReport::new(
            &format!("verify {suite}"),
            serde_json::json!({
                "suite": suite,
                "seed": seed.unwrap_or(verify::DEFAULT_SEED),
            }),
            &reports,
            t0.elapsed().as_millis() as u64,
        )?;
        report.write_json(out)?;
        println!("wrote {}", out.display());
    }
    Ok(if all_passed { 0 } else { 1 })
}
