//! `rbm-lab`: experiments on fixed-bandwidth random band matrices.
//!
//! Exit codes: 0 success, 1 config error, 2 runtime failure, 3 acceptance
//! failure.

use clap::{Args, Parser, Subcommand};
use rbm_core::{DensityConfig, EnsembleParams};
use rbm_lab::acceptance::{self, AcceptanceOptions};
use rbm_lab::config::{ExperimentConfig, ExperimentKind};
use rbm_lab::error::LabError;
use rbm_lab::experiments;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rbm-lab", version, about = "Random band matrix laboratory")]
struct Cli {
    /// Config file (TOML); flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override (default 42; all randomness derives from it)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; 0 uses the machine parallelism (default 0)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output directory (default "results")
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct EnsembleArgs {
    /// Matrix half-size N, order 2N+1 (default 100)
    #[arg(long = "N", short = 'N')]
    n: Option<usize>,

    /// Half-bandwidth L, bandwidth 2L+1 (default 1)
    #[arg(long = "L", short = 'L')]
    l: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Appendix identity checks: resolvent integral and Duhamel bounds
    #[command(after_help = "Config-file keys without flags (section [identities]): \
        resolvent_tol (default 1e-6), duhamel_tol (default 1e-8).")]
    Identities {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Random normal pairs for the semigroup checks (default 100)
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Density-of-states estimates: ε-ladder resolvent, histogram, KDE, moments
    #[command(after_help = "Config-file keys without flags (section [dos]): \
        eps_ladder (default [0.2, 0.1, 0.05]).")]
    Dos {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Monte Carlo samples for the resolvent estimator (default 2000)
        #[arg(long)]
        samples: Option<usize>,
        /// Samples for the histogram estimator (default 1000)
        #[arg(long)]
        hist_samples: Option<usize>,
        /// Energy grid start (default -3.0)
        #[arg(long)]
        e_min: Option<f64>,
        /// Energy grid end (default 3.0)
        #[arg(long)]
        e_max: Option<f64>,
        /// Energy grid step (default 0.25)
        #[arg(long)]
        e_step: Option<f64>,
        /// Histogram bin width; 0 = Freedman–Diaconis (default 0)
        #[arg(long)]
        bin_width: Option<f64>,
        /// Highest trace moment (default 4)
        #[arg(long)]
        p_max: Option<u32>,
        /// Use only the center diagonal entry (default false)
        #[arg(long)]
        center_only: bool,
    },
    /// Fractional-moment decay profile and spectral-averaging suprema
    #[command(after_help = "Config-file keys without flags (section [locmoments]): \
        center (default 0), sa_samples (default 2000).")]
    Locmoments {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Fractional power s in (0,1) (default 0.3)
        #[arg(long)]
        s: Option<f64>,
        /// Shift energy E (default 0)
        #[arg(long)]
        e0: Option<f64>,
        /// Shift imaginary part ε ≥ 0 (default 0)
        #[arg(long)]
        eps: Option<f64>,
        /// Largest index distance (default 30)
        #[arg(long)]
        max_distance: Option<usize>,
        /// Monte Carlo samples (default 10000)
        #[arg(long)]
        samples: Option<usize>,
        /// Smallest distance used by the decay fit (default 5)
        #[arg(long)]
        fit_min_distance: Option<usize>,
    },
    /// Coupled volume-difference decay over a ladder of small sizes
    #[command(
        after_help = "Config-file keys without flags (section [volume_diff]): \
        e0 (default 0.0)."
    )]
    VolumeDiff {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Fractional power s in (0, 1/9) (default 0.05)
        #[arg(long)]
        s: Option<f64>,
        /// Diagonal index j (default 0)
        #[arg(long)]
        j: Option<i64>,
        /// Shift imaginary part ε > 0 (default 1.0)
        #[arg(long)]
        eps: Option<f64>,
        /// Small half-sizes M (default 10,20,40)
        #[arg(long, value_delimiter = ',')]
        m_ladder: Option<Vec<usize>>,
        /// Monte Carlo samples (default 10000)
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Local eigenvalue statistics with Poisson goodness-of-fit
    #[command(after_help = "Config-file keys without flags (section [les]): \
        gap_lambda (default 20.0), block_compare (default true).")]
    Les {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Window center energy E₀ (default 0)
        #[arg(long)]
        e0: Option<f64>,
        /// Target expected count λ in the window (default 1.0)
        #[arg(long)]
        lambda_target: Option<f64>,
        /// Realizations (default 20000)
        #[arg(long)]
        realizations: Option<usize>,
        /// Block-superposition exponent α (default 0.5)
        #[arg(long)]
        alpha: Option<f64>,
        /// Samples for the intensity estimate (default 200000)
        #[arg(long)]
        intensity_samples: Option<usize>,
        /// Persist per-realization point lists as JSON-lines (default false)
        #[arg(long)]
        persist_points: bool,
    },
    /// Empirical eigenvalue-count bounds for interval widths
    WegnerMinami {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Interval center (default 0)
        #[arg(long)]
        center: Option<f64>,
        /// Interval widths (default 0.005,0.01,0.02)
        #[arg(long, value_delimiter = ',')]
        widths: Option<Vec<f64>>,
        /// Monte Carlo samples (default 10000)
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Decoupling inequality quadrature checks
    #[command(after_help = "Config-file keys without flags (section [decoupling]): \
        eta_grid (default [10, 20, 50, 100]), beta_grid (default -3..=3 step 1).")]
    Decoupling {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// s values for the lower check (default 0.3,0.5)
        #[arg(long, value_delimiter = ',')]
        lower_s: Option<Vec<f64>>,
        /// s for the upper check, < 1/2 (default 0.3)
        #[arg(long)]
        upper_s: Option<f64>,
    },
    /// Run the full acceptance suite (exit 3 on any failed criterion)
    AllAcceptance,
}

fn base_config(cli: &Cli, kind: ExperimentKind) -> Result<ExperimentConfig, LabError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let mut c = ExperimentConfig::load(path)?;
            c.kind = kind;
            c
        }
        None => ExperimentConfig::new(
            kind,
            EnsembleParams {
                half_size: 100,
                half_bandwidth: 1,
                seed: 42,
                density: DensityConfig::standard_gaussian(),
            },
        ),
    };
    if let Some(seed) = cli.seed {
        cfg.ensemble.seed = seed;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn apply_ensemble(cfg: &mut ExperimentConfig, args: &EnsembleArgs) {
    if let Some(n) = args.n {
        cfg.ensemble.half_size = n;
    }
    if let Some(l) = args.l {
        cfg.ensemble.half_bandwidth = l;
    }
}

fn build_config(cli: &Cli) -> Result<Option<ExperimentConfig>, LabError> {
    macro_rules! set {
        ($target:expr, $value:expr) => {
            if let Some(v) = $value {
                $target = v;
            }
        };
    }
    let cfg = match &cli.command {
        Command::AllAcceptance => return Ok(None),
        Command::Identities { ensemble, pairs } => {
            let mut cfg = base_config(cli, ExperimentKind::Identities)?;
            apply_ensemble(&mut cfg, ensemble);
            set!(cfg.identities.pairs, *pairs);
            cfg
        }
        Command::Dos {
            ensemble,
            samples,
            hist_samples,
            e_min,
            e_max,
            e_step,
            bin_width,
            p_max,
            center_only,
        } => {
            let mut cfg = base_config(cli, ExperimentKind::Dos)?;
            apply_ensemble(&mut cfg, ensemble);
            set!(cfg.dos.samples, *samples);
            set!(cfg.dos.hist_samples, *hist_samples);
            set!(cfg.dos.e_min, *e_min);
            set!(cfg.dos.e_max, *e_max);
            set!(cfg.dos.e_step, *e_step);
            set!(cfg.dos.bin_width, *bin_width);
            set!(cfg.dos.p_max, *p_max);
            if *center_only {
                cfg.dos.center_only = true;
            }
            cfg
        }
        Command::Locmoments {
            ensemble,
            s,
            e0,
            eps,
            max_distance,
            samples,
            fit_min_distance,
        } => {
            let mut cfg = base_config(cli, ExperimentKind::Locmoments)?;
            apply_ensemble(&mut cfg, ensemble);
            set!(cfg.locmoments.s, *s);
            set!(cfg.locmoments.e0, *e0);
            set!(cfg.locmoments.eps, *eps);
            set!(cfg.locmoments.max_distance, *max_distance);
            set!(cfg.locmoments.samples, *samples);
            set!(cfg.locmoments.fit_min_distance, *fit_min_distance);
            cfg
        }
        Command::VolumeDiff {
            ensemble,
            s,
            j,
            eps,
            m_ladder,
            samples,
        } => {
            let mut cfg = base_config(cli, ExperimentKind::VolumeDiff)?;
            apply_ensemble(&mut cfg, ensemble);
            set!(cfg.volume_diff.s, *s);
            set!(cfg.volume_diff.j, *j);
            set!(cfg.volume_diff.eps, *eps);
            set!(cfg.volume_diff.m_ladder, m_ladder.clone());
            set!(cfg.volume_diff.samples, *samples);
            cfg
        }
        Command::Les {
            ensemble,
            e0,
            lambda_target,
            realizations,
            alpha,
            intensity_samples,
            persist_points,
        } => {
            let mut cfg = base_config(cli, ExperimentKind::Les)?;
            apply_ensemble(&mut cfg, ensemble);
            set!(cfg.les.e0, *e0);
            set!(cfg.les.lambda_target, *lambda_target);
            set!(cfg.les.realizations, *realizations);
            set!(cfg.les.alpha, *alpha);
            set!(cfg.les.intensity_samples, *intensity_samples);
            if *persist_points {
                cfg.les.persist_points = true;
            }
            cfg
        }
        Command::WegnerMinami {
            ensemble,
            center,
            widths,
            samples,
        } => {
            let mut cfg = base_config(cli, ExperimentKind::WegnerMinami)?;
            apply_ensemble(&mut cfg, ensemble);
            set!(cfg.wegner_minami.center, *center);
            set!(cfg.wegner_minami.widths, widths.clone());
            set!(cfg.wegner_minami.samples, *samples);
            cfg
        }
        Command::Decoupling {
            ensemble,
            lower_s,
            upper_s,
        } => {
            let mut cfg = base_config(cli, ExperimentKind::Decoupling)?;
            apply_ensemble(&mut cfg, ensemble);
            set!(cfg.decoupling.lower_s, lower_s.clone());
            set!(cfg.decoupling.upper_s, *upper_s);
            cfg
        }
    };
    Ok(Some(cfg))
}

fn run(cli: &Cli) -> Result<(), LabError> {
    match build_config(cli)? {
        Some(cfg) => {
            let summary = experiments::run(&cfg)?;
            println!("{}", summary.headline);
            for path in &summary.outputs {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        None => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("results"));
            std::fs::create_dir_all(&out)?;
            let opts = AcceptanceOptions {
                workers: cli.workers.unwrap_or(0),
                scratch: out.join("acceptance-scratch"),
            };
            let results = acceptance::run_all(&opts)?;
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                Err(LabError::AcceptanceFailed { failed })
            } else {
                println!("all {} acceptance criteria passed", results.len());
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
