use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vsph::calibration::calibrate;
use vsph::io::{apply_override, load_scene, render_scene};
use vsph::runner::{run_scene, RunOptions};
use vsph::scenes::{SceneConfig, SceneKind};
use vsph::{KernelFamily, KernelSpec, Result};

/// Environment variable consulted when `--threads` is not given.
const THREADS_ENV: &str = "VSPH_THREADS";

#[derive(Parser)]
#[command(name = "vsph", version, about = "Variational staggered incompressible SPH solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scene file.
    Run {
        scene: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run a built-in scene, optionally overriding keys.
    Scene {
        /// hydrostatic, dambreak, taylor_green, rotating_square or perturbation.
        name: String,
        /// Scene key override, `key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Print the resolved scene file and exit.
        #[arg(long)]
        print: bool,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Print the reference constants for a lattice configuration.
    Calibrate {
        /// Take the configuration from a scene file.
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        dimension: usize,
        #[arg(long, default_value_t = 1.0)]
        d0: f64,
        #[arg(long, default_value_t = 2.5)]
        h_ratio: f64,
        #[arg(long, default_value_t = 1.0)]
        delta_ratio: f64,
        #[arg(long, default_value = "proposed_quartic")]
        kernel: KernelFamily,
        #[arg(long, default_value_t = 1000.0)]
        rho0: f64,
    },
    /// Tabulate the stability indicator of every kernel family.
    Kernels {
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        /// Grid size of the positivity check over (0, h].
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        /// Rows of the printed table.
        #[arg(long, default_value_t = 10)]
        rows: usize,
    },
}

#[derive(Args)]
struct RunFlags {
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    warm_start: bool,
    #[arg(long)]
    threads: Option<usize>,
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let from_env = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok());
    if let Some(n) = flag.or(from_env) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| vsph::Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(mut scene: SceneConfig, flags: RunFlags) -> Result<()> {
    configure_threads(flags.threads)?;
    if let Some(seed) = flags.seed {
        scene.seed = seed;
    }
    if flags.warm_start {
        scene.warm_start = true;
    }
    let options = RunOptions {
        max_steps: flags.steps,
        max_frames: flags.frames,
    };
    let summary = run_scene(&scene, &options, &flags.out_dir)?;
    println!(
        "{}: {} steps, t = {:.6} s, {} frames, metrics in {}",
        scene.kind,
        summary.steps,
        summary.time,
        summary.frames,
        summary.metrics_path.display()
    );
    Ok(())
}

fn print_constants<const D: usize>(scene: &SceneConfig) -> Result<()> {
    let kernel: KernelSpec<f64> = scene.kernel_spec()?;
    let c = calibrate::<f64, D>(scene.d0, &kernel, scene.rho0)?;
    println!("dimension = {D}");
    println!("kernel = {}", scene.kernel);
    println!("d0 = {}", scene.d0);
    println!("h = {}", scene.h());
    println!("alpha0 = {:.10}", c.alpha0);
    println!("a0 = {:.10}", c.a0);
    println!("c0 = {:.10}", c.c0);
    println!("delta0c = {:.10}", c.delta0c);
    println!("beta0 = {:.10}", c.beta0);
    println!("lambda0 = {}", c.lambda0);
    println!("kappa0 = {}", c.kappa0);
    Ok(())
}

fn kernels(h: f64, points: usize, rows: usize) -> Result<()> {
    let mut all_stable = true;
    for family in KernelFamily::ALL {
        let spec = KernelSpec::<f64>::new(family, h, 0.4 * h)?;
        let (r_min, omega_min) = spec.stability_minimum(points);
        let stable = omega_min > 0.0;
        all_stable &= stable;
        println!(
            "{family}: min Omega = {omega_min:.6e} at r = {r_min:.4} over {points} points -> {}",
            if stable { "stable" } else { "unstable" }
        );
        for k in 1..=rows {
            let r = h * k as f64 / rows as f64;
            println!("  r = {r:.4}  Omega = {:.6e}", spec.stability_indicator(r)?);
        }
    }
    if !all_stable {
        println!("note: at least one family fails the positivity check");
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { scene, run: flags } => run(load_scene(&scene)?, flags),
        Command::Scene {
            name,
            overrides,
            print,
            run: flags,
        } => {
            let mut scene = SceneConfig::preset(name.parse::<SceneKind>()?);
            for o in &overrides {
                apply_override(&mut scene, o)?;
            }
            if print {
                print!("{}", render_scene(&scene));
                return Ok(());
            }
            run(scene, flags)
        }
        Command::Calibrate {
            scene,
            dimension,
            d0,
            h_ratio,
            delta_ratio,
            kernel,
            rho0,
        } => {
            let scene = match scene {
                Some(path) => load_scene(path)?,
                None => {
                    let mut s = SceneConfig::preset(SceneKind::Hydrostatic);
                    s.dimension = dimension;
                    s.d0 = d0;
                    s.h_ratio = h_ratio;
                    s.delta_ratio = delta_ratio;
                    s.kernel = kernel;
                    s.rho0 = rho0;
                    s.validate()?;
                    s
                }
            };
            match scene.dimension {
                3 => print_constants::<3>(&scene),
                _ => print_constants::<2>(&scene),
            }
        }
        Command::Kernels { h, points, rows } => kernels(h, points, rows),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
