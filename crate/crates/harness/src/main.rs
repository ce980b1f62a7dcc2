use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddsense_harness::config::{EstimatorKind, ScenarioConfig};
use ddsense_harness::dump;
use ddsense_harness::error::{Error, Result};
use ddsense_harness::selftest;
use ddsense_harness::sweep::rmse_sweep;
use ddsense_harness::trial::inspect_trial;

const DEFAULT_CONFIG: &str = include_str!("../../../configs/section4.toml");

#[derive(Debug, Parser)]
#[command(name = "ddsense", version, about = "OTFS delay-Doppler radar sensing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one frame and print the estimates, optionally dumping matrices.
    Sim(SimArgs),
    /// Monte Carlo RMSE versus SNR sweep written as CSV.
    Mc(SweepArgs),
    /// RMSE sweep with the OFDM periodogram baseline only.
    Baseline(SweepArgs),
    /// Run the built-in oracle checks.
    Selftest,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML); the built-in 128 x 64 scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Estimator, overriding the scenario's mode list.
    #[arg(long, value_enum)]
    mode: Option<EstimatorKind>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trials per SNR point, overriding the scenario.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads: a count or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_parallel)]
    parallel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DumpKind {
    Dd,
    Corr,
    Fasttime,
    Periodogram,
}

#[derive(Debug, Args)]
struct SimArgs {
    #[command(flatten)]
    common: Common,
    /// Directory for estimates.csv and matrix dumps.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SNR in dB (`inf` for noiseless); first scenario SNR when omitted.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<f64>,
    /// Trial index selecting the random streams.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Matrices to dump, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    dump: Vec<DumpKind>,
}

/// `auto` maps to 0, which lets rayon pick the thread count.
fn parse_parallel(s: &str) -> std::result::Result<usize, String> {
    if s == "auto" {
        return Ok(0);
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive thread count or `auto`, got {s:?}")),
        Ok(n) => Ok(n),
    }
}

fn load(common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::from_toml(DEFAULT_CONFIG)?,
    };
    if let Some(seed) = common.seed {
        cfg.sweep.seed = seed;
    }
    if let Some(mode) = common.mode {
        cfg.sweep.modes = vec![mode];
    }
    Ok(cfg)
}

fn sweep(args: &SweepArgs, force: Option<EstimatorKind>) -> Result<()> {
    let mut cfg = load(&args.common)?;
    if let Some(mode) = force {
        cfg.sweep.modes = vec![mode];
    }
    if let Some(trials) = args.trials {
        cfg.sweep.trials = trials;
    }
    let scenario = cfg.validate()?;
    if scenario.shared_delay {
        eprintln!("warning: targets share an integer delay bin; estimates are not guaranteed");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.parallel).build()?;
    let start = Instant::now();
    let report = pool.install(|| rmse_sweep(&cfg))?;
    eprintln!(
        "{} trials x {} SNR points x {} modes in {:.1} s on {} threads",
        scenario.trials,
        scenario.snr_db.len(),
        scenario.modes.len(),
        start.elapsed().as_secs_f64(),
        pool.current_num_threads()
    );
    match &args.out {
        Some(path) => report.write_csv(fs::File::create(path)?)?,
        None => report.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}

fn write_dumps(dir: &Path, kinds: &[DumpKind], cfg: &ScenarioConfig, snr: f64, trial: u64) -> Result<()> {
    let s = cfg.validate()?;
    for kind in kinds {
        let path = dir.join(format!("{}.csv", format!("{kind:?}").to_lowercase()));
        match kind {
            DumpKind::Periodogram => {
                let i = inspect_trial(&s, trial, snr, EstimatorKind::OfdmBaseline)?;
                let pg = i.periodogram.expect("ofdm inspection has a periodogram");
                dump::real_to_file(&path, "periodogram", "Doppler bin", "delay bin", &pg)?;
            }
            _ => {
                let i = inspect_trial(&s, trial, snr, EstimatorKind::Fractional)?;
                match kind {
                    DumpKind::Dd => {
                        let y = i.received_dd.expect("otfs inspection has a dd grid");
                        dump::complex_to_file(&path, "dd", "Doppler index k", "delay index l", y.as_array())?
                    }
                    DumpKind::Corr => {
                        let v = i.correlation.expect("otfs inspection has a correlation map");
                        dump::complex_to_file(&path, "corr", "Doppler lag k", "delay lag l", v.values())?
                    }
                    _ => {
                        let f = i.fasttime.expect("otfs inspection has a fast-time matrix");
                        dump::complex_to_file(&path, "fasttime", "fast time m", "slow time n", &f)?
                    }
                }
            }
        }
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn sim(args: &SimArgs) -> Result<()> {
    let cfg = load(&args.common)?;
    let s = cfg.validate()?;
    if s.shared_delay {
        eprintln!("warning: targets share an integer delay bin; estimates are not guaranteed");
    }
    let snr = args.snr.unwrap_or(s.snr_db[0]);
    let frame = &s.frame;
    println!(
        "frame {} x {} ({:.3} m, {:.4} m/s per bin), snr {snr} dB, trial {}, seed {}",
        frame.m(),
        frame.n(),
        frame.range_resolution(),
        frame.velocity_resolution(),
        args.trial,
        s.seed
    );
    let mut rows = Vec::new();
    for &mode in &s.modes {
        let i = inspect_trial(&s, args.trial, snr, mode)?;
        println!("{}:", mode.name());
        match i.outcome.errors() {
            None => println!("  censored: {:?}", i.outcome),
            Some(errors) => {
                println!("  target  l_tau      k_nu       l_hat      k_hat      range_err_m  velocity_err_mps");
                for (t, e) in s.targets.iter().zip(errors) {
                    let est = &i.estimates[i.pairing[e.target]];
                    println!(
                        "  {:<6}  {:<9.4}  {:<9.4}  {:<9.4}  {:<9.4}  {:<11.4}  {:.4}",
                        e.target, t.l_tau, t.k_nu, est.l_tau_hat, est.k_nu_hat, e.range_m, e.velocity_mps
                    );
                    rows.push(format!(
                        "{},{},{},{},{},{},{},{},{}",
                        mode.name(),
                        e.target,
                        t.l_tau,
                        t.k_nu,
                        est.l_tau_hat,
                        est.k_nu_hat,
                        est.range_hat_m,
                        est.velocity_hat_mps,
                        est.degenerate
                    ));
                }
            }
        }
    }
    let mut kinds = args.dump.clone();
    for (on, kind) in [
        (cfg.dump.dd, DumpKind::Dd),
        (cfg.dump.corr, DumpKind::Corr),
        (cfg.dump.fasttime, DumpKind::Fasttime),
        (cfg.dump.periodogram, DumpKind::Periodogram),
    ] {
        if on && !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let mut text = format!("# ddsense {}\n# config_sha256 {}\n", env!("CARGO_PKG_VERSION"), cfg.hash()?);
            text.push_str("mode,target,l_tau,k_nu,l_tau_hat,k_nu_hat,range_hat_m,velocity_hat_mps,degenerate\n");
            for r in rows {
                text.push_str(&r);
                text.push('\n');
            }
            fs::write(dir.join("estimates.csv"), text)?;
            write_dumps(dir, &kinds, &cfg, snr, args.trial)?;
        }
        None if !kinds.is_empty() => {
            return Err(Error::Config("matrix dumps need --out DIR".into()));
        }
        None => {}
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sim(args) => sim(&args).map(|_| true),
        Command::Mc(args) => sweep(&args, None).map(|_| true),
        Command::Baseline(args) => sweep(&args, Some(EstimatorKind::OfdmBaseline)).map(|_| true),
        Command::Selftest => {
            let checks = selftest::run_all();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
