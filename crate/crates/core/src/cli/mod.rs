//! Command-line front end. Every command writes its outputs atomically and leaves
//! a JSON manifest describing how it was run.

mod manifest;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use manifest::RunManifest;

use crate::error::Error;
use crate::imt::ImtSpec;
use crate::roots::scan;
use crate::signal::{fmt_float, write_atomic, BoundarySignal};
use crate::synth::{apply_noise, named_function, NoiseKind, NoiseSpec, TwoComponentSpec};
use crate::tf::{blaschke_tfr, extract_if, sst, stft, SstConfig, Threshold};
use crate::unwind::{unwind, UnwindConfig};
use crate::verify::{carrier_sweep, reports_csv, theorem1_check, theorem2_check, theorem3_check, BoundReport};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "BLASCHKE_NUM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "blaschke", version, about = "Blaschke unwinding and synchrosqueezing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic signals.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Unwinding decomposition of a signal CSV.
    Decompose(DecomposeArgs),
    /// Time-frequency representation, optionally with ridge extraction.
    Tfr(TfrArgs),
    /// Winding numbers of Poisson-smoothed Blaschke factors over a radius grid.
    Roots(RootsArgs),
    /// Numerical checks of the holomorphy, phase-error and white-noise bounds.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Two unit-modulus components with smoothed-Wiener phases, and their sum.
    TwoComponent(TwoComponentArgs),
    /// Boundary samples of a named analytic function.
    Named(NamedArgs),
}

#[derive(Debug, Args)]
pub struct TwoComponentArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Seed of the second phase; defaults to `seed + 1`.
    #[arg(long)]
    pub seed2: Option<u64>,
    #[arg(long, default_value_t = 512.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    /// Phase smoothing, samples.
    #[arg(long, default_value_t = 200.0)]
    pub smoothing: f64,
    /// Additive noise at this SNR (dB).
    #[arg(long, conflicts_with = "multiplicative")]
    pub snr: Option<f64>,
    /// Multiplicative log-normal noise.
    #[arg(long)]
    pub multiplicative: bool,
    #[arg(long, default_value_t = 0)]
    pub noise_seed: u64,
    #[arg(long, default_value = "two_component")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NamedArgs {
    /// two_z_plus_zn, root_product, lacunary or monomial.
    #[arg(long = "fn")]
    pub name: String,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    /// Output CSV; defaults to `<fn>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Number of factorization levels.
    #[arg(long = "K", default_value_t = 1)]
    pub depth: usize,
    /// Trend order: polynomial degree D − 1.
    #[arg(long = "D", default_value_t = 1)]
    pub detrend_order: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
    /// Carrier frequency, Hz.
    #[arg(long, default_value_t = 0.0)]
    pub carrier: f64,
    #[arg(long)]
    pub reflect: bool,
    #[arg(long, default_value = "decomposition")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TfrMode {
    Stft,
    Sst,
    Blaschke,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "components"]))]
pub struct TfrArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    pub components: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = TfrMode::Sst)]
    pub mode: TfrMode,
    /// Gaussian window scale, seconds.
    #[arg(long, default_value_t = 0.25)]
    pub window_sigma: f64,
    #[arg(long, default_value_t = 16)]
    pub hop: usize,
    #[arg(long, default_value_t = 0.0128)]
    pub freq_step: f64,
    #[arg(long)]
    pub freq_max: Option<f64>,
    #[arg(long)]
    pub analysis_step: Option<f64>,
    /// Threshold as a fraction of the RMS amplitude.
    #[arg(long, default_value_t = 1e-6)]
    pub threshold: f64,
    #[arg(long)]
    pub reflect: bool,
    /// Number of ridges to extract.
    #[arg(long, default_value_t = 0)]
    pub extract: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value = "tfr")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub rmin: f64,
    #[arg(long, default_value_t = 0.99)]
    pub rmax: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
    #[arg(long, default_value = "roots")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub theorem: u8,
    /// Monte Carlo realizations (theorem 3).
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Radii (theorem 3).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.3, 0.5, 0.7])]
    pub r: Vec<f64>,
    /// Carrier counts to sweep (theorems 1 and 2).
    #[arg(long, value_delimiter = ',')]
    pub carrier_sweep: Vec<u32>,
    /// Grid size; 1024 for theorems 1–2 and 4096 for theorem 3 by default.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use a random IMT signal with this seed instead of `(1 + 0.1 sin t) e^{i40t}`.
    #[arg(long)]
    pub imt_seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownFunction(_) => Failure::Usage(e.to_string()),
            e => Failure::Compute(e),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name), runs the command and returns the
/// process exit code: 0 on success, 1 on a computational failure, 2 on misuse.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    let outcome = match cli.command {
        Command::Synth(SynthCommand::TwoComponent(a)) => cmd_two_component(&a),
        Command::Synth(SynthCommand::Named(a)) => cmd_named(&a),
        Command::Decompose(a) => cmd_decompose(&a),
        Command::Tfr(a) => cmd_tfr(&a),
        Command::Roots(a) => cmd_roots(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn configure_threads() {
    let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) else {
        return;
    };
    // a second call in the same process (tests) finds the pool already built
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

fn write_signal(path: &Path, s: &BoundarySignal, manifest: &mut RunManifest) -> CmdResult {
    s.write_csv(path)?;
    manifest.outputs.push(path.to_owned());
    Ok(())
}

fn write_text(path: &Path, text: &str, manifest: &mut RunManifest) -> CmdResult {
    write_atomic(path, text.as_bytes())?;
    manifest.outputs.push(path.to_owned());
    Ok(())
}

fn create_dir(dir: &Path) -> CmdResult {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Compute(e.into()))
}

fn rate_csv(rate: &[f64], sample_rate: f64) -> String {
    let mut s = String::from("t,frequency\n");
    for (j, r) in rate.iter().enumerate() {
        let _ = writeln!(s, "{},{}", fmt_float(j as f64 / sample_rate), fmt_float(*r));
    }
    s
}

fn cmd_two_component(a: &TwoComponentArgs) -> CmdResult {
    let seeds = [a.seed, a.seed2.unwrap_or(a.seed.wrapping_add(1))];
    let spec = TwoComponentSpec {
        seeds,
        sample_rate: a.rate,
        duration: a.duration,
        smoothing: a.smoothing,
        ..Default::default()
    };
    let tc = spec.generate()?;
    let noise = match (a.snr, a.multiplicative) {
        (Some(snr_db), _) => Some(NoiseKind::Additive { snr_db }),
        (None, true) => Some(NoiseKind::Multiplicative),
        (None, false) => None,
    };
    let signal = match noise {
        Some(kind) => apply_noise(&tc.f, &NoiseSpec { kind, seed: a.noise_seed }),
        None => tc.f.clone(),
    };
    create_dir(&a.out)?;
    let mut m = RunManifest::new("synth two-component");
    m.seed = Some(a.seed);
    m.param("seed2", seeds[1])
        .param("rate", a.rate)
        .param("duration", a.duration)
        .param("smoothing", a.smoothing)
        .param("base_rates", spec.base_rates.to_vec())
        .param("deviations", spec.deviations.to_vec())
        .param("snr_db", a.snr)
        .param("multiplicative", a.multiplicative)
        .param("noise_seed", a.noise_seed);
    write_signal(&a.out.join("component_1.csv"), &tc.f1, &mut m)?;
    write_signal(&a.out.join("component_2.csv"), &tc.f2, &mut m)?;
    write_signal(&a.out.join("signal.csv"), &signal, &mut m)?;
    write_text(&a.out.join("if_1.csv"), &rate_csv(&tc.if1, a.rate), &mut m)?;
    write_text(&a.out.join("if_2.csv"), &rate_csv(&tc.if2, a.rate), &mut m)?;
    m.write(&a.out.join("manifest.json"))?;
    println!("wrote {} samples to {}", signal.len(), a.out.display());
    Ok(())
}

fn cmd_named(a: &NamedArgs) -> CmdResult {
    let f = named_function(&a.name, a.n, a.samples)?;
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", a.name)));
    let mut m = RunManifest::new("synth named");
    m.param("fn", a.name.as_str()).param("n", a.n).param("samples", a.samples);
    write_signal(&out, &f, &mut m)?;
    m.write(&sidecar(&out))?;
    println!("wrote {}", out.display());
    Ok(())
}

/// `<file>.manifest.json` next to a single-file output.
fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn read_input(path: &Path, m: &mut RunManifest) -> std::result::Result<BoundarySignal, Failure> {
    m.inputs.push(path.to_owned());
    Ok(BoundarySignal::read_csv(path)?)
}

fn cmd_decompose(a: &DecomposeArgs) -> CmdResult {
    let mut m = RunManifest::new("decompose");
    let f = read_input(&a.input, &mut m)?;
    let cfg = UnwindConfig::new(a.depth)
        .detrend_order(a.detrend_order)
        .stabilizer(a.eps)
        .reflect(a.reflect)
        .carrier(a.carrier);
    let dec = unwind(&f, cfg)?;
    m.param("K", a.depth)
        .param("D", a.detrend_order)
        .param("eps", a.eps)
        .param("carrier", a.carrier)
        .param("reflect", a.reflect)
        .param("depth_reached", dec.depth())
        .param("dirichlet_norms", dec.dirichlet_norms.clone());
    m.outputs.extend(dec.write_dir(&a.out)?);
    m.write(&a.out.join("manifest.json"))?;
    println!("{} component(s) written to {}", dec.depth(), a.out.display());
    Ok(())
}

fn cmd_tfr(a: &TfrArgs) -> CmdResult {
    let mut m = RunManifest::new("tfr");
    let cfg = SstConfig {
        window_sigma: a.window_sigma,
        freq_step: a.freq_step,
        freq_max: a.freq_max,
        hop: a.hop,
        threshold: Threshold::RelativeRms(a.threshold),
        analysis_step: a.analysis_step,
        reflect: a.reflect,
    };
    let components = a.components.iter().map(|p| read_input(p, &mut m)).collect::<Result<Vec<_>, _>>()?;
    let single = match &a.input {
        Some(p) => Some(read_input(p, &mut m)?),
        None => None,
    };
    // stft and sst analyse the input, or the sum of the given components
    let summed = || -> std::result::Result<BoundarySignal, Failure> {
        if let Some(f) = &single {
            return Ok(f.clone());
        }
        let mut acc = components[0].clone();
        for c in &components[1..] {
            acc = acc.add(c)?;
        }
        Ok(acc)
    };
    let grid = match a.mode {
        TfrMode::Stft => stft(&summed()?, &cfg)?.magnitude(),
        TfrMode::Sst => sst(&summed()?, &cfg)?,
        TfrMode::Blaschke => {
            if components.is_empty() {
                return Err(Failure::Usage("--mode blaschke needs --components".into()));
            }
            blaschke_tfr(&components, &cfg)?
        }
    };
    create_dir(&a.out)?;
    m.param("mode", format!("{:?}", a.mode).to_lowercase())
        .param("window_sigma", a.window_sigma)
        .param("hop", a.hop)
        .param("freq_step", a.freq_step)
        .param("freq_max", a.freq_max)
        .param("analysis_step", a.analysis_step)
        .param("threshold_rms_fraction", a.threshold)
        .param("reflect", a.reflect)
        .param("extract", a.extract)
        .param("lambda", a.lambda);
    write_text(&a.out.join("tfr.csv"), &grid.to_csv(), &mut m)?;
    write_text(&a.out.join("tfr.pgm"), &grid.to_pgm(), &mut m)?;
    if a.extract > 0 {
        for (k, curve) in extract_if(&grid, a.lambda, a.extract)?.iter().enumerate() {
            write_text(&a.out.join(format!("if_{}.csv", k + 1)), &curve.to_csv(), &mut m)?;
        }
    }
    m.write(&a.out.join("manifest.json"))?;
    println!("{} x {} grid written to {}", grid.n_freqs(), grid.n_times(), a.out.display());
    Ok(())
}

fn cmd_roots(a: &RootsArgs) -> CmdResult {
    if !(a.step > 0.0) || !(a.rmin <= a.rmax) {
        return Err(Failure::Usage("need step > 0 and rmin <= rmax".into()));
    }
    let mut m = RunManifest::new("roots");
    let f = read_input(&a.input, &mut m)?;
    let count = ((a.rmax - a.rmin) / a.step + 1e-9).floor() as usize + 1;
    // rounded so grid points print as typed (0.41, not 0.41000000000000003)
    let radii: Vec<f64> = (0..count).map(|k| ((a.rmin + k as f64 * a.step) * 1e12).round() / 1e12).collect();
    let res = scan(&f, &radii, a.eps)?;
    create_dir(&a.out)?;
    m.param("rmin", a.rmin).param("rmax", a.rmax).param("step", a.step).param("eps", a.eps);
    m.param("skipped", res.skipped.clone());
    write_text(&a.out.join("windings.csv"), &res.windings_csv(), &mut m)?;
    write_text(&a.out.join("transitions.csv"), &res.transitions_csv(), &mut m)?;
    m.write(&a.out.join("manifest.json"))?;
    for t in &res.transitions {
        println!("transition in ({}, {}]: {:+}", t.r_lo, t.r_hi, t.count);
    }
    if !res.skipped.is_empty() {
        println!("skipped {} radii near roots", res.skipped.len());
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let mut m = RunManifest::new("verify");
    m.seed = Some(a.seed);
    m.param("theorem", a.theorem);
    let mut report = String::new();
    let mut all_hold = true;
    let csv = if a.theorem == 3 {
        let n = a.n.unwrap_or(4096);
        m.param("trials", a.trials).param("n", n).param("r", a.r.clone());
        let rows = theorem3_check(&a.r, a.trials, n, a.seed)?;
        let mut csv = String::from("r,variance,expected,centered_variance,centered_expected\n");
        for x in &rows {
            let _ = writeln!(
                report,
                "r = {}: variance {} (expected {}, deviation {:.2}%), centered {} (expected {}, deviation {:.2}%)",
                x.r,
                fmt_float(x.raw_variance),
                fmt_float(x.raw_expected),
                100.0 * x.raw_deviation(),
                fmt_float(x.centered_variance),
                fmt_float(x.centered_expected),
                100.0 * x.centered_deviation()
            );
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                x.r,
                fmt_float(x.raw_variance),
                fmt_float(x.raw_expected),
                fmt_float(x.centered_variance),
                fmt_float(x.centered_expected)
            );
        }
        csv
    } else {
        let n = a.n.unwrap_or(1024);
        m.param("n", n).param("imt_seed", a.imt_seed).param("carrier_sweep", a.carrier_sweep.clone());
        let spec = match a.imt_seed {
            Some(s) => crate::synth::random_imt(n, s)?,
            None => ImtSpec::from_fns(n, |t| 1.0 + 0.1 * t.sin(), |t| 40.0 * t)?,
        };
        let pick = |r: &crate::verify::SweepPoint| if a.theorem == 1 { r.theorem1 } else { r.theorem2 };
        let rows: Vec<(String, BoundReport)> = if a.carrier_sweep.is_empty() {
            let r = if a.theorem == 1 { theorem1_check(&spec) } else { theorem2_check(&spec)? };
            vec![("N=0".to_owned(), r)]
        } else {
            carrier_sweep(&spec, &a.carrier_sweep)?.iter().map(|p| (format!("N={}", p.carrier), pick(p))).collect()
        };
        for (case, r) in &rows {
            all_hold &= r.satisfied;
            let _ = writeln!(
                report,
                "theorem {} {case}: lhs {} <= rhs {} : {}",
                a.theorem,
                fmt_float(r.lhs),
                fmt_float(r.rhs),
                if r.satisfied { "holds" } else { "VIOLATED" }
            );
        }
        if rows.len() > 1 {
            let monotone = rows.windows(2).all(|w| w[1].1.lhs <= w[0].1.lhs + 1e-12);
            let _ = writeln!(report, "lhs non-increasing in N: {monotone}");
        }
        reports_csv(&rows)
    };
    print!("{report}");
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_text(&dir.join("report.txt"), &report, &mut m)?;
        write_text(&dir.join("bounds.csv"), &csv, &mut m)?;
        m.write(&dir.join("manifest.json"))?;
    }
    if all_hold {
        Ok(())
    } else {
        Err(Failure::Compute(Error::InvalidParameter("a bound was violated".into())))
    }
}
