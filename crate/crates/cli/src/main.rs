//! Command-line front end for building, verifying and simulating
//! programmable unambiguous discriminators.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use udisc::discriminator::{
    build_family, check_covariance, efficiency_bounds, known_state_optimum, program_input, success_prob_analytic,
    success_prob_operational, unambiguity_report, Family, Regime,
};
use udisc::io::{read_density, read_povm, read_states, write_povm};
use udisc::mixed::{bounds_check, build_program, core_decompose, part_probabilities};
use udisc::sampler::{
    outcome_distribution, part_distribution, sample, standard_error, MeasurementInput, OutcomeDistribution,
};
use udisc::{Cap, DensityOperator, Error, StateSet, Tolerances};

use output::{Format, Report};

/// Smallest dense budget accepted on the command line.
const MIN_CAP: usize = 1 << 8;

#[derive(Parser)]
#[command(name = "udisc", version, about = "Programmable unambiguous state discrimination")]
struct Cli {
    /// Output style; both carry the same keys and numbers.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,

    /// Maximum number of complex entries in any dense matrix.
    #[arg(long, global = true, env = "UDISC_CAP", default_value_t = udisc::tol::DEFAULT_CAP)]
    cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Optimal,
    Universal,
    Trivial,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Optimal => Family::Optimal,
            FamilyArg::Universal => Family::Universal,
            FamilyArg::Trivial => Family::Trivial,
        }
    }
}

#[derive(Args)]
struct Sampling {
    /// Number of simulated measurements.
    #[arg(long, default_value_t = 100_000)]
    shots: u64,

    /// Seed of the ChaCha20 stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Build a discriminator and optionally write it to a file.
    Build {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Destination of the serialized POVM.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check positivity, completeness, unambiguity and covariance of a POVM file.
    Verify {
        file: PathBuf,
        /// Haar samples for the unitary covariance check.
        #[arg(long, default_value_t = 8)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Success probabilities for a set of pure states.
    Prob {
        states: PathBuf,
        /// Defaults to `optimal` when m = n and `universal` when m > n.
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// 1-based index of the data state.
        #[arg(long, default_value_t = 1)]
        which: usize,
    },
    /// Simulate measurements of a pure-state discriminator.
    Sample {
        states: PathBuf,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, default_value_t = 1)]
        which: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Core decomposition, program and part probabilities for mixed states.
    Mixed {
        #[arg(required = true, num_args = 1..)]
        rhos: Vec<PathBuf>,
        /// 1-based index of the density sent to the data register.
        #[arg(long, default_value_t = 1)]
        data: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
}

/// Failure of a command, mapped onto the process exit status.
enum Failure {
    /// The input was well formed but the answer is negative.
    Semantic(String),
    /// Bad arguments, unreadable or malformed files, limits exceeded.
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Semantic(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::InvalidPovm(_) | Error::ProgramNotIndependent { .. } | Error::InvalidDistribution(_) => {
                Failure::Semantic(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

struct RunConfig {
    format: Format,
    cap: Cap,
    tolerances: Tolerances,
}

struct Outcome {
    report: String,
    /// Set when the command ran to completion with a negative verdict.
    verdict_failed: Option<String>,
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn load_states(path: &Path) -> Result<StateSet, Failure> {
    let file = read_states(&read_file(path)?).map_err(with_path(path))?;
    for w in &file.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(file.states)
}

fn default_family(m: usize, n: usize) -> Family {
    if m == n {
        Family::Optimal
    } else {
        Family::Universal
    }
}

fn family_regime(family: Family) -> Option<Regime> {
    match family {
        Family::Optimal => Some(Regime::Equal),
        Family::Universal => Some(Regime::Universal),
        Family::Trivial => None,
    }
}

fn put_distribution(r: &mut Report, dist: &OutcomeDistribution, sampling: &Sampling) -> Result<(), Failure> {
    let record = sample(dist, sampling.shots, sampling.seed)?;
    r.put("rng", "chacha20");
    r.put("seed", record.seed);
    r.put("shots", record.shots);
    let freqs = record.frequencies();
    for (k, label) in record.labels.iter().enumerate() {
        let p = dist.probabilities()[k];
        r.num(&format!("p_{label}"), p);
        r.put(&format!("count_{label}"), record.counts[k]);
        r.num(&format!("freq_{label}"), freqs[k]);
        r.num(&format!("se_{label}"), standard_error(p, record.shots));
    }
    Ok(())
}

fn build(cfg: &RunConfig, m: usize, n: usize, family: Family, out: Option<&Path>) -> Result<Outcome, Failure> {
    let povm = build_family(family, m, n, cfg.cap)?;
    let mut r = Report::new(cfg.format);
    r.put("family", family);
    r.put("m", m);
    r.put("n", n);
    if let Some(c) = povm.constant() {
        r.num("c", c);
    }
    r.put("elements", povm.elements().len());
    r.put("dim", povm.dim());
    if let Some(path) = out {
        std::fs::write(path, write_povm(&povm)).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        r.put("out", path.display());
    }
    Ok(Outcome { report: r.finish(), verdict_failed: None })
}

fn verify(cfg: &RunConfig, path: &Path, trials: usize, seed: u64) -> Result<Outcome, Failure> {
    let povm = read_povm(&read_file(path)?, cfg.cap).map_err(with_path(path))?;
    let report = unambiguity_report(&povm, &cfg.tolerances, cfg.cap)?;
    let mut r = Report::new(cfg.format);
    r.put("m", povm.m());
    r.put("n", povm.n());
    for (k, res) in report.povm.psd_residuals.iter().enumerate() {
        r.num(&format!("psd_residual_{k}"), *res);
    }
    r.num("completeness_residual", report.povm.completeness_residual);
    r.flag("valid", report.povm.valid);
    for (i, l) in report.leakages.iter().enumerate() {
        r.num(&format!("leakage_{}", i + 1), *l);
    }
    r.num("max_leakage", report.max_leakage());
    r.flag("unambiguous", report.unambiguous);
    let cov = check_covariance(&povm, trials, seed, &cfg.tolerances)?;
    r.num("covariance_unitary_residual", cov.unitary_residual);
    r.num("covariance_permutation_residual", cov.permutation_residual);
    r.num("covariance_marginal_residual", cov.marginal_residual);
    r.flag("covariant", cov.pass());
    r.flag("pass", report.pass);
    let verdict_failed = (!report.pass).then(|| {
        if report.povm.valid {
            "outcomes leak onto the wrong states".to_string()
        } else {
            "not a valid POVM".to_string()
        }
    });
    Ok(Outcome { report: r.finish(), verdict_failed })
}

fn prob(cfg: &RunConfig, path: &Path, family: Option<FamilyArg>, which: usize) -> Result<Outcome, Failure> {
    let set = load_states(path)?;
    let (m, n) = (set.dim(), set.len());
    let family = family.map(Family::from).unwrap_or_else(|| default_family(m, n));
    let povm = build_family(family, m, n, cfg.cap)?;
    let independent = set.is_linearly_independent();
    if !independent {
        eprintln!("warning: the states are linearly dependent, so no structured discriminator can succeed");
    }
    let operational = success_prob_operational(&povm, &set, which)?;
    let analytic = family_regime(family).map_or(0.0, |regime| success_prob_analytic(&set, regime));
    let p_s = known_state_optimum(&set);
    let (lower, upper) = efficiency_bounds(p_s, n);
    let mut r = Report::new(cfg.format);
    r.put("family", family);
    r.put("m", m);
    r.put("n", n);
    r.put("which", which);
    if let Some(c) = povm.constant() {
        r.num("c", c);
    }
    r.num("gram_det", set.gram_determinant());
    r.flag("independent", independent);
    r.num("p", analytic);
    r.num("p_operational", operational);
    r.num("p_s", p_s);
    r.num("bound_lower", lower);
    r.num("bound_upper", upper);
    Ok(Outcome { report: r.finish(), verdict_failed: None })
}

fn sample_pure(
    cfg: &RunConfig,
    path: &Path,
    family: Option<FamilyArg>,
    which: usize,
    sampling: &Sampling,
) -> Result<Outcome, Failure> {
    let set = load_states(path)?;
    let (m, n) = (set.dim(), set.len());
    let family = family.map(Family::from).unwrap_or_else(|| default_family(m, n));
    let povm = build_family(family, m, n, cfg.cap)?;
    let dist = outcome_distribution(&povm, &MeasurementInput::Pure(program_input(&set, which)?))?;
    let mut r = Report::new(cfg.format);
    r.put("family", family);
    r.put("m", m);
    r.put("n", n);
    r.put("which", which);
    put_distribution(&mut r, &dist, sampling)?;
    Ok(Outcome { report: r.finish(), verdict_failed: None })
}

fn mixed(cfg: &RunConfig, paths: &[PathBuf], data: usize, sampling: &Sampling) -> Result<Outcome, Failure> {
    let rhos: Vec<DensityOperator> =
        paths.iter().map(|p| read_density(&read_file(p)?).map_err(with_path(p))).collect::<Result<_, _>>()?;
    if data == 0 || data > rhos.len() {
        return Err(Error::IndexOutOfRange { index: data, len: rhos.len() }.into());
    }
    let cores = core_decompose(&rhos)?;
    let mut r = Report::new(cfg.format);
    r.put("states", rhos.len());
    r.put("dim", cores.dim());
    r.put("data", data);
    r.num("tilde_trace_0", cores.tilde0.trace());
    for (i, t) in cores.tilde_traces().iter().enumerate() {
        r.num(&format!("tilde_trace_{}", i + 1), *t);
    }
    let discriminable = cores.discriminable();
    r.flag("discriminable", discriminable);
    let not_discriminable = "not unambiguously discriminable".to_string();

    let program = match build_program(&cores) {
        Ok(p) => p,
        Err(e @ Error::ProgramNotIndependent { .. }) => {
            r.put("program", "dependent");
            eprintln!("{e}");
            let reason = if discriminable { e.to_string() } else { not_discriminable };
            return Ok(Outcome { report: r.finish(), verdict_failed: Some(reason) });
        }
        Err(e) => return Err(e.into()),
    };
    r.put("program_size", program.total());
    for (i, part) in program.parts.iter().enumerate() {
        r.put(&format!("part_size_{i}"), part.len());
    }
    let probs = part_probabilities(&program, &rhos[data - 1], cfg.cap)?;
    r.put("regime", format!("{:?}", probs.regime).to_lowercase());
    r.num("c", probs.constant);
    r.num("gram_det", program.gram_determinant());
    let bounds = bounds_check(&program, data, &probs)?;
    r.num("bound_lower", bounds.lower);
    for (i, u) in bounds.upper.iter().enumerate() {
        r.num(&format!("bound_upper_{i}"), *u);
    }
    r.flag("bounds_ok", bounds.ok());
    for v in &bounds.violations {
        eprintln!("warning: {v}");
    }
    put_distribution(&mut r, &part_distribution(&probs)?, sampling)?;
    Ok(Outcome { report: r.finish(), verdict_failed: (!discriminable).then_some(not_discriminable) })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if cli.cap < MIN_CAP {
        return Err(Failure::Input(format!("--cap must be at least {MIN_CAP}")));
    }
    let cfg = RunConfig { format: cli.format, cap: Cap(cli.cap), tolerances: Tolerances::default() };
    match &cli.command {
        Command::Build { m, n, family, out } => build(&cfg, *m, *n, (*family).into(), out.as_deref()),
        Command::Verify { file, trials, seed } => verify(&cfg, file, *trials, *seed),
        Command::Prob { states, family, which } => prob(&cfg, states, *family, *which),
        Command::Sample { states, family, which, sampling } => {
            if sampling.shots == 0 {
                return Err(Failure::Input("--shots must be positive".into()));
            }
            sample_pure(&cfg, states, *family, *which, sampling)
        }
        Command::Mixed { rhos, data, sampling } => {
            if sampling.shots == 0 {
                return Err(Failure::Input("--shots must be positive".into()));
            }
            mixed(&cfg, rhos, *data, sampling)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            match outcome.verdict_failed {
                Some(reason) => {
                    eprintln!("fail: {reason}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(f) => {
            let (Failure::Semantic(msg) | Failure::Input(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
