mod checks;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fano::conic::ConicClass;
use fano::field::INTERPOLATION_PRIME;
use fano::instance::{
    random_chain, random_gushel, random_instance, FanoChain, FanoInstance, GushelInstance,
};
use fano::report::{summary_csv, VerificationReport};
use fano::FieldSpec;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "fano",
    version,
    about = "Exact checks on degree-ten Fano manifolds and their sextics"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Opts {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `q`, `p=<prime>` or `<prime>`.
    #[arg(long, global = true)]
    field: Option<String>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// For `gen`, the instance file; otherwise a directory for per-claim reports and summary.csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 1)]
    k: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance.
    Gen {
        /// Write a cone (Gushel) instance instead.
        #[arg(long)]
        gushel: bool,
    },
    /// Statements about the sextics of an instance.
    Check {
        #[command(subcommand)]
        what: CheckCmd,
    },
    /// Conics on a k = 1 instance.
    Conic {
        #[command(subcommand)]
        what: ConicCmd,
    },
    /// Tangent spaces of Hilbert schemes of conics.
    Tangent {
        #[command(subcommand)]
        what: TangentCmd,
    },
    /// The 13×8 matrix of the double-line computation.
    Appendix {
        #[command(subcommand)]
        what: AppendixCmd,
    },
    /// Bott's theorem and Euler characteristics.
    Bott {
        #[command(subcommand)]
        what: BottCmd,
    },
    /// Nested instances X ⊃ Z ⊃ W.
    Chain {
        #[command(subcommand)]
        what: ChainCmd,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    Discriminant {
        instance: PathBuf,
    },
    Dual {
        instance: PathBuf,
    },
    Duality {
        instance: PathBuf,
    },
    Lagrangian {
        instance: PathBuf,
    },
    SingularLocus {
        instance: PathBuf,
    },
    Corank3 {
        instance: PathBuf,
    },
    ContainmentSw {
        chain: PathBuf,
    },
    ContainmentSx {
        chain: PathBuf,
    },
    /// Uses the given cone instance, or a random one built from --k, --field and --seed.
    Gushel {
        instance: Option<PathBuf>,
    },
    Noplane {
        instance: PathBuf,
    },
    /// Every check that applies to the instance.
    All {
        instance: PathBuf,
    },
}

#[derive(Subcommand)]
enum ConicCmd {
    Sample { instance: PathBuf },
    Classify { instance: PathBuf },
    Alpha { instance: PathBuf },
    Partner { instance: PathBuf },
    Kappa { instance: PathBuf },
    Families { instance: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum LineKind {
    Sigma,
    Rho,
    Tau,
    All,
}

#[derive(Subcommand)]
enum TangentCmd {
    /// Conics sampled from a k = 1 instance, or built into fresh instances with --k.
    Conic {
        instance: Option<PathBuf>,
    },
    DoubleLine {
        #[arg(long, value_enum, default_value_t = LineKind::All)]
        kind: LineKind,
    },
    Splitting {
        instance: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AppendixCmd {
    Verify,
    Stats {
        #[arg(long, value_delimiter = ',', default_values_t = vec![3u64, 5, 7])]
        primes: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum BottCmd {
    /// e.g. `Omega2_G(-3)`, `Omega2_G|Z`, `T_X(-1)`, `(0,-1|1,0,0)(2)`.
    Chi {
        #[arg(long)]
        bundle: String,
        #[arg(long, allow_negative_numbers = true)]
        expect: Option<i64>,
    },
    Hodge,
}

#[derive(Subcommand)]
enum ChainCmd {
    Gen,
}

impl Opts {
    fn field(&self) -> Result<FieldSpec> {
        match &self.field {
            Some(s) => Ok(FieldSpec::parse(s)?),
            None => Ok(FieldSpec::Prime {
                p: INTERPOLATION_PRIME,
            }),
        }
    }

    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&s).with_context(|| format!("parsing {}", path.display()))
}

fn load(path: &Path) -> Result<FanoInstance> {
    let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FanoInstance::from_json(&s)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Time a check and stamp its reports.
fn timed<F>(f: F) -> Result<Vec<VerificationReport>>
where
    F: FnOnce() -> Result<Vec<VerificationReport>>,
{
    let t = Instant::now();
    let mut reps = f()?;
    let ms = t.elapsed().as_millis() as u64;
    for r in &mut reps {
        r.wall_time_ms = Some(ms);
    }
    Ok(reps)
}

fn one(r: Result<VerificationReport>) -> Result<Vec<VerificationReport>> {
    r.map(|r| vec![r])
}

fn check_all(inst: &FanoInstance, o: &Opts) -> Result<Vec<VerificationReport>> {
    let seed = o.seed;
    let p = inst.field.characteristic();
    let small = matches!(inst.field, FieldSpec::Prime { .. }) && p <= checks::SMALL_PRIME_LIMIT;
    let mut out = Vec::new();
    out.extend(timed(|| {
        one(checks::discriminant(inst, o.trials(20), seed))
    })?);
    if inst.k <= 2 {
        out.extend(timed(|| checks::dual(inst, 100, seed))?);
    }
    if inst.k <= 1 {
        out.extend(timed(|| one(checks::duality(inst, o.trials(20), seed)))?);
    }
    if inst.k == 0 {
        out.extend(timed(|| {
            one(checks::lagrangian(inst, o.trials(100), seed))
        })?);
    }
    if (1..=2).contains(&inst.k) && small {
        out.extend(timed(|| {
            one(checks::singular_locus(inst, o.trials(10), seed))
        })?);
        out.extend(timed(|| one(checks::corank3(inst, 10_000, seed)))?);
    }
    if inst.k == 1 && small && p <= 7 {
        out.extend(timed(|| one(checks::noplane(inst, seed)))?);
        out.extend(timed(|| one(checks::families(inst, 20, seed)))?);
    }
    if inst.k == 1 {
        out.extend(timed(|| {
            one(checks::conic_sample(inst, o.trials(20), seed, false))
        })?);
        for verb in ["alpha", "partner", "kappa"] {
            out.extend(timed(|| {
                one(checks::conic_verb(inst, verb, o.trials(20), seed))
            })?);
        }
        out.extend(timed(|| {
            one(checks::tangent_conic(
                Some(inst),
                1,
                inst.field,
                o.trials(20),
                seed,
            ))
        })?);
        out.extend(timed(|| {
            one(checks::tangent_splitting(
                Some(inst),
                1,
                inst.field,
                o.trials(20),
                seed,
            ))
        })?);
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<Vec<VerificationReport>> {
    let o = &cli.opts;
    let seed = o.seed;
    match cli.cmd {
        Cmd::Gen { gushel } => {
            let text = if gushel {
                serde_json::to_string_pretty(&random_gushel(o.k, o.field()?, seed)?)?
            } else {
                random_instance(o.k, o.field()?, seed)?.to_json()
            };
            write_or_print(o.out.as_deref(), &text)?;
            Ok(Vec::new())
        }
        Cmd::Chain {
            what: ChainCmd::Gen,
        } => {
            let chain = random_chain(o.field()?, seed)?;
            write_or_print(o.out.as_deref(), &serde_json::to_string_pretty(&chain)?)?;
            Ok(Vec::new())
        }
        Cmd::Check { what } => match what {
            CheckCmd::Discriminant { instance } => {
                timed(|| one(checks::discriminant(&load(&instance)?, o.trials(20), seed)))
            }
            CheckCmd::Dual { instance } => {
                timed(|| checks::dual(&load(&instance)?, o.trials(100), seed))
            }
            CheckCmd::Duality { instance } => {
                timed(|| one(checks::duality(&load(&instance)?, o.trials(20), seed)))
            }
            CheckCmd::Lagrangian { instance } => {
                timed(|| one(checks::lagrangian(&load(&instance)?, o.trials(100), seed)))
            }
            CheckCmd::SingularLocus { instance } => timed(|| {
                one(checks::singular_locus(
                    &load(&instance)?,
                    o.trials(10),
                    seed,
                ))
            }),
            CheckCmd::Corank3 { instance } => {
                timed(|| one(checks::corank3(&load(&instance)?, o.trials(10_000), seed)))
            }
            CheckCmd::ContainmentSw { chain } => timed(|| {
                one(checks::containment(
                    &read_json::<FanoChain>(&chain)?,
                    false,
                    o.trials(10),
                    seed,
                ))
            }),
            CheckCmd::ContainmentSx { chain } => timed(|| {
                one(checks::containment(
                    &read_json::<FanoChain>(&chain)?,
                    true,
                    o.trials(10),
                    seed,
                ))
            }),
            CheckCmd::Gushel { instance } => timed(|| {
                let g: GushelInstance = match instance {
                    Some(p) => read_json(&p)?,
                    None => random_gushel(o.k, o.field()?, seed)?,
                };
                one(checks::gushel(&g, o.trials(10), seed))
            }),
            CheckCmd::Noplane { instance } => {
                timed(|| one(checks::noplane(&load(&instance)?, seed)))
            }
            CheckCmd::All { instance } => check_all(&load(&instance)?, o),
        },
        Cmd::Conic { what } => match what {
            ConicCmd::Sample { instance } => timed(|| {
                one(checks::conic_sample(
                    &load(&instance)?,
                    o.trials(5),
                    seed,
                    true,
                ))
            }),
            ConicCmd::Classify { instance } => timed(|| {
                one(checks::conic_sample(
                    &load(&instance)?,
                    o.trials(20),
                    seed,
                    false,
                ))
            }),
            ConicCmd::Alpha { instance } => timed(|| {
                one(checks::conic_verb(
                    &load(&instance)?,
                    "alpha",
                    o.trials(20),
                    seed,
                ))
            }),
            ConicCmd::Partner { instance } => timed(|| {
                one(checks::conic_verb(
                    &load(&instance)?,
                    "partner",
                    o.trials(20),
                    seed,
                ))
            }),
            ConicCmd::Kappa { instance } => timed(|| {
                one(checks::conic_verb(
                    &load(&instance)?,
                    "kappa",
                    o.trials(20),
                    seed,
                ))
            }),
            ConicCmd::Families { instance } => {
                timed(|| one(checks::families(&load(&instance)?, o.trials(20), seed)))
            }
        },
        Cmd::Tangent { what } => match what {
            TangentCmd::Conic { instance } => timed(|| {
                let inst = instance.as_deref().map(load).transpose()?;
                one(checks::tangent_conic(
                    inst.as_ref(),
                    o.k,
                    o.field()?,
                    o.trials(5),
                    seed,
                ))
            }),
            TangentCmd::Splitting { instance } => timed(|| {
                let inst = instance.as_deref().map(load).transpose()?;
                one(checks::tangent_splitting(
                    inst.as_ref(),
                    o.k,
                    o.field()?,
                    o.trials(5),
                    seed,
                ))
            }),
            TangentCmd::DoubleLine { kind } => {
                let kinds = match kind {
                    LineKind::Sigma => vec![ConicClass::Sigma],
                    LineKind::Rho => vec![ConicClass::Rho],
                    LineKind::Tau => vec![ConicClass::Tau],
                    LineKind::All => vec![ConicClass::Sigma, ConicClass::Rho, ConicClass::Tau],
                };
                timed(|| one(checks::tangent_double_line(&kinds, seed)))
            }
        },
        Cmd::Appendix { what } => match what {
            AppendixCmd::Verify => timed(|| one(checks::appendix_verify(seed))),
            AppendixCmd::Stats { primes } => {
                timed(|| one(checks::appendix_stats(&primes, o.trials(1_000_000), seed)))
            }
        },
        Cmd::Bott { what } => match what {
            BottCmd::Chi { bundle, expect } => {
                timed(|| one(checks::bott_chi(&bundle, expect, seed)))
            }
            BottCmd::Hodge => timed(|| one(checks::hodge(seed))),
        },
    }
}

fn emit(reports: &[VerificationReport], o: &Opts) -> Result<()> {
    if let Some(dir) = &o.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for r in reports {
            std::fs::write(dir.join(format!("{}.json", r.claim)), r.to_json())?;
        }
        std::fs::write(dir.join("summary.csv"), summary_csv(reports))?;
    }
    match o.format {
        Format::Json => {
            let all: Vec<&VerificationReport> = reports.iter().collect();
            println!("{}", serde_json::to_string_pretty(&all)?);
        }
        Format::Csv => print!("{}", summary_csv(reports)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = cli.opts.clone();
    let is_gen = matches!(cli.cmd, Cmd::Gen { .. } | Cmd::Chain { .. });
    match run(cli) {
        Ok(reports) => {
            if is_gen {
                return ExitCode::SUCCESS;
            }
            if let Err(e) = emit(&reports, &opts) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            for r in &reports {
                eprintln!(
                    "{:<22} {:>6}/{:<6} {}",
                    r.claim,
                    r.passes,
                    r.trials,
                    if r.passed() { "pass" } else { "FAIL" }
                );
            }
            if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
