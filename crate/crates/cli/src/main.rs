use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{error::ErrorKind, Parser, Subcommand};

use irpc::asymptotic::{asymptotic_rate, de_check, design_alpha_from_beta, discretize, DeVerdict, DEFAULT_GRID};
use irpc::config::{self, CodeSpecFile};
use irpc::distance::{distance_bound, min_weight_oracle, DistanceProfile};
use irpc::galois::FieldConfig;
use irpc::simulate::{field_level_validate, format_trimmed, run_sweep, SimConfig, SimMode};
use irpc::{CodeSpec, Profile};

#[derive(Parser)]
#[command(name = "irpc", version, about = "Irregular product codes over erasure channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the dimension of a code.
    Dim {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Print the minimum-distance bound for component distances.
    MindistBound {
        /// Row code distances, non-increasing (e.g. 3,2,2).
        #[arg(long, value_delimiter = ',', conflicts_with = "spec", requires = "dp")]
        d: Option<Vec<usize>>,
        /// Column code distances, non-increasing.
        #[arg(long, value_delimiter = ',', conflicts_with = "spec", requires = "d")]
        dp: Option<Vec<usize>>,
        /// Take the distances from a spec file instead.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Also print a minimum-weight witness matrix (m·n ≤ 25).
        #[arg(long)]
        witness: bool,
    },
    /// Systematically encode a message file into an m×n codeword.
    Encode {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Iteratively decode a received matrix with `?` marking erasures.
    Decode {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Derive a code from a column profile beta and an erasure probability.
    DesignAsymptotic {
        #[arg(long)]
        beta: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Minimum row and column code distances, as R,C.
        #[arg(long, value_delimiter = ',', default_value = "1,1")]
        min_dist: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        boosts: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the density-evolution condition for a profile pair.
    DeCheck {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        beta: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Print the asymptotic rate of a profile pair.
    Rate {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        beta: PathBuf,
    },
    /// Monte Carlo word error rate sweep.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Erasure probabilities: start:stop:step, a comma list, or one value.
        #[arg(long)]
        eps: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// CSV destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Further spec files simulated on the same seed; each gets
        /// `<out stem>.<spec stem>.csv` next to --out.
        #[arg(long, num_args = 1.., requires = "out")]
        compare: Vec<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Draw fresh variates for every epsilon.
        #[arg(long)]
        uncoupled: bool,
        /// Encode and decode real symbols instead of masks.
        #[arg(long)]
        field_level: bool,
    },
    /// Cross-check symbol-level decoding against mask peeling.
    Validate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

/// Outcome that maps to a non-error exit code other than 0.
struct DecodeFailure {
    residual: usize,
}

fn load_spec(flag: &str, path: &Path) -> Result<CodeSpec> {
    config::load_spec(path).with_context(|| format!("--{flag} {}", path.display()))
}

fn load_profile(flag: &str, path: &Path) -> Result<Profile> {
    config::load_profile(path).with_context(|| format!("--{flag} {}", path.display()))
}

fn read_file(flag: &str, path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("--{flag} {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("--output {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        bail!("--eps: {eps} must lie in (0, 1)");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Option<DecodeFailure>> {
    match cli.command {
        Command::Dim { spec } => {
            println!("{}", load_spec("spec", &spec)?.dimension());
        }
        Command::MindistBound { d, dp, spec, witness } => {
            let profile = match (d, dp, spec) {
                (Some(d), Some(dp), None) => DistanceProfile::new(d, dp).context("--d/--dp")?,
                (None, None, Some(path)) => {
                    let s = load_spec("spec", &path)?;
                    if let Some(i) = s.a().iter().position(|&a| a == 0) {
                        bail!("--spec {}: row {i} has dimension 0 and no finite distance", path.display());
                    }
                    if let Some(j) = s.b().iter().position(|&b| b == 0) {
                        bail!("--spec {}: column {j} has dimension 0 and no finite distance", path.display());
                    }
                    let d = s.a().iter().map(|&a| s.n() - a + 1).collect();
                    let dp = s.b().iter().map(|&b| s.m() - b + 1).collect();
                    DistanceProfile::new(d, dp)?
                }
                _ => bail!("--d and --dp, or --spec, are required"),
            };
            println!("{}", distance_bound(&profile)?);
            if witness {
                let (_, w) = min_weight_oracle(&profile).context("--witness")?;
                print!("{w}");
            }
        }
        Command::Encode { spec, input, output } => {
            let s = load_spec("spec", &spec)?;
            let encoder = s.encoder();
            let text = read_file("input", &input)?;
            let msg = config::parse_symbols(&text, encoder.dimension(), s.field().order())
                .with_context(|| format!("--input {}", input.display()))?;
            let msg: Vec<_> = msg
                .into_iter()
                .enumerate()
                .map(|(i, v)| v.with_context(|| format!("--input {}: symbol {i} is erased", input.display())))
                .collect::<Result<_>>()?;
            let cw = encoder.encode(&msg)?;
            let cells: Vec<_> = (0..s.m()).flat_map(|i| cw.row(i).to_vec()).map(Some).collect();
            emit(output.as_deref(), &config::format_symbols(s.n(), &cells))?;
        }
        Command::Decode { spec, input, output } => {
            let s = load_spec("spec", &spec)?;
            let text = read_file("input", &input)?;
            let rx = config::parse_symbols(&text, s.len(), s.field().order())
                .with_context(|| format!("--input {}", input.display()))?;
            let out = s
                .product_code()
                .iterative_decode(&rx)
                .with_context(|| format!("--input {}: received symbols are inconsistent", input.display()))?;
            emit(output.as_deref(), &config::format_symbols(s.n(), &out.symbols))?;
            if !out.is_complete() {
                return Ok(Some(DecodeFailure { residual: out.residual() }));
            }
        }
        Command::DesignAsymptotic { beta, eps, m, n, min_dist, boosts, output } => {
            check_eps(eps)?;
            if min_dist.len() != 2 {
                bail!("--min-dist: expected R,C");
            }
            let b = load_profile("beta", &beta)?;
            let alpha = design_alpha_from_beta(&b, eps).context("--beta")?;
            let (a, bs) = discretize(&alpha, &b, m, n, (min_dist[0], min_dist[1]), boosts).context("--min-dist")?;
            let field = Arc::new(FieldConfig::smallest_binary(m.max(n)).build()?);
            let s = CodeSpec::new(field, m, n, a, bs).context("--m/--n")?;
            emit(output.as_deref(), &CodeSpecFile::from_spec(&s).to_json())?;
        }
        Command::DeCheck { alpha, beta, eps, grid } => {
            check_eps(eps)?;
            let (a, b) = (load_profile("alpha", &alpha)?, load_profile("beta", &beta)?);
            match de_check(&a, &b, eps, grid) {
                DeVerdict::Satisfied => println!("satisfied"),
                DeVerdict::Violated { at } => println!("violated at {}", format_trimmed(at, 10)),
            }
        }
        Command::Rate { alpha, beta } => {
            let (a, b) = (load_profile("alpha", &alpha)?, load_profile("beta", &beta)?);
            println!("{}", format_trimmed(asymptotic_rate(&a, &b), 10));
        }
        Command::Simulate { spec, eps, trials, seed, out, compare, threads, uncoupled, field_level } => {
            if let Some(t) = threads {
                if t == 0 {
                    bail!("--threads: must be at least 1");
                }
                rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("--threads")?;
            }
            if trials == 0 {
                bail!("--trials: must be at least 1");
            }
            let epsilons = config::parse_grid(&eps).context("--eps")?;
            let mut jobs = vec![(load_spec("spec", &spec)?, out.clone())];
            for path in &compare {
                let target = compare_path(out.as_deref().expect("clap enforces --out"), path);
                jobs.push((load_spec("compare", path)?, Some(target)));
            }
            for (s, dest) in jobs {
                let mut cfg = SimConfig::new(s, epsilons.clone(), trials, seed);
                cfg.couple = !uncoupled;
                if field_level {
                    cfg.mode = SimMode::FieldLevel;
                }
                let csv = run_sweep(&cfg)?.to_csv();
                match dest {
                    Some(p) => std::fs::write(&p, csv).with_context(|| format!("--out {}", p.display()))?,
                    None => print!("{csv}"),
                }
            }
        }
        Command::Validate { spec, trials, seed } => {
            if trials == 0 {
                bail!("--trials: must be at least 1");
            }
            let s = load_spec("spec", &spec)?;
            let rep = field_level_validate(&s, trials, seed)?;
            println!("trials {}", rep.trials);
            println!("decoded {}", rep.decoded);
            println!("position_mismatches {}", rep.position_mismatches);
            println!("symbol_mismatches {}", rep.symbol_mismatches);
            println!("round_mismatches {}", rep.round_mismatches);
            if rep.mismatches() > 0 {
                bail!("field-level decoding disagreed with mask peeling");
            }
        }
    }
    Ok(None)
}

/// `dir/results.csv` plus `other.code` gives `dir/results.other.csv`.
fn compare_path(out: &Path, spec: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    let tag = spec.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(DecodeFailure { residual })) => {
            eprintln!("decoding incomplete: {residual} residual erasures");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
