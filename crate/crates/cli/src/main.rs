//! `sckyber`: key generation, encryption and decryption for every parameter
//! set, codebook generation, and the analysis tables and simulations.
//!
//! Exit codes: 0 success, 2 usage or invalid request, 3 decryption failure,
//! 4 I/O error or malformed input file.

mod cache;

use std::fmt::Display;
use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::RngCore;
use sckyber::analysis::{
    bound_table, cer_table, chi_square_normal, coded_dfr_table, dfr_coded, dfr_table, dfr_theorem2,
    empirical_dfr, ks_lattice_normal, mse_table, pmf_table, simulate_noise, NoiseModel, Table,
    DEFAULT_PREC, WILSON_Z99,
};
use sckyber::params::{param_set_by_name, ParamSet, Variant};
use sckyber::pke::{bits_to_bytes, bytes_to_bits, Ciphertext, PublicKey, Scheme, SecretKey};
use sckyber::sampling::Seed;

use cache::CodebookCache;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Decode(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Decode(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Decode(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<sckyber::Error> for CliError {
    fn from(e: sckyber::Error) -> Self {
        match e {
            sckyber::Error::DecodeFailure(_) => CliError::Decode(e.to_string()),
            sckyber::Error::Malformed(_) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "sckyber", version, about = "Kyber CPA encryption variants and their failure-rate analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Args)]
struct TableOut {
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SeedArgs {
    /// 32-byte seed as 64 hex digits.
    #[arg(long, value_name = "HEX")]
    seed: Option<String>,
    /// Draw the seed from the operating system and print it to stderr.
    #[arg(long, conflicts_with = "seed")]
    system_entropy: bool,
}

#[derive(Args)]
struct CacheArgs {
    /// Rebuild Lloyd-Max codebooks instead of using the on-disk cache.
    #[arg(long)]
    no_cache: bool,
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct Jobs {
    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long)]
    jobs: Option<NonZeroUsize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair, written to BASE.pk and BASE.sk.
    Keygen {
        #[arg(long)]
        paramset: String,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long, value_name = "BASE")]
        out: PathBuf,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Encrypt a plaintext file of exactly the set's plaintext size.
    Encrypt {
        #[arg(long)]
        paramset: String,
        #[arg(long, value_name = "FILE")]
        pk: PathBuf,
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Decrypt a ciphertext file.
    Decrypt {
        #[arg(long)]
        paramset: String,
        #[arg(long, value_name = "FILE")]
        sk: PathBuf,
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Design (or load from cache) the 2^bits-level Lloyd-Max codebook for a
    /// uniform source on Z_q and print its summary.
    Codebook {
        #[arg(long, default_value_t = 3329)]
        q: u32,
        #[arg(long)]
        bits: u32,
        /// Also write the codebook file here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Quantization MSE of compression and Lloyd-Max for d = 10, 11.
    MseTable {
        #[command(flatten)]
        out: TableOut,
    },
    /// Quantization error PMFs.
    PmfTable {
        #[arg(long, value_delimiter = ',', default_values_t = [11u32, 10])]
        bits: Vec<u32>,
        #[command(flatten)]
        out: TableOut,
    },
    /// Gaussian-model failure rates; `--coded` gives the coded sets with both
    /// noise-variance evaluations.
    DfrTable {
        #[arg(long, default_value_t = DEFAULT_PREC)]
        prec: u32,
        #[arg(long)]
        coded: bool,
        #[command(flatten)]
        out: TableOut,
    },
    /// Capacity bound K_UB and CER_LB per PAM order.
    BoundTable {
        #[arg(long, default_value = "SC-KYBER1024")]
        paramset: String,
        #[arg(long = "p", value_delimiter = ',', default_values_t = [2u32, 4, 8, 16])]
        orders: Vec<u32>,
        #[command(flatten)]
        out: TableOut,
    },
    /// Ciphertext expansion rates of the built-in sets.
    CerTable {
        #[command(flatten)]
        out: TableOut,
    },
    /// Compare simulated decoding noise with the Gaussian model.
    CltCheck {
        #[arg(long, default_value = "KYBER1024")]
        paramset: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 100)]
        bins: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        jobs: Jobs,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        out: TableOut,
    },
    /// Count decryption failures over fresh keys and compare with the model.
    EmpiricalDfr {
        #[arg(long)]
        paramset: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_PREC)]
        prec: u32,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        jobs: Jobs,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        out: TableOut,
    },
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn seed(args: &SeedArgs) -> CliResult<Seed> {
    match (&args.seed, args.system_entropy) {
        (Some(hex), _) => Ok(Seed::from_hex(hex)?),
        (None, true) => {
            let mut bytes = [0u8; 32];
            rand::rngs::OsRng.fill_bytes(&mut bytes);
            let s = Seed(bytes);
            eprintln!("sckyber: seed {}", s.to_hex());
            Ok(s)
        }
        (None, false) => Err(CliError::Usage(
            "this command is randomized: pass --seed HEX or --system-entropy".into(),
        )),
    }
}

fn set_jobs(jobs: &Jobs) -> CliResult<()> {
    if let Some(n) = jobs.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.get())
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
    }
    Ok(())
}

fn cache(args: &CacheArgs) -> CodebookCache {
    let dir = if args.no_cache { None } else { CodebookCache::default_dir(args.cache_dir.clone()) };
    CodebookCache::new(dir)
}

fn scheme(ps: &ParamSet, args: &CacheArgs) -> CliResult<Scheme> {
    let c = cache(args);
    let u = match ps.variant {
        Variant::Original => None,
        _ => Some(c.uniform(ps.q, 1 << ps.du)?),
    };
    let v = match ps.variant {
        Variant::LloydMax => Some(c.uniform(ps.q, 1 << ps.dv)?),
        _ => None,
    };
    Ok(Scheme::with_codebooks(ps, u, v)?)
}

fn emit(tables: &[Table], out: &TableOut) -> CliResult<()> {
    let text: Vec<String> = tables
        .iter()
        .map(|t| match out.format {
            Format::Csv => t.to_csv(),
            Format::Markdown => t.to_markdown(),
        })
        .collect();
    let text = text.join("\n");
    match &out.out {
        Some(path) => write(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn metrics(title: &str, rows: Vec<(&str, String)>) -> Table {
    let mut t = Table::new(title, &["quantity", "value"]);
    t.rows = rows.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
    t
}

fn predicted_dfr(ps: &ParamSet, prec: u32) -> CliResult<(f64, &'static str)> {
    let nm = NoiseModel::for_params(ps)?;
    Ok(match ps.variant {
        Variant::SemiCompressed => (dfr_coded(ps, &nm, prec)?.log2_f64(), "coded binomial tail"),
        _ => (dfr_theorem2(&nm, ps.q, ps.n, prec).log2_f64(), "Gaussian model"),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Keygen { paramset, seed: s, out, cache } => {
            let ps = param_set_by_name(&paramset)?;
            let (pk, sk) = scheme(&ps, &cache)?.keygen(&seed(&s)?)?;
            let base = out.as_os_str().to_owned();
            let with = |ext: &str| {
                let mut p = base.clone();
                p.push(ext);
                PathBuf::from(p)
            };
            write(&with(".pk"), &pk.to_bytes())?;
            write(&with(".sk"), &sk.to_bytes())
        }
        Command::Encrypt { paramset, pk, input, out, seed: s, cache } => {
            let ps = param_set_by_name(&paramset)?;
            let pk = PublicKey::from_bytes(&ps, &read(&pk)?)?;
            let plaintext = read(&input)?;
            if plaintext.len() != ps.plaintext_bytes() {
                return Err(CliError::Io(format!(
                    "{}: plaintext must be exactly {} bytes for {}, found {}",
                    input.display(),
                    ps.plaintext_bytes(),
                    ps.name,
                    plaintext.len()
                )));
            }
            let bits = bytes_to_bits(&plaintext, ps.message_bits())?;
            let ct = scheme(&ps, &cache)?.encrypt(&pk, &bits, &seed(&s)?)?;
            write(&out, &ct.to_bytes(&ps)?)
        }
        Command::Decrypt { paramset, sk, input, out, cache } => {
            let ps = param_set_by_name(&paramset)?;
            let sk = SecretKey::from_bytes(&ps, &read(&sk)?)?;
            let ct = Ciphertext::from_bytes(&ps, &read(&input)?)?;
            let bits = scheme(&ps, &cache)?.decrypt(&sk, &ct)?;
            write(&out, &bits_to_bytes(&bits))
        }
        Command::Codebook { q, bits, out, format, cache: c } => {
            if !(1..=16).contains(&bits) {
                return Err(CliError::Usage(format!("--bits must be in 1..=16, got {bits}")));
            }
            let cb = cache(&c).uniform(q, 1 << bits)?;
            let source = sckyber::quantization::DiscretePmf::uniform(q)?;
            let mse = cb.mse(&source)?;
            if let Some(path) = &out {
                write(path, &cb.to_bytes()?)?;
            }
            let table = metrics(
                &format!("Lloyd-Max codebook, uniform source on Z_{q}"),
                vec![
                    ("requested levels", (1usize << bits).to_string()),
                    ("levels", cb.len().to_string()),
                    ("dropped levels", cb.dropped_levels().to_string()),
                    ("common denominator D", cb.denominator().to_string()),
                    ("MSE", format!("{:.6}", mse.to_f64())),
                    ("MSE exact", mse.to_string()),
                ],
            );
            emit(&[table], &TableOut { format, out: None })
        }
        Command::MseTable { out } => emit(&[mse_table()?], &out),
        Command::PmfTable { bits, out } => {
            let tables = bits.iter().map(|&d| pmf_table(d)).collect::<Result<Vec<_>, _>>()?;
            emit(&tables, &out)
        }
        Command::DfrTable { prec, coded, out } => {
            let t = if coded { coded_dfr_table(prec)? } else { dfr_table(prec)? };
            emit(&[t], &out)
        }
        Command::BoundTable { paramset, orders, out } => {
            let ps = param_set_by_name(&paramset)?;
            emit(&[bound_table(&ps, &orders)?], &out)
        }
        Command::CerTable { out } => emit(&[cer_table()?], &out),
        Command::CltCheck { paramset, samples, bins, seed: s, jobs, cache, out } => {
            if samples == 0 || bins < 2 {
                return Err(CliError::Usage("need --samples >= 1 and --bins >= 2".into()));
            }
            set_jobs(&jobs)?;
            let ps = param_set_by_name(&paramset)?;
            let seed = seed(&s)?;
            let scheme = scheme(&ps, &cache)?;
            let encryptions = samples.div_ceil(ps.n);
            let noise = simulate_noise(&scheme, encryptions, &seed)?;
            let values = &noise.gaussian[..samples];
            let nm = NoiseModel::for_params(&ps)?;
            let ks = ks_lattice_normal(values, noise.denominator, nm.sigma_g());
            let chi = chi_square_normal(values, noise.denominator, nm.sigma_g(), bins, 0.01);
            let n = samples as f64;
            let d = noise.denominator as f64;
            let mean = values.iter().map(|&v| v as f64 / d).sum::<f64>() / n;
            let var = values.iter().map(|&v| (v as f64 / d - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let table = metrics(
                &format!("Decoding-noise normality, {}", ps.name),
                vec![
                    ("samples", samples.to_string()),
                    ("encryptions", encryptions.to_string()),
                    ("lattice denominator D", noise.denominator.to_string()),
                    ("sample mean", format!("{mean:.4}")),
                    ("sample variance", format!("{var:.2}")),
                    ("model sigma_G^2", format!("{:.4}", nm.sigma_g2().to_f64())),
                    ("KS uncorrected", format!("{:.5}", ks.raw)),
                    ("KS continuity-corrected", format!("{:.5}", ks.corrected)),
                    ("chi-square statistic", format!("{:.2}", chi.statistic)),
                    ("chi-square df", chi.df.to_string()),
                    ("chi-square critical (1%)", format!("{:.2}", chi.critical)),
                    ("chi-square p-value", format!("{:.4}", chi.p_value)),
                ],
            );
            emit(&[table], &out)
        }
        Command::EmpiricalDfr { paramset, trials, prec, seed: s, jobs, cache, out } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be positive".into()));
            }
            set_jobs(&jobs)?;
            let ps = param_set_by_name(&paramset)?;
            let seed = seed(&s)?;
            let r = empirical_dfr(&scheme(&ps, &cache)?, trials, &seed)?;
            let (lo, hi) = r.wilson(WILSON_Z99);
            let (log2, method) = predicted_dfr(&ps, prec)?;
            let table = metrics(
                &format!("Empirical decryption failure rate, {}", ps.name),
                vec![
                    ("trials", r.trials.to_string()),
                    ("failures", r.failures.to_string()),
                    ("rate", format!("{:.4e}", r.rate())),
                    ("99% Wilson low", format!("{lo:.4e}")),
                    ("99% Wilson high", format!("{hi:.4e}")),
                    ("predicted", format!("{:.4e}", log2.exp2())),
                    ("predicted log2", format!("{log2:.2}")),
                    ("prediction", method.to_string()),
                ],
            );
            emit(&[table], &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sckyber: error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code())
        }
    }
}
