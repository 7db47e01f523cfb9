use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::LazyLock;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pqdec_core::baselines::{
    direct_inversion_decode, invertibility_probability, invertibility_stats, separation_experiment,
    write_separation_csv, RowPolicy, SeparationConfig,
};
use pqdec_core::codes::{
    gen_instance, gen_instance_with_coordinate_bound, nearest_codeword_oracle, random_code, DecodeInstance,
    DEFAULT_BUDGET,
};
use pqdec_core::decoder::{decode, promise_bound, select_sigma, sigma_search, DecodeOptions, DEFAULT_MAX_ROUNDS};
use pqdec_core::hardness::{build_gadget, verify_gap, CoverClaim, SetCoverInstance};
use pqdec_core::{make_field, Backend, Error, FieldParams, SigmaParam};

static VERSION: LazyLock<String> = LazyLock::new(|| {
    format!(
        "{} (library {}, instance json {}, state dump {})",
        env!("CARGO_PKG_VERSION"),
        pqdec_core::VERSION,
        pqdec_core::codes::INSTANCE_FORMAT_VERSION,
        pqdec_core::qsim::DUMP_FORMAT_VERSION
    )
});

#[derive(Parser, Debug)]
#[command(name = "pqdec", version = VERSION.as_str(), about = "Decoding experiments over prime-power fields")]
struct Cli {
    /// Base seed for every random choice.
    #[arg(long, global = true, env = "PQDEC_SEED", default_value_t = 0)]
    seed: u64,
    /// Report wall_ms as null so outputs are byte-identical across runs.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    m: usize,
    /// Low coefficients of the monic modulus, LSB first, comma separated.
    #[arg(long, value_delimiter = ',')]
    poly: Option<Vec<u32>>,
}

impl FieldArgs {
    fn build(&self) -> pqdec_core::Result<FieldParams> {
        make_field(self.p, self.m, self.poly.as_deref())
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Digits,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Describe a field or evaluate one operation on integer images.
    Field {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, requires = "a")]
        op: Option<FieldOp>,
        #[arg(long)]
        a: Option<u128>,
        #[arg(long)]
        b: Option<u128>,
    },
    /// Generate a random code and a planted instance.
    Gen {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Distance bound; defaults to the promise bound from the exact minimum distance.
        #[arg(long)]
        w: Option<u128>,
        /// Cap each error coordinate at this image value.
        #[arg(long)]
        coord_bound: Option<u128>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Run the quantum decoder on an instance file.
    Decode {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "structured")]
        backend: Backend,
        /// Digit cutoff for the cube size; omitted means pick from d or search.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
        /// Skip the promise checks against d and s_true.
        #[arg(long)]
        no_assert_promise: bool,
    },
    /// Exhaustive nearest-codeword search.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Classical direct inversion on the top digits.
    Baseline {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        r: usize,
        /// `all`, `square`, or a row count.
        #[arg(long, default_value = "square")]
        rows: String,
    },
    /// Invertibility frequency of uniform square matrices over F_p.
    Stats {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Build the set-cover gadget and check its distance gap.
    Hardness {
        #[arg(long)]
        sc: PathBuf,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Quantum vs classical success rates on matched random ensembles.
    Separation {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 12)]
        m: usize,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        beta: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
}

enum Failure {
    Decode(String),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(
                Error::PromiseViolated(_)
                | Error::NoSigmaSucceeded
                | Error::RetryBudgetExhausted(_)
                | Error::OrthogonalityViolated(_),
            ) => Failure::Decode(format!("{e:#}")),
            _ => Failure::Usage(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn read_instance(path: &Path) -> anyhow::Result<DecodeInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DecodeInstance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn images(xs: &[pqdec_core::FieldElement]) -> Vec<u128> {
    xs.iter().map(|x| x.image()).collect()
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &Value) -> anyhow::Result<()> {
    emit(out, &format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let seed = cli.seed;
    let out = cli.out.as_deref();
    let timer = Instant::now();
    let wall_ms = || (!cli.no_timing).then(|| timer.elapsed().as_secs_f64() * 1e3);
    match cli.command {
        Command::Field { field, op, a, b } => {
            let f = field.build()?;
            let mut report = json!({ "p": f.p(), "m": f.m(), "poly": f.poly(), "q": f.q() });
            if let (Some(op), Some(a)) = (op, a) {
                let x = f.from_integer(a)?;
                let operand = || -> Result<_, Failure> {
                    let b = b.ok_or_else(|| Failure::Usage(anyhow::anyhow!("--b is required for this operation")))?;
                    Ok(f.from_integer(b)?)
                };
                let result = match op {
                    FieldOp::Add => json!(f.add(x, operand()?).image()),
                    FieldOp::Sub => json!(f.sub(x, operand()?).image()),
                    FieldOp::Mul => json!(f.mul(x, operand()?).image()),
                    FieldOp::Inv => json!(f.inv(x)?.image()),
                    FieldOp::Digits => json!(f.digits(x)),
                };
                report["result"] = result;
            }
            emit_json(out, &report)?;
        }
        Command::Gen { field, n, k, w, coord_bound, budget } => {
            let f = field.build()?;
            let mut code = random_code(&f, n, k, seed)?;
            let w = match w {
                Some(w) => w,
                None => {
                    let d = code
                        .compute_distance(budget)?
                        .ok_or_else(|| Failure::Usage(anyhow::anyhow!("code has a single codeword; pass --w")))?;
                    promise_bound(&f, n, d)
                }
            };
            let instance = match coord_bound {
                Some(b) => gen_instance_with_coordinate_bound(&code, b, w, seed)?,
                None => gen_instance(&code, w, seed)?,
            };
            emit(out, &format!("{}\n", instance.to_json()?))?;
        }
        Command::Decode { instance, backend, r, max_rounds, no_assert_promise } => {
            let inst = read_instance(&instance)?;
            let opts = DecodeOptions {
                seed,
                max_rounds,
                assert_promise: !no_assert_promise,
                ..DecodeOptions::default()
            };
            let field = inst.field();
            let chosen = match r {
                Some(r) => Some(SigmaParam::new(field, r)?),
                None => inst.code.distance().and_then(|d| select_sigma(field, inst.code.n(), d)),
            };
            let result = match chosen {
                Some(sigma) => decode(&inst, sigma, backend, &opts)?,
                None => sigma_search(&inst, backend, &opts)?,
            };
            let mut value = result.to_json(wall_ms());
            value["seed"] = json!(seed);
            emit_json(out, &value)?;
        }
        Command::Oracle { instance, budget } => {
            let inst = read_instance(&instance)?;
            let (s, dist) = nearest_codeword_oracle(&inst.code, &inst.t, budget)?;
            let value = json!({
                "s_hat": images(&s),
                "distance": dist,
                "within_w": dist <= inst.w,
                "matches_s_true": inst.s_true.as_ref().map(|t| *t == s),
            });
            emit_json(out, &value)?;
        }
        Command::Baseline { instance, r, rows } => {
            let inst = read_instance(&instance)?;
            let policy = match rows.as_str() {
                "all" => RowPolicy::All,
                "square" => RowPolicy::Square,
                other => RowPolicy::Count(
                    other
                        .parse()
                        .map_err(|_| Failure::Usage(anyhow::anyhow!("--rows must be all, square or a count, got {other}")))?,
                ),
            };
            let report = direct_inversion_decode(&inst, r, policy)?;
            let value = json!({
                "r_used": report.r_used,
                "system_shape": [report.system_shape.0, report.system_shape.1],
                "rank": report.rank,
                "status": report.status,
                "s_hat": report.s_hat.as_deref().map(images),
            });
            emit_json(out, &value)?;
        }
        Command::Stats { p, t, trials } => {
            let empirical = invertibility_stats(p, t, trials, seed)?;
            let value = json!({
                "p": p,
                "t": t,
                "trials": trials,
                "seed": seed,
                "empirical": empirical,
                "predicted": invertibility_probability(p, t),
                "limit_constant": invertibility_probability(p, 64),
            });
            emit_json(out, &value)?;
        }
        Command::Hardness { sc, p, m, budget } => {
            let text = fs::read_to_string(&sc).with_context(|| format!("reading {}", sc.display()))?;
            let instance = SetCoverInstance::from_json(&text)?;
            let field = make_field(p, m, None)?;
            let gadget = build_gadget(&instance, &field)?;
            let claim = match instance.find_exact_cover(instance.k)? {
                Some(cover) => CoverClaim::ExactCover(cover),
                None => {
                    let bound = (instance.c * instance.k as f64).ceil() as usize;
                    match instance.min_cover_size()? {
                        Some(min) if min < bound => {
                            return Err(Failure::Usage(anyhow::anyhow!(
                                "no exact cover of size {} and a cover of size {min} < c*K exists; the gap says nothing here",
                                instance.k
                            )))
                        }
                        _ => CoverClaim::AllCoversLarge,
                    }
                }
            };
            let report = verify_gap(&instance, &gadget, &claim, budget)?;
            let mut value = serde_json::to_value(&report).context("serializing report")?;
            if let CoverClaim::ExactCover(cover) = &claim {
                value["cover"] = json!(cover);
            }
            emit_json(out, &value)?;
        }
        Command::Separation { p, m, n, k, trials, beta, format } => {
            let config = SeparationConfig { p, m, n, k, trials, seed, beta, ..SeparationConfig::default() };
            let rows = separation_experiment(&config)?;
            match format {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    write_separation_csv(&mut buf, &rows)?;
                    emit(out, &String::from_utf8(buf).context("csv output")?)?;
                }
                OutputFormat::Json => {
                    let value = serde_json::to_value(&rows).context("serializing rows")?;
                    emit_json(out, &value)?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Decode(msg)) => {
            eprintln!("decode failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
