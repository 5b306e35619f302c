//! Command-line harness for structurally random matrix sensing: operator
//! application, reconstruction, coherence analysis and the Monte-Carlo
//! experiments, with CSV output.

pub mod commands;
pub mod config;
pub mod error;
pub mod vector_io;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use commands::*;
use config::{merge, read_config_file};
use error::{usage, CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "srm",
    version,
    about = "Structurally random matrices for compressive sensing",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Flat JSON object of parameters; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Apply a sensing operator to a signal vector.
    Sense(SenseArgs),
    /// Recover a signal from measurements.
    Reconstruct(ReconstructArgs),
    /// Mutual and cumulative coherence, or the coherence scaling table.
    Coherence(CoherenceArgs),
    /// Quantile-quantile data of the entries of Phi Psi against a normal.
    Qq(QqArgs),
    /// Recovery probability against sparsity.
    Phase(PhaseArgs),
    /// Smallest measurement count reaching a target recovery probability.
    Mstar(MstarArgs),
    /// PSNR of compressible-signal reconstructions against sampling rate.
    Compressible(CompressibleArgs),
    /// Timing of the fast operator against a dense matrix.
    Bench(BenchArgs),
    /// Run the built-in invariant checks.
    Selftest(SelftestArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sense(_) => "sense",
            Command::Reconstruct(_) => "reconstruct",
            Command::Coherence(_) => "coherence",
            Command::Qq(_) => "qq",
            Command::Phase(_) => "phase",
            Command::Mstar(_) => "mstar",
            Command::Compressible(_) => "compressible",
            Command::Bench(_) => "bench",
            Command::Selftest(_) => "selftest",
        }
    }
}

/// Common keys resolved from flags and the config file.
struct Common {
    seed: u64,
    output: Option<PathBuf>,
    threads: Option<usize>,
}

fn common_key<T: DeserializeOwned>(file: &Map<String, Value>, key: &str) -> CliResult<Option<T>> {
    file.get(key)
        .map(|v| {
            serde_json::from_value(v.clone())
                .map_err(|e| usage(format!("invalid value for key `{key}`: {e}")))
        })
        .transpose()
}

fn resolve_common(cli: &Cli, file: &Map<String, Value>) -> CliResult<Common> {
    if let Some(cmd) = common_key::<String>(file, "command")? {
        if cmd != cli.command.name() {
            return Err(usage(format!(
                "key `command` is '{cmd}' but the invoked command is '{}'",
                cli.command.name()
            )));
        }
    }
    let threads = cli.threads.or(common_key(file, "threads")?);
    if threads == Some(0) {
        return Err(usage("key `threads` must be at least 1"));
    }
    Ok(Common {
        seed: cli.seed.or(common_key(file, "seed")?).unwrap_or(0),
        output: cli.output.clone().or(common_key(file, "output")?),
        threads,
    })
}

fn echo<T: Serialize>(name: &str, seed: u64, args: &T) -> Value {
    let mut obj = Map::new();
    obj.insert("command".into(), Value::from(name));
    obj.insert("seed".into(), Value::from(seed));
    if let Ok(Value::Object(fields)) = serde_json::to_value(args) {
        obj.extend(fields);
    }
    Value::Object(obj)
}

fn execute<T, F>(
    name: &str,
    defaults: T,
    cli_args: &T,
    file: &Map<String, Value>,
    common: &Common,
    out: &mut dyn Write,
    run: F,
) -> CliResult<()>
where
    T: Serialize + DeserializeOwned,
    F: FnOnce(&T, &mut Context) -> CliResult<()>,
{
    let args = merge(&defaults, file, cli_args)?;
    let mut ctx = Context {
        seed: common.seed,
        out,
        echo: echo(name, common.seed, &args),
    };
    run(&args, &mut ctx)
}

fn dispatch(
    cli: &Cli,
    file: &Map<String, Value>,
    common: &Common,
    out: &mut dyn Write,
) -> CliResult<()> {
    let name = cli.command.name();
    match &cli.command {
        Command::Sense(a) => execute(
            name,
            SenseArgs::defaults(),
            a,
            file,
            common,
            out,
            SenseArgs::run,
        ),
        Command::Reconstruct(a) => execute(
            name,
            ReconstructArgs::defaults(),
            a,
            file,
            common,
            out,
            ReconstructArgs::run,
        ),
        Command::Coherence(a) => execute(
            name,
            CoherenceArgs::defaults(),
            a,
            file,
            common,
            out,
            CoherenceArgs::run,
        ),
        Command::Qq(a) => execute(name, QqArgs::defaults(), a, file, common, out, QqArgs::run),
        Command::Phase(a) => execute(
            name,
            PhaseArgs::defaults(),
            a,
            file,
            common,
            out,
            PhaseArgs::run,
        ),
        Command::Mstar(a) => execute(
            name,
            MstarArgs::defaults(),
            a,
            file,
            common,
            out,
            MstarArgs::run,
        ),
        Command::Compressible(a) => execute(
            name,
            CompressibleArgs::defaults(),
            a,
            file,
            common,
            out,
            CompressibleArgs::run,
        ),
        Command::Bench(a) => execute(
            name,
            BenchArgs::defaults(),
            a,
            file,
            common,
            out,
            BenchArgs::run,
        ),
        Command::Selftest(a) => execute(
            name,
            SelftestArgs::defaults(),
            a,
            file,
            common,
            out,
            SelftestArgs::run,
        ),
    }
}

fn run_parsed(cli: &Cli, stdout: &mut (dyn Write + Send)) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => Map::new(),
    };
    let common = resolve_common(cli, &file)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &common.output {
        Some(path) => {
            let file_out = std::fs::File::create(path)
                .map_err(|e| usage(format!("cannot create {}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file_out);
            let result = dispatch(cli, &file, &common, &mut w);
            w.flush()?;
            result
        }
        None => dispatch(cli, &file, &common, stdout),
    })
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code: 0 success, 1 usage error, 2 numerical
/// failure.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match run_parsed(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
