use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wakimoto_cli::cache::{self, CacheEntry};
use wakimoto_cli::{load_config, run, CliError, Command};

/// Exact verification suites for the principally graded Wakimoto module.
///
/// Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or
/// configuration error, 3 mathematically undefined request.
#[derive(Parser, Debug)]
#[command(name = "wakimoto", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(clap::Args, Debug)]
struct Flags {
    /// Numerator of k + 2 = p/p'.
    #[arg(long)]
    p: Option<String>,
    /// Denominator of k + 2 = p/p'.
    #[arg(long)]
    pprime: Option<String>,
    /// Level as a fraction, instead of --p/--pprime.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long)]
    mprime: Option<String>,
    #[arg(long)]
    l: Option<String>,
    /// Grade bound D.
    #[arg(long)]
    degree: Option<String>,
    /// Series order T.
    #[arg(long)]
    order: Option<String>,
    /// json, csv or text.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    /// Directory for cached results.
    #[arg(long)]
    cache: Option<String>,
    /// Flat key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sector charge, instead of labels.
    #[arg(long, allow_hyphen_values = true)]
    j: Option<String>,
    /// First label of the screening source sector.
    #[arg(long = "source-m", allow_hyphen_values = true)]
    source_m: Option<String>,
    #[arg(long = "source-mprime")]
    source_mprime: Option<String>,
}

impl Flags {
    fn overrides(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("p", &self.p),
            ("pprime", &self.pprime),
            ("k", &self.k),
            ("m", &self.m),
            ("mprime", &self.mprime),
            ("l", &self.l),
            ("degree", &self.degree),
            ("order", &self.order),
            ("format", &self.format),
            ("out", &self.out),
            ("jobs", &self.jobs),
            ("cache", &self.cache),
            ("j", &self.j),
            ("source_m", &self.source_m),
            ("source_mprime", &self.source_mprime),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v))).collect()
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let config = load_config(cli.flags.config.as_deref(), &cli.flags.overrides())?;
    let key = cache::cache_key(cli.command.name(), &config);
    let hit = config.cache.as_deref().and_then(|dir| cache::lookup(dir, &key));
    let entry = match hit {
        Some(entry) => entry,
        None => {
            let outcome = run(cli.command, &config)?;
            let entry = CacheEntry { record: outcome.record, exit_code: outcome.exit_code };
            if let Some(dir) = &config.cache {
                cache::store(dir, &key, &entry)
                    .map_err(|e| CliError::Usage(format!("cannot write cache {}: {e}", dir.display())))?;
            }
            entry
        }
    };
    let text = entry.record.render(config.format);
    match &config.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))?;
        }
    }
    Ok(entry.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("wakimoto: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
