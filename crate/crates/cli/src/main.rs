use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use horobundle::scenario::{run_scenario, Outcome, Scenario};

/// Certified finite-window computations of ray bundles, sectors and Geo1 sets.
#[derive(Parser, Debug)]
#[command(name = "horobundle", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    inline: Inline,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario file.
    Run {
        scenario: PathBuf,
        /// Directory for artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// List the operation names accepted by `--op` and scenario files.
    Ops,
}

/// Builds a one-off scenario from flags.
#[derive(Args, Debug)]
struct Inline {
    /// free-group, z-ladder, bad-ladder-1, bad-ladder-2, a2, edges:<file>, table:<file>
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    /// Rung pattern for bad-ladder-2.
    #[arg(long)]
    pattern: Option<String>,
    /// `origin|prefix|period`, `@tag` or `origin@tag`.
    #[arg(long)]
    ray: Option<String>,
    /// `H,R,S`.
    #[arg(long)]
    horizon: Option<String>,
    /// Largest distance of any queried origin from the base point.
    #[arg(long)]
    reach: Option<u32>,
    /// `name[:key=value,...]`; repeatable.
    #[arg(long = "op")]
    ops: Vec<String>,
    /// Directory for artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// json, dot or csv; overrides each operation's default.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Generator order for shortlex and type strings, e.g. `a<b<A<B`.
    #[arg(long = "order-on-S")]
    order_on_s: Option<String>,
}

impl Inline {
    /// Renders the flags as scenario text so both entry points share one parser.
    fn to_scenario_text(&self) -> Result<String> {
        let family = self
            .family
            .as_deref()
            .context("--family is required without a subcommand")?;
        let mut text = format!("family: {family}\n");
        let mut header = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                text.push_str(&format!("{key}: {v}\n"));
            }
        };
        header("rank", self.rank.map(|r| r.to_string()));
        header("pattern", self.pattern.clone());
        header("ray", self.ray.clone());
        header("horizon", self.horizon.clone());
        header("reach", self.reach.map(|r| r.to_string()));
        header("seed", self.seed.map(|s| s.to_string()));
        header("order", self.order_on_s.clone());
        header("format", self.format.clone());
        for op in &self.ops {
            text.push_str(&format!("op: {}\n", op_line(op)));
        }
        Ok(text)
    }
}

/// `geo1:x=e,radii=8,16` becomes `geo1 x=e radii=8,16`: a comma starts a
/// new parameter only when the next piece has its own `=`.
fn op_line(flag: &str) -> String {
    let (name, params) = flag.split_once(':').unwrap_or((flag, ""));
    let mut parts: Vec<String> = Vec::new();
    for piece in params.split(',').filter(|p| !p.is_empty()) {
        match parts.last_mut() {
            Some(last) if !piece.contains('=') => {
                last.push(',');
                last.push_str(piece);
            }
            _ => parts.push(piece.to_string()),
        }
    }
    std::iter::once(name.to_string())
        .chain(parts)
        .collect::<Vec<_>>()
        .join(" ")
}

fn report(outcome: &Outcome) -> ExitCode {
    for path in &outcome.artifacts {
        println!("{}", path.display());
    }
    match outcome.failures.first() {
        None => ExitCode::SUCCESS,
        Some(first) => {
            eprintln!("FAIL {first}");
            for f in &outcome.failures[1..] {
                eprintln!("also {f}");
            }
            ExitCode::from(outcome.exit_code().clamp(1, 255) as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Some(Command::Ops) => {
            for op in horobundle::scenario::OPERATIONS {
                println!("{op}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Some(Command::Run { scenario, out }) => {
            let s = Scenario::from_file(&scenario)
                .with_context(|| format!("reading {}", scenario.display()))?;
            Ok(report(&run_scenario(&s, &out)?))
        }
        None => {
            let s = Scenario::parse(&cli.inline.to_scenario_text()?)?;
            Ok(report(&run_scenario(&s, &cli.inline.out)?))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::op_line;

    #[test]
    fn op_flags_keep_list_values() {
        assert_eq!(op_line("geo1:x=e,radii=8,16,24"), "geo1 x=e radii=8,16,24");
        assert_eq!(op_line("delta"), "delta");
    }
}
