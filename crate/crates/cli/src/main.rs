use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qcong::etaquot::EtaQuotient;
use qcong_cli::{
    precision_cap, run, ClaimParams, Command, Format, Pipeline, RunConfig, SeriesKind, EXIT_USAGE,
};

/// Exact q-series and congruence checks for cubic partitions.
#[derive(Parser, Debug)]
#[command(name = "qcong", version)]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Output format; csv is accepted by `coeffs` and `parity`.
    #[arg(long, global = true, default_value = "json")]
    format: Format,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print coefficients 0..=n of a series.
    Coeffs {
        #[arg(long, value_enum, default_value = "cubic")]
        series: SeriesArg,
        /// Last index to print.
        #[arg(long)]
        n: u64,
        /// Reduce coefficients mod this integer.
        #[arg(long)]
        modulus: Option<u64>,
        /// d in (q^d;q^d), for `--series qpoch`.
        #[arg(long, default_value_t = 1)]
        delta: usize,
    },
    /// Check a(A n + B) = 0 (mod M) for 0 <= n <= n_max.
    Verify {
        #[command(flatten)]
        claim: ClaimArgs,
    },
    /// Modularity verdict for an eta quotient given as JSON.
    EtaCheck {
        /// File holding {"level": N, "exponents": {"delta": r, ...}}; `-` reads stdin.
        #[arg(required_unless_present_any = ["inline", "builtin"])]
        file: Option<PathBuf>,
        /// The JSON given directly on the command line.
        #[arg(long, conflicts_with = "file")]
        inline: Option<String>,
        /// One of the two quotients used by the pipelines.
        #[arg(long, value_enum, conflicts_with_all = ["file", "inline"])]
        builtin: Option<BuiltinForm>,
    },
    /// Sturm bound for weight k on Gamma_0(N).
    Sturm {
        #[arg(long)]
        weight: u64,
        #[arg(long)]
        level: u64,
    },
    /// Run the identity suite to the given precision.
    Identities {
        #[arg(long, default_value_t = 500)]
        precision: usize,
    },
    /// Parity census of a(n), or the raw bits with `--format csv`.
    Parity {
        #[arg(long)]
        n_max: u64,
        /// Report the first even and odd index at or beyond each threshold.
        #[arg(long = "threshold", value_delimiter = ',')]
        thresholds: Vec<u64>,
    },
    /// End-to-end verification of a congruence family.
    Pipeline {
        #[command(subcommand)]
        which: PipelineCmd,
    },
}

#[derive(Subcommand, Debug)]
enum PipelineCmd {
    /// a(25n+22) = 0 (mod 5).
    Mod5 {
        #[arg(long, default_value_t = 50_100)]
        precision: usize,
    },
    /// a(49n+B) = 0 (mod 7) for B in {15, 29, 36, 43}.
    Mod7 {
        #[arg(long, default_value_t = 50_100)]
        precision: usize,
    },
    /// a(3^k n + c_k) = 0 (mod 3^(k + [k even])).
    Mod3k {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 500)]
        n_max: u64,
    },
}

#[derive(Args, Debug)]
struct ClaimArgs {
    #[arg(long = "A")]
    a: u64,
    #[arg(long = "B")]
    b: u64,
    #[arg(long = "M")]
    m: u64,
    #[arg(long)]
    n_max: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SeriesArg {
    Cubic,
    Partition,
    Qpoch,
    Jacobi,
    Triangular,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BuiltinForm {
    Mod5,
    Mod7,
}

impl From<SeriesArg> for SeriesKind {
    fn from(s: SeriesArg) -> Self {
        match s {
            SeriesArg::Cubic => SeriesKind::Cubic,
            SeriesArg::Partition => SeriesKind::Partition,
            SeriesArg::Qpoch => SeriesKind::Qpoch,
            SeriesArg::Jacobi => SeriesKind::Jacobi,
            SeriesArg::Triangular => SeriesKind::Triangular,
        }
    }
}

fn read_quotient(
    file: Option<PathBuf>,
    inline: Option<String>,
    builtin: Option<BuiltinForm>,
) -> anyhow::Result<String> {
    if let Some(b) = builtin {
        let eq = match b {
            BuiltinForm::Mod5 => EtaQuotient::cubic_form_mod5(),
            BuiltinForm::Mod7 => EtaQuotient::cubic_form_mod7(),
        };
        return Ok(eq.to_json());
    }
    if let Some(text) = inline {
        return Ok(text);
    }
    let path = file.context("no eta quotient given")?;
    if path.as_os_str() == "-" {
        return std::io::read_to_string(std::io::stdin()).context("reading stdin");
    }
    std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))
}

fn build_config(cli: Cli) -> anyhow::Result<RunConfig> {
    let mut config = RunConfig {
        command: Command::Identities,
        precision: 1,
        modulus: None,
        output: cli.output,
        format: cli.format,
        claim: None,
    };
    match cli.command {
        Cmd::Coeffs { series, n, modulus, delta } => {
            config.command = Command::Coeffs { series: series.into(), delta };
            config.precision = usize::try_from(n)?.checked_add(1).context("n too large")?;
            config.modulus = modulus;
        }
        Cmd::Verify { claim } => {
            config.command = Command::Verify;
            config.modulus = Some(claim.m);
            config.claim = Some(ClaimParams {
                a: claim.a,
                b: claim.b,
                m: claim.m,
                n_max: claim.n_max,
            });
        }
        Cmd::EtaCheck { file, inline, builtin } => {
            config.command = Command::EtaCheck { quotient: read_quotient(file, inline, builtin)? };
        }
        Cmd::Sturm { weight, level } => config.command = Command::Sturm { weight, level },
        Cmd::Identities { precision } => config.precision = precision,
        Cmd::Parity { n_max, thresholds } => {
            config.command = Command::Parity { thresholds };
            config.precision = usize::try_from(n_max)?.checked_add(1).context("n_max too large")?;
        }
        Cmd::Pipeline { which } => match which {
            PipelineCmd::Mod5 { precision } => {
                config.command = Command::Pipeline(Pipeline::Mod5);
                config.precision = precision;
            }
            PipelineCmd::Mod7 { precision } => {
                config.command = Command::Pipeline(Pipeline::Mod7);
                config.precision = precision;
            }
            PipelineCmd::Mod3k { k, n_max } => {
                config.command = Command::Pipeline(Pipeline::Mod3k { k });
                config.claim = Some(ClaimParams { a: 3u64.saturating_pow(k), b: 0, m: 3, n_max });
            }
        },
    }
    Ok(config)
}

fn emit(config: &RunConfig, payload: &str) -> anyhow::Result<()> {
    let mut text = payload.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &config.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let usage = |e: anyhow::Error| {
        eprintln!("qcong: {e:#}");
        ExitCode::from(EXIT_USAGE as u8)
    };
    let config = match build_config(cli) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Err(e) = precision_cap().and_then(|cap| config.validate(cap)) {
        return usage(e);
    }
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    if let Err(e) = emit(&config, &outcome.payload) {
        eprintln!("qcong: {e:#}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    ExitCode::from(outcome.exit_code() as u8)
}
