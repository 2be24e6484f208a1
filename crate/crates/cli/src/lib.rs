//! Command dispatch for the `qcong` binary.
//!
//! Every subcommand produces a single payload (JSON or CSV) and a verdict.
//! Payloads carry no timestamps or host data, so identical configurations
//! give byte-identical output.

use std::path::PathBuf;

use anyhow::{bail, Context};
use qcong::congruence::{
    identity_suite, mod3_family_check, pipeline_mod5, pipeline_mod7, verify_progression,
    CongruenceClaim,
};
use qcong::etaquot::{sturm_bound, EtaQuotient};
use qcong::parity::{parity_census, parity_recurrence, write_bits_csv};
use qcong::qproducts::{
    cubic_partition_series, cubic_partition_series_mod, jacobi_cube_series, partition_series,
    qpochhammer_inf, qpochhammer_inf_mod, triangular_series,
};
use qcong::series::{ModSeries, TruncatedSeries};
use serde_json::{json, Value};

pub const PRECISION_CAP_VAR: &str = "QCONG_PRECISION_CAP";
pub const DEFAULT_PRECISION_CAP: usize = 10_000_000;

/// Exit status when a verification ran to completion and failed.
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
/// Exit status for invalid configuration, matching clap's own usage errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?}; expected json or csv")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Cubic,
    Partition,
    Qpoch,
    Jacobi,
    Triangular,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::Cubic => "cubic",
            SeriesKind::Partition => "partition",
            SeriesKind::Qpoch => "qpoch",
            SeriesKind::Jacobi => "jacobi",
            SeriesKind::Triangular => "triangular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Mod5,
    Mod7,
    Mod3k { k: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Coeffs { series: SeriesKind, delta: usize },
    Verify,
    EtaCheck { quotient: String },
    Sturm { weight: u64, level: u64 },
    Identities,
    Parity { thresholds: Vec<u64> },
    Pipeline(Pipeline),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClaimParams {
    pub a: u64,
    pub b: u64,
    pub m: u64,
    pub n_max: u64,
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    /// Number of coefficients (indices `0..precision`) the command works with.
    pub precision: usize,
    pub modulus: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub claim: Option<ClaimParams>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub payload: String,
    pub verdict: bool,
}

impl Outcome {
    fn computed(payload: String) -> Self {
        Self { payload, verdict: true }
    }

    pub fn exit_code(&self) -> i32 {
        if self.verdict {
            0
        } else {
            EXIT_VERIFICATION_FAILED
        }
    }
}

/// Reads the precision cap from the environment.
pub fn precision_cap() -> anyhow::Result<usize> {
    match std::env::var(PRECISION_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{PRECISION_CAP_VAR}={v:?} is not a coefficient count")),
        Err(_) => Ok(DEFAULT_PRECISION_CAP),
    }
}

impl RunConfig {
    /// Largest number of coefficients the command will allocate.
    pub fn required_precision(&self) -> usize {
        match &self.command {
            Command::Verify => self
                .claim
                .map(|c| (c.a * (c.n_max + 1) + c.b + 1) as usize)
                .unwrap_or(self.precision),
            Command::Pipeline(Pipeline::Mod3k { k }) => self
                .claim
                .map(|c| (3u64.saturating_pow(*k) * (c.n_max + 2)) as usize)
                .unwrap_or(self.precision),
            Command::Identities => 5 * self.precision + 5,
            Command::Sturm { .. } | Command::EtaCheck { .. } => 0,
            _ => self.precision,
        }
    }

    pub fn validate(&self, cap: usize) -> anyhow::Result<()> {
        if self.precision == 0 {
            bail!("precision must be at least 1");
        }
        if let Some(m) = self.modulus {
            if m < 2 {
                bail!("modulus must be at least 2");
            }
        }
        if matches!(self.command, Command::Verify) && self.claim.is_none() {
            bail!("verify needs --A, --B, --M and --n-max");
        }
        let needed = self.required_precision();
        if needed > cap {
            bail!("{needed} coefficients exceed the precision cap {cap} ({PRECISION_CAP_VAR})");
        }
        Ok(())
    }
}

fn series_json(kind: &str, extra: Value, coefficients: Value) -> String {
    let mut obj = json!({ "series": kind });
    let map = obj.as_object_mut().expect("object");
    if let Value::Object(extra) = extra {
        map.extend(extra);
    }
    map.insert("coefficients".into(), coefficients);
    serde_json::to_string_pretty(&obj).expect("json")
}

fn exact_series(kind: SeriesKind, delta: usize, precision: usize) -> qcong::Result<TruncatedSeries> {
    match kind {
        SeriesKind::Cubic => cubic_partition_series(precision),
        SeriesKind::Partition => partition_series(precision),
        SeriesKind::Qpoch => qpochhammer_inf(delta, precision),
        SeriesKind::Jacobi => jacobi_cube_series(precision),
        SeriesKind::Triangular => triangular_series(precision),
    }
}

fn modular_series(kind: SeriesKind, delta: usize, precision: usize, m: u64) -> qcong::Result<ModSeries> {
    match kind {
        SeriesKind::Cubic => cubic_partition_series_mod(precision, m),
        SeriesKind::Qpoch => qpochhammer_inf_mod(delta, precision, m),
        _ => exact_series(kind, delta, precision)?.reduce_mod(m),
    }
}

fn coeffs(config: &RunConfig, kind: SeriesKind, delta: usize) -> anyhow::Result<Outcome> {
    let prec = config.precision;
    let mut extra = json!({ "precision": prec });
    if kind == SeriesKind::Qpoch {
        extra["delta"] = json!(delta);
    }
    let payload = match config.modulus {
        Some(m) => {
            let s = modular_series(kind, delta, prec, m)?;
            match config.format {
                Format::Csv => s.to_csv(),
                Format::Json => {
                    extra["modulus"] = json!(m);
                    series_json(kind.name(), extra, json!(s.coeffs()))
                }
            }
        }
        None => {
            let s = exact_series(kind, delta, prec)?;
            match config.format {
                Format::Csv => s.to_csv(),
                Format::Json => {
                    // exact values can exceed 64 bits, so they travel as decimal strings
                    let c: Vec<String> = s.coeffs().iter().map(|c| c.to_string()).collect();
                    series_json(kind.name(), extra, json!(c))
                }
            }
        }
    };
    Ok(Outcome::computed(payload))
}

fn verify(config: &RunConfig) -> anyhow::Result<Outcome> {
    let p = config.claim.context("missing claim parameters")?;
    let claim = CongruenceClaim::new(p.a, p.b, p.m)?;
    let prec = claim.index(p.n_max) + 1;
    let series = cubic_partition_series_mod(prec, p.m)?;
    let report = verify_progression(&series, claim, p.n_max)?
        .with_anchor(&format!("a({}n+{}) = 0 (mod {})", p.a, p.b, p.m));
    Ok(Outcome {
        payload: report.to_json(),
        verdict: report.verdict,
    })
}

fn eta_check(text: &str) -> anyhow::Result<Outcome> {
    let eq = EtaQuotient::from_json(text)?;
    let verdict = eq.modularity_verdict();
    let payload = json!({
        "eta_quotient": serde_json::from_str::<Value>(&eq.to_json())?,
        "verdict": verdict,
    });
    Ok(Outcome {
        payload: serde_json::to_string_pretty(&payload)?,
        verdict: verdict.is_modular_form,
    })
}

fn sturm(weight: u64, level: u64) -> anyhow::Result<Outcome> {
    let b = sturm_bound(weight, level)?;
    let payload = json!({
        "weight": b.weight,
        "level": b.level,
        "exact": b.exact.to_string(),
        "bound": b.floor,
        "endpoint": b.endpoint(),
    });
    Ok(Outcome::computed(serde_json::to_string_pretty(&payload)?))
}

fn identities(precision: usize) -> anyhow::Result<Outcome> {
    let checks = identity_suite(precision)?;
    let all = checks.iter().all(|c| c.holds);
    let payload = json!({ "precision": precision, "identities": checks, "verdict": all });
    Ok(Outcome {
        payload: serde_json::to_string_pretty(&payload)?,
        verdict: all,
    })
}

fn parity(config: &RunConfig, thresholds: &[u64]) -> anyhow::Result<Outcome> {
    let n_max = config.precision as u64 - 1;
    let payload = match config.format {
        Format::Csv => {
            let mut out = Vec::new();
            write_bits_csv(&mut out, &parity_recurrence(n_max))?;
            String::from_utf8(out)?
        }
        Format::Json => parity_census(n_max, thresholds).to_json(),
    };
    Ok(Outcome::computed(payload))
}

fn pipeline(config: &RunConfig, which: Pipeline) -> anyhow::Result<Outcome> {
    let report = match which {
        Pipeline::Mod5 => pipeline_mod5(config.precision)?,
        Pipeline::Mod7 => pipeline_mod7(config.precision)?,
        Pipeline::Mod3k { k } => {
            let n_max = config.claim.map(|c| c.n_max).unwrap_or(500);
            mod3_family_check(k, n_max)?
        }
    };
    Ok(Outcome {
        payload: report.to_json(),
        verdict: report.verdict,
    })
}

/// Runs one validated configuration.
pub fn run(config: &RunConfig) -> anyhow::Result<Outcome> {
    if config.format == Format::Csv
        && !matches!(config.command, Command::Coeffs { .. } | Command::Parity { .. })
    {
        bail!("csv output is only available for coeffs and parity");
    }
    match &config.command {
        Command::Coeffs { series, delta } => coeffs(config, *series, *delta),
        Command::Verify => verify(config),
        Command::EtaCheck { quotient } => eta_check(quotient),
        Command::Sturm { weight, level } => sturm(*weight, *level),
        Command::Identities => identities(config.precision),
        Command::Parity { thresholds } => parity(config, thresholds),
        Command::Pipeline(p) => pipeline(config, *p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(command: Command, precision: usize) -> RunConfig {
        RunConfig {
            command,
            precision,
            modulus: None,
            output: None,
            format: Format::Json,
            claim: None,
        }
    }

    #[test]
    fn cap_is_enforced() {
        let c = config(Command::Coeffs { series: SeriesKind::Cubic, delta: 1 }, 1000);
        assert!(c.validate(1000).is_ok());
        assert!(c.validate(999).is_err());
        assert!(config(Command::Identities, 0).validate(100).is_err());
    }

    #[test]
    fn verify_needs_claim() {
        assert!(config(Command::Verify, 1).validate(100).is_err());
    }

    #[test]
    fn json_coefficients_are_exact_strings() {
        let c = config(Command::Coeffs { series: SeriesKind::Cubic, delta: 1 }, 5);
        let out = run(&c).unwrap();
        let v: Value = serde_json::from_str(&out.payload).unwrap();
        assert_eq!(v["coefficients"], json!(["1", "1", "3", "4", "9"]));
        assert!(out.verdict);
    }

    #[test]
    fn failing_claim_gives_false_verdict() {
        let mut c = config(Command::Verify, 1);
        c.claim = Some(ClaimParams { a: 3, b: 1, m: 3, n_max: 5 });
        let out = run(&c).unwrap();
        assert!(!out.verdict);
        assert_eq!(out.exit_code(), EXIT_VERIFICATION_FAILED);
    }

    #[test]
    fn csv_rejected_for_reports() {
        let mut c = config(Command::Sturm { weight: 4, level: 50 }, 1);
        c.format = Format::Csv;
        assert!(run(&c).is_err());
    }
}
