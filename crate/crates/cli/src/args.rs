use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use embdim::{EntropyMethod, InputFormat, Rounding};

#[derive(Debug, Parser)]
#[command(
    name = "embdim",
    version,
    about = "Entropy rooflines and dimension sizing for sparse embedding lookups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy of one lookup signature and the dimension it needs.
    Roofline(RooflineArgs),
    /// The built-in sample-signature table as CSV.
    Table(TableArgs),
    /// Entropy as a function of k for fixed n.
    Curve(CurveArgs),
    /// Empirical entropy of a dataset of lookups.
    Scan(ScanArgs),
    /// Check the lookup kernels against dense products.
    VerifyKernels(VerifyArgs),
}

fn parse_method(s: &str) -> Result<EntropyMethod, String> {
    s.parse().map_err(|e: embdim::Error| e.to_string())
}

fn parse_rounding(s: &str) -> Result<Rounding, String> {
    s.parse().map_err(|e: embdim::Error| e.to_string())
}

fn parse_input_format(s: &str) -> Result<InputFormat, String> {
    s.parse().map_err(|e: embdim::Error| e.to_string())
}

/// Inclusive `a:b` range.
pub fn parse_k_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("k range '{s}' must look like a:b"))?;
    let a: u64 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad range start '{a}'"))?;
    let b: u64 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad range end '{b}'"))?;
    if a > b {
        return Err(format!("k range {a}:{b} is empty"));
    }
    Ok(a..=b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignatureSet {
    /// n in {1M, 10M, 100M, 20M} at k in {1, 10, 100, 1000}.
    Builtin,
}

#[derive(Debug, Args)]
pub struct RooflineArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    /// Bits per weight; 0 for binary lookups.
    #[arg(long, default_value_t = 0)]
    pub t: u32,
    /// Repeat to report several methods.
    #[arg(long = "method", value_parser = parse_method, default_value = "exact")]
    pub methods: Vec<EntropyMethod>,
    /// Element widths in bits.
    #[arg(long = "s", value_delimiter = ',', default_value = "8,16,32")]
    pub s: Vec<u32>,
    #[arg(long, value_parser = parse_rounding, default_value = "ceil")]
    pub rounding: Rounding,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_parser = parse_method, default_value = "paper-table")]
    pub method: EntropyMethod,
    #[arg(long, value_parser = parse_rounding, default_value = "table-compat")]
    pub rounding: Rounding,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(
        long,
        required_unless_present = "signatures",
        conflicts_with = "signatures"
    )]
    pub n: Option<u64>,
    /// Inclusive range `a:b`; defaults to 1:n-1.
    #[arg(long, value_parser = parse_k_range, conflicts_with = "signatures")]
    pub k: Option<RangeInclusive<u64>>,
    /// Use a named signature set instead of --n/--k.
    #[arg(long, value_enum)]
    pub signatures: Option<SignatureSet>,
    #[arg(long, value_parser = parse_method, default_value = "exact")]
    pub method: EntropyMethod,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Declared item count; indices must lie in [0, n).
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub t: u32,
    #[arg(long, value_parser = parse_input_format, default_value = "auto")]
    pub input_format: InputFormat,
    /// Worker threads for the counting pass.
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub d: usize,
    #[arg(long, default_value_t = 8)]
    pub r: usize,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub trials: u64,
    /// Corrupt one accumulation so the checks must fail.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_range_syntax() {
        assert_eq!(parse_k_range("1:63").unwrap(), 1..=63);
        assert_eq!(parse_k_range("4:4").unwrap(), 4..=4);
        assert!(parse_k_range("5:3").is_err());
        assert!(parse_k_range("5").is_err());
        assert!(parse_k_range("a:3").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
