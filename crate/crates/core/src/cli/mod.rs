//! Batch front end for the `raindrop` binary.
//!
//! Every command resolves defaults, an optional `--config` JSON file and
//! command-line overrides into a [`RunConfig`], writes it to `run.json` in the
//! output directory, and then produces its artifacts there. All work runs
//! inside a rayon pool sized by `--threads`.
//!
//! Exit codes: 0 success, 2 usage or parameter error, 3 data error (malformed
//! or inconsistent input), 4 I/O error.

mod commands;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::detector::DetectorParams;
use crate::evalkit::DiceStyle;
use crate::imgcore::KernelSize;
use crate::ncc::NccParams;
use crate::rainsynth::SynthConfig;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "raindrop",
    version,
    about = "Raindrop detection on camera image sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: CommonArgs,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Classify one sequence; print the decision, write mask and gradient PNGs.
    Detect,
    /// Write the segmentation mask of one sequence.
    Segment,
    /// Render synthetic drops into images, or write labeled fixture sequences.
    Synth,
    /// Validate manifests and write propagated per-frame label masks.
    Ingest,
    /// Sweep t_b over labeled sequences and write ROC data.
    EvalRoc,
    /// Score predicted masks against ground-truth masks.
    EvalSeg,
    /// Time the gradient detector against the NCC baseline.
    Bench,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Input files or directories (repeatable).
    #[arg(long, global = true, num_args = 1.., action = clap::ArgAction::Append)]
    pub input: Vec<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub output: PathBuf,
    /// JSON file with `detector`, `ncc` and `synth` parameter objects.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Sobel aperture (3 or 5).
    #[arg(long, global = true, value_parser = parse_kernel)]
    pub sobel: Option<KernelSize>,
    /// Gaussian kernel size d (odd).
    #[arg(long = "gauss-d", global = true, value_parser = parse_kernel)]
    pub gauss_d: Option<KernelSize>,
    /// Binarization threshold t_b in [0, 1].
    #[arg(long, global = true)]
    pub tb: Option<f64>,
    /// Dilation size m (odd).
    #[arg(long = "dilate-m", global = true, value_parser = parse_kernel)]
    pub dilate_m: Option<KernelSize>,
    /// Detection threshold t_d on the artifact fraction.
    #[arg(long, global = true)]
    pub td: Option<f64>,
    /// NCC window size (odd).
    #[arg(long = "ncc-window", global = true, value_parser = parse_kernel)]
    pub ncc_window: Option<KernelSize>,
    /// NCC correlation threshold t_c.
    #[arg(long = "ncc-tc", global = true)]
    pub ncc_tc: Option<f64>,
    /// Random seed for synthesis and generated inputs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Accumulated-Dice normalization.
    #[arg(
        long = "dice-style",
        global = true,
        value_parser = PossibleValuesParser::new(["doubled", "literal"])
            .map(|s| s.parse::<DiceStyle>().expect("restricted to known styles"))
    )]
    pub dice_style: Option<DiceStyle>,
    /// Resize loaded frames to WxH (nearest neighbour) before processing.
    #[arg(long, global = true, value_parser = parse_resize)]
    pub resize: Option<(usize, usize)>,
    /// Timing repetitions for `bench`.
    #[arg(long, global = true, default_value_t = 5)]
    pub repeats: usize,
    /// Also sweep the NCC baseline in `eval-roc`.
    #[arg(long, global = true)]
    pub ncc: bool,
    /// Number of drop and of clean fixture sequences `synth` writes.
    #[arg(long, global = true, default_value_t = 0)]
    pub fixtures: usize,
}

fn parse_kernel(s: &str) -> std::result::Result<KernelSize, String> {
    let n: usize = s.parse().map_err(|_| format!("'{s}' is not a size"))?;
    KernelSize::new(n).map_err(|e| e.to_string())
}

fn parse_resize(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let w: usize = w.parse().map_err(|_| format!("bad width in '{s}'"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height in '{s}'"))?;
    if w == 0 || h == 0 {
        return Err(format!("resize target must be positive, got '{s}'"));
    }
    Ok((w, h))
}

/// Parameter file accepted by `--config`; every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub detector: DetectorParams,
    pub ncc: NccParams,
    pub synth: SynthConfig,
}

/// Fully resolved parameters of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub output: PathBuf,
    pub detector: DetectorParams,
    pub ncc: NccParams,
    pub synth: SynthConfig,
    pub seed: u64,
    /// Requested worker count; 0 means every core.
    pub threads: usize,
    pub dice_style: DiceStyle,
    pub resize: Option<(usize, usize)>,
    pub repeats: usize,
    pub with_ncc: bool,
    pub fixtures: usize,
}

impl RunConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(command: Command, args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| Error::Parse {
                    context: p.display().to_string(),
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                })?
            }
            None => ConfigFile::default(),
        };
        let mut detector = file.detector;
        if let Some(v) = args.sobel {
            detector.sobel_aperture = v;
        }
        if let Some(v) = args.gauss_d {
            detector.gauss_d = v;
        }
        if let Some(v) = args.tb {
            detector.t_b = v;
        }
        if let Some(v) = args.dilate_m {
            detector.dilate_m = v;
        }
        if let Some(v) = args.td {
            detector.t_d = v;
        }
        let mut ncc = file.ncc;
        if let Some(v) = args.ncc_window {
            ncc.window = v;
        }
        if let Some(v) = args.ncc_tc {
            ncc.t_c = v;
        }
        if let Some(v) = args.td {
            ncc.t_d = v;
        }
        let mut synth = file.synth;
        let seed = args.seed.unwrap_or(synth.rng_seed);
        synth.rng_seed = seed;

        detector.validate()?;
        ncc.validate()?;
        synth.validate()?;
        if args.repeats == 0 {
            return Err(Error::Parameter("--repeats must be at least 1".into()));
        }
        Ok(Self {
            command,
            inputs: args.input.clone(),
            output: args.output.clone(),
            detector,
            ncc,
            synth,
            seed,
            threads: args.threads,
            dice_style: args.dice_style.unwrap_or_default(),
            resize: args.resize,
            repeats: args.repeats,
            with_ncc: args.ncc,
            fixtures: args.fixtures,
        })
    }
}

/// Contents of `run.json`.
#[derive(Serialize)]
struct RunRecord<'a> {
    #[serde(flatten)]
    config: &'a RunConfig,
    threads_used: usize,
    version: &'static str,
}

/// Process exit code for an error class.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parameter(_) => EXIT_USAGE,
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_DATA,
    }
}

fn write_run_json(config: &RunConfig) -> Result<()> {
    let record = RunRecord {
        config,
        threads_used: rayon::current_num_threads(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let path = config.output.join("run.json");
    let mut text = serde_json::to_string_pretty(&record).expect("run records serialize");
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Executes a resolved run in the current rayon pool. Returns the paths of
/// the artifacts written, `run.json` first.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&config.output).map_err(|e| Error::io(&config.output, e))?;
    write_run_json(config)?;
    let mut written = vec![config.output.join("run.json")];
    written.extend(commands::dispatch(config, stdout)?);
    Ok(written)
}

/// Runs `config` in a pool of `config.threads` workers.
pub fn run_with_pool(config: &RunConfig, stdout: &mut (dyn Write + Send)) -> Result<Vec<PathBuf>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start {} threads: {e}", config.threads)))?;
    pool.install(|| run(config, stdout))
}

/// Parses arguments, runs, reports errors on stderr and returns the exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = RunConfig::resolve(cli.command, &cli.args)
        .and_then(|cfg| run_with_pool(&cfg, &mut std::io::stdout()));
    match result {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Expands directories into the files below them accepted by `keep`, sorted.
pub(crate) fn expand_inputs(
    inputs: &[PathBuf],
    keep: &dyn Fn(&Path) -> bool,
) -> Result<Vec<PathBuf>> {
    fn walk(dir: &Path, keep: &dyn Fn(&Path) -> bool, out: &mut Vec<PathBuf>) -> Result<()> {
        let mut entries = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
            .collect::<Result<Vec<_>>>()?;
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(&p, keep, out)?;
            } else if keep(&p) {
                out.push(p);
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            walk(p, keep, &mut out)?;
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("raindrop").chain(args.iter().copied()))
    }

    #[test]
    fn flags_override_defaults() {
        let cli = parse(&[
            "detect",
            "--input",
            "m.json",
            "--tb",
            "0.3",
            "--gauss-d",
            "31",
            "--dilate-m",
            "9",
            "--sobel",
            "3",
            "--td",
            "0.2",
            "--ncc-window",
            "5",
            "--ncc-tc",
            "0.7",
            "--seed",
            "9",
        ])
        .unwrap();
        let cfg = RunConfig::resolve(cli.command, &cli.args).unwrap();
        assert_eq!(cfg.command, Command::Detect);
        assert_eq!(cfg.detector.t_b, 0.3);
        assert_eq!(cfg.detector.gauss_d.get(), 31);
        assert_eq!(cfg.detector.dilate_m.get(), 9);
        assert_eq!(cfg.detector.sobel_aperture.get(), 3);
        assert_eq!((cfg.detector.t_d, cfg.ncc.t_d), (0.2, 0.2));
        assert_eq!((cfg.ncc.window.get(), cfg.ncc.t_c), (5, 0.7));
        assert_eq!((cfg.seed, cfg.synth.rng_seed), (9, 9));
    }

    #[test]
    fn bare_command_uses_defaults() {
        let cli = parse(&["bench"]).unwrap();
        let cfg = RunConfig::resolve(cli.command, &cli.args).unwrap();
        assert_eq!(cfg.detector, DetectorParams::default());
        assert_eq!(cfg.ncc, NccParams::default());
        assert_eq!(cfg.dice_style, DiceStyle::Doubled);
    }

    #[test]
    fn usage_errors() {
        assert!(parse(&["detect", "--gauss-d", "10"]).is_err());
        assert!(parse(&["detect", "--resize", "12"]).is_err());
        assert!(parse(&["eval-seg", "--dice-style", "half"]).is_err());
        assert!(parse(&["frobnicate"]).is_err());
        assert_eq!(parse(&["nope"]).unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn resize_and_style_parse() {
        let cli = parse(&["eval-seg", "--resize", "216x216", "--dice-style", "literal"]).unwrap();
        assert_eq!(cli.args.resize, Some((216, 216)));
        assert_eq!(cli.args.dice_style, Some(DiceStyle::Literal));
    }

    #[test]
    fn out_of_range_threshold_is_parameter_error() {
        let cli = parse(&["detect", "--tb", "1.5"]).unwrap();
        let err = RunConfig::resolve(cli.command, &cli.args).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_USAGE);
    }

    #[test]
    fn config_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(
            &p,
            r#"{"detector": {"t_b": 0.4, "gauss_d": 51}, "synth": {"r_max": 20}}"#,
        )
        .unwrap();
        let cli = parse(&["segment", "--config", p.to_str().unwrap(), "--tb", "0.25"]).unwrap();
        let cfg = RunConfig::resolve(cli.command, &cli.args).unwrap();
        assert_eq!(cfg.detector.t_b, 0.25);
        assert_eq!(cfg.detector.gauss_d.get(), 51);
        assert_eq!(cfg.detector.dilate_m.get(), 91);
        assert_eq!(cfg.synth.r_max, 20);

        fs::write(&p, r#"{"detector": {"tb": 0.4}}"#).unwrap();
        let err = RunConfig::resolve(cli.command, &cli.args).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_DATA);
    }
}
