//! Experiment commands behind the `sfq-ecc` binary.
//!
//! Every command writes machine-readable files (JSON, CSV, TOML) into the
//! output directory and prints a plain-text rendering of the same data.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bits::BitVector;
use crate::codes::{
    analyze_patterns, capability_summary, make_code, CorrectionRule, DecodeMode, LinearCode,
    BUILTIN_CODES,
};
use crate::error::{Error, Result};
use crate::ppv::{
    calibrate_fault_model, monte_carlo, CalibrationGrid, ManifestEntry, PpvConfig, RunManifest,
    Setup, Targets, REFERENCE_TARGETS, SETUPS,
};
use crate::sim::{codeword_time_ns, simulate, timeline_csv, to_timeline, verify_equivalence};
use crate::synth::{cost_report, synthesize, CellKind, CellLibrary, Netlist};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "SFQ_ECC_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "sfq-ecc",
    version,
    about = "Error-correction encoders for SFQ output links"
)]
pub struct Cli {
    /// Directory for generated files.
    #[arg(long, global = true, env = OUT_ENV, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum distance, error-pattern tables and capability summary.
    Codes(CodesArgs),
    /// Synthesize an encoder netlist and its cost report.
    Synth(SynthArgs),
    /// Verify a netlist against its code, then write a waveform timeline.
    Simulate(SimulateArgs),
    /// Process-variation Monte Carlo over the encoders and the uncoded link.
    Mc(McArgs),
    /// Fit the fault model to target zero-error probabilities.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct CodesArgs {
    /// Codes to report; all built-in codes when omitted.
    #[arg(long = "code", value_name = "CODE")]
    pub codes: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub code: String,
    /// Cell library file; the shipped library when omitted.
    #[arg(long)]
    pub library: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Netlist JSON written by `synth`.
    pub netlist: PathBuf,
    /// Code to verify against; defaults to the code recorded in the netlist.
    #[arg(long)]
    pub code: Option<String>,
    /// Messages applied on consecutive cycles, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1011")]
    pub messages: Vec<String>,
    #[arg(long, default_value_t = 5.0)]
    pub clock_ghz: f64,
    /// Time of the first cycle.
    #[arg(long, default_value_t = 0.0)]
    pub epoch_ns: f64,
}

/// Overrides applied on top of a configuration file.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// PPV config TOML; the shipped calibrated config when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chips: Option<usize>,
    #[arg(long)]
    pub messages: Option<usize>,
    #[arg(long)]
    pub spread: Option<f64>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Setups to run (`none` is the uncoded link); all four when omitted.
    #[arg(long = "code", value_name = "CODE")]
    pub codes: Vec<String>,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Zero-error targets for none, rm13, hamming74, hamming84.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub targets: Option<Vec<String>>,
    /// Maximum number of Monte Carlo runs.
    #[arg(long, default_value_t = 4000)]
    pub budget: usize,
    #[command(flatten)]
    pub config: ConfigArgs,
}

/// Runs a parsed command line; returns the text to print.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Codes(a) => cmd_codes(a, &cli.out),
        Command::Synth(a) => cmd_synth(a, &cli.out),
        Command::Simulate(a) => cmd_simulate(a, &cli.out),
        Command::Mc(a) => cmd_mc(a, &cli.out),
        Command::Calibrate(a) => cmd_calibrate(a, &cli.out),
    }
}

/// Parses `args`, runs the command and reports errors on stderr.
/// Returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::InvalidConfig { details, .. } = &e {
                for d in details {
                    eprintln!("  {d}");
                }
            }
            e.exit_code()
        }
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

pub fn cmd_codes(args: &CodesArgs, out: &Path) -> Result<String> {
    let names: Vec<&str> = if args.codes.is_empty() {
        BUILTIN_CODES.to_vec()
    } else {
        args.codes.iter().map(String::as_str).collect()
    };
    let codes = names
        .iter()
        .map(|n| make_code(n))
        .collect::<Result<Vec<_>>>()?;

    let mut text = String::new();
    let mut json = Vec::new();
    for code in &codes {
        let cap = capability_summary(code);
        let detect: Vec<_> = (0..=4)
            .map(|t| analyze_patterns(code, DecodeMode::DetectOnly, t))
            .collect();
        let correct: Vec<_> = (0..=4)
            .map(|t| analyze_patterns(code, DecodeMode::Correct, t))
            .collect();
        let _ = writeln!(
            text,
            "{} (n={}, k={}), d_min {}",
            code.name(),
            code.n(),
            code.k(),
            code.d_min()
        );
        let _ = writeln!(text, "  detect-only");
        for a in &detect {
            let _ = writeln!(
                text,
                "    weight {}: detected {} / {}, undetected {}",
                a.weight, a.detected, a.total, a.undetected
            );
        }
        let _ = writeln!(text, "  correct");
        for a in &correct {
            let _ = writeln!(
                text,
                "    weight {}: corrected {} / {}, miscorrected {}, flagged {}, undetected {}",
                a.weight, a.corrected, a.total, a.miscorrected, a.detected, a.undetected
            );
        }
        json.push(serde_json::json!({
            "code": code.name(),
            "n": code.n(),
            "k": code.k(),
            "d_min": code.d_min(),
            "detect_only": detect,
            "correct": correct,
            "capability": cap,
        }));
    }

    let _ = writeln!(
        text,
        "\n{:<10} {:>5} {:>12} {:>13} {:>11} {:>12}",
        "code", "d_min", "worst detect", "worst correct", "best detect", "best correct"
    );
    for code in &codes {
        let c = capability_summary(code);
        let _ = writeln!(
            text,
            "{:<10} {:>5} {:>12} {:>13} {:>11} {:>12}",
            c.code, c.d_min, c.worst_detect, c.worst_correct, c.best_detect, c.best_correct
        );
    }
    let path = write(
        out,
        "codes.json",
        &(serde_json::to_string_pretty(&json)? + "\n"),
    )?;
    let _ = writeln!(text, "wrote {}", path.display());
    Ok(text)
}

pub fn cmd_synth(args: &SynthArgs, out: &Path) -> Result<String> {
    let code = make_code(&args.code)?;
    let library = match &args.library {
        Some(p) => CellLibrary::parse(&read(p)?, &p.display().to_string())?,
        None => CellLibrary::default_library(),
    };
    let netlist = synthesize(&code)?;
    let report = cost_report(&netlist, &library)?;
    let net_path = write(
        out,
        &format!("{}.netlist.json", code.name()),
        &netlist.to_json()?,
    )?;
    let cost_path = write(
        out,
        &format!("{}.cost.json", code.name()),
        &(serde_json::to_string_pretty(&report)? + "\n"),
    )?;

    let mut text = format!("{} encoder\n", code.name());
    for kind in CellKind::PHYSICAL {
        let _ = writeln!(text, "  {:<9} {:>3}", kind.to_string(), report.count(kind));
    }
    let _ = writeln!(
        text,
        "  splitters: {} data + {} clock",
        report.data_splitters, report.clock_splitters
    );
    let _ = writeln!(text, "  jj_total {}", report.jj_total);
    let _ = writeln!(text, "  power {:.1} uW", report.power_total_uw);
    let _ = writeln!(text, "  area {:.3} mm2", report.area_total_mm2);
    let _ = writeln!(
        text,
        "wrote {}\nwrote {}",
        net_path.display(),
        cost_path.display()
    );
    Ok(text)
}

/// The uncoded link as a code: identity generator, nothing to correct.
fn identity_code(width: usize) -> Result<LinearCode> {
    let rows: Vec<BitVector> = (0..width)
        .map(|i| BitVector::from_mask(1 << i, width))
        .collect();
    LinearCode::from_rows("none", &rows, CorrectionRule::Syndrome)
}

fn code_for(name: &str, netlist: &Netlist) -> Result<LinearCode> {
    if name == "none" {
        identity_code(netlist.inputs.len())
    } else {
        make_code(name)
    }
}

pub fn cmd_simulate(args: &SimulateArgs, out: &Path) -> Result<String> {
    let text = read(&args.netlist)?;
    let netlist = Netlist::from_json(&text).map_err(|e| match e {
        Error::Json(j) => Error::Parse {
            source_name: args.netlist.display().to_string(),
            line: j.line(),
            message: j.to_string(),
        },
        other => other,
    })?;
    let name = args
        .code
        .clone()
        .or_else(|| netlist.code.clone())
        .ok_or_else(|| Error::invalid("netlist records no code; pass --code"))?;
    let code = code_for(&name, &netlist)?;
    let eq = verify_equivalence(&netlist, &code)?;
    if let Some(cx) = eq.counterexample {
        return Err(Error::Structural(format!(
            "netlist does not implement {name}: message {} gives {}, expected {}",
            cx.message, cx.actual, cx.expected
        )));
    }

    let frames = args
        .messages
        .iter()
        .filter(|m| !m.is_empty())
        .map(|m| m.parse::<BitVector>())
        .collect::<Result<Vec<_>>>()?;
    let cycles = if frames.is_empty() {
        0
    } else {
        frames.len() + netlist.check_structure()?.latency as usize
    };
    let result = simulate(&netlist, &frames, cycles)?;
    let events = to_timeline(&result, args.clock_ghz, args.epoch_ns)?;
    let stem = args
        .netlist
        .file_name()
        .and_then(|f| f.to_str())
        .map_or("netlist", |f| {
            f.trim_end_matches(".json").trim_end_matches(".netlist")
        });
    let path = write(out, &format!("{stem}.timeline.csv"), &timeline_csv(&events))?;

    let mut text = format!(
        "{name}: equivalent over {} messages, latency {} cycles\n",
        eq.messages_checked, result.latency
    );
    for (t, frame) in frames.iter().enumerate() {
        let word = result
            .codeword_for(t)
            .expect("simulated past the last message");
        let _ = writeln!(
            text,
            "  cycle {t}: {frame} -> {word} at {:.3} ns",
            codeword_time_ns(&result, t, args.clock_ghz, args.epoch_ns)
        );
    }
    let _ = writeln!(text, "wrote {}", path.display());
    Ok(text)
}

fn load_config(args: &ConfigArgs) -> Result<PpvConfig> {
    let mut cfg = match &args.config {
        Some(p) => PpvConfig::from_toml(&read(p)?, &p.display().to_string())?,
        None => PpvConfig::calibrated(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(c) = args.chips {
        cfg.chips = c;
    }
    if let Some(m) = args.messages {
        cfg.messages = m;
    }
    if let Some(s) = args.spread {
        cfg.spread = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_mc(args: &McArgs, out: &Path) -> Result<String> {
    let cfg = load_config(&args.config)?;
    let names: Vec<&str> = if args.codes.is_empty() {
        SETUPS.to_vec()
    } else {
        args.codes.iter().map(String::as_str).collect()
    };
    let setups = names
        .iter()
        .map(|n| Setup::named(n))
        .collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid(format!("worker pool: {e}")))?;

    let mut manifest = RunManifest::new(&cfg);
    let mut text = format!(
        "{} chips x {} messages, spread {}, seed {}\n{:<10} {:>10}\n",
        cfg.chips, cfg.messages, cfg.spread, cfg.seed, "setup", "P(N = 0)"
    );
    for setup in &setups {
        let cdf = pool.install(|| monte_carlo(setup, &cfg))?;
        let csv = format!("cdf_{}.csv", setup.name);
        write(out, &csv, &cdf.to_csv())?;
        let _ = writeln!(
            text,
            "{:<10} {:>9.1}%",
            setup.name,
            100.0 * cdf.zero_error_prob
        );
        manifest.runs.push(ManifestEntry {
            setup: setup.name.clone(),
            netlist_hash: setup.netlist.content_hash()?,
            zero_error_prob: cdf.zero_error_prob,
            csv,
        });
    }
    let path = write(out, "manifest.json", &manifest.to_json()?)?;
    let _ = writeln!(text, "wrote {}", path.display());
    Ok(text)
}

fn parse_targets(raw: &[String]) -> Result<Targets> {
    let values = raw
        .iter()
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("target `{s}` is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    values.try_into().map_err(|v: Vec<f64>| {
        Error::invalid(format!(
            "expected 4 targets (none, rm13, hamming74, hamming84), got {}",
            v.len()
        ))
    })
}

pub fn cmd_calibrate(args: &CalibrateArgs, out: &Path) -> Result<String> {
    let targets = match &args.targets {
        Some(raw) => parse_targets(raw)?,
        None => REFERENCE_TARGETS,
    };
    let base = load_config(&args.config)?;
    let cal = calibrate_fault_model(targets, &base, &CalibrationGrid::default(), args.budget)?;

    let cfg_path = write(out, "ppv_calibrated.toml", &cal.config.to_toml())?;
    let report_path = write(
        out,
        "calibration.json",
        &(serde_json::to_string_pretty(&cal)? + "\n"),
    )?;
    let mut text = format!(
        "margin {:.4} (spread {}), misfire {:.3e}, {} runs\n{:<10} {:>8} {:>9} {:>10}\n",
        cal.config.margins.xor,
        cal.config.spread,
        cal.config.misfire,
        cal.evaluations,
        "setup",
        "target",
        "achieved",
        "deviation"
    );
    for (i, name) in SETUPS.iter().enumerate() {
        let _ = writeln!(
            text,
            "{:<10} {:>8.3} {:>9.3} {:>+10.3}",
            name, cal.targets[i], cal.achieved[i], cal.deviations[i]
        );
    }
    let _ = writeln!(text, "max deviation {:.3}", cal.max_deviation);
    let _ = writeln!(
        text,
        "wrote {}\nwrote {}",
        cfg_path.display(),
        report_path.display()
    );
    if cal.converged {
        Ok(text)
    } else {
        print!("{text}");
        eprintln!("warning: best config written, but its deviation exceeds the tolerance");
        Err(Error::NotConverged(format!(
            "max deviation {:.3} after {} runs",
            cal.max_deviation, cal.evaluations
        )))
    }
}
