//! `flagsurge`: runs one computation on a JSON scene and writes a `KEY: value`
//! report, CSV/PLY artifacts and the resolved scene into an output directory.
//!
//! Exit codes: 0 success or certificate, 2 violation or failed computation,
//! 3 invalid input.

// `!(x > t)` is the NaN-rejecting form of `x <= t`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod scene;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use commands::{Classify, Failure, Outcome};

#[derive(Parser, Debug)]
#[command(name = "flagsurge", version, about = "Dynamics, Schottky certificates and surgeries on the flag space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct SceneArgs {
    /// Scene file (JSON)
    scene: PathBuf,
    /// Output directory, created if absent
    #[arg(long, default_value = "flagsurge-out")]
    out: PathBuf,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Eigenvalues and fixed flags of a matrix
    Classify {
        #[command(flatten)]
        io: SceneArgs,
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Sample the bouquet through a flag
    Bouquet {
        #[command(flatten)]
        io: SceneArgs,
        #[arg(long)]
        flag: Option<String>,
        /// Points per circle
        #[arg(long)]
        points: Option<usize>,
    },
    /// Apply g^n to a cloud
    Iterate {
        #[command(flatten)]
        io: SceneArgs,
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        cloud: String,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        n: i64,
    },
    /// Attraction certificate towards the attracting bouquet
    Attract {
        #[command(flatten)]
        io: SceneArgs,
        #[arg(long)]
        matrix: Option<String>,
        /// Defaults to a sample kept `sampling.margin` away from the repelling bouquet
        #[arg(long)]
        cloud: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Coverage certificate: every target off the attracting bouquet enters g^n(P)
    Coverage {
        #[command(flatten)]
        io: SceneArgs,
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        tube: Option<String>,
        /// Defaults to a uniform sample of `sampling.count` targets
        #[arg(long)]
        cloud: Option<String>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Ping-pong certificate, plus freeness when the section names a seed tube
    CertifySchottky {
        #[command(flatten)]
        io: SceneArgs,
        #[arg(long)]
        schottky: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Sampled limit set of a certified configuration
    LimitSet {
        #[command(flatten)]
        io: SceneArgs,
        #[arg(long)]
        schottky: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Smallest gluing exponent and verification of the exchange conditions
    SurgerySearch {
        #[command(flatten)]
        io: SceneArgs,
    },
    /// Free-product combination of two Schottky sections through the surgery
    Combine {
        #[command(flatten)]
        io: SceneArgs,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Density of the exponent group and trace invariants of a deformation
    DeformCheck {
        #[command(flatten)]
        io: SceneArgs,
        /// Coefficient bound for the density search
        #[arg(long = "N", default_value_t = 50)]
        n: u32,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Coefficient bound for the trace list (defaults to `deform.trace_bound`)
        #[arg(long)]
        trace_n: Option<u32>,
    },
    /// Parity of the b-letters of a surface word (a1 b1 a2 b2, ^-1 or upper case for inverses)
    Parity {
        #[arg(required = true, allow_hyphen_values = true)]
        word: Vec<String>,
    },
    /// Write a named cloud as CSV and PLY
    Export {
        #[command(flatten)]
        io: SceneArgs,
        #[arg(long)]
        cloud: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Bouquet { .. } => "bouquet",
            Command::Iterate { .. } => "iterate",
            Command::Attract { .. } => "attract",
            Command::Coverage { .. } => "coverage",
            Command::CertifySchottky { .. } => "certify-schottky",
            Command::LimitSet { .. } => "limit-set",
            Command::SurgerySearch { .. } => "surgery-search",
            Command::Combine { .. } => "combine",
            Command::DeformCheck { .. } => "deform-check",
            Command::Parity { .. } => "parity",
            Command::Export { .. } => "export",
        }
    }

    fn io(&self) -> Option<&SceneArgs> {
        match self {
            Command::Classify { io, .. }
            | Command::Bouquet { io, .. }
            | Command::Iterate { io, .. }
            | Command::Attract { io, .. }
            | Command::Coverage { io, .. }
            | Command::CertifySchottky { io, .. }
            | Command::LimitSet { io, .. }
            | Command::SurgerySearch { io }
            | Command::Combine { io, .. }
            | Command::DeformCheck { io, .. }
            | Command::Export { io, .. } => Some(io),
            Command::Parity { .. } => None,
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("FLAGSURGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("FLAGSURGE_THREADS={v:?} is not a thread count"))
        .input()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")
        .compute()
}

fn dispatch(cmd: &Command, l: &scene::Loaded) -> Result<Outcome, Failure> {
    use commands::*;
    match cmd {
        Command::Classify { matrix, .. } => classify_cmd(l, matrix.as_deref()),
        Command::Bouquet { flag, points, .. } => bouquet_cmd(l, flag.as_deref(), *points),
        Command::Iterate { matrix, cloud, n, .. } => iterate_cmd(l, matrix.as_deref(), cloud, *n),
        Command::Attract { matrix, cloud, eps, n_max, .. } => {
            attract_cmd(l, matrix.as_deref(), cloud.as_deref(), *eps, *n_max)
        }
        Command::Coverage { matrix, tube, cloud, n_max, .. } => {
            coverage_cmd(l, matrix.as_deref(), tube.as_deref(), cloud.as_deref(), *n_max)
        }
        Command::CertifySchottky { schottky, depth, .. } => certify_cmd(l, schottky.as_deref(), *depth),
        Command::LimitSet { schottky, depth, points, .. } => limit_set_cmd(l, schottky.as_deref(), *depth, *points),
        Command::SurgerySearch { .. } => surgery_cmd(l),
        Command::Combine { depth, .. } => combine_cmd(l, *depth),
        Command::DeformCheck { n, tol, trace_n, .. } => deform_cmd(l, *n, *tol, *trace_n),
        Command::Export { cloud, .. } => export_cmd(l, cloud),
        Command::Parity { .. } => unreachable!("handled without a scene"),
    }
}

#[derive(Serialize)]
struct Resolved<'a> {
    command: &'a str,
    options: &'a Command,
    scene: &'a scene::Scene,
}

fn write_outputs(dir: &Path, cmd: &Command, l: &scene::Loaded, out: &Outcome) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let resolved = Resolved { command: cmd.name(), options: cmd, scene: &l.scene };
    let mut json = serde_json::to_string_pretty(&resolved)?;
    json.push('\n');
    fs::write(dir.join("resolved.json"), json)?;
    let mut report = String::new();
    report.push_str(&format!("command: {}\n", cmd.name()));
    for (k, v) in &out.report {
        report.push_str(&format!("{k}: {v}\n"));
    }
    report.push_str(&format!("status: {}\n", if out.passed { "pass" } else { "fail" }));
    fs::write(dir.join("report.txt"), &report)?;
    for (name, contents) in &out.files {
        fs::write(dir.join(name), contents).with_context(|| format!("writing {name}"))?;
    }
    print!("{report}");
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    configure_threads()?;
    if let Command::Parity { word } = &cli.command {
        println!("{}", commands::parity_cmd(&word.join(" "))?);
        return Ok(true);
    }
    let io = cli.command.io().expect("scene commands carry io");
    let loaded = scene::load(&io.scene).input()?;
    let out = dispatch(&cli.command, &loaded)?;
    write_outputs(&io.out, &cli.command, &loaded, &out).compute()?;
    Ok(out.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
