//! `convdyn`: batch front end for orbit traces, certificates and property
//! suites.

mod config;
mod presets;
mod run;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use config::{Command, ExperimentConfig, Spec};
use run::{Report, Status};

#[derive(Parser, Debug)]
#[command(
    name = "convdyn",
    version,
    about = "Orbits, certificates and property suites for convolution operators"
)]
struct Cli {
    /// JSON file with one experiment object or an array of them; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    command: Option<Command>,
    /// Symbol preset (`d1`, `2*id+d1`, `id+0.5`, `translation:1,0@60`), inline JSON or a .json path.
    #[arg(long)]
    operator: Option<String>,
    /// Function preset (`gap:1`, `exp:1,0.5,12`, `z1^2*z3`), inline JSON or a .json path.
    /// For certify-nonsupercyclic, several generators separated by `;`.
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Comma-separated polydisc radii.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Seed for the random property suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random cases for `lemmas`.
    #[arg(long)]
    cases: Option<usize>,
    /// Size of the scrambled family for `liyorke`.
    #[arg(long)]
    members: Option<usize>,
    /// Torus grid samples per variable for `gridsup` columns.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory; nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit non-zero on error certificates (search failures, mismatches).
    #[arg(long)]
    strict: bool,
}

impl Cli {
    fn overrides(&self) -> ExperimentConfig {
        ExperimentConfig {
            name: None,
            command: self.command,
            operator: self.operator.clone().map(Spec::Text),
            function: self.function.clone().map(Spec::Text),
            generators: None,
            horizon: self.horizon,
            radii: self.radii.clone(),
            eps: self.eps,
            delta: self.delta,
            seed: self.seed,
            cases: self.cases,
            members: self.members,
            samples: self.samples,
            out: self.out.clone(),
            strict: self.strict.then_some(true),
        }
    }
}

/// Output directory of entry `i` of a batch of `n`.
fn entry_dir(cfg: &ExperimentConfig, i: usize, n: usize) -> Option<PathBuf> {
    let out = cfg.out.clone()?;
    if n == 1 {
        return Some(out);
    }
    let sub = cfg
        .name
        .clone()
        .unwrap_or_else(|| format!("{:02}-{}", i + 1, cfg.command.map_or("experiment", Command::name)));
    Some(out.join(sub))
}

fn emit(report: &mut Report, dir: &Path) {
    let result = std::fs::create_dir_all(dir).and_then(|_| {
        for (name, contents) in &report.files {
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    });
    if let Err(e) = result {
        report.lines.push(format!("cannot write to {}: {e}", dir.display()));
        report.status = report.status.max(Status::Io);
    }
    // the summary reflects the final status
    let _ = std::fs::write(dir.join("summary.txt"), report.summary());
}

fn run_all(configs: &[ExperimentConfig]) -> Vec<Report> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        configs.par_iter().map(run::run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        configs.iter().map(run::run).collect()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::ConfigError.code() } else { 0 });
        }
    };
    let overrides = cli.overrides();
    let configs = match &cli.config {
        Some(path) => match config::load(path) {
            Ok(list) => list.into_iter().map(|c| c.overlay(&overrides)).collect::<Vec<_>>(),
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(Status::ConfigError.code());
            }
        },
        None => vec![overrides],
    };

    let mut reports = run_all(&configs);
    let n = configs.len();
    let mut stdout = std::io::stdout().lock();
    let mut worst = Status::Ok;
    for (i, (cfg, report)) in configs.iter().zip(reports.iter_mut()).enumerate() {
        if let Some(dir) = entry_dir(cfg, i, n) {
            emit(report, &dir);
        }
        let _ = stdout.write_all(report.summary().as_bytes());
        worst = worst.max(report.status);
    }
    ExitCode::from(worst.code())
}
