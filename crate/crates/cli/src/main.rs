use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cultnov::AnnotationProvider;
use cultnov_cli::{cmd_analyze, cmd_build, cmd_distances, cmd_report, cmd_score, CliError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "cultnov", version, about = "Score cultural adaptations of texts for novelty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect countries, split each dish by origin, cluster countries.
    Build,
    /// Score every variation of every split manifest.
    Score,
    /// Correlate, regress and mediate scores against cultural distances.
    Analyze,
    /// Write IW and geographic distance matrices from the registry.
    Distances,
    /// Bundle the CSV outputs into report.md.
    Report,
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Annotation provider: naive or preannotated.
    #[arg(long, global = true)]
    provider: Option<AnnotationProvider>,
    #[arg(long = "rbo-p", global = true)]
    rbo_p: Option<f64>,
    /// Appearance weight; the disappearance weight becomes 1 - lambda1.
    #[arg(long, global = true)]
    lambda1: Option<f64>,
    /// PPMI co-occurrence window.
    #[arg(long, global = true)]
    window: Option<usize>,
    /// Hold-out fraction of each origin's documents.
    #[arg(long, global = true)]
    holdout: Option<f64>,
    /// Bootstrap replicates for mediation.
    #[arg(long, global = true)]
    boot: Option<usize>,
    /// Heteroskedasticity-robust (HC1) standard errors.
    #[arg(long, global = true)]
    robust: bool,
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    dishes: Option<PathBuf>,
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    #[arg(long, global = true)]
    manifests: Option<PathBuf>,
    #[arg(long, global = true)]
    scores: Option<PathBuf>,
    #[arg(long = "out", global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long = "iw-csv", global = true)]
    iw: Option<PathBuf>,
    #[arg(long = "geo-csv", global = true)]
    geo: Option<PathBuf>,
    #[arg(long = "linguistic-csv", global = true)]
    linguistic: Option<PathBuf>,
    #[arg(long = "religious-csv", global = true)]
    religious: Option<PathBuf>,
}

impl Overrides {
    fn apply(self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(seed => c.seed, workers => c.workers, provider => c.annotation_provider, rbo_p => c.rbo_p,
            window => c.pmi_window, holdout => c.holdout_fraction, boot => c.bootstrap);
        if let Some(l1) = self.lambda1 {
            c.lambda1 = l1;
            c.lambda2 = 1.0 - l1;
        }
        if self.robust {
            c.robust_se = true;
        }
        macro_rules! set_path {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if self.$field.is_some() { $target = self.$field; })*
            };
        }
        set_path!(corpus => c.corpus, dishes => c.dish_specs, registry => c.registry, manifests => c.manifests,
            scores => c.scores, output_dir => c.output_dir, iw => c.distances.iw, geo => c.distances.geo,
            linguistic => c.distances.linguistic, religious => c.distances.religious);
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.opts.apply()?;
    match cli.command {
        Command::Build => {
            let s = cmd_build(&cfg)?;
            println!("{} eligible splits, {} ineligible, {} records dropped", s.eligible, s.ineligible, s.dropped_records);
        }
        Command::Score => {
            let s = cmd_score(&cfg)?;
            println!("{} variations scored, {} failures", s.rows, s.failures);
        }
        Command::Analyze => {
            let s = cmd_analyze(&cfg)?;
            let kinds: Vec<&str> = s.distances.iter().map(|k| k.as_str()).collect();
            println!("{} rows analyzed against {}", s.rows, kinds.join(", "));
        }
        Command::Distances => {
            for p in cmd_distances(&cfg)? {
                println!("{}", p.display());
            }
        }
        Command::Report => println!("{}", cmd_report(&cfg)?.display()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
