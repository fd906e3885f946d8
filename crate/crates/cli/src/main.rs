//! `uiwalk`: explore a simulated app, reproduce a discovered state, or serve
//! a live exploration over HTTP.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use uiwalk_core::coverage::{emit_report, CoverageTotals, OutputFormat};
use uiwalk_core::explorer::{
    explore_with, DetectorHook, EngineConfig, Exploration, ExploreOptions, LiveView, TagDetector,
};
use uiwalk_core::model::{snapshot_ref, StateId, StateModel};
use uiwalk_core::reproducer::{ReplayMode, Reproducer};
use uiwalk_core::sim::{corpus, load_app, SimApp, SimAppSpec};
use uiwalk_server::{bind, router, serve, EnvRunner, ServerState};

#[derive(Parser)]
#[command(name = "uiwalk", version, about = "Model-based UI exploration and state reproduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explore an app and write the model and reports.
    Explore {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Output::Both)]
        output: Output,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Drive the app to a discovered state and print the result as JSON.
    Reproduce {
        #[command(flatten)]
        run: RunArgs,
        /// State number to reach.
        #[arg(long)]
        target: usize,
        /// Model written by a previous `explore`; explores first when absent.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Disable re-resolution and accept exact hashes only.
        #[arg(long)]
        exact_only: bool,
        #[arg(long, default_value_t = 16)]
        max_paths: usize,
    },
    /// Explore in the background while serving the HTTP API.
    Serve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "localhost")]
        ip: String,
        #[arg(long, default_value_t = 5000)]
        port: u16,
        /// Directory of static web assets served at `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
    /// List the bundled apps.
    Corpus,
}

#[derive(Args)]
struct RunArgs {
    /// `corpus:<name>` or a path to an app spec JSON file.
    app: String,
    /// Overrides the app's noise seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replay tolerance in [0, 1].
    #[arg(long, default_value_t = 0.8, value_parser = unit_interval)]
    threshold: f64,
    #[arg(long, default_value_t = 60_000)]
    budget_ms: u64,
    #[arg(long, default_value_t = 10_000)]
    max_events: usize,
    /// Report every state showing a widget with this tag.
    #[arg(long)]
    crash_tag: Option<String>,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Graph,
    Report,
    Both,
}

impl From<Output> for OutputFormat {
    fn from(o: Output) -> Self {
        match o {
            Output::Graph => OutputFormat::Graph,
            Output::Report => OutputFormat::Report,
            Output::Both => OutputFormat::Both,
        }
    }
}

impl RunArgs {
    fn spec(&self) -> Result<SimAppSpec> {
        let spec = load_app(&self.app).with_context(|| format!("loading {}", self.app))?;
        Ok(match self.seed {
            Some(seed) => spec.with_seed(seed),
            None => spec,
        })
    }

    fn config(&self) -> Result<EngineConfig> {
        let config = EngineConfig {
            similarity_threshold: self.threshold,
            time_budget: Duration::from_millis(self.budget_ms),
            max_events: self.max_events,
            ..EngineConfig::default()
        };
        config.validate()?;
        Ok(config)
    }

    fn hooks(&self) -> Vec<Box<dyn DetectorHook>> {
        self.crash_tag
            .iter()
            .map(|tag| Box::new(TagDetector::new(tag.clone())) as Box<dyn DetectorHook>)
            .collect()
    }
}

fn totals(spec: &SimAppSpec) -> CoverageTotals {
    let (states, transitions) = spec.coverage_totals();
    CoverageTotals { states, transitions }
}

fn run_exploration(run: &RunArgs, spec: &SimAppSpec, live: Option<LiveView>) -> Result<Exploration> {
    let config = run.config()?;
    let options = ExploreOptions {
        live,
        totals: Some(totals(spec)),
    };
    let exploration = explore_with(&mut SimApp::new(spec.clone()), &config, &mut run.hooks(), &options)?;
    for f in &exploration.findings {
        eprintln!("[{}] state {}: {}", f.hook, f.state, f.message);
    }
    Ok(exploration)
}

/// Prints to stdout; a reader that went away early is not an error.
fn emit(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn explore_cmd(run: &RunArgs, output: Output, out_dir: &Path) -> Result<()> {
    let spec = run.spec()?;
    let exploration = run_exploration(run, &spec, None)?;
    let model = &exploration.model;
    let snapshots = out_dir.join("snapshots");
    fs::create_dir_all(&snapshots).with_context(|| format!("creating {}", snapshots.display()))?;

    write(&out_dir.join("model.json"), &model.to_json())?;
    for state in model.states() {
        write(&out_dir.join(snapshot_ref(state.id)), &state.snapshot.to_json())?;
    }
    let docs = emit_report(&exploration.coverage, model, output.into());
    let files = [
        ("graph.json", docs.graph_json),
        ("graph.dot", docs.graph_dot),
        ("coverage.csv", docs.coverage_csv),
        ("summary.json", docs.summary_json),
    ];
    for (name, doc) in files {
        if let Some(doc) = doc {
            write(&out_dir.join(name), &doc)?;
        }
    }
    if !exploration.findings.is_empty() {
        write(
            &out_dir.join("findings.json"),
            &serde_json::to_string_pretty(&exploration.findings)?,
        )?;
    }
    let report = serde_json::json!({
        "app": spec.name,
        "states": model.len(),
        "transitions": model.transition_count(),
        "termination": exploration.termination,
        "stats": exploration.stats,
        "findings": exploration.findings.len(),
        "out_dir": out_dir,
    });
    emit(&serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn reproduce_cmd(
    run: &RunArgs,
    target: usize,
    model_path: Option<&Path>,
    exact_only: bool,
    max_paths: usize,
) -> Result<bool> {
    let spec = run.spec()?;
    let config = run.config()?;
    let model = match model_path {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            StateModel::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => run_exploration(run, &spec, None)?.model,
    };
    let target = StateId(target);
    if !model.contains(target) {
        bail!("unknown state {target}; the model has {} states", model.len());
    }
    let mode = if exact_only {
        ReplayMode::ExactOnly
    } else {
        ReplayMode::Adaptive
    };
    let result = Reproducer::new(&model, config)
        .mode(mode)
        .max_paths(max_paths)
        .reproduce(&mut SimApp::new(spec), target);
    emit(&serde_json::to_string_pretty(&result)?)?;
    Ok(result.outcome.is_success())
}

fn serve_cmd(run: &RunArgs, ip: &str, port: u16, static_dir: Option<&Path>) -> Result<()> {
    let spec = run.spec()?;
    let config = run.config()?;
    let live = LiveView::default();
    let runtime = tokio::runtime::Runtime::new()?;
    let addr = format!("{ip}:{port}");
    let listener = runtime.block_on(bind(&addr))?;
    let state = ServerState::new(&live, EnvRunner::new(SimApp::new(spec.clone()), config, 16));
    let app = router(state, static_dir);

    let explorer = {
        let live = live.clone();
        std::thread::Builder::new()
            .name("explorer".into())
            .spawn({
                let spec = spec.clone();
                let hooks = run.hooks();
                let config = run.config()?;
                move || {
                    let mut hooks = hooks;
                    let options = ExploreOptions {
                        live: Some(live),
                        totals: Some(totals(&spec)),
                    };
                    match explore_with(&mut SimApp::new(spec), &config, &mut hooks, &options) {
                        Ok(e) => info!(
                            "exploration finished: {} states, {:?}",
                            e.model.len(),
                            e.termination
                        ),
                        Err(e) => log::error!("exploration did not start: {e}"),
                    }
                }
            })?
    };
    eprintln!("serving on http://{}", listener.local_addr()?);
    runtime.block_on(serve(listener, app, async {
        let _ = tokio::signal::ctrl_c().await;
    }))?;
    drop(explorer);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Explore { run, output, out_dir } => explore_cmd(run, *output, out_dir).map(|_| true),
        Command::Reproduce {
            run,
            target,
            model,
            exact_only,
            max_paths,
        } => reproduce_cmd(run, *target, model.as_deref(), *exact_only, *max_paths),
        Command::Serve {
            run,
            ip,
            port,
            static_dir,
        } => serve_cmd(run, ip, *port, static_dir.as_deref()).map(|_| true),
        Command::Corpus => {
            let lines: Vec<String> = corpus::names()
                .map(|name| {
                    let spec = corpus::load(name).expect("bundled apps are valid");
                    format!("corpus:{name}\t{} screens", spec.screen_count())
                })
                .collect();
            emit(&lines.join("\n")).map(|_| true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
