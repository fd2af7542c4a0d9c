use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use siren_elm::balance::balance_training_set;
use siren_elm::eval::{
    crossval, crossval_csv, crossval_table, feature_summary, feature_summary_csv, sweep_csv,
    sweep_neurons, sweep_table, EvalParams, ModelSpec, TimingConfig, DEFAULT_SEEDS, DEFAULT_SWEEP,
    SMOTE_SEED_OFFSET,
};
use siren_elm::features::FeatureConfig;
use siren_elm::ingest::{load_clip, DatasetPlan};
use siren_elm::{Activation, ElmConfig, ElmModel, FeatureExtractor, LabeledDataset, Normalizer, CLASS_NAMES};

mod output;

use output::{sidecar_path, write_new, ResultsDir};

#[derive(Parser)]
#[command(name = "siren-elm", version, about = "Siren vs urban sound detection with an extreme learning machine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract features for the siren and urban clips of an ESC-50 style corpus
    Prepare(PrepareArgs),
    /// Five-fold cross-validation of one model
    Crossval(CrossvalArgs),
    /// Cross-validate the ELM over several hidden-layer sizes
    Sweep(SweepArgs),
    /// Fit an ELM on every row of a feature file and save it
    Train(TrainArgs),
    /// Classify one WAV clip with a saved model
    Predict(PredictArgs),
    /// Per-class mean and std of every feature
    Summary(SummaryArgs),
}

#[derive(Args)]
struct PrepareArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    audio_dir: PathBuf,
    /// Feature file; `.bin` or `.selm` selects the binary format, anything else CSV
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Elm,
    Knn,
}

#[derive(Clone, Copy, ValueEnum)]
enum ActivationArg {
    Sigmoid,
    Tanh,
    HardLimit,
}

impl From<ActivationArg> for Activation {
    fn from(a: ActivationArg) -> Self {
        match a {
            ActivationArg::Sigmoid => Activation::Sigmoid,
            ActivationArg::Tanh => Activation::Tanh,
            ActivationArg::HardLimit => Activation::HardLimit,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SEEDS)]
    seeds: Vec<u64>,
    #[arg(long, value_enum, default_value = "sigmoid")]
    activation: ActivationArg,
    /// Ridge parameter; omit for the plain pseudoinverse
    #[arg(long)]
    ridge: Option<f64>,
    #[arg(long)]
    no_smote: bool,
    #[arg(long, default_value_t = 5)]
    smote_k: usize,
    #[arg(long, default_value_t = 3)]
    warmup: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// Parent directory for the timestamped results directory
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Print the report as JSON instead of a table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CrossvalArgs {
    #[arg(long, value_enum, default_value = "elm")]
    model: ModelKind,
    /// Hidden nodes (ELM)
    #[arg(long)]
    hidden: Option<usize>,
    /// Neighbours (KNN)
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    eval: EvalArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SWEEP)]
    hidden: Vec<usize>,
    #[command(flatten)]
    eval: EvalArgs,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    hidden: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "sigmoid")]
    activation: ActivationArg,
    #[arg(long)]
    ridge: Option<f64>,
    #[arg(long)]
    no_smote: bool,
    #[arg(long, default_value_t = 5)]
    smote_k: usize,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct PredictArgs {
    model: PathBuf,
    wav: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SummaryArgs {
    #[arg(long)]
    features: PathBuf,
    /// CSV destination; printed to standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ArgumentConflict, msg).exit()
}

fn check_ridge(ridge: Option<f64>) {
    if let Some(l) = ridge {
        if !(l.is_finite() && l > 0.0) {
            usage_error(format!("--ridge must be a positive number, got {l}"));
        }
    }
}

fn eval_params(model: ModelSpec, a: &EvalArgs) -> EvalParams {
    check_ridge(a.ridge);
    if a.seeds.is_empty() {
        usage_error("--seeds needs at least one value");
    }
    if a.repeats == 0 {
        usage_error("--repeats must be at least 1");
    }
    EvalParams {
        model,
        smote: !a.no_smote,
        smote_k: a.smote_k,
        timing: TimingConfig {
            warmup: a.warmup,
            repeats: a.repeats,
        },
    }
}

fn read_features(path: &Path) -> Result<(LabeledDataset, Option<FeatureConfig>)> {
    let data = LabeledDataset::read(path).with_context(|| format!("reading features {}", path.display()))?;
    let side = sidecar_path(path);
    let cfg = if side.exists() {
        let text = std::fs::read_to_string(&side)?;
        let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", side.display()))?;
        Some(serde_json::from_value(v["features"].clone()).with_context(|| format!("parsing {}", side.display()))?)
    } else {
        None
    };
    Ok((data, cfg))
}

#[derive(Serialize)]
struct RunEcho<'a> {
    command: &'a str,
    version: &'a str,
    features_file: &'a Path,
    params: &'a EvalParams,
    seeds: &'a [u64],
    smote_seed_offset: u64,
    timed_region: &'a str,
    statistic: &'a str,
    feature_config: Option<&'a FeatureConfig>,
}

const TIMED_REGION: &str = "model training plus classification of the held-out fold; feature extraction, normalisation and SMOTE excluded";

fn prepare(a: PrepareArgs) -> Result<()> {
    if a.out.exists() && !a.force {
        bail!("{} exists; pass --force to overwrite", a.out.display());
    }
    let empty = std::fs::read_dir(&a.audio_dir)
        .with_context(|| format!("reading audio directory {}", a.audio_dir.display()))?
        .next()
        .is_none();
    if empty {
        bail!("audio directory {} is empty", a.audio_dir.display());
    }
    let plan = DatasetPlan::new(&a.manifest, &a.audio_dir)?;
    if plan.items.is_empty() {
        bail!("manifest {} lists no siren or urban clips", a.manifest.display());
    }
    let counts = plan.counts();
    let clips = plan.load()?;
    let cfg = FeatureConfig::default();
    let data = LabeledDataset::from_clips(&clips, &FeatureExtractor::from_config(&cfg)?)?;
    let seconds: f64 = clips.iter().map(|c| c.samples.len() as f64 / c.sample_rate as f64).sum();
    drop(clips);
    data.write(&a.out)?;
    let side = serde_json::json!({
        "features": cfg,
        "manifest": a.manifest,
        "audio_dir": a.audio_dir,
        "rows": data.len(),
        "siren": counts.siren,
        "urban": counts.urban,
        "excluded_rows": plan.excluded_rows,
    });
    std::fs::write(sidecar_path(&a.out), serde_json::to_string_pretty(&side)?)?;
    println!(
        "siren {}  urban {}  total {}  ({:.2} h of audio, {} manifest rows skipped)",
        counts.siren,
        counts.urban,
        counts.total(),
        seconds / 3600.0,
        plan.excluded_rows
    );
    if !counts.matches_esc50() {
        eprintln!("warning: class counts differ from the 40 siren / 640 urban ESC-50 subset");
    }
    println!("wrote {}", a.out.display());
    Ok(())
}

fn run_crossval(a: CrossvalArgs) -> Result<()> {
    let model = match a.model {
        ModelKind::Elm => {
            if a.k.is_some() {
                usage_error("--k applies to --model knn only");
            }
            ModelSpec::Elm {
                hidden: a.hidden.unwrap_or(10),
                activation: a.eval.activation.into(),
                ridge: a.eval.ridge,
            }
        }
        ModelKind::Knn => {
            if a.hidden.is_some() || a.eval.ridge.is_some() {
                usage_error("--hidden and --ridge apply to --model elm only");
            }
            ModelSpec::knn(a.k.unwrap_or(5))
        }
    };
    let params = eval_params(model, &a.eval);
    let (data, fcfg) = read_features(&a.eval.features)?;
    let report = crossval(&data, &params, &a.eval.seeds)?;

    let tag = match a.model {
        ModelKind::Elm => "elm",
        ModelKind::Knn => "knn",
    };
    let dir = ResultsDir::create(&a.eval.out, &format!("crossval-{tag}"))?;
    dir.write_json("config.json", &echo("crossval", &a.eval, &params, fcfg.as_ref()))?;
    dir.write_json("report.json", &report)?;
    dir.write("report.csv", &crossval_csv(&report))?;
    let table = crossval_table(&report);
    dir.write("report.txt", &table)?;
    if a.eval.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{table}");
        println!("results in {}", dir.path().display());
    }
    Ok(())
}

fn echo<'a>(command: &'a str, a: &'a EvalArgs, params: &'a EvalParams, fcfg: Option<&'a FeatureConfig>) -> RunEcho<'a> {
    RunEcho {
        command,
        version: env!("CARGO_PKG_VERSION"),
        features_file: &a.features,
        params,
        seeds: &a.seeds,
        smote_seed_offset: SMOTE_SEED_OFFSET,
        timed_region: TIMED_REGION,
        statistic: "median of the timed repeats after untimed warmup runs",
        feature_config: fcfg,
    }
}

fn run_sweep(a: SweepArgs) -> Result<()> {
    if a.hidden.is_empty() || a.hidden.contains(&0) {
        usage_error("--hidden needs one or more positive sizes");
    }
    let base = eval_params(
        ModelSpec::Elm {
            hidden: a.hidden[0],
            activation: a.eval.activation.into(),
            ridge: a.eval.ridge,
        },
        &a.eval,
    );
    let (data, fcfg) = read_features(&a.eval.features)?;
    let sweep = sweep_neurons(&data, &a.hidden, &base, &a.eval.seeds)?;

    let dir = ResultsDir::create(&a.eval.out, "sweep")?;
    dir.write_json("config.json", &serde_json::json!({
        "run": echo("sweep", &a.eval, &base, fcfg.as_ref()),
        "hidden": a.hidden,
    }))?;
    dir.write_json("report.json", &sweep)?;
    dir.write("report.csv", &sweep_csv(&sweep))?;
    let table = sweep_table(&sweep);
    dir.write("report.txt", &table)?;
    if a.eval.json {
        println!("{}", serde_json::to_string_pretty(&sweep)?);
    } else {
        print!("{table}");
        println!("results in {}", dir.path().display());
    }
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    check_ridge(a.ridge);
    if a.out.exists() && !a.force {
        bail!("{} exists; pass --force to overwrite", a.out.display());
    }
    let (data, fcfg) = read_features(&a.features)?;
    let normalizer = Normalizer::fitted(data.features.view())?;
    let x = normalizer.transform(data.features.view())?;
    let (x, y) = if a.no_smote {
        (x, data.labels.clone())
    } else {
        let (x, y, _) = balance_training_set(x.view(), &data.labels, a.smote_k, a.seed.wrapping_add(SMOTE_SEED_OFFSET))?;
        (x, y)
    };
    let cfg = ElmConfig {
        hidden_nodes: a.hidden,
        activation: a.activation.into(),
        ridge: a.ridge,
        seed: a.seed,
    };
    let model = ElmModel::train(x.view(), &y, &cfg)?
        .with_normalizer(normalizer)?
        .with_labels(CLASS_NAMES)?;
    let pred = model.predict_normalized(x.view())?;
    let acc = 100.0 * pred.iter().zip(&y).filter(|(p, t)| p == t).count() as f64 / y.len() as f64;
    model.save(&a.out)?;
    let side = serde_json::json!({
        "features": fcfg.unwrap_or_default(),
        "seed": a.seed,
        "hidden": a.hidden,
        "smote": !a.no_smote,
        "training_rows": y.len(),
    });
    write_new(&sidecar_path(&a.out), &serde_json::to_string_pretty(&side)?, true)?;
    println!("trained ELM L={} seed={} on {} rows, training accuracy {acc:.2}%", a.hidden, a.seed, y.len());
    println!("wrote {}", a.out.display());
    Ok(())
}

#[derive(Serialize)]
struct PredictOut<'a> {
    file: &'a Path,
    label: &'a str,
    scores: Vec<(&'a str, f64)>,
    seed: u64,
}

fn predict(a: PredictArgs) -> Result<()> {
    let model = ElmModel::load(&a.model).with_context(|| format!("loading model {}", a.model.display()))?;
    let side = sidecar_path(&a.model);
    let fcfg: FeatureConfig = if side.exists() {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&side)?)?;
        serde_json::from_value(v["features"].clone()).with_context(|| format!("parsing {}", side.display()))?
    } else {
        FeatureConfig::default()
    };
    let clip = load_clip(&a.wav, 0, 0)?;
    let features = FeatureExtractor::from_config(&fcfg)?.extract_clip(&clip)?;
    let p = model.predict(features.as_slice())?;
    let out = PredictOut {
        file: &a.wav,
        label: &model.labels[p.label],
        scores: model.labels.iter().map(String::as_str).zip(p.scores.iter().copied()).collect(),
        seed: model.seed,
    };
    if a.json {
        println!("{}", serde_json::to_string(&out)?);
    } else {
        println!("{}", out.label);
        let scores: Vec<String> = out.scores.iter().map(|(n, s)| format!("{n}={s:.4}")).collect();
        println!("scores {}  seed {}", scores.join(" "), out.seed);
    }
    Ok(())
}

fn summary(a: SummaryArgs) -> Result<()> {
    let (data, _) = read_features(&a.features)?;
    let csv = feature_summary_csv(&feature_summary(&data));
    match a.out {
        Some(p) => {
            write_new(&p, &csv, a.force)?;
            println!("wrote {}", p.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SIREN_ELM_THREADS") {
        let n: usize = v.parse().with_context(|| format!("SIREN_ELM_THREADS={v} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<()> {
        init_threads()?;
        match cli.command {
            Command::Prepare(a) => prepare(a),
            Command::Crossval(a) => run_crossval(a),
            Command::Sweep(a) => run_sweep(a),
            Command::Train(a) => train(a),
            Command::Predict(a) => predict(a),
            Command::Summary(a) => summary(a),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
