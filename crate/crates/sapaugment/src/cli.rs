//! The `sapaug` command line: debugging and end-to-end entry points for the
//! library. All randomness flows from one `--seed` (falling back to the
//! `SAPAUG_SEED` environment variable, then to 0); diagnostics go to stderr,
//! structured results to stdout or files. Exit codes: 0 success, 1 input
//! error, 2 numerical/state error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::augment::{
    cutmix, freq_mask, map_lambda, read_wav, sample_pairing, time_mask, time_stretch,
    write_feature_binary, write_feature_csv, write_wav, AugmentationKind, AugmentationStrength,
    Featurizer, FeaturizerConfig,
};
use crate::betafn::{inc_beta_eval, BetaArgs};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::harness::{decode_policy_vector, Objective};
use crate::pipeline::PolicyConfig;
use crate::policy::{lambda_of_rank, sample_selection};
use crate::search::{SearchConfig, SearchSpace, SearchState, TrialEvent, TrialLog};
use crate::seeding::stream;

#[derive(Parser)]
#[command(
    name = "sapaug",
    about = "Sample-adaptive augmentation policies and their search",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the regularized incomplete beta function I_x(alpha, beta)
    Ibeta(IbetaArgs),
    /// Emit the rank -> lambda curve of a policy as CSV
    PolicyCurve(PolicyCurveArgs),
    /// Augment one waveform under a policy file
    Augment(AugmentArgs),
    /// Run Bayesian-optimization policy search on the synthetic harness
    Search(SearchArgs),
    /// Train the synthetic task with and without a policy file
    Harness(HarnessArgs),
}

#[derive(Args)]
struct IbetaArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    x: f64,
}

#[derive(Args)]
struct PolicyCurveArgs {
    #[arg(long)]
    s: f64,
    #[arg(long)]
    a: f64,
    /// Batch size B; the curve has one row per rank
    #[arg(long)]
    batch: usize,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AugmentArgs {
    /// Input WAV (mono 16-bit PCM)
    #[arg(long = "in")]
    input: PathBuf,
    /// Partner WAV for the mixing transforms (defaults to the input itself)
    #[arg(long)]
    pair: Option<PathBuf>,
    /// Policy configuration JSON
    #[arg(long)]
    policy: PathBuf,
    /// Loss rank of this sample within its batch (1 = lowest loss)
    #[arg(long)]
    rank: usize,
    /// Batch size the rank refers to
    #[arg(long)]
    batch: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the waveform after the raw-domain transforms
    #[arg(long = "out-wav")]
    out_wav: Option<PathBuf>,
    /// Where to write the final feature matrix (.sapf binary or .csv)
    #[arg(long = "out-feat")]
    out_feat: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Search-space JSON ({"dims": [...]})
    #[arg(long)]
    space: PathBuf,
    /// Total number of trials to evaluate
    #[arg(long)]
    budget: usize,
    /// Suggestions per round, evaluated concurrently
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Trial log (JSON lines); an existing log is resumed
    #[arg(long)]
    log: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct HarnessArgs {
    /// Policy configuration JSON
    #[arg(long)]
    policy: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

/// Routes argv to a subcommand and maps errors to exit codes.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Ibeta(args) => run_ibeta(args),
        Command::PolicyCurve(args) => run_policy_curve(args),
        Command::Augment(args) => run_augment(args),
        Command::Search(args) => run_search(args),
        Command::Harness(args) => run_harness(args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("sapaug: {err}");
            err.exit_code()
        }
    }
}

/// `--seed` flag, then `SAPAUG_SEED`, then the fixed default.
fn resolve_seed(flag: Option<u64>, fallback: u64) -> u64 {
    flag.or_else(|| std::env::var("SAPAUG_SEED").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(fallback)
}

fn run_ibeta(args: IbetaArgs) -> Result<()> {
    let eval = inc_beta_eval(BetaArgs::new(args.alpha, args.beta, args.x)?)?;
    if eval.precision_warning {
        eprintln!("sapaug: continued fraction hit its iteration cap; value may be below full precision");
    }
    println!("{:.14e}", eval.value);
    Ok(())
}

fn run_policy_curve(args: PolicyCurveArgs) -> Result<()> {
    if args.batch == 0 {
        return Err(Error::input("batch size must be at least 1"));
    }
    let params = crate::policy::PolicyParams::new(args.s, args.a, 1.0)?;
    let mut csv = String::from("l_rank,x,lambda\n");
    for rank in 1..=args.batch {
        let x = rank as f64 / args.batch as f64;
        let lambda = lambda_of_rank(&params, rank, args.batch)?;
        csv.push_str(&format!("{rank},{x:.8e},{lambda:.8e}\n"));
    }
    match &args.out {
        Some(path) => write_atomic(path, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn run_augment(args: AugmentArgs) -> Result<()> {
    let config = PolicyConfig::from_path(&args.policy)?;
    let seed = resolve_seed(args.seed, config.seed);
    let input = read_wav(&args.input)?;
    let partner = match &args.pair {
        Some(path) => read_wav(path)?,
        None => input.clone(),
    };
    if args.rank == 0 || args.rank > args.batch {
        return Err(Error::input(format!(
            "rank {} out of range for batch size {}",
            args.rank, args.batch
        )));
    }

    let decisions: Vec<(AugmentationKind, bool, f64, AugmentationStrength)> =
        AugmentationKind::ALL
            .iter()
            .map(|&kind| {
                let params = config.policies.get(kind);
                let lambda = lambda_of_rank(params, args.rank, args.batch)?;
                let strength = map_lambda(kind, lambda)?;
                let mut rng = stream(seed, &[kind.index() as u64, 0]);
                let selected = sample_selection(params, &mut rng);
                Ok((kind, selected, lambda, strength))
            })
            .collect::<Result<_>>()?;
    let entry = |kind: AugmentationKind| {
        decisions.iter().find(|(k, ..)| *k == kind).expect("all kinds present")
    };
    let apply_rng =
        |kind: AugmentationKind| stream(seed, &[kind.index() as u64, 1]);

    let mut wave = input;
    if let (_, true, _, AugmentationStrength::SamplePairing { weight }) =
        entry(AugmentationKind::SamplePairing)
    {
        wave = sample_pairing(&wave, &partner, *weight)?;
    }
    if let (_, true, _, AugmentationStrength::CutMix { width }) = entry(AugmentationKind::CutMix) {
        let mut rng = apply_rng(AugmentationKind::CutMix);
        wave = cutmix(&wave, &partner, *width, config.n_cm, &mut rng)?;
    }
    if let Some(path) = &args.out_wav {
        write_wav(path, &wave)?;
    }

    let featurizer = Featurizer::new(FeaturizerConfig::default(), wave.sample_rate())?;
    let mut feat = featurizer.featurize(&wave)?;
    if let (_, true, _, AugmentationStrength::TimeStretch { max_ratio }) =
        entry(AugmentationKind::TimeStretch)
    {
        let mut rng = apply_rng(AugmentationKind::TimeStretch);
        feat = time_stretch(&feat, *max_ratio, &mut rng)?;
    }
    if let (_, true, _, AugmentationStrength::TimeMask { frames }) =
        entry(AugmentationKind::TimeMask)
    {
        let mut rng = apply_rng(AugmentationKind::TimeMask);
        feat = time_mask(&feat, *frames, config.num_masks, &mut rng)?;
    }
    if let (_, true, _, AugmentationStrength::FreqMask { bins }) = entry(AugmentationKind::FreqMask)
    {
        let mut rng = apply_rng(AugmentationKind::FreqMask);
        feat = freq_mask(&feat, *bins, config.num_masks, &mut rng)?;
    }
    if let Some(path) = &args.out_feat {
        write_features_by_extension(path, &feat)?;
    }

    let summary = serde_json::json!({
        "seed": seed,
        "rank": args.rank,
        "batch": args.batch,
        "frames": feat.num_frames(),
        "bins": feat.num_bins(),
        "augmentations": decisions.iter().map(|(kind, selected, lambda, strength)| {
            serde_json::json!({
                "kind": kind.name(),
                "selected": selected,
                "lambda": lambda,
                "parameter": strength.scalar(),
            })
        }).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn write_features_by_extension(path: &Path, feat: &crate::augment::FeatureMatrix) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => write_feature_csv(path, feat),
        _ => write_feature_binary(path, feat),
    }
}

fn run_search(args: SearchArgs) -> Result<()> {
    if args.budget == 0 {
        return Err(Error::input("budget must be at least 1"));
    }
    if args.parallel == 0 {
        return Err(Error::input("parallel batch size must be at least 1"));
    }
    let seed = resolve_seed(args.seed, 0);
    let space = SearchSpace::from_path(&args.space)?;
    let objective = Objective::with_default_protocol(seed)?.with_space(space.clone())?;

    let mut log = TrialLog::open(&args.log)?;
    let config = SearchConfig { seed, ..SearchConfig::default() };
    let mut state = SearchState::new(space.clone(), config);
    if !log.events().is_empty() {
        state.replay(log.events())?;
        eprintln!(
            "sapaug: resumed {} trials ({} completed) from {}",
            state.trials().len(),
            state.completed().count(),
            args.log.display()
        );
    }

    // catch up on any trials that were suggested but never observed
    let unfinished: Vec<(u64, Vec<f64>)> =
        state.pending().map(|t| (t.id, t.point.clone())).collect();
    observe_batch(&mut state, &objective, &mut log, unfinished)?;

    while state.trials().len() < args.budget {
        let round = state.trials().len() as u64;
        let q = args.parallel.min(args.budget - state.trials().len());
        let mut rng = stream(seed, &[0x5e66e57, round]);
        let suggested = state.suggest(q, &mut rng)?;
        log.append_all(
            suggested
                .iter()
                .map(|t| TrialEvent::suggest(t, &space, TrialEvent::now())),
        )?;
        let batch: Vec<(u64, Vec<f64>)> =
            suggested.iter().map(|t| (t.id, t.point.clone())).collect();
        observe_batch(&mut state, &objective, &mut log, batch)?;
    }

    let best = state.best()?;
    let policies = decode_policy_vector(&space, &best.point)?;
    let summary = serde_json::json!({
        "trials": state.trials().len(),
        "best_id": best.id,
        "best_objective": best.objective,
        "best_point": space.point_map(&best.point),
        "best_policy": policies,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn observe_batch(
    state: &mut SearchState,
    objective: &Objective,
    log: &mut TrialLog,
    batch: Vec<(u64, Vec<f64>)>,
) -> Result<()> {
    if batch.is_empty() {
        return Ok(());
    }
    let results: Vec<(u64, f64)> = batch
        .par_iter()
        .map(|(id, point)| Ok((*id, objective.evaluate(point)?)))
        .collect::<Result<_>>()?;
    for (id, value) in results {
        state.observe(id, value)?;
        log.append(TrialEvent::observe(id, value, TrialEvent::now()))?;
    }
    Ok(())
}

fn run_harness(args: HarnessArgs) -> Result<()> {
    let config = PolicyConfig::from_path(&args.policy)?;
    let seed = resolve_seed(args.seed, config.seed);
    let objective = Objective::with_default_protocol(seed)?;
    let baseline = objective.baseline()?;
    let policy = objective.evaluate_policies(&config.policies)?;
    let summary = serde_json::json!({
        "seed": seed,
        "baseline_accuracy": baseline,
        "policy_accuracy": policy,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
