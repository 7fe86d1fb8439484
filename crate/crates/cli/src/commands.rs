use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use docsmell_core::corpus::{label_distribution, parse_javadoc_html, parse_jsonl, write_jsonl};
use docsmell_core::eval::{
    cross_validate, cv_importance, kappa_per_smell, markdown_table, phi_csv, phi_matrix, CvInput, EvalReport,
    FeatureImportance, ModelSpec, SmellScores,
};
use docsmell_core::features::{FeatureKind, FeatureSpace};
use docsmell_core::learn::{train, ChainOrder, LearnerSpec, SavedModel};
use docsmell_core::metrics::{compute_metrics, write_metrics_csv, Lexicon, MetricVector};
use docsmell_core::rules::{classify, fit_thresholds_with, Orientation};
use docsmell_core::{Corpus, CorpusError, DocUnit, MultilabelPredictor, Smell, SmellLabels, ThresholdSelector, TrainConfig};

use crate::{
    Cli, Command, CrossvalArgs, DetectArgs, FeatureChoice, Format, IngestArgs, LearnerArgs, MetricsArgs, ModelKind,
    ReportArgs, StatsArgs, TrainArgs, ChainOrderArg,
};

/// Bad argument combination found after parsing; exits with status 2.
#[derive(Debug)]
pub struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn run(cli: Cli) -> Result<()> {
    let lexicon = || load_lexicon(cli.lexicon.as_deref());
    match cli.command {
        Command::Ingest(args) => ingest(args),
        Command::Metrics(args) => metrics(args, &lexicon()?),
        Command::Detect(args) => detect(args, &lexicon()?),
        Command::Train(args) => train_cmd(args, &lexicon()?),
        Command::Crossval(args) => crossval(args, &lexicon()?),
        Command::Stats(args) => stats(args),
        Command::Report(args) => report(args),
    }
}

fn load_lexicon(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        None => Ok(Lexicon::default_english()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading lexicon {}", p.display()))?;
            Lexicon::parse(&text).with_context(|| format!("lexicon {}", p.display()))
        }
    }
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_jsonl(BufReader::new(file)).with_context(|| path.display().to_string())
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Progress and summaries go to stdout when the payload goes to a file, and
/// to stderr otherwise.
fn note(payload_to_file: bool, msg: &str) {
    if payload_to_file {
        println!("{msg}");
    } else {
        eprintln!("{msg}");
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

fn all_metrics(units: &[DocUnit], lexicon: &Lexicon) -> Vec<MetricVector> {
    units.iter().map(|u| compute_metrics(u, lexicon)).collect()
}

fn html_files(root: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let entries = fs::read_dir(&dir).with_context(|| format!("reading directory {}", dir.display()))?;
        for entry in entries {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("html")) {
                found.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}

fn ingest(args: IngestArgs) -> Result<()> {
    let corpus = match (&args.jsonl, &args.javadoc_dir) {
        (Some(path), None) => read_corpus(path)?,
        (None, Some(root)) => {
            let mut units = Vec::new();
            for path in html_files(root)? {
                let rel = path.strip_prefix(root).unwrap_or(&path);
                let source_id = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
                let html = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                match parse_javadoc_html(&html, &source_id) {
                    Ok(found) => units.extend(found),
                    Err(CorpusError::NoMethodBlocks) => {}
                    Err(e) => return Err(e).with_context(|| path.display().to_string()),
                }
            }
            Corpus::new(units, None)?
        }
        _ => return Err(usage("exactly one of --jsonl and --javadoc-dir is required")),
    };
    let mut buf = Vec::new();
    write_jsonl(&corpus, &mut buf)?;
    emit(args.out.as_deref(), std::str::from_utf8(&buf)?)?;
    note(args.out.is_some(), &format!("{} units", corpus.len()));
    Ok(())
}

#[derive(Serialize)]
struct MetricsRow<'a> {
    id: &'a str,
    #[serde(flatten)]
    metrics: MetricVector,
}

fn metrics(args: MetricsArgs, lexicon: &Lexicon) -> Result<()> {
    let corpus = read_corpus(&args.corpus)?;
    let metrics = all_metrics(corpus.units(), lexicon);
    let content = match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_metrics_csv(corpus.units().iter().map(|u| u.id.as_str()).zip(metrics), &mut buf)?;
            String::from_utf8(buf)?
        }
        Format::Json => {
            let rows: Vec<MetricsRow> =
                corpus.units().iter().zip(metrics).map(|(u, m)| MetricsRow { id: &u.id, metrics: m }).collect();
            to_json(&rows)
        }
        Format::Md => return Err(usage("metrics supports --format csv or json")),
    };
    emit(args.out.as_deref(), &content)
}

fn predict_saved(model: &SavedModel, units: &[DocUnit], metrics: &[MetricVector]) -> Result<Vec<SmellLabels>> {
    match model {
        SavedModel::Rules(rules) => Ok(metrics.iter().map(|m| classify(m, rules)).collect()),
        SavedModel::Learned { space, model } => units
            .iter()
            .zip(metrics)
            .map(|(u, m)| Ok(model.predict(&space.transform(u, m)?)?))
            .collect(),
    }
}

#[derive(Serialize)]
struct Detection<'a> {
    id: &'a str,
    labels: SmellLabels,
}

fn detect(args: DetectArgs, lexicon: &Lexicon) -> Result<()> {
    let corpus = read_corpus(&args.corpus)?;
    let metrics = all_metrics(corpus.units(), lexicon);
    let model = match (&args.rules, &args.model) {
        (Some(selector), None) => SavedModel::Rules(fit_thresholds_with(&metrics, *selector, Orientation::Plain)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading model {}", path.display()))?;
            SavedModel::from_json(&text).with_context(|| path.display().to_string())?
        }
        _ => return Err(usage("exactly one of --rules and --model is required")),
    };
    let predicted = predict_saved(&model, corpus.units(), &metrics)?;

    let mut lines = String::new();
    for (unit, labels) in corpus.units().iter().zip(&predicted) {
        lines.push_str(&serde_json::to_string(&Detection { id: &unit.id, labels: *labels })?);
        lines.push('\n');
    }
    emit(args.out.as_deref(), &lines)?;

    let to_file = args.out.is_some();
    let counts: Vec<String> = Smell::ALL
        .iter()
        .map(|&s| format!("{}={}", s.key(), predicted.iter().filter(|l| l.get(s)).count()))
        .collect();
    note(to_file, &format!("{} units flagged: {}", predicted.len(), counts.join(" ")));
    if let Some(gold) = corpus.labels() {
        let scores = SmellScores::compute(gold, &predicted)?;
        note(to_file, "smell          P     R     F1");
        for smell in Smell::ALL {
            let s = scores.get(smell);
            note(to_file, &format!("{:<13} {:.3} {:.3} {:.3}", smell.key(), s.precision, s.recall, s.f1));
        }
    }
    Ok(())
}

fn feature_kind(choice: FeatureChoice, learner: &LearnerArgs) -> FeatureKind {
    let (min_df, max_features) = (learner.min_df, Some(learner.max_features));
    match choice {
        FeatureChoice::Rules => FeatureKind::Rules,
        FeatureChoice::Bow => FeatureKind::Bow { min_df, max_features },
        FeatureChoice::Combined => FeatureKind::Combined { min_df, max_features },
    }
}

fn learner_spec(kind: ModelKind, args: &LearnerArgs, seed: u64) -> Option<LearnerSpec> {
    let config = TrainConfig { lambda: args.lambda, epochs: args.epochs, seed };
    Some(match kind {
        ModelKind::Rules => return None,
        ModelKind::Ovr => LearnerSpec::Ovr(config),
        ModelKind::Cc => LearnerSpec::Chain {
            config,
            order: match args.chain_order {
                ChainOrderArg::Fixed => ChainOrder::Fixed,
                ChainOrderArg::Random => ChainOrder::Random { seed },
            },
        },
        ModelKind::Lps => LearnerSpec::Powerset(config),
        ModelKind::Mlknn => LearnerSpec::Mlknn { k: args.neighbors, smoothing: args.smoothing },
    })
}

fn orientation(args: &LearnerArgs) -> Orientation {
    if args.mirrored {
        Orientation::Mirrored
    } else {
        Orientation::Plain
    }
}

fn train_cmd(args: TrainArgs, lexicon: &Lexicon) -> Result<()> {
    let corpus = read_corpus(&args.corpus)?;
    let metrics = all_metrics(corpus.units(), lexicon);
    let saved = match learner_spec(args.model, &args.learner, args.seed) {
        None => SavedModel::Rules(fit_thresholds_with(&metrics, args.selector, orientation(&args.learner))?),
        Some(spec) => {
            let labels = corpus.require_labels()?;
            let refs: Vec<&DocUnit> = corpus.units().iter().collect();
            let space = FeatureSpace::fit(feature_kind(args.features, &args.learner), &refs, &metrics)?;
            let x = corpus
                .units()
                .iter()
                .zip(&metrics)
                .map(|(u, m)| space.transform(u, m))
                .collect::<Result<Vec<_>, _>>()?;
            let model = train(&spec, &x, labels)?;
            SavedModel::Learned { space, model }
        }
    };
    let mut json = saved.to_json();
    json.push('\n');
    emit(Some(&args.out), &json)?;
    println!("saved {} model to {}", saved.model_type(), args.out.display());
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct CrossvalOutput {
    reports: Vec<EvalReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    importance: Option<Vec<FeatureImportance>>,
}

impl CrossvalOutput {
    fn markdown(&self) -> String {
        let mut out = markdown_table(&self.reports);
        if let Some(importance) = &self.importance {
            out.push_str("\n| Feature | Overall |");
            for smell in Smell::ALL {
                out.push_str(&format!(" {} |", smell.title()));
            }
            out.push_str("\n|---|---:|");
            out.push_str(&"---:|".repeat(Smell::ALL.len()));
            out.push('\n');
            for imp in importance {
                out.push_str(&format!("| {} | {:.3} |", imp.name, imp.delta_macro_f1));
                for d in imp.delta_f1 {
                    out.push_str(&format!(" {d:.3} |"));
                }
                out.push('\n');
            }
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("model,features,smell,accuracy,precision,recall,f1\n");
        for r in &self.reports {
            for smell in Smell::ALL {
                let s = r.mean.get(smell);
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.model,
                    r.features,
                    smell.key(),
                    s.accuracy,
                    s.precision,
                    s.recall,
                    s.f1
                ));
            }
        }
        out
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Md => self.markdown(),
            Format::Csv => self.csv(),
        }
    }
}

fn parse_selectors(spec: &str) -> Result<Vec<ThresholdSelector>> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(ThresholdSelector::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse::<ThresholdSelector>().map_err(usage)).collect()
}

fn crossval(args: CrossvalArgs, lexicon: &Lexicon) -> Result<()> {
    let selectors = parse_selectors(&args.selectors)?;
    if args.repeats == 0 {
        return Err(usage("--repeats must be at least 1"));
    }
    let corpus = read_corpus(&args.corpus)?;
    let input = CvInput::new(&corpus, lexicon)?;
    let mut reports = Vec::new();
    for &kind in &args.model {
        match learner_spec(kind, &args.learner, args.seed) {
            None => {
                for &selector in &selectors {
                    let spec = ModelSpec::Rules { selector, orientation: orientation(&args.learner) };
                    reports.push(cross_validate(&input, FeatureKind::Rules, &spec, args.k, args.seed)?);
                }
            }
            Some(spec) => {
                for &choice in &args.features {
                    let features = feature_kind(choice, &args.learner);
                    reports.push(cross_validate(&input, features, &ModelSpec::Learner(spec), args.k, args.seed)?);
                }
            }
        }
    }
    let importance = if args.importance {
        let spec = learner_spec(ModelKind::Ovr, &args.learner, args.seed).expect("ovr is a learner");
        Some(cv_importance(&input, FeatureKind::Rules, &spec, args.k, args.seed, args.repeats)?)
    } else {
        None
    };
    let output = CrossvalOutput { reports, importance };
    match &args.out {
        Some(prefix) => {
            let json = prefix.with_extension("json");
            let md = prefix.with_extension("md");
            emit(Some(&json), &output.render(Format::Json))?;
            emit(Some(&md), &output.render(Format::Md))?;
            println!("wrote {} and {}", json.display(), md.display());
            Ok(())
        }
        None => emit(None, &output.render(args.format)),
    }
}

#[derive(Serialize)]
struct StatsOutput {
    total: usize,
    per_smell: BTreeMap<&'static str, usize>,
    at_least_one: usize,
    histogram: [usize; 6],
    phi: BTreeMap<&'static str, BTreeMap<&'static str, Option<f64>>>,
}

fn stats(args: StatsArgs) -> Result<()> {
    if let Some(files) = &args.kappa {
        return kappa(&files[0], &files[1], &args);
    }
    let path = args.corpus.as_deref().ok_or_else(|| usage("--corpus or --kappa is required"))?;
    let corpus = read_corpus(path)?;
    let dist = label_distribution(&corpus).with_context(|| path.display().to_string())?;
    let phi = phi_matrix(corpus.require_labels()?)?;
    let content = match args.format {
        Format::Json => {
            let output = StatsOutput {
                total: dist.total,
                per_smell: Smell::ALL.iter().map(|&s| (s.key(), dist.count(s))).collect(),
                at_least_one: dist.at_least_one(),
                histogram: dist.histogram,
                phi: Smell::ALL
                    .iter()
                    .map(|&a| (a.key(), Smell::ALL.iter().map(|&b| (b.key(), phi[a.index()][b.index()])).collect()))
                    .collect(),
            };
            to_json(&output)
        }
        Format::Csv => phi_csv(&phi),
        Format::Md => return Err(usage("stats supports --format json or csv")),
    };
    emit(args.out.as_deref(), &content)
}

fn kappa(a: &Path, b: &Path, args: &StatsArgs) -> Result<()> {
    let first = read_corpus(a)?;
    let second = read_corpus(b)?;
    let la = first.require_labels().with_context(|| a.display().to_string())?;
    let lb = second.require_labels().with_context(|| b.display().to_string())?;
    let by_id: HashMap<&str, SmellLabels> = second.units().iter().map(|u| u.id.as_str()).zip(lb.iter().copied()).collect();
    if by_id.len() != first.len() {
        bail!("{} and {} annotate different numbers of units", a.display(), b.display());
    }
    let mut aligned = Vec::with_capacity(la.len());
    for unit in first.units() {
        match by_id.get(unit.id.as_str()) {
            Some(l) => aligned.push(*l),
            None => bail!("unit {} missing from {}", unit.id, b.display()),
        }
    }
    let kappas = kappa_per_smell(la, &aligned)?;
    let content = match args.format {
        Format::Json => {
            let map: BTreeMap<&str, f64> = Smell::ALL.iter().map(|&s| (s.key(), kappas[s.index()])).collect();
            to_json(&map)
        }
        Format::Csv => {
            let mut out = String::from("smell,kappa\n");
            for smell in Smell::ALL {
                out.push_str(&format!("{},{}\n", smell.key(), kappas[smell.index()]));
            }
            out
        }
        Format::Md => return Err(usage("stats supports --format json or csv")),
    };
    emit(args.out.as_deref(), &content)
}

fn report(args: ReportArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let output: CrossvalOutput =
        serde_json::from_str(&text).with_context(|| format!("{} is not a crossval result", args.input.display()))?;
    emit(args.out.as_deref(), &output.render(args.format))
}
