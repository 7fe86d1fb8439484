//! Acceptance suite: one line per criterion, `PASS`, `FAIL` or `SKIP`.
//!
//! Run with `cargo test -p docsmell-core --test acceptance`. Criterion 9 needs
//! the labeled 1,000-unit benchmark at `data/benchmark.jsonl` (or the path in
//! `DOCSMELL_BENCHMARK`) and is skipped otherwise.

use std::fs::File;
use std::io::BufReader;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use docsmell_core::corpus::{label_distribution, parse_jsonl};
use docsmell_core::eval::{
    cohen_kappa, cross_validate, fold_deviation, iterative_stratified_folds, label_metrics, multilabel_metrics,
    permutation_importance, phi, random_folds, CvInput, LabelScores, ModelSpec,
};
use docsmell_core::features::{FeatureKind, FeatureVector};
use docsmell_core::learn::{train_mlknn, train_ovr, LearnerSpec};
use docsmell_core::metrics::{flesch_reading_ease, levenshtein};
use docsmell_core::rules::{classify, fit_thresholds};
use docsmell_core::{
    Corpus, DocUnit, Lexicon, MetricVector, MultilabelPredictor, Smell, SmellLabels, ThresholdSelector, TrainConfig,
};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = fn() -> Outcome;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("1 levenshtein matches DP oracle", c1_levenshtein),
        ("2 readability fixtures", c2_readability),
        ("3 multilabel metric fixtures", c3_metric_fixtures),
        ("4 fold balance", c4_fold_balance),
        ("5 ML-kNN matches brute force", c5_mlknn),
        ("6 p90 flags the top decile", c6_tail),
        ("7 permutation importance direction", c7_importance),
        ("8 separable corpus learned by OVR + BoW", c8_separable),
        ("9 benchmark reproduction", c9_benchmark),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Outcome::Fail(format!("panicked: {msg}"))
            });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} criterion {name} ({secs:.2}s): {detail}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn dp_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

fn c1_levenshtein() -> Outcome {
    let start = Instant::now();
    let alphabet: Vec<char> = "abcxyzé中 ".chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let word = |rng: &mut ChaCha8Rng| -> String {
        let len = rng.gen_range(0..=12);
        (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
    };
    let mut mismatches = 0;
    for _ in 0..1000 {
        let a = word(&mut rng);
        let b = word(&mut rng);
        if levenshtein(&a, &b) != dp_levenshtein(&a, &b) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        mismatches == 0 && within(elapsed, 5),
        format!("{mismatches} mismatches on 1000 pairs in {elapsed:.2?} (limit 5s)"),
    )
}

fn c2_readability() -> Outcome {
    // Hand-computed, then confirmed with an independent script.
    let fixtures = [
        ("The cat sat.", 119.19),
        ("Go. Go.", 121.22),
        ("Make it.", 120.205),
        ("Beautiful idea!", -6.695),
        ("Returns the number of elements in this list.", 71.815),
    ];
    let mut worst: f64 = 0.0;
    for (text, expected) in fixtures {
        let got = flesch_reading_ease(text).expect("non-empty");
        worst = worst.max((got - expected).abs());
    }
    let empty_rejected = flesch_reading_ease("").is_err();
    check(
        worst <= 1e-9 && empty_rejected,
        format!("max deviation {worst:.1e} over 5 fixtures (tolerance 1e-9); empty text rejected: {empty_rejected}"),
    )
}

fn c3_metric_fixtures() -> Outcome {
    let mut failures = Vec::new();
    let mut expect = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_owned());
        }
    };
    let scores = |a, p, r, f| LabelScores { accuracy: a, precision: p, recall: r, f1: f };

    let (s, c) = label_metrics(&[true, true, false, false], &[true, false, true, false]).unwrap();
    expect("one of each", s == scores(0.5, 0.5, 0.5, 0.5) && (c.tp, c.fp, c.tn, c.fn_) == (1, 1, 1, 1));
    let y = [true, false, true, true, false];
    expect("identity", label_metrics(&y, &y).unwrap().0 == scores(1.0, 1.0, 1.0, 1.0));
    expect("all negative", label_metrics(&[false; 4], &[false; 4]).unwrap().0 == scores(1.0, 0.0, 0.0, 0.0));

    let l1 = SmellLabels { bloated: true, ..SmellLabels::NONE };
    let l2 = SmellLabels { lazy: true, ..SmellLabels::NONE };
    let m = multilabel_metrics(&[l1, l2], &[l1, l1]).unwrap();
    expect("EMR/HL partial", m.emr == 0.5 && m.hamming_loss == 0.2);
    let m = multilabel_metrics(&[l1, l2], &[l1, l2]).unwrap();
    expect("EMR/HL exact", m.emr == 1.0 && m.hamming_loss == 0.0);
    let m = multilabel_metrics(&[l1, l2], &[l1.complement(), l2.complement()]).unwrap();
    expect("EMR/HL complement", m.emr == 0.0 && m.hamming_loss == 1.0);

    let a = [true, true, false, false];
    expect("kappa identity", cohen_kappa(&a, &a).unwrap() == 1.0);
    expect("kappa chance", cohen_kappa(&a, &[true, false, true, false]).unwrap() == 0.0);
    let not_a = a.map(|v| !v);
    expect("phi identical", phi(&a, &a) == Some(1.0));
    expect("phi complementary", phi(&a, &not_a) == Some(-1.0));
    expect("phi constant", phi(&a, &[true; 4]).is_none());

    check(failures.is_empty(), if failures.is_empty() { "11 fixtures exact".into() } else { format!("mismatched: {failures:?}") })
}

fn only(smell: Smell) -> SmellLabels {
    let mut l = SmellLabels::NONE;
    l.set(smell, true);
    l
}

/// Labels with exact per-smell marginals, placed independently at random.
fn simulated_labels(rng: &mut ChaCha8Rng, m: usize, marginals: [usize; 5]) -> Vec<SmellLabels> {
    let mut y = vec![SmellLabels::NONE; m];
    let mut idx: Vec<usize> = (0..m).collect();
    for smell in Smell::ALL {
        idx.shuffle(rng);
        for &i in &idx[..marginals[smell.index()]] {
            y[i].set(smell, true);
        }
    }
    y
}

fn c4_fold_balance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut unbalanced = 0;
    for trial in 0..50u64 {
        let m = rng.gen_range(5..=200);
        let y: Vec<SmellLabels> = (0..m)
            .map(|_| match rng.gen_range(0..6) {
                5 => SmellLabels::NONE,
                c => only(Smell::ALL[c]),
            })
            .collect();
        let folds = iterative_stratified_folds(&y, 5, trial).unwrap();
        let sizes = folds.sizes();
        let mut ok = sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1;
        for smell in Smell::ALL {
            let mut per = [0usize; 5];
            for (l, &f) in y.iter().zip(&folds.folds) {
                per[f] += usize::from(l.get(smell));
            }
            ok &= per.iter().max().unwrap() - per.iter().min().unwrap() <= 1;
        }
        unbalanced += usize::from(!ok);
    }

    // Lazy and bloated counts are the published ones; the other three are
    // stand-ins inside the published range.
    let marginals = [141, 275, 200, 190, 180];
    let mut wins = 0;
    for trial in 0..50u64 {
        let y = simulated_labels(&mut rng, 1000, marginals);
        let iterative = fold_deviation(&y, &iterative_stratified_folds(&y, 5, trial).unwrap());
        let random = fold_deviation(&y, &random_folds(y.len(), 5, trial).unwrap());
        wins += usize::from(iterative < random);
    }
    check(
        unbalanced == 0 && wins >= 45,
        format!("{unbalanced}/50 single-label datasets out of balance; stratified beat random in {wins}/50 trials (need 45)"),
    )
}

/// Independent re-implementation: dense distances, a full stable sort and the
/// Bayes comparison written out from the counts.
fn brute_force_mlknn(x: &[Vec<f64>], y: &[SmellLabels], k: usize, s: f64, q: &[f64]) -> SmellLabels {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0, |acc, (u, v)| acc + (v - u) * (v - u));
    let neighbours = |query: &[f64], skip: Option<usize>| -> Vec<usize> {
        let mut order: Vec<(f64, usize)> =
            (0..x.len()).filter(|&i| Some(i) != skip).map(|i| (dist(&x[i], query), i)).collect();
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        order.into_iter().take(k).map(|(_, i)| i).collect()
    };
    let m = x.len();
    let mut out = SmellLabels::NONE;
    for smell in Smell::ALL {
        let positives = y.iter().filter(|l| l.get(smell)).count();
        let p1 = (s + positives as f64) / (2.0 * s + m as f64);
        let mut c = vec![0usize; k + 1];
        let mut c_neg = vec![0usize; k + 1];
        for i in 0..m {
            let delta = neighbours(&x[i], Some(i)).iter().filter(|&&n| y[n].get(smell)).count();
            if y[i].get(smell) {
                c[delta] += 1;
            } else {
                c_neg[delta] += 1;
            }
        }
        let cq = neighbours(q, None).iter().filter(|&&n| y[n].get(smell)).count();
        let sum_c: usize = c.iter().sum();
        let sum_neg: usize = c_neg.iter().sum();
        let pos = p1 * (s + c[cq] as f64) / (s * (k + 1) as f64 + sum_c as f64);
        let neg = (1.0 - p1) * (s + c_neg[cq] as f64) / (s * (k + 1) as f64 + sum_neg as f64);
        out.set(smell, pos >= neg);
    }
    out
}

fn c5_mlknn() -> Outcome {
    // Worked example: points 0 (positive) and 10 (negative), k = 1.
    let x = [FeatureVector::from_dense(&[0.0]), FeatureVector::from_dense(&[10.0])];
    let y = [only(Smell::Bloated), SmellLabels::NONE];
    let model = train_mlknn(&x, &y, 1, 1.0).unwrap();
    let worked = !model.predict(&FeatureVector::from_dense(&[0.1])).unwrap().bloated
        && model.c[0] == [1, 0]
        && model.c_neg[0] == [0, 1];

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..200 {
        let m = rng.gen_range(6..=50);
        let d = rng.gen_range(1..=5);
        let k = [1, 3, 5][rng.gen_range(0..3)];
        // Small integer coordinates make distance ties common.
        let xs: Vec<Vec<f64>> = (0..m).map(|_| (0..d).map(|_| rng.gen_range(0..4) as f64).collect()).collect();
        let ys: Vec<SmellLabels> = (0..m).map(|_| SmellLabels::decode(rng.gen_range(0..32))).collect();
        let q: Vec<f64> = (0..d).map(|_| rng.gen_range(0..4) as f64).collect();
        let fv: Vec<FeatureVector> = xs.iter().map(|v| FeatureVector::from_dense(v)).collect();
        let model = train_mlknn(&fv, &ys, k, 1.0).unwrap();
        let got = model.predict(&FeatureVector::from_dense(&q)).unwrap();
        if got != brute_force_mlknn(&xs, &ys, k, 1.0, &q) {
            mismatches += 1;
        }
    }
    check(
        worked && mismatches == 0,
        format!("worked example negative: {worked}; {mismatches} mismatches on 200 random queries"),
    )
}

fn c6_tail() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = Vec::new();
    for trial in 0..20 {
        let mut cols: Vec<Vec<u32>> = (0..4)
            .map(|_| {
                let mut v: Vec<u32> = (0..100).map(|i| i * 3 + 1).collect();
                v.shuffle(&mut rng);
                v
            })
            .collect();
        let [len, jargon, urls, refs] = [cols.remove(0), cols.remove(0), cols.remove(0), cols.remove(0)];
        let metrics: Vec<MetricVector> = (0..100)
            .map(|i| MetricVector {
                doc_length: len[i],
                readability: 50.0,
                jargon_count: jargon[i],
                url_count: urls[i],
                struct_ref_count: refs[i],
                edit_distance: 1000 + i as u32,
            })
            .collect();
        let model = fit_thresholds(&metrics, ThresholdSelector::P90).unwrap();
        let top = |col: &[u32]| -> Vec<usize> {
            let mut idx: Vec<usize> = (0..100).collect();
            idx.sort_by_key(|&i| std::cmp::Reverse(col[i]));
            let mut top: Vec<usize> = idx[..10].to_vec();
            top.sort();
            top
        };
        let flagged = |f: &dyn Fn(&MetricVector) -> bool| -> Vec<usize> { (0..100).filter(|&i| f(&metrics[i])).collect() };
        let t = model.thresholds;
        let cases: [(&str, Vec<usize>, Vec<usize>); 4] = [
            ("bloated", flagged(&|m| classify(m, &model).bloated), top(&len)),
            ("excess_struct", flagged(&|m| classify(m, &model).excess_struct), top(&refs)),
            ("fragmented", flagged(&|m| classify(m, &model).fragmented), top(&urls)),
            ("tangled jargon", flagged(&|m| m.jargon_count as f64 > t.tangled_jargon), top(&jargon)),
        ];
        for (name, got, want) in cases {
            if got != want {
                bad.push(format!("trial {trial} {name}: {} flagged", got.len()));
            }
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "20 corpora x 4 metrics flag exactly 10/100".into() } else { bad.join("; ") })
}

fn c7_importance() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut make = |n: usize| -> (Vec<FeatureVector>, Vec<SmellLabels>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let f0: f64 = rng.gen_range(-1.0..1.0);
            let noise: f64 = rng.gen_range(-1.0..1.0);
            x.push(FeatureVector::from_dense(&[f0, noise, 1.0]));
            y.push(SmellLabels { lazy: f0 > 0.0, fragmented: noise > 0.5, ..SmellLabels::NONE });
        }
        (x, y)
    };
    let (x_train, y_train) = make(400);
    let (x_test, y_test) = make(200);
    let model = train_ovr(&x_train, &y_train, &TrainConfig { lambda: 1e-3, epochs: 30, seed: 7 }).unwrap();
    let determining = permutation_importance(&model, &x_test, &y_test, 0, 10, 7).unwrap();
    let constant = permutation_importance(&model, &x_test, &y_test, 2, 10, 7).unwrap();
    let lazy_drop = determining.delta_f1[Smell::Lazy.index()];
    let elapsed = start.elapsed();
    check(
        lazy_drop >= 0.3 && constant.delta_macro_f1 == 0.0 && constant.delta_f1 == [0.0; 5] && within(elapsed, 30),
        format!(
            "determining feature lazy dF1 {lazy_drop:.3} (need >= 0.3); constant feature dF1 {} ; {elapsed:.2?} (limit 30s)",
            constant.delta_macro_f1
        ),
    )
}

fn token_corpus() -> Corpus {
    const FILLER: [&str; 12] =
        ["returns", "value", "list", "element", "index", "given", "this", "method", "object", "when", "may", "null"];
    const MARKERS: [&str; 5] = ["qzbloat", "qzlazy", "qzstruct", "qztangle", "qzfrag"];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut units = Vec::new();
    let mut labels = Vec::new();
    for i in 0..500 {
        let set = SmellLabels::decode(rng.gen_range(0..32));
        let mut words: Vec<&str> = (0..rng.gen_range(4..10)).map(|_| FILLER[rng.gen_range(0..FILLER.len())]).collect();
        for smell in Smell::ALL {
            if set.get(smell) {
                words.insert(rng.gen_range(0..=words.len()), MARKERS[smell.index()]);
            }
        }
        units.push(DocUnit {
            id: format!("u{i}"),
            package_name: String::new(),
            class_name: String::new(),
            prototype: "public void run()".into(),
            description_html: None,
            description_text: words.join(" "),
        });
        labels.push(set);
    }
    Corpus::new(units, Some(labels)).unwrap()
}

fn c8_separable() -> Outcome {
    let start = Instant::now();
    let corpus = token_corpus();
    let input = CvInput::new(&corpus, &Lexicon::default_english()).unwrap();
    let spec = ModelSpec::Learner(LearnerSpec::Ovr(TrainConfig::default()));
    let report = cross_validate(&input, FeatureKind::bow(), &spec, 5, 42).unwrap();
    let elapsed = start.elapsed();
    check(
        report.macro_f1 >= 0.95 && within(elapsed, 60),
        format!("macro-F1 {:.4} (need >= 0.95) in {elapsed:.2?} (limit 60s)", report.macro_f1),
    )
}

fn benchmark_path() -> PathBuf {
    std::env::var_os("DOCSMELL_BENCHMARK")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/benchmark.jsonl"))
}

fn c9_benchmark() -> Outcome {
    let path = benchmark_path();
    let Ok(file) = File::open(&path) else {
        return Outcome::Skip(format!("no benchmark at {}", path.display()));
    };
    let start = Instant::now();
    let corpus = match parse_jsonl(BufReader::new(file)) {
        Ok(c) => c,
        Err(e) => return Outcome::Fail(format!("cannot read {}: {e}", path.display())),
    };
    let mut notes = Vec::new();
    let mut ok = true;
    let mut record = |name: &str, got: f64, target: f64, tol: f64| {
        let pass = (got - target).abs() <= tol;
        ok &= pass;
        notes.push(format!("{name} {got:.3} (target {target} +/- {tol})"));
    };

    let dist = label_distribution(&corpus).unwrap();
    record("lazy count", dist.count(Smell::Lazy) as f64, 275.0, 0.0);
    record("bloated count", dist.count(Smell::Bloated) as f64, 141.0, 0.0);
    record(">=1 smell", dist.at_least_one() as f64, 778.0, 0.0);

    let input = CvInput::new(&corpus, &Lexicon::default_english()).unwrap();
    let rules = |sel| cross_validate(&input, FeatureKind::Rules, &ModelSpec::rules(sel), 5, 42).unwrap();
    record("Bloated@90P F1", rules(ThresholdSelector::P90).mean.bloated.f1, 0.90, 0.08);
    record("Lazy@25P F1", rules(ThresholdSelector::P25).mean.lazy.f1, 0.95, 0.08);
    let ovr = ModelSpec::Learner(LearnerSpec::Ovr(TrainConfig::default()));
    let report = cross_validate(&input, FeatureKind::Rules, &ovr, 5, 42).unwrap();
    record("OVR rule-feats Bloated F1", report.mean.bloated.f1, 0.88, 0.10);

    let elapsed = start.elapsed();
    ok &= within(elapsed, 600);
    notes.push(format!("{elapsed:.2?} (limit 10min)"));
    check(ok, notes.join("; "))
}
