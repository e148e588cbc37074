//! Acceptance suite. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads 1` to see them
//! in order.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use arsent::classifier::{self, primal_objective, train, train_with_summary, TrainConfig};
use arsent::eval::{
    comparison_grid, generate_synthetic, ngram_grid, render_table, run_experiment, run_grid, ConfusionMatrix,
    EvalReport, ExperimentSpec, Resources, SyntheticSpec,
};
use arsent::features::{apply_negation, extract_ngrams, extract_sentiment_features, SparseRow, TokenRole};
use arsent::lexicon::{build_objective_lexicon, Counting, ObjectiveEntry};
use arsent::textproc::{normalize, preprocess_words, strip_wa_prefix, tokenize, WAW};
use arsent::{
    Corpus, FeatureMode, FeatureSet, FilterList, NegationLexicon, NgramConfig, NormalizationConfig, ObjectiveConfig,
    Polarity, Review, SentimentLexicon, Tendency,
};

fn report(n: u32, name: &str, started: Instant, limit: Duration, ok: bool, detail: &str) {
    let elapsed = started.elapsed();
    let within = elapsed <= limit;
    let verdict = if ok && within { "PASS" } else { "FAIL" };
    println!(
        "criterion {n:>2} {verdict} {name} ({:.2}s, limit {}s) {detail}",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(within, "criterion {n} exceeded its time limit: {elapsed:?}");
}

/// Words that pass through the text pipeline unchanged.
const WORDS: &[&str] = &[
    "بيت", "كتاب", "قلم", "باب", "شمس", "قمر", "بحر", "جبل", "نهر", "سوق", "مطعم", "فندق", "غرفه", "سرير", "طاوله",
    "كرسي", "شارع", "مدينه", "سياره", "طريق", "حديقه", "ملعب", "مكتب", "شباك", "سقف", "درج", "مطبخ", "حمام", "صالون",
    "ممر", "زاويه", "مدخل", "سطح", "حارس", "موظف", "زبون", "صحن", "كاس", "شاي", "قهوه",
];

// ---------------------------------------------------------------------------
// 1. Objective lexicon builder against a brute-force tally

struct RandomCase {
    corpus: Corpus,
    docs: Vec<(Vec<String>, Polarity)>,
    sentiment: BTreeMap<String, Polarity>,
    phrases: Vec<Vec<String>>,
    negation: BTreeSet<String>,
    filter: BTreeSet<String>,
}

fn random_case(rng: &mut ChaCha8Rng) -> RandomCase {
    let vocab_size = rng.gen_range(4..=30);
    let mut vocab: Vec<String> = WORDS.iter().map(|w| w.to_string()).collect();
    vocab.shuffle(rng);
    vocab.truncate(vocab_size);
    let mut roles = vocab.clone();
    roles.shuffle(rng);
    let n_sent = rng.gen_range(0..=vocab_size / 3);
    let n_neg = rng.gen_range(0..=2.min(vocab_size - n_sent - 1));
    let n_filter = rng.gen_range(0..=2.min(vocab_size - n_sent - n_neg - 1));
    let mut it = roles.into_iter();
    let sentiment: BTreeMap<String, Polarity> = (&mut it)
        .take(n_sent)
        .map(|w| {
            let p = if rng.gen_bool(0.5) { Polarity::Positive } else { Polarity::Negative };
            (w, p)
        })
        .collect();
    let negation: BTreeSet<String> = (&mut it).take(n_neg).collect();
    let filter: BTreeSet<String> = (&mut it).take(n_filter).collect();
    let rest: Vec<String> = it.collect();
    let mut phrases = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let len = rng.gen_range(2..=3);
        let p: Vec<String> = (0..len).map(|_| rest.choose(rng).unwrap().clone()).collect();
        if !phrases.contains(&p) {
            phrases.push(p);
        }
    }
    let n_reviews = rng.gen_range(1..=50);
    let mut docs = Vec::new();
    let mut reviews = Vec::new();
    for i in 0..n_reviews {
        let len = rng.gen_range(1..=15);
        let mut toks: Vec<String> = Vec::new();
        while toks.len() < len {
            if !phrases.is_empty() && rng.gen_bool(0.15) {
                toks.extend(phrases.choose(rng).unwrap().iter().cloned());
            } else {
                toks.push(vocab.choose(rng).unwrap().clone());
            }
        }
        let label = if rng.gen_bool(0.5) { Polarity::Positive } else { Polarity::Negative };
        reviews.push(Review::new(format!("r{i}"), toks.join(" "), label));
        docs.push((toks, label));
    }
    RandomCase {
        corpus: Corpus::new("random", reviews).unwrap(),
        docs,
        sentiment,
        phrases,
        negation,
        filter,
    }
}

/// Longest-first, left-to-right phrase removal.
fn oracle_residual(toks: &[String], phrases: &[Vec<String>]) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < toks.len() {
        for len in (2..=3).rev() {
            if i + len <= toks.len() && phrases.iter().any(|p| p.as_slice() == &toks[i..i + len]) {
                i += len;
                continue 'outer;
            }
        }
        out.push(toks[i].clone());
        i += 1;
    }
    out
}

fn oracle_tally(case: &RandomCase, documents: bool) -> BTreeMap<String, (u64, u64)> {
    let mut tally: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for (toks, label) in &case.docs {
        let mut seen = HashSet::new();
        for w in oracle_residual(toks, &case.phrases) {
            if case.sentiment.contains_key(&w) || case.negation.contains(&w) || case.filter.contains(&w) {
                continue;
            }
            if documents && !seen.insert(w.clone()) {
                continue;
            }
            let e = tally.entry(w).or_default();
            match label {
                Polarity::Positive => e.0 += 1,
                Polarity::Negative => e.1 += 1,
            }
        }
    }
    tally
}

#[test]
fn criterion_01_tendency_builder_matches_brute_force() {
    let started = Instant::now();
    let norm = NormalizationConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = Vec::new();
    for case_no in 0..100 {
        let case = random_case(&mut rng);
        let entries = case
            .sentiment
            .iter()
            .map(|(w, p)| (w.clone(), *p))
            .chain(case.phrases.iter().map(|p| {
                let pol = if rng.gen_bool(0.5) { Polarity::Positive } else { Polarity::Negative };
                (p.join(" "), pol)
            }));
        let slex = SentimentLexicon::from_entries(entries, &norm).unwrap();
        let nlex = NegationLexicon::from_terms(&case.negation, &norm).unwrap();
        let filter = FilterList::from_terms(&case.filter, &norm).unwrap();
        let documents = case_no % 4 == 3;
        let cfg = ObjectiveConfig {
            threshold: [0.6, 0.55, 0.75, 1.0][case_no % 4],
            min_count: [1, 1, 2, 3][case_no % 4],
            counting: if documents { Counting::Documents } else { Counting::Occurrences },
        };
        let olex = build_objective_lexicon(&case.corpus, &slex, &nlex, &filter, &cfg, &norm).unwrap();
        let expected = oracle_tally(&case, documents);
        let got: BTreeMap<String, (u64, u64)> = olex.entries().map(|e| (e.word.clone(), (e.n_pos, e.n_neg))).collect();
        if got != expected {
            mismatches.push(format!("case {case_no}: counts differ"));
            continue;
        }
        for e in olex.entries() {
            let (p, n) = expected[&e.word];
            let total = p + n;
            let pt = p as f64 / total as f64;
            let nt = n as f64 / total as f64;
            let want = if total < cfg.min_count {
                Tendency::Neutral
            } else if pt >= cfg.threshold {
                Tendency::Positive
            } else if nt >= cfg.threshold {
                Tendency::Negative
            } else {
                Tendency::Neutral
            };
            if e.n_total != total || (e.pt - pt).abs() > 1e-12 || (e.nt - nt).abs() > 1e-12 || e.tendency != want {
                mismatches.push(format!("case {case_no}: entry {}", e.word));
            }
        }
    }

    // Six positive and five negative occurrences.
    let mut reviews = Vec::new();
    for i in 0..11 {
        let label = if i < 6 { Polarity::Positive } else { Polarity::Negative };
        reviews.push(Review::new(format!("w{i}"), "الموقع بعيد", label));
    }
    let corpus = Corpus::new("worked", reviews).unwrap();
    let slex = SentimentLexicon::from_entries([("بعيد", Polarity::Negative)], &norm).unwrap();
    let olex = build_objective_lexicon(
        &corpus,
        &slex,
        &NegationLexicon::new(),
        &FilterList::new(),
        &ObjectiveConfig::default(),
        &norm,
    )
    .unwrap();
    let e = olex.get("الموقع").unwrap();
    let worked_ok = e.n_pos == 6
        && e.n_neg == 5
        && e.n_total == 11
        && e.pt == 6.0 / 11.0
        && (e.pt * 100.0).trunc() / 100.0 == 0.54
        && e.tendency == Tendency::Neutral;
    if !worked_ok {
        mismatches.push(format!("worked example: {e:?}"));
    }
    report(
        1,
        "objective lexicon equals brute-force tally on 100 random corpora",
        started,
        Duration::from_secs(10),
        mismatches.is_empty(),
        &format!("{} mismatches {:?}", mismatches.len(), mismatches.first()),
    );
}

// ---------------------------------------------------------------------------
// 2. Threshold boundary

#[test]
fn criterion_02_threshold_boundary_exhaustive() {
    let started = Instant::now();
    let cfg = ObjectiveConfig::default();
    let mut bad = Vec::new();
    let mut exact_hits = 0;
    for total in 1u64..=25 {
        for n_pos in 0..=total {
            let n_neg = total - n_pos;
            // pt >= 3/5 in exact integer arithmetic.
            let want = if 5 * n_pos >= 3 * total {
                Tendency::Positive
            } else if 5 * n_neg >= 3 * total {
                Tendency::Negative
            } else {
                Tendency::Neutral
            };
            if 5 * n_pos == 3 * total {
                exact_hits += 1;
            }
            let e = ObjectiveEntry::from_counts("w", n_pos, n_neg, &cfg);
            if e.tendency != want {
                bad.push((n_pos, n_neg));
            }
        }
    }
    let direct = Tendency::classify(0.6, 0.4, 0.6) == Tendency::Positive
        && Tendency::classify(0.599, 0.401, 0.6) == Tendency::Neutral
        && Tendency::classify(0.4, 0.6, 0.6) == Tendency::Negative;
    report(
        2,
        "pt = 0.6 is positive, 0.599 neutral, all pairs with n <= 25",
        started,
        Duration::from_secs(1),
        bad.is_empty() && direct && exact_hits == 5,
        &format!("mismatched pairs {bad:?}, exact boundary pairs {exact_hits}"),
    );
}

// ---------------------------------------------------------------------------
// 3. Negation over every layout

#[derive(Clone, Copy, PartialEq, Debug)]
enum Sym {
    Neg,
    PosWord,
    NegWord,
    Filler,
}

#[test]
fn criterion_03_negation_exhaustive_layouts() {
    let started = Instant::now();
    let norm = NormalizationConfig::default();
    let (neg, pos_w, neg_w, filler) = ("ما", "حلو", "سيء", "بيت");
    let slex = SentimentLexicon::from_entries([(pos_w, Polarity::Positive), (neg_w, Polarity::Negative)], &norm).unwrap();
    let nlex = NegationLexicon::from_terms([neg], &norm).unwrap();
    let alphabet = [Sym::Neg, Sym::PosWord, Sym::NegWord, Sym::Filler];
    let mut layouts = 0;
    let mut mismatches = 0;
    for len in 0..=6u32 {
        for code in 0..4usize.pow(len) {
            let mut c = code;
            let layout: Vec<Sym> = (0..len)
                .map(|_| {
                    let s = alphabet[c % 4];
                    c /= 4;
                    s
                })
                .collect();
            layouts += 1;
            let tokens: Vec<&str> = layout
                .iter()
                .map(|s| match s {
                    Sym::Neg => neg,
                    Sym::PosWord => pos_w,
                    Sym::NegWord => neg_w,
                    Sym::Filler => filler,
                })
                .collect();
            // A sentiment word flips iff a negation word sits 1 to 3 places before it.
            let expected: Vec<Option<Polarity>> = (0..layout.len())
                .map(|j| {
                    let prior = match layout[j] {
                        Sym::PosWord => Polarity::Positive,
                        Sym::NegWord => Polarity::Negative,
                        _ => return None,
                    };
                    let negated = (j.saturating_sub(3)..j).any(|i| layout[i] == Sym::Neg);
                    Some(if negated { prior.flipped() } else { prior })
                })
                .collect();
            let got: Vec<Option<Polarity>> = apply_negation(&tokens, &slex, &nlex)
                .into_iter()
                .map(|t| match t.role {
                    TokenRole::Sentiment { effective, .. } => Some(effective),
                    _ => None,
                })
                .collect();
            let f = extract_sentiment_features(&tokens, &slex, None, &nlex);
            let count = |p| expected.iter().filter(|e| **e == Some(p)).count() as u32;
            let negs = layout.iter().filter(|s| **s == Sym::Neg).count() as u32;
            if got != expected
                || f.pow != count(Polarity::Positive)
                || f.ngw != count(Polarity::Negative)
                || f.negw != negs
                || f.lr != len
            {
                mismatches += 1;
            }
        }
    }
    report(
        3,
        "negation scope of three following tokens",
        started,
        Duration::from_secs(5),
        mismatches == 0 && layouts == 5461,
        &format!("{layouts} layouts, {mismatches} mismatches"),
    );
}

// ---------------------------------------------------------------------------
// 4. N-gram extraction

#[test]
fn criterion_04_ngrams_match_sliding_window() {
    let started = Instant::now();
    let mut runner = TestRunner::new(PropConfig {
        cases: 1000,
        failure_persistence: None,
        ..PropConfig::default()
    });
    let strategy = (
        proptest::collection::vec(proptest::sample::select(vec!["ا", "ب", "بب", "تا", "ثلج"]), 0..30),
        proptest::collection::btree_set(1usize..=4, 1..=4),
    );
    let result = runner.run(&strategy, |(tokens, orders)| {
        let cfg = NgramConfig::new(orders.iter().copied()).unwrap();
        let got = extract_ngrams(&tokens, &cfg);
        let mut want: BTreeMap<String, u32> = BTreeMap::new();
        for &n in &orders {
            if tokens.len() >= n {
                for i in 0..=tokens.len() - n {
                    *want.entry(format!("{n}:{}", tokens[i..i + n].join("_"))).or_default() += 1;
                }
            }
        }
        prop_assert_eq!(&got, &want);
        for &n in &orders {
            let sum: u32 = got
                .iter()
                .filter(|(k, _)| k.starts_with(&format!("{n}:")))
                .map(|(_, v)| *v)
                .sum();
            prop_assert_eq!(sum as usize, (tokens.len() + 1).saturating_sub(n));
        }
        Ok(())
    });
    report(
        4,
        "n-gram counts equal brute-force sliding window on 1000 cases",
        started,
        Duration::from_secs(10),
        result.is_ok(),
        &format!("{:?}", result.err()),
    );
}

// ---------------------------------------------------------------------------
// 5. SVM trainer

fn rows(points: &[Vec<f64>]) -> Vec<SparseRow> {
    points.iter().map(|p| SparseRow::from_dense(p)).collect()
}

fn train_accuracy(x: &[SparseRow], y: &[Polarity], cfg: &TrainConfig) -> f64 {
    let m = train(x, y, None, cfg).unwrap();
    let ok = x.iter().zip(y).filter(|(r, l)| m.predict(r).unwrap() == **l).count();
    ok as f64 / x.len() as f64
}

/// Reference minimizer: accelerated projected gradient on the dual box QP,
/// with the bias as a constant feature. Returns `(primal, dual)`.
fn reference_objective(x: &[Vec<f64>], y: &[f64], c: f64) -> (f64, f64) {
    let n = x.len();
    let aug: Vec<Vec<f64>> = x.iter().map(|r| r.iter().copied().chain([1.0]).collect()).collect();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| y[i] * y[j] * aug[i].iter().zip(&aug[j]).map(|(a, b)| a * b).sum::<f64>())
                .collect()
        })
        .collect();
    let mut v = vec![1.0; n];
    let mut lip = 1.0;
    for _ in 0..200 {
        let qv: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q[i][j] * v[j]).sum()).collect();
        let norm = qv.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        lip = norm / v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v = qv.iter().map(|a| a / norm).collect();
    }
    let lip = lip * 1.05 + 1e-12;
    let objective = |alpha: &[f64]| -> (f64, f64) {
        let d = aug[0].len();
        let mut w = vec![0.0; d];
        for i in 0..n {
            for k in 0..d {
                w[k] += alpha[i] * y[i] * aug[i][k];
            }
        }
        let norm_sq: f64 = w.iter().map(|a| a * a).sum();
        let hinge: f64 = (0..n)
            .map(|i| (1.0 - y[i] * aug[i].iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()).max(0.0))
            .sum();
        (0.5 * norm_sq + c * hinge, alpha.iter().sum::<f64>() - 0.5 * norm_sq)
    };
    let mut alpha = vec![0.0; n];
    let mut z = alpha.clone();
    let mut t = 1.0f64;
    let mut best = (f64::INFINITY, f64::NEG_INFINITY);
    for it in 0..200_000 {
        let grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q[i][j] * z[j]).sum::<f64>() - 1.0).collect();
        let next: Vec<f64> = (0..n).map(|i| (z[i] - grad[i] / lip).clamp(0.0, c)).collect();
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = (0..n).map(|i| next[i] + (t - 1.0) / t_next * (next[i] - alpha[i])).collect();
        alpha = next;
        t = t_next;
        if it % 100 == 0 {
            let (p, d) = objective(&alpha);
            best = (best.0.min(p), best.1.max(d));
            if best.0 - best.1 <= 1e-9 * best.0.abs() {
                break;
            }
        }
    }
    best
}

#[test]
fn criterion_05_svm_trainer() {
    use Polarity::{Negative as N, Positive as P};
    let started = Instant::now();
    let cfg = TrainConfig::default();
    let mut notes = Vec::new();

    let x1 = rows(&[vec![-3.0], vec![-2.0], vec![-1.0], vec![1.0], vec![2.0], vec![3.0]]);
    let y1 = [N, N, N, P, P, P];
    let x2 = rows(&[
        vec![2.0, 1.0],
        vec![1.0, 3.0],
        vec![3.0, 2.0],
        vec![2.5, 0.5],
        vec![-1.0, -2.0],
        vec![-2.0, -1.0],
        vec![-3.0, 0.0],
        vec![0.0, -3.0],
    ]);
    let y2 = [P, P, P, P, N, N, N, N];
    let sep = (train_accuracy(&x1, &y1, &cfg), train_accuracy(&x2, &y2, &cfg));
    let separable_ok = sep == (1.0, 1.0);
    notes.push(format!("separable train acc {sep:?}"));

    let xor = rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
    let xor_acc = train_accuracy(&xor, &[P, P, N, N], &cfg);
    let xor_ok = xor_acc <= 0.75;
    notes.push(format!("xor acc {xor_acc}"));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for inst in 0..30 {
        let n = rng.gen_range(6..=30);
        let d = rng.gen_range(1..=5);
        let c = [0.1, 1.0, 10.0][inst % 3];
        let truth: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let s: f64 = p.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>() + rng.gen_range(-0.5..0.5);
            let label = if i == 0 {
                P
            } else if i == 1 {
                N
            } else if s >= 0.0 {
                P
            } else {
                N
            };
            pts.push(p);
            labels.push(label);
        }
        let x = rows(&pts);
        let ys: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
        let tc = TrainConfig {
            c,
            seed: inst as u64,
            ..TrainConfig::default()
        };
        let m = train(&x, &labels, None, &tc).unwrap();
        let ours = primal_objective(&m.weights, m.bias, &x, &labels, c);
        let (p_ref, d_ref) = reference_objective(&pts, &ys, c);
        let rel = (ours - p_ref).abs() / p_ref;
        worst = worst.max(rel);
        if ours < d_ref - 1e-9 * d_ref.abs() {
            notes.push(format!("instance {inst} below the dual bound"));
            worst = f64::INFINITY;
        }
    }
    let optimum_ok = worst <= 1e-3;
    notes.push(format!("worst relative primal gap {worst:.2e}"));

    let x = rows(&(0..40).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()]).collect::<Vec<_>>());
    let y: Vec<Polarity> = (0..40).map(|i| if (i * 7) % 5 < 2 { P } else { N }).collect();
    let (a, sa) = train_with_summary(&x, &y, None, &cfg).unwrap();
    let (b, sb) = train_with_summary(&x, &y, None, &cfg).unwrap();
    let bits = |m: &classifier::LinearModel| m.weights.iter().chain([&m.bias]).map(|v| v.to_bits()).collect::<Vec<_>>();
    let determinism_ok = bits(&a) == bits(&b) && sa.primal_history == sb.primal_history;
    notes.push(format!("deterministic {determinism_ok}"));

    report(
        5,
        "SVM separable/xor/optimality/determinism",
        started,
        Duration::from_secs(60),
        separable_ok && xor_ok && optimum_ok && determinism_ok,
        &notes.join(", "),
    );
}

// ---------------------------------------------------------------------------
// 6. Metric identities

fn same(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

#[test]
fn criterion_06_metric_identities() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for k in 0..1000 {
        let hi = if k % 10 == 0 { 3 } else { 1000 };
        let (tp, tn, fp, fn_) = (
            rng.gen_range(0..hi),
            rng.gen_range(0..hi),
            rng.gen_range(0..hi),
            rng.gen_range(0..hi),
        );
        let m = ConfusionMatrix::new(tp, tn, fp, fn_);
        let r = EvalReport::from_matrix("m", "f", m);
        let div = |a: u64, b: u64| if b == 0 { f64::NAN } else { a as f64 / b as f64 };
        let ok = m.total() == tp + tn + fp + fn_
            && same(r.accuracy, div(tp + tn, tp + tn + fp + fn_))
            && same(r.precision, div(tp, tp + fp))
            && same(r.recall, div(tp, tp + fn_));
        if !ok {
            bad += 1;
        }
    }
    let w = EvalReport::from_matrix("worked", "f", ConfusionMatrix::new(90, 89, 10, 11));
    let worked = w.accuracy == 0.895 && w.precision == 0.9 && (w.recall - 0.891).abs() <= 0.001;
    report(
        6,
        "accuracy, precision and recall identities on 1000 matrices",
        started,
        Duration::from_secs(10),
        bad == 0 && worked,
        &format!("{bad} mismatches, worked case ({}, {}, {:.4})", w.accuracy, w.precision, w.recall),
    );
}

// ---------------------------------------------------------------------------
// 7. Directional gains on synthetic corpora

const SIGNAL: f64 = 0.25;

fn synthetic(seed: u64, objective_share: f64) -> (Corpus, Resources, f64) {
    let data = generate_synthetic(&SyntheticSpec {
        n_reviews: 2000,
        seed,
        sentiment_rate: SIGNAL * (1.0 - objective_share),
        objective_rate: SIGNAL * objective_share,
        ..SyntheticSpec::default()
    })
    .unwrap();
    let lens: usize = data.corpus.iter().map(|r| r.text.split(' ').count()).sum();
    let mean_len = lens as f64 / data.corpus.len() as f64;
    let res = Resources {
        sentiment: Some(data.sentiment),
        negation: Some(data.negation),
        filter: None,
    };
    (data.corpus, res, mean_len)
}

fn base_spec(seed: u64) -> ExperimentSpec {
    let mut s = ExperimentSpec::new("base", FeatureSet::new(FeatureMode::Proposed, None));
    s.split.seed = seed;
    s.train.seed = seed;
    s
}

/// Wins of `better` over `worse` in held-out accuracy, and mean gain in points.
fn compare(pairs: &[(f64, f64)]) -> (usize, f64) {
    let wins = pairs.iter().filter(|(b, w)| b > w).count();
    let mean = 100.0 * pairs.iter().map(|(b, w)| b - w).sum::<f64>() / pairs.len() as f64;
    (wins, mean)
}

#[test]
fn criterion_07_directional_gains() {
    let started = Instant::now();
    let mut tendency_pairs = Vec::new();
    let mut sentiment_pairs = Vec::new();
    let mut lens = Vec::new();
    for seed in 0..10 {
        let (corpus, res, mean_len) = synthetic(seed, 0.4);
        lens.push(mean_len);
        let specs = comparison_grid(&base_spec(seed));
        let out = run_grid(&specs[1..], &corpus, &res).unwrap();
        let (b2, prop) = (out[0].report.accuracy, out[1].report.accuracy);
        tendency_pairs.push((prop, b2));

        let (corpus, res, _) = synthetic(seed, 0.0);
        let out = run_grid(&specs[..2], &corpus, &res).unwrap();
        let (b1, b2) = (out[0].report.accuracy, out[1].report.accuracy);
        sentiment_pairs.push((b2, b1));
        println!(
            "  seed {seed}: objective planting baseline2 {:.2} proposed {:.2}; sentiment planting baseline1 {:.2} baseline2 {:.2}",
            100.0 * tendency_pairs[seed as usize].1,
            100.0 * tendency_pairs[seed as usize].0,
            100.0 * b1,
            100.0 * b2
        );
    }
    let (tw, tg) = compare(&tendency_pairs);
    let (sw, sg) = compare(&sentiment_pairs);
    let mean_len = lens.iter().sum::<f64>() / lens.len() as f64;
    report(
        7,
        "proposed beats baseline2, baseline2 beats baseline1",
        started,
        Duration::from_secs(300),
        tw >= 8 && tg > 1.0 && sw >= 8 && sg > 1.0 && (mean_len - 23.0).abs() < 1.0,
        &format!(
            "tendency wins {tw}/10 mean {tg:+.2} pts; sentiment wins {sw}/10 mean {sg:+.2} pts; mean length {mean_len:.2}"
        ),
    );
}

// ---------------------------------------------------------------------------
// 8. N-gram grid

fn table_is_well_formed(table: &str, names: &[String]) -> bool {
    let lines: Vec<&str> = table.lines().collect();
    if lines.len() != names.len() + 2 {
        return false;
    }
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    if header != ["Experiment", "Accuracy", "Precision", "Recall", "ΔAccuracy"] {
        return false;
    }
    if !lines[1].chars().all(|c| c == '-' || c == ' ') {
        return false;
    }
    let width = lines[0].chars().count();
    names.iter().zip(&lines[2..]).all(|(name, line)| {
        let Some(rest) = line.strip_prefix(name.as_str()) else {
            return false;
        };
        let cells: Vec<&str> = rest.split_whitespace().collect();
        let two_decimals = |s: &str| {
            s.split_once('.').is_some_and(|(a, b)| {
                b.len() == 2 && a.trim_start_matches(['+', '-']).chars().all(|c| c.is_ascii_digit())
            })
        };
        line.chars().count() == width
            && cells.len() == 4
            && cells[..3].iter().all(|c| two_decimals(c) && c.parse::<f64>().is_ok_and(|v| (0.0..=100.0).contains(&v)))
            && (cells[3].starts_with('+') || cells[3].starts_with('-'))
            && two_decimals(cells[3])
    })
}

#[test]
fn criterion_08_ngram_grid() {
    let started = Instant::now();
    let (corpus, res, _) = synthetic(0, 0.4);
    let grid = ngram_grid(&base_spec(0));
    let out = run_grid(&grid, &corpus, &res).unwrap();
    let reports: Vec<EvalReport> = out.iter().map(|o| o.report.clone()).collect();
    let table = render_table(&reports);
    println!("{table}");
    let names: Vec<String> = grid.iter().map(|s| s.name.clone()).collect();
    let formatted = table_is_well_formed(&table, &names);
    let orders: Vec<Vec<usize>> = grid
        .iter()
        .map(|s| s.features.ngrams.as_ref().unwrap().orders().to_vec())
        .collect();
    let rows_ok = orders == [vec![1], vec![2], vec![3], vec![1, 2], vec![1, 2, 3], vec![1, 2, 3, 4]];

    let mut diffs = Vec::new();
    for seed in 0..10 {
        let (corpus, res, _) = synthetic(seed, 0.4);
        let g = ngram_grid(&base_spec(seed));
        let pair = [g[4].clone(), g[5].clone()];
        let out = run_grid(&pair, &corpus, &res).unwrap();
        let d = 100.0 * (out[1].report.accuracy - out[0].report.accuracy);
        println!(
            "  seed {seed}: ngrams[1,2,3] {:.2} ngrams[1,2,3,4] {:.2} diff {d:+.2}",
            100.0 * out[0].report.accuracy,
            100.0 * out[1].report.accuracy
        );
        diffs.push(d);
    }
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    report(
        8,
        "n-gram grid runs, table well formed, 4-grams add nothing",
        started,
        Duration::from_secs(300),
        formatted && rows_ok && mean.abs() <= 1.0,
        &format!("table ok {formatted}, mean accuracy change from 4-grams {mean:+.2} pts"),
    );
}

// ---------------------------------------------------------------------------
// 9. End-to-end determinism through the command line

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = arsent::cli::run_with_io(std::iter::once("arsent").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn criterion_09_experiment_rerun_is_byte_identical() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (code, _, err) = cli(&["synth", "--out", &p("corpus.jsonl"), "--lexicon-dir", &p("lex"), "--reviews", "600", "--seed", "9"]);
    assert_eq!(code, 0, "{err}");
    let first = cli(&[
        "experiment",
        "--corpus",
        &p("corpus.jsonl"),
        "--sentiment",
        &p("lex/sentiment.tsv"),
        "--negation",
        &p("lex/negation.txt"),
        "--grid",
        "comparison",
        "--seed",
        "3",
        "--out-dir",
        &p("run1"),
    ]);
    assert_eq!(first.0, 0, "{}", first.2);
    let rerun = cli(&["experiment", "--manifest", &p("run1/manifest.json"), "--out-dir", &p("run2")]);
    assert_eq!(rerun.0, 0, "{}", rerun.2);
    let again = cli(&["experiment", "--manifest", &p("run1/manifest.json"), "--out-dir", &p("run3")]);
    let read = |f: &str| std::fs::read(p(f)).unwrap();
    let mut identical = first.1 == rerun.1 && rerun.1 == again.1;
    for f in ["report.txt", "report.jsonl", "manifest.json"] {
        identical &= read(&format!("run1/{f}")) == read(&format!("run2/{f}"));
        identical &= read(&format!("run1/{f}")) == read(&format!("run3/{f}"));
    }
    let one_spec = base_spec(3);
    let (corpus, res, _) = synthetic(4, 0.4);
    let r1 = run_experiment(&one_spec, &corpus, &res).unwrap();
    let r2 = run_experiment(&one_spec, &corpus, &res).unwrap();
    identical &= r1.report == r2.report && r1.record == r2.record;
    report(
        9,
        "experiment rerun from manifest reproduces reports byte for byte",
        started,
        Duration::from_secs(120),
        identical,
        &format!("stdout {} bytes", first.1.len()),
    );
}

// ---------------------------------------------------------------------------
// 10. Text normalization properties

fn arabic_string() -> impl Strategy<Value = String> {
    let ch = prop_oneof![
        8 => (0x0621u32..=0x064A).prop_map(|c| char::from_u32(c).unwrap()),
        2 => (0x064Bu32..=0x0652).prop_map(|c| char::from_u32(c).unwrap()),
        3 => Just(' '),
        3 => Just(WAW),
        1 => Just('\u{0640}'),
        1 => proptest::sample::select(vec!['!', '؟', '.', '1', '٣', 'a', 'Z', '😀', '\u{0670}', '\u{06C1}']),
    ];
    proptest::collection::vec(ch, 0..40).prop_map(|v| v.into_iter().collect())
}

#[test]
fn criterion_10_textproc_properties() {
    let started = Instant::now();
    let cfg = NormalizationConfig::default();
    let mut runner = TestRunner::new(PropConfig {
        cases: 10_000,
        failure_persistence: None,
        ..PropConfig::default()
    });
    let result = runner.run(&arabic_string(), |s| {
        let once = normalize(&s, &cfg);
        prop_assert_eq!(normalize(&once, &cfg), once.clone());
        for tok in tokenize(&once) {
            let before: String = tok.surface.clone();
            let n = before.chars().count();
            let after = strip_wa_prefix(tok, &cfg).surface;
            if before.starts_with(WAW) && n >= cfg.wa_min_len {
                prop_assert_eq!(after.chars().count(), n - 1);
                prop_assert_eq!(&after, &before[WAW.len_utf8()..]);
            } else {
                prop_assert_eq!(&after, &before);
            }
        }
        Ok(())
    });
    let worked = preprocess_words("جمييييل", &cfg) == ["جميل"]
        && preprocess_words("أكل", &cfg) == ["اكل"]
        && preprocess_words("وحلوه", &cfg) == ["حلوه"];
    report(
        10,
        "normalization idempotent, wa-strip length guard, worked examples",
        started,
        Duration::from_secs(60),
        result.is_ok() && worked,
        &format!("{:?}", result.err()),
    );
}
