//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line for its
//! criterion; run with `--nocapture` to see them.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topicforge::corpus::{Corpus, TokenizedDocument, Vocabulary};
use topicforge::eval::{
    coherence_sd, cooccurrence_counts, model_nmi, nmi, topic_coherence_co, Clustering,
    CoherenceReport,
};
use topicforge::lda::{train, CountTables, GibbsSampler, LdaHyperparams};
use topicforge::report::{render_tables, SweepRow, TableFormat};
use topicforge::synthetic::{generate, SyntheticSpec, WordWeights};

fn verdict(id: u32, what: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id}: {what} ({detail})");
    assert!(pass, "criterion {id} failed: {what} ({detail})");
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topicforge"))
}

// Brute-force NMI: clusters as explicit document sets, contingency cells by
// set intersection, and the textbook formulas with log2.
fn oracle_nmi(x: &[u32], y: &[u32]) -> f64 {
    let n = x.len() as f64;
    let sets = |labels: &[u32]| -> Vec<BTreeSet<usize>> {
        let ids: BTreeSet<u32> = labels.iter().copied().collect();
        ids.into_iter()
            .map(|c| (0..labels.len()).filter(|&d| labels[d] == c).collect())
            .collect()
    };
    let (xs, ys) = (sets(x), sets(y));
    let h = |s: &[BTreeSet<usize>]| -> f64 {
        -s.iter()
            .map(|c| {
                let p = c.len() as f64 / n;
                p * p.log2()
            })
            .sum::<f64>()
    };
    let mut mi = 0.0;
    for xi in &xs {
        for yj in &ys {
            let joint = xi.intersection(yj).count();
            if joint == 0 {
                continue;
            }
            let pxy = joint as f64 / n;
            let px = xi.len() as f64 / n;
            let py = yj.len() as f64 / n;
            mi += pxy * (pxy / (px * py)).log2();
        }
    }
    let (hx, hy) = (h(&xs), h(&ys));
    if hx + hy == 0.0 {
        1.0
    } else {
        2.0 * mi / (hx + hy)
    }
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    let k = rng.random_range(1..=n.min(8) as u32);
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

#[test]
fn criterion_1_nmi_matches_contingency_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=50);
        let x = random_partition(&mut rng, n);
        let y = random_partition(&mut rng, n);
        let got = nmi(
            &Clustering::from_labels(x.clone()),
            &Clustering::from_labels(y.clone()),
        )
        .unwrap();
        worst = worst.max((got - oracle_nmi(&x, &y)).abs());
    }
    let hand = nmi(
        &Clustering::from_labels(vec![0, 0, 0, 1]),
        &Clustering::from_labels(vec![0, 0, 1, 1]),
    )
    .unwrap();
    // 2 * 0.311278 / (0.811278 + 1.0) evaluates to 0.343711
    let hand_ok = (hand - 0.343711).abs() <= 1e-6;
    let elapsed = start.elapsed();
    verdict(
        1,
        "NMI oracle equivalence",
        worst <= 1e-12 && hand_ok && elapsed < Duration::from_secs(5),
        &format!("max |diff| {worst:.2e} over 200 pairs, hand case {hand:.6}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_nmi_endpoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ok = true;
    for _ in 0..100 {
        let n = rng.random_range(2..=50);
        let x = random_partition(&mut rng, n);
        if x.iter().all(|&l| l == x[0]) {
            continue;
        }
        let c = Clustering::from_labels(x);
        ok &= nmi(&c, &c).unwrap() == 1.0;
    }
    // product partitions: every (row, column) cell has the same count
    for (a, b, m) in [(2, 2, 1), (3, 4, 2), (5, 2, 3)] {
        let n = a * b * m;
        let x: Vec<u32> = (0..n).map(|i| ((i / m) / b) as u32).collect();
        let y: Vec<u32> = (0..n).map(|i| ((i / m) % b) as u32).collect();
        ok &= nmi(&Clustering::from_labels(x), &Clustering::from_labels(y)).unwrap() == 0.0;
    }
    verdict(
        2,
        "NMI endpoints exactly 1 and 0",
        ok,
        "identical and independent partitions",
    );
}

fn random_corpus(rng: &mut ChaCha8Rng) -> Corpus {
    let v = rng.random_range(2..=30);
    let num_docs = rng.random_range(1..=100);
    let docs = (0..num_docs)
        .map(|d| TokenizedDocument {
            id: format!("d{d}"),
            tokens: (0..rng.random_range(1..=12))
                .map(|_| rng.random_range(0..v))
                .collect(),
        })
        .collect();
    // words that never occur would violate the vocabulary invariant, so
    // re-index over the words actually used
    let docs: Vec<TokenizedDocument> = docs;
    let used: BTreeSet<u32> = docs.iter().flat_map(|d| d.tokens.iter().copied()).collect();
    let remap: std::collections::HashMap<u32, u32> = used
        .iter()
        .enumerate()
        .map(|(i, &w)| (w, i as u32))
        .collect();
    let docs = docs
        .into_iter()
        .map(|d| TokenizedDocument {
            tokens: d.tokens.iter().map(|t| remap[t]).collect(),
            id: d.id,
        })
        .collect();
    let vocab = Vocabulary::from_words((0..used.len()).map(|i| format!("w{i}")).collect()).unwrap();
    Corpus::from_encoded(vocab, docs, Vec::new(), 1).unwrap()
}

fn oracle_co(corpus: &Corpus, words: &[u32]) -> f64 {
    let contains = |d: &TokenizedDocument, w: u32| d.tokens.contains(&w);
    let mut co = 0.0;
    for m in 1..words.len() {
        for l in 0..m {
            let both = corpus
                .docs()
                .iter()
                .filter(|d| contains(d, words[m]) && contains(d, words[l]))
                .count();
            let single = corpus
                .docs()
                .iter()
                .filter(|d| contains(d, words[l]))
                .count();
            co += ((both as f64 + 1.0) / single as f64).ln();
        }
    }
    co
}

#[test]
fn criterion_3_coherence_matches_document_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut exact = true;
    let mut formula_ok = true;
    for _ in 0..100 {
        let corpus = random_corpus(&mut rng);
        let v = corpus.vocab_size() as u32;
        let m = rng.random_range(1..=v.min(10));
        let mut words: Vec<u32> = (0..v).collect();
        for i in 0..m as usize {
            let j = rng.random_range(i..v as usize);
            words.swap(i, j);
        }
        words.truncate(m as usize);
        let counts = cooccurrence_counts(&corpus, &words).unwrap();
        exact &= topic_coherence_co(&words, &counts).unwrap() == oracle_co(&corpus, &words);

        let n_topics = rng.random_range(1..=6);
        let co: Vec<f64> = (0..n_topics).map(|_| rng.random_range(-8.0..4.0)).collect();
        let sizes: Vec<usize> = (0..n_topics).map(|_| rng.random_range(1..=10)).collect();
        let sets = sizes.iter().map(|&s| vec![String::new(); s]).collect();
        let r = CoherenceReport::from_topic_scores(10, co.clone(), sets);
        let col: Vec<f64> = co.iter().zip(&sizes).map(|(c, &s)| c / s as f64).collect();
        let nf = n_topics as f64;
        let mean = col.iter().sum::<f64>() / nf;
        let sd = (col.iter().map(|c| c * c).sum::<f64>() / nf - mean * mean)
            .abs()
            .sqrt();
        formula_ok &= r.per_topic_col == col
            && (r.mean_col - mean).abs() < 1e-12
            && (r.sd - sd).abs() < 1e-12;
    }
    let sd_hand = coherence_sd(&[0.0, 2.0]);
    let elapsed = start.elapsed();
    verdict(
        3,
        "coherence oracle equivalence",
        exact && formula_ok && sd_hand == 1.0 && elapsed < Duration::from_secs(5),
        &format!(
            "100 corpora exact={exact}, Col/SD={formula_ok}, sd([0,2])={sd_hand}, {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_4_gibbs_count_invariants() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let v = 60u32;
    let mut docs = Vec::new();
    let mut remaining = 1000usize;
    while remaining > 0 {
        let len = rng.random_range(1..=15).min(remaining);
        remaining -= len;
        docs.push(TokenizedDocument {
            id: format!("f{}", docs.len()),
            tokens: (0..len).map(|_| rng.random_range(0..v)).collect(),
        });
    }
    let vocab = Vocabulary::from_words((0..v).map(|i| format!("w{i}")).collect()).unwrap();
    let corpus = Corpus::from_encoded(vocab, docs, Vec::new(), 1).unwrap();
    assert_eq!(corpus.num_tokens(), 1000);

    let mut tokens = Vec::new();
    let mut offsets = vec![0];
    for d in corpus.docs() {
        tokens.extend_from_slice(&d.tokens);
        offsets.push(tokens.len());
    }

    let hp = LdaHyperparams {
        iterations: 200,
        seed: 44,
        ..LdaHyperparams::new(7)
    };
    let mut sampler = GibbsSampler::new(&corpus, &hp).unwrap();
    let mut ok = true;
    for _ in 0..hp.iterations {
        sampler.sweep();
        let m = sampler.model();
        for d in 0..m.num_docs() {
            let s: u32 = (0..7).map(|k| m.doc_topic_count(d, k)).sum();
            ok &= s as usize == m.doc_tokens(d).unwrap().len();
        }
        for k in 0..7 {
            let s: u32 = (0..v).map(|w| m.topic_word_count(k, w)).sum();
            ok &= s == m.topic_total(k);
        }
        ok &= (0..7).map(|k| m.topic_total(k) as usize).sum::<usize>() == 1000;
        let rebuilt =
            CountTables::from_assignments(&tokens, &offsets, m.all_assignments(), 7, v as usize);
        ok &= &rebuilt == m.counts();
        if !ok {
            break;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        4,
        "Gibbs count conservation after every sweep",
        ok && elapsed < Duration::from_secs(10),
        &format!(
            "{} sweeps over 1000 tokens, {elapsed:.2?}",
            sampler.sweeps_done()
        ),
    );
}

#[test]
fn criterion_5_topic_recovery() {
    let start = Instant::now();
    let spec = SyntheticSpec {
        num_topics: 3,
        words_per_topic: 10,
        num_docs: 500,
        min_doc_len: 8,
        max_doc_len: 16,
        alpha: 0.1,
        word_weights: WordWeights::Uniform,
        seed: 5,
    };
    let synth = generate(&spec).unwrap();
    let hp = LdaHyperparams {
        iterations: 500,
        seed: 55,
        min_token_count: 1,
        ..LdaHyperparams::new(3)
    };
    let model = train(&synth.corpus, &hp).unwrap();
    let summaries = model.topic_summaries(10).unwrap();
    let mut matched = Vec::new();
    let mut min_overlap = f64::INFINITY;
    for s in &summaries {
        let words: Vec<&str> = s.entries.iter().map(|e| e.word.as_str()).collect();
        let (best, overlap) = synth
            .topic_vocabularies
            .iter()
            .enumerate()
            .map(|(t, vocab)| {
                let hits = words
                    .iter()
                    .filter(|w| vocab.iter().any(|v| v == *w))
                    .count();
                (t, hits as f64 / words.len().max(1) as f64)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        min_overlap = min_overlap.min(overlap);
        matched.push(best);
    }
    let distinct: BTreeSet<usize> = matched.iter().copied().collect();
    let elapsed = start.elapsed();
    verdict(
        5,
        "topic recovery on 3 disjoint synthetic topics",
        min_overlap >= 0.8 && distinct.len() == 3 && elapsed < Duration::from_secs(30),
        &format!("min overlap {min_overlap:.2}, matching {matched:?}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_6_fewer_topics_higher_nmi() {
    let synth = generate(&SyntheticSpec::bundled()).unwrap();
    let mean_nmi = |n: usize| -> f64 {
        (0..5u64)
            .map(|seed| {
                let hp = LdaHyperparams {
                    iterations: 300,
                    seed: 600 + seed,
                    min_token_count: 1,
                    ..LdaHyperparams::new(n)
                };
                model_nmi(&train(&synth.corpus, &hp).unwrap()).unwrap()
            })
            .sum::<f64>()
            / 5.0
    };
    let (few, many) = (mean_nmi(5), mean_nmi(30));
    verdict(
        6,
        "mean NMI at N=5 exceeds N=30",
        few > many,
        &format!("N=5: {few:.3}, N=30: {many:.3}"),
    );
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn preprocess_golden(out: &Path) -> std::process::Output {
    let g = fixtures().join("golden");
    bin()
        .arg("preprocess")
        .arg("--input")
        .arg(g.join("input.jsonl"))
        .arg("--stopwords")
        .arg(g.join("stopwords.txt"))
        .args(["--min-token-count", "2"])
        .arg("--output")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn criterion_7_cli_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    assert!(preprocess_golden(&corpus).status.success());

    let train_into = |dir: &Path| {
        let st = bin()
            .arg("train")
            .arg("--corpus")
            .arg(&corpus)
            .arg("--output")
            .arg(dir)
            .args(["--topics", "4", "--iters", "100", "--seed", "9"])
            .output()
            .unwrap();
        assert!(
            st.status.success(),
            "{}",
            String::from_utf8_lossy(&st.stderr)
        );
        read_dir_bytes(dir)
    };
    let a = train_into(&tmp.path().join("m1"));
    let b = train_into(&tmp.path().join("m2"));
    let train_same = a == b && a.len() == 4;

    let sweep_into = |dir: &Path, jobs: &str| {
        let st = bin()
            .arg("sweep")
            .arg("--corpus")
            .arg(&corpus)
            .arg("--output")
            .arg(dir)
            .args([
                "--topic-numbers",
                "2,4",
                "--alphas",
                "0.1,0.05",
                "--betas",
                "0.01,0.015",
                "--seeds",
                "1,2",
                "--iters",
                "50",
                "--format",
                "markdown",
                "--jobs",
                jobs,
            ])
            .output()
            .unwrap();
        assert!(
            st.status.success(),
            "{}",
            String::from_utf8_lossy(&st.stderr)
        );
        (read_dir_bytes(dir), st.stdout)
    };
    let (s1, out1) = sweep_into(&tmp.path().join("s1"), "1");
    let (s8, out8) = sweep_into(&tmp.path().join("s8"), "8");
    let rows = String::from_utf8_lossy(&s1[1].1).lines().count() - 1;
    let sweep_same = s1 == s8 && out1 == out8 && rows == 16;
    verdict(
        7,
        "byte-identical train archives and sweep outputs across --jobs",
        train_same && sweep_same,
        &format!("train identical={train_same}, sweep identical={sweep_same} ({rows} rows)"),
    );
}

#[test]
fn criterion_8_preprocessing_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("corpus");
    let st = preprocess_golden(&out);
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
    let expected = fixtures().join("golden/expected");
    let mut mismatched = Vec::new();
    for name in ["vocab.tsv", "docs.txt", "stats.json"] {
        if fs::read(out.join(name)).unwrap() != fs::read(expected.join(name)).unwrap() {
            mismatched.push(name);
        }
    }
    verdict(
        8,
        "50-line golden fixture produces the committed corpus archive",
        mismatched.is_empty(),
        &format!("mismatched files: {mismatched:?}"),
    );
}

#[test]
fn criterion_9_table_cell_format() {
    let row = SweepRow {
        label: "Gikomba(15, 0.1, 0.01)".into(),
        hyperparams: LdaHyperparams::new(15),
        nmi: 0.5401,
        mean_col: 0.765,
        sd: 0.348,
        seed: 1,
        runtime: Duration::ZERO,
    };
    let tsv = render_tables(&[&row], TableFormat::Tsv).unwrap();
    let md = render_tables(&[&row], TableFormat::Markdown).unwrap();
    let ok = tsv.contains("Gikomba(15, 0.1, 0.01)\t0.540\n")
        && tsv.contains("Gikomba(15, 0.1, 0.01)\t0.765 ± 0.348\n")
        && md.contains("| Gikomba(15, 0.1, 0.01) | 0.765 ± 0.348 |");
    verdict(
        9,
        "tables render 3-decimal \"mean ± sd\" cells",
        ok,
        "0.5401 -> 0.540, 0.765 ± 0.348",
    );
}
