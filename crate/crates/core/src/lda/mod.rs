//! Latent Dirichlet allocation trained by collapsed Gibbs sampling.

mod archive;
mod sampler;
mod sparse;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Vocabulary};
use crate::error::{Error, Result};

pub use archive::{read_model_archive, write_model_archive, ModelManifest};
pub use sampler::GibbsSampler;
pub use sparse::SparseCounts;

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_MIN_TOKEN_COUNT: u32 = 5;
pub const DEFAULT_ITERATIONS: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaHyperparams {
    pub num_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub min_token_count: u32,
    pub iterations: usize,
    pub seed: u64,
}

impl LdaHyperparams {
    /// Defaults: alpha 0.1, beta 0.01, minTokenCount 5, 1000 sweeps.
    pub fn new(num_topics: usize) -> Self {
        LdaHyperparams {
            num_topics,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            min_token_count: DEFAULT_MIN_TOKEN_COUNT,
            iterations: DEFAULT_ITERATIONS,
            seed: DEFAULT_SEED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidHyperparams(m));
        if self.num_topics < 1 {
            return bad("number of topics must be at least 1".into());
        }
        if self.num_topics > u32::MAX as usize {
            return bad(format!("too many topics ({})", self.num_topics));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1".into());
        }
        if self.min_token_count < 1 {
            return bad("minTokenCount must be at least 1".into());
        }
        Ok(())
    }

    /// `Name(N, alpha, beta)`, e.g. `LDA(15, 0.1, 0.01)`.
    pub fn label(&self, name: &str) -> String {
        format!("{name}({}, {}, {})", self.num_topics, self.alpha, self.beta)
    }
}

impl fmt::Display for LdaHyperparams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label("LDA"))
    }
}

/// The three count tables of collapsed Gibbs sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTables {
    /// documents x topics
    pub doc_topic: SparseCounts,
    /// words x topics; stored word-major for the sampler
    pub word_topic: SparseCounts,
    pub topic_totals: Vec<u32>,
}

impl CountTables {
    /// Tallies the tables from scratch from a flat assignment vector.
    pub fn from_assignments(
        tokens: &[u32],
        offsets: &[usize],
        z: &[u32],
        num_topics: usize,
        vocab_size: usize,
    ) -> Self {
        let num_docs = offsets.len() - 1;
        let mut doc_topic = SparseCounts::new(num_docs);
        let mut word_topic = SparseCounts::new(vocab_size);
        let mut topic_totals = vec![0u32; num_topics];
        for d in 0..num_docs {
            for i in offsets[d]..offsets[d + 1] {
                let k = z[i];
                doc_topic.increment(d, k);
                word_topic.increment(tokens[i] as usize, k);
                topic_totals[k as usize] += 1;
            }
        }
        CountTables {
            doc_topic,
            word_topic,
            topic_totals,
        }
    }
}

/// One ranked entry of a [`TopicSummary`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopicWord {
    pub word_id: u32,
    pub word: String,
    pub count: u32,
}

/// Words of a topic ranked by assignment count, ties by token id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopicSummary {
    pub topic_id: usize,
    pub entries: Vec<TopicWord>,
}

impl TopicSummary {
    pub fn word_ids(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.word_id).collect()
    }
}

/// Unnormalized collapsed conditional for one token:
/// `(n_dk + alpha) * (n_kw + beta) / (n_k + V * beta)` for every topic `k`,
/// written into `out`. Returns the sum.
#[inline]
pub(crate) fn fill_conditional_weights(
    doc_counts: &[u32],
    word_counts: &[u32],
    topic_totals: &[u32],
    alpha: f64,
    beta: f64,
    vocab_beta: f64,
    out: &mut [f64],
) -> f64 {
    let mut sum = 0.0;
    for k in 0..out.len() {
        let w = (f64::from(doc_counts[k]) + alpha) * (f64::from(word_counts[k]) + beta)
            / (f64::from(topic_totals[k]) + vocab_beta);
        out[k] = w;
        sum += w;
    }
    sum
}

/// Normalized collapsed conditional over topics given counts from which the
/// token being resampled has already been removed.
pub fn collapsed_conditional(
    doc_counts: &[u32],
    word_counts: &[u32],
    topic_totals: &[u32],
    alpha: f64,
    beta: f64,
    vocab_size: usize,
) -> Vec<f64> {
    let n = topic_totals.len();
    assert!(doc_counts.len() == n && word_counts.len() == n);
    let mut out = vec![0.0; n];
    let sum = fill_conditional_weights(
        doc_counts,
        word_counts,
        topic_totals,
        alpha,
        beta,
        vocab_size as f64 * beta,
        &mut out,
    );
    out.iter_mut().for_each(|p| *p /= sum);
    out
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// A trained (or in-training) LDA model.
///
/// Tokens are stored flat with per-document offsets; `z[i]` is the topic
/// currently assigned to `tokens[i]`.
#[derive(Debug, Clone)]
pub struct LdaModel {
    hyperparams: LdaHyperparams,
    vocabulary: Arc<Vocabulary>,
    corpus_hash: String,
    doc_ids: Vec<String>,
    tokens: Vec<u32>,
    offsets: Vec<usize>,
    z: Vec<u32>,
    counts: CountTables,
}

impl PartialEq for LdaModel {
    fn eq(&self, other: &Self) -> bool {
        self.hyperparams == other.hyperparams
            && self.corpus_hash == other.corpus_hash
            && self.doc_ids == other.doc_ids
            && self.tokens == other.tokens
            && self.offsets == other.offsets
            && self.z == other.z
            && self.counts == other.counts
    }
}

/// Trains a model with `hp.iterations` full Gibbs sweeps.
pub fn train(corpus: &Corpus, hp: &LdaHyperparams) -> Result<LdaModel> {
    let mut sampler = GibbsSampler::new(corpus, hp)?;
    for _ in 0..hp.iterations {
        sampler.sweep();
    }
    Ok(sampler.into_model())
}

impl LdaModel {
    /// Builds a model over `corpus` with the given flat assignment vector.
    pub fn from_assignments(corpus: &Corpus, hp: &LdaHyperparams, z: Vec<u32>) -> Result<Self> {
        hp.validate()?;
        if corpus.num_docs() == 0 {
            return Err(Error::EmptyCorpus);
        }
        let mut offsets = Vec::with_capacity(corpus.num_docs() + 1);
        let mut tokens = Vec::with_capacity(corpus.num_tokens());
        offsets.push(0);
        for doc in corpus.docs() {
            tokens.extend_from_slice(&doc.tokens);
            offsets.push(tokens.len());
        }
        if z.len() != tokens.len() {
            return Err(Error::InvalidConfig(format!(
                "{} assignments for {} tokens",
                z.len(),
                tokens.len()
            )));
        }
        if let Some(&k) = z.iter().find(|&&k| k as usize >= hp.num_topics) {
            return Err(Error::UnknownTopic(k as usize));
        }
        let counts = CountTables::from_assignments(
            &tokens,
            &offsets,
            &z,
            hp.num_topics,
            corpus.vocab_size(),
        );
        Ok(LdaModel {
            hyperparams: *hp,
            vocabulary: corpus.shared_vocabulary(),
            corpus_hash: corpus.content_hash(),
            doc_ids: corpus.docs().iter().map(|d| d.id.clone()).collect(),
            tokens,
            offsets,
            z,
            counts,
        })
    }

    pub fn hyperparams(&self) -> &LdaHyperparams {
        &self.hyperparams
    }

    pub fn num_topics(&self) -> usize {
        self.hyperparams.num_topics
    }

    pub fn num_docs(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_tokens(&self) -> usize {
        self.tokens.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn corpus_hash(&self) -> &str {
        &self.corpus_hash
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn counts(&self) -> &CountTables {
        &self.counts
    }

    /// Flat assignment vector over all tokens in corpus order.
    pub fn all_assignments(&self) -> &[u32] {
        &self.z
    }

    fn check_doc(&self, d: usize) -> Result<()> {
        if d < self.num_docs() {
            Ok(())
        } else {
            Err(Error::UnknownDoc(d))
        }
    }

    fn check_topic(&self, k: usize) -> Result<()> {
        if k < self.num_topics() {
            Ok(())
        } else {
            Err(Error::UnknownTopic(k))
        }
    }

    fn doc_range(&self, d: usize) -> std::ops::Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn doc_tokens(&self, d: usize) -> Result<&[u32]> {
        self.check_doc(d)?;
        Ok(&self.tokens[self.doc_range(d)])
    }

    pub fn assignments(&self, d: usize) -> Result<&[u32]> {
        self.check_doc(d)?;
        Ok(&self.z[self.doc_range(d)])
    }

    pub fn doc_topic_count(&self, d: usize, k: usize) -> u32 {
        self.counts.doc_topic.get(d, k as u32)
    }

    pub fn topic_word_count(&self, k: usize, w: u32) -> u32 {
        self.counts.word_topic.get(w as usize, k as u32)
    }

    pub fn topic_total(&self, k: usize) -> u32 {
        self.counts.topic_totals[k]
    }

    fn dense_doc_counts(&self, d: usize) -> Vec<u32> {
        let mut dense = vec![0u32; self.num_topics()];
        for &(k, c) in self.counts.doc_topic.row(d) {
            dense[k as usize] = c;
        }
        dense
    }

    /// Collapsed conditional for token `i` of document `d` with that token's
    /// current assignment removed from the counts.
    pub fn gibbs_conditional(&self, d: usize, i: usize) -> Result<Vec<f64>> {
        self.check_doc(d)?;
        let range = self.doc_range(d);
        if i >= range.len() {
            return Err(Error::InvalidConfig(format!(
                "token position {i} outside document {d} of length {}",
                range.len()
            )));
        }
        let pos = range.start + i;
        let (w, current) = (self.tokens[pos], self.z[pos] as usize);
        let mut doc_counts = self.dense_doc_counts(d);
        let mut word_counts = vec![0u32; self.num_topics()];
        for &(k, c) in self.counts.word_topic.row(w as usize) {
            word_counts[k as usize] = c;
        }
        let mut totals = self.counts.topic_totals.clone();
        doc_counts[current] -= 1;
        word_counts[current] -= 1;
        totals[current] -= 1;
        Ok(collapsed_conditional(
            &doc_counts,
            &word_counts,
            &totals,
            self.hyperparams.alpha,
            self.hyperparams.beta,
            self.vocab_size(),
        ))
    }

    /// Smoothed topic proportions `(n_dk + alpha) / (len(d) + N * alpha)`.
    pub fn doc_topic_distribution(&self, d: usize) -> Result<Vec<f64>> {
        self.check_doc(d)?;
        let alpha = self.hyperparams.alpha;
        let len = self.doc_range(d).len() as f64;
        let denom = len + self.num_topics() as f64 * alpha;
        Ok(self
            .dense_doc_counts(d)
            .into_iter()
            .map(|c| (f64::from(c) + alpha) / denom)
            .collect())
    }

    /// Smoothed word distribution `(n_kw + beta) / (n_k + V * beta)` over the vocabulary.
    pub fn topic_word_distribution(&self, k: usize) -> Result<Vec<f64>> {
        self.check_topic(k)?;
        let beta = self.hyperparams.beta;
        let denom = f64::from(self.topic_total(k)) + self.vocab_size() as f64 * beta;
        Ok((0..self.vocab_size() as u32)
            .map(|w| (f64::from(self.topic_word_count(k, w)) + beta) / denom)
            .collect())
    }

    /// Up to `top_m` highest-count words of topic `k`.
    pub fn topic_summary(&self, k: usize, top_m: usize) -> Result<TopicSummary> {
        self.check_topic(k)?;
        if top_m < 1 {
            return Err(Error::InvalidConfig("top_m must be at least 1".into()));
        }
        let mut ranked: Vec<(u32, u32)> = (0..self.vocab_size() as u32)
            .filter_map(|w| {
                let c = self.topic_word_count(k, w);
                (c > 0).then_some((w, c))
            })
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(top_m);
        Ok(self.summary_from_ranked(k, ranked))
    }

    /// [`Self::topic_summary`] for every topic in one pass over the word table.
    pub fn topic_summaries(&self, top_m: usize) -> Result<Vec<TopicSummary>> {
        if top_m < 1 {
            return Err(Error::InvalidConfig("top_m must be at least 1".into()));
        }
        let mut per_topic: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.num_topics()];
        for w in 0..self.vocab_size() {
            for &(k, c) in self.counts.word_topic.row(w) {
                per_topic[k as usize].push((w as u32, c));
            }
        }
        Ok(per_topic
            .into_iter()
            .enumerate()
            .map(|(k, mut ranked)| {
                ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                ranked.truncate(top_m);
                self.summary_from_ranked(k, ranked)
            })
            .collect())
    }

    fn summary_from_ranked(&self, k: usize, ranked: Vec<(u32, u32)>) -> TopicSummary {
        TopicSummary {
            topic_id: k,
            entries: ranked
                .into_iter()
                .map(|(w, count)| TopicWord {
                    word_id: w,
                    word: self.vocabulary.word(w).unwrap_or_default().to_owned(),
                    count,
                })
                .collect(),
        }
    }

    /// Topic with the largest smoothed proportion in document `d`.
    pub fn hard_label(&self, d: usize) -> Result<usize> {
        Ok(argmax_first(&self.doc_topic_distribution(d)?))
    }

    /// Topic holding the plurality of document `d`'s token assignments.
    pub fn majority_assignment_cluster(&self, d: usize) -> Result<usize> {
        self.check_doc(d)?;
        let mut best = (0u32, 0u32);
        for &(k, c) in self.counts.doc_topic.row(d) {
            if c > best.1 {
                best = (k, c);
            }
        }
        Ok(best.0 as usize)
    }

    /// Probability that the whole document was generated by a single topic:
    /// `p(k | d) ∝ pi_k * prod_i phi_k[w_i]`, with corpus-level topic weights
    /// `pi_k = (n_k + alpha) / (num_tokens + N * alpha)`.
    pub fn document_posterior(&self, d: usize) -> Result<Vec<f64>> {
        self.check_doc(d)?;
        let (alpha, beta) = (self.hyperparams.alpha, self.hyperparams.beta);
        let n = self.num_topics();
        let vocab_beta = self.vocab_size() as f64 * beta;
        let prior_denom = self.num_tokens() as f64 + n as f64 * alpha;
        let tokens = &self.tokens[self.doc_range(d)];
        let log_post: Vec<f64> = (0..n)
            .map(|k| {
                let total = f64::from(self.topic_total(k));
                let word_denom = (total + vocab_beta).ln();
                let mut lp = ((total + alpha) / prior_denom).ln();
                for &w in tokens {
                    lp += (f64::from(self.topic_word_count(k, w)) + beta).ln() - word_denom;
                }
                lp
            })
            .collect();
        let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = log_post.iter().map(|lp| (lp - max).exp()).collect();
        let sum: f64 = weights.iter().sum();
        Ok(weights.into_iter().map(|w| w / sum).collect())
    }

    /// Argmax of [`Self::document_posterior`], ties to the smallest topic id.
    pub fn posterior_label(&self, d: usize) -> Result<usize> {
        Ok(argmax_first(&self.document_posterior(d)?))
    }

    /// Checks the count conservation identities and that the tables equal a
    /// fresh tally of the assignments.
    pub fn verify_counts(&self) -> std::result::Result<(), String> {
        let n = self.num_topics();
        for d in 0..self.num_docs() {
            let len = self.doc_range(d).len() as u64;
            let sum = self.counts.doc_topic.row_total(d);
            if sum != len {
                return Err(format!("doc {d}: topic counts sum to {sum}, length {len}"));
            }
        }
        let mut per_topic = vec![0u64; n];
        for w in 0..self.vocab_size() {
            for &(k, c) in self.counts.word_topic.row(w) {
                per_topic[k as usize] += u64::from(c);
            }
        }
        for (k, (&sum, &total)) in per_topic.iter().zip(&self.counts.topic_totals).enumerate() {
            if sum != u64::from(total) {
                return Err(format!(
                    "topic {k}: word counts sum to {sum}, total {total}"
                ));
            }
        }
        let grand: u64 = self.counts.topic_totals.iter().map(|&c| u64::from(c)).sum();
        if grand != self.num_tokens() as u64 {
            return Err(format!(
                "topic totals sum to {grand}, corpus has {} tokens",
                self.num_tokens()
            ));
        }
        if let Some(k) = self.z.iter().find(|&&k| k as usize >= n) {
            return Err(format!("assignment {k} out of range"));
        }
        let rebuilt = CountTables::from_assignments(
            &self.tokens,
            &self.offsets,
            &self.z,
            n,
            self.vocab_size(),
        );
        if rebuilt != self.counts {
            return Err("count tables differ from a fresh tally of the assignments".into());
        }
        Ok(())
    }
}
