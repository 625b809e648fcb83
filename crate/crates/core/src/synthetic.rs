//! Corpora drawn from the LDA generative process, for testing recovery.
//!
//! Each true topic owns a disjoint block of words named `t{k}w{j}`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;

use crate::corpus::{build_corpus, Corpus, WordDocument};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub num_topics: usize,
    pub words_per_topic: usize,
    pub num_docs: usize,
    pub min_doc_len: usize,
    pub max_doc_len: usize,
    /// Dirichlet concentration of each document's topic mixture.
    pub alpha: f64,
    pub word_weights: WordWeights,
    pub seed: u64,
}

/// How a generating topic spreads its mass over its own word block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WordWeights {
    Uniform,
    /// Drawn once per topic from a symmetric Dirichlet.
    Dirichlet(f64),
}

impl SyntheticSpec {
    /// The reference corpus: 5 topics of 20 words, 400 tweet-length documents.
    pub fn bundled() -> Self {
        SyntheticSpec {
            num_topics: 5,
            words_per_topic: 20,
            num_docs: 400,
            min_doc_len: 6,
            max_doc_len: 12,
            alpha: 0.1,
            word_weights: WordWeights::Dirichlet(0.1),
            seed: 20160501,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// Words owned by each generating topic.
    pub topic_vocabularies: Vec<Vec<String>>,
    /// Generating topic of every token, per document, in corpus order.
    pub token_topics: Vec<Vec<usize>>,
}

pub fn word_name(topic: usize, j: usize) -> String {
    format!("t{topic}w{j}")
}

fn dirichlet(rng: &mut ChaCha8Rng, concentration: f64, dim: usize) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive shape");
    let mut v: Vec<f64> = (0..dim).map(|_| gamma.sample(rng)).collect();
    let sum: f64 = v.iter().sum();
    if sum > 0.0 {
        v.iter_mut().for_each(|x| *x /= sum);
    } else {
        // every component underflowed; the draw is a vertex of the simplex
        let k = rng.random_range(0..dim);
        v.iter_mut()
            .enumerate()
            .for_each(|(i, x)| *x = f64::from(u8::from(i == k)));
    }
    v
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    if spec.num_topics == 0
        || spec.words_per_topic == 0
        || spec.num_docs == 0
        || spec.min_doc_len == 0
        || spec.min_doc_len > spec.max_doc_len
        || spec.alpha.is_nan()
        || spec.alpha <= 0.0
        || matches!(spec.word_weights, WordWeights::Dirichlet(b) if b.is_nan() || b <= 0.0)
    {
        return Err(Error::InvalidConfig(format!("bad synthetic spec {spec:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let topic_vocabularies: Vec<Vec<String>> = (0..spec.num_topics)
        .map(|k| (0..spec.words_per_topic).map(|j| word_name(k, j)).collect())
        .collect();
    let word_dists: Vec<WeightedIndex<f64>> = (0..spec.num_topics)
        .map(|_| {
            let weights = match spec.word_weights {
                WordWeights::Uniform => vec![1.0; spec.words_per_topic],
                WordWeights::Dirichlet(b) => dirichlet(&mut rng, b, spec.words_per_topic),
            };
            WeightedIndex::new(weights).expect("normalized weights")
        })
        .collect();

    let mut docs = Vec::with_capacity(spec.num_docs);
    let mut token_topics = Vec::with_capacity(spec.num_docs);
    for d in 0..spec.num_docs {
        let theta = WeightedIndex::new(dirichlet(&mut rng, spec.alpha, spec.num_topics))
            .expect("normalized weights");
        let len = rng.random_range(spec.min_doc_len..=spec.max_doc_len);
        let mut words = Vec::with_capacity(len);
        let mut topics = Vec::with_capacity(len);
        for _ in 0..len {
            let k = theta.sample(&mut rng);
            let j = word_dists[k].sample(&mut rng);
            words.push(topic_vocabularies[k][j].clone());
            topics.push(k);
        }
        docs.push(WordDocument {
            id: format!("doc{d}"),
            words,
        });
        token_topics.push(topics);
    }
    Ok(SyntheticCorpus {
        corpus: build_corpus(docs, 1)?,
        topic_vocabularies,
        token_topics,
    })
}
