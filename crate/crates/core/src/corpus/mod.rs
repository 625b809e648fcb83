//! Short-text preprocessing and the vocabulary-indexed corpus.
//!
//! The pipeline runs in a fixed order: exact-duplicate removal, language
//! filtering, then URL stripping, lowercasing, tokenization and removal of
//! stopwords and short words. [`build_corpus`] then drops rare words and
//! encodes documents over the surviving vocabulary.

mod archive;
mod input;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use regex::Regex;

use crate::error::{Error, Result};

pub use archive::{read_corpus_archive, write_corpus_archive, CorpusStats};
pub use input::{parse_stopwords, read_csv, read_jsonl, read_raw_documents, read_stopwords_file};

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");
const BUNDLED_WORDLIST: &str = include_str!("../../data/wordlist_en.txt");

/// Matches `http://`, `https://` and `www.` spans up to the next whitespace.
pub const DEFAULT_URL_PATTERN: &str = r"(?i)\b(?:https?://|www\.)\S*";
pub const DEFAULT_MIN_WORD_LEN: usize = 3;
pub const DEFAULT_LANGUAGE_THRESHOLD: f64 = 0.2;

/// A raw message as read from input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// A normalized document as a list of word strings, before vocabulary encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordDocument {
    pub id: String,
    pub words: Vec<String>,
}

/// A document encoded over a [`Vocabulary`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDocument {
    pub id: String,
    pub tokens: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub stopwords: BTreeSet<String>,
    /// Extra target-language evidence for the language filter, on top of the stopwords.
    pub language_wordlist: BTreeSet<String>,
    pub min_word_len: usize,
    pub language_filter_threshold: f64,
    pub url_pattern: String,
}

impl PipelineConfig {
    pub fn new(stopwords: BTreeSet<String>) -> Self {
        PipelineConfig {
            stopwords,
            language_wordlist: bundled_wordlist(),
            min_word_len: DEFAULT_MIN_WORD_LEN,
            language_filter_threshold: DEFAULT_LANGUAGE_THRESHOLD,
            url_pattern: DEFAULT_URL_PATTERN.to_string(),
        }
    }

    /// Default configuration with the bundled English stopword list.
    pub fn english() -> Self {
        Self::new(bundled_stopwords())
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_word_len < 1 {
            return Err(Error::InvalidConfig(
                "min_word_len must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.language_filter_threshold) {
            return Err(Error::InvalidConfig(format!(
                "language filter threshold {} is outside [0, 1]",
                self.language_filter_threshold
            )));
        }
        if self.stopwords.is_empty() {
            return Err(Error::InvalidConfig("stopword set is empty".into()));
        }
        Ok(())
    }
}

pub fn bundled_stopwords() -> BTreeSet<String> {
    parse_stopwords(BUNDLED_STOPWORDS)
}

pub fn bundled_wordlist() -> BTreeSet<String> {
    parse_stopwords(BUNDLED_WORDLIST)
}

/// Drops documents whose whitespace-normalized text was already seen, keeping
/// the first occurrence in input order.
pub fn deduplicate(docs: Vec<RawDocument>) -> Vec<RawDocument> {
    let mut seen = HashSet::new();
    docs.into_iter()
        .filter(|doc| seen.insert(normalize_whitespace(&doc.text)))
        .collect()
}

fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_tag_prefix(c: char) -> bool {
    c == '#' || c == '@'
}

/// Splits already-lowercased text into maximal alphanumeric runs. A single
/// `#` or `@` directly in front of a run, and not itself preceded by an
/// alphanumeric character, stays attached to it.
pub(crate) fn split_tokens(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut prev: Option<char> = None;
    let mut chars = text.char_indices().peekable();
    while let Some((pos, c)) = chars.next() {
        if c.is_alphanumeric() {
            if start.is_none() {
                start = Some(pos);
            }
        } else {
            if let Some(s) = start.take() {
                out.push(&text[s..pos]);
            }
            let after_boundary = prev.is_none_or(|p| !p.is_alphanumeric());
            let before_run = chars.peek().is_some_and(|&(_, n)| n.is_alphanumeric());
            if is_tag_prefix(c) && after_boundary && before_run {
                start = Some(pos);
            }
        }
        prev = Some(c);
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}

/// A compiled [`PipelineConfig`].
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    url: Regex,
}

/// Document counts after each preprocessing stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PreprocessSummary {
    pub docs_in: usize,
    pub after_dedup: usize,
    pub after_language: usize,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let url = Regex::new(&config.url_pattern)
            .map_err(|e| Error::InvalidConfig(format!("bad URL pattern: {e}")))?;
        Ok(Pipeline { config, url })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    fn strip_urls(&self, text: &str) -> String {
        self.url.replace_all(text, " ").into_owned()
    }

    /// Fraction of a document's plain (non-hashtag, non-mention) tokens that
    /// are known target-language words, or `None` when there are no such tokens.
    pub fn language_score(&self, text: &str) -> Option<f64> {
        let lowered = self.strip_urls(text).to_lowercase();
        let tokens: Vec<&str> = split_tokens(&lowered)
            .into_iter()
            .filter(|t| !t.starts_with(is_tag_prefix))
            .collect();
        if tokens.is_empty() {
            return None;
        }
        let hits = tokens
            .iter()
            .filter(|t| {
                self.config.stopwords.contains(**t) || self.config.language_wordlist.contains(**t)
            })
            .count();
        Some(hits as f64 / tokens.len() as f64)
    }

    /// Keeps documents whose language score reaches the configured threshold.
    /// Documents without any scorable token are kept.
    pub fn filter_language(&self, docs: Vec<RawDocument>) -> Vec<RawDocument> {
        let threshold = self.config.language_filter_threshold;
        docs.into_iter()
            .filter(|doc| {
                self.language_score(&doc.text)
                    .is_none_or(|score| score >= threshold)
            })
            .collect()
    }

    pub fn normalize_and_tokenize(&self, text: &str) -> Vec<String> {
        let lowered = self.strip_urls(text).to_lowercase();
        split_tokens(&lowered)
            .into_iter()
            .filter(|t| t.chars().count() >= self.config.min_word_len)
            .filter(|t| !self.config.stopwords.contains(*t))
            .map(str::to_owned)
            .collect()
    }

    /// Runs deduplication, language filtering and normalization in order.
    pub fn run(&self, docs: Vec<RawDocument>) -> (Vec<WordDocument>, PreprocessSummary) {
        let docs_in = docs.len();
        let docs = deduplicate(docs);
        let after_dedup = docs.len();
        let docs = self.filter_language(docs);
        let after_language = docs.len();
        let out = docs
            .into_iter()
            .map(|doc| WordDocument {
                words: self.normalize_and_tokenize(&doc.text),
                id: doc.id,
            })
            .collect();
        let summary = PreprocessSummary {
            docs_in,
            after_dedup,
            after_language,
        };
        (out, summary)
    }
}

/// Bijection between words and dense token ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn from_words(words: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate vocabulary word {w:?}"
                )));
            }
        }
        Ok(Vocabulary { words, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        self.words.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Documents encoded over a shared vocabulary, with frequency statistics.
///
/// Only documents with at least one token are kept in `docs`; ids of
/// documents that ended up empty are listed in [`Corpus::excluded_docs`].
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    vocabulary: Arc<Vocabulary>,
    docs: Vec<TokenizedDocument>,
    word_freq: Vec<u64>,
    doc_freq: Vec<u32>,
    num_tokens: usize,
    excluded_docs: Vec<String>,
    min_token_count: u32,
}

impl Corpus {
    /// Assembles a corpus from already-encoded documents, recomputing all
    /// statistics. Empty documents are moved to the exclusion list.
    pub fn from_encoded(
        vocabulary: Vocabulary,
        docs: Vec<TokenizedDocument>,
        mut excluded_docs: Vec<String>,
        min_token_count: u32,
    ) -> Result<Self> {
        let v = vocabulary.len();
        let mut word_freq = vec![0u64; v];
        let mut doc_freq = vec![0u32; v];
        let mut kept = Vec::with_capacity(docs.len());
        let mut num_tokens = 0;
        let mut seen = vec![false; v];
        for doc in docs {
            if doc.tokens.is_empty() {
                excluded_docs.push(doc.id);
                continue;
            }
            for &t in &doc.tokens {
                let slot = seen.get_mut(t as usize).ok_or(Error::UnknownWord(t))?;
                word_freq[t as usize] += 1;
                if !*slot {
                    *slot = true;
                    doc_freq[t as usize] += 1;
                }
            }
            for &t in &doc.tokens {
                seen[t as usize] = false;
            }
            num_tokens += doc.tokens.len();
            kept.push(doc);
        }
        if kept.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(Corpus {
            vocabulary: Arc::new(vocabulary),
            docs: kept,
            word_freq,
            doc_freq,
            num_tokens,
            excluded_docs,
            min_token_count,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub(crate) fn shared_vocabulary(&self) -> Arc<Vocabulary> {
        Arc::clone(&self.vocabulary)
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn docs(&self) -> &[TokenizedDocument] {
        &self.docs
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.num_tokens
    }

    /// Total occurrences of `word` across the corpus.
    pub fn word_frequency(&self, word: u32) -> u64 {
        self.word_freq[word as usize]
    }

    /// Number of documents containing `word`.
    pub fn doc_frequency(&self, word: u32) -> u32 {
        self.doc_freq[word as usize]
    }

    pub fn excluded_docs(&self) -> &[String] {
        &self.excluded_docs
    }

    pub fn min_token_count(&self) -> u32 {
        self.min_token_count
    }

    /// Hex SHA-256 over the archived vocabulary and document listing.
    pub fn content_hash(&self) -> String {
        archive::content_hash(self)
    }
}

/// Builds the vocabulary from words whose total frequency is at least
/// `min_token_count` and encodes every document over it.
///
/// Token ids follow first occurrence in document order.
pub fn build_corpus(docs: Vec<WordDocument>, min_token_count: u32) -> Result<Corpus> {
    if min_token_count < 1 {
        return Err(Error::InvalidConfig(
            "minTokenCount must be at least 1".into(),
        ));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    let mut order: Vec<&str> = Vec::new();
    for doc in &docs {
        for w in &doc.words {
            let c = counts.entry(w.as_str()).or_insert_with(|| {
                order.push(w.as_str());
                0
            });
            *c += 1;
        }
    }
    let kept: Vec<String> = order
        .into_iter()
        .filter(|w| counts[w] >= u64::from(min_token_count))
        .map(str::to_owned)
        .collect();
    let vocabulary = Vocabulary::from_words(kept)?;
    let encoded = docs
        .iter()
        .map(|doc| TokenizedDocument {
            id: doc.id.clone(),
            tokens: doc.words.iter().filter_map(|w| vocabulary.id(w)).collect(),
        })
        .collect();
    Corpus::from_encoded(vocabulary, encoded, Vec::new(), min_token_count)
}
