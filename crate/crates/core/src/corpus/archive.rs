//! Corpus archive directory: `vocab.tsv`, `docs.txt`, `stats.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Corpus, TokenizedDocument, Vocabulary};
use crate::error::{Error, Result};

pub const VOCAB_FILE: &str = "vocab.tsv";
pub const DOCS_FILE: &str = "docs.txt";
pub const STATS_FILE: &str = "stats.json";

const VOCAB_HEADER: &str = "token_id\tword\tfrequency\tdoc_frequency";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub num_docs: usize,
    pub num_tokens: usize,
    pub excluded_docs: usize,
    pub vocab_size: usize,
    pub min_token_count: u32,
    pub excluded_doc_ids: Vec<String>,
}

impl CorpusStats {
    pub fn of(corpus: &Corpus) -> Self {
        CorpusStats {
            num_docs: corpus.num_docs(),
            num_tokens: corpus.num_tokens(),
            excluded_docs: corpus.excluded_docs().len(),
            vocab_size: corpus.vocab_size(),
            min_token_count: corpus.min_token_count(),
            excluded_doc_ids: corpus.excluded_docs().to_vec(),
        }
    }
}

pub(crate) fn render_vocab(corpus: &Corpus) -> String {
    let mut out = String::with_capacity(corpus.vocab_size() * 16);
    out.push_str(VOCAB_HEADER);
    out.push('\n');
    for (id, word) in corpus.vocabulary().words().iter().enumerate() {
        let id = id as u32;
        let _ = writeln!(
            out,
            "{id}\t{word}\t{}\t{}",
            corpus.word_frequency(id),
            corpus.doc_frequency(id)
        );
    }
    out
}

pub(crate) fn render_docs(corpus: &Corpus) -> String {
    let mut out = String::with_capacity(corpus.num_tokens() * 4);
    for doc in corpus.docs() {
        out.push_str(&doc.id);
        out.push('\t');
        for (i, t) in doc.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{t}");
        }
        out.push('\n');
    }
    out
}

fn hash_parts(vocab: &str, docs: &str) -> String {
    let mut h = Sha256::new();
    h.update(vocab.as_bytes());
    h.update([0xff]);
    h.update(docs.as_bytes());
    h.finalize()
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

pub(crate) fn content_hash(corpus: &Corpus) -> String {
    hash_parts(&render_vocab(corpus), &render_docs(corpus))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn write_corpus_archive(corpus: &Corpus, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join(VOCAB_FILE), &render_vocab(corpus))?;
    write_file(&dir.join(DOCS_FILE), &render_docs(corpus))?;
    let stats =
        serde_json::to_string_pretty(&CorpusStats::of(corpus)).expect("corpus stats serialize");
    write_file(&dir.join(STATS_FILE), &(stats + "\n"))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads a corpus archive and checks that the recorded frequencies and
/// statistics agree with the documents.
pub fn read_corpus_archive(dir: &Path) -> Result<Corpus> {
    let vocab_path = dir.join(VOCAB_FILE);
    let docs_path = dir.join(DOCS_FILE);
    let stats_path = dir.join(STATS_FILE);

    let vocab_text = read_file(&vocab_path)?;
    let mut lines = vocab_text.lines();
    if lines.next() != Some(VOCAB_HEADER) {
        return Err(Error::archive(&vocab_path, "missing or wrong header"));
    }
    let mut words = Vec::new();
    let mut recorded = Vec::new();
    for (i, line) in lines.enumerate() {
        let bad = || Error::archive(&vocab_path, format!("bad row {}", i + 2));
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 || fields[0].parse::<usize>().ok() != Some(i) {
            return Err(bad());
        }
        let freq: u64 = fields[2].parse().map_err(|_| bad())?;
        let df: u32 = fields[3].parse().map_err(|_| bad())?;
        words.push(fields[1].to_owned());
        recorded.push((freq, df));
    }
    let vocabulary =
        Vocabulary::from_words(words).map_err(|e| Error::archive(&vocab_path, e.to_string()))?;

    let docs_text = read_file(&docs_path)?;
    let mut docs = Vec::new();
    for (i, line) in docs_text.lines().enumerate() {
        let bad = |m: &str| Error::archive(&docs_path, format!("line {}: {m}", i + 1));
        let (id, rest) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
        let tokens = rest
            .split(' ')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u32>().map_err(|_| bad("bad token id")))
            .collect::<Result<Vec<_>>>()?;
        if tokens.iter().any(|&t| t as usize >= vocabulary.len()) {
            return Err(bad("token id out of range"));
        }
        docs.push(TokenizedDocument {
            id: id.to_owned(),
            tokens,
        });
    }

    let stats: CorpusStats = serde_json::from_str(&read_file(&stats_path)?)
        .map_err(|e| Error::archive(&stats_path, e.to_string()))?;

    let corpus = Corpus::from_encoded(
        vocabulary,
        docs,
        stats.excluded_doc_ids.clone(),
        stats.min_token_count,
    )
    .map_err(|e| match e {
        Error::EmptyCorpus => Error::EmptyCorpus,
        other => Error::archive(dir, other.to_string()),
    })?;

    for (id, &(freq, df)) in recorded.iter().enumerate() {
        let id = id as u32;
        if corpus.word_frequency(id) != freq || corpus.doc_frequency(id) != df {
            return Err(Error::archive(
                &vocab_path,
                format!("frequencies for token {id} disagree with {DOCS_FILE}"),
            ));
        }
    }
    if CorpusStats::of(&corpus) != stats {
        return Err(Error::archive(
            &stats_path,
            "statistics disagree with documents",
        ));
    }
    Ok(corpus)
}
