//! C ABI for topicforge.
//!
//! Corpora and models are opaque handles created by `tf_*` constructors and
//! released with the matching `*_free`. Every fallible call returns a
//! [`TfStatus`]; on failure [`tf_last_error`] describes what went wrong on the
//! calling thread. Outputs are written through pointer arguments only on
//! success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use topicforge::corpus::{
    build_corpus, bundled_stopwords, read_corpus_archive, read_raw_documents, read_stopwords_file,
    write_corpus_archive, Corpus, Pipeline, PipelineConfig,
};
use topicforge::eval::{coherence_report, evaluate, nmi, Clustering};
use topicforge::lda::{read_model_archive, train, write_model_archive, LdaHyperparams, LdaModel};
use topicforge::Error;

/// Result codes shared by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    EmptyCorpus = 5,
    InvalidHyperparams = 6,
    ArchiveMismatch = 7,
    InvalidArgument = 8,
    Panic = 9,
}

/// Opaque preprocessed corpus.
pub struct TfCorpus {
    inner: Corpus,
}

/// Opaque trained model.
pub struct TfModel {
    inner: LdaModel,
}

/// Training settings. Obtain defaults from [`tf_hyperparams_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TfHyperparams {
    pub num_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(TfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => TfStatus::Io,
            Error::Parse { .. } | Error::Archive { .. } => TfStatus::Parse,
            Error::EmptyCorpus => TfStatus::EmptyCorpus,
            Error::InvalidHyperparams(_) => TfStatus::InvalidHyperparams,
            Error::ArchiveMismatch(_) => TfStatus::ArchiveMismatch,
            _ => TfStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TfStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            TfStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(TfStatus::NullArgument, format!("{what} is null"))
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(TfStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))?;
    Ok(PathBuf::from(s))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL after a
/// successful call. Valid until the next `tf_*` call on the same thread.
#[no_mangle]
pub extern "C" fn tf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Reads a JSONL or CSV file (CSV columns `text` and `id`), runs the
/// preprocessing pipeline, and builds a corpus. `stopwords_path` may be NULL
/// to use the bundled English list.
///
/// # Safety
/// Path arguments must be NULL or NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tf_corpus_preprocess(
    input_path: *const c_char,
    stopwords_path: *const c_char,
    min_token_count: u32,
    out: *mut *mut TfCorpus,
) -> TfStatus {
    guard(|| {
        let input = path_arg(input_path, "input_path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let stopwords = if stopwords_path.is_null() {
            bundled_stopwords()
        } else {
            read_stopwords_file(&path_arg(stopwords_path, "stopwords_path")?)?
        };
        let pipeline = Pipeline::new(PipelineConfig::new(stopwords))?;
        let (docs, _) = pipeline.run(read_raw_documents(&input)?);
        let corpus = build_corpus(docs, min_token_count)?;
        write_out(
            out,
            Box::into_raw(Box::new(TfCorpus { inner: corpus })),
            "out",
        )
    })
}

/// Loads a corpus archive directory.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tf_corpus_load(dir: *const c_char, out: *mut *mut TfCorpus) -> TfStatus {
    guard(|| {
        let dir = path_arg(dir, "dir")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let corpus = read_corpus_archive(&dir)?;
        write_out(
            out,
            Box::into_raw(Box::new(TfCorpus { inner: corpus })),
            "out",
        )
    })
}

/// Writes a corpus archive directory.
///
/// # Safety
/// `corpus` must be a live handle; `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tf_corpus_save(corpus: *const TfCorpus, dir: *const c_char) -> TfStatus {
    guard(|| {
        let corpus = deref(corpus, "corpus")?;
        write_corpus_archive(&corpus.inner, &path_arg(dir, "dir")?)?;
        Ok(())
    })
}

/// Releases a corpus. NULL is ignored.
///
/// # Safety
/// `corpus` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tf_corpus_free(corpus: *mut TfCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Documents kept, token count and vocabulary size. Any output pointer may be
/// NULL.
///
/// # Safety
/// `corpus` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tf_corpus_stats(
    corpus: *const TfCorpus,
    num_docs: *mut usize,
    num_tokens: *mut usize,
    vocab_size: *mut usize,
) -> TfStatus {
    guard(|| {
        let c = &deref(corpus, "corpus")?.inner;
        for (p, v) in [
            (num_docs, c.num_docs()),
            (num_tokens, c.num_tokens()),
            (vocab_size, c.vocab_size()),
        ] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Default settings for `num_topics` topics.
#[no_mangle]
pub extern "C" fn tf_hyperparams_default(num_topics: usize) -> TfHyperparams {
    let hp = LdaHyperparams::new(num_topics);
    TfHyperparams {
        num_topics,
        alpha: hp.alpha,
        beta: hp.beta,
        iterations: hp.iterations,
        seed: hp.seed,
    }
}

/// Trains a model by collapsed Gibbs sampling.
///
/// # Safety
/// `corpus` and `params` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tf_model_train(
    corpus: *const TfCorpus,
    params: *const TfHyperparams,
    out: *mut *mut TfModel,
) -> TfStatus {
    guard(|| {
        let corpus = &deref(corpus, "corpus")?.inner;
        let p = deref(params, "params")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let hp = LdaHyperparams {
            num_topics: p.num_topics,
            alpha: p.alpha,
            beta: p.beta,
            min_token_count: corpus.min_token_count(),
            iterations: p.iterations,
            seed: p.seed,
        };
        let model = train(corpus, &hp)?;
        write_out(
            out,
            Box::into_raw(Box::new(TfModel { inner: model })),
            "out",
        )
    })
}

/// Writes a model archive directory.
///
/// # Safety
/// `model` must be a live handle; `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tf_model_save(model: *const TfModel, dir: *const c_char) -> TfStatus {
    guard(|| {
        let model = deref(model, "model")?;
        write_model_archive(&model.inner, &path_arg(dir, "dir")?)?;
        Ok(())
    })
}

/// Loads a model archive trained on `corpus`. Fails with
/// `TfStatus::ArchiveMismatch` if it was trained on a different corpus.
///
/// # Safety
/// `dir` must be a NUL-terminated string, `corpus` a live handle, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tf_model_load(
    dir: *const c_char,
    corpus: *const TfCorpus,
    out: *mut *mut TfModel,
) -> TfStatus {
    guard(|| {
        let dir = path_arg(dir, "dir")?;
        let corpus = &deref(corpus, "corpus")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let model = read_model_archive(&dir, corpus)?;
        write_out(
            out,
            Box::into_raw(Box::new(TfModel { inner: model })),
            "out",
        )
    })
}

/// Releases a model. NULL is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tf_model_free(model: *mut TfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of topics, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tf_model_num_topics(model: *const TfModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.num_topics())
}

/// Writes the topic distribution of document `doc` into `out`, which must
/// hold exactly `len == num_topics` values.
///
/// # Safety
/// `model` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tf_model_doc_topics(
    model: *const TfModel,
    doc: usize,
    out: *mut f64,
    len: usize,
) -> TfStatus {
    guard(|| {
        let model = &deref(model, "model")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        if len != model.num_topics() {
            return Err(Fail(
                TfStatus::InvalidArgument,
                format!(
                    "buffer holds {len} values, model has {} topics",
                    model.num_topics()
                ),
            ));
        }
        let theta = model.doc_topic_distribution(doc)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&theta);
        Ok(())
    })
}

/// Most probable topic of document `doc`.
///
/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_model_hard_label(
    model: *const TfModel,
    doc: usize,
    out: *mut usize,
) -> TfStatus {
    guard(|| {
        let label = deref(model, "model")?.inner.hard_label(doc)?;
        write_out(out, label, "out")
    })
}

/// Normalized mutual information between two labelings of `len` documents.
///
/// # Safety
/// `x` and `y` must each point to `len` readable values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_nmi(
    x: *const u32,
    y: *const u32,
    len: usize,
    out: *mut f64,
) -> TfStatus {
    guard(|| {
        if x.is_null() || y.is_null() {
            return Err(null("labels"));
        }
        let x = std::slice::from_raw_parts(x, len).to_vec();
        let y = std::slice::from_raw_parts(y, len).to_vec();
        let v = nmi(&Clustering::from_labels(x), &Clustering::from_labels(y))?;
        write_out(out, v, "out")
    })
}

/// Mean and standard deviation of per-topic coherence over the top `top_m`
/// words.
///
/// # Safety
/// Handles must be live; `mean_col` and `sd` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_model_coherence(
    model: *const TfModel,
    corpus: *const TfCorpus,
    top_m: usize,
    mean_col: *mut f64,
    sd: *mut f64,
) -> TfStatus {
    guard(|| {
        let model = &deref(model, "model")?.inner;
        let corpus = &deref(corpus, "corpus")?.inner;
        if mean_col.is_null() || sd.is_null() {
            return Err(null("output"));
        }
        let r = coherence_report(model, corpus, top_m)?;
        mean_col.write(r.mean_col);
        sd.write(r.sd);
        Ok(())
    })
}

/// Full evaluation report as a JSON string. Release it with
/// [`tf_string_free`].
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_model_eval_json(
    model: *const TfModel,
    corpus: *const TfCorpus,
    top_m: usize,
    out: *mut *mut c_char,
) -> TfStatus {
    guard(|| {
        let model = &deref(model, "model")?.inner;
        let corpus = &deref(corpus, "corpus")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let json = evaluate(model, corpus, top_m)?.to_json().to_string();
        let c = CString::new(json).expect("JSON has no NUL bytes");
        write_out(out, c.into_raw(), "out")
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
