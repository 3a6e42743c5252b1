//! Manual and QA dataset loading, plus the tokenizer shared by every
//! other module.
//!
//! Token counts everywhere in the engine come from [`tokenize`]: maximal
//! runs of Unicode letters/digits are tokens, every punctuation character
//! is its own token, whitespace is discarded. This is deterministic and
//! language-neutral; it is not any model's tokenizer, so budgets are
//! relative, not absolute.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Phrase marking a question as unanswerable in a QA dataset.
pub const REFUSAL_SENTINEL: &str = "not found in context";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("source not found: {0}")]
    MissingSource(PathBuf),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("format error in dataset item {index}: {message}")]
    DatasetItem { index: usize, message: String },
}

/// A token with its byte span in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenSpan {
    pub start: usize,
    pub end: usize,
}

/// Segment `text` into tokens with byte spans.
pub fn tokenize(text: &str) -> Vec<TokenSpan> {
    let mut spans = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, ch) in text.char_indices() {
        if ch.is_alphanumeric() {
            if run_start.is_none() {
                run_start = Some(i);
            }
        } else {
            if let Some(start) = run_start.take() {
                spans.push(TokenSpan { start, end: i });
            }
            if !ch.is_whitespace() {
                // punctuation: one token per character
                spans.push(TokenSpan {
                    start: i,
                    end: i + ch.len_utf8(),
                });
            }
        }
    }
    if let Some(start) = run_start {
        spans.push(TokenSpan {
            start,
            end: text.len(),
        });
    }
    spans
}

/// Tokenize and return the token texts, case-folded.
pub fn tokenize_terms(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .map(|s| text[s.start..s.end].to_lowercase())
        .collect()
}

/// Number of tokens in `text`. Empty string is 0.
pub fn count_tokens(text: &str) -> usize {
    tokenize(text).len()
}

/// One page of a manual edition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManualPage {
    pub page_number: u32,
    pub text: String,
    pub token_count: usize,
}

impl ManualPage {
    pub fn new(page_number: u32, text: String) -> Self {
        let token_count = count_tokens(&text);
        ManualPage {
            page_number,
            text,
            token_count,
        }
    }
}

/// Ordered pages of one language edition of a manual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManualDocument {
    pub language: String,
    pub pages: Vec<ManualPage>,
    pub total_tokens: usize,
}

impl ManualDocument {
    /// Build a document from pages, sorting by page number.
    pub fn from_pages(
        language: &str,
        mut pages: Vec<ManualPage>,
        origin: &Path,
    ) -> Result<Self, CorpusError> {
        pages.sort_by_key(|p| p.page_number);
        for w in pages.windows(2) {
            if w[0].page_number == w[1].page_number {
                return Err(CorpusError::Format {
                    path: origin.to_path_buf(),
                    message: format!("duplicate page number {}", w[0].page_number),
                });
            }
        }
        let total_tokens = pages.iter().map(|p| p.token_count).sum();
        Ok(ManualDocument {
            language: language.to_string(),
            pages,
            total_tokens,
        })
    }

    pub fn page(&self, page_number: u32) -> Option<&ManualPage> {
        self.pages
            .binary_search_by_key(&page_number, |p| p.page_number)
            .ok()
            .map(|i| &self.pages[i])
    }
}

/// A question with its expected answer and target page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAItem {
    pub id: String,
    pub question: String,
    pub expected_answer: String,
    pub target_page: u32,
    pub answerable: bool,
}

/// True when `answer` is the refusal sentinel, after trimming and
/// case-folding.
pub fn is_refusal_sentinel(answer: &str) -> bool {
    answer.trim().to_lowercase() == REFUSAL_SENTINEL
}

/// Load a manual from a page directory (`<digits>.txt` / `.md`, numeric
/// stem is the page number) or a single file with `=== PAGE <n> ===`
/// separator lines.
pub fn load_manual(source: &Path, language: &str) -> Result<ManualDocument, CorpusError> {
    if source.is_dir() {
        load_manual_dir(source, language)
    } else if source.is_file() {
        load_manual_single_file(source, language)
    } else {
        Err(CorpusError::MissingSource(source.to_path_buf()))
    }
}

fn load_manual_dir(dir: &Path, language: &str) -> Result<ManualDocument, CorpusError> {
    let mut pages = Vec::new();
    let entries = fs::read_dir(dir).map_err(|e| CorpusError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for entry in entries {
        let entry = entry.map_err(|e| CorpusError::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if ext != "txt" && ext != "md" {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        if stem.is_empty() || !stem.chars().all(|c| c.is_ascii_digit()) {
            continue;
        }
        let page_number: u32 = stem.parse().map_err(|_| CorpusError::Format {
            path: path.clone(),
            message: format!("unparsable page number in file name: {stem}"),
        })?;
        let text = fs::read_to_string(&path).map_err(|e| CorpusError::Io {
            path: path.clone(),
            source: e,
        })?;
        pages.push(ManualPage::new(page_number, text));
    }
    if pages.is_empty() {
        return Err(CorpusError::Format {
            path: dir.to_path_buf(),
            message: "no page files (<digits>.txt or .md) found".to_string(),
        });
    }
    ManualDocument::from_pages(language, pages, dir)
}

fn load_manual_single_file(path: &Path, language: &str) -> Result<ManualDocument, CorpusError> {
    let content = fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut pages = Vec::new();
    let mut current: Option<(u32, String)> = None;
    for line in content.lines() {
        if let Some(n) = parse_page_marker(line) {
            if let Some((num, text)) = current.take() {
                pages.push(ManualPage::new(num, text));
            }
            current = Some((n, String::new()));
        } else if let Some((_, text)) = current.as_mut() {
            text.push_str(line);
            text.push('\n');
        } else if !line.trim().is_empty() {
            return Err(CorpusError::Format {
                path: path.to_path_buf(),
                message: "content before the first `=== PAGE <n> ===` marker".to_string(),
            });
        }
    }
    if let Some((num, text)) = current {
        pages.push(ManualPage::new(num, text));
    }
    if pages.is_empty() {
        return Err(CorpusError::Format {
            path: path.to_path_buf(),
            message: "no `=== PAGE <n> ===` markers found".to_string(),
        });
    }
    ManualDocument::from_pages(language, pages, path)
}

fn parse_page_marker(line: &str) -> Option<u32> {
    let line = line.trim();
    let rest = line.strip_prefix("=== PAGE ")?;
    let rest = rest.strip_suffix(" ===")?;
    rest.parse().ok()
}

#[derive(Debug, Deserialize)]
struct RawQAItem {
    #[serde(default)]
    id: Option<String>,
    question: Option<String>,
    answer: Option<String>,
    page: Option<i64>,
}

/// Load a QA dataset: a JSON array of `{question, answer, page}` objects
/// with an optional `id`. Missing ids become `q001`, `q002`, ... in file
/// order.
pub fn load_qa_dataset(path: &Path) -> Result<Vec<QAItem>, CorpusError> {
    if !path.is_file() {
        return Err(CorpusError::MissingSource(path.to_path_buf()));
    }
    let content = fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let raw: Vec<RawQAItem> =
        serde_json::from_str(&content).map_err(|e| CorpusError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    qa_items_from_raw(raw)
}

fn qa_items_from_raw(raw: Vec<RawQAItem>) -> Result<Vec<QAItem>, CorpusError> {
    let mut items = Vec::with_capacity(raw.len());
    for (index, r) in raw.into_iter().enumerate() {
        let question = r.question.ok_or(CorpusError::DatasetItem {
            index,
            message: "missing key `question`".to_string(),
        })?;
        let answer = r.answer.ok_or(CorpusError::DatasetItem {
            index,
            message: "missing key `answer`".to_string(),
        })?;
        let page = r.page.ok_or(CorpusError::DatasetItem {
            index,
            message: "missing key `page`".to_string(),
        })?;
        if page <= 0 {
            return Err(CorpusError::DatasetItem {
                index,
                message: format!("non-positive page number {page}"),
            });
        }
        let id = r.id.unwrap_or_else(|| format!("q{:03}", index + 1));
        let answerable = !is_refusal_sentinel(&answer);
        items.push(QAItem {
            id,
            question,
            expected_answer: answer,
            target_page: page as u32,
            answerable,
        });
    }
    Ok(items)
}
