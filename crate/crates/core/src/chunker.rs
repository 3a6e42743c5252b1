//! Sliding-window chunking of a manual into fixed-size overlapping token
//! windows with page provenance.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{tokenize, ManualDocument};

#[derive(Debug, Error)]
pub enum ChunkError {
    #[error("overlap ({overlap}) must be smaller than chunk size ({chunk_size})")]
    OverlapTooLarge { chunk_size: usize, overlap: usize },
    #[error("document has no tokens")]
    EmptyDocument,
}

/// One retrieval unit: a token window over the document-wide stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Chunk {
    pub chunk_id: u32,
    pub text: String,
    /// Offset into the document-wide token stream.
    pub token_start: usize,
    pub token_len: usize,
    /// Inclusive range of page numbers the window touches.
    pub page_span: (u32, u32),
}

impl Chunk {
    pub fn page_range(&self) -> RangeInclusive<u32> {
        self.page_span.0..=self.page_span.1
    }
}

/// A token in the document-wide stream: which page it is on and its byte
/// span within that page's text.
#[derive(Debug, Clone, Copy)]
struct DocToken {
    page_idx: usize,
    start: usize,
    end: usize,
}

fn document_tokens(doc: &ManualDocument) -> Vec<DocToken> {
    let mut tokens = Vec::with_capacity(doc.total_tokens);
    for (page_idx, page) in doc.pages.iter().enumerate() {
        for span in tokenize(&page.text) {
            tokens.push(DocToken {
                page_idx,
                start: span.start,
                end: span.end,
            });
        }
    }
    tokens
}

/// Render the text of a token range, slicing each page's original text
/// from the first to the last token of the range on that page.
fn render_window(doc: &ManualDocument, tokens: &[DocToken]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let page_idx = tokens[i].page_idx;
        let mut j = i;
        while j + 1 < tokens.len() && tokens[j + 1].page_idx == page_idx {
            j += 1;
        }
        let text = &doc.pages[page_idx].text;
        parts.push(text[tokens[i].start..tokens[j].end].to_string());
        i = j + 1;
    }
    parts.join("\n")
}

/// Split a document into overlapping token windows. Chunk `i` starts at
/// token offset `i * (chunk_size - overlap)`; only the final chunk may be
/// shorter than `chunk_size`.
pub fn chunk_document(
    doc: &ManualDocument,
    chunk_size: usize,
    overlap: usize,
) -> Result<Vec<Chunk>, ChunkError> {
    if overlap >= chunk_size {
        return Err(ChunkError::OverlapTooLarge {
            chunk_size,
            overlap,
        });
    }
    let tokens = document_tokens(doc);
    if tokens.is_empty() {
        return Err(ChunkError::EmptyDocument);
    }
    let stride = chunk_size - overlap;
    let n = tokens.len();
    let mut chunks = Vec::new();
    let mut start = 0usize;
    loop {
        let end = (start + chunk_size).min(n);
        let window = &tokens[start..end];
        let first_page = doc.pages[window[0].page_idx].page_number;
        let last_page = doc.pages[window[window.len() - 1].page_idx].page_number;
        chunks.push(Chunk {
            chunk_id: chunks.len() as u32,
            text: render_window(doc, window),
            token_start: start,
            token_len: end - start,
            page_span: (first_page, last_page),
        });
        if end == n {
            break;
        }
        start += stride;
    }
    Ok(chunks)
}
