//! Long-context prompt building: the target page plus surrounding pages
//! as noise, in original document order, up to a token budget.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ManualDocument;

#[derive(Debug, Error)]
pub enum ContextError {
    #[error("page {0} does not exist in the document")]
    UnknownTargetPage(u32),
}

/// Which neighbor is tried first when growing the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionOrder {
    AfterFirst,
    BeforeFirst,
}

/// A contiguous run of pages around a target page.
#[derive(Debug, Clone)]
pub struct ContextWindow {
    /// Page numbers, contiguous and ascending.
    pub pages: Vec<u32>,
    pub token_count: usize,
    pub target_page: u32,
    pub budget: usize,
    /// Set when the target page alone already exceeds the budget.
    pub budget_exceeded: bool,
}

/// Grow a window around `target_page`, alternating one page after the
/// current range and one page before it (skipping an exhausted side),
/// stopping before the first addition that would exceed `budget`. The
/// full target page is always included.
pub fn build_noise_context(
    doc: &ManualDocument,
    target_page: u32,
    budget: usize,
    order: ExpansionOrder,
) -> Result<ContextWindow, ContextError> {
    let target_idx = doc
        .pages
        .iter()
        .position(|p| p.page_number == target_page)
        .ok_or(ContextError::UnknownTargetPage(target_page))?;

    let mut token_count = doc.pages[target_idx].token_count;
    if token_count > budget {
        return Ok(ContextWindow {
            pages: vec![target_page],
            token_count,
            target_page,
            budget,
            budget_exceeded: true,
        });
    }

    let mut lo = target_idx;
    let mut hi = target_idx;
    let mut after_turn = order == ExpansionOrder::AfterFirst;
    loop {
        let after_open = hi + 1 < doc.pages.len();
        let before_open = lo > 0;
        if !after_open && !before_open {
            break;
        }
        let take_after = if after_open && before_open {
            after_turn
        } else {
            after_open
        };
        let candidate = if take_after { hi + 1 } else { lo - 1 };
        if token_count + doc.pages[candidate].token_count > budget {
            break;
        }
        token_count += doc.pages[candidate].token_count;
        if take_after {
            hi = candidate;
        } else {
            lo = candidate;
        }
        after_turn = !after_turn;
    }

    Ok(ContextWindow {
        pages: doc.pages[lo..=hi].iter().map(|p| p.page_number).collect(),
        token_count,
        target_page,
        budget,
        budget_exceeded: false,
    })
}

/// The entire manual as one window. The target-page field is set to the
/// first page by convention.
pub fn full_manual_context(doc: &ManualDocument) -> ContextWindow {
    ContextWindow {
        pages: doc.pages.iter().map(|p| p.page_number).collect(),
        token_count: doc.total_tokens,
        target_page: doc.pages.first().map(|p| p.page_number).unwrap_or(1),
        budget: doc.total_tokens,
        budget_exceeded: false,
    }
}

/// Join the window's page texts in order, each preceded by a
/// `--- Page <n> ---` marker line.
pub fn render_context_text(doc: &ManualDocument, window: &ContextWindow) -> String {
    let mut out = String::new();
    for &page_number in &window.pages {
        let page = doc.page(page_number).expect("window pages exist in doc");
        out.push_str(&format!("--- Page {page_number} ---\n"));
        out.push_str(&page.text);
        if !page.text.ends_with('\n') {
            out.push('\n');
        }
    }
    out
}
