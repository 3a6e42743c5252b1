//! The two prompt templates and answer/verdict parsing.
//!
//! Templates are fixed text with named `{placeholder}` slots. Substituted
//! values are never rescanned, so a context containing a literal
//! `{question}` cannot corrupt the render.

use regex::Regex;
use std::sync::OnceLock;

pub const QUESTION_TEMPLATE: &str = include_str!("templates/question_prompt.txt");
pub const JUDGE_TEMPLATE: &str = include_str!("templates/judge_prompt.txt");

/// Single-pass placeholder substitution.
fn fill(template: &str, slots: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    'outer: while !rest.is_empty() {
        // earliest placeholder occurrence wins
        let mut best: Option<(usize, &str, &str)> = None;
        for (name, value) in slots {
            let pattern = format!("{{{name}}}");
            if let Some(pos) = rest.find(&pattern) {
                if best.map_or(true, |(b, _, _)| pos < b) {
                    best = Some((pos, *name, *value));
                }
            }
        }
        match best {
            Some((pos, name, value)) => {
                out.push_str(&rest[..pos]);
                out.push_str(value);
                rest = &rest[pos + name.len() + 2..];
            }
            None => {
                out.push_str(rest);
                break 'outer;
            }
        }
    }
    out
}

/// Render the question-answering prompt.
pub fn render_question_prompt(context_text: &str, question: &str) -> String {
    fill(
        QUESTION_TEMPLATE,
        &[("context", context_text), ("question", question)],
    )
}

/// Render the answer-comparison prompt for the judge. The model's answer
/// goes into ANSWER_ONE, the expected answer into ANSWER_TWO.
pub fn render_judge_prompt(question: &str, model_answer: &str, expected_answer: &str) -> String {
    fill(
        JUDGE_TEMPLATE,
        &[
            ("question", question),
            ("model_answer", model_answer),
            ("expected_answer", expected_answer),
        ],
    )
}

fn answer_tag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?is)<answer>(.*?)</answer>").unwrap())
}

fn think_block_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?is)<think>.*?</think>").unwrap())
}

/// Pull the answer text out of a raw model response: the contents of the
/// last `<answer>...</answer>` pair, or the response with any
/// `<think>...</think>` blocks stripped.
pub fn extract_answer(raw: &str) -> String {
    if let Some(m) = answer_tag_re().captures_iter(raw).last() {
        return m.get(1).map_or("", |g| g.as_str()).trim().to_string();
    }
    think_block_re().replace_all(raw, "").trim().to_string()
}

/// Refusal check on the model side: the whole answer is "Unknown" (bare
/// word, trailing punctuation tolerated) or contains the refusal phrase
/// anywhere, since models tend to wrap it in a sentence.
pub fn is_refusal(extracted: &str) -> bool {
    let folded = extracted.trim().to_lowercase();
    let bare = folded.trim_end_matches(['.', '!']);
    bare == "unknown" || folded.contains("not found in context")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unparseable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgeVerdict {
    pub verdict: Verdict,
    pub raw: String,
}

fn upper_answer_tag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?is)<ANSWER>(.*?)</ANSWER>").unwrap())
}

fn yes_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\byes\b").unwrap())
}

fn no_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\bno\b").unwrap())
}

/// Parse a judge response: search inside `<ANSWER>` when present, else
/// the whole text, for a standalone yes or no. Both or neither present
/// makes the verdict unparseable.
pub fn parse_verdict(raw: &str) -> JudgeVerdict {
    let haystack = upper_answer_tag_re()
        .captures_iter(raw)
        .last()
        .and_then(|c| c.get(1))
        .map_or(raw, |g| g.as_str());
    let yes = yes_re().is_match(haystack);
    let no = no_re().is_match(haystack);
    let verdict = match (yes, no) {
        (true, false) => Verdict::Yes,
        (false, true) => Verdict::No,
        _ => Verdict::Unparseable,
    };
    JudgeVerdict {
        verdict,
        raw: raw.to_string(),
    }
}
