//! Prompt rendering, chat endpoint access, answer extraction, and judge
//! verdicts.

pub mod client;
pub mod prompts;

pub use client::{ApiStyle, LlmClient, LlmError, MockScript, ModelAnswer, ModelEndpoint, prompt_hash};
pub use prompts::{
    extract_answer, is_refusal, parse_verdict, render_judge_prompt, render_question_prompt,
    JudgeVerdict, Verdict, JUDGE_TEMPLATE, QUESTION_TEMPLATE,
};

/// Ask the judge endpoint whether the model's answer conveys the same
/// information as the expected answer.
pub fn judge(
    judge_client: &LlmClient,
    question: &str,
    model_answer: &str,
    expected_answer: &str,
    tag: Option<&str>,
) -> Result<JudgeVerdict, LlmError> {
    let prompt = render_judge_prompt(question, model_answer, expected_answer);
    let response = judge_client.ask(&prompt, tag)?;
    Ok(parse_verdict(&response.raw))
}
