use sha2::{Digest, Sha256};

use crate::grammar::{serialize_grammar, SyncGrammar};

/// The instruction template. `{{GRAMMAR}}` takes the serialized grammar
/// (one rule per line, newline-terminated), `{{SENTENCE}}` the input words.
pub const PROMPT_TEMPLATE: &str = include_str!("../../data/prompt_template.txt");

const GRAMMAR_SLOT: &str = "{{GRAMMAR}}";
const SENTENCE_SLOT: &str = "{{SENTENCE}}";

/// The answer marker models are told to use.
pub const ANSWER_MARKER: &str = "Final answer:";

fn template_parts() -> (&'static str, &'static str, &'static str) {
    let (head, rest) = PROMPT_TEMPLATE.split_once(GRAMMAR_SLOT).expect("grammar slot");
    let (middle, tail) = rest.split_once(SENTENCE_SLOT).expect("sentence slot");
    (head, middle, tail)
}

pub fn render_prompt<S: AsRef<str>>(g: &SyncGrammar, sentence: &[S]) -> String {
    render_prompt_text(&serialize_grammar(g), sentence)
}

/// Renders with an already serialized grammar.
pub fn render_prompt_text<S: AsRef<str>>(grammar_text: &str, sentence: &[S]) -> String {
    let (head, middle, tail) = template_parts();
    let words: Vec<&str> = sentence.iter().map(AsRef::as_ref).collect();
    let mut out = String::with_capacity(head.len() + grammar_text.len() + middle.len() + tail.len() + 64);
    out.push_str(head);
    out.push_str(grammar_text);
    out.push_str(middle);
    out.push_str(&words.join(" "));
    out.push_str(tail);
    out
}

/// Recovers the grammar text and input words from a rendered prompt.
pub fn parse_prompt(prompt: &str) -> Option<(&str, Vec<&str>)> {
    let (head, middle, tail) = template_parts();
    let body = prompt.strip_prefix(head)?.strip_suffix(tail)?;
    let (grammar, sentence) = body.rsplit_once(middle)?;
    Some((grammar, sentence.split_whitespace().collect()))
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Pulls the answer out of a model response.
///
/// Takes the text after the last answer marker, strips surrounding
/// whitespace and backticks and one trailing period, and splits on
/// whitespace. `None` when the marker is missing.
pub fn extract_answer(response: &str) -> Option<Vec<String>> {
    let idx = response.rfind(ANSWER_MARKER)?;
    let mut answer = response[idx + ANSWER_MARKER.len()..].trim().trim_matches('`').trim();
    if let Some(stripped) = answer.strip_suffix('.') {
        answer = stripped.trim_end().trim_end_matches('`').trim_end();
    }
    Some(answer.split_whitespace().map(str::to_string).collect())
}
