//! Language-tagged transcription lines.
//!
//! ```text
//! line := span (WS '|' WS span)*
//! span := ('en:' | 'cmn:') WS payload (WS punct)?
//! ```
//!
//! An `en:` span is one ARPABET word; a `cmn:` span is a run of toned pinyin
//! syllables, one token each. Trailing punctuation attaches to the span's
//! last token.

use serde::{Deserialize, Serialize};

use super::FrontendError;
use crate::inventory::Lang;

/// Punctuation recognised as a trailing break marker.
pub const PUNCTUATION: [&str; 8] = [",", ".", "!", "?", "，", "。", "！", "？"];

/// Prosody channel value for a punctuation mark: 1 minor break,
/// 2 declarative end, 3 interrogative end.
pub fn prosody_id(punct: &str) -> Option<u8> {
    match punct {
        "," | "，" => Some(1),
        "." | "!" | "。" | "！" => Some(2),
        "?" | "？" => Some(3),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub lang: Lang,
    /// One ARPABET word or one pinyin syllable.
    pub payload: String,
    pub trailing_punct: Option<String>,
}

pub fn tokenize_tagged_line(line: &str) -> Result<Vec<TaggedToken>, FrontendError> {
    if line.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut tokens = Vec::new();
    for (span_idx, span) in line.split('|').enumerate() {
        let span_no = span_idx + 1;
        let span = span.trim();
        if span.is_empty() {
            return Err(FrontendError::EmptySpan { span: span_no });
        }
        let (tag, payload) = span
            .split_once(':')
            .ok_or(FrontendError::MissingLanguageTag { span: span_no })?;
        let lang: Lang = tag
            .parse()
            .map_err(|_| FrontendError::MissingLanguageTag { span: span_no })?;

        let mut words: Vec<&str> = payload.split_whitespace().collect();
        let mut punct = None;
        if let Some(last) = words.last_mut() {
            if let Some(p) = PUNCTUATION.iter().find(|p| last.ends_with(**p)) {
                punct = Some(p.to_string());
                *last = &last[..last.len() - p.len()];
                if last.is_empty() {
                    words.pop();
                }
            }
        }
        if words.is_empty() {
            return Err(FrontendError::EmptySpan { span: span_no });
        }

        match lang {
            Lang::En => tokens.push(TaggedToken {
                lang,
                payload: words.join(" "),
                trailing_punct: punct,
            }),
            Lang::Cmn => {
                let n = words.len();
                tokens.extend(words.into_iter().enumerate().map(|(i, w)| TaggedToken {
                    lang,
                    payload: w.to_string(),
                    trailing_punct: if i + 1 == n { punct.clone() } else { None },
                }));
            }
        }
    }
    Ok(tokens)
}
