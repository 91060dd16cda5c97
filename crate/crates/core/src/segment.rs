//! Rule-based sentence splitting.
//!
//! A sentence ends at `.`, `!` or `?` when the terminator is followed by
//! whitespace and the next visible character is an uppercase letter, a digit
//! or an opening quote. A period closing a known abbreviation never ends a
//! sentence. All offsets count Unicode scalar values, not bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::Abbreviations;
use crate::{Language, Role};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    /// 0-based position within the document.
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum SegmentError {
    #[error("preset ADU list is empty")]
    NoAdus,
    #[error("preset ADU {0} has empty text")]
    EmptyAdu(usize),
}

const TERMINATORS: [char; 3] = ['.', '!', '?'];
const OPENING_QUOTES: [char; 8] = ['"', '\'', '“', '„', '«', '‘', '‚', '»'];

#[derive(Clone, Debug)]
pub struct Segmenter {
    abbreviations: Abbreviations,
}

impl Segmenter {
    pub fn new(abbreviations: Abbreviations) -> Self {
        Segmenter { abbreviations }
    }

    pub fn for_language(language: Language) -> Self {
        Segmenter::new(Abbreviations::builtin(language))
    }

    pub fn segment(&self, text: &str) -> Vec<SentenceSpan> {
        let chars: Vec<char> = text.chars().collect();
        let mut spans = Vec::new();
        let mut start = match chars.iter().position(|c| !c.is_whitespace()) {
            Some(s) => s,
            None => return spans,
        };

        let mut i = start;
        while i < chars.len() {
            if TERMINATORS.contains(&chars[i])
                && chars.get(i + 1).is_some_and(|c| c.is_whitespace())
            {
                let next = (i + 1..chars.len()).find(|&j| !chars[j].is_whitespace());
                if let Some(j) = next {
                    if opens_sentence(chars[j]) && !self.ends_abbreviation(&chars, start, i) {
                        push_span(&mut spans, &chars, start, i + 1);
                        start = j;
                        i = j;
                        continue;
                    }
                }
            }
            i += 1;
        }

        let mut end = chars.len();
        while end > start && chars[end - 1].is_whitespace() {
            end -= 1;
        }
        push_span(&mut spans, &chars, start, end);
        spans
    }

    /// Whether the period at `dot` closes a listed abbreviation.
    fn ends_abbreviation(&self, chars: &[char], sentence_start: usize, dot: usize) -> bool {
        if chars[dot] != '.' {
            return false;
        }
        let mut word_start = dot;
        while word_start > sentence_start && !chars[word_start - 1].is_whitespace() {
            word_start -= 1;
        }
        let word: String = chars[word_start..=dot]
            .iter()
            .skip_while(|c| matches!(c, '(' | '[') || OPENING_QUOTES.contains(c))
            .collect();
        self.abbreviations.contains(&word)
    }
}

fn opens_sentence(c: char) -> bool {
    c.is_uppercase() || c.is_ascii_digit() || OPENING_QUOTES.contains(&c)
}

fn push_span(spans: &mut Vec<SentenceSpan>, chars: &[char], start: usize, end: usize) {
    let text: String = chars[start..end].iter().collect();
    if text.trim().is_empty() {
        return;
    }
    spans.push(SentenceSpan {
        index: spans.len(),
        start,
        end,
        text,
    });
}

/// Splits `text` with the built-in abbreviation list for `language`.
pub fn segment(text: &str, language: Language) -> Vec<SentenceSpan> {
    Segmenter::for_language(language).segment(text)
}

/// A benchmark unit passed through without segmentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetAdu {
    pub text: String,
    pub role: Role,
}

impl PresetAdu {
    pub fn new(text: impl Into<String>, role: Role) -> Self {
        PresetAdu {
            text: text.into(),
            role,
        }
    }
}

/// One span per preset unit, in the given order. Offsets are assigned as if
/// the unit texts were joined by single spaces.
pub fn preset_segments(adus: &[PresetAdu]) -> Result<Vec<(SentenceSpan, Role)>, SegmentError> {
    if adus.is_empty() {
        return Err(SegmentError::NoAdus);
    }
    let mut offset = 0;
    let mut out = Vec::with_capacity(adus.len());
    for (index, adu) in adus.iter().enumerate() {
        let text = adu.text.trim();
        if text.is_empty() {
            return Err(SegmentError::EmptyAdu(index));
        }
        let len = text.chars().count();
        out.push((
            SentenceSpan {
                index,
                start: offset,
                end: offset + len,
                text: text.to_owned(),
            },
            adu.role,
        ));
        offset += len + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn texts(spans: &[SentenceSpan]) -> Vec<&str> {
        spans.iter().map(|s| s.text.as_str()).collect()
    }

    #[test]
    fn two_sentences() {
        let spans = segment("A claim. A premise!", Language::En);
        assert_eq!(texts(&spans), vec!["A claim.", "A premise!"]);
        assert_eq!((spans[1].start, spans[1].end), (9, 19));
        assert_eq!(spans[1].index, 1);
    }

    #[test]
    fn abbreviation_stays_whole() {
        assert_eq!(segment("e.g. this stays whole.", Language::En).len(), 1);
        let spans = segment("Ask Dr. Smith about it. He knows.", Language::En);
        assert_eq!(texts(&spans), vec!["Ask Dr. Smith about it.", "He knows."]);
        let spans = segment("Das gilt z.B. Lehrer. Und Schüler.", Language::De);
        assert_eq!(texts(&spans), vec!["Das gilt z.B. Lehrer.", "Und Schüler."]);
    }

    #[test]
    fn empty_and_blank() {
        assert!(segment("", Language::En).is_empty());
        assert!(segment("  \n\t ", Language::En).is_empty());
    }

    #[test]
    fn lowercase_continuation_is_not_a_break() {
        let spans = segment("It costs 3.5 dollars. it is cheap. 42 is the answer.", Language::En);
        assert_eq!(
            texts(&spans),
            vec!["It costs 3.5 dollars. it is cheap.", "42 is the answer."]
        );
    }

    #[test]
    fn quotes_and_terminator_runs() {
        let spans = segment("Really?! \"Yes,\" she said. Fine.", Language::En);
        assert_eq!(texts(&spans), vec!["Really?!", "\"Yes,\" she said.", "Fine."]);
    }

    #[test]
    fn multibyte_offsets_are_characters() {
        let text = "Über alles. Straße frei.";
        let spans = segment(text, Language::De);
        assert_eq!(spans.len(), 2);
        assert_eq!((spans[1].start, spans[1].end), (12, 24));
        let chars: Vec<char> = text.chars().collect();
        let slice: String = chars[spans[1].start..spans[1].end].iter().collect();
        assert_eq!(slice, spans[1].text);
    }

    #[test]
    fn preset_keeps_order_and_internal_periods() {
        let adus = vec![
            PresetAdu::new("First one", Role::MajorClaim),
            PresetAdu::new("Second. Still second", Role::Claim),
            PresetAdu::new("Third", Role::Premise),
        ];
        let spans = preset_segments(&adus).unwrap();
        assert_eq!(spans.len(), 3);
        assert_eq!(spans[1].0.text, "Second. Still second");
        assert_eq!(spans[2].1, Role::Premise);
        assert_eq!((spans[1].0.start, spans[1].0.end), (10, 30));
        assert_eq!(preset_segments(&[]), Err(SegmentError::NoAdus));
        assert_eq!(
            preset_segments(&[PresetAdu::new(" ", Role::Claim)]),
            Err(SegmentError::EmptyAdu(0))
        );
    }

    proptest! {
        #[test]
        fn lossless_coverage(text in "[A-Za-z0-9 .!?\n\"'e,]{0,80}") {
            let spans = segment(&text, Language::En);
            let chars: Vec<char> = text.chars().collect();
            let mut cursor = 0;
            for (k, s) in spans.iter().enumerate() {
                prop_assert_eq!(s.index, k);
                prop_assert!(s.start >= cursor && s.start < s.end && s.end <= chars.len());
                prop_assert!(chars[cursor..s.start].iter().all(|c| c.is_whitespace()));
                let slice: String = chars[s.start..s.end].iter().collect();
                prop_assert_eq!(&slice, &s.text);
                prop_assert!(!s.text.trim().is_empty());
                cursor = s.end;
            }
            prop_assert!(chars[cursor..].iter().all(|c| c.is_whitespace()));
            // every span but the last stops at a terminator
            for s in spans.iter().rev().skip(1) {
                prop_assert!(TERMINATORS.contains(&s.text.chars().last().unwrap()));
            }
        }

        #[test]
        fn resegmenting_a_sentence_is_identity(text in "[A-Za-z0-9 .!?\"e]{0,60}") {
            for s in segment(&text, Language::En) {
                let again = segment(&s.text, Language::En);
                prop_assert_eq!(again.len(), 1);
                prop_assert_eq!(&again[0].text, &s.text);
            }
        }
    }
}
