//! Per-sentence features: structural counts, indicator flags, syntactic
//! proxies and averaged word-vector embeddings.
//!
//! Syntactic proxies stand in for parse-tree statistics:
//!
//! * clause count = 1 + commas + subordinators
//! * depth = 1 + the largest value of (open brackets + open subordinate
//!   clauses) seen while scanning the tokens, where a subordinator opens a
//!   clause and the next `,` `;` or `:` closes one.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::Lexicons;
use crate::segment::SentenceSpan;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("cannot read vectors: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: non-numeric field {field:?}")]
    NonNumeric { line: usize, field: String },
    #[error("no vectors")]
    Empty,
    #[error("vector dimensions differ: {0} vs {1}")]
    VectorDimensions(usize, usize),
}

/// One lowercase token; punctuation tokens are kept for counting but never
/// looked up in the embedding table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub punct: bool,
}

/// Lowercases and splits on whitespace and punctuation boundaries. A word is
/// a run of alphanumeric characters, optionally joined by single inner
/// apostrophes; every other visible character is its own punctuation token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric()
                    || (matches!(chars[i], '\'' | '’')
                        && i + 1 < chars.len()
                        && chars[i + 1].is_alphanumeric()
                        && i > start))
            {
                i += 1;
            }
            tokens.push(Token {
                text: chars[start..i].iter().collect::<String>().to_lowercase(),
                punct: false,
            });
        } else {
            tokens.push(Token {
                text: c.to_string(),
                punct: true,
            });
            i += 1;
        }
    }
    tokens
}

/// Word vectors keyed by lowercase token.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    entries: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Self {
        EmbeddingTable {
            dimension,
            entries: HashMap::new(),
        }
    }

    /// Inserts unless the (lowercased) token is already present.
    pub fn insert(&mut self, token: &str, vector: Vec<f64>) -> Result<(), FeatureError> {
        if vector.len() != self.dimension {
            return Err(FeatureError::VectorDimensions(self.dimension, vector.len()));
        }
        self.entries.entry(token.to_lowercase()).or_insert(vector);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        match self.entries.get(token) {
            Some(v) => Some(v),
            None => self.entries.get(&token.to_lowercase()).map(Vec::as_slice),
        }
    }

    /// Multiplies every vector by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        EmbeddingTable {
            dimension: self.dimension,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|x| x * factor).collect()))
                .collect(),
        }
    }

    /// Parses the word-vector text format: a token followed by
    /// space-separated decimals on every line. A leading `count dimension`
    /// header line is skipped.
    pub fn read<R: BufRead>(reader: R, expected_dimension: Option<usize>) -> Result<Self, FeatureError> {
        let mut dimension = expected_dimension;
        let mut table: Option<EmbeddingTable> = None;
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = n + 1;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if n == 0 && rest.len() == 1 && token.parse::<usize>().is_ok() && rest[0].parse::<usize>().is_ok() {
                continue;
            }
            let values = rest
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| FeatureError::NonNumeric {
                        line: line_no,
                        field: (*f).to_owned(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let dim = *dimension.get_or_insert(values.len());
            if values.len() != dim || dim == 0 {
                return Err(FeatureError::DimensionMismatch {
                    line: line_no,
                    expected: dim,
                    found: values.len(),
                });
            }
            table
                .get_or_insert_with(|| EmbeddingTable::new(dim))
                .insert(token, values)?;
        }
        table.ok_or(FeatureError::Empty)
    }
}

/// Loads a word-vector text file.
pub fn load_vectors(path: &Path, expected_dimension: Option<usize>) -> Result<EmbeddingTable, FeatureError> {
    EmbeddingTable::read(BufReader::new(File::open(path)?), expected_dimension)
}

/// Mean word vector of a sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct SentenceEmbedding {
    pub values: Vec<f64>,
    /// Number of tokens found in the table; zero means the vector is the
    /// all-zero fallback.
    pub found: usize,
}

impl SentenceEmbedding {
    pub fn is_oov(&self) -> bool {
        self.found == 0
    }
}

pub fn sentence_embedding<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable) -> SentenceEmbedding {
    let mut sum = vec![0.0; table.dimension()];
    let mut found = 0;
    for t in tokens {
        if let Some(v) = table.get(t.as_ref()) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            found += 1;
        }
    }
    if found > 0 {
        let n = found as f64;
        sum.iter_mut().for_each(|s| *s /= n);
    }
    SentenceEmbedding { values: sum, found }
}

/// Tokenizes `text` and averages the vectors of its word tokens.
pub fn embed_text(text: &str, table: &EmbeddingTable) -> SentenceEmbedding {
    let words: Vec<String> = tokenize(text)
        .into_iter()
        .filter(|t| !t.punct)
        .map(|t| t.text)
        .collect();
    sentence_embedding(&words, table)
}

/// Cosine similarity result; `zero_input` is set when either vector is all
/// zeros, in which case `value` is 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cosine {
    pub value: f64,
    pub zero_input: bool,
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<Cosine, FeatureError> {
    if a.len() != b.len() {
        return Err(FeatureError::VectorDimensions(a.len(), b.len()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(Cosine {
            value: 0.0,
            zero_input: true,
        });
    }
    Ok(Cosine {
        value: (dot / (na * nb)).clamp(-1.0, 1.0),
        zero_input: false,
    })
}

/// Number of handcrafted (non-embedding) slots in [`FeatureVector::to_dense`].
pub const HANDCRAFTED_FEATURES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub punctuation_count: usize,
    pub token_count: usize,
    pub sentence_index: usize,
    /// `index / (count - 1)`, 0 for single-sentence documents.
    pub relative_position: f64,
    pub claim_indicator: bool,
    pub premise_indicator: bool,
    pub first_person: bool,
    pub modal_verb: bool,
    pub clause_count: usize,
    pub depth: usize,
    pub embedding: Vec<f64>,
    pub embedding_oov: bool,
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

impl FeatureVector {
    /// Dense classifier input. Counts enter as `ln(1 + n)`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(HANDCRAFTED_FEATURES + self.embedding.len());
        v.push((self.punctuation_count as f64).ln_1p());
        v.push((self.token_count as f64).ln_1p());
        v.push((self.sentence_index as f64).ln_1p());
        v.push(self.relative_position);
        v.push(flag(self.claim_indicator));
        v.push(flag(self.premise_indicator));
        v.push(flag(self.first_person));
        v.push(flag(self.modal_verb));
        v.push((self.clause_count as f64).ln_1p());
        v.push((self.depth as f64).ln_1p());
        v.extend_from_slice(&self.embedding);
        v
    }
}

/// Computes the full feature vector of one sentence.
pub fn extract_features(
    span: &SentenceSpan,
    doc_sentence_count: usize,
    table: &EmbeddingTable,
    lexicons: &Lexicons,
) -> FeatureVector {
    let tokens = tokenize(&span.text);
    let words: Vec<&str> = tokens
        .iter()
        .filter(|t| !t.punct)
        .map(|t| t.text.as_str())
        .collect();
    let punctuation_count = tokens.iter().filter(|t| t.punct).count();

    let subordinators = lexicons.subordinators.count_in(&words);
    let commas = tokens.iter().filter(|t| t.text == ",").count();

    let mut brackets = 0usize;
    let mut clauses = 0usize;
    let mut deepest = 0usize;
    for t in &tokens {
        if t.punct {
            match t.text.as_str() {
                "(" | "[" | "{" => brackets += 1,
                ")" | "]" | "}" => brackets = brackets.saturating_sub(1),
                "," | ";" | ":" => clauses = clauses.saturating_sub(1),
                _ => {}
            }
        } else if lexicons.subordinators.matches(&[t.text.as_str()]) {
            clauses += 1;
        }
        deepest = deepest.max(brackets + clauses);
    }

    let embedding = sentence_embedding(&words, table);
    let relative_position = if doc_sentence_count > 1 {
        (span.index as f64 / (doc_sentence_count - 1) as f64).clamp(0.0, 1.0)
    } else {
        0.0
    };

    FeatureVector {
        punctuation_count,
        token_count: words.len(),
        sentence_index: span.index,
        relative_position,
        claim_indicator: lexicons.claim.matches(&words),
        premise_indicator: lexicons.premise.matches(&words),
        first_person: lexicons.first_person.matches(&words),
        modal_verb: lexicons.modal.matches(&words),
        clause_count: 1 + commas + subordinators,
        depth: 1 + deepest,
        embedding_oov: embedding.is_oov(),
        embedding: embedding.values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Language;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn toy_table() -> EmbeddingTable {
        EmbeddingTable::read("a 1.0 0.0\nb 0.0 1.0\n".as_bytes(), None).unwrap()
    }

    fn span(index: usize, text: &str) -> SentenceSpan {
        SentenceSpan {
            index,
            start: 0,
            end: text.chars().count(),
            text: text.into(),
        }
    }

    #[test]
    fn load_two_line_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.txt");
        std::fs::write(&path, "a 1.0 0.0\nb 0.0 1.0\n").unwrap();
        let t = load_vectors(&path, None).unwrap();
        assert_eq!(t.dimension(), 2);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("A"), Some(&[1.0, 0.0][..]));
    }

    #[test]
    fn load_errors() {
        let err = EmbeddingTable::read("a 1 0\nb 1 2 3\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, FeatureError::DimensionMismatch { line: 2, expected: 2, found: 3 }));
        let err = EmbeddingTable::read("a 1 0\n".as_bytes(), Some(3)).unwrap_err();
        assert!(matches!(err, FeatureError::DimensionMismatch { .. }));
        let err = EmbeddingTable::read("".as_bytes(), None).unwrap_err();
        assert_eq!(err.to_string(), "no vectors");
        let err = EmbeddingTable::read("a 1 x\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, FeatureError::NonNumeric { line: 1, .. }));
        assert!(load_vectors(Path::new("/nonexistent/vectors.txt"), None).is_err());
    }

    #[test]
    fn duplicate_tokens_keep_first_and_header_is_skipped() {
        let t = EmbeddingTable::read("2 2\nx 1 1\nX 5 5\n".as_bytes(), None).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get("x"), Some(&[1.0, 1.0][..]));
    }

    #[test]
    fn mean_embeddings() {
        let t = toy_table();
        assert_eq!(sentence_embedding(&["a", "b"], &t).values, vec![0.5, 0.5]);
        assert_eq!(sentence_embedding(&["a", "a"], &t).values, vec![1.0, 0.0]);
        let oov = sentence_embedding(&["zzz"], &t);
        assert_eq!(oov.values, vec![0.0, 0.0]);
        assert!(oov.is_oov());
    }

    #[test]
    fn tokenizer() {
        let toks = tokenize("I don't know, (really)!");
        let texts: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec!["i", "don't", "know", ",", "(", "really", ")", "!"]);
        assert_eq!(toks.iter().filter(|t| t.punct).count(), 4);
    }

    #[test]
    fn cosine_examples() {
        let v = [0.3, -2.0, 5.0];
        assert_abs_diff_eq!(cosine(&v, &v).unwrap().value, 1.0, epsilon = 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap().value, 0.0);
        assert_eq!(cosine(&[1.0, 0.0], &[-1.0, 0.0]).unwrap().value, -1.0);
        let z = cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(z.zero_input && z.value == 0.0);
        assert!(cosine(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn first_person_and_position() {
        let lex = Lexicons::builtin(Language::En);
        let fv = extract_features(&span(0, "I believe that X."), 4, &toy_table(), &lex);
        assert!(fv.first_person);
        assert_eq!(fv.relative_position, 0.0);
        assert_eq!(fv.sentence_index, 0);
        assert_eq!(fv.token_count, 4);
        assert_eq!(fv.punctuation_count, 1);
        let last = extract_features(&span(3, "Last."), 4, &toy_table(), &lex);
        assert_eq!(last.relative_position, 1.0);
    }

    #[test]
    fn claim_indicator_and_modal() {
        let lex = Lexicons::builtin(Language::En);
        let fv = extract_features(&span(1, "Therefore, X holds."), 3, &toy_table(), &lex);
        assert!(fv.claim_indicator);
        assert!(!fv.premise_indicator);
        let fv = extract_features(&span(1, "Schools should open."), 3, &toy_table(), &lex);
        assert!(fv.modal_verb);
        let fv = extract_features(&span(1, "For example, it rains."), 3, &toy_table(), &lex);
        assert!(fv.premise_indicator);
        assert!(!fv.modal_verb);
    }

    #[test]
    fn syntactic_proxies() {
        let lex = Lexicons::builtin(Language::En);
        let fv = extract_features(&span(0, "Although it rains (a lot), we go because we must."), 1, &toy_table(), &lex);
        // although + because, one comma
        assert_eq!(fv.clause_count, 4);
        // "although" clause plus the bracket are open together
        assert_eq!(fv.depth, 3);
        assert_eq!(fv.to_dense().len(), HANDCRAFTED_FEATURES + 2);
    }

    #[test]
    fn german_features() {
        let lex = Lexicons::builtin(Language::De);
        let fv = extract_features(&span(0, "Wir sollten das ändern, weil es hilft."), 2, &toy_table(), &lex);
        assert!(fv.first_person && fv.modal_verb && fv.premise_indicator && fv.claim_indicator);
    }

    proptest! {
        #[test]
        fn embedding_is_permutation_invariant(mut idx in prop::collection::vec(0usize..4, 1..12), seed in any::<u64>()) {
            let t = EmbeddingTable::read("a 1 2\nb -3 0.5\nc 0.25 7\n".as_bytes(), None).unwrap();
            let words = ["a", "b", "c", "zz"];
            let tokens: Vec<&str> = idx.iter().map(|&i| words[i]).collect();
            let before = sentence_embedding(&tokens, &t);
            let k = (seed as usize) % idx.len();
            idx.rotate_left(k);
            idx.reverse();
            let tokens: Vec<&str> = idx.iter().map(|&i| words[i]).collect();
            let after = sentence_embedding(&tokens, &t);
            prop_assert_eq!(before.found, after.found);
            for (x, y) in before.values.iter().zip(&after.values) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn scaling_preserves_cosine(c in 0.01f64..100.0) {
            let t = EmbeddingTable::read("a 1 2\nb -3 0.5\nc 0.25 7\n".as_bytes(), None).unwrap();
            let s = t.scaled(c);
            let e1 = sentence_embedding(&["a", "b"], &t);
            let e2 = sentence_embedding(&["c", "b", "c"], &t);
            let f1 = sentence_embedding(&["a", "b"], &s);
            let f2 = sentence_embedding(&["c", "b", "c"], &s);
            for (x, y) in e1.values.iter().zip(&f1.values) {
                prop_assert!((x * c - y).abs() < 1e-9 * (1.0 + y.abs()));
            }
            let before = cosine(&e1.values, &e2.values).unwrap().value;
            let after = cosine(&f1.values, &f2.values).unwrap().value;
            prop_assert!((before - after).abs() < 1e-12);
        }
    }
}
