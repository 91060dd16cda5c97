//! Word lists driving the indicator features and the sentence splitter.
//!
//! Every list is a plain text file with one entry per line; blank lines and
//! lines starting with `#` are ignored. Built-in lists for English and German
//! are compiled in and can be replaced per file from a directory.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::Language;

/// A set of single- or multi-word phrases matched against lowercase tokens.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lexicon {
    phrases: Vec<Vec<String>>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Self {
        let mut phrases: Vec<Vec<String>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let phrase: Vec<String> = line.split_whitespace().map(str::to_lowercase).collect();
            if !phrases.contains(&phrase) {
                phrases.push(phrase);
            }
        }
        Lexicon { phrases }
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    /// Number of phrase occurrences in `words` (overlaps counted).
    pub fn count_in(&self, words: &[&str]) -> usize {
        let mut n = 0;
        for phrase in &self.phrases {
            if phrase.len() > words.len() {
                continue;
            }
            n += words
                .windows(phrase.len())
                .filter(|w| w.iter().zip(phrase).all(|(a, b)| *a == b))
                .count();
        }
        n
    }

    pub fn matches(&self, words: &[&str]) -> bool {
        self.count_in(words) > 0
    }
}

/// Abbreviations that suppress a sentence break after their final period.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Abbreviations(HashSet<String>);

impl Abbreviations {
    pub fn parse(text: &str) -> Self {
        Abbreviations(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn builtin(language: Language) -> Self {
        Self::parse(match language {
            Language::En => include_str!("../lexicons/en/abbreviations.txt"),
            Language::De => include_str!("../lexicons/de/abbreviations.txt"),
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(&word.to_lowercase())
    }
}

/// All lists needed by one language.
#[derive(Clone, Debug, PartialEq)]
pub struct Lexicons {
    pub language: Language,
    pub claim: Lexicon,
    pub premise: Lexicon,
    pub first_person: Lexicon,
    pub modal: Lexicon,
    pub subordinators: Lexicon,
    pub abbreviations: Abbreviations,
}

macro_rules! builtin_list {
    ($lang:expr, $file:literal) => {
        match $lang {
            Language::En => include_str!(concat!("../lexicons/en/", $file)),
            Language::De => include_str!(concat!("../lexicons/de/", $file)),
        }
    };
}

impl Lexicons {
    pub fn builtin(language: Language) -> Self {
        Lexicons {
            language,
            claim: Lexicon::parse(builtin_list!(language, "claim.txt")),
            premise: Lexicon::parse(builtin_list!(language, "premise.txt")),
            first_person: Lexicon::parse(builtin_list!(language, "first_person.txt")),
            modal: Lexicon::parse(builtin_list!(language, "modal.txt")),
            subordinators: Lexicon::parse(builtin_list!(language, "subordinators.txt")),
            abbreviations: Abbreviations::builtin(language),
        }
    }

    /// Loads `claim.txt`, `premise.txt`, `first_person.txt`, `modal.txt`,
    /// `subordinators.txt` and `abbreviations.txt` from `dir`. Files that do
    /// not exist keep the built-in list.
    pub fn load_dir(dir: &Path, language: Language) -> io::Result<Self> {
        if !dir.is_dir() {
            return Err(io::Error::new(
                io::ErrorKind::NotFound,
                format!("lexicon directory {} not found", dir.display()),
            ));
        }
        let mut lex = Self::builtin(language);
        let file = |name: &str| -> Option<PathBuf> {
            let p = dir.join(name);
            p.is_file().then_some(p)
        };
        if let Some(p) = file("claim.txt") {
            lex.claim = Lexicon::load(&p)?;
        }
        if let Some(p) = file("premise.txt") {
            lex.premise = Lexicon::load(&p)?;
        }
        if let Some(p) = file("first_person.txt") {
            lex.first_person = Lexicon::load(&p)?;
        }
        if let Some(p) = file("modal.txt") {
            lex.modal = Lexicon::load(&p)?;
        }
        if let Some(p) = file("subordinators.txt") {
            lex.subordinators = Lexicon::load(&p)?;
        }
        if let Some(p) = file("abbreviations.txt") {
            lex.abbreviations = Abbreviations::load(&p)?;
        }
        Ok(lex)
    }
}
