//! Tab-separated training files.
//!
//! Sentence tasks (`adu`, `claim-premise`) take `label<TAB>text` or
//! `label<TAB>index<TAB>count<TAB>text`, where index and count give the
//! sentence position within its document. The relation task takes
//! `label<TAB>premise<TAB>claim`. Labels are the class names of the task or
//! `0`/`1`; lines starting with `#` are ignored.

use std::io::Read;

use thiserror::Error;

use crate::classify::{FeatureSchema, Task};
use crate::classify::relation_features;
use crate::features::{embed_text, extract_features, EmbeddingTable};
use crate::lexicon::Lexicons;
use crate::segment::SentenceSpan;

#[derive(Debug, Error)]
pub enum TrainingError {
    #[error("line {line}: {source}")]
    Csv { line: u64, source: csv::Error },
    #[error("line {line}: expected {expected} columns, found {found}")]
    Columns { line: u64, expected: &'static str, found: usize },
    #[error("line {line}: unknown label {label:?} for task {task}")]
    Label { line: u64, label: String, task: Task },
    #[error("line {line}: bad sentence position: {message}")]
    Position { line: u64, message: String },
    #[error("no training examples")]
    Empty,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingData {
    pub schema: FeatureSchema,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

fn parse_label(task: Task, raw: &str, line: u64) -> Result<usize, TrainingError> {
    let raw = raw.trim();
    let names = task.class_labels();
    match raw {
        "0" => Ok(0),
        "1" => Ok(1),
        _ => names
            .iter()
            .position(|n| n.eq_ignore_ascii_case(raw))
            .ok_or_else(|| TrainingError::Label {
                line,
                label: raw.to_owned(),
                task,
            }),
    }
}

/// Reads examples for `task` and turns them into dense feature vectors.
pub fn read_training_data<R: Read>(
    reader: R,
    task: Task,
    vectors: &EmbeddingTable,
    lexicons: &Lexicons,
) -> Result<TrainingData, TrainingError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|source| TrainingError::Csv {
            line: source.position().map_or(0, |p| p.line()),
            source,
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let label = parse_label(task, &record[0], line)?;
        let x = match task {
            Task::Adu | Task::ClaimPremise => {
                let (index, count, text) = match record.len() {
                    2 => (0, 1, &record[1]),
                    4 => {
                        let num = |i: usize| {
                            record[i].trim().parse::<usize>().map_err(|e| TrainingError::Position {
                                line,
                                message: e.to_string(),
                            })
                        };
                        let (index, count) = (num(1)?, num(2)?);
                        if count == 0 || index >= count {
                            return Err(TrainingError::Position {
                                line,
                                message: format!("index {index} not below count {count}"),
                            });
                        }
                        (index, count, &record[3])
                    }
                    found => {
                        return Err(TrainingError::Columns {
                            line,
                            expected: "2 or 4",
                            found,
                        })
                    }
                };
                let text = text.trim();
                let span = SentenceSpan {
                    index,
                    start: 0,
                    end: text.chars().count(),
                    text: text.to_owned(),
                };
                extract_features(&span, count, vectors, lexicons).to_dense()
            }
            Task::Relation => {
                if record.len() != 3 {
                    return Err(TrainingError::Columns {
                        line,
                        expected: "3",
                        found: record.len(),
                    });
                }
                let p = embed_text(&record[1], vectors).values;
                let c = embed_text(&record[2], vectors).values;
                relation_features(&p, &c).expect("same table, same dimension")
            }
        };
        features.push(x);
        labels.push(label);
    }
    if features.is_empty() {
        return Err(TrainingError::Empty);
    }
    let schema = match task {
        Task::Relation => FeatureSchema::relation(vectors.dimension()),
        _ => FeatureSchema::sentence(vectors.dimension()),
    };
    Ok(TrainingData {
        schema,
        features,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Language;

    fn table() -> EmbeddingTable {
        let mut t = EmbeddingTable::new(2);
        t.insert("good", vec![1.0, 0.0]).unwrap();
        t.insert("bad", vec![0.0, 1.0]).unwrap();
        t
    }

    #[test]
    fn sentence_rows() {
        let data = "# comment\nargumentative\tThis is good.\n0\t2\t5\tThe weather was bad.\n\nnon-argumentative\tHello.\n";
        let d = read_training_data(data.as_bytes(), Task::Adu, &table(), &Lexicons::builtin(Language::En)).unwrap();
        assert_eq!(d.labels, vec![1, 0, 0]);
        assert_eq!(d.features[0].len(), 12);
        assert_eq!(d.schema, FeatureSchema::sentence(2));
    }

    #[test]
    fn relation_rows() {
        let data = "support\tgood\tgood\nattack\tbad\tgood\n";
        let d = read_training_data(data.as_bytes(), Task::Relation, &table(), &Lexicons::builtin(Language::En)).unwrap();
        assert_eq!(d.labels, vec![0, 1]);
        assert_eq!(d.features[1], vec![0.0, 1.0, 1.0, 0.0, -1.0, 1.0]);
    }

    #[test]
    fn bad_rows() {
        let lex = Lexicons::builtin(Language::En);
        assert!(matches!(
            read_training_data("maybe\ttext\n".as_bytes(), Task::Adu, &table(), &lex),
            Err(TrainingError::Label { line: 1, .. })
        ));
        assert!(matches!(
            read_training_data("support\tonly premise\n".as_bytes(), Task::Relation, &table(), &lex),
            Err(TrainingError::Columns { .. })
        ));
        assert!(matches!(
            read_training_data("1\t5\t5\ttext\n".as_bytes(), Task::ClaimPremise, &table(), &lex),
            Err(TrainingError::Position { .. })
        ));
        assert!(matches!(
            read_training_data("# nothing\n".as_bytes(), Task::Adu, &table(), &lex),
            Err(TrainingError::Empty)
        ));
    }
}
