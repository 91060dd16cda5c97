use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{AifError, AifOptions};
use crate::graph::ArgumentGraph;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("benchmark {0} has no matching text file")]
    OrphanBenchmark(PathBuf),
    #[error("{path}: {source}")]
    Graph { path: PathBuf, source: AifError },
    #[error("corpus directory {0} contains no cases")]
    Empty(PathBuf),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorpusLayout {
    /// `<id>.txt` source texts paired with `<id>.json` benchmark graphs.
    #[default]
    AifJson,
    /// `<id>.txt` only; cases carry no benchmark.
    PlainTextPairs,
}

impl std::str::FromStr for CorpusLayout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aif" | "aif-json" => Ok(CorpusLayout::AifJson),
            "plain" | "text" => Ok(CorpusLayout::PlainTextPairs),
            other => Err(format!("unknown corpus layout {other:?} (aif, plain)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub id: String,
    pub text: String,
    pub benchmark: Option<ArgumentGraph>,
    /// Set when the layout expects a benchmark but none was found.
    pub missing_benchmark: bool,
}

/// Node and edge totals over all benchmarks of a corpus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub cases: usize,
    pub benchmarks: usize,
    pub inodes: usize,
    pub snodes: usize,
    pub edges: usize,
}

impl CorpusStats {
    pub fn of(cases: &[CorpusCase]) -> Self {
        let mut s = Self::of_graphs(cases.iter().filter_map(|c| c.benchmark.as_ref()));
        s.cases = cases.len();
        s
    }

    pub fn of_graphs<'a>(graphs: impl IntoIterator<Item = &'a ArgumentGraph>) -> Self {
        let mut s = CorpusStats::default();
        for g in graphs {
            s.cases += 1;
            s.benchmarks += 1;
            s.inodes += g.inodes().len();
            s.snodes += g.snodes().len();
            s.edges += g.edges().len();
        }
        s
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Reads a benchmark graph; major claims are optional here because several
/// corpora do not annotate one.
pub fn read_benchmark(path: &Path) -> Result<ArgumentGraph, CorpusError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    ArgumentGraph::from_aif_json_with(
        &bytes,
        AifOptions {
            require_major_claim: false,
        },
    )
    .map_err(|source| CorpusError::Graph {
        path: path.to_owned(),
        source,
    })
}

/// Reads every `<id>.json` graph of `dir`, sorted by id, ignoring any text
/// files.
pub fn load_benchmarks(dir: &Path) -> Result<Vec<(String, ArgumentGraph)>, CorpusError> {
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(CorpusError::Empty(dir.to_owned()));
    }
    paths
        .into_iter()
        .map(|p| {
            let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            read_benchmark(&p).map(|g| (id, g))
        })
        .collect()
}

/// Loads every case of `dir`, sorted by id.
pub fn load_corpus(dir: &Path, layout: CorpusLayout) -> Result<Vec<CorpusCase>, CorpusError> {
    let mut texts: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut graphs: BTreeMap<String, PathBuf> = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if !path.is_file() {
            continue;
        }
        let (Some(stem), Some(ext)) = (path.file_stem().and_then(|s| s.to_str()), path.extension()) else {
            continue;
        };
        let stem = stem.to_owned();
        match ext.to_str() {
            Some("txt") => {
                texts.insert(stem, path);
            }
            Some("json") => {
                graphs.insert(stem, path);
            }
            _ => {}
        }
    }

    let mut cases = Vec::with_capacity(texts.len());
    if layout == CorpusLayout::AifJson {
        if let Some((_, orphan)) = graphs.iter().find(|(id, _)| !texts.contains_key(*id)) {
            return Err(CorpusError::OrphanBenchmark(orphan.clone()));
        }
    }
    for (id, text_path) in texts {
        let text = fs::read_to_string(&text_path).map_err(io_err(&text_path))?;
        let (benchmark, missing_benchmark) = match layout {
            CorpusLayout::PlainTextPairs => (None, false),
            CorpusLayout::AifJson => match graphs.get(&id) {
                Some(p) => (Some(read_benchmark(p)?), false),
                None => (None, true),
            },
        };
        cases.push(CorpusCase {
            id,
            text,
            benchmark,
            missing_benchmark,
        });
    }
    if cases.is_empty() {
        return Err(CorpusError::Empty(dir.to_owned()));
    }
    Ok(cases)
}
