use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{CorpusCase, Mode, Outcome, Pipeline, PipelineConfig, PipelineError, Resources};
use crate::construct::ConstructionMethod;
use crate::majorclaim::MajorClaimMethod;
use crate::metrics::{evaluate_pair_with, AgreementReport};

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no case in the corpus has a benchmark graph")]
    NoBenchmarks,
    #[error("evaluation grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("writing report: {0}")]
    Csv(#[from] csv::Error),
}

/// Parameter axes to sweep. Major-claim methods only matter end-to-end, so
/// preset runs use the first listed method once.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationGrid {
    pub modes: Vec<Mode>,
    pub mc_methods: Vec<MajorClaimMethod>,
    pub constructors: Vec<ConstructionMethod>,
    pub thresholds: Vec<f64>,
}

impl EvaluationGrid {
    /// The single point described by `config`.
    pub fn single(config: &PipelineConfig) -> Self {
        EvaluationGrid {
            modes: vec![config.mode],
            mc_methods: vec![config.mc_method],
            constructors: vec![config.constructor],
            thresholds: vec![config.neutral_threshold],
        }
    }

    pub fn expand(&self, base: &PipelineConfig) -> Vec<PipelineConfig> {
        let mut out = Vec::new();
        for &mode in &self.modes {
            let methods = match mode {
                Mode::EndToEnd => &self.mc_methods[..],
                Mode::PresetAdus => &self.mc_methods[..self.mc_methods.len().min(1)],
            };
            for &mc_method in methods {
                for &constructor in &self.constructors {
                    for &neutral_threshold in &self.thresholds {
                        out.push(PipelineConfig {
                            mode,
                            mc_method,
                            constructor,
                            neutral_threshold,
                            ..base.clone()
                        });
                    }
                }
            }
        }
        out
    }
}

/// One document scored under one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub case_id: String,
    pub mode: Mode,
    pub mc_method: MajorClaimMethod,
    pub constructor: ConstructionMethod,
    pub threshold: f64,
    pub inode: f64,
    pub major_claim: u8,
    pub snode: f64,
    pub edge: f64,
    pub time_s: f64,
    /// `graph` or `no-argument`.
    pub outcome: &'static str,
    pub config: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub case_id: String,
    pub config: String,
    pub message: String,
}

/// Per-configuration means over all scored cases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub mode: Mode,
    pub mc_method: MajorClaimMethod,
    pub constructor: ConstructionMethod,
    pub threshold: f64,
    pub cases: usize,
    pub inode: f64,
    pub major_claim: f64,
    pub snode: f64,
    pub edge: f64,
    pub time_s: f64,
    pub config: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub rows: Vec<ReportRow>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<Failure>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Means of `value` grouped by `key`, groups in first-appearance order.
fn group_mean<K: PartialEq + Copy>(
    rows: &[ReportRow],
    key: impl Fn(&ReportRow) -> K,
    value: impl Fn(&ReportRow) -> f64,
) -> Vec<(K, f64)> {
    let mut keys: Vec<K> = Vec::new();
    for r in rows {
        let k = key(r);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|k| (k, mean(rows.iter().filter(|r| key(r) == k).map(&value))))
        .collect()
}

pub const CSV_COLUMNS: [&str; 10] = [
    "case_id",
    "mode",
    "mc_method",
    "constructor",
    "threshold",
    "inode",
    "major_claim",
    "snode",
    "edge",
    "time_s",
];

impl EvaluationReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EvaluationError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                r.case_id.clone(),
                r.mode.to_string(),
                r.mc_method.to_string(),
                r.constructor.to_string(),
                r.threshold.to_string(),
                r.inode.to_string(),
                r.major_claim.to_string(),
                r.snode.to_string(),
                r.edge.to_string(),
                r.time_s.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Mean 𝓜 per major-claim method over end-to-end rows.
    pub fn major_claim_by_method(&self) -> Vec<(MajorClaimMethod, f64)> {
        let rows: Vec<ReportRow> = self.rows.iter().filter(|r| r.mode == Mode::EndToEnd).cloned().collect();
        group_mean(&rows, |r| r.mc_method, |r| f64::from(r.major_claim))
    }

    /// Mean 𝓢 per threshold and mode.
    pub fn snode_by_threshold(&self) -> Vec<((f64, Mode), f64)> {
        let mut v = group_mean(&self.rows, |r| (r.threshold, r.mode), |r| r.snode);
        v.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.cmp(&b.0 .1)));
        v
    }

    /// Mean 𝓔 per constructor and mode.
    pub fn edge_by_constructor(&self) -> Vec<((ConstructionMethod, Mode), f64)> {
        group_mean(&self.rows, |r| (r.constructor, r.mode), |r| r.edge)
    }

    /// Plain-text rendering of the three grouped views.
    pub fn summary(&self) -> String {
        let mut s = String::from("major claim agreement by method (end-to-end)\n");
        for (m, v) in self.major_claim_by_method() {
            s.push_str(&format!("  {:<12} {v:.3}\n", m.as_str()));
        }
        s.push_str("S-node agreement by threshold\n");
        for ((t, mode), v) in self.snode_by_threshold() {
            s.push_str(&format!("  {t:<5} {:<11} {v:.3}\n", mode.as_str()));
        }
        s.push_str("edge agreement by constructor\n");
        for ((c, mode), v) in self.edge_by_constructor() {
            s.push_str(&format!("  {:<9} {:<11} {v:.3}\n", c.as_str(), mode.as_str()));
        }
        s
    }
}

fn score(pipeline: &Pipeline, case: &CorpusCase) -> Result<(AgreementReport, &'static str), String> {
    let bench = case.benchmark.as_ref().ok_or("no benchmark graph")?;
    let outcome = pipeline.run(Some(&case.text), Some(bench)).map_err(|e| e.to_string())?;
    match outcome {
        Outcome::Graph(m) => {
            let r = evaluate_pair_with(bench, &m.graph, &m.relations, pipeline.config().weighting, m.elapsed)
                .map_err(|e| e.to_string())?;
            Ok((r, "graph"))
        }
        Outcome::NoArgumentFound { elapsed } => Ok((AgreementReport::nothing_generated(bench, elapsed), "no-argument")),
    }
}

/// Scores every case under every grid point, loading resources from `base`.
pub fn run_evaluation(
    cases: &[CorpusCase],
    base: &PipelineConfig,
    grid: &EvaluationGrid,
) -> Result<EvaluationReport, EvaluationError> {
    let resources = Arc::new(Resources::load(base)?);
    run_evaluation_with(cases, base, grid, resources)
}

/// [`run_evaluation`] with already loaded resources.
pub fn run_evaluation_with(
    cases: &[CorpusCase],
    base: &PipelineConfig,
    grid: &EvaluationGrid,
    resources: Arc<Resources>,
) -> Result<EvaluationReport, EvaluationError> {
    if cases.is_empty() {
        return Err(EvaluationError::EmptyCorpus);
    }
    if cases.iter().all(|c| c.benchmark.is_none()) {
        return Err(EvaluationError::NoBenchmarks);
    }
    let configs = grid.expand(base);
    if configs.is_empty() {
        return Err(EvaluationError::EmptyGrid);
    }
    let pipelines = configs
        .into_iter()
        .map(|c| Pipeline::with_resources(c, resources.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let fingerprints: Vec<String> = pipelines.iter().map(|p| p.config().fingerprint()).collect();

    let jobs: Vec<(usize, usize)> = (0..cases.len())
        .flat_map(|ci| (0..pipelines.len()).map(move |pi| (ci, pi)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(base.workers)
        .build()
        .map_err(|e| EvaluationError::Pool(e.to_string()))?;
    let results: Vec<Result<ReportRow, Failure>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(ci, pi)| {
                let case = &cases[ci];
                let p = &pipelines[pi];
                let c = p.config();
                match score(p, case) {
                    Ok((r, outcome)) => Ok(ReportRow {
                        case_id: case.id.clone(),
                        mode: c.mode,
                        mc_method: c.mc_method,
                        constructor: c.constructor,
                        threshold: c.neutral_threshold,
                        inode: r.inode,
                        major_claim: r.major_claim,
                        snode: r.snode,
                        edge: r.edge,
                        time_s: r.time_s,
                        outcome,
                        config: fingerprints[pi].clone(),
                    }),
                    Err(message) => Err(Failure {
                        case_id: case.id.clone(),
                        config: fingerprints[pi].clone(),
                        message,
                    }),
                }
            })
            .collect()
    });

    let mut report = EvaluationReport::default();
    for r in results {
        match r {
            Ok(row) => report.rows.push(row),
            Err(f) => report.failures.push(f),
        }
    }
    report.rows.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    report.failures.sort_by(|a, b| a.case_id.cmp(&b.case_id));

    for (p, fp) in pipelines.iter().zip(&fingerprints) {
        let rows: Vec<&ReportRow> = report.rows.iter().filter(|r| &r.config == fp).collect();
        if rows.is_empty() {
            continue;
        }
        let c = p.config();
        report.aggregates.push(Aggregate {
            mode: c.mode,
            mc_method: c.mc_method,
            constructor: c.constructor,
            threshold: c.neutral_threshold,
            cases: rows.len(),
            inode: mean(rows.iter().map(|r| r.inode)),
            major_claim: mean(rows.iter().map(|r| f64::from(r.major_claim))),
            snode: mean(rows.iter().map(|r| r.snode)),
            edge: mean(rows.iter().map(|r| r.edge)),
            time_s: mean(rows.iter().map(|r| r.time_s)),
            config: fp.clone(),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::sample_graph;

    fn case(id: &str) -> CorpusCase {
        let g = sample_graph();
        let text = g.inodes().iter().map(|n| format!("{}.", n.text)).collect::<Vec<_>>().join(" ");
        CorpusCase {
            id: id.into(),
            text,
            benchmark: Some(g),
            missing_benchmark: false,
        }
    }

    #[test]
    fn grid_expansion_skips_mc_methods_in_preset_mode() {
        let grid = EvaluationGrid {
            modes: vec![Mode::EndToEnd, Mode::PresetAdus],
            mc_methods: MajorClaimMethod::ALL.to_vec(),
            constructors: ConstructionMethod::ALL.to_vec(),
            thresholds: vec![0.5, 1.0],
        };
        assert_eq!(grid.expand(&PipelineConfig::default()).len(), 4 * 3 * 2 + 3 * 2);
    }

    #[test]
    fn preset_evaluation_rows_and_aggregates() {
        let cases = vec![case("b"), case("a")];
        let base = PipelineConfig {
            mode: Mode::PresetAdus,
            workers: 2,
            ..Default::default()
        };
        let grid = EvaluationGrid {
            thresholds: vec![0.5, 1.0],
            ..EvaluationGrid::single(&base)
        };
        let report = run_evaluation(&cases, &base, &grid).unwrap();
        assert!(report.failures.is_empty());
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.rows[0].case_id, "a");
        for r in &report.rows {
            assert_eq!(r.inode, 1.0);
            assert_eq!(r.major_claim, 1);
        }
        assert_eq!(report.aggregates.len(), 2);
        let agg = &report.aggregates[0];
        let recomputed: f64 = report.rows.iter().filter(|r| r.config == agg.config).map(|r| r.edge).sum::<f64>() / 2.0;
        assert_eq!(agg.edge, recomputed);

        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("case_id,mode,mc_method,constructor,threshold,inode,major_claim,snode,edge,time_s\n"));
        assert_eq!(csv.lines().count(), 5);
        assert!(report.summary().contains("S-node agreement"));
    }

    #[test]
    fn missing_benchmarks() {
        let mut c = case("x");
        c.benchmark = None;
        let base = PipelineConfig::default();
        assert!(matches!(
            run_evaluation(&[c.clone()], &base, &EvaluationGrid::single(&base)),
            Err(EvaluationError::NoBenchmarks)
        ));
        let report = run_evaluation(&[c, case("y")], &base, &EvaluationGrid::single(&base)).unwrap();
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].case_id, "x");
        assert!(matches!(
            run_evaluation(&[], &base, &EvaluationGrid::single(&base)),
            Err(EvaluationError::EmptyCorpus)
        ));
    }
}
