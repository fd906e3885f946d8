//! State and transition coverage over exploration time.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::StateModel;

pub const CSV_HEADER: &str = "elapsed_ms,states,transitions,events";

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("malformed coverage csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("coverage csv header must be `{CSV_HEADER}`, found `{0}`")]
    Header(String),
}

/// One point of the progressive coverage curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageSample {
    pub elapsed_ms: u64,
    pub states: usize,
    pub transitions: usize,
    pub events: usize,
}

/// True state and transition counts, when the app under test knows them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageTotals {
    pub states: usize,
    pub transitions: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageLog {
    samples: Vec<CoverageSample>,
    totals: Option<CoverageTotals>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub state_coverage: Option<f64>,
    pub transition_coverage: Option<f64>,
    pub events_sent: usize,
    pub wall_ms: u64,
}

impl CoverageLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_totals(totals: CoverageTotals) -> Self {
        CoverageLog {
            samples: Vec::new(),
            totals: Some(totals),
        }
    }

    pub fn totals(&self) -> Option<CoverageTotals> {
        self.totals
    }

    pub fn set_totals(&mut self, totals: Option<CoverageTotals>) {
        self.totals = totals;
    }

    pub fn samples(&self) -> &[CoverageSample] {
        &self.samples
    }

    pub fn last(&self) -> Option<&CoverageSample> {
        self.samples.last()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Appends a sample of `model` at `elapsed`. Counters are clamped to the
    /// previous sample so the curve never goes down.
    pub fn record_sample(&mut self, model: &StateModel, elapsed: Duration, events: usize) -> CoverageSample {
        let mut sample = CoverageSample {
            elapsed_ms: elapsed.as_millis() as u64,
            states: model.len(),
            transitions: model.transition_count(),
            events,
        };
        if let Some(prev) = self.samples.last() {
            sample.elapsed_ms = sample.elapsed_ms.max(prev.elapsed_ms);
            sample.states = sample.states.max(prev.states);
            sample.transitions = sample.transitions.max(prev.transitions);
            sample.events = sample.events.max(prev.events);
        }
        self.samples.push(sample);
        sample
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        // Serializing the first record writes the header; write it by hand so
        // an empty log still gets one.
        w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
        for s in &self.samples {
            w.write_record([
                s.elapsed_ms.to_string(),
                s.states.to_string(),
                s.transitions.to_string(),
                s.events.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is ascii")
    }

    /// Parses samples written by [`to_csv`](Self::to_csv). Totals are not
    /// part of the CSV.
    pub fn from_csv(text: &str) -> Result<Self, CoverageError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
        if header != CSV_HEADER {
            return Err(CoverageError::Header(header));
        }
        let samples = r
            .deserialize::<CoverageSample>()
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CoverageLog {
            samples,
            totals: None,
        })
    }

    pub fn summary(&self) -> CoverageSummary {
        let last = self.samples.last().copied().unwrap_or(CoverageSample {
            elapsed_ms: 0,
            states: 0,
            transitions: 0,
            events: 0,
        });
        let fraction = |found: usize, total: usize| {
            if total == 0 {
                1.0
            } else {
                found as f64 / total as f64
            }
        };
        CoverageSummary {
            state_coverage: self.totals.map(|t| fraction(last.states, t.states)),
            transition_coverage: self.totals.map(|t| fraction(last.transitions, t.transitions)),
            events_sent: last.events,
            wall_ms: last.elapsed_ms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Graph,
    Report,
    Both,
}

impl OutputFormat {
    pub fn graph(self) -> bool {
        matches!(self, OutputFormat::Graph | OutputFormat::Both)
    }

    pub fn report(self) -> bool {
        matches!(self, OutputFormat::Report | OutputFormat::Both)
    }
}

/// Rendered report documents; fields not requested by the format are `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportDocuments {
    pub graph_json: Option<String>,
    pub graph_dot: Option<String>,
    pub coverage_csv: Option<String>,
    pub summary_json: Option<String>,
}

pub fn emit_report(log: &CoverageLog, model: &StateModel, format: OutputFormat) -> ReportDocuments {
    let mut docs = ReportDocuments::default();
    if format.graph() {
        docs.graph_json = Some(
            serde_json::to_string_pretty(&model.export_graph()).expect("graphs always serialize"),
        );
        docs.graph_dot = Some(model.export_dot());
    }
    if format.report() {
        docs.coverage_csv = Some(log.to_csv());
        docs.summary_json =
            Some(serde_json::to_string_pretty(&log.summary()).expect("summaries always serialize"));
    }
    docs
}
