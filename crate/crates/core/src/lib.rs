//! Argument mining: text in, argument graph out.
//!
//! The pipeline splits a document into sentences, keeps the argumentative
//! ones, labels them as claims or premises, predicts support/attack relations
//! between every ordered pair, picks a major claim and assembles an
//! [`ArgumentGraph`](graph::ArgumentGraph). The [`metrics`] module scores a
//! generated graph against a benchmark graph.
//!
//! ```
//! use argmine::graph::{ArgumentGraph, INode, NodeId, Stance};
//!
//! let g = ArgumentGraph::new(INode::new("1", "Schools should start later."));
//! let (g, _) = g
//!     .add_argument_text("Teenagers sleep badly.", Stance::Support, &NodeId::from("1"))
//!     .unwrap();
//! assert!(g.validate().is_empty());
//! assert_eq!(g.depth().unwrap(), 2);
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod classify;
pub mod construct;
pub mod features;
pub mod graph;
pub mod lexicon;
pub mod majorclaim;
pub mod metrics;
pub mod pipeline;
pub mod segment;

/// Input language. Selects lexicons and abbreviation lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[default]
    En,
    De,
}

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::De => "de",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "en" | "english" => Ok(Language::En),
            "de" | "german" => Ok(Language::De),
            other => Err(format!("unknown language {other:?} (expected en or de)")),
        }
    }
}

/// Argumentative role of a unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    MajorClaim,
    Claim,
    Premise,
}

impl Role {
    pub fn is_claim(self) -> bool {
        matches!(self, Role::Claim | Role::MajorClaim)
    }
}
