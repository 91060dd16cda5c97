//! AIF-style JSON.
//!
//! ```json
//! {
//!   "nodes": [{"id": "1", "type": "I", "text": "..."},
//!             {"id": "2", "type": "RA", "text": ""}],
//!   "edges": [{"from": "3", "to": "2"}],
//!   "majorClaim": "1"
//! }
//! ```
//!
//! `RA` nodes are support relations and `CA` nodes attacks. The reader also
//! accepts the AIFdb spellings `nodeID`, `fromID`, `toID` and numeric ids,
//! and ignores fields it does not know.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ArgumentGraph, Edge, INode, NodeId, SNode, Stance};

#[derive(Debug, Error)]
pub enum AifError {
    #[error("malformed graph document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("node {id} has unknown type {kind:?}")]
    UnknownNodeType { id: String, kind: String },
    #[error("graph must contain major claim")]
    MissingMajorClaim,
    #[error("major claim {0} does not reference an I-node")]
    UnknownMajorClaim(String),
}

/// Parser switches.
#[derive(Clone, Copy, Debug)]
pub struct AifOptions {
    /// Reject documents without a major-claim annotation. Benchmark corpora
    /// are sometimes loaded with this off.
    pub require_major_claim: bool,
}

impl Default for AifOptions {
    fn default() -> Self {
        AifOptions {
            require_major_claim: true,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Document {
    nodes: Vec<Node>,
    #[serde(default)]
    edges: Vec<DocEdge>,
    #[serde(
        rename = "majorClaim",
        alias = "major_claim",
        default,
        deserialize_with = "opt_id",
        skip_serializing_if = "Option::is_none"
    )]
    major_claim: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Node {
    #[serde(alias = "nodeID", deserialize_with = "id")]
    id: String,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct DocEdge {
    #[serde(alias = "fromID", deserialize_with = "id")]
    from: String,
    #[serde(alias = "toID", deserialize_with = "id")]
    to: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Str(String),
    Int(i64),
}

impl From<RawId> for String {
    fn from(raw: RawId) -> String {
        match raw {
            RawId::Str(s) => s,
            RawId::Int(n) => n.to_string(),
        }
    }
}

fn id<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    RawId::deserialize(d).map(String::from).map_err(|_| de::Error::custom("id must be a string or integer"))
}

fn opt_id<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    Ok(Option::<RawId>::deserialize(d)?.map(String::from))
}

impl ArgumentGraph {
    /// Serializes to pretty-printed UTF-8 JSON. I-nodes come first, then
    /// S-nodes, each in insertion order.
    pub fn to_aif_json(&self) -> Vec<u8> {
        let mut nodes = Vec::with_capacity(self.inodes.len() + self.snodes.len());
        for n in &self.inodes {
            nodes.push(Node {
                id: n.id.to_string(),
                kind: "I".into(),
                text: n.text.clone(),
                probability: None,
                start: n.span.map(|s| s.0),
                end: n.span.map(|s| s.1),
            });
        }
        for s in &self.snodes {
            nodes.push(Node {
                id: s.id.to_string(),
                kind: match s.stance {
                    Stance::Support => "RA".into(),
                    Stance::Attack => "CA".into(),
                },
                text: String::new(),
                probability: s.probability,
                start: None,
                end: None,
            });
        }
        let doc = Document {
            nodes,
            edges: self
                .edges
                .iter()
                .map(|e| DocEdge {
                    from: e.from.to_string(),
                    to: e.to.to_string(),
                })
                .collect(),
            major_claim: self.major_claim.as_ref().map(ToString::to_string),
        };
        let mut out = serde_json::to_vec_pretty(&doc).expect("graph document serializes");
        out.push(b'\n');
        out
    }

    pub fn from_aif_json(bytes: &[u8]) -> Result<ArgumentGraph, AifError> {
        Self::from_aif_json_with(bytes, AifOptions::default())
    }

    pub fn from_aif_json_with(bytes: &[u8], options: AifOptions) -> Result<ArgumentGraph, AifError> {
        let doc: Document = serde_json::from_slice(bytes)?;
        let mut inodes = Vec::new();
        let mut snodes = Vec::new();
        for n in doc.nodes {
            match n.kind.as_str() {
                "I" => inodes.push(INode {
                    id: NodeId::from(n.id),
                    text: n.text,
                    span: n.start.zip(n.end),
                }),
                "RA" | "CA" => snodes.push(SNode {
                    id: NodeId::from(n.id),
                    stance: if n.kind == "RA" {
                        Stance::Support
                    } else {
                        Stance::Attack
                    },
                    probability: n.probability,
                }),
                _ => {
                    return Err(AifError::UnknownNodeType {
                        id: n.id,
                        kind: n.kind,
                    })
                }
            }
        }
        let major_claim = match doc.major_claim {
            Some(mc) => {
                if !inodes.iter().any(|n| n.id.as_str() == mc) {
                    if inodes.is_empty() {
                        return Err(AifError::MissingMajorClaim);
                    }
                    return Err(AifError::UnknownMajorClaim(mc));
                }
                Some(NodeId::from(mc))
            }
            None if options.require_major_claim => return Err(AifError::MissingMajorClaim),
            None => None,
        };
        let edges = doc
            .edges
            .into_iter()
            .map(|e| Edge::new(e.from, e.to))
            .collect();
        Ok(ArgumentGraph::from_parts(inodes, snodes, edges, major_claim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::sample_graph;

    #[test]
    fn round_trip_sample_graph() {
        let g = sample_graph();
        let back = ArgumentGraph::from_aif_json(&g.to_aif_json()).unwrap();
        assert!(back.same_content(&g));
        assert_eq!(back, g);
    }

    #[test]
    fn round_trip_keeps_span_and_probability() {
        let g = ArgumentGraph::new(INode::new("1", "mc").with_span(0, 2))
            .add_argument(
                INode::new("2", "p").with_span(3, 4),
                SNode::new("3", Stance::Support).with_probability(0.625),
                &NodeId::from("1"),
            )
            .unwrap();
        let back = ArgumentGraph::from_aif_json(&g.to_aif_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn unknown_scheme_type() {
        let doc = br#"{"nodes":[{"id":"1","type":"I","text":"a"},{"id":"2","type":"MA","text":""}],
                      "edges":[],"majorClaim":"1"}"#;
        assert!(matches!(
            ArgumentGraph::from_aif_json(doc),
            Err(AifError::UnknownNodeType { .. })
        ));
    }

    #[test]
    fn empty_node_list() {
        let err = ArgumentGraph::from_aif_json(br#"{"nodes":[],"edges":[]}"#).unwrap_err();
        assert_eq!(err.to_string(), "graph must contain major claim");
        let err =
            ArgumentGraph::from_aif_json(br#"{"nodes":[],"edges":[],"majorClaim":"1"}"#).unwrap_err();
        assert_eq!(err.to_string(), "graph must contain major claim");
    }

    #[test]
    fn malformed_document() {
        assert!(matches!(
            ArgumentGraph::from_aif_json(b"{\"nodes\": 3"),
            Err(AifError::Json(_))
        ));
    }

    #[test]
    fn aifdb_spellings_and_lenient_major_claim() {
        let doc = br#"{"nodes":[{"nodeID":10,"type":"I","text":"a","timestamp":"x"},
                                {"nodeID":"11","type":"I","text":"b"},
                                {"nodeID":"12","type":"RA","text":"Default Inference"}],
                       "edges":[{"edgeID":1,"fromID":"11","toID":"12"},{"edgeID":2,"fromID":"12","toID":10}]}"#;
        assert!(matches!(
            ArgumentGraph::from_aif_json(doc),
            Err(AifError::MissingMajorClaim)
        ));
        let g = ArgumentGraph::from_aif_json_with(
            doc,
            AifOptions {
                require_major_claim: false,
            },
        )
        .unwrap();
        assert_eq!(g.inodes().len(), 2);
        assert_eq!(g.edges()[1], Edge::new("12", "10"));
        assert_eq!(g.major_claim(), None);
    }
}
