//! Graphviz rendering.

use std::fmt::Write;

use super::{ArgumentGraph, GraphError, Stance};

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' | '\r' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

impl ArgumentGraph {
    /// Renders the graph as a DOT digraph. The major claim is drawn bold and
    /// filled; support and attack S-nodes differ in label and color.
    pub fn to_dot(&self) -> Result<String, GraphError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations));
        }
        let mut out = String::new();
        out.push_str("digraph argument_graph {\n");
        out.push_str("  rankdir=BT;\n");
        out.push_str("  node [fontname=\"Helvetica\"];\n");
        for n in &self.inodes {
            let is_mc = self.major_claim.as_ref() == Some(&n.id);
            let style = if is_mc {
                ", style=\"filled,bold\", fillcolor=\"lightblue\", penwidth=2"
            } else {
                ""
            };
            writeln!(
                out,
                "  \"{}\" [shape=box, label=\"{}\"{}];",
                escape(n.id.as_str()),
                escape(&n.text),
                style
            )
            .unwrap();
        }
        for s in &self.snodes {
            let (label, color) = match s.stance {
                Stance::Support => ("Support", "darkgreen"),
                Stance::Attack => ("Attack", "red"),
            };
            let label = match s.probability {
                Some(p) => format!("{label} ({p:.2})"),
                None => label.to_owned(),
            };
            writeln!(
                out,
                "  \"{}\" [shape=ellipse, label=\"{}\", color=\"{}\", fontcolor=\"{}\"];",
                escape(s.id.as_str()),
                label,
                color,
                color
            )
            .unwrap();
        }
        for e in &self.edges {
            writeln!(
                out,
                "  \"{}\" -> \"{}\";",
                escape(e.from.as_str()),
                escape(e.to.as_str())
            )
            .unwrap();
        }
        out.push_str("}\n");
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::tests::sample_graph;
    use crate::graph::{ArgumentGraph, INode, NodeId, SNode, Stance};

    #[test]
    fn minimal_graph() {
        let dot = sample_graph().to_dot().unwrap();
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), 2);
        assert_eq!(dot.matches("shape=").count(), 3);
    }

    #[test]
    fn major_claim_styled() {
        let dot = sample_graph().to_dot().unwrap();
        let mc_line = dot.lines().find(|l| l.starts_with("  \"1\" [")).unwrap();
        assert!(mc_line.contains("style=\"filled,bold\""));
        let other = dot.lines().find(|l| l.starts_with("  \"2\" [")).unwrap();
        assert!(!other.contains("style="));
    }

    #[test]
    fn stances_distinguishable() {
        let g = sample_graph()
            .add_argument(
                INode::new("4", "It \"works\" for many."),
                SNode::new("5", Stance::Support),
                &NodeId::from("1"),
            )
            .unwrap();
        let dot = g.to_dot().unwrap();
        let attack = dot.lines().find(|l| l.starts_with("  \"3\" [")).unwrap();
        let support = dot.lines().find(|l| l.starts_with("  \"5\" [")).unwrap();
        assert!(attack.contains("Attack") && attack.contains("red"));
        assert!(support.contains("Support") && support.contains("darkgreen"));
        assert!(dot.contains("It \\\"works\\\" for many."));
    }

    #[test]
    fn invalid_graph_errors() {
        let g = ArgumentGraph::from_parts(vec![INode::new("a", "")], vec![], vec![], None);
        assert!(g.to_dot().is_err());
    }
}
