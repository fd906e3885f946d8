use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ModelError, ModelState, StateId, StateModel, Transition, UiEvent};
use crate::tree::{tree_hash, StructureHash, ViewNode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: StateId,
    pub activity: String,
    pub hash: StructureHash,
    pub snapshot_ref: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: StateId,
    pub to: StateId,
    pub event: UiEvent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub entry: usize,
}

pub fn snapshot_ref(id: StateId) -> String {
    format!("snapshots/S{id}.json")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl StateModel {
    pub fn export_graph(&self) -> GraphDocument {
        GraphDocument {
            nodes: self
                .states()
                .iter()
                .map(|s| GraphNode {
                    id: s.id,
                    activity: s.activity.clone(),
                    hash: s.hash,
                    snapshot_ref: snapshot_ref(s.id),
                })
                .collect(),
            edges: self
                .transitions()
                .map(|t| GraphEdge {
                    from: t.from,
                    to: t.to,
                    event: t.event,
                })
                .collect(),
            entry: 0,
        }
    }

    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph model {\n  node [shape=box];\n");
        for s in self.states() {
            let _ = writeln!(
                out,
                "  S{id} [label=\"S{id}\\n{activity}\"];",
                id = s.id,
                activity = dot_escape(&s.activity)
            );
        }
        for t in self.transitions() {
            let _ = writeln!(
                out,
                "  S{} -> S{} [label=\"{}\"];",
                t.from,
                t.to,
                dot_escape(&t.event.label())
            );
        }
        out.push_str("}\n");
        out
    }

    /// Rebuilds a model from a graph document, loading each node's snapshot
    /// through `snapshots`. Intent records and replay traces are not part of
    /// the graph document and come back empty.
    pub fn import_graph(
        doc: &GraphDocument,
        mut snapshots: impl FnMut(&str) -> Option<ViewNode>,
    ) -> Result<StateModel, ModelError> {
        let mut states = Vec::with_capacity(doc.nodes.len());
        for node in &doc.nodes {
            let snapshot = snapshots(&node.snapshot_ref)
                .ok_or_else(|| ModelError::MissingSnapshot(node.snapshot_ref.clone()))?;
            let actual = tree_hash(&snapshot);
            if actual != node.hash {
                return Err(ModelError::HashMismatch {
                    id: node.id,
                    recorded: node.hash,
                    actual,
                });
            }
            states.push(ModelState {
                id: node.id,
                hash: node.hash,
                activity: node.activity.clone(),
                intent: None,
                ui_stack: Vec::new(),
                snapshot,
            });
        }
        StateModel::from_parts(
            states,
            doc.edges.iter().map(|e| Transition {
                from: e.from,
                event: e.event.clone(),
                to: e.to,
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::model::StateMeta;

    fn two_state() -> StateModel {
        let mut m = StateModel::new();
        for (tag, act) in [("Home", "MainActivity"), ("Detail", "DetailActivity")] {
            m.add_state(
                ViewNode::new(tag, vec![ViewNode::leaf("Button")]),
                StateMeta {
                    activity: act.into(),
                    ..Default::default()
                },
            );
        }
        m.add_transition(StateId(0), UiEvent::tap(vec![0]), StateId(1)).unwrap();
        m
    }

    #[test]
    fn empty_model_exports_empty_arrays() {
        let doc = StateModel::new().export_graph();
        assert_eq!(
            serde_json::to_string(&doc).unwrap(),
            r#"{"nodes":[],"edges":[],"entry":0}"#
        );
        assert_eq!(StateModel::new().export_dot(), "digraph model {\n  node [shape=box];\n}\n");
    }

    #[test]
    fn two_state_graph() {
        let m = two_state();
        let doc = m.export_graph();
        assert_eq!(doc.nodes.len(), 2);
        assert_eq!(doc.edges.len(), 1);
        assert_eq!(doc.edges[0].event.label(), "tap@[0]");
        assert_eq!(doc.nodes[1].snapshot_ref, "snapshots/S1.json");
        let json: serde_json::Value = serde_json::to_value(&doc).unwrap();
        assert_eq!(json["nodes"][0]["hash"].as_str().unwrap().len(), 16);
        assert_eq!(json["edges"][0]["event"], serde_json::json!({"action": "tap", "path": [0]}));
        let dot = m.export_dot();
        assert!(dot.contains("S1 [label=\"S1\\nDetailActivity\"];"), "{dot}");
        assert!(dot.contains("S0 -> S1 [label=\"tap@[0]\"];"), "{dot}");
    }

    #[test]
    fn export_import_round_trip() {
        let m = two_state();
        let doc = m.export_graph();
        let text = serde_json::to_string(&doc).unwrap();
        let snaps: HashMap<String, ViewNode> = m
            .states()
            .iter()
            .map(|s| (snapshot_ref(s.id), s.snapshot.clone()))
            .collect();
        let parsed: GraphDocument = serde_json::from_str(&text).unwrap();
        let back = StateModel::import_graph(&parsed, |r| snaps.get(r).cloned()).unwrap();
        assert_eq!(back.export_graph(), doc);
        assert!(StateModel::import_graph(&parsed, |_| None).is_err());
    }
}
