//! The finite-state model of app behavior.
//!
//! States are screens identified by structure hash and numbered densely in
//! discovery order; state 0 is the single entry state. Transitions form a
//! partial function from `(state, event)` to state. Terminal states are
//! derived (no outgoing transitions) rather than stored.

mod event;
mod export;
mod paths;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;
use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{tree_hash, StructureHash, ViewNode};

pub use event::{Action, UiEvent};
pub use export::{snapshot_ref, GraphDocument, GraphEdge, GraphNode};
pub use paths::{PathLimits, TestCase, TestStep, DEFAULT_MAX_PATHS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub usize);

impl StateId {
    pub const ENTRY: StateId = StateId(0);

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The token an environment accepts to relaunch an activity directly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntentRecord {
    pub activity: String,
    pub payload: String,
}

/// One replay step: perform `event` while in `state`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub state: StateId,
    pub event: UiEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub id: StateId,
    pub hash: StructureHash,
    pub activity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intent: Option<IntentRecord>,
    /// Replay trace from the activity's intent entry point to this state.
    #[serde(default)]
    pub ui_stack: Vec<TraceStep>,
    pub snapshot: ViewNode,
}

/// Where a newly observed screen came from.
#[derive(Debug, Clone, Default)]
pub struct StateMeta {
    pub activity: String,
    pub intent: Option<IntentRecord>,
    pub ui_stack: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: StateId,
    pub event: UiEvent,
    pub to: StateId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionUpdate {
    Inserted,
    Unchanged,
    /// `(from, event)` already led elsewhere; the old target was replaced.
    Overwritten { previous: StateId },
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("state {id} snapshot hashes to {actual}, document says {recorded}")]
    HashMismatch {
        id: StateId,
        recorded: StructureHash,
        actual: StructureHash,
    },
    #[error("states {first} and {second} share hash {hash}")]
    DuplicateHash {
        first: StateId,
        second: StateId,
        hash: StructureHash,
    },
    #[error("state ids are not dense: position {position} holds {id}")]
    NonDenseIds { position: usize, id: StateId },
    #[error("duplicate transition from {from} on {event}")]
    DuplicateTransition { from: StateId, event: String },
    #[error("missing snapshot {0}")]
    MissingSnapshot(String),
    #[error("invalid model document: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Default)]
pub struct StateModel {
    states: Vec<ModelState>,
    by_hash: HashMap<StructureHash, StateId>,
    transitions: IndexMap<(StateId, UiEvent), StateId>,
    nondeterminism: usize,
}

impl PartialEq for StateModel {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states && self.transitions == other.transitions
    }
}

impl StateModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn states(&self) -> &[ModelState] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> Option<&ModelState> {
        self.states.get(id.0)
    }

    pub fn entry(&self) -> Option<StateId> {
        (!self.states.is_empty()).then_some(StateId::ENTRY)
    }

    pub fn lookup(&self, hash: StructureHash) -> Option<StateId> {
        self.by_hash.get(&hash).copied()
    }

    pub fn contains(&self, id: StateId) -> bool {
        id.0 < self.states.len()
    }

    /// Number of times a transition was overwritten with a different target.
    pub fn nondeterminism_count(&self) -> usize {
        self.nondeterminism
    }

    /// Adds `snapshot` as a state unless one with the same structure hash
    /// already exists. Returns the state's id and whether it is new.
    pub fn add_state(&mut self, snapshot: ViewNode, meta: StateMeta) -> (StateId, bool) {
        let hash = tree_hash(&snapshot);
        if let Some(&id) = self.by_hash.get(&hash) {
            return (id, false);
        }
        let id = StateId(self.states.len());
        self.states.push(ModelState {
            id,
            hash,
            activity: meta.activity,
            intent: meta.intent,
            ui_stack: meta.ui_stack,
            snapshot,
        });
        self.by_hash.insert(hash, id);
        (id, true)
    }

    pub fn add_transition(
        &mut self,
        from: StateId,
        event: UiEvent,
        to: StateId,
    ) -> Result<TransitionUpdate, ModelError> {
        for id in [from, to] {
            if !self.contains(id) {
                return Err(ModelError::UnknownState(id));
            }
        }
        match self.transitions.get_mut(&(from, event.clone())) {
            Some(existing) if *existing == to => Ok(TransitionUpdate::Unchanged),
            Some(existing) => {
                let previous = std::mem::replace(existing, to);
                self.nondeterminism += 1;
                warn!(
                    "nondeterministic transition: S{from} --{event}--> S{previous}, now S{to}"
                );
                Ok(TransitionUpdate::Overwritten { previous })
            }
            None => {
                self.transitions.insert((from, event), to);
                Ok(TransitionUpdate::Inserted)
            }
        }
    }

    pub fn target(&self, from: StateId, event: &UiEvent) -> Option<StateId> {
        self.transitions.get(&(from, event.clone())).copied()
    }

    /// Transitions in insertion order.
    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        self.transitions.iter().map(|((from, event), &to)| Transition {
            from: *from,
            event: event.clone(),
            to,
        })
    }

    /// Outgoing `(event, target)` pairs of `from`, in insertion order.
    pub fn outgoing(&self, from: StateId) -> impl Iterator<Item = (&UiEvent, StateId)> + '_ {
        self.transitions
            .iter()
            .filter(move |((f, _), _)| *f == from)
            .map(|((_, e), &to)| (e, to))
    }

    /// States without outgoing transitions.
    pub fn terminal_states(&self) -> Vec<StateId> {
        let sources: BTreeSet<StateId> = self.transitions.keys().map(|(f, _)| *f).collect();
        self.states
            .iter()
            .map(|s| s.id)
            .filter(|id| !sources.contains(id))
            .collect()
    }

    pub fn event_universe(&self) -> BTreeSet<UiEvent> {
        self.transitions.keys().map(|(_, e)| e.clone()).collect()
    }

    /// States reachable from the entry state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        if self.states.is_empty() {
            return seen;
        }
        let adjacency = self.adjacency();
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adjacency[v] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    stack.push(w.0);
                }
            }
        }
        seen
    }

    /// Outgoing edges per state as `(target, transition index)`, sorted by
    /// target and then insertion order.
    pub(crate) fn adjacency(&self) -> Vec<Vec<(StateId, usize)>> {
        let mut adj = vec![Vec::new(); self.states.len()];
        for (i, ((from, _), to)) in self.transitions.iter().enumerate() {
            adj[from.0].push((*to, i));
        }
        for edges in &mut adj {
            edges.sort();
        }
        adj
    }

    pub(crate) fn transition_at(&self, index: usize) -> (&UiEvent, StateId) {
        let ((_, e), to) = self.transitions.get_index(index).expect("valid transition index");
        (e, *to)
    }

    /// Checks the structural invariants: dense ids, hash/snapshot agreement,
    /// hash uniqueness, and transition endpoints.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen: HashMap<StructureHash, StateId> = HashMap::new();
        for (position, s) in self.states.iter().enumerate() {
            if s.id.0 != position {
                return Err(ModelError::NonDenseIds { position, id: s.id });
            }
            let actual = tree_hash(&s.snapshot);
            if actual != s.hash {
                return Err(ModelError::HashMismatch {
                    id: s.id,
                    recorded: s.hash,
                    actual,
                });
            }
            if let Some(&first) = seen.get(&s.hash) {
                return Err(ModelError::DuplicateHash {
                    first,
                    second: s.id,
                    hash: s.hash,
                });
            }
            seen.insert(s.hash, s.id);
        }
        for (from, _) in self.transitions.keys() {
            if !self.contains(*from) {
                return Err(ModelError::UnknownState(*from));
            }
        }
        for to in self.transitions.values() {
            if !self.contains(*to) {
                return Err(ModelError::UnknownState(*to));
            }
        }
        Ok(())
    }

    /// Rebuilds a model from parts, validating every invariant.
    pub fn from_parts(
        states: Vec<ModelState>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self, ModelError> {
        let by_hash = states.iter().map(|s| (s.hash, s.id)).collect();
        let mut model = StateModel {
            states,
            by_hash,
            transitions: IndexMap::new(),
            nondeterminism: 0,
        };
        model.validate()?;
        for t in transitions {
            if model.target(t.from, &t.event).is_some() {
                return Err(ModelError::DuplicateTransition {
                    from: t.from,
                    event: t.event.label(),
                });
            }
            model.add_transition(t.from, t.event, t.to)?;
        }
        Ok(model)
    }

    /// The full model document (`model.json`).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelDocument {
            entry: 0,
            states: self.states.clone(),
            transitions: self.transitions().collect(),
        })
        .expect("models always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        Self::from_parts(doc.states, doc.transitions)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    entry: usize,
    states: Vec<ModelState>,
    transitions: Vec<Transition>,
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn screen(tag: &str) -> ViewNode {
        ViewNode::new(tag, vec![ViewNode::leaf("Button"), ViewNode::leaf("Text")])
    }

    fn meta(activity: &str) -> StateMeta {
        StateMeta {
            activity: activity.into(),
            ..Default::default()
        }
    }

    #[test]
    fn first_state_is_entry() {
        let mut m = StateModel::new();
        assert_eq!(m.entry(), None);
        assert_eq!(m.add_state(screen("Home"), meta("Main")), (StateId(0), true));
        assert_eq!(m.entry(), Some(StateId::ENTRY));
    }

    #[test]
    fn permuted_snapshot_maps_to_existing_state() {
        let mut m = StateModel::new();
        m.add_state(screen("Home"), meta("Main"));
        let permuted = ViewNode::new("Home", vec![ViewNode::leaf("Text"), ViewNode::leaf("Button")]);
        assert_eq!(m.add_state(permuted, meta("Main")), (StateId(0), false));
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn ordinals_are_dense() {
        let mut m = StateModel::new();
        for tag in ["A", "B", "C"] {
            m.add_state(screen(tag), meta("Main"));
        }
        assert_eq!(m.add_state(screen("D"), meta("Main")), (StateId(3), true));
        m.validate().unwrap();
    }

    #[test]
    fn transitions_are_a_partial_function() {
        let mut m = StateModel::new();
        for tag in ["A", "B", "C"] {
            m.add_state(screen(tag), meta("Main"));
        }
        let tap = UiEvent::tap(vec![0]);
        assert_eq!(m.add_transition(StateId(0), tap.clone(), StateId(1)).unwrap(), TransitionUpdate::Inserted);
        assert_eq!(m.add_transition(StateId(0), tap.clone(), StateId(1)).unwrap(), TransitionUpdate::Unchanged);
        assert_eq!(m.nondeterminism_count(), 0);
        assert_eq!(
            m.add_transition(StateId(0), tap.clone(), StateId(2)).unwrap(),
            TransitionUpdate::Overwritten { previous: StateId(1) }
        );
        assert_eq!(m.nondeterminism_count(), 1);
        assert_eq!(m.transition_count(), 1);
        assert_eq!(m.target(StateId(0), &tap), Some(StateId(2)));
        assert!(matches!(
            m.add_transition(StateId(0), tap, StateId(9)),
            Err(ModelError::UnknownState(StateId(9)))
        ));
    }

    #[test]
    fn terminal_states_are_derived() {
        let mut m = StateModel::new();
        for tag in ["A", "B", "C"] {
            m.add_state(screen(tag), meta("Main"));
        }
        m.add_transition(StateId(0), UiEvent::tap(vec![0]), StateId(1)).unwrap();
        m.add_transition(StateId(1), UiEvent::tap(vec![0]), StateId(2)).unwrap();
        assert_eq!(m.terminal_states(), vec![StateId(2)]);
        assert_eq!(m.event_universe().len(), 1);
        assert_eq!(m.reachable(), vec![true, true, true]);
    }

    #[test]
    fn model_document_round_trip() {
        let mut m = StateModel::new();
        m.add_state(screen("A"), meta("Main"));
        m.add_state(
            screen("B"),
            StateMeta {
                activity: "Detail".into(),
                intent: Some(IntentRecord {
                    activity: "Detail".into(),
                    payload: "detail".into(),
                }),
                ui_stack: vec![TraceStep {
                    state: StateId(0),
                    event: UiEvent::tap(vec![0]),
                }],
            },
        );
        m.add_transition(StateId(0), UiEvent::tap(vec![0]), StateId(1)).unwrap();
        let text = m.to_json();
        let back = StateModel::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn tampered_document_is_rejected() {
        let mut m = StateModel::new();
        m.add_state(screen("A"), meta("Main"));
        let text = m.to_json().replace(&m.states()[0].hash.to_hex(), "0000000000000001");
        assert!(matches!(
            StateModel::from_json(&text),
            Err(ModelError::HashMismatch { .. })
        ));
    }
}
