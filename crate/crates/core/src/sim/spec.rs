use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Action;
use crate::tree::ViewNode;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("invalid app spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown screen {0}")]
    UnknownScreen(String),
    #[error("entry_activity names unknown activity {0}")]
    UnknownEntryActivity(String),
    #[error("duplicate activity {0}")]
    DuplicateActivity(String),
    #[error("duplicate intent_token {0}")]
    DuplicateIntentToken(String),
    #[error("duplicate screen id {0}")]
    DuplicateScreen(String),
    #[error("activity {0} has no screens")]
    EmptyActivity(String),
    #[error("screen {screen}: binding path {path:?} does not resolve in its tree")]
    DanglingBinding { screen: String, path: Vec<usize> },
    #[error("screen {screen}: more than one binding for {action} at {path:?}")]
    DuplicateBinding {
        screen: String,
        action: Action,
        path: Vec<usize>,
    },
    #[error("noise_rules[{index}].probability = {value} is outside [0, 1]")]
    BadProbability { index: usize, value: f64 },
    #[error("unknown corpus app {0}")]
    UnknownCorpusApp(String),
    #[error("cannot read app spec {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Effect {
    Noop,
    /// Activity-level back: return to the screen the previous activity was on.
    Back,
    Goto(String),
    /// Navigates only until the app is first restarted; a no-op afterwards.
    GotoUntilRestart(String),
}

impl Effect {
    pub fn target(&self) -> Option<&str> {
        match self {
            Effect::Goto(s) | Effect::GotoUntilRestart(s) => Some(s),
            Effect::Noop | Effect::Back => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Binding {
    /// Declaration-order child indices into the screen's tree.
    pub path: Vec<usize>,
    pub action: Action,
    pub effect: Effect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenSpec {
    pub id: String,
    pub tree: ViewNode,
    #[serde(default)]
    pub bindings: Vec<Binding>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivitySpec {
    pub name: String,
    pub intent_token: String,
    /// The first screen is where the activity's intent lands.
    pub screens: Vec<ScreenSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Add one banner leaf under the target container.
    InsertDecoration,
    PermuteChildren,
    DuplicateListRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseRule {
    pub kind: NoiseKind,
    pub probability: f64,
    /// Declaration-order path of the container on whatever screen is shown.
    #[serde(default)]
    pub target_path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimAppSpec {
    pub name: String,
    pub seed: u64,
    pub entry_activity: String,
    pub activities: Vec<ActivitySpec>,
    #[serde(default)]
    pub noise_rules: Vec<NoiseRule>,
}

/// Position of a screen inside its spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScreenRef {
    pub activity: usize,
    pub screen: usize,
}

impl SimAppSpec {
    pub fn from_json(document: &[u8]) -> Result<Self, SpecError> {
        let spec: SimAppSpec = serde_json::from_slice(document)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("app specs always serialize")
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let mut activities = BTreeSet::new();
        let mut tokens = BTreeSet::new();
        let mut screens = BTreeSet::new();
        for a in &self.activities {
            if !activities.insert(a.name.as_str()) {
                return Err(SpecError::DuplicateActivity(a.name.clone()));
            }
            if !tokens.insert(a.intent_token.as_str()) {
                return Err(SpecError::DuplicateIntentToken(a.intent_token.clone()));
            }
            if a.screens.is_empty() {
                return Err(SpecError::EmptyActivity(a.name.clone()));
            }
            for s in &a.screens {
                if !screens.insert(s.id.as_str()) {
                    return Err(SpecError::DuplicateScreen(s.id.clone()));
                }
            }
        }
        if !activities.contains(self.entry_activity.as_str()) {
            return Err(SpecError::UnknownEntryActivity(self.entry_activity.clone()));
        }
        for a in &self.activities {
            for s in &a.screens {
                let mut seen = BTreeSet::new();
                for b in &s.bindings {
                    if s.tree.node_at_raw(&b.path).is_none() {
                        return Err(SpecError::DanglingBinding {
                            screen: s.id.clone(),
                            path: b.path.clone(),
                        });
                    }
                    if !seen.insert((b.path.clone(), b.action)) {
                        return Err(SpecError::DuplicateBinding {
                            screen: s.id.clone(),
                            action: b.action,
                            path: b.path.clone(),
                        });
                    }
                    if let Some(target) = b.effect.target() {
                        if !screens.contains(target) {
                            return Err(SpecError::UnknownScreen(target.to_string()));
                        }
                    }
                }
            }
        }
        for (index, rule) in self.noise_rules.iter().enumerate() {
            if !(0.0..=1.0).contains(&rule.probability) {
                return Err(SpecError::BadProbability {
                    index,
                    value: rule.probability,
                });
            }
        }
        Ok(())
    }

    pub fn screen_count(&self) -> usize {
        self.activities.iter().map(|a| a.screens.len()).sum()
    }

    pub fn screen_index(&self) -> HashMap<&str, ScreenRef> {
        let mut index = HashMap::new();
        for (ai, a) in self.activities.iter().enumerate() {
            for (si, s) in a.screens.iter().enumerate() {
                index.insert(
                    s.id.as_str(),
                    ScreenRef {
                        activity: ai,
                        screen: si,
                    },
                );
            }
        }
        index
    }

    pub fn screen(&self, at: ScreenRef) -> &ScreenSpec {
        &self.activities[at.activity].screens[at.screen]
    }

    pub fn entry_screen(&self) -> ScreenRef {
        let activity = self
            .activities
            .iter()
            .position(|a| a.name == self.entry_activity)
            .expect("validated entry activity");
        ScreenRef {
            activity,
            screen: 0,
        }
    }

    /// Screens reachable from the entry screen by following navigation
    /// bindings, in BFS order.
    pub fn reachable_screens(&self) -> Vec<ScreenRef> {
        let index = self.screen_index();
        let entry = self.entry_screen();
        let mut seen = BTreeSet::from([entry]);
        let mut order = vec![entry];
        let mut queue = VecDeque::from([entry]);
        while let Some(at) = queue.pop_front() {
            for b in &self.screen(at).bindings {
                if let Some(next) = b.effect.target().and_then(|t| index.get(t)) {
                    if seen.insert(*next) {
                        order.push(*next);
                        queue.push_back(*next);
                    }
                }
            }
        }
        order
    }

    /// Expected state and transition counts for a complete noiseless
    /// exploration: one state per reachable screen, one transition per
    /// binding on a reachable screen.
    pub fn coverage_totals(&self) -> (usize, usize) {
        let reachable = self.reachable_screens();
        let transitions = reachable
            .iter()
            .map(|&at| self.screen(at).bindings.len())
            .sum();
        (reachable.len(), transitions)
    }

    /// True when no noise rule can change a screen's structure hash:
    /// reordering and list-row duplication are invisible to the hash,
    /// decorations are not.
    pub fn is_hash_stable(&self) -> bool {
        self.noise_rules
            .iter()
            .all(|r| r.probability == 0.0 || r.kind != NoiseKind::InsertDecoration)
    }

    /// A copy with noise rules replaced.
    pub fn with_noise(&self, rules: Vec<NoiseRule>) -> Self {
        SimAppSpec {
            noise_rules: rules,
            ..self.clone()
        }
    }

    pub fn without_noise(&self) -> Self {
        self.with_noise(Vec::new())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SimAppSpec {
            seed,
            ..self.clone()
        }
    }

    /// Number of screens per activity name.
    pub fn activity_sizes(&self) -> BTreeMap<&str, usize> {
        self.activities
            .iter()
            .map(|a| (a.name.as_str(), a.screens.len()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "minimal", "seed": 1, "entry_activity": "Main",
        "activities": [{"name": "Main", "intent_token": "main", "screens": [
            {"id": "home", "tree": {"tag": "Home", "children": [{"tag": "Button"}]},
             "bindings": [{"path": [0], "action": "tap", "effect": "noop"}]}
        ]}]
    }"#;

    #[test]
    fn minimal_spec_loads() {
        let spec = SimAppSpec::from_json(MINIMAL.as_bytes()).unwrap();
        assert_eq!(spec.screen_count(), 1);
        assert_eq!(spec.coverage_totals(), (1, 1));
    }

    #[test]
    fn dangling_screen_reference_is_named() {
        let doc = MINIMAL.replace(r#""effect": "noop""#, r#""effect": {"goto": "X"}"#);
        let err = SimAppSpec::from_json(doc.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "unknown screen X");
    }

    #[test]
    fn schema_violations_name_the_field() {
        let doc = MINIMAL.replace(r#""entry_activity": "Main","#, "");
        let err = SimAppSpec::from_json(doc.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("entry_activity"), "{err}");
        let doc = MINIMAL.replace(r#""seed": 1"#, r#""seed": 1, "colour": 2"#);
        let err = SimAppSpec::from_json(doc.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn binding_paths_must_resolve() {
        let doc = MINIMAL.replace(r#""path": [0]"#, r#""path": [3]"#);
        assert!(matches!(
            SimAppSpec::from_json(doc.as_bytes()),
            Err(SpecError::DanglingBinding { .. })
        ));
    }

    #[test]
    fn probabilities_are_checked() {
        let doc = MINIMAL.replace(
            r#""seed": 1,"#,
            r#""seed": 1, "noise_rules": [{"kind": "permute_children", "probability": 1.5}],"#,
        );
        assert!(matches!(
            SimAppSpec::from_json(doc.as_bytes()),
            Err(SpecError::BadProbability { index: 0, .. })
        ));
    }

    #[test]
    fn unknown_entry_activity() {
        let doc = MINIMAL.replace(r#""entry_activity": "Main""#, r#""entry_activity": "Nope""#);
        assert!(matches!(
            SimAppSpec::from_json(doc.as_bytes()),
            Err(SpecError::UnknownEntryActivity(_))
        ));
    }
}
