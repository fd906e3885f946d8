use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spec::{Effect, NoiseKind, NoiseRule, ScreenRef, SimAppSpec};
use crate::env::{EnvError, Environment};
use crate::model::{Action, IntentRecord, UiEvent};
use crate::tree::{NodeKind, ViewNode};

/// Tag of the leaf inserted by `insert_decoration` noise.
pub const DECORATION_TAG: &str = "NotificationBanner";

/// `duplicate_list_row` stops growing a list past this many rows.
const MAX_LIST_ROWS: usize = 32;

/// Mirrors the rendered tree, recording which template child each rendered
/// node came from. Decorations have no template origin.
#[derive(Debug, Clone)]
struct Origin {
    template: Option<usize>,
    duplicate: bool,
    children: Vec<Origin>,
}

impl Origin {
    fn of(tree: &ViewNode) -> Origin {
        Origin {
            template: None,
            duplicate: false,
            children: tree
                .children()
                .iter()
                .enumerate()
                .map(|(i, c)| Origin {
                    template: Some(i),
                    ..Origin::of(c)
                })
                .collect(),
        }
    }

    fn at(&self, raw: &[usize]) -> Option<&Origin> {
        raw.iter().try_fold(self, |o, &i| o.children.get(i))
    }

    fn at_mut(&mut self, raw: &[usize]) -> Option<&mut Origin> {
        raw.iter().try_fold(self, |o, &i| o.children.get_mut(i))
    }

    /// Template path of the rendered node at `raw`, or `None` when the node
    /// (or an ancestor) is a decoration.
    fn template_path(&self, raw: &[usize]) -> Option<Vec<usize>> {
        let mut node = self;
        let mut out = Vec::with_capacity(raw.len());
        for &i in raw {
            node = node.children.get(i)?;
            out.push(node.template?);
        }
        Some(out)
    }

    /// Rendered raw path of the original (non-duplicate) node for a template
    /// path.
    fn rendered_path(&self, template: &[usize]) -> Option<Vec<usize>> {
        let mut node = self;
        let mut out = Vec::with_capacity(template.len());
        for &t in template {
            let i = node
                .children
                .iter()
                .position(|c| c.template == Some(t) && !c.duplicate)?;
            out.push(i);
            node = &node.children[i];
        }
        Some(out)
    }
}

/// A deterministic simulated app driven by a [`SimAppSpec`].
#[derive(Debug, Clone)]
pub struct SimApp {
    spec: Arc<SimAppSpec>,
    screens: HashMap<String, ScreenRef>,
    current: ScreenRef,
    rendered: ViewNode,
    origins: Origin,
    back_stack: Vec<ScreenRef>,
    rng: ChaCha8Rng,
    launches: u64,
    steps: u64,
}

impl SimApp {
    /// Launches the app at its entry screen.
    pub fn new(spec: impl Into<Arc<SimAppSpec>>) -> Self {
        let spec = spec.into();
        let screens = spec
            .screen_index()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let entry = spec.entry_screen();
        let tree = spec.screen(entry).tree.clone();
        SimApp {
            origins: Origin::of(&tree),
            rendered: tree,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            current: entry,
            back_stack: Vec::new(),
            screens,
            spec,
            launches: 1,
            steps: 0,
        }
    }

    pub fn spec(&self) -> &SimAppSpec {
        &self.spec
    }

    pub fn current_screen(&self) -> &str {
        &self.spec.screen(self.current).id
    }

    pub fn launches(&self) -> u64 {
        self.launches
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn show(&mut self, at: ScreenRef) {
        self.current = at;
        self.rendered = self.spec.screen(at).tree.clone();
        self.origins = Origin::of(&self.rendered);
    }

    fn navigate(&mut self, screen_id: &str) {
        let to = self.screens[screen_id];
        if to.activity != self.current.activity {
            self.back_stack.push(self.current);
        }
        self.show(to);
    }

    fn apply(&mut self, effect: &Effect) {
        match effect {
            Effect::Noop => {}
            Effect::Goto(id) => self.navigate(id),
            Effect::GotoUntilRestart(id) => {
                if self.launches == 1 {
                    self.navigate(id);
                }
            }
            Effect::Back => {
                if let Some(prev) = self.back_stack.pop() {
                    self.show(prev);
                }
            }
        }
    }

    fn apply_noise(&mut self) {
        for k in 0..self.spec.noise_rules.len() {
            let rule = self.spec.noise_rules[k].clone();
            let roll: f64 = self.rng.gen();
            if roll < rule.probability {
                self.perturb(&rule);
            }
        }
    }

    fn perturb(&mut self, rule: &NoiseRule) {
        let path = rule.target_path.as_slice();
        let Some(node) = self.rendered.node_at_raw(path) else {
            return;
        };
        if node.kind() == NodeKind::WebContainer {
            return;
        }
        let origin = self.origins.at(path).expect("origin tree mirrors rendered tree");
        match rule.kind {
            NoiseKind::InsertDecoration => {
                if origin.children.iter().any(|c| c.template.is_none()) {
                    return;
                }
                self.rendered.edit_at(path, |n| {
                    n.push_child(ViewNode::leaf(DECORATION_TAG))
                        .expect("plain containers accept children")
                });
                self.origins
                    .at_mut(path)
                    .expect("origin tree mirrors rendered tree")
                    .children
                    .push(Origin {
                        template: None,
                        duplicate: false,
                        children: Vec::new(),
                    });
            }
            NoiseKind::PermuteChildren => {
                let mut order: Vec<usize> = (0..node.children().len()).collect();
                order.shuffle(&mut self.rng);
                self.rendered.edit_at(path, |n| {
                    n.edit_children(|kids| {
                        let old = std::mem::take(kids);
                        let mut slots: Vec<Option<ViewNode>> = old.into_iter().map(Some).collect();
                        kids.extend(order.iter().map(|&i| slots[i].take().expect("permutation")));
                    })
                    .expect("plain containers accept edits")
                });
                let o = self.origins.at_mut(path).expect("origin tree mirrors rendered tree");
                let old = std::mem::take(&mut o.children);
                let mut slots: Vec<Option<Origin>> = old.into_iter().map(Some).collect();
                o.children = order.iter().map(|&i| slots[i].take().expect("permutation")).collect();
            }
            NoiseKind::DuplicateListRow => {
                if node.kind() != NodeKind::ListContainer || node.children().len() >= MAX_LIST_ROWS {
                    return;
                }
                let originals: Vec<usize> = origin
                    .children
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.template.is_some() && !c.duplicate)
                    .map(|(i, _)| i)
                    .collect();
                let Some(&pick) = originals.choose(&mut self.rng) else {
                    return;
                };
                let row = node.children()[pick].clone();
                self.rendered.edit_at(path, |n| {
                    n.push_child(row).expect("list containers accept children")
                });
                let o = self.origins.at_mut(path).expect("origin tree mirrors rendered tree");
                let mut copy = o.children[pick].clone();
                copy.duplicate = true;
                o.children.push(copy);
            }
        }
    }

    fn intent_of(&self, activity: usize) -> IntentRecord {
        let a = &self.spec.activities[activity];
        IntentRecord {
            activity: a.name.clone(),
            payload: a.intent_token.clone(),
        }
    }
}

impl Environment for SimApp {
    fn observe(&mut self) -> ViewNode {
        self.rendered.clone()
    }

    fn current_activity(&self) -> String {
        self.spec.activities[self.current.activity].name.clone()
    }

    fn current_intent(&self) -> IntentRecord {
        self.intent_of(self.current.activity)
    }

    fn actionable_widgets(&self, tree: &ViewNode) -> Vec<UiEvent> {
        let mut events: Vec<UiEvent> = self
            .spec
            .screen(self.current)
            .bindings
            .iter()
            .filter_map(|b| {
                let raw = self.origins.rendered_path(&b.path)?;
                let path = tree.raw_to_canonical(&raw)?;
                Some(UiEvent::new(b.action, path))
            })
            .collect();
        events.sort();
        events.dedup();
        events
    }

    fn perform(&mut self, event: &UiEvent) -> Result<(), EnvError> {
        let effect = if event.action == Action::GoBack {
            Some(Effect::Back)
        } else {
            let raw = self
                .rendered
                .canonical_to_raw(&event.path)
                .ok_or_else(|| EnvError::Unresolvable {
                    path: event.path.clone(),
                })?;
            self.origins.template_path(&raw).and_then(|template| {
                self.spec
                    .screen(self.current)
                    .bindings
                    .iter()
                    .find(|b| b.path == template && b.action == event.action)
                    .map(|b| b.effect.clone())
            })
        };
        if let Some(effect) = effect {
            self.apply(&effect);
        }
        self.steps += 1;
        self.apply_noise();
        Ok(())
    }

    fn send_intent(&mut self, record: &IntentRecord) -> Result<(), EnvError> {
        let activity = self
            .spec
            .activities
            .iter()
            .position(|a| a.intent_token == record.payload)
            .ok_or_else(|| EnvError::UnknownIntent(record.payload.clone()))?;
        self.back_stack.clear();
        self.show(ScreenRef {
            activity,
            screen: 0,
        });
        Ok(())
    }

    fn restart(&mut self) -> Result<(), EnvError> {
        self.launches += 1;
        self.rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        self.back_stack.clear();
        self.show(self.spec.entry_screen());
        Ok(())
    }
}
