//! Depth-first exploration with intent-based backtracking.
//!
//! The explorer walks every actionable widget of every discovered state in
//! canonical order. Recursion is an explicit frame stack. Backtracking is
//! lazy: the engine only restores a state when it is about to act from it and
//! the screen it last observed is some other state.

use std::time::{Duration, Instant};

use log::{debug, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{CoverageLog, CoverageTotals};
use crate::env::{EnvError, Environment};
use crate::model::{
    Action, ModelState, StateId, StateMeta, StateModel, TraceStep, UiEvent,
};
use crate::shared::SnapshotCell;
use crate::tree::{relocate, similarity_with_cutoff, tree_hash, ViewNode};

/// Text typed into every text field.
pub const PROBE_TEXT: &str = "test";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BacktrackStrategy {
    /// Relaunch the target's activity by intent, then replay its UI stack.
    #[default]
    Intent,
    /// Restart the app and replay the model's shortest path every time.
    RestartReplay,
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Minimum similarity for treating an observed screen as a known state.
    pub similarity_threshold: f64,
    pub matching_cutoff: f64,
    pub time_budget: Duration,
    /// Cap on commands sent to the environment (events, intents, restarts).
    pub max_events: usize,
    /// Extra observations allowed while waiting for two equal hashes.
    pub stabilization_policy: usize,
    pub backtrack: BacktrackStrategy,
    /// Hooks running longer than this are reported, not interrupted.
    pub hook_timeout: Duration,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            similarity_threshold: 0.8,
            matching_cutoff: crate::tree::DEFAULT_MATCHING_CUTOFF,
            time_budget: Duration::from_secs(60),
            max_events: 10_000,
            stabilization_policy: 2,
            backtrack: BacktrackStrategy::Intent,
            hook_timeout: Duration::from_secs(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("similarity_threshold", self.similarity_threshold),
            ("matching_cutoff", self.matching_cutoff),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::OutOfRange { name, value });
            }
        }
        if self.time_budget.is_zero() {
            return Err(ConfigError::NotPositive("time_budget"));
        }
        if self.max_events == 0 {
            return Err(ConfigError::NotPositive("max_events"));
        }
        Ok(())
    }

    pub fn similarity(&self, expected: &ViewNode, observed: &ViewNode) -> f64 {
        similarity_with_cutoff(expected, observed, self.matching_cutoff).value()
    }

    /// Hash equality, or similarity strictly above the threshold.
    pub fn same_state(&self, expected: &ViewNode, observed: &ViewNode) -> bool {
        tree_hash(expected) == tree_hash(observed)
            || self.similarity(expected, observed) > self.similarity_threshold
    }
}

/// A per-state analysis plug-in.
pub trait DetectorHook: Send {
    fn name(&self) -> &str;

    /// Free-form configuration supplied before exploration starts.
    fn input(&mut self, _data: &str) {}

    /// Called once for every newly discovered state.
    fn operate(&mut self, state: StateId, snapshot: &ViewNode) -> Option<String>;

    /// Receives each finding this hook produced.
    fn output(&mut self, _finding: &Finding) {}
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub hook: String,
    pub state: StateId,
    pub message: String,
}

/// Flags states whose screen contains a widget with a given tag, such as a
/// crash dialog.
#[derive(Debug, Clone)]
pub struct TagDetector {
    tag: String,
}

impl TagDetector {
    pub fn new(tag: impl Into<String>) -> Self {
        TagDetector { tag: tag.into() }
    }
}

impl DetectorHook for TagDetector {
    fn name(&self) -> &str {
        "tag-detector"
    }

    fn input(&mut self, data: &str) {
        self.tag = data.trim().to_string();
    }

    fn operate(&mut self, state: StateId, snapshot: &ViewNode) -> Option<String> {
        let mut hit = false;
        snapshot.walk_canonical(&mut |_, n| hit |= n.tag() == self.tag);
        hit.then(|| format!("{} shown in state {state}", self.tag))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreStats {
    /// Events performed to discover transitions.
    pub forward_events: usize,
    /// Events performed while replaying traces during backtracking.
    pub replay_events: usize,
    pub intents: usize,
    pub restarts: usize,
    pub observations: usize,
    pub backtracks: usize,
    /// Backtracks that fell through to restart-and-replay.
    pub fallbacks: usize,
    pub backtrack_failures: usize,
    /// Events dropped because their widget could not be found again.
    pub skipped_events: usize,
    pub hook_calls: usize,
}

impl ExploreStats {
    pub fn events_sent(&self) -> usize {
        self.forward_events + self.backtrack_cost()
    }

    /// Commands spent restoring states rather than discovering transitions.
    pub fn backtrack_cost(&self) -> usize {
        self.replay_events + self.intents + self.restarts
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum Termination {
    /// Every discovered state's events were tried.
    Exhausted,
    TimeBudget,
    MaxEvents,
    Fault { message: String },
}

#[derive(Debug, Clone)]
pub struct Exploration {
    pub model: StateModel,
    pub coverage: CoverageLog,
    pub findings: Vec<Finding>,
    pub stats: ExploreStats,
    pub termination: Termination,
    pub wall: Duration,
}

/// Cells the explorer republishes into as it runs, for concurrent readers.
#[derive(Debug, Clone, Default)]
pub struct LiveView {
    pub model: SnapshotCell<StateModel>,
    pub coverage: SnapshotCell<CoverageLog>,
}

#[derive(Debug, Clone, Default)]
pub struct ExploreOptions {
    pub live: Option<LiveView>,
    pub totals: Option<CoverageTotals>,
}

#[derive(Debug, Error)]
pub enum BacktrackError {
    #[error("could not restore state {target}")]
    Failed {
        target: StateId,
        expected: Box<ViewNode>,
        observed: Box<ViewNode>,
    },
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("budget exhausted while backtracking ({0:?})")]
    Halted(Termination),
    #[error(transparent)]
    Env(EnvError),
}

/// Why a command could not be sent or did not succeed.
enum Stop {
    Halt(Termination),
    Env(EnvError),
}

impl From<Stop> for BacktrackError {
    fn from(stop: Stop) -> Self {
        match stop {
            Stop::Halt(t) => BacktrackError::Halted(t),
            Stop::Env(e) => BacktrackError::Env(e),
        }
    }
}

/// An environment plus the budget and counters of one engine run.
struct Session<'a, E> {
    env: &'a mut E,
    config: &'a EngineConfig,
    started: Instant,
    limited: bool,
    stats: ExploreStats,
}

impl<'a, E: Environment> Session<'a, E> {
    fn new(env: &'a mut E, config: &'a EngineConfig, limited: bool) -> Self {
        Session {
            env,
            config,
            started: Instant::now(),
            limited,
            stats: ExploreStats::default(),
        }
    }

    fn charge(&self) -> Result<(), Stop> {
        if !self.limited {
            return Ok(());
        }
        if self.stats.events_sent() >= self.config.max_events {
            return Err(Stop::Halt(Termination::MaxEvents));
        }
        if self.started.elapsed() >= self.config.time_budget {
            return Err(Stop::Halt(Termination::TimeBudget));
        }
        Ok(())
    }

    fn perform(&mut self, event: &UiEvent, replay: bool) -> Result<(), Stop> {
        self.charge()?;
        if replay {
            self.stats.replay_events += 1;
        } else {
            self.stats.forward_events += 1;
        }
        self.env.perform(event).map_err(Stop::Env)
    }

    fn intent(&mut self, state: &ModelState) -> Result<bool, Stop> {
        let Some(record) = &state.intent else {
            return Ok(false);
        };
        self.charge()?;
        self.stats.intents += 1;
        match self.env.send_intent(record) {
            Ok(()) => Ok(true),
            Err(EnvError::Fault(m)) => Err(Stop::Env(EnvError::Fault(m))),
            Err(e) => {
                debug!("intent for state {} rejected: {e}", state.id);
                Ok(false)
            }
        }
    }

    fn restart(&mut self) -> Result<(), Stop> {
        self.charge()?;
        self.stats.restarts += 1;
        self.env.restart().map_err(Stop::Env)
    }

    /// Observes until two consecutive hashes agree or the policy runs out.
    fn observe(&mut self) -> ViewNode {
        self.stats.observations += 1;
        let mut tree = self.env.observe();
        for _ in 0..self.config.stabilization_policy {
            self.stats.observations += 1;
            let next = self.env.observe();
            let settled = tree_hash(&next) == tree_hash(&tree);
            tree = next;
            if settled {
                break;
            }
        }
        tree
    }

    fn widgets(&self, tree: &ViewNode) -> Vec<UiEvent> {
        self.env
            .actionable_widgets(tree)
            .into_iter()
            .map(|e| match e.action {
                Action::TypeText if e.value.is_none() => UiEvent::type_text(e.path, PROBE_TEXT),
                _ => e,
            })
            .collect()
    }

    /// Performs `event`, recorded against `source`, on the live screen
    /// `observed`. `Ok(false)` means the widget is gone.
    fn perform_on(
        &mut self,
        source: &ViewNode,
        event: &UiEvent,
        observed: &ViewNode,
        replay: bool,
    ) -> Result<bool, Stop> {
        let event = if tree_hash(source) == tree_hash(observed) || event.action == Action::GoBack {
            event.clone()
        } else {
            match relocate(source, &event.path, observed) {
                Some(path) => event.with_path(path),
                None => return Ok(false),
            }
        };
        match self.perform(&event, replay) {
            Ok(()) => Ok(true),
            Err(Stop::Env(EnvError::Unresolvable { .. })) => Ok(false),
            Err(e) => Err(e),
        }
    }

    fn restore(&mut self, model: &StateModel, target: StateId) -> Result<ViewNode, BacktrackError> {
        let t = model.state(target).ok_or(BacktrackError::UnknownState(target))?;
        self.stats.backtracks += 1;
        if self.config.backtrack == BacktrackStrategy::Intent {
            if let Some(tree) = self.restore_by_intent(model, t)? {
                return Ok(tree);
            }
            self.stats.fallbacks += 1;
            debug!("intent backtrack to state {target} failed, restarting");
        }
        self.restore_by_restart(model, t)
    }

    fn restore_by_intent(
        &mut self,
        model: &StateModel,
        t: &ModelState,
    ) -> Result<Option<ViewNode>, BacktrackError> {
        let mut sent = false;
        if self.env.current_activity() != t.activity {
            if !self.intent(t)? {
                return Ok(None);
            }
            sent = true;
        }
        loop {
            let observed = self.observe();
            if tree_hash(&observed) == t.hash {
                return Ok(Some(observed));
            }
            if let Some(from) = self.stack_match(model, t, &observed) {
                return self.replay_stack(model, t, from, observed);
            }
            // Same activity but off the recorded trace: relaunch it once.
            if sent || !self.intent(t)? {
                return Ok(None);
            }
            sent = true;
        }
    }

    /// Index into `t.ui_stack` to replay from, scanning from the deepest
    /// entry (the target itself) back toward the activity's entry point.
    fn stack_match(&self, model: &StateModel, t: &ModelState, observed: &ViewNode) -> Option<usize> {
        let n = t.ui_stack.len();
        (0..=n).rev().find(|&k| {
            let state = if k == n { t.id } else { t.ui_stack[k].state };
            model
                .state(state)
                .is_some_and(|s| self.config.similarity(&s.snapshot, observed) > self.config.similarity_threshold)
        })
    }

    fn replay_stack(
        &mut self,
        model: &StateModel,
        t: &ModelState,
        from: usize,
        mut observed: ViewNode,
    ) -> Result<Option<ViewNode>, BacktrackError> {
        for k in from..t.ui_stack.len() {
            let TraceStep { state, event } = &t.ui_stack[k];
            let source = &model.state(*state).ok_or(BacktrackError::UnknownState(*state))?.snapshot;
            if !self.perform_on(source, event, &observed, true)? {
                return Ok(None);
            }
            observed = self.observe();
            let next = t.ui_stack.get(k + 1).map_or(t.id, |s| s.state);
            let expected = &model.state(next).ok_or(BacktrackError::UnknownState(next))?.snapshot;
            if !self.config.same_state(expected, &observed) {
                return Ok(None);
            }
        }
        Ok(Some(observed))
    }

    fn restore_by_restart(&mut self, model: &StateModel, t: &ModelState) -> Result<ViewNode, BacktrackError> {
        self.restart()?;
        let mut observed = self.observe();
        let failed = |observed: ViewNode| BacktrackError::Failed {
            target: t.id,
            expected: Box::new(t.snapshot.clone()),
            observed: Box::new(observed),
        };
        let Some(path) = model.shortest_path(t.id) else {
            return Err(failed(observed));
        };
        let mut at = StateId::ENTRY;
        for step in &path.steps {
            let source = &model.state(at).ok_or(BacktrackError::UnknownState(at))?.snapshot;
            if !self.perform_on(source, &step.event, &observed, true)? {
                return Err(failed(observed));
            }
            observed = self.observe();
            let expected = &model
                .state(step.expected)
                .ok_or(BacktrackError::UnknownState(step.expected))?
                .snapshot;
            if !self.config.same_state(expected, &observed) {
                return Err(failed(observed));
            }
            at = step.expected;
        }
        if self.config.same_state(&t.snapshot, &observed) {
            Ok(observed)
        } else {
            Err(failed(observed))
        }
    }
}

/// Restores `target` on `env` without any budget, returning the screen it
/// ends on.
pub fn back_track<E: Environment>(
    env: &mut E,
    model: &StateModel,
    target: StateId,
    config: &EngineConfig,
) -> Result<ViewNode, BacktrackError> {
    Session::new(env, config, false).restore(model, target)
}

struct Frame {
    state: StateId,
    events: Vec<UiEvent>,
    next: usize,
}

pub fn explore<E: Environment>(
    env: &mut E,
    config: &EngineConfig,
    hooks: &mut [Box<dyn DetectorHook>],
) -> Result<Exploration, ConfigError> {
    explore_with(env, config, hooks, &ExploreOptions::default())
}

pub fn explore_with<E: Environment>(
    env: &mut E,
    config: &EngineConfig,
    hooks: &mut [Box<dyn DetectorHook>],
    options: &ExploreOptions,
) -> Result<Exploration, ConfigError> {
    config.validate()?;
    let mut s = Session::new(env, config, true);
    let mut model = StateModel::new();
    let mut coverage = CoverageLog::new();
    coverage.set_totals(options.totals);
    let mut findings = Vec::new();

    let entry = s.observe();
    let meta = StateMeta {
        activity: s.env.current_activity(),
        intent: Some(s.env.current_intent()),
        ui_stack: Vec::new(),
    };
    let (root, _) = model.add_state(entry.clone(), meta);
    run_hooks(hooks, root, &entry, config, &mut findings, &mut s.stats);
    let mut stack = vec![Frame {
        state: root,
        events: s.widgets(&entry),
        next: 0,
    }];
    // The state we believe the app shows, with the tree actually observed.
    let mut current = Some((root, entry));
    let publish = |model: &StateModel, coverage: &CoverageLog| {
        if let Some(live) = &options.live {
            live.model.publish(model.clone());
            live.coverage.publish(coverage.clone());
        }
    };
    coverage.record_sample(&model, s.started.elapsed(), 0);
    publish(&model, &coverage);

    let termination = loop {
        let Some(frame) = stack.last_mut() else {
            break Termination::Exhausted;
        };
        let Some(event) = frame.events.get(frame.next).cloned() else {
            stack.pop();
            continue;
        };
        frame.next += 1;
        let from = frame.state;

        let observed = match current.take() {
            Some((id, tree)) if id == from => tree,
            _ => match s.restore(&model, from) {
                Ok(tree) => tree,
                Err(BacktrackError::Halted(t)) => break t,
                Err(BacktrackError::Env(e)) => break Termination::Fault { message: e.to_string() },
                Err(e) => {
                    warn!("abandoning the rest of state {from}: {e}");
                    s.stats.backtrack_failures += 1;
                    stack.pop();
                    continue;
                }
            },
        };

        let source = model.state(from).expect("frames name known states").snapshot.clone();
        match s.perform_on(&source, &event, &observed, false) {
            Ok(true) => {}
            Ok(false) => {
                debug!("state {from}: {event} has no counterpart on the live screen");
                s.stats.skipped_events += 1;
                current = Some((from, observed));
                continue;
            }
            Err(Stop::Halt(t)) => break t,
            Err(Stop::Env(e)) => break Termination::Fault { message: e.to_string() },
        }

        let tree = s.observe();
        let activity = s.env.current_activity();
        let parent = model.state(from).expect("frames name known states");
        let meta = if activity == parent.activity {
            let mut ui_stack = parent.ui_stack.clone();
            ui_stack.push(TraceStep {
                state: from,
                event: event.clone(),
            });
            StateMeta {
                activity,
                intent: parent.intent.clone(),
                ui_stack,
            }
        } else {
            StateMeta {
                activity,
                intent: Some(s.env.current_intent()),
                ui_stack: Vec::new(),
            }
        };
        let (to, new) = model.add_state(tree.clone(), meta);
        model
            .add_transition(from, event, to)
            .expect("both ends of a performed transition are in the model");
        if new {
            run_hooks(hooks, to, &tree, config, &mut findings, &mut s.stats);
            stack.push(Frame {
                state: to,
                events: s.widgets(&tree),
                next: 0,
            });
        }
        current = Some((to, tree));
        coverage.record_sample(&model, s.started.elapsed(), s.stats.events_sent());
        publish(&model, &coverage);
    };

    coverage.record_sample(&model, s.started.elapsed(), s.stats.events_sent());
    publish(&model, &coverage);
    Ok(Exploration {
        model,
        coverage,
        findings,
        stats: s.stats,
        termination,
        wall: s.started.elapsed(),
    })
}

fn run_hooks(
    hooks: &mut [Box<dyn DetectorHook>],
    state: StateId,
    snapshot: &ViewNode,
    config: &EngineConfig,
    findings: &mut Vec<Finding>,
    stats: &mut ExploreStats,
) {
    for hook in hooks.iter_mut() {
        let started = Instant::now();
        let result = hook.operate(state, snapshot);
        stats.hook_calls += 1;
        let took = started.elapsed();
        if took > config.hook_timeout {
            warn!("hook {} took {took:?} on state {state}", hook.name());
        }
        if let Some(message) = result {
            let finding = Finding {
                hook: hook.name().to_string(),
                state,
                message,
            };
            hook.output(&finding);
            findings.push(finding);
        }
    }
}
