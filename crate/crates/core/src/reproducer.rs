//! Test-case generation toward a target state and tolerant replay.

use serde::{Deserialize, Serialize};

use crate::env::{EnvError, Environment};
use crate::explorer::EngineConfig;
use crate::model::{Action, PathLimits, StateId, StateModel, TestCase, UiEvent};
use crate::tree::{relocate, tree_hash, StructureHash, ViewNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ReachedExact,
    ReachedSimilar,
    Failed,
}

impl Outcome {
    pub fn is_success(self) -> bool {
        self != Outcome::Failed
    }
}

/// How strictly replay matches screens.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplayMode {
    /// Re-resolve widgets structurally and accept similar screens.
    #[default]
    Adaptive,
    /// Replay recorded paths verbatim and accept only exact hashes.
    ExactOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub expected: StateId,
    pub observed_hash: StructureHash,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureDetail {
    /// 1-based step number; 0 means the entry screen after restart.
    pub step: usize,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ViewNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<ViewNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceResult {
    pub target: StateId,
    pub outcome: Outcome,
    pub steps_executed: usize,
    pub per_step: Vec<StepRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_detail: Option<FailureDetail>,
    /// Events actually sent, after re-resolution.
    pub events: Vec<UiEvent>,
    /// Position of the executed test case in the generated list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_case: Option<usize>,
    pub test_cases_tried: usize,
}

impl ReproduceResult {
    fn unreachable(target: StateId, reason: &str) -> Self {
        ReproduceResult {
            target,
            outcome: Outcome::Failed,
            steps_executed: 0,
            per_step: Vec::new(),
            failure_detail: Some(FailureDetail {
                step: 0,
                reason: reason.to_string(),
                expected: None,
                observed: None,
            }),
            events: Vec::new(),
            test_case: None,
            test_cases_tried: 0,
        }
    }
}

/// Entry-to-`target` test cases, shortest first. Empty when `target` is not
/// reachable or not in the model.
pub fn generate_test_cases(model: &StateModel, target: StateId, max_paths: usize) -> Vec<TestCase> {
    if !model.contains(target) {
        return Vec::new();
    }
    model.enumerate_paths(target, PathLimits::paths(max_paths))
}

/// Replays test cases from a model against an environment.
#[derive(Debug, Clone)]
pub struct Reproducer<'m> {
    model: &'m StateModel,
    config: EngineConfig,
    mode: ReplayMode,
    max_paths: usize,
}

impl<'m> Reproducer<'m> {
    pub fn new(model: &'m StateModel, config: EngineConfig) -> Self {
        Reproducer {
            model,
            config,
            mode: ReplayMode::Adaptive,
            max_paths: crate::model::DEFAULT_MAX_PATHS,
        }
    }

    pub fn mode(mut self, mode: ReplayMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn max_paths(mut self, max_paths: usize) -> Self {
        self.max_paths = max_paths;
        self
    }

    pub fn test_cases(&self, target: StateId) -> Vec<TestCase> {
        generate_test_cases(self.model, target, self.max_paths)
    }

    fn settle<E: Environment>(&self, env: &mut E) -> ViewNode {
        let mut tree = env.observe();
        for _ in 0..self.config.stabilization_policy {
            let next = env.observe();
            let settled = tree_hash(&next) == tree_hash(&tree);
            tree = next;
            if settled {
                break;
            }
        }
        tree
    }

    /// How `observed` compares to `expected`: `Some(true)` exact,
    /// `Some(false)` similar enough, `None` a mismatch.
    fn judge(&self, expected: &ViewNode, observed: &ViewNode) -> (Option<bool>, f64) {
        if tree_hash(expected) == tree_hash(observed) {
            return (Some(true), 1.0);
        }
        let score = self.config.similarity(expected, observed);
        match self.mode {
            ReplayMode::Adaptive if score >= self.config.similarity_threshold => (Some(false), score),
            _ => (None, score),
        }
    }

    pub fn execute<E: Environment>(&self, env: &mut E, tc: &TestCase) -> ReproduceResult {
        let mut result = ReproduceResult {
            target: tc.target,
            outcome: Outcome::ReachedExact,
            steps_executed: 0,
            per_step: Vec::new(),
            failure_detail: None,
            events: Vec::new(),
            test_case: None,
            test_cases_tried: 1,
        };
        let fail = |result: &mut ReproduceResult, step: usize, reason: String, expected: &ViewNode, observed: &ViewNode| {
            result.outcome = Outcome::Failed;
            result.failure_detail = Some(FailureDetail {
                step,
                reason,
                expected: Some(expected.clone()),
                observed: Some(observed.clone()),
            });
        };
        let snapshot = |id: StateId| &self.model.state(id).expect("test cases name model states").snapshot;

        if let Err(e) = env.restart() {
            result.outcome = Outcome::Failed;
            result.failure_detail = Some(FailureDetail {
                step: 0,
                reason: format!("restart failed: {e}"),
                expected: None,
                observed: None,
            });
            return result;
        }
        let mut observed = self.settle(env);
        let entry = snapshot(StateId::ENTRY);
        match self.judge(entry, &observed) {
            (Some(true), _) => {}
            (Some(false), _) => result.outcome = Outcome::ReachedSimilar,
            (None, score) => {
                fail(&mut result, 0, format!("entry screen differs (similarity {score:.3})"), entry, &observed);
                return result;
            }
        }

        let mut at = StateId::ENTRY;
        for (i, step) in tc.steps.iter().enumerate() {
            let n = i + 1;
            let source = snapshot(at);
            let expected = snapshot(step.expected);
            let event = match self.mode {
                ReplayMode::ExactOnly => Some(step.event.clone()),
                _ if step.event.action == Action::GoBack || tree_hash(source) == tree_hash(&observed) => {
                    Some(step.event.clone())
                }
                ReplayMode::Adaptive => relocate(source, &step.event.path, &observed).map(|p| step.event.with_path(p)),
            };
            let performed = match event {
                Some(event) => {
                    let outcome = env.perform(&event);
                    result.events.push(event);
                    outcome
                }
                None => Err(EnvError::Unresolvable {
                    path: step.event.path.clone(),
                }),
            };
            if let Err(e) = performed {
                result.per_step.push(StepRecord {
                    expected: step.expected,
                    observed_hash: tree_hash(&observed),
                    similarity: self.config.similarity(expected, &observed),
                });
                result.steps_executed = n;
                fail(&mut result, n, format!("cannot perform {}: {e}", step.event), expected, &observed);
                return result;
            }
            observed = self.settle(env);
            let (verdict, score) = self.judge(expected, &observed);
            result.per_step.push(StepRecord {
                expected: step.expected,
                observed_hash: tree_hash(&observed),
                similarity: score,
            });
            result.steps_executed = n;
            match verdict {
                Some(true) => {}
                Some(false) => result.outcome = Outcome::ReachedSimilar,
                None => {
                    fail(
                        &mut result,
                        n,
                        format!("expected state {} (similarity {score:.3})", step.expected),
                        expected,
                        &observed,
                    );
                    return result;
                }
            }
            at = step.expected;
        }
        result
    }

    /// Runs generated test cases in order until one reaches `target`.
    /// Returns that success, or the last failure.
    pub fn reproduce<E: Environment>(&self, env: &mut E, target: StateId) -> ReproduceResult {
        if !self.model.contains(target) {
            return ReproduceResult::unreachable(target, &format!("unknown state {target}"));
        }
        let cases = self.test_cases(target);
        let mut last = ReproduceResult::unreachable(target, "unreachable");
        for (k, tc) in cases.iter().enumerate() {
            let mut result = self.execute(env, tc);
            result.test_case = Some(k);
            result.test_cases_tried = k + 1;
            if result.outcome.is_success() {
                return result;
            }
            last = result;
        }
        last
    }
}

pub fn execute_test_case<E: Environment>(
    env: &mut E,
    tc: &TestCase,
    model: &StateModel,
    config: &EngineConfig,
) -> ReproduceResult {
    Reproducer::new(model, config.clone()).execute(env, tc)
}

pub fn reproduce<E: Environment>(
    env: &mut E,
    model: &StateModel,
    target: StateId,
    config: &EngineConfig,
    max_paths: usize,
) -> ReproduceResult {
    Reproducer::new(model, config.clone())
        .max_paths(max_paths)
        .reproduce(env, target)
}
