//! The contract between the engine and an app environment.

use thiserror::Error;

use crate::model::{IntentRecord, UiEvent};
use crate::tree::{ViewNode, WidgetPath};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    /// The locator does not name a widget on the current screen.
    #[error("no widget at {path} on the current screen")]
    Unresolvable { path: WidgetPath },
    #[error("unknown intent token `{0}`")]
    UnknownIntent(String),
    #[error("environment fault: {0}")]
    Fault(String),
}

/// An app under test.
///
/// `observe` is stable: with no intervening command, consecutive calls return
/// hash-equal trees. Events returned by `actionable_widgets` never fault the
/// environment when performed, though they may do nothing.
pub trait Environment {
    fn observe(&mut self) -> ViewNode;

    fn current_activity(&self) -> String;

    /// The intent that relaunches the current activity, as recorded by the
    /// runtime when the activity was entered.
    fn current_intent(&self) -> IntentRecord;

    /// Executable events for `tree`, in canonical depth-first order.
    fn actionable_widgets(&self, tree: &ViewNode) -> Vec<UiEvent>;

    fn perform(&mut self, event: &UiEvent) -> Result<(), EnvError>;

    fn send_intent(&mut self, record: &IntentRecord) -> Result<(), EnvError>;

    /// Relaunch the app at its entry screen.
    fn restart(&mut self) -> Result<(), EnvError>;
}

impl<E: Environment + ?Sized> Environment for &mut E {
    fn observe(&mut self) -> ViewNode {
        (**self).observe()
    }
    fn current_activity(&self) -> String {
        (**self).current_activity()
    }
    fn current_intent(&self) -> IntentRecord {
        (**self).current_intent()
    }
    fn actionable_widgets(&self, tree: &ViewNode) -> Vec<UiEvent> {
        (**self).actionable_widgets(tree)
    }
    fn perform(&mut self, event: &UiEvent) -> Result<(), EnvError> {
        (**self).perform(event)
    }
    fn send_intent(&mut self, record: &IntentRecord) -> Result<(), EnvError> {
        (**self).send_intent(record)
    }
    fn restart(&mut self) -> Result<(), EnvError> {
        (**self).restart()
    }
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn observe(&mut self) -> ViewNode {
        (**self).observe()
    }
    fn current_activity(&self) -> String {
        (**self).current_activity()
    }
    fn current_intent(&self) -> IntentRecord {
        (**self).current_intent()
    }
    fn actionable_widgets(&self, tree: &ViewNode) -> Vec<UiEvent> {
        (**self).actionable_widgets(tree)
    }
    fn perform(&mut self, event: &UiEvent) -> Result<(), EnvError> {
        (**self).perform(event)
    }
    fn send_intent(&mut self, record: &IntentRecord) -> Result<(), EnvError> {
        (**self).send_intent(record)
    }
    fn restart(&mut self) -> Result<(), EnvError> {
        (**self).restart()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnvCounters {
    pub observes: usize,
    pub performs: usize,
    pub intents: usize,
    pub restarts: usize,
}

impl EnvCounters {
    /// Commands that change the environment (everything except observation).
    pub fn commands(&self) -> usize {
        self.performs + self.intents + self.restarts
    }
}

/// Counts every call forwarded to the wrapped environment.
#[derive(Debug)]
pub struct Instrumented<E> {
    inner: E,
    counters: EnvCounters,
}

impl<E: Environment> Instrumented<E> {
    pub fn new(inner: E) -> Self {
        Instrumented {
            inner,
            counters: EnvCounters::default(),
        }
    }

    pub fn counters(&self) -> EnvCounters {
        self.counters
    }

    pub fn reset_counters(&mut self) {
        self.counters = EnvCounters::default();
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn into_inner(self) -> E {
        self.inner
    }
}

impl<E: Environment> Environment for Instrumented<E> {
    fn observe(&mut self) -> ViewNode {
        self.counters.observes += 1;
        self.inner.observe()
    }
    fn current_activity(&self) -> String {
        self.inner.current_activity()
    }
    fn current_intent(&self) -> IntentRecord {
        self.inner.current_intent()
    }
    fn actionable_widgets(&self, tree: &ViewNode) -> Vec<UiEvent> {
        self.inner.actionable_widgets(tree)
    }
    fn perform(&mut self, event: &UiEvent) -> Result<(), EnvError> {
        self.counters.performs += 1;
        self.inner.perform(event)
    }
    fn send_intent(&mut self, record: &IntentRecord) -> Result<(), EnvError> {
        self.counters.intents += 1;
        self.inner.send_intent(record)
    }
    fn restart(&mut self) -> Result<(), EnvError> {
        self.counters.restarts += 1;
        self.inner.restart()
    }
}
