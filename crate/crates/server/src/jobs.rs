//! Reproduce jobs, executed one at a time on a dedicated worker thread that
//! owns its environment.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use uiwalk_core::env::Environment;
use uiwalk_core::explorer::EngineConfig;
use uiwalk_core::model::{StateId, StateModel};
use uiwalk_core::reproducer::{ReproduceResult, Reproducer};
use uiwalk_core::shared::SnapshotCell;

/// Executes reproductions for the job worker.
pub trait ReproduceRunner: Send + 'static {
    fn run(&mut self, model: &StateModel, target: StateId) -> ReproduceResult;
}

/// Runs every job on one environment instance.
pub struct EnvRunner<E> {
    env: E,
    config: EngineConfig,
    max_paths: usize,
}

impl<E: Environment + Send + 'static> EnvRunner<E> {
    pub fn new(env: E, config: EngineConfig, max_paths: usize) -> Self {
        EnvRunner {
            env,
            config,
            max_paths,
        }
    }
}

impl<E: Environment + Send + 'static> ReproduceRunner for EnvRunner<E> {
    fn run(&mut self, model: &StateModel, target: StateId) -> ReproduceResult {
        Reproducer::new(model, self.config.clone())
            .max_paths(self.max_paths)
            .reproduce(&mut self.env, target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Queued,
    Running,
    /// The runner produced a result; its outcome may still be `failed`.
    Done,
    /// The runner crashed before producing a result.
    Failed,
}

impl JobStatus {
    fn rank(self) -> u8 {
        match self {
            JobStatus::Queued => 0,
            JobStatus::Running => 1,
            JobStatus::Done | JobStatus::Failed => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceJob {
    pub job_id: String,
    pub target: StateId,
    pub status: JobStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<ReproduceResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Default)]
struct JobTable {
    next: u64,
    jobs: HashMap<String, ReproduceJob>,
}

/// In-memory job store plus the queue feeding the worker.
#[derive(Clone)]
pub struct JobQueue {
    table: Arc<Mutex<JobTable>>,
    tx: mpsc::Sender<String>,
}

impl JobQueue {
    /// Spawns the worker. It reads the model snapshot current when each job
    /// starts and exits once every queue handle is dropped.
    pub fn start(model: SnapshotCell<StateModel>, mut runner: impl ReproduceRunner) -> Self {
        let (tx, rx) = mpsc::channel::<String>();
        let table = Arc::new(Mutex::new(JobTable::default()));
        let queue = JobQueue {
            table: table.clone(),
            tx,
        };
        let worker = JobQueue {
            table,
            // The worker never submits; a dead sender keeps the channel
            // closable by the real handles alone.
            tx: mpsc::channel().0,
        };
        std::thread::Builder::new()
            .name("reproduce-worker".into())
            .spawn(move || {
                for id in rx {
                    let Some(target) = worker.get(&id).map(|j| j.target) else {
                        continue;
                    };
                    worker.advance(&id, JobStatus::Running, None, None);
                    let snapshot = model.read();
                    match catch_unwind(AssertUnwindSafe(|| runner.run(&snapshot, target))) {
                        Ok(result) => {
                            info!("job {id}: {:?}", result.outcome);
                            worker.advance(&id, JobStatus::Done, Some(result), None);
                        }
                        Err(panic) => {
                            let message = panic
                                .downcast_ref::<String>()
                                .cloned()
                                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                                .unwrap_or_else(|| "reproduction panicked".into());
                            warn!("job {id} crashed: {message}");
                            worker.advance(&id, JobStatus::Failed, None, Some(message));
                        }
                    }
                }
            })
            .expect("spawn reproduce worker");
        queue
    }

    pub fn submit(&self, target: StateId) -> String {
        let id = {
            let mut table = self.table.lock().expect("job table poisoned");
            table.next += 1;
            let id = format!("job-{}", table.next);
            table.jobs.insert(
                id.clone(),
                ReproduceJob {
                    job_id: id.clone(),
                    target,
                    status: JobStatus::Queued,
                    result: None,
                    error: None,
                },
            );
            id
        };
        if self.tx.send(id.clone()).is_err() {
            self.advance(&id, JobStatus::Failed, None, Some("reproduce worker is gone".into()));
        }
        id
    }

    pub fn get(&self, id: &str) -> Option<ReproduceJob> {
        self.table.lock().expect("job table poisoned").jobs.get(id).cloned()
    }

    /// Moves a job forward; backward transitions are ignored.
    fn advance(&self, id: &str, status: JobStatus, result: Option<ReproduceResult>, error: Option<String>) {
        let mut table = self.table.lock().expect("job table poisoned");
        if let Some(job) = table.jobs.get_mut(id) {
            if status.rank() > job.status.rank() {
                job.status = status;
                job.result = result;
                job.error = error;
            }
        }
    }
}
