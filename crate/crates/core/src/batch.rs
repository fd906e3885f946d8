//! Independent engine runs fanned out over apps or target states.
//!
//! Each job owns its own environment, so jobs never share mutable state. With
//! the `parallel` feature (on by default) the default entry points use rayon;
//! without it they run one job after another. Both variants are always
//! available by name so they can be compared.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::env::Environment;
use crate::explorer::{explore, EngineConfig, Exploration};
use crate::model::{StateId, StateModel};
use crate::reproducer::{ReplayMode, ReproduceResult, Reproducer};
use crate::sim::{SimApp, SimAppSpec};

fn explore_one(spec: &SimAppSpec, config: &EngineConfig) -> Exploration {
    let mut app = SimApp::new(spec.clone());
    explore(&mut app, config, &mut []).expect("caller validated the config")
}

pub fn explore_apps_sequential(specs: &[SimAppSpec], config: &EngineConfig) -> Vec<Exploration> {
    specs.iter().map(|s| explore_one(s, config)).collect()
}

#[cfg(feature = "parallel")]
pub fn explore_apps_parallel(specs: &[SimAppSpec], config: &EngineConfig) -> Vec<Exploration> {
    specs.par_iter().map(|s| explore_one(s, config)).collect()
}

/// Explores every app on a fresh simulator, results in input order.
///
/// # Panics
/// If `config` is invalid.
pub fn explore_apps(specs: &[SimAppSpec], config: &EngineConfig) -> Vec<Exploration> {
    config.validate().expect("invalid engine config");
    #[cfg(feature = "parallel")]
    return explore_apps_parallel(specs, config);
    #[cfg(not(feature = "parallel"))]
    return explore_apps_sequential(specs, config);
}

fn reproduce_one<E: Environment>(
    make_env: &(impl Fn() -> E + Sync),
    reproducer: &Reproducer<'_>,
    target: StateId,
) -> ReproduceResult {
    let mut env = make_env();
    reproducer.reproduce(&mut env, target)
}

pub fn reproduce_targets_sequential<E: Environment>(
    make_env: impl Fn() -> E + Sync,
    model: &StateModel,
    targets: &[StateId],
    config: &EngineConfig,
    mode: ReplayMode,
) -> Vec<ReproduceResult> {
    let reproducer = Reproducer::new(model, config.clone()).mode(mode);
    targets
        .iter()
        .map(|&t| reproduce_one(&make_env, &reproducer, t))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn reproduce_targets_parallel<E: Environment>(
    make_env: impl Fn() -> E + Sync,
    model: &StateModel,
    targets: &[StateId],
    config: &EngineConfig,
    mode: ReplayMode,
) -> Vec<ReproduceResult> {
    let reproducer = Reproducer::new(model, config.clone()).mode(mode);
    targets
        .par_iter()
        .map(|&t| reproduce_one(&make_env, &reproducer, t))
        .collect()
}

/// Reproduces each target on its own environment from `make_env`, results
/// in input order.
pub fn reproduce_targets<E: Environment>(
    make_env: impl Fn() -> E + Sync,
    model: &StateModel,
    targets: &[StateId],
    config: &EngineConfig,
    mode: ReplayMode,
) -> Vec<ReproduceResult> {
    #[cfg(feature = "parallel")]
    return reproduce_targets_parallel(make_env, model, targets, config, mode);
    #[cfg(not(feature = "parallel"))]
    return reproduce_targets_sequential(make_env, model, targets, config, mode);
}

/// Every state of the model, in id order.
pub fn all_states(model: &StateModel) -> Vec<StateId> {
    model.states().iter().map(|s| s.id).collect()
}
