use uiwalk_core::batch::{
    all_states, explore_apps, explore_apps_sequential, reproduce_targets, reproduce_targets_sequential,
};
use uiwalk_core::explorer::EngineConfig;
use uiwalk_core::reproducer::{Outcome, ReplayMode};
use uiwalk_core::sim::{corpus, SimApp};

#[test]
fn batch_exploration_matches_one_by_one() {
    let specs = corpus::load_all();
    let config = EngineConfig::default();
    let a = explore_apps(&specs, &config);
    let b = explore_apps_sequential(&specs, &config);
    assert_eq!(a.len(), specs.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.model.to_json(), y.model.to_json());
    }
}

#[test]
fn batch_reproduction_matches_one_by_one() {
    let spec = corpus::load("social").unwrap();
    let config = EngineConfig::default();
    let model = explore_apps(std::slice::from_ref(&spec), &config).remove(0).model;
    let targets = all_states(&model);
    let make = || SimApp::new(spec.clone());
    let a = reproduce_targets(make, &model, &targets, &config, ReplayMode::Adaptive);
    let b = reproduce_targets_sequential(make, &model, &targets, &config, ReplayMode::Adaptive);
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.outcome == Outcome::ReachedExact));
}
