use uiwalk_core::explorer::{explore, EngineConfig, Exploration};
use uiwalk_core::model::{StateId, StateMeta, StateModel, UiEvent};
use uiwalk_core::reproducer::{
    execute_test_case, generate_test_cases, reproduce, Outcome, ReplayMode, ReproduceResult, Reproducer,
};
use uiwalk_core::sim::{corpus, NoiseKind, NoiseRule, SimApp, SimAppSpec};
use uiwalk_core::tree::ViewNode;

fn explored(name: &str) -> (SimAppSpec, Exploration) {
    let spec = corpus::load(name).unwrap();
    let ex = explore(&mut SimApp::new(spec.clone()), &EngineConfig::default(), &mut []).unwrap();
    (spec, ex)
}

fn decorated(spec: &SimAppSpec) -> SimAppSpec {
    spec.with_noise(vec![NoiseRule {
        kind: NoiseKind::InsertDecoration,
        probability: 1.0,
        target_path: vec![],
    }])
}

fn check_honest(r: &ReproduceResult) {
    assert_eq!(r.per_step.len(), r.steps_executed);
    if let Some(detail) = &r.failure_detail {
        if detail.step > 0 {
            assert_eq!(detail.step, r.steps_executed);
        }
    }
}

#[test]
fn entry_target_is_one_empty_case() {
    let (spec, ex) = explored("cycles");
    let cases = generate_test_cases(&ex.model, StateId::ENTRY, 64);
    assert_eq!(cases.len(), 1);
    assert!(cases[0].is_empty());
    let r = execute_test_case(&mut SimApp::new(spec), &cases[0], &ex.model, &EngineConfig::default());
    assert_eq!(r.outcome, Outcome::ReachedExact);
    assert_eq!(r.steps_executed, 0);
}

#[test]
fn diamond_yields_two_stable_cases() {
    let mut m = StateModel::new();
    for tag in ["A", "B", "C", "D"] {
        m.add_state(ViewNode::leaf(tag), StateMeta::default());
    }
    let e = |i: usize| UiEvent::tap(vec![i]);
    m.add_transition(StateId(0), e(0), StateId(2)).unwrap();
    m.add_transition(StateId(0), e(1), StateId(1)).unwrap();
    m.add_transition(StateId(1), e(0), StateId(3)).unwrap();
    m.add_transition(StateId(2), e(0), StateId(3)).unwrap();
    let cases = generate_test_cases(&m, StateId(3), 64);
    assert_eq!(cases.len(), 2);
    assert!(cases.iter().all(|c| c.len() == 2));
    assert_eq!(cases[0].states(), vec![StateId(0), StateId(1), StateId(3)]);
    assert_eq!(cases, generate_test_cases(&m, StateId(3), 64));
    assert_eq!(generate_test_cases(&m, StateId(3), 1), cases[..1].to_vec());
    assert!(generate_test_cases(&m, StateId(9), 64).is_empty());
}

#[test]
fn noiseless_apps_reproduce_every_state_exactly() {
    for spec in corpus::load_all().into_iter().filter(|s| s.is_hash_stable()) {
        let ex = explore(&mut SimApp::new(spec.clone()), &EngineConfig::default(), &mut []).unwrap();
        for s in ex.model.states() {
            let r = reproduce(&mut SimApp::new(spec.clone()), &ex.model, s.id, &EngineConfig::default(), 64);
            assert_eq!(r.outcome, Outcome::ReachedExact, "{} S{}: {:?}", spec.name, s.id, r.failure_detail);
            check_honest(&r);
        }
    }
}

#[test]
fn decoration_noise_is_tolerated_and_naive_replay_is_not() {
    let config = EngineConfig::default();
    let (spec, ex) = explored("newsreader");
    let noisy = decorated(&spec);
    let adaptive = Reproducer::new(&ex.model, config.clone());
    let naive = Reproducer::new(&ex.model, config).mode(ReplayMode::ExactOnly);
    let mut naive_failures = 0;
    for s in ex.model.states() {
        assert!(s.snapshot.subtree_count() >= 10);
        let r = adaptive.reproduce(&mut SimApp::new(noisy.clone()), s.id);
        assert!(r.outcome.is_success(), "S{}: {:?}", s.id, r.failure_detail);
        if s.id != StateId::ENTRY {
            assert_eq!(r.outcome, Outcome::ReachedSimilar);
        }
        check_honest(&r);
        let r = naive.reproduce(&mut SimApp::new(noisy.clone()), s.id);
        check_honest(&r);
        if r.outcome == Outcome::Failed {
            naive_failures += 1;
        }
    }
    assert_eq!(naive_failures, ex.model.len() - 1);
}

#[test]
fn wrong_app_fails_at_the_first_step() {
    let (_, ex) = explored("profile");
    let wrong = corpus::load("settings").unwrap();
    let cases = generate_test_cases(&ex.model, StateId(6), 1);
    let r = execute_test_case(&mut SimApp::new(wrong), &cases[0], &ex.model, &EngineConfig::default());
    assert_eq!(r.outcome, Outcome::Failed);
    // The entry screen already differs, so the failure is reported before
    // any event is sent.
    assert!(r.failure_detail.as_ref().unwrap().step <= 1);
    check_honest(&r);
}

#[test]
fn wrong_app_with_shared_entry_fails_at_step_one() {
    let (spec, ex) = explored("profile");
    // Same entry screen, but the first navigation goes nowhere.
    let mut doc: serde_json::Value = serde_json::from_str(&spec.to_json()).unwrap();
    doc["activities"][0]["screens"][0]["bindings"][0]["effect"] = "noop".into();
    let wrong = SimAppSpec::from_json(doc.to_string().as_bytes()).unwrap();
    let cases = generate_test_cases(&ex.model, StateId(6), 1);
    let r = execute_test_case(&mut SimApp::new(wrong), &cases[0], &ex.model, &EngineConfig::default());
    assert_eq!(r.outcome, Outcome::Failed);
    assert_eq!(r.failure_detail.as_ref().unwrap().step, 1);
    assert_eq!(r.steps_executed, 1);
    check_honest(&r);
}

#[test]
fn profile_state_six_by_shortest_path() {
    let (spec, ex) = explored("profile");
    let r = reproduce(&mut SimApp::new(spec), &ex.model, StateId(6), &EngineConfig::default(), 64);
    assert_eq!(r.outcome, Outcome::ReachedExact);
    assert_eq!(r.test_case, Some(0));
    assert_eq!(r.steps_executed, 3);
    assert_eq!(r.steps_executed, ex.model.shortest_path(StateId(6)).unwrap().len());
}

#[test]
fn unreachable_and_unknown_targets_fail() {
    let (spec, ex) = explored("cycles");
    let r = reproduce(&mut SimApp::new(spec.clone()), &ex.model, StateId(99), &EngineConfig::default(), 64);
    assert_eq!(r.outcome, Outcome::Failed);
    let mut m = ex.model.clone();
    let (orphan, _) = m.add_state(ViewNode::leaf("Orphan"), StateMeta::default());
    let r = reproduce(&mut SimApp::new(spec), &m, orphan, &EngineConfig::default(), 64);
    assert_eq!(r.outcome, Outcome::Failed);
    assert_eq!(r.failure_detail.unwrap().reason, "unreachable");
    assert_eq!(r.test_cases_tried, 0);
}

#[test]
fn flaky_shortcut_fails_and_second_case_succeeds() {
    let (spec, ex) = explored("flaky");
    let promo = ex
        .model
        .states()
        .iter()
        .find(|s| s.snapshot.tag() == "PromoPage")
        .unwrap()
        .id;
    let cases = generate_test_cases(&ex.model, promo, 64);
    assert_eq!(cases[0].len(), 1);
    assert!(cases.len() >= 2);
    let r = reproduce(&mut SimApp::new(spec), &ex.model, promo, &EngineConfig::default(), 64);
    assert_eq!(r.outcome, Outcome::ReachedExact);
    assert_eq!(r.test_case, Some(1));
    assert_eq!(r.test_cases_tried, 2);
    // Never longer than any case left untried.
    assert!(cases[2..].iter().all(|c| c.len() >= cases[1].len()));
}

#[test]
fn result_json_has_the_documented_shape() {
    let (spec, ex) = explored("profile");
    let r = reproduce(&mut SimApp::new(spec), &ex.model, StateId(6), &EngineConfig::default(), 64);
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["outcome"], "reached_exact");
    assert_eq!(v["steps_executed"], 3);
    assert_eq!(v["per_step"].as_array().unwrap().len(), 3);
    assert_eq!(v["per_step"][0]["observed_hash"].as_str().unwrap().len(), 16);
    assert!(v.get("failure_detail").is_none());
    let back: ReproduceResult = serde_json::from_value(v).unwrap();
    assert_eq!(back, r);
}
