//! Simulated apps bundled with the crate. Regenerate with
//! `corpus/generate.py`.

use super::spec::{SimAppSpec, SpecError};

const APPS: &[(&str, &str)] = &[
    ("cycles", include_str!("../../corpus/cycles.json")),
    ("deep", include_str!("../../corpus/deep.json")),
    ("flaky", include_str!("../../corpus/flaky.json")),
    ("hostile", include_str!("../../corpus/hostile.json")),
    ("newsreader", include_str!("../../corpus/newsreader.json")),
    ("profile", include_str!("../../corpus/profile.json")),
    ("settings", include_str!("../../corpus/settings.json")),
    ("shop", include_str!("../../corpus/shop.json")),
    ("social", include_str!("../../corpus/social.json")),
    ("webmail", include_str!("../../corpus/webmail.json")),
];

/// Names of the bundled apps, sorted.
pub fn names() -> impl Iterator<Item = &'static str> {
    APPS.iter().map(|(name, _)| *name)
}

/// The raw JSON document of a bundled app.
pub fn source(name: &str) -> Option<&'static str> {
    APPS.iter().find(|(n, _)| *n == name).map(|(_, doc)| *doc)
}

pub fn load(name: &str) -> Result<SimAppSpec, SpecError> {
    let doc = source(name).ok_or_else(|| SpecError::UnknownCorpusApp(name.to_string()))?;
    SimAppSpec::from_json(doc.as_bytes())
}

pub fn load_all() -> Vec<SimAppSpec> {
    names()
        .map(|n| load(n).expect("bundled apps are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::tree::tree_hash;

    #[test]
    fn every_bundled_app_is_valid_and_named_after_its_file() {
        for name in names() {
            let spec = load(name).unwrap();
            assert_eq!(spec.name, name);
        }
        assert!(names().count() >= 10);
    }

    #[test]
    fn screens_are_structurally_distinct() {
        for spec in load_all() {
            let mut hashes = BTreeSet::new();
            for a in &spec.activities {
                for s in &a.screens {
                    assert!(hashes.insert(tree_hash(&s.tree)), "{}: {}", spec.name, s.id);
                }
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(load("nope"), Err(SpecError::UnknownCorpusApp(_))));
    }
}
