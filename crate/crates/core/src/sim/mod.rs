//! Deterministic simulated apps.
//!
//! A [`SimAppSpec`] declares activities, screens (UI tree templates), widget
//! bindings and seeded noise rules; [`SimApp`] runs it behind the
//! [`Environment`](crate::env::Environment) contract.

mod app;
pub mod corpus;
mod spec;

pub use app::{SimApp, DECORATION_TAG};
pub use spec::{
    ActivitySpec, Binding, Effect, NoiseKind, NoiseRule, ScreenRef, ScreenSpec, SimAppSpec,
    SpecError,
};

/// Loads an app spec from `corpus:<name>` or a filesystem path.
pub fn load_app(source: &str) -> Result<SimAppSpec, SpecError> {
    if let Some(name) = source.strip_prefix("corpus:") {
        return corpus::load(name);
    }
    let bytes = std::fs::read(source).map_err(|e| SpecError::Io {
        path: source.to_string(),
        source: e,
    })?;
    SimAppSpec::from_json(&bytes)
}
