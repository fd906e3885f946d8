use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tree::WidgetPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Tap,
    LongTap,
    Scroll,
    TypeText,
    GoBack,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Tap => "tap",
            Action::LongTap => "long_tap",
            Action::Scroll => "scroll",
            Action::TypeText => "type_text",
            Action::GoBack => "go_back",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An executable UI action against the widget at `path`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UiEvent {
    pub action: Action,
    pub path: WidgetPath,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

impl UiEvent {
    pub fn new(action: Action, path: impl Into<WidgetPath>) -> Self {
        UiEvent {
            action,
            path: path.into(),
            value: None,
        }
    }

    pub fn tap(path: impl Into<WidgetPath>) -> Self {
        Self::new(Action::Tap, path)
    }

    pub fn type_text(path: impl Into<WidgetPath>, text: impl Into<String>) -> Self {
        UiEvent {
            action: Action::TypeText,
            path: path.into(),
            value: Some(text.into()),
        }
    }

    pub fn go_back() -> Self {
        Self::new(Action::GoBack, WidgetPath::root())
    }

    pub fn with_path(&self, path: WidgetPath) -> Self {
        UiEvent {
            path,
            ..self.clone()
        }
    }

    /// `action@[path]`, with `="value"` appended when the event carries text.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for UiEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.action, self.path)?;
        if let Some(v) = &self.value {
            write!(f, "={v:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(UiEvent::tap(vec![0]).label(), "tap@[0]");
        assert_eq!(UiEvent::go_back().label(), "go_back@[]");
        assert_eq!(UiEvent::type_text(vec![1, 2], "test").label(), "type_text@[1,2]=\"test\"");
    }

    #[test]
    fn json_shape() {
        let e = UiEvent::tap(vec![0, 3]);
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"action":"tap","path":[0,3]}"#);
        let t: UiEvent = serde_json::from_str(r#"{"action":"type_text","path":[1],"value":"x"}"#).unwrap();
        assert_eq!(t, UiEvent::type_text(vec![1], "x"));
    }
}
