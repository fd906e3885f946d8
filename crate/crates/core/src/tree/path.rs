use std::fmt;

use serde::{Deserialize, Serialize};

/// A widget locator: child indices from the root, each index counted in
/// canonical (hash-sorted) child order rather than declaration order, so a
/// locator survives sibling reordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WidgetPath(Vec<usize>);

impl WidgetPath {
    pub fn new(indices: Vec<usize>) -> Self {
        WidgetPath(indices)
    }

    pub fn root() -> Self {
        WidgetPath(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: usize) -> Self {
        let mut v = self.0.clone();
        v.push(index);
        WidgetPath(v)
    }
}

impl From<Vec<usize>> for WidgetPath {
    fn from(v: Vec<usize>) -> Self {
        WidgetPath(v)
    }
}

impl fmt::Display for WidgetPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{idx}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displays_as_bracketed_list() {
        assert_eq!(WidgetPath::root().to_string(), "[]");
        assert_eq!(WidgetPath::new(vec![0, 12, 3]).to_string(), "[0,12,3]");
    }
}
