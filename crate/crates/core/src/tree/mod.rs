//! Hierarchical UI trees.
//!
//! A [`ViewNode`] is one widget of a screen's view hierarchy. Trees carry
//! their own subtree node counts and lazily memoize their structure hash, so
//! every mutation goes through methods that keep both consistent.

mod hash;
mod locate;
mod markup;
mod path;
mod similarity;

use std::fmt;
use std::sync::OnceLock;

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use hash::{canonical_string, tree_hash, StructureHash};
pub use locate::relocate;
pub use markup::{parse_web_markup, MarkupError};
pub use path::WidgetPath;
pub use similarity::{
    similarity, similarity_with_cutoff, SimilarityScore, DEFAULT_MATCHING_CUTOFF,
};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("malformed markup in web container at {path}: {source}")]
    Markup {
        path: WidgetPath,
        #[source]
        source: MarkupError,
    },
    #[error("node at {path} carries markup but is not a web_container")]
    MarkupOnPlainNode { path: WidgetPath },
    #[error("web_container at {path} has no markup")]
    MissingMarkup { path: WidgetPath },
    #[error("web_container at {path} declares children; its children come from markup")]
    WebContainerChildren { path: WidgetPath },
    #[error("cannot edit the children of web_container `{tag}` directly")]
    WebContainerEdit { tag: String },
    #[error("invalid tree document: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    #[default]
    Plain,
    /// Rows with identical structure count once when hashing.
    ListContainer,
    /// Children are derived from embedded markup.
    WebContainer,
}

/// A node of a UI tree.
#[derive(Clone)]
pub struct ViewNode {
    tag: String,
    kind: NodeKind,
    children: Vec<ViewNode>,
    markup: Option<String>,
    subtree_count: usize,
    cached_hash: OnceLock<StructureHash>,
}

impl ViewNode {
    pub fn leaf(tag: impl Into<String>) -> Self {
        Self::assemble(tag.into(), NodeKind::Plain, Vec::new(), None)
    }

    pub fn new(tag: impl Into<String>, children: Vec<ViewNode>) -> Self {
        Self::assemble(tag.into(), NodeKind::Plain, children, None)
    }

    pub fn list(tag: impl Into<String>, rows: Vec<ViewNode>) -> Self {
        Self::assemble(tag.into(), NodeKind::ListContainer, rows, None)
    }

    /// Builds a web container, expanding `markup` into child nodes.
    pub fn web(tag: impl Into<String>, markup: impl Into<String>) -> Result<Self, TreeError> {
        let markup = markup.into();
        let children = parse_web_markup(&markup).map_err(|source| TreeError::Markup {
            path: WidgetPath::root(),
            source,
        })?;
        Ok(Self::assemble(
            tag.into(),
            NodeKind::WebContainer,
            children,
            Some(markup),
        ))
    }

    fn assemble(
        tag: String,
        kind: NodeKind,
        children: Vec<ViewNode>,
        markup: Option<String>,
    ) -> Self {
        let subtree_count = 1 + children.iter().map(|c| c.subtree_count).sum::<usize>();
        ViewNode {
            tag,
            kind,
            children,
            markup,
            subtree_count,
            cached_hash: OnceLock::new(),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    /// Children in declaration order. For web containers these are the
    /// elements parsed from the markup.
    pub fn children(&self) -> &[ViewNode] {
        &self.children
    }

    pub fn markup(&self) -> Option<&str> {
        self.markup.as_deref()
    }

    pub fn subtree_count(&self) -> usize {
        self.subtree_count
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// The memoized structure hash, if it has been computed.
    pub fn cached_hash(&self) -> Option<StructureHash> {
        self.cached_hash.get().copied()
    }

    pub fn structure_hash(&self) -> StructureHash {
        tree_hash(self)
    }

    pub(crate) fn hash_cell(&self) -> &OnceLock<StructureHash> {
        &self.cached_hash
    }

    fn refresh(&mut self) {
        self.cached_hash = OnceLock::new();
        self.subtree_count = 1 + self.children.iter().map(|c| c.subtree_count).sum::<usize>();
    }

    pub fn set_tag(&mut self, tag: impl Into<String>) {
        self.tag = tag.into();
        self.refresh();
    }

    /// Replaces the embedded markup of a web container and re-expands it.
    pub fn set_markup(&mut self, markup: impl Into<String>) -> Result<(), TreeError> {
        if self.kind != NodeKind::WebContainer {
            return Err(TreeError::MarkupOnPlainNode {
                path: WidgetPath::root(),
            });
        }
        let markup = markup.into();
        self.children = parse_web_markup(&markup).map_err(|source| TreeError::Markup {
            path: WidgetPath::root(),
            source,
        })?;
        self.markup = Some(markup);
        self.refresh();
        Ok(())
    }

    /// Runs `edit` on the child list, then restores the count and hash
    /// invariants. Web containers reject direct edits.
    pub fn edit_children<R>(
        &mut self,
        edit: impl FnOnce(&mut Vec<ViewNode>) -> R,
    ) -> Result<R, TreeError> {
        if self.kind == NodeKind::WebContainer {
            return Err(TreeError::WebContainerEdit {
                tag: self.tag.clone(),
            });
        }
        let out = edit(&mut self.children);
        self.refresh();
        Ok(out)
    }

    pub fn push_child(&mut self, child: ViewNode) -> Result<(), TreeError> {
        self.edit_children(|c| c.push(child))
    }

    /// Applies `edit` to the node at a raw (declaration-order) path. Every
    /// ancestor on the way is invalidated and recounted afterwards.
    pub fn edit_at<R>(&mut self, raw_path: &[usize], edit: impl FnOnce(&mut ViewNode) -> R) -> Option<R> {
        match raw_path.split_first() {
            None => {
                let out = edit(self);
                Some(out)
            }
            Some((&first, rest)) => {
                let out = self.children.get_mut(first)?.edit_at(rest, edit);
                if out.is_some() {
                    self.refresh();
                }
                out
            }
        }
    }

    pub fn node_at_raw(&self, raw_path: &[usize]) -> Option<&ViewNode> {
        raw_path
            .iter()
            .try_fold(self, |node, &i| node.children.get(i))
    }

    /// Raw child indices sorted by child structure hash. Ties keep
    /// declaration order.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.children.len()).collect();
        order.sort_by_key(|&i| tree_hash(&self.children[i]));
        order
    }

    /// Resolves a canonical widget path to the node it names.
    pub fn resolve(&self, path: &WidgetPath) -> Option<&ViewNode> {
        let raw = self.canonical_to_raw(path)?;
        self.node_at_raw(&raw)
    }

    pub fn canonical_to_raw(&self, path: &WidgetPath) -> Option<Vec<usize>> {
        let mut node = self;
        let mut raw = Vec::with_capacity(path.len());
        for &ci in path.indices() {
            let ri = *node.canonical_order().get(ci)?;
            raw.push(ri);
            node = &node.children[ri];
        }
        Some(raw)
    }

    pub fn raw_to_canonical(&self, raw_path: &[usize]) -> Option<WidgetPath> {
        let mut node = self;
        let mut canonical = Vec::with_capacity(raw_path.len());
        for &ri in raw_path {
            node.children.get(ri)?;
            let ci = node.canonical_order().iter().position(|&r| r == ri)?;
            canonical.push(ci);
            node = &node.children[ri];
        }
        Some(WidgetPath::new(canonical))
    }

    /// Pre-order traversal in canonical child order, yielding each node with
    /// its canonical path.
    pub fn walk_canonical<'a>(&'a self, visit: &mut impl FnMut(&WidgetPath, &'a ViewNode)) {
        fn go<'a>(
            node: &'a ViewNode,
            path: &mut Vec<usize>,
            visit: &mut impl FnMut(&WidgetPath, &'a ViewNode),
        ) {
            visit(&WidgetPath::new(path.clone()), node);
            for (ci, ri) in node.canonical_order().into_iter().enumerate() {
                path.push(ci);
                go(&node.children[ri], path, visit);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), visit);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("view trees always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("view trees always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, TreeError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Indented tag outline, one node per line.
    pub fn outline(&self) -> String {
        let mut out = String::new();
        fn go(node: &ViewNode, depth: usize, out: &mut String) {
            for _ in 0..depth {
                out.push_str("  ");
            }
            out.push_str(&node.tag);
            match node.kind {
                NodeKind::ListContainer => out.push_str(" [list]"),
                NodeKind::WebContainer => out.push_str(" [web]"),
                NodeKind::Plain => {}
            }
            out.push('\n');
            for c in &node.children {
                go(c, depth + 1, out);
            }
        }
        go(self, 0, &mut out);
        out
    }
}

impl PartialEq for ViewNode {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag
            && self.kind == other.kind
            && self.markup == other.markup
            && self.children == other.children
    }
}

impl Eq for ViewNode {}

impl fmt::Debug for ViewNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("ViewNode");
        s.field("tag", &self.tag);
        if self.kind != NodeKind::Plain {
            s.field("kind", &self.kind);
        }
        if let Some(m) = &self.markup {
            s.field("markup", m);
        }
        if !self.children.is_empty() {
            s.field("children", &self.children);
        }
        s.finish()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRepr {
    tag: String,
    #[serde(default)]
    kind: NodeKind,
    #[serde(default)]
    children: Vec<NodeRepr>,
    #[serde(default)]
    markup: Option<String>,
}

impl NodeRepr {
    fn build(self, path: &mut Vec<usize>) -> Result<ViewNode, TreeError> {
        let here = || WidgetPath::new(path.clone());
        match (self.kind, self.markup) {
            (NodeKind::WebContainer, None) => Err(TreeError::MissingMarkup { path: here() }),
            (NodeKind::WebContainer, Some(_)) if !self.children.is_empty() => {
                Err(TreeError::WebContainerChildren { path: here() })
            }
            (NodeKind::WebContainer, Some(markup)) => {
                let children = parse_web_markup(&markup)
                    .map_err(|source| TreeError::Markup { path: here(), source })?;
                Ok(ViewNode::assemble(self.tag, self.kind, children, Some(markup)))
            }
            (_, Some(_)) => Err(TreeError::MarkupOnPlainNode { path: here() }),
            (kind, None) => {
                let mut children = Vec::with_capacity(self.children.len());
                for (i, child) in self.children.into_iter().enumerate() {
                    path.push(i);
                    children.push(child.build(path)?);
                    path.pop();
                }
                Ok(ViewNode::assemble(self.tag, kind, children, None))
            }
        }
    }
}

impl<'de> Deserialize<'de> for ViewNode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        NodeRepr::deserialize(deserializer)?
            .build(&mut Vec::new())
            .map_err(D::Error::custom)
    }
}

impl Serialize for ViewNode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let web = self.kind == NodeKind::WebContainer;
        let mut s = serializer.serialize_struct("ViewNode", if web { 4 } else { 3 })?;
        s.serialize_field("tag", &self.tag)?;
        s.serialize_field("kind", &self.kind)?;
        let children: &[ViewNode] = if web { &[] } else { &self.children };
        s.serialize_field("children", children)?;
        if let Some(m) = &self.markup {
            s.serialize_field("markup", m)?;
        }
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ViewNode {
        ViewNode::new(
            "Root",
            vec![
                ViewNode::leaf("Title"),
                ViewNode::list("List", vec![ViewNode::leaf("Row"), ViewNode::leaf("Row")]),
                ViewNode::web("Web", "<div><p/></div>").unwrap(),
            ],
        )
    }

    #[test]
    fn subtree_counts_include_markup_children() {
        let t = sample();
        assert_eq!(t.subtree_count(), 1 + 1 + 3 + 3);
        assert_eq!(t.children()[2].subtree_count(), 3);
    }

    #[test]
    fn json_round_trip_keeps_structure_and_hash() {
        let t = sample();
        let back = ViewNode::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert_eq!(tree_hash(&back), tree_hash(&t));
    }

    #[test]
    fn web_container_serializes_markup_not_children() {
        let w = ViewNode::web("Web", "<a/>").unwrap();
        assert_eq!(
            w.to_json(),
            r#"{"tag":"Web","kind":"web_container","children":[],"markup":"<a/>"}"#
        );
    }

    #[test]
    fn markup_iff_web_container() {
        let err = ViewNode::from_json(r#"{"tag":"X","markup":"<a/>"}"#).unwrap_err();
        assert!(err.to_string().contains("not a web_container"), "{err}");
        let err = ViewNode::from_json(r#"{"tag":"X","kind":"web_container"}"#).unwrap_err();
        assert!(err.to_string().contains("no markup"), "{err}");
    }

    #[test]
    fn malformed_markup_error_names_the_node() {
        let doc = r#"{"tag":"R","children":[{"tag":"A"},{"tag":"W","kind":"web_container","markup":"<a><b></a></b>"}]}"#;
        let err = ViewNode::from_json(doc).unwrap_err().to_string();
        assert!(err.contains("[1]"), "{err}");
    }

    #[test]
    fn edits_invalidate_cached_hash_up_the_path() {
        let mut t = sample();
        let before = tree_hash(&t);
        assert_eq!(t.cached_hash(), Some(before));
        t.edit_at(&[1], |list| list.push_child(ViewNode::leaf("Footer")).unwrap())
            .unwrap();
        assert_eq!(t.cached_hash(), None);
        assert_eq!(t.subtree_count(), 9);
        let fresh = ViewNode::from_json(&t.to_json()).unwrap();
        assert_eq!(tree_hash(&t), tree_hash(&fresh));
        assert_ne!(tree_hash(&t), before);
    }

    #[test]
    fn web_children_cannot_be_edited_directly() {
        let mut w = ViewNode::web("Web", "<a/>").unwrap();
        assert!(w.push_child(ViewNode::leaf("x")).is_err());
        w.set_markup("<a/><b/>").unwrap();
        assert_eq!(w.children().len(), 2);
    }

    #[test]
    fn canonical_paths_round_trip() {
        let t = sample();
        t.walk_canonical(&mut |path, node| {
            let raw = t.canonical_to_raw(path).unwrap();
            assert_eq!(t.raw_to_canonical(&raw).as_ref(), Some(path));
            assert_eq!(t.resolve(path), Some(node));
        });
        assert!(t.resolve(&WidgetPath::new(vec![7])).is_none());
    }

    #[test]
    fn outline_lists_every_node() {
        assert_eq!(sample().outline().lines().count(), 8);
    }
}
