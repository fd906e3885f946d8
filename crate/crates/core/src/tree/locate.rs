//! Carrying a widget locator from one tree to a structurally close one.
//!
//! Replay records widget paths against the snapshot seen during exploration.
//! When the live screen differs (a banner appeared, a row was added), the raw
//! canonical indices may point somewhere else, so the widget is found again by
//! structure: descend level by level, matching each step's child by subtree
//! hash and its ordinal among equal-hash siblings, else by tag and ordinal
//! among same-tag siblings. If the descent breaks, look the widget up anywhere
//! in the observed tree by `(tag, hash)` occurrence.

use super::{tree_hash, NodeKind, ViewNode, WidgetPath};

/// Maps `path` (valid in `expected`) to the corresponding widget in
/// `observed`. Returns `None` when no structural counterpart exists.
pub fn relocate(expected: &ViewNode, path: &WidgetPath, observed: &ViewNode) -> Option<WidgetPath> {
    let target = expected.resolve(path)?;
    if tree_hash(expected) == tree_hash(observed) && observed.resolve(path).is_some() {
        return Some(path.clone());
    }
    if expected.tag() != observed.tag() {
        return None;
    }
    descend(expected, path, observed).or_else(|| lookup(expected, target, observed))
}

fn descend(expected: &ViewNode, path: &WidgetPath, observed: &ViewNode) -> Option<WidgetPath> {
    let mut e = expected;
    let mut o = observed;
    let mut out = Vec::with_capacity(path.len());
    for &ci in path.indices() {
        let e_order = e.canonical_order();
        let o_order = o.canonical_order();
        let pick = counterpart(e, &e_order, ci, o, &o_order)?;
        out.push(pick);
        e = &e.children()[e_order[ci]];
        o = &o.children()[o_order[pick]];
    }
    Some(WidgetPath::new(out))
}

/// Canonical index in `o` of the child matching `e`'s canonical child `ci`.
fn counterpart(
    e: &ViewNode,
    e_order: &[usize],
    ci: usize,
    o: &ViewNode,
    o_order: &[usize],
) -> Option<usize> {
    let target = &e.children()[*e_order.get(ci)?];
    let hash = tree_hash(target);
    let ordinal = e_order[..ci]
        .iter()
        .filter(|&&r| tree_hash(&e.children()[r]) == hash)
        .count();
    let same_hash: Vec<usize> = o_order
        .iter()
        .enumerate()
        .filter(|(_, &r)| tree_hash(&o.children()[r]) == hash)
        .map(|(c, _)| c)
        .collect();
    if let Some(&c) = same_hash.get(ordinal) {
        return Some(c);
    }
    // List rows are interchangeable, and row multiplicity is not structure.
    if o.kind() == NodeKind::ListContainer {
        if let Some(&c) = same_hash.last() {
            return Some(c);
        }
    }
    let tag = target.tag();
    let ordinal = e_order[..ci]
        .iter()
        .filter(|&&r| e.children()[r].tag() == tag)
        .count();
    o_order
        .iter()
        .enumerate()
        .filter(|(_, &r)| o.children()[r].tag() == tag)
        .map(|(c, _)| c)
        .nth(ordinal)
}

fn lookup(expected: &ViewNode, target: &ViewNode, observed: &ViewNode) -> Option<WidgetPath> {
    let hash = tree_hash(target);
    let matches = |n: &ViewNode| n.tag() == target.tag() && tree_hash(n) == hash;
    let mut ordinal = None;
    let mut seen = 0;
    expected.walk_canonical(&mut |_, n| {
        if ordinal.is_none() && matches(n) {
            if std::ptr::eq(n, target) {
                ordinal = Some(seen);
            }
            seen += 1;
        }
    });
    let ordinal = ordinal?;
    let mut found = Vec::new();
    observed.walk_canonical(&mut |p, n| {
        if matches(n) {
            found.push(p.clone());
        }
    });
    found.into_iter().nth(ordinal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn screen(extra: Option<ViewNode>) -> ViewNode {
        let mut kids = vec![
            ViewNode::new("Toolbar", vec![ViewNode::leaf("TextView")]),
            ViewNode::new("Bar", vec![ViewNode::leaf("Button"), ViewNode::leaf("Button")]),
            ViewNode::leaf("TextView"),
        ];
        kids.extend(extra);
        ViewNode::new("Page", kids)
    }

    fn tags_along(tree: &ViewNode, path: &WidgetPath) -> Vec<String> {
        let raw = tree.canonical_to_raw(path).unwrap();
        (0..=raw.len())
            .map(|k| tree.node_at_raw(&raw[..k]).unwrap().tag().to_string())
            .collect()
    }

    #[test]
    fn identical_trees_keep_the_path() {
        let t = screen(None);
        let p = WidgetPath::new(vec![1, 0]);
        assert_eq!(relocate(&t, &p, &t), Some(p));
    }

    #[test]
    fn banner_at_root_is_skipped() {
        let clean = screen(None);
        let noisy = screen(Some(ViewNode::leaf("NotificationBanner")));
        let mut every = Vec::new();
        clean.walk_canonical(&mut |p, _| every.push(p.clone()));
        for p in every {
            let q = relocate(&clean, &p, &noisy).unwrap();
            assert_eq!(tags_along(&clean, &p), tags_along(&noisy, &q), "{p}");
        }
    }

    #[test]
    fn second_of_twin_buttons_stays_second() {
        let clean = screen(None);
        let mut bar_path = None;
        clean.walk_canonical(&mut |p, n| {
            if n.tag() == "Bar" {
                bar_path = Some(p.clone());
            }
        });
        let second = bar_path.unwrap().child(1);
        let mut noisy_bar = ViewNode::new("Bar", vec![ViewNode::leaf("Button"), ViewNode::leaf("Button")]);
        noisy_bar.push_child(ViewNode::leaf("NotificationBanner")).unwrap();
        let noisy = ViewNode::new(
            "Page",
            vec![
                ViewNode::new("Toolbar", vec![ViewNode::leaf("TextView")]),
                noisy_bar,
                ViewNode::leaf("TextView"),
            ],
        );
        let q = relocate(&clean, &second, &noisy).unwrap();
        assert_eq!(noisy.resolve(&q).unwrap().tag(), "Button");
        // Falls back by tag at the Bar level, then by hash among the twins.
        assert_eq!(q.indices()[1..], second.indices()[1..]);
    }

    #[test]
    fn different_screen_has_no_counterpart() {
        let clean = screen(None);
        let other = ViewNode::new("Other", vec![ViewNode::leaf("Button")]);
        assert_eq!(relocate(&clean, &WidgetPath::new(vec![0]), &other), None);
        assert_eq!(relocate(&clean, &WidgetPath::new(vec![9]), &clean), None);
    }

    #[test]
    fn collapsed_list_rows_map_to_a_row() {
        let row = || ViewNode::new("Row", vec![ViewNode::leaf("TextView")]);
        let four = ViewNode::new("Page", vec![ViewNode::list("List", vec![row(), row(), row(), row()]), ViewNode::leaf("A")]);
        let two = ViewNode::new(
            "Page",
            vec![ViewNode::list("List", vec![row(), row()]), ViewNode::leaf("A"), ViewNode::leaf("B")],
        );
        let mut list_path = None;
        four.walk_canonical(&mut |p, n| {
            if n.tag() == "List" {
                list_path = Some(p.clone());
            }
        });
        let q = relocate(&four, &list_path.unwrap().child(3), &two).unwrap();
        assert_eq!(two.resolve(&q).unwrap().tag(), "Row");
    }
}
