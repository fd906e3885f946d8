//! Tolerance-based structural similarity between two UI trees.
//!
//! The score is a Dice-style ratio `2 * hits / (|s| + |t|)`. Equal structure
//! hashes short-circuit to 1 and differing root tags to 0. Otherwise `hits`
//! starts at 1 for the matched roots, and each child of `s` is greedily paired
//! with the first unconsumed child of `t` whose recursive score exceeds the
//! matching cutoff. A pair scoring `x` adds `x * (|sc| + |tc|) / 2` to
//! `hits`, i.e. the pair's own recovered shared-node count. That weighting
//! keeps the score within [0, 1].

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{tree_hash, ViewNode};

/// Cutoff for accepting a child pair during matching.
pub const DEFAULT_MATCHING_CUTOFF: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub const IDENTICAL: SimilarityScore = SimilarityScore(1.0);
    pub const DISJOINT: SimilarityScore = SimilarityScore(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for SimilarityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.0)
    }
}

pub fn similarity(s: &ViewNode, t: &ViewNode) -> SimilarityScore {
    similarity_with_cutoff(s, t, DEFAULT_MATCHING_CUTOFF)
}

pub fn similarity_with_cutoff(s: &ViewNode, t: &ViewNode, cutoff: f64) -> SimilarityScore {
    SimilarityScore(score(s, t, cutoff))
}

fn score(s: &ViewNode, t: &ViewNode, cutoff: f64) -> f64 {
    if tree_hash(s) == tree_hash(t) {
        return 1.0;
    }
    if s.tag() != t.tag() {
        return 0.0;
    }
    let t_children = t.children();
    let mut consumed = vec![false; t_children.len()];
    let mut hits = 1.0;
    for sc in s.children() {
        for (j, tc) in t_children.iter().enumerate() {
            if consumed[j] {
                continue;
            }
            let x = score(sc, tc, cutoff);
            if x > cutoff {
                hits += x * (sc.subtree_count() + tc.subtree_count()) as f64 / 2.0;
                consumed[j] = true;
                break;
            }
        }
    }
    2.0 * hits / (s.subtree_count() + t.subtree_count()) as f64
}
