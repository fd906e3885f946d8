use std::fmt;
use std::hash::Hasher;
use std::str::FromStr;

use fnv::FnvHasher;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{NodeKind, ViewNode};

/// 64-bit structural digest of a UI tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructureHash(pub u64);

impl StructureHash {
    pub fn value(self) -> u64 {
        self.0
    }

    /// Fixed-width lowercase hex, as used in canonical strings and documents.
    pub fn to_hex(self) -> String {
        format!("{:016x}", self.0)
    }
}

impl fmt::Display for StructureHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl FromStr for StructureHash {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        u64::from_str_radix(s, 16).map(StructureHash)
    }
}

impl Serialize for StructureHash {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for StructureHash {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn string_hash(s: &str) -> StructureHash {
    let mut h = FnvHasher::default();
    h.write(s.as_bytes());
    StructureHash(h.finish())
}

/// The string hashed for `node`: the bare tag for a leaf, otherwise
/// `tag(h1,h2,...)` with child hashes sorted ascending (deduplicated under a
/// list container) and rendered as 16-digit hex.
pub fn canonical_string(node: &ViewNode) -> String {
    if node.children().is_empty() {
        return node.tag().to_string();
    }
    let mut hashes: Vec<StructureHash> = node.children().iter().map(tree_hash).collect();
    hashes.sort_unstable();
    if node.kind() == NodeKind::ListContainer {
        hashes.dedup();
    }
    let mut out = String::with_capacity(node.tag().len() + 2 + hashes.len() * 17);
    out.push_str(node.tag());
    out.push('(');
    for (i, h) in hashes.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&h.to_hex());
    }
    out.push(')');
    out
}

/// Bottom-up structure hash of the tree rooted at `node`. Memoized per node.
pub fn tree_hash(node: &ViewNode) -> StructureHash {
    *node
        .hash_cell()
        .get_or_init(|| string_hash(&canonical_string(node)))
}
