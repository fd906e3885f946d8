//! App exploration engine: structural UI-tree hashing, an FSM model of the
//! app, DFS exploration with intent-based backtracking, and tolerant replay.

pub mod batch;
pub mod coverage;
pub mod env;
pub mod explorer;
pub mod model;
pub mod reproducer;
pub mod shared;
pub mod sim;
pub mod tree;
