//! Entry-to-target path enumeration.
//!
//! Paths are simple (no state repeats), returned shortest first, with
//! equal-length paths ordered lexicographically by visited state ids and then
//! by transition insertion order. Lengths are tried in increasing order; for
//! each length a depth-first search walks only into states whose BFS distance
//! to the target still fits in the remaining budget.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{StateId, StateModel, UiEvent};

pub const DEFAULT_MAX_PATHS: usize = 64;

/// Hard cap on search-tree expansions per call, so dense cyclic models cannot
/// stall enumeration. Output stays sorted when the cap cuts it short.
const EXPANSION_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathLimits {
    pub max_paths: usize,
    /// Longest path considered; `None` means twice the state count.
    pub max_length: Option<usize>,
}

impl Default for PathLimits {
    fn default() -> Self {
        PathLimits {
            max_paths: DEFAULT_MAX_PATHS,
            max_length: None,
        }
    }
}

impl PathLimits {
    pub fn paths(max_paths: usize) -> Self {
        PathLimits {
            max_paths,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestStep {
    pub event: UiEvent,
    pub expected: StateId,
}

/// An event sequence from the entry state, with the state each step is
/// expected to reach.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub target: StateId,
    pub steps: Vec<TestStep>,
}

impl TestCase {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Visited states including the entry state.
    pub fn states(&self) -> Vec<StateId> {
        std::iter::once(StateId::ENTRY)
            .chain(self.steps.iter().map(|s| s.expected))
            .collect()
    }
}

impl StateModel {
    /// BFS distance from every state to `target` along transitions.
    pub fn distances_to(&self, target: StateId) -> Vec<Option<usize>> {
        let n = self.len();
        let mut reverse = vec![Vec::new(); n];
        for t in self.transitions() {
            reverse[t.to.0].push(t.from.0);
        }
        let mut dist = vec![None; n];
        if target.0 >= n {
            return dist;
        }
        dist[target.0] = Some(0);
        let mut queue = VecDeque::from([target.0]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0) + 1;
            for &u in &reverse[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn enumerate_paths(&self, target: StateId, limits: PathLimits) -> Vec<TestCase> {
        if !self.contains(target) || limits.max_paths == 0 {
            return Vec::new();
        }
        if target == StateId::ENTRY {
            return vec![TestCase {
                target,
                steps: Vec::new(),
            }];
        }
        let dist = self.distances_to(target);
        let Some(shortest) = dist[0] else {
            return Vec::new();
        };
        let max_length = limits.max_length.unwrap_or(2 * self.len());

        let mut search = Search {
            model: self,
            adjacency: self.adjacency(),
            dist: &dist,
            target,
            visited: vec![false; self.len()],
            trail: Vec::new(),
            found: Vec::new(),
            max_paths: limits.max_paths,
            budget: EXPANSION_BUDGET,
        };
        search.visited[0] = true;
        for length in shortest..=max_length {
            search.walk(StateId::ENTRY, length);
            if search.found.len() >= limits.max_paths || search.budget == 0 {
                break;
            }
        }
        search.found
    }

    pub fn shortest_path(&self, target: StateId) -> Option<TestCase> {
        self.enumerate_paths(target, PathLimits::paths(1)).pop()
    }
}

struct Search<'a> {
    model: &'a StateModel,
    adjacency: Vec<Vec<(StateId, usize)>>,
    dist: &'a [Option<usize>],
    target: StateId,
    visited: Vec<bool>,
    trail: Vec<usize>,
    found: Vec<TestCase>,
    max_paths: usize,
    budget: usize,
}

impl Search<'_> {
    fn walk(&mut self, at: StateId, remaining: usize) {
        if self.found.len() >= self.max_paths || self.budget == 0 {
            return;
        }
        self.budget -= 1;
        if at == self.target {
            if remaining == 0 {
                self.record();
            }
            return;
        }
        if remaining == 0 {
            return;
        }
        for k in 0..self.adjacency[at.0].len() {
            let (next, transition) = self.adjacency[at.0][k];
            if self.visited[next.0] {
                continue;
            }
            match self.dist[next.0] {
                Some(d) if d < remaining => {}
                _ => continue,
            }
            self.visited[next.0] = true;
            self.trail.push(transition);
            self.walk(next, remaining - 1);
            self.trail.pop();
            self.visited[next.0] = false;
        }
    }

    fn record(&mut self) {
        let steps = self
            .trail
            .iter()
            .map(|&i| {
                let (event, expected) = self.model.transition_at(i);
                TestStep {
                    event: event.clone(),
                    expected,
                }
            })
            .collect();
        self.found.push(TestCase {
            target: self.target,
            steps,
        });
    }
}
