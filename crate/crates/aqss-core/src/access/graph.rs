//! The access-structure graph and its minimum clique partition.
//!
//! Vertices are the (canonically ordered) minimal authorized sets; an edge
//! joins two sets iff they overlap. A partial link classification is a
//! partition of the vertices into cliques, and λ is the size of the smallest
//! one. Minimum clique partition is NP-hard in general (it is vertex coloring
//! of the complement graph), but the instances arising here are tiny, so an
//! exact search with a vertex cutoff is the default.

use crate::access::AccessStructure;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Maximum vertex count supported by the adjacency representation.
pub const MAX_GRAPH_VERTICES: usize = 64;

/// Default vertex cutoff for the exact search.
pub const DEFAULT_MAX_EXACT: usize = 20;

/// Simple undirected graph over authorized-set indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsGraph {
    vertex_count: usize,
    /// Adjacency bitmasks, one per vertex; no self-loops.
    adjacency: Vec<u64>,
}

impl AsGraph {
    /// Build a graph from an explicit edge list.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count > MAX_GRAPH_VERTICES {
            return Err(Error::TooLarge(format!(
                "{vertex_count} vertices exceeds the {MAX_GRAPH_VERTICES}-vertex limit"
            )));
        }
        let mut adjacency = vec![0u64; vertex_count];
        for &(a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidParams(format!(
                    "edge ({a},{b}) out of range for {vertex_count} vertices"
                )));
            }
            if a == b {
                continue; // ignore self-loops
            }
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        }
        Ok(AsGraph {
            vertex_count,
            adjacency,
        })
    }

    /// Build the access-structure graph of Γ: one vertex per minimal
    /// authorized set, an edge wherever two sets overlap.
    pub fn from_structure(gamma: &AccessStructure) -> Result<Self> {
        let sets = gamma.sets();
        let mut edges = Vec::new();
        for (j, a) in sets.iter().enumerate() {
            for (k, b) in sets.iter().enumerate().skip(j + 1) {
                if !a.is_disjoint(b) {
                    edges.push((j, k));
                }
            }
        }
        AsGraph::from_edges(sets.len(), &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adjacency[a] >> b & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for a in 0..self.vertex_count {
            for b in a + 1..self.vertex_count {
                if self.has_edge(a, b) {
                    edges.push((a, b));
                }
            }
        }
        edges
    }

    pub fn is_complete(&self) -> bool {
        self.vertex_count < 2
            || self.edge_count() == self.vertex_count * (self.vertex_count - 1) / 2
    }

    /// Number of connected components; λ is at least this.
    pub fn component_count(&self) -> usize {
        let mut seen = 0u64;
        let mut components = 0;
        for start in 0..self.vertex_count {
            if seen >> start & 1 == 1 {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen |= 1 << start;
            while let Some(v) = stack.pop() {
                let mut fresh = self.adjacency[v] & !seen;
                while fresh != 0 {
                    let w = fresh.trailing_zeros() as usize;
                    fresh &= fresh - 1;
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        components
    }

    /// True iff `members` induces a complete subgraph.
    pub fn is_clique(&self, members: &[usize]) -> bool {
        for (i, &a) in members.iter().enumerate() {
            for &b in members.iter().skip(i + 1) {
                if !self.has_edge(a, b) {
                    return false;
                }
            }
        }
        true
    }
}

/// How to search for the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    /// Exact branch-and-bound, refused above the vertex cutoff.
    Exact { max_exact: usize },
    /// Greedy first-fit over vertices in canonical order; any size.
    Heuristic,
}

impl Default for PartitionMode {
    fn default() -> Self {
        PartitionMode::Exact {
            max_exact: DEFAULT_MAX_EXACT,
        }
    }
}

/// A partition of the graph's vertices into cliques.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliquePartition {
    /// Disjoint vertex classes covering all vertices, each inducing a
    /// complete subgraph. Ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Whether the size is the proven global minimum λ.
    pub exact: bool,
}

impl CliquePartition {
    pub fn size(&self) -> usize {
        self.classes.len()
    }

    /// Class index per vertex.
    pub fn assignment(&self, vertex_count: usize) -> Vec<usize> {
        let mut assignment = vec![usize::MAX; vertex_count];
        for (c, class) in self.classes.iter().enumerate() {
            for &v in class {
                assignment[v] = c;
            }
        }
        assignment
    }

    /// Check validity against a graph: disjoint clique classes covering all
    /// vertices exactly once.
    pub fn is_valid_for(&self, graph: &AsGraph) -> bool {
        let mut seen = vec![false; graph.vertex_count()];
        for class in &self.classes {
            if class.is_empty() || !graph.is_clique(class) {
                return false;
            }
            for &v in class {
                if v >= seen.len() || seen[v] {
                    return false;
                }
                seen[v] = true;
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Minimum clique partition with the default exact mode (cutoff 20 vertices).
pub fn min_clique_partition(graph: &AsGraph) -> Result<CliquePartition> {
    min_clique_partition_with(graph, PartitionMode::default())
}

/// Minimum clique partition with an explicit mode.
///
/// In exact mode the result size equals λ and, among all minimum partitions,
/// the returned one has the lexicographically least class-assignment vector
/// (vertices in canonical order, classes numbered by first appearance).
pub fn min_clique_partition_with(
    graph: &AsGraph,
    mode: PartitionMode,
) -> Result<CliquePartition> {
    let n = graph.vertex_count();
    if n == 0 {
        return Ok(CliquePartition {
            classes: vec![],
            exact: true,
        });
    }
    match mode {
        PartitionMode::Heuristic => Ok(greedy_partition(graph)),
        PartitionMode::Exact { max_exact } => {
            if n > max_exact {
                return Err(Error::TooLarge(format!(
                    "{n} vertices exceeds the exact-mode cutoff of {max_exact}; \
                     rerun with the heuristic mode"
                )));
            }
            Ok(exact_partition(graph))
        }
    }
}

/// First-fit: place each vertex (in order) into the first class it stays a
/// clique with, else open a new class.
fn greedy_partition(graph: &AsGraph) -> CliquePartition {
    let mut class_masks: Vec<u64> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..graph.vertex_count() {
        let adj = graph.adjacency[v];
        match class_masks.iter().position(|&m| m & !adj == 0) {
            Some(c) => {
                class_masks[c] |= 1 << v;
                classes[c].push(v);
            }
            None => {
                class_masks.push(1 << v);
                classes.push(vec![v]);
            }
        }
    }
    CliquePartition {
        classes,
        exact: false,
    }
}

fn exact_partition(graph: &AsGraph) -> CliquePartition {
    let n = graph.vertex_count();
    let greedy = greedy_partition(graph);
    let upper = greedy.size();
    let lower = graph.component_count().max(1);
    for k in lower..=upper {
        let mut assignment = vec![usize::MAX; n];
        let mut class_masks = vec![0u64; k];
        if assign(graph, k, 0, 0, &mut assignment, &mut class_masks) {
            let mut classes = vec![Vec::new(); assignment.iter().copied().max().unwrap() + 1];
            for (v, &c) in assignment.iter().enumerate() {
                classes[c].push(v);
            }
            return CliquePartition {
                classes,
                exact: true,
            };
        }
    }
    // The greedy partition is always valid, so the loop returns by k = upper.
    unreachable!("search must succeed at the greedy upper bound")
}

/// Depth-first search over class assignments in lexicographic order. Classes
/// are numbered by first appearance (a vertex may open at most one fresh
/// class), so the first complete assignment found is the lexicographically
/// least among all partitions into at most `k` cliques.
fn assign(
    graph: &AsGraph,
    k: usize,
    vertex: usize,
    used: usize,
    assignment: &mut [usize],
    class_masks: &mut [u64],
) -> bool {
    if vertex == graph.vertex_count() {
        return true;
    }
    let adj = graph.adjacency[vertex];
    let limit = (used + 1).min(k);
    for class in 0..limit {
        // The vertex must be adjacent to every current member of the class.
        if class_masks[class] & !adj != 0 {
            continue;
        }
        assignment[vertex] = class;
        class_masks[class] |= 1 << vertex;
        let next_used = used.max(class + 1);
        if assign(graph, k, vertex + 1, next_used, assignment, class_masks) {
            return true;
        }
        class_masks[class] &= !(1 << vertex);
    }
    assignment[vertex] = usize::MAX;
    false
}
