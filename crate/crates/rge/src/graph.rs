//! Graph and dataset data model.
//!
//! A [`Graph`] is an undirected simple graph with optional discrete node
//! labels; a [`Dataset`] is a named collection of graphs with one class id
//! per graph. Both are immutable after construction and safe to share
//! across threads.

use crate::error::{Error, Result};

/// An undirected simple graph. Nodes are `0..node_count`; each edge is
/// stored once as an ordered pair `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(u32, u32)>,
    node_labels: Option<Vec<u32>>,
}

impl Graph {
    /// Builds a graph, canonicalizing the edge list: pairs are reordered
    /// so the smaller endpoint comes first, sorted, and deduplicated.
    ///
    /// Rejects self-loops, endpoints outside `0..node_count`, an empty
    /// node set, and label vectors whose length differs from `node_count`.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
        node_labels: Option<Vec<u32>>,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidInput("graph must have at least one node".into()));
        }
        let mut canonical: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop on node {a}")));
            }
            if a as usize >= node_count || b as usize >= node_count {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) outside node range 0..{node_count}"
                )));
            }
            canonical.push((a.min(b), a.max(b)));
        }
        canonical.sort_unstable();
        canonical.dedup();
        if let Some(labels) = &node_labels {
            if labels.len() != node_count {
                return Err(Error::InvalidInput(format!(
                    "{} node labels for {} nodes",
                    labels.len(),
                    node_count
                )));
            }
        }
        Ok(Graph {
            node_count,
            edges: canonical,
            node_labels,
        })
    }

    /// Builds an unlabeled graph.
    pub fn unlabeled(node_count: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        Self::new(node_count, edges, None)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: `(i, j)` with `i < j`, sorted, no duplicates.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn node_labels(&self) -> Option<&[u32]> {
        self.node_labels.as_deref()
    }

    /// Returns a copy of this graph carrying `labels` instead of its own.
    pub fn with_node_labels(&self, labels: Vec<u32>) -> Result<Self> {
        Graph::new(self.node_count, self.edges.iter().copied(), Some(labels))
    }

    /// Node degrees. Isolated nodes have degree zero.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.node_count];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        deg
    }

    /// Sorted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(a, b) in &self.edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Connected components as sorted node lists; singleton components
    /// include isolated nodes.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.node_count];
        let mut components = Vec::new();
        for start in 0..self.node_count {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start as u32];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &v in &adj[u as usize] {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }
}

/// A named set of graphs with one class id per graph. Class ids are
/// small integers starting at zero; either every graph carries node
/// labels or none does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    name: String,
    graphs: Vec<Graph>,
    graph_labels: Vec<usize>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>, graph_labels: Vec<usize>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::InvalidInput("dataset must contain at least one graph".into()));
        }
        if graphs.len() != graph_labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} graphs but {} graph labels",
                graphs.len(),
                graph_labels.len()
            )));
        }
        let labeled = graphs[0].node_labels().is_some();
        if graphs.iter().any(|g| g.node_labels().is_some() != labeled) {
            return Err(Error::InvalidInput(
                "either all graphs must carry node labels or none".into(),
            ));
        }
        Ok(Dataset {
            name: name.into(),
            graphs,
            graph_labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn graph(&self, index: usize) -> &Graph {
        &self.graphs[index]
    }

    pub fn graph_labels(&self) -> &[usize] {
        &self.graph_labels
    }

    pub fn has_node_labels(&self) -> bool {
        self.graphs[0].node_labels().is_some()
    }

    /// Number of classes, counted as `max(label) + 1`.
    pub fn num_classes(&self) -> usize {
        self.graph_labels.iter().copied().max().unwrap_or(0) + 1
    }

    /// Distinct node labels across the whole dataset (empty if unlabeled).
    pub fn distinct_node_labels(&self) -> Vec<u32> {
        let mut labels: Vec<u32> = self
            .graphs
            .iter()
            .filter_map(|g| g.node_labels())
            .flatten()
            .copied()
            .collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_edges() {
        let g = Graph::unlabeled(3, vec![(1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn rejects_self_loop_and_out_of_range() {
        assert!(Graph::unlabeled(3, vec![(1, 1)]).is_err());
        assert!(Graph::unlabeled(3, vec![(0, 3)]).is_err());
    }

    #[test]
    fn rejects_bad_label_length() {
        assert!(Graph::new(3, vec![(0, 1)], Some(vec![0, 1])).is_err());
    }

    #[test]
    fn degrees_count_isolated_nodes() {
        let g = Graph::unlabeled(4, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.degrees(), vec![1, 2, 1, 0]);
    }

    #[test]
    fn components_split_isolated() {
        let g = Graph::unlabeled(5, vec![(0, 1), (2, 3)]).unwrap();
        let comps = g.components();
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3], vec![4]]);
    }

    #[test]
    fn dataset_requires_uniform_labeling() {
        let a = Graph::new(2, vec![(0, 1)], Some(vec![0, 0])).unwrap();
        let b = Graph::unlabeled(2, vec![(0, 1)]).unwrap();
        assert!(Dataset::new("t", vec![a.clone(), b], vec![0, 1]).is_err());
        let c = Graph::new(2, vec![(0, 1)], Some(vec![1, 1])).unwrap();
        let ds = Dataset::new("t", vec![a, c], vec![0, 1]).unwrap();
        assert!(ds.has_node_labels());
        assert_eq!(ds.num_classes(), 2);
    }
}
