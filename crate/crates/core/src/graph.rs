//! Window and graph value types shared by every builder.
//!
//! Nodes are keyed by absolute stream position. Sliding the window never
//! re-keys a surviving node, so evicting the oldest tick only touches the
//! neighbor sets of that one node.

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};

/// Absolute, 0-based position of a sample in its stream. Never reused.
pub type TickIndex = u64;

/// Undirected edge, stored with the smaller index first when canonical.
pub type Edge = (TickIndex, TickIndex);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub index: TickIndex,
    pub value: f64,
}

impl Sample {
    pub fn new(index: TickIndex, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { index, value })
    }
}

/// The most recent `capacity` samples of a stream, contiguous in index.
#[derive(Debug, Clone)]
pub struct Window {
    values: VecDeque<f64>,
    capacity: usize,
    /// Index the next pushed sample receives.
    next: TickIndex,
}

impl Window {
    pub fn new(capacity: usize) -> Result<Self> {
        Self::starting_at(capacity, 0)
    }

    /// Empty window whose first sample will carry index `first`.
    pub fn starting_at(capacity: usize, first: TickIndex) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::ZeroCapacity);
        }
        Ok(Self {
            values: VecDeque::with_capacity(capacity),
            capacity,
            next: first,
        })
    }

    /// A full window over `values`, the first of which sits at `start`.
    pub fn from_values(start: TickIndex, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut window = Self::starting_at(values.len(), start)?;
        for &v in values {
            window.push(v)?;
        }
        Ok(window)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.values.len() == self.capacity
    }

    pub fn next_index(&self) -> TickIndex {
        self.next
    }

    /// Index of the oldest sample, or of the next sample when empty.
    pub fn start_index(&self) -> TickIndex {
        self.next - self.values.len() as TickIndex
    }

    pub fn last_index(&self) -> Option<TickIndex> {
        if self.values.is_empty() {
            None
        } else {
            Some(self.next - 1)
        }
    }

    /// Appends the next sample in sequence.
    pub fn push(&mut self, value: f64) -> Result<Sample> {
        if self.is_full() {
            return Err(Error::WindowFull {
                capacity: self.capacity,
            });
        }
        let sample = Sample::new(self.next, value)?;
        self.values.push_back(value);
        self.next += 1;
        Ok(sample)
    }

    /// Appends `sample`, rejecting anything but the next consecutive index.
    pub fn push_sample(&mut self, sample: Sample) -> Result<()> {
        if sample.index != self.next {
            return Err(Error::StreamGap {
                expected: self.next,
                got: sample.index,
            });
        }
        self.push(sample.value).map(|_| ())
    }

    pub fn pop_oldest(&mut self) -> Option<Sample> {
        let index = self.start_index();
        self.values.pop_front().map(|value| Sample { index, value })
    }

    /// Value at absolute index `index`, if it lies inside the window.
    #[inline]
    pub fn value(&self, index: TickIndex) -> Option<f64> {
        let offset = index.checked_sub(self.start_index())?;
        self.values.get(offset as usize).copied()
    }

    /// Value at `offset` positions from the oldest sample.
    #[inline]
    pub(crate) fn value_at(&self, offset: usize) -> f64 {
        self.values[offset]
    }

    pub fn samples(&self) -> impl DoubleEndedIterator<Item = Sample> + '_ {
        let start = self.start_index();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &value)| Sample {
                index: start + k as TickIndex,
                value,
            })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }
}

/// Adjacency-set graph keyed by absolute tick index.
#[derive(Clone, Default)]
pub struct VisibilityGraph {
    adjacency: FxHashMap<TickIndex, FxHashSet<TickIndex>>,
    edge_count: usize,
    mutations: u64,
}

impl VisibilityGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(nodes: usize) -> Self {
        Self {
            adjacency: FxHashMap::with_capacity_and_hasher(nodes, Default::default()),
            ..Self::default()
        }
    }

    /// Graph over `count` isolated nodes `start, start + 1, ...`.
    pub fn with_nodes(start: TickIndex, count: usize) -> Self {
        let mut g = Self::with_capacity(count);
        for k in 0..count as TickIndex {
            g.add_node(start + k);
        }
        g
    }

    /// Bulk construction for offline builders: `lists[m]` holds the window
    /// positions adjacent to position `m`, recorded from both ends. Sets are
    /// sized once, which keeps rebuilds from paying for rehashing.
    pub(crate) fn from_adjacency_lists(start: TickIndex, lists: Vec<Vec<usize>>) -> Self {
        let mut g = Self::with_capacity(lists.len());
        let mut degree_sum = 0;
        for (m, list) in lists.into_iter().enumerate() {
            degree_sum += list.len();
            let set: FxHashSet<TickIndex> = list.into_iter().map(|k| start + k as TickIndex).collect();
            g.adjacency.insert(start + m as TickIndex, set);
        }
        debug_assert_eq!(degree_sum % 2, 0);
        g.edge_count = degree_sum / 2;
        g.mutations = (g.adjacency.len() + g.edge_count) as u64;
        g
    }

    /// Inserts an isolated node. Returns false if it already existed.
    pub fn add_node(&mut self, i: TickIndex) -> bool {
        if self.adjacency.contains_key(&i) {
            return false;
        }
        self.adjacency.insert(i, FxHashSet::default());
        self.mutations += 1;
        true
    }

    /// Inserts the undirected edge `{i, j}`. Returns false on a duplicate.
    pub fn add_edge(&mut self, i: TickIndex, j: TickIndex) -> Result<bool> {
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if !self.adjacency.contains_key(&j) {
            return Err(Error::UnknownNode(j));
        }
        let inserted = self
            .adjacency
            .get_mut(&i)
            .ok_or(Error::UnknownNode(i))?
            .insert(j);
        if inserted {
            self.adjacency
                .get_mut(&j)
                .expect("checked above")
                .insert(i);
            self.edge_count += 1;
            self.mutations += 1;
        }
        Ok(inserted)
    }

    /// Removes `i` and every edge incident to it, returning its former degree.
    ///
    /// Work is proportional to the degree of `i`; no other entry is visited.
    pub fn remove_node(&mut self, i: TickIndex) -> Result<usize> {
        let neighbors = self.adjacency.remove(&i).ok_or(Error::UnknownNode(i))?;
        self.mutations += 1;
        for n in &neighbors {
            if let Some(set) = self.adjacency.get_mut(n) {
                set.remove(&i);
                self.mutations += 1;
            }
        }
        self.edge_count -= neighbors.len();
        Ok(neighbors.len())
    }

    pub fn contains_node(&self, i: TickIndex) -> bool {
        self.adjacency.contains_key(&i)
    }

    pub fn has_edge(&self, i: TickIndex, j: TickIndex) -> bool {
        self.adjacency.get(&i).is_some_and(|s| s.contains(&j))
    }

    pub fn neighbors(&self, i: TickIndex) -> Option<impl Iterator<Item = TickIndex> + '_> {
        self.adjacency.get(&i).map(|s| s.iter().copied())
    }

    pub fn degree(&self, i: TickIndex) -> Option<usize> {
        self.adjacency.get(&i).map(|s| s.len())
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Node keys in ascending order.
    pub fn nodes_sorted(&self) -> Vec<TickIndex> {
        let mut nodes: Vec<_> = self.adjacency.keys().copied().collect();
        nodes.sort_unstable();
        nodes
    }

    /// Every edge once as `(i, j)` with `i < j`, lexicographically sorted.
    pub fn edges_sorted(&self) -> Vec<Edge> {
        let mut edges = Vec::with_capacity(self.edge_count);
        for (&i, set) in &self.adjacency {
            edges.extend(set.iter().filter(|&&j| i < j).map(|&j| (i, j)));
        }
        edges.sort_unstable();
        edges
    }

    /// Running count of node insertions/removals and edge
    /// insertions/removals, for instrumentation.
    pub fn mutations(&self) -> u64 {
        self.mutations
    }

    /// Checks symmetry, absence of self-loops, dangling neighbors and the
    /// cached edge count. Returns a description of the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut half_edges = 0usize;
        for (&i, set) in &self.adjacency {
            if set.contains(&i) {
                return Err(format!("self-loop at {i}"));
            }
            for &j in set {
                match self.adjacency.get(&j) {
                    None => return Err(format!("{i} lists unknown neighbor {j}")),
                    Some(back) if !back.contains(&i) => {
                        return Err(format!("edge ({i}, {j}) is not symmetric"))
                    }
                    _ => {}
                }
            }
            half_edges += set.len();
        }
        if half_edges != 2 * self.edge_count {
            return Err(format!(
                "edge count {} disagrees with adjacency total {half_edges}",
                self.edge_count
            ));
        }
        Ok(())
    }
}

impl PartialEq for VisibilityGraph {
    fn eq(&self, other: &Self) -> bool {
        self.adjacency == other.adjacency
    }
}

impl Eq for VisibilityGraph {}

impl fmt::Debug for VisibilityGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VisibilityGraph")
            .field("nodes", &self.nodes_sorted())
            .field("edges", &self.edges_sorted())
            .finish()
    }
}

/// What one slide of the window changed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphDelta {
    pub removed_node: Option<TickIndex>,
    pub added_node: TickIndex,
    /// Each edge is `(i, added_node)` with `i < added_node`.
    pub added_edges: Vec<Edge>,
}
