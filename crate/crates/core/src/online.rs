//! Streaming maintenance of a window's visibility graph.
//!
//! Each slide is two in-place steps: drop the oldest node together with its
//! incident edges, then connect the newest tick by walking the window from
//! the back while folding a single running extremum. Both steps are O(N)
//! worst case and allocate nothing beyond the returned edge list.

use std::fmt;
use std::str::FromStr;

use crate::criteria::{below_chord, CriterionKind};
use crate::error::{Error, Result};
use crate::graph::{Edge, GraphDelta, Sample, TickIndex, VisibilityGraph, Window};
use crate::offline::{bootstrap, monotonic_push, BootstrapChoice, BuildStats, MonoStack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OnlineAlgorithm {
    LotNvg,
    LotHvg,
    /// Horizontal update driven by a monotonic stack instead of a scan.
    LotHvgMsOpt,
}

impl OnlineAlgorithm {
    pub const ALL: [OnlineAlgorithm; 3] = [
        OnlineAlgorithm::LotNvg,
        OnlineAlgorithm::LotHvg,
        OnlineAlgorithm::LotHvgMsOpt,
    ];

    pub fn criterion(self) -> CriterionKind {
        match self {
            OnlineAlgorithm::LotNvg => CriterionKind::Natural,
            OnlineAlgorithm::LotHvg | OnlineAlgorithm::LotHvgMsOpt => CriterionKind::Horizontal,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OnlineAlgorithm::LotNvg => "LOT-NVG",
            OnlineAlgorithm::LotHvg => "LOT-HVG",
            OnlineAlgorithm::LotHvgMsOpt => "LOT-HVG-MSopt",
        }
    }
}

impl fmt::Display for OnlineAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OnlineAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "lot-nvg" => Ok(OnlineAlgorithm::LotNvg),
            "lot-hvg" => Ok(OnlineAlgorithm::LotHvg),
            "lot-hvg-msopt" => Ok(OnlineAlgorithm::LotHvgMsOpt),
            other => Err(Error::InvalidChoice(format!("unknown online algorithm {other:?}"))),
        }
    }
}

/// Cumulative work tallies since the state was created.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OnlineCounters {
    /// Visibility tests performed while connecting new ticks.
    pub comparisons: u64,
    pub stack_pushes: u64,
    /// Includes entries dropped from the bottom on eviction.
    pub stack_pops: u64,
    pub advances: u64,
}

#[derive(Debug, Clone)]
pub struct OnlineState {
    window: Window,
    graph: VisibilityGraph,
    algorithm: OnlineAlgorithm,
    stack: Option<MonoStack>,
    counters: OnlineCounters,
}

impl OnlineState {
    /// Bootstraps the graph of a full first window with an offline builder.
    pub fn init(first_window: Window, algorithm: OnlineAlgorithm, choice: BootstrapChoice) -> Result<Self> {
        if !first_window.is_full() {
            return Err(Error::WarmupIncomplete {
                len: first_window.len(),
                capacity: first_window.capacity(),
            });
        }
        let values = first_window.to_vec();
        let start = first_window.start_index();
        let graph = bootstrap(start, &values, algorithm.criterion(), choice)?;
        let stack = (algorithm == OnlineAlgorithm::LotHvgMsOpt).then(|| {
            let mut stack = MonoStack::with_capacity(first_window.capacity() + 1);
            let mut scratch = BuildStats::default();
            for sample in first_window.samples() {
                monotonic_push(&mut stack, sample.index, sample.value, &mut scratch, |_| {});
            }
            stack
        });
        Ok(Self {
            window: first_window,
            graph,
            algorithm,
            stack,
            counters: OnlineCounters::default(),
        })
    }

    /// Convenience for a full window over `values` starting at tick `start`,
    /// bootstrapped with the default builder for the algorithm's criterion.
    pub fn from_values(start: TickIndex, values: &[f64], algorithm: OnlineAlgorithm) -> Result<Self> {
        let choice = BootstrapChoice::default_for(algorithm.criterion());
        Self::init(Window::from_values(start, values)?, algorithm, choice)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn graph(&self) -> &VisibilityGraph {
        &self.graph
    }

    pub fn algorithm(&self) -> OnlineAlgorithm {
        self.algorithm
    }

    pub fn criterion(&self) -> CriterionKind {
        self.algorithm.criterion()
    }

    pub fn counters(&self) -> OnlineCounters {
        self.counters
    }

    /// Monotonic stack indices bottom to top (MSopt only).
    pub fn stack(&self) -> Option<Vec<TickIndex>> {
        self.stack.as_ref().map(|s| s.iter().map(|&(i, _)| i).collect())
    }

    /// Step 1: evict the oldest sample and its node, in place.
    pub fn eliminate_oldest(&mut self) -> Result<TickIndex> {
        if !self.window.is_full() {
            return Err(Error::WarmupIncomplete {
                len: self.window.len(),
                capacity: self.window.capacity(),
            });
        }
        let evicted = self.window.pop_oldest().expect("full window is non-empty").index;
        self.graph.remove_node(evicted)?;
        if let Some(stack) = self.stack.as_mut() {
            if stack.front().is_some_and(|&(i, _)| i == evicted) {
                stack.pop_front();
                self.counters.stack_pops += 1;
            }
        }
        Ok(evicted)
    }

    /// Step 2 for the natural criterion: connect `new` by a backward walk
    /// that tracks the node whose chord to `new` is shallowest so far. A
    /// node is visible iff it lies strictly below that chord's extension,
    /// i.e. its own chord is strictly shallower.
    pub fn update_nvg(&mut self, new: Sample) -> Result<Vec<Edge>> {
        self.expect_algorithm(OnlineAlgorithm::LotNvg)?;
        let last = self.append(new)?;
        let (t, s_t) = (new.index, new.value);
        let start = self.window.start_index();
        let mut added = Vec::new();
        if last == 0 {
            return Ok(added);
        }
        // The immediate predecessor is always visible and seeds the minimum.
        let mut blocker = last - 1;
        self.counters.comparisons += 1;
        self.connect(start + blocker as TickIndex, t, &mut added);
        for offset in (0..last - 1).rev() {
            self.counters.comparisons += 1;
            let i = start + offset as TickIndex;
            let k = start + blocker as TickIndex;
            if below_chord(i, self.window.value_at(offset), k, self.window.value_at(blocker), t, s_t) {
                self.connect(i, t, &mut added);
                blocker = offset;
            }
        }
        Ok(added)
    }

    /// Step 2 for the horizontal criterion: backward walk folding the running
    /// maximum; stops at the first sample at least as tall as `new`.
    pub fn update_hvg(&mut self, new: Sample) -> Result<Vec<Edge>> {
        self.expect_algorithm(OnlineAlgorithm::LotHvg)?;
        let last = self.append(new)?;
        let (t, s_t) = (new.index, new.value);
        let start = self.window.start_index();
        let mut added = Vec::new();
        let mut tallest = f64::NEG_INFINITY;
        for offset in (0..last).rev() {
            self.counters.comparisons += 1;
            let s_i = self.window.value_at(offset);
            if tallest < s_i.min(s_t) {
                self.connect(start + offset as TickIndex, t, &mut added);
            }
            if s_i >= s_t {
                break;
            }
            tallest = tallest.max(s_i);
        }
        Ok(added)
    }

    /// Step 2 for the horizontal criterion via the monotonic stack: only
    /// stack entries can see `new`, and each is popped at most once.
    pub fn update_hvg_msopt(&mut self, new: Sample) -> Result<Vec<Edge>> {
        self.expect_algorithm(OnlineAlgorithm::LotHvgMsOpt)?;
        self.append(new)?;
        let t = new.index;
        let mut added = Vec::new();
        let mut stats = BuildStats::default();
        let stack = self.stack.as_mut().expect("MSopt state carries a stack");
        let graph = &mut self.graph;
        monotonic_push(stack, t, new.value, &mut stats, |i| {
            graph.add_edge(i, t).expect("stack entries are window nodes");
            added.push((i, t));
        });
        self.counters.comparisons += stats.comparisons;
        self.counters.stack_pushes += stats.stack_pushes;
        self.counters.stack_pops += stats.stack_pops;
        Ok(added)
    }

    /// Runs the update step matching this state's algorithm.
    pub fn update(&mut self, new: Sample) -> Result<Vec<Edge>> {
        match self.algorithm {
            OnlineAlgorithm::LotNvg => self.update_nvg(new),
            OnlineAlgorithm::LotHvg => self.update_hvg(new),
            OnlineAlgorithm::LotHvgMsOpt => self.update_hvg_msopt(new),
        }
    }

    /// Slides the window by one tick: eliminate, then update.
    pub fn advance(&mut self, value: f64) -> Result<GraphDelta> {
        let new = Sample::new(self.window.next_index(), value)?;
        let removed = self.eliminate_oldest()?;
        let added_edges = self.update(new)?;
        self.counters.advances += 1;
        Ok(GraphDelta {
            removed_node: Some(removed),
            added_node: new.index,
            added_edges,
        })
    }

    fn expect_algorithm(&self, wanted: OnlineAlgorithm) -> Result<()> {
        if self.algorithm != wanted {
            return Err(Error::InvalidChoice(format!(
                "{wanted} update called on a {} state",
                self.algorithm
            )));
        }
        Ok(())
    }

    /// Appends `new` to window and graph; returns its window offset.
    fn append(&mut self, new: Sample) -> Result<usize> {
        if !new.value.is_finite() {
            return Err(Error::NonFinite {
                index: new.index,
                value: new.value,
            });
        }
        self.window.push_sample(new)?;
        self.graph.add_node(new.index);
        Ok(self.window.len() - 1)
    }

    #[inline]
    fn connect(&mut self, i: TickIndex, t: TickIndex, added: &mut Vec<Edge>) {
        self.graph.add_edge(i, t).expect("both endpoints are window nodes");
        added.push((i, t));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::basic_build;

    fn state(values: &[f64], algorithm: OnlineAlgorithm) -> OnlineState {
        OnlineState::from_values(0, values, algorithm).unwrap()
    }

    fn sample(index: TickIndex, value: f64) -> Sample {
        Sample { index, value }
    }

    #[test]
    fn init_examples() {
        let s = state(&[1.0, 2.0, 4.0], OnlineAlgorithm::LotNvg);
        assert_eq!(s.graph().edges_sorted(), vec![(0, 1), (0, 2), (1, 2)]);

        let s = state(&[3.0, 1.0, 2.0], OnlineAlgorithm::LotHvgMsOpt);
        assert_eq!(s.graph().edges_sorted(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(s.stack(), Some(vec![0, 2]));

        let s = state(&[4.2], OnlineAlgorithm::LotHvgMsOpt);
        assert_eq!(s.graph().node_count(), 1);
        assert_eq!(s.stack(), Some(vec![0]));
    }

    #[test]
    fn init_rejects_partial_window() {
        let mut w = Window::new(3).unwrap();
        w.push(1.0).unwrap();
        let err = OnlineState::init(w, OnlineAlgorithm::LotNvg, BootstrapChoice::DivideAndConquer);
        assert!(matches!(err, Err(Error::WarmupIncomplete { len: 1, capacity: 3 })));
    }

    #[test]
    fn eliminate_examples() {
        let mut s = state(&[3.0, 1.0, 2.0, 4.0], OnlineAlgorithm::LotNvg);
        assert_eq!(s.graph().edge_count(), 6);
        assert_eq!(s.eliminate_oldest().unwrap(), 0);
        assert_eq!(s.graph().nodes_sorted(), vec![1, 2, 3]);
        assert_eq!(s.graph().edges_sorted(), vec![(1, 2), (1, 3), (2, 3)]);
        assert!(matches!(s.eliminate_oldest(), Err(Error::WarmupIncomplete { .. })));

        let mut s = state(&[3.0, 1.0, 2.0], OnlineAlgorithm::LotHvgMsOpt);
        s.eliminate_oldest().unwrap();
        assert_eq!(s.stack(), Some(vec![2]));

        let mut s = state(&[1.0, 3.0, 2.0], OnlineAlgorithm::LotHvgMsOpt);
        assert_eq!(s.stack(), Some(vec![1, 2]));
        s.eliminate_oldest().unwrap();
        assert_eq!(s.stack(), Some(vec![1, 2]));
    }

    #[test]
    fn update_nvg_examples() {
        let mut s = grown(&[1.0, 2.0, 4.0], OnlineAlgorithm::LotNvg);
        assert_eq!(s.update_nvg(sample(3, 3.0)).unwrap(), vec![(2, 3)]);
        assert_eq!(s.counters().comparisons, 3);

        let mut s = state(&[5.0], OnlineAlgorithm::LotNvg);
        s.eliminate_oldest().unwrap();
        assert_eq!(s.update_nvg(sample(1, 1.0)).unwrap(), vec![]);

        let mut s = grown(&[4.0, 3.0, 2.0], OnlineAlgorithm::LotNvg);
        assert_eq!(s.update_nvg(sample(3, 1.0)).unwrap(), vec![(2, 3)]);

        let mut s = grown(&[5.0], OnlineAlgorithm::LotNvg);
        assert_eq!(s.update_nvg(sample(1, 1.0)).unwrap(), vec![(0, 1)]);
    }

    /// State over `values` whose window has one free slot.
    fn grown(values: &[f64], algorithm: OnlineAlgorithm) -> OnlineState {
        let mut w = Window::new(values.len() + 1).unwrap();
        for &v in values {
            w.push(v).unwrap();
        }
        let graph = basic_build(0, values, algorithm.criterion()).unwrap();
        let stack = (algorithm == OnlineAlgorithm::LotHvgMsOpt).then(|| {
            let mut st = MonoStack::new();
            for (m, &v) in values.iter().enumerate() {
                monotonic_push(&mut st, m as u64, v, &mut BuildStats::default(), |_| {});
            }
            st
        });
        OnlineState {
            window: w,
            graph,
            algorithm,
            stack,
            counters: OnlineCounters::default(),
        }
    }

    #[test]
    fn update_hvg_examples() {
        let mut s = grown(&[3.0, 1.0, 2.0], OnlineAlgorithm::LotHvg);
        assert_eq!(s.update_hvg(sample(3, 4.0)).unwrap(), vec![(2, 3), (0, 3)]);

        let mut s = grown(&[9.0, 1.0], OnlineAlgorithm::LotHvg);
        assert_eq!(s.update_hvg(sample(2, 2.0)).unwrap(), vec![(1, 2), (0, 2)]);

        let mut s = grown(&[5.0, 5.0], OnlineAlgorithm::LotHvg);
        assert_eq!(s.update_hvg(sample(2, 5.0)).unwrap(), vec![(1, 2)]);
        assert_eq!(s.counters().comparisons, 1);
    }

    #[test]
    fn update_msopt_examples() {
        let mut s = grown(&[3.0, 1.0, 2.0], OnlineAlgorithm::LotHvgMsOpt);
        assert_eq!(s.stack(), Some(vec![0, 2]));
        assert_eq!(s.update_hvg_msopt(sample(3, 4.0)).unwrap(), vec![(2, 3), (0, 3)]);
        assert_eq!(s.stack(), Some(vec![3]));

        let mut s = grown(&[5.0], OnlineAlgorithm::LotHvgMsOpt);
        assert_eq!(s.update_hvg_msopt(sample(1, 5.0)).unwrap(), vec![(0, 1)]);
        assert_eq!(s.stack(), Some(vec![1]));

        let mut s = state(&[2.5], OnlineAlgorithm::LotHvgMsOpt);
        s.eliminate_oldest().unwrap();
        assert_eq!(s.stack(), Some(vec![]));
        assert_eq!(s.update_hvg_msopt(sample(1, 7.0)).unwrap(), vec![]);
        assert_eq!(s.stack(), Some(vec![1]));
    }

    #[test]
    fn update_errors() {
        let mut s = grown(&[1.0, 2.0], OnlineAlgorithm::LotNvg);
        assert!(matches!(s.update_nvg(sample(5, 1.0)), Err(Error::StreamGap { expected: 2, got: 5 })));
        assert!(matches!(s.update_nvg(sample(2, f64::INFINITY)), Err(Error::NonFinite { .. })));
        assert!(matches!(s.update_hvg(sample(2, 1.0)), Err(Error::InvalidChoice(_))));
        let mut full = state(&[1.0, 2.0], OnlineAlgorithm::LotNvg);
        assert!(matches!(full.update_nvg(sample(2, 1.0)), Err(Error::WindowFull { .. })));
    }

    #[test]
    fn advance_examples() {
        let mut s = state(&[3.0, 1.0, 2.0], OnlineAlgorithm::LotHvg);
        let delta = s.advance(4.0).unwrap();
        assert_eq!(
            delta,
            GraphDelta { removed_node: Some(0), added_node: 3, added_edges: vec![(2, 3)] }
        );
        assert_eq!(s.graph().edges_sorted(), vec![(1, 2), (2, 3)]);

        // [2, 4, 3]: the peak at tick 2 hides tick 1 from tick 3.
        let mut s = state(&[1.0, 2.0, 4.0], OnlineAlgorithm::LotNvg);
        s.advance(3.0).unwrap();
        assert_eq!(s.graph().edges_sorted(), vec![(1, 2), (2, 3)]);
        assert_eq!(
            s.graph().edges_sorted(),
            basic_build(1, &[2.0, 4.0, 3.0], CriterionKind::Natural).unwrap().edges_sorted()
        );
    }

    #[test]
    fn advance_rejects_non_finite_without_evicting() {
        let mut s = state(&[1.0, 2.0], OnlineAlgorithm::LotHvg);
        assert!(matches!(s.advance(f64::NAN), Err(Error::NonFinite { .. })));
        assert!(s.window().is_full());
        assert_eq!(s.window().start_index(), 0);
    }

    #[test]
    fn advance_on_partial_window_fails() {
        let mut s = grown(&[1.0, 2.0], OnlineAlgorithm::LotHvg);
        assert!(matches!(s.advance(3.0), Err(Error::WarmupIncomplete { .. })));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in OnlineAlgorithm::ALL {
            assert_eq!(a.name().parse::<OnlineAlgorithm>().unwrap(), a);
        }
        assert_eq!("lot-hvg-msopt".parse::<OnlineAlgorithm>().unwrap(), OnlineAlgorithm::LotHvgMsOpt);
    }
}
