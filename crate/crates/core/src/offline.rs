//! From-scratch builders: divide-and-conquer (both criteria) and the
//! monotonic-stack pass (horizontal only). Used to bootstrap the first
//! window of a stream and as rebuild-per-slide baselines.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::criteria::{basic_build, below_chord, CriterionKind};
use crate::error::{Error, Result};
use crate::graph::{TickIndex, VisibilityGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BootstrapChoice {
    DivideAndConquer,
    MonotonicStack,
    BasicOracle,
}

impl BootstrapChoice {
    /// Divide-and-conquer for natural graphs, the stack pass for horizontal.
    pub fn default_for(kind: CriterionKind) -> Self {
        match kind {
            CriterionKind::Natural => BootstrapChoice::DivideAndConquer,
            CriterionKind::Horizontal => BootstrapChoice::MonotonicStack,
        }
    }
}

impl fmt::Display for BootstrapChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BootstrapChoice::DivideAndConquer => "dc",
            BootstrapChoice::MonotonicStack => "lt",
            BootstrapChoice::BasicOracle => "basic",
        })
    }
}

impl FromStr for BootstrapChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dc" => Ok(BootstrapChoice::DivideAndConquer),
            "lt" | "ms" => Ok(BootstrapChoice::MonotonicStack),
            "basic" => Ok(BootstrapChoice::BasicOracle),
            other => Err(Error::InvalidChoice(format!("unknown builder {other:?}"))),
        }
    }
}

/// Work tallies reported by the instrumented builders.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    /// Visibility tests evaluated.
    pub comparisons: u64,
    pub stack_pushes: u64,
    pub stack_pops: u64,
    /// Deepest nesting of divide-and-conquer ranges (root = 1).
    pub max_depth: usize,
}

/// Monotonic stack of `(tick, value)` pairs with strictly decreasing values
/// from bottom to top.
pub(crate) type MonoStack = VecDeque<(TickIndex, f64)>;

/// Feeds tick `t` through the stack. `on_edge` receives every stack entry
/// horizontally visible from `t`.
///
/// Entries lower than `s_t` see `t` and are popped for good. The first entry
/// that is not lower sees `t` too; if it ties with `s_t` it is popped and
/// blocks everything beneath it.
#[inline]
pub(crate) fn monotonic_push(
    stack: &mut MonoStack,
    t: TickIndex,
    s_t: f64,
    stats: &mut BuildStats,
    mut on_edge: impl FnMut(TickIndex),
) {
    while let Some(&(top, s_top)) = stack.back() {
        stats.comparisons += 1;
        on_edge(top);
        if s_top <= s_t {
            stack.pop_back();
            stats.stack_pops += 1;
            if s_top < s_t {
                continue;
            }
        }
        break;
    }
    stack.push_back((t, s_t));
    stats.stack_pushes += 1;
}

/// Divide-and-conquer builder: connect the range maximum to everything it
/// sees, then split on it. Average O(N log N), O(N^2) on monotone input.
pub fn dc_build(start: TickIndex, values: &[f64], kind: CriterionKind) -> Result<VisibilityGraph> {
    dc_build_instrumented(start, values, kind).map(|(g, _)| g)
}

pub fn dc_build_instrumented(
    start: TickIndex,
    values: &[f64],
    kind: CriterionKind,
) -> Result<(VisibilityGraph, BuildStats)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut g = VisibilityGraph::with_nodes(start, values.len());
    let mut stats = BuildStats::default();
    let tick = |m: usize| start + m as TickIndex;

    // Inclusive offset ranges still to process, with their nesting depth.
    let mut pending = vec![(0usize, values.len() - 1, 1usize)];
    while let Some((lo, hi, depth)) = pending.pop() {
        stats.max_depth = stats.max_depth.max(depth);
        let h = leftmost_max(&values[lo..=hi]) + lo;
        let s_h = values[h];

        match kind {
            CriterionKind::Natural => {
                // Leftward: keep the node whose chord to h is shallowest.
                if h > lo {
                    let mut blocker = h - 1;
                    g.add_edge(tick(blocker), tick(h))?;
                    stats.comparisons += 1;
                    for i in (lo..h - 1).rev() {
                        stats.comparisons += 1;
                        if below_chord(tick(i), values[i], tick(blocker), values[blocker], tick(h), s_h) {
                            g.add_edge(tick(i), tick(h))?;
                            blocker = i;
                        }
                    }
                }
                // Rightward: keep the node whose chord from h is steepest.
                if h < hi {
                    let mut blocker = h + 1;
                    g.add_edge(tick(h), tick(blocker))?;
                    stats.comparisons += 1;
                    for j in h + 2..=hi {
                        stats.comparisons += 1;
                        if below_chord(tick(h), s_h, tick(blocker), values[blocker], tick(j), values[j]) {
                            g.add_edge(tick(h), tick(j))?;
                            blocker = j;
                        }
                    }
                }
            }
            CriterionKind::Horizontal => {
                let mut tallest = f64::NEG_INFINITY;
                for i in (lo..h).rev() {
                    stats.comparisons += 1;
                    if tallest < values[i] {
                        g.add_edge(tick(i), tick(h))?;
                    }
                    tallest = tallest.max(values[i]);
                }
                tallest = f64::NEG_INFINITY;
                for (j, &s_j) in values.iter().enumerate().take(hi + 1).skip(h + 1) {
                    stats.comparisons += 1;
                    if tallest < s_j.min(s_h) {
                        g.add_edge(tick(h), tick(j))?;
                    }
                    if s_j >= s_h {
                        break;
                    }
                    tallest = tallest.max(s_j);
                }
            }
        }

        if h < hi {
            pending.push((h + 1, hi, depth + 1));
        }
        if h > lo {
            pending.push((lo, h - 1, depth + 1));
        }
    }
    Ok((g, stats))
}

fn leftmost_max(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Horizontal visibility graph in one left-to-right monotonic-stack pass.
/// O(N + E).
pub fn lt_build_hvg(start: TickIndex, values: &[f64]) -> Result<VisibilityGraph> {
    lt_build_hvg_instrumented(start, values).map(|(g, _)| g)
}

pub fn lt_build_hvg_instrumented(
    start: TickIndex,
    values: &[f64],
) -> Result<(VisibilityGraph, BuildStats)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut g = VisibilityGraph::with_nodes(start, values.len());
    let mut stats = BuildStats::default();
    let mut stack = MonoStack::with_capacity(values.len());
    for (m, &s) in values.iter().enumerate() {
        let t = start + m as TickIndex;
        monotonic_push(&mut stack, t, s, &mut stats, |i| {
            g.add_edge(i, t).expect("stack entries are window nodes");
        });
    }
    Ok((g, stats))
}

/// Builds the first window's graph with the chosen offline algorithm.
pub fn bootstrap(
    start: TickIndex,
    values: &[f64],
    kind: CriterionKind,
    choice: BootstrapChoice,
) -> Result<VisibilityGraph> {
    match (choice, kind) {
        (BootstrapChoice::DivideAndConquer, _) => dc_build(start, values, kind),
        (BootstrapChoice::MonotonicStack, CriterionKind::Horizontal) => lt_build_hvg(start, values),
        (BootstrapChoice::MonotonicStack, CriterionKind::Natural) => Err(Error::InvalidChoice(
            "the monotonic-stack builder only produces horizontal graphs".into(),
        )),
        (BootstrapChoice::BasicOracle, _) => basic_build(start, values, kind),
    }
}
