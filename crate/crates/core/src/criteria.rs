//! Natural and horizontal visibility predicates, and the quadratic builder
//! every faster algorithm is checked against.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{TickIndex, VisibilityGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionKind {
    Natural,
    Horizontal,
}

impl CriterionKind {
    pub fn short_name(self) -> &'static str {
        match self {
            CriterionKind::Natural => "nvg",
            CriterionKind::Horizontal => "hvg",
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nvg" | "natural" => Ok(CriterionKind::Natural),
            "hvg" | "horizontal" => Ok(CriterionKind::Horizontal),
            other => Err(Error::InvalidChoice(format!("unknown criterion {other:?}"))),
        }
    }
}

/// True when `(k, s_k)` lies strictly below the chord from `(i, s_i)` to
/// `(j, s_j)`, for `i < k < j`. Cross-multiplied, so no division happens.
///
/// Every natural-visibility decision in the crate goes through this one
/// expression so that borderline inputs resolve identically everywhere.
#[inline(always)]
pub(crate) fn below_chord(
    i: TickIndex,
    s_i: f64,
    k: TickIndex,
    s_k: f64,
    j: TickIndex,
    s_j: f64,
) -> bool {
    (s_k - s_i) * ((j - i) as f64) < (s_j - s_i) * ((k - i) as f64)
}

fn check_pair(len: usize, i: usize, j: usize) -> Result<()> {
    if i >= j {
        return Err(Error::Ordering { i, j });
    }
    if j >= len {
        return Err(Error::OutOfRange { index: j, len });
    }
    Ok(())
}

/// Natural visibility between positions `i < j` of `series`: every sample in
/// between lies strictly below the straight line joining the two.
pub fn natural_visible(series: &[f64], i: usize, j: usize) -> Result<bool> {
    check_pair(series.len(), i, j)?;
    let (s_i, s_j) = (series[i], series[j]);
    Ok((i + 1..j).all(|k| {
        below_chord(
            i as TickIndex,
            s_i,
            k as TickIndex,
            series[k],
            j as TickIndex,
            s_j,
        )
    }))
}

/// Horizontal visibility between positions `i < j` of `series`: every sample
/// in between is strictly lower than both endpoints.
pub fn horizontal_visible(series: &[f64], i: usize, j: usize) -> Result<bool> {
    check_pair(series.len(), i, j)?;
    let floor = series[i].min(series[j]);
    Ok(series[i + 1..j].iter().all(|&s_k| s_k < floor))
}

pub fn visible(kind: CriterionKind, series: &[f64], i: usize, j: usize) -> Result<bool> {
    match kind {
        CriterionKind::Natural => natural_visible(series, i, j),
        CriterionKind::Horizontal => horizontal_visible(series, i, j),
    }
}

/// Builds the visibility graph of `values` (first sample at tick `start`)
/// by sweeping rightward from every node. O(N^2) for either criterion.
///
/// The rightward sweep from `i` keeps the intermediate node that blocks the
/// most: the steepest chord seen so far (natural) or the tallest sample
/// (horizontal). A node is visible iff it clears that single blocker.
pub fn basic_build(start: TickIndex, values: &[f64], kind: CriterionKind) -> Result<VisibilityGraph> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len();
    let tick = |m: usize| start + m as TickIndex;
    let mut adjacency = vec![Vec::new(); n];
    let mut link = |i: usize, j: usize| {
        adjacency[i].push(j);
        adjacency[j].push(i);
    };
    for i in 0..n {
        let s_i = values[i];
        match kind {
            CriterionKind::Natural => {
                let mut blocker = i + 1;
                if blocker < n {
                    link(i, blocker);
                }
                for j in i + 2..n {
                    if below_chord(
                        tick(i),
                        s_i,
                        tick(blocker),
                        values[blocker],
                        tick(j),
                        values[j],
                    ) {
                        link(i, j);
                        blocker = j;
                    }
                }
            }
            CriterionKind::Horizontal => {
                let mut tallest = f64::NEG_INFINITY;
                for (j, &s_j) in values.iter().enumerate().skip(i + 1) {
                    if tallest < s_i.min(s_j) {
                        link(i, j);
                    }
                    if s_j >= s_i {
                        break;
                    }
                    tallest = tallest.max(s_j);
                }
            }
        }
    }
    Ok(VisibilityGraph::from_adjacency_lists(start, adjacency))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Pairwise evaluation of the predicates: O(N^3), independent of the
    /// sweep in `basic_build`.
    fn brute_force(values: &[f64], kind: CriterionKind) -> Vec<(u64, u64)> {
        let mut edges = Vec::new();
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                if visible(kind, values, i, j).unwrap() {
                    edges.push((i as u64, j as u64));
                }
            }
        }
        edges
    }

    #[test]
    fn natural_examples() {
        assert!(natural_visible(&[1.0, 2.0, 4.0], 0, 2).unwrap());
        // collinear middle point blocks under the strict inequality
        assert!(!natural_visible(&[1.0, 2.0, 3.0], 0, 2).unwrap());
        assert!(natural_visible(&[9.0, -3.0, 100.0], 1, 2).unwrap());
    }

    #[test]
    fn horizontal_examples() {
        assert!(horizontal_visible(&[3.0, 1.0, 2.0], 0, 2).unwrap());
        assert!(!horizontal_visible(&[1.0, 2.0, 4.0], 0, 2).unwrap());
        assert!(horizontal_visible(&[0.0, 5.0], 0, 1).unwrap());
        assert!(!horizontal_visible(&[2.0, 2.0, 2.0], 0, 2).unwrap());
    }

    #[test]
    fn predicate_errors() {
        let s = [1.0, 2.0, 3.0];
        assert!(matches!(natural_visible(&s, 2, 1), Err(Error::Ordering { .. })));
        assert!(matches!(horizontal_visible(&s, 1, 1), Err(Error::Ordering { .. })));
        assert!(matches!(natural_visible(&s, 0, 3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn basic_build_examples() {
        let s = [1.0, 2.0, 4.0];
        let nvg = basic_build(0, &s, CriterionKind::Natural).unwrap();
        assert_eq!(nvg.edges_sorted(), vec![(0, 1), (0, 2), (1, 2)]);
        let hvg = basic_build(0, &s, CriterionKind::Horizontal).unwrap();
        assert_eq!(hvg.edges_sorted(), vec![(0, 1), (1, 2)]);
        let single = basic_build(4, &[7.0], CriterionKind::Natural).unwrap();
        assert_eq!((single.node_count(), single.edge_count()), (1, 0));
        assert!(matches!(
            basic_build(0, &[], CriterionKind::Horizontal),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn basic_build_keys_by_absolute_index() {
        let g = basic_build(10, &[1.0, 2.0, 4.0], CriterionKind::Natural).unwrap();
        assert_eq!(g.edges_sorted(), vec![(10, 11), (10, 12), (11, 12)]);
    }

    #[test]
    fn criterion_parsing() {
        assert_eq!("NVG".parse::<CriterionKind>().unwrap(), CriterionKind::Natural);
        assert_eq!("hvg".parse::<CriterionKind>().unwrap(), CriterionKind::Horizontal);
        assert!("xvg".parse::<CriterionKind>().is_err());
    }

    fn small_ints() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0i32..6).prop_map(f64::from), 1..40)
    }

    fn reals() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, 1..60)
    }

    proptest! {
        #[test]
        fn sweep_matches_pairwise_on_ties(values in small_ints()) {
            for kind in [CriterionKind::Natural, CriterionKind::Horizontal] {
                let g = basic_build(0, &values, kind).unwrap();
                prop_assert!(g.check_invariants().is_ok());
                prop_assert_eq!(g.edge_count(), g.edges_sorted().len());
                prop_assert_eq!(g.edges_sorted(), brute_force(&values, kind));
            }
        }

        #[test]
        fn sweep_matches_pairwise_on_reals(values in reals()) {
            for kind in [CriterionKind::Natural, CriterionKind::Horizontal] {
                let g = basic_build(0, &values, kind).unwrap();
                prop_assert_eq!(g.edges_sorted(), brute_force(&values, kind));
            }
        }

        #[test]
        fn hvg_is_subgraph_of_nvg(values in prop::collection::vec(-10.0f64..10.0, 1..200)) {
            let nvg = basic_build(0, &values, CriterionKind::Natural).unwrap();
            let hvg = basic_build(0, &values, CriterionKind::Horizontal).unwrap();
            for (i, j) in hvg.edges_sorted() {
                prop_assert!(nvg.has_edge(i, j));
            }
            for m in 1..values.len() as u64 {
                prop_assert!(nvg.has_edge(m - 1, m) && hvg.has_edge(m - 1, m));
            }
        }

        #[test]
        fn deterministic(values in reals()) {
            let a = basic_build(0, &values, CriterionKind::Natural).unwrap();
            let b = basic_build(0, &values, CriterionKind::Natural).unwrap();
            prop_assert_eq!(a.edges_sorted(), b.edges_sorted());
        }
    }
}
