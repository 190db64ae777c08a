//! Moving-window experiment harness: timing runs and oracle replay.
//!
//! A configuration is one (algorithm, series, window size) triple. Every
//! configuration starts on the first `N` samples and then slides `stride`
//! ticks per iteration. Offline algorithms rebuild the window's graph from
//! scratch on each iteration; online algorithms bootstrap once and then
//! advance tick by tick.
//!
//! Independent configurations run on the rayon pool when the `parallel`
//! feature is enabled and the config asks for it. A single configuration
//! always runs on one thread.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::criteria::{basic_build, CriterionKind};
use crate::error::{Error, Result};
use crate::gen::{generate, GeneratorSpec};
use crate::graph::{Edge, TickIndex, VisibilityGraph, Window};
use crate::io::{Measure, TimingRecord};
use crate::offline::{dc_build, lt_build_hvg, BootstrapChoice};
use crate::online::{OnlineAlgorithm, OnlineState};

/// Window sizes of the synthetic-series experiment.
pub const SYNTHETIC_WINDOWS: [usize; 9] = [10, 50, 100, 250, 500, 750, 1000, 1500, 2000];
/// Window sizes of the real-world-series experiment.
pub const REAL_WORLD_WINDOWS: [usize; 3] = [10, 50, 100];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Basic(CriterionKind),
    DivideAndConquer(CriterionKind),
    MonotonicStack,
    Online(OnlineAlgorithm),
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Basic(CriterionKind::Natural),
        Algorithm::Basic(CriterionKind::Horizontal),
        Algorithm::DivideAndConquer(CriterionKind::Natural),
        Algorithm::DivideAndConquer(CriterionKind::Horizontal),
        Algorithm::MonotonicStack,
        Algorithm::Online(OnlineAlgorithm::LotNvg),
        Algorithm::Online(OnlineAlgorithm::LotHvg),
        Algorithm::Online(OnlineAlgorithm::LotHvgMsOpt),
    ];

    pub fn criterion(self) -> CriterionKind {
        match self {
            Algorithm::Basic(k) | Algorithm::DivideAndConquer(k) => k,
            Algorithm::MonotonicStack => CriterionKind::Horizontal,
            Algorithm::Online(a) => a.criterion(),
        }
    }

    pub fn is_online(self) -> bool {
        matches!(self, Algorithm::Online(_))
    }

    pub fn name(self) -> String {
        match self {
            Algorithm::Basic(k) => format!("Basic-{}", k.short_name().to_uppercase()),
            Algorithm::DivideAndConquer(k) => format!("DC-{}", k.short_name().to_uppercase()),
            Algorithm::MonotonicStack => "LT".to_string(),
            Algorithm::Online(a) => a.name().to_string(),
        }
    }

    /// Builds the graph of one window from scratch (offline algorithms).
    fn rebuild(self, start: TickIndex, values: &[f64]) -> Result<VisibilityGraph> {
        match self {
            Algorithm::Basic(k) => basic_build(start, values, k),
            Algorithm::DivideAndConquer(k) => dc_build(start, values, k),
            Algorithm::MonotonicStack => lt_build_hvg(start, values),
            Algorithm::Online(_) => unreachable!("online algorithms do not rebuild"),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase().replace('_', "-");
        if let Ok(online) = lower.parse::<OnlineAlgorithm>() {
            return Ok(Algorithm::Online(online));
        }
        match lower.as_str() {
            "lt" => return Ok(Algorithm::MonotonicStack),
            "basic" | "dc" => {
                return Err(Error::InvalidChoice(format!(
                    "{s:?} needs a criterion suffix, e.g. {lower}-nvg or {lower}-hvg"
                )))
            }
            _ => {}
        }
        let (base, crit) = lower
            .split_once('-')
            .ok_or_else(|| Error::InvalidChoice(format!("unknown algorithm {s:?}")))?;
        let kind: CriterionKind = crit.parse()?;
        match base {
            "basic" => Ok(Algorithm::Basic(kind)),
            "dc" => Ok(Algorithm::DivideAndConquer(kind)),
            _ => Err(Error::InvalidChoice(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedSeries {
    pub name: String,
    pub values: Vec<f64>,
}

impl NamedSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }

    pub fn generated(spec: &GeneratorSpec) -> Result<Self> {
        Ok(Self::new(spec.kind.name(), generate(spec)?))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub series: Vec<NamedSeries>,
    pub windows: Vec<usize>,
    pub iterations: usize,
    pub repeats: usize,
    /// Ticks per iteration.
    pub stride: usize,
    pub measure: Measure,
    /// Count the first window's offline build in online timings.
    pub include_bootstrap: bool,
    /// Run independent configurations concurrently.
    pub parallel: bool,
}

impl BenchConfig {
    pub fn new(algorithms: Vec<Algorithm>, series: Vec<NamedSeries>, windows: Vec<usize>) -> Self {
        Self {
            algorithms,
            series,
            windows,
            iterations: 100,
            repeats: 5,
            stride: 1,
            measure: Measure::Mean,
            include_bootstrap: false,
            parallel: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.algorithms.is_empty() || self.series.is_empty() || self.windows.is_empty() {
            return fail("algorithms, series and windows must all be non-empty".into());
        }
        if self.iterations == 0 || self.repeats == 0 || self.stride == 0 {
            return fail("iterations, repeats and stride must be at least 1".into());
        }
        let slide = self.iterations * self.stride;
        for s in &self.series {
            for &n in &self.windows {
                if n == 0 {
                    return fail("window size must be at least 1".into());
                }
                if n + slide > s.values.len() {
                    return fail(format!(
                        "series {:?} has {} samples; window {n} plus {} iterations of stride {} needs {}",
                        s.name,
                        s.values.len(),
                        self.iterations,
                        self.stride,
                        n + slide
                    ));
                }
            }
        }
        Ok(())
    }

    fn jobs(&self) -> Vec<Job<'_>> {
        let mut jobs = Vec::new();
        for &algorithm in &self.algorithms {
            for series in &self.series {
                for &window in &self.windows {
                    jobs.push(Job {
                        algorithm,
                        series,
                        window,
                    });
                }
            }
        }
        jobs
    }
}

#[derive(Clone, Copy)]
struct Job<'a> {
    algorithm: Algorithm,
    series: &'a NamedSeries,
    window: usize,
}

fn run_jobs<'a, T, F>(jobs: &[Job<'a>], parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Job<'a>) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return jobs.par_iter().map(f).collect();
    }
    let _ = parallel;
    jobs.iter().map(f).collect()
}

/// One timing record plus how many timed regions fed it.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub record: TimingRecord,
    /// Number of stopwatch laps, one per iteration (plus one when the
    /// bootstrap is included).
    pub laps: usize,
}

#[derive(Default)]
struct Stopwatch {
    elapsed: Duration,
    laps: usize,
}

impl Stopwatch {
    #[inline]
    fn time<T>(&mut self, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        self.elapsed += t0.elapsed();
        self.laps += 1;
        out
    }
}

/// Times every configuration `repeats` times.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<TimingRecord>> {
    Ok(run_benchmark_detailed(config)?
        .into_iter()
        .map(|m| m.record)
        .collect())
}

pub fn run_benchmark_detailed(config: &BenchConfig) -> Result<Vec<Measurement>> {
    config.validate()?;
    let per_job = run_jobs(&config.jobs(), config.parallel, |job| {
        (1..=config.repeats)
            .map(|repeat| time_once(config, job, repeat))
            .collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::new();
    for records in per_job {
        out.extend(records?);
    }
    Ok(out)
}

fn time_once(config: &BenchConfig, job: &Job<'_>, repeat: usize) -> Result<Measurement> {
    let values = &job.series.values;
    let n = job.window;
    let mut watch = Stopwatch::default();

    match job.algorithm {
        Algorithm::Online(algorithm) => {
            let choice = BootstrapChoice::default_for(algorithm.criterion());
            let first = Window::from_values(0, &values[..n])?;
            let mut state = if config.include_bootstrap {
                watch.time(|| OnlineState::init(first, algorithm, choice))?
            } else {
                OnlineState::init(first, algorithm, choice)?
            };
            let mut next = n;
            for _ in 0..config.iterations {
                let ticks = &values[next..next + config.stride];
                watch.time(|| -> Result<()> {
                    for &v in ticks {
                        state.advance(v)?;
                    }
                    Ok(())
                })?;
                next += config.stride;
            }
        }
        offline => {
            for it in 1..=config.iterations {
                let start = it * config.stride;
                let window = &values[start..start + n];
                let graph = watch.time(|| offline.rebuild(start as TickIndex, window))?;
                drop(graph);
            }
        }
    }

    let total = watch.elapsed.as_secs_f64();
    let seconds = match config.measure {
        Measure::Total => total,
        Measure::Mean => total / config.iterations as f64,
    };
    Ok(Measurement {
        record: TimingRecord {
            algorithm: job.algorithm.name(),
            series: job.series.name.clone(),
            window: n,
            repeat,
            measure: config.measure,
            seconds,
        },
        laps: watch.laps,
    })
}

/// Anything that maintains the visibility graph of a sliding window.
pub trait SlidingBuilder {
    fn criterion(&self) -> CriterionKind;
    fn graph(&self) -> &VisibilityGraph;
    /// Drops the oldest sample and appends `value`.
    fn slide(&mut self, value: f64) -> Result<()>;
}

impl SlidingBuilder for OnlineState {
    fn criterion(&self) -> CriterionKind {
        OnlineState::criterion(self)
    }

    fn graph(&self) -> &VisibilityGraph {
        OnlineState::graph(self)
    }

    fn slide(&mut self, value: f64) -> Result<()> {
        self.advance(value).map(|_| ())
    }
}

impl<T: SlidingBuilder + ?Sized> SlidingBuilder for Box<T> {
    fn criterion(&self) -> CriterionKind {
        (**self).criterion()
    }

    fn graph(&self) -> &VisibilityGraph {
        (**self).graph()
    }

    fn slide(&mut self, value: f64) -> Result<()> {
        (**self).slide(value)
    }
}

/// Offline algorithm wrapped as a sliding builder: rebuilds on every slide.
pub struct Rebuilder {
    algorithm: Algorithm,
    window: Window,
    graph: VisibilityGraph,
}

impl Rebuilder {
    pub fn new(algorithm: Algorithm, start: TickIndex, values: &[f64]) -> Result<Self> {
        if algorithm.is_online() {
            return Err(Error::InvalidChoice(format!("{algorithm} is not an offline builder")));
        }
        let window = Window::from_values(start, values)?;
        let graph = algorithm.rebuild(start, values)?;
        Ok(Self {
            algorithm,
            window,
            graph,
        })
    }
}

impl SlidingBuilder for Rebuilder {
    fn criterion(&self) -> CriterionKind {
        self.algorithm.criterion()
    }

    fn graph(&self) -> &VisibilityGraph {
        &self.graph
    }

    fn slide(&mut self, value: f64) -> Result<()> {
        self.window.pop_oldest();
        self.window.push(value)?;
        self.graph = self
            .algorithm
            .rebuild(self.window.start_index(), &self.window.to_vec())?;
        Ok(())
    }
}

/// Builds the sliding builder a configuration exercises.
pub fn sliding_builder(
    algorithm: Algorithm,
    start: TickIndex,
    values: &[f64],
) -> Result<Box<dyn SlidingBuilder + Send>> {
    Ok(match algorithm {
        Algorithm::Online(a) => Box::new(OnlineState::from_values(start, values, a)?),
        offline => Box::new(Rebuilder::new(offline, start, values)?),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    /// Tick of the window's first sample.
    pub window_start: TickIndex,
    pub values: Vec<f64>,
    /// Edges the oracle has but the builder lacks.
    pub missing: Vec<Edge>,
    /// Edges the builder has but the oracle lacks.
    pub extra: Vec<Edge>,
    /// Set when the builder returned an error instead of a graph.
    pub error: Option<String>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "window starting at tick {}: {:?}", self.window_start, self.values)?;
        if let Some(e) = &self.error {
            writeln!(f, "  error: {e}")?;
        }
        writeln!(f, "  missing edges: {:?}", self.missing)?;
        write!(f, "  extra edges:   {:?}", self.extra)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigOutcome {
    pub algorithm: String,
    pub series: String,
    pub window: usize,
    /// Windows compared against the oracle, including the first.
    pub windows_checked: usize,
    pub failure: Option<Counterexample>,
}

impl ConfigOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EquivalenceReport {
    pub outcomes: Vec<ConfigOutcome>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(ConfigOutcome::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConfigOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }

    pub fn windows_checked(&self) -> usize {
        self.outcomes.iter().map(|o| o.windows_checked).sum()
    }
}

/// Replays every configuration and compares each window's graph with the
/// oracle. Repeats, measure and bootstrap flags are ignored.
pub fn verify_equivalence(config: &BenchConfig) -> Result<EquivalenceReport> {
    config.validate()?;
    let outcomes = run_jobs(&config.jobs(), config.parallel, |job| {
        verify_with(
            &job.algorithm.name(),
            job.series,
            job.window,
            config.iterations,
            config.stride,
            |start, values| sliding_builder(job.algorithm, start, values),
        )
    });
    Ok(EquivalenceReport { outcomes })
}

/// Replays one configuration with a caller-supplied builder.
pub fn verify_with<B, F>(
    label: &str,
    series: &NamedSeries,
    window: usize,
    iterations: usize,
    stride: usize,
    make: F,
) -> ConfigOutcome
where
    B: SlidingBuilder,
    F: FnOnce(TickIndex, &[f64]) -> Result<B>,
{
    let mut outcome = ConfigOutcome {
        algorithm: label.to_string(),
        series: series.name.clone(),
        window,
        windows_checked: 0,
        failure: None,
    };
    let values = &series.values;
    let fail = |start: usize, error: Option<String>, missing, extra| Counterexample {
        window_start: start as TickIndex,
        values: values[start..(start + window).min(values.len())].to_vec(),
        missing,
        extra,
        error,
    };

    let mut builder = match make(0, &values[..window]) {
        Ok(b) => b,
        Err(e) => {
            outcome.failure = Some(fail(0, Some(e.to_string()), vec![], vec![]));
            return outcome;
        }
    };
    let mut start = 0usize;
    for it in 0..=iterations {
        if it > 0 {
            for k in 0..stride {
                if let Err(e) = builder.slide(values[start + window + k]) {
                    outcome.failure = Some(fail(start + k + 1, Some(e.to_string()), vec![], vec![]));
                    return outcome;
                }
            }
            start += stride;
        }
        let current = &values[start..start + window];
        let oracle = basic_build(start as TickIndex, current, builder.criterion())
            .expect("non-empty window")
            .edges_sorted();
        let got = builder.graph().edges_sorted();
        outcome.windows_checked += 1;
        let nodes_ok = builder.graph().node_count() == window
            && builder.graph().contains_node(start as TickIndex)
            && builder.graph().contains_node((start + window - 1) as TickIndex);
        if got != oracle || !nodes_ok {
            let (missing, extra) = symmetric_difference(&oracle, &got);
            let error = (!nodes_ok).then(|| "graph node set differs from window".to_string());
            outcome.failure = Some(fail(start, error, missing, extra));
            return outcome;
        }
    }
    outcome
}

/// `(a \ b, b \ a)` for sorted edge lists.
pub fn symmetric_difference(a: &[Edge], b: &[Edge]) -> (Vec<Edge>, Vec<Edge>) {
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => {
                only_a.push(a[x]);
                x += 1;
            }
            std::cmp::Ordering::Greater => {
                only_b.push(b[y]);
                y += 1;
            }
            std::cmp::Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    only_a.extend_from_slice(&a[x..]);
    only_b.extend_from_slice(&b[y..]);
    (only_a, only_b)
}
