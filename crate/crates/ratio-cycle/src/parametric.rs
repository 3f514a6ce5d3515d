//! Parametric search over exact rational λ.
//!
//! The negative cycle detector runs "generically" at the unknown optimum
//! λ*: weights are linear functions of λ, and every comparison batch is
//! resolved by collecting the roots of the compared differences, binary
//! searching among the in-interval roots with the trichotomy oracle, and
//! reading off signs on the root-free interval. The oracle is three-way
//! (below / at / above λ*), so λ* is detected exactly the moment some
//! comparison's root hits it — which provably happens during the final
//! potential check, where the critical cycle's edge comparisons vanish at
//! λ*. A runtime confirmation probe enforces that assumption instead of
//! trusting it.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::context::{BatchResolver, CmpCtx, Counters, Ext, LinearWeight, Weight};
use crate::graph::{
    substitute_lambda, symbolic_weights, validate, RatioGraph, ValidationReport, ViolationCode,
};
use crate::rational::Rational;
use crate::sssp::{
    compare_to_lambda_star_unchecked, detect_negative_cycle_verdict, min_weight_cycle_seq,
    mix_seed, CenterMode, MinCycleResult,
};

/// Hop bound choice for the parametric solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HopBound {
    /// `h = clamp(round(√n · m^{-1/4} · ln n), 1, n)`.
    Auto,
    Fixed(usize),
}

impl HopBound {
    pub fn resolve(self, n: usize, m: usize) -> usize {
        match self {
            HopBound::Fixed(h) => h.clamp(1, n + 1),
            HopBound::Auto => {
                let v = (n as f64).sqrt() * (m.max(1) as f64).powf(-0.25) * (n as f64).ln();
                (v.round() as isize).clamp(1, n.max(1) as isize) as usize
            }
        }
    }
}

/// Per-batch resolution statistics: distinct in-interval roots and oracle
/// probes spent on them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchStat {
    pub roots: usize,
    pub probes: usize,
}

/// The λ* search interval plus the trichotomy oracle.
///
/// Invariants: `lo < hi`, and λ* lies strictly inside `(lo, hi)` unless
/// `star` is set, in which case `star` equals λ*. Every oracle probe happens
/// strictly inside the interval at probe time.
pub struct ResolverState {
    lo: Rational,
    hi: Rational,
    star: Option<Rational>,
    oracle: Box<dyn FnMut(&Rational) -> Ordering>,
    /// Every probe performed, in order, with the oracle's answer.
    pub probe_log: Vec<(Rational, Ordering)>,
    pub batch_stats: Vec<BatchStat>,
    /// When set, finite comparisons are recorded for post-run agreement
    /// checks.
    pub log_comparisons: bool,
    pub cmp_log: Vec<(LinearWeight, LinearWeight, Ordering)>,
}

impl ResolverState {
    pub fn new(lo: Rational, hi: Rational, oracle: Box<dyn FnMut(&Rational) -> Ordering>) -> Self {
        assert!(lo < hi, "resolver interval must be nonempty");
        ResolverState {
            lo,
            hi,
            star: None,
            oracle,
            probe_log: Vec::new(),
            batch_stats: Vec::new(),
            log_comparisons: false,
            cmp_log: Vec::new(),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn star(&self) -> Option<&Rational> {
        self.star.as_ref()
    }

    fn probe(&mut self, r: &Rational, counters: &mut Counters) -> Ordering {
        debug_assert!(*r > self.lo && *r < self.hi, "probe outside the interval");
        let outcome = (self.oracle)(r);
        counters.oracle_calls += 1;
        self.probe_log.push((r.clone(), outcome));
        match outcome {
            Ordering::Less => self.lo = r.clone(),
            Ordering::Greater => self.hi = r.clone(),
            Ordering::Equal => self.star = Some(r.clone()),
        }
        outcome
    }
}

/// Resolves one batch of independent linear-weight comparisons at λ*.
///
/// Roots of differences with nonzero λ-coefficient that fall strictly inside
/// the current interval are sorted, deduplicated, and binary searched with
/// oracle probes (at most `⌈log2(R+1)⌉ + 1` for `R` roots). Afterwards the
/// interval is root-free, so each comparison's outcome is the sign of its
/// difference at the interval midpoint — equal to the sign at λ* — or the
/// exact sign at λ* once it is known.
pub fn resolve_batch(
    state: &mut ResolverState,
    counters: &mut Counters,
    pairs: &[(LinearWeight, LinearWeight)],
) -> Vec<Ordering> {
    if pairs.is_empty() {
        return Vec::new();
    }

    let mut roots: BTreeSet<Rational> = BTreeSet::new();
    if state.star.is_none() {
        for (x, y) in pairs {
            let d = x.sub(y);
            if !d.b.is_zero() {
                let root = &d.a / &d.b;
                if root > state.lo && root < state.hi {
                    roots.insert(root);
                }
            }
        }
    }
    let mut roots: Vec<Rational> = roots.into_iter().collect();
    let total_roots = roots.len();
    let mut probes = 0usize;
    while !roots.is_empty() && state.star.is_none() {
        let mid = roots.len() / 2;
        let r = roots[mid].clone();
        probes += 1;
        match state.probe(&r, counters) {
            Ordering::Less => {
                roots.drain(..=mid);
            }
            Ordering::Greater => {
                roots.truncate(mid);
            }
            Ordering::Equal => break,
        }
    }
    state.batch_stats.push(BatchStat {
        roots: total_roots,
        probes,
    });
    debug_assert!(
        total_roots == 0 || probes <= (usize::BITS - total_roots.leading_zeros()) as usize + 1,
        "probe budget exceeded: {} probes for {} roots",
        probes,
        total_roots
    );

    let at = match &state.star {
        Some(s) => s.clone(),
        None => state.lo.midpoint(&state.hi),
    };
    let outcomes: Vec<Ordering> = pairs
        .iter()
        .map(|(x, y)| x.sub(y).eval(&at).sign())
        .collect();
    if state.log_comparisons {
        for ((x, y), o) in pairs.iter().zip(&outcomes) {
            state.cmp_log.push((x.clone(), y.clone(), *o));
        }
    }
    outcomes
}

/// Sign of a linear weight at λ*, versus zero.
pub fn sign_at_star(
    state: &mut ResolverState,
    counters: &mut Counters,
    w: &LinearWeight,
) -> Ordering {
    resolve_batch(state, counters, &[(w.clone(), LinearWeight::zero())])[0]
}

/// Batch resolver running an algorithm generically at λ*.
///
/// Comparisons against the infinite sentinel and identical finite functions
/// resolve structurally; everything else goes through [`resolve_batch`].
pub struct ParametricResolver {
    state: ResolverState,
    slots: Vec<Slot>,
    pending: Vec<(LinearWeight, LinearWeight)>,
}

enum Slot {
    Done(Ordering),
    Pending(usize),
}

impl ParametricResolver {
    pub fn new(state: ResolverState) -> Self {
        ParametricResolver {
            state,
            slots: Vec::new(),
            pending: Vec::new(),
        }
    }

    pub fn state(&self) -> &ResolverState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut ResolverState {
        &mut self.state
    }

    pub fn into_state(self) -> ResolverState {
        self.state
    }
}

impl BatchResolver<LinearWeight> for ParametricResolver {
    fn submit(&mut self, x: &Ext<LinearWeight>, y: &Ext<LinearWeight>, _counters: &mut Counters) {
        let slot = match (x, y) {
            (Ext::Infinite, Ext::Infinite) => Slot::Done(Ordering::Equal),
            (Ext::Infinite, Ext::Finite(_)) => Slot::Done(Ordering::Greater),
            (Ext::Finite(_), Ext::Infinite) => Slot::Done(Ordering::Less),
            (Ext::Finite(a), Ext::Finite(b)) => {
                if a == b {
                    // Identical functions need no oracle work.
                    Slot::Done(Ordering::Equal)
                } else {
                    self.pending.push((a.clone(), b.clone()));
                    Slot::Pending(self.pending.len() - 1)
                }
            }
        };
        self.slots.push(slot);
    }

    fn flush(&mut self, counters: &mut Counters) -> Vec<Ordering> {
        let resolved = resolve_batch(&mut self.state, counters, &self.pending);
        let outcomes = self
            .slots
            .iter()
            .map(|slot| match slot {
                Slot::Done(o) => *o,
                Slot::Pending(ix) => resolved[*ix],
            })
            .collect();
        self.slots.clear();
        self.pending.clear();
        outcomes
    }
}

/// Comparison context running generically at λ*.
pub type ParametricCtx = CmpCtx<LinearWeight, ParametricResolver>;

fn bigint_string<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// A solved minimum ratio cycle instance.
#[derive(Clone, Debug, Serialize)]
pub struct RatioSolution {
    pub lambda_star: Rational,
    /// Witness cycle as a closed vertex walk (first id repeated at the end).
    pub cycle: Vec<u32>,
    #[serde(serialize_with = "bigint_string")]
    pub cost_sum: BigInt,
    #[serde(serialize_with = "bigint_string")]
    pub time_sum: BigInt,
    pub algorithm: String,
    pub counters: Counters,
}

/// Solver failure.
#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("graph has no directed cycle")]
    NoCycle,
    #[error("invalid instance: {}", format_violations(.0))]
    Invalid(ValidationReport),
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

fn format_violations(report: &ValidationReport) -> String {
    report
        .violations
        .iter()
        .map(|(code, msg)| format!("{:?}: {}", code, msg))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Validates and classifies an instance for the solvers.
pub(crate) fn check_instance(g: &RatioGraph) -> Result<(), SolveError> {
    let report = validate(g);
    if report.ok {
        return Ok(());
    }
    if report
        .violations
        .iter()
        .all(|(code, _)| *code == ViolationCode::Acyclic)
    {
        return Err(SolveError::NoCycle);
    }
    Err(SolveError::Invalid(report))
}

/// Initial search interval `(-(n·Cmax) − 1, n·Cmax + 1)`: any cycle has
/// total cost within `±n·Cmax` and transit time at least 1, so λ* lies
/// strictly inside.
pub(crate) fn initial_interval(g: &RatioGraph) -> (Rational, Rational) {
    let bound = Rational::from_int(BigInt::from(g.n as u64) * g.max_abs_cost() + 1);
    (-bound.clone(), bound)
}

/// Computes a minimum ratio cycle by parametric search.
///
/// Runs negative cycle detection generically at λ* under the chosen center
/// mode. In `Randomized` mode a failed generic run (detectable: λ* did not
/// surface) is retried with fresh center randomness up to three times, then
/// falls back to full centers, so the returned value is exact in every mode.
/// The witness cycle is extracted from `G_{λ*}`, whose minimum cycle weight
/// must be exactly zero.
pub fn parametric_min_ratio(
    g: &RatioGraph,
    hop: HopBound,
    mode: &CenterMode,
) -> Result<RatioSolution, SolveError> {
    check_instance(g)?;
    let algorithm = match mode {
        CenterMode::Randomized { .. } => "parametric-randomized",
        CenterMode::Greedy => "parametric-greedy",
        CenterMode::Full => "parametric-full",
    };
    let (lo, hi) = initial_interval(g);
    let h = hop.resolve(g.n, g.m());

    let oracle_graph = g.clone();
    let state = ResolverState::new(
        lo,
        hi,
        Box::new(move |l: &Rational| compare_to_lambda_star_unchecked(&oracle_graph, l)),
    );
    let sym = symbolic_weights(g);
    let mut ctx: ParametricCtx = CmpCtx::new(ParametricResolver::new(state));

    let attempts: Vec<CenterMode> = match mode {
        CenterMode::Full => vec![CenterMode::Full],
        CenterMode::Greedy => vec![CenterMode::Greedy],
        CenterMode::Randomized { seed, c } => (0..3)
            .map(|a| CenterMode::Randomized {
                seed: mix_seed(*seed, a),
                c: *c,
            })
            .chain(std::iter::once(CenterMode::Full))
            .collect(),
    };
    for attempt in &attempts {
        let _verdict = detect_negative_cycle_verdict(&mut ctx, &sym, h, attempt);
        if ctx.resolver().state().star.is_some() {
            break;
        }
        // λ* did not surface: the sampled centers missed some canonical
        // path. Detectable, so retry; never silently wrong.
    }

    let (resolver, mut counters) = ctx.into_resolver();
    let mut state = resolver.into_state();
    let lambda_star = match state.star.clone() {
        Some(s) => s,
        None => {
            // The potential check at λ* pins λ* as a probed root whenever
            // the generic run computed true distances; reaching this branch
            // means that argument failed. Confirm `lo` before giving up.
            let lo = state.lo.clone();
            let outcome = (state.oracle)(&lo);
            counters.oracle_calls += 1;
            state.probe_log.push((lo.clone(), outcome));
            if outcome == Ordering::Equal {
                lo
            } else {
                return Err(SolveError::Internal(format!(
                    "λ* did not surface during the generic run; interval ({}, {})",
                    state.lo, state.hi
                )));
            }
        }
    };

    extract_solution(g, lambda_star, algorithm, counters)
}

/// Builds a full solution from an externally determined λ*; fails when the
/// minimum cycle weight in `G_λ` is not exactly zero, i.e. when λ is not
/// actually λ*.
pub fn solution_at_lambda(
    g: &RatioGraph,
    lambda_star: Rational,
    algorithm: &str,
) -> Result<RatioSolution, SolveError> {
    check_instance(g)?;
    extract_solution(g, lambda_star, algorithm, Counters::default())
}

/// Builds the final solution from a known λ*: find a zero-weight cycle in
/// `G_{λ*}` and read off its cost and time sums.
pub(crate) fn extract_solution(
    g: &RatioGraph,
    lambda_star: Rational,
    algorithm: &str,
    counters: Counters,
) -> Result<RatioSolution, SolveError> {
    let reweighted = substitute_lambda(g, &lambda_star);
    let witness = match min_weight_cycle_seq(&reweighted) {
        Ok(MinCycleResult::Minimum(c)) => c,
        Ok(MinCycleResult::NegativeCycle(c)) => {
            return Err(SolveError::Internal(format!(
                "negative cycle of weight {} in G_λ* — λ* = {} is not optimal",
                c.value, lambda_star
            )));
        }
        Err(_) => return Err(SolveError::Internal("no cycle in G_λ*".into())),
    };
    if !witness.value.is_zero() {
        return Err(SolveError::Internal(format!(
            "minimum cycle weight at λ* = {} is {}, expected 0",
            lambda_star, witness.value
        )));
    }
    let mut cost_sum = BigInt::zero();
    let mut time_sum = BigInt::zero();
    for &eix in &witness.edges {
        cost_sum += &g.edges[eix as usize].cost;
        time_sum += &g.edges[eix as usize].time;
    }
    if Rational::new(cost_sum.clone(), time_sum.clone()) != lambda_star {
        return Err(SolveError::Internal(
            "witness cycle ratio does not reproduce λ*".into(),
        ));
    }
    Ok(RatioSolution {
        lambda_star,
        cycle: witness.cycle,
        cost_sum,
        time_sum,
        algorithm: algorithm.to_string(),
        counters,
    })
}
