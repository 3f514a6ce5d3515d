//! Reference solvers for cross-validation: exhaustive cycle enumeration,
//! Lawler's binary search over λ, and Karp's minimum mean cycle for the
//! unit-time special case. Independent routes to the same value — the
//! parametric solver is validated against all of them.

use num_bigint::BigInt;
use num_traits::Zero;
use std::cmp::Ordering;

use crate::context::Counters;
use crate::graph::RatioGraph;
use crate::parametric::{
    check_instance, extract_solution, initial_interval, RatioSolution, SolveError,
};
use crate::rational::Rational;
use crate::sssp::compare_to_lambda_star_unchecked;

/// All simple directed cycles of a graph with their cost and time sums.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CycleEnumeration {
    pub cycles: Vec<(Vec<u32>, BigInt, BigInt)>,
}

/// Enumeration exceeded the caller's step budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cycle enumeration exceeded the step budget")]
pub struct BudgetExceeded;

/// Enumerates every simple directed cycle by DFS: a cycle is discovered
/// exactly once, rooted at its smallest vertex, so each vertex list comes
/// out rotated to start at its minimum. Parallel edges yield distinct
/// cycles. Each edge exploration costs one step against the budget.
pub fn enumerate_simple_cycles(
    g: &RatioGraph,
    budget: Option<u64>,
) -> Result<CycleEnumeration, BudgetExceeded> {
    let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); g.n];
    for (ix, e) in g.edges.iter().enumerate() {
        adj[e.src as usize].push((e.dst, ix as u32));
    }

    let mut out = CycleEnumeration::default();
    let mut steps = 0u64;
    let mut path: Vec<u32> = Vec::new();
    let mut path_edges: Vec<u32> = Vec::new();
    let mut on_path = vec![false; g.n];

    // Depth-first over edge paths with all vertices > root, recorded when an
    // edge closes back to the root.
    fn dfs(
        g: &RatioGraph,
        adj: &[Vec<(u32, u32)>],
        root: u32,
        v: u32,
        path: &mut Vec<u32>,
        path_edges: &mut Vec<u32>,
        on_path: &mut [bool],
        out: &mut CycleEnumeration,
        steps: &mut u64,
        budget: Option<u64>,
    ) -> Result<(), BudgetExceeded> {
        for &(w, eix) in &adj[v as usize] {
            *steps += 1;
            if let Some(b) = budget {
                if *steps > b {
                    return Err(BudgetExceeded);
                }
            }
            if w == root {
                path_edges.push(eix);
                let mut cost = BigInt::zero();
                let mut time = BigInt::zero();
                for &e in path_edges.iter() {
                    cost += &g.edges[e as usize].cost;
                    time += &g.edges[e as usize].time;
                }
                out.cycles.push((path.clone(), cost, time));
                path_edges.pop();
            } else if w > root && !on_path[w as usize] {
                path.push(w);
                path_edges.push(eix);
                on_path[w as usize] = true;
                dfs(
                    g, adj, root, w, path, path_edges, on_path, out, steps, budget,
                )?;
                on_path[w as usize] = false;
                path_edges.pop();
                path.pop();
            }
        }
        Ok(())
    }

    for root in 0..g.n as u32 {
        path.clear();
        path_edges.clear();
        path.push(root);
        on_path[root as usize] = true;
        dfs(
            g,
            &adj,
            root,
            root,
            &mut path,
            &mut path_edges,
            &mut on_path,
            &mut out,
            &mut steps,
            budget,
        )?;
        on_path[root as usize] = false;
    }
    Ok(out)
}

/// Brute force failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BruteError {
    #[error("graph has no directed cycle")]
    NoCycle,
    #[error("brute force is guarded to n <= 14, got n = {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Exact minimum ratio by enumerating all simple cycles. Guarded to
/// `n <= 14`; ties go to the lexicographically smallest vertex sequence
/// (already rotated to start at the smallest vertex).
pub fn brute_force_min_ratio(g: &RatioGraph) -> Result<RatioSolution, BruteError> {
    brute_force_min_ratio_budgeted(g, None)
}

/// [`brute_force_min_ratio`] with an interruptible step budget.
pub fn brute_force_min_ratio_budgeted(
    g: &RatioGraph,
    budget: Option<u64>,
) -> Result<RatioSolution, BruteError> {
    if g.n > 14 {
        return Err(BruteError::TooLarge(g.n));
    }
    let enumeration = enumerate_simple_cycles(g, budget)?;
    let mut best: Option<(Rational, &(Vec<u32>, BigInt, BigInt))> = None;
    for entry in &enumeration.cycles {
        let ratio = Rational::new(entry.1.clone(), entry.2.clone());
        let better = match &best {
            None => true,
            Some((r, held)) => match ratio.cmp(r) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => entry.0 < held.0,
            },
        };
        if better {
            best = Some((ratio, entry));
        }
    }
    let Some((lambda_star, (vertices, cost, time))) = best else {
        return Err(BruteError::NoCycle);
    };
    let mut cycle = vertices.clone();
    cycle.push(vertices[0]);
    Ok(RatioSolution {
        lambda_star,
        cycle,
        cost_sum: cost.clone(),
        time_sum: time.clone(),
        algorithm: "brute".to_string(),
        counters: Counters::default(),
    })
}

/// Simplest rational (minimum denominator) strictly inside an open
/// interval, by Stern-Brocot mediant descent in run-length form.
fn simplest_in_open(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "empty interval");
    let floor = lo.floor();
    let next_int = Rational::from_int(floor.clone() + 1);
    if next_int < *hi {
        return next_int; // an integer sits strictly inside
    }
    // Both endpoints share the unit interval [floor, floor + 1]; recurse on
    // the reciprocal of the fractional parts.
    let base = Rational::from_int(floor);
    let lo_frac = lo - &base;
    let hi_frac = hi - &base;
    debug_assert!(!lo_frac.is_negative() && !hi_frac.is_zero());
    if lo_frac.is_zero() {
        // Simplest in (0, hi_frac) is 1/q for the smallest q with
        // q > 1/hi_frac.
        let q = hi_frac.recip().floor() + 1;
        return base + Rational::new(BigInt::from(1), q);
    }
    let inner = simplest_in_open(&hi_frac.recip(), &lo_frac.recip());
    base + inner.recip()
}

/// Lawler's weakly polynomial baseline: bisect λ with the trichotomy oracle
/// until the interval can hold only one fraction with denominator at most
/// `n·Tmax`, then identify λ* as the simplest rational in the interval and
/// confirm it with one more oracle call.
pub fn lawler_binary_search(g: &RatioGraph) -> Result<RatioSolution, SolveError> {
    check_instance(g)?;
    let mut counters = Counters::default();
    let (mut lo, mut hi) = initial_interval(g);

    // Any cycle ratio has denominator at most n·Tmax, and two distinct such
    // fractions differ by more than (n·Tmax)^-2.
    let denom_bound = BigInt::from(g.n as u64) * g.max_time();
    debug_assert!(denom_bound > BigInt::zero());
    let resolution = Rational::new(BigInt::from(1), &denom_bound * &denom_bound);

    let oracle = |l: &Rational, counters: &mut Counters| {
        counters.oracle_calls += 1;
        compare_to_lambda_star_unchecked(g, l)
    };

    let mut star = None;
    while &hi - &lo > resolution {
        let mid = lo.midpoint(&hi);
        match oracle(&mid, &mut counters) {
            Ordering::Less => lo = mid,
            Ordering::Greater => hi = mid,
            Ordering::Equal => {
                star = Some(mid);
                break;
            }
        }
    }
    let lambda_star = match star {
        Some(s) => s,
        None => {
            let candidate = simplest_in_open(&lo, &hi);
            if oracle(&candidate, &mut counters) != Ordering::Equal {
                return Err(SolveError::Internal(format!(
                    "isolated candidate {} rejected by the oracle",
                    candidate
                )));
            }
            candidate
        }
    };
    extract_solution(g, lambda_star, "lawler", counters)
}

/// Karp failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KarpError {
    #[error("karp requires t(e) = 1 on every edge; edge {0} has t = {1}")]
    NonUnitTime(usize, BigInt),
    #[error("graph has no directed cycle")]
    NoCycle,
}

/// Karp's minimum mean cycle for unit transit times.
///
/// `D_k(v)` is the minimum cost of a walk with exactly `k` edges ending at
/// `v`, starting anywhere (`D_0 ≡ 0`); the minimum cycle mean is
/// `min_v max_k (D_n(v) − D_k(v)) / (n − k)` over finite entries.
pub fn karp_min_mean(g: &RatioGraph) -> Result<Rational, KarpError> {
    for (ix, e) in g.edges.iter().enumerate() {
        if e.time != BigInt::from(1) {
            return Err(KarpError::NonUnitTime(ix, e.time.clone()));
        }
    }
    let n = g.n;
    let mut table: Vec<Vec<Option<BigInt>>> = Vec::with_capacity(n + 1);
    table.push(vec![Some(BigInt::zero()); n]);
    for k in 1..=n {
        let mut row: Vec<Option<BigInt>> = vec![None; n];
        for e in &g.edges {
            if let Some(du) = &table[k - 1][e.src as usize] {
                let cand = du + &e.cost;
                let slot = &mut row[e.dst as usize];
                if slot.as_ref().is_none_or(|d| cand < *d) {
                    *slot = Some(cand);
                }
            }
        }
        table.push(row);
    }

    let mut best: Option<Rational> = None;
    for v in 0..n {
        let Some(dn) = &table[n][v] else { continue };
        let mut worst: Option<Rational> = None;
        for (k, row) in table.iter().enumerate().take(n) {
            let Some(dk) = &row[v] else { continue };
            let mean = Rational::new(dn - dk, BigInt::from((n - k) as u64));
            if worst.as_ref().is_none_or(|w| mean > *w) {
                worst = Some(mean);
            }
        }
        let worst = worst.expect("k = 0 row is always finite");
        if best.as_ref().is_none_or(|b| worst < *b) {
            best = Some(worst);
        }
    }
    best.ok_or(KarpError::NoCycle)
}
