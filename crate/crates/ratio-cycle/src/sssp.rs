//! Hitting-set based SSSP, potential checking, negative cycle detection,
//! and the sequential minimum weight cycle oracle.
//!
//! The SSSP algorithm stitches `h`-hop Bellman-Ford segments through a small
//! center graph: run `h`-hop Bellman-Ford from every center, close the
//! complete center graph by min-plus squaring, and take per-target minima.
//! Negative cycle detection follows from it: distances from a super-source
//! form a valid potential exactly when no negative cycle exists, and a
//! potential is machine-checkable edge by edge.
//!
//! The sequential oracle compares a concrete λ against λ* through the sign
//! of the minimum cycle weight in `G_λ`; internally it scales the rational
//! weights to integers (64-bit when they fit, big integers otherwise), which
//! keeps parametric probes cheap.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use std::cmp::Ordering;

use crate::context::{BatchResolver, CmpCtx, Ext, Weight};
use crate::graph::{Digraph, RatioGraph, WeightedDigraph};
use crate::hitting::{build_path_family, greedy_hitting_set, sample_centers, CenterSet};
use crate::hop::{apsp_repeated_squaring, batched_tournament, bellman_ford_hop_multi, DistMatrix};
use crate::rational::Rational;

/// Center selection strategy for the detection pipeline.
#[derive(Clone, Debug, PartialEq)]
pub enum CenterMode {
    /// Sample centers randomly (one-sided error); `c` is the oversampling
    /// constant of the size bound.
    Randomized { seed: u64, c: f64 },
    /// Deterministic: cover the canonical half-hop path family greedily.
    Greedy,
    /// Centers are all vertices; always correct, no speedup.
    Full,
}

/// Output of the hitting-set SSSP: per-target distance values `δ(t)` and the
/// center realizing each minimum (for walk reconstruction).
#[derive(Clone, Debug)]
pub struct SsspResult<W> {
    pub source: u32,
    pub delta: Vec<Ext<W>>,
    pub cert: Vec<Option<u32>>,
}

/// Adds a super-source with a zero-weight edge to every existing vertex.
/// The new vertex gets id `n`; original edges keep their indices.
pub fn add_super_source<W: Weight>(g: &Digraph<W>) -> Digraph<W> {
    let mut edges = g.edges.clone();
    edges.extend((0..g.n as u32).map(|v| (g.n as u32, v, W::zero())));
    Digraph { n: g.n + 1, edges }
}

/// Hitting-set based single-source shortest paths.
///
/// Computes `δ(t) = min over x in centers ∪ {source}` of
/// `d_H(source, x) + d^h(x, t)`, where `H` is the complete digraph on the
/// centers weighted by `h`-hop distances and closed by min-plus squaring.
/// When the graph has no negative cycle and the centers hit every canonical
/// half-hop path, `δ` equals the true distances; otherwise the caller
/// verifies the output through a potential check.
pub fn hitting_set_sssp<W, R>(
    ctx: &mut CmpCtx<W, R>,
    g: &Digraph<W>,
    source: u32,
    centers: &CenterSet,
    h: usize,
) -> SsspResult<W>
where
    W: Weight,
    R: BatchResolver<W>,
{
    assert!(h >= 1 && h <= g.n, "hop bound out of range");
    let mut xs: Vec<u32> = centers.members.clone();
    if let Err(pos) = xs.binary_search(&source) {
        xs.insert(pos, source);
    }

    let tables = bellman_ford_hop_multi(ctx, g, &xs, h);

    // Center graph H: w_H(x, y) = d^h(x, y), infinite entries allowed.
    let k = xs.len();
    let mut entries = Vec::with_capacity(k * k);
    for table in &tables {
        for &y in &xs {
            entries.push(table.dist[y as usize].clone());
        }
    }
    ctx.counters_mut().add_work((k * k) as u64);
    let center_graph = DistMatrix {
        order: xs.clone(),
        entries,
    };
    let closure = apsp_repeated_squaring(ctx, &center_graph);
    let s_pos = xs.binary_search(&source).expect("source is a center");

    // δ(t) as one batched tournament over centers, per target.
    ctx.parallel_step();
    let mut alive: Vec<Vec<u32>> = Vec::with_capacity(g.n);
    for t in 0..g.n {
        let ids: Vec<u32> = (0..k as u32)
            .filter(|&xi| {
                closure.get(s_pos, xi as usize).is_finite()
                    && tables[xi as usize].dist[t].is_finite()
            })
            .collect();
        ctx.counters_mut().add_work(ids.len() as u64);
        alive.push(ids);
    }
    let mut eval = |t: usize, xi: u32| -> Ext<W> {
        closure
            .get(s_pos, xi as usize)
            .add(&tables[xi as usize].dist[t])
    };
    // Ties prefer the earlier center in sorted order.
    let mut tie = |_t: usize, a: u32, b: u32| a.cmp(&b);
    let winners = batched_tournament(ctx, &mut alive, &mut eval, &mut tie);

    let mut delta = Vec::with_capacity(g.n);
    let mut cert = Vec::with_capacity(g.n);
    for (t, w) in winners.iter().enumerate() {
        match w {
            Some(xi) => {
                delta.push(eval(t, *xi));
                cert.push(Some(xs[*xi as usize]));
            }
            None => {
                delta.push(Ext::Infinite);
                cert.push(None);
            }
        }
    }
    SsspResult {
        source,
        delta,
        cert,
    }
}

/// Result of checking a potential function edge by edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialCheck {
    pub ok: bool,
    /// Lowest-index edge with `p(u) + w(u,v) < p(v)`, if any.
    pub violated_edge: Option<usize>,
}

/// Tests `p(u) + w(u, v) >= p(v)` for every edge, in one comparison batch.
pub fn check_potential<W, R>(ctx: &mut CmpCtx<W, R>, g: &Digraph<W>, p: &[Ext<W>]) -> PotentialCheck
where
    W: Weight,
    R: BatchResolver<W>,
{
    assert!(
        p.iter().take(g.n).all(|x| x.is_finite()),
        "potential must be finite"
    );
    ctx.parallel_step();
    ctx.batch_begin().expect("potential check batch");
    for (u, v, w) in &g.edges {
        let lhs = p[*u as usize].add(&Ext::Finite(w.clone()));
        ctx.counters_mut().add_work(1);
        ctx.defer(&lhs, &p[*v as usize]);
    }
    let outcomes = ctx.batch_end().expect("potential check batch");
    let violated_edge = outcomes.iter().position(|o| *o == Ordering::Less);
    PotentialCheck {
        ok: violated_edge.is_none(),
        violated_edge,
    }
}

/// Verdict of negative cycle detection with its certificate: a violated
/// edge when a negative cycle was detected, a valid potential otherwise.
#[derive(Clone, Debug, Serialize)]
pub struct NegCycleVerdict<W> {
    pub has_negative_cycle: bool,
    /// `(src, dst, edge index)` of the lowest-index violated edge.
    pub violated_edge: Option<(u32, u32, usize)>,
    pub potential: Option<Vec<W>>,
    pub centers: CenterSet,
}

fn select_centers<W, R>(
    ctx: &mut CmpCtx<W, R>,
    g: &Digraph<W>,
    h: usize,
    mode: &CenterMode,
) -> CenterSet
where
    W: Weight,
    R: BatchResolver<W>,
{
    match mode {
        CenterMode::Full => CenterSet::full(g.n),
        CenterMode::Randomized { seed, c } => {
            for attempt in 0..3u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(*seed, attempt));
                match sample_centers(g.n, h, *c, &mut rng) {
                    Ok(centers) => return centers,
                    Err(_) => continue, // unlucky draw; retry with fresh randomness
                }
            }
            CenterSet::full(g.n)
        }
        CenterMode::Greedy => {
            let half = h / 2;
            let sources: Vec<u32> = (0..g.n as u32).collect();
            let tables = bellman_ford_hop_multi(ctx, g, &sources, half);
            let family = build_path_family(&tables, half);
            greedy_hitting_set(&family, g.n)
        }
    }
}

pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 step, enough to decorrelate retry streams.
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Negative cycle detection via super-source SSSP and a potential check.
///
/// "No negative cycle" verdicts ship a valid potential and are always
/// correct. "Negative cycle" verdicts are correct in `Full` and `Greedy`
/// modes; in `Randomized` mode an unlucky center sample can produce a false
/// positive (never a false negative), which the caller detects through the
/// certificate.
pub fn detect_negative_cycle_verdict<W, R>(
    ctx: &mut CmpCtx<W, R>,
    g: &Digraph<W>,
    h: usize,
    mode: &CenterMode,
) -> NegCycleVerdict<W>
where
    W: Weight,
    R: BatchResolver<W>,
{
    let with_source = add_super_source(g);
    let h = h.clamp(1, with_source.n);
    let centers = select_centers(ctx, &with_source, h, mode);
    let sssp = hitting_set_sssp(ctx, &with_source, g.n as u32, &centers, h);
    let p: Vec<Ext<W>> = sssp.delta[..g.n].to_vec();
    let check = check_potential(ctx, g, &p);
    match check.violated_edge {
        Some(ix) => NegCycleVerdict {
            has_negative_cycle: true,
            violated_edge: Some((g.edges[ix].0, g.edges[ix].1, ix)),
            potential: None,
            centers,
        },
        None => NegCycleVerdict {
            has_negative_cycle: false,
            violated_edge: None,
            potential: Some(
                p.into_iter()
                    .map(|x| match x {
                        Ext::Finite(w) => w,
                        Ext::Infinite => unreachable!("super-source reaches everything"),
                    })
                    .collect(),
            ),
            centers,
        },
    }
}

/// Boolean form of [`detect_negative_cycle_verdict`].
pub fn detect_negative_cycle<W, R>(
    ctx: &mut CmpCtx<W, R>,
    g: &Digraph<W>,
    h: usize,
    mode: &CenterMode,
) -> bool
where
    W: Weight,
    R: BatchResolver<W>,
{
    detect_negative_cycle_verdict(ctx, g, h, mode).has_negative_cycle
}

/// A closed walk and its total weight.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleResult {
    pub value: Rational,
    /// Vertex ids of the closed walk; first equals last.
    pub cycle: Vec<u32>,
    /// Edge indices along the walk.
    #[serde(skip)]
    pub edges: Vec<u32>,
}

/// Outcome of the sequential minimum weight cycle computation.
#[derive(Clone, Debug, PartialEq)]
pub enum MinCycleResult {
    /// The graph contains a negative cycle; carries one explicit witness.
    NegativeCycle(CycleResult),
    /// No negative cycle; carries the exact minimum weight cycle.
    Minimum(CycleResult),
}

impl MinCycleResult {
    pub fn value(&self) -> &Rational {
        match self {
            MinCycleResult::NegativeCycle(c) | MinCycleResult::Minimum(c) => &c.value,
        }
    }

    pub fn into_cycle(self) -> CycleResult {
        match self {
            MinCycleResult::NegativeCycle(c) | MinCycleResult::Minimum(c) => c,
        }
    }
}

/// The graph has no directed cycle at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("graph has no directed cycle")]
pub struct NoCycleError;

// ---------------------------------------------------------------------------
// Scaled-integer core. Weight arithmetic for the sequential routines runs on
// integers after clearing denominators: exact, and cheap in the common case.
// ---------------------------------------------------------------------------

trait IntWeight: Clone + Ord + std::fmt::Debug + Zero {
    fn add_ref(&self, rhs: &Self) -> Self;
}

impl IntWeight for i64 {
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
}

impl IntWeight for BigInt {
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
}

struct ScaledGraph<T> {
    n: usize,
    edges: Vec<(u32, u32, T)>,
}

/// Bellman-Ford from an implicit super-source (all distances start at 0).
/// Returns a negative cycle as `(vertices, edges)` with first vertex
/// repeated at the end, or `None` if none exists.
fn find_negative_cycle<T: IntWeight>(g: &ScaledGraph<T>) -> Option<(Vec<u32>, Vec<u32>)> {
    let n = g.n;
    if n == 0 {
        return None;
    }
    let mut dist: Vec<T> = vec![T::zero(); n];
    let mut parent: Vec<Option<(u32, u32)>> = vec![None; n];
    for round in 0..n {
        let mut improved = None;
        for (ix, (u, v, w)) in g.edges.iter().enumerate() {
            let cand = dist[*u as usize].add_ref(w);
            if cand < dist[*v as usize] {
                dist[*v as usize] = cand;
                parent[*v as usize] = Some((*u, ix as u32));
                improved = Some(*v);
            }
        }
        let Some(mut v) = improved else { return None };
        if round == n - 1 {
            // An improvement in round n means the predecessor graph holds a
            // negative cycle; walk back n steps to land inside it.
            for _ in 0..n {
                v = parent[v as usize].expect("improved vertex has a parent").0;
            }
            let mut cycle_rev = vec![v];
            let mut edges_rev = Vec::new();
            let mut cur = v;
            loop {
                let (pred, eix) = parent[cur as usize].expect("cycle vertex has a parent");
                edges_rev.push(eix);
                cycle_rev.push(pred);
                cur = pred;
                if cur == v {
                    break;
                }
            }
            cycle_rev.reverse();
            edges_rev.reverse();
            return Some((cycle_rev, edges_rev));
        }
    }
    None
}

/// Fixpoint Bellman-Ford from one source on a graph known to have no
/// negative cycle. Returns per-vertex distance and parent `(pred, edge)`.
#[allow(clippy::type_complexity)]
fn sssp_fixpoint<T: IntWeight>(
    g: &ScaledGraph<T>,
    source: u32,
) -> (Vec<Option<T>>, Vec<Option<(u32, u32)>>) {
    let n = g.n;
    let mut dist: Vec<Option<T>> = vec![None; n];
    let mut parent: Vec<Option<(u32, u32)>> = vec![None; n];
    dist[source as usize] = Some(T::zero());
    for _ in 0..n {
        let mut changed = false;
        for (ix, (u, v, w)) in g.edges.iter().enumerate() {
            let Some(du) = &dist[*u as usize] else {
                continue;
            };
            let cand = du.add_ref(w);
            let better = match &dist[*v as usize] {
                None => true,
                Some(dv) => cand < *dv,
            };
            if better {
                dist[*v as usize] = Some(cand);
                parent[*v as usize] = Some((*u, ix as u32));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (dist, parent)
}

/// Sign of the minimum cycle weight: `Less` when it is negative, `Equal`
/// at zero, `Greater` when positive, or `None` for an acyclic graph.
fn min_cycle_sign<T: IntWeight>(g: &ScaledGraph<T>) -> Option<Ordering> {
    if find_negative_cycle(g).is_some() {
        return Some(Ordering::Less);
    }
    let mut best: Option<T> = None;
    let dist_from: Vec<Vec<Option<T>>> = (0..g.n as u32).map(|v| sssp_fixpoint(g, v).0).collect();
    for (u, v, w) in &g.edges {
        if let Some(back) = &dist_from[*v as usize][*u as usize] {
            let total = w.add_ref(back);
            if best.as_ref().is_none_or(|b| total < *b) {
                best = Some(total);
            }
        }
    }
    best.map(|b| b.cmp(&T::zero()))
}

/// Minimum weight cycle with witness on a scaled-integer graph.
fn min_weight_cycle_scaled<T: IntWeight>(
    g: &ScaledGraph<T>,
) -> Result<(Vec<u32>, Vec<u32>, bool), NoCycleError> {
    if let Some((cycle, edges)) = find_negative_cycle(g) {
        return Ok((cycle, edges, true));
    }
    let mut runs = Vec::with_capacity(g.n);
    for v in 0..g.n as u32 {
        runs.push(sssp_fixpoint(g, v));
    }
    let mut best: Option<(T, usize)> = None;
    for (ix, (u, v, w)) in g.edges.iter().enumerate() {
        if let Some(back) = &runs[*v as usize].0[*u as usize] {
            let total = w.add_ref(back);
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, ix));
            }
        }
    }
    let Some((_, eix)) = best else {
        return Err(NoCycleError);
    };
    let (u, v, _) = &g.edges[eix];
    // Path v -> u from the fixpoint run sourced at v, then close with e.
    let parents = &runs[*v as usize].1;
    let mut path_rev = vec![*u];
    let mut path_edges_rev = Vec::new();
    let mut cur = *u;
    while cur != *v {
        let (pred, pe) = parents[cur as usize].expect("reachable vertex has a parent");
        path_rev.push(pred);
        path_edges_rev.push(pe);
        cur = pred;
    }
    path_rev.reverse();
    path_edges_rev.reverse();
    let mut cycle = vec![*u];
    cycle.extend(path_rev); // v, ..., u
    let mut edges = vec![eix as u32];
    edges.extend(path_edges_rev);
    Ok((cycle, edges, false))
}

/// Clears denominators: returns integer weights `w_i · lcm(denominators)`
/// and the common denominator.
fn scale_weights(weights: &[&Rational]) -> (Vec<BigInt>, BigInt) {
    let mut denom = BigInt::from(1);
    for w in weights {
        denom = denom.lcm(w.denom());
    }
    let scaled = weights
        .iter()
        .map(|w| w.numer() * (&denom / w.denom()))
        .collect();
    (scaled, denom)
}

/// Downscales to `i64` when every intermediate sum provably fits.
fn try_to_i64(scaled: &[BigInt], n: usize) -> Option<Vec<i64>> {
    let max_abs = scaled
        .iter()
        .map(|w| w.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    // Distances are sums of at most n+1 edge weights.
    let budget = BigInt::from(i64::MAX / 4) / BigInt::from((n + 2) as i64);
    if max_abs > budget {
        return None;
    }
    Some(
        scaled
            .iter()
            .map(|w| w.to_i64().expect("bounded above"))
            .collect(),
    )
}

/// Exact minimum weight cycle of a rational-weighted digraph.
///
/// If a negative cycle exists, returns it as an explicit witness extracted
/// from Bellman-Ford predecessors. Otherwise computes all-pairs distances by
/// `n` Bellman-Ford fixpoint runs and minimizes `w(u,v) + d(v,u)` over all
/// edges, returning the exact minimum value plus a witness cycle.
pub fn min_weight_cycle_seq(g: &WeightedDigraph) -> Result<MinCycleResult, NoCycleError> {
    let weights: Vec<&Rational> = g.edges.iter().map(|(_, _, w)| w).collect();
    let (scaled, _denom) = scale_weights(&weights);
    let (cycle, edges, negative) = match try_to_i64(&scaled, g.n) {
        Some(small) => {
            let sg = ScaledGraph {
                n: g.n,
                edges: g
                    .edges
                    .iter()
                    .zip(small)
                    .map(|((u, v, _), w)| (*u, *v, w))
                    .collect(),
            };
            min_weight_cycle_scaled(&sg)?
        }
        None => {
            let sg = ScaledGraph {
                n: g.n,
                edges: g
                    .edges
                    .iter()
                    .zip(scaled)
                    .map(|((u, v, _), w)| (*u, *v, w))
                    .collect(),
            };
            min_weight_cycle_scaled(&sg)?
        }
    };
    let value = edges.iter().fold(Rational::zero(), |acc, &eix| {
        acc + g.edges[eix as usize].2.clone()
    });
    let result = CycleResult {
        value,
        cycle,
        edges,
    };
    Ok(if negative {
        debug_assert!(result.value.is_negative());
        MinCycleResult::NegativeCycle(result)
    } else {
        MinCycleResult::Minimum(result)
    })
}

/// Trichotomy oracle without precondition checks; used by the resolvers.
pub(crate) fn compare_to_lambda_star_unchecked(g: &RatioGraph, lambda: &Rational) -> Ordering {
    // Scale by λ's denominator: w(e) = q·c(e) − p·t(e) keeps every cycle
    // weight's sign.
    let p = lambda.numer();
    let q = lambda.denom();
    let scaled: Vec<BigInt> = g.edges.iter().map(|e| q * &e.cost - p * &e.time).collect();
    let sign = match try_to_i64(&scaled, g.n) {
        Some(small) => {
            let sg = ScaledGraph {
                n: g.n,
                edges: g
                    .edges
                    .iter()
                    .zip(small)
                    .map(|(e, w)| (e.src, e.dst, w))
                    .collect(),
            };
            min_cycle_sign(&sg)
        }
        None => {
            let sg = ScaledGraph {
                n: g.n,
                edges: g
                    .edges
                    .iter()
                    .zip(scaled)
                    .map(|(e, w)| (e.src, e.dst, w))
                    .collect(),
            };
            min_cycle_sign(&sg)
        }
    };
    match sign.expect("graph must contain a cycle") {
        // Minimum cycle weight in G_λ negative ⇔ λ above λ*.
        Ordering::Less => Ordering::Greater,
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater => Ordering::Less,
    }
}

/// Compares λ against the minimum ratio λ* of the graph: `Less` means
/// `λ < λ*`. Exactly the sign of the minimum cycle weight in `G_λ`, decided
/// in exact arithmetic.
///
/// Requires a validated graph containing a cycle.
pub fn compare_to_lambda_star(g: &RatioGraph, lambda: &Rational) -> Ordering {
    debug_assert!(
        crate::graph::validate(g).ok,
        "oracle needs a validated instance"
    );
    compare_to_lambda_star_unchecked(g, lambda)
}

/// Recomputes the hitting-set SSSP pipeline concretely and reconstructs the
/// witness walk realizing `δ(t)`: the center-graph path expanded into hop
/// table walks. Test support for the certificate invariant.
pub fn reconstruct_delta_walk(
    g: &WeightedDigraph,
    centers: &CenterSet,
    h: usize,
    source: u32,
    t: u32,
) -> Option<(Vec<u32>, Rational)> {
    let mut ctx = crate::context::ConcreteCtx::concrete();
    let mut xs: Vec<u32> = centers.members.clone();
    if let Err(pos) = xs.binary_search(&source) {
        xs.insert(pos, source);
    }
    let tables = bellman_ford_hop_multi(&mut ctx, g, &xs, h);
    let k = xs.len();

    // Floyd-Warshall with successor tracking on the center graph; small and
    // independent of the min-plus route.
    let mut dist: Vec<Option<Rational>> = vec![None; k * k];
    let mut next: Vec<Option<usize>> = vec![None; k * k];
    for i in 0..k {
        for j in 0..k {
            if let Ext::Finite(w) = &tables[i].dist[xs[j] as usize] {
                dist[i * k + j] = Some(w.clone());
                next[i * k + j] = Some(j);
            }
        }
        let diag = dist[i * k + i].clone();
        if diag.is_none_or(|d| d > Rational::zero()) {
            dist[i * k + i] = Some(Rational::zero());
            next[i * k + i] = Some(i);
        }
    }
    for mid in 0..k {
        for i in 0..k {
            for j in 0..k {
                let (Some(a), Some(b)) = (&dist[i * k + mid], &dist[mid * k + j]) else {
                    continue;
                };
                let cand = a + b;
                if dist[i * k + j].as_ref().is_none_or(|d| cand < *d) {
                    dist[i * k + j] = Some(cand);
                    next[i * k + j] = next[i * k + mid];
                }
            }
        }
    }

    let s_pos = xs.binary_search(&source).expect("source is a center");
    let sssp = hitting_set_sssp(&mut ctx, g, source, centers, h);
    let x = sssp.cert[t as usize]?;
    let x_pos = xs.binary_search(&x).expect("cert names a center");

    // Hop through the center graph from source to x.
    let mut walk = vec![source];
    let mut total = Rational::zero();
    let mut cur = s_pos;
    let mut guard = 0;
    while cur != x_pos {
        let step = next[cur * k + x_pos]?;
        let seg = tables[cur].extract_path(xs[step]).ok()?;
        if let Ext::Finite(w) = &tables[cur].dist[xs[step] as usize] {
            total = total + w.clone();
        }
        walk.extend(&seg[1..]);
        cur = step;
        guard += 1;
        if guard > k {
            return None; // zero-weight cycle in H; walk reconstruction bails
        }
    }
    // Final h-hop segment from x to t.
    let seg = tables[x_pos].extract_path(t).ok()?;
    if let Ext::Finite(w) = &tables[x_pos].dist[t as usize] {
        total = total + w.clone();
    }
    walk.extend(&seg[1..]);
    Some((walk, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::ConcreteCtx;
    use crate::graph::{substitute_lambda, RatioGraph};

    fn digraph(n: usize, edges: &[(u32, u32, i64)]) -> WeightedDigraph {
        Digraph {
            n,
            edges: edges
                .iter()
                .map(|&(u, v, w)| (u, v, Rational::from(w)))
                .collect(),
        }
    }

    fn rational_digraph(n: usize, edges: &[(u32, u32, Rational)]) -> WeightedDigraph {
        Digraph {
            n,
            edges: edges.to_vec(),
        }
    }

    #[test]
    fn super_source_shape() {
        let g = digraph(2, &[]);
        let gp = add_super_source(&g);
        assert_eq!(gp.n, 3);
        assert_eq!(
            gp.edges,
            vec![(2, 0, Rational::zero()), (2, 1, Rational::zero())]
        );
        // Original weights are preserved exactly, and applying it twice just
        // keeps adding vertices.
        let g2 = digraph(2, &[(0, 1, 7)]);
        let gp2 = add_super_source(&g2);
        assert_eq!(gp2.edges[0], (0, 1, Rational::from(7)));
        assert_eq!(add_super_source(&gp2).n, 4);
    }

    #[test]
    fn sssp_with_full_centers_is_exact() {
        let g = digraph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 9)]);
        let mut ctx = ConcreteCtx::concrete();
        let r = hitting_set_sssp(&mut ctx, &g, 0, &CenterSet::full(4), 1);
        let expect: Vec<Ext<Rational>> = [0, 1, 2, 3]
            .iter()
            .map(|&w| Ext::Finite(Rational::from(w)))
            .collect();
        assert_eq!(r.delta, expect);
    }

    #[test]
    fn sssp_path_through_single_center() {
        // 0 -> 1 -> 2 -> 3 unit weights, centers {2}, h = 2: π(0,3) is hit
        // at 2 and stitching yields the exact distances.
        let g = digraph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        let mut ctx = ConcreteCtx::concrete();
        let centers = CenterSet {
            members: vec![2],
            mode: crate::hitting::CenterSetMode::Explicit,
            size_bound: 1,
        };
        let r = hitting_set_sssp(&mut ctx, &g, 0, &centers, 2);
        let expect: Vec<Ext<Rational>> = [0, 1, 2, 3]
            .iter()
            .map(|&w| Ext::Finite(Rational::from(w)))
            .collect();
        assert_eq!(r.delta, expect);
        assert_eq!(r.cert[3], Some(2));
        let (walk, total) = reconstruct_delta_walk(&g, &centers, 2, 0, 3).unwrap();
        assert_eq!(walk, vec![0, 1, 2, 3]);
        assert_eq!(total, Rational::from(3));
    }

    #[test]
    fn potential_check_examples() {
        let mut ctx = ConcreteCtx::concrete();
        // Valid potential on a nonnegative graph: all zeros.
        let g = digraph(3, &[(0, 1, 2), (1, 2, 0)]);
        let p: Vec<Ext<Rational>> = vec![Ext::zero(), Ext::zero(), Ext::zero()];
        assert!(check_potential(&mut ctx, &g, &p).ok);

        // Negative two-cycle: no potential can be valid.
        let g = digraph(2, &[(0, 1, -1), (1, 0, -1)]);
        let p: Vec<Ext<Rational>> = vec![
            Ext::Finite(Rational::from(5)),
            Ext::Finite(Rational::from(-3)),
        ];
        let check = check_potential(&mut ctx, &g, &p);
        assert!(!check.ok);
        assert!(check.violated_edge.is_some());
    }

    #[test]
    fn distances_from_super_source_give_valid_potential() {
        let g = digraph(3, &[(0, 1, -2), (1, 2, 3), (2, 0, 1)]);
        let mut ctx = ConcreteCtx::concrete();
        let gp = add_super_source(&g);
        let sssp = hitting_set_sssp(&mut ctx, &gp, 3, &CenterSet::full(4), 4);
        let p: Vec<Ext<Rational>> = sssp.delta[..3].to_vec();
        assert!(check_potential(&mut ctx, &g, &p).ok);
    }

    #[test]
    fn detect_on_two_cycle_fixture() {
        // Costs (3, 1), times (1, 1): λ* = 2.
        let fixture = RatioGraph::from_edges(2, &[(0, 1, 3, 1), (1, 0, 1, 1)]);
        let mut checks = vec![];
        for (lambda, expect) in [(1, false), (2, false), (3, true)] {
            let g = substitute_lambda(&fixture, &Rational::from(lambda));
            let mut ctx = ConcreteCtx::concrete();
            let got = detect_negative_cycle(&mut ctx, &g, 2, &CenterMode::Full);
            checks.push((lambda, got));
            assert_eq!(got, expect, "λ = {lambda}");
        }
        assert_eq!(checks.len(), 3);
    }

    #[test]
    fn detect_modes_agree_on_fixtures() {
        let g = digraph(
            4,
            &[(0, 1, -1), (1, 2, -1), (2, 0, 1), (2, 3, 5), (3, 2, -4)],
        );
        for mode in [
            CenterMode::Full,
            CenterMode::Greedy,
            CenterMode::Randomized { seed: 9, c: 1.0 },
        ] {
            let mut ctx = ConcreteCtx::concrete();
            assert!(detect_negative_cycle(&mut ctx, &g, 3, &mode), "{mode:?}");
        }
        let g = digraph(3, &[(0, 1, -1), (1, 2, -1), (2, 0, 2)]);
        for mode in [CenterMode::Full, CenterMode::Greedy] {
            let mut ctx = ConcreteCtx::concrete();
            let verdict = detect_negative_cycle_verdict(&mut ctx, &g, 3, &mode);
            assert!(!verdict.has_negative_cycle);
            let p: Vec<Ext<Rational>> = verdict
                .potential
                .unwrap()
                .into_iter()
                .map(Ext::Finite)
                .collect();
            assert!(check_potential(&mut ctx, &g, &p).ok);
        }
    }

    #[test]
    fn min_cycle_two_cycle_zero() {
        let g = digraph(2, &[(0, 1, 1), (1, 0, -1)]);
        let r = min_weight_cycle_seq(&g).unwrap();
        match r {
            MinCycleResult::Minimum(c) => {
                assert_eq!(c.value, Rational::zero());
                assert_eq!(c.cycle, vec![0, 1, 0]);
            }
            _ => panic!("no negative cycle here"),
        }
    }

    #[test]
    fn min_cycle_negative_two_cycle() {
        let g = digraph(2, &[(0, 1, -1), (1, 0, -1)]);
        match min_weight_cycle_seq(&g).unwrap() {
            MinCycleResult::NegativeCycle(c) => {
                assert_eq!(c.value, Rational::from(-2));
                assert_eq!(c.cycle.first(), c.cycle.last());
                assert_eq!(c.edges.len(), 2);
            }
            _ => panic!("negative cycle expected"),
        }
    }

    #[test]
    fn min_cycle_triangle_beats_two_cycle() {
        // Triangle 0->1->2->0 weights 1 each (total 3); extra 2-cycle
        // between 0 and 3 with weights (1, 2) (total 3). Minimum is 3.
        let g = digraph(4, &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (0, 3, 1), (3, 0, 2)]);
        match min_weight_cycle_seq(&g).unwrap() {
            MinCycleResult::Minimum(c) => assert_eq!(c.value, Rational::from(3)),
            _ => panic!("no negative cycle here"),
        }
    }

    #[test]
    fn min_cycle_self_loop() {
        let g = digraph(2, &[(0, 1, 5), (1, 1, 2)]);
        match min_weight_cycle_seq(&g).unwrap() {
            MinCycleResult::Minimum(c) => {
                assert_eq!(c.value, Rational::from(2));
                assert_eq!(c.cycle, vec![1, 1]);
            }
            _ => panic!("no negative cycle here"),
        }
    }

    #[test]
    fn min_cycle_acyclic_errors() {
        let g = digraph(3, &[(0, 1, 1), (1, 2, 1)]);
        assert_eq!(min_weight_cycle_seq(&g), Err(NoCycleError));
    }

    #[test]
    fn min_cycle_huge_weights_take_bigint_path() {
        let huge = Rational::new(BigInt::from(i64::MAX) * 5, BigInt::from(1));
        let g = rational_digraph(
            2,
            &[(0, 1, huge.clone()), (1, 0, -&huge + Rational::from(3))],
        );
        match min_weight_cycle_seq(&g).unwrap() {
            MinCycleResult::Minimum(c) => assert_eq!(c.value, Rational::from(3)),
            _ => panic!("no negative cycle here"),
        }
    }

    #[test]
    fn oracle_trichotomy_on_fixture() {
        let g = RatioGraph::from_edges(2, &[(0, 1, 3, 1), (1, 0, 1, 1)]);
        assert_eq!(
            compare_to_lambda_star(&g, &Rational::from(2)),
            Ordering::Equal
        );
        assert_eq!(
            compare_to_lambda_star(&g, &Rational::new(5, 2)),
            Ordering::Greater
        );
        assert_eq!(
            compare_to_lambda_star(&g, &Rational::zero()),
            Ordering::Less
        );
        assert_eq!(
            compare_to_lambda_star(&g, &Rational::from(100)),
            Ordering::Greater
        );
    }

    #[test]
    fn oracle_handles_fractional_lambda_exactly() {
        // Self-loop with cost 7, time 3: λ* = 7/3.
        let g = RatioGraph::from_edges(1, &[(0, 0, 7, 3)]);
        assert_eq!(
            compare_to_lambda_star(&g, &Rational::new(7, 3)),
            Ordering::Equal
        );
        assert_eq!(
            compare_to_lambda_star(&g, &Rational::new(233, 100)),
            Ordering::Less
        );
        assert_eq!(
            compare_to_lambda_star(&g, &Rational::new(234, 100)),
            Ordering::Greater
        );
    }
}
