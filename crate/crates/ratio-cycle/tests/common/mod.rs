//! Independent oracles and instance helpers shared by the integration
//! suites. These deliberately avoid the library's comparison-context
//! machinery: plain fixpoint Bellman-Ford and triple-loop min-plus.

// Each integration test binary compiles its own copy and uses a subset.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ratio_cycle::context::Ext;
use ratio_cycle::graph::{gen_random_graph, RatioGraph, WeightedDigraph};
use ratio_cycle::hop::DistMatrix;
use ratio_cycle::Rational;

/// Textbook Bellman-Ford to fixpoint. Returns per-vertex distances, or
/// `None` when a negative cycle is reachable from the source.
pub fn naive_sssp(g: &WeightedDigraph, source: u32) -> Option<Vec<Option<Rational>>> {
    let mut dist: Vec<Option<Rational>> = vec![None; g.n];
    dist[source as usize] = Some(Rational::zero());
    for round in 0..=g.n {
        let mut changed = false;
        for (u, v, w) in &g.edges {
            let Some(du) = dist[*u as usize].clone() else {
                continue;
            };
            let cand = du + w.clone();
            let better = match &dist[*v as usize] {
                None => true,
                Some(dv) => cand < *dv,
            };
            if better {
                dist[*v as usize] = Some(cand);
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
        if round == g.n {
            return None;
        }
    }
    Some(dist)
}

/// Distances from an implicit super-source (all vertices start at zero), or
/// `None` when the graph has a negative cycle.
pub fn naive_super_source_sssp(g: &WeightedDigraph) -> Option<Vec<Rational>> {
    let mut dist: Vec<Rational> = vec![Rational::zero(); g.n];
    for round in 0..=g.n {
        let mut changed = false;
        for (u, v, w) in &g.edges {
            let cand = dist[*u as usize].clone() + w.clone();
            if cand < dist[*v as usize] {
                dist[*v as usize] = cand;
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
        if round == g.n {
            return None;
        }
    }
    Some(dist)
}

pub fn naive_has_negative_cycle(g: &WeightedDigraph) -> bool {
    naive_super_source_sssp(g).is_none()
}

/// Plain triple-loop min-plus product over optional rationals.
pub fn naive_minplus(a: &DistMatrix<Rational>, b: &DistMatrix<Rational>) -> DistMatrix<Rational> {
    let dim = a.dim();
    let mut entries = vec![Ext::Infinite; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut best: Option<Rational> = None;
            for k in 0..dim {
                let (Ext::Finite(x), Ext::Finite(y)) = (a.get(i, k), b.get(k, j)) else {
                    continue;
                };
                let cand = x.clone() + y.clone();
                if best.as_ref().is_none_or(|c| cand < *c) {
                    best = Some(cand);
                }
            }
            if let Some(w) = best {
                entries[i * dim + j] = Ext::Finite(w);
            }
        }
    }
    DistMatrix {
        order: a.order.clone(),
        entries,
    }
}

/// Adjacency matrix of a weighted digraph with zero diagonal; parallel
/// edges collapse to their minimum weight.
pub fn adjacency_matrix(g: &WeightedDigraph) -> DistMatrix<Rational> {
    let dim = g.n;
    let mut entries: Vec<Ext<Rational>> = vec![Ext::Infinite; dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = Ext::Finite(Rational::zero());
    }
    for (u, v, w) in &g.edges {
        let slot = &mut entries[*u as usize * dim + *v as usize];
        let better = match slot {
            Ext::Infinite => true,
            Ext::Finite(cur) => *w < *cur,
        };
        if better {
            *slot = Ext::Finite(w.clone());
        }
    }
    DistMatrix {
        order: (0..dim as u32).collect(),
        entries,
    }
}

/// Draws a validated random instance with `n` in the given range, `m` up to
/// `m_cap`, costs in ±9 and times in [1, 4].
pub fn draw_instance(rng: &mut ChaCha8Rng, n_range: (usize, usize), m_cap: usize) -> RatioGraph {
    let n = rng.gen_range(n_range.0..=n_range.1);
    let m = rng.gen_range(n..=m_cap.max(n));
    gen_random_graph(n, m, (-9, 9), (1, 4), rng.gen()).expect("valid parameters")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n · max|c|`, at least 1, as used by the Lawler call budget.
pub fn cost_scale(g: &RatioGraph) -> BigInt {
    let c = g.max_abs_cost();
    let c = if c == BigInt::from(0) {
        BigInt::from(1)
    } else {
        c
    };
    BigInt::from(g.n as u64) * c
}
