//! Center set construction: randomized vertex sampling and deterministic
//! greedy covering of canonical half-hop paths.
//!
//! Centers are vertices that hit every canonical `⌊h/2⌋`-hop shortest walk
//! with exactly `⌊h/2⌋` edges; long shortest paths can then be stitched from
//! `h`-hop segments through the center graph.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::context::Weight;
use crate::hop::HopTable;

/// How a center set was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CenterSetMode {
    Randomized,
    Greedy,
    Explicit,
}

/// A set of center vertices together with the size bound it was checked
/// against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CenterSet {
    /// Sorted vertex ids.
    pub members: Vec<u32>,
    pub mode: CenterSetMode,
    pub size_bound: usize,
}

impl CenterSet {
    /// All vertices of an `n`-vertex graph; always a valid hitting set.
    pub fn full(n: usize) -> Self {
        CenterSet {
            members: (0..n as u32).collect(),
            mode: CenterSetMode::Explicit,
            size_bound: n,
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// The sample came out larger than the high-probability bound; the caller
/// may retry with fresh randomness.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("sampled {got} centers, above the bound {bound}")]
pub struct TooLarge {
    pub got: usize,
    pub bound: usize,
}

/// Samples each vertex independently with probability `min(3c·ln(n)/h, 1)`
/// and rejects samples larger than `9c·n·ln(n)/h`.
///
/// The thresholds use 64-bit float logarithms; they only shape the sampling
/// probability and the size bound, never weight arithmetic.
pub fn sample_centers(
    n: usize,
    h: usize,
    c: f64,
    rng: &mut impl Rng,
) -> Result<CenterSet, TooLarge> {
    assert!(n >= 2, "sampling needs at least two vertices");
    assert!((1..=n).contains(&h), "hop bound out of range");
    assert!(c >= 1.0, "oversampling constant must be at least 1");
    let ln_n = (n as f64).ln();
    let p = (3.0 * c * ln_n / h as f64).min(1.0);
    let bound = 9.0 * c * n as f64 * ln_n / h as f64;
    let members: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(p)).collect();
    if members.len() as f64 > bound {
        return Err(TooLarge {
            got: members.len(),
            bound: bound.ceil() as usize,
        });
    }
    Ok(CenterSet {
        members,
        mode: CenterSetMode::Randomized,
        size_bound: bound.ceil() as usize,
    })
}

/// Collection of vertex sets, each the vertex set of one canonical walk with
/// exactly the requested number of edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathFamily {
    /// Each set is sorted and deduplicated; the family itself carries no
    /// duplicate sets.
    pub sets: Vec<Vec<u32>>,
}

/// Collects `V(π^half(u, v))` over all table sources `u` and targets `v`
/// where the canonical walk exists and has exactly `half` edges.
pub fn build_path_family<W: Weight>(tables: &[HopTable<W>], half: usize) -> PathFamily {
    let mut sets: BTreeSet<Vec<u32>> = BTreeSet::new();
    for table in tables {
        assert!(table.h >= half, "tables must cover the requested hop count");
        for v in 0..table.dist.len() as u32 {
            if table.dist[v as usize].is_finite() && table.hops[v as usize] == half as u32 {
                let walk = table.extract_path(v).expect("finite entry has a walk");
                let set: BTreeSet<u32> = walk.into_iter().collect();
                sets.insert(set.into_iter().collect());
            }
        }
    }
    PathFamily {
        sets: sets.into_iter().collect(),
    }
}

/// Greedy hitting set: repeatedly pick the element contained in the most
/// remaining sets (ties to the smallest vertex id) and drop the sets it
/// hits. Output size is at most `⌈(n/q)·(ln k + 1)⌉` for `k` sets of size at
/// least `q`.
pub fn greedy_hitting_set(family: &PathFamily, n: usize) -> CenterSet {
    let k = family.sets.len();
    let q = family.sets.iter().map(|s| s.len()).min().unwrap_or(1);
    assert!(q >= 1, "family sets must be nonempty");
    let size_bound = if k == 0 {
        0
    } else {
        ((n as f64 / q as f64) * ((k as f64).ln() + 1.0)).ceil() as usize
    };

    let mut alive: Vec<bool> = vec![true; k];
    let mut remaining = k;
    let mut members = BTreeSet::new();
    while remaining > 0 {
        let mut count = vec![0usize; n];
        for (ix, set) in family.sets.iter().enumerate() {
            if alive[ix] {
                for &v in set {
                    count[v as usize] += 1;
                }
            }
        }
        let best = (0..n)
            .max_by_key(|&v| (count[v], std::cmp::Reverse(v)))
            .expect("n > 0");
        debug_assert!(count[best] > 0, "alive sets must contain some element");
        members.insert(best as u32);
        for (ix, set) in family.sets.iter().enumerate() {
            if alive[ix] && set.binary_search(&(best as u32)).is_ok() {
                alive[ix] = false;
                remaining -= 1;
            }
        }
    }

    CenterSet {
        members: members.into_iter().collect(),
        mode: CenterSetMode::Greedy,
        size_bound,
    }
}

/// True when `centers` intersects every set of the family.
pub fn hits_all(family: &PathFamily, centers: &CenterSet) -> bool {
    family
        .sets
        .iter()
        .all(|set| set.iter().any(|v| centers.contains(*v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{CmpCtx, ConcreteResolver};
    use crate::graph::Digraph;
    use crate::hop::bellman_ford_hop_multi;
    use crate::rational::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn family(sets: &[&[u32]]) -> PathFamily {
        PathFamily {
            sets: sets.iter().map(|s| s.to_vec()).collect(),
        }
    }

    #[test]
    fn sampling_with_h1_takes_everything() {
        // p = min(3c·ln(n)/h, 1) is 1 whenever h = 1.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = sample_centers(12, 1, 1.0, &mut rng).unwrap();
        assert_eq!(c.members, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn sampling_clamps_probability() {
        // n = 2, h = 2: p = min(1.5·ln 2, 1) = 1.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = sample_centers(2, 2, 1.0, &mut rng).unwrap();
        assert_eq!(c.members, vec![0, 1]);
    }

    #[test]
    fn sampling_respects_size_bound() {
        // Whenever the sampler returns, |C| <= bound; check concentration
        // near 3·n·ln(n)/h over repeated draws.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut sizes = Vec::new();
        for _ in 0..100 {
            match sample_centers(1000, 100, 1.0, &mut rng) {
                Ok(c) => {
                    assert!(c.members.len() <= c.size_bound);
                    assert_eq!(c.size_bound, 622); // ceil(9*1000*ln(1000)/100)
                    sizes.push(c.members.len());
                }
                Err(e) => assert!(e.got > e.bound),
            }
        }
        assert!(!sizes.is_empty());
        let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
        // Expected size is 3*1000*ln(1000)/100 ≈ 207.
        assert!(
            (150.0..280.0).contains(&mean),
            "mean sample size {mean} far from 207"
        );
    }

    #[test]
    fn greedy_single_set() {
        let c = greedy_hitting_set(&family(&[&[0, 1, 2]]), 3);
        assert_eq!(c.members, vec![0]);
    }

    #[test]
    fn greedy_chain_of_pairs() {
        // {0,1}, {1,2}, {2,3}: greedy picks 1 (hits two sets), then 2.
        let c = greedy_hitting_set(&family(&[&[0, 1], &[1, 2], &[2, 3]]), 4);
        assert_eq!(c.members, vec![1, 2]);
    }

    #[test]
    fn greedy_hits_random_families_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            // 50 random sets of size 5 over 40 elements.
            let mut sets = BTreeSet::new();
            while sets.len() < 50 {
                let mut s = BTreeSet::new();
                while s.len() < 5 {
                    s.insert(rng.gen_range(0u32..40));
                }
                sets.insert(s.into_iter().collect::<Vec<_>>());
            }
            let fam = PathFamily {
                sets: sets.into_iter().collect(),
            };
            let c = greedy_hitting_set(&fam, 40);
            assert!(hits_all(&fam, &c));
            // ceil((40/5)(ln 50 + 1)) = 40.
            assert!(c.members.len() <= 40);
            assert_eq!(c.size_bound, 40);
            // Determinism.
            assert_eq!(greedy_hitting_set(&fam, 40), c);
        }
    }

    #[test]
    fn greedy_empty_family() {
        let c = greedy_hitting_set(&PathFamily::default(), 5);
        assert!(c.members.is_empty());
        assert_eq!(c.size_bound, 0);
    }

    fn tables_for(g: &Digraph<Rational>, half: usize) -> Vec<crate::hop::HopTable<Rational>> {
        let mut ctx = CmpCtx::new(ConcreteResolver::default());
        let sources: Vec<u32> = (0..g.n as u32).collect();
        bellman_ford_hop_multi(&mut ctx, g, &sources, half)
    }

    #[test]
    fn family_on_path_graph() {
        // 0 -> 1 -> 2 with h = 4 (half = 2): only the pair (0, 2) has a
        // canonical walk of exactly two edges.
        let g = Digraph {
            n: 3,
            edges: vec![(0, 1, Rational::from(1)), (1, 2, Rational::from(1))],
        };
        let fam = build_path_family(&tables_for(&g, 2), 2);
        assert_eq!(fam.sets, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn family_with_one_hop_segments() {
        // half = 1: each edge on some canonical 1-hop shortest walk shows up
        // as a 2-element set.
        let g = Digraph {
            n: 3,
            edges: vec![(0, 1, Rational::from(1)), (1, 2, Rational::from(1))],
        };
        let fam = build_path_family(&tables_for(&g, 1), 1);
        assert_eq!(fam.sets, vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn family_empty_on_complete_triangle() {
        // Complete digraph on 3 vertices, unit weights, half = 2: every
        // canonical shortest walk has at most one edge, so no set qualifies.
        let g = Digraph {
            n: 3,
            edges: vec![
                (0, 1, Rational::from(1)),
                (0, 2, Rational::from(1)),
                (1, 0, Rational::from(1)),
                (1, 2, Rational::from(1)),
                (2, 0, Rational::from(1)),
                (2, 1, Rational::from(1)),
            ],
        };
        let fam = build_path_family(&tables_for(&g, 2), 2);
        assert!(fam.sets.is_empty());
    }

    #[test]
    fn family_with_zero_hops_is_singletons() {
        // half = 0 degenerates to one singleton per vertex, which forces the
        // greedy cover to take every vertex.
        let g = Digraph {
            n: 3,
            edges: vec![(0, 1, Rational::from(1)), (1, 2, Rational::from(1))],
        };
        let fam = build_path_family(&tables_for(&g, 0), 0);
        assert_eq!(fam.sets, vec![vec![0], vec![1], vec![2]]);
        let c = greedy_hitting_set(&fam, 3);
        assert_eq!(c.members, vec![0, 1, 2]);
    }
}
