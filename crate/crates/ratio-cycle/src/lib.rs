//! Exact minimum cost-to-time ratio cycle solver.
//!
//! Given a directed graph where every edge carries an integer cost and a
//! nonnegative integer transit time, the minimum ratio cycle is the directed
//! cycle minimizing (total cost) / (total transit time). Its value is written
//! `λ*` throughout. The solver reduces the problem to negative cycle
//! detection on the reweighted graph `G_λ` (edge weight `c(e) − λ·t(e)`) and
//! finds `λ*` by parametric search: the detection algorithm is executed
//! "generically" at the unknown optimum, with every weight comparison
//! resolved exactly through a three-way oracle over exact rationals.
//!
//! The crate is organized around the pieces of that pipeline:
//!
//! * [`rational`] — arbitrary-precision rationals (all values are exact).
//! * [`graph`] — graph types, parsing, validation, instance generators.
//! * [`context`] — the comparison context that lets the same shortest-path
//!   code run on concrete rationals or on linear functions of λ.
//! * [`hop`] — hop-limited Bellman-Ford and min-plus matrix APSP.
//! * [`hitting`] — randomized and greedy center (hitting set) construction.
//! * [`sssp`] — hitting-set based SSSP, potential checks, negative cycle
//!   detection, and the sequential minimum weight cycle oracle.
//! * [`parametric`] — interval maintenance, batched comparison resolution,
//!   and the top-level parametric solvers.
//! * [`baselines`] — brute force enumeration, Lawler's binary search, and
//!   Karp's minimum mean cycle for cross-validation.

pub mod baselines;
pub mod context;
pub mod graph;
pub mod hitting;
pub mod hop;
pub mod parametric;
pub mod rational;
pub mod sssp;

pub use context::{CmpCtx, ConcreteCtx, Counters, Ext, LinearWeight, Weight};
pub use graph::{gen_planted_ratio, gen_random_graph, parse_ratio_graph, validate};
pub use graph::{Digraph, RatioGraph, ValidationReport, WeightedDigraph};
pub use parametric::{parametric_min_ratio, HopBound, RatioSolution, SolveError};
pub use rational::Rational;
pub use sssp::{compare_to_lambda_star, detect_negative_cycle, min_weight_cycle_seq, CenterMode};
