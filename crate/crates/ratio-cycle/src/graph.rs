//! Graph data model, input format, validation, and instance generators.
//!
//! The interchange format is line oriented: comment lines start with `c`,
//! one header `p ratio <n> <m>`, then `m` lines `a <src> <dst> <cost> <time>`
//! with 0-based vertex ids and decimal integers of arbitrary size.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::context::{LinearWeight, Weight};
use crate::rational::Rational;

/// Directed edge with integer cost and transit time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioEdge {
    pub src: u32,
    pub dst: u32,
    pub cost: BigInt,
    pub time: BigInt,
}

/// Directed graph with a cost and a transit time per edge.
///
/// Parallel edges and self-loops are allowed; a self-loop is a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioGraph {
    pub n: usize,
    pub edges: Vec<RatioEdge>,
}

impl RatioGraph {
    pub fn new(n: usize) -> Self {
        RatioGraph {
            n,
            edges: Vec::new(),
        }
    }

    /// Convenience constructor from `(src, dst, cost, time)` tuples.
    pub fn from_edges(n: usize, edges: &[(u32, u32, i64, i64)]) -> Self {
        RatioGraph {
            n,
            edges: edges
                .iter()
                .map(|&(src, dst, cost, time)| RatioEdge {
                    src,
                    dst,
                    cost: BigInt::from(cost),
                    time: BigInt::from(time),
                })
                .collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Largest absolute edge cost (zero for an edgeless graph).
    pub fn max_abs_cost(&self) -> BigInt {
        self.edges
            .iter()
            .map(|e| e.cost.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Largest transit time (zero for an edgeless graph).
    pub fn max_time(&self) -> BigInt {
        self.edges
            .iter()
            .map(|e| e.time.clone())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Renders the graph in the interchange format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p ratio {} {}\n", self.n, self.edges.len()));
        for e in &self.edges {
            out.push_str(&format!("a {} {} {} {}\n", e.src, e.dst, e.cost, e.time));
        }
        out
    }
}

/// Directed graph with one weight per edge, generic over the weight type so
/// the same algorithms run on `Rational` and `LinearWeight`.
#[derive(Clone, Debug, PartialEq)]
pub struct Digraph<W> {
    pub n: usize,
    pub edges: Vec<(u32, u32, W)>,
}

/// Weighted digraph over concrete rationals (the graph `G_λ`).
pub type WeightedDigraph = Digraph<Rational>;

impl<W: Weight> Digraph<W> {
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Incoming edges per vertex as `(source, edge index)` lists.
    pub fn in_edges(&self) -> Vec<Vec<(u32, u32)>> {
        let mut incoming = vec![Vec::new(); self.n];
        for (ix, (u, v, _)) in self.edges.iter().enumerate() {
            incoming[*v as usize].push((*u, ix as u32));
        }
        incoming
    }
}

/// Substitutes a concrete λ: each edge gets weight `c(e) − λ·t(e)`.
pub fn substitute_lambda(g: &RatioGraph, lambda: &Rational) -> WeightedDigraph {
    Digraph {
        n: g.n,
        edges: g
            .edges
            .iter()
            .map(|e| {
                let w = Rational::from_int(e.cost.clone())
                    - lambda * &Rational::from_int(e.time.clone());
                (e.src, e.dst, w)
            })
            .collect(),
    }
}

/// Symbolic substitution: each edge weight becomes the linear function
/// `c(e) − λ·t(e)` of the search parameter.
pub fn symbolic_weights(g: &RatioGraph) -> Digraph<LinearWeight> {
    Digraph {
        n: g.n,
        edges: g
            .edges
            .iter()
            .map(|e| {
                let w = LinearWeight::new(
                    Rational::from_int(e.cost.clone()),
                    Rational::from_int(e.time.clone()),
                );
                (e.src, e.dst, w)
            })
            .collect(),
    }
}

/// Validation failure codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ViolationCode {
    BadVertexId,
    NegativeTransit,
    ZeroTransitCycle,
    Acyclic,
}

/// Outcome of [`validate`]; `ok` holds exactly when `violations` is empty.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<(ViolationCode, String)>,
}

/// Checks the structural invariants a solvable instance must satisfy:
/// vertex ids in range, nonnegative transit times, no directed cycle made
/// solely of zero-transit edges (so every cycle ratio is finite), and at
/// least one directed cycle.
pub fn validate(g: &RatioGraph) -> ValidationReport {
    let mut violations = Vec::new();
    for (ix, e) in g.edges.iter().enumerate() {
        if (e.src as usize) >= g.n || (e.dst as usize) >= g.n {
            violations.push((
                ViolationCode::BadVertexId,
                format!(
                    "edge {} ({} -> {}) has a vertex id outside [0, {})",
                    ix, e.src, e.dst, g.n
                ),
            ));
        }
        if e.time.is_negative() {
            violations.push((
                ViolationCode::NegativeTransit,
                format!(
                    "edge {} ({} -> {}) has transit time {} < 0",
                    ix, e.src, e.dst, e.time
                ),
            ));
        }
    }

    // Cycle checks run on the well-formed edges only.
    let valid_edges: Vec<&RatioEdge> = g
        .edges
        .iter()
        .filter(|e| (e.src as usize) < g.n && (e.dst as usize) < g.n)
        .collect();

    if let Some(cycle) = find_cycle(g.n, valid_edges.iter().filter(|e| e.time.is_zero())) {
        violations.push((
            ViolationCode::ZeroTransitCycle,
            format!("cycle {:?} uses only zero-transit edges", cycle),
        ));
    }
    if find_cycle(g.n, valid_edges.iter()).is_none() {
        violations.push((
            ViolationCode::Acyclic,
            "graph has no directed cycle".to_string(),
        ));
    }

    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// Finds some directed cycle among the given edges, as a vertex list
/// (not closed), or `None` if they form a DAG.
fn find_cycle<'a>(n: usize, edges: impl Iterator<Item = &'a &'a RatioEdge>) -> Option<Vec<u32>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.src as usize].push(e.dst);
    }
    // Iterative DFS with tri-state marks; a back edge closes a cycle.
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = vec![WHITE; n];
    let mut parent: Vec<Option<u32>> = vec![None; n];
    for root in 0..n {
        if color[root] != WHITE {
            continue;
        }
        let mut stack: Vec<(u32, usize)> = vec![(root as u32, 0)];
        color[root] = GRAY;
        while let Some(&(v, next)) = stack.last() {
            if next < adj[v as usize].len() {
                let w = adj[v as usize][next];
                stack.last_mut().expect("nonempty").1 += 1;
                match color[w as usize] {
                    WHITE => {
                        color[w as usize] = GRAY;
                        parent[w as usize] = Some(v);
                        stack.push((w, 0));
                    }
                    GRAY => {
                        // Walk back from v to w to materialize the cycle.
                        let mut cycle = vec![w];
                        let mut cur = v;
                        while cur != w {
                            cycle.push(cur);
                            cur = parent[cur as usize].expect("gray vertex has a parent");
                        }
                        cycle[1..].reverse();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[v as usize] = BLACK;
                stack.pop();
            }
        }
    }
    None
}

/// Parse error with a 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

/// Parses the interchange format. Edges are kept in file order; duplicate
/// `(src, dst)` pairs stay as parallel edges. Integers are arbitrary
/// precision, so overflow cannot occur.
pub fn parse_ratio_graph(text: &str) -> Result<RatioGraph, ParseError> {
    let err = |line: usize, msg: String| ParseError { line, msg };
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<RatioEdge> = Vec::new();
    let mut last_line = 0;

    for (ix, raw) in text.lines().enumerate() {
        let line = ix + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if header.is_some() {
                    return Err(err(line, "duplicate header".into()));
                }
                if fields.len() != 4 || fields[1] != "ratio" {
                    return Err(err(line, "expected `p ratio <n> <m>`".into()));
                }
                let n: usize = fields[2]
                    .parse()
                    .map_err(|_| err(line, "bad vertex count".into()))?;
                let m: usize = fields[3]
                    .parse()
                    .map_err(|_| err(line, "bad edge count".into()))?;
                header = Some((n, m));
            }
            "a" => {
                let (n, m) = header.ok_or_else(|| err(line, "edge before header".into()))?;
                if edges.len() == m {
                    return Err(err(line, format!("more than {} edges", m)));
                }
                if fields.len() != 5 {
                    return Err(err(line, "expected `a <src> <dst> <cost> <time>`".into()));
                }
                let src: u32 = fields[1].parse().map_err(|_| err(line, "bad src".into()))?;
                let dst: u32 = fields[2].parse().map_err(|_| err(line, "bad dst".into()))?;
                if src as usize >= n || dst as usize >= n {
                    return Err(err(line, format!("vertex id out of range [0, {})", n)));
                }
                let cost: BigInt = fields[3]
                    .parse()
                    .map_err(|_| err(line, "bad cost".into()))?;
                let time: BigInt = fields[4]
                    .parse()
                    .map_err(|_| err(line, "bad time".into()))?;
                edges.push(RatioEdge {
                    src,
                    dst,
                    cost,
                    time,
                });
            }
            other => return Err(err(line, format!("unknown record `{}`", other))),
        }
    }

    let (n, m) = header.ok_or_else(|| err(last_line.max(1), "missing header".into()))?;
    if edges.len() != m {
        return Err(err(
            last_line.max(1),
            format!("expected {} edges, found {}", m, edges.len()),
        ));
    }
    Ok(RatioGraph { n, edges })
}

/// Bad generator parameters.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid parameters: {0}")]
pub struct InvalidParams(pub String);

/// Generates a random instance that always contains a cycle: a backbone
/// cycle through all `n` vertices (in seeded random order) plus `m − n`
/// edges with uniform random endpoints. Costs and times are uniform in the
/// given inclusive ranges. Deterministic for a fixed seed.
pub fn gen_random_graph(
    n: usize,
    m: usize,
    cost_range: (i64, i64),
    time_range: (i64, i64),
    seed: u64,
) -> Result<RatioGraph, InvalidParams> {
    if n == 0 {
        return Err(InvalidParams("n must be positive".into()));
    }
    if m < n {
        return Err(InvalidParams(format!(
            "m = {} < n = {}: backbone cycle does not fit",
            m, n
        )));
    }
    if cost_range.0 > cost_range.1 {
        return Err(InvalidParams("empty cost range".into()));
    }
    if time_range.0 > time_range.1 || time_range.0 < 1 {
        return Err(InvalidParams(
            "time range must be a nonempty range of positive integers".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (0..n as u32).collect();
    // Fisher-Yates with the seeded generator.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }

    let mut edges = Vec::with_capacity(m);
    let push = |rng: &mut ChaCha8Rng, src: u32, dst: u32, edges: &mut Vec<RatioEdge>| {
        let cost = rng.gen_range(cost_range.0..=cost_range.1);
        let time = rng.gen_range(time_range.0..=time_range.1);
        edges.push(RatioEdge {
            src,
            dst,
            cost: cost.into(),
            time: time.into(),
        });
    };
    for i in 0..n {
        let src = order[i];
        let dst = order[(i + 1) % n];
        push(&mut rng, src, dst, &mut edges);
    }
    for _ in n..m {
        let src = rng.gen_range(0..n as u32);
        let dst = rng.gen_range(0..n as u32);
        push(&mut rng, src, dst, &mut edges);
    }
    Ok(RatioGraph { n, edges })
}

/// Generates an instance with a known minimum ratio `planted = p/q`.
///
/// A backbone cycle through all `n` vertices gets cost `p` and time `q` per
/// edge (ratio exactly `p/q`); every other edge `e` gets a transit time in
/// `[1, 4]` and a cost strictly above `planted · t(e)`, so any cycle using a
/// non-planted edge has ratio strictly greater than `planted`. Returns the
/// graph together with its exact λ*.
pub fn gen_planted_ratio(
    n: usize,
    m: usize,
    planted: &Rational,
    seed: u64,
) -> Result<(RatioGraph, Rational), InvalidParams> {
    if n == 0 {
        return Err(InvalidParams("n must be positive".into()));
    }
    if m < n {
        return Err(InvalidParams(format!(
            "m = {} < n = {}: planted cycle does not fit",
            m, n
        )));
    }

    let p = planted.numer().clone();
    let q = planted.denom().clone();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }

    let mut edges = Vec::with_capacity(m);
    for i in 0..n {
        edges.push(RatioEdge {
            src: order[i],
            dst: order[(i + 1) % n],
            cost: p.clone(),
            time: q.clone(),
        });
    }
    for _ in n..m {
        let src = rng.gen_range(0..n as u32);
        let dst = rng.gen_range(0..n as u32);
        let time = BigInt::from(rng.gen_range(1i64..=4));
        // Smallest integer strictly above planted * time, plus random slack.
        let scaled = planted * &Rational::from_int(time.clone());
        let uplift = BigInt::from(rng.gen_range(1i64..=3));
        let cost = scaled.floor() + 1 + uplift;
        edges.push(RatioEdge {
            src,
            dst,
            cost,
            time,
        });
    }
    Ok((RatioGraph { n, edges }, planted.clone()))
}
