//! Comparison contexts.
//!
//! Every weight comparison and addition performed by the shortest-path
//! routines is routed through a [`CmpCtx`]. With the [`ConcreteResolver`]
//! the weights are plain [`Rational`]s and comparisons are evaluated
//! directly. With the parametric resolver (see [`crate::parametric`]) the
//! weights are [`LinearWeight`]s — linear functions `a − λ·b` — and each
//! comparison is decided by the sign the difference takes at the unknown
//! optimum `λ*`.
//!
//! Comparisons are issued in *batches*. A batch models one parallel step of
//! the underlying algorithm: its comparisons must not depend on each other's
//! outcomes, which allows the parametric resolver to collect the roots of a
//! whole batch and binary-search among them with few oracle probes.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::rational::Rational;

/// Weight values a comparison context can work with.
pub trait Weight: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Weight for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Linear function of λ with value `a − λ·b`.
///
/// The symbolic weight of an edge in `G_λ` is `c(e) − λ·t(e)`, i.e.
/// `a = c(e)` and `b = t(e)`; sums of edge weights stay of this form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearWeight {
    /// Constant term (cost-like).
    pub a: Rational,
    /// Coefficient of λ (time-like); the value is `a − λ·b`.
    pub b: Rational,
}

impl LinearWeight {
    pub fn new(a: Rational, b: Rational) -> Self {
        LinearWeight { a, b }
    }

    pub fn constant(a: Rational) -> Self {
        LinearWeight {
            a,
            b: Rational::zero(),
        }
    }

    /// Value of the function at a concrete λ.
    pub fn eval(&self, lambda: &Rational) -> Rational {
        &self.a - &(lambda * &self.b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        LinearWeight {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Weight for LinearWeight {
    fn zero() -> Self {
        LinearWeight {
            a: Rational::zero(),
            b: Rational::zero(),
        }
    }
    fn add(&self, rhs: &Self) -> Self {
        LinearWeight {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
    fn neg(&self) -> Self {
        LinearWeight {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

/// A weight extended with an infinite sentinel.
///
/// `Infinite` is absorbing under addition and greater than every finite
/// value; it is a distinct variant rather than a large number so that sign
/// analysis of linear weights stays meaningful.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Ext<W> {
    Finite(W),
    Infinite,
}

impl<W: Weight> Ext<W> {
    pub fn zero() -> Self {
        Ext::Finite(W::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn finite(&self) -> Option<&W> {
        match self {
            Ext::Finite(w) => Some(w),
            Ext::Infinite => None,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Ext::Finite(x), Ext::Finite(y)) => Ext::Finite(x.add(y)),
            _ => Ext::Infinite,
        }
    }
}

/// Instrumentation for one run of a (conceptually parallel) algorithm.
///
/// `comparisons` counts every weight comparison issued; `comparison_rounds`
/// counts resolved batches, i.e. tournament rounds; `parallel_steps` counts
/// the coarser algorithm phases (one per Bellman-Ford iteration, min-plus
/// product, output tournament, or potential check), matching the depth
/// accounting in which a minimum over many candidates costs one step. Both
/// round counters are kept so either accounting can be reported.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub comparisons: u64,
    pub comparison_rounds: u64,
    pub oracle_calls: u64,
    pub work_units: u64,
    #[serde(skip)]
    pub parallel_steps: u64,
}

impl Counters {
    pub fn add_work(&mut self, units: u64) {
        self.work_units += units;
    }
}

/// Misuse of the batch protocol (nested begin, end without begin, or a
/// standalone comparison while a batch is open).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("batch misuse: {0}")]
pub struct BatchMisuse(pub &'static str);

/// Resolves batches of weight comparisons.
///
/// `submit` receives one comparison; the outcome for all submitted
/// comparisons is returned by `flush`, in submission order. A concrete
/// resolver answers immediately and buffers only outcomes; the parametric
/// resolver defers undecidable comparisons until the whole batch is known.
pub trait BatchResolver<W: Weight> {
    fn submit(&mut self, x: &Ext<W>, y: &Ext<W>, counters: &mut Counters);
    fn flush(&mut self, counters: &mut Counters) -> Vec<Ordering>;
}

/// Resolver over concrete [`Rational`] weights: every comparison is an exact
/// rational comparison.
#[derive(Default)]
pub struct ConcreteResolver {
    outcomes: Vec<Ordering>,
}

impl BatchResolver<Rational> for ConcreteResolver {
    fn submit(&mut self, x: &Ext<Rational>, y: &Ext<Rational>, _counters: &mut Counters) {
        let o = match (x, y) {
            (Ext::Infinite, Ext::Infinite) => Ordering::Equal,
            (Ext::Infinite, Ext::Finite(_)) => Ordering::Greater,
            (Ext::Finite(_), Ext::Infinite) => Ordering::Less,
            (Ext::Finite(a), Ext::Finite(b)) => a.cmp(b),
        };
        self.outcomes.push(o);
    }

    fn flush(&mut self, _counters: &mut Counters) -> Vec<Ordering> {
        std::mem::take(&mut self.outcomes)
    }
}

/// Comparison context: a resolver plus counters plus the batch protocol.
pub struct CmpCtx<W: Weight, R: BatchResolver<W>> {
    resolver: R,
    counters: Counters,
    open: bool,
    pending_in_batch: usize,
    _weight: std::marker::PhantomData<W>,
}

/// Context over concrete rational weights.
pub type ConcreteCtx = CmpCtx<Rational, ConcreteResolver>;

impl ConcreteCtx {
    pub fn concrete() -> Self {
        CmpCtx::new(ConcreteResolver::default())
    }
}

impl<W: Weight, R: BatchResolver<W>> CmpCtx<W, R> {
    pub fn new(resolver: R) -> Self {
        CmpCtx {
            resolver,
            counters: Counters::default(),
            open: false,
            pending_in_batch: 0,
            _weight: std::marker::PhantomData,
        }
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    pub fn counters_mut(&mut self) -> &mut Counters {
        &mut self.counters
    }

    pub fn resolver(&self) -> &R {
        &self.resolver
    }

    pub fn into_resolver(self) -> (R, Counters) {
        (self.resolver, self.counters)
    }

    /// Marks the start of one parallel phase of the algorithm (a Bellman-Ford
    /// iteration, one min-plus product, one output tournament, ...).
    pub fn parallel_step(&mut self) {
        self.counters.parallel_steps += 1;
    }

    /// Compares two extended weights as a singleton batch.
    ///
    /// Returns the ordering of `x` versus `y` (at λ* in parametric mode).
    /// Must not be called while a batch is open.
    pub fn compare(&mut self, x: &Ext<W>, y: &Ext<W>) -> Ordering {
        assert!(!self.open, "compare() while a batch is open; use defer()");
        self.counters.comparisons += 1;
        self.counters.work_units += 1;
        self.resolver.submit(x, y, &mut self.counters);
        self.counters.comparison_rounds += 1;
        let out = self.resolver.flush(&mut self.counters);
        debug_assert_eq!(out.len(), 1);
        out[0]
    }

    pub fn batch_begin(&mut self) -> Result<(), BatchMisuse> {
        if self.open {
            return Err(BatchMisuse("batch_begin while a batch is already open"));
        }
        self.open = true;
        self.pending_in_batch = 0;
        Ok(())
    }

    /// Queues a comparison inside the open batch; the outcome is available
    /// from the slice returned by [`CmpCtx::batch_end`], at the returned
    /// index.
    pub fn defer(&mut self, x: &Ext<W>, y: &Ext<W>) -> usize {
        assert!(self.open, "defer() without an open batch");
        self.counters.comparisons += 1;
        self.counters.work_units += 1;
        self.resolver.submit(x, y, &mut self.counters);
        let id = self.pending_in_batch;
        self.pending_in_batch += 1;
        id
    }

    /// Resolves the open batch and returns all outcomes in submission order.
    ///
    /// An empty batch does not count as a comparison round.
    pub fn batch_end(&mut self) -> Result<Vec<Ordering>, BatchMisuse> {
        if !self.open {
            return Err(BatchMisuse("batch_end without an open batch"));
        }
        self.open = false;
        if self.pending_in_batch > 0 {
            self.counters.comparison_rounds += 1;
        }
        Ok(self.resolver.flush(&mut self.counters))
    }
}
