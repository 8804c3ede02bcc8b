//! The evaluation-oracle interface.
//!
//! A [`SubmodularOracle`] is only ever accessed through value queries. Values
//! are 64-bit signed integers; see [`crate::sfm::TieBreak`] for the overflow
//! bound the solver enforces.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::ground::Mask;

/// Integer-valued set function on `{0, .., n-1}`.
///
/// `evaluate` must be deterministic and free of observable side effects.
pub trait SubmodularOracle: Sync {
    fn n(&self) -> usize;

    fn evaluate(&self, x: Mask) -> i64;

    /// A bound `M >= max_X |f(X)|`, when the instance knows one.
    fn value_bound(&self) -> Option<i64> {
        None
    }
}

impl<F: SubmodularOracle + ?Sized> SubmodularOracle for &F {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn evaluate(&self, x: Mask) -> i64 {
        (**self).evaluate(x)
    }

    fn value_bound(&self) -> Option<i64> {
        (**self).value_bound()
    }
}

impl<F: SubmodularOracle + ?Sized> SubmodularOracle for Box<F> {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn evaluate(&self, x: Mask) -> i64 {
        (**self).evaluate(x)
    }

    fn value_bound(&self) -> Option<i64> {
        (**self).value_bound()
    }
}

/// Adapter turning a closure into an oracle.
pub struct FnOracle<F> {
    n: usize,
    f: F,
    bound: Option<i64>,
}

impl<F: Fn(Mask) -> i64 + Sync> FnOracle<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnOracle { n, f, bound: None }
    }

    pub fn with_bound(mut self, bound: i64) -> Self {
        self.bound = Some(bound);
        self
    }
}

impl<F: Fn(Mask) -> i64 + Sync> SubmodularOracle for FnOracle<F> {
    fn n(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: Mask) -> i64 {
        (self.f)(x)
    }

    fn value_bound(&self) -> Option<i64> {
        self.bound
    }
}

/// Wraps an oracle and counts evaluations. The counter is shared across
/// threads; the total is exact but carries no ordering information.
pub struct Counting<F> {
    inner: F,
    calls: AtomicU64,
}

impl<F: SubmodularOracle> Counting<F> {
    pub fn new(inner: F) -> Self {
        Counting {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }
}

impl<F: SubmodularOracle> SubmodularOracle for Counting<F> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn evaluate(&self, x: Mask) -> i64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(x)
    }

    fn value_bound(&self) -> Option<i64> {
        self.inner.value_bound()
    }
}
