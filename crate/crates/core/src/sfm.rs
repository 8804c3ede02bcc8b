//! Unconstrained submodular minimization and the box-restricted solve.
//!
//! [`min_norm_sfm`] runs the Fujishige-Wolfe minimum-norm-point iteration on
//! the base polytope of `f - f(∅)`. Floating point lives only inside the
//! iteration; termination is decided by an integer duality certificate: for
//! any point `x` of the base polytope, `min f >= f(∅) + sum_v min(x_v, 0)`,
//! so once the best level set found is within 1 of that bound it is optimal.
//!
//! [`min_over_box`] minimizes over `{X : S ⊆ X ⊆ V \ T}` by contracting `S`,
//! deleting `T`, and applying the tie-break `g(X) = (n+1) f(X) + |X|`, whose
//! unique minimizer is the containment-minimal minimizer of `f`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ground::{deposit, Mask};
use crate::oracle::{Counting, SubmodularOracle};

/// Values are refused by the tie-break once `(n+1) M + n` reaches this.
pub const OVERFLOW_LIMIT: i64 = 1 << 62;
/// Largest contracted ground set the exhaustive fallback accepts.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Vertex of the base polytope of `f - f(∅)` produced by the greedy rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseVertex {
    pub coordinates: Vec<i64>,
    pub generating_order: Vec<usize>,
}

/// Greedy vertex plus `f` on every prefix of `order` (index 0 is `f(∅)`).
fn greedy_with_prefixes<F: SubmodularOracle + ?Sized>(f: &F, order: &[usize]) -> (BaseVertex, Vec<i64>) {
    let mut coordinates = vec![0i64; f.n()];
    let mut prefix_values = Vec::with_capacity(order.len() + 1);
    let mut prefix = Mask::EMPTY;
    let mut prev = f.evaluate(prefix);
    prefix_values.push(prev);
    for &v in order {
        prefix = prefix.insert(v);
        let cur = f.evaluate(prefix);
        coordinates[v] = cur - prev;
        prefix_values.push(cur);
        prev = cur;
    }
    (
        BaseVertex {
            coordinates,
            generating_order: order.to_vec(),
        },
        prefix_values,
    )
}

/// Edmonds' greedy vertex: `x[order_i] = f(P_i) - f(P_{i-1})` for the prefixes
/// `P_i` of `order`.
pub fn greedy_vertex<F: SubmodularOracle + ?Sized>(f: &F, order: &[usize]) -> BaseVertex {
    debug_assert!({
        let mut seen = order.to_vec();
        seen.sort_unstable();
        seen == (0..f.n()).collect::<Vec<_>>()
    });
    greedy_with_prefixes(f, order).0
}

#[derive(Clone, Debug)]
pub struct WolfeConfig {
    /// Major-cycle cap; `None` means `max(10 n^3, 100)`.
    pub max_major_cycles: Option<usize>,
    /// Relative pivot threshold below which the active set is treated as
    /// affinely dependent.
    pub degeneracy_tol: f64,
    /// Convex coefficients below this are dropped from the active set.
    pub drop_tol: f64,
    /// Relative tolerance of Wolfe's criterion `|x|^2 - <x, q> <= tol`.
    pub optimality_tol: f64,
    /// Keep a per-cycle record of bounds.
    pub record_trace: bool,
}

impl Default for WolfeConfig {
    fn default() -> Self {
        WolfeConfig {
            max_major_cycles: None,
            degeneracy_tol: 1e-10,
            drop_tol: 1e-12,
            optimality_tol: 1e-12,
            record_trace: false,
        }
    }
}

/// One major cycle as seen from outside.
#[derive(Clone, Debug, PartialEq)]
pub struct WolfeStep {
    pub best_value: i64,
    pub lower_bound: f64,
    pub norm_sq: f64,
    pub active_vertices: usize,
}

#[derive(Clone, Debug)]
pub struct SfmResult {
    pub minimizer: Mask,
    pub value: i64,
    /// `value - (f(∅) + sum_v min(x_v, 0))` at return; below 1.
    pub certificate_gap: f64,
    pub oracle_calls: u64,
    pub major_cycles: usize,
    pub trace: Vec<WolfeStep>,
}

/// Active set, convex weights and current point of the iteration.
struct WolfeState {
    vertices: Vec<Vec<i64>>,
    weights: Vec<f64>,
    point: Vec<f64>,
    best_set: Mask,
    best_value: i64,
}

impl WolfeState {
    fn recompute_point(&mut self) {
        self.point.iter_mut().for_each(|p| *p = 0.0);
        for (q, &w) in self.vertices.iter().zip(&self.weights) {
            for (p, &c) in self.point.iter_mut().zip(q.iter()) {
                *p += w * c as f64;
            }
        }
    }

    fn lower_bound(&self) -> f64 {
        self.point.iter().map(|&p| p.min(0.0)).sum()
    }

    fn norm_sq(&self) -> f64 {
        self.point.iter().map(|p| p * p).sum()
    }

    /// Record the best prefix set of a greedy pass (values relative to `f(∅)`).
    fn offer_prefixes(&mut self, order: &[usize], prefix_values: &[i64]) {
        let base = prefix_values[0];
        let mut set = Mask::EMPTY;
        for (i, &val) in prefix_values.iter().enumerate() {
            if i > 0 {
                set = set.insert(order[i - 1]);
            }
            let rel = val - base;
            if rel < self.best_value {
                self.best_value = rel;
                self.best_set = set;
            }
        }
    }

    /// Coefficients of the minimum-norm point of the affine hull of the
    /// active set, or `None` when the set is (numerically) affinely dependent.
    fn affine_minimizer(&self, degeneracy_tol: f64) -> Option<Vec<f64>> {
        let m = self.vertices.len();
        let mut gram = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let dot: f64 = self.vertices[i]
                    .iter()
                    .zip(&self.vertices[j])
                    .map(|(&a, &b)| a as f64 * b as f64)
                    .sum();
                gram[(i, j)] = dot;
                gram[(j, i)] = dot;
            }
        }
        // Lifting by a constant coordinate of size `scale` keeps the system
        // balanced; the normalized solution does not depend on it.
        let scale = (0..m).map(|i| gram[(i, i)]).fold(1.0f64, f64::max);
        gram.add_scalar_mut(scale);
        let chol = Cholesky::new(gram)?;
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d * d), hi.max(d * d)));
        if lo.is_nan() || lo <= degeneracy_tol * hi {
            return None;
        }
        let y = chol.solve(&DVector::from_element(m, 1.0));
        let total: f64 = y.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return None;
        }
        Some(y.iter().map(|&v| v / total).collect())
    }
}

fn ascending_order(point: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..point.len()).collect();
    order.sort_by(|&a, &b| point[a].total_cmp(&point[b]).then(a.cmp(&b)));
    order
}

/// Fujishige-Wolfe minimum-norm-point SFM with an integral stopping rule.
///
/// Returns a global minimizer of an integer-valued submodular `f`. Fails with
/// [`Error::NumericalStall`] if the cycle cap is hit, or the iteration stops
/// making progress, before the certificate gap drops below 1.
pub fn min_norm_sfm<F: SubmodularOracle + ?Sized>(f: &F, config: &WolfeConfig) -> Result<SfmResult> {
    let f = Counting::new(f);
    let n = f.n();
    let f_empty = f.evaluate(Mask::EMPTY);
    if n == 0 {
        return Ok(SfmResult {
            minimizer: Mask::EMPTY,
            value: f_empty,
            certificate_gap: 0.0,
            oracle_calls: f.calls(),
            major_cycles: 0,
            trace: Vec::new(),
        });
    }
    let max_cycles = config
        .max_major_cycles
        .unwrap_or_else(|| (10 * n * n * n).max(100));

    let order: Vec<usize> = (0..n).collect();
    let (first, prefixes) = greedy_with_prefixes(&f, &order);
    let mut state = WolfeState {
        point: first.coordinates.iter().map(|&c| c as f64).collect(),
        vertices: vec![first.coordinates],
        weights: vec![1.0],
        best_set: Mask::EMPTY,
        best_value: 0,
    };
    state.offer_prefixes(&order, &prefixes);

    let mut trace = Vec::new();
    let mut cycles = 0usize;
    loop {
        let lower = state.lower_bound();
        let magnitude = state
            .vertices
            .iter()
            .flat_map(|q| q.iter())
            .fold(1.0f64, |acc, &c| acc.max((c as f64).abs()));
        let gap = state.best_value as f64 - lower;
        // Guard the strict inequality against rounding in the point itself.
        let slack = 1e-9 * magnitude * (n as f64);
        if config.record_trace {
            trace.push(WolfeStep {
                best_value: f_empty + state.best_value,
                lower_bound: f_empty as f64 + lower,
                norm_sq: state.norm_sq(),
                active_vertices: state.vertices.len(),
            });
        }
        if gap + slack < 1.0 {
            return Ok(SfmResult {
                minimizer: state.best_set,
                value: f_empty + state.best_value,
                certificate_gap: gap,
                oracle_calls: f.calls(),
                major_cycles: cycles,
                trace,
            });
        }
        if cycles >= max_cycles {
            return Err(Error::NumericalStall {
                iterations: cycles,
                gap,
            });
        }
        cycles += 1;

        // Major cycle: linear minimization over the base polytope.
        let order = ascending_order(&state.point);
        let (vertex, prefixes) = greedy_with_prefixes(&f, &order);
        state.offer_prefixes(&order, &prefixes);
        let q = vertex.coordinates;

        let x_sq = state.norm_sq();
        let x_q: f64 = state.point.iter().zip(&q).map(|(&a, &b)| a * b as f64).sum();
        let q_sq: f64 = q.iter().map(|&c| (c as f64) * (c as f64)).sum();
        let optimal = x_sq - x_q <= config.optimality_tol * x_sq.max(q_sq).max(1.0);
        if optimal || state.vertices.contains(&q) {
            // x is (numerically) the minimum-norm point; only the refreshed
            // best set can still close the gap.
            if (state.best_value as f64 - lower) + slack < 1.0 {
                continue;
            }
            return Err(Error::NumericalStall {
                iterations: cycles,
                gap: state.best_value as f64 - lower,
            });
        }
        state.vertices.push(q);
        state.weights.push(0.0);

        // Minor cycles: move to the affine minimizer, shrinking the active set
        // whenever it leaves the convex hull.
        loop {
            let Some(alpha) = state.affine_minimizer(config.degeneracy_tol) else {
                // Drop the newest vertex and stop; the next major cycle will
                // either certify or stall.
                state.vertices.pop();
                state.weights.pop();
                let total: f64 = state.weights.iter().sum();
                state.weights.iter_mut().for_each(|w| *w /= total);
                break;
            };
            if alpha.iter().all(|&a| a > config.drop_tol) {
                state.weights = alpha;
                break;
            }
            let mut theta = 1.0f64;
            let mut leaving = None;
            for (i, (&lam, &a)) in state.weights.iter().zip(&alpha).enumerate() {
                if a <= config.drop_tol && lam > a {
                    let t = lam / (lam - a);
                    if t < theta || leaving.is_none() {
                        theta = theta.min(t);
                        leaving = Some(i);
                    }
                }
            }
            let leaving = leaving.expect("a nonpositive coefficient exists");
            for (lam, &a) in state.weights.iter_mut().zip(&alpha) {
                *lam = theta * a + (1.0 - theta) * *lam;
            }
            state.weights[leaving] = 0.0;
            let mut i = 0;
            while i < state.vertices.len() {
                if state.weights[i] <= config.drop_tol {
                    state.vertices.swap_remove(i);
                    state.weights.swap_remove(i);
                } else {
                    i += 1;
                }
            }
            let total: f64 = state.weights.iter().sum();
            state.weights.iter_mut().for_each(|w| *w /= total);
        }
        state.recompute_point();
    }
}

/// Exhaustive minimization; the first minimizer in ascending mask order wins.
pub fn exhaustive_min<F: SubmodularOracle + ?Sized>(f: &F) -> Result<SfmResult> {
    let n = f.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::GroundSetTooLarge {
            n,
            max: EXHAUSTIVE_LIMIT,
        });
    }
    let (minimizer, value) = (0..1u64 << n)
        .map(|m| (Mask(m), f.evaluate(Mask(m))))
        .min_by_key(|&(m, v)| (v, m))
        .expect("at least the empty set");
    Ok(SfmResult {
        minimizer,
        value,
        certificate_gap: 0.0,
        oracle_calls: 1 << n,
        major_cycles: 0,
        trace: Vec::new(),
    })
}

/// `f` restricted to `{X : S ⊆ X ⊆ V \ T}` and re-indexed onto the free
/// elements `V \ (S ∪ T)`: `f'(X) = f(X ∪ S)`.
pub struct Contracted<F> {
    inner: F,
    forced_in: Mask,
    free: Vec<usize>,
}

impl<F: SubmodularOracle> Contracted<F> {
    /// Map a mask over the free elements back to the original ground set.
    pub fn lift(&self, x: Mask) -> Mask {
        deposit(x.bits(), &self.free).union(self.forced_in)
    }

    pub fn free_elements(&self) -> &[usize] {
        &self.free
    }
}

impl<F: SubmodularOracle> SubmodularOracle for Contracted<F> {
    fn n(&self) -> usize {
        self.free.len()
    }

    fn evaluate(&self, x: Mask) -> i64 {
        self.inner.evaluate(self.lift(x))
    }

    fn value_bound(&self) -> Option<i64> {
        self.inner.value_bound()
    }
}

pub fn restrict_contract<F: SubmodularOracle>(f: F, s: Mask, t: Mask) -> Result<Contracted<F>> {
    if !s.is_disjoint(t) {
        return Err(Error::OverlappingST { s, t });
    }
    let free = Mask::full(f.n()).difference(s.union(t)).elements().collect();
    Ok(Contracted {
        inner: f,
        forced_in: s,
        free,
    })
}

/// `g(X) = (n_full + 1) f(X) + |X|`.
pub struct TieBreak<F> {
    inner: F,
    factor: i64,
}

impl<F: SubmodularOracle> TieBreak<F> {
    /// Recover `f(X)` from `g(X)`.
    pub fn original_value(&self, x: Mask, g_value: i64) -> i64 {
        (g_value - x.cardinality() as i64) / self.factor
    }
}

impl<F: SubmodularOracle> SubmodularOracle for TieBreak<F> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn evaluate(&self, x: Mask) -> i64 {
        self.factor * self.inner.evaluate(x) + x.cardinality() as i64
    }

    fn value_bound(&self) -> Option<i64> {
        self.inner
            .value_bound()
            .map(|m| self.factor * m + self.inner.n() as i64)
    }
}

/// Wrap `f` in the tie-break transform; `value_bound` must satisfy
/// `|f(X)| <= value_bound` for every `X`.
pub fn tie_break<F: SubmodularOracle>(f: F, n_full: usize, value_bound: i64) -> Result<TieBreak<F>> {
    let risk = || Error::OverflowRisk {
        n: n_full,
        bound: value_bound,
    };
    let factor = i64::try_from(n_full + 1).map_err(|_| risk())?;
    let total = value_bound
        .checked_abs()
        .and_then(|m| m.checked_mul(factor))
        .and_then(|v| v.checked_add(n_full as i64))
        .ok_or_else(risk)?;
    if total >= OVERFLOW_LIMIT {
        return Err(risk());
    }
    Ok(TieBreak { inner: f, factor })
}

/// Which unconstrained solver runs inside each box.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InnerEngine {
    /// Minimum-norm point, falling back to exhaustive search on a stall.
    #[default]
    Auto,
    Wolfe,
    Exhaustive,
}

#[derive(Clone, Debug, Default)]
pub struct SfmConfig {
    pub engine: InnerEngine,
    pub wolfe: WolfeConfig,
}

/// Minimal minimizer of `f` over a box lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxSolution {
    pub minimizer: Mask,
    pub value: i64,
    /// Evaluations of `f` spent on this box.
    pub oracle_calls: u64,
}

/// The unique containment-minimal minimizer of `f` over
/// `{X : S ⊆ X ⊆ V \ T}`, via contraction and the tie-break transform.
pub fn min_over_box<F: SubmodularOracle + ?Sized>(
    f: &F,
    s: Mask,
    t: Mask,
    n_full: usize,
    value_bound: i64,
    config: &SfmConfig,
) -> Result<BoxSolution> {
    let g = tie_break(restrict_contract(f, s, t)?, n_full, value_bound)?;
    let counted = Counting::new(&g);
    let solved = match config.engine {
        InnerEngine::Wolfe => min_norm_sfm(&counted, &config.wolfe)?,
        InnerEngine::Exhaustive => exhaustive_min(&counted)?,
        InnerEngine::Auto => match min_norm_sfm(&counted, &config.wolfe) {
            Err(Error::NumericalStall { .. }) if g.n() <= EXHAUSTIVE_LIMIT => {
                exhaustive_min(&counted)?
            }
            other => other?,
        },
    };
    Ok(BoxSolution {
        minimizer: g.inner.lift(solved.minimizer),
        value: g.original_value(solved.minimizer, solved.value),
        oracle_calls: counted.calls(),
    })
}
