//! Concrete integer-valued submodular functions and a brute-force
//! submodularity check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{enumerate_subsets, Mask};
use crate::oracle::SubmodularOracle;

/// Largest ground set [`check_submodular`] will scan.
pub const CHECK_LIMIT: usize = 16;
/// Largest ground set a [`TableFunction`] may have.
pub const TABLE_LIMIT: usize = 20;

/// Graph with nonnegative integer edge weights; evaluates to the cut value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize, i64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, directed: bool, edges: Vec<(usize, usize, i64)>) -> Result<Self> {
        for &(u, v, w) in &edges {
            if u >= n || v >= n || u == v || w < 0 {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {v}, {w}) on {n} vertices"
                )));
            }
        }
        Ok(WeightedGraph { n, directed, edges })
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(usize, usize, i64)] {
        &self.edges
    }

    /// Directed: weight leaving `x`. Undirected: weight with exactly one endpoint in `x`.
    pub fn cut_value(&self, x: Mask) -> i64 {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| {
                let (iu, iv) = (x.contains(u), x.contains(v));
                if self.directed {
                    iu && !iv
                } else {
                    iu != iv
                }
            })
            .map(|&(_, _, w)| w)
            .sum()
    }

    pub fn total_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.2).sum()
    }
}

impl SubmodularOracle for WeightedGraph {
    fn n(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: Mask) -> i64 {
        self.cut_value(x)
    }

    fn value_bound(&self) -> Option<i64> {
        Some(self.total_weight())
    }
}

/// Weighted coverage: `f(X)` is the weight of the items covered by `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageSystem {
    universe_weights: Vec<i64>,
    incidence: Vec<Vec<usize>>,
}

impl CoverageSystem {
    pub fn new(universe_weights: Vec<i64>, incidence: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(w) = universe_weights.iter().find(|&&w| w < 0) {
            return Err(Error::InvalidInstance(format!("negative item weight {w}")));
        }
        let m = universe_weights.len();
        for (i, items) in incidence.iter().enumerate() {
            if let Some(j) = items.iter().find(|&&j| j >= m) {
                return Err(Error::InvalidInstance(format!(
                    "element {i} covers item {j} outside a universe of {m}"
                )));
            }
        }
        Ok(CoverageSystem {
            universe_weights,
            incidence,
        })
    }

    pub fn universe_weights(&self) -> &[i64] {
        &self.universe_weights
    }

    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    pub fn coverage_value(&self, x: Mask) -> i64 {
        let mut covered = vec![false; self.universe_weights.len()];
        for v in x.elements() {
            for &j in &self.incidence[v] {
                covered[j] = true;
            }
        }
        covered
            .iter()
            .zip(&self.universe_weights)
            .filter(|(c, _)| **c)
            .map(|(_, w)| w)
            .sum()
    }
}

impl SubmodularOracle for CoverageSystem {
    fn n(&self) -> usize {
        self.incidence.len()
    }

    fn evaluate(&self, x: Mask) -> i64 {
        self.coverage_value(x)
    }

    fn value_bound(&self) -> Option<i64> {
        Some(self.universe_weights.iter().sum())
    }
}

/// Explicit value table indexed by mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableFunction {
    n: usize,
    values: Vec<i64>,
}

impl TableFunction {
    pub fn new(n: usize, values: Vec<i64>) -> Result<Self> {
        if n > TABLE_LIMIT {
            return Err(Error::GroundSetTooLarge {
                n,
                max: TABLE_LIMIT,
            });
        }
        if values.len() != 1usize << n {
            return Err(Error::InvalidInstance(format!(
                "table over {n} elements needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        Ok(TableFunction { n, values })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn table_value(&self, x: Mask) -> Result<i64> {
        self.values
            .get(x.bits() as usize)
            .filter(|_| x.fits(self.n))
            .copied()
            .ok_or(Error::IndexOutOfRange {
                mask: x.bits(),
                n: self.n,
            })
    }
}

impl SubmodularOracle for TableFunction {
    fn n(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: Mask) -> i64 {
        match self.table_value(x) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }

    fn value_bound(&self) -> Option<i64> {
        self.values.iter().map(|v| v.saturating_abs()).max()
    }
}

/// `base(X) + sum_{v in X} weights[v]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularShift<F> {
    base: F,
    weights: Vec<i64>,
}

impl<F: SubmodularOracle> ModularShift<F> {
    pub fn new(base: F, weights: Vec<i64>) -> Result<Self> {
        if weights.len() != base.n() {
            return Err(Error::InvalidInstance(format!(
                "{} shift weights for a ground set of {}",
                weights.len(),
                base.n()
            )));
        }
        Ok(ModularShift { base, weights })
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }
}

impl<F: SubmodularOracle> SubmodularOracle for ModularShift<F> {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, x: Mask) -> i64 {
        self.base.evaluate(x) + x.elements().map(|v| self.weights[v]).sum::<i64>()
    }

    fn value_bound(&self) -> Option<i64> {
        let shift: i64 = self.weights.iter().map(|w| w.abs()).sum();
        self.base.value_bound().map(|b| b + shift)
    }
}

/// Evaluate `f` on every subset.
pub fn tabulate<F: SubmodularOracle + ?Sized>(f: &F) -> Result<TableFunction> {
    let n = f.n();
    if n > TABLE_LIMIT {
        return Err(Error::GroundSetTooLarge {
            n,
            max: TABLE_LIMIT,
        });
    }
    TableFunction::new(n, enumerate_subsets(n).map(|x| f.evaluate(x)).collect())
}

/// Witness of a failed local submodularity inequality:
/// `f(X+u) + f(X+v) < f(X+u+v) + f(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub x: Mask,
    pub u: usize,
    pub v: usize,
}

/// Exhaustive submodularity check using the local two-element form, which is
/// equivalent to the global inequality. Returns the first violation found,
/// scanning `X` ascending, then `u < v` ascending.
pub fn check_submodular<F: SubmodularOracle + ?Sized>(f: &F) -> Result<Option<Violation>> {
    let n = f.n();
    if n > CHECK_LIMIT {
        return Err(Error::GroundSetTooLarge {
            n,
            max: CHECK_LIMIT,
        });
    }
    let table = tabulate(f)?;
    let val = |m: u64| table.values[m as usize];
    for x in 0..1u64 << n {
        let fx = val(x);
        for u in (0..n).filter(|&u| x >> u & 1 == 0) {
            let xu = x | 1 << u;
            for v in (u + 1..n).filter(|&v| x >> v & 1 == 0) {
                let xv = x | 1 << v;
                if val(xu) + val(xv) < val(xu | xv) + fx {
                    return Ok(Some(Violation { x: Mask(x), u, v }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FnOracle;

    fn m(v: &[usize]) -> Mask {
        Mask::from_elements(v.iter().copied())
    }

    fn triangle() -> WeightedGraph {
        WeightedGraph::new(3, false, vec![(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap()
    }

    #[test]
    fn cut_examples() {
        let edge = WeightedGraph::new(2, false, vec![(0, 1, 1)]).unwrap();
        assert_eq!(edge.cut_value(m(&[0])), 1);
        let tri = triangle();
        assert_eq!(tri.cut_value(m(&[0, 1])), 2);
        assert_eq!(tri.cut_value(Mask::EMPTY), 0);
        assert_eq!(tri.cut_value(Mask::full(3)), 0);
    }

    #[test]
    fn directed_cut_counts_outgoing_only() {
        let g = WeightedGraph::new(2, true, vec![(0, 1, 3)]).unwrap();
        assert_eq!(g.cut_value(m(&[0])), 3);
        assert_eq!(g.cut_value(m(&[1])), 0);
    }

    #[test]
    fn graph_rejects_bad_edges() {
        assert!(WeightedGraph::new(2, false, vec![(0, 0, 1)]).is_err());
        assert!(WeightedGraph::new(2, false, vec![(0, 2, 1)]).is_err());
        assert!(WeightedGraph::new(2, false, vec![(0, 1, -1)]).is_err());
    }

    #[test]
    fn coverage_examples() {
        let shared = CoverageSystem::new(vec![1], vec![vec![], vec![0], vec![0]]).unwrap();
        assert_eq!(shared.coverage_value(Mask::EMPTY), 0);
        assert_eq!(shared.coverage_value(m(&[1, 2])), 1);
        let disjoint = CoverageSystem::new(vec![2, 3], vec![vec![], vec![0], vec![1]]).unwrap();
        assert_eq!(disjoint.coverage_value(m(&[1, 2])), 5);
        assert!(CoverageSystem::new(vec![1], vec![vec![1]]).is_err());
    }

    #[test]
    fn table_lookup() {
        let t = TableFunction::new(2, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(t.table_value(m(&[0])).unwrap(), 1);
        assert_eq!(t.table_value(Mask::EMPTY).unwrap(), 0);
        assert_eq!(t.table_value(Mask::full(2)).unwrap(), 0);
        assert!(matches!(
            t.table_value(m(&[2])),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(TableFunction::new(2, vec![0; 3]).is_err());
    }

    #[test]
    fn modular_shift_adds_weights() {
        let s = ModularShift::new(triangle(), vec![1, -2, 5]).unwrap();
        assert_eq!(s.evaluate(m(&[0, 1])), 2 + 1 - 2);
        assert_eq!(s.value_bound(), Some(3 + 8));
        assert!(ModularShift::new(triangle(), vec![1]).is_err());
    }

    #[test]
    fn submodularity_check_examples() {
        assert_eq!(check_submodular(&triangle()).unwrap(), None);
        let card = FnOracle::new(6, |x: Mask| x.cardinality() as i64);
        assert_eq!(check_submodular(&card).unwrap(), None);
        let sup = TableFunction::new(2, vec![0, 0, 0, 1]).unwrap();
        assert_eq!(
            check_submodular(&sup).unwrap(),
            Some(Violation {
                x: Mask::EMPTY,
                u: 0,
                v: 1
            })
        );
        let big = FnOracle::new(17, |_| 0);
        assert!(matches!(
            check_submodular(&big),
            Err(Error::GroundSetTooLarge { .. })
        ));
    }

    #[test]
    fn undirected_cut_is_symmetric() {
        let g = WeightedGraph::new(
            5,
            false,
            vec![(0, 1, 2), (1, 2, 7), (3, 4, 1), (0, 4, 3), (2, 3, 5)],
        )
        .unwrap();
        for x in enumerate_subsets(5) {
            assert_eq!(g.cut_value(x), g.cut_value(x.complement(5)));
        }
    }
}
