//! Exhaustive reference computations.
//!
//! Nothing here calls into the solver, the minimum-norm-point code, the
//! family validators or the enumeration helpers; the only shared piece is
//! [`Mask`] (and the oracle trait used to read `f`). Agreement between this
//! module and the solver is therefore independent evidence.

use crate::error::{Error, Result};
use crate::ground::Mask;
use crate::oracle::SubmodularOracle;

/// Hard cap for [`brute_min`] and [`brute_kth_distinct`].
pub const BRUTE_LIMIT: usize = 24;
/// Cap for the structural checks, which are far more expensive.
pub const STRUCTURE_LIMIT: usize = 10;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BruteReport {
    /// `None` when no subset is feasible.
    pub min_value: Option<i64>,
    pub all_minimizers: Vec<Mask>,
    /// Containment-minimal elements of `all_minimizers`.
    pub minimal_minimizers: Vec<Mask>,
}

impl BruteReport {
    pub fn is_feasible(&self) -> bool {
        !self.all_minimizers.is_empty()
    }
}

fn check_size(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::GroundSetTooLarge { n, max })
    } else {
        Ok(())
    }
}

fn table<F: SubmodularOracle + ?Sized>(f: &F) -> Vec<i64> {
    (0..1u64 << f.n()).map(|m| f.evaluate(Mask(m))).collect()
}

fn minimal_elements(sets: &[u64]) -> Vec<Mask> {
    sets.iter()
        .filter(|&&x| !sets.iter().any(|&y| y != x && y & !x == 0))
        .map(|&x| Mask(x))
        .collect()
}

/// Minimum of `f` over `{X : member(X)}` by scanning all `2^n` subsets.
pub fn brute_min<F, P>(f: &F, member: P) -> Result<BruteReport>
where
    F: SubmodularOracle + ?Sized,
    P: Fn(Mask) -> bool,
{
    let n = f.n();
    check_size(n, BRUTE_LIMIT)?;
    let mut best: Option<i64> = None;
    let mut argmin: Vec<u64> = Vec::new();
    for m in 0..1u64 << n {
        if !member(Mask(m)) {
            continue;
        }
        let v = f.evaluate(Mask(m));
        match best {
            Some(b) if v > b => {}
            Some(b) if v == b => argmin.push(m),
            _ => {
                best = Some(v);
                argmin.clear();
                argmin.push(m);
            }
        }
    }
    Ok(BruteReport {
        min_value: best,
        minimal_minimizers: minimal_elements(&argmin),
        all_minimizers: argmin.into_iter().map(Mask).collect(),
    })
}

/// Result of a structural check: one entry per checked set, with the witness
/// found for it (if any).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureCheck {
    pub witnesses: Vec<(Mask, Option<(Mask, Mask)>)>,
}

impl StructureCheck {
    pub fn holds(&self) -> bool {
        self.witnesses.iter().all(|(_, w)| w.is_some())
    }

    pub fn first_failure(&self) -> Option<Mask> {
        self.witnesses
            .iter()
            .find(|(_, w)| w.is_none())
            .map(|(x, _)| *x)
    }
}

/// Submasks of `of` with at most `k` elements, smallest cardinality first.
fn small_submasks(of: u64, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut sub = of;
    loop {
        if sub.count_ones() as usize <= k {
            out.push(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & of;
    }
    out.sort_by_key(|s| (s.count_ones(), *s));
    out
}

/// Search `S ⊆ x`, `T ⊆ V \ x` (both of size `<= k`) such that no set in
/// `bad` lies in the box `[S, V \ T]`.
fn find_box_avoiding(n: usize, x: u64, k: usize, bad: &[u64]) -> Option<(Mask, Mask)> {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let outside = full & !x;
    let ts = small_submasks(outside, k);
    for s in small_submasks(x, k) {
        let above: Vec<u64> = bad.iter().copied().filter(|&y| y & s == s).collect();
        if let Some(&t) = ts.iter().find(|&&t| above.iter().all(|&y| y & t != 0)) {
            return Some((Mask(s), Mask(t)));
        }
    }
    None
}

fn minimizers_over<P: Fn(Mask) -> bool>(values: &[i64], member: &P) -> Option<(i64, Vec<u64>)> {
    let best = (0..values.len() as u64)
        .filter(|&m| member(Mask(m)))
        .map(|m| values[m as usize])
        .min()?;
    let argmin = (0..values.len() as u64)
        .filter(|&m| member(Mask(m)) && values[m as usize] == best)
        .collect();
    Some((best, argmin))
}

/// For every minimizer `X*` of `f` over `F`, look for `S ⊆ X*`,
/// `T ⊆ V \ X*` with `max(|S|, |T|) <= k` such that `X*` minimizes `f` over
/// the whole box `{Y : S ⊆ Y ⊆ V \ T}`.
pub fn brute_check_box_optimality<F, P>(f: &F, member: P, k: usize) -> Result<StructureCheck>
where
    F: SubmodularOracle + ?Sized,
    P: Fn(Mask) -> bool,
{
    let n = f.n();
    check_size(n, STRUCTURE_LIMIT)?;
    let values = table(f);
    let Some((best, argmin)) = minimizers_over(&values, &member) else {
        return Ok(StructureCheck::default());
    };
    let below: Vec<u64> = (0..values.len() as u64)
        .filter(|&m| values[m as usize] < best)
        .collect();
    let witnesses = argmin
        .iter()
        .map(|&x| (Mask(x), find_box_avoiding(n, x, k, &below)))
        .collect();
    Ok(StructureCheck { witnesses })
}

/// For every containment-minimal minimizer `X*` of `f` over `F`, look for a
/// box as in [`brute_check_box_optimality`] in which `X*` is the unique minimal
/// minimizer: every box set scores at least `f(X*)`, and those that tie
/// contain `X*`.
pub fn brute_check_unique_minimal<F, P>(f: &F, member: P, k: usize) -> Result<StructureCheck>
where
    F: SubmodularOracle + ?Sized,
    P: Fn(Mask) -> bool,
{
    let n = f.n();
    check_size(n, STRUCTURE_LIMIT)?;
    let values = table(f);
    let Some((best, argmin)) = minimizers_over(&values, &member) else {
        return Ok(StructureCheck::default());
    };
    let witnesses = minimal_elements(&argmin)
        .into_iter()
        .map(|x| {
            let x = x.bits();
            let bad: Vec<u64> = (0..values.len() as u64)
                .filter(|&y| {
                    let v = values[y as usize];
                    v < best || (v == best && x & !y != 0)
                })
                .collect();
            (Mask(x), find_box_avoiding(n, x, k, &bad))
        })
        .collect();
    Ok(StructureCheck { witnesses })
}

/// Interval properties of a complement of a `k`-hierarchical lattice: every
/// member `X` has some `S ⊆ X` with `|S| <= k` and `[S, X] ⊆ F`, and some
/// `T ⊆ V \ X` with `|T| <= k` and `[X, V \ T] ⊆ F`.
///
/// Returns one check per direction: `(down, up)`. The witness pair holds
/// `(S, ∅)` for the downward check and `(∅, T)` for the upward one.
pub fn brute_check_intervals<P>(n: usize, member: P, k: usize) -> Result<(StructureCheck, StructureCheck)>
where
    P: Fn(Mask) -> bool,
{
    check_size(n, STRUCTURE_LIMIT)?;
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let inside: Vec<bool> = (0..=full).map(|m| member(Mask(m))).collect();
    let mut down = StructureCheck::default();
    let mut up = StructureCheck::default();
    for x in (0..=full).filter(|&m| inside[m as usize]) {
        // Non-members Y ⊆ X: S must avoid lying inside any of them.
        let mut below = Vec::new();
        let mut sub = x;
        loop {
            if !inside[sub as usize] {
                below.push(sub);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & x;
        }
        let s = small_submasks(x, k)
            .into_iter()
            .find(|&s| below.iter().all(|&y| s & !y != 0));
        down.witnesses.push((Mask(x), s.map(|s| (Mask(s), Mask::EMPTY))));

        // Non-members Y ⊇ X: T must meet each of them.
        let outside = full & !x;
        let mut above = Vec::new();
        let mut sub = outside;
        loop {
            if !inside[(x | sub) as usize] {
                above.push(x | sub);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & outside;
        }
        let t = small_submasks(outside, k)
            .into_iter()
            .find(|&t| above.iter().all(|&y| y & t != 0));
        up.witnesses.push((Mask(x), t.map(|t| (Mask::EMPTY, Mask(t)))));
    }
    Ok((down, up))
}

/// The `k` smallest distinct values of `f`, each with its numerically
/// smallest witness.
pub fn brute_kth_distinct<F: SubmodularOracle + ?Sized>(f: &F, k: usize) -> Result<Vec<(i64, Mask)>> {
    check_size(f.n(), BRUTE_LIMIT)?;
    let mut pairs: Vec<(i64, u64)> = (0..1u64 << f.n())
        .map(|m| (f.evaluate(Mask(m)), m))
        .collect();
    pairs.sort_unstable();
    pairs.dedup_by_key(|p| p.0);
    if pairs.len() < k {
        return Err(Error::ExhaustedValues {
            found: pairs.len(),
            requested: k,
        });
    }
    Ok(pairs.into_iter().take(k).map(|(v, m)| (v, Mask(m))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FnOracle;

    fn tri_cut(x: Mask) -> i64 {
        [(0, 1), (1, 2), (0, 2)]
            .iter()
            .filter(|&&(u, v)| x.contains(u) != x.contains(v))
            .count() as i64
    }

    #[test]
    fn brute_min_examples() {
        let tri = FnOracle::new(3, tri_cut);
        let r = brute_min(&tri, |x: Mask| !x.is_empty()).unwrap();
        assert_eq!(r.min_value, Some(0));
        assert_eq!(r.all_minimizers, vec![Mask::full(3)]);

        let r = brute_min(&tri, |_| false).unwrap();
        assert_eq!(r, BruteReport::default());

        let zero = FnOracle::new(4, |_| 0);
        let r = brute_min(&zero, |_| true).unwrap();
        assert_eq!(r.min_value, Some(0));
        assert_eq!(r.minimal_minimizers, vec![Mask::EMPTY]);
        assert_eq!(r.all_minimizers.len(), 16);

        let big = FnOracle::new(25, |_| 0);
        assert!(brute_min(&big, |_| true).is_err());
    }

    #[test]
    fn box_checks_hold_trivially_at_k_equals_n() {
        let f = FnOracle::new(4, |x: Mask| (x.bits() as i64 * 7919) % 13);
        let member = |x: Mask| x.cardinality() % 2 == 1;
        assert!(brute_check_box_optimality(&f, member, 4).unwrap().holds());
        assert!(brute_check_unique_minimal(&f, member, 4).unwrap().holds());
    }

    #[test]
    fn box_check_on_complement_of_empty_set() {
        // Feasible: nonempty sets, a 1-hierarchical complement. The feasible
        // minimizer V of the triangle cut already minimizes over all of 2^V,
        // but ties with ∅ there; only S = {0} makes it the unique minimal one.
        let tri = FnOracle::new(3, tri_cut);
        let r = brute_check_box_optimality(&tri, |x: Mask| !x.is_empty(), 1).unwrap();
        assert_eq!(r.witnesses, vec![(Mask::full(3), Some((Mask::EMPTY, Mask::EMPTY)))]);
        let r = brute_check_unique_minimal(&tri, |x: Mask| !x.is_empty(), 1).unwrap();
        assert_eq!(r.witnesses, vec![(Mask::full(3), Some((Mask(1), Mask::EMPTY)))]);
    }

    #[test]
    fn box_check_negative_control() {
        // Feasible family: sets of size exactly 2 in a 4-set. Its complement
        // is not 1-hierarchical, and f(X) = |X| has minimizers of size 2
        // that no box with |S|,|T| <= 1 isolates from the smaller sets.
        let card = FnOracle::new(4, |x: Mask| x.cardinality() as i64);
        let r = brute_check_box_optimality(&card, |x: Mask| x.cardinality() == 2, 1).unwrap();
        assert!(!r.holds());
        assert!(r.first_failure().is_some());
    }

    #[test]
    fn interval_checks() {
        let (down, up) = brute_check_intervals(4, |_| true, 0).unwrap();
        assert!(down.holds() && up.holds());
        assert!(down
            .witnesses
            .iter()
            .all(|(_, w)| *w == Some((Mask::EMPTY, Mask::EMPTY))));

        // Complement of the interval lattice [{0}, {0,1,2}].
        let ring = |x: Mask| x.contains(0) && !x.contains(3);
        let (down, up) = brute_check_intervals(4, |x| !ring(x), 1).unwrap();
        assert!(down.holds() && up.holds());

        // Exactly-two sets again: the interval property fails for k = 1.
        let (down, _) = brute_check_intervals(4, |x: Mask| x.cardinality() == 2, 1).unwrap();
        assert!(!down.holds());
    }

    #[test]
    fn kth_distinct_examples() {
        let card = FnOracle::new(3, |x: Mask| x.cardinality() as i64);
        let vals: Vec<i64> = brute_kth_distinct(&card, 3).unwrap().iter().map(|p| p.0).collect();
        assert_eq!(vals, vec![0, 1, 2]);
        let edge = FnOracle::new(2, |x: Mask| i64::from(x.contains(0) != x.contains(1)));
        let r = brute_kth_distinct(&edge, 2).unwrap();
        assert_eq!(r, vec![(0, Mask::EMPTY), (1, Mask(1))]);
        let five = FnOracle::new(3, |_| 5);
        assert_eq!(brute_kth_distinct(&five, 1).unwrap(), vec![(5, Mask::EMPTY)]);
        assert!(matches!(
            brute_kth_distinct(&five, 2),
            Err(Error::ExhaustedValues { found: 1, requested: 2 })
        ));
    }
}
