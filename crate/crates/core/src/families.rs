//! Set families: ring-family lattices, explicit member lists, structural
//! validators, and the constraint families the solver minimizes over.
//!
//! A feasible family `F` is presented to the solver as a membership oracle
//! plus a declared hierarchy bound `k`: the promise is that `2^V \ F` is a
//! `k`-hierarchical lattice. The solver trusts `k`; validation is a separate,
//! exhaustive step that needs a witness partition and a small ground set.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::ground::{enumerate_subsets, Mask};

/// Largest ground set the exhaustive validators accept.
pub const VALIDATE_LIMIT: usize = 16;
/// Largest ground set for which witness partitions are materialized.
pub const WITNESS_LIMIT: usize = 14;

/// Membership oracle for a family of subsets.
pub trait Membership: Sync {
    fn contains(&self, x: Mask) -> bool;
}

impl<M: Membership + ?Sized> Membership for &M {
    fn contains(&self, x: Mask) -> bool {
        (**self).contains(x)
    }
}

impl<M: Membership + ?Sized> Membership for Box<M> {
    fn contains(&self, x: Mask) -> bool {
        (**self).contains(x)
    }
}

/// Feasible family for the solver, with its declared hierarchy bound.
pub trait ConstraintFamily: Membership {
    /// The `k` for which `2^V \ F` is claimed to be a `k`-hierarchical lattice.
    fn hierarchy_bound(&self) -> usize;

    /// The parts `F_1, .., F_k` of `2^V \ F`, if they can be produced.
    fn witness_partition(&self) -> Option<Vec<ExplicitFamily>> {
        None
    }
}

impl<C: ConstraintFamily + ?Sized> ConstraintFamily for &C {
    fn hierarchy_bound(&self) -> usize {
        (**self).hierarchy_bound()
    }

    fn witness_partition(&self) -> Option<Vec<ExplicitFamily>> {
        (**self).witness_partition()
    }
}

impl<C: ConstraintFamily + ?Sized> ConstraintFamily for Box<C> {
    fn hierarchy_bound(&self) -> usize {
        (**self).hierarchy_bound()
    }

    fn witness_partition(&self) -> Option<Vec<ExplicitFamily>> {
        (**self).witness_partition()
    }
}

/// Membership given by a closure, with a declared bound.
pub struct FnFamily<P> {
    pred: P,
    k: usize,
}

impl<P: Fn(Mask) -> bool + Sync> FnFamily<P> {
    pub fn new(k: usize, pred: P) -> Self {
        FnFamily { pred, k }
    }
}

impl<P: Fn(Mask) -> bool + Sync> Membership for FnFamily<P> {
    fn contains(&self, x: Mask) -> bool {
        (self.pred)(x)
    }
}

impl<P: Fn(Mask) -> bool + Sync> ConstraintFamily for FnFamily<P> {
    fn hierarchy_bound(&self) -> usize {
        self.k
    }
}

/// A lattice of sets as a ring family: `A ⊆ X ⊆ B` and every arc `u -> v`
/// has `u ∈ X ⇒ v ∈ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingFamily {
    n: usize,
    forced_in: Mask,
    allowed: Mask,
    arcs: Vec<(usize, usize)>,
    // successors[u] = heads of arcs leaving u
    successors: Vec<Mask>,
}

impl RingFamily {
    pub fn new(n: usize, forced_in: Mask, allowed: Mask, arcs: Vec<(usize, usize)>) -> Result<Self> {
        if !allowed.fits(n) {
            return Err(Error::InvalidInstance(format!(
                "allowed set {allowed:?} outside a ground set of {n}"
            )));
        }
        if !forced_in.is_subset(allowed) {
            return Err(Error::InvalidInstance(format!(
                "forced-in set {forced_in:?} is not inside allowed set {allowed:?}"
            )));
        }
        let mut successors = vec![Mask::EMPTY; n];
        for &(u, v) in &arcs {
            if u >= n || v >= n {
                return Err(Error::InvalidInstance(format!("arc ({u}, {v}) on {n} elements")));
            }
            successors[u] = successors[u].insert(v);
        }
        Ok(RingFamily {
            n,
            forced_in,
            allowed,
            arcs,
            successors,
        })
    }

    /// The interval `[lo, hi]`.
    pub fn interval(n: usize, lo: Mask, hi: Mask) -> Result<Self> {
        Self::new(n, lo, hi, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forced_in(&self) -> Mask {
        self.forced_in
    }

    pub fn allowed(&self) -> Mask {
        self.allowed
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn ring_membership(&self, x: Mask) -> bool {
        self.forced_in.is_subset(x)
            && x.is_subset(self.allowed)
            && x.elements().all(|u| self.successors[u].is_subset(x))
    }

    pub fn expand(&self) -> ExplicitFamily {
        ExplicitFamily::collect(self.n, self)
    }
}

impl Membership for RingFamily {
    fn contains(&self, x: Mask) -> bool {
        self.ring_membership(x)
    }
}

/// A family given by its member list (sorted, deduplicated).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplicitFamily {
    n: usize,
    members: Vec<Mask>,
}

impl ExplicitFamily {
    pub fn new<I: IntoIterator<Item = Mask>>(n: usize, members: I) -> Self {
        let mut members: Vec<Mask> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        debug_assert!(members.iter().all(|m| m.fits(n)));
        ExplicitFamily { n, members }
    }

    /// All members of `family` over `n` elements, by exhaustive scan.
    pub fn collect<M: Membership + ?Sized>(n: usize, family: &M) -> Self {
        ExplicitFamily {
            n,
            members: enumerate_subsets(n).filter(|&x| family.contains(x)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Mask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_set(&self, x: Mask) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// `2^V` minus this family.
    pub fn complement(&self) -> ExplicitFamily {
        ExplicitFamily {
            n: self.n,
            members: enumerate_subsets(self.n)
                .filter(|&x| !self.contains_set(x))
                .collect(),
        }
    }

    pub fn without(&self, drop: &[Mask]) -> ExplicitFamily {
        ExplicitFamily {
            n: self.n,
            members: self
                .members
                .iter()
                .copied()
                .filter(|x| !drop.contains(x))
                .collect(),
        }
    }

    pub fn with(&self, add: &[Mask]) -> ExplicitFamily {
        ExplicitFamily::new(self.n, self.members.iter().chain(add).copied())
    }
}

impl Membership for ExplicitFamily {
    fn contains(&self, x: Mask) -> bool {
        self.contains_set(x)
    }
}

fn closed_pairs(f: &ExplicitFamily, needs_closure: impl Fn(Mask, Mask) -> bool) -> bool {
    let m = f.members();
    m.iter().enumerate().all(|(i, &x)| {
        m[i + 1..].iter().all(|&y| {
            !needs_closure(x, y)
                || (f.contains_set(x.union(y)) && f.contains_set(x.intersection(y)))
        })
    })
}

/// Closed under pairwise union and intersection.
pub fn validate_lattice(f: &ExplicitFamily) -> bool {
    closed_pairs(f, |_, _| true)
}

/// Pairs with nonempty intersection keep union and intersection.
pub fn validate_intersecting(f: &ExplicitFamily) -> bool {
    closed_pairs(f, |x, y| !x.is_disjoint(y))
}

/// Pairs with nonempty intersection and union different from `V` keep union
/// and intersection.
pub fn validate_crossing(f: &ExplicitFamily) -> bool {
    let full = Mask::full(f.n());
    closed_pairs(f, |x, y| !x.is_disjoint(y) && x.union(y) != full)
}

/// For all non-members `X, Y`: `X ∪ Y ∈ F ⇔ X ∩ Y ∈ F`.
pub fn validate_parity(f: &ExplicitFamily) -> bool {
    let outside = f.complement();
    let o = outside.members();
    o.iter().enumerate().all(|(i, &x)| {
        o[i..]
            .iter()
            .all(|&y| f.contains_set(x.union(y)) == f.contains_set(x.intersection(y)))
    })
}

/// Checks the `k`-hierarchical lattice conditions for `parts = [F_1, .., F_k]`:
/// `F_1` is a lattice, and for `i >= 2` each pair in `F_i` either keeps both
/// union and intersection in `F_i` or drops one of them into `F_1 ∪ .. ∪ F_{i-1}`.
pub fn validate_k_hierarchical(parts: &[ExplicitFamily]) -> Result<bool> {
    let mut level: HashMap<Mask, usize> = HashMap::new();
    for (i, part) in parts.iter().enumerate() {
        for &x in part.members() {
            if level.insert(x, i).is_some() {
                return Err(Error::OverlappingParts(x));
            }
        }
    }
    let Some(first) = parts.first() else {
        return Ok(true);
    };
    if !validate_lattice(first) {
        return Ok(false);
    }
    for (i, part) in parts.iter().enumerate().skip(1) {
        let lower = |z: Mask| level.get(&z).is_some_and(|&j| j < i);
        let m = part.members();
        for (a, &x) in m.iter().enumerate() {
            for &y in &m[a + 1..] {
                let (u, w) = (x.union(y), x.intersection(y));
                let kept = part.contains_set(u) && part.contains_set(w);
                if !kept && !lower(u) && !lower(w) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Fixed point of adding `X ∪ Y` and `X ∩ Y` for every pair accepted by `rule`.
fn close_under(seed: &ExplicitFamily, rule: impl Fn(Mask, Mask) -> bool) -> ExplicitFamily {
    let mut members: Vec<Mask> = seed.members().to_vec();
    let mut known: HashSet<Mask> = members.iter().copied().collect();
    let mut next = 0;
    while next < members.len() {
        let x = members[next];
        next += 1;
        for j in 0..next {
            let y = members[j];
            if !rule(x, y) {
                continue;
            }
            for z in [x.union(y), x.intersection(y)] {
                if known.insert(z) {
                    members.push(z);
                }
            }
        }
    }
    ExplicitFamily::new(seed.n(), members)
}

/// Smallest lattice containing `seed`.
pub fn lattice_closure(seed: &ExplicitFamily) -> ExplicitFamily {
    close_under(seed, |_, _| true)
}

/// Smallest intersecting family containing `seed`.
pub fn intersecting_closure(seed: &ExplicitFamily) -> ExplicitFamily {
    close_under(seed, |x, y| !x.is_disjoint(y))
}

/// Smallest crossing family containing `seed`.
pub fn crossing_closure(seed: &ExplicitFamily) -> ExplicitFamily {
    let full = Mask::full(seed.n());
    close_under(seed, move |x, y| !x.is_disjoint(y) && x.union(y) != full)
}

/// Every subset is feasible; the excluded family is empty.
#[derive(Clone, Copy, Debug)]
pub struct Unconstrained {
    pub n: usize,
}

impl Membership for Unconstrained {
    fn contains(&self, _: Mask) -> bool {
        true
    }
}

impl ConstraintFamily for Unconstrained {
    fn hierarchy_bound(&self) -> usize {
        0
    }

    fn witness_partition(&self) -> Option<Vec<ExplicitFamily>> {
        Some(Vec::new())
    }
}

/// Sets lying in none of the given lattices. The union of `k` lattices is a
/// `k`-hierarchical lattice with parts `L_i \ (L_1 ∪ .. ∪ L_{i-1})`.
#[derive(Clone, Debug)]
pub struct ComplementOfRings {
    n: usize,
    rings: Vec<RingFamily>,
}

impl ComplementOfRings {
    pub fn new(n: usize, rings: Vec<RingFamily>) -> Result<Self> {
        if let Some(r) = rings.iter().find(|r| r.n() != n) {
            return Err(Error::InvalidInstance(format!(
                "ring over {} elements in a ground set of {n}",
                r.n()
            )));
        }
        Ok(ComplementOfRings { n, rings })
    }

    pub fn rings(&self) -> &[RingFamily] {
        &self.rings
    }

    pub fn complement_of_union_membership(&self, x: Mask) -> bool {
        !self.rings.iter().any(|r| r.ring_membership(x))
    }
}

impl Membership for ComplementOfRings {
    fn contains(&self, x: Mask) -> bool {
        self.complement_of_union_membership(x)
    }
}

impl ConstraintFamily for ComplementOfRings {
    fn hierarchy_bound(&self) -> usize {
        self.rings.len()
    }

    fn witness_partition(&self) -> Option<Vec<ExplicitFamily>> {
        if self.n > WITNESS_LIMIT {
            return None;
        }
        Some(
            (0..self.rings.len())
                .map(|i| {
                    let (earlier, rest) = self.rings.split_at(i);
                    let ring = &rest[0];
                    ExplicitFamily::new(
                        self.n,
                        enumerate_subsets(self.n).filter(|&x| {
                            ring.ring_membership(x) && !earlier.iter().any(|r| r.ring_membership(x))
                        }),
                    )
                })
                .collect(),
        )
    }
}

/// Complement of an explicitly partitioned `k`-hierarchical lattice.
#[derive(Clone, Debug)]
pub struct ComplementOfParts {
    parts: Vec<ExplicitFamily>,
}

impl ComplementOfParts {
    pub fn new(parts: Vec<ExplicitFamily>) -> Self {
        ComplementOfParts { parts }
    }

    pub fn parts(&self) -> &[ExplicitFamily] {
        &self.parts
    }
}

impl Membership for ComplementOfParts {
    fn contains(&self, x: Mask) -> bool {
        !self.parts.iter().any(|p| p.contains_set(x))
    }
}

impl ConstraintFamily for ComplementOfParts {
    fn hierarchy_bound(&self) -> usize {
        self.parts.len()
    }

    fn witness_partition(&self) -> Option<Vec<ExplicitFamily>> {
        Some(self.parts.clone())
    }
}

/// `2^V \ (G ∪ adjoined)` where `G` is an intersecting family (adjoined = {∅})
/// or a crossing family (adjoined = {∅, V}); declared 2-hierarchical.
pub struct ComplementWithAdjoined<'a, G: ?Sized> {
    n: usize,
    excluded: &'a G,
    adjoined: Vec<Mask>,
    explicit: Option<&'a ExplicitFamily>,
}

impl<'a, G: Membership + ?Sized> ComplementWithAdjoined<'a, G> {
    pub fn intersecting(n: usize, excluded: &'a G, explicit: Option<&'a ExplicitFamily>) -> Self {
        ComplementWithAdjoined {
            n,
            excluded,
            adjoined: vec![Mask::EMPTY],
            explicit,
        }
    }

    pub fn crossing(n: usize, excluded: &'a G, explicit: Option<&'a ExplicitFamily>) -> Self {
        ComplementWithAdjoined {
            n,
            excluded,
            adjoined: vec![Mask::EMPTY, Mask::full(n)],
            explicit,
        }
    }

    pub fn adjoined(&self) -> &[Mask] {
        &self.adjoined
    }
}

impl<G: Membership + ?Sized> Membership for ComplementWithAdjoined<'_, G> {
    fn contains(&self, x: Mask) -> bool {
        !self.adjoined.contains(&x) && !self.excluded.contains(x)
    }
}

impl<G: Membership + ?Sized> ConstraintFamily for ComplementWithAdjoined<'_, G> {
    fn hierarchy_bound(&self) -> usize {
        2
    }

    fn witness_partition(&self) -> Option<Vec<ExplicitFamily>> {
        let g = self.explicit?;
        Some(vec![
            ExplicitFamily::new(self.n, self.adjoined.iter().copied()),
            g.without(&self.adjoined),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: &[usize]) -> Mask {
        Mask::from_elements(v.iter().copied())
    }

    fn fam(n: usize, sets: &[&[usize]]) -> ExplicitFamily {
        ExplicitFamily::new(n, sets.iter().map(|s| m(s)))
    }

    // Elements are 0-based: "1" and "2" in the prose examples are 0 and 1 here.
    #[test]
    fn ring_membership_examples() {
        let v = Mask::full(2);
        let r = RingFamily::new(2, Mask::EMPTY, v, vec![(0, 1)]).unwrap();
        assert_eq!(r.expand().members(), &[Mask::EMPTY, m(&[1]), v]);
        assert!(!r.ring_membership(m(&[0])));

        let only_empty = RingFamily::new(2, Mask::EMPTY, Mask::EMPTY, vec![]).unwrap();
        assert_eq!(only_empty.expand().members(), &[Mask::EMPTY]);

        let interval = RingFamily::interval(2, m(&[0]), v).unwrap();
        assert_eq!(interval.expand().members(), &[m(&[0]), v]);
    }

    #[test]
    fn ring_rejects_bad_bounds() {
        assert!(RingFamily::new(3, m(&[0]), m(&[1]), vec![]).is_err());
        assert!(RingFamily::new(2, Mask::EMPTY, m(&[2]), vec![]).is_err());
        assert!(RingFamily::new(2, Mask::EMPTY, m(&[0, 1]), vec![(0, 2)]).is_err());
    }

    #[test]
    fn complement_of_union_examples() {
        let n = 3;
        let empty_ring = RingFamily::interval(n, Mask::EMPTY, Mask::EMPTY).unwrap();
        let f = ComplementOfRings::new(n, vec![empty_ring.clone()]).unwrap();
        for x in enumerate_subsets(n) {
            assert_eq!(f.contains(x), !x.is_empty());
        }
        let full_ring = RingFamily::interval(n, Mask::full(n), Mask::full(n)).unwrap();
        let f = ComplementOfRings::new(n, vec![empty_ring, full_ring]).unwrap();
        assert_eq!(f.hierarchy_bound(), 2);
        for x in enumerate_subsets(n) {
            assert_eq!(f.contains(x), !x.is_empty() && x != Mask::full(n));
        }

        // [{0}..V] holds {0},{0,1}; [∅..{1}] holds ∅,{1}. Nothing is left.
        let a = RingFamily::interval(2, m(&[0]), Mask::full(2)).unwrap();
        let b = RingFamily::interval(2, Mask::EMPTY, m(&[1])).unwrap();
        let f = ComplementOfRings::new(2, vec![a, b]).unwrap();
        let feasible: Vec<Mask> = enumerate_subsets(2).filter(|&x| f.contains(x)).collect();
        assert!(feasible.is_empty());
    }

    #[test]
    fn lattice_validator_examples() {
        assert!(validate_lattice(&fam(2, &[&[], &[0], &[0, 1]])));
        assert!(!validate_lattice(&fam(2, &[&[0], &[1]])));
    }

    #[test]
    fn intersecting_validator_examples() {
        assert!(validate_intersecting(&fam(2, &[&[0], &[1], &[0, 1]])));
        assert!(validate_intersecting(&fam(2, &[&[], &[0], &[0, 1]])));
        assert!(!validate_intersecting(&fam(3, &[&[0, 1], &[1, 2]])));
    }

    #[test]
    fn crossing_validator_examples() {
        assert!(validate_crossing(&fam(3, &[&[0, 1], &[1, 2]])));
        assert!(validate_crossing(&fam(2, &[&[0], &[1], &[0, 1]])));
        assert!(!validate_crossing(&fam(4, &[&[0, 1], &[1, 2], &[]])));
    }

    #[test]
    fn parity_validator_examples() {
        let odd = ExplicitFamily::new(6, enumerate_subsets(6).filter(|x| x.cardinality() % 2 == 1));
        assert!(validate_parity(&odd));

        let ring = RingFamily::new(4, m(&[0]), m(&[0, 1, 2]), vec![(1, 2)]).unwrap();
        assert!(validate_parity(&ring.expand().complement()));

        // Non-members ∅, {1}, {0,1}: no union or intersection of them is {0}.
        assert!(validate_parity(&fam(2, &[&[0]])));
        assert!(validate_parity(&fam(2, &[&[0], &[1]])));
        // {0} ∪ {1} ∈ F but {0} ∩ {1} ∉ F.
        assert!(!validate_parity(&fam(3, &[&[0, 1]])));
    }

    #[test]
    fn hierarchical_examples() {
        let n = 3;
        let full = Mask::full(n);
        let intersecting = intersecting_closure(&fam(n, &[&[0, 1], &[1, 2], &[2]]));
        assert!(validate_intersecting(&intersecting));
        let parts = vec![
            ExplicitFamily::new(n, [Mask::EMPTY]),
            intersecting.without(&[Mask::EMPTY]),
        ];
        assert!(validate_k_hierarchical(&parts).unwrap());

        let crossing = fam(n, &[&[0, 1], &[1, 2]]);
        let parts = vec![
            ExplicitFamily::new(n, [Mask::EMPTY, full]),
            crossing.without(&[Mask::EMPTY, full]),
        ];
        assert!(validate_k_hierarchical(&parts).unwrap());

        let overlapping = vec![fam(n, &[&[0]]), fam(n, &[&[0], &[1]])];
        assert!(matches!(
            validate_k_hierarchical(&overlapping),
            Err(Error::OverlappingParts(_))
        ));

        // {0} and {1} together need {0,1} or ∅ somewhere below.
        let broken = vec![fam(n, &[&[2]]), fam(n, &[&[0], &[1]])];
        assert!(!validate_k_hierarchical(&broken).unwrap());
        assert!(validate_k_hierarchical(&[]).unwrap());
    }

    #[test]
    fn closure_examples() {
        let closed = lattice_closure(&fam(2, &[&[0], &[1]]));
        assert_eq!(closed, fam(2, &[&[], &[0], &[1], &[0, 1]]));
        let chain = fam(3, &[&[], &[0], &[0, 2]]);
        assert_eq!(lattice_closure(&chain), chain);
        assert!(lattice_closure(&ExplicitFamily::new(3, [])).is_empty());
    }

    #[test]
    fn adjoined_complement_membership() {
        let n = 3;
        let g = fam(n, &[&[0, 1], &[1, 2]]);
        let f = ComplementWithAdjoined::crossing(n, &g, Some(&g));
        let feasible: Vec<Mask> = enumerate_subsets(n).filter(|&x| f.contains(x)).collect();
        assert_eq!(feasible, vec![m(&[0]), m(&[1]), m(&[2]), m(&[0, 2])]);
        assert!(validate_k_hierarchical(&f.witness_partition().unwrap()).unwrap());
    }

    #[test]
    fn ring_witness_partition_is_disjoint() {
        let n = 4;
        let r1 = RingFamily::new(n, Mask::EMPTY, m(&[0, 1, 2]), vec![(0, 1)]).unwrap();
        let r2 = RingFamily::new(n, m(&[1]), Mask::full(n), vec![(2, 3)]).unwrap();
        let f = ComplementOfRings::new(n, vec![r1, r2]).unwrap();
        let parts = f.witness_partition().unwrap();
        assert!(validate_k_hierarchical(&parts).unwrap());
        for x in enumerate_subsets(n) {
            let covered = parts.iter().filter(|p| p.contains_set(x)).count();
            assert_eq!(covered, usize::from(!f.contains(x)));
        }
    }
}
