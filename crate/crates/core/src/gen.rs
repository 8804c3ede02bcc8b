//! Seeded random instances.
//!
//! Every generator draws from a `ChaCha8Rng` seeded with the caller's seed,
//! so the same `(kind, n, k, seed)` always yields the same file.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::families::{
    crossing_closure, intersecting_closure, ExplicitFamily, RingFamily, VALIDATE_LIMIT,
};
use crate::functions::{CoverageSystem, WeightedGraph, TABLE_LIMIT};
use crate::ground::{enumerate_subsets, Mask, MAX_ELEMENTS};
use crate::instance::{ConstraintSpec, FunctionSpec, Instance, InstanceFile, RingSpec, INSTANCE_SCHEMA};
use crate::oracle::SubmodularOracle;

/// Shift weights are drawn from `[-SHIFT_RANGE, SHIFT_RANGE]`.
pub const SHIFT_RANGE: i64 = 10;
/// Edge and item weights are drawn from `[0, WEIGHT_MAX]`.
pub const WEIGHT_MAX: i64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    CutRings,
    CoverageRings,
    TableIntersecting,
    TableCrossing,
    CutExplicit,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::CutRings,
        InstanceKind::CoverageRings,
        InstanceKind::TableIntersecting,
        InstanceKind::TableCrossing,
        InstanceKind::CutExplicit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::CutRings => "cut+rings",
            InstanceKind::CoverageRings => "coverage+rings",
            InstanceKind::TableIntersecting => "table+intersecting",
            InstanceKind::TableCrossing => "table+crossing",
            InstanceKind::CutExplicit => "cut+explicit",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnsupportedKind(s.to_string()))
    }
}

fn random_set(rng: &mut ChaCha8Rng, within: Mask, p: f64) -> Mask {
    within
        .elements()
        .filter(|_| rng.gen_bool(p))
        .fold(Mask::EMPTY, Mask::insert)
}

fn shift_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-SHIFT_RANGE..=SHIFT_RANGE)).collect()
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraph {
    let directed = rng.gen_bool(0.5);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let candidate = if directed { u != v } else { u < v };
            if candidate && rng.gen_bool(0.35) {
                edges.push((u, v, rng.gen_range(1..=WEIGHT_MAX)));
            }
        }
    }
    WeightedGraph::new(n, directed, edges).expect("generated edges are valid")
}

fn random_coverage(rng: &mut ChaCha8Rng, n: usize) -> CoverageSystem {
    let items = rng.gen_range(n.max(1)..=2 * n.max(1));
    let weights = (0..items).map(|_| rng.gen_range(0..=WEIGHT_MAX)).collect();
    let incidence = (0..n)
        .map(|_| (0..items).filter(|_| rng.gen_bool(0.25)).collect())
        .collect();
    CoverageSystem::new(weights, incidence).expect("generated coverage is valid")
}

fn cut_spec(g: &WeightedGraph) -> FunctionSpec {
    FunctionSpec::Cut {
        directed: g.is_directed(),
        edges: g.edges().to_vec(),
    }
}

fn shifted(base: FunctionSpec, weights: Vec<i64>) -> FunctionSpec {
    FunctionSpec::ModularShift {
        base: Box::new(base),
        weights,
    }
}

/// A cut plus a coverage function plus a modular shift, written out as a table.
fn random_table(rng: &mut ChaCha8Rng, n: usize) -> Result<FunctionSpec> {
    if n > TABLE_LIMIT {
        return Err(Error::GroundSetTooLarge { n, max: TABLE_LIMIT });
    }
    let g = random_graph(rng, n);
    let c = random_coverage(rng, n);
    let w = shift_weights(rng, n);
    let values = enumerate_subsets(n)
        .map(|x| g.evaluate(x) + c.evaluate(x) + x.elements().map(|i| w[i]).sum::<i64>())
        .collect();
    Ok(FunctionSpec::Table { values })
}

/// A random ring family: random bounds `A ⊆ B` and an acyclic set of arcs
/// inside `B`.
fn random_ring(rng: &mut ChaCha8Rng, n: usize) -> RingFamily {
    let full = Mask::full(n);
    let allowed = random_set(rng, full, 0.6);
    let forced_in = random_set(rng, allowed, 0.15);
    let mut order: Vec<usize> = allowed.elements().collect();
    order.shuffle(rng);
    let mut arcs = Vec::new();
    if order.len() >= 2 {
        for _ in 0..rng.gen_range(0..=order.len()) {
            let i = rng.gen_range(0..order.len() - 1);
            let j = rng.gen_range(i + 1..order.len());
            if !arcs.contains(&(order[i], order[j])) {
                arcs.push((order[i], order[j]));
            }
        }
    }
    RingFamily::new(n, forced_in, allowed, arcs).expect("generated ring is valid")
}

fn ring_spec(r: &RingFamily) -> RingSpec {
    RingSpec {
        forced_in: r.forced_in(),
        allowed: Some(r.allowed()),
        arcs: r.arcs().to_vec(),
    }
}

fn random_seeds(rng: &mut ChaCha8Rng, n: usize) -> ExplicitFamily {
    let count = rng.gen_range(1..=4);
    let seeds: Vec<Mask> = (0..count)
        .map(|_| random_set(rng, Mask::full(n), 0.4))
        .collect();
    ExplicitFamily::new(n, seeds)
}

/// Parts of a union of `k` random ring families: `F_i = L_i \ (L_1 ∪ .. ∪ L_{i-1})`.
fn union_of_rings_parts(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<ExplicitFamily> {
    let rings: Vec<RingFamily> = (0..k).map(|_| random_ring(rng, n)).collect();
    (0..k)
        .map(|i| {
            ExplicitFamily::new(
                n,
                enumerate_subsets(n).filter(|&x| {
                    rings[i].ring_membership(x) && !rings[..i].iter().any(|r| r.ring_membership(x))
                }),
            )
        })
        .collect()
}

/// Parts given by the sets attaining each of the `k` smallest distinct
/// values of a random shifted cut function (padded with empty parts if it
/// has fewer values).
fn level_class_parts(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<ExplicitFamily> {
    let g = random_graph(rng, n);
    let w = shift_weights(rng, n);
    let value = |x: Mask| g.evaluate(x) + x.elements().map(|i| w[i]).sum::<i64>();
    let mut values: Vec<i64> = enumerate_subsets(n).map(value).collect();
    values.sort_unstable();
    values.dedup();
    (0..k)
        .map(|i| match values.get(i) {
            Some(&v) => ExplicitFamily::new(n, enumerate_subsets(n).filter(|&x| value(x) == v)),
            None => ExplicitFamily::default(),
        })
        .collect()
}

fn explicit_spec(parts: &[ExplicitFamily]) -> ConstraintSpec {
    ConstraintSpec::Explicit {
        parts: parts.iter().map(|p| p.members().to_vec()).collect(),
    }
}

/// Generate an instance of `kind` over `n` elements with hierarchy bound `k`
/// (`k = 0` means unconstrained). Intersecting and crossing kinds only
/// support `k ∈ {0, 2}`.
pub fn generate(kind: InstanceKind, n: usize, k: usize, seed: u64) -> Result<InstanceFile> {
    if n == 0 {
        return Err(Error::InvalidInstance("empty ground set".into()));
    }
    if n > MAX_ELEMENTS {
        return Err(Error::GroundSetTooLarge {
            n,
            max: MAX_ELEMENTS,
        });
    }
    if k > n {
        return Err(Error::InvalidBound { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let function = match kind {
        InstanceKind::CutRings | InstanceKind::CutExplicit => {
            let g = random_graph(&mut rng, n);
            shifted(cut_spec(&g), shift_weights(&mut rng, n))
        }
        InstanceKind::CoverageRings => {
            let c = random_coverage(&mut rng, n);
            let base = FunctionSpec::Coverage {
                universe_weights: c.universe_weights().to_vec(),
                incidence: c.incidence().to_vec(),
            };
            shifted(base, shift_weights(&mut rng, n))
        }
        InstanceKind::TableIntersecting | InstanceKind::TableCrossing => random_table(&mut rng, n)?,
    };

    let constraint = if k == 0 {
        ConstraintSpec::None
    } else {
        match kind {
            InstanceKind::CutRings | InstanceKind::CoverageRings => ConstraintSpec::ComplementOfRings {
                rings: (0..k).map(|_| ring_spec(&random_ring(&mut rng, n))).collect(),
            },
            InstanceKind::TableIntersecting | InstanceKind::TableCrossing if k != 2 => {
                return Err(Error::InvalidInstance(format!(
                    "{kind} instances have k = 2 (or 0 for unconstrained), not {k}"
                )))
            }
            InstanceKind::TableIntersecting => {
                let g = intersecting_closure(&random_seeds(&mut rng, n));
                ConstraintSpec::ComplementOfIntersecting {
                    members: g.members().to_vec(),
                }
            }
            InstanceKind::TableCrossing => {
                let mut g = crossing_closure(&random_seeds(&mut rng, n));
                for extra in [Mask::EMPTY, Mask::full(n)] {
                    if rng.gen_bool(0.3) {
                        g = g.with(&[extra]);
                    }
                }
                ConstraintSpec::ComplementOfCrossing {
                    members: g.members().to_vec(),
                }
            }
            InstanceKind::CutExplicit => {
                if n > VALIDATE_LIMIT {
                    return Err(Error::GroundSetTooLarge {
                        n,
                        max: VALIDATE_LIMIT,
                    });
                }
                let parts = if rng.gen_bool(0.5) {
                    union_of_rings_parts(&mut rng, n, k)
                } else {
                    level_class_parts(&mut rng, n, k)
                };
                explicit_spec(&parts)
            }
        }
    };

    let mut file = InstanceFile {
        schema: INSTANCE_SCHEMA.to_string(),
        n: Some(n),
        ground_set: None,
        function,
        constraint,
        k: Some(k),
        value_bound: None,
        seed: Some(seed),
    };
    let inst = Instance::from_file(&file)?;
    file.value_bound = inst.function.value_bound();
    file.k = Some(inst.k);
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{validate_crossing, validate_intersecting, validate_k_hierarchical};

    #[test]
    fn kind_names_round_trip() {
        for kind in InstanceKind::ALL {
            assert_eq!(kind.name().parse::<InstanceKind>().unwrap(), kind);
        }
        assert!(matches!(
            "cut+matroid".parse::<InstanceKind>(),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn same_seed_same_file() {
        for kind in InstanceKind::ALL {
            let k = if matches!(kind, InstanceKind::TableIntersecting | InstanceKind::TableCrossing) {
                2
            } else {
                3
            };
            let a = generate(kind, 7, k, 11).unwrap().to_json();
            let b = generate(kind, 7, k, 11).unwrap().to_json();
            assert_eq!(a, b);
            assert_ne!(a, generate(kind, 7, k, 12).unwrap().to_json());
        }
    }

    #[test]
    fn zero_bound_means_unconstrained() {
        for kind in InstanceKind::ALL {
            let file = generate(kind, 5, 0, 3).unwrap();
            assert_eq!(file.constraint, ConstraintSpec::None);
            assert_eq!(file.k, Some(0));
        }
    }

    #[test]
    fn generated_structures_are_valid() {
        for seed in 0..30 {
            let file = generate(InstanceKind::CutRings, 8, 2, seed).unwrap();
            let ConstraintSpec::ComplementOfRings { rings } = &file.constraint else {
                panic!("expected rings")
            };
            assert_eq!(rings.len(), 2);
            assert!(file.value_bound.is_some());

            let file = generate(InstanceKind::TableIntersecting, 6, 2, seed).unwrap();
            let ConstraintSpec::ComplementOfIntersecting { members } = &file.constraint else {
                panic!("expected intersecting")
            };
            assert!(validate_intersecting(&ExplicitFamily::new(6, members.iter().copied())));

            let file = generate(InstanceKind::TableCrossing, 6, 2, seed).unwrap();
            let ConstraintSpec::ComplementOfCrossing { members } = &file.constraint else {
                panic!("expected crossing")
            };
            assert!(validate_crossing(&ExplicitFamily::new(6, members.iter().copied())));

            let file = generate(InstanceKind::CutExplicit, 6, 3, seed).unwrap();
            let ConstraintSpec::Explicit { parts } = &file.constraint else {
                panic!("expected explicit parts")
            };
            let parts: Vec<ExplicitFamily> = parts
                .iter()
                .map(|p| ExplicitFamily::new(6, p.iter().copied()))
                .collect();
            assert!(validate_k_hierarchical(&parts).unwrap());
        }
    }

    #[test]
    fn unsupported_combinations() {
        assert!(generate(InstanceKind::TableCrossing, 6, 1, 0).is_err());
        assert!(generate(InstanceKind::TableIntersecting, 21, 2, 0).is_err());
        assert!(generate(InstanceKind::CutRings, 3, 4, 0).is_err());
        assert!(generate(InstanceKind::CutRings, 0, 0, 0).is_err());
    }
}
