#![allow(dead_code)]

use hsfm::gen::{generate, InstanceKind};
use hsfm::instance::Instance;

pub fn instance(kind: InstanceKind, n: usize, k: usize, seed: u64) -> Instance {
    Instance::from_file(&generate(kind, n, k, seed).expect("generator accepts parameters"))
        .expect("generated instance parses")
}

/// Largest `k` the generator supports for `kind`, capped at `want`.
pub fn supported_k(kind: InstanceKind, want: usize) -> usize {
    match kind {
        InstanceKind::TableIntersecting | InstanceKind::TableCrossing => 2,
        _ => want,
    }
}

pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of disjoint `(S, T)` with `|S|, |T| <= k`, from the closed form.
pub fn pair_count(n: usize, k: usize) -> u64 {
    let (n, k) = (n as u64, k as u64);
    (0..=k)
        .flat_map(|s| (0..=k).map(move |t| binomial(n, s) * binomial(n - s.min(n), t)))
        .sum()
}
