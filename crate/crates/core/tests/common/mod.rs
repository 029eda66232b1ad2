#![allow(dead_code)]

use eacws::construction::GraphSpec;
use eacws::pauli::{Pauli, PauliOperator, QubitLayout};
use eacws::record::{ConflictModel, Instance};
use eacws::search::ConflictSet;
use eacws::BitVec;
use rand::Rng;

pub fn ring_instance(n: usize, c: usize, model: ConflictModel) -> Instance {
    Instance::new(
        QubitLayout::new(n, c).unwrap(),
        GraphSpec::ring(n).unwrap(),
        3,
        model,
    )
    .unwrap()
}

/// Every `(n, c)` with a ring on `n >= 3` vertices and `n + c <= max_total`.
pub fn ring_shapes(max_total: usize) -> Vec<(usize, usize)> {
    (3..=max_total)
        .flat_map(|n| (0..=n.min(max_total - n)).map(move |c| (n, c)))
        .collect()
}

pub fn random_pauli(layout: QubitLayout, rng: &mut impl Rng) -> PauliOperator {
    let mut p = PauliOperator::identity(layout);
    for q in 0..layout.total() {
        let letter = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)];
        p.set(q, letter);
    }
    p
}

pub fn random_conflicts(length: usize, density: f64, rng: &mut impl Rng) -> ConflictSet {
    let forbidden: Vec<BitVec> = (1..1u64 << length)
        .filter(|_| rng.gen_bool(density))
        .map(|v| BitVec::from_msb_u64(length, v))
        .collect();
    ConflictSet::new(length, length, forbidden, Vec::new()).unwrap()
}

/// Lexicographically least maximum clique containing the zero word, by plain
/// backtracking over increasing words. Returned in increasing order.
pub fn naive_max_clique(cs: &ConflictSet) -> Vec<u64> {
    let length = cs.len_bits();
    let ok = |d: u64| !cs.forbids(&BitVec::from_msb_u64(length, d));
    let vertices: Vec<u64> = (1..1u64 << length).filter(|&v| ok(v)).collect();

    fn grow(
        cand: &[u64],
        current: &mut Vec<u64>,
        best: &mut Vec<u64>,
        ok: &dyn Fn(u64) -> bool,
    ) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        for (i, &v) in cand.iter().enumerate() {
            if current.len() + cand.len() - i <= best.len() {
                return;
            }
            let next: Vec<u64> = cand[i + 1..].iter().copied().filter(|&w| ok(v ^ w)).collect();
            current.push(v);
            grow(&next, current, best, ok);
            current.pop();
        }
    }

    let mut current = vec![0];
    let mut best = Vec::new();
    grow(&vertices, &mut current, &mut best, &ok);
    best
}

pub fn clique_values(code: &eacws::search::ClassicalCode) -> Vec<u64> {
    let mut v: Vec<u64> = code.codewords.iter().map(BitVec::to_msb_u64).collect();
    v.sort_unstable();
    v
}
