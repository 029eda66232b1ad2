//! Reduction of Pauli errors to Z-only effective errors.
//!
//! In a standard-form generator set every generator owns exactly one X
//! position, so multiplying an error by the owners of its X positions leaves
//! a pure Z operator. Its support, as a bit pattern over Alice then Bob, is the
//! effective error. Errors that differ by a stabilizer share a pattern; with
//! noisy ebits this happens for Bob's `X_j` and Alice's `Z_{n-c+j}`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::GeneratorSet;
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::pauli::{Pauli, PauliOperator, QubitLayout};

/// Z-support of a reduced error, Alice block first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EffectiveError {
    pattern: BitVec,
    alice: usize,
}

impl EffectiveError {
    pub fn new(pattern: BitVec, layout: QubitLayout) -> Result<Self> {
        if pattern.len() != layout.total() {
            return Err(Error::LengthMismatch {
                expected: layout.total(),
                found: pattern.len(),
            });
        }
        Ok(EffectiveError {
            pattern,
            alice: layout.n,
        })
    }

    pub fn pattern(&self) -> &BitVec {
        &self.pattern
    }

    pub fn is_zero(&self) -> bool {
        self.pattern.is_zero()
    }

    pub fn to_bitstring(&self) -> String {
        self.pattern.format_split(self.alice)
    }
}

impl std::fmt::Display for EffectiveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

fn require_standard(gens: &GeneratorSet) -> Result<()> {
    if gens.is_standard_form() {
        Ok(())
    } else {
        Err(Error::NotStandardForm(
            "effective errors need one X per generator".into(),
        ))
    }
}

/// `e` times the generators owning its X positions; the result is Z-only.
pub fn reduce_pauli(e: &PauliOperator, gens: &GeneratorSet) -> Result<PauliOperator> {
    if e.layout() != gens.layout {
        return Err(Error::LayoutMismatch {
            left: e.layout().to_string(),
            right: gens.layout.to_string(),
        });
    }
    require_standard(gens)?;
    Ok(reduce_unchecked(e, gens))
}

fn reduce_unchecked(e: &PauliOperator, gens: &GeneratorSet) -> PauliOperator {
    let mut out = e.clone();
    for pos in e.x().iter_ones() {
        out.mul_assign_unchecked(gens.x_owner(pos));
    }
    debug_assert!(out.x().is_zero());
    out
}

pub fn reduce_to_effective(e: &PauliOperator, gens: &GeneratorSet) -> Result<EffectiveError> {
    let reduced = reduce_pauli(e, gens)?;
    EffectiveError::new(reduced.z().clone(), gens.layout)
}

/// All Paulis of weight exactly `w`: position sets in lexicographic order,
/// letters cycling X, Y, Z with the last position fastest.
pub fn paulis_of_weight(layout: QubitLayout, w: usize) -> Vec<PauliOperator> {
    const LETTERS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    let total = layout.total();
    let mut out = Vec::new();
    if w > total {
        return out;
    }
    let mut positions: Vec<usize> = (0..w).collect();
    loop {
        for code in 0..3usize.pow(w as u32) {
            let mut p = PauliOperator::identity(layout);
            let mut rem = code;
            for k in (0..w).rev() {
                p.set(positions[k], LETTERS[rem % 3]);
                rem /= 3;
            }
            out.push(p);
        }
        if !next_combination(&mut positions, total) {
            return out;
        }
    }
}

/// Advances a sorted `k`-subset of `0..n` to its lexicographic successor.
pub(crate) fn next_combination(positions: &mut [usize], n: usize) -> bool {
    let w = positions.len();
    for i in (0..w).rev() {
        if positions[i] < n - w + i {
            positions[i] += 1;
            for k in i + 1..w {
                positions[k] = positions[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The `3(n+c)` weight-one Paulis, position-major then X, Y, Z.
pub fn enumerate_single_errors(layout: QubitLayout) -> Vec<PauliOperator> {
    paulis_of_weight(layout, 1)
}

/// Identity followed by every Pauli of weight `1..=w`.
pub fn errors_up_to_weight(layout: QubitLayout, w: usize) -> Vec<PauliOperator> {
    let mut out = vec![PauliOperator::identity(layout)];
    for k in 1..=w {
        out.extend(paulis_of_weight(layout, k));
    }
    out
}

/// Identity plus all Paulis of weight up to `⌊(d-1)/2⌋`.
pub fn correctable_error_set(layout: QubitLayout, d: usize) -> Vec<PauliOperator> {
    errors_up_to_weight(layout, d.saturating_sub(1) / 2)
}

/// Identity, all single errors, and every product of one Alice single error
/// with one Bob single error (at most one error per side at the same time).
pub fn one_per_side_error_set(layout: QubitLayout) -> Vec<PauliOperator> {
    let mut out = errors_up_to_weight(layout, 1);
    let singles = enumerate_single_errors(layout);
    let (alice, bob): (Vec<_>, Vec<_>) = singles.iter().partition(|p| p.bob_is_identity());
    for a in &alice {
        for b in &bob {
            out.push(a.mul(b).expect("same layout"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub pauli: PauliOperator,
    pub effective: EffectiveError,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorCatalog {
    pub layout: QubitLayout,
    pub entries: Vec<CatalogEntry>,
    /// Deduplicated patterns in order of first appearance.
    pub distinct_effective: Vec<EffectiveError>,
    /// `(Bob-only error, Alice-only error)` pairs with equal patterns.
    pub equivalence_pairs: Vec<(PauliOperator, PauliOperator)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub pauli: String,
    pub effective: String,
}

impl ErrorCatalog {
    /// Distinct patterns other than the all-zero one.
    pub fn nonidentity_distinct(&self) -> usize {
        self.distinct_effective.iter().filter(|e| !e.is_zero()).count()
    }

    /// Index pairs `(a, b)`, `a < b`, of entries that reduce to the same pattern.
    pub fn collisions(&self) -> Vec<(usize, usize)> {
        let mut groups: HashMap<&EffectiveError, Vec<usize>> = HashMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            groups.entry(&e.effective).or_default().push(i);
        }
        let mut out: Vec<(usize, usize)> = groups
            .values()
            .flat_map(|idx| {
                idx.iter()
                    .enumerate()
                    .flat_map(move |(k, &a)| idx[k + 1..].iter().map(move |&b| (a, b)))
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn rows(&self) -> Vec<CatalogRow> {
        self.entries
            .iter()
            .map(|e| CatalogRow {
                pauli: e.pauli.to_string(),
                effective: e.effective.to_bitstring(),
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.rows()).expect("catalog rows serialize")
    }
}

/// Reduces every error in `errors` (which should contain the identity) and
/// groups the results. Entry order follows `errors`.
pub fn build_error_catalog(
    layout: QubitLayout,
    gens: &GeneratorSet,
    errors: &[PauliOperator],
) -> Result<ErrorCatalog> {
    if gens.layout != layout {
        return Err(Error::LayoutMismatch {
            left: layout.to_string(),
            right: gens.layout.to_string(),
        });
    }
    if let Some(bad) = errors.iter().find(|e| e.layout() != layout) {
        return Err(Error::LayoutMismatch {
            left: layout.to_string(),
            right: bad.layout().to_string(),
        });
    }
    require_standard(gens)?;
    let entries: Vec<CatalogEntry> = errors
        .par_iter()
        .map(|e| CatalogEntry {
            pauli: e.clone(),
            effective: EffectiveError {
                pattern: reduce_unchecked(e, gens).z().clone(),
                alice: layout.n,
            },
        })
        .collect();

    let mut first_seen: HashMap<EffectiveError, usize> = HashMap::new();
    let mut distinct_effective = Vec::new();
    let mut equivalence_pairs = Vec::new();
    let mut by_pattern: HashMap<&EffectiveError, Vec<&PauliOperator>> = HashMap::new();
    for entry in &entries {
        if !first_seen.contains_key(&entry.effective) {
            first_seen.insert(entry.effective.clone(), distinct_effective.len());
            distinct_effective.push(entry.effective.clone());
        }
        by_pattern.entry(&entry.effective).or_default().push(&entry.pauli);
    }
    for pattern in &distinct_effective {
        let members = &by_pattern[pattern];
        for bob in members.iter().filter(|p| p.alice_is_identity() && !p.is_identity()) {
            for alice in members.iter().filter(|p| p.bob_is_identity() && !p.is_identity()) {
                equivalence_pairs.push(((*bob).clone(), (*alice).clone()));
            }
        }
    }
    Ok(ErrorCatalog {
        layout,
        entries,
        distinct_effective,
        equivalence_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{encoded_generators, ring_graph};

    fn ring_set(n: usize, c: usize) -> (QubitLayout, GeneratorSet) {
        let l = QubitLayout::new(n, c).unwrap();
        (l, encoded_generators(l, &ring_graph(n).unwrap()).unwrap())
    }

    #[test]
    fn reduces_bob_x_to_alice_z() {
        let (l, gens) = ring_set(7, 2);
        let id = PauliOperator::identity(l);
        assert_eq!(reduce_to_effective(&id, &gens).unwrap().to_bitstring(), "0000000|00");
        let bx: PauliOperator = "IIIIIII|XI".parse().unwrap();
        assert_eq!(reduce_to_effective(&bx, &gens).unwrap().to_bitstring(), "0000010|00");
        let (_, gens6) = ring_set(6, 1);
        let bx: PauliOperator = "IIIIII|X".parse().unwrap();
        assert_eq!(reduce_to_effective(&bx, &gens6).unwrap().to_bitstring(), "000001|0");
    }

    #[test]
    fn rejects_non_standard_sets() {
        let l = QubitLayout::new(3, 1).unwrap();
        let init = crate::construction::initial_generators(l);
        let e = PauliOperator::single(l, 0, Pauli::X);
        assert!(matches!(reduce_to_effective(&e, &init), Err(Error::NotStandardForm(_))));
    }

    #[test]
    fn single_error_counts() {
        for (n, c, count) in [(7, 2, 27), (6, 1, 21), (9, 1, 30)] {
            let l = QubitLayout::new(n, c).unwrap();
            assert_eq!(enumerate_single_errors(l).len(), count);
        }
        let l = QubitLayout::new(2, 1).unwrap();
        let names: Vec<String> = enumerate_single_errors(l).iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["XI|I", "YI|I", "ZI|I", "IX|I", "IY|I", "IZ|I", "II|X", "II|Y", "II|Z"]);
    }

    #[test]
    fn weight_enumeration_counts() {
        let l = QubitLayout::new(4, 1).unwrap();
        assert_eq!(paulis_of_weight(l, 0).len(), 1);
        assert_eq!(paulis_of_weight(l, 2).len(), 10 * 9);
        assert_eq!(paulis_of_weight(l, 3).len(), 10 * 27);
        assert_eq!(paulis_of_weight(l, 5).len(), 243);
        assert!(paulis_of_weight(l, 6).is_empty());
        let two = paulis_of_weight(l, 2);
        assert!(two.iter().all(|p| p.weight() == 2));
        let mut names: Vec<String> = two.iter().map(|p| p.to_string()).collect();
        names.dedup();
        assert_eq!(names.len(), 90);
    }

    #[test]
    fn catalogs_match_published_counts() {
        for (n, c, distinct) in [(7, 2, 25), (9, 1, 29), (6, 1, 20)] {
            let (l, gens) = ring_set(n, c);
            let cat = build_error_catalog(l, &gens, &errors_up_to_weight(l, 1)).unwrap();
            assert_eq!(cat.nonidentity_distinct(), distinct, "n={n} c={c}");
            assert_eq!(cat.entries.len() - cat.distinct_effective.len(), c);
            assert_eq!(cat.equivalence_pairs.len(), c);
            for (j, (bob, alice)) in cat.equivalence_pairs.iter().enumerate() {
                assert_eq!(*bob, PauliOperator::single(l, l.bob(j), Pauli::X));
                assert_eq!(*alice, PauliOperator::single(l, l.ebit_alice(j), Pauli::Z));
            }
        }
    }

    #[test]
    fn ring_accounting_over_range() {
        for n in 5..=12 {
            for c in 1..=3 {
                let (l, gens) = ring_set(n, c);
                let cat = build_error_catalog(l, &gens, &errors_up_to_weight(l, 1)).unwrap();
                assert_eq!(cat.distinct_effective.len(), 3 * (n + c) - c + 1, "n={n} c={c}");
                assert_eq!(cat.equivalence_pairs.len(), c);
            }
        }
    }

    #[test]
    fn catalog_json_shape() {
        let (l, gens) = ring_set(6, 1);
        let cat = build_error_catalog(l, &gens, &errors_up_to_weight(l, 1)).unwrap();
        let json = cat.to_json();
        assert_eq!(json[0]["pauli"], "IIIIII|I");
        assert_eq!(json[0]["effective"], "000000|0");
        let rows: Vec<CatalogRow> = serde_json::from_value(json).unwrap();
        assert_eq!(rows.len(), 22);
    }

    #[test]
    fn one_per_side_set_size() {
        let l = QubitLayout::new(6, 1).unwrap();
        assert_eq!(one_per_side_error_set(l).len(), 1 + 21 + 18 * 3);
    }
}
