//! Dense state-vector checks of the Knill–Laflamme conditions.
//!
//! Qubit `q` is bit `q` of the amplitude index. Everything here is brute
//! force and meant as an independent check on the symbolic pipeline.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{EncodingMap, Gate};
use crate::effective::paulis_of_weight;
use crate::error::{Error, Result};
use crate::pauli::{PauliOperator, QubitLayout};
use crate::word_ops::WordOperatorPair;

pub const MAX_DENSE_QUBITS: usize = 14;
pub const KL_TOLERANCE: f64 = 1e-9;
pub const UNITARY_TOLERANCE: f64 = 1e-12;

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: QubitLayout,
    amplitudes: Vec<Complex64>,
}

fn check_size(layout: QubitLayout) -> Result<()> {
    if layout.total() > MAX_DENSE_QUBITS {
        return Err(Error::SizeBound {
            qubits: layout.total(),
            limit: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

fn mask(bits: &crate::gf2::BitVec) -> usize {
    bits.iter_ones().fold(0, |m, q| m | (1 << q))
}

impl StateVector {
    pub fn layout(&self) -> QubitLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_pauli(&self, p: &PauliOperator) -> Result<StateVector> {
        if p.layout() != self.layout {
            return Err(Error::LayoutMismatch {
                left: self.layout.to_string(),
                right: p.layout().to_string(),
            });
        }
        let xm = mask(p.x());
        let zm = mask(p.z());
        let global = I_POW[p.phase() as usize];
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (s, &a) in self.amplitudes.iter().enumerate() {
            let sign = if (zm & s).count_ones() % 2 == 1 { -global } else { global };
            out[s ^ xm] = sign * a;
        }
        Ok(StateVector {
            layout: self.layout,
            amplitudes: out,
        })
    }

    pub fn expectation(&self, p: &PauliOperator) -> Result<Complex64> {
        Ok(self.inner(&self.apply_pauli(p)?))
    }

    fn apply_gate(&mut self, gate: Gate) {
        match gate {
            Gate::H(q) => {
                let bit = 1 << q;
                let r = std::f64::consts::FRAC_1_SQRT_2;
                for s in 0..self.amplitudes.len() {
                    if s & bit == 0 {
                        let a = self.amplitudes[s];
                        let b = self.amplitudes[s | bit];
                        self.amplitudes[s] = (a + b) * r;
                        self.amplitudes[s | bit] = (a - b) * r;
                    }
                }
            }
            Gate::Cz(a, b) => {
                let both = (1 << a) | (1 << b);
                for (s, amp) in self.amplitudes.iter_mut().enumerate() {
                    if s & both == both {
                        *amp = -*amp;
                    }
                }
            }
        }
    }
}

/// `|0⟩` on each ancilla and a Bell pair `(|00⟩+|11⟩)/√2` across each ebit.
pub fn base_state(layout: QubitLayout) -> Result<StateVector> {
    check_size(layout)?;
    let total = layout.total();
    let amp = Complex64::new((0.5f64).powi(layout.c as i32).sqrt(), 0.0);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << total];
    for bits in 0..(1usize << layout.c) {
        let s = (0..layout.c)
            .filter(|j| bits >> j & 1 == 1)
            .fold(0, |s, j| s | (1 << layout.ebit_alice(j)) | (1 << layout.bob(j)));
        amplitudes[s] = amp;
    }
    Ok(StateVector { layout, amplitudes })
}

pub fn encode_state(sv: &StateVector, map: &EncodingMap) -> Result<StateVector> {
    if map.layout() != sv.layout {
        return Err(Error::LayoutMismatch {
            left: sv.layout.to_string(),
            right: map.layout().to_string(),
        });
    }
    let mut out = sv.clone();
    map.gates().iter().for_each(|&g| out.apply_gate(g));
    Ok(out)
}

/// Inverse of [`encode_state`]; every gate is self-inverse.
pub fn decode_state(sv: &StateVector, map: &EncodingMap) -> Result<StateVector> {
    if map.layout() != sv.layout {
        return Err(Error::LayoutMismatch {
            left: sv.layout.to_string(),
            right: map.layout().to_string(),
        });
    }
    let mut out = sv.clone();
    map.gates().iter().rev().for_each(|&g| out.apply_gate(g));
    Ok(out)
}

/// Post-encoding word operators applied to the encoded base state, with no
/// orthogonality check.
pub fn apply_word_operators(
    table: &[WordOperatorPair],
    encoded: &StateVector,
) -> Result<Vec<StateVector>> {
    table
        .par_iter()
        .map(|pair| encoded.apply_pauli(&pair.post))
        .collect()
}

/// Like [`apply_word_operators`] but rejects a pair of codeword states that
/// are not orthogonal.
pub fn codeword_states(table: &[WordOperatorPair], encoded: &StateVector) -> Result<Vec<StateVector>> {
    if table.is_empty() {
        return Err(Error::Invalid("no codewords".into()));
    }
    let states = apply_word_operators(table, encoded)?;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let overlap = states[i].inner(&states[j]).norm();
            if overlap > KL_TOLERANCE {
                return Err(Error::NotOrthogonal {
                    first: i,
                    second: j,
                    overlap,
                });
            }
        }
    }
    Ok(states)
}

/// Largest deviation of the Gram matrix from the identity.
pub fn gram_deviation(states: &[StateVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b) - target).norm());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KLViolation {
    pub first: usize,
    pub second: usize,
    pub error_a: String,
    pub error_b: String,
    /// `⟨w_first|E_a† E_b|w_second⟩` as `[re, im]`.
    pub value: [f64; 2],
    /// What the condition requires: 0 off the diagonal, `C_ab` on it.
    pub expected: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KLReport {
    pub pass: bool,
    pub codewords: usize,
    pub errors: usize,
    /// Smallest `(first, second)` with `first <= second` that breaks the condition.
    pub first_violation: Option<KLViolation>,
    /// Smallest pair `first < second` with a nonzero cross term.
    pub first_offdiagonal: Option<KLViolation>,
    /// Smallest codeword whose diagonal element differs from codeword 0's.
    pub first_diagonal: Option<KLViolation>,
    /// `C_ab = ⟨w_0|E_a† E_b|w_0⟩`.
    #[serde(skip)]
    pub c_matrix: Vec<Vec<Complex64>>,
}

impl KLReport {
    pub fn c_is_hermitian(&self, tol: f64) -> bool {
        let n = self.c_matrix.len();
        (0..n).all(|a| (0..n).all(|b| (self.c_matrix[a][b] - self.c_matrix[b][a].conj()).norm() <= tol))
    }
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

/// Checks `⟨w_i|E_a† E_b|w_j⟩ = C_ab δ_ij` for all ordered error pairs.
pub fn kl_check(states: &[StateVector], errors: &[PauliOperator]) -> Result<KLReport> {
    kl_check_with_tolerance(states, errors, KL_TOLERANCE)
}

pub fn kl_check_with_tolerance(
    states: &[StateVector],
    errors: &[PauliOperator],
    tol: f64,
) -> Result<KLReport> {
    if states.is_empty() {
        return Err(Error::Invalid("no codeword states".into()));
    }
    if !errors.iter().any(PauliOperator::is_identity) {
        return Err(Error::Invalid("error set must contain the identity".into()));
    }
    let k = states.len();
    let m = errors.len();
    // phi[a][i] = E_a |w_i>
    let phi: Vec<Vec<StateVector>> = errors
        .par_iter()
        .map(|e| states.iter().map(|s| s.apply_pauli(e)).collect::<Result<_>>())
        .collect::<Result<_>>()?;

    // elements[a][b][i][j] for a <= b; the rest follows by conjugation.
    let upper: Vec<Vec<Vec<Vec<Complex64>>>> = (0..m)
        .into_par_iter()
        .map(|a| {
            (a..m)
                .map(|b| {
                    (0..k)
                        .map(|i| (0..k).map(|j| phi[a][i].inner(&phi[b][j])).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let element = |a: usize, b: usize, i: usize, j: usize| {
        if a <= b {
            upper[a][b - a][i][j]
        } else {
            upper[b][a - b][j][i].conj()
        }
    };

    let c_matrix: Vec<Vec<Complex64>> = (0..m)
        .map(|a| (0..m).map(|b| element(a, b, 0, 0)).collect())
        .collect();

    let violation = |i: usize, j: usize, a: usize, b: usize, expected: Complex64| KLViolation {
        first: i,
        second: j,
        error_a: errors[a].to_string(),
        error_b: errors[b].to_string(),
        value: pair(element(a, b, i, j)),
        expected: pair(expected),
    };
    let zero = Complex64::new(0.0, 0.0);
    let offdiag_at = |i: usize, j: usize| {
        (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .find(|&(a, b)| element(a, b, i, j).norm() > tol)
            .map(|(a, b)| violation(i, j, a, b, zero))
    };
    let diag_at = |i: usize| {
        (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .find(|&(a, b)| (element(a, b, i, i) - c_matrix[a][b]).norm() > tol)
            .map(|(a, b)| violation(i, i, a, b, c_matrix[a][b]))
    };

    let first_offdiagonal = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .find_map(|(i, j)| offdiag_at(i, j));
    let first_diagonal = (1..k).find_map(diag_at);
    let first_violation = (0..k)
        .flat_map(|i| (i..k).map(move |j| (i, j)))
        .find_map(|(i, j)| if i == j { diag_at(i) } else { offdiag_at(i, j) });

    Ok(KLReport {
        pass: first_violation.is_none(),
        codewords: k,
        errors: m,
        first_violation,
        first_offdiagonal,
        first_diagonal,
        c_matrix,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    /// Exact distance, when an undetectable Pauli of weight `<= checked_up_to` exists.
    pub distance: Option<usize>,
    /// Every Pauli of lower weight is detectable.
    pub lower_bound: usize,
    pub checked_up_to: usize,
    /// Lowest-weight undetectable Pauli found, in enumeration order.
    pub witness: Option<String>,
}

/// Whether `⟨w_i|P|w_j⟩ = c δ_ij` for a single constant `c`.
pub fn is_detectable(states: &[StateVector], p: &PauliOperator, tol: f64) -> Result<bool> {
    let images: Vec<StateVector> = states.iter().map(|s| s.apply_pauli(p)).collect::<Result<_>>()?;
    let c = states[0].inner(&images[0]);
    for (i, si) in states.iter().enumerate() {
        for (j, img) in images.iter().enumerate() {
            let expected = if i == j { c } else { Complex64::new(0.0, 0.0) };
            if (si.inner(img) - expected).norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Searches weights `1..=max_weight` for a Pauli that the code cannot detect.
pub fn certify_distance(states: &[StateVector], max_weight: usize) -> Result<DistanceReport> {
    let layout = states
        .first()
        .map(StateVector::layout)
        .ok_or_else(|| Error::Invalid("no codeword states".into()))?;
    check_size(layout)?;
    for w in 1..=max_weight.min(layout.total()) {
        let candidates = paulis_of_weight(layout, w);
        let found = candidates
            .par_iter()
            .position_first(|p| !is_detectable(states, p, KL_TOLERANCE).unwrap_or(false));
        if let Some(idx) = found {
            return Ok(DistanceReport {
                distance: Some(w),
                lower_bound: w,
                checked_up_to: w,
                witness: Some(candidates[idx].to_string()),
            });
        }
    }
    Ok(DistanceReport {
        distance: None,
        lower_bound: max_weight + 1,
        checked_up_to: max_weight,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{
        build_encoding_map, encoded_generators, initial_generators, ring_graph,
    };
    use crate::gf2::BitVec;
    use crate::word_ops::word_operator_pair;

    fn layout(n: usize, c: usize) -> QubitLayout {
        QubitLayout::new(n, c).unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < UNITARY_TOLERANCE
    }

    #[test]
    fn single_bell_pair() {
        let s = base_state(layout(1, 1)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = s.amplitudes();
        assert!(close(a[0], Complex64::new(r, 0.0)));
        assert!(close(a[3], Complex64::new(r, 0.0)));
        assert!(a[1].norm() == 0.0 && a[2].norm() == 0.0);
    }

    #[test]
    fn base_state_is_stabilized() {
        for (n, c) in [(7, 2), (6, 1), (3, 0), (4, 4)] {
            let l = layout(n, c);
            let s = base_state(l).unwrap();
            assert!((s.norm() - 1.0).abs() < UNITARY_TOLERANCE);
            for g in initial_generators(l).iter() {
                assert!(close(s.expectation(g).unwrap(), Complex64::new(1.0, 0.0)), "{g}");
            }
        }
    }

    #[test]
    fn encoded_state_is_stabilized() {
        for (n, c) in [(7, 2), (6, 1), (9, 1)] {
            let l = layout(n, c);
            let graph = ring_graph(n).unwrap();
            let map = build_encoding_map(l, &graph).unwrap();
            let base = base_state(l).unwrap();
            let enc = encode_state(&base, &map).unwrap();
            for g in encoded_generators(l, &graph).unwrap().iter() {
                assert!(close(enc.expectation(g).unwrap(), Complex64::new(1.0, 0.0)), "{g}");
            }
            let back = decode_state(&enc, &map).unwrap();
            assert!((back.inner(&base).norm() - 1.0).abs() < UNITARY_TOLERANCE);
        }
    }

    #[test]
    fn too_many_qubits() {
        assert!(matches!(
            base_state(layout(13, 2)),
            Err(Error::SizeBound { qubits: 15, .. })
        ));
    }

    #[test]
    fn pauli_application_matches_operator_product() {
        let l = layout(3, 1);
        let s = encode_state(&base_state(l).unwrap(), &build_encoding_map(l, &ring_graph(3).unwrap()).unwrap()).unwrap();
        let a: PauliOperator = "XYZ|Y".parse().unwrap();
        let b: PauliOperator = "-iZZX|X".parse().unwrap();
        let lhs = s.apply_pauli(&b).unwrap().apply_pauli(&a).unwrap();
        let rhs = s.apply_pauli(&a.mul(&b).unwrap()).unwrap();
        assert!(lhs.amplitudes().iter().zip(rhs.amplitudes()).all(|(x, y)| close(*x, *y)));
    }

    #[test]
    fn one_dimensional_code_detects_non_stabilizers() {
        let l = layout(6, 1);
        let graph = ring_graph(6).unwrap();
        let enc = encode_state(&base_state(l).unwrap(), &build_encoding_map(l, &graph).unwrap()).unwrap();
        let report = certify_distance(std::slice::from_ref(&enc), 2).unwrap();
        assert_eq!(report.distance, None);
        assert_eq!(report.lower_bound, 3);
    }

    #[test]
    fn codewords_are_signed_generator_eigenstates() {
        // Z^b anticommutes with g_i exactly when b_i = 1.
        let l = layout(6, 1);
        let graph = ring_graph(6).unwrap();
        let gens = encoded_generators(l, &graph).unwrap();
        let map = build_encoding_map(l, &graph).unwrap();
        let enc = encode_state(&base_state(l).unwrap(), &map).unwrap();
        let b = BitVec::parse_layout("111011|1", 6, 7).unwrap();
        let table = vec![word_operator_pair(&b, &gens, &map).unwrap()];
        let w = &apply_word_operators(&table, &enc).unwrap()[0];
        for (pos, g) in (0..7).map(|p| (p, gens.x_owner(p))) {
            let sign = if b.get(pos) { -1.0 } else { 1.0 };
            assert!(close(w.expectation(g).unwrap(), Complex64::new(sign, 0.0)), "{g}");
        }
    }

    #[test]
    fn duplicate_codeword_is_not_orthogonal() {
        let l = layout(6, 1);
        let graph = ring_graph(6).unwrap();
        let gens = encoded_generators(l, &graph).unwrap();
        let map = build_encoding_map(l, &graph).unwrap();
        let enc = encode_state(&base_state(l).unwrap(), &map).unwrap();
        let pair = word_operator_pair(&BitVec::zeros(7), &gens, &map).unwrap();
        let err = codeword_states(&[pair.clone(), pair], &enc).unwrap_err();
        assert!(matches!(err, Error::NotOrthogonal { first: 0, second: 1, .. }));
    }
}
