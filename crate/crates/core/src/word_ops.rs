//! Word operators: the Paulis that carry the base state to each codeword state.
//!
//! After encoding, codeword `b` is `Z^b` on the stabilizer state. Bob cannot
//! act, so the Bob half of `Z^b` is cleared by multiplying in word
//! stabilizers, which leaves the state unchanged up to sign.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{Direction, EncodingMap, GeneratorSet};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::pauli::PauliOperator;
use crate::search::ClassicalCode;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordOperatorPair {
    pub codeword: BitVec,
    /// After encoding; identity on Bob.
    pub post: PauliOperator,
    /// Before encoding; identity on Bob.
    pub pre: PauliOperator,
    /// X part of `pre` on the ancillas.
    pub x: BitVec,
    /// Z part of `pre` on Alice's ebit halves.
    pub v: BitVec,
    /// X part of `pre` on Alice's ebit halves.
    pub u: BitVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordOperatorRow {
    pub codeword: String,
    pub pre: String,
    pub post: String,
}

impl WordOperatorPair {
    pub fn row(&self) -> WordOperatorRow {
        WordOperatorRow {
            codeword: self.codeword.format_split(self.post.layout().n),
            pre: self.pre.to_string(),
            post: self.post.to_string(),
        }
    }
}

/// `Z^b` times the word stabilizers that cancel its Bob support.
pub fn post_encoding_word_op(b: &BitVec, gens: &GeneratorSet) -> Result<PauliOperator> {
    let layout = gens.layout;
    if b.len() != layout.total() {
        return Err(Error::LengthMismatch {
            expected: layout.total(),
            found: b.len(),
        });
    }
    let mut out = PauliOperator::z_type(layout, b.clone())?;
    let bob_z = |p: &PauliOperator| p.z().slice(layout.n, layout.total());
    let target = bob_z(&out);
    if target.is_zero() {
        return Ok(out);
    }

    // Eliminate over the Bob-Z parts of generators that have no Bob X,
    // tracking which generators make up each reduced row.
    let usable: Vec<&PauliOperator> = gens
        .iter()
        .filter(|p| p.x().slice(layout.n, layout.total()).is_zero())
        .collect();
    let mut rows: Vec<(BitVec, BitVec)> = usable
        .iter()
        .enumerate()
        .map(|(k, p)| (bob_z(p), BitVec::unit(usable.len(), k)))
        .filter(|(z, _)| !z.is_zero())
        .collect();
    let mut basis: Vec<(usize, BitVec, BitVec)> = Vec::new();
    for (mut z, mut combo) in rows.drain(..) {
        for (pivot, bz, bc) in &basis {
            if z.get(*pivot) {
                z.xor_assign(bz);
                combo.xor_assign(bc);
            }
        }
        let lead = z.iter_ones().next();
        if let Some(pivot) = lead {
            for (_, bz, bc) in basis.iter_mut() {
                if bz.get(pivot) {
                    bz.xor_assign(&z);
                    bc.xor_assign(&combo);
                }
            }
            basis.push((pivot, z, combo));
        }
    }
    let mut rest = target;
    let mut combo = BitVec::zeros(usable.len());
    for (pivot, bz, bc) in &basis {
        if rest.get(*pivot) {
            rest.xor_assign(bz);
            combo.xor_assign(bc);
        }
    }
    if !rest.is_zero() {
        return Err(Error::NotClearable(format!("Z^{b}")));
    }
    for k in combo.iter_ones() {
        out = out.mul(usable[k])?;
    }
    debug_assert!(out.bob_is_identity());
    Ok(out)
}

/// `U_E† · post · U_E`.
pub fn pre_encoding_word_op(post: &PauliOperator, map: &EncodingMap) -> Result<PauliOperator> {
    if !post.bob_is_identity() {
        return Err(Error::BobSupport(post.to_string()));
    }
    map.conjugate(post, Direction::Inverse)
}

pub fn word_operator_pair(
    codeword: &BitVec,
    gens: &GeneratorSet,
    map: &EncodingMap,
) -> Result<WordOperatorPair> {
    let layout = gens.layout;
    let post = post_encoding_word_op(codeword, gens)?;
    let pre = pre_encoding_word_op(&post, map)?;
    let a = layout.ancillas();
    if !pre.z().slice(0, a).is_zero() {
        return Err(Error::Invalid(format!(
            "pre-encoding operator {pre} has Z support on the ancillas"
        )));
    }
    Ok(WordOperatorPair {
        codeword: codeword.clone(),
        x: pre.x().slice(0, a),
        v: pre.z().slice(a, layout.n),
        u: pre.x().slice(a, layout.n),
        post,
        pre,
    })
}

/// One pair per codeword, in codeword order.
pub fn word_operator_table(
    code: &ClassicalCode,
    gens: &GeneratorSet,
    map: &EncodingMap,
) -> Result<Vec<WordOperatorPair>> {
    if map.layout() != gens.layout {
        return Err(Error::LayoutMismatch {
            left: gens.layout.to_string(),
            right: map.layout().to_string(),
        });
    }
    code.codewords
        .par_iter()
        .map(|w| word_operator_pair(w, gens, map))
        .collect()
}
