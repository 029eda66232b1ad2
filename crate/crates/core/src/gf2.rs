//! Dense vectors and matrices over GF(2), packed into machine words.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// Fixed-length binary vector.
///
/// Position 0 is the leftmost character of the textual form (qubit 1 in the
/// usual listings). Bits beyond `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Vector with a single 1 at `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn from_positions(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    /// Decodes `value` with position 0 in the most significant of `len` bits,
    /// so integer order coincides with the lexicographic order of the text form.
    pub fn from_msb_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        for i in 0..len {
            if (value >> (len - 1 - i)) & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn to_msb_u64(&self) -> u64 {
        assert!(self.len <= 64);
        self.iter_ones()
            .fold(0u64, |acc, i| acc | 1 << (self.len - 1 - i))
    }

    /// Bit `i` of the result is position `i`.
    pub fn to_lsb_u64(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    fn check_len(&self, other: &BitVec) {
        assert_eq!(
            self.len, other.len,
            "GF(2) vector length mismatch ({} vs {})",
            self.len, other.len
        );
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        self.check_len(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        self.check_len(other);
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        self.check_len(other);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    /// Copy of positions `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        assert!(start <= end && end <= self.len);
        BitVec::from_positions(
            end - start,
            self.iter_ones().filter(|&i| i >= start && i < end).map(|i| i - start),
        )
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Parses a 0/1 string. Whitespace is ignored; at most one `|` may split
    /// the vector, and its position (count of bits before it) is returned.
    pub fn parse_split(s: &str) -> Result<(BitVec, Option<usize>)> {
        let mut bits = Vec::new();
        let mut split = None;
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                '|' => {
                    if split.replace(bits.len()).is_some() {
                        return Err(Error::parse(s, "more than one '|' separator"));
                    }
                }
                c if c.is_whitespace() => {}
                c => return Err(Error::parse(s, format!("unexpected character {c:?}"))),
            }
        }
        if bits.is_empty() {
            return Err(Error::parse(s, "empty bitstring"));
        }
        Ok((BitVec::from_bools(&bits), split))
    }

    /// Parses a bitstring that must contain a `|` after exactly `alice` bits
    /// and have `total` bits overall.
    pub fn parse_layout(s: &str, alice: usize, total: usize) -> Result<BitVec> {
        let (v, split) = Self::parse_split(s)?;
        match split {
            None if total != alice => Err(Error::parse(s, "missing '|' separator")),
            Some(p) if p != alice => Err(Error::parse(
                s,
                format!("expected {alice} bits before '|', found {p}"),
            )),
            _ if v.len() != total => Err(Error::parse(
                s,
                format!("expected {total} bits, found {}", v.len()),
            )),
            _ => Ok(v),
        }
    }

    /// Text form with a `|` inserted after `split` bits.
    pub fn format_split(&self, split: usize) -> String {
        let mut s = String::with_capacity(self.len + 1);
        for i in 0..self.len {
            if i == split {
                s.push('|');
            }
            s.push(if self.get(i) { '1' } else { '0' });
        }
        if split == self.len {
            s.push('|');
        }
        s
    }
}

/// Shorter vectors sort first; equal lengths compare lexicographically by
/// text form (position 0 most significant).
impl Ord for BitVec {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                let diff = a ^ b;
                if diff != 0 {
                    let t = diff.trailing_zeros();
                    return if (a >> t) & 1 == 1 {
                        std::cmp::Ordering::Greater
                    } else {
                        std::cmp::Ordering::Less
                    };
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

impl PartialOrd for BitVec {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl Serialize for BitVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitVec::parse_split(&s)
            .map(|(v, _)| v)
            .map_err(serde::de::Error::custom)
    }
}

/// Rectangular matrix over GF(2) stored as rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

/// Result of [`BitMatrix::eliminate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub matrix: BitMatrix,
    /// Pivot columns that received a leading 1; pivot row `r` owns `placed[r]`.
    pub placed: Vec<usize>,
    /// Row swaps plus row additions performed.
    pub row_ops: usize,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVec::zeros(cols); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            cols: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                found: r.len(),
            });
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Builds from 0/1 strings; every row must have the same length.
    pub fn from_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| BitVec::parse_split(r.as_ref()).map(|(v, _)| v))
            .collect::<Result<Vec<_>>>()?;
        let cols = parsed.first().map_or(0, BitVec::len);
        Self::from_rows(cols, parsed)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.rows[r].set(c, v);
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows() == self.cols
            && (0..self.cols).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Matrix with columns reordered: output column `k` is input column `order[k]`.
    pub fn permute_columns(&self, order: &[usize]) -> BitMatrix {
        assert_eq!(order.len(), self.cols);
        BitMatrix {
            cols: self.cols,
            rows: self
                .rows
                .iter()
                .map(|r| BitVec::from_bools(&order.iter().map(|&c| r.get(c)).collect::<Vec<_>>()))
                .collect(),
        }
    }

    /// Row-reduces so that each requested pivot column, in order, gets a
    /// leading 1 in the next free row and zeros in every other row.
    /// Pivot columns with no available 1 are skipped. The row space is unchanged.
    pub fn eliminate(&self, pivot_columns: &[usize]) -> Elimination {
        let mut rows = self.rows.clone();
        let mut placed = Vec::new();
        let mut row_ops = 0;
        let mut next = 0;
        for &col in pivot_columns {
            assert!(col < self.cols, "pivot column {col} out of range");
            let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            if found != next {
                rows.swap(found, next);
                row_ops += 1;
            }
            let pivot = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot);
                    row_ops += 1;
                }
            }
            placed.push(col);
            next += 1;
        }
        Elimination {
            matrix: BitMatrix {
                cols: self.cols,
                rows,
            },
            placed,
            row_ops,
        }
    }

    /// Reduced row echelon form with zero rows dropped. Two matrices share a
    /// row space iff their canonical forms are equal.
    pub fn canonical_form(&self) -> BitMatrix {
        let all: Vec<usize> = (0..self.cols).collect();
        let e = self.eliminate(&all);
        let rank = e.placed.len();
        BitMatrix {
            cols: self.cols,
            rows: e.matrix.rows.into_iter().take(rank).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.canonical_form().nrows()
    }

    pub fn same_row_space(&self, other: &BitMatrix) -> bool {
        self.cols == other.cols && self.canonical_form() == other.canonical_form()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.nrows(), self.cols)?;
        fmt::Display::fmt(self, f)
    }
}
