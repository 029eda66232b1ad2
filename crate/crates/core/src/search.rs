//! Classical codes that correct a set of effective errors.
//!
//! Two codewords clash when their XOR equals the XOR of two effective errors
//! (including the zero error). The admissible codes are the cliques of the
//! Cayley graph on `{0,1}^len` whose connection set is everything not
//! forbidden. The graph is vertex-transitive, so every search anchors the zero
//! word and looks for a maximum clique among its neighbours.
//!
//! The exact search runs in two passes. The first finds the clique number with
//! a bitset branch-and-bound (greedy colouring bound, degeneracy ordering).
//! The second walks vertices in increasing codeword order and returns the
//! lexicographically least clique of that size, so the answer does not depend
//! on thread scheduling.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::GeneratorSet;
use crate::effective::ErrorCatalog;
use crate::error::{Error, Result};
use crate::gf2::BitVec;

mod symmetry;

/// Longest codeword the lookup tables and the clique search accept.
pub const MAX_SEARCH_LENGTH: usize = 24;

/// Differences two codewords may not have.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictSet {
    length: usize,
    alice: usize,
    forbidden: BTreeSet<BitVec>,
    parity_masks: Vec<BitVec>,
    table: Vec<u64>,
    masks_msb: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictSetFile {
    pub length: usize,
    pub alice: usize,
    pub forbidden: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parity_masks: Vec<String>,
}

impl ConflictSet {
    /// `parity_masks` add every difference with odd overlap with some mask.
    pub fn new(
        length: usize,
        alice: usize,
        forbidden: impl IntoIterator<Item = BitVec>,
        parity_masks: Vec<BitVec>,
    ) -> Result<Self> {
        if length == 0 || length > MAX_SEARCH_LENGTH {
            return Err(Error::Invalid(format!(
                "codeword length {length} outside 1..={MAX_SEARCH_LENGTH}"
            )));
        }
        let mut set = BTreeSet::new();
        for d in forbidden {
            if d.len() != length {
                return Err(Error::LengthMismatch {
                    expected: length,
                    found: d.len(),
                });
            }
            if !d.is_zero() {
                set.insert(d);
            }
        }
        let mut table = vec![0u64; (1usize << length).div_ceil(64)];
        for d in &set {
            let code = d.to_msb_u64() as usize;
            table[code / 64] |= 1 << (code % 64);
        }
        let mut masks = Vec::new();
        for m in parity_masks {
            if m.len() != length {
                return Err(Error::LengthMismatch {
                    expected: length,
                    found: m.len(),
                });
            }
            if !m.is_zero() && !masks.contains(&m) {
                masks.push(m);
            }
        }
        let masks_msb = masks.iter().map(BitVec::to_msb_u64).collect();
        Ok(ConflictSet {
            length,
            alice,
            forbidden: set,
            parity_masks: masks,
            table,
            masks_msb,
        })
    }

    pub fn len_bits(&self) -> usize {
        self.length
    }

    pub fn alice_len(&self) -> usize {
        self.alice
    }

    pub fn forbidden(&self) -> &BTreeSet<BitVec> {
        &self.forbidden
    }

    pub fn parity_masks(&self) -> &[BitVec] {
        &self.parity_masks
    }

    #[inline]
    pub(crate) fn forbids_code(&self, d: u64) -> bool {
        if d == 0 {
            return false;
        }
        let d_us = d as usize;
        (self.table[d_us / 64] >> (d_us % 64)) & 1 == 1
            || self.masks_msb.iter().any(|m| (m & d).count_ones() & 1 == 1)
    }

    pub fn forbids(&self, d: &BitVec) -> bool {
        d.len() == self.length && self.forbids_code(d.to_msb_u64())
    }

    pub fn to_file(&self) -> ConflictSetFile {
        ConflictSetFile {
            length: self.length,
            alice: self.alice,
            forbidden: self.forbidden.iter().map(|d| d.format_split(self.alice)).collect(),
            parity_masks: self
                .parity_masks
                .iter()
                .map(|d| d.format_split(self.alice))
                .collect(),
        }
    }

    pub fn from_file(file: &ConflictSetFile) -> Result<Self> {
        let parse = |v: &[String]| {
            v.iter()
                .map(|s| BitVec::parse_layout(s, file.alice, file.length))
                .collect::<Result<Vec<_>>>()
        };
        Self::new(
            file.length,
            file.alice,
            parse(&file.forbidden)?,
            parse(&file.parity_masks)?,
        )
    }
}

/// Every XOR of two distinct effective errors, plus every nonzero effective error.
pub fn build_conflict_set(catalog: &ErrorCatalog) -> Result<ConflictSet> {
    let patterns: Vec<&BitVec> = catalog.distinct_effective.iter().map(|e| e.pattern()).collect();
    let mut forbidden = Vec::with_capacity(patterns.len() * (patterns.len() + 1) / 2);
    for (i, a) in patterns.iter().enumerate() {
        forbidden.push((*a).clone());
        for b in &patterns[i + 1..] {
            forbidden.push(a.xor(b));
        }
    }
    ConflictSet::new(catalog.layout.total(), catalog.layout.n, forbidden, Vec::new())
}

/// Like [`build_conflict_set`], and additionally requires every codeword to act
/// with the same sign on each stabilizer element that relates two errors of
/// equal effective error. Without this, such error pairs (for instance Bob's
/// `X_j` and Alice's `Z_{n-c+j}`) act as different logical operators.
pub fn build_degenerate_safe_conflict_set(
    catalog: &ErrorCatalog,
    gens: &GeneratorSet,
) -> Result<ConflictSet> {
    if gens.layout != catalog.layout {
        return Err(Error::LayoutMismatch {
            left: catalog.layout.to_string(),
            right: gens.layout.to_string(),
        });
    }
    let base = build_conflict_set(catalog)?;
    // E_a E_b is a stabilizer element s; Z^c commutes with s iff c · x(s) = 0,
    // and x(s) = x(E_a) + x(E_b).
    let masks = catalog
        .collisions()
        .into_iter()
        .map(|(a, b)| catalog.entries[a].pauli.x().xor(catalog.entries[b].pauli.x()))
        .collect();
    ConflictSet::new(base.length, base.alice, base.forbidden, masks)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCode {
    pub length: usize,
    pub alice: usize,
    pub codewords: Vec<BitVec>,
}

impl ClassicalCode {
    pub fn new(length: usize, alice: usize, codewords: Vec<BitVec>) -> Result<Self> {
        if let Some(w) = codewords.iter().find(|w| w.len() != length) {
            return Err(Error::LengthMismatch {
                expected: length,
                found: w.len(),
            });
        }
        Ok(ClassicalCode {
            length,
            alice,
            codewords,
        })
    }

    pub fn parse(alice: usize, length: usize, words: &[impl AsRef<str>]) -> Result<Self> {
        let codewords = words
            .iter()
            .map(|w| BitVec::parse_layout(w.as_ref(), alice, length))
            .collect::<Result<_>>()?;
        Self::new(length, alice, codewords)
    }

    pub fn k(&self) -> usize {
        self.codewords.len()
    }

    pub fn bitstrings(&self) -> Vec<String> {
        self.codewords.iter().map(|w| w.format_split(self.alice)).collect()
    }
}

/// A clashing pair of codeword indices, `first < second`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub first: usize,
    pub second: usize,
    pub difference: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeCheck {
    pub valid: bool,
    pub first_violation: Option<Violation>,
}

/// Checks every pair of codewords in `(i, j)` lexicographic order. Repeated
/// codewords count as a clash (zero difference).
pub fn verify_code(code: &ClassicalCode, conflicts: &ConflictSet) -> Result<CodeCheck> {
    if code.length != conflicts.length {
        return Err(Error::LengthMismatch {
            expected: conflicts.length,
            found: code.length,
        });
    }
    let codes: Vec<u64> = code.codewords.iter().map(BitVec::to_msb_u64).collect();
    for i in 0..codes.len() {
        for j in i + 1..codes.len() {
            let d = codes[i] ^ codes[j];
            if d == 0 || conflicts.forbids_code(d) {
                return Ok(CodeCheck {
                    valid: false,
                    first_violation: Some(Violation {
                        first: i,
                        second: j,
                        difference: BitVec::from_msb_u64(code.length, d).format_split(code.alice),
                    }),
                });
            }
        }
    }
    Ok(CodeCheck {
        valid: true,
        first_violation: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Deterministic,
    /// Root branches shared among `jobs` worker threads.
    Parallel { jobs: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Contains the zero word; codewords in increasing order.
    pub code: ClassicalCode,
    /// False when the budget ran out; `code` is then the best clique seen.
    pub exact: bool,
    pub nodes: u64,
    pub elapsed: Duration,
}

// --- bitset helpers -------------------------------------------------------

type Bits = Vec<u64>;

#[inline]
fn bit_set(b: &mut [u64], i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

#[inline]
fn bit_clear(b: &mut [u64], i: usize) {
    b[i / 64] &= !(1 << (i % 64));
}

#[inline]
fn popcount(b: &[u64]) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
fn lowest(b: &[u64]) -> Option<usize> {
    b.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn ones(b: &[u64]) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            (w != 0).then(|| {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                i * 64 + t
            })
        })
    })
}

#[inline]
fn and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

/// Undirected graph stored as adjacency bitsets.
struct BitGraph {
    words: usize,
    adj: Vec<Bits>,
}

impl BitGraph {
    fn size(&self) -> usize {
        self.adj.len()
    }

    fn full(&self) -> Bits {
        let mut b = vec![0u64; self.words];
        for i in 0..self.size() {
            bit_set(&mut b, i);
        }
        b
    }

    /// Greedy sequential colouring of `p` in index order. Returns vertices
    /// with colour `>= kmin`, in nondecreasing colour, with their colours.
    /// Such vertices are first offered to a lower class, possibly by moving
    /// their single neighbour there to another low class.
    fn color_sort(&self, p: &[u64], kmin: usize) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = p.to_vec();
        let mut low: Vec<Bits> = Vec::new();
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut k = 0;
        while uncolored.iter().any(|&w| w != 0) {
            k += 1;
            let mut q = uncolored.clone();
            let mut class = vec![0u64; self.words];
            while let Some(v) = lowest(&q) {
                bit_clear(&mut uncolored, v);
                bit_clear(&mut q, v);
                bit_set(&mut class, v);
                for (qw, aw) in q.iter_mut().zip(&self.adj[v]) {
                    *qw &= !aw;
                }
            }
            if k < kmin {
                low.push(class);
                continue;
            }
            let mut kept = false;
            for v in ones(&class) {
                if !self.renumber(v, &mut low) {
                    order.push(v);
                    colors.push(k);
                    kept = true;
                }
            }
            if !kept {
                k -= 1;
            }
        }
        (order, colors)
    }

    fn renumber(&self, v: usize, low: &mut [Bits]) -> bool {
        let adj = &self.adj[v];
        for k1 in 0..low.len() {
            let mut hit = None;
            let mut count = 0;
            for (i, (a, c)) in adj.iter().zip(&low[k1]).enumerate() {
                let w = a & c;
                if w != 0 {
                    count += w.count_ones();
                    if count > 1 {
                        break;
                    }
                    hit = Some(i * 64 + w.trailing_zeros() as usize);
                }
            }
            match (count, hit) {
                (0, _) => {
                    bit_set(&mut low[k1], v);
                    return true;
                }
                (1, Some(u)) => {
                    let au = &self.adj[u];
                    if let Some(k2) = (0..low.len())
                        .find(|&k2| k2 != k1 && au.iter().zip(&low[k2]).all(|(a, c)| a & c == 0))
                    {
                        bit_clear(&mut low[k1], u);
                        bit_set(&mut low[k2], u);
                        bit_set(&mut low[k1], v);
                        return true;
                    }
                }
                _ => {}
            }
        }
        false
    }

    fn color_bound(&self, p: &[u64]) -> usize {
        let mut uncolored = p.to_vec();
        let mut k = 0;
        let mut q = vec![0u64; self.words];
        while uncolored.iter().any(|&w| w != 0) {
            k += 1;
            q.copy_from_slice(&uncolored);
            while let Some(v) = lowest(&q) {
                bit_clear(&mut uncolored, v);
                bit_clear(&mut q, v);
                for (qw, aw) in q.iter_mut().zip(&self.adj[v]) {
                    *qw &= !aw;
                }
            }
        }
        k
    }

    fn induced(&self, order: &[usize]) -> BitGraph {
        let words = order.len().div_ceil(64).max(1);
        let mut pos = vec![0usize; self.size()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let adj = order
            .iter()
            .map(|&old| {
                let mut row = vec![0u64; words];
                for (j, &w) in self.adj[old].iter().enumerate() {
                    let mut w = w;
                    while w != 0 {
                        let t = w.trailing_zeros() as usize;
                        w &= w - 1;
                        bit_set(&mut row, pos[j * 64 + t]);
                    }
                }
                row
            })
            .collect();
        BitGraph { words, adj }
    }

    /// Vertices in decreasing core order: repeatedly peel a minimum-degree
    /// vertex, then reverse, so dense cores come first.
    fn degeneracy_order(&self) -> Vec<usize> {
        let n = self.size();
        let mut degree: Vec<usize> = self.adj.iter().map(|r| popcount(r)).collect();
        let mut removed = vec![false; n];
        let mut peel = Vec::with_capacity(n);
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !removed[v])
                .min_by_key(|&v| (degree[v], std::cmp::Reverse(v)))
                .expect("vertex left");
            removed[v] = true;
            peel.push(v);
            for (j, &w) in self.adj[v].iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    let u = j * 64 + t;
                    if !removed[u] {
                        degree[u] -= 1;
                    }
                }
            }
        }
        peel.reverse();
        peel
    }
}

struct Shared {
    nodes: AtomicU64,
    aborted: AtomicBool,
    start: Instant,
    budget: Budget,
}

impl Shared {
    /// Counts a node; false once the budget is exhausted.
    fn tick(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over_nodes = self.budget.max_nodes.is_some_and(|m| n > m);
        let over_time = n.is_multiple_of(1024)
            && self
                .budget
                .time_limit
                .is_some_and(|t| self.start.elapsed() > t);
        if over_nodes || over_time {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

/// Largest clique seen so far, as value-graph indices.
struct Best {
    size: AtomicUsize,
    members: Mutex<Vec<usize>>,
}

impl Best {
    fn get(&self) -> usize {
        self.size.load(Ordering::Relaxed)
    }

    fn offer(&self, members: Vec<usize>) {
        let mut guard = self.members.lock().expect("poisoned");
        if members.len() > guard.len() {
            self.size.store(members.len(), Ordering::Relaxed);
            *guard = members;
        }
    }
}

/// Branch-and-bound for the clique number on one root branch.
struct MaxSearch<'a> {
    graph: BitGraph,
    labels: Vec<usize>,
    /// Local index of `x ⊕ prefix` for each local vertex `x`; the translation
    /// swaps `0` and the prefix vertex, so one of each pair is enough at the top.
    partner: Vec<usize>,
    prefix: &'a [usize],
    shared: &'a Shared,
    best: &'a Best,
}

impl MaxSearch<'_> {
    fn offer(&self, clique: &[usize]) {
        let mut members = self.prefix.to_vec();
        members.extend(clique.iter().map(|&i| self.labels[i]));
        self.best.offer(members);
    }

    fn expand(&self, clique: &mut Vec<usize>, mut p: Bits) {
        if !self.shared.tick() {
            return;
        }
        let base = self.prefix.len();
        let kmin = (self.best.get() + 1).saturating_sub(base + clique.len()).max(1);
        let (order, colors) = self.graph.color_sort(&p, kmin);
        let top = clique.is_empty();
        for idx in (0..order.len()).rev() {
            if base + clique.len() + colors[idx] <= self.best.get() {
                return;
            }
            let v = order[idx];
            if top && p[v / 64] >> (v % 64) & 1 == 0 {
                continue;
            }
            clique.push(v);
            let np = and(&p, &self.graph.adj[v]);
            if np.iter().all(|&w| w == 0) {
                if base + clique.len() > self.best.get() {
                    self.offer(clique);
                }
            } else {
                self.expand(clique, np);
            }
            clique.pop();
            bit_clear(&mut p, v);
            if top {
                bit_clear(&mut p, self.partner[v]);
            }
            if self.shared.aborted.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

/// Root driver. Vertices are grouped into orbits under the automorphisms
/// that fix `0`, and orbit `i` gets rank `i`. Branch `i` looks for cliques
/// containing `0` and the representative of orbit `i` whose pairwise
/// differences all have rank `>= i`: a clique using a difference `d` of lower
/// rank maps, by a translation and an automorphism, to one containing `0` and
/// the representative of `d`'s orbit, which that earlier branch has covered.
struct CayleyMax<'a> {
    values: &'a [u64],
    index: &'a [u32],
    graph: &'a BitGraph,
    /// Vertices in rank order.
    order: Vec<usize>,
    /// Offset in `order` of each orbit; the first member is its representative.
    starts: Vec<usize>,
    rank: Vec<usize>,
    shared: &'a Shared,
    best: Best,
}

const NOT_A_VERTEX: u32 = u32::MAX;

impl CayleyMax<'_> {
    fn allowed(&self, difference: u64, i: usize) -> bool {
        let k = self.index[difference as usize];
        k != NOT_A_VERTEX && self.rank[k as usize] >= i
    }

    fn greedy_seed(&self) {
        for start in 0..self.graph.size().min(64) {
            let mut clique = vec![start];
            let mut p = self.graph.adj[start].clone();
            while let Some(v) = lowest(&p) {
                clique.push(v);
                p = and(&p, &self.graph.adj[v]);
            }
            if clique.len() > self.best.get() {
                self.best.offer(clique);
            }
        }
    }

    fn branch(&self, i: usize) {
        if self.shared.aborted.load(Ordering::Relaxed) {
            return;
        }
        let v = self.order[self.starts[i]];
        let vv = self.values[v];
        let members: Vec<usize> = self.order[self.starts[i]..]
            .iter()
            .copied()
            .filter(|&x| x != v && self.allowed(self.values[x] ^ vv, i))
            .collect();
        if members.len() < self.best.get() {
            return;
        }
        let words = members.len().div_ceil(64).max(1);
        let mut adj = vec![vec![0u64; words]; members.len()];
        for a in 0..members.len() {
            let va = self.values[members[a]];
            for b in a + 1..members.len() {
                if self.allowed(va ^ self.values[members[b]], i) {
                    bit_set(&mut adj[a], b);
                    bit_set(&mut adj[b], a);
                }
            }
        }
        let local = BitGraph { words, adj };
        let local_order = local.degeneracy_order();
        let graph = local.induced(&local_order);
        let prefix = [v];
        let labels: Vec<usize> = local_order.iter().map(|&k| members[k]).collect();
        let mut local_of = vec![usize::MAX; self.values.len()];
        for (k, &label) in labels.iter().enumerate() {
            local_of[label] = k;
        }
        let partner = labels
            .iter()
            .map(|&label| local_of[self.index[(self.values[label] ^ vv) as usize] as usize])
            .collect();
        let search = MaxSearch {
            labels,
            partner,
            graph,
            prefix: &prefix,
            shared: self.shared,
            best: &self.best,
        };
        let root = search.graph.full();
        if root.iter().all(|&w| w == 0) {
            search.offer(&[]);
        } else {
            search.expand(&mut Vec::new(), root);
        }
    }

    fn run(&self, parallel: bool) {
        self.greedy_seed();
        if parallel {
            (0..self.starts.len()).into_par_iter().for_each(|i| self.branch(i));
        } else {
            (0..self.starts.len()).for_each(|i| self.branch(i));
        }
    }
}

/// Lexicographically first clique of a given size; vertex index order is
/// codeword order.
struct LexSearch<'a> {
    graph: &'a BitGraph,
    shared: &'a Shared,
}

impl LexSearch<'_> {
    fn find(&self, clique: &mut Vec<usize>, mut p: Bits, need: usize) -> bool {
        if need == 0 {
            return true;
        }
        if !self.shared.tick() {
            return false;
        }
        if popcount(&p) < need || self.graph.color_bound(&p) < need {
            return false;
        }
        while let Some(v) = lowest(&p) {
            if popcount(&p) < need {
                return false;
            }
            bit_clear(&mut p, v);
            let np = and(&p, &self.graph.adj[v]);
            clique.push(v);
            if self.find(clique, np, need - 1) {
                return true;
            }
            clique.pop();
            if self.shared.aborted.load(Ordering::Relaxed) {
                return false;
            }
        }
        false
    }

    /// Root branch on vertex `v`: cliques whose smallest member is `v`.
    fn branch(&self, v: usize, need: usize) -> Option<Vec<usize>> {
        let mut p = self.graph.adj[v].clone();
        for u in 0..=v {
            bit_clear(&mut p, u);
        }
        let mut clique = vec![v];
        self.find(&mut clique, p, need - 1).then_some(clique)
    }
}

/// Maximum code containing the zero word. In exact runs the result is the
/// lexicographically least maximum clique, for any mode and worker count.
pub fn max_clique(conflicts: &ConflictSet, budget: Budget, mode: SearchMode) -> Result<SearchOutcome> {
    let start = Instant::now();
    let length = conflicts.length;
    let vertices: Vec<u64> = (1..(1u64 << length))
        .filter(|&v| !conflicts.forbids_code(v))
        .collect();
    let words = vertices.len().div_ceil(64).max(1);
    let adj: Vec<Bits> = vertices
        .par_iter()
        .map(|&a| {
            let mut row = vec![0u64; words];
            for (j, &b) in vertices.iter().enumerate() {
                if a != b && !conflicts.forbids_code(a ^ b) {
                    bit_set(&mut row, j);
                }
            }
            row
        })
        .collect();
    let value_graph = BitGraph { words, adj };
    let shared = Shared {
        nodes: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
        start,
        budget,
    };

    let finish = |members: Vec<usize>, exact: bool| {
        let mut codes: Vec<u64> = members.iter().map(|&i| vertices[i]).collect();
        codes.push(0);
        codes.sort_unstable();
        SearchOutcome {
            code: ClassicalCode {
                length,
                alice: conflicts.alice,
                codewords: codes.into_iter().map(|c| BitVec::from_msb_u64(length, c)).collect(),
            },
            exact,
            nodes: shared.nodes.load(Ordering::Relaxed),
            elapsed: start.elapsed(),
        }
    };

    if vertices.is_empty() {
        return Ok(finish(Vec::new(), true));
    }

    let jobs = match mode {
        SearchMode::Deterministic => None,
        SearchMode::Parallel { jobs } => Some(jobs.max(1)),
    };
    let pool = match jobs {
        Some(j) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?,
        ),
        None => None,
    };

    let mut index = vec![NOT_A_VERTEX; 1usize << length];
    for (k, &v) in vertices.iter().enumerate() {
        index[v as usize] = k as u32;
    }
    let label: Vec<usize> = if length <= symmetry::MAX_SYMMETRY_LENGTH {
        let orbit = symmetry::orbits(length, |d| conflicts.forbids_code(d));
        vertices.iter().map(|&v| orbit[v as usize]).collect()
    } else {
        vertices.iter().map(|&v| v as usize).collect()
    };
    let degree: Vec<usize> = value_graph.adj.iter().map(|r| popcount(r)).collect();
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by_key(|&k| (degree[k], label[k], k));
    let mut starts = Vec::new();
    let mut rank = vec![0; vertices.len()];
    for (pos, &k) in order.iter().enumerate() {
        if pos == 0 || label[order[pos - 1]] != label[k] {
            starts.push(pos);
        }
        rank[k] = starts.len() - 1;
    }
    let max = CayleyMax {
        values: &vertices,
        index: &index,
        graph: &value_graph,
        order,
        starts,
        rank,
        shared: &shared,
        best: Best {
            size: AtomicUsize::new(0),
            members: Mutex::new(Vec::new()),
        },
    };
    match &pool {
        Some(pool) => pool.install(|| max.run(true)),
        None => max.run(false),
    }
    let best_members = max.best.members.into_inner().expect("poisoned");
    if shared.aborted.load(Ordering::Relaxed) {
        return Ok(finish(best_members, false));
    }

    let target = best_members.len();
    let lex = LexSearch {
        graph: &value_graph,
        shared: &shared,
    };
    let found = match &pool {
        Some(pool) => pool.install(|| {
            (0..vertices.len())
                .into_par_iter()
                .find_map_first(|v| lex.branch(v, target))
        }),
        None => (0..vertices.len()).find_map(|v| lex.branch(v, target)),
    };
    match found {
        Some(members) => Ok(finish(members, true)),
        None if shared.aborted.load(Ordering::Relaxed) => Ok(finish(best_members, false)),
        None => Err(Error::Invalid(
            "lexicographic pass found no clique of the maximum size".into(),
        )),
    }
}
