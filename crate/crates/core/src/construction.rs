//! Word-stabilizer generators before and after encoding, and the encoding
//! Clifford that maps one set onto the other.
//!
//! Before encoding, the base state is `|0…0⟩` on the `n - c` ancillas times
//! `c` Bell pairs shared between Alice's last `c` qubits and Bob. The encoder
//! is a Hadamard on every Alice qubit followed by a controlled-Z along every
//! edge of the graph, which sends `Z_i` to `X_i Z_{N(i)}` and leaves Bob alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::pauli::{Pauli, PauliOperator, QubitLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Ring,
    Custom,
}

/// Simple undirected graph on Alice's qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSpec {
    adjacency: BitMatrix,
    kind: GraphKind,
}

/// JSON shape of a graph: 1-based neighbour lists, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub kind: GraphKind,
    pub n: usize,
    pub adjacency: Vec<Vec<usize>>,
}

impl GraphSpec {
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("ring needs at least 3 vertices, got {n}")));
        }
        let mut adjacency = BitMatrix::zeros(n, n);
        for i in 0..n {
            adjacency.set(i, (i + 1) % n, true);
            adjacency.set(i, (i + n - 1) % n, true);
        }
        Ok(GraphSpec {
            adjacency,
            kind: GraphKind::Ring,
        })
    }

    /// Any symmetric 0/1 matrix with zero diagonal.
    pub fn custom(adjacency: BitMatrix) -> Result<Self> {
        let n = adjacency.nrows();
        if n == 0 || adjacency.ncols() != n {
            return Err(Error::InvalidGraph("adjacency matrix must be square and nonempty".into()));
        }
        if !adjacency.is_symmetric() {
            return Err(Error::InvalidGraph("adjacency matrix is not symmetric".into()));
        }
        if let Some(i) = (0..n).find(|&i| adjacency.get(i, i)) {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {}", i + 1)));
        }
        Ok(GraphSpec {
            adjacency,
            kind: GraphKind::Custom,
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adjacency
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.row(v).iter_ones()
    }

    /// Edges `(a, b)` with `a < b`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|a| self.neighbors(a).filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            kind: self.kind,
            n: self.n(),
            adjacency: (0..self.n())
                .map(|v| self.neighbors(v).map(|u| u + 1).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &GraphFile) -> Result<Self> {
        if file.kind == GraphKind::Ring && file.adjacency.is_empty() {
            return Self::ring(file.n);
        }
        if file.adjacency.len() != file.n {
            return Err(Error::InvalidGraph(format!(
                "{} neighbour lists for {} vertices",
                file.adjacency.len(),
                file.n
            )));
        }
        let mut m = BitMatrix::zeros(file.n, file.n);
        for (v, list) in file.adjacency.iter().enumerate() {
            for &u in list {
                if u == 0 || u > file.n {
                    return Err(Error::InvalidGraph(format!("vertex {u} out of range 1..={}", file.n)));
                }
                m.set(v, u - 1, true);
            }
        }
        let g = Self::custom(m)?;
        if file.kind == GraphKind::Ring {
            let ring = Self::ring(file.n)?;
            if ring.adjacency != g.adjacency {
                return Err(Error::InvalidGraph("adjacency does not describe a ring".into()));
            }
            return Ok(ring);
        }
        Ok(g)
    }
}

/// Shorthand for [`GraphSpec::ring`].
pub fn ring_graph(n: usize) -> Result<GraphSpec> {
    GraphSpec::ring(n)
}

/// The `n` word stabilizers `g` and the `c` ebit stabilizers `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub layout: QubitLayout,
    pub g: Vec<PauliOperator>,
    pub h: Vec<PauliOperator>,
}

impl GeneratorSet {
    pub fn iter(&self) -> impl Iterator<Item = &PauliOperator> {
        self.g.iter().chain(&self.h)
    }

    pub fn len(&self) -> usize {
        self.g.len() + self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mutually_commute(&self) -> bool {
        let all: Vec<_> = self.iter().collect();
        all.iter()
            .enumerate()
            .all(|(i, a)| all[i + 1..].iter().all(|b| a.commutes(b).unwrap_or(false)))
    }

    /// Rank of the `[x | z]` rows.
    pub fn rank(&self) -> usize {
        let total = self.layout.total();
        let rows = self.iter().map(|p| p.x().concat(p.z())).collect();
        BitMatrix::from_rows(2 * total, rows)
            .map(|m| m.rank())
            .unwrap_or(0)
    }

    /// `g_i` has its only X at Alice `i` and `h_j` its only X at Bob `j`.
    pub fn is_standard_form(&self) -> bool {
        let l = self.layout;
        self.g.len() == l.n
            && self.h.len() == l.c
            && self.g.iter().enumerate().all(|(i, p)| *p.x() == BitVec::unit(l.total(), i))
            && self
                .h
                .iter()
                .enumerate()
                .all(|(j, p)| *p.x() == BitVec::unit(l.total(), l.bob(j)))
    }

    /// Generator whose X part is exactly position `pos`, in a standard-form set.
    pub fn x_owner(&self, pos: usize) -> &PauliOperator {
        if self.layout.is_bob(pos) {
            &self.h[pos - self.layout.n]
        } else {
            &self.g[pos]
        }
    }

    /// Checks commutation, independence and standard form.
    pub fn validate_standard(&self) -> Result<()> {
        if !self.is_standard_form() {
            return Err(Error::NotStandardForm(
                "each generator needs exactly one X, at its own position".into(),
            ));
        }
        if !self.mutually_commute() {
            return Err(Error::NotStandardForm("generators do not commute".into()));
        }
        if self.rank() != self.layout.total() {
            return Err(Error::NotStandardForm("generators are not independent".into()));
        }
        Ok(())
    }

    pub fn strings(&self) -> (Vec<String>, Vec<String>) {
        (
            self.g.iter().map(ToString::to_string).collect(),
            self.h.iter().map(ToString::to_string).collect(),
        )
    }

    pub fn from_strings(layout: QubitLayout, g: &[String], h: &[String]) -> Result<Self> {
        let parse = |v: &[String]| {
            v.iter()
                .map(|s| PauliOperator::parse_in(s, layout))
                .collect::<Result<Vec<_>>>()
        };
        Ok(GeneratorSet {
            layout,
            g: parse(g)?,
            h: parse(h)?,
        })
    }
}

fn check_graph(layout: QubitLayout, graph: &GraphSpec) -> Result<()> {
    if graph.n() != layout.n {
        return Err(Error::InvalidGraph(format!(
            "graph has {} vertices but layout has n={}",
            graph.n(),
            layout.n
        )));
    }
    Ok(())
}

/// Stabilizers of the unencoded base state: `Z_i` on each ancilla, then
/// `Z ⊗ Z` across each ebit (the `g` list), and `X ⊗ X` across each ebit (`h`).
pub fn initial_generators(layout: QubitLayout) -> GeneratorSet {
    let a = layout.ancillas();
    let mut g: Vec<_> = (0..a)
        .map(|i| PauliOperator::single(layout, i, Pauli::Z))
        .collect();
    let pair = |p: Pauli, j: usize| {
        let mut op = PauliOperator::single(layout, layout.ebit_alice(j), p);
        op.set(layout.bob(j), p);
        op
    };
    g.extend((0..layout.c).map(|j| pair(Pauli::Z, j)));
    let h = (0..layout.c).map(|j| pair(Pauli::X, j)).collect();
    GeneratorSet { layout, g, h }
}

/// Standard-form generators for `graph`: `g_i = X_i Z_{N(i)}` with an extra
/// Bob `Z_j` when `i` is the Alice half of ebit `j`, and `h_j = Z_{n-c+j} X_{B,j}`.
pub fn encoded_generators(layout: QubitLayout, graph: &GraphSpec) -> Result<GeneratorSet> {
    check_graph(layout, graph)?;
    let a = layout.ancillas();
    let g = (0..layout.n)
        .map(|i| {
            let mut op = PauliOperator::single(layout, i, Pauli::X);
            for nb in graph.neighbors(i) {
                op.set(nb, Pauli::Z);
            }
            if i >= a {
                op.set(layout.bob(i - a), Pauli::Z);
            }
            op
        })
        .collect();
    let h = (0..layout.c)
        .map(|j| {
            let mut op = PauliOperator::single(layout, layout.ebit_alice(j), Pauli::Z);
            op.set(layout.bob(j), Pauli::X);
            op
        })
        .collect();
    Ok(GeneratorSet { layout, g, h })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    Cz(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `U p U†`
    Forward,
    /// `U† p U`
    Inverse,
}

/// The encoding Clifford `U`, kept as its gate sequence (first gate acts first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingMap {
    layout: QubitLayout,
    gates: Vec<Gate>,
}

impl EncodingMap {
    pub fn layout(&self) -> QubitLayout {
        self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn conjugate(&self, p: &PauliOperator, direction: Direction) -> Result<PauliOperator> {
        if p.layout() != self.layout {
            return Err(Error::LayoutMismatch {
                left: self.layout.to_string(),
                right: p.layout().to_string(),
            });
        }
        let mut out = p.clone();
        let apply = |out: &mut PauliOperator, g: &Gate| match *g {
            Gate::H(q) => out.conjugate_h(q),
            Gate::Cz(a, b) => out.conjugate_cz(a, b),
        };
        match direction {
            Direction::Forward => self.gates.iter().for_each(|g| apply(&mut out, g)),
            Direction::Inverse => self.gates.iter().rev().for_each(|g| apply(&mut out, g)),
        }
        Ok(out)
    }

    /// Images of `X_0, Z_0, X_1, Z_1, …` as `[x | z]` rows.
    pub fn symplectic_matrix(&self) -> BitMatrix {
        let total = self.layout.total();
        let mut rows = Vec::with_capacity(2 * total);
        for q in 0..total {
            for p in [Pauli::X, Pauli::Z] {
                let img = self
                    .conjugate(&PauliOperator::single(self.layout, q, p), Direction::Forward)
                    .expect("layout matches");
                rows.push(img.x().concat(img.z()));
            }
        }
        BitMatrix::from_rows(2 * total, rows).expect("row length")
    }
}

/// Hadamard on every Alice qubit, then controlled-Z on every graph edge.
pub fn build_encoding_map(layout: QubitLayout, graph: &GraphSpec) -> Result<EncodingMap> {
    check_graph(layout, graph)?;
    let mut gates: Vec<Gate> = (0..layout.n).map(Gate::H).collect();
    gates.extend(graph.edges().into_iter().map(|(a, b)| Gate::Cz(a, b)));
    Ok(EncodingMap { layout, gates })
}

pub fn conjugate(map: &EncodingMap, p: &PauliOperator, direction: Direction) -> Result<PauliOperator> {
    map.conjugate(p, direction)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(n: usize, c: usize) -> QubitLayout {
        QubitLayout::new(n, c).unwrap()
    }

    fn strings(ops: &[PauliOperator]) -> Vec<String> {
        ops.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn ring_rows() {
        let g3 = ring_graph(3).unwrap();
        assert_eq!(g3.adjacency().to_string(), "011\n101\n110\n");
        assert_eq!(ring_graph(6).unwrap().adjacency().row(0).to_string(), "010001");
        assert_eq!(ring_graph(7).unwrap().adjacency().row(6).to_string(), "1000010");
        assert!(ring_graph(2).is_err());
    }

    #[test]
    fn custom_graph_validation() {
        let asym = BitMatrix::from_strings(&["01", "00"]).unwrap();
        assert!(GraphSpec::custom(asym).is_err());
        let looped = BitMatrix::from_strings(&["11", "10"]).unwrap();
        assert!(GraphSpec::custom(looped).is_err());
        let path = BitMatrix::from_strings(&["010", "101", "010"]).unwrap();
        let g = GraphSpec::custom(path).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        let back = GraphSpec::from_file(&g.to_file()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn initial_generators_small() {
        let set = initial_generators(layout(3, 1));
        assert_eq!(strings(&set.g), ["ZII|I", "IZI|I", "IIZ|Z"]);
        assert_eq!(strings(&set.h), ["IIX|X"]);
        let set = initial_generators(layout(7, 2));
        assert_eq!(
            strings(&set.g),
            [
                "ZIIIIII|II", "IZIIIII|II", "IIZIIII|II", "IIIZIII|II", "IIIIZII|II",
                "IIIIIZI|ZI", "IIIIIIZ|IZ"
            ]
        );
        assert_eq!(strings(&set.h), ["IIIIIXI|XI", "IIIIIIX|IX"]);
        assert!(set.mutually_commute());
    }

    #[test]
    fn encoded_generators_match_listings() {
        let l = layout(7, 2);
        let set = encoded_generators(l, &ring_graph(7).unwrap()).unwrap();
        assert_eq!(
            strings(&set.g),
            [
                "XZIIIIZ|II", "ZXZIIII|II", "IZXZIII|II", "IIZXZII|II", "IIIZXZI|II",
                "IIIIZXZ|ZI", "ZIIIIZX|IZ"
            ]
        );
        assert_eq!(strings(&set.h), ["IIIIIZI|XI", "IIIIIIZ|IX"]);
        set.validate_standard().unwrap();

        let set = encoded_generators(layout(6, 1), &ring_graph(6).unwrap()).unwrap();
        assert_eq!(
            strings(&set.g),
            ["XZIIIZ|I", "ZXZIII|I", "IZXZII|I", "IIZXZI|I", "IIIZXZ|I", "ZIIIZX|Z"]
        );
        assert_eq!(strings(&set.h), ["IIIIIZ|X"]);

        let set = encoded_generators(layout(9, 1), &ring_graph(9).unwrap()).unwrap();
        assert_eq!(set.g[8].to_string(), "ZIIIIIIZX|Z");
        assert_eq!(set.h[0].to_string(), "IIIIIIIIZ|X");
    }

    #[test]
    fn encoded_generators_are_valid_for_all_small_rings() {
        for n in 3..=12 {
            for c in 0..=n / 2 {
                let set = encoded_generators(layout(n, c), &ring_graph(n).unwrap()).unwrap();
                set.validate_standard().unwrap_or_else(|e| panic!("n={n} c={c}: {e}"));
            }
        }
    }

    #[test]
    fn encoding_maps_initial_onto_encoded() {
        for n in 3..=12 {
            for c in 0..=n / 2 {
                let l = layout(n, c);
                let graph = ring_graph(n).unwrap();
                let map = build_encoding_map(l, &graph).unwrap();
                let init = initial_generators(l);
                let enc = encoded_generators(l, &graph).unwrap();
                for (a, b) in init.iter().zip(enc.iter()) {
                    let img = map.conjugate(a, Direction::Forward).unwrap();
                    assert!(img.eq_mod_phase(b), "{a} -> {img}, expected {b}");
                    // Both sides are +1 stabilizers, so the sign must match too.
                    assert_eq!(img.letter_phase(), 0, "{a} -> {}", img.signed_string());
                }
            }
        }
    }

    #[test]
    fn encoding_is_identity_on_bob_and_symplectic() {
        let l = layout(7, 2);
        let map = build_encoding_map(l, &ring_graph(7).unwrap()).unwrap();
        let s = map.symplectic_matrix();
        let total = l.total();
        let omega = |a: &BitVec, b: &BitVec| {
            a.slice(0, total).dot(&b.slice(total, 2 * total))
                ^ a.slice(total, 2 * total).dot(&b.slice(0, total))
        };
        for i in 0..2 * total {
            for j in 0..2 * total {
                let before = (i / 2 == j / 2) && (i != j);
                assert_eq!(omega(s.row(i), s.row(j)), before, "rows {i},{j}");
            }
        }
        for j in 0..l.c {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let op = PauliOperator::single(l, l.bob(j), p);
                assert_eq!(map.conjugate(&op, Direction::Forward).unwrap(), op);
            }
        }
    }

    #[test]
    fn inverse_conjugation_reproduces_listed_pairs() {
        let l = layout(7, 2);
        let map = build_encoding_map(l, &ring_graph(7).unwrap()).unwrap();
        let id = PauliOperator::identity(l);
        assert_eq!(map.conjugate(&id, Direction::Forward).unwrap(), id);
        let post: PauliOperator = "IZZIZZY|II".parse().unwrap();
        let pre = map.conjugate(&post, Direction::Inverse).unwrap();
        assert_eq!(pre.to_string(), "XXXIXIY|II");
        assert_eq!(map.conjugate(&pre, Direction::Forward).unwrap(), post);

        let l = layout(6, 1);
        let map = build_encoding_map(l, &ring_graph(6).unwrap()).unwrap();
        let post: PauliOperator = "ZIZZZX|I".parse().unwrap();
        assert_eq!(map.conjugate(&post, Direction::Inverse).unwrap().to_string(), "IIXXIZ|I");
        assert!(map.conjugate(&"XX|I".parse().unwrap(), Direction::Forward).is_err());
    }
}
