//! Turning an `[[n,k,d]]` stabilizer code into an `[[n-c,k,d;c]]`
//! entanglement-assisted one by row reduction.
//!
//! The chosen ebit columns are cleared so that each hosts one row with `X`
//! and one with `Z` there and nothing else. Dropping those columns leaves `c`
//! anticommuting pairs plus `n-k-2c` commuting generators on Alice's side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::pauli::{PauliOperator, QubitLayout};

/// `[H_X | H_Z]` with one row per stabilizer generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckMatrix {
    n: usize,
    k: usize,
    d: Option<usize>,
    /// Rows of length `2n`, X half first.
    matrix: BitMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckMatrixFile {
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// `x…x|z…z` rows.
    pub rows: Vec<String>,
}

fn symplectic(a: &BitVec, b: &BitVec, n: usize) -> bool {
    let (ax, az) = (a.slice(0, n), a.slice(n, 2 * n));
    let (bx, bz) = (b.slice(0, n), b.slice(n, 2 * n));
    ax.dot(&bz) ^ az.dot(&bx)
}

impl CheckMatrix {
    /// Checks that the rows commute and are independent, and that there are `n - k` of them.
    pub fn new(n: usize, k: usize, d: Option<usize>, matrix: BitMatrix) -> Result<Self> {
        if matrix.ncols() != 2 * n {
            return Err(Error::InvalidCheckMatrix(format!(
                "{} columns for n={n}, expected {}",
                matrix.ncols(),
                2 * n
            )));
        }
        if k > n || matrix.nrows() != n - k {
            return Err(Error::InvalidCheckMatrix(format!(
                "{} rows for n={n}, k={k}",
                matrix.nrows()
            )));
        }
        let rows = matrix.rows();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if symplectic(&rows[i], &rows[j], n) {
                    return Err(Error::InvalidCheckMatrix(format!(
                        "rows {i} and {j} anticommute"
                    )));
                }
            }
        }
        if matrix.rank() != matrix.nrows() {
            return Err(Error::InvalidCheckMatrix("rows are not independent".into()));
        }
        Ok(CheckMatrix { n, k, d, matrix })
    }

    /// Rows written as `x…x|z…z` or `x…x z…z`.
    pub fn from_rows(k: usize, d: Option<usize>, rows: &[impl AsRef<str>]) -> Result<Self> {
        let matrix = BitMatrix::from_strings(rows)?;
        if matrix.ncols() % 2 != 0 {
            return Err(Error::InvalidCheckMatrix(format!(
                "odd row length {}",
                matrix.ncols()
            )));
        }
        Self::new(matrix.ncols() / 2, k, d, matrix)
    }

    /// Generators as Pauli letters, e.g. `XZZXI`.
    pub fn from_paulis(k: usize, d: Option<usize>, gens: &[impl AsRef<str>]) -> Result<Self> {
        let mut rows = Vec::with_capacity(gens.len());
        let mut n = None;
        for g in gens {
            let g = g.as_ref().trim();
            let layout = QubitLayout::new(g.chars().count(), 0)?;
            let p = PauliOperator::parse_in(&format!("{g}|"), layout)?;
            if *n.get_or_insert(p.num_qubits()) != p.num_qubits() {
                return Err(Error::InvalidCheckMatrix("generators differ in length".into()));
            }
            rows.push(p.x().concat(p.z()));
        }
        let n = n.ok_or_else(|| Error::InvalidCheckMatrix("no generators".into()))?;
        Self::new(n, k, d, BitMatrix::from_rows(2 * n, rows)?)
    }

    pub fn from_file(file: &CheckMatrixFile) -> Result<Self> {
        let cm = Self::from_rows(file.k, file.d, &file.rows)?;
        if cm.n != file.n {
            return Err(Error::InvalidCheckMatrix(format!(
                "rows describe {} qubits, header says {}",
                cm.n, file.n
            )));
        }
        Ok(cm)
    }

    pub fn to_file(&self) -> CheckMatrixFile {
        CheckMatrixFile {
            n: self.n,
            k: self.k,
            d: self.d,
            rows: self.row_strings(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> Option<usize> {
        self.d
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn hx(&self) -> BitMatrix {
        self.half(0)
    }

    pub fn hz(&self) -> BitMatrix {
        self.half(self.n)
    }

    fn half(&self, start: usize) -> BitMatrix {
        let rows = self
            .matrix
            .rows()
            .iter()
            .map(|r| r.slice(start, start + self.n))
            .collect();
        BitMatrix::from_rows(self.n, rows).expect("row length")
    }

    pub fn row_strings(&self) -> Vec<String> {
        self.matrix.rows().iter().map(|r| r.format_split(self.n)).collect()
    }

    /// Generators as Pauli letters without a Bob part.
    pub fn pauli_strings(&self) -> Vec<String> {
        self.matrix
            .rows()
            .iter()
            .map(|r| pauli_letters(&r.slice(0, self.n), &r.slice(self.n, 2 * self.n)))
            .collect()
    }

    /// Same generators with qubits reordered: new qubit `q` is old `order[q]`.
    fn permute_qubits(&self, order: &[usize]) -> BitMatrix {
        let cols: Vec<usize> = order
            .iter()
            .copied()
            .chain(order.iter().map(|&q| q + self.n))
            .collect();
        self.matrix.permute_columns(&cols)
    }
}

fn pauli_letters(x: &BitVec, z: &BitVec) -> String {
    x.iter()
        .zip(z.iter())
        .map(|(x, z)| match (x, z) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EAReduction {
    /// Reduced rows over the reordered qubits (non-ebit columns first, then
    /// the ebit columns in the requested order). Rows are the `c` rows with
    /// `X` on an ebit column, then the `c` rows with `Z`, then the rest.
    pub reduced: CheckMatrix,
    /// Reordered qubit `q` is original qubit `column_order[q]`.
    pub column_order: Vec<usize>,
    pub c: usize,
}

impl EAReduction {
    /// Each row as `alice|bob` Pauli letters, Bob being the ebit columns.
    pub fn generator_strings(&self) -> Vec<String> {
        let alice = self.reduced.n - self.c;
        self.reduced
            .pauli_strings()
            .into_iter()
            .map(|s| format!("{}|{}", &s[..alice], &s[alice..]))
            .collect()
    }

    /// The Alice-side parts: `g'_1..g'_c` (paired with Bob `Z_j`), then the
    /// unpaired `g'`, then `h'_1..h'_c` (paired with Bob `X_j`).
    pub fn simplified_generators(&self) -> Vec<String> {
        let alice = self.reduced.n - self.c;
        let s = self.reduced.pauli_strings();
        let c = self.c;
        s[c..2 * c]
            .iter()
            .chain(&s[2 * c..])
            .chain(&s[..c])
            .map(|g| g[..alice].to_string())
            .collect()
    }

    pub fn layout(&self) -> Result<QubitLayout> {
        QubitLayout::new(self.reduced.n - self.c, self.c)
    }
}

/// Reduces `cm` so that each of `ebit_columns` carries one `X` row and one
/// `Z` row.
pub fn reduce_check_matrix(cm: &CheckMatrix, ebit_columns: &[usize]) -> Result<EAReduction> {
    let n = cm.n;
    let c = ebit_columns.len();
    let mut seen = vec![false; n];
    for &q in ebit_columns {
        if q >= n || std::mem::replace(&mut seen[q], true) {
            return Err(Error::InvalidCheckMatrix(format!(
                "bad or repeated ebit column {q}"
            )));
        }
    }
    let pivots = |cols: &[usize]| -> Vec<usize> {
        cols.iter().copied().chain(cols.iter().map(|&q| q + n)).collect()
    };
    let elim = cm.matrix.eliminate(&pivots(ebit_columns));
    if elim.placed.len() < 2 * c {
        let achievable = (0..c)
            .rev()
            .find(|&m| cm.matrix.eliminate(&pivots(&ebit_columns[..m])).placed.len() == 2 * m)
            .unwrap_or(0);
        return Err(Error::EbitColumns {
            requested: c,
            achievable,
        });
    }
    let column_order: Vec<usize> = (0..n)
        .filter(|q| !seen[*q])
        .chain(ebit_columns.iter().copied())
        .collect();
    let reduced = CheckMatrix {
        n,
        k: cm.k,
        d: cm.d,
        matrix: elim.matrix,
    };
    let matrix = reduced.permute_qubits(&column_order);
    Ok(EAReduction {
        reduced: CheckMatrix { matrix, ..reduced },
        column_order,
        c,
    })
}

/// `c` rightmost columns.
pub fn default_ebit_columns(n: usize, c: usize) -> Vec<usize> {
    (n.saturating_sub(c)..n).collect()
}

/// True iff the reduction spans the same stabilizer as `original` and has
/// the block pattern: row `j` is `X` on ebit `j`, row `c+j` is `Z` on ebit
/// `j`, other rows are identity on every ebit, and apart from those `c`
/// pairs all Alice-side parts commute.
pub fn verify_reduction(red: &EAReduction, original: &CheckMatrix) -> bool {
    let n = original.n;
    let c = red.c;
    if red.reduced.n != n || red.reduced.matrix.nrows() != original.matrix.nrows() || c > n {
        return false;
    }
    let mut order = red.column_order.clone();
    order.sort_unstable();
    if order != (0..n).collect::<Vec<_>>() {
        return false;
    }
    let rows = red.reduced.matrix.rows();
    if rows.len() < 2 * c {
        return false;
    }
    let permuted = original.permute_qubits(&red.column_order);
    if !permuted.same_row_space(&red.reduced.matrix) {
        return false;
    }
    let alice = n - c;
    for (r, row) in rows.iter().enumerate() {
        for j in 0..c {
            let (x, z) = (row.get(alice + j), row.get(n + alice + j));
            let want = if r == j {
                (true, false)
            } else if r == c + j {
                (false, true)
            } else {
                (false, false)
            };
            if (x, z) != want {
                return false;
            }
        }
    }
    // Full rows commute; Alice parts anticommute exactly within each pair.
    let alice_part = |row: &BitVec| row.slice(0, alice).concat(&row.slice(n, n + alice));
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if symplectic(&rows[i], &rows[j], n) {
                return false;
            }
            let paired = j == i + c && i < c;
            if symplectic(&alice_part(&rows[i]), &alice_part(&rows[j]), alice) != paired {
                return false;
            }
        }
    }
    true
}
