use eacws::equivalence::{reduce_check_matrix, verify_reduction, CheckMatrix};
use eacws::{BitMatrix, BitVec, Error};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random `[[n,k]]` stabilizer: Z-type rows on the first `n-k` qubits,
/// scrambled by random Clifford column moves and row additions.
fn random_stabilizer(n: usize, k: usize, rng: &mut impl Rng) -> CheckMatrix {
    let r = n - k;
    let mut rows: Vec<BitVec> = (0..r).map(|i| BitVec::unit(2 * n, n + i)).collect();
    for _ in 0..4 * n {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let gate = rng.gen_range(0..3);
        for row in rows.iter_mut() {
            match gate {
                // Hadamard
                0 => {
                    let (x, z) = (row.get(a), row.get(n + a));
                    row.set(a, z);
                    row.set(n + a, x);
                }
                // Phase
                1 => {
                    let v = row.get(n + a) ^ row.get(a);
                    row.set(n + a, v);
                }
                // CNOT a -> b
                _ if a != b => {
                    let xb = row.get(b) ^ row.get(a);
                    let za = row.get(n + a) ^ row.get(n + b);
                    row.set(b, xb);
                    row.set(n + a, za);
                }
                _ => {}
            }
        }
    }
    for _ in 0..r * r {
        let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
        if i != j {
            let src = rows[j].clone();
            rows[i].xor_assign(&src);
        }
    }
    CheckMatrix::new(n, k, None, BitMatrix::from_rows(2 * n, rows).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reduction_preserves_code_and_pairs(n in 2usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(0..n);
        let cm = random_stabilizer(n, k, &mut rng);
        let c = rng.gen_range(0..=(n - k) / 2);
        let mut cols: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            cols.swap(i, rng.gen_range(0..=i));
        }
        cols.truncate(c);
        match reduce_check_matrix(&cm, &cols) {
            Ok(red) => {
                prop_assert_eq!(red.c, c);
                prop_assert!(verify_reduction(&red, &cm));
                let again = reduce_check_matrix(&cm, &cols).unwrap();
                prop_assert_eq!(again, red);
            }
            Err(Error::EbitColumns { requested, achievable }) => {
                prop_assert_eq!(requested, c);
                prop_assert!(achievable < c);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn corrupted_reduction_is_rejected(n in 3usize..=7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cm = random_stabilizer(n, 1, &mut rng);
        let cols = vec![n - 1];
        if let Ok(red) = reduce_check_matrix(&cm, &cols) {
            let mut bad = red.clone();
            let r = rng.gen_range(0..n - 1);
            let col = rng.gen_range(0..2 * n);
            // Flipping a bit that is itself a stabilizer keeps the same code.
            let mut with_unit = cm.matrix().clone();
            with_unit.push_row(BitVec::unit(2 * n, col));
            if with_unit.rank() == cm.matrix().rank() {
                return Ok(());
            }
            let v = bad.reduced.matrix().get(r, col);
            let mut m = bad.reduced.matrix().clone();
            m.set(r, col, !v);
            bad.reduced = match CheckMatrix::new(n, 1, None, m) {
                Ok(x) => x,
                // A flip that breaks commutation or rank cannot even form a check matrix.
                Err(_) => return Ok(()),
            };
            prop_assert!(!verify_reduction(&bad, &cm));
        }
    }
}
