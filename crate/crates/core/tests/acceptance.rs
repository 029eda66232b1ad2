//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use eacws::effective::{correctable_error_set, reduce_to_effective};
use eacws::equivalence::{reduce_check_matrix, verify_reduction, CheckMatrix};
use eacws::kl::{
    apply_word_operators, base_state, certify_distance, codeword_states, encode_state,
    gram_deviation, kl_check, KL_TOLERANCE,
};
use eacws::pauli::{PauliOperator, QubitLayout};
use eacws::record::{fixture_check_matrix, fixture_record, ConflictModel, Instance, FIXTURE_RECORDS};
use eacws::search::{max_clique, verify_code, Budget, ClassicalCode, SearchMode};
use eacws::word_ops::word_operator_table;
use eacws::BitVec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{clique_values, naive_max_clique, random_conflicts, random_pauli, ring_instance, ring_shapes};

const SHAPES: [(usize, usize, usize); 3] = [(7, 2, 9), (9, 1, 20), (6, 1, 4)];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture_instance(name: &str) -> (eacws::record::CodeRecord, Instance, ClassicalCode) {
    let rec = fixture_record(name).unwrap();
    let inst = Instance::for_record(&rec).unwrap();
    let code = rec.code().unwrap();
    (rec, inst, code)
}

fn effective_error_counts() -> Outcome {
    let expected = [(7, 2, 25), (9, 1, 29), (6, 1, 20)];
    let mut notes = Vec::new();
    for (n, c, count) in expected {
        let start = Instant::now();
        let inst = ring_instance(n, c, ConflictModel::Effective);
        let distinct = inst.catalog.nonidentity_distinct();
        let pairs = inst.catalog.equivalence_pairs.len();
        let t = start.elapsed();
        notes.push(format!("({n},{c}): {distinct} errors, {pairs} pairs, {:.1} ms", t.as_secs_f64() * 1e3));
        if distinct != count || pairs != c || t >= Duration::from_secs(1) {
            return Err(notes.join("; "));
        }
    }
    Ok(notes.join("; "))
}

fn clique_search() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (n, c, k) in SHAPES {
        let inst = ring_instance(n, c, ConflictModel::Effective);
        let budget = Budget {
            max_nodes: None,
            time_limit: Some(Duration::from_secs(60)),
        };
        let out = max_clique(&inst.conflicts, budget, SearchMode::Deterministic).unwrap();
        let found = out.code.k();
        notes.push(format!(
            "({n},{c}): K={found} exact={} {:.2} s",
            out.exact,
            out.elapsed.as_secs_f64()
        ));
        ok &= out.exact && found >= k && out.elapsed < Duration::from_secs(60);
        ok &= verify_code(&out.code, &inst.conflicts).unwrap().valid;
    }
    for name in FIXTURE_RECORDS {
        let (_, inst, code) = fixture_instance(name);
        let valid = verify_code(&code, &inst.conflicts).unwrap().valid;
        notes.push(format!("{name} clique={valid}"));
        ok &= valid;
    }
    if ok {
        Ok(notes.join("; "))
    } else {
        Err(notes.join("; "))
    }
}

fn word_operator_listings() -> Outcome {
    let mut total = 0;
    for name in FIXTURE_RECORDS {
        let (rec, inst, code) = fixture_instance(name);
        let table = word_operator_table(&code, &inst.gens, &inst.map).unwrap();
        if table.len() != rec.word_operators.len() {
            return Err(format!("{name}: {} operators for {} listings", table.len(), rec.word_operators.len()));
        }
        for (i, (pair, listed)) in table.iter().zip(&rec.word_operators).enumerate() {
            let parse = |s: &str| PauliOperator::parse_in(s, inst.layout).unwrap();
            if !pair.pre.eq_mod_phase(&parse(&listed.pre)) {
                return Err(format!("{name} codeword {i}: pre {} vs listed {}", pair.pre, listed.pre));
            }
            if !pair.post.eq_mod_phase(&parse(&listed.post)) {
                return Err(format!("{name} codeword {i}: post {} vs listed {}", pair.post, listed.post));
            }
            total += 1;
        }
    }
    Ok(format!("{total} codewords, pre and post match"))
}

fn kl_certification() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for name in FIXTURE_RECORDS {
        let start = Instant::now();
        let (_, inst, code) = fixture_instance(name);
        let table = word_operator_table(&code, &inst.gens, &inst.map).unwrap();
        let encoded = encode_state(&base_state(inst.layout).unwrap(), &inst.map).unwrap();
        let states = codeword_states(&table, &encoded).unwrap();
        let gram = gram_deviation(&states);
        let errors = correctable_error_set(inst.layout, 3);
        assert_eq!(errors.len(), 1 + 3 * inst.layout.total());
        let report = kl_check(&states, &errors).unwrap();
        let distance = certify_distance(&states, 3).unwrap();
        let t = start.elapsed();
        let pass = report.pass
            && gram <= KL_TOLERANCE
            && distance.distance == Some(3)
            && t < Duration::from_secs(120);
        ok &= pass;
        let kl = match &report.first_violation {
            None => "KL pass".to_string(),
            Some(v) => format!(
                "KL fails at <w{}|{}^dag {}|w{}> = {:+.3} (expected {:+.3})",
                v.first, v.error_a, v.error_b, v.second, v.value[0], v.expected[0]
            ),
        };
        notes.push(format!(
            "{name}: gram dev {gram:.1e}, {kl}, distance {:?} witness {:?}, {:.2} s",
            distance.distance,
            distance.witness.unwrap_or_default(),
            t.as_secs_f64()
        ));
    }
    if ok {
        Ok(notes.join("; "))
    } else {
        Err(notes.join("; "))
    }
}

fn mutation_sensitivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    for name in FIXTURE_RECORDS {
        let (_, inst, code) = fixture_instance(name);
        let layout = inst.layout;
        let mut diffs: Vec<BitVec> = inst.conflicts.forbidden().iter().cloned().collect();
        diffs.push(BitVec::zeros(layout.total()));
        let encoded = encode_state(&base_state(layout).unwrap(), &inst.map).unwrap();
        let errors = correctable_error_set(layout, 3);
        for trial in 0..10 {
            let k = rng.gen_range(0..code.k());
            let j = (k + rng.gen_range(1..code.k())) % code.k();
            let f = &diffs[rng.gen_range(0..diffs.len())];
            let mut bad = code.clone();
            bad.codewords[k] = code.codewords[j].xor(f);
            let classical = verify_code(&bad, &inst.conflicts).unwrap();
            let table = word_operator_table(&bad, &inst.gens, &inst.map).unwrap();
            let states = apply_word_operators(&table, &encoded).unwrap();
            let report = kl_check(&states, &errors).unwrap();
            let c_pair = classical.first_violation.as_ref().map(|v| (v.first, v.second));
            let q_pair = report.first_offdiagonal.as_ref().map(|v| (v.first, v.second));
            if classical.valid || report.pass || c_pair.is_none() || c_pair != q_pair {
                return Err(format!(
                    "{name} trial {trial}: word {k} <- word {j} ^ {f}: classical {c_pair:?}, KL {q_pair:?}"
                ));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} corruptions caught, same first pair in both checks"))
}

fn check_matrix_reduction() -> Outcome {
    let cm = fixture_check_matrix("bowen-5-1-3").unwrap();
    let red = reduce_check_matrix(&cm, &[3, 4]).unwrap();
    let published = CheckMatrix::from_rows(
        1,
        Some(3),
        &["10010|01100", "00101|11000", "01100|11110", "11000|11101"],
    )
    .unwrap();
    let same_space = published.matrix().same_row_space(red.reduced.matrix());
    let expected = ["XZZ|XI", "ZZX|IX", "ZYY|ZI", "YYZ|IZ"];
    let layout = QubitLayout::new(3, 2).unwrap();
    let gens = red.generator_strings();
    let gens_match = gens.len() == expected.len()
        && gens.iter().zip(expected).all(|(g, e)| {
            PauliOperator::parse_in(g, layout)
                .unwrap()
                .eq_mod_phase(&PauliOperator::parse_in(e, layout).unwrap())
        });
    let verified = verify_reduction(&red, &cm);
    let note = format!(
        "c={}, row space equal={same_space}, generators {}, verify={verified}",
        red.c,
        gens.join(", ")
    );
    if red.c == 2 && same_space && gens_match && verified {
        Ok(note)
    } else {
        Err(note)
    }
}

fn runner(seed: u8) -> TestRunner {
    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, proptest::test_runner::TestRng::from_seed(
        proptest::test_runner::RngAlgorithm::ChaCha,
        &[seed; 32],
    ))
}

fn shape_strategy() -> impl Strategy<Value = (usize, usize, u64)> {
    (3usize..=9, 0usize..=3, any::<u64>()).prop_filter("c <= n", |(n, c, _)| c <= n)
}

fn property_suites() -> Outcome {
    let mut notes = Vec::new();

    // Effective errors: homomorphism and invariance under word stabilizers.
    let instances: Vec<Instance> = (3..=9)
        .flat_map(|n| (0..=3.min(n)).map(move |c| (n, c)))
        .map(|(n, c)| ring_instance(n, c, ConflictModel::Effective))
        .collect();
    let find = |n: usize, c: usize| {
        instances
            .iter()
            .find(|i| i.layout.n == n && i.layout.c == c)
            .unwrap()
    };
    runner(1)
        .run(&shape_strategy(), |(n, c, seed)| {
            let inst = find(n, c);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_pauli(inst.layout, &mut rng);
            let q = random_pauli(inst.layout, &mut rng);
            let eff = |e: &PauliOperator| reduce_to_effective(e, &inst.gens).unwrap();
            let pq = p.mul(&q).unwrap();
            prop_assert_eq!(
                eff(&pq).pattern().clone(),
                eff(&p).pattern().xor(eff(&q).pattern())
            );
            let mut s = PauliOperator::identity(inst.layout);
            for g in inst.gens.iter() {
                if rng.gen_bool(0.5) {
                    s = s.mul(g).unwrap();
                }
            }
            prop_assert_eq!(eff(&p.mul(&s).unwrap()), eff(&p));
            Ok(())
        })
        .map_err(|e| format!("effective-error properties: {e}"))?;
    notes.push("homomorphism/invariance 1000 ok".to_string());

    // Same clique for every worker count.
    runner(2)
        .run(&(4usize..=8, 0.2f64..0.7, 2usize..=4, any::<u64>()), |(len, density, jobs, seed)| {
            let cs = random_conflicts(len, density, &mut ChaCha8Rng::seed_from_u64(seed));
            let one = max_clique(&cs, Budget::unlimited(), SearchMode::Deterministic).unwrap();
            let many = max_clique(&cs, Budget::unlimited(), SearchMode::Parallel { jobs }).unwrap();
            prop_assert_eq!(one.code.codewords, many.code.codewords);
            Ok(())
        })
        .map_err(|e| format!("determinism: {e}"))?;
    notes.push("worker-count determinism 1000 ok".to_string());

    // Exact search against naive backtracking: every small ring instance in
    // both conflict models, then random conflict sets.
    let mut rings = 0;
    for (n, c) in ring_shapes(9) {
        for model in [ConflictModel::Effective, ConflictModel::DegenerateSafe] {
            let inst = ring_instance(n, c, model);
            let fast = max_clique(&inst.conflicts, Budget::unlimited(), SearchMode::Deterministic).unwrap();
            let slow = naive_max_clique(&inst.conflicts);
            if clique_values(&fast.code) != slow {
                return Err(format!("ring ({n},{c}) {model:?}: K {} vs naive {}", fast.code.k(), slow.len()));
            }
            let par = max_clique(&inst.conflicts, Budget::unlimited(), SearchMode::Parallel { jobs: 3 }).unwrap();
            if par.code.codewords != fast.code.codewords {
                return Err(format!("ring ({n},{c}) {model:?}: parallel search differs"));
            }
            rings += 1;
        }
    }
    runner(3)
        .run(&(3usize..=6, 0.3f64..0.8, any::<u64>()), |(len, density, seed)| {
            let cs = random_conflicts(len, density, &mut ChaCha8Rng::seed_from_u64(seed));
            let fast = max_clique(&cs, Budget::unlimited(), SearchMode::Deterministic).unwrap();
            if clique_values(&fast.code) != naive_max_clique(&cs) {
                return Err(TestCaseError::fail("clique differs from naive search"));
            }
            Ok(())
        })
        .map_err(|e| format!("naive oracle: {e}"))?;
    notes.push(format!("naive oracle {rings} ring instances + 1000 random ok"));
    Ok(notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("C1 effective-error counts", effective_error_counts),
        ("C2 clique search", clique_search),
        ("C3 word-operator listings", word_operator_listings),
        ("C4 Knill-Laflamme certification", kl_certification),
        ("C5 mutation sensitivity", mutation_sensitivity),
        ("C6 check-matrix reduction", check_matrix_reduction),
        ("C7 property suites", property_suites),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("PASS  {name} [{secs:.2} s]: {note}"),
            Err(note) => {
                println!("FAIL  {name} [{secs:.2} s]: {note}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        println!("{} of 7 criteria failed: {}", failed.len(), failed.join(", "));
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
