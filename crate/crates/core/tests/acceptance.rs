//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use primword::asymptotics::{check_eps2_bound, prime_product_polynomial, prime_product_table};
use primword::counting::{
    consistency_report, eps1_closed, eps1_divisor_sum, eps1_or_zero, eps2_closed,
    eps2_combinatorial, eps2_divisor_sum, COMBINATORIAL, DIVISOR_SUM,
};
use primword::numtheory::{big_pow, count_primitive};
use primword::pairs::{classify_pair, construct_e1, construct_e2, oracle_counts, DEFAULT_BUDGET};
use primword::properties::run_suite;
use primword::verify;
use primword::word::all_words;
use primword::Word;

const GRID: [(u64, u64); 8] = [
    (2, 1),
    (2, 2),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 1),
    (3, 2),
    (3, 3),
];

// Naive oracle, independent of the library: u is primitive iff no proper
// divisor length d has u == (u[..d])^(|u|/d).
fn naive_root_len(u: &[u32]) -> usize {
    (1..=u.len())
        .find(|&d| u.len().is_multiple_of(d) && u.chunks(d).all(|c| c == &u[..d]))
        .unwrap_or(u.len())
}

fn naive_primitive(u: &[u32]) -> bool {
    naive_root_len(u) == u.len()
}

fn words(n: u32, k: usize) -> Vec<Vec<u32>> {
    all_words(n, k).map(|w| w.letters().to_vec()).collect()
}

type PairSet = BTreeSet<(Vec<u32>, Vec<u32>)>;

fn naive_sets(n: u32, l: usize) -> (PairSet, PairSet) {
    let ps: Vec<_> = words(n, 2 * l)
        .into_iter()
        .filter(|p| naive_primitive(p))
        .collect();
    let qs: Vec<_> = words(n, l)
        .into_iter()
        .filter(|q| naive_primitive(q))
        .collect();
    let (mut e1, mut e2) = (BTreeSet::new(), BTreeSet::new());
    for p in &ps {
        for q in &qs {
            let pq: Vec<u32> = p.iter().chain(q).copied().collect();
            let r = naive_root_len(&pq);
            assert_ne!(r, l, "root of pq has length |q|");
            if r > l && r < pq.len() {
                e1.insert((p.clone(), q.clone()));
            } else if r < l {
                e2.insert((p.clone(), q.clone()));
            }
        }
    }
    (e1, e2)
}

fn naive_pi(n: u32, k: usize) -> BigUint {
    BigUint::from(words(n, k).iter().filter(|w| naive_primitive(w)).count())
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn criterion_1() {
    for (n, l) in GRID {
        let (e1, e2) = naive_sets(n as u32, l as usize);
        let naive = (big(e1.len() as u64), big(e2.len() as u64));
        assert_eq!(
            naive,
            (eps1_or_zero(n, l).unwrap(), eps2_divisor_sum(n, l).unwrap()),
            "n={n} l={l}"
        );
        let (c1, c2) = oracle_counts(n, l as usize, DEFAULT_BUDGET).unwrap();
        assert_eq!(naive, (big(c1), big(c2)), "library oracle n={n} l={l}");
    }
    let total = |n, l| eps1_or_zero(n, l).unwrap() + eps2_divisor_sum(n, l).unwrap();
    assert_eq!(total(2, 1), big(0));
    assert_eq!(total(2, 2), big(4));
    assert_eq!(total(2, 3), big(0));
    assert_eq!(
        (
            eps1_divisor_sum(2, 4).unwrap(),
            eps2_divisor_sum(2, 4).unwrap()
        ),
        (big(42), big(6))
    );
    assert_eq!(eps2_divisor_sum(2, 5).unwrap(), big(6));
}

fn as_set(witnesses: &[primword::PairWitness]) -> PairSet {
    let set: PairSet = witnesses
        .iter()
        .map(|w| (w.p.letters().to_vec(), w.q.letters().to_vec()))
        .collect();
    assert_eq!(set.len(), witnesses.len(), "duplicate pairs");
    set
}

fn criterion_2() {
    for (n, l) in GRID {
        let (e1, e2) = naive_sets(n as u32, l as usize);
        let built1 = if l % 2 == 0 {
            construct_e1(n, l as usize, DEFAULT_BUDGET).unwrap()
        } else {
            Vec::new()
        };
        let built2 = construct_e2(n, l as usize, DEFAULT_BUDGET).unwrap();
        assert_eq!(as_set(&built1), e1, "E1 n={n} l={l}");
        assert_eq!(as_set(&built2), e2, "E2 n={n} l={l}");
        for w in built1.iter().chain(&built2) {
            let c = classify_pair(&w.p, &w.q).unwrap();
            assert_eq!(c.case, w.case, "({}, {})", w.p, w.q);
            assert_eq!(w.expand(), (w.p.clone(), w.q.clone()));
        }
        for (p, q) in e1.iter().chain(&e2) {
            let p = Word::new(p.clone(), n as u32).unwrap();
            let q = Word::new(q.clone(), n as u32).unwrap();
            classify_pair(&p, &q).unwrap();
        }
    }
}

fn criterion_3() {
    for n in 2..=3 {
        for l in 1..=24u64 {
            let mut l1 = l;
            while l1 % 3 == 0 {
                l1 /= 3;
            }
            if l1 >= 2 {
                let reference = eps2_divisor_sum(n, l).unwrap();
                assert_eq!(eps2_closed(n, l).unwrap(), reference, "closed n={n} l={l}");
                assert_eq!(
                    eps2_combinatorial(n, l).unwrap(),
                    reference,
                    "combinatorial n={n} l={l}"
                );
            }
            if l % 2 == 0 {
                assert_eq!(
                    eps1_closed(n, l).unwrap(),
                    eps1_divisor_sum(n, l).unwrap(),
                    "eps1 n={n} l={l}"
                );
            }
        }
    }
}

fn criterion_4() -> String {
    let report = consistency_report(2, 12, None).unwrap();
    let verdict = report.verdict("eps1", COMBINATORIAL, DIVISOR_SUM);
    assert!(verdict.is_some(), "no verdict recorded");
    // eps1(2,12) = 2^6 pi(12) - pi(9) - pi(36/4) ... computed from its definition
    // with the naive pi for the small lengths and the library pi for 36/d.
    let reference = &report.eps1[DIVISOR_SUM];
    let pi12 = naive_pi(2, 12);
    let pi9 = naive_pi(2, 9);
    assert_eq!(*reference, big(64) * &pi12 - &pi9);
    assert_eq!(*reference, big(256776));
    let combinatorial = &report.eps1[COMBINATORIAL];
    format!(
        "eps1(2,12) divisor_sum={reference} combinatorial={combinatorial} agree={}",
        verdict.unwrap()
    )
}

fn criterion_5() {
    for (n, max) in [(2u32, 12usize), (3, 8)] {
        for k in 1..=max {
            assert_eq!(
                count_primitive(n as u64, k as u64).unwrap(),
                naive_pi(n, k),
                "n={n} k={k}"
            );
        }
    }
    for n in 2..=5u64 {
        for l in 1..=30u64 {
            let sum: BigUint = (1..=l)
                .filter(|d| l % d == 0)
                .map(|d| count_primitive(n, d).unwrap())
                .sum();
            assert_eq!(sum, big_pow(n, l), "n={n} l={l}");
        }
    }
}

fn criterion_6() {
    for n in 2..=100u64 {
        let cube = big(n).pow(3);
        let e = eps2_divisor_sum(n, 4).unwrap();
        assert_eq!(e, &cube - big(n));
        // |e/n^3 - 1| = n^-2  <=>  (n^3 - e) * n^2 = n^3
        assert_eq!((&cube - &e) * big(n * n), cube);
    }
    let ls: Vec<u64> = (1..=40).collect();
    for n in [2, 3, 5] {
        let table = check_eps2_bound(n, &ls).unwrap();
        for (l, row) in ls.iter().zip(&table.rows) {
            let e = eps2_divisor_sum(n, *l).unwrap();
            assert!(e.pow(4) <= big(16) * big_pow(n, 3 * l), "n={n} l={l}");
            assert_eq!(row.verdict, Some(true));
        }
    }
    for n in [2, 3] {
        for (k, p, next) in [(3, 5, 7), (4, 7, 11), (5, 11, 13)] {
            let e = eps2_divisor_sum(n, p * next).unwrap();
            assert_eq!(e, prime_product_polynomial(n, p, next), "n={n} k={k}");
        }
        let table = prime_product_table(n, &[3, 4, 5]).unwrap();
        assert!(!table.flagged);
    }
}

fn criterion_7() -> String {
    let checks = run_suite();
    for c in &checks {
        assert!(c.passed(), "{c}");
        assert!(c.cases > 0, "{} is vacuous", c.name);
    }
    format!("{} suites", checks.len())
}

fn run(label: &str, f: impl FnOnce() -> String) -> bool {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(f));
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("PASS {label} ({secs:.2}s) {detail}");
            true
        }
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            println!("FAIL {label} ({secs:.2}s) {msg}");
            false
        }
    }
}

fn main() -> ExitCode {
    let ok = String::new;
    let results = [
        run("criterion 1 oracle equivalence", || {
            criterion_1();
            ok()
        }),
        run("criterion 2 bijection fidelity", || {
            criterion_2();
            ok()
        }),
        run("criterion 3 formula cross-agreement", || {
            criterion_3();
            ok()
        }),
        run("criterion 4 subset-sum eps1 adjudication", criterion_4),
        run("criterion 5 pi_n correctness", || {
            criterion_5();
            ok()
        }),
        run("criterion 6 finite-scale asymptotics", || {
            criterion_6();
            ok()
        }),
        run("criterion 7 lemma property suites", criterion_7),
        run("verify grid", || {
            let rows = verify::run_all(2024);
            for r in &rows {
                assert!(r.passed, "{r}");
            }
            format!("{} rows", rows.len())
        }),
    ];
    if results.iter().all(|&r| r) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
