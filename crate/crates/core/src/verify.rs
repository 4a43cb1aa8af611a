//! The full consistency grid: every acceptance check plus a seeded random
//! sample of constructed pairs pushed through classification.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{
    check_eps2_bound, eps2_l4_deviation_is_inverse_square, prime_product_table,
};
use crate::counting::{
    consistency_report, eps1_closed, eps1_divisor_sum, eps1_or_zero, eps2_closed,
    eps2_combinatorial, eps2_divisor_sum, COMBINATORIAL, DIVISOR_SUM,
};
use crate::error::Result;
use crate::numtheory::{big_pow, count_primitive, divisors, lambda_sets};
use crate::pairs::{
    check_e1_exclusions, classify_pair, construct_e1, construct_e2, oracle_enumerate_e, Case,
    PairWitness, DEFAULT_BUDGET,
};
use crate::properties::run_suite;
use crate::word::{all_words, is_primitive_slice, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub millis: u128,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {} {}: {}", self.id, self.name, self.detail)
    }
}

/// `(n, l)` grid on which the oracle is run.
pub const ORACLE_GRID: [(u64, u64); 8] = [
    (2, 1),
    (2, 2),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 1),
    (3, 2),
    (3, 3),
];

fn timed(
    id: u8,
    name: &'static str,
    f: impl FnOnce() -> Result<std::result::Result<String, String>>,
) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(Ok(detail)) => (true, detail),
        Ok(Err(detail)) => (false, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name,
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

pub fn oracle_equivalence() -> CriterionResult {
    timed(1, "oracle_equivalence", || {
        let mut checked = Vec::new();
        for (n, l) in ORACLE_GRID {
            let sets = oracle_enumerate_e(n, l as usize, DEFAULT_BUDGET)?;
            let got = (BigUint::from(sets.e1.len()), BigUint::from(sets.e2.len()));
            let want = (eps1_or_zero(n, l)?, eps2_divisor_sum(n, l)?);
            if got != want {
                return Ok(Err(format!(
                    "(n={n}, l={l}): oracle {got:?}, formula {want:?}"
                )));
            }
            checked.push(format!("({n},{l})={}+{}", got.0, got.1));
        }
        Ok(Ok(checked.join(" ")))
    })
}

fn pair_set(witnesses: &[PairWitness]) -> std::result::Result<BTreeSet<(Word, Word)>, String> {
    let mut set = BTreeSet::new();
    for w in witnesses {
        if !set.insert(w.pair()) {
            return Err(format!("duplicate pair ({}, {})", w.p, w.q));
        }
    }
    Ok(set)
}

fn round_trips(witnesses: &[PairWitness]) -> std::result::Result<(), String> {
    for w in witnesses {
        match classify_pair(&w.p, &w.q) {
            Ok(c) if c.case == w.case && c == *w => {}
            Ok(c) => {
                return Err(format!(
                    "({}, {}) built as {} classified as {}",
                    w.p, w.q, w.case, c.case
                ))
            }
            Err(e) => return Err(format!("({}, {}) failed to classify: {e}", w.p, w.q)),
        }
        if w.expand() != (w.p.clone(), w.q.clone()) {
            return Err(format!("({}, {}) does not re-expand", w.p, w.q));
        }
    }
    Ok(())
}

pub fn bijection_fidelity() -> CriterionResult {
    timed(2, "bijection_fidelity", || {
        let mut pairs = 0;
        for (n, l) in ORACLE_GRID {
            let l = l as usize;
            let oracle = oracle_enumerate_e(n, l, DEFAULT_BUDGET)?;
            let e1 = if l.is_multiple_of(2) {
                construct_e1(n, l, DEFAULT_BUDGET)?
            } else {
                Vec::new()
            };
            let e2 = construct_e2(n, l, DEFAULT_BUDGET)?;
            for (label, built, want) in [("E1", &e1, &oracle.e1), ("E2", &e2, &oracle.e2)] {
                let got = match pair_set(built) {
                    Ok(s) => s,
                    Err(e) => return Ok(Err(format!("{label} (n={n}, l={l}): {e}"))),
                };
                let want: BTreeSet<_> = want.iter().cloned().collect();
                if got != want {
                    return Ok(Err(format!(
                        "{label} (n={n}, l={l}): constructed {} pairs, oracle {}",
                        got.len(),
                        want.len()
                    )));
                }
                for (p, q) in want {
                    if let Err(e) = classify_pair(&p, &q) {
                        return Ok(Err(format!(
                            "oracle pair ({p}, {q}) failed to classify: {e}"
                        )));
                    }
                }
                if let Err(e) = round_trips(built) {
                    return Ok(Err(format!("{label} (n={n}, l={l}): {e}")));
                }
                pairs += built.len();
            }
            if l.is_multiple_of(2) {
                check_e1_exclusions(n, l, DEFAULT_BUDGET)?;
            }
        }
        Ok(Ok(format!("{pairs} pairs matched and round-tripped")))
    })
}

/// `l = 3^m l₁` with `3 ∤ l₁`; returns `l₁`.
fn strip_threes(mut l: u64) -> u64 {
    while l.is_multiple_of(3) {
        l /= 3;
    }
    l
}

pub fn formula_agreement() -> CriterionResult {
    timed(3, "formula_agreement", || {
        let mut checked = 0;
        for n in 2..=3 {
            for l in 1..=24 {
                if strip_threes(l) >= 2 {
                    let a = eps2_divisor_sum(n, l)?;
                    let b = eps2_closed(n, l)?;
                    let c = eps2_combinatorial(n, l)?;
                    if a != b || a != c {
                        return Ok(Err(format!("eps2 (n={n}, l={l}): {a} / {b} / {c}")));
                    }
                    checked += 1;
                }
                if l % 2 == 0 {
                    let a = eps1_divisor_sum(n, l)?;
                    let b = eps1_closed(n, l)?;
                    if a != b {
                        return Ok(Err(format!("eps1 (n={n}, l={l}): {a} / {b}")));
                    }
                    checked += 1;
                }
            }
        }
        Ok(Ok(format!("{checked} (n, l) comparisons equal")))
    })
}

pub fn subset_sum_adjudication() -> CriterionResult {
    timed(4, "subset_sum_adjudication", || {
        let report = consistency_report(2, 12, None)?;
        let reference = &report.eps1[DIVISOR_SUM];
        Ok(match report.verdict("eps1", COMBINATORIAL, DIVISOR_SUM) {
            Some(equal) => {
                let other = report
                    .eps1
                    .get(COMBINATORIAL)
                    .map_or_else(|| "n/a".to_string(), |v| v.to_string());
                Ok(format!(
                    "eps1(2,12): divisor_sum={reference}, combinatorial={other}, agree={equal}"
                ))
            }
            None => Err("report has no verdict for eps1 combinatorial vs divisor_sum".to_string()),
        })
    })
}

pub fn pi_correctness() -> CriterionResult {
    timed(5, "pi_correctness", || {
        for (n, max) in [(2u32, 12usize), (3, 8)] {
            for k in 1..=max {
                let brute = all_words(n, k)
                    .filter(|w| is_primitive_slice(w.letters()))
                    .count();
                if BigUint::from(brute) != count_primitive(n as u64, k as u64)? {
                    return Ok(Err(format!("pi_{n}({k}) differs from enumeration {brute}")));
                }
            }
        }
        for n in 2..=5 {
            for l in 1..=30 {
                let sum: BigUint = divisors(l)
                    .into_iter()
                    .map(|d| count_primitive(n, d))
                    .sum::<Result<BigUint>>()?;
                if sum != big_pow(n, l) {
                    return Ok(Err(format!("sum of pi_{n}(d) over d | {l} is {sum}")));
                }
            }
        }
        Ok(Ok("enumeration and divisor identity match".to_string()))
    })
}

pub fn finite_scale_asymptotics() -> CriterionResult {
    timed(6, "finite_scale_asymptotics", || {
        for n in 2..=100 {
            if !eps2_l4_deviation_is_inverse_square(n)? {
                return Ok(Err(format!("eps2({n}, 4) != n^3 - n")));
            }
        }
        let l_values: Vec<u64> = (1..=40).collect();
        for n in [2, 3, 5] {
            let table = check_eps2_bound(n, &l_values)?;
            if let Some(row) = table.rows.iter().find(|r| r.verdict != Some(true)) {
                return Ok(Err(format!(
                    "eps2 bound fails at n={n}, l={}",
                    row.parameter
                )));
            }
        }
        for n in [2, 3] {
            let table = prime_product_table(n, &[3, 4, 5])?;
            if let Some(row) = table.rows.iter().find(|r| r.verdict != Some(true)) {
                return Ok(Err(format!(
                    "prime-product polynomial fails at n={n}, k={}",
                    row.parameter
                )));
            }
        }
        Ok(Ok(
            "l=4 deviation, eps2 bound and prime-product identity hold".to_string(),
        ))
    })
}

pub fn lemma_properties() -> CriterionResult {
    timed(7, "lemma_properties", || {
        let checks = run_suite();
        if let Some(bad) = checks.iter().find(|c| !c.passed()) {
            return Ok(Err(bad.to_string()));
        }
        let cases: u64 = checks.iter().map(|c| c.cases).sum();
        Ok(Ok(format!("{} suites, {cases} cases", checks.len())))
    })
}

fn random_word(rng: &mut ChaCha8Rng, n: u32, len: usize) -> Word {
    Word::new((0..len).map(|_| rng.gen_range(0..n)).collect(), n).expect("letters in range")
}

fn random_primitive(rng: &mut ChaCha8Rng, n: u32, len: usize) -> Word {
    loop {
        let w = random_word(rng, n, len);
        if is_primitive_slice(w.letters()) {
            return w;
        }
    }
}

/// Builds random pairs in each normal form over larger alphabets and lengths
/// than the exhaustive grid and checks that classification recovers them.
pub fn sampled_classification(seed: u64, samples: usize) -> CriterionResult {
    timed(8, "sampled_classification", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = [0usize; 3];
        for _ in 0..samples {
            let n = rng.gen_range(2..=4u32);
            let (p, q, case) = match rng.gen_range(0..3) {
                0 => {
                    let half = rng.gen_range(1..=6);
                    let q = random_primitive(&mut rng, n, 2 * half);
                    let x = random_word(&mut rng, n, half);
                    if !is_primitive_slice(x.concat(&q).letters()) {
                        continue;
                    }
                    (x.concat(&q).concat(&x), q, Case::I)
                }
                c => {
                    let unit = rng.gen_range(1..=3);
                    let s = rng.gen_range(1..=3);
                    let (alpha_len, beta_len, case) = if c == 1 {
                        (unit, 2 * unit, Case::II)
                    } else {
                        (2 * unit, unit, Case::III)
                    };
                    let ab = random_primitive(&mut rng, n, alpha_len + beta_len);
                    let (alpha, beta) = (ab.prefix(alpha_len), ab.suffix(beta_len));
                    let ba = beta.concat(&alpha);
                    let reps = if case == Case::II { 2 * s } else { 2 * s + 1 };
                    (
                        ba.repeat(reps).concat(&beta),
                        ab.repeat(s).concat(&alpha),
                        case,
                    )
                }
            };
            let witness = match classify_pair(&p, &q) {
                Ok(w) => w,
                Err(e) => return Ok(Err(format!("({p}, {q}) built as {case}: {e}"))),
            };
            if witness.case != case {
                return Ok(Err(format!(
                    "({p}, {q}) built as {case}, classified {}",
                    witness.case
                )));
            }
            if case != Case::I {
                let l = q.len() as u64;
                if !lambda_sets(l).all.contains(&(witness.exponent as u64)) {
                    return Ok(Err(format!(
                        "({p}, {q}): k = {} not in Lambda({l})",
                        witness.exponent
                    )));
                }
            }
            seen[case as usize] += 1;
        }
        Ok(Ok(format!(
            "seed {seed}: {} case I, {} case II, {} case III",
            seen[0], seen[1], seen[2]
        )))
    })
}

/// Runs criteria 1 to 7 followed by the sampled classification check.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    vec![
        oracle_equivalence(),
        bijection_fidelity(),
        formula_agreement(),
        subset_sum_adjudication(),
        pi_correctness(),
        finite_scale_asymptotics(),
        lemma_properties(),
        sampled_classification(seed, 2000),
    ]
}
