//! Counting `ε₁(n, l) = |E₁|`, `ε₂(n, l) = |E₂|` and `ε = ε₁ + ε₂` several ways.
//!
//! The divisor-sum forms are the reference: they count the images of explicit
//! bijections. The closed forms, signed subset-sum ("combinatorial") forms and
//! the specialized example forms are evaluated exactly as stated and compared
//! against the reference by [`consistency_report`]. Disagreements are recorded
//! in the report, never raised as errors.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numtheory::{
    big_pow, check_alphabet, count_primitive, factorize, gamma2, gamma_sets, lambda_sets,
    six_split, subsets, to_count, BigCount,
};
use crate::pairs::oracle_counts;

pub const DIVISOR_SUM: &str = "divisor_sum";
pub const CLOSED_FORM: &str = "closed_form";
pub const COMBINATORIAL: &str = "combinatorial";
pub const EXAMPLE_FORM: &str = "example_form";
/// `ε₁ + ε₂` from the two divisor sums.
pub const COMPONENT_SUM: &str = "component_sum";
/// `ε₁ = 0` for odd `l`.
pub const ODD_LENGTH: &str = "odd_length";
pub const ORACLE: &str = "oracle";

fn check_length(l: u64) -> Result<()> {
    if l == 0 {
        Err(Error::InvalidArgument("l must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn pi_sum(n: u64, l: u64, divisors: &[u64]) -> Result<BigCount> {
    divisors
        .iter()
        .map(|&d| count_primitive(n, 3 * l / d))
        .sum()
}

/// `ε₂(n, l) = Σ_{d ∈ Λ(l)} π_n(3l/d)`.
pub fn eps2_divisor_sum(n: u64, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    check_length(l)?;
    pi_sum(n, l, &lambda_sets(l).all)
}

/// `ε₁(n, l) = n^{l/2} π_n(l) - Σ_{d ∈ Λ⁺(l)} π_n(3l/d)` for even `l`.
pub fn eps1_divisor_sum(n: u64, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    check_length(l)?;
    if l % 2 == 1 {
        return Err(Error::OddLength(l));
    }
    let candidates = big_pow(n, l / 2) * count_primitive(n, l)?;
    let excluded = pi_sum(n, l, &lambda_sets(l).even)?;
    Ok(candidates - excluded)
}

/// `ε₁` with the odd-length convention `ε₁ = 0`.
pub fn eps1_or_zero(n: u64, l: u64) -> Result<BigCount> {
    match eps1_divisor_sum(n, l) {
        Err(Error::OddLength(_)) => Ok(BigCount::zero()),
        other => other,
    }
}

/// `ε(n, l)`: `n^{l/2} π_n(l) + Σ_{Λ⁻(l)} π_n(3l/d)` for even `l`,
/// `Σ_{Λ(l)} π_n(3l/d)` for odd `l`.
pub fn eps_total(n: u64, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    check_length(l)?;
    let lambda = lambda_sets(l);
    if l.is_multiple_of(2) {
        Ok(big_pow(n, l / 2) * count_primitive(n, l)? + pi_sum(n, l, &lambda.odd)?)
    } else {
        pi_sum(n, l, &lambda.all)
    }
}

/// `n^{3l} - n^l - π_n(3l)` (odd `l₁`), with `- π_n(3l/2)` added for even
/// `l₁`, where `l = 3^m l₁`, `3 ∤ l₁`, `l₁ >= 2`.
pub fn eps2_closed(n: u64, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    check_length(l)?;
    let mut l1 = l;
    while l1.is_multiple_of(3) {
        l1 /= 3;
    }
    if l1 == 1 {
        return Err(Error::PowerOfThree(l));
    }
    let mut value = BigInt::from(big_pow(n, 3 * l))
        - BigInt::from(big_pow(n, l))
        - BigInt::from(count_primitive(n, 3 * l)?);
    if l1.is_multiple_of(2) {
        value -= BigInt::from(count_primitive(n, 3 * l / 2)?);
    }
    Ok(to_count(value))
}

/// `n^{l/2}(π_n(l) + 1) + π_n(3l/2) - n^{3l/2}` for even `l`.
pub fn eps1_closed(n: u64, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    check_length(l)?;
    if l % 2 == 1 {
        return Err(Error::OddLength(l));
    }
    let value = BigInt::from(big_pow(n, l / 2) * (count_primitive(n, l)? + 1u32))
        + BigInt::from(count_primitive(n, 3 * l / 2)?)
        - BigInt::from(big_pow(n, 3 * l / 2));
    Ok(to_count(value))
}

fn exact_exponent(form: &'static str, numerator: u64, denominator: u64) -> Result<u64> {
    if numerator.is_multiple_of(denominator) {
        Ok(numerator / denominator)
    } else {
        Err(Error::NonIntegralExponent {
            form,
            numerator,
            denominator,
        })
    }
}

/// `Σ_{L ∈ Γ(l)} (-1)^{|L|+1} n^{3l/𝔭(L)}` with `Γ₁` when `4 | l` (after
/// removing the factors of 3) and `Γ₂` otherwise.
pub fn eps2_combinatorial(n: u64, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    check_length(l)?;
    let mut total = BigInt::zero();
    for set in gamma_sets(l)?.sets {
        let e = exact_exponent("eps2 subset sum", 3 * l, set.product())?;
        let term = BigInt::from(big_pow(n, e));
        if set.len() % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(to_count(total))
}

/// `Σ_{L ⊆ 𝔭𝔣(l)} (-1)^{|L|} n^{l/𝔭(L) + l/2} + Σ_{L ∈ Γ₂(l)} (-1)^{|L|} n^{l/(2𝔭(L))}`
/// for even `l`, evaluated literally. Fails with
/// [`Error::NonIntegralExponent`] when some exponent is not an integer.
pub fn eps1_combinatorial(n: u64, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    check_length(l)?;
    if l % 2 == 1 {
        return Err(Error::OddLength(l));
    }
    let mut total = BigInt::zero();
    let mut add = |sign_positive: bool, e: u64| {
        let term = BigInt::from(big_pow(n, e));
        if sign_positive {
            total += term;
        } else {
            total -= term;
        }
    };
    for set in subsets(&factorize(l)?.primes()) {
        let e = exact_exponent("eps1 subset sum", l, set.product())? + l / 2;
        add(set.len() % 2 == 0, e);
    }
    for set in gamma2(l)? {
        let e = exact_exponent("eps1 subset sum", l, 2 * set.product())?;
        add(set.len() % 2 == 0, e);
    }
    Ok(to_count(total))
}

/// A formula value, or the reason it cannot be evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormValue {
    Value(BigCount),
    NonIntegral { numerator: u64, denominator: u64 },
}

impl FormValue {
    pub fn value(&self) -> Option<&BigCount> {
        match self {
            FormValue::Value(v) => Some(v),
            FormValue::NonIntegral { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            FormValue::Value(v) => json!(v.to_string()),
            FormValue::NonIntegral {
                numerator,
                denominator,
            } => json!({"non_integral_exponent": format!("{numerator}/{denominator}")}),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExampleShape {
    /// `l = 3^m 2^s`, `s >= 1`
    ThreeTwo { m: u32, s: u32 },
    /// `l = 3^m p^s`, `p >= 5` prime, `s >= 1`
    ThreePrime { m: u32, p: u64, s: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleForms {
    pub shape: ExampleShape,
    pub eps1: FormValue,
    pub eps2: FormValue,
}

fn monomial_diff(n: u64, plus: &[(u64, u64)], minus: &[(u64, u64)]) -> FormValue {
    for &(num, den) in plus.iter().chain(minus) {
        if num % den != 0 {
            return FormValue::NonIntegral {
                numerator: num,
                denominator: den,
            };
        }
    }
    let sum = |terms: &[(u64, u64)]| -> BigInt {
        terms
            .iter()
            .map(|&(num, den)| BigInt::from(big_pow(n, num / den)))
            .sum()
    };
    FormValue::Value(to_count(sum(plus) - sum(minus)))
}

/// The specialized forms for `l = 3^m 2^s` and `l = 3^m p^s`; `None` for any
/// other shape of `l`.
pub fn example_forms(n: u64, l: u64) -> Result<Option<ExampleForms>> {
    check_alphabet(n)?;
    check_length(l)?;
    let split = six_split(l);
    let m = split.threes;
    let three_m = 3u64.pow(m);
    if split.rest == 1 && split.twos >= 1 {
        let s = split.twos;
        // n^{3l/2} + n^{2l/3} - n^l - n^{5l/6}
        let eps1 = monomial_diff(n, &[(3 * l, 2), (2 * l, 3)], &[(l, 1), (5 * l, 6)]);
        let eps2 = if s == 1 {
            FormValue::Value(BigCount::zero())
        } else {
            let two = 2u64.pow(s - 2);
            FormValue::Value(big_pow(n, 3 * three_m * two) - big_pow(n, three_m * two))
        };
        return Ok(Some(ExampleForms {
            shape: ExampleShape::ThreeTwo { m, s },
            eps1,
            eps2,
        }));
    }
    if split.twos == 0 && split.rest > 1 {
        let f = factorize(split.rest)?;
        if let [(p, s)] = f.pairs[..] {
            let ps = p.pow(s - 1);
            return Ok(Some(ExampleForms {
                shape: ExampleShape::ThreePrime { m, p, s },
                eps1: FormValue::Value(BigCount::zero()),
                eps2: FormValue::Value(big_pow(n, 3 * three_m * ps) - big_pow(n, three_m * ps)),
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub quantity: String,
    pub left: String,
    pub right: String,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCounts {
    pub eps1: BigCount,
    pub eps2: BigCount,
}

/// Every formulation's value at one `(n, l)`, the oracle counts when the
/// budget admits them, and all pairwise equality verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub n: u64,
    pub l: u64,
    pub eps1: BTreeMap<String, BigCount>,
    pub eps2: BTreeMap<String, BigCount>,
    pub eps: BTreeMap<String, BigCount>,
    pub oracle: Option<OracleCounts>,
    pub agreements: Vec<Agreement>,
    /// Every computed value is at most `n^{3l}`.
    pub within_pair_space: bool,
    pub notes: Vec<String>,
}

impl CountReport {
    pub fn all_agree(&self) -> bool {
        self.agreements.iter().all(|a| a.equal)
    }

    pub fn disagreements(&self) -> impl Iterator<Item = &Agreement> {
        self.agreements.iter().filter(|a| !a.equal)
    }

    pub fn verdict(&self, quantity: &str, left: &str, right: &str) -> Option<bool> {
        self.agreements
            .iter()
            .find(|a| {
                a.quantity == quantity
                    && ((a.left == left && a.right == right)
                        || (a.left == right && a.right == left))
            })
            .map(|a| a.equal)
    }

    pub fn to_json(&self) -> Value {
        let strings = |m: &BTreeMap<String, BigCount>| -> Value {
            m.iter()
                .map(|(k, v)| (k.clone(), json!(v.to_string())))
                .collect::<serde_json::Map<_, _>>()
                .into()
        };
        json!({
            "n": self.n,
            "l": self.l,
            "variants": {
                "eps1": strings(&self.eps1),
                "eps2": strings(&self.eps2),
                "eps": strings(&self.eps),
            },
            "oracle": self.oracle.as_ref().map(|o| json!({
                "eps1": o.eps1.to_string(),
                "eps2": o.eps2.to_string(),
            })),
            "agreements": self.agreements,
            "all_agree": self.all_agree(),
            "within_pair_space": self.within_pair_space,
            "notes": self.notes,
        })
    }

    /// Long-format rows `(n, l, quantity, source, value)`, sorted.
    pub fn csv_rows(&self) -> Vec<[String; 5]> {
        let mut rows = Vec::new();
        for (quantity, map) in [
            ("eps1", &self.eps1),
            ("eps2", &self.eps2),
            ("eps", &self.eps),
        ] {
            for (name, value) in map {
                rows.push([
                    self.n.to_string(),
                    self.l.to_string(),
                    quantity.to_string(),
                    name.clone(),
                    value.to_string(),
                ]);
            }
        }
        if let Some(o) = &self.oracle {
            for (quantity, value) in [("eps1", &o.eps1), ("eps2", &o.eps2)] {
                rows.push([
                    self.n.to_string(),
                    self.l.to_string(),
                    quantity.to_string(),
                    ORACLE.to_string(),
                    value.to_string(),
                ]);
            }
        }
        rows
    }
}

pub const CSV_HEADER: [&str; 5] = ["n", "l", "quantity", "source", "value"];

/// Writes a batch of reports as one CSV table.
pub fn reports_to_csv(reports: &[CountReport]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for report in reports {
        for row in report.csv_rows() {
            writer.write_record(&row).expect("in-memory write");
        }
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf8")
}

fn record(
    map: &mut BTreeMap<String, BigCount>,
    notes: &mut Vec<String>,
    quantity: &str,
    name: &str,
    value: Result<BigCount>,
) {
    match value {
        Ok(v) => {
            map.insert(name.to_string(), v);
        }
        Err(e) => notes.push(format!("{quantity}.{name} not evaluated: {e}")),
    }
}

fn pairwise(
    quantity: &str,
    map: &BTreeMap<String, BigCount>,
    oracle: Option<&BigCount>,
) -> Vec<Agreement> {
    let mut entries: Vec<(&str, &BigCount)> = map.iter().map(|(k, v)| (k.as_str(), v)).collect();
    if let Some(o) = oracle {
        entries.push((ORACLE, o));
    }
    let mut out = Vec::new();
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            out.push(Agreement {
                quantity: quantity.to_string(),
                left: entries[i].0.to_string(),
                right: entries[j].0.to_string(),
                equal: entries[i].1 == entries[j].1,
            });
        }
    }
    out
}

/// Evaluates every variant whose precondition holds and, if `oracle_budget`
/// admits `n^{3l}` pairs, the brute-force oracle.
pub fn consistency_report(n: u64, l: u64, oracle_budget: Option<u64>) -> Result<CountReport> {
    check_alphabet(n)?;
    check_length(l)?;
    let mut notes = Vec::new();
    let mut eps1 = BTreeMap::new();
    let mut eps2 = BTreeMap::new();
    let mut eps = BTreeMap::new();

    let examples = example_forms(n, l)?;
    if l % 2 == 1 {
        eps1.insert(ODD_LENGTH.to_string(), BigCount::zero());
        notes.push("eps1 is 0 for odd l: case I needs |q| = 2|x|".to_string());
    } else {
        record(
            &mut eps1,
            &mut notes,
            "eps1",
            DIVISOR_SUM,
            eps1_divisor_sum(n, l),
        );
        record(
            &mut eps1,
            &mut notes,
            "eps1",
            CLOSED_FORM,
            eps1_closed(n, l),
        );
        record(
            &mut eps1,
            &mut notes,
            "eps1",
            COMBINATORIAL,
            eps1_combinatorial(n, l),
        );
    }
    record(
        &mut eps2,
        &mut notes,
        "eps2",
        DIVISOR_SUM,
        eps2_divisor_sum(n, l),
    );
    record(
        &mut eps2,
        &mut notes,
        "eps2",
        CLOSED_FORM,
        eps2_closed(n, l),
    );
    record(
        &mut eps2,
        &mut notes,
        "eps2",
        COMBINATORIAL,
        eps2_combinatorial(n, l),
    );

    match &examples {
        Some(forms) => {
            for (quantity, map, value) in [
                ("eps1", &mut eps1, &forms.eps1),
                ("eps2", &mut eps2, &forms.eps2),
            ] {
                match value {
                    FormValue::Value(v) => {
                        map.insert(EXAMPLE_FORM.to_string(), v.clone());
                    }
                    FormValue::NonIntegral {
                        numerator,
                        denominator,
                    } => notes.push(format!(
                        "{quantity}.{EXAMPLE_FORM} non-evaluable: exponent {numerator}/{denominator}"
                    )),
                }
            }
        }
        None => notes.push(format!(
            "{EXAMPLE_FORM} not applicable: l = {l} has neither shape 3^m 2^s nor 3^m p^s"
        )),
    }

    record(&mut eps, &mut notes, "eps", DIVISOR_SUM, eps_total(n, l));
    let eps1_base = if l % 2 == 1 { ODD_LENGTH } else { DIVISOR_SUM };
    for name in [DIVISOR_SUM, CLOSED_FORM, COMBINATORIAL, EXAMPLE_FORM] {
        let e1 = if l % 2 == 1 {
            eps1.get(ODD_LENGTH)
        } else {
            eps1.get(name)
        };
        if let (Some(a), Some(b)) = (e1, eps2.get(name)) {
            let key = if name == DIVISOR_SUM {
                COMPONENT_SUM
            } else {
                name
            };
            eps.insert(key.to_string(), a + b);
        }
    }
    debug_assert!(eps1.contains_key(eps1_base));

    let oracle = match oracle_budget {
        Some(budget) if big_pow(n, 3 * l) <= BigUint::from(budget) => {
            let (e1, e2) = oracle_counts(n, l as usize, budget)?;
            Some(OracleCounts {
                eps1: BigCount::from(e1),
                eps2: BigCount::from(e2),
            })
        }
        Some(budget) => {
            notes.push(format!("oracle skipped: n^(3l) exceeds budget {budget}"));
            None
        }
        None => None,
    };

    let mut agreements = pairwise("eps1", &eps1, oracle.as_ref().map(|o| &o.eps1));
    agreements.extend(pairwise("eps2", &eps2, oracle.as_ref().map(|o| &o.eps2)));
    let oracle_total = oracle.as_ref().map(|o| &o.eps1 + &o.eps2);
    agreements.extend(pairwise("eps", &eps, oracle_total.as_ref()));

    let space = big_pow(n, 3 * l);
    let within_pair_space = eps1
        .values()
        .chain(eps2.values())
        .chain(eps.values())
        .all(|v| *v <= space);
    if !within_pair_space {
        notes.push("a variant exceeds the pair space n^(3l)".to_string());
    }

    Ok(CountReport {
        n,
        l,
        eps1,
        eps2,
        eps,
        oracle,
        agreements,
        within_pair_space,
        notes,
    })
}
