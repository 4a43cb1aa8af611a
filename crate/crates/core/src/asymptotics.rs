//! Finite-scale tables for the growth of `ε₁` and `ε₂`.
//!
//! Numerators and denominators are exact integers. Fractional exponents such as
//! `n^{3l/4}` are never evaluated: both sides of a comparison are raised to an
//! integer power first. The decimal `ratio` column is display only.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::counting::{eps1_divisor_sum, eps2_divisor_sum};
use crate::error::{Error, Result};
use crate::numtheory::{
    big_pow, check_alphabet, count_primitive, lambda_sets, primes_and_gaps, BigCount,
};
use crate::parallel;

/// Significant digits used when rendering ratios.
pub const RATIO_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NToInfEps2,
    NToInfEps1,
    LToInfEps1,
    LToInfEps2,
    Eps2Bound,
    PrimeProduct,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::NToInfEps2 => "n_to_inf_eps2",
            Regime::NToInfEps1 => "n_to_inf_eps1",
            Regime::LToInfEps1 => "l_to_inf_eps1",
            Regime::LToInfEps2 => "l_to_inf_eps2",
            Regime::Eps2Bound => "eps2_bound",
            Regime::PrimeProduct => "prime_product",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioRow {
    pub parameter: u64,
    pub numerator: BigCount,
    pub denominator: BigCount,
    pub ratio: String,
    /// Regime-specific exact check (bound or identity), if the regime has one.
    pub verdict: Option<bool>,
    /// Independently computed comparison value, if the regime has one.
    pub reference: Option<BigCount>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioTable {
    pub regime: Regime,
    /// Parameters held fixed across rows, e.g. `("l", 4)`.
    pub fixed: Vec<(String, u64)>,
    pub rows: Vec<RatioRow>,
    /// `|ratio - 1|` is non-increasing down the table.
    pub monotone: bool,
    pub flagged: bool,
}

pub const CSV_HEADER: [&str; 5] = ["parameter", "numerator", "denominator", "ratio", "verdict"];

fn verdict_text(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "pass",
        Some(false) => "fail",
        None => "",
    }
}

impl RatioTable {
    fn new(regime: Regime, fixed: Vec<(String, u64)>, rows: Vec<RatioRow>) -> Self {
        let monotone = rows.windows(2).all(|w| {
            deviation_cmp(
                &w[1].numerator,
                &w[1].denominator,
                &w[0].numerator,
                &w[0].denominator,
            ) != Ordering::Greater
        });
        let verdicts_ok = rows.iter().all(|r| r.verdict != Some(false));
        let flagged = match regime {
            Regime::Eps2Bound | Regime::PrimeProduct => !verdicts_ok,
            _ => !verdicts_ok || !monotone,
        };
        RatioTable {
            regime,
            fixed,
            rows,
            monotone,
            flagged,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record([
                    row.parameter.to_string(),
                    row.numerator.to_string(),
                    row.denominator.to_string(),
                    row.ratio.clone(),
                    verdict_text(row.verdict).to_string(),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("flush")).expect("utf8")
    }

    pub fn to_json(&self) -> Value {
        let fixed: serde_json::Map<String, Value> = self
            .fixed
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        json!({
            "regime": self.regime,
            "fixed": fixed,
            "monotone": self.monotone,
            "flagged": self.flagged,
            "rows": self.rows.iter().map(|r| json!({
                "parameter": r.parameter,
                "numerator": r.numerator.to_string(),
                "denominator": r.denominator.to_string(),
                "ratio": r.ratio,
                "verdict": r.verdict,
                "reference": r.reference.as_ref().map(|v| v.to_string()),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Compares `|a/b - 1|` with `|c/d - 1|` exactly.
fn deviation_cmp(a: &BigUint, b: &BigUint, c: &BigUint, d: &BigUint) -> Ordering {
    let abs_diff = |x: &BigUint, y: &BigUint| if x > y { x - y } else { y - x };
    (abs_diff(a, b) * d).cmp(&(abs_diff(c, d) * b))
}

/// Renders `num/den` as a plain decimal with `digits` significant digits,
/// rounding half up.
pub fn render_ratio(num: &BigUint, den: &BigUint, digits: usize) -> String {
    assert!(!den.is_zero(), "zero denominator");
    assert!(digits >= 1);
    if num.is_zero() {
        return "0".to_string();
    }
    let ten = BigUint::from(10u32);
    let low = ten.pow(digits as u32 - 1);
    let high = &low * &ten;
    // scale so that low <= num * 10^e / den < high
    let mut e: i64 = digits as i64 - (num.to_string().len() as i64 - den.to_string().len() as i64);
    let scaled = |e: i64| -> BigUint {
        let (n, d) = if e >= 0 {
            (num * ten.pow(e as u32), den.clone())
        } else {
            (num.clone(), den * ten.pow((-e) as u32))
        };
        (n * 2u32 + &d) / (d * 2u32)
    };
    let mut q = scaled(e);
    loop {
        if q >= high {
            e -= 1;
        } else if q < low {
            e += 1;
        } else {
            break;
        }
        q = scaled(e);
    }
    let text = q.to_string();
    if e <= 0 {
        return format!("{text}{}", "0".repeat((-e) as usize));
    }
    let e = e as usize;
    let padded = if text.len() <= e {
        format!("{}{text}", "0".repeat(e + 1 - text.len()))
    } else {
        text
    };
    let (int_part, frac) = padded.split_at(padded.len() - e);
    format!("{int_part}.{frac}")
}

fn row(parameter: u64, numerator: BigCount, denominator: BigCount) -> RatioRow {
    RatioRow {
        ratio: render_ratio(&numerator, &denominator, RATIO_DIGITS),
        parameter,
        numerator,
        denominator,
        verdict: None,
        reference: None,
    }
}

/// `δ(l) = min Λ(l)`.
pub fn delta(l: u64) -> Option<u64> {
    lambda_sets(l).all.first().copied()
}

fn require_delta(l: u64) -> Result<u64> {
    delta(l).ok_or(Error::DeltaUndefined(l))
}

/// Rows `(n, ε₂(n, l), n^{3l/δ(l)})` for fixed `l`.
pub fn ratio_eps2_n(l: u64, n_values: &[u64]) -> Result<RatioTable> {
    let d = require_delta(l)?;
    for &n in n_values {
        check_alphabet(n)?;
    }
    let rows = parallel::map(n_values, |&n| -> Result<RatioRow> {
        Ok(row(n, eps2_divisor_sum(n, l)?, big_pow(n, 3 * l / d)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RatioTable::new(
        Regime::NToInfEps2,
        vec![("l".into(), l)],
        rows,
    ))
}

/// Rows `(n, ε₁(n, l), n^{3l/2})` for fixed even `l`.
pub fn ratio_eps1_n(l: u64, n_values: &[u64]) -> Result<RatioTable> {
    if l == 0 || l % 2 == 1 {
        return Err(Error::OddInTable(l));
    }
    for &n in n_values {
        check_alphabet(n)?;
    }
    let rows = parallel::map(n_values, |&n| -> Result<RatioRow> {
        Ok(row(n, eps1_divisor_sum(n, l)?, big_pow(n, 3 * l / 2)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RatioTable::new(
        Regime::NToInfEps1,
        vec![("l".into(), l)],
        rows,
    ))
}

/// `Σ_{d ∈ Λ⁺(l)} π_n(3l/d) <= l · n^{3l/4}`, checked as
/// `(Σ)^4 <= l^4 · n^{3l}`.
pub fn eps1_correction_bound_holds(n: u64, l: u64) -> Result<bool> {
    let correction: BigCount = lambda_sets(l)
        .even
        .iter()
        .map(|&d| count_primitive(n, 3 * l / d))
        .sum::<Result<BigCount>>()?;
    Ok(correction.pow(4) <= BigUint::from(l).pow(4) * big_pow(n, 3 * l))
}

/// Rows `(l, ε₁(n, l), n^{3l/2})` over even `l`, each also checking the
/// correction-term bound.
pub fn ratio_eps1_l(n: u64, l_values: &[u64]) -> Result<RatioTable> {
    check_alphabet(n)?;
    if let Some(&odd) = l_values.iter().find(|&&l| l == 0 || l % 2 == 1) {
        return Err(Error::OddInTable(odd));
    }
    let rows = parallel::map(l_values, |&l| -> Result<RatioRow> {
        let mut r = row(l, eps1_divisor_sum(n, l)?, big_pow(n, 3 * l / 2));
        r.verdict = Some(eps1_correction_bound_holds(n, l)?);
        Ok(r)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RatioTable::new(
        Regime::LToInfEps1,
        vec![("n".into(), n)],
        rows,
    ))
}

/// Rows `(l, ε₂(n, l), n^{3l/δ(l)})` over `l` with nonempty `Λ(l)`.
pub fn ratio_eps2_l(n: u64, l_values: &[u64]) -> Result<RatioTable> {
    check_alphabet(n)?;
    for &l in l_values {
        require_delta(l)?;
    }
    let rows = parallel::map(l_values, |&l| -> Result<RatioRow> {
        let d = require_delta(l)?;
        Ok(row(l, eps2_divisor_sum(n, l)?, big_pow(n, 3 * l / d)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RatioTable::new(
        Regime::LToInfEps2,
        vec![("n".into(), n)],
        rows,
    ))
}

/// Rows `(l, ε₂(n, l)^4, 16 n^{3l})`; the verdict is `ε₂(n, l) <= 2 n^{3l/4}`.
pub fn check_eps2_bound(n: u64, l_values: &[u64]) -> Result<RatioTable> {
    check_alphabet(n)?;
    let rows = parallel::map(l_values, |&l| -> Result<RatioRow> {
        let eps2 = eps2_divisor_sum(n, l)?;
        let bound = big_pow(n, 3 * l) * 16u32;
        let mut r = row(l, eps2.pow(4), bound);
        r.verdict = Some(r.numerator <= r.denominator);
        r.reference = Some(eps2);
        Ok(r)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RatioTable::new(
        Regime::Eps2Bound,
        vec![("n".into(), n)],
        rows,
    ))
}

/// `n^{3P} + n^{3p} + n - n^P - n^p - n^3` for consecutive primes `p < P`.
pub fn prime_product_polynomial(n: u64, p: u64, next: u64) -> BigCount {
    big_pow(n, 3 * next) + big_pow(n, 3 * p) + BigUint::from(n)
        - big_pow(n, next)
        - big_pow(n, p)
        - big_pow(n, 3)
}

/// Rows `(k, ε₂(n, p_k p_{k+1}), n^{3p_{k+1}}(1 + n^{-3g(k)}))`; the
/// denominator equals `n^{3p_{k+1}} + n^{3p_k}`. The verdict compares the
/// divisor sum with [`prime_product_polynomial`].
pub fn prime_product_table(n: u64, k_values: &[u64]) -> Result<RatioTable> {
    check_alphabet(n)?;
    if let Some(&k) = k_values.iter().find(|&&k| k < 3) {
        return Err(Error::PrimeIndexTooSmall(k));
    }
    let rows = parallel::map(k_values, |&k| -> Result<RatioRow> {
        let gap = primes_and_gaps(k)?;
        let (p, next) = (gap.prime, gap.next_prime);
        let l = p * next;
        debug_assert_eq!(delta(l), Some(p));
        let eps2 = eps2_divisor_sum(n, l)?;
        // n^{3l/δ}(1 + n^{-3g}) with 3l/δ = 3P and 3P - 3g = 3p
        let denominator = big_pow(n, 3 * next) + big_pow(n, 3 * p);
        let reference = prime_product_polynomial(n, p, next);
        let mut r = row(k, eps2, denominator);
        r.verdict = Some(r.numerator == reference);
        r.reference = Some(reference);
        Ok(r)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RatioTable::new(
        Regime::PrimeProduct,
        vec![("n".into(), n)],
        rows,
    ))
}

/// `|ε₂(n, 4) / n³ - 1| = n⁻²`, checked exactly.
pub fn eps2_l4_deviation_is_inverse_square(n: u64) -> Result<bool> {
    let eps2 = eps2_divisor_sum(n, 4)?;
    let cube = big_pow(n, 3);
    if eps2 > cube {
        return Ok(false);
    }
    Ok((cube.clone() - eps2) * big_pow(n, 2) == cube * BigUint::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(20), Some(4));
        assert_eq!(delta(35), Some(5));
        assert_eq!(delta(9), None);
    }

    #[test]
    fn ratio_rendering() {
        assert_eq!(render_ratio(&big(3), &big(4), 12), "0.750000000000");
        assert_eq!(render_ratio(&big(1), &big(3), 12), "0.333333333333");
        assert_eq!(render_ratio(&big(2), &big(3), 12), "0.666666666667");
        assert_eq!(render_ratio(&big(1), &big(1), 12), "1.00000000000");
        assert_eq!(render_ratio(&big(0), &big(7), 12), "0");
        assert_eq!(render_ratio(&big(1), &big(1000), 3), "0.00100");
        assert_eq!(render_ratio(&big(123456), &big(1), 3), "123000");
        assert_eq!(render_ratio(&big(999999), &big(1000000), 3), "1.00");
        assert_eq!(render_ratio(&big(81), &big(1296), 12), "0.0625000000000");
    }

    #[test]
    fn eps2_n_table_for_l4() {
        let t = ratio_eps2_n(4, &[2, 5, 10]).unwrap();
        let ratios: Vec<&str> = t.rows.iter().map(|r| r.ratio.as_str()).collect();
        assert_eq!(
            ratios,
            ["0.750000000000", "0.960000000000", "0.990000000000"]
        );
        assert!(t.monotone && !t.flagged);
        let t = ratio_eps2_n(5, &[10]).unwrap();
        assert_eq!(t.rows[0].ratio, "0.990000000000");
        assert_eq!(ratio_eps2_n(9, &[2]), Err(Error::DeltaUndefined(9)));
    }

    #[test]
    fn eps1_l_table() {
        let t = ratio_eps1_l(2, &[2, 4, 6, 8]).unwrap();
        let nums: Vec<BigUint> = t.rows.iter().map(|r| r.numerator.clone()).collect();
        assert_eq!(nums[..3], [big(4), big(42), big(432)]);
        assert_eq!(t.rows[0].ratio, "0.500000000000");
        assert!(t.rows.iter().all(|r| r.verdict == Some(true)));
        assert!(t.monotone);
        let t = ratio_eps1_l(3, &[6]).unwrap();
        assert_eq!(
            t.rows[0].numerator,
            big(27) * count_primitive(3, 6).unwrap()
        );
        assert_eq!(t.rows[0].denominator, big(19683));
        assert_eq!(ratio_eps1_l(2, &[2, 3]), Err(Error::OddInTable(3)));
    }

    #[test]
    fn bound_examples() {
        let t = check_eps2_bound(2, &[4, 9, 20]).unwrap();
        assert_eq!(t.rows[0].numerator, big(1296));
        assert_eq!(t.rows[0].denominator, big(65536));
        assert_eq!(t.rows[1].numerator, big(0));
        assert!(t.rows.iter().all(|r| r.verdict == Some(true)));
        assert!(!t.flagged);
    }

    #[test]
    fn prime_product_examples() {
        let t = prime_product_table(2, &[3, 4]).unwrap();
        let expected = big(1 << 21) + big(1 << 15) + big(2) - big(1 << 7) - big(1 << 5) - big(8);
        assert_eq!(t.rows[0].numerator, expected);
        let via_pi = count_primitive(2, 21).unwrap()
            + count_primitive(2, 15).unwrap()
            + count_primitive(2, 3).unwrap();
        assert_eq!(t.rows[0].numerator, via_pi);
        assert_eq!(t.rows[0].denominator, big((1 << 21) + (1 << 15)));
        assert_eq!(delta(77), Some(7));
        assert!(t.rows.iter().all(|r| r.verdict == Some(true)));
        assert_eq!(
            prime_product_table(2, &[2]),
            Err(Error::PrimeIndexTooSmall(2))
        );
    }

    #[test]
    fn l4_deviation_exact() {
        for n in 2..=100 {
            assert!(eps2_l4_deviation_is_inverse_square(n).unwrap());
        }
    }

    #[test]
    fn bounded_delta_ratio_approaches_one() {
        let t = ratio_eps2_l(2, &[4, 8, 16, 32]).unwrap();
        assert!(t.monotone, "{:?}", t.rows);
    }

    #[test]
    fn csv_columns() {
        let t = check_eps2_bound(2, &[4]).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("parameter,numerator,denominator,ratio,verdict\n"));
        assert!(csv.contains("4,1296,65536,0.0197753906250,pass"));
    }
}
