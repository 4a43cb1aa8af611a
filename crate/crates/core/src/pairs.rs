//! Pairs `(p, q)` of primitive words with `|p| = 2|q|` and `pq` non-primitive.
//!
//! Every such pair has one of three normal forms:
//!
//! * case I: `p = xqx` with `|q| = 2|x|` and `xq` primitive (`pq = (xq)²`);
//! * case II: `p = (βα)^{2s}β`, `q = (αβ)^s α`, `|β| = 2|α|` (`pq = (βα)^{3s+1}`);
//! * case III: `p = (βα)^{2s+1}β`, `q = (αβ)^s α`, `|α| = 2|β|` (`pq = (βα)^{3s+2}`);
//!
//! with `αβ` primitive and `s >= 1`. Case I is the set `E₁` (`|√(pq)| > |q|`),
//! cases II and III form `E₂` (`|√(pq)| < |q|`).

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, PairRequirement, Result};
use crate::numtheory::{big_pow, lambda_sets};
use crate::parallel;
use crate::word::{all_words, is_primitive_slice, root_length, Word};

/// Default cap on the number of words or pairs an enumeration may materialize.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairWitness {
    pub p: Word,
    pub q: Word,
    pub case: Case,
    pub x: Option<Word>,
    pub alpha: Option<Word>,
    pub beta: Option<Word>,
    pub s: Option<usize>,
    /// `√(pq)`
    pub root: Word,
    /// `k` with `pq = root^k`
    pub exponent: usize,
}

/// Flat JSON shape of a witness; words are rendered as text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub p: String,
    pub q: String,
    pub case: Case,
    pub x: Option<String>,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub s: Option<usize>,
    pub root: String,
    pub k: usize,
}

fn alpha_beta_forms(alpha: &Word, beta: &Word, s: usize, case: Case) -> (Word, Word) {
    let ba = beta.concat(alpha);
    let p_reps = match case {
        Case::II => 2 * s,
        _ => 2 * s + 1,
    };
    let p = ba.repeat(p_reps).concat(beta);
    let q = alpha.concat(beta).repeat(s).concat(alpha);
    (p, q)
}

impl PairWitness {
    /// Rebuilds `(p, q)` from the case data alone.
    pub fn expand(&self) -> (Word, Word) {
        match self.case {
            Case::I => {
                let x = self.x.as_ref().expect("case I carries x");
                let q = self.root.suffix(self.root.len() - x.len());
                (x.concat(&q).concat(x), q)
            }
            case => alpha_beta_forms(
                self.alpha.as_ref().expect("alpha"),
                self.beta.as_ref().expect("beta"),
                self.s.expect("s"),
                case,
            ),
        }
    }

    /// Checks every structural invariant of the witness.
    pub fn verify(&self) -> Result<()> {
        let fail = |msg: String| {
            Err(Error::TrichotomyViolated(format!(
                "({}, {}): {msg}",
                self.p, self.q
            )))
        };
        if !is_primitive_slice(self.p.letters()) || !is_primitive_slice(self.q.letters()) {
            return fail("p or q not primitive".into());
        }
        if self.p.len() != 2 * self.q.len() {
            return fail("|p| != 2|q|".into());
        }
        if self.exponent < 2
            || !is_primitive_slice(self.root.letters())
            || self.root.repeat(self.exponent) != self.p.concat(&self.q)
        {
            return fail(format!("pq != {}^{}", self.root, self.exponent));
        }
        if self.expand() != (self.p.clone(), self.q.clone()) {
            return fail("case data does not reproduce the pair".into());
        }
        match self.case {
            Case::I => {
                let x = self.x.as_ref().expect("x");
                if self.exponent != 2 || self.q.len() != 2 * x.len() {
                    return fail("case I requires k = 2 and |q| = 2|x|".into());
                }
                if !is_primitive_slice(x.concat(&self.q).letters()) {
                    return fail("xq not primitive".into());
                }
            }
            case => {
                let alpha = self.alpha.as_ref().expect("alpha");
                let beta = self.beta.as_ref().expect("beta");
                let s = self.s.expect("s");
                let (long, short, k) = match case {
                    Case::II => (beta, alpha, 3 * s + 1),
                    _ => (alpha, beta, 3 * s + 2),
                };
                if s == 0 || short.is_empty() || long.len() != 2 * short.len() {
                    return fail("length relation between alpha and beta".into());
                }
                if !is_primitive_slice(alpha.concat(beta).letters()) {
                    return fail("alpha beta not primitive".into());
                }
                if self.exponent != k {
                    return fail(format!("exponent {} != {k}", self.exponent));
                }
                let l = self.q.len() as u64;
                if !lambda_sets(l).all.contains(&(k as u64)) {
                    return fail(format!("k = {k} not in Lambda({l})"));
                }
            }
        }
        Ok(())
    }

    pub fn to_record(&self) -> WitnessRecord {
        let render = |w: &Option<Word>| w.as_ref().map(Word::to_string);
        WitnessRecord {
            p: self.p.to_string(),
            q: self.q.to_string(),
            case: self.case,
            x: render(&self.x),
            alpha: render(&self.alpha),
            beta: render(&self.beta),
            s: self.s,
            root: self.root.to_string(),
            k: self.exponent,
        }
    }

    pub fn pair(&self) -> (Word, Word) {
        (self.p.clone(), self.q.clone())
    }
}

fn check_budget(required: BigUint, budget: u64) -> Result<()> {
    if required > BigUint::from(budget) {
        Err(Error::BudgetExceeded {
            required: required.to_string(),
            budget,
        })
    } else {
        Ok(())
    }
}

fn alphabet_u32(n: u64) -> Result<u32> {
    if n < 2 {
        return Err(Error::AlphabetTooSmall(n));
    }
    u32::try_from(n).map_err(|_| Error::InvalidArgument(format!("alphabet size {n} too large")))
}

/// All primitive words of length `k`, in lexicographic order.
pub fn enumerate_primitive(n: u64, k: usize, budget: u64) -> Result<Vec<Word>> {
    let alphabet = alphabet_u32(n)?;
    if k == 0 {
        return Err(Error::InvalidArgument("length must be >= 1".into()));
    }
    check_budget(big_pow(n, k as u64), budget)?;
    Ok(all_words(alphabet, k)
        .filter(|w| is_primitive_slice(w.letters()))
        .collect())
}

/// The exhaustive split of `E(A, l)` into `E₁` and `E₂`, each sorted by `(p, q)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleSets {
    pub e1: Vec<(Word, Word)>,
    pub e2: Vec<(Word, Word)>,
}

enum Verdict {
    Primitive,
    E1,
    E2,
    RootEqualsQ,
}

fn judge(p: &Word, q: &Word, buf: &mut Vec<u32>) -> Verdict {
    buf.clear();
    buf.extend_from_slice(p.letters());
    buf.extend_from_slice(q.letters());
    let r = root_length(buf);
    if r == buf.len() {
        Verdict::Primitive
    } else if r > q.len() {
        Verdict::E1
    } else if r < q.len() {
        Verdict::E2
    } else {
        Verdict::RootEqualsQ
    }
}

fn oracle_scan<R, F>(n: u64, l: usize, budget: u64, per_p: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&Word, &[Word], &mut Vec<u32>) -> std::result::Result<R, (Word, Word)> + Sync + Send,
{
    if l == 0 {
        return Err(Error::InvalidArgument("l must be >= 1".into()));
    }
    check_budget(big_pow(n, 3 * l as u64), budget)?;
    let ps = enumerate_primitive(n, 2 * l, u64::MAX)?;
    let qs = enumerate_primitive(n, l, u64::MAX)?;
    let results = parallel::map(&ps, |p| {
        let mut buf = Vec::with_capacity(3 * l);
        per_p(p, &qs, &mut buf)
    });
    results
        .into_iter()
        .map(|r| {
            r.map_err(|(p, q)| {
                Error::TrichotomyViolated(format!(
                    "|root(pq)| = |q| for p = {p}, q = {q}; k = 3 cannot occur"
                ))
            })
        })
        .collect()
}

/// Brute-force oracle: tests every `p ∈ Q_{2l}`, `q ∈ Q_l`.
pub fn oracle_enumerate_e(n: u64, l: usize, budget: u64) -> Result<OracleSets> {
    let shards = oracle_scan(n, l, budget, |p, qs, buf| {
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        for q in qs {
            match judge(p, q, buf) {
                Verdict::Primitive => {}
                Verdict::E1 => e1.push((p.clone(), q.clone())),
                Verdict::E2 => e2.push((p.clone(), q.clone())),
                Verdict::RootEqualsQ => return Err((p.clone(), q.clone())),
            }
        }
        Ok((e1, e2))
    })?;
    let mut sets = OracleSets::default();
    for (e1, e2) in shards {
        sets.e1.extend(e1);
        sets.e2.extend(e2);
    }
    Ok(sets)
}

/// `(|E₁|, |E₂|)` by the same exhaustive scan, without materializing pairs.
pub fn oracle_counts(n: u64, l: usize, budget: u64) -> Result<(u64, u64)> {
    let shards = oracle_scan(n, l, budget, |p, qs, buf| {
        let mut counts = (0u64, 0u64);
        for q in qs {
            match judge(p, q, buf) {
                Verdict::Primitive => {}
                Verdict::E1 => counts.0 += 1,
                Verdict::E2 => counts.1 += 1,
                Verdict::RootEqualsQ => return Err((p.clone(), q.clone())),
            }
        }
        Ok(counts)
    })?;
    Ok(shards
        .into_iter()
        .fold((0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1)))
}

/// Image of one primitive `u` of length `3l/d` under the `E₂` bijection.
fn phi(u: &Word, d: usize, l: usize) -> PairWitness {
    let (case, s, beta_len) = if d % 3 == 1 {
        (Case::II, (d - 1) / 3, 2 * l / d)
    } else {
        (Case::III, (d - 2) / 3, l / d)
    };
    let beta = u.prefix(beta_len);
    let alpha = u.suffix(u.len() - beta_len);
    let (p, q) = alpha_beta_forms(&alpha, &beta, s, case);
    PairWitness {
        p,
        q,
        case,
        x: None,
        alpha: Some(alpha),
        beta: Some(beta),
        s: Some(s),
        root: u.clone(),
        exponent: d,
    }
}

fn image_over(n: u64, l: usize, divisors: &[u64], budget: u64) -> Result<Vec<PairWitness>> {
    let required: BigUint = divisors.iter().map(|&d| big_pow(n, 3 * l as u64 / d)).sum();
    check_budget(required, budget)?;
    let mut out = Vec::new();
    for &d in divisors {
        let d = d as usize;
        let us = enumerate_primitive(n, 3 * l / d, u64::MAX)?;
        out.extend(parallel::map(&us, |u| phi(u, d, l)));
    }
    for w in &out {
        w.verify()?;
    }
    sort_unique(out)
}

fn sort_unique(mut out: Vec<PairWitness>) -> Result<Vec<PairWitness>> {
    out.sort_by(|a, b| (&a.p, &a.q).cmp(&(&b.p, &b.q)));
    if let Some(dup) = out
        .windows(2)
        .find(|w| w[0].p == w[1].p && w[0].q == w[1].q)
    {
        return Err(Error::TrichotomyViolated(format!(
            "duplicate pair ({}, {})",
            dup[0].p, dup[0].q
        )));
    }
    Ok(out)
}

/// Constructs `E₂(A, l)` as the image of `⋃_{d ∈ Λ(l)} Q_{3l/d}`, sorted by `(p, q)`.
pub fn construct_e2(n: u64, l: usize, budget: u64) -> Result<Vec<PairWitness>> {
    alphabet_u32(n)?;
    if l == 0 {
        return Err(Error::InvalidArgument("l must be >= 1".into()));
    }
    image_over(n, l, &lambda_sets(l as u64).all, budget)
}

/// The pairs `(xqx, q)` with `xq` non-primitive, generated directly from
/// `⋃_{d ∈ Λ⁺(l)} Q_{3l/d}`.
pub fn phi_exclusions(n: u64, l: usize, budget: u64) -> Result<Vec<PairWitness>> {
    alphabet_u32(n)?;
    if l % 2 == 1 {
        return Err(Error::OddLength(l as u64));
    }
    image_over(n, l, &lambda_sets(l as u64).even, budget)
}

fn e1_candidates(n: u64, l: usize, budget: u64) -> Result<(Vec<Word>, Vec<Word>)> {
    let alphabet = alphabet_u32(n)?;
    if l == 0 || l % 2 == 1 {
        return Err(Error::OddLength(l as u64));
    }
    check_budget(big_pow(n, (3 * l / 2) as u64), budget)?;
    let xs: Vec<Word> = all_words(alphabet, l / 2).collect();
    let qs = enumerate_primitive(n, l, u64::MAX)?;
    Ok((xs, qs))
}

fn case_one(x: &Word, q: &Word) -> PairWitness {
    let root = x.concat(q);
    PairWitness {
        p: root.concat(x),
        q: q.clone(),
        case: Case::I,
        x: Some(x.clone()),
        alpha: None,
        beta: None,
        s: None,
        root,
        exponent: 2,
    }
}

/// Constructs `E₁(A, l)`: all `(xqx, q)` with `|x| = l/2`, `q ∈ Q_l` and `xq`
/// primitive, sorted by `(p, q)`.
pub fn construct_e1(n: u64, l: usize, budget: u64) -> Result<Vec<PairWitness>> {
    let (xs, qs) = e1_candidates(n, l, budget)?;
    let out = parallel::flat_map(&qs, |q| {
        xs.iter()
            .filter(|x| is_primitive_slice(x.concat(q).letters()))
            .map(|x| case_one(x, q))
            .collect()
    });
    for w in &out {
        w.verify()?;
    }
    sort_unique(out)
}

/// The candidates `(xqx, q)` dropped by [`construct_e1`] because `xq` is not
/// primitive, sorted by `(p, q)`.
pub fn e1_filtered_out(n: u64, l: usize, budget: u64) -> Result<Vec<(Word, Word)>> {
    let (xs, qs) = e1_candidates(n, l, budget)?;
    let mut out = parallel::flat_map(&qs, |q| {
        xs.iter()
            .filter(|x| !is_primitive_slice(x.concat(q).letters()))
            .map(|x| (x.concat(q).concat(x), q.clone()))
            .collect()
    });
    out.sort();
    Ok(out)
}

/// Asserts that the directly filtered `E₁` exclusions coincide with the
/// generated image; returns the number of exclusions.
pub fn check_e1_exclusions(n: u64, l: usize, budget: u64) -> Result<usize> {
    let filtered = e1_filtered_out(n, l, budget)?;
    let generated: Vec<(Word, Word)> = phi_exclusions(n, l, budget)?
        .iter()
        .map(PairWitness::pair)
        .collect();
    if filtered != generated {
        return Err(Error::TrichotomyViolated(format!(
            "E1 exclusions differ: {} filtered vs {} generated",
            filtered.len(),
            generated.len()
        )));
    }
    Ok(filtered.len())
}

fn case_one_holds(p: &Word, q: &Word) -> bool {
    if !q.len().is_multiple_of(2) || q.is_empty() {
        return false;
    }
    let x = p.prefix(q.len() / 2);
    x.concat(q).concat(&x) == *p && is_primitive_slice(x.concat(q).letters())
}

/// Independent test of case II or III: searches every admissible `s`.
fn alpha_beta_case_holds(p: &Word, q: &Word, case: Case) -> bool {
    let shape = match case {
        Case::II => |s: usize| 3 * s + 1,
        _ => |s: usize| 3 * s + 2,
    };
    (1..=q.len()).any(|s| {
        let parts = shape(s);
        if !q.len().is_multiple_of(parts) {
            return false;
        }
        let unit = q.len() / parts;
        let (alpha_len, beta_len) = match case {
            Case::II => (unit, 2 * unit),
            _ => (2 * unit, unit),
        };
        let alpha = q.prefix(alpha_len);
        let beta = p.prefix(beta_len);
        is_primitive_slice(alpha.concat(&beta).letters())
            && alpha_beta_forms(&alpha, &beta, s, case) == (p.clone(), q.clone())
    })
}

/// Classifies a member of `E(A, l)` into its normal form.
pub fn classify_pair(p: &Word, q: &Word) -> Result<PairWitness> {
    if p.alphabet() != q.alphabet() {
        return Err(Error::AlphabetMismatch(p.alphabet(), q.alphabet()));
    }
    if !is_primitive_slice(p.letters()) {
        return Err(Error::PairPrecondition(PairRequirement::PNotPrimitive));
    }
    if !is_primitive_slice(q.letters()) {
        return Err(Error::PairPrecondition(PairRequirement::QNotPrimitive));
    }
    if p.len() != 2 * q.len() {
        return Err(Error::PairPrecondition(PairRequirement::WrongLengths));
    }
    let pq = p.concat(q);
    let decomposition = pq.primitive_root()?;
    let (root, k) = (decomposition.root, decomposition.exponent);
    if k == 1 {
        return Err(Error::PairPrecondition(PairRequirement::ProductPrimitive));
    }

    let holds = [
        case_one_holds(p, q),
        alpha_beta_case_holds(p, q, Case::II),
        alpha_beta_case_holds(p, q, Case::III),
    ];
    if holds.iter().filter(|&&h| h).count() != 1 {
        return Err(Error::TrichotomyViolated(format!(
            "({p}, {q}) satisfies cases {holds:?}"
        )));
    }

    let witness = if k == 2 {
        if !q.len().is_multiple_of(2) {
            return Err(Error::TrichotomyViolated(format!(
                "k = 2 with |q| odd for ({p}, {q})"
            )));
        }
        PairWitness {
            x: Some(p.prefix(q.len() / 2)),
            ..case_one(&p.prefix(q.len() / 2), q)
        }
    } else {
        let (case, s, beta_len) = match k % 3 {
            1 => (Case::II, (k - 1) / 3, 2 * root.len() / 3),
            2 => (Case::III, (k - 2) / 3, root.len() / 3),
            _ => {
                return Err(Error::TrichotomyViolated(format!(
                    "exponent {k} divisible by 3 for ({p}, {q})"
                )))
            }
        };
        PairWitness {
            p: p.clone(),
            q: q.clone(),
            case,
            x: None,
            alpha: Some(root.suffix(root.len() - beta_len)),
            beta: Some(root.prefix(beta_len)),
            s: Some(s),
            root,
            exponent: k,
        }
    };
    let expected = match witness.case {
        Case::I => 0,
        Case::II => 1,
        Case::III => 2,
    };
    if !holds[expected] {
        return Err(Error::TrichotomyViolated(format!(
            "root-based case {} disagrees with direct test for ({p}, {q})",
            witness.case
        )));
    }
    witness.verify()?;
    Ok(witness)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SParity {
    /// `s` odd, `|β| = 2|α|`, `x = (βα)^{(s-1)/2} β`
    Odd,
    /// `s` even, `|α| = 2|β|`, `x = (βα)^{s/2} β`
    Even,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XqDecomposition {
    pub alpha: Word,
    pub beta: Word,
    pub s: usize,
    pub parity: SParity,
}

/// For primitive `q` with `|q| = 2|x|`: if `xq` is non-primitive, the
/// decomposition that makes `(xqx, q)` a case II (odd `s`) or case III
/// (even `s`) pair.
pub fn xq_nonprimitive_filter(x: &Word, q: &Word) -> Result<Option<XqDecomposition>> {
    if x.is_empty() || q.len() != 2 * x.len() {
        return Err(Error::XqPrecondition("|q| != 2|x|"));
    }
    if !is_primitive_slice(q.letters()) {
        return Err(Error::XqPrecondition("q not primitive"));
    }
    let xq = x.concat(q);
    let decomposition = xq.primitive_root()?;
    if decomposition.exponent == 1 {
        return Ok(None);
    }
    let root = decomposition.root;
    let k = 2 * decomposition.exponent;
    let (s, parity, beta_len) = match k % 3 {
        1 => ((k - 1) / 3, SParity::Odd, 2 * root.len() / 3),
        2 => ((k - 2) / 3, SParity::Even, root.len() / 3),
        _ => {
            return Err(Error::TrichotomyViolated(format!(
                "xq = {xq} has exponent {} with 3 | 2j",
                decomposition.exponent
            )))
        }
    };
    let beta = root.prefix(beta_len);
    let alpha = root.suffix(root.len() - beta_len);
    let ba = beta.concat(&alpha);
    let x_expected = match parity {
        SParity::Odd if s % 2 == 1 => ba.repeat((s - 1) / 2).concat(&beta),
        SParity::Even if s % 2 == 0 => ba.repeat(s / 2).concat(&beta),
        _ => {
            return Err(Error::TrichotomyViolated(format!(
                "parity of s = {s} inconsistent for x = {x}, q = {q}"
            )))
        }
    };
    let q_expected = alpha.concat(&beta).repeat(s).concat(&alpha);
    if x_expected != *x || q_expected != *q {
        return Err(Error::TrichotomyViolated(format!(
            "xq decomposition does not reproduce x = {x}, q = {q}"
        )));
    }
    Ok(Some(XqDecomposition {
        alpha,
        beta,
        s,
        parity,
    }))
}
