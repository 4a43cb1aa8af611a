//! Exhaustive checks of the classical word lemmas at small bounds.
//!
//! Every checker scans its whole domain and reports the number of cases
//! examined together with the first counterexample in enumeration order.

use std::fmt;

use serde::Serialize;

use crate::pairs::{xq_nonprimitive_filter, SParity};
use crate::parallel;
use crate::word::{all_words, conjugacy_witness, is_primitive_slice, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub cases: u64,
    pub counterexample: Option<String>,
}

impl PropertyCheck {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for PropertyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "{}: {} cases, ok", self.name, self.cases),
            Some(c) => write!(f, "{}: counterexample {c}", self.name),
        }
    }
}

fn scan<T, F>(name: &'static str, items: &[T], f: F) -> PropertyCheck
where
    T: Sync,
    F: Fn(&T) -> (u64, Option<String>) + Sync + Send,
{
    let parts = parallel::map(items, f);
    PropertyCheck {
        name,
        cases: parts.iter().map(|(c, _)| c).sum(),
        counterexample: parts.into_iter().find_map(|(_, c)| c),
    }
}

fn words_between(n: u32, min: usize, max: usize) -> Vec<Word> {
    (min..=max).flat_map(|k| all_words(n, k)).collect()
}

fn primitive_between(n: u32, min: usize, max: usize) -> Vec<Word> {
    words_between(n, min, max)
        .into_iter()
        .filter(|w| is_primitive_slice(w.letters()))
        .collect()
}

fn prim(w: &Word) -> bool {
    is_primitive_slice(w.letters())
}

/// `uv = vu` exactly when `u, v ∈ w⁺` for the word returned by `commute`.
pub fn check_commute(n: u32, max_len: usize) -> PropertyCheck {
    let words = words_between(n, 1, max_len);
    scan("commute", &words, |u| {
        let mut cases = 0;
        for v in &words {
            cases += 1;
            let commutes = u.concat(v) == v.concat(u);
            let ok = match u.commute(v) {
                None => !commutes,
                Some(w) => {
                    commutes
                        && prim(&w)
                        && u.len() % w.len() == 0
                        && v.len() % w.len() == 0
                        && w.repeat(u.len() / w.len()) == *u
                        && w.repeat(v.len() / w.len()) == *v
                }
            };
            if !ok {
                return (cases, Some(format!("u={u} v={v}")));
            }
        }
        (cases, None)
    })
}

/// Root and exponent reproduce the word, and primitivity means exponent 1.
pub fn check_root_round_trip(n: u32, max_len: usize) -> PropertyCheck {
    let words = words_between(n, 1, max_len);
    scan("root_round_trip", &words, |u| {
        let ok = match u.primitive_root() {
            Ok(d) => {
                prim(&d.root) && d.expand() == *u && u.is_primitive().ok() == Some(d.exponent == 1)
            }
            Err(_) => false,
        };
        (1, (!ok).then(|| format!("u={u}")))
    })
}

/// `Σ_{d | l} #{length-d words with root length d} = n^l` for `1 <= l <= max_len`.
pub fn check_fundamental_identity(n: u32, max_len: usize) -> PropertyCheck {
    let lengths: Vec<usize> = (1..=max_len).collect();
    let primitive_counts =
        parallel::map(&lengths, |&k| all_words(n, k).filter(prim).count() as u64);
    let mut counterexample = None;
    for l in 1..=max_len {
        let sum: u64 = (1..=l)
            .filter(|d| l % d == 0)
            .map(|d| primitive_counts[d - 1])
            .sum();
        if sum != (n as u64).pow(l as u32) {
            counterexample = Some(format!("n={n} l={l} sum={sum}"));
            break;
        }
    }
    PropertyCheck {
        name: "fundamental_identity",
        cases: max_len as u64,
        counterexample,
    }
}

/// For every `t`, `u` and the forced `v` with `tu = uv`, `t != v`, the witness
/// reconstructs all three words with `pq` primitive.
pub fn check_conjugacy(n: u32, max_t: usize, max_u: usize) -> PropertyCheck {
    let ts = words_between(n, 1, max_t);
    let us = words_between(n, 1, max_u);
    scan("conjugacy_reconstruction", &ts, |t| {
        let mut cases = 0;
        for u in &us {
            let tu = t.concat(u);
            let v = tu.suffix(t.len());
            if u.concat(&v) != tu || v == *t {
                continue;
            }
            cases += 1;
            let ok = match conjugacy_witness(t, &v, u) {
                Ok(c) => {
                    let pq = c.p.concat(&c.q);
                    prim(&pq)
                        && c.m >= 1
                        && pq.repeat(c.m) == *t
                        && c.q.concat(&c.p).repeat(c.m) == v
                        && pq.repeat(c.j).concat(&c.p) == *u
                }
                Err(_) => false,
            };
            if !ok {
                return (cases, Some(format!("t={t} u={u} v={v}")));
            }
        }
        (cases, None)
    })
}

/// `u ∉ q⁺`, `uq^m = g^k` with `g`, `q` primitive forces `g != q` and
/// `|g| > |q^{m-1}|`.
pub fn check_power_suffix(n: u32, max_u: usize, max_q: usize, max_m: usize) -> PropertyCheck {
    let us = words_between(n, 1, max_u);
    let qs = primitive_between(n, 1, max_q);
    scan("power_suffix", &us, |u| {
        let mut cases = 0;
        for q in &qs {
            if u.len() % q.len() == 0 && q.repeat(u.len() / q.len()) == *u {
                continue;
            }
            for m in 1..=max_m {
                cases += 1;
                let g = u
                    .concat(&q.repeat(m))
                    .primitive_root()
                    .expect("nonempty")
                    .root;
                if g == *q || g.len() <= (m - 1) * q.len() {
                    return (cases, Some(format!("u={u} q={q} m={m} g={g}")));
                }
            }
        }
        (cases, None)
    })
}

/// For distinct primitive `p`, `q`, at most one of `p^i q^j` (`1 <= i, j <= 3`)
/// is non-primitive, and when `|p| = |q|` only `pq` can be.
pub fn check_two_primitive_powers(n: u32, max_len: usize) -> PropertyCheck {
    let words = primitive_between(n, 1, max_len);
    scan("two_primitive_powers", &words, |p| {
        let mut cases = 0;
        for q in words.iter().filter(|q| *q != p) {
            cases += 1;
            let mut bad = Vec::new();
            for i in 1..=3 {
                for j in 1..=3 {
                    if !prim(&p.repeat(i).concat(&q.repeat(j))) {
                        bad.push((i, j));
                    }
                }
            }
            let equal_len_ok = p.len() != q.len() || bad.iter().all(|&b| b == (1, 1));
            if bad.len() > 1 || !equal_len_ok {
                return (cases, Some(format!("p={p} q={q} non-primitive at {bad:?}")));
            }
        }
        (cases, None)
    })
}

/// For `x != y` with `|x| = |y| <= |u|/2`, one of `ux`, `uy` is primitive.
/// Equivalently, at most one `x` of each length makes `ux` non-primitive.
pub fn check_extension_pair(n: u32, max_u: usize) -> PropertyCheck {
    let us = words_between(n, 1, max_u);
    scan("extension_pair", &us, |u| {
        let mut cases = 0;
        for k in 1..=u.len() / 2 {
            let mut bad: Option<Word> = None;
            for x in all_words(n, k) {
                cases += 1;
                if prim(&u.concat(&x)) {
                    continue;
                }
                if let Some(y) = &bad {
                    return (cases, Some(format!("u={u} x={y} y={x}")));
                }
                bad = Some(x);
            }
        }
        (cases, None)
    })
}

/// For primitive `q` and a nonempty proper prefix `x`, `q^k x` is primitive;
/// likewise `x q^k` for a proper suffix. Checked for `k ∈ {2, 3}`.
pub fn check_prefix_suffix(n: u32, max_q: usize) -> PropertyCheck {
    let qs = primitive_between(n, 1, max_q);
    scan("prefix_suffix", &qs, |q| {
        let mut cases = 0;
        for len in 1..q.len() {
            let (x, y) = (q.prefix(len), q.suffix(len));
            for k in 2..=3 {
                cases += 2;
                if !prim(&q.repeat(k).concat(&x)) {
                    return (cases, Some(format!("q={q} prefix={x} k={k}")));
                }
                if !prim(&y.concat(&q.repeat(k))) {
                    return (cases, Some(format!("q={q} suffix={y} k={k}")));
                }
            }
        }
        (cases, None)
    })
}

/// For distinct primitive `p`, `q` with `|p| = r|q|`, `r ∈ {2, 3}`:
/// `pq^m` is primitive for `r <= m <= r + 2` and `p^m q` for `m ∈ {2, 3}`.
pub fn check_multiple_length(n: u32, max_q: usize) -> PropertyCheck {
    let qs = primitive_between(n, 1, max_q);
    scan("multiple_length", &qs, |q| {
        let mut cases = 0;
        for r in 2..=3usize {
            for p in all_words(n, r * q.len()).filter(|p| prim(p) && p != q) {
                for m in r..=r + 2 {
                    cases += 1;
                    if !prim(&p.concat(&q.repeat(m))) {
                        return (cases, Some(format!("p={p} q={q} pq^{m}")));
                    }
                }
                for m in 2..=3 {
                    cases += 1;
                    if !prim(&p.repeat(m).concat(q)) {
                        return (cases, Some(format!("p={p} q={q} p^{m}q")));
                    }
                }
            }
        }
        (cases, None)
    })
}

/// Both directions of the `xq` characterization for `|q| <= max_q`:
/// the filter fires exactly when `xq` is non-primitive, and every
/// `(α, β, s)` form in range produces a pair the filter recognizes.
pub fn check_xq_filter(n: u32, max_q: usize) -> PropertyCheck {
    let qs: Vec<Word> = primitive_between(n, 2, max_q)
        .into_iter()
        .filter(|q| q.len() % 2 == 0)
        .collect();
    let forward = scan("xq_filter", &qs, |q| {
        let mut cases = 0;
        for x in all_words(n, q.len() / 2) {
            cases += 1;
            let xq_primitive = prim(&x.concat(q));
            let ok = match xq_nonprimitive_filter(&x, q) {
                Ok(None) => xq_primitive,
                Ok(Some(d)) => {
                    let ab = d.alpha.concat(&d.beta);
                    let lengths = match d.parity {
                        SParity::Odd => d.s % 2 == 1 && d.beta.len() == 2 * d.alpha.len(),
                        SParity::Even => d.s % 2 == 0 && d.alpha.len() == 2 * d.beta.len(),
                    };
                    !xq_primitive && prim(&ab) && lengths
                }
                Err(_) => false,
            };
            if !ok {
                return (cases, Some(format!("x={x} q={q}")));
            }
        }
        (cases, None)
    });
    if !forward.passed() {
        return forward;
    }

    let mut cases = forward.cases;
    for unit in 1..=max_q {
        for (parity, alpha_len, beta_len) in [
            (SParity::Odd, unit, 2 * unit),
            (SParity::Even, 2 * unit, unit),
        ] {
            let per_s = alpha_len + beta_len;
            for s in 1.. {
                let q_len = s * per_s + alpha_len;
                if q_len > max_q {
                    break;
                }
                if (parity == SParity::Odd) != (s % 2 == 1) {
                    continue;
                }
                for alpha in all_words(n, alpha_len) {
                    for beta in all_words(n, beta_len) {
                        if !prim(&alpha.concat(&beta)) {
                            continue;
                        }
                        cases += 1;
                        let ba = beta.concat(&alpha);
                        let q = alpha.concat(&beta).repeat(s).concat(&alpha);
                        let (x, p) = match parity {
                            SParity::Odd => (
                                ba.repeat((s - 1) / 2).concat(&beta),
                                ba.repeat(2 * s).concat(&beta),
                            ),
                            SParity::Even => (
                                ba.repeat(s / 2).concat(&beta),
                                ba.repeat(2 * s + 1).concat(&beta),
                            ),
                        };
                        let recognized = matches!(
                            xq_nonprimitive_filter(&x, &q),
                            Ok(Some(ref d)) if d.alpha == alpha && d.beta == beta && d.s == s && d.parity == parity
                        );
                        let ok = recognized && prim(&p) && prim(&q) && x.concat(&q).concat(&x) == p;
                        if !ok {
                            return PropertyCheck {
                                name: "xq_filter",
                                cases,
                                counterexample: Some(format!("alpha={alpha} beta={beta} s={s}")),
                            };
                        }
                    }
                }
            }
        }
    }
    PropertyCheck {
        name: "xq_filter",
        cases,
        counterexample: None,
    }
}

/// The full suite at the default bounds.
pub fn run_suite() -> Vec<PropertyCheck> {
    vec![
        check_commute(2, 6),
        check_root_round_trip(2, 12),
        check_root_round_trip(3, 8),
        check_fundamental_identity(2, 12),
        check_fundamental_identity(3, 12),
        check_conjugacy(2, 5, 6),
        check_power_suffix(2, 5, 4, 3),
        check_two_primitive_powers(2, 4),
        check_extension_pair(2, 8),
        check_prefix_suffix(2, 5),
        check_multiple_length(2, 3),
        check_xq_filter(2, 10),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bounds_pass() {
        for check in [
            check_commute(2, 4),
            check_root_round_trip(3, 5),
            check_fundamental_identity(2, 8),
            check_conjugacy(2, 3, 4),
            check_power_suffix(2, 3, 3, 3),
            check_two_primitive_powers(2, 3),
            check_extension_pair(2, 6),
            check_prefix_suffix(2, 4),
            check_multiple_length(2, 2),
            check_xq_filter(2, 8),
        ] {
            assert!(check.passed(), "{check}");
            assert!(check.cases > 0, "{check}");
        }
    }

    #[test]
    fn suite_is_nonvacuous() {
        let xq = check_xq_filter(2, 10);
        assert!(xq.passed(), "{xq}");
        // 2^5 prefixes against each primitive q of length 10 dominate the count
        assert!(xq.cases > 30_000);
        assert_eq!(check_fundamental_identity(2, 1).cases, 1);
    }

    #[test]
    fn scan_reports_first_failure() {
        let items = [1, 2, 3, 4];
        let check = scan("demo", &items, |&i| {
            (1, (i % 2 == 0).then(|| i.to_string()))
        });
        assert_eq!(check.cases, 4);
        assert_eq!(check.counterexample.as_deref(), Some("2"));
    }
}
