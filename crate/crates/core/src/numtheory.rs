//! Exact integer support: Möbius function, divisors, the divisor families
//! `Λ`, `Λ⁺`, `Λ⁻`, the atom-set families `Γ₁`/`Γ₂`, and `π_n(l)`, the number of
//! primitive words of length `l` over `n` letters.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub type BigCount = BigUint;

/// Primes are sieved up to this bound once per process.
pub const SIEVE_LIMIT: u64 = 1_000_000;
/// Largest integer factorizable by trial division over the sieve.
pub const FACTOR_LIMIT: u64 = SIEVE_LIMIT * SIEVE_LIMIT;

fn sieve() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = SIEVE_LIMIT as usize;
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
        primes
    })
}

pub fn is_prime(n: u64) -> Result<bool> {
    if n <= SIEVE_LIMIT {
        return Ok(sieve().binary_search(&n).is_ok());
    }
    let f = factorize(n)?;
    Ok(f.pairs.len() == 1 && f.pairs[0].1 == 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    /// `(prime, multiplicity)`, ascending by prime.
    pub pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.pairs.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn primes(&self) -> Vec<u64> {
        self.pairs.iter().map(|&(p, _)| p).collect()
    }

    pub fn multiplicity(&self, prime: u64) -> u32 {
        self.pairs
            .iter()
            .find(|&&(p, _)| p == prime)
            .map_or(0, |&(_, e)| e)
    }
}

pub fn factorize(l: u64) -> Result<Factorization> {
    if l == 0 {
        return Err(Error::InvalidArgument("cannot factorize 0".into()));
    }
    if l > FACTOR_LIMIT {
        return Err(Error::OutOfRange {
            value: l,
            limit: FACTOR_LIMIT,
        });
    }
    let mut rest = l;
    let mut pairs = Vec::new();
    for &p in sieve() {
        if p * p > rest {
            break;
        }
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            pairs.push((p, e));
        }
    }
    if rest > 1 {
        pairs.push((rest, 1));
    }
    Ok(Factorization { pairs })
}

pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::InvalidArgument("mobius(0) is undefined".into()));
    }
    let f = factorize(n)?;
    if f.pairs.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.pairs.len() % 2 == 0 { 1 } else { -1 })
}

/// All positive divisors of `l`, ascending.
pub fn divisors(l: u64) -> Vec<u64> {
    if l == 0 {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= l {
        if l.is_multiple_of(d) {
            small.push(d);
            if d * d != l {
                large.push(l / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `Λ(l) = {d | l : d >= 4, 3 ∤ d}` with its even and odd parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaSets {
    pub all: Vec<u64>,
    pub even: Vec<u64>,
    pub odd: Vec<u64>,
}

pub fn lambda_sets(l: u64) -> LambdaSets {
    let all: Vec<u64> = divisors(l)
        .into_iter()
        .filter(|&d| d >= 4 && d % 3 != 0)
        .collect();
    let (even, odd) = all.iter().partition(|&&d| d % 2 == 0);
    LambdaSets { all, even, odd }
}

/// `l = 3^m · 2^s · rest` with `gcd(6, rest) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SixSplit {
    pub threes: u32,
    pub twos: u32,
    pub rest: u64,
}

pub fn six_split(l: u64) -> SixSplit {
    let mut rest = l;
    let mut threes = 0;
    while rest > 0 && rest.is_multiple_of(3) {
        rest /= 3;
        threes += 1;
    }
    let mut twos = 0;
    while rest > 0 && rest.is_multiple_of(2) {
        rest /= 2;
        twos += 1;
    }
    SixSplit { threes, twos, rest }
}

/// A finite set of atoms; its product `𝔭(L)` multiplies them as-is
/// (the atom `4` is kept as a literal).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AtomSet(pub Vec<u64>);

impl AtomSet {
    pub fn product(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, atom: u64) -> bool {
        self.0.contains(&atom)
    }
}

/// All subsets of `atoms` (which must be ascending), ordered by size then
/// lexicographically.
pub fn subsets(atoms: &[u64]) -> Vec<AtomSet> {
    assert!(atoms.len() < 64);
    let mut out: Vec<AtomSet> = (0u64..1 << atoms.len())
        .map(|mask| {
            AtomSet(
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &a)| a)
                    .collect(),
            )
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaFamily {
    /// `s >= 2`: subsets of `{3, 4} ∪ 𝔭𝔣(l₁)`.
    Gamma1,
    /// `s <= 1`: subsets of `{3} ∪ 𝔭𝔣(l₁)`.
    Gamma2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaSets {
    pub family: GammaFamily,
    pub sets: Vec<AtomSet>,
}

fn gamma_from_atoms(mut atoms: Vec<u64>) -> Vec<AtomSet> {
    atoms.sort_unstable();
    atoms.dedup();
    subsets(&atoms)
        .into_iter()
        .filter(|set| !set.is_empty() && set.0 != [3])
        .collect()
}

/// `Γ₂(l)` regardless of the power of two in `l`.
pub fn gamma2(l: u64) -> Result<Vec<AtomSet>> {
    let split = six_split(l);
    let mut atoms = factorize(split.rest)?.primes();
    atoms.push(3);
    Ok(gamma_from_atoms(atoms))
}

pub fn gamma_sets(l: u64) -> Result<GammaSets> {
    let split = six_split(l);
    let mut atoms = factorize(split.rest)?.primes();
    atoms.push(3);
    let family = if split.twos >= 2 {
        atoms.push(4);
        GammaFamily::Gamma1
    } else {
        GammaFamily::Gamma2
    };
    Ok(GammaSets {
        family,
        sets: gamma_from_atoms(atoms),
    })
}

pub fn big_pow(n: u64, exponent: u64) -> BigUint {
    let e = u32::try_from(exponent).expect("exponent exceeds u32");
    BigUint::from(n).pow(e)
}

pub(crate) fn check_alphabet(n: u64) -> Result<()> {
    if n < 2 {
        Err(Error::AlphabetTooSmall(n))
    } else {
        Ok(())
    }
}

pub(crate) fn to_count(value: BigInt) -> BigCount {
    assert!(!value.is_negative(), "negative count {value}");
    value.magnitude().clone()
}

/// `π_n(l) = Σ_{d | l} μ(d) n^{l/d}`.
pub fn count_primitive(n: u64, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    if l == 0 {
        return Err(Error::InvalidArgument("length must be >= 1".into()));
    }
    let mut total = BigInt::zero();
    for d in divisors(l) {
        match mobius(d)? {
            1 => total += BigInt::from(big_pow(n, l / d)),
            -1 => total -= BigInt::from(big_pow(n, l / d)),
            _ => {}
        }
    }
    Ok(to_count(total))
}

fn check_prime_coprime(r: u64, l: u64) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be >= 1".into()));
    }
    if !is_prime(r)? {
        return Err(Error::NotPrime(r));
    }
    if l.gcd(&r) != 1 {
        return Err(Error::NotCoprime { l, r });
    }
    Ok(())
}

/// `Σ_{d | l} μ(d) (n^{r^{m+1} l / d} - n^{r^m l / d})`, which equals
/// `π_n(r^{m+1} l)` for prime `r` coprime to `l`.
pub fn pi_prime_power_lift(n: u64, r: u64, m: u32, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    check_prime_coprime(r, l)?;
    let low = r.pow(m) * l;
    let high = low * r;
    let mut total = BigInt::zero();
    for d in divisors(l) {
        let term = BigInt::from(big_pow(n, high / d)) - BigInt::from(big_pow(n, low / d));
        match mobius(d)? {
            1 => total += term,
            -1 => total -= term,
            _ => {}
        }
    }
    Ok(to_count(total))
}

/// `n^{r^{m+1} l} - n^{r^m l}`, which equals `Σ_{d | l} π_n(r^{m+1} l / d)`.
pub fn pi_prime_power_divisor_sum(n: u64, r: u64, m: u32, l: u64) -> Result<BigCount> {
    check_alphabet(n)?;
    check_prime_coprime(r, l)?;
    let low = r.pow(m) * l;
    Ok(big_pow(n, low * r) - big_pow(n, low))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeGap {
    pub prime: u64,
    pub next_prime: u64,
    pub gap: u64,
}

/// The `k`-th prime (`p₁ = 2`), its successor and their gap.
pub fn primes_and_gaps(k: u64) -> Result<PrimeGap> {
    if k == 0 {
        return Err(Error::InvalidArgument("prime index starts at 1".into()));
    }
    let primes = sieve();
    let idx = usize::try_from(k).map_err(|_| Error::PrimeIndexOutOfRange(k))?;
    match (primes.get(idx - 1), primes.get(idx)) {
        (Some(&p), Some(&next)) => Ok(PrimeGap {
            prime: p,
            next_prime: next,
            gap: next - p,
        }),
        _ => Err(Error::PrimeIndexOutOfRange(k)),
    }
}

/// Distinct prime factors of `l₁` (the part of `l` coprime to 6).
pub fn omega(l: u64) -> Result<usize> {
    Ok(factorize(l)?.pairs.len())
}
