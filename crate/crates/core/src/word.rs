//! Words over a finite alphabet `{0, .., n-1}`, primitivity and primitive roots.
//!
//! Primitivity uses the border array: a nonempty word `u` with smallest period
//! `π` is a proper power iff `π < |u|` and `π` divides `|u|`. The same pass
//! yields the primitive root (the prefix of length `π`).

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<u32>,
    alphabet: u32,
}

impl Word {
    pub fn new(letters: Vec<u32>, alphabet: u32) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::AlphabetTooSmall(alphabet as u64));
        }
        if let Some(&letter) = letters.iter().find(|&&c| c >= alphabet) {
            return Err(Error::LetterOutOfRange { letter, alphabet });
        }
        Ok(Word { letters, alphabet })
    }

    pub fn empty(alphabet: u32) -> Self {
        Word {
            letters: Vec::new(),
            alphabet,
        }
    }

    /// Callers guarantee every letter is below `alphabet`.
    pub(crate) fn from_raw(letters: Vec<u32>, alphabet: u32) -> Self {
        debug_assert!(letters.iter().all(|&c| c < alphabet));
        Word { letters, alphabet }
    }

    /// Parses `"aabab"` (lowercase letters, `n <= 26`) or `"[0,0,1,0,1]"`.
    pub fn parse(text: &str, alphabet: u32) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::AlphabetTooSmall(alphabet as u64));
        }
        let text = text.trim();
        let letters = if let Some(inner) = text.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse(format!("unterminated list {text:?}")))?;
            if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|tok| {
                        tok.trim()
                            .parse::<u32>()
                            .map_err(|e| Error::Parse(format!("{tok:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        } else {
            text.chars()
                .map(|ch| {
                    if ch.is_ascii_lowercase() {
                        Ok(ch as u32 - 'a' as u32)
                    } else {
                        Err(Error::Parse(format!("unexpected character {ch:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?
        };
        Word::new(letters, alphabet)
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word::from_raw(self.letters[..len].to_vec(), self.alphabet)
    }

    pub fn suffix(&self, len: usize) -> Word {
        Word::from_raw(self.letters[self.len() - len..].to_vec(), self.alphabet)
    }

    pub fn concat(&self, other: &Word) -> Word {
        debug_assert_eq!(self.alphabet, other.alphabet);
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Word::from_raw(letters, self.alphabet)
    }

    /// `self` concatenated `k` times.
    pub fn power(&self, k: usize) -> Result<Word> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        if k == 0 {
            return Err(Error::InvalidArgument("power exponent must be >= 1".into()));
        }
        Ok(self.repeat(k))
    }

    pub(crate) fn repeat(&self, k: usize) -> Word {
        Word::from_raw(self.letters.repeat(k), self.alphabet)
    }

    /// `border[i]` is the length of the longest proper border of `self[..=i]`.
    pub fn border_array(&self) -> Vec<usize> {
        border_array(&self.letters)
    }

    /// Smallest period; `0` for the empty word.
    pub fn smallest_period(&self) -> usize {
        smallest_period(&self.letters)
    }

    pub fn is_primitive(&self) -> Result<bool> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(is_primitive_slice(&self.letters))
    }

    pub fn primitive_root(&self) -> Result<RootDecomposition> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let root_len = root_length(&self.letters);
        Ok(RootDecomposition {
            root: self.prefix(root_len),
            exponent: self.len() / root_len,
        })
    }

    /// If `uv = vu`, the common primitive root `w` with `u, v ∈ w⁺`.
    pub fn commute(&self, other: &Word) -> Option<Word> {
        if self.is_empty() || other.is_empty() || self.alphabet != other.alphabet {
            return None;
        }
        if self.concat(other) != other.concat(self) {
            return None;
        }
        let root = self.primitive_root().ok()?.root;
        debug_assert_eq!(other.primitive_root().ok()?.root, root);
        Some(root)
    }

    /// Renders as lowercase letters when the alphabet fits, else as `[i,j,..]`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphabet <= 26 {
            for &c in &self.letters {
                write!(f, "{}", char::from(b'a' + c as u8))?;
            }
            Ok(())
        } else {
            f.write_str("[")?;
            for (i, c) in self.letters.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("]")
        }
    }
}

/// A word written as `root^exponent` with `root` primitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDecomposition {
    pub root: Word,
    pub exponent: usize,
}

impl RootDecomposition {
    pub fn expand(&self) -> Word {
        self.root.repeat(self.exponent)
    }
}

pub fn border_array<T: Eq>(s: &[T]) -> Vec<usize> {
    let mut border = vec![0; s.len()];
    for i in 1..s.len() {
        let mut b = border[i - 1];
        while b > 0 && s[i] != s[b] {
            b = border[b - 1];
        }
        if s[i] == s[b] {
            b += 1;
        }
        border[i] = b;
    }
    border
}

pub fn smallest_period<T: Eq>(s: &[T]) -> usize {
    match border_array(s).last() {
        Some(&b) => s.len() - b,
        None => 0,
    }
}

/// Length of the primitive root of a nonempty slice.
pub fn root_length<T: Eq>(s: &[T]) -> usize {
    let period = smallest_period(s);
    if s.len().is_multiple_of(period) {
        period
    } else {
        s.len()
    }
}

pub fn is_primitive_slice<T: Eq>(s: &[T]) -> bool {
    !s.is_empty() && root_length(s) == s.len()
}

/// `(p, q, m, j)` with `pq` primitive, `t = (pq)^m`, `v = (qp)^m`, `u = (pq)^j p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyWitness {
    pub p: Word,
    pub q: Word,
    pub m: usize,
    pub j: usize,
}

/// Solves the transposition equation `tu = uv` for distinct `t`, `v`.
pub fn conjugacy_witness(t: &Word, v: &Word, u: &Word) -> Result<ConjugacyWitness> {
    if t.is_empty() || v.is_empty() || u.is_empty() {
        return Err(Error::EmptyWord);
    }
    if t.alphabet != v.alphabet || t.alphabet != u.alphabet {
        return Err(Error::AlphabetMismatch(t.alphabet, u.alphabet));
    }
    if t.len() != v.len() || t.concat(u) != u.concat(v) {
        return Err(Error::NotTransposition);
    }
    if t == v {
        return Err(Error::IdenticalConjugates);
    }
    let RootDecomposition { root, exponent: m } = t.primitive_root()?;
    let split = u.len() % root.len();
    let j = u.len() / root.len();
    let p = root.prefix(split);
    let q = root.suffix(root.len() - split);
    let witness = ConjugacyWitness { p, q, m, j };
    let qp = witness.q.concat(&witness.p);
    debug_assert_eq!(&qp.repeat(m), v);
    debug_assert_eq!(&root.repeat(j).concat(&witness.p), u);
    Ok(witness)
}

/// All words of length `k` over `{0..n}` in lexicographic order.
pub fn all_words(alphabet: u32, k: usize) -> AllWords {
    AllWords {
        alphabet,
        next: Some(vec![0; k]),
    }
}

pub struct AllWords {
    alphabet: u32,
    next: Option<Vec<u32>>,
}

impl Iterator for AllWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        let mut carried = true;
        while i > 0 {
            i -= 1;
            if succ[i] + 1 < self.alphabet {
                succ[i] += 1;
                carried = false;
                break;
            }
            succ[i] = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(Word::from_raw(current, self.alphabet))
    }
}

/// `n^k` if it fits in a `u64`.
pub fn word_count(alphabet: u32, k: usize) -> Option<u64> {
    (alphabet as u64).checked_pow(u32::try_from(k).ok()?)
}
