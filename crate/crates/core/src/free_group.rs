//! Reduced words in a free group `F_r = <x_1, ..., x_r>`.
//!
//! Letters are stored as nonzero signed indices: `+k` is `x_k`, `-k` is
//! `x_k^-1`. Every [`FreeWord`] is freely reduced.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A signed generator index; never zero.
pub type Letter = i32;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<Letter>,
}

fn check_letter(l: Letter, rank: usize) -> Result<()> {
    let idx = l.unsigned_abs() as usize;
    if l == 0 || idx > rank {
        return Err(Error::IndexOutOfRange { index: idx, rank });
    }
    Ok(())
}

/// Stack-scan free reduction of a letter sequence.
fn reduce_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl FreeWord {
    pub fn identity(rank: usize) -> Self {
        FreeWord {
            rank,
            letters: Vec::new(),
        }
    }

    /// The generator `x_index` (1-based), or its inverse when `inverse` is set.
    pub fn generator(rank: usize, index: usize, inverse: bool) -> Result<Self> {
        let l = index as Letter;
        check_letter(l, rank)?;
        Ok(FreeWord {
            rank,
            letters: vec![if inverse { -l } else { l }],
        })
    }

    /// Reduce a raw letter sequence.
    pub fn reduce(letters: &[Letter], rank: usize) -> Result<Self> {
        for &l in letters {
            check_letter(l, rank)?;
        }
        Ok(FreeWord {
            rank,
            letters: reduce_letters(letters.iter().copied()),
        })
    }

    /// Build from letters already known to be in range; still reduces.
    pub(crate) fn from_trusted(rank: usize, letters: Vec<Letter>) -> Self {
        debug_assert!(letters.iter().all(|&l| check_letter(l, rank).is_ok()));
        let letters = if is_reduced(&letters) {
            letters
        } else {
            reduce_letters(letters)
        };
        FreeWord { rank, letters }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    fn same_rank(&self, other: &FreeWord) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &FreeWord) -> Result<FreeWord> {
        self.same_rank(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &FreeWord) -> FreeWord {
        // Only the junction can cancel.
        let mut k = 0;
        let (a, b) = (&self.letters, &other.letters);
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == -b[k] {
            k += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * k);
        letters.extend_from_slice(&a[..a.len() - k]);
        letters.extend_from_slice(&b[k..]);
        FreeWord {
            rank: self.rank,
            letters,
        }
    }

    pub fn inv(&self) -> FreeWord {
        FreeWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// `w * g * w^-1`, reduced.
    pub fn conj(w: &FreeWord, g: &FreeWord) -> Result<FreeWord> {
        w.same_rank(g)?;
        Ok(w.mul_unchecked(g).mul_unchecked(&w.inv()))
    }

    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut out = FreeWord::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = out.mul_unchecked(&base);
        }
        out
    }

    /// `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(a: &FreeWord, b: &FreeWord) -> Result<FreeWord> {
        a.same_rank(b)?;
        Ok(a.mul_unchecked(b)
            .mul_unchecked(&a.inv())
            .mul_unchecked(&b.inv()))
    }

    /// Same letters, viewed in a free group of larger (or equal) rank.
    pub fn with_rank(&self, rank: usize) -> Result<FreeWord> {
        FreeWord::reduce(&self.letters, rank)
    }

    /// Shift every index by `offset` and view in rank `rank`.
    pub fn shifted(&self, offset: usize, rank: usize) -> Result<FreeWord> {
        let letters: Vec<Letter> = self
            .letters
            .iter()
            .map(|&l| l.signum() * (l.abs() + offset as Letter))
            .collect();
        FreeWord::reduce(&letters, rank)
    }

    /// Exponent-sum vector (image in the abelianization `Z^r`).
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &l in &self.letters {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }

    /// Splits `self = c * core * c^-1` with `core` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (FreeWord, FreeWord) {
        let a = &self.letters;
        let mut k = 0;
        while 2 * k + 1 < a.len() && a[k] == -a[a.len() - 1 - k] {
            k += 1;
        }
        let c = FreeWord {
            rank: self.rank,
            letters: a[..k].to_vec(),
        };
        let core = FreeWord {
            rank: self.rank,
            letters: a[k..a.len() - k].to_vec(),
        };
        (c, core)
    }

    /// Canonical representative of the conjugacy class: the least rotation
    /// of the cyclic reduction. Returns `(rep, w)` with `rep = w * self * w^-1`.
    pub fn conjugacy_canonical(&self) -> (FreeWord, FreeWord) {
        let (c, core) = self.cyclic_reduction();
        let n = core.letters.len();
        if n == 0 {
            return (core, c.inv());
        }
        let l = &core.letters;
        let mut best = 0;
        for s in 1..n {
            for i in 0..n {
                let (x, y) = (l[(s + i) % n], l[(best + i) % n]);
                if x != y {
                    if x < y {
                        best = s;
                    }
                    break;
                }
            }
        }
        let mut rot = Vec::with_capacity(n);
        rot.extend_from_slice(&l[best..]);
        rot.extend_from_slice(&l[..best]);
        // rot = s^-1 core s with s = l[..best]; core = c^-1 self c.
        let s = FreeWord {
            rank: self.rank,
            letters: l[..best].to_vec(),
        };
        let w = s.inv().mul_unchecked(&c.inv());
        (
            FreeWord {
                rank: self.rank,
                letters: rot,
            },
            w,
        )
    }

    /// True when `self` and `other` are conjugate.
    pub fn is_conjugate_to(&self, other: &FreeWord) -> bool {
        self.rank == other.rank && self.conjugacy_canonical().0 == other.conjugacy_canonical().0
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        let a = &self.letters;
        while i < a.len() {
            let mut j = i;
            while j < a.len() && a[j] == a[i] {
                j += 1;
            }
            let run = (j - i) as i64;
            let name = &names[a[i].unsigned_abs() as usize - 1];
            let exp = if a[i] < 0 { -run } else { run };
            if exp == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{exp}"));
            }
            i = j;
        }
        parts.join(" ")
    }
}

fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != -w[1])
}

/// Default generator names `x1 .. xr`.
pub fn default_names(rank: usize) -> Vec<String> {
    (1..=rank).map(|i| format!("x{i}")).collect()
}

/// Split text into `(name, exponent)` tokens: `name(^-?int)?`, whitespace optional
/// between tokens. A bare `1` denotes the identity.
pub(crate) fn tokenize(text: &str) -> Result<Vec<(String, i64)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let err = |tok: &str, reason: &str| Error::Parse {
        token: tok.to_string(),
        reason: reason.to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '*' || c == '.' {
            i += 1;
            continue;
        }
        if c == '1' && (i + 1 == chars.len() || chars[i + 1].is_whitespace()) {
            i += 1;
            continue;
        }
        if !c.is_ascii_alphabetic() {
            return Err(err(&c.to_string(), "expected a generator name"));
        }
        let start = i;
        i += 1;
        // Name: letters, then optional `_`, then digits, or a call `name(a,b)`.
        while i < chars.len() && chars[i].is_ascii_alphabetic() {
            i += 1;
        }
        if i < chars.len() && chars[i] == '_' {
            i += 1;
        }
        if i < chars.len() && chars[i] == '(' {
            while i < chars.len() && chars[i] != ')' {
                i += 1;
            }
            if i == chars.len() {
                return Err(err(&chars[start..].iter().collect::<String>(), "unclosed `(`"));
            }
            i += 1;
        } else {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
        }
        let name: String = chars[start..i].iter().collect();
        let mut exp = 1i64;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let es = i;
            if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let etxt: String = chars[es..i].iter().collect();
            exp = etxt
                .parse()
                .map_err(|_| err(&format!("{name}^{etxt}"), "malformed exponent"))?;
        }
        out.push((name, exp));
    }
    Ok(out)
}

/// Parse a word over the named generators (`names[k-1]` is generator `k`).
pub fn parse_word_named(text: &str, names: &[String]) -> Result<FreeWord> {
    let rank = names.len();
    let mut letters = Vec::new();
    for (name, exp) in tokenize(text)? {
        let idx = names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Error::Parse {
                token: name.clone(),
                reason: format!("unknown generator for rank {rank}"),
            })?;
        let l = (idx + 1) as Letter;
        let l = if exp < 0 { -l } else { l };
        letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
    }
    FreeWord::reduce(&letters, rank)
}

/// Parse `x<k>(^-?<int>)?` tokens into a word of rank `rank`.
pub fn parse_word(text: &str, rank: usize) -> Result<FreeWord> {
    let mut letters = Vec::new();
    for (name, exp) in tokenize(text)? {
        let idx: usize = name
            .strip_prefix('x')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                token: name.clone(),
                reason: "expected x<k>".into(),
            })?;
        if idx == 0 || idx > rank {
            return Err(Error::IndexOutOfRange { index: idx, rank });
        }
        let l = if exp < 0 {
            -(idx as Letter)
        } else {
            idx as Letter
        };
        letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
    }
    FreeWord::reduce(&letters, rank)
}

/// Parse with the rank taken as the largest generator index that occurs (at least 1).
pub fn parse_word_infer(text: &str) -> Result<FreeWord> {
    let mut rank = 1;
    for (name, _) in tokenize(text)? {
        if let Some(k) = name.strip_prefix('x').and_then(|s| s.parse::<usize>().ok()) {
            rank = rank.max(k);
        }
    }
    parse_word(text, rank)
}

pub fn format_word(w: &FreeWord) -> String {
    w.format_with(&default_names(w.rank))
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(self))
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}[{}]", self.rank, format_word(self))
    }
}

#[derive(Serialize, Deserialize)]
struct WordRepr {
    rank: usize,
    word: String,
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WordRepr {
            rank: self.rank,
            word: format_word(self),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FreeWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = WordRepr::deserialize(d)?;
        parse_word(&r.word, r.rank).map_err(serde::de::Error::custom)
    }
}
