//! Braid words over `B_n`, permutation data and braided-link combinatorics.
//!
//! Words are only freely cancelled (`s_i s_i^-1`); equality of braids goes
//! through the Artin action, see [`braid_equal`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::artin::{artin_action, FreeEndo};
use crate::error::{Error, Result};
use crate::free_group::tokenize;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    /// Signed generator indices, `+i` for `s_i`, `-i` for `s_i^-1`.
    letters: Vec<i32>,
}

fn cancel(letters: impl IntoIterator<Item = i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl BraidWord {
    pub fn new(strands: usize, letters: &[i32]) -> Result<Self> {
        if strands < 2 {
            return Err(Error::Domain(format!("braids need at least 2 strands, got {strands}")));
        }
        for &l in letters {
            let i = l.unsigned_abs() as usize;
            if l == 0 || i >= strands {
                return Err(Error::IndexOutOfRange { index: i, rank: strands - 1 });
            }
        }
        Ok(BraidWord {
            strands,
            letters: cancel(letters.iter().copied()),
        })
    }

    pub fn identity(strands: usize) -> Result<Self> {
        Self::new(strands, &[])
    }

    /// `s_1 s_2 ... s_{n-1}`.
    pub fn delta(strands: usize) -> Result<Self> {
        let letters: Vec<i32> = (1..strands as i32).collect();
        Self::new(strands, &letters)
    }

    /// The half twist `(s_1 .. s_{n-1})(s_1 .. s_{n-2}) .. (s_1)`.
    pub fn half_twist(strands: usize) -> Result<Self> {
        let mut letters = Vec::new();
        for top in (1..strands as i32).rev() {
            letters.extend(1..=top);
        }
        Self::new(strands, &letters)
    }

    /// The full twist `Delta^2`, generator of the center.
    pub fn full_twist(strands: usize) -> Result<Self> {
        Ok(Self::half_twist(strands)?.power(2))
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn same_strands(&self, other: &BraidWord) -> Result<()> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch {
                left: self.strands,
                right: other.strands,
            });
        }
        Ok(())
    }

    pub fn compose(&self, other: &BraidWord) -> Result<BraidWord> {
        self.same_strands(other)?;
        Ok(BraidWord {
            strands: self.strands,
            letters: cancel(self.letters.iter().chain(&other.letters).copied()),
        })
    }

    pub fn invert(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn power(&self, k: i64) -> BraidWord {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        BraidWord {
            strands: self.strands,
            letters: cancel(letters),
        }
    }

    /// `alpha * beta * alpha^-1`.
    pub fn conjugate(alpha: &BraidWord, beta: &BraidWord) -> Result<BraidWord> {
        alpha.compose(beta)?.compose(&alpha.invert())
    }

    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.signum() as i64).sum()
    }

    pub fn max_abs_exponent(&self) -> usize {
        // longest run of one generator with one sign
        let mut best = 0;
        let mut i = 0;
        while i < self.letters.len() {
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == self.letters[i] {
                j += 1;
            }
            best = best.max(j - i);
            i = j;
        }
        best
    }

    pub fn permutation(&self) -> Permutation {
        // images[p] = final position of the strand starting at position p
        let mut pos_of: Vec<usize> = (0..self.strands).collect();
        let mut at: Vec<usize> = (0..self.strands).collect();
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize - 1;
            at.swap(i, i + 1);
            pos_of[at[i]] = i;
            pos_of[at[i + 1]] = i + 1;
        }
        Permutation { images: pos_of }
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().is_identity()
    }

    pub fn braided_link_info(&self) -> BraidedLinkInfo {
        let cycles = self.permutation().cycle_lengths();
        BraidedLinkInfo {
            component_count: cycles.len() + 1,
            cycle_lengths: cycles,
            exponent_sum: self.exponent_sum(),
        }
    }

    /// `alpha ⊗ beta`: `beta` placed on the last strands.
    pub fn tensor(&self, other: &BraidWord) -> BraidWord {
        let m = self.strands as i32;
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().map(|&l| l.signum() * (l.abs() + m)));
        BraidWord {
            strands: self.strands + other.strands,
            letters,
        }
    }

    /// Finds an unused generator `s_g` with letters on both sides of it and
    /// splits into the braid on strands `1..=g` and the one on `g+1..=n`.
    pub fn tensor_split(&self) -> Option<(BraidWord, BraidWord)> {
        let mut used = vec![false; self.strands];
        for &l in &self.letters {
            used[l.unsigned_abs() as usize] = true;
        }
        let lo = (1..self.strands).find(|&i| used[i])?;
        let hi = (1..self.strands).rev().find(|&i| used[i])?;
        let g = (lo + 1..hi).find(|&g| !used[g])?;
        let left: Vec<i32> = self
            .letters
            .iter()
            .copied()
            .filter(|l| (l.unsigned_abs() as usize) < g)
            .collect();
        let gi = g as i32;
        let right: Vec<i32> = self
            .letters
            .iter()
            .filter(|l| (l.unsigned_abs() as usize) > g)
            .map(|&l| l.signum() * (l.abs() - gi))
            .collect();
        Some((
            BraidWord {
                strands: g,
                letters: left,
            },
            BraidWord {
                strands: self.strands - g,
                letters: right,
            },
        ))
    }

    /// Removes trailing (and leading) explicit `Delta^{±2}` blocks, returning
    /// the remaining word and the stripped power `k` (`self = rest * Delta^{2k}`
    /// up to moving central factors).
    pub fn strip_full_twists(&self) -> (BraidWord, i64) {
        if self.strands < 2 {
            return (self.clone(), 0);
        }
        let ft = Self::full_twist(self.strands).expect("strands >= 2");
        let ft_inv = ft.invert();
        let mut rest = self.letters.clone();
        let mut k = 0i64;
        loop {
            if !ft.letters.is_empty() && rest.ends_with(&ft.letters) {
                rest.truncate(rest.len() - ft.letters.len());
                k += 1;
            } else if rest.ends_with(&ft_inv.letters) && !ft_inv.letters.is_empty() {
                rest.truncate(rest.len() - ft_inv.letters.len());
                k -= 1;
            } else if rest.starts_with(&ft.letters) && !ft.letters.is_empty() {
                rest.drain(..ft.letters.len());
                k += 1;
            } else if rest.starts_with(&ft_inv.letters) && !ft_inv.letters.is_empty() {
                rest.drain(..ft_inv.letters.len());
                k -= 1;
            } else {
                break;
            }
        }
        (
            BraidWord {
                strands: self.strands,
                letters: rest,
            },
            k,
        )
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == self.letters[i] {
                j += 1;
            }
            let g = self.letters[i].abs();
            let e = (j - i) as i64 * self.letters[i].signum() as i64;
            if e == 1 {
                parts.push(format!("s{g}"));
            } else {
                parts.push(format!("s{g}^{e}"));
            }
            i = j;
        }
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}[{}]", self.strands, self)
    }
}

fn parse_pair(name: &str, prefix: &str) -> Option<(usize, usize)> {
    let inner = name.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
    let mut it = inner.split(',').map(|s| s.trim().parse::<usize>());
    let a = it.next()?.ok()?;
    let b = it.next()?.ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

/// Parse `s<k>(^<int>)?` tokens plus the macros `d_<n>` (`s_1..s_{n-1}`),
/// `D_<n>` (half twist), `beta(m,n)` and `gamma(m,n)`.
pub fn parse_braid(text: &str, strands: usize) -> Result<BraidWord> {
    if strands < 2 {
        return Err(Error::Domain(format!("braids need at least 2 strands, got {strands}")));
    }
    let mut letters: Vec<i32> = Vec::new();
    for (name, exp) in tokenize(text)? {
        let block: BraidWord = if let Some(rest) = name.strip_prefix("d_") {
            let m: usize = rest.parse().map_err(|_| Error::Parse {
                token: name.clone(),
                reason: "expected d_<n>".into(),
            })?;
            macro_strands(&name, m, strands)?;
            BraidWord::delta(m)?
        } else if let Some(rest) = name.strip_prefix("D_") {
            let m: usize = rest.parse().map_err(|_| Error::Parse {
                token: name.clone(),
                reason: "expected D_<n>".into(),
            })?;
            macro_strands(&name, m, strands)?;
            BraidWord::half_twist(m)?
        } else if let Some((a, b)) = parse_pair(&name, "beta") {
            let w = family_beta(a, b)?;
            macro_strands(&name, w.strands, strands)?;
            w
        } else if let Some((a, b)) = parse_pair(&name, "gamma") {
            let w = family_gamma(a, b)?;
            macro_strands(&name, w.strands, strands)?;
            w
        } else if let Some(rest) = name.strip_prefix('s') {
            let i: usize = rest.parse().map_err(|_| Error::Parse {
                token: name.clone(),
                reason: "expected s<k>".into(),
            })?;
            if i == 0 || i >= strands {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    rank: strands - 1,
                });
            }
            BraidWord {
                strands,
                letters: vec![i as i32],
            }
        } else {
            return Err(Error::Parse {
                token: name,
                reason: "unknown braid token".into(),
            });
        };
        let block = block.power(exp);
        letters.extend_from_slice(&block.letters);
    }
    BraidWord::new(strands, &letters)
}

fn macro_strands(name: &str, m: usize, strands: usize) -> Result<()> {
    if m < 2 || m > strands {
        return Err(Error::Parse {
            token: name.to_string(),
            reason: format!("macro needs {m} strands but the braid has {strands}"),
        });
    }
    Ok(())
}

/// `beta_{m,n} = s_1^-1 .. s_m^-1 s_{m+1} .. s_{m+n}` over `m+n+1` strands.
pub fn family_beta(m: usize, n: usize) -> Result<BraidWord> {
    if m < 1 || n < 1 {
        return Err(Error::Domain(format!("beta({m},{n}) needs m, n >= 1")));
    }
    let mut letters: Vec<i32> = (1..=m as i32).map(|i| -i).collect();
    letters.extend(m as i32 + 1..=(m + n) as i32);
    BraidWord::new(m + n + 1, &letters)
}

/// `gamma_{m,n} = s_1^-2 s_2^-1 .. s_{m+1}^-1 s_{m+2} .. s_{m+n+1} s_{m+n+2}^2`
/// over `m+n+3` strands.
pub fn family_gamma(m: usize, n: usize) -> Result<BraidWord> {
    let mut letters = vec![-1, -1];
    letters.extend((2..=m as i32 + 1).map(|i| -i));
    letters.extend(m as i32 + 2..=(m + n) as i32 + 1);
    let last = (m + n) as i32 + 2;
    letters.extend([last, last]);
    BraidWord::new(m + n + 3, &letters)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    /// 0-based images.
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::Domain("not a bijection".into()));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of the 1-based point `i`, 1-based.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self` after `other`: `i -> self(other(i))`.
    pub fn after(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> Permutation {
        let mut out = Permutation::identity(self.len());
        for _ in 0..k {
            out = self.after(&out);
        }
        out
    }

    /// Cycle lengths in decreasing order, fixed points included.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidedLinkInfo {
    /// Closure components plus the braid axis.
    pub component_count: usize,
    /// Linking numbers of the closure components with the axis.
    pub cycle_lengths: Vec<usize>,
    pub exponent_sum: i64,
}

/// Equality in `B_n`, decided by the faithful Artin action.
pub fn braid_equal(a: &BraidWord, b: &BraidWord) -> Result<bool> {
    a.same_strands(b)?;
    Ok(artin_action(a).images() == artin_action(b).images())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Periodicity {
    /// Conjugate to `(d_n s_1)^k`.
    Type1(i64),
    /// Conjugate to `d_n^k`.
    Type2(i64),
    NotPeriodic,
}

fn endo_power_equals(phi: &FreeEndo, m: usize, target: &FreeEndo) -> bool {
    let mut acc = phi.clone();
    for _ in 1..m {
        match acc.compose(phi) {
            Ok(next) => acc = next,
            // Images beyond the length cap cannot match a short central action.
            Err(_) => return false,
        }
    }
    acc.images() == target.images()
}

/// Classifies periodic braids by which power is central: a noncentral braid
/// with `beta^{n-1} = Delta^{2k}` is conjugate to `(d_n s_1)^k`, one with
/// `beta^n = Delta^{2k}` is conjugate to `d_n^k`.
pub fn is_periodic(beta: &BraidWord) -> Result<Periodicity> {
    let n = beta.strands;
    if n < 3 {
        return Err(Error::Domain(format!("periodicity test needs n >= 3, got {n}")));
    }
    let e = beta.exponent_sum();
    let perm = beta.permutation();
    let phi = artin_action(beta);
    let central = |k: i64| artin_action(&BraidWord::delta(n).unwrap().power(k * n as i64));

    let type2 = if e % (n as i64 - 1) == 0 && perm.pow(n).is_identity() {
        let k = e / (n as i64 - 1);
        endo_power_equals(&phi, n, &central(k)).then_some(k)
    } else {
        None
    };
    if let Some(k) = type2 {
        return Ok(Periodicity::Type2(k));
    }
    if e % n as i64 == 0 && perm.pow(n - 1).is_identity() {
        let k = e / n as i64;
        if endo_power_equals(&phi, n - 1, &central(k)) {
            return Ok(Periodicity::Type1(k));
        }
    }
    Ok(Periodicity::NotPeriodic)
}
