//! A standard bi-ordering of `F_r`, realized by the Magnus expansion
//! `x_i -> 1 + X_i` into non-commuting integer power series.
//!
//! A nontrivial word is positive when the coefficient of its least nonconstant
//! monomial is positive, monomials compared by degree first and then
//! lexicographically with `X_1 < ... < X_r`. The degree of that monomial is the
//! lower-central depth: `w` lies in `gamma_k F` iff `min_degree(w) >= k`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::artin::FreeEndo;
use crate::error::{Error, Result};
use crate::free_group::FreeWord;

pub const DEFAULT_DEGREE_CAP: usize = 16;

/// Monomial `X_{i_1} ... X_{i_k}` as 0-based variable indices, ordered by
/// degree and then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u8>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MagnusSeries {
    rank: usize,
    degree: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl MagnusSeries {
    pub fn one(rank: usize, degree: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(vec![]), BigInt::one());
        MagnusSeries {
            rank,
            degree,
            terms,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, mono: &[u8]) -> BigInt {
        self.terms
            .get(&Monomial(mono.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    /// Least nonconstant monomial with a nonzero coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().find(|(m, _)| !m.0.is_empty())
    }

    /// Right-multiply by the series of one letter, truncating at `degree`.
    fn mul_letter(&mut self, letter: i32) {
        let var = (letter.unsigned_abs() - 1) as u8;
        let mut next: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in &self.terms {
            // (1 + X)        for x
            // 1 - X + X^2 -  for x^-1
            let room = self.degree - m.0.len();
            let mut mono = m.0.clone();
            let mut coeff = c.clone();
            for j in 0..=room {
                if j > 0 {
                    mono.push(var);
                    if letter < 0 {
                        coeff = -coeff;
                    }
                }
                add_term(&mut next, Monomial(mono.clone()), coeff.clone());
                if letter > 0 && j == 1 {
                    break;
                }
            }
        }
        self.terms = next;
    }

    pub fn mul(&self, other: &MagnusSeries) -> Result<MagnusSeries> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let degree = self.degree.min(other.degree);
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.0.len() + b.0.len() > degree {
                    continue;
                }
                let mut m = a.0.clone();
                m.extend_from_slice(&b.0);
                add_term(&mut terms, Monomial(m), ca * cb);
            }
        }
        Ok(MagnusSeries {
            rank: self.rank,
            degree,
            terms,
        })
    }
}

fn add_term(terms: &mut BTreeMap<Monomial, BigInt>, m: Monomial, c: BigInt) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl fmt::Display for MagnusSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mag = c.abs();
            if m.0.is_empty() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            for v in &m.0 {
                write!(f, "X{}", v + 1)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Magnus expansion of `w` truncated at degree `degree`.
pub fn expand(w: &FreeWord, degree: usize) -> MagnusSeries {
    let mut s = MagnusSeries::one(w.rank(), degree);
    for &l in w.letters() {
        s.mul_letter(l);
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderSign {
    Negative,
    Zero,
    Positive,
}

impl OrderSign {
    pub fn flip(self) -> OrderSign {
        match self {
            OrderSign::Negative => OrderSign::Positive,
            OrderSign::Zero => OrderSign::Zero,
            OrderSign::Positive => OrderSign::Negative,
        }
    }
}

/// One standard ordering: the Magnus order after relabelling variables so
/// that `x_{var_order[0]}` plays the role of `X_1`, and so on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagnusOrder {
    /// `relabel[i]` is the new 1-based index of generator `i+1`.
    relabel: Vec<i32>,
    degree_cap: usize,
}

impl MagnusOrder {
    pub fn standard(rank: usize) -> Self {
        MagnusOrder {
            relabel: (1..=rank as i32).collect(),
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }

    /// `var_order` lists 1-based generators from least to greatest variable.
    pub fn with_variable_order(var_order: &[usize]) -> Result<Self> {
        let rank = var_order.len();
        let mut relabel = vec![0i32; rank];
        for (pos, &g) in var_order.iter().enumerate() {
            if g == 0 || g > rank || relabel[g - 1] != 0 {
                return Err(Error::Domain(format!("{var_order:?} is not a permutation")));
            }
            relabel[g - 1] = pos as i32 + 1;
        }
        Ok(MagnusOrder {
            relabel,
            degree_cap: DEFAULT_DEGREE_CAP,
        })
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap.max(1);
        self
    }

    pub fn rank(&self) -> usize {
        self.relabel.len()
    }

    fn relabelled(&self, w: &FreeWord) -> Result<FreeWord> {
        if w.rank() != self.rank() {
            return Err(Error::RankMismatch {
                left: self.rank(),
                right: w.rank(),
            });
        }
        let letters: Vec<i32> = w
            .letters()
            .iter()
            .map(|&l| l.signum() * self.relabel[l.unsigned_abs() as usize - 1])
            .collect();
        FreeWord::reduce(&letters, w.rank())
    }

    /// Leading monomial and coefficient, by doubling the truncation degree.
    fn leading(&self, w: &FreeWord) -> Result<Option<(Monomial, BigInt)>> {
        if w.is_identity() {
            return Ok(None);
        }
        let w = self.relabelled(w)?;
        let mut d = 2.min(self.degree_cap);
        loop {
            let s = expand(&w, d);
            if let Some((m, c)) = s.leading_term() {
                return Ok(Some((m.clone(), c.clone())));
            }
            if d >= self.degree_cap {
                return Err(Error::MagnusCap {
                    cap: self.degree_cap,
                });
            }
            d = (2 * d).min(self.degree_cap);
        }
    }

    pub fn sign(&self, w: &FreeWord) -> Result<OrderSign> {
        Ok(match self.leading(w)? {
            None => OrderSign::Zero,
            Some((_, c)) if c.is_positive() => OrderSign::Positive,
            Some(_) => OrderSign::Negative,
        })
    }

    /// `u < v` iff `u^-1 v` is positive.
    pub fn compare(&self, u: &FreeWord, v: &FreeWord) -> Result<Ordering> {
        Ok(match self.sign(&u.inv().mul(v)?)? {
            OrderSign::Positive => Ordering::Less,
            OrderSign::Zero => Ordering::Equal,
            OrderSign::Negative => Ordering::Greater,
        })
    }

    /// Degree of the leading monomial; `None` for the identity.
    pub fn min_degree(&self, w: &FreeWord) -> Result<Option<usize>> {
        Ok(self.leading(w)?.map(|(m, _)| m.0.len()))
    }

    /// Lexicographic order on `K ⋊_phi Z`: `(u, t^p) < (v, t^q)` iff `p < q`,
    /// or `p = q` and `u < v`. Refuses when `phi` visibly fails to preserve
    /// the order on the elements involved.
    pub fn semidirect_compare(
        &self,
        (u, p): (&FreeWord, i64),
        (v, q): (&FreeWord, i64),
        phi: &FreeEndo,
    ) -> Result<Ordering> {
        let quotient = u.inv().mul(v)?;
        for g in [u, v, &quotient] {
            let before = self.sign(g)?;
            let after = self.sign(&phi.apply(g)?)?;
            if before != after {
                return Err(Error::SignPreservation(format!(
                    "sign of {g} is {before:?} but its image has sign {after:?}"
                )));
            }
        }
        Ok(p.cmp(&q).then(self.compare(u, v)?))
    }
}

pub fn sign(w: &FreeWord) -> Result<OrderSign> {
    MagnusOrder::standard(w.rank()).sign(w)
}

pub fn compare(u: &FreeWord, v: &FreeWord) -> Result<Ordering> {
    if u.rank() != v.rank() {
        return Err(Error::RankMismatch {
            left: u.rank(),
            right: v.rank(),
        });
    }
    MagnusOrder::standard(u.rank()).compare(u, v)
}

pub fn min_degree(w: &FreeWord) -> Result<Option<usize>> {
    MagnusOrder::standard(w.rank()).min_degree(w)
}

pub fn semidirect_compare(
    a: (&FreeWord, i64),
    b: (&FreeWord, i64),
    phi: &FreeEndo,
) -> Result<Ordering> {
    MagnusOrder::standard(phi.rank()).semidirect_compare(a, b, phi)
}
