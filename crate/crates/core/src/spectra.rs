//! Exact linear algebra over `Z`: abelianization matrices, characteristic
//! polynomials, and real-root counting by Sturm sequences.
//!
//! Nothing here uses floating point.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::artin::FreeEndo;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<JsonInt>>", into = "Vec<Vec<JsonInt>>")]
pub struct IntMatrix {
    dim: usize,
    /// Row-major.
    entries: Vec<BigInt>,
}

/// JSON integer: a plain number when it fits in `i64`, else a decimal string.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

impl TryFrom<JsonInt> for BigInt {
    type Error = Error;

    fn try_from(v: JsonInt) -> Result<BigInt> {
        match v {
            JsonInt::Small(x) => Ok(BigInt::from(x)),
            JsonInt::Big(s) => s
                .parse()
                .map_err(|_| Error::Schema(format!("not an integer: {s}"))),
        }
    }
}

impl From<&BigInt> for JsonInt {
    fn from(v: &BigInt) -> Self {
        i64::try_from(v).map_or_else(|_| JsonInt::Big(v.to_string()), JsonInt::Small)
    }
}

impl TryFrom<Vec<Vec<JsonInt>>> for IntMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<JsonInt>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::try_from).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_big_rows(rows)
    }
}

impl From<IntMatrix> for Vec<Vec<JsonInt>> {
    fn from(m: IntMatrix) -> Self {
        (0..m.dim)
            .map(|r| (0..m.dim).map(|c| JsonInt::from(m.get(r, c))).collect())
            .collect()
    }
}

impl IntMatrix {
    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Schema("matrix must be square".into()));
        }
        Ok(IntMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_big_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn zero(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.dim + c]
    }

    fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.dim + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.dim).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.dim;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = &out.entries[i * n + j] + a * other.get(k, j);
                    out.entries[i * n + j] = v;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn determinant(&self) -> BigInt {
        let cp = char_poly(self);
        let c0 = cp.coeff(0);
        if self.dim.is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }
}

/// Column `j` is the exponent-sum vector of `phi(x_j)`.
pub fn abelianize(phi: &FreeEndo) -> IntMatrix {
    let n = phi.rank();
    let mut m = IntMatrix::zero(n);
    for (j, img) in phi.images().iter().enumerate() {
        for (i, e) in img.exponent_sums().into_iter().enumerate() {
            m.set(i, j, BigInt::from(e));
        }
    }
    m
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntPolynomial {
    /// Ascending degree; no trailing zeros.
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::new(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    fn to_rational(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_mag = !mag.is_one() || i == 0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `det(tI - M)` by the Faddeev-LeVerrier recurrence; the divisions are exact.
pub fn char_poly(m: &IntMatrix) -> IntPolynomial {
    let n = m.dim();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk = IntMatrix::zero(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&mk);
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[n - k + 1];
            next.set(i, i, v);
        }
        let tr = m.mul(&next).trace();
        coeffs[n - k] = -(tr / BigInt::from(k));
        mk = next;
    }
    IntPolynomial::new(coeffs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    fn monic(&self) -> RatPoly {
        let l = self.lead().clone();
        RatPoly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        let mut rem = self.coeffs.clone();
        let dd = d.degree();
        let dl = d.lead().clone();
        if self.coeffs.len() < d.coeffs.len() {
            return (RatPoly::new(vec![]), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.coeffs.len() - dd];
        for i in (dd..self.coeffs.len()).rev() {
            let c = &rem[i] / &dl;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let v = &rem[i - dd + j] - &c * dc;
                rem[i - dd + j] = v;
            }
            quot[i - dd] = c;
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Open interval for root counting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interval {
    /// `(lo, hi)` with rational endpoints.
    Open(BigRational, BigRational),
    /// `(0, +inf)`.
    Positive,
    /// The whole real line.
    All,
}

#[derive(Clone, Copy)]
enum Point<'a> {
    NegInf,
    At(&'a BigRational),
    PosInf,
}

fn sturm_chain(p: &RatPoly) -> Vec<RatPoly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(RatPoly::new(r.coeffs.iter().map(|c| -c).collect()));
    }
    chain
}

fn sign_variations(chain: &[RatPoly], at: Point<'_>) -> usize {
    let signs = chain.iter().filter_map(|q| {
        let s = match at {
            Point::At(x) => {
                let v = q.eval(x);
                if v.is_zero() {
                    return None;
                }
                v.is_positive()
            }
            Point::PosInf => q.lead().is_positive(),
            Point::NegInf => q.lead().is_positive() == (q.degree() % 2 == 0),
        };
        Some(s)
    });
    let mut count = 0;
    let mut prev: Option<bool> = None;
    for s in signs {
        if prev.is_some_and(|p| p != s) {
            count += 1;
        }
        prev = Some(s);
    }
    count
}

fn count_distinct_squarefree(sf: &RatPoly, interval: &Interval) -> usize {
    if sf.degree() == 0 {
        return 0;
    }
    let chain = sturm_chain(sf);
    // V(-inf) - V(x) counts roots in (-inf, x].
    match interval {
        Interval::All => {
            sign_variations(&chain, Point::NegInf) - sign_variations(&chain, Point::PosInf)
        }
        Interval::Positive => {
            let zero = BigRational::zero();
            sign_variations(&chain, Point::At(&zero)) - sign_variations(&chain, Point::PosInf)
        }
        Interval::Open(lo, hi) => {
            if lo >= hi {
                return 0;
            }
            let n = sign_variations(&chain, Point::At(lo)) - sign_variations(&chain, Point::At(hi));
            if sf.eval(hi).is_zero() {
                n - 1
            } else {
                n
            }
        }
    }
}

/// Number of distinct real roots of `p` in `interval`.
pub fn count_real_roots(p: &IntPolynomial, interval: &Interval) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Domain("zero polynomial has no finite root count".into()));
    }
    let q = p.to_rational();
    let g = q.gcd(&q.derivative());
    let sf = if g.degree() == 0 { q } else { q.div_rem(&g).0 };
    Ok(count_distinct_squarefree(&sf, interval))
}

/// Yun square-free factorization: `p = c * prod f_i^i` with `f_i` square-free,
/// returned as `(i, f_i)` for nonconstant factors.
fn square_free_factors(p: &RatPoly) -> Vec<(usize, RatPoly)> {
    let mut out = Vec::new();
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    if a0.degree() == 0 {
        out.push((1, p.monic()));
        return out;
    }
    let mut b = p.div_rem(&a0).0;
    let mut c = dp.div_rem(&a0).0;
    let mut d = sub(&c, &b.derivative());
    let mut i = 1;
    while b.degree() > 0 {
        let a = b.gcd(&d);
        if a.degree() > 0 {
            out.push((i, a.clone()));
        }
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = sub(&c, &b.derivative());
        i += 1;
    }
    out
}

fn sub(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let n = a.coeffs.len().max(b.coeffs.len());
    RatPoly::new(
        (0..n)
            .map(|i| {
                let x = a.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                let y = b.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                x - y
            })
            .collect(),
    )
}

/// Number of real roots of `p` in `interval`, counted with multiplicity.
pub fn total_real_root_multiplicity(p: &IntPolynomial, interval: &Interval) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Domain("zero polynomial has no finite root count".into()));
    }
    let q = p.to_rational();
    if q.degree() == 0 {
        return Ok(0);
    }
    Ok(square_free_factors(&q)
        .iter()
        .map(|(mult, f)| mult * count_distinct_squarefree(f, interval))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenVerdict {
    /// Every eigenvalue real and positive: an invariant bi-ordering exists.
    AllRealPositive,
    /// Some positive real eigenvalue, not all: inconclusive.
    HasPositiveReal,
    /// No positive real eigenvalue: no invariant bi-ordering exists.
    NoPositiveReal,
}

/// Necessary sign pattern for all roots real and positive: coefficients of the
/// monic characteristic polynomial alternate strictly in sign.
pub fn alternating_signs(p: &IntPolynomial) -> bool {
    let d = match p.degree() {
        Some(d) => d,
        None => return false,
    };
    p.coeffs().iter().enumerate().all(|(i, c)| {
        let expect_positive = (d - i) % 2 == 0;
        if expect_positive {
            c.is_positive()
        } else {
            c.is_negative()
        }
    })
}

pub fn eigen_certificate(m: &IntMatrix) -> EigenVerdict {
    let cp = char_poly(m);
    let degree = cp.degree().unwrap_or(0);
    let positive = total_real_root_multiplicity(&cp, &Interval::Positive).expect("monic");
    if positive == degree {
        EigenVerdict::AllRealPositive
    } else if positive == 0 {
        EigenVerdict::NoPositiveReal
    } else {
        EigenVerdict::HasPositiveReal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artin::{artin_action, fig8_matrix, sibling_matrix, whitehead_monodromy};
    use crate::braid_core::parse_braid;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn abelianization_examples() {
        let wm = abelianize(&whitehead_monodromy());
        assert_eq!(
            wm,
            IntMatrix::from_rows(&[vec![1, -1, -1], vec![0, 1, 0], vec![0, 1, 1]]).unwrap()
        );
        let s = abelianize(&artin_action(&parse_braid("s1", 2).unwrap()));
        assert_eq!(s, IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap());
        let id = abelianize(&artin_action(&parse_braid("1", 3).unwrap()));
        assert_eq!(id, IntMatrix::identity(3));
    }

    #[test]
    fn char_poly_examples() {
        let wm = abelianize(&whitehead_monodromy());
        assert_eq!(char_poly(&wm), poly(&[-1, 3, -3, 1]));
        assert_eq!(char_poly(&fig8_matrix()), poly(&[1, -3, 1]));
        let cyc = IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(char_poly(&cyc), poly(&[-1, 0, 0, 1]));
        assert_eq!(char_poly(&cyc).to_string(), "t^3 - 1");
        assert_eq!(fig8_matrix().determinant(), BigInt::from(1));
    }

    #[test]
    fn root_counts() {
        assert_eq!(count_real_roots(&poly(&[1, -3, 1]), &Interval::Positive).unwrap(), 2);
        assert_eq!(count_real_roots(&poly(&[1, 3, 1]), &Interval::Positive).unwrap(), 0);
        assert_eq!(count_real_roots(&poly(&[-1, 0, 0, 1]), &Interval::Positive).unwrap(), 1);
        assert_eq!(count_real_roots(&poly(&[-1, 0, 0, 1]), &Interval::All).unwrap(), 1);
        // (t-1)^3: one distinct root, multiplicity three.
        let cube = poly(&[-1, 3, -3, 1]);
        assert_eq!(count_real_roots(&cube, &Interval::Positive).unwrap(), 1);
        assert_eq!(total_real_root_multiplicity(&cube, &Interval::Positive).unwrap(), 3);
        // t (t - 1)(t - 2): endpoints excluded from open intervals.
        let p = poly(&[0, 2, -3, 1]);
        assert_eq!(count_real_roots(&p, &Interval::Positive).unwrap(), 2);
        assert_eq!(count_real_roots(&p, &Interval::Open(rat(0, 1), rat(2, 1))).unwrap(), 1);
        assert_eq!(count_real_roots(&p, &Interval::Open(rat(-1, 2), rat(5, 2))).unwrap(), 3);
        assert_eq!(count_real_roots(&p, &Interval::Open(rat(1, 1), rat(1, 1))).unwrap(), 0);
        assert!(count_real_roots(&poly(&[]), &Interval::All).is_err());
    }

    #[test]
    fn eigen_examples() {
        assert_eq!(eigen_certificate(&fig8_matrix()), EigenVerdict::AllRealPositive);
        assert_eq!(eigen_certificate(&sibling_matrix()), EigenVerdict::NoPositiveReal);
        let cyc = IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(eigen_certificate(&cyc), EigenVerdict::HasPositiveReal);
        let wm = abelianize(&whitehead_monodromy());
        assert_eq!(eigen_certificate(&wm), EigenVerdict::AllRealPositive);
        assert!(alternating_signs(&char_poly(&wm)));
    }

    #[test]
    fn matrix_json() {
        let m: IntMatrix = serde_json::from_str("[[2,1],[1,1]]").unwrap();
        assert_eq!(m, fig8_matrix());
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[2,1],[1,1]]");
        assert!(serde_json::from_str::<IntMatrix>("[[1,2]]").is_err());
    }
}
