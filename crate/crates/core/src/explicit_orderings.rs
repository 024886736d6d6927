//! A non-standard bi-ordering of `F_n` invariant under the type-1 periodic
//! braid `delta_n sigma_1`, pulled back from `F_2 = <u, v>` through an
//! index-`(n-1)` subgroup `K_n` freely generated by `z_1, ..., z_n`.

use crate::artin::{interior_action, Convention, FreeEndo};
use crate::braid_core::BraidWord;
use crate::error::{Error, Result};
use crate::free_group::FreeWord;
use crate::magnus_order::{MagnusOrder, OrderSign};

const U: i32 = 1;
const V: i32 = 2;

pub fn cover_names() -> Vec<String> {
    vec!["u".to_string(), "v".to_string()]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverEmbedding {
    n: usize,
    z_images: Vec<FreeWord>,
}

fn u_pow(k: i64) -> Vec<i32> {
    let l = if k >= 0 { U } else { -U };
    vec![l; k.unsigned_abs() as usize]
}

/// `z_1 = v`, `z_2 = u^(n-1)`, `z_j = u^(n-j+1) v u^(j-n-1)`.
pub fn cover_embedding(n: usize) -> Result<CoverEmbedding> {
    if n < 3 {
        return Err(Error::Domain(format!("cover embedding needs n >= 3, got {n}")));
    }
    let n_i = n as i64;
    let mut z_images = vec![
        FreeWord::reduce(&[V], 2)?,
        FreeWord::reduce(&u_pow(n_i - 1), 2)?,
    ];
    for j in 3..=n_i {
        let mut letters = u_pow(n_i - j + 1);
        letters.push(V);
        letters.extend(u_pow(j - n_i - 1));
        z_images.push(FreeWord::reduce(&letters, 2)?);
    }
    Ok(CoverEmbedding { n, z_images })
}

impl CoverEmbedding {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z_images(&self) -> &[FreeWord] {
        &self.z_images
    }

    pub fn embed(&self, w: &FreeWord) -> Result<FreeWord> {
        if w.rank() != self.n {
            return Err(Error::RankMismatch {
                left: self.n,
                right: w.rank(),
            });
        }
        let mut letters = Vec::new();
        for &l in w.letters() {
            let z = &self.z_images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                letters.extend_from_slice(z.letters());
            } else {
                letters.extend(z.letters().iter().rev().map(|x| -x));
            }
        }
        FreeWord::reduce(&letters, 2)
    }
}

/// `x_1 -> x_n`, `x_2 -> x_2`, `x_3 -> x_2 x_1 x_2^-1`, `x_j -> x_{j-1}` for `j >= 4`.
pub fn type1_action(n: usize) -> Result<FreeEndo> {
    if n < 3 {
        return Err(Error::Domain(format!("type-1 action needs n >= 3, got {n}")));
    }
    let mut images = vec![
        FreeWord::generator(n, n, false)?,
        FreeWord::generator(n, 2, false)?,
        FreeWord::reduce(&[2, 1, -2], n)?,
    ];
    for j in 4..=n {
        images.push(FreeWord::generator(n, j - 1, false)?);
    }
    FreeEndo::new(images, Convention::Explicit)
}

/// Named orderings of `F_2` that induce orders on `F_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverOrder {
    /// Magnus order with `U < V`.
    Standard,
    /// Magnus order with `V < U`.
    Swapped,
}

impl CoverOrder {
    pub fn magnus(self) -> MagnusOrder {
        match self {
            CoverOrder::Standard => MagnusOrder::standard(2),
            CoverOrder::Swapped => {
                MagnusOrder::with_variable_order(&[2, 1]).expect("valid permutation")
            }
        }
    }
}

pub fn induced_sign(w: &FreeWord, n: usize) -> Result<OrderSign> {
    induced_sign_with(w, n, CoverOrder::Standard)
}

pub fn induced_sign_with(w: &FreeWord, n: usize, order: CoverOrder) -> Result<OrderSign> {
    let emb = cover_embedding(n)?;
    order.magnus().sign(&emb.embed(w)?)
}

/// Shortest `w` (up to `max_len` letters) with
/// `inner_twist(interior_action(delta_n sigma_1), w) == type1_action(n)`.
pub fn type1_twist_search(n: usize, max_len: usize) -> Result<Option<FreeWord>> {
    let target = type1_action(n)?;
    let beta = BraidWord::delta(n)?.compose(&BraidWord::new(n, &[1])?)?;
    let phi = interior_action(&beta);
    let alphabet: Vec<i32> = (1..=n as i32).flat_map(|i| [i, -i]).collect();
    let mut layer = vec![Vec::<i32>::new()];
    for _ in 0..=max_len {
        for letters in &layer {
            let w = FreeWord::reduce(letters, n)?;
            if phi.inner_twist(&w)?.images() == target.images() {
                return Ok(Some(w));
            }
        }
        let mut next = Vec::new();
        for letters in &layer {
            for &a in &alphabet {
                if letters.last() == Some(&-a) {
                    continue;
                }
                let mut l = letters.clone();
                l.push(a);
                next.push(l);
            }
        }
        layer = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::parse_word;
    use crate::free_group::parse_word_named;

    fn f2(text: &str) -> FreeWord {
        parse_word_named(text, &cover_names()).unwrap()
    }

    #[test]
    fn embedding_examples() {
        let e = cover_embedding(3).unwrap();
        assert_eq!(e.z_images(), &[f2("v"), f2("u^2"), f2("u v u^-1")]);
        assert_eq!(e.embed(&parse_word("x1 x2", 3).unwrap()).unwrap(), f2("v u^2"));
        let e9 = cover_embedding(9).unwrap();
        assert_eq!(e9.embed(&parse_word("x3", 9).unwrap()).unwrap(), f2("u^7 v u^-7"));
        assert!(cover_embedding(2).is_err());
    }

    #[test]
    fn type1_examples() {
        let p3 = type1_action(3).unwrap();
        let imgs: Vec<String> = p3.images().iter().map(|w| w.to_string()).collect();
        assert_eq!(imgs, ["x3", "x2", "x2 x1 x2^-1"]);
        let p4 = type1_action(4).unwrap();
        let imgs: Vec<String> = p4.images().iter().map(|w| w.to_string()).collect();
        assert_eq!(imgs, ["x4", "x2", "x2 x1 x2^-1", "x3"]);
        let x2 = parse_word("x2", 5).unwrap();
        assert_eq!(type1_action(5).unwrap().apply(&x2).unwrap(), x2);
    }

    #[test]
    fn induced_sign_examples() {
        assert_eq!(induced_sign(&parse_word("x2", 3).unwrap(), 3).unwrap(), OrderSign::Positive);
        assert_eq!(
            induced_sign(&parse_word("x1^-1", 3).unwrap(), 3).unwrap(),
            OrderSign::Negative
        );
        assert_eq!(induced_sign(&FreeWord::identity(3), 3).unwrap(), OrderSign::Zero);
    }

    #[test]
    fn intertwines_with_u_conjugation() {
        let u = f2("u");
        for n in 3..=9 {
            let e = cover_embedding(n).unwrap();
            let phi = type1_action(n).unwrap();
            for i in 1..=n {
                let x = FreeWord::generator(n, i, false).unwrap();
                let lhs = e.embed(&phi.apply(&x).unwrap()).unwrap();
                let rhs = FreeWord::conj(&u, &e.embed(&x).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn twist_relates_to_interior_composite() {
        for n in 3..=6 {
            let w = type1_twist_search(n, 4).unwrap().expect("twist found");
            assert_eq!(w, FreeWord::generator(n, n, true).unwrap(), "n={n}");
        }
    }

    #[test]
    fn non_pure_yet_invariant() {
        let phi = type1_action(4).unwrap();
        assert!(phi.is_symmetric() && !phi.is_pure_symmetric());
        let g = parse_word("x1^-1 x3 x2^2 x4^-1", 4).unwrap();
        for order in [CoverOrder::Standard, CoverOrder::Swapped] {
            let mut h = g.clone();
            let s = induced_sign_with(&g, 4, order).unwrap();
            for _ in 0..5 {
                h = phi.apply(&h).unwrap();
                assert_eq!(induced_sign_with(&h, 4, order).unwrap(), s);
            }
        }
    }
}
