//! Braids acting on free groups: the boundary-basepoint Artin representation,
//! the interior-basepoint variant, and endomorphisms of `F_r` in general.
//!
//! Actions are right actions: `x^{beta gamma} = (x^beta)^gamma`, so the image of
//! a word under `beta gamma` is obtained by applying the generator rules of
//! `beta` first and then those of `gamma`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::braid_core::BraidWord;
use crate::error::{Error, Result};
use crate::free_group::{default_names, parse_word_named, FreeWord, Letter};
use crate::spectra::IntMatrix;

/// Output-length cap for [`FreeEndo::apply`].
pub const DEFAULT_LENGTH_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Basepoint on the boundary: `x_i -> x_i x_{i+1} x_i^-1`, `x_{i+1} -> x_i`.
    Boundary,
    /// Basepoint in the interior: `x_i -> x_{i+1}`, `x_{i+1} -> x_{i+1} x_i x_{i+1}^-1`.
    Interior,
    /// Given directly by generator images.
    Explicit,
}

impl Convention {
    fn merge(self, other: Convention) -> Result<Convention> {
        match (self, other) {
            (a, b) if a == b => Ok(a),
            (Convention::Explicit, b) => Ok(b),
            (a, Convention::Explicit) => Ok(a),
            (a, b) => Err(Error::ConventionMismatch { left: a, right: b }),
        }
    }
}

/// `(i, j, e, right)`: `x_i -> x_i x_j^e` when `right`, else `x_j^e x_i`.
type NielsenMove = (usize, usize, i64, bool);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeEndo {
    rank: usize,
    images: Vec<FreeWord>,
    convention: Convention,
}

impl FreeEndo {
    pub fn new(images: Vec<FreeWord>, convention: Convention) -> Result<Self> {
        let rank = images.len();
        for w in &images {
            if w.rank() != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: w.rank(),
                });
            }
        }
        Ok(FreeEndo {
            rank,
            images,
            convention,
        })
    }

    pub fn identity(rank: usize, convention: Convention) -> Self {
        let images = (1..=rank)
            .map(|i| FreeWord::generator(rank, i, false).unwrap())
            .collect();
        FreeEndo {
            rank,
            images,
            convention,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    /// Image of generator `x_i` (1-based).
    pub fn image(&self, i: usize) -> &FreeWord {
        &self.images[i - 1]
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord> {
        self.apply_capped(w, DEFAULT_LENGTH_CAP)
    }

    pub fn apply_capped(&self, w: &FreeWord, cap: usize) -> Result<FreeWord> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: w.rank(),
            });
        }
        let mut out: Vec<Letter> = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            let push = |out: &mut Vec<Letter>, x: Letter| {
                if out.last() == Some(&-x) {
                    out.pop();
                } else {
                    out.push(x);
                }
            };
            if l > 0 {
                for &x in img.letters() {
                    push(&mut out, x);
                }
            } else {
                for &x in img.letters().iter().rev() {
                    push(&mut out, -x);
                }
            }
            if out.len() > cap {
                return Err(Error::LengthCap { cap });
            }
        }
        Ok(FreeWord::from_trusted(self.rank, out))
    }

    /// `self` then `other`: `x -> other(self(x))`.
    pub fn compose(&self, other: &FreeEndo) -> Result<FreeEndo> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let convention = self.convention.merge(other.convention)?;
        let images = self
            .images
            .iter()
            .map(|w| other.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeEndo {
            rank: self.rank,
            images,
            convention,
        })
    }

    pub fn power(&self, k: usize) -> Result<FreeEndo> {
        let mut acc = FreeEndo::identity(self.rank, self.convention);
        for _ in 0..k {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// `x -> w * self(x) * w^-1`.
    pub fn inner_twist(&self, w: &FreeWord) -> Result<FreeEndo> {
        let images = self
            .images
            .iter()
            .map(|img| FreeWord::conj(w, img))
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeEndo {
            rank: self.rank,
            images,
            convention: self.convention,
        })
    }

    /// For each generator, the generator index whose conjugate it maps to,
    /// when every image is a conjugate of a positive generator.
    pub fn symmetric_targets(&self) -> Option<Vec<usize>> {
        self.images
            .iter()
            .map(|img| {
                let (_, core) = img.cyclic_reduction();
                match core.letters() {
                    [l] if *l > 0 => Some(*l as usize),
                    _ => None,
                }
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric_targets().is_some()
    }

    pub fn is_pure_symmetric(&self) -> bool {
        self.symmetric_targets()
            .is_some_and(|t| t.iter().enumerate().all(|(i, &j)| j == i + 1))
    }

    /// Inverse automorphism, found by length-reducing Nielsen moves on the
    /// image tuple. Fails when the moves stall before reaching a permutation
    /// of the generators and their inverses.
    pub fn inverse(&self) -> Result<FreeEndo> {
        let r = self.rank;
        let mut u: Vec<FreeWord> = self.images.clone();
        let mut moves: Vec<NielsenMove> = Vec::new();
        loop {
            let mut best: Option<(usize, NielsenMove, FreeWord)> = None;
            for i in 0..r {
                for j in 0..r {
                    if i == j {
                        continue;
                    }
                    for e in [1i64, -1] {
                        let uj = u[j].pow(e);
                        for right in [true, false] {
                            let cand = if right {
                                u[i].mul_unchecked(&uj)
                            } else {
                                uj.mul_unchecked(&u[i])
                            };
                            let gain = u[i].len() as i64 - cand.len() as i64;
                            if gain > 0 && best.as_ref().is_none_or(|b| gain > b.0 as i64) {
                                best = Some((gain as usize, (i, j, e, right), cand));
                            }
                        }
                    }
                }
            }
            match best {
                Some((_, mv, cand)) => {
                    u[mv.0] = cand;
                    moves.push(mv);
                }
                None => break,
            }
        }
        // u_i = x_{p(i)}^{s_i}; the inverse of that permutation map first.
        let mut images = vec![FreeWord::identity(r); r];
        let mut hit = vec![false; r];
        for (i, w) in u.iter().enumerate() {
            let [l] = w.letters() else {
                return Err(Error::NotAutomorphism(format!(
                    "Nielsen reduction stalled at {w}"
                )));
            };
            let p = l.unsigned_abs() as usize - 1;
            if hit[p] {
                return Err(Error::NotAutomorphism("images are not a basis".into()));
            }
            hit[p] = true;
            images[p] = FreeWord::generator(r, i + 1, *l < 0)?;
        }
        for &(i, j, e, right) in moves.iter().rev() {
            let xi = FreeWord::generator(r, i + 1, false)?;
            let xj = FreeWord::generator(r, j + 1, e < 0)?;
            let mut eps_images: Vec<FreeWord> = (1..=r)
                .map(|k| FreeWord::generator(r, k, false))
                .collect::<Result<_>>()?;
            eps_images[i] = if right { xi.mul(&xj)? } else { xj.mul(&xi)? };
            let eps = FreeEndo {
                rank: r,
                images: eps_images,
                convention: Convention::Explicit,
            };
            images = images.iter().map(|w| eps.apply(w)).collect::<Result<_>>()?;
        }
        let inv = FreeEndo {
            rank: r,
            images,
            convention: self.convention,
        };
        for k in 1..=r {
            let x = FreeWord::generator(r, k, false)?;
            if self.apply(&inv.apply(&x)?)? != x {
                return Err(Error::NotAutomorphism("inverse check failed".into()));
            }
        }
        Ok(inv)
    }

    pub fn to_fixture(&self, names: Option<&[String]>) -> EndoFixture {
        let names: Vec<String> = names
            .map(|n| n.to_vec())
            .unwrap_or_else(|| default_names(self.rank));
        let images = names
            .iter()
            .zip(&self.images)
            .map(|(n, w)| (n.clone(), w.format_with(&names)))
            .collect();
        EndoFixture {
            convention: self.convention,
            generators: Some(names),
            images,
        }
    }
}

/// Endomorphism fixture: generator name -> image word text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoFixture {
    #[serde(default = "explicit")]
    pub convention: Convention,
    /// Generator order; defaults to `x1 .. xr` read off the image keys.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    pub images: BTreeMap<String, String>,
}

fn explicit() -> Convention {
    Convention::Explicit
}

impl EndoFixture {
    pub fn to_endo(&self) -> Result<FreeEndo> {
        let names = match &self.generators {
            Some(g) => g.clone(),
            None => default_names(self.images.len()),
        };
        if names.len() != self.images.len() {
            return Err(Error::Schema(format!(
                "{} generators but {} images",
                names.len(),
                self.images.len()
            )));
        }
        let images = names
            .iter()
            .map(|n| {
                let text = self
                    .images
                    .get(n)
                    .ok_or_else(|| Error::Schema(format!("missing image for {n}")))?;
                parse_word_named(text, &names)
            })
            .collect::<Result<Vec<_>>>()?;
        FreeEndo::new(images, self.convention)
    }
}

fn gen(rank: usize, l: Letter) -> FreeWord {
    FreeWord::from_trusted(rank, vec![l])
}

fn word(rank: usize, letters: &[Letter]) -> FreeWord {
    FreeWord::from_trusted(rank, letters.to_vec())
}

/// Image of `x_j` under one braid generator `s_i^{±1}` in the given convention.
fn generator_image(convention: Convention, rank: usize, letter: i32, j: usize) -> FreeWord {
    let i = letter.unsigned_abs() as i32;
    let j = j as i32;
    let (a, b) = (i, i + 1);
    if j != a && j != b {
        return gen(rank, j);
    }
    match (convention, letter > 0, j == a) {
        (Convention::Interior, true, true) => gen(rank, b),
        (Convention::Interior, true, false) => word(rank, &[b, a, -b]),
        (Convention::Interior, false, true) => word(rank, &[-a, b, a]),
        (Convention::Interior, false, false) => gen(rank, a),
        (_, true, true) => word(rank, &[a, b, -a]),
        (_, true, false) => gen(rank, a),
        (_, false, true) => gen(rank, b),
        (_, false, false) => word(rank, &[-b, a, b]),
    }
}

fn generator_endo(convention: Convention, rank: usize, letter: i32) -> FreeEndo {
    FreeEndo {
        rank,
        images: (1..=rank)
            .map(|j| generator_image(convention, rank, letter, j))
            .collect(),
        convention,
    }
}

fn braid_action(beta: &BraidWord, convention: Convention) -> FreeEndo {
    let rank = beta.strands();
    let gens: Vec<(FreeEndo, FreeEndo)> = (1..rank as i32)
        .map(|i| {
            (
                generator_endo(convention, rank, i),
                generator_endo(convention, rank, -i),
            )
        })
        .collect();
    let mut images: Vec<FreeWord> = (1..=rank).map(|j| gen(rank, j as Letter)).collect();
    for &l in beta.letters() {
        let (pos, neg) = &gens[l.unsigned_abs() as usize - 1];
        let g = if l > 0 { pos } else { neg };
        for img in images.iter_mut() {
            *img = g.apply_capped(img, usize::MAX).expect("ranks agree");
        }
    }
    FreeEndo {
        rank,
        images,
        convention,
    }
}

/// The Artin representation (boundary basepoint).
pub fn artin_action(beta: &BraidWord) -> FreeEndo {
    braid_action(beta, Convention::Boundary)
}

/// The interior-basepoint action.
pub fn interior_action(beta: &BraidWord) -> FreeEndo {
    braid_action(beta, Convention::Interior)
}

pub fn action(beta: &BraidWord, convention: Convention) -> Result<FreeEndo> {
    match convention {
        Convention::Explicit => Err(Error::Domain(
            "braid actions are boundary or interior".into(),
        )),
        c => Ok(braid_action(beta, c)),
    }
}

pub fn endo_equal(a: &FreeEndo, b: &FreeEndo) -> bool {
    a.rank == b.rank && a.images == b.images
}

/// Generator names `c0, c1, c2` of the Whitehead monodromy.
pub fn whitehead_names() -> Vec<String> {
    vec!["c0".into(), "c1".into(), "c2".into()]
}

/// The monodromy of the Whitehead link fibration on `F_3 = <c0, c1, c2>`.
pub fn whitehead_monodromy() -> FreeEndo {
    let names = whitehead_names();
    let images = [
        "c2 c0^-1 c1 c0 c1^-1 c0 c2^-1",
        "c2 c0^-1 c1",
        "c2 c0^-1",
    ]
    .iter()
    .map(|t| parse_word_named(t, &names).expect("static word"))
    .collect();
    FreeEndo::new(images, Convention::Explicit).expect("static endo")
}

/// Monodromy matrix of the figure-eight knot fibration.
pub fn fig8_matrix() -> IntMatrix {
    IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).expect("square")
}

/// Monodromy matrix of the figure-eight sibling.
pub fn sibling_matrix() -> IntMatrix {
    IntMatrix::from_rows(&[vec![-2, -1], vec![-1, -1]]).expect("square")
}
