#![allow(dead_code)]

use braidord::braid_core::BraidWord;
use braidord::free_group::FreeWord;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_letters<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Vec<i32> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let g = rng.gen_range(1..=rank as i32);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect()
}

pub fn random_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> FreeWord {
    FreeWord::reduce(&random_letters(rng, rank, max_len), rank).unwrap()
}

pub fn random_nontrivial_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> FreeWord {
    loop {
        let w = random_word(rng, rank, max_len);
        if !w.is_identity() {
            return w;
        }
    }
}

pub fn random_braid<R: Rng>(rng: &mut R, strands: usize, max_len: usize) -> BraidWord {
    BraidWord::new(strands, &random_letters(rng, strands - 1, max_len)).unwrap()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `beta^m` with `m` the order of the permutation of a random `beta`.
pub fn random_pure_braid<R: Rng>(rng: &mut R, strands: usize, max_len: usize) -> BraidWord {
    let b = random_braid(rng, strands, max_len);
    let order = b
        .permutation()
        .cycle_lengths()
        .into_iter()
        .fold(1, |acc, c| acc / gcd(acc, c) * c);
    let p = b.power(order as i64);
    assert!(p.is_pure());
    p
}
