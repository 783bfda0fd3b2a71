//! Word and vector rankings shared by every module.
//!
//! A word `w = w_0 w_1 … w_{k-1}` over `{0, …, base-1}` is ranked as the
//! big-endian base-`base` numeral `w_0 w_1 … w_{k-1}`. The same convention
//! ranks an integer vector used as a letter, and a function `f : X -> Y`
//! (listed in sorted `X` order) used as a point of an exponentiation domain.

use crate::error::{Error, Result};

/// Big-endian rank of a word over `{0, …, base-1}`.
pub fn rank(word: &[usize], base: usize) -> usize {
    word.iter().fold(0, |acc, &d| {
        debug_assert!(d < base);
        acc * base + d
    })
}

/// Inverse of [`rank`] for words of a fixed length.
pub fn unrank(mut r: usize, base: usize, len: usize) -> Vec<usize> {
    let mut word = vec![0; len];
    for slot in word.iter_mut().rev() {
        *slot = r % base;
        r /= base;
    }
    debug_assert_eq!(r, 0);
    word
}

/// `base^len`, or `None` on overflow.
pub fn count(base: usize, len: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(len).ok()?)
}

/// All words of the given length in rank (lexicographic) order.
pub fn words_of_length(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = count(base, len).expect("word count overflow");
    (0..total).map(move |r| unrank(r, base, len))
}

/// Letter name for a coordinate vector: `"1,0"`; scalars print as `"3"`.
pub fn letter_name(coords: &[usize]) -> String {
    coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_letter_name(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad letter component {part:?}")))
        })
        .collect()
}

/// Names for the scalar alphabet `{0, …, n-1}`.
pub fn scalar_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Names for the vector alphabet `{0, …, base-1}^dims` in rank order.
pub fn vector_names(base: usize, dims: usize) -> Vec<String> {
    let total = count(base, dims).expect("alphabet size overflow");
    (0..total)
        .map(|r| letter_name(&unrank(r, base, dims)))
        .collect()
}

pub(crate) fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// If `n = base^k` exactly, returns `k`.
pub fn log_exact(n: usize, base: usize) -> Option<usize> {
    if base < 2 || n == 0 {
        return None;
    }
    let mut k = 0;
    let mut m = n;
    while m > 1 {
        if m % base != 0 {
            return None;
        }
        m /= base;
        k += 1;
    }
    Some(k)
}
