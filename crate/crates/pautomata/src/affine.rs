//! The carry automaton of a nondegenerate integer matrix.
//!
//! For an `r x r` integer matrix `M` of infinite order with `det(M)` coprime
//! to `n >= 2`, the automaton has states
//! `Q = {v in Z^r : -n(M) <= v_i <= n(M)-1}` (with `n(M)` the max norm),
//! alphabet `{0,…,n-1}^r`, and
//! `next(v, x) = Div_n(v + Mx)`, `out(v, x) = Mod_n(v + Mx)`.
//! The state at vector `v` computes `X -> M·X + v` on base-`n` digit
//! streams; its group is the ascending HNN extension of `Z^r` with stable
//! letter acting by `M`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{divmod_vec, IntMatrix, IntVector};
use crate::transducer::{PermAutomaton, PointedAutomaton};
use crate::words;

/// Default cap on the number of states `(2 n(M))^r`.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// The built automaton together with its defining data.
#[derive(Clone, Debug)]
pub struct AffineAutomaton {
    automaton: PermAutomaton,
    matrix: IntMatrix,
    n: usize,
    norm: usize,
    rank: usize,
}

impl AffineAutomaton {
    /// Validates the hypotheses and builds the automaton.
    ///
    /// Errors: "degenerate matrix", "det not coprime to n",
    /// "finite order matrix".
    pub fn build(matrix: IntMatrix, n: usize) -> Result<Self> {
        Self::build_capped(matrix, n, DEFAULT_STATE_CAP)
    }

    pub fn build_capped(matrix: IntMatrix, n: usize, cap: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        if n < 2 {
            return Err(Error::InvalidInput("n must be at least 2".into()));
        }
        let det = matrix.det();
        if det.is_zero() {
            return Err(Error::DegenerateMatrix);
        }
        if det.abs().gcd(&BigInt::from(n)) != BigInt::from(1) {
            return Err(Error::DetNotCoprime);
        }
        if !matrix.has_infinite_order()? {
            return Err(Error::FiniteOrderMatrix);
        }

        let rank = matrix.rows();
        let norm = matrix.max_norm_usize()?;
        let side = 2 * norm;
        let state_count = words::count(side, rank)
            .filter(|&c| c <= cap)
            .ok_or_else(|| Error::CapExceeded {
                what: format!("state box (2*{norm})^{rank}"),
            })?;
        let letter_count = words::count(n, rank).ok_or_else(|| Error::CapExceeded {
            what: format!("alphabet {n}^{rank}"),
        })?;

        let letters_coords: Vec<Vec<usize>> =
            (0..letter_count).map(|r| words::unrank(r, n, rank)).collect();
        let mut ids = Vec::with_capacity(state_count);
        let mut next = Vec::with_capacity(state_count);
        let mut out = Vec::with_capacity(state_count);
        for s in 0..state_count {
            let v = Self::vector_for(s, norm, rank);
            ids.push(vector_id(&v));
            let mut next_row = Vec::with_capacity(letter_count);
            let mut out_row = Vec::with_capacity(letter_count);
            for x in &letters_coords {
                let image = matrix.affine_image(&v, x);
                let (q, rem) = divmod_vec(&image, n as u64);
                // Box closure is forced by the floor-division convention; a
                // failure here falsifies that design choice.
                let q_index = Self::index_for(&q, norm, rank).ok_or_else(|| {
                    Error::InvalidInput(format!("state box not closed at {v:?} + M{x:?}"))
                })?;
                next_row.push(q_index);
                let rem_digits: Vec<usize> = rem
                    .entries()
                    .iter()
                    .map(|e| usize::try_from(e).expect("remainder in range"))
                    .collect();
                out_row.push(words::rank(&rem_digits, n));
            }
            next.push(next_row);
            out.push(out_row);
        }
        let automaton =
            PermAutomaton::with_letters(words::vector_names(n, rank), ids, next, out)?;
        // gcd(det M, n) = 1 makes every state's output a bijection.
        assert!(
            automaton.is_permutational(),
            "coprime determinant guarantees bijective outputs"
        );
        Ok(AffineAutomaton {
            automaton,
            matrix,
            n,
            norm,
            rank,
        })
    }

    fn vector_for(index: usize, norm: usize, rank: usize) -> IntVector {
        let digits = words::unrank(index, 2 * norm, rank);
        IntVector(
            digits
                .into_iter()
                .map(|d| BigInt::from(d as i64 - norm as i64))
                .collect(),
        )
    }

    fn index_for(v: &IntVector, norm: usize, rank: usize) -> Option<usize> {
        let mut digits = Vec::with_capacity(rank);
        for e in v.entries() {
            let shifted = e + BigInt::from(norm as i64);
            let d = usize::try_from(&shifted).ok()?;
            if d >= 2 * norm {
                return None;
            }
            digits.push(d);
        }
        Some(words::rank(&digits, 2 * norm))
    }

    pub fn automaton(&self) -> &PermAutomaton {
        &self.automaton
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn norm(&self) -> usize {
        self.norm
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn state_count(&self) -> usize {
        self.automaton.state_count()
    }

    /// State index of an integer vector in the box, if it lies there.
    pub fn state_of_vector(&self, v: &IntVector) -> Option<usize> {
        Self::index_for(v, self.norm, self.rank)
    }

    pub fn vector_of_state(&self, q: usize) -> IntVector {
        Self::vector_for(q, self.norm, self.rank)
    }

    /// The state at the zero vector.
    pub fn zero_state(&self) -> usize {
        self.state_of_vector(&IntVector::zeros(self.rank))
            .expect("0 lies in the box")
    }

    /// The states at the negated unit vectors `u_i = -e_i`.
    pub fn negated_unit_states(&self) -> Vec<usize> {
        (0..self.rank)
            .map(|i| {
                let mut v = vec![0i64; self.rank];
                v[i] = -1;
                self.state_of_vector(&IntVector::from_i64(&v))
                    .expect("-e_i lies in the box")
            })
            .collect()
    }

    pub fn pointed(&self, state: usize) -> PointedAutomaton {
        self.automaton.pointed(state)
    }

    /// Letter index of a digit vector.
    pub fn letter_of(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.rank || coords.iter().any(|&c| c >= self.n) {
            return Err(Error::InvalidInput(format!("bad letter {coords:?}")));
        }
        Ok(words::rank(coords, self.n))
    }
}

pub(crate) fn vector_id(v: &IntVector) -> String {
    v.entries()
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
