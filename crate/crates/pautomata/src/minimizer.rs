//! Alphabet minimization: re-expressing an automaton over `X` as an
//! automaton over a smaller alphabet `Y`, given an embedding of its state
//! group into a wreath power of a group acting on `Y`.
//!
//! States of the new machine are pairs `(q, w)` with `w` a word over `Y` of
//! length below `r`; the machine buffers letters of the encoded word,
//! transforming each through the portrait of the current state's output
//! permutation, and advances the base machine once a full encoded letter has
//! been read. Off-image letters freeze the buffer and pass through.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::exec;
use crate::perm::Permutation;
use crate::sylow::TreeEmbedding;
use crate::transducer::{PermAutomaton, PointedAutomaton};
use crate::words;
use crate::wreath::{decompose_tree_perm, WreathElement};

/// An injection `psi : X -> Y^r` together with portraits for the state
/// permutations, satisfying `psi(x^g) = psi(x)^{phi(g)}`.
#[derive(Clone, Debug)]
pub struct EmbeddingData {
    r: usize,
    y: usize,
    psi: Vec<Vec<usize>>,
    psi_inverse: HashMap<Vec<usize>, usize>,
    phi: BTreeMap<Permutation, WreathElement>,
    /// All prefixes of the encoded letters, including the empty word and the
    /// full words.
    prefixes: HashSet<Vec<usize>>,
}

impl EmbeddingData {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn y(&self) -> usize {
        self.y
    }

    pub fn psi(&self, x: usize) -> &[usize] {
        &self.psi[x]
    }

    pub fn psi_inverse(&self, word: &[usize]) -> Option<usize> {
        self.psi_inverse.get(word).copied()
    }

    pub fn phi(&self, g: &Permutation) -> Option<&WreathElement> {
        self.phi.get(g)
    }

    pub fn in_prefixes(&self, word: &[usize]) -> bool {
        self.prefixes.contains(word)
    }

    /// True when `psi` is onto all of `Y^r` (the pipeline case).
    pub fn psi_is_bijective(&self) -> bool {
        words::count(self.y, self.r) == Some(self.psi.len())
    }

    /// Monoid extension of `psi`: concatenation of the encoded letters.
    pub fn extend(&self, word: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(word.len() * self.r);
        for &x in word {
            out.extend_from_slice(&self.psi[x]);
        }
        out
    }
}

/// Free-function form of [`EmbeddingData::extend`].
pub fn phi_extend(emb: &EmbeddingData, word: &[usize]) -> Vec<usize> {
    emb.extend(word)
}

/// Derives embedding data for an automaton from a tree embedding of its
/// state group: `psi` is the relabeling itself and each state permutation's
/// portrait is its conjugate under the relabeling.
///
/// Errors with "state permutation not prefix-preserving under pi" when some
/// state's output permutation does not conjugate into a strict portrait —
/// the sign of a wrong embedding.
pub fn embedding_from_tree(e: &TreeEmbedding, a: &PermAutomaton) -> Result<EmbeddingData> {
    if e.len() != a.alphabet() {
        return Err(Error::LengthMismatch {
            expected: a.alphabet(),
            got: e.len(),
        });
    }
    let r = e.k();
    let y = e.p();
    let psi: Vec<Vec<usize>> = (0..a.alphabet()).map(|x| e.word(x).to_vec()).collect();

    let mut phi = BTreeMap::new();
    for q in 0..a.state_count() {
        let perm = a.out_perm(q)?;
        if phi.contains_key(&perm) {
            continue;
        }
        let portrait = decompose_tree_perm(&e.conjugate(&perm), y, true).map_err(|err| {
            match err {
                Error::NotPrefixPreserving | Error::LocalActionOutsideCyclic => {
                    Error::EmbeddingMismatch
                }
                other => other,
            }
        })?;
        phi.insert(perm, portrait);
    }

    let mut psi_inverse = HashMap::with_capacity(psi.len());
    let mut prefixes = HashSet::new();
    for (x, word) in psi.iter().enumerate() {
        psi_inverse.insert(word.clone(), x);
        for len in 0..=r {
            prefixes.insert(word[..len].to_vec());
        }
    }

    let emb = EmbeddingData {
        r,
        y,
        psi,
        psi_inverse,
        phi,
        prefixes,
    };

    // Equivariance holds by construction; re-verify exhaustively.
    for q in 0..a.state_count() {
        let perm = a.out_perm(q)?;
        let portrait = &emb.phi[&perm];
        for x in 0..a.alphabet() {
            let lhs = emb.psi(perm.apply(x));
            let rhs = portrait.apply(emb.psi(x))?;
            if lhs != rhs.as_slice() {
                return Err(Error::EmbeddingMismatch);
            }
        }
    }
    Ok(emb)
}

/// The automaton over `Y` produced by [`build_b`].
#[derive(Clone, Debug)]
pub struct MinimizedAutomaton {
    automaton: PermAutomaton,
    base_states: usize,
    r: usize,
    y: usize,
    /// Index of `(q, empty)` per base state `q`; these generate the image of
    /// the original group.
    section: Vec<usize>,
    /// Whether every state's output map is a bijection; always true when
    /// `psi` is bijective, and checked rather than assumed otherwise.
    permutational: bool,
}

impl MinimizedAutomaton {
    pub fn automaton(&self) -> &PermAutomaton {
        &self.automaton
    }

    pub fn base_states(&self) -> usize {
        self.base_states
    }

    pub fn state_count(&self) -> usize {
        self.automaton.state_count()
    }

    /// Number of wreath factors (encoded-letter length).
    pub fn r(&self) -> usize {
        self.r
    }

    /// Target alphabet size.
    pub fn y(&self) -> usize {
        self.y
    }

    pub fn is_permutational(&self) -> bool {
        self.permutational
    }

    /// The distinguished state `(q, empty)`.
    pub fn section_state(&self, q: usize) -> usize {
        self.section[q]
    }

    pub fn section_pointed(&self, q: usize) -> PointedAutomaton {
        self.automaton.pointed(self.section[q])
    }
}

/// Ranks words of length `< r` over `Y`, shortest first, lexicographic
/// within a length.
fn word_rank(word: &[usize], y: usize) -> usize {
    let shorter: usize = (0..word.len()).map(|l| words::count(y, l).unwrap()).sum();
    shorter + words::rank(word, y)
}

fn word_unrank(mut rank: usize, y: usize, r: usize) -> Vec<usize> {
    for len in 0..r {
        let at_len = words::count(y, len).unwrap();
        if rank < at_len {
            return words::unrank(rank, y, len);
        }
        rank -= at_len;
    }
    unreachable!("rank within the buffer range");
}

/// Number of buffer words: `(y^r - 1) / (y - 1)`.
fn buffer_count(y: usize, r: usize) -> usize {
    (0..r).map(|l| words::count(y, l).unwrap()).sum()
}

/// Builds the minimized automaton over `Y` for `a` and the given embedding.
///
/// The full state set `Q x Y^{<r}` is constructed, including buffer words
/// that are not prefixes of any encoded letter; those states freeze, and the
/// pipeline separately checks they are unreachable when `psi` is bijective.
pub fn build_b(a: &PermAutomaton, emb: &EmbeddingData) -> Result<MinimizedAutomaton> {
    if emb.psi.len() != a.alphabet() {
        return Err(Error::LengthMismatch {
            expected: a.alphabet(),
            got: emb.psi.len(),
        });
    }
    let (y, r) = (emb.y(), emb.r());
    let buffers = buffer_count(y, r);
    let total = a
        .state_count()
        .checked_mul(buffers)
        .ok_or_else(|| Error::CapExceeded {
            what: "minimized state count".into(),
        })?;

    let portraits: Vec<&WreathElement> = (0..a.state_count())
        .map(|q| {
            let perm = a.out_perm(q)?;
            emb.phi(&perm).ok_or(Error::EmbeddingMismatch)
        })
        .collect::<Result<_>>()?;

    let state_index = |q: usize, wrank: usize| q * buffers + wrank;
    let mut ids = Vec::with_capacity(total);
    let mut next = Vec::with_capacity(total);
    let mut out = Vec::with_capacity(total);
    let mut permutational = true;
    for q in 0..a.state_count() {
        for wrank in 0..buffers {
            let w = word_unrank(wrank, y, r);
            ids.push(format!(
                "{}|{}",
                a.state_id(q),
                w.iter().map(|d| d.to_string()).collect::<String>()
            ));
            let mut next_row = Vec::with_capacity(y);
            let mut out_row = Vec::with_capacity(y);
            for letter in 0..y {
                let mut wy = w.clone();
                wy.push(letter);
                let in_prefixes = emb.in_prefixes(&wy);
                // Output: transform through the portrait while inside the
                // prefix set, pass through otherwise.
                if in_prefixes {
                    let image = portraits[q].apply_prefix(&wy)?;
                    out_row.push(*image.last().expect("nonempty image"));
                } else {
                    out_row.push(letter);
                }
                // Transition: extend the buffer, complete an encoded letter,
                // or freeze.
                if w.len() < r - 1 && in_prefixes {
                    next_row.push(state_index(q, word_rank(&wy, y)));
                } else if w.len() == r - 1 && in_prefixes {
                    let x = emb.psi_inverse(&wy).expect("full prefix is an encoded letter");
                    next_row.push(state_index(a.next(q, x), 0));
                } else {
                    next_row.push(state_index(q, wrank));
                }
            }
            if Permutation::new(out_row.clone()).is_err() {
                permutational = false;
            }
            next.push(next_row);
            out.push(out_row);
        }
    }
    let automaton = PermAutomaton::new(y, ids, next, out)?;
    let section = (0..a.state_count()).map(|q| state_index(q, 0)).collect();
    Ok(MinimizedAutomaton {
        automaton,
        base_states: a.state_count(),
        r,
        y,
        section,
        permutational,
    })
}

/// A counterexample found by [`verify_minimization`].
#[derive(Clone, Debug)]
pub struct MinimizationWitness {
    pub state: String,
    pub word: Vec<usize>,
}

/// Outcome of [`verify_minimization`].
#[derive(Clone, Debug)]
pub struct MinimizationCheck {
    /// Encoded action matches: from every `(q, empty)`, acting on the
    /// encoding of `w` equals encoding the action on `w`, for all `|w| <= d`.
    pub encoded_action: bool,
    /// Off-image behavior: a letter leaving the prefix set passes through
    /// unchanged and freezes the state, checked at every state and letter.
    pub freeze: bool,
    pub witness: Option<MinimizationWitness>,
}

impl MinimizationCheck {
    pub fn passed(&self) -> bool {
        self.encoded_action && self.freeze
    }
}

/// Exhaustively verifies the encoded-action identity to depth `d`, plus the
/// per-letter freeze behavior at every state.
pub fn verify_minimization(
    a: &PermAutomaton,
    b: &MinimizedAutomaton,
    emb: &EmbeddingData,
    d: usize,
) -> Result<MinimizationCheck> {
    let witness = exec::find_map_first(a.state_count(), |q| {
        encoded_action_witness(a, b, emb, d, q).map(|word| MinimizationWitness {
            state: a.state_id(q).to_string(),
            word,
        })
    });
    let freeze = freeze_everywhere(b, emb);
    Ok(MinimizationCheck {
        encoded_action: witness.is_none(),
        freeze,
        witness,
    })
}

/// Sequential variant of [`verify_minimization`], kept as the reference
/// implementation and for benchmarking against the parallel path.
pub fn verify_minimization_seq(
    a: &PermAutomaton,
    b: &MinimizedAutomaton,
    emb: &EmbeddingData,
    d: usize,
) -> Result<MinimizationCheck> {
    let witness = (0..a.state_count()).find_map(|q| {
        encoded_action_witness(a, b, emb, d, q).map(|word| MinimizationWitness {
            state: a.state_id(q).to_string(),
            word,
        })
    });
    let freeze = freeze_everywhere(b, emb);
    Ok(MinimizationCheck {
        encoded_action: witness.is_none(),
        freeze,
        witness,
    })
}

/// Depth-first search over the word tree rooted at base state `q`, advancing
/// both machines letter by letter; returns the first mismatching word.
fn encoded_action_witness(
    a: &PermAutomaton,
    b: &MinimizedAutomaton,
    emb: &EmbeddingData,
    d: usize,
    q: usize,
) -> Option<Vec<usize>> {
    let bm = b.automaton();
    let mut path: Vec<usize> = Vec::new();
    return dfs(a, bm, emb, d, q, b.section_state(q), &mut path);

    fn dfs(
        a: &PermAutomaton,
        bm: &PermAutomaton,
        emb: &EmbeddingData,
        d: usize,
        qa: usize,
        qb: usize,
        path: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if path.len() == d {
            return None;
        }
        for x in 0..a.alphabet() {
            path.push(x);
            let expected = emb.psi(a.out(qa, x));
            let mut qb_next = qb;
            let mut ok = true;
            for (i, &letter) in emb.psi(x).iter().enumerate() {
                if bm.out(qb_next, letter) != expected[i] {
                    ok = false;
                    break;
                }
                qb_next = bm.next(qb_next, letter);
            }
            if !ok {
                return Some(path.clone());
            }
            if let Some(w) = dfs(a, bm, emb, d, a.next(qa, x), qb_next, path) {
                return Some(w);
            }
            path.pop();
        }
        None
    }
}

fn freeze_everywhere(b: &MinimizedAutomaton, emb: &EmbeddingData) -> bool {
    let bm = b.automaton();
    let buffers = buffer_count(emb.y(), emb.r());
    (0..bm.state_count()).all(|s| {
        let w = word_unrank(s % buffers, emb.y(), emb.r());
        (0..emb.y()).all(|letter| {
            let mut wy = w.clone();
            wy.push(letter);
            if emb.in_prefixes(&wy) {
                true
            } else {
                bm.out(s, letter) == letter && bm.next(s, letter) == s
            }
        })
    })
}

/// Checks that the freeze branches are unreachable from the section states;
/// holds whenever `psi` is bijective.
pub fn freeze_unreachable(b: &MinimizedAutomaton, emb: &EmbeddingData) -> bool {
    let bm = b.automaton();
    let buffers = buffer_count(emb.y(), emb.r());
    let mut seen = vec![false; bm.state_count()];
    let mut stack: Vec<usize> = (0..b.base_states()).map(|q| b.section_state(q)).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(s) = stack.pop() {
        let w = word_unrank(s % buffers, emb.y(), emb.r());
        for letter in 0..emb.y() {
            let mut wy = w.clone();
            wy.push(letter);
            if !emb.in_prefixes(&wy) {
                return false;
            }
            let t = bm.next(s, letter);
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    true
}
