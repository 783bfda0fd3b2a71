//! Permutational Mealy automata acting on words as tree automorphisms.
//!
//! States are indexed; the alphabet is an indexed set whose letters carry
//! display names (plain integers, or `"v1,v2"` for vector alphabets). The
//! action on words is the recursive extension: output the state's letter
//! image, advance on the input letter, repeat.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{is_power_of_cycle, Permutation};
use crate::words;

/// Default cap for materialized level permutations and composed state
/// counts.
pub const DEFAULT_SIZE_CAP: usize = 1_000_000;

#[derive(Clone, Debug)]
pub(crate) struct State {
    pub id: String,
    pub next: Vec<usize>,
    pub out: Vec<usize>,
}

/// A finite letter-to-letter transducer over an indexed alphabet.
///
/// The type does not force every state's output map to be a bijection;
/// operations that need invertibility check it and fail with
/// [`Error::NonPermutational`].
#[derive(Clone, Debug)]
pub struct PermAutomaton {
    alphabet: usize,
    letters: Vec<String>,
    states: Vec<State>,
}

/// An automaton together with a start state: one tree automorphism.
#[derive(Clone, Debug)]
pub struct PointedAutomaton {
    pub automaton: PermAutomaton,
    pub start: usize,
}

/// Certificate returned by [`PermAutomaton::is_p_automaton`]: the witness
/// cycle and, per state, the exponent with `out_q = cycle^e`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PAutomatonCert {
    pub cycle: Permutation,
    pub exponents: Vec<usize>,
}

impl PermAutomaton {
    /// Builds an automaton from per-state transition and output tables.
    pub fn new(
        alphabet: usize,
        ids: Vec<String>,
        next: Vec<Vec<usize>>,
        out: Vec<Vec<usize>>,
    ) -> Result<Self> {
        Self::with_letters(words::scalar_names(alphabet), ids, next, out)
    }

    /// As [`PermAutomaton::new`] with explicit letter names.
    pub fn with_letters(
        letters: Vec<String>,
        ids: Vec<String>,
        next: Vec<Vec<usize>>,
        out: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let alphabet = letters.len();
        if alphabet == 0 {
            return Err(Error::InvalidInput("empty alphabet".into()));
        }
        let n = ids.len();
        if n == 0 || next.len() != n || out.len() != n {
            return Err(Error::InvalidInput("state table shape mismatch".into()));
        }
        {
            let mut sorted = ids.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != n {
                return Err(Error::InvalidInput("duplicate state ids".into()));
            }
        }
        let mut states = Vec::with_capacity(n);
        for ((id, nx), ot) in ids.into_iter().zip(next).zip(out) {
            if nx.len() != alphabet || ot.len() != alphabet {
                return Err(Error::InvalidInput(format!("state {id} has wrong row length")));
            }
            if let Some(&bad) = nx.iter().find(|&&q| q >= n) {
                return Err(Error::InvalidInput(format!("state {id} points to state {bad}")));
            }
            if let Some(&bad) = ot.iter().find(|&&y| y >= alphabet) {
                return Err(Error::LetterOutOfRange {
                    letter: bad,
                    alphabet,
                });
            }
            states.push(State {
                id,
                next: nx,
                out: ot,
            });
        }
        Ok(PermAutomaton {
            alphabet,
            letters,
            states,
        })
    }

    /// Single-state identity automaton.
    pub fn identity(alphabet: usize) -> Self {
        PermAutomaton::new(
            alphabet,
            vec!["id".into()],
            vec![vec![0; alphabet]],
            vec![(0..alphabet).collect()],
        )
        .expect("identity tables are valid")
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_id(&self, q: usize) -> &str {
        &self.states[q].id
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| s.id == id)
    }

    pub fn next(&self, q: usize, x: usize) -> usize {
        self.states[q].next[x]
    }

    pub fn out(&self, q: usize, x: usize) -> usize {
        self.states[q].out[x]
    }

    pub(crate) fn state(&self, q: usize) -> &State {
        &self.states[q]
    }

    pub fn is_permutational(&self) -> bool {
        self.states
            .iter()
            .all(|s| Permutation::new(s.out.clone()).is_ok())
    }

    /// Output permutation at a state; errors when the output map is not a
    /// bijection.
    pub fn out_perm(&self, q: usize) -> Result<Permutation> {
        Permutation::new(self.states[q].out.clone()).map_err(|_| Error::NonPermutational {
            state: self.states[q].id.clone(),
        })
    }

    /// The output permutations, one per state, duplicates retained.
    pub fn states_group(&self) -> Result<Vec<Permutation>> {
        (0..self.state_count()).map(|q| self.out_perm(q)).collect()
    }

    /// Applies the automaton from the given state to a word of letter
    /// indices.
    pub fn act_from(&self, start: usize, word: &[usize]) -> Result<Vec<usize>> {
        let mut q = start;
        let mut out = Vec::with_capacity(word.len());
        for &x in word {
            if x >= self.alphabet {
                return Err(Error::LetterOutOfRange {
                    letter: x,
                    alphabet: self.alphabet,
                });
            }
            out.push(self.states[q].out[x]);
            q = self.states[q].next[x];
        }
        Ok(out)
    }

    pub fn pointed(&self, start: usize) -> PointedAutomaton {
        assert!(start < self.state_count());
        PointedAutomaton {
            automaton: self.clone(),
            start,
        }
    }

    /// Checks the p-automaton property: every state's output permutation is
    /// a power of one fixed p-cycle. Returns the cycle and per-state
    /// exponents, or `None` when the property fails.
    pub fn is_p_automaton(&self, p: usize) -> Result<Option<PAutomatonCert>> {
        if !words::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if self.alphabet != p {
            return Err(Error::AlphabetSizeNotP { p });
        }
        let mut cycle = None;
        for s in &self.states {
            let Ok(perm) = Permutation::new(s.out.clone()) else {
                return Ok(None);
            };
            if !perm.is_identity() {
                if perm.cycles().len() != 1 {
                    return Ok(None);
                }
                cycle = Some(perm);
                break;
            }
        }
        let cycle = cycle.unwrap_or_else(|| Permutation::standard_cycle(p));
        let mut exponents = Vec::with_capacity(self.state_count());
        for s in &self.states {
            let Ok(perm) = Permutation::new(s.out.clone()) else {
                return Ok(None);
            };
            match is_power_of_cycle(&perm, &cycle)? {
                Some(e) => exponents.push(e),
                None => return Ok(None),
            }
        }
        Ok(Some(PAutomatonCert { cycle, exponents }))
    }
}

impl PointedAutomaton {
    pub fn identity(alphabet: usize) -> Self {
        PermAutomaton::identity(alphabet).pointed(0)
    }

    pub fn alphabet(&self) -> usize {
        self.automaton.alphabet()
    }

    pub fn act(&self, word: &[usize]) -> Result<Vec<usize>> {
        self.automaton.act_from(self.start, word)
    }

    /// Inverse transducer: on input `y` it outputs the letter the original
    /// machine mapped to `y` and advances the way the original machine did
    /// on that letter. Errors on non-permutational inputs.
    pub fn invert(&self) -> Result<PointedAutomaton> {
        let a = &self.automaton;
        let mut next = Vec::with_capacity(a.state_count());
        let mut out = Vec::with_capacity(a.state_count());
        let mut ids = Vec::with_capacity(a.state_count());
        for q in 0..a.state_count() {
            let inv = a.out_perm(q)?.inverse();
            next.push(
                (0..a.alphabet)
                    .map(|y| a.next(q, inv.apply(y)))
                    .collect(),
            );
            out.push((0..a.alphabet).map(|y| inv.apply(y)).collect());
            ids.push(a.state_id(q).to_string());
        }
        Ok(PermAutomaton::with_letters(a.letters.clone(), ids, next, out)?.pointed(self.start))
    }

    /// Sequential composition "self first, then other": the result acts as
    /// `w -> other.act(self.act(w))`. Only the product states reachable from
    /// the start pair are built.
    pub fn compose(&self, other: &PointedAutomaton) -> Result<PointedAutomaton> {
        self.compose_capped(other, DEFAULT_SIZE_CAP)
    }

    pub fn compose_capped(&self, other: &PointedAutomaton, cap: usize) -> Result<PointedAutomaton> {
        let (a, b) = (&self.automaton, &other.automaton);
        if a.alphabet != b.alphabet {
            return Err(Error::AlphabetMismatch {
                left: a.alphabet,
                right: b.alphabet,
            });
        }
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut pairs = vec![(self.start, other.start)];
        index.insert(pairs[0], 0);
        let mut next_rows = Vec::new();
        let mut out_rows = Vec::new();
        let mut cursor = 0;
        while cursor < pairs.len() {
            let (qa, qb) = pairs[cursor];
            cursor += 1;
            let mut next_row = Vec::with_capacity(a.alphabet);
            let mut out_row = Vec::with_capacity(a.alphabet);
            for x in 0..a.alphabet {
                let mid = a.out(qa, x);
                out_row.push(b.out(qb, mid));
                let pair = (a.next(qa, x), b.next(qb, mid));
                let id = *index.entry(pair).or_insert_with(|| {
                    pairs.push(pair);
                    pairs.len() - 1
                });
                next_row.push(id);
            }
            next_rows.push(next_row);
            out_rows.push(out_row);
            if pairs.len() > cap {
                return Err(Error::CapExceeded {
                    what: format!("composition above {cap} states"),
                });
            }
        }
        let ids = pairs
            .iter()
            .map(|&(qa, qb)| format!("{}*{}", a.state_id(qa), b.state_id(qb)))
            .collect();
        Ok(PermAutomaton::with_letters(a.letters.clone(), ids, next_rows, out_rows)?.pointed(0))
    }

    /// The permutation induced on level `d` (all words of length `d`,
    /// lexicographically ranked).
    pub fn level_permutation(&self, d: usize) -> Result<Permutation> {
        self.level_permutation_capped(d, DEFAULT_SIZE_CAP)
    }

    pub fn level_permutation_capped(&self, d: usize, cap: usize) -> Result<Permutation> {
        let x = self.alphabet();
        let total = words::count(x, d).filter(|&t| t <= cap).ok_or_else(|| {
            Error::CapExceeded {
                what: format!("level {d} over {x} letters"),
            }
        })?;
        let images = crate::exec::map_indexed(total, |r| {
            let word = words::unrank(r, x, d);
            let image = self.act(&word).expect("ranked word valid");
            words::rank(&image, x)
        });
        Permutation::new(images).map_err(|_| Error::NonPermutational {
            state: self.automaton.state_id(self.start).to_string(),
        })
    }

    /// `self` composed with itself `e` times (inverted first for negative
    /// `e`), minimizing between steps to keep state counts bounded.
    pub fn power(&self, e: i64) -> Result<PointedAutomaton> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = PointedAutomaton::identity(self.alphabet());
        let mut sq = base.minimize_pointed();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq)?.minimize_pointed();
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq)?.minimize_pointed();
            }
        }
        Ok(acc)
    }
}

// JSON schema: {"alphabet": int, "states": [{"id", "next": {letter: state},
// "out": {letter: letter}}], "start": optional id}. Extra fields (matrix, n)
// are preserved for affine automata by the jsonio module.

#[derive(Serialize, Deserialize)]
pub(crate) struct StateDto {
    pub id: String,
    pub next: BTreeMap<String, String>,
    pub out: BTreeMap<String, String>,
}

impl PermAutomaton {
    pub(crate) fn to_state_dtos(&self) -> Vec<StateDto> {
        self.states
            .iter()
            .map(|s| StateDto {
                id: s.id.clone(),
                next: (0..self.alphabet)
                    .map(|x| (self.letters[x].clone(), self.states[s.next[x]].id.clone()))
                    .collect(),
                out: (0..self.alphabet)
                    .map(|x| (self.letters[x].clone(), self.letters[s.out[x]].clone()))
                    .collect(),
            })
            .collect()
    }

    pub(crate) fn from_state_dtos(alphabet: usize, dtos: &[StateDto]) -> Result<Self> {
        if dtos.is_empty() {
            return Err(Error::InvalidFile("no states".into()));
        }
        // Letter names come from the transition keys; infer the vector shape
        // from the first state and validate against the declared size.
        let mut letters: Vec<String> = dtos[0].next.keys().cloned().collect();
        let components = words::parse_letter_name(&letters[0])?;
        let dims = components.len();
        let base = if dims == 1 {
            alphabet
        } else {
            // alphabet = base^dims
            let mut found = None;
            for b in 2..=alphabet {
                if words::count(b, dims) == Some(alphabet) {
                    found = Some(b);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::InvalidFile(format!(
                    "alphabet {alphabet} is not a {dims}-dimensional vector set"
                ))
            })?
        };
        if letters.len() != alphabet {
            return Err(Error::InvalidFile(format!(
                "state {} has {} letters, alphabet is {alphabet}",
                dtos[0].id,
                letters.len()
            )));
        }
        // Canonical order: by rank of the coordinate vector.
        let rank_of = |name: &str| -> Result<usize> {
            let coords = words::parse_letter_name(name)?;
            if coords.len() != dims || coords.iter().any(|&c| c >= base) {
                return Err(Error::InvalidFile(format!("bad letter {name:?}")));
            }
            Ok(words::rank(&coords, base))
        };
        letters.sort_by_key(|name| rank_of(name).unwrap_or(usize::MAX));
        let mut letter_index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, name) in letters.iter().enumerate() {
            if rank_of(name)? != i {
                return Err(Error::InvalidFile(format!("letters are not exactly the alphabet: {name:?}")));
            }
            letter_index.insert(name.as_str(), i);
        }
        let mut state_index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, dto) in dtos.iter().enumerate() {
            if state_index.insert(dto.id.as_str(), i).is_some() {
                return Err(Error::InvalidFile(format!("duplicate state id {:?}", dto.id)));
            }
        }
        let mut ids = Vec::new();
        let mut next = Vec::new();
        let mut out = Vec::new();
        for dto in dtos {
            let mut next_row = vec![0usize; alphabet];
            let mut out_row = vec![0usize; alphabet];
            if dto.next.len() != alphabet || dto.out.len() != alphabet {
                return Err(Error::InvalidFile(format!(
                    "state {:?} must define next/out for every letter",
                    dto.id
                )));
            }
            for (letter, target) in &dto.next {
                let x = *letter_index
                    .get(letter.as_str())
                    .ok_or_else(|| Error::InvalidFile(format!("unknown letter {letter:?}")))?;
                next_row[x] = *state_index.get(target.as_str()).ok_or_else(|| {
                    Error::InvalidFile(format!("unknown target state {target:?}"))
                })?;
            }
            for (letter, image) in &dto.out {
                let x = *letter_index
                    .get(letter.as_str())
                    .ok_or_else(|| Error::InvalidFile(format!("unknown letter {letter:?}")))?;
                out_row[x] = *letter_index
                    .get(image.as_str())
                    .ok_or_else(|| Error::InvalidFile(format!("unknown output letter {image:?}")))?;
            }
            ids.push(dto.id.clone());
            next.push(next_row);
            out.push(out_row);
        }
        PermAutomaton::with_letters(letters, ids, next, out)
    }
}
