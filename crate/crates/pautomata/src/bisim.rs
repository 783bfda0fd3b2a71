//! Partition-refinement minimization and exact equality of automaton
//! permutations.
//!
//! Two pointed automata act identically on every finite word iff their start
//! states are bisimilar in the disjoint union of the two machines. Refining
//! to a fixed point decides this exactly, so relation checks are not merely
//! depth-bounded.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::transducer::{PermAutomaton, PointedAutomaton};

/// Coarsest partition of the states under which output rows and
/// class-successor rows agree; returned as a class index per state.
fn refine(next: &[Vec<usize>], out: &[Vec<usize>]) -> Vec<usize> {
    let n = next.len();
    // Initial partition: states with equal output rows.
    let mut class = assign_classes(n, |q| out[q].clone());
    loop {
        let count = class.iter().max().map_or(0, |&c| c + 1);
        let new_class = assign_classes(n, |q| {
            let mut sig = Vec::with_capacity(next[q].len() + 1);
            sig.push(class[q]);
            sig.extend(next[q].iter().map(|&t| class[t]));
            sig
        });
        let new_count = new_class.iter().max().map_or(0, |&c| c + 1);
        if new_count == count {
            return new_class;
        }
        class = new_class;
    }
}

fn assign_classes<K: std::hash::Hash + Eq>(n: usize, key: impl Fn(usize) -> K) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    (0..n)
        .map(|q| {
            let next_id = ids.len();
            *ids.entry(key(q)).or_insert(next_id)
        })
        .collect()
}

impl PermAutomaton {
    /// Minimizes the automaton: states acting identically on all words are
    /// merged. Returns the quotient and the old-state to new-state map.
    /// Quotient state ids are the id of each class's minimal member.
    pub fn minimize(&self) -> (PermAutomaton, Vec<usize>) {
        let n = self.state_count();
        let next: Vec<Vec<usize>> = (0..n).map(|q| self.state(q).next.clone()).collect();
        let out: Vec<Vec<usize>> = (0..n).map(|q| self.state(q).out.clone()).collect();
        let class = refine(&next, &out);
        let class_count = class.iter().max().map_or(0, |&c| c + 1);
        let mut rep = vec![usize::MAX; class_count];
        for q in 0..n {
            if rep[class[q]] == usize::MAX {
                rep[class[q]] = q;
            }
        }
        let ids = rep.iter().map(|&q| self.state_id(q).to_string()).collect();
        let new_next = rep
            .iter()
            .map(|&q| next[q].iter().map(|&t| class[t]).collect())
            .collect();
        let new_out = rep.iter().map(|&q| out[q].clone()).collect();
        let quotient =
            PermAutomaton::with_letters(self.letters().to_vec(), ids, new_next, new_out)
                .expect("quotient tables are valid");
        (quotient, class)
    }
}

impl PointedAutomaton {
    /// Minimizes the underlying automaton and re-points it.
    pub fn minimize_pointed(&self) -> PointedAutomaton {
        let (quotient, class) = self.automaton.minimize();
        quotient.pointed(class[self.start])
    }

    /// Exact equality as tree automorphisms, decided by refining the
    /// disjoint union of both machines.
    pub fn equal(&self, other: &PointedAutomaton) -> Result<bool> {
        let (a, b) = (&self.automaton, &other.automaton);
        if a.alphabet() != b.alphabet() {
            return Err(Error::AlphabetMismatch {
                left: a.alphabet(),
                right: b.alphabet(),
            });
        }
        let na = a.state_count();
        let n = na + b.state_count();
        let next: Vec<Vec<usize>> = (0..n)
            .map(|q| {
                if q < na {
                    a.state(q).next.clone()
                } else {
                    b.state(q - na).next.iter().map(|&t| t + na).collect()
                }
            })
            .collect();
        let out: Vec<Vec<usize>> = (0..n)
            .map(|q| {
                if q < na {
                    a.state(q).out.clone()
                } else {
                    b.state(q - na).out.clone()
                }
            })
            .collect();
        let class = refine(&next, &out);
        Ok(class[self.start] == class[na + other.start])
    }
}
