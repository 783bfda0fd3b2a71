//! Brute-force group closure by breadth-first products.

use std::collections::HashSet;
use std::time::Instant;

use crate::exec;
use crate::perm::Permutation;

/// Default element cap for closures.
pub const DEFAULT_CLOSURE_CAP: usize = 1 << 20;

/// Result of a (possibly capped) closure computation.
#[derive(Clone, Debug)]
pub struct Closure {
    /// Elements found, sorted by image table; the full group when
    /// `complete`.
    pub elements: Vec<Permutation>,
    /// False when the cap or deadline cut enumeration short.
    pub complete: bool,
}

impl Closure {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }
}

/// Closure of the group generated by `gens`, stopping once more than `cap`
/// elements have been found.
pub fn group_closure(gens: &[Permutation], cap: usize) -> Closure {
    group_closure_with(gens, cap, None)
}

/// [`group_closure`] with an optional cooperative deadline; hitting the
/// deadline returns the partial set with `complete = false`.
pub fn group_closure_with(
    gens: &[Permutation],
    cap: usize,
    deadline: Option<Instant>,
) -> Closure {
    #[cfg(feature = "parallel")]
    {
        closure_imp(gens, cap, deadline, true)
    }
    #[cfg(not(feature = "parallel"))]
    {
        closure_imp(gens, cap, deadline, false)
    }
}

/// Single-threaded reference implementation; the parallel path is checked
/// against it.
pub fn group_closure_seq(gens: &[Permutation], cap: usize) -> Closure {
    closure_imp(gens, cap, None, false)
}

fn closure_imp(
    gens: &[Permutation],
    cap: usize,
    deadline: Option<Instant>,
    parallel: bool,
) -> Closure {
    assert!(!gens.is_empty(), "closure needs at least one generator");
    let degree = gens[0].len();
    assert!(
        gens.iter().all(|g| g.len() == degree),
        "generators must share a domain"
    );

    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut elements: Vec<Permutation> = Vec::new();
    let mut frontier = vec![Permutation::identity(degree)];
    seen.insert(frontier[0].clone());
    elements.push(frontier[0].clone());

    while !frontier.is_empty() {
        if let Some(d) = deadline {
            if Instant::now() >= d {
                elements.sort_unstable();
                return Closure {
                    elements,
                    complete: false,
                };
            }
        }
        let products: Vec<Permutation> = if parallel {
            exec::map_slice(&frontier, |e| {
                gens.iter().map(|g| e.then(g)).collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect()
        } else {
            frontier
                .iter()
                .flat_map(|e| gens.iter().map(move |g| e.then(g)))
                .collect()
        };
        let mut next = Vec::new();
        for p in products {
            if seen.insert(p.clone()) {
                elements.push(p.clone());
                next.push(p);
                if elements.len() > cap {
                    elements.sort_unstable();
                    return Closure {
                        elements,
                        complete: false,
                    };
                }
            }
        }
        frontier = next;
    }
    elements.sort_unstable();
    Closure {
        elements,
        complete: true,
    }
}
