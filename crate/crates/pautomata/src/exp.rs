//! Exponentiation action of a wreath product on a function space.
//!
//! An element `[g, h]` with `g` a permutation of `X` and `h : X -> Sym(Y)`
//! acts on `f : X -> Y` by `([g,h]·f)(t) = h(t)(f(g^{-1}(t)))`. This is the
//! left-action convention under which the worked ternary example's
//! conjugation identities hold verbatim (see [`crate::fixtures`]); it is
//! pinned by tests against that golden data.

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::words;

/// A wreath-product element `[g, h]` in its exponentiation action.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExpElement {
    /// Permutation of the index set `X`.
    pub top: Permutation,
    /// One permutation of `Y` per point of `X`.
    pub locals: Vec<Permutation>,
}

impl ExpElement {
    pub fn new(top: Permutation, locals: Vec<Permutation>) -> Result<Self> {
        if locals.len() != top.len() {
            return Err(Error::LengthMismatch {
                expected: top.len(),
                got: locals.len(),
            });
        }
        let y = locals.first().map_or(0, Permutation::len);
        if locals.iter().any(|l| l.len() != y) {
            return Err(Error::InvalidInput("locals must share a domain".into()));
        }
        Ok(ExpElement { top, locals })
    }

    pub fn identity(x: usize, y: usize) -> Self {
        ExpElement {
            top: Permutation::identity(x),
            locals: vec![Permutation::identity(y); x],
        }
    }

    pub fn x_size(&self) -> usize {
        self.top.len()
    }

    pub fn y_size(&self) -> usize {
        self.locals.first().map_or(0, Permutation::len)
    }

    /// Image of the function `f` (listed as `f(0), f(1), …`).
    pub fn apply(&self, f: &[usize]) -> Result<Vec<usize>> {
        if f.len() != self.x_size() {
            return Err(Error::LengthMismatch {
                expected: self.x_size(),
                got: f.len(),
            });
        }
        let y = self.y_size();
        if let Some(&bad) = f.iter().find(|&&v| v >= y) {
            return Err(Error::LetterOutOfRange {
                letter: bad,
                alphabet: y,
            });
        }
        let top_inv = self.top.inverse();
        Ok((0..f.len())
            .map(|t| self.locals[t].apply(f[top_inv.apply(t)]))
            .collect())
    }

    /// Materializes the action as a permutation of the `|Y|^|X|` ranked
    /// functions.
    pub fn as_permutation(&self) -> Permutation {
        let x = self.x_size();
        let y = self.y_size();
        let total = words::count(y, x).expect("function space too large");
        let images = (0..total)
            .map(|r| {
                let f = words::unrank(r, y, x);
                words::rank(&self.apply(&f).expect("ranked function valid"), y)
            })
            .collect();
        Permutation::new(images).expect("group action is a bijection")
    }

    /// The element realizing "apply `first`, then `second`".
    pub fn compose(first: &ExpElement, second: &ExpElement) -> ExpElement {
        assert_eq!(first.x_size(), second.x_size());
        assert_eq!(first.y_size(), second.y_size());
        let second_top_inv = second.top.inverse();
        let locals = (0..first.x_size())
            .map(|t| first.locals[second_top_inv.apply(t)].then(&second.locals[t]))
            .collect();
        ExpElement {
            top: first.top.then(&second.top),
            locals,
        }
    }
}

/// Free-function form of the action: image of `f` under `[g, h]`.
pub fn exp_apply(g: &Permutation, h: &[Permutation], f: &[usize]) -> Result<Vec<usize>> {
    ExpElement::new(g.clone(), h.to_vec())?.apply(f)
}

/// Materialized generators of the exponentiation action on `Y^X`.
///
/// Returns `[g, id]` for each generator of the top group together with
/// `[id, h]` for every point-supported `h` placing a bottom generator at one
/// point of `X`; together these generate the wreath product in its
/// exponentiation action.
pub fn exponentiation_generators(
    x: usize,
    y: usize,
    x_gens: &[Permutation],
    y_gens: &[Permutation],
) -> Result<Vec<Permutation>> {
    if x_gens.iter().any(|g| g.len() != x) {
        return Err(Error::InvalidInput("top generator degree mismatch".into()));
    }
    if y_gens.iter().any(|g| g.len() != y) {
        return Err(Error::InvalidInput("bottom generator degree mismatch".into()));
    }
    let mut out = Vec::new();
    for g in x_gens {
        out.push(
            ExpElement::new(g.clone(), vec![Permutation::identity(y); x])?.as_permutation(),
        );
    }
    for point in 0..x {
        for tau in y_gens {
            let mut locals = vec![Permutation::identity(y); x];
            locals[point] = tau.clone();
            out.push(ExpElement::new(Permutation::identity(x), locals)?.as_permutation());
        }
    }
    Ok(out)
}
