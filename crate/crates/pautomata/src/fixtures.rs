//! A worked 27-point example over the ternary alphabet, used as golden data
//! by tests and available to callers for experimentation.
//!
//! Two generators of the wreath product of two cyclic groups of order 3 act
//! by exponentiation on the 27 functions `Z_3 -> Z_3`; an explicit
//! relabeling of those 27 points by ternary words conjugates them onto
//! depth-3 tree automorphisms given by portraits. The relabeling table is
//! the pinned reference for every action-convention choice in this crate.

use crate::exp::ExpElement;
use crate::perm::Permutation;
use crate::sylow::TreeEmbedding;
use crate::wreath::WreathElement;

/// The two exponentiation generators: a pure top shift and a one-point
/// bottom shift.
pub fn ternary_exp_generators() -> (ExpElement, ExpElement) {
    let id = Permutation::identity(3);
    let cycle = Permutation::standard_cycle(3);
    let a = ExpElement::new(cycle.clone(), vec![id.clone(), id.clone(), id.clone()])
        .expect("consistent degrees");
    let b = ExpElement::new(id.clone(), vec![cycle, id.clone(), id])
        .expect("consistent degrees");
    (a, b)
}

/// Depth-3 ternary portraits conjugate to the exponentiation generators
/// under [`ternary_relabeling`].
///
/// The third-level table of the second portrait carries the values forced
/// by the conjugation identities: `2` on the `(2,0)` and `(2,1)` nodes. A
/// variant with zeros there fails the identities at exactly six points; the
/// acceptance suite pins both facts.
pub fn ternary_portraits() -> (WreathElement, WreathElement) {
    let cycle = Permutation::standard_cycle(3);
    let shift = |e: usize| cycle.pow(e as i64);
    let c = WreathElement::build(&[3, 3, 3], |path| match path {
        [] => shift(0),
        [x1] => shift([2, 1, 0][*x1]),
        [2, 0] => shift(2),
        [2, 1] => shift(1),
        [_, _] => shift(0),
        _ => unreachable!(),
    })
    .expect("square table");
    let d = WreathElement::build(&[3, 3, 3], |path| match path {
        [] => shift(1),
        [_] => shift(0),
        [0, x2] if *x2 != 2 => shift(1),
        [2, x2] if *x2 != 2 => shift(2),
        [_, _] => shift(0),
        _ => unreachable!(),
    })
    .expect("square table");
    (c, d)
}

/// The golden relabeling of the 27 functions by ternary words of length 3,
/// listed in rank order of the input triple.
pub fn ternary_relabeling() -> TreeEmbedding {
    let table: [[usize; 3]; 27] = [
        [0, 0, 1],
        [1, 1, 2],
        [2, 2, 0],
        [0, 1, 0],
        [1, 2, 1],
        [2, 0, 2],
        [1, 0, 0],
        [2, 1, 1],
        [0, 2, 2],
        [0, 2, 0],
        [1, 0, 1],
        [2, 1, 2],
        [0, 0, 2],
        [1, 1, 0],
        [2, 2, 1],
        [2, 0, 0],
        [0, 1, 1],
        [1, 2, 2],
        [1, 2, 0],
        [2, 0, 1],
        [0, 1, 2],
        [1, 0, 2],
        [2, 1, 0],
        [0, 2, 1],
        [0, 0, 0],
        [1, 1, 1],
        [2, 2, 2],
    ];
    TreeEmbedding::new(3, 3, table.iter().map(|w| w.to_vec()).collect())
        .expect("table is a bijection")
}

/// The inverse orientation of [`ternary_relabeling`]: function points to
/// tree words, the direction expected when the table is used as an
/// embedding of the 27-point action into the ternary tree (for example as
/// a user-supplied relabeling in alphabet minimization).
pub fn ternary_relabeling_inverse() -> TreeEmbedding {
    let forward = ternary_relabeling();
    let mut table = vec![Vec::new(); 27];
    for point in 0..27 {
        table[crate::words::rank(forward.word(point), 3)] =
            crate::words::unrank(point, 3, 3);
    }
    TreeEmbedding::new(3, 3, table).expect("inverse of a bijection")
}
