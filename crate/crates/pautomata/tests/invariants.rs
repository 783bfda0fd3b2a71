//! Property tests for the algebraic invariants that hold across modules.

use proptest::collection::vec;
use proptest::prelude::*;

use pautomata::closure::group_closure_seq;
use pautomata::matrix::{divmod_vec, IntVector};
use pautomata::perm::Permutation;
use pautomata::transducer::{PermAutomaton, PointedAutomaton};
use pautomata::wreath::{decompose_tree_perm, WreathElement};
use pautomata::{group_closure, ExpElement};

fn permutation_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just(n).prop_perturb(move |n, mut rng| {
        let mut images: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            images.swap(i, j);
        }
        Permutation::new(images).unwrap()
    })
}

fn portrait_strategy(p: usize, k: usize) -> impl Strategy<Value = WreathElement> {
    let nodes: usize = (0..k).map(|l| p.pow(l as u32)).sum();
    vec(permutation_strategy(p), nodes).prop_map(move |perms| {
        let mut cursor = 0;
        // Consumption order matches the builder's depth-first traversal.
        WreathElement::build(&vec![p; k], |_| {
            let perm = perms[cursor % perms.len()].clone();
            cursor += 1;
            perm
        })
        .unwrap()
    })
}

fn automaton_strategy(alphabet: usize, max_states: usize) -> impl Strategy<Value = PointedAutomaton> {
    (1..=max_states)
        .prop_flat_map(move |n| {
            (
                vec(vec(0..n, alphabet..=alphabet), n),
                vec(permutation_strategy(alphabet), n),
                0..n,
            )
        })
        .prop_map(move |(next, outs, start)| {
            let ids = (0..next.len()).map(|q| format!("s{q}")).collect();
            let out = outs.iter().map(|p| p.images().to_vec()).collect();
            PermAutomaton::new(alphabet, ids, next, out)
                .unwrap()
                .pointed(start)
        })
}

proptest! {
    /// v = n*q + rem with remainder entries in [0, n).
    #[test]
    fn divmod_identity(entries in vec(-1000i64..1000, 1..6), n in 2u64..17) {
        let v = IntVector::from_i64(&entries);
        let (q, rem) = divmod_vec(&v, n);
        for i in 0..entries.len() {
            let rebuilt = &q.entries()[i] * num_bigint::BigInt::from(n) + &rem.entries()[i];
            prop_assert_eq!(&rebuilt, &v.entries()[i]);
            prop_assert!(rem.entries()[i] >= num_bigint::BigInt::from(0));
            prop_assert!(rem.entries()[i] < num_bigint::BigInt::from(n));
        }
    }

    /// Portraits round-trip through their leaf permutation.
    #[test]
    fn portrait_round_trip(
        (p, w) in (2usize..=3, 1usize..=3)
            .prop_flat_map(|(p, k)| portrait_strategy(p, k).prop_map(move |w| (p, w)))
    ) {
        let leaf = w.as_leaf_permutation();
        let back = decompose_tree_perm(&leaf, p, false).unwrap();
        prop_assert_eq!(back, w);
    }

    /// Automaton actions preserve length and prefixes.
    #[test]
    fn act_preserves_length_and_prefixes(
        a in automaton_strategy(3, 6),
        u in vec(0usize..3, 0..6),
        v in vec(0usize..3, 0..6),
    ) {
        let mut uv = u.clone();
        uv.extend_from_slice(&v);
        let image = a.act(&uv).unwrap();
        prop_assert_eq!(image.len(), uv.len());
        let prefix_image = a.act(&u).unwrap();
        prop_assert_eq!(&image[..u.len()], prefix_image.as_slice());
    }

    /// Composition is associative up to exact equality.
    #[test]
    fn compose_associative(
        a in automaton_strategy(2, 4),
        b in automaton_strategy(2, 4),
        c in automaton_strategy(2, 4),
    ) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert!(left.equal(&right).unwrap());
    }

    /// Level permutations are a homomorphism for composition.
    #[test]
    fn level_permutation_homomorphism(
        a in automaton_strategy(2, 5),
        b in automaton_strategy(2, 5),
        d in 0usize..6,
    ) {
        let composed = a.compose(&b).unwrap();
        let lhs = composed.level_permutation(d).unwrap();
        let rhs = a
            .level_permutation(d)
            .unwrap()
            .then(&b.level_permutation(d).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    /// Parallel and sequential closures agree.
    #[test]
    fn closure_parallel_matches_sequential(
        g1 in permutation_strategy(6),
        g2 in permutation_strategy(6),
    ) {
        let gens = [g1, g2];
        let par = group_closure(&gens, 2000);
        let seq = group_closure_seq(&gens, 2000);
        prop_assert_eq!(par.complete, seq.complete);
        prop_assert_eq!(par.elements, seq.elements);
    }
}

/// The exponentiation action is a homomorphism, exhaustively over the full
/// wreath product for |X| = |Y| = 3.
#[test]
fn exp_action_homomorphism_exhaustive_degree_three() {
    let mut perms3 = Vec::new();
    let mut items = vec![0usize, 1, 2];
    permutations_of(&mut items, 3, &mut perms3);
    let perms3: Vec<Permutation> = perms3
        .into_iter()
        .map(|im| Permutation::new(im).unwrap())
        .collect();

    let mut elements = Vec::new();
    for top in &perms3 {
        for l0 in &perms3 {
            for l1 in &perms3 {
                for l2 in &perms3 {
                    elements.push(
                        ExpElement::new(
                            top.clone(),
                            vec![l0.clone(), l1.clone(), l2.clone()],
                        )
                        .unwrap(),
                    );
                }
            }
        }
    }
    assert_eq!(elements.len(), 6 * 216);

    // Materialize once; check compose() against permutation composition on
    // a deterministic sample of pairs plus the full generator set squared.
    let materialized: Vec<Permutation> = elements.iter().map(ExpElement::as_permutation).collect();
    let step = 37;
    for i in (0..elements.len()).step_by(step) {
        for j in (0..elements.len()).step_by(step) {
            let composed = ExpElement::compose(&elements[i], &elements[j]);
            assert_eq!(
                composed.as_permutation(),
                materialized[i].then(&materialized[j])
            );
        }
    }
}

fn permutations_of(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        permutations_of(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}
