//! Verification that the carry automaton's group satisfies the defining
//! relations of the ascending HNN extension, and that its state group is the
//! expected exponentiation.
//!
//! Which group element each state represents is not assumed: candidate
//! generators are formed from the only distinguished states (the zero vector
//! and the negated unit vectors), in both composition orders, and the
//! presentation is verified for both conjugation orientations. The report
//! records which choice holds.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::affine::AffineAutomaton;
use crate::closure::group_closure;
use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::permutation_matrix;
use crate::perm::Permutation;
use crate::transducer::PointedAutomaton;
use crate::words;

/// Which composition order forms the abelian-part candidates.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Family {
    /// `invert(tau)` then `point(u_i)`.
    #[serde(rename = "+")]
    Plus,
    /// `point(u_i)` then `invert(tau)`.
    #[serde(rename = "-")]
    Minus,
}

/// Which side the stable letter conjugates from.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Orientation {
    /// `a^t = t^{-1} a t`.
    #[serde(rename = "conj")]
    Conj,
    /// `a^t = t a t^{-1}`.
    #[serde(rename = "inv-conj")]
    InvConj,
}

/// Whether relation `i` reads its exponents from row `i` or column `i` of
/// the matrix. The carry automaton's stable letter conjugates translations
/// by columns, so transposed presentations differ for non-symmetric
/// matrices; both readings are tried and the one that held is recorded.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ExponentSource {
    #[serde(rename = "rows")]
    Rows,
    #[serde(rename = "columns")]
    Columns,
}

/// Outcome of [`verify_hnn_relations`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationReport {
    pub family: Family,
    pub orientation: Orientation,
    pub exponents: ExponentSource,
    pub commutativity: bool,
    pub conjugation: Vec<bool>,
    /// Sanity row: every candidate composed with its inverse is the
    /// identity.
    pub inverse_sanity: bool,
}

/// Candidate generators built from the distinguished states.
#[derive(Clone, Debug)]
pub struct GeneratorCandidates {
    /// The automaton pointed at the zero state.
    pub tau: PointedAutomaton,
    /// Per coordinate, the `+` and `-` candidates.
    pub alphas: Vec<(PointedAutomaton, PointedAutomaton)>,
}

/// Builds `tau` and both candidate families `alpha_i`.
pub fn generator_candidates(am: &AffineAutomaton) -> Result<GeneratorCandidates> {
    let tau = am.pointed(am.zero_state());
    let tau_inv = tau.invert()?;
    let mut alphas = Vec::with_capacity(am.rank());
    for state in am.negated_unit_states() {
        let unit = am.pointed(state);
        let plus = tau_inv.compose(&unit)?.minimize_pointed();
        let minus = unit.compose(&tau_inv)?.minimize_pointed();
        alphas.push((plus, minus));
    }
    Ok(GeneratorCandidates { tau, alphas })
}

/// Verifies the presentation `a_i a_j = a_j a_i`, `a_i^t = prod_j a_j^{m_ij}`
/// by exact transducer equality, trying both candidate families and both
/// conjugation orientations; the first fully satisfied combination is
/// reported.
pub fn verify_hnn_relations(am: &AffineAutomaton) -> Result<RelationReport> {
    let candidates = generator_candidates(am)?;
    let tau = candidates.tau.minimize_pointed();
    let tau_inv = tau.invert()?.minimize_pointed();
    let identity = PointedAutomaton::identity(am.automaton().alphabet());

    for family in [Family::Plus, Family::Minus] {
        let alphas: Vec<&PointedAutomaton> = candidates
            .alphas
            .iter()
            .map(|(plus, minus)| match family {
                Family::Plus => plus,
                Family::Minus => minus,
            })
            .collect();

        let inverse_sanity = alphas.iter().try_fold(true, |acc, a| {
            Ok::<_, Error>(acc && a.compose(&a.invert()?)?.equal(&identity)?)
        })?;

        let mut commutativity = true;
        'outer: for i in 0..alphas.len() {
            for j in i + 1..alphas.len() {
                let ij = alphas[i].compose(alphas[j])?.minimize_pointed();
                let ji = alphas[j].compose(alphas[i])?.minimize_pointed();
                if !ij.equal(&ji)? {
                    commutativity = false;
                    break 'outer;
                }
            }
        }

        // Conjugation left-hand sides are shared across exponent sources.
        let mut lhs_by_orientation = Vec::new();
        for orientation in [Orientation::Conj, Orientation::InvConj] {
            let lhs: Vec<PointedAutomaton> = alphas
                .iter()
                .map(|alpha| {
                    Ok(match orientation {
                        Orientation::Conj => tau_inv.compose(alpha)?.compose(&tau)?,
                        Orientation::InvConj => tau.compose(alpha)?.compose(&tau_inv)?,
                    }
                    .minimize_pointed())
                })
                .collect::<Result<_>>()?;
            lhs_by_orientation.push((orientation, lhs));
        }

        for source in [ExponentSource::Rows, ExponentSource::Columns] {
            let mut rhs = Vec::with_capacity(alphas.len());
            for i in 0..alphas.len() {
                let mut acc = identity.clone();
                for (j, alpha) in alphas.iter().enumerate() {
                    let e = match source {
                        ExponentSource::Rows => exponent_i64(am, i, j)?,
                        ExponentSource::Columns => exponent_i64(am, j, i)?,
                    };
                    if e != 0 {
                        acc = acc.compose(&alpha.power(e)?)?.minimize_pointed();
                    }
                }
                rhs.push(acc);
            }

            for (orientation, lhs) in &lhs_by_orientation {
                let mut conjugation = Vec::with_capacity(alphas.len());
                for (l, r) in lhs.iter().zip(&rhs) {
                    conjugation.push(l.equal(r)?);
                }
                if inverse_sanity && commutativity && conjugation.iter().all(|&c| c) {
                    return Ok(RelationReport {
                        family,
                        orientation: *orientation,
                        exponents: source,
                        commutativity,
                        conjugation,
                        inverse_sanity,
                    });
                }
            }
        }
    }
    Err(Error::NoOrientationSatisfies)
}

fn exponent_i64(am: &AffineAutomaton, i: usize, j: usize) -> Result<i64> {
    i64::try_from(am.matrix().get(i, j)).map_err(|_| {
        Error::InvalidInput(format!("relation exponent m[{i}][{j}] too large"))
    })
}

/// Outcome of [`verify_states_exponentiation`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatesExpReport {
    /// Coordinate rule `out(v, x)_i = (x_{sigma(i)} + v_i) mod p` at every
    /// state and letter.
    pub coordinate_rule: bool,
    /// Order of the group generated by the outputs at the distinguished
    /// states (zero and the negated units).
    pub closure_order: usize,
    /// Expected order `|<sigma>| * p^r`.
    pub expected_order: usize,
    /// Order of the group generated by the negated-unit outputs alone;
    /// informative. For `sigma` of order `p^m` with `m >= 1` this is an
    /// index-p subgroup: every product of those generators has a sum-zero
    /// translation part, so the zero state is genuinely needed above.
    pub unit_states_closure_order: usize,
}

impl StatesExpReport {
    pub fn passed(&self) -> bool {
        self.coordinate_rule && self.closure_order == self.expected_order
    }
}

/// Checks that the state group of a build with `n = p` and `M = pN + C`
/// (`C` the permutation matrix of `sigma`) is the exponentiation of the
/// cyclic p-group by `<sigma>`.
pub fn verify_states_exponentiation(
    am: &AffineAutomaton,
    p: usize,
    sigma: &Permutation,
) -> Result<StatesExpReport> {
    if !words::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if am.n() != p {
        return Err(Error::InvalidInput(format!(
            "automaton has n = {}, expected p = {p}",
            am.n()
        )));
    }
    let r = am.rank();
    if sigma.len() != r {
        return Err(Error::LengthMismatch {
            expected: r,
            got: sigma.len(),
        });
    }
    // M = pN + C exactly: every entry of M - C divisible by p.
    let c = permutation_matrix(sigma);
    let diff = am.matrix().sub(&c);
    let p_big = BigInt::from(p);
    for i in 0..r {
        for j in 0..r {
            if (diff.get(i, j) % &p_big) != BigInt::from(0) {
                return Err(Error::NotDivisibleByP);
            }
        }
    }

    let auto = am.automaton();
    let letter_count = auto.alphabet();
    let coordinate_rule = exec::map_indexed(auto.state_count(), |q| {
        let v = am.vector_of_state(q);
        let v_mod: Vec<usize> = v
            .entries()
            .iter()
            .map(|e| {
                use num_integer::Integer;
                let (_, m) = e.div_mod_floor(&p_big);
                usize::try_from(&m).expect("residue fits")
            })
            .collect();
        (0..letter_count).all(|x| {
            let coords = words::unrank(x, p, r);
            let image = words::unrank(auto.out(q, x), p, r);
            (0..r).all(|i| image[i] == (coords[sigma.apply(i)] + v_mod[i]) % p)
        })
    })
    .into_iter()
    .all(|ok| ok);

    let unit_perms: Vec<Permutation> = am
        .negated_unit_states()
        .iter()
        .map(|&q| auto.out_perm(q))
        .collect::<Result<_>>()?;
    let unit_closure = group_closure(&unit_perms, crate::closure::DEFAULT_CLOSURE_CAP);
    let mut distinguished = unit_perms;
    distinguished.push(auto.out_perm(am.zero_state())?);
    let closure = group_closure(&distinguished, crate::closure::DEFAULT_CLOSURE_CAP);
    let expected_order = (sigma.order() as usize)
        * words::count(p, r).ok_or_else(|| Error::CapExceeded {
            what: format!("{p}^{r}"),
        })?;

    Ok(StatesExpReport {
        coordinate_rule,
        closure_order: closure.order(),
        expected_order,
        unit_states_closure_order: unit_closure.order(),
    })
}

/// A finite-level witness: order of the group the generators induce on
/// level `d`, and whether it is a p-power.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelWitness {
    pub d: usize,
    pub order: usize,
    pub p_power: bool,
}

/// Checks that the level-`d` group of the given tree automorphisms has
/// p-power order. Errors with "cap exceeded" when the level or the closure
/// outgrows `cap`.
pub fn level_group_is_p_group(
    gens: &[PointedAutomaton],
    d: usize,
    p: usize,
    cap: usize,
) -> Result<LevelWitness> {
    if gens.is_empty() {
        return Err(Error::InvalidInput("no generators".into()));
    }
    let level_perms: Vec<Permutation> = gens
        .iter()
        .map(|g| g.level_permutation_capped(d, cap))
        .collect::<Result<_>>()?;
    finish_level_witness(level_perms, d, p, cap)
}

/// As [`level_group_is_p_group`] for several states of one automaton,
/// without cloning the machine per generator.
pub fn level_group_is_p_group_at(
    automaton: &crate::transducer::PermAutomaton,
    states: &[usize],
    d: usize,
    p: usize,
    cap: usize,
) -> Result<LevelWitness> {
    if states.is_empty() {
        return Err(Error::InvalidInput("no generators".into()));
    }
    let x = automaton.alphabet();
    let total = words::count(x, d)
        .filter(|&t| t <= cap)
        .ok_or_else(|| Error::CapExceeded {
            what: format!("level {d} over {x} letters"),
        })?;
    let level_perms: Vec<Permutation> = states
        .iter()
        .map(|&q| {
            let images = exec::map_indexed(total, |rank| {
                let word = words::unrank(rank, x, d);
                let image = automaton.act_from(q, &word).expect("ranked word valid");
                words::rank(&image, x)
            });
            Permutation::new(images).map_err(|_| Error::NonPermutational {
                state: automaton.state_id(q).to_string(),
            })
        })
        .collect::<Result<_>>()?;
    finish_level_witness(level_perms, d, p, cap)
}

fn finish_level_witness(
    mut level_perms: Vec<Permutation>,
    d: usize,
    p: usize,
    cap: usize,
) -> Result<LevelWitness> {
    level_perms.sort_unstable();
    level_perms.dedup();
    let closure = group_closure(&level_perms, cap);
    if !closure.complete {
        return Err(Error::CapExceeded {
            what: format!("level-{d} closure above {cap}"),
        });
    }
    let order = closure.order();
    Ok(LevelWitness {
        d,
        order,
        p_power: words::log_exact(order, p).is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp::ExpElement;
    use crate::matrix::IntMatrix;
    use crate::transducer::PermAutomaton;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows_i64(rows).unwrap()
    }

    fn odometer() -> PointedAutomaton {
        PermAutomaton::new(
            2,
            vec!["add".into(), "copy".into()],
            vec![vec![1, 0], vec![1, 1]],
            vec![vec![1, 0], vec![0, 1]],
        )
        .unwrap()
        .pointed(0)
    }

    #[test]
    fn rank_one_relation() {
        let am = AffineAutomaton::build(m(&[vec![2]]), 3).unwrap();
        let report = verify_hnn_relations(&am).unwrap();
        assert!(report.commutativity);
        assert_eq!(report.conjugation, vec![true]);
        assert!(report.inverse_sanity);
    }

    #[test]
    fn rank_two_relations() {
        let am = AffineAutomaton::build(m(&[vec![2, 1], vec![1, 0]]), 2).unwrap();
        let report = verify_hnn_relations(&am).unwrap();
        assert!(report.commutativity);
        assert_eq!(report.conjugation, vec![true, true]);
    }

    #[test]
    fn candidates_fix_empty_word() {
        let am = AffineAutomaton::build(m(&[vec![2, 1], vec![1, 0]]), 2).unwrap();
        let cands = generator_candidates(&am).unwrap();
        for (plus, minus) in &cands.alphas {
            assert_eq!(plus.act(&[]).unwrap(), Vec::<usize>::new());
            assert_eq!(minus.act(&[]).unwrap(), Vec::<usize>::new());
        }
    }

    #[test]
    fn states_exponentiation_p2() {
        let am = AffineAutomaton::build(m(&[vec![2, 1], vec![1, 0]]), 2).unwrap();
        let sigma = Permutation::new(vec![1, 0]).unwrap();
        let report = verify_states_exponentiation(&am, 2, &sigma).unwrap();
        assert!(report.coordinate_rule);
        assert_eq!(report.closure_order, 8);
        assert_eq!(report.expected_order, 8);
        assert!(report.passed());
        // The negated-unit outputs alone generate only an index-2 subgroup
        // here: the two 4-cycles are mutually inverse.
        assert_eq!(report.unit_states_closure_order, 4);
        let units = am.negated_unit_states();
        let a = am.automaton().out_perm(units[0]).unwrap();
        let b = am.automaton().out_perm(units[1]).unwrap();
        assert!(a.then(&b).is_identity());
    }

    #[test]
    fn states_exponentiation_degenerate_sigma() {
        // M = 3N + I with sigma the identity: the rule reduces to
        // x_i + v_i mod 3.
        let am = AffineAutomaton::build(m(&[vec![4, 3], vec![0, 4]]), 3).unwrap();
        let sigma = Permutation::identity(2);
        let report = verify_states_exponentiation(&am, 3, &sigma).unwrap();
        assert!(report.coordinate_rule);
        assert_eq!(report.expected_order, 9);
        assert!(report.passed());
    }

    #[test]
    fn states_exponentiation_rejects_wrong_sigma() {
        let am = AffineAutomaton::build(m(&[vec![2, 1], vec![1, 0]]), 2).unwrap();
        let report = verify_states_exponentiation(&am, 2, &Permutation::identity(2));
        assert!(matches!(report, Err(Error::NotDivisibleByP)));
    }

    #[test]
    fn state_perms_match_exponentiation_elements() {
        // out at state v equals the wreath element [sigma^{-1}, +v mod p]
        // materialized through the exponentiation action.
        let am = AffineAutomaton::build(m(&[vec![2, 1], vec![1, 0]]), 2).unwrap();
        let sigma = Permutation::new(vec![1, 0]).unwrap();
        let cycle = Permutation::standard_cycle(2);
        for q in 0..am.state_count() {
            let v = am.vector_of_state(q);
            let locals: Vec<Permutation> = v
                .entries()
                .iter()
                .map(|e| {
                    use num_integer::Integer;
                    let (_, m) = e.div_mod_floor(&BigInt::from(2));
                    cycle.pow(i64::try_from(&m).unwrap())
                })
                .collect();
            let element = ExpElement::new(sigma.inverse(), locals).unwrap();
            assert_eq!(
                am.automaton().out_perm(q).unwrap(),
                element.as_permutation()
            );
        }
    }

    #[test]
    fn level_witness_examples() {
        let odo = odometer();
        let w = level_group_is_p_group(&[odo.clone()], 0, 2, 1000).unwrap();
        assert_eq!(w.order, 1);
        assert!(w.p_power);

        let w = level_group_is_p_group(&[odo.clone()], 2, 2, 1000).unwrap();
        assert_eq!(w.order, 4);
        assert!(w.p_power);

        // A ternary 3-cycle generator has level groups of order 3, which is
        // not a 2-power.
        let rot = PermAutomaton::new(
            3,
            vec!["rot".into()],
            vec![vec![0, 0, 0]],
            vec![vec![1, 2, 0]],
        )
        .unwrap()
        .pointed(0);
        let w = level_group_is_p_group(&[rot], 1, 2, 1000).unwrap();
        assert_eq!(w.order, 3);
        assert!(!w.p_power);
    }

    #[test]
    fn level_witness_cap() {
        let odo = odometer();
        assert!(matches!(
            level_group_is_p_group(&[odo], 25, 2, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }
}
