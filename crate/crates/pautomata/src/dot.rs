//! DOT export for automata and level (Schreier-style) graphs.

use crate::perm::Permutation;
use crate::transducer::PermAutomaton;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One node per state labeled with its output permutation in cycle
/// notation, edges labeled `x|out(x)`.
pub fn automaton_dot(automaton: &PermAutomaton, start: Option<usize>) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
    for q in 0..automaton.state_count() {
        let perm = match automaton.out_perm(q) {
            Ok(p) => p.cycle_notation(),
            Err(_) => "non-bijective".to_string(),
        };
        let shape = if start == Some(q) {
            ", shape=doublecircle"
        } else {
            ""
        };
        out.push_str(&format!(
            "  \"{}\" [label=\"{}\\n{}\"{}];\n",
            escape(automaton.state_id(q)),
            escape(automaton.state_id(q)),
            escape(&perm),
            shape
        ));
    }
    for q in 0..automaton.state_count() {
        for x in 0..automaton.alphabet() {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}|{}\"];\n",
                escape(automaton.state_id(q)),
                escape(automaton.state_id(automaton.next(q, x))),
                escape(&automaton.letters()[x]),
                escape(&automaton.letters()[automaton.out(q, x)]),
            ));
        }
    }
    out.push_str("}\n");
    out
}

/// Schreier-style graph of permutations acting on named points: one edge per
/// generator from each point to its image, labeled by the generator index.
pub fn schreier_dot(perms: &[Permutation], node_names: &[String]) -> String {
    let mut out = String::from("digraph schreier {\n");
    for name in node_names {
        out.push_str(&format!("  \"{}\";\n", escape(name)));
    }
    for (gi, perm) in perms.iter().enumerate() {
        for point in 0..perm.len() {
            let image = perm.apply(point);
            if image == point {
                continue;
            }
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"g{}\"];\n",
                escape(&node_names[point]),
                escape(&node_names[image]),
                gi
            ));
        }
    }
    out.push_str("}\n");
    out
}
