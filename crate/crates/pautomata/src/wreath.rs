//! Iterated wreath-product elements stored as portraits.
//!
//! A portrait assigns to every internal node of a finite rooted tree a local
//! permutation of the next level's alphabet. Local actions are evaluated at
//! the *original* input prefix: coordinate `i+1` of the output is the local
//! permutation at node `w_1…w_i` applied to `w_{i+1}`.

use std::collections::BTreeMap;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{is_power_of_cycle, Permutation};
use crate::words;

#[derive(Clone, PartialEq, Eq, Debug)]
struct Node {
    local: Permutation,
    children: Vec<Node>,
}

/// A tree automorphism of a finite-depth rooted tree, as a portrait.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WreathElement {
    sizes: Vec<usize>,
    root: Node,
}

impl WreathElement {
    /// Identity portrait for the given per-level alphabet sizes.
    pub fn identity(sizes: &[usize]) -> Self {
        WreathElement {
            sizes: sizes.to_vec(),
            root: identity_node(sizes),
        }
    }

    /// Builds a portrait by querying `local` with every internal node
    /// address (a word of length `< depth`).
    pub fn build(sizes: &[usize], mut local: impl FnMut(&[usize]) -> Permutation) -> Result<Self> {
        assert!(!sizes.is_empty(), "portrait needs at least one level");
        let mut path = Vec::new();
        let root = build_node(sizes, &mut path, &mut local)?;
        Ok(WreathElement {
            sizes: sizes.to_vec(),
            root,
        })
    }

    pub fn depth(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Local permutation at the node addressed by `path`, if the address is
    /// valid.
    pub fn local_at(&self, path: &[usize]) -> Option<&Permutation> {
        let mut node = &self.root;
        for (level, &letter) in path.iter().enumerate() {
            if letter >= self.sizes.get(level).copied()? {
                return None;
            }
            node  = node.children.get(letter)?;
        }
        Some(&node.local)
    }

    /// Applies the automorphism to a word of length exactly `depth`.
    pub fn apply(&self, word: &[usize]) -> Result<Vec<usize>> {
        if word.len() != self.depth() {
            return Err(Error::LengthMismatch {
                expected: self.depth(),
                got: word.len(),
            });
        }
        self.apply_prefix(word)
    }

    /// Applies the automorphism to a prefix (length at most `depth`); tree
    /// automorphisms act on every level.
    pub fn apply_prefix(&self, word: &[usize]) -> Result<Vec<usize>> {
        if word.len() > self.depth() {
            return Err(Error::LengthMismatch {
                expected: self.depth(),
                got: word.len(),
            });
        }
        let mut out = Vec::with_capacity(word.len());
        let mut node = &self.root;
        for (level, &letter) in word.iter().enumerate() {
            if letter >= self.sizes[level] {
                return Err(Error::LetterOutOfRange {
                    letter,
                    alphabet: self.sizes[level],
                });
            }
            out.push(node.local.apply(letter));
            if level + 1 < word.len() {
                node = &node.children[letter];
            }
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        fn node_is_identity(node: &Node) -> bool {
            node.local.is_identity() && node.children.iter().all(node_is_identity)
        }
        node_is_identity(&self.root)
    }

    /// The permutation induced on the leaves, under the mixed-radix ranking
    /// of words.
    pub fn as_leaf_permutation(&self) -> Permutation {
        let total: usize = self.sizes.iter().product();
        let mut images = Vec::with_capacity(total);
        for r in 0..total {
            let word = unrank_mixed(r, &self.sizes);
            let image = self.apply(&word).expect("word in range");
            images.push(rank_mixed(&image, &self.sizes));
        }
        Permutation::new(images).expect("automorphism is a bijection on leaves")
    }
}

fn identity_node(sizes: &[usize]) -> Node {
    let children = if sizes.len() > 1 {
        (0..sizes[0]).map(|_| identity_node(&sizes[1..])).collect()
    } else {
        Vec::new()
    };
    Node {
        local: Permutation::identity(sizes[0]),
        children,
    }
}

fn build_node(
    sizes: &[usize],
    path: &mut Vec<usize>,
    local: &mut impl FnMut(&[usize]) -> Permutation,
) -> Result<Node> {
    let level = path.len();
    let perm = local(path);
    if perm.len() != sizes[level] {
        return Err(Error::LengthMismatch {
            expected: sizes[level],
            got: perm.len(),
        });
    }
    let mut children = Vec::new();
    if level + 1 < sizes.len() {
        for letter in 0..sizes[level] {
            path.push(letter);
            children.push(build_node(sizes, path, local)?);
            path.pop();
        }
    }
    Ok(Node {
        local: perm,
        children,
    })
}

fn rank_mixed(word: &[usize], sizes: &[usize]) -> usize {
    word.iter()
        .zip(sizes)
        .fold(0, |acc, (&d, &s)| acc * s + d)
}

fn unrank_mixed(mut r: usize, sizes: &[usize]) -> Vec<usize> {
    let mut word = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        word[i] = r % sizes[i];
        r /= sizes[i];
    }
    word
}

/// Recovers the portrait of a permutation of ranked words `Y^k`.
///
/// Errors with [`Error::NotPrefixPreserving`] when the permutation does not
/// preserve the tree structure; in strict mode every local permutation must
/// additionally be a power of the standard `|Y|`-cycle
/// ([`Error::LocalActionOutsideCyclic`]).
pub fn decompose_tree_perm(q: &Permutation, y: usize, strict: bool) -> Result<WreathElement> {
    let k = words::log_exact(q.len(), y)
        .ok_or_else(|| Error::InvalidInput(format!("domain {} is not a power of {y}", q.len())))?;
    if k == 0 {
        return Err(Error::InvalidInput("domain must have at least one level".into()));
    }
    let sizes = vec![y; k];
    let cycle = Permutation::standard_cycle(y);

    // Candidate local permutation at each node, read off a zero-padded
    // representative word; a full comparison afterwards catches any
    // dependence on later letters.
    let candidate = WreathElement::build(&sizes, |path| {
        let mut images = vec![0usize; y];
        for (a, slot) in images.iter_mut().enumerate() {
            let mut word = path.to_vec();
            word.push(a);
            word.resize(k, 0);
            let image = words::unrank(q.apply(words::rank(&word, y)), y, k);
            *slot = image[path.len()];
        }
        // A non-bijective letter map cannot come from a tree automorphism;
        // signal it through a placeholder the verification pass will reject.
        Permutation::new(images).unwrap_or_else(|_| Permutation::identity(y))
    })?;

    for r in 0..q.len() {
        let word = words::unrank(r, y, k);
        let expect = words::unrank(q.apply(r), y, k);
        if candidate.apply(&word)? != expect {
            return Err(Error::NotPrefixPreserving);
        }
    }

    if strict {
        let mut stack = vec![Vec::new()];
        while let Some(path) = stack.pop() {
            let local = candidate.local_at(&path).expect("valid node address");
            if is_power_of_cycle(local, &cycle)?.is_none() {
                return Err(Error::LocalActionOutsideCyclic);
            }
            if path.len() + 1 < k {
                for a in 0..y {
                    let mut next = path.clone();
                    next.push(a);
                    stack.push(next);
                }
            }
        }
    }
    Ok(candidate)
}

// JSON encoding: nested node objects {"local": [...], "children": {letter: node}}.

#[derive(Serialize, Deserialize)]
struct NodeDto {
    local: Vec<usize>,
    children: BTreeMap<String, NodeDto>,
}

fn node_to_dto(node: &Node) -> NodeDto {
    NodeDto {
        local: node.local.images().to_vec(),
        children: node
            .children
            .iter()
            .enumerate()
            .map(|(letter, child)| (letter.to_string(), node_to_dto(child)))
            .collect(),
    }
}

fn node_from_dto(dto: &NodeDto, sizes: &mut Vec<usize>, level: usize) -> Result<Node> {
    let local = Permutation::new(dto.local.clone())?;
    match sizes.get(level) {
        Some(&s) if s != local.len() => {
            return Err(Error::InvalidFile("inconsistent level alphabet".into()))
        }
        None => sizes.push(local.len()),
        _ => {}
    }
    let mut children = Vec::new();
    if !dto.children.is_empty() {
        for letter in 0..local.len() {
            let child = dto
                .children
                .get(&letter.to_string())
                .ok_or_else(|| Error::InvalidFile(format!("missing child {letter}")))?;
            children.push(node_from_dto(child, sizes, level + 1)?);
        }
        if dto.children.len() != local.len() {
            return Err(Error::InvalidFile("extra children".into()));
        }
    }
    Ok(Node { local, children })
}

impl Serialize for WreathElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        node_to_dto(&self.root).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WreathElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dto = NodeDto::deserialize(deserializer)?;
        let mut sizes = Vec::new();
        let root = node_from_dto(&dto, &mut sizes, 0).map_err(de::Error::custom)?;
        // Depth consistency: every leaf must sit at the same level.
        fn check_depth(node: &Node, level: usize, depth: usize) -> bool {
            if node.children.is_empty() {
                level + 1 == depth
            } else {
                node.children.iter().all(|c| check_depth(c, level + 1, depth))
            }
        }
        let depth = sizes.len();
        if !check_depth(&root, 0, depth) {
            return Err(de::Error::custom("ragged portrait depth"));
        }
        Ok(WreathElement { sizes, root })
    }
}
