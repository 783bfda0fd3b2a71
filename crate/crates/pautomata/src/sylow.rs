//! Constructive embedding of a permutation p-group into the automorphisms
//! of the p-regular rooted tree.
//!
//! Given generators of a p-group acting on `p^k` points, the embedding
//! produces a relabeling `pi` of the points by words of length `k` such that
//! every conjugated generator is prefix-preserving with all local actions
//! powers of the standard p-cycle. The construction is bottom-up: minimal
//! size-p blocks first (pair-seeded closure), coherent labels inside blocks,
//! then recursion on the induced block action. All tie-breaking is by
//! minimal domain index, so the output is deterministic.

use std::collections::HashMap;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::closure::{group_closure, Closure};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::words;
use crate::wreath::{decompose_tree_perm, WreathElement};

/// A relabeling of `p^k` points by words of length `k` over `{0,…,p-1}`,
/// together with the conjugated generators it was computed for.
#[derive(Clone, Debug)]
pub struct TreeEmbedding {
    p: usize,
    k: usize,
    pi: Vec<Vec<usize>>,
    inverse: HashMap<Vec<usize>, usize>,
    conjugated_generators: Vec<WreathElement>,
}

impl TreeEmbedding {
    /// Builds an embedding from a point-to-word table; the table must be a
    /// bijection onto `{0,…,p-1}^k`.
    pub fn new(p: usize, k: usize, pi: Vec<Vec<usize>>) -> Result<Self> {
        let total = words::count(p, k)
            .ok_or_else(|| Error::InvalidInput("tree too large".into()))?;
        if pi.len() != total {
            return Err(Error::LengthMismatch {
                expected: total,
                got: pi.len(),
            });
        }
        let mut inverse = HashMap::with_capacity(total);
        for (point, word) in pi.iter().enumerate() {
            if word.len() != k || word.iter().any(|&d| d >= p) {
                return Err(Error::InvalidInput(format!("bad word {word:?}")));
            }
            if inverse.insert(word.clone(), point).is_some() {
                return Err(Error::InvalidInput(format!("duplicate word {word:?}")));
            }
        }
        Ok(TreeEmbedding {
            p,
            k,
            pi,
            inverse,
            conjugated_generators: Vec::new(),
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn word(&self, point: usize) -> &[usize] {
        &self.pi[point]
    }

    pub fn point(&self, word: &[usize]) -> Option<usize> {
        self.inverse.get(word).copied()
    }

    /// The relabeling as a permutation: point to rank of its word.
    pub fn as_permutation(&self) -> Permutation {
        Permutation::new(
            self.pi
                .iter()
                .map(|w| words::rank(w, self.p))
                .collect(),
        )
        .expect("pi is a bijection")
    }

    /// Conjugates a permutation of the points into a permutation of ranked
    /// words: `u -> pi(g(pi^{-1}(u)))`.
    pub fn conjugate(&self, g: &Permutation) -> Permutation {
        assert_eq!(g.len(), self.pi.len());
        let mut images = vec![0; self.pi.len()];
        for point in 0..self.pi.len() {
            images[words::rank(&self.pi[point], self.p)] =
                words::rank(&self.pi[g.apply(point)], self.p);
        }
        Permutation::new(images).expect("conjugate of a bijection")
    }

    /// Portraits of the generators the embedding was computed for; empty for
    /// embeddings loaded from a file or built directly from a table.
    pub fn conjugated_generators(&self) -> &[WreathElement] {
        &self.conjugated_generators
    }
}

/// Computes a tree embedding for the group generated by `gens`.
///
/// Errors: "domain not a p-power", "not a p-group" (an element order or the
/// group order is not a power of p), "cap exceeded" (closure incomplete).
pub fn sylow_tree_embedding(
    gens: &[Permutation],
    p: usize,
    cap: usize,
) -> Result<TreeEmbedding> {
    if gens.is_empty() {
        return Err(Error::InvalidInput("no generators".into()));
    }
    if !words::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let degree = gens[0].len();
    if gens.iter().any(|g| g.len() != degree) {
        return Err(Error::InvalidInput("generators must share a domain".into()));
    }
    let k = words::log_exact(degree, p).ok_or(Error::DomainNotPPower)?;

    let closure = group_closure(gens, cap);
    if !closure.complete {
        return Err(Error::CapExceeded {
            what: format!("group closure above {cap}"),
        });
    }
    check_p_group(&closure, p)?;

    let pi = embed_group(&closure.elements, p, k);
    let mut embedding = TreeEmbedding::new(p, k, pi)?;
    embedding.conjugated_generators = gens
        .iter()
        .map(|g| decompose_tree_perm(&embedding.conjugate(g), p, true))
        .collect::<Result<_>>()?;
    Ok(embedding)
}

fn check_p_group(closure: &Closure, p: usize) -> Result<()> {
    if words::log_exact(closure.order(), p).is_none() {
        return Err(Error::NotAPGroup {
            reason: format!("group order {} is not a power of {p}", closure.order()),
        });
    }
    for e in &closure.elements {
        if words::log_exact(e.order() as usize, p).is_none() {
            return Err(Error::NotAPGroup {
                reason: format!("element of order {}", e.order()),
            });
        }
    }
    Ok(())
}

/// Recursive labeling; `elements` is the full (closed, sorted) group.
fn embed_group(elements: &[Permutation], p: usize, k: usize) -> Vec<Vec<usize>> {
    let n = elements[0].len();
    if k == 0 {
        return vec![Vec::new()];
    }

    let blocks = size_p_blocks(elements, p, n);
    let mut block_of = vec![0usize; n];
    for (bid, block) in blocks.iter().enumerate() {
        for &pt in block {
            block_of[pt] = bid;
        }
    }

    // Induced action on blocks, per group element.
    let induced: Vec<Permutation> = elements
        .iter()
        .map(|e| {
            Permutation::new(
                blocks
                    .iter()
                    .map(|block| block_of[e.apply(block[0])])
                    .collect(),
            )
            .expect("blocks form an invariant partition")
        })
        .collect();

    let labels = block_labels(elements, &induced, &blocks, p);

    let mut dedup = induced.clone();
    dedup.sort_unstable();
    dedup.dedup();
    let sub = embed_group(&dedup, p, k - 1);

    (0..n)
        .map(|pt| {
            let mut word = sub[block_of[pt]].clone();
            word.push(labels[pt]);
            word
        })
        .collect()
}

/// Partition of the domain into group-invariant blocks of size exactly `p`,
/// sorted by minimal element.
fn size_p_blocks(elements: &[Permutation], p: usize, n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut fixed: Vec<usize> = Vec::new();

    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut orbit: Vec<usize> = elements
            .iter()
            .map(|e| e.apply(start))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        for &pt in &orbit {
            seen[pt] = true;
        }
        if orbit.len() == 1 {
            fixed.push(start);
            continue;
        }
        debug_assert!(words::log_exact(orbit.len(), p).is_some());
        orbit.sort_unstable();
        let system = minimal_p_system(elements, &orbit, p, n)
            .expect("a transitive p-group action has size-p blocks");
        blocks.extend(system);
    }

    debug_assert_eq!(fixed.len() % p, 0);
    for chunk in fixed.chunks(p) {
        blocks.push(chunk.to_vec());
    }
    blocks.sort_by_key(|b| b[0]);
    blocks
}

/// Scans seed pairs `(min, beta)` in ascending `beta` order and returns the
/// first pair-closure system whose blocks have size exactly `p`.
fn minimal_p_system(
    elements: &[Permutation],
    orbit: &[usize],
    p: usize,
    n: usize,
) -> Option<Vec<Vec<usize>>> {
    let alpha = orbit[0];
    for &beta in &orbit[1..] {
        let mut uf = UnionFind::new(n);
        let mut work = vec![(alpha, beta)];
        uf.union(alpha, beta);
        while let Some((x, y)) = work.pop() {
            for e in elements {
                let (ex, ey) = (e.apply(x), e.apply(y));
                if uf.union(ex, ey) {
                    work.push((ex, ey));
                }
            }
        }
        let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
        for &pt in orbit {
            classes.entry(uf.find(pt)).or_default().push(pt);
        }
        if classes[&uf.find(alpha)].len() == p {
            let mut blocks: Vec<Vec<usize>> = classes.into_values().collect();
            for b in &mut blocks {
                b.sort_unstable();
            }
            blocks.sort_by_key(|b| b[0]);
            return Some(blocks);
        }
    }
    None
}

/// Labels every point within its block so that all between-block transports
/// and within-block stabilizer actions become powers of the standard cycle.
fn block_labels(
    elements: &[Permutation],
    induced: &[Permutation],
    blocks: &[Vec<usize>],
    p: usize,
) -> Vec<usize> {
    let n = elements[0].len();
    let mut labels = vec![usize::MAX; n];
    let mut block_seen = vec![false; blocks.len()];

    for rep in 0..blocks.len() {
        if block_seen[rep] {
            continue;
        }
        // Orbit of the representative block under the induced action.
        let mut orbit: Vec<usize> = induced
            .iter()
            .map(|e| e.apply(rep))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        orbit.sort_unstable();
        for &b in &orbit {
            block_seen[b] = true;
        }

        // Label the representative so that the setwise-stabilizer action on
        // it lands in the standard cycle's powers; for a p-group that action
        // is trivial or cyclic of order p.
        let members = &blocks[rep];
        let stab_perm = elements
            .iter()
            .zip(induced)
            .filter(|(_, ind)| ind.apply(rep) == rep)
            .map(|(e, _)| e)
            .find(|e| members.iter().any(|&m| e.apply(m) != m));
        match stab_perm {
            None => {
                for (j, &m) in members.iter().enumerate() {
                    labels[m] = j;
                }
            }
            Some(tau) => {
                let mut cur = members[0];
                for j in 0..p {
                    debug_assert_eq!(labels[cur], usize::MAX);
                    labels[cur] = j;
                    cur = tau.apply(cur);
                }
                debug_assert_eq!(cur, members[0], "stabilizer acts as a p-cycle");
            }
        }

        // Transport labels along the first group element reaching each block.
        for &target in &orbit {
            if target == rep {
                continue;
            }
            let u = elements
                .iter()
                .zip(induced)
                .find(|(_, ind)| ind.apply(rep) == target)
                .map(|(e, _)| e)
                .expect("orbit is reachable");
            for &m in members {
                labels[u.apply(m)] = labels[m];
            }
        }
    }
    debug_assert!(labels.iter().all(|&l| l < p));
    labels
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two distinct classes were merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

// JSON encoding: {"p":, "k":, "pi": [[point, "word"], ...]}; words print as
// digit strings for p <= 10 and comma-separated otherwise.

fn word_to_string(word: &[usize], p: usize) -> String {
    if p <= 10 {
        word.iter().map(|d| d.to_string()).collect()
    } else {
        words::letter_name(word)
    }
}

fn word_from_string(s: &str, p: usize, k: usize) -> Result<Vec<usize>> {
    let word = if s.contains(',') {
        words::parse_letter_name(s)?
    } else {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::InvalidFile(format!("bad word digit {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    if word.len() != k || word.iter().any(|&d| d >= p) {
        return Err(Error::InvalidFile(format!("bad word {s:?}")));
    }
    Ok(word)
}

impl Serialize for TreeEmbedding {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let pi: Vec<(usize, String)> = self
            .pi
            .iter()
            .enumerate()
            .map(|(point, word)| (point, word_to_string(word, self.p)))
            .collect();
        let mut st = serializer.serialize_struct("TreeEmbedding", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("pi", &pi)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for TreeEmbedding {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Dto {
            p: usize,
            k: usize,
            pi: Vec<(usize, String)>,
        }
        let dto = Dto::deserialize(deserializer)?;
        let total = words::count(dto.p, dto.k)
            .ok_or_else(|| de::Error::custom("tree too large"))?;
        let mut table = vec![Vec::new(); total];
        let mut filled = vec![false; total];
        for (point, s) in &dto.pi {
            if *point >= total || filled[*point] {
                return Err(de::Error::custom(format!("bad or duplicate point {point}")));
            }
            table[*point] =
                word_from_string(s, dto.p, dto.k).map_err(de::Error::custom)?;
            filled[*point] = true;
        }
        if !filled.iter().all(|&f| f) {
            return Err(de::Error::custom("missing points in pi table"));
        }
        TreeEmbedding::new(dto.p, dto.k, table).map_err(de::Error::custom)
    }
}
