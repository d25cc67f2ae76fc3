//! Regular planar trees, stored as preorder token sequences.
//!
//! A tree is a root followed by its subtrees in left-to-right order. Every
//! vertex is either a leaf (labelled `1..=n` from left to right) or a vertex
//! with `k >= 0` ordered children. A childless non-root vertex that is not a
//! leaf is a null vertex. Since leaves and null vertices are exactly the
//! childless non-root vertices, the token sequence is already canonical.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Leaf,
    /// A non-leaf vertex with the given number of children.
    Node(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Root,
    Internal,
    Null,
    Leaf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub kind: VertexKind,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlanarTree {
    tokens: Vec<Token>,
}

/// `In(v)`, levels and the parity split of the non-leaf vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexClassification {
    /// `In(v)` for every vertex in preorder; zero for leaves and null vertices.
    pub in_counts: Vec<usize>,
    pub levels: Vec<usize>,
    pub vin: Vec<usize>,
    pub vin0: Vec<usize>,
    pub vin1: Vec<usize>,
}

impl PlanarTree {
    pub fn from_tokens(tokens: Vec<Token>) -> Result<Self> {
        if tokens.first() == Some(&Token::Leaf) {
            return Err(Error::InvalidParameter("the root cannot be a leaf".into()));
        }
        // number of subtrees still to be read
        let mut open = 1usize;
        for (pos, t) in tokens.iter().enumerate() {
            if open == 0 {
                return Err(Error::InvalidParameter(format!("trailing tokens after position {pos}")));
            }
            open -= 1;
            if let Token::Node(k) = t {
                open += k;
            }
        }
        if open != 0 || tokens.is_empty() {
            return Err(Error::InvalidParameter("incomplete tree".into()));
        }
        Ok(PlanarTree { tokens })
    }

    /// Root with one leaf: `T_1` with `In(root) = 1`.
    pub fn trivial() -> Self {
        PlanarTree { tokens: vec![Token::Node(1), Token::Leaf] }
    }

    /// Root with `k` leaves.
    pub fn corolla(k: usize) -> Self {
        let mut tokens = vec![Token::Node(k)];
        tokens.extend(std::iter::repeat(Token::Leaf).take(k));
        PlanarTree { tokens }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn vertex_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn arity(&self) -> usize {
        self.tokens.iter().filter(|t| **t == Token::Leaf).count()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = Vec::with_capacity(self.tokens.len());
        // open ancestors with the number of children still to be visited
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for (v, t) in self.tokens.iter().enumerate() {
            while stack.last().is_some_and(|&(_, r)| r == 0) {
                stack.pop();
            }
            let parent = stack.last().map(|&(p, _)| p);
            let level = parent.map_or(0, |p| out[p].level + 1);
            if let Some(p) = parent {
                out[p].children.push(v);
                stack.last_mut().expect("parent on stack").1 -= 1;
            }
            let kind = match (t, parent) {
                (_, None) => VertexKind::Root,
                (Token::Leaf, _) => VertexKind::Leaf,
                (Token::Node(0), _) => VertexKind::Null,
                (Token::Node(_), _) => VertexKind::Internal,
            };
            out.push(Vertex { parent, children: Vec::new(), kind, level });
            if let Token::Node(k) = t {
                stack.push((v, *k));
            }
        }
        out
    }

    /// Levels of all vertices in preorder.
    pub fn levels(&self) -> Vec<usize> {
        self.vertices().iter().map(|v| v.level).collect()
    }

    /// Preorder positions of the leaves, in label order.
    pub fn leaf_positions(&self) -> Vec<usize> {
        self.tokens.iter().enumerate().filter(|(_, t)| **t == Token::Leaf).map(|(i, _)| i).collect()
    }

    /// Preorder positions of the non-leaf vertices.
    pub fn vin(&self) -> Vec<usize> {
        self.tokens.iter().enumerate().filter(|(_, t)| **t != Token::Leaf).map(|(i, _)| i).collect()
    }

    pub fn classify(&self) -> VertexClassification {
        let vs = self.vertices();
        let levels: Vec<usize> = vs.iter().map(|v| v.level).collect();
        let in_counts = self
            .tokens
            .iter()
            .map(|t| match t {
                Token::Leaf => 0,
                Token::Node(k) => *k,
            })
            .collect();
        let vin = self.vin();
        let vin0 = vin.iter().copied().filter(|&v| levels[v] % 2 == 0).collect();
        let vin1 = vin.iter().copied().filter(|&v| levels[v] % 2 == 1).collect();
        VertexClassification { in_counts, levels, vin, vin0, vin1 }
    }

    /// Every leaf at an odd level.
    pub fn is_odd(&self) -> bool {
        let levels = self.levels();
        self.leaf_positions().iter().all(|&v| levels[v] % 2 == 1)
    }

    /// Replace leaf `i` (1-based) by the root of `other`.
    pub fn graft(&self, i: usize, other: &PlanarTree) -> Result<PlanarTree> {
        let pos = *self
            .leaf_positions()
            .get(i.wrapping_sub(1))
            .ok_or(Error::IndexOutOfRange { position: i, arity: self.arity() })?;
        let mut tokens = self.tokens[..pos].to_vec();
        tokens.extend_from_slice(&other.tokens);
        tokens.extend_from_slice(&self.tokens[pos + 1..]);
        Ok(PlanarTree { tokens })
    }

    /// Range of preorder positions occupied by the subtree rooted at `v`.
    pub fn subtree_range(&self, v: usize) -> std::ops::Range<usize> {
        let mut open = 1usize;
        let mut end = v;
        while open > 0 {
            open -= 1;
            if let Token::Node(k) = self.tokens[end] {
                open += k;
            }
            end += 1;
        }
        v..end
    }

    /// Canonical text form: a vertex with children is `(c1 c2 ...)`, a leaf is
    /// its label and a null vertex is `*`.
    pub fn encode(&self) -> String {
        fn go(t: &[Token], pos: &mut usize, label: &mut usize, root: bool, out: &mut String) {
            let tok = t[*pos];
            *pos += 1;
            match tok {
                Token::Leaf => {
                    *label += 1;
                    out.push_str(&label.to_string());
                }
                Token::Node(0) if !root => out.push('*'),
                Token::Node(k) => {
                    out.push('(');
                    for c in 0..k {
                        if c > 0 {
                            out.push(' ');
                        }
                        go(t, pos, label, false, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut out = String::new();
        go(&self.tokens, &mut 0, &mut 0, true, &mut out);
        out
    }

    /// Inverse of [`PlanarTree::encode`]. Leaf labels must read `1, 2, ...`
    /// from left to right.
    pub fn decode(s: &str) -> Result<PlanarTree> {
        let bad = |m: &str| Error::InvalidParameter(format!("bad tree encoding {s:?}: {m}"));
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0usize;
        let mut next_label = 1usize;
        let mut tokens = Vec::new();

        fn skip_ws(c: &[char], pos: &mut usize) {
            while *pos < c.len() && c[*pos].is_whitespace() {
                *pos += 1;
            }
        }

        // explicit stack of node token indices
        let mut stack: Vec<usize> = Vec::new();
        skip_ws(&chars, &mut pos);
        loop {
            skip_ws(&chars, &mut pos);
            if pos >= chars.len() {
                break;
            }
            match chars[pos] {
                '(' => {
                    if let Some(&p) = stack.last() {
                        if let Token::Node(k) = &mut tokens[p] {
                            *k += 1;
                        }
                    } else if !tokens.is_empty() {
                        return Err(bad("more than one root"));
                    }
                    tokens.push(Token::Node(0));
                    stack.push(tokens.len() - 1);
                    pos += 1;
                }
                ')' => {
                    stack.pop().ok_or_else(|| bad("unbalanced ')'"))?;
                    pos += 1;
                }
                '*' => {
                    let p = *stack.last().ok_or_else(|| bad("null vertex outside a vertex"))?;
                    if let Token::Node(k) = &mut tokens[p] {
                        *k += 1;
                    }
                    tokens.push(Token::Node(0));
                    pos += 1;
                }
                c if c.is_ascii_digit() => {
                    let start = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let label: usize = chars[start..pos].iter().collect::<String>().parse().map_err(|_| bad("label"))?;
                    if label != next_label {
                        return Err(bad("leaf labels must increase from 1"));
                    }
                    next_label += 1;
                    let p = *stack.last().ok_or_else(|| bad("leaf outside a vertex"))?;
                    if let Token::Node(k) = &mut tokens[p] {
                        *k += 1;
                    }
                    tokens.push(Token::Leaf);
                }
                _ => return Err(bad("unexpected character")),
            }
        }
        if !stack.is_empty() {
            return Err(bad("unbalanced '('"));
        }
        PlanarTree::from_tokens(tokens)
    }
}

impl fmt::Display for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Finite bounds for tree enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeBounds {
    /// Total number of vertices, leaves included.
    pub max_vertices: usize,
    /// Allowed `In(v)` for non-leaf vertices at even levels (root included).
    pub even_in: BTreeSet<usize>,
    /// Allowed `In(v)` for non-leaf vertices at odd levels.
    pub odd_in: BTreeSet<usize>,
    /// Bound on the number of non-leaf vertices at odd levels.
    pub max_vin1: Option<usize>,
}

impl TreeBounds {
    /// Same allowed `In(v)` at every level.
    pub fn global(max_vertices: usize, allowed_in: &[usize]) -> Self {
        let s: BTreeSet<usize> = allowed_in.iter().copied().collect();
        TreeBounds { max_vertices, even_in: s.clone(), odd_in: s, max_vin1: None }
    }

    /// Any `In(v)` up to `max_in`.
    pub fn any(max_vertices: usize, max_in: usize) -> Self {
        let all: Vec<usize> = (0..=max_in).collect();
        Self::global(max_vertices, &all)
    }

    fn allowed(&self, parity: usize) -> &BTreeSet<usize> {
        if parity == 0 {
            &self.even_in
        } else {
            &self.odd_in
        }
    }
}

/// Trees emitted by an enumeration together with the bounds used and an
/// independent count of the same family.
#[derive(Clone, Debug)]
pub struct TreeEnumeration {
    pub trees: Vec<PlanarTree>,
    pub bounds: TreeBounds,
    pub expected_count: u128,
}

impl TreeEnumeration {
    /// The emitted list has no duplicates and matches the independent count.
    pub fn is_certified(&self) -> bool {
        let distinct: BTreeSet<&PlanarTree> = self.trees.iter().collect();
        distinct.len() == self.trees.len() && self.trees.len() as u128 == self.expected_count
    }
}

/// Key: (parity of the level, leaves, vertices, odd non-leaf vertices). The
/// last entry stays 0 when `max_vin1` is unset.
type Key = (usize, usize, usize, usize);

struct Enumerator<'a> {
    bounds: &'a TreeBounds,
    odd_only: bool,
    subtrees: BTreeMap<Key, Vec<Vec<Token>>>,
    forests: BTreeMap<(usize, usize, usize, usize, usize), Vec<Vec<Token>>>,
}

impl Enumerator<'_> {
    /// Subtrees hanging at a non-root vertex of the given parity.
    fn subtree(&mut self, key: Key) -> Vec<Vec<Token>> {
        if let Some(v) = self.subtrees.get(&key) {
            return v.clone();
        }
        let (parity, leaves, verts, odd) = key;
        let mut out = Vec::new();
        if leaves == 1 && verts == 1 && odd == 0 && (!self.odd_only || parity == 1) {
            out.push(vec![Token::Leaf]);
        }
        out.extend(self.node(key));
        self.subtrees.insert(key, out.clone());
        out
    }

    /// Subtrees whose top vertex is a non-leaf vertex.
    fn node(&mut self, (parity, leaves, verts, odd): Key) -> Vec<Vec<Token>> {
        let mut out = Vec::new();
        if verts == 0 {
            return out;
        }
        let own_odd = usize::from(parity == 1 && self.bounds.max_vin1.is_some());
        if odd < own_odd {
            return out;
        }
        let allowed: Vec<usize> = self.bounds.allowed(parity).iter().copied().collect();
        for k in allowed {
            if k + 1 > verts {
                continue;
            }
            for f in self.forest(1 - parity, k, leaves, verts - 1, odd - own_odd) {
                let mut t = vec![Token::Node(k)];
                t.extend(f);
                out.push(t);
            }
        }
        out
    }

    /// Ordered forests of `k` subtrees at the given parity with exact totals.
    fn forest(&mut self, parity: usize, k: usize, leaves: usize, verts: usize, odd: usize) -> Vec<Vec<Token>> {
        let key = (parity, k, leaves, verts, odd);
        if let Some(v) = self.forests.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if k == 0 {
            if leaves == 0 && verts == 0 && odd == 0 {
                out.push(Vec::new());
            }
        } else if verts >= k {
            for l1 in 0..=leaves {
                for v1 in 1..=(verts - (k - 1)) {
                    for o1 in 0..=odd {
                        let firsts = self.subtree((parity, l1, v1, o1));
                        if firsts.is_empty() {
                            continue;
                        }
                        let rests = self.forest(parity, k - 1, leaves - l1, verts - v1, odd - o1);
                        for a in &firsts {
                            for b in &rests {
                                let mut t = a.clone();
                                t.extend_from_slice(b);
                                out.push(t);
                            }
                        }
                    }
                }
            }
        }
        self.forests.insert(key, out.clone());
        out
    }
}

fn enumerate(n: usize, bounds: &TreeBounds, odd_only: bool) -> Vec<PlanarTree> {
    let mut e = Enumerator { bounds, odd_only, subtrees: BTreeMap::new(), forests: BTreeMap::new() };
    let mut out = Vec::new();
    let cap = bounds.max_vin1.map_or(0, |c| c.min(bounds.max_vertices));
    for verts in 1..=bounds.max_vertices {
        for odd in 0..=cap {
            for t in e.node((0, n, verts, odd)) {
                out.push(PlanarTree { tokens: t });
            }
        }
    }
    out
}

/// Number of trees with the given totals, by a recurrence on counts only.
fn count(n: usize, bounds: &TreeBounds, odd_only: bool) -> u128 {
    // c[parity][leaves][verts][odd] for subtrees, node-only variant for roots
    let vmax = bounds.max_vertices;
    let omax = bounds.max_vin1.map_or(0, |c| c.min(vmax));
    let dim = |_: ()| vec![vec![vec![0u128; omax + 1]; vmax + 1]; n + 1];
    let mut sub = [dim(()), dim(())];
    let mut node = [dim(()), dim(())];
    for verts in 1..=vmax {
        for parity in 0..2 {
            let other = 1 - parity;
            let own = usize::from(parity == 1 && bounds.max_vin1.is_some());
            for &k in bounds.allowed(parity) {
                if k + 1 > verts {
                    continue;
                }
                // forest counts of k subtrees with verts - 1 vertices, by convolution
                let mut f = vec![vec![vec![0u128; omax + 1]; vmax + 1]; n + 1];
                f[0][0][0] = 1;
                for _ in 0..k {
                    let mut g = vec![vec![vec![0u128; omax + 1]; vmax + 1]; n + 1];
                    for l in 0..=n {
                        for v in 0..verts {
                            for o in 0..=omax {
                                if f[l][v][o] == 0 {
                                    continue;
                                }
                                for l2 in 0..=(n - l) {
                                    for v2 in 1..(verts - v) {
                                        for o2 in 0..=(omax - o) {
                                            let c = sub[other][l2][v2][o2];
                                            if c > 0 {
                                                g[l + l2][v + v2][o + o2] += f[l][v][o] * c;
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                    f = g;
                }
                for l in 0..=n {
                    for o in 0..=omax {
                        if o + own <= omax {
                            node[parity][l][verts][o + own] += f[l][verts - 1][o];
                        }
                    }
                }
            }
            for l in 0..=n {
                for o in 0..=omax {
                    sub[parity][l][verts][o] = node[parity][l][verts][o];
                }
            }
            if verts == 1 && n >= 1 && (!odd_only || parity == 1) {
                sub[parity][1][1][0] += 1;
            }
        }
    }
    let mut total = 0;
    for verts in 1..=vmax {
        for o in 0..=omax {
            total += node[0][n][verts][o];
        }
    }
    total
}

/// All regular planar `n`-trees within the bounds, each exactly once.
pub fn enumerate_trees(n: usize, bounds: &TreeBounds) -> TreeEnumeration {
    TreeEnumeration {
        trees: enumerate(n, bounds, false),
        bounds: bounds.clone(),
        expected_count: count(n, bounds, false),
    }
}

/// Trees within the bounds whose leaves all sit at odd levels.
pub fn enumerate_odd_trees(n: usize, bounds: &TreeBounds) -> TreeEnumeration {
    TreeEnumeration {
        trees: enumerate(n, bounds, true),
        bounds: bounds.clone(),
        expected_count: count(n, bounds, true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn catalan(n: u128) -> u128 {
        let mut c = 1u128;
        for i in 0..n {
            c = c * 2 * (2 * i + 1) / (i + 2);
        }
        c
    }

    #[test]
    fn trivial_tree_only_with_two_vertices() {
        let e = enumerate_trees(1, &TreeBounds::any(2, 3));
        assert_eq!(e.trees, vec![PlanarTree::trivial()]);
        assert!(e.is_certified());
    }

    #[test]
    fn binary_trees_are_catalan() {
        for n in 1..=8u128 {
            let e = enumerate_trees(n as usize, &TreeBounds::global(2 * n as usize + 1, &[2]));
            assert!(e.is_certified());
            let expect = if n == 1 { 0 } else { catalan(n - 1) };
            assert_eq!(e.trees.len() as u128, expect, "n = {n}");
        }
        assert_eq!(enumerate_trees(2, &TreeBounds::global(3, &[2])).trees.len(), 1);
        assert_eq!(enumerate_trees(4, &TreeBounds::global(7, &[2])).trees.len(), 5);
    }

    #[test]
    fn classification_examples() {
        let c = PlanarTree::trivial().classify();
        assert_eq!(c.vin, vec![0]);
        assert_eq!(c.in_counts[0], 1);
        assert_eq!(c.levels, vec![0, 1]);
        assert_eq!(c.vin0, vec![0]);

        let c = PlanarTree::corolla(2).classify();
        assert_eq!(c.in_counts[0], 2);
        assert_eq!(c.levels, vec![0, 1, 1]);
        assert_eq!(c.vin0, vec![0]);
        assert!(c.vin1.is_empty());

        let chain = PlanarTree::decode("(((1)))").unwrap();
        let c = chain.classify();
        assert_eq!(c.levels, vec![0, 1, 2, 3]);
        assert_eq!(c.vin0, vec![0, 2]);
        assert_eq!(c.vin1, vec![1]);
        assert!(chain.is_odd());
    }

    #[test]
    fn odd_tree_examples() {
        assert!(PlanarTree::trivial().is_odd());
        let t = PlanarTree::decode("((1) 2)").unwrap();
        assert!(!t.is_odd());
    }

    #[test]
    fn odd_trees_match_filter() {
        let mut b = TreeBounds::any(9, 3);
        b.odd_in = [2].into_iter().collect();
        b.max_vin1 = Some(2);
        let odd = enumerate_odd_trees(3, &b);
        assert!(odd.is_certified());
        let filtered: Vec<PlanarTree> = enumerate_trees(3, &b).trees.into_iter().filter(PlanarTree::is_odd).collect();
        assert_eq!(odd.trees, filtered);
        assert!(!odd.trees.is_empty());
    }

    #[test]
    fn encoding_examples() {
        let t = PlanarTree::decode("(1 (2 * 3) *)").unwrap();
        assert_eq!(t.arity(), 3);
        assert_eq!(t.encode(), "(1 (2 * 3) *)");
        assert_eq!(PlanarTree::decode("()").unwrap().arity(), 0);
        assert!(PlanarTree::decode("(2 1)").is_err());
        assert!(PlanarTree::decode("(1) (2)").is_err());
    }

    #[test]
    fn graft_replaces_a_leaf() {
        let t = PlanarTree::corolla(2).graft(2, &PlanarTree::corolla(2)).unwrap();
        assert_eq!(t.encode(), "(1 (2 3))");
        assert!(PlanarTree::corolla(2).graft(3, &PlanarTree::trivial()).is_err());
    }

    proptest! {
        #[test]
        fn edge_count_and_round_trip(n in 0usize..4, v in 1usize..8) {
            let e = enumerate_trees(n, &TreeBounds::any(v, 3));
            prop_assert!(e.is_certified());
            for t in &e.trees {
                let c = t.classify();
                let edges: usize = c.vin.iter().map(|&x| c.in_counts[x]).sum();
                prop_assert_eq!(edges, t.vertex_count() - 1);
                prop_assert_eq!(PlanarTree::decode(&t.encode()).unwrap(), t.clone());
                prop_assert_eq!(t.arity(), n);
            }
        }
    }
}
