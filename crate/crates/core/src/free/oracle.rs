use std::collections::BTreeMap;

use num_traits::One;

use super::basis::{add_term, Combo, TreeBasis, TreeTensor};
use super::free_op::{auto_caps, build_bases, labels_before};
use super::{DimensionTable, FreeBounds, GradedSequence};
use crate::chain::FinChainComplex;
use crate::error::{Error, Result};
use crate::exactla::{sign, zero_vector, EchelonBasis, Rational, RationalMatrix, Vector};
use crate::operad::{to_sparse, FinOperad};
use crate::trees::{PlanarTree, Token};

/// How the attached generators meet `O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleRelations {
    /// Free attachment: the generators keep their own differential.
    None,
    /// The attached sequence is a single class `s` with `d(s) = attaching`,
    /// an element of `O` in the same arity.
    Cofibration { attaching: Vec<Rational> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Gen {
    O(usize),
    A(usize),
}

struct Oracle<'a> {
    base: &'a FinOperad,
    attach: &'a GradedSequence,
    relations: &'a OracleRelations,
    unit: usize,
    gens: Vec<Vec<Gen>>,
    index: BTreeMap<(usize, Gen), usize>,
    degrees: Vec<Vec<usize>>,
    base_d: Vec<RationalMatrix>,
}

fn in_count(t: &[Token], v: usize) -> usize {
    match t[v] {
        Token::Node(k) => k,
        Token::Leaf => 0,
    }
}

/// Drop the unary vertex at `w` together with its label.
fn remove_vertex(tokens: &[Token], labels: &[usize], w: usize, lw: usize) -> TreeTensor {
    let mut t = tokens.to_vec();
    t.remove(w);
    if t == [Token::Leaf] {
        return TreeTensor::FormalUnit;
    }
    let mut l = labels.to_vec();
    l.remove(lw);
    TreeTensor::tree(PlanarTree::from_tokens(t).expect("removing a unary vertex"), l)
}

impl Oracle<'_> {
    /// The tree with vertex `v` relabelled by `o`-element `x`, or removed if
    /// `x` is the unit.
    fn relabel_o(&self, tree: &PlanarTree, labels: &[usize], v: usize, lv: usize, x: usize) -> TreeTensor {
        let k = in_count(tree.tokens(), v);
        if k == 1 && x == self.unit {
            return remove_vertex(tree.tokens(), labels, v, lv);
        }
        let mut l = labels.to_vec();
        l[lv] = self.index[&(k, Gen::O(x))];
        TreeTensor::tree(tree.clone(), l)
    }

    fn label_degrees(&self, tree: &PlanarTree, labels: &[usize]) -> Vec<usize> {
        tree.vin().iter().zip(labels).map(|(&v, &x)| self.degrees[in_count(tree.tokens(), v)][x]).collect()
    }

    fn differential(&self, t: &TreeTensor) -> Combo {
        let mut out = Combo::new();
        let TreeTensor::Tree { tree, labels } = t else { return out };
        let degs = self.label_degrees(tree, labels);
        for (lv, &v) in tree.vin().iter().enumerate() {
            let k = in_count(tree.tokens(), v);
            let sg = sign(degs[..lv].iter().sum());
            match self.gens[k][labels[lv]] {
                Gen::O(x) => {
                    for (r, c) in to_sparse(&self.base_d[k].column(x)) {
                        add_term(&mut out, self.relabel_o(tree, labels, v, lv, r), &sg * c);
                    }
                }
                Gen::A(x) => match self.relations {
                    OracleRelations::None => {
                        let c = self.attach.component(k);
                        for (r, coef) in to_sparse(&c.flat_differential().column(x)) {
                            let mut l = labels.clone();
                            l[lv] = self.index[&(k, Gen::A(r))];
                            add_term(&mut out, TreeTensor::tree(tree.clone(), l), &sg * coef);
                        }
                    }
                    OracleRelations::Cofibration { attaching } => {
                        for (r, c) in to_sparse(attaching) {
                            add_term(&mut out, self.relabel_o(tree, labels, v, lv, r), &sg * c);
                        }
                    }
                },
            }
        }
        out
    }

    /// `T - T/e` for every edge of `T` joining two `O`-labelled vertices.
    fn relations(&self, t: &TreeTensor) -> Vec<Combo> {
        let mut out = Vec::new();
        let TreeTensor::Tree { tree, labels } = t else { return out };
        let toks = tree.tokens();
        let degs = self.label_degrees(tree, labels);
        let vs = tree.vertices();
        for (lr, &r) in tree.vin().iter().enumerate() {
            let Some(u) = vs[r].parent else { continue };
            let lu = labels_before(tree, u);
            let (k_u, k_r) = (in_count(toks, u), in_count(toks, r));
            let (Gen::O(a), Gen::O(b)) = (self.gens[k_u][labels[lu]], self.gens[k_r][labels[lr]]) else {
                continue;
            };
            let mut rel = Combo::new();
            add_term(&mut rel, t.clone(), Rational::one());
            let k_new = k_u + k_r - 1;
            if k_new <= self.base.arity_max() {
                let j = vs[u].children.iter().position(|&c| c == r).expect("child of its parent") + 1;
                let sg = sign(degs[lr] * degs[lu + 1..lr].iter().sum::<usize>());
                let mut tokens = toks.to_vec();
                tokens[u] = Token::Node(k_new);
                tokens.remove(r);
                let mut l = labels.clone();
                l.remove(lr);
                let contracted = PlanarTree::from_tokens(tokens).expect("contracting an edge");
                for (c, coef) in self.base.compose_basis(k_u, j, k_r, a, b) {
                    let term = self.relabel_o(&contracted, &l, u, lu, *c);
                    add_term(&mut rel, term, -(&sg * coef));
                }
            }
            out.push(rel);
        }
        out
    }
}

fn column_vector(basis: &TreeBasis, offset: usize, len: usize, c: &Combo) -> Vector {
    let mut v = zero_vector(len);
    for (i, x) in basis.sparse(c) {
        v[i - offset] = x;
    }
    v
}

fn quotient_table(o: &Oracle<'_>, bases: &[TreeBasis], d: usize) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    let mut dims = Vec::new();
    let mut homology = Vec::new();
    for b in bases {
        let offsets: Vec<usize> = (0..=d).map(|k| b.dims[..k].iter().sum()).collect();
        // relation spans and differential columns, per degree
        let mut rel: Vec<EchelonBasis> = b.dims.iter().map(|&n| EchelonBasis::new(n)).collect();
        let mut diff: Vec<Vec<Vector>> = vec![Vec::new(); d + 1];
        let mut rel_vectors: Vec<Vec<Combo>> = vec![Vec::new(); d + 1];
        for (i, t) in b.elements.iter().enumerate() {
            let k = b.degrees[i];
            for r in o.relations(t) {
                rel[k].insert(&column_vector(b, offsets[k], b.dims[k], &r));
                rel_vectors[k].push(r);
            }
            if k >= 1 {
                diff[k].push(column_vector(b, offsets[k - 1], b.dims[k - 1], &o.differential(t)));
            }
        }
        // the ideal must be closed under d
        for k in 1..=d {
            for r in &rel_vectors[k] {
                let mut dr = Combo::new();
                for (t, c) in r {
                    for (t2, c2) in o.differential(t) {
                        add_term(&mut dr, t2, c * c2);
                    }
                }
                if !rel[k - 1].contains(&column_vector(b, offsets[k - 1], b.dims[k - 1], &dr)) {
                    return Err(Error::InvariantViolation(format!(
                        "relations are not closed under d in arity {}, degree {k}",
                        b.arity
                    )));
                }
            }
        }
        let q: Vec<usize> = (0..=d).map(|k| b.dims[k] - rel[k].dim()).collect();
        let mut ranks = vec![0; d + 2];
        for k in 1..=d {
            let mut e = rel[k - 1].clone();
            for v in &diff[k] {
                e.insert(v);
            }
            ranks[k] = e.dim() - rel[k - 1].dim();
        }
        homology.push((0..=d).map(|k| q[k] - ranks[k] - ranks[k + 1]).collect());
        dims.push(q);
    }
    Ok((dims, homology))
}

/// The pushout of `O` and the free operad on `attach`, computed as the free
/// operad on `O` (unit removed) and `attach` modulo the composition relations
/// of `O`. With a vertex cap the result is certified only if it does not
/// change when the cap grows by 2.
pub fn pushout_oracle(
    o: &FinOperad,
    attach: &GradedSequence,
    relations: &OracleRelations,
    bounds: &FreeBounds,
) -> Result<DimensionTable> {
    let (a, d) = (bounds.arity_max, bounds.max_degree);
    let base = o.truncated(a, d)?;
    let unit_sparse = to_sparse(base.unit());
    let unit = match unit_sparse.as_slice() {
        [(x, c)] if c.is_one() => *x,
        _ => return Err(Error::InvalidParameter("the unit must be a basis element".into())),
    };
    if let OracleRelations::Cofibration { attaching } = relations {
        let cells: usize = attach.components().iter().map(FinChainComplex::total_dim).sum();
        let q = (0..=attach.arity_max()).find(|&k| attach.component(k).total_dim() > 0);
        if cells != 1 || q.is_none_or(|q| q > base.arity_max() || attaching.len() != base.dim(q)) {
            return Err(Error::InvalidParameter("a cofibration attaches one class along an element of O".into()));
        }
    }
    // generators of each arity, ordered by degree
    let mut gens = Vec::new();
    let mut index = BTreeMap::new();
    let mut degrees = Vec::new();
    let mut comps = Vec::new();
    for k in 0..=a {
        let mut items: Vec<(usize, Gen)> = Vec::new();
        if k <= base.arity_max() {
            let c = base.component(k);
            items.extend((0..c.total_dim()).filter(|&x| k != 1 || x != unit).map(|x| (c.degree_of(x), Gen::O(x))));
        }
        let c = attach.component(k);
        items.extend((0..c.total_dim()).map(|x| (c.degree_of(x), Gen::A(x))));
        items.sort_by_key(|(deg, _)| *deg);
        let mut dims = vec![0; d + 1];
        for (deg, _) in &items {
            if *deg <= d {
                dims[*deg] += 1;
            }
        }
        items.retain(|(deg, _)| *deg <= d);
        for (i, (_, g)) in items.iter().enumerate() {
            index.insert((k, *g), i);
        }
        degrees.push(items.iter().map(|(deg, _)| *deg).collect::<Vec<_>>());
        gens.push(items.into_iter().map(|(_, g)| g).collect::<Vec<_>>());
        comps.push(FinChainComplex::with_zero_differential(dims));
    }
    let seq = GradedSequence::new(comps)?;
    let oracle = Oracle {
        base: &base,
        attach,
        relations,
        unit,
        gens,
        index,
        degrees,
        base_d: base.components().iter().map(FinChainComplex::flat_differential).collect(),
    };
    let no_nulls = base.dim(0) == 0 && attach.component(0).total_dim() == 0 && o.arity_max() >= a;
    match bounds.max_vertices {
        None => {
            let caps = auto_caps(&seq, a, d).ok_or(Error::NonFinite)?;
            let (dims, homology) = quotient_table(&oracle, &build_bases(&seq, a, d, &caps), d)?;
            Ok(DimensionTable { dims, homology, certified: no_nulls })
        }
        Some(cap) => {
            let (dims, homology) = quotient_table(&oracle, &build_bases(&seq, a, d, &vec![cap; a + 1]), d)?;
            let next = quotient_table(&oracle, &build_bases(&seq, a, d, &vec![cap + 2; a + 1]), d)?;
            let stable = next == (dims.clone(), homology.clone());
            Ok(DimensionTable { dims, homology, certified: no_nulls && stable })
        }
    }
}
