use std::sync::Arc;

use num_traits::One;

use super::basis::{add_term, label_products, Combo, TreeBasis, TreeTensor};
use super::GradedSequence;
use crate::chain::FinChainComplex;
use crate::error::{Error, Result};
use crate::exactla::{sign, zero_vector, Rational, RationalMatrix, Vector};
use crate::operad::{to_dense, to_sparse, FinOperad, OperadMorphism};
use crate::trees::{enumerate_trees, PlanarTree, Token, TreeBounds};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeBounds {
    pub arity_max: usize,
    pub max_degree: usize,
    /// Caller cap on the number of vertices per tree. Needed when `S(0)` or
    /// `S(1)` has elements of degree 0.
    pub max_vertices: Option<usize>,
}

/// `F(S)` truncated in arity and degree, with its tree bases.
#[derive(Clone, Debug)]
pub struct FreeOperad {
    pub operad: FinOperad,
    pub generators: GradedSequence,
    pub bases: Vec<TreeBasis>,
    pub max_degree: usize,
    /// Cap on tree size that was used.
    pub vertex_cap: Vec<usize>,
    /// True when no tree inside the truncation can have been cut by the cap.
    pub certified: bool,
}

fn min_degree(c: &FinChainComplex) -> Option<usize> {
    (0..=c.max_degree()).find(|&k| c.dim(k) > 0)
}

/// Vertex caps per arity that cannot cut a tree of degree at most `d`, when
/// `S(0)` and `S(1)` sit in positive degrees.
pub(crate) fn auto_caps(s: &GradedSequence, arity_max: usize, d: usize) -> Option<Vec<usize>> {
    let low = |k: usize| min_degree(&s.component(k));
    if low(0) == Some(0) || low(1) == Some(0) {
        return None;
    }
    // vertices of In >= 2 number at most (leaves + nulls - 1)
    let nulls = low(0).map_or(0, |m| d / m);
    let unary = low(1).map_or(0, |m| d / m);
    Some((0..=arity_max).map(|n| 2 * (n + nulls) + unary + 1).collect())
}

/// Labels of a tree in preorder of its non-leaf vertices, with the label
/// space of each vertex.
pub(crate) fn vin_in_counts(t: &PlanarTree) -> Vec<usize> {
    t.tokens()
        .iter()
        .filter_map(|x| match x {
            Token::Leaf => None,
            Token::Node(k) => Some(*k),
        })
        .collect()
}

/// Number of labels (non-leaf vertices) strictly before preorder position
/// `pos`.
pub(crate) fn labels_before(t: &PlanarTree, pos: usize) -> usize {
    t.tokens()[..pos].iter().filter(|x| **x != Token::Leaf).count()
}

fn label_degree(s: &GradedSequence, t: &PlanarTree, labels: &[usize]) -> Vec<usize> {
    vin_in_counts(t).iter().zip(labels).map(|(&k, &x)| s.component(k).degree_of(x)).collect()
}

pub(crate) fn build_bases(s: &GradedSequence, arity_max: usize, max_degree: usize, caps: &[usize]) -> Vec<TreeBasis> {
    let allowed: Vec<usize> = (0..=s.arity_max()).filter(|&k| s.component(k).total_dim() > 0).collect();
    (0..=arity_max)
        .map(|n| {
            let mut items = Vec::new();
            if n == 1 {
                items.push((0, TreeTensor::FormalUnit));
            }
            for t in enumerate_trees(n, &TreeBounds::global(caps[n], &allowed)).trees {
                let comps: Vec<FinChainComplex> = vin_in_counts(&t).iter().map(|&k| s.component(k)).collect();
                let spaces: Vec<&FinChainComplex> = comps.iter().collect();
                for (labels, d) in label_products(&spaces, max_degree) {
                    items.push((d, TreeTensor::tree(t.clone(), labels)));
                }
            }
            TreeBasis::build(n, max_degree, items)
        })
        .collect()
}

/// Leibniz differential over the vertex labels.
fn tree_differential(s: &GradedSequence, t: &TreeTensor) -> Combo {
    let mut out = Combo::new();
    let TreeTensor::Tree { tree, labels } = t else { return out };
    let ks = vin_in_counts(tree);
    let mut before = 0usize;
    for (j, (&k, &x)) in ks.iter().zip(labels).enumerate() {
        let c = s.component(k);
        let sg = sign(before);
        for (r, v) in to_sparse(&c.flat_differential().column(x)) {
            let mut l2 = labels.clone();
            l2[j] = r;
            add_term(&mut out, TreeTensor::tree(tree.clone(), l2), &sg * v);
        }
        before += c.degree_of(x);
    }
    out
}

/// Grafting `y` at leaf `i` of `x`, with the Koszul sign for moving the labels
/// of `y` past the labels of `x` that follow leaf `i`.
pub(crate) fn graft_tensors(
    x: (&PlanarTree, &[usize]),
    y: (&PlanarTree, &[usize]),
    i: usize,
    degs_x: &[usize],
    deg_y: usize,
) -> Result<(PlanarTree, Vec<usize>, Rational)> {
    let (t1, l1) = x;
    let (t2, l2) = y;
    let pos = t1.leaf_positions()[i - 1];
    let cut = labels_before(t1, pos);
    let after: usize = degs_x[cut..].iter().sum();
    let tree = t1.graft(i, t2)?;
    let mut labels = l1[..cut].to_vec();
    labels.extend_from_slice(l2);
    labels.extend_from_slice(&l1[cut..]);
    Ok((tree, labels, sign(after * deg_y)))
}

/// The free operad on `s`, truncated at `bounds.arity_max` and
/// `bounds.max_degree`.
pub fn free_operad(s: &GradedSequence, bounds: &FreeBounds) -> Result<FreeOperad> {
    let d = bounds.max_degree;
    let caps: Vec<usize>;
    let certified;
    if let Some(cap) = bounds.max_vertices {
        caps = vec![cap; bounds.arity_max + 1];
        let a = build_bases(s, bounds.arity_max, d, &caps);
        let b = build_bases(s, bounds.arity_max, d, &vec![cap + 2; bounds.arity_max + 1]);
        certified = a.iter().zip(&b).all(|(x, y)| x.dims == y.dims);
    } else {
        caps = auto_caps(s, bounds.arity_max, d).ok_or(Error::NonFinite)?;
        certified = true;
    }
    let bases = build_bases(s, bounds.arity_max, d, &caps);
    let capped = bounds.max_vertices.is_some();
    let components = bases
        .iter()
        .map(|b| b.complex(|t| tree_differential(s, t)))
        .collect::<Result<Vec<_>>>()?;
    let mut unit = zero_vector(bases[1].len());
    unit[bases[1].index_of(&TreeTensor::FormalUnit).expect("formal unit")] = Rational::one();

    let degs: Vec<Vec<Vec<usize>>> = bases
        .iter()
        .map(|b| {
            b.elements
                .iter()
                .map(|t| match t {
                    TreeTensor::FormalUnit => Vec::new(),
                    TreeTensor::Tree { tree, labels } => label_degree(s, tree, labels),
                })
                .collect()
        })
        .collect();
    let operad = FinOperad::from_fn(components, unit, |n, i, m, a, b| {
        let (x, y) = (&bases[n].elements[a], &bases[m].elements[b]);
        match (x, y) {
            (TreeTensor::FormalUnit, _) => vec![(b, Rational::one())],
            (_, TreeTensor::FormalUnit) => vec![(a, Rational::one())],
            (TreeTensor::Tree { tree: t1, labels: l1 }, TreeTensor::Tree { tree: t2, labels: l2 }) => {
                let dy = bases[m].degrees[b];
                if bases[n].degrees[a] + dy > d {
                    return Vec::new();
                }
                let (tree, labels, sg) =
                    graft_tensors((t1, l1), (t2, l2), i, &degs[n][a], dy).expect("leaf index in range");
                match bases[n + m - 1].index_of(&TreeTensor::tree(tree, labels)) {
                    Some(idx) => vec![(idx, sg)],
                    // only trees cut by a caller cap can be missing
                    None if capped => Vec::new(),
                    None => panic!("grafted tree lies outside the basis"),
                }
            }
        }
    })?;
    Ok(FreeOperad {
        operad,
        generators: s.clone(),
        bases,
        max_degree: d,
        vertex_cap: caps,
        certified,
    })
}

/// Evaluate a labelled tree in `target` given the images of the generators.
fn evaluate(
    target: &FinOperad,
    gens: &[RationalMatrix],
    tree: &PlanarTree,
    labels: &[usize],
) -> Result<Vector> {
    // returns (value, arity, next token, next label)
    fn go(
        target: &FinOperad,
        gens: &[RationalMatrix],
        tokens: &[Token],
        labels: &[usize],
        pos: usize,
        lab: usize,
    ) -> Result<(Vector, usize, usize, usize)> {
        let Token::Node(k) = tokens[pos] else { unreachable!("evaluate starts at a vertex") };
        let mut value = gens[k].column(labels[lab]);
        let mut arity = k;
        let mut input = 1;
        let (mut pos, mut lab) = (pos + 1, lab + 1);
        for _ in 0..k {
            if tokens[pos] == Token::Leaf {
                pos += 1;
                input += 1;
                continue;
            }
            let (v, r, p2, l2) = go(target, gens, tokens, labels, pos, lab)?;
            if arity + r - 1 > target.arity_max() {
                return Err(Error::InvalidParameter("evaluation leaves the arity truncation".into()));
            }
            value = to_dense(&target.compose_sparse(arity, input, r, &to_sparse(&value), &to_sparse(&v)), target.dim(arity + r - 1));
            arity = arity + r - 1;
            input += r;
            pos = p2;
            lab = l2;
        }
        Ok((value, arity, pos, lab))
    }
    Ok(go(target, gens, tree.tokens(), labels, 0, 0)?.0)
}

/// The operad morphism `F(S) -> O` extending arity-wise maps `S(n) -> O(n)`
/// (flat matrices of shape `dim O(n) x dim S(n)`).
pub fn free_extension(free: &FreeOperad, target: Arc<FinOperad>, gens: &[RationalMatrix]) -> Result<OperadMorphism> {
    let flat = free
        .bases
        .iter()
        .enumerate()
        .map(|(n, b)| {
            let cols = b
                .elements
                .iter()
                .map(|t| match t {
                    TreeTensor::FormalUnit => Ok(target.unit().clone()),
                    TreeTensor::Tree { tree, labels } => evaluate(&target, gens, tree, labels),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RationalMatrix::from_columns(&cols, target.dim(n)))
        })
        .collect::<Result<Vec<_>>>()?;
    OperadMorphism::from_flat(Arc::new(free.operad.clone()), target, flat)
}
