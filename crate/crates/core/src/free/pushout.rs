use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::One;

use super::basis::{add_term, label_products, Combo, TreeBasis, TreeTensor};
use super::free_op::labels_before;
use super::{CellKind, DimensionTable, GradedSequence};
use crate::chain::{disk_complex, sphere_complex, FinChainComplex};
use crate::error::{Error, Result};
use crate::exactla::{is_zero_vector, sign, zero_vector, Rational, RationalMatrix};
use crate::operad::{to_sparse, FinOperad, OperadMorphism, SparseVec};
use crate::trees::{enumerate_odd_trees, PlanarTree, Token, TreeBounds, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushoutBounds {
    pub arity_max: usize,
    pub max_degree: usize,
    /// Caller cap on the number of odd-level vertices. Needed when the cell
    /// has elements of degree 0.
    pub max_odd_vertices: Option<usize>,
}

/// `O` with one cell attached in arity `q`, on the odd-tree basis: even
/// vertices carry basis labels of `O`, odd vertices carry cell labels.
///
/// For a free attachment the cell is `D^p` and the differential is Leibniz.
/// For an attachment along `g` the cell is the top class of `D^p` and its
/// differential is `g`, spliced into the surrounding even vertices.
#[derive(Clone, Debug)]
pub struct PushoutOperad {
    pub operad: Arc<FinOperad>,
    /// `O` truncated to the arity and degree window.
    pub base: Arc<FinOperad>,
    pub inclusion: OperadMorphism,
    pub bases: Vec<TreeBasis>,
    pub p: usize,
    pub q: usize,
    pub kind: CellKind,
    pub attaching: Option<Vec<Rational>>,
    pub max_degree: usize,
    /// Dimensions are exact in every degree up to `max_degree`, homology below
    /// it.
    pub certified: bool,
}

struct Ctx<'a> {
    base: &'a FinOperad,
    cell: FinChainComplex,
    q: usize,
    p: usize,
    attaching: Option<SparseVec>,
    base_d: Vec<RationalMatrix>,
    cell_d: RationalMatrix,
}

fn in_count(t: &[Token], v: usize) -> usize {
    match t[v] {
        Token::Node(k) => k,
        Token::Leaf => 0,
    }
}

impl Ctx<'_> {
    fn label_degrees(&self, tree: &PlanarTree, labels: &[usize]) -> Vec<usize> {
        let vs = tree.vertices();
        tree.vin()
            .iter()
            .zip(labels)
            .map(|(&v, &x)| {
                if vs[v].level % 2 == 0 {
                    self.base.degree_of(in_count(tree.tokens(), v), x)
                } else {
                    self.cell.degree_of(x)
                }
            })
            .collect()
    }

    fn basis(&self, n: usize, bounds: &TreeBounds, max_degree: usize) -> TreeBasis {
        let e = enumerate_odd_trees(n, bounds);
        debug_assert!(e.is_certified());
        let mut items = Vec::new();
        for t in e.trees {
            let vs = t.vertices();
            let spaces: Vec<&FinChainComplex> = t
                .vin()
                .iter()
                .map(|&v| {
                    if vs[v].level % 2 == 0 {
                        self.base.component(in_count(t.tokens(), v))
                    } else {
                        &self.cell
                    }
                })
                .collect();
            for (labels, d) in label_products(&spaces, max_degree) {
                items.push((d, TreeTensor::tree(t.clone(), labels)));
            }
        }
        TreeBasis::build(n, max_degree, items)
    }

    fn differential(&self, t: &TreeTensor) -> Combo {
        let mut out = Combo::new();
        let TreeTensor::Tree { tree, labels } = t else { return out };
        let vs = tree.vertices();
        let degs = self.label_degrees(tree, labels);
        for (li, &v) in tree.vin().iter().enumerate() {
            let sg = sign(degs[..li].iter().sum());
            let x = labels[li];
            if vs[v].level % 2 == 0 {
                let k = in_count(tree.tokens(), v);
                for (r, c) in to_sparse(&self.base_d[k].column(x)) {
                    let mut l2 = labels.clone();
                    l2[li] = r;
                    add_term(&mut out, TreeTensor::tree(tree.clone(), l2), &sg * c);
                }
            } else if self.attaching.is_some() {
                for (t2, c) in self.splice(tree, labels, &degs, v, &vs) {
                    add_term(&mut out, t2, &sg * c);
                }
            } else {
                for (r, c) in to_sparse(&self.cell_d.column(x)) {
                    let mut l2 = labels.clone();
                    l2[li] = r;
                    add_term(&mut out, TreeTensor::tree(tree.clone(), l2), &sg * c);
                }
            }
        }
        out
    }

    /// Replace the cell label at odd vertex `pv` by the attaching value and
    /// compose it with its parent and children. Excludes the Leibniz sign.
    fn splice(&self, tree: &PlanarTree, labels: &[usize], degs: &[usize], pv: usize, vs: &[Vertex]) -> Combo {
        let mut out = Combo::new();
        let g = self.attaching.as_ref().expect("attached cell");
        let toks = tree.tokens();
        let top = self.base.arity_max();
        let u = vs[pv].parent.expect("odd vertices have a parent");
        let j = vs[u].children.iter().position(|&c| c == pv).expect("child of its parent") + 1;
        let k_u = vs[u].children.len();
        let (lu, lv) = (labels_before(tree, u), labels_before(tree, pv));
        let end_v = tree.subtree_range(pv).end;
        let lend = labels_before(tree, end_v);
        let sum = |a: usize, b: usize| -> usize { degs[a..b].iter().sum() };

        let mut exp = 0usize;
        let mut y_deg = 0usize;
        let mut y_labels = Vec::new();
        let mut mid = Vec::new();
        let mut value: SparseVec = g.clone();
        let (mut arity, mut pos, mut g_deg) = (self.q, 1usize, self.p - 1);
        for &c in &vs[pv].children {
            let kc = in_count(toks, c);
            let end_c = tree.subtree_range(c).end;
            let (lc, lce) = (labels_before(tree, c), labels_before(tree, end_c));
            // move b_k left past the earlier Y's
            exp += degs[lc] * y_deg;
            y_deg += sum(lc + 1, lce);
            y_labels.extend_from_slice(&labels[lc + 1..lce]);
            mid.extend_from_slice(&toks[c + 1..end_c]);
            if arity + kc - 1 > top {
                return out;
            }
            value = self.base.compose_sparse(arity, pos, kc, &value, &vec![(labels[lc], Rational::one())]);
            arity = arity + kc - 1;
            pos += kc;
            g_deg += degs[lc];
        }
        exp += g_deg * sum(lu + 1, lv);
        let k_new = k_u - 1 + arity;
        if k_new > top {
            return out;
        }
        let combo = self.base.compose_sparse(k_u, j, arity, &vec![(labels[lu], Rational::one())], &value);
        let mut tokens = toks[..u].to_vec();
        tokens.push(Token::Node(k_new));
        tokens.extend_from_slice(&toks[u + 1..pv]);
        tokens.extend_from_slice(&mid);
        tokens.extend_from_slice(&toks[end_v..]);
        let t2 = PlanarTree::from_tokens(tokens).expect("splicing keeps a valid tree");
        let sg = sign(exp);
        for (c, coef) in combo {
            let mut l2 = labels[..lu].to_vec();
            l2.push(c);
            l2.extend_from_slice(&labels[lu + 1..lv]);
            l2.extend_from_slice(&y_labels);
            l2.extend_from_slice(&labels[lend..]);
            add_term(&mut out, TreeTensor::tree(t2.clone(), l2), &sg * coef);
        }
        out
    }

    /// `x ∘_i y`: graft and compose the root label of `y` into the parent of
    /// leaf `i`.
    fn compose(
        &self,
        x: (&PlanarTree, &[usize]),
        y: (&PlanarTree, &[usize]),
        i: usize,
        degs_x: &[usize],
        degs_y: &[usize],
    ) -> Combo {
        let mut out = Combo::new();
        let ((t1, l1), (t2, l2)) = (x, y);
        let toks = t1.tokens();
        let vs = t1.vertices();
        let pl = t1.leaf_positions()[i - 1];
        let u = vs[pl].parent.expect("leaves have a parent");
        let j = vs[u].children.iter().position(|&c| c == pl).expect("child of its parent") + 1;
        let k_u = vs[u].children.len();
        let k_r = in_count(t2.tokens(), 0);
        if k_u + k_r - 1 > self.base.arity_max() {
            return out;
        }
        let (lu, lpl) = (labels_before(t1, u), labels_before(t1, pl));
        let x2: usize = degs_x[lu + 1..lpl].iter().sum();
        let x3: usize = degs_x[lpl..].iter().sum();
        let ys: usize = degs_y[1..].iter().sum();
        let sg = sign(degs_y[0] * (x2 + x3) + ys * x3);
        let mut tokens = toks[..u].to_vec();
        tokens.push(Token::Node(k_u + k_r - 1));
        tokens.extend_from_slice(&toks[u + 1..pl]);
        tokens.extend_from_slice(&t2.tokens()[1..]);
        tokens.extend_from_slice(&toks[pl + 1..]);
        let tree = PlanarTree::from_tokens(tokens).expect("contraction keeps a valid tree");
        for (c, coef) in self.base.compose_basis(k_u, j, k_r, l1[lu], l2[0]) {
            let mut labels = l1[..lu].to_vec();
            labels.push(*c);
            labels.extend_from_slice(&l1[lu + 1..lpl]);
            labels.extend_from_slice(&l2[1..]);
            labels.extend_from_slice(&l1[lpl..]);
            add_term(&mut out, TreeTensor::tree(tree.clone(), labels), &sg * coef);
        }
        out
    }
}

fn build(
    o: &FinOperad,
    p: usize,
    q: usize,
    kind: CellKind,
    attaching: Option<Vec<Rational>>,
    bounds: &PushoutBounds,
) -> Result<PushoutOperad> {
    let a = bounds.arity_max;
    let d = bounds.max_degree;
    if a < 1 {
        return Err(Error::InvalidParameter("arity_max must be at least 1".into()));
    }
    let base = o.truncated(a, d)?;
    let cell = match kind {
        CellKind::Disk => disk_complex(p)?,
        CellKind::Sphere => sphere_complex(p),
    };
    let min_cell = (0..=cell.max_degree()).find(|&k| cell.dim(k) > 0).expect("cells are nonzero");
    let max_odd = match bounds.max_odd_vertices {
        Some(c) => c,
        None if min_cell == 0 => return Err(Error::NonFinite),
        None => d / min_cell,
    };
    let even_in: BTreeSet<usize> = (0..=base.arity_max()).filter(|&k| base.dim(k) > 0).collect();
    let tree_bounds = |n: usize, m: usize| TreeBounds {
        max_vertices: 1 + (q + 1) * m + n,
        even_in: even_in.clone(),
        odd_in: BTreeSet::from([q]),
        max_vin1: Some(m),
    };
    let ctx = Ctx {
        base: &base,
        cell_d: cell.flat_differential(),
        cell,
        q,
        p,
        attaching: attaching.as_ref().map(|g| to_sparse(g)),
        base_d: base.components().iter().map(FinChainComplex::flat_differential).collect(),
    };
    let bases: Vec<TreeBasis> = (0..=a).map(|n| ctx.basis(n, &tree_bounds(n, max_odd), d)).collect();
    let stable = match bounds.max_odd_vertices {
        None => true,
        Some(c) => (0..=a).all(|n| ctx.basis(n, &tree_bounds(n, c + 2), d).dims == bases[n].dims),
    };
    let certified = stable && base.dim(0) == 0 && q >= 1 && o.arity_max() >= a;

    let components = bases
        .iter()
        .map(|b| b.complex(|t| ctx.differential(t)))
        .collect::<Result<Vec<_>>>()?;
    let degs: Vec<Vec<Vec<usize>>> = bases
        .iter()
        .map(|b| {
            b.elements
                .iter()
                .map(|t| match t {
                    TreeTensor::FormalUnit => Vec::new(),
                    TreeTensor::Tree { tree, labels } => ctx.label_degrees(tree, labels),
                })
                .collect()
        })
        .collect();
    let corolla = |n: usize, x: usize| bases[n].index_of(&TreeTensor::tree(PlanarTree::corolla(n), vec![x]));
    let mut unit = zero_vector(bases[1].len());
    for (x, c) in to_sparse(base.unit()) {
        unit[corolla(1, x).expect("unit corolla")] += c;
    }
    let operad = FinOperad::from_fn(components, unit, |n, i, m, x, y| {
        let (bx, by) = (&bases[n], &bases[m]);
        if bx.degrees[x] + by.degrees[y] > d {
            return Vec::new();
        }
        let (TreeTensor::Tree { tree: t1, labels: l1 }, TreeTensor::Tree { tree: t2, labels: l2 }) =
            (&bx.elements[x], &by.elements[y])
        else {
            unreachable!("no formal unit in a pushout basis")
        };
        let combo = ctx.compose((t1, l1), (t2, l2), i, &degs[n][x], &degs[m][y]);
        let target = &bases[n + m - 1];
        for t in combo.keys() {
            // only a caller cap can cut a tree inside the degree window
            assert!(target.index_of(t).is_some() || bounds.max_odd_vertices.is_some(), "composite outside the basis");
        }
        target.sparse(&combo)
    })?;
    let operad = Arc::new(operad);
    let base = Arc::new(base);
    let flat = (0..=base.arity_max())
        .map(|n| {
            let mut m = RationalMatrix::zeros(bases[n].len(), base.dim(n));
            for x in 0..base.dim(n) {
                m.set(corolla(n, x).expect("corolla in the basis"), x, Rational::one());
            }
            m
        })
        .collect();
    let inclusion = OperadMorphism::from_flat(base.clone(), operad.clone(), flat)?;
    Ok(PushoutOperad { operad, base, inclusion, bases, p, q, kind, attaching, max_degree: d, certified })
}

/// `O ⊔ F(D^{p,q})` on the odd-tree basis.
pub fn pushout_presentation(o: &FinOperad, p: usize, q: usize, bounds: &PushoutBounds) -> Result<PushoutOperad> {
    if p == 0 {
        return Err(Error::InvalidParameter("disks start at p = 1".into()));
    }
    build(o, p, q, CellKind::Disk, None, bounds)
}

/// The pushout of `F(D^{p,q}) <- F(S^{p-1,q}) -> O` where the right map
/// sends the generator to `attaching ∈ O(q)_{p-1}`.
pub fn cofibration_pushout(
    o: &FinOperad,
    attaching: &[Rational],
    p: usize,
    q: usize,
    bounds: &PushoutBounds,
) -> Result<PushoutOperad> {
    if p == 0 {
        return Err(Error::InvalidParameter("disks start at p = 1".into()));
    }
    if q > o.arity_max() || attaching.len() != o.dim(q) {
        return Err(Error::DimensionMismatch(format!("attaching value must lie in arity {q}")));
    }
    let c = o.component(q);
    for (x, _) in to_sparse(attaching) {
        if c.degree_of(x) != p - 1 {
            return Err(Error::DegreeMismatch { expected: p - 1, found: c.degree_of(x) });
        }
    }
    if !is_zero_vector(&o.differential(q, attaching)) {
        return Err(Error::InvalidParameter("attaching value must be a cycle".into()));
    }
    build(o, p, q, CellKind::Sphere, Some(attaching.to_vec()), bounds)
}

impl PushoutOperad {
    /// Number of odd-level vertices of basis element `idx` in arity `n`.
    pub fn odd_vertex_count(&self, n: usize, idx: usize) -> usize {
        match &self.bases[n].elements[idx] {
            TreeTensor::FormalUnit => 0,
            TreeTensor::Tree { tree, .. } => tree.classify().vin1.len(),
        }
    }

    pub fn table(&self) -> DimensionTable {
        DimensionTable {
            dims: self.bases.iter().map(|b| b.dims.clone()).collect(),
            homology: self.operad.components().iter().map(FinChainComplex::homology_dims).collect(),
            certified: self.certified,
        }
    }

    /// The map of pushouts induced by `f : O -> O'` on the even labels. `self`
    /// and `target` must attach the same cell, along `g` and `f(g)`.
    pub fn induced_map(&self, target: &PushoutOperad, f: &OperadMorphism) -> Result<OperadMorphism> {
        if (self.p, self.q, self.kind) != (target.p, target.q, target.kind) {
            return Err(Error::InvalidParameter("pushouts attach different cells".into()));
        }
        if let (Some(g), Some(g2)) = (&self.attaching, &target.attaching) {
            let fg = f.flat(self.q).apply(g);
            if &fg != g2 {
                return Err(Error::InvalidMorphism("attaching values do not correspond".into()));
            }
        }
        let (sb, tb) = (&self.base, &target.base);
        let flats: Vec<RationalMatrix> = (0..=sb.arity_max()).map(|k| f.flat(k)).collect();
        let out = (0..self.bases.len())
            .map(|n| {
                let mut m = RationalMatrix::zeros(target.bases[n].len(), self.bases[n].len());
                for (col, t) in self.bases[n].elements.iter().enumerate() {
                    let TreeTensor::Tree { tree, labels } = t else { continue };
                    let vs = tree.vertices();
                    // expand the tensor product of the label images
                    let mut terms: Vec<(Vec<usize>, Rational)> = vec![(Vec::new(), Rational::one())];
                    for (&v, &x) in tree.vin().iter().zip(labels) {
                        let images: SparseVec = if vs[v].level % 2 == 0 {
                            let k = in_count(tree.tokens(), v);
                            to_sparse(&flats[k].column(x)).into_iter().filter(|(r, _)| *r < tb.dim(k)).collect()
                        } else {
                            vec![(x, Rational::one())]
                        };
                        terms = terms
                            .iter()
                            .flat_map(|(l, c)| {
                                images.iter().map(move |(r, c2)| {
                                    let mut l2 = l.clone();
                                    l2.push(*r);
                                    (l2, c * c2)
                                })
                            })
                            .collect();
                    }
                    for (l, c) in terms {
                        let idx = target.bases[n]
                            .index_of(&TreeTensor::tree(tree.clone(), l))
                            .ok_or_else(|| Error::InvalidMorphism("image tree outside the target basis".into()))?;
                        m.add_to(idx, col, &c);
                    }
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        OperadMorphism::from_flat(self.operad.clone(), target.operad.clone(), out)
    }
}

/// The filtration by number of odd-level vertices.
#[derive(Clone, Debug)]
pub struct FiltrationLayers {
    /// `counts[n][idx]`: odd-level vertices of each basis element.
    pub counts: Vec<Vec<usize>>,
    /// `layers[l]` is `F^l`, as sub-complexes of the arity components.
    pub layers: Vec<GradedSequence>,
}

impl FiltrationLayers {
    /// Dimensions of `F^l / F^{l-1}` in arity `n`, per degree.
    pub fn quotient_dims(&self, l: usize, n: usize) -> Vec<usize> {
        let hi = self.layers[l].component(n);
        let lo = if l == 0 { None } else { Some(self.layers[l - 1].component(n)) };
        (0..=hi.max_degree()).map(|k| hi.dim(k) - lo.as_ref().map_or(0, |c| c.dim(k))).collect()
    }
}

/// `F^0 ⊆ F^1 ⊆ ...`, where `F^l` is spanned by trees with at most `l`
/// odd-level vertices. Fails if a layer is not closed under the differential.
pub fn filtration_layers(p: &PushoutOperad) -> Result<FiltrationLayers> {
    let counts: Vec<Vec<usize>> = (0..p.bases.len())
        .map(|n| (0..p.bases[n].len()).map(|i| p.odd_vertex_count(n, i)).collect())
        .collect();
    let top = counts.iter().flatten().copied().max().unwrap_or(0);
    let layers = (0..=top)
        .map(|l| {
            let comps = (0..p.bases.len())
                .map(|n| {
                    let c = p.operad.component(n);
                    let keep: Vec<Vec<usize>> = (0..=c.max_degree())
                        .map(|k| (0..c.dim(k)).filter(|&i| counts[n][c.offset(k) + i] <= l).collect())
                        .collect();
                    let dims = keep.iter().map(Vec::len).collect();
                    let diffs = (1..=c.max_degree())
                        .map(|k| {
                            let dk = c.d(k);
                            let mut m = RationalMatrix::zeros(keep[k - 1].len(), keep[k].len());
                            for (cj, &j) in keep[k].iter().enumerate() {
                                for (r, v) in to_sparse(&dk.column(j)) {
                                    let ri = keep[k - 1].iter().position(|&x| x == r).ok_or_else(|| {
                                        Error::InvariantViolation(format!("layer {l} is not closed in arity {n}"))
                                    })?;
                                    m.set(ri, cj, v);
                                }
                            }
                            Ok(m)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    FinChainComplex::new(dims, diffs)
                })
                .collect::<Result<Vec<_>>>()?;
            GradedSequence::new(comps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FiltrationLayers { counts, layers })
}
