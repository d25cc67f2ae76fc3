use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::chain::FinChainComplex;
use crate::error::Result;
use crate::exactla::{Rational, RationalMatrix};
use crate::trees::PlanarTree;

/// A basis element of a tree-shaped operad: either the formal unit or a tree
/// whose non-leaf vertices carry basis labels, listed in preorder.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreeTensor {
    FormalUnit,
    Tree { tree: PlanarTree, labels: Vec<usize> },
}

impl TreeTensor {
    pub fn tree(tree: PlanarTree, labels: Vec<usize>) -> Self {
        TreeTensor::Tree { tree, labels }
    }
}

/// Linear combination of tree tensors.
pub(crate) type Combo = BTreeMap<TreeTensor, Rational>;

pub(crate) fn add_term(c: &mut Combo, t: TreeTensor, v: Rational) {
    if v.is_zero() {
        return;
    }
    match c.entry(t) {
        Entry::Vacant(e) => {
            e.insert(v);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += v;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Flat basis of one arity, ordered by degree and then by tensor.
#[derive(Clone, Debug)]
pub struct TreeBasis {
    pub arity: usize,
    pub dims: Vec<usize>,
    pub elements: Vec<TreeTensor>,
    pub degrees: Vec<usize>,
    index: HashMap<TreeTensor, usize>,
}

impl TreeBasis {
    pub(crate) fn build(arity: usize, max_degree: usize, mut items: Vec<(usize, TreeTensor)>) -> Self {
        items.sort();
        items.dedup();
        let mut dims = vec![0; max_degree + 1];
        for (d, _) in &items {
            dims[*d] += 1;
        }
        let degrees = items.iter().map(|(d, _)| *d).collect();
        let elements: Vec<TreeTensor> = items.into_iter().map(|(_, t)| t).collect();
        let index = elements.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        TreeBasis { arity, dims, elements, degrees, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, t: &TreeTensor) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Sparse vector of a combination; terms outside the basis are dropped
    /// (they lie beyond the degree truncation).
    pub(crate) fn sparse(&self, c: &Combo) -> Vec<(usize, Rational)> {
        let mut v: Vec<(usize, Rational)> = c
            .iter()
            .filter(|(_, x)| !x.is_zero())
            .filter_map(|(t, x)| self.index_of(t).map(|i| (i, x.clone())))
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }

    /// Chain complex with the differential given on basis elements.
    pub(crate) fn complex<F>(&self, mut d: F) -> Result<FinChainComplex>
    where
        F: FnMut(&TreeTensor) -> Combo,
    {
        let top = self.dims.len() - 1;
        let offsets: Vec<usize> = (0..=top).map(|k| self.dims[..k].iter().sum()).collect();
        let mut diffs: Vec<RationalMatrix> =
            (1..=top).map(|k| RationalMatrix::zeros(self.dims[k - 1], self.dims[k])).collect();
        for (i, t) in self.elements.iter().enumerate() {
            let k = self.degrees[i];
            if k == 0 {
                continue;
            }
            for (j, v) in self.sparse(&d(t)) {
                debug_assert_eq!(self.degrees[j] + 1, k);
                diffs[k - 1].add_to(j - offsets[k - 1], i - offsets[k], &v);
            }
        }
        FinChainComplex::new(self.dims.clone(), diffs)
    }
}

/// All label tuples for the given per-vertex label spaces with total degree at
/// most `max_degree`, together with that degree.
pub(crate) fn label_products(spaces: &[&FinChainComplex], max_degree: usize) -> Vec<(Vec<usize>, usize)> {
    let min_deg: Vec<usize> = spaces
        .iter()
        .map(|c| (0..=c.max_degree()).find(|&k| c.dim(k) > 0).unwrap_or(usize::MAX / 4))
        .collect();
    let mut suffix = vec![0usize; spaces.len() + 1];
    for i in (0..spaces.len()).rev() {
        suffix[i] = suffix[i + 1].saturating_add(min_deg[i]);
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(spaces.len());
    fn go(
        i: usize,
        deg: usize,
        spaces: &[&FinChainComplex],
        suffix: &[usize],
        max_degree: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, usize)>,
    ) {
        if deg.saturating_add(suffix[i]) > max_degree {
            return;
        }
        if i == spaces.len() {
            out.push((cur.clone(), deg));
            return;
        }
        let c = spaces[i];
        for x in 0..c.total_dim() {
            cur.push(x);
            go(i + 1, deg + c.degree_of(x), spaces, suffix, max_degree, cur, out);
            cur.pop();
        }
    }
    go(0, 0, spaces, &suffix, max_degree, &mut cur, &mut out);
    out
}
