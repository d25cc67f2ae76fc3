//! Bounded, non-negatively graded chain complexes over Q and chain maps.

use crate::error::{Error, Result};
use crate::exactla::{
    kernel_basis, image_basis, rank, sign, subquotient, Rational, RationalMatrix,
    SubquotientBasis, Vector,
};

/// A complex `C_0 <- C_1 <- ... <- C_max` given by dimensions and
/// differential matrices `d_k : C_k -> C_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinChainComplex {
    dims: Vec<usize>,
    // diffs[k] is d_k; diffs[0] is the 0 x dims[0] matrix
    diffs: Vec<RationalMatrix>,
}

impl FinChainComplex {
    /// `diffs[k-1]` is `d_k` for `k = 1..=max_degree`.
    pub fn new(dims: Vec<usize>, diffs: Vec<RationalMatrix>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("a complex needs at least degree 0".into()));
        }
        if diffs.len() + 1 != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} degrees but {} differentials",
                dims.len(),
                diffs.len()
            )));
        }
        let mut all = vec![RationalMatrix::zeros(0, dims[0])];
        for (k, d) in diffs.into_iter().enumerate() {
            let k = k + 1;
            if d.rows() != dims[k - 1] || d.cols() != dims[k] {
                return Err(Error::DimensionMismatch(format!(
                    "d_{k} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    dims[k - 1],
                    dims[k]
                )));
            }
            all.push(d);
        }
        let c = FinChainComplex { dims, diffs: all };
        for k in 2..c.dims.len() {
            if !c.diffs[k - 1].mul(&c.diffs[k]).is_zero() {
                return Err(Error::NotAComplex { degree: k });
            }
        }
        Ok(c)
    }

    /// Complex with the given dimensions and zero differential.
    pub fn with_zero_differential(dims: Vec<usize>) -> Self {
        let diffs = (1..dims.len())
            .map(|k| RationalMatrix::zeros(dims[k - 1], dims[k]))
            .collect();
        Self::new(dims, diffs).expect("zero differential is always valid")
    }

    pub fn zero() -> Self {
        Self::with_zero_differential(vec![0])
    }

    pub fn max_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Flat index of the first basis element of degree `k`.
    pub fn offset(&self, k: usize) -> usize {
        self.dims.iter().take(k).sum()
    }

    /// Degree of a flat basis index.
    pub fn degree_of(&self, mut idx: usize) -> usize {
        for (k, &d) in self.dims.iter().enumerate() {
            if idx < d {
                return k;
            }
            idx -= d;
        }
        panic!("flat index out of range");
    }

    /// `d_k : C_k -> C_{k-1}`; zero outside the stored range.
    pub fn d(&self, k: usize) -> RationalMatrix {
        if k == 0 {
            return RationalMatrix::zeros(0, self.dim(0));
        }
        if k <= self.max_degree() {
            self.diffs[k].clone()
        } else {
            RationalMatrix::zeros(self.dim(k - 1), self.dim(k))
        }
    }

    pub fn has_zero_differential(&self) -> bool {
        self.diffs.iter().all(RationalMatrix::is_zero)
    }

    /// The differential on the whole flat basis.
    pub fn flat_differential(&self) -> RationalMatrix {
        let n = self.total_dim();
        let mut m = RationalMatrix::zeros(n, n);
        for k in 1..=self.max_degree() {
            m.put_block(self.offset(k - 1), self.offset(k), &self.diffs[k]);
        }
        m
    }

    /// Degrees `0..=max_degree` only; a no-op when the complex already stops
    /// there.
    pub fn truncated(&self, max_degree: usize) -> Self {
        if max_degree >= self.max_degree() {
            return self.clone();
        }
        FinChainComplex { dims: self.dims[..=max_degree].to_vec(), diffs: self.diffs[..=max_degree].to_vec() }
    }

    /// Same complex with zero groups appended up to `max_degree`.
    pub fn padded(&self, max_degree: usize) -> Self {
        if max_degree <= self.max_degree() {
            return self.clone();
        }
        let mut dims = self.dims.clone();
        dims.resize(max_degree + 1, 0);
        let diffs = (1..=max_degree).map(|k| {
            if k <= self.max_degree() {
                self.diffs[k].clone()
            } else {
                RationalMatrix::zeros(dims[k - 1], dims[k])
            }
        });
        Self::new(dims.clone(), diffs.collect()).expect("padding keeps d^2 = 0")
    }

    pub fn direct_sum(&self, other: &FinChainComplex) -> Self {
        let top = self.max_degree().max(other.max_degree());
        let a = self.padded(top);
        let b = other.padded(top);
        let dims: Vec<usize> = (0..=top).map(|k| a.dim(k) + b.dim(k)).collect();
        let diffs = (1..=top)
            .map(|k| {
                let mut m = RationalMatrix::zeros(dims[k - 1], dims[k]);
                m.put_block(0, 0, &a.diffs[k]);
                m.put_block(a.dim(k - 1), a.dim(k), &b.diffs[k]);
                m
            })
            .collect();
        Self::new(dims, diffs).expect("direct sum of complexes")
    }

    /// Homology carriers `H_k = ker d_k / im d_{k+1}` for every stored degree.
    pub fn homology(&self) -> Vec<SubquotientBasis> {
        (0..=self.max_degree()).map(|k| self.homology_at(k)).collect()
    }

    pub fn homology_at(&self, k: usize) -> SubquotientBasis {
        let n = self.dim(k);
        let cycles = if k == 0 { identity_columns(n) } else { kernel_basis(&self.d(k)) };
        let boundaries = image_basis(&self.d(k + 1));
        subquotient(n, &cycles, &boundaries).expect("im d is inside ker d")
    }

    pub fn homology_dims(&self) -> Vec<usize> {
        (0..=self.max_degree())
            .map(|k| {
                let z = self.dim(k) - if k == 0 { 0 } else { rank(&self.d(k)) };
                z - rank(&self.d(k + 1))
            })
            .collect()
    }
}

pub(crate) fn identity_columns(n: usize) -> Vec<Vector> {
    (0..n).map(|i| crate::exactla::unit_vector(n, i)).collect()
}

/// `D^p`: Q in degrees `p` and `p-1`, with the identity as differential.
pub fn disk_complex(p: usize) -> Result<FinChainComplex> {
    if p == 0 {
        return Err(Error::InvalidParameter("disk complex needs p >= 1".into()));
    }
    let mut dims = vec![0; p + 1];
    dims[p] = 1;
    dims[p - 1] = 1;
    let diffs = (1..=p)
        .map(|k| {
            if k == p {
                RationalMatrix::identity(1)
            } else {
                RationalMatrix::zeros(dims[k - 1], dims[k])
            }
        })
        .collect();
    FinChainComplex::new(dims, diffs)
}

/// `S^p`: Q concentrated in degree `p`.
pub fn sphere_complex(p: usize) -> FinChainComplex {
    let mut dims = vec![0; p + 1];
    dims[p] = 1;
    FinChainComplex::with_zero_differential(dims)
}

/// Tensor product with the Koszul rule `d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy`.
///
/// Basis of `(a (x) b)_n`: pairs `(x, y)` with `|x| + |y| = n`, ordered by `|x|`,
/// then by the index of `x`, then by the index of `y`; see [`tensor_index`].
pub fn tensor(a: &FinChainComplex, b: &FinChainComplex) -> FinChainComplex {
    let top = a.max_degree() + b.max_degree();
    let dims: Vec<usize> = (0..=top)
        .map(|n| (0..=n).map(|i| a.dim(i) * b.dim(n - i)).sum())
        .collect();
    let diffs = (1..=top)
        .map(|n| {
            let mut m = RationalMatrix::zeros(dims[n - 1], dims[n]);
            for i in 0..=n {
                let j = n - i;
                for x in 0..a.dim(i) {
                    for y in 0..b.dim(j) {
                        let col = tensor_index(a, b, i, x, j, y);
                        if i > 0 {
                            for (r, v) in column_entries(&a.d(i), x) {
                                m.add_to(tensor_index(a, b, i - 1, r, j, y), col, &v);
                            }
                        }
                        if j > 0 {
                            let s = sign(i);
                            for (r, v) in column_entries(&b.d(j), y) {
                                m.add_to(tensor_index(a, b, i, x, j - 1, r), col, &(&s * v));
                            }
                        }
                    }
                }
            }
            m
        })
        .collect();
    FinChainComplex::new(dims, diffs).expect("Koszul tensor satisfies d^2 = 0")
}

/// Position of `x (x) y` (with `|x| = i`, `|y| = j`) inside the degree `i + j`
/// block of `a (x) b`.
pub fn tensor_index(
    a: &FinChainComplex,
    b: &FinChainComplex,
    i: usize,
    x: usize,
    j: usize,
    y: usize,
) -> usize {
    let n = i + j;
    let before: usize = (0..i).map(|i2| a.dim(i2) * b.dim(n - i2)).sum();
    before + x * b.dim(j) + y
}

pub(crate) fn column_entries(m: &RationalMatrix, c: usize) -> Vec<(usize, Rational)> {
    m.entries()
        .filter(|&(_, cc, _)| cc == c)
        .map(|(r, _, v)| (r, v.clone()))
        .collect()
}

/// A degree-0 chain map; `components[k] : source_k -> target_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: FinChainComplex,
    target: FinChainComplex,
    components: Vec<RationalMatrix>,
}

/// Per-degree data of a quasi-isomorphism test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    pub degree: usize,
    pub source_homology: usize,
    pub target_homology: usize,
    pub induced_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiIsoCertificate {
    pub degrees: Vec<DegreeReport>,
}

impl QuasiIsoCertificate {
    pub fn is_quasi_iso(&self) -> bool {
        self.degrees.iter().all(|d| {
            d.source_homology == d.target_homology && d.induced_rank == d.source_homology
        })
    }

    /// First degree where the induced map fails to be an isomorphism.
    pub fn first_failure(&self) -> Option<usize> {
        self.degrees
            .iter()
            .find(|d| !(d.source_homology == d.target_homology && d.induced_rank == d.source_homology))
            .map(|d| d.degree)
    }
}

impl ChainMap {
    /// `components[k]` for `k = 0..=source.max_degree()`; degrees beyond the
    /// target's range must map to zero.
    pub fn new(
        source: FinChainComplex,
        target: FinChainComplex,
        components: Vec<RationalMatrix>,
    ) -> Result<Self> {
        if components.len() != source.max_degree() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} components for a complex of max degree {}",
                components.len(),
                source.max_degree()
            )));
        }
        for (k, f) in components.iter().enumerate() {
            if f.rows() != target.dim(k) || f.cols() != source.dim(k) {
                return Err(Error::DimensionMismatch(format!("component {k} has wrong shape")));
            }
        }
        let m = ChainMap { source, target, components };
        for k in 1..=m.source.max_degree() {
            // f_{k-1} d_k == d_k f_k
            let lhs = m.components[k - 1].mul(&m.source.d(k));
            let rhs = m.target.d(k).mul(&m.components[k]);
            if lhs != rhs {
                return Err(Error::NotAChainMap { degree: k });
            }
        }
        // the top source degree must also commute with the target differential
        // leaving it, which is automatic: d_{k} f_k for k > source max is zero
        Ok(m)
    }

    pub fn identity(c: &FinChainComplex) -> Self {
        let comps = (0..=c.max_degree()).map(|k| RationalMatrix::identity(c.dim(k))).collect();
        ChainMap::new(c.clone(), c.clone(), comps).expect("identity is a chain map")
    }

    pub fn zero(source: &FinChainComplex, target: &FinChainComplex) -> Self {
        let comps = (0..=source.max_degree())
            .map(|k| RationalMatrix::zeros(target.dim(k), source.dim(k)))
            .collect();
        ChainMap::new(source.clone(), target.clone(), comps).expect("zero is a chain map")
    }

    pub fn source(&self) -> &FinChainComplex {
        &self.source
    }

    pub fn target(&self) -> &FinChainComplex {
        &self.target
    }

    pub fn component(&self, k: usize) -> RationalMatrix {
        if k < self.components.len() {
            self.components[k].clone()
        } else {
            RationalMatrix::zeros(self.target.dim(k), self.source.dim(k))
        }
    }

    pub fn components(&self) -> &[RationalMatrix] {
        &self.components
    }

    /// `other ∘ self`
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.target != other.source {
            return Err(Error::DimensionMismatch("composable chain maps need matching complexes".into()));
        }
        let comps = (0..=self.source.max_degree())
            .map(|k| other.component(k).mul(&self.components[k]))
            .collect();
        ChainMap::new(self.source.clone(), other.target.clone(), comps)
    }

    /// Matrix of `H_k(f)` in the representative bases of the given carriers.
    pub fn induced_on_homology(
        &self,
        k: usize,
        hs: &SubquotientBasis,
        ht: &SubquotientBasis,
    ) -> RationalMatrix {
        let f = self.component(k);
        let cols: Vec<Vector> = hs
            .representatives
            .iter()
            .map(|r| {
                ht.class_coordinates(&f.apply(r))
                    .expect("chain maps send cycles to cycles")
            })
            .collect();
        RationalMatrix::from_columns(&cols, ht.dim())
    }

    /// Compare `H_k(f)` for `k <= window`. Without a window the two complexes
    /// must have the same truncation degree.
    pub fn is_quasi_iso(&self, window: Option<usize>) -> Result<QuasiIsoCertificate> {
        let w = match window {
            Some(w) => w,
            None => {
                if self.source.max_degree() != self.target.max_degree() {
                    return Err(Error::TruncationMismatch {
                        source_max: self.source.max_degree(),
                        target_max: self.target.max_degree(),
                    });
                }
                self.source.max_degree()
            }
        };
        let s = self.source.padded(w);
        let t = self.target.padded(w);
        let degrees = (0..=w)
            .map(|k| {
                let hs = s.homology_at(k);
                let ht = t.homology_at(k);
                let m = self.induced_on_homology(k, &hs, &ht);
                DegreeReport {
                    degree: k,
                    source_homology: hs.dim(),
                    target_homology: ht.dim(),
                    induced_rank: rank(&m),
                }
            })
            .collect();
        Ok(QuasiIsoCertificate { degrees })
    }

    /// Surjective in every degree `k >= 1`; degree 0 is unconstrained.
    pub fn is_chain_fibration(&self) -> bool {
        (1..=self.target.max_degree()).all(|k| rank(&self.component(k)) == self.target.dim(k))
    }
}

/// `i^p : S^{p-1} -> D^p`, the identity on the degree `p-1` group.
pub fn sphere_to_disk(p: usize) -> Result<ChainMap> {
    let d = disk_complex(p)?;
    let s = sphere_complex(p - 1);
    let comps = (0..p)
        .map(|k| {
            if k == p - 1 {
                RationalMatrix::identity(1)
            } else {
                RationalMatrix::zeros(d.dim(k), s.dim(k))
            }
        })
        .collect();
    ChainMap::new(s, d, comps)
}

/// `j^p : 0 -> D^p`.
pub fn zero_to_disk(p: usize) -> Result<ChainMap> {
    Ok(ChainMap::zero(&FinChainComplex::zero(), &disk_complex(p)?))
}

/// Scalar multiple of the identity on every degree.
pub fn scalar_map(c: &FinChainComplex, a: &Rational) -> ChainMap {
    let comps = (0..=c.max_degree()).map(|k| RationalMatrix::scalar(c.dim(k), a)).collect();
    ChainMap::new(c.clone(), c.clone(), comps).expect("scalars commute with d")
}
