use std::sync::Arc;

use num_traits::Zero;

use super::{to_dense, to_sparse, FinOperad};
use crate::chain::{ChainMap, QuasiIsoCertificate};
use crate::error::{Error, Result};
use crate::exactla::{pow, Rational, RationalMatrix};

/// Arity-wise chain maps commuting with units and all partial compositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadMorphism {
    source: Arc<FinOperad>,
    target: Arc<FinOperad>,
    maps: Vec<ChainMap>,
}

/// Quasi-isomorphism data for every arity of a morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakEquivalenceCertificate {
    pub arities: Vec<QuasiIsoCertificate>,
}

impl WeakEquivalenceCertificate {
    pub fn holds(&self) -> bool {
        self.arities.iter().all(QuasiIsoCertificate::is_quasi_iso)
    }

    /// `(arity, degree)` of the first homology group where the map fails.
    /// Quasi-isomorphism in every arity for all degrees below `top`, the part
    /// of the window a truncation at `top` cannot disturb.
    pub fn holds_below(&self, top: usize) -> bool {
        self.arities.iter().all(|c| {
            c.degrees
                .iter()
                .filter(|d| d.degree < top)
                .all(|d| d.source_homology == d.target_homology && d.induced_rank == d.source_homology)
        })
    }

    pub fn first_failure(&self) -> Option<(usize, usize)> {
        self.arities
            .iter()
            .enumerate()
            .find_map(|(n, c)| c.first_failure().map(|k| (n, k)))
    }
}

pub(crate) fn same(a: &Arc<FinOperad>, b: &Arc<FinOperad>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Split a flat matrix into its degree blocks.
fn degree_blocks(o_s: &FinOperad, o_t: &FinOperad, n: usize, flat: &RationalMatrix) -> Vec<RationalMatrix> {
    let (s, t) = (o_s.component(n), o_t.component(n));
    (0..=s.max_degree())
        .map(|k| {
            if k > t.max_degree() {
                RationalMatrix::zeros(0, s.dim(k))
            } else {
                flat.block(t.offset(k), s.offset(k), t.dim(k), s.dim(k))
            }
        })
        .collect()
}

impl OperadMorphism {
    pub fn new(source: Arc<FinOperad>, target: Arc<FinOperad>, maps: Vec<ChainMap>) -> Result<Self> {
        let top = source.arity_max();
        if target.arity_max() < top {
            return Err(Error::InvalidMorphism("target is truncated below the source".into()));
        }
        if maps.len() != top + 1 {
            return Err(Error::InvalidMorphism(format!("expected {} arity maps", top + 1)));
        }
        for (n, f) in maps.iter().enumerate() {
            if f.source() != source.component(n) || f.target() != target.component(n) {
                return Err(Error::InvalidMorphism(format!("arity {n} map has the wrong endpoints")));
            }
        }
        let m = OperadMorphism { source, target, maps };
        m.validate()?;
        Ok(m)
    }

    /// Build from flat matrices, one per arity, of shape
    /// `dim target(n) x dim source(n)`. Degree-mixing entries are rejected.
    pub fn from_flat(source: Arc<FinOperad>, target: Arc<FinOperad>, flat: Vec<RationalMatrix>) -> Result<Self> {
        if flat.len() != source.arity_max() + 1 {
            return Err(Error::InvalidMorphism(format!("expected {} arity maps", source.arity_max() + 1)));
        }
        let mut maps = Vec::with_capacity(flat.len());
        for (n, f) in flat.iter().enumerate() {
            if n > target.arity_max() || f.rows() != target.dim(n) || f.cols() != source.dim(n) {
                return Err(Error::InvalidMorphism(format!("arity {n} matrix has the wrong shape")));
            }
            for (r, c, _) in f.entries() {
                if target.degree_of(n, r) != source.degree_of(n, c) {
                    return Err(Error::InvalidMorphism(format!("arity {n} map does not preserve degree")));
                }
            }
            let comps = degree_blocks(&source, &target, n, f);
            maps.push(ChainMap::new(source.component(n).clone(), target.component(n).clone(), comps)?);
        }
        Self::new(source, target, maps)
    }

    /// Same as [`OperadMorphism::from_flat`] without the unit and composition
    /// checks. Only meant for building deliberately broken fixtures that
    /// exercise the checkers.
    pub fn from_flat_unchecked(
        source: Arc<FinOperad>,
        target: Arc<FinOperad>,
        flat: Vec<RationalMatrix>,
    ) -> Result<Self> {
        let mut maps = Vec::with_capacity(flat.len());
        for (n, f) in flat.iter().enumerate() {
            let comps = degree_blocks(&source, &target, n, f);
            maps.push(ChainMap::new(source.component(n).clone(), target.component(n).clone(), comps)?);
        }
        Ok(OperadMorphism { source, target, maps })
    }

    fn validate(&self) -> Result<()> {
        let (s, t) = (&*self.source, &*self.target);
        let flats: Vec<RationalMatrix> = (0..=s.arity_max()).map(|n| self.flat(n)).collect();
        if &flats[1].apply(s.unit()) != t.unit() {
            return Err(Error::InvalidMorphism("unit is not preserved".into()));
        }
        for (&(n, i, m), table) in s.compositions() {
            let dm = s.dim(m);
            for x in 0..s.dim(n) {
                let fx = to_sparse(&flats[n].column(x));
                for y in 0..dm {
                    let lhs = flats[n + m - 1].apply(&to_dense(&table[x * dm + y], s.dim(n + m - 1)));
                    let fy = to_sparse(&flats[m].column(y));
                    let rhs = to_dense(&t.compose_sparse(n, i, m, &fx, &fy), t.dim(n + m - 1));
                    if lhs != rhs {
                        return Err(Error::InvalidMorphism(format!(
                            "f(x ∘_{i} y) != f(x) ∘_{i} f(y) for arities ({n},{m}), basis ({x},{y})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(o: Arc<FinOperad>) -> Self {
        let maps = o.components().iter().map(ChainMap::identity).collect();
        OperadMorphism { source: o.clone(), target: o, maps }
    }

    pub fn source(&self) -> &Arc<FinOperad> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinOperad> {
        &self.target
    }

    pub fn map(&self, n: usize) -> &ChainMap {
        &self.maps[n]
    }

    pub fn maps(&self) -> &[ChainMap] {
        &self.maps
    }

    /// The arity-`n` map as one matrix on flat bases.
    pub fn flat(&self, n: usize) -> RationalMatrix {
        let (s, t) = (self.source.component(n), self.target.component(n));
        let mut out = RationalMatrix::zeros(t.total_dim(), s.total_dim());
        for k in 0..=s.max_degree().min(t.max_degree()) {
            out.put_block(t.offset(k), s.offset(k), &self.maps[n].component(k));
        }
        out
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &OperadMorphism) -> Result<OperadMorphism> {
        if !same(&self.target, &other.source) {
            return Err(Error::InvalidMorphism("morphisms are not composable".into()));
        }
        let flat = (0..=self.source.arity_max())
            .map(|n| other.flat(n).mul(&self.flat(n)))
            .collect();
        Self::from_flat(self.source.clone(), other.target.clone(), flat)
    }

    /// Each arity map a quasi-isomorphism, compared up to the larger of the
    /// two truncation degrees in that arity.
    pub fn is_weak_equivalence(&self) -> WeakEquivalenceCertificate {
        let arities = self
            .maps
            .iter()
            .map(|f| {
                let w = f.source().max_degree().max(f.target().max_degree());
                f.is_quasi_iso(Some(w)).expect("explicit window")
            })
            .collect();
        WeakEquivalenceCertificate { arities }
    }

    /// Surjective in every arity and every degree `k >= 1`.
    pub fn is_operad_fibration(&self) -> bool {
        self.maps.iter().all(ChainMap::is_chain_fibration)
    }

    /// Pointwise equality of the underlying matrices.
    pub fn same_maps(&self, other: &OperadMorphism) -> bool {
        self.maps.len() == other.maps.len() && (0..self.maps.len()).all(|n| self.flat(n) == other.flat(n))
    }
}

pub fn star_scale(a: &Rational, f: &OperadMorphism) -> Result<OperadMorphism> {
    if a.is_zero() {
        return Err(Error::InvalidScalar);
    }
    let flat = (0..=f.source.arity_max())
        .map(|n| f.flat(n).scale(&pow(a, n as i64 - 1)))
        .collect();
    OperadMorphism::from_flat(f.source.clone(), f.target.clone(), flat)
}

/// `φ_a` acting by `a^{n-1}` in arity `n`.
pub fn scaling_automorphism(a: &Rational, o: Arc<FinOperad>) -> Result<OperadMorphism> {
    if a.is_zero() {
        return Err(Error::InvalidScalar);
    }
    let flat = (0..=o.arity_max())
        .map(|n| RationalMatrix::scalar(o.dim(n), &pow(a, n as i64 - 1)))
        .collect();
    OperadMorphism::from_flat(o.clone(), o, flat)
}
