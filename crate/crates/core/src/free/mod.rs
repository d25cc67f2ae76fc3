//! Free operads on planar trees, the odd-tree presentation of cell
//! attachments and a brute-force quotient oracle for the same pushouts.

use std::fmt;

use crate::chain::{disk_complex, sphere_complex, ChainMap, FinChainComplex};
use crate::error::{Error, Result};

mod basis;
mod free_op;
mod oracle;
mod pushout;

pub use basis::{TreeBasis, TreeTensor};
pub use free_op::{free_extension, free_operad, FreeBounds, FreeOperad};
pub use oracle::{pushout_oracle, OracleRelations};
pub use pushout::{
    cofibration_pushout, filtration_layers, pushout_presentation, FiltrationLayers, PushoutBounds,
    PushoutOperad,
};

/// A sequence of chain complexes `S(0), ..., S(arity_max)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSequence {
    components: Vec<FinChainComplex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Disk,
    Sphere,
}

impl GradedSequence {
    pub fn new(components: Vec<FinChainComplex>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("a sequence needs arity 0".into()));
        }
        Ok(GradedSequence { components })
    }

    pub fn zero(arity_max: usize) -> Self {
        GradedSequence { components: vec![FinChainComplex::zero(); arity_max + 1] }
    }

    pub fn arity_max(&self) -> usize {
        self.components.len() - 1
    }

    /// Zero beyond the stored range.
    pub fn component(&self, n: usize) -> FinChainComplex {
        self.components.get(n).cloned().unwrap_or_else(FinChainComplex::zero)
    }

    pub fn components(&self) -> &[FinChainComplex] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.total_dim() == 0)
    }
}

/// Dimensions and homology dimensions per arity and degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionTable {
    /// `dims[n][k]`
    pub dims: Vec<Vec<usize>>,
    pub homology: Vec<Vec<usize>>,
    /// Dimensions are exact up to the top degree and homology below it.
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionRow {
    pub arity: usize,
    pub degree: usize,
    pub dim: usize,
    pub homology: usize,
    /// Both numbers in the row are exact.
    pub certified: bool,
}

impl DimensionTable {
    pub fn max_degree(&self) -> usize {
        self.dims.iter().map(|d| d.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn dim(&self, n: usize, k: usize) -> usize {
        self.dims.get(n).and_then(|d| d.get(k)).copied().unwrap_or(0)
    }

    pub fn homology_dim(&self, n: usize, k: usize) -> usize {
        self.homology.get(n).and_then(|d| d.get(k)).copied().unwrap_or(0)
    }

    pub fn rows(&self) -> Vec<DimensionRow> {
        let top = self.max_degree();
        let mut out = Vec::new();
        for n in 0..self.dims.len() {
            for k in 0..=top {
                out.push(DimensionRow {
                    arity: n,
                    degree: k,
                    dim: self.dim(n, k),
                    homology: self.homology_dim(n, k),
                    certified: self.certified && k < top,
                });
            }
        }
        out
    }
}

impl fmt::Display for DimensionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>5} {:>6} {:>6} {:>6} {:>9}", "arity", "degree", "dim", "H", "certified")?;
        for r in self.rows() {
            writeln!(f, "{:>5} {:>6} {:>6} {:>6} {:>9}", r.arity, r.degree, r.dim, r.homology, r.certified)?;
        }
        Ok(())
    }
}

/// `D^{p,q}` or `S^{p,q}` as a sequence stored up to `max(q, arity_max)`.
pub fn concentrated_sequence(p: usize, q: usize, kind: CellKind, arity_max: usize) -> Result<GradedSequence> {
    let cell = match kind {
        CellKind::Disk => disk_complex(p)?,
        CellKind::Sphere => sphere_complex(p),
    };
    let top = arity_max.max(q);
    let components = (0..=top).map(|n| if n == q { cell.clone() } else { FinChainComplex::zero() }).collect();
    Ok(GradedSequence { components })
}

/// Arity-wise chain maps between two sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceMorphism {
    pub source: GradedSequence,
    pub target: GradedSequence,
    pub maps: Vec<ChainMap>,
}

impl SequenceMorphism {
    pub fn new(source: GradedSequence, target: GradedSequence, maps: Vec<ChainMap>) -> Result<Self> {
        let top = source.arity_max().max(target.arity_max());
        if maps.len() != top + 1 {
            return Err(Error::DimensionMismatch(format!("expected {} arity maps", top + 1)));
        }
        for (n, f) in maps.iter().enumerate() {
            if f.source() != &source.component(n) || f.target() != &target.component(n) {
                return Err(Error::DimensionMismatch(format!("arity {n} map has the wrong endpoints")));
            }
        }
        Ok(SequenceMorphism { source, target, maps })
    }
}

/// `i^{p,q} : S^{p-1,q} -> D^{p,q}`.
pub fn generating_cofibration(p: usize, q: usize, arity_max: usize) -> Result<SequenceMorphism> {
    let s = concentrated_sequence(p.saturating_sub(1), q, CellKind::Sphere, arity_max)?;
    let d = concentrated_sequence(p, q, CellKind::Disk, arity_max)?;
    let maps = (0..=arity_max.max(q))
        .map(|n| {
            if n == q {
                crate::chain::sphere_to_disk(p)
            } else {
                Ok(ChainMap::zero(&FinChainComplex::zero(), &FinChainComplex::zero()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SequenceMorphism::new(s, d, maps)
}

/// `j^{p,q} : 0 -> D^{p,q}`.
pub fn generating_trivial_cofibration(p: usize, q: usize, arity_max: usize) -> Result<SequenceMorphism> {
    let d = concentrated_sequence(p, q, CellKind::Disk, arity_max)?;
    let z = GradedSequence::zero(arity_max.max(q));
    let maps = (0..=arity_max.max(q)).map(|n| ChainMap::zero(&FinChainComplex::zero(), &d.component(n))).collect();
    SequenceMorphism::new(z, d, maps)
}

/// The family `I_1 = { i^{p,q} }` for `1 <= p <= p_max`, `q <= q_max`.
pub fn generating_cofibrations(p_max: usize, q_max: usize) -> Result<Vec<SequenceMorphism>> {
    let mut out = Vec::new();
    for p in 1..=p_max {
        for q in 0..=q_max {
            out.push(generating_cofibration(p, q, q_max)?);
        }
    }
    Ok(out)
}

/// The family `J_1 = { j^{p,q} }` for `1 <= p <= p_max`, `q <= q_max`.
pub fn generating_trivial_cofibrations(p_max: usize, q_max: usize) -> Result<Vec<SequenceMorphism>> {
    let mut out = Vec::new();
    for p in 1..=p_max {
        for q in 0..=q_max {
            out.push(generating_trivial_cofibration(p, q, q_max)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
