use std::collections::BTreeMap;
use std::sync::Arc;

use super::{to_dense, to_sparse, FinOperad, MultiplicativeOperad, OperadMorphism, SparseVec};
use crate::chain::FinChainComplex;
use crate::error::{Error, Result};
use crate::exactla::{zero_vector, RationalMatrix, SubquotientBasis, Vector};

/// `H_*(O)` with the carriers that connect it back to `O`.
#[derive(Clone, Debug)]
pub struct HomologyOperad {
    pub operad: FinOperad,
    /// `carriers[n][k]` describes `H_k(O(n))`.
    pub carriers: Vec<Vec<SubquotientBasis>>,
}

impl HomologyOperad {
    /// Class of a cycle `v ∈ O(n)_k` in the flat basis of `H(n)`; `None` when
    /// `v` is not a homogeneous cycle of degree `k`.
    pub fn class_of(&self, n: usize, k: usize, v: &[crate::exactla::Rational]) -> Option<Vector> {
        let c = self.carriers[n].get(k)?;
        let h = self.operad.component(n);
        let coords = c.class_coordinates(v)?;
        let mut out = zero_vector(h.total_dim());
        for (j, x) in coords.into_iter().enumerate() {
            out[h.offset(k) + j] = x;
        }
        Some(out)
    }

    /// Class of a flat vector of `O(n)`, degree by degree.
    pub fn class_of_flat(&self, source: &FinOperad, n: usize, v: &[crate::exactla::Rational]) -> Option<Vector> {
        let comp = source.component(n);
        let h = self.operad.component(n);
        let mut out = zero_vector(h.total_dim());
        for k in 0..=comp.max_degree() {
            let part = &v[comp.offset(k)..comp.offset(k) + comp.dim(k)];
            let coords = self.carriers[n][k].class_coordinates(part)?;
            for (j, x) in coords.into_iter().enumerate() {
                out[h.offset(k) + j] = x;
            }
        }
        Some(out)
    }

    /// Cycle representative (flat in `O(n)`) of a flat homology vector.
    pub fn lift(&self, source: &FinOperad, n: usize, h: &[crate::exactla::Rational]) -> Vector {
        let comp = source.component(n);
        let hc = self.operad.component(n);
        let mut out = zero_vector(comp.total_dim());
        for k in 0..=comp.max_degree() {
            let coords = &h[hc.offset(k)..hc.offset(k) + hc.dim(k)];
            let cyc = self.carriers[n][k].lift(coords);
            for (j, x) in cyc.into_iter().enumerate() {
                out[comp.offset(k) + j] = x;
            }
        }
        out
    }
}

/// Homology carriers with zero differential; compositions come from composing
/// cycle representatives and reading off the class of the result.
pub fn homology_operad(o: &FinOperad) -> HomologyOperad {
    let top = o.arity_max();
    let carriers: Vec<Vec<SubquotientBasis>> = (0..=top).map(|n| o.component(n).homology()).collect();
    let components: Vec<FinChainComplex> = carriers
        .iter()
        .map(|cs| FinChainComplex::with_zero_differential(cs.iter().map(SubquotientBasis::dim).collect()))
        .collect();
    let partial = HomologyOperad {
        operad: FinOperad {
            arity_max: top,
            components: components.clone(),
            unit: Vec::new(),
            compositions: BTreeMap::new(),
        },
        carriers,
    };
    // flat representatives per arity
    let reps: Vec<Vec<Vector>> = (0..=top)
        .map(|n| {
            let h = &components[n];
            (0..h.total_dim())
                .map(|j| partial.lift(o, n, &crate::exactla::unit_vector(h.total_dim(), j)))
                .collect()
        })
        .collect();
    let mut compositions = BTreeMap::new();
    for &(n, i, m) in o.compositions().keys() {
        let t = n + m - 1;
        let mut table: Vec<SparseVec> = Vec::with_capacity(reps[n].len() * reps[m].len());
        for rx in &reps[n] {
            let sx = to_sparse(rx);
            for ry in &reps[m] {
                let z = to_dense(&o.compose_sparse(n, i, m, &sx, &to_sparse(ry)), o.dim(t));
                let cls = partial
                    .class_of_flat(o, t, &z)
                    .expect("composition of cycles is a cycle");
                table.push(to_sparse(&cls));
            }
        }
        compositions.insert((n, i, m), table);
    }
    let unit = partial.class_of_flat(o, 1, o.unit()).expect("unit is a cycle");
    let operad = FinOperad::from_tables(components, unit, compositions).expect("homology tables are homogeneous");
    HomologyOperad { operad, carriers: partial.carriers }
}

impl HomologyOperad {
    /// Classes of `mu` and `e`.
    pub fn multiplicative(&self, m: &MultiplicativeOperad) -> Result<MultiplicativeOperad> {
        let mu = self
            .class_of_flat(&m.operad, 2, &m.mu)
            .ok_or_else(|| Error::InvalidMultiplicativeStructure("mu is not a cycle".into()))?;
        let e = self
            .class_of_flat(&m.operad, 0, &m.basepoint)
            .ok_or_else(|| Error::InvalidMultiplicativeStructure("basepoint is not a cycle".into()))?;
        MultiplicativeOperad::new(self.operad.clone(), mu, e)
    }
}

/// `H(f)` as a morphism between the homology operads of its endpoints.
pub fn homology_map(
    f: &OperadMorphism,
    hs: &HomologyOperad,
    ht: &HomologyOperad,
    hs_arc: Arc<FinOperad>,
    ht_arc: Arc<FinOperad>,
) -> Result<OperadMorphism> {
    let (s, t) = (f.source(), f.target());
    let flats = (0..=s.arity_max())
        .map(|n| {
            let fl = f.flat(n);
            let dh = hs.operad.dim(n);
            let cols: Vec<Vector> = (0..dh)
                .map(|j| {
                    let rep = hs.lift(s, n, &crate::exactla::unit_vector(dh, j));
                    ht.class_of_flat(t, n, &fl.apply(&rep)).expect("chain maps preserve cycles")
                })
                .collect();
            RationalMatrix::from_columns(&cols, ht.operad.dim(n))
        })
        .collect();
    OperadMorphism::from_flat(hs_arc, ht_arc, flats)
}
