//! Finite non-symmetric operads in chain complexes, stored by structure
//! constants on chosen bases.
//!
//! A basis element of `O(n)` is addressed by its flat index in the component
//! complex (degree blocks concatenated). `∘_i` is stored as a table from basis
//! pairs to sparse result vectors; axioms are verified, not imposed.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::chain::FinChainComplex;
use crate::error::{Error, Result};
use crate::exactla::{is_zero_vector, sign, zero_vector, Rational, Vector};

mod fixtures;
mod formality;
mod homology;
mod morphism;

pub use fixtures::{
    associative_map, associative_operad, formal_test_embed, formal_test_operad, formal_test_operad_plain,
    trivial_operad, truncated_associative,
};
pub use formality::{check_formality_witness, Direction, FormalityReport, FormalityWitness, WitnessStep};
pub use homology::{homology_map, homology_operad, HomologyOperad};
pub use morphism::{scaling_automorphism, star_scale, OperadMorphism, WeakEquivalenceCertificate};

/// Sparse vector: `(flat index, coefficient)` pairs with nonzero coefficients.
pub type SparseVec = Vec<(usize, Rational)>;

pub fn to_sparse(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn to_dense(v: &SparseVec, n: usize) -> Vector {
    let mut out = zero_vector(n);
    for (i, x) in v {
        out[*i] += x;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinOperad {
    arity_max: usize,
    components: Vec<FinChainComplex>,
    unit: Vector,
    // (n, i, m) -> table indexed by x * dim(m) + y
    compositions: BTreeMap<(usize, usize, usize), Vec<SparseVec>>,
}

impl FinOperad {
    /// Build an operad from its components, unit and a function giving
    /// `x ∘_i y` for basis elements `x ∈ O(n)`, `y ∈ O(m)`.
    ///
    /// The function is called for every `(n, i, m)` with `n >= 1`,
    /// `1 <= i <= n` and `n + m - 1 <= arity_max`. Results must be homogeneous
    /// of degree `|x| + |y|`; anything beyond a component's top degree must be
    /// zero.
    pub fn from_fn<F>(components: Vec<FinChainComplex>, unit: Vector, mut compose: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize, usize, usize) -> SparseVec,
    {
        if components.len() < 2 {
            return Err(Error::InvalidOperad("need components for arities 0 and 1".into()));
        }
        let arity_max = components.len() - 1;
        let mut compositions = BTreeMap::new();
        for n in 1..=arity_max {
            for m in 0..=(arity_max + 1 - n) {
                for i in 1..=n {
                    let (dn, dm) = (components[n].total_dim(), components[m].total_dim());
                    let mut table = Vec::with_capacity(dn * dm);
                    for x in 0..dn {
                        for y in 0..dm {
                            table.push(compose(n, i, m, x, y));
                        }
                    }
                    compositions.insert((n, i, m), table);
                }
            }
        }
        Self::from_tables(components, unit, compositions)
    }

    pub fn from_tables(
        components: Vec<FinChainComplex>,
        unit: Vector,
        compositions: BTreeMap<(usize, usize, usize), Vec<SparseVec>>,
    ) -> Result<Self> {
        let arity_max = components.len() - 1;
        if unit.len() != components[1].total_dim() {
            return Err(Error::InvalidOperad("unit has the wrong length".into()));
        }
        let o = FinOperad { arity_max, components, unit, compositions };
        for n in 1..=arity_max {
            for m in 0..=(arity_max + 1 - n) {
                for i in 1..=n {
                    let table = o.compositions.get(&(n, i, m)).ok_or_else(|| {
                        Error::InvalidOperad(format!("missing composition table ({n},{i},{m})"))
                    })?;
                    let (dn, dm) = (o.dim(n), o.dim(m));
                    if table.len() != dn * dm {
                        return Err(Error::InvalidOperad(format!("table ({n},{i},{m}) has wrong size")));
                    }
                    let target = &o.components[n + m - 1];
                    for x in 0..dn {
                        for y in 0..dm {
                            let want = o.degree_of(n, x) + o.degree_of(m, y);
                            for (z, _) in &table[x * dm + y] {
                                if *z >= target.total_dim() || target.degree_of(*z) != want {
                                    return Err(Error::InvalidOperad(format!(
                                        "({n},{i},{m}) on ({x},{y}) is not of degree {want}"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(o)
    }

    pub fn arity_max(&self) -> usize {
        self.arity_max
    }

    pub fn component(&self, n: usize) -> &FinChainComplex {
        &self.components[n]
    }

    pub fn components(&self) -> &[FinChainComplex] {
        &self.components
    }

    pub fn dim(&self, n: usize) -> usize {
        self.components[n].total_dim()
    }

    pub fn degree_of(&self, n: usize, x: usize) -> usize {
        self.components[n].degree_of(x)
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn has_zero_differential(&self) -> bool {
        self.components.iter().all(FinChainComplex::has_zero_differential)
    }

    /// Largest top degree over all components.
    pub fn max_degree(&self) -> usize {
        self.components.iter().map(FinChainComplex::max_degree).max().unwrap_or(0)
    }

    /// Quotient by everything of arity above `arity_max` or degree above
    /// `max_degree`. Arities are only dropped, never added.
    pub fn truncated(&self, arity_max: usize, max_degree: usize) -> Result<FinOperad> {
        let top = arity_max.min(self.arity_max);
        if top < 1 {
            return Err(Error::InvalidParameter("truncation must keep arity 1".into()));
        }
        let components: Vec<FinChainComplex> =
            self.components[..=top].iter().map(|c| c.truncated(max_degree)).collect();
        let keep: Vec<usize> = components.iter().map(FinChainComplex::total_dim).collect();
        let mut compositions = BTreeMap::new();
        for (&(n, i, m), table) in &self.compositions {
            if n > top || n + m - 1 > top {
                continue;
            }
            let dm = self.dim(m);
            let mut t = Vec::with_capacity(keep[n] * keep[m]);
            for x in 0..keep[n] {
                for y in 0..keep[m] {
                    t.push(table[x * dm + y].iter().filter(|(z, _)| *z < keep[n + m - 1]).cloned().collect());
                }
            }
            compositions.insert((n, i, m), t);
        }
        let unit = self.unit[..keep[1]].to_vec();
        FinOperad::from_tables(components, unit, compositions)
    }

    pub fn table(&self, n: usize, i: usize, m: usize) -> &[SparseVec] {
        &self.compositions[&(n, i, m)]
    }

    pub fn compositions(&self) -> &BTreeMap<(usize, usize, usize), Vec<SparseVec>> {
        &self.compositions
    }

    /// `x ∘_i y` on basis elements.
    pub fn compose_basis(&self, n: usize, i: usize, m: usize, x: usize, y: usize) -> &SparseVec {
        &self.compositions[&(n, i, m)][x * self.dim(m) + y]
    }

    /// `x ∘_i y` on sparse vectors.
    pub fn compose_sparse(&self, n: usize, i: usize, m: usize, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        let table = &self.compositions[&(n, i, m)];
        let dm = self.dim(m);
        for (a, ca) in x {
            for (b, cb) in y {
                let c = ca * cb;
                for (z, cz) in &table[a * dm + b] {
                    *acc.entry(*z).or_insert_with(Rational::zero) += &c * cz;
                }
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// `x ∘_i y` on dense vectors.
    pub fn compose(&self, n: usize, i: usize, m: usize, x: &[Rational], y: &[Rational]) -> Vector {
        let r = self.compose_sparse(n, i, m, &to_sparse(x), &to_sparse(y));
        to_dense(&r, self.dim(n + m - 1))
    }

    /// Differential of a flat vector in arity `n`.
    pub fn differential(&self, n: usize, v: &[Rational]) -> Vector {
        self.components[n].flat_differential().apply(v)
    }

    /// Check unit, associativity and derivation axioms on all basis triples
    /// within the arity truncation.
    pub fn check_axioms(&self) -> AxiomReport {
        check_operad_axioms(self)
    }
}

/// One failed instance of an operad axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    UnitNotDegreeZeroCycle,
    LeftUnit { arity: usize, x: usize },
    RightUnit { arity: usize, position: usize, x: usize },
    Sequential { arities: (usize, usize, usize), positions: (usize, usize), basis: (usize, usize, usize) },
    Parallel { arities: (usize, usize, usize), positions: (usize, usize), basis: (usize, usize, usize) },
    Derivation { arities: (usize, usize), position: usize, basis: (usize, usize) },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub instances_checked: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn sparse_eq(a: &SparseVec, b: &SparseVec) -> bool {
    a == b
}

fn scale_sparse(s: &Rational, v: SparseVec) -> SparseVec {
    if s.is_one() {
        return v;
    }
    v.into_iter().map(|(i, x)| (i, x * s)).collect()
}

fn add_sparse(a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut acc: BTreeMap<usize, Rational> = a.iter().cloned().collect();
    for (i, x) in b {
        *acc.entry(*i).or_insert_with(Rational::zero) += x;
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

pub fn check_operad_axioms(o: &FinOperad) -> AxiomReport {
    let mut rep = AxiomReport::default();
    let top = o.arity_max;
    let unit = to_sparse(&o.unit);
    let unit_ok = unit.iter().all(|(i, _)| o.degree_of(1, *i) == 0);
    if !unit_ok {
        rep.violations.push(AxiomViolation::UnitNotDegreeZeroCycle);
    }
    let basis = |_arity: usize, x: usize| -> SparseVec { vec![(x, Rational::one())] };

    for n in 0..=top {
        for x in 0..o.dim(n) {
            rep.instances_checked += 1;
            if !sparse_eq(&o.compose_sparse(1, 1, n, &unit, &basis(n, x)), &basis(n, x)) {
                rep.violations.push(AxiomViolation::LeftUnit { arity: n, x });
            }
            for i in 1..=n {
                rep.instances_checked += 1;
                if !sparse_eq(&o.compose_sparse(n, i, 1, &basis(n, x), &unit), &basis(n, x)) {
                    rep.violations.push(AxiomViolation::RightUnit { arity: n, position: i, x });
                }
            }
        }
    }

    for n in 1..=top {
        for m in 0..=(top + 1 - n) {
            for k in 0..=(top + 2 - n - m).min(top) {
                if n + m + k < 2 || n + m + k - 2 > top {
                    continue;
                }
                for x in 0..o.dim(n) {
                    for y in 0..o.dim(m) {
                        let bx = basis(n, x);
                        let by = basis(m, y);
                        for i in 1..=n {
                            let xy = o.compose_sparse(n, i, m, &bx, &by);
                            for z in 0..o.dim(k) {
                                let bz = basis(k, z);
                                // sequential
                                for j in 1..=m {
                                    rep.instances_checked += 1;
                                    let lhs = o.compose_sparse(n + m - 1, i - 1 + j, k, &xy, &bz);
                                    let yz = o.compose_sparse(m, j, k, &by, &bz);
                                    let rhs = o.compose_sparse(n, i, m + k - 1, &bx, &yz);
                                    if !sparse_eq(&lhs, &rhs) {
                                        rep.violations.push(AxiomViolation::Sequential {
                                            arities: (n, m, k),
                                            positions: (i, j),
                                            basis: (x, y, z),
                                        });
                                    }
                                }
                                // parallel, i < j; skipped when x ∘_j z leaves the truncation
                                if n + k - 1 > top {
                                    continue;
                                }
                                for j in (i + 1)..=n {
                                    rep.instances_checked += 1;
                                    let lhs = o.compose_sparse(n + m - 1, j + m - 1, k, &xy, &bz);
                                    let xz = o.compose_sparse(n, j, k, &bx, &bz);
                                    let s = sign(o.degree_of(m, y) * o.degree_of(k, z));
                                    let rhs = scale_sparse(&s, o.compose_sparse(n + k - 1, i, m, &xz, &by));
                                    if !sparse_eq(&lhs, &rhs) {
                                        rep.violations.push(AxiomViolation::Parallel {
                                            arities: (n, m, k),
                                            positions: (i, j),
                                            basis: (x, y, z),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // derivation
    for n in 1..=top {
        let dn = o.components[n].flat_differential();
        for m in 0..=(top + 1 - n) {
            let dm = o.components[m].flat_differential();
            let dt = o.components[n + m - 1].flat_differential();
            let tmax = o.components[n + m - 1].max_degree();
            for x in 0..o.dim(n) {
                let bx = basis(n, x);
                let dx = to_sparse(&dn.column(x));
                let px = o.degree_of(n, x);
                for y in 0..o.dim(m) {
                    if px + o.degree_of(m, y) > tmax {
                        continue;
                    }
                    let by = basis(m, y);
                    let dy = to_sparse(&dm.column(y));
                    for i in 1..=n {
                        rep.instances_checked += 1;
                        let xy = o.compose_sparse(n, i, m, &bx, &by);
                        let lhs = to_sparse(&dt.apply(&to_dense(&xy, o.dim(n + m - 1))));
                        let a = o.compose_sparse(n, i, m, &dx, &by);
                        let b = scale_sparse(&sign(px), o.compose_sparse(n, i, m, &bx, &dy));
                        let rhs = add_sparse(&a, &b);
                        if !sparse_eq(&lhs, &rhs) {
                            rep.violations.push(AxiomViolation::Derivation {
                                arities: (n, m),
                                position: i,
                                basis: (x, y),
                            });
                        }
                    }
                }
            }
        }
    }
    rep
}

/// An operad with a chosen morphism from the associative operad, given by the
/// images `mu ∈ O(2)_0` and `basepoint ∈ O(0)_0` of its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativeOperad {
    pub operad: FinOperad,
    pub mu: Vector,
    pub basepoint: Vector,
}

impl MultiplicativeOperad {
    pub fn new(operad: FinOperad, mu: Vector, basepoint: Vector) -> Result<Self> {
        let m = MultiplicativeOperad { operad, mu, basepoint };
        m.validate()?;
        Ok(m)
    }

    /// Associativity and unitality of `(mu, basepoint)`; both must be
    /// degree-0 cycles.
    pub fn validate(&self) -> Result<()> {
        let o = &self.operad;
        let bad = |s: &str| Err(Error::InvalidMultiplicativeStructure(s.into()));
        if o.arity_max() < 3 {
            return bad("arity_max must be at least 3");
        }
        if self.mu.len() != o.dim(2) || self.basepoint.len() != o.dim(0) {
            return bad("mu or basepoint has the wrong length");
        }
        let deg0 = |n: usize, v: &Vector| v.iter().enumerate().all(|(i, x)| x.is_zero() || o.degree_of(n, i) == 0);
        if !deg0(2, &self.mu) || !deg0(0, &self.basepoint) {
            return bad("mu and basepoint must have degree 0");
        }
        if !is_zero_vector(&o.differential(2, &self.mu)) || !is_zero_vector(&o.differential(0, &self.basepoint)) {
            return bad("mu and basepoint must be cycles");
        }
        let l = o.compose(2, 1, 2, &self.mu, &self.mu);
        let r = o.compose(2, 2, 2, &self.mu, &self.mu);
        if l != r {
            return bad("mu ∘_1 mu != mu ∘_2 mu");
        }
        let u1 = o.compose(2, 1, 0, &self.mu, &self.basepoint);
        let u2 = o.compose(2, 2, 0, &self.mu, &self.basepoint);
        if &u1 != o.unit() || &u2 != o.unit() {
            return bad("mu ∘_i e is not the unit");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
