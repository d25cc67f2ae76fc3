//! The cosimplicial complex of a multiplicative operad, its normalization,
//! Hochschild cohomology and the cochain-level cup product and braces.
//!
//! `X^p = O(p)` with cofaces `d^0 x = μ ∘_2 x`, `d^i x = x ∘_i μ` for
//! `1 <= i <= p`, `d^{p+1} x = μ ∘_1 x` and codegeneracies
//! `s^i x = x ∘_{i+1} e`. Cochains in `X^p` of internal degree `q` have total
//! degree `t = q - p`; the total differential is `D = (-1)^p d + δ` with
//! `δ = Σ (-1)^i d^i`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::chain::{ChainMap, FinChainComplex};
use crate::error::{Error, Result};
use crate::exactla::{is_zero_vector, kernel_basis, sign, zero_vector, Rational, RationalMatrix, Vector};
use crate::operad::{FinOperad, MultiplicativeOperad, OperadMorphism};
use crate::specseq::{Bicomplex, BicomplexMap, E2Comparison};

/// Columns `X^0..=X^{p_max}` with cofaces out of every column but the last
/// and codegeneracies out of every column but the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosimplicialComplex {
    columns: Vec<FinChainComplex>,
    cofaces: Vec<Vec<RationalMatrix>>,
    codegeneracies: Vec<Vec<RationalMatrix>>,
}

fn degree_preserving(m: &RationalMatrix, s: &FinChainComplex, t: &FinChainComplex) -> bool {
    m.entries().all(|(r, c, _)| t.degree_of(r) == s.degree_of(c))
}

impl CosimplicialComplex {
    /// `cofaces[p][i] : X^p -> X^{p+1}` for `p < p_max`, `i = 0..=p+1`;
    /// `codegeneracies[p][i] : X^p -> X^{p-1}` for `p >= 1`, `i = 0..p`
    /// (`codegeneracies[0]` is empty). All maps are flat matrices.
    pub fn new(
        columns: Vec<FinChainComplex>,
        cofaces: Vec<Vec<RationalMatrix>>,
        codegeneracies: Vec<Vec<RationalMatrix>>,
    ) -> Result<Self> {
        let n = columns.len();
        if n == 0 || cofaces.len() + 1 != n || codegeneracies.len() != n {
            return Err(Error::DimensionMismatch("cosimplicial structure maps do not match the columns".into()));
        }
        let c = CosimplicialComplex { columns, cofaces, codegeneracies };
        c.check_maps()?;
        c.check_identities()?;
        Ok(c)
    }

    fn check_maps(&self) -> Result<()> {
        let chain = |m: &RationalMatrix, s: &FinChainComplex, t: &FinChainComplex, what: String| -> Result<()> {
            if m.rows() != t.total_dim() || m.cols() != s.total_dim() {
                return Err(Error::DimensionMismatch(format!("{what} has the wrong shape")));
            }
            if !degree_preserving(m, s, t) || t.flat_differential().mul(m) != m.mul(&s.flat_differential()) {
                return Err(Error::CosimplicialIdentityFailure {
                    identity: format!("{what} is not a degree-0 chain map"),
                    degree: 0,
                });
            }
            Ok(())
        };
        for p in 0..self.p_max() {
            if self.cofaces[p].len() != p + 2 {
                return Err(Error::DimensionMismatch(format!("column {p} needs {} cofaces", p + 2)));
            }
            for (i, m) in self.cofaces[p].iter().enumerate() {
                chain(m, &self.columns[p], &self.columns[p + 1], format!("d^{i} on X^{p}"))?;
            }
        }
        for p in 0..=self.p_max() {
            if self.codegeneracies[p].len() != p {
                return Err(Error::DimensionMismatch(format!("column {p} needs {p} codegeneracies")));
            }
            for (i, m) in self.codegeneracies[p].iter().enumerate() {
                chain(m, &self.columns[p], &self.columns[p - 1], format!("s^{i} on X^{p}"))?;
            }
        }
        Ok(())
    }

    /// The cosimplicial identities as matrix identities.
    pub fn check_identities(&self) -> Result<()> {
        let fail = |identity: String, degree: usize| Err(Error::CosimplicialIdentityFailure { identity, degree });
        let d = |p: usize, i: usize| &self.cofaces[p][i];
        let s = |p: usize, i: usize| &self.codegeneracies[p][i];
        let top = self.p_max();
        for p in 0..top.saturating_sub(1) {
            for j in 0..=p + 2 {
                for i in 0..j {
                    if d(p + 1, j).mul(d(p, i)) != d(p + 1, i).mul(d(p, j - 1)) {
                        return fail(format!("d^{j} d^{i} = d^{i} d^{}", j - 1), p);
                    }
                }
            }
        }
        for p in 0..top {
            // s^j d^i on X^p, with s^j acting on X^{p+1}
            for j in 0..=p {
                for i in 0..=p + 1 {
                    let lhs = s(p + 1, j).mul(d(p, i));
                    let rhs = if i < j {
                        d(p - 1, i).mul(s(p, j - 1))
                    } else if i == j || i == j + 1 {
                        RationalMatrix::identity(self.columns[p].total_dim())
                    } else {
                        d(p - 1, i - 1).mul(s(p, j))
                    };
                    if lhs != rhs {
                        return fail(format!("s^{j} d^{i}"), p);
                    }
                }
            }
        }
        for p in 2..=top {
            for j in 0..p - 1 {
                for i in 0..=j {
                    if s(p - 1, j).mul(s(p, i)) != s(p - 1, i).mul(s(p, j + 1)) {
                        return fail(format!("s^{j} s^{i} = s^{i} s^{}", j + 1), p);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn p_max(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn column(&self, p: usize) -> &FinChainComplex {
        &self.columns[p]
    }

    pub fn columns(&self) -> &[FinChainComplex] {
        &self.columns
    }

    pub fn coface(&self, p: usize, i: usize) -> &RationalMatrix {
        &self.cofaces[p][i]
    }

    pub fn codegeneracy(&self, p: usize, i: usize) -> &RationalMatrix {
        &self.codegeneracies[p][i]
    }

    /// `δ = Σ (-1)^i d^i : X^p -> X^{p+1}`.
    pub fn coboundary(&self, p: usize) -> RationalMatrix {
        let (s, t) = (self.columns[p].total_dim(), self.columns[p + 1].total_dim());
        let mut m = RationalMatrix::zeros(t, s);
        for (i, d) in self.cofaces[p].iter().enumerate() {
            m = m.add(&d.scale(&sign(i)));
        }
        m
    }

    /// The unnormalized bicomplex.
    pub fn bicomplex(&self) -> Result<Bicomplex> {
        let hs: Vec<RationalMatrix> = (0..self.p_max()).map(|p| self.coboundary(p)).collect();
        Bicomplex::from_columns(&self.columns, &hs)
    }
}

/// The cosimplicial complex of `m`, with columns up to `m`'s top arity.
pub fn cosimplicial_of(m: &MultiplicativeOperad) -> Result<CosimplicialComplex> {
    m.validate()?;
    let o = &m.operad;
    let top = o.arity_max();
    let mut cofaces = Vec::new();
    for p in 0..top {
        let mut maps = Vec::new();
        let n = o.dim(p);
        let target = o.dim(p + 1);
        let col = |f: &dyn Fn(&Vector) -> Vector| {
            let cols: Vec<Vector> = (0..n).map(|x| f(&crate::exactla::unit_vector(n, x))).collect();
            RationalMatrix::from_columns(&cols, target)
        };
        maps.push(col(&|x| o.compose(2, 2, p, &m.mu, x)));
        for i in 1..=p {
            maps.push(col(&|x| o.compose(p, i, 2, x, &m.mu)));
        }
        maps.push(col(&|x| o.compose(2, 1, p, &m.mu, x)));
        cofaces.push(maps);
    }
    let mut codegeneracies = vec![Vec::new()];
    for p in 1..=top {
        let n = o.dim(p);
        let maps = (0..p)
            .map(|i| {
                let cols: Vec<Vector> =
                    (0..n).map(|x| o.compose(p, i + 1, 0, &crate::exactla::unit_vector(n, x), &m.basepoint)).collect();
                RationalMatrix::from_columns(&cols, o.dim(p - 1))
            })
            .collect();
        codegeneracies.push(maps);
    }
    CosimplicialComplex::new(o.components().to_vec(), cofaces, codegeneracies)
}

/// `N^p = ∩ ker s^i` with the restricted differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedComplex {
    pub columns: Vec<FinChainComplex>,
    /// `inclusions[p] : N^p -> X^p`, flat.
    pub inclusions: Vec<RationalMatrix>,
    /// `coboundaries[p] : N^p -> N^{p+1}`, flat.
    pub coboundaries: Vec<RationalMatrix>,
    // per column, the X-coordinates that read off N-coordinates
    free: Vec<Vec<usize>>,
}

impl NormalizedComplex {
    /// Coordinates of `v ∈ X^p` in `N^p`, or `None` if `v ∉ N^p`.
    pub fn coordinates(&self, p: usize, v: &[Rational]) -> Option<Vector> {
        let c: Vector = self.free[p].iter().map(|&i| v[i].clone()).collect();
        (self.inclusions[p].apply(&c) == v).then_some(c)
    }

    pub fn bicomplex(&self) -> Result<Bicomplex> {
        Bicomplex::from_columns(&self.columns, &self.coboundaries)
    }
}

/// Normalize; `δ` restricts to `N` and `δ² = 0` is checked.
pub fn normalized(c: &CosimplicialComplex) -> Result<NormalizedComplex> {
    let mut columns = Vec::new();
    let mut inclusions = Vec::new();
    let mut free = Vec::new();
    for p in 0..=c.p_max() {
        let x = c.column(p);
        let mut dims = Vec::new();
        let mut basis: Vec<Vector> = Vec::new();
        let mut fr = Vec::new();
        for q in 0..=x.max_degree() {
            let (off, n) = (x.offset(q), x.dim(q));
            // stack the codegeneracies restricted to degree q
            let rows: usize = (0..p).map(|i| c.codegeneracy(p, i).rows()).sum();
            let mut s = RationalMatrix::zeros(rows, n);
            let mut r0 = 0;
            for i in 0..p {
                let m = c.codegeneracy(p, i);
                s.put_block(r0, 0, &m.block(0, off, m.rows(), n));
                r0 += m.rows();
            }
            let k = kernel_basis(&s);
            dims.push(k.len());
            for v in k {
                // kernel vectors carry a unit entry at their free coordinate
                let f = (0..n)
                    .find(|&j| v[j] == Rational::from_integer(1.into()) && basis_free(&v, j))
                    .expect("kernel basis vector has a free coordinate");
                fr.push(off + f);
                let mut full = zero_vector(x.total_dim());
                for (j, a) in v.into_iter().enumerate() {
                    full[off + j] = a;
                }
                basis.push(full);
            }
        }
        let inc = RationalMatrix::from_columns(&basis, x.total_dim());
        free.push(fr);
        inclusions.push(inc);
        columns.push(dims);
    }
    let mut norm = NormalizedComplex { columns: Vec::new(), inclusions, coboundaries: Vec::new(), free };
    let project = |norm: &NormalizedComplex, p: usize, m: &RationalMatrix| -> Result<RationalMatrix> {
        let cols: Result<Vec<Vector>> = m
            .columns()
            .iter()
            .map(|v| {
                norm.coordinates(p, v)
                    .ok_or_else(|| Error::InvariantViolation(format!("a map leaves the normalized part in column {p}")))
            })
            .collect();
        Ok(RationalMatrix::from_columns(&cols?, norm.inclusions[p].cols()))
    };
    for (p, dims) in columns.iter().enumerate() {
        let x = c.column(p);
        let inc = &norm.inclusions[p];
        let dn = project(&norm, p, &x.flat_differential().mul(inc))?;
        let offs: Vec<usize> = (0..dims.len()).map(|q| dims[..q].iter().sum()).collect();
        let diffs = (1..dims.len()).map(|q| dn.block(offs[q - 1], offs[q], dims[q - 1], dims[q])).collect();
        norm.columns.push(FinChainComplex::new(dims.clone(), diffs)?);
    }
    for p in 0..c.p_max() {
        let m = project(&norm, p + 1, &c.coboundary(p).mul(&norm.inclusions[p]))?;
        norm.coboundaries.push(m);
    }
    for p in 0..c.p_max().saturating_sub(1) {
        if !norm.coboundaries[p + 1].mul(&norm.coboundaries[p]).is_zero() {
            return Err(Error::InvariantViolation(format!("δ² != 0 on N^{p}")));
        }
    }
    Ok(norm)
}

// `v[j] = 1` and `j` is the free coordinate produced by `kernel_basis`: the
// last nonzero entry of the vector.
fn basis_free(v: &[Rational], j: usize) -> bool {
    v[j + 1..].iter().all(Zero::is_zero)
}

/// One total degree of Hochschild cohomology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildRow {
    pub t: isize,
    pub dim: usize,
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct HochschildCohomology {
    pub host: Arc<MultiplicativeOperad>,
    pub rows: Vec<HochschildRow>,
    /// Representative cocycles per row, as normalized cochains.
    pub representatives: Vec<Vec<HochschildCochain>>,
    pub p_max: usize,
}

impl HochschildCohomology {
    pub fn row(&self, t: isize) -> Option<&HochschildRow> {
        self.rows.iter().find(|r| r.t == t)
    }

    pub fn dims(&self) -> Vec<(isize, usize, bool)> {
        self.rows.iter().map(|r| (r.t, r.dim, r.certified)).collect()
    }

    pub fn require_certified(&self) -> Result<()> {
        match self.rows.iter().find(|r| !r.certified) {
            Some(r) => Err(Error::WindowNotCertified(format!("total degree {} depends on the truncation", r.t))),
            None => Ok(()),
        }
    }

    /// Tab-separated rows `t dim certified`.
    pub fn tsv(&self) -> String {
        self.rows.iter().map(|r| format!("{}\t{}\t{}\n", r.t, r.dim, r.certified)).collect()
    }
}

impl fmt::Display for HochschildCohomology {
    /// Aligned table; uncertified dimensions are marked `?`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>4} {:>6}", "t", "dim HH")?;
        for r in &self.rows {
            let d = format!("{}{}", r.dim, if r.certified { "" } else { "?" });
            writeln!(f, "{:>4} {:>6}", r.t, d)?;
        }
        Ok(())
    }
}

/// Whether total degree `t` of the normalized bicomplex is unaffected by
/// cutting off the columns above `p_max`: every column carrying a cell of
/// degree `t-1`, `t` or `t+1` sits at least two columns below the cut.
pub fn hh_certified(b: &Bicomplex, t: isize) -> bool {
    let mut last = None;
    for s in [t - 1, t, t + 1] {
        for c in b.total_cells(s) {
            if b.dim(c.p, c.q) > 0 {
                last = last.max(Some(c.p));
            }
        }
    }
    last.is_none_or(|p| b.p_max() >= p + 2)
}

/// Hochschild cohomology in total degrees `t_min..=t_max` from the
/// normalized complex with columns up to `p_max`.
pub fn hochschild_cohomology(o: &MultiplicativeOperad, t_min: isize, t_max: isize, p_max: usize) -> Result<HochschildCohomology> {
    let host = Arc::new(o.clone());
    let data = HochschildData::new(host, p_max)?;
    data.cohomology(t_min, t_max)
}

/// The cosimplicial and normalized complexes of one host.
#[derive(Clone, Debug)]
pub struct HochschildData {
    pub host: Arc<MultiplicativeOperad>,
    pub cosimplicial: CosimplicialComplex,
    pub normalized: NormalizedComplex,
    pub bicomplex: Bicomplex,
}

impl HochschildData {
    /// Columns `0..=p_max`; `p_max` may not exceed the stored arities.
    pub fn new(host: Arc<MultiplicativeOperad>, p_max: usize) -> Result<Self> {
        if p_max > host.operad.arity_max() {
            return Err(Error::WindowNotCertified(format!(
                "p_max = {p_max} exceeds the stored arities (up to {})",
                host.operad.arity_max()
            )));
        }
        let full = cosimplicial_of(&host)?;
        let cosimplicial = full.restricted(p_max);
        let normalized = normalized(&cosimplicial)?;
        let bicomplex = normalized.bicomplex()?;
        Ok(HochschildData { host, cosimplicial, normalized, bicomplex })
    }

    pub fn cohomology(&self, t_min: isize, t_max: isize) -> Result<HochschildCohomology> {
        let b = &self.bicomplex;
        let mut rows = Vec::new();
        let mut representatives = Vec::new();
        for t in t_min..=t_max {
            let h = b.total_homology(t);
            rows.push(HochschildRow { t, dim: h.dim(), certified: hh_certified(b, t) });
            let cells = b.total_cells(t);
            let reps = h
                .representatives
                .iter()
                .map(|v| {
                    let mut parts = BTreeMap::new();
                    for c in &cells {
                        let n = b.dim(c.p, c.q);
                        let col = self.normalized.columns[c.p].offset(c.q);
                        let mut coords = zero_vector(self.normalized.columns[c.p].total_dim());
                        coords[col..col + n].clone_from_slice(&v[c.offset..c.offset + n]);
                        let x = self.normalized.inclusions[c.p].apply(&coords);
                        if !is_zero_vector(&x) {
                            parts.insert(c.p, x);
                        }
                    }
                    HochschildCochain { host: self.host.clone(), t, parts }
                })
                .collect();
            representatives.push(reps);
        }
        Ok(HochschildCohomology { host: self.host.clone(), rows, representatives, p_max: b.p_max() })
    }

    /// Class of a total-degree-`t` cocycle in the normalized total complex,
    /// in the basis of representatives, or `None` if it is not a normalized
    /// cocycle.
    pub fn class_of(&self, x: &HochschildCochain) -> Option<Vector> {
        let b = &self.bicomplex;
        let cells = b.total_cells(x.t);
        let mut v = zero_vector(b.total_dim(x.t));
        for c in &cells {
            let Some(part) = x.parts.get(&c.p) else { continue };
            let coords = self.normalized.coordinates(c.p, part)?;
            let off = self.normalized.columns[c.p].offset(c.q);
            let n = b.dim(c.p, c.q);
            v[c.offset..c.offset + n].clone_from_slice(&coords[off..off + n]);
        }
        if x.parts.keys().any(|&p| p > b.p_max()) {
            return None;
        }
        b.total_homology(x.t).class_coordinates(&v)
    }
}

impl CosimplicialComplex {
    /// Columns `0..=p_max` only.
    pub fn restricted(&self, p_max: usize) -> Self {
        let p_max = p_max.min(self.p_max());
        CosimplicialComplex {
            columns: self.columns[..=p_max].to_vec(),
            cofaces: self.cofaces[..p_max].to_vec(),
            codegeneracies: self.codegeneracies[..=p_max].to_vec(),
        }
    }
}

/// A cochain of total degree `t`: one vector of `X^p` per column, supported
/// in internal degree `t + p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildCochain {
    host: Arc<MultiplicativeOperad>,
    t: isize,
    parts: BTreeMap<usize, Vector>,
}

fn same_host(a: &Arc<MultiplicativeOperad>, b: &Arc<MultiplicativeOperad>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::HostMismatch)
    }
}

impl HochschildCochain {
    pub fn zero(host: Arc<MultiplicativeOperad>, t: isize) -> Self {
        HochschildCochain { host, t, parts: BTreeMap::new() }
    }

    /// The cochain `v ∈ X^p` of internal degree `q`.
    pub fn homogeneous(host: Arc<MultiplicativeOperad>, p: usize, q: usize, v: Vector) -> Result<Self> {
        let o = &host.operad;
        if p > o.arity_max() || v.len() != o.dim(p) {
            return Err(Error::DimensionMismatch(format!("not a vector of X^{p}")));
        }
        let c = o.component(p);
        if v.iter().enumerate().any(|(i, a)| !a.is_zero() && c.degree_of(i) != q) {
            return Err(Error::DegreeMismatch { expected: q, found: v.iter().position(|a| !a.is_zero()).map_or(q, |i| c.degree_of(i)) });
        }
        let mut parts = BTreeMap::new();
        if !is_zero_vector(&v) {
            parts.insert(p, v);
        }
        Ok(HochschildCochain { host, t: q as isize - p as isize, parts })
    }

    pub fn host(&self) -> &Arc<MultiplicativeOperad> {
        &self.host
    }

    pub fn total_degree(&self) -> isize {
        self.t
    }

    pub fn parts(&self) -> &BTreeMap<usize, Vector> {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    fn q(&self, p: usize) -> usize {
        (self.t + p as isize) as usize
    }

    fn operad(&self) -> &FinOperad {
        &self.host.operad
    }

    fn add_part(&mut self, p: usize, v: &[Rational], a: &Rational) {
        let n = self.operad().dim(p);
        let e = self.parts.entry(p).or_insert_with(|| zero_vector(n));
        crate::exactla::axpy(a, v, e);
        if is_zero_vector(e) {
            self.parts.remove(&p);
        }
    }

    pub fn add(&self, other: &HochschildCochain) -> Result<Self> {
        self.combine(other, &Rational::from_integer(1.into()))
    }

    pub fn sub(&self, other: &HochschildCochain) -> Result<Self> {
        self.combine(other, &Rational::from_integer((-1).into()))
    }

    /// `self + a * other`.
    pub fn combine(&self, other: &HochschildCochain, a: &Rational) -> Result<Self> {
        same_host(&self.host, &other.host)?;
        if self.t != other.t && !other.is_zero() && !self.is_zero() {
            return Err(Error::DegreeMismatch { expected: self.t.unsigned_abs(), found: other.t.unsigned_abs() });
        }
        let mut out = if self.is_zero() { HochschildCochain { t: other.t, ..self.clone() } } else { self.clone() };
        for (&p, v) in &other.parts {
            out.add_part(p, v, a);
        }
        Ok(out)
    }

    pub fn scale(&self, a: &Rational) -> Self {
        let mut out = HochschildCochain::zero(self.host.clone(), self.t);
        for (&p, v) in &self.parts {
            out.add_part(p, v, a);
        }
        out
    }

    /// `D = (-1)^p d + δ`; the part leaving the top stored arity is dropped.
    pub fn differential(&self) -> Self {
        let o = self.operad();
        let m = &self.host;
        let mut out = HochschildCochain::zero(self.host.clone(), self.t - 1);
        for (&p, v) in &self.parts {
            out.add_part(p, &o.differential(p, v), &sign(p));
            if p < o.arity_max() {
                let mut dv = o.compose(2, 2, p, &m.mu, v);
                for i in 1..=p {
                    crate::exactla::axpy(&sign(i), &o.compose(p, i, 2, v, &m.mu), &mut dv);
                }
                crate::exactla::axpy(&sign(p + 1), &o.compose(2, 1, p, &m.mu, v), &mut dv);
                out.add_part(p + 1, &dv, &Rational::from_integer(1.into()));
            }
        }
        out
    }

    /// Every part is killed by all codegeneracies.
    pub fn is_normalized(&self) -> bool {
        let o = self.operad();
        self.parts.iter().all(|(&p, v)| (1..=p).all(|i| is_zero_vector(&o.compose(p, i, 0, v, &self.host.basepoint))))
    }
}

/// `x ⌣ y = (-1)^{p_y q_x} (μ ∘_1 x) ∘_{p_x+1} y`.
pub fn cup(x: &HochschildCochain, y: &HochschildCochain) -> Result<HochschildCochain> {
    same_host(&x.host, &y.host)?;
    let o = x.operad();
    let mu = &x.host.mu;
    let mut out = HochschildCochain::zero(x.host.clone(), x.t + y.t);
    for (&px, vx) in &x.parts {
        for (&py, vy) in &y.parts {
            if px + py > o.arity_max() {
                continue;
            }
            let r = insert_all(o, mu, 2, &[(1, px, x.q(px), vx), (2, py, y.q(py), vy)]);
            out.add_part(px + py, &r, &sign(py * x.q(px)));
        }
    }
    Ok(out)
}

/// `(…(base ∘_{i_1} y_1) …) ∘_{i_k'} y_k` with the `y`s placed in the slots
/// `i_1 < … < i_k` of `base`. Arity-zero pieces go in first so that no
/// intermediate composite exceeds the arity of the result; the reordering
/// costs the Koszul sign of the internal degrees.
fn insert_all(o: &FinOperad, base: &[Rational], p_base: usize, items: &[(usize, usize, usize, &Vector)]) -> Vector {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&j| items[j].1);
    let mut koszul = 0;
    for (a, &ja) in order.iter().enumerate() {
        for &jb in &order[a + 1..] {
            if jb < ja {
                koszul += items[ja].2 * items[jb].2;
            }
        }
    }
    let mut cur = base.to_vec();
    let mut pc = p_base;
    for (n, &j) in order.iter().enumerate() {
        let (slot, p, _, v) = items[j];
        let before: isize = order[..n].iter().filter(|&&l| items[l].0 < slot).map(|&l| items[l].1 as isize - 1).sum();
        let pos = (slot as isize + before) as usize;
        cur = o.compose(pc, pos, p, &cur, v);
        pc = pc + p - 1;
    }
    if koszul % 2 == 1 {
        cur.iter_mut().for_each(|a| *a = -a.clone());
    }
    cur
}

/// Exponent of the sign of `x ∘_i y` inside `x ∘ y`, for `x ∈ X^{p_x}_{q_x}`
/// and `y ∈ X^{p_y}`. Fixed by the homotopy-commutativity and pre-Lie
/// identities on Poisson operads with odd and even brackets.
fn insertion_sign(px: usize, qx: usize, py: usize, _qy: usize, i: usize) -> usize {
    (py + 1) * (i + px + qx)
}

/// `x{y_1, ..., y_k}`: the `y`s inserted into distinct inputs of `x`, in
/// order.
pub fn brace(x: &HochschildCochain, ys: &[HochschildCochain]) -> Result<HochschildCochain> {
    brace_signed(x, ys, &insertion_sign)
}

type SignFn = dyn Fn(usize, usize, usize, usize, usize) -> usize;

fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for last in k..=n {
        for mut t in increasing_tuples(last - 1, k - 1) {
            t.push(last);
            out.push(t);
        }
    }
    out
}

fn brace_signed(x: &HochschildCochain, ys: &[HochschildCochain], sgn: &SignFn) -> Result<HochschildCochain> {
    for y in ys {
        same_host(&x.host, &y.host)?;
    }
    let o = x.operad();
    let k = ys.len();
    let t = x.t + ys.iter().map(|y| y.t + 1).sum::<isize>();
    let mut out = HochschildCochain::zero(x.host.clone(), t);
    // one part from each y
    let mut choices: Vec<Vec<(usize, &Vector)>> = vec![Vec::new()];
    for y in ys {
        choices = choices
            .iter()
            .flat_map(|c| {
                y.parts.iter().map(move |(&p, v)| {
                    let mut c2 = c.clone();
                    c2.push((p, v));
                    c2
                })
            })
            .collect();
    }
    for (&px, vx) in &x.parts {
        for choice in &choices {
            let total = px + choice.iter().map(|(p, _)| p).sum::<usize>();
            if total < k || total - k > o.arity_max() {
                continue;
            }
            for positions in increasing_tuples(px, k) {
                let (mut pc, mut qc, mut shift, mut s) = (px, x.q(px), 0isize, 0);
                let mut items = Vec::new();
                for (j, &(py, vy)) in choice.iter().enumerate() {
                    let qy = ys[j].q(py);
                    let pos = (positions[j] as isize + shift) as usize;
                    s += sgn(pc, qc, py, qy, pos);
                    shift += py as isize - 1;
                    pc = pc + py - 1;
                    qc += qy;
                    items.push((positions[j], py, qy, vy));
                }
                out.add_part(total - k, &insert_all(o, vx, px, &items), &sign(s));
            }
        }
    }
    Ok(out)
}

/// `x ∘ y = x{y}`.
pub fn circle(x: &HochschildCochain, y: &HochschildCochain) -> Result<HochschildCochain> {
    brace(x, std::slice::from_ref(y))
}

/// `[x, y] = x ∘ y - (-1)^{(t_x+1)(t_y+1)} y ∘ x`.
pub fn bracket(x: &HochschildCochain, y: &HochschildCochain) -> Result<HochschildCochain> {
    let a = circle(x, y)?;
    let b = circle(y, x)?;
    let e = ((x.t + 1) * (y.t + 1)).rem_euclid(2) as usize;
    a.combine(&b, &-sign(e))
}

/// Per-column chain maps between two cosimplicial complexes.
#[derive(Clone, Debug)]
pub struct CosimplicialMap {
    pub source: CosimplicialComplex,
    pub target: CosimplicialComplex,
    pub maps: Vec<ChainMap>,
}

impl CosimplicialMap {
    /// Checks that the maps commute with all cofaces and codegeneracies.
    pub fn new(source: CosimplicialComplex, target: CosimplicialComplex, maps: Vec<ChainMap>) -> Result<Self> {
        let bad = |s: String| Err(Error::NotCosimplicialMap(s));
        if source.p_max() != target.p_max() || maps.len() != source.p_max() + 1 {
            return bad("columns do not match".into());
        }
        let flat: Vec<RationalMatrix> = maps.iter().map(flat_map).collect();
        for p in 0..=source.p_max() {
            if flat[p].cols() != source.column(p).total_dim() || flat[p].rows() != target.column(p).total_dim() {
                return bad(format!("column {p} map has the wrong shape"));
            }
        }
        for p in 0..source.p_max() {
            for i in 0..=p + 1 {
                if flat[p + 1].mul(source.coface(p, i)) != target.coface(p, i).mul(&flat[p]) {
                    return bad(format!("does not commute with d^{i} on column {p}"));
                }
            }
        }
        for p in 1..=source.p_max() {
            for i in 0..p {
                if flat[p - 1].mul(source.codegeneracy(p, i)) != target.codegeneracy(p, i).mul(&flat[p]) {
                    return bad(format!("does not commute with s^{i} on column {p}"));
                }
            }
        }
        Ok(CosimplicialMap { source, target, maps })
    }

    /// The map induced by a morphism of multiplicative operads.
    pub fn from_morphism(f: &OperadMorphism, source: CosimplicialComplex, target: CosimplicialComplex) -> Result<Self> {
        let maps = (0..=source.p_max()).map(|p| f.map(p).clone()).collect();
        CosimplicialMap::new(source, target, maps)
    }

    /// Column `p` is a quasi-isomorphism, for every `p`.
    pub fn check_column_quasi_isos(&self) -> Result<()> {
        for (p, m) in self.maps.iter().enumerate() {
            let top = m.source().max_degree().max(m.target().max_degree());
            let cert = m.is_quasi_iso(Some(top))?;
            if let Some(k) = cert.first_failure() {
                return Err(Error::ColumnNotQuasiIso { column: p, degree: k });
            }
        }
        Ok(())
    }

    /// Checks the columns and compares the `E_2` pages of the normalized
    /// bicomplexes.
    pub fn compare_e2(&self) -> Result<E2Comparison> {
        self.check_column_quasi_isos()?;
        self.normalized_map()?.compare_e2()
    }

    /// The induced map of normalized bicomplexes.
    pub fn normalized_map(&self) -> Result<BicomplexMap> {
        let (ns, nt) = (normalized(&self.source)?, normalized(&self.target)?);
        let (bs, bt) = (ns.bicomplex()?, nt.bicomplex()?);
        let q_max = bs.q_max().max(bt.q_max());
        let (bs, bt) = (pad_bicomplex(&ns, q_max)?, pad_bicomplex(&nt, q_max)?);
        let mut maps = Vec::new();
        for (p, m) in self.maps.iter().enumerate() {
            let f = flat_map(m).mul(&ns.inclusions[p]);
            let cols: Option<Vec<Vector>> = f.columns().iter().map(|v| nt.coordinates(p, v)).collect();
            let g = RationalMatrix::from_columns(
                &cols.ok_or_else(|| Error::NotCosimplicialMap("image leaves the normalized part".into()))?,
                nt.inclusions[p].cols(),
            );
            let (cs, ct) = (&ns.columns[p], &nt.columns[p]);
            maps.push(
                (0..=q_max)
                    .map(|q| {
                        if cs.dim(q) == 0 || ct.dim(q) == 0 {
                            RationalMatrix::zeros(ct.dim(q), cs.dim(q))
                        } else {
                            g.block(ct.offset(q), cs.offset(q), ct.dim(q), cs.dim(q))
                        }
                    })
                    .collect(),
            );
        }
        BicomplexMap::new(bs, bt, maps)
    }
}

fn pad_bicomplex(n: &NormalizedComplex, q_max: usize) -> Result<Bicomplex> {
    let cols: Vec<FinChainComplex> = n.columns.iter().map(|c| c.padded(q_max)).collect();
    let hs: Vec<RationalMatrix> = n
        .coboundaries
        .iter()
        .enumerate()
        .map(|(p, h)| {
            let mut m = RationalMatrix::zeros(cols[p + 1].total_dim(), cols[p].total_dim());
            m.put_block(0, 0, h);
            m
        })
        .collect();
    Bicomplex::from_columns(&cols, &hs)
}

fn flat_map(m: &ChainMap) -> RationalMatrix {
    let (s, t) = (m.source(), m.target());
    let mut f = RationalMatrix::zeros(t.total_dim(), s.total_dim());
    for k in 0..=s.max_degree() {
        if t.dim(k) > 0 && s.dim(k) > 0 {
            f.put_block(t.offset(k), s.offset(k), &m.component(k));
        }
    }
    f
}

/// HH of `o` against HH of its homology operad on a common window.
#[derive(Clone, Debug)]
pub struct HomologyComparison {
    pub operad: HochschildCohomology,
    pub homology: HochschildCohomology,
}

impl HomologyComparison {
    /// Total degrees certified on both sides, with both dimensions.
    pub fn certified_rows(&self) -> Vec<(isize, usize, usize)> {
        self.operad
            .rows
            .iter()
            .zip(&self.homology.rows)
            .filter(|(a, b)| a.certified && b.certified)
            .map(|(a, b)| (a.t, a.dim, b.dim))
            .collect()
    }

    pub fn equal_on_certified(&self) -> bool {
        self.certified_rows().iter().all(|(_, a, b)| a == b)
    }

    /// Equal dimensions in every degree of the truncated complexes.
    pub fn equal_truncated(&self) -> bool {
        self.operad.rows.iter().zip(&self.homology.rows).all(|(a, b)| a.dim == b.dim)
    }
}

pub fn hochschild_of_homology_comparison(
    o: &MultiplicativeOperad,
    t_min: isize,
    t_max: isize,
    p_max: usize,
) -> Result<HomologyComparison> {
    let h = crate::operad::homology_operad(&o.operad).multiplicative(o)?;
    Ok(HomologyComparison {
        operad: hochschild_cohomology(o, t_min, t_max, p_max)?,
        homology: hochschild_cohomology(&h, t_min, t_max, p_max)?,
    })
}
