//! Spectral sequence of a bicomplex filtered by columns.
//!
//! Cells `C^{p,q}` with `0 <= p <= p_max`, `0 <= q <= q_max`, a horizontal
//! `δ: (p,q) -> (p+1,q)` and a vertical `d: (p,q) -> (p,q-1)` that commute.
//! The total complex in degree `t = q - p` carries `D = (-1)^p d + δ`, which
//! lowers `t` by one. `d_r` goes from `(p,q)` to `(p+r, q+r-1)`.

use std::fmt;

use crate::chain::FinChainComplex;
use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, rank, sign, subquotient, EchelonBasis, RationalMatrix, SubquotientBasis, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bicomplex {
    dims: Vec<Vec<usize>>,
    vertical: Vec<Vec<RationalMatrix>>,
    horizontal: Vec<Vec<RationalMatrix>>,
}

/// A cell of a total complex: column, internal degree and offset in the
/// concatenated basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TotalCell {
    pub p: usize,
    pub q: usize,
    pub offset: usize,
}

impl Bicomplex {
    /// `vertical[p][q]` is `d: (p,q) -> (p,q-1)` (ignored for `q = 0`),
    /// `horizontal[p][q]` is `δ: (p,q) -> (p+1,q)` for `p < p_max`.
    pub fn new(
        dims: Vec<Vec<usize>>,
        vertical: Vec<Vec<RationalMatrix>>,
        horizontal: Vec<Vec<RationalMatrix>>,
    ) -> Result<Self> {
        let bad = |s: String| Err(Error::InvariantViolation(s));
        let cols = dims.len();
        if cols == 0 || dims.iter().any(|c| c.len() != dims[0].len()) || dims[0].is_empty() {
            return bad("cells must form a non-empty rectangle".into());
        }
        let qn = dims[0].len();
        if vertical.len() != cols || horizontal.len() + 1 != cols {
            return bad("one vertical map per column and one horizontal map per gap".into());
        }
        for p in 0..cols {
            if vertical[p].len() != qn {
                return bad(format!("column {p} needs {qn} vertical maps"));
            }
            for q in 1..qn {
                let v = &vertical[p][q];
                if v.rows() != dims[p][q - 1] || v.cols() != dims[p][q] {
                    return bad(format!("vertical map at ({p},{q}) has the wrong shape"));
                }
            }
            if p + 1 < cols {
                if horizontal[p].len() != qn {
                    return bad(format!("column {p} needs {qn} horizontal maps"));
                }
                for q in 0..qn {
                    let h = &horizontal[p][q];
                    if h.rows() != dims[p + 1][q] || h.cols() != dims[p][q] {
                        return bad(format!("horizontal map at ({p},{q}) has the wrong shape"));
                    }
                }
            }
        }
        let b = Bicomplex { dims, vertical, horizontal };
        for p in 0..cols {
            for q in 0..qn {
                if q >= 2 && !b.v(p, q - 1).mul(&b.v(p, q)).is_zero() {
                    return bad(format!("d^2 != 0 at ({p},{q})"));
                }
                if p + 2 < cols && !b.h(p + 1, q).mul(&b.h(p, q)).is_zero() {
                    return bad(format!("δ^2 != 0 at ({p},{q})"));
                }
                if q >= 1 && p + 1 < cols && b.h(p, q - 1).mul(&b.v(p, q)) != b.v(p + 1, q).mul(&b.h(p, q)) {
                    return bad(format!("δd != dδ at ({p},{q})"));
                }
            }
        }
        Ok(b)
    }

    /// Columns given as complexes, horizontal maps as flat matrices between
    /// consecutive columns. Degrees above the common top are dropped.
    pub fn from_columns(columns: &[FinChainComplex], horizontal: &[RationalMatrix]) -> Result<Self> {
        let q_max = columns.iter().map(FinChainComplex::max_degree).max().unwrap_or(0);
        let cols: Vec<FinChainComplex> = columns.iter().map(|c| c.padded(q_max)).collect();
        let dims = cols.iter().map(|c| c.dims().to_vec()).collect();
        let vertical = cols.iter().map(|c| (0..=q_max).map(|q| c.d(q)).collect()).collect();
        let mut hs = Vec::new();
        for (p, h) in horizontal.iter().enumerate() {
            let (s, t) = (&cols[p], &cols[p + 1]);
            if h.rows() != t.total_dim() || h.cols() != s.total_dim() {
                return Err(Error::InvariantViolation(format!("horizontal map {p} has the wrong shape")));
            }
            let mut per = Vec::new();
            for q in 0..=q_max {
                let blk = h.block(t.offset(q), s.offset(q), t.dim(q), s.dim(q));
                // must preserve the internal degree
                let whole = h.block(0, s.offset(q), t.total_dim(), s.dim(q));
                if whole.nnz() != blk.nnz() {
                    return Err(Error::InvariantViolation(format!("horizontal map {p} changes degree {q}")));
                }
                per.push(blk);
            }
            hs.push(per);
        }
        Bicomplex::new(dims, vertical, hs)
    }

    pub fn p_max(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn q_max(&self) -> usize {
        self.dims[0].len() - 1
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(p).and_then(|c| c.get(q)).copied().unwrap_or(0)
    }

    fn v(&self, p: usize, q: usize) -> RationalMatrix {
        if q == 0 || q > self.q_max() {
            RationalMatrix::zeros(if q == 0 { 0 } else { self.dim(p, q - 1) }, self.dim(p, q))
        } else {
            self.vertical[p][q].clone()
        }
    }

    fn h(&self, p: usize, q: usize) -> RationalMatrix {
        if p >= self.p_max() {
            RationalMatrix::zeros(self.dim(p + 1, q), self.dim(p, q))
        } else {
            self.horizontal[p][q].clone()
        }
    }

    pub fn vertical(&self, p: usize, q: usize) -> RationalMatrix {
        self.v(p, q)
    }

    pub fn horizontal(&self, p: usize, q: usize) -> RationalMatrix {
        self.h(p, q)
    }

    /// Cells of total degree `t`, ordered by column.
    pub fn total_cells(&self, t: isize) -> Vec<TotalCell> {
        let mut out = Vec::new();
        let mut offset = 0;
        for p in 0..=self.p_max() {
            let q = p as isize + t;
            if q < 0 || q as usize > self.q_max() {
                continue;
            }
            let q = q as usize;
            out.push(TotalCell { p, q, offset });
            offset += self.dim(p, q);
        }
        out
    }

    pub fn total_dim(&self, t: isize) -> usize {
        self.total_cells(t).iter().map(|c| self.dim(c.p, c.q)).sum()
    }

    /// `D` restricted to the listed source cells and projected to the listed
    /// target cells, both as `(p, q)` lists.
    pub fn d_between(&self, src: &[(usize, usize)], dst: &[(usize, usize)]) -> RationalMatrix {
        let off = |cells: &[(usize, usize)]| {
            let mut o = Vec::new();
            let mut acc = 0;
            for &(p, q) in cells {
                o.push(acc);
                acc += self.dim(p, q);
            }
            (o, acc)
        };
        let (so, sn) = off(src);
        let (to, tn) = off(dst);
        let mut m = RationalMatrix::zeros(tn, sn);
        for (a, &(p, q)) in src.iter().enumerate() {
            for (b, &(p2, q2)) in dst.iter().enumerate() {
                if p2 == p && q >= 1 && q2 == q - 1 {
                    m.put_block(to[b], so[a], &self.v(p, q).scale(&sign(p)));
                } else if p2 == p + 1 && q2 == q {
                    m.put_block(to[b], so[a], &self.h(p, q));
                }
            }
        }
        m
    }

    /// `D : T_t -> T_{t-1}`.
    pub fn total_differential(&self, t: isize) -> RationalMatrix {
        let pq = |c: &TotalCell| (c.p, c.q);
        let src: Vec<_> = self.total_cells(t).iter().map(pq).collect();
        let dst: Vec<_> = self.total_cells(t - 1).iter().map(pq).collect();
        self.d_between(&src, &dst)
    }

    /// `H_t` of the total complex with representative cycles.
    pub fn total_homology(&self, t: isize) -> SubquotientBasis {
        let n = self.total_dim(t);
        let cycles = kernel_basis(&self.total_differential(t));
        let dn = self.total_differential(t + 1);
        let boundaries: Vec<Vector> = dn.columns();
        subquotient(n, &cycles, &boundaries).expect("D^2 = 0")
    }

    pub fn total_homology_dim(&self, t: isize) -> usize {
        let n = self.total_dim(t);
        n - rank(&self.total_differential(t)) - rank(&self.total_differential(t + 1))
    }

    /// Smallest and largest total degree with a cell.
    pub fn total_range(&self) -> (isize, isize) {
        (-(self.p_max() as isize), self.q_max() as isize)
    }

    fn cells_on_line(&self, p: isize, q: isize, js: std::ops::RangeInclusive<isize>) -> Vec<(usize, usize)> {
        js.filter_map(|j| {
            let (a, b) = (p + j, q + j);
            (a >= 0 && b >= 0 && a as usize <= self.p_max() && b as usize <= self.q_max())
                .then_some((a as usize, b as usize))
        })
        .collect()
    }

    /// Data of `E_r^{p,q}` relative to the window `W` of columns
    /// `p..p+r-1` on the line through `(p,q)`.
    fn page_data(&self, p: usize, q: usize, r: usize) -> PageData {
        let (pi, qi, ri) = (p as isize, q as isize, r as isize);
        let w = self.cells_on_line(pi, qi, 0..=ri - 1);
        let wn: usize = w.iter().map(|&(a, b)| self.dim(a, b)).sum();
        let target = |js: std::ops::RangeInclusive<isize>| self.cells_on_line(pi, qi - 1, js);
        // Z_r: x in W with D x vanishing in columns p..p+r-1
        let z = kernel_basis(&self.d_between(&w, &target(0..=ri - 1)));
        // Z_{r-1}^{p+1}, embedded in W
        let w1: Vec<_> = w.iter().copied().filter(|&(a, _)| a > p).collect();
        let lead = wn - w1.iter().map(|&(a, b)| self.dim(a, b)).sum::<usize>();
        let z1: Vec<Vector> = kernel_basis(&self.d_between(&w1, &target(1..=ri - 1)))
            .into_iter()
            .map(|v| {
                let mut full = crate::exactla::zero_vector(lead);
                full.extend(v);
                full
            })
            .collect();
        // D Z_{r-1}^{p-r+1}, projected to W
        let u = self.cells_on_line(pi, qi + 1, -(ri - 1)..=ri - 1);
        let early = self.cells_on_line(pi, qi, -(ri - 1)..=-1);
        let ky = kernel_basis(&self.d_between(&u, &early));
        let du = self.d_between(&u, &w);
        let b: Vec<Vector> = ky.iter().map(|y| du.apply(y)).collect();
        // Z_{r+1} projected to W
        let wext = self.cells_on_line(pi, qi, 0..=ri);
        let kext = kernel_basis(&self.d_between(&wext, &target(0..=ri)));
        let znext: Vec<Vector> = kext.into_iter().map(|v| v[..wn].to_vec()).collect();
        PageData { ambient: wn, z, z1, b, znext }
    }

    /// `dim E_r^{p,q}` and the rank of `d_r` leaving the cell.
    fn page_cell(&self, p: usize, q: usize, r: usize) -> (usize, usize) {
        let d = self.page_data(p, q, r);
        let mut den = EchelonBasis::new(d.ambient);
        for v in d.z1.iter().chain(&d.b) {
            den.insert(v);
        }
        let zdim = EchelonBasis::from_vectors(d.ambient, &d.z).dim();
        let e = zdim - den.dim();
        let mut ker = den.clone();
        for v in &d.znext {
            ker.insert(v);
        }
        (e, e - (ker.dim() - den.dim()))
    }

    /// Whether `d_r` out of and into `(p,q)` stays inside the stored cells.
    pub fn certified(&self, p: usize, q: usize, r: usize) -> bool {
        p + r <= self.p_max() && q + r <= self.q_max() + 1
    }

    /// The page `E_r`.
    pub fn page(&self, r: usize) -> Result<PageTable> {
        if r == 0 {
            return Err(Error::InvalidParameter("pages start at r = 1".into()));
        }
        let mut cells = Vec::new();
        let mut out_rank = vec![vec![0; self.q_max() + 1]; self.p_max() + 1];
        for p in 0..=self.p_max() {
            for q in 0..=self.q_max() {
                let (dim, ro) = self.page_cell(p, q, r);
                out_rank[p][q] = ro;
                cells.push(PageCell { p, q, dim, rank_out: ro, rank_in: 0, certified: self.certified(p, q, r) });
            }
        }
        for c in cells.iter_mut() {
            if c.p >= r && c.q + 1 >= r {
                c.rank_in = out_rank[c.p - r][c.q + 1 - r];
            }
        }
        Ok(PageTable { r, p_max: self.p_max(), q_max: self.q_max(), cells })
    }

    /// A page index past which nothing changes.
    pub fn infinity_page(&self) -> usize {
        self.p_max() + 2
    }
}

struct PageData {
    ambient: usize,
    z: Vec<Vector>,
    z1: Vec<Vector>,
    b: Vec<Vector>,
    znext: Vec<Vector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageCell {
    pub p: usize,
    pub q: usize,
    pub dim: usize,
    pub rank_out: usize,
    pub rank_in: usize,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageTable {
    pub r: usize,
    pub p_max: usize,
    pub q_max: usize,
    pub cells: Vec<PageCell>,
}

impl PageTable {
    pub fn cell(&self, p: usize, q: usize) -> &PageCell {
        &self.cells[p * (self.q_max + 1) + q]
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.cell(p, q).dim
    }

    /// `sum (-1)^{q-p} dim E_r^{p,q}` over all cells.
    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().map(|c| if (c.p + c.q) % 2 == 0 { c.dim as i64 } else { -(c.dim as i64) }).sum()
    }

    /// Sum of dimensions on the line `q - p = t`.
    pub fn total(&self, t: isize) -> usize {
        self.cells.iter().filter(|c| c.q as isize - c.p as isize == t).map(|c| c.dim).sum()
    }

    /// Tab-separated rows `r p q dim certified`.
    pub fn tsv(&self) -> String {
        let mut s = String::new();
        for c in &self.cells {
            s.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", self.r, c.p, c.q, c.dim, c.certified));
        }
        s
    }
}

impl fmt::Display for PageTable {
    /// Grid with `p` across and `q` down; uncertified cells get a `?`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "E_{}", self.r)?;
        let entries: Vec<String> =
            self.cells.iter().map(|c| format!("{}{}", c.dim, if c.certified { "" } else { "?" })).collect();
        let w = entries.iter().map(String::len).max().unwrap_or(1).max(self.p_max.to_string().len());
        let lw = self.q_max.to_string().len().max(3);
        write!(f, "{:>lw$}", "q\\p")?;
        for p in 0..=self.p_max {
            write!(f, " {p:>w$}")?;
        }
        writeln!(f)?;
        for q in 0..=self.q_max {
            write!(f, "{q:>lw$}")?;
            for p in 0..=self.p_max {
                write!(f, " {:>w$}", entries[p * (self.q_max + 1) + q])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Pages `E_1 ..= E_{r_max}`.
pub fn pages(b: &Bicomplex, r_max: usize) -> Result<Vec<PageTable>> {
    (1..=r_max).map(|r| b.page(r)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseReport {
    /// First page with a nonzero certified differential, if any, with its
    /// source cell.
    pub first_nonzero: Option<(usize, usize, usize)>,
    /// Per cell `(p, q, first r from which the dimension is stable)`, for
    /// cells certified at that page.
    pub stable_from: Vec<(usize, usize, usize)>,
    pub euler: Vec<i64>,
    pub pages: Vec<PageTable>,
    pub infinity: PageTable,
}

impl CollapseReport {
    /// All certified `d_r` with `r >= 2` vanish.
    pub fn collapses_at_e2(&self) -> bool {
        self.first_nonzero.is_none_or(|(r, _, _)| r < 2)
    }

    pub fn verdict(&self) -> String {
        match self.first_nonzero {
            Some((r, p, q)) if r >= 2 => format!("does not collapse; first nonzero differential on page {r} at ({p},{q})"),
            _ => "collapses at E2".to_string(),
        }
    }
}

/// Pages up to `r_max` (at least 2) and the collapse verdict.
pub fn collapse_report(b: &Bicomplex, r_max: usize) -> Result<CollapseReport> {
    let r_inf = b.infinity_page().max(r_max);
    let all = pages(b, r_inf)?;
    let mut first_nonzero = None;
    'outer: for pg in &all[1..r_max.max(2).min(all.len())] {
        for c in &pg.cells {
            if c.certified && c.rank_out > 0 {
                first_nonzero = Some((pg.r, c.p, c.q));
                break 'outer;
            }
        }
    }
    let mut stable_from = Vec::new();
    for p in 0..=b.p_max() {
        for q in 0..=b.q_max() {
            let dims: Vec<usize> = all.iter().map(|pg| pg.dim(p, q)).collect();
            let last = *dims.last().expect("at least one page");
            let r = dims.iter().rposition(|&d| d != last).map_or(1, |i| i + 2);
            if b.certified(p, q, r) {
                stable_from.push((p, q, r));
            }
        }
    }
    let euler = all.iter().map(PageTable::euler_characteristic).collect();
    let infinity = all.last().expect("pages").clone();
    Ok(CollapseReport { first_nonzero, stable_from, euler, pages: all[..r_max].to_vec(), infinity })
}

/// Per-column chain maps between two bicomplexes of the same shape.
#[derive(Clone, Debug)]
pub struct BicomplexMap {
    pub source: Bicomplex,
    pub target: Bicomplex,
    /// `maps[p][q] : source(p,q) -> target(p,q)`.
    pub maps: Vec<Vec<RationalMatrix>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Cell {
    pub p: usize,
    pub q: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub induced_rank: usize,
    pub certified: bool,
}

impl E2Cell {
    pub fn is_iso(&self) -> bool {
        self.source_dim == self.target_dim && self.induced_rank == self.source_dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Comparison {
    pub cells: Vec<E2Cell>,
}

impl E2Comparison {
    pub fn iso_on_certified(&self) -> bool {
        self.cells.iter().filter(|c| c.certified).all(E2Cell::is_iso)
    }
}

impl BicomplexMap {
    /// Checks shape and that each component commutes with `d` and `δ`.
    pub fn new(source: Bicomplex, target: Bicomplex, maps: Vec<Vec<RationalMatrix>>) -> Result<Self> {
        let bad = |s: String| Err(Error::NotCosimplicialMap(s));
        if source.p_max() != target.p_max() || source.q_max() != target.q_max() {
            return bad("bicomplexes of different shapes".into());
        }
        for p in 0..=source.p_max() {
            for q in 0..=source.q_max() {
                let f = &maps[p][q];
                if f.rows() != target.dim(p, q) || f.cols() != source.dim(p, q) {
                    return bad(format!("component ({p},{q}) has the wrong shape"));
                }
                if q >= 1 && target.v(p, q).mul(f) != maps[p][q - 1].mul(&source.v(p, q)) {
                    return bad(format!("not a chain map at ({p},{q})"));
                }
                if p < source.p_max() && target.h(p, q).mul(f) != maps[p + 1][q].mul(&source.h(p, q)) {
                    return bad(format!("does not commute with δ at ({p},{q})"));
                }
            }
        }
        Ok(BicomplexMap { source, target, maps })
    }

    fn on_line(&self, cells: &[(usize, usize)]) -> RationalMatrix {
        let sn: usize = cells.iter().map(|&(p, q)| self.source.dim(p, q)).sum();
        let tn: usize = cells.iter().map(|&(p, q)| self.target.dim(p, q)).sum();
        let mut m = RationalMatrix::zeros(tn, sn);
        let (mut so, mut to) = (0, 0);
        for &(p, q) in cells {
            m.put_block(to, so, &self.maps[p][q]);
            so += self.source.dim(p, q);
            to += self.target.dim(p, q);
        }
        m
    }

    /// Column-wise homology isomorphism, else the first `(p, q)` where it
    /// fails.
    pub fn column_quasi_iso(&self) -> Result<()> {
        for p in 0..=self.source.p_max() {
            let (e1s, e1t) = (self.source.page(1)?, self.target.page(1)?);
            for q in 0..=self.source.q_max() {
                let (ds, dt) = (e1s.dim(p, q), e1t.dim(p, q));
                let r = self.induced_rank(p, q, 1);
                if ds != dt || r != ds {
                    return Err(Error::ColumnNotQuasiIso { column: p, degree: q });
                }
            }
        }
        Ok(())
    }

    /// Rank of the map induced on `E_r^{p,q}`.
    pub fn induced_rank(&self, p: usize, q: usize, r: usize) -> usize {
        let (s, t) = (self.source.page_data(p, q, r), self.target.page_data(p, q, r));
        let w = self.source.cells_on_line(p as isize, q as isize, 0..=r as isize - 1);
        let f = self.on_line(&w);
        let mut den = EchelonBasis::new(t.ambient);
        for v in t.z1.iter().chain(&t.b) {
            den.insert(v);
        }
        let base = den.dim();
        for z in &s.z {
            den.insert(&f.apply(z));
        }
        den.dim() - base
    }

    /// Compare `E_2` cellwise.
    pub fn compare_e2(&self) -> Result<E2Comparison> {
        let (ps, pt) = (self.source.page(2)?, self.target.page(2)?);
        let mut cells = Vec::new();
        for p in 0..=self.source.p_max() {
            for q in 0..=self.source.q_max() {
                cells.push(E2Cell {
                    p,
                    q,
                    source_dim: ps.dim(p, q),
                    target_dim: pt.dim(p, q),
                    induced_rank: self.induced_rank(p, q, 2),
                    certified: self.source.certified(p, q, 2),
                });
            }
        }
        Ok(E2Comparison { cells })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::q;

    fn zeros(dims: &[Vec<usize>]) -> (Vec<Vec<RationalMatrix>>, Vec<Vec<RationalMatrix>>) {
        let qn = dims[0].len();
        let v = dims
            .iter()
            .map(|c| (0..qn).map(|q| RationalMatrix::zeros(if q == 0 { 0 } else { c[q - 1] }, c[q])).collect())
            .collect();
        let h = (0..dims.len() - 1)
            .map(|p| (0..qn).map(|q| RationalMatrix::zeros(dims[p + 1][q], dims[p][q])).collect())
            .collect();
        (v, h)
    }

    /// a(0,0) -δ-> b(1,0) = d c, c(1,1) -δ-> e(2,1)
    pub(crate) fn staircase() -> Bicomplex {
        let dims = vec![vec![1, 0], vec![1, 1], vec![0, 1]];
        let (mut v, mut h) = zeros(&dims);
        h[0][0] = RationalMatrix::scalar(1, &q(1));
        v[1][1] = RationalMatrix::scalar(1, &q(1));
        h[1][1] = RationalMatrix::scalar(1, &q(1));
        Bicomplex::new(dims, v, h).unwrap()
    }

    #[test]
    fn staircase_has_a_rank_one_d2() {
        let b = staircase();
        let e1 = b.page(1).unwrap();
        assert_eq!((e1.dim(0, 0), e1.dim(1, 0), e1.dim(1, 1), e1.dim(2, 1)), (1, 0, 0, 1));
        let e2 = b.page(2).unwrap();
        assert_eq!(e2.cell(0, 0).rank_out, 1);
        assert_eq!(e2.cell(2, 1).rank_in, 1);
        let e3 = b.page(3).unwrap();
        assert!(e3.cells.iter().all(|c| c.dim == 0));
        let rep = collapse_report(&b, 3).unwrap();
        assert!(!rep.collapses_at_e2());
        assert_eq!(rep.first_nonzero, Some((2, 0, 0)));
        assert_eq!(rep.verdict(), "does not collapse; first nonzero differential on page 2 at (0,0)");
        // total complex is acyclic
        for t in -2..=1 {
            assert_eq!(b.total_homology_dim(t), 0);
        }
    }

    #[test]
    fn zero_vertical_differential_collapses_at_e2() {
        // a non-trivial δ-complex in row 0 and row 1, d = 0
        let dims = vec![vec![1, 1], vec![2, 1], vec![1, 1]];
        let (v, mut h) = zeros(&dims);
        h[0][0] = RationalMatrix::from_i64(&[&[1], &[1]]);
        h[1][0] = RationalMatrix::from_i64(&[&[1, -1]]);
        h[0][1] = RationalMatrix::scalar(1, &q(1));
        let b = Bicomplex::new(dims, v, h).unwrap();
        let rep = collapse_report(&b, 4).unwrap();
        assert!(rep.collapses_at_e2());
        let e1 = b.page(1).unwrap();
        assert_eq!(e1.dim(1, 0), 2);
        let e2 = b.page(2).unwrap();
        assert_eq!((e2.dim(0, 0), e2.dim(1, 0), e2.dim(2, 0)), (0, 0, 0));
        assert_eq!((e2.dim(0, 1), e2.dim(1, 1), e2.dim(2, 1)), (0, 0, 1));
        for r in 2..=4 {
            assert_eq!(b.page(r).unwrap().cells.iter().map(|c| c.dim).collect::<Vec<_>>(),
                e2.cells.iter().map(|c| c.dim).collect::<Vec<_>>());
        }
    }

    #[test]
    fn zero_horizontal_differential_collapses_at_e1() {
        let dims = vec![vec![1, 1], vec![1, 1]];
        let (mut v, h) = zeros(&dims);
        v[0][1] = RationalMatrix::scalar(1, &q(2));
        let b = Bicomplex::new(dims, v, h).unwrap();
        let e1 = b.page(1).unwrap();
        let e2 = b.page(2).unwrap();
        assert_eq!(e1.cells.iter().map(|c| c.dim).collect::<Vec<_>>(), vec![0, 0, 1, 1]);
        assert_eq!(e2.cells.iter().map(|c| c.dim).collect::<Vec<_>>(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn page_ranks_account_for_the_next_page() {
        let b = staircase();
        for r in 1..=3 {
            let (a, n) = (b.page(r).unwrap(), b.page(r + 1).unwrap());
            for c in &a.cells {
                assert_eq!(n.dim(c.p, c.q), c.dim - c.rank_out - c.rank_in);
            }
        }
    }

    #[test]
    fn rejects_non_commuting_squares() {
        let dims = vec![vec![1, 1], vec![1, 1]];
        let (mut v, mut h) = zeros(&dims);
        v[0][1] = RationalMatrix::scalar(1, &q(1));
        h[0][0] = RationalMatrix::scalar(1, &q(1));
        assert!(matches!(Bicomplex::new(dims, v, h), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn identity_map_is_an_e2_isomorphism() {
        let b = staircase();
        let maps = (0..=b.p_max())
            .map(|p| (0..=b.q_max()).map(|q| RationalMatrix::identity(b.dim(p, q))).collect())
            .collect();
        let f = BicomplexMap::new(b.clone(), b, maps).unwrap();
        assert!(f.column_quasi_iso().is_ok());
        assert!(f.compare_e2().unwrap().cells.iter().all(E2Cell::is_iso));
    }

    #[test]
    fn euler_characteristic_is_page_independent() {
        let rep = collapse_report(&staircase(), 3).unwrap();
        assert!(rep.euler.windows(2).all(|w| w[0] == w[1]));
    }
}
