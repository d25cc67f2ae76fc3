//! Exact linear algebra over the rationals.
//!
//! Matrices are stored sparsely as `(row, col) -> value` maps; elimination is
//! done on dense row copies since every block handled by this crate is small.
//! Pivots are the first nonzero entry, which is fine in exact arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Vector = Vec<Rational>;

/// Integer as a rational.
pub fn q(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `n / d` in lowest terms. Panics if `d == 0`.
pub fn qr(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(-1)^e` as a rational.
pub fn sign(e: usize) -> Rational {
    if e % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `a^e` for a possibly negative exponent. `a` must be nonzero when `e < 0`.
pub fn pow(a: &Rational, e: i64) -> Rational {
    let mut acc = Rational::one();
    let base = if e < 0 { a.recip() } else { a.clone() };
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

pub fn zero_vector(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `y += a * x`
pub fn axpy(a: &Rational, x: &[Rational], y: &mut [Rational]) {
    debug_assert_eq!(x.len(), y.len());
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

pub fn scaled(a: &Rational, x: &[Rational]) -> Vector {
    x.iter().map(|v| a * v).collect()
}

pub fn add(x: &[Rational], y: &[Rational]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub(x: &[Rational], y: &[Rational]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Sparse rational matrix. Stored entries are always nonzero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMatrix({}x{}) [", self.rows, self.cols)?;
        for ((r, c), v) in &self.entries {
            write!(f, " ({r},{c})={v}")?;
        }
        write!(f, " ]")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn scalar(n: usize, a: &Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, a.clone());
        }
        m
    }

    /// Build from dense rows.
    pub fn from_rows(rows: &[Vector], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Build from dense columns, each of length `rows`.
    pub fn from_columns(columns: &[Vector], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let dense: Vec<Vector> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Self::from_rows(&dense, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Rational) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.range((r, 0)..(r + 1, 0)).map(|(&(_, c), v)| (c, v))
    }

    pub fn column(&self, c: usize) -> Vector {
        let mut v = zero_vector(self.rows);
        for (&(r, cc), x) in &self.entries {
            if cc == c {
                v[r] = x.clone();
            }
        }
        v
    }

    pub fn to_dense(&self) -> Vec<Vector> {
        let mut d = vec![zero_vector(self.cols); self.rows];
        for (&(r, c), v) in &self.entries {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn columns(&self) -> Vec<Vector> {
        let mut cols = vec![zero_vector(self.rows); self.cols];
        for (&(r, c), v) in &self.entries {
            cols[c][r] = v.clone();
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            t.entries.insert((c, r), v.clone());
        }
        t
    }

    /// `self * other`
    pub fn mul(&self, other: &RationalMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            for (j, b) in other.row_entries(k) {
                *acc.entry((i, j)).or_insert_with(Rational::zero) += a * b;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        RationalMatrix {
            rows: self.rows,
            cols: other.cols,
            entries: acc,
        }
    }

    pub fn apply(&self, v: &[Rational]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = zero_vector(self.rows);
        for (&(r, c), x) in &self.entries {
            if !v[c].is_zero() {
                out[r] += x * &v[c];
            }
        }
        out
    }

    pub fn scale(&self, a: &Rational) -> Self {
        let mut m = Self::zeros(self.rows, self.cols);
        if a.is_zero() {
            return m;
        }
        for (&k, v) in &self.entries {
            m.entries.insert(k, v * a);
        }
        m
    }

    pub fn add(&self, other: &RationalMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (&(r, c), v) in &other.entries {
            m.add_to(r, c, v);
        }
        m
    }

    pub fn sub(&self, other: &RationalMatrix) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Copy `block` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &RationalMatrix) {
        for (r, c, v) in block.entries() {
            self.set(r0 + r, c0 + c, v.clone());
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (&(r, c), v) in &self.entries {
            if r >= r0 && r < r0 + rows && c >= c0 && c < c0 + cols {
                m.entries.insert((r - r0, c - c0), v.clone());
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }
}

/// Reduced row echelon form of dense rows. Returns the nonzero rows (pivot
/// entries normalized to 1) and their pivot columns.
pub fn rref(mut rows: Vec<Vector>, ncols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = -row[col].clone();
            axpy(&f, &pivot_row, row);
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(m: &RationalMatrix) -> usize {
    if m.is_zero() {
        return 0;
    }
    // eliminate along the shorter side
    if m.rows() <= m.cols() {
        rref(m.to_dense(), m.cols()).1.len()
    } else {
        let t = m.transpose();
        rref(t.to_dense(), t.cols()).1.len()
    }
}

/// Basis of the null space `{v : m v = 0}`.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<Vector> {
    let n = m.cols();
    let (rows, pivots) = rref(m.to_dense(), n);
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = zero_vector(n);
        v[free] = Rational::one();
        for (row, &p) in rows.iter().zip(&pivots) {
            if !row[free].is_zero() {
                v[p] = -row[free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Basis of the column space of `m`.
pub fn image_basis(m: &RationalMatrix) -> Vec<Vector> {
    let t = m.transpose();
    rref(t.to_dense(), t.cols()).0
}

/// Some solution of `m x = b`, if one exists.
pub fn solve(m: &RationalMatrix, b: &[Rational]) -> Option<Vector> {
    assert_eq!(b.len(), m.rows());
    let n = m.cols();
    let mut aug = m.to_dense();
    for (row, bi) in aug.iter_mut().zip(b) {
        row.push(bi.clone());
    }
    let (rows, pivots) = rref(aug, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = zero_vector(n);
    for (row, &p) in rows.iter().zip(&pivots) {
        x[p] = row[n].clone();
    }
    Some(x)
}

/// Incrementally built echelon basis of a subspace, remembering how each
/// stored row is written in terms of the vectors that were inserted.
///
/// Every call to [`EchelonBasis::insert`] consumes one generator index, whether
/// or not the vector was independent.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    ambient: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
    combos: Vec<BTreeMap<usize, Rational>>,
    generators: usize,
}

impl EchelonBasis {
    pub fn new(ambient: usize) -> Self {
        EchelonBasis {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: Vec::new(),
            generators: 0,
        }
    }

    pub fn from_vectors<'a>(ambient: usize, vs: impl IntoIterator<Item = &'a Vector>) -> Self {
        let mut e = Self::new(ambient);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    /// Returns `(residual, coefficients)` with
    /// `v = residual + sum_g coefficients[g] * generator_g`.
    pub fn reduce(&self, v: &[Rational]) -> (Vector, BTreeMap<usize, Rational>) {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let mut res = v.to_vec();
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for ((row, &p), combo) in self.rows.iter().zip(&self.pivots).zip(&self.combos) {
            if res[p].is_zero() {
                continue;
            }
            let c = res[p].clone();
            axpy(&-c.clone(), row, &mut res);
            for (g, x) in combo {
                *acc.entry(*g).or_insert_with(Rational::zero) += &c * x;
            }
        }
        acc.retain(|_, x| !x.is_zero());
        (res, acc)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        is_zero_vector(&self.reduce(v).0)
    }

    /// Insert `v`; returns its generator index if it enlarged the span.
    pub fn insert(&mut self, v: &[Rational]) -> Option<usize> {
        let g = self.generators;
        self.generators += 1;
        let (mut res, acc) = self.reduce(v);
        let p = res.iter().position(|x| !x.is_zero())?;
        let inv = res[p].recip();
        for x in res.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let mut combo: BTreeMap<usize, Rational> =
            acc.into_iter().map(|(k, x)| (k, -x * &inv)).collect();
        combo.insert(g, inv);
        self.rows.push(res);
        self.pivots.push(p);
        self.combos.push(combo);
        Some(g)
    }
}

/// Basis of a subquotient `span(cycles) / span(boundaries)`.
#[derive(Clone, Debug)]
pub struct SubquotientBasis {
    pub ambient_dim: usize,
    pub cycle_basis: Vec<Vector>,
    pub boundary_basis: Vec<Vector>,
    pub representatives: Vec<Vector>,
    reducer: EchelonBasis,
    rep_generators: Vec<usize>,
}

impl SubquotientBasis {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of `v` in the representative basis, or `None`
    /// when `v` is not in the cycle span.
    pub fn class_coordinates(&self, v: &[Rational]) -> Option<Vector> {
        let (res, acc) = self.reducer.reduce(v);
        if !is_zero_vector(&res) {
            return None;
        }
        Some(
            self.rep_generators
                .iter()
                .map(|g| acc.get(g).cloned().unwrap_or_else(Rational::zero))
                .collect(),
        )
    }

    /// True when `v` is a cycle whose class vanishes.
    pub fn is_boundary(&self, v: &[Rational]) -> bool {
        self.class_coordinates(v).is_some_and(|c| is_zero_vector(&c))
    }

    /// The class with the given coordinates, as a cycle.
    pub fn lift(&self, coords: &[Rational]) -> Vector {
        let mut v = zero_vector(self.ambient_dim);
        for (c, r) in coords.iter().zip(&self.representatives) {
            axpy(c, r, &mut v);
        }
        v
    }
}

/// Complete a basis of `span(boundaries)` to a basis of `span(cycles)`.
pub fn subquotient(
    ambient_dim: usize,
    cycles: &[Vector],
    boundaries: &[Vector],
) -> Result<SubquotientBasis> {
    let cyc = EchelonBasis::from_vectors(ambient_dim, cycles);
    let mut reducer = EchelonBasis::new(ambient_dim);
    let mut boundary_basis = Vec::new();
    for b in boundaries {
        if !cyc.contains(b) {
            return Err(Error::ContainmentViolation);
        }
        if reducer.insert(b).is_some() {
            boundary_basis.push(b.clone());
        }
    }
    let mut representatives = Vec::new();
    let mut rep_generators = Vec::new();
    let mut cycle_basis = Vec::new();
    let mut cyc_only = EchelonBasis::new(ambient_dim);
    for c in cycles {
        if cyc_only.insert(c).is_some() {
            cycle_basis.push(c.clone());
        }
        if let Some(g) = reducer.insert(c) {
            representatives.push(c.clone());
            rep_generators.push(g);
        }
    }
    Ok(SubquotientBasis {
        ambient_dim,
        cycle_basis,
        boundary_basis,
        representatives,
        reducer,
        rep_generators,
    })
}

/// Dimension of the span of a list of vectors.
pub fn span_dim(ambient: usize, vs: &[Vector]) -> usize {
    EchelonBasis::from_vectors(ambient, vs).dim()
}

/// Largest absolute numerator, handy in diagnostics.
pub fn max_abs_numer(v: &[Rational]) -> BigInt {
    v.iter().map(|x| x.numer().abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RationalMatrix::identity(2)), 2);
        assert_eq!(rank(&RationalMatrix::zeros(3, 4)), 0);
        assert_eq!(rank(&RationalMatrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&RationalMatrix::identity(3)).is_empty());
        let k = kernel_basis(&RationalMatrix::zeros(2, 3));
        assert_eq!(k.len(), 3);
        for (i, v) in k.iter().enumerate() {
            assert_eq!(v, &unit_vector(3, i));
        }
        let k = kernel_basis(&RationalMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(k, vec![vec![q(-1), q(1)]]);
    }

    #[test]
    fn subquotient_examples() {
        let e1 = unit_vector(2, 0);
        let e2 = unit_vector(2, 1);
        let s = subquotient(2, &[e1.clone(), e2.clone()], &[e1.clone()]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.representatives[0], e2);
        let s = subquotient(2, &[e1.clone(), e2.clone()], &[e1.clone(), e2.clone()]).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(
            subquotient(2, &[e1.clone()], &[e2.clone()]).unwrap_err(),
            Error::ContainmentViolation
        );
    }

    #[test]
    fn subquotient_dim_five_over_two() {
        // cycles: a 5-dim subspace of Q^7, boundaries a 2-dim subspace of it
        let cyc: Vec<Vector> = (0..5)
            .map(|i| (0..7).map(|j| q(((i + 1) * (j + 2) % 5) as i64 + (i == j) as i64)).collect())
            .collect();
        assert_eq!(span_dim(7, &cyc), 5);
        let b1 = add(&cyc[0], &cyc[3]);
        let b2 = sub(&scaled(&q(2), &cyc[1]), &cyc[4]);
        let s = subquotient(7, &cyc, &[b1.clone(), b2.clone()]).unwrap();
        assert_eq!(s.dim(), 3);
        let mut all = s.representatives.clone();
        all.push(b1);
        all.push(b2);
        assert_eq!(span_dim(7, &all), 5);
    }

    #[test]
    fn solve_and_classes() {
        let m = RationalMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        let x = solve(&m, &[q(5), q(6)]).unwrap();
        assert_eq!(m.apply(&x), vec![q(5), q(6)]);
        let singular = RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(solve(&singular, &[q(1), q(0)]).is_none());

        let e = |i| unit_vector(3, i);
        let s = subquotient(3, &[e(0), e(1)], &[add(&e(0), &e(1))]).unwrap();
        let c = s.class_coordinates(&e(0)).unwrap();
        let c1 = s.class_coordinates(&e(1)).unwrap();
        assert_eq!(c, scaled(&q(-1), &c1));
        assert!(s.class_coordinates(&e(2)).is_none());
    }

    fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec((0..r, 0..c, -3i64..4, 1i64..3), 0..12).prop_map(
                move |es| {
                    let mut m = RationalMatrix::zeros(r, c);
                    for (i, j, n, d) in es {
                        m.set(i, j, qr(n, d));
                    }
                    m
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = kernel_basis(&m);
            prop_assert_eq!(rank(&m) + k.len(), m.cols());
            for v in &k {
                prop_assert!(is_zero_vector(&m.apply(v)));
            }
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
            prop_assert_eq!(image_basis(&m).len(), rank(&m));
        }

        #[test]
        fn fractions_stay_reduced(n in -50i64..50, d in 1i64..50, k in 1i64..20) {
            let x = qr(n, d);
            let y = &x * q(k) / q(k);
            prop_assert_eq!(&x, &y);
            prop_assert!(x.denom() > &BigInt::from(0));
        }

        #[test]
        fn subquotient_dimension(m in small_matrix()) {
            // cycles = kernel of m, boundaries = a few combinations of kernel vectors
            let k = kernel_basis(&m);
            let bs: Vec<Vector> = k.windows(2).map(|w| add(&w[0], &w[1])).collect();
            let s = subquotient(m.cols(), &k, &bs).unwrap();
            prop_assert_eq!(s.dim(), span_dim(m.cols(), &k) - span_dim(m.cols(), &bs));
        }
    }
}
