//! Text formats: operad descriptions (`.od`), bicomplexes (`.bc`) and graded
//! sequences (`.seq`).
//!
//! Every format is line oriented; `#` starts a comment and blank lines are
//! ignored. Coefficients are written `numerator/denominator` and may be read
//! as plain integers.
//!
//! An operad description lists
//!
//! ```text
//! format_version 1
//! field Q
//! arity_max <A>
//! basis <n> <k> <label>...          one line per arity n and degree k
//! unit <label>
//! multiplication <label>            optional, arity 2
//! basepoint <label>                 optional, arity 0
//! d <n> <from> <to> <coefficient>   d(from) has coefficient on to
//! compose <n> <i> <m> <x> <y> = <z> <c> <z> <c> ...
//! ```
//!
//! Labels are unique within an arity. Canonical documents sort labels within
//! each basis line, `d` lines by arity and labels, and `compose` lines by
//! `(n, i, m)` and labels; missing compositions are zero.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chain::FinChainComplex;
use crate::error::{Error, Result};
use crate::exactla::{unit_vector, Rational, RationalMatrix};
use crate::free::GradedSequence;
use crate::operad::{FinOperad, MultiplicativeOperad, SparseVec};
use crate::specseq::Bicomplex;

pub const FORMAT_VERSION: &str = "1";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_rational(s: &str, line: usize) -> Result<Rational> {
    let bad = || parse_err(line, format!("bad coefficient {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(a: &Rational) -> String {
    format!("{}/{}", a.numer(), a.denom())
}

/// Meaningful lines with their 1-based numbers, split into words.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| parse_err(line, format!("expected a non-negative integer, found {s:?}")))
}

fn expect_header(text: &str, kind: Option<&str>) -> Result<()> {
    let mut it = lines(text);
    match it.next() {
        Some((_, w)) if w == ["format_version", FORMAT_VERSION] => {}
        Some((l, _)) => return Err(parse_err(l, format!("expected `format_version {FORMAT_VERSION}`"))),
        None => return Err(parse_err(1, "empty document")),
    }
    if let Some(kind) = kind {
        match it.next() {
            Some((_, w)) if w == [kind] => {}
            Some((l, _)) => return Err(parse_err(l, format!("expected `{kind}`"))),
            None => return Err(parse_err(1, format!("missing `{kind}` line"))),
        }
    }
    Ok(())
}

/// An operad with a label for every basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadDocument {
    pub operad: FinOperad,
    /// `labels[n][x]` for the flat basis of arity `n`.
    pub labels: Vec<Vec<String>>,
    pub multiplication: Option<usize>,
    pub basepoint: Option<usize>,
}

fn basis_index(v: &[Rational], what: &str) -> Result<usize> {
    let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
    match nz[..] {
        [i] if v[i].is_one() => Ok(i),
        _ => Err(Error::InvalidParameter(format!("{what} is not a basis vector"))),
    }
}

impl OperadDocument {
    /// Labels `b<n>_<k>_<j>` for the `j`-th basis vector of degree `k`.
    pub fn with_default_labels(operad: FinOperad) -> Self {
        let labels = (0..=operad.arity_max())
            .map(|n| {
                let c = operad.component(n);
                (0..c.total_dim())
                    .map(|x| {
                        let k = c.degree_of(x);
                        format!("b{n}_{k}_{:04}", x - c.offset(k))
                    })
                    .collect()
            })
            .collect();
        OperadDocument { operad, labels, multiplication: None, basepoint: None }
    }

    /// Adds `μ` and `e`, which must be basis vectors.
    pub fn with_multiplicative(mut self, m: &MultiplicativeOperad) -> Result<Self> {
        self.multiplication = Some(basis_index(&m.mu, "the multiplication")?);
        self.basepoint = Some(basis_index(&m.basepoint, "the basepoint")?);
        Ok(self)
    }

    pub fn multiplicative(&self) -> Option<Result<MultiplicativeOperad>> {
        let (mu, e) = (self.multiplication?, self.basepoint?);
        let o = &self.operad;
        Some(MultiplicativeOperad::new(o.clone(), unit_vector(o.dim(2), mu), unit_vector(o.dim(0), e)))
    }

    pub fn parse(text: &str) -> Result<Self> {
        expect_header(text, None)?;
        let mut arity_max = None;
        let mut field = false;
        // (arity, degree) -> labels, in document order
        let mut basis: BTreeMap<(usize, usize), (usize, Vec<String>)> = BTreeMap::new();
        let mut unit = None;
        let (mut mult, mut base) = (None, None);
        let mut diffs = Vec::new();
        let mut comps = Vec::new();
        for (l, w) in lines(text).skip(1) {
            match w[0] {
                "field" if w.len() == 2 => {
                    if w[1] != "Q" {
                        return Err(parse_err(l, "only the field Q is supported"));
                    }
                    field = true;
                }
                "arity_max" if w.len() == 2 => arity_max = Some(parse_usize(w[1], l)?),
                "basis" if w.len() >= 3 => {
                    let key = (parse_usize(w[1], l)?, parse_usize(w[2], l)?);
                    let labels = w[3..].iter().map(|s| s.to_string()).collect();
                    if basis.insert(key, (l, labels)).is_some() {
                        return Err(parse_err(l, format!("second basis line for arity {} degree {}", key.0, key.1)));
                    }
                }
                "unit" if w.len() == 2 => unit = Some((l, w[1].to_string())),
                "multiplication" if w.len() == 2 => mult = Some((l, w[1].to_string())),
                "basepoint" if w.len() == 2 => base = Some((l, w[1].to_string())),
                "d" if w.len() == 5 => diffs.push((l, w)),
                "compose" if w.len() >= 7 && w[6] == "=" && w.len() % 2 == 1 => comps.push((l, w)),
                _ => return Err(parse_err(l, format!("unrecognised line starting with {:?}", w[0]))),
            }
        }
        if !field {
            return Err(parse_err(1, "missing `field Q`"));
        }
        let a = arity_max.ok_or_else(|| parse_err(1, "missing `arity_max`"))?;
        // components and label lookup
        let mut labels: Vec<Vec<String>> = vec![Vec::new(); a + 1];
        let mut dims: Vec<Vec<usize>> = vec![Vec::new(); a + 1];
        let mut index: Vec<HashMap<String, usize>> = vec![HashMap::new(); a + 1];
        for (&(n, k), (l, ls)) in &basis {
            if n > a {
                return Err(parse_err(*l, format!("arity {n} exceeds arity_max {a}")));
            }
            if dims[n].len() != k {
                return Err(parse_err(*l, format!("degrees of arity {n} must be listed from 0 without gaps")));
            }
            dims[n].push(ls.len());
            for s in ls {
                if index[n].insert(s.clone(), labels[n].len()).is_some() {
                    return Err(parse_err(*l, format!("label {s} repeated in arity {n}")));
                }
                labels[n].push(s.clone());
            }
        }
        for d in dims.iter_mut() {
            if d.is_empty() {
                d.push(0);
            }
        }
        let find = |n: usize, s: &str, l: usize| -> Result<usize> {
            index.get(n).and_then(|m| m.get(s)).copied().ok_or_else(|| parse_err(l, format!("unknown label {s} in arity {n}")))
        };
        let flat_dims: Vec<usize> = dims.iter().map(|d| d.iter().sum()).collect();
        let offsets: Vec<Vec<usize>> =
            dims.iter().map(|d| (0..d.len()).map(|k| d[..k].iter().sum()).collect()).collect();
        let mut flat_d: Vec<RationalMatrix> = flat_dims.iter().map(|&m| RationalMatrix::zeros(m, m)).collect();
        for (l, w) in &diffs {
            let n = parse_usize(w[1], *l)?;
            let (x, y) = (find(n, w[2], *l)?, find(n, w[3], *l)?);
            flat_d[n].add_to(y, x, &parse_rational(w[4], *l)?);
        }
        let mut components = Vec::new();
        for n in 0..=a {
            let mats = (1..dims[n].len())
                .map(|k| {
                    flat_d[n].block(offsets[n][k - 1], offsets[n][k], dims[n][k - 1], dims[n][k])
                })
                .collect();
            // entries outside the degree-lowering blocks are errors
            let mut check = RationalMatrix::zeros(flat_dims[n], flat_dims[n]);
            for k in 1..dims[n].len() {
                check.put_block(offsets[n][k - 1], offsets[n][k], &flat_d[n].block(offsets[n][k - 1], offsets[n][k], dims[n][k - 1], dims[n][k]));
            }
            if check != flat_d[n] {
                let l = diffs.first().map_or(1, |d| d.0);
                return Err(parse_err(l, format!("differential in arity {n} does not lower degree by one")));
            }
            let c = FinChainComplex::new(dims[n].clone(), mats).map_err(|e| parse_err(1, format!("arity {n}: {e}")))?;
            components.push(c);
        }
        let (ul, ulabel) = unit.ok_or_else(|| parse_err(1, "missing `unit`"))?;
        if a < 1 {
            return Err(parse_err(1, "arity_max must be at least 1"));
        }
        let unit = unit_vector(flat_dims[1], find(1, &ulabel, ul)?);
        let mut tables: BTreeMap<(usize, usize, usize), Vec<SparseVec>> = BTreeMap::new();
        for n in 1..=a {
            for m in 0..=(a + 1 - n) {
                for i in 1..=n {
                    tables.insert((n, i, m), vec![Vec::new(); flat_dims[n] * flat_dims[m]]);
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (l, w) in &comps {
            let (n, i, m) = (parse_usize(w[1], *l)?, parse_usize(w[2], *l)?, parse_usize(w[3], *l)?);
            if n == 0 || i == 0 || i > n || n + m - 1 > a {
                return Err(parse_err(*l, format!("composition ({n},{i},{m}) is out of range")));
            }
            let (x, y) = (find(n, w[4], *l)?, find(m, w[5], *l)?);
            if !seen.insert((n, i, m, x, y)) {
                return Err(parse_err(*l, "composition listed twice"));
            }
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for pair in w[7..].chunks(2) {
                let z = find(n + m - 1, pair[0], *l)?;
                *acc.entry(z).or_insert_with(Rational::zero) += parse_rational(pair[1], *l)?;
            }
            let entry = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            tables.get_mut(&(n, i, m)).expect("table allocated")[x * flat_dims[m] + y] = entry;
        }
        let operad = FinOperad::from_tables(components, unit, tables).map_err(|e| parse_err(1, e.to_string()))?;
        let multiplication = mult.map(|(l, s)| find(2, &s, l)).transpose()?;
        let basepoint = base.map(|(l, s)| find(0, &s, l)).transpose()?;
        Ok(OperadDocument { operad, labels, multiplication, basepoint })
    }

    /// The canonical text; the unit must be a basis vector.
    pub fn emit(&self) -> Result<String> {
        let o = &self.operad;
        let lab = |n: usize, x: usize| self.labels[n][x].as_str();
        let mut s = String::new();
        writeln!(s, "format_version {FORMAT_VERSION}").unwrap();
        writeln!(s, "field Q").unwrap();
        writeln!(s, "arity_max {}", o.arity_max()).unwrap();
        for n in 0..=o.arity_max() {
            let c = o.component(n);
            for k in 0..=c.max_degree() {
                let mut ls: Vec<&str> = (c.offset(k)..c.offset(k) + c.dim(k)).map(|x| lab(n, x)).collect();
                ls.sort_unstable();
                let mut line = format!("basis {n} {k}");
                for l in ls {
                    line.push(' ');
                    line.push_str(l);
                }
                writeln!(s, "{line}").unwrap();
            }
        }
        writeln!(s, "unit {}", lab(1, basis_index(o.unit(), "the unit")?)).unwrap();
        if let Some(m) = self.multiplication {
            writeln!(s, "multiplication {}", lab(2, m)).unwrap();
        }
        if let Some(e) = self.basepoint {
            writeln!(s, "basepoint {}", lab(0, e)).unwrap();
        }
        let mut dl = Vec::new();
        for n in 0..=o.arity_max() {
            for (to, from, a) in o.component(n).flat_differential().entries() {
                dl.push((n, lab(n, from), lab(n, to), format_rational(a)));
            }
        }
        dl.sort();
        for (n, f, t, a) in dl {
            writeln!(s, "d {n} {f} {t} {a}").unwrap();
        }
        for (&(n, i, m), table) in o.compositions() {
            let dm = o.dim(m);
            let mut rows: Vec<(&str, &str, String)> = Vec::new();
            for (xy, out) in table.iter().enumerate() {
                if out.is_empty() {
                    continue;
                }
                let mut terms: Vec<(&str, String)> =
                    out.iter().map(|(z, c)| (lab(n + m - 1, *z), format_rational(c))).collect();
                terms.sort();
                let rhs: Vec<String> = terms.into_iter().map(|(z, c)| format!("{z} {c}")).collect();
                rows.push((lab(n, xy / dm), lab(m, xy % dm), rhs.join(" ")));
            }
            rows.sort();
            for (x, y, rhs) in rows {
                writeln!(s, "compose {n} {i} {m} {x} {y} = {rhs}").unwrap();
            }
        }
        Ok(s)
    }
}

/// Canonical text of a bicomplex: `dims <p> <q = 0..>` per column, then
/// nonzero entries `v <p> <q> <row> <col> <c>` of `(p,q) -> (p,q-1)` and
/// `h <p> <q> <row> <col> <c>` of `(p,q) -> (p+1,q)`.
pub fn emit_bicomplex(b: &Bicomplex) -> String {
    let mut s = format!("format_version {FORMAT_VERSION}\nbicomplex\n");
    for p in 0..=b.p_max() {
        let dims: Vec<String> = (0..=b.q_max()).map(|q| b.dim(p, q).to_string()).collect();
        writeln!(s, "dims {p} {}", dims.join(" ")).unwrap();
    }
    for p in 0..=b.p_max() {
        for q in 1..=b.q_max() {
            for (r, c, a) in b.vertical(p, q).entries() {
                writeln!(s, "v {p} {q} {r} {c} {}", format_rational(a)).unwrap();
            }
        }
    }
    for p in 0..b.p_max() {
        for q in 0..=b.q_max() {
            for (r, c, a) in b.horizontal(p, q).entries() {
                writeln!(s, "h {p} {q} {r} {c} {}", format_rational(a)).unwrap();
            }
        }
    }
    s
}

pub fn parse_bicomplex(text: &str) -> Result<Bicomplex> {
    expect_header(text, Some("bicomplex"))?;
    let mut dims: Vec<Vec<usize>> = Vec::new();
    let mut entries = Vec::new();
    for (l, w) in lines(text).skip(2) {
        match (w[0], w.len()) {
            ("dims", n) if n >= 3 => {
                if parse_usize(w[1], l)? != dims.len() {
                    return Err(parse_err(l, "columns must be listed in order from 0"));
                }
                dims.push(w[2..].iter().map(|x| parse_usize(x, l)).collect::<Result<_>>()?);
            }
            ("v" | "h", 6) => entries.push((l, w)),
            _ => return Err(parse_err(l, format!("unrecognised line starting with {:?}", w[0]))),
        }
    }
    if dims.is_empty() || dims.iter().any(|d| d.len() != dims[0].len()) {
        return Err(parse_err(1, "columns must all list the same number of degrees"));
    }
    let qn = dims[0].len();
    let mut v: Vec<Vec<RationalMatrix>> = dims
        .iter()
        .map(|c| (0..qn).map(|q| RationalMatrix::zeros(if q == 0 { 0 } else { c[q - 1] }, c[q])).collect())
        .collect();
    let mut h: Vec<Vec<RationalMatrix>> = (0..dims.len() - 1)
        .map(|p| (0..qn).map(|q| RationalMatrix::zeros(dims[p + 1][q], dims[p][q])).collect())
        .collect();
    for (l, w) in entries {
        let (p, q, r, c) = (parse_usize(w[1], l)?, parse_usize(w[2], l)?, parse_usize(w[3], l)?, parse_usize(w[4], l)?);
        let a = parse_rational(w[5], l)?;
        let m = match w[0] {
            "v" if p < dims.len() && q >= 1 && q < qn => &mut v[p][q],
            "h" if p + 1 < dims.len() && q < qn => &mut h[p][q],
            _ => return Err(parse_err(l, "entry outside the bicomplex")),
        };
        if r >= m.rows() || c >= m.cols() {
            return Err(parse_err(l, "entry outside the matrix"));
        }
        m.add_to(r, c, &a);
    }
    Bicomplex::new(dims, v, h)
}

/// A graded sequence: `arity <n> <dims...>` lines and differential entries
/// `d <n> <k> <row> <col> <c>` of `C_k -> C_{k-1}` in arity `n`.
pub fn parse_sequence(text: &str) -> Result<GradedSequence> {
    expect_header(text, Some("sequence"))?;
    let mut dims: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut entries = Vec::new();
    for (l, w) in lines(text).skip(2) {
        match (w[0], w.len()) {
            ("arity", n) if n >= 3 => {
                let a = parse_usize(w[1], l)?;
                dims.insert(a, w[2..].iter().map(|x| parse_usize(x, l)).collect::<Result<_>>()?);
            }
            ("d", 6) => entries.push((l, w)),
            _ => return Err(parse_err(l, format!("unrecognised line starting with {:?}", w[0]))),
        }
    }
    let top = dims.keys().next_back().copied().ok_or_else(|| parse_err(1, "no arities listed"))?;
    let mut mats: Vec<Vec<RationalMatrix>> = (0..=top)
        .map(|n| {
            let d = dims.get(&n).cloned().unwrap_or_else(|| vec![0]);
            (1..d.len()).map(|k| RationalMatrix::zeros(d[k - 1], d[k])).collect()
        })
        .collect();
    for (l, w) in entries {
        let (n, k, r, c) = (parse_usize(w[1], l)?, parse_usize(w[2], l)?, parse_usize(w[3], l)?, parse_usize(w[4], l)?);
        let m = mats.get_mut(n).and_then(|m| m.get_mut(k.wrapping_sub(1))).ok_or_else(|| parse_err(l, "entry outside the sequence"))?;
        if r >= m.rows() || c >= m.cols() {
            return Err(parse_err(l, "entry outside the matrix"));
        }
        m.add_to(r, c, &parse_rational(w[5], l)?);
    }
    let comps = (0..=top)
        .map(|n| FinChainComplex::new(dims.get(&n).cloned().unwrap_or_else(|| vec![0]), mats[n].clone()))
        .collect::<Result<Vec<_>>>()?;
    GradedSequence::new(comps)
}
