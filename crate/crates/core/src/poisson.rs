//! The Poisson operad with a bracket of degree `m = d - 1`.
//!
//! Basis of arity `n`: products of left-normed bracket words
//! `[[..[x_{i1}, x_{i2}], ..], x_{is}]`, one word per block of a set partition
//! of `{1..n}`, each word starting with its block minimum and the words
//! ordered by their minima. Degree is `m (n - #blocks)`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::chain::FinChainComplex;
use crate::error::{Error, Result};
use crate::exactla::{sign, unit_vector, Rational, Vector};
use crate::operad::{FinOperad, MultiplicativeOperad, SparseVec};

/// A left-normed bracket word, listed by its letters.
pub type Word = Vec<usize>;

type Terms = BTreeMap<Vec<Word>, Rational>;

/// Where the degree of an operation symbol sits when signs for substitution
/// are counted, together with the bracket identities that go with it.
///
/// `Shifted`: `[a,b] = -(-1)^{(|a|+m)(|b|+m)} [b,a]`,
/// `[a,[b,c]] = [[a,b],c] + (-1)^{(|a|+m)(|b|+m)} [b,[a,c]]`, bracket symbols
/// between their arguments.
///
/// `Prefix`: `[a,b] = -(-1)^{m + |a||b|} [b,a]`,
/// `[a,[b,c]] = (-1)^{m(|a|+1)} [[a,b],c] + (-1)^{(|a|+m)(|b|+m)} [b,[a,c]]`,
/// bracket symbols in front of their arguments.
///
/// Both use `[a,bc] = [a,b]c + (-1)^{(|a|+m)|b|} b[a,c]` and a graded
/// commutative, associative product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignConvention {
    Shifted,
    Prefix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RewriteOrder {
    /// Expand the right factor of a bracket first.
    RightFirst,
    /// Expand the left factor first.
    LeftFirst,
}

#[derive(Clone, Copy, Debug)]
struct Rules {
    m: usize,
    conv: SignConvention,
    strategy: RewriteOrder,
}

/// A normal-form basis monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PoissonMonomial {
    pub arity: usize,
    pub blocks: Vec<Word>,
}

impl PoissonMonomial {
    pub fn degree(&self, m: usize) -> usize {
        m * (self.arity - self.blocks.len())
    }

    /// Block minima increasing, words start with their minimum and every
    /// index `1..=arity` appears once.
    pub fn is_normal(&self) -> bool {
        let mut seen = vec![false; self.arity + 1];
        for w in &self.blocks {
            if w.is_empty() || w.iter().any(|&x| x < w[0]) {
                return false;
            }
            for &x in w {
                if x == 0 || x > self.arity || seen[x] {
                    return false;
                }
                seen[x] = true;
            }
        }
        seen[1..].iter().all(|&s| s) && self.blocks.windows(2).all(|p| p[0][0] < p[1][0])
    }
}

impl fmt::Display for PoissonMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("1");
        }
        for (b, w) in self.blocks.iter().enumerate() {
            if b > 0 {
                f.write_str(" ")?;
            }
            let mut s = format!("x{}", w[0]);
            for x in &w[1..] {
                s = format!("[{s},x{x}]");
            }
            f.write_str(&s)?;
        }
        Ok(())
    }
}

/// A linear combination of normal monomials of one arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonElement {
    pub arity: usize,
    terms: Terms,
}

impl PoissonElement {
    pub fn zero(arity: usize) -> Self {
        PoissonElement { arity, terms: Terms::new() }
    }

    pub fn monomial(m: &PoissonMonomial) -> Self {
        PoissonElement { arity: m.arity, terms: Terms::from([(m.blocks.clone(), Rational::one())]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (PoissonMonomial, &Rational)> {
        self.terms.iter().map(|(b, c)| (PoissonMonomial { arity: self.arity, blocks: b.clone() }, c))
    }

    pub fn coefficient(&self, blocks: &[Word]) -> Rational {
        self.terms.get(blocks).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scaled(&self, a: &Rational) -> Self {
        let mut out = PoissonElement::zero(self.arity);
        for (b, c) in &self.terms {
            add(&mut out.terms, b.clone(), a * c);
        }
        out
    }

    pub fn add(&self, other: &PoissonElement) -> Self {
        let mut out = self.clone();
        for (b, c) in &other.terms {
            add(&mut out.terms, b.clone(), c.clone());
        }
        out
    }
}

impl fmt::Display for PoissonElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c}) {m}")?;
        }
        Ok(())
    }
}

/// Raw multilinear expressions in `x_1, ..., x_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// The constant `1` (arity 0).
    One,
    Var(usize),
    Prod(Box<Expr>, Box<Expr>),
    Bracket(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn prod(a: Expr, b: Expr) -> Self {
        Expr::Prod(Box::new(a), Box::new(b))
    }

    pub fn bracket(a: Expr, b: Expr) -> Self {
        Expr::Bracket(Box::new(a), Box::new(b))
    }

    fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::One => {}
            Expr::Var(i) => out.push(*i),
            Expr::Prod(a, b) | Expr::Bracket(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

fn add(t: &mut Terms, k: Vec<Word>, v: Rational) {
    if v.is_zero() {
        return;
    }
    match t.entry(k) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += v;
            if e.get().is_zero() {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            e.insert(v);
        }
    }
}

fn add_scaled(t: &mut Terms, other: Terms, a: &Rational) {
    for (k, v) in other {
        add(t, k, a * v);
    }
}

fn word_degree(r: &Rules, w: &[usize]) -> usize {
    r.m * (w.len() - 1)
}

fn mono_degree(r: &Rules, p: &[Word]) -> usize {
    p.iter().map(|w| word_degree(r, w)).sum()
}

fn single(p: Vec<Word>) -> Terms {
    Terms::from([(p, Rational::one())])
}

impl Rules {
    /// `[x,y] = alpha [y,x]`
    fn alpha(&self, x: usize, y: usize) -> Rational {
        let m = self.m;
        match self.conv {
            SignConvention::Shifted => -sign((x + m) * (y + m)),
            SignConvention::Prefix => -sign(m + x * y),
        }
    }

    /// `[a,bc] = [a,b]c + leibniz b[a,c]`
    fn leibniz(&self, a: usize, b: usize) -> Rational {
        sign((a + self.m) * b)
    }

    /// `[a,[b,c]] = j1 [[a,b],c] + j2 [b,[a,c]]`
    fn jacobi(&self, a: usize, b: usize) -> (Rational, Rational) {
        let m = self.m;
        let j1 = match self.conv {
            SignConvention::Shifted => Rational::one(),
            SignConvention::Prefix => sign(m * (a + 1)),
        };
        (j1, sign((a + m) * (b + m)))
    }

    /// Degree of the symbols written before letter `x` in monomial `p`.
    fn before(&self, p: &[Word], x: usize) -> usize {
        let mut count = 0;
        for w in p {
            if let Some(pos) = w.iter().position(|&y| y == x) {
                return self.m
                    * (count
                        + match self.conv {
                            SignConvention::Shifted => pos,
                            SignConvention::Prefix => w.len() - 1,
                        });
            }
            count += w.len() - 1;
        }
        unreachable!("letter {x} not in monomial")
    }

    fn product_mono(&self, p: &[Word], q: &[Word]) -> (Rational, Vec<Word>) {
        let mut words: Vec<Word> = p.iter().chain(q).cloned().collect();
        let mut s = 0usize;
        // insertion sort by first letter, with the Koszul sign of each swap
        for i in 1..words.len() {
            let mut j = i;
            while j > 0 && words[j - 1][0] > words[j][0] {
                s += word_degree(self, &words[j - 1]) * word_degree(self, &words[j]);
                words.swap(j - 1, j);
                j -= 1;
            }
        }
        (sign(s), words)
    }

    fn product(&self, p: &Terms, q: &Terms) -> Terms {
        let mut out = Terms::new();
        for (a, ca) in p {
            for (b, cb) in q {
                let (s, w) = self.product_mono(a, b);
                add(&mut out, w, s * ca * cb);
            }
        }
        out
    }

    fn bracket(&self, p: &Terms, q: &Terms) -> Terms {
        let mut out = Terms::new();
        for (a, ca) in p {
            for (b, cb) in q {
                add_scaled(&mut out, self.bracket_mono(a, b), &(ca * cb));
            }
        }
        out
    }

    fn bracket_mono(&self, p: &[Word], q: &[Word]) -> Terms {
        if p.is_empty() || q.is_empty() {
            return Terms::new();
        }
        let split_right = q.len() >= 2 && (p.len() == 1 || self.strategy == RewriteOrder::RightFirst);
        if split_right {
            // [p, v q'] = [p,v] q' + (-1)^{(|p|+m)|v|} v [p,q']
            let (v, rest) = (&q[..1], &q[1..]);
            let mut out = self.product(&self.bracket_mono(p, v), &single(rest.to_vec()));
            let l = self.leibniz(mono_degree(self, p), mono_degree(self, v));
            add_scaled(&mut out, self.product(&single(v.to_vec()), &self.bracket_mono(p, rest)), &l);
            return out;
        }
        if p.len() >= 2 {
            // [ab, c] = alpha(ab,c) ([c,a] b + (-1)^{(|c|+m)|a|} a [c,b])
            let (a, b) = (&p[..1], &p[1..]);
            let (da, db, dc) = (mono_degree(self, a), mono_degree(self, b), mono_degree(self, q));
            let outer = self.alpha(da + db, dc);
            let c1 = &outer * self.alpha(dc, da);
            let c2 = &outer * self.leibniz(dc, da) * self.alpha(dc, db);
            let mut out = Terms::new();
            add_scaled(&mut out, self.product(&self.bracket_mono(a, q), &single(b.to_vec())), &c1);
            add_scaled(&mut out, self.product(&single(a.to_vec()), &self.bracket_mono(b, q)), &c2);
            return out;
        }
        self.lie(&p[0], &q[0])
    }

    fn lie_terms(&self, x: &Terms, v: &[usize]) -> Terms {
        let mut out = Terms::new();
        for (w, c) in x {
            add_scaled(&mut out, self.lie(&w[0], v), c);
        }
        out
    }

    /// Bracket of two normal words, as a combination of normal words.
    fn lie(&self, w: &[usize], v: &[usize]) -> Terms {
        let (dw, dv) = (word_degree(self, w), word_degree(self, v));
        if v.len() == 1 {
            let y = v[0];
            if w[0] < y {
                let mut out = w.to_vec();
                out.push(y);
                return single(vec![out]);
            }
            let mut out = Terms::new();
            add_scaled(&mut out, self.lie(&[y], w), &self.alpha(dw, 0));
            return out;
        }
        // [w, [v', z]] = j1 [[w,v'],z] + j2 [v',[w,z]],  [v',[w,z]] = alpha [[w,z],v']
        let (vp, z) = (&v[..v.len() - 1], &v[v.len() - 1..]);
        let (j1, j2) = self.jacobi(dw, dv - self.m);
        let mut out = Terms::new();
        add_scaled(&mut out, self.lie_terms(&self.lie(w, vp), z), &j1);
        let c = j2 * self.alpha(dv - self.m, dw + self.m);
        add_scaled(&mut out, self.lie_terms(&self.lie(w, z), vp), &c);
        out
    }

    fn normalize(&self, e: &Expr) -> Terms {
        match e {
            Expr::One => single(Vec::new()),
            Expr::Var(i) => single(vec![vec![*i]]),
            Expr::Prod(a, b) => self.product(&self.normalize(a), &self.normalize(b)),
            Expr::Bracket(a, b) => self.bracket(&self.normalize(a), &self.normalize(b)),
        }
    }

    /// `a ∘_i b` on monomials: relabel, substitute with the Koszul sign of
    /// the symbols before `x_i`, then normalize.
    fn compose_mono(&self, a: &[Word], n: usize, i: usize, b: &[Word], k: usize) -> Terms {
        let shift = |x: usize| if x > i { x + k - 1 } else { x };
        let b: Vec<Word> = b.iter().map(|w| w.iter().map(|&x| x + i - 1).collect()).collect();
        debug_assert!(a.iter().flatten().all(|&x| x <= n));
        let s = sign(mono_degree(self, &b) * self.before(a, i));
        let mut acc = single(Vec::new());
        for w in a {
            let word = if w.contains(&i) {
                let elem = |x: usize| if x == i { single(b.clone()) } else { single(vec![vec![shift(x)]]) };
                let mut e = elem(w[0]);
                for &x in &w[1..] {
                    e = self.bracket(&e, &elem(x));
                }
                e
            } else {
                single(vec![w.iter().map(|&x| shift(x)).collect()])
            };
            acc = self.product(&acc, &word);
        }
        let mut out = Terms::new();
        add_scaled(&mut out, acc, &s);
        out
    }
}

fn check_multilinear(e: &Expr) -> Result<usize> {
    let mut v = Vec::new();
    e.vars(&mut v);
    let n = v.len();
    v.sort_unstable();
    if v.iter().enumerate().any(|(k, &x)| x != k + 1) {
        return Err(Error::NonMultilinear(format!("variables {v:?} are not 1..{n} each once")));
    }
    Ok(n)
}

/// Rewrite a multilinear expression into normal monomials.
pub fn normalize(e: &Expr, m: usize, conv: SignConvention) -> Result<PoissonElement> {
    normalize_with(e, m, conv, RewriteOrder::RightFirst)
}

/// As [`normalize`], choosing which Leibniz expansion to apply first.
pub fn normalize_with(e: &Expr, m: usize, conv: SignConvention, strategy: RewriteOrder) -> Result<PoissonElement> {
    let arity = check_multilinear(e)?;
    let r = Rules { m, conv, strategy };
    Ok(PoissonElement { arity, terms: r.normalize(e) })
}

/// `a ∘_i b`.
pub fn compose(a: &PoissonElement, i: usize, b: &PoissonElement, m: usize, conv: SignConvention) -> Result<PoissonElement> {
    if i == 0 || i > a.arity {
        return Err(Error::IndexOutOfRange { position: i, arity: a.arity });
    }
    let r = Rules { m, conv, strategy: RewriteOrder::RightFirst };
    let mut terms = Terms::new();
    for (x, cx) in &a.terms {
        for (y, cy) in &b.terms {
            add_scaled(&mut terms, r.compose_mono(x, a.arity, i, y, b.arity), &(cx * cy));
        }
    }
    Ok(PoissonElement { arity: a.arity + b.arity - 1, terms })
}

/// Normal monomials of arity `n`, sorted by degree and then by blocks.
pub fn poisson_basis(n: usize, m: usize) -> Vec<PoissonMonomial> {
    fn perms(rest: &[usize]) -> Vec<Vec<usize>> {
        if rest.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for k in 0..rest.len() {
            let mut r = rest.to_vec();
            let x = r.remove(k);
            for mut p in perms(&r) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    // set partitions with blocks in order of their minima
    fn partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
        let Some((&first, rest)) = items.split_first() else { return vec![Vec::new()] };
        let mut out = Vec::new();
        for mask in 0..(1usize << rest.len()) {
            let block: Vec<usize> =
                std::iter::once(first).chain(rest.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &x)| x)).collect();
            let others: Vec<usize> =
                rest.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 0).map(|(_, &x)| x).collect();
            for tail in partitions(&others) {
                let mut p = vec![block.clone()];
                p.extend(tail);
                out.push(p);
            }
        }
        out
    }
    let items: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    for part in partitions(&items) {
        let mut monos: Vec<Vec<Word>> = vec![Vec::new()];
        for block in &part {
            let mut next = Vec::new();
            for prefix in &monos {
                for p in perms(&block[1..]) {
                    let mut w = vec![block[0]];
                    w.extend(p);
                    let mut m2 = prefix.clone();
                    m2.push(w);
                    next.push(m2);
                }
            }
            monos = next;
        }
        out.extend(monos.into_iter().map(|blocks| PoissonMonomial { arity: n, blocks }));
    }
    out.sort_by(|a, b| (a.degree(m), &a.blocks).cmp(&(b.degree(m), &b.blocks)));
    out
}

/// `Poiss_{d-1}` with its basis and multiplicative structure.
#[derive(Clone, Debug)]
pub struct PoissonOperad {
    pub multiplicative: MultiplicativeOperad,
    pub basis: Vec<Vec<PoissonMonomial>>,
    pub shift: usize,
    pub convention: SignConvention,
    index: Vec<HashMap<Vec<Word>, usize>>,
}

impl PoissonOperad {
    pub fn operad(&self) -> &FinOperad {
        &self.multiplicative.operad
    }

    /// Coordinates of an element in the flat basis of its arity.
    pub fn vector(&self, e: &PoissonElement) -> Vector {
        let mut v = vec![Rational::zero(); self.basis[e.arity].len()];
        for (b, c) in &e.terms {
            v[self.index[e.arity][b]] += c;
        }
        v
    }

    pub fn element(&self, n: usize, v: &[Rational]) -> PoissonElement {
        let mut out = PoissonElement::zero(n);
        for (k, c) in v.iter().enumerate() {
            add(&mut out.terms, self.basis[n][k].blocks.clone(), c.clone());
        }
        out
    }
}

/// `Poiss_{d-1}` in the shifted convention.
pub fn poisson_operad(d: usize, arity_max: usize) -> Result<PoissonOperad> {
    poisson_operad_with(d, arity_max, SignConvention::Shifted)
}

pub fn poisson_operad_with(d: usize, arity_max: usize, conv: SignConvention) -> Result<PoissonOperad> {
    if d < 2 {
        return Err(Error::InvalidParameter("the bracket needs d >= 2".into()));
    }
    let m = d - 1;
    let top = arity_max.max(3);
    let r = Rules { m, conv, strategy: RewriteOrder::RightFirst };
    let basis: Vec<Vec<PoissonMonomial>> = (0..=top).map(|n| poisson_basis(n, m)).collect();
    let index: Vec<HashMap<Vec<Word>, usize>> = basis
        .iter()
        .map(|b| b.iter().enumerate().map(|(k, x)| (x.blocks.clone(), k)).collect())
        .collect();
    let components = (0..=top)
        .map(|n| {
            let mut dims = vec![0; m * n.saturating_sub(1) + 1];
            for x in &basis[n] {
                dims[x.degree(m)] += 1;
            }
            FinChainComplex::with_zero_differential(dims)
        })
        .collect();
    let unit = unit_vector(1, 0);
    let operad = FinOperad::from_fn(components, unit, |n, i, k, x, y| {
        let t = r.compose_mono(&basis[n][x].blocks, n, i, &basis[k][y].blocks, k);
        let mut v: SparseVec = t.into_iter().map(|(b, c)| (index[n + k - 1][&b], c)).collect();
        v.sort_by_key(|(j, _)| *j);
        v
    })?;
    let mu = unit_vector(2, index[2][&vec![vec![1], vec![2]]]);
    let e = unit_vector(1, 0);
    let multiplicative = MultiplicativeOperad::new(operad, mu, e)?;
    Ok(PoissonOperad { multiplicative, basis, shift: m, convention: conv, index })
}
