use std::sync::Arc;

use num_traits::One;

use super::{FinOperad, MultiplicativeOperad, OperadMorphism, SparseVec};
use crate::chain::{tensor, tensor_index, FinChainComplex};
use crate::error::{Error, Result};
use crate::exactla::{sign, unit_vector, Rational, RationalMatrix};

/// The associative operad: `A(n) = Q` in degree 0 for every `n`, with
/// `μ_n ∘_i μ_m = μ_{n+m-1}`, `μ = μ_2`, `e = μ_0`.
pub fn associative_operad(arity_max: usize) -> MultiplicativeOperad {
    let top = arity_max.max(3);
    let comps = vec![FinChainComplex::with_zero_differential(vec![1]); top + 1];
    let o = FinOperad::from_fn(comps, unit_vector(1, 0), |_, _, _, _, _| vec![(0, Rational::one())])
        .expect("associative operad tables");
    MultiplicativeOperad::new(o, unit_vector(1, 0), unit_vector(1, 0)).expect("μ and e are associative and unital")
}

/// Only the unit: `O(1) = Q`, every other arity zero.
pub fn trivial_operad(arity_max: usize) -> FinOperad {
    let top = arity_max.max(1);
    let comps = (0..=top)
        .map(|n| FinChainComplex::with_zero_differential(vec![usize::from(n == 1)]))
        .collect();
    FinOperad::from_fn(comps, unit_vector(1, 0), |n, _, m, _, _| {
        if n == 1 && m == 1 {
            vec![(0, Rational::one())]
        } else {
            Vec::new()
        }
    })
    .expect("trivial operad tables")
}

/// Non-unital associative operad cut off above arity `top`: `Q` in arities
/// `1..=top`, zero in arity 0 and above `top`. Arities above `top` form an
/// ideal because there is nothing in arity 0.
pub fn truncated_associative(top: usize, arity_max: usize) -> FinOperad {
    let comps = (0..=arity_max)
        .map(|n| FinChainComplex::with_zero_differential(vec![usize::from(n >= 1 && n <= top)]))
        .collect();
    FinOperad::from_fn(comps, unit_vector(1, 0), |n, _, m, _, _| {
        if n + m - 1 <= top {
            vec![(0, Rational::one())]
        } else {
            Vec::new()
        }
    })
    .expect("truncated associative tables")
}

/// The augmented acyclic algebra `C`: basis `1, v` in degree 0 and `u` in
/// degree 1 with `du = v`. Flat indices are `1 = 0`, `v = 1`, `u = 2`.
fn acyclic_algebra() -> FinChainComplex {
    FinChainComplex::new(vec![2, 1], vec![RationalMatrix::from_i64(&[&[0], &[1]])]).expect("du = v")
}

struct TensorLayout {
    h: FinChainComplex,
    o: FinChainComplex,
}

impl TensorLayout {
    fn index(&self, x: usize, c: usize) -> usize {
        let cc = acyclic_algebra();
        let a = self.h.degree_of(x);
        let b = cc.degree_of(c);
        let xl = x - self.h.offset(a);
        let cl = c - cc.offset(b);
        self.o.offset(a + b) + tensor_index(&self.h, &cc, a, xl, b, cl)
    }
}

fn product(c: usize, c2: usize) -> Option<usize> {
    match (c, c2) {
        (0, k) | (k, 0) => Some(k),
        _ => None,
    }
}

/// `O(n) = h(n) ⊗ C` with `(x⊗c) ∘_i (y⊗c') = (-1)^{|c||y|} (x ∘_i y) ⊗ cc'`,
/// together with the augmentation `O -> h`, which is a weak equivalence.
pub fn formal_test_operad_plain(h: &FinOperad) -> Result<(FinOperad, OperadMorphism)> {
    for n in 0..=h.arity_max() {
        if !h.component(n).has_zero_differential() {
            return Err(Error::NonZeroDifferential { arity: n });
        }
    }
    let cc = acyclic_algebra();
    let layouts: Vec<TensorLayout> = h
        .components()
        .iter()
        .map(|hn| TensorLayout { h: hn.clone(), o: tensor(hn, &cc) })
        .collect();
    let comps: Vec<FinChainComplex> = layouts.iter().map(|l| l.o.clone()).collect();
    let mut unit = vec![Rational::from_integer(0.into()); comps[1].total_dim()];
    for (x, a) in h.unit().iter().enumerate() {
        unit[layouts[1].index(x, 0)] = a.clone();
    }
    // inverse layout: flat O(n) index -> (x, c)
    let inverse: Vec<Vec<(usize, usize)>> = layouts
        .iter()
        .map(|l| {
            let mut inv = vec![(0, 0); l.o.total_dim()];
            for x in 0..l.h.total_dim() {
                for c in 0..3 {
                    inv[l.index(x, c)] = (x, c);
                }
            }
            inv
        })
        .collect();
    let o = FinOperad::from_fn(comps, unit, |n, i, m, a, b| {
        let (x, c) = inverse[n][a];
        let (y, c2) = inverse[m][b];
        let Some(cp) = product(c, c2) else { return Vec::new() };
        let s = sign(cc.degree_of(c) * h.degree_of(m, y));
        let t = n + m - 1;
        h.compose_basis(n, i, m, x, y)
            .iter()
            .map(|(z, v)| (layouts[t].index(*z, cp), v * &s))
            .collect::<SparseVec>()
    })?;
    let flat = (0..=h.arity_max())
        .map(|n| {
            let mut f = RationalMatrix::zeros(h.dim(n), o.dim(n));
            for x in 0..h.dim(n) {
                f.set(x, layouts[n].index(x, 0), Rational::one());
            }
            f
        })
        .collect();
    let h_arc = Arc::new(h.clone());
    let o_arc = Arc::new(o.clone());
    let aug = OperadMorphism::from_flat(o_arc, h_arc, flat)?;
    Ok((o, aug))
}

/// Multiplicative version with `μ⊗1` and `e⊗1`.
pub fn formal_test_operad(h: &MultiplicativeOperad) -> Result<(MultiplicativeOperad, OperadMorphism)> {
    let (o, aug) = formal_test_operad_plain(&h.operad)?;
    let lift = |n: usize, v: &[Rational]| {
        let mut out = vec![Rational::from_integer(0.into()); o.dim(n)];
        let hn = h.operad.component(n);
        let l = TensorLayout { h: hn.clone(), o: o.component(n).clone() };
        for (x, a) in v.iter().enumerate() {
            out[l.index(x, 0)] = a.clone();
        }
        out
    };
    let mu = lift(2, &h.mu);
    let e = lift(0, &h.basepoint);
    Ok((MultiplicativeOperad::new(o, mu, e)?, aug))
}

/// `x ⊗ c` inside `formal_test_operad_plain(h)`, where `c` is `0` for `1`,
/// `1` for `v` and `2` for `u`.
pub fn formal_test_embed(h: &FinOperad, o: &FinOperad, n: usize, x: &[Rational], c: usize) -> Vec<Rational> {
    let l = TensorLayout { h: h.component(n).clone(), o: o.component(n).clone() };
    let mut out = vec![Rational::from_integer(0.into()); o.dim(n)];
    for (i, a) in x.iter().enumerate() {
        out[l.index(i, c)] = a.clone();
    }
    out
}

/// The morphism `A -> O` sending `μ_n` to the iterated product and `μ_0` to
/// the basepoint.
pub fn associative_map(m: &MultiplicativeOperad) -> Result<OperadMorphism> {
    let o = &m.operad;
    let top = o.arity_max();
    let mut images: Vec<Vec<Rational>> = vec![m.basepoint.clone(), o.unit().clone(), m.mu.clone()];
    for n in 3..=top {
        let next = o.compose(2, 2, n - 1, &m.mu, &images[n - 1]);
        images.push(next);
    }
    let a = Arc::new(associative_operad(top).operad);
    let flat = images.iter().map(|v| RationalMatrix::from_columns(std::slice::from_ref(v), v.len())).collect();
    OperadMorphism::from_flat(a, Arc::new(o.clone()), flat)
}
