use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::chain::FinChainComplex;
use crate::exactla::{q, unit_vector, RationalMatrix};
use crate::operad::{associative_operad, formal_test_operad_plain, trivial_operad, truncated_associative, FinOperad};
use crate::trees::{enumerate_odd_trees, TreeBounds};

fn catalan(n: usize) -> usize {
    (0..n).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

fn bounds(a: usize, d: usize) -> PushoutBounds {
    PushoutBounds { arity_max: a, max_degree: d, max_odd_vertices: None }
}

fn free_bounds(a: usize, d: usize) -> FreeBounds {
    FreeBounds { arity_max: a, max_degree: d, max_vertices: None }
}

#[test]
fn concentrated_sequences() {
    let d = concentrated_sequence(2, 2, CellKind::Disk, 3).unwrap();
    assert_eq!(d.component(2).dims(), &[0, 1, 1]);
    for n in [0, 1, 3] {
        assert_eq!(d.component(n).total_dim(), 0);
    }
    let s = concentrated_sequence(1, 3, CellKind::Sphere, 3).unwrap();
    assert_eq!(s.component(3).dims(), &[0, 1]);
    assert!(concentrated_sequence(0, 1, CellKind::Disk, 1).is_err());
    assert_eq!(generating_cofibrations(2, 3).unwrap().len(), 8);
    assert_eq!(generating_trivial_cofibrations(2, 3).unwrap().len(), 8);
}

#[test]
fn free_operad_on_zero_is_the_unit() {
    let f = free_operad(&GradedSequence::zero(3), &free_bounds(3, 2)).unwrap();
    for n in 0..=3 {
        assert_eq!(f.operad.dim(n), usize::from(n == 1));
    }
}

#[test]
fn binary_generator_counts_are_catalan() {
    let s = concentrated_sequence(0, 2, CellKind::Sphere, 6).unwrap();
    let f = free_operad(&s, &free_bounds(6, 0)).unwrap();
    assert!(f.certified);
    assert_eq!(f.operad.dim(0), 0);
    assert_eq!(f.operad.dim(1), 1);
    for n in 2..=6 {
        assert_eq!(f.operad.dim(n), catalan(n - 1), "arity {n}");
    }
    assert!(f.operad.check_axioms().is_valid());
}

#[test]
fn free_disk_in_arity_two() {
    let s = concentrated_sequence(2, 2, CellKind::Disk, 3).unwrap();
    let f = free_operad(&s, &free_bounds(3, 3)).unwrap();
    assert_eq!(f.operad.component(2).dims(), &[0, 1, 1, 0]);
    assert!(f.operad.check_axioms().is_valid());
    // degree-0 unary generators need a cap
    let u = concentrated_sequence(0, 1, CellKind::Sphere, 2).unwrap();
    assert_eq!(free_operad(&u, &free_bounds(2, 1)).unwrap_err(), Error::NonFinite);
    let capped = free_operad(&u, &FreeBounds { arity_max: 2, max_degree: 1, max_vertices: Some(4) }).unwrap();
    assert!(!capped.certified);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn free_extensions_are_morphisms(a in -5i64..=5, b in -5i64..=5) {
        // F(S^{0,2} + S^{0,3}) -> A with mu_2 -> a, mu_3 -> b
        let comps = vec![
            FinChainComplex::zero(),
            FinChainComplex::zero(),
            FinChainComplex::with_zero_differential(vec![1]),
            FinChainComplex::with_zero_differential(vec![1]),
        ];
        let s = GradedSequence::new(comps).unwrap();
        let f = free_operad(&s, &free_bounds(4, 0)).unwrap();
        let target = Arc::new(associative_operad(4).operad);
        let gens: Vec<RationalMatrix> = (0..=3)
            .map(|n| match n {
                2 => RationalMatrix::scalar(1, &q(a)),
                3 => RationalMatrix::scalar(1, &q(b)),
                _ => RationalMatrix::zeros(1, 0),
            })
            .collect();
        prop_assert!(free_extension(&f, target, &gens).is_ok());
    }
}

#[test]
fn pushout_over_trivial_operad_is_free() {
    let o = trivial_operad(4);
    let p = pushout_presentation(&o, 2, 2, &bounds(4, 4)).unwrap();
    let s = concentrated_sequence(2, 2, CellKind::Disk, 4).unwrap();
    let f = free_operad(&s, &free_bounds(4, 4)).unwrap();
    for n in 0..=4 {
        assert_eq!(p.operad.component(n).dims(), f.operad.component(n).dims(), "arity {n}");
    }
    assert!(p.certified);
    assert!(p.operad.check_axioms().is_valid());
}

#[test]
fn presentation_matches_oracle() {
    let attach = concentrated_sequence(2, 2, CellKind::Disk, 4).unwrap();
    for o in [trivial_operad(4), truncated_associative(3, 4)] {
        let p = pushout_presentation(&o, 2, 2, &bounds(4, 4)).unwrap();
        assert!(p.operad.check_axioms().is_valid());
        let oracle = pushout_oracle(&o, &attach, &OracleRelations::None, &free_bounds(4, 4)).unwrap();
        assert!(oracle.certified && p.certified);
        assert_eq!(p.table(), oracle);
        let w = p.inclusion.is_weak_equivalence();
        assert!(w.holds_below(4), "{:?}", w.first_failure());
    }
}

#[test]
fn oracle_without_attachment_recovers_the_operad() {
    let o = truncated_associative(3, 4);
    let t = pushout_oracle(&o, &GradedSequence::zero(4), &OracleRelations::None, &free_bounds(4, 2)).unwrap();
    for n in 0..=4 {
        assert_eq!(t.dims[n], o.component(n).truncated(2).padded(2).dims(), "arity {n}");
    }
}

#[test]
fn non_unit_degree_zero_elements_in_arity_one() {
    // O(1) holds e⊗v in degree 0; the oracle needs a vertex cap and must
    // stabilize, and then agrees with the odd-tree formula
    let (o, _) = formal_test_operad_plain(&truncated_associative(3, 3)).unwrap();
    assert!(o.component(1).dims()[0] > 1);
    let attach = concentrated_sequence(2, 2, CellKind::Disk, 3).unwrap();
    let p = pushout_presentation(&o, 2, 2, &bounds(2, 2)).unwrap();
    let fb = FreeBounds { arity_max: 2, max_degree: 2, max_vertices: Some(6) };
    let oracle = pushout_oracle(&o, &attach, &OracleRelations::None, &fb).unwrap();
    assert!(oracle.certified);
    assert_eq!(p.table(), oracle);
    assert!(p.inclusion.is_weak_equivalence().holds_below(2));
}

#[test]
fn cofibration_pushout_matches_oracle() {
    let o = truncated_associative(3, 4);
    let s = concentrated_sequence(2, 2, CellKind::Sphere, 4).unwrap();
    for g in [vec![q(0)], vec![q(1)]] {
        let p = cofibration_pushout(&o, &g, 1, 2, &bounds(4, 3)).unwrap();
        assert!(p.operad.check_axioms().is_valid());
        let rel = OracleRelations::Cofibration { attaching: g.clone() };
        let s1 = concentrated_sequence(1, 2, CellKind::Sphere, 4).unwrap();
        let oracle = pushout_oracle(&o, &s1, &rel, &free_bounds(4, 3)).unwrap();
        assert_eq!(p.table(), oracle);
    }
    // with zero attaching value the cell splits off as a free generator
    let p = cofibration_pushout(&o, &[q(0)], 2, 2, &bounds(4, 4)).unwrap();
    let free = pushout_oracle(&o, &s, &OracleRelations::None, &free_bounds(4, 4)).unwrap();
    assert_eq!(p.table(), free);
}

#[test]
fn cofibration_rejects_wrong_degree() {
    let (o, _) = formal_test_operad_plain(&truncated_associative(3, 3)).unwrap();
    // e⊗u ⊗ ... sits in degree 1; a p = 1 cell needs degree 0
    let c = o.component(2);
    let deg1 = unit_vector(c.total_dim(), c.offset(1));
    assert_eq!(
        cofibration_pushout(&o, &deg1, 1, 2, &bounds(3, 2)).unwrap_err(),
        Error::DegreeMismatch { expected: 0, found: 1 }
    );
    assert!(matches!(pushout_presentation(&o, 0, 2, &bounds(3, 2)), Err(Error::InvalidParameter(_))));
}

/// Sum over odd trees with exactly `l` odd vertices of the tensor dimension
/// of their label spaces, counted as polynomials in the degree.
fn direct_layer_count(o: &FinOperad, cell: &FinChainComplex, q: usize, n: usize, l: usize, d: usize) -> Vec<usize> {
    let even_in = (0..=o.arity_max()).filter(|&k| o.dim(k) > 0).collect();
    let b = TreeBounds {
        max_vertices: 1 + (q + 1) * l + n,
        even_in,
        odd_in: [q].into_iter().collect(),
        max_vin1: Some(l),
    };
    let mut out = vec![0; d + 1];
    for t in enumerate_odd_trees(n, &b).trees {
        let c = t.classify();
        if c.vin1.len() != l {
            continue;
        }
        let mut poly = vec![1usize];
        for &v in &c.vin {
            let space = if c.levels[v] % 2 == 0 { o.component(c.in_counts[v]).clone() } else { cell.clone() };
            let mut next = vec![0; poly.len() + space.max_degree()];
            for (i, a) in poly.iter().enumerate() {
                for k in 0..=space.max_degree() {
                    next[i + k] += a * space.dim(k);
                }
            }
            poly = next;
        }
        for (k, a) in poly.iter().enumerate().take(d + 1) {
            out[k] += a;
        }
    }
    out
}

#[test]
fn filtration_layers_are_tensor_counts() {
    let o = truncated_associative(3, 4);
    let g = vec![q(1)];
    let p = cofibration_pushout(&o, &g, 1, 2, &bounds(4, 3)).unwrap();
    let f = filtration_layers(&p).unwrap();
    for n in 0..=4 {
        assert_eq!(f.layers[0].component(n).dims(), p.base.component(n).padded(3).dims());
        assert_eq!(f.layers.last().unwrap().component(n), p.operad.component(n).clone());
        for l in 1..f.layers.len() {
            let cell = crate::chain::sphere_complex(1);
            assert_eq!(f.quotient_dims(l, n), direct_layer_count(&p.base, &cell, 2, n, l, 3), "arity {n}, layer {l}");
        }
    }
}

#[test]
fn weak_equivalences_give_quasi_isomorphic_pushouts() {
    let h = truncated_associative(3, 3);
    let (o, aug) = formal_test_operad_plain(&h).unwrap();
    // mu_2 ⊗ 1 and mu_2 ⊗ v both map to multiples of mu_2
    let c = o.component(2);
    for x in [0, 1] {
        let g = unit_vector(c.total_dim(), x);
        let g2 = aug.flat(2).apply(&g);
        let b = bounds(3, 3);
        let p = cofibration_pushout(&o, &g, 1, 2, &b).unwrap();
        let p2 = cofibration_pushout(&h, &g2, 1, 2, &b).unwrap();
        assert!(p.certified && p2.certified);
        let m = p.induced_map(&p2, &aug).unwrap();
        let w = m.is_weak_equivalence();
        assert!(w.holds_below(3), "{:?}", w.first_failure());
    }
}

#[test]
fn dimension_table_rows_mark_the_top_degree() {
    let p = pushout_presentation(&truncated_associative(3, 3), 2, 2, &bounds(3, 2)).unwrap();
    let t = p.table();
    let rows = t.rows();
    assert_eq!(rows.len(), 4 * 3);
    assert!(rows.iter().all(|r| r.certified == (r.degree < 2)));
    assert!(t.to_string().lines().count() == rows.len() + 1);
}

