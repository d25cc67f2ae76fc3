use std::sync::Arc;

use super::*;
use crate::exactla::{q, qr, unit_vector, RationalMatrix};

fn arc(o: &FinOperad) -> Arc<FinOperad> {
    Arc::new(o.clone())
}

#[test]
fn associative_operad_is_valid_with_unit_dimensions() {
    let a = associative_operad(5);
    assert!(a.operad.check_axioms().is_valid());
    for n in 0..=5 {
        assert_eq!(a.operad.component(n).dims(), &[1]);
    }
    let mu = &a.mu;
    let l = a.operad.compose(2, 1, 2, mu, mu);
    let r = a.operad.compose(2, 2, 2, mu, mu);
    assert_eq!(l, unit_vector(1, 0));
    assert_eq!(l, r);
}

#[test]
fn homology_of_zero_differential_operad_is_a_copy() {
    let a = associative_operad(4);
    let h = homology_operad(&a.operad);
    assert_eq!(h.operad, a.operad);
    let hm = h.multiplicative(&a).unwrap();
    assert_eq!(hm.mu, a.mu);
}

#[test]
fn formal_test_operad_dimensions_and_axioms() {
    let h = associative_operad(3);
    let (o, aug) = formal_test_operad(&h).unwrap();
    assert!(o.operad.check_axioms().is_valid());
    for n in 0..=3 {
        // h(n) = Q in degree 0: two copies in degree 0, one in degree 1
        assert_eq!(o.operad.component(n).dims(), &[2, 1]);
    }
    assert!(aug.is_weak_equivalence().holds());
    let ho = homology_operad(&o.operad);
    for n in 0..=3 {
        assert_eq!(ho.operad.component(n).homology_dims(), vec![1, 0]);
    }
    // H(aug) is an invertible operad morphism, so the structure constants of
    // H(O) and h agree after the change of basis
    let hh = homology_operad(&h.operad);
    let m = homology_map(&aug, &ho, &hh, arc(&ho.operad), arc(&hh.operad)).unwrap();
    for n in 0..=3 {
        assert_eq!(crate::exactla::rank(&m.flat(n)), 1);
    }
}

#[test]
fn formal_test_rejects_nonzero_differential() {
    let h = associative_operad(3);
    let (o, _) = formal_test_operad(&h).unwrap();
    assert!(matches!(formal_test_operad_plain(&o.operad), Err(Error::NonZeroDifferential { .. })));
}

#[test]
fn perturbed_product_fails_unitality() {
    let h = associative_operad(3);
    let (o, _) = formal_test_operad(&h).unwrap();
    let v_copy = formal_test_embed(&h.operad, &o.operad, 2, &h.mu, 1);
    let mu2 = crate::exactla::add(&o.mu, &v_copy);
    let r = MultiplicativeOperad::new(o.operad.clone(), mu2, o.basepoint.clone());
    assert!(matches!(r, Err(Error::InvalidMultiplicativeStructure(_))));
}

#[test]
fn identity_is_weak_equivalence_and_fibration() {
    let (o, _) = formal_test_operad(&associative_operad(3)).unwrap();
    let id = OperadMorphism::identity(arc(&o.operad));
    assert!(id.is_weak_equivalence().holds());
    assert!(id.is_operad_fibration());
}

#[test]
fn maps_to_the_trivial_operad_are_fibrations() {
    let s = arc(&truncated_associative(3, 3));
    let t = arc(&trivial_operad(3));
    let flat = (0..=3)
        .map(|n| if n == 1 { RationalMatrix::identity(1) } else { RationalMatrix::zeros(t.dim(n), s.dim(n)) })
        .collect();
    let f = OperadMorphism::from_flat(s, t, flat).unwrap();
    assert!(f.is_operad_fibration());
    assert!(!f.is_weak_equivalence().holds());
}

#[test]
fn associative_inclusion_misses_degree_one_part() {
    let (o, _) = formal_test_operad(&associative_operad(3)).unwrap();
    let f = associative_map(&o).unwrap();
    assert!(!f.is_operad_fibration());
    assert!(f.is_weak_equivalence().holds());
}

#[test]
fn morphism_validation_rejects_broken_maps() {
    let a = associative_operad(3);
    let s = arc(&a.operad);
    let mut flat: Vec<RationalMatrix> = (0..=3).map(|_| RationalMatrix::identity(1)).collect();
    flat[2] = RationalMatrix::scalar(1, &q(3));
    assert!(matches!(
        OperadMorphism::from_flat(s.clone(), s.clone(), flat),
        Err(Error::InvalidMorphism(_))
    ));
}

#[test]
fn scaling_identities() {
    let (o, _) = formal_test_operad(&associative_operad(3)).unwrap();
    let f = associative_map(&o).unwrap();
    assert!(f.same_maps(&star_scale(&q(1), &f).unwrap()));
    let ab = star_scale(&q(6), &f).unwrap();
    let a_b = star_scale(&q(2), &star_scale(&q(3), &f).unwrap()).unwrap();
    assert!(ab.same_maps(&a_b));
    assert_eq!(star_scale(&q(0), &f).unwrap_err(), Error::InvalidScalar);

    let target = f.target().clone();
    let phi = scaling_automorphism(&qr(-2, 3), target.clone()).unwrap();
    let phi_inv = scaling_automorphism(&qr(-3, 2), target.clone()).unwrap();
    assert!(phi.then(&phi_inv).unwrap().same_maps(&OperadMorphism::identity(target.clone())));
    assert!(f.then(&phi).unwrap().same_maps(&star_scale(&qr(-2, 3), &f).unwrap()));
    assert!(scaling_automorphism(&q(1), target.clone())
        .unwrap()
        .same_maps(&OperadMorphism::identity(target)));
}

fn formal_test_witness() -> (FormalityWitness, OperadMorphism) {
    let h = associative_operad(3);
    let (o, aug) = formal_test_operad(&h).unwrap();
    let f = associative_map(&o).unwrap();
    let g = associative_map(&h).unwrap();
    let a = f.source().clone();
    // rebuild g and the augmentation over shared endpoints
    let g = OperadMorphism::from_flat(a.clone(), aug.target().clone(), (0..=3).map(|n| g.flat(n)).collect()).unwrap();
    let aug = OperadMorphism::from_flat(f.target().clone(), aug.target().clone(), (0..=3).map(|n| aug.flat(n)).collect())
        .unwrap();
    let step = WitnessStep { direction: Direction::Forward, top: OperadMorphism::identity(a), bottom: aug };
    (FormalityWitness { verticals: vec![f.clone(), g], steps: vec![step] }, f)
}

#[test]
fn formality_witness_through_augmentation_passes() {
    let (w, f) = formal_test_witness();
    let rep = check_formality_witness(&w, &f, true).unwrap();
    assert_eq!(rep.squares_checked, 1);
}

#[test]
fn trivial_witness_for_zero_differential() {
    let a = associative_operad(4);
    let f = associative_map(&a).unwrap();
    let w = FormalityWitness { verticals: vec![f.clone()], steps: vec![] };
    assert!(check_formality_witness(&w, &f, true).is_ok());
}

#[test]
fn zero_horizontal_is_not_a_weak_equivalence() {
    let (mut w, f) = formal_test_witness();
    let b = &w.steps[0].bottom;
    let zero = (0..=3).map(|n| RationalMatrix::zeros(b.target().dim(n), b.source().dim(n))).collect();
    w.steps[0].bottom = OperadMorphism::from_flat_unchecked(b.source().clone(), b.target().clone(), zero).unwrap();
    assert_eq!(
        check_formality_witness(&w, &f, true).unwrap_err(),
        Error::NotWeakEquivalence { arrow: 1, arity: 0, degree: 0 }
    );
}

#[test]
fn rescaled_bottom_breaks_commutativity() {
    let (mut w, f) = formal_test_witness();
    let b = w.steps[0].bottom.clone();
    let phi = scaling_automorphism(&q(2), b.target().clone()).unwrap();
    w.steps[0].bottom = b.then(&phi).unwrap();
    assert!(matches!(
        check_formality_witness(&w, &f, true),
        Err(Error::NonCommutingSquare { square: 0, arity: 0, .. })
    ));
}

#[test]
fn witness_must_end_at_homology() {
    let (mut w, f) = formal_test_witness();
    w.verticals.pop();
    w.steps.clear();
    assert!(matches!(check_formality_witness(&w, &f, true), Err(Error::EndpointMismatch(_))));
}
