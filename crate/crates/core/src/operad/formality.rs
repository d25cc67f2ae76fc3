use super::morphism::same;
use super::{homology_operad, OperadMorphism};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Horizontal arrows point from column `i` to column `i + 1`.
    Forward,
    /// Horizontal arrows point from column `i + 1` to column `i`.
    Backward,
}

/// One square of the zigzag: `top` joins the sources of two neighbouring
/// vertical morphisms, `bottom` joins their targets.
#[derive(Clone, Debug)]
pub struct WitnessStep {
    pub direction: Direction,
    pub top: OperadMorphism,
    pub bottom: OperadMorphism,
}

/// A chain of commutative squares joining a morphism `f` (the first vertical)
/// to a morphism between homology operads (the last vertical).
#[derive(Clone, Debug)]
pub struct FormalityWitness {
    pub verticals: Vec<OperadMorphism>,
    pub steps: Vec<WitnessStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalityReport {
    pub squares_checked: usize,
    pub arrows_checked: usize,
}

fn dims(o: &super::FinOperad) -> Vec<Vec<usize>> {
    (0..=o.arity_max()).map(|n| o.component(n).dims().to_vec()).collect()
}

fn trim(mut v: Vec<usize>) -> Vec<usize> {
    while v.len() > 1 && v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn same_dims(a: Vec<Vec<usize>>, b: Vec<Vec<usize>>) -> bool {
    a.len() == b.len() && a.into_iter().zip(b).all(|(x, y)| trim(x) == trim(y))
}

fn is_associative(o: &super::FinOperad) -> bool {
    (0..=o.arity_max()).all(|n| trim(o.component(n).dims().to_vec()) == vec![1])
}

/// Check the zigzag connecting `f` with a morphism of homology operads.
///
/// Horizontal arrows are numbered `2i` (top of step `i`) and `2i + 1`
/// (bottom of step `i`) in errors.
pub fn check_formality_witness(
    w: &FormalityWitness,
    f: &OperadMorphism,
    multiplicative: bool,
) -> Result<FormalityReport> {
    let (first, last) = match (w.verticals.first(), w.verticals.last()) {
        (Some(a), Some(b)) if w.verticals.len() == w.steps.len() + 1 => (a, b),
        _ => return Err(Error::EndpointMismatch("need one more vertical than steps".into())),
    };
    if !same(first.source(), f.source()) || !same(first.target(), f.target()) || !first.same_maps(f) {
        return Err(Error::EndpointMismatch("first vertical is not the given morphism".into()));
    }
    let hs = homology_operad(f.source());
    let ht = homology_operad(f.target());
    if !same_dims(dims(last.source()), dims(&hs.operad)) || !same_dims(dims(last.target()), dims(&ht.operad)) {
        return Err(Error::EndpointMismatch("last vertical does not have homology dimensions".into()));
    }
    if !last.source().has_zero_differential() || !last.target().has_zero_differential() {
        return Err(Error::EndpointMismatch("last vertical must be between zero-differential operads".into()));
    }

    let mut arrows_checked = 0;
    for (i, step) in w.steps.iter().enumerate() {
        let (l, r) = (&w.verticals[i], &w.verticals[i + 1]);
        let (from, to) = match step.direction {
            Direction::Forward => (l, r),
            Direction::Backward => (r, l),
        };
        let fits = same(step.top.source(), from.source())
            && same(step.top.target(), to.source())
            && same(step.bottom.source(), from.target())
            && same(step.bottom.target(), to.target());
        if !fits {
            return Err(Error::EndpointMismatch(format!("step {i} does not join its verticals")));
        }
        for (k, arrow) in [(2 * i, &step.top), (2 * i + 1, &step.bottom)] {
            arrows_checked += 1;
            if let Some((arity, degree)) = arrow.is_weak_equivalence().first_failure() {
                return Err(Error::NotWeakEquivalence { arrow: k, arity, degree });
            }
        }
        // to ∘ top == bottom ∘ from
        for n in 0..=from.source().arity_max() {
            let lhs = to.flat(n).mul(&step.top.flat(n));
            let rhs = step.bottom.flat(n).mul(&from.flat(n));
            if lhs != rhs {
                let diff = lhs.sub(&rhs);
                let basis = diff.entries().map(|(_, c, _)| c).min().unwrap_or(0);
                return Err(Error::NonCommutingSquare { square: i, arity: n, basis });
            }
        }
        if multiplicative {
            let ok = is_associative(step.top.source())
                && same(step.top.source(), step.top.target())
                && step.top.same_maps(&OperadMorphism::identity(step.top.source().clone()));
            if !ok {
                return Err(Error::EndpointMismatch(format!("top arrow of step {i} is not the identity of A")));
            }
        }
    }
    if multiplicative && !w.verticals.iter().all(|v| is_associative(v.source())) {
        return Err(Error::EndpointMismatch("every source must be the associative operad".into()));
    }
    Ok(FormalityReport { squares_checked: w.steps.len(), arrows_checked })
}
