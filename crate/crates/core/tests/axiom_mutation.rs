use nsoperad::exactla::q;
use nsoperad::free::{concentrated_sequence, free_operad, CellKind, FreeBounds};
use nsoperad::operad::{AxiomViolation, FinOperad};

fn binary_free_operad() -> FinOperad {
    let s = concentrated_sequence(0, 2, CellKind::Sphere, 4).unwrap();
    free_operad(&s, &FreeBounds { arity_max: 4, max_degree: 0, max_vertices: None }).unwrap().operad
}

fn corrupt(o: &FinOperad, key: (usize, usize, usize), idx: usize) -> FinOperad {
    let mut tables = o.compositions().clone();
    let entry = &mut tables.get_mut(&key).unwrap()[idx];
    assert_eq!(entry.len(), 1);
    entry[0].1 = q(2);
    FinOperad::from_tables(o.components().to_vec(), o.unit().clone(), tables).unwrap()
}

#[test]
fn free_binary_operad_is_valid() {
    let o = binary_free_operad();
    assert_eq!((0..=4).map(|n| o.dim(n)).collect::<Vec<_>>(), [0, 1, 1, 2, 5]);
    assert!(o.check_axioms().is_valid());
}

#[test]
fn one_corrupted_constant_gives_one_associativity_violation() {
    let o = binary_free_operad();
    // the second arity-3 tree composed with μ in its first slot
    let report = corrupt(&o, (3, 1, 2), 1).check_axioms();
    assert_eq!(
        report.violations,
        [AxiomViolation::Sequential { arities: (2, 2, 2), positions: (1, 1), basis: (0, 0, 0) }]
    );
    let report = corrupt(&o, (3, 1, 2), 0).check_axioms();
    assert_eq!(
        report.violations,
        [AxiomViolation::Parallel { arities: (2, 2, 2), positions: (1, 2), basis: (0, 0, 0) }]
    );
}

#[test]
fn corrupted_unary_composites_break_the_unit_law() {
    let o = binary_free_operad();
    let report = corrupt(&o, (1, 1, 4), 2).check_axioms();
    assert!(!report.violations.is_empty());
    assert!(report.violations.iter().all(|v| matches!(v, AxiomViolation::LeftUnit { arity: 4, x: 2 } | AxiomViolation::Sequential { .. } | AxiomViolation::Parallel { .. })));
    assert!(report.violations.contains(&AxiomViolation::LeftUnit { arity: 4, x: 2 }));
}
