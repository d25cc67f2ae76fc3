//! Acceptance criteria 1 to 10. Each criterion prints one PASS or FAIL line;
//! the run exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nsoperad::cli::format::{parse_bicomplex, OperadDocument};
use nsoperad::exactla::{is_zero_vector, q, qr, sign, zero_vector, Rational};
use nsoperad::free::{
    concentrated_sequence, free_operad, pushout_oracle, pushout_presentation, CellKind, FreeBounds, OracleRelations,
    PushoutBounds,
};
use nsoperad::hochschild::{
    bracket, circle, cosimplicial_of, cup, hochschild_cohomology, hochschild_of_homology_comparison, CosimplicialMap,
    HochschildCochain, HochschildData,
};
use nsoperad::operad::{
    associative_map, associative_operad, formal_test_operad, scaling_automorphism, star_scale, trivial_operad,
    truncated_associative, MultiplicativeOperad,
};
use nsoperad::poisson::poisson_operad;
use nsoperad::specseq::{collapse_report, Bicomplex};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn catalan(n: usize) -> usize {
    (0..n).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

/// Set partitions of `{1..n}` as block sizes, one entry per partition.
fn partition_block_sizes(n: usize) -> Vec<Vec<usize>> {
    // restricted growth strings
    fn go(i: usize, n: usize, blocks: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] += 1;
            go(i + 1, n, blocks, out);
            blocks[b] -= 1;
        }
        blocks.push(1);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// Degree-wise dimensions of `Poiss(n)` from set partitions: a block `B`
/// carries `(|B|-1)!` Lie words with `|B|-1` brackets of degree `m`.
fn poisson_dims_by_partitions(n: usize, m: usize) -> Vec<usize> {
    let mut dims = vec![0; (n.saturating_sub(1)) * m + 1];
    for blocks in partition_block_sizes(n) {
        let brackets: usize = blocks.iter().map(|b| b - 1).sum();
        dims[brackets * m] += blocks.iter().map(|&b| factorial(b - 1)).product::<usize>();
    }
    dims
}

/// Coefficients of `prod_{i=1}^{n-1} (1 + i t^m)`.
fn poisson_dims_by_product(n: usize, m: usize) -> Vec<usize> {
    let mut poly = vec![1usize];
    for i in 1..n {
        let mut next = vec![0; poly.len() + m];
        for (k, c) in poly.iter().enumerate() {
            next[k] += c;
            next[k + m] += i * c;
        }
        poly = next;
    }
    poly
}

fn criterion_1() -> Outcome {
    for d in [3, 4] {
        let p = poisson_operad(d, 6).map_err(|e| e.to_string())?;
        let m = d - 1;
        for n in 0..=6 {
            let c = p.operad().component(n);
            check(c.total_dim() == factorial(n), || format!("d={d} n={n}: dim {} != n!", c.total_dim()))?;
            let mut dims = c.dims().to_vec();
            let mut oracle = poisson_dims_by_partitions(n, m);
            let product = poisson_dims_by_product(n, m);
            dims.resize(product.len().max(dims.len()), 0);
            oracle.resize(dims.len(), 0);
            let mut product = product;
            product.resize(dims.len(), 0);
            check(dims == oracle, || format!("d={d} n={n}: {dims:?} vs partitions {oracle:?}"))?;
            check(dims == product, || format!("d={d} n={n}: {dims:?} vs product {product:?}"))?;
        }
    }
    Ok("dims of Poiss(n), n <= 6, d = 3,4 match both oracles".into())
}

fn criterion_2() -> Outcome {
    let mut total = 0;
    for d in [2, 3, 4] {
        let p = poisson_operad(d, 4).map_err(|e| e.to_string())?;
        let r = p.operad().check_axioms();
        check(r.violations.is_empty(), || format!("d={d}: {} violations, first {:?}", r.violations.len(), r.violations[0]))?;
        p.multiplicative.validate().map_err(|e| format!("d={d}: {e}"))?;
        total += r.instances_checked;
    }
    Ok(format!("{total} axiom instances checked"))
}

fn criterion_3() -> Outcome {
    let s = concentrated_sequence(0, 2, CellKind::Sphere, 8).map_err(|e| e.to_string())?;
    let f = free_operad(&s, &FreeBounds { arity_max: 8, max_degree: 0, max_vertices: None }).map_err(|e| e.to_string())?;
    for n in 2..=8 {
        let d = f.operad.component(n).dim(0);
        check(d == catalan(n - 1), || format!("arity {n}: {d} != C_{}", n - 1))?;
    }
    Ok("dim F(S^{0,2})(n)_0 = C_{n-1} for 2 <= n <= 8".into())
}

fn criterion_4() -> Outcome {
    let attach = concentrated_sequence(2, 2, CellKind::Disk, 4).map_err(|e| e.to_string())?;
    let pb = PushoutBounds { arity_max: 4, max_degree: 4, max_odd_vertices: None };
    let fb = FreeBounds { arity_max: 4, max_degree: 4, max_vertices: None };
    let mut cells = 0;
    for (name, o) in [("trivial", trivial_operad(4)), ("associative<=3", truncated_associative(3, 4))] {
        let p = pushout_presentation(&o, 2, 2, &pb).map_err(|e| e.to_string())?;
        let oracle = pushout_oracle(&o, &attach, &OracleRelations::None, &fb).map_err(|e| e.to_string())?;
        let table = p.table();
        let rows = table.rows();
        let oracle_rows = oracle.rows();
        check(rows.len() == oracle_rows.len(), || format!("{name}: table shapes differ"))?;
        for (a, b) in rows.iter().zip(&oracle_rows) {
            if a.certified && b.certified {
                check(a == b, || format!("{name}: presentation {a:?} vs oracle {b:?}"))?;
                cells += 1;
            }
        }
        let w = p.inclusion.is_weak_equivalence();
        check(w.holds_below(4), || format!("{name}: inclusion fails at {:?}", w.first_failure()))?;
    }
    check(cells > 0, || "no certified cells".into())?;
    Ok(format!("{cells} certified (arity, degree) cells agree; inclusions are quasi-isomorphisms"))
}

fn criterion_5() -> Outcome {
    let a = associative_operad(6);
    let h = hochschild_cohomology(&a, -6, 3, 6).map_err(|e| e.to_string())?;
    let mut certified = 0;
    for r in h.rows.iter().filter(|r| r.certified) {
        check(r.dim == usize::from(r.t == 0), || format!("HH^{} has dimension {}", r.t, r.dim))?;
        certified += 1;
    }
    check(h.row(0).is_some_and(|r| r.certified), || "HH^0 not certified".into())?;
    Ok(format!("HH^0 = Q and {} other certified degrees vanish", certified - 1))
}

fn criterion_6() -> Outcome {
    let mut cells = 0;
    for d in [3, 4] {
        let p = poisson_operad(d, 5).map_err(|e| e.to_string())?;
        let data = HochschildData::new(Arc::new(p.multiplicative), 5).map_err(|e| e.to_string())?;
        let rep = collapse_report(&data.bicomplex, 6).map_err(|e| e.to_string())?;
        check(rep.collapses_at_e2(), || format!("d={d}: {}", rep.verdict()))?;
        let e2 = &rep.pages[1];
        for pg in rep.pages.iter().skip(2).chain(std::iter::once(&rep.infinity)) {
            for c in pg.cells.iter().filter(|c| c.certified) {
                check(c.dim == e2.dim(c.p, c.q), || format!("d={d}: E_{}({},{}) != E_2", pg.r, c.p, c.q))?;
                cells += 1;
            }
        }
    }
    Ok(format!("E_r = E_2 on {cells} certified cells, d = 3,4"))
}

fn criterion_7() -> Outcome {
    let h = poisson_operad(3, 4).map_err(|e| e.to_string())?.multiplicative;
    let (o, aug) = formal_test_operad(&h).map_err(|e| e.to_string())?;
    let (cs, ct) = (cosimplicial_of(&o).map_err(|e| e.to_string())?, cosimplicial_of(&h).map_err(|e| e.to_string())?);
    let f = CosimplicialMap::from_morphism(&aug, cs, ct).map_err(|e| e.to_string())?;
    f.check_column_quasi_isos().map_err(|e| e.to_string())?;
    let e2 = f.compare_e2().map_err(|e| e.to_string())?;
    check(e2.iso_on_certified(), || "E_2 comparison is not an isomorphism on certified cells".into())?;
    let e2_cells = e2.cells.iter().filter(|c| c.certified).count();
    let (ho, hh) = (
        hochschild_cohomology(&o, -4, 4, 4).map_err(|e| e.to_string())?,
        hochschild_cohomology(&h, -4, 4, 4).map_err(|e| e.to_string())?,
    );
    let mut rows = 0;
    for (a, b) in ho.rows.iter().zip(&hh.rows) {
        if a.certified && b.certified {
            check(a.dim == b.dim, || format!("HH^{}: {} vs {}", a.t, a.dim, b.dim))?;
            rows += 1;
        }
    }
    let cmp = hochschild_of_homology_comparison(&o, -4, 4, 4).map_err(|e| e.to_string())?;
    check(cmp.equal_on_certified(), || "comparison with the homology operad disagrees".into())?;
    Ok(format!("E_2 iso on {e2_cells} certified cells; HH dims agree in {rows} certified degrees"))
}

fn random_cochain(h: &Arc<MultiplicativeOperad>, p: usize, rng: &mut ChaCha8Rng) -> HochschildCochain {
    let c = h.operad.component(p);
    loop {
        let k = rng.gen_range(0..=c.max_degree());
        let mut v = zero_vector(c.total_dim());
        for j in 0..c.dim(k) {
            v[c.offset(k) + j] = q(rng.gen_range(-2..=2));
        }
        if !is_zero_vector(&v) {
            return HochschildCochain::homogeneous(h.clone(), p, k, v).unwrap();
        }
    }
}

fn arity(x: &HochschildCochain) -> usize {
    x.parts().keys().copied().max().unwrap_or(0)
}

fn signed(e: isize) -> Rational {
    sign(e.rem_euclid(2) as usize)
}

fn criterion_8() -> Outcome {
    const SAMPLES: usize = 100;
    let h = Arc::new(poisson_operad(3, 5).map_err(|e| e.to_string())?.multiplicative);
    let top = h.operad.arity_max();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut dd, mut hc, mut jac) = (0, 0, 0);
    for s in 0..SAMPLES {
        let ps: Vec<usize> = loop {
            let ps: Vec<usize> = (0..3).map(|_| rng.gen_range(0..=3)).collect();
            if ps.iter().sum::<usize>() <= top + 1 {
                break ps;
            }
        };
        let (x, y, z) = (random_cochain(&h, ps[0], &mut rng), random_cochain(&h, ps[1], &mut rng), random_cochain(&h, ps[2], &mut rng));
        let (tx, ty) = (x.total_degree(), y.total_degree());
        if arity(&x) + 2 <= top {
            check(x.differential().differential().is_zero(), || format!("sample {s}: D^2 != 0"))?;
            dd += 1;
        }
        if arity(&x) + arity(&y) < top {
            let e = |r: Result<HochschildCochain, _>| r.map_err(|e: nsoperad::Error| e.to_string());
            let lhs = e(cup(&x, &y))?.combine(&e(cup(&y, &x))?, &-signed(tx * ty)).map_err(|e| e.to_string())?;
            let rhs = e(circle(&x, &y))?
                .differential()
                .sub(&e(circle(&x.differential(), &y))?)
                .map_err(|e| e.to_string())?
                .combine(&e(circle(&x, &y.differential()))?, &-signed(tx + 1))
                .map_err(|e| e.to_string())?;
            check(lhs == rhs.scale(&signed(tx)), || format!("sample {s}: homotopy commutativity fails"))?;
            hc += 1;
        }
        let b = |a: &HochschildCochain, c: &HochschildCochain| bracket(a, c).unwrap();
        let lhs = b(&x, &b(&y, &z));
        let rhs = b(&b(&x, &y), &z).combine(&b(&y, &b(&x, &z)), &signed((tx + 1) * (ty + 1))).unwrap();
        check(lhs == rhs, || format!("sample {s}: graded Jacobi fails"))?;
        jac += 1;
    }
    // graded commutativity of cup on classes of sampled cocycles
    let data = HochschildData::new(h.clone(), top).map_err(|e| e.to_string())?;
    let coh = data.cohomology(-4, 2).map_err(|e| e.to_string())?;
    // cocycles of arity at most 2 per total degree, so both products stay
    // strictly below the top column
    let rows: Vec<Vec<&HochschildCochain>> = coh
        .representatives
        .iter()
        .map(|reps| reps.iter().filter(|x| arity(x) <= 2).collect::<Vec<_>>())
        .filter(|reps| !reps.is_empty())
        .collect();
    check(!rows.is_empty(), || "no low-arity cocycles".into())?;
    let combination = |rng: &mut ChaCha8Rng| {
        let reps = &rows[rng.gen_range(0..rows.len())];
        loop {
            let mut x = reps[0].scale(&q(0));
            for r in reps {
                x = x.combine(r, &qr(rng.gen_range(-3..=3), rng.gen_range(1..=2))).unwrap();
            }
            if !x.is_zero() {
                return x;
            }
        }
    };
    let mut classes = 0;
    for _ in 0..SAMPLES {
        let (x, y) = (combination(&mut rng), combination(&mut rng));
        let xy = cup(&x, &y).unwrap();
        let yx = cup(&y, &x).unwrap().scale(&signed(x.total_degree() * y.total_degree()));
        let diff = xy.sub(&yx).unwrap();
        let class = data.class_of(&diff).ok_or_else(|| "cup of cocycles is not a normalized cocycle".to_string())?;
        check(is_zero_vector(&class), || format!("[x cup y] != ±[y cup x] in degrees {}, {}", x.total_degree(), y.total_degree()))?;
        classes += 1;
    }
    check(dd + hc + jac >= SAMPLES && classes == SAMPLES, || "too few samples".into())?;
    Ok(format!("D^2 on {dd}, homotopy commutativity on {hc}, Jacobi on {jac}, cup on {classes} class pairs"))
}

fn criterion_9() -> Outcome {
    let h = poisson_operad(3, 4).map_err(|e| e.to_string())?.multiplicative;
    let f = associative_map(&h).map_err(|e| e.to_string())?;
    let target = f.target().clone();
    for a in [q(2), q(-1), qr(1, 3)] {
        let scaled = star_scale(&a, &f).map_err(|e| format!("a={a}: {e}"))?;
        let phi = scaling_automorphism(&a, target.clone()).map_err(|e| e.to_string())?;
        let phi_inv = scaling_automorphism(&(Rational::from_integer(1.into()) / &a), target.clone()).map_err(|e| e.to_string())?;
        let round = phi_inv.then(&phi).map_err(|e| e.to_string())?;
        check(round.same_maps(&nsoperad::operad::OperadMorphism::identity(target.clone())), || format!("a={a}: phi_a phi_1/a != id"))?;
        let composed = f.then(&phi).map_err(|e| e.to_string())?;
        check(composed.same_maps(&scaled), || format!("a={a}: phi_a f != a*f"))?;
    }
    Ok("star_scale is a morphism and phi_a f = a*f for a = 2, -1, 1/3".into())
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn criterion_10() -> Outcome {
    let mut cases: Vec<(String, Bicomplex, Option<Vec<(isize, usize)>>)> = Vec::new();
    let text = std::fs::read_to_string(fixture("staircase.bc")).map_err(|e| e.to_string())?;
    cases.push(("staircase.bc".into(), parse_bicomplex(&text).map_err(|e| e.to_string())?, None));
    for name in ["associative.od", "poisson_d3_a4.od", "formal_poisson_d3_a3.od"] {
        let text = std::fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
        let doc = OperadDocument::parse(&text).map_err(|e| e.to_string())?;
        let m = doc.multiplicative().expect("multiplicative fixture").map_err(|e| e.to_string())?;
        let p_max = m.operad.arity_max();
        let data = HochschildData::new(Arc::new(m.clone()), p_max).map_err(|e| e.to_string())?;
        let (lo, hi) = data.bicomplex.total_range();
        let hh = hochschild_cohomology(&m, lo, hi, p_max).map_err(|e| e.to_string())?;
        let dims = hh.rows.iter().map(|r| (r.t, r.dim)).collect();
        cases.push((name.into(), data.bicomplex, Some(dims)));
    }
    for d in [3, 4] {
        let m = poisson_operad(d, 5).map_err(|e| e.to_string())?.multiplicative;
        let data = HochschildData::new(Arc::new(m.clone()), 5).map_err(|e| e.to_string())?;
        let (lo, hi) = data.bicomplex.total_range();
        let hh = hochschild_cohomology(&m, lo, hi, 5).map_err(|e| e.to_string())?;
        let dims = hh.rows.iter().map(|r| (r.t, r.dim)).collect();
        cases.push((format!("Poiss d={d}"), data.bicomplex, Some(dims)));
    }
    for (name, b, hh) in &cases {
        let rep = collapse_report(b, 4).map_err(|e| e.to_string())?;
        check(rep.euler.windows(2).all(|w| w[0] == w[1]), || format!("{name}: Euler characteristics {:?}", rep.euler))?;
        let (lo, hi) = b.total_range();
        for t in lo..=hi {
            let total = b.total_homology_dim(t);
            check(rep.infinity.total(t) == total, || format!("{name}: sum E_inf = {} but H = {total} at t={t}", rep.infinity.total(t)))?;
        }
        if let Some(hh) = hh {
            for &(t, d) in hh {
                check(rep.infinity.total(t) == d, || format!("{name}: sum E_inf = {} but HH^{t} = {d}", rep.infinity.total(t)))?;
            }
        }
    }
    Ok(format!("{} fixtures", cases.len()))
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome, Duration); 10] = [
        (1, "Poisson dimensions", criterion_1, Duration::from_secs(10)),
        (2, "operad axioms", criterion_2, Duration::from_secs(60)),
        (3, "free operad Catalan law", criterion_3, Duration::from_secs(10)),
        (4, "pushout presentation vs oracle", criterion_4, Duration::from_secs(300)),
        (5, "Hochschild of the associative operad", criterion_5, Duration::from_secs(300)),
        (6, "collapse for zero differentials", criterion_6, Duration::from_secs(120)),
        (7, "quasi-isomorphism invariance", criterion_7, Duration::from_secs(300)),
        (8, "Gerstenhaber identities", criterion_8, Duration::from_secs(300)),
        (9, "scaling action", criterion_9, Duration::from_secs(300)),
        (10, "spectral sequence conservation", criterion_10, Duration::from_secs(300)),
    ];
    let mut failed = Vec::new();
    for (n, name, run, budget) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}")),
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {n:>2} PASS {name}: {detail} ({elapsed:.1?})"),
            Err(why) => {
                println!("criterion {n:>2} FAIL {name}: {why} ({elapsed:.1?})");
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
