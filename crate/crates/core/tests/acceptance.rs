//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Tolerances and time budgets are fixed here.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use qdw_core::classify::*;
use qdw_core::group::{parse_subgroup, FiniteGroup, Subgroup};
use qdw_core::lattice::*;
use qdw_core::logical::*;

type Matrix = DMatrix<Complex64>;
type Outcome = Result<String, String>;

/// Floating-point identities of the logical layer.
const LOGICAL_TOL: f64 = 1e-10;
/// Defect dimensions such as √6.
const DIM_TOL: f64 = 1e-12;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn group(spec: &str) -> FiniteGroup {
    spec.parse::<qdw_core::group::GroupSpec>()
        .and_then(|s| s.build())
        .unwrap_or_else(|e| panic!("{spec}: {e}"))
}

fn classification_groups() -> Vec<FiniteGroup> {
    ["symmetric:3", "dihedral:4", "cyclic:4", "cyclic:6", "product:cyclic:2,cyclic:2"]
        .into_iter()
        .map(group)
        .collect()
}

fn subgroups(g: &FiniteGroup) -> Result<Vec<Subgroup>, String> {
    Ok(g.enumerate_subgroups().map_err(err)?.all().cloned().collect())
}

fn spec_of(g: &FiniteGroup, k: &Subgroup) -> String {
    k.names(g).join(",")
}

fn terms_for(g: &FiniteGroup, spec: &LatticeSpec) -> Result<(Lattice, TermSet), String> {
    let l = Lattice::build(spec, g).map_err(err)?;
    let t = hamiltonian_terms(&l, g, RimEdgeGauge::DanglingOnly).map_err(err)?;
    Ok((l, t))
}

fn s3_lagrangians() -> Outcome {
    let g = group("symmetric:3");
    let m = classify_anyons(&g).map_err(err)?;
    let mut seen = Vec::new();
    for (k, formula, mults) in [
        ("e,(12)", "A+C+D", [1, 0, 1, 1, 0, 0, 0, 0]),
        ("cyclic:(123)", "A+B+2F", [1, 1, 0, 0, 0, 2, 0, 0]),
    ] {
        let a = lagrangian_algebra(&g, &m, &parse_subgroup(&g, k).map_err(err)?).map_err(err)?;
        ensure(a.multiplicities == mults, || format!("{k}: {:?}", a.multiplicities))?;
        ensure(a.formula(&m) == formula, || format!("{k}: {}", a.formula(&m)))?;
        seen.push(formula);
    }
    Ok(seen.join(", "))
}

fn lagrangian_sum_rules() -> Outcome {
    let mut cases = 0;
    for g in classification_groups() {
        let m = classify_anyons(&g).map_err(err)?;
        for k in subgroups(&g)? {
            let a = lagrangian_algebra(&g, &m, &k).map_err(err)?;
            let case = || format!("{} / {{{}}}", g.label(), spec_of(&g, &k));
            ensure(a.dimension(&m) == g.order(), || format!("{}: Σ m d = {}", case(), a.dimension(&m)))?;
            ensure(a.multiplicities[0] == 1, || format!("{}: vacuum multiplicity", case()))?;
            ensure(a.support().iter().all(|&i| m.anyons()[i].is_boson()), || {
                format!("{}: condensed anyon with nontrivial twist", case())
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} subgroups"))
}

fn anyon_census() -> Outcome {
    for (spec, count) in [("cyclic:2", 4), ("cyclic:3", 9)] {
        let n = classify_anyons(&group(spec)).map_err(err)?.len();
        ensure(n == count, || format!("{spec}: {n} anyons"))?;
    }
    let m = classify_anyons(&group("symmetric:3")).map_err(err)?;
    let dims: Vec<usize> = m.anyons().iter().map(|a| a.dim).collect();
    ensure(dims == [1, 1, 2, 3, 3, 2, 2, 2], || format!("S3 dims {dims:?}"))?;
    let total: usize = dims.iter().map(|d| d * d).sum();
    ensure(total == 36, || format!("S3 Σd² = {total}"))?;
    Ok("4, 9, 8 labels; S3 Σd² = 36".into())
}

fn defect_sum_rules() -> Outcome {
    let mut cases = 0;
    for g in classification_groups() {
        let subs = subgroups(&g)?;
        for k1 in &subs {
            for k2 in &subs {
                let d = boundary_defects(&g, k1, k2).map_err(err)?;
                let total: f64 = d.iter().map(|x| x.dim * x.dim).sum();
                ensure((total - g.order() as f64).abs() <= DIM_TOL, || {
                    format!("{} {{{}}}/{{{}}}: Σd² = {total}", g.label(), spec_of(&g, k1), spec_of(&g, k2))
                })?;
                cases += 1;
            }
            let e = boundary_excitations(&g, k1).map_err(err)?;
            let total: f64 = e.iter().map(|x| x.dim * x.dim).sum();
            ensure((total - g.order() as f64).abs() <= DIM_TOL, || format!("excitations Σd² = {total}"))?;
        }
    }
    let g = group("symmetric:3");
    let (z2, z3) = (parse_subgroup(&g, "e,(12)").map_err(err)?, parse_subgroup(&g, "cyclic:(123)").map_err(err)?);
    let dims: Vec<f64> = boundary_excitations(&g, &z2).map_err(err)?.iter().map(|x| x.dim).collect();
    ensure(
        dims.len() == 3 && dims.iter().zip([1.0, 1.0, 2.0]).all(|(a, b)| (a - b).abs() <= DIM_TOL),
        || format!("(S3, Z2) excitation dims {dims:?}"),
    )?;
    let d = boundary_defects(&g, &z2, &z3).map_err(err)?;
    ensure(d.len() == 1 && (d[0].dim - 6f64.sqrt()).abs() <= DIM_TOL, || {
        format!("(S3, Z2, Z3) defects {:?}", d.iter().map(|x| x.dim).collect::<Vec<_>>())
    })?;
    Ok(format!("{cases} pairs; single √6 defect"))
}

fn qudit_double_formula() -> Outcome {
    let mut cases = 0;
    let mut groups = classification_groups();
    groups.push(group("cyclic:3"));
    for g in &groups {
        let m = classify_anyons(g).map_err(err)?;
        let subs = subgroups(g)?;
        for k1 in &subs {
            for k2 in &subs {
                let q = qudit_dimension(g, &m, k1, k2).map_err(err)?;
                ensure(q.via_condensation == q.via_defects, || format!("{q:?}"))?;
                cases += 1;
            }
        }
    }
    let g = group("cyclic:3");
    let m = classify_anyons(&g).map_err(err)?;
    let e = g.trivial_subgroup();
    let d = qudit_dimension(&g, &m, &e, &e).map_err(err)?.value();
    ensure(d == 3, || format!("Z3 rough/rough gives {d}"))?;
    Ok(format!("{cases} pairs; Z3 rough/rough = 3"))
}

fn commutation_audit() -> Outcome {
    let mut specs: Vec<(FiniteGroup, LatticeSpec)> = Vec::new();
    for s in ["cyclic:2", "cyclic:3", "symmetric:3"] {
        specs.push((group(s), LatticeSpec::torus(2, 2)));
    }
    for s in ["cyclic:2", "cyclic:3"] {
        let g = group(s);
        let subs = subgroups(&g)?;
        for k1 in &subs {
            for k2 in &subs {
                specs.push((g.clone(), LatticeSpec::annulus(3, 3, &spec_of(&g, k1), &spec_of(&g, k2))));
            }
        }
    }
    specs.push((group("symmetric:3"), LatticeSpec::annulus(3, 3, "e,(12)", "cyclic:(123)")));
    let mut pairs = 0;
    for (g, spec) in &specs {
        let (_, t) = terms_for(g, spec)?;
        let r = audit_commutation(&t, g).map_err(err)?;
        ensure(r.is_clean(), || format!("{} {spec:?}: {:?}", g.label(), r.noncommuting.first()))?;
        pairs += r.pairs_checked;
    }
    Ok(format!(
        "{} lattices, {pairs} pairs commute within {COMMUTATOR_TOLERANCE:e}",
        specs.len()
    ))
}

fn gsd_oracles() -> Outcome {
    let mut traced = 0;
    let mut run = |g: &FiniteGroup, spec: &LatticeSpec, expect: u64| -> Result<(), String> {
        let (_, t) = terms_for(g, spec)?;
        let gs = ground_space_dimension(&t, g, GsdMethod::Auto).map_err(err)?;
        traced += (gs.methods.len() > 1) as usize;
        ensure(gs.dimension == expect, || {
            format!("{} {spec:?}: GSD {} != {expect}", g.label(), gs.dimension)
        })
    };
    for (s, n) in [("cyclic:2", 4), ("cyclic:3", 9), ("symmetric:3", 8)] {
        let g = group(s);
        ensure(classify_anyons(&g).map_err(err)?.len() == n, || format!("{s} anyon count"))?;
        run(&g, &LatticeSpec::torus(2, 2), n as u64)?;
    }
    let s3 = group("symmetric:3");
    for k in subgroups(&s3)? {
        run(&s3, &LatticeSpec::disk(2, 2, &spec_of(&s3, &k)), 1)?;
    }
    let mut annuli = 0;
    for s in ["cyclic:2", "cyclic:3", "symmetric:3"] {
        let g = group(s);
        let m = classify_anyons(&g).map_err(err)?;
        let subs = subgroups(&g)?;
        for k1 in &subs {
            for k2 in &subs {
                let d = qudit_dimension(&g, &m, k1, k2).map_err(err)?.value();
                run(&g, &LatticeSpec::annulus(3, 3, &spec_of(&g, k1), &spec_of(&g, k2)), d)?;
                annuli += 1;
            }
        }
    }
    Ok(format!("3 tori, 6 disks, {annuli} annuli; trace agreed with counting on {traced} lattices"))
}

fn refinement() -> Outcome {
    let mut dims = Vec::new();
    for s in ["cyclic:2", "cyclic:3"] {
        let g = group(s);
        let (_, a) = terms_for(&g, &LatticeSpec::torus(2, 2))?;
        let (_, b) = terms_for(&g, &LatticeSpec::torus(3, 2))?;
        let da = ground_space_dimension(&a, &g, GsdMethod::Auto).map_err(err)?.dimension;
        let db = ground_space_dimension(&b, &g, GsdMethod::Auto).map_err(err)?.dimension;
        ensure(da == db, || format!("{s}: {da} vs {db}"))?;
        dims.push(da.to_string());
    }
    Ok(format!("2x2 = 3x2: {}", dims.join(", ")))
}

fn omega(k: i64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0)
}

fn qutrit() -> Outcome {
    let g = group("cyclic:3");
    let l = Lattice::build(&LatticeSpec::annulus(5, 5, "e", "e"), &g).map_err(err)?;
    let enc = Encoding::new(&g, &l).map_err(err)?;
    ensure(enc.dimension() == 3, || format!("d = {}", enc.dimension()))?;
    let (e, m) = (enc.data().anyon(0, 1), enc.data().anyon(1, 0));
    let x = enc.logical_operator(&enc.tunnel_operator(0, 1, e).map_err(err)?).map_err(err)?.matrix;
    let z = enc.logical_operator(&enc.loop_operator(1, m).map_err(err)?).map_err(err)?.matrix;
    let id = Matrix::identity(3, 3);
    let weyl = (&x * &z - &z * &x * omega(1)).norm();
    ensure(weyl <= LOGICAL_TOL, || format!("‖XZ - ωZX‖ = {weyl:.3e}"))?;
    let (x3, z3) = ((x.pow(3) - &id).norm(), (z.pow(3) - &id).norm());
    ensure(x3 <= LOGICAL_TOL && z3 <= LOGICAL_TOL, || format!("‖X³ - I‖ = {x3:.3e}, ‖Z³ - I‖ = {z3:.3e}"))?;

    let routes: [&[(usize, usize)]; 4] = [
        &[(0, 2), (1, 2), (2, 2)],
        &[(2, 0), (2, 1), (2, 2)],
        &[(5, 3), (4, 3), (3, 3)],
        &[(0, 4), (1, 4), (1, 3), (1, 2), (1, 1), (2, 1), (3, 1), (3, 2)],
    ];
    let base = enc.ground_matrix(&enc.tunnel_operator(0, 1, e).map_err(err)?).map_err(err)?;
    let mut worst: f64 = 0.0;
    for r in routes {
        let path = PrimalPath::from_vertices(&l, r).map_err(err)?;
        let t = enc.tunnel_operator_along(0, 1, e, Some(path), None).map_err(err)?;
        worst = worst.max((enc.ground_matrix(&t).map_err(err)? - &base).norm());
    }
    let loop_base = enc.ground_matrix(&enc.loop_operator(1, m).map_err(err)?).map_err(err)?;
    let spec = LoopSpec { hole: 1, primal_offset: 0, dual_ring: 2 };
    worst = worst.max((enc.ground_matrix(&enc.loop_operator_at(spec, m).map_err(err)?).map_err(err)? - &loop_base).norm());
    ensure(worst <= LOGICAL_TOL, || format!("rerouting changes the action by {worst:.3e}"))?;
    Ok(format!("d = 3, XZ = ωZX, X³ = Z³ = I; 4 tunnel reroutes and 1 loop deformation within {worst:.1e}"))
}

fn charge_projectors() -> Outcome {
    let mut details = Vec::new();
    for s in ["cyclic:2", "cyclic:3"] {
        let g = group(s);
        for (outer, inner) in [("trivial", "trivial"), ("full", "full")] {
            let l = Lattice::build(&LatticeSpec::annulus(3, 3, outer, inner), &g).map_err(err)?;
            let enc = Encoding::new(&g, &l).map_err(err)?;
            let fam = enc.charge_projectors(LoopSpec::around(1)).map_err(err)?;
            let r = fam.residuals();
            ensure(r.passes(LOGICAL_TOL), || format!("{s} {outer}/{inner}: {r:?}"))?;
            let ranks: usize = fam.ranks().iter().sum();
            ensure(ranks == enc.dimension(), || format!("{s}: ranks sum to {ranks}"))?;
            // the loops themselves are diagonal in the frame the projectors are diagonal in
            for b in 0..enc.data().len() {
                let w = enc.logical_operator(&enc.loop_operator(1, b).map_err(err)?).map_err(err)?.matrix;
                let off = (&w - Matrix::from_diagonal(&w.diagonal())).norm();
                ensure(off <= LOGICAL_TOL, || format!("{s}: loop {b} off-diagonal {off:.3e}"))?;
            }
            details.push(format!("{s} {outer}"));
        }
    }
    Ok(details.join(", "))
}

fn equivariance() -> Outcome {
    let mut cases = 0;
    for g in classification_groups() {
        let m = classify_anyons(&g).map_err(err)?;
        for k in subgroups(&g)? {
            let a = lagrangian_algebra(&g, &m, &k).map_err(err)?;
            for x in g.elements() {
                let b = lagrangian_algebra(&g, &m, &g.conjugate_subgroup(x, &k)).map_err(err)?;
                ensure(a.multiplicities == b.multiplicities, || {
                    format!("{}: conjugating {{{}}} by {}", g.label(), spec_of(&g, &k), g.name(x))
                })?;
                cases += 1;
            }
        }
    }
    let mut autos = 0;
    for s in ["symmetric:3", "product:cyclic:2,cyclic:2"] {
        let g = group(s);
        let m = classify_anyons(&g).map_err(err)?;
        let subs = subgroups(&g)?;
        for phi in g.automorphisms() {
            let act = symmetry_action(&g, &m, &phi).map_err(err)?;
            for k in &subs {
                let before = lagrangian_algebra(&g, &m, k).map_err(err)?;
                let after = lagrangian_algebra(&g, &m, &g.map_subgroup(&phi, k)).map_err(err)?;
                ensure(act.transport(&before) == after.multiplicities, || {
                    format!("{s}: automorphism {phi:?} on {{{}}}", spec_of(&g, k))
                })?;
            }
            autos += 1;
        }
        for x in g.elements() {
            let act = symmetry_action(&g, &m, &g.inner_automorphism(x)).map_err(err)?;
            ensure(act.is_trivial(), || format!("{s}: conjugation by {} permutes labels", g.name(x)))?;
        }
    }
    ensure(autos == 6 + 6, || format!("expected 12 automorphisms of S3 and Z2×Z2, found {autos}"))?;
    Ok(format!("{cases} conjugates; {autos} automorphisms transport condensates"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 11] = [
        ("S3 Lagrangian algebras", s3_lagrangians, Some(1)),
        ("Lagrangian dimension, vacuum and bosonic support", lagrangian_sum_rules, None),
        ("anyon censuses", anyon_census, Some(1)),
        ("excitation and defect sum rules", defect_sum_rules, Some(5)),
        ("qudit dimension double formula", qudit_double_formula, None),
        ("lattice commutation audit", commutation_audit, Some(120)),
        ("ground-space oracles", gsd_oracles, Some(600)),
        ("refinement invariance", refinement, None),
        ("Z3 logical qutrit", qutrit, Some(60)),
        ("charge projector family", charge_projectors, None),
        ("conjugation and automorphism equivariance", equivariance, None),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let over = budget.is_some_and(|b| elapsed > Duration::from_secs(b));
        let limit = budget.map_or(String::new(), |b| format!(" / {b} s"));
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the time budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {name}: {detail} [{:.2} s{limit}]", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 11 criteria pass", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
