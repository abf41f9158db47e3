use qdw_core::classify::{classify_anyons, qudit_dimension};
use qdw_core::group::{FiniteGroup, Subgroup};
use qdw_core::lattice::*;

fn terms_for(g: &FiniteGroup, spec: &LatticeSpec) -> (Lattice, TermSet) {
    let l = Lattice::build(spec, g).unwrap();
    let t = hamiltonian_terms(&l, g, RimEdgeGauge::DanglingOnly).unwrap();
    (l, t)
}

fn subgroup_spec(g: &FiniteGroup, k: &Subgroup) -> String {
    k.names(g).join(",")
}

#[test]
fn toric_code_torus_all_methods() {
    let g = FiniteGroup::cyclic(2).unwrap();
    let (_, t) = terms_for(&g, &LatticeSpec::torus(2, 2));
    assert!(audit_commutation(&t, &g).unwrap().is_clean());
    for m in [GsdMethod::Trace, GsdMethod::Counting, GsdMethod::Dense, GsdMethod::Auto] {
        assert_eq!(ground_space_dimension(&t, &g, m).unwrap().dimension, 4, "{m:?}");
    }
}

#[test]
fn toric_code_terms_are_stabilizers() {
    // A(v) = (1 + Π_star X)/2 and B(p) = (1 + Π_∂p Z)/2 in the Z2 basis.
    let g = FiniteGroup::cyclic(2).unwrap();
    let (l, t) = terms_for(&g, &LatticeSpec::torus(2, 2));
    for term in &t.terms {
        let support = term.op.support();
        let mut x = vec![0u8; l.num_edges()];
        for code in 0..(1u32 << support.len()) {
            for (i, &e) in support.iter().enumerate() {
                x[e] = ((code >> i) & 1) as u8;
            }
            let mut images = Vec::new();
            term.op.for_each_image(&g, &mut x, &mut |y, w| images.push((y.to_vec(), w)));
            match term.kind {
                TermKind::BulkVertex => {
                    assert_eq!(images.len(), 2);
                    let flipped: Vec<u8> = (0..x.len())
                        .map(|e| if support.contains(&e) { 1 - x[e] } else { x[e] })
                        .collect();
                    assert_eq!(images[1].0, flipped);
                    assert!(images.iter().all(|(_, w)| (*w - 0.5).abs() < 1e-15));
                }
                TermKind::BulkPlaquette => {
                    let parity = support.iter().map(|&e| x[e] as u32).sum::<u32>() % 2;
                    assert_eq!(images.len(), (parity == 0) as usize);
                }
                _ => unreachable!(),
            }
        }
    }
}

#[test]
fn torus_gsd_equals_anyon_count() {
    for (g, expect) in [
        (FiniteGroup::cyclic(2).unwrap(), 4),
        (FiniteGroup::cyclic(3).unwrap(), 9),
        (FiniteGroup::symmetric(3).unwrap(), 8),
    ] {
        let (_, t) = terms_for(&g, &LatticeSpec::torus(2, 2));
        let gs = ground_space_dimension(&t, &g, GsdMethod::Auto).unwrap();
        assert_eq!(gs.dimension, expect);
        assert_eq!(gs.dimension as usize, classify_anyons(&g).unwrap().len());
        assert_eq!(gs.methods.len(), 2, "trace should also run");
    }
}

#[test]
fn refinement_invariance() {
    for g in [FiniteGroup::cyclic(2).unwrap(), FiniteGroup::cyclic(3).unwrap()] {
        let (_, a) = terms_for(&g, &LatticeSpec::torus(2, 2));
        let (_, b) = terms_for(&g, &LatticeSpec::torus(3, 2));
        let da = ground_space_dimension(&a, &g, GsdMethod::Auto).unwrap();
        let db = ground_space_dimension(&b, &g, GsdMethod::Auto).unwrap();
        assert_eq!(da.dimension, db.dimension);
    }
}

#[test]
fn disk_has_unique_ground_state() {
    let g = FiniteGroup::symmetric(3).unwrap();
    for k in g.enumerate_subgroups().unwrap().all() {
        let spec = LatticeSpec::disk(2, 2, &subgroup_spec(&g, k));
        let (_, t) = terms_for(&g, &spec);
        assert_eq!(counting_method(&t, &g).unwrap(), 1);
        let small = LatticeSpec::disk(1, 2, &subgroup_spec(&g, k));
        let (_, t) = terms_for(&g, &small);
        assert_eq!(ground_space_dimension(&t, &g, GsdMethod::Auto).unwrap().dimension, 1);
    }
}

#[test]
fn annulus_gsd_matches_qudit_dimension() {
    for g in [
        FiniteGroup::cyclic(2).unwrap(),
        FiniteGroup::cyclic(3).unwrap(),
        FiniteGroup::symmetric(3).unwrap(),
    ] {
        let model = classify_anyons(&g).unwrap();
        let subs: Vec<Subgroup> = g.enumerate_subgroups().unwrap().all().cloned().collect();
        for k1 in &subs {
            for k2 in &subs {
                let spec = LatticeSpec::annulus(3, 3, &subgroup_spec(&g, k1), &subgroup_spec(&g, k2));
                let (_, t) = terms_for(&g, &spec);
                let gs = ground_space_dimension(&t, &g, GsdMethod::Auto).unwrap();
                let d = qudit_dimension(&g, &model, k1, k2).unwrap().value();
                assert_eq!(gs.dimension, d, "{} / {}", subgroup_spec(&g, k1), subgroup_spec(&g, k2));
            }
        }
    }
}

#[test]
fn s3_audits_clean() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let (_, t) = terms_for(&g, &LatticeSpec::torus(2, 2));
    let r = audit_commutation(&t, &g).unwrap();
    assert!(r.is_clean(), "{r:?}");
    let (_, t) = terms_for(&g, &LatticeSpec::annulus(3, 3, "e,(12)", "cyclic:(123)"));
    let r = audit_commutation(&t, &g).unwrap();
    assert!(r.is_clean(), "{r:?}");
}

#[test]
fn literal_edge_term_fails_audit() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let (l, mut t) = terms_for(&g, &LatticeSpec::annulus(3, 3, "e,(12)", "cyclic:(123)"));
    let hole = &l.holes()[1];
    let e = hole.rim_edges[0];
    assert!(!l.edge_plaquettes(e).is_empty());
    t.push(literal_edge_term(&l, e, hole.boundary.elements()));
    let r = audit_commutation(&t, &g).unwrap();
    assert!(r.noncommuting.iter().any(|f| f.first.starts_with("B(") || f.second.starts_with("B(")));
    assert!(r.noncommuting.iter().any(|f| f.first.starts_with("LK") || f.second.starts_with("LK")));
    assert!(r.non_projectors.iter().any(|f| f.term.starts_with("LK")));
    assert!(r.into_result().is_err());
}

#[test]
fn gauge_projectors_on_every_rim_edge_fail_audit() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let l = Lattice::build(&LatticeSpec::annulus(3, 3, "e,(12)", "e,(12)"), &g).unwrap();
    let t = hamiltonian_terms(&l, &g, RimEdgeGauge::All).unwrap();
    let r = audit_commutation(&t, &g).unwrap();
    assert!(!r.noncommuting.is_empty());
}
