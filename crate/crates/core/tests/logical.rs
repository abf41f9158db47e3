use nalgebra::DMatrix;
use num_complex::Complex64;
use qdw_core::error::Error;
use qdw_core::group::FiniteGroup;
use qdw_core::lattice::{Face, Lattice, LatticeSpec};
use qdw_core::logical::*;

type Matrix = DMatrix<Complex64>;

const TOL: f64 = 1e-10;

fn omega(n: usize, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
}

/// Generalized Pauli pair: X|c⟩ = |c+1⟩, Z|c⟩ = ω^{-c}|c⟩.
fn weyl_pair(n: usize) -> (Matrix, Matrix) {
    let x = Matrix::from_fn(n, n, |i, j| if i == (j + 1) % n { omega(n, 0) } else { Complex64::default() });
    let z = Matrix::from_fn(n, n, |i, j| if i == j { omega(n, -(i as i64)) } else { Complex64::default() });
    (x, z)
}

fn rough_annulus(g: &FiniteGroup, size: usize) -> Lattice {
    Lattice::build(&LatticeSpec::annulus(size, size, "e", "e"), g).unwrap()
}

fn charge(enc: &Encoding, q: usize) -> usize {
    enc.data().anyon(0, q)
}

fn flux(enc: &Encoding, b: usize) -> usize {
    enc.data().anyon(b, 0)
}

#[test]
fn qutrit_weyl_relations() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let l = rough_annulus(&g, 3);
    let enc = Encoding::new(&g, &l).unwrap();
    assert_eq!(enc.dimension(), 3);
    assert_eq!(enc.frame().sectors.as_deref(), Some(&[0, 1, 2][..]));
    let x = enc.logical_operator(&enc.tunnel_operator(0, 1, charge(&enc, 1)).unwrap()).unwrap();
    let z = enc.logical_operator(&enc.loop_operator(1, flux(&enc, 1)).unwrap()).unwrap();
    let (wx, wz) = weyl_pair(3);
    assert!((&x.matrix - wx).norm() < TOL, "{}", x.matrix);
    assert!((&z.matrix - wz).norm() < TOL, "{}", z.matrix);
    let w = omega(3, 1);
    assert!((&x.matrix * &z.matrix - &z.matrix * &x.matrix * w).norm() < TOL);
    let id = Matrix::identity(3, 3);
    assert!((x.matrix.pow(3) - &id).norm() < TOL);
    assert!((z.matrix.pow(3) - &id).norm() < TOL);
}

#[test]
fn qubit_pauli_relations() {
    let g = FiniteGroup::cyclic(2).unwrap();
    let l = rough_annulus(&g, 3);
    let enc = Encoding::new(&g, &l).unwrap();
    let gens = enc.default_generators().unwrap();
    assert_eq!(gens.len(), 2);
    let report = logical_algebra(&enc, &gens).unwrap();
    assert_eq!(report.encoding.d, 2);
    let xz = report.relations.iter().find(|r| r.lhs == "X Z").unwrap();
    assert!(xz.holds);
    assert_eq!(xz.phase, [-1.0, 0.0]);
    for name in ["X^2", "Z^2"] {
        let r = report.relations.iter().find(|r| r.lhs == name).unwrap();
        assert!(r.holds && r.phase == [1.0, 0.0], "{r:?}");
    }
}

#[test]
fn tunnelled_charge_lands_in_its_sector() {
    for n in [2, 3] {
        let g = FiniteGroup::cyclic(n).unwrap();
        let l = rough_annulus(&g, 3);
        let enc = Encoding::new(&g, &l).unwrap();
        let p = enc.charge_projectors(LoopSpec::around(1)).unwrap();
        let sectors = enc.frame().sectors.clone().unwrap();
        assert_eq!(sectors[0], 0);
        for q in 1..n {
            let a = charge(&enc, q);
            let t = enc.ground_matrix(&enc.tunnel_operator(0, 1, a).unwrap()).unwrap();
            let column: Vec<Complex64> = t.column(0).iter().copied().collect();
            assert_eq!(p.sector_of(&column), Some(a), "Z{n} charge {q}");
        }
    }
}

#[test]
fn tunnelled_flux_lands_in_its_sector() {
    for n in [2, 3] {
        let g = FiniteGroup::cyclic(n).unwrap();
        let l = Lattice::build(&LatticeSpec::annulus(3, 3, "full", "full"), &g).unwrap();
        let enc = Encoding::new(&g, &l).unwrap();
        assert_eq!(enc.dimension(), n);
        let p = enc.charge_projectors(LoopSpec::around(1)).unwrap();
        for b in 1..n {
            let a = flux(&enc, b);
            let t = enc.ground_matrix(&enc.tunnel_operator(0, 1, a).unwrap()).unwrap();
            let column: Vec<Complex64> = t.column(0).iter().copied().collect();
            assert_eq!(p.sector_of(&column), Some(a), "Z{n} flux {b}");
        }
    }
}

#[test]
fn flux_cannot_tunnel_between_rough_holes() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let l = rough_annulus(&g, 3);
    let enc = Encoding::new(&g, &l).unwrap();
    let err = enc.tunnel_operator(0, 1, flux(&enc, 1)).unwrap_err();
    assert!(matches!(err, Error::NotCondensable(_)), "{err}");
    let dyon = enc.data().anyon(1, 1);
    assert!(matches!(enc.tunnel_operator(0, 1, dyon), Err(Error::NotCondensable(_))));
}

#[test]
fn nonabelian_group_rejected() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let l = rough_annulus(&g, 3);
    assert!(matches!(Encoding::new(&g, &l), Err(Error::NotAbelian)));
}

fn assert_all_equal(ms: &[Matrix]) {
    for m in &ms[1..] {
        assert!((m - &ms[0]).norm() < TOL, "{m} vs {}", ms[0]);
    }
}

#[test]
fn tunnels_are_invariant_under_rerouting() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let l = rough_annulus(&g, 5);
    let enc = Encoding::new(&g, &l).unwrap();
    assert_eq!(enc.dimension(), 3);
    let routes: [&[(usize, usize)]; 4] = [
        &[(0, 2), (1, 2), (2, 2)],
        &[(2, 0), (2, 1), (2, 2)],
        &[(5, 3), (4, 3), (3, 3)],
        &[(0, 4), (1, 4), (1, 3), (1, 2), (1, 1), (2, 1), (3, 1), (3, 2)],
    ];
    let a = charge(&enc, 1);
    let mut ms = vec![enc.ground_matrix(&enc.tunnel_operator(0, 1, a).unwrap()).unwrap()];
    for r in routes {
        let path = PrimalPath::from_vertices(&l, r).unwrap();
        let t = enc.tunnel_operator_along(0, 1, a, Some(path), None).unwrap();
        ms.push(enc.ground_matrix(&t).unwrap());
    }
    assert_all_equal(&ms);
    assert!((&ms[0] - Matrix::identity(3, 3)).norm() > 1.0);
}

#[test]
fn loops_are_invariant_under_deformation() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let l = rough_annulus(&g, 5);
    let enc = Encoding::new(&g, &l).unwrap();
    let m = flux(&enc, 1);
    let cells: Vec<Face> = [
        (1, 1), (0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (3, 3), (3, 2), (3, 1), (2, 1), (1, 1),
    ]
    .iter()
    .map(|&(r, c)| l.cell(r, c).unwrap())
    .collect();
    let bent = DualPath::from_faces(&l, &cells).unwrap();
    let mut ms = Vec::new();
    for ring in [1, 2] {
        let spec = LoopSpec { hole: 1, primal_offset: 0, dual_ring: ring };
        ms.push(enc.ground_matrix(&enc.loop_operator_at(spec, m).unwrap()).unwrap());
    }
    ms.push(enc.ground_matrix(&enc.loop_operator_along(1, m, None, Some(bent)).unwrap()).unwrap());
    assert_all_equal(&ms);

    // Charge loops measure the flux through a rough hole, which is trivial.
    let e = charge(&enc, 1);
    for offset in 0..3 {
        let spec = LoopSpec { hole: 1, primal_offset: offset, dual_ring: 1 };
        let w = enc.ground_matrix(&enc.loop_operator_at(spec, e).unwrap()).unwrap();
        assert!((w - Matrix::identity(3, 3)).norm() < TOL);
    }
}

#[test]
fn smooth_hole_charge_loops_deform() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let l = Lattice::build(&LatticeSpec::annulus(5, 5, "full", "full"), &g).unwrap();
    let enc = Encoding::new(&g, &l).unwrap();
    let e = charge(&enc, 1);
    let ms: Vec<Matrix> = (0..3)
        .map(|offset| {
            let spec = LoopSpec { hole: 1, primal_offset: offset, dual_ring: 1 };
            enc.ground_matrix(&enc.loop_operator_at(spec, e).unwrap()).unwrap()
        })
        .collect();
    assert_all_equal(&ms);
    assert!((&ms[0] - Matrix::identity(3, 3)).norm() > 1.0);
}

#[test]
fn contractible_loops_act_as_identity() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let l = rough_annulus(&g, 5);
    let enc = Encoding::new(&g, &l).unwrap();
    let around_plaquette = PrimalPath::from_vertices(&l, &[(0, 0), (0, 1), (1, 1), (1, 0), (0, 0)]).unwrap();
    let around_vertex: Vec<Face> = [(0, 0), (0, 1), (1, 1), (1, 0), (0, 0)]
        .iter()
        .map(|&(r, c)| l.cell(r, c).unwrap())
        .collect();
    let around_vertex = DualPath::from_faces(&l, &around_vertex).unwrap();
    let dyon = enc.data().anyon(1, 2);
    let w = enc.contractible_loop(dyon, Some(around_plaquette.clone()), Some(around_vertex)).unwrap();
    let id = Matrix::identity(3, 3);
    assert!((enc.ground_matrix(&w).unwrap() - &id).norm() < TOL);

    // Commuting pair: X with a contractible loop has phase exactly 1.
    let mut x = enc.tunnel_operator(0, 1, charge(&enc, 1)).unwrap();
    x.name = "X".into();
    let mut c = w.clone();
    c.name = "C".into();
    let report = logical_algebra(&enc, &[x, c]).unwrap();
    let rel = report.relations.iter().find(|r| r.lhs == "X C").unwrap();
    assert!(rel.holds);
    assert_eq!(rel.phase, [1.0, 0.0]);

    // A loop around the hole is not contractible, and vice versa.
    let ring = primal_ring(&l, 1, 1).unwrap();
    assert!(matches!(enc.contractible_loop(charge(&enc, 1), Some(ring), None), Err(Error::InvalidPath(_))));
    assert!(matches!(
        enc.loop_operator_along(1, charge(&enc, 1), Some(around_plaquette), None),
        Err(Error::InvalidPath(_))
    ));
}

#[test]
fn open_or_misplaced_strings_rejected() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let l = rough_annulus(&g, 5);
    let enc = Encoding::new(&g, &l).unwrap();
    let e = charge(&enc, 1);
    let open = PrimalPath::from_vertices(&l, &[(0, 2), (1, 2)]).unwrap();
    assert!(matches!(enc.tunnel_operator_along(0, 1, e, Some(open.clone()), None), Err(Error::InvalidPath(_))));
    assert!(matches!(enc.loop_operator_along(1, e, Some(open), None), Err(Error::InvalidPath(_))));
    assert!(PrimalPath::from_vertices(&l, &[(0, 0), (1, 1)]).is_err());
    assert!(matches!(enc.loop_operator(0, e), Err(Error::InvalidPath(_))));
}

fn check_projectors(enc: &Encoding) -> ChargeProjectorFamily {
    let p = enc.charge_projectors(LoopSpec::around(1)).unwrap();
    let r = p.residuals();
    assert!(r.passes(TOL), "{r:?}");
    assert_eq!(p.projectors.len(), enc.data().len());
    assert_eq!(p.ranks().iter().sum::<usize>(), enc.dimension());
    p
}

#[test]
fn toric_code_charge_projectors() {
    let g = FiniteGroup::cyclic(2).unwrap();
    let l = rough_annulus(&g, 3);
    let enc = Encoding::new(&g, &l).unwrap();
    let p = check_projectors(&enc);
    // 1, e occupied; m, ε absent around a rough hole.
    assert_eq!(p.ranks(), vec![1, 1, 0, 0]);
    for i in 0..4 {
        for j in 0..4 {
            let prod = &p.projectors[i] * &p.projectors[j];
            let expect = if i == j { p.projectors[i].clone() } else { Matrix::zeros(2, 2) };
            assert!((prod - expect).norm() < TOL);
        }
    }
}

#[test]
fn qutrit_charge_measurement() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let l = rough_annulus(&g, 3);
    let enc = Encoding::new(&g, &l).unwrap();
    let p = check_projectors(&enc);
    let z = enc.logical_operator(&enc.loop_operator(1, flux(&enc, 1)).unwrap()).unwrap();
    for c in 0..3 {
        // Z eigenvector |c⟩ sits in the sector of charge c.
        let v: Vec<Complex64> = (0..3).map(|i| Complex64::new((i == c) as u8 as f64, 0.0)).collect();
        let zv = &z.matrix * nalgebra::DVector::from_column_slice(&v);
        assert!((zv - nalgebra::DVector::from_column_slice(&v) * omega(3, -(c as i64))).norm() < TOL);
        assert_eq!(p.sector_of(&v), Some(charge(&enc, c)));
    }
}

#[test]
fn logical_dimension_matches_condensation_for_all_boundaries() {
    for n in [2, 3] {
        let g = FiniteGroup::cyclic(n).unwrap();
        let subs: Vec<String> = g
            .enumerate_subgroups()
            .unwrap()
            .all()
            .map(|k| k.names(&g).join(","))
            .collect();
        for k1 in &subs {
            for k2 in &subs {
                let l = Lattice::build(&LatticeSpec::annulus(3, 3, k1, k2), &g).unwrap();
                let enc = Encoding::new(&g, &l).unwrap();
                check_projectors(&enc);
                let gens = enc.default_generators().unwrap();
                let report = logical_algebra(&enc, &gens).unwrap();
                assert!(report.relations.iter().all(|r| r.holds), "{k1} / {k2}: {:?}", report.relations);
            }
        }
    }
}

#[test]
fn z4_and_klein_encodings() {
    let g = FiniteGroup::cyclic(4).unwrap();
    let l = rough_annulus(&g, 3);
    let enc = Encoding::new(&g, &l).unwrap();
    assert_eq!(enc.dimension(), 4);
    let gens = enc.default_generators().unwrap();
    let report = logical_algebra(&enc, &gens).unwrap();
    let xz = report.relations.iter().find(|r| r.lhs == "X Z").unwrap();
    assert!(xz.holds);
    assert_eq!(xz.phase, [0.0, 1.0]);
    assert!(report.relations.iter().any(|r| r.lhs == "X^4" && r.holds));

    let k = FiniteGroup::direct_product(&[FiniteGroup::cyclic(2).unwrap(), FiniteGroup::cyclic(2).unwrap()]).unwrap();
    let l = rough_annulus(&k, 3);
    let enc = Encoding::new(&k, &l).unwrap();
    assert_eq!(enc.dimension(), 4);
    check_projectors(&enc);
}

mod deformation {
    use super::*;
    use proptest::prelude::*;
    use qdw_core::lattice::End;

    /// Random walk from an outer-rim vertex until it reaches the inner rim.
    fn walk(l: &Lattice, start: usize, choices: &[u8]) -> Option<PrimalPath> {
        let mut at = l.holes()[0].rim_vertices[start % l.holes()[0].rim_vertices.len()];
        let first = at;
        let mut steps = Vec::new();
        for &c in choices {
            if l.vertices()[at].rim == Some(1) {
                return Some(PrimalPath { start: first, steps });
            }
            let star = l.star(at);
            let (e, end) = star[c as usize % star.len()];
            let edge = &l.edges()[e];
            steps.push(PathStep { edge: e, forward: end == End::Tail });
            at = if end == End::Tail { edge.head } else { edge.tail };
        }
        None
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn random_walk_tunnels_agree(start in 0usize..64, choices in proptest::collection::vec(any::<u8>(), 300)) {
            let g = FiniteGroup::cyclic(3).unwrap();
            let l = rough_annulus(&g, 5);
            let enc = Encoding::new(&g, &l).unwrap();
            let path = walk(&l, start, &choices);
            prop_assume!(path.is_some());
            let a = charge(&enc, 1);
            let reference = enc.ground_matrix(&enc.tunnel_operator(0, 1, a).unwrap()).unwrap();
            let t = enc.tunnel_operator_along(0, 1, a, path, None).unwrap();
            prop_assert!((enc.ground_matrix(&t).unwrap() - reference).norm() < TOL);
        }
    }
}
