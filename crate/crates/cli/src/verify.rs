//! `verify-all`: the cross-module suite for one group, folded into one
//! check per property.

use serde::Serialize;

use qdw_core::classify::{boundary_defects, boundary_excitations, classify_anyons, lagrangian_algebra, symmetry_action};
use qdw_core::group::{FiniteGroup, Subgroup};
use qdw_core::lattice::{GsdMethod, Lattice, LatticeSpec, RimEdgeGauge, hamiltonian_terms};
use qdw_core::logical::{logical_algebra, Encoding, LoopSpec};

use crate::commands::{
    anyon_checks, audit_checks, condensation_overlap, defect_checks, gsd_oracle, gsd_with_methods,
    lagrangian_checks, methods_check, qudit_checks, CliResult, Context,
};
use crate::report::{Check, Outcome};

/// Lattice sections run only for groups up to this order.
pub const LATTICE_ORDER_LIMIT: usize = 6;
/// Logical sections run only for abelian groups up to this order.
pub const LOGICAL_ORDER_LIMIT: usize = 4;
/// Automorphisms checked for equivariance, taken in enumeration order.
pub const AUTOMORPHISM_LIMIT: usize = 256;

#[derive(Default)]
struct Tally {
    entries: Vec<(String, usize, Vec<String>)>,
}

impl Tally {
    fn entry(&mut self, name: &str) -> &mut (String, usize, Vec<String>) {
        let i = match self.entries.iter().position(|e| e.0 == name) {
            Some(i) => i,
            None => {
                self.entries.push((name.to_string(), 0, Vec::new()));
                self.entries.len() - 1
            }
        };
        &mut self.entries[i]
    }

    fn add(&mut self, section: &str, case: &str, c: Check) {
        let e = self.entry(&format!("{section}/{}", c.name));
        e.1 += 1;
        if !c.passed {
            e.2.push(format!("{case}: {}", c.detail));
        }
    }

    fn all(&mut self, section: &str, case: &str, checks: Vec<Check>) {
        for c in checks {
            self.add(section, case, c);
        }
    }

    /// Records an error from a computation as a failed case.
    fn result(&mut self, section: &str, case: &str, r: CliResult<Vec<Check>>) {
        match r {
            Ok(cs) => self.all(section, case, cs),
            Err(e) => self.add(section, case, Check::new("completes", false, format!("{e:?}"))),
        }
    }

    fn into_checks(self) -> Vec<Check> {
        self.entries
            .into_iter()
            .map(|(name, n, failed)| {
                let detail = match failed.first() {
                    None => format!("{n} cases"),
                    Some(f) => format!("{} of {n} cases failed; first {f}", failed.len()),
                };
                Check::new(name, failed.is_empty(), detail)
            })
            .collect()
    }
}

#[derive(Serialize)]
struct Coverage {
    group: String,
    order: usize,
    anyons: usize,
    subgroups: usize,
    subgroup_pairs: usize,
    automorphisms: usize,
    automorphisms_checked: usize,
    lattice: bool,
    logical: bool,
}

fn spec_of(g: &FiniteGroup, k: &Subgroup) -> String {
    k.names(g).join(",")
}

fn case(g: &FiniteGroup, ks: &[&Subgroup]) -> String {
    let parts: Vec<String> = ks.iter().map(|k| format!("{{{}}}", spec_of(g, k))).collect();
    parts.join(" / ")
}

fn build(g: &FiniteGroup, spec: &LatticeSpec) -> CliResult<(Lattice, qdw_core::lattice::TermSet)> {
    let l = Lattice::build(spec, g)?;
    let t = hamiltonian_terms(&l, g, RimEdgeGauge::DanglingOnly)?;
    Ok((l, t))
}

pub fn verify_all(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let tol = cx.tol();
    let model = classify_anyons(g)?;
    let lattice_of_subgroups = g.enumerate_subgroups()?;
    let subs: Vec<Subgroup> = lattice_of_subgroups.all().cloned().collect();
    let reps: Vec<Subgroup> = lattice_of_subgroups.representatives().cloned().collect();
    let mut t = Tally::default();

    t.all("anyons", g.label(), anyon_checks(g, &model, tol));

    for k in &subs {
        let c = case(g, &[k]);
        t.result(
            "lagrangian",
            &c,
            lagrangian_algebra(g, &model, k)
                .map(|alg| lagrangian_checks(g, &model, k, &alg))
                .map_err(Into::into),
        );
        t.result(
            "excitations",
            &c,
            (|| {
                let labels = boundary_excitations(g, k)?;
                let expected = condensation_overlap(g, &model, k, k)?;
                Ok(defect_checks(g, &labels, expected, true, tol))
            })(),
        );
    }

    for k1 in &subs {
        for k2 in &subs {
            let c = case(g, &[k1, k2]);
            t.result(
                "defects",
                &c,
                (|| {
                    let labels = boundary_defects(g, k1, k2)?;
                    let expected = condensation_overlap(g, &model, k1, k2)?;
                    Ok(defect_checks(g, &labels, expected, k1 == k2, tol))
                })(),
            );
            t.result("qudit", &c, qudit_checks(g, &model, k1, k2).map(|(_, cs)| cs));
        }
    }

    let autos = g.automorphisms();
    let checked = autos.len().min(AUTOMORPHISM_LIMIT);
    for (i, phi) in autos.iter().take(checked).enumerate() {
        let c = format!("automorphism {i}");
        t.result(
            "symmetry",
            &c,
            (|| {
                let act = symmetry_action(g, &model, phi)?;
                let mut failed = Vec::new();
                for k in &subs {
                    if let Err(e) = act.check_equivariance(g, &model, k) {
                        failed.push(format!("{}: {e}", case(g, &[k])));
                    }
                }
                Ok(vec![Check::new("equivariance", failed.is_empty(), failed.join("; "))])
            })(),
        );
    }
    for x in g.elements() {
        let c = format!("conjugation by {}", g.name(x));
        t.result(
            "symmetry",
            &c,
            symmetry_action(g, &model, &g.inner_automorphism(x))
                .map(|act| vec![Check::new("inner-trivial", act.is_trivial(), "label permutation is not the identity")])
                .map_err(Into::into),
        );
    }

    let lattice = g.order() <= LATTICE_ORDER_LIMIT;
    if lattice {
        lattice_sections(g, &model, &subs, &reps, &mut t);
    }
    let logical = g.is_abelian() && g.order() > 1 && g.order() <= LOGICAL_ORDER_LIMIT;
    if logical {
        logical_sections(g, tol, &mut t);
    }

    let mut out = Outcome::default();
    out.insert(
        "coverage",
        Coverage {
            group: g.label().to_string(),
            order: g.order(),
            anyons: model.len(),
            subgroups: subs.len(),
            subgroup_pairs: subs.len() * subs.len(),
            automorphisms: autos.len(),
            automorphisms_checked: checked,
            lattice,
            logical,
        },
    );
    for c in t.into_checks() {
        out.check(c);
    }
    Ok(out)
}

/// Tori, disks and annuli. Commutation audits run on the 2x2 torus and on
/// annuli whose rims are both conjugacy-class representatives; ground-space
/// dimensions run for every subgroup and pair.
fn lattice_sections(
    g: &FiniteGroup,
    model: &qdw_core::classify::AnyonModel,
    subs: &[Subgroup],
    reps: &[Subgroup],
    t: &mut Tally,
) {
    let torus = |rows, cols, audit: bool| -> CliResult<(u64, Vec<Check>)> {
        let (l, terms) = build(g, &LatticeSpec::torus(rows, cols))?;
        let mut checks = if audit { audit_checks(&terms, g)?.1 } else { Vec::new() };
        let (d, methods) = gsd_with_methods(&terms, g, GsdMethod::Auto)?;
        checks.push(methods_check(&methods));
        checks.extend(gsd_oracle(g, model, &l, d)?);
        Ok((d, checks))
    };
    let small = torus(2, 2, true);
    let large = torus(3, 2, false);
    match (small, large) {
        (Ok((a, mut ca)), Ok((b, cb))) => {
            ca.extend(cb);
            ca.push(Check::equal("refinement", a, b));
            t.all("lattice", "torus 2x2 and 3x2", ca);
        }
        (a, b) => {
            t.result("lattice", "torus 2x2", a.map(|x| x.1));
            t.result("lattice", "torus 3x2", b.map(|x| x.1));
        }
    }

    for k in subs {
        let c = case(g, &[k]);
        t.result(
            "lattice",
            &format!("disk 2x2 {c}"),
            (|| {
                let (l, terms) = build(g, &LatticeSpec::disk(2, 2, &spec_of(g, k)))?;
                let (d, methods) = gsd_with_methods(&terms, g, GsdMethod::Auto)?;
                let mut checks = vec![methods_check(&methods)];
                checks.extend(gsd_oracle(g, model, &l, d)?);
                Ok(checks)
            })(),
        );
    }

    for k1 in subs {
        for k2 in subs {
            let c = case(g, &[k1, k2]);
            t.result(
                "lattice",
                &format!("annulus 3x3 {c}"),
                (|| {
                    let spec = LatticeSpec::annulus(3, 3, &spec_of(g, k1), &spec_of(g, k2));
                    let (l, terms) = build(g, &spec)?;
                    let mut checks = Vec::new();
                    if reps.contains(k1) && reps.contains(k2) {
                        checks.extend(audit_checks(&terms, g)?.1);
                    }
                    let (d, methods) = gsd_with_methods(&terms, g, GsdMethod::Auto)?;
                    checks.push(methods_check(&methods));
                    checks.extend(gsd_oracle(g, model, &l, d)?);
                    Ok(checks)
                })(),
            );
        }
    }
}

fn logical_sections(g: &FiniteGroup, tol: f64, t: &mut Tally) {
    for (outer, inner) in [("trivial", "trivial"), ("full", "full")] {
        let c = format!("annulus 3x3 {outer}/{inner}");
        t.result(
            "logical",
            &c,
            (|| {
                let l = Lattice::build(&LatticeSpec::annulus(3, 3, outer, inner), g)?;
                let enc = Encoding::new(g, &l)?;
                let mut checks = vec![Check::equal("dimension", enc.dimension(), g.order())];
                let report = logical_algebra(&enc, &enc.default_generators()?)?;
                let failed: Vec<String> = report
                    .relations
                    .iter()
                    .filter(|r| !r.holds)
                    .map(|r| format!("{} vs {}", r.lhs, r.rhs))
                    .collect();
                checks.push(Check::new(
                    "relations",
                    failed.is_empty() && !report.relations.is_empty(),
                    failed.join("; "),
                ));
                let hole = l.inner_holes().next().map_or(1, |h| h.index);
                let fam = enc.charge_projectors(LoopSpec::around(hole))?;
                let res = fam.residuals();
                checks.push(Check::new("charge-projectors", res.passes(tol), format!("{res:?}")));
                checks.push(Check::equal("rank-sum", fam.ranks().iter().sum::<usize>(), enc.dimension()));
                Ok(checks)
            })(),
        );
    }
}
