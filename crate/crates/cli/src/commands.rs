use std::str::FromStr;

use serde::Serialize;

use qdw_core::character::character_table;
use qdw_core::classify::{
    abelian_data, boundary_defects, boundary_excitations, classify_anyons, clean_float,
    lagrangian_algebra, AnyonModel, DefectLabel, LagrangianAlgebra,
};
use qdw_core::error::Error;
use qdw_core::group::{parse_subgroup, CayleyTable, FiniteGroup, GroupSpec, Subgroup};
use qdw_core::lattice::{
    audit_commutation, counting_method, ground_space_dimension, hamiltonian_terms, trace_method,
    GsdMethod, Lattice, LatticeSpec, RimEdgeGauge, TermKind, TermSet, Topology, TRACE_LIMIT,
};
use qdw_core::logical::{logical_algebra, Encoding, LoopSpec, StringOperator};

use crate::config::{Command, RimGauge, RunConfig};
use crate::report::{Check, Outcome, Table};

/// Failure modes of a command, mapped onto exit codes by `main`.
#[derive(Debug)]
pub enum CliError {
    /// Bad input or an unmet precondition (exit 2).
    Usage(String),
    /// An internal invariant did not hold (exit 1).
    Invariant(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_invariant_failure() {
            CliError::Invariant(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Reads `@path` arguments from disk; anything else is returned as is.
pub fn read_argument(s: &str) -> CliResult<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

/// Preset name, inline Cayley-table JSON or `@table.json`.
pub fn parse_group(spec: &str) -> CliResult<FiniteGroup> {
    let s = read_argument(spec)?;
    let s = s.trim();
    if s.starts_with('{') {
        let table: CayleyTable =
            serde_json::from_str(s).map_err(|e| usage(format!("Cayley table JSON: {e}")))?;
        return Ok(FiniteGroup::from_table(&table)?);
    }
    Ok(GroupSpec::from_str(s)?.build()?)
}

pub struct Context {
    pub config: RunConfig,
    pub g: FiniteGroup,
}

impl Context {
    pub fn new(config: RunConfig) -> CliResult<Context> {
        let g = parse_group(&config.group)?;
        Ok(Context { config, g })
    }

    pub fn tol(&self) -> f64 {
        self.config.tolerance
    }

    fn subgroup(&self) -> CliResult<Subgroup> {
        let s = self
            .config
            .subgroup
            .as_deref()
            .ok_or_else(|| usage(format!("`{}` needs --subgroup", self.config.command.name())))?;
        Ok(parse_subgroup(&self.g, s)?)
    }

    fn subgroup2(&self) -> CliResult<Subgroup> {
        let s = self
            .config
            .subgroup2
            .as_deref()
            .ok_or_else(|| usage(format!("`{}` needs --subgroup2", self.config.command.name())))?;
        Ok(parse_subgroup(&self.g, s)?)
    }

    /// Outer rim takes `--subgroup`, inner holes `--subgroup2`; both default to the outer choice, then `full`.
    fn lattice(&self) -> CliResult<Lattice> {
        let s = self
            .config
            .lattice
            .as_deref()
            .ok_or_else(|| usage(format!("`{}` needs --lattice", self.config.command.name())))?;
        let s = read_argument(s)?;
        let outer = self.config.subgroup.as_deref().unwrap_or("full");
        let inner = self.config.subgroup2.as_deref().unwrap_or(outer);
        let spec = LatticeSpec::parse(&s, outer, inner)?;
        Ok(Lattice::build(&spec, &self.g)?)
    }

    fn rim_gauge(&self) -> RimEdgeGauge {
        match self.config.rim_gauge {
            RimGauge::Dangling => RimEdgeGauge::DanglingOnly,
            RimGauge::All => RimEdgeGauge::All,
        }
    }

    fn terms(&self, l: &Lattice) -> CliResult<TermSet> {
        Ok(hamiltonian_terms(l, &self.g, self.rim_gauge())?)
    }
}

pub fn run(cx: &Context) -> CliResult<Outcome> {
    match cx.config.command {
        Command::GroupInfo => group_info(cx),
        Command::Anyons => anyons(cx),
        Command::Subgroups => subgroups(cx),
        Command::Lagrangian => lagrangian(cx),
        Command::Excitations => excitations(cx),
        Command::Defects => defects(cx),
        Command::QuditDim => qudit_dim(cx),
        Command::LatticeAudit => lattice_audit(cx),
        Command::Gsd => gsd(cx),
        Command::Logical => logical(cx),
        Command::ChargeProject => charge_project(cx),
        Command::VerifyAll => crate::verify::verify_all(cx),
    }
}

fn complex_record(z: num_complex::Complex64) -> [f64; 2] {
    [clean_float(z.re), clean_float(z.im)]
}

fn names(g: &FiniteGroup, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| g.name(x).to_string()).collect()
}

#[derive(Serialize)]
struct ClassRecord {
    representative: String,
    size: usize,
    element_order: usize,
    centralizer_order: usize,
    members: Vec<String>,
}

#[derive(Serialize)]
struct CharacterRecord {
    dims: Vec<usize>,
    /// `values[irrep][class]` as `[re, im]`.
    values: Vec<Vec<[f64; 2]>>,
}

fn group_info(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let table = character_table(g)?;
    let classes: Vec<ClassRecord> = g
        .conjugacy_classes()
        .iter()
        .map(|c| ClassRecord {
            representative: g.name(c.representative).to_string(),
            size: c.size(),
            element_order: g.element_order(c.representative),
            centralizer_order: c.centralizer.order(),
            members: names(g, &c.members),
        })
        .collect();
    let values = (0..table.num_irreps())
        .map(|i| table.row(i).iter().map(|&z| complex_record(z)).collect())
        .collect();

    let mut out = Outcome::default();
    out.insert("group", g.label());
    out.insert("order", g.order());
    out.insert("abelian", g.is_abelian());
    out.insert("elements", g.names());
    out.insert("classes", &classes);
    out.insert(
        "character_table",
        CharacterRecord {
            dims: table.dims().to_vec(),
            values,
        },
    );

    out.check(match table.validate() {
        Ok(()) => Check::new("character-orthogonality", true, "row and column orthogonality hold"),
        Err(e) => Check::new("character-orthogonality", false, e.to_string()),
    });
    let class_sum: usize = classes.iter().map(|c| c.size).sum();
    out.check(Check::equal("class-equation", class_sum, g.order()));
    let dim_sum: usize = table.dims().iter().map(|d| d * d).sum();
    out.check(Check::equal("irrep-dimension-sum", dim_sum, g.order()));
    out.check(Check::equal("irreps-equal-classes", table.num_irreps(), classes.len()));
    let orbit_stabilizer = classes.iter().all(|c| c.size * c.centralizer_order == g.order());
    out.check(Check::new(
        "orbit-stabilizer",
        orbit_stabilizer,
        "|C| · |Z(r)| = |G| for every class",
    ));

    let mut t = Table::new(&["class", "representative", "size", "element_order", "centralizer_order", "members"]);
    for (i, c) in classes.iter().enumerate() {
        t.push(vec![
            i.to_string(),
            c.representative.clone(),
            c.size.to_string(),
            c.element_order.to_string(),
            c.centralizer_order.to_string(),
            c.members.join(" "),
        ]);
    }
    out.table = Some(t);
    Ok(out)
}

pub fn anyon_checks(g: &FiniteGroup, model: &AnyonModel, tol: f64) -> Vec<Check> {
    let n = g.order();
    let a = model.anyons();
    let mut checks = Vec::new();
    let total: usize = a.iter().map(|x| x.dim * x.dim).sum();
    checks.push(Check::equal("dimension-sum", total, n * n));
    let worst = a
        .iter()
        .map(|x| (x.twist.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "unit-twists",
        worst <= tol,
        format!("largest |θ| - 1 is {worst:.3e}"),
    ));
    let v = &a[0];
    checks.push(Check::new(
        "trivial-vacuum",
        v.is_vacuum() && v.dim == 1 && v.is_boson(),
        format!("{} has d = {}", v.key(), v.dim),
    ));
    // each centralizer's irreps exhaust its regular representation
    let complete = g.conjugacy_classes().iter().enumerate().all(|(ci, c)| {
        let s: usize = a
            .iter()
            .filter(|x| x.class_index == ci)
            .map(|x| x.irrep_dim * x.irrep_dim)
            .sum();
        s == c.centralizer.order()
    });
    checks.push(Check::new(
        "centralizer-irreps",
        complete,
        "Σ (dim π)² = |Z(r)| for every class",
    ));
    checks
}

fn anyons(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let model = classify_anyons(g)?;
    let records = model.records(g);
    let mut out = Outcome::default();
    out.insert("count", records.len());
    out.insert("anyons", &records);
    for c in anyon_checks(g, &model, cx.tol()) {
        out.check(c);
    }
    if g.is_abelian() {
        let data = abelian_data(g)?;
        out.insert("modular", data.record());
        out.check(match data.check() {
            Ok(()) => Check::new("modular-data", true, "S unitary and symmetric, S² = C, fusion from S"),
            Err(e) => Check::new("modular-data", false, e.to_string()),
        });
    }

    let mut t = Table::new(&[
        "key",
        "letter",
        "class_representative",
        "class_size",
        "centralizer_order",
        "irrep",
        "irrep_dim",
        "dim",
        "twist_re",
        "twist_im",
    ]);
    for r in &records {
        t.push(vec![
            r.key.clone(),
            r.letter.clone().unwrap_or_default(),
            r.class_representative.clone(),
            r.class_size.to_string(),
            r.centralizer_order.to_string(),
            r.irrep.to_string(),
            r.irrep_dim.to_string(),
            r.dim.to_string(),
            r.twist[0].to_string(),
            r.twist[1].to_string(),
        ]);
    }
    out.table = Some(t);
    Ok(out)
}

#[derive(Serialize)]
struct SubgroupRecord {
    class: usize,
    order: usize,
    index: usize,
    canonical: bool,
    elements: Vec<String>,
}

fn subgroups(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let lattice = g.enumerate_subgroups()?;
    let mut records = Vec::new();
    for (ci, class) in lattice.classes.iter().enumerate() {
        for k in &class.members {
            records.push(SubgroupRecord {
                class: ci,
                order: k.order(),
                index: g.order() / k.order(),
                canonical: *k == class.key,
                elements: k.names(g),
            });
        }
    }
    let mut out = Outcome::default();
    out.insert("count", records.len());
    out.insert("classes", lattice.classes.len());
    out.insert("subgroups", &records);

    let lagrange = lattice.all().all(|k| g.order().is_multiple_of(k.order()));
    out.check(Check::new("lagrange", lagrange, "every order divides |G|"));
    let ends = lattice.all().any(|k| *k == g.trivial_subgroup()) && lattice.all().any(|k| *k == g.full_subgroup());
    out.check(Check::new("trivial-and-full", ends, "{e} and G are listed"));
    let closed = lattice.classes.iter().all(|class| {
        let mut conj: Vec<Subgroup> = g.elements().map(|x| g.conjugate_subgroup(x, &class.key)).collect();
        conj.sort_by(|a, b| a.elements().cmp(b.elements()));
        conj.dedup();
        let mut members = class.members.clone();
        members.sort_by(|a, b| a.elements().cmp(b.elements()));
        conj == members
    });
    out.check(Check::new(
        "conjugacy-classes",
        closed,
        "each class is exactly the set of conjugates of its key",
    ));

    let mut t = Table::new(&["class", "order", "index", "canonical", "elements"]);
    for r in &records {
        t.push(vec![
            r.class.to_string(),
            r.order.to_string(),
            r.index.to_string(),
            r.canonical.to_string(),
            r.elements.join(" "),
        ]);
    }
    out.table = Some(t);
    Ok(out)
}

/// Dimension sum, vacuum, bosonic support and conjugation invariance.
pub fn lagrangian_checks(
    g: &FiniteGroup,
    model: &AnyonModel,
    k: &Subgroup,
    alg: &LagrangianAlgebra,
) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(Check::equal("dimension-sum", alg.dimension(model), g.order()));
    checks.push(Check::equal("vacuum-multiplicity", alg.multiplicities[0], 1));
    let fermions: Vec<String> = alg
        .support()
        .into_iter()
        .filter(|&a| !model.anyons()[a].is_boson())
        .map(|a| model.anyons()[a].key())
        .collect();
    checks.push(Check::new(
        "bosonic-support",
        fermions.is_empty(),
        if fermions.is_empty() {
            "every condensed anyon has θ = 1".to_string()
        } else {
            format!("nontrivial twist on {}", fermions.join(", "))
        },
    ));
    let mut moved = Vec::new();
    for x in g.elements() {
        match lagrangian_algebra(g, model, &g.conjugate_subgroup(x, k)) {
            Ok(b) if b.multiplicities == alg.multiplicities => {}
            Ok(_) => moved.push(g.name(x).to_string()),
            Err(e) => moved.push(format!("{}: {e}", g.name(x))),
        }
    }
    checks.push(Check::new(
        "conjugation-invariance",
        moved.is_empty(),
        if moved.is_empty() {
            format!("same multiplicities for all {} conjugates gKg⁻¹", g.order())
        } else {
            format!("differs for g = {}", moved.join(", "))
        },
    ));
    checks
}

fn lagrangian(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let k = cx.subgroup()?;
    let model = classify_anyons(g)?;
    let alg = lagrangian_algebra(g, &model, &k)?;
    let mut out = Outcome::default();
    out.insert("subgroup", k.names(g));
    out.insert("canonical_conjugate", alg.boundary.canonical.names(g));
    out.insert("multiplicities", &alg.multiplicities);
    out.insert("formula", alg.formula(&model));
    out.insert("dimension", alg.dimension(&model));
    let support: Vec<String> = alg.support().into_iter().map(|a| model.anyons()[a].key()).collect();
    out.insert("support", support);
    for c in lagrangian_checks(g, &model, &k, &alg) {
        out.check(c);
    }

    let mut t = Table::new(&["key", "letter", "dim", "multiplicity"]);
    for (a, &m) in model.anyons().iter().zip(&alg.multiplicities) {
        t.push(vec![
            a.key(),
            model.letter(a.index).unwrap_or_default(),
            a.dim.to_string(),
            m.to_string(),
        ]);
    }
    out.table = Some(t);
    Ok(out)
}

/// `Σ d² = |G|` and the label count predicted by condensation. Excitations
/// on a single boundary also need a unit vacuum; junctions between distinct
/// boundaries have none.
pub fn defect_checks(
    g: &FiniteGroup,
    labels: &[DefectLabel],
    expected_count: u64,
    single_boundary: bool,
    tol: f64,
) -> Vec<Check> {
    let mut checks = Vec::new();
    let total: f64 = labels.iter().map(|d| d.dim * d.dim).sum();
    checks.push(Check::close("dimension-sum", total, g.order() as f64, tol));
    if !single_boundary {
        checks.push(Check::equal("condensation-count", labels.len() as u64, expected_count));
        return checks;
    }
    let vac = labels.iter().find(|d| d.is_vacuum());
    checks.push(Check::new(
        "vacuum-dimension",
        vac.is_some_and(|d| (d.dim - 1.0).abs() <= tol),
        match vac {
            Some(d) => format!("{} has d = {}", d.key(), d.dim),
            None => "no label T0-R0".into(),
        },
    ));
    checks.push(Check::equal("condensation-count", labels.len() as u64, expected_count));
    checks
}

fn defect_table(g: &FiniteGroup, labels: &[DefectLabel]) -> Table {
    let mut t = Table::new(&["key", "coset_representative", "coset_size", "stabilizer_order", "irrep", "irrep_dim", "dim"]);
    for d in labels {
        let r = d.record(g);
        t.push(vec![
            r.key,
            r.coset_representative,
            r.coset_size.to_string(),
            r.stabilizer_order.to_string(),
            r.irrep.to_string(),
            r.irrep_dim.to_string(),
            r.dim.to_string(),
        ]);
    }
    t
}

/// `Σ_a m1(a) m2(a)`
pub fn condensation_overlap(g: &FiniteGroup, model: &AnyonModel, k1: &Subgroup, k2: &Subgroup) -> CliResult<u64> {
    let a = lagrangian_algebra(g, model, k1)?;
    let b = lagrangian_algebra(g, model, k2)?;
    Ok(a.multiplicities
        .iter()
        .zip(&b.multiplicities)
        .map(|(&x, &y)| x as u64 * y as u64)
        .sum())
}

fn excitations(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let k = cx.subgroup()?;
    let model = classify_anyons(g)?;
    let labels = boundary_excitations(g, &k)?;
    let expected = condensation_overlap(g, &model, &k, &k)?;
    let mut out = Outcome::default();
    out.insert("subgroup", k.names(g));
    out.insert("count", labels.len());
    out.insert("excitations", labels.iter().map(|d| d.record(g)).collect::<Vec<_>>());
    for c in defect_checks(g, &labels, expected, true, cx.tol()) {
        out.check(c);
    }
    out.table = Some(defect_table(g, &labels));
    Ok(out)
}

fn defects(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let (k1, k2) = (cx.subgroup()?, cx.subgroup2()?);
    let model = classify_anyons(g)?;
    let labels = boundary_defects(g, &k1, &k2)?;
    let expected = condensation_overlap(g, &model, &k1, &k2)?;
    let mut out = Outcome::default();
    out.insert("subgroup", k1.names(g));
    out.insert("subgroup2", k2.names(g));
    out.insert("count", labels.len());
    out.insert("defects", labels.iter().map(|d| d.record(g)).collect::<Vec<_>>());
    for c in defect_checks(g, &labels, expected, k1 == k2, cx.tol()) {
        out.check(c);
    }
    out.table = Some(defect_table(g, &labels));
    Ok(out)
}

/// Both qudit formulas, and symmetry in the two boundaries.
pub fn qudit_checks(g: &FiniteGroup, model: &AnyonModel, k1: &Subgroup, k2: &Subgroup) -> CliResult<(u64, Vec<Check>)> {
    let via_condensation = condensation_overlap(g, model, k1, k2)?;
    let via_defects = boundary_defects(g, k1, k2)?.len() as u64;
    let swapped = boundary_defects(g, k2, k1)?.len() as u64;
    let checks = vec![
        Check::equal("double-formula", via_condensation, via_defects),
        Check::equal("boundary-symmetry", swapped, via_defects),
    ];
    Ok((via_condensation, checks))
}

fn qudit_dim(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let (k1, k2) = (cx.subgroup()?, cx.subgroup2()?);
    let model = classify_anyons(g)?;
    let (d, checks) = qudit_checks(g, &model, &k1, &k2)?;
    let mut out = Outcome::default();
    out.insert("subgroup", k1.names(g));
    out.insert("subgroup2", k2.names(g));
    out.insert("dimension", d);
    out.insert("via_condensation", d);
    out.insert("via_defects", boundary_defects(g, &k1, &k2)?.len());
    for c in checks {
        out.check(c);
    }
    Ok(out)
}

#[derive(Serialize)]
struct HoleSummary {
    index: usize,
    outer: bool,
    boundary: Vec<String>,
    cells: Vec<(usize, usize)>,
    rim_edges: usize,
}

#[derive(Serialize)]
struct LatticeSummary {
    topology: Topology,
    rows: usize,
    cols: usize,
    vertices: usize,
    edges: usize,
    plaquettes: usize,
    euler_characteristic: i64,
    hilbert_dimension: u128,
    holes: Vec<HoleSummary>,
}

fn lattice_summary(g: &FiniteGroup, l: &Lattice, terms: &TermSet) -> LatticeSummary {
    LatticeSummary {
        topology: l.topology(),
        rows: l.spec().rows,
        cols: l.spec().cols,
        vertices: l.vertices().len(),
        edges: l.num_edges(),
        plaquettes: l.plaquettes().len(),
        euler_characteristic: l.euler_characteristic(),
        hilbert_dimension: terms.hilbert_dimension(),
        holes: l
            .holes()
            .iter()
            .map(|h| HoleSummary {
                index: h.index,
                outer: h.outer,
                boundary: h.boundary.names(g),
                cells: h.cells.clone(),
                rim_edges: h.rim_edges.len(),
            })
            .collect(),
    }
}

fn term_counts(terms: &TermSet) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    m.insert("total".into(), terms.len().into());
    for kind in [
        TermKind::BulkVertex,
        TermKind::BulkPlaquette,
        TermKind::RimEdge,
        TermKind::RimEdgeGauge,
        TermKind::RimVertex,
        TermKind::LiteralEdge,
    ] {
        let n = terms.count(kind);
        if n > 0 {
            let key = serde_json::to_value(kind).expect("kind serializes");
            m.insert(key.as_str().expect("kind is a string").to_string(), n.into());
        }
    }
    serde_json::Value::Object(m)
}

/// Zero noncommuting pairs and only genuine projectors.
pub fn audit_checks(terms: &TermSet, g: &FiniteGroup) -> CliResult<(qdw_core::lattice::AuditReport, Vec<Check>)> {
    let report = audit_commutation(terms, g)?;
    let commute = match report.noncommuting.first() {
        None => Check::new(
            "commutation",
            true,
            format!("{} overlapping pairs commute", report.pairs_checked),
        ),
        Some(f) => Check::new(
            "commutation",
            false,
            format!(
                "{} noncommuting pairs, first {} / {} (norm {:.3e})",
                report.noncommuting.len(),
                f.first,
                f.second,
                f.norm
            ),
        ),
    };
    let projectors = match report.non_projectors.first() {
        None => Check::new("projectors", true, format!("all {} terms are projectors", report.terms)),
        Some(f) => Check::new(
            "projectors",
            false,
            format!("{} terms fail, first {}", report.non_projectors.len(), f.term),
        ),
    };
    Ok((report, vec![commute, projectors]))
}

fn lattice_audit(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let l = cx.lattice()?;
    let terms = cx.terms(&l)?;
    let (report, checks) = audit_checks(&terms, g)?;
    let mut out = Outcome::default();
    out.insert("lattice", lattice_summary(g, &l, &terms));
    out.insert("terms", term_counts(&terms));
    out.insert("audit", &report);
    for c in checks {
        out.check(c);
    }
    Ok(out)
}

#[derive(Serialize)]
struct MethodResult {
    method: GsdMethod,
    dimension: u64,
}

/// Ground-space dimension and the methods that produced it. `auto` runs
/// counting and, within budget, trace, and reports any disagreement as a check.
pub fn gsd_with_methods(terms: &TermSet, g: &FiniteGroup, method: GsdMethod) -> CliResult<(u64, Vec<(GsdMethod, u64)>)> {
    if method != GsdMethod::Auto {
        let gs = ground_space_dimension(terms, g, method)?;
        return Ok((gs.dimension, gs.methods));
    }
    let counted = counting_method(terms, g)?;
    let mut methods = vec![(GsdMethod::Counting, counted)];
    if terms.hilbert_dimension() <= TRACE_LIMIT {
        methods.push((GsdMethod::Trace, trace_method(terms, g)?));
    }
    Ok((counted, methods))
}

pub fn methods_check(methods: &[(GsdMethod, u64)]) -> Check {
    let agree = methods.iter().all(|&(_, d)| d == methods[0].1);
    let detail: Vec<String> = methods
        .iter()
        .map(|(m, d)| format!("{} = {d}", serde_json::to_value(m).expect("method serializes").as_str().unwrap_or("?")))
        .collect();
    Check::new("methods-agree", agree, detail.join(", "))
}

/// Topological prediction for the lattice, when one applies.
pub fn gsd_oracle(g: &FiniteGroup, model: &AnyonModel, l: &Lattice, dimension: u64) -> CliResult<Option<Check>> {
    let inner: Vec<_> = l.inner_holes().collect();
    Ok(match (l.topology(), inner.len()) {
        (Topology::Torus, _) => Some(Check::equal("torus-anyon-count", dimension, model.len() as u64)),
        (Topology::Patch, 0) => Some(Check::equal("disk-unique", dimension, 1)),
        (Topology::Patch, 1) => {
            let outer = &l.hole(0)?.boundary;
            let d = condensation_overlap(g, model, outer, &inner[0].boundary)?;
            Some(Check::equal("annulus-qudit-dimension", dimension, d))
        }
        _ => None,
    })
}

fn gsd(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let l = cx.lattice()?;
    let terms = cx.terms(&l)?;
    let method = match cx.config.method.as_deref() {
        Some(m) => GsdMethod::from_str(m)?,
        None => GsdMethod::Auto,
    };
    let (dimension, methods) = gsd_with_methods(&terms, g, method)?;
    let model = classify_anyons(g)?;
    let mut out = Outcome::default();
    out.insert("dimension", dimension);
    out.insert(
        "methods",
        methods
            .iter()
            .map(|&(method, dimension)| MethodResult { method, dimension })
            .collect::<Vec<_>>(),
    );
    out.insert("lattice", lattice_summary(g, &l, &terms));
    if methods.len() > 1 {
        out.check(methods_check(&methods));
    }
    if let Some(c) = gsd_oracle(g, &model, &l, dimension)? {
        out.check(c);
    }
    Ok(out)
}

fn split_name(spec: &str) -> (Option<&str>, &str) {
    match spec.split_once('=') {
        Some((n, rest)) => (Some(n.trim()), rest.trim()),
        None => (None, spec.trim()),
    }
}

fn parse_index(s: &str, what: &str) -> CliResult<usize> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("bad {what} `{s}`")))
}

fn loop_spec(cx: &Context, hole: usize) -> LoopSpec {
    LoopSpec {
        hole,
        primal_offset: cx.config.offset.unwrap_or(0),
        dual_ring: cx.config.ring.unwrap_or(1),
    }
}

/// `[NAME=]KEY:I->J` tunnels and `[NAME=]KEY@H` loops; the default
/// generators when neither is given.
fn generators(cx: &Context, enc: &Encoding) -> CliResult<Vec<StringOperator>> {
    if cx.config.tunnels.is_empty() && cx.config.loops.is_empty() {
        return Ok(enc.default_generators()?);
    }
    let mut out = Vec::new();
    for (n, spec) in cx.config.tunnels.iter().enumerate() {
        let (name, rest) = split_name(spec);
        let (key, ends) = rest
            .split_once(':')
            .ok_or_else(|| usage(format!("tunnel `{spec}` must look like KEY:I->J")))?;
        let (i, j) = ends
            .split_once("->")
            .ok_or_else(|| usage(format!("tunnel `{spec}` must look like KEY:I->J")))?;
        let a = enc.anyon_by_key(key.trim())?;
        let mut op = enc.tunnel_operator(parse_index(i, "hole")?, parse_index(j, "hole")?, a)?;
        op.name = name.map_or_else(|| format!("T{}", n + 1), str::to_string);
        out.push(op);
    }
    for (n, spec) in cx.config.loops.iter().enumerate() {
        let (name, rest) = split_name(spec);
        let (key, hole) = rest
            .split_once('@')
            .ok_or_else(|| usage(format!("loop `{spec}` must look like KEY@H")))?;
        let b = enc.anyon_by_key(key.trim())?;
        let mut op = enc.loop_operator_at(loop_spec(cx, parse_index(hole, "hole")?), b)?;
        op.name = name.map_or_else(|| format!("L{}", n + 1), str::to_string);
        out.push(op);
    }
    Ok(out)
}

fn single_hole_qudit(g: &FiniteGroup, l: &Lattice) -> CliResult<Option<u64>> {
    let inner: Vec<_> = l.inner_holes().collect();
    if l.topology() != Topology::Patch || inner.len() != 1 {
        return Ok(None);
    }
    let model = classify_anyons(g)?;
    Ok(Some(condensation_overlap(g, &model, &l.hole(0)?.boundary, &inner[0].boundary)?))
}

fn logical(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let l = cx.lattice()?;
    let enc = Encoding::new(g, &l)?;
    let gens = generators(cx, &enc)?;
    let report = logical_algebra(&enc, &gens)?;
    let mut out = Outcome::default();
    out.insert("encoding", &report.encoding);
    out.insert("operators", &report.operators);
    out.insert("relations", &report.relations);
    if let Some(d) = single_hole_qudit(g, &l)? {
        out.check(Check::equal("qudit-dimension", enc.dimension() as u64, d));
    }
    for r in &report.relations {
        out.check(Check::new(
            format!("relation {} = λ {}", r.lhs, r.rhs),
            r.holds,
            format!("λ = {} {:+}i, residual {:.3e}", r.phase[0], r.phase[1], r.residual),
        ));
    }
    Ok(out)
}

fn charge_project(cx: &Context) -> CliResult<Outcome> {
    let g = &cx.g;
    let l = cx.lattice()?;
    let hole = match cx.config.hole {
        Some(h) => h,
        None => l
            .inner_holes()
            .next()
            .map(|h| h.index)
            .ok_or_else(|| usage("the lattice has no inner hole to measure"))?,
    };
    let enc = Encoding::new(g, &l)?;
    let spec = loop_spec(cx, hole);
    let family = enc.charge_projectors(spec)?;
    let res = family.residuals();
    let ranks = family.ranks();
    let tol = cx.tol();

    let mut out = Outcome::default();
    out.insert("encoding", enc.encoding_record());
    out.insert("loop", spec);
    out.insert("labels", &family.labels);
    out.insert("ranks", &ranks);
    out.insert("residuals", res);
    out.insert("projectors", family.records());
    for (name, value) in [
        ("completeness", res.completeness),
        ("orthogonality", res.orthogonality),
        ("idempotence", res.idempotence),
        ("hermiticity", res.hermiticity),
        ("loop-eigenbasis", res.off_diagonal),
    ] {
        out.check(Check::new(name, value <= tol, format!("{value:.3e} (tolerance {tol:e})")));
    }
    out.check(Check::equal("rank-sum", ranks.iter().sum::<usize>(), enc.dimension()));
    Ok(out)
}
