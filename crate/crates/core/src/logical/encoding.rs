//! Hole encodings of abelian D(G): ground basis, logical frame, string
//! operators as logical matrices, and charge projectors.
//!
//! Every ground state is a uniform superposition over one gauge orbit of
//! admissible configurations. A monomial string operator that commutes with
//! all terms sends the orbit of `x` to the orbit of `W x` (of the same size)
//! with the phase it picks up on `x`, so its ground-space matrix is read off
//! from canonical orbit representatives.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::monomial::MonomialOperator;
use super::paths::{dual_ring, hole_windings, primal_ring, shortest_dual, shortest_primal, DualPath, PrimalPath};
use crate::classify::{abelian_data, classify_anyons, qudit_dimension, AbelianData};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::lattice::{hamiltonian_terms, Face, GaugeReduction, Lattice, RimEdgeGauge, TermSet, Topology, COMMUTATOR_TOLERANCE};

/// Tolerance for unitarity, relations and projector identities.
pub const LOGICAL_TOLERANCE: f64 = 1e-10;

type Matrix = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct StringOperator {
    pub name: String,
    /// Abelian anyon index, `(flux, charge)`.
    pub anyon: usize,
    pub flux: usize,
    pub charge: usize,
    pub closed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charge_path: Option<PrimalPath>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux_path: Option<DualPath>,
    #[serde(skip)]
    pub monomial: MonomialOperator,
}

/// Where a loop family runs around an inner hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LoopSpec {
    pub hole: usize,
    /// Charge loop on the vertex ring this far outside the rim.
    pub primal_offset: usize,
    /// Flux loop through the cells at this Chebyshev distance (>= 1).
    pub dual_ring: usize,
}

impl LoopSpec {
    pub fn around(hole: usize) -> LoopSpec {
        LoopSpec {
            hole,
            primal_offset: 0,
            dual_ring: 1,
        }
    }
}

/// Orthonormal ground basis in charge sectors around the first inner hole.
#[derive(Debug, Clone)]
pub struct LogicalFrame {
    /// Anyon sector of each basis vector; `None` when there is no inner hole to measure.
    pub sectors: Option<Vec<usize>>,
    /// Columns: frame vectors in the orbit basis.
    pub vectors: Matrix,
}

#[derive(Debug, Clone)]
pub struct LogicalOperator {
    pub name: String,
    pub matrix: Matrix,
    pub source: StringOperator,
}

#[derive(Debug, Clone, Serialize)]
pub struct LogicalRecord {
    pub name: String,
    /// Row-major `[re, im]` entries.
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub source: StringOperator,
}

pub fn matrix_record(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    let clean = crate::classify::clean_float;
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [clean(m[(i, j)].re), clean(m[(i, j)].im)]).collect())
        .collect()
}

impl LogicalOperator {
    pub fn record(&self) -> LogicalRecord {
        LogicalRecord {
            name: self.name.clone(),
            matrix: matrix_record(&self.matrix),
            source: self.source.clone(),
        }
    }
}

/// `lhs = phase · rhs`, with the residual of the best phase.
#[derive(Debug, Clone, Serialize)]
pub struct Relation {
    pub lhs: String,
    pub rhs: String,
    pub phase: [f64; 2],
    pub residual: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HoleRecord {
    pub index: usize,
    pub outer: bool,
    pub boundary: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EncodingRecord {
    pub group: String,
    pub holes: Vec<HoleRecord>,
    pub d: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LogicalReport {
    pub encoding: EncodingRecord,
    pub operators: Vec<LogicalRecord>,
    pub relations: Vec<Relation>,
}

#[derive(Debug, Clone)]
pub struct ChargeProjectorFamily {
    pub loop_spec: LoopSpec,
    pub labels: Vec<String>,
    /// One projector per anyon, in the logical frame.
    pub projectors: Vec<Matrix>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProjectorResiduals {
    /// `‖Σ P_a - I‖`
    pub completeness: f64,
    /// `max ‖P_a P_b‖` over `a != b`
    pub orthogonality: f64,
    /// `max ‖P_a² - P_a‖`
    pub idempotence: f64,
    /// `max ‖P_a - P_a†‖`
    pub hermiticity: f64,
    /// Largest off-diagonal entry in the logical frame.
    pub off_diagonal: f64,
}

impl ProjectorResiduals {
    pub fn passes(&self, tol: f64) -> bool {
        [
            self.completeness,
            self.orthogonality,
            self.idempotence,
            self.hermiticity,
            self.off_diagonal,
        ]
        .iter()
        .all(|&r| r <= tol)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectorRecord {
    pub label: String,
    pub rank: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl ChargeProjectorFamily {
    pub fn residuals(&self) -> ProjectorResiduals {
        let d = self.projectors.first().map_or(0, |p| p.nrows());
        let mut sum = Matrix::zeros(d, d);
        let mut r = ProjectorResiduals {
            completeness: 0.0,
            orthogonality: 0.0,
            idempotence: 0.0,
            hermiticity: 0.0,
            off_diagonal: 0.0,
        };
        for (a, p) in self.projectors.iter().enumerate() {
            sum += p;
            r.idempotence = r.idempotence.max((p * p - p).norm());
            r.hermiticity = r.hermiticity.max((p - p.adjoint()).norm());
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        r.off_diagonal = r.off_diagonal.max(p[(i, j)].norm());
                    }
                }
            }
            for q in &self.projectors[a + 1..] {
                r.orthogonality = r.orthogonality.max((p * q).norm());
            }
        }
        r.completeness = (sum - Matrix::identity(d, d)).norm();
        r
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(|p| p.trace().re.round() as usize).collect()
    }

    /// Index of the sector carrying the whole weight of `v`, if any.
    pub fn sector_of(&self, v: &[Complex64]) -> Option<usize> {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let x = nalgebra::DVector::from_column_slice(v);
        self.projectors.iter().position(|p| {
            let w = p * &x;
            (w.norm_squared() - norm).abs() < LOGICAL_TOLERANCE
        })
    }

    pub fn records(&self) -> Vec<ProjectorRecord> {
        self.projectors
            .iter()
            .zip(&self.labels)
            .zip(self.ranks())
            .map(|((p, l), rank)| ProjectorRecord {
                label: l.clone(),
                rank,
                matrix: matrix_record(p),
            })
            .collect()
    }
}

/// Ground space of a hole encoding as orbit representatives.
#[derive(Debug, Clone)]
struct GroundBasis {
    reduction: GaugeReduction,
    reps: Vec<Vec<u8>>,
    stabilizers: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
}

impl GroundBasis {
    fn new(terms: &TermSet, g: &FiniteGroup) -> Result<GroundBasis> {
        let reduction = GaugeReduction::new(terms, g)?;
        let reps = reduction.orbit_representatives(g)?;
        let stabilizers = reps.iter().map(|x| reduction.canonical(g, x).1).collect();
        let index = reps.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
        Ok(GroundBasis {
            reduction,
            reps,
            stabilizers,
            index,
        })
    }
}

pub struct Encoding<'a> {
    g: &'a FiniteGroup,
    lattice: &'a Lattice,
    terms: TermSet,
    data: AbelianData,
    keys: Vec<String>,
    basis: GroundBasis,
    frame: LogicalFrame,
}

impl<'a> Encoding<'a> {
    pub fn new(g: &'a FiniteGroup, lattice: &'a Lattice) -> Result<Encoding<'a>> {
        let data = abelian_data(g)?;
        let model = classify_anyons(g)?;
        let keys = model.anyons().iter().map(|a| a.key()).collect();
        let terms = hamiltonian_terms(lattice, g, RimEdgeGauge::DanglingOnly)?;
        let basis = GroundBasis::new(&terms, g)?;
        let d = basis.reps.len();
        let inner: Vec<usize> = lattice.inner_holes().map(|h| h.index).collect();
        if lattice.topology() == Topology::Patch && inner.len() == 1 {
            let k1 = &lattice.holes()[0].boundary;
            let k2 = &lattice.holes()[inner[0]].boundary;
            let expect = qudit_dimension(g, &model, k1, k2)?.value();
            if expect != d as u64 {
                return Err(Error::invariant(format!(
                    "lattice ground space has dimension {d}, condensation predicts {expect}"
                )));
            }
        }
        let mut enc = Encoding {
            g,
            lattice,
            terms,
            data,
            keys,
            basis,
            frame: LogicalFrame {
                sectors: None,
                vectors: Matrix::identity(d, d),
            },
        };
        if lattice.topology() == Topology::Patch {
            if let Some(&h) = inner.first() {
                if let Ok(frame) = enc.sector_frame(LoopSpec::around(h)) {
                    enc.frame = frame;
                }
            }
        }
        Ok(enc)
    }

    pub fn dimension(&self) -> usize {
        self.basis.reps.len()
    }

    pub fn group(&self) -> &FiniteGroup {
        self.g
    }

    pub fn lattice(&self) -> &Lattice {
        self.lattice
    }

    pub fn terms(&self) -> &TermSet {
        &self.terms
    }

    pub fn data(&self) -> &AbelianData {
        &self.data
    }

    pub fn frame(&self) -> &LogicalFrame {
        &self.frame
    }

    /// Canonical orbit representatives spanning the ground space.
    pub fn orbit_representatives(&self) -> &[Vec<u8>] {
        &self.basis.reps
    }

    pub fn anyon_key(&self, a: usize) -> &str {
        &self.keys[a]
    }

    pub fn anyon_by_key(&self, key: &str) -> Result<usize> {
        self.keys
            .iter()
            .position(|k| k == key)
            .ok_or_else(|| Error::Parse(format!("unknown anyon `{key}`")))
    }

    fn check_anyon(&self, a: usize) -> Result<()> {
        if a >= self.data.len() {
            return Err(Error::Parse(format!("anyon index {a} out of range")));
        }
        Ok(())
    }

    fn build(
        &self,
        name: String,
        anyon: usize,
        closed: bool,
        charge_path: Option<PrimalPath>,
        flux_path: Option<DualPath>,
    ) -> Result<StringOperator> {
        let (flux, charge) = (self.data.flux[anyon], self.data.charge[anyon]);
        let mut monomial = MonomialOperator::identity();
        if let Some(p) = &charge_path {
            p.validate(self.lattice)?;
            monomial = MonomialOperator::charge_string(self.g, self.data.character(), charge, p);
        }
        if let Some(p) = &flux_path {
            p.validate(self.lattice)?;
            monomial = MonomialOperator::flux_string(self.g, flux, p).compose(self.g, &monomial);
        }
        let op = StringOperator {
            name,
            anyon,
            flux,
            charge,
            closed,
            charge_path,
            flux_path,
            monomial,
        };
        self.check_commutes(&op)?;
        Ok(op)
    }

    /// Rejects operators that fail to commute with some Hamiltonian term.
    pub fn check_commutes(&self, op: &StringOperator) -> Result<()> {
        for t in &self.terms.terms {
            let norm = op.monomial.commutator_norm(self.g, &t.op);
            if norm > COMMUTATOR_TOLERANCE {
                return Err(Error::InvalidPath(format!(
                    "{} does not commute with {} (norm {norm:.3e})",
                    op.name, t.label
                )));
            }
        }
        Ok(())
    }

    /// Pieces of anyon `a` that need a path: (charge, flux).
    fn pieces(&self, a: usize) -> (bool, bool) {
        (self.data.charge[a] != 0, self.data.flux[a] != self.g.identity())
    }

    fn condenses(&self, a: usize, hole: usize) -> Result<bool> {
        let k = &self.lattice.hole(hole)?.boundary;
        Ok(self.data.branching(self.g, k)?[a].condensed)
    }

    /// Moves anyon `a` from the boundary of hole `i` to that of hole `j`
    /// along the shortest paths.
    pub fn tunnel_operator(&self, i: usize, j: usize, a: usize) -> Result<StringOperator> {
        self.check_anyon(a)?;
        let (needs_charge, needs_flux) = self.pieces(a);
        let charge = if needs_charge { Some(shortest_primal(self.lattice, i, j)?) } else { None };
        let flux = if needs_flux { Some(shortest_dual(self.lattice, i, j)?) } else { None };
        self.tunnel_operator_along(i, j, a, charge, flux)
    }

    pub fn tunnel_operator_along(
        &self,
        i: usize,
        j: usize,
        a: usize,
        charge: Option<PrimalPath>,
        flux: Option<DualPath>,
    ) -> Result<StringOperator> {
        self.check_anyon(a)?;
        let abar = self.data.dual(a);
        if !self.condenses(a, j)? {
            return Err(Error::NotCondensable(format!(
                "{} does not condense on hole {j}",
                self.keys[a]
            )));
        }
        if !self.condenses(abar, i)? {
            return Err(Error::NotCondensable(format!(
                "antiparticle {} of {} does not condense on hole {i}",
                self.keys[abar], self.keys[a]
            )));
        }
        let l = self.lattice;
        let (needs_charge, needs_flux) = self.pieces(a);
        let charge = if needs_charge { charge } else { None };
        let flux = if needs_flux { flux } else { None };
        if needs_charge {
            let p = charge.as_ref().ok_or_else(|| Error::InvalidPath("charge path required".into()))?;
            p.validate(l)?;
            let (s, e) = (l.vertices()[p.start].rim, l.vertices()[p.end(l)].rim);
            if s != Some(i) || e != Some(j) {
                return Err(Error::InvalidPath(format!(
                    "charge path must run from the rim of hole {i} to the rim of hole {j}"
                )));
            }
        }
        if needs_flux {
            let p = flux.as_ref().ok_or_else(|| Error::InvalidPath("flux path required".into()))?;
            p.validate(l)?;
            if p.start != Face::Hole(i) || p.end(l) != Face::Hole(j) {
                return Err(Error::InvalidPath(format!(
                    "flux path must run from hole {i} to hole {j}"
                )));
            }
        }
        self.build(format!("tunnel[{}: {i}->{j}]", self.keys[a]), a, false, charge, flux)
    }

    /// Loop of anyon `b` around hole `spec.hole` on the given rings.
    pub fn loop_operator_at(&self, spec: LoopSpec, b: usize) -> Result<StringOperator> {
        self.check_anyon(b)?;
        let (needs_charge, needs_flux) = self.pieces(b);
        let charge = if needs_charge {
            Some(primal_ring(self.lattice, spec.hole, spec.primal_offset)?)
        } else {
            None
        };
        let flux = if needs_flux {
            Some(dual_ring(self.lattice, spec.hole, spec.dual_ring)?)
        } else {
            None
        };
        self.loop_operator_along(spec.hole, b, charge, flux)
    }

    pub fn loop_operator(&self, hole: usize, b: usize) -> Result<StringOperator> {
        self.loop_operator_at(LoopSpec::around(hole), b)
    }

    /// Loop of `b` along explicit closed paths, each winding once around
    /// `hole` and around no other inner hole.
    pub fn loop_operator_along(
        &self,
        hole: usize,
        b: usize,
        charge: Option<PrimalPath>,
        flux: Option<DualPath>,
    ) -> Result<StringOperator> {
        self.check_anyon(b)?;
        if self.lattice.hole(hole)?.outer {
            return Err(Error::InvalidPath("loops must encircle an inner hole".into()));
        }
        self.check_loop(b, &charge, &flux, |h| if h == hole { 1 } else { 0 })?;
        self.build(format!("loop[{} @{hole}]", self.keys[b]), b, true, charge, flux)
    }

    /// Closed string of `b` that encircles no hole.
    pub fn contractible_loop(
        &self,
        b: usize,
        charge: Option<PrimalPath>,
        flux: Option<DualPath>,
    ) -> Result<StringOperator> {
        self.check_anyon(b)?;
        self.check_loop(b, &charge, &flux, |_| 0)?;
        self.build(format!("loop[{} contractible]", self.keys[b]), b, true, charge, flux)
    }

    fn check_loop(
        &self,
        b: usize,
        charge: &Option<PrimalPath>,
        flux: &Option<DualPath>,
        expect: impl Fn(usize) -> i64,
    ) -> Result<()> {
        let (needs_charge, needs_flux) = self.pieces(b);
        let l = self.lattice;
        if needs_charge {
            let p = charge.as_ref().ok_or_else(|| Error::InvalidPath("charge loop required".into()))?;
            p.validate(l)?;
            if !p.is_closed(l) {
                return Err(Error::InvalidPath("charge loop is not closed".into()));
            }
            for (h, w) in hole_windings(l, Some(p), None)? {
                if w.abs() != expect(h) {
                    return Err(Error::InvalidPath(format!("charge loop winds {w} times around hole {h}")));
                }
            }
        }
        if needs_flux {
            let p = flux.as_ref().ok_or_else(|| Error::InvalidPath("flux loop required".into()))?;
            p.validate(l)?;
            if !p.is_closed(l) {
                return Err(Error::InvalidPath("flux loop is not closed".into()));
            }
            for (h, w) in hole_windings(l, None, Some(p))? {
                if w.abs() != expect(h) {
                    return Err(Error::InvalidPath(format!("flux loop winds {w} times around hole {h}")));
                }
            }
        }
        Ok(())
    }

    /// Ground-space matrix of `op` in the orbit basis.
    pub fn orbit_matrix(&self, op: &StringOperator) -> Result<Matrix> {
        let d = self.dimension();
        let mut m = Matrix::zeros(d, d);
        for (j, x0) in self.basis.reps.iter().enumerate() {
            let mut x = x0.clone();
            let phase = op.monomial.apply(self.g, &mut x);
            if !self.basis.reduction.is_admissible(self.g, &x) {
                return Err(Error::invariant(format!("{} leaves the flat configurations", op.name)));
            }
            let (rep, stab) = self.basis.reduction.canonical(self.g, &x);
            let i = *self
                .basis
                .index
                .get(&rep)
                .ok_or_else(|| Error::invariant(format!("{} leaves the ground space", op.name)))?;
            if stab != self.basis.stabilizers[j] {
                return Err(Error::invariant(format!("{} changes an orbit size", op.name)));
            }
            m[(i, j)] += phase;
        }
        Ok(m)
    }

    /// Ground-space matrix of `op` in the logical frame, without phase normalization.
    pub fn ground_matrix(&self, op: &StringOperator) -> Result<Matrix> {
        let f = &self.frame.vectors;
        Ok(f.adjoint() * self.orbit_matrix(op)? * f)
    }

    /// Logical matrix of `op`. Open strings are normalized so that the first
    /// nonzero entry of the first column is real and positive.
    pub fn logical_operator(&self, op: &StringOperator) -> Result<LogicalOperator> {
        let mut m = self.ground_matrix(op)?;
        let d = m.nrows();
        let unitarity = (m.adjoint() * &m - Matrix::identity(d, d)).norm();
        if unitarity > LOGICAL_TOLERANCE {
            return Err(Error::invariant(format!(
                "{} is not unitary on the ground space (residual {unitarity:.3e})",
                op.name
            )));
        }
        if !op.closed {
            if let Some(i) = (0..d).find(|&i| m[(i, 0)].norm() > LOGICAL_TOLERANCE) {
                let z = m[(i, 0)];
                m *= z.conj() / z.norm();
            }
        }
        Ok(LogicalOperator {
            name: op.name.clone(),
            matrix: m,
            source: op.clone(),
        })
    }

    fn loop_family(&self, spec: LoopSpec) -> Result<Vec<Matrix>> {
        (0..self.data.len())
            .map(|b| self.orbit_matrix(&self.loop_operator_at(spec, b)?))
            .collect()
    }

    /// `P_a = S_{0a} Σ_b conj(S_ab) W_b` in the orbit basis.
    fn orbit_projectors(&self, spec: LoopSpec) -> Result<Vec<Matrix>> {
        let loops = self.loop_family(spec)?;
        let d = self.dimension();
        let n = self.data.len();
        Ok((0..n)
            .map(|a| {
                let mut p = Matrix::zeros(d, d);
                for (b, w) in loops.iter().enumerate() {
                    p += w * (self.data.s[0][a] * self.data.s[a][b].conj());
                }
                p
            })
            .collect())
    }

    fn sector_frame(&self, spec: LoopSpec) -> Result<LogicalFrame> {
        let d = self.dimension();
        let projectors = self.orbit_projectors(spec)?;
        let mut sectors = Vec::new();
        let mut vectors: Vec<nalgebra::DVector<Complex64>> = Vec::new();
        for (a, p) in projectors.iter().enumerate() {
            let rank = p.trace().re.round() as usize;
            let mut found = 0;
            for j in 0..d {
                if found == rank {
                    break;
                }
                let mut v = p.column(j).into_owned();
                for u in &vectors {
                    let overlap = u.dotc(&v);
                    v -= u * overlap;
                }
                let norm = v.norm();
                if norm < 1e-6 {
                    continue;
                }
                v /= c(norm);
                if let Some(k) = v.iter().position(|z| z.norm() > LOGICAL_TOLERANCE) {
                    let z = v[k];
                    v *= z.conj() / z.norm();
                }
                vectors.push(v);
                sectors.push(a);
                found += 1;
            }
        }
        if vectors.len() != d {
            return Err(Error::invariant(format!(
                "charge sectors span {} of {d} ground states",
                vectors.len()
            )));
        }
        let f = Matrix::from_columns(&vectors);
        let err = (f.adjoint() * &f - Matrix::identity(d, d)).norm();
        if err > LOGICAL_TOLERANCE {
            return Err(Error::invariant(format!("sector frame is not orthonormal ({err:.3e})")));
        }
        Ok(LogicalFrame {
            sectors: Some(sectors),
            vectors: f,
        })
    }

    /// Charge projector family on the loops of `spec`, in the logical frame.
    pub fn charge_projectors(&self, spec: LoopSpec) -> Result<ChargeProjectorFamily> {
        let f = &self.frame.vectors;
        let projectors = self
            .orbit_projectors(spec)?
            .into_iter()
            .map(|p| f.adjoint() * p * f)
            .collect();
        Ok(ChargeProjectorFamily {
            loop_spec: spec,
            labels: self.keys.clone(),
            projectors,
        })
    }

    /// Tunnel of the first nontrivial anyon that moves from the outer rim to
    /// the first inner hole, and the first loop around that hole acting
    /// nontrivially on the ground space. Empty when the lattice has no inner hole.
    pub fn default_generators(&self) -> Result<Vec<StringOperator>> {
        let Some(h) = self.lattice.inner_holes().next().map(|h| h.index) else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for a in 1..self.data.len() {
            if let Ok(mut t) = self.tunnel_operator(0, h, a) {
                t.name = "X".into();
                out.push(t);
                break;
            }
        }
        for b in 1..self.data.len() {
            let Ok(mut w) = self.loop_operator(h, b) else { continue };
            let m = self.ground_matrix(&w)?;
            let z = m[(0, 0)];
            let scalar = (m - Matrix::identity(self.dimension(), self.dimension()) * z).norm();
            if scalar > LOGICAL_TOLERANCE {
                w.name = "Z".into();
                out.push(w);
                break;
            }
        }
        Ok(out)
    }

    pub fn encoding_record(&self) -> EncodingRecord {
        EncodingRecord {
            group: self.g.label().to_string(),
            holes: self
                .lattice
                .holes()
                .iter()
                .map(|h| HoleRecord {
                    index: h.index,
                    outer: h.outer,
                    boundary: h.boundary.names(self.g),
                })
                .collect(),
            d: self.dimension(),
        }
    }
}

/// Best `λ` with `a ≈ λ b`, and the residual `‖a - λ b‖`.
fn proportionality(a: &Matrix, b: &Matrix) -> (Complex64, f64) {
    let denom = b.norm_squared();
    if denom == 0.0 {
        return (c(0.0), a.norm());
    }
    let lambda = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum::<Complex64>() / denom;
    (lambda, (a - b * lambda).norm())
}

fn relation(lhs: String, rhs: String, a: &Matrix, b: &Matrix) -> Relation {
    let (lambda, residual) = proportionality(a, b);
    let clean = crate::classify::clean_float;
    Relation {
        lhs,
        rhs,
        phase: [clean(lambda.re), clean(lambda.im)],
        residual,
        holds: residual <= LOGICAL_TOLERANCE && (lambda.norm() - 1.0).abs() <= LOGICAL_TOLERANCE,
    }
}

/// Orders up to phase and pairwise commutation phases of the operators.
pub fn relations(ops: &[LogicalOperator], max_order: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    for a in ops {
        let d = a.matrix.nrows();
        let id = Matrix::identity(d, d);
        let mut p = a.matrix.clone();
        let mut found = None;
        for k in 1..=max_order.max(1) {
            let r = relation(format!("{}^{k}", a.name), "I".into(), &p, &id);
            if r.holds {
                found = Some(r);
                break;
            }
            if k == max_order.max(1) {
                found = Some(r);
            }
            p = &p * &a.matrix;
        }
        out.extend(found);
    }
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            out.push(relation(
                format!("{} {}", a.name, b.name),
                format!("{} {}", b.name, a.name),
                &(&a.matrix * &b.matrix),
                &(&b.matrix * &a.matrix),
            ));
        }
    }
    out
}

/// Logical matrices of `generators` in one frame, with their relations.
pub fn logical_algebra(enc: &Encoding, generators: &[StringOperator]) -> Result<LogicalReport> {
    let ops: Vec<LogicalOperator> = generators
        .iter()
        .map(|s| enc.logical_operator(s))
        .collect::<Result<_>>()?;
    let relations = relations(&ops, enc.group().order());
    Ok(LogicalReport {
        encoding: enc.encoding_record(),
        operators: ops.iter().map(LogicalOperator::record).collect(),
        relations,
    })
}
