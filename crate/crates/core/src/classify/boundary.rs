use num_complex::Complex64;
use serde::Serialize;

use super::anyons::{clean, AnyonModel};
use super::SUM_RULE_TOLERANCE;
use crate::character::subgroup_character_table;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};

/// A gapped boundary labelled by a subgroup `K` (trivial cocycle).
#[derive(Debug, Clone)]
pub struct BoundaryType {
    pub subgroup: Subgroup,
    /// Lexicographically smallest conjugate of `K`.
    pub canonical: Subgroup,
}

impl BoundaryType {
    pub fn new(g: &FiniteGroup, k: &Subgroup) -> Result<Self> {
        g.check_parent(k)?;
        Ok(BoundaryType {
            subgroup: k.clone(),
            canonical: g.canonical_conjugate(k),
        })
    }
}

/// Multiplicities of bulk anyons in the condensate of a boundary.
#[derive(Debug, Clone)]
pub struct LagrangianAlgebra {
    pub boundary: BoundaryType,
    pub multiplicities: Vec<u32>,
}

impl LagrangianAlgebra {
    /// Quantum dimension of the algebra, `Σ m(a) d_a`.
    pub fn dimension(&self, model: &AnyonModel) -> usize {
        self.multiplicities
            .iter()
            .zip(model.anyons())
            .map(|(&m, a)| m as usize * a.dim)
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.multiplicities.len())
            .filter(|&i| self.multiplicities[i] > 0)
            .collect()
    }

    /// `A + C + 2F` style formula using letter labels when available.
    pub fn formula(&self, model: &AnyonModel) -> String {
        let parts: Vec<String> = self
            .support()
            .into_iter()
            .map(|i| {
                let name = model
                    .letter(i)
                    .unwrap_or_else(|| model.anyons()[i].key());
                match self.multiplicities[i] {
                    1 => name,
                    m => format!("{m}{name}"),
                }
            })
            .collect();
        parts.join("+")
    }

    pub(crate) fn check(&self, model: &AnyonModel) -> Result<()> {
        if self.multiplicities[model.vacuum()] != 1 {
            return Err(Error::invariant("vacuum multiplicity is not 1"));
        }
        let dim = self.dimension(model);
        if dim != model.group_order() {
            return Err(Error::invariant(format!(
                "condensate dimension {dim} != |G| = {}",
                model.group_order()
            )));
        }
        for i in self.support() {
            if !model.anyons()[i].is_boson() {
                return Err(Error::invariant(format!(
                    "non-bosonic anyon {} condenses",
                    model.anyons()[i].key()
                )));
            }
        }
        Ok(())
    }
}

/// Condensation multiplicities for boundary `K`.
///
/// `m(C, π)` is the multiplicity of `π` in the permutation character of
/// `E(r)` acting by left translation on
/// `Λ_r = { xK : x^{-1} r x ∈ K }`.
pub fn lagrangian_algebra(
    g: &FiniteGroup,
    model: &AnyonModel,
    k: &Subgroup,
) -> Result<LagrangianAlgebra> {
    let boundary = BoundaryType::new(g, k)?;
    let cosets = g.left_cosets(k);
    let mut coset_of = vec![0usize; g.order()];
    for (ci, c) in cosets.iter().enumerate() {
        for &x in c {
            coset_of[x] = ci;
        }
    }
    let mut multiplicities = vec![0u32; model.len()];
    for (ci, class) in g.conjugacy_classes().iter().enumerate() {
        let r = class.representative;
        let lambda: Vec<usize> = (0..cosets.len())
            .filter(|&c| {
                let x = cosets[c][0];
                k.contains(g.mul(g.mul(g.inv(x), r), x))
            })
            .collect();
        let table = model.centralizer_table(ci);
        let fixed: Vec<Complex64> = (0..table.num_classes())
            .map(|cc| {
                let z = table.representative(cc);
                let n = lambda
                    .iter()
                    .filter(|&&c| coset_of[g.mul(z, cosets[c][0])] == c)
                    .count();
                Complex64::new(n as f64, 0.0)
            })
            .collect();
        let m = table.decompose(&fixed)?;
        for (pi, mult) in m.into_iter().enumerate() {
            multiplicities[model.index_of(ci, pi)] = mult;
        }
    }
    let alg = LagrangianAlgebra {
        boundary,
        multiplicities,
    };
    alg.check(model)?;
    Ok(alg)
}

/// Pointlike object at the junction of boundaries `K1`, `K2`: a double coset
/// `T ∈ K1\G/K2` and an irrep of `K1 ∩ r_T K2 r_T^{-1}`.
#[derive(Debug, Clone)]
pub struct DefectLabel {
    pub coset_index: usize,
    pub representative: usize,
    pub coset_size: usize,
    pub stabilizer: Subgroup,
    pub irrep: usize,
    pub irrep_dim: usize,
    /// `dim R · |T| / sqrt(|K1| |K2|)`
    pub dim: f64,
}

/// Excitations on a single boundary are defects with `K1 = K2 = K`.
pub type BoundaryExcitationLabel = DefectLabel;

impl DefectLabel {
    /// Canonical key `T{i}-R{j}`.
    pub fn key(&self) -> String {
        format!("T{}-R{}", self.coset_index, self.irrep)
    }

    pub fn is_vacuum(&self) -> bool {
        self.coset_index == 0 && self.irrep == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectRecord {
    pub key: String,
    pub coset_representative: String,
    pub coset_size: usize,
    pub stabilizer_order: usize,
    pub irrep: usize,
    pub irrep_dim: usize,
    pub dim: f64,
}

impl DefectLabel {
    pub fn record(&self, g: &FiniteGroup) -> DefectRecord {
        DefectRecord {
            key: self.key(),
            coset_representative: g.name(self.representative).to_string(),
            coset_size: self.coset_size,
            stabilizer_order: self.stabilizer.order(),
            irrep: self.irrep,
            irrep_dim: self.irrep_dim,
            dim: clean(self.dim),
        }
    }
}

/// Defects between boundaries `K1` and `K2`; asserts `Σ d² = |G|`.
pub fn boundary_defects(g: &FiniteGroup, k1: &Subgroup, k2: &Subgroup) -> Result<Vec<DefectLabel>> {
    let cosets = g.double_cosets(k1, k2)?;
    let norm = ((k1.order() * k2.order()) as f64).sqrt();
    let mut out = Vec::new();
    for (ti, t) in cosets.iter().enumerate() {
        let table = subgroup_character_table(g, &t.stabilizer)?;
        for ri in 0..table.num_irreps() {
            let d = table.dim(ri);
            out.push(DefectLabel {
                coset_index: ti,
                representative: t.representative,
                coset_size: t.size(),
                stabilizer: t.stabilizer.clone(),
                irrep: ri,
                irrep_dim: d,
                dim: d as f64 * t.size() as f64 / norm,
            });
        }
    }
    let total: f64 = out.iter().map(|d| d.dim * d.dim).sum();
    if (total - g.order() as f64).abs() > SUM_RULE_TOLERANCE * g.order() as f64 {
        return Err(Error::invariant(format!(
            "defect Σd² = {total} != |G| = {}",
            g.order()
        )));
    }
    Ok(out)
}

/// Excitations on boundary `K`: `(T, R)` with `T ∈ K\G/K`, `d = |T|/|K| · dim R`.
pub fn boundary_excitations(g: &FiniteGroup, k: &Subgroup) -> Result<Vec<BoundaryExcitationLabel>> {
    let labels = boundary_defects(g, k, k)?;
    if !labels[0].is_vacuum() || (labels[0].dim - 1.0).abs() > SUM_RULE_TOLERANCE {
        return Err(Error::invariant("boundary vacuum does not have dimension 1"));
    }
    Ok(labels)
}

/// Ground-space dimension of two boundaries `K1`, `K2` with vacuum total charge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuditDimension {
    /// `Σ_a m1(a) m2(a)`
    pub via_condensation: u64,
    /// `Σ_T #Irr(K1 ∩ r_T K2 r_T^{-1})`
    pub via_defects: u64,
}

impl QuditDimension {
    pub fn value(&self) -> u64 {
        self.via_condensation
    }
}

/// Computes the qudit dimension both ways; disagreement is an invariant failure.
pub fn qudit_dimension(
    g: &FiniteGroup,
    model: &AnyonModel,
    k1: &Subgroup,
    k2: &Subgroup,
) -> Result<QuditDimension> {
    let a1 = lagrangian_algebra(g, model, k1)?;
    let a2 = lagrangian_algebra(g, model, k2)?;
    let via_condensation = a1
        .multiplicities
        .iter()
        .zip(&a2.multiplicities)
        .map(|(&x, &y)| x as u64 * y as u64)
        .sum();
    let via_defects = boundary_defects(g, k1, k2)?.len() as u64;
    if via_condensation != via_defects {
        return Err(Error::invariant(format!(
            "qudit dimension mismatch: Σ m1·m2 = {via_condensation}, defect count = {via_defects}"
        )));
    }
    Ok(QuditDimension {
        via_condensation,
        via_defects,
    })
}
