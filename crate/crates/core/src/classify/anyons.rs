use num_complex::Complex64;
use serde::Serialize;

use super::SUM_RULE_TOLERANCE;
use crate::character::{subgroup_character_table, CharacterTable};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};

/// A bulk anyon `(C, π)`: conjugacy class plus irrep of the centralizer of
/// its representative.
#[derive(Debug, Clone)]
pub struct AnyonLabel {
    pub index: usize,
    pub class_index: usize,
    pub representative: usize,
    pub class_size: usize,
    pub centralizer: Subgroup,
    pub irrep: usize,
    pub irrep_dim: usize,
    /// `|C| · dim π`
    pub dim: usize,
    /// `χ_π(r) / dim π`
    pub twist: Complex64,
}

impl AnyonLabel {
    /// Canonical key `C{i}-pi{j}`.
    pub fn key(&self) -> String {
        format!("C{}-pi{}", self.class_index, self.irrep)
    }

    pub fn is_vacuum(&self) -> bool {
        self.class_index == 0 && self.irrep == 0
    }

    pub fn is_boson(&self) -> bool {
        (self.twist - Complex64::new(1.0, 0.0)).norm() < SUM_RULE_TOLERANCE
    }
}

/// Flat serializable view of an anyon.
#[derive(Debug, Clone, Serialize)]
pub struct AnyonRecord {
    pub key: String,
    pub letter: Option<String>,
    pub class_representative: String,
    pub class_size: usize,
    pub centralizer_order: usize,
    pub irrep: usize,
    pub irrep_dim: usize,
    pub dim: usize,
    pub twist: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct AnyonModel {
    group_order: usize,
    anyons: Vec<AnyonLabel>,
    tables: Vec<CharacterTable>,
    class_offsets: Vec<usize>,
}

impl AnyonModel {
    pub fn anyons(&self) -> &[AnyonLabel] {
        &self.anyons
    }
    pub fn len(&self) -> usize {
        self.anyons.len()
    }
    pub fn is_empty(&self) -> bool {
        self.anyons.is_empty()
    }
    pub fn group_order(&self) -> usize {
        self.group_order
    }
    pub fn vacuum(&self) -> usize {
        0
    }
    /// Character table of the centralizer of class `class`.
    pub fn centralizer_table(&self, class: usize) -> &CharacterTable {
        &self.tables[class]
    }
    pub fn index_of(&self, class: usize, irrep: usize) -> usize {
        self.class_offsets[class] + irrep
    }
    pub fn num_classes(&self) -> usize {
        self.tables.len()
    }

    /// Letter labels `A, B, C, ...` in canonical order, when there are at most 26 anyons.
    pub fn letter(&self, index: usize) -> Option<String> {
        if self.anyons.len() <= 26 {
            Some(((b'A' + index as u8) as char).to_string())
        } else {
            None
        }
    }

    pub fn records(&self, g: &FiniteGroup) -> Vec<AnyonRecord> {
        self.anyons
            .iter()
            .map(|a| AnyonRecord {
                key: a.key(),
                letter: self.letter(a.index),
                class_representative: g.name(a.representative).to_string(),
                class_size: a.class_size,
                centralizer_order: a.centralizer.order(),
                irrep: a.irrep,
                irrep_dim: a.irrep_dim,
                dim: a.dim,
                twist: [clean(a.twist.re), clean(a.twist.im)],
            })
            .collect()
    }

    /// Σ d² = |G|², unit twists, trivial vacuum.
    pub fn check_sum_rules(&self) -> Result<()> {
        let n = self.group_order;
        let total: usize = self.anyons.iter().map(|a| a.dim * a.dim).sum();
        if total != n * n {
            return Err(Error::invariant(format!("anyon Σd² = {total} != |G|² = {}", n * n)));
        }
        for a in &self.anyons {
            if (a.twist.norm() - 1.0).abs() > SUM_RULE_TOLERANCE {
                return Err(Error::invariant(format!("twist of {} is not a phase", a.key())));
            }
        }
        let v = &self.anyons[0];
        if v.dim != 1 || !v.is_boson() {
            return Err(Error::invariant("vacuum is not trivial"));
        }
        Ok(())
    }
}

pub fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// All anyons `(C, π)` of D(G), ordered by class then irrep.
pub fn classify_anyons(g: &FiniteGroup) -> Result<AnyonModel> {
    let mut anyons = Vec::new();
    let mut tables = Vec::new();
    let mut class_offsets = Vec::new();
    for (ci, class) in g.conjugacy_classes().iter().enumerate() {
        let table = subgroup_character_table(g, &class.centralizer)?;
        class_offsets.push(anyons.len());
        let r = class.representative;
        for pi in 0..table.num_irreps() {
            let d = table.dim(pi);
            anyons.push(AnyonLabel {
                index: anyons.len(),
                class_index: ci,
                representative: r,
                class_size: class.size(),
                centralizer: class.centralizer.clone(),
                irrep: pi,
                irrep_dim: d,
                dim: class.size() * d,
                twist: table.chi(pi, r) / d as f64,
            });
        }
        tables.push(table);
    }
    let model = AnyonModel {
        group_order: g.order(),
        anyons,
        tables,
        class_offsets,
    };
    model.check_sum_rules()?;
    Ok(model)
}
