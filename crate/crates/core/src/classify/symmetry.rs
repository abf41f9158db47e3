use serde::Serialize;

use super::anyons::AnyonModel;
use super::boundary::{lagrangian_algebra, LagrangianAlgebra};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};

const CHARACTER_MATCH: f64 = 1e-9;

/// Permutation of anyon labels induced by an automorphism `φ`:
/// `(C, π) -> (φ(C), π ∘ φ^{-1})`.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryAction {
    pub automorphism: Vec<usize>,
    pub anyon_permutation: Vec<usize>,
}

pub fn symmetry_action(g: &FiniteGroup, model: &AnyonModel, phi: &[usize]) -> Result<SymmetryAction> {
    g.check_automorphism(phi)?;
    let mut inverse = vec![0usize; g.order()];
    for (x, &y) in phi.iter().enumerate() {
        inverse[y] = x;
    }
    let classes = g.conjugacy_classes();
    let mut perm = vec![0usize; model.len()];
    for a in model.anyons() {
        let image = phi[a.representative];
        let target_class = g.class_of(image);
        let target_rep = classes[target_class].representative;
        // h φ(r) h^{-1} = r'
        let h = g
            .elements()
            .find(|&h| g.conj(h, image) == target_rep)
            .expect("image lies in its class");
        let h_inv = g.inv(h);
        let source = model.centralizer_table(a.class_index);
        let target = model.centralizer_table(target_class);
        // ψ = c_h ∘ φ : E(r) -> E(r'), so χ'(y) = χ(ψ^{-1}(y)) = χ(φ^{-1}(h^{-1} y h)).
        let pulled: Vec<_> = (0..target.num_classes())
            .map(|c| {
                let y = target.representative(c);
                source.chi(a.irrep, inverse[g.conj(h_inv, y)])
            })
            .collect();
        let irrep = (0..target.num_irreps())
            .find(|&i| {
                (0..target.num_classes()).all(|c| (target.value(i, c) - pulled[c]).norm() < CHARACTER_MATCH)
            })
            .ok_or_else(|| Error::invariant(format!("no image irrep for anyon {}", a.key())))?;
        perm[a.index] = model.index_of(target_class, irrep);
    }
    let mut seen = vec![false; perm.len()];
    for &p in &perm {
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::invariant("automorphism action is not a permutation"));
        }
    }
    Ok(SymmetryAction {
        automorphism: phi.to_vec(),
        anyon_permutation: perm,
    })
}

impl SymmetryAction {
    pub fn apply(&self, anyon: usize) -> usize {
        self.anyon_permutation[anyon]
    }

    pub fn is_trivial(&self) -> bool {
        self.anyon_permutation.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Multiplicities of the transported algebra: `m'(σ(a)) = m(a)`.
    pub fn transport(&self, alg: &LagrangianAlgebra) -> Vec<u32> {
        let mut out = vec![0u32; alg.multiplicities.len()];
        for (a, &m) in alg.multiplicities.iter().enumerate() {
            out[self.apply(a)] = m;
        }
        out
    }

    /// Checks that the algebra of `φ(K)` is the transport of the algebra of `K`.
    pub fn check_equivariance(&self, g: &FiniteGroup, model: &AnyonModel, k: &Subgroup) -> Result<()> {
        let before = lagrangian_algebra(g, model, k)?;
        let mapped = g.map_subgroup(&self.automorphism, k);
        let after = lagrangian_algebra(g, model, &mapped)?;
        if self.transport(&before) != after.multiplicities {
            return Err(Error::invariant("condensate is not equivariant under the automorphism"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_anyons;

    #[test]
    fn inner_automorphisms_act_trivially() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let m = classify_anyons(&g).unwrap();
        for h in g.elements() {
            let act = symmetry_action(&g, &m, &g.inner_automorphism(h)).unwrap();
            assert!(act.is_trivial());
        }
    }

    #[test]
    fn z3_inversion_conjugates_labels() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let m = classify_anyons(&g).unwrap();
        let inv: Vec<usize> = g.elements().map(|x| g.inv(x)).collect();
        let act = symmetry_action(&g, &m, &inv).unwrap();
        // (g, χ) -> (g^{-1}, χ̄)
        assert_eq!(act.apply(0), 0);
        assert_eq!(act.apply(1), 2);
        assert_eq!(act.apply(4), 8);
    }

    #[test]
    fn equivariance_over_all_subgroups() {
        let g = FiniteGroup::dihedral(4).unwrap();
        let m = classify_anyons(&g).unwrap();
        let lattice = g.enumerate_subgroups().unwrap();
        for phi in g.automorphisms() {
            let act = symmetry_action(&g, &m, &phi).unwrap();
            for k in lattice.all() {
                act.check_equivariance(&g, &m, k).unwrap();
            }
        }
    }
}
