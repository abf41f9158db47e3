//! Operators that send each basis configuration to a single configuration
//! times a phase, built as tensor products of single-edge factors.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::paths::{DualPath, PrimalPath};
use crate::character::CharacterTable;
use crate::group::FiniteGroup;
use crate::lattice::TermOp;

/// `|x⟩ -> phase[x] |shift · x⟩` on one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFactor {
    pub shift: usize,
    pub phase: Vec<Complex64>,
}

impl EdgeFactor {
    fn identity(g: &FiniteGroup) -> EdgeFactor {
        EdgeFactor {
            shift: g.identity(),
            phase: vec![Complex64::new(1.0, 0.0); g.order()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonomialOperator {
    pub factors: BTreeMap<usize, EdgeFactor>,
    pub scalar: Complex64,
}

impl Default for MonomialOperator {
    fn default() -> Self {
        MonomialOperator {
            factors: BTreeMap::new(),
            scalar: Complex64::new(1.0, 0.0),
        }
    }
}

impl MonomialOperator {
    pub fn identity() -> MonomialOperator {
        MonomialOperator::default()
    }

    /// `Π_e χ(x_e)^{±1}` along a primal path, `+1` on forward steps.
    pub fn charge_string(g: &FiniteGroup, table: &CharacterTable, irrep: usize, path: &PrimalPath) -> MonomialOperator {
        let mut op = MonomialOperator::identity();
        for s in &path.steps {
            let f = op.factors.entry(s.edge).or_insert_with(|| EdgeFactor::identity(g));
            for (x, p) in f.phase.iter_mut().enumerate() {
                let v = table.chi(irrep, x);
                *p *= if s.forward { v } else { v.conj() };
            }
        }
        op
    }

    /// `x_e -> b^{±1} x_e` across a dual path, `b` when crossing left to right.
    pub fn flux_string(g: &FiniteGroup, b: usize, path: &DualPath) -> MonomialOperator {
        let mut op = MonomialOperator::identity();
        for s in &path.steps {
            let f = op.factors.entry(s.edge).or_insert_with(|| EdgeFactor::identity(g));
            let k = if s.left_to_right { b } else { g.inv(b) };
            f.shift = g.mul(k, f.shift);
        }
        op
    }

    pub fn support(&self) -> Vec<usize> {
        self.factors.keys().copied().collect()
    }

    /// `self · rhs`, with `rhs` acting first.
    pub fn compose(&self, g: &FiniteGroup, rhs: &MonomialOperator) -> MonomialOperator {
        let mut factors = rhs.factors.clone();
        for (&e, a) in &self.factors {
            let b = factors.entry(e).or_insert_with(|| EdgeFactor::identity(g));
            let phase = (0..g.order())
                .map(|x| b.phase[x] * a.phase[g.mul(b.shift, x)])
                .collect();
            *b = EdgeFactor {
                shift: g.mul(a.shift, b.shift),
                phase,
            };
        }
        MonomialOperator {
            factors,
            scalar: self.scalar * rhs.scalar,
        }
    }

    pub fn power(&self, g: &FiniteGroup, k: u32) -> MonomialOperator {
        (0..k).fold(MonomialOperator::identity(), |acc, _| self.compose(g, &acc))
    }

    /// Applies the operator to a basis configuration in place and returns the coefficient.
    pub fn apply(&self, g: &FiniteGroup, x: &mut [u8]) -> Complex64 {
        let mut c = self.scalar;
        for (&e, f) in &self.factors {
            let v = x[e] as usize;
            c *= f.phase[v];
            x[e] = g.mul(f.shift, v) as u8;
        }
        c
    }

    /// Frobenius norm of `[self, term]` on the support of `term`. Factors
    /// outside that support commute with the term and drop out.
    pub fn commutator_norm(&self, g: &FiniteGroup, term: &TermOp) -> f64 {
        let support = term.support();
        if !support.iter().any(|e| self.factors.contains_key(e)) {
            return 0.0;
        }
        let pos = |e: usize| support.iter().position(|&s| s == e).unwrap();
        let local_term = term.relabel(&pos);
        let local: Vec<(usize, &EdgeFactor)> = support
            .iter()
            .enumerate()
            .filter_map(|(i, e)| self.factors.get(e).map(|f| (i, f)))
            .collect();
        let apply = |x: &mut [u8]| -> Complex64 {
            let mut c = Complex64::new(1.0, 0.0);
            for &(i, f) in &local {
                let v = x[i] as usize;
                c *= f.phase[v];
                x[i] = g.mul(f.shift, v) as u8;
            }
            c
        };
        let n = g.order();
        let states = n.pow(support.len() as u32);
        let mut x = vec![0u8; support.len()];
        let mut total = 0.0;
        for code in 0..states {
            let mut rest = code;
            for v in x.iter_mut() {
                *v = (rest % n) as u8;
                rest /= n;
            }
            let mut out: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
            // term · W
            let mut y = x.clone();
            let c = apply(&mut y);
            local_term.for_each_image(g, &mut y, &mut |z, w| {
                *out.entry(z.to_vec()).or_default() += c * w;
            });
            // W · term
            let mut y = x.clone();
            local_term.for_each_image(g, &mut y, &mut |z, w| {
                let mut z = z.to_vec();
                let c = apply(&mut z);
                *out.entry(z).or_default() -= c * w;
            });
            total += out.values().map(|v| v.norm_sqr()).sum::<f64>();
        }
        total.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::character_table;

    #[test]
    fn compose_matches_sequential_application() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let t = character_table(&g).unwrap();
        let mut a = MonomialOperator::identity();
        a.factors.insert(0, EdgeFactor { shift: 1, phase: (0..3).map(|x| t.chi(1, x)).collect() });
        let mut b = MonomialOperator::identity();
        b.factors.insert(0, EdgeFactor { shift: 2, phase: (0..3).map(|x| t.chi(2, x)).collect() });
        b.factors.insert(1, EdgeFactor { shift: 1, phase: vec![Complex64::new(1.0, 0.0); 3] });
        let ab = a.compose(&g, &b);
        for x0 in 0..3u8 {
            for x1 in 0..3u8 {
                let mut x = vec![x0, x1];
                let c1 = b.apply(&g, &mut x);
                let c2 = a.apply(&g, &mut x);
                let mut y = vec![x0, x1];
                let c = ab.apply(&g, &mut y);
                assert_eq!(x, y);
                assert!((c - c1 * c2).norm() < 1e-12);
            }
        }
    }
}
