use num_complex::Complex64;
use serde::Serialize;

use super::anyons::{classify_anyons, clean};
use super::boundary::boundary_excitations;
use crate::character::{character_table, subgroup_character_table, CharacterTable};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};

const MODULAR_TOLERANCE: f64 = 1e-9;

/// Modular data of D(G) for abelian `G`. Anyon `i` is the pair
/// `(flux[i], charge[i])`, in the same order as [`classify_anyons`].
#[derive(Debug, Clone)]
pub struct AbelianData {
    pub flux: Vec<usize>,
    pub charge: Vec<usize>,
    /// `S[(g,χ),(g',χ')] = conj(χ(g') χ'(g)) / |G|`
    pub s: Vec<Vec<Complex64>>,
    /// `θ(g,χ) = χ(g)`
    pub twist: Vec<Complex64>,
    /// `fusion[a][b]`: the unique fusion product.
    pub fusion: Vec<Vec<usize>>,
    table: CharacterTable,
    index: Vec<Vec<usize>>,
}

/// Fate of a bulk anyon brought to a boundary `K`.
#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    pub anyon: usize,
    pub condensed: bool,
    /// Key of the boundary excitation it turns into.
    pub boundary_label: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModularRecord {
    pub s_real: Vec<Vec<f64>>,
    pub s_imag: Vec<Vec<f64>>,
    pub twist: Vec<[f64; 2]>,
    pub fusion: Vec<Vec<usize>>,
}

pub fn abelian_data(g: &FiniteGroup) -> Result<AbelianData> {
    if !g.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let model = classify_anyons(g)?;
    let table = character_table(g)?;
    let n = g.order();
    let flux: Vec<usize> = model.anyons().iter().map(|a| a.representative).collect();
    let charge: Vec<usize> = model.anyons().iter().map(|a| a.irrep).collect();
    let mut index = vec![vec![0usize; n]; n];
    for (i, (&f, &c)) in flux.iter().zip(&charge).enumerate() {
        index[f][c] = i;
    }
    let product = character_products(g, &table);
    let len = flux.len();
    let mut s = vec![vec![Complex64::new(0.0, 0.0); len]; len];
    let mut fusion = vec![vec![0usize; len]; len];
    for a in 0..len {
        for b in 0..len {
            let v = table.chi(charge[a], flux[b]) * table.chi(charge[b], flux[a]);
            s[a][b] = v.conj() / n as f64;
            fusion[a][b] = index[g.mul(flux[a], flux[b])][product[charge[a]][charge[b]]];
        }
    }
    let twist = (0..len).map(|a| table.chi(charge[a], flux[a])).collect();
    let data = AbelianData {
        flux,
        charge,
        s,
        twist,
        fusion,
        table,
        index,
    };
    data.check()?;
    Ok(data)
}

fn character_products(g: &FiniteGroup, table: &CharacterTable) -> Vec<Vec<usize>> {
    let r = table.num_irreps();
    let mut out = vec![vec![0usize; r]; r];
    for a in 0..r {
        for b in 0..r {
            out[a][b] = (0..r)
                .find(|&c| {
                    g.elements().all(|x| {
                        (table.chi(a, x) * table.chi(b, x) - table.chi(c, x)).norm() < MODULAR_TOLERANCE
                    })
                })
                .expect("characters of an abelian group are closed under products");
        }
    }
    out
}

impl AbelianData {
    pub fn len(&self) -> usize {
        self.flux.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flux.is_empty()
    }

    /// Index of anyon `(flux, charge)`.
    pub fn anyon(&self, flux: usize, charge: usize) -> usize {
        self.index[flux][charge]
    }

    /// Antiparticle `(g^{-1}, χ̄)`.
    pub fn dual(&self, a: usize) -> usize {
        (0..self.len())
            .find(|&b| self.fusion[a][b] == 0)
            .expect("every abelian anyon has an inverse")
    }

    pub fn character(&self) -> &CharacterTable {
        &self.table
    }

    /// S symmetric and unitary, S² equal to charge conjugation.
    pub fn check(&self) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                if (self.s[a][b] - self.s[b][a]).norm() > MODULAR_TOLERANCE {
                    return Err(Error::invariant("S matrix is not symmetric"));
                }
                let u: Complex64 = (0..n).map(|c| self.s[a][c] * self.s[b][c].conj()).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                if (u - Complex64::new(expect, 0.0)).norm() > MODULAR_TOLERANCE {
                    return Err(Error::invariant("S matrix is not unitary"));
                }
                let sq: Complex64 = (0..n).map(|c| self.s[a][c] * self.s[c][b]).sum();
                let expect = if b == self.dual(a) { 1.0 } else { 0.0 };
                if (sq - Complex64::new(expect, 0.0)).norm() > MODULAR_TOLERANCE {
                    return Err(Error::invariant("S² is not charge conjugation"));
                }
            }
        }
        Ok(())
    }

    pub fn record(&self) -> ModularRecord {
        let map = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            self.s.iter().map(|row| row.iter().map(|v| clean(f(v))).collect()).collect()
        };
        ModularRecord {
            s_real: map(|v| v.re),
            s_imag: map(|v| v.im),
            twist: self.twist.iter().map(|t| [clean(t.re), clean(t.im)]).collect(),
            fusion: self.fusion.clone(),
        }
    }

    /// Anyon `(g, χ)` condenses on `K` iff `g ∈ K` and `χ|_K` is trivial;
    /// otherwise it becomes the excitation `(gK, χ|_K)`.
    pub fn branching(&self, g: &FiniteGroup, k: &Subgroup) -> Result<Vec<Branch>> {
        let sub = subgroup_character_table(g, k)?;
        let excitations = boundary_excitations(g, k)?;
        let mut out = Vec::with_capacity(self.len());
        for a in 0..self.len() {
            let (flux, charge) = (self.flux[a], self.charge[a]);
            let restricted = (0..sub.num_irreps())
                .find(|&r| {
                    k.elements()
                        .iter()
                        .all(|&x| (sub.chi(r, x) - self.table.chi(charge, x)).norm() < MODULAR_TOLERANCE)
                })
                .ok_or_else(|| Error::invariant("restricted character not found"))?;
            let label = excitations
                .iter()
                .find(|e| e.irrep == restricted && k.contains(g.mul(g.inv(e.representative), flux)))
                .ok_or_else(|| Error::invariant("boundary excitation not found"))?;
            out.push(Branch {
                anyon: a,
                condensed: k.contains(flux) && restricted == 0,
                boundary_label: label.key(),
            });
        }
        Ok(out)
    }
}
