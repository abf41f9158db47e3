//! Character tables via simultaneous diagonalization of the class-sum
//! multiplication matrices (Burnside's method, floating point).
//!
//! Irreps are ordered by dimension, then by the character vector compared
//! entrywise on (phase in [0, 2π), descending modulus). The trivial
//! character always comes first.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup, MAX_TABLE_ORDER};

/// Tolerance for the orthogonality relations and integrality of dimensions.
pub const TABLE_TOLERANCE: f64 = 1e-9;
/// Rounding tolerance for multiplicities recovered from inner products.
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CharacterTable {
    order: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<Option<usize>>,
    values: Vec<Vec<Complex64>>,
    dims: Vec<usize>,
}

impl CharacterTable {
    pub fn group_order(&self) -> usize {
        self.order
    }
    pub fn num_irreps(&self) -> usize {
        self.dims.len()
    }
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn dim(&self, irrep: usize) -> usize {
        self.dims[irrep]
    }
    /// Class member lists, in parent-group element indices.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }
    pub fn class_size(&self, class: usize) -> usize {
        self.classes[class].len()
    }
    pub fn representative(&self, class: usize) -> usize {
        self.classes[class][0]
    }
    /// Class index of a parent element, `None` if it is outside the group.
    pub fn class_of(&self, element: usize) -> Option<usize> {
        self.class_of.get(element).copied().flatten()
    }
    pub fn value(&self, irrep: usize, class: usize) -> Complex64 {
        self.values[irrep][class]
    }
    pub fn row(&self, irrep: usize) -> &[Complex64] {
        &self.values[irrep]
    }
    /// χ_irrep(element). Panics if the element is not in the group.
    pub fn chi(&self, irrep: usize, element: usize) -> Complex64 {
        let c = self.class_of(element).expect("element outside the character table's group");
        self.values[irrep][c]
    }

    /// ⟨χ, f⟩ for a class function given by its value on each class.
    pub fn inner_product(&self, irrep: usize, class_function: &[Complex64]) -> Complex64 {
        let s: Complex64 = (0..self.num_classes())
            .map(|c| class_function[c] * self.values[irrep][c].conj() * self.class_size(c) as f64)
            .sum();
        s / self.order as f64
    }

    /// Decomposes a character (values per class) into integer multiplicities.
    pub fn decompose(&self, class_function: &[Complex64]) -> Result<Vec<u32>> {
        (0..self.num_irreps())
            .map(|i| {
                let m = self.inner_product(i, class_function);
                let r = m.re.round();
                if (m - Complex64::new(r, 0.0)).norm() > MULTIPLICITY_TOLERANCE || r < -0.5 {
                    Err(Error::invariant(format!(
                        "non-integral multiplicity {m} for irrep {i}"
                    )))
                } else {
                    Ok(r as u32)
                }
            })
            .collect()
    }

    /// Checks row and column orthogonality and the dimension sum rule.
    pub fn validate(&self) -> Result<()> {
        let r = self.num_irreps();
        if r != self.num_classes() {
            return Err(Error::invariant("table is not square"));
        }
        for a in 0..r {
            for b in 0..r {
                let ip = self.inner_product(a, &self.values[b]);
                let expect = if a == b { 1.0 } else { 0.0 };
                if (ip - Complex64::new(expect, 0.0)).norm() > TABLE_TOLERANCE {
                    return Err(Error::invariant(format!(
                        "row orthogonality fails for irreps {a},{b}: {ip}"
                    )));
                }
            }
        }
        for c in 0..r {
            for d in 0..r {
                let s: Complex64 = (0..r).map(|i| self.values[i][c] * self.values[i][d].conj()).sum();
                let expect = if c == d {
                    self.order as f64 / self.class_size(c) as f64
                } else {
                    0.0
                };
                if (s - Complex64::new(expect, 0.0)).norm() > TABLE_TOLERANCE * self.order as f64 {
                    return Err(Error::invariant(format!(
                        "column orthogonality fails for classes {c},{d}"
                    )));
                }
            }
        }
        let sum: usize = self.dims.iter().map(|d| d * d).sum();
        if sum != self.order {
            return Err(Error::invariant(format!("sum of squared dims {sum} != {}", self.order)));
        }
        Ok(())
    }
}

/// Character table of a whole group.
pub fn character_table(g: &FiniteGroup) -> Result<CharacterTable> {
    let embedding: Vec<usize> = (0..g.order()).collect();
    table_with_embedding(g, &embedding, g.order())
}

/// Character table of a subgroup, indexed by parent elements.
pub fn subgroup_character_table(g: &FiniteGroup, sub: &Subgroup) -> Result<CharacterTable> {
    g.check_parent(sub)?;
    let (h, embedding) = g.subgroup_as_group(sub);
    table_with_embedding(&h, &embedding, g.order())
}

fn table_with_embedding(h: &FiniteGroup, embedding: &[usize], parent_order: usize) -> Result<CharacterTable> {
    let m = h.order();
    if m > MAX_TABLE_ORDER {
        return Err(Error::Budget {
            what: "character table group order",
            size: m as u128,
            limit: MAX_TABLE_ORDER as u128,
        });
    }
    let local_classes: Vec<Vec<usize>> = h.conjugacy_classes().iter().map(|c| c.members.clone()).collect();
    let (dims, values) = if h.is_abelian() {
        abelian_characters(h)
    } else {
        burnside_characters(h, &local_classes)?
    };

    let mut rows: Vec<(usize, Vec<Complex64>)> = dims.into_iter().zip(values).collect();
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            let ka: Vec<(i64, i64)> = a.1.iter().map(|&z| sort_key(z)).collect();
            let kb: Vec<(i64, i64)> = b.1.iter().map(|&z| sort_key(z)).collect();
            ka.cmp(&kb)
        })
    });

    let classes: Vec<Vec<usize>> = local_classes
        .iter()
        .map(|c| {
            let mut v: Vec<usize> = c.iter().map(|&x| embedding[x]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let mut class_of = vec![None; parent_order];
    for (ci, c) in classes.iter().enumerate() {
        for &x in c {
            class_of[x] = Some(ci);
        }
    }
    let table = CharacterTable {
        order: m,
        classes,
        class_of,
        dims: rows.iter().map(|r| r.0).collect(),
        values: rows.into_iter().map(|r| r.1).collect(),
    };
    table.validate()?;
    Ok(table)
}

fn sort_key(z: Complex64) -> (i64, i64) {
    let modulus = z.norm();
    if modulus < 1e-7 {
        return (0, 0);
    }
    let mut arg = z.arg();
    if arg < -1e-9 {
        arg += TAU;
    }
    if arg > TAU - 1e-9 {
        arg = 0.0;
    }
    ((arg * 1e6).round() as i64, -(modulus * 1e6).round() as i64)
}

/// Abelian groups: decompose into cyclic factors by searching for a
/// generating set and solve for all homomorphisms to roots of unity.
fn abelian_characters(h: &FiniteGroup) -> (Vec<usize>, Vec<Vec<Complex64>>) {
    let m = h.order();
    // every character is determined by its values on a generating set,
    // which must be roots of unity of the generator orders
    let gens = h.generating_set();
    let orders: Vec<usize> = gens.iter().map(|&g| h.element_order(g)).collect();
    // express each element as a word in the generators: BFS
    let mut exps: Vec<Option<Vec<usize>>> = vec![None; m];
    exps[0] = Some(vec![0; gens.len()]);
    let mut queue = std::collections::VecDeque::from(vec![0usize]);
    while let Some(x) = queue.pop_front() {
        for (i, &s) in gens.iter().enumerate() {
            let y = h.mul(x, s);
            if exps[y].is_none() {
                let mut e = exps[x].clone().unwrap();
                e[i] += 1;
                exps[y] = Some(e);
                queue.push_back(y);
            }
        }
    }
    let mut values = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        // candidate character: gen i -> exp(2πi choice_i / order_i)
        let chi: Vec<Complex64> = (0..m)
            .map(|x| {
                let e = exps[x].as_ref().unwrap();
                let phase: f64 = e
                    .iter()
                    .zip(&choice)
                    .zip(&orders)
                    .map(|((&k, &c), &o)| (k * c) as f64 / o as f64)
                    .sum();
                Complex64::from_polar(1.0, TAU * phase)
            })
            .collect();
        let hom = (0..m).all(|a| {
            (0..m).all(|b| (chi[h.mul(a, b)] - chi[a] * chi[b]).norm() < 1e-9)
        });
        if hom {
            values.push(chi);
        }
        let mut i = 0;
        loop {
            if i == gens.len() {
                // group elements are their own classes in an abelian group
                let classes = h.conjugacy_classes();
                let rows: Vec<Vec<Complex64>> = values
                    .iter()
                    .map(|chi| classes.iter().map(|c| chi[c.representative]).collect())
                    .collect();
                return (vec![1; rows.len()], rows);
            }
            choice[i] += 1;
            if choice[i] < orders[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn burnside_characters(
    h: &FiniteGroup,
    classes: &[Vec<usize>],
) -> Result<(Vec<usize>, Vec<Vec<Complex64>>)> {
    let m = h.order();
    let r = classes.len();
    let mut class_of = vec![0usize; m];
    for (ci, c) in classes.iter().enumerate() {
        for &x in c {
            class_of[x] = ci;
        }
    }
    // c[j][k][l] = #{x in C_j : x^{-1} z_l in C_k}
    let mut coeff = vec![vec![vec![0f64; r]; r]; r];
    for (l, cl) in classes.iter().enumerate() {
        let z = cl[0];
        for (j, cj) in classes.iter().enumerate() {
            for &x in cj {
                let k = class_of[h.mul(h.inv(x), z)];
                coeff[j][k][l] += 1.0;
            }
        }
    }
    const PRIMES: [f64; 16] = [2., 3., 5., 7., 11., 13., 17., 19., 23., 29., 31., 37., 41., 43., 47., 53.];
    for attempt in 0..8 {
        let weights: Vec<f64> = (0..r)
            .map(|j| {
                let p = PRIMES[(j + attempt * 3) % PRIMES.len()] + attempt as f64;
                p.sqrt().fract() + 0.5
            })
            .collect();
        let mut mat = DMatrix::<f64>::zeros(r, r);
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    mat[(k, l)] += weights[j] * coeff[j][k][l];
                }
            }
        }
        let eig = mat.clone().complex_eigenvalues();
        let scale = 1.0 + eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let distinct = (0..r).all(|a| (0..a).all(|b| (eig[a] - eig[b]).norm() > 1e-6 * scale));
        if !distinct {
            continue;
        }
        let mut dims = Vec::with_capacity(r);
        let mut rows = Vec::with_capacity(r);
        for &lambda in eig.iter() {
            let omega = null_vector(&mat, lambda);
            let omega: Vec<Complex64> = omega.iter().map(|&w| w / omega[0]).collect();
            let norm: f64 = (0..r).map(|c| omega[c].norm_sqr() / classes[c].len() as f64).sum();
            let d = (m as f64 / norm).sqrt();
            let dr = d.round();
            if (d - dr).abs() > TABLE_TOLERANCE || dr < 1.0 {
                return Err(Error::invariant(format!("non-integral irrep dimension {d}")));
            }
            dims.push(dr as usize);
            rows.push(
                (0..r)
                    .map(|c| omega[c] * dr / classes[c].len() as f64)
                    .collect(),
            );
        }
        return Ok((dims, rows));
    }
    Err(Error::invariant("could not separate class-sum eigenvalues"))
}

/// Null vector of `mat - λ I` by Gaussian elimination with full pivoting.
fn null_vector(mat: &DMatrix<f64>, lambda: Complex64) -> Vec<Complex64> {
    let r = mat.nrows();
    let mut a: Vec<Vec<Complex64>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| Complex64::new(mat[(i, j)], 0.0) - if i == j { lambda } else { Complex64::new(0.0, 0.0) })
                .collect()
        })
        .collect();
    let mut cols: Vec<usize> = (0..r).collect();
    for k in 0..r.saturating_sub(1) {
        let (mut pi, mut pj, mut best) = (k, k, -1.0);
        for i in k..r {
            for j in k..r {
                let v = a[i][j].norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        cols.swap(k, pj);
        for i in k + 1..r {
            let f = a[i][k] / a[k][k];
            if f.norm() == 0.0 {
                continue;
            }
            for j in k..r {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
    }
    let mut y = vec![Complex64::new(0.0, 0.0); r];
    y[r - 1] = Complex64::new(1.0, 0.0);
    for i in (0..r.saturating_sub(1)).rev() {
        let s: Complex64 = (i + 1..r).map(|j| a[i][j] * y[j]).sum();
        y[i] = -s / a[i][i];
    }
    let mut v = vec![Complex64::new(0.0, 0.0); r];
    for (i, &c) in cols.iter().enumerate() {
        v[c] = y[i];
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{parse_subgroup, GroupSpec};
    use std::str::FromStr;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-9
    }

    #[test]
    fn z2_rows() {
        let t = character_table(&FiniteGroup::cyclic(2).unwrap()).unwrap();
        assert!(close(t.value(0, 1), Complex64::new(1.0, 0.0)));
        assert!(close(t.value(1, 0), Complex64::new(1.0, 0.0)));
        assert!(close(t.value(1, 1), Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn z3_linear_characters() {
        let t = character_table(&FiniteGroup::cyclic(3).unwrap()).unwrap();
        let w = Complex64::from_polar(1.0, TAU / 3.0);
        assert_eq!(t.dims(), &[1, 1, 1]);
        assert!(close(t.chi(1, 1), w));
        assert!(close(t.chi(2, 1), w * w));
        for i in 0..3 {
            for x in 0..3 {
                let z = t.chi(i, x);
                assert!(close(z.powu(3), Complex64::new(1.0, 0.0)));
            }
        }
    }

    #[test]
    fn s3_dims() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let t = character_table(&g).unwrap();
        assert_eq!(t.dims(), &[1, 1, 2]);
        assert_eq!(t.dims().iter().map(|d| d * d).sum::<usize>(), 6);
        // sign character is -1 on transpositions
        let tr = g.element_by_name("(12)").unwrap();
        assert!(close(t.chi(1, tr), Complex64::new(-1.0, 0.0)));
        assert!(close(t.chi(2, tr), Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn nonabelian_tables_validate() {
        for spec in ["symmetric:4", "dihedral:4", "dihedral:5", "quaternion8", "product:symmetric:3,cyclic:2", "product:symmetric:4,cyclic:2"] {
            let g = GroupSpec::from_str(spec).unwrap().build().unwrap();
            let t = character_table(&g).unwrap();
            assert_eq!(t.num_irreps(), g.conjugacy_classes().len(), "{spec}");
            assert_eq!(t.dims()[0], 1);
            assert!(t.row(0).iter().all(|z| close(*z, Complex64::new(1.0, 0.0))));
        }
        let s4 = character_table(&FiniteGroup::symmetric(4).unwrap()).unwrap();
        assert_eq!(s4.dims(), &[1, 1, 2, 3, 3]);
    }

    #[test]
    fn deterministic() {
        let g = FiniteGroup::dihedral(4).unwrap();
        let a = character_table(&g).unwrap();
        let b = character_table(&g).unwrap();
        assert_eq!(format!("{:?}", a.values), format!("{:?}", b.values));
    }

    #[test]
    fn subgroup_table_uses_parent_indices() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let k = parse_subgroup(&g, "cyclic:(123)").unwrap();
        let t = subgroup_character_table(&g, &k).unwrap();
        assert_eq!(t.num_irreps(), 3);
        let r = g.element_by_name("(123)").unwrap();
        assert!(t.class_of(r).is_some());
        assert!(t.class_of(g.element_by_name("(12)").unwrap()).is_none());
    }

    #[test]
    fn permutation_character_multiplicities_are_integral() {
        // S3 acting on the three points: triv + standard
        let g = FiniteGroup::symmetric(3).unwrap();
        let t = character_table(&g).unwrap();
        let fixed: Vec<Complex64> = (0..t.num_classes())
            .map(|c| {
                let x = t.representative(c);
                let k = parse_subgroup(&g, "e,(12)").unwrap();
                let n = g.left_cosets(&k).iter().filter(|coset| {
                    let y = g.mul(x, coset[0]);
                    coset.contains(&y) || k.elements().iter().any(|&h| g.mul(coset[0], h) == y)
                }).count();
                Complex64::new(n as f64, 0.0)
            })
            .collect();
        assert_eq!(t.decompose(&fixed).unwrap(), vec![1, 0, 1]);
    }
}
