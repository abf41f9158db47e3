//! Finite groups given by Cayley tables, with the derived structure the rest
//! of the crate relies on: subgroups, conjugacy classes, centralizers,
//! double cosets and automorphisms.
//!
//! Element `0` is always the identity. Canonical representatives are the
//! smallest element index throughout.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest explicit Cayley table accepted (full associativity check is n³).
pub const MAX_TABLE_ORDER: usize = 48;
/// Largest group for exhaustive subgroup enumeration.
pub const MAX_ENUMERATION_ORDER: usize = 24;

#[derive(Debug)]
pub struct FiniteGroup {
    label: String,
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    names: Vec<String>,
    fingerprint: u64,
    classes: OnceLock<Vec<ConjugacyClass>>,
}

impl Clone for FiniteGroup {
    fn clone(&self) -> Self {
        FiniteGroup {
            label: self.label.clone(),
            order: self.order,
            table: self.table.clone(),
            inverse: self.inverse.clone(),
            names: self.names.clone(),
            fingerprint: self.fingerprint,
            classes: OnceLock::new(),
        }
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

/// Explicit Cayley-table input, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CayleyTable {
    pub order: usize,
    /// Row-major `order × order` product indices: `table[a*order + b] = a·b`.
    pub table: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl FiniteGroup {
    /// Validates a table whose identity is already element 0.
    fn from_validated(label: String, order: usize, table: Vec<usize>, names: Vec<String>) -> Self {
        let mut inverse = vec![0; order];
        for a in 0..order {
            inverse[a] = (0..order).find(|&b| table[a * order + b] == 0).unwrap();
        }
        let mut h = DefaultHasher::new();
        order.hash(&mut h);
        table.hash(&mut h);
        FiniteGroup {
            label,
            order,
            table,
            inverse,
            names,
            fingerprint: h.finish(),
            classes: OnceLock::new(),
        }
    }

    /// Builds a group from an explicit Cayley table.
    ///
    /// Elements are reordered so that the identity comes first; the remaining
    /// elements keep their input order.
    pub fn from_table(input: &CayleyTable) -> Result<Self> {
        let n = input.order;
        if n == 0 {
            return Err(Error::InvalidGroup("order must be positive".into()));
        }
        if n > MAX_TABLE_ORDER {
            return Err(Error::Budget {
                what: "explicit Cayley table order",
                size: n as u128,
                limit: MAX_TABLE_ORDER as u128,
            });
        }
        if input.table.len() != n * n {
            return Err(Error::InvalidGroup(format!(
                "table has {} entries, expected {}",
                input.table.len(),
                n * n
            )));
        }
        if let Some(&bad) = input.table.iter().find(|&&x| x >= n) {
            return Err(Error::InvalidGroup(format!("entry {bad} out of range")));
        }
        let t = |a: usize, b: usize| input.table[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| t(e, x) == x && t(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            let has_inv = (0..n).any(|b| t(a, b) == identity && t(b, a) == identity);
            if !has_inv {
                return Err(Error::InvalidGroup(format!("element {a} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = t(a, b);
                for c in 0..n {
                    if t(ab, c) != t(a, t(b, c)) {
                        return Err(Error::NonAssociative { a, b, c });
                    }
                }
            }
        }
        // identity first, rest in input order
        let mut order_map: Vec<usize> = vec![identity];
        order_map.extend((0..n).filter(|&x| x != identity));
        let mut new_index = vec![0; n];
        for (new, &old) in order_map.iter().enumerate() {
            new_index[old] = new;
        }
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = new_index[t(order_map[a], order_map[b])];
            }
        }
        let names = match &input.names {
            Some(names) => {
                if names.len() != n {
                    return Err(Error::InvalidGroup("names length differs from order".into()));
                }
                let set: BTreeSet<&String> = names.iter().collect();
                if set.len() != n {
                    return Err(Error::InvalidGroup("element names are not distinct".into()));
                }
                order_map.iter().map(|&old| names[old].clone()).collect()
            }
            None => order_map.iter().map(|old| format!("g{old}")).collect(),
        };
        Ok(Self::from_validated(format!("table:{n}"), n, table, names))
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        spec.build()
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group needs n >= 1".into()));
        }
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let names = (0..n).map(|k| k.to_string()).collect();
        Ok(Self::from_validated(format!("cyclic:{n}"), n, table, names))
    }

    /// Dihedral group of order `2n`; element `f*n + k` is `r^k s^f`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 1".into()));
        }
        let m = 2 * n;
        let mut table = vec![0; m * m];
        for a in 0..m {
            let (fa, ka) = (a / n, a % n);
            for b in 0..m {
                let (fb, kb) = (b / n, b % n);
                let k = if fa == 0 { (ka + kb) % n } else { (ka + n - kb) % n };
                table[a * m + b] = ((fa + fb) % 2) * n + k;
            }
        }
        let rot = |k: usize| match k {
            0 => String::new(),
            1 => "r".to_string(),
            _ => format!("r^{k}"),
        };
        let names = (0..m)
            .map(|a| {
                let (f, k) = (a / n, a % n);
                match (f, k) {
                    (0, 0) => "e".to_string(),
                    (0, _) => rot(k),
                    _ => format!("{}s", rot(k)),
                }
            })
            .collect();
        Ok(Self::from_validated(format!("dihedral:{n}"), m, table, names))
    }

    /// Symmetric group on `n <= 4` points; elements in lexicographic
    /// one-line order, named in cycle notation.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 4 {
            return Err(Error::InvalidGroup("symmetric group supports 1 <= n <= 4".into()));
        }
        let mut perms: Vec<Vec<usize>> = Vec::new();
        permutations(&mut (0..n).collect(), 0, &mut perms);
        perms.sort();
        let index: HashMap<Vec<usize>, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let m = perms.len();
        let mut table = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                // (ab)(i) = a(b(i))
                let prod: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
                table[a * m + b] = index[&prod];
            }
        }
        let names = perms.iter().map(|p| cycle_notation(p)).collect();
        Ok(Self::from_validated(format!("symmetric:{n}"), m, table, names))
    }

    pub fn quaternion8() -> Result<Self> {
        // index = 2*unit + sign, unit in {1,i,j,k}, sign 0 => +, 1 => -
        let unit_mul = |u: usize, v: usize| -> (usize, usize) {
            // returns (sign, unit)
            match (u, v) {
                (0, x) | (x, 0) => (0, x),
                (a, b) if a == b => (1, 0),
                (1, 2) => (0, 3),
                (2, 3) => (0, 1),
                (3, 1) => (0, 2),
                (2, 1) => (1, 3),
                (3, 2) => (1, 1),
                (1, 3) => (1, 2),
                _ => unreachable!(),
            }
        };
        let mut table = vec![0; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (s, u) = unit_mul(a / 2, b / 2);
                let sign = (a % 2 + b % 2 + s) % 2;
                table[a * 8 + b] = 2 * u + sign;
            }
        }
        let units = ["1", "i", "j", "k"];
        let names = (0..8)
            .map(|a| {
                if a % 2 == 0 {
                    units[a / 2].to_string()
                } else {
                    format!("-{}", units[a / 2])
                }
            })
            .collect();
        Ok(Self::from_validated("quaternion8".into(), 8, table, names))
    }

    /// Direct product; element index is mixed-radix with the first factor most significant.
    pub fn direct_product(factors: &[FiniteGroup]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("empty direct product".into()));
        }
        let order: usize = factors.iter().map(|f| f.order).product();
        if order > 1 << 16 {
            return Err(Error::Budget {
                what: "direct product order",
                size: order as u128,
                limit: 1 << 16,
            });
        }
        let decompose = |mut x: usize| -> Vec<usize> {
            let mut parts = vec![0; factors.len()];
            for (i, f) in factors.iter().enumerate().rev() {
                parts[i] = x % f.order;
                x /= f.order;
            }
            parts
        };
        let compose = |parts: &[usize]| -> usize {
            parts
                .iter()
                .zip(factors)
                .fold(0, |acc, (&p, f)| acc * f.order + p)
        };
        let mut table = vec![0; order * order];
        for a in 0..order {
            let pa = decompose(a);
            for b in 0..order {
                let pb = decompose(b);
                let prod: Vec<usize> = factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| f.mul(pa[i], pb[i]))
                    .collect();
                table[a * order + b] = compose(&prod);
            }
        }
        let names = (0..order)
            .map(|a| {
                let parts = decompose(a);
                let inner: Vec<&str> = parts
                    .iter()
                    .zip(factors)
                    .map(|(&p, f)| f.name(p))
                    .collect();
                format!("({})", inner.join(","))
            })
            .collect();
        let label = format!(
            "product:{}",
            factors.iter().map(|f| f.label.as_str()).collect::<Vec<_>>().join(",")
        );
        Ok(Self::from_validated(label, order, table, names))
    }

    /// Builds the subgroup as a standalone group. Returns the group and the
    /// embedding `local index -> parent index`.
    pub fn subgroup_as_group(&self, sub: &Subgroup) -> (FiniteGroup, Vec<usize>) {
        let elems = sub.elements().to_vec();
        let local: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let m = elems.len();
        let mut table = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                table[a * m + b] = local[&self.mul(elems[a], elems[b])];
            }
        }
        let names = elems.iter().map(|&x| self.names[x].clone()).collect();
        let g = Self::from_validated(format!("{}<sub {}>", self.label, m), m, table, names);
        (g, elems)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn identity(&self) -> usize {
        0
    }
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }
    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }
    /// `g x g^{-1}`
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inverse[g])
    }
    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn table(&self) -> &[usize] {
        &self.table
    }
    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Looks up an element by name; `e` always denotes the identity and
    /// `#k` the element with index `k`.
    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        let name = name.trim();
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Some(i);
        }
        if name == "e" || name == "1" && self.names.iter().all(|n| n != "1") {
            return Some(0);
        }
        if let Some(idx) = name.strip_prefix('#') {
            return idx.parse().ok().filter(|&i: &usize| i < self.order);
        }
        None
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self, vec![0])
    }

    pub fn full_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self, (0..self.order).collect())
    }

    /// Subgroup generated by the given elements.
    pub fn generated(&self, gens: &[usize]) -> Subgroup {
        let mut mask = vec![false; self.order];
        mask[0] = true;
        let mut elems = vec![0];
        let mut queue: VecDeque<usize> = VecDeque::from(vec![0]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !mask[y] {
                    mask[y] = true;
                    elems.push(y);
                    queue.push_back(y);
                }
            }
        }
        elems.sort_unstable();
        Subgroup::from_sorted(self, elems)
    }

    /// Validates an arbitrary element set as a subgroup.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Subgroup> {
        let mut elems: Vec<usize> = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if elems.iter().any(|&x| x >= self.order) {
            return Err(Error::NotASubgroup("element index out of range".into()));
        }
        if elems.first() != Some(&0) {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        let mut mask = vec![false; self.order];
        for &x in &elems {
            mask[x] = true;
        }
        for &a in &elems {
            if !mask[self.inv(a)] {
                return Err(Error::NotASubgroup(format!(
                    "inverse of {} missing",
                    self.name(a)
                )));
            }
            for &b in &elems {
                if !mask[self.mul(a, b)] {
                    return Err(Error::NotASubgroup(format!(
                        "not closed: {}·{}",
                        self.name(a),
                        self.name(b)
                    )));
                }
            }
        }
        Ok(Subgroup::from_sorted(self, elems))
    }

    /// Conjugacy classes ordered by representative (smallest member).
    pub fn conjugacy_classes(&self) -> &[ConjugacyClass] {
        self.classes.get_or_init(|| {
            let n = self.order;
            let mut seen = vec![false; n];
            let mut classes = Vec::new();
            for r in 0..n {
                if seen[r] {
                    continue;
                }
                let mut members: Vec<usize> = (0..n).map(|g| self.conj(g, r)).collect();
                members.sort_unstable();
                members.dedup();
                for &m in &members {
                    seen[m] = true;
                }
                let centralizer: Vec<usize> =
                    (0..n).filter(|&g| self.mul(g, r) == self.mul(r, g)).collect();
                classes.push(ConjugacyClass {
                    representative: r,
                    members,
                    centralizer: Subgroup::from_sorted(self, centralizer),
                });
            }
            classes
        })
    }

    /// Index of the conjugacy class containing `x`.
    pub fn class_of(&self, x: usize) -> usize {
        self.conjugacy_classes()
            .iter()
            .position(|c| c.members.binary_search(&x).is_ok())
            .expect("every element lies in a class")
    }

    /// `g K g^{-1}`
    pub fn conjugate_subgroup(&self, g: usize, k: &Subgroup) -> Subgroup {
        let mut elems: Vec<usize> = k.elements().iter().map(|&x| self.conj(g, x)).collect();
        elems.sort_unstable();
        Subgroup::from_sorted(self, elems)
    }

    pub fn intersection(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let elems = a.elements().iter().copied().filter(|&x| b.contains(x)).collect();
        Subgroup::from_sorted(self, elems)
    }

    /// Lexicographically smallest conjugate of `k`; the canonical key of its class.
    pub fn canonical_conjugate(&self, k: &Subgroup) -> Subgroup {
        (0..self.order)
            .map(|g| self.conjugate_subgroup(g, k))
            .min_by(|a, b| a.elements().cmp(b.elements()))
            .unwrap()
    }

    /// Double cosets `K1 \ G / K2`, each with its smallest element as
    /// representative and stabilizer `K1 ∩ r K2 r^{-1}`.
    pub fn double_cosets(&self, k1: &Subgroup, k2: &Subgroup) -> Result<Vec<DoubleCoset>> {
        self.check_parent(k1)?;
        self.check_parent(k2)?;
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for r in 0..self.order {
            if seen[r] {
                continue;
            }
            let mut members: Vec<usize> = k1
                .elements()
                .iter()
                .flat_map(|&a| k2.elements().iter().map(move |&b| (a, b)))
                .map(|(a, b)| self.mul(self.mul(a, r), b))
                .collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                seen[m] = true;
            }
            let conj_k2 = self.conjugate_subgroup(r, k2);
            let stabilizer = self.intersection(k1, &conj_k2);
            out.push(DoubleCoset {
                representative: r,
                members,
                stabilizer,
            });
        }
        Ok(out)
    }

    /// Left cosets `xK`, as sorted member lists ordered by smallest member.
    pub fn left_cosets(&self, k: &Subgroup) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for x in 0..self.order {
            if seen[x] {
                continue;
            }
            let mut c: Vec<usize> = k.elements().iter().map(|&h| self.mul(x, h)).collect();
            c.sort_unstable();
            for &m in &c {
                seen[m] = true;
            }
            out.push(c);
        }
        out
    }

    pub(crate) fn check_parent(&self, k: &Subgroup) -> Result<()> {
        if k.parent != self.fingerprint || k.mask.len() != self.order {
            Err(Error::MismatchedParent)
        } else {
            Ok(())
        }
    }

    /// All subgroups, grouped into conjugacy classes.
    pub fn enumerate_subgroups(&self) -> Result<SubgroupLattice> {
        if self.order > MAX_ENUMERATION_ORDER {
            return Err(Error::Budget {
                what: "group order for exhaustive subgroup enumeration",
                size: self.order as u128,
                limit: MAX_ENUMERATION_ORDER as u128,
            });
        }
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier = vec![vec![0usize]];
        found.insert(vec![0]);
        while let Some(h) = frontier.pop() {
            let mask: Vec<bool> = {
                let mut m = vec![false; self.order];
                h.iter().for_each(|&x| m[x] = true);
                m
            };
            for g in 0..self.order {
                if mask[g] {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g);
                let s = self.generated(&gens);
                if found.insert(s.elements.clone()) {
                    frontier.push(s.elements.clone());
                }
            }
        }
        Ok(self.group_into_classes(found.into_iter().map(|e| Subgroup::from_sorted(self, e))))
    }

    /// Subgroups generated by each of the given generator sets, closed under
    /// conjugation. Used for groups beyond the enumeration budget.
    pub fn subgroups_from_generators(&self, generator_sets: &[Vec<usize>]) -> SubgroupLattice {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        for gens in generator_sets {
            let s = self.generated(gens);
            for g in 0..self.order {
                found.insert(self.conjugate_subgroup(g, &s).elements);
            }
        }
        self.group_into_classes(found.into_iter().map(|e| Subgroup::from_sorted(self, e)))
    }

    fn group_into_classes(&self, subs: impl Iterator<Item = Subgroup>) -> SubgroupLattice {
        let mut by_key: HashMap<Vec<usize>, Vec<Subgroup>> = HashMap::new();
        for s in subs {
            let key = self.canonical_conjugate(&s).elements;
            by_key.entry(key).or_default().push(s);
        }
        let mut classes: Vec<SubgroupClass> = by_key
            .into_iter()
            .map(|(key, mut members)| {
                members.sort_by(|a, b| a.elements.cmp(&b.elements));
                members.dedup_by(|a, b| a.elements == b.elements);
                SubgroupClass {
                    key: Subgroup::from_sorted(self, key),
                    members,
                }
            })
            .collect();
        classes.sort_by(|a, b| {
            (a.key.order(), &a.key.elements).cmp(&(b.key.order(), &b.key.elements))
        });
        SubgroupLattice { classes }
    }

    /// Greedy generating set: elements in index order, kept when they enlarge the span.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = self.trivial_subgroup();
        for g in 1..self.order {
            if !span.contains(g) {
                gens.push(g);
                span = self.generated(&gens);
                if span.order() == self.order {
                    break;
                }
            }
        }
        gens
    }

    /// Every automorphism, as element permutations `phi[x]`. Sorted.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let gens = self.generating_set();
        let orders: Vec<usize> = gens.iter().map(|&g| self.element_order(g)).collect();
        let candidates: Vec<Vec<usize>> = orders
            .iter()
            .map(|&o| (0..self.order).filter(|&x| self.element_order(x) == o).collect())
            .collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; gens.len()];
        loop {
            let images: Vec<usize> = choice.iter().zip(&candidates).map(|(&c, v)| v[c]).collect();
            if let Some(phi) = self.extend_homomorphism(&gens, &images) {
                out.push(phi);
            }
            // odometer
            let mut i = 0;
            loop {
                if i == gens.len() {
                    out.sort();
                    return out;
                }
                choice[i] += 1;
                if choice[i] < candidates[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn extend_homomorphism(&self, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let n = self.order;
        let mut phi = vec![usize::MAX; n];
        phi[0] = 0;
        let mut queue = VecDeque::from(vec![0usize]);
        while let Some(x) = queue.pop_front() {
            for (&s, &t) in gens.iter().zip(images) {
                let y = self.mul(x, s);
                let img = self.mul(phi[x], t);
                if phi[y] == usize::MAX {
                    phi[y] = img;
                    queue.push_back(y);
                } else if phi[y] != img {
                    return None;
                }
            }
        }
        let mut hit = vec![false; n];
        for &p in &phi {
            if p == usize::MAX || hit[p] {
                return None;
            }
            hit[p] = true;
        }
        for a in 0..n {
            for b in 0..n {
                if phi[self.mul(a, b)] != self.mul(phi[a], phi[b]) {
                    return None;
                }
            }
        }
        Some(phi)
    }

    /// Validates an element permutation as an automorphism.
    pub fn check_automorphism(&self, phi: &[usize]) -> Result<()> {
        let n = self.order;
        if phi.len() != n {
            return Err(Error::NotAutomorphism("wrong length".into()));
        }
        let mut hit = vec![false; n];
        for &p in phi {
            if p >= n || hit[p] {
                return Err(Error::NotAutomorphism("not a bijection".into()));
            }
            hit[p] = true;
        }
        for a in 0..n {
            for b in 0..n {
                if phi[self.mul(a, b)] != self.mul(phi[a], phi[b]) {
                    return Err(Error::NotAutomorphism(format!(
                        "phi({}·{}) != phi({})·phi({})",
                        self.name(a),
                        self.name(b),
                        self.name(a),
                        self.name(b)
                    )));
                }
            }
        }
        Ok(())
    }

    /// `x -> g x g^{-1}`
    pub fn inner_automorphism(&self, g: usize) -> Vec<usize> {
        (0..self.order).map(|x| self.conj(g, x)).collect()
    }

    /// Image of a subgroup under an element map.
    pub fn map_subgroup(&self, phi: &[usize], k: &Subgroup) -> Subgroup {
        let mut elems: Vec<usize> = k.elements().iter().map(|&x| phi[x]).collect();
        elems.sort_unstable();
        Subgroup::from_sorted(self, elems)
    }
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut s = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        s.push('(');
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            s.push_str(&(x + 1).to_string());
            x = p[x];
        }
        s.push(')');
    }
    if s.is_empty() {
        "e".into()
    } else {
        s
    }
}

/// Sorted element subset of a parent group, closed under products and inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<usize>,
    mask: Vec<bool>,
    parent: u64,
}

impl Subgroup {
    fn from_sorted(g: &FiniteGroup, elements: Vec<usize>) -> Self {
        let mut mask = vec![false; g.order];
        for &x in &elements {
            mask[x] = true;
        }
        Subgroup {
            elements,
            mask,
            parent: g.fingerprint,
        }
    }
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }
    pub fn names(&self, g: &FiniteGroup) -> Vec<String> {
        self.elements.iter().map(|&x| g.name(x).to_string()).collect()
    }
}

impl Serialize for Subgroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(s)
    }
}

#[derive(Debug, Clone)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub members: Vec<usize>,
    pub centralizer: Subgroup,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone)]
pub struct DoubleCoset {
    pub representative: usize,
    pub members: Vec<usize>,
    /// `K1 ∩ r K2 r^{-1}`
    pub stabilizer: Subgroup,
}

impl DoubleCoset {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone)]
pub struct SubgroupClass {
    /// Lexicographically smallest conjugate.
    pub key: Subgroup,
    pub members: Vec<Subgroup>,
}

#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    pub classes: Vec<SubgroupClass>,
}

impl SubgroupLattice {
    pub fn all(&self) -> impl Iterator<Item = &Subgroup> {
        self.classes.iter().flat_map(|c| c.members.iter())
    }
    pub fn count(&self) -> usize {
        self.classes.iter().map(|c| c.members.len()).sum()
    }
    /// One representative (the canonical key) per conjugacy class.
    pub fn representatives(&self) -> impl Iterator<Item = &Subgroup> {
        self.classes.iter().map(|c| &c.key)
    }
}

/// Preset group descriptions: `cyclic:3`, `dihedral:4`, `symmetric:3`,
/// `quaternion8`, `product:cyclic:2,cyclic:2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Quaternion8,
    Product(Vec<GroupSpec>),
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Cyclic(n) => FiniteGroup::cyclic(*n),
            GroupSpec::Dihedral(n) => FiniteGroup::dihedral(*n),
            GroupSpec::Symmetric(n) => FiniteGroup::symmetric(*n),
            GroupSpec::Quaternion8 => FiniteGroup::quaternion8(),
            GroupSpec::Product(fs) => {
                let built = fs.iter().map(|f| f.build()).collect::<Result<Vec<_>>>()?;
                FiniteGroup::direct_product(&built)
            }
        }
    }

    fn parse_simple(s: &str) -> Result<GroupSpec> {
        let s = s.trim();
        if s == "quaternion8" || s == "quaternion:8" {
            return Ok(GroupSpec::Quaternion8);
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown group preset `{s}`")))?;
        let n: usize = arg
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad parameter in `{s}`")))?;
        match kind.trim() {
            "cyclic" => Ok(GroupSpec::Cyclic(n)),
            "dihedral" => Ok(GroupSpec::Dihedral(n)),
            "symmetric" => Ok(GroupSpec::Symmetric(n)),
            other => Err(Error::Parse(format!("unknown group preset `{other}`"))),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("product:") {
            let factors = rest
                .split(',')
                .map(GroupSpec::parse_simple)
                .collect::<Result<Vec<_>>>()?;
            if factors.len() < 2 {
                return Err(Error::Parse("product needs at least two factors".into()));
            }
            return Ok(GroupSpec::Product(factors));
        }
        GroupSpec::parse_simple(s)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::Symmetric(n) => write!(f, "symmetric:{n}"),
            GroupSpec::Quaternion8 => write!(f, "quaternion8"),
            GroupSpec::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|x| x.to_string()).collect();
                write!(f, "product:{}", parts.join(","))
            }
        }
    }
}

/// Splits a comma-separated element list, ignoring commas nested in parentheses.
pub fn split_element_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Parses a subgroup description: `trivial`, `full`, `cyclic:<element>`,
/// `generated:<a>,<b>,...`, or an explicit element list such as `e,(12)`.
pub fn parse_subgroup(g: &FiniteGroup, spec: &str) -> Result<Subgroup> {
    let spec = spec.trim();
    let lookup = |name: &str| {
        g.element_by_name(name)
            .ok_or_else(|| Error::Parse(format!("unknown element `{name}`")))
    };
    match spec {
        "trivial" => return Ok(g.trivial_subgroup()),
        "full" => return Ok(g.full_subgroup()),
        _ => {}
    }
    if let Some(x) = spec.strip_prefix("cyclic:") {
        return Ok(g.generated(&[lookup(x)?]));
    }
    if let Some(list) = spec.strip_prefix("generated:") {
        let gens = split_element_list(list)
            .iter()
            .map(|n| lookup(n))
            .collect::<Result<Vec<_>>>()?;
        return Ok(g.generated(&gens));
    }
    let elems = split_element_list(spec)
        .iter()
        .map(|n| lookup(n))
        .collect::<Result<Vec<_>>>()?;
    g.subgroup(&elems)
}
