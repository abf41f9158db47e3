//! Orbit structure of the gauge group on rim-constrained flat configurations.
//!
//! The non-diagonal terms of a term set are averages over vertex gauge
//! groups `H_v` and (on edges outside every plaquette) left/right edge
//! translations. Their joint +1 eigenspace inside the span of the allowed
//! flat configurations is spanned by orbit sums, so its dimension is the
//! number of orbits.
//!
//! The orbit count is reduced by fixing the gauge along a spanning forest:
//! a tree edge `u -> w` is set to the identity using `h_w`, which is possible
//! when the edge values and `H_u` both lie in `H_w`. What is left is the
//! residual group `R = Π_trees H_root` acting on the slice of configurations
//! that are trivial on tree edges; orbits of the full gauge group correspond
//! one-to-one to `R`-orbits on the slice, counted with Burnside's lemma.

use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;

use rayon::prelude::*;

use super::geometry::{CycleStep, End};
use super::terms::{shift, Side, TermOp, TermSet};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// Maximum number of slice configurations kept in memory.
pub const SLICE_LIMIT: usize = 20_000_000;
/// Maximum `|R| · |slice|` work for the Burnside sum.
pub const BURNSIDE_LIMIT: u128 = 20_000_000_000;

#[derive(Debug, Clone)]
struct TreeStep {
    vertex: usize,
    parent: usize,
    edge: usize,
    /// Edge runs parent -> vertex.
    outward: bool,
}

/// Edge whose gauge terms act on it alone.
#[derive(Debug, Clone)]
struct Decoupled {
    edge: usize,
    /// Minimal representative of each orbit of `L × R` on the allowed values.
    orbit_minima: Vec<u8>,
    left: Vec<usize>,
    right: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GaugeReduction {
    edge_count: usize,
    groups: Vec<Vec<usize>>,
    /// `[tail, head]`; `None` when the endpoint carries no gauge term.
    ends: Vec<[Option<usize>; 2]>,
    allowed: Vec<Vec<bool>>,
    cycles: Vec<Vec<CycleStep>>,
    decoupled: Vec<Decoupled>,
    is_decoupled: Vec<bool>,
    tree_edge: Vec<bool>,
    root_of: Vec<usize>,
    roots: Vec<usize>,
    steps: Vec<TreeStep>,
    residual: OnceLock<Vec<Vec<usize>>>,
}

fn closure(g: &FiniteGroup, gens: &[usize]) -> Vec<usize> {
    g.generated(gens).elements().to_vec()
}

fn subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

impl GaugeReduction {
    pub fn new(terms: &TermSet, g: &FiniteGroup) -> Result<GaugeReduction> {
        terms.check_group(g)?;
        let ne = terms.edge_count;
        let mut nv = 0;
        for t in &terms.terms {
            if let TermOp::VertexGauge { vertex, .. } = &t.op {
                nv = nv.max(vertex + 1);
            }
        }
        let mut groups: Vec<Option<Vec<usize>>> = vec![None; nv];
        let mut ends = vec![[None, None]; ne];
        let mut allowed = vec![vec![true; g.order()]; ne];
        let mut cycles = Vec::new();
        let mut left: Vec<Vec<usize>> = vec![Vec::new(); ne];
        let mut right: Vec<Vec<usize>> = vec![Vec::new(); ne];
        let mut has_edge_gauge = vec![false; ne];
        for t in &terms.terms {
            match &t.op {
                TermOp::VertexGauge { vertex, star, elements } => {
                    if groups[*vertex].is_some() {
                        return Err(Error::Lattice(format!(
                            "vertex {vertex} carries two gauge terms"
                        )));
                    }
                    groups[*vertex] = Some(closure(g, elements));
                    for &(e, end) in star {
                        let slot = match end {
                            End::Tail => 0,
                            End::Head => 1,
                        };
                        ends[e][slot] = Some(*vertex);
                    }
                }
                TermOp::EdgeIndicator { edge, mask } => {
                    for (a, &m) in allowed[*edge].iter_mut().zip(mask) {
                        *a &= m;
                    }
                }
                TermOp::Flatness { cycle, .. } => cycles.push(cycle.clone()),
                TermOp::EdgeGauge { edge, side, elements } => {
                    has_edge_gauge[*edge] = true;
                    let target = match side {
                        Side::Left => &mut left[*edge],
                        Side::Right => &mut right[*edge],
                    };
                    target.extend(elements.iter().copied());
                }
                TermOp::LiteralEdge { .. } => {
                    return Err(Error::Lattice(
                        "term set contains a non-projector edge term".into(),
                    ))
                }
            }
        }
        let groups: Vec<Vec<usize>> = groups
            .into_iter()
            .map(|h| h.unwrap_or_else(|| vec![g.identity()]))
            .collect();
        let in_cycle: BTreeSet<usize> = cycles.iter().flatten().map(|s| s.edge).collect();

        let mut decoupled = Vec::new();
        let mut is_decoupled = vec![false; ne];
        for e in 0..ne {
            if !has_edge_gauge[e] {
                continue;
            }
            if in_cycle.contains(&e) {
                return Err(Error::Lattice(format!(
                    "edge {e} has gauge terms and lies on a plaquette; counting cannot decouple it"
                )));
            }
            let l = closure(g, &left[e]);
            let r = closure(g, &right[e]);
            let head_group = ends[e][1].map(|v| groups[v].clone()).unwrap_or_default();
            let tail_group = ends[e][0].map(|v| groups[v].clone()).unwrap_or_default();
            if !subset(&head_group, &l) || !subset(&tail_group, &r) {
                return Err(Error::Lattice(format!(
                    "edge {e}: vertex gauge not absorbed by its edge gauge terms"
                )));
            }
            let mut minima = Vec::new();
            let mut seen = vec![false; g.order()];
            for x in 0..g.order() {
                if !allowed[e][x] || seen[x] {
                    continue;
                }
                minima.push(x as u8);
                for &a in &l {
                    for &b in &r {
                        let y = shift(g, Side::Right, b, shift(g, Side::Left, a, x));
                        if !allowed[e][y] {
                            return Err(Error::invariant("edge gauge leaves the allowed set"));
                        }
                        seen[y] = true;
                    }
                }
            }
            decoupled.push(Decoupled {
                edge: e,
                orbit_minima: minima,
                left: l,
                right: r,
            });
            is_decoupled[e] = true;
        }

        // Incidence on the coupled edges.
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for e in 0..ne {
            if is_decoupled[e] {
                continue;
            }
            if let [Some(t), Some(h)] = ends[e] {
                if t != h {
                    incident[t].push(e);
                    incident[h].push(e);
                }
            }
        }

        let mut order: Vec<usize> = (0..nv).collect();
        order.sort_by_key(|&v| (groups[v].len(), v));
        let mut root_of = vec![usize::MAX; nv];
        let mut roots = Vec::new();
        let mut steps = Vec::new();
        let mut tree_edge = vec![false; ne];
        for &start in &order {
            if root_of[start] != usize::MAX {
                continue;
            }
            let root = roots.len();
            roots.push(start);
            root_of[start] = root;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &e in &incident[u] {
                    let [t, h] = ends[e];
                    let (t, h) = (t.unwrap(), h.unwrap());
                    let (w, outward) = if t == u { (h, true) } else { (t, false) };
                    if root_of[w] != usize::MAX {
                        continue;
                    }
                    let values: Vec<usize> = (0..g.order()).filter(|&x| allowed[e][x]).collect();
                    if subset(&values, &groups[w]) && subset(&groups[u], &groups[w]) {
                        root_of[w] = root;
                        tree_edge[e] = true;
                        steps.push(TreeStep {
                            vertex: w,
                            parent: u,
                            edge: e,
                            outward,
                        });
                        queue.push_back(w);
                    }
                }
            }
        }

        Ok(GaugeReduction {
            edge_count: ne,
            groups,
            ends,
            allowed,
            cycles,
            decoupled,
            is_decoupled,
            tree_edge,
            root_of,
            roots,
            steps,
            residual: OnceLock::new(),
        })
    }

    /// `|R|`, the order of the residual gauge group on the slice.
    pub fn residual_order(&self) -> u128 {
        self.roots
            .iter()
            .map(|&r| self.groups[r].len() as u128)
            .product()
    }

    pub fn num_trees(&self) -> usize {
        self.roots.len()
    }

    /// Product over decoupled edges of their orbit counts.
    fn decoupled_factor(&self) -> u64 {
        self.decoupled.iter().map(|d| d.orbit_minima.len() as u64).product()
    }

    /// All slice configurations (trivial on tree edges, decoupled edges at the identity).
    pub fn slice(&self, g: &FiniteGroup) -> Result<Vec<Vec<u8>>> {
        let free: Vec<usize> = {
            let mut seen = vec![false; self.edge_count];
            let mut out = Vec::new();
            for c in &self.cycles {
                for s in c {
                    let e = s.edge;
                    if !self.tree_edge[e] && !self.is_decoupled[e] && !seen[e] {
                        seen[e] = true;
                        out.push(e);
                    }
                }
            }
            for e in 0..self.edge_count {
                if !self.tree_edge[e] && !self.is_decoupled[e] && !seen[e] {
                    out.push(e);
                }
            }
            out
        };
        let mut position = vec![usize::MAX; self.edge_count];
        for (i, &e) in free.iter().enumerate() {
            position[e] = i;
        }
        // Each cycle is resolved at the position of its last free edge.
        let mut closing: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
        for (ci, c) in self.cycles.iter().enumerate() {
            let last = c
                .iter()
                .filter(|s| position[s.edge] != usize::MAX)
                .map(|s| position[s.edge])
                .max();
            match last {
                Some(p) => closing[p].push(ci),
                None => {
                    let x = vec![0u8; self.edge_count];
                    if super::terms::holonomy(g, c, &x) != g.identity() {
                        return Ok(Vec::new());
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut x = vec![g.identity() as u8; self.edge_count];
        self.extend(g, &free, &closing, 0, &mut x, &mut out)?;
        Ok(out)
    }

    fn extend(
        &self,
        g: &FiniteGroup,
        free: &[usize],
        closing: &[Vec<usize>],
        depth: usize,
        x: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) -> Result<()> {
        if depth == free.len() {
            if out.len() >= SLICE_LIMIT {
                return Err(Error::Budget {
                    what: "gauge slice",
                    size: out.len() as u128 + 1,
                    limit: SLICE_LIMIT as u128,
                });
            }
            out.push(x.clone());
            return Ok(());
        }
        let e = free[depth];
        let candidates: Vec<usize> = match closing[depth]
            .iter()
            .find(|&&ci| self.cycles[ci].iter().filter(|s| s.edge == e).count() == 1)
        {
            Some(&ci) => solve(g, &self.cycles[ci], e, x).into_iter().collect(),
            None => (0..g.order()).collect(),
        };
        for v in candidates {
            if !self.allowed[e][v] {
                continue;
            }
            x[e] = v as u8;
            let ok = closing[depth]
                .iter()
                .all(|&ci| super::terms::holonomy(g, &self.cycles[ci], x) == g.identity());
            if ok {
                self.extend(g, free, closing, depth + 1, x, out)?;
            }
        }
        x[e] = g.identity() as u8;
        Ok(())
    }

    /// Residual group elements, one group element per tree.
    fn residual_elements(&self) -> &[Vec<usize>] {
        self.residual.get_or_init(|| {
            let mut out = vec![Vec::new()];
            for &r in &self.roots {
                let mut next = Vec::new();
                for prefix in &out {
                    for &h in &self.groups[r] {
                        let mut p: Vec<usize> = prefix.clone();
                        p.push(h);
                        next.push(p);
                    }
                }
                out = next;
            }
            out
        })
    }

    fn tree_value(&self, element: &[usize], v: Option<usize>, g: &FiniteGroup) -> usize {
        match v {
            Some(v) => element[self.root_of[v]],
            None => g.identity(),
        }
    }

    fn act_residual(&self, g: &FiniteGroup, element: &[usize], x: &[u8], out: &mut [u8]) {
        for e in 0..self.edge_count {
            if self.is_decoupled[e] {
                out[e] = x[e];
                continue;
            }
            let [t, h] = self.ends[e];
            let a = self.tree_value(element, h, g);
            let b = self.tree_value(element, t, g);
            out[e] = g.mul(g.mul(a, x[e] as usize), g.inv(b)) as u8;
        }
    }

    fn fixes(&self, g: &FiniteGroup, element: &[usize], x: &[u8]) -> bool {
        (0..self.edge_count).all(|e| {
            if self.is_decoupled[e] {
                return true;
            }
            let [t, h] = self.ends[e];
            let a = self.tree_value(element, h, g);
            let b = self.tree_value(element, t, g);
            g.mul(a, x[e] as usize) == g.mul(x[e] as usize, b)
        })
    }

    /// Number of gauge orbits, by Burnside's lemma over the residual group.
    pub fn count_orbits(&self, g: &FiniteGroup) -> Result<u64> {
        let slice = self.slice(g)?;
        let order = self.residual_order();
        let work = order.saturating_mul(slice.len() as u128);
        if work > BURNSIDE_LIMIT {
            return Err(Error::Budget {
                what: "Burnside sum",
                size: work,
                limit: BURNSIDE_LIMIT,
            });
        }
        let elements = self.residual_elements();
        let fixed: u128 = slice
            .par_iter()
            .map(|x| elements.iter().filter(|r| self.fixes(g, r, x)).count() as u128)
            .sum();
        if !fixed.is_multiple_of(order) {
            return Err(Error::invariant(format!(
                "Burnside sum {fixed} not divisible by |R| = {order}"
            )));
        }
        Ok((fixed / order) as u64 * self.decoupled_factor())
    }

    /// Gauge transform `x` so that every tree edge is the identity.
    pub fn to_slice(&self, g: &FiniteGroup, x: &[u8]) -> Vec<u8> {
        let mut h = vec![g.identity(); self.groups.len()];
        for s in &self.steps {
            let v = x[s.edge] as usize;
            h[s.vertex] = if s.outward {
                g.mul(h[s.parent], g.inv(v))
            } else {
                g.mul(h[s.parent], v)
            };
        }
        let mut out = x.to_vec();
        for e in 0..self.edge_count {
            if self.is_decoupled[e] {
                continue;
            }
            let [t, hd] = self.ends[e];
            let a = hd.map(|v| h[v]).unwrap_or(g.identity());
            let b = t.map(|v| h[v]).unwrap_or(g.identity());
            out[e] = g.mul(g.mul(a, x[e] as usize), g.inv(b)) as u8;
        }
        debug_assert!((0..self.edge_count).all(|e| !self.tree_edge[e] || out[e] == 0));
        out
    }

    /// Canonical representative of the gauge orbit of `x` and the order of
    /// the residual stabilizer of its slice point.
    pub fn canonical(&self, g: &FiniteGroup, x: &[u8]) -> (Vec<u8>, usize) {
        let mut s = self.to_slice(g, x);
        for d in &self.decoupled {
            let v = s[d.edge] as usize;
            let min = d
                .left
                .iter()
                .flat_map(|&a| d.right.iter().map(move |&b| (a, b)))
                .map(|(a, b)| shift(g, Side::Right, b, shift(g, Side::Left, a, v)))
                .min()
                .unwrap();
            s[d.edge] = min as u8;
        }
        let mut best = s.clone();
        let mut stab = 0;
        let mut buf = s.clone();
        for r in self.residual_elements() {
            self.act_residual(g, r, &s, &mut buf);
            if buf == s {
                stab += 1;
            }
            if buf < best {
                best.copy_from_slice(&buf);
            }
        }
        (best, stab)
    }

    /// Sorted canonical representatives, one per gauge orbit.
    pub fn orbit_representatives(&self, g: &FiniteGroup) -> Result<Vec<Vec<u8>>> {
        let slice = self.slice(g)?;
        let mut reps: Vec<Vec<u8>> = slice
            .par_iter()
            .map(|x| self.canonical(g, x).0)
            .collect();
        reps.sort();
        reps.dedup();
        for d in &self.decoupled {
            let mut next = Vec::new();
            for r in &reps {
                for &m in &d.orbit_minima {
                    let mut y = r.clone();
                    y[d.edge] = m;
                    next.push(y);
                }
            }
            reps = next;
        }
        reps.sort();
        Ok(reps)
    }

    /// True when `x` satisfies every diagonal constraint.
    pub fn is_admissible(&self, g: &FiniteGroup, x: &[u8]) -> bool {
        (0..self.edge_count).all(|e| self.allowed[e][x[e] as usize])
            && self
                .cycles
                .iter()
                .all(|c| super::terms::holonomy(g, c, x) == g.identity())
    }

    /// Vertex gauge group at `v` (the trivial group when `v` has no term).
    pub fn vertex_group(&self, v: usize) -> &[usize] {
        &self.groups[v]
    }
}

/// The unique value of edge `e` (appearing once in `cycle`) that makes the
/// holonomy trivial, with all other edges as in `x`.
fn solve(g: &FiniteGroup, cycle: &[CycleStep], e: usize, x: &[u8]) -> Option<usize> {
    let idx = cycle.iter().position(|s| s.edge == e)?;
    let step = |s: &CycleStep| {
        let v = x[s.edge] as usize;
        if s.forward {
            v
        } else {
            g.inv(v)
        }
    };
    // holonomy = A · y · B with B the product before idx, A the product after.
    let b = cycle[..idx].iter().fold(g.identity(), |acc, s| g.mul(step(s), acc));
    let a = cycle[idx + 1..].iter().fold(g.identity(), |acc, s| g.mul(step(s), acc));
    let y = g.mul(g.inv(a), g.inv(b));
    Some(if cycle[idx].forward { y } else { g.inv(y) })
}
