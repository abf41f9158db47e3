//! Commuting-projector terms as sparse monomial sums over the edge basis
//! `⊗_e C[G]`.
//!
//! On an edge `e = (u -> w)` the vertex gauge move `A^g` acts as `x -> g x`
//! at the head `w` and `x -> x g^{-1}` at the tail `u`, so `x_e` is the parallel
//! transport from `u` to `w`. A plaquette is flat when the ordered product of
//! its cycle (later steps multiplied on the left, backward steps inverted) is
//! the identity.

use serde::Serialize;

use super::geometry::{CycleStep, End, Lattice};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    /// `x -> k x`
    Left,
    /// `x -> x k^{-1}`
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    BulkVertex,
    BulkPlaquette,
    RimEdge,
    RimEdgeGauge,
    RimVertex,
    LiteralEdge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TermOp {
    /// `(1/|H|) Σ_{h∈H} A^h(v)`
    VertexGauge {
        vertex: usize,
        star: Vec<(usize, End)>,
        elements: Vec<usize>,
    },
    /// `(1/|K|) Σ_{k∈K} L^k_±(e)`
    EdgeGauge {
        edge: usize,
        side: Side,
        elements: Vec<usize>,
    },
    /// Projector onto trivial holonomy around the cycle.
    Flatness {
        plaquette: usize,
        cycle: Vec<CycleStep>,
    },
    /// `Σ_{k∈K} T^k_+(e)`: the edge value lies in the mask.
    EdgeIndicator { edge: usize, mask: Vec<bool> },
    /// `(1/|K|) Σ_{k∈K} (L^k_+(e) + L^k_-(e))`, not a projector.
    LiteralEdge { edge: usize, elements: Vec<usize> },
}

impl TermOp {
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = match self {
            TermOp::VertexGauge { star, .. } => star.iter().map(|&(e, _)| e).collect(),
            TermOp::EdgeGauge { edge, .. }
            | TermOp::EdgeIndicator { edge, .. }
            | TermOp::LiteralEdge { edge, .. } => vec![*edge],
            TermOp::Flatness { cycle, .. } => cycle.iter().map(|s| s.edge).collect(),
        };
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, TermOp::Flatness { .. } | TermOp::EdgeIndicator { .. })
    }

    /// Eigenvalue of a diagonal term on a basis state; `None` for the others.
    pub fn diagonal_value(&self, g: &FiniteGroup, x: &[u8]) -> Option<bool> {
        match self {
            TermOp::Flatness { cycle, .. } => Some(holonomy(g, cycle, x) == g.identity()),
            TermOp::EdgeIndicator { edge, mask } => Some(mask[x[*edge] as usize]),
            _ => None,
        }
    }

    /// Calls `f(image, coefficient)` for every basis state in `T|x⟩`.
    /// `x` is modified during the call and restored afterwards.
    pub fn for_each_image(&self, g: &FiniteGroup, x: &mut [u8], f: &mut dyn FnMut(&[u8], f64)) {
        match self {
            TermOp::VertexGauge { star, elements, .. } => {
                let c = 1.0 / elements.len() as f64;
                let mut stack = [0u8; 8];
                let mut heap = Vec::new();
                let saved: &mut [u8] = if star.len() <= stack.len() {
                    &mut stack[..star.len()]
                } else {
                    heap.resize(star.len(), 0);
                    &mut heap
                };
                for (s, &(e, _)) in saved.iter_mut().zip(star) {
                    *s = x[e];
                }
                for &h in elements {
                    for &(e, end) in star {
                        let v = x[e] as usize;
                        x[e] = match end {
                            End::Head => g.mul(h, v),
                            End::Tail => g.mul(v, g.inv(h)),
                        } as u8;
                    }
                    f(x, c);
                    for (&(e, _), &s) in star.iter().zip(saved.iter()) {
                        x[e] = s;
                    }
                }
            }
            TermOp::EdgeGauge { edge, side, elements } => {
                let c = 1.0 / elements.len() as f64;
                let s = x[*edge];
                for &k in elements {
                    x[*edge] = shift(g, *side, k, s as usize) as u8;
                    f(x, c);
                }
                x[*edge] = s;
            }
            TermOp::LiteralEdge { edge, elements } => {
                let c = 1.0 / elements.len() as f64;
                let s = x[*edge];
                for &k in elements {
                    for side in [Side::Left, Side::Right] {
                        x[*edge] = shift(g, side, k, s as usize) as u8;
                        f(x, c);
                    }
                }
                x[*edge] = s;
            }
            TermOp::Flatness { .. } | TermOp::EdgeIndicator { .. } => {
                if self.diagonal_value(g, x) == Some(true) {
                    f(x, 1.0);
                }
            }
        }
    }

    /// Same operator with edge indices passed through `map`.
    pub fn relabel(&self, map: &dyn Fn(usize) -> usize) -> TermOp {
        match self {
            TermOp::VertexGauge { vertex, star, elements } => TermOp::VertexGauge {
                vertex: *vertex,
                star: star.iter().map(|&(e, end)| (map(e), end)).collect(),
                elements: elements.clone(),
            },
            TermOp::EdgeGauge { edge, side, elements } => TermOp::EdgeGauge {
                edge: map(*edge),
                side: *side,
                elements: elements.clone(),
            },
            TermOp::Flatness { plaquette, cycle } => TermOp::Flatness {
                plaquette: *plaquette,
                cycle: cycle
                    .iter()
                    .map(|s| CycleStep { edge: map(s.edge), forward: s.forward })
                    .collect(),
            },
            TermOp::EdgeIndicator { edge, mask } => TermOp::EdgeIndicator {
                edge: map(*edge),
                mask: mask.clone(),
            },
            TermOp::LiteralEdge { edge, elements } => TermOp::LiteralEdge {
                edge: map(*edge),
                elements: elements.clone(),
            },
        }
    }
}

pub(crate) fn shift(g: &FiniteGroup, side: Side, k: usize, x: usize) -> usize {
    match side {
        Side::Left => g.mul(k, x),
        Side::Right => g.mul(x, g.inv(k)),
    }
}

/// Ordered product around a cycle, later steps on the left.
pub fn holonomy(g: &FiniteGroup, cycle: &[CycleStep], x: &[u8]) -> usize {
    cycle.iter().fold(g.identity(), |acc, s| {
        let v = x[s.edge] as usize;
        let y = if s.forward { v } else { g.inv(v) };
        g.mul(y, acc)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub kind: TermKind,
    pub label: String,
    pub op: TermOp,
}

/// Self-contained list of Hamiltonian terms over `edge_count` edges.
#[derive(Debug, Clone)]
pub struct TermSet {
    pub edge_count: usize,
    pub group_order: usize,
    pub group_fingerprint: u64,
    pub terms: Vec<Term>,
}

impl TermSet {
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn count(&self, kind: TermKind) -> usize {
        self.terms.iter().filter(|t| t.kind == kind).count()
    }
    pub fn push(&mut self, term: Term) {
        self.terms.push(term);
    }

    pub(crate) fn check_group(&self, g: &FiniteGroup) -> Result<()> {
        if g.fingerprint() != self.group_fingerprint {
            return Err(Error::MismatchedParent);
        }
        Ok(())
    }

    /// `|G|^E`, saturating.
    pub fn hilbert_dimension(&self) -> u128 {
        (self.group_order as u128)
            .checked_pow(self.edge_count as u32)
            .unwrap_or(u128::MAX)
    }
}

/// Which rim edges receive the gauge projector pair `P_+(e)`, `P_-(e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RimEdgeGauge {
    /// Only rim edges that belong to no retained plaquette.
    #[default]
    DanglingOnly,
    /// Every rim edge; fails the audit next to a nonabelian plaquette.
    All,
}

fn vertex_label(l: &Lattice, v: usize) -> String {
    let v = &l.vertices()[v];
    format!("({},{})", v.row, v.col)
}

/// Bulk terms: `A(v)` on interior vertices and `B(p)` on retained plaquettes.
pub fn build_terms(lattice: &Lattice, g: &FiniteGroup) -> TermSet {
    let mut set = TermSet {
        edge_count: lattice.num_edges(),
        group_order: g.order(),
        group_fingerprint: g.fingerprint(),
        terms: Vec::new(),
    };
    let all: Vec<usize> = g.elements().collect();
    for v in 0..lattice.vertices().len() {
        if lattice.is_interior(v) {
            set.push(Term {
                kind: TermKind::BulkVertex,
                label: format!("A{}", vertex_label(lattice, v)),
                op: TermOp::VertexGauge {
                    vertex: v,
                    star: lattice.star(v).to_vec(),
                    elements: all.clone(),
                },
            });
        }
    }
    for (pi, p) in lattice.plaquettes().iter().enumerate() {
        set.push(Term {
            kind: TermKind::BulkPlaquette,
            label: format!("B({},{})", p.row, p.col),
            op: TermOp::Flatness {
                plaquette: pi,
                cycle: p.cycle.clone(),
            },
        });
    }
    set
}

/// Rim terms for every hole: `A^K(v)` on rim vertices, `T^K(e)` on rim edges,
/// and `P_±(e)` as selected by `gauge`.
pub fn build_boundary_terms(
    lattice: &Lattice,
    g: &FiniteGroup,
    set: &mut TermSet,
    gauge: RimEdgeGauge,
) -> Result<()> {
    set.check_group(g)?;
    for hole in lattice.holes() {
        g.check_parent(&hole.boundary)?;
        let k = hole.boundary.elements().to_vec();
        for &v in &hole.rim_vertices {
            set.push(Term {
                kind: TermKind::RimVertex,
                label: format!("AK{}", vertex_label(lattice, v)),
                op: TermOp::VertexGauge {
                    vertex: v,
                    star: lattice.star(v).to_vec(),
                    elements: k.clone(),
                },
            });
        }
        for &e in &hole.rim_edges {
            let name = lattice.edges()[e].label();
            set.push(Term {
                kind: TermKind::RimEdge,
                label: format!("T[{name}]"),
                op: TermOp::EdgeIndicator {
                    edge: e,
                    mask: hole.boundary.mask().to_vec(),
                },
            });
            let dangling = lattice.edge_plaquettes(e).is_empty();
            if dangling || gauge == RimEdgeGauge::All {
                for (side, sign) in [(Side::Left, '+'), (Side::Right, '-')] {
                    set.push(Term {
                        kind: TermKind::RimEdgeGauge,
                        label: format!("P{sign}[{name}]"),
                        op: TermOp::EdgeGauge {
                            edge: e,
                            side,
                            elements: k.clone(),
                        },
                    });
                }
            }
        }
    }
    Ok(())
}

/// Full Hamiltonian term set: bulk plus rim terms.
pub fn hamiltonian_terms(lattice: &Lattice, g: &FiniteGroup, gauge: RimEdgeGauge) -> Result<TermSet> {
    let mut set = build_terms(lattice, g);
    build_boundary_terms(lattice, g, &mut set, gauge)?;
    Ok(set)
}

/// The rim-edge gauge term written as a single sum over both sides.
pub fn literal_edge_term(lattice: &Lattice, edge: usize, elements: &[usize]) -> Term {
    Term {
        kind: TermKind::LiteralEdge,
        label: format!("LK[{}]", lattice.edges()[edge].label()),
        op: TermOp::LiteralEdge {
            edge,
            elements: elements.to_vec(),
        },
    }
}
