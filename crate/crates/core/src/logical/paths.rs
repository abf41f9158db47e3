//! Primal edge paths (charge strings) and dual paths (flux strings).

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{End, Face, Lattice, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathStep {
    pub edge: usize,
    /// Traversed tail -> head.
    pub forward: bool,
}

/// Walk along edges, starting at a vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimalPath {
    pub start: usize,
    pub steps: Vec<PathStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DualStep {
    pub edge: usize,
    /// Crossed from the left face of the edge to its right face.
    pub left_to_right: bool,
}

/// Walk across edges, starting in a face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualPath {
    pub start: Face,
    pub steps: Vec<DualStep>,
}

impl PrimalPath {
    /// Path through consecutive vertices given as `(row, col)`.
    pub fn from_vertices(l: &Lattice, vertices: &[(usize, usize)]) -> Result<PrimalPath> {
        let ids: Vec<usize> = vertices
            .iter()
            .map(|&(r, c)| {
                l.vertex_at(r, c)
                    .ok_or_else(|| Error::InvalidPath(format!("no vertex at ({r},{c})")))
            })
            .collect::<Result<_>>()?;
        let start = *ids.first().ok_or_else(|| Error::InvalidPath("empty path".into()))?;
        let mut steps = Vec::new();
        for w in ids.windows(2) {
            let step = l
                .star(w[0])
                .iter()
                .find_map(|&(e, end)| {
                    let edge = &l.edges()[e];
                    match end {
                        End::Tail if edge.head == w[1] => Some(PathStep { edge: e, forward: true }),
                        End::Head if edge.tail == w[1] => Some(PathStep { edge: e, forward: false }),
                        _ => None,
                    }
                })
                .ok_or_else(|| {
                    Error::InvalidPath(format!("vertices {} and {} are not adjacent", w[0], w[1]))
                })?;
            steps.push(step);
        }
        Ok(PrimalPath { start, steps })
    }

    /// Vertices visited, including the start.
    pub fn vertices(&self, l: &Lattice) -> Vec<usize> {
        let mut out = vec![self.start];
        for s in &self.steps {
            let e = &l.edges()[s.edge];
            out.push(if s.forward { e.head } else { e.tail });
        }
        out
    }

    pub fn end(&self, l: &Lattice) -> usize {
        *self.vertices(l).last().unwrap()
    }

    /// Checks that consecutive steps share their vertices.
    pub fn validate(&self, l: &Lattice) -> Result<()> {
        let mut at = self.start;
        for s in &self.steps {
            let e = l
                .edges()
                .get(s.edge)
                .ok_or_else(|| Error::InvalidPath(format!("edge {} out of range", s.edge)))?;
            let (from, to) = if s.forward { (e.tail, e.head) } else { (e.head, e.tail) };
            if from != at {
                return Err(Error::InvalidPath(format!("path breaks at edge {}", e.label())));
            }
            at = to;
        }
        Ok(())
    }

    pub fn is_closed(&self, l: &Lattice) -> bool {
        !self.steps.is_empty() && self.end(l) == self.start
    }

    fn points(&self, l: &Lattice) -> Vec<(f64, f64)> {
        self.vertices(l)
            .iter()
            .map(|&v| {
                let v = &l.vertices()[v];
                (v.col as f64, v.row as f64)
            })
            .collect()
    }
}

fn other_face(l: &Lattice, e: usize, f: Face) -> Option<(Face, bool)> {
    let edge = &l.edges()[e];
    if edge.left == f {
        Some((edge.right, true))
    } else if edge.right == f {
        Some((edge.left, false))
    } else {
        None
    }
}

impl DualPath {
    /// Crossing `edges` in order, starting in `start`.
    pub fn from_edges(l: &Lattice, start: Face, edges: &[usize]) -> Result<DualPath> {
        let mut at = start;
        let mut steps = Vec::new();
        for &e in edges {
            if e >= l.num_edges() {
                return Err(Error::InvalidPath(format!("edge {e} out of range")));
            }
            let (next, left_to_right) = other_face(l, e, at).ok_or_else(|| {
                Error::InvalidPath(format!("edge {} does not border {at:?}", l.edges()[e].label()))
            })?;
            steps.push(DualStep { edge: e, left_to_right });
            at = next;
        }
        Ok(DualPath { start, steps })
    }

    /// Path through consecutive faces, each pair sharing exactly one edge.
    pub fn from_faces(l: &Lattice, faces: &[Face]) -> Result<DualPath> {
        let start = *faces.first().ok_or_else(|| Error::InvalidPath("empty path".into()))?;
        let mut edges = Vec::new();
        for w in faces.windows(2) {
            let shared: Vec<usize> = (0..l.num_edges())
                .filter(|&e| {
                    let edge = &l.edges()[e];
                    (edge.left == w[0] && edge.right == w[1]) || (edge.left == w[1] && edge.right == w[0])
                })
                .collect();
            if shared.len() != 1 {
                return Err(Error::InvalidPath(format!(
                    "faces {:?} and {:?} share {} edges",
                    w[0],
                    w[1],
                    shared.len()
                )));
            }
            edges.push(shared[0]);
        }
        DualPath::from_edges(l, start, &edges)
    }

    /// Faces visited, including the start.
    pub fn faces(&self, l: &Lattice) -> Vec<Face> {
        let mut out = vec![self.start];
        for s in &self.steps {
            let e = &l.edges()[s.edge];
            out.push(if s.left_to_right { e.right } else { e.left });
        }
        out
    }

    pub fn end(&self, l: &Lattice) -> Face {
        *self.faces(l).last().unwrap()
    }

    pub fn validate(&self, l: &Lattice) -> Result<()> {
        let mut at = self.start;
        for s in &self.steps {
            let e = l
                .edges()
                .get(s.edge)
                .ok_or_else(|| Error::InvalidPath(format!("edge {} out of range", s.edge)))?;
            let (from, to) = if s.left_to_right { (e.left, e.right) } else { (e.right, e.left) };
            if from != at {
                return Err(Error::InvalidPath(format!("dual path breaks at edge {}", e.label())));
            }
            at = to;
        }
        let faces = self.faces(l);
        if faces.len() > 2 {
            for f in &faces[1..faces.len() - 1] {
                if matches!(f, Face::Hole(_)) {
                    return Err(Error::InvalidPath(format!("dual path passes through {f:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_closed(&self, l: &Lattice) -> bool {
        !self.steps.is_empty() && self.end(l) == self.start
    }

    fn points(&self, l: &Lattice) -> Option<Vec<(f64, f64)>> {
        self.faces(l).into_iter().map(|f| l.face_center(f)).collect()
    }
}

/// Winding number of a closed polygon around `p`.
fn winding(points: &[(f64, f64)], p: (f64, f64)) -> i64 {
    let mut total = 0.0;
    for w in points.windows(2) {
        let a = (w[0].1 - p.1).atan2(w[0].0 - p.0);
        let b = (w[1].1 - p.1).atan2(w[1].0 - p.0);
        let mut d = b - a;
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
    }
    (total / std::f64::consts::TAU).round() as i64
}

/// Winding numbers of a closed loop around every inner hole, by hole index.
pub fn hole_windings(l: &Lattice, charge: Option<&PrimalPath>, flux: Option<&DualPath>) -> Result<Vec<(usize, i64)>> {
    if l.topology() != Topology::Patch {
        return Err(Error::InvalidPath("hole winding is only defined on a patch".into()));
    }
    let points = match (charge, flux) {
        (Some(p), _) => p.points(l),
        (None, Some(d)) => d
            .points(l)
            .ok_or_else(|| Error::InvalidPath("dual loop enters the outer region".into()))?,
        (None, None) => return Err(Error::InvalidPath("empty loop".into())),
    };
    Ok(l.inner_holes()
        .map(|h| (h.index, winding(&points, l.face_center(Face::Hole(h.index)).unwrap())))
        .collect())
}

/// Inclusive cell bounding box of a rectangular inner hole.
fn hole_box(l: &Lattice, hole: usize) -> Result<(usize, usize, usize, usize)> {
    let h = l.hole(hole)?;
    if h.outer || l.topology() != Topology::Patch {
        return Err(Error::InvalidPath(format!("hole {hole} is not an inner hole of a patch")));
    }
    let r0 = h.cells.iter().map(|c| c.0).min().unwrap();
    let r1 = h.cells.iter().map(|c| c.0).max().unwrap();
    let c0 = h.cells.iter().map(|c| c.1).min().unwrap();
    let c1 = h.cells.iter().map(|c| c.1).max().unwrap();
    if h.cells.len() != (r1 - r0 + 1) * (c1 - c0 + 1) {
        return Err(Error::InvalidPath(format!("hole {hole} is not rectangular")));
    }
    Ok((r0, r1, c0, c1))
}

/// Counterclockwise boundary of a rectangle of grid points, closed.
fn rectangle(r0: usize, r1: usize, c0: usize, c1: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for c in c0..c1 {
        out.push((r0, c));
    }
    for r in r0..r1 {
        out.push((r, c1));
    }
    for c in (c0 + 1..=c1).rev() {
        out.push((r1, c));
    }
    for r in (r0 + 1..=r1).rev() {
        out.push((r, c0));
    }
    out.push((r0, c0));
    out
}

/// Counterclockwise vertex loop `offset` steps outside a rectangular hole;
/// offset 0 is the rim itself.
pub fn primal_ring(l: &Lattice, hole: usize, offset: usize) -> Result<PrimalPath> {
    let (r0, r1, c0, c1) = hole_box(l, hole)?;
    let (rows, cols) = (l.spec().rows, l.spec().cols);
    if offset > r0 || offset > c0 || r1 + 1 + offset > rows || c1 + 1 + offset > cols {
        return Err(Error::InvalidPath(format!("ring {offset} around hole {hole} leaves the lattice")));
    }
    PrimalPath::from_vertices(
        l,
        &rectangle(r0 - offset, r1 + 1 + offset, c0 - offset, c1 + 1 + offset),
    )
}

/// Counterclockwise loop through the cells at Chebyshev distance `ring >= 1`
/// from a rectangular hole.
pub fn dual_ring(l: &Lattice, hole: usize, ring: usize) -> Result<DualPath> {
    let (r0, r1, c0, c1) = hole_box(l, hole)?;
    let (rows, cols) = (l.spec().rows, l.spec().cols);
    if ring == 0 || ring > r0 || ring > c0 || r1 + ring >= rows || c1 + ring >= cols {
        return Err(Error::InvalidPath(format!("dual ring {ring} around hole {hole} is not available")));
    }
    let faces: Vec<Face> = rectangle(r0 - ring, r1 + ring, c0 - ring, c1 + ring)
        .into_iter()
        .map(|(r, c)| match l.cell(r, c) {
            Some(f @ Face::Plaquette(_)) => Ok(f),
            _ => Err(Error::InvalidPath(format!("dual ring {ring} hits a hole at ({r},{c})"))),
        })
        .collect::<Result<_>>()?;
    DualPath::from_faces(l, &faces)
}

/// Shortest vertex path from the rim of hole `from` to the rim of hole `to`.
pub fn shortest_primal(l: &Lattice, from: usize, to: usize) -> Result<PrimalPath> {
    let sources = &l.hole(from)?.rim_vertices;
    l.hole(to)?;
    let n = l.vertices().len();
    let mut prev: Vec<Option<(usize, PathStep)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &v in sources {
        seen[v] = true;
        queue.push_back(v);
    }
    while let Some(u) = queue.pop_front() {
        if l.vertices()[u].rim == Some(to) {
            let mut steps = Vec::new();
            let mut at = u;
            while let Some((p, s)) = prev[at] {
                steps.push(s);
                at = p;
            }
            steps.reverse();
            return Ok(PrimalPath { start: at, steps });
        }
        for &(e, end) in l.star(u) {
            let edge = &l.edges()[e];
            let (w, forward) = match end {
                End::Tail => (edge.head, true),
                End::Head => (edge.tail, false),
            };
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((u, PathStep { edge: e, forward }));
                queue.push_back(w);
            }
        }
    }
    Err(Error::InvalidPath(format!("no path from hole {from} to hole {to}")))
}

/// Shortest dual path from hole face `from` to hole face `to` through plaquettes.
pub fn shortest_dual(l: &Lattice, from: usize, to: usize) -> Result<DualPath> {
    l.hole(from)?;
    l.hole(to)?;
    let np = l.plaquettes().len();
    let id = |f: Face| match f {
        Face::Plaquette(p) => p,
        Face::Hole(h) => np + h,
    };
    let mut adjacent: Vec<Vec<usize>> = vec![Vec::new(); np + l.holes().len()];
    for (e, edge) in l.edges().iter().enumerate() {
        adjacent[id(edge.left)].push(e);
        adjacent[id(edge.right)].push(e);
    }
    let start = Face::Hole(from);
    let mut prev: Vec<Option<(Face, usize)>> = vec![None; adjacent.len()];
    let mut seen = vec![false; adjacent.len()];
    seen[id(start)] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        for &e in &adjacent[id(f)] {
            let (next, _) = other_face(l, e, f).unwrap();
            if seen[id(next)] {
                continue;
            }
            if next == Face::Hole(to) {
                let mut edges = vec![e];
                let mut at = f;
                while let Some((p, pe)) = prev[id(at)] {
                    edges.push(pe);
                    at = p;
                }
                edges.reverse();
                return DualPath::from_edges(l, start, &edges);
            }
            if matches!(next, Face::Hole(_)) {
                continue;
            }
            seen[id(next)] = true;
            prev[id(next)] = Some((f, e));
            queue.push_back(next);
        }
    }
    Err(Error::InvalidPath(format!("no dual path from hole {from} to hole {to}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::lattice::LatticeSpec;

    #[test]
    fn rings_wind_once() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let l = Lattice::build(&LatticeSpec::annulus(5, 5, "e", "e"), &g).unwrap();
        for k in 0..3 {
            let p = primal_ring(&l, 1, k).unwrap();
            assert!(p.is_closed(&l));
            assert_eq!(hole_windings(&l, Some(&p), None).unwrap(), vec![(1, 1)]);
        }
        for r in 1..3 {
            let d = dual_ring(&l, 1, r).unwrap();
            d.validate(&l).unwrap();
            assert!(d.is_closed(&l));
            assert_eq!(hole_windings(&l, None, Some(&d)).unwrap(), vec![(1, 1)]);
        }
        assert!(primal_ring(&l, 1, 3).is_err());
        assert!(dual_ring(&l, 0, 1).is_err());
    }

    #[test]
    fn shortest_paths_connect_rims() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let l = Lattice::build(&LatticeSpec::annulus(3, 3, "e", "e"), &g).unwrap();
        let p = shortest_primal(&l, 0, 1).unwrap();
        p.validate(&l).unwrap();
        assert_eq!(l.vertices()[p.start].rim, Some(0));
        assert_eq!(l.vertices()[p.end(&l)].rim, Some(1));
        assert_eq!(p.steps.len(), 1);
        let d = shortest_dual(&l, 0, 1).unwrap();
        d.validate(&l).unwrap();
        assert_eq!(d.end(&l), Face::Hole(1));
        assert_eq!(d.steps.len(), 2);
    }
}
